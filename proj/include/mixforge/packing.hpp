#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mixforge {

struct PackConfig {
    std::uint32_t context_len = 16384;
    std::uint32_t eos_id = 256;
    std::uint32_t pad_id = 257;
    std::uint32_t shard_size = 1024; // sequences per shard
    std::uint64_t seed = 0;

    void validate() const;
};

struct TokenizedDoc {
    std::string doc_id;
    std::string lang;
    std::vector<std::uint32_t> tokens;
};

struct SeqSpan {
    std::uint32_t begin = 0;
    std::uint32_t end = 0; // exclusive; includes the document's eos
    std::string doc_id;
    std::string lang;
    bool operator==(const SeqSpan&) const = default;
};

struct PackedSequence {
    std::vector<std::uint32_t> tokens; // length exactly context_len
    std::vector<SeqSpan> spans;        // ordered, non-overlapping, cover [0, L - pad_count)
    std::uint32_t pad_count = 0;
};

// Carry-over packing: documents are concatenated in stream order, each
// followed by one eos, and may straddle sequence boundaries. Only the
// final partial sequence is padded. Throws PadCollision if any input
// token equals pad_id.
class Packer {
public:
    explicit Packer(const PackConfig& config);

    void push(const TokenizedDoc& doc);
    // Pads and emits the trailing partial sequence, if any.
    std::vector<PackedSequence> finish();
    // Sequences completed so far (moves them out).
    std::vector<PackedSequence> drain();

    std::uint64_t non_pad_tokens() const { return non_pad_tokens_; }
    std::uint64_t documents() const { return documents_; }

private:
    void open_span(const std::string& doc_id, const std::string& lang);
    void append_token(std::uint32_t token);
    void close_span();

    PackConfig config_;
    std::vector<PackedSequence> done_;
    PackedSequence current_;
    std::string open_doc_id_, open_lang_;
    std::uint32_t span_begin_ = 0;
    bool span_open_ = false;
    std::uint64_t non_pad_tokens_ = 0;
    std::uint64_t documents_ = 0;
};

std::vector<PackedSequence> pack(std::span<const TokenizedDoc> docs, const PackConfig& config);

// One sequence per line: {"seq":[...],"spans":[[begin,end,"doc","lang"],...],"pad":n}
std::string sequence_to_jsonl(const PackedSequence& seq);
PackedSequence sequence_from_jsonl(const std::string& line);

struct ShardInfo {
    std::string name;
    std::uint64_t num_sequences = 0;
    std::uint64_t non_pad_tokens = 0;
    std::string sha256;
};

struct ShardManifest {
    std::string recipe;
    std::uint64_t seed = 0;
    std::uint32_t context_len = 0;
    std::uint64_t total_sequences = 0;
    std::uint64_t total_non_pad_tokens = 0;
    std::vector<ShardInfo> shards;
};

// Writes shard-NNNNN.jsonl files of shard_size sequences (last may be
// short), then manifest.json last. Serialization and hashing fan out to
// `workers` threads; bytes are identical for any worker count. Output is
// verified against the manifest before returning.
ShardManifest write_shards(std::span<const PackedSequence> seqs, const std::filesystem::path& dir,
                           const PackConfig& config, const std::string& recipe_name, unsigned workers = 1);

struct ShardCheck {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct VerifyReport {
    bool ok = false;
    bool totals_ok = false;
    std::uint64_t recounted_sequences = 0;
    std::uint64_t recounted_non_pad_tokens = 0;
    std::vector<ShardCheck> shards;
};

// Recomputes checksums and counts from the shard files and checks them
// against manifest.json. Throws MissingManifest when there is none.
VerifyReport verify_manifest(const std::filesystem::path& dir);

ShardManifest read_manifest(const std::filesystem::path& dir);
std::string verify_report_text(const VerifyReport& report);

} // namespace mixforge
