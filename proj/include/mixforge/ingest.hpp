#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mixforge {

struct Document {
    std::string id;
    std::string lang;   // registry-pattern code, e.g. "yor_Latn"
    std::string source; // source id
    std::string text;   // UTF-8
};

enum class TokenizerKind { Byte, Whitespace, External };

// The byte tokenizer is the reproducibility baseline: ids 0..255 are the
// raw bytes, eos=256, pad=257, vocab 258. The whitespace tokenizer hashes
// each maximal non-whitespace run into [258, vocab_size). External
// tokenizers only tag counts produced elsewhere; they cannot run here.
struct TokenizerSpec {
    TokenizerKind kind = TokenizerKind::Byte;
    std::string external_name;
    std::uint32_t vocab_size = 258;
    std::uint32_t eos_id = 256;
    std::uint32_t pad_id = 257;

    void validate() const; // throws InvalidTokenizer
    std::string tag() const;

    static TokenizerSpec byte_default();
    static TokenizerSpec whitespace(std::uint32_t vocab_size);
    static TokenizerSpec external(std::string name);
};

std::vector<std::uint32_t> tokenize(const Document& doc, const TokenizerSpec& spec);

struct CellStats {
    std::uint64_t documents = 0;
    std::uint64_t tokens = 0;
    bool operator==(const CellStats&) const = default;
};

struct CorpusStats {
    std::string tokenizer_tag;
    // (lang, source) -> counts
    std::map<std::pair<std::string, std::string>, CellStats> cells;

    CellStats lang_total(const std::string& lang) const;
    CellStats grand_total() const;
    bool operator==(const CorpusStats&) const = default;
};

// Deterministic for a given document set regardless of worker count:
// workers consume disjoint contiguous partitions and results are merged.
CorpusStats accumulate_stats(std::span<const Document> docs, const TokenizerSpec& spec,
                             unsigned workers = 1);

// Pointwise sum; tags must match (counts from different tokenizers never mix).
CorpusStats merge_stats(const CorpusStats& a, const CorpusStats& b);

// Throws InvalidDocument (empty id, bad lang code, unknown source, bad UTF-8).
void validate_document(const Document& doc);

// JSON-lines corpus file: one document per line, keys exactly
// id, lang, source, text.
std::vector<Document> read_documents_jsonl(const std::filesystem::path& path);
std::string document_to_jsonl(const Document& doc);

std::string stats_to_csv(const CorpusStats& stats);

} // namespace mixforge
