#include "mixforge/packing.hpp"
#include "mixforge/errors.hpp"
#include "mixforge/sha256.hpp"
#include "mixforge/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

namespace mixforge {

void PackConfig::validate() const {
    if (context_len == 0) throw DomainError("context_len must be positive");
    if (eos_id == pad_id) throw DomainError("eos and pad ids must differ");
    if (shard_size == 0) throw DomainError("shard_size must be positive");
}

Packer::Packer(const PackConfig& config) : config_(config) {
    config_.validate();
    current_.tokens.reserve(config_.context_len);
}

void Packer::open_span(const std::string& doc_id, const std::string& lang) {
    open_doc_id_ = doc_id;
    open_lang_ = lang;
    span_begin_ = static_cast<std::uint32_t>(current_.tokens.size());
    span_open_ = true;
}

void Packer::close_span() {
    if (!span_open_) return;
    auto end = static_cast<std::uint32_t>(current_.tokens.size());
    if (end > span_begin_) current_.spans.push_back({span_begin_, end, open_doc_id_, open_lang_});
    span_open_ = false;
}

void Packer::append_token(std::uint32_t token) {
    current_.tokens.push_back(token);
    ++non_pad_tokens_;
    if (current_.tokens.size() == config_.context_len) {
        // Sequence full: close the open span here and reopen it at the
        // start of the next sequence (carry-over).
        auto end = static_cast<std::uint32_t>(current_.tokens.size());
        if (span_open_ && end > span_begin_) current_.spans.push_back({span_begin_, end, open_doc_id_, open_lang_});
        done_.push_back(std::move(current_));
        current_ = PackedSequence{};
        current_.tokens.reserve(config_.context_len);
        span_begin_ = 0;
    }
}

void Packer::push(const TokenizedDoc& doc) {
    for (std::uint32_t t : doc.tokens)
        if (t == config_.pad_id)
            throw PadCollision("document '" + doc.doc_id + "' contains the pad id " +
                               std::to_string(config_.pad_id));
    ++documents_;
    open_span(doc.doc_id, doc.lang);
    for (std::uint32_t t : doc.tokens) append_token(t);
    append_token(config_.eos_id);
    close_span();
}

std::vector<PackedSequence> Packer::finish() {
    if (!current_.tokens.empty()) {
        current_.pad_count = config_.context_len - static_cast<std::uint32_t>(current_.tokens.size());
        current_.tokens.resize(config_.context_len, config_.pad_id);
        done_.push_back(std::move(current_));
        current_ = PackedSequence{};
    }
    return drain();
}

std::vector<PackedSequence> Packer::drain() {
    std::vector<PackedSequence> out = std::move(done_);
    done_.clear();
    return out;
}

std::vector<PackedSequence> pack(std::span<const TokenizedDoc> docs, const PackConfig& config) {
    Packer packer(config);
    for (const auto& d : docs) packer.push(d);
    return packer.finish();
}

std::string sequence_to_jsonl(const PackedSequence& seq) {
    // Built by hand so the byte layout is pinned: keys seq, spans, pad in
    // that order, no whitespace.
    std::string out = "{\"seq\":[";
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(seq.tokens[i]);
    }
    out += "],\"spans\":[";
    for (std::size_t i = 0; i < seq.spans.size(); ++i) {
        const auto& s = seq.spans[i];
        if (i) out.push_back(',');
        out.push_back('[');
        out += std::to_string(s.begin);
        out.push_back(',');
        out += std::to_string(s.end);
        out.push_back(',');
        out += nlohmann::json(s.doc_id).dump();
        out.push_back(',');
        out += nlohmann::json(s.lang).dump();
        out.push_back(']');
    }
    out += "],\"pad\":" + std::to_string(seq.pad_count) + "}";
    return out;
}

PackedSequence sequence_from_jsonl(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    PackedSequence seq;
    seq.tokens = j.at("seq").get<std::vector<std::uint32_t>>();
    for (const auto& s : j.at("spans")) {
        SeqSpan span;
        span.begin = s.at(0).get<std::uint32_t>();
        span.end = s.at(1).get<std::uint32_t>();
        span.doc_id = s.at(2).get<std::string>();
        span.lang = s.at(3).get<std::string>();
        seq.spans.push_back(std::move(span));
    }
    seq.pad_count = j.at("pad").get<std::uint32_t>();
    return seq;
}

namespace {

std::string shard_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "shard-%05zu.jsonl", index);
    return buf;
}

std::uint64_t seq_non_pad(const PackedSequence& s) {
    return s.tokens.size() - s.pad_count;
}

nlohmann::json manifest_json(const ShardManifest& m) {
    nlohmann::json j;
    j["recipe"] = m.recipe;
    j["seed"] = m.seed;
    j["context_len"] = m.context_len;
    j["total_sequences"] = m.total_sequences;
    j["total_non_pad_tokens"] = m.total_non_pad_tokens;
    auto shards = nlohmann::json::array();
    for (const auto& s : m.shards) {
        nlohmann::json js;
        js["name"] = s.name;
        js["num_sequences"] = s.num_sequences;
        js["non_pad_tokens"] = s.non_pad_tokens;
        js["sha256"] = s.sha256;
        shards.push_back(js);
    }
    j["shards"] = shards;
    return j;
}

} // namespace

ShardManifest write_shards(std::span<const PackedSequence> seqs, const std::filesystem::path& dir,
                           const PackConfig& config, const std::string& recipe_name, unsigned workers) {
    namespace fs = std::filesystem;
    config.validate();
    fs::create_directories(dir);

    const std::size_t shard_count = (seqs.size() + config.shard_size - 1) / config.shard_size;
    ShardManifest manifest;
    manifest.recipe = recipe_name;
    manifest.seed = config.seed;
    manifest.context_len = config.context_len;
    manifest.shards.resize(shard_count);

    std::vector<std::string> payloads(shard_count);
    auto build_shard = [&](std::size_t s) {
        std::size_t begin = s * config.shard_size;
        std::size_t end = std::min(seqs.size(), begin + config.shard_size);
        std::string payload;
        std::uint64_t non_pad = 0;
        for (std::size_t i = begin; i < end; ++i) {
            payload += sequence_to_jsonl(seqs[i]);
            payload.push_back('\n');
            non_pad += seq_non_pad(seqs[i]);
        }
        ShardInfo info;
        info.name = shard_name(s);
        info.num_sequences = end - begin;
        info.non_pad_tokens = non_pad;
        info.sha256 = sha256_hex(payload);
        manifest.shards[s] = std::move(info);
        payloads[s] = std::move(payload);
    };

    if (workers <= 1 || shard_count < 2) {
        for (std::size_t s = 0; s < shard_count; ++s) build_shard(s);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> cursor{0};
        unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(shard_count));
        for (unsigned w = 0; w < n; ++w)
            pool.emplace_back([&] {
                for (std::size_t s = cursor.fetch_add(1); s < shard_count; s = cursor.fetch_add(1))
                    build_shard(s);
            });
        for (auto& t : pool) t.join();
    }

    for (const auto& s : manifest.shards) {
        manifest.total_sequences += s.num_sequences;
        manifest.total_non_pad_tokens += s.non_pad_tokens;
    }

    try {
        // Invalidate any previous shard set first: drop its manifest, then
        // stale shard files beyond the new count.
        std::error_code ec;
        fs::remove(dir / "manifest.json", ec);
        for (const auto& entry : fs::directory_iterator(dir)) {
            auto name = entry.path().filename().string();
            if (name.rfind("shard-", 0) == 0 && entry.path().extension() == ".jsonl") {
                bool current = false;
                for (const auto& s : manifest.shards) current = current || s.name == name;
                if (!current) fs::remove(entry.path(), ec);
            }
        }
        for (std::size_t s = 0; s < shard_count; ++s)
            util::atomic_write_file(dir / manifest.shards[s].name, payloads[s]);
        // Manifest goes last: its presence marks a complete shard set.
        util::atomic_write_file(dir / "manifest.json", manifest_json(manifest).dump(2) + "\n");
    } catch (...) {
        std::error_code ec;
        for (std::size_t s = 0; s < shard_count; ++s) fs::remove(dir / manifest.shards[s].name, ec);
        fs::remove(dir / "manifest.json", ec);
        throw;
    }

    auto report = verify_manifest(dir);
    if (!report.ok) throw ManifestMismatch("post-write verification failed in " + dir.string());
    return manifest;
}

ShardManifest read_manifest(const std::filesystem::path& dir) {
    auto path = dir / "manifest.json";
    if (!std::filesystem::exists(path)) throw MissingManifest("no manifest.json in " + dir.string());
    nlohmann::json j = nlohmann::json::parse(util::read_file(path));
    ShardManifest m;
    m.recipe = j.at("recipe").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.context_len = j.at("context_len").get<std::uint32_t>();
    m.total_sequences = j.at("total_sequences").get<std::uint64_t>();
    m.total_non_pad_tokens = j.at("total_non_pad_tokens").get<std::uint64_t>();
    for (const auto& js : j.at("shards")) {
        ShardInfo s;
        s.name = js.at("name").get<std::string>();
        s.num_sequences = js.at("num_sequences").get<std::uint64_t>();
        s.non_pad_tokens = js.at("non_pad_tokens").get<std::uint64_t>();
        s.sha256 = js.at("sha256").get<std::string>();
        m.shards.push_back(std::move(s));
    }
    return m;
}

VerifyReport verify_manifest(const std::filesystem::path& dir) {
    ShardManifest manifest = read_manifest(dir);
    VerifyReport report;
    report.ok = true;

    for (const auto& s : manifest.shards) {
        ShardCheck check;
        check.name = s.name;
        auto path = dir / s.name;
        if (!std::filesystem::exists(path)) {
            check.ok = false;
            check.detail = "missing file";
            report.ok = false;
            report.shards.push_back(std::move(check));
            continue;
        }
        std::string digest = sha256_file_hex(path);
        if (digest != s.sha256) {
            check.ok = false;
            check.detail = "sha256 mismatch";
            report.ok = false;
            report.shards.push_back(std::move(check));
            continue;
        }
        // Checksum held, so the recount is over trusted bytes.
        std::uint64_t sequences = 0, non_pad = 0;
        for (const auto& line : util::read_lines(path)) {
            if (line.empty()) continue;
            PackedSequence seq = sequence_from_jsonl(line);
            ++sequences;
            non_pad += seq_non_pad(seq);
        }
        if (sequences != s.num_sequences || non_pad != s.non_pad_tokens) {
            check.ok = false;
            check.detail = "count mismatch";
            report.ok = false;
        } else {
            check.ok = true;
        }
        report.recounted_sequences += sequences;
        report.recounted_non_pad_tokens += non_pad;
        report.shards.push_back(std::move(check));
    }

    report.totals_ok = report.recounted_sequences == manifest.total_sequences &&
                       report.recounted_non_pad_tokens == manifest.total_non_pad_tokens;
    report.ok = report.ok && report.totals_ok;
    return report;
}

std::string verify_report_text(const VerifyReport& report) {
    std::string out;
    for (const auto& s : report.shards)
        out += (s.ok ? "pass " : "FAIL ") + s.name + (s.detail.empty() ? "" : " (" + s.detail + ")") + "\n";
    out += std::string("totals ") + (report.totals_ok ? "pass" : "FAIL") + ": " +
           std::to_string(report.recounted_sequences) + " sequences, " +
           std::to_string(report.recounted_non_pad_tokens) + " non-pad tokens\n";
    out += report.ok ? "OK\n" : "MISMATCH\n";
    return out;
}

} // namespace mixforge
