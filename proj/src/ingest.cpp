#include "mixforge/ingest.hpp"
#include "mixforge/errors.hpp"
#include "mixforge/registry.hpp"
#include "mixforge/rng.hpp"
#include "mixforge/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <thread>

namespace mixforge {

void TokenizerSpec::validate() const {
    if (eos_id == pad_id) throw InvalidTokenizer("eos and pad ids must differ");
    if (eos_id >= vocab_size || pad_id >= vocab_size)
        throw InvalidTokenizer("special ids must be below vocab_size");
    switch (kind) {
    case TokenizerKind::Byte:
        if (vocab_size < 258) throw InvalidTokenizer("byte tokenizer needs vocab_size >= 258");
        break;
    case TokenizerKind::Whitespace:
        if (vocab_size <= 258) throw InvalidTokenizer("whitespace tokenizer needs vocab_size > 258");
        break;
    case TokenizerKind::External:
        if (external_name.empty()) throw InvalidTokenizer("external tokenizer needs a name");
        break;
    }
}

std::string TokenizerSpec::tag() const {
    switch (kind) {
    case TokenizerKind::Byte: return "byte";
    case TokenizerKind::Whitespace: return "ws" + std::to_string(vocab_size);
    case TokenizerKind::External: return "external:" + external_name;
    }
    return "?";
}

TokenizerSpec TokenizerSpec::byte_default() {
    return {};
}

TokenizerSpec TokenizerSpec::whitespace(std::uint32_t vocab_size) {
    TokenizerSpec s;
    s.kind = TokenizerKind::Whitespace;
    s.vocab_size = vocab_size;
    return s;
}

TokenizerSpec TokenizerSpec::external(std::string name) {
    TokenizerSpec s;
    s.kind = TokenizerKind::External;
    s.external_name = std::move(name);
    return s;
}

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

} // namespace

std::vector<std::uint32_t> tokenize(const Document& doc, const TokenizerSpec& spec) {
    spec.validate();
    std::vector<std::uint32_t> ids;
    switch (spec.kind) {
    case TokenizerKind::Byte:
        ids.reserve(doc.text.size());
        for (char c : doc.text) ids.push_back(static_cast<unsigned char>(c));
        break;
    case TokenizerKind::Whitespace: {
        const std::uint64_t span = spec.vocab_size - 258;
        std::size_t i = 0;
        while (i < doc.text.size()) {
            while (i < doc.text.size() && is_ws(doc.text[i])) ++i;
            std::size_t start = i;
            while (i < doc.text.size() && !is_ws(doc.text[i])) ++i;
            if (i > start) {
                std::uint64_t h = fnv1a64(std::string_view(doc.text).substr(start, i - start));
                ids.push_back(static_cast<std::uint32_t>(258 + h % span));
            }
        }
        break;
    }
    case TokenizerKind::External:
        throw InvalidTokenizer("external tokenizer '" + spec.external_name +
                               "' tags counts but cannot tokenize here");
    }
    return ids;
}

void validate_document(const Document& doc) {
    if (doc.id.empty()) throw InvalidDocument("document with empty id");
    if (!valid_code(doc.lang)) throw InvalidDocument("document '" + doc.id + "': bad lang code '" + doc.lang + "'");
    if (!valid_source_name(doc.source))
        throw InvalidDocument("document '" + doc.id + "': unknown source '" + doc.source + "'");
    if (!util::utf8_valid(doc.text)) throw InvalidDocument("document '" + doc.id + "': text is not valid UTF-8");
}

CellStats CorpusStats::lang_total(const std::string& lang) const {
    CellStats total;
    for (const auto& [key, cell] : cells) {
        if (key.first != lang) continue;
        total.documents += cell.documents;
        total.tokens += cell.tokens;
    }
    return total;
}

CellStats CorpusStats::grand_total() const {
    CellStats total;
    for (const auto& [key, cell] : cells) {
        total.documents += cell.documents;
        total.tokens += cell.tokens;
    }
    return total;
}

namespace {

CorpusStats accumulate_range(std::span<const Document> docs, const TokenizerSpec& spec) {
    CorpusStats stats;
    stats.tokenizer_tag = spec.tag();
    for (const auto& doc : docs) {
        validate_document(doc);
        auto ids = tokenize(doc, spec);
        auto& cell = stats.cells[{doc.lang, doc.source}];
        cell.documents += 1;
        cell.tokens += ids.size();
    }
    return stats;
}

} // namespace

CorpusStats accumulate_stats(std::span<const Document> docs, const TokenizerSpec& spec, unsigned workers) {
    spec.validate();
    if (workers <= 1 || docs.size() < 2) return accumulate_range(docs, spec);

    workers = std::min<unsigned>(workers, static_cast<unsigned>(docs.size()));
    std::vector<CorpusStats> parts(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    const std::size_t chunk = (docs.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                std::size_t begin = w * chunk;
                std::size_t end = std::min(docs.size(), begin + chunk);
                if (begin < end) parts[w] = accumulate_range(docs.subspan(begin, end - begin), spec);
                else parts[w].tokenizer_tag = spec.tag();
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    CorpusStats merged = std::move(parts[0]);
    for (unsigned w = 1; w < workers; ++w) merged = merge_stats(merged, parts[w]);
    return merged;
}

CorpusStats merge_stats(const CorpusStats& a, const CorpusStats& b) {
    if (!a.tokenizer_tag.empty() && !b.tokenizer_tag.empty() && a.tokenizer_tag != b.tokenizer_tag)
        throw InvalidTokenizer("cannot merge stats tagged '" + a.tokenizer_tag + "' and '" + b.tokenizer_tag + "'");
    CorpusStats out = a;
    if (out.tokenizer_tag.empty()) out.tokenizer_tag = b.tokenizer_tag;
    for (const auto& [key, cell] : b.cells) {
        auto& dst = out.cells[key];
        dst.documents += cell.documents;
        dst.tokens += cell.tokens;
    }
    return out;
}

std::vector<Document> read_documents_jsonl(const std::filesystem::path& path) {
    // A directory means one or more .jsonl files, possibly grouped per
    // language; files are read in sorted path order.
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::recursive_directory_iterator(path))
            if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw InvalidDocument("no .jsonl files under " + path.string());
        std::vector<Document> docs;
        for (const auto& file : files) {
            auto part = read_documents_jsonl(file);
            docs.insert(docs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
        return docs;
    }

    auto lines = util::read_lines(path);
    std::vector<Document> docs;
    docs.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (util::strip(lines[i]).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(lines[i]);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidDocument(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
        if (!j.is_object() || j.size() != 4 || !j.contains("id") || !j.contains("lang") ||
            !j.contains("source") || !j.contains("text"))
            throw InvalidDocument(path.string() + ":" + std::to_string(i + 1) +
                                  ": document keys must be exactly id, lang, source, text");
        Document d;
        d.id = j.at("id").get<std::string>();
        d.lang = j.at("lang").get<std::string>();
        d.source = j.at("source").get<std::string>();
        d.text = j.at("text").get<std::string>();
        validate_document(d);
        docs.push_back(std::move(d));
    }
    return docs;
}

std::string document_to_jsonl(const Document& doc) {
    nlohmann::ordered_json j;
    j["id"] = doc.id;
    j["lang"] = doc.lang;
    j["source"] = doc.source;
    j["text"] = doc.text;
    return j.dump();
}

std::string stats_to_csv(const CorpusStats& stats) {
    std::string out = "lang,source,documents,tokens\n";
    for (const auto& [key, cell] : stats.cells) {
        out += key.first + "," + key.second + "," + std::to_string(cell.documents) + "," +
               std::to_string(cell.tokens) + "\n";
    }
    std::map<std::string, CellStats> totals;
    for (const auto& [key, cell] : stats.cells) {
        totals[key.first].documents += cell.documents;
        totals[key.first].tokens += cell.tokens;
    }
    for (const auto& [lang, cell] : totals)
        out += lang + ",total," + std::to_string(cell.documents) + "," + std::to_string(cell.tokens) + "\n";
    return out;
}

} // namespace mixforge
