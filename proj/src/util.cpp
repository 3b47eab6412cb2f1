#include "mixforge/util.hpp"
#include "mixforge/errors.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace mixforge::util {

std::optional<std::uint64_t> parse_u64(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 10);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

double round_half_even(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    double scaled = value * scale;
    double r = std::nearbyint(scaled); // FE_TONEAREST: ties to even
    // Guard against representation drift right at the .5 boundary.
    if (std::abs(scaled - std::trunc(scaled) - 0.5) < 1e-9 || std::abs(scaled - std::trunc(scaled) + 0.5) < 1e-9) {
        double lo = std::floor(scaled), hi = std::ceil(scaled);
        r = (std::fmod(std::abs(lo), 2.0) < 0.5) ? lo : hi;
        if (lo == hi) r = lo;
    }
    return r / scale;
}

std::string format_fixed(double value, int decimals) {
    double r = round_half_even(value, decimals);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, r);
    std::string out(buf);
    if (out == "-0" || out.rfind("-0.", 0) == 0) {
        bool all_zero = true;
        for (char c : out)
            if (c != '-' && c != '0' && c != '.') all_zero = false;
        if (all_zero) out.erase(0, 1);
    }
    return out;
}

std::string group_digits(std::uint64_t value) {
    std::string digits = std::to_string(value);
    std::string out;
    int run = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (run && run % 3 == 0) out.push_back(',');
        out.push_back(*it);
        ++run;
    }
    return {out.rbegin(), out.rend()};
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

std::string strip(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
    return std::string(s.substr(b, e - b));
}

namespace {

// Returns the sequence length at s[i], or 0 if malformed.
int utf8_seq(std::string_view s, std::size_t i, char32_t* cp_out) {
    unsigned char c0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if (c0 < 0x80) {
        if (cp_out) *cp_out = c0;
        return 1;
    }
    if ((c0 & 0xE0) == 0xC0) {
        if (!cont(1)) return 0;
        char32_t cp = (char32_t(c0 & 0x1F) << 6) | (s[i + 1] & 0x3F);
        if (cp < 0x80) return 0; // overlong
        if (cp_out) *cp_out = cp;
        return 2;
    }
    if ((c0 & 0xF0) == 0xE0) {
        if (!cont(1) || !cont(2)) return 0;
        char32_t cp = (char32_t(c0 & 0x0F) << 12) | (char32_t(s[i + 1] & 0x3F) << 6) | (s[i + 2] & 0x3F);
        if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
        if (cp_out) *cp_out = cp;
        return 3;
    }
    if ((c0 & 0xF8) == 0xF0) {
        if (!cont(1) || !cont(2) || !cont(3)) return 0;
        char32_t cp = (char32_t(c0 & 0x07) << 18) | (char32_t(s[i + 1] & 0x3F) << 12) |
                      (char32_t(s[i + 2] & 0x3F) << 6) | (s[i + 3] & 0x3F);
        if (cp < 0x10000 || cp > 0x10FFFF) return 0;
        if (cp_out) *cp_out = cp;
        return 4;
    }
    return 0;
}

} // namespace

bool utf8_valid(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        int n = utf8_seq(s, i, nullptr);
        if (n == 0) return false;
        i += static_cast<std::size_t>(n);
    }
    return true;
}

std::vector<char32_t> utf8_decode(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        char32_t cp = 0;
        int n = utf8_seq(s, i, &cp);
        if (n == 0) throw DomainError("invalid UTF-8 byte sequence");
        out.push_back(cp);
        i += static_cast<std::size_t>(n);
    }
    return out;
}

std::string utf8_encode(std::u32string_view cps) {
    std::string out;
    for (char32_t cp : cps) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    fs::path dir = path.parent_path();
    if (dir.empty()) dir = ".";
    std::error_code ec;
    fs::create_directories(dir, ec);

    static std::atomic<std::uint64_t> counter{0};
    fs::path tmp = dir / (path.filename().string() + ".tmp." + std::to_string(::getpid()) + "." +
                          std::to_string(counter.fetch_add(1)));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            out.close();
            fs::remove(tmp, ec);
            throw IoError("short write: " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("rename failed: " + path.string() + " (" + ec.message() + ")");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

} // namespace mixforge::util
