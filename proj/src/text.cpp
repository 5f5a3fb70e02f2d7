#include "redraft/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace redraft::text {

namespace {

bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

char lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool equal_ci(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (lower(a[i]) != lower(b[i])) return false;
    }
    return true;
}

} // namespace

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r\n\f\v");
    return std::string(s.substr(first, last - first + 1));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), lower);
    return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && equal_ci(s.substr(0, prefix.size()), prefix);
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < s.size()) lines.emplace_back(s.substr(start));
            break;
        }
        auto line = s.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = end + 1;
    }
    return lines;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : s) {
        if (is_alnum(c)) {
            current.push_back(lower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

bool contains_phrase(std::string_view haystack, std::string_view phrase) {
    if (phrase.empty() || phrase.size() > haystack.size()) return false;
    for (std::size_t i = 0; i + phrase.size() <= haystack.size(); ++i) {
        if (!equal_ci(haystack.substr(i, phrase.size()), phrase)) continue;
        bool left_ok = i == 0 || !is_alnum(haystack[i - 1]);
        auto end = i + phrase.size();
        bool right_ok = end == haystack.size() || !is_alnum(haystack[end]);
        if (left_ok && right_ok) return true;
    }
    return false;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    if (needle.size() > haystack.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        if (equal_ci(haystack.substr(i, needle.size()), needle)) return true;
    }
    return false;
}

std::vector<std::string> split_sentences(std::string_view s) {
    std::vector<std::string> sentences;
    std::string current;
    for (std::size_t i = 0; i < s.size(); ++i) {
        current.push_back(s[i]);
        bool terminal = s[i] == '.' || s[i] == '!' || s[i] == '?';
        bool boundary = i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1]));
        if (terminal && boundary) {
            auto t = trim(current);
            if (!t.empty()) sentences.push_back(std::move(t));
            current.clear();
        }
    }
    auto t = trim(current);
    if (!t.empty()) sentences.push_back(std::move(t));
    return sentences;
}

std::string normalize(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(lower(c));
    }
    return out;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

double round_half_away(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    // Nudge by a relative epsilon so 0.125-style inputs that land just below
    // the half after scaling still round away from zero.
    double scaled = value * scale;
    double nudged = scaled + std::copysign(1e-9 * std::max(1.0, std::fabs(scaled)), scaled);
    return std::trunc(nudged + std::copysign(0.5, nudged)) / scale;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    if (from.empty()) return s;
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

} // namespace redraft::text
