#include "redraft/tags.hpp"

#include "redraft/error.hpp"
#include "redraft/text.hpp"

namespace redraft::judge {

namespace {

struct Span {
    std::size_t content_begin;
    std::size_t content_end;
    std::size_t after;
};

std::optional<Span> next_pair(std::string_view text, std::string_view tag, std::size_t from) {
    std::string open = "<" + std::string(tag) + ">";
    std::string close = "</" + std::string(tag) + ">";
    while (from <= text.size()) {
        auto close_pos = text.find(close, from);
        if (close_pos == std::string_view::npos) return std::nullopt;
        auto region = text.substr(from, close_pos - from);
        auto open_rel = region.rfind(open);
        if (open_rel != std::string_view::npos) {
            auto begin = from + open_rel + open.size();
            return Span{begin, close_pos, close_pos + close.size()};
        }
        from = close_pos + close.size();
    }
    return std::nullopt;
}

} // namespace

std::optional<std::string> find_tagged(std::string_view text, std::string_view tag) {
    auto span = next_pair(text, tag, 0);
    if (!span) return std::nullopt;
    return text::trim(text.substr(span->content_begin, span->content_end - span->content_begin));
}

std::string parse_tagged(std::string_view text, std::string_view tag) {
    auto found = find_tagged(text, tag);
    if (!found) {
        throw ParseError(std::string(tag),
                         "missing or unclosed <" + std::string(tag) + "> tag in judge output");
    }
    return *found;
}

std::optional<std::string> find_last_tagged(std::string_view text, std::string_view tag) {
    std::optional<std::string> last;
    std::size_t from = 0;
    while (auto span = next_pair(text, tag, from)) {
        last = text::trim(text.substr(span->content_begin, span->content_end - span->content_begin));
        from = span->after;
    }
    return last;
}

std::vector<std::string> find_all_tagged(std::string_view text, std::string_view tag) {
    std::vector<std::string> out;
    std::size_t from = 0;
    while (auto span = next_pair(text, tag, from)) {
        out.push_back(
            text::trim(text.substr(span->content_begin, span->content_end - span->content_begin)));
        from = span->after;
    }
    return out;
}

std::string emit_tagged(std::string_view tag, std::string_view content) {
    std::string out = "<" + std::string(tag) + ">";
    out += content;
    out += "</" + std::string(tag) + ">";
    return out;
}

} // namespace redraft::judge
