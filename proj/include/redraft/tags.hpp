#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Tag protocol used by every judge prompt: the model answers inside <tag>...</tag> pairs.
namespace redraft::judge {

/// Content of the first well-formed `<tag>...</tag>` pair, trimmed.
/// "First" means the pair closed earliest; its opening tag is the nearest one before the close.
/// Throws ParseError naming the tag when no pair exists.
std::string parse_tagged(std::string_view text, std::string_view tag);

std::optional<std::string> find_tagged(std::string_view text, std::string_view tag);

/// Content of the last well-formed pair. Prompts mention their tags in the instructions
/// before the payload, so payload extraction reads the last pair.
std::optional<std::string> find_last_tagged(std::string_view text, std::string_view tag);

/// Every non-overlapping pair in order of appearance, trimmed.
std::vector<std::string> find_all_tagged(std::string_view text, std::string_view tag);

std::string emit_tagged(std::string_view tag, std::string_view content);

} // namespace redraft::judge
