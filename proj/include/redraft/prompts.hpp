#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace redraft {

/// Templates compiled in from prompts/*.txt, keyed by file stem.
const std::map<std::string, std::string>& builtin_templates();

/// Substitutes `{name}` placeholders in one pass; substituted text is never rescanned.
/// Throws ConfigError for a placeholder without a value.
std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& values);

/// Named prompt templates. Starts from the built-in set; a directory of `<id>.txt`
/// files may override or extend it.
class PromptLibrary {
public:
    PromptLibrary();
    static PromptLibrary with_overrides(const std::filesystem::path& dir);

    bool contains(std::string_view id) const;
    const std::string& get(std::string_view id) const;
    std::string render(std::string_view id, const std::map<std::string, std::string>& values) const;
    std::vector<std::string> ids() const;

private:
    std::map<std::string, std::string, std::less<>> templates_;
};

} // namespace redraft
