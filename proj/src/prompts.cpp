#include "redraft/prompts.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "redraft/error.hpp"

namespace redraft {

namespace {

bool is_placeholder_char(char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) ||
           c == '_';
}

} // namespace

std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '{') {
            auto close = tpl.find('}', i + 1);
            if (close != std::string_view::npos && close > i + 1) {
                auto name = tpl.substr(i + 1, close - i - 1);
                bool valid = true;
                for (char c : name) valid = valid && is_placeholder_char(c);
                if (valid) {
                    auto it = values.find(std::string(name));
                    if (it == values.end()) {
                        throw ConfigError("prompt placeholder {" + std::string(name) + "} has no value");
                    }
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tpl[i]);
        ++i;
    }
    return out;
}

PromptLibrary::PromptLibrary() {
    for (const auto& [id, body] : builtin_templates()) templates_.emplace(id, body);
}

PromptLibrary PromptLibrary::with_overrides(const std::filesystem::path& dir) {
    PromptLibrary lib;
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("prompt directory " + dir.string() + " does not exist");
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream buffer;
        buffer << in.rdbuf();
        lib.templates_[entry.path().stem().string()] = buffer.str();
    }
    return lib;
}

bool PromptLibrary::contains(std::string_view id) const {
    return templates_.find(id) != templates_.end();
}

const std::string& PromptLibrary::get(std::string_view id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw ConfigError("unknown prompt template '" + std::string(id) + "'");
    return it->second;
}

std::string PromptLibrary::render(std::string_view id,
                                  const std::map<std::string, std::string>& values) const {
    return render_template(get(id), values);
}

std::vector<std::string> PromptLibrary::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : templates_) out.push_back(id);
    return out;
}

} // namespace redraft
