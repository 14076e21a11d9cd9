#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roleplan {

// Versioned agent/task texts. The manifest is a flat "key = value" file; task descriptions
// live in <design>/<task>.txt next to it. Per-task keys are "<design>.<task>.<field>" with
// fields role, goal, backstory, expected_output and context (comma-separated task ids).
class PromptPack {
public:
    static PromptPack load(const std::filesystem::path& dir);
    static PromptPack from_entries(std::map<std::string, std::string> manifest, std::map<std::string, std::string> descriptions,
                                   std::filesystem::path dir = {});

    std::string version() const;
    bool canonical() const;
    const std::filesystem::path& dir() const { return dir_; }

    // Throws PromptPackError when the key is absent.
    const std::string& value(std::string_view key) const;
    std::optional<std::string> find(std::string_view key) const;
    // Text of <design>/<task>.txt. Throws PromptPackError when absent.
    const std::string& description(std::string_view design, std::string_view task) const;
    std::vector<std::string> context(std::string_view design, std::string_view task) const;

    const std::map<std::string, std::string, std::less<>>& manifest() const { return manifest_; }

private:
    std::map<std::string, std::string, std::less<>> manifest_;
    std::map<std::string, std::string, std::less<>> descriptions_;
    std::filesystem::path dir_;
};

// "key = value" lines; '#' starts a comment line. Throws PromptPackError on malformed lines
// or duplicate keys.
std::map<std::string, std::string> parse_manifest(std::string_view text);

// Throws PromptPackError when the template holds any {placeholder} other than {role}.
void check_placeholders(std::string_view text, std::string_view where);

std::string substitute_role(std::string_view text, std::string_view role);

} // namespace roleplan
