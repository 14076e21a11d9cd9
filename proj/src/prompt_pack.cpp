#include "roleplan/prompt_pack.hpp"

#include "roleplan/digest.hpp"
#include "roleplan/errors.hpp"

#include <algorithm>
#include <cctype>

namespace roleplan {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::string description_key(std::string_view design, std::string_view task) {
    return std::string(design) + "/" + std::string(task);
}

} // namespace

std::map<std::string, std::string> parse_manifest(std::string_view text) {
    std::map<std::string, std::string> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw PromptPackError("manifest line " + std::to_string(line_no) + ": expected 'key = value'");
        auto key = trim(std::string_view(line).substr(0, eq));
        auto value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw PromptPackError("manifest line " + std::to_string(line_no) + ": empty key");
        if (!out.emplace(key, value).second) throw PromptPackError("manifest line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return out;
}

void check_placeholders(std::string_view text, std::string_view where) {
    for (auto open = text.find('{'); open != std::string_view::npos; open = text.find('{', open + 1)) {
        const auto close = text.find('}', open);
        if (close == std::string_view::npos) return;
        const auto name = text.substr(open + 1, close - open - 1);
        const bool identifier = !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
            return std::isalnum(c) || c == '_';
        });
        if (identifier && name != "role") {
            throw PromptPackError(std::string(where) + ": unsupported placeholder {" + std::string(name) + "}");
        }
    }
}

std::string substitute_role(std::string_view text, std::string_view role) {
    std::string out(text);
    constexpr std::string_view key = "{role}";
    for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + role.size()))
        out.replace(pos, key.size(), role);
    return out;
}

PromptPack PromptPack::from_entries(std::map<std::string, std::string> manifest, std::map<std::string, std::string> descriptions,
                                    std::filesystem::path dir) {
    PromptPack pack;
    for (auto& [k, v] : manifest) {
        check_placeholders(v, "manifest key " + k);
        pack.manifest_.emplace(k, std::move(v));
    }
    for (auto& [k, v] : descriptions) {
        check_placeholders(v, k + ".txt");
        pack.descriptions_.emplace(k, std::move(v));
    }
    pack.dir_ = std::move(dir);
    return pack;
}

PromptPack PromptPack::load(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.txt";
    if (!std::filesystem::exists(manifest_path)) throw PromptPackError("prompt pack has no manifest: " + manifest_path.string());
    auto manifest = parse_manifest(read_text_file(manifest_path));

    std::map<std::string, std::string> descriptions;
    for (const auto& design_dir : std::filesystem::directory_iterator(dir)) {
        if (!design_dir.is_directory()) continue;
        for (const auto& file : std::filesystem::directory_iterator(design_dir.path())) {
            if (file.path().extension() != ".txt") continue;
            descriptions[description_key(design_dir.path().filename().string(), file.path().stem().string())] =
                trim(read_text_file(file.path()));
        }
    }
    return from_entries(std::move(manifest), std::move(descriptions), dir);
}

std::string PromptPack::version() const {
    return find("pack.version").value_or("unversioned");
}

bool PromptPack::canonical() const {
    return find("pack.canonical").value_or("false") == "true";
}

const std::string& PromptPack::value(std::string_view key) const {
    auto it = manifest_.find(key);
    if (it == manifest_.end()) throw PromptPackError("prompt pack lacks key '" + std::string(key) + "'");
    return it->second;
}

std::optional<std::string> PromptPack::find(std::string_view key) const {
    auto it = manifest_.find(key);
    if (it == manifest_.end()) return std::nullopt;
    return it->second;
}

const std::string& PromptPack::description(std::string_view design, std::string_view task) const {
    auto it = descriptions_.find(description_key(design, task));
    if (it == descriptions_.end()) {
        throw PromptPackError("prompt pack lacks task description " + description_key(design, task) + ".txt");
    }
    return it->second;
}

std::vector<std::string> PromptPack::context(std::string_view design, std::string_view task) const {
    std::vector<std::string> out;
    const auto raw = find(std::string(design) + "." + std::string(task) + ".context").value_or("");
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        const auto end = std::min(raw.find(',', pos), raw.size());
        auto id = trim(std::string_view(raw).substr(pos, end - pos));
        if (!id.empty()) out.push_back(std::move(id));
        pos = end + 1;
    }
    return out;
}

} // namespace roleplan
