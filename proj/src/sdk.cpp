#include "roleplan/sdk.hpp"

#include "roleplan/digest.hpp"
#include "roleplan/errors.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace roleplan {

std::string_view to_string(ParamType t) {
    switch (t) {
        case ParamType::object_ref: return "object_ref";
        case ParamType::color: return "color";
        case ParamType::position: return "position";
        case ParamType::number: return "number";
        case ParamType::text: return "text";
        case ParamType::none: return "none";
    }
    return "none";
}

ParamType parse_param_type(std::string_view text) {
    for (auto t : {ParamType::object_ref, ParamType::color, ParamType::position, ParamType::number, ParamType::text, ParamType::none}) {
        if (to_string(t) == text) return t;
    }
    throw SchemaError("ptype", "unknown parameter type '" + std::string(text) + "'");
}

std::string SdkFunction::signature() const {
    std::string out = name + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out += ", ";
        out += params[i].name + ": " + std::string(to_string(params[i].type));
    }
    return out + ")";
}

const SdkFunction* SdkSpec::find(std::string_view name) const {
    auto it = std::find_if(functions.begin(), functions.end(), [&](const auto& f) { return f.name == name; });
    return it == functions.end() ? nullptr : &*it;
}

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

} // namespace

SdkSpec parse_sdk(std::string_view text) {
    SdkSpec sdk;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const std::string where = "line " + std::to_string(line_no);

        const auto bar = line.find('|');
        const std::string head = trim(std::string_view(line).substr(0, bar));
        SdkFunction fn;
        fn.summary = bar == std::string::npos ? "" : trim(std::string_view(line).substr(bar + 1));

        const auto open = head.find('(');
        const auto close = head.rfind(')');
        if (open == std::string::npos || close == std::string::npos || close < open || close != head.size() - 1) {
            throw SchemaError(where, "expected name(param: type, ...)");
        }
        fn.name = trim(std::string_view(head).substr(0, open));
        if (!is_identifier(fn.name)) throw SchemaError(where, "bad function name '" + fn.name + "'");

        const std::string params = trim(std::string_view(head).substr(open + 1, close - open - 1));
        if (!params.empty()) {
            std::istringstream ps(params);
            std::string part;
            while (std::getline(ps, part, ',')) {
                const auto colon = part.find(':');
                if (colon == std::string::npos) throw SchemaError(where, "parameter '" + trim(part) + "' lacks a type");
                SdkParam p{trim(std::string_view(part).substr(0, colon)), ParamType::none};
                if (!is_identifier(p.name)) throw SchemaError(where, "bad parameter name '" + p.name + "'");
                try {
                    p.type = parse_param_type(trim(std::string_view(part).substr(colon + 1)));
                } catch (const SchemaError& e) {
                    throw SchemaError(where, e.what());
                }
                fn.params.push_back(std::move(p));
            }
        }
        if (!seen.insert(fn.name).second) throw SchemaError(where, "duplicate function '" + fn.name + "'");
        sdk.functions.push_back(std::move(fn));
    }
    return sdk;
}

SdkSpec load_sdk(const std::filesystem::path& path) {
    try {
        return parse_sdk(read_text_file(path));
    } catch (const SchemaError& e) {
        throw SchemaError(path.filename().string() + ":" + e.field_path(), e.what());
    }
}

std::string render_sdk_reference(const SdkSpec& sdk) {
    std::string out;
    for (const auto& fn : sdk.functions) {
        out += "- " + fn.signature();
        if (!fn.summary.empty()) out += "  # " + fn.summary;
        out += "\n";
    }
    return out;
}

} // namespace roleplan
