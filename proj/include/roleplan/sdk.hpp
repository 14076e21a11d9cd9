#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace roleplan {

enum class ParamType { object_ref, color, position, number, text, none };

std::string_view to_string(ParamType t);
ParamType parse_param_type(std::string_view text);

struct SdkParam {
    std::string name;
    ParamType type = ParamType::none;

    friend bool operator==(const SdkParam&, const SdkParam&) = default;
};

struct SdkFunction {
    std::string name;
    std::vector<SdkParam> params;
    std::string summary;

    std::string signature() const;

    friend bool operator==(const SdkFunction&, const SdkFunction&) = default;
};

struct SdkSpec {
    std::vector<SdkFunction> functions;

    const SdkFunction* find(std::string_view name) const;
};

// One record per line:  name(param: type, ...) | summary
// Blank lines and lines starting with '#' are ignored. Throws SchemaError with a line reference.
SdkSpec parse_sdk(std::string_view text);
SdkSpec load_sdk(const std::filesystem::path& path);

// Documentation block handed to agents that write code against the registry.
std::string render_sdk_reference(const SdkSpec& sdk);

} // namespace roleplan
