#include "roleplan/scenario.hpp"

#include "roleplan/digest.hpp"
#include "roleplan/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <set>

#ifndef ROLEPLAN_DEFAULT_DATA_DIR
#define ROLEPLAN_DEFAULT_DATA_DIR "data"
#endif

namespace roleplan {

PlanElement PlanElement::parse(std::string_view text) {
    auto strip = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return std::string(s);
    };
    PlanElement e;
    if (text.starts_with("object:")) {
        e.kind = Kind::object;
        e.value = strip(text.substr(7));
    } else if (text.starts_with("category:")) {
        e.kind = Kind::category;
        e.value = strip(text.substr(9));
    } else if (text.starts_with("call:")) {
        e.kind = Kind::call;
        e.value = strip(text.substr(5));
    } else {
        e.value = strip(text);
    }
    return e;
}

std::string PlanElement::str() const {
    switch (kind) {
        case Kind::object: return "object:" + value;
        case Kind::category: return "category:" + value;
        case Kind::call: return "call:" + value;
    }
    return value;
}

const InventoryItem* ScenarioSpec::find_item(std::string_view canonical_name) const {
    auto it = std::find_if(inventory.begin(), inventory.end(), [&](const auto& item) { return item.name == canonical_name; });
    return it == inventory.end() ? nullptr : &*it;
}

void check_acyclic(const std::vector<PrecedenceConstraint>& constraints) {
    std::map<PlanElement, std::vector<PlanElement>> edges;
    std::map<PlanElement, int> indegree;
    for (const auto& c : constraints) {
        edges[c.before].push_back(c.after);
        indegree.try_emplace(c.before, 0);
        ++indegree[c.after];
    }
    std::vector<PlanElement> ready;
    for (const auto& [node, deg] : indegree)
        if (deg == 0) ready.push_back(node);
    std::size_t visited = 0;
    while (!ready.empty()) {
        PlanElement node = ready.back();
        ready.pop_back();
        ++visited;
        for (const auto& next : edges[node])
            if (--indegree[next] == 0) ready.push_back(next);
    }
    if (visited != indegree.size()) {
        std::string stuck;
        for (const auto& [node, deg] : indegree)
            if (deg > 0) stuck += (stuck.empty() ? "" : ", ") + node.str();
        throw CyclicPrecedence("precedence constraints contain a cycle through: " + stuck);
    }
}

void validate_scenario(const ScenarioSpec& spec) {
    if (spec.schema_version != kScenarioSchemaVersion) {
        throw SchemaError("schema_version", "unsupported version " + std::to_string(spec.schema_version));
    }
    if (spec.id.empty()) throw SchemaError("id", "must be non-empty");
    if (spec.role.empty()) throw SchemaError("role", "must be non-empty");
    if (spec.image.empty()) throw SchemaError("image", "must be non-empty");

    std::set<std::string> names;
    std::set<std::string> categories;
    for (std::size_t i = 0; i < spec.inventory.size(); ++i) {
        const auto& item = spec.inventory[i];
        const std::string path = "inventory[" + std::to_string(i) + "]";
        if (item.name.empty()) throw SchemaError(path + ".name", "must be non-empty");
        if (!names.insert(item.name).second) throw SchemaError(path + ".name", "duplicate item '" + item.name + "'");
        if (!item.category.empty()) categories.insert(item.category);
    }

    auto require_item = [&](const std::string& field, const std::string& name) {
        if (!names.contains(name)) throw SchemaError(field, "'" + name + "' is not an inventory item");
    };
    auto check_list = [&](const char* field, const std::vector<std::string>& list) {
        for (std::size_t i = 0; i < list.size(); ++i) require_item(std::string(field) + "[" + std::to_string(i) + "]", list[i]);
    };
    check_list("required_objects", spec.required_objects);
    check_list("forbidden_objects", spec.forbidden_objects);
    check_list("irrelevant_objects", spec.irrelevant_objects);

    for (const auto& r : spec.required_objects) {
        if (std::find(spec.forbidden_objects.begin(), spec.forbidden_objects.end(), r) != spec.forbidden_objects.end()) {
            throw SchemaError("required_objects", "'" + r + "' is both required and forbidden");
        }
    }

    if (spec.intended_target.empty()) throw SchemaError("intended_target", "must be non-empty");
    require_item("intended_target", spec.intended_target);
    if (spec.forbidden_target) {
        require_item("forbidden_target", *spec.forbidden_target);
        if (*spec.forbidden_target == spec.intended_target) {
            throw SchemaError("forbidden_target", "must differ from intended_target");
        }
    }

    for (std::size_t i = 0; i < spec.precedence.size(); ++i) {
        const auto& c = spec.precedence[i];
        for (const auto* e : {&c.before, &c.after}) {
            const std::string field = "precedence[" + std::to_string(i) + "]";
            if (e->value.empty()) throw SchemaError(field, "empty element");
            if (e->kind == PlanElement::Kind::object) require_item(field, e->value);
            if (e->kind == PlanElement::Kind::category && !categories.contains(e->value)) {
                throw SchemaError(field, "no inventory item has category '" + e->value + "'");
            }
        }
        if (c.before == c.after) throw CyclicPrecedence("precedence constraint orders '" + c.before.str() + "' before itself");
    }
    check_acyclic(spec.precedence);

    for (std::size_t i = 0; i < spec.known_coordinates.size(); ++i) {
        if (spec.known_coordinates[i].empty()) {
            throw SchemaError("known_coordinates[" + std::to_string(i) + "]", "empty coordinate");
        }
    }
}

namespace {

std::vector<std::string> string_list(const YAML::Node& node, const std::string& field) {
    std::vector<std::string> out;
    if (!node) return out;
    if (!node.IsSequence()) throw SchemaError(field, "expected a list");
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (!node[i].IsScalar()) throw SchemaError(field + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(node[i].as<std::string>());
    }
    return out;
}

std::string required_string(const YAML::Node& root, const char* field) {
    const auto node = root[field];
    if (!node || !node.IsScalar()) throw SchemaError(field, "missing or not a string");
    return node.as<std::string>();
}

} // namespace

ScenarioSpec parse_scenario(std::string_view yaml_text, const std::filesystem::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw SchemaError("", std::string("invalid YAML: ") + e.what());
    }
    if (!root.IsMap()) throw SchemaError("", "scenario document must be a mapping");

    ScenarioSpec spec;
    spec.base_dir = base_dir;
    try {
        const auto version = root["schema_version"];
        if (!version) throw SchemaError("schema_version", "mandatory field missing");
        spec.schema_version = version.as<int>();
        spec.id = required_string(root, "id");
        spec.role = required_string(root, "role");
        spec.image = required_string(root, "image");
        spec.intended_target = required_string(root, "intended_target");
        if (const auto ft = root["forbidden_target"]; ft && !ft.IsNull()) spec.forbidden_target = ft.as<std::string>();

        const auto inventory = root["inventory"];
        if (!inventory || !inventory.IsSequence()) throw SchemaError("inventory", "missing or not a list");
        for (std::size_t i = 0; i < inventory.size(); ++i) {
            const auto node = inventory[i];
            const std::string path = "inventory[" + std::to_string(i) + "]";
            if (!node.IsMap()) throw SchemaError(path, "expected a mapping");
            InventoryItem item;
            if (!node["name"]) throw SchemaError(path + ".name", "missing");
            item.name = node["name"].as<std::string>();
            item.category = node["category"] ? node["category"].as<std::string>() : "";
            item.aliases = string_list(node["aliases"], path + ".aliases");
            spec.inventory.push_back(std::move(item));
        }

        spec.required_objects = string_list(root["required_objects"], "required_objects");
        spec.forbidden_objects = string_list(root["forbidden_objects"], "forbidden_objects");
        spec.irrelevant_objects = string_list(root["irrelevant_objects"], "irrelevant_objects");

        if (const auto prec = root["precedence"]) {
            if (!prec.IsSequence()) throw SchemaError("precedence", "expected a list of [before, after] pairs");
            for (std::size_t i = 0; i < prec.size(); ++i) {
                const auto pair = prec[i];
                if (!pair.IsSequence() || pair.size() != 2) {
                    throw SchemaError("precedence[" + std::to_string(i) + "]", "expected [before, after]");
                }
                spec.precedence.push_back({PlanElement::parse(pair[0].as<std::string>()), PlanElement::parse(pair[1].as<std::string>())});
            }
        }

        if (const auto coords = root["known_coordinates"]) {
            if (!coords.IsSequence()) throw SchemaError("known_coordinates", "expected a list of numeric tuples");
            for (std::size_t i = 0; i < coords.size(); ++i) {
                const auto tuple = coords[i];
                if (!tuple.IsSequence()) throw SchemaError("known_coordinates[" + std::to_string(i) + "]", "expected a list");
                Coordinate c;
                for (const auto& v : tuple) c.push_back(v.as<double>());
                spec.known_coordinates.push_back(std::move(c));
            }
        }
    } catch (const YAML::Exception& e) {
        throw SchemaError("", std::string("bad value: ") + e.what());
    }

    validate_scenario(spec);
    return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const NotFound&) {
        throw SchemaError(path.string(), "scenario file not found");
    }
    try {
        return parse_scenario(text, path.parent_path());
    } catch (const SchemaError& e) {
        throw SchemaError(path.filename().string() + (e.field_path().empty() ? "" : ":" + e.field_path()), e.what());
    }
}

std::string serialize_scenario(const ScenarioSpec& spec) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "schema_version" << YAML::Value << spec.schema_version;
    out << YAML::Key << "id" << YAML::Value << spec.id;
    out << YAML::Key << "role" << YAML::Value << spec.role;
    out << YAML::Key << "image" << YAML::Value << spec.image;
    out << YAML::Key << "intended_target" << YAML::Value << spec.intended_target;
    if (spec.forbidden_target) out << YAML::Key << "forbidden_target" << YAML::Value << *spec.forbidden_target;

    out << YAML::Key << "inventory" << YAML::Value << YAML::BeginSeq;
    for (const auto& item : spec.inventory) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << item.name;
        out << YAML::Key << "category" << YAML::Value << item.category;
        out << YAML::Key << "aliases" << YAML::Value << YAML::Flow << item.aliases;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "required_objects" << YAML::Value << YAML::Flow << spec.required_objects;
    out << YAML::Key << "forbidden_objects" << YAML::Value << YAML::Flow << spec.forbidden_objects;
    out << YAML::Key << "irrelevant_objects" << YAML::Value << YAML::Flow << spec.irrelevant_objects;

    out << YAML::Key << "precedence" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : spec.precedence) {
        out << YAML::Flow << std::vector<std::string>{c.before.str(), c.after.str()};
    }
    out << YAML::EndSeq;

    out << YAML::Key << "known_coordinates" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : spec.known_coordinates) out << YAML::Flow << c;
    out << YAML::EndSeq;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("ROLEPLAN_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return ROLEPLAN_DEFAULT_DATA_DIR;
}

std::vector<std::string> builtin_scenario_ids() {
    return {"painter", "safety-inspector", "floor-tiling"};
}

ScenarioSpec builtin_scenario(std::string_view id) {
    const auto ids = builtin_scenario_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw NotFound("no builtin scenario '" + std::string(id) + "'");
    return load_scenario(data_dir() / "scenarios" / (std::string(id) + ".yaml"));
}

std::vector<ScenarioSpec> builtin_scenarios() {
    std::vector<ScenarioSpec> out;
    for (const auto& id : builtin_scenario_ids()) out.push_back(builtin_scenario(id));
    return out;
}

ScenarioSpec resolve_scenario(std::string_view id_or_path) {
    const auto ids = builtin_scenario_ids();
    if (std::find(ids.begin(), ids.end(), id_or_path) != ids.end()) return builtin_scenario(id_or_path);
    return load_scenario(std::filesystem::path(id_or_path));
}

} // namespace roleplan
