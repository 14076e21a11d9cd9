#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roleplan {

struct InventoryItem {
    std::string name; // canonical
    std::vector<std::string> aliases;
    std::string category;

    friend bool operator==(const InventoryItem&, const InventoryItem&) = default;
};

// One side of a precedence constraint. Written as "object:<name>", "category:<category>"
// or "call:<function>"; a bare string means an object.
struct PlanElement {
    enum class Kind { object, category, call };

    Kind kind = Kind::object;
    std::string value;

    static PlanElement parse(std::string_view text);
    std::string str() const;

    friend bool operator==(const PlanElement&, const PlanElement&) = default;
    friend auto operator<=>(const PlanElement&, const PlanElement&) = default;
};

// before must be used before after.
struct PrecedenceConstraint {
    PlanElement before;
    PlanElement after;

    friend bool operator==(const PrecedenceConstraint&, const PrecedenceConstraint&) = default;
};

using Coordinate = std::vector<double>;

struct ScenarioSpec {
    int schema_version = 1;
    std::string id;
    std::string role;
    // As written in the file; resolved against base_dir by image_path().
    std::string image;
    std::filesystem::path base_dir;
    std::vector<InventoryItem> inventory;
    std::vector<std::string> required_objects;
    std::vector<std::string> forbidden_objects;
    std::vector<std::string> irrelevant_objects;
    std::vector<PrecedenceConstraint> precedence;
    // The hidden intent: what the role should act on.
    std::string intended_target;
    // What a misreading of the scene would act on instead (painter: the wall, not the plywood).
    std::optional<std::string> forbidden_target;
    std::vector<Coordinate> known_coordinates;

    std::filesystem::path image_path() const { return base_dir / image; }
    const InventoryItem* find_item(std::string_view canonical_name) const;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

inline constexpr int kScenarioSchemaVersion = 1;

// Throws SchemaError (with the offending field path) or CyclicPrecedence.
void validate_scenario(const ScenarioSpec& spec);

// Throws CyclicPrecedence when the constraint graph has a cycle.
void check_acyclic(const std::vector<PrecedenceConstraint>& constraints);

ScenarioSpec parse_scenario(std::string_view yaml_text, const std::filesystem::path& base_dir);
ScenarioSpec load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const ScenarioSpec& spec);

// Directory holding the shipped data (prompt packs, scenarios, registry, prices).
// ROLEPLAN_DATA_DIR in the environment overrides the build-time default.
std::filesystem::path data_dir();

// painter, safety-inspector, floor-tiling
std::vector<ScenarioSpec> builtin_scenarios();
std::vector<std::string> builtin_scenario_ids();
ScenarioSpec builtin_scenario(std::string_view id);

// A builtin id or a path to a scenario file.
ScenarioSpec resolve_scenario(std::string_view id_or_path);

} // namespace roleplan
