#pragma once

#include "roleplan/plan.hpp"
#include "roleplan/scenario.hpp"

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace roleplan {

// Lower-cased alphanumeric tokens with articles dropped and a trailing plural 's' removed
// ("The Tiles" -> {"tile"}). Underscores separate tokens, so paint_can == "paint can".
std::set<std::string> normalize_tokens(std::string_view text);

// Token-subset matching of argument text against inventory names and aliases.
//
// A name matches when all of its tokens occur in the argument. When one argument matches
// several items, an item whose matched tokens are a strict subset of another match's tokens
// is dropped ("tile spacers" names the spacers, not the tiles).
class ObjectMatcher {
public:
    struct Match {
        const InventoryItem* item = nullptr;
        // Matched only through an alias, never through the canonical name.
        bool generic = false;
    };

    explicit ObjectMatcher(const ScenarioSpec& scenario);

    std::vector<Match> matches(std::string_view text) const;

    // Canonical names of every item the argument text refers to.
    std::set<std::string> referenced(std::string_view text) const;

    // Items referenced by any argument of the step; numbers never reference objects.
    std::set<std::string> referenced_by(const ActionStep& step) const;

    const ScenarioSpec& scenario() const { return *scenario_; }

private:
    struct Name {
        std::set<std::string> tokens;
        bool canonical = false;
    };
    struct Entry {
        const InventoryItem* item;
        std::vector<Name> names;
    };

    const ScenarioSpec* scenario_;
    std::vector<Entry> entries_;
};

// Text an argument contributes to object matching, or empty when it cannot name an object.
std::string_view reference_text(const Argument& arg);

} // namespace roleplan
