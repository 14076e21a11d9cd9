#include "roleplan/matcher.hpp"

#include <algorithm>
#include <cctype>

namespace roleplan {

std::set<std::string> normalize_tokens(std::string_view text) {
    std::set<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        if (current != "the" && current != "a" && current != "an") {
            if (current.size() > 3 && current.back() == 's' && current[current.size() - 2] != 's') current.pop_back();
            tokens.insert(current);
        }
        current.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

ObjectMatcher::ObjectMatcher(const ScenarioSpec& scenario) : scenario_(&scenario) {
    for (const auto& item : scenario.inventory) {
        Entry entry{&item, {}};
        entry.names.push_back({normalize_tokens(item.name), true});
        for (const auto& alias : item.aliases) entry.names.push_back({normalize_tokens(alias), false});
        entries_.push_back(std::move(entry));
    }
}

std::vector<ObjectMatcher::Match> ObjectMatcher::matches(std::string_view text) const {
    const auto arg_tokens = normalize_tokens(text);
    if (arg_tokens.empty()) return {};

    struct Candidate {
        Match match;
        std::set<std::string> tokens; // largest matching name
    };
    std::vector<Candidate> candidates;
    for (const auto& entry : entries_) {
        const Name* best = nullptr;
        bool canonical_hit = false;
        for (const auto& name : entry.names) {
            if (name.tokens.empty()) continue;
            if (!std::includes(arg_tokens.begin(), arg_tokens.end(), name.tokens.begin(), name.tokens.end())) continue;
            canonical_hit = canonical_hit || name.canonical;
            if (best == nullptr || name.tokens.size() > best->tokens.size()) best = &name;
        }
        if (best != nullptr) candidates.push_back({{entry.item, !canonical_hit}, best->tokens});
    }

    std::vector<Match> out;
    for (const auto& c : candidates) {
        const bool dominated = std::any_of(candidates.begin(), candidates.end(), [&](const Candidate& other) {
            return other.tokens.size() > c.tokens.size() &&
                   std::includes(other.tokens.begin(), other.tokens.end(), c.tokens.begin(), c.tokens.end());
        });
        if (!dominated) out.push_back(c.match);
    }
    return out;
}

std::set<std::string> ObjectMatcher::referenced(std::string_view text) const {
    std::set<std::string> out;
    for (const auto& m : matches(text)) out.insert(m.item->name);
    return out;
}

std::set<std::string> ObjectMatcher::referenced_by(const ActionStep& step) const {
    std::set<std::string> out;
    for (const auto& arg : step.args) {
        const auto text = reference_text(arg);
        if (text.empty()) continue;
        out.merge(referenced(text));
    }
    return out;
}

std::string_view reference_text(const Argument& arg) {
    if (!arg.numbers.empty()) return {};
    return arg.value;
}

} // namespace roleplan
