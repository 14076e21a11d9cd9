#pragma once

#include "roleplan/money.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace roleplan {

struct TokenUsage {
    std::int64_t tokens_in = 0;
    std::int64_t tokens_out = 0;

    std::int64_t total() const { return tokens_in + tokens_out; }
    TokenUsage& operator+=(const TokenUsage& o) {
        tokens_in += o.tokens_in;
        tokens_out += o.tokens_out;
        return *this;
    }
    friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

// Keyed by model id.
using TokensByModel = std::map<std::string, TokenUsage>;

// Per-model USD per million tokens, plus optional published per-configuration figures
// that are reported next to the computed ones but never used in arithmetic.
class PriceTable {
public:
    // YAML: {models: {id: "0.07", ...}, reference_configurations: {A_single: "0.07", ...}}
    static PriceTable parse(std::string_view yaml_text);
    static PriceTable load(const std::filesystem::path& path);

    void set(std::string model_id, Usd price);
    bool contains(std::string_view model_id) const;
    // Throws UnpricedModel.
    Usd price(std::string_view model_id) const;
    const std::map<std::string, Usd, std::less<>>& prices() const { return prices_; }

    void set_reference(std::string configuration, Usd price);
    const std::map<std::string, Usd, std::less<>>& references() const { return references_; }

private:
    std::map<std::string, Usd, std::less<>> prices_;
    std::map<std::string, Usd, std::less<>> references_;
};

// Sum over models of (tokens_in + tokens_out) / 1e6 * price. Throws UnpricedModel.
Usd compute_cost(const TokensByModel& tokens, const PriceTable& prices);

// Per-million-token price of a configuration: the sum of the prices of the model behind each agent.
Usd configuration_price(const std::vector<std::string>& agent_model_ids, const PriceTable& prices);

} // namespace roleplan
