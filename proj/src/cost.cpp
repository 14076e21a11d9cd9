#include "roleplan/cost.hpp"

#include "roleplan/digest.hpp"
#include "roleplan/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <stdexcept>

namespace roleplan {

namespace {

Usd parse_price(const YAML::Node& node, const std::string& field) {
    if (!node.IsScalar()) throw SchemaError(field, "expected a decimal price");
    try {
        Usd price = Usd::parse(node.Scalar());
        if (price < Usd{}) throw SchemaError(field, "price must be non-negative");
        return price;
    } catch (const std::invalid_argument& e) {
        throw SchemaError(field, e.what());
    }
}

} // namespace

PriceTable PriceTable::parse(std::string_view yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw SchemaError("", std::string("price table is not valid YAML: ") + e.what());
    }
    if (!root.IsMap() || !root["models"] || !root["models"].IsMap()) throw SchemaError("models", "missing model price map");

    PriceTable table;
    for (const auto& entry : root["models"]) {
        const auto id = entry.first.as<std::string>();
        table.set(id, parse_price(entry.second, "models." + id));
    }
    if (const auto refs = root["reference_configurations"]) {
        if (!refs.IsMap()) throw SchemaError("reference_configurations", "expected a map");
        for (const auto& entry : refs) {
            const auto name = entry.first.as<std::string>();
            table.set_reference(name, parse_price(entry.second, "reference_configurations." + name));
        }
    }
    return table;
}

PriceTable PriceTable::load(const std::filesystem::path& path) {
    return parse(read_text_file(path));
}

void PriceTable::set(std::string model_id, Usd price) {
    prices_[std::move(model_id)] = price;
}

bool PriceTable::contains(std::string_view model_id) const {
    return prices_.find(model_id) != prices_.end();
}

Usd PriceTable::price(std::string_view model_id) const {
    auto it = prices_.find(model_id);
    if (it == prices_.end()) throw UnpricedModel("no price for model '" + std::string(model_id) + "'");
    return it->second;
}

void PriceTable::set_reference(std::string configuration, Usd price) {
    references_[std::move(configuration)] = price;
}

Usd compute_cost(const TokensByModel& tokens, const PriceTable& prices) {
    Usd total;
    for (const auto& [model, usage] : tokens) total += prices.price(model).per_million(usage.total());
    return total;
}

Usd configuration_price(const std::vector<std::string>& agent_model_ids, const PriceTable& prices) {
    Usd total;
    for (const auto& id : agent_model_ids) total += prices.price(id);
    return total;
}

} // namespace roleplan
