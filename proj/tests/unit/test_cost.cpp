#include "roleplan/cost.hpp"
#include "roleplan/errors.hpp"
#include "roleplan/money.hpp"
#include "roleplan/scenario.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace roleplan;

TEST_SUITE("cost") {

TEST_CASE("Usd parses plain decimals exactly") {
    CHECK(Usd::parse("0.07").pico() == 70'000'000'000);
    CHECK(Usd::parse("2.5").pico() == 2'500'000'000'000);
    CHECK(Usd::parse("12").pico() == 12'000'000'000'000);
    CHECK(Usd::parse("0.000000000001").pico() == 1);
    CHECK_THROWS_AS(Usd::parse("1e-3"), std::invalid_argument);
    CHECK_THROWS_AS(Usd::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(Usd::parse("0.0000000000001"), std::invalid_argument);
    CHECK_THROWS_AS(Usd::parse("abc"), std::invalid_argument);
}

TEST_CASE("Usd prints the shortest exact decimal with two fraction digits") {
    CHECK(Usd::parse("0.07").str() == "0.07");
    CHECK(Usd::parse("2.5").str() == "2.50");
    CHECK(Usd::parse("0.0001").str() == "0.0001");
    CHECK(Usd{}.str() == "0.00");
}

TEST_CASE("per-million rates scale exactly") {
    const auto rate = Usd::parse("0.07");
    CHECK(rate.per_million(1'000'000) == rate);
    CHECK(rate.per_million(0) == Usd{});
    CHECK(rate.per_million(500'000) == Usd::parse("0.035"));
    CHECK(rate.per_million(1) == Usd::parse("0.00000007"));
    // Sums of 0.07 and 0.05 are exact, unlike in binary floating point.
    CHECK(Usd::parse("0.07") + Usd::parse("0.05") == Usd::parse("0.12"));
}

TEST_CASE("compute_cost follows the shipped price table") {
    const auto prices = PriceTable::load(data_dir() / "prices.yaml");
    CHECK(prices.price("minicpm-v-2.6") == Usd::parse("0.07"));
    CHECK(prices.price("llama3-8b") == Usd::parse("0.05"));
    CHECK(prices.price("gpt-4o") == Usd::parse("2.50"));

    CHECK(compute_cost({{"minicpm-v-2.6", {600'000, 400'000}}}, prices) == Usd::parse("0.07"));
    CHECK(compute_cost({{"minicpm-v-2.6", {1'000'000, 0}}, {"llama3-8b", {0, 1'000'000}}}, prices) == Usd::parse("0.12"));
    CHECK(compute_cost({}, prices) == Usd{});
    CHECK(compute_cost({{"minicpm-v-2.6", {0, 0}}}, prices) == Usd{});
    CHECK(compute_cost({{"gpt-4o", {1'000'000, 0}}}, prices) == Usd::parse("2.50"));
}

TEST_CASE("an unpriced model is an error") {
    PriceTable prices;
    prices.set("a", Usd::parse("1"));
    CHECK_THROWS_AS(compute_cost({{"b", {1, 1}}}, prices), UnpricedModel);
    CHECK_THROWS_AS(prices.price("b"), UnpricedModel);
    CHECK_THROWS_AS(configuration_price({"a", "b"}, prices), UnpricedModel);
}

TEST_CASE("configuration price sums the model behind each agent") {
    const auto prices = PriceTable::load(data_dir() / "prices.yaml");
    const std::string v = "minicpm-v-2.6";
    const std::string t = "llama3-8b";
    CHECK(configuration_price({v}, prices) == Usd::parse("0.07"));
    CHECK(configuration_price({v, t}, prices) == Usd::parse("0.12"));
    CHECK(configuration_price({v, t, t}, prices) == Usd::parse("0.17"));
    CHECK(configuration_price({v, t, t, t}, prices) == Usd::parse("0.22"));
}

TEST_CASE("reference configuration prices are kept apart from model prices") {
    const auto prices = PriceTable::load(data_dir() / "prices.yaml");
    CHECK(prices.references().at("D_four") == Usd::parse("0.24"));
    CHECK_FALSE(prices.contains("D_four"));
}

TEST_CASE("malformed price files are schema errors") {
    CHECK_THROWS_AS(PriceTable::parse("models: [1, 2]"), SchemaError);
    CHECK_THROWS_AS(PriceTable::parse("models: {a: \"x\"}"), SchemaError);
    CHECK_THROWS_AS(PriceTable::parse("models: {a: \"-1\"}"), SchemaError);
}

}
