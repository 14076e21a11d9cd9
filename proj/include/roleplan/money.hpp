#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace roleplan {

// Exact US-dollar amount held as an integer count of picodollars (1e-12 USD).
// Prices and costs never pass through binary floating point.
class Usd {
public:
    static constexpr std::int64_t kPicoPerDollar = 1'000'000'000'000;

    constexpr Usd() = default;

    static constexpr Usd from_pico(std::int64_t pico) { return Usd(pico); }

    // Accepts plain decimals such as "0.07", "2.5", "12", with at most 12
    // fractional digits. Throws std::invalid_argument otherwise.
    static Usd parse(std::string_view text);

    constexpr std::int64_t pico() const { return pico_; }

    // Shortest exact decimal with at least two fractional digits: "0.07", "2.50", "0.0001".
    std::string str() const;

    double to_double() const { return static_cast<double>(pico_) / static_cast<double>(kPicoPerDollar); }

    // tokens / 1e6 * this, treating *this as a per-million-token rate. Exact when the
    // rate has at most six fractional digits; otherwise rounded half-up to the picodollar.
    Usd per_million(std::int64_t tokens) const;

    constexpr Usd& operator+=(Usd other) {
        pico_ += other.pico_;
        return *this;
    }
    friend constexpr Usd operator+(Usd a, Usd b) { return a += b; }
    friend constexpr bool operator==(Usd, Usd) = default;
    friend constexpr auto operator<=>(Usd, Usd) = default;

private:
    constexpr explicit Usd(std::int64_t pico) : pico_(pico) {}

    std::int64_t pico_ = 0;
};

} // namespace roleplan
