#include "roleplan/money.hpp"

#include <cctype>
#include <stdexcept>

namespace roleplan {

Usd Usd::parse(std::string_view text) {
    auto fail = [&] { return std::invalid_argument("not a decimal USD amount: '" + std::string(text) + "'"); };

    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        negative = text[i] == '-';
        ++i;
    }
    if (i < text.size() && text[i] == '$') ++i;

    std::int64_t whole = 0;
    std::size_t whole_digits = 0;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i, ++whole_digits) {
        whole = whole * 10 + (text[i] - '0');
        if (whole > 9'000'000) throw fail();
    }

    std::int64_t frac = 0;
    std::size_t frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i, ++frac_digits) {
            if (frac_digits == 12) throw fail();
            frac = frac * 10 + (text[i] - '0');
        }
    }
    if (i != text.size() || (whole_digits == 0 && frac_digits == 0)) throw fail();

    for (std::size_t d = frac_digits; d < 12; ++d) frac *= 10;
    const std::int64_t pico = whole * kPicoPerDollar + frac;
    return Usd(negative ? -pico : pico);
}

std::string Usd::str() const {
    const bool negative = pico_ < 0;
    const std::uint64_t magnitude = negative ? static_cast<std::uint64_t>(-(pico_ + 1)) + 1 : static_cast<std::uint64_t>(pico_);
    const std::uint64_t whole = magnitude / kPicoPerDollar;
    std::string frac = std::to_string(magnitude % kPicoPerDollar);
    frac.insert(0, 12 - frac.size(), '0');
    while (frac.size() > 2 && frac.back() == '0') frac.pop_back();
    return (negative ? "-" : "") + std::to_string(whole) + "." + frac;
}

Usd Usd::per_million(std::int64_t tokens) const {
    const __int128 scaled = static_cast<__int128>(tokens) * pico_;
    __int128 quotient = scaled / 1'000'000;
    const __int128 remainder = scaled % 1'000'000;
    if (remainder * 2 >= 1'000'000) ++quotient;
    else if (remainder * 2 <= -1'000'000) --quotient;
    return Usd(static_cast<std::int64_t>(quotient));
}

} // namespace roleplan
