#include "roleplan/stats.hpp"

#include "roleplan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace roleplan {

double normalize(double x, double x_min, double x_max) {
    if (!(x_min <= x && x <= x_max)) {
        throw OutOfRange("value " + std::to_string(x) + " outside [" + std::to_string(x_min) + ", " + std::to_string(x_max) + "]");
    }
    if (x_min == x_max) return 10.0;
    return 10.0 * (1.0 - (x - x_min) / (x_max - x_min));
}

double normalize_higher_better(double x, double x_min, double x_max) {
    if (!(x_min <= x && x <= x_max)) {
        throw OutOfRange("value " + std::to_string(x) + " outside [" + std::to_string(x_min) + ", " + std::to_string(x_max) + "]");
    }
    if (x_min == x_max) return 10.0;
    return 10.0 * (x - x_min) / (x_max - x_min);
}

double quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile probability outside [0, 1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double mean(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("mean of an empty sample");
    const double pivot = values.front();
    double shifted = 0;
    for (double v : values) shifted += v - pivot;
    return pivot + shifted / static_cast<double>(values.size());
}

Summary summarize(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("summary of an empty sample");
    std::sort(values.begin(), values.end());
    Summary s;
    s.n = values.size();
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    s.mean = mean(values);
    return s;
}

Generalizability generalizability_index(const std::vector<double>& per_role_means) {
    if (per_role_means.size() < 2) throw std::invalid_argument("generalizability needs at least two roles");
    Generalizability g;
    g.mean = mean(per_role_means);
    double sq = 0;
    for (double v : per_role_means) sq += (v - g.mean) * (v - g.mean);
    g.stddev = std::sqrt(sq / static_cast<double>(per_role_means.size()));
    return g;
}

} // namespace roleplan
