#pragma once

#include <cstddef>
#include <vector>

namespace roleplan {

// Maps x in [x_min, x_max] onto 10 (at x_min) .. 0 (at x_max), for quantities where
// lower is better. Returns 10 when x_min == x_max. Throws OutOfRange outside the interval.
double normalize(double x, double x_min, double x_max);

// The same scale for quantities where higher is better: x_max -> 10, x_min -> 0.
double normalize_higher_better(double x, double x_min, double x_max);

// Linear interpolation between closest ranks: h = (n - 1) p over the sorted values.
// Throws std::invalid_argument on empty input or p outside [0, 1].
double quantile(const std::vector<double>& sorted, double p);

struct Summary {
    std::size_t n = 0;
    double min = 0;
    double q1 = 0;
    double median = 0;
    double q3 = 0;
    double max = 0;
    double mean = 0;
};

// Throws std::invalid_argument on empty input.
Summary summarize(std::vector<double> values);

// Shifted mean, exact when all values are equal.
double mean(const std::vector<double>& values);

struct Generalizability {
    double mean = 0;
    // Population standard deviation across roles.
    double stddev = 0;
};

// One mean-of-metrics value per role. Throws std::invalid_argument for fewer than two roles.
Generalizability generalizability_index(const std::vector<double>& per_role_means);

} // namespace roleplan
