#pragma once

#include "roleplan/cost.hpp"
#include "roleplan/records.hpp"
#include "roleplan/scoring.hpp"
#include "roleplan/stats.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace roleplan {

struct CellStats {
    std::string design;
    std::string scenario;
    std::string metric;
    Summary summary;
};

struct Availability {
    std::size_t completed = 0;
    std::size_t failed = 0;
    // Completed runs lacking scores from the aggregated source.
    std::size_t unscored = 0;
};

struct DesignGeneralizability {
    std::string design;
    std::size_t roles = 0;
    Generalizability index;
};

struct AggregateStats {
    ScoreSource source = ScoreSource::oracle;
    // Ordered by design, scenario, metric.
    std::vector<CellStats> cells;
    std::map<std::pair<std::string, std::string>, Availability> availability;
    std::vector<DesignGeneralizability> generalizability;
    // "design/scenario" cells with records but no scored completed run.
    std::vector<std::string> empty_cells;
    // Designs whose runs cover fewer than two scored roles.
    std::vector<std::string> designs_without_index;
};

// Failed runs are counted in availability and excluded from score statistics.
AggregateStats aggregate(const std::vector<RunRecord>& records, ScoreSource source = ScoreSource::oracle);

// Writes stats.csv, tradeoff.csv, generalizability.csv and costtime.csv into dir.
// Returns warnings (empty cells, designs without an index, an empty record set).
std::vector<std::string> export_report(const AggregateStats& stats, const std::vector<RunRecord>& records,
                                       const PriceTable& prices, const std::filesystem::path& dir);

// Shortest round-trip decimal in fixed notation, used in every CSV.
std::string format_number(double v);

} // namespace roleplan
