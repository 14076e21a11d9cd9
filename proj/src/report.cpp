#include "roleplan/report.hpp"

#include "roleplan/design.hpp"
#include "roleplan/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

namespace roleplan {

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    return std::string(buf, end);
}

namespace {

// Designs sort in their natural order; anything unrecognised sorts after, by name.
int design_rank(const std::string& design) {
    try {
        return static_cast<int>(parse_design(design));
    } catch (const ConfigError&) {
        return static_cast<int>(kAllDesigns.size());
    }
}

bool design_less(const std::string& a, const std::string& b) {
    const int ra = design_rank(a);
    const int rb = design_rank(b);
    return ra != rb ? ra < rb : a < b;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

// Exact mean, rounded half-up to the picodollar.
Usd mean_usd(Usd total, std::size_t n) {
    const auto count = static_cast<std::int64_t>(n);
    return Usd::from_pico((total.pico() + count / 2) / count);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    return out + "\"";
}

} // namespace

AggregateStats aggregate(const std::vector<RunRecord>& records, ScoreSource source) {
    AggregateStats out;
    out.source = source;

    using Cell = std::pair<std::string, std::string>;
    std::map<Cell, std::map<std::string, std::vector<double>>> values;
    for (const auto& r : records) {
        const Cell cell{r.design, r.scenario_id};
        auto& avail = out.availability[cell];
        if (r.status == RunStatus::failed) {
            ++avail.failed;
            continue;
        }
        ++avail.completed;
        const auto& scores = r.scores(source);
        if (!scores) {
            ++avail.unscored;
            continue;
        }
        for (auto metric : kScoreMetrics) values[cell][std::string(metric)].push_back(scores->metric(metric));
    }

    std::vector<Cell> cells;
    for (const auto& [cell, avail] : out.availability) cells.push_back(cell);
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.first != b.first) return design_less(a.first, b.first);
        return a.second < b.second;
    });

    std::map<std::string, std::vector<double>> role_means;
    std::vector<std::string> design_order;
    for (const auto& cell : cells) {
        if (design_order.empty() || design_order.back() != cell.first) design_order.push_back(cell.first);
        auto it = values.find(cell);
        if (it == values.end()) {
            out.empty_cells.push_back(cell.first + "/" + cell.second);
            continue;
        }
        double metric_sum = 0;
        for (auto metric : kScoreMetrics) {
            const auto summary = summarize(it->second.at(std::string(metric)));
            metric_sum += summary.mean;
            out.cells.push_back({cell.first, cell.second, std::string(metric), summary});
        }
        role_means[cell.first].push_back(metric_sum / static_cast<double>(kScoreMetrics.size()));
    }

    for (const auto& design : design_order) {
        const auto& means = role_means[design];
        if (means.size() < 2) {
            out.designs_without_index.push_back(design);
            continue;
        }
        out.generalizability.push_back({design, means.size(), generalizability_index(means)});
    }
    return out;
}

std::vector<std::string> export_report(const AggregateStats& stats, const std::vector<RunRecord>& records,
                                       const PriceTable& prices, const std::filesystem::path& dir) {
    std::vector<std::string> warnings;
    std::filesystem::create_directories(dir);
    if (records.empty()) warnings.push_back("no run records; report files contain headers only");
    for (const auto& cell : stats.empty_cells) warnings.push_back("empty cell " + cell + ": no scored runs");
    for (const auto& design : stats.designs_without_index)
        warnings.push_back("design " + design + " covers fewer than two scored roles; no generalizability index");

    {
        auto out = open_csv(dir / "stats.csv");
        out << "design,scenario,metric,n,min,q1,median,q3,max,mean\n";
        for (const auto& c : stats.cells) {
            const auto& s = c.summary;
            out << csv_field(c.design) << ',' << csv_field(c.scenario) << ',' << c.metric << ',' << s.n << ','
                << format_number(s.min) << ',' << format_number(s.q1) << ',' << format_number(s.median) << ','
                << format_number(s.q3) << ',' << format_number(s.max) << ',' << format_number(s.mean) << '\n';
        }
    }

    {
        auto out = open_csv(dir / "generalizability.csv");
        out << "design,roles,mean,stddev\n";
        for (const auto& g : stats.generalizability) {
            out << csv_field(g.design) << ',' << g.roles << ',' << format_number(g.index.mean) << ','
                << format_number(g.index.stddev) << '\n';
        }
    }

    // Per-design aggregates over completed runs feed both the cost/time table and the trade-off table.
    struct DesignTotals {
        std::size_t runs = 0;
        std::size_t failed = 0;
        std::vector<double> wall;
        std::vector<double> tokens;
        std::vector<double> cost;
        Usd cost_total;
        std::map<std::string, std::vector<double>> scores;
        std::vector<std::string> agent_models;
    };
    std::map<std::string, DesignTotals> totals;
    for (const auto& r : records) {
        auto& t = totals[r.design];
        ++t.runs;
        if (r.status == RunStatus::failed) {
            ++t.failed;
            continue;
        }
        if (t.agent_models.empty()) t.agent_models = r.agent_models;
        t.wall.push_back(r.wall_time_s);
        std::int64_t n = 0;
        for (const auto& [model, usage] : r.tokens) n += usage.total();
        t.tokens.push_back(static_cast<double>(n));
        t.cost.push_back(r.cost_usd.to_double());
        t.cost_total += r.cost_usd;
        if (const auto& s = r.scores(stats.source))
            for (auto metric : kScoreMetrics) t.scores[std::string(metric)].push_back(s->metric(metric));
    }
    std::vector<std::string> designs;
    for (const auto& [d, t] : totals) designs.push_back(d);
    std::sort(designs.begin(), designs.end(), design_less);

    {
        auto out = open_csv(dir / "costtime.csv");
        out << "design,runs,failed,mean_wall_time_s,mean_tokens,mean_cost_usd,price_per_mtok_usd,reference_price_per_mtok_usd\n";
        for (const auto& d : designs) {
            const auto& t = totals[d];
            std::string price;
            try {
                if (!t.agent_models.empty()) price = configuration_price(t.agent_models, prices).str();
            } catch (const UnpricedModel& e) {
                warnings.push_back(e.what());
            }
            const auto ref = prices.references().find(d);
            out << csv_field(d) << ',' << t.runs << ',' << t.failed << ','
                << (t.wall.empty() ? "" : format_number(mean(t.wall))) << ','
                << (t.tokens.empty() ? "" : format_number(mean(t.tokens))) << ','
                << (t.cost.empty() ? "" : mean_usd(t.cost_total, t.cost.size()).str()) << ',' << price << ','
                << (ref == prices.references().end() ? "" : ref->second.str()) << '\n';
        }
    }

    {
        // Scores: higher is better. Time and cost: lower is better.
        struct Column {
            std::string metric;
            bool higher_better;
        };
        std::vector<Column> columns;
        for (auto m : kScoreMetrics) columns.push_back({std::string(m), true});
        columns.push_back({"time", false});
        columns.push_back({"cost", false});

        std::map<std::string, std::map<std::string, double>> raw;
        for (const auto& d : designs) {
            const auto& t = totals[d];
            for (auto m : kScoreMetrics) {
                auto it = t.scores.find(std::string(m));
                if (it != t.scores.end() && !it->second.empty()) raw[d][std::string(m)] = mean(it->second);
            }
            if (!t.wall.empty()) raw[d]["time"] = mean(t.wall);
            if (!t.cost.empty()) raw[d]["cost"] = mean(t.cost);
        }

        auto out = open_csv(dir / "tradeoff.csv");
        out << "design,metric,raw_mean,normalized\n";
        for (const auto& d : designs) {
            for (const auto& col : columns) {
                auto it = raw[d].find(col.metric);
                if (it == raw[d].end()) continue;
                double lo = it->second;
                double hi = it->second;
                for (const auto& other : designs) {
                    auto o = raw[other].find(col.metric);
                    if (o == raw[other].end()) continue;
                    lo = std::min(lo, o->second);
                    hi = std::max(hi, o->second);
                }
                const double norm = col.higher_better ? normalize_higher_better(it->second, lo, hi) : normalize(it->second, lo, hi);
                out << csv_field(d) << ',' << col.metric << ',' << format_number(it->second) << ',' << format_number(norm) << '\n';
            }
        }
    }
    return warnings;
}

} // namespace roleplan
