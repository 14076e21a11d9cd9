#include "roleplan/records.hpp"
#include "roleplan/report.hpp"

#include "../support/test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace roleplan;

namespace {

const std::vector<std::string> kDesigns = {"A_single", "B_two", "C_three", "D_four"};
const std::vector<std::string> kScenarios = {"painter", "safety-inspector", "floor-tiling"};

MetricScores flat(double v) {
    MetricScores s;
    for (auto name : kSubScores) sub_score(s, name) = v;
    return s;
}

RunRecord record(const std::string& design, const std::string& scenario, int rep, double score) {
    RunRecord r;
    r.design = design;
    r.scenario_id = scenario;
    r.role = scenario;
    r.repetition = rep;
    r.record_id = design + "." + scenario + ".r" + std::to_string(rep);
    r.plan_text = "pick_up(\"x\")";
    r.agent_models = {"minicpm-v-2.6"};
    r.tokens["minicpm-v-2.6"] = {1000, 500};
    r.cost_usd = Usd::parse("0.000105");
    r.wall_time_s = 1.0 + rep;
    r.oracle = flat(score);
    return r;
}

std::vector<RunRecord> full_matrix() {
    std::vector<RunRecord> out;
    for (std::size_t d = 0; d < kDesigns.size(); ++d)
        for (const auto& s : kScenarios)
            for (int rep = 0; rep < 20; ++rep) out.push_back(record(kDesigns[d], s, rep, static_cast<double>(d + 5)));
    return out;
}

std::vector<std::string> csv_rows(const std::filesystem::path& file) {
    std::vector<std::string> rows;
    std::istringstream in(support::slurp(file));
    for (std::string line; std::getline(in, line);) rows.push_back(line);
    return rows;
}

PriceTable prices() { return PriceTable::load(data_dir() / "prices.yaml"); }

} // namespace

TEST_SUITE("report") {

TEST_CASE("the full matrix gives 36 stat rows and 4 generalizability rows") {
    support::TempDir dir;
    const auto records = full_matrix();
    REQUIRE(records.size() == 240);
    const auto stats = aggregate(records);
    CHECK(stats.cells.size() == 36);
    const auto warnings = export_report(stats, records, prices(), dir.path());
    CHECK(warnings.empty());

    const auto rows = csv_rows(dir / "stats.csv");
    CHECK(rows.size() == 37);
    CHECK(rows[0] == "design,scenario,metric,n,min,q1,median,q3,max,mean");
    CHECK(rows[1].starts_with("A_single,floor-tiling,"));
    CHECK(std::find(rows.begin(), rows.end(), "A_single,painter,correctness,20,5,5,5,5,5,5") != rows.end());

    const auto gen = csv_rows(dir / "generalizability.csv");
    REQUIRE(gen.size() == 5);
    CHECK(gen[4] == "D_four,3,8,0");
}

TEST_CASE("a single cell gives one row per metric") {
    support::TempDir dir;
    const std::vector<RunRecord> records = {record("C_three", "painter", 0, 4), record("C_three", "painter", 1, 6)};
    const auto warnings = export_report(aggregate(records), records, prices(), dir.path());
    CHECK(csv_rows(dir / "stats.csv").size() == 4);
    CHECK(csv_rows(dir / "generalizability.csv").size() == 1);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("C_three") != std::string::npos);
}

TEST_CASE("an empty record set writes headers only and warns") {
    support::TempDir dir;
    const auto warnings = export_report(aggregate({}), {}, prices(), dir.path());
    CHECK_FALSE(warnings.empty());
    for (const char* f : {"stats.csv", "generalizability.csv", "costtime.csv", "tradeoff.csv"}) CHECK(csv_rows(dir / f).size() == 1);
}

TEST_CASE("failed and unscored runs are counted but not scored") {
    auto records = full_matrix();
    records[0].status = RunStatus::failed;
    records[0].oracle.reset();
    records[1].oracle.reset();
    const auto stats = aggregate(records);
    const auto& avail = stats.availability.at({"A_single", "painter"});
    CHECK(avail.completed == 19);
    CHECK(avail.failed == 1);
    CHECK(avail.unscored == 1);
    const auto cell = std::find_if(stats.cells.begin(), stats.cells.end(), [](const CellStats& c) {
        return c.design == "A_single" && c.scenario == "painter" && c.metric == "correctness";
    });
    REQUIRE(cell != stats.cells.end());
    CHECK(cell->summary.n == 18);

    const auto judged = aggregate(records, ScoreSource::judge);
    CHECK(judged.cells.empty());
    CHECK(judged.empty_cells.size() == 12);
}

TEST_CASE("cost and time columns use exact amounts and the additive configuration price") {
    support::TempDir dir;
    auto records = full_matrix();
    for (auto& r : records) {
        if (r.design == "D_four") r.agent_models = {"minicpm-v-2.6", "llama3-8b", "llama3-8b", "llama3-8b"};
    }
    export_report(aggregate(records), records, prices(), dir.path());
    const auto rows = csv_rows(dir / "costtime.csv");
    REQUIRE(rows.size() == 5);
    // wall time mean over reps 0..19 of 1 + rep = 10.5; tokens 1500; cost 0.000105.
    CHECK(rows[1] == "A_single,60,0,10.5,1500,0.000105,0.07,0.07");
    CHECK(rows[4] == "D_four,60,0,10.5,1500,0.000105,0.22,0.24");
}

TEST_CASE("the trade-off table puts every design on the 0..10 scale") {
    support::TempDir dir;
    auto records = full_matrix();
    for (auto& r : records) {
        if (r.design == "B_two") r.wall_time_s = 100;
    }
    export_report(aggregate(records), records, prices(), dir.path());
    const auto rows = csv_rows(dir / "tradeoff.csv");
    CHECK(rows[0] == "design,metric,raw_mean,normalized");
    // Scores 5..8 by design: higher is better.
    CHECK(std::find(rows.begin(), rows.end(), "A_single,correctness,5,0") != rows.end());
    CHECK(std::find(rows.begin(), rows.end(), "D_four,correctness,8,10") != rows.end());
    // Time: lower is better.
    CHECK(std::find(rows.begin(), rows.end(), "B_two,time,100,0") != rows.end());
    CHECK(std::find(rows.begin(), rows.end(), "A_single,time,10.5,10") != rows.end());
}

TEST_CASE("numbers print in fixed notation") {
    CHECK(format_number(0.000105) == "0.000105");
    CHECK(format_number(5) == "5");
    CHECK(format_number(8.5) == "8.5");
    CHECK(format_number(1e-7) == "0.0000001");
}

TEST_CASE("records round-trip and are written sorted") {
    support::TempDir dir;
    auto a = record("B_two", "painter", 3, 7);
    a.judge = flat(6);
    a.judge->source = ScoreSource::judge;
    a.failure_class = "wire_error";
    a.tokens_estimated = true;
    auto b = record("A_single", "painter", 1, 5);
    b.oracle.reset();
    write_records(dir / "r.jsonl", {a, b});
    const auto back = read_records(dir / "r.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(back[0].record_id == b.record_id);
    CHECK(to_json(back[1]) == to_json(a));
    CHECK(back[1].cost_usd == a.cost_usd);
    CHECK(to_json(a)["cost_usd"] == "0.000105");
}

}
