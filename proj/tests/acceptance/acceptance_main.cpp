// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

#include "roleplan/cost.hpp"
#include "roleplan/digest.hpp"
#include "roleplan/errors.hpp"
#include "roleplan/judge.hpp"
#include "roleplan/pipeline.hpp"
#include "roleplan/records.hpp"
#include "roleplan/runner.hpp"
#include "roleplan/stats.hpp"
#include "roleplan/validation.hpp"

#include "../oracles/random_plans.hpp"
#include "../oracles/reference_validator.hpp"
#include "../support/test_support.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace roleplan;
namespace fs = std::filesystem;

namespace {

struct Failure {
    std::string what;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure{what};
}

template <typename E, typename F>
void expect_throws(F&& f, const std::string& what) {
    try {
        f();
    } catch (const E&) {
        return;
    }
    throw Failure{what};
}

ModelSpec vlm() { return {"minicpm-v-2.6", "minicpm", Modality::vision, Usd::parse("0.07"), std::nullopt, 1024}; }
ModelSpec llm() { return {"llama3-8b", "llama", Modality::text, Usd::parse("0.05"), std::nullopt, 1024}; }

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// 1
std::string cost_table() {
    const auto prices = PriceTable::load(data_dir() / "prices.yaml");
    const auto pack = PromptPack::load(data_dir() / "prompts" / "v1");
    const auto sdk = load_sdk(data_dir() / "sdk" / "registry.txt");
    const std::map<Design, std::string> expected = {
        {Design::A_single, "0.07"}, {Design::B_two, "0.12"}, {Design::C_three, "0.17"}, {Design::D_four, "0.22"}};
    std::string detail;
    for (const auto& [design, usd] : expected) {
        const auto topology = build_topology(design, vlm(), llm(), pack, sdk);
        TokensByModel tokens;
        for (const auto& id : topology.agent_models()) tokens[id] += TokenUsage{1'000'000, 0};
        const auto cost = compute_cost(tokens, prices);
        expect(cost == Usd::parse(usd), std::string(to_string(design)) + " costs " + cost.str() + ", expected " + usd);
        expect(configuration_price(topology.agent_models(), prices) == cost, "configuration price disagrees with compute_cost");
        detail += std::string(to_string(design)) + "=" + cost.str() + " ";
    }
    const auto gpt = compute_cost({{"gpt-4o", {600'000, 400'000}}}, prices);
    expect(gpt == Usd::parse("2.50"), "gpt-4o 1M tokens costs " + gpt.str());
    const auto reference = prices.references().at("D_four");
    detail += "gpt-4o=" + gpt.str() + "; four-agent reference " + reference.str() + " differs from additive 0.22";
    return detail;
}

// 2
std::string normalization_properties() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr double tol = 1e-12;
    for (int i = 0; i < 10'000; ++i) {
        double lo = u(rng);
        double hi = u(rng);
        if (lo > hi) std::swap(lo, hi);
        if (hi - lo < 1e-3) hi = lo + 1.0;
        const double t1 = unit(rng);
        const double t2 = unit(rng);
        const double x1 = std::min(hi, lo + t1 * (hi - lo));
        const double x2 = std::min(hi, lo + t2 * (hi - lo));

        expect(normalize(lo, lo, hi) == 10.0, "x_min does not map to 10");
        expect(normalize(hi, lo, hi) == 0.0, "x_max does not map to 0");
        expect(std::abs(normalize(lo + (hi - lo) / 2, lo, hi) - 5.0) <= tol, "midpoint does not map to 5");

        const double n1 = normalize(x1, lo, hi);
        const double n2 = normalize(x2, lo, hi);
        if (x1 < x2) expect(n1 >= n2, "not monotone non-increasing");
        if (x1 > x2) expect(n1 <= n2, "not monotone non-increasing");

        // Affinity: the image of a convex combination is the same combination of images.
        const double lambda = unit(rng);
        const double x = lambda * x1 + (1 - lambda) * x2;
        const double blended = lambda * n1 + (1 - lambda) * n2;
        expect(std::abs(normalize(x, lo, hi) - blended) <= tol * 10, "not affine");

        // Closed form against an independent evaluation.
        expect(std::abs(n1 - 10.0 * (hi - x1) / (hi - lo)) <= tol * 10, "differs from the closed form");

        // Rescaling invariance from zero.
        const double span = hi - lo;
        const double a = 0.01 + unit(rng) * 100.0;
        const double y = t1 * span;
        expect(std::abs(normalize(a * y, 0.0, a * span) - normalize(y, 0.0, span)) <= tol * 10, "not rescale invariant");
    }
    return "10000 random triples";
}

// 3
std::string generalizability() {
    const auto three = generalizability_index({5.7, 5.7, 5.7});
    const auto four = generalizability_index({6.5, 6.5, 6.5});
    expect(three.mean == 5.7 && three.stddev == 0.0, "three-agent triple gives " + std::to_string(three.mean));
    expect(four.mean == 6.5 && four.stddev == 0.0, "four-agent triple gives " + std::to_string(four.mean));
    return "5.7/0 and 6.5/0";
}

// 4
std::string experiment_matrix() {
    support::TempDir dir;
    std::ostringstream log;
    const auto a = support::mock_config(dir / "a", 20);
    const auto b = support::mock_config(dir / "b", 20);
    const auto summary = cmd_run(a, log);
    cmd_run(b, log);
    const auto records = read_records(dir / "a" / "records.jsonl");
    expect(records.size() == 240, std::to_string(records.size()) + " records");
    expect(summary.failed == 0, std::to_string(summary.failed) + " failed runs");
    const auto rows = support::count_lines(support::slurp(dir / "a" / "stats.csv")) - 1;
    expect(rows == 36, std::to_string(rows) + " stat rows");
    const auto gen_rows = support::count_lines(support::slurp(dir / "a" / "generalizability.csv")) - 1;
    expect(gen_rows == 4, std::to_string(gen_rows) + " generalizability rows");
    expect(support::slurp(dir / "a" / "records.jsonl") == support::slurp(dir / "b" / "records.jsonl"), "records differ between runs");
    expect(support::slurp(dir / "a" / "stats.csv") == support::slurp(dir / "b" / "stats.csv"), "stats differ between runs");
    return "240 records, 36 stat rows, identical across two runs";
}

// 5
std::string topology_structure() {
    const auto pack = PromptPack::load(data_dir() / "prompts" / "v1");
    const auto sdk = load_sdk(data_dir() / "sdk" / "registry.txt");
    struct Expect {
        Design design;
        std::vector<std::string> tasks;
        std::map<std::string, std::vector<std::string>> context;
    };
    const std::vector<Expect> table = {
        {Design::A_single, {"solo"}, {{"solo", {}}}},
        {Design::B_two, {"observe_plan", "actor"}, {{"observe_plan", {}}, {"actor", {"observe_plan"}}}},
        {Design::C_three, {"observer", "planner", "actor"}, {{"observer", {}}, {"planner", {"observer"}}, {"actor", {"planner", "observer"}}}},
        {Design::D_four,
         {"observer", "planner", "actor", "editor"},
         {{"observer", {}}, {"planner", {"observer"}}, {"actor", {"planner", "observer"}}, {"editor", {"actor", "planner"}}}},
    };
    for (const auto& e : table) {
        const auto t = build_topology(e.design, vlm(), llm(), pack, sdk);
        const std::string name(to_string(e.design));
        expect(t.tasks.size() == e.tasks.size(), name + " agent count");
        expect(static_cast<int>(t.tasks.size()) == agent_count(e.design), name + " agent_count()");
        for (std::size_t i = 0; i < e.tasks.size(); ++i) {
            const auto& task = t.tasks[i];
            expect(task.id == e.tasks[i], name + " task order");
            expect(task.context == e.context.at(task.id), name + "." + task.id + " context");
            const bool entry = i == 0;
            expect(task.receives_image == entry, name + "." + task.id + " image routing");
            expect(task.agent.model.modality == (entry ? Modality::vision : Modality::text), name + "." + task.id + " modality");
            const bool writes_code = task.id == "solo" || task.id == "actor" || task.id == "editor";
            expect(task.sdk_reference.empty() != writes_code, name + "." + task.id + " SDK exposure");
        }
        expect(t.entry_image_task == e.tasks.front(), name + " entry task");
        expect_throws<InvalidModality>([&] { build_topology(e.design, llm(), llm(), pack, sdk); }, name + " accepts a text model for vision");
    }
    return "A-D agent counts, modalities and context edges";
}

// 6
std::string validator_oracle() {
    oracle::CaseGenerator gen(6);
    std::size_t violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto c = gen.next();
        expect(c.sdk.functions.size() <= 5, "registry larger than 5");
        const auto plan = parse_plan(c.plan_text);
        const auto report = validate(plan, c.sdk, c.scenario);
        const auto expected = oracle::check(plan, c.sdk, c.scenario);
        const auto actual = oracle::from_report(report);
        violations += report.violations.size();
        if (actual.findings != expected.findings || actual.groundings != expected.groundings)
            throw Failure{"case " + std::to_string(i) + " disagrees:\n" + c.plan_text};
    }
    return "1000 plans, " + std::to_string(violations) + " violations matched";
}

// 7
std::string prompt_neutrality() {
    const auto pack = PromptPack::load(data_dir() / "prompts" / "v1");
    const auto sdk = load_sdk(data_dir() / "sdk" / "registry.txt");
    std::size_t prompts = 0;
    for (const auto& scenario : builtin_scenarios()) {
        std::vector<std::string> needles;
        for (const auto& item : scenario.inventory) {
            needles.push_back(lower(item.name));
            for (const auto& a : item.aliases) needles.push_back(lower(a));
        }
        for (auto design : kAllDesigns) {
            const auto t = build_topology(design, vlm(), llm(), pack, sdk);
            const auto req = render_prompt(t.tasks.front(), RoleAssignment::for_scenario(scenario), {});
            const auto text = lower(req.system_prompt + "\n" + req.user_message);
            for (const auto& n : needles)
                expect(text.find(n) == std::string::npos,
                       std::string(to_string(design)) + "/" + scenario.id + " prompt mentions '" + n + "'");
            ++prompts;
        }
    }
    return std::to_string(prompts) + " first-task prompts free of inventory strings";
}

// 8
std::string judge_protocol() {
    const std::vector<ModelSpec> pipeline = {vlm(), llm()};
    JudgeConfig cfg;
    cfg.model = {"gpt-4o", "gpt", Modality::text, Usd::parse("2.50"), std::nullopt, 1024};
    cfg.rubric = read_text_file(data_dir() / "rubric" / "v1" / "judge.txt");
    cfg.shuffle_seed = 7;

    const std::vector<std::string> designs = {"A_single", "B_two", "C_three", "D_four"};
    std::vector<JudgeItem> items;
    for (std::size_t i = 0; i < 8; ++i) {
        JudgeItem item;
        item.item_id = "plan-" + std::to_string(i);
        item.role = "Painter Tradesperson";
        item.design = designs[i % 4];
        item.model_ids = {"minicpm-v-2.6", "llama3-8b"};
        item.model_families = {"minicpm", "llama"};
        item.plan_text = "# " + item.design + ": single-agent vs four-agent, Design C, MiniCPM-V-2.6 + Llama3-8B\n"
                         "navigate_to(\"plywood\")  # marker " + item.item_id + "\n";
        items.push_back(item);
    }
    support::RecordingBackend backend([](const auto&, const auto&) {
        return support::text_reply("correctness: 7\ntemporal: 6\nexecutability: 8\n");
    });
    const auto outcomes = judge_scores(items, cfg, pipeline, backend);
    const auto requests = backend.requests();
    expect(requests.size() == items.size(), "one request per plan");

    const std::vector<std::string> banned = {"a_single", "b_two", "c_three", "d_four", "single-agent", "four-agent",
                                             "design c", "minicpm", "llama", "gpt-4o"};
    for (const auto& r : requests) {
        const auto text = lower(r.system_prompt + "\n" + r.user_message);
        for (const auto& b : banned) expect(text.find(b) == std::string::npos, "judge prompt contains '" + b + "'");
    }

    const auto order = shuffled_order(items.size(), cfg.shuffle_seed);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        expect(requests[pos].user_message.find("marker " + items[order[pos]].item_id) != std::string::npos,
               "submission " + std::to_string(pos) + " is not the seeded permutation");
        expect(outcomes[order[pos]].submission_index == pos, "submission index mismatch");
    }
    bool identity = true;
    for (std::size_t i = 0; i < order.size(); ++i) identity = identity && order[i] == i;
    expect(!identity, "seed 7 leaves the batch unshuffled");
    expect(shuffled_order(items.size(), 7) == order, "permutation not reproducible");

    auto conflicting = cfg;
    conflicting.model.family = "Llama";
    support::RecordingBackend untouched([](const auto&, const auto&) { return support::text_reply("x"); });
    expect_throws<JudgeFamilyConflict>([&] { judge_scores(items, conflicting, pipeline, untouched); }, "same-family judge accepted");
    expect(untouched.requests().empty(), "conflicting judge was contacted");
    return "8 anonymized prompts in seeded order; same-family judge rejected";
}

void verify_replay(const fs::path& dir, std::size_t expected_records) {
    const auto records = read_records(dir / "records.jsonl");
    expect(records.size() == expected_records, std::to_string(records.size()) + " records in " + dir.string());
    for (const auto& r : records) {
        expect(r.status == RunStatus::completed, r.record_id + " did not complete");
        std::ostringstream out;
        cmd_replay(dir, r.record_id, true, out);
        expect(out.str().find("replay verified") != std::string::npos, r.record_id + " did not verify");
    }
}

// 9
std::string replay_determinism() {
    support::TempDir dir;
    std::ostringstream log;

    auto mock = support::mock_config(dir / "mock", 1);
    cmd_run(mock, log);
    verify_replay(dir / "mock", 12);

    // A live run against a local chat-completions server, then replayed offline.
    std::atomic<int> counter{0};
    support::StubServer server([&](const nlohmann::json& body) {
        const int n = counter++;
        const std::string content = body["messages"].back()["content"].is_array() ? "vision" : "text";
        return support::completion_body("```python\nnavigate_to(\"plywood\")\npick_up(\"paint can\")\nspeak(\"reply " +
                                            std::to_string(n) + " " + content + "\")\n```",
                                        100 + n, 10 + n);
    });
    auto live = support::mock_config(dir / "live", 1);
    live.designs = {Design::C_three, Design::D_four};
    live.scenarios = {"painter"};
    BackendBinding http;
    http.type = "http";
    http.http.base_url = server.base_url();
    http.http.timeout_s = 10;
    live.backends = {{"local", http}};
    live.vision.backend = "local";
    live.text.backend = "local";
    cmd_run(live, log);
    expect(server.hits() == 7, std::to_string(server.hits()) + " live requests");
    verify_replay(dir / "live", 2);
    expect(server.hits() == 7, "replay contacted the live server");
    return "12 mock and 2 live runs replayed with identical plans, tokens and oracle scores";
}

} // namespace

int main() {
    using Clock = std::chrono::steady_clock;
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "cost table reproduction", 1.0, cost_table},
        {2, "normalization property suite", 1.0, normalization_properties},
        {3, "generalizability arithmetic", 0.0, generalizability},
        {4, "experiment matrix shape", 30.0, experiment_matrix},
        {5, "topology structure", 0.0, topology_structure},
        {6, "validator oracle equivalence", 10.0, validator_oracle},
        {7, "prompt neutrality", 0.0, prompt_neutrality},
        {8, "judge protocol", 0.0, judge_protocol},
        {9, "replay determinism", 0.0, replay_determinism},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = Clock::now();
        std::string detail;
        bool ok = true;
        try {
            detail = c.run();
        } catch (const Failure& f) {
            ok = false;
            detail = f.what;
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("unexpected error: ") + e.what();
        }
        const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        if (ok && c.budget_s > 0 && elapsed > c.budget_s) {
            ok = false;
            detail += " (over the " + std::to_string(c.budget_s) + " s budget)";
        }
        if (!ok) ++failed;
        std::ostringstream secs;
        secs.setf(std::ios::fixed);
        secs.precision(3);
        secs << elapsed;
        std::cout << (ok ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << secs.str() << " s): " << detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
