// Batch front end: compose / select / enforce / simulate / experiment.
// Every run is fully determined by the scenario file, the flags and the seed;
// outputs are data files under --out-dir plus a one-line summary on stdout.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "snaas/des.hpp"
#include "snaas/enforcement.hpp"
#include "snaas/experiments.hpp"
#include "snaas/io.hpp"
#include "snaas/selection.hpp"

namespace {

using namespace snaas;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoFeasible = 2;

struct CommonOpts {
    std::string scenario_file;
    std::string out_dir = ".";
    std::optional<double> alpha;
    std::optional<double> sla_latency;
    std::optional<std::string> sla_metric;
    std::optional<double> rho_max;
    std::string mode = "paper";
    std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_scenario = true) {
    auto* s = cmd->add_option("--scenario", o.scenario_file, "scenario JSON file");
    if (needs_scenario) s->required();
    cmd->add_option("--out-dir", o.out_dir, "output directory (default .)");
    cmd->add_option("--alpha", o.alpha, "distance weight in the composition cost");
    cmd->add_option("--sla-latency", o.sla_latency, "latency bound override, seconds");
    cmd->add_option("--sla-metric", o.sla_metric, "latency aggregate: avg or max")
        ->check(CLI::IsMember({"avg", "max"}));
    cmd->add_option("--rho-max", o.rho_max, "utilization ceiling override");
    cmd->add_option("--mode", o.mode, "waiting-time formula variant")
        ->check(CLI::IsMember({"paper", "standard"}));
    cmd->add_option("--seed", o.seed, "master seed");
}

// flag > scenario file > built-in default
struct ResolvedScenario {
    Scenario scenario;
    Allocation alloc;
    SlaSpec sla;
    CostWeights weights;
    FormulaMode mode = FormulaMode::Paper;
    Provenance prov;
};

ResolvedScenario resolve(const CommonOpts& o) {
    ResolvedScenario r;
    r.scenario = load_scenario(o.scenario_file);
    r.alloc = allocate_devices(r.scenario.topo);
    r.sla = r.scenario.sla;
    if (o.sla_latency) r.sla.latency_bound = *o.sla_latency;
    if (o.sla_metric) r.sla.metric = metric_from_string(*o.sla_metric);
    if (o.rho_max) r.sla.rho_max = *o.rho_max;
    if (o.alpha) r.weights.alpha = *o.alpha;
    r.mode = o.mode == "standard" ? FormulaMode::Standard : FormulaMode::Paper;
    r.prov = Provenance{kToolVersion, o.seed, scenario_hash(r.scenario)};
    return r;
}

std::string out_path(const CommonOpts& o, const std::string& name) {
    std::filesystem::create_directories(o.out_dir);
    return (std::filesystem::path(o.out_dir) / name).string();
}

void write_error(const std::string& type, const std::string& message) {
    json j{{"error", {{"type", type}, {"message", message}}}};
    std::cout << j.dump(2) << "\n";
}

int cmd_compose(const CommonOpts& o, const std::string& strategy) {
    auto r = resolve(o);
    CompositionPlan plan;
    if (strategy == "direct")
        plan = compose_direct(r.scenario.topo, r.alloc, r.weights);
    else if (strategy == "clustered")
        plan = compose_clustered(r.scenario.topo, r.alloc, r.weights, o.seed);
    else
        plan = compose_parallel(r.scenario.topo, r.alloc, r.weights);

    auto ev = evaluate_plan(r.scenario.topo, plan, r.alloc, r.scenario.traffic, r.mode);

    save_json(json(plan), out_path(o, "plan.json"));
    {
        std::ofstream f(out_path(o, "evaluation.csv"));
        write_evaluation_csv(f, {ev}, r.prov);
    }
    {
        auto arrivals =
            derive_node_arrivals(r.scenario.topo, plan, r.alloc, r.scenario.traffic);
        std::ofstream f(out_path(o, "delays.csv"));
        write_delay_csv(f, r.scenario.topo, arrivals, ev.delays, r.prov);
    }
    json summary{{"strategy", to_string(plan.strategy)},
                 {"feasible", ev.feasible},
                 {"l_avg", ev.latency.l_avg ? json(*ev.latency.l_avg) : json()},
                 {"l_max", ev.latency.l_max ? json(*ev.latency.l_max) : json()}};
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_select(const CommonOpts& o, bool alpha_grid) {
    auto r = resolve(o);
    auto sel = select_composition(r.scenario.topo, r.alloc, r.weights, r.scenario.traffic,
                                  r.mode, r.sla, alpha_grid, o.seed);
    {
        std::ofstream f(out_path(o, "evaluation.csv"));
        write_evaluation_csv(f, sel.table, r.prov);
    }
    json summary;
    if (sel.no_feasible()) {
        summary = json{{"winner", nullptr}, {"candidates", sel.table.size()}};
    } else {
        const auto& best = sel.best();
        summary = json{{"winner", to_string(best.plan.strategy)},
                       {"alpha", best.plan.alpha},
                       {"index", best.index},
                       {"l_avg", best.latency.l_avg ? json(*best.latency.l_avg) : json()},
                       {"candidates", sel.table.size()}};
    }
    save_json(summary, out_path(o, "winner.json"));
    std::cout << summary.dump(2) << "\n";
    return sel.no_feasible() ? kExitNoFeasible : kExitOk;
}

int cmd_enforce(const CommonOpts& o) {
    auto r = resolve(o);
    auto sel = select_composition(r.scenario.topo, r.alloc, r.weights, r.scenario.traffic,
                                  r.mode, r.sla, false, o.seed);
    {
        std::ofstream f(out_path(o, "evaluation.csv"));
        write_evaluation_csv(f, sel.table, r.prov);
    }
    auto out = enforce(r.scenario.topo, r.alloc, r.sla, sel, r.scenario.traffic, r.mode,
                       r.weights, o.seed);
    save_json(json(out), out_path(o, "enforcement.json"));
    json summary{{"compliant", out.compliant},
                 {"strategy", to_string(out.final_plan.strategy)},
                 {"cycles", out.cycles},
                 {"edits", out.edits.size()},
                 {"demand_reduction", out.demand_reduction}};
    std::cout << summary.dump(2) << "\n";
    return out.compliant ? kExitOk : kExitNoFeasible;
}

int cmd_simulate(const CommonOpts& o, const std::string& plan_file, double duration,
                 double warmup) {
    auto r = resolve(o);
    auto plan = load_json(plan_file).get<CompositionPlan>();
    validate_plan(r.scenario.topo, plan);

    SimConfig cfg;
    cfg.duration = duration;
    cfg.warmup = warmup;
    cfg.seed = o.seed;
    cfg.traffic = r.scenario.traffic;
    auto res = simulate(r.scenario.topo, plan, r.alloc, cfg);

    save_json(json(res), out_path(o, "sim_result.json"));
    json summary{{"completed_c", res.completed_c},
                 {"completed_d", res.completed_d},
                 {"l_avg", res.l_avg ? json(*res.l_avg) : json()},
                 {"l_max", res.l_max ? json(*res.l_max) : json()}};
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

json checks_to_json(const Exp1Checks& c) {
    return {{"rates_non_increasing", c.rates_non_increasing},
            {"bf_direct_highest", c.bf_direct_highest},
            {"heuristic_matches_bf_clustered", c.heuristic_matches_bf_clustered},
            {"heuristic_runtime_10x", c.heuristic_runtime_10x},
            {"all", c.all()}};
}
json checks_to_json(const Exp2Checks& c) {
    return {{"enforced_dominates", c.enforced_dominates},
            {"fixed_unstable_earlier", c.fixed_unstable_earlier},
            {"all", c.all()}};
}
json checks_to_json(const Exp3Checks& c) {
    return {{"direct_dominates_low", c.direct_dominates_low},
            {"direct_fades_high", c.direct_fades_high},
            {"parallel_rare_low", c.parallel_rare_low},
            {"parallel_modal_high", c.parallel_modal_high},
            {"clustered_modal_between", c.clustered_modal_between},
            {"all", c.all()}};
}
json checks_to_json(const Exp4Checks& c) {
    return {{"latency_ordered", c.latency_ordered},
            {"max_stable_increasing", c.max_stable_increasing},
            {"all", c.all()}};
}

int cmd_experiment(const std::string& name, const ExperimentConfig& cfg,
                   const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto path = [&](const std::string& f) {
        return (std::filesystem::path(out_dir) / f).string();
    };
    Provenance prov{kToolVersion, cfg.seed, experiment_config_hash(cfg)};

    json summary{{"experiment", name},
                 {"seed", cfg.seed},
                 {"requests_per_bin", cfg.requests_per_bin}};
    if (name == "exp1") {
        auto r = run_exp1(cfg);
        std::ofstream f(path("exp1.csv"));
        write_exp1_csv(f, r, prov);
        summary["checks"] = checks_to_json(check_exp1(r));
    } else if (name == "exp2") {
        auto r = run_exp2(cfg);
        std::ofstream f(path("exp2.csv"));
        write_exp2_csv(f, r, prov);
        summary["checks"] = checks_to_json(check_exp2(r));
    } else if (name == "exp3") {
        auto r = run_exp3(cfg);
        std::ofstream f(path("exp3.csv"));
        write_exp3_csv(f, r, prov);
        summary["checks"] = checks_to_json(check_exp3(r));
    } else {
        auto r = run_exp4(cfg);
        std::ofstream f(path("exp4.csv"));
        write_exp4_csv(f, r, prov);
        summary["checks"] = checks_to_json(check_exp4(r));
    }
    save_json(summary, path(name + "_summary.json"));
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swarm connectivity composition toolkit"};
    app.require_subcommand(1);

    CommonOpts common;

    auto* compose = app.add_subcommand("compose", "build and evaluate one strategy");
    std::string strategy;
    add_common(compose, common);
    compose->add_option("--strategy", strategy, "direct, clustered or parallel")
        ->required()
        ->check(CLI::IsMember({"direct", "clustered", "parallel"}));

    auto* select = app.add_subcommand("select", "evaluate all strategies, pick the best");
    bool alpha_grid = false;
    add_common(select, common);
    select->add_flag("--alpha-grid", alpha_grid, "scan the alpha grid, not just 0.5");

    auto* enforce_cmd = app.add_subcommand("enforce", "select, then repair until compliant");
    add_common(enforce_cmd, common);

    auto* sim = app.add_subcommand("simulate", "discrete-event run of a stored plan");
    std::string plan_file;
    double duration = 120.0, warmup = 10.0;
    add_common(sim, common);
    sim->add_option("--plan", plan_file, "plan JSON file")->required();
    sim->add_option("--duration", duration, "simulated seconds (default 120)");
    sim->add_option("--warmup", warmup, "seconds excluded from statistics (default 10)");

    auto* exp = app.add_subcommand("experiment", "run a batch experiment");
    std::string exp_name;
    ExperimentConfig exp_cfg;
    std::string exp_out = ".";
    bool reduced_large = false;
    exp->add_option("name", exp_name, "exp1, exp2, exp3 or exp4")
        ->required()
        ->check(CLI::IsMember({"exp1", "exp2", "exp3", "exp4"}));
    exp->add_option("--requests", exp_cfg.requests_per_bin, "requests per bin (default 100)");
    exp->add_option("--seed", exp_cfg.seed, "master seed");
    exp->add_option("--workers", exp_cfg.workers, "concurrent workers (default 1)");
    exp->add_option("--perturbation", exp_cfg.perturbation, "request jitter (default 0.1)");
    exp->add_option("--mode", common.mode, "waiting-time formula variant")
        ->check(CLI::IsMember({"paper", "standard"}));
    exp->add_option("--out-dir", exp_out, "output directory (default .)");
    exp->add_flag("--reduced-large", reduced_large,
                  "use the 50-entry large scale in exp4 (faster)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compose->parsed()) return cmd_compose(common, strategy);
        if (select->parsed()) return cmd_select(common, alpha_grid);
        if (enforce_cmd->parsed()) return cmd_enforce(common);
        if (sim->parsed()) return cmd_simulate(common, plan_file, duration, warmup);
        exp_cfg.mode =
            common.mode == "standard" ? FormulaMode::Standard : FormulaMode::Paper;
        exp_cfg.exp4_reduced_large = reduced_large;
        return cmd_experiment(exp_name, exp_cfg, exp_out);
    } catch (const TooFewDronesError& e) {
        write_error("too-few-drones", e.what());
    } catch (const NoSplitPossibleError& e) {
        write_error("no-split-possible", e.what());
    } catch (const json::exception& e) {
        write_error("bad-input", e.what());
    } catch (const std::invalid_argument& e) {
        write_error("invalid-argument", e.what());
    } catch (const std::exception& e) {
        write_error("runtime-error", e.what());
    }
    return kExitError;
}
