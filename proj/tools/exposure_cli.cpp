// Command-line front end: seeded cascade simulation, node-state inference,
// experiment sweeps, hold-out evaluation, and the enumeration cross-check.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exposure/baselines.hpp"
#include "exposure/belief_propagation.hpp"
#include "exposure/exact_enumeration.hpp"
#include "exposure/experiment.hpp"
#include "exposure/metrics.hpp"
#include "exposure/network.hpp"
#include "exposure/observation.hpp"
#include "exposure/si_cascade.hpp"

namespace {

using namespace exposure;

EdgeListParse load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open network file '" + path + "'");
    return parse_edge_list(in);
}

Observation load_observation(const std::string& path, const Network& net) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open observation file '" + path + "'");
    return read_observation(in, net);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    return out;
}

void register_solver_flags(CLI::App* cmd, SolverSettings* solver, std::string* schedule) {
    cmd->add_option("--message-tolerance", solver->message_tolerance);
    cmd->add_option("--eta-tolerance", solver->eta_tolerance);
    cmd->add_option("--max-bp-sweeps", solver->max_bp_sweeps);
    cmd->add_option("--max-em-rounds", solver->max_em_rounds);
    cmd->add_option("--damping", solver->damping);
    cmd->add_option("--eta-init", solver->eta_init);
    cmd->add_option("--message-init", solver->message_init);
    cmd->add_option("--schedule", *schedule, "synchronous | asynchronous");
}

struct GlobalArgs {
    std::uint64_t seed = 0;
    std::string network;
    std::string out;
    int threads = 1;
};

int cmd_simulate(const GlobalArgs& g, const std::string& mode, std::optional<double> c,
                 const std::vector<double>& range, const std::string& root_label,
                 std::optional<double> observe_fraction, std::optional<double> observe_bias,
                 const std::string& obs_out) {
    const auto parsed = load_network(g.network);
    const auto& net = parsed.net;
    if (parsed.self_loops_dropped || parsed.duplicate_edges_collapsed)
        std::cerr << "note: dropped " << parsed.self_loops_dropped << " self-loops, collapsed "
                  << parsed.duplicate_edges_collapsed << " duplicate edges\n";

    std::optional<int> root;
    if (!root_label.empty()) {
        const auto index = net.label_index();
        const auto it = index.find(root_label);
        if (it == index.end()) throw std::runtime_error("root out of range");
        root = it->second;
    }

    PerturbationOutcome outcome;
    if (mode == "homogeneous") {
        if (!c) throw std::runtime_error("homogeneous mode needs --c");
        outcome = simulate_si_homogeneous(net, *c, g.seed, root);
    } else if (mode == "heterogeneous" || mode == "hetero") {
        if (range.size() != 2) throw std::runtime_error("heterogeneous mode needs --range L U");
        outcome = simulate_si_heterogeneous(net, range[0], range[1], g.seed, root);
    } else {
        throw std::runtime_error("mode must be homogeneous or heterogeneous");
    }

    const std::string out_path = g.out.empty() ? "outcome.tsv" : g.out;
    auto out = open_out(out_path);
    write_outcome(outcome, net, out);
    std::cout << "root=" << net.label_of(outcome.root)
              << " perturbed=" << outcome.perturbed_count() << "/" << net.node_count << " "
              << cascade_params_string(outcome.params) << " seed=" << outcome.seed << "\n";

    if (observe_fraction) {
        const auto obs = mask_observation(outcome, *observe_fraction, splitmix64(g.seed ^ 0x0b5ULL),
                                          observe_bias);
        const std::string obs_path = obs_out.empty() ? out_path + ".obs" : obs_out;
        auto oo = open_out(obs_path);
        write_observation(obs, net, oo,
                          "observed " + std::to_string(obs.size()) + " of " +
                              std::to_string(net.node_count) + " nodes");
        std::cout << "observation: " << obs.size() << " nodes -> " << obs_path << "\n";
    }
    return 0;
}

int cmd_infer(const GlobalArgs& g, const std::string& obs_path, const std::string& method,
              SolverSettings solver) {
    const auto net = load_network(g.network).net;
    const auto obs = load_observation(obs_path, net);
    const std::string prefix = g.out.empty() ? "scores" : g.out;

    std::vector<std::string> methods;
    if (method == "all")
        methods = {"exposure", "shortest_paths", "label_propagation"};
    else
        methods = {method};

    for (const auto& m : methods) {
        ScoreVector scores;
        if (m == "exposure") {
            auto res = infer(net, obs, solver);
            scores = std::move(res.scores);
            auto diag = open_out(prefix + ".exposure.diagnostics.json");
            diag << diagnostics_json(res.diagnostics) << "\n";
            if (res.diagnostics.oscillation_warning)
                std::cerr << "warning: message residual not decreasing; consider --damping\n";
        } else if (m == "shortest_paths") {
            scores = shortest_path_scores(net, obs);
        } else if (m == "label_propagation") {
            scores = label_propagation_scores(net, obs);
        } else {
            throw std::runtime_error("unknown method '" + m + "'");
        }
        auto out = open_out(prefix + "." + m + ".tsv");
        write_scores(scores, net, out);
        std::cout << m << " -> " << prefix << "." << m << ".tsv\n";
    }
    return 0;
}

int cmd_experiment(const GlobalArgs& g, const std::string& config_path, bool c_preset_paper_flag,
                   bool seed_given) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file '" + config_path + "'");
    auto cfg = parse_experiment_config(in);
    if (!g.network.empty()) cfg.network_path = g.network;
    if (seed_given) cfg.master_seed = g.seed;
    if (g.threads > 1) cfg.threads = g.threads;
    if (cfg.network_path.empty()) throw std::runtime_error("config needs network_path");

    // experiments run on the giant component, as the reference protocol does
    const auto loaded = load_network(cfg.network_path).net;
    const auto gc = giant_component(loaded);
    if (gc.net.node_count < loaded.node_count)
        std::cerr << "note: using giant component, " << gc.net.node_count << " of "
                  << loaded.node_count << " nodes\n";
    if (c_preset_paper_flag) cfg.c_values = c_preset_paper(gc.net);
    cfg.validate();

    const std::string out_path = g.out.empty() ? "results.csv" : g.out;
    auto out = open_out(out_path);
    out << kResultCsvHeader << "\n";
    const auto summary =
        run_experiment(cfg, gc.net, [&](const ResultRow& row) { out << csv_row(row) << "\n"; });
    std::cout << summary_block(summary);
    std::cout << "rows -> " << out_path << "\n";
    return 0;
}

int cmd_holdout(const GlobalArgs& g, const std::string& obs_path,
                const std::vector<double>& hide_fractions, int replicates,
                const std::vector<std::string>& methods, SolverSettings solver) {
    const auto loaded = load_network(g.network).net;
    const auto gc = giant_component(loaded);
    const auto obs_full = load_observation(obs_path, loaded);

    // remap the observation onto the giant component
    std::vector<int> new_index(loaded.node_count, -1);
    for (int i = 0; i < static_cast<int>(gc.original_index.size()); ++i)
        new_index[gc.original_index[i]] = i;
    std::vector<std::pair<int, std::uint8_t>> kept;
    int dropped = 0;
    for (int k = 0; k < obs_full.size(); ++k) {
        if (new_index[obs_full.nodes[k]] == -1) {
            ++dropped;
            continue;
        }
        kept.emplace_back(new_index[obs_full.nodes[k]], obs_full.states[k]);
    }
    if (dropped > 0)
        std::cerr << "note: " << dropped << " observed nodes outside the giant component\n";
    const auto obs = make_observation(std::move(kept));

    HoldoutConfig cfg;
    cfg.network_path = g.network;
    cfg.hide_fractions = hide_fractions;
    cfg.replicates = replicates;
    if (!methods.empty()) cfg.methods = methods;
    cfg.master_seed = g.seed;
    cfg.solver = solver;
    cfg.threads = g.threads;

    const std::string out_path = g.out.empty() ? "holdout.csv" : g.out;
    auto out = open_out(out_path);
    out << kResultCsvHeader << "\n";
    const auto summary =
        run_holdout(cfg, gc.net, obs, [&](const ResultRow& row) { out << csv_row(row) << "\n"; });
    std::cout << summary_block(summary);
    std::cout << "rows -> " << out_path << "\n";
    return 0;
}

int cmd_oracle_check(const GlobalArgs& g, const std::string& obs_path, double grid_step,
                     const std::string& factors, SolverSettings solver) {
    const auto net = load_network(g.network).net;
    const auto obs = load_observation(obs_path, net);
    const auto scope =
        factors == "unobserved" ? FactorScope::UnobservedOnly : FactorScope::AllNodes;

    const auto exact = exact_eta_opt(net, obs, grid_step, scope);
    const auto bp = infer(net, obs, solver);

    std::cout << "# node bp_perturbed exact_perturbed\n";
    double max_dev = 0.0;
    std::vector<double> bp_scores, exact_scores;
    for (int i : exact.unobserved) {
        const double b = bp.scores.score[i];
        const double e = 1.0 - exact.p_unperturbed[i];
        max_dev = std::max(max_dev, std::abs(b - e));
        bp_scores.push_back(b);
        exact_scores.push_back(e);
        std::cout << net.label_of(i) << ' ' << format_score(b) << ' ' << format_score(e) << "\n";
    }
    const double rho = bp_scores.size() >= 2 ? spearman(bp_scores, exact_scores)
                                             : std::numeric_limits<double>::quiet_NaN();
    std::cout << "max_abs_deviation " << format_score(max_dev) << "\n";
    std::cout << "spearman " << format_score(rho) << "\n";
    std::cout << "eta_star " << format_score(bp.eta_star) << "\n";
    std::cout << "eta_grid_opt " << format_score(exact.eta_grid_opt) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exposure-model inference of perturbed nodes on networks"};
    app.require_subcommand(1);

    GlobalArgs g;
    bool seed_given = false;
    app.add_option("--seed", g.seed, "master seed")->each([&](const std::string&) {
        seed_given = true;
    });
    app.add_option("--network", g.network, "edge-list file");
    app.add_option("--out", g.out, "output path (or prefix for infer)");
    app.add_option("--threads", g.threads, "worker threads for sweeps");

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate an SI perturbation outcome");
    sim->fallthrough();
    std::string sim_mode = "homogeneous";
    std::optional<double> sim_c;
    std::vector<double> sim_range;
    std::string sim_root;
    std::optional<double> sim_observe_fraction, sim_observe_bias;
    std::string sim_obs_out;
    sim->add_option("--mode", sim_mode, "homogeneous | heterogeneous");
    sim->add_option("--c", sim_c, "homogeneous transmission probability");
    sim->add_option("--range", sim_range, "heterogeneous range L U")->expected(2);
    sim->add_option("--root", sim_root, "root node label (default: random)");
    sim->add_option("--observe-fraction", sim_observe_fraction,
                    "also write a masked observation of this fraction");
    sim->add_option("--observe-bias", sim_observe_bias,
                    "sampling weight for perturbed nodes in the observation");
    sim->add_option("--obs-out", sim_obs_out, "observation output path");

    // infer
    auto* inf = app.add_subcommand("infer", "score nodes from a partial observation");
    inf->fallthrough();
    std::string inf_obs, inf_method = "exposure", inf_schedule = "synchronous";
    SolverSettings inf_solver;
    inf->add_option("--obs", inf_obs, "observation file")->required();
    inf->add_option("--method", inf_method, "exposure | shortest_paths | label_propagation | all");
    register_solver_flags(inf, &inf_solver, &inf_schedule);

    // experiment
    auto* exp = app.add_subcommand("experiment", "seeded simulate/mask/infer sweep to CSV");
    exp->fallthrough();
    std::string exp_config;
    std::string exp_c_preset;
    exp->add_option("--config", exp_config, "key = value config file")->required();
    exp->add_option("--c-preset", exp_c_preset, "'paper': c = 1/(<k>+0.05) and c = 0.5");

    // holdout
    auto* hold = app.add_subcommand("holdout", "hide observed nodes and score their inference");
    hold->fallthrough();
    std::string hold_obs, hold_schedule = "synchronous";
    std::vector<double> hold_fractions{0.5};
    int hold_replicates = 100;
    std::vector<std::string> hold_methods;
    SolverSettings hold_solver;
    hold->add_option("--obs", hold_obs, "observation file")->required();
    hold->add_option("--hide-fractions", hold_fractions, "fractions of O to hide")
        ->delimiter(',');
    hold->add_option("--replicates", hold_replicates);
    hold->add_option("--methods", hold_methods)->delimiter(',');
    register_solver_flags(hold, &hold_solver, &hold_schedule);

    // oracle-check
    auto* ora = app.add_subcommand("oracle-check", "BP beliefs versus exact enumeration");
    ora->fallthrough();
    std::string ora_obs, ora_factors = "all", ora_schedule = "synchronous";
    double ora_grid_step = 1e-3;
    SolverSettings ora_solver;
    ora->add_option("--obs", ora_obs, "observation file")->required();
    ora->add_option("--grid-step", ora_grid_step, "eta grid step for the exact optimum");
    ora->add_option("--factors", ora_factors,
                    "all: joint over every node | unobserved: boundary-conditional");
    register_solver_flags(ora, &ora_solver, &ora_schedule);

    CLI11_PARSE(app, argc, argv);

    auto apply_schedule = [](SolverSettings& s, const std::string& name) {
        s.schedule =
            name == "asynchronous" ? Schedule::RandomAsynchronous : Schedule::Synchronous;
    };

    try {
        if (sim->parsed())
            return cmd_simulate(g, sim_mode, sim_c, sim_range, sim_root, sim_observe_fraction,
                                sim_observe_bias, sim_obs_out);
        if (inf->parsed()) {
            apply_schedule(inf_solver, inf_schedule);
            return cmd_infer(g, inf_obs, inf_method, inf_solver);
        }
        if (exp->parsed()) {
            if (!exp_c_preset.empty() && exp_c_preset != "paper")
                throw std::runtime_error("unknown c preset '" + exp_c_preset + "'");
            return cmd_experiment(g, exp_config, exp_c_preset == "paper", seed_given);
        }
        if (hold->parsed()) {
            apply_schedule(hold_solver, hold_schedule);
            return cmd_holdout(g, hold_obs, hold_fractions, hold_replicates, hold_methods,
                               hold_solver);
        }
        if (ora->parsed()) {
            apply_schedule(ora_solver, ora_schedule);
            return cmd_oracle_check(g, ora_obs, ora_grid_step, ora_factors, ora_solver);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
