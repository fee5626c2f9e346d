#pragma once

// Seeded experiment sweeps: simulate -> mask -> infer -> AUC over a parameter
// grid, and the hold-out protocol over a real observation. Rows stream to CSV
// with a fixed schema; every row's seeds derive from (master_seed, grid point,
// replicate index) so any single row can be re-run in isolation.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "exposure/baselines.hpp"
#include "exposure/belief_propagation.hpp"
#include "exposure/metrics.hpp"
#include "exposure/network.hpp"
#include "exposure/observation.hpp"
#include "exposure/si_cascade.hpp"

namespace exposure {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t bits_of(double v) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(v));
    std::memcpy(&u, &v, sizeof(u));
    return u;
}

// Documented row-seed derivation: successive splitmix64 absorption of the
// master seed, the axis values, the replicate index, and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_tag,
                                 std::uint64_t axis1, std::uint64_t axis2, std::uint64_t rep) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ stream_tag);
    h = splitmix64(h ^ axis1);
    h = splitmix64(h ^ axis2);
    h = splitmix64(h ^ rep);
    return h;
}

struct ExperimentConfig {
    std::string network_path;
    std::string mode = "homogeneous"; // homogeneous | heterogeneous
    std::vector<double> c_values;
    std::vector<std::pair<double, double>> delta_ranges;
    std::vector<double> observed_fractions;
    int replicates = 100;
    std::vector<std::string> methods = {"exposure", "shortest_paths", "label_propagation"};
    std::uint64_t master_seed = 0;
    SolverSettings solver;
    std::optional<double> bias;
    bool record_timing = true;
    int threads = 1;
    // cascades smaller than this are redrawn with a chained seed (up to 1000
    // attempts); a perturbation that never left the root has nothing to infer
    int min_cascade_size = 2;

    void validate() const {
        if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
        if (min_cascade_size < 1) throw std::invalid_argument("min_cascade_size must be >= 1");
        if (mode != "homogeneous" && mode != "heterogeneous")
            throw std::invalid_argument("mode must be homogeneous or heterogeneous");
        if (mode == "homogeneous" && c_values.empty())
            throw std::invalid_argument("c_values is empty");
        if (mode == "heterogeneous" && delta_ranges.empty())
            throw std::invalid_argument("delta_ranges is empty");
        for (auto [l, u] : delta_ranges)
            if (!(l >= 0.0 && l <= u && u <= 1.0))
                throw std::invalid_argument("delta ranges must satisfy 0 <= l <= u <= 1");
        if (observed_fractions.empty()) throw std::invalid_argument("observed_fractions is empty");
        for (double f : observed_fractions)
            if (!(f > 0.0 && f < 1.0))
                throw std::invalid_argument("observed fractions must be in (0,1)");
        if (methods.empty()) throw std::invalid_argument("methods is empty");
        for (const auto& m : methods)
            if (m != "exposure" && m != "shortest_paths" && m != "label_propagation")
                throw std::invalid_argument("unknown method '" + m + "'");
        solver.validate();
    }
};

struct ResultRow {
    std::string network;
    std::string method;
    double param = 0.0; // c, delta_c, or hide fraction
    double observed_fraction = 0.0;
    int replicate = 0;
    std::optional<double> auc_value;
    std::optional<double> eta_star;
    double wall_time_ms = 0.0;
    bool converged = false;
    std::string error;
};

inline const char* kResultCsvHeader =
    "network,method,param,observed_fraction,replicate,auc,eta_star,wall_time_ms,converged,error";

inline std::string csv_row(const ResultRow& r) {
    std::string out = r.network + ',' + r.method + ',' + format_score(r.param) + ',' +
                      format_score(r.observed_fraction) + ',' + std::to_string(r.replicate) + ',';
    if (r.auc_value) out += format_score(*r.auc_value);
    out += ',';
    if (r.eta_star) out += format_score(*r.eta_star);
    out += ',';
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", r.wall_time_ms);
        out += buf;
    }
    out += ',';
    out += r.converged ? '1' : '0';
    out += ',';
    out += r.error;
    return out;
}

// Per-(grid point, method) aggregate for the summary block.
struct SummaryCell {
    int valid = 0;
    int failed = 0;
    std::vector<double> aucs;
    std::vector<double> etas;
};

using SummaryKey = std::tuple<double, double, std::string>; // (param, fraction, method)
using Summary = std::map<SummaryKey, SummaryCell>;

namespace detail {

struct MethodRun {
    std::optional<ScoreVector> scores;
    std::optional<double> eta_star;
    bool converged = true;
    std::string error;
};

inline MethodRun run_method(const std::string& method, const Network& net,
                            const Observation& obs, const SolverSettings& solver) {
    MethodRun out;
    try {
        if (method == "exposure") {
            auto res = infer(net, obs, solver);
            out.scores = std::move(res.scores);
            out.eta_star = res.eta_star;
            out.converged = res.diagnostics.converged;
        } else if (method == "shortest_paths") {
            out.scores = shortest_path_scores(net, obs);
        } else if (method == "label_propagation") {
            bool converged = false;
            out.scores = label_propagation_scores(net, obs, 1e-7, 10000, &converged);
            out.converged = converged;
        } else {
            out.error = "unknown method '" + method + "'";
        }
    } catch (const std::exception& e) {
        out.scores.reset();
        out.error = e.what();
    }
    return out;
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Runs tasks 0..n-1 on up to `threads` workers; exceptions surface on join.
inline void parallel_tasks(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const int workers = std::min(threads, n);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace detail

// Full sweep: one row per (grid point x replicate x method). Replicates run in
// a worker pool; rows are emitted in deterministic (grid, replicate, method)
// order through `sink`.
inline Summary run_experiment(const ExperimentConfig& cfg, const Network& net,
                              const std::function<void(const ResultRow&)>& sink) {
    cfg.validate();
    struct GridPoint {
        double param;   // c or delta_c
        double lower = 0.0, upper = 0.0;
        double fraction;
    };
    std::vector<GridPoint> grid;
    if (cfg.mode == "homogeneous") {
        for (double c : cfg.c_values)
            for (double f : cfg.observed_fractions) grid.push_back({c, 0.0, 0.0, f});
    } else {
        for (auto [l, u] : cfg.delta_ranges)
            for (double f : cfg.observed_fractions) grid.push_back({u - l, l, u, f});
    }

    const int tasks = static_cast<int>(grid.size()) * cfg.replicates;
    std::vector<std::vector<ResultRow>> rows(tasks);

    detail::parallel_tasks(tasks, cfg.threads, [&](int task) {
        const int g = task / cfg.replicates;
        const int rep = task % cfg.replicates;
        const auto& pt = grid[g];
        const std::uint64_t axis1 =
            cfg.mode == "homogeneous" ? bits_of(pt.param)
                                      : splitmix64(bits_of(pt.lower) ^ bits_of(pt.upper));
        const std::uint64_t sim_seed = derive_seed(cfg.master_seed, 1, axis1, bits_of(pt.fraction),
                                                   static_cast<std::uint64_t>(rep));
        const std::uint64_t mask_seed = derive_seed(cfg.master_seed, 2, axis1, bits_of(pt.fraction),
                                                    static_cast<std::uint64_t>(rep));

        ResultRow base;
        base.network = cfg.network_path;
        base.param = pt.param;
        base.observed_fraction = pt.fraction;
        base.replicate = rep;

        auto& out = rows[task];
        try {
            PerturbationOutcome outcome;
            for (int attempt = 0;; ++attempt) {
                const std::uint64_t s = splitmix64(sim_seed + attempt);
                outcome = cfg.mode == "homogeneous"
                              ? simulate_si_homogeneous(net, pt.param, s)
                              : simulate_si_heterogeneous(net, pt.lower, pt.upper, s);
                if (outcome.perturbed_count() >= cfg.min_cascade_size || attempt >= 999) break;
            }
            const auto obs = mask_observation(outcome, pt.fraction, mask_seed, cfg.bias);
            const auto eval = make_evaluation_set(outcome.state, obs);
            const bool auc_defined = !eval.positives.empty() && !eval.negatives.empty();

            for (const auto& method : cfg.methods) {
                ResultRow row = base;
                row.method = method;
                if (!auc_defined) {
                    row.error = "AUC undefined";
                    out.push_back(row);
                    continue;
                }
                const auto t0 = std::chrono::steady_clock::now();
                auto run = detail::run_method(method, net, obs, cfg.solver);
                if (cfg.record_timing) row.wall_time_ms = detail::elapsed_ms(t0);
                row.converged = run.converged;
                row.eta_star = run.eta_star;
                if (run.scores) {
                    row.auc_value = auc(*run.scores, eval);
                } else {
                    row.error = run.error;
                }
                out.push_back(row);
            }
        } catch (const std::exception& e) {
            for (const auto& method : cfg.methods) {
                ResultRow row = base;
                row.method = method;
                row.error = e.what();
                out.push_back(row);
            }
        }
    });

    Summary summary;
    for (const auto& task_rows : rows) {
        for (const auto& row : task_rows) {
            sink(row);
            auto& cell = summary[{row.param, row.observed_fraction, row.method}];
            if (row.auc_value) {
                ++cell.valid;
                cell.aucs.push_back(*row.auc_value);
                if (row.eta_star) cell.etas.push_back(*row.eta_star);
            } else {
                ++cell.failed;
            }
        }
    }
    return summary;
}

struct HoldoutConfig {
    std::string network_path;
    std::vector<double> hide_fractions;
    int replicates = 100;
    std::vector<std::string> methods = {"exposure", "shortest_paths", "label_propagation"};
    std::uint64_t master_seed = 0;
    SolverSettings solver;
    bool record_timing = true;
    int threads = 1;
};

// Hold-out sweep over an existing observation: hide a fraction, infer from
// the rest, score the hidden nodes. param column = hide fraction.
inline Summary run_holdout(const HoldoutConfig& cfg, const Network& net, const Observation& obs,
                           const std::function<void(const ResultRow&)>& sink) {
    if (obs.empty()) throw std::invalid_argument("observation is empty");
    const int n_frac = static_cast<int>(cfg.hide_fractions.size());
    const int tasks = n_frac * cfg.replicates;
    std::vector<std::vector<ResultRow>> rows(tasks);

    detail::parallel_tasks(tasks, cfg.threads, [&](int task) {
        const int g = task / cfg.replicates;
        const int rep = task % cfg.replicates;
        const double hide = cfg.hide_fractions[g];
        const std::uint64_t split_seed = derive_seed(cfg.master_seed, 3, bits_of(hide), 0,
                                                     static_cast<std::uint64_t>(rep));
        ResultRow base;
        base.network = cfg.network_path;
        base.param = hide;
        base.replicate = rep;

        auto& out = rows[task];
        try {
            const auto split = holdout_split(obs, hide, split_seed);
            base.observed_fraction =
                static_cast<double>(split.reduced.size()) / net.node_count;
            for (const auto& method : cfg.methods) {
                ResultRow row = base;
                row.method = method;
                const auto t0 = std::chrono::steady_clock::now();
                auto run = detail::run_method(method, net, split.reduced, cfg.solver);
                if (cfg.record_timing) row.wall_time_ms = detail::elapsed_ms(t0);
                row.converged = run.converged;
                row.eta_star = run.eta_star;
                if (run.scores) {
                    row.auc_value = auc(*run.scores, split.eval);
                } else {
                    row.error = run.error;
                }
                out.push_back(row);
            }
        } catch (const std::exception& e) {
            for (const auto& method : cfg.methods) {
                ResultRow row = base;
                row.method = method;
                row.error = e.what();
                out.push_back(row);
            }
        }
    });

    Summary summary;
    for (const auto& task_rows : rows) {
        for (const auto& row : task_rows) {
            sink(row);
            auto& cell = summary[{row.param, row.observed_fraction, row.method}];
            if (row.auc_value) {
                ++cell.valid;
                cell.aucs.push_back(*row.auc_value);
                if (row.eta_star) cell.etas.push_back(*row.eta_star);
            } else {
                ++cell.failed;
            }
        }
    }
    return summary;
}

inline std::string summary_block(const Summary& summary) {
    std::ostringstream out;
    out << "# param observed_fraction method n_valid n_failed mean_auc se_auc mean_eta\n";
    for (const auto& [key, cell] : summary) {
        const auto& [param, fraction, method] = key;
        out << "# " << format_score(param) << ' ' << format_score(fraction) << ' ' << method << ' '
            << cell.valid << ' ' << cell.failed << ' ';
        if (!cell.aucs.empty())
            out << format_score(mean(cell.aucs)) << ' ' << format_score(standard_error(cell.aucs));
        else
            out << "nan nan";
        out << ' ' << (cell.etas.empty() ? "-" : format_score(mean(cell.etas))) << '\n';
    }
    return out.str();
}

// The 'paper' preset: the two limiting transmission probabilities for a
// loaded network, 1/(<k> + 0.05) and 0.5.
inline std::vector<double> c_preset_paper(const Network& net) {
    return {1.0 / (net.mean_degree() + 0.05), 0.5};
}

// Flat key = value config file; '#' comments. Keys mirror the config fields.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    auto parse_doubles = [](const std::string& s) {
        std::vector<double> out;
        std::istringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
        return out;
    };
    auto parse_ranges = [](const std::string& s) {
        std::vector<std::pair<double, double>> out;
        std::istringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("delta range must look like 'l:u'");
            out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        }
        return out;
    };
    auto parse_strings = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(item);
        return out;
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected 'key = value'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "network_path") cfg.network_path = value;
            else if (key == "mode") cfg.mode = value;
            else if (key == "c_values") cfg.c_values = parse_doubles(value);
            else if (key == "delta_ranges") cfg.delta_ranges = parse_ranges(value);
            else if (key == "observed_fractions") cfg.observed_fractions = parse_doubles(value);
            else if (key == "replicates") cfg.replicates = std::stoi(value);
            else if (key == "methods") cfg.methods = parse_strings(value);
            else if (key == "master_seed") cfg.master_seed = std::stoull(value);
            else if (key == "bias") cfg.bias = std::stod(value);
            else if (key == "record_timing") cfg.record_timing = (value == "true" || value == "1");
            else if (key == "threads") cfg.threads = std::stoi(value);
            else if (key == "min_cascade_size") cfg.min_cascade_size = std::stoi(value);
            else if (key == "message_tolerance") cfg.solver.message_tolerance = std::stod(value);
            else if (key == "eta_tolerance") cfg.solver.eta_tolerance = std::stod(value);
            else if (key == "max_bp_sweeps") cfg.solver.max_bp_sweeps = std::stoi(value);
            else if (key == "max_em_rounds") cfg.solver.max_em_rounds = std::stoi(value);
            else if (key == "damping") cfg.solver.damping = std::stod(value);
            else if (key == "eta_init") cfg.solver.eta_init = std::stod(value);
            else if (key == "message_init") cfg.solver.message_init = std::stod(value);
            else if (key == "schedule")
                cfg.solver.schedule = value == "asynchronous" ? Schedule::RandomAsynchronous
                                                              : Schedule::Synchronous;
            else
                throw std::invalid_argument("unknown config key '" + key + "'");
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception& e) {
            throw std::runtime_error("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

} // namespace exposure
