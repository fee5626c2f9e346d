#pragma once

// Belief-propagation solver for the exposure model, wrapped in an
// expectation-maximization loop for the propagation parameter eta.
//
// Per directed edge (i -> k) the message psi_i^(k) is the probability that i
// is unperturbed, computed with k absent:
//
//     msg(i->k) = prod_{j in N(i)\k} msg(j->i)
//               + (1 - eta) * (1 - prod_{j in N(i)\k} msg(j->i))
//
// and the belief of i (probability unperturbed in the full system) uses the
// same form with the product over the whole neighborhood. Observed nodes emit
// constant messages equal to their state (1 if unperturbed, 0 if perturbed);
// their own exposure factor is not propagated, which matches the recursion
// above and is a documented approximation measured against exact_enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "exposure/network.hpp"
#include "exposure/observation.hpp"
#include "exposure/score.hpp"

namespace exposure {

enum class Schedule { Synchronous, RandomAsynchronous };
enum class EtaSumScope { AllNodes, UnobservedOnly };

// How the expected number of exposed-and-perturbed nodes is evaluated in the
// eta update. ExposedPerturbedExpectation uses the model identity
// <gamma_i s_i> = <s_i> = 1 - belief_i for unobserved nodes (a perturbed node
// is exposed with certainty), which keeps eta anchored to the data.
// MarginalProduct multiplies the two marginals, (1 - belief_i)(1 - prod_i);
// for unobserved nodes that equals eta * (1 - prod_i)^2 and biases the
// estimate low on sparse observations.
enum class EtaNumerator { ExposedPerturbedExpectation, MarginalProduct };

struct SolverSettings {
    double message_tolerance = 1e-6;
    double eta_tolerance = 1e-6;
    int max_bp_sweeps = 1000;
    int max_em_rounds = 100;
    double damping = 0.0; // in [0,1); blend new = (1-d)*update + d*old
    double eta_init = 0.5;
    double message_init = 0.5;
    Schedule schedule = Schedule::Synchronous;
    EtaSumScope eta_sum_scope = EtaSumScope::AllNodes;
    EtaNumerator eta_numerator = EtaNumerator::ExposedPerturbedExpectation;
    std::uint64_t async_seed = 0; // update-order seed for the asynchronous schedule

    void validate() const {
        if (!(message_tolerance > 0.0) || !(eta_tolerance > 0.0))
            throw std::invalid_argument("tolerances must be positive");
        if (!(damping >= 0.0 && damping < 1.0))
            throw std::invalid_argument("damping must be in [0,1)");
        if (!(eta_init >= 0.0 && eta_init <= 1.0) || !(message_init >= 0.0 && message_init <= 1.0))
            throw std::invalid_argument("eta_init and message_init must be in [0,1]");
    }
};

struct BeliefState {
    std::vector<double> messages; // per directed-edge slot, see ExposureSolver layout
    std::vector<double> beliefs;  // per node, probability unperturbed
    double eta = 0.5;
};

struct Diagnostics {
    double eta_star = 0.0;
    int em_rounds = 0;
    long bp_sweeps_total = 0;
    bool converged = false;
    double final_residual = 0.0;
    bool oscillation_warning = false;
};

struct InferenceResult {
    ScoreVector scores; // 1 - belief, per node
    double eta_star = 0.0;
    Diagnostics diagnostics;
};

class ExposureSolver {
  public:
    ExposureSolver(const Network& net, const Observation& obs, SolverSettings settings = {})
        : net_(net), settings_(settings) {
        settings_.validate();
        node_state_ = obs.dense(net.node_count);

        // CSR over incoming directed edges: slot e in [off_[i], off_[i+1])
        // holds the message src_[e] -> i.
        off_.assign(net.node_count + 1, 0);
        for (int i = 0; i < net.node_count; ++i)
            off_[i + 1] = off_[i] + net.degree(i);
        const int slots = off_[net.node_count];
        src_.resize(slots);
        for (int i = 0; i < net.node_count; ++i)
            std::copy(net.adjacency[i].begin(), net.adjacency[i].end(), src_.begin() + off_[i]);
        // reverse slot: rev_[e] is the slot of (receiver(e) -> src_[e])
        rev_.resize(slots);
        for (int i = 0; i < net.node_count; ++i) {
            for (int e = off_[i]; e < off_[i + 1]; ++e) {
                const int j = src_[e];
                const auto& adj = net.adjacency[j];
                const int pos = static_cast<int>(
                    std::lower_bound(adj.begin(), adj.end(), i) - adj.begin());
                rev_[e] = off_[j] + pos;
            }
        }
        reset();
    }

    // Observed nodes clamped, unobserved messages and beliefs at message_init,
    // eta at eta_init.
    void reset() {
        const int slots = off_[net_.node_count];
        state_.messages.assign(slots, settings_.message_init);
        state_.beliefs.assign(net_.node_count, settings_.message_init);
        state_.eta = settings_.eta_init;
        for (int i = 0; i < net_.node_count; ++i) {
            if (node_state_[i] == kUnobserved) continue;
            const double clamped = node_state_[i] ? 0.0 : 1.0;
            state_.beliefs[i] = clamped;
            for (int e = off_[i]; e < off_[i + 1]; ++e)
                state_.messages[rev_[e]] = clamped; // messages emitted by i
        }
        scratch_.assign(slots, 0.0);
        incoming_product_.assign(net_.node_count, 1.0);
    }

    // One full pass over the directed-edge messages; returns the L-inf change.
    double sweep() {
        return settings_.schedule == Schedule::Synchronous ? sweep_synchronous()
                                                           : sweep_asynchronous();
    }

    // Recomputes unobserved beliefs from the current messages.
    void update_beliefs() {
        refresh_incoming_products();
        for (int i = 0; i < net_.node_count; ++i) {
            if (node_state_[i] != kUnobserved) continue;
            const double prod = incoming_product_[i];
            state_.beliefs[i] = prod + (1.0 - state_.eta) * (1.0 - prod);
        }
    }

    // Saddle-point eta: the expected count of exposed-and-perturbed nodes
    // over the expected count of exposed nodes, with the exposure probability
    // 1 - prod_i taken from the incoming cavity messages at i. Observed nodes
    // enter through their clamped values. Returns the current eta unchanged
    // when the denominator vanishes (no node has any chance of a perturbed
    // neighbor).
    double estimate_eta() {
        refresh_incoming_products();
        double num = 0.0, den = 0.0;
        for (int i = 0; i < net_.node_count; ++i) {
            if (settings_.eta_sum_scope == EtaSumScope::UnobservedOnly &&
                node_state_[i] != kUnobserved)
                continue;
            const double exposed = 1.0 - incoming_product_[i];
            const double perturbed = 1.0 - state_.beliefs[i];
            if (settings_.eta_numerator == EtaNumerator::ExposedPerturbedExpectation &&
                node_state_[i] == kUnobserved) {
                num += perturbed; // = eta * exposed under the belief recursion
            } else {
                num += perturbed * exposed;
            }
            den += exposed;
        }
        if (den == 0.0) return state_.eta;
        return num / den;
    }

    // Iterates sweeps at the current eta until the message change drops below
    // message_tolerance or max_bp_sweeps is hit. Returns the last residual.
    double solve_messages() {
        double residual = 0.0;
        bp_converged_ = false;
        // window for the oscillation warning: residual not decreasing over 50 sweeps
        constexpr int kWindow = 50;
        std::vector<double> history;
        for (int s = 0; s < settings_.max_bp_sweeps; ++s) {
            residual = sweep();
            ++sweeps_total_;
            history.push_back(residual);
            if (residual < settings_.message_tolerance) {
                bp_converged_ = true;
                break;
            }
            const int h = static_cast<int>(history.size());
            if (h >= kWindow && history[h - 1] >= history[h - kWindow]) oscillation_ = true;
        }
        return residual;
    }

    // Full EM loop; beliefs, scores and eta end up at the returned values.
    InferenceResult infer() {
        Diagnostics diag;
        double residual = 0.0;
        bool em_converged = false;
        int rounds = 0;
        sweeps_total_ = 0;
        oscillation_ = false;
        while (rounds < settings_.max_em_rounds) {
            ++rounds;
            residual = solve_messages();
            update_beliefs();
            const double eta_new = estimate_eta();
            const double change = std::abs(eta_new - state_.eta);
            state_.eta = eta_new;
            if (change < settings_.eta_tolerance) {
                em_converged = true;
                break;
            }
        }
        diag.eta_star = state_.eta;
        diag.em_rounds = rounds;
        diag.bp_sweeps_total = sweeps_total_;
        diag.converged = em_converged && bp_converged_;
        diag.final_residual = residual;
        diag.oscillation_warning = oscillation_;
        return package_result(diag);
    }

    // BP at a fixed eta (no EM); used for oracle comparisons.
    InferenceResult infer_at_eta(double eta) {
        if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in [0,1]");
        Diagnostics diag;
        sweeps_total_ = 0;
        oscillation_ = false;
        state_.eta = eta;
        diag.final_residual = solve_messages();
        update_beliefs();
        diag.eta_star = eta;
        diag.em_rounds = 0;
        diag.bp_sweeps_total = sweeps_total_;
        diag.converged = bp_converged_;
        diag.oscillation_warning = oscillation_;
        return package_result(diag);
    }

    const BeliefState& state() const { return state_; }
    void set_eta(double eta) { state_.eta = eta; }
    bool is_observed(int node) const { return node_state_[node] != kUnobserved; }
    double belief(int node) const { return state_.beliefs[node]; }

    // message from -> to, i.e. P(from unperturbed) computed with `to` absent
    double message(int from, int to) const {
        const auto& adj = net_.adjacency[to];
        const auto it = std::lower_bound(adj.begin(), adj.end(), from);
        if (it == adj.end() || *it != from) throw std::invalid_argument("no such edge");
        return state_.messages[off_[to] + static_cast<int>(it - adj.begin())];
    }

  private:
    static constexpr double kDivisionEps = 1e-12;

    double message_update(int receiver, int slot) const {
        // product over the emitter's incoming messages excluding the one from
        // the receiver; full product divided by that message when safe,
        // recomputed directly otherwise.
        const int emitter = src_[slot];
        const double back = state_.messages[rev_[slot]]; // receiver -> emitter
        double prod;
        if (back > kDivisionEps) {
            prod = incoming_product_[emitter] / back;
        } else {
            prod = 1.0;
            for (int e = off_[emitter]; e < off_[emitter + 1]; ++e)
                if (src_[e] != receiver) prod *= state_.messages[e];
        }
        prod = std::clamp(prod, 0.0, 1.0);
        return prod + (1.0 - state_.eta) * (1.0 - prod);
    }

    double sweep_synchronous() {
        refresh_incoming_products();
        const double d = settings_.damping;
        double max_change = 0.0;
        for (int i = 0; i < net_.node_count; ++i) {
            for (int e = off_[i]; e < off_[i + 1]; ++e) {
                if (node_state_[src_[e]] != kUnobserved) {
                    scratch_[e] = state_.messages[e]; // clamped emitter
                    continue;
                }
                const double upd = message_update(i, e);
                const double blended = std::clamp((1.0 - d) * upd + d * state_.messages[e], 0.0, 1.0);
                max_change = std::max(max_change, std::abs(blended - state_.messages[e]));
                scratch_[e] = blended;
            }
        }
        state_.messages.swap(scratch_);
        return max_change;
    }

    double sweep_asynchronous() {
        if (order_.empty()) {
            const int slots = off_[net_.node_count];
            order_.resize(slots);
            std::iota(order_.begin(), order_.end(), 0);
            async_rng_.seed(settings_.async_seed);
        }
        std::shuffle(order_.begin(), order_.end(), async_rng_);
        const double d = settings_.damping;
        double max_change = 0.0;
        for (int e : order_) {
            if (node_state_[src_[e]] != kUnobserved) continue;
            const int receiver = receiver_of(e);
            // no cached products in the in-place schedule
            const int emitter = src_[e];
            double prod = 1.0;
            for (int f = off_[emitter]; f < off_[emitter + 1]; ++f)
                if (src_[f] != receiver) prod *= state_.messages[f];
            const double upd = prod + (1.0 - state_.eta) * (1.0 - prod);
            const double blended = std::clamp((1.0 - d) * upd + d * state_.messages[e], 0.0, 1.0);
            max_change = std::max(max_change, std::abs(blended - state_.messages[e]));
            state_.messages[e] = blended;
        }
        return max_change;
    }

    int receiver_of(int slot) const {
        // slot of (emitter -> receiver) stored under the receiver's range
        const int i = static_cast<int>(
            std::upper_bound(off_.begin(), off_.end(), slot) - off_.begin()) - 1;
        return i;
    }

    void refresh_incoming_products() {
        for (int i = 0; i < net_.node_count; ++i) {
            double prod = 1.0;
            for (int e = off_[i]; e < off_[i + 1]; ++e) prod *= state_.messages[e];
            incoming_product_[i] = prod;
        }
    }

    InferenceResult package_result(const Diagnostics& diag) const {
        InferenceResult res;
        res.scores.method_tag = "exposure";
        res.scores.score.resize(net_.node_count);
        for (int i = 0; i < net_.node_count; ++i)
            res.scores.score[i] = 1.0 - state_.beliefs[i];
        res.eta_star = state_.eta;
        res.diagnostics = diag;
        return res;
    }

    const Network& net_;
    SolverSettings settings_;
    std::vector<std::int8_t> node_state_;
    std::vector<int> off_, src_, rev_;
    BeliefState state_;
    std::vector<double> scratch_;
    std::vector<double> incoming_product_;
    std::vector<int> order_;
    std::mt19937_64 async_rng_;
    long sweeps_total_ = 0;
    bool bp_converged_ = false;
    bool oscillation_ = false;
};

// Convenience wrapper: full EM inference in one call.
inline InferenceResult infer(const Network& net, const Observation& obs,
                             SolverSettings settings = {}) {
    if (net.node_count == 0) throw std::invalid_argument("empty network");
    ExposureSolver solver(net, obs, settings);
    return solver.infer();
}

inline InferenceResult infer_at_eta(const Network& net, const Observation& obs, double eta,
                                    SolverSettings settings = {}) {
    if (net.node_count == 0) throw std::invalid_argument("empty network");
    ExposureSolver solver(net, obs, settings);
    return solver.infer_at_eta(eta);
}

inline std::string diagnostics_json(const Diagnostics& d) {
    std::string out = "{";
    out += "\"eta_star\": " + format_score(d.eta_star);
    out += ", \"em_rounds\": " + std::to_string(d.em_rounds);
    out += ", \"bp_sweeps_total\": " + std::to_string(d.bp_sweeps_total);
    out += std::string(", \"converged\": ") + (d.converged ? "true" : "false");
    out += ", \"final_residual\": " + format_score(d.final_residual);
    out += "}";
    return out;
}

} // namespace exposure
