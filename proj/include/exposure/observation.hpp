#pragma once

// Partial assignment of binary node states over an observed subset O.

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "exposure/network.hpp"

namespace exposure {

constexpr std::int8_t kUnobserved = -1;

struct Observation {
    std::vector<int> nodes;          // observed node indices, ascending
    std::vector<std::uint8_t> states; // parallel to nodes, 0 | 1

    int size() const { return static_cast<int>(nodes.size()); }
    bool empty() const { return nodes.empty(); }

    // Dense per-node view: -1 unobserved, else 0|1.
    std::vector<std::int8_t> dense(int node_count) const {
        std::vector<std::int8_t> d(node_count, kUnobserved);
        for (int k = 0; k < size(); ++k) {
            if (nodes[k] < 0 || nodes[k] >= node_count)
                throw std::invalid_argument("observation references unknown node index " +
                                            std::to_string(nodes[k]));
            d[nodes[k]] = static_cast<std::int8_t>(states[k]);
        }
        return d;
    }

    int count_state(std::uint8_t s) const {
        int n = 0;
        for (auto v : states) n += (v == s);
        return n;
    }
};

inline Observation make_observation(std::vector<std::pair<int, std::uint8_t>> entries) {
    std::sort(entries.begin(), entries.end());
    Observation obs;
    obs.nodes.reserve(entries.size());
    obs.states.reserve(entries.size());
    int prev = -1;
    for (auto [node, state] : entries) {
        if (node == prev)
            throw std::invalid_argument("duplicate observation for node " + std::to_string(node));
        if (state > 1) throw std::invalid_argument("observation state must be 0 or 1");
        obs.nodes.push_back(node);
        obs.states.push_back(state);
        prev = node;
    }
    return obs;
}

// "node_label<TAB>0|1" per line, '#' comments.
inline void write_observation(const Observation& obs, const Network& net, std::ostream& out,
                              const std::string& header_comment = {}) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    for (int k = 0; k < obs.size(); ++k)
        out << net.label_of(obs.nodes[k]) << '\t' << int(obs.states[k]) << '\n';
}

inline Observation read_observation(std::istream& in, const Network& net) {
    const auto index = net.label_index();
    std::vector<std::pair<int, std::uint8_t>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string label, state, extra;
        if (!(ls >> label)) continue;
        if (label[0] == '#') continue;
        if (!(ls >> state) || (ls >> extra))
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 'node_label<TAB>0|1'");
        auto it = index.find(label);
        if (it == index.end())
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": observation references unknown node '" + label + "'");
        if (state != "0" && state != "1")
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": state must be 0 or 1, got '" + state + "'");
        entries.emplace_back(it->second, static_cast<std::uint8_t>(state == "1"));
    }
    return make_observation(std::move(entries));
}

inline Observation read_observation(const std::string& text, const Network& net) {
    std::istringstream in(text);
    return read_observation(in, net);
}

} // namespace exposure
