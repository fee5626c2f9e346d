#pragma once

// Undirected simple graph with contiguous node indices, plus the edge-list
// ingestion and connectivity utilities everything else builds on.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace exposure {

struct Network {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;     // canonical (min, max), sorted, unique
    std::vector<std::vector<int>> adjacency;    // sorted neighbor lists
    std::vector<std::string> labels;            // empty -> nodes are identified by index

    int degree(int i) const { return static_cast<int>(adjacency[i].size()); }

    std::string label_of(int i) const {
        return labels.empty() ? std::to_string(i) : labels[i];
    }

    double mean_degree() const {
        if (node_count == 0) return 0.0;
        return 2.0 * static_cast<double>(edges.size()) / node_count;
    }

    // Label -> index map for observation/outcome files.
    std::unordered_map<std::string, int> label_index() const {
        std::unordered_map<std::string, int> m;
        m.reserve(node_count);
        for (int i = 0; i < node_count; ++i) m.emplace(label_of(i), i);
        return m;
    }
};

// Builds a Network from raw (possibly messy) pairs: drops self-loops,
// collapses duplicates, symmetrizes. Counts of dropped items are returned
// through the optional out-params.
inline Network make_network(int node_count, std::vector<std::pair<int, int>> raw_edges,
                            std::vector<std::string> labels = {},
                            int* self_loops_dropped = nullptr,
                            int* duplicates_collapsed = nullptr) {
    if (node_count < 0) throw std::invalid_argument("node_count must be non-negative");
    int loops = 0;
    std::vector<std::pair<int, int>> canon;
    canon.reserve(raw_edges.size());
    for (auto [a, b] : raw_edges) {
        if (a < 0 || a >= node_count || b < 0 || b >= node_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (a == b) {
            ++loops;
            continue;
        }
        canon.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(canon.begin(), canon.end());
    const auto last = std::unique(canon.begin(), canon.end());
    const int dups = static_cast<int>(canon.end() - last);
    canon.erase(last, canon.end());

    Network net;
    net.node_count = node_count;
    net.edges = std::move(canon);
    net.labels = std::move(labels);
    net.adjacency.assign(node_count, {});
    for (auto [a, b] : net.edges) {
        net.adjacency[a].push_back(b);
        net.adjacency[b].push_back(a);
    }
    for (auto& nbrs : net.adjacency) std::sort(nbrs.begin(), nbrs.end());
    if (self_loops_dropped) *self_loops_dropped = loops;
    if (duplicates_collapsed) *duplicates_collapsed = dups;
    return net;
}

struct EdgeListParse {
    Network net;
    int self_loops_dropped = 0;
    int duplicate_edges_collapsed = 0;
};

// One edge per line, two whitespace-separated tokens; '#'-prefixed comment
// lines and blank lines ignored. Identifiers are interned to contiguous
// indices in first-appearance order.
inline EdgeListParse parse_edge_list(std::istream& in) {
    std::unordered_map<std::string, int> index_of;
    std::vector<std::string> labels;
    std::vector<std::pair<int, int>> edges;
    auto intern = [&](const std::string& tok) {
        auto it = index_of.find(tok);
        if (it != index_of.end()) return it->second;
        const int id = static_cast<int>(labels.size());
        index_of.emplace(tok, id);
        labels.push_back(tok);
        return id;
    };

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a)) continue;          // blank line
        if (a[0] == '#') continue;         // comment line
        if (!(ls >> b) || (ls >> extra)) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 2 tokens per edge line");
        }
        const int ia = intern(a); // interning order defines the index order
        const int ib = intern(b);
        edges.emplace_back(ia, ib);
    }
    if (edges.empty()) throw std::runtime_error("no edges");

    EdgeListParse out;
    const int node_count = static_cast<int>(labels.size());
    out.net = make_network(node_count, std::move(edges), std::move(labels),
                           &out.self_loops_dropped, &out.duplicate_edges_collapsed);
    return out;
}

inline EdgeListParse parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    return parse_edge_list(in);
}

inline void write_edge_list(const Network& net, std::ostream& out) {
    for (auto [a, b] : net.edges)
        out << net.label_of(a) << '\t' << net.label_of(b) << '\n';
}

struct ComponentLabeling {
    std::vector<int> component_id;          // per node
    std::vector<int> giant_component_nodes; // ascending node indices
    int component_count = 0;
};

inline ComponentLabeling label_components(const Network& net) {
    ComponentLabeling out;
    out.component_id.assign(net.node_count, -1);
    std::vector<int> comp_size;
    std::vector<int> comp_min;
    for (int s = 0; s < net.node_count; ++s) {
        if (out.component_id[s] != -1) continue;
        const int cid = out.component_count++;
        comp_size.push_back(0);
        comp_min.push_back(s);
        std::queue<int> q;
        q.push(s);
        out.component_id[s] = cid;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            ++comp_size[cid];
            for (int v : net.adjacency[u]) {
                if (out.component_id[v] == -1) {
                    out.component_id[v] = cid;
                    q.push(v);
                }
            }
        }
    }
    // largest component; ties broken by smallest minimum node index
    int best = -1;
    for (int c = 0; c < out.component_count; ++c) {
        if (best == -1 || comp_size[c] > comp_size[best] ||
            (comp_size[c] == comp_size[best] && comp_min[c] < comp_min[best]))
            best = c;
    }
    for (int i = 0; i < net.node_count; ++i)
        if (out.component_id[i] == best) out.giant_component_nodes.push_back(i);
    return out;
}

struct GiantComponent {
    Network net;
    std::vector<int> original_index; // new index -> index in the source network
};

// Induced subgraph on the largest connected component, reindexed contiguously.
inline GiantComponent giant_component(const Network& source) {
    if (source.node_count == 0) throw std::invalid_argument("empty network");
    const auto labeling = label_components(source);
    const auto& keep = labeling.giant_component_nodes;

    std::vector<int> new_index(source.node_count, -1);
    for (int i = 0; i < static_cast<int>(keep.size()); ++i) new_index[keep[i]] = i;

    std::vector<std::pair<int, int>> edges;
    for (auto [a, b] : source.edges)
        if (new_index[a] != -1 && new_index[b] != -1)
            edges.emplace_back(new_index[a], new_index[b]);

    std::vector<std::string> labels;
    if (!source.labels.empty()) {
        labels.reserve(keep.size());
        for (int orig : keep) labels.push_back(source.labels[orig]);
    }

    GiantComponent out;
    out.net = make_network(static_cast<int>(keep.size()), std::move(edges), std::move(labels));
    out.original_index = keep;
    return out;
}

constexpr int kUnreachable = -1;

inline std::vector<int> bfs_distances(const Network& net, int source) {
    if (source < 0 || source >= net.node_count)
        throw std::invalid_argument("source out of range");
    std::vector<int> dist(net.node_count, kUnreachable);
    std::queue<int> q;
    dist[source] = 0;
    q.push(source);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : net.adjacency[u]) {
            if (dist[v] == kUnreachable) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
        }
    }
    return dist;
}

} // namespace exposure
