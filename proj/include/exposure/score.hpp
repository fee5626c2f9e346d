#pragma once

// Per-node "probability perturbed" ranking produced by any inference method.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "exposure/network.hpp"

namespace exposure {

struct ScoreVector {
    std::vector<double> score; // one finite value per node; higher = more likely perturbed
    std::string method_tag;
};

inline std::string format_score(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// "node_label<TAB>score" lines, method tag in a header comment,
// scores printed with 9 significant digits.
inline void write_scores(const ScoreVector& scores, const Network& net, std::ostream& out) {
    out << "# method=" << scores.method_tag << '\n';
    for (int i = 0; i < net.node_count; ++i)
        out << net.label_of(i) << '\t' << format_score(scores.score[i]) << '\n';
}

} // namespace exposure
