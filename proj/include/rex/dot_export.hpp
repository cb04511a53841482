#pragma once

#include "rex/core.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace rex {

namespace detail {

/// Blue (h=0) to yellow (h=1), linear in RGB.
inline std::string heat_color(double h) {
    const int ry = static_cast<int>(std::lround(255.0 * h));
    const int b = static_cast<int>(std::lround(255.0 * (1.0 - h)));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", ry, ry, b);
    return buf;
}

} // namespace detail

/// Render the refinement tree as a DOT digraph. Node fill encodes the
/// heuristic on a blue-to-yellow gradient, children appear left-to-right in
/// creation order, and a solving node gets a heavy red outline.
inline std::string export_dot(const RefinementTree& tree) {
    std::string out;
    out += "digraph refinement_tree {\n";
    out += "  rankdir=TB;\n";
    out += "  ordering=out;\n";
    out += "  node [shape=circle, style=filled, fontsize=10];\n";
    for (const ProgramNode& n : tree.nodes()) {
        char buf[160];
        if (n.is_root()) {
            std::snprintf(buf, sizeof(buf),
                          "  n0 [label=\"start\", shape=box, fillcolor=\"#d9d9d9\"];\n");
        } else if (n.heuristic >= 1.0) {
            std::snprintf(buf, sizeof(buf),
                          "  n%lld [label=\"%lld\\nh=%.2f\", fillcolor=\"%s\", color=\"#cc0000\", "
                          "penwidth=3];\n",
                          static_cast<long long>(n.node_id), static_cast<long long>(n.node_id),
                          n.heuristic, detail::heat_color(n.heuristic).c_str());
        } else {
            std::snprintf(buf, sizeof(buf), "  n%lld [label=\"%lld\\nh=%.2f\", fillcolor=\"%s\"];\n",
                          static_cast<long long>(n.node_id), static_cast<long long>(n.node_id),
                          n.heuristic, detail::heat_color(n.heuristic).c_str());
        }
        out += buf;
    }
    for (const ProgramNode& n : tree.nodes()) {
        for (NodeId child : tree.children(n.node_id)) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "  n%lld -> n%lld;\n",
                          static_cast<long long>(n.node_id), static_cast<long long>(child));
            out += buf;
        }
    }
    out += "}\n";
    return out;
}

} // namespace rex
