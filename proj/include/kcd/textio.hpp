#pragma once

#include <iosfwd>
#include <string>

#include "kcd/graph.hpp"

namespace kcd {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Text graph format, one statement per line, '#' starts a comment:
//   nodes: a b c d
//   edge: a -> b
//   edge: a <-> c
//   edge: a o-> c
//   edge: a o-o d
//   edge: a -- d
// Endpoint marks: '-' tail, '<'/'>' arrow, 'o' circle.
Pmg parse_graph(const std::string& text);
Pmg read_graph_file(const std::string& path);

// Canonical form: vertices in declaration order, edges sorted by index pair,
// each edge printed with its lower-index endpoint first.
std::string format_graph(const Pmg& g);
std::string format_graph(const Dag& g);
std::string format_graph(const MixedGraph& g);
void write_graph_file(const Pmg& g, const std::string& path);

std::string edge_glyph(Mark at_a, Mark at_b);

std::string format_dot(const Pmg& g);

// Requires a pure directed graph with no cycles.
Dag parse_dag(const std::string& text);
Dag read_dag_file(const std::string& path);

}  // namespace kcd
