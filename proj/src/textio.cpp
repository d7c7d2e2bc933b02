#include "kcd/textio.hpp"

#include <fstream>
#include <sstream>
#include <utility>

namespace kcd {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

bool parse_glyph(const std::string& glyph, Mark& at_a, Mark& at_b) {
    struct Entry {
        const char* text;
        Mark a, b;
    };
    static const Entry table[] = {
        {"--", Mark::Tail, Mark::Tail},     {"->", Mark::Tail, Mark::Arrow},
        {"<-", Mark::Arrow, Mark::Tail},    {"<->", Mark::Arrow, Mark::Arrow},
        {"o->", Mark::Circle, Mark::Arrow}, {"<-o", Mark::Arrow, Mark::Circle},
        {"o-o", Mark::Circle, Mark::Circle}, {"o--", Mark::Circle, Mark::Tail},
        {"--o", Mark::Tail, Mark::Circle},
    };
    for (const auto& e : table) {
        if (glyph == e.text) {
            at_a = e.a;
            at_b = e.b;
            return true;
        }
    }
    return false;
}

}  // namespace

std::string edge_glyph(Mark at_a, Mark at_b) {
    switch (at_a) {
        case Mark::Tail:
            return at_b == Mark::Tail ? "--" : at_b == Mark::Arrow ? "->" : "--o";
        case Mark::Arrow:
            return at_b == Mark::Tail ? "<-" : at_b == Mark::Arrow ? "<->" : "<-o";
        case Mark::Circle:
            return at_b == Mark::Tail ? "o--" : at_b == Mark::Arrow ? "o->" : "o-o";
    }
    return "--";
}

Pmg parse_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::optional<Pmg> graph;
    while (std::getline(in, line)) {
        ++lineno;
        auto tokens = split_ws(strip_comment(line));
        if (tokens.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (tokens[0] == "nodes:") {
            if (graph) throw ParseError(where + ": duplicate nodes statement");
            try {
                graph.emplace(std::vector<std::string>(tokens.begin() + 1, tokens.end()));
            } catch (const std::runtime_error& e) {
                throw ParseError(where + ": " + e.what());
            }
        } else if (tokens[0] == "edge:") {
            if (!graph) throw ParseError(where + ": edge before nodes statement");
            if (tokens.size() != 4) throw ParseError(where + ": expected 'edge: <a> <glyph> <b>'");
            Mark at_a, at_b;
            if (!parse_glyph(tokens[2], at_a, at_b)) throw ParseError(where + ": unknown edge glyph '" + tokens[2] + "'");
            try {
                int a = graph->vertices().require(tokens[1]);
                int b = graph->vertices().require(tokens[3]);
                graph->add_edge(a, b, at_a, at_b);
            } catch (const std::runtime_error& e) {
                throw ParseError(where + ": " + e.what());
            }
        } else {
            throw ParseError(where + ": unknown statement '" + tokens[0] + "'");
        }
    }
    if (!graph) throw ParseError("no nodes statement found");
    return std::move(*graph);
}

Pmg read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

std::string format_graph(const Pmg& g) {
    std::ostringstream out;
    out << "nodes:";
    for (const auto& name : g.vertices().names()) out << ' ' << name;
    out << '\n';
    for (const auto& e : g.edges())
        out << "edge: " << g.vertices().name(e.a) << ' ' << edge_glyph(e.at_a, e.at_b) << ' '
            << g.vertices().name(e.b) << '\n';
    return out.str();
}

std::string format_graph(const Dag& g) { return format_graph(Pmg::from_dag(g)); }
std::string format_graph(const MixedGraph& g) { return format_graph(Pmg::from_mixed(g)); }

void write_graph_file(const Pmg& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << format_graph(g);
}

std::string format_dot(const Pmg& g) {
    // Semantics-free rendering: arrowheads become "normal", tails "none",
    // circles "odot".
    auto arrow = [](Mark m) {
        switch (m) {
            case Mark::Tail: return "none";
            case Mark::Arrow: return "normal";
            case Mark::Circle: return "odot";
        }
        return "none";
    };
    std::ostringstream out;
    out << "graph g {\n";
    for (const auto& name : g.vertices().names()) out << "  \"" << name << "\";\n";
    for (const auto& e : g.edges())
        out << "  \"" << g.vertices().name(e.a) << "\" -- \"" << g.vertices().name(e.b)
            << "\" [arrowtail=" << arrow(e.at_a) << ", arrowhead=" << arrow(e.at_b) << ", dir=both];\n";
    out << "}\n";
    return out.str();
}

Dag parse_dag(const std::string& text) {
    Pmg g = parse_graph(text);
    Dag d = [&] {
        try {
            return g.to_dag();
        } catch (const GraphError& e) {
            throw ParseError(std::string("not a directed graph: ") + e.what());
        }
    }();
    if (!d.is_acyclic()) throw ParseError("graph has a directed cycle");
    return d;
}

Dag read_dag_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dag(buf.str());
}

}  // namespace kcd
