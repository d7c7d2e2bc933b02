// kcd command line tool. Talks to the library exclusively through the C API.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "kcd.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

int exit_code_for(kcd_status status) {
    switch (status) {
        case KCD_OK: return kExitOk;
        case KCD_ERR_ARG:
        case KCD_ERR_FORMAT:
        case KCD_ERR_LIMIT: return kExitInput;
        case KCD_ERR_INTERNAL: return kExitInternal;
    }
    return kExitInternal;
}

const char* category_for(kcd_status status) {
    switch (status) {
        case KCD_OK: return "ok";
        case KCD_ERR_ARG: return "argument";
        case KCD_ERR_FORMAT: return "format";
        case KCD_ERR_LIMIT: return "limit";
        case KCD_ERR_INTERNAL: return "internal";
    }
    return "internal";
}

// Prints "error: <category>: <message>" on stderr and returns the exit code.
int report(kcd_status status) {
    if (status == KCD_OK) return kExitOk;
    std::fprintf(stderr, "error: %s: %s\n", category_for(status), kcd_last_error());
    return exit_code_for(status);
}

struct GraphHandle {
    kcd_graph* g = nullptr;
    ~GraphHandle() { kcd_graph_free(g); }
};

struct TextHandle {
    char* text = nullptr;
    ~TextHandle() { kcd_text_free(text); }
};

struct DatasetHandle {
    kcd_dataset* d = nullptr;
    ~DatasetHandle() { kcd_dataset_free(d); }
};

// Writes a result graph to --out (or stdout) and optionally to --dot.
int emit_graph(const kcd_graph* g, const std::string& out_path, const std::string& dot_path) {
    if (out_path.empty()) {
        TextHandle text;
        if (kcd_status s = kcd_graph_format(g, &text.text)) return report(s);
        std::fputs(text.text, stdout);
    } else {
        if (kcd_status s = kcd_graph_write_file(g, out_path.c_str())) return report(s);
    }
    if (!dot_path.empty()) {
        TextHandle dot;
        if (kcd_status s = kcd_graph_to_dot(g, &dot.text)) return report(s);
        std::FILE* f = std::fopen(dot_path.c_str(), "w");
        if (!f) {
            std::fprintf(stderr, "error: format: cannot write %s\n", dot_path.c_str());
            return kExitInput;
        }
        std::fputs(dot.text, f);
        std::fclose(f);
    }
    return kExitOk;
}

int default_threads() {
    if (const char* env = std::getenv("KCD_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal discovery with bounded-size conditioning sets"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kcd_version()));

    // closure
    auto* closure_cmd = app.add_subcommand("closure", "construct the k-closure of a DAG");
    int closure_k = 0;
    std::string closure_in, closure_out, closure_dot;
    closure_cmd->add_option("--k", closure_k, "conditioning set bound")->required();
    closure_cmd->add_option("--in", closure_in, "input DAG file")->required();
    closure_cmd->add_option("--out", closure_out, "output graph file (stdout when absent)");
    closure_cmd->add_option("--dot", closure_dot, "also write a DOT rendering");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "check a graph against the k-closure conditions");
    int validate_k = 0;
    std::string validate_in;
    validate_cmd->add_option("--k", validate_k, "conditioning set bound")->required();
    validate_cmd->add_option("graph", validate_in, "mixed graph file")->required();

    // equiv
    auto* equiv_cmd = app.add_subcommand("equiv", "decide k-Markov equivalence of two DAGs");
    int equiv_k = 0;
    std::string equiv_a, equiv_b;
    equiv_cmd->add_option("--k", equiv_k, "conditioning set bound")->required();
    equiv_cmd->add_option("dag1", equiv_a, "first DAG file")->required();
    equiv_cmd->add_option("dag2", equiv_b, "second DAG file")->required();

    // essential
    auto* essential_cmd = app.add_subcommand("essential", "k-essential graph by enumeration");
    int essential_k = 0, essential_cap = 0;
    std::string essential_in, essential_out, essential_dot;
    essential_cmd->add_option("--k", essential_k, "conditioning set bound")->required();
    essential_cmd->add_option("--in", essential_in, "input DAG file")->required();
    essential_cmd->add_option("--out", essential_out, "output graph file (stdout when absent)");
    essential_cmd->add_option("--max-n", essential_cap, "vertex cap for the enumeration (default 5, hard cap 6)");
    essential_cmd->add_option("--dot", essential_dot, "also write a DOT rendering");

    // pag
    auto* pag_cmd = app.add_subcommand("pag", "partial ancestral graph of a MAG by orientation sweep");
    int pag_budget = 0;
    std::string pag_in, pag_out, pag_dot;
    pag_cmd->add_option("--in", pag_in, "input mixed graph file")->required();
    pag_cmd->add_option("--out", pag_out, "output graph file (stdout when absent)");
    pag_cmd->add_option("--max-edges", pag_budget, "edge cap for the 3^|E| sweep (default 10)");
    pag_cmd->add_option("--dot", pag_dot, "also write a DOT rendering");

    // learn
    auto* learn_cmd = app.add_subcommand("learn", "run the bounded-conditioning learner");
    int learn_k = 0;
    std::string learn_in, learn_out, learn_dot, learn_trace;
    std::string learn_backend = "oracle", learn_scope = "all", learn_step5 = "single";
    double learn_alpha = 0.05;
    learn_cmd->add_option("--k", learn_k, "conditioning set bound")->required();
    learn_cmd->add_option("--in", learn_in, "truth graph file (oracle) or dataset CSV (gsq/fisherz)")->required();
    learn_cmd->add_option("--out", learn_out, "output graph file (stdout when absent)");
    learn_cmd->add_option("--ci-backend", learn_backend, "oracle | gsq | fisherz")
        ->check(CLI::IsMember({"oracle", "gsq", "fisherz"}));
    learn_cmd->add_option("--alpha", learn_alpha, "significance level for data backends");
    learn_cmd->add_option("--scope", learn_scope, "sepset search scope: all | neighbors")
        ->check(CLI::IsMember({"all", "neighbors"}));
    learn_cmd->add_option("--step5", learn_step5, "tail rules: single | fixpoint | off")
        ->check(CLI::IsMember({"single", "fixpoint", "off"}));
    learn_cmd->add_option("--trace", learn_trace, "write applied orientations as JSON lines");
    learn_cmd->add_option("--dot", learn_dot, "also write a DOT rendering");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "forward-sample a random model on a DAG");
    std::string sim_in, sim_out, sim_model = "cpt";
    int sim_states = 2, sim_rows = 1000;
    std::uint64_t sim_seed = 0;
    double sim_coef_lo = -3.0, sim_coef_hi = 3.0;
    sim_cmd->add_option("--in", sim_in, "DAG file")->required();
    sim_cmd->add_option("--out", sim_out, "output CSV path")->required();
    sim_cmd->add_option("--model", sim_model, "cpt | linear")->check(CLI::IsMember({"cpt", "linear"}));
    sim_cmd->add_option("--states", sim_states, "discrete cardinality (cpt model)");
    sim_cmd->add_option("--rows", sim_rows, "sample count")->required();
    sim_cmd->add_option("--seed", sim_seed, "random seed");
    sim_cmd->add_option("--coef-lo", sim_coef_lo, "linear coefficient range low end");
    sim_cmd->add_option("--coef-hi", sim_coef_hi, "linear coefficient range high end");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "run a benchmark experiment from a config file");
    std::string bench_config, bench_out;
    int bench_threads = default_threads();
    bench_cmd->add_option("--config", bench_config, "experiment config file")->required();
    bench_cmd->add_option("--out", bench_out, "output CSV path")->required();
    bench_cmd->add_option("--threads", bench_threads, "worker count (default: KCD_THREADS or logical cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::fprintf(stderr, "error: usage: %s\n", e.what());
        return kExitUsage;
    }

    if (closure_cmd->parsed()) {
        GraphHandle in, out;
        if (kcd_status s = kcd_graph_read_file(closure_in.c_str(), &in.g)) return report(s);
        if (kcd_status s = kcd_closure(in.g, closure_k, &out.g)) return report(s);
        return emit_graph(out.g, closure_out, closure_dot);
    }

    if (validate_cmd->parsed()) {
        GraphHandle in;
        if (kcd_status s = kcd_graph_read_file(validate_in.c_str(), &in.g)) return report(s);
        int valid = 0;
        TextHandle reason;
        if (kcd_status s = kcd_validate_closure(in.g, validate_k, &valid, &reason.text)) return report(s);
        if (valid)
            std::printf("valid: true\n");
        else
            std::printf("valid: false, reason: %s\n", reason.text);
        return kExitOk;
    }

    if (equiv_cmd->parsed()) {
        GraphHandle a, b;
        if (kcd_status s = kcd_graph_read_file(equiv_a.c_str(), &a.g)) return report(s);
        if (kcd_status s = kcd_graph_read_file(equiv_b.c_str(), &b.g)) return report(s);
        int eq = 0;
        if (kcd_status s = kcd_k_markov_equivalent(a.g, b.g, equiv_k, &eq)) return report(s);
        std::printf("k-markov-equivalent: %s\n", eq ? "true" : "false");
        return kExitOk;
    }

    if (essential_cmd->parsed()) {
        GraphHandle in, out;
        if (kcd_status s = kcd_graph_read_file(essential_in.c_str(), &in.g)) return report(s);
        if (kcd_status s = kcd_k_essential(in.g, essential_k, essential_cap, &out.g)) return report(s);
        return emit_graph(out.g, essential_out, essential_dot);
    }

    if (pag_cmd->parsed()) {
        GraphHandle in, out;
        if (kcd_status s = kcd_graph_read_file(pag_in.c_str(), &in.g)) return report(s);
        if (kcd_status s = kcd_pag(in.g, pag_budget, &out.g)) return report(s);
        return emit_graph(out.g, pag_out, pag_dot);
    }

    if (learn_cmd->parsed()) {
        kcd_learn_options opts = kcd_learn_options_default();
        opts.alpha = learn_alpha;
        opts.ci_backend = learn_backend == "oracle" ? KCD_CI_ORACLE
                          : learn_backend == "gsq"  ? KCD_CI_GSQ
                                                    : KCD_CI_FISHERZ;
        opts.scope = learn_scope == "all" ? KCD_SCOPE_ALL : KCD_SCOPE_NEIGHBORS;
        opts.step5 = learn_step5 == "single"     ? KCD_STEP5_SINGLE
                     : learn_step5 == "fixpoint" ? KCD_STEP5_FIXPOINT
                                                 : KCD_STEP5_OFF;

        GraphHandle out;
        TextHandle trace;
        char** trace_slot = learn_trace.empty() ? nullptr : &trace.text;
        if (opts.ci_backend == KCD_CI_ORACLE) {
            GraphHandle truth;
            if (kcd_status s = kcd_graph_read_file(learn_in.c_str(), &truth.g)) return report(s);
            if (kcd_status s = kcd_learn_oracle(truth.g, learn_k, &opts, &out.g, trace_slot)) return report(s);
        } else {
            DatasetHandle data;
            if (kcd_status s = kcd_dataset_read_csv(learn_in.c_str(), &data.d)) return report(s);
            if (kcd_status s = kcd_learn_data(data.d, learn_k, &opts, &out.g, trace_slot)) return report(s);
        }
        if (!learn_trace.empty()) {
            std::FILE* f = std::fopen(learn_trace.c_str(), "w");
            if (!f) {
                std::fprintf(stderr, "error: format: cannot write %s\n", learn_trace.c_str());
                return kExitInput;
            }
            std::fputs(trace.text, f);
            std::fclose(f);
        }
        return emit_graph(out.g, learn_out, learn_dot);
    }

    if (sim_cmd->parsed()) {
        GraphHandle in;
        if (kcd_status s = kcd_graph_read_file(sim_in.c_str(), &in.g)) return report(s);
        kcd_simulate_options opts = kcd_simulate_options_default();
        opts.model = sim_model == "cpt" ? KCD_MODEL_CPT : KCD_MODEL_LINEAR;
        opts.states = sim_states;
        opts.rows = sim_rows;
        opts.seed = sim_seed;
        opts.coef_lo = sim_coef_lo;
        opts.coef_hi = sim_coef_hi;
        return report(kcd_simulate(in.g, &opts, sim_out.c_str()));
    }

    if (bench_cmd->parsed())
        return report(kcd_run_experiment(bench_config.c_str(), bench_out.c_str(), bench_threads));

    return kExitUsage;
}
