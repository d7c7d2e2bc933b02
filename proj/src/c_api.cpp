#include "kcd.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "kcd/bench.hpp"
#include "kcd/closure.hpp"
#include "kcd/enumeration.hpp"
#include "kcd/graph.hpp"
#include "kcd/kpc.hpp"
#include "kcd/textio.hpp"

struct kcd_graph {
    kcd::Pmg graph;
};

struct kcd_dataset {
    kcd::Dataset data;
};

namespace {

thread_local std::string g_last_error;

char* dup_text(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

kcd_status fail(kcd_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

// Maps the library's exception taxonomy onto status codes.
template <typename Fn>
kcd_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const kcd::ParseError& e) {
        return fail(KCD_ERR_FORMAT, e.what());
    } catch (const kcd::LimitError& e) {
        return fail(KCD_ERR_LIMIT, e.what());
    } catch (const kcd::GraphError& e) {
        return fail(KCD_ERR_ARG, e.what());
    } catch (const kcd::CiError& e) {
        return fail(KCD_ERR_ARG, e.what());
    } catch (const std::bad_alloc&) {
        return fail(KCD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(KCD_ERR_INTERNAL, e.what());
    }
}

kcd_status require(bool ok, const char* message) { return ok ? KCD_OK : fail(KCD_ERR_ARG, message); }

kcd::Dag dag_of(const kcd_graph* g) {
    if (!g->graph.is_dag()) throw kcd::GraphError("input must be a directed acyclic graph");
    return g->graph.to_dag();
}

std::string trace_to_jsonl(const std::vector<kcd::RuleEvent>& trace, const kcd::VertexTable& names) {
    std::string out;
    for (const auto& ev : trace) {
        nlohmann::json j;
        j["rule"] = ev.rule;
        j["at"] = names.name(ev.at);
        j["other"] = names.name(ev.other);
        j["mark"] = kcd::mark_name(ev.mark);
        nlohmann::json w = nlohmann::json::array();
        for (int v : ev.witness) w.push_back(names.name(v));
        j["witness"] = std::move(w);
        out += j.dump();
        out += '\n';
    }
    return out;
}

kcd::KpcOptions learn_options(const kcd_learn_options* options) {
    kcd::KpcOptions opts;
    if (!options) return opts;
    switch (options->step5) {
        case KCD_STEP5_SINGLE: opts.step5 = kcd::Step5Mode::SinglePass; break;
        case KCD_STEP5_FIXPOINT: opts.step5 = kcd::Step5Mode::Fixpoint; break;
        case KCD_STEP5_OFF: opts.step5 = kcd::Step5Mode::Off; break;
        default: throw kcd::GraphError("unknown step5 mode");
    }
    switch (options->scope) {
        case KCD_SCOPE_ALL: opts.scope = kcd::SearchScope::AllSubsets; break;
        case KCD_SCOPE_NEIGHBORS: opts.scope = kcd::SearchScope::NeighborSubsets; break;
        default: throw kcd::GraphError("unknown search scope");
    }
    opts.collider_conflict =
        options->collider_overwrite ? kcd::ColliderConflict::Overwrite : kcd::ColliderConflict::FirstWins;
    return opts;
}

}  // namespace

extern "C" {

const char* kcd_version(void) { return "0.1.0"; }

const char* kcd_last_error(void) { return g_last_error.c_str(); }

void kcd_text_free(char* text) { std::free(text); }
void kcd_graph_free(kcd_graph* g) { delete g; }
void kcd_dataset_free(kcd_dataset* d) { delete d; }

kcd_status kcd_graph_parse(const char* text, kcd_graph** out) {
    if (kcd_status s = require(text && out, "null argument")) return s;
    return guarded([&] {
        *out = new kcd_graph{kcd::parse_graph(text)};
        return KCD_OK;
    });
}

kcd_status kcd_graph_read_file(const char* path, kcd_graph** out) {
    if (kcd_status s = require(path && out, "null argument")) return s;
    return guarded([&] {
        *out = new kcd_graph{kcd::read_graph_file(path)};
        return KCD_OK;
    });
}

kcd_status kcd_graph_format(const kcd_graph* g, char** text_out) {
    if (kcd_status s = require(g && text_out, "null argument")) return s;
    return guarded([&] {
        *text_out = dup_text(kcd::format_graph(g->graph));
        return *text_out ? KCD_OK : fail(KCD_ERR_INTERNAL, "out of memory");
    });
}

kcd_status kcd_graph_write_file(const kcd_graph* g, const char* path) {
    if (kcd_status s = require(g && path, "null argument")) return s;
    return guarded([&] {
        kcd::write_graph_file(g->graph, path);
        return KCD_OK;
    });
}

kcd_status kcd_graph_to_dot(const kcd_graph* g, char** text_out) {
    if (kcd_status s = require(g && text_out, "null argument")) return s;
    return guarded([&] {
        *text_out = dup_text(kcd::format_dot(g->graph));
        return *text_out ? KCD_OK : fail(KCD_ERR_INTERNAL, "out of memory");
    });
}

int kcd_graph_vertex_count(const kcd_graph* g) { return g ? g->graph.vertex_count() : 0; }
int kcd_graph_edge_count(const kcd_graph* g) { return g ? g->graph.edge_count() : 0; }

kcd_status kcd_closure(const kcd_graph* dag, int k, kcd_graph** out) {
    if (kcd_status s = require(dag && out && k >= 0, "null argument or negative k")) return s;
    return guarded([&] {
        kcd::KClosure c = kcd::construct_k_closure(dag_of(dag), kcd::ConditioningBound{k});
        *out = new kcd_graph{kcd::Pmg::from_mixed(c.graph)};
        return KCD_OK;
    });
}

kcd_status kcd_validate_closure(const kcd_graph* g, int k, int* valid_out, char** reason_out) {
    if (kcd_status s = require(g && valid_out && k >= 0, "null argument or negative k")) return s;
    return guarded([&] {
        kcd::MixedGraph mixed = [&] {
            try {
                return g->graph.to_mixed();
            } catch (const kcd::GraphError& e) {
                throw kcd::GraphError(std::string("not a mixed graph: ") + e.what());
            }
        }();
        kcd::ClosureValidation v = kcd::validate_k_closure(mixed, kcd::ConditioningBound{k});
        *valid_out = v.valid ? 1 : 0;
        if (reason_out) {
            *reason_out = dup_text(v.describe(mixed.vertices()));
            if (!*reason_out) return fail(KCD_ERR_INTERNAL, "out of memory");
        }
        return KCD_OK;
    });
}

kcd_status kcd_k_markov_equivalent(const kcd_graph* dag1, const kcd_graph* dag2, int k, int* equivalent_out) {
    if (kcd_status s = require(dag1 && dag2 && equivalent_out && k >= 0, "null argument or negative k")) return s;
    return guarded([&] {
        *equivalent_out = kcd::k_markov_equivalent(dag_of(dag1), dag_of(dag2), kcd::ConditioningBound{k}) ? 1 : 0;
        return KCD_OK;
    });
}

kcd_status kcd_k_essential(const kcd_graph* dag, int k, int max_vertices, kcd_graph** out) {
    if (kcd_status s = require(dag && out && k >= 0, "null argument or negative k")) return s;
    return guarded([&] {
        kcd::EssentialOracleOptions opts;
        if (max_vertices > 0) opts.cap = max_vertices;
        *out = new kcd_graph{kcd::k_essential_oracle(dag_of(dag), kcd::ConditioningBound{k}, opts)};
        return KCD_OK;
    });
}

kcd_status kcd_pag(const kcd_graph* mag, int max_edges, kcd_graph** out) {
    if (kcd_status s = require(mag && out, "null argument")) return s;
    return guarded([&] {
        kcd::MixedGraph mixed = [&] {
            try {
                return mag->graph.to_mixed();
            } catch (const kcd::GraphError& e) {
                throw kcd::GraphError(std::string("not a mixed graph: ") + e.what());
            }
        }();
        kcd::PagOracleOptions opts;
        if (max_edges > 0) opts.max_edges = max_edges;
        *out = new kcd_graph{kcd::pag_oracle(mixed, opts)};
        return KCD_OK;
    });
}

kcd_learn_options kcd_learn_options_default(void) {
    kcd_learn_options o;
    o.alpha = 0.05;
    o.ci_backend = KCD_CI_ORACLE;
    o.scope = KCD_SCOPE_ALL;
    o.step5 = KCD_STEP5_SINGLE;
    o.collider_overwrite = 0;
    return o;
}

kcd_status kcd_learn_oracle(const kcd_graph* truth_dag, int k, const kcd_learn_options* options,
                            kcd_graph** out, char** trace_out) {
    if (kcd_status s = require(truth_dag && out && k >= 0, "null argument or negative k")) return s;
    return guarded([&] {
        kcd::KpcOptions opts = learn_options(options);
        opts.record_trace = trace_out != nullptr;
        kcd::OracleCiTester tester(dag_of(truth_dag));
        kcd::LearnerResult result = kcd::kpc_learn(tester, kcd::ConditioningBound{k}, opts);
        if (trace_out) {
            *trace_out = dup_text(trace_to_jsonl(result.trace, result.graph.vertices()));
            if (!*trace_out) return fail(KCD_ERR_INTERNAL, "out of memory");
        }
        *out = new kcd_graph{std::move(result.graph)};
        return KCD_OK;
    });
}

kcd_status kcd_learn_data(const kcd_dataset* data, int k, const kcd_learn_options* options,
                          kcd_graph** out, char** trace_out) {
    if (kcd_status s = require(data && out && k >= 0, "null argument or negative k")) return s;
    return guarded([&] {
        kcd_learn_options defaults = kcd_learn_options_default();
        const kcd_learn_options* opt = options ? options : &defaults;
        kcd::KpcOptions opts = learn_options(opt);
        opts.record_trace = trace_out != nullptr;

        kcd::CiTestConfig test_cfg;
        test_cfg.alpha = opt->alpha;
        std::unique_ptr<kcd::CiTester> tester;
        switch (opt->ci_backend) {
            case KCD_CI_GSQ: tester = std::make_unique<kcd::GSquaredCiTester>(data->data, test_cfg); break;
            case KCD_CI_FISHERZ: tester = std::make_unique<kcd::FisherZCiTester>(data->data, test_cfg); break;
            case KCD_CI_ORACLE: throw kcd::GraphError("oracle backend needs a truth graph, not a dataset");
            default: throw kcd::GraphError("unknown ci backend");
        }
        kcd::LearnerResult result = kcd::kpc_learn(*tester, kcd::ConditioningBound{k}, opts);
        if (trace_out) {
            *trace_out = dup_text(trace_to_jsonl(result.trace, result.graph.vertices()));
            if (!*trace_out) return fail(KCD_ERR_INTERNAL, "out of memory");
        }
        *out = new kcd_graph{std::move(result.graph)};
        return KCD_OK;
    });
}

kcd_status kcd_dataset_read_csv(const char* path, kcd_dataset** out) {
    if (kcd_status s = require(path && out, "null argument")) return s;
    return guarded([&] {
        *out = new kcd_dataset{kcd::read_csv_file(path)};
        return KCD_OK;
    });
}

int kcd_dataset_rows(const kcd_dataset* d) { return d ? d->data.rows : 0; }
int kcd_dataset_columns(const kcd_dataset* d) { return d ? d->data.variable_count() : 0; }
int kcd_dataset_is_discrete(const kcd_dataset* d) {
    return d && d->data.kind == kcd::Dataset::Kind::Discrete ? 1 : 0;
}

kcd_simulate_options kcd_simulate_options_default(void) {
    kcd_simulate_options o;
    o.model = KCD_MODEL_CPT;
    o.states = 2;
    o.coef_lo = -3.0;
    o.coef_hi = 3.0;
    o.rows = 1000;
    o.seed = 0;
    return o;
}

kcd_status kcd_simulate(const kcd_graph* dag, const kcd_simulate_options* options, const char* csv_path) {
    if (kcd_status s = require(dag && csv_path, "null argument")) return s;
    return guarded([&] {
        kcd_simulate_options defaults = kcd_simulate_options_default();
        const kcd_simulate_options* opt = options ? options : &defaults;
        if (opt->rows < 0) throw kcd::GraphError("row count must be non-negative");
        kcd::Dag d = dag_of(dag);
        kcd::Rng rng(opt->seed);
        kcd::Dataset data = [&] {
            if (opt->model == KCD_MODEL_CPT) {
                kcd::BayesNet bn = kcd::random_bayesnet(d, opt->states, rng);
                return kcd::sample_discrete(bn, opt->rows, rng);
            }
            if (opt->model == KCD_MODEL_LINEAR) {
                kcd::LinearScm scm = kcd::random_linear_scm(d, opt->coef_lo, opt->coef_hi, rng);
                return kcd::sample_linear(scm, opt->rows, rng);
            }
            throw kcd::GraphError("unknown simulation model");
        }();
        std::ofstream f(csv_path);
        if (!f) throw kcd::ParseError(std::string("cannot write ") + csv_path);
        f << kcd::format_csv(data);
        return KCD_OK;
    });
}

kcd_status kcd_run_experiment(const char* config_path, const char* csv_path, int threads) {
    if (kcd_status s = require(config_path && csv_path, "null argument")) return s;
    return guarded([&] {
        kcd::ExperimentConfig cfg = kcd::read_experiment_config_file(config_path);
        std::ofstream f(csv_path);
        if (!f) throw kcd::ParseError(std::string("cannot write ") + csv_path);
        kcd::run_experiment(cfg, f, threads < 1 ? 1 : threads);
        return KCD_OK;
    });
}

}  // extern "C"
