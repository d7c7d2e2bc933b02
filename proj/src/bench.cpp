#include "kcd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "kcd/kpc.hpp"

namespace kcd {

Dag random_dag(int n, int max_edges, Rng& rng) {
    if (n < 1) throw GraphError("vertex count must be positive");
    long max_possible = static_cast<long>(n) * (n - 1) / 2;
    if (max_edges < 0 || max_edges > max_possible) throw GraphError("edge budget out of range");

    std::vector<int> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    rng.shuffle(order);

    double p = max_possible == 0 ? 0.0 : static_cast<double>(max_edges) / static_cast<double>(max_possible);
    std::vector<std::pair<int, int>> picked;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(p)) picked.emplace_back(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    while (static_cast<int>(picked.size()) > max_edges) {
        size_t idx = static_cast<size_t>(rng.uniform_int(0, static_cast<int>(picked.size()) - 1));
        picked.erase(picked.begin() + static_cast<long>(idx));
    }

    Dag d(n);
    for (auto [p_, c_] : picked) d.add_edge(p_, c_);
    return d;
}

BayesNet random_bayesnet(const Dag& dag, int states, Rng& rng) {
    if (states < 2) throw GraphError("discrete variables need at least two states");
    const int n = dag.vertex_count();
    BayesNet bn{dag, std::vector<int>(static_cast<size_t>(n), states), {}};
    bn.cpt.resize(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) {
        size_t configs = 1;
        for (int p : members(dag.parents(v))) {
            (void)p;
            configs *= static_cast<size_t>(states);
        }
        bn.cpt[static_cast<size_t>(v)].reserve(configs);
        for (size_t c = 0; c < configs; ++c) bn.cpt[static_cast<size_t>(v)].push_back(rng.simplex(states));
    }
    return bn;
}

LinearScm random_linear_scm(const Dag& dag, double coef_lo, double coef_hi, Rng& rng) {
    const int n = dag.vertex_count();
    LinearScm scm{dag, {}};
    scm.coef.resize(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v)
        for (int p : members(dag.parents(v))) {
            (void)p;
            scm.coef[static_cast<size_t>(v)].push_back(rng.uniform(coef_lo, coef_hi));
        }
    return scm;
}

Dataset sample_discrete(const BayesNet& bn, int rows, Rng& rng) {
    const int n = bn.dag.vertex_count();
    auto topo = bn.dag.topological_order();
    Dataset d;
    d.names = bn.dag.vertices().names();
    d.kind = Dataset::Kind::Discrete;
    d.cardinality = bn.cardinality;
    d.rows = rows;
    d.icols.assign(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(rows)));
    std::vector<int> value(static_cast<size_t>(n));
    for (int r = 0; r < rows; ++r) {
        for (int v : topo) {
            size_t config = 0;
            for (int p : members(bn.dag.parents(v)))
                config = config * static_cast<size_t>(bn.cardinality[static_cast<size_t>(p)]) +
                         static_cast<size_t>(value[static_cast<size_t>(p)]);
            const auto& row = bn.cpt[static_cast<size_t>(v)][config];
            double u = rng.next_unit();
            int state = 0;
            double acc = 0.0;
            for (size_t s = 0; s < row.size(); ++s) {
                acc += row[s];
                if (u < acc) {
                    state = static_cast<int>(s);
                    break;
                }
                state = static_cast<int>(row.size()) - 1;
            }
            value[static_cast<size_t>(v)] = state;
            d.icols[static_cast<size_t>(v)][static_cast<size_t>(r)] = state;
        }
    }
    return d;
}

Dataset sample_linear(const LinearScm& scm, int rows, Rng& rng) {
    const int n = scm.dag.vertex_count();
    auto topo = scm.dag.topological_order();
    Dataset d;
    d.names = scm.dag.vertices().names();
    d.kind = Dataset::Kind::Continuous;
    d.rows = rows;
    d.cols.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(rows)));
    std::vector<double> value(static_cast<size_t>(n));
    for (int r = 0; r < rows; ++r) {
        for (int v : topo) {
            double x = rng.normal();
            size_t slot = 0;
            for (int p : members(scm.dag.parents(v)))
                x += scm.coef[static_cast<size_t>(v)][slot++] * value[static_cast<size_t>(p)];
            value[static_cast<size_t>(v)] = x;
            d.cols[static_cast<size_t>(v)][static_cast<size_t>(r)] = x;
        }
    }
    return d;
}

ScoreReport score(const Pmg& pred, const Dag& truth, ScoreReference reference) {
    if (pred.vertices() != truth.vertices()) throw GraphError("vertex sets differ");
    Pmg ref = reference == ScoreReference::TrueDag ? Pmg::from_dag(truth) : cpdag_of(truth);
    const int n = ref.vertex_count();

    ScoreReport report;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            bool in_pred = pred.adjacent(a, b);
            bool in_ref = ref.adjacent(a, b);
            if (in_pred && in_ref)
                ++report.skeleton.tp;
            else if (in_pred)
                ++report.skeleton.fp;
            else if (in_ref)
                ++report.skeleton.fn;

            for (int endpoint = 0; endpoint < 2; ++endpoint) {
                int at = endpoint == 0 ? a : b;
                int other = endpoint == 0 ? b : a;
                bool pred_arrow = in_pred && pred.mark_at(at, other) == Mark::Arrow;
                bool pred_tail = in_pred && pred.mark_at(at, other) == Mark::Tail;
                bool ref_arrow = in_ref && ref.mark_at(at, other) == Mark::Arrow;
                bool ref_tail = in_ref && ref.mark_at(at, other) == Mark::Tail;
                if (pred_arrow && ref_arrow)
                    ++report.arrowhead.tp;
                else if (pred_arrow)
                    ++report.arrowhead.fp;
                else if (ref_arrow)
                    ++report.arrowhead.fn;
                if (pred_tail && ref_tail)
                    ++report.tail.tp;
                else if (pred_tail)
                    ++report.tail.fp;
                else if (ref_tail)
                    ++report.tail.fn;
            }
        }
    }
    return report;
}

void ExperimentConfig::validate() const {
    if (n < 2) throw GraphError("config: n must be at least 2");
    if (max_edges < 0 || max_edges > n * (n - 1) / 2) throw GraphError("config: max_edges out of range");
    if (model != "cpt" && model != "linear") throw GraphError("config: model must be cpt or linear");
    if (sample_sizes.empty()) throw GraphError("config: N list is empty");
    if (repetitions < 0) throw GraphError("config: repetitions must be non-negative");
    if (datasets < 1) throw GraphError("config: datasets must be positive");
    if (!(alpha > 0 && alpha < 1)) throw GraphError("config: alpha must lie in (0, 1)");
    for (const auto& l : learners)
        if (l != "kpc" && l != "pc-stable") throw GraphError("config: unknown learner " + l);
    if (learners.empty()) throw GraphError("config: learner list is empty");
    for (int k : ks)
        if (k < 0) throw GraphError("config: k must be non-negative");
    for (int s : sample_sizes)
        if (s < 1) throw GraphError("config: N must be positive");
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        size_t begin = item.find_first_not_of(" \t");
        size_t end = item.find_last_not_of(" \t");
        if (begin == std::string::npos) continue;
        out.push_back(item.substr(begin, end - begin + 1));
    }
    return out;
}

std::vector<int> split_ints(const std::string& value, const std::string& key) {
    std::vector<int> out;
    for (const auto& item : split_list(value)) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw GraphError("config: bad integer '" + item + "' for " + key);
        }
    }
    return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw GraphError("config line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "n")
                cfg.n = std::stoi(value);
            else if (key == "max_edges")
                cfg.max_edges = std::stoi(value);
            else if (key == "states")
                cfg.states = std::stoi(value);
            else if (key == "model")
                cfg.model = value;
            else if (key == "coef_lo")
                cfg.coef_lo = std::stod(value);
            else if (key == "coef_hi")
                cfg.coef_hi = std::stod(value);
            else if (key == "N")
                cfg.sample_sizes = split_ints(value, key);
            else if (key == "k")
                cfg.ks = split_ints(value, key);
            else if (key == "learners")
                cfg.learners = split_list(value);
            else if (key == "repetitions")
                cfg.repetitions = std::stoi(value);
            else if (key == "datasets")
                cfg.datasets = std::stoi(value);
            else if (key == "seed")
                cfg.seed = std::stoull(value);
            else if (key == "alpha")
                cfg.alpha = std::stod(value);
            else if (key == "reference") {
                if (value == "dag")
                    cfg.reference = ScoreReference::TrueDag;
                else if (value == "essential")
                    cfg.reference = ScoreReference::EssentialGraph;
                else
                    throw GraphError("config: reference must be dag or essential");
            } else {
                throw GraphError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            }
        } catch (const GraphError&) {
            throw;
        } catch (const std::exception&) {
            throw GraphError("config line " + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig read_experiment_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

namespace {

struct LearnerSpec {
    std::string name;
    int k = -1;  // -1: unbounded (pc-stable)
};

std::string format_f1(double v) {
    std::ostringstream out;
    out.precision(6);
    out << std::fixed << v;
    return out.str();
}

// All rows for one (instance, dataset, N) cell.
std::string run_cell(const ExperimentConfig& cfg, const Dag& truth, const Dataset& data, int instance,
                     int dataset_idx, int rows, const std::vector<LearnerSpec>& specs) {
    std::ostringstream out;
    for (const auto& spec : specs) {
        std::string errors;
        ScoreReport report;
        bool failed = false;
        try {
            CiTestConfig test_cfg{cfg.alpha, 0.0};
            std::unique_ptr<CiTester> tester;
            if (cfg.model == "cpt")
                tester = std::make_unique<GSquaredCiTester>(data, test_cfg);
            else
                tester = std::make_unique<FisherZCiTester>(data, test_cfg);

            Pmg learned = [&] {
                if (spec.name == "kpc") {
                    return kpc_learn(*tester, ConditioningBound{spec.k}).graph;
                }
                PcOptions pc;
                pc.max_cond_size = spec.k;
                return pc_stable_learn(*tester, pc).graph;
            }();
            report = score(learned, truth, cfg.reference);
            long degenerate = tester->degenerate_count();
            if (degenerate > 0) errors = "degenerate=" + std::to_string(degenerate);
        } catch (const std::exception& e) {
            errors = std::string("failed: ") + e.what();
            failed = true;
        }
        out << instance << ',' << dataset_idx << ',' << spec.name << ',' << spec.k << ',' << rows << ','
            << format_f1(failed ? 0.0 : report.arrowhead_f1()) << ',' << format_f1(failed ? 0.0 : report.tail_f1())
            << ',' << format_f1(failed ? 0.0 : report.skeleton_f1()) << ',' << errors << '\n';
    }
    return out.str();
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, std::ostream& out, int threads) {
    cfg.validate();
    std::vector<LearnerSpec> specs;
    for (const auto& learner : cfg.learners) {
        if (learner == "kpc")
            for (int k : cfg.ks) specs.push_back({"kpc", k});
        else
            specs.push_back({"pc-stable", -1});
    }

    out << "instance,dataset,learner,k,N,arrowhead_f1,tail_f1,skeleton_f1,errors\n";

    Rng master(cfg.seed);
    std::vector<std::string> chunks(static_cast<size_t>(cfg.repetitions));

    auto run_instance = [&](int instance) {
        Rng inst_rng = master.substream(static_cast<std::uint64_t>(instance));
        Rng model_rng = inst_rng.substream(0);
        Dag truth = random_dag(cfg.n, cfg.max_edges, model_rng);
        BayesNet bn{Dag(1), {}, {}};
        LinearScm scm{Dag(1), {}};
        if (cfg.model == "cpt")
            bn = random_bayesnet(truth, cfg.states, model_rng);
        else
            scm = random_linear_scm(truth, cfg.coef_lo, cfg.coef_hi, model_rng);

        std::ostringstream rows;
        for (int ds = 0; ds < cfg.datasets; ++ds) {
            for (size_t ni = 0; ni < cfg.sample_sizes.size(); ++ni) {
                int rows_n = cfg.sample_sizes[ni];
                Rng data_rng = inst_rng.substream(1 + static_cast<std::uint64_t>(ds) * cfg.sample_sizes.size() + ni);
                Dataset data = cfg.model == "cpt" ? sample_discrete(bn, rows_n, data_rng)
                                                  : sample_linear(scm, rows_n, data_rng);
                rows << run_cell(cfg, truth, data, instance, ds, rows_n, specs);
            }
        }
        chunks[static_cast<size_t>(instance)] = rows.str();
    };

    if (threads <= 1 || cfg.repetitions <= 1) {
        for (int i = 0; i < cfg.repetitions; ++i) run_instance(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        int workers = std::min(threads, cfg.repetitions);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                while (true) {
                    int i = next.fetch_add(1);
                    if (i >= cfg.repetitions) break;
                    run_instance(i);
                }
            });
        for (auto& t : pool) t.join();
    }

    for (const auto& chunk : chunks) out << chunk;
}

}  // namespace kcd
