#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kcd/citest.hpp"
#include "kcd/graph.hpp"
#include "kcd/rng.hpp"

namespace kcd {

// Discrete model: per vertex, one categorical row per parent configuration.
struct BayesNet {
    Dag dag;
    std::vector<int> cardinality;
    // cpt[v][config][state]; parent configurations are mixed-radix over the
    // parents in ascending index order.
    std::vector<std::vector<std::vector<double>>> cpt;
};

struct LinearScm {
    Dag dag;
    // coef[v] aligned with the parents of v in ascending index order; unit
    // Gaussian noise per vertex.
    std::vector<std::vector<double>> coef;
};

// Uniform topological order; forward edges kept with probability tuned to the
// expected edge budget, then truncated to max_edges by random removal.
Dag random_dag(int n, int max_edges, Rng& rng);

// Each CPT row drawn uniformly from the probability simplex.
BayesNet random_bayesnet(const Dag& dag, int states, Rng& rng);

LinearScm random_linear_scm(const Dag& dag, double coef_lo, double coef_hi, Rng& rng);

Dataset sample_discrete(const BayesNet& bn, int rows, Rng& rng);
Dataset sample_linear(const LinearScm& scm, int rows, Rng& rng);

enum class ScoreReference { TrueDag, EssentialGraph };

struct ScoreCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;

    double f1() const {
        long denom = 2 * tp + fp + fn;
        return denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    }
};

struct ScoreReport {
    ScoreCounts arrowhead;
    ScoreCounts tail;
    ScoreCounts skeleton;

    double arrowhead_f1() const { return arrowhead.f1(); }
    double tail_f1() const { return tail.f1(); }
    double skeleton_f1() const { return skeleton.f1(); }
};

// Endpoint-mark F1 against the true DAG or its essential graph. Circle marks
// never count as predictions; reference marks missing from the prediction
// (including whole missing edges) count as false negatives.
ScoreReport score(const Pmg& pred, const Dag& truth, ScoreReference reference);

struct ExperimentConfig {
    int n = 10;
    int max_edges = 15;
    int states = 2;
    std::string model = "cpt";  // cpt | linear
    double coef_lo = -3.0;
    double coef_hi = 3.0;
    std::vector<int> sample_sizes = {50};
    std::vector<int> ks = {1};
    std::vector<std::string> learners = {"kpc", "pc-stable"};
    int repetitions = 100;
    int datasets = 3;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    ScoreReference reference = ScoreReference::EssentialGraph;

    void validate() const;
};

// key=value lines, '#' comments. Lists are comma separated.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig read_experiment_config_file(const std::string& path);

// One CSV row per (instance, dataset, learner-config, N); deterministic in
// (config, seed) regardless of thread count.
void run_experiment(const ExperimentConfig& config, std::ostream& out, int threads = 1);

}  // namespace kcd
