#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "kcd/graph.hpp"
#include "kcd/separation.hpp"

namespace kcd {

class CiError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Column-oriented sample matrix. Discrete columns hold integer codes in
// [0, cardinality); continuous columns hold reals.
struct Dataset {
    enum class Kind { Discrete, Continuous };

    std::vector<std::string> names;
    Kind kind = Kind::Discrete;
    std::vector<std::vector<int>> icols;
    std::vector<std::vector<double>> cols;
    std::vector<int> cardinality;
    int rows = 0;

    int variable_count() const { return static_cast<int>(names.size()); }
};

// CSV with a header row of variable names. Discrete files carry integer
// codes, continuous files decimals; kind is inferred unless forced.
Dataset read_csv(const std::string& text);
Dataset read_csv_file(const std::string& path);
std::string format_csv(const Dataset& d);

struct CiVerdict {
    bool independent = false;
    double statistic = 0.0;
    double p_value = 0.0;
    bool degenerate = false;  // independent-by-convention
};

struct CiTestConfig {
    double alpha = 0.05;
    double min_cell_expectation = 0.0;  // strata below this expected-count floor are dropped

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw CiError("alpha must lie in (0, 1)");
    }
};

class CiTester {
public:
    virtual ~CiTester() = default;
    virtual int variable_count() const = 0;
    virtual const std::vector<std::string>& variable_names() const = 0;
    // cond must exclude a and b.
    virtual CiVerdict test(int a, int b, VertexSet cond) = 0;
    // Number of independent-by-convention verdicts issued so far.
    virtual long degenerate_count() const { return 0; }
};

// Ground-truth backend: independent iff d-separated in the supplied DAG.
// p-value degenerates to 0/1.
class OracleCiTester : public CiTester {
public:
    explicit OracleCiTester(Dag truth);
    int variable_count() const override { return truth_.vertex_count(); }
    const std::vector<std::string>& variable_names() const override { return truth_.vertices().names(); }
    CiVerdict test(int a, int b, VertexSet cond) override;
    const Dag& truth() const { return truth_; }

private:
    Dag truth_;
};

// Likelihood-ratio test on discrete data, stratified by the conditioning
// configuration. dof = (|A|-1)(|B|-1) * #nonempty strata.
class GSquaredCiTester : public CiTester {
public:
    GSquaredCiTester(const Dataset& data, CiTestConfig config = {});
    int variable_count() const override { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& variable_names() const override { return names_; }
    CiVerdict test(int a, int b, VertexSet cond) override;
    long degenerate_count() const override { return degenerate_; }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<int>> cols_;
    std::vector<int> card_;
    int rows_;
    CiTestConfig config_;
    std::unordered_map<std::uint64_t, std::unordered_map<std::uint64_t, CiVerdict>> cache_;
    long degenerate_ = 0;
};

// Partial correlation via correlation-matrix inversion, Fisher z transform,
// two-sided normal tail.
class FisherZCiTester : public CiTester {
public:
    FisherZCiTester(const Dataset& data, CiTestConfig config = {});
    int variable_count() const override { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& variable_names() const override { return names_; }
    CiVerdict test(int a, int b, VertexSet cond) override;
    long degenerate_count() const override { return degenerate_; }

private:
    std::vector<std::string> names_;
    std::vector<double> corr_;  // full correlation matrix, row major
    std::vector<bool> constant_;
    int rows_;
    CiTestConfig config_;
    std::unordered_map<std::uint64_t, std::unordered_map<std::uint64_t, CiVerdict>> cache_;
    long degenerate_ = 0;
};

// Forwards to another tester while recording query counts; used to audit the
// conditioning-set budget.
class CountingCiTester : public CiTester {
public:
    explicit CountingCiTester(CiTester& inner) : inner_(inner) {}
    int variable_count() const override { return inner_.variable_count(); }
    const std::vector<std::string>& variable_names() const override { return inner_.variable_names(); }
    CiVerdict test(int a, int b, VertexSet cond) override {
        ++queries_;
        int size = vs_size(cond);
        if (size > max_cond_) max_cond_ = size;
        return inner_.test(a, b, cond);
    }
    long degenerate_count() const override { return inner_.degenerate_count(); }

    long queries() const { return queries_; }
    int max_cond_size() const { return max_cond_; }

private:
    CiTester& inner_;
    long queries_ = 0;
    int max_cond_ = 0;
};

}  // namespace kcd
