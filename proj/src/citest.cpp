#include "kcd/citest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kcd/mathutil.hpp"

namespace kcd {

namespace {

std::uint64_t pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

void check_vars(int n, int a, int b, VertexSet cond) {
    if (a < 0 || a >= n || b < 0 || b >= n) throw CiError("variable index out of range");
    if (a == b) throw CiError("test variables must differ");
    if (vs_contains(cond, a) || vs_contains(cond, b)) throw CiError("conditioning set must exclude the tested pair");
    if (cond & ~vs_all(n)) throw CiError("conditioning set out of range");
}

}  // namespace

Dataset read_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw CiError("empty csv");
    Dataset d;
    {
        std::istringstream header(line);
        std::string field;
        while (std::getline(header, field, ',')) {
            if (field.empty()) throw CiError("empty column name in csv header");
            d.names.push_back(field);
        }
    }
    const size_t ncols = d.names.size();
    std::vector<std::vector<double>> raw(ncols);
    bool integral = true;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        size_t col = 0;
        while (std::getline(row, field, ',')) {
            if (col >= ncols) throw CiError("line " + std::to_string(lineno) + ": too many fields");
            size_t used = 0;
            double v;
            try {
                v = std::stod(field, &used);
            } catch (const std::exception&) {
                throw CiError("line " + std::to_string(lineno) + ": bad number '" + field + "'");
            }
            if (used != field.size()) throw CiError("line " + std::to_string(lineno) + ": bad number '" + field + "'");
            if (v != std::floor(v) || field.find('.') != std::string::npos || field.find('e') != std::string::npos ||
                field.find('E') != std::string::npos)
                integral = false;
            raw[col].push_back(v);
            ++col;
        }
        if (col != ncols) throw CiError("line " + std::to_string(lineno) + ": too few fields");
    }
    d.rows = raw.empty() ? 0 : static_cast<int>(raw[0].size());
    if (integral) {
        d.kind = Dataset::Kind::Discrete;
        d.icols.resize(ncols);
        d.cardinality.assign(ncols, 1);
        for (size_t c = 0; c < ncols; ++c) {
            d.icols[c].reserve(raw[c].size());
            for (double v : raw[c]) {
                if (v < 0) throw CiError("negative code in discrete column " + d.names[c]);
                int code = static_cast<int>(v);
                d.icols[c].push_back(code);
                d.cardinality[c] = std::max(d.cardinality[c], code + 1);
            }
        }
    } else {
        d.kind = Dataset::Kind::Continuous;
        d.cols = std::move(raw);
    }
    return d;
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CiError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_csv(buf.str());
}

std::string format_csv(const Dataset& d) {
    std::ostringstream out;
    for (size_t c = 0; c < d.names.size(); ++c) out << (c ? "," : "") << d.names[c];
    out << '\n';
    for (int r = 0; r < d.rows; ++r) {
        for (size_t c = 0; c < d.names.size(); ++c) {
            if (c) out << ',';
            if (d.kind == Dataset::Kind::Discrete)
                out << d.icols[c][static_cast<size_t>(r)];
            else
                out << d.cols[c][static_cast<size_t>(r)];
        }
        out << '\n';
    }
    return out.str();
}

OracleCiTester::OracleCiTester(Dag truth) : truth_(std::move(truth)) {}

CiVerdict OracleCiTester::test(int a, int b, VertexSet cond) {
    check_vars(variable_count(), a, b, cond);
    bool sep = is_separated(truth_, SepQuery{a, b, cond});
    return CiVerdict{sep, sep ? 0.0 : 1.0, sep ? 1.0 : 0.0, false};
}

GSquaredCiTester::GSquaredCiTester(const Dataset& data, CiTestConfig config)
    : names_(data.names), cols_(data.icols), card_(data.cardinality), rows_(data.rows), config_(config) {
    config_.validate();
    if (data.kind != Dataset::Kind::Discrete) throw CiError("G-squared test requires discrete data");
}

CiVerdict GSquaredCiTester::test(int a, int b, VertexSet cond) {
    check_vars(variable_count(), a, b, cond);
    auto& slot = cache_[pair_key(a, b)];
    if (auto it = slot.find(cond); it != slot.end()) return it->second;

    const int ca = card_[static_cast<size_t>(a)];
    const int cb = card_[static_cast<size_t>(b)];
    std::vector<int> cvars = to_vector(cond);

    CiVerdict v;
    if (ca < 2 || cb < 2 || rows_ == 0) {
        v = CiVerdict{true, 0.0, 1.0, true};
        ++degenerate_;
        slot.emplace(cond, v);
        return v;
    }

    // stratify rows by the conditioning configuration (mixed radix)
    std::size_t n_strata = 1;
    for (int cv : cvars) n_strata *= static_cast<std::size_t>(card_[static_cast<size_t>(cv)]);
    std::vector<std::vector<int>> counts(n_strata);
    for (int r = 0; r < rows_; ++r) {
        std::size_t stratum = 0;
        for (int cv : cvars) stratum = stratum * static_cast<std::size_t>(card_[static_cast<size_t>(cv)]) +
                                       static_cast<std::size_t>(cols_[static_cast<size_t>(cv)][static_cast<size_t>(r)]);
        auto& table = counts[stratum];
        if (table.empty()) table.assign(static_cast<size_t>(ca) * static_cast<size_t>(cb), 0);
        ++table[static_cast<size_t>(cols_[static_cast<size_t>(a)][static_cast<size_t>(r)]) * static_cast<size_t>(cb) +
                static_cast<size_t>(cols_[static_cast<size_t>(b)][static_cast<size_t>(r)])];
    }

    double stat = 0.0;
    long used_strata = 0;
    for (const auto& table : counts) {
        if (table.empty()) continue;  // structurally empty stratum
        std::vector<double> row_tot(static_cast<size_t>(ca), 0.0), col_tot(static_cast<size_t>(cb), 0.0);
        double total = 0.0;
        for (int i = 0; i < ca; ++i)
            for (int j = 0; j < cb; ++j) {
                double o = table[static_cast<size_t>(i) * static_cast<size_t>(cb) + static_cast<size_t>(j)];
                row_tot[static_cast<size_t>(i)] += o;
                col_tot[static_cast<size_t>(j)] += o;
                total += o;
            }
        if (total == 0.0) continue;
        if (config_.min_cell_expectation > 0.0) {
            double min_e = total;
            for (int i = 0; i < ca; ++i)
                for (int j = 0; j < cb; ++j)
                    min_e = std::min(min_e, row_tot[static_cast<size_t>(i)] * col_tot[static_cast<size_t>(j)] / total);
            if (min_e < config_.min_cell_expectation) continue;
        }
        ++used_strata;
        for (int i = 0; i < ca; ++i) {
            for (int j = 0; j < cb; ++j) {
                double o = table[static_cast<size_t>(i) * static_cast<size_t>(cb) + static_cast<size_t>(j)];
                if (o <= 0.0) continue;
                double e = row_tot[static_cast<size_t>(i)] * col_tot[static_cast<size_t>(j)] / total;
                stat += 2.0 * o * std::log(o / e);
            }
        }
    }

    double dof = static_cast<double>(ca - 1) * static_cast<double>(cb - 1) * static_cast<double>(used_strata);
    if (dof <= 0.0) {
        v = CiVerdict{true, 0.0, 1.0, true};
        ++degenerate_;
    } else {
        if (stat < 0.0) stat = 0.0;
        double p = chi_square_upper_tail(stat, dof);
        v = CiVerdict{p >= config_.alpha, stat, p, false};
    }
    slot.emplace(cond, v);
    return v;
}

FisherZCiTester::FisherZCiTester(const Dataset& data, CiTestConfig config)
    : names_(data.names), rows_(data.rows), config_(config) {
    config_.validate();
    if (data.kind != Dataset::Kind::Continuous) throw CiError("Fisher-z test requires continuous data");
    const int n = data.variable_count();
    constant_.assign(static_cast<size_t>(n), false);
    std::vector<double> mean(static_cast<size_t>(n), 0.0), sd(static_cast<size_t>(n), 0.0);
    for (int v = 0; v < n; ++v) {
        const auto& col = data.cols[static_cast<size_t>(v)];
        double m = 0.0;
        for (double x : col) m += x;
        m /= std::max(1, rows_);
        double s = 0.0;
        for (double x : col) s += (x - m) * (x - m);
        mean[static_cast<size_t>(v)] = m;
        sd[static_cast<size_t>(v)] = std::sqrt(s);
        if (sd[static_cast<size_t>(v)] == 0.0) constant_[static_cast<size_t>(v)] = true;
    }
    corr_.assign(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        corr_[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(i)] = 1.0;
        for (int j = i + 1; j < n; ++j) {
            double r = 0.0;
            if (!constant_[static_cast<size_t>(i)] && !constant_[static_cast<size_t>(j)]) {
                double dot = 0.0;
                for (int t = 0; t < rows_; ++t)
                    dot += (data.cols[static_cast<size_t>(i)][static_cast<size_t>(t)] - mean[static_cast<size_t>(i)]) *
                           (data.cols[static_cast<size_t>(j)][static_cast<size_t>(t)] - mean[static_cast<size_t>(j)]);
                r = dot / (sd[static_cast<size_t>(i)] * sd[static_cast<size_t>(j)]);
            }
            corr_[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] = r;
            corr_[static_cast<size_t>(j) * static_cast<size_t>(n) + static_cast<size_t>(i)] = r;
        }
    }
}

CiVerdict FisherZCiTester::test(int a, int b, VertexSet cond) {
    const int n = variable_count();
    check_vars(n, a, b, cond);
    auto& slot = cache_[pair_key(a, b)];
    if (auto it = slot.find(cond); it != slot.end()) return it->second;

    CiVerdict v;
    std::vector<int> vars{a, b};
    for (int c : members(cond)) vars.push_back(c);
    bool any_constant = false;
    for (int x : vars) any_constant = any_constant || constant_[static_cast<size_t>(x)];
    int dof_n = rows_ - vs_size(cond) - 3;

    if (any_constant || dof_n <= 0) {
        v = CiVerdict{true, 0.0, 1.0, true};
        ++degenerate_;
        slot.emplace(cond, v);
        return v;
    }

    const int m = static_cast<int>(vars.size());
    std::vector<double> sub(static_cast<size_t>(m) * static_cast<size_t>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            sub[static_cast<size_t>(i) * static_cast<size_t>(m) + static_cast<size_t>(j)] =
                corr_[static_cast<size_t>(vars[static_cast<size_t>(i)]) * static_cast<size_t>(n) +
                      static_cast<size_t>(vars[static_cast<size_t>(j)])];
    if (!cholesky_inverse(sub, m)) throw CiError("singular correlation matrix");

    double r = -sub[1] / std::sqrt(sub[0] * sub[static_cast<size_t>(m) + 1]);
    const double limit = 1.0 - 1e-12;
    r = std::clamp(r, -limit, limit);
    double z = std::sqrt(static_cast<double>(dof_n)) * std::atanh(r);
    double p = normal_two_sided_p(z);
    v = CiVerdict{p >= config_.alpha, z, p, false};
    slot.emplace(cond, v);
    return v;
}

}  // namespace kcd
