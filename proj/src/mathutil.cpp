#include "kcd/mathutil.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kcd {

namespace {

// Regularized lower incomplete gamma P(a, x) by series expansion; valid for
// x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction; valid for
// x >= a + 1.
double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_upper_tail(double x, double dof) {
    if (dof <= 0.0) throw std::invalid_argument("degrees of freedom must be positive");
    if (x <= 0.0) return 1.0;
    double a = dof / 2.0;
    double half = x / 2.0;
    if (half < a + 1.0) return 1.0 - gamma_p_series(a, half);
    return gamma_q_contfrac(a, half);
}

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

bool cholesky_inverse(std::vector<double>& a, int n) {
    // factor a = L L^T
    std::vector<double> l(a);
    for (int j = 0; j < n; ++j) {
        double diag = l[static_cast<size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) diag -= l[static_cast<size_t>(j) * n + k] * l[static_cast<size_t>(j) * n + k];
        if (diag <= 0.0 || !std::isfinite(diag)) return false;
        diag = std::sqrt(diag);
        l[static_cast<size_t>(j) * n + j] = diag;
        for (int i = j + 1; i < n; ++i) {
            double v = l[static_cast<size_t>(i) * n + j];
            for (int k = 0; k < j; ++k) v -= l[static_cast<size_t>(i) * n + k] * l[static_cast<size_t>(j) * n + k];
            l[static_cast<size_t>(i) * n + j] = v / diag;
        }
    }
    // invert by solving L L^T x = e_i column by column
    std::vector<double> inv(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> y(static_cast<size_t>(n));
    for (int col = 0; col < n; ++col) {
        for (int i = 0; i < n; ++i) {
            double v = i == col ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) v -= l[static_cast<size_t>(i) * n + k] * y[static_cast<size_t>(k)];
            y[static_cast<size_t>(i)] = v / l[static_cast<size_t>(i) * n + i];
        }
        for (int i = n - 1; i >= 0; --i) {
            double v = y[static_cast<size_t>(i)];
            for (int k = i + 1; k < n; ++k) v -= l[static_cast<size_t>(k) * n + i] * inv[static_cast<size_t>(k) * n + col];
            inv[static_cast<size_t>(i) * n + col] = v / l[static_cast<size_t>(i) * n + i];
        }
    }
    a = std::move(inv);
    return true;
}

}  // namespace kcd
