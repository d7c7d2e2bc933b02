#pragma once

#include <vector>

namespace kcd {

// Upper tail P(X >= x) of the chi-square distribution with dof degrees of
// freedom (regularized incomplete gamma Q(dof/2, x/2)).
double chi_square_upper_tail(double x, double dof);

// Two-sided standard normal tail 2 * (1 - Phi(|z|)).
double normal_two_sided_p(double z);

// In-place Cholesky solve on a symmetric positive definite matrix stored
// row-major; returns false when the matrix is not positive definite.
bool cholesky_inverse(std::vector<double>& a, int n);

}  // namespace kcd
