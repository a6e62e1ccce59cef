#pragma once

#include <functional>

namespace rlp {

// Adaptive integration of f over [a, b] to absolute tolerance eps_abs.
// Endpoint singularities of integrable type are handled (QAGS under the
// hood).  Throws numeric_failure if the tolerance cannot be met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double eps_abs = 1e-10);

// Upper tail of the chi-square distribution with dof degrees of freedom.
double chisq_sf(double statistic, unsigned dof);

// Regularized incomplete beta function I_x(a, b).
double beta_inc(double a, double b, double x);

// Euler beta function B(a, b).
double beta_fn(double a, double b);

}  // namespace rlp
