#ifndef DELTASMILE_NUMERICS_HPP
#define DELTASMILE_NUMERICS_HPP

/**
 * @file numerics.hpp
 * @brief Small numeric toolbox: Gauss hypergeometric series, quadrature and
 *        root-finding wrappers, deterministic summation, finite differences.
 *
 * Everything heavy is delegated to Boost (gauss_kronrod quadrature, TOMS 748
 * bracketing, Brent minimization, odeint steppers are used directly by the
 * geometry module). The pieces here are the thin, policy-carrying wrappers the
 * rest of the library shares: fixed tolerances, consistent error types, and
 * reductions whose result does not depend on evaluation order.
 */

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace deltasmile::numerics {

/**
 * Gauss hypergeometric function 2F1(a, b; c; z) by truncated power series.
 *
 * Terms are accumulated until |term| < tol * |partial sum|. The series
 * converges for |z| < 1 but slows near z = 1; callers that evaluate near the
 * branch point are expected to switch to a quadrature representation instead
 * (see geometry::standard_geodesic_x). Throws NumericalFailure if the term
 * budget is exhausted before the stopping rule fires.
 */
double hyp2f1_series(double a, double b, double c, double z,
                     double tol = 1e-16, std::size_t max_terms = 200000);

/**
 * Adaptive Gauss-Kronrod quadrature of f over [lo, hi] with target relative
 * tolerance tol. Throws NumericalFailure when the error estimate stays above
 * the requested tolerance by a large factor (ill-behaved integrand).
 */
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-10);

/**
 * Fixed-order (31-point) Gauss-Legendre quadrature for smooth integrands on
 * short intervals; no adaptivity, no failure mode, very fast. Used for inner
 * integrals whose smoothness is known by construction.
 */
double integrate_fixed(const std::function<double(double)>& f, double lo, double hi);

/**
 * Bracketed root finding (TOMS 748). Requires f(lo) and f(hi) with opposite
 * signs; returns the midpoint of the final bracket (width driven down to a
 * few ulps). Throws NumericalFailure if the bracket is invalid.
 */
double find_root(const std::function<double(double)>& f, double lo, double hi);

/**
 * Scan [lo, hi] on n geometric/linear nodes, collect every sign-change
 * bracket of f and polish each with find_root. Returns all roots in
 * increasing order (possibly empty). Endpoint roots are detected via a small
 * |f| threshold relative to neighbouring values.
 */
std::vector<double> find_all_roots(const std::function<double(double)>& f,
                                   double lo, double hi, int n = 200);

/// Brent minimization of f on [lo, hi]; returns (argmin, min).
std::pair<double, double> minimize(const std::function<double(double)>& f,
                                   double lo, double hi, int bits = 40);

/**
 * Pairwise (cascade) summation. Deterministic for a fixed input order and
 * independent of how the values were produced, which is what makes the Monte
 * Carlo reductions reproducible across thread counts.
 */
double pairwise_sum(std::span<const double> xs);

/// Arithmetic mean via pairwise_sum.
double pairwise_mean(std::span<const double> xs);

/**
 * Central finite-difference derivative of f at x, order 1..4, five/seven-point
 * stencils of accuracy O(h^2) (orders 3,4) or O(h^4) (orders 1,2). Used by
 * validation oracles, not by the production formulas.
 */
double finite_difference(const std::function<double(double)>& f, double x,
                         int order, double h);

/// Euler beta function B(a, b) via lgamma (a, b > 0).
double beta_function(double a, double b);

} // namespace deltasmile::numerics

#endif // DELTASMILE_NUMERICS_HPP
