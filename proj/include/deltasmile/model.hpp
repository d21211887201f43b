#ifndef DELTASMILE_MODEL_HPP
#define DELTASMILE_MODEL_HPP

/**
 * @file model.hpp
 * @brief SDE parameterization, coordinate reduction, and boundary (explosion /
 *        recurrence) classification for the delta-exponent volatility family
 *
 *            dF     = sigma^delta * c(F) dW,     c(F) = F^beta
 *            dsigma = lambda' (mu' - sigma) dt + nu sigma^delta dZ,
 *            E[dW dZ] = rho dt.
 *
 * delta = 1 is the SABR limit, delta = 1/2 with c(F) = F the Heston-type
 * limit. All asymptotics downstream work in the reduced variables
 * s = nu^2 tau, y = sigma/nu, lambda = lambda'/nu^2, mu = mu'/nu.
 */

#include <string>

namespace deltasmile::model {

/// Full SDE specification. All rates are per unit time; mu_raw is in
/// volatility units.
struct ModelParams {
    double delta = 1.0;       ///< vol exponent, delta in [1/2, 1]
    double beta = 0.0;        ///< CEV exponent of c(F) = F^beta, beta in [0, 1]
    double nu = 0.0;          ///< vol-of-vol, nu >= 0 (nu = 0 only for degenerate local-vol checks)
    double rho = 0.0;         ///< correlation, |rho| < 1
    double lambda_raw = 0.0;  ///< mean-reversion speed lambda' >= 0
    double mu_raw = 0.0;      ///< mean-reversion level mu' >= 0

    bool is_valid() const noexcept;

    /// Throws InvalidParameter with the offending value when a bound is violated.
    void validate() const;
};

/// Dimensionless reduced variables for the half-plane machinery.
struct ReducedParams {
    double s;       ///< rescaled time s = nu^2 tau
    double lambda;  ///< lambda = lambda'/nu^2
    double mu;      ///< mu = mu'/nu
    double y0;      ///< reduced initial vol y0 = sigma0/nu
};

/// Invert the reduction: recover (tau, sigma0) from reduced variables.
struct UnreducedState {
    double tau;
    double sigma0;
};

/**
 * Reduce physical inputs to the dimensionless variables.
 * Preconditions: nu > 0 (throws DegenerateModel otherwise), tau >= 0, sigma0 > 0.
 */
ReducedParams reduce(const ModelParams& params, double tau, double sigma0);

/// Round-trip inverse of reduce (exact up to rounding).
UnreducedState unreduce(const ModelParams& params, const ReducedParams& reduced);

/// Outcome of the explosion/recurrence test for the sigma diffusion.
enum class Verdict {
    NoExplosionRecurrent,
    NoExplosionNonRecurrent,
    ExplosionPossible,
};

const char* to_string(Verdict v) noexcept;

struct BoundaryClassification {
    Verdict verdict;
    std::string rationale;  ///< which case of the classification table fired
};

/**
 * Classification table for dsigma = lambda'(mu' - sigma)dt + nu sigma^delta dZ:
 *
 *   delta < 1/2                      -> ExplosionPossible (exit at 0 has positive probability)
 *   delta = 1/2, 2 lambda' mu' / nu^2 > 1 -> NoExplosionRecurrent, else ExplosionPossible
 *   1/2 < delta < 1, lambda' > 0     -> NoExplosionRecurrent
 *   1/2 < delta < 1, lambda' = 0     -> ExplosionPossible
 *   delta = 1                        -> NoExplosionRecurrent
 *   delta > 1, lambda' > 0           -> NoExplosionRecurrent
 *   delta > 1, lambda' = 0           -> NoExplosionNonRecurrent (scale bounded at +inf)
 *
 * The delta = 1/2 equality case 2 lambda' mu' / nu^2 = 1 is classified
 * ExplosionPossible (conservative). Throws InvalidParameter for nu <= 0 or
 * delta <= 0.
 */
BoundaryClassification feller_classify(double delta, double lambda_raw,
                                       double mu_raw, double nu);

/// Truncated integration grid for the numeric scale/speed diagnostics.
struct FellerGrid {
    double y_lo = 1e-4;  ///< innermost truncation toward the 0 boundary
    double y_c = 1.0;    ///< interior reference point c
    double y_hi = 1e3;   ///< outermost truncation toward +inf
};

/// Trend of the nested integral v(x) toward a boundary as the truncation tightens.
enum class Trend { Diverging, Converging, Unclear };

const char* to_string(Trend t) noexcept;

struct BoundaryTrend {
    Trend trend;
    double v[3];  ///< v estimates at the three telescoping truncations
};

/// Advisory numeric cross-check of feller_classify; never overrides it.
struct FellerReport {
    BoundaryClassification analytic;
    BoundaryTrend lower;   ///< toward the 0 boundary
    BoundaryTrend upper;   ///< toward +inf
    bool consistent;       ///< confident trends agree with the analytic verdict
    std::string detail;
};

/**
 * Numerically evaluates the scale density p'(x) (analytic inner antiderivative)
 * and the nested speed-scale integral v(x) by quadrature toward both
 * boundaries on log-spaced truncations of the grid, and reports whether the
 * divergence/convergence trends are consistent with feller_classify.
 *
 * Trend rule: three telescoping truncations; "Diverging" requires the
 * increments to grow monotonically by a factor >= 2, "Converging" requires
 * them to shrink by a factor <= 1/2; anything else is "Unclear".
 */
FellerReport feller_numeric_check(double delta, double lambda_raw, double mu_raw,
                                  double nu, const FellerGrid& grid = {});

} // namespace deltasmile::model

#endif // DELTASMILE_MODEL_HPP
