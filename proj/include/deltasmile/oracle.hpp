/**
 * @file oracle.hpp
 * @brief Euler Monte Carlo simulator of the exponent-delta volatility model,
 *        with kernel-density and implied-volatility estimators used as
 *        ground truth by the test suite and the validate command.
 *
 * The simulated system is dF = Sigma^delta c(F) dW, dSigma = lambda'(mu' -
 * Sigma) dt + nu Sigma^delta dZ with corr(dW, dZ) = rho and c(F) = F^beta.
 * Volatility uses the full-truncation scheme (the positive part enters every
 * power and the drift); the forward absorbs at zero for beta > 0.
 */
#pragma once

#include "deltasmile/errors.hpp"
#include "deltasmile/model.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace deltasmile::oracle {

/// Time-stepping scheme for the volatility factor.
enum class Scheme {
    EulerFullTruncation ///< positive part of Sigma inside powers and drift
};

/// Simulation controls.
struct SimConfig {
    std::size_t n_paths = 100000; ///< number of terminal samples
    std::size_t n_steps = 200;    ///< Euler steps over [0, tau]
    std::uint64_t seed = 1;       ///< base seed; streams derive per path
    Scheme scheme = Scheme::EulerFullTruncation;
    double vol_floor = 0.0;       ///< clamp inside powers (0 = pure truncation)
    bool antithetic = true;       ///< pair path 2k+1 with negated draws of 2k

    bool is_valid() const noexcept;
    /// @throws InvalidParameter with the offending value embedded.
    void validate() const;
};

/// Terminal state of one path.
struct TerminalSample {
    double F = 0.0;     ///< terminal forward (0 when absorbed)
    double Sigma = 0.0; ///< terminal volatility, truncated at 0
};

/**
 * @brief Simulate terminal samples of (F, Sigma).
 *
 * Paths are independent: each derives its own generator from (seed, path
 * index), so the result is bit-identical across runs and thread counts for
 * a fixed standard library. Antithetic pairs share a stream with negated
 * increments.
 */
std::vector<TerminalSample> simulate(const model::ModelParams& params, double tau,
                                     double f0, double sigma0,
                                     const SimConfig& cfg);

/// Kernel density estimate at one abscissa with a bootstrap error bar.
struct DensityEstimate {
    double value = 0.0;          ///< density of terminal F at K
    double stderr_value = 0.0;   ///< bootstrap standard error (160 resamples)
    double bandwidth = 0.0;      ///< Gaussian kernel width actually used
    std::size_t n_in_window = 0; ///< live samples within 3 bandwidths of K
    bool wide_band = false;      ///< too few samples near K to trust the value
};

/// Rule-of-thumb bandwidth 1.06 min(sd, IQR/1.34) n^{-1/5} over live samples.
double silverman_bandwidth(const std::vector<TerminalSample>& samples);

/**
 * @brief Gaussian kernel density of terminal F at K.
 *
 * Absorbed paths (F = 0) are excluded from the kernel sum but kept in the
 * normalization, so the estimated density integrates to one minus the
 * absorbed mass. bandwidth = 0 selects the rule-of-thumb width.
 */
DensityEstimate mc_digital_density(const std::vector<TerminalSample>& samples,
                                   double K, double bandwidth = 0.0);

/// Undiscounted Black call value f0 N(d1) - K N(d2).
double black_call(double f0, double K, double tau, double sigma);

/**
 * @brief Invert the Black call value to a lognormal volatility.
 * @throws NoImpliedVol when price is outside (intrinsic, forward).
 */
double black_implied_vol(double price, double f0, double K, double tau);

/// Implied-volatility estimate with an error bar propagated from the MC error.
struct VolEstimate {
    double sigma = 0.0;    ///< point estimate
    double sigma_lo = 0.0; ///< inversion of price - 1 SE (0 when unbounded)
    double sigma_hi = 0.0; ///< inversion of price + 1 SE
    double price = 0.0;    ///< undiscounted call estimate mean (F - K)^+
    double price_se = 0.0; ///< standard error of the call estimate
    bool wide_bar = false; ///< an endpoint hit a no-arbitrage bound
};

/**
 * @brief Mean call payoff inverted through the Black formula.
 *
 * Deep in-the-money strikes have vanishing vega: the error bar then runs to
 * a bound and wide_bar is set instead of failing.
 *
 * @throws NoImpliedVol when the point estimate itself is out of bounds.
 */
VolEstimate mc_implied_vol(const std::vector<TerminalSample>& samples, double K,
                           double tau, double f0);

} // namespace deltasmile::oracle
