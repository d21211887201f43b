/**
 * @file oracle.cpp
 * @brief Monte Carlo simulation and estimation for the exponent-delta model.
 */

#include "deltasmile/oracle.hpp"

#include "deltasmile/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>

namespace deltasmile::oracle {

namespace {

/// SplitMix64 finalizer; decorrelates consecutive stream indices.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace

bool SimConfig::is_valid() const noexcept {
    return n_paths >= 1 && n_steps >= 1 && vol_floor >= 0.0 &&
           scheme == Scheme::EulerFullTruncation;
}

void SimConfig::validate() const {
    if (n_paths < 1)
        throw InvalidParameter("SimConfig: n_paths must be >= 1, got " +
                               std::to_string(n_paths));
    if (n_steps < 1)
        throw InvalidParameter("SimConfig: n_steps must be >= 1, got " +
                               std::to_string(n_steps));
    if (!(vol_floor >= 0.0))
        throw InvalidParameter("SimConfig: vol_floor must be >= 0, got " +
                               std::to_string(vol_floor));
}

std::vector<TerminalSample> simulate(const model::ModelParams& params, double tau,
                                     double f0, double sigma0,
                                     const SimConfig& cfg) {
    params.validate();
    cfg.validate();
    if (!(tau > 0.0))
        throw InvalidParameter("simulate: tau must be > 0, got " +
                               std::to_string(tau));
    if (!(f0 > 0.0))
        throw InvalidParameter("simulate: f0 must be > 0, got " +
                               std::to_string(f0));
    if (!(sigma0 > 0.0))
        throw InvalidParameter("simulate: sigma0 must be > 0, got " +
                               std::to_string(sigma0));

    const double dt = tau / static_cast<double>(cfg.n_steps);
    const double sq_dt = std::sqrt(dt);
    const double q = std::sqrt(1.0 - params.rho * params.rho);
    const double delta = params.delta;
    const double beta = params.beta;
    std::vector<TerminalSample> out(cfg.n_paths);
    const std::int64_t n = static_cast<std::int64_t>(cfg.n_paths);

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const std::uint64_t stream =
            cfg.antithetic ? static_cast<std::uint64_t>(i) / 2
                           : static_cast<std::uint64_t>(i);
        std::mt19937_64 rng(stream_seed(cfg.seed, stream));
        std::normal_distribution<double> normal;
        const double flip = (cfg.antithetic && (i & 1)) ? -1.0 : 1.0;

        double F = f0;
        double sigma = sigma0;
        bool absorbed = false;
        for (std::size_t step = 0; step < cfg.n_steps; ++step) {
            const double z1 = flip * normal(rng); // volatility driver
            const double z2 = flip * normal(rng);
            const double dw = params.rho * z1 + q * z2;
            const double sp = std::max(sigma, cfg.vol_floor);
            const double sp_delta = std::pow(sp, delta);
            if (!absorbed) {
                const double c_F =
                    beta == 0.0 ? 1.0 : (beta == 1.0 ? F : std::pow(F, beta));
                F += sp_delta * c_F * sq_dt * dw;
                if (beta > 0.0 && F <= 0.0) {
                    F = 0.0;
                    absorbed = true;
                }
            }
            sigma += params.lambda_raw * (params.mu_raw - sp) * dt +
                     params.nu * sp_delta * sq_dt * z1;
        }
        out[static_cast<std::size_t>(i)] = {F, std::max(sigma, 0.0)};
    }
    return out;
}

double silverman_bandwidth(const std::vector<TerminalSample>& samples) {
    std::vector<double> live;
    live.reserve(samples.size());
    for (const auto& s : samples)
        if (s.F > 0.0) live.push_back(s.F);
    if (live.size() < 2)
        throw InvalidParameter("silverman_bandwidth: need at least 2 live "
                               "samples, got " +
                               std::to_string(live.size()));
    const double mean = numerics::pairwise_mean(live);
    std::vector<double> sq(live.size());
    for (std::size_t i = 0; i < live.size(); ++i)
        sq[i] = (live[i] - mean) * (live[i] - mean);
    const double sd = std::sqrt(numerics::pairwise_sum(sq) /
                                static_cast<double>(live.size() - 1));
    std::sort(live.begin(), live.end());
    const auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(live.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, live.size() - 1);
        const double w = pos - static_cast<double>(lo);
        return (1.0 - w) * live[lo] + w * live[hi];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0))
        throw NumericalFailure("silverman_bandwidth: degenerate sample spread " +
                               std::to_string(spread));
    return 1.06 * spread *
           std::pow(static_cast<double>(live.size()), -0.2);
}

DensityEstimate mc_digital_density(const std::vector<TerminalSample>& samples,
                                   double K, double bandwidth) {
    if (samples.empty())
        throw InvalidParameter("mc_digital_density: empty sample set");
    if (bandwidth < 0.0)
        throw InvalidParameter("mc_digital_density: bandwidth must be >= 0, got " +
                               std::to_string(bandwidth));
    DensityEstimate est;
    est.bandwidth = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(samples);
    const double h = est.bandwidth;
    const double norm = 1.0 / std::sqrt(2.0 * 3.14159265358979323846);

    // per-sample kernel contributions; absorbed paths contribute zero but
    // stay in the normalization (density integrates to 1 - absorbed mass)
    std::vector<double> contrib(samples.size(), 0.0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = samples[i].F;
        if (F <= 0.0) continue;
        const double u = (K - F) / h;
        contrib[i] = norm * std::exp(-0.5 * u * u) / h;
        if (std::abs(F - K) <= 3.0 * h) ++est.n_in_window;
    }
    est.value = numerics::pairwise_mean(contrib);
    est.wide_band = est.n_in_window < 30;

    constexpr int kResamples = 160;
    const std::size_t n = samples.size();
    std::vector<double> means(kResamples);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < kResamples; ++b) {
        std::mt19937_64 rng(
            stream_seed(0x0B00757261700000ULL ^ static_cast<std::uint64_t>(n),
                        static_cast<std::uint64_t>(b)));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += contrib[pick(rng)];
        means[b] = acc / static_cast<double>(n);
    }
    const double mean_b = numerics::pairwise_mean(means);
    double var = 0.0;
    for (double m : means) var += (m - mean_b) * (m - mean_b);
    est.stderr_value = std::sqrt(var / (kResamples - 1));
    return est;
}

double black_call(double f0, double K, double tau, double sigma) {
    if (!(f0 > 0.0) || !(K > 0.0) || !(tau > 0.0))
        throw InvalidParameter("black_call: f0, K, tau must be > 0");
    if (sigma <= 0.0) return std::max(f0 - K, 0.0);
    const double total = sigma * std::sqrt(tau);
    const double d1 = std::log(f0 / K) / total + 0.5 * total;
    const double d2 = d1 - total;
    return f0 * normal_cdf(d1) - K * normal_cdf(d2);
}

double black_implied_vol(double price, double f0, double K, double tau) {
    if (!(f0 > 0.0) || !(K > 0.0) || !(tau > 0.0))
        throw InvalidParameter("black_implied_vol: f0, K, tau must be > 0");
    const double intrinsic = std::max(f0 - K, 0.0);
    if (!(price > intrinsic) || !(price < f0))
        throw NoImpliedVol("black_implied_vol: price " + std::to_string(price) +
                           " outside (" + std::to_string(intrinsic) + ", " +
                           std::to_string(f0) + ")");
    double hi = 1.0;
    while (black_call(f0, K, tau, hi) < price && hi < 1e3) hi *= 2.0;
    return numerics::find_root(
        [&](double sigma) { return black_call(f0, K, tau, sigma) - price; },
        1e-10, hi);
}

VolEstimate mc_implied_vol(const std::vector<TerminalSample>& samples, double K,
                           double tau, double f0) {
    if (samples.empty())
        throw InvalidParameter("mc_implied_vol: empty sample set");
    std::vector<double> payoff(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        payoff[i] = std::max(samples[i].F - K, 0.0);
    VolEstimate est;
    est.price = numerics::pairwise_mean(payoff);
    std::vector<double> sq(payoff.size());
    for (std::size_t i = 0; i < payoff.size(); ++i)
        sq[i] = (payoff[i] - est.price) * (payoff[i] - est.price);
    const double n = static_cast<double>(payoff.size());
    est.price_se = std::sqrt(numerics::pairwise_sum(sq) / (n - 1.0) / n);

    est.sigma = black_implied_vol(est.price, f0, K, tau); // throws if unpriceable
    const double intrinsic = std::max(f0 - K, 0.0);
    if (est.price - est.price_se > intrinsic) {
        est.sigma_lo = black_implied_vol(est.price - est.price_se, f0, K, tau);
    } else {
        est.sigma_lo = 0.0;
        est.wide_bar = true;
    }
    if (est.price + est.price_se < f0) {
        est.sigma_hi = black_implied_vol(est.price + est.price_se, f0, K, tau);
    } else {
        est.sigma_hi = 10.0;
        est.wide_bar = true;
    }
    return est;
}

} // namespace deltasmile::oracle
