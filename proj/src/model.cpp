#include "deltasmile/model.hpp"
#include "deltasmile/errors.hpp"
#include "deltasmile/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace deltasmile::model {

bool ModelParams::is_valid() const noexcept {
    return delta >= 0.5 && delta <= 1.0 && beta >= 0.0 && beta <= 1.0 &&
           nu >= 0.0 && std::abs(rho) < 1.0 && lambda_raw >= 0.0 && mu_raw >= 0.0;
}

void ModelParams::validate() const {
    if (!(delta >= 0.5 && delta <= 1.0))
        throw InvalidParameter("model: delta must lie in [0.5, 1], got " +
                               std::to_string(delta));
    if (!(beta >= 0.0 && beta <= 1.0))
        throw InvalidParameter("model: beta must lie in [0, 1], got " +
                               std::to_string(beta));
    if (!(nu >= 0.0))
        throw InvalidParameter("model: nu must be >= 0, got " + std::to_string(nu));
    if (!(std::abs(rho) < 1.0))
        throw InvalidParameter("model: rho must lie in (-1, 1), got " +
                               std::to_string(rho));
    if (!(lambda_raw >= 0.0))
        throw InvalidParameter("model: lambda' must be >= 0, got " +
                               std::to_string(lambda_raw));
    if (!(mu_raw >= 0.0))
        throw InvalidParameter("model: mu' must be >= 0, got " +
                               std::to_string(mu_raw));
}

ReducedParams reduce(const ModelParams& params, double tau, double sigma0) {
    params.validate();
    if (params.nu <= 0.0)
        throw DegenerateModel(
            "reduce: nu = 0 has no stochastic-vol reduction; use the local-vol "
            "degenerate path");
    if (!(tau >= 0.0))
        throw InvalidParameter("reduce: tau must be >= 0, got " + std::to_string(tau));
    if (!(sigma0 > 0.0))
        throw InvalidParameter("reduce: sigma0 must be > 0, got " +
                               std::to_string(sigma0));
    const double nu = params.nu;
    return ReducedParams{nu * nu * tau, params.lambda_raw / (nu * nu),
                         params.mu_raw / nu, sigma0 / nu};
}

UnreducedState unreduce(const ModelParams& params, const ReducedParams& reduced) {
    if (params.nu <= 0.0)
        throw DegenerateModel("unreduce: nu = 0");
    const double nu = params.nu;
    return UnreducedState{reduced.s / (nu * nu), reduced.y0 * nu};
}

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::NoExplosionRecurrent: return "NoExplosionRecurrent";
        case Verdict::NoExplosionNonRecurrent: return "NoExplosionNonRecurrent";
        case Verdict::ExplosionPossible: return "ExplosionPossible";
    }
    return "?";
}

const char* to_string(Trend t) noexcept {
    switch (t) {
        case Trend::Diverging: return "Diverging";
        case Trend::Converging: return "Converging";
        case Trend::Unclear: return "Unclear";
    }
    return "?";
}

BoundaryClassification feller_classify(double delta, double lambda_raw,
                                       double mu_raw, double nu) {
    if (!(nu > 0.0))
        throw InvalidParameter("feller_classify: nu must be > 0, got " +
                               std::to_string(nu));
    if (!(delta > 0.0))
        throw InvalidParameter("feller_classify: delta must be > 0, got " +
                               std::to_string(delta));
    if (!(lambda_raw >= 0.0) || !(mu_raw >= 0.0))
        throw InvalidParameter("feller_classify: lambda', mu' must be >= 0");

    if (delta < 0.5)
        return {Verdict::ExplosionPossible,
                "delta<1/2: v(0+) finite, exit at 0 has positive probability"};
    if (delta == 0.5) {
        const double ratio = 2.0 * lambda_raw * mu_raw / (nu * nu);
        if (ratio > 1.0)
            return {Verdict::NoExplosionRecurrent,
                    "delta=1/2 with 2*lambda'*mu'/nu^2 > 1: both boundaries inaccessible"};
        return {Verdict::ExplosionPossible,
                "delta=1/2 with 2*lambda'*mu'/nu^2 <= 1: exit at 0 possible "
                "(equality classified conservatively)"};
    }
    if (delta < 1.0) {
        if (lambda_raw > 0.0)
            return {Verdict::NoExplosionRecurrent,
                    "1/2<delta<1 with mean reversion: v(0+)=+inf and v(+inf)=+inf"};
        return {Verdict::ExplosionPossible,
                "1/2<delta<1 without mean reversion: v(0+) finite, exit at 0 possible"};
    }
    if (delta == 1.0)
        return {Verdict::NoExplosionRecurrent,
                "delta=1: geometric-type diffusion never reaches 0 or +inf"};
    if (lambda_raw > 0.0)
        return {Verdict::NoExplosionRecurrent,
                "delta>1 with mean reversion: both boundaries inaccessible"};
    return {Verdict::NoExplosionNonRecurrent,
            "delta>1 without mean reversion: no finite-time explosion, scale "
            "function bounded toward +inf"};
}

namespace {

// Antiderivative A(z) of 2*lambda'(mu'-z)/(nu^2 z^{2delta}), so that the scale
// density is p'(x) = exp(-(A(x) - A(c))). Log branches at delta = 1/2 and 1.
double scale_exponent(double delta, double lambda_raw, double mu_raw, double nu,
                      double z) {
    const double k = 2.0 * lambda_raw / (nu * nu);
    if (k == 0.0) return 0.0;
    const double i1 = (delta == 0.5) ? std::log(z)
                                     : std::pow(z, 1.0 - 2.0 * delta) / (1.0 - 2.0 * delta);
    const double i2 = (delta == 1.0) ? std::log(z)
                                     : std::pow(z, 2.0 - 2.0 * delta) / (2.0 - 2.0 * delta);
    return k * (mu_raw * i1 - i2);
}

// v(x) = | int_c^x exp(-(A(y)-A(c))) * int_c^y exp(A(z)-A(c)) / b^2(z) dz dy |
// evaluated by a composite trapezoid rule on log-spaced nodes, with the inner
// integral accumulated on the same grid. Exponents are clamped so a genuinely
// diverging v saturates to a huge-but-finite plateau instead of overflowing;
// the trend detector only needs relative growth, not tight absolute accuracy.
struct VEval {
    double v = 0.0;
    bool clamped = false;  ///< scale density exceeded the representable cap
};

VEval speed_scale_v(double delta, double lambda_raw, double mu_raw, double nu,
                    double x, double c) {
    constexpr int n_panels = 4000;
    constexpr double exp_cap = 120.0;
    const double a_c = scale_exponent(delta, lambda_raw, mu_raw, nu, c);
    const double u0 = std::log(c);
    const double u1 = std::log(x);
    const double du = (u1 - u0) / n_panels;

    VEval out{};
    double q = 0.0;          // running inner integral int_c^z dz'/(p' b^2)
    double g_prev = 0.0;
    double v = 0.0;
    double h_prev = 0.0;
    for (int j = 0; j <= n_panels; ++j) {
        const double u = u0 + j * du;
        const double z = std::exp(u);
        const double e = scale_exponent(delta, lambda_raw, mu_raw, nu, z) - a_c;
        const double b2 = nu * nu * std::pow(z, 2.0 * delta);
        const double g = std::exp(std::min(e, exp_cap)) / b2 * z;
        if (j > 0) q += 0.5 * (g_prev + g) * du;
        g_prev = g;
        if (-e > exp_cap) out.clamped = true;
        const double h = std::exp(std::min(-e, exp_cap)) * q * z;
        if (j > 0) v += 0.5 * (h_prev + h) * du;
        h_prev = h;
    }
    out.v = std::isfinite(v) ? std::abs(v)
                             : std::numeric_limits<double>::infinity();
    return out;
}

BoundaryTrend classify_trend(const VEval v[3]) {
    BoundaryTrend out{};
    for (int i = 0; i < 3; ++i) out.v[i] = v[i].v;
    const double d1 = v[1].v - v[0].v;
    const double d2 = v[2].v - v[1].v;
    // A clamped finest truncation means the scale density blew past 1e52;
    // within the power/exponential family at hand that settles divergence.
    if (v[2].clamped || std::isinf(v[2].v) || (d1 > 0.0 && d2 >= 2.0 * d1)) {
        out.trend = Trend::Diverging;
    } else if (d1 > 0.0 && d2 <= 0.5 * d1) {
        out.trend = Trend::Converging;
    } else {
        out.trend = Trend::Unclear;
    }
    return out;
}

} // namespace

FellerReport feller_numeric_check(double delta, double lambda_raw, double mu_raw,
                                  double nu, const FellerGrid& grid) {
    if (!(grid.y_lo > 0.0 && grid.y_lo < grid.y_c && grid.y_c < grid.y_hi))
        throw InvalidParameter("feller_numeric_check: grid must satisfy 0 < y_lo < c < y_hi");
    FellerReport report{};
    report.analytic = feller_classify(delta, lambda_raw, mu_raw, nu);

    // Three telescoping log-spaced truncations toward each boundary.
    VEval v_lo[3], v_hi[3];
    for (int k = 1; k <= 3; ++k) {
        const double x_lo =
            grid.y_c * std::pow(grid.y_lo / grid.y_c, static_cast<double>(k) / 3.0);
        const double x_hi =
            grid.y_c * std::pow(grid.y_hi / grid.y_c, static_cast<double>(k) / 3.0);
        v_lo[k - 1] = speed_scale_v(delta, lambda_raw, mu_raw, nu, x_lo, grid.y_c);
        v_hi[k - 1] = speed_scale_v(delta, lambda_raw, mu_raw, nu, x_hi, grid.y_c);
    }
    report.lower = classify_trend(v_lo);
    report.upper = classify_trend(v_hi);

    // Every no-explosion regime needs v -> +inf at both boundaries; an
    // explosion-possible regime here always stems from a finite v toward 0.
    const bool expects_explosion = report.analytic.verdict == Verdict::ExplosionPossible;
    bool ok = true;
    if (report.lower.trend != Trend::Unclear)
        ok = ok && ((report.lower.trend == Trend::Converging) == expects_explosion);
    if (report.upper.trend != Trend::Unclear)
        ok = ok && (report.upper.trend == Trend::Diverging);
    report.consistent = ok;
    report.detail = std::string("lower ") + to_string(report.lower.trend) + ", upper " +
                    to_string(report.upper.trend) + ", analytic " +
                    to_string(report.analytic.verdict);
    return report;
}

} // namespace deltasmile::model
