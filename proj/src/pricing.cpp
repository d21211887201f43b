/**
 * @file pricing.cpp
 * @brief Digital densities by Laplace expansion along the strike line, the
 *        delta = 1 closed form, local/implied volatilities and smile curves.
 */

#include "deltasmile/pricing.hpp"

#include "deltasmile/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace deltasmile::pricing {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_market_inputs(double tau, double f0, double sigma0, double K,
                         const char* where) {
    if (!(tau > 0.0))
        throw InvalidParameter(std::string(where) + ": tau must be > 0, got " +
                               std::to_string(tau));
    if (!(f0 > 0.0))
        throw InvalidParameter(std::string(where) + ": f0 must be > 0, got " +
                               std::to_string(f0));
    if (!(sigma0 > 0.0))
        throw InvalidParameter(std::string(where) + ": sigma0 must be > 0, got " +
                               std::to_string(sigma0));
    if (!(K > 0.0))
        throw InvalidParameter(std::string(where) + ": K must be > 0, got " +
                               std::to_string(K));
}

void check_order(int order, const char* where) {
    if (order != 0 && order != 1)
        throw InvalidParameter(std::string(where) + ": order must be 0 or 1, got " +
                               std::to_string(order));
}

/// Foot-of-perpendicular data shared by the density, local-vol and smile paths.
struct FootInfo {
    kernel::IsometrySpec spec;
    kernel::EffectiveParams eff;
    geometry::HalfPlanePoint source;   ///< image of (f0, sigma0/nu)
    geometry::LineSpec line;
    geometry::PointToLineResult res;
    double y_min = 0.0;
    double theta2 = 0.0;
    bool atm = false;
};

FootInfo solve_foot(const model::ModelParams& params, double f0, double sigma0,
                    double K) {
    FootInfo info;
    info.spec = kernel::IsometrySpec::from_model(params);
    info.eff = kernel::effective_params(params);
    info.source = kernel::phi_forward(
        info.spec, {f0, sigma0 / params.nu, geometry::Frame::ModelSpace});
    info.line = strike_line(info.spec, K).line();
    info.res = geometry::distance_point_to_line(params.delta, info.source, info.line);
    const double atm_scale =
        std::max(1.0, std::pow(info.source.y, 1.0 - params.delta));
    info.atm = info.res.d < 1e-7 * atm_scale;
    info.y_min = info.atm ? info.source.y : info.res.y_min;
    info.theta2 = info.atm ? info.line.theta1 : info.res.theta2;
    return info;
}

/// Exact second derivative of the phase d^2/2 along the strike line at the
/// foot, via the Jacobi pair anchored at the source point.
double exact_phase2(const FootInfo& info, double delta) {
    if (info.atm)
        return geometry::phase_derivatives_atm(delta, info.source.y,
                                               info.line.theta1)
            .d2;
    const auto& solve = info.res.solve;
    double z_real, zdot_real;
    if (delta == 1.0) {
        z_real = std::sinh(info.res.d);
        zdot_real = std::cosh(info.res.d);
    } else {
        const double t_pt =
            solve.point_side * geometry::arc_from_apex(delta, solve.s);
        const double t_foot =
            solve.foot_side * geometry::arc_from_apex(delta, solve.y1);
        const geometry::FundamentalJacobi fund =
            geometry::jacobi_fundamental(delta, t_pt, t_foot);
        const double orient = t_foot >= t_pt ? 1.0 : -1.0;
        z_real = std::pow(info.res.omega, 1.0 - delta) * orient * fund.z;
        zdot_real = fund.zdot;
    }
    const double second = geometry::second_variation(
        delta, info.y_min, info.line.theta1, info.res.d, z_real, zdot_real,
        info.res.side);
    return info.res.d * second;
}

} // namespace

geometry::LineSpec StrikeLine::line() const {
    geometry::LineSpec spec;
    spec.theta1 = theta1;
    // boundary crossing: X(0) = anchor.x - anchor.y * cot(theta1), and the
    // angle satisfies cos/sin = -rho/q exactly by construction
    spec.qx = anchor.x - anchor.y * std::cos(theta1) / std::sin(theta1);
    return spec;
}

StrikeLine strike_line(const kernel::IsometrySpec& spec, double K) {
    spec.validate();
    if (!(K > 0.0))
        throw InvalidParameter("strike_line: K must be > 0, got " + std::to_string(K));
    const double q = std::sqrt(1.0 - spec.rho * spec.rho);
    StrikeLine line;
    line.theta1 = std::atan2(q, -spec.rho);
    line.anchor = kernel::phi_forward(spec, {K, 1.0, geometry::Frame::ModelSpace});
    return line;
}

double laplace_expand(const geometry::PhaseDerivatives& pd, double s, double g_term) {
    if (!(s > 0.0))
        throw InvalidParameter("laplace_expand: s must be > 0, got " +
                               std::to_string(s));
    if (!(pd.d2 > 0.0))
        throw NotAMinimum("laplace_expand: phase'' must be > 0, got " +
                          std::to_string(pd.d2));
    const double d2 = pd.d2;
    const double bracket = g_term + pd.f2 / (2.0 * d2) -
                           pd.d4 * pd.f0 / (8.0 * d2 * d2) -
                           pd.f1 * pd.d3 / (2.0 * d2 * d2) +
                           5.0 * pd.d3 * pd.d3 * pd.f0 / (24.0 * d2 * d2 * d2);
    return std::sqrt(2.0 * kPi * s / d2) * (pd.f0 + s * bracket);
}

DigitalDetail digital_density_detail(const model::ModelParams& params, double tau,
                                     double f0, double sigma0, double K) {
    params.validate();
    check_market_inputs(tau, f0, sigma0, K, "digital_density_detail");
    if (!(params.nu > 0.0))
        throw DegenerateModel(
            "digital_density_detail: nu must be > 0 (local-volatility limit has "
            "no strike-line image), got " +
            std::to_string(params.nu));

    const double delta = params.delta;
    const FootInfo info = solve_foot(params, f0, sigma0, K);
    const double s = info.eff.s_scale * tau;
    const kernel::DriftField field{info.spec, info.eff.lambda, info.eff.mu};

    DigitalDetail out;
    out.s = s;
    out.atm = info.atm;
    out.theta1 = info.line.theta1;
    out.theta2 = info.theta2;
    out.y_min = info.y_min;
    out.sigma_min = std::pow(params.nu, delta) * info.y_min;
    out.i_delta = out.sigma_min / sigma0;
    out.d = info.atm ? 0.0 : info.res.d;
    out.k1 = kernel::k1_origin(delta, field.at(info.source));
    out.feller_ok =
        model::feller_classify(delta, params.lambda_raw, params.mu_raw, params.nu)
            .verdict != model::Verdict::ExplosionPossible;
    const double q = std::sqrt(1.0 - params.rho * params.rho);
    out.conversion = std::pow(params.nu, 1.0 - delta) / (q * std::pow(K, params.beta));

    // amplitudes along the line at the foot and one step either side
    const double cot1 = std::cos(info.line.theta1) / std::sin(info.line.theta1);
    auto line_point = [&](double Y) {
        return geometry::HalfPlanePoint{info.line.qx + Y * cot1, Y,
                                        geometry::Frame::DeltaSpace};
    };
    double w_foot = 0.0;
    auto amplitudes = [&](double Y, double& weighted, double& unweighted,
                          bool record_w) {
        const kernel::KernelTerms terms =
            kernel::kernel_terms(info.spec, info.eff.lambda, info.eff.mu,
                                 info.source, line_point(Y), s);
        const double spread = terms.d < 1e-9 ? 1.0 : std::sqrt(terms.d / terms.z);
        unweighted = std::exp(terms.w) * spread;
        weighted = unweighted * std::pow(Y, -2.0 * delta);
        if (record_w) w_foot = terms.w;
    };
    const double h = 1e-2 * info.y_min;
    double a0, b0, ap, bp, am, bm;
    amplitudes(info.y_min, a0, b0, true);
    amplitudes(info.y_min + h, ap, bp, false);
    amplitudes(info.y_min - h, am, bm, false);
    out.w = w_foot;

    geometry::PhaseDerivatives pd;
    pd.d2 = exact_phase2(info, delta);
    const geometry::PhaseDerivatives atm_pd =
        geometry::phase_derivatives_atm(delta, info.source.y, info.line.theta1);
    pd.d3 = atm_pd.d3;
    pd.d4 = atm_pd.d4;
    out.phase2 = pd.d2;

    const double gauss_weight = std::exp(-out.d * out.d / (2.0 * s)) / (2.0 * kPi * s);
    const double moment_scale =
        std::pow(params.nu, 2.0 * delta * delta) * out.conversion * gauss_weight;

    geometry::PhaseDerivatives pd_zero = pd;
    pd_zero.d3 = pd_zero.d4 = 0.0;

    // density: amplitude carries the 1/Y^{2 delta} volume weight
    pd.f0 = a0;
    pd.f1 = (ap - am) / (2.0 * h);
    pd.f2 = (ap - 2.0 * a0 + am) / (h * h);
    pd_zero.f0 = a0;
    pd_zero.f1 = pd_zero.f2 = 0.0;
    out.p0 = out.conversion * gauss_weight * laplace_expand(pd_zero, s, 0.0);
    out.p1 = out.conversion * gauss_weight * laplace_expand(pd, s, out.k1 * pd.f0);

    // moment: unweighted amplitude, extra nu^{2 delta^2} Sigma-scale
    pd.f0 = b0;
    pd.f1 = (bp - bm) / (2.0 * h);
    pd.f2 = (bp - 2.0 * b0 + bm) / (h * h);
    pd_zero.f0 = b0;
    out.m0 = moment_scale * laplace_expand(pd_zero, s, 0.0);
    out.m1 = moment_scale * laplace_expand(pd, s, out.k1 * pd.f0);
    return out;
}

double digital_density_P(const model::ModelParams& params, double tau, double f0,
                         double sigma0, double K, int order) {
    check_order(order, "digital_density_P");
    const DigitalDetail detail = digital_density_detail(params, tau, f0, sigma0, K);
    return order == 0 ? detail.p0 : detail.p1;
}

double sabr_closed_form_P(const model::ModelParams& params, double tau, double f0,
                          double sigma0, double K, int order) {
    params.validate();
    check_market_inputs(tau, f0, sigma0, K, "sabr_closed_form_P");
    check_order(order, "sabr_closed_form_P");
    if (params.delta != 1.0)
        throw InvalidParameter("sabr_closed_form_P: requires delta = 1, got " +
                               std::to_string(params.delta));
    if (!(params.beta < 1.0))
        throw InvalidParameter("sabr_closed_form_P: requires beta < 1, got " +
                               std::to_string(params.beta));
    if (!(params.nu > 0.0))
        throw DegenerateModel("sabr_closed_form_P: nu must be > 0, got " +
                              std::to_string(params.nu));

    const SabrGeometry geo =
        make_sabr_geometry(params.beta, params.rho, params.nu, f0, sigma0, K);
    const kernel::EffectiveParams eff = kernel::effective_params(params);
    const kernel::SabrWork work =
        kernel::sabr_work_closed_form(geo, params.beta, params.rho, eff.lambda,
                                      eff.mu);
    const double s = params.nu * params.nu * tau;
    const double correction =
        1.0 + order * (4.0 - 5.0 * params.rho * params.rho) / 24.0 * s;
    return std::exp(work.total() - geo.d * geo.d / (2.0 * s)) /
           (std::pow(K, params.beta) * sigma0 * std::pow(geo.i, 1.5) *
            std::sqrt(2.0 * kPi * tau)) *
           correction;
}

double conditional_moment_M(const model::ModelParams& params, double tau,
                            double f0, double sigma0, double K) {
    return digital_density_detail(params, tau, f0, sigma0, K).m0;
}

double local_vol(const model::ModelParams& params, double /*tau*/, double f0,
                 double sigma0, double K) {
    params.validate();
    if (!(f0 > 0.0) || !(sigma0 > 0.0) || !(K > 0.0))
        throw InvalidParameter("local_vol: f0, sigma0, K must be > 0, got f0 = " +
                               std::to_string(f0) + ", sigma0 = " +
                               std::to_string(sigma0) + ", K = " + std::to_string(K));
    const double c_K = std::pow(K, params.beta);
    if (params.nu == 0.0) return std::pow(sigma0, params.delta) * c_K;
    const FootInfo info = solve_foot(params, f0, sigma0, K);
    const double sigma_min = std::pow(params.nu, params.delta) * info.y_min;
    return std::pow(sigma_min, params.delta) * c_K;
}

double f_av(double K, double f0, bool printed_form) {
    if (!(K > 0.0) || !(f0 > 0.0))
        throw InvalidParameter("f_av: K and f0 must be > 0, got K = " +
                               std::to_string(K) + ", f0 = " + std::to_string(f0));
    const double t = std::log(K / f0);
    const double denom_halves = printed_form ? 1.0 : 2.0;
    if (t == 0.0) return printed_form ? f0 * std::sqrt(2.0) : f0;
    // (K^2 - f0^2) / (denom * t) = f0^2 expm1(2t) / (denom * t), stable near t = 0
    return f0 * std::sqrt(std::expm1(2.0 * t) / (denom_halves * t));
}

double implied_vol(const model::ModelParams& params, double tau, double f0,
                   double sigma0, double K, int order) {
    params.validate();
    check_order(order, "implied_vol");
    if (!(f0 > 0.0) || !(sigma0 > 0.0) || !(K > 0.0) || !(tau > 0.0))
        throw InvalidParameter("implied_vol: tau, f0, sigma0, K must be > 0");
    const double beta = params.beta;
    const double fav = f_av(K, f0);
    const double moneyness = (K - f0) / fav;
    const double bracket =
        1.0 + (1.0 - beta) * (2.0 + beta) / 24.0 * moneyness * moneyness;

    // effective lognormal-vol amplitude: the CEV factor is evaluated at the
    // averaged forward (c(f_av)/f_av = f_av^{beta-1}), which keeps the nu = 0,
    // beta = 1 smile exactly flat and matches the Monte Carlo wings; the
    // strike-local factor c(K) belongs to local_vol, not to this conversion
    double amplitude;
    if (params.nu == 0.0) {
        amplitude = std::pow(sigma0, params.delta);
    } else if (order == 0) {
        const FootInfo info = solve_foot(params, f0, sigma0, K);
        const double sigma_min = std::pow(params.nu, params.delta) * info.y_min;
        amplitude = std::pow(sigma_min, params.delta);
    } else {
        const DigitalDetail detail = digital_density_detail(params, tau, f0, sigma0, K);
        const double ratio = detail.m1 / detail.p1;
        if (!(ratio > 0.0))
            throw NumericalFailure(
                "implied_vol: order-1 moment ratio M/P = " + std::to_string(ratio) +
                " is not positive at K = " + std::to_string(K));
        amplitude = std::sqrt(ratio);
    }
    return amplitude * std::pow(fav, beta - 1.0) * bracket;
}

std::vector<SmilePoint> smile_curve(const model::ModelParams& params, double tau,
                                    double f0, double sigma0,
                                    const std::vector<double>& strikes, int order,
                                    bool parallel) {
    params.validate();
    check_order(order, "smile_curve");
    std::vector<SmilePoint> points(strikes.size());
    const std::int64_t n = static_cast<std::int64_t>(strikes.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::int64_t idx = 0; idx < n; ++idx) {
        SmilePoint& pt = points[static_cast<std::size_t>(idx)];
        const double K = strikes[static_cast<std::size_t>(idx)];
        pt.strike = K;
        pt.order = order;
        try {
            pt.sigma_local = local_vol(params, tau, f0, sigma0, K);
            pt.f_average = f_av(K, f0);
            pt.sigma_implied = implied_vol(params, tau, f0, sigma0, K, order);
            if (params.nu > 0.0) {
                const FootInfo info = solve_foot(params, f0, sigma0, K);
                pt.y_min = info.y_min;
                pt.sigma_min = std::pow(params.nu, params.delta) * info.y_min;
                pt.i_delta = pt.sigma_min / sigma0;
            } else {
                pt.y_min = 0.0;
                pt.sigma_min = sigma0;
                pt.i_delta = 1.0;
            }
        } catch (const std::exception& err) {
            pt.ok = false;
            pt.error = err.what();
        }
    }
    return points;
}

double distribution_mass(const model::ModelParams& params, double tau, double f0,
                         double sigma0, int order, int n_strikes) {
    params.validate();
    check_order(order, "distribution_mass");
    check_market_inputs(tau, f0, sigma0, 1.0, "distribution_mass");
    if (n_strikes < 8)
        throw InvalidParameter("distribution_mass: need at least 8 strikes, got " +
                               std::to_string(n_strikes));
    const double atm_vol = implied_vol(params, tau, f0, sigma0, f0, 0);
    const double width = 6.0 * atm_vol * std::sqrt(tau);
    const double u_lo = std::log(f0) - width;
    const double du = 2.0 * width / (n_strikes - 1);
    double mass = 0.0;
    double prev = 0.0;
    for (int i = 0; i < n_strikes; ++i) {
        const double K = std::exp(u_lo + i * du);
        const double integrand =
            digital_density_P(params, tau, f0, sigma0, K, order) * K;
        if (i > 0) mass += 0.5 * (prev + integrand) * du;
        prev = integrand;
    }
    return mass;
}

} // namespace deltasmile::pricing
