#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deltasmile/numerics.hpp"
#include "deltasmile/pricing.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace dsm = deltasmile;
namespace geo = deltasmile::geometry;
namespace ker = deltasmile::kernel;
namespace prc = deltasmile::pricing;

namespace {

constexpr double kPi = 3.14159265358979323846;

dsm::model::ModelParams make_params(double delta, double beta, double nu,
                                    double rho, double lambda = 0.0,
                                    double mu = 0.0) {
    dsm::model::ModelParams p;
    p.delta = delta;
    p.beta = beta;
    p.nu = nu;
    p.rho = rho;
    p.lambda_raw = lambda;
    p.mu_raw = mu;
    return p;
}

geo::PhaseDerivatives make_pd(double d2, double d3, double d4, double f0,
                              double f1, double f2) {
    geo::PhaseDerivatives pd;
    pd.d2 = d2;
    pd.d3 = d3;
    pd.d4 = d4;
    pd.f0 = f0;
    pd.f1 = f1;
    pd.f2 = f2;
    return pd;
}

/// Integral of the order-`order` kernel along the strike line, as an
/// independent check of the Laplace expansion.
double line_integral_P(const dsm::model::ModelParams& params, double tau,
                       double f0, double sigma0, double K, int order) {
    const auto spec = ker::IsometrySpec::from_model(params);
    const auto eff = ker::effective_params(params);
    const double s = eff.s_scale * tau;
    const auto source = ker::phi_forward(
        spec, {f0, sigma0 / params.nu, geo::Frame::ModelSpace});
    const auto line = prc::strike_line(spec, K).line();
    const double cot1 = std::cos(line.theta1) / std::sin(line.theta1);
    const double q = std::sqrt(1.0 - params.rho * params.rho);
    const double conv =
        std::pow(params.nu, 1.0 - params.delta) / (q * std::pow(K, params.beta));
    const double y_ref = source.y;
    auto integrand = [&](double Y) {
        geo::HalfPlanePoint pt{line.qx + Y * cot1, Y, geo::Frame::DeltaSpace};
        return ker::heat_kernel_density(spec, source, pt, s, order, eff.lambda,
                                        eff.mu) *
               std::pow(Y, -2.0 * params.delta);
    };
    return conv * dsm::numerics::integrate(integrand, y_ref / 8.0, y_ref * 8.0,
                                           1e-9);
}

} // namespace

TEST_CASE("laplace expansion: pure Gaussian is exact") {
    const auto pd = make_pd(2.0, 0.0, 0.0, 3.5, 0.0, 0.0);
    for (double s : {0.5, 0.1, 0.01}) {
        const double expect = 3.5 * std::sqrt(kPi * s);
        CHECK(prc::laplace_expand(pd, s) == doctest::Approx(expect).epsilon(1e-14));
        const double quad = dsm::numerics::integrate(
            [](double u) { return 3.5 * std::exp(-u * u); }, -12.0, 12.0, 1e-12);
        CHECK(prc::laplace_expand(pd, s) ==
              doctest::Approx(std::sqrt(s) * quad).epsilon(1e-10));
    }
}

TEST_CASE("laplace expansion: quadratic amplitude term is exact") {
    // f(u) = 1 + g u^2 against phase u^2/2: integral is sqrt(2 pi s)(1 + g s)
    const double g = 0.8;
    const auto pd = make_pd(1.0, 0.0, 0.0, 1.0, 0.0, 2.0 * g);
    for (double s : {0.2, 0.05}) {
        const double expect = std::sqrt(2.0 * kPi * s) * (1.0 + g * s);
        CHECK(prc::laplace_expand(pd, s) == doctest::Approx(expect).epsilon(1e-14));
        const double quad = dsm::numerics::integrate(
            [&](double u) {
                return (1.0 + g * u * u) * std::exp(-u * u / (2.0 * s));
            },
            -10.0, 10.0, 1e-12);
        CHECK(expect == doctest::Approx(quad).epsilon(1e-10));
    }
}

TEST_CASE("laplace expansion: quartic phase error shrinks like s^2") {
    // phase u^2/2 + u^4/4 has phase4 = 6, so L = sqrt(2 pi s)(1 - 0.75 s)
    const auto pd = make_pd(1.0, 0.0, 6.0, 1.0, 0.0, 0.0);
    auto rel_err = [&](double s) {
        const double quad = dsm::numerics::integrate(
            [&](double u) {
                return std::exp(-(u * u / 2.0 + u * u * u * u / 4.0) / s);
            },
            -10.0, 10.0, 1e-13);
        const double expansion = prc::laplace_expand(pd, s);
        CHECK(expansion ==
              doctest::Approx(std::sqrt(2.0 * kPi * s) * (1.0 - 0.75 * s))
                  .epsilon(1e-14));
        return std::abs(expansion - quad) / quad;
    };
    const double e1 = rel_err(0.05);
    const double e2 = rel_err(0.025);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.5);
}

TEST_CASE("laplace expansion: cubic-phase cross terms carry the right weight") {
    // phase u^2/2 + a u^3/6, amplitude 1 + c u: the s-coefficient of
    // I(s)/sqrt(2 pi s) is -c a/2 + 5 a^2/24
    const double a = 0.4, c = 0.7;
    const double expect_C = -c * a / 2.0 + 5.0 * a * a / 24.0;
    auto coeff = [&](double s) {
        const double quad = dsm::numerics::integrate(
            [&](double u) {
                return (1.0 + c * u) *
                       std::exp(-(u * u / 2.0 + a * u * u * u / 6.0) / s);
            },
            -1.5, 1.5, 1e-13);
        return (quad / std::sqrt(2.0 * kPi * s) - 1.0) / s;
    };
    const double c1 = coeff(0.01);
    const double c2 = coeff(0.005);
    const double richardson = 2.0 * c2 - c1;
    CHECK(richardson == doctest::Approx(expect_C).epsilon(0.02));
    const auto pd = make_pd(1.0, a, 0.0, 1.0, c, 0.0);
    CHECK(prc::laplace_expand(pd, 0.01) ==
          doctest::Approx(std::sqrt(2.0 * kPi * 0.01) * (1.0 + 0.01 * expect_C))
              .epsilon(1e-14));
}

TEST_CASE("laplace expansion: input validation") {
    const auto pd = make_pd(-1.0, 0.0, 0.0, 1.0, 0.0, 0.0);
    CHECK_THROWS_AS(prc::laplace_expand(pd, 0.1), dsm::NotAMinimum);
    const auto ok = make_pd(1.0, 0.0, 0.0, 1.0, 0.0, 0.0);
    CHECK_THROWS_AS(prc::laplace_expand(ok, 0.0), dsm::InvalidParameter);
    CHECK_THROWS_AS(prc::laplace_expand(ok, -1.0), dsm::InvalidParameter);
}

TEST_CASE("strike line: mapped strike points lie on the reported line") {
    for (double rho : {-0.6, 0.0, 0.45}) {
        const auto params = make_params(0.7, 0.5, 0.4, rho);
        const auto spec = ker::IsometrySpec::from_model(params);
        const auto sl = prc::strike_line(spec, 1.3);
        const auto line = sl.line();
        const double q = std::sqrt(1.0 - rho * rho);
        CHECK(sl.theta1 == doctest::Approx(std::atan2(q, -rho)).epsilon(1e-15));
        for (double y : {0.4, 1.0, 2.7}) {
            const auto img =
                ker::phi_forward(spec, {1.3, y, geo::Frame::ModelSpace});
            const double x_line =
                line.qx + img.y * std::cos(line.theta1) / std::sin(line.theta1);
            CHECK(img.x == doctest::Approx(x_line).epsilon(1e-12));
        }
    }
    const auto vertical = make_params(1.0, 0.5, 0.3, 0.0);
    const auto spec0 = ker::IsometrySpec::from_model(vertical);
    CHECK(prc::strike_line(spec0, 2.0).theta1 ==
          doctest::Approx(kPi / 2.0).epsilon(1e-15));
    CHECK_THROWS_AS(prc::strike_line(spec0, -1.0), dsm::InvalidParameter);
}

TEST_CASE("digital density: at-the-money collapses to the normal prefactor") {
    for (double delta : {1.0, 0.7, 0.5}) {
        const auto params = make_params(delta, 0.5, 0.3, -0.3, 0.4, 0.25);
        const double tau = 0.25, f0 = 1.1, sigma0 = 0.2;
        const auto detail =
            prc::digital_density_detail(params, tau, f0, sigma0, f0);
        CHECK(detail.atm);
        CHECK(detail.d == 0.0);
        CHECK(detail.i_delta == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(detail.sigma_min == doctest::Approx(sigma0).epsilon(1e-12));
        const double expect = 1.0 / (std::pow(f0, 0.5) * std::pow(sigma0, delta) *
                                     std::sqrt(2.0 * kPi * tau));
        CHECK(detail.p0 == doctest::Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("digital density: delta = 1 pipeline matches the closed form") {
    const auto params = make_params(1.0, 0.5, 0.3, -0.3);
    const double f0 = 1.0, sigma0 = 0.2;
    for (double tau : {0.05, 0.25, 1.0}) {
        for (double K : {0.6, 0.75, 0.9, 1.0, 1.1, 1.3, 1.6}) {
            const double pipeline =
                prc::digital_density_P(params, tau, f0, sigma0, K, 0);
            const double closed =
                prc::sabr_closed_form_P(params, tau, f0, sigma0, K, 0);
            CHECK(pipeline == doctest::Approx(closed).epsilon(1e-6));
        }
    }
}

TEST_CASE("digital density: delta = 1 pipeline matches closed form with "
          "mean reversion") {
    const auto params = make_params(1.0, 0.5, 0.3, -0.3, 0.8, 0.3);
    const double f0 = 1.0, sigma0 = 0.2, tau = 0.25;
    for (double K : {0.7, 1.0, 1.4}) {
        const double pipeline =
            prc::digital_density_P(params, tau, f0, sigma0, K, 0);
        const double closed =
            prc::sabr_closed_form_P(params, tau, f0, sigma0, K, 0);
        CHECK(pipeline == doctest::Approx(closed).epsilon(1e-6));
    }
}

TEST_CASE("closed form: zero-correlation order-1 factor") {
    const auto params = make_params(1.0, 0.5, 0.3, 0.0);
    const double tau = 0.4, f0 = 1.0, sigma0 = 0.25, K = 1.2;
    const double p0 = prc::sabr_closed_form_P(params, tau, f0, sigma0, K, 0);
    const double p1 = prc::sabr_closed_form_P(params, tau, f0, sigma0, K, 1);
    const double factor = 1.0 + params.nu * params.nu * tau / 6.0;
    CHECK(p1 / p0 == doctest::Approx(factor).epsilon(1e-14));
    CHECK_THROWS_AS(prc::sabr_closed_form_P(make_params(0.7, 0.5, 0.3, 0.0), tau,
                                            f0, sigma0, K, 0),
                    dsm::InvalidParameter);
    CHECK_THROWS_AS(prc::sabr_closed_form_P(make_params(1.0, 1.0, 0.3, 0.0), tau,
                                            f0, sigma0, K, 0),
                    dsm::InvalidParameter);
}

TEST_CASE("digital density: order-1 at-the-money coefficient for the "
          "uncorrelated flat-drift lognormal model is 1/4") {
    const auto params = make_params(1.0, 0.0, 0.3, 0.0, 0.0, 0.0);
    const double f0 = 1.0, sigma0 = 0.2;
    for (double tau : {0.5, 0.25}) {
        const auto detail =
            prc::digital_density_detail(params, tau, f0, sigma0, f0);
        const double coeff = (detail.p1 / detail.p0 - 1.0) / detail.s;
        CHECK(coeff == doctest::Approx(0.25).epsilon(8e-3));
    }
}

TEST_CASE("digital density: Laplace values track the line integral") {
    const auto params = make_params(1.0, 0.0, 0.3, 0.0, 0.0, 0.0);
    const double f0 = 1.0, sigma0 = 0.2, tau = 0.5; // s = nu^2 tau = 0.045
    const auto detail = prc::digital_density_detail(params, tau, f0, sigma0, f0);
    const double i0 = line_integral_P(params, tau, f0, sigma0, f0, 0);
    const double i1 = line_integral_P(params, tau, f0, sigma0, f0, 1);
    const double err0 = std::abs(detail.p0 / i0 - 1.0);
    const double err1 = std::abs(detail.p1 / i1 - 1.0);
    CHECK(err0 < 0.03);
    CHECK(err1 < 5e-3);
    CHECK(err1 < err0 / 3.0);
}

TEST_CASE("digital density: off-money order-0 value tracks the line integral") {
    const auto params = make_params(1.0, 0.5, 0.3, -0.3);
    const double f0 = 1.0, sigma0 = 0.2, tau = 0.1, K = 1.15;
    const double p0 = prc::digital_density_P(params, tau, f0, sigma0, K, 0);
    const double i0 = line_integral_P(params, tau, f0, sigma0, K, 0);
    CHECK(p0 == doctest::Approx(i0).epsilon(0.02));
}

TEST_CASE("digital density: far strikes decay") {
    const auto params = make_params(1.0, 0.5, 0.3, -0.3);
    const double f0 = 1.0, sigma0 = 0.2, tau = 0.1;
    const double p15 = prc::digital_density_P(params, tau, f0, sigma0, 1.5, 0);
    const double p20 = prc::digital_density_P(params, tau, f0, sigma0, 2.0, 0);
    const double p30 = prc::digital_density_P(params, tau, f0, sigma0, 3.0, 0);
    CHECK(p15 > p20);
    CHECK(p20 > p30);
    CHECK(p30 > 0.0);
}

TEST_CASE("digital density: positivity across regimes") {
    const auto params = make_params(0.7, 0.5, 0.4, -0.2, 0.5, 0.3);
    const double f0 = 1.2, sigma0 = 0.3, tau = 0.1;
    for (double K : {0.7, 0.9, 1.2, 1.5, 2.0}) {
        const auto detail = prc::digital_density_detail(params, tau, f0, sigma0, K);
        CHECK(detail.p0 > 0.0);
        CHECK(detail.m0 > 0.0);
        CHECK(detail.phase2 > 0.0);
    }
}

TEST_CASE("digital density: input validation") {
    const auto params = make_params(1.0, 0.5, 0.3, -0.3);
    CHECK_THROWS_AS(prc::digital_density_P(params, -0.1, 1.0, 0.2, 1.0, 0),
                    dsm::InvalidParameter);
    CHECK_THROWS_AS(prc::digital_density_P(params, 0.1, 1.0, 0.2, 1.0, 2),
                    dsm::InvalidParameter);
    CHECK_THROWS_AS(
        prc::digital_density_P(make_params(1.0, 0.5, 0.0, 0.0), 0.1, 1.0, 0.2,
                               1.0, 0),
        dsm::DegenerateModel);
}

TEST_CASE("digital density: boundary-classification flag is reported, not "
          "enforced") {
    // delta = 1/2 with 2 lambda' mu' / nu^2 < 1: explosion possible
    const auto params = make_params(0.5, 0.5, 0.3, -0.2, 0.1, 0.1);
    const auto detail = prc::digital_density_detail(params, 0.2, 1.0, 0.25, 1.1);
    CHECK_FALSE(detail.feller_ok);
    CHECK(detail.p0 > 0.0);
    const auto safe = make_params(0.5, 0.5, 0.3, -0.2, 1.0, 0.5);
    CHECK(prc::digital_density_detail(safe, 0.2, 1.0, 0.25, 1.1).feller_ok);
}

TEST_CASE("conditional moment: ratio to the density is the most likely "
          "volatility squared-power") {
    const auto params = make_params(0.7, 0.5, 0.4, -0.2, 0.5, 0.3);
    const double f0 = 1.2, sigma0 = 0.3, tau = 0.15;
    for (double K : {0.9, 1.2, 1.6}) {
        const auto detail = prc::digital_density_detail(params, tau, f0, sigma0, K);
        const double expect = std::pow(detail.sigma_min, 2.0 * params.delta);
        CHECK(detail.m0 / detail.p0 == doctest::Approx(expect).epsilon(1e-12));
        CHECK(prc::conditional_moment_M(params, tau, f0, sigma0, K) ==
              doctest::Approx(detail.m0).epsilon(1e-15));
    }
    // at the money the most likely volatility is sigma0 itself
    const auto atm = prc::digital_density_detail(params, tau, f0, sigma0, f0);
    CHECK(atm.m0 / atm.p0 ==
          doctest::Approx(std::pow(sigma0, 2.0 * params.delta)).epsilon(1e-11));
}

TEST_CASE("conditional moment: ratio approaches sigma0^(2 delta) as nu -> 0") {
    const double f0 = 1.0, sigma0 = 0.2, tau = 0.15, K = 0.9;
    const double target = std::pow(sigma0, 2.0 * 0.7);
    double prev_gap = 1e9;
    for (double nu : {0.2, 0.05, 0.01}) {
        const auto params = make_params(0.7, 0.5, nu, -0.3);
        const auto detail = prc::digital_density_detail(params, tau, f0, sigma0, K);
        const double gap = std::abs(detail.m0 / detail.p0 - target);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3);
}

TEST_CASE("local volatility: deterministic-volatility limit is exact") {
    const auto params = make_params(0.8, 0.6, 0.0, 0.0, 0.3, 0.2);
    for (double K : {0.5, 1.0, 1.7}) {
        const double expect = std::pow(0.25, 0.8) * std::pow(K, 0.6);
        CHECK(prc::local_vol(params, 0.3, 1.0, 0.25, K) ==
              doctest::Approx(expect).epsilon(1e-15));
    }
}

TEST_CASE("local volatility: at the money the foot ratio is one") {
    const auto params = make_params(0.7, 0.5, 0.4, -0.2);
    const double expect = std::pow(0.3, 0.7) * std::pow(1.2, 0.5);
    CHECK(prc::local_vol(params, 0.3, 1.2, 0.3, 1.2) ==
          doctest::Approx(expect).epsilon(1e-11));
}

TEST_CASE("local volatility: delta = 1 foot ratio matches the circle chord") {
    const auto params = make_params(1.0, 0.5, 0.3, -0.4);
    const double f0 = 1.0, sigma0 = 0.2;
    for (double K : {0.6, 0.85, 1.2, 1.8}) {
        const auto geom = prc::make_sabr_geometry(0.5, -0.4, 0.3, f0, sigma0, K);
        const double expect = sigma0 * geom.i * std::pow(K, 0.5);
        CHECK(prc::local_vol(params, 0.3, f0, sigma0, K) ==
              doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("local volatility: continuous across the foot-angle branch") {
    const auto params = make_params(0.7, 0.5, 0.25, -0.5, 0.4, 0.3);
    const double f0 = 1.0, sigma0 = 0.25;
    double prev = prc::local_vol(params, 0.3, f0, sigma0, 0.5);
    double max_jump = 0.0;
    for (double K = 0.50025; K <= 2.0; K += 0.00025) {
        const double cur = prc::local_vol(params, 0.3, f0, sigma0, K);
        max_jump = std::max(max_jump, std::abs(cur - prev));
        prev = cur;
    }
    CHECK(max_jump < 1e-4);
}

TEST_CASE("average forward: frozen value, symmetry, and the money limit") {
    CHECK(prc::f_av(2.0, 1.0) ==
          doctest::Approx(1.4710685100747161).epsilon(1e-14));
    CHECK(prc::f_av(2.0, 1.0) == doctest::Approx(prc::f_av(1.0, 2.0)).epsilon(1e-14));
    CHECK(prc::f_av(1.3, 1.3) == 1.3);
    CHECK(prc::f_av(1.0 + 1e-9, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
    // lies between the two forwards
    CHECK(prc::f_av(2.0, 1.0) > 1.0);
    CHECK(prc::f_av(2.0, 1.0) < 2.0);
    CHECK_THROWS_AS(prc::f_av(-1.0, 1.0), dsm::InvalidParameter);
}

TEST_CASE("average forward: variant without the factor two tends to "
          "f0 sqrt(2) at the money") {
    CHECK(prc::f_av(1.3, 1.3, true) ==
          doctest::Approx(1.3 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(prc::f_av(1.3 + 1e-10, 1.3, true) ==
          doctest::Approx(1.3 * std::sqrt(2.0)).epsilon(1e-8));
    CHECK(prc::f_av(2.0, 1.0, true) ==
          doctest::Approx(std::sqrt(3.0 / std::log(2.0))).epsilon(1e-14));
}

TEST_CASE("implied volatility: at the money with beta = 1 collapses to "
          "sigma0^delta") {
    const auto params = make_params(0.5, 1.0, 0.3, -0.2, 0.4, 0.3);
    CHECK(prc::implied_vol(params, 0.25, 1.4, 0.2, 1.4, 0) ==
          doctest::Approx(std::pow(0.2, 0.5)).epsilon(1e-11));
}

TEST_CASE("implied volatility: deterministic-volatility mapping") {
    const auto params = make_params(0.8, 0.5, 0.0, 0.0);
    const double sigma0 = 0.25, f0 = 1.0;
    for (double K : {0.7, 1.0, 1.5}) {
        const double fav = prc::f_av(K, f0);
        const double m = (K - f0) / fav;
        const double expect = std::pow(sigma0, 0.8) * std::pow(fav, -0.5) *
                              (1.0 + 5.0 / 96.0 * m * m);
        CHECK(prc::implied_vol(params, 0.25, f0, sigma0, K, 0) ==
              doctest::Approx(expect).epsilon(1e-14));
    }

    // exact benchmark: nu = 0 with beta = 1 is a lognormal forward with vol
    // sigma0^delta, so the implied-vol curve must be perfectly flat
    const auto lognormal = make_params(0.8, 1.0, 0.0, 0.0);
    for (double K : {0.6, 0.9, 1.0, 1.3, 2.0})
        CHECK(prc::implied_vol(lognormal, 0.25, f0, sigma0, K, 0) ==
              doctest::Approx(std::pow(sigma0, 0.8)).epsilon(1e-14));
}

TEST_CASE("implied volatility: order-1 stays near order-0 at short maturity") {
    const auto params = make_params(1.0, 0.5, 0.3, -0.3);
    const double f0 = 1.0, sigma0 = 0.2, tau = 0.1;
    for (double K : {0.85, 1.0, 1.2}) {
        const double v0 = prc::implied_vol(params, tau, f0, sigma0, K, 0);
        const double v1 = prc::implied_vol(params, tau, f0, sigma0, K, 1);
        CHECK(v1 == doctest::Approx(v0).epsilon(0.02));
        CHECK(v1 != v0);
    }
}

TEST_CASE("smile: zero correlation turns both wings up") {
    // at beta = 1 the averaged-forward backbone is flat, so the curve is the
    // pure geometric smile sigma0 * i and both wings must rise
    const auto params = make_params(1.0, 1.0, 0.6, 0.0);
    const double f0 = 1.0, sigma0 = 0.15, tau = 0.2;
    const std::vector<double> strikes{std::exp(-0.3), std::exp(-0.15), 1.0,
                                      std::exp(0.15), std::exp(0.3)};
    const auto curve = prc::smile_curve(params, tau, f0, sigma0, strikes, 0);
    REQUIRE(curve.size() == 5);
    for (const auto& pt : curve) CHECK(pt.ok);
    CHECK(curve[2].sigma_implied ==
          doctest::Approx(std::pow(sigma0, 1.0)).epsilon(1e-10));
    CHECK(curve[1].sigma_implied > curve[2].sigma_implied);
    CHECK(curve[0].sigma_implied > curve[1].sigma_implied);
    CHECK(curve[3].sigma_implied > curve[2].sigma_implied);
    CHECK(curve[4].sigma_implied > curve[3].sigma_implied);
}

TEST_CASE("smile: parallel and serial runs agree bit for bit") {
    const auto params = make_params(0.7, 0.5, 0.4, -0.2, 0.5, 0.3);
    std::vector<double> strikes;
    for (int i = 0; i < 24; ++i) strikes.push_back(0.6 + 0.05 * i);
    const auto par = prc::smile_curve(params, 0.2, 1.2, 0.3, strikes, 0, true);
    const auto ser = prc::smile_curve(params, 0.2, 1.2, 0.3, strikes, 0, false);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].sigma_implied == ser[i].sigma_implied);
        CHECK(par[i].sigma_local == ser[i].sigma_local);
        CHECK(par[i].y_min == ser[i].y_min);
    }
}

TEST_CASE("smile: a failing strike is recorded and the curve continues") {
    const auto params = make_params(1.0, 0.5, 0.3, -0.3);
    const std::vector<double> strikes{0.8, -0.5, 1.2};
    const auto curve = prc::smile_curve(params, 0.2, 1.0, 0.2, strikes, 0);
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].ok);
    CHECK_FALSE(curve[1].ok);
    CHECK_FALSE(curve[1].error.empty());
    CHECK(curve[2].ok);
}

TEST_CASE("smile: single at-the-money strike equals the direct call") {
    const auto params = make_params(1.0, 0.5, 0.3, -0.3);
    const auto curve =
        prc::smile_curve(params, 0.25, 1.0, 0.2, std::vector<double>{1.0}, 1);
    REQUIRE(curve.size() == 1);
    CHECK(curve[0].ok);
    CHECK(curve[0].sigma_implied ==
          doctest::Approx(prc::implied_vol(params, 0.25, 1.0, 0.2, 1.0, 1))
              .epsilon(1e-15));
    CHECK(curve[0].i_delta == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distribution mass: short maturity integrates to one") {
    const auto params = make_params(1.0, 0.5, 0.3, -0.3);
    const double mass = prc::distribution_mass(params, 0.25, 1.0, 0.2, 0);
    CHECK(mass > 0.95);
    CHECK(mass < 1.05);
    CHECK_THROWS_AS(prc::distribution_mass(params, 0.25, 1.0, 0.2, 0, 4),
                    dsm::InvalidParameter);
}

TEST_CASE("distribution mass: general exponent short maturity") {
    const auto params = make_params(0.7, 0.5, 0.4, -0.2, 0.5, 0.3);
    const double mass = prc::distribution_mass(params, 0.1, 1.2, 0.3, 0, 120);
    CHECK(mass > 0.9);
    CHECK(mass < 1.1);
}
