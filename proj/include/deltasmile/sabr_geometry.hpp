/**
 * @file sabr_geometry.hpp
 * @brief Closed hyperbolic geometry of the lognormal-volatility (delta = 1) case.
 *
 * In that case the half-plane image carries the standard hyperbolic metric and
 * the geodesic joining the spot image to the strike image is a circle centered
 * on the boundary. This header holds the dimensionless description of that
 * circle (endpoints, center, radius) together with the moneyness variables
 * zeta and i and the hyperbolic distance, all in volatility-rescaled
 * coordinates (X, Y) = ((J(x) - rho * sigma/nu) / sqrt(1-rho^2), sigma/nu)
 * with J(x) = x^{1-beta}/(1-beta) (log for beta = 1).
 */
#pragma once

#include "deltasmile/errors.hpp"

#include <cmath>
#include <string>

namespace deltasmile::pricing {

/// Circle geodesic data for the delta = 1 half-plane; all quantities
/// dimensionless.
struct SabrGeometry {
    double zeta = 0.0;   ///< (nu/sigma0) * (J(f0) - J(K)), signed moneyness
    double i = 1.0;      ///< sqrt(zeta^2 - 2 rho zeta + 1) = Y_end / Y_0
    double X0 = 0.0;     ///< spot image abscissa
    double Y0 = 1.0;     ///< spot image ordinate sigma0 / nu
    double Xend = 0.0;   ///< strike-side endpoint abscissa
    double Yend = 1.0;   ///< strike-side endpoint ordinate = Y0 * i
    double l = 0.0;      ///< circle center abscissa (center sits on y = 0)
    double r = 1.0;      ///< circle radius
    double a = 0.0;      ///< sqrt(1 - rho^2) * l / r
    double d = 0.0;      ///< hyperbolic distance |log((i + zeta - rho)/(1 - rho))|
    bool degenerate = false;  ///< endpoints coincide (at-the-money)
    bool vertical = false;    ///< endpoints share an abscissa (vertical geodesic)

    bool is_valid() const noexcept {
        if (!(Y0 > 0.0) || !(Yend > 0.0) || !(i > 0.0) || !(d >= 0.0)) return false;
        if (degenerate || vertical) return true;
        if (!(r > 0.0)) return false;
        const double e0 = (X0 - l) * (X0 - l) + Y0 * Y0 - r * r;
        const double e1 = (Xend - l) * (Xend - l) + Yend * Yend - r * r;
        return std::abs(e0) <= 1e-10 * r * r && std::abs(e1) <= 1e-10 * r * r;
    }

    void validate() const {
        if (!is_valid())
            throw InvalidGeometry(
                "SabrGeometry: endpoints (X0, Y0) = (" + std::to_string(X0) + ", " +
                std::to_string(Y0) + "), (Xend, Yend) = (" + std::to_string(Xend) +
                ", " + std::to_string(Yend) + ") are inconsistent with center " +
                std::to_string(l) + ", radius " + std::to_string(r));
    }
};

/**
 * @brief Build the circle geodesic joining the spot image to the strike image.
 *
 * @param beta  backbone exponent of c(F) = F^beta (beta in [0, 1])
 * @param rho   spot/vol correlation, |rho| < 1
 * @param nu    vol-of-vol, > 0
 * @param f0    spot forward, > 0
 * @param sigma0 spot volatility, > 0
 * @param K     strike, > 0
 *
 * At-the-money collapses to a single point (degenerate = true, d = 0); a
 * vertical chord is flagged instead of producing an infinite center.
 */
inline SabrGeometry make_sabr_geometry(double beta, double rho, double nu,
                                       double f0, double sigma0, double K) {
    if (!(beta >= 0.0 && beta <= 1.0))
        throw InvalidParameter("make_sabr_geometry: beta must lie in [0, 1], got " +
                               std::to_string(beta));
    if (!(std::abs(rho) < 1.0))
        throw InvalidParameter("make_sabr_geometry: |rho| must be < 1, got " +
                               std::to_string(rho));
    if (!(nu > 0.0) || !(f0 > 0.0) || !(sigma0 > 0.0) || !(K > 0.0))
        throw InvalidParameter(
            "make_sabr_geometry: nu, f0, sigma0, K must be positive, got nu = " +
            std::to_string(nu) + ", f0 = " + std::to_string(f0) + ", sigma0 = " +
            std::to_string(sigma0) + ", K = " + std::to_string(K));

    const auto J = [&](double x) {
        return beta == 1.0 ? std::log(x) : std::pow(x, 1.0 - beta) / (1.0 - beta);
    };
    const double q = std::sqrt(1.0 - rho * rho);

    SabrGeometry g;
    g.zeta = (nu / sigma0) * (J(f0) - J(K));
    g.i = std::sqrt(g.zeta * g.zeta - 2.0 * rho * g.zeta + 1.0);
    g.Y0 = sigma0 / nu;
    g.X0 = (J(f0) - rho * g.Y0) / q;
    g.Yend = g.Y0 * g.i;
    g.Xend = (J(K) - rho * g.Yend) / q;
    g.d = std::abs(std::log((g.i + g.zeta - rho) / (1.0 - rho)));

    const double dx = g.Xend - g.X0;
    const double x_scale = std::max({1.0, std::abs(g.X0), std::abs(g.Xend)});
    if (std::abs(g.zeta) < 1e-14) {
        g.degenerate = true;
        g.l = g.X0;
        g.r = g.Y0;
        g.a = q * g.l / g.r;
        g.d = 0.0;
        return g;
    }
    if (std::abs(dx) <= 1e-13 * x_scale) {
        g.vertical = true;
        g.l = g.X0;
        g.r = g.Y0;
        g.a = q * g.l / g.r;
        return g;
    }
    g.l = ((g.Xend * g.Xend + g.Yend * g.Yend) - (g.X0 * g.X0 + g.Y0 * g.Y0)) /
          (2.0 * dx);
    g.r = std::hypot(g.X0 - g.l, g.Y0);
    g.a = q * g.l / g.r;
    g.validate();
    return g;
}

} // namespace deltasmile::pricing
