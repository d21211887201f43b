/**
 * @file kernel.hpp
 * @brief Isometry to the delta half-plane, effective drift field, line-integral
 *        work terms, and the short-time heat-kernel density.
 *
 * The model plane carries coordinates (x, y) = (F, sigma/nu). The map
 *
 *   Phi(x, y) = nu^{1-delta} * ( (J(x) - rho y) / sqrt(1 - rho^2), y ),
 *   J(x) = (x^{1-beta} - p^{1-beta}) / (1-beta)   (log(x/p) at beta = 1),
 *
 * sends it isometrically onto (part of) the half plane with metric
 * (dX^2 + dY^2)/Y^{2 delta} ("delta space"). Under Phi the generator becomes
 * heat flow plus a first-order drift field; prices are then short-time
 * expansions of the half-plane heat kernel
 *
 *   K(a, b; s) = e^{-d^2/(2s) + W} sqrt(d / Z(d)) / (2 pi s) * (1 + K1 s + ...),
 *
 * with d the geodesic distance, Z the Jacobi determinant, W the work of the
 * drift field along the geodesic from a to b, and K1 the order-one coefficient
 * at the source.
 */
#pragma once

#include "deltasmile/errors.hpp"
#include "deltasmile/geometry.hpp"
#include "deltasmile/model.hpp"
#include "deltasmile/sabr_geometry.hpp"

namespace deltasmile::kernel {

/// Parameters of the half-plane isometry Phi.
struct IsometrySpec {
    double delta = 1.0;  ///< vol exponent, in (0, 1]
    double beta = 0.0;   ///< CEV exponent, in [0, 1]
    double nu = 1.0;     ///< vol-of-vol, > 0
    double rho = 0.0;    ///< correlation, |rho| < 1
    double p = 0.0;      ///< lower anchor of J: 0 for beta < 1, must be > 0 at beta = 1

    /// Build from model parameters (p = 0 for beta < 1, p = 1 at beta = 1).
    static IsometrySpec from_model(const model::ModelParams& params);

    bool is_valid() const noexcept;
    void validate() const;
};

/// Antiderivative J(x) = int_p^x du / u^beta.
double primitive_J(const IsometrySpec& spec, double x);

/// Jacobian matrix of phi_forward at abscissa x (it does not depend on y).
struct PhiJacobian {
    double dX_dx = 0.0;
    double dX_dy = 0.0;
    double dY_dx = 0.0;  ///< always 0
    double dY_dy = 0.0;
};

PhiJacobian phi_jacobian(const IsometrySpec& spec, double x);

/// Determinant of the Jacobian: nu^{2-2 delta} / (sqrt(1-rho^2) x^beta).
double phi_det(const IsometrySpec& spec, double x);

/**
 * @brief Forward map Phi. The input must be frame ModelSpace with x in the
 *        domain of J (x > 0 for beta < 1, x > 0 at beta = 1); output frame is
 *        DeltaSpace.
 */
geometry::HalfPlanePoint phi_forward(const IsometrySpec& spec,
                                     const geometry::HalfPlanePoint& point);

/**
 * @brief Inverse map. Throws OutOfImage if the point has no preimage
 *        (the recovered J value must satisfy (1-beta) J + p^{1-beta} > 0).
 */
geometry::HalfPlanePoint phi_inverse(const IsometrySpec& spec,
                                     const geometry::HalfPlanePoint& point);

/// Drift/time constants of the half-plane picture.
struct EffectiveParams {
    double s_scale = 1.0;  ///< s = s_scale * tau, s_scale = nu^{2(delta^2 - delta + 1)}
    double lambda = 0.0;   ///< mean-reversion rate in half-plane time
    double mu = 0.0;       ///< mean-reversion level in half-plane ordinate units
};

EffectiveParams effective_params(const model::ModelParams& params);

/// Rescaled maturity s = nu^{2(delta^2 - delta + 1)} * tau.
double s_tilde(const model::ModelParams& params, double tau);

/// Drift field value at a half-plane point; div is the Euclidean divergence
/// dfx/dX + dfy/dY.
struct DriftFieldSample {
    geometry::HalfPlanePoint at;
    double fx = 0.0;
    double fy = 0.0;
    double div = 0.0;
};

/**
 * @brief Effective drift field in delta space.
 *
 * For beta < 1:
 *   fx = -(1/q) [ beta Y^{2 delta} / (2 (1-beta)(q X + rho Y)) + rho lambda (Y - mu) ],
 * for beta = 1:
 *   fx = -nu^{delta-1} Y^{2 delta} / (2 q) - (rho/q) lambda (Y - mu),
 * and in both cases fy = lambda (Y - mu), q = sqrt(1 - rho^2). lambda and mu
 * are the effective (half-plane) constants from effective_params.
 *
 * @throws SingularField when beta < 1 and q X + rho Y <= 0 (the image boundary).
 */
DriftFieldSample drift_field(const IsometrySpec& spec, double lambda, double mu,
                             const geometry::HalfPlanePoint& point);

/// Field closure: spec plus effective drift constants.
struct DriftField {
    IsometrySpec spec;
    double lambda = 0.0;
    double mu = 0.0;

    DriftFieldSample at(const geometry::HalfPlanePoint& point) const {
        return drift_field(spec, lambda, mu, point);
    }
};

/**
 * @brief Work integral W = int (fx dX + fy dY) along an integrated path,
 *        composite Simpson over the recorded samples (trapezoid on a leftover
 *        odd interval).
 */
double work_along_geodesic(const DriftField& field, const geometry::GeodesicPath& path);

/**
 * @brief Work integral along the exact two-point geodesic, oriented from
 *        endpoint a to endpoint b, by adaptive quadrature in the branch
 *        parameter t = sqrt(1 - (y/h)^{2 delta}) (ordinate quadrature for a
 *        vertical segment).
 */
double work_two_point(const DriftField& field, const geometry::TwoPointGeodesic& geo);

/**
 * @brief Antiderivative of g(a, rho, x) = (1 - x^2)/(a + q x + rho sqrt(1-x^2)),
 *        q = sqrt(1 - rho^2), on a branch where it is real-analytic.
 *
 * Used for the closed circle work at delta = 1. The arctan part switches to
 * its artanh continuation for a^2 < 1; near the continuation's branch point
 * the difference G(x1) - G(x0) is invalid, which sabr_work_closed_form
 * detects by comparing against quadrature.
 *
 * @throws InvalidParameter for |x| > 1 or a log/branch argument out of range.
 */
double circle_work_primitive(double a, double rho, double x);

/// Decomposed closed work along the delta = 1 circle geodesic.
struct SabrWork {
    double w0 = 0.0;        ///< backbone part (beta-dependent)
    double w_revert = 0.0;  ///< mean-reversion part (lambda-dependent)
    bool quadrature_fallback = false;  ///< w0 came from quadrature, not the primitive

    double total() const noexcept { return w0 + w_revert; }
};

/**
 * @brief Closed-form drift work along the delta = 1 circle geodesic from the
 *        spot image to the strike image.
 *
 * Backbone part for beta < 1:
 *   W0 = -(beta r^2 / (2 (1-beta) q)) [ G(a, rho, x) ]_{x0}^{xe},  x = (X - l)/r,
 * for beta = 1: W0 = -(r^3 / (2 q nu^0)) [x - x^3/3]_{x0}^{xe} with the
 * nu^{delta-1} factor equal to 1 at delta = 1. Mean reversion part:
 *   WRevert = -(rho lambda / q) r^2 (f(xe) - f(x0)) + (rho lambda mu / q)(Xend - X0)
 *             + (lambda/2)(Yend^2 - Y0^2) - lambda mu (Yend - Y0),
 *   f(u) = (u sqrt(1-u^2) + asin u)/2.
 *
 * The primitive-based W0 is validated against a 5-point Gauss-Legendre
 * estimate of the direct integral; on disagreement (branch jump of the
 * continuation) it is recomputed by adaptive quadrature and the
 * quadrature_fallback flag is set. Degenerate (at-the-money) geometry gives
 * zero work; a vertical chord gives W0 = 0 and the closed WRevert.
 */
SabrWork sabr_work_closed_form(const pricing::SabrGeometry& geo, double beta,
                               double rho, double lambda, double mu);

/**
 * @brief Order-one heat-kernel coefficient at the source point,
 *
 *   K1 = -delta y^{2 delta - 2} / 6 + div(f)/2 - fy / y
 *        + (3/2)(fx^2 + fy^2) / y^{2 delta},
 *
 * evaluated from a drift-field sample (y is the source ordinate). For a zero
 * field this is R/6 with R the Gauss curvature (negative).
 */
double k1_origin(double delta, const DriftFieldSample& at_source);

/// Ingredients of the kernel between two points.
struct KernelTerms {
    double d = 0.0;     ///< geodesic distance
    double w = 0.0;     ///< drift work from a to b
    double z = 0.0;     ///< Jacobi determinant Z(d), real arc normalization
    double k1 = 0.0;    ///< order-one coefficient at the source a
    double s = 0.0;     ///< the rescaled time the terms were built for
};

/**
 * @brief Assemble distance, Jacobi determinant, work and K1 for a source/target
 *        pair in delta space. Z comes from the fundamental Jacobi solution
 *        along the connecting geodesic (sinh d at delta = 1); coincident
 *        points give d = 0, z = 0, w = 0.
 */
KernelTerms kernel_terms(const IsometrySpec& spec, double lambda, double mu,
                         const geometry::HalfPlanePoint& a,
                         const geometry::HalfPlanePoint& b, double s);

/**
 * @brief Short-time heat-kernel density in delta space with respect to the
 *        Riemannian volume dX dY / Y^{2 delta}.
 *
 *   K = e^{-d^2/(2 s) + W} sqrt(d / Z(d)) / (2 pi s) * (1 + order * K1 s).
 *
 * order must be 0 or 1. Coincident points (d < 1e-6) use the analytic limit
 * sqrt(d/Z) -> 1, W -> 0.
 */
double heat_kernel_density(const IsometrySpec& spec,
                           const geometry::HalfPlanePoint& a,
                           const geometry::HalfPlanePoint& b, double s, int order,
                           double lambda = 0.0, double mu = 0.0);

} // namespace deltasmile::kernel
