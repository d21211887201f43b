/**
 * @file pricing.hpp
 * @brief Digital densities, conditional moments, local and implied
 *        volatilities, and smile curves from the short-time kernel expansion.
 *
 * The digital density P(tau, f0, sigma0; K) is the K-density of the terminal
 * forward. In the half-plane image it is the integral of the heat kernel over
 * the strike line (the image of {x = K}) with the 1/Y^{2 delta} volume weight,
 * evaluated by a Laplace expansion around the nearest point of the line. The
 * conditional moment M carries the extra Sigma^{2 delta} weight; their ratio
 * drives local volatility sigma_K = Sigma_min^delta c(K) and the implied vol
 * mapping through the effective average forward f_av.
 */
#pragma once

#include "deltasmile/errors.hpp"
#include "deltasmile/geometry.hpp"
#include "deltasmile/kernel.hpp"
#include "deltasmile/model.hpp"
#include "deltasmile/sabr_geometry.hpp"

#include <string>
#include <vector>

namespace deltasmile::pricing {

/// The image of the vertical strike line {x = K} under the isometry: a
/// straight half-plane line at Euclidean angle theta1 with tan(theta1) =
/// -sqrt(1-rho^2)/rho.
struct StrikeLine {
    double theta1 = 1.5707963267948966;  ///< inclination, in (0, pi)
    geometry::HalfPlanePoint anchor;     ///< image of (K, 1) on the line

    /// Line description for the point-to-line machinery (boundary crossing
    /// abscissa follows from the anchor and the angle).
    geometry::LineSpec line() const;
};

/// Build the strike-line image for strike K.
StrikeLine strike_line(const kernel::IsometrySpec& spec, double K);

/**
 * @brief Laplace approximation of int f(u) e^{-phase(u)/s} du around an
 *        interior minimum with phase(u0) = 0.
 *
 *   sqrt(2 pi s / phase'') * ( f0 + s [ g + f2/(2 phase'')
 *       - phase4 f0/(8 phase''^2) - f1 phase3/(2 phase''^2)
 *       + 5 phase3^2 f0/(24 phase''^3) ] ),
 *
 * where g is the caller-supplied order-one slot (the kernel coefficient
 * (K1)_0 times f0). Pass zero derivatives for the order-0 value.
 *
 * @throws NotAMinimum if pd.d2 <= 0; InvalidParameter if s <= 0.
 */
double laplace_expand(const geometry::PhaseDerivatives& pd, double s,
                      double g_term = 0.0);

/// Full breakdown of the digital-density evaluation at one strike.
struct DigitalDetail {
    double p0 = 0.0;         ///< order-0 density
    double p1 = 0.0;         ///< order-1 density (constructed correction)
    double m0 = 0.0;         ///< order-0 conditional moment E[Sigma^{2 delta} | F=K] * P
    double m1 = 0.0;         ///< order-1 conditional moment
    double d = 0.0;          ///< geodesic distance to the strike line
    double w = 0.0;          ///< drift work to the foot
    double phase2 = 0.0;     ///< exact second phase derivative along the line
    double k1 = 0.0;         ///< kernel order-one coefficient at the source
    double s = 0.0;          ///< rescaled time
    double y_min = 0.0;      ///< foot ordinate in the image plane
    double sigma_min = 0.0;  ///< most likely volatility nu^delta Y_min
    double i_delta = 0.0;    ///< ratio sigma_min / sigma0
    double theta1 = 0.0;     ///< strike-line inclination
    double theta2 = 0.0;     ///< source angle seen from the line's boundary point
    double conversion = 0.0; ///< image-to-model density factor 1/(nu^{delta-1} q c(K))
    bool atm = false;        ///< at-the-money branch taken
    bool feller_ok = true;   ///< boundary classification permits the regime
};

/**
 * @brief Evaluate the digital-density pipeline at one strike.
 *
 * Builds the strike line, solves the point-to-line problem, assembles exact
 * phase2 from the oriented Jacobi pair, freezes phase3/phase4 at their
 * at-the-money values, differentiates the amplitude along the line by central
 * differences, and Laplace-expands with and without the order-one bracket.
 *
 * @throws InvalidParameter/DegenerateModel for bad inputs; geometry errors
 *         propagate.
 */
DigitalDetail digital_density_detail(const model::ModelParams& params, double tau,
                                     double f0, double sigma0, double K);

/// Digital density at the requested order (0 or 1).
double digital_density_P(const model::ModelParams& params, double tau, double f0,
                         double sigma0, double K, int order);

/**
 * @brief Closed-form digital density for delta = 1, beta < 1:
 *
 *   P = exp(W0 + WRevert - d^2/(2 nu^2 tau)) / (K^beta sigma0 i^{3/2}
 *       sqrt(2 pi tau)) * (1 + order (4 - 5 rho^2)/24 nu^2 tau),
 *
 * assembled from the circle geometry and the closed work integrals. The
 * prefactor normalization agrees with digital_density_P at delta = 1.
 */
double sabr_closed_form_P(const model::ModelParams& params, double tau, double f0,
                          double sigma0, double K, int order);

/// Leading-order conditional moment M = Sigma_min^{2 delta} P.
double conditional_moment_M(const model::ModelParams& params, double tau,
                            double f0, double sigma0, double K);

/**
 * @brief Local volatility sigma_K = (sigma0 i_delta)^delta c(K), with i_delta
 *        the foot-ordinate ratio of the point-to-line solve (1 at the money,
 *        1 exactly when nu = 0).
 */
double local_vol(const model::ModelParams& params, double tau, double f0,
                 double sigma0, double K);

/**
 * @brief Effective average forward f_av = sqrt((K^2 - f0^2)/(2 ln(K/f0))),
 *        evaluated stably and equal to f0 exactly at K = f0.
 *
 * @param printed_form reproduces the variant without the factor 2 in the
 *        denominator (limit f0 sqrt(2); kept only for comparison runs).
 */
double f_av(double K, double f0, bool printed_form = false);

/**
 * @brief Lognormal implied volatility
 *
 *   sigma_B = sqrt(M/P) f_av^{beta-1}
 *             * (1 + (1-beta)(2+beta)/24 ((K-f0)/f_av)^2),
 *
 * i.e. the equivalent-vol conversion with the CEV factor evaluated at the
 * averaged forward (c(f_av)/f_av); this keeps the nu = 0, beta = 1 smile
 * exactly flat at sigma0^delta. Order 0 uses the geometric ratio
 * M/P = Sigma_min^{2 delta}; order 1 propagates the order-one P and M
 * (a constructed correction, labelled as such downstream).
 */
double implied_vol(const model::ModelParams& params, double tau, double f0,
                   double sigma0, double K, int order);

/// One strike of a smile table.
struct SmilePoint {
    double strike = 0.0;
    double sigma_local = 0.0;
    double sigma_implied = 0.0;
    double f_average = 0.0;
    double i_delta = 0.0;
    double sigma_min = 0.0;
    double y_min = 0.0;
    int order = 0;
    bool ok = true;          ///< false when this strike failed; see error
    std::string error;
};

/**
 * @brief Assemble the smile over a strike list. Per-strike failures are
 *        recorded on the point (ok = false) and the curve continues.
 *
 * @param parallel distribute strikes over OpenMP threads (results are
 *        written by index, so the output is identical to the serial run).
 */
std::vector<SmilePoint> smile_curve(const model::ModelParams& params, double tau,
                                    double f0, double sigma0,
                                    const std::vector<double>& strikes, int order,
                                    bool parallel = true);

/**
 * @brief Integral of the digital density over strikes, trapezoid on a
 *        log-spaced grid covering +-6 at-the-money standard deviations.
 *        Near 1 for small tau; degrades as tau grows.
 */
double distribution_mass(const model::ModelParams& params, double tau, double f0,
                         double sigma0, int order, int n_strikes = 200);

} // namespace deltasmile::pricing
