/**
 * @file geometry.hpp
 * @brief Upper-half-plane geometry for the metric ds^2 = (dx^2 + dy^2) / y^{2 delta}.
 *
 * Provides Christoffel symbols and curvature, geodesic integration with
 * Killing-constant tracking, the standard geodesic (apex height 1) and its
 * closed-form arc functions, point-to-line distances via the sind implicit
 * function, Jacobi fields along the standard geodesic, the second variation
 * of the distance-to-line function, and the at-the-money phase derivatives
 * used by Laplace expansions.
 *
 * Conventions:
 *  - delta in [1/2, 1] unless a formula extends naturally.
 *  - The "standard geodesic" has its apex (highest point, y = 1) at x-offset 0;
 *    xi(y) denotes the halfwidth (|x distance| from the apex) at height y and
 *    arc_from_apex(y) the arc length from the apex down to height y.
 *  - Scaling by a factor L maps geodesics to geodesics and multiplies lengths
 *    by L^{1-delta}.
 */
#pragma once

#include "deltasmile/errors.hpp"

#include <utility>
#include <vector>

namespace deltasmile::geometry {

/// Coordinate frame tag for half-plane points.
enum class Frame {
    ModelSpace,  ///< original (x, y) coordinates of the price/vol plane
    DeltaSpace   ///< isometry image (X, Y) coordinates
};

/// A point of the open upper half plane (y > 0).
struct HalfPlanePoint {
    double x = 0.0;               ///< abscissa
    double y = 1.0;               ///< ordinate, must stay > 0
    Frame frame = Frame::DeltaSpace;  ///< which coordinate chart the point lives in

    bool is_valid() const noexcept { return y > 0.0; }
    void validate() const;
};

/// Position plus velocity of a geodesic, velocities per unit proper time.
struct GeodesicState {
    HalfPlanePoint point;
    double vx = 0.0;  ///< dx/dt
    double vy = 0.0;  ///< dy/dt

    /// Metric speed (vx^2 + vy^2) / y^{2 delta}; 1 on a unit-speed geodesic.
    double metric_speed2(double delta) const;
};

/// One recorded sample of an integrated geodesic.
struct PathSample {
    double t = 0.0;        ///< proper time from the start
    GeodesicState state;
    double c1 = 0.0;       ///< energy constant (vx^2 + vy^2) / y^{2 delta}
    double c2 = 0.0;       ///< translation constant vx / y^{2 delta}
};

/// Integrated geodesic with per-sample conserved quantities.
struct GeodesicPath {
    double delta = 1.0;
    std::vector<PathSample> samples;
    std::pair<double, double> killing_constants{0.0, 0.0};  ///< (c1, c2) at start
};

/// Thrown when integration reaches the y -> 0 boundary; carries the partial path.
class BoundaryHitWithPath : public BoundaryHit {
public:
    BoundaryHitWithPath(const std::string& msg, GeodesicPath p)
        : BoundaryHit(msg), partial(std::move(p)) {}
    GeodesicPath partial;
};

/// Step-size and sampling control for geodesic_integrate.
struct StepControl {
    double sample_dt = 0.01;   ///< proper-time spacing of recorded samples
    double abs_tol = 1e-12;    ///< absolute tolerance of the adaptive stepper
    double rel_tol = 1e-12;    ///< relative tolerance of the adaptive stepper
    bool project_invariants = true;  ///< re-derive velocities from the Killing
                                     ///< constants after each sample interval
    double y_floor = 1e-12;    ///< boundary detection threshold
};

/// Non-zero Christoffel symbols of the metric (all others vanish).
struct Christoffel {
    double x_xy = 0.0;  ///< Gamma^x_{xy} = Gamma^x_{yx} = -delta / y
    double y_yy = 0.0;  ///< Gamma^y_{yy} = -delta / y
    double y_xx = 0.0;  ///< Gamma^y_{xx} = +delta / y
};

Christoffel christoffel(double delta, double y);

/// Gauss curvature R(y) = -delta * y^{2 delta - 2}.
double gauss_curvature(double delta, double y);

/**
 * @brief Integrate the geodesic equations from a unit-speed start state.
 *
 * Solves xdd = (2 delta / y) xd yd, ydd = (delta / y) (yd^2 - xd^2) with an
 * adaptive Runge-Kutta stepper, recording the two Killing constants at every
 * sample. When project_invariants is set, velocities are re-derived from the
 * initial constants after each sample interval to suppress drift.
 *
 * @throws InvalidParameter if the start state is not unit speed within 1e-9.
 * @throws BoundaryHitWithPath if y falls below the floor; carries the samples
 *         accumulated so far.
 */
GeodesicPath geodesic_integrate(double delta, const GeodesicState& start,
                                double length, const StepControl& control = {});

/// Scale a point by factor (coordinates multiplied by factor).
HalfPlanePoint scale_path(const HalfPlanePoint& p, double factor);

/**
 * @brief Scale a geodesic path by a factor.
 *
 * Coordinates scale by the factor, proper times by factor^{1-delta},
 * velocities by factor^{delta}, and the translation constant c2 by
 * factor^{-delta}; the energy constant c1 is invariant.
 */
GeodesicPath scale_path(const GeodesicPath& path, double factor);

/**
 * @brief Abscissa of the standard geodesic, anchored at x(0) = 0.
 *
 * x(y) = y^{delta+1}/(delta+1) * 2F1((delta+1)/(2 delta), 1/2;
 *        3/2 + 1/(2 delta); y^{2 delta}); evaluated by power series for
 * y^{2 delta} <= 0.95 and by quadrature of dx = y^delta dy / sqrt(1 - y^{2 delta})
 * above that.
 *
 * @throws InvalidParameter for y outside [0, 1].
 */
double standard_geodesic_x(double delta, double y);

/// Abscissa of the apex: standard_geodesic_x at y = 1 (a Beta-function value).
double apex_abscissa(double delta);

/// Halfwidth xi(y): x-distance from the apex to the point at height y.
double geodesic_halfwidth(double delta, double y);

/**
 * @brief Halfwidth as a function of the substitution parameter t = sqrt(1 - y^{2 delta}).
 *
 * xi_t(t) = (1/delta) * int_0^t (1 - u^2)^{1/(2 delta) - 1/2} du, so that
 * geodesic_halfwidth(delta, y) = xi_t(sqrt(1 - y^{2 delta})). Exposed for
 * quadratures parametrized by t.
 */
double halfwidth_param(double delta, double t);

/// Arc length from the apex (y=1) down to height y along the standard geodesic.
double arc_from_apex(double delta, double y);

/// Total arc length of the standard geodesic from apex to the boundary
/// (finite for delta < 1, +infinity at delta = 1).
double total_arc(double delta);

/**
 * @brief Arc distance from the apex given an apex-anchored abscissa.
 *
 * For a point (x1, y1) on the standard geodesic with |x1| equal to the
 * halfwidth at y1, returns (|x1| - y1^{1-delta} sqrt(1 - y1^{2 delta})) / (1 - delta).
 *
 * @throws UseHyperbolicForm at delta = 1 (use acosh(1/y) instead).
 * @throws InvalidPoint if |x1| differs from the halfwidth by more than 1e-8.
 */
double distance_on_standard(double delta, double x1, double y1);

/**
 * @brief Geodesic between two interior points.
 *
 * Reduces to a scaled standard geodesic: finds the apex height h >= max(ya, yb)
 * such that the horizontal gap matches either the same-branch or the
 * opposite-branch configuration, then reads the arc length off the closed
 * arc function. Vertical segments are handled by the closed form
 * |ya^{1-delta} - yb^{1-delta}| / (1-delta) (log ratio at delta = 1).
 */
struct TwoPointGeodesic {
    bool vertical = false;  ///< both points share an abscissa
    double d = 0.0;         ///< geodesic distance
    double h = 0.0;         ///< apex height of the connecting geodesic (0 if vertical)
    double x_apex = 0.0;    ///< abscissa of the apex (x of the points if vertical)
    double t_a = 0.0;       ///< signed arc of the first point from the apex (+ right)
    double t_b = 0.0;       ///< signed arc of the second point from the apex
    HalfPlanePoint a, b;    ///< the endpoints as given
};

TwoPointGeodesic two_point_solve(double delta, const HalfPlanePoint& a,
                                 const HalfPlanePoint& b);

/// Geodesic distance between two points (two_point_solve(...).d).
double geodesic_distance(double delta, const HalfPlanePoint& a,
                         const HalfPlanePoint& b);

/**
 * @brief Foot-of-perpendicular solve in the normalized frame.
 *
 * Configuration: a straight line through a boundary point at Euclidean angle
 * theta1, and a target point seen from that boundary point under Euclidean
 * angle theta2. After scaling the minimizing geodesic to the standard one,
 * the foot ordinate is y1 = (sin theta1)^{1/delta} and the target ordinate s
 * solves e + s cot(theta2) = +- xi(s), where e is the line's boundary
 * intercept in the apex frame. Both branch signs are scanned; when several
 * configurations exist the one with the smallest real distance wins.
 */
struct SindResult {
    double ratio = 1.0;   ///< foot ordinate / point ordinate = y1 / s
    double y1 = 1.0;      ///< foot ordinate in the standard frame
    double s = 1.0;       ///< point ordinate in the standard frame
    int foot_side = +1;   ///< branch of the foot: +1 right of apex, -1 left
    int point_side = +1;  ///< branch of the point
    double e = 0.0;       ///< boundary intercept of the line, apex frame
    double arc = 0.0;     ///< standard arc |t_point - t_foot| between the two
    bool ambiguous = false;  ///< another configuration ties within tolerance
};

SindResult sind_solve(double delta, double theta1, double theta2);

/// The ratio value of sind_solve; equals sin(theta1)/sin(theta2) at delta = 1.
double sind(double delta, double theta1, double theta2);

/// Partial derivatives (d sind/d theta1, d sind/d theta2) by implicit
/// differentiation of the defining equation.
/// @throws BranchAmbiguity near a branch boundary or tangency.
std::pair<double, double> sind_partials(double delta, double theta1, double theta2);

/// A straight half-plane line through the boundary point (qx, 0) at Euclidean
/// angle theta1 in (0, pi).
struct LineSpec {
    double theta1 = 1.5707963267948966;
    double qx = 0.0;
};

/// Side flag for the second variation: on which side of the foot the target
/// point lies relative to the line's orientation.
enum class Side {
    AwayFromLine,   ///< cross product (point - anchor) x direction > 0; "+" sign
    TowardLine      ///< cross product < 0; "-" sign
};

const char* to_string(Side s) noexcept;

struct PointToLineResult {
    double d = 0.0;            ///< geodesic distance from the point to the line
    HalfPlanePoint foot;       ///< nearest point of the line
    double theta2 = 0.0;       ///< Euclidean angle of anchor -> point
    double y_min = 0.0;        ///< ordinate of the foot
    double ratio = 1.0;        ///< y_min / point.y (the sind value)
    double omega = 1.0;        ///< scale factor of the minimizing geodesic
    Side side = Side::AwayFromLine;  ///< sign flag for second_variation
    SindResult solve;          ///< normalized-frame details
};

/**
 * @brief Geodesic distance from a point to a straight line.
 *
 * Reduces by homogeneity to the standard configuration, calls sind_solve,
 * and rescales: d = omega^{1-delta} * standard arc, omega = point.y / s.
 * @throws NoIntersection if no perpendicular-foot configuration exists.
 */
PointToLineResult distance_point_to_line(double delta, const HalfPlanePoint& point,
                                         const LineSpec& line);

/// Fundamental Jacobi data (solution with (Z, Zdot) = (0, 1) at arc t_a,
/// evaluated at arc t_b; arcs are signed, measured from the apex).
struct FundamentalJacobi {
    double z = 0.0;
    double zdot = 0.0;
};

/**
 * @brief Jacobi field along the standard geodesic in arc-length form.
 *
 * Solves Zdd = delta * y(t)^{2 delta - 2} Z where y(t) is the standard
 * ordinate at signed arc t from the apex. Built from the apex-centered
 * odd/even fundamental pair (integrated once per call with series initial
 * conditions near the apex); delta = 1 uses sinh/cosh exactly unless
 * force_ode is set.
 */
FundamentalJacobi jacobi_fundamental(double delta, double t_a, double t_b,
                                     bool force_ode = false);

/// Tabulated fundamental solutions of the Jacobi equation along arc length.
struct JacobiSolution {
    double delta = 1.0;
    double epsilon = 1e-2;     ///< start offset: integration begins at y = 1 - epsilon
    std::vector<double> y;     ///< requested ordinates (descending heights)
    std::vector<double> d;     ///< arc distance from the start point to each y
    std::vector<double> z1, dz1;  ///< solution with (Z, Zdot) = (0, 1) at d = 0
    std::vector<double> z2, dz2;  ///< solution with (Z, Zdot) = (1, 0) at d = 0
};

/**
 * @brief Tabulate the Jacobi fundamental pair started at y = 1 - epsilon.
 *
 * @param y_grid ordinates in (0, 1 - epsilon]; each is mapped to its arc
 *        distance d >= 0 from the start point (descending the geodesic).
 * @throws InvalidGrid if the grid touches y = 1 or leaves (0, 1 - epsilon].
 */
JacobiSolution jacobi_solve(double delta, double epsilon,
                            const std::vector<double>& y_grid,
                            bool force_ode = false);

/**
 * @brief Second derivative of the point-to-line distance along the line.
 *
 * d'' = (1/sin^2 theta1) * ( Zdot(d) / (Z(d) * y_min^{2 delta})
 *       +- (delta / y_min^{delta+1}) * cos theta1 ),
 * "+" for Side::AwayFromLine; the line is parametrized by the ordinate Y of
 * the moving point.
 *
 * @throws ConjugatePoint if Z(d) vanishes.
 */
double second_variation(double delta, double y_min, double theta1, double d,
                        double z_at_d, double zdot_at_d, Side side);

/// Laplace-phase derivative bundle; phase(u) = d(point, line(u))^2 / 2.
struct PhaseDerivatives {
    double d2 = 0.0;  ///< phase''
    double d3 = 0.0;  ///< phase'''
    double d4 = 0.0;  ///< phase''''
    double f0 = 0.0;  ///< amplitude at the minimum
    double f1 = 0.0;  ///< first amplitude derivative
    double f2 = 0.0;  ///< second amplitude derivative
};

/**
 * @brief At-the-money phase derivatives (distance-to-line phase at zero distance).
 *
 * d2 = 1/(sin^2 theta1 * Y0^{2 delta}); d3 = -3 delta/(Y0^{2 delta+1} sin^2 theta1);
 * d4 = delta (4 + 7 delta)/(Y0^{2 delta+2} sin^2 theta1). The d4 expression is
 * exact at delta = 1 (and there only at theta1 = pi/2); callers may zero it
 * for sensitivity studies.
 */
PhaseDerivatives phase_derivatives_atm(double delta, double y0, double theta1);

} // namespace deltasmile::geometry
