#include "deltasmile/geometry.hpp"
#include "deltasmile/numerics.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace deltasmile::geometry {

namespace {

constexpr double kPi = std::numbers::pi;

void check_delta(double delta, double lo = 0.0, double hi = 1.0) {
    if (!(delta > lo && delta <= hi))
        throw InvalidParameter("geometry: delta must lie in (" + std::to_string(lo) +
                               ", " + std::to_string(hi) + "], got " +
                               std::to_string(delta));
}

} // namespace

void HalfPlanePoint::validate() const {
    if (!(y > 0.0))
        throw InvalidPoint("half-plane point requires y > 0, got y = " +
                           std::to_string(y));
}

double GeodesicState::metric_speed2(double delta) const {
    return (vx * vx + vy * vy) / std::pow(point.y, 2.0 * delta);
}

Christoffel christoffel(double delta, double y) {
    if (!(y > 0.0))
        throw InvalidPoint("christoffel: y must be > 0, got " + std::to_string(y));
    return Christoffel{-delta / y, -delta / y, delta / y};
}

double gauss_curvature(double delta, double y) {
    if (!(y > 0.0))
        throw InvalidPoint("gauss_curvature: y must be > 0, got " + std::to_string(y));
    return -delta * std::pow(y, 2.0 * delta - 2.0);
}

// ---------------------------------------------------------------------------
// Geodesic integration
// ---------------------------------------------------------------------------

GeodesicPath geodesic_integrate(double delta, const GeodesicState& start,
                                double length, const StepControl& control) {
    check_delta(delta);
    start.point.validate();
    if (!(length >= 0.0))
        throw InvalidParameter("geodesic_integrate: length must be >= 0, got " +
                               std::to_string(length));
    const double speed2 = start.metric_speed2(delta);
    if (std::abs(speed2 - 1.0) > 1e-9)
        throw InvalidParameter(
            "geodesic_integrate: start state is not unit speed; (vx^2+vy^2)/y^{2d} = " +
            std::to_string(speed2));

    const double c1_0 = speed2;
    const double c2_0 = start.vx / std::pow(start.point.y, 2.0 * delta);

    using State = std::array<double, 4>;  // x, y, vx, vy
    const auto system = [delta](const State& s, State& dsdt, double) {
        const double y = s[1];
        const double inv_y = 1.0 / y;
        dsdt[0] = s[2];
        dsdt[1] = s[3];
        dsdt[2] = 2.0 * delta * inv_y * s[2] * s[3];
        dsdt[3] = delta * inv_y * (s[3] * s[3] - s[2] * s[2]);
    };

    GeodesicPath path;
    path.delta = delta;
    path.killing_constants = {c1_0, c2_0};

    State st{start.point.x, start.point.y, start.vx, start.vy};
    const auto record = [&](double t) {
        PathSample sample;
        sample.t = t;
        sample.state.point = HalfPlanePoint{st[0], st[1], start.point.frame};
        sample.state.vx = st[2];
        sample.state.vy = st[3];
        const double y2d = std::pow(st[1], 2.0 * delta);
        sample.c1 = (st[2] * st[2] + st[3] * st[3]) / y2d;
        sample.c2 = st[2] / y2d;
        path.samples.push_back(sample);
    };
    record(0.0);

    auto stepper = boost::numeric::odeint::make_controlled(
        control.abs_tol, control.rel_tol,
        boost::numeric::odeint::runge_kutta_cash_karp54<State>());

    const int n_steps = std::max(1, static_cast<int>(std::ceil(length / control.sample_dt)));
    double t_prev = 0.0;
    for (int i = 1; i <= n_steps; ++i) {
        const double t_next = std::min(length, i * control.sample_dt);
        if (t_next <= t_prev) break;
        boost::numeric::odeint::integrate_adaptive(
            stepper, system, st, t_prev, t_next,
            std::min(control.sample_dt, 1e-3));
        if (!std::isfinite(st[1]) || !(st[1] > control.y_floor)) {
            throw BoundaryHitWithPath(
                "geodesic_integrate: ordinate fell to y = " + std::to_string(st[1]) +
                    " at t = " + std::to_string(t_next),
                path);
        }
        // A geodesic that crosses y = 0 between samples can re-enter the upper
        // half plane with garbage velocities; the energy constant exposes that.
        const double c1_now =
            (st[2] * st[2] + st[3] * st[3]) / std::pow(st[1], 2.0 * delta);
        if (!std::isfinite(c1_now) || std::abs(c1_now - c1_0) > 1e-3) {
            throw BoundaryHitWithPath(
                "geodesic_integrate: left the domain near t = " +
                    std::to_string(t_next) + " (energy constant drifted to " +
                    std::to_string(c1_now) + ")",
                path);
        }
        if (control.project_invariants) {
            const double y2d = std::pow(st[1], 2.0 * delta);
            const double vx = c2_0 * y2d;
            const double rad = std::max(0.0, c1_0 * y2d - vx * vx);
            st[2] = vx;
            st[3] = std::copysign(std::sqrt(rad), st[3]);
        }
        record(t_next);
        t_prev = t_next;
    }
    return path;
}

HalfPlanePoint scale_path(const HalfPlanePoint& p, double factor) {
    if (!(factor > 0.0))
        throw InvalidParameter("scale_path: factor must be > 0, got " +
                               std::to_string(factor));
    return HalfPlanePoint{p.x * factor, p.y * factor, p.frame};
}

GeodesicPath scale_path(const GeodesicPath& path, double factor) {
    if (!(factor > 0.0))
        throw InvalidParameter("scale_path: factor must be > 0, got " +
                               std::to_string(factor));
    const double time_scale = std::pow(factor, 1.0 - path.delta);
    const double vel_scale = std::pow(factor, path.delta);
    GeodesicPath out;
    out.delta = path.delta;
    out.killing_constants = {path.killing_constants.first,
                             path.killing_constants.second / vel_scale};
    out.samples.reserve(path.samples.size());
    for (const auto& s : path.samples) {
        PathSample ns;
        ns.t = s.t * time_scale;
        ns.state.point = scale_path(s.state.point, factor);
        ns.state.vx = s.state.vx * vel_scale;
        ns.state.vy = s.state.vy * vel_scale;
        ns.c1 = s.c1;
        ns.c2 = s.c2 / vel_scale;
        out.samples.push_back(ns);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Standard geodesic: abscissa, halfwidth, arcs
// ---------------------------------------------------------------------------

namespace {

// Power series of x(y); valid for y^{2 delta} <= 0.95.
double standard_x_series(double delta, double y) {
    if (y == 0.0) return 0.0;
    const double z = std::pow(y, 2.0 * delta);
    const double f = numerics::hyp2f1_series((delta + 1.0) / (2.0 * delta), 0.5,
                                             1.5 + 0.5 / delta, z);
    return std::pow(y, delta + 1.0) / (delta + 1.0) * f;
}

// Arc length from the boundary (y=0) up to height y; series valid for small y.
// Integrand expansion: y^{-delta} (1 - y^{2 delta})^{-1/2}
//   = sum_k binom(2k, k)/4^k * y^{2 k delta - delta}.
double arc_from_boundary_series(double delta, double y) {
    double coef = 1.0;  // binom(2k,k)/4^k
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double expo = 1.0 + (2.0 * k - 1.0) * delta;
        const double term = coef * std::pow(y, expo) / expo;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) return sum;
        coef *= (2.0 * k + 1.0) / (2.0 * k + 2.0);
    }
    throw NumericalFailure("arc_from_boundary_series: no convergence at y = " +
                           std::to_string(y));
}

} // namespace

double apex_abscissa(double delta) {
    check_delta(delta);
    return numerics::beta_function(0.5, 0.5 / delta + 0.5) / (2.0 * delta);
}

double total_arc(double delta) {
    check_delta(delta);
    if (delta >= 1.0) return std::numeric_limits<double>::infinity();
    return numerics::beta_function(0.5, 0.5 / delta - 0.5) / (2.0 * delta);
}

double halfwidth_param(double delta, double t) {
    check_delta(delta);
    if (!(t >= 0.0 && t <= 1.0))
        throw InvalidParameter("halfwidth_param: t must lie in [0, 1], got " +
                               std::to_string(t));
    const double t2 = t * t;
    if (t2 >= 0.05) {
        // Complementary route through the abscissa series (its argument
        // y^{2 delta} = 1 - t^2 <= 0.95 converges fast there).
        const double y = std::pow(1.0 - t2, 0.5 / delta);
        return apex_abscissa(delta) - standard_x_series(delta, y);
    }
    const double expo = 0.5 / delta - 0.5;
    return t / delta *
           numerics::integrate_fixed(
               [&](double v) { return std::pow(1.0 - t2 * v * v, expo); }, 0.0, 1.0);
}

double standard_geodesic_x(double delta, double y) {
    check_delta(delta);
    if (!(y >= 0.0 && y <= 1.0))
        throw InvalidParameter("standard_geodesic_x: y must lie in [0, 1], got " +
                               std::to_string(y));
    const double z = std::pow(y, 2.0 * delta);
    if (z <= 0.95) return standard_x_series(delta, y);
    return apex_abscissa(delta) - halfwidth_param(delta, std::sqrt(1.0 - z));
}

double geodesic_halfwidth(double delta, double y) {
    check_delta(delta);
    if (!(y >= 0.0 && y <= 1.0))
        throw InvalidParameter("geodesic_halfwidth: y must lie in [0, 1], got " +
                               std::to_string(y));
    return halfwidth_param(delta, std::sqrt(std::max(0.0, 1.0 - std::pow(y, 2.0 * delta))));
}

double arc_from_apex(double delta, double y) {
    check_delta(delta);
    if (!(y > 0.0 && y <= 1.0))
        throw InvalidParameter("arc_from_apex: y must lie in (0, 1], got " +
                               std::to_string(y));
    if (delta == 1.0) return std::acosh(1.0 / y);
    if (y < 0.1) return total_arc(delta) - arc_from_boundary_series(delta, y);
    const double t = std::sqrt(std::max(0.0, 1.0 - std::pow(y, 2.0 * delta)));
    return (geodesic_halfwidth(delta, y) - std::pow(y, 1.0 - delta) * t) /
           (1.0 - delta);
}

double distance_on_standard(double delta, double x1, double y1) {
    check_delta(delta);
    if (delta == 1.0)
        throw UseHyperbolicForm(
            "distance_on_standard: delta = 1 has the hyperbolic closed form "
            "acosh(1/y)");
    if (!(y1 > 0.0 && y1 <= 1.0))
        throw InvalidPoint("distance_on_standard: y1 must lie in (0, 1], got " +
                           std::to_string(y1));
    const double xi = geodesic_halfwidth(delta, y1);
    if (std::abs(std::abs(x1) - xi) > 1e-8)
        throw InvalidPoint("distance_on_standard: |x1| = " + std::to_string(std::abs(x1)) +
                           " is off the standard geodesic (halfwidth " +
                           std::to_string(xi) + " at y1 = " + std::to_string(y1) + ")");
    const double t = std::sqrt(std::max(0.0, 1.0 - std::pow(y1, 2.0 * delta)));
    return (std::abs(x1) - std::pow(y1, 1.0 - delta) * t) / (1.0 - delta);
}

// ---------------------------------------------------------------------------
// Two-point geodesics
// ---------------------------------------------------------------------------

TwoPointGeodesic two_point_solve(double delta, const HalfPlanePoint& a,
                                 const HalfPlanePoint& b) {
    check_delta(delta);
    a.validate();
    b.validate();
    TwoPointGeodesic out;
    out.a = a;
    out.b = b;

    const double dx = b.x - a.x;
    const double x_scale = std::max({1.0, std::abs(a.x), std::abs(b.x)});
    if (std::abs(dx) <= 1e-13 * x_scale) {
        out.vertical = true;
        out.x_apex = a.x;
        out.d = (delta == 1.0)
                    ? std::abs(std::log(a.y / b.y))
                    : std::abs(std::pow(a.y, 1.0 - delta) - std::pow(b.y, 1.0 - delta)) /
                          (1.0 - delta);
        return out;
    }

    const double gap = std::abs(dx);
    const bool a_high = a.y >= b.y;
    const HalfPlanePoint& hi = a_high ? a : b;
    const HalfPlanePoint& lo = a_high ? b : a;
    const double crit = hi.y * geodesic_halfwidth(delta, lo.y / hi.y);

    double h;
    bool same_side;
    if (std::abs(gap - crit) <= 1e-11 * std::max(1.0, gap)) {
        h = hi.y;
        same_side = true;  // apex at the higher point; degenerate shared case
    } else if (gap < crit) {
        same_side = true;
        // gap(h) = h * (x(y_hi/h) - x(y_lo/h)) decreases from crit to 0.
        const auto f = [&](double hh) {
            return hh * (standard_geodesic_x(delta, hi.y / hh) -
                         standard_geodesic_x(delta, lo.y / hh)) -
                   gap;
        };
        double h_lo = hi.y * (1.0 + 1e-12);
        if (f(h_lo) <= 0.0) {
            h = hi.y;  // tangent configuration within roundoff of the bracket
        } else {
            double h_hi = hi.y * 2.0;
            int guard = 0;
            while (f(h_hi) > 0.0) {
                h_hi *= 2.0;
                if (++guard > 200)
                    throw NumericalFailure("two_point_solve: same-branch bracket failed");
            }
            h = numerics::find_root(f, h_lo, h_hi);
        }
    } else {
        same_side = false;
        // gap(h) = h * (2 x_top - x(y_a/h) - x(y_b/h)) increases from crit.
        const double x_top = apex_abscissa(delta);
        const auto f = [&](double hh) {
            return hh * (2.0 * x_top - standard_geodesic_x(delta, a.y / hh) -
                         standard_geodesic_x(delta, b.y / hh)) -
                   gap;
        };
        double h_lo = hi.y;
        double h_hi = hi.y * 2.0;
        int guard = 0;
        while (f(h_hi) < 0.0) {
            h_hi *= 2.0;
            if (++guard > 200)
                throw NumericalFailure("two_point_solve: opposite-branch bracket failed");
        }
        h = numerics::find_root(f, h_lo, h_hi);
    }
    out.h = h;

    const double arc_scale = std::pow(h, 1.0 - delta);
    int side_a, side_b;
    if (same_side) {
        // The lower point sits farther from the apex along the same branch.
        const int side = (lo.x > hi.x) ? +1 : -1;
        side_a = side_b = side;
        out.x_apex = hi.x - side * h * geodesic_halfwidth(delta, hi.y / h);
    } else {
        const bool a_left = a.x < b.x;
        side_a = a_left ? -1 : +1;
        side_b = -side_a;
        const HalfPlanePoint& left = a_left ? a : b;
        out.x_apex = left.x + h * geodesic_halfwidth(delta, left.y / h);
    }
    out.t_a = side_a * arc_scale * arc_from_apex(delta, a.y / h);
    out.t_b = side_b * arc_scale * arc_from_apex(delta, b.y / h);
    out.d = std::abs(out.t_b - out.t_a);
    return out;
}

double geodesic_distance(double delta, const HalfPlanePoint& a,
                         const HalfPlanePoint& b) {
    return two_point_solve(delta, a, b).d;
}

// ---------------------------------------------------------------------------
// sind: perpendicular-foot configurations
// ---------------------------------------------------------------------------

namespace {

void check_angle(double theta, const char* name) {
    if (!(theta > 0.0 && theta < kPi && std::sin(theta) > 1e-12))
        throw InvalidParameter(std::string("sind: ") + name +
                               " must lie strictly inside (0, pi), got " +
                               std::to_string(theta));
}

} // namespace

SindResult sind_solve(double delta, double theta1, double theta2) {
    check_delta(delta, 0.4999999999);
    check_angle(theta1, "theta1");
    check_angle(theta2, "theta2");

    const double sin1 = std::sin(theta1);
    const double y1 = std::pow(sin1, 1.0 / delta);
    const int foot_side = (theta1 <= kPi / 2.0) ? +1 : -1;
    const double cot1 = std::cos(theta1) / sin1;
    const double cot2 = std::cos(theta2) / std::sin(theta2);
    const double e = foot_side * geodesic_halfwidth(delta, y1) - y1 * cot1;
    const double t_foot = foot_side * arc_from_apex(delta, y1);

    struct Candidate {
        double s;
        int side;
        double arc;   // standard arc between foot and point
        double rank;  // proportional to the real distance
    };
    std::vector<Candidate> candidates;
    for (int branch : {+1, -1}) {
        const auto g = [&](double s) {
            return e + s * cot2 - branch * geodesic_halfwidth(delta, s);
        };
        for (double s : numerics::find_all_roots(g, 1e-9, 1.0, 400)) {
            // The apex (s = 1) belongs to both branches; keep one copy.
            if (branch < 0 && s > 1.0 - 1e-12) continue;
            const double t_pt = branch * arc_from_apex(delta, s);
            const double arc = std::abs(t_pt - t_foot);
            candidates.push_back(
                {s, branch, arc, std::pow(s, delta - 1.0) * arc});
        }
    }
    if (candidates.empty())
        throw NoIntersection("sind: no perpendicular-foot configuration for theta1 = " +
                             std::to_string(theta1) + ", theta2 = " +
                             std::to_string(theta2) + ", delta = " +
                             std::to_string(delta));
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& l, const Candidate& r) { return l.rank < r.rank; });
    const Candidate& best = candidates.front();

    SindResult res;
    res.ratio = y1 / best.s;
    res.y1 = y1;
    res.s = best.s;
    res.foot_side = foot_side;
    res.point_side = best.side;
    res.e = e;
    res.arc = best.arc;
    if (candidates.size() > 1) {
        const Candidate& second = candidates[1];
        const bool distinct = std::abs(second.s - best.s) > 1e-9 ||
                              second.side != best.side;
        res.ambiguous = distinct &&
                        (second.rank - best.rank) <= 1e-9 * std::max(1.0, best.rank);
    }
    return res;
}

double sind(double delta, double theta1, double theta2) {
    return sind_solve(delta, theta1, theta2).ratio;
}

std::pair<double, double> sind_partials(double delta, double theta1, double theta2) {
    const SindResult sol = sind_solve(delta, theta1, theta2);
    if (sol.ambiguous)
        throw BranchAmbiguity("sind_partials: configurations tie at theta1 = " +
                              std::to_string(theta1) + ", theta2 = " +
                              std::to_string(theta2));
    const double sin1 = std::sin(theta1);
    const double cos1 = std::cos(theta1);
    const double sin2 = std::sin(theta2);
    const double cos2 = std::cos(theta2);
    const double y1 = sol.y1;
    const double s = sol.s;
    const double dy1 = y1 * (cos1 / sin1) / delta;

    // d(halfwidth)/dy = -y^delta / sqrt(1 - y^{2 delta})
    const auto xi_prime = [&](double y) {
        const double rad = 1.0 - std::pow(y, 2.0 * delta);
        return -std::pow(y, delta) / std::sqrt(rad);
    };

    double bend_term;  // dy1/dtheta1 * foot_side * xi'(y1), with its pi/2 limit
    if (std::abs(cos1) < 1e-7) {
        bend_term = -1.0 / delta;
    } else {
        bend_term = dy1 * sol.foot_side * xi_prime(y1);
    }
    const double de_dt1 = bend_term - dy1 * (cos1 / sin1) + y1 / (sin1 * sin1);

    const double rad_s = 1.0 - std::pow(s, 2.0 * delta);
    double ds_dt1, ds_dt2;
    if (rad_s < 1e-24) {
        // Vertical tangency of the defining curve at the apex: s is stationary.
        ds_dt1 = 0.0;
        ds_dt2 = 0.0;
    } else {
        const double dg_ds = cos2 / sin2 - sol.point_side * xi_prime(s);
        if (std::abs(dg_ds) < 1e-10 * (1.0 + std::abs(cos2 / sin2)))
            throw BranchAmbiguity(
                "sind_partials: tangent configuration (dg/ds = " +
                std::to_string(dg_ds) + ")");
        ds_dt1 = -de_dt1 / dg_ds;
        ds_dt2 = (s / (sin2 * sin2)) / dg_ds;
    }

    const double d_dt1 = (dy1 - sol.ratio * ds_dt1) / s;
    const double d_dt2 = -sol.ratio * ds_dt2 / s;
    return {d_dt1, d_dt2};
}

// ---------------------------------------------------------------------------
// Point-to-line distance
// ---------------------------------------------------------------------------

const char* to_string(Side s) noexcept {
    switch (s) {
        case Side::AwayFromLine: return "AwayFromLine";
        case Side::TowardLine: return "TowardLine";
    }
    return "?";
}

PointToLineResult distance_point_to_line(double delta, const HalfPlanePoint& point,
                                         const LineSpec& line) {
    check_delta(delta, 0.4999999999);
    point.validate();
    check_angle(line.theta1, "theta1");

    const double theta2 = std::atan2(point.y, point.x - line.qx);
    const SindResult sol = sind_solve(delta, line.theta1, theta2);

    PointToLineResult res;
    res.solve = sol;
    res.theta2 = theta2;
    res.ratio = sol.ratio;
    res.omega = point.y / sol.s;
    res.y_min = point.y * sol.ratio;
    res.d = std::pow(res.omega, 1.0 - delta) * sol.arc;
    const double x_apex = line.qx - res.omega * sol.e;
    res.foot = HalfPlanePoint{
        x_apex + sol.foot_side * res.omega * geodesic_halfwidth(delta, sol.y1),
        res.y_min, point.frame};
    const double cross = (point.x - line.qx) * std::sin(line.theta1) -
                         point.y * std::cos(line.theta1);
    res.side = cross > 0.0 ? Side::AwayFromLine : Side::TowardLine;
    return res;
}

// ---------------------------------------------------------------------------
// Jacobi fields along the standard geodesic
// ---------------------------------------------------------------------------

namespace {

struct JacobiPairRaw {
    double y, u1, du1, u2, du2;
};

// Apex series of the odd/even fundamental pair; valid for small |t|.
JacobiPairRaw jacobi_series(double delta, double t) {
    const double t2 = t * t;
    JacobiPairRaw p;
    p.y = 1.0 - delta * t2 / 2.0 + delta * delta * (6.0 * delta - 1.0) * t2 * t2 / 24.0;
    p.u1 = t * (1.0 + delta * t2 / 6.0 +
                delta * delta * (7.0 - 6.0 * delta) * t2 * t2 / 120.0);
    p.du1 = 1.0 + delta * t2 / 2.0 +
            delta * delta * (7.0 - 6.0 * delta) * t2 * t2 / 24.0;
    p.u2 = 1.0 + delta * t2 / 2.0 +
           delta * delta * (3.0 - 2.0 * delta) * t2 * t2 / 24.0;
    p.du2 = delta * t + delta * delta * (3.0 - 2.0 * delta) * t2 * t / 6.0;
    return p;
}

// Fundamental pair at signed arc t from the apex (u1 odd, u2 even in t).
JacobiPairRaw standard_jacobi_pair(double delta, double t, bool force_ode) {
    const double tt = std::abs(t);
    const double sgn = (t >= 0.0) ? 1.0 : -1.0;
    JacobiPairRaw p;
    if (delta == 1.0 && !force_ode) {
        p = JacobiPairRaw{1.0 / std::cosh(tt), std::sinh(tt), std::cosh(tt),
                          std::cosh(tt), std::sinh(tt)};
    } else if (tt <= 1e-3) {
        p = jacobi_series(delta, tt);
    } else {
        if (delta < 1.0 && tt >= total_arc(delta) - 1e-9)
            throw NumericalFailure(
                "jacobi: arc " + std::to_string(tt) +
                " reaches the boundary (total arc " +
                std::to_string(total_arc(delta)) + ")");
        using State = std::array<double, 5>;  // y, u1, du1, u2, du2
        const auto system = [delta](const State& s, State& dsdt, double) {
            const double y = std::max(s[0], 1e-14);
            const double y2d = std::pow(y, 2.0 * delta);
            const double coef = delta * y2d / (y * y);  // delta * y^{2 delta - 2}
            dsdt[0] = -std::pow(y, delta) * std::sqrt(std::max(0.0, 1.0 - y2d));
            dsdt[1] = s[2];
            dsdt[2] = coef * s[1];
            dsdt[3] = s[4];
            dsdt[4] = coef * s[3];
        };
        const double t0 = 1e-3;
        const JacobiPairRaw ic = jacobi_series(delta, t0);
        State st{ic.y, ic.u1, ic.du1, ic.u2, ic.du2};
        auto stepper = boost::numeric::odeint::make_controlled(
            1e-13, 1e-13, boost::numeric::odeint::runge_kutta_cash_karp54<State>());
        boost::numeric::odeint::integrate_adaptive(stepper, system, st, t0, tt, 1e-4);
        p = JacobiPairRaw{st[0], st[1], st[2], st[3], st[4]};
    }
    // Extensions: u1 odd, u2 even, so du1 even and du2 odd.
    p.u1 *= sgn;
    p.du2 *= sgn;
    return p;
}

} // namespace

FundamentalJacobi jacobi_fundamental(double delta, double t_a, double t_b,
                                     bool force_ode) {
    check_delta(delta);
    const JacobiPairRaw pa = standard_jacobi_pair(delta, t_a, force_ode);
    const JacobiPairRaw pb = standard_jacobi_pair(delta, t_b, force_ode);
    FundamentalJacobi out;
    out.z = pa.u2 * pb.u1 - pa.u1 * pb.u2;
    out.zdot = pa.u2 * pb.du1 - pa.u1 * pb.du2;
    return out;
}

JacobiSolution jacobi_solve(double delta, double epsilon,
                            const std::vector<double>& y_grid, bool force_ode) {
    check_delta(delta);
    if (!(epsilon > 0.0 && epsilon < 0.9))
        throw InvalidParameter("jacobi_solve: epsilon must lie in (0, 0.9), got " +
                               std::to_string(epsilon));
    JacobiSolution sol;
    sol.delta = delta;
    sol.epsilon = epsilon;
    const double y_start = 1.0 - epsilon;
    const double t_a = arc_from_apex(delta, y_start);
    const JacobiPairRaw pa = standard_jacobi_pair(delta, t_a, force_ode);
    for (double y : y_grid) {
        if (!(y > 0.0) || y > y_start + 1e-15)
            throw InvalidGrid("jacobi_solve: grid ordinate " + std::to_string(y) +
                              " outside (0, 1 - epsilon] with epsilon = " +
                              std::to_string(epsilon));
        const double t = arc_from_apex(delta, y);
        const JacobiPairRaw pb = standard_jacobi_pair(delta, t, force_ode);
        sol.y.push_back(y);
        sol.d.push_back(t - t_a);
        sol.z1.push_back(pa.u2 * pb.u1 - pa.u1 * pb.u2);
        sol.dz1.push_back(pa.u2 * pb.du1 - pa.u1 * pb.du2);
        sol.z2.push_back(pa.du1 * pb.u2 - pa.du2 * pb.u1);
        sol.dz2.push_back(pa.du1 * pb.du2 - pa.du2 * pb.du1);
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Second variation and at-the-money phase derivatives
// ---------------------------------------------------------------------------

double second_variation(double delta, double y_min, double theta1, double d,
                        double z_at_d, double zdot_at_d, Side side) {
    check_delta(delta);
    if (!(y_min > 0.0))
        throw InvalidParameter("second_variation: y_min must be > 0, got " +
                               std::to_string(y_min));
    if (!(d > 0.0))
        throw InvalidParameter("second_variation: d must be > 0, got " +
                               std::to_string(d));
    const double sin1 = std::sin(theta1);
    if (!(sin1 > 1e-12))
        throw InvalidParameter("second_variation: theta1 = " + std::to_string(theta1) +
                               " has a vanishing sine");
    if (std::abs(z_at_d) < 1e-14 * std::max(1.0, std::abs(zdot_at_d)))
        throw ConjugatePoint("second_variation: Z(d) = " + std::to_string(z_at_d) +
                             " vanishes at d = " + std::to_string(d));
    const double sign = (side == Side::AwayFromLine) ? 1.0 : -1.0;
    return (zdot_at_d / (z_at_d * std::pow(y_min, 2.0 * delta)) +
            sign * delta * std::cos(theta1) / std::pow(y_min, delta + 1.0)) /
           (sin1 * sin1);
}

PhaseDerivatives phase_derivatives_atm(double delta, double y0, double theta1) {
    check_delta(delta);
    if (!(y0 > 0.0))
        throw InvalidParameter("phase_derivatives_atm: y0 must be > 0, got " +
                               std::to_string(y0));
    const double sin1 = std::sin(theta1);
    if (!(sin1 > 1e-12))
        throw InvalidParameter("phase_derivatives_atm: theta1 = " +
                               std::to_string(theta1) + " has a vanishing sine");
    const double s2 = sin1 * sin1;
    PhaseDerivatives pd;
    pd.d2 = 1.0 / (s2 * std::pow(y0, 2.0 * delta));
    pd.d3 = -3.0 * delta / (std::pow(y0, 2.0 * delta + 1.0) * s2);
    pd.d4 = delta * (4.0 + 7.0 * delta) / (std::pow(y0, 2.0 * delta + 2.0) * s2);
    return pd;
}

} // namespace deltasmile::geometry
