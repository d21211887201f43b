/**
 * @file kernel.cpp
 * @brief Half-plane isometry, effective drift field, work integrals, and the
 *        short-time heat-kernel density.
 */

#include "deltasmile/kernel.hpp"

#include "deltasmile/numerics.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

namespace deltasmile::kernel {

namespace {

constexpr double kPi = 3.14159265358979323846;

double q_of(double rho) { return std::sqrt(1.0 - rho * rho); }

void require_frame(const geometry::HalfPlanePoint& point, geometry::Frame frame,
                   const char* where) {
    if (point.frame != frame)
        throw InvalidPoint(std::string(where) + ": point is in the wrong coordinate frame");
}

/// Asin-based antiderivative used by the mean-reversion work on the circle.
double half_lens(double u) {
    u = std::clamp(u, -1.0, 1.0);
    return 0.5 * (u * std::sqrt(1.0 - u * u) + std::asin(u));
}

/// Clamp a circle coordinate x = (X - l)/r into [-1, 1] (rounding only).
double clamp_unit(double x, const char* what) {
    if (std::abs(x) > 1.0 + 1e-10)
        throw InvalidGeometry(std::string(what) + ": circle coordinate " +
                              std::to_string(x) + " is outside [-1, 1]");
    return std::clamp(x, -1.0 + 1e-15, 1.0);
}

/// Direct integrand of the backbone circle work (before the -beta r^2 / ... factor).
double circle_g(double a, double rho, double x) {
    const double q = q_of(rho);
    return (1.0 - x * x) / (a + q * x + rho * std::sqrt(std::max(0.0, 1.0 - x * x)));
}

/// 5-point Gauss-Legendre estimate of int_{x0}^{x1} circle_g dx.
double circle_g_gl5(double a, double rho, double x0, double x1) {
    static const std::array<double, 5> nodes = {
        -0.9061798459386640, -0.5384693101056831, 0.0,
        0.5384693101056831, 0.9061798459386640};
    static const std::array<double, 5> weights = {
        0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
        0.4786286704993665, 0.2369268850561891};
    const double mid = 0.5 * (x0 + x1);
    const double half = 0.5 * (x1 - x0);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        acc += weights[i] * circle_g(a, rho, mid + half * nodes[i]);
    return acc * half;
}

/// Work integrand along one branch of a scaled standard geodesic, in the
/// substitution parameter t = sqrt(1 - (y/h)^{2 delta}).
double branch_work_integrand(const DriftField& field, double h, double x_apex,
                             int side, double t) {
    const double delta = field.spec.delta;
    const double one_m_t2 = std::max(0.0, 1.0 - t * t);
    geometry::HalfPlanePoint pt;
    pt.x = x_apex + side * h * geometry::halfwidth_param(delta, t);
    pt.y = h * std::pow(one_m_t2, 1.0 / (2.0 * delta));
    const double dx_dt = side * h * (1.0 / delta) *
                         std::pow(one_m_t2, 1.0 / (2.0 * delta) - 0.5);
    const double dy_dt = -h * (t / delta) *
                         std::pow(one_m_t2, 1.0 / (2.0 * delta) - 1.0);
    const DriftFieldSample f = field.at(pt);
    return f.fx * dx_dt + f.fy * dy_dt;
}

/// Work integrand on one monotone branch parametrized by the ordinate. Valid
/// away from the apex, where the slope dx/dy = -side (y/h)^delta / t stays
/// bounded; near-vertical chords (huge apex height h) are perfectly
/// conditioned here while the arc parameter t degenerates to 1 for them.
double ordinate_work_integrand(const DriftField& field, double h, double x_apex,
                               int side, double y) {
    const double delta = field.spec.delta;
    const double ratio = std::pow(y / h, 2.0 * delta);
    const double t = std::sqrt(std::max(0.0, 1.0 - ratio));
    geometry::HalfPlanePoint pt;
    pt.x = x_apex + side * h * geometry::halfwidth_param(delta, t);
    pt.y = y;
    const double dx_dy = -side * std::pow(y / h, delta) / t;
    const DriftFieldSample f = field.at(pt);
    return f.fx * dx_dy + f.fy;
}

/// Oriented branch segment of the work integral (from t_from to t_to). The
/// near-apex piece (t below a fixed cap) integrates in the arc parameter,
/// where the integrand is regular; the rest integrates in the ordinate.
double branch_work(const DriftField& field, double h, double x_apex, int side,
                   double t_from, double t_to) {
    if (t_from == t_to) return 0.0;
    constexpr double t_cap = 0.15;
    const double delta = field.spec.delta;
    const double lo = std::min(t_from, t_to);
    const double hi = std::max(t_from, t_to);
    const double sign = t_to > t_from ? 1.0 : -1.0;
    double val = 0.0;
    if (lo < t_cap) {
        const double t1 = std::min(hi, t_cap);
        val += numerics::integrate(
            [&](double t) {
                return branch_work_integrand(field, h, x_apex, side, t);
            },
            lo, t1, 1e-11);
    }
    if (hi > t_cap) {
        const double t0 = std::max(lo, t_cap);
        auto ordinate = [&](double t) {
            return h * std::pow(std::max(0.0, 1.0 - t * t), 1.0 / (2.0 * delta));
        };
        const double y_hi = ordinate(t0); // t increasing means y decreasing
        const double y_lo = ordinate(hi);
        val -= numerics::integrate(
            [&](double y) {
                return ordinate_work_integrand(field, h, x_apex, side, y);
            },
            y_lo, y_hi, 1e-11);
    }
    return sign * val;
}

/// Jacobi determinant along a vertical geodesic (delta < 1): solves
/// Zdd = delta y^{2 delta - 2} Z with y descending/ascending at unit speed.
double jacobi_vertical(double delta, double y_start, double y_end) {
    const double d = std::abs(std::pow(y_start, 1.0 - delta) -
                              std::pow(y_end, 1.0 - delta)) /
                     (1.0 - delta);
    if (d < 1e-12) return d;
    const double dir = y_end > y_start ? 1.0 : -1.0;
    using state_t = std::array<double, 3>;
    state_t s = {y_start, 0.0, 1.0};
    auto rhs = [&](const state_t& u, state_t& dudt, double) {
        const double y = std::max(u[0], 1e-14);
        dudt[0] = dir * std::pow(y, delta);
        dudt[1] = u[2];
        dudt[2] = delta * std::pow(y, 2.0 * delta - 2.0) * u[1];
    };
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(1e-13, 1e-13,
                                        ode::runge_kutta_cash_karp54<state_t>());
    ode::integrate_adaptive(stepper, rhs, s, 0.0, d, std::min(1e-3, d / 10.0));
    if (!std::isfinite(s[1]))
        throw NumericalFailure("jacobi_vertical: integration lost accuracy at y = " +
                               std::to_string(s[0]));
    return std::abs(s[1]);
}

} // namespace

IsometrySpec IsometrySpec::from_model(const model::ModelParams& params) {
    params.validate();
    if (!(params.nu > 0.0))
        throw DegenerateModel("IsometrySpec::from_model: nu must be > 0, got " +
                              std::to_string(params.nu));
    IsometrySpec spec;
    spec.delta = params.delta;
    spec.beta = params.beta;
    spec.nu = params.nu;
    spec.rho = params.rho;
    spec.p = params.beta == 1.0 ? 1.0 : 0.0;
    return spec;
}

bool IsometrySpec::is_valid() const noexcept {
    if (!(delta > 0.0 && delta <= 1.0)) return false;
    if (!(beta >= 0.0 && beta <= 1.0)) return false;
    if (!(nu > 0.0)) return false;
    if (!(std::abs(rho) < 1.0)) return false;
    if (beta == 1.0 && !(p > 0.0)) return false;
    if (beta < 1.0 && !(p >= 0.0)) return false;
    return true;
}

void IsometrySpec::validate() const {
    if (!(delta > 0.0 && delta <= 1.0))
        throw InvalidParameter("IsometrySpec: delta must lie in (0, 1], got " +
                               std::to_string(delta));
    if (!(beta >= 0.0 && beta <= 1.0))
        throw InvalidParameter("IsometrySpec: beta must lie in [0, 1], got " +
                               std::to_string(beta));
    if (!(nu > 0.0))
        throw InvalidParameter("IsometrySpec: nu must be > 0, got " +
                               std::to_string(nu));
    if (!(std::abs(rho) < 1.0))
        throw InvalidParameter("IsometrySpec: |rho| must be < 1, got " +
                               std::to_string(rho));
    if (beta == 1.0 && !(p > 0.0))
        throw InvalidParameter("IsometrySpec: p must be > 0 when beta = 1, got " +
                               std::to_string(p));
    if (beta < 1.0 && !(p >= 0.0))
        throw InvalidParameter("IsometrySpec: p must be >= 0, got " +
                               std::to_string(p));
}

double primitive_J(const IsometrySpec& spec, double x) {
    spec.validate();
    if (!(x > 0.0))
        throw InvalidPoint("primitive_J: x must be > 0, got " + std::to_string(x));
    if (spec.beta == 1.0) return std::log(x / spec.p);
    return (std::pow(x, 1.0 - spec.beta) - std::pow(spec.p, 1.0 - spec.beta)) /
           (1.0 - spec.beta);
}

PhiJacobian phi_jacobian(const IsometrySpec& spec, double x) {
    spec.validate();
    if (!(x > 0.0))
        throw InvalidPoint("phi_jacobian: x must be > 0, got " + std::to_string(x));
    const double scale = std::pow(spec.nu, 1.0 - spec.delta);
    const double q = q_of(spec.rho);
    PhiJacobian jac;
    jac.dX_dx = scale / (q * std::pow(x, spec.beta));
    jac.dX_dy = -scale * spec.rho / q;
    jac.dY_dx = 0.0;
    jac.dY_dy = scale;
    return jac;
}

double phi_det(const IsometrySpec& spec, double x) {
    const PhiJacobian jac = phi_jacobian(spec, x);
    return jac.dX_dx * jac.dY_dy - jac.dX_dy * jac.dY_dx;
}

geometry::HalfPlanePoint phi_forward(const IsometrySpec& spec,
                                     const geometry::HalfPlanePoint& point) {
    spec.validate();
    point.validate();
    require_frame(point, geometry::Frame::ModelSpace, "phi_forward");
    const double scale = std::pow(spec.nu, 1.0 - spec.delta);
    const double q = q_of(spec.rho);
    geometry::HalfPlanePoint image;
    image.x = scale * (primitive_J(spec, point.x) - spec.rho * point.y) / q;
    image.y = scale * point.y;
    image.frame = geometry::Frame::DeltaSpace;
    return image;
}

geometry::HalfPlanePoint phi_inverse(const IsometrySpec& spec,
                                     const geometry::HalfPlanePoint& point) {
    spec.validate();
    point.validate();
    require_frame(point, geometry::Frame::DeltaSpace, "phi_inverse");
    const double unscale = std::pow(spec.nu, spec.delta - 1.0);
    const double q = q_of(spec.rho);
    const double J = unscale * (q * point.x + spec.rho * point.y);
    geometry::HalfPlanePoint pre;
    if (spec.beta == 1.0) {
        pre.x = spec.p * std::exp(J);
    } else {
        const double base = (1.0 - spec.beta) * J +
                            std::pow(spec.p, 1.0 - spec.beta);
        if (!(base > 0.0))
            throw OutOfImage("phi_inverse: point (X, Y) = (" +
                             std::to_string(point.x) + ", " + std::to_string(point.y) +
                             ") lies outside the image (recovered J = " +
                             std::to_string(J) + ")");
        pre.x = std::pow(base, 1.0 / (1.0 - spec.beta));
    }
    pre.y = unscale * point.y;
    pre.frame = geometry::Frame::ModelSpace;
    return pre;
}

EffectiveParams effective_params(const model::ModelParams& params) {
    params.validate();
    if (!(params.nu > 0.0))
        throw DegenerateModel("effective_params: nu must be > 0, got " +
                              std::to_string(params.nu));
    const double delta = params.delta;
    EffectiveParams eff;
    eff.s_scale = std::pow(params.nu, 2.0 * (delta * delta - delta + 1.0));
    eff.lambda = params.lambda_raw *
                 std::pow(params.nu, 2.0 * delta * (1.0 - delta) - 2.0);
    eff.mu = params.mu_raw * std::pow(params.nu, -delta);
    return eff;
}

double s_tilde(const model::ModelParams& params, double tau) {
    if (!(tau >= 0.0))
        throw InvalidParameter("s_tilde: tau must be >= 0, got " + std::to_string(tau));
    return effective_params(params).s_scale * tau;
}

DriftFieldSample drift_field(const IsometrySpec& spec, double lambda, double mu,
                             const geometry::HalfPlanePoint& point) {
    spec.validate();
    point.validate();
    const double q = q_of(spec.rho);
    const double Y = point.y;
    const double X = point.x;
    DriftFieldSample sample;
    sample.at = point;
    sample.fy = lambda * (Y - mu);
    if (spec.beta == 0.0) {
        sample.fx = -(spec.rho / q) * lambda * (Y - mu);
        sample.div = lambda;
        return sample;
    }
    const double y2d = std::pow(Y, 2.0 * spec.delta);
    if (spec.beta == 1.0) {
        sample.fx = -std::pow(spec.nu, spec.delta - 1.0) * y2d / (2.0 * q) -
                    (spec.rho / q) * lambda * (Y - mu);
        sample.div = lambda;
        return sample;
    }
    const double denom = q * X + spec.rho * Y;
    if (!(denom > 0.0))
        throw SingularField("drift_field: q X + rho Y = " + std::to_string(denom) +
                            " at (X, Y) = (" + std::to_string(X) + ", " +
                            std::to_string(Y) + ") is outside the image");
    const double backbone = spec.beta * y2d / (2.0 * (1.0 - spec.beta) * denom);
    sample.fx = -(backbone + spec.rho * lambda * (Y - mu)) / q;
    sample.div = spec.beta * y2d / (2.0 * (1.0 - spec.beta) * denom * denom) + lambda;
    return sample;
}

double work_along_geodesic(const DriftField& field, const geometry::GeodesicPath& path) {
    const auto& samples = path.samples;
    const std::size_t n = samples.size();
    if (n < 2) return 0.0;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const DriftFieldSample f = field.at(samples[i].state.point);
        g[i] = f.fx * samples[i].state.vx + f.fy * samples[i].state.vy;
    }
    double work = 0.0;
    std::size_t i = 0;
    while (i + 2 < n) {
        const double h1 = samples[i + 1].t - samples[i].t;
        const double h2 = samples[i + 2].t - samples[i + 1].t;
        if (std::abs(h1 - h2) <= 1e-9 * std::max(h1, h2)) {
            work += (samples[i + 2].t - samples[i].t) / 6.0 *
                    (g[i] + 4.0 * g[i + 1] + g[i + 2]);
            i += 2;
        } else {
            work += 0.5 * h1 * (g[i] + g[i + 1]);
            i += 1;
        }
    }
    if (i + 1 < n)
        work += 0.5 * (samples[i + 1].t - samples[i].t) * (g[i] + g[i + 1]);
    return work;
}

double work_two_point(const DriftField& field, const geometry::TwoPointGeodesic& geo) {
    field.spec.validate();
    if (geo.vertical) {
        const double X = geo.a.x;
        const double ya = geo.a.y;
        const double yb = geo.b.y;
        if (ya == yb) return 0.0;
        const double lo = std::min(ya, yb);
        const double hi = std::max(ya, yb);
        const double sign = yb > ya ? 1.0 : -1.0;
        const double val = numerics::integrate(
            [&](double Y) {
                geometry::HalfPlanePoint pt;
                pt.x = X;
                pt.y = Y;
                return field.at(pt).fy;
            },
            lo, hi, 1e-11);
        return sign * val;
    }
    const double delta = field.spec.delta;
    const double h = geo.h;
    auto t_param = [&](double y) {
        return std::sqrt(std::max(0.0, 1.0 - std::pow(y / h, 2.0 * delta)));
    };
    const double ta = t_param(geo.a.y);
    const double tb = t_param(geo.b.y);
    const int side_a = geo.t_a > 1e-14 ? 1 : (geo.t_a < -1e-14 ? -1 : 0);
    const int side_b = geo.t_b > 1e-14 ? 1 : (geo.t_b < -1e-14 ? -1 : 0);
    if (side_a == 0)
        return branch_work(field, h, geo.x_apex, side_b == 0 ? 1 : side_b, 0.0, tb);
    if (side_b == 0)
        return branch_work(field, h, geo.x_apex, side_a, ta, 0.0);
    if (side_a == side_b)
        return branch_work(field, h, geo.x_apex, side_a, ta, tb);
    return branch_work(field, h, geo.x_apex, side_a, ta, 0.0) +
           branch_work(field, h, geo.x_apex, side_b, 0.0, tb);
}

double circle_work_primitive(double a, double rho, double x) {
    if (!(std::abs(rho) < 1.0))
        throw InvalidParameter("circle_work_primitive: |rho| must be < 1, got " +
                               std::to_string(rho));
    if (!(x > -1.0 && x <= 1.0))
        throw InvalidParameter("circle_work_primitive: x must lie in (-1, 1], got " +
                               std::to_string(x));
    const double q = q_of(rho);
    const double root = std::sqrt(std::max(0.0, 1.0 - x * x));
    const double den = a + q * x + rho * root;
    if (!(den > 0.0))
        throw InvalidParameter("circle_work_primitive: log argument " +
                               std::to_string(den) + " is not positive");
    const double s2 = a * a - 1.0;
    if (std::abs(s2) <= 1e-12)
        throw InvalidParameter("circle_work_primitive: a = " + std::to_string(a) +
                               " is at the branch point |a| = 1");
    const double w = std::sqrt((1.0 - x) / (1.0 + x));
    const double N = rho + (a - q) * w;
    double arctan_term;
    if (s2 > 0.0) {
        const double s = std::sqrt(s2);
        arctan_term = std::atan(N / s) / s;
    } else {
        const double m = std::sqrt(-s2);
        if (std::abs(std::abs(N) - m) <= 1e-9 * (1.0 + m))
            throw InvalidParameter(
                "circle_work_primitive: continuation argument N = " +
                std::to_string(N) + " is at the branch point |N| = " +
                std::to_string(m));
        arctan_term = std::abs(N) < m ? -std::atanh(N / m) / m
                                      : -std::atanh(m / N) / m;
    }
    const double lead =
        2.0 * a * rho * (3.0 - 3.0 * rho * rho + a * a * (4.0 * rho * rho - 3.0)) *
        arctan_term;
    const double rest =
        q + 4.0 * a * x - 8.0 * a * rho * rho * x - 2.0 * q * x * x +
        4.0 * (1.0 - 4.0 * a * a) * rho * rho * rho * std::acos(x) +
        2.0 * rho * ((x - 4.0 * a * q) * root + (6.0 * a * a - 3.0) * std::acos(x)) +
        4.0 * q * (1.0 - rho * rho + a * a * (4.0 * rho * rho - 1.0)) * std::log(den);
    return lead + 0.25 * rest;
}

SabrWork sabr_work_closed_form(const pricing::SabrGeometry& geo, double beta,
                               double rho, double lambda, double mu) {
    if (!(beta >= 0.0 && beta <= 1.0))
        throw InvalidParameter("sabr_work_closed_form: beta must lie in [0, 1], got " +
                               std::to_string(beta));
    if (!(std::abs(rho) < 1.0))
        throw InvalidParameter("sabr_work_closed_form: |rho| must be < 1, got " +
                               std::to_string(rho));
    SabrWork out;
    if (geo.degenerate) return out;
    const double q = q_of(rho);

    if (geo.vertical) {
        out.w_revert = 0.5 * lambda * (geo.Yend * geo.Yend - geo.Y0 * geo.Y0) -
                       lambda * mu * (geo.Yend - geo.Y0);
        return out;
    }
    geo.validate();
    const double x0 = clamp_unit((geo.X0 - geo.l) / geo.r, "sabr_work_closed_form");
    const double xe = clamp_unit((geo.Xend - geo.l) / geo.r, "sabr_work_closed_form");

    out.w_revert = -(rho * lambda / q) * geo.r * geo.r *
                       (half_lens(xe) - half_lens(x0)) +
                   (rho * lambda * mu / q) * (geo.Xend - geo.X0) +
                   0.5 * lambda * (geo.Yend * geo.Yend - geo.Y0 * geo.Y0) -
                   lambda * mu * (geo.Yend - geo.Y0);

    if (beta == 0.0 || x0 == xe) return out;
    if (beta == 1.0) {
        auto cubic = [](double u) { return u - u * u * u / 3.0; };
        out.w0 = -(geo.r * geo.r * geo.r / (2.0 * q)) * (cubic(xe) - cubic(x0));
        return out;
    }

    const double coeff = -beta * geo.r * geo.r / (2.0 * (1.0 - beta) * q);
    const double gl5 = coeff * circle_g_gl5(geo.a, rho, x0, xe);
    bool closed_ok = true;
    double closed = 0.0;
    try {
        closed = coeff * (circle_work_primitive(geo.a, rho, xe) -
                          circle_work_primitive(geo.a, rho, x0));
    } catch (const InvalidParameter&) {
        closed_ok = false;
    }
    if (closed_ok && geo.a * geo.a < 1.0) {
        // reject the continuation if its argument crosses the branch point
        const double m = std::sqrt(1.0 - geo.a * geo.a);
        auto n_of = [&](double x) {
            return rho + (geo.a - q) * std::sqrt((1.0 - x) / (1.0 + x));
        };
        const double n0 = n_of(x0);
        const double ne = n_of(xe);
        if ((n0 - m) * (ne - m) < 0.0 || (n0 + m) * (ne + m) < 0.0)
            closed_ok = false;
    }
    if (closed_ok &&
        std::abs(closed - gl5) <= 1e-4 * std::max(std::abs(closed), std::abs(gl5)) +
                                      1e-12) {
        out.w0 = closed;
        return out;
    }
    const double lo = std::min(x0, xe);
    const double hi = std::max(x0, xe);
    const double sign = xe > x0 ? 1.0 : -1.0;
    out.w0 = coeff * sign *
             numerics::integrate([&](double x) { return circle_g(geo.a, rho, x); },
                                 lo, hi, 1e-12);
    out.quadrature_fallback = true;
    return out;
}

double k1_origin(double delta, const DriftFieldSample& at_source) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw InvalidParameter("k1_origin: delta must lie in (0, 1], got " +
                               std::to_string(delta));
    const double y = at_source.at.y;
    if (!(y > 0.0))
        throw InvalidPoint("k1_origin: source ordinate must be > 0, got " +
                           std::to_string(y));
    return -delta * std::pow(y, 2.0 * delta - 2.0) / 6.0 + 0.5 * at_source.div -
           at_source.fy / y +
           1.5 * (at_source.fx * at_source.fx + at_source.fy * at_source.fy) /
               std::pow(y, 2.0 * delta);
}

KernelTerms kernel_terms(const IsometrySpec& spec, double lambda, double mu,
                         const geometry::HalfPlanePoint& a,
                         const geometry::HalfPlanePoint& b, double s) {
    spec.validate();
    a.validate();
    b.validate();
    const double delta = spec.delta;
    const DriftField field{spec, lambda, mu};
    KernelTerms terms;
    terms.s = s;
    terms.k1 = k1_origin(delta, field.at(a));
    const double scale = std::max({1.0, std::abs(a.x), a.y});
    if (std::abs(a.x - b.x) <= 1e-14 * scale && std::abs(a.y - b.y) <= 1e-14 * scale)
        return terms;
    const geometry::TwoPointGeodesic geo = geometry::two_point_solve(delta, a, b);
    terms.d = geo.d;
    terms.w = work_two_point(field, geo);
    if (geo.d < 1e-12) {
        terms.z = geo.d;
    } else if (delta == 1.0) {
        terms.z = std::sinh(geo.d);
    } else if (geo.vertical) {
        terms.z = jacobi_vertical(delta, a.y, b.y);
    } else {
        const double arc_scale = std::pow(geo.h, 1.0 - delta);
        const geometry::FundamentalJacobi fund = geometry::jacobi_fundamental(
            delta, geo.t_a / arc_scale, geo.t_b / arc_scale);
        terms.z = arc_scale * std::abs(fund.z);
    }
    return terms;
}

double heat_kernel_density(const IsometrySpec& spec,
                           const geometry::HalfPlanePoint& a,
                           const geometry::HalfPlanePoint& b, double s, int order,
                           double lambda, double mu) {
    if (!(s > 0.0))
        throw InvalidParameter("heat_kernel_density: s must be > 0, got " +
                               std::to_string(s));
    if (order != 0 && order != 1)
        throw InvalidParameter("heat_kernel_density: order must be 0 or 1, got " +
                               std::to_string(order));
    const KernelTerms terms = kernel_terms(spec, lambda, mu, a, b, s);
    const double base = std::exp(-terms.d * terms.d / (2.0 * s) + terms.w) /
                        (2.0 * kPi * s);
    const double amp = terms.d < 1e-6 ? 1.0 : std::sqrt(terms.d / terms.z);
    return base * amp * (1.0 + order * terms.k1 * s);
}

} // namespace deltasmile::kernel
