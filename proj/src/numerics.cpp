#include "deltasmile/numerics.hpp"
#include "deltasmile/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace deltasmile::numerics {

double hyp2f1_series(double a, double b, double c, double z,
                     double tol, std::size_t max_terms) {
    if (c <= 0.0 && c == std::floor(c))
        throw InvalidParameter("hyp2f1: c must not be a non-positive integer, got " +
                               std::to_string(c));
    if (std::abs(z) >= 1.0)
        throw InvalidParameter("hyp2f1: series requires |z| < 1, got z = " +
                               std::to_string(z));
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t n = 0; n < max_terms; ++n) {
        const double dn = static_cast<double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
        sum += term;
        if (std::abs(term) < tol * std::abs(sum))
            return sum;
    }
    throw NumericalFailure("hyp2f1: series did not converge at z = " + std::to_string(z));
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
    if (lo == hi) return 0.0;
    double error = 0.0;
    double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, lo, hi, 15, tol, &error);
    double scale = std::max(1.0, std::abs(value));
    if (!std::isfinite(value) || error > 1e-6 * scale) {
        // Bisection-limited rules stall on endpoint singularities; the
        // double-exponential rule handles those without special-casing.
        try {
            thread_local boost::math::quadrature::tanh_sinh<double> ts;
            double l1 = 0.0;
            std::size_t levels = 0;
            value = ts.integrate(f, lo, hi, std::sqrt(tol), &error, &l1, &levels);
        } catch (const std::exception&) {
            throw NumericalFailure("integrate: quadrature failed on [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) +
                                   "]");
        }
        scale = std::max(1.0, std::abs(value));
        if (!std::isfinite(value) || error > 1e-6 * scale)
            throw NumericalFailure("integrate: adaptive quadrature failed on [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) +
                                   "], error estimate " + std::to_string(error));
    }
    return value;
}

double integrate_fixed(const std::function<double(double)>& f, double lo, double hi) {
    return boost::math::quadrature::gauss<double, 31>::integrate(f, lo, hi);
}

double find_root(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NumericalFailure("find_root: endpoints do not bracket a root on [" +
                               std::to_string(lo) + ", " + std::to_string(hi) + "]");
    boost::math::tools::eps_tolerance<double> tolerance(52);
    std::uintmax_t iters = 200;
    const auto bracket =
        boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tolerance, iters);
    return 0.5 * (bracket.first + bracket.second);
}

std::vector<double> find_all_roots(const std::function<double(double)>& f,
                                   double lo, double hi, int n) {
    std::vector<double> roots;
    double x_prev = lo;
    double f_prev = f(lo);
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / n;
        const double fx = f(x);
        if (f_prev == 0.0) {
            roots.push_back(x_prev);
        } else if (std::isfinite(f_prev) && std::isfinite(fx) &&
                   (f_prev > 0.0) != (fx > 0.0)) {
            roots.push_back(find_root(f, x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    if (f_prev == 0.0) roots.push_back(x_prev);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double r1, double r2) {
                                return std::abs(r1 - r2) <
                                       1e-12 * std::max(1.0, std::abs(hi));
                            }),
                roots.end());
    return roots;
}

std::pair<double, double> minimize(const std::function<double(double)>& f,
                                   double lo, double hi, int bits) {
    std::uintmax_t iters = 500;
    return boost::math::tools::brent_find_minima(f, lo, hi, bits, iters);
}

double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double pairwise_mean(std::span<const double> xs) {
    if (xs.empty())
        throw InvalidParameter("pairwise_mean: empty input");
    return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double finite_difference(const std::function<double(double)>& f, double x,
                         int order, double h) {
    const double f_3 = f(x - 3 * h), f_2 = f(x - 2 * h), f_1 = f(x - h);
    const double f1 = f(x + h), f2 = f(x + 2 * h), f3 = f(x + 3 * h);
    const double f0 = f(x);
    switch (order) {
        case 1: // O(h^4)
            return (f_2 - 8 * f_1 + 8 * f1 - f2) / (12 * h);
        case 2: // O(h^4)
            return (-f_2 + 16 * f_1 - 30 * f0 + 16 * f1 - f2) / (12 * h * h);
        case 3: // O(h^4), seven-point
            return (f_3 - 8 * f_2 + 13 * f_1 - 13 * f1 + 8 * f2 - f3) /
                   (8 * h * h * h);
        case 4: // O(h^4), seven-point
            return (-f_3 + 12 * f_2 - 39 * f_1 + 56 * f0 - 39 * f1 + 12 * f2 - f3) /
                   (6 * h * h * h * h);
        default:
            throw InvalidParameter("finite_difference: order must be 1..4, got " +
                                   std::to_string(order));
    }
}

double beta_function(double a, double b) {
    if (a <= 0.0 || b <= 0.0)
        throw InvalidParameter("beta_function: arguments must be positive");
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

} // namespace deltasmile::numerics
