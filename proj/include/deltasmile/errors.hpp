#ifndef DELTASMILE_ERRORS_HPP
#define DELTASMILE_ERRORS_HPP

/**
 * @file errors.hpp
 * @brief Exception taxonomy shared by all deltasmile modules.
 *
 * Every failure mode exposed by the library maps to one of these types so
 * that callers (and the CLI exit-code logic) can distinguish bad inputs,
 * numerical breakdowns and domain/geometry violations without string
 * matching.
 */

#include <stdexcept>
#include <string>

namespace deltasmile {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A parameter violates its documented domain (e.g. rho outside (-1,1)).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A half-plane point violates y > 0 or a map's domain restriction.
class InvalidPoint : public Error {
public:
    using Error::Error;
};

/// Operation requested for nu = 0 where the stochastic-vol reduction is undefined.
class DegenerateModel : public Error {
public:
    using Error::Error;
};

/// An iterative numeric procedure (quadrature, series, root find) failed to converge.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// Geodesic integration reached the y -> 0 boundary before the requested length.
class BoundaryHit : public Error {
public:
    using Error::Error;
};

/// The perpendicular-foot equation has no root: the geodesic misses the target line.
class NoIntersection : public Error {
public:
    using Error::Error;
};

/// Requested derivative at the two-branch boundary of the foot equation.
class BranchAmbiguity : public Error {
public:
    using Error::Error;
};

/// Jacobi determinant vanished along the geodesic (cannot happen for negative curvature).
class ConjugatePoint : public Error {
public:
    using Error::Error;
};

/// delta = 1 must use the hyperbolic closed form instead of this operation.
class UseHyperbolicForm : public Error {
public:
    using Error::Error;
};

/// A grid touches a point the ODE cannot start from (e.g. y = 1 for Jacobi).
class InvalidGrid : public Error {
public:
    using Error::Error;
};

/// Drift field evaluated at (or integrated across) a singular denominator.
class SingularField : public Error {
public:
    using Error::Error;
};

/// Circle-geometry intermediates are out of their valid ranges.
class InvalidGeometry : public Error {
public:
    using Error::Error;
};

/// Point is outside the image of the half-plane isometry.
class OutOfImage : public Error {
public:
    using Error::Error;
};

/// Laplace expansion requested at a point that is not a strict interior minimum.
class NotAMinimum : public Error {
public:
    using Error::Error;
};

/// Monte Carlo price is outside no-arbitrage bounds; no implied vol exists.
class NoImpliedVol : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent run configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace deltasmile

#endif // DELTASMILE_ERRORS_HPP
