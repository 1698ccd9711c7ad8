#pragma once

// Thin wrappers over Boost.Odeint and Boost.Math used across the modules:
// scalar flows, adaptive quadrature and bracketed root finding.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace parabolica::numerics {

using ScalarFunction = std::function<double(double)>;
using PreciseFunction = std::function<long double(long double)>;

struct FlowOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    double initial_step = 1e-3;
};

/// Time-`duration` flow of x' = f(x) from x0 (negative duration flows backward),
/// adaptive Dormand-Prince 5(4).
double flow(const ScalarFunction& f, double x0, double duration, const FlowOptions& opts = {});

/// Same in extended precision with Runge-Kutta-Fehlberg 7(8); used to build
/// germs whose values must be accurate well below double rounding near 0.
long double flow_precise(const PreciseFunction& f, long double x0, long double duration,
                         long double abs_tol = 1e-24L, long double rel_tol = 1e-18L);

/// Adaptive Gauss-Kronrod (15 point) quadrature of f over [a, b] with the
/// given relative tolerance; throws IntegrationFailure when the error
/// estimate stays above it.
double integrate(const ScalarFunction& f, double a, double b, double rel_tol = 1e-12);

/// Bisection for a sign change of f on [lo, hi]; stops when the bracket is
/// narrower than rel_tol * max(|lo|, |hi|).
double bisect(const ScalarFunction& f, double lo, double hi, double rel_tol = 1e-12);

/// TOMS 748 on a bracket with a sign change, to full double precision.
double solve_bracketed(const ScalarFunction& f, double lo, double hi);

/// Points of a geometric grid from hi down to lo (both included), `count` >= 2.
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

/// Chebyshev points of the second kind mapped onto [lo, hi], ascending.
std::vector<double> chebyshev_nodes(double lo, double hi, std::size_t count);

/// Five-point central difference for f'(x) with step h.
double central_derivative(const ScalarFunction& f, double x, double h);

/// Worker count for parallel scans: PARABOLICA_THREADS if set, otherwise the
/// hardware concurrency; never less than 1.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace parabolica::numerics
