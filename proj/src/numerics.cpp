#include "parabolica/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include "parabolica/error.hpp"

// odeint ships the scalar norm for float and double only
namespace boost::numeric::odeint {
template <>
struct vector_space_norm_inf<long double> {
    using result_type = long double;
    long double operator()(long double x) const { return std::abs(x); }
};
} // namespace boost::numeric::odeint

namespace parabolica::numerics {

namespace odeint = boost::numeric::odeint;

double flow(const ScalarFunction& f, double x0, double duration, const FlowOptions& opts) {
    if (duration == 0.0) {
        return x0;
    }
    double x = x0;
    auto rhs = [&](const double& state, double& dxdt, double) { dxdt = f(state); };
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<double>>(opts.abs_tol, opts.rel_tol);
    double dt = std::copysign(std::min(opts.initial_step, std::abs(duration)), duration);
    odeint::integrate_adaptive(stepper, rhs, x, 0.0, duration, dt);
    if (!std::isfinite(x)) {
        throw Error(Errc::IntegrationFailure, "flow diverged");
    }
    return x;
}

long double flow_precise(const PreciseFunction& f, long double x0, long double duration, long double abs_tol,
                         long double rel_tol) {
    if (duration == 0.0L) {
        return x0;
    }
    long double x = x0;
    auto rhs = [&](const long double& state, long double& dxdt, long double) { dxdt = f(state); };
    using stepper_t = odeint::runge_kutta_fehlberg78<long double, long double, long double, long double>;
    auto stepper = odeint::make_controlled<stepper_t>(abs_tol, rel_tol);
    long double dt = std::copysign(std::min(0.05L, std::abs(duration)), duration);
    odeint::integrate_adaptive(stepper, rhs, x, 0.0L, duration, dt);
    if (!std::isfinite(x)) {
        throw Error(Errc::IntegrationFailure, "precise flow diverged");
    }
    return x;
}

double integrate(const ScalarFunction& f, double a, double b, double rel_tol) {
    if (a == b) {
        return 0.0;
    }
    double err = 0.0;
    double l1 = 0.0;
    double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, rel_tol, &err, &l1);
    // summed per-interval estimates of a noisy integrand stall near rounding level
    const double floor = 1e3 * std::numeric_limits<double>::epsilon();
    const double accepted = std::max(10.0 * rel_tol, floor) * std::max(l1, 1e-300);
    if (std::isfinite(value) && err > accepted) {
        // the 15-point estimate has a spurious floor on very short intervals
        double err61 = 0.0;
        double check = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 5, rel_tol, &err61);
        if (std::abs(check - value) <= accepted) {
            err = std::abs(check - value);
        }
    }
    if (!std::isfinite(value) || err > accepted) {
        throw Error(Errc::IntegrationFailure, "quadrature did not reach tolerance (error estimate " +
                                                  std::to_string(err) + ")");
    }
    return value;
}

double bisect(const ScalarFunction& f, double lo, double hi, double rel_tol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) {
        return lo;
    }
    if (fhi == 0.0) {
        return hi;
    }
    if ((flo > 0) == (fhi > 0)) {
        throw Error(Errc::NoBracket, "no sign change on the bracket");
    }
    auto tol = [rel_tol](double a, double b) {
        return std::abs(b - a) <= rel_tol * std::max(std::abs(a), std::abs(b));
    };
    std::uintmax_t max_iter = 400;
    auto r = boost::math::tools::bisect(f, lo, hi, tol, max_iter);
    return 0.5 * (r.first + r.second);
}

double solve_bracketed(const ScalarFunction& f, double lo, double hi) {
    std::uintmax_t max_iter = 200;
    boost::math::tools::eps_tolerance<double> tol(52);
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) {
        return lo;
    }
    if (fhi == 0.0) {
        return hi;
    }
    if ((flo > 0) == (fhi > 0)) {
        throw Error(Errc::NoBracket, "no sign change on the bracket");
    }
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    return 0.5 * (r.first + r.second);
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
    std::vector<double> grid(count);
    const double ratio = std::log(lo / hi) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = hi * std::exp(ratio * static_cast<double>(i));
    }
    grid.front() = hi;
    grid.back() = lo;
    return grid;
}

std::vector<double> chebyshev_nodes(double lo, double hi, std::size_t count) {
    std::vector<double> nodes(count);
    for (std::size_t i = 0; i < count; ++i) {
        double c = -std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1));
        nodes[i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * c;
    }
    nodes.front() = lo;
    nodes.back() = hi;
    return nodes;
}

double central_derivative(const ScalarFunction& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

std::size_t worker_count() {
    std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PARABOLICA_THREADS")) {
        try {
            long v = std::stol(env);
            if (v >= 1) {
                return static_cast<std::size_t>(v);
            }
        } catch (const std::exception&) {
        }
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace parabolica::numerics
