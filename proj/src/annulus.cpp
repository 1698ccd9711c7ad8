#include "parabolica/annulus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "parabolica/error.hpp"
#include "parabolica/numerics.hpp"
#include "parabolica/unfolding.hpp"

namespace parabolica::annulus {

namespace {

namespace odeint = boost::numeric::odeint;

using State = std::array<double, 2>; // alpha in radians, x
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double v) { return v - std::floor(v); }

struct Hit {
    State state;
    double time = 0.0;
};

// Guard called after every accepted step; may throw.
using Guard = std::function<void(const State&, double)>;

// Integrates the field (backward when dir < 0) until component c of the state
// reaches `level`. The crossing is bracketed on an accepted step, located on
// the cubic Hermite interpolant and polished by Newton on the dense output.
Hit run_to_level(const AnnulusField& field, const State& start, double dir, int c, double level, const Guard& guard) {
    auto rhs = [&](const State& s, State& ds, double) {
        ds[0] = dir;
        ds[1] = dir * field.radial(s[1]);
    };
    if (start[c] == level) {
        return {start, 0.0};
    }
    auto stepper = odeint::make_dense_output(field.tolerance, field.tolerance, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(start, 0.0, 1e-2);
    for (;;) {
        auto [t0, t1] = stepper.do_step(rhs);
        const State a = stepper.previous_state();
        const State b = stepper.current_state();
        const double ea = a[c] - level;
        const double eb = b[c] - level;
        if (eb == 0.0) {
            return {b, t1};
        }
        if ((ea < 0.0) != (eb < 0.0)) {
            State da, db;
            rhs(a, da, t0);
            rhs(b, db, t1);
            const double h = t1 - t0;
            auto hermite = [&](double s) {
                double s2 = s * s, s3 = s2 * s;
                return (2 * s3 - 3 * s2 + 1) * ea + (s3 - 2 * s2 + s) * h * da[c] + (-2 * s3 + 3 * s2) * eb +
                       (s3 - s2) * h * db[c];
            };
            double lo = 0.0, hi = 1.0;
            for (int i = 0; i < 60; ++i) {
                double mid = 0.5 * (lo + hi);
                if ((hermite(mid) < 0.0) == (ea < 0.0)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            double t = t0 + 0.5 * (lo + hi) * h;
            State x;
            for (int i = 0; i < 4; ++i) {
                stepper.calc_state(t, x);
                State dx;
                rhs(x, dx, t);
                double r = x[c] - level;
                if (r == 0.0 || dx[c] == 0.0) {
                    break;
                }
                t = std::clamp(t - r / dx[c], t0, t1);
            }
            stepper.calc_state(t, x);
            return {x, t};
        }
        if (guard) {
            guard(b, t1);
        }
    }
}

unfolding::ModelUnfolding model_of(const AnnulusField& field) { return unfolding::ModelUnfolding::standard(field.a_coeff); }

void require_field(const AnnulusField& field) {
    if (!(std::abs(field.a_coeff) < 1.0)) {
        throw Error(Errc::OutOfDomain, "|a| must be below 1 so that 1 + a x > 0 on [-1, 1]");
    }
}

} // namespace

double AnnulusField::radial(double x) const { return (x * x + epsilon) / ((1.0 + a_coeff * x) * kTwoPi); }

LoopPoint LoopPoint::on(Loop loop, double angle) { return {loop, frac(angle)}; }

double first_hit(const AnnulusField& field, const LoopPoint& start) {
    require_field(field);
    const double theta = frac(start.angle);
    if (theta == 0.0) {
        return start.loop == Loop::Minus ? -1.0 : 1.0;
    }
    Guard guard = [&](const State& s, double t) {
        if (field.epsilon == 0.0 && std::abs(s[1]) < 1e-6) {
            throw Error(Errc::NoCrossing, "orbit reached the cycle before the section");
        }
        if (t > 2.0 * kTwoPi) {
            throw Error(Errc::NoCrossing, "no section crossing within one turn");
        }
    };
    if (start.loop == Loop::Minus) {
        return run_to_level(field, {kTwoPi * theta, -1.0}, 1.0, 0, kTwoPi, guard).state[1];
    }
    return run_to_level(field, {kTwoPi * theta, 1.0}, -1.0, 0, 0.0, guard).state[1];
}

CanonicalCoordinate canonical_coordinate(const AnnulusField& field, const LoopPoint& p) {
    const double b = first_hit(field, p);
    const auto side = p.loop == Loop::Minus ? unfolding::LoopSide::Minus : unfolding::LoopSide::Plus;
    const double t = unfolding::time_function_eps(model_of(field), field.epsilon, side, b);
    return {p.loop, circle::CirclePoint::from_double(t)};
}

Transit transition_map(const AnnulusField& field, const LoopPoint& a) {
    require_field(field);
    if (!(field.epsilon > 0.0)) {
        throw Error(Errc::Stuck, "for eps <= 0 orbits from C^- never pass x = 0");
    }
    const double budget = kTwoPi * (2.0 * unfolding::tau(model_of(field), field.epsilon) + 8.0);
    Guard guard = [&](const State&, double t) {
        if (t > budget) {
            throw Error(Errc::Stuck, "no crossing of C^+ within the expected time");
        }
    };
    const double alpha0 = kTwoPi * frac(a.angle);
    Hit hit = run_to_level(field, {alpha0, -1.0}, 1.0, 1, 1.0, guard);
    return {LoopPoint::on(Loop::Plus, hit.state[0] / kTwoPi), (hit.state[0] - alpha0) / kTwoPi};
}

double return_map(const AnnulusField& field, double x) {
    require_field(field);
    return run_to_level(field, {0.0, x}, 1.0, 0, kTwoPi, {}).state[1];
}

std::vector<double> return_map_fixed_points(const AnnulusField& field, double lo, double hi, std::size_t grid) {
    if (grid < 2 || !(lo < hi)) {
        throw Error(Errc::OutOfDomain, "fixed-point scan needs lo < hi and at least two grid points");
    }
    std::vector<double> xs(grid), d(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
    }
    numerics::parallel_for(grid, [&](std::size_t i) { d[i] = return_map(field, xs[i]) - xs[i]; });
    std::vector<double> out;
    for (std::size_t i = 0; i < grid; ++i) {
        if (d[i] == 0.0) {
            out.push_back(xs[i]);
        } else if (i + 1 < grid && d[i + 1] != 0.0 && (d[i] < 0.0) != (d[i + 1] < 0.0)) {
            out.push_back(numerics::solve_bracketed([&](double x) { return return_map(field, x) - x; }, xs[i],
                                                    xs[i + 1]));
        }
    }
    return out;
}

std::vector<DetectedConnection> detect_sparkling_connections(const AnnulusField& field_template,
                                                             const LoopPoint& s_minus, const LoopPoint& s_plus,
                                                             double eps_lo, double eps_hi,
                                                             const DetectOptions& options) {
    if (!(eps_lo > 0.0) || !(eps_lo < eps_hi)) {
        throw Error(Errc::NonpositiveEpsilon, "detection needs 0 < eps_lo < eps_hi");
    }
    struct Sample {
        double turns = 0.0;
        double g = 0.0;
    };
    auto sample = [&](double eps) {
        AnnulusField field = field_template;
        field.epsilon = eps;
        Transit t = transition_map(field, s_minus);
        double phi_landing = canonical_coordinate(field, t.landing).phi.value();
        double phi_target = canonical_coordinate(field, s_plus).phi.value();
        return Sample{t.turns, frac(phi_landing - phi_target)};
    };
    // lift of -g anchored at the winding: turns + d with d = -g - turns mod 1
    auto lift = [](const Sample& s, double d_prev) {
        double d = -s.g - s.turns;
        d += std::round(d_prev - d);
        return s.turns + d;
    };

    const auto eps = numerics::geometric_grid(eps_lo, eps_hi, options.grid);
    std::vector<Sample> samples(eps.size());
    numerics::parallel_for(eps.size(), [&](std::size_t i) { samples[i] = sample(eps[i]); });

    std::vector<double> h(eps.size());
    double d = frac(-samples[0].g - samples[0].turns);
    h[0] = samples[0].turns + d;
    for (std::size_t i = 1; i < eps.size(); ++i) {
        h[i] = lift(samples[i], d);
        d = h[i] - samples[i].turns;
        if (std::abs(h[i] - h[i - 1]) > 0.5) {
            throw Error(Errc::GridTooCoarse, "lift jumps by " + std::to_string(h[i] - h[i - 1]) + " between eps = " +
                                                 std::to_string(eps[i - 1]) + " and " + std::to_string(eps[i]));
        }
    }

    struct Cell {
        std::size_t i;
        long n;
        double d;
    };
    std::vector<Cell> cells;
    for (std::size_t i = 1; i < eps.size(); ++i) {
        double f0 = std::floor(h[i - 1]), f1 = std::floor(h[i]);
        if (f0 != f1) {
            cells.push_back({i, static_cast<long>(std::max(f0, f1)), h[i] - samples[i].turns});
        }
    }
    std::vector<DetectedConnection> out(cells.size());
    numerics::parallel_for(cells.size(), [&](std::size_t c) {
        const Cell& cell = cells[c];
        auto f = [&](double e) { return lift(sample(e), cell.d) - static_cast<double>(cell.n); };
        out[c] = {cell.n, numerics::bisect(f, eps[cell.i], eps[cell.i - 1], options.rel_tol)};
    });
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.epsilon > y.epsilon; });
    return out;
}

LoopAngles loop_angles(const circle::CharacteristicPair& pair) {
    LoopAngles out;
    for (double v : pair.minus.values()) {
        out.minus.push_back(frac(-v));
    }
    for (double v : pair.plus.values()) {
        out.plus.push_back(frac(-v));
    }
    return out;
}

std::vector<SimulatedEvent> detect_scenario(const AnnulusField& field_template, const LoopAngles& loops,
                                            double eps_lo, double eps_hi, const DetectOptions& options) {
    std::vector<SimulatedEvent> out;
    for (std::size_t k = 0; k < loops.plus.size(); ++k) {
        for (std::size_t m = 0; m < loops.minus.size(); ++m) {
            auto found = detect_sparkling_connections(field_template, LoopPoint::on(Loop::Minus, loops.minus[m]),
                                                      LoopPoint::on(Loop::Plus, loops.plus[k]), eps_lo, eps_hi,
                                                      options);
            for (const auto& c : found) {
                out.push_back({k, m, c.n, c.epsilon});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.epsilon > y.epsilon; });
    return out;
}

} // namespace parabolica::annulus
