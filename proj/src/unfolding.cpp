#include "parabolica/unfolding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "parabolica/error.hpp"
#include "parabolica/numerics.hpp"

namespace parabolica::unfolding {

namespace {

// Antiderivative of 1/u_eps.
double antiderivative(double eps, double a, double x) {
    if (eps == 0.0) {
        return -1.0 / x + a * std::log(std::abs(x));
    }
    const double s = std::sqrt(eps);
    return std::atan(x / s) / s + 0.5 * a * std::log(x * x + eps);
}

void require_field_defined(double a, double x) {
    if (1.0 + a * x <= 0.0) {
        throw Error(Errc::OutOfDomain, "1 + a x vanishes before x = " + std::to_string(x));
    }
}

int sign_of(double v) { return (v > 0) - (v < 0); }

} // namespace

ModelUnfolding ModelUnfolding::standard(double a_coeff, double b_minus, double b_plus) {
    ModelUnfolding m;
    if (a_coeff != 0.0) {
        m.a = [a_coeff](double) { return a_coeff; };
    }
    m.b_minus = b_minus;
    m.b_plus = b_plus;
    return m;
}

double ModelUnfolding::field(double eps, double x) const { return (x * x + eps) / (1.0 + coefficient(eps) * x); }

double time_function_eps(const ModelUnfolding& model, double eps, LoopSide side, double b) {
    if (eps < 0.0 || !std::isfinite(eps)) {
        throw Error(Errc::NonpositiveEpsilon, "time charts need eps >= 0");
    }
    const double a = model.coefficient(eps);
    const double x0 = model.chart(eps, side == LoopSide::Plus ? model.b_plus : model.b_minus);
    const double x1 = model.chart(eps, b);
    require_field_defined(a, x0);
    require_field_defined(a, x1);
    if (eps == 0.0 && (x0 == 0.0 || x1 == 0.0 || (x0 > 0.0) != (x1 > 0.0))) {
        throw Error(Errc::SingularIntegrand, "at eps = 0 the path from " + std::to_string(x0) + " to " +
                                                 std::to_string(x1) + " meets the zero of u_0");
    }
    if (x0 == x1) {
        return 0.0;
    }
    return antiderivative(eps, a, x1) - antiderivative(eps, a, x0);
}

double tau(const ModelUnfolding& model, double eps) {
    if (!(eps > 0.0)) {
        throw Error(Errc::NonpositiveEpsilon, "tau needs eps > 0");
    }
    return time_function_eps(model, eps, LoopSide::Minus, model.b_plus);
}

double solve_connection(const ModelUnfolding& model, const TauFunction& tau_km, long n, double eps_max,
                        const ConnectionOptions& options) {
    if (!(eps_max > 0.0)) {
        throw Error(Errc::NonpositiveEpsilon, "eps_max must be positive");
    }
    auto g = [&](double eps) { return tau_km(eps) + tau(model, eps) - static_cast<double>(n); };

    std::vector<std::pair<double, double>> scan;
    double eps = eps_max;
    for (int i = 0; i < 20000 && eps > 1e-300; ++i, eps *= options.grid_ratio) {
        double v = g(eps);
        scan.emplace_back(eps, v);
        // beyond g > 1 a bounded tau_km cannot bring g back to 0
        if (v > 1.0 && scan.size() >= 8) {
            break;
        }
    }
    std::vector<std::size_t> changes;
    for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
        if (sign_of(scan[i].second) != sign_of(scan[i + 1].second) && scan[i + 1].second != 0.0) {
            changes.push_back(i);
        }
    }
    if (changes.empty()) {
        throw Error(Errc::NoBracket, "tau_km + tau - " + std::to_string(n) + " has no sign change on (0, " +
                                         std::to_string(eps_max) + "]");
    }
    if (changes.size() > 1) {
        throw Error(Errc::MultipleRoots, std::to_string(changes.size()) + " sign changes for n = " +
                                             std::to_string(n) + "; eps_max is outside the monotone regime");
    }
    const auto& hi = scan[changes[0]];
    const auto& lo = scan[changes[0] + 1];
    if (hi.second == 0.0) {
        return hi.first;
    }
    return numerics::bisect(g, lo.first, hi.first, options.rel_tol);
}

OrderReport check_order(const ModelUnfolding& model, const Scenario& s,
                        const std::function<double(std::size_t, std::size_t, double)>& tau_km) {
    OrderReport r;
    const std::size_t M = s.pair.M();
    auto channel = [&](std::size_t k, std::size_t m, double eps) {
        return tau_km ? tau_km(k, m, eps) : s.tau0.at(k * M + m);
    };
    std::map<long, std::vector<const BifurcationEvent*>> by_n;
    for (const auto& e : s.events) {
        double res = std::abs(channel(e.k, e.m, e.epsilon) + tau(model, e.epsilon) - static_cast<double>(e.n));
        r.max_residual = std::max(r.max_residual, res);
        by_n[e.n].push_back(&e);
    }
    std::vector<std::size_t> tau_order(s.tau0.size());
    std::iota(tau_order.begin(), tau_order.end(), 0);
    std::stable_sort(tau_order.begin(), tau_order.end(), [&](auto i, auto j) { return s.tau0[i] < s.tau0[j]; });

    const BifurcationEvent* prev_min = nullptr;
    long prev_n = 0;
    for (auto& [n, list] : by_n) {
        auto by_eps = list;
        std::sort(by_eps.begin(), by_eps.end(), [](auto* x, auto* y) { return x->epsilon < y->epsilon; });
        if (prev_min && n == prev_n + 1) {
            // every winding-n event lies below every winding-(n-1) event
            for (auto* e : list) {
                if (!(e->epsilon < prev_min->epsilon)) {
                    ++r.interleaving_violations;
                }
            }
        }
        if (by_eps.size() == tau_order.size()) {
            for (std::size_t i = 0; i < by_eps.size(); ++i) {
                if (by_eps[i]->k * M + by_eps[i]->m != tau_order[i]) {
                    ++r.order_violations;
                }
            }
        }
        prev_min = by_eps.front();
        prev_n = n;
    }
    return r;
}

Scenario scenario(const ModelUnfolding& model, const circle::CharacteristicPair& pair, long n_lo, long n_hi,
                  const ScenarioOptions& options) {
    if (n_lo < 1 || n_hi < n_lo) {
        throw Error(Errc::OutOfDomain, "winding range must satisfy 1 <= n_lo <= n_hi");
    }
    auto sync = circle::is_non_synchronized(pair);
    if (!sync.non_synchronized) {
        throw Error(Errc::SynchronizedInput, "the pair is synchronized");
    }
    Scenario s;
    s.pair = pair;
    s.n_lo = n_lo;
    s.n_hi = n_hi;
    const std::size_t K = pair.K();
    const std::size_t M = pair.M();
    const auto table = circle::difference_table(pair);

    auto near_zero = [&](double v) { return std::min(v, 1.0 - v) <= options.zero_tau_tolerance; };
    s.tau0.resize(K * M);
    for (std::size_t i = 0; i < K * M; ++i) {
        s.tau0[i] = options.tau_km ? options.tau_km(i / M, i % M, 0.0) : table.entries()[i].value();
    }
    if (!options.tau_km && std::any_of(s.tau0.begin(), s.tau0.end(), near_zero)) {
        if (!options.auto_shift) {
            throw Error(Errc::ZeroTau, "some tau_km vanishes");
        }
        // moving the minus-side coordinates by -d adds d to every tau_km
        s.minus_shift = -options.zero_tau_shift;
        for (auto& v : s.tau0) {
            v = circle::CirclePoint::from_double(v + options.zero_tau_shift).value();
        }
        if (std::any_of(s.tau0.begin(), s.tau0.end(), near_zero)) {
            throw Error(Errc::ZeroTau, "tau_km still vanishes after shifting b^-");
        }
    }
    auto channel = [&](std::size_t k, std::size_t m, double eps) {
        return options.tau_km ? options.tau_km(k, m, eps) : s.tau0[k * M + m];
    };

    s.eps_max = options.eps_max;
    if (K * M > 0) {
        auto worst = [&](double eps) {
            double w = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < K * M; ++i) {
                w = std::max(w, channel(i / M, i % M, eps));
            }
            return w + tau(model, eps);
        };
        while (!(worst(s.eps_max) < static_cast<double>(n_lo))) {
            s.eps_max *= 2.0;
            if (s.eps_max > 1e6) {
                throw Error(Errc::NoBracket, "no eps_max puts n_lo = " + std::to_string(n_lo) + " in range");
            }
        }
    }

    const std::size_t count_n = static_cast<std::size_t>(n_hi - n_lo + 1);
    s.events.resize(K * M * count_n);
    numerics::parallel_for(s.events.size(), [&](std::size_t job) {
        std::size_t flat = job % (K * M);
        long n = n_lo + static_cast<long>(job / (K * M));
        std::size_t k = flat / M, m = flat % M;
        TauFunction f = [&, k, m](double eps) { return channel(k, m, eps); };
        s.events[job] = {k, m, n, solve_connection(model, f, n, s.eps_max)};
    });
    std::sort(s.events.begin(), s.events.end(), [](const auto& x, const auto& y) {
        return std::tie(y.epsilon, x.n, x.k, x.m) < std::tie(x.epsilon, y.n, y.k, y.m);
    });

    if (options.verify) {
        auto report = check_order(model, s, options.tau_km);
        if (!report.ok()) {
            throw Error(Errc::InvariantViolation,
                        "scenario ordering failed: residual " + std::to_string(report.max_residual) + ", " +
                            std::to_string(report.interleaving_violations) + " interleaving and " +
                            std::to_string(report.order_violations) + " order violations");
        }
    }
    return s;
}

Scenario renumber_cyclic_shift(const Scenario& s, circle::PairIndex pivot, long N) {
    if (pivot.k >= s.pair.K() || pivot.m >= s.pair.M()) {
        throw Error(Errc::PivotOutOfRange, "pivot (" + std::to_string(pivot.k) + "," + std::to_string(pivot.m) +
                                               ") outside " + std::to_string(s.pair.K()) + "x" +
                                               std::to_string(s.pair.M()));
    }
    std::map<long, double> pivot_eps;
    for (const auto& e : s.events) {
        if (e.k == pivot.k && e.m == pivot.m) {
            pivot_eps[e.n] = e.epsilon;
        }
    }
    Scenario out = s;
    long lo = std::numeric_limits<long>::max();
    long hi = std::numeric_limits<long>::min();
    for (auto& e : out.events) {
        auto it = pivot_eps.find(e.n);
        if (it == pivot_eps.end()) {
            throw Error(Errc::InvariantViolation, "no pivot event at n = " + std::to_string(e.n));
        }
        e.n = e.epsilon < it->second ? e.n + N : e.n + N - 1;
        lo = std::min(lo, e.n);
        hi = std::max(hi, e.n);
    }
    if (!out.events.empty()) {
        out.n_lo = lo;
        out.n_hi = hi;
    }
    return out;
}

std::optional<CyclicShift> find_cyclic_shift(const Scenario& from, const Scenario& to, long max_shift,
                                             double rel_tol) {
    const std::size_t K = from.pair.K();
    const std::size_t M = from.pair.M();
    if (K != to.pair.K() || M != to.pair.M() || K * M == 0) {
        return std::nullopt;
    }
    std::map<std::tuple<std::size_t, std::size_t, long>, double> target;
    for (const auto& e : to.events) {
        target[{e.k, e.m, e.n}] = e.epsilon;
    }
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = 0; j < M; ++j) {
            for (long N = -max_shift; N <= max_shift; ++N) {
                Scenario moved = renumber_cyclic_shift(from, {i, j}, N);
                std::size_t matched = 0;
                bool ok = true;
                for (const auto& e : moved.events) {
                    if (e.n < to.n_lo || e.n > to.n_hi) {
                        continue;
                    }
                    auto it = target.find({e.k, e.m, e.n});
                    if (it == target.end() || std::abs(it->second - e.epsilon) > rel_tol * e.epsilon) {
                        ok = false;
                        break;
                    }
                    ++matched;
                }
                if (ok && matched >= K * M) {
                    return CyclicShift{{i, j}, N, matched};
                }
            }
        }
    }
    return std::nullopt;
}

MovedBase move_b_minus(const ModelUnfolding& model, const Scenario& original, double delta) {
    MovedBase out;
    out.model = model;
    out.model.b_minus = model.b_minus + delta;
    const double new_base = out.model.b_minus;
    auto drift = [model, new_base](double eps) { return time_function_eps(model, eps, LoopSide::Minus, new_base); };
    const double alpha0 = drift(0.0);
    const std::size_t M = original.pair.M();
    std::vector<double> lift(original.tau0.size());
    for (std::size_t i = 0; i < lift.size(); ++i) {
        lift[i] = std::floor(original.tau0[i] + alpha0);
    }
    ScenarioOptions options;
    options.eps_max = original.eps_max;
    options.tau_km = [tau0 = original.tau0, lift, drift, M](std::size_t k, std::size_t m, double eps) {
        return tau0[k * M + m] + drift(eps) - lift[k * M + m];
    };
    out.scenario = scenario(out.model, original.pair, original.n_lo, original.n_hi, options);
    out.scenario.minus_shift = original.minus_shift;
    return out;
}

} // namespace parabolica::unfolding
