// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "parabolica/annulus.hpp"
#include "parabolica/circle.hpp"
#include "parabolica/error.hpp"
#include "parabolica/germ.hpp"
#include "parabolica/realization.hpp"
#include "parabolica/unfolding.hpp"

using namespace parabolica;
using circle::CharacteristicPair;
using circle::CirclePoint;
using circle::MarkedSet;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body, double time_limit = 0.0) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (time_limit > 0.0 && seconds > time_limit) {
        o.pass = false;
        o.detail += "; over the time limit";
    }
    failures += !o.pass;
    std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double mod1_distance(double x) { return std::abs(x - std::round(x)); }

MarkedSet set_of(std::vector<double> pts, circle::Partition classes = {}) {
    return circle::validate_marked_set(std::span<const double>(pts), classes);
}

CharacteristicPair random_pair(std::mt19937_64& rng, std::size_t K, std::size_t M) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        std::vector<double> plus(K), minus(M);
        for (auto& v : plus) v = u(rng);
        for (auto& v : minus) v = u(rng);
        try {
            CharacteristicPair p{set_of(plus), set_of(minus)};
            if (circle::is_non_synchronized(p, 1e-6).non_synchronized) return p;
        } catch (const Error&) {
        }
    }
}

CharacteristicPair exact_pair(const oracle::RationalPair& rp) {
    auto side = [](const std::vector<oracle::Rational>& v) {
        std::vector<CirclePoint> pts;
        for (const auto& r : v) pts.push_back(CirclePoint::from_rational(r));
        return circle::validate_marked_set(std::span<const CirclePoint>(pts), {});
    };
    return {side(rp.plus), side(rp.minus)};
}

double sup_on_annulus(const std::function<double(double)>& f, double r1, double r2, int n = 400) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = r1 * std::pow(r2 / r1, static_cast<double>(i) / (n - 1));
        worst = std::max({worst, std::abs(f(r)), std::abs(f(-r))});
    }
    return worst;
}

Outcome rotation_identity() {
    double worst = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        annulus::AnnulusField field;
        field.epsilon = eps;
        double tau = unfolding::tau(unfolding::ModelUnfolding::standard(), eps);
        for (int i = 0; i < 64; ++i) {
            annulus::LoopPoint p{annulus::Loop::Minus, (i + 0.5) / 64.0};
            double lhs = annulus::canonical_coordinate(field, annulus::transition_map(field, p).landing).phi.value();
            double rhs = annulus::canonical_coordinate(field, p).phi.value() - tau;
            worst = std::max(worst, mod1_distance(lhs - rhs));
        }
    }
    return {worst < 1e-7, "max residual " + fmt("%.3e", worst) + " over 192 orbits"};
}

Outcome connection_cross_validation() {
    CharacteristicPair pair{set_of({0.05, 0.55}, {{0, 1}}), set_of({0.0, 0.3})};
    auto model = unfolding::ModelUnfolding::standard();
    auto s = unfolding::scenario(model, pair, 5, 20);
    annulus::DetectOptions options;
    options.grid = 4096;
    auto detected = annulus::detect_scenario(annulus::AnnulusField{}, annulus::loop_angles(pair),
                                             s.events.back().epsilon * 0.8, s.events.front().epsilon * 1.25, options);
    std::map<std::tuple<std::size_t, std::size_t, long>, double> found;
    for (const auto& e : detected) found[{e.k, e.m, e.n}] = e.epsilon;
    double worst = 0.0;
    std::size_t missing = 0;
    for (const auto& e : s.events) {
        auto it = found.find({e.k, e.m, e.n});
        if (it == found.end()) {
            ++missing;
            continue;
        }
        worst = std::max(worst, std::abs(it->second - e.epsilon) / e.epsilon);
    }
    bool pass = s.events.size() == 64 && missing == 0 && worst < 1e-6;
    return {pass, std::to_string(s.events.size()) + " events, " + std::to_string(missing) + " missing, max rel err " +
                      fmt("%.3e", worst)};
}

Outcome scenario_ordering() {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> size(1, 3);
    auto model = unfolding::ModelUnfolding::standard();
    std::size_t interleaving = 0, order = 0, events = 0;
    for (int trial = 0; trial < 20; ++trial) {
        auto pair = random_pair(rng, size(rng), size(rng));
        unfolding::ScenarioOptions options;
        options.verify = false;
        auto s = unfolding::scenario(model, pair, 5, 50, options);
        auto r = unfolding::check_order(model, s);
        interleaving += r.interleaving_violations;
        order += r.order_violations;
        events += s.events.size();
    }
    return {interleaving == 0 && order == 0, std::to_string(events) + " events, " + std::to_string(interleaving) +
                                                 " interleaving and " + std::to_string(order) + " order violations"};
}

Outcome cyclic_shift() {
    auto model = unfolding::ModelUnfolding::standard();
    std::vector<CharacteristicPair> pairs{
        {set_of({0.05, 0.55}), set_of({0.0, 0.3})},
        {set_of({0.25}), set_of({0.6})},
    };
    std::size_t checked = 0, failed = 0;
    for (const auto& pair : pairs) {
        auto s = unfolding::scenario(model, pair, 5, 25);
        for (double delta : {-0.15, -0.05, 0.05, 0.15}) {
            auto moved = unfolding::move_b_minus(model, s, delta);
            auto found = unfolding::find_cyclic_shift(s, moved.scenario);
            ++checked;
            if (!found || found->matched < pair.K() * pair.M()) ++failed;
        }
    }
    return {failed == 0, std::to_string(checked) + " perturbations, " + std::to_string(failed) + " without a shift"};
}

Outcome generator_recovery() {
    double worst = 0.0;
    auto u = germ::generator(germ::moebius_germ(), 1e-9);
    worst = sup_on_annulus([&](double x) { return u(x) - x * x; }, 0.02, 0.2);
    std::string detail = "moebius " + fmt("%.2e", worst);
    for (double a : {-0.3, 0.0, 0.4}) {
        auto ua = germ::generator(germ::model_flow_germ(a), 1e-8);
        double d = sup_on_annulus([&](double x) { return ua(x) - germ::model_field(a, x); }, 0.02, 0.2);
        detail += ", a=" + fmt("%g", a) + " " + fmt("%.2e", d);
        worst = std::max(worst, d);
    }
    return {worst < 1e-6, detail};
}

Outcome generator_proximity() {
    auto base = germ::generator(germ::moebius_germ(), 1e-9);
    double previous = INFINITY;
    bool monotone = true;
    std::string detail;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        auto u = germ::generator(germ::quartic_perturbation(germ::moebius_germ(), delta), 1e-8);
        double d = sup_on_annulus([&](double x) { return u(x) - base(x); }, 0.02, 0.2);
        monotone = monotone && d < previous;
        previous = d;
        detail += (detail.empty() ? "" : ", ") + fmt("%.0e", delta) + " -> " + fmt("%.3e", d);
    }
    return {monotone, detail};
}

Outcome equivalence_vs_oracle() {
    std::mt19937_64 rng(7);
    const long D = 48;
    std::uniform_int_distribution<std::size_t> size(1, 4);
    std::uniform_int_distribution<long> jitter(-1, 1);
    std::uniform_int_distribution<long> shift(0, D - 1);
    int agree = 0, trials = 0, equivalent_cases = 0;
    while (trials < 200) {
        oracle::RationalPair ra, rb;
        std::size_t K = size(rng), M = size(rng);
        for (long v : oracle::random_grid_points(rng, D, K)) ra.plus.emplace_back(v, D);
        for (long v : oracle::random_grid_points(rng, D, M)) ra.minus.emplace_back(v, D);
        if (trials % 2 == 0) {
            long s = shift(rng);
            for (auto& v : ra.plus) rb.plus.push_back(oracle::frac(v + oracle::Rational(s + jitter(rng), D)));
            for (auto& v : ra.minus) rb.minus.push_back(oracle::frac(v + oracle::Rational(jitter(rng), D)));
        } else {
            for (long v : oracle::random_grid_points(rng, D, K)) rb.plus.emplace_back(v, D);
            for (long v : oracle::random_grid_points(rng, D, M)) rb.minus.emplace_back(v, D);
        }
        if (oracle::max_coincidences(ra, D) > 1 || oracle::max_coincidences(rb, D) > 1) continue;
        if (!std::is_sorted(rb.plus.begin(), rb.plus.end()) || !std::is_sorted(rb.minus.begin(), rb.minus.end()) ||
            std::adjacent_find(rb.plus.begin(), rb.plus.end()) != rb.plus.end() ||
            std::adjacent_find(rb.minus.begin(), rb.minus.end()) != rb.minus.end()) {
            continue;
        }
        ++trials;
        bool expected = oracle::grid_equivalent(ra, rb, D);
        equivalent_cases += expected;
        agree += circle::are_equivalent(exact_pair(ra), exact_pair(rb)).equivalent == expected;
    }

    std::mt19937_64 rng2(11);
    const long D2 = 12;
    int sync_agree = 0, synchronized = 0;
    for (int trial = 0; trial < 200; ++trial) {
        oracle::RationalPair rp;
        for (long v : oracle::random_grid_points(rng2, D2, size(rng2))) rp.plus.emplace_back(v, D2);
        for (long v : oracle::random_grid_points(rng2, D2, size(rng2))) rp.minus.emplace_back(v, D2);
        bool expected = oracle::max_coincidences(rp, D2) <= 1;
        synchronized += !expected;
        sync_agree += circle::is_non_synchronized(exact_pair(rp)).non_synchronized == expected;
    }
    return {agree == 200 && sync_agree == 200,
            "equivalence " + std::to_string(agree) + "/200 (" + std::to_string(equivalent_cases) +
                " equivalent), non-synchronization " + std::to_string(sync_agree) + "/200 (" +
                std::to_string(synchronized) + " synchronized)"};
}

Outcome realization_round_trip() {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> size(0, 8);
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = size(rng);
        std::vector<double> pts;
        for (long p : oracle::random_grid_points(rng, 64, n)) pts.push_back(static_cast<double>(p) / 64.0);
        auto set = set_of(pts, oracle::random_proper_partition(rng, n));
        auto g = realization::realize_disc(set);
        ok += realization::validate_skeleton(g).ok() && realization::same_marked_set(realization::read_back(g), set);
    }
    return {ok == 100, std::to_string(ok) + "/100 sets validated and read back"};
}

Outcome time_translation() {
    auto P = germ::moebius_germ();
    auto u = germ::generator(P, 1e-11);
    auto f = [&](double x) { return u(x); };
    double worst = 0.0;
    for (int side : {-1, 1}) {
        for (int i = 0; i < 50; ++i) {
            double x = side * (0.02 + 0.16 * i / 49.0);
            double ref = side * 0.1;
            double shift = germ::time_function(f, ref, P(x)) - germ::time_function(f, ref, x);
            worst = std::max(worst, std::abs(shift - 1.0));
        }
    }
    return {worst < 1e-9, "max |T(P(x)) - T(x) - 1| = " + fmt("%.3e", worst) + " over 100 points"};
}

} // namespace

int main() {
    report(1, "rotation identity", rotation_identity, 10.0);
    report(2, "connection equation vs simulation", connection_cross_validation, 120.0);
    report(3, "scenario ordering", scenario_ordering);
    report(4, "cyclic shift under moving b-", cyclic_shift);
    report(5, "generator recovery", generator_recovery, 30.0);
    report(6, "generator proximity", generator_proximity);
    report(7, "equivalence and synchronization vs oracle", equivalence_vs_oracle);
    report(8, "realization round trip", realization_round_trip);
    report(9, "time translation", time_translation);
    return failures == 0 ? 0 : 1;
}
