#pragma once

// One-parameter unfoldings u_eps(x) = (x^2 + eps) / (1 + a(eps) x): the
// crossing time tau(eps), the eps-dependent time charts, roots of the
// connection equation tau_km(eps) + tau(eps) = n and the ordering of the
// resulting bifurcation values.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "parabolica/circle.hpp"

namespace parabolica::unfolding {

struct ModelUnfolding {
    /// a(eps); constant 0 by default.
    std::function<double(double)> a;
    /// Normalizing chart (eps, b) -> x_eps(b); identity when empty.
    std::function<double(double, double)> x_chart;
    double b_plus = 1.0;
    double b_minus = -1.0;

    static ModelUnfolding standard(double a_coeff = 0.0, double b_minus = -1.0, double b_plus = 1.0);

    double coefficient(double eps) const { return a ? a(eps) : 0.0; }
    double chart(double eps, double b) const { return x_chart ? x_chart(eps, b) : b; }
    /// u_eps(x).
    double field(double eps, double x) const;
};

/// Closed-form crossing time from b^- to b^+:
/// (atan(x+/sqrt eps) - atan(x-/sqrt eps)) / sqrt eps + a/2 ln((x+^2 + eps)/(x-^2 + eps)).
/// Throws NonpositiveEpsilon for eps <= 0.
double tau(const ModelUnfolding& model, double eps);

enum class LoopSide { Plus, Minus };

/// T^side_eps(b): time along u_eps from b^side to b, in closed form.
/// Throws SingularIntegrand at eps = 0 when the path crosses or touches 0, and
/// OutOfDomain when 1 + a x vanishes on the path.
double time_function_eps(const ModelUnfolding& model, double eps, LoopSide side, double b);

/// tau_km as a function of eps (a constant by default).
using TauFunction = std::function<double(double)>;

struct ConnectionOptions {
    /// Ratio of the geometric scan grid.
    double grid_ratio = 0.85;
    double rel_tol = 1e-12;
};

/// Unique root of tau_km(eps) + tau(eps) = n in (0, eps_max]: geometric scan
/// from eps_max downward, then bisection.
///
/// Throws NoBracket when no sign change exists (n too small) and MultipleRoots
/// when the scan sees more than one.
double solve_connection(const ModelUnfolding& model, const TauFunction& tau_km, long n, double eps_max,
                        const ConnectionOptions& options = {});

struct BifurcationEvent {
    std::size_t k = 0; // index into A^+ (0-based)
    std::size_t m = 0; // index into A^- (0-based)
    long n = 0;
    double epsilon = 0.0;
};

struct Scenario {
    circle::CharacteristicPair pair;
    /// Sorted by decreasing epsilon.
    std::vector<BifurcationEvent> events;
    long n_lo = 0;
    long n_hi = 0;
    double eps_max = 0.0;
    /// Shift added to every A^- coordinate before solving (nonzero after a ZeroTau repair).
    double minus_shift = 0.0;
    /// tau_km(0) actually used, flat k * M + m.
    std::vector<double> tau0;
};

struct ScenarioOptions {
    /// Upper end of the search; doubled until tau(eps_max) + 1 < n_lo.
    double eps_max = 0.2;
    bool auto_shift = true;
    double zero_tau_shift = 1e-3;
    double zero_tau_tolerance = 1e-12;
    /// Optional tau_km(eps) overriding the constant difference table.
    std::function<double(std::size_t k, std::size_t m, double eps)> tau_km;
    /// Check the ordering invariants before returning (InvariantViolation otherwise).
    bool verify = true;
};

/// All events for every (k, m) and n in [n_lo, n_hi].
///
/// Throws SynchronizedInput, ZeroTau (some tau_km = 0 with auto_shift off) and
/// the solver errors.
Scenario scenario(const ModelUnfolding& model, const circle::CharacteristicPair& pair, long n_lo, long n_hi,
                  const ScenarioOptions& options = {});

struct OrderReport {
    /// Largest |tau_km(eps) + tau(eps) - n| over the events.
    double max_residual = 0.0;
    /// Winding-n events all below winding-(n-1) events.
    std::size_t interleaving_violations = 0;
    /// Fixed-n epsilon order differs from the tau_km order.
    std::size_t order_violations = 0;

    bool ok(double residual_tol = 1e-10) const {
        return max_residual < residual_tol && interleaving_violations == 0 && order_violations == 0;
    }
};

OrderReport check_order(const ModelUnfolding& model, const Scenario& s,
                        const std::function<double(std::size_t, std::size_t, double)>& tau_km = {});

/// Relabels n -> n + N when eps_kmn < eps_ijn, n + N - 1 otherwise (pivot (i, j)).
/// Throws PivotOutOfRange.
Scenario renumber_cyclic_shift(const Scenario& s, circle::PairIndex pivot, long N);

struct CyclicShift {
    circle::PairIndex pivot;
    long N = 0;
    /// Events compared on the overlap of the two n ranges.
    std::size_t matched = 0;
};

/// Searches pivots and |N| <= max_shift for a cyclic shift taking the labels of
/// `from` to those of `to`: every event of `from` whose new label lands in the
/// range of `to` must appear there with the same epsilon (relative rel_tol).
std::optional<CyclicShift> find_cyclic_shift(const Scenario& from, const Scenario& to, long max_shift = 4,
                                             double rel_tol = 1e-8);

struct MovedBase {
    ModelUnfolding model;
    Scenario scenario;
};

/// Moves b^- to b^- + delta and recomputes the scenario of `original` over the
/// same n range. The new tau_km(eps) is the old constant plus the time from the
/// old base point to the new one, lifted so that its value at eps = 0 lies in [0, 1).
MovedBase move_b_minus(const ModelUnfolding& model, const Scenario& original, double delta);

} // namespace parabolica::unfolding
