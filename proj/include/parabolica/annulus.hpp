#pragma once

// Direct simulation of the model annulus flow
//   alpha' = 1,  x' = u_eps(x) / (2 pi),  x = 2 - r,
// whose return map to the section {alpha = 0} is the time-one flow of u_eps.
// The transversal loops are C^- = {x = -1} and C^+ = {x = 1}; loop positions
// are angles in [0, 1) measured in full turns.

#include <cstddef>
#include <vector>

#include "parabolica/circle.hpp"

namespace parabolica::annulus {

struct AnnulusField {
    double epsilon = 0.0;
    double a_coeff = 0.0;
    /// Absolute and relative tolerance of the integrator.
    double tolerance = 1e-12;

    /// x' = u_eps(x) / (2 pi).
    double radial(double x) const;
};

enum class Loop { Minus, Plus };

struct LoopPoint {
    Loop loop = Loop::Minus;
    double angle = 0.0;

    static LoopPoint on(Loop loop, double angle);
};

struct CanonicalCoordinate {
    Loop loop = Loop::Minus;
    circle::CirclePoint phi;
};

/// x-coordinate of the first crossing of the section: forward in time from
/// C^-, backward from C^+. A start at angle 0 is already on the section.
/// Throws NoCrossing when an eps = 0 orbit gets within 1e-6 of the cycle first.
double first_hit(const AnnulusField& field, const LoopPoint& start);

/// phi = T_eps(first_hit(p)) mod 1 with the time function of the loop's side.
CanonicalCoordinate canonical_coordinate(const AnnulusField& field, const LoopPoint& p);

struct Transit {
    LoopPoint landing;
    /// Turns of alpha accumulated between C^- and C^+.
    double turns = 0.0;
};

/// Follows the orbit of a point on C^- to its first crossing of C^+.
/// Throws Stuck for eps <= 0.
Transit transition_map(const AnnulusField& field, const LoopPoint& a);

/// First return to the section {alpha = 0} of the point x on it.
double return_map(const AnnulusField& field, double x);

/// Sign changes of return_map(x) - x on a uniform grid of [lo, hi], each
/// refined to a fixed point.
std::vector<double> return_map_fixed_points(const AnnulusField& field, double lo, double hi, std::size_t grid = 256);

struct DetectOptions {
    std::size_t grid = 4096;
    double rel_tol = 1e-11;
};

struct DetectedConnection {
    long n = 0;
    double epsilon = 0.0;
};

/// Parameters in [eps_lo, eps_hi] at which Delta_eps(s_minus) = s_plus, found
/// from g(eps) = phi^+(Delta_eps(s_minus)) - phi^+(s_plus) mod 1 lifted along a
/// geometric eps grid with the simulated winding as anchor; sorted by
/// decreasing eps. `n` is the integer value of the lift at the root.
///
/// Throws GridTooCoarse when the lift jumps by more than 1/2 between grid points.
std::vector<DetectedConnection> detect_sparkling_connections(const AnnulusField& field_template,
                                                             const LoopPoint& s_minus, const LoopPoint& s_plus,
                                                             double eps_lo, double eps_hi,
                                                             const DetectOptions& options = {});

/// Marked points on both loops.
struct LoopAngles {
    std::vector<double> minus;
    std::vector<double> plus;
};

/// Loop angles whose canonical coordinates reproduce the pair: a point of A^+
/// or A^- at c sits at angle -c mod 1, so that tau_km = phi^+(s_k^+) - phi^-(s_m^-).
LoopAngles loop_angles(const circle::CharacteristicPair& pair);

struct SimulatedEvent {
    std::size_t k = 0;
    std::size_t m = 0;
    long n = 0;
    double epsilon = 0.0;
};

/// detect_sparkling_connections over every (k, m), sorted by decreasing eps.
std::vector<SimulatedEvent> detect_scenario(const AnnulusField& field_template, const LoopAngles& loops,
                                            double eps_lo, double eps_hi, const DetectOptions& options = {});

} // namespace parabolica::annulus
