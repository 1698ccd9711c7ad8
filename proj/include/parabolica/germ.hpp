#pragma once

// Numerical Takens theory for parabolic germs P(x) = x + x^2 + ...:
// normal-form coefficient, rectifying chart, the Abel equation
// h = h o P^ + R^ and recovery of the generating vector field.

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "parabolica/numerics.hpp"

namespace parabolica::germ {

using Function = numerics::ScalarFunction;

/// A parabolic germ given by its evaluator near 0.
struct ParabolicGerm {
    Function evaluate;
    /// Optional P^{-1}; when empty the inverse is found by root bracketing.
    Function inverse;
    /// Optional P(x) - x evaluated without cancellation; defaults to evaluate(x) - x.
    Function displacement;
    /// Highest derivative at 0 the evaluator resolves reliably.
    int derivative_order = 4;
    double domain_radius = 0.5;
    std::string description;

    double operator()(double x) const { return evaluate(x); }
    double inverse_at(double x) const;
    double displacement_at(double x) const;
};

/// x / (1 - x): the exact time-one map of x' = x^2.
ParabolicGerm moebius_germ();

/// Time-one flow of u_a(x) = x^2 / (1 - a x), integrated in extended precision.
ParabolicGerm model_flow_germ(double a, double domain_radius = 0.5);

/// base(x) + delta * x^4; keeps the 3-jet, so the normal form coefficient is unchanged.
ParabolicGerm quartic_perturbation(const ParabolicGerm& base, double delta);

/// u_a(x) = x^2 / (1 - a x).
double model_field(double a, double x);

struct JetAtZero {
    double value = 0;
    double first = 0;
    double second = 0;
    double third = 0;
};

/// Derivatives at 0 from Richardson-extrapolated five-point stencils with
/// step 1e-3 * domain_radius.
JetAtZero jet_at_zero(const ParabolicGerm& P);

/// a = P'''(0)/6 - 1. Throws NotNormalized when P(0), P'(0) - 1 or
/// P''(0)/2 - 1 exceed `tolerance`.
double normal_form_coefficient(const ParabolicGerm& P, double tolerance = 1e-6);

enum class Branch { PositiveX, NegativeX };

/// t = -1/x - a ln|x|. Throws OutOfDomain for x = 0 and NonMonotone when
/// 1 - a x <= 0 (the chart stops being invertible there).
double rectify(double x, double a);

/// Inverse of rectify on the given branch of x.
double unrectify(double t, double a, Branch branch);
/// Branch picked from the sign of t (t < 0 <=> x > 0 near 0).
double unrectify(double t, double a);

/// Side of infinity in the t chart. Positive t are small negative x, where
/// forward orbits of P^ escape to +inf; negative t are small positive x.
enum class Side { Positive, Negative };

Branch branch_of(Side side);

/// The germ in the rectifying chart: P^(t) = t + 1 + R^(t).
///
/// Either built from a ParabolicGerm (orbits are then iterated in x, and R^ is
/// evaluated with a cancellation-free formula), or given synthetically by
/// independent maps P^, P^^{-1} and R^ in t.
class RectifiedGerm {
public:
    RectifiedGerm(ParabolicGerm P, double a);
    static RectifiedGerm synthetic(Function forward, Function backward, Function remainder);

    double a() const noexcept { return a_; }
    bool is_synthetic() const noexcept { return !germ_; }

    double forward(double t) const;   // P^(t)
    double backward(double t) const;  // P^^{-1}(t)
    double remainder(double t) const; // R^(t)

    /// R^ at t(x), from P(x) directly.
    double remainder_at_x(double x) const;
    /// Same with P(x) supplied.
    double remainder_at_x(double x, double px) const;

    /// Empirical C1: 2 * max |R^(t_k)| t_k^2 over `samples` orbit points from t0.
    double decay_constant(Side side, double t0, std::size_t samples = 64) const;

    const ParabolicGerm* germ() const noexcept { return germ_.get(); }

private:
    RectifiedGerm() = default;

    std::shared_ptr<const ParabolicGerm> germ_;
    double a_ = 0.0;
    Function forward_;
    Function backward_;
    Function remainder_;
};

/// Truncated series solution of the Abel equation on one side of infinity:
/// h^+ = sum_{k>=0} R^ o P^^k on the positive side,
/// h^- = -sum_{k>=1} R^ o P^^{-k} on the negative side.
class AbelSolution {
public:
    AbelSolution(RectifiedGerm germ, Side side, std::size_t truncation_index, double tail_bound,
                 double decay_constant, double min_increment, double t0);

    /// h(t) with the fixed truncation index. Valid for t on this side with |t| >= ~|t0|.
    double operator()(double t) const;
    /// h'(t) by a five-point difference of the truncated sum.
    double derivative(double t) const;

    Side side() const noexcept { return side_; }
    std::size_t truncation_index() const noexcept { return truncation_index_; }
    double tail_bound() const noexcept { return tail_bound_; }
    double decay_constant() const noexcept { return decay_constant_; }
    double min_increment() const noexcept { return min_increment_; }
    double t0() const noexcept { return t0_; }
    const RectifiedGerm& germ() const noexcept { return germ_; }

private:
    RectifiedGerm germ_;
    Side side_;
    std::size_t truncation_index_;
    double tail_bound_;
    double decay_constant_;
    double min_increment_;
    double t0_;
};

/// Which series the truncation has to resolve.
enum class TailNorm {
    /// h itself: tail <= C1 / (c (|t0| + N c)).
    Value,
    /// h' only, assuming |R^'| <= 2 C1 |t|^{-3}: tail <= C1 / (c (|t0| + N c)^2).
    Derivative,
};

/// Picks the truncation index N from the orbit of t0 so that the tail
/// sum_{k>N} C1 (|t0| + k c)^{-2} <= C1 / (c (|t0| + N c)) is below tol.
///
/// Throws DecayViolation when R^ does not decay like t^{-2} on the orbit and
/// SlowOrbit when orbit increments fall below 1/2.
AbelSolution abel_solution(const RectifiedGerm& G, Side side, double t0, double tol,
                           TailNorm norm = TailNorm::Value);

struct GeneratorOptions {
    /// Verification annulus r1 <= |x| <= r2.
    double r1 = 0.02;
    double r2 = 0.2;
    /// Interpolation nodes per side.
    std::size_t nodes = 48;
    /// Number of points per side used to check the time-one flow against P.
    std::size_t verify_points = 16;
    bool verify = true;
};

/// Recovered generating field of a parabolic germ,
/// u(x) = u_a(x) / (1 + h'(t(x))), tabulated on each side of 0.
class Generator {
public:
    double operator()(double x) const;
    double normal_coefficient() const noexcept { return a_; }
    /// Range on which u is interpolated on each side: lo <= |x| <= hi.
    double table_lo() const noexcept { return lo_; }
    double table_hi() const noexcept { return hi_; }
    /// Sup |flow_1(x) - P(x)| over the verification points (both sides).
    double flow_defect() const noexcept { return flow_defect_; }
    const AbelSolution& abel(Side side) const { return side == Side::Positive ? *abel_pos_ : *abel_neg_; }

    /// Evaluates through the Abel series, bypassing the table.
    double direct(double x) const;

    friend Generator generator(const ParabolicGerm&, double, const GeneratorOptions&);

private:
    Generator() = default;

    double a_ = 0.0;
    double lo_ = 0.0;
    double hi_ = 0.0;
    double flow_defect_ = 0.0;
    std::shared_ptr<const AbelSolution> abel_pos_;
    std::shared_ptr<const AbelSolution> abel_neg_;
    // correction factor 1 + h'(t(x)) at the nodes, per side (index 0: x > 0)
    std::shared_ptr<const std::function<double(double)>> factor_pos_;
    std::shared_ptr<const std::function<double(double)>> factor_neg_;
};

/// Throws FlowMismatch when the time-one flow of the recovered field misses P
/// by more than tol on the annulus; errors of abel_solution propagate.
Generator generator(const ParabolicGerm& P, double tol, const GeneratorOptions& options = {});

/// Time of motion along x' = u(x) from b_ref to b: the integral of dx/u.
///
/// Throws SingularIntegrand if either end is 0 and SignMismatch if they lie on
/// opposite sides of 0.
double time_function(const Function& u, double b_ref, double b);

} // namespace parabolica::germ
