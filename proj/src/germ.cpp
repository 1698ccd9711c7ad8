#include "parabolica/germ.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include <boost/math/interpolators/barycentric_rational.hpp>

#include "parabolica/error.hpp"

namespace parabolica::germ {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kMinSamples = 8;
constexpr std::size_t kMaxTerms = 100'000'000;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw Error(Errc::OutOfDomain, std::string(what) + " is not finite");
    }
}

// R^ at t(x) given d = P(x) - x; exact algebra keeps the O(x^3) numerator free of cancellation
double remainder_formula(double x, double d, double a) {
    double px = x + d;
    return (d - x * px) / (x * px) - a * std::log1p(d / x);
}

// Terms R^(t_k) along the orbit used by the Abel series, in series order.
class OrbitWalker {
public:
    OrbitWalker(const RectifiedGerm& g, Side side, double t0) : g_(g), side_(side) {
        if (const ParabolicGerm* P = g.germ()) {
            P_ = P;
            x_ = unrectify(t0, g.a(), branch_of(side));
        } else {
            t_ = t0;
        }
    }

    // (t_k, R^(t_k))
    std::pair<double, double> next() {
        if (P_) {
            if (side_ == Side::Negative) {
                x_ = P_->inverse_at(x_);
            }
            double d = P_->displacement_at(x_);
            std::pair<double, double> out{rectify(x_, g_.a()), remainder_formula(x_, d, g_.a())};
            if (side_ == Side::Positive) {
                x_ += d;
            }
            return out;
        }
        if (side_ == Side::Negative) {
            t_ = g_.backward(t_);
        }
        std::pair<double, double> out{t_, g_.remainder(t_)};
        if (side_ == Side::Positive) {
            t_ = g_.forward(t_);
        }
        return out;
    }

private:
    const RectifiedGerm& g_;
    Side side_;
    const ParabolicGerm* P_ = nullptr;
    double x_ = 0.0;
    double t_ = 0.0;
};

double chart_value(double y, double a, double s) { return -s / y - a * std::log(y); }

} // namespace

double ParabolicGerm::inverse_at(double x) const {
    if (inverse) {
        return inverse(x);
    }
    if (x == 0.0) {
        return 0.0;
    }
    // P(y) = x with P(y) - y ~ y^2; solved through the displacement for accuracy
    auto f = [&](double y) { return (y - x) + displacement_at(y); };
    return numerics::solve_bracketed(f, x - 3.0 * x * x, x);
}

double ParabolicGerm::displacement_at(double x) const {
    if (displacement) {
        return displacement(x);
    }
    return evaluate(x) - x;
}

ParabolicGerm moebius_germ() {
    ParabolicGerm P;
    P.evaluate = [](double x) { return x / (1.0 - x); };
    P.inverse = [](double x) { return x / (1.0 + x); };
    P.displacement = [](double x) { return x * x / (1.0 - x); };
    P.derivative_order = 16;
    P.domain_radius = 1.0;
    P.description = "x/(1-x)";
    return P;
}

ParabolicGerm model_flow_germ(double a, double domain_radius) {
    auto field = [a](long double x) { return x * x / (1.0L - static_cast<long double>(a) * x); };
    auto shift = [field](double x, long double time) {
        long double y = numerics::flow_precise(field, static_cast<long double>(x), time);
        return static_cast<double>(y - static_cast<long double>(x));
    };
    ParabolicGerm P;
    P.displacement = [shift](double x) { return shift(x, 1.0L); };
    P.evaluate = [shift](double x) { return x + shift(x, 1.0L); };
    P.inverse = [shift](double x) { return x + shift(x, -1.0L); };
    P.derivative_order = 6;
    P.domain_radius = domain_radius;
    P.description = "time-one flow of x^2/(1-a x), a=" + std::to_string(a);
    return P;
}

ParabolicGerm quartic_perturbation(const ParabolicGerm& base, double delta) {
    ParabolicGerm P;
    P.evaluate = [base, delta](double x) { return base.evaluate(x) + delta * x * x * x * x; };
    P.displacement = [base, delta](double x) { return base.displacement_at(x) + delta * x * x * x * x; };
    P.derivative_order = base.derivative_order;
    P.domain_radius = base.domain_radius;
    P.description = base.description + " + " + std::to_string(delta) + " x^4";
    return P;
}

double model_field(double a, double x) { return x * x / (1.0 - a * x); }

JetAtZero jet_at_zero(const ParabolicGerm& P) {
    const double h = 1e-3 * P.domain_radius;
    auto d = [&](double x) { return P.displacement_at(x); };
    auto stencil = [&](double s) {
        double p1 = d(s), m1 = d(-s), p2 = d(2 * s), m2 = d(-2 * s), z = d(0.0);
        double d1 = (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * s);
        double d2 = (-p2 + 16 * p1 - 30 * z + 16 * m1 - m2) / (12 * s * s);
        double d3 = (p2 - 2 * p1 + 2 * m1 - m2) / (2 * s * s * s);
        return std::array<double, 3>{d1, d2, d3};
    };
    auto fine = stencil(h);
    auto coarse = stencil(2 * h);
    JetAtZero jet;
    jet.value = P.evaluate(0.0);
    jet.first = 1.0 + (16 * fine[0] - coarse[0]) / 15;
    jet.second = (16 * fine[1] - coarse[1]) / 15;
    jet.third = (4 * fine[2] - coarse[2]) / 3;
    return jet;
}

double normal_form_coefficient(const ParabolicGerm& P, double tolerance) {
    if (P.derivative_order < 3) {
        throw Error(Errc::NotNormalized, "germ does not resolve a third derivative");
    }
    JetAtZero jet = jet_at_zero(P);
    if (std::abs(jet.value) > tolerance || std::abs(jet.first - 1.0) > tolerance ||
        std::abs(jet.second / 2.0 - 1.0) > tolerance) {
        throw Error(Errc::NotNormalized, "P(0)=" + std::to_string(jet.value) + ", P'(0)=" +
                                             std::to_string(jet.first) + ", P''(0)/2=" +
                                             std::to_string(jet.second / 2.0));
    }
    return jet.third / 6.0 - 1.0;
}

double rectify(double x, double a) {
    require_finite(x, "x");
    if (x == 0.0) {
        throw Error(Errc::OutOfDomain, "the chart is singular at x = 0");
    }
    if (1.0 - a * x <= 0.0) {
        throw Error(Errc::NonMonotone, "1 - a x <= 0 at x = " + std::to_string(x));
    }
    return -1.0 / x - a * std::log(std::abs(x));
}

double unrectify(double t, double a, Branch branch) {
    require_finite(t, "t");
    const double s = branch == Branch::PositiveX ? 1.0 : -1.0;
    // y = |x|; t(y) is increasing for s = +1 and decreasing for s = -1
    double y_max = a * s > 0.0 ? 1.0 / (a * s) : 1e6;
    auto g = [&](double y) { return chart_value(y, a, s) - t; };
    auto below = [&](double y) { return s * g(y) < 0.0; };

    double y0 = std::min(1.0 / std::max(std::abs(t), 1e-300), 0.5 * y_max);
    double lo = y0;
    double hi = y0;
    for (int i = 0; i < 2000 && !below(lo); ++i) {
        lo *= 0.5;
    }
    if (!below(lo)) {
        throw Error(Errc::OutOfDomain, "t = " + std::to_string(t) + " is outside the chart");
    }
    for (int i = 0; i < 2000 && below(hi); ++i) {
        double next = std::min(2.0 * hi, y_max * (1.0 - 1e-15));
        if (next <= hi) {
            throw Error(Errc::NonMonotone, "t = " + std::to_string(t) + " lies beyond the invertible range");
        }
        hi = next;
    }
    if (below(hi)) {
        throw Error(Errc::NonMonotone, "t = " + std::to_string(t) + " lies beyond the invertible range");
    }
    if (g(lo) == 0.0) {
        return s * lo;
    }
    return s * numerics::solve_bracketed(g, lo, hi);
}

double unrectify(double t, double a) {
    if (t == 0.0) {
        throw Error(Errc::OutOfDomain, "branch of t = 0 is ambiguous");
    }
    return unrectify(t, a, t < 0.0 ? Branch::PositiveX : Branch::NegativeX);
}

Branch branch_of(Side side) { return side == Side::Positive ? Branch::NegativeX : Branch::PositiveX; }

RectifiedGerm::RectifiedGerm(ParabolicGerm P, double a)
    : germ_(std::make_shared<const ParabolicGerm>(std::move(P))), a_(a) {}

RectifiedGerm RectifiedGerm::synthetic(Function forward, Function backward, Function remainder) {
    RectifiedGerm g;
    g.forward_ = std::move(forward);
    g.backward_ = std::move(backward);
    g.remainder_ = std::move(remainder);
    return g;
}

double RectifiedGerm::forward(double t) const {
    if (!germ_) {
        return forward_(t);
    }
    double x = unrectify(t, a_);
    return rectify(x + germ_->displacement_at(x), a_);
}

double RectifiedGerm::backward(double t) const {
    if (!germ_) {
        if (!backward_) {
            throw Error(Errc::OutOfDomain, "synthetic germ has no inverse");
        }
        return backward_(t);
    }
    return rectify(germ_->inverse_at(unrectify(t, a_)), a_);
}

double RectifiedGerm::remainder(double t) const {
    if (!germ_) {
        return remainder_(t);
    }
    return remainder_at_x(unrectify(t, a_));
}

double RectifiedGerm::remainder_at_x(double x) const {
    if (!germ_) {
        throw Error(Errc::OutOfDomain, "synthetic germ has no x chart");
    }
    return remainder_formula(x, germ_->displacement_at(x), a_);
}

double RectifiedGerm::remainder_at_x(double x, double px) const { return remainder_formula(x, px - x, a_); }

double RectifiedGerm::decay_constant(Side side, double t0, std::size_t samples) const {
    OrbitWalker walk(*this, side, t0);
    double q = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        auto [t, r] = walk.next();
        q = std::max(q, std::abs(r) * t * t);
    }
    return 2.0 * q;
}

AbelSolution::AbelSolution(RectifiedGerm germ, Side side, std::size_t truncation_index, double tail_bound,
                           double decay_constant, double min_increment, double t0)
    : germ_(std::move(germ)), side_(side), truncation_index_(truncation_index), tail_bound_(tail_bound),
      decay_constant_(decay_constant), min_increment_(min_increment), t0_(t0) {}

double AbelSolution::operator()(double t) const {
    OrbitWalker walk(germ_, side_, t);
    long double sum = 0.0L;
    if (side_ == Side::Positive) {
        for (std::size_t k = 0; k <= truncation_index_; ++k) {
            sum += walk.next().second;
        }
        return static_cast<double>(sum);
    }
    for (std::size_t k = 1; k <= truncation_index_; ++k) {
        sum += walk.next().second;
    }
    return -static_cast<double>(sum);
}

double AbelSolution::derivative(double t) const {
    double h = 0.01 * std::max(1.0, std::abs(t));
    return numerics::central_derivative([this](double s) { return (*this)(s); }, t, h);
}

AbelSolution abel_solution(const RectifiedGerm& G, Side side, double t0, double tol, TailNorm norm) {
    if (!(tol > 0.0)) {
        throw Error(Errc::OutOfDomain, "tolerance must be positive");
    }
    if ((side == Side::Positive) != (t0 > 0.0)) {
        throw Error(Errc::OutOfDomain, "t0 lies on the wrong side of infinity");
    }
    OrbitWalker walk(G, side, t0);
    const std::size_t first = side == Side::Positive ? 0 : 1;
    const double abs_t0 = std::abs(t0);

    double early_q = 0.0;
    double max_q = 0.0;
    double c = std::numeric_limits<double>::infinity();
    double prev_t = t0;
    std::size_t seen = 0; // terms walked, indices first .. first + seen - 1

    auto advance = [&] {
        auto [t, r] = walk.next();
        std::size_t k = first + seen;
        if (!(std::isfinite(t) && std::isfinite(r))) {
            throw Error(Errc::DecayViolation, "orbit left the domain at step " + std::to_string(k));
        }
        if (k > 0) {
            c = std::min(c, std::abs(t - prev_t));
            if (c < 0.5) {
                throw Error(Errc::SlowOrbit, "orbit increment " + std::to_string(c) + " at step " +
                                                 std::to_string(k));
            }
        }
        prev_t = t;
        double q = std::abs(r) * t * t;
        if (seen < kMinSamples) {
            early_q = std::max(early_q, q);
        } else if (q > 16.0 * early_q + 64.0 * kEps * std::abs(t) * t * t + tol * std::abs(t)) {
            throw Error(Errc::DecayViolation, "|R^(t)| t^2 = " + std::to_string(q) + " at t = " +
                                                  std::to_string(t) + " exceeds the early bound");
        }
        // rounding in R^ is about eps per term, i.e. eps t^2 in q; it must not inflate C1
        max_q = std::max(max_q, q - 64.0 * kEps * t * t);
        ++seen;
    };

    while (seen < kMinSamples) {
        advance();
    }
    for (std::size_t N = 0;; ++N) {
        while (first + seen < N + 1) {
            if (seen > kMaxTerms) {
                throw Error(Errc::DecayViolation, "tail bound not reached within the term budget");
            }
            advance();
        }
        double C1 = 2.0 * max_q;
        double reach = abs_t0 + static_cast<double>(N) * c;
        double bound = C1 / (c * (norm == TailNorm::Value ? reach : reach * reach));
        if (bound < tol) {
            return AbelSolution(G, side, N, bound, C1, c, t0);
        }
    }
}

double Generator::operator()(double x) const {
    if (x == 0.0) {
        return 0.0;
    }
    double r = std::abs(x);
    if (r >= lo_ && r <= hi_) {
        const auto& factor = x > 0.0 ? *factor_pos_ : *factor_neg_;
        return model_field(a_, x) / factor(r);
    }
    return direct(x);
}

double Generator::direct(double x) const {
    if (x == 0.0) {
        return 0.0;
    }
    if (std::abs(x) > 1.03 * hi_) {
        throw Error(Errc::OutOfDomain, "x = " + std::to_string(x) + " is outside the generator domain");
    }
    double t = rectify(x, a_);
    const AbelSolution& h = x < 0.0 ? *abel_pos_ : *abel_neg_;
    return model_field(a_, x) / (1.0 + h.derivative(t));
}

Generator generator(const ParabolicGerm& P, double tol, const GeneratorOptions& options) {
    if (!(tol > 0.0)) {
        throw Error(Errc::OutOfDomain, "tolerance must be positive");
    }
    if (!(options.r1 > 0.0 && options.r2 > options.r1) || options.nodes < 4) {
        throw Error(Errc::OutOfDomain, "invalid generator annulus");
    }
    Generator u;
    u.a_ = normal_form_coefficient(P);
    u.lo_ = options.r1 / 1.25;
    u.hi_ = std::min(1.5 * options.r2, 0.8 * P.domain_radius);
    if (u.hi_ <= u.lo_) {
        throw Error(Errc::OutOfDomain, "annulus does not fit in the germ domain");
    }
    RectifiedGerm G(P, u.a_);

    // t0 slightly outside the table so difference stencils at hi stay on the orbit
    u.abel_pos_ = std::make_shared<const AbelSolution>(
        abel_solution(G, Side::Positive, 0.95 * rectify(-u.hi_, u.a_), tol, TailNorm::Derivative));
    u.abel_neg_ = std::make_shared<const AbelSolution>(
        abel_solution(G, Side::Negative, 0.95 * rectify(u.hi_, u.a_), tol, TailNorm::Derivative));

    auto nodes = numerics::chebyshev_nodes(u.lo_, u.hi_, options.nodes);
    auto tabulate = [&](double sign) {
        std::vector<double> xs = nodes;
        std::vector<double> ys(xs.size());
        const AbelSolution& h = sign < 0.0 ? *u.abel_pos_ : *u.abel_neg_;
        numerics::parallel_for(xs.size(), [&](std::size_t i) {
            ys[i] = 1.0 + h.derivative(rectify(sign * xs[i], u.a_));
        });
        // full degree: polynomial interpolation at Chebyshev points
        std::size_t order = xs.size() - 1;
        auto interp = std::make_shared<boost::math::barycentric_rational<double>>(std::move(xs), std::move(ys), order);
        return std::make_shared<const std::function<double(double)>>([interp](double r) { return (*interp)(r); });
    };
    u.factor_pos_ = tabulate(1.0);
    u.factor_neg_ = tabulate(-1.0);

    if (options.verify && options.verify_points > 0) {
        numerics::FlowOptions fo{1e-15, 1e-13, 1e-3};
        auto field = [&u](double x) { return u(x); };
        std::size_t n = options.verify_points;
        std::vector<double> defect(2 * n, 0.0);
        numerics::parallel_for(2 * n, [&](std::size_t i) {
            double frac = n == 1 ? 0.0 : static_cast<double>(i % n) / static_cast<double>(n - 1);
            double r = options.r1 * std::pow(options.r2 / options.r1, frac);
            double x = i < n ? r : -r;
            defect[i] = std::abs(numerics::flow(field, x, 1.0, fo) - P.evaluate(x));
        });
        u.flow_defect_ = *std::max_element(defect.begin(), defect.end());
        if (!(u.flow_defect_ <= tol)) {
            throw Error(Errc::FlowMismatch, "time-one flow misses P by " + std::to_string(u.flow_defect_));
        }
    }
    return u;
}

double time_function(const Function& u, double b_ref, double b) {
    if (b_ref == 0.0 || b == 0.0) {
        throw Error(Errc::SingularIntegrand, "an endpoint sits at the zero of the field");
    }
    if ((b_ref > 0.0) != (b > 0.0)) {
        throw Error(Errc::SignMismatch, "endpoints lie on opposite sides of 0");
    }
    if (b_ref == b) {
        return 0.0;
    }
    return numerics::integrate([&u](double x) { return 1.0 / u(x); }, b_ref, b, 1e-12);
}

} // namespace parabolica::germ
