#pragma once

// Marked finite sets on the coordinate circle R/Z, characteristic pairs and
// the combinatorial invariants built on their pairwise differences.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace parabolica::circle {

using Rational = boost::multiprecision::cpp_rational;

/// Default distinctness tolerance for points stored as doubles.
inline constexpr double kDefaultTolerance = 1e-12;

/// A coordinate on R/Z, normalized into [0, 1).
///
/// A point built from a rational keeps the exact value alongside its double
/// approximation; arithmetic between two exact points stays exact, so the
/// (discontinuous) synchronization and ordering predicates are decided without
/// rounding.
class CirclePoint {
public:
    CirclePoint() = default;

    static CirclePoint from_double(double v);
    static CirclePoint from_rational(const Rational& r);
    /// Parses "p/q", an integer or a decimal literal into an exact point.
    static CirclePoint parse(const std::string& text);

    double value() const noexcept { return value_; }
    bool is_exact() const noexcept { return exact_.has_value(); }
    const std::optional<Rational>& exact() const noexcept { return exact_; }

    /// Translation by alpha, reduced mod 1.
    CirclePoint shifted(const CirclePoint& alpha) const;
    CirclePoint shifted(double alpha) const { return shifted(from_double(alpha)); }

    friend bool operator<(const CirclePoint& a, const CirclePoint& b);
    friend bool operator==(const CirclePoint& a, const CirclePoint& b);

private:
    double value_ = 0.0;
    std::optional<Rational> exact_;
};

/// Fractional part {a - b}: the length of the positively oriented arc from b to a.
CirclePoint frac_diff(const CirclePoint& a, const CirclePoint& b);

/// Distance on R/Z, in [0, 1/2].
double circle_distance(const CirclePoint& a, const CirclePoint& b);

/// Exact when both are exact, otherwise in doubles.
CirclePoint midpoint_on_arc(const CirclePoint& from, const CirclePoint& to);

using Partition = std::vector<std::vector<std::size_t>>;

/// Finite set on a circle with a proper equivalence relation: classes of one
/// or two points, no two 2-classes intermingled.
class MarkedSet {
public:
    MarkedSet() = default;

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const std::vector<CirclePoint>& points() const noexcept { return points_; }
    const Partition& classes() const noexcept { return classes_; }
    bool is_exact() const noexcept;

    /// Index of the class containing point i.
    std::size_t class_of(std::size_t i) const;
    std::size_t two_class_count() const noexcept;
    std::size_t singleton_count() const noexcept;

    std::vector<double> values() const;

    friend MarkedSet validate_marked_set(std::span<const CirclePoint>, const Partition&, double);
    friend MarkedSet shift_set(const MarkedSet&, const CirclePoint&);

private:
    std::vector<CirclePoint> points_;
    Partition classes_; // indices into points_, each block sorted, blocks sorted by first index
};

/// Builds a MarkedSet from raw points and a partition of their indices
/// (0-based, referring to the input order). An empty partition means all
/// singletons.
///
/// Throws Error with DuplicatePoint, ClassTooLarge, BadPartition or Intermingled.
MarkedSet validate_marked_set(std::span<const CirclePoint> points, const Partition& classes,
                              double tolerance = kDefaultTolerance);
MarkedSet validate_marked_set(std::span<const double> points, const Partition& classes,
                              double tolerance = kDefaultTolerance);

MarkedSet shift_set(const MarkedSet& set, const CirclePoint& alpha);
inline MarkedSet shift_set(const MarkedSet& set, double alpha) {
    return shift_set(set, CirclePoint::from_double(alpha));
}

struct CharacteristicPair {
    MarkedSet plus;
    MarkedSet minus;

    std::size_t K() const noexcept { return plus.size(); }
    std::size_t M() const noexcept { return minus.size(); }
};

/// 0-based (k, m) index into the difference table.
struct PairIndex {
    std::size_t k = 0;
    std::size_t m = 0;
    friend bool operator==(const PairIndex&, const PairIndex&) = default;
};

class DifferenceTable {
public:
    DifferenceTable() = default;
    DifferenceTable(std::size_t K, std::size_t M, std::vector<CirclePoint> entries);

    std::size_t K() const noexcept { return K_; }
    std::size_t M() const noexcept { return M_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    const CirclePoint& at(std::size_t k, std::size_t m) const { return entries_.at(k * M_ + m); }
    double operator()(std::size_t k, std::size_t m) const { return at(k, m).value(); }
    const std::vector<CirclePoint>& entries() const noexcept { return entries_; }
    PairIndex index_of(std::size_t flat) const noexcept { return {flat / M_, flat % M_}; }

    /// Smallest distance on R/Z between two entries; +inf with fewer than two entries.
    double min_gap() const noexcept { return min_gap_; }
    /// The two entries realizing min_gap (only meaningful with >= 2 entries).
    std::pair<PairIndex, PairIndex> closest() const noexcept { return closest_; }

    /// Flat indices sorted by ascending entry value.
    std::vector<std::size_t> ascending_order() const;

private:
    std::size_t K_ = 0;
    std::size_t M_ = 0;
    std::vector<CirclePoint> entries_;
    double min_gap_ = 0.0;
    std::pair<PairIndex, PairIndex> closest_{};
};

DifferenceTable difference_table(const CharacteristicPair& pair);

struct SyncDecision {
    bool non_synchronized = true;
    /// Colliding (k, m), (k', m') when synchronized.
    std::optional<std::pair<PairIndex, PairIndex>> witness;
    double min_gap = 0.0;
};

SyncDecision is_non_synchronized(const CharacteristicPair& pair, double tolerance = 0.0);

struct Renumbering {
    std::size_t plus_rotation = 0;
    std::size_t minus_rotation = 0;
};

struct EquivalenceOptions {
    double tolerance = 0.0;
    /// Experimental: also try the cyclic-order-preserving renumberings of B.
    bool search_cyclic_renumberings = false;
};

struct EquivalenceResult {
    bool equivalent = false;
    std::optional<double> shift;
    std::optional<Rational> exact_shift;
    std::optional<Renumbering> renumbering;
};

/// Decides whether Lambda(A) and {Lambda(B) + alpha} are ordered the same way
/// on [0, 1) for some shift alpha; B's numbering is taken as given.
///
/// Throws SizeMismatch when |A^+| != |B^+| or |A^-| != |B^-|, and
/// SynchronizedInput when either pair is synchronized.
EquivalenceResult are_equivalent(const CharacteristicPair& a, const CharacteristicPair& b,
                                 const EquivalenceOptions& options = {});

/// B with plus indices rotated by r_plus and minus indices by r_minus:
/// point k of the result is point (k + r) mod size of the input.
CharacteristicPair renumbered(const CharacteristicPair& b, const Renumbering& r);

} // namespace parabolica::circle
