#include "parabolica/circle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "parabolica/error.hpp"

namespace parabolica::circle {

namespace {

using boost::multiprecision::cpp_int;

Rational frac(const Rational& r) {
    cpp_int n = boost::multiprecision::numerator(r);
    cpp_int d = boost::multiprecision::denominator(r);
    cpp_int q = n / d;
    if (n < 0 && q * d != n) {
        q -= 1;
    }
    return r - Rational(q);
}

double frac(double v) {
    double f = v - std::floor(v);
    // v slightly below an integer rounds up to exactly 1
    if (f >= 1.0) {
        f = 0.0;
    }
    return f;
}

} // namespace

CirclePoint CirclePoint::from_double(double v) {
    if (!std::isfinite(v)) {
        throw Error(Errc::OutOfDomain, "circle coordinate must be finite");
    }
    CirclePoint p;
    p.value_ = frac(v);
    return p;
}

CirclePoint CirclePoint::from_rational(const Rational& r) {
    CirclePoint p;
    p.exact_ = frac(r);
    p.value_ = p.exact_->convert_to<double>();
    if (p.value_ >= 1.0) {
        p.value_ = std::nextafter(1.0, 0.0);
    }
    return p;
}

CirclePoint CirclePoint::parse(const std::string& text) {
    auto bad = [&] { return Error(Errc::ParseError, "cannot parse circle coordinate '" + text + "'"); };
    auto parse_decimal = [&](const std::string& s) -> Rational {
        if (s.empty()) {
            throw bad();
        }
        std::size_t pos = 0;
        bool negative = false;
        if (s[0] == '-' || s[0] == '+') {
            negative = s[0] == '-';
            pos = 1;
        }
        cpp_int digits = 0;
        cpp_int scale = 1;
        bool seen_dot = false;
        bool seen_digit = false;
        for (; pos < s.size(); ++pos) {
            char c = s[pos];
            if (c == '.' && !seen_dot) {
                seen_dot = true;
            } else if (c >= '0' && c <= '9') {
                digits = digits * 10 + (c - '0');
                if (seen_dot) {
                    scale *= 10;
                }
                seen_digit = true;
            } else {
                throw bad();
            }
        }
        if (!seen_digit) {
            throw bad();
        }
        Rational r(digits, scale);
        return negative ? Rational(-r) : r;
    };
    auto slash = text.find('/');
    if (slash == std::string::npos) {
        return from_rational(parse_decimal(text));
    }
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) {
        throw bad();
    }
    return from_rational(num / den);
}

CirclePoint CirclePoint::shifted(const CirclePoint& alpha) const {
    if (exact_ && alpha.exact_) {
        return from_rational(*exact_ + *alpha.exact_);
    }
    return from_double(value_ + alpha.value_);
}

bool operator<(const CirclePoint& a, const CirclePoint& b) {
    if (a.exact_ && b.exact_) {
        return *a.exact_ < *b.exact_;
    }
    return a.value_ < b.value_;
}

bool operator==(const CirclePoint& a, const CirclePoint& b) {
    if (a.exact_ && b.exact_) {
        return *a.exact_ == *b.exact_;
    }
    return a.value_ == b.value_;
}

CirclePoint frac_diff(const CirclePoint& a, const CirclePoint& b) {
    if (a.exact() && b.exact()) {
        return CirclePoint::from_rational(*a.exact() - *b.exact());
    }
    return CirclePoint::from_double(a.value() - b.value());
}

double circle_distance(const CirclePoint& a, const CirclePoint& b) {
    double d = frac_diff(a, b).value();
    return std::min(d, 1.0 - d);
}

CirclePoint midpoint_on_arc(const CirclePoint& from, const CirclePoint& to) {
    CirclePoint len = frac_diff(to, from);
    if (from.exact() && len.exact()) {
        return CirclePoint::from_rational(*from.exact() + *len.exact() / 2);
    }
    return CirclePoint::from_double(from.value() + 0.5 * len.value());
}

// ---------------------------------------------------------------------------

bool MarkedSet::is_exact() const noexcept {
    return std::all_of(points_.begin(), points_.end(), [](const CirclePoint& p) { return p.is_exact(); });
}

std::size_t MarkedSet::class_of(std::size_t i) const {
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        if (std::find(classes_[c].begin(), classes_[c].end(), i) != classes_[c].end()) {
            return c;
        }
    }
    throw Error(Errc::BadPartition, "point index not covered by the partition");
}

std::size_t MarkedSet::two_class_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(classes_.begin(), classes_.end(), [](const auto& c) { return c.size() == 2; }));
}

std::size_t MarkedSet::singleton_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(classes_.begin(), classes_.end(), [](const auto& c) { return c.size() == 1; }));
}

std::vector<double> MarkedSet::values() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) {
        out.push_back(p.value());
    }
    return out;
}

namespace {

// Two chords {a,b}, {c,d} with a<b, c<d (positions in circular order) cross
// iff exactly one of c, d lies strictly inside (a, b).
bool chords_cross(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    bool c_in = a < c && c < b;
    bool d_in = a < d && d < b;
    return c_in != d_in;
}

Partition canonical_classes(const Partition& classes, const std::vector<std::size_t>& new_index) {
    Partition out;
    out.reserve(classes.size());
    for (const auto& block : classes) {
        std::vector<std::size_t> mapped;
        for (auto i : block) {
            mapped.push_back(new_index[i]);
        }
        std::sort(mapped.begin(), mapped.end());
        out.push_back(std::move(mapped));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

MarkedSet validate_marked_set(std::span<const CirclePoint> points, const Partition& classes,
                              double tolerance) {
    const std::size_t n = points.size();
    Partition blocks = classes;
    if (blocks.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            blocks.push_back({i});
        }
    }

    std::vector<int> seen(n, 0);
    for (const auto& block : blocks) {
        if (block.empty()) {
            throw Error(Errc::BadPartition, "empty class");
        }
        for (auto i : block) {
            if (i >= n) {
                throw Error(Errc::BadPartition, "class refers to point " + std::to_string(i) +
                                                    " but only " + std::to_string(n) + " points given");
            }
            if (seen[i]++) {
                throw Error(Errc::BadPartition, "point " + std::to_string(i) + " appears in two classes");
            }
        }
        if (block.size() >= 3) {
            throw Error(Errc::ClassTooLarge, "class of size " + std::to_string(block.size()));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) {
            throw Error(Errc::BadPartition, "point " + std::to_string(i) + " is in no class");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    const bool exact = std::all_of(points.begin(), points.end(), [](const auto& p) { return p.is_exact(); });
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = points[order[i]];
        const auto& q = points[order[(i + 1) % n]];
        if (n < 2) {
            break;
        }
        bool dup = exact ? (p == q) : circle_distance(p, q) <= tolerance;
        if (dup) {
            throw Error(Errc::DuplicatePoint, "points " + std::to_string(order[i]) + " and " +
                                                  std::to_string(order[(i + 1) % n]) + " coincide mod 1");
        }
    }

    std::vector<std::size_t> new_index(n);
    for (std::size_t i = 0; i < n; ++i) {
        new_index[order[i]] = i;
    }

    MarkedSet set;
    set.points_.reserve(n);
    for (auto i : order) {
        set.points_.push_back(points[i]);
    }
    set.classes_ = canonical_classes(blocks, new_index);

    std::vector<std::pair<std::size_t, std::size_t>> chords;
    for (const auto& block : set.classes_) {
        if (block.size() == 2) {
            chords.emplace_back(block[0], block[1]);
        }
    }
    for (std::size_t i = 0; i < chords.size(); ++i) {
        for (std::size_t j = i + 1; j < chords.size(); ++j) {
            if (chords_cross(chords[i].first, chords[i].second, chords[j].first, chords[j].second)) {
                throw Error(Errc::Intermingled, "classes {" + std::to_string(chords[i].first) + "," +
                                                    std::to_string(chords[i].second) + "} and {" +
                                                    std::to_string(chords[j].first) + "," +
                                                    std::to_string(chords[j].second) + "} interleave");
            }
        }
    }
    return set;
}

MarkedSet validate_marked_set(std::span<const double> points, const Partition& classes, double tolerance) {
    std::vector<CirclePoint> pts;
    pts.reserve(points.size());
    for (double v : points) {
        pts.push_back(CirclePoint::from_double(v));
    }
    return validate_marked_set(pts, classes, tolerance);
}

MarkedSet shift_set(const MarkedSet& set, const CirclePoint& alpha) {
    const std::size_t n = set.size();
    std::vector<CirclePoint> moved;
    moved.reserve(n);
    for (const auto& p : set.points_) {
        moved.push_back(p.shifted(alpha));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return moved[a] < moved[b]; });
    std::vector<std::size_t> new_index(n);
    for (std::size_t i = 0; i < n; ++i) {
        new_index[order[i]] = i;
    }
    MarkedSet out;
    out.points_.reserve(n);
    for (auto i : order) {
        out.points_.push_back(moved[i]);
    }
    out.classes_ = canonical_classes(set.classes_, new_index);
    return out;
}

// ---------------------------------------------------------------------------

DifferenceTable::DifferenceTable(std::size_t K, std::size_t M, std::vector<CirclePoint> entries)
    : K_(K), M_(M), entries_(std::move(entries)) {
    min_gap_ = std::numeric_limits<double>::infinity();
    if (entries_.size() < 2) {
        return;
    }
    auto order = ascending_order();
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::size_t a = order[i];
        std::size_t b = order[(i + 1) % order.size()];
        // arc from a forward to b; the wrap-around arc closes the circle
        double gap = frac_diff(entries_[b], entries_[a]).value();
        if (entries_[a] == entries_[b]) {
            gap = 0.0;
        }
        if (gap < min_gap_) {
            min_gap_ = gap;
            closest_ = {index_of(std::min(a, b)), index_of(std::max(a, b))};
        }
    }
}

std::vector<std::size_t> DifferenceTable::ascending_order() const {
    std::vector<std::size_t> order(entries_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return entries_[a] < entries_[b]; });
    return order;
}

DifferenceTable difference_table(const CharacteristicPair& pair) {
    std::vector<CirclePoint> entries;
    entries.reserve(pair.K() * pair.M());
    for (const auto& a_plus : pair.plus.points()) {
        for (const auto& a_minus : pair.minus.points()) {
            entries.push_back(frac_diff(a_plus, a_minus));
        }
    }
    return DifferenceTable(pair.K(), pair.M(), std::move(entries));
}

SyncDecision is_non_synchronized(const CharacteristicPair& pair, double tolerance) {
    auto table = difference_table(pair);
    SyncDecision d;
    d.min_gap = table.min_gap();
    d.non_synchronized = table.size() < 2 || table.min_gap() > tolerance;
    if (!d.non_synchronized) {
        d.witness = table.closest();
    }
    return d;
}

// ---------------------------------------------------------------------------

namespace {

bool same_order(const std::vector<std::size_t>& target, const std::vector<CirclePoint>& lambda,
                const CirclePoint& alpha) {
    std::vector<CirclePoint> moved;
    moved.reserve(lambda.size());
    for (const auto& l : lambda) {
        moved.push_back(l.shifted(alpha));
    }
    // tau ascending order must be strictly ascending in the shifted lambdas
    for (std::size_t i = 0; i + 1 < target.size(); ++i) {
        if (!(moved[target[i]] < moved[target[i + 1]])) {
            return false;
        }
    }
    return true;
}

std::optional<CirclePoint> find_shift(const DifferenceTable& tau, const DifferenceTable& lambda,
                                      double tolerance) {
    const auto target = tau.ascending_order();
    const auto& lam = lambda.entries();
    const bool exact = std::all_of(lam.begin(), lam.end(), [](const auto& p) { return p.is_exact(); });
    const CirclePoint zero = exact ? CirclePoint::from_rational(0) : CirclePoint::from_double(0.0);
    if (same_order(target, lam, zero)) {
        return zero;
    }

    // The order of {lambda + alpha} only changes when alpha crosses -lambda_km.
    std::vector<CirclePoint> breaks;
    breaks.reserve(lam.size());
    for (const auto& l : lam) {
        breaks.push_back(frac_diff(zero, l));
    }
    std::sort(breaks.begin(), breaks.end());
    for (std::size_t i = 0; i < breaks.size(); ++i) {
        const auto& lo = breaks[i];
        const auto& hi = breaks[(i + 1) % breaks.size()];
        if (breaks.size() > 1 && (lo == hi || (!exact && circle_distance(lo, hi) <= tolerance))) {
            continue;
        }
        auto alpha = midpoint_on_arc(lo, hi);
        if (breaks.size() == 1) {
            alpha = lo.shifted(exact ? CirclePoint::from_rational(Rational(1, 2)) : CirclePoint::from_double(0.5));
        }
        if (same_order(target, lam, alpha)) {
            return alpha;
        }
    }
    return std::nullopt;
}

CirclePoint rotation_offset(const MarkedSet& set, std::size_t r) {
    // shifting so that point r lands at 0 rotates the numbering by r
    const auto& p = set.points().at(r);
    if (p.exact()) {
        return CirclePoint::from_rational(-*p.exact());
    }
    return CirclePoint::from_double(-p.value());
}

} // namespace

CharacteristicPair renumbered(const CharacteristicPair& b, const Renumbering& r) {
    CharacteristicPair out = b;
    if (b.K() > 0 && r.plus_rotation % b.K() != 0) {
        out.plus = shift_set(b.plus, rotation_offset(b.plus, r.plus_rotation % b.K()));
    }
    if (b.M() > 0 && r.minus_rotation % b.M() != 0) {
        out.minus = shift_set(b.minus, rotation_offset(b.minus, r.minus_rotation % b.M()));
    }
    return out;
}

EquivalenceResult are_equivalent(const CharacteristicPair& a, const CharacteristicPair& b,
                                 const EquivalenceOptions& options) {
    if (a.K() != b.K() || a.M() != b.M()) {
        throw Error(Errc::SizeMismatch, "pair sizes (" + std::to_string(a.K()) + "," + std::to_string(a.M()) +
                                            ") and (" + std::to_string(b.K()) + "," + std::to_string(b.M()) +
                                            ") differ");
    }
    if (!is_non_synchronized(a, options.tolerance).non_synchronized) {
        throw Error(Errc::SynchronizedInput, "first pair is synchronized");
    }
    if (!is_non_synchronized(b, options.tolerance).non_synchronized) {
        throw Error(Errc::SynchronizedInput, "second pair is synchronized");
    }

    EquivalenceResult result;
    auto accept = [&](const CirclePoint& alpha) {
        result.equivalent = true;
        result.shift = alpha.value();
        if (alpha.exact()) {
            result.exact_shift = *alpha.exact();
        }
    };

    if (a.K() * a.M() == 0) {
        accept(CirclePoint::from_double(0.0));
        return result;
    }

    const auto tau = difference_table(a);
    if (auto alpha = find_shift(tau, difference_table(b), options.tolerance)) {
        accept(*alpha);
        return result;
    }
    if (options.search_cyclic_renumberings) {
        for (std::size_t rp = 0; rp < b.K(); ++rp) {
            for (std::size_t rm = 0; rm < b.M(); ++rm) {
                if (rp == 0 && rm == 0) {
                    continue;
                }
                Renumbering r{rp, rm};
                if (auto alpha = find_shift(tau, difference_table(renumbered(b, r)), options.tolerance)) {
                    accept(*alpha);
                    result.renumbering = r;
                    return result;
                }
            }
        }
    }
    return result;
}

} // namespace parabolica::circle
