#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "parabolica/circle.hpp"
#include "parabolica/error.hpp"

using namespace parabolica;
using namespace parabolica::circle;

namespace {

MarkedSet set_of(std::vector<double> pts, Partition classes = {}) {
    return validate_marked_set(std::span<const double>(pts), classes);
}

MarkedSet exact_set(const std::vector<Rational>& pts, Partition classes = {}) {
    std::vector<CirclePoint> cps;
    for (const auto& r : pts) {
        cps.push_back(CirclePoint::from_rational(r));
    }
    return validate_marked_set(std::span<const CirclePoint>(cps), classes);
}

CharacteristicPair exact_pair(const oracle::RationalPair& p) { return {exact_set(p.plus), exact_set(p.minus)}; }

Errc code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::IOError;
}

} // namespace

TEST(MarkedSet, MinimalTwoClass) {
    auto s = set_of({0.1, 0.4}, {{0, 1}});
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s.two_class_count(), 1u);
    EXPECT_EQ(s.singleton_count(), 0u);
}

TEST(MarkedSet, InterleavedChordsRejected) {
    EXPECT_EQ(code_of([] { set_of({0.1, 0.3, 0.5, 0.7}, {{0, 2}, {1, 3}}); }), Errc::Intermingled);
}

TEST(MarkedSet, SingletonsAlwaysProper) {
    auto s = set_of({0.0, 0.2, 0.6}, {{0}, {1}, {2}});
    EXPECT_EQ(s.singleton_count(), 3u);
}

TEST(MarkedSet, Errors) {
    EXPECT_EQ(code_of([] { set_of({0.1, 1.1}); }), Errc::DuplicatePoint);
    EXPECT_EQ(code_of([] { set_of({0.1, 0.2, 0.3}, {{0, 1, 2}}); }), Errc::ClassTooLarge);
    EXPECT_EQ(code_of([] { set_of({0.1, 0.2}, {{0}}); }), Errc::BadPartition);
    EXPECT_EQ(code_of([] { set_of({0.1, 0.2}, {{0, 5}}); }), Errc::BadPartition);
    EXPECT_EQ(code_of([] { (void)CirclePoint::parse("1/0"); }), Errc::ParseError);
}

TEST(MarkedSet, SortsAndNormalizes) {
    auto s = set_of({0.7, -0.9, 0.4}, {{0, 2}, {1}});
    auto v = s.values();
    ASSERT_EQ(v.size(), 3u);
    EXPECT_NEAR(v[0], 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(v[1], 0.4);
    EXPECT_DOUBLE_EQ(v[2], 0.7);
    EXPECT_EQ(s.classes(), (Partition{{0}, {1, 2}}));
}

TEST(CirclePoint, ParseExact) {
    auto p = CirclePoint::parse("7/4");
    ASSERT_TRUE(p.is_exact());
    EXPECT_EQ(*p.exact(), Rational(3, 4));
    auto q = CirclePoint::parse("-0.25");
    EXPECT_EQ(*q.exact(), Rational(3, 4));
    EXPECT_EQ(p, q);
}

TEST(DifferenceTable, SingleDifference) {
    CharacteristicPair p{set_of({0.25}), set_of({0.0})};
    auto t = difference_table(p);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_DOUBLE_EQ(t(0, 0), 0.25);
}

TEST(DifferenceTable, HandOracle) {
    CharacteristicPair p{exact_set({Rational(1, 10), Rational(6, 10)}), exact_set({Rational(3, 10)})};
    auto t = difference_table(p);
    EXPECT_EQ(*t.at(0, 0).exact(), Rational(8, 10));
    EXPECT_EQ(*t.at(1, 0).exact(), Rational(3, 10));
}

TEST(DifferenceTable, EmptySide) {
    CharacteristicPair p{set_of({}), set_of({0.5})};
    EXPECT_TRUE(difference_table(p).empty());
    EXPECT_TRUE(is_non_synchronized(p).non_synchronized);
}

TEST(Sync, TranslatedCopiesCollide) {
    CharacteristicPair p{set_of({0.0, 0.5}), set_of({0.0, 0.5})};
    auto d = is_non_synchronized(p);
    EXPECT_FALSE(d.non_synchronized);
    ASSERT_TRUE(d.witness.has_value());
    auto [w1, w2] = *d.witness;
    auto t = difference_table(p);
    EXPECT_EQ(t.at(w1.k, w1.m), t.at(w2.k, w2.m));
    EXPECT_TRUE(w1 == (PairIndex{0, 0}) || w1 == (PairIndex{0, 1}));
}

TEST(Sync, SingleDifferenceIsNonSynchronized) {
    CharacteristicPair p{set_of({0.25}), set_of({0.0})};
    EXPECT_TRUE(is_non_synchronized(p).non_synchronized);
}

TEST(Sync, ToleranceMode) {
    CharacteristicPair p{set_of({0.0, 0.5}), set_of({0.0, 0.5 + 1e-13})};
    EXPECT_TRUE(is_non_synchronized(p, 0.0).non_synchronized);
    EXPECT_FALSE(is_non_synchronized(p, 1e-12).non_synchronized);
}

TEST(Sync, AgreesWithCoincidenceOracle) {
    std::mt19937_64 rng(11);
    const long D = 12;
    std::uniform_int_distribution<std::size_t> size(1, 4);
    for (int trial = 0; trial < 300; ++trial) {
        oracle::RationalPair rp;
        for (long v : oracle::random_grid_points(rng, D, size(rng))) rp.plus.emplace_back(v, D);
        for (long v : oracle::random_grid_points(rng, D, size(rng))) rp.minus.emplace_back(v, D);
        bool expected = oracle::max_coincidences(rp, D) <= 1;
        EXPECT_EQ(is_non_synchronized(exact_pair(rp)).non_synchronized, expected);
    }
}

TEST(Shift, IdentityAndWrap) {
    auto s = shift_set(set_of({0.1, 0.4}), 0.0);
    EXPECT_DOUBLE_EQ(s.values()[0], 0.1);
    auto w = shift_set(set_of({0.9}), 0.2);
    EXPECT_NEAR(w.values()[0], 0.1, 1e-15);
}

TEST(Shift, PreservesClasses) {
    auto s = set_of({0.1, 0.5, 0.8}, {{0, 2}, {1}});
    auto t = shift_set(s, CirclePoint::from_double(0.3));
    // 0.4, 0.8, 0.1 -> sorted 0.1(old 2), 0.4(old 0), 0.8(old 1)
    EXPECT_EQ(t.classes(), (Partition{{0, 1}, {2}}));
}

TEST(Shift, LambdaMovesByAlpha) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        CharacteristicPair p{set_of({u(rng), u(rng)}), set_of({u(rng), u(rng), u(rng)})};
        double alpha = u(rng);
        CharacteristicPair q{shift_set(p.plus, alpha), p.minus};
        auto tp = difference_table(p);
        auto tq = difference_table(q);
        // entries are indexed by sorted position, so compare as multisets
        std::vector<double> a, b;
        for (auto& e : tp.entries()) a.push_back(CirclePoint::from_double(e.value() + alpha).value());
        for (auto& e : tq.entries()) b.push_back(e.value());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_LT(circle_distance(CirclePoint::from_double(a[i]), CirclePoint::from_double(b[i])), 1e-12);
        }
    }
}

TEST(Shift, JointRotationInvariance) {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<long> pick(0, 96);
    for (int trial = 0; trial < 50; ++trial) {
        oracle::RationalPair rp;
        for (long v : oracle::random_grid_points(rng, 97, 3)) rp.plus.emplace_back(v, 97);
        for (long v : oracle::random_grid_points(rng, 97, 2)) rp.minus.emplace_back(v, 97);
        auto p = exact_pair(rp);
        auto alpha = CirclePoint::from_rational(Rational(pick(rng), 97));
        CharacteristicPair q{shift_set(p.plus, alpha), shift_set(p.minus, alpha)};
        std::vector<Rational> a, b;
        for (auto& e : difference_table(p).entries()) a.push_back(*e.exact());
        for (auto& e : difference_table(q).entries()) b.push_back(*e.exact());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        EXPECT_EQ(a, b);
    }
}

TEST(Equivalence, Reflexive) {
    CharacteristicPair p{set_of({0.1, 0.45, 0.77}), set_of({0.0, 0.3})};
    auto r = are_equivalent(p, p);
    EXPECT_TRUE(r.equivalent);
    EXPECT_EQ(*r.shift, 0.0);
}

TEST(Equivalence, SingletonsAlwaysEquivalent) {
    CharacteristicPair a{set_of({0.1}), set_of({0.7})};
    CharacteristicPair b{set_of({0.35}), set_of({0.2})};
    EXPECT_TRUE(are_equivalent(a, b).equivalent);
}

TEST(Equivalence, ReorderedPairInequivalent) {
    CharacteristicPair a{set_of({0.0, 0.3}), set_of({0.0, 0.1})};
    CharacteristicPair b{set_of({0.0, 0.05}), set_of({0.0, 0.1})};
    EXPECT_FALSE(are_equivalent(a, b).equivalent);
    EXPECT_FALSE(are_equivalent(b, a).equivalent);
    oracle::RationalPair ra{{0, Rational(3, 10)}, {0, Rational(1, 10)}};
    oracle::RationalPair rb{{0, Rational(1, 20)}, {0, Rational(1, 10)}};
    EXPECT_FALSE(oracle::grid_equivalent(ra, rb, 20));
}

TEST(Equivalence, Errors) {
    CharacteristicPair a{set_of({0.1}), set_of({0.7})};
    CharacteristicPair b{set_of({0.1, 0.2}), set_of({0.7})};
    EXPECT_EQ(code_of([&] { are_equivalent(a, b); }), Errc::SizeMismatch);
    CharacteristicPair s{set_of({0.0, 0.5}), set_of({0.0, 0.5})};
    EXPECT_EQ(code_of([&] { are_equivalent(s, s); }), Errc::SynchronizedInput);
}

TEST(Equivalence, EmptySides) {
    CharacteristicPair a{set_of({}), set_of({0.7, 0.1})};
    CharacteristicPair b{set_of({}), set_of({0.2, 0.3})};
    auto r = are_equivalent(a, b);
    EXPECT_TRUE(r.equivalent);
    EXPECT_EQ(*r.shift, 0.0);
}

TEST(Equivalence, WitnessShiftSatisfiesOrdering) {
    CharacteristicPair a{set_of({0.1, 0.45, 0.77}), set_of({0.0, 0.3})};
    CharacteristicPair b{shift_set(a.plus, 0.37), a.minus};
    auto r = are_equivalent(a, b);
    ASSERT_TRUE(r.equivalent);
    auto ta = difference_table(a);
    auto tb = difference_table(b);
    auto target = ta.ascending_order();
    for (std::size_t i = 0; i + 1 < target.size(); ++i) {
        double x = CirclePoint::from_double(tb.entries()[target[i]].value() + *r.shift).value();
        double y = CirclePoint::from_double(tb.entries()[target[i + 1]].value() + *r.shift).value();
        EXPECT_LT(x, y);
    }
}

TEST(Equivalence, AgreesWithGridOracleExact) {
    std::mt19937_64 rng(2024);
    const long D = 48;
    std::uniform_int_distribution<std::size_t> size(1, 4);
    std::uniform_int_distribution<long> jitter(-1, 1);
    std::uniform_int_distribution<long> shift(0, D - 1);
    int equivalent_cases = 0;
    int trials = 0;
    while (trials < 150) {
        oracle::RationalPair ra, rb;
        std::size_t K = size(rng), M = size(rng);
        for (long v : oracle::random_grid_points(rng, D, K)) ra.plus.emplace_back(v, D);
        for (long v : oracle::random_grid_points(rng, D, M)) ra.minus.emplace_back(v, D);
        if (trials % 2 == 0) {
            // shift one side and jitter: often equivalent, sometimes not
            long s = shift(rng);
            for (auto& v : ra.plus) rb.plus.push_back(oracle::frac(v + Rational(s + jitter(rng), D)));
            for (auto& v : ra.minus) rb.minus.push_back(oracle::frac(v + Rational(jitter(rng), D)));
        } else {
            for (long v : oracle::random_grid_points(rng, D, K)) rb.plus.emplace_back(v, D);
            for (long v : oracle::random_grid_points(rng, D, M)) rb.minus.emplace_back(v, D);
        }
        if (oracle::max_coincidences(ra, D) > 1 || oracle::max_coincidences(rb, D) > 1) {
            continue;
        }
        // jitter may reorder points; keep B's numbering in input order only when it stays sorted
        if (!std::is_sorted(rb.plus.begin(), rb.plus.end()) || !std::is_sorted(rb.minus.begin(), rb.minus.end()) ||
            std::adjacent_find(rb.plus.begin(), rb.plus.end()) != rb.plus.end() ||
            std::adjacent_find(rb.minus.begin(), rb.minus.end()) != rb.minus.end()) {
            continue;
        }
        ++trials;
        bool expected = oracle::grid_equivalent(ra, rb, D);
        equivalent_cases += expected;
        EXPECT_EQ(are_equivalent(exact_pair(ra), exact_pair(rb)).equivalent, expected);
    }
    EXPECT_GT(equivalent_cases, 10);
}

TEST(Equivalence, SymmetricAndTransitive) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        CharacteristicPair a{set_of({u(rng), u(rng), u(rng)}), set_of({u(rng), u(rng)})};
        CharacteristicPair b{shift_set(a.plus, u(rng)), a.minus};
        CharacteristicPair c{shift_set(b.plus, u(rng)), shift_set(b.minus, u(rng))};
        // joint shifts of one side may renumber points; compare only when numbering is kept
        auto ab = are_equivalent(a, b).equivalent;
        EXPECT_EQ(ab, are_equivalent(b, a).equivalent);
        auto bc = are_equivalent(b, c).equivalent;
        auto ac = are_equivalent(a, c).equivalent;
        if (ab && bc) {
            EXPECT_TRUE(ac);
        }
    }
}

TEST(Equivalence, CyclicRenumberingSearch) {
    CharacteristicPair a{set_of({0.1, 0.45, 0.77}), set_of({0.0, 0.3})};
    // renumbering B by one step on the plus side breaks the identity alignment
    auto b = renumbered(a, {1, 0});
    EquivalenceOptions opts;
    opts.search_cyclic_renumberings = true;
    auto r = are_equivalent(a, b, opts);
    EXPECT_TRUE(r.equivalent);
}

TEST(Renumbering, RotatesIndices) {
    CharacteristicPair a{set_of({0.1, 0.45, 0.77}), set_of({0.0, 0.3})};
    auto b = renumbered(a, {1, 0});
    auto vb = b.plus.values();
    EXPECT_NEAR(vb[0], 0.0, 1e-15);
    EXPECT_NEAR(vb[1], 0.32, 1e-15);
    EXPECT_NEAR(vb[2], 0.65, 1e-15);
}

TEST(MarkedSet, AcceptsIffChordsNonCrossing) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> size(0, 8);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = size(rng);
        std::vector<double> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(n));
        // random pairing, crossing or not
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        Partition blocks;
        std::size_t i = 0;
        std::bernoulli_distribution coin(0.6);
        while (i < n) {
            if (i + 1 < n && coin(rng)) {
                auto a = std::min(idx[i], idx[i + 1]), b = std::max(idx[i], idx[i + 1]);
                blocks.push_back({a, b});
                i += 2;
            } else {
                blocks.push_back({idx[i]});
                i += 1;
            }
        }
        bool expected = oracle::chords_non_crossing(n, blocks);
        bool accepted = true;
        try {
            set_of(pts, blocks);
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::Intermingled);
            accepted = false;
        }
        EXPECT_EQ(accepted, expected);
    }
}
