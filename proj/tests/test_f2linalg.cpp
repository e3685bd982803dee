#include <gtest/gtest.h>

#include <random>
#include <set>

#include "h8/errors.hpp"
#include "h8/f2linalg.hpp"

using namespace h8;

namespace {

std::size_t dimker(int k) {
    std::size_t n = 1;
    for (int i = 0; i < k; ++i) n *= 3;
    return n - 2 * k - 1;
}

std::vector<TypeLetter> word(const std::string& w) {
    std::vector<TypeLetter> s;
    for (char c : w) s.push_back(c == 'A' ? TypeLetter::A : TypeLetter::B);
    return s;
}

}  // namespace

TEST(Mk, SmallCases) {
    EXPECT_EQ(build_Mk(1), F2Matrix::from_rows({"100", "010", "001"}));
    EXPECT_EQ(build_Mk(2), F2Matrix::from_rows({"111000000", "000111000", "000000111", "100100100", "010010010",
                                                "001001001"}));
    const auto m3 = build_Mk(3);
    EXPECT_EQ(m3.rows(), 9u);
    EXPECT_EQ(m3.cols(), 27u);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 27; ++c) EXPECT_EQ(m3.get(r, c), c / 9 == r);
}

TEST(Mk, RowStructureMatchesDigits) {
    for (int k = 1; k <= 6; ++k) {
        const auto m = build_Mk(k);
        ASSERT_EQ(m.rows(), static_cast<std::size_t>(3 * k));
        for (std::size_t c = 0; c < m.cols(); ++c) {
            // Column c has exactly one 1 per digit position.
            std::size_t q = c;
            std::vector<int> digits(k);
            for (int i = k - 1; i >= 0; --i) digits[i] = static_cast<int>(q % 3), q /= 3;
            for (int i = 0; i < k; ++i)
                for (int v = 0; v < 3; ++v) ASSERT_EQ(m.get(3 * i + v, c), digits[i] == v);
        }
    }
}

TEST(Mk, CapacityLimits) {
    EXPECT_THROW(build_Mk(0), CapacityError);
    EXPECT_THROW(build_Mk(13), CapacityError);
}

TEST(Kernel, RankAndDimension) {
    for (int k = 1; k <= 8; ++k) {
        const auto m = build_Mk(k);
        const auto r = rank_and_kernel(m);
        EXPECT_EQ(r.rank, static_cast<std::size_t>(2 * k + 1)) << k;
        EXPECT_EQ(r.basis.size(), dimker(k)) << k;
        for (const auto& v : r.basis) {
            const auto img = m.apply(v.support);
            for (auto b : img) ASSERT_EQ(b, 0);
        }
    }
    EXPECT_EQ(rank_and_kernel(build_Mk(5)).basis.size(), 232u);
}

TEST(Kernel, BasisIsIndependent) {
    const auto r = rank_and_kernel(build_Mk(3));
    // Each basis vector owns a free column no other vector touches.
    std::vector<int> owner(27, 0);
    for (const auto& v : r.basis)
        for (auto c : v.support) ++owner[c];
    std::size_t singles = 0;
    for (const auto& v : r.basis)
        for (auto c : v.support)
            if (owner[c] == 1) { ++singles; break; }
    EXPECT_EQ(singles, r.basis.size());
}

TEST(Solve, RoundTripsRandomImages) {
    std::mt19937 rng(7);
    const auto m = build_Mk(4);
    for (int t = 0; t < 50; ++t) {
        std::vector<std::uint32_t> sup;
        for (std::uint32_t c = 0; c < m.cols(); ++c)
            if (rng() & 1) sup.push_back(c);
        const auto b = m.apply(sup);
        const auto x = solve(m, b);
        ASSERT_TRUE(x.has_value());
        EXPECT_EQ(m.apply(x->support), b);
    }
    // The parity of each block of rows is the parity of the weight; mixing breaks it.
    std::vector<std::uint8_t> bad(m.rows(), 0);
    bad[0] = 1;
    EXPECT_FALSE(solve(m, bad).has_value());
}

TEST(Gamma, FormulaCasesSmallK) {
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::NegOdd, 1).total, Dyadic(2));
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::NegOdd, 2).total, Dyadic(64));
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::PosOdd, 1).total, Dyadic(2));
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::PosOdd, 2).total, Dyadic(64));
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::Neg4Mod8, 1).total, Dyadic(24));
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::Neg4Mod8, 2).total, Dyadic(73728));
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::Neg0Mod8, 1).total, Dyadic(48));
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::Pos4Mod8, 1).total, Dyadic(16));
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::Pos4Mod8, 2).total, Dyadic(32768));
    for (auto tag : {CaseTag::NegOdd, CaseTag::PosOdd, CaseTag::Neg4Mod8, CaseTag::Pos4Mod8})
        for (int k = 1; k <= 2; ++k) EXPECT_EQ(gamma_sum_bruteforce(tag, k).total, closed_form_value(tag, k));
}

TEST(Gamma, OddCasesK3) {
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::NegOdd, 3).total, Dyadic::pow2(23));
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::PosOdd, 3).total, Dyadic::pow2(23));
}

TEST(Gamma, ZeroMod8Findings) {
    // Brute force against the stated closed forms; both differ.
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::Neg0Mod8, 2).total, Dyadic(106496));
    EXPECT_EQ(closed_form_value(CaseTag::Neg0Mod8, 2), Dyadic(147456));
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::Pos0Mod8, 1).total, Dyadic(32));
    EXPECT_EQ(closed_form_value(CaseTag::Pos0Mod8, 1), Dyadic(64));
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::Pos0Mod8, 2).total, Dyadic(65536));
    EXPECT_EQ(closed_form_value(CaseTag::Pos0Mod8, 2), Dyadic(262144));
}

TEST(Gamma, FreeAndEqualPairZeroReadingsCoincide) {
    GammaOptions free;
    free.zero_mod8_free = true;
    for (auto tag : {CaseTag::Neg0Mod8, CaseTag::Pos0Mod8})
        for (int k = 1; k <= 2; ++k)
            EXPECT_EQ(gamma_sum_bruteforce(tag, k, free).total, gamma_sum_bruteforce(tag, k).total);
}

TEST(Gamma, OrderedPairsReadingDiffers) {
    GammaOptions ord;
    ord.ordered_pairs = true;
    EXPECT_EQ(gamma_sum_bruteforce(CaseTag::Neg4Mod8, 1, ord).total, Dyadic(8));
}

TEST(Gamma, PerTypeDecompositionForOddCases) {
    // Every type contributes ±2^{dim ker} in the odd cases; the total is 2^{k + dim ker}.
    for (int k = 1; k <= 3; ++k) {
        const auto r = gamma_sum_bruteforce(CaseTag::NegOdd, k);
        EXPECT_EQ(r.per_U.size(), static_cast<std::size_t>(1) << k);
        for (const auto& [w, v] : r.per_U) EXPECT_EQ(v, Dyadic::pow2(static_cast<int>(dimker(k)))) << w;
        EXPECT_EQ(r.total, Dyadic::pow2(k + static_cast<int>(dimker(k))));
    }
}

TEST(Gamma, BudgetEnforced) {
    EXPECT_GT(gamma_states_per_type(CaseTag::NegOdd, 4), kGammaBudget);
    EXPECT_THROW(gamma_sum_bruteforce(CaseTag::NegOdd, 4), CapacityError);
    EXPECT_THROW(gamma_sum_bruteforce(CaseTag::Neg4Mod8, 3), CapacityError);
}

TEST(Tuples, NegOddK1TypeB) {
    std::vector<std::vector<std::uint8_t>> got;
    enumerate_congruence_tuples(CaseTag::NegOdd, 1, word("B"), [&](const auto& h) { got.push_back(h); });
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got[0], (std::vector<std::uint8_t>{3, 1, 1}));
}

TEST(Tuples, CountIsCosetSize) {
    for (int k = 1; k <= 3; ++k) {
        for (auto tag : {CaseTag::NegOdd, CaseTag::PosOdd}) {
            std::size_t n = 0;
            enumerate_congruence_tuples(tag, k, std::vector<TypeLetter>(k, TypeLetter::A), [&](const auto& h) {
                ++n;
                ASSERT_TRUE(satisfies_conditions(tag, k, h));
            });
            EXPECT_EQ(n, std::size_t{1} << dimker(k));
        }
    }
}

TEST(Tuples, Mod8CasesSatisfyConditions) {
    for (auto tag : {CaseTag::Neg4Mod8, CaseTag::Neg0Mod8, CaseTag::Pos4Mod8, CaseTag::Pos0Mod8}) {
        for (const std::vector<int>& J : {std::vector<int>{}, std::vector<int>{0}}) {
            if (J.size() && (tag == CaseTag::Pos4Mod8 || tag == CaseTag::Pos0Mod8)) continue;
            std::size_t n = 0;
            enumerate_congruence_tuples(
                tag, 1, word("B"),
                [&](const auto& h) {
                    ++n;
                    for (auto v : h) ASSERT_TRUE(v % 2 == 1 && v < 8);
                    ASSERT_TRUE(satisfies_conditions(tag, 1, h, J));
                },
                J);
            EXPECT_GT(n, 0u);
            // Lifts mod 8 are free: 2^3 per residue class mod 4.
            EXPECT_EQ(n % 8, 0u);
        }
    }
}

TEST(Tuples, ConditionsRejectWrongResidues) {
    EXPECT_FALSE(satisfies_conditions(CaseTag::NegOdd, 1, {1, 1, 1}));
    EXPECT_TRUE(satisfies_conditions(CaseTag::PosOdd, 1, {1, 1, 1}));
    EXPECT_FALSE(satisfies_conditions(CaseTag::PosOdd, 1, {1, 1}));
    EXPECT_FALSE(satisfies_conditions(CaseTag::PosOdd, 1, {2, 1, 1}));
    EXPECT_FALSE(satisfies_conditions(CaseTag::Pos4Mod8, 1, {9, 1, 1}));
}

TEST(Tuples, BruteForceScanAgrees) {
    // Every residue vector mod 4 for k = 2, filtered by the direct check, matches the enumerator.
    for (auto tag : {CaseTag::NegOdd, CaseTag::PosOdd}) {
        std::set<std::vector<std::uint8_t>> a, b;
        enumerate_congruence_tuples(tag, 2, word("AB"), [&](const auto& h) { a.insert(h); });
        for (std::uint32_t m = 0; m < (1U << 9); ++m) {
            std::vector<std::uint8_t> h(9);
            for (int i = 0; i < 9; ++i) h[i] = (m >> i & 1) ? 3 : 1;
            if (satisfies_conditions(tag, 2, h)) b.insert(h);
        }
        EXPECT_EQ(a, b);
    }
}

TEST(Cases, ParseAndNames) {
    for (auto tag : all_cases()) EXPECT_EQ(parse_case(to_string(tag)), tag);
    EXPECT_EQ(to_string(CaseTag::NegOdd), "neg-1mod4");
    EXPECT_THROW(parse_case("neg-2mod8"), ValidationError);
    EXPECT_EQ(congruence_case(CaseTag::Neg0Mod8).modulus, 8);
    EXPECT_EQ(congruence_case(CaseTag::PosOdd).modulus, 4);
    EXPECT_EQ(type_word(word("AB")), "AB");
}
