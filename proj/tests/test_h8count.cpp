#include <gtest/gtest.h>

#include <cstdlib>
#include <numeric>

#include "h8/errors.hpp"
#include "h8/h8count.hpp"
#include "h8/sieve.hpp"

using namespace h8;

namespace {

std::vector<std::int64_t> rational_primes(std::int64_t v) {
    std::vector<std::int64_t> out;
    std::int64_t n = std::llabs(v);
    for (std::int64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) out.push_back(n);
    return out;
}

// Π_i Π_{p | d_i} (1 + (d_{i+1} d_{i+2} / p)) on the block products.
mpz_class lemmermeyer_product(const std::array<std::int64_t, 3>& b) {
    mpz_class t = 1;
    for (int i = 0; i < 3; ++i) {
        const std::int64_t x = b[(i + 1) % 3] * b[(i + 2) % 3];
        for (auto p : rational_primes(b[i])) t *= 1 + kronecker(x, p);
    }
    return t;
}

// f~ by ordered block assignments of the prime discriminants; each unordered
// factorization with three distinct nonempty blocks is seen 6 times.
mpq_class f_tilde_oracle(std::int64_t d, bool loose = false) {
    const auto fs = prime_discriminant_factorization(d);
    const int w = static_cast<int>(fs.size());
    long total = 1;
    for (int i = 0; i < w; ++i) total *= 3;
    mpz_class s = 0;
    for (long code = 0; code < total; ++code) {
        std::array<std::int64_t, 3> b{1, 1, 1};
        long c = code;
        for (int i = 0; i < w; ++i) {
            b[c % 3] *= fs[i];
            c /= 3;
        }
        const int trivial = (b[0] == 1) + (b[1] == 1) + (b[2] == 1);
        if (trivial == 0 || (loose && trivial == 1)) s += lemmermeyer_product(b);
    }
    mpq_class r(s, 6);
    r /= mpz_class(1) << (3 + (d > 0 ? 1 : 0));
    r.canonicalize();
    return r;
}

// The D4 formula taken literally, over ordered factorizations.
mpq_class d4_oracle(std::int64_t d) {
    const auto fs = prime_discriminant_factorization(d);
    const int w = static_cast<int>(fs.size());
    long total = 1;
    for (int i = 0; i < w; ++i) total *= 3;
    mpq_class s = 0;
    for (long code = 0; code < total; ++code) {
        std::array<std::int64_t, 3> b{1, 1, 1};
        long c = code;
        for (int i = 0; i < w; ++i) {
            b[c % 3] *= fs[i];
            c /= 3;
        }
        mpq_class t = 1;
        for (auto x : b) {
            const int om = static_cast<int>(rational_primes(x).size());
            t *= om >= 1 ? mpq_class(mpz_class(1) << (om - 1)) : mpq_class(1, 2);
        }
        t /= mpz_class(1) << w;
        t *= mpz_class(1) << rational_primes(b[2]).size();
        for (auto p : rational_primes(b[0])) t *= 1 + kronecker(b[1], p);
        for (auto p : rational_primes(b[1])) t *= 1 + kronecker(b[0], p);
        s += t;
    }
    s /= 2;
    s.canonicalize();
    return s;
}

std::vector<std::int64_t> fundamentals(std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> out;
    for (std::int64_t a = lo; a <= hi; ++a)
        for (std::int64_t d : {-a, a})
            if (is_fundamental(d)) out.push_back(d);
    return out;
}

std::uint64_t stirling3(int n) {
    // S(n,3) = (3^n - 3·2^n + 3) / 6
    if (n < 3) return 0;
    std::uint64_t p3 = 1, p2 = 1;
    for (int i = 0; i < n; ++i) p3 *= 3, p2 *= 2;
    return (p3 - 3 * p2 + 3) / 6;
}

}  // namespace

TEST(Admissible, SpecExamples) {
    EXPECT_TRUE(admissible_h8(8, 5, -3));
    EXPECT_FALSE(admissible_h8(-4, -3, -7));
    EXPECT_TRUE(admissible_h8(-120, 1, 1));
}

TEST(Admissible, Errors) {
    EXPECT_THROW(admissible_h8(-3, -15, 1), ValidationError);
    EXPECT_THROW(admissible_h8(3, 5, 1), ValidationError);
    EXPECT_THROW(admissible_h8(-4, 8, 5), ValidationError);
    EXPECT_THROW(admissible_h8(-4, -4, 5), ValidationError);
}

TEST(Admissible, PermutationInvariance) {
    for (std::int64_t d : fundamentals(3, 3000)) {
        const auto D = make_discriminant(d);
        for (const auto& t : nontrivial_factorizations(D)) {
            std::array<std::int64_t, 3> b = t.d;
            std::sort(b.begin(), b.end());
            const bool ref = admissible_h8(b[0], b[1], b[2]);
            do {
                ASSERT_EQ(admissible_h8(b[0], b[1], b[2]), ref) << d;
            } while (std::next_permutation(b.begin(), b.end()));
        }
    }
}

TEST(Factorizations, CountsAreStirlingNumbers) {
    for (std::int64_t d : {-3L, -15L, -120L, -1155L, -11220L, 1185665L}) {
        const auto D = make_discriminant(d);
        const auto f = nontrivial_factorizations(D);
        EXPECT_EQ(f.size(), stirling3(D.omega)) << d;
        for (const auto& t : f) {
            EXPECT_EQ(t.d[0] * t.d[1] * t.d[2], d);
            for (auto x : t.d) EXPECT_NE(x, 1);
            // canonical: block labels appear in first-occurrence order
            int mx = -1;
            for (auto b : t.blocks) {
                EXPECT_LE(static_cast<int>(b), mx + 1);
                mx = std::max(mx, static_cast<int>(b));
            }
        }
    }
}

TEST(Factorizations, AdmissibleSubsetAgreesWithCriterion) {
    for (std::int64_t d : fundamentals(3, 5000)) {
        const auto D = make_discriminant(d);
        std::uint64_t n = 0;
        for (const auto& t : nontrivial_factorizations(D)) n += admissible_h8(t.d[0], t.d[1], t.d[2]);
        ASSERT_EQ(n, admissible_count(D)) << d;
        ASSERT_EQ(admissible_factorizations(D).size(), n) << d;
    }
}

TEST(FiniteCount, SpecExamples) {
    EXPECT_EQ(count_finite_unramified(make_discriminant(-3)), 0);
    EXPECT_EQ(count_finite_unramified(make_discriminant(-120)), 1);
    EXPECT_EQ(count_finite_unramified(make_discriminant(-84)), 0);
    const auto adm = admissible_factorizations(make_discriminant(-120));
    ASSERT_EQ(adm.size(), 1u);
    auto b = adm[0].d;
    std::sort(b.begin(), b.end());
    EXPECT_EQ(b, (std::array<std::int64_t, 3>{-3, 5, 8}));
}

TEST(FTilde, FrozenValues) {
    // Oracle values computed by independent enumeration before the build.
    EXPECT_EQ(f_tilde(make_discriminant(-120)), Dyadic(1));
    EXPECT_EQ(f_tilde(make_discriminant(105)), Dyadic(0));
    EXPECT_EQ(f_tilde(make_discriminant(-3)), Dyadic(0));
    EXPECT_EQ(f_tilde(make_discriminant(-84)), Dyadic(0));
    EXPECT_EQ(f_tilde(make_discriminant(1105)), Dyadic(0));
    EXPECT_EQ(f_tilde(make_discriminant(-11220)), Dyadic(8));
    EXPECT_EQ(f_tilde(make_discriminant(1185665)), Dyadic(2));
}

TEST(FTilde, MatchesOrderedOracle) {
    for (std::int64_t d : fundamentals(3, 4000)) {
        ASSERT_EQ(f_tilde(make_discriminant(d)).to_mpq(), f_tilde_oracle(d)) << d;
    }
    for (std::int64_t d : {-11220L, 1185665L, 1021020L})
        if (is_fundamental(d)) EXPECT_EQ(f_tilde(make_discriminant(d)).to_mpq(), f_tilde_oracle(d)) << d;
}

TEST(FTilde, Properties) {
    const auto sv = SieveTable::build(20000);
    for (Sign s : {Sign::Negative, Sign::Positive}) {
        for_each_fundamental_discriminant(
            sv, 3, 20000, s, {CongClass::Odd1Mod4, CongClass::FourMod8, CongClass::ZeroMod8},
            [&](const FundamentalDiscriminant& D) {
                const Dyadic f = f_tilde(D);
                ASSERT_GE(f.sign(), 0);
                ASSERT_TRUE(f.scaled(4).is_integer()) << D.value;
                if (D.omega <= 2) ASSERT_EQ(f, Dyadic(0)) << D.value;
                if (D.value < 0) ASSERT_EQ(f, Dyadic(count_finite_unramified(D))) << D.value;
                ASSERT_GE(count_finite_unramified(D), 0);
            });
    }
}

TEST(FEverywhere, BetaHandling) {
    const auto a = f_everywhere(make_discriminant(-120));
    EXPECT_EQ(a.value, Dyadic(1));
    EXPECT_FALSE(a.beta_ambiguous);
    const auto b = f_everywhere(make_discriminant(1105));
    EXPECT_TRUE(b.beta_ambiguous);
    EXPECT_EQ(b.value, f_tilde(make_discriminant(1105)));
    // d > 0 with a prime ≡ 3 mod 4: 2^{ω−4} per admissible factorization.
    for (std::int64_t d : fundamentals(3, 20000)) {
        if (d < 0) continue;
        const auto D = make_discriminant(d);
        const auto e = f_everywhere(D);
        ASSERT_EQ(e.beta_ambiguous, !D.has_prime_3mod4()) << d;
        if (D.has_prime_3mod4() && D.omega >= 4) {
            ASSERT_EQ(e.value, Dyadic(static_cast<long>(admissible_count(D))).scaled(D.omega - 4)) << d;
        }
    }
}

TEST(AlphaBeta, Table) {
    auto ab = alpha_beta(make_discriminant(-120));
    EXPECT_EQ(ab.alpha, 0);
    EXPECT_EQ(ab.alpha_tilde, 0);
    EXPECT_TRUE(ab.beta_known);
    ab = alpha_beta(make_discriminant(105));
    EXPECT_EQ(ab.alpha, 1);
    EXPECT_EQ(ab.alpha_tilde, 1);
    EXPECT_TRUE(ab.beta_known);
    ab = alpha_beta(make_discriminant(1105));
    EXPECT_EQ(ab.alpha, 0);
    EXPECT_EQ(ab.alpha_tilde, 1);
    EXPECT_FALSE(ab.beta_known);
}

TEST(Surj, SpecExamples) {
    EXPECT_EQ(surj_count(make_discriminant(-120)).value, Dyadic(8));
    EXPECT_EQ(surj_count(make_discriminant(-3)).value, Dyadic(0));
    EXPECT_EQ(surj_count(make_discriminant(-84)).value, Dyadic(0));
    EXPECT_TRUE(surj_count(make_discriminant(1105)).beta_ambiguous);
    const auto D = make_discriminant(-11220);
    EXPECT_EQ(surj_count(D).value, f_everywhere(D).value * Dyadic(8));
}

TEST(CountD4, FrozenValues) {
    EXPECT_EQ(count_d4(make_discriminant(-3)).str(), "3/8");
    EXPECT_EQ(count_d4(make_discriminant(-4)).str(), "3/8");
    EXPECT_EQ(count_d4(make_discriminant(-15)).str(), "7/4");
    EXPECT_EQ(count_d4(make_discriminant(-120)).str(), "15/2");
    EXPECT_EQ(count_d4(make_discriminant(1105)).str(), "17/2");
    EXPECT_EQ(count_d4(make_discriminant(-11220)).str(), "138");
    EXPECT_EQ(count_d4(make_discriminant(1185665)).str(), "154");
}

TEST(CountD4, MatchesLiteralFormula) {
    for (std::int64_t d : fundamentals(3, 3000)) ASSERT_EQ(count_d4(make_discriminant(d)).to_mpq(), d4_oracle(d)) << d;
}

TEST(CharacterSum, SpecExamples) {
    EXPECT_EQ(f_via_character_sum(-120), Dyadic(1));
    EXPECT_EQ(f_via_character_sum(-15), Dyadic(0));
    for (std::int64_t bad : {1, -1, 2, -2}) EXPECT_THROW(f_via_character_sum(bad), ValidationError);
    EXPECT_THROW(f_via_character_sum(9), ValidationError);
}

TEST(CharacterSum, PartsAssemble) {
    for (std::int64_t d : {-120L, -11220L, 1185665L, 105L, -84L, 1105L}) {
        const auto D = make_discriminant(d);
        const auto p = character_sum_parts(D);
        EXPECT_EQ(p.total, f_tilde(D)) << d;
        EXPECT_EQ(mpq_class(p.f1 - p.f2 + p.correction.to_mpq()), p.total.to_mpq()) << d;
        EXPECT_EQ(p.correction, Dyadic::pow2(D.omega - 4 - (d > 0 ? 1 : 0)));
    }
}

TEST(CharacterSum, EquivalentToFTildePerClass) {
    const auto sv = SieveTable::build(30000);
    for (Sign s : {Sign::Negative, Sign::Positive}) {
        for (CongClass c : {CongClass::Odd1Mod4, CongClass::FourMod8, CongClass::ZeroMod8}) {
            std::uint64_t n = 0, nonzero = 0;
            for_each_fundamental_discriminant(sv, 3, 30000, s, {c}, [&](const FundamentalDiscriminant& D) {
                const Dyadic f = f_tilde(D);
                ASSERT_EQ(f_via_character_sum(D), f) << D.value;
                ++n;
                nonzero += f != Dyadic(0);
            });
            EXPECT_GT(n, 100u);
            EXPECT_GT(nonzero, 0u) << to_string(s) << " " << to_string(c);
        }
    }
}

TEST(NontrivialReading, LooseReadingMatchesOracle) {
    std::uint64_t diverge = 0;
    for (std::int64_t d : fundamentals(3, 3000)) {
        const auto D = make_discriminant(d);
        ASSERT_EQ(f_tilde_loose(D).to_mpq(), f_tilde_oracle(d, true)) << d;
        ASSERT_EQ(nontrivial_readings_diverge(D), f_tilde_loose(D) != f_tilde(D));
        diverge += nontrivial_readings_diverge(D);
    }
    EXPECT_GT(diverge, 0u);
    EXPECT_FALSE(nontrivial_readings_diverge(make_discriminant(-120)));
    EXPECT_TRUE(nontrivial_readings_diverge(make_discriminant(-39)));
    EXPECT_EQ(f_tilde_loose(make_discriminant(-39)).to_mpq(), mpq_class(1, 2));
}
