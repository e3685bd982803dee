/// @file h8count.hpp
/// Counts of unramified quaternion extensions per discriminant.
///
/// The reference counts enumerate 3-block set partitions of the
/// prime-discriminant list. The character-sum route enumerates 6-slot and
/// 4-slot factorizations of the odd part into positive integers and is kept
/// independent of the partition code so the two can be compared.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "h8/arith.hpp"
#include "h8/dyadic.hpp"

namespace h8 {

enum class Variant { FiniteOnly, Everywhere, Tilde, D4 };

struct TriFactorization {
    /// blocks[i] = block (0..2) of factor i of the discriminant.
    std::vector<std::uint8_t> blocks;
    std::array<std::int64_t, 3> d{1, 1, 1};
};

struct ExtensionCount {
    Dyadic value;
    Variant variant = Variant::Tilde;
    /// Set when d > 0 has no prime ≡ 3 mod 4, so β is only known to lie in
    /// [0, 1]; value is then f̃.
    bool beta_ambiguous = false;
};

struct AlphaBeta {
    int alpha = 0;
    int alpha_tilde = 0;
    bool beta_known = true;
};

AlphaBeta alpha_beta(const FundamentalDiscriminant& d);

/// Lemmermeyer's condition on a coprime factorization into fundamental
/// discriminants (or 1).
/// @throws ValidationError on non-coprime, non-fundamental, or a
/// non-fundamental product.
bool admissible_h8(std::int64_t d1, std::int64_t d2, std::int64_t d3);

/// Unordered factorizations with all three blocks != 1, canonical order
/// (blocks sorted by their smallest factor index).
std::vector<TriFactorization> nontrivial_factorizations(const FundamentalDiscriminant& d);

/// The admissible members of nontrivial_factorizations(d).
std::vector<TriFactorization> admissible_factorizations(const FundamentalDiscriminant& d);

/// Number of admissible nontrivial unordered factorizations.
std::uint64_t admissible_count(const FundamentalDiscriminant& d);

std::int64_t count_finite_unramified(const FundamentalDiscriminant& d);
Dyadic f_tilde(const FundamentalDiscriminant& d);
ExtensionCount f_everywhere(const FundamentalDiscriminant& d);
ExtensionCount surj_count(const FundamentalDiscriminant& d);
Dyadic count_d4(const FundamentalDiscriminant& d);

/// f1 − f2 + 2^{ω−4−α̃} evaluated from the expanded character sums.
/// @throws ValidationError for d = ±1, ±2 (and any non-fundamental d).
Dyadic f_via_character_sum(std::int64_t d);
Dyadic f_via_character_sum(const FundamentalDiscriminant& d);

/// The raw pieces of the character-sum route, for reporting.
struct CharacterSumParts {
    std::int64_t F1 = 0;  ///< Σ over ordered 6-slot factorizations
    std::int64_t F2 = 0;  ///< Σ over ordered 4-slot factorizations
    mpq_class f1, f2;     ///< f1 carries a 1/6 and need not be dyadic alone
    Dyadic correction, total;
};
CharacterSumParts character_sum_parts(const FundamentalDiscriminant& d);

/// f̃ under the looser reading of "nontrivial" (at most one block equal
/// to 1), for the Open Question on trivial factorizations.
Dyadic f_tilde_loose(const FundamentalDiscriminant& d);

/// True when the two readings of "nontrivial" give different f̃.
bool nontrivial_readings_diverge(const FundamentalDiscriminant& d);

}  // namespace h8
