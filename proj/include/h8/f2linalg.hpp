/// @file f2linalg.hpp
/// GF(2) matrices, the recursive matrix M_k and brute-force γ sums over
/// congruence tuples attached to maximal unlinked sets.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "h8/dyadic.hpp"
#include "h8/linking.hpp"

namespace h8 {

class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(std::size_t rows, std::size_t cols);
    /// Rows as strings of '0'/'1'; all rows the same length.
    static F2Matrix from_rows(const std::vector<std::string>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return wpr_; }

    bool get(std::size_t r, std::size_t c) const { return (row(r)[c >> 6] >> (c & 63)) & 1U; }
    void set(std::size_t r, std::size_t c, bool v = true);
    std::uint64_t* row(std::size_t r) { return bits_.data() + r * wpr_; }
    const std::uint64_t* row(std::size_t r) const { return bits_.data() + r * wpr_; }

    /// M·v for v given by its support.
    std::vector<std::uint8_t> apply(const std::vector<std::uint32_t>& support) const;

    friend bool operator==(const F2Matrix&, const F2Matrix&) = default;

private:
    std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// M_1 = I_3; M_k stacks the indicator rows of the three column thirds over
/// [M_{k-1} M_{k-1} M_{k-1}]. Column index = Σ c_i 3^{k-i}, c_1 most significant.
/// @throws CapacityError unless 1 <= k <= 12.
F2Matrix build_Mk(int k);

/// Kernel vectors are kept as support lists: a dense basis for M_10 would
/// need roughly half a gigabyte.
struct SparseF2Vector {
    std::vector<std::uint32_t> support;  // sorted column indices
};

struct KernelResult {
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_cols;
    std::vector<SparseF2Vector> basis;
};

KernelResult rank_and_kernel(const F2Matrix& m);

/// Some x with M·x = b, or nothing when b is outside the image.
std::optional<SparseF2Vector> solve(const F2Matrix& m, const std::vector<std::uint8_t>& b);

enum class CaseTag { NegOdd, Neg4Mod8, Neg0Mod8, PosOdd, Pos4Mod8, Pos0Mod8 };

struct CongruenceCase {
    CaseTag tag;
    int modulus;
    std::string closed_form;
};

CongruenceCase congruence_case(CaseTag tag);
const std::vector<CaseTag>& all_cases();
std::string to_string(CaseTag tag);
/// Accepts "neg-1mod4", "neg-4mod8", "neg-0mod8", "pos-1mod4", "pos-4mod8", "pos-0mod8".
CaseTag parse_case(const std::string& name);

/// The closed form as stated (for Pos0Mod8, the value implied by the final
/// constant). Exact, k >= 1.
Dyadic closed_form_value(CaseTag tag, int k);

struct GammaOptions {
    /// Quadratic exponent over ordered pairs a != b instead of a < b.
    bool ordered_pairs = false;
    /// For the 0 mod 8 cases, let the pair-0 block products vary per
    /// coordinate instead of forcing them equal.
    bool zero_mod8_free = false;
};

struct GammaResult {
    std::map<std::string, Dyadic> per_U;  // keyed by type word, e.g. "AB"
    Dyadic total;
    std::uint64_t states = 0;             // congruence states visited
};

inline constexpr std::uint64_t kGammaBudget = 1ULL << 26;

/// States enumerated per type for (case, k), saturating.
std::uint64_t gamma_states_per_type(CaseTag tag, int k);

/// @throws CapacityError when gamma_states_per_type exceeds kGammaBudget.
GammaResult gamma_sum_bruteforce(CaseTag tag, int k, const GammaOptions& opt = {});

/// Streams the residues (h_u mod modulus), ordered like the columns of M_k,
/// for the members of U_s. `J` selects the conditions of the 4 and 0 mod 8
/// negative cases (default: empty); `coset` fixes the pair-0 products of the
/// 0 mod 8 cases to 0 or 1 (default: both).
/// @throws CapacityError as gamma_sum_bruteforce.
void enumerate_congruence_tuples(CaseTag tag, int k, const std::vector<TypeLetter>& s,
                                 const std::function<void(const std::vector<std::uint8_t>&)>& fn,
                                 const std::vector<int>& J = {}, int coset = -1);

/// Checks the block-product conditions directly from the residues. The
/// conditions only see the pair index of each member, not the type.
bool satisfies_conditions(CaseTag tag, int k, const std::vector<std::uint8_t>& h,
                          const std::vector<int>& J = {}, int coset = -1);

std::string type_word(const std::vector<TypeLetter>& s);

}  // namespace h8
