#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace h8 {

// Φ(u,v) = 1 iff the symbol (D_u/D_v) occurs in the expanded f1 sum:
//   (D0D3D2D5 / D4)  -> (0,4) (3,4) (2,4) (5,4)
//   (D2D5D4D1 / D0)  -> (2,0) (5,0) (4,0) (1,0)
//   (D4D1D0D3 / D2)  -> (4,2) (1,2) (0,2) (3,2)
// λ(u) = 1 iff (−1/D_u) occurs: u = 2, 4.
// Ψ from the f2 sum: (E2E3 / E0) -> (2,0) (3,0); (E0E1 / E2) -> (0,2) (1,2).
// γ_ind(u) = 1 iff (−1/E_u) occurs: u = 2.
struct LinkingTables {
    std::array<std::array<std::uint8_t, 6>, 6> phi{};
    std::array<std::array<std::uint8_t, 4>, 4> psi{};
    std::array<std::uint8_t, 6> lambda{};
    std::array<std::uint8_t, 4> gamma_ind{};
};

const LinkingTables& linking_tables();

struct Shape {
    int j1 = 0;
    int j2 = 0;
    friend bool operator==(const Shape&, const Shape&) = default;
};

struct IndexTuple {
    Shape shape;
    std::vector<std::uint8_t> coords;  // j1 entries in 0..5, then j2 in 0..3

    friend bool operator==(const IndexTuple&, const IndexTuple&) = default;
    friend auto operator<=>(const IndexTuple& a, const IndexTuple& b) { return a.coords <=> b.coords; }
};

IndexTuple make_tuple(Shape shape, std::vector<std::uint8_t> coords);

bool linked(const IndexTuple& u, const IndexTuple& v);

// Per-coordinate contribution to the linking parity.
int link_bit_y1(int a, int b);
int link_bit_y2(int a, int b);

enum class TypeLetter { A, B };  // A = {1,3,5}, B = {0,2,4}

struct UnlinkedSet {
    std::vector<IndexTuple> members;
    bool is_maximum = false;
    std::optional<std::vector<TypeLetter>> type_tag;
};

std::array<std::uint8_t, 3> type_members(TypeLetter t);

// U_s × W. W holds tuples of shape (0, j2); an empty W means {()}.
UnlinkedSet type_set(const std::vector<TypeLetter>& s, const std::vector<IndexTuple>& W = {});

// Every tuple of the given shape in lexicographic order.
std::vector<IndexTuple> all_tuples(Shape shape);

struct ExhaustiveResult {
    std::size_t max_size = 0;
    std::vector<UnlinkedSet> maximum_sets;
};

// Complete list of maximum unlinked sets. Budget: 6^j1·4^j2 <= 64.
ExhaustiveResult max_unlinked_exhaustive(int j1, int j2);

// Unordered pairs {a,b} of Y2 linked by the Ψ table.
std::vector<std::array<int, 2>> y2_linked_pairs_from_table();
// The pairs given in the prose of the maximal-set proof.
std::vector<std::array<int, 2>> y2_linked_pairs_from_prose();

struct TypeStructureReport {
    Shape shape;
    std::size_t candidate_count = 0;
    std::size_t candidate_size = 0;
    std::size_t expected_size = 0;     // 3^j1 · 2^j2
    std::size_t expected_count = 0;    // 2^j1 · #(maximum unlinked sets of Y2^j2)
    bool count_checked = true;         // false when j2 > 3
    bool all_unlinked = true;
    bool all_maximal = true;
    bool direct_check = false;         // pairwise/outside scan done literally
    std::vector<std::string> notes;
    bool ok() const {
        return all_unlinked && all_maximal && candidate_size == expected_size &&
               candidate_count == expected_count;
    }
};

// Constructive check of the V×W description for j1, j2 <= 6. V runs over the
// type sets; W over all maximum unlinked sets of Y2^j2 for j2 <= 3 and over
// product sets beyond that.
TypeStructureReport verify_type_structure(int j1, int j2);

std::string to_string(const IndexTuple& t);

}  // namespace h8
