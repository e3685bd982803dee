#include "h8/h8count.hpp"

#include <bit>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "h8/errors.hpp"
#include "h8/linking.hpp"

namespace h8 {

namespace {

// sym[j] has bit i set when (P_i / p_j) = −1, where P_i is the i-th prime
// discriminant and p_j the rational prime of factor j.
std::vector<std::uint32_t> symbol_masks(const FundamentalDiscriminant& d) {
    const int w = d.omega;
    std::vector<std::uint32_t> sym(w, 0);
    for (int j = 0; j < w; ++j) {
        for (int i = 0; i < w; ++i) {
            if (i != j && kronecker(d.factors[i], d.primes[j]) < 0) sym[j] |= 1U << i;
        }
    }
    return sym;
}

// Every p in every block sees the product of the other two blocks as a square.
bool admissible_masks(const std::vector<std::uint32_t>& sym, const std::uint32_t block_mask[3],
                      const std::vector<std::uint8_t>& blocks) {
    for (std::size_t j = 0; j < sym.size(); ++j) {
        std::uint32_t others = ~block_mask[blocks[j]];
        if (std::popcount(sym[j] & others) & 1) return false;
    }
    return true;
}

// Restricted-growth enumeration of set partitions into exactly `parts`
// nonempty blocks (parts = 2 or 3).
template <typename F>
void for_each_partition(int w, int parts, F&& fn) {
    if (w < parts) return;
    std::vector<std::uint8_t> b(w, 0);
    auto rec = [&](auto&& self, int i, int mx) -> void {
        if (w - i < parts - 1 - mx) return;
        if (i == w) {
            if (mx == parts - 1) fn(b);
            return;
        }
        for (int c = 0; c <= mx + 1 && c < parts; ++c) {
            b[i] = static_cast<std::uint8_t>(c);
            self(self, i + 1, std::max(mx, c));
        }
    };
    b[0] = 0;
    rec(rec, 1, 0);
}

void masks_of(const std::vector<std::uint8_t>& blocks, std::uint32_t out[3]) {
    out[0] = out[1] = out[2] = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) out[blocks[i]] |= 1U << i;
}

TriFactorization make_tri(const FundamentalDiscriminant& d, const std::vector<std::uint8_t>& blocks) {
    TriFactorization t;
    t.blocks = blocks;
    for (std::size_t i = 0; i < blocks.size(); ++i) t.d[blocks[i]] *= d.factors[i];
    return t;
}

std::vector<std::int64_t> rational_primes(std::int64_t v) {
    std::vector<std::int64_t> out;
    std::int64_t n = std::llabs(v);
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace

AlphaBeta alpha_beta(const FundamentalDiscriminant& d) {
    AlphaBeta ab;
    const bool pos = d.value > 0;
    const bool p3 = d.has_prime_3mod4();
    ab.alpha = (pos && p3) ? 1 : 0;
    ab.alpha_tilde = pos ? 1 : 0;
    ab.beta_known = !pos || p3;
    return ab;
}

bool admissible_h8(std::int64_t d1, std::int64_t d2, std::int64_t d3) {
    const std::int64_t ds[3] = {d1, d2, d3};
    for (auto x : ds) {
        if (x != 1 && !is_fundamental(x)) {
            throw ValidationError(std::to_string(x) + " is neither 1 nor a fundamental discriminant");
        }
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            if (std::gcd(ds[i], ds[j]) != 1) {
                throw ValidationError("blocks " + std::to_string(ds[i]) + " and " + std::to_string(ds[j]) +
                                      " are not coprime");
            }
        }
    }
    __int128 prod = static_cast<__int128>(d1) * d2 * d3;
    if (prod > INT64_MAX || prod < INT64_MIN || !is_fundamental(static_cast<std::int64_t>(prod))) {
        throw ValidationError("product of blocks is not a fundamental discriminant");
    }
    for (int i = 0; i < 3; ++i) {
        const std::int64_t other = ds[(i + 1) % 3] * ds[(i + 2) % 3];
        for (auto p : rational_primes(ds[i])) {
            if (kronecker(other, p) != 1) return false;
        }
    }
    return true;
}

std::vector<TriFactorization> nontrivial_factorizations(const FundamentalDiscriminant& d) {
    std::vector<TriFactorization> out;
    for_each_partition(d.omega, 3, [&](const std::vector<std::uint8_t>& b) { out.push_back(make_tri(d, b)); });
    return out;
}

std::vector<TriFactorization> admissible_factorizations(const FundamentalDiscriminant& d) {
    std::vector<TriFactorization> out;
    const auto sym = symbol_masks(d);
    std::uint32_t bm[3];
    for_each_partition(d.omega, 3, [&](const std::vector<std::uint8_t>& b) {
        masks_of(b, bm);
        if (admissible_masks(sym, bm, b)) out.push_back(make_tri(d, b));
    });
    return out;
}

std::uint64_t admissible_count(const FundamentalDiscriminant& d) {
    if (d.omega < 3) return 0;
    const auto sym = symbol_masks(d);
    std::uint64_t n = 0;
    std::uint32_t bm[3];
    for_each_partition(d.omega, 3, [&](const std::vector<std::uint8_t>& b) {
        masks_of(b, bm);
        if (admissible_masks(sym, bm, b)) ++n;
    });
    return n;
}

std::int64_t count_finite_unramified(const FundamentalDiscriminant& d) {
    const std::uint64_t n = admissible_count(d);
    if (n == 0) return 0;
    return static_cast<std::int64_t>(n) << (d.omega - 3);
}

Dyadic f_tilde(const FundamentalDiscriminant& d) {
    // Σ Π(1 + (·/p)) contributes 2^ω per admissible factorization.
    const std::uint64_t n = admissible_count(d);
    Dyadic sum(mpz_class(static_cast<unsigned long>(n)) << d.omega, 0);
    return sum.scaled(-3 - alpha_beta(d).alpha_tilde);
}

ExtensionCount f_everywhere(const FundamentalDiscriminant& d) {
    const AlphaBeta ab = alpha_beta(d);
    ExtensionCount c;
    c.variant = Variant::Everywhere;
    if (!ab.beta_known) {
        c.value = f_tilde(d);
        c.beta_ambiguous = true;
        return c;
    }
    const std::uint64_t n = admissible_count(d);
    c.value = Dyadic(mpz_class(static_cast<unsigned long>(n)) << d.omega, 0).scaled(-3 - ab.alpha);
    return c;
}

ExtensionCount surj_count(const FundamentalDiscriminant& d) {
    ExtensionCount c = f_everywhere(d);
    c.value = c.value.scaled(3);
    return c;
}

Dyadic count_d4(const FundamentalDiscriminant& d) {
    // Each surviving ordered assignment contributes 2^{ω−4}: the 2^{ω(d_i)−1}
    // weights, the 1/2, the 1/2^ω and the (1 + 1) factors collapse.
    const int w = d.omega;
    const auto sym = symbol_masks(d);
    std::uint64_t nassign = 1;
    for (int i = 0; i < w; ++i) nassign *= 3;
    std::uint64_t hits = 0;
    std::vector<std::uint8_t> b(w, 0);
    for (std::uint64_t code = 0; code < nassign; ++code) {
        std::uint64_t c = code;
        std::uint32_t bm[3] = {0, 0, 0};
        for (int i = 0; i < w; ++i) {
            b[i] = static_cast<std::uint8_t>(c % 3);
            c /= 3;
            bm[b[i]] |= 1U << i;
        }
        bool ok = true;
        for (int j = 0; j < w && ok; ++j) {
            if (b[j] == 2) continue;
            ok = !(std::popcount(sym[j] & bm[b[j] == 0 ? 1 : 0]) & 1);
        }
        hits += ok;
    }
    return Dyadic(mpz_class(static_cast<unsigned long>(hits)), 0).scaled(w - 4);
}

namespace {

struct SlotState {
    int r = 0;                      // number of odd primes
    std::vector<std::int64_t> q;    // odd primes
    std::vector<std::vector<int>> jac;  // jac[a][b] = (q_a / q_b)
    std::int64_t P2 = 0;            // even prime discriminant, 0 if none
    bool negative = false;
};

int mul8(int a, int b) { return (a * b) & 7; }
int chi4(int r8) { return (r8 & 3) == 1 ? 1 : -1; }

// Enumerate assignments of odd primes to `slots` positions; at each leaf call
// leaf(residues mod 8 per slot, product of the table symbols).
template <std::size_t S, typename Table, typename Leaf>
void slot_dfs(const SlotState& st, const Table& tab, Leaf&& leaf) {
    std::array<int, S> res;
    res.fill(1);
    std::vector<int> where(st.r, 0);
    auto rec = [&](auto&& self, int a, int sign) -> void {
        if (a == st.r) {
            leaf(res, sign);
            return;
        }
        for (int s = 0; s < static_cast<int>(S); ++s) {
            int sg = sign;
            for (int b = 0; b < a; ++b) {
                const int t = where[b];
                if (tab[s][t]) sg *= st.jac[a][b];
                if (tab[t][s]) sg *= st.jac[b][a];
            }
            where[a] = s;
            const int old = res[s];
            res[s] = mul8(old, static_cast<int>(st.q[a] & 7));
            self(self, a + 1, sg);
            res[s] = old;
        }
    };
    rec(rec, 0, 1);
}

SlotState slot_state(const FundamentalDiscriminant& d) {
    SlotState st;
    st.negative = d.value < 0;
    for (std::size_t i = 0; i < d.primes.size(); ++i) {
        if (d.primes[i] == 2) {
            st.P2 = d.factors[i];
        } else {
            st.q.push_back(d.primes[i]);
        }
    }
    st.r = static_cast<int>(st.q.size());
    st.jac.assign(st.r, std::vector<int>(st.r, 1));
    for (int a = 0; a < st.r; ++a) {
        for (int b = 0; b < st.r; ++b) {
            if (a != b) st.jac[a][b] = jacobi(st.q[a], st.q[b]);
        }
    }
    return st;
}

}  // namespace

CharacterSumParts character_sum_parts(const FundamentalDiscriminant& d) {
    const SlotState st = slot_state(d);
    const auto& T = linking_tables();
    const int want_neg = st.negative ? 1 : 0;
    const int p2sign = st.P2 < 0 ? -1 : 1;
    const int nb2 = st.P2 ? 3 : 1;

    // f1: blocks (D0 D3), (D2 D5), (D4 D1); divisor slots 0, 2, 4.
    std::int64_t F1 = 0;
    slot_dfs<6>(st, T.phi, [&](const std::array<int, 6>& r, int sign) {
        const int nb[3] = {mul8(r[0], r[3]), mul8(r[2], r[5]), mul8(r[4], r[1])};
        const int eta[3] = {chi4(nb[0]), chi4(nb[1]), chi4(nb[2])};
        for (int b2 = 0; b2 < nb2; ++b2) {
            int neg = 0;
            for (int i = 0; i < 3; ++i) {
                int s = eta[i] * ((st.P2 && b2 == i) ? p2sign : 1);
                neg += s < 0;
            }
            if (neg != want_neg) continue;
            std::int64_t term = sign;
            for (int i = 0; i < 3; ++i) {
                const int j = (i + 1) % 3, k = (i + 2) % 3;
                std::int64_t rest = eta[j] * eta[k];
                if (st.P2 && (b2 == j || b2 == k)) rest *= st.P2;
                term *= kronecker(rest, r[2 * i]);
            }
            if (st.P2) {
                const int j = (b2 + 1) % 3, k = (b2 + 2) % 3;
                const int x = (eta[j] * eta[k] * mul8(nb[j], nb[k]) + 8) & 7;
                term *= 1 + kronecker(x, 2);
            }
            F1 += term;
        }
    });

    // f2: blocks (E0 E1), (E2 E3); divisor slots 0, 2.
    std::int64_t F2 = 0;
    const int nb2b = st.P2 ? 2 : 1;
    slot_dfs<4>(st, T.psi, [&](const std::array<int, 4>& r, int sign) {
        const int nb[2] = {mul8(r[0], r[1]), mul8(r[2], r[3])};
        const int eta[2] = {chi4(nb[0]), chi4(nb[1])};
        for (int b2 = 0; b2 < nb2b; ++b2) {
            int neg = 0;
            for (int i = 0; i < 2; ++i) {
                int s = eta[i] * ((st.P2 && b2 == i) ? p2sign : 1);
                neg += s < 0;
            }
            if (neg != want_neg) continue;
            std::int64_t term = sign;
            for (int i = 0; i < 2; ++i) {
                std::int64_t rest = eta[1 - i];
                if (st.P2 && b2 == 1 - i) rest *= st.P2;
                term *= kronecker(rest, r[2 * i]);
            }
            if (st.P2) {
                const int x = (eta[1 - b2] * nb[1 - b2] + 8) & 7;
                term *= 1 + kronecker(x, 2);
            }
            F2 += term;
        }
    });

    const int at = d.value > 0 ? 1 : 0;
    CharacterSumParts out;
    out.F1 = F1;
    out.F2 = F2;
    mpq_class pre(1, 1);
    pre /= mpz_class(1) << (3 + at);
    out.f1 = pre * mpq_class(F1, 6);
    out.f2 = pre * mpq_class(F2, 2);
    out.f1.canonicalize();
    out.f2.canonicalize();
    out.correction = Dyadic::pow2(d.omega - 4 - at);
    const std::int64_t diff = F1 - 3 * F2;
    if (diff % 6 != 0) {
        throw std::logic_error("character sum for " + std::to_string(d.value) + " is not divisible by 6");
    }
    out.total = Dyadic(mpz_class(static_cast<long>(diff / 6)), 0).scaled(-3 - at) + out.correction;
    return out;
}

Dyadic f_via_character_sum(const FundamentalDiscriminant& d) {
    if (std::llabs(d.value) <= 2) throw ValidationError("character sum needs |d| > 2");
    return character_sum_parts(d).total;
}

Dyadic f_via_character_sum(std::int64_t d) {
    if (std::llabs(d) <= 2) throw ValidationError("character sum needs |d| > 2");
    return f_via_character_sum(make_discriminant(d));
}

Dyadic f_tilde_loose(const FundamentalDiscriminant& d) {
    const auto sym = symbol_masks(d);
    std::uint64_t n = admissible_count(d);
    std::uint32_t bm[3];
    for_each_partition(d.omega, 2, [&](const std::vector<std::uint8_t>& b) {
        masks_of(b, bm);
        bm[2] = 0;
        if (admissible_masks(sym, bm, b)) ++n;
    });
    return Dyadic(mpz_class(static_cast<unsigned long>(n)) << d.omega, 0).scaled(-3 - alpha_beta(d).alpha_tilde);
}

bool nontrivial_readings_diverge(const FundamentalDiscriminant& d) { return f_tilde_loose(d) != f_tilde(d); }

}  // namespace h8
