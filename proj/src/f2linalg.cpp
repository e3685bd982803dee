#include "h8/f2linalg.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "h8/errors.hpp"

namespace h8 {

F2Matrix::F2Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), bits_(rows * ((cols + 63) / 64), 0) {}

F2Matrix F2Matrix::from_rows(const std::vector<std::string>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    F2Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw ValidationError("from_rows: ragged rows");
        for (std::size_t c = 0; c < cols; ++c) {
            if (rows[r][c] == '1') m.set(r, c);
            else if (rows[r][c] != '0') throw ValidationError("from_rows: expected '0' or '1'");
        }
    }
    return m;
}

void F2Matrix::set(std::size_t r, std::size_t c, bool v) {
    std::uint64_t& w = row(r)[c >> 6];
    const std::uint64_t b = 1ULL << (c & 63);
    w = v ? (w | b) : (w & ~b);
}

std::vector<std::uint8_t> F2Matrix::apply(const std::vector<std::uint32_t>& support) const {
    std::vector<std::uint8_t> out(rows_, 0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (auto c : support) out[r] ^= static_cast<std::uint8_t>(get(r, c));
    return out;
}

F2Matrix build_Mk(int k) {
    if (k < 1 || k > 12) throw CapacityError("build_Mk supports 1 <= k <= 12, got " + std::to_string(k));
    if (k == 1) {
        F2Matrix m(3, 3);
        for (int i = 0; i < 3; ++i) m.set(i, i);
        return m;
    }
    const F2Matrix sub = build_Mk(k - 1);
    const std::size_t third = sub.cols();
    F2Matrix m(3 + sub.rows(), 3 * third);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t j = 0; j < third; ++j) m.set(c, c * third + j);
    for (std::size_t r = 0; r < sub.rows(); ++r)
        for (std::size_t j = 0; j < third; ++j)
            if (sub.get(r, j))
                for (std::size_t c = 0; c < 3; ++c) m.set(3 + r, c * third + j);
    return m;
}

namespace {

// Reduced row echelon form in place; returns pivot columns in row order.
std::vector<std::size_t> rref(F2Matrix& m) {
    std::vector<std::size_t> piv;
    std::size_t r = 0;
    const std::size_t wpr = m.words_per_row();
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && !m.get(p, c)) ++p;
        if (p == m.rows()) continue;
        if (p != r) std::swap_ranges(m.row(p), m.row(p) + wpr, m.row(r));
        for (std::size_t q = 0; q < m.rows(); ++q) {
            if (q != r && m.get(q, c)) {
                std::uint64_t* dst = m.row(q);
                const std::uint64_t* src = m.row(r);
                for (std::size_t w = 0; w < wpr; ++w) dst[w] ^= src[w];
            }
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

}  // namespace

KernelResult rank_and_kernel(const F2Matrix& m) {
    F2Matrix a = m;
    KernelResult res;
    res.pivot_cols = rref(a);
    res.rank = res.pivot_cols.size();
    std::vector<char> is_piv(m.cols(), 0);
    for (auto c : res.pivot_cols) is_piv[c] = 1;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_piv[f]) continue;
        SparseF2Vector v;
        for (std::size_t r = 0; r < res.rank; ++r)
            if (a.get(r, f)) v.support.push_back(static_cast<std::uint32_t>(res.pivot_cols[r]));
        v.support.push_back(static_cast<std::uint32_t>(f));
        std::sort(v.support.begin(), v.support.end());
        res.basis.push_back(std::move(v));
    }
    return res;
}

std::optional<SparseF2Vector> solve(const F2Matrix& m, const std::vector<std::uint8_t>& b) {
    if (b.size() != m.rows()) throw ValidationError("solve: right-hand side has wrong length");
    F2Matrix aug(m.rows(), m.cols() + 1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m.get(r, c)) aug.set(r, c);
        if (b[r] & 1) aug.set(r, m.cols());
    }
    const auto piv = rref(aug);
    SparseF2Vector x;
    for (std::size_t r = 0; r < piv.size(); ++r) {
        if (piv[r] == m.cols()) return std::nullopt;
        if (aug.get(r, m.cols())) x.support.push_back(static_cast<std::uint32_t>(piv[r]));
    }
    std::sort(x.support.begin(), x.support.end());
    return x;
}

const std::vector<CaseTag>& all_cases() {
    static const std::vector<CaseTag> v = {CaseTag::NegOdd, CaseTag::Neg4Mod8, CaseTag::Neg0Mod8,
                                           CaseTag::PosOdd, CaseTag::Pos4Mod8, CaseTag::Pos0Mod8};
    return v;
}

std::string to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::NegOdd: return "neg-1mod4";
        case CaseTag::Neg4Mod8: return "neg-4mod8";
        case CaseTag::Neg0Mod8: return "neg-0mod8";
        case CaseTag::PosOdd: return "pos-1mod4";
        case CaseTag::Pos4Mod8: return "pos-4mod8";
        case CaseTag::Pos0Mod8: return "pos-0mod8";
    }
    return "?";
}

CaseTag parse_case(const std::string& name) {
    for (auto t : all_cases())
        if (to_string(t) == name) return t;
    throw ValidationError("unknown congruence case '" + name + "'");
}

CongruenceCase congruence_case(CaseTag tag) {
    switch (tag) {
        case CaseTag::NegOdd: return {tag, 4, "2^(3^k-k-1)"};
        case CaseTag::PosOdd: return {tag, 4, "2^(3^k-k-1)"};
        case CaseTag::Neg4Mod8: return {tag, 8, "2^(2*3^k-2k-1)*3^k"};
        case CaseTag::Neg0Mod8: return {tag, 8, "2^(2*3^k-2k)*3^k"};
        case CaseTag::Pos4Mod8: return {tag, 8, "2^(2*3^k-k-1)"};
        case CaseTag::Pos0Mod8: return {tag, 8, "2^(2*3^k)"};
    }
    throw std::logic_error("bad case tag");
}

Dyadic closed_form_value(CaseTag tag, int k) {
    if (k < 1 || k > 12) throw ValidationError("closed_form_value needs 1 <= k <= 12");
    long p3 = 1;
    for (int i = 0; i < k; ++i) p3 *= 3;
    switch (tag) {
        case CaseTag::NegOdd:
        case CaseTag::PosOdd: return Dyadic::pow2(static_cast<int>(p3 - k - 1));
        case CaseTag::Neg4Mod8: return Dyadic::pow2(static_cast<int>(2 * p3 - 2 * k - 1)) * Dyadic(p3);
        case CaseTag::Neg0Mod8: return Dyadic::pow2(static_cast<int>(2 * p3 - 2 * k)) * Dyadic(p3);
        case CaseTag::Pos4Mod8: return Dyadic::pow2(static_cast<int>(2 * p3 - k - 1));
        case CaseTag::Pos0Mod8: return Dyadic::pow2(static_cast<int>(2 * p3));
    }
    throw std::logic_error("bad case tag");
}

std::string type_word(const std::vector<TypeLetter>& s) {
    std::string w;
    for (auto t : s) w += t == TypeLetter::A ? 'A' : 'B';
    return w;
}

namespace {

bool is_mod8(CaseTag t) { return t != CaseTag::NegOdd && t != CaseTag::PosOdd; }
bool uses_J(CaseTag t) { return t == CaseTag::Neg4Mod8 || t == CaseTag::Neg0Mod8; }
bool zero_mod8(CaseTag t) { return t == CaseTag::Neg0Mod8 || t == CaseTag::Pos0Mod8; }

int digit(std::size_t col, int i, int k) {
    for (int j = k - 1; j > i; --j) col /= 3;
    return static_cast<int>(col % 3);
}

// Targets for the three pair rows of one coordinate; -1 marks the pair-0 row
// of the 0 mod 8 cases, fixed by the coset choice.
std::array<int, 3> pair_targets(CaseTag tag, int jsize) {
    const int odd = (jsize + 1) & 1;
    switch (tag) {
        case CaseTag::NegOdd: return {1, 0, 0};
        case CaseTag::PosOdd: return {0, 0, 0};
        case CaseTag::Neg4Mod8: return {odd, odd, 0};
        case CaseTag::Pos4Mod8: return {1, 0, 0};
        case CaseTag::Neg0Mod8: return {-1, odd, 0};
        case CaseTag::Pos0Mod8: return {-1, 0, 0};
    }
    return {0, 0, 0};
}

std::vector<std::vector<int>> subsets(int k) {
    std::vector<std::vector<int>> out;
    for (unsigned m = 0; m < (1U << k); ++m) {
        std::vector<int> s;
        for (int i = 0; i < k; ++i)
            if (m >> i & 1) s.push_back(i);
        out.push_back(std::move(s));
    }
    return out;
}

// One admissible coset x0 + span(basis) of the x-vectors.
struct Coset {
    std::uint32_t x0 = 0;
    std::vector<std::uint32_t> basis;
};

struct Conditions {
    std::vector<int> J;
    int coset;  // pair-0 bit for the 0 mod 8 cases
};

std::vector<Conditions> condition_list(CaseTag tag, int k, const std::vector<int>* J, int coset, bool free0) {
    std::vector<std::vector<int>> Js = J ? std::vector<std::vector<int>>{*J}
                                         : (uses_J(tag) ? subsets(k) : std::vector<std::vector<int>>{{}});
    std::vector<Conditions> out;
    for (auto& j : Js) {
        if (!zero_mod8(tag)) {
            out.push_back({j, 0});
        } else if (free0) {
            // Pair-0 bits chosen independently per coordinate, encoded as a mask.
            for (int c = 0; c < (1 << k); ++c) out.push_back({j, c});
        } else {
            for (int c = 0; c < 2; ++c)
                if (coset < 0 || coset == c) out.push_back({j, c ? (1 << k) - 1 : 0});
        }
    }
    return out;
}

std::uint64_t sat_pow2(int e) { return e >= 62 ? ~0ULL : (1ULL << e); }
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a && b > ~0ULL / a) return ~0ULL;
    return a * b;
}

void check_k(int k) {
    if (k < 1) throw ValidationError("k must be at least 1");
}

}  // namespace

std::uint64_t gamma_states_per_type(CaseTag tag, int k) {
    check_k(k);
    if (k > 12) return ~0ULL;
    long n = 1;
    for (int i = 0; i < k; ++i) n *= 3;
    const int dimker = static_cast<int>(n - 2 * k - 1);
    std::uint64_t per = sat_pow2(dimker);
    if (is_mod8(tag)) per = sat_mul(per, sat_pow2(static_cast<int>(std::min<long>(n, 62))));
    if (uses_J(tag)) per = sat_mul(per, 1ULL << k);
    if (zero_mod8(tag)) per = sat_mul(per, 2);
    return per;
}

namespace {

void require_budget(CaseTag tag, int k) {
    const std::uint64_t s = gamma_states_per_type(tag, k);
    if (s > kGammaBudget) {
        throw CapacityError("gamma enumeration for " + to_string(tag) + " at k=" + std::to_string(k) +
                            " needs more than 2^26 states per type");
    }
}

Coset coset_for(const F2Matrix& M, const KernelResult& ker, CaseTag tag, int k, const Conditions& cond, bool& empty) {
    std::vector<std::uint8_t> b(M.rows(), 0);
    const auto tg = pair_targets(tag, static_cast<int>(cond.J.size()));
    for (int i = 0; i < k; ++i) {
        for (int c = 0; c < 3; ++c) {
            int v = tg[c];
            if (v < 0) v = (cond.coset >> i) & 1;
            b[3 * i + c] = static_cast<std::uint8_t>(v);
        }
    }
    Coset cs;
    const auto x = solve(M, b);
    empty = !x;
    if (!x) return cs;
    for (auto c : x->support) cs.x0 |= 1U << c;
    for (const auto& v : ker.basis) {
        std::uint32_t m = 0;
        for (auto c : v.support) m |= 1U << c;
        cs.basis.push_back(m);
    }
    return cs;
}

template <typename F>
void for_each_in_coset(const Coset& cs, F&& fn) {
    std::uint32_t x = cs.x0;
    const std::size_t d = cs.basis.size();
    fn(x);
    for (std::uint64_t g = 1; g < (1ULL << d); ++g) {
        x ^= cs.basis[std::countr_zero(g)];
        fn(x);
    }
}

// h from (x, t): x = 0 -> {1, 5}, x = 1 -> {3, 7}; t = (h^2 - 1)/8 mod 2.
std::uint8_t lift(int x, int t) {
    if (!x) return t ? 5 : 1;
    return t ? 3 : 7;
}

}  // namespace

GammaResult gamma_sum_bruteforce(CaseTag tag, int k, const GammaOptions& opt) {
    check_k(k);
    require_budget(tag, k);
    const auto& T = linking_tables();
    const F2Matrix M = build_Mk(k);
    const KernelResult ker = rank_and_kernel(M);
    const int n = static_cast<int>(M.cols());
    const bool m8 = is_mod8(tag);
    static const int BM[3] = {0, 2, 4};
    static const int AM[3] = {3, 5, 1};
    static const int L1[6] = {0, 0, 1, 0, 1, 0};  // λ¹ = {2, 4}
    static const int L2[6] = {1, 0, 0, 0, 1, 0};  // λ² = {0, 4}
    auto Q = [](int a) { return (a == 0 || a == 3) ? 0 : 1; };

    const auto conds = condition_list(tag, k, nullptr, -1, opt.zero_mod8_free && zero_mod8(tag));
    std::vector<Coset> cosets;
    std::vector<char> empties;
    for (const auto& c : conds) {
        bool e = false;
        cosets.push_back(coset_for(M, ker, tag, k, c, e));
        empties.push_back(e);
    }

    GammaResult res;
    for (unsigned sm = 0; sm < (1U << k); ++sm) {
        std::vector<TypeLetter> s(k);
        for (int i = 0; i < k; ++i) s[i] = (sm >> (k - 1 - i) & 1) ? TypeLetter::B : TypeLetter::A;
        std::vector<std::array<int, 12>> U(n);
        for (int a = 0; a < n; ++a)
            for (int i = 0; i < k; ++i) U[a][i] = (s[i] == TypeLetter::B ? BM : AM)[digit(a, i, k)];

        std::vector<std::uint32_t> up(n, 0);
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                int ab = 0, ba = 0;
                for (int i = 0; i < k; ++i) {
                    ab += T.phi[U[a][i]][U[b][i]];
                    ba += T.phi[U[b][i]][U[a][i]];
                }
                const int bit = opt.ordered_pairs ? (ab + ba) & 1 : ab & 1;
                if (bit) up[a] |= 1U << b;
            }
        }
        auto linear_mask = [&](auto&& weight) {
            std::uint32_t m = 0;
            for (int a = 0; a < n; ++a) {
                int w = 0;
                for (int i = 0; i < k; ++i) w += weight(i, U[a][i]);
                if (w & 1) m |= 1U << a;
            }
            return m;
        };
        // Per-C masks for the lift exponent.
        std::vector<std::uint32_t> tmask;
        if (m8) {
            for (unsigned C = 0; C < (1U << k); ++C) {
                tmask.push_back(linear_mask([&](int i, int u) {
                    int w = (C >> i & 1) ? Q(u) : 0;
                    if (tag == CaseTag::Neg0Mod8) w += L1[u];
                    if (tag == CaseTag::Pos0Mod8) w += T.lambda[u];
                    return w;
                }));
            }
        }

        Dyadic g(0);
        for (std::size_t ci = 0; ci < conds.size(); ++ci) {
            if (empties[ci]) continue;
            const auto& J = conds[ci].J;
            std::uint32_t lin = 0;
            if (tag == CaseTag::NegOdd) lin = linear_mask([&](int, int u) { return int(T.lambda[u]); });
            if (uses_J(tag)) {
                lin = linear_mask([&](int i, int u) {
                    return std::find(J.begin(), J.end(), i) != J.end() ? L1[u] : L2[u];
                });
            }
            long long acc = 0;
            for_each_in_coset(cosets[ci], [&](std::uint32_t x) {
                int e = std::popcount(x & lin);
                for (std::uint32_t r = x; r; r &= r - 1) {
                    const int a = std::countr_zero(r);
                    e += std::popcount(x & up[a]);
                }
                const int sign = (e & 1) ? -1 : 1;
                if (!m8) {
                    acc += sign;
                    ++res.states;
                    return;
                }
                long long inner = 0;
                for (std::uint64_t t = 0; t < (1ULL << n); ++t) {
                    for (auto tm : tmask) inner += (std::popcount(static_cast<std::uint32_t>(t) & tm) & 1) ? -1 : 1;
                    ++res.states;
                }
                acc += sign * inner;
            });
            g += Dyadic(mpz_class(static_cast<long>(acc)), static_cast<unsigned>(J.size()));
        }
        res.per_U[type_word(s)] = g;
        res.total += g;
    }
    return res;
}

void enumerate_congruence_tuples(CaseTag tag, int k, const std::vector<TypeLetter>& s,
                                 const std::function<void(const std::vector<std::uint8_t>&)>& fn,
                                 const std::vector<int>& J, int coset) {
    check_k(k);
    if (static_cast<int>(s.size()) != k) throw ValidationError("type word length must equal k");
    for (int j : J)
        if (j < 0 || j >= k) throw ValidationError("J entries must lie in 0..k-1");
    if (coset < -1 || coset > 1) throw ValidationError("coset must be -1, 0 or 1");
    require_budget(tag, k);
    const F2Matrix M = build_Mk(k);
    const KernelResult ker = rank_and_kernel(M);
    const int n = static_cast<int>(M.cols());
    const bool m8 = is_mod8(tag);
    std::vector<std::uint8_t> h(n);
    for (const auto& cond : condition_list(tag, k, &J, coset, false)) {
        bool empty = false;
        const Coset cs = coset_for(M, ker, tag, k, cond, empty);
        if (empty) continue;
        for_each_in_coset(cs, [&](std::uint32_t x) {
            if (!m8) {
                for (int a = 0; a < n; ++a) h[a] = (x >> a & 1) ? 3 : 1;
                fn(h);
                return;
            }
            for (std::uint64_t t = 0; t < (1ULL << n); ++t) {
                for (int a = 0; a < n; ++a) h[a] = lift(x >> a & 1, static_cast<int>(t >> a & 1));
                fn(h);
            }
        });
    }
}

bool satisfies_conditions(CaseTag tag, int k, const std::vector<std::uint8_t>& h, const std::vector<int>& J,
                          int coset) {
    check_k(k);
    long n = 1;
    for (int i = 0; i < k; ++i) n *= 3;
    if (static_cast<long>(h.size()) != n) return false;
    const int mod = congruence_case(tag).modulus;
    for (auto v : h)
        if (v % 2 == 0 || v >= mod) return false;
    const int odd = (static_cast<int>(J.size()) + 1) & 1;
    int first0 = -1;
    for (int i = 0; i < k; ++i) {
        int prod[3] = {1, 1, 1};
        for (long a = 0; a < n; ++a) {
            long q = a;
            for (int j = k - 1; j > i; --j) q /= 3;
            const int c = static_cast<int>(q % 3);
            prod[c] = (prod[c] * h[a]) % 4;
        }
        // want[c]: 1 means the block product is −1 mod 4.
        int want[3] = {0, 0, 0};
        switch (tag) {
            case CaseTag::NegOdd:
            case CaseTag::Pos4Mod8: want[0] = 1, want[1] = 0, want[2] = 0; break;
            case CaseTag::PosOdd: want[0] = want[1] = want[2] = 0; break;
            case CaseTag::Neg4Mod8: want[0] = odd, want[1] = odd, want[2] = 0; break;
            case CaseTag::Neg0Mod8: want[0] = -1, want[1] = odd, want[2] = 0; break;
            case CaseTag::Pos0Mod8: want[0] = -1, want[1] = 0, want[2] = 0; break;
        }
        for (int c = 0; c < 3; ++c) {
            const int got = prod[c] == 3 ? 1 : 0;
            if (want[c] >= 0) {
                if (got != want[c]) return false;
            } else if (coset >= 0) {
                if (got != coset) return false;
            } else {
                if (first0 < 0) first0 = got;
                if (got != first0) return false;
            }
        }
    }
    return true;
}

}  // namespace h8
