#include "h8/linking.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <set>
#include <sstream>

#include "h8/errors.hpp"

namespace h8 {

namespace {

LinkingTables build_tables() {
    LinkingTables t;
    const int phi[][2] = {{0, 4}, {3, 4}, {2, 4}, {5, 4}, {2, 0}, {5, 0},
                          {4, 0}, {1, 0}, {4, 2}, {1, 2}, {0, 2}, {3, 2}};
    for (const auto& p : phi) t.phi[p[0]][p[1]] = 1;
    const int psi[][2] = {{2, 0}, {3, 0}, {0, 2}, {1, 2}};
    for (const auto& p : psi) t.psi[p[0]][p[1]] = 1;
    t.lambda[2] = t.lambda[4] = 1;
    t.gamma_ind[2] = 1;
    return t;
}

std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Per-coordinate adjacency as bitmasks over the coordinate alphabet.
std::array<std::uint8_t, 6> y1_adj() {
    std::array<std::uint8_t, 6> a{};
    for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 6; ++y)
            if (link_bit_y1(x, y)) a[x] |= 1U << y;
    return a;
}

std::array<std::uint8_t, 4> y2_adj() {
    std::array<std::uint8_t, 4> a{};
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
            if (link_bit_y2(x, y)) a[x] |= 1U << y;
    return a;
}

// Maximal unlinked subsets of a single coordinate alphabet of size n.
std::vector<std::uint8_t> maximal_coordinate_sets(int n, const std::uint8_t* adj) {
    std::vector<std::uint8_t> out;
    for (unsigned m = 1; m < (1U << n); ++m) {
        bool indep = true;
        for (int x = 0; x < n && indep; ++x)
            if ((m >> x & 1) && (adj[x] & m)) indep = false;
        if (!indep) continue;
        bool maximal = true;
        for (int x = 0; x < n && maximal; ++x)
            if (!(m >> x & 1) && !(adj[x] & m)) maximal = false;
        if (maximal) out.push_back(static_cast<std::uint8_t>(m));
    }
    return out;
}

std::vector<IndexTuple> product_members(Shape shape, const std::vector<std::uint8_t>& masks) {
    const int n = shape.j1 + shape.j2;
    std::vector<std::vector<std::uint8_t>> opts(n);
    for (int i = 0; i < n; ++i) {
        const int alpha = i < shape.j1 ? 6 : 4;
        for (int a = 0; a < alpha; ++a)
            if (masks[i] >> a & 1) opts[i].push_back(static_cast<std::uint8_t>(a));
    }
    std::vector<IndexTuple> out;
    IndexTuple cur{shape, std::vector<std::uint8_t>(n, 0)};
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (auto a : opts[i]) {
            cur.coords[i] = a;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

std::vector<std::array<int, 2>> linked_pairs(int n, const std::function<int(int, int)>& bit) {
    std::vector<std::array<int, 2>> out;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (bit(a, b)) out.push_back({a, b});
    return out;
}

}  // namespace

const LinkingTables& linking_tables() {
    static const LinkingTables t = build_tables();
    return t;
}

IndexTuple make_tuple(Shape shape, std::vector<std::uint8_t> coords) {
    if (shape.j1 < 0 || shape.j2 < 0) throw ValidationError("negative shape");
    if (static_cast<int>(coords.size()) != shape.j1 + shape.j2) {
        throw ValidationError("tuple length does not match shape");
    }
    for (int i = 0; i < static_cast<int>(coords.size()); ++i) {
        const int lim = i < shape.j1 ? 6 : 4;
        if (coords[i] >= lim) throw ValidationError("tuple entry out of range");
    }
    return IndexTuple{shape, std::move(coords)};
}

int link_bit_y1(int a, int b) {
    const auto& t = linking_tables();
    return (t.phi[a][b] + t.phi[b][a]) & 1;
}

int link_bit_y2(int a, int b) {
    const auto& t = linking_tables();
    return (t.psi[a][b] + t.psi[b][a]) & 1;
}

bool linked(const IndexTuple& u, const IndexTuple& v) {
    if (!(u.shape == v.shape) || u.coords.size() != v.coords.size()) {
        throw ValidationError("linked: shape mismatch");
    }
    int par = 0;
    for (int i = 0; i < static_cast<int>(u.coords.size()); ++i) {
        par ^= i < u.shape.j1 ? link_bit_y1(u.coords[i], v.coords[i]) : link_bit_y2(u.coords[i], v.coords[i]);
    }
    return par != 0;
}

std::array<std::uint8_t, 3> type_members(TypeLetter t) {
    if (t == TypeLetter::A) return {1, 3, 5};
    return {0, 2, 4};
}

UnlinkedSet type_set(const std::vector<TypeLetter>& s, const std::vector<IndexTuple>& W) {
    const int j1 = static_cast<int>(s.size());
    const int j2 = W.empty() ? 0 : W.front().shape.j1 + W.front().shape.j2;
    for (const auto& w : W) {
        if (w.shape.j1 != 0 || static_cast<int>(w.coords.size()) != j2) {
            throw ValidationError("type_set: W must hold tuples of shape (0, j2)");
        }
    }
    const Shape shape{j1, j2};
    std::vector<std::uint8_t> masks(j1, 0);
    for (int i = 0; i < j1; ++i)
        for (auto a : type_members(s[i])) masks[i] |= 1U << a;
    UnlinkedSet out;
    out.type_tag = s;
    for (const auto& v : product_members(Shape{j1, 0}, masks)) {
        if (W.empty()) {
            out.members.push_back(IndexTuple{shape, v.coords});
            continue;
        }
        for (const auto& w : W) {
            IndexTuple t{shape, v.coords};
            t.coords.insert(t.coords.end(), w.coords.begin(), w.coords.end());
            out.members.push_back(std::move(t));
        }
    }
    for (std::size_t a = 0; a < out.members.size(); ++a)
        for (std::size_t b = a + 1; b < out.members.size(); ++b)
            if (linked(out.members[a], out.members[b])) {
                throw std::logic_error("type_set produced linked members " + to_string(out.members[a]) + ", " +
                                       to_string(out.members[b]));
            }
    return out;
}

std::vector<IndexTuple> all_tuples(Shape shape) {
    std::vector<std::uint8_t> masks;
    for (int i = 0; i < shape.j1; ++i) masks.push_back(0x3F);
    for (int i = 0; i < shape.j2; ++i) masks.push_back(0x0F);
    return product_members(shape, masks);
}

ExhaustiveResult max_unlinked_exhaustive(int j1, int j2) {
    if (j1 < 0 || j2 < 0) throw ValidationError("negative shape");
    const std::size_t n = ipow(6, j1) * ipow(4, j2);
    if (n > 64) {
        throw CapacityError("exhaustive search limited to 64 tuples; use verify_type_structure for shape (" +
                            std::to_string(j1) + "," + std::to_string(j2) + ")");
    }
    const auto verts = all_tuples(Shape{j1, j2});
    std::vector<std::uint64_t> adj(n, 0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && linked(verts[a], verts[b])) adj[a] |= 1ULL << b;

    std::size_t best = 0;
    std::vector<std::uint64_t> found;
    std::function<void(std::uint64_t, std::uint64_t, std::size_t)> rec = [&](std::uint64_t R, std::uint64_t P,
                                                                             std::size_t size) {
        if (size + static_cast<std::size_t>(std::popcount(P)) < best) return;
        if (P == 0) {
            if (size > best) {
                best = size;
                found.clear();
            }
            found.push_back(R);
            return;
        }
        const int v = std::countr_zero(P);
        const std::uint64_t bit = 1ULL << v;
        rec(R | bit, P & ~bit & ~adj[v], size + 1);
        rec(R, P & ~bit, size);
    };
    const std::uint64_t all = n == 64 ? ~0ULL : ((1ULL << n) - 1);
    rec(0, all, 0);

    ExhaustiveResult res;
    res.max_size = best;
    std::set<std::vector<IndexTuple>> seen;
    for (auto R : found) {
        UnlinkedSet s;
        s.is_maximum = true;
        for (std::size_t v = 0; v < n; ++v)
            if (R >> v & 1) s.members.push_back(verts[v]);
        if (seen.insert(s.members).second) res.maximum_sets.push_back(std::move(s));
    }
    return res;
}

std::vector<std::array<int, 2>> y2_linked_pairs_from_table() { return linked_pairs(4, link_bit_y2); }

std::vector<std::array<int, 2>> y2_linked_pairs_from_prose() { return {{0, 1}, {2, 3}}; }

TypeStructureReport verify_type_structure(int j1, int j2) {
    if (j1 < 0 || j2 < 0 || j1 > 6 || j2 > 6) throw ValidationError("verify_type_structure needs 0 <= j1, j2 <= 6");
    TypeStructureReport rep;
    rep.shape = Shape{j1, j2};
    rep.expected_size = ipow(3, j1) * ipow(2, j2);

    const auto a1 = y1_adj();
    const auto a2 = y2_adj();
    const std::vector<std::uint8_t> y1_sets = {0x2A, 0x15};  // A, B
    {
        std::vector<std::uint8_t> size3;
        for (auto m : maximal_coordinate_sets(6, a1.data()))
            if (std::popcount(m) == 3) size3.push_back(m);
        std::sort(size3.begin(), size3.end());
        if (size3 != std::vector<std::uint8_t>{0x15, 0x2A}) {
            rep.notes.push_back("Y1 maximum unlinked sets differ from {A, B}");
        }
    }
    if (j2 > 0) rep.notes.push_back("Y2 links from table: {0,3} {1,2}; prose states {0,1} {2,3}");

    // W candidates: every maximum unlinked set of Y2^j2 when the exhaustive
    // search can list them, otherwise only products of per-coordinate sets.
    const Shape wshape{0, j2};
    const auto y2_all = all_tuples(wshape);
    std::vector<std::vector<std::uint8_t>> W_members;  // indices into y2_all
    const auto y2_sets = maximal_coordinate_sets(4, a2.data());
    if (j2 <= 3) {
        const auto ex = max_unlinked_exhaustive(0, j2);
        for (const auto& set : ex.maximum_sets) {
            std::vector<std::uint8_t> idx;
            for (const auto& m : set.members)
                idx.push_back(static_cast<std::uint8_t>(
                    std::lower_bound(y2_all.begin(), y2_all.end(), m) - y2_all.begin()));
            W_members.push_back(std::move(idx));
        }
        rep.expected_count = ipow(2, j1) * W_members.size();
        std::size_t products = ipow(y2_sets.size(), j2);
        if (W_members.size() != products) {
            rep.notes.push_back("Y2^" + std::to_string(j2) + " has " + std::to_string(W_members.size()) +
                                " maximum unlinked sets, " + std::to_string(products) + " of product form");
        }
    } else {
        rep.count_checked = false;
        rep.notes.push_back("j2 > 3: W limited to product sets, count not checked");
    }

    const std::size_t nW = j2 <= 3 ? W_members.size() : ipow(y2_sets.size(), j2);
    const std::size_t ncand = ipow(2, j1) * nW;
    rep.candidate_count = ncand;
    if (!rep.count_checked) rep.expected_count = ncand;
    rep.direct_check = ncand * ipow(6, j1) * ipow(4, j2) * rep.expected_size <= 20'000'000ULL;

    // Parity-set DP state: bit 0 = parity 0 achievable, bit 1 = parity 1.
    auto combine = [](int s, int ps) {
        int ns = 0;
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q)
                if ((s >> p & 1) && (ps >> q & 1)) ns |= 1 << (p ^ q);
        return ns;
    };
    auto coord_step = [&](std::array<std::size_t, 4>& dp, int alpha, const std::uint8_t* adj, std::uint8_t mask) {
        std::array<std::size_t, 4> nd{};
        for (int x = 0; x < alpha; ++x) {
            int ps = 0;
            if (mask & ~adj[x]) ps |= 1;
            if (mask & adj[x]) ps |= 2;
            for (int s = 1; s < 4; ++s)
                if (dp[s]) nd[combine(s, ps)] += dp[s];
        }
        dp = nd;
    };

    for (std::size_t c = 0; c < ncand; ++c) {
        std::size_t code = c;
        std::vector<std::uint8_t> vmask(j1);
        for (int i = 0; i < j1; ++i) {
            vmask[i] = y1_sets[code % 2];
            code /= 2;
        }
        // W as explicit members and, for product W, as coordinate masks.
        std::vector<IndexTuple> W;
        std::vector<std::uint8_t> wmask;
        if (j2 <= 3) {
            for (auto idx : W_members[code]) W.push_back(y2_all[idx]);
        } else {
            for (int i = 0; i < j2; ++i) {
                wmask.push_back(y2_sets[code % y2_sets.size()]);
                code /= y2_sets.size();
            }
        }
        const std::size_t wsize = j2 <= 3 ? W.size() : [&] {
            std::size_t z = 1;
            for (auto m : wmask) z *= static_cast<std::size_t>(std::popcount(m));
            return z;
        }();
        const std::size_t size = ipow(3, j1) * wsize;
        if (c == 0) rep.candidate_size = size;
        if (size != rep.candidate_size) rep.notes.push_back("candidate sizes are not uniform");

        // V is a product of unlinked coordinate sets, so V×W is unlinked iff W is.
        bool unl = true;
        for (int i = 0; i < j1; ++i)
            for (int x = 0; x < 6; ++x)
                if ((vmask[i] >> x & 1) && (a1[x] & vmask[i])) unl = false;
        if (j2 <= 3) {
            for (std::size_t a = 0; a < W.size() && unl; ++a)
                for (std::size_t b = a + 1; b < W.size(); ++b)
                    if (linked(W[a], W[b])) unl = false;
        } else {
            for (int i = 0; i < j2; ++i)
                for (int x = 0; x < 4; ++x)
                    if ((wmask[i] >> x & 1) && (a2[x] & wmask[i])) unl = false;
        }

        // Count tuples whose link parities against the candidate are all 0.
        std::array<std::size_t, 4> dp{0, 1, 0, 0};
        for (int i = 0; i < j1; ++i) coord_step(dp, 6, a1.data(), vmask[i]);
        std::size_t free_count = 0;
        if (j2 <= 3) {
            for (const auto& t : y2_all) {
                int ps = 0;
                for (const auto& w : W) ps |= linked(t, w) ? 2 : 1;
                for (int s = 1; s < 4; ++s)
                    if (dp[s] && combine(s, ps) == 1) free_count += dp[s];
            }
        } else {
            for (int i = 0; i < j2; ++i) coord_step(dp, 4, a2.data(), wmask[i]);
            free_count = dp[1];
        }
        bool maximal = unl && free_count == size;

        if (rep.direct_check) {
            std::vector<IndexTuple> members;
            std::vector<std::uint8_t> masks = vmask;
            const auto V = product_members(Shape{j1, 0}, masks);
            for (const auto& v : V) {
                if (j2 == 0) {
                    members.push_back(IndexTuple{rep.shape, v.coords});
                    continue;
                }
                for (const auto& w : W) {
                    IndexTuple t{rep.shape, v.coords};
                    t.coords.insert(t.coords.end(), w.coords.begin(), w.coords.end());
                    members.push_back(std::move(t));
                }
            }
            std::sort(members.begin(), members.end());
            bool d_unl = true;
            for (std::size_t a = 0; a < members.size() && d_unl; ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b)
                    if (linked(members[a], members[b])) {
                        d_unl = false;
                        break;
                    }
            bool d_max = true;
            for (const auto& t : all_tuples(rep.shape)) {
                if (std::binary_search(members.begin(), members.end(), t)) continue;
                bool any = false;
                for (const auto& m : members)
                    if (linked(t, m)) {
                        any = true;
                        break;
                    }
                if (!any) {
                    d_max = false;
                    break;
                }
            }
            if (d_unl != unl || d_max != maximal) {
                rep.notes.push_back("direct check disagrees with the coordinate analysis");
            }
            unl = unl && d_unl;
            maximal = maximal && d_max;
        }
        rep.all_unlinked = rep.all_unlinked && unl;
        rep.all_maximal = rep.all_maximal && maximal;
    }
    return rep;
}

std::string to_string(const IndexTuple& t) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < t.coords.size(); ++i) {
        if (i) os << ',';
        os << static_cast<int>(t.coords[i]);
    }
    os << ')';
    return os.str();
}

}  // namespace h8
