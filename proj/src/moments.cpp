#include "h8/moments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "h8/errors.hpp"
#include "h8/h8count.hpp"

namespace h8 {

std::string to_string(MomentVariant v) {
    switch (v) {
        case MomentVariant::Tilde: return "tilde";
        case MomentVariant::Everywhere: return "everywhere";
        case MomentVariant::D4: return "d4";
        case MomentVariant::Surj: return "surj";
    }
    return "?";
}

MomentVariant parse_variant(const std::string& s) {
    for (auto v : {MomentVariant::Tilde, MomentVariant::Everywhere, MomentVariant::D4, MomentVariant::Surj})
        if (to_string(v) == s) return v;
    throw ValidationError("unknown variant '" + s + "'");
}

double Checkpoint::ratio() const {
    if (main_term == 0) return std::numeric_limits<double>::quiet_NaN();
    mpq_class r = empirical / main_term;
    return r.get_d();
}

namespace {

mpq_class qpow(const mpq_class& b, int e) {
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), b.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(d.get_mpz_t(), b.get_den_mpz_t(), static_cast<unsigned long>(e));
    mpq_class r(n, d);
    r.canonicalize();
    return r;
}

mpz_class zpow(std::uint64_t b, int e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), b, static_cast<unsigned long>(e));
    return r;
}

int class_index(CongClass c) { return static_cast<int>(c); }

constexpr int kMaxOmega = 16;

struct Cell {
    std::uint64_t cnt = 0;
    std::vector<mpz_class> pw;  // pw[j] = Σ v^{j+1}
};

// cells[bucket][class][omega]
struct Acc {
    int K = 1;
    std::vector<Cell> cells;
    std::map<std::pair<std::uint64_t, int>, std::uint64_t> hist;
    std::size_t nb = 0;

    Acc(std::size_t buckets, int k) : K(k), cells(buckets * 3 * kMaxOmega), nb(buckets) {
        for (auto& c : cells) c.pw.assign(K, 0);
    }
    Cell& at(std::size_t b, int cls, int w) { return cells[(b * 3 + cls) * kMaxOmega + w]; }
    const Cell& at(std::size_t b, int cls, int w) const { return cells[(b * 3 + cls) * kMaxOmega + w]; }

    void merge(const Acc& o) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            cells[i].cnt += o.cells[i].cnt;
            for (int j = 0; j < K; ++j) cells[i].pw[j] += o.cells[i].pw[j];
        }
        for (const auto& [key, n] : o.hist) hist[key] += n;
    }
};

// 16 times the per-discriminant count; always an integer.
std::uint64_t value16(MomentVariant v, const FundamentalDiscriminant& d) {
    switch (v) {
        case MomentVariant::Tilde:
        case MomentVariant::Everywhere:
        case MomentVariant::Surj: {
            if (d.omega < 3) return 0;
            const std::uint64_t n = admissible_count(d);
            if (n == 0) return 0;
            const int at = d.value > 0 ? 1 : 0;
            const int extra = v == MomentVariant::Surj ? 3 : 0;
            return n << (d.omega + 1 - at + extra);
        }
        case MomentVariant::D4: {
            const Dyadic c = count_d4(d).scaled(4);
            if (!c.is_integer()) throw std::logic_error("16·count_d4 is not an integer");
            return c.num().get_ui();
        }
    }
    return 0;
}

struct Scan {
    std::uint64_t X;
    Sign sign;
    std::vector<CongClass> classes;
    std::vector<std::uint64_t> checkpoints;
    MomentVariant variant;
    int K;
    unsigned threads;
    bool histogram = false;
};

void validate_grid(const std::vector<std::uint64_t>& cps, std::uint64_t X) {
    if (cps.empty() || cps.back() != X) throw ValidationError("checkpoints must end at X");
    for (std::size_t i = 1; i < cps.size(); ++i)
        if (cps[i] <= cps[i - 1]) throw ValidationError("checkpoints must be strictly increasing");
    if (cps.front() < 1) throw ValidationError("checkpoints must be positive");
}

Acc run_scan(const SieveTable& sieve, const Scan& s) {
    if (s.X < 2) throw ValidationError("X must be at least 2");
    if (sieve.limit() + 1 < s.X) {
        throw ValidationError("sieve covers " + std::to_string(sieve.limit()) + ", sweep needs " +
                              std::to_string(s.X - 1));
    }
    const std::size_t nb = s.checkpoints.size();
    constexpr std::uint64_t kChunk = 1 << 18;
    const std::uint64_t nchunks = (s.X + kChunk - 1) / kChunk;
    std::atomic<std::uint64_t> next{0};
    const unsigned nt = std::max(1U, std::min<unsigned>(s.threads, static_cast<unsigned>(nchunks)));
    std::vector<Acc> accs(nt, Acc(nb, s.K));
    std::vector<std::exception_ptr> errs(nt);

    auto worker = [&](unsigned id) {
        try {
            Acc& acc = accs[id];
            for (;;) {
                const std::uint64_t c = next.fetch_add(1);
                if (c >= nchunks) break;
                const std::uint64_t lo = std::max<std::uint64_t>(1, c * kChunk);
                const std::uint64_t hi = std::min(s.X, (c + 1) * kChunk);
                if (lo >= hi) continue;
                std::size_t b = std::upper_bound(s.checkpoints.begin(), s.checkpoints.end(), lo) -
                                s.checkpoints.begin();
                for_each_fundamental_discriminant(sieve, lo, hi, s.sign, s.classes,
                                                  [&](const FundamentalDiscriminant& d) {
                    const std::uint64_t ad = static_cast<std::uint64_t>(std::llabs(d.value));
                    while (ad >= s.checkpoints[b]) ++b;
                    if (d.omega >= kMaxOmega) throw CapacityError("omega too large");
                    Cell& cell = acc.at(b, class_index(d.cong_class), d.omega);
                    ++cell.cnt;
                    const std::uint64_t v = value16(s.variant, d);
                    if (s.histogram && d.cong_class == CongClass::Odd1Mod4) ++acc.hist[{v, d.omega}];
                    if (v == 0) return;
                    mpz_class p = v;
                    const mpz_class vz = v;
                    for (int j = 0; j < s.K; ++j) {
                        cell.pw[j] += p;
                        p *= vz;
                    }
                });
            }
        } catch (...) {
            errs[id] = std::current_exception();
        }
    };
    if (nt == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker, i);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    for (unsigned i = 1; i < nt; ++i) accs[0].merge(accs[i]);
    return std::move(accs[0]);
}

// Σ over cells in buckets [0, upto] of weight(class, ω) · pw[k-1] (or cnt).
template <typename W>
mpq_class fold(const Acc& acc, std::size_t upto, int k, bool use_count, W&& weight) {
    mpq_class total = 0;
    for (std::size_t b = 0; b <= upto; ++b)
        for (int c = 0; c < 3; ++c)
            for (int w = 0; w < kMaxOmega; ++w) {
                const Cell& cell = acc.at(b, c, w);
                if (!cell.cnt) continue;
                const mpz_class v = use_count ? mpz_class(static_cast<unsigned long>(cell.cnt)) : cell.pw[k - 1];
                if (v == 0) continue;
                total += weight(static_cast<CongClass>(c), w) * mpq_class(v);
            }
    total.canonicalize();
    return total;
}

std::uint64_t count_upto(const Acc& acc, std::size_t upto) {
    std::uint64_t n = 0;
    for (std::size_t b = 0; b <= upto; ++b)
        for (int c = 0; c < 3; ++c)
            for (int w = 0; w < kMaxOmega; ++w) n += acc.at(b, c, w).cnt;
    return n;
}

const char* kGNote = "g(d) = 3^omega(d); the /6 subfield count is not applied";

}  // namespace

mpq_class class_constant(Sign sign, CongClass cls, int k, const mpq_class& a) {
    const bool odd = cls == CongClass::Odd1Mod4;
    mpq_class den;
    if (sign == Sign::Negative) {
        den = odd ? mpq_class(zpow(2, 5 * k)) : qpow(a, k) * zpow(2, 5 * k);
    } else {
        den = odd ? mpq_class(zpow(3, k) * zpow(2, 6 * k)) : qpow(3 * a, k) * zpow(2, 6 * k);
    }
    mpq_class c = 1 / den;
    c.canonicalize();
    return c;
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t X) {
    std::vector<std::uint64_t> cps;
    std::uint64_t x = X;
    while (cps.size() < 12 && x >= 1000) {
        cps.push_back(x);
        x /= 2;
    }
    if (cps.empty()) cps.push_back(X);
    std::reverse(cps.begin(), cps.end());
    return cps;
}

MomentReport sweep(const SieveTable& sieve, const SweepConfig& config) {
    if (config.k < 1) throw ValidationError("k must be at least 1");
    if (config.a < mpq_class(1, 3)) throw ValidationError("a must be at least 1/3");
    if (config.classes.empty()) throw ValidationError("no congruence classes selected");
    MomentReport rep;
    rep.config = config;
    if (rep.config.checkpoints.empty()) rep.config.checkpoints = default_checkpoints(config.X);
    validate_grid(rep.config.checkpoints, config.X);
    rep.notes.push_back(kGNote);

    Scan s{config.X, config.sign, config.classes, rep.config.checkpoints, config.variant, config.k,
           config.threads};
    const Acc acc = run_scan(sieve, s);
    const int k = config.k;
    const mpq_class sixteen_k = mpq_class(zpow(16, k));
    std::vector<mpq_class> apow(kMaxOmega), mpow(kMaxOmega);
    const mpq_class mbase = config.variant == MomentVariant::D4 ? 4 * config.a : 3 * config.a;
    for (int w = 0; w < kMaxOmega; ++w) {
        apow[w] = qpow(config.a, k * w);
        mpow[w] = qpow(mbase, k * w);
    }
    if (config.variant != MomentVariant::D4) {
        mpq_class first = class_constant(config.sign, config.classes.front(), k, config.a);
        bool same = true;
        for (auto c : config.classes) same = same && class_constant(config.sign, c, k, config.a) == first;
        if (same) rep.target_constant = first;
    } else {
        rep.notes.push_back("d4: main_term counts discriminants weighted by (4a)^(k omega)");
    }
    for (std::size_t i = 0; i < rep.config.checkpoints.size(); ++i) {
        Checkpoint cp;
        cp.X = rep.config.checkpoints[i];
        cp.count = count_upto(acc, i);
        cp.empirical = fold(acc, i, k, false, [&](CongClass, int w) -> mpq_class { return apow[w] / sixteen_k; });
        if (config.variant == MomentVariant::D4) {
            cp.main_term = fold(acc, i, k, true, [&](CongClass, int w) -> mpq_class { return mpow[w]; });
        } else {
            cp.main_term = fold(acc, i, k, true, [&](CongClass c, int w) -> mpq_class {
                return class_constant(config.sign, c, k, config.a) * mpow[w];
            });
        }
        rep.grid.push_back(std::move(cp));
    }
    rep.empty = rep.grid.back().count == 0;
    return rep;
}

PointMassReport point_mass_estimate(const SieveTable& sieve, std::uint64_t X, Sign sign, int k_max,
                                    unsigned threads) {
    if (k_max < 1) throw ValidationError("k_max must be at least 1");
    PointMassReport rep;
    rep.X = X;
    rep.sign = sign;
    rep.target = sign == Sign::Negative ? mpq_class(1, 32) : mpq_class(1, 192);
    Scan s{X, sign, {CongClass::Odd1Mod4, CongClass::FourMod8, CongClass::ZeroMod8}, {X}, MomentVariant::Tilde,
           k_max, threads, true};
    const Acc acc = run_scan(sieve, s);
    for (int c = 0; c < 3; ++c)
        for (int w = 0; w < kMaxOmega; ++w) {
            const auto n = acc.at(0, c, w).cnt;
            rep.mixed_count += n;
            if (c == class_index(CongClass::Odd1Mod4)) rep.count += n;
        }
    for (int k = 1; k <= k_max; ++k) {
        // (f/g)^k = (v / (16·3^ω))^k
        auto weight = [&](CongClass, int w) -> mpq_class { return mpq_class(1) / (zpow(16, k) * zpow(3, k * w)); };
        mpq_class odd_sum = 0, all_sum = 0;
        for (int c = 0; c < 3; ++c)
            for (int w = 0; w < kMaxOmega; ++w) {
                const Cell& cell = acc.at(0, c, w);
                if (cell.pw[k - 1] == 0) continue;
                const mpq_class t = weight(static_cast<CongClass>(c), w) * mpq_class(cell.pw[k - 1]);
                all_sum += t;
                if (c == class_index(CongClass::Odd1Mod4)) odd_sum += t;
            }
        mpq_class m = rep.count ? odd_sum / mpz_class(static_cast<unsigned long>(rep.count)) : mpq_class(0);
        mpq_class mm =
            rep.mixed_count ? all_sum / mpz_class(static_cast<unsigned long>(rep.mixed_count)) : mpq_class(0);
        m.canonicalize();
        mm.canonicalize();
        rep.distance.push_back(std::fabs(mpq_class(m - qpow(rep.target, k)).get_d()));
        rep.moments.push_back(m);
        rep.mixed_moments.push_back(mm);
    }
    for (const auto& [key, n] : acc.hist) {
        mpq_class v(mpz_class(static_cast<unsigned long>(key.first)), 16 * zpow(3, key.second));
        v.canonicalize();
        rep.histogram[v] += n;
    }
    return rep;
}

MomentReport surj_sweep(const SieveTable& sieve, std::uint64_t X, Sign sign, int k, unsigned threads,
                        std::vector<std::uint64_t> checkpoints) {
    if (k < 1) throw ValidationError("k must be at least 1");
    MomentReport rep;
    rep.config.X = X;
    rep.config.sign = sign;
    rep.config.classes = {CongClass::Odd1Mod4};
    rep.config.k = k;
    rep.config.a = 1;
    rep.config.variant = MomentVariant::Surj;
    rep.config.threads = threads;
    rep.config.checkpoints = checkpoints.empty() ? default_checkpoints(X) : std::move(checkpoints);
    validate_grid(rep.config.checkpoints, X);
    const mpq_class c = sign == Sign::Negative ? mpq_class(1, 4) : mpq_class(1, 24);
    rep.target_constant = qpow(c, k);
    rep.notes.push_back(kGNote);

    Scan s{X, sign, rep.config.classes, rep.config.checkpoints, MomentVariant::Surj, k, threads};
    const Acc acc = run_scan(sieve, s);
    const mpq_class sixteen_k = mpq_class(zpow(16, k));
    for (std::size_t i = 0; i < rep.config.checkpoints.size(); ++i) {
        Checkpoint cp;
        cp.X = rep.config.checkpoints[i];
        cp.count = count_upto(acc, i);
        cp.empirical = fold(acc, i, k, false, [&](CongClass, int) -> mpq_class { return 1 / sixteen_k; });
        cp.main_term = fold(acc, i, k, true, [&](CongClass, int w) -> mpq_class { return *rep.target_constant * zpow(3, k * w); });
        rep.grid.push_back(std::move(cp));
    }
    rep.empty = rep.grid.back().count == 0;
    return rep;
}

MomentReport d4_heuristic_sweep(const SieveTable& sieve, std::uint64_t X, Sign sign, int k, unsigned threads,
                                std::vector<std::uint64_t> checkpoints) {
    SweepConfig cfg;
    cfg.X = X;
    cfg.sign = sign;
    cfg.classes = {CongClass::Odd1Mod4, CongClass::FourMod8, CongClass::ZeroMod8};
    cfg.k = k;
    cfg.a = mpq_class(1, 4);
    cfg.variant = MomentVariant::D4;
    cfg.threads = threads;
    cfg.checkpoints = std::move(checkpoints);
    // a = 1/4 is below the 1/3 floor enforced by sweep(), so the scan is run directly.
    MomentReport rep;
    rep.config = cfg;
    if (rep.config.checkpoints.empty()) rep.config.checkpoints = default_checkpoints(X);
    validate_grid(rep.config.checkpoints, X);
    Scan s{X, sign, cfg.classes, rep.config.checkpoints, MomentVariant::D4, k, threads};
    const Acc acc = run_scan(sieve, s);
    const mpq_class sixteen_k = mpq_class(zpow(16, k));
    std::vector<mpq_class> apow(kMaxOmega);
    for (int w = 0; w < kMaxOmega; ++w) apow[w] = qpow(cfg.a, k * w);
    for (std::size_t i = 0; i < rep.config.checkpoints.size(); ++i) {
        Checkpoint cp;
        cp.X = rep.config.checkpoints[i];
        cp.count = count_upto(acc, i);
        cp.empirical = fold(acc, i, k, false, [&](CongClass, int w) -> mpq_class { return apow[w] / sixteen_k; });
        cp.main_term = mpq_class(mpz_class(static_cast<unsigned long>(cp.count)));
        rep.grid.push_back(std::move(cp));
    }
    rep.notes.push_back("d4: exploratory, no target constant; ratio is the mean of (1/4)^omega count_d4");
    rep.empty = rep.grid.back().count == 0;
    return rep;
}

}  // namespace h8
