#include "h8/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "h8/errors.hpp"
#include "h8/sieve.hpp"

namespace h8 {

namespace {

// (2/n) sign for odd n, via n mod 8.
constexpr int kTab2[8] = {0, 1, 0, -1, 0, -1, 0, 1};

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::vector<std::int64_t> trial_primes(std::int64_t n) {
    std::vector<std::int64_t> out;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

bool squarefree_trial(std::int64_t n) {
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % (p * p) == 0) return false;
    }
    return true;
}

std::int64_t star(std::int64_t p) { return (p % 4 == 1) ? p : -p; }

}  // namespace

int jacobi(std::int64_t a, std::int64_t n) {
    a = mod_pos(a, n);
    int t = 1;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            t *= kTab2[n & 7];
        }
        std::swap(a, n);
        if ((a & 3) == 3 && (n & 3) == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

int kronecker(std::int64_t a, std::int64_t n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (n & 1) == 0) return 0;
    int t = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) t = -t;
    }
    int v = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++v;
    }
    if (v & 1) t *= kTab2[mod_pos(a, 8)];
    if (n == 1) return t;
    return t * jacobi(a, n);
}

bool is_prime_discriminant(std::int64_t v) {
    if (v == -4 || v == 8 || v == -8) return true;
    if (mod_pos(v, 4) != 1) return false;
    std::int64_t p = std::llabs(v);
    if (p < 3) return false;
    auto ps = trial_primes(p);
    return ps.size() == 1 && ps[0] == p;
}

bool is_fundamental(std::int64_t d) {
    if (d == 0 || d == 1) return false;
    std::int64_t r = mod_pos(d, 4);
    if (r == 1) return squarefree_trial(std::llabs(d));
    if (r != 0) return false;
    std::int64_t m = d / 4;
    std::int64_t rm = mod_pos(m, 4);
    if (rm != 2 && rm != 3) return false;
    return squarefree_trial(std::llabs(m));
}

bool FundamentalDiscriminant::has_prime_3mod4() const {
    for (auto p : primes) {
        if (p % 4 == 3) return true;
    }
    return false;
}

CongClass congruence_class_of(std::int64_t d) {
    if (mod_pos(d, 4) == 1) return CongClass::Odd1Mod4;
    return mod_pos(d, 8) == 4 ? CongClass::FourMod8 : CongClass::ZeroMod8;
}

FundamentalDiscriminant discriminant_from_odd_primes(std::int64_t d,
                                                     const std::vector<std::int64_t>& odd_primes) {
    FundamentalDiscriminant fd;
    fd.value = d;
    fd.sign = d < 0 ? Sign::Negative : Sign::Positive;
    fd.cong_class = congruence_class_of(d);
    std::int64_t odd_part = 1;
    for (auto p : odd_primes) odd_part *= star(p);
    if ((d & 1) == 0) {
        fd.factors.push_back(d / odd_part);
        fd.primes.push_back(2);
    }
    for (auto p : odd_primes) {
        fd.factors.push_back(star(p));
        fd.primes.push_back(p);
    }
    fd.omega = static_cast<int>(fd.factors.size());
    return fd;
}

FundamentalDiscriminant make_discriminant(std::int64_t d) {
    if (!is_fundamental(d)) {
        throw ValidationError(std::to_string(d) + " is not a fundamental discriminant");
    }
    std::vector<std::int64_t> odd;
    for (auto p : trial_primes(std::llabs(d))) {
        if (p != 2) odd.push_back(p);
    }
    return discriminant_from_odd_primes(d, odd);
}

std::vector<std::int64_t> prime_discriminant_factorization(std::int64_t d) {
    return make_discriminant(d).factors;
}

std::vector<std::int64_t> prime_discriminant_factorization(const FundamentalDiscriminant& d) {
    if (!is_fundamental(d.value)) {
        throw ValidationError(std::to_string(d.value) + " is not a fundamental discriminant");
    }
    return d.factors;
}

std::string to_string(CongClass c) {
    switch (c) {
        case CongClass::Odd1Mod4: return "1mod4";
        case CongClass::FourMod8: return "4mod8";
        case CongClass::ZeroMod8: return "0mod8";
    }
    return "?";
}

std::string to_string(Sign s) { return s == Sign::Negative ? "neg" : "pos"; }

std::vector<std::uint32_t> primes_up_to(std::uint32_t n) {
    std::vector<std::uint32_t> out;
    if (n < 2) return out;
    std::vector<bool> comp(n + 1, false);
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = true;
    }
    return out;
}

namespace {

// Which |d| = n give a fundamental discriminant of the requested sign in one
// of the classes. Returns 0 when none.
std::int64_t fundamental_for(const SieveTable& sv, std::uint64_t n, Sign sign,
                             const std::vector<CongClass>& classes) {
    auto want = [&](CongClass c) {
        return std::find(classes.begin(), classes.end(), c) != classes.end();
    };
    const std::int64_t s = sign == Sign::Negative ? -1 : 1;
    if (n & 1) {
        if (n < 3 || !want(CongClass::Odd1Mod4) || !sv.squarefree(n)) return 0;
        std::int64_t d = s * static_cast<std::int64_t>(n);
        return mod_pos(d, 4) == 1 ? d : 0;
    }
    if ((n & 3) != 0) return 0;
    std::uint64_t m = n >> 2;
    if (m & 1) {
        // d = ±4m with d/4 ≡ 3 mod 4.
        if (!want(CongClass::FourMod8) || !sv.squarefree(m)) return 0;
        std::int64_t q = s * static_cast<std::int64_t>(m);
        return mod_pos(q, 4) == 3 ? 4 * q : 0;
    }
    if ((m & 3) != 2) return 0;
    if (!want(CongClass::ZeroMod8) || !sv.squarefree(m >> 1)) return 0;
    return s * static_cast<std::int64_t>(n);
}

}  // namespace

void for_each_fundamental_discriminant(
    const SieveTable& sieve, std::uint64_t lo, std::uint64_t hi, Sign sign,
    const std::vector<CongClass>& classes,
    const std::function<void(const FundamentalDiscriminant&)>& fn) {
    if (hi == 0 || hi - 1 > sieve.limit()) {
        throw ValidationError("sieve limit " + std::to_string(sieve.limit()) +
                              " does not cover " + std::to_string(hi - 1));
    }
    lo = std::max<std::uint64_t>(lo, 3);
    if (lo >= hi) return;
    const auto small = primes_up_to(static_cast<std::uint32_t>(std::sqrt(double(hi))) + 1);

    constexpr std::uint64_t kSeg = 1 << 15;
    std::vector<std::uint64_t> rest(kSeg);
    std::vector<std::uint8_t> count(kSeg);
    std::vector<std::uint32_t> fac(kSeg * 10);
    std::vector<std::int64_t> odd;

    for (std::uint64_t base = lo; base < hi; base += kSeg) {
        const std::uint64_t top = std::min(hi, base + kSeg);
        const std::uint64_t len = top - base;
        for (std::uint64_t i = 0; i < len; ++i) {
            rest[i] = base + i;
            count[i] = 0;
        }
        for (std::uint32_t p : small) {
            if (p == 2) continue;
            std::uint64_t first = (base + p - 1) / p * p;
            for (std::uint64_t m = first; m < top; m += p) {
                std::uint64_t i = m - base;
                if (count[i] < 10) fac[i * 10 + count[i]++] = p;
                while (rest[i] % p == 0) rest[i] /= p;
            }
        }
        for (std::uint64_t i = 0; i < len; ++i) {
            std::uint64_t n = base + i;
            std::int64_t d = fundamental_for(sieve, n, sign, classes);
            if (d == 0) continue;
            std::uint64_t r = rest[i];
            while ((r & 1) == 0) r >>= 1;
            odd.assign(fac.begin() + i * 10, fac.begin() + i * 10 + count[i]);
            if (r > 1) odd.push_back(static_cast<std::int64_t>(r));
            fn(discriminant_from_odd_primes(d, odd));
        }
    }
}

std::vector<FundamentalDiscriminant> enumerate_fundamental_discriminants(
    const SieveTable& sieve, std::uint64_t X, Sign sign, CongClass cls) {
    std::vector<FundamentalDiscriminant> out;
    for_each_fundamental_discriminant(sieve, 1, X, sign, {cls},
                                      [&](const FundamentalDiscriminant& fd) { out.push_back(fd); });
    return out;
}

}  // namespace h8
