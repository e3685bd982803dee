/// @file arith.hpp
/// Kronecker symbols, fundamental discriminants and their prime-discriminant
/// factorizations.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace h8 {

enum class Sign { Positive, Negative };
enum class CongClass { Odd1Mod4, FourMod8, ZeroMod8 };

/// Full Kronecker symbol (a/n).
///
/// Conventions: (a/0) = 1 if a = ±1, else 0; (a/-1) = -1 if a < 0, else 1;
/// (a/2) = 0 for even a, 1 for a ≡ ±1 mod 8, -1 for a ≡ ±3 mod 8.
int kronecker(std::int64_t a, std::int64_t n);

/// Jacobi symbol (a/n) for odd n > 0.
int jacobi(std::int64_t a, std::int64_t n);

/// True if v is −4, 8, −8 or p* = (−1)^((p−1)/2)·p for an odd prime p.
bool is_prime_discriminant(std::int64_t v);

/// True if d is the discriminant of a quadratic field.
bool is_fundamental(std::int64_t d);

struct FundamentalDiscriminant {
    std::int64_t value = 0;
    /// Prime discriminants; the even one (if any) first, then odd ones by
    /// increasing |p|.
    std::vector<std::int64_t> factors;
    /// Rational prime under each factor, same order.
    std::vector<std::int64_t> primes;
    int omega = 0;
    Sign sign = Sign::Positive;
    CongClass cong_class = CongClass::Odd1Mod4;

    bool has_prime_3mod4() const;
};

/// Validates and factors d by trial division.
/// @throws ValidationError if d is not fundamental.
FundamentalDiscriminant make_discriminant(std::int64_t d);

/// Builds the record from the odd primes of |d| (ascending) without
/// re-validating; the caller guarantees d is fundamental.
FundamentalDiscriminant discriminant_from_odd_primes(std::int64_t d,
                                                     const std::vector<std::int64_t>& odd_primes);

/// The factor list of d; throws ValidationError for non-fundamental input.
std::vector<std::int64_t> prime_discriminant_factorization(std::int64_t d);
std::vector<std::int64_t> prime_discriminant_factorization(const FundamentalDiscriminant& d);

CongClass congruence_class_of(std::int64_t d);
std::string to_string(CongClass c);
std::string to_string(Sign s);

class SieveTable;

/// All fundamental d with 0 < ±d < X in the class, increasing |d|.
/// Requires sieve.limit() >= X - 1.
std::vector<FundamentalDiscriminant> enumerate_fundamental_discriminants(
    const SieveTable& sieve, std::uint64_t X, Sign sign, CongClass cls);

/// Streaming form of the above over |d| in [lo, hi). Factors are found by a
/// segmented sieve, so the callback sees each discriminant once, in order.
void for_each_fundamental_discriminant(
    const SieveTable& sieve, std::uint64_t lo, std::uint64_t hi, Sign sign,
    const std::vector<CongClass>& classes,
    const std::function<void(const FundamentalDiscriminant&)>& fn);

/// Primes up to n (inclusive).
std::vector<std::uint32_t> primes_up_to(std::uint32_t n);

}  // namespace h8
