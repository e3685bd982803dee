#pragma once

#include <gmpxx.h>

#include <compare>
#include <string>

namespace h8 {

/// Exact rational of the form num / 2^shift, kept normalized
/// (num odd or shift == 0).
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(long v) : num_(v) {}  // NOLINT(google-explicit-constructor)
    Dyadic(mpz_class num, unsigned shift);

    /// 2^e for any integer e.
    static Dyadic pow2(int e);

    const mpz_class& num() const { return num_; }
    unsigned shift() const { return shift_; }
    mpz_class den() const;
    mpq_class to_mpq() const;
    double to_double() const;
    bool is_integer() const { return shift_ == 0; }
    int sign() const { return sgn(num_); }

    /// "num/den", or just "num" when integral.
    std::string str() const;

    /// this * 2^e, exact.
    Dyadic scaled(int e) const;

    Dyadic& operator+=(const Dyadic& o);
    Dyadic& operator-=(const Dyadic& o);
    Dyadic& operator*=(const Dyadic& o);

    friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
    friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
    friend Dyadic operator*(Dyadic a, const Dyadic& b) { return a *= b; }
    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.shift_ == b.shift_ && a.num_ == b.num_;
    }
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

private:
    void normalize();

    mpz_class num_ = 0;
    unsigned shift_ = 0;
};

std::ostream& operator<<(std::ostream& os, const Dyadic& d);

}  // namespace h8
