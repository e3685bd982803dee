#include "h8/dyadic.hpp"

#include <ostream>

namespace h8 {

Dyadic::Dyadic(mpz_class num, unsigned shift) : num_(std::move(num)), shift_(shift) {
    normalize();
}

Dyadic Dyadic::pow2(int e) {
    Dyadic r;
    if (e >= 0) {
        mpz_ui_pow_ui(r.num_.get_mpz_t(), 2, static_cast<unsigned long>(e));
    } else {
        r.num_ = 1;
        r.shift_ = static_cast<unsigned>(-e);
    }
    return r;
}

void Dyadic::normalize() {
    if (num_ == 0) {
        shift_ = 0;
        return;
    }
    if (shift_ == 0) return;
    mp_bitcnt_t tz = mpz_scan1(num_.get_mpz_t(), 0);
    unsigned drop = tz < shift_ ? static_cast<unsigned>(tz) : shift_;
    if (drop) {
        mpz_fdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), drop);
        shift_ -= drop;
    }
}

mpz_class Dyadic::den() const {
    mpz_class d;
    mpz_ui_pow_ui(d.get_mpz_t(), 2, shift_);
    return d;
}

mpq_class Dyadic::to_mpq() const {
    mpq_class q(num_, den());
    q.canonicalize();
    return q;
}

double Dyadic::to_double() const { return to_mpq().get_d(); }

std::string Dyadic::str() const {
    if (shift_ == 0) return num_.get_str();
    return num_.get_str() + "/" + den().get_str();
}

Dyadic Dyadic::scaled(int e) const {
    Dyadic r = *this;
    if (e >= 0) {
        mpz_mul_2exp(r.num_.get_mpz_t(), r.num_.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    } else {
        r.shift_ += static_cast<unsigned>(-e);
    }
    r.normalize();
    return r;
}

Dyadic& Dyadic::operator+=(const Dyadic& o) {
    if (shift_ >= o.shift_) {
        mpz_class t;
        mpz_mul_2exp(t.get_mpz_t(), o.num_.get_mpz_t(), shift_ - o.shift_);
        num_ += t;
    } else {
        mpz_mul_2exp(num_.get_mpz_t(), num_.get_mpz_t(), o.shift_ - shift_);
        num_ += o.num_;
        shift_ = o.shift_;
    }
    normalize();
    return *this;
}

Dyadic& Dyadic::operator-=(const Dyadic& o) {
    Dyadic neg = o;
    neg.num_ = -neg.num_;
    return *this += neg;
}

Dyadic& Dyadic::operator*=(const Dyadic& o) {
    num_ *= o.num_;
    shift_ += o.shift_;
    normalize();
    return *this;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    Dyadic d = a - b;
    int s = d.sign();
    if (s < 0) return std::strong_ordering::less;
    if (s > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Dyadic& d) { return os << d.str(); }

}  // namespace h8
