#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace ihall {

// An element a + b*sqrt(q) of Q(sqrt(q)), with exact rational components.
// The ground parameter q must be a prime power that is not a perfect square,
// so that s^2 - q is irreducible and the ring is a field.
class Scalar {
public:
    Scalar() : q_(0) {}
    Scalar(mpq_class rat, mpq_class surd, long q) : a_(std::move(rat)), b_(std::move(surd)), q_(q) {
        a_.canonicalize();
        b_.canonicalize();
    }

    static Scalar zero(long q) { return Scalar(0, 0, q); }
    static Scalar one(long q) { return Scalar(1, 0, q); }
    static Scalar of_int(long n, long q) { return Scalar(n, 0, q); }
    static Scalar of_rat(const mpq_class& r, long q) { return Scalar(r, 0, q); }
    // sqrt(q) itself
    static Scalar sqq(long q) { return Scalar(0, 1, q); }

    const mpq_class& rat_part() const { return a_; }
    const mpq_class& surd_part() const { return b_; }
    long ground_q() const { return q_; }

    bool is_zero() const { return a_ == 0 && b_ == 0; }
    bool is_one() const { return a_ == 1 && b_ == 0; }
    bool is_integer() const { return b_ == 0 && a_.get_den() == 1; }

    Scalar operator+(const Scalar& o) const {
        check(o);
        return Scalar(a_ + o.a_, b_ + o.b_, q_);
    }
    Scalar operator-(const Scalar& o) const {
        check(o);
        return Scalar(a_ - o.a_, b_ - o.b_, q_);
    }
    Scalar operator-() const { return Scalar(-a_, -b_, q_); }
    Scalar operator*(const Scalar& o) const {
        check(o);
        // (a + b s)(c + d s) = ac + bd q + (ad + bc) s
        return Scalar(a_ * o.a_ + b_ * o.b_ * q_, a_ * o.b_ + b_ * o.a_, q_);
    }
    Scalar inverse() const {
        // 1/(a + b s) = (a - b s)/(a^2 - b^2 q); the norm vanishes only at 0
        mpq_class norm = a_ * a_ - b_ * b_ * q_;
        if (norm == 0) throw std::domain_error("Scalar: division by zero");
        return Scalar(a_ / norm, -b_ / norm, q_);
    }
    Scalar operator/(const Scalar& o) const { return *this * o.inverse(); }

    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    bool operator==(const Scalar& o) const { return q_ == o.q_ && a_ == o.a_ && b_ == o.b_; }
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    // Rendering as "a + b*sqrt(q)" with reduced fractions.
    std::string str() const;

private:
    void check(const Scalar& o) const {
        if (q_ != o.q_) throw std::invalid_argument("Scalar: mismatched ground_q");
    }
    mpq_class a_, b_;
    long q_;
};

// Throws unless q is a prime power and not a perfect square.
void validate_ground_q(long q);

// sqrt(q)^k, k may be negative.
Scalar v_power(long k, long q);

// Quantum integer [m] = (v^m - v^-m)/(v - v^-1) at v = sqrt(q).
Scalar quantum_int(long m, long q);

// n-factor: prod_{i=1..l} (1 - q^(i*d)); the empty product is 1.
Scalar n_factor(long l, long d, long q);

}  // namespace ihall
