#include "ihall/scalar.hpp"

namespace ihall {

std::string Scalar::str() const {
    if (is_zero()) return "0";
    std::string out;
    if (a_ != 0) out += a_.get_str();
    if (b_ != 0) {
        if (!out.empty()) out += b_ > 0 ? " + " : " - ";
        else if (b_ < 0) out += "-";
        mpq_class ab = abs(b_);
        if (ab != 1) out += ab.get_str() + "*";
        out += "sqrt(" + std::to_string(q_) + ")";
    }
    return out;
}

void validate_ground_q(long q) {
    if (q < 2) throw std::invalid_argument("ground q must be >= 2");
    // prime power test by trial division
    long p = 0;
    long m = q;
    for (long d = 2; d * d <= m; ++d) {
        if (m % d == 0) {
            p = d;
            while (m % d == 0) m /= d;
            if (m != 1) throw std::invalid_argument("ground q must be a prime power");
            break;
        }
    }
    if (p == 0) p = q;  // q prime
    long e = 0;
    for (m = q; m > 1; m /= p) ++e;
    if (e % 2 == 0) throw std::invalid_argument("ground q must not be a perfect square");
}

Scalar v_power(long k, long q) {
    // sqrt(q)^k = q^(k/2) for even k, q^((k-1)/2) * sqrt(q) for odd k
    bool odd = ((k % 2) + 2) % 2 == 1;
    long half = odd ? (k - 1) / 2 : k / 2;  // dividend even in both branches
    mpz_class pw;
    mpz_pow_ui(pw.get_mpz_t(), mpz_class(q).get_mpz_t(), (unsigned long)std::abs(half));
    mpq_class r = half >= 0 ? mpq_class(pw) : mpq_class(1) / mpq_class(pw);
    return odd ? Scalar(0, r, q) : Scalar(r, 0, q);
}

Scalar quantum_int(long m, long q) {
    // [m] = sum_{i=0..m-1} v^(m-1-2i), and [-m] = -[m]
    if (m == 0) return Scalar::zero(q);
    long s = m > 0 ? 1 : -1;
    long n = std::abs(m);
    Scalar acc = Scalar::zero(q);
    for (long i = 0; i < n; ++i) acc += v_power(n - 1 - 2 * i, q);
    return s > 0 ? acc : -acc;
}

Scalar n_factor(long l, long d, long q) {
    if (l < 0) throw std::invalid_argument("n_factor: negative length");
    Scalar acc = Scalar::one(q);
    for (long i = 1; i <= l; ++i) {
        acc *= (Scalar::one(q) - v_power(2 * i * d, q));
    }
    return acc;
}

}  // namespace ihall
