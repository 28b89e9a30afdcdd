#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ihall/scalar.hpp"

#include <random>

using namespace ihall;

TEST_CASE("defining relation s^2 = q") {
    for (long q : {2L, 3L, 5L, 7L, 8L}) {
        Scalar s = Scalar::sqq(q);
        CHECK(s * s == Scalar::of_int(q, q));
    }
}

TEST_CASE("perfect square ground q rejected") {
    CHECK_THROWS(validate_ground_q(4));
    CHECK_THROWS(validate_ground_q(9));
    CHECK_THROWS(validate_ground_q(6));   // not a prime power
    CHECK_THROWS(validate_ground_q(1));
    CHECK_NOTHROW(validate_ground_q(2));
    CHECK_NOTHROW(validate_ground_q(8));
    CHECK_NOTHROW(validate_ground_q(27));
}

TEST_CASE("rationalization 1/(s - 1/s) at q=2 equals sqrt(2)") {
    // Hand-check oracle: (s - 1/s) * s = q - 1 over exact rationals, so
    // 1/(s - 1/s) = s/(q-1); at q=2 that is sqrt(2).
    long q = 2;
    Scalar s = Scalar::sqq(q);
    Scalar d = s - s.inverse();
    Scalar lhs = d.inverse();
    CHECK(d * s == Scalar::of_int(q - 1, q));
    CHECK(lhs == Scalar(0, 1, q));
    CHECK(lhs.str() == "sqrt(2)");
}

TEST_CASE("v_power basics") {
    CHECK(v_power(0, 3) == Scalar::one(3));
    CHECK(v_power(2, 3) == Scalar::of_int(3, 3));
    CHECK(v_power(-2, 3) == Scalar(mpq_class(1, 3), 0, 3));
    CHECK(v_power(3, 2) == Scalar(0, 2, 2));
    CHECK(v_power(-1, 2) == Scalar(0, mpq_class(1, 2), 2));
    for (long k = -20; k <= 20; ++k)
        CHECK(v_power(k, 5) * v_power(-k, 5) == Scalar::one(5));
}

TEST_CASE("quantum integers") {
    CHECK(quantum_int(1, 7) == Scalar::one(7));
    CHECK(quantum_int(0, 7) == Scalar::zero(7));
    // [2] at q=2: v + 1/v = (3/2) sqrt(2)
    CHECK(quantum_int(2, 2) == Scalar(0, mpq_class(3, 2), 2));
    for (long m = -10; m <= 10; ++m)
        CHECK(quantum_int(-m, 3) == -quantum_int(m, 3));
    // [m] (v - v^-1) == v^m - v^-m
    for (long m = 1; m <= 8; ++m) {
        Scalar v = Scalar::sqq(3);
        Scalar lhs = quantum_int(m, 3) * (v - v.inverse());
        CHECK(lhs == v_power(m, 3) - v_power(-m, 3));
    }
}

TEST_CASE("n_factor products") {
    CHECK(n_factor(0, 1, 2) == Scalar::one(2));
    CHECK(n_factor(2, 1, 2) == Scalar::of_int(3, 2));    // (1-2)(1-4) = 3
    CHECK(n_factor(1, 2, 2) == Scalar::of_int(-3, 2));   // 1-4 = -3
    CHECK(n_factor(3, 1, 3) == Scalar::of_int(-416, 3)); // (1-3)(1-9)(1-27)
}

TEST_CASE("field axioms on random samples, exact") {
    std::mt19937 rng(12345);
    auto rnd = [&](long q) {
        std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
        return Scalar(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)), q);
    };
    for (long q : {2L, 3L}) {
        for (int i = 0; i < 200; ++i) {
            Scalar a = rnd(q), b = rnd(q), c = rnd(q);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            CHECK(a + b == b + a);
            CHECK(a * b == b * a);
            if (!a.is_zero()) CHECK(a * a.inverse() == Scalar::one(q));
        }
    }
}

TEST_CASE("mismatched ground q is an error") {
    CHECK_THROWS(Scalar::one(2) + Scalar::one(3));
    CHECK_THROWS(Scalar::one(2) * Scalar::sqq(5));
}

TEST_CASE("rendering") {
    CHECK(Scalar::zero(2).str() == "0");
    CHECK(Scalar(mpq_class(1, 2), mpq_class(-3, 4), 2).str() == "1/2 - 3/4*sqrt(2)");
    CHECK(Scalar(-2, 1, 3).str() == "-2 + sqrt(3)");
}
