#include <doctest.h>

#include <latsec/errors.hpp>
#include <latsec/qseries.hpp>

#include <cmath>
#include <map>

using latsec::eval_series;
using latsec::QSeries;
using latsec::Rational;
using latsec::theta_expansion;

namespace {

// Brute-force coefficient oracles from the defining sums, independent of the
// series engine. Keys are 4 * exponent.
//
// theta3^k: #{x in Z^k : sum x_i^2 = m}
// theta4^k: same, weighted by (-1)^{x_1 + ... + x_k}
// theta2^k: x in (Z + 1/2)^k, exponents sum (n_i + 1/2)^2
std::map<long long, long long> theta_pow_oracle(int which, int k, long long max_q4) {
    std::map<long long, long long> acc;
    acc[0] = 1;
    const int box = 1 + static_cast<int>(std::sqrt(static_cast<double>(max_q4)));
    for (int coord = 0; coord < k; ++coord) {
        std::map<long long, long long> next;
        for (const auto& [e, c] : acc) {
            for (int n = -box; n <= box; ++n) {
                long long e1;  // 4 * exponent of this coordinate
                long long sign = 1;
                if (which == 3) {
                    e1 = 4LL * n * n;
                } else if (which == 4) {
                    e1 = 4LL * n * n;
                    sign = (n % 2 == 0) ? 1 : -1;
                } else {
                    e1 = (2LL * n + 1) * (2LL * n + 1);
                }
                if (e + e1 <= max_q4) next[e + e1] += sign * c;
            }
        }
        acc = std::move(next);
    }
    return acc;
}

}  // namespace

TEST_CASE("theta expansions match the defining sums") {
    const QSeries t3 = theta_expansion(3, 10);
    CHECK(t3.coeff(0) == 1);
    CHECK(t3.coeff(1) == 2);
    CHECK(t3.coeff(4) == 2);
    CHECK(t3.coeff(9) == 2);
    CHECK(t3.coeff(2) == 0);
    CHECK(t3.terms().size() == 4);

    const QSeries t4 = theta_expansion(4, 10);
    CHECK(t4.coeff(1) == -2);
    CHECK(t4.coeff(4) == 2);
    CHECK(t4.coeff(9) == -2);

    const QSeries t2 = theta_expansion(2, 7);
    CHECK(t2.coeff(Rational(1, 4)) == 2);
    CHECK(t2.coeff(Rational(9, 4)) == 2);
    CHECK(t2.coeff(Rational(25, 4)) == 2);
    CHECK(t2.terms().size() == 3);

    CHECK_THROWS_AS(theta_expansion(5, 10), std::invalid_argument);
    CHECK_THROWS_AS(theta_expansion(3, 0), std::invalid_argument);
}

TEST_CASE("series product matches the two-squares count") {
    const QSeries prod = theta_expansion(3, 5) * theta_expansion(3, 5);
    const auto oracle = theta_pow_oracle(3, 2, 4 * 5 - 1);
    CHECK(prod.coeff(0) == 1);
    CHECK(prod.coeff(1) == 4);
    CHECK(prod.coeff(2) == 4);
    CHECK(prod.coeff(3) == 0);
    CHECK(prod.coeff(4) == 4);
    for (const auto& [k, c] : prod.terms())
        CHECK(c == Rational(oracle.count(k) ? oracle.at(k) : 0));
}

TEST_CASE("subtraction and cancellation prune to the zero series") {
    const QSeries t3 = theta_expansion(3, 12);
    const QSeries diff = t3 - t3;
    CHECK(diff.terms().empty());
    CHECK(diff.trunc_order() == 12);
    const QSeries shifted = (t3 + t3) - t3;
    for (const auto& [k, c] : t3.terms()) CHECK(shifted.coeff(Rational(k, 4)) == c);
}

TEST_CASE("empty power is the constant series") {
    const QSeries one = theta_expansion(3, 8).pow(0);
    CHECK(one.coeff(0) == 1);
    CHECK(one.terms().size() == 1);
    CHECK(one.trunc_order() == 8);
}

TEST_CASE("Jacobi identity theta2^4 + theta4^4 = theta3^4") {
    const Rational order(12);
    const QSeries lhs =
        theta_expansion(2, order).pow(4) + theta_expansion(4, order).pow(4);
    const QSeries rhs = theta_expansion(3, order).pow(4);

    // engine vs engine, every coefficient below the truncation order
    for (long long q4 = 0; q4 < 48; ++q4) {
        CHECK(lhs.coeff(Rational(q4, 4)) == rhs.coeff(Rational(q4, 4)));
    }
    // and against the brute-force sums
    const auto o2 = theta_pow_oracle(2, 4, 47);
    const auto o4 = theta_pow_oracle(4, 4, 47);
    const auto o3 = theta_pow_oracle(3, 4, 47);
    for (long long q4 = 0; q4 < 48; ++q4) {
        const long long a = (o2.count(q4) ? o2.at(q4) : 0) + (o4.count(q4) ? o4.at(q4) : 0);
        const long long b = o3.count(q4) ? o3.at(q4) : 0;
        CHECK(a == b);
        CHECK(rhs.coeff(Rational(q4, 4)) == b);
    }
}

TEST_CASE("quarter-grid closure and off-grid rejection") {
    QSeries s = QSeries::zero(4);
    CHECK_THROWS_AS(s.set_coeff(Rational(1, 3), 1), std::invalid_argument);
    CHECK_THROWS_AS(s.set_coeff(Rational(-1, 2), 1), std::invalid_argument);
    CHECK_THROWS_AS(s.set_coeff(5, 1), std::invalid_argument);
    s.set_coeff(Rational(3, 4), Rational(7, 2));
    CHECK(s.coeff(Rational(3, 4)) == Rational(7, 2));
    // products of quarter-grid series stay on the grid by construction
    const QSeries p = theta_expansion(2, 6) * theta_expansion(2, 6);
    for (const auto& [k, c] : p.terms()) CHECK(k % 2 == 0);  // half-integer grid
}

TEST_CASE("series evaluation at the lemniscatic point") {
    const double q = std::exp(-M_PI);
    const QSeries t3 = theta_expansion(3, 100);
    const double v = eval_series(t3, q, 1e-14);
    const double reference = std::pow(M_PI, 0.25) / std::tgamma(0.75);
    CHECK(std::abs(v - reference) < 1e-9);

    const double v2 = eval_series(theta_expansion(2, 100), q, 1e-14);
    const double v4 = eval_series(theta_expansion(4, 100), q, 1e-14);
    CHECK(std::abs(v2 - v4) < 1e-12);

    CHECK(eval_series(QSeries::constant(1, 100), 0.99, 1e-14) == 1.0);
    CHECK(eval_series(QSeries::constant(1, 2), 0.5, 1e-14) == 1.0);
}

TEST_CASE("evaluation refuses uncertifiable tails") {
    const QSeries t3 = theta_expansion(3, 5);
    CHECK_THROWS_AS(eval_series(t3, 0.9, 1e-12), latsec::PrecisionError);
    CHECK_THROWS_AS(eval_series(t3, 1.5, 1e-12), std::domain_error);
}

TEST_CASE("numeric theta values") {
    const double q = std::exp(-M_PI);
    const double t3 = latsec::theta_numeric(3, q, 1e-13);
    CHECK(t3 == doctest::Approx(1.086434811213308).epsilon(1e-12));
    CHECK(std::abs(latsec::theta_numeric(3, q, 1e-13) /
                       latsec::theta_numeric(4, q, 1e-13) -
                   std::pow(2.0, 0.25)) < 1e-10);

    // 20-term direct alternating sum as oracle at q = 1/2
    double direct = 1.0;
    for (int n = 1; n <= 20; ++n)
        direct += 2.0 * ((n % 2) ? -1.0 : 1.0) * std::pow(0.5, double(n) * n);
    CHECK(std::abs(latsec::theta_numeric(4, 0.5, 1e-13) - direct) < 1e-12);

    CHECK_THROWS_AS(latsec::theta_numeric(1, 0.5, 1e-13), std::invalid_argument);
}

TEST_CASE("numeric and series evaluation agree") {
    for (int which : {2, 3, 4}) {
        for (double q : {0.1, 0.3, std::exp(-M_PI / 4.0)}) {
            const double tol = 1e-12;
            const double a = latsec::theta_numeric(which, q, tol);
            const double b = eval_series(theta_expansion(which, 100), q, tol);
            CHECK(std::abs(a - b) < 2 * tol);
        }
    }
}

TEST_CASE("lemniscatic identities hold to 1e-10") {
    const double q = std::exp(-M_PI);
    const double t2 = latsec::theta_numeric(2, q, 1e-13);
    const double t3 = latsec::theta_numeric(3, q, 1e-13);
    const double t4 = latsec::theta_numeric(4, q, 1e-13);
    CHECK(std::abs(t2 - t4) < 1e-10);
    CHECK(std::abs(t3 - std::pow(2.0, 0.25) * t4) < 1e-10);
}

TEST_CASE("nome squaring doubles exponents") {
    QSeries s = QSeries::zero(3);
    s.set_coeff(0, 1);
    s.set_coeff(1, 240);
    s.set_coeff(2, 2160);
    const QSeries doubled = latsec::nome_square(s);
    CHECK(doubled.trunc_order() == 6);
    CHECK(doubled.coeff(2) == 240);
    CHECK(doubled.coeff(4) == 2160);
    CHECK(doubled.coeff(1) == 0);
}

TEST_CASE("truncation drops terms and lowers the order") {
    const QSeries t3 = theta_expansion(3, 10).truncated(5);
    CHECK(t3.trunc_order() == 5);
    CHECK(t3.coeff(4) == 2);
    CHECK(t3.coeff(9) == 0);
    CHECK_THROWS_AS(static_cast<void>(t3.truncated(20)), std::invalid_argument);
}
