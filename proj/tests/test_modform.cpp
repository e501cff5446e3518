#include <doctest.h>

#include <latsec/errors.hpp>
#include <latsec/modform.hpp>

#include <cmath>
#include <map>

using latsec::bernoulli;
using latsec::convert_basis;
using latsec::exact_gain_at_one;
using latsec::extremal_theta;
using latsec::Int;
using latsec::QSeries;
using latsec::Rational;
using latsec::ThetaBasis;
using latsec::ThetaPoly;

namespace {

// divisor power sum by trial division, independent of the expansion code
Int sigma_oracle(long long m, unsigned power) {
    Int s = 0;
    for (long long d = 1; d <= m; ++d)
        if (m % d == 0) s += boost::multiprecision::pow(Int(d), power);
    return s;
}

}  // namespace

TEST_CASE("Bernoulli numbers") {
    CHECK(bernoulli(0) == 1);
    CHECK(bernoulli(1) == Rational(-1, 2));
    CHECK(bernoulli(2) == Rational(1, 6));
    CHECK(bernoulli(4) == Rational(-1, 30));
    CHECK(bernoulli(12) == Rational(-691, 2730));
    for (unsigned k = 3; k < 40; k += 2) CHECK(bernoulli(k) == 0);

    // defining recurrence as a property: sum_{j=0..m} C(m+1,j) B_j = 0
    for (unsigned m = 1; m <= 40; ++m) {
        Rational acc = 0;
        Int binom = 1;
        for (unsigned j = 0; j <= m; ++j) {
            acc += Rational(binom) * bernoulli(j);
            binom = binom * (m + 1 - j) / (j + 1);
        }
        CHECK(acc == 0);
    }
}

TEST_CASE("Eisenstein numeric values") {
    const double qt = std::exp(-2.0 * M_PI);

    // direct 10-term summation oracle for E_4
    double oracle = 1.0;
    for (int m = 1; m <= 10; ++m)
        oracle += 240.0 * std::pow(double(m), 3) * std::pow(qt, m) /
                  (1.0 - std::pow(qt, m));
    const double e4 = latsec::eisenstein_eval(4, qt);
    CHECK(std::abs(e4 - oracle) < 1e-12);
    CHECK(e4 == doctest::Approx(1.4557628922687093).epsilon(1e-10));

    // converges to 2 for large weights divisible by 4
    CHECK(std::abs(latsec::eisenstein_eval(48, qt) - 2.0) < 1e-3);

    // all terms vanish as qt -> 0+
    CHECK(latsec::eisenstein_eval(4, 1e-300) == doctest::Approx(1.0));

    CHECK_THROWS_AS(latsec::eisenstein_eval(5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(latsec::eisenstein_eval(2, 0.1), std::invalid_argument);
}

TEST_CASE("Eisenstein q-expansions") {
    const QSeries e4 = latsec::eisenstein_qexp(4, 4);
    CHECK(e4.coeff(0) == 1);
    CHECK(e4.coeff(1) == 240);
    CHECK(e4.coeff(2) == 2160);
    CHECK(e4.coeff(3) == 6720);
    for (long long m = 1; m < 4; ++m)
        CHECK(e4.coeff(Rational(m)) == Rational(240) * Rational(sigma_oracle(m, 3)));

    const QSeries e6 = latsec::eisenstein_qexp(6, 3);
    CHECK(e6.coeff(0) == 1);
    CHECK(e6.coeff(1) == -504);
    CHECK(e6.coeff(2) == -16632);
    CHECK(e6.coeff(2) == Rational(-504) * Rational(sigma_oracle(2, 5)));

    for (unsigned k : {4u, 6u, 8u, 10u, 40u})
        CHECK(latsec::eisenstein_qexp(k, 2).coeff(0) == 1);
}

TEST_CASE("discriminant expansion and value") {
    const QSeries d = latsec::delta_qexp(5);
    CHECK(d.coeff(0) == 0);
    CHECK(d.coeff(1) == 1);
    CHECK(d.coeff(2) == -24);
    CHECK(d.coeff(3) == 252);
    CHECK(d.coeff(4) == -1472);

    // cross-evaluation against (1/256)(theta2 theta3 theta4)^8 at e^{-pi}
    const double q = std::exp(-M_PI);
    const double t2 = latsec::theta_numeric(2, q, 1e-14);
    const double t3 = latsec::theta_numeric(3, q, 1e-14);
    const double t4 = latsec::theta_numeric(4, q, 1e-14);
    const double via_theta = std::pow(t2 * t3 * t4, 8) / 256.0;
    CHECK(std::abs(latsec::delta_eval(q * q) - via_theta) < 1e-10);
}

TEST_CASE("extremal theta polynomials") {
    const ThetaPoly p8 = extremal_theta(8);
    CHECK(p8.terms().size() == 1);
    CHECK(p8.terms().at({1, 0, 0}) == 1);

    const ThetaPoly p24 = extremal_theta(24);
    CHECK(p24.terms().at({3, 0, 0}) == 1);
    CHECK(p24.terms().at({0, 1, 0}) == -720);

    const ThetaPoly p32 = extremal_theta(32);
    CHECK(p32.terms().at({4, 0, 0}) == 1);
    CHECK(p32.terms().at({1, 1, 0}) == -960);

    CHECK(extremal_theta(48).terms().at({0, 2, 0}) == 125280);
    CHECK(extremal_theta(72).terms().at({0, 3, 0}) == -27302400);
    CHECK(extremal_theta(80).terms().at({1, 3, 0}) == -103488000);

    CHECK_THROWS_AS(extremal_theta(16), std::invalid_argument);
    CHECK_THROWS_AS(extremal_theta(7), std::invalid_argument);
}

TEST_CASE("weight bookkeeping is enforced") {
    ThetaPoly p(ThetaBasis::E4Delta, 24);
    CHECK_THROWS_AS(p.add_term({1, 0, 0}, 1), std::invalid_argument);  // weight 4 != 12
    CHECK_THROWS_AS(p.add_term({3, 0, 1}, 1), std::invalid_argument);  // third exponent
    p.add_term({3, 0, 0}, 1);
    ThetaPoly q(ThetaBasis::ThetaPowers, 24);
    CHECK_THROWS_AS(q.add_term({1, 1, 0}, 1), std::invalid_argument);  // degree 2 != 3
    q.add_term({1, 1, 1}, 1);
}

TEST_CASE("basis conversion") {
    // E4 -> (A + B + C)/2
    const ThetaPoly e4 = convert_basis(extremal_theta(8), ThetaBasis::ThetaPowers);
    CHECK(e4.terms().at({1, 0, 0}) == Rational(1, 2));
    CHECK(e4.terms().at({0, 1, 0}) == Rational(1, 2));
    CHECK(e4.terms().at({0, 0, 1}) == Rational(1, 2));

    // Delta -> ABC/256, via a one-term Delta polynomial of weight 12
    ThetaPoly delta(ThetaBasis::E4Delta, 24);
    delta.add_term({0, 1, 0}, 1);
    const ThetaPoly dabc = convert_basis(delta, ThetaBasis::ThetaPowers);
    CHECK(dabc.terms().size() == 1);
    CHECK(dabc.terms().at({1, 1, 1}) == Rational(1, 256));

    // E4^3 - 720 Delta -> (1/8)(A+B+C)^3 - (45/16) ABC
    const ThetaPoly leech = convert_basis(extremal_theta(24), ThetaBasis::ThetaPowers);
    CHECK(leech.terms().at({3, 0, 0}) == Rational(1, 8));
    CHECK(leech.terms().at({2, 1, 0}) == Rational(3, 8));
    CHECK(leech.terms().at({1, 1, 1}) == Rational(6, 8) - Rational(45, 16));

    // round trip back to the E4/Delta basis
    const ThetaPoly back = convert_basis(leech, ThetaBasis::E4Delta);
    CHECK(back.terms() == extremal_theta(24).terms());

    // a bare A monomial is not a polynomial in E4 (weight 4)
    ThetaPoly bare(ThetaBasis::ThetaPowers, 8);
    bare.add_term({1, 0, 0}, 1);
    CHECK_THROWS_AS(convert_basis(bare, ThetaBasis::E4Delta), latsec::ConversionError);
}

TEST_CASE("exact gains reproduce the classical table") {
    CHECK(exact_gain_at_one(extremal_theta(8)) == Rational(4, 3));
    CHECK(exact_gain_at_one(extremal_theta(24)) == Rational(256, 63));
    CHECK(exact_gain_at_one(extremal_theta(32)) == Rational(64, 9));
    CHECK(exact_gain_at_one(extremal_theta(48)) == Rational(524288, 19467));
    CHECK(exact_gain_at_one(extremal_theta(72)) == Rational(Int(134217728), Int(685881)));
    CHECK(exact_gain_at_one(extremal_theta(80)) == Rational(Int(536870912), Int(1414413)));

    ThetaPoly bad(ThetaBasis::E4Delta, 12);  // weight 6: no monomials, dim not 0 mod 8
    CHECK_THROWS_AS(exact_gain_at_one(bad), std::invalid_argument);
}

TEST_CASE("theta polynomial q-expansions") {
    const QSeries e8 = latsec::theta_poly_qexp(extremal_theta(8), 6);
    CHECK(e8.coeff(0) == 1);
    CHECK(e8.coeff(2) == 240);
    CHECK(e8.coeff(4) == 2160);
    CHECK(e8.coeff(1) == 0);
    CHECK(e8.coeff(3) == 0);

    const QSeries leech = latsec::theta_poly_qexp(extremal_theta(24), 5);
    CHECK(leech.coeff(0) == 1);
    CHECK(leech.coeff(2) == 0);  // extremality witness: no vectors of norm 2
    CHECK(leech.coeff(4) == 196560);

    // structural: constant term 1, nonnegative integer coefficients
    for (int n : {8, 24, 32, 48, 72, 80}) {
        const QSeries s = latsec::theta_poly_qexp(extremal_theta(n), 12);
        CHECK(s.coeff(0) == 1);
        for (const auto& [k, c] : s.terms()) {
            CHECK(c >= 0);
            CHECK(boost::multiprecision::denominator(c) == 1);
        }
    }
}

TEST_CASE("extremality witness: coefficients vanish below the minimum norm") {
    // minimum norm of an extremal even unimodular lattice: 2 + 2 floor(n/24)
    const std::map<int, int> min_norm = {{8, 2},  {24, 4},  {32, 4},
                                         {48, 6}, {72, 8}, {80, 8}};
    for (const auto& [n, mn] : min_norm) {
        const QSeries s = latsec::theta_poly_qexp(extremal_theta(n), 10);
        for (int m = 1; m < mn; ++m) CHECK(s.coeff(Rational(m)) == 0);
        CHECK(s.coeff(Rational(mn)) > 0);
    }
}

TEST_CASE("both expansion routes agree") {
    for (int n : {8, 24, 48}) {
        const ThetaPoly p = extremal_theta(n);
        const QSeries via_e4 = latsec::theta_poly_qexp(p, 20);
        const QSeries via_theta =
            latsec::theta_poly_qexp(convert_basis(p, ThetaBasis::ThetaPowers), 20);
        for (long long q4 = 0; q4 < 80; ++q4)
            CHECK(via_e4.coeff(Rational(q4, 4)) == via_theta.coeff(Rational(q4, 4)));
    }
}

TEST_CASE("numeric consistency across nomes") {
    // Theta(q = e^{-pi}) computed via the theta-powers route must match the
    // E4/Delta evaluations at qt = q^2 = e^{-2 pi}
    const double q = std::exp(-M_PI);
    const double qt = q * q;
    const double e4 = latsec::eisenstein_eval(4, qt);
    const double dl = latsec::delta_eval(qt);
    const double composed = e4 * e4 * e4 - 720.0 * dl;
    const double direct = latsec::theta_poly_eval(extremal_theta(24), q);
    CHECK(std::abs(direct - composed) < 1e-9);
}
