#pragma once

// Truncated formal series in the nome q with exact rational coefficients.
//
// Exponents live on the quarter-integer grid: every exponent e satisfies
// 4e in Z, which makes the half-integer-squared exponents of theta_2 exact.
// Internally a term is keyed by 4e (an int64), so grid closure holds by
// construction. A series is exact for all exponents strictly below its
// truncation order; arithmetic never extends precision silently (the result
// order is the minimum over the operands, which is the correct product
// truncation because all exponents are >= 0).
//
// Each series carries a growth certificate (scale C, degree d) asserting
// |coeff(e)| <= C * (1+e)^d for every exponent e, including those beyond the
// truncation order. The certificate is set structurally by the series
// constructors in this library and composed through arithmetic; evaluation
// uses it to certify that the discarded tail is below a requested tolerance.
// Series assembled from zero()/constant()/set_coeff() are exact polynomials
// (their tail is identically zero) and are flagged as such.

#include <latsec/rational.hpp>

#include <cstdint>
#include <map>
#include <vector>

namespace latsec {

class QSeries {
public:
    // map key = 4 * exponent
    using TermMap = std::map<std::int64_t, Rational>;

    QSeries() = default;

    static QSeries zero(const Rational& trunc_order);
    static QSeries constant(const Rational& value, const Rational& trunc_order);

    // Throws std::invalid_argument if exponent is off the quarter grid,
    // negative, or >= trunc_order.
    void set_coeff(const Rational& exponent, const Rational& c);

    [[nodiscard]] Rational coeff(const Rational& exponent) const;
    [[nodiscard]] const TermMap& terms() const { return terms_; }
    [[nodiscard]] Rational trunc_order() const { return Rational(trunc_q4_, 4); }
    [[nodiscard]] std::int64_t trunc_q4() const { return trunc_q4_; }

    [[nodiscard]] double growth_scale() const { return growth_scale_; }
    [[nodiscard]] int growth_degree() const { return growth_degree_; }
    [[nodiscard]] bool tail_is_zero() const { return tail_zero_; }
    // Marking a series as a genuine truncation installs its tail bound.
    void set_growth(double scale, int degree);

    // Drops terms at exponents >= new_order and lowers the truncation order.
    [[nodiscard]] QSeries truncated(const Rational& new_order) const;

    friend QSeries operator+(const QSeries& a, const QSeries& b);
    friend QSeries operator-(const QSeries& a, const QSeries& b);
    friend QSeries operator*(const QSeries& a, const QSeries& b);
    friend QSeries operator*(const Rational& c, const QSeries& a);
    [[nodiscard]] QSeries pow(unsigned k) const;

private:
    TermMap terms_;
    std::int64_t trunc_q4_ = 0;  // series exact for 4*exponent < trunc_q4_
    double growth_scale_ = 0.0;
    int growth_degree_ = 0;
    bool tail_zero_ = true;

    void prune_zeros();
};

// q-expansion of the Jacobi theta constant theta_{which}(q), which in {2,3,4},
// truncated below `order`:
//   theta_3 = 1 + 2 sum q^(n^2),  theta_4 with (-1)^n signs,
//   theta_2 = 2 sum q^((n+1/2)^2)  (quarter-integer exponents).
QSeries theta_expansion(int which, const Rational& order = Rational(200));

// Sum of the stored terms at 0 < q < 1, with the discarded tail certified
// below tail_tol via the growth certificate. Throws PrecisionError when the
// bound cannot be established at the series' truncation order.
double eval_series(const QSeries& s, double q, double tail_tol = 1e-14);

// Direct adaptive summation of the defining theta sums; agrees with
// eval_series over theta_expansion within the requested tolerance.
double theta_numeric(int which, double q, double tol = 1e-14);

// Reinterprets a series in the nome qt as a series in q via qt = q^2:
// exponents and truncation order double, coefficients are untouched. This is
// the single adapter between the modular-form nome (qt = e^{-2 pi y}) and the
// lattice nome (q = e^{-pi y}); all cross-module conversions go through it.
QSeries nome_square(const QSeries& s);

// A finite sum  sum_i c_i * theta_2^{a_i} theta_3^{b_i} theta_4^{c_i} used for
// lattices whose theta series has a closed form in the Jacobi constants.
struct ThetaExpr {
    struct Term {
        Rational coeff;
        int p2 = 0, p3 = 0, p4 = 0;
    };
    std::vector<Term> terms;

    [[nodiscard]] double eval(double q, double tol = 1e-14) const;
    [[nodiscard]] QSeries qexp(const Rational& order) const;
};

}  // namespace latsec
