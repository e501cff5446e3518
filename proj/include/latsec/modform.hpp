#pragma once

// Eisenstein series, Bernoulli numbers, the discriminant Delta, and symbolic
// theta polynomials of extremal even unimodular lattices.
//
// Series here use the modular-form nome qt = q^2 (q being the lattice-side
// nome); nome_square() bridges the two conventions.

#include <latsec/qseries.hpp>
#include <latsec/rational.hpp>

#include <array>
#include <map>

namespace latsec {

// Exact B_k via the defining recurrence sum_{j<=m} C(m+1,j) B_j = 0.
// Memoized; safe for concurrent use.
Rational bernoulli(unsigned k);

// E_k(qt) = 1 - (2k/B_k) sum_{m>=1} m^{k-1} qt^m / (1 - qt^m), summed with a
// certified tail below tol. k must be even and >= 4. For k = 0 (mod 4) the
// Bernoulli number is negative, so the sum contributes positively.
double eisenstein_eval(unsigned k, double qt, double tol = 1e-13);

// 1 + (-2k/B_k) sum sigma_{k-1}(m) qt^m, exact rational coefficients.
QSeries eisenstein_qexp(unsigned k, int order);

// Delta = (E_4^3 - E_6^2) / 1728.
QSeries delta_qexp(int order);

// Numeric Delta. The defining difference cancels catastrophically as qt -> 1;
// accurate for qt <= ~0.05, which covers y >= 1/2 at qt = e^{-2 pi y}.
double delta_eval(double qt, double tol = 1e-13);

// --------------------------------------------------------------------------

enum class ThetaBasis {
    E4Delta,      // monomials E4^a * Delta^b, weight 4a + 12b = dim/2
    ThetaPowers,  // monomials A^i B^j C^k in A = theta_2^8, B = theta_3^8,
                  // C = theta_4^8; total degree dim/8
};

// Exact polynomial representing the theta series of an even unimodular
// lattice in one of the two generator bases above.
class ThetaPoly {
public:
    // E4Delta keys are {a, b, 0}; ThetaPowers keys are {i, j, k}.
    using Key = std::array<int, 3>;
    using TermMap = std::map<Key, Rational>;

    ThetaPoly(ThetaBasis basis, int dim);

    // Enforces the homogeneity invariant of the basis; throws on violation.
    void add_term(const Key& key, const Rational& c);

    [[nodiscard]] ThetaBasis basis() const { return basis_; }
    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int weight() const { return dim_ / 2; }
    [[nodiscard]] const TermMap& terms() const { return terms_; }

private:
    ThetaBasis basis_;
    int dim_;
    TermMap terms_;
};

// The classical extremal theta series in the (E4, Delta) basis for
// n in {8, 24, 32, 48, 72, 80}.
ThetaPoly extremal_theta(int n);

// Exact substitution E4 = (A+B+C)/2, Delta = ABC/256, or the inverse where
// it exists (throws ConversionError otherwise). q-expansions are preserved.
ThetaPoly convert_basis(const ThetaPoly& p, ThetaBasis target);

// Secrecy gain at y = 1 as an exact rational: converts to the theta-powers
// basis and applies the lemniscatic substitution (A,B,C) -> (1,4,1), valid
// because theta_2^8 = theta_4^8 and theta_3^8 = 4 theta_4^8 at q = e^{-pi};
// the result is theta_3^n / Theta = 4^{n/8} / P(1,4,1). Requires dim = 0
// (mod 8).
Rational exact_gain_at_one(const ThetaPoly& p);

// q-expansion in the lattice nome: the coefficient at exponent m is the
// number of lattice vectors of squared norm m.
QSeries theta_poly_qexp(const ThetaPoly& p, int order);

// Numeric Theta(q) at the lattice nome q = e^{-pi y}. Goes through the
// theta-powers basis, so it stays accurate for all 0 < q < 1 (the E4/Delta
// route cancels badly for small y).
double theta_poly_eval(const ThetaPoly& p, double q, double tol = 1e-14);

}  // namespace latsec
