#pragma once

// Concrete lattices given by exact rational Gram matrices: structural
// predicates, volumes, theta coefficients by complete short-vector
// enumeration, the dual-theta transformation, and a named catalog.

#include <latsec/qseries.hpp>
#include <latsec/rational.hpp>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace latsec {

using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

class Lattice {
public:
    // Validates symmetry and exact positive definiteness (rational LDL^T;
    // every pivot, hence every leading principal minor, must be positive).
    Lattice(std::string name, RationalMatrix gram,
            std::optional<ThetaExpr> closed_form = std::nullopt);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] int dim() const { return static_cast<int>(gram_.rows()); }
    [[nodiscard]] const RationalMatrix& gram() const { return gram_; }
    [[nodiscard]] const std::optional<ThetaExpr>& closed_form_theta() const {
        return closed_form_;
    }

    [[nodiscard]] const Rational& det() const { return det_; }  // = volume^2
    [[nodiscard]] double volume() const;

    // Dual lattice: Gram = G^{-1}, computed exactly.
    [[nodiscard]] Lattice dual() const;

private:
    std::string name_;
    RationalMatrix gram_;
    std::optional<ThetaExpr> closed_form_;
    Rational det_;
};

struct LatticePredicates {
    bool integral = false;
    bool even = false;
    bool unimodular = false;
};

// integral <=> all Gram entries in Z; even <=> integral and all diagonal
// entries even (then every x^T G x is even); unimodular <=> integral, det 1.
LatticePredicates predicates(const Lattice& L);

// Vector counts by exact squared norm, complete for all norms <= max_norm.
struct ThetaCoeffs {
    std::map<Rational, std::int64_t> counts;
    Rational max_norm;

    [[nodiscard]] std::int64_t count(const Rational& norm) const;
};

struct EnumerationOptions {
    std::uint64_t node_budget = 50'000'000;
};

// Complete count of lattice vectors with x^T G x <= max_norm via
// Cholesky-based branch-and-bound. Pruning runs in floating point with the
// radius padded by 1e-6 so no boundary vector is missed; every surviving
// candidate is re-checked with exact integer arithmetic on the
// denominator-cleared Gram. Exceeding the node budget raises ResourceError
// (no partial results).
ThetaCoeffs theta_by_enumeration(const Lattice& L, const Rational& max_norm,
                                 const EnumerationOptions& opts = {});

// Theta_L(y) = sum over the lattice of e^{-pi y |x|^2}, with the truncation
// tail certified below tol by a scaled Z^n majorant built from a lower bound
// on the Gram's smallest eigenvalue.
double theta_numeric_lattice(const Lattice& L, double y, double tol = 1e-12,
                             const EnumerationOptions& opts = {});

// Theta of the dual at y, via Theta_{L*}(y) = Vol(L) y^{-n/2} Theta_L(1/y).
double dual_theta_via_jacobi(const Lattice& L, double y, double tol = 1e-12);

// Smallest enumeration radius M such that the discarded theta tail
// sum_{Q > M} e^{-pi y Q} is certified below tol, given a lower bound on the
// Gram's smallest eigenvalue.
double theta_tail_radius(int dim, double lambda_min, double y, double tol);

// Padded floating lower bound on the Gram's smallest eigenvalue.
double lattice_lambda_min(const Lattice& L);

// Named catalog: "Zn(k)", "Dn(k)" (k >= 2, "Zn:k"/"Dn:k" also accepted),
// "D4", "E8", "Leech". Closed-form theta attached where one exists.
Lattice catalog(const std::string& name);
std::vector<std::string> catalog_names();

// {"name": ..., "dim": n, "gram": [[entries]]} with entries either JSON
// numbers or rational strings like "3/4".
Lattice lattice_from_json(const nlohmann::json& doc);

}  // namespace latsec
