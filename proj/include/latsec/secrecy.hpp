#pragma once

// Secrecy function and gain, the Siegel-Weil lower bound on the best gain in
// a given dimension, and the asymptotic growth estimate.

#include <latsec/lattice.hpp>
#include <latsec/modform.hpp>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace latsec {

// Uniform theta evaluator over the two kinds of sources. For a Gram-backed
// lattice without a closed form, enumeration results are cached and reused
// across evaluation points.
class ThetaSource {
public:
    explicit ThetaSource(Lattice L);
    explicit ThetaSource(ThetaPoly p);

    [[nodiscard]] int dim() const;
    [[nodiscard]] double volume() const;  // 1 for polynomial sources
    [[nodiscard]] std::string label() const;
    [[nodiscard]] const std::optional<ThetaPoly>& poly() const { return poly_; }

    // Theta(y) at the source's own scale.
    [[nodiscard]] double theta(double y, double tol = 1e-13) const;

private:
    std::optional<Lattice> lattice_;
    std::optional<ThetaPoly> poly_;
    std::optional<ThetaPoly> poly_theta_powers_;  // cached conversion
    struct EnumCache;
    std::shared_ptr<EnumCache> cache_;  // lazy, guarded
};

// Xi(y) = Theta_{Z^n scaled to the source's volume}(y) / Theta_source(y)
//       = theta_3(e^{-pi y Vol^{2/n}})^n / Theta_source(y).
//
// Comparing against the equal-volume cubic lattice makes the gain scale
// invariant while keeping y in the source's own physical units, so the
// argmax of a non-unit-volume lattice (D4: y = 1/sqrt 2) lands where its
// operating point actually is. For unit volume this is theta_3^n / Theta.
double secrecy_function(const ThetaSource& src, double y, double tol = 1e-13);
double secrecy_function(const Lattice& L, double y, double tol = 1e-13);
double secrecy_function(const ThetaPoly& p, double y, double tol = 1e-13);

enum class GainMethod { ExactAtOne, NumericSearch };

struct SecrecyResult {
    double gain = 0.0;
    std::optional<Rational> gain_exact;
    double y_star = 1.0;
    double y_star_db = 0.0;  // 10 log10(y_star)
    GainMethod method = GainMethod::NumericSearch;
    // max over y in {1.5, 2, 4} of |Xi(y) - Xi(1/y)|; ~0 exactly for
    // unit-volume unimodular sources.
    double symmetry_residual = 0.0;
    bool boundary_warning = false;      // numeric maximum sat on the search edge
    bool assumes_argmax_at_one = false; // exact mode reports y = 1 without proof
};

struct GainSearch {
    double t_min_db = -10.0;
    double t_max_db = 10.0;
    int grid_points = 101;   // coarse scan guarding against non-unimodal shapes
    double tol_t = 1e-6;     // golden-section tolerance on t = 10 log10 y
    double eval_tol = 1e-13;
};

// Exact mode needs an even unimodular polynomial source with dim = 0 (mod 8);
// it returns the exact rational gain at y = 1 and flags the assumption that
// the supremum is attained there. Numeric mode maximizes over the dB grid
// plus golden-section refinement.
SecrecyResult secrecy_gain(const ThetaSource& src, GainMethod mode,
                           const GainSearch& search = {});

// Lower bound on the best secrecy gain among even unimodular lattices of
// dimension n (multiple of 8):  theta_3(e^{-pi})^n / E_{n/2}(e^{-2 pi}).
double siegel_weil_bound(int n, double tol = 1e-13);

// (1/2) c^n with c = pi^{1/4} / Gamma(3/4), the large-n limit of the bound.
double asymptotic_bound(int n);

// Evenly spaced samples (t_db, Xi) for plotting.
std::vector<std::pair<double, double>> secrecy_curve(const ThetaSource& src,
                                                     double t_min_db,
                                                     double t_max_db,
                                                     int steps,
                                                     double tol = 1e-13);

}  // namespace latsec
