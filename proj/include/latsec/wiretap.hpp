#pragma once

// Gaussian wiretap system algebra (eavesdropper correct-decision formula,
// operating point, rate relations) and a Monte Carlo coset-decoding
// simulator at small dimension.

#include <latsec/lattice.hpp>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>

namespace latsec {

// Rates are in bits per complex channel use; n real dimensions carry n/2
// complex uses, hence the exponent n*Rs/2 in the volume relation
// Vol(Lambda_e) = 2^{n Rs / 2} Vol(Lambda_b).
struct WiretapConfig {
    int n = 0;
    double sigma_b = 0.0;
    double sigma_e = 0.0;
    double total_rate = 0.0;    // R
    double secrecy_rate = 0.0;  // R_s
    double vol_b = 1.0;         // Vol(Lambda_b); taken from lattice_b when present
    std::optional<Lattice> lattice_e;  // coarse lattice (confuses the eavesdropper)
    std::optional<Lattice> lattice_b;  // fine lattice (simulator only)
    // Coordinates of the Lambda_e generators in the Lambda_b basis (columns).
    // Required for the simulator unless it can be derived; Gram matrices
    // alone do not determine an embedding.
    std::optional<Eigen::MatrixXi> embedding;
};

// Checks sigma_e > sigma_b (positive secrecy capacity), rate sanity, and,
// when both lattices are present, derives/verifies the integer embedding
// exactly (G_e = M^T G_b M). Throws ConfigError on violation. Returns the
// config with embedding and vol_b filled in.
WiretapConfig validate_config(WiretapConfig cfg);

struct EveFormulaResult {
    double value = 0.0;
    // The closed form approximates the correct-decision probability only in
    // the moderate-to-high secrecy-rate regime; values above 1 are returned
    // raw and flagged, never clamped.
    bool regime_flag = false;
};

// (1/(sqrt(2 pi) sigma_e))^n Vol(Lambda_b) Theta_{Lambda_e}(1/(2 pi sigma_e^2)).
EveFormulaResult eve_correct_prob_formula(const WiretapConfig& cfg,
                                          double tol = 1e-12);

// y = 2^{-(R - Rs)} gamma_e / (2 pi).
double operating_point_y(double total_rate, double secrecy_rate, double gamma_e);

// The secrecy rate that places a unit-volume coarse lattice at y = 1:
// Rs = R - log2(gamma_e / (2 pi)), the inverse of gamma_for_rates. Negative
// results (gamma_e > 2 pi 2^R) are returned as-is, never clamped.
double secrecy_rate_unimodular(double total_rate, double gamma_e);

// Inverse of the above: gamma_e = pi 2^{R - Rs + 1}.
double gamma_for_rates(double total_rate, double secrecy_rate);

// sigma_e = (2 pi)^{-1/2}: the noise level at which a unit-volume lattice
// operates at y = 1.
double required_sigma_for_y1();

// y_norm = 1/(2 pi sigma_e^2).
double y_norm(double sigma_e);

struct MonteCarloOptions {
    int box_halfwidth = 3;  // coarse-lattice points drawn from [-w, w]^n
    unsigned threads = 0;   // 0 = hardware concurrency
};

struct MonteCarloResult {
    double p_hat = 0.0;
    double ci95 = 0.0;  // 95% binomial confidence half-width
    std::uint64_t trials = 0;
    double formula_value = 0.0;
    bool regime_flag = false;
};

// Coset-coding simulation: draw a uniform coset of Lambda_b / Lambda_e and a
// bounded random Lambda_e point, transmit, add white Gaussian noise of std
// sigma_e per dimension, decode to the nearest Lambda_b point (exact
// branch-and-bound search), and score coset agreement.
//
// Every trial derives its own RNG stream from (seed, trial index), so the
// estimate is reproducible bit-for-bit and independent of the worker count.
// Requires n <= 8 and at least 100 trials.
MonteCarloResult monte_carlo_eve(const WiretapConfig& cfg, std::uint64_t trials,
                                 std::uint64_t seed,
                                 const MonteCarloOptions& opts = {});

// JSON mirror of WiretapConfig; see README for the schema.
WiretapConfig wiretap_config_from_json(const nlohmann::json& doc);

}  // namespace latsec
