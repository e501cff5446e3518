#include <latsec/secrecy.hpp>

#include <latsec/errors.hpp>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace latsec {

namespace {

double db_to_y(double t_db) { return std::pow(10.0, t_db / 10.0); }

}  // namespace

// Cached enumeration for Gram-backed sources without a closed form: counts
// are reused across evaluation points and re-enumerated only when a smaller
// y needs a larger radius.
struct ThetaSource::EnumCache {
    std::mutex mutex;
    double lambda_min = 0.0;
    std::optional<ThetaCoeffs> coeffs;
};

ThetaSource::ThetaSource(Lattice L)
    : lattice_(std::move(L)), cache_(std::make_shared<EnumCache>()) {
    cache_->lambda_min = lattice_lambda_min(*lattice_);
}

ThetaSource::ThetaSource(ThetaPoly p)
    : poly_(std::move(p)),
      poly_theta_powers_(convert_basis(*poly_, ThetaBasis::ThetaPowers)) {}

int ThetaSource::dim() const { return lattice_ ? lattice_->dim() : poly_->dim(); }

double ThetaSource::volume() const { return lattice_ ? lattice_->volume() : 1.0; }

std::string ThetaSource::label() const {
    if (lattice_) return lattice_->name();
    return "extremal(" + std::to_string(poly_->dim()) + ")";
}

double ThetaSource::theta(double y, double tol) const {
    if (!(y > 0.0)) throw std::domain_error("y must be positive");
    const double q = std::exp(-M_PI * y);
    if (poly_) return theta_poly_eval(*poly_theta_powers_, q, tol);
    if (lattice_->closed_form_theta())
        return lattice_->closed_form_theta()->eval(q, tol);

    // Enumeration-backed path; see theta_tail_radius for the certificate.
    std::lock_guard lock(cache_->mutex);
    const double m_target =
        theta_tail_radius(lattice_->dim(), cache_->lambda_min, y, 0.5 * tol);
    const Rational needed(static_cast<std::int64_t>(std::ceil(m_target)));
    if (!cache_->coeffs || cache_->coeffs->max_norm < needed)
        cache_->coeffs = theta_by_enumeration(*lattice_, needed);
    double sum = 0.0;
    for (const auto& [norm, count] : cache_->coeffs->counts) {
        if (norm > needed) break;
        sum += static_cast<double>(count) * std::exp(-M_PI * y * to_double(norm));
    }
    return sum;
}

double secrecy_function(const ThetaSource& src, double y, double tol) {
    if (!(y > 0.0)) throw std::domain_error("y must be positive");
    const int n = src.dim();
    // numerator: theta of Z^n scaled to the source's volume
    const double vol_factor = std::pow(src.volume(), 2.0 / n);
    const double q_num = std::exp(-M_PI * y * vol_factor);
    const double numerator = std::pow(theta_numeric(3, q_num, tol), n);
    return numerator / src.theta(y, tol);
}

double secrecy_function(const Lattice& L, double y, double tol) {
    return secrecy_function(ThetaSource(L), y, tol);
}

double secrecy_function(const ThetaPoly& p, double y, double tol) {
    return secrecy_function(ThetaSource(p), y, tol);
}

namespace {

double symmetry_residual_of(const ThetaSource& src, double tol) {
    double worst = 0.0;
    for (double y : {1.5, 2.0, 4.0}) {
        const double d = std::abs(secrecy_function(src, y, tol) -
                                  secrecy_function(src, 1.0 / y, tol));
        worst = std::max(worst, d);
    }
    return worst;
}

}  // namespace

SecrecyResult secrecy_gain(const ThetaSource& src, GainMethod mode,
                           const GainSearch& search) {
    SecrecyResult out;
    out.method = mode;

    if (mode == GainMethod::ExactAtOne) {
        if (!src.poly())
            throw std::invalid_argument(
                "exact mode needs an even unimodular theta polynomial source");
        out.gain_exact = exact_gain_at_one(*src.poly());
        out.gain = to_double(*out.gain_exact);
        out.y_star = 1.0;
        out.y_star_db = 0.0;
        out.assumes_argmax_at_one = true;
        out.symmetry_residual = symmetry_residual_of(src, search.eval_tol);
        return out;
    }

    if (!(search.t_min_db < search.t_max_db) || search.grid_points < 3)
        throw std::invalid_argument("invalid search range");
    auto xi = [&](double t_db) {
        return secrecy_function(src, db_to_y(t_db), search.eval_tol);
    };

    // coarse grid seed, then golden-section refinement in the bracket
    int best = 0;
    double best_val = -1.0;
    std::vector<double> ts(search.grid_points);
    for (int i = 0; i < search.grid_points; ++i) {
        ts[i] = search.t_min_db + (search.t_max_db - search.t_min_db) * i /
                                      (search.grid_points - 1);
        const double v = xi(ts[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    out.boundary_warning = (best == 0 || best == search.grid_points - 1);

    double a = ts[std::max(best - 1, 0)];
    double b = ts[std::min(best + 1, search.grid_points - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = xi(c), fd = xi(d);
    while (b - a > search.tol_t) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = xi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = xi(d);
        }
    }
    const double t_star = (a + b) / 2.0;
    out.y_star = db_to_y(t_star);
    out.y_star_db = t_star;
    out.gain = xi(t_star);
    out.symmetry_residual = symmetry_residual_of(src, search.eval_tol);
    return out;
}

double siegel_weil_bound(int n, double tol) {
    if (n < 8 || n % 8 != 0)
        throw std::invalid_argument("dimension must be a positive multiple of 8");
    const double q = std::exp(-M_PI);
    const double numerator = std::pow(theta_numeric(3, q, tol), n);
    const double ek = eisenstein_eval(static_cast<unsigned>(n / 2), q * q, tol);
    return numerator / ek;
}

double asymptotic_bound(int n) {
    if (n < 0) throw std::invalid_argument("dimension must be >= 0");
    static const double c = [] {
        const double value = std::pow(M_PI, 0.25) / std::tgamma(0.75);
        // the same constant is theta_3(e^{-pi}); disagreement means a broken
        // Gamma or theta evaluation
        const double check = theta_numeric(3, std::exp(-M_PI), 1e-13);
        if (std::abs(value - check) > 1e-9)
            throw std::logic_error("theta_3(e^{-pi}) != pi^{1/4}/Gamma(3/4)");
        return value;
    }();
    return 0.5 * std::pow(c, n);
}

std::vector<std::pair<double, double>> secrecy_curve(const ThetaSource& src,
                                                     double t_min_db,
                                                     double t_max_db, int steps,
                                                     double tol) {
    if (!(t_min_db < t_max_db)) throw std::invalid_argument("empty dB range");
    if (steps < 2) throw std::invalid_argument("need at least 2 steps");
    std::vector<std::pair<double, double>> rows;
    rows.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        const double t = t_min_db + (t_max_db - t_min_db) * i / (steps - 1);
        rows.emplace_back(t, secrecy_function(src, db_to_y(t), tol));
    }
    return rows;
}

}  // namespace latsec
