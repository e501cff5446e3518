#include <latsec/wiretap.hpp>

#include <latsec/errors.hpp>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace latsec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::MatrixXd gram_as_double(const RationalMatrix& g) {
    Eigen::MatrixXd d(g.rows(), g.cols());
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) d(i, j) = to_double(g(i, j));
    return d;
}

// Exact check G_e == M^T G_b M.
bool embedding_matches(const RationalMatrix& gb, const RationalMatrix& ge,
                       const Eigen::MatrixXi& m) {
    const int n = static_cast<int>(gb.rows());
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Rational acc = 0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    acc += Rational(m(k, i)) * gb(k, l) * Rational(m(l, j));
            if (acc != ge(i, j)) return false;
        }
    }
    return true;
}

// Column-style Hermite form H = M U (U unimodular), H lower triangular with
// positive diagonal. Coset representatives of Z^n / M Z^n are then the boxes
// prod [0, H_ii).
Eigen::MatrixXi column_hnf(Eigen::MatrixXi m) {
    const int n = static_cast<int>(m.rows());
    for (int row = 0; row < n; ++row) {
        // clear row entries right of the pivot column by gcd column ops
        for (int col = row + 1; col < n; ++col) {
            while (m(row, col) != 0) {
                if (m(row, row) == 0 ||
                    std::abs(m(row, col)) < std::abs(m(row, row))) {
                    for (int r = 0; r < n; ++r) std::swap(m(r, row), m(r, col));
                    continue;
                }
                const int q = m(row, col) / m(row, row);
                for (int r = 0; r < n; ++r) m(r, col) -= q * m(r, row);
            }
        }
        if (m(row, row) == 0)
            throw ConfigError("embedding matrix is singular");
        if (m(row, row) < 0)
            for (int r = 0; r < n; ++r) m(r, row) = -m(r, row);
        // reduce columns left of the pivot
        for (int col = 0; col < row; ++col) {
            const int q = static_cast<int>(
                std::floor(static_cast<double>(m(row, col)) / m(row, row)));
            if (q != 0)
                for (int r = 0; r < n; ++r) m(r, col) -= q * m(r, row);
        }
    }
    return m;
}

// splitmix64: per-trial stream derivation
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct TrialRng {
    std::uint64_t state;
    explicit TrialRng(std::uint64_t seed, std::uint64_t trial)
        : state(splitmix64(seed ^ splitmix64(trial + 0x243f6a8885a308d3ULL))) {}

    std::uint64_t next_u64() {
        state = splitmix64(state + 0x9e3779b97f4a7c15ULL);
        return state;
    }
    double next_unit() {  // uniform in (0, 1)
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }
    // Box-Muller; fully specified, so results are identical across platforms
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }
    std::int64_t next_below(std::int64_t bound) {  // uniform in [0, bound)
        return static_cast<std::int64_t>(next_u64() % static_cast<std::uint64_t>(bound));
    }

private:
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Exact nearest-point search in the lattice with upper-triangular basis
// matrix B (columns are basis vectors): minimizes |B u - target| over integer
// u by Babai-seeded branch and bound.
struct NearestPoint {
    const Eigen::MatrixXd& b;
    int n;
    Eigen::VectorXd target;
    std::vector<std::int64_t> best_u, u;
    double best_dist = 0.0;

    NearestPoint(const Eigen::MatrixXd& basis, Eigen::VectorXd t)
        : b(basis), n(static_cast<int>(basis.rows())), target(std::move(t)) {
        best_u.assign(n, 0);
        u.assign(n, 0);
        // Babai rounding seed
        for (int i = n - 1; i >= 0; --i) {
            double s = target(i);
            for (int j = i + 1; j < n; ++j) s -= b(i, j) * best_u[j];
            best_u[i] = static_cast<std::int64_t>(std::llround(s / b(i, i)));
        }
        best_dist = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = -target(i);
            for (int j = i; j < n; ++j) s += b(i, j) * best_u[j];
            best_dist += s * s;
        }
        search(n - 1, 0.0);
    }

    // Returns false when the subtree at u[level] = v is pruned. Distances at
    // a level grow monotonically away from the center in each direction, so
    // a prune closes that direction for good.
    bool try_value(int level, double partial, double s, std::int64_t v) {
        const double d = b(level, level) * v + s;
        const double dist = partial + d * d;
        if (dist >= best_dist) return false;
        u[level] = v;
        if (level == 0) {
            best_dist = dist;
            best_u = u;
        } else {
            search(level - 1, dist);
        }
        return true;
    }

    void search(int level, double partial) {
        double s = -target(level);
        for (int j = level + 1; j < n; ++j) s += b(level, j) * u[j];
        const double center = -s / b(level, level);
        const std::int64_t mid = std::llround(center);
        if (!try_value(level, partial, s, mid)) return;
        bool up = true, down = true;
        for (std::int64_t step = 1; up || down; ++step) {
            if (up) up = try_value(level, partial, s, mid + step);
            if (down) down = try_value(level, partial, s, mid - step);
        }
    }
};

}  // namespace

WiretapConfig validate_config(WiretapConfig cfg) {
    if (cfg.n < 1) throw ConfigError("dimension must be >= 1");
    if (!(cfg.sigma_e > 0.0)) throw ConfigError("sigma_e must be positive");
    if (cfg.sigma_b > 0.0 && !(cfg.sigma_e > cfg.sigma_b))
        throw ConfigError(
            "sigma_e must exceed sigma_b (positive secrecy capacity)");
    if (cfg.secrecy_rate < 0.0 || cfg.secrecy_rate > cfg.total_rate + 1e-12)
        throw ConfigError("need 0 <= R_s <= R");
    if (cfg.lattice_e && cfg.lattice_e->dim() != cfg.n)
        throw ConfigError("lattice_e dimension does not match n");
    if (cfg.lattice_b && cfg.lattice_b->dim() != cfg.n)
        throw ConfigError("lattice_b dimension does not match n");
    if (cfg.lattice_b) cfg.vol_b = cfg.lattice_b->volume();

    if (cfg.lattice_e && cfg.lattice_b) {
        const auto& gb = cfg.lattice_b->gram();
        const auto& ge = cfg.lattice_e->gram();
        if (!cfg.embedding) {
            // Try to derive one from the Cholesky factors; this succeeds
            // whenever the two Grams are expressed in aligned coordinates
            // (scalings, diagonal sublattices, ...).
            Eigen::MatrixXd bb =
                Eigen::LLT<Eigen::MatrixXd>(gram_as_double(gb)).matrixU();
            Eigen::MatrixXd be =
                Eigen::LLT<Eigen::MatrixXd>(gram_as_double(ge)).matrixU();
            Eigen::MatrixXd m_float =
                bb.triangularView<Eigen::Upper>().solve(be);
            Eigen::MatrixXi m(cfg.n, cfg.n);
            for (int i = 0; i < cfg.n; ++i)
                for (int j = 0; j < cfg.n; ++j)
                    m(i, j) = static_cast<int>(std::llround(m_float(i, j)));
            cfg.embedding = m;
        }
        // each Lambda_e generator must be an integer combination of the
        // Lambda_b generators, verified exactly through the Grams
        if (!embedding_matches(gb, ge, *cfg.embedding))
            throw ConfigError(
                "lattice_e is not a sublattice of lattice_b (no integer "
                "embedding realizes its Gram); pass 'embedding' explicitly");
    }
    return cfg;
}

EveFormulaResult eve_correct_prob_formula(const WiretapConfig& cfg, double tol) {
    if (!cfg.lattice_e)
        throw std::invalid_argument("formula needs lattice_e");
    if (!(cfg.sigma_e > 0.0)) throw ConfigError("sigma_e must be positive");
    const int n = cfg.n > 0 ? cfg.n : cfg.lattice_e->dim();
    const double y = 1.0 / (kTwoPi * cfg.sigma_e * cfg.sigma_e);
    const double prefactor =
        std::pow(std::sqrt(kTwoPi) * cfg.sigma_e, -n) * cfg.vol_b;
    const double theta = theta_numeric_lattice(*cfg.lattice_e, y, tol);
    EveFormulaResult out;
    out.value = prefactor * theta;
    out.regime_flag = out.value > 1.0;
    return out;
}

double operating_point_y(double total_rate, double secrecy_rate, double gamma_e) {
    if (!(gamma_e > 0.0)) throw std::domain_error("gamma_e must be positive");
    return std::exp2(-(total_rate - secrecy_rate)) * gamma_e / kTwoPi;
}

double secrecy_rate_unimodular(double total_rate, double gamma_e) {
    if (!(gamma_e > 0.0)) throw std::domain_error("gamma_e must be positive");
    return total_rate - std::log2(gamma_e / kTwoPi);
}

double gamma_for_rates(double total_rate, double secrecy_rate) {
    return std::numbers::pi * std::exp2(total_rate - secrecy_rate + 1.0);
}

double required_sigma_for_y1() { return 1.0 / std::sqrt(kTwoPi); }

double y_norm(double sigma_e) {
    if (!(sigma_e > 0.0)) throw std::domain_error("sigma_e must be positive");
    return 1.0 / (kTwoPi * sigma_e * sigma_e);
}

MonteCarloResult monte_carlo_eve(const WiretapConfig& cfg_in, std::uint64_t trials,
                                 std::uint64_t seed, const MonteCarloOptions& opts) {
    if (trials < 100) throw std::invalid_argument("need at least 100 trials");
    const WiretapConfig cfg = validate_config(cfg_in);
    if (cfg.n > 8)
        throw std::invalid_argument("simulator supports n <= 8");
    if (!cfg.lattice_e || !cfg.lattice_b || !cfg.embedding)
        throw ConfigError("simulator needs nested lattice_b and lattice_e");

    const int n = cfg.n;
    const Eigen::MatrixXd bb =
        Eigen::LLT<Eigen::MatrixXd>(gram_as_double(cfg.lattice_b->gram())).matrixU();
    const Eigen::MatrixXi m = *cfg.embedding;
    const Eigen::MatrixXi hnf = column_hnf(m);

    std::int64_t index = 1;
    for (int i = 0; i < n; ++i) index *= hnf(i, i);
    {   // the coset count must reproduce the volume ratio exactly
        const Rational ratio = cfg.lattice_e->det() / cfg.lattice_b->det();
        if (Rational(index) * Rational(index) != ratio)
            throw ConfigError("embedding determinant disagrees with volumes");
    }

    // canonical coset representative of u modulo the columns of hnf
    auto reduce = [&](std::vector<std::int64_t>& u) {
        for (int r = 0; r < n; ++r) {
            std::int64_t q = u[r] / hnf(r, r);
            if (u[r] % hnf(r, r) < 0) q -= 1;
            if (q == 0) continue;
            for (int i = r; i < n; ++i) u[i] -= q * hnf(i, r);
        }
    };
    auto rep_of_index = [&](std::int64_t c) {
        std::vector<std::int64_t> rep(n);
        for (int i = 0; i < n; ++i) {
            rep[i] = c % hnf(i, i);
            c /= hnf(i, i);
        }
        return rep;
    };

    const int box = opts.box_halfwidth;
    auto run_trial = [&](std::uint64_t t) -> bool {
        TrialRng rng(seed, t);
        // noise first: the success indicator depends only on the noise, so
        // the box width and coset draw cannot bias the estimate
        Eigen::VectorXd noise(n);
        for (int i = 0; i < n; ++i) noise(i) = cfg.sigma_e * rng.next_gaussian();
        const std::int64_t c = rng.next_below(index);
        std::vector<std::int64_t> sent = rep_of_index(c);
        for (int j = 0; j < n; ++j) {
            const std::int64_t vj = rng.next_below(2 * box + 1) - box;
            for (int i = 0; i < n; ++i) sent[i] += vj * m(i, j);
        }
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) x(i) += bb(i, j) * sent[j];
        const Eigen::VectorXd received = x + noise;

        NearestPoint cvp(bb, received);
        std::vector<std::int64_t> decoded = cvp.best_u;
        std::vector<std::int64_t> sent_red = sent;
        reduce(decoded);
        reduce(sent_red);
        return decoded == sent_red;
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(opts.threads ? opts.threads : hw, trials));
    std::vector<std::uint64_t> successes(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            std::uint64_t local = 0;
            for (std::uint64_t t = w; t < trials; t += workers)
                if (run_trial(t)) ++local;
            successes[w] = local;
        });
    }
    for (auto& th : pool) th.join();

    std::uint64_t total = 0;
    for (auto s : successes) total += s;

    MonteCarloResult out;
    out.trials = trials;
    out.p_hat = static_cast<double>(total) / static_cast<double>(trials);
    out.ci95 = 1.96 * std::sqrt(out.p_hat * (1.0 - out.p_hat) /
                                static_cast<double>(trials));
    const auto formula = eve_correct_prob_formula(cfg);
    out.formula_value = formula.value;
    out.regime_flag = formula.regime_flag;
    return out;
}

WiretapConfig wiretap_config_from_json(const nlohmann::json& doc) {
    WiretapConfig cfg;
    auto lattice_of = [](const nlohmann::json& v) -> Lattice {
        if (v.is_string()) return catalog(v.get<std::string>());
        return lattice_from_json(v);
    };
    if (doc.contains("lattice_e")) cfg.lattice_e = lattice_of(doc.at("lattice_e"));
    if (doc.contains("lattice_b")) cfg.lattice_b = lattice_of(doc.at("lattice_b"));
    cfg.n = doc.contains("n") ? doc.at("n").get<int>()
            : cfg.lattice_e   ? cfg.lattice_e->dim()
                              : 0;
    cfg.sigma_b = doc.value("sigma_b", 0.0);
    cfg.sigma_e = doc.value("sigma_e", 0.0);
    cfg.total_rate = doc.contains("R") ? doc.at("R").get<double>() : doc.value("total_rate", 0.0);
    cfg.secrecy_rate =
        doc.contains("R_s") ? doc.at("R_s").get<double>() : doc.value("secrecy_rate", 0.0);
    if (doc.contains("vol_b")) cfg.vol_b = doc.at("vol_b").get<double>();

    if (doc.contains("embedding")) {
        const auto& e = doc.at("embedding");
        if (e.is_object() && e.contains("scale_of_b")) {
            const int c = e.at("scale_of_b").get<int>();
            Eigen::MatrixXi m = Eigen::MatrixXi::Identity(cfg.n, cfg.n) * c;
            cfg.embedding = m;
        } else {
            const int n = static_cast<int>(e.size());
            Eigen::MatrixXi m(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m(i, j) = e.at(i).at(j).get<int>();
            cfg.embedding = m;
        }
    }
    return cfg;
}

}  // namespace latsec
