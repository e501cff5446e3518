#include <latsec/lattice.hpp>

#include <latsec/errors.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace latsec {

namespace {

// Exact LDL^T over the rationals. Returns the pivot sequence; the k-th
// leading principal minor is the product of the first k pivots, so positive
// definiteness is equivalent to all pivots being positive.
std::vector<Rational> ldlt_pivots(const RationalMatrix& g) {
    const int n = static_cast<int>(g.rows());
    RationalMatrix a = g;
    std::vector<Rational> pivots;
    pivots.reserve(n);
    for (int k = 0; k < n; ++k) {
        const Rational piv = a(k, k);
        if (piv <= 0) return pivots;  // short: not PD
        pivots.push_back(piv);
        for (int i = k + 1; i < n; ++i) {
            const Rational f = a(i, k) / piv;
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return pivots;
}

// Exact inverse by Gauss-Jordan; the caller guarantees invertibility.
RationalMatrix invert_exact(const RationalMatrix& g) {
    const int n = static_cast<int>(g.rows());
    RationalMatrix a = g;
    RationalMatrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = (i == j) ? 1 : 0;
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r) {
            if (a(r, col) != 0) {
                piv = r;
                break;
            }
        }
        if (piv < 0) throw std::domain_error("singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(a(col, j), a(piv, j));
                std::swap(inv(col, j), inv(piv, j));
            }
        }
        const Rational d = a(col, col);
        for (int j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a(r, col) == 0) continue;
            const Rational f = a(r, col);
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

Eigen::MatrixXd to_double_matrix(const RationalMatrix& g) {
    Eigen::MatrixXd d(g.rows(), g.cols());
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) d(i, j) = to_double(g(i, j));
    return d;
}

Int lcm_int(const Int& a, const Int& b) {
    return a / boost::multiprecision::gcd(a, b) * b;
}

}  // namespace

Lattice::Lattice(std::string name, RationalMatrix gram,
                 std::optional<ThetaExpr> closed_form)
    : name_(std::move(name)), gram_(std::move(gram)),
      closed_form_(std::move(closed_form)) {
    const int n = static_cast<int>(gram_.rows());
    if (n < 1 || gram_.cols() != n)
        throw std::invalid_argument("Gram matrix must be square and non-empty");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            if (gram_(i, j) != gram_(j, i))
                throw std::invalid_argument("Gram matrix must be symmetric");
    const auto pivots = ldlt_pivots(gram_);
    if (static_cast<int>(pivots.size()) != n)
        throw std::domain_error("Gram matrix is not positive definite");
    det_ = 1;
    for (const auto& p : pivots) det_ *= p;
}

double Lattice::volume() const { return std::sqrt(to_double(det_)); }

Lattice Lattice::dual() const {
    return Lattice(name_ + "*", invert_exact(gram_));
}

LatticePredicates predicates(const Lattice& L) {
    LatticePredicates out;
    const auto& g = L.gram();
    const int n = L.dim();
    out.integral = true;
    for (int i = 0; i < n && out.integral; ++i)
        for (int j = 0; j <= i; ++j)
            if (boost::multiprecision::denominator(g(i, j)) != 1) {
                out.integral = false;
                break;
            }
    if (out.integral) {
        out.even = true;
        for (int i = 0; i < n; ++i) {
            if (boost::multiprecision::numerator(g(i, i)) % 2 != 0) {
                out.even = false;
                break;
            }
        }
        out.unimodular = (L.det() == 1);
    }
    return out;
}

std::int64_t ThetaCoeffs::count(const Rational& norm) const {
    auto it = counts.find(norm);
    return it == counts.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// Short-vector enumeration

namespace {

struct Enumerator {
    int n;
    Eigen::MatrixXd r;  // upper-triangular, G = r^T r (padded double Cholesky)
    std::vector<std::vector<Int>> gram_scaled;  // denominator-cleared Gram
    Int scale = 1;
    bool int64_safe = false;
    std::vector<std::vector<std::int64_t>> gram_scaled64;

    double radius = 0.0;        // float pruning radius (padded)
    Rational max_norm;          // exact acceptance threshold
    std::uint64_t budget = 0;
    std::uint64_t nodes = 0;

    std::vector<std::int64_t> x;
    // Scaled norms are integers; counts accumulate in a flat array when the
    // index range is small enough, with a map fallback for sparse/huge norms.
    std::vector<std::int64_t> flat_counts;
    std::map<Int, std::int64_t> sparse_counts;
    bool use_flat = false;
    ThetaCoeffs result;

    explicit Enumerator(const Lattice& L, const Rational& max_norm_in,
                        const EnumerationOptions& opts)
        : n(L.dim()), max_norm(max_norm_in), budget(opts.node_budget) {
        const Eigen::MatrixXd g = to_double_matrix(L.gram());
        Eigen::LLT<Eigen::MatrixXd> llt(g);
        if (llt.info() != Eigen::Success)
            throw std::domain_error("floating Cholesky failed on a PD Gram");
        r = llt.matrixU();

        Int denom = 1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                denom = lcm_int(denom, boost::multiprecision::denominator(L.gram()(i, j)));
        scale = denom;
        gram_scaled.assign(n, std::vector<Int>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                gram_scaled[i][j] =
                    boost::multiprecision::numerator(L.gram()(i, j) * Rational(denom));

        const double c = to_double(max_norm);
        radius = c * (1.0 + 1e-6) + 1e-9;
        x.assign(n, 0);
        result.max_norm = max_norm;

        const double flat_span = radius * scale.convert_to<double>();
        use_flat = flat_span < 8.0e6;
        if (use_flat)
            flat_counts.assign(static_cast<std::size_t>(flat_span) + 2, 0);

        // int64 fast path when x^T (scale*G) x cannot overflow: bound each
        // |x_i| by the widest enumeration interval and each scaled entry.
        double max_entry = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                max_entry = std::max(max_entry,
                                     std::abs(gram_scaled[i][j].convert_to<double>()));
        double min_rii = r(0, 0);
        for (int i = 1; i < n; ++i) min_rii = std::min(min_rii, r(i, i));
        const double max_x = std::sqrt(radius) / min_rii + 2.0;
        const double bound = double(n) * double(n) * max_entry * max_x * max_x;
        int64_safe = bound < 4.0e18;
        if (int64_safe) {
            gram_scaled64.assign(n, std::vector<std::int64_t>(n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    gram_scaled64[i][j] = gram_scaled[i][j].convert_to<std::int64_t>();
        }
    }

    void record_leaf() {
        bool zero = true;
        for (int i = 0; i < n && zero; ++i) zero = (x[i] == 0);
        const std::int64_t weight = zero ? 1 : 2;
        if (int64_safe) {
            std::int64_t acc = 0;
            for (int i = 0; i < n; ++i) {
                std::int64_t row = 0;
                for (int j = 0; j < n; ++j) row += gram_scaled64[i][j] * x[j];
                acc += row * x[i];
            }
            if (use_flat) {
                if (acc >= 0 && acc < static_cast<std::int64_t>(flat_counts.size()))
                    flat_counts[static_cast<std::size_t>(acc)] += weight;
            } else {
                sparse_counts[Int(acc)] += weight;
            }
        } else {
            Int acc = 0;
            for (int i = 0; i < n; ++i) {
                Int row = 0;
                for (int j = 0; j < n; ++j) row += gram_scaled[i][j] * x[j];
                acc += row * Int(x[i]);
            }
            sparse_counts[acc] += weight;
        }
    }

    // Exact acceptance happens here: scaled norm s is kept iff s/scale is at
    // most max_norm; leaves admitted only by the float padding get dropped.
    void finish() {
        const Int num = boost::multiprecision::numerator(max_norm);
        const Int den = boost::multiprecision::denominator(max_norm);
        const auto accept = [&](const Int& s) { return s * den <= num * scale; };
        if (use_flat) {
            for (std::size_t s = 0; s < flat_counts.size(); ++s) {
                if (flat_counts[s] == 0) continue;
                const Int scaled(static_cast<std::int64_t>(s));
                if (accept(scaled))
                    result.counts[Rational(scaled, scale)] += flat_counts[s];
            }
        }
        for (const auto& [scaled, count] : sparse_counts) {
            if (accept(scaled)) result.counts[Rational(scaled, scale)] += count;
        }
    }

    // Levels run from n-1 down to 0. While every coordinate above the current
    // level is zero, the current one is restricted to >= 0; each nonzero
    // vector found then stands for the pair {x, -x}.
    void run(int level, double partial, bool upper_zero) {
        double s = 0.0;
        for (int j = level + 1; j < n; ++j) s += r(level, j) * x[j];
        const double rem = radius - partial;
        if (rem < 0) return;
        const double w = std::sqrt(rem) / r(level, level);
        const double center = -s / r(level, level);
        std::int64_t lo = static_cast<std::int64_t>(std::ceil(center - w - 1e-12));
        const std::int64_t hi = static_cast<std::int64_t>(std::floor(center + w + 1e-12));
        if (upper_zero) lo = std::max<std::int64_t>(lo, 0);
        for (std::int64_t v = lo; v <= hi; ++v) {
            if (++nodes > budget)
                throw ResourceError(
                    "enumeration budget exceeded (" + std::to_string(budget) +
                    " nodes); raise EnumerationOptions::node_budget");
            x[level] = v;
            const double d = r(level, level) * v + s;
            const double dist = partial + d * d;
            if (dist > radius) continue;
            if (level == 0)
                record_leaf();
            else
                run(level - 1, dist, upper_zero && v == 0);
        }
        x[level] = 0;
    }
};

}  // namespace

ThetaCoeffs theta_by_enumeration(const Lattice& L, const Rational& max_norm,
                                 const EnumerationOptions& opts) {
    if (max_norm < 0) throw std::invalid_argument("max_norm must be >= 0");
    Enumerator e(L, max_norm, opts);
    e.run(L.dim() - 1, 0.0, true);
    e.finish();
    return e.result;
}

double theta_tail_radius(int dim, double lambda_min, double y, double tol) {
    if (!(lambda_min > 0.0))
        throw std::domain_error("Gram smallest eigenvalue is not positive");
    // Split the tail with a free parameter 0 < beta < 1:
    //   sum_{Q(x) > M} e^{-pi y Q} <= e^{-pi y (1-beta) M} * Theta(beta y)
    // and Theta(u) <= theta_3(e^{-pi u lambda_min})^dim. Each beta yields a
    // certified radius; take the smallest over a short sweep (small beta pays
    // off when the Gram has a thin direction).
    double best = std::numeric_limits<double>::infinity();
    for (double beta : {0.125, 0.25, 0.375, 0.5, 0.625, 0.75}) {
        const double q_major = std::exp(-M_PI * y * beta * lambda_min);
        const double log_majorant =
            q_major > 0.0 ? dim * std::log(theta_numeric(3, q_major, 1e-14)) : 0.0;
        const double m =
            (log_majorant + std::log(1.0 / tol)) / (M_PI * y * (1.0 - beta));
        best = std::min(best, m);
    }
    return std::max(best + 1.0, 1.0);
}

double lattice_lambda_min(const Lattice& L) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_double_matrix(L.gram()));
    return es.eigenvalues().minCoeff() * (1.0 - 1e-9);
}

double theta_numeric_lattice(const Lattice& L, double y, double tol,
                             const EnumerationOptions& opts) {
    if (!(y > 0.0)) throw std::domain_error("y must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const double m_target = theta_tail_radius(L.dim(), lattice_lambda_min(L), y, 0.5 * tol);
    const Rational max_norm(static_cast<std::int64_t>(std::ceil(m_target)));

    const ThetaCoeffs coeffs = theta_by_enumeration(L, max_norm, opts);
    double sum = 0.0;
    for (const auto& [norm, count] : coeffs.counts)
        sum += static_cast<double>(count) * std::exp(-M_PI * y * to_double(norm));
    return sum;
}

double dual_theta_via_jacobi(const Lattice& L, double y, double tol) {
    if (!(y > 0.0)) throw std::domain_error("y must be positive");
    const int n = L.dim();
    const double prefactor = L.volume() * std::pow(y, -n / 2.0);
    return prefactor * theta_numeric_lattice(L, 1.0 / y, tol / prefactor);
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

// Minimal-vector basis of the Leech lattice, reduced from a Golay-code
// construction; validity (det 1, evenness, minimum norm 4, kissing number
// 196560) is established by the test suite, not assumed.
constexpr int kLeechGram[24][24] = {
    {4, 2, 2, 2, 1, 1, -2, 2, 0, 2, -2, -2, 2, 2, 1, 2, 2, 1, -1, -2, -1, 2, -2, 1},
    {2, 4, 2, 2, -1, 2, -2, 0, -1, 2, -2, 0, 1, 1, -1, 0, 1, -1, -2, 0, -2, 1, 0, 2},
    {2, 2, 4, 2, 1, 2, -2, 1, 1, 2, 0, -2, 0, 0, 0, 0, 0, 1, 0, -1, -1, 0, -2, 2},
    {2, 2, 2, 4, -1, 0, -2, 2, -1, 1, -1, -2, 2, 1, 1, 1, 1, 0, 0, -1, -2, 2, -2, 2},
    {1, -1, 1, -1, 4, 0, -1, 1, 2, 1, 1, -1, -1, -1, 0, 0, -1, 2, 0, -2, 0, -1, -1, -1},
    {1, 2, 2, 0, 0, 4, 0, -1, 1, 1, 0, 0, -1, 1, 0, -1, 1, -1, 0, 0, -1, -1, 0, 2},
    {-2, -2, -2, -2, -1, 0, 4, -2, 1, -1, 1, 2, -1, 0, 0, 0, 0, -1, 2, 2, 1, -1, 1, -1},
    {2, 0, 1, 2, 1, -1, -2, 4, -1, 1, -1, -2, 2, 1, 2, 2, 0, 2, 0, -2, -1, 1, -2, 1},
    {0, -1, 1, -1, 2, 1, 1, -1, 4, 1, 1, 0, -2, -1, -1, -1, -1, 0, 1, -1, 1, -1, 0, -1},
    {2, 2, 2, 1, 1, 1, -1, 1, 1, 4, -2, 0, 0, 1, -1, 1, 0, 0, -1, -1, -1, 0, -1, 1},
    {-2, -2, 0, -1, 1, 0, 1, -1, 1, -2, 4, 0, -2, -2, 0, -1, -1, 1, 2, 1, 0, -2, 0, 0},
    {-2, 0, -2, -2, -1, 0, 2, -2, 0, 0, 0, 4, -1, -1, -2, -1, -1, -1, 0, 2, 0, -1, 2, -1},
    {2, 1, 0, 2, -1, -1, -1, 2, -2, 0, -2, -1, 4, 1, 1, 2, 1, 1, -1, -1, -1, 2, -1, 0},
    {2, 1, 0, 1, -1, 1, 0, 1, -1, 1, -2, -1, 1, 4, 2, 2, 2, -1, 0, 0, 0, 1, -1, 1},
    {1, -1, 0, 1, 0, 0, 0, 2, -1, -1, 0, -2, 1, 2, 4, 1, 1, 1, 1, -1, 0, 1, -2, 1},
    {2, 0, 0, 1, 0, -1, 0, 2, -1, 1, -1, -1, 2, 2, 1, 4, 1, 1, 0, 0, 0, 1, -1, 0},
    {2, 1, 0, 1, -1, 1, 0, 0, -1, 0, -1, -1, 1, 2, 1, 1, 4, -1, 0, 0, -1, 2, -1, 1},
    {1, -1, 1, 0, 2, -1, -1, 2, 0, 0, 1, -1, 1, -1, 1, 1, -1, 4, 0, -1, 0, 0, -2, 0},
    {-1, -2, 0, 0, 0, 0, 2, 0, 1, -1, 2, 0, -1, 0, 1, 0, 0, 0, 4, 1, 0, -1, -1, 0},
    {-2, 0, -1, -1, -2, 0, 2, -2, -1, -1, 1, 2, -1, 0, -1, 0, 0, -1, 1, 4, 0, -1, 1, 0},
    {-1, -2, -1, -2, 0, -1, 1, -1, 1, -1, 0, 0, -1, 0, 0, 0, -1, 0, 0, 0, 4, 0, 1, -2},
    {2, 1, 0, 2, -1, -1, -1, 1, -1, 0, -2, -1, 2, 1, 1, 1, 2, 0, -1, -1, 0, 4, -1, 0},
    {-2, 0, -2, -2, -1, 0, 1, -2, 0, -1, 0, 2, -1, -1, -2, -1, -1, -2, -1, 1, 1, -1, 4, -1},
    {1, 2, 2, 2, -1, 2, -1, 1, -1, 1, 0, -1, 0, 1, 1, 0, 1, 0, 0, 0, -2, 0, -1, 4},
};

RationalMatrix identity_gram(int n) {
    RationalMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = (i == j) ? 1 : 0;
    return g;
}

// Gram of the basis e_0 - e_1, ..., e_{n-2} - e_{n-1}, e_{n-2} + e_{n-1}.
RationalMatrix dn_gram(int n) {
    std::vector<std::vector<int>> basis(n, std::vector<int>(n, 0));
    for (int i = 0; i + 1 < n; ++i) {
        basis[i][i] = 1;
        basis[i][i + 1] = -1;
    }
    basis[n - 1][n - 2] = 1;
    basis[n - 1][n - 1] = 1;
    RationalMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int dot = 0;
            for (int k = 0; k < n; ++k) dot += basis[i][k] * basis[j][k];
            g(i, j) = dot;
        }
    return g;
}

// Simple-root Gram of E8 (chain 0-2-3-4-5-6-7 with node 1 attached to 3).
RationalMatrix e8_gram() {
    RationalMatrix g(8, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) g(i, j) = (i == j) ? 2 : 0;
    const std::array<std::pair<int, int>, 7> edges = {
        {{0, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {1, 3}}};
    for (auto [a, b] : edges) {
        g(a, b) = -1;
        g(b, a) = -1;
    }
    return g;
}

ThetaExpr zn_theta(int n) { return ThetaExpr{{{1, 0, n, 0}}}; }

ThetaExpr dn_theta(int n) {
    return ThetaExpr{{{Rational(1, 2), 0, n, 0}, {Rational(1, 2), 0, 0, n}}};
}

ThetaExpr e8_theta() {
    return ThetaExpr{{{Rational(1, 2), 8, 0, 0},
                      {Rational(1, 2), 0, 8, 0},
                      {Rational(1, 2), 0, 0, 8}}};
}

// "Zn(5)", "Zn:5" -> 5; returns -1 when the prefix does not match.
int parse_family_dim(const std::string& name, const std::string& prefix) {
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0)
        return -1;
    std::string rest = name.substr(prefix.size());
    if (rest.front() == '(' && rest.back() == ')')
        rest = rest.substr(1, rest.size() - 2);
    else if (rest.front() == ':')
        rest = rest.substr(1);
    else
        return -1;
    if (rest.empty() ||
        rest.find_first_not_of("0123456789") != std::string::npos)
        return -1;
    return std::atoi(rest.c_str());
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"Zn(n)", "Dn(n)", "D4", "E8", "Leech"};
}

Lattice catalog(const std::string& name) {
    if (int n = parse_family_dim(name, "Zn"); n >= 1)
        return Lattice(name, identity_gram(n), zn_theta(n));
    if (int n = parse_family_dim(name, "Dn"); n >= 2)
        return Lattice(name, dn_gram(n), dn_theta(n));
    if (name == "D4") return Lattice("D4", dn_gram(4), dn_theta(4));
    if (name == "E8") return Lattice("E8", e8_gram(), e8_theta());
    if (name == "Leech") {
        RationalMatrix g(24, 24);
        for (int i = 0; i < 24; ++i)
            for (int j = 0; j < 24; ++j) g(i, j) = kLeechGram[i][j];
        return Lattice("Leech", std::move(g));
    }
    std::string known;
    for (const auto& s : catalog_names()) known += (known.empty() ? "" : ", ") + s;
    throw std::invalid_argument("unknown lattice '" + name + "'; catalog: " + known);
}

Lattice lattice_from_json(const nlohmann::json& doc) {
    if (!doc.contains("gram"))
        throw std::invalid_argument("lattice document needs a 'gram' field");
    const auto& rows = doc.at("gram");
    const int n = static_cast<int>(rows.size());
    RationalMatrix g(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows.at(i).size()) != n)
            throw std::invalid_argument("gram matrix must be square");
        for (int j = 0; j < n; ++j) {
            const auto& cell = rows.at(i).at(j);
            if (cell.is_string())
                g(i, j) = parse_rational(cell.get<std::string>());
            else if (cell.is_number_integer())
                g(i, j) = Rational(cell.get<std::int64_t>());
            else
                throw std::invalid_argument(
                    "gram entries must be integers or rational strings");
        }
    }
    if (doc.contains("dim") && doc.at("dim").get<int>() != n)
        throw std::invalid_argument("'dim' does not match the gram matrix size");
    return Lattice(doc.value("name", std::string("custom")), std::move(g));
}

}  // namespace latsec
