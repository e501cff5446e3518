#include <latsec/modform.hpp>

#include <latsec/errors.hpp>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace latsec {

namespace {

std::mutex g_bernoulli_mutex;
std::vector<Rational> g_bernoulli;  // grown on demand, never shrunk

void check_eisenstein_weight(unsigned k) {
    if (k < 4 || k % 2 != 0)
        throw std::invalid_argument("Eisenstein weight must be even and >= 4");
}

}  // namespace

Rational bernoulli(unsigned k) {
    std::lock_guard lock(g_bernoulli_mutex);
    if (g_bernoulli.empty()) {
        g_bernoulli.push_back(1);               // B_0
        g_bernoulli.push_back(Rational(-1, 2)); // B_1
    }
    while (g_bernoulli.size() <= k) {
        const unsigned m = static_cast<unsigned>(g_bernoulli.size());
        // sum_{j=0..m} C(m+1, j) B_j = 0  =>  B_m = -(1/(m+1)) sum_{j<m} C(m+1,j) B_j
        Rational acc = 0;
        Int binom = 1;  // C(m+1, 0)
        for (unsigned j = 0; j < m; ++j) {
            acc += Rational(binom) * g_bernoulli[j];
            binom = binom * (m + 1 - j) / (j + 1);
        }
        g_bernoulli.push_back(-acc / Rational(m + 1));
    }
    return g_bernoulli[k];
}

double eisenstein_eval(unsigned k, double qt, double tol) {
    check_eisenstein_weight(k);
    if (!(qt > 0.0 && qt < 1.0)) throw std::domain_error("qt must lie in (0, 1)");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    const double factor = to_double(Rational(-2) * Rational(k) / bernoulli(k));
    const double lnq = std::log(qt);
    double sum = 0.0;
    for (std::int64_t m = 1;; ++m) {
        // m^{k-1} qt^m computed in log space to dodge overflow at large k
        const double t = std::exp((k - 1) * std::log(static_cast<double>(m)) +
                                  static_cast<double>(m) * lnq);
        sum += t / (1.0 - std::exp(static_cast<double>(m) * lnq));
        // consecutive-term ratios are below ((m+1)/m)^{k-1} qt, decreasing
        const double ratio =
            std::pow((m + 1.0) / m, static_cast<double>(k - 1)) * qt;
        if (ratio < 1.0) {
            const double next =
                std::exp((k - 1) * std::log(m + 1.0) + (m + 1.0) * lnq) /
                (1.0 - qt);
            if (std::abs(factor) * next / (1.0 - ratio) < tol) break;
        }
    }
    return 1.0 + factor * sum;
}

QSeries eisenstein_qexp(unsigned k, int order) {
    check_eisenstein_weight(k);
    if (order < 1) throw std::invalid_argument("order must be >= 1");
    const Rational factor = Rational(-2) * Rational(k) / bernoulli(k);
    QSeries s = QSeries::zero(order);
    s.set_coeff(0, 1);
    for (std::int64_t m = 1; m < order; ++m) {
        Int sigma = 0;
        for (std::int64_t d = 1; d <= m; ++d) {
            if (m % d == 0) sigma += boost::multiprecision::pow(Int(d), k - 1);
        }
        s.set_coeff(Rational(m), factor * Rational(sigma));
    }
    // sigma_{k-1}(m) <= m^k, so |c_m| <= |factor| (1+m)^k for every m
    s.set_growth(std::abs(to_double(factor)) * (1.0 + 1e-12), static_cast<int>(k));
    return s;
}

QSeries delta_qexp(int order) {
    if (order < 2) throw std::invalid_argument("order must be >= 2");
    const QSeries e4 = eisenstein_qexp(4, order);
    const QSeries e6 = eisenstein_qexp(6, order);
    return Rational(1, 1728) * (e4.pow(3) - e6.pow(2));
}

double delta_eval(double qt, double tol) {
    const double e4 = eisenstein_eval(4, qt, tol);
    const double e6 = eisenstein_eval(6, qt, tol);
    return (e4 * e4 * e4 - e6 * e6) / 1728.0;
}

// --------------------------------------------------------------------------

ThetaPoly::ThetaPoly(ThetaBasis basis, int dim) : basis_(basis), dim_(dim) {
    if (dim <= 0 || dim % 2 != 0)
        throw std::invalid_argument("theta polynomial dimension must be a positive even integer");
    if (basis == ThetaBasis::ThetaPowers && dim % 8 != 0)
        throw std::invalid_argument("theta-powers basis requires dim = 0 (mod 8)");
}

void ThetaPoly::add_term(const Key& key, const Rational& c) {
    if (key[0] < 0 || key[1] < 0 || key[2] < 0)
        throw std::invalid_argument("negative monomial exponent");
    if (basis_ == ThetaBasis::E4Delta) {
        if (key[2] != 0)
            throw std::invalid_argument("E4/Delta monomials use two exponents");
        if (4 * key[0] + 12 * key[1] != weight())
            throw std::invalid_argument("monomial weight does not match dim/2");
    } else {
        if (key[0] + key[1] + key[2] != dim_ / 8)
            throw std::invalid_argument("monomial degree does not match dim/8");
    }
    if (c == 0) {
        terms_.erase(key);
        return;
    }
    auto [it, inserted] = terms_.emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

ThetaPoly extremal_theta(int n) {
    struct Row {
        int n;
        // coefficients of E4^{(w-12b)/4} Delta^b for b = 0, 1, ...
        std::vector<long long> coeffs;
    };
    static const std::vector<Row> rows = {
        {8, {1}},
        {24, {1, -720}},
        {32, {1, -960}},
        {48, {1, -1440, 125280}},
        {72, {1, -2160, 965520, -27302400}},
        {80, {1, -2400, 1360800, -103488000}},
    };
    for (const auto& row : rows) {
        if (row.n != n) continue;
        ThetaPoly p(ThetaBasis::E4Delta, n);
        const int w = n / 2;
        for (int b = 0; b < static_cast<int>(row.coeffs.size()); ++b) {
            const int a = (w - 12 * b) / 4;
            p.add_term({a, b, 0}, Rational(row.coeffs[b]));
        }
        return p;
    }
    throw std::invalid_argument(
        "no extremal theta series stored for dimension " + std::to_string(n) +
        "; supported: 8, 24, 32, 48, 72, 80");
}

namespace {

// Expands E4^a Delta^b into the theta-powers basis via
// E4 = (A+B+C)/2, Delta = ABC/256.
ThetaPoly::TermMap e4delta_monomial_in_theta_powers(int a, int b) {
    ThetaPoly::TermMap out;
    // multinomial expansion of (A+B+C)^a
    std::vector<Int> fact(a + 1);
    fact[0] = 1;
    for (int i = 1; i <= a; ++i) fact[i] = fact[i - 1] * i;
    const Rational scale =
        Rational(1, rational_pow(Rational(2), a) * rational_pow(Rational(256), b));
    for (int i = 0; i <= a; ++i) {
        for (int j = 0; j <= a - i; ++j) {
            const int k = a - i - j;
            const Rational c = scale * Rational(fact[a] / (fact[i] * fact[j] * fact[k]));
            out[{i + b, j + b, k + b}] += c;
        }
    }
    return out;
}

// Exact Gaussian elimination for the (small) change-of-basis systems.
// Returns false if the system is inconsistent.
bool solve_exact(std::vector<std::vector<Rational>>& aug, std::vector<Rational>& solution,
                 int ncols) {
    const int nrows = static_cast<int>(aug.size());
    int rank = 0;
    std::vector<int> pivot_col;
    for (int col = 0; col < ncols && rank < nrows; ++col) {
        int piv = -1;
        for (int r = rank; r < nrows; ++r) {
            if (aug[r][col] != 0) {
                piv = r;
                break;
            }
        }
        if (piv < 0) continue;
        std::swap(aug[rank], aug[piv]);
        const Rational inv = 1 / aug[rank][col];
        for (auto& v : aug[rank]) v *= inv;
        for (int r = 0; r < nrows; ++r) {
            if (r == rank || aug[r][col] == 0) continue;
            const Rational f = aug[r][col];
            for (int c2 = 0; c2 <= ncols; ++c2) aug[r][c2] -= f * aug[rank][c2];
        }
        pivot_col.push_back(col);
        ++rank;
    }
    for (int r = rank; r < nrows; ++r) {
        if (aug[r][ncols] != 0) return false;  // inconsistent
    }
    solution.assign(ncols, 0);
    for (int r = 0; r < rank; ++r) solution[pivot_col[r]] = aug[r][ncols];
    return true;
}

}  // namespace

ThetaPoly convert_basis(const ThetaPoly& p, ThetaBasis target) {
    if (p.basis() == target) return p;

    if (target == ThetaBasis::ThetaPowers) {
        ThetaPoly out(ThetaBasis::ThetaPowers, p.dim());
        for (const auto& [key, c] : p.terms()) {
            for (const auto& [tkey, tc] : e4delta_monomial_in_theta_powers(key[0], key[1]))
                out.add_term(tkey, c * tc);
        }
        return out;
    }

    // ThetaPowers -> E4Delta: match coefficients against the expansions of the
    // candidate monomials E4^a Delta^b with 4a + 12b = weight.
    const int w = p.weight();
    std::vector<std::pair<int, int>> candidates;
    for (int b = 0; 12 * b <= w; ++b) {
        if ((w - 12 * b) % 4 == 0) candidates.emplace_back((w - 12 * b) / 4, b);
    }
    std::map<ThetaPoly::Key, std::vector<Rational>> rows;
    auto row_of = [&](const ThetaPoly::Key& k) -> std::vector<Rational>& {
        auto [it, inserted] =
            rows.emplace(k, std::vector<Rational>(candidates.size() + 1, Rational(0)));
        return it->second;
    };
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        for (const auto& [tkey, tc] :
             e4delta_monomial_in_theta_powers(candidates[c].first, candidates[c].second))
            row_of(tkey)[c] = tc;
    }
    for (const auto& [tkey, tc] : p.terms()) row_of(tkey)[candidates.size()] = tc;

    std::vector<std::vector<Rational>> aug;
    aug.reserve(rows.size());
    for (auto& [k, row] : rows) aug.push_back(std::move(row));
    std::vector<Rational> solution;
    if (!solve_exact(aug, solution, static_cast<int>(candidates.size())))
        throw ConversionError(
            "polynomial is not expressible in the E4/Delta basis");

    ThetaPoly out(ThetaBasis::E4Delta, p.dim());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (solution[c] != 0)
            out.add_term({candidates[c].first, candidates[c].second, 0}, solution[c]);
    }
    return out;
}

Rational exact_gain_at_one(const ThetaPoly& p) {
    if (p.dim() % 8 != 0)
        throw std::invalid_argument("exact gain needs dim = 0 (mod 8)");
    const ThetaPoly q = convert_basis(p, ThetaBasis::ThetaPowers);
    // Lemniscatic substitution: at q = e^{-pi}, theta_2^8 = theta_4^8 and
    // theta_3^8 = 4 theta_4^8, so after normalizing theta_4^8 to 1 the
    // generators take the values (A, B, C) = (1, 4, 1) and theta_3^n = 4^{n/8}.
    Rational value = 0;
    for (const auto& [key, c] : q.terms())
        value += c * rational_pow(Rational(4), static_cast<unsigned>(key[1]));
    if (value == 0) throw std::domain_error("theta polynomial vanishes at y = 1");
    return rational_pow(Rational(4), static_cast<unsigned>(p.dim() / 8)) / value;
}

QSeries theta_poly_qexp(const ThetaPoly& p, int order) {
    if (order < 1) throw std::invalid_argument("order must be >= 1");
    if (p.basis() == ThetaBasis::E4Delta) {
        const int qt_order = (order + 1) / 2;
        const QSeries e4 = eisenstein_qexp(4, std::max(qt_order, 1));
        const QSeries dl = delta_qexp(std::max(qt_order, 2));
        QSeries sum = QSeries::zero(std::max(qt_order, 1));
        for (const auto& [key, c] : p.terms())
            sum = sum + c * (e4.pow(key[0]) * dl.pow(key[1]));
        return nome_square(sum).truncated(order);
    }
    const Rational r_order(order);
    const QSeries a = theta_expansion(2, r_order).pow(8);
    const QSeries b = theta_expansion(3, r_order).pow(8);
    const QSeries cth = theta_expansion(4, r_order).pow(8);
    QSeries sum = QSeries::zero(r_order);
    for (const auto& [key, c] : p.terms())
        sum = sum + c * (a.pow(key[0]) * b.pow(key[1]) * cth.pow(key[2]));
    return sum;
}

double theta_poly_eval(const ThetaPoly& p, double q, double tol) {
    const ThetaPoly tp = (p.basis() == ThetaBasis::ThetaPowers)
                             ? p
                             : convert_basis(p, ThetaBasis::ThetaPowers);
    const double a = std::pow(theta_numeric(2, q, tol), 8);
    const double b = std::pow(theta_numeric(3, q, tol), 8);
    const double c = std::pow(theta_numeric(4, q, tol), 8);
    double sum = 0.0;
    for (const auto& [key, coeff] : tp.terms())
        sum += to_double(coeff) * std::pow(a, key[0]) * std::pow(b, key[1]) *
               std::pow(c, key[2]);
    return sum;
}

}  // namespace latsec
