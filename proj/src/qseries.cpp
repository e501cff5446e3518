#include <latsec/qseries.hpp>

#include <latsec/errors.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latsec {

namespace {

std::int64_t order_to_q4(const Rational& order) {
    // smallest quarter-grid bound >= order
    const Rational scaled = order * 4;
    Int num = boost::multiprecision::numerator(scaled);
    Int den = boost::multiprecision::denominator(scaled);
    Int q = num / den;
    if (q * den < num) q += 1;  // ceil for positive orders
    return q.convert_to<std::int64_t>();
}

void check_which(int which) {
    if (which < 2 || which > 4)
        throw std::invalid_argument("theta index must be 2, 3 or 4");
}

}  // namespace

QSeries QSeries::zero(const Rational& trunc_order) {
    if (trunc_order <= 0) throw std::invalid_argument("truncation order must be positive");
    QSeries s;
    s.trunc_q4_ = order_to_q4(trunc_order);
    return s;
}

QSeries QSeries::constant(const Rational& value, const Rational& trunc_order) {
    QSeries s = zero(trunc_order);
    if (value != 0) {
        s.terms_[0] = value;
        s.growth_scale_ = std::abs(to_double(value)) * (1.0 + 1e-12);
    }
    return s;
}

void QSeries::set_coeff(const Rational& exponent, const Rational& c) {
    const Rational scaled = exponent * 4;
    if (boost::multiprecision::denominator(scaled) != 1)
        throw std::invalid_argument("exponent is off the quarter-integer grid");
    const auto key = boost::multiprecision::numerator(scaled).convert_to<std::int64_t>();
    if (key < 0) throw std::invalid_argument("negative exponent");
    if (key >= trunc_q4_)
        throw std::invalid_argument("exponent at or beyond the truncation order");
    if (c == 0) {
        terms_.erase(key);
        return;
    }
    terms_[key] = c;
    const double e = static_cast<double>(key) / 4.0;
    const double needed =
        std::abs(to_double(c)) / std::pow(1.0 + e, growth_degree_);
    growth_scale_ = std::max(growth_scale_, needed * (1.0 + 1e-12));
}

Rational QSeries::coeff(const Rational& exponent) const {
    const Rational scaled = exponent * 4;
    if (boost::multiprecision::denominator(scaled) != 1) return 0;
    const auto key = boost::multiprecision::numerator(scaled).convert_to<std::int64_t>();
    auto it = terms_.find(key);
    return it == terms_.end() ? Rational(0) : it->second;
}

void QSeries::set_growth(double scale, int degree) {
    if (scale < 0 || degree < 0) throw std::invalid_argument("invalid growth certificate");
    growth_scale_ = scale;
    growth_degree_ = degree;
    tail_zero_ = false;
}

QSeries QSeries::truncated(const Rational& new_order) const {
    const std::int64_t q4 = order_to_q4(new_order);
    if (q4 > trunc_q4_)
        throw std::invalid_argument("cannot extend a series by truncation");
    QSeries out;
    out.trunc_q4_ = q4;
    out.growth_scale_ = growth_scale_;
    out.growth_degree_ = growth_degree_;
    out.tail_zero_ = tail_zero_;
    for (const auto& [k, c] : terms_) {
        if (k >= q4) break;
        out.terms_[k] = c;
    }
    return out;
}

void QSeries::prune_zeros() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second == 0)
            it = terms_.erase(it);
        else
            ++it;
    }
}

QSeries operator+(const QSeries& a, const QSeries& b) {
    QSeries out;
    out.trunc_q4_ = std::min(a.trunc_q4_, b.trunc_q4_);
    out.growth_scale_ = a.growth_scale_ + b.growth_scale_;
    out.growth_degree_ = std::max(a.growth_degree_, b.growth_degree_);
    out.tail_zero_ = a.tail_zero_ && b.tail_zero_;
    for (const auto& [k, c] : a.terms_)
        if (k < out.trunc_q4_) out.terms_[k] = c;
    for (const auto& [k, c] : b.terms_)
        if (k < out.trunc_q4_) out.terms_[k] += c;
    out.prune_zeros();
    return out;
}

QSeries operator-(const QSeries& a, const QSeries& b) {
    QSeries out;
    out.trunc_q4_ = std::min(a.trunc_q4_, b.trunc_q4_);
    out.growth_scale_ = a.growth_scale_ + b.growth_scale_;
    out.growth_degree_ = std::max(a.growth_degree_, b.growth_degree_);
    out.tail_zero_ = a.tail_zero_ && b.tail_zero_;
    for (const auto& [k, c] : a.terms_)
        if (k < out.trunc_q4_) out.terms_[k] = c;
    for (const auto& [k, c] : b.terms_)
        if (k < out.trunc_q4_) out.terms_[k] -= c;
    out.prune_zeros();
    return out;
}

QSeries operator*(const QSeries& a, const QSeries& b) {
    QSeries out;
    out.trunc_q4_ = std::min(a.trunc_q4_, b.trunc_q4_);
    // Splits of a quarter-grid exponent e number at most 4e + 1 <= 4(1+e).
    out.growth_scale_ = 4.0 * a.growth_scale_ * b.growth_scale_;
    out.growth_degree_ = a.growth_degree_ + b.growth_degree_ + 1;
    out.tail_zero_ = a.tail_zero_ && b.tail_zero_;
    for (const auto& [ka, ca] : a.terms_) {
        if (ka >= out.trunc_q4_) break;
        for (const auto& [kb, cb] : b.terms_) {
            const std::int64_t k = ka + kb;
            if (k >= out.trunc_q4_) break;
            out.terms_[k] += ca * cb;
        }
    }
    out.prune_zeros();
    return out;
}

QSeries operator*(const Rational& c, const QSeries& a) {
    QSeries out = a;
    if (c == 0) {
        out.terms_.clear();
        out.growth_scale_ = 0.0;
        return out;
    }
    for (auto& [k, v] : out.terms_) v *= c;
    out.growth_scale_ *= std::abs(to_double(c)) * (1.0 + 1e-12);
    return out;
}

QSeries QSeries::pow(unsigned k) const {
    QSeries result = QSeries::constant(1, trunc_order());
    QSeries base = *this;
    while (k != 0) {
        if (k & 1u) result = result * base;
        if (k >>= 1u) base = base * base;
    }
    return result;
}

QSeries theta_expansion(int which, const Rational& order) {
    check_which(which);
    if (order <= 0) throw std::invalid_argument("truncation order must be positive");
    QSeries s = QSeries::zero(order);
    const std::int64_t limit = s.trunc_q4();
    if (which == 3 || which == 4) {
        s.set_coeff(0, 1);
        for (std::int64_t n = 1; 4 * n * n < limit; ++n) {
            const Rational c = (which == 4 && (n & 1)) ? Rational(-2) : Rational(2);
            s.set_coeff(Rational(n * n), c);
        }
    } else {
        for (std::int64_t n = 0; (2 * n + 1) * (2 * n + 1) < limit; ++n) {
            s.set_coeff(Rational((2 * n + 1) * (2 * n + 1), 4), 2);
        }
    }
    s.set_growth(2.0, 0);
    return s;
}

double eval_series(const QSeries& s, double q, double tail_tol) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("q must lie in (0, 1)");
    if (!(tail_tol > 0.0)) throw std::invalid_argument("tail tolerance must be positive");

    if (s.tail_is_zero()) {
        double sum = 0.0;
        for (const auto& [k, c] : s.terms())
            sum += to_double(c) * std::pow(q, static_cast<double>(k) / 4.0);
        return sum;
    }

    // Tail majorant: sum over quarter-grid exponents j/4 >= trunc of
    // C (1 + j/4)^d x^j with x = q^{1/4}. Consecutive-term ratios are at most
    // x ((J+5)/(J+4))^d and decreasing, so a geometric bound applies when
    // that ratio is below 1.
    const double x = std::pow(q, 0.25);
    const double J = static_cast<double>(s.trunc_q4());
    const int d = s.growth_degree();
    const double C = s.growth_scale();
    const double ratio = x * std::pow((J + 5.0) / (J + 4.0), d);
    if (!(ratio < 1.0))
        throw PrecisionError(
            "tail bound not certifiable at this truncation order; regenerate "
            "the series with a larger order");
    const double first = C * std::pow(1.0 + J / 4.0, d) * std::pow(x, J);
    const double tail = first / (1.0 - ratio);
    if (!(tail < tail_tol))
        throw PrecisionError(
            "certified tail " + std::to_string(tail) +
            " exceeds the requested tolerance; regenerate the series with a "
            "larger truncation order");

    double sum = 0.0;
    for (const auto& [k, c] : s.terms())
        sum += to_double(c) * std::pow(q, static_cast<double>(k) / 4.0);
    return sum;
}

double theta_numeric(int which, double q, double tol) {
    check_which(which);
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("q must lie in (0, 1)");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    // Terms decay superexponentially; once 2 q^{e_next} / (1 - q) < tol the
    // remaining tail is below tol.
    if (which == 2) {
        double sum = 0.0;
        for (std::int64_t n = 0;; ++n) {
            const double e = (n + 0.5) * (n + 0.5);
            const double t = 2.0 * std::pow(q, e);
            sum += t;
            const double next = 2.0 * std::pow(q, (n + 1.5) * (n + 1.5));
            if (next / (1.0 - q) < tol) break;
        }
        return sum;
    }
    double sum = 1.0;
    for (std::int64_t n = 1;; ++n) {
        double t = 2.0 * std::pow(q, static_cast<double>(n) * n);
        if (which == 4 && (n & 1)) t = -t;
        sum += t;
        const double next = 2.0 * std::pow(q, static_cast<double>(n + 1) * (n + 1));
        if (next / (1.0 - q) < tol) break;
    }
    return sum;
}

QSeries nome_square(const QSeries& s) {
    QSeries out = QSeries::zero(s.trunc_order() * 2);
    for (const auto& [k, c] : s.terms()) out.set_coeff(Rational(k, 2), c);
    // |c(e)| = |c_orig(e/2)| <= C (1 + e/2)^d <= C (1 + e)^d
    if (!s.tail_is_zero()) out.set_growth(s.growth_scale(), s.growth_degree());
    return out;
}

double ThetaExpr::eval(double q, double tol) const {
    double th[5] = {0, 0, 0, 0, 0};
    bool have[5] = {false, false, false, false, false};
    double sum = 0.0;
    for (const auto& t : terms) {
        double v = to_double(t.coeff);
        for (auto [idx, p] : {std::pair{2, t.p2}, {3, t.p3}, {4, t.p4}}) {
            if (p == 0) continue;
            if (!have[idx]) {
                th[idx] = theta_numeric(idx, q, tol);
                have[idx] = true;
            }
            v *= std::pow(th[idx], p);
        }
        sum += v;
    }
    return sum;
}

QSeries ThetaExpr::qexp(const Rational& order) const {
    QSeries sum = QSeries::zero(order);
    for (const auto& t : terms) {
        QSeries term = QSeries::constant(t.coeff, order);
        if (t.p2 > 0) term = term * theta_expansion(2, order).pow(t.p2);
        if (t.p3 > 0) term = term * theta_expansion(3, order).pow(t.p3);
        if (t.p4 > 0) term = term * theta_expansion(4, order).pow(t.p4);
        sum = sum + term;
    }
    return sum;
}

}  // namespace latsec
