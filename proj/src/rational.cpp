#include <latsec/rational.hpp>

#include <stdexcept>

namespace latsec {

Rational parse_rational(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty rational string");
    std::string str(s);
    if (auto slash = str.find('/'); slash != std::string::npos) {
        Int num(str.substr(0, slash));
        Int den(str.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + str);
        return Rational(num, den);
    }
    if (auto dot = str.find('.'); dot != std::string::npos) {
        std::string digits = str.substr(0, dot) + str.substr(dot + 1);
        std::size_t frac_len = str.size() - dot - 1;
        Int den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        return Rational(Int(digits), den);
    }
    return Rational(Int(str));
}

std::string rational_string(const Rational& x) {
    const Int num = boost::multiprecision::numerator(x);
    const Int den = boost::multiprecision::denominator(x);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

Rational rational_pow(const Rational& base, unsigned e) {
    Rational r = 1;
    Rational b = base;
    while (e != 0) {
        if (e & 1u) r *= b;
        b *= b;
        e >>= 1u;
    }
    return r;
}

}  // namespace latsec
