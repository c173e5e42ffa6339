#pragma once
// Scalar types: double for numerics, exact rationals for golden checks.

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace tsdae {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

} // namespace tsdae

namespace Eigen {
template <>
struct NumTraits<tsdae::Rational> : GenericNumTraits<tsdae::Rational> {
    using Real = tsdae::Rational;
    using NonInteger = tsdae::Rational;
    using Nested = tsdae::Rational;
    using Literal = tsdae::Rational;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 4,
        MulCost = 8
    };
    static inline Real epsilon() { return Real(0); }
    static inline Real dummy_precision() { return Real(0); }
    static inline Real highest() { return Real(boost::multiprecision::cpp_int(1) << 1000); }
    static inline Real lowest() { return -highest(); }
    static inline int digits10() { return 0; }
};
} // namespace Eigen

// Eigen expression types expose a void const_iterator, which trips
// boost's byte-container probe when Eigen asks whether an expression
// converts to a Rational.
namespace tsdae::detail {
template <class D>
std::true_type eigen_probe(const Eigen::EigenBase<D>*);
std::false_type eigen_probe(...);
template <class C>
inline constexpr bool is_eigen_v = decltype(eigen_probe(static_cast<C*>(nullptr)))::value;
} // namespace tsdae::detail

namespace boost::multiprecision::detail {
template <class C>
    requires tsdae::detail::is_eigen_v<C>
struct is_byte_container<C> : boost::false_type {};
} // namespace boost::multiprecision::detail

namespace tsdae {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

template <class T>
T abs_value(const T& x) {
    if constexpr (is_exact_v<T>) {
        return x < 0 ? T(-x) : x;
    } else {
        return std::abs(x);
    }
}

template <class T>
double max_abs(const Mat<T>& M) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) m = std::max(m, std::abs(to_double(M(i, j))));
    return m;
}

template <class T>
double max_abs(const Vec<T>& v) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(to_double(v(i))));
    return m;
}

// Parses a decimal literal such as "12", "0.125" or "1.5e-3".
// In exact mode the value is the exact rational the digits denote.
template <class T>
T parse_decimal(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty number");
    if constexpr (!is_exact_v<T>) {
        std::string buf(s);
        char* end = nullptr;
        double v = std::strtod(buf.c_str(), &end);
        if (end != buf.c_str() + buf.size()) throw std::invalid_argument("bad number '" + buf + "'");
        return v;
    } else {
        std::size_t i = 0;
        bool neg = false;
        if (s[i] == '+' || s[i] == '-') neg = (s[i++] == '-');
        boost::multiprecision::cpp_int mant = 0;
        int scale = 0;
        bool digits = false, dot = false;
        for (; i < s.size(); ++i) {
            char c = s[i];
            if (c >= '0' && c <= '9') {
                mant = mant * 10 + (c - '0');
                digits = true;
                if (dot) --scale;
            } else if (c == '.' && !dot) {
                dot = true;
            } else {
                break;
            }
        }
        if (!digits) throw std::invalid_argument("bad number '" + std::string(s) + "'");
        if (i < s.size()) {
            if (s[i] != 'e' && s[i] != 'E') throw std::invalid_argument("bad number '" + std::string(s) + "'");
            ++i;
            bool eneg = false;
            if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = (s[i++] == '-');
            if (i >= s.size()) throw std::invalid_argument("bad exponent in '" + std::string(s) + "'");
            int e = 0;
            for (; i < s.size(); ++i) {
                if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("bad exponent in '" + std::string(s) + "'");
                e = e * 10 + (s[i] - '0');
                if (e > 4000) throw std::invalid_argument("exponent too large");
            }
            scale += eneg ? -e : e;
        }
        Rational r(mant);
        boost::multiprecision::cpp_int p10 = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                        static_cast<unsigned>(std::abs(scale)));
        if (scale >= 0)
            r *= Rational(p10);
        else
            r /= Rational(p10);
        return neg ? Rational(-r) : r;
    }
}

// Converts a double exactly (every finite double is a dyadic rational).
template <class T>
T from_double(double v) {
    if constexpr (is_exact_v<T>) {
        return Rational(v);
    } else {
        return v;
    }
}

template <class T>
Mat<T> cast_matrix(const Mat<double>& M) {
    Mat<T> R(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) R(i, j) = from_double<T>(M(i, j));
    return R;
}

template <class T>
Mat<double> to_double_matrix(const Mat<T>& M) {
    Mat<double> R(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) R(i, j) = to_double(M(i, j));
    return R;
}

} // namespace tsdae
