#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <type_traits>

namespace fusedstrip {

// Exact rational scalar on arbitrary-precision integers. Kept in canonical
// form: gcd-reduced, denominator > 0.
class Rational {
  public:
    using Int = boost::multiprecision::cpp_int;

    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
    Rational(Int n, Int d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

    static Rational ratio(long long n, long long d) { return Rational(Int(n), Int(d)); }

    const Int& num() const { return num_; }
    const Int& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }

    double to_double() const {
        return static_cast<double>(boost::multiprecision::cpp_rational(num_) /
                                   boost::multiprecision::cpp_rational(den_));
    }

    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    Rational& operator+=(const Rational& o) {
        num_ = num_ * o.den_ + o.num_ * den_;
        den_ *= o.den_;
        normalize();
        return *this;
    }
    Rational& operator-=(const Rational& o) { return *this += -o; }
    Rational& operator*=(const Rational& o) {
        num_ *= o.num_;
        den_ *= o.den_;
        normalize();
        return *this;
    }
    Rational& operator/=(const Rational& o) {
        if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
        num_ *= o.den_;
        den_ *= o.num_;
        normalize();
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        os << r.num_;
        if (r.den_ != 1) os << "/" << r.den_;
        return os;
    }

    std::string str() const {
        std::string s = num_.str();
        if (den_ != 1) s += "/" + den_.str();
        return s;
    }

  private:
    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        Int g = boost::multiprecision::gcd(num_ < 0 ? Int(-num_) : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    Int num_;
    Int den_;
};

// Generic access points shared by the double and rational backends. Numeric
// code is templated on the scalar; these pick the right primitive per type.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static double from_int(long long n) { return static_cast<double>(n); }
    static double from_ratio(long long n, long long d) {
        return static_cast<double>(n) / static_cast<double>(d);
    }
    static bool is_zero(double x) { return x == 0.0; }
    static bool near_zero(double x, double tol) { return std::abs(x) < tol; }
    static double to_double(double x) { return x; }
};

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static Rational from_int(long long n) { return Rational(n); }
    static Rational from_ratio(long long n, long long d) { return Rational::ratio(n, d); }
    static bool is_zero(const Rational& x) { return x.is_zero(); }
    static bool near_zero(const Rational& x, double /*tol*/) { return x.is_zero(); }
    static double to_double(const Rational& x) { return x.to_double(); }
};

// x^n for integer n (negative allowed; x must be invertible then).
template <class S>
S pow_int(S x, long long n) {
    if (n < 0) {
        x = ScalarTraits<S>::from_int(1) / x;
        n = -n;
    }
    S r = ScalarTraits<S>::from_int(1);
    while (n > 0) {
        if (n & 1) r = r * x;
        x = x * x;
        n >>= 1;
    }
    return r;
}

}  // namespace fusedstrip
