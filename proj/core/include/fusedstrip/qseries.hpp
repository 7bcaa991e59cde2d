#pragma once

#include <cstdint>
#include <vector>

#include "fusedstrip/errors.hpp"
#include "fusedstrip/scalar.hpp"

namespace fusedstrip {

// Finite q-Pochhammer symbol (x; s)_n = prod_{j=0}^{n-1} (1 - x s^j).
// Empty product for n = 0.
template <class S>
S q_pochhammer(const S& x, const S& s, int n) {
    const S one = ScalarTraits<S>::from_int(1);
    S r = one;
    S xs = x;
    for (int j = 0; j < n; ++j) {
        r = r * (one - xs);
        xs = xs * s;
    }
    return r;
}

// Infinite q-Pochhammer (x; q)_inf for |q| < 1, truncated once the running
// factor deviation |x q^k| drops below tol. Throws NonConvergence when the
// term cap is reached first.
inline double q_pochhammer_inf(double x, double q, double tol = 1e-16, int max_terms = 500) {
    if (!(std::abs(q) < 1.0)) throw InvalidParams("q_pochhammer_inf: |q| must be < 1");
    double r = 1.0;
    double xq = x;
    for (int k = 0; k < max_terms; ++k) {
        if (std::abs(xq) < tol) return r;
        r *= (1.0 - xq);
        xq *= q;
    }
    if (std::abs(xq) >= tol)
        throw NonConvergence("q_pochhammer_inf: term cap reached before |x q^k| < tol");
    return r;
}

// |(r e^{i th}; q)_inf|^2 for a conjugate pair of arguments, evaluated in real
// arithmetic: prod_j (1 - 2 r q^j cos(th) + r^2 q^{2j}).
inline double q_pochhammer_inf_abs2(double r, double cos_th, double q, double tol = 1e-16,
                                    int max_terms = 500) {
    if (!(std::abs(q) < 1.0)) throw InvalidParams("q_pochhammer_inf_abs2: |q| must be < 1");
    double acc = 1.0;
    double rq = r;
    for (int k = 0; k < max_terms; ++k) {
        if (std::abs(rq) < tol) return acc;
        acc *= (1.0 - 2.0 * rq * cos_th + rq * rq);
        rq *= q;
    }
    if (std::abs(rq) >= tol)
        throw NonConvergence("q_pochhammer_inf_abs2: term cap reached before convergence");
    return acc;
}

// inv(a_1..a_I) = #{i<j : a_i > a_j}; tinv counts a_i < a_j.
inline int inv_count(const std::vector<int>& word) {
    int c = 0;
    for (size_t i = 0; i < word.size(); ++i)
        for (size_t j = i + 1; j < word.size(); ++j)
            if (word[i] > word[j]) ++c;
    return c;
}

inline int tinv_count(const std::vector<int>& word) {
    int c = 0;
    for (size_t i = 0; i < word.size(); ++i)
        for (size_t j = i + 1; j < word.size(); ++j)
            if (word[i] < word[j]) ++c;
    return c;
}

// Z_q(I; a) = (q;q)_I / ((q;q)_a (q;q)_{I-a}) via the closed form.
template <class S>
S q_binomial(int I, int a, const S& q) {
    if (a < 0 || a > I) throw InvalidParams("q_binomial: need 0 <= a <= I");
    S num = q_pochhammer(q, q, I);
    S den = q_pochhammer(q, q, a) * q_pochhammer(q, q, I - a);
    return num / den;
}

// Same quantity as a sum of q^{inv} over binary words of weight a. Used as an
// independent route for testing the closed form.
template <class S>
S q_binomial_by_words(int I, int a, const S& q) {
    if (a < 0 || a > I) throw InvalidParams("q_binomial_by_words: need 0 <= a <= I");
    S total = ScalarTraits<S>::from_int(0);
    for (uint32_t m = 0; m < (1u << I); ++m) {
        std::vector<int> w(I);
        int weight = 0;
        for (int i = 0; i < I; ++i) {
            w[i] = (m >> (I - 1 - i)) & 1u;
            weight += w[i];
        }
        if (weight != a) continue;
        total = total + pow_int(q, inv_count(w));
    }
    return total;
}

// Phi_{q^{-1}}(i, j; x, y)
//   = (y/x)^i (x;q^{-1})_i (y/x;q^{-1})_{j-i} / (y;q^{-1})_j
//     * (q^{-1};q^{-1})_j / ((q^{-1};q^{-1})_i (q^{-1};q^{-1})_{j-i}).
// Requires 0 <= i <= j and nonvanishing denominators.
template <class S>
S phi_qinv(int i, int j, const S& x, const S& y, const S& q) {
    if (i < 0 || j < i) throw InvalidParams("phi_qinv: need 0 <= i <= j");
    const S one = ScalarTraits<S>::from_int(1);
    if (ScalarTraits<S>::is_zero(x)) throw SingularParameter("phi_qinv: x = 0");
    const S qi = one / q;
    S den_y = q_pochhammer(y, qi, j);
    S den_i = q_pochhammer(qi, qi, i);
    S den_ji = q_pochhammer(qi, qi, j - i);
    if (ScalarTraits<S>::near_zero(den_y, 1e-300) || ScalarTraits<S>::near_zero(den_i, 1e-300) ||
        ScalarTraits<S>::near_zero(den_ji, 1e-300))
        throw SingularParameter("phi_qinv: vanishing denominator Pochhammer");
    S yox = y / x;
    S r = pow_int(yox, i);
    r = r * q_pochhammer(x, qi, i) * q_pochhammer(yox, qi, j - i) / den_y;
    r = r * q_pochhammer(qi, qi, j) / (den_i * den_ji);
    return r;
}

}  // namespace fusedstrip
