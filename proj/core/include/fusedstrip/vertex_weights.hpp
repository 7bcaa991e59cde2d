#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fusedstrip/errors.hpp"
#include "fusedstrip/linalg.hpp"
#include "fusedstrip/qseries.hpp"
#include "fusedstrip/scalar.hpp"

namespace fusedstrip {

constexpr double kPoleTol = 1e-10;

// Spin-I/2 bulk weights R^{c,d}_{a,b}: incoming pair (a,b) = (below, left),
// outgoing pair (c,d) = (above, right). Zero unless a+b = c+d.
template <class S>
struct RTensor {
    int I = 0;
    std::vector<S> e;

    RTensor() = default;
    explicit RTensor(int spin)
        : I(spin), e(static_cast<size_t>((spin + 1) * (spin + 1) * (spin + 1) * (spin + 1)),
                    ScalarTraits<S>::from_int(0)) {}

    S& at(int a, int b, int c, int d) {
        const int n = I + 1;
        return e[static_cast<size_t>(((a * n + b) * n + c) * n + d)];
    }
    const S& at(int a, int b, int c, int d) const {
        const int n = I + 1;
        return e[static_cast<size_t>(((a * n + b) * n + c) * n + d)];
    }

    // Operator on C^{I+1} (x) C^{I+1}: column = incoming (a,b), row = outgoing.
    static RTensor from_operator(const Matrix<S>& op, int spin) {
        RTensor t(spin);
        const int n = spin + 1;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d)
                        t.at(a, b, c, d) = op(static_cast<size_t>(c * n + d),
                                              static_cast<size_t>(a * n + b));
        return t;
    }

    Matrix<S> to_operator() const {
        const int n = I + 1;
        Matrix<S> op(static_cast<size_t>(n * n), static_cast<size_t>(n * n));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d)
                        op(static_cast<size_t>(c * n + d), static_cast<size_t>(a * n + b)) =
                            at(a, b, c, d);
        return op;
    }
};

enum class BoundarySide { Left, Right };

// Boundary weights K^{out}_{in} on a single edge space C^{I+1}.
template <class S>
struct KMatrix {
    int I = 0;
    BoundarySide side = BoundarySide::Left;
    std::vector<S> e;

    KMatrix() = default;
    KMatrix(int spin, BoundarySide s)
        : I(spin), side(s),
          e(static_cast<size_t>((spin + 1) * (spin + 1)), ScalarTraits<S>::from_int(0)) {}

    S& at(int in, int out) { return e[static_cast<size_t>(in * (I + 1) + out)]; }
    const S& at(int in, int out) const { return e[static_cast<size_t>(in * (I + 1) + out)]; }

    // Operator convention: column = incoming state, row = outgoing state.
    static KMatrix from_operator(const Matrix<S>& op, int spin, BoundarySide s) {
        KMatrix k(spin, s);
        for (int in = 0; in <= spin; ++in)
            for (int out = 0; out <= spin; ++out)
                k.at(in, out) = op(static_cast<size_t>(out), static_cast<size_t>(in));
        return k;
    }

    Matrix<S> to_operator() const {
        Matrix<S> op(static_cast<size_t>(I + 1), static_cast<size_t>(I + 1));
        for (int in = 0; in <= I; ++in)
            for (int out = 0; out <= I; ++out)
                op(static_cast<size_t>(out), static_cast<size_t>(in)) = at(in, out);
        return op;
    }
};

// Surjection Pi : (C^2)^{(x) I} -> C^{I+1} and the weighted injection PiHat
// back onto the q-exchangeable subspace; Pi o PiHat = id.
template <class S>
struct ProjectionPair {
    int I = 0;
    S q;
    Matrix<S> pi;      // (I+1) x 2^I
    Matrix<S> pi_hat;  // 2^I x (I+1)
};

template <class S>
ProjectionPair<S> projection_pair(int I, const S& q) {
    ProjectionPair<S> p;
    p.I = I;
    p.q = q;
    const size_t big = size_t{1} << I;
    p.pi = Matrix<S>(static_cast<size_t>(I + 1), big);
    p.pi_hat = Matrix<S>(big, static_cast<size_t>(I + 1));
    std::vector<S> z(I + 1);
    for (int a = 0; a <= I; ++a) z[a] = q_binomial(I, a, q);
    std::vector<int> w(I);
    for (size_t m = 0; m < big; ++m) {
        int weight = 0;
        for (int i = 0; i < I; ++i) {
            w[i] = static_cast<int>((m >> (I - 1 - i)) & 1u);
            weight += w[i];
        }
        p.pi(static_cast<size_t>(weight), m) = ScalarTraits<S>::from_int(1);
        p.pi_hat(m, static_cast<size_t>(weight)) = pow_int(q, inv_count(w)) / z[weight];
    }
    return p;
}

// ---------------------------------------------------------------------------
// Unfused spin-1/2 matrices. Column-stochastic operator convention throughout:
// column = incoming configuration, row = outgoing, first tensor factor =
// vertical edge. Basis of C^2 (x) C^2: {e0e0, e0e1, e1e0, e1e1}.
// ---------------------------------------------------------------------------

template <class S>
Matrix<S> unfused_R(const S& u, const S& q) {
    const S one = ScalarTraits<S>::from_int(1);
    S den = one - q * u;
    if (ScalarTraits<S>::near_zero(den, kPoleTol))
        throw SingularParameter("unfused_R: pole at qu = 1");
    Matrix<S> m(4, 4);
    m(0, 0) = one;
    m(3, 3) = one;
    m(1, 1) = q * (one - u) / den;
    m(1, 2) = u * (one - q) / den;
    m(2, 1) = (one - q) / den;
    m(2, 2) = (one - u) / den;
    return m;
}

template <class S>
Matrix<S> unfused_R_inv(const S& u, const S& q) {
    const S one = ScalarTraits<S>::from_int(1);
    S den = q - u;
    if (ScalarTraits<S>::near_zero(den, kPoleTol))
        throw SingularParameter("unfused_R_inv: pole at u = q");
    Matrix<S> m(4, 4);
    m(0, 0) = one;
    m(3, 3) = one;
    m(1, 1) = (one - u) / den;
    m(1, 2) = u * (q - one) / den;
    m(2, 1) = (q - one) / den;
    m(2, 2) = q * (one - u) / den;
    return m;
}

template <class S>
Matrix<S> unfused_K(const S& u, const S& aa, const S& cc) {
    const S one = ScalarTraits<S>::from_int(1);
    S den = cc * u * u + u - aa;
    if (ScalarTraits<S>::near_zero(den, kPoleTol))
        throw SingularParameter("unfused_K: vanishing denominator c u^2 + u - a");
    Matrix<S> m(2, 2);
    m(0, 0) = ((cc - aa) * u * u + u) / den;
    m(0, 1) = cc * (u * u - one) / den;
    m(1, 0) = aa * (u * u - one) / den;
    m(1, 1) = (cc - aa + u) / den;
    return m;
}

template <class S>
Matrix<S> unfused_Kbar(const S& u, const S& bb, const S& dd) {
    const S one = ScalarTraits<S>::from_int(1);
    S den = bb * u * u - u - dd;
    if (ScalarTraits<S>::near_zero(den, kPoleTol))
        throw SingularParameter("unfused_Kbar: vanishing denominator b u^2 - u - d");
    Matrix<S> m(2, 2);
    m(0, 0) = ((bb - dd) * u * u - u) / den;
    m(0, 1) = bb * (u * u - one) / den;
    m(1, 0) = dd * (u * u - one) / den;
    m(1, 1) = (bb - dd - u) / den;
    return m;
}

// R-check = P R acting on adjacent factors; used by the braided forms.
template <class S>
Matrix<S> unfused_R_check(const S& u, const S& q) {
    Matrix<S> r = unfused_R(u, q);
    Matrix<S> m(4, 4);
    for (size_t a = 0; a < 2; ++a)
        for (size_t b = 0; b < 2; ++b)
            for (size_t c = 0; c < 2; ++c)
                for (size_t d = 0; d < 2; ++d)
                    m(c * 2 + d, a * 2 + b) = r(d * 2 + c, a * 2 + b);
    return m;
}

template <class S>
Matrix<S> unfused_R_check_inv(const S& u, const S& q) {
    // (P R)^{-1} = R^{-1} P: permute the columns of R^{-1}.
    Matrix<S> r = unfused_R_inv(u, q);
    Matrix<S> m(4, 4);
    for (size_t a = 0; a < 2; ++a)
        for (size_t b = 0; b < 2; ++b)
            for (size_t c = 0; c < 2; ++c)
                for (size_t d = 0; d < 2; ++d)
                    m(c * 2 + d, a * 2 + b) = r(c * 2 + d, b * 2 + a);
    return m;
}

// ---------------------------------------------------------------------------
// Fusion. Legs 1..I are the vertical group, I+1..2I the horizontal group;
// flattening is row-major with leg 1 slowest. Operator products compose with
// the rightmost factor acting first.
// ---------------------------------------------------------------------------

namespace detail {

template <class S>
Matrix<S> kron_pair(const Matrix<S>& A, const Matrix<S>& B) {
    Matrix<S> K(A.rows() * B.rows(), A.cols() * B.cols());
    for (size_t i = 0; i < A.rows(); ++i)
        for (size_t j = 0; j < A.cols(); ++j) {
            if (ScalarTraits<S>::is_zero(A(i, j))) continue;
            for (size_t k = 0; k < B.rows(); ++k)
                for (size_t l = 0; l < B.cols(); ++l)
                    K(i * B.rows() + k, j * B.cols() + l) = A(i, j) * B(k, l);
        }
    return K;
}

inline std::vector<int> reversal_perm(int I) {
    std::vector<int> p(I);
    for (int i = 1; i <= I; ++i) p[i - 1] = I + 1 - i;
    return p;
}

}  // namespace detail

// Unprojected fused R operator on (C^2)^{(x) 2I}, as a matrix applied to `M`
// from the left (pass identity to obtain the full operator).
template <class S>
void apply_fused_R_factors(const S& u, const S& q, int I, Matrix<S>& M) {
    for (int a = 1; a <= I; ++a)
        for (int b = I; b >= 1; --b) {
            Matrix<S> f = unfused_R(u * pow_int(q, b - a), q);
            apply_legs_left(f, {b, a + I}, 2 * I, 2, M);
        }
}

template <class S>
void apply_fused_R_check_factors(const S& u, const S& q, int I, Matrix<S>& M) {
    for (int a = 1; a <= I; ++a)
        for (int b = a + I - 1; b >= a; --b) {
            Matrix<S> f = unfused_R_check(u * pow_int(q, b + 1 - 2 * a), q);
            apply_legs_left(f, {b, b + 1}, 2 * I, 2, M);
        }
}

template <class S>
RTensor<S> fused_R_composed(const S& u, const S& q, int I) {
    ProjectionPair<S> pp = projection_pair(I, q);
    Matrix<S> M = detail::kron_pair(pp.pi_hat, pp.pi_hat);
    apply_fused_R_factors(u, q, I, M);
    Matrix<S> op = detail::kron_pair(pp.pi, pp.pi) * M;
    return RTensor<S>::from_operator(op, I);
}

template <class S>
RTensor<S> fused_R_braided(const S& u, const S& q, int I) {
    ProjectionPair<S> pp = projection_pair(I, q);
    Matrix<S> M = detail::kron_pair(pp.pi_hat, pp.pi_hat);
    apply_fused_R_check_factors(u, q, I, M);
    Matrix<S> rcheck = detail::kron_pair(pp.pi, pp.pi) * M;
    // R^I = P * Rcheck^I on C^{I+1} (x) C^{I+1}.
    const int n = I + 1;
    Matrix<S> op(static_cast<size_t>(n * n), static_cast<size_t>(n * n));
    for (int c1 = 0; c1 < n; ++c1)
        for (int c2 = 0; c2 < n; ++c2)
            for (size_t col = 0; col < op.cols(); ++col)
                op(static_cast<size_t>(c1 * n + c2), col) =
                    rcheck(static_cast<size_t>(c2 * n + c1), col);
    return RTensor<S>::from_operator(op, I);
}

// Explicit formula for the fused R entries via Phi_{q^{-1}} coefficients.
template <class S>
RTensor<S> fused_R_explicit(const S& u, const S& q, int I) {
    RTensor<S> t(I);
    const S qI = pow_int(q, I);
    for (int a = 0; a <= I; ++a)
        for (int b = 0; b <= I; ++b)
            for (int c = 0; c <= I; ++c) {
                int d = a + b - c;
                if (d < 0 || d > I) continue;
                S sum = ScalarTraits<S>::from_int(0);
                int pmax = std::min(b, c);
                for (int p = 0; p <= pmax; ++p) {
                    sum += phi_qinv(c - p, c + d - p, u, qI * u, q) *
                           phi_qinv(p, b, qI / u, qI, q);
                }
                t.at(a, b, c, d) = pow_int(u, d - b) * pow_int(q, (d - a) * I) * sum;
            }
    return t;
}

// Fused boundary operators (double precision; spectral grids involve square
// roots of q for even I).
namespace detail {

inline double q_halfpow(double q, int twice_exp) {
    return std::pow(q, static_cast<double>(twice_exp) / 2.0);
}

}  // namespace detail

void apply_fused_K_factors(double u, double q, double aa, double cc, int I, DMatrix& M);
void apply_fused_Kbar_factors(double u, double q, double bb, double dd, int I, DMatrix& M);

KMatrix<double> fused_K_composed(double u, double q, double aa, double cc, int I);
KMatrix<double> fused_Kbar_composed(double u, double q, double bb, double dd, int I);
KMatrix<double> fused_K_braided(double u, double q, double aa, double cc, int I);
KMatrix<double> fused_Kbar_braided(double u, double q, double bb, double dd, int I);

// ---------------------------------------------------------------------------
// Model assembly and validation.
// ---------------------------------------------------------------------------

struct ModelParams {
    int I = 1;
    double q = 0.5;
    double kappa = 0.5;
    double aa = 3.0, bb = 3.0, cc = 0.1, dd = 0.1;

    void validate() const;
    bool admissible() const;
};

struct FusedWeights {
    RTensor<double> R;
    KMatrix<double> left_K;
    KMatrix<double> right_K;
};

// Strip weights: R^{c,d}_{a,b} = R^I(kappa^2)^{d,c}_{b,a} (note the index
// swap), lK = K^I(kappa), rK = Kbar^I(1/kappa).
FusedWeights model_weights(const ModelParams& params);

struct StochasticReport {
    bool pass = true;
    double max_row_sum_err = 0.0;
    double max_conservation_abs = 0.0;
    double min_allowed_entry = 1.0;
    double min_entry = 0.0;
    std::vector<std::string> failures;
};

StochasticReport check_stochastic(const FusedWeights& w, double tol);

struct CommutationResiduals {
    double r_residual = 0.0;
    double k_residual = 0.0;
    double kbar_residual = 0.0;
};

// Max-norm invariance residuals ||(Id - F) Op F|| of the unprojected fused
// operators on the q-exchangeable subspace (F (x) F for the bulk operator).
CommutationResiduals q_exchangeable_commutation_check(int I, double q, double u, double aa,
                                                      double cc, double bb, double dd);

}  // namespace fusedstrip
