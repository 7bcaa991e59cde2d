#include "fusedstrip/vertex_weights.hpp"

#include <cmath>
#include <sstream>

namespace fusedstrip {

namespace {

// Shared skeleton for the two boundary fusions: walk the turning points in
// the given order, interleaving crossing factors, then reverse the legs.
DMatrix projected_boundary(const DMatrix& composed, const ProjectionPair<double>& pp, int I) {
    DMatrix M = permute_legs_rows(composed, detail::reversal_perm(I), 2);
    return pp.pi * M;
}

}  // namespace

void apply_fused_K_factors(double u, double q, double aa, double cc, int I, DMatrix& M) {
    for (int a = 1; a <= I; ++a) {
        for (int b = 1; b <= a - 1; ++b) {
            DMatrix f = unfused_R(u * u * std::pow(q, I + 1 - a - b), q);
            apply_legs_left(f, {b, a}, I, 2, M);
        }
        DMatrix k = unfused_K(u * detail::q_halfpow(q, I + 1 - 2 * a), aa, cc);
        apply_legs_left(k, {a}, I, 2, M);
    }
}

void apply_fused_Kbar_factors(double u, double q, double bb, double dd, int I, DMatrix& M) {
    for (int a = I; a >= 1; --a) {
        for (int b = I; b >= a + 1; --b) {
            DMatrix f = unfused_R_inv(u * u * std::pow(q, I + 1 - a - b), q);
            apply_legs_left(f, {b, a}, I, 2, M);
        }
        DMatrix k = unfused_Kbar(u * detail::q_halfpow(q, I + 1 - 2 * a), bb, dd);
        apply_legs_left(k, {a}, I, 2, M);
    }
}

KMatrix<double> fused_K_composed(double u, double q, double aa, double cc, int I) {
    ProjectionPair<double> pp = projection_pair(I, q);
    DMatrix M = pp.pi_hat;
    apply_fused_K_factors(u, q, aa, cc, I, M);
    DMatrix op = projected_boundary(M, pp, I);
    return KMatrix<double>::from_operator(op, I, BoundarySide::Left);
}

KMatrix<double> fused_Kbar_composed(double u, double q, double bb, double dd, int I) {
    ProjectionPair<double> pp = projection_pair(I, q);
    DMatrix M = pp.pi_hat;
    apply_fused_Kbar_factors(u, q, bb, dd, I, M);
    DMatrix op = projected_boundary(M, pp, I);
    return KMatrix<double>::from_operator(op, I, BoundarySide::Right);
}

KMatrix<double> fused_K_braided(double u, double q, double aa, double cc, int I) {
    ProjectionPair<double> pp = projection_pair(I, q);
    DMatrix M = pp.pi_hat;
    for (int a = 1; a <= I; ++a) {
        for (int b = 1; b <= a - 1; ++b) {
            DMatrix f = unfused_R_check(u * u * std::pow(q, I + 1 - a - b), q);
            apply_legs_left(f, {a - b, a - b + 1}, I, 2, M);
        }
        DMatrix k = unfused_K(u * detail::q_halfpow(q, I + 1 - 2 * a), aa, cc);
        apply_legs_left(k, {1}, I, 2, M);
    }
    DMatrix op = pp.pi * M;
    return KMatrix<double>::from_operator(op, I, BoundarySide::Left);
}

KMatrix<double> fused_Kbar_braided(double u, double q, double bb, double dd, int I) {
    ProjectionPair<double> pp = projection_pair(I, q);
    DMatrix M = pp.pi_hat;
    for (int a = I; a >= 1; --a) {
        for (int b = I; b >= a + 1; --b) {
            DMatrix f = unfused_R_check_inv(u * u * std::pow(q, I + 1 - a - b), q);
            apply_legs_left(f, {I + a - b, I + a - b + 1}, I, 2, M);
        }
        DMatrix k = unfused_Kbar(u * detail::q_halfpow(q, I + 1 - 2 * a), bb, dd);
        apply_legs_left(k, {I}, I, 2, M);
    }
    DMatrix op = pp.pi * M;
    return KMatrix<double>::from_operator(op, I, BoundarySide::Right);
}

void ModelParams::validate() const {
    std::ostringstream why;
    if (!(q > 0.0 && q < 1.0)) why << "q must lie in (0,1); ";
    if (!(kappa > 0.0 && kappa < std::pow(q, (I - 1) / 2.0)))
        why << "kappa must lie in (0, q^{(I-1)/2}); ";
    if (!(aa > 0.0 && bb > 0.0 && cc > 0.0 && dd > 0.0))
        why << "boundary parameters must be positive; ";
    double thr = std::pow(q, (1.0 - I) / 2.0) / kappa;
    if (!(aa - cc > thr)) why << "need a - c > q^{(1-I)/2}/kappa; ";
    if (!(bb - dd > thr)) why << "need b - d > q^{(1-I)/2}/kappa; ";
    if (I < 1) why << "I must be a positive integer; ";
    std::string s = why.str();
    if (!s.empty()) throw InvalidParams("ModelParams: " + s);
}

bool ModelParams::admissible() const {
    try {
        validate();
        return true;
    } catch (const InvalidParams&) {
        return false;
    }
}

FusedWeights model_weights(const ModelParams& params) {
    params.validate();
    RTensor<double> fused = fused_R_composed(params.kappa * params.kappa, params.q, params.I);
    FusedWeights w;
    w.R = RTensor<double>(params.I);
    for (int a = 0; a <= params.I; ++a)
        for (int b = 0; b <= params.I; ++b)
            for (int c = 0; c <= params.I; ++c)
                for (int d = 0; d <= params.I; ++d)
                    w.R.at(a, b, c, d) = fused.at(b, a, d, c);
    w.left_K = fused_K_composed(params.kappa, params.q, params.aa, params.cc, params.I);
    w.right_K = fused_Kbar_composed(1.0 / params.kappa, params.q, params.bb, params.dd, params.I);
    return w;
}

StochasticReport check_stochastic(const FusedWeights& w, double tol) {
    StochasticReport rep;
    const int n = w.R.I + 1;
    rep.min_entry = 1.0;
    auto fail = [&rep](const std::string& msg) {
        rep.pass = false;
        rep.failures.push_back(msg);
    };

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double row = 0.0;
            // Arrow conservation leaves min(a+b, 2I-a-b) + 1 admissible outcomes;
            // a row with a single outcome is deterministic and its entry must
            // be exactly 1, so the strict upper bound applies only otherwise.
            int n_allowed = std::min(a + b, 2 * w.R.I - a - b) + 1;
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double v = w.R.at(a, b, c, d);
                    row += v;
                    if (a + b != c + d) {
                        rep.max_conservation_abs = std::max(rep.max_conservation_abs, std::abs(v));
                    } else {
                        rep.min_allowed_entry = std::min(rep.min_allowed_entry, v);
                        rep.min_entry = std::min(rep.min_entry, v);
                        bool ok = n_allowed == 1 ? std::abs(v - 1.0) <= tol
                                                 : (v > 0.0 && v < 1.0);
                        if (!ok) {
                            std::ostringstream os;
                            os << "R entry (" << a << "," << b << ")->(" << c << "," << d
                               << ") = " << v << " violates positivity";
                            fail(os.str());
                        }
                    }
                }
            if (std::abs(row - 1.0) > tol) {
                std::ostringstream os;
                os << "R row (" << a << "," << b << ") sums to " << row;
                fail(os.str());
            }
            rep.max_row_sum_err = std::max(rep.max_row_sum_err, std::abs(row - 1.0));
        }
    if (rep.max_conservation_abs > 0.0) fail("nonzero entry violating arrow conservation");

    auto check_K = [&](const KMatrix<double>& k, const char* name) {
        for (int in = 0; in < n; ++in) {
            double row = 0.0;
            for (int out = 0; out < n; ++out) {
                double v = k.at(in, out);
                row += v;
                rep.min_allowed_entry = std::min(rep.min_allowed_entry, v);
                rep.min_entry = std::min(rep.min_entry, v);
                if (!(v > 0.0 && v < 1.0)) {
                    std::ostringstream os;
                    os << name << " entry " << in << "->" << out << " = " << v
                       << " outside (0,1)";
                    fail(os.str());
                }
            }
            if (std::abs(row - 1.0) > tol) {
                std::ostringstream os;
                os << name << " row " << in << " sums to " << row;
                fail(os.str());
            }
            rep.max_row_sum_err = std::max(rep.max_row_sum_err, std::abs(row - 1.0));
        }
    };
    check_K(w.left_K, "left K");
    check_K(w.right_K, "right K");
    return rep;
}

CommutationResiduals q_exchangeable_commutation_check(int I, double q, double u, double aa,
                                                      double cc, double bb, double dd) {
    // Measures how far the composed operators move the q-exchangeable
    // subspace out of itself: ||(Id - F) Op F|| vanishes iff Sym_q is
    // invariant. (The raw commutator with the oblique projector F does not
    // vanish for generic u; invariance of the subspace is the property the
    // fusion construction rests on.)
    ProjectionPair<double> pp = projection_pair(I, q);
    DMatrix F = pp.pi_hat * pp.pi;
    const size_t big = size_t{1} << I;

    DMatrix Rring = DMatrix::identity(big * big);
    apply_fused_R_factors(u, q, I, Rring);
    DMatrix FF = detail::kron_pair(F, F);
    DMatrix RF = Rring * FF;
    CommutationResiduals res;
    res.r_residual = (RF - FF * RF).max_abs();

    DMatrix Kring = DMatrix::identity(big);
    apply_fused_K_factors(u, q, aa, cc, I, Kring);
    Kring = permute_legs_rows(Kring, detail::reversal_perm(I), 2);
    DMatrix KF = Kring * F;
    res.k_residual = (KF - F * KF).max_abs();

    DMatrix Kbarring = DMatrix::identity(big);
    apply_fused_Kbar_factors(u, q, bb, dd, I, Kbarring);
    Kbarring = permute_legs_rows(Kbarring, detail::reversal_perm(I), 2);
    DMatrix KbF = Kbarring * F;
    res.kbar_residual = (KbF - F * KbF).max_abs();
    return res;
}

}  // namespace fusedstrip
