#include "fusedstrip/mpa.hpp"

#include <cmath>

namespace fusedstrip {

void DEHPParams::validate() const {
    if (!(alpha > 0.0 && beta > 0.0)) throw InvalidParams("DEHPParams: alpha, beta must be > 0");
    if (!(gamma >= 0.0 && delta >= 0.0))
        throw InvalidParams("DEHPParams: gamma, delta must be >= 0");
    if (!(q >= 0.0 && q < 1.0)) throw InvalidParams("DEHPParams: q must lie in [0,1)");
}

void ABCDParams::validate() const {
    if (!(A >= 0.0 && C >= 0.0)) throw OutOfRange("ABCDParams: A, C must be >= 0");
    if (!(B > -1.0 && B <= 0.0 && D > -1.0 && D <= 0.0))
        throw OutOfRange("ABCDParams: B, D must lie in (-1, 0]");
    if (!(q > -1.0 && q < 1.0)) throw OutOfRange("ABCDParams: q must lie in (-1,1)");
}

DEHPParams dehp_from_boundary(double aa, double bb, double cc, double dd, double q) {
    double sa = aa - cc - 1.0;
    double sb = bb - dd - 1.0;
    if (sa == 0.0 || sb == 0.0)
        throw DegenerateBoundary("dehp_from_boundary: a - c = 1 or b - d = 1");
    DEHPParams p;
    p.q = q;
    p.alpha = (1.0 - q) * aa / sa;
    p.beta = (1.0 - q) * bb / sb;
    p.gamma = (1.0 - q) * cc / sa;
    p.delta = (1.0 - q) * dd / sb;
    return p;
}

BoundaryParams boundary_from_dehp(const DEHPParams& p) {
    // alpha - gamma = (1-q) s/(s-1) with s = a - c, so s/(s-1) determines s.
    double ra = (p.alpha - p.gamma) / (1.0 - p.q);
    double rb = (p.beta - p.delta) / (1.0 - p.q);
    if (ra == 1.0 || rb == 1.0)
        throw DegenerateBoundary("boundary_from_dehp: degenerate difference");
    double sa = ra / (ra - 1.0);
    double sb = rb / (rb - 1.0);
    BoundaryParams b;
    b.aa = p.alpha * (sa - 1.0) / (1.0 - p.q);
    b.cc = p.gamma * (sa - 1.0) / (1.0 - p.q);
    b.bb = p.beta * (sb - 1.0) / (1.0 - p.q);
    b.dd = p.delta * (sb - 1.0) / (1.0 - p.q);
    return b;
}

namespace {

double kappa_pm(double u, double v, double q, int sign) {
    double t = 1.0 - q - u + v;
    double disc = t * t + 4.0 * u * v;
    double root = std::sqrt(std::max(disc, 0.0));
    return (t + (sign > 0 ? root : -root)) / (2.0 * u);
}

}  // namespace

ABCDParams abcd_from_rates(const DEHPParams& p) {
    p.validate();
    ABCDParams r;
    r.q = p.q;
    r.A = kappa_pm(p.beta, p.delta, p.q, +1);
    r.B = kappa_pm(p.beta, p.delta, p.q, -1);
    r.C = kappa_pm(p.alpha, p.gamma, p.q, +1);
    r.D = kappa_pm(p.alpha, p.gamma, p.q, -1);
    return r;
}

DEHPParams rates_from_abcd(const ABCDParams& p) {
    p.validate();
    DEHPParams r;
    r.q = p.q;
    // (1+A)(1+B) = (1-q)/beta and AB = -delta/beta, similarly for (C, D).
    r.beta = (1.0 - p.q) / ((1.0 + p.A) * (1.0 + p.B));
    r.delta = -p.A * p.B * r.beta;
    r.alpha = (1.0 - p.q) / ((1.0 + p.C) * (1.0 + p.D));
    r.gamma = -p.C * p.D * r.alpha;
    return r;
}

DMatrix BandedRep::x_mat() const {
    DMatrix m(static_cast<size_t>(dim), static_cast<size_t>(dim));
    for (int n = 0; n < dim; ++n) {
        m(static_cast<size_t>(n), static_cast<size_t>(n)) = x_diag[static_cast<size_t>(n)];
        if (n + 1 < dim) {
            m(static_cast<size_t>(n + 1), static_cast<size_t>(n)) = x_sub[static_cast<size_t>(n)];
            m(static_cast<size_t>(n), static_cast<size_t>(n + 1)) = x_sup[static_cast<size_t>(n)];
        }
    }
    return m;
}

DMatrix BandedRep::y_mat() const {
    DMatrix m(static_cast<size_t>(dim), static_cast<size_t>(dim));
    for (int n = 0; n < dim; ++n) {
        m(static_cast<size_t>(n), static_cast<size_t>(n)) = y_diag[static_cast<size_t>(n)];
        if (n + 1 < dim) {
            m(static_cast<size_t>(n + 1), static_cast<size_t>(n)) = y_sub[static_cast<size_t>(n)];
            m(static_cast<size_t>(n), static_cast<size_t>(n + 1)) = y_sup[static_cast<size_t>(n)];
        }
    }
    return m;
}

namespace {

DMatrix scaled(const DMatrix& m, double f) {
    DMatrix r(m.rows(), m.cols());
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) r(i, j) = f * m(i, j);
    return r;
}

DMatrix shifted(const DMatrix& m, double c) {
    DMatrix r = m;
    for (size_t i = 0; i < m.rows(); ++i) r(i, i) += c;
    return r;
}

}  // namespace

DMatrix BandedRep::d_mat() const { return scaled(x_mat(), std::sqrt(1.0 - q)); }
DMatrix BandedRep::e_mat() const { return scaled(y_mat(), std::sqrt(1.0 - q)); }
DMatrix BandedRep::D_mat() const { return scaled(shifted(d_mat(), 1.0), 1.0 / (1.0 - q)); }
DMatrix BandedRep::E_mat() const { return scaled(shifted(e_mat(), 1.0), 1.0 / (1.0 - q)); }

BandedRep usw_rep(const ABCDParams& abcd, int dim) {
    if (dim < 3) throw InvalidParams("usw_rep: dim must be >= 3");
    DEHPParams rates = rates_from_abcd(abcd);
    const double q = rates.q;
    if (!(q > 0.0 && q < 1.0)) throw InvalidParams("usw_rep: q must lie in (0,1)");
    const double alpha = rates.alpha, beta = rates.beta, gamma = rates.gamma,
                 delta = rates.delta;
    const double sq = std::sqrt(1.0 - q);

    BandedRep rep;
    rep.dim = dim;
    rep.q = q;
    rep.x_sub.assign(static_cast<size_t>(dim), 0.0);
    rep.x_diag.assign(static_cast<size_t>(dim), 0.0);
    rep.x_sup.assign(static_cast<size_t>(dim), 0.0);
    rep.y_sub.assign(static_cast<size_t>(dim), 0.0);
    rep.y_diag.assign(static_cast<size_t>(dim), 0.0);
    rep.y_sup.assign(static_cast<size_t>(dim), 0.0);

    // Level 0 diagonals from the two boundary relations.
    double rW = ((1.0 - q) - (alpha - gamma)) / sq;
    double rV = ((1.0 - q) - (beta - delta)) / sq;
    double det0 = gamma * delta - alpha * beta;
    if (std::abs(det0) < 1e-300) throw RepConstructionFailure("usw_rep: degenerate level 0");
    // [-gamma, alpha; beta, -delta] [gamma0, delta0]^t = [rW, rV]^t
    double g0 = (-delta * rW - alpha * rV) / det0;
    double d0 = (-beta * rW - gamma * rV) / det0;
    rep.x_diag[0] = g0;
    rep.y_diag[0] = d0;

    const double sup_ratio = gamma / alpha;  // phi_{n+1} / eps_{n+1} at level 0
    auto balance = [](double product, double down_ratio, double up_ratio) {
        double mag = std::sqrt(std::abs(product) * std::max(1.0, std::abs(up_ratio)) /
                               std::max(1.0, std::abs(down_ratio)));
        return mag > 0.0 ? mag : 1.0;
    };

    bool alpha_chain = delta > 0.0;
    if (alpha_chain) {
        double rho0 = beta / delta;  // beta_n / alpha_n at n = 0
        double coeff = rho0 - q * sup_ratio;
        if (std::abs(coeff) < 1e-300) throw RepConstructionFailure("usw_rep: level 0 pivot");
        double t0 = (1.0 - (1.0 - q) * g0 * d0) / coeff;  // alpha_0 * eps_1
        double a0 = balance(t0, rho0, sup_ratio);
        rep.x_sub[0] = a0;
        rep.y_sub[0] = rho0 * a0;
        rep.x_sup[0] = t0 / a0;
        rep.y_sup[0] = sup_ratio * (t0 / a0);
    } else {
        // delta = 0 forces x_sub = 0 (|V> is an eigenvector of D); gauge on
        // the y subdiagonal instead.
        double t0 = 1.0 - (1.0 - q) * g0 * d0;  // beta_0 * eps_1
        double b0 = balance(t0, 1.0, sup_ratio);
        rep.x_sub[0] = 0.0;
        rep.y_sub[0] = b0;
        rep.x_sup[0] = t0 / b0;
        rep.y_sup[0] = sup_ratio * (t0 / b0);
    }

    for (int n = 1; n + 1 <= dim - 1; ++n) {
        const size_t m = static_cast<size_t>(n);
        double ap = rep.x_sub[m - 1], bp = rep.y_sub[m - 1];
        double gp = rep.x_diag[m - 1], dp = rep.y_diag[m - 1];
        double ep = rep.x_sup[m - 1], fp = rep.y_sup[m - 1];  // eps_n, phi_n

        // Solve the two off-diagonal relations of xy - qyx = Id for the new
        // diagonals.
        double a11 = bp, a12 = -q * ap, r1 = q * bp * gp - ap * dp;
        double a21 = -q * fp, a22 = ep, r2 = q * dp * ep - gp * fp;
        double det = a11 * a22 - a12 * a21;
        if (std::abs(det) < 1e-250) throw RepConstructionFailure("usw_rep: singular level solve");
        double gn = (r1 * a22 - a12 * r2) / det;
        double dn = (a11 * r2 - r1 * a21) / det;
        rep.x_diag[m] = gn;
        rep.y_diag[m] = dn;

        double sigma = q * fp / ep;  // phi_{n+1} / eps_{n+1}
        double rhs = 1.0 - (1.0 - q) * gn * dn - ap * fp + q * bp * ep;
        if (alpha_chain) {
            double rho = bp / (q * ap);  // beta_n / alpha_n
            double coeff = rho - q * sigma;
            if (std::abs(coeff) < 1e-250) throw RepConstructionFailure("usw_rep: level pivot");
            double t = rhs / coeff;  // alpha_n * eps_{n+1}
            double an = balance(t, rho, sigma);
            rep.x_sub[m] = an;
            rep.y_sub[m] = rho * an;
            rep.x_sup[m] = t / an;
            rep.y_sup[m] = sigma * (t / an);
        } else {
            double t = rhs;  // beta_n * eps_{n+1} (x_sub stays zero)
            double bn = balance(t, 1.0, sigma);
            rep.x_sub[m] = 0.0;
            rep.y_sub[m] = bn;
            rep.x_sup[m] = t / bn;
            rep.y_sup[m] = sigma * (t / bn);
        }
    }
    return rep;
}

namespace {

double window_max_abs(const DMatrix& m, size_t row_end, size_t col_end) {
    double r = 0.0;
    for (size_t i = 0; i < std::min(m.rows(), row_end); ++i)
        for (size_t j = 0; j < std::min(m.cols(), col_end); ++j)
            r = std::max(r, std::abs(m(i, j)));
    return r;
}

}  // namespace

RepResiduals rep_residuals(const BandedRep& rep, double aa, double bb, double cc, double dd) {
    const size_t dim = static_cast<size_t>(rep.dim);
    DMatrix d = rep.d_mat(), e = rep.e_mat();
    DMatrix alg = d * e - scaled(e * d, rep.q);
    for (size_t i = 0; i < dim; ++i) alg(i, i) -= (1.0 - rep.q);
    RepResiduals res;
    res.algebra = window_max_abs(alg, dim - 2, dim - 2);

    // <W| (a e - c d + Id), coordinates 0..dim-3.
    for (size_t j = 0; j + 2 < dim; ++j) {
        double v = aa * e(0, j) - cc * d(0, j) + (j == 0 ? 1.0 : 0.0);
        res.left = std::max(res.left, std::abs(v));
    }
    for (size_t i = 0; i + 2 < dim; ++i) {
        double v = bb * d(i, 0) - dd * e(i, 0) + (i == 0 ? 1.0 : 0.0);
        res.right = std::max(res.right, std::abs(v));
    }
    return res;
}

RepResiduals dehp_residuals(const BandedRep& rep, const DEHPParams& p) {
    const size_t dim = static_cast<size_t>(rep.dim);
    DMatrix Dm = rep.D_mat(), Em = rep.E_mat();
    DMatrix alg = Dm * Em - scaled(Em * Dm, p.q) - Dm - Em;
    RepResiduals res;
    res.algebra = window_max_abs(alg, dim - 2, dim - 2);
    for (size_t j = 0; j + 2 < dim; ++j) {
        double v = p.alpha * Em(0, j) - p.gamma * Dm(0, j) - (j == 0 ? 1.0 : 0.0);
        res.left = std::max(res.left, std::abs(v));
    }
    for (size_t i = 0; i + 2 < dim; ++i) {
        double v = p.beta * Dm(i, 0) - p.delta * Em(i, 0) - (i == 0 ? 1.0 : 0.0);
        res.right = std::max(res.right, std::abs(v));
    }
    return res;
}

DMatrix fused_M(double u, int zeta, int I, const BandedRep& rep) {
    if (u == 0.0) throw InvalidParams("fused_M: u must be nonzero");
    if (zeta < 0 || zeta > I) throw InvalidParams("fused_M: zeta out of range");
    const size_t dim = static_cast<size_t>(rep.dim);
    DMatrix d = rep.d_mat(), e = rep.e_mat();

    std::vector<DMatrix> m0(static_cast<size_t>(I)), m1(static_cast<size_t>(I));
    for (int a = 1; a <= I; ++a) {
        double v = u * std::pow(rep.q, -(I + 1) / 2.0 + a);
        m0[static_cast<size_t>(a - 1)] = shifted(e, v);
        m1[static_cast<size_t>(a - 1)] = shifted(d, 1.0 / v);
    }

    DMatrix sum(dim, dim);
    for (uint32_t word = 0; word < (1u << I); ++word) {
        int weight = 0;
        for (int a = 0; a < I; ++a) weight += (word >> (I - 1 - a)) & 1u;
        if (weight != zeta) continue;
        DMatrix prod = ((word >> (I - 1)) & 1u) ? m1[0] : m0[0];
        for (int a = 1; a < I; ++a) {
            const DMatrix& f =
                ((word >> (I - 1 - a)) & 1u) ? m1[static_cast<size_t>(a)] : m0[static_cast<size_t>(a)];
            prod = prod * f;
        }
        sum = sum + prod;
    }
    return sum;
}

int matrix_bandwidth(const DMatrix& m, double tol) {
    int bw = 0;
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > tol)
                bw = std::max(bw, static_cast<int>(i > j ? i - j : j - i));
    return bw;
}

double mps_value(const std::vector<Arrow>& labels, const std::vector<int>& tau, double kappa,
                 int I, const BandedRep& rep) {
    const int N = static_cast<int>(labels.size());
    if (rep.dim < N * I + 2) throw WindowTooSmall("mps_value: rep.dim below N*I + 2");
    if (tau.size() != labels.size()) throw InvalidParams("mps_value: label/occupation mismatch");
    // Cache the 2(I+1) fused ansatz matrices.
    std::vector<DMatrix> up(static_cast<size_t>(I + 1)), right(static_cast<size_t>(I + 1));
    for (int j = 0; j <= I; ++j) {
        up[static_cast<size_t>(j)] = fused_M(1.0 / kappa, j, I, rep);
        right[static_cast<size_t>(j)] = fused_M(kappa, j, I, rep);
    }
    std::vector<double> w(static_cast<size_t>(rep.dim), 0.0);
    w[0] = 1.0;
    for (int i = 0; i < N; ++i) {
        const DMatrix& m = labels[static_cast<size_t>(i)] == Arrow::Up
                               ? up[static_cast<size_t>(tau[static_cast<size_t>(i)])]
                               : right[static_cast<size_t>(tau[static_cast<size_t>(i)])];
        std::vector<double> next(w.size(), 0.0);
        for (size_t r = 0; r < w.size(); ++r) {
            if (w[r] == 0.0) continue;
            for (size_t c = 0; c < w.size(); ++c) next[c] += w[r] * m(r, c);
        }
        w.swap(next);
    }
    return w[0];
}

std::vector<double> stationary_mpa(const DownRightPath& path, const ModelParams& params,
                                   const BandedRep& rep) {
    const int N = path.width();
    const int I = params.I;
    auto labels = outgoing_labels(path);

    std::vector<DMatrix> mats[2];
    mats[0].resize(static_cast<size_t>(I + 1));
    mats[1].resize(static_cast<size_t>(I + 1));
    for (int j = 0; j <= I; ++j) {
        mats[0][static_cast<size_t>(j)] = fused_M(1.0 / params.kappa, j, I, rep);
        mats[1][static_cast<size_t>(j)] = fused_M(params.kappa, j, I, rep);
    }
    if (rep.dim < N * I + 2) throw WindowTooSmall("stationary_mpa: rep.dim below N*I + 2");

    size_t dim = 1;
    for (int i = 0; i < N; ++i) dim *= static_cast<size_t>(I + 1);
    std::vector<double> mu(dim, 0.0);

    // Sweep configurations in index order, reusing shared left prefixes
    // <W| M_{tau_1} ... M_{tau_k}.
    std::vector<std::vector<double>> prefix(static_cast<size_t>(N + 1));
    prefix[0].assign(static_cast<size_t>(rep.dim), 0.0);
    prefix[0][0] = 1.0;
    std::vector<int> prev(static_cast<size_t>(N), -1);
    for (size_t idx = 0; idx < dim; ++idx) {
        Config c = config_from_index(idx, N, I);
        int k = 0;
        while (k < N && c.tau[static_cast<size_t>(k)] == prev[static_cast<size_t>(k)]) ++k;
        for (int i = k; i < N; ++i) {
            int lab = labels[static_cast<size_t>(i)] == Arrow::Up ? 0 : 1;
            const DMatrix& m = mats[lab][static_cast<size_t>(c.tau[static_cast<size_t>(i)])];
            const auto& w = prefix[static_cast<size_t>(i)];
            auto& nxt = prefix[static_cast<size_t>(i + 1)];
            nxt.assign(w.size(), 0.0);
            for (size_t r = 0; r < w.size(); ++r) {
                if (w[r] == 0.0) continue;
                for (size_t cc = 0; cc < w.size(); ++cc) nxt[cc] += w[r] * m(r, cc);
            }
        }
        mu[idx] = prefix[static_cast<size_t>(N)][0];
        prev = c.tau;
    }

    double norm = 0.0;
    for (double v : mu) norm += v;
    if (std::abs(norm) < 1e-280) throw ZeroNormalizer("stationary_mpa: vanishing normalizer");
    for (double& v : mu) v /= norm;
    return mu;
}

ConsistencyResiduals consistency_residual(const ModelParams& params, const BandedRep& rep) {
    const int I = params.I;
    FusedWeights w = model_weights(params);
    const size_t dim = static_cast<size_t>(rep.dim);
    const size_t win = dim > static_cast<size_t>(2 * I + 2) ? dim - static_cast<size_t>(2 * I + 2)
                                                            : size_t{1};

    std::vector<DMatrix> up(static_cast<size_t>(I + 1)), right(static_cast<size_t>(I + 1));
    for (int j = 0; j <= I; ++j) {
        up[static_cast<size_t>(j)] = fused_M(1.0 / params.kappa, j, I, rep);
        right[static_cast<size_t>(j)] = fused_M(params.kappa, j, I, rep);
    }
    std::vector<DMatrix> prod_ra(static_cast<size_t>((I + 1) * (I + 1)));
    for (int b = 0; b <= I; ++b)
        for (int a = 0; a <= I; ++a)
            prod_ra[static_cast<size_t>(b * (I + 1) + a)] =
                right[static_cast<size_t>(b)] * up[static_cast<size_t>(a)];

    ConsistencyResiduals res;
    for (int c = 0; c <= I; ++c)
        for (int d = 0; d <= I; ++d) {
            DMatrix lhs = up[static_cast<size_t>(c)] * right[static_cast<size_t>(d)];
            for (int a = 0; a <= I; ++a)
                for (int b = 0; b <= I; ++b) {
                    double r = w.R.at(a, b, c, d);
                    if (r == 0.0) continue;
                    const DMatrix& p = prod_ra[static_cast<size_t>(b * (I + 1) + a)];
                    for (size_t i = 0; i < lhs.rows(); ++i)
                        for (size_t j = 0; j < lhs.cols(); ++j) lhs(i, j) -= r * p(i, j);
                }
            res.bulk = std::max(res.bulk, window_max_abs(lhs, win, win));
        }

    for (int d = 0; d <= I; ++d) {
        std::vector<double> diff(dim, 0.0);
        for (size_t j = 0; j < dim; ++j) diff[j] = right[static_cast<size_t>(d)](0, j);
        for (int a = 0; a <= I; ++a) {
            double k = w.left_K.at(a, d);
            for (size_t j = 0; j < dim; ++j) diff[j] -= k * up[static_cast<size_t>(a)](0, j);
        }
        for (size_t j = 0; j < win; ++j) res.left = std::max(res.left, std::abs(diff[j]));
    }
    for (int c = 0; c <= I; ++c) {
        std::vector<double> diff(dim, 0.0);
        for (size_t i = 0; i < dim; ++i) diff[i] = up[static_cast<size_t>(c)](i, 0);
        for (int b = 0; b <= I; ++b) {
            double k = w.right_K.at(b, c);
            for (size_t i = 0; i < dim; ++i) diff[i] -= k * right[static_cast<size_t>(b)](i, 0);
        }
        for (size_t i = 0; i < win; ++i) res.right = std::max(res.right, std::abs(diff[i]));
    }
    return res;
}

ZfGzResiduals zf_gz_residual(const BandedRep& rep, double x, double y, double u, int I,
                             const ModelParams& params) {
    const size_t dim = static_cast<size_t>(rep.dim);
    const size_t win = dim > static_cast<size_t>(2 * I + 2) ? dim - static_cast<size_t>(2 * I + 2)
                                                            : size_t{1};
    RTensor<double> Rf = fused_R_composed(x / y, params.q, I);
    KMatrix<double> Kf = fused_K_composed(u, params.q, params.aa, params.cc, I);
    KMatrix<double> Kbf = fused_Kbar_composed(u, params.q, params.bb, params.dd, I);

    std::vector<DMatrix> Mx(static_cast<size_t>(I + 1)), My(static_cast<size_t>(I + 1)),
        Mu(static_cast<size_t>(I + 1)), Mui(static_cast<size_t>(I + 1));
    for (int j = 0; j <= I; ++j) {
        Mx[static_cast<size_t>(j)] = fused_M(x, j, I, rep);
        My[static_cast<size_t>(j)] = fused_M(y, j, I, rep);
        Mu[static_cast<size_t>(j)] = fused_M(u, j, I, rep);
        Mui[static_cast<size_t>(j)] = fused_M(1.0 / u, j, I, rep);
    }
    std::vector<DMatrix> prod_xy(static_cast<size_t>((I + 1) * (I + 1)));
    for (int b = 0; b <= I; ++b)
        for (int a = 0; a <= I; ++a)
            prod_xy[static_cast<size_t>(b * (I + 1) + a)] =
                Mx[static_cast<size_t>(b)] * My[static_cast<size_t>(a)];

    ZfGzResiduals res;
    // M_c(y) M_d(x) = sum_{a,b} R^{d,c}_{b,a}(x/y) M_b(x) M_a(y).
    for (int c = 0; c <= I; ++c)
        for (int d = 0; d <= I; ++d) {
            DMatrix lhs = My[static_cast<size_t>(c)] * Mx[static_cast<size_t>(d)];
            for (int a = 0; a <= I; ++a)
                for (int b = 0; b <= I; ++b) {
                    double r = Rf.at(b, a, d, c);
                    if (r == 0.0) continue;
                    const DMatrix& p = prod_xy[static_cast<size_t>(b * (I + 1) + a)];
                    for (size_t i = 0; i < lhs.rows(); ++i)
                        for (size_t j = 0; j < lhs.cols(); ++j) lhs(i, j) -= r * p(i, j);
                }
            res.zf = std::max(res.zf, window_max_abs(lhs, win, win));
        }
    // <W| M_d(u) = sum_a K^d_a(u) <W| M_a(1/u).
    for (int d = 0; d <= I; ++d) {
        std::vector<double> diff(dim, 0.0);
        for (size_t j = 0; j < dim; ++j) diff[j] = Mu[static_cast<size_t>(d)](0, j);
        for (int a = 0; a <= I; ++a) {
            double k = Kf.at(a, d);
            for (size_t j = 0; j < dim; ++j) diff[j] -= k * Mui[static_cast<size_t>(a)](0, j);
        }
        for (size_t j = 0; j < win; ++j) res.gz_left = std::max(res.gz_left, std::abs(diff[j]));
    }
    // M_c(u) |V> = sum_b Kbar^c_b(u) M_b(1/u) |V>.
    for (int c = 0; c <= I; ++c) {
        std::vector<double> diff(dim, 0.0);
        for (size_t i = 0; i < dim; ++i) diff[i] = Mu[static_cast<size_t>(c)](i, 0);
        for (int b = 0; b <= I; ++b) {
            double k = Kbf.at(b, c);
            for (size_t i = 0; i < dim; ++i) diff[i] -= k * Mui[static_cast<size_t>(b)](i, 0);
        }
        for (size_t i = 0; i < win; ++i) res.gz_right = std::max(res.gz_right, std::abs(diff[i]));
    }
    return res;
}

}  // namespace fusedstrip
