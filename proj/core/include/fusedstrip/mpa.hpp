#pragma once

#include <vector>

#include "fusedstrip/linalg.hpp"
#include "fusedstrip/strip_model.hpp"
#include "fusedstrip/vertex_weights.hpp"

namespace fusedstrip {

// Boundary jump rates of the DEHP algebra DE - qED = D + E with
// <W|(alpha E - gamma D) = <W| and (beta D - delta E)|V> = |V>.
struct DEHPParams {
    double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
    double q = 0.5;
    void validate() const;
};

struct ABCDParams {
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
    double q = 0.5;
    // A, C >= 0 and B, D in (-1, 0]; the strict A, C > 0 relaxes to zero when
    // gamma or delta vanish.
    void validate() const;
    bool fan_region() const { return A * C < 1.0; }
};

// (alpha,..,delta) = (1-q) * (a, b, c, d) / (a-c-1) resp. (b-d-1).
DEHPParams dehp_from_boundary(double aa, double bb, double cc, double dd, double q);

// Inverse of dehp_from_boundary; requires alpha - gamma != 1 - q.
struct BoundaryParams {
    double aa, bb, cc, dd;
};
BoundaryParams boundary_from_dehp(const DEHPParams& p);

ABCDParams abcd_from_rates(const DEHPParams& p);
DEHPParams rates_from_abcd(const ABCDParams& p);

// Tridiagonal representation of the d, e algebra with coordinate boundary
// vectors. x and y are stored by diagonals: x[n+1][n] = x_sub[n],
// x[n][n] = x_diag[n], x[n][n+1] = x_sup[n]; d = sqrt(1-q) x, e = sqrt(1-q) y,
// D = (Id + d)/(1-q), E = (Id + e)/(1-q).
struct BandedRep {
    int dim = 0;
    double q = 0.5;
    std::vector<double> x_sub, x_diag, x_sup;
    std::vector<double> y_sub, y_diag, y_sup;

    DMatrix x_mat() const;
    DMatrix y_mat() const;
    DMatrix d_mat() const;
    DMatrix e_mat() const;
    DMatrix D_mat() const;
    DMatrix E_mat() const;
};

// Constructs the tridiagonal coefficients level by level from the algebra
// relations themselves (2x2 solves per level plus a balancing gauge), so the
// binding contract is the residual check below.
BandedRep usw_rep(const ABCDParams& abcd, int dim);

struct RepResiduals {
    double algebra = 0.0;  // ||de - q ed - (1-q) Id|| on the window
    double left = 0.0;     // ||<W|(a e - c d + Id)||
    double right = 0.0;    // ||(b d - d e + Id)|V>||
};

// Residuals of the three defining relations in boundary-parameter form.
RepResiduals rep_residuals(const BandedRep& rep, double aa, double bb, double cc, double dd);

// Residuals of the DEHP form <W|(alpha E - gamma D) = <W| etc.
RepResiduals dehp_residuals(const BandedRep& rep, const DEHPParams& p);

// Fused ansatz element M^I_zeta(u): sum over binary words of weight zeta of
// ordered products of M_0(v) = v + e, M_1(v) = 1/v + d on the q-geometric
// spectral ladder v = u q^{-(I+1)/2 + a}, a = 1..I.
DMatrix fused_M(double u, int zeta, int I, const BandedRep& rep);

// Matrix bandwidth (largest |i-j| with a nonzero entry beyond tolerance).
int matrix_bandwidth(const DMatrix& m, double tol = 1e-14);

// <W| M^{p_1}_{tau_1} ... M^{p_N}_{tau_N} |V> with M^up_j = M^I_j(1/kappa),
// M^right_j = M^I_j(kappa). Requires rep.dim >= N I + 2 for window exactness.
double mps_value(const std::vector<Arrow>& labels, const std::vector<int>& tau, double kappa,
                 int I, const BandedRep& rep);

// Stationary distribution on [[0,I]]^N via the matrix product ansatz, in the
// big-endian state indexing of strip_model.
std::vector<double> stationary_mpa(const DownRightPath& path, const ModelParams& params,
                                   const BandedRep& rep);

struct ConsistencyResiduals {
    double bulk = 0.0;
    double left = 0.0;
    double right = 0.0;
};

// Window residuals of the three consistency relations against the strip
// weights of `params`.
ConsistencyResiduals consistency_residual(const ModelParams& params, const BandedRep& rep);

// Window residuals of the fused ZF relation at (x, y) and of both GZ
// relations at u, using the fused R / K / Kbar matrices at the matching
// spectral points.
struct ZfGzResiduals {
    double zf = 0.0;
    double gz_left = 0.0;
    double gz_right = 0.0;
};

ZfGzResiduals zf_gz_residual(const BandedRep& rep, double x, double y, double u, int I,
                             const ModelParams& params);

}  // namespace fusedstrip
