#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fusedstrip/errors.hpp"
#include "fusedstrip/mpa.hpp"
#include "fusedstrip/strip_model.hpp"

namespace fusedstrip {

// Parameter slots of an Askey-Wilson measure: four values that are either all
// real or include one complex-conjugate pair, carried as (modulus, cos angle)
// so products of infinite q-Pochhammers evaluate without complex cancellation.
struct AWParams {
    double q = 0.5;
    std::vector<double> reals;  // real slots
    struct ConjPair {
        double r = 0.0;       // modulus
        double cos_th = 1.0;  // cosine of the angle
    };
    std::vector<ConjPair> pairs;  // at most one in this project

    static AWParams all_real(double a, double b, double c, double d, double q);
    static AWParams with_pair(double a, double b, double r, double cos_th, double q);

    int slot_count() const { return static_cast<int>(reals.size() + 2 * pairs.size()); }
    // Product over all four slots (pairs contribute r^2).
    double product_all() const;
    void validate() const;
};

struct AWAtom {
    double y = 0.0;
    double mass = 0.0;
};

struct AWMeasure {
    AWParams params;
    std::vector<AWAtom> atoms;
    std::vector<std::string> warnings;
    double norm_const = 0.0;  // cached density prefactor; 0 means "compute"

    // Continuous-part density on (-1, 1); zero outside.
    double density(double y) const;
    // Density against d(theta) after y = cos(theta): f(cos th) sin th. The
    // 1/sqrt(1-y^2) singularity cancels, so this is smooth on [0, pi].
    double theta_density(double th) const;
};

double aw_density(double y, const AWParams& p);
std::vector<AWAtom> aw_atoms(const AWParams& p, std::vector<std::string>* warnings = nullptr);
AWMeasure aw_measure(const AWParams& p);

// Marginal pi_t and transition P_{s,t}(x, .) of the Askey-Wilson process.
AWMeasure marginal(double t, const ABCDParams& abcd);
AWMeasure transition(double s, double t, double x, const ABCDParams& abcd);

// Gauss-Legendre nodes/weights on [-1, 1] (cached per n).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Quadrature + atoms expectation with node doubling until the relative change
// drops below rel_tol.
double expect(const AWMeasure& m, const std::function<double(double)>& f, int nodes = 400,
              double rel_tol = 1e-9, int max_nodes = 25600);

double total_mass(const AWMeasure& m);

// ---------------------------------------------------------------------------
// Generating function and partition function of the strip model.
// ---------------------------------------------------------------------------

// Single-edge factors h_a. `up` selects the vertical-edge factor (t couples
// to kappa) versus the horizontal-edge factor (t couples to 1/kappa).
double h_factor(double t, double y, double kappa, double q, int I, bool up);
double log_h_factor(double t, double y, double kappa, double q, int I, bool up);

// Joint generating function E_mu[prod t_i^{tau_i}] on a down-right path via
// the Askey-Wilson process. Arbitrary positive times; at most three distinct
// values when they are not all equal. All needed measures must be atom-free
// in the multi-time case.
double gen_fun_aw(const std::vector<Arrow>& labels, const ABCDParams& abcd, double kappa, int I,
                  const std::vector<double>& times);

// Phase data for the asymptotic analysis. `lambda` is the limiting fraction
// of vertical (up) outgoing edges, i.e. of Right steps of the paths.
struct PhasePoint {
    ABCDParams abcd;
    double kappa = 0.5;
    int I = 1;
    double lambda = 0.5;
};

// log Z_N(t) with n_up factors h-up and N - n_up factors h-right, evaluated in
// the log domain so N ~ 10^3 is routine.
double log_partition(int N, int n_up, double t, const PhasePoint& pp);

// (d/dt log Z_N)|_{t=1} / N by central differences with one Richardson level.
double mean_density_finite(int N, int n_up, const PhasePoint& pp);

enum class Phase { MaximalCurrent, HighDensity, LowDensity, Boundary };

Phase classify_phase(const ABCDParams& abcd, double tol = 1e-9);
const char* phase_name(Phase p);

// Limit profile factor G evaluated at x (kappa or 1/kappa).
double G_limit(double x, const PhasePoint& pp);

// lambda G(kappa) + (1 - lambda) G(1/kappa).
double density_limit(const PhasePoint& pp);

// Per-configuration stationary probabilities recovered from the generating
// function by tensor-grid interpolation; supported for N <= 3.
std::vector<double> aw_stationary_distribution(const std::vector<Arrow>& labels,
                                               const ABCDParams& abcd, double kappa, int I);

}  // namespace fusedstrip
