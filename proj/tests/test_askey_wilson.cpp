#include "doctest.h"

#include <random>

#include "fusedstrip/askey_wilson.hpp"

using namespace fusedstrip;

namespace {

ModelParams params_i1() {
    ModelParams p;
    p.I = 1;
    p.q = 0.5;
    p.kappa = 0.5;
    p.aa = p.bb = 3.0;
    p.cc = p.dd = 0.1;
    return p;
}

ABCDParams abcd_of(const ModelParams& p) {
    return abcd_from_rates(dehp_from_boundary(p.aa, p.bb, p.cc, p.dd, p.q));
}

double exact_gen_fun(const std::vector<double>& mu, const std::vector<double>& times, int N,
                     int I) {
    double acc = 0.0;
    for (size_t idx = 0; idx < mu.size(); ++idx) {
        Config c = config_from_index(idx, N, I);
        double term = mu[idx];
        for (int i = 0; i < N; ++i)
            term *= std::pow(times[static_cast<size_t>(i)], c.tau[static_cast<size_t>(i)]);
        acc += term;
    }
    return acc;
}

}  // namespace

TEST_CASE("density vanishes outside [-1,1] and is slot-symmetric") {
    AWParams p = AWParams::all_real(0.5, -0.2, 0.4, -0.1, 0.5);
    CHECK(aw_density(1.5, p) == 0.0);
    CHECK(aw_density(-2.0, p) == 0.0);

    AWParams perm = AWParams::all_real(-0.2, 0.5, -0.1, 0.4, 0.5);
    for (double y : {-0.9, -0.3, 0.0, 0.4, 0.8})
        CHECK(aw_density(y, p) == doctest::Approx(aw_density(y, perm)).epsilon(1e-12));
}

TEST_CASE("atom-free measure integrates to one") {
    auto m = aw_measure(AWParams::all_real(0.5, -0.2, 0.4, -0.1, 0.5));
    CHECK(m.atoms.empty());
    CHECK(total_mass(m) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("atom positions and masses") {
    // a = 1.5 generates a single atom at (a + 1/a)/2 = 13/12.
    auto m = aw_measure(AWParams::all_real(1.5, -0.2, 0.4, -0.1, 0.5));
    REQUIRE(m.atoms.size() == 1);
    CHECK(m.atoms[0].y == doctest::Approx(13.0 / 12.0).epsilon(1e-14));
    CHECK(m.atoms[0].mass > 0.0);
    CHECK(total_mass(m) == doctest::Approx(1.0).epsilon(1e-8));

    // a = 3, q = 0.5: |3| > 1 and |1.5| > 1 give atoms at 5/3 and 13/12.
    auto m2 = aw_measure(AWParams::all_real(3.0, -0.2, 0.1, -0.1, 0.5));
    REQUIRE(m2.atoms.size() == 2);
    CHECK(m2.atoms[0].y == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    CHECK(m2.atoms[1].y == doctest::Approx(13.0 / 12.0).epsilon(1e-14));
    CHECK(total_mass(m2) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("expectation engine") {
    auto m = aw_measure(AWParams::all_real(0.5, -0.2, 0.4, -0.1, 0.5));
    CHECK(expect(m, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-8));

    // Linearity.
    auto f = [](double y) { return y * y; };
    auto g = [](double y) { return std::cos(y); };
    double ef = expect(m, f), eg = expect(m, g);
    double combined = expect(m, [&](double y) { return 2.5 * f(y) + g(y); });
    CHECK(combined == doctest::Approx(2.5 * ef + eg).epsilon(1e-12));

    // Dense Riemann brute force oracle for the first moment.
    double brute = 0.0;
    const int nn = 1000000;
    for (int i = 0; i < nn; ++i) {
        double y = -1.0 + (i + 0.5) * 2.0 / nn;
        brute += m.density(y) * y * 2.0 / nn;
    }
    double quad = expect(m, [](double y) { return y; });
    CHECK(quad == doctest::Approx(brute).epsilon(1e-6));
}

TEST_CASE("marginals and transitions") {
    auto p = params_i1();
    auto abcd = abcd_of(p);

    for (double t : {0.8, 1.0, 1.25}) {
        auto m = marginal(t, abcd);
        CHECK(total_mass(m) == doctest::Approx(1.0).epsilon(1e-8));
    }

    // Transition kernels with x inside (-1,1) have conjugate-pair slots with
    // modulus sqrt(s/t) < 1, hence no atoms; they are probability measures.
    auto tr = transition(0.9, 1.1, 0.3, abcd);
    CHECK(tr.atoms.empty());
    CHECK(total_mass(tr) == doctest::Approx(1.0).epsilon(1e-8));

    auto m1 = marginal(1.0, abcd);
    AWParams direct = AWParams::all_real(abcd.A, abcd.B, abcd.C, abcd.D, abcd.q);
    for (double y : {-0.5, 0.1, 0.7})
        CHECK(m1.density(y) == doctest::Approx(aw_density(y, direct)).epsilon(1e-12));
}

TEST_CASE("mass with HD/LD-style atoms across times") {
    ABCDParams hd;
    hd.q = 0.5;
    hd.A = 1.5;
    hd.C = 0.5;
    hd.B = hd.D = -0.05;
    for (double t : {0.8, 1.0, 1.25})
        CHECK(total_mass(marginal(t, hd)) == doctest::Approx(1.0).epsilon(1e-8));

    ABCDParams ld;
    ld.q = 0.5;
    ld.A = 0.5;
    ld.C = 1.5;
    ld.B = ld.D = -0.05;
    for (double t : {0.8, 1.0, 1.25})
        CHECK(total_mass(marginal(t, ld)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("generating function: unit times give one") {
    auto p = params_i1();
    auto abcd = abcd_of(p);
    std::vector<Arrow> labels = {Arrow::Up, Arrow::Horizontal, Arrow::Up, Arrow::Up};
    std::vector<double> ones(4, 1.0);
    CHECK(gen_fun_aw(labels, abcd, p.kappa, p.I, ones) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("generating function vs exact stationary, single common time") {
    for (int I : {1, 2}) {
        ModelParams p;
        p.I = I;
        p.q = 0.5;
        p.kappa = 0.5;
        p.aa = p.bb = 3.0;
        p.cc = p.dd = 0.05;
        auto abcd = abcd_of(p);
        REQUIRE(classify_phase(abcd) == Phase::MaximalCurrent);

        auto path = DownRightPath::from_bits("DRRD");
        auto labels = outgoing_labels(path);
        auto w = model_weights(p);
        auto mu = stationary_exact(step_transition_matrix(path, w));

        for (double t : {0.5, 2.0}) {
            std::vector<double> times(4, t);
            double aw = gen_fun_aw(labels, abcd, p.kappa, p.I, times);
            double exact = exact_gen_fun(mu, times, 4, I);
            CHECK(aw == doctest::Approx(exact).epsilon(1e-6));
        }
    }
}

TEST_CASE("generating function vs exact stationary, multi-time") {
    auto p = params_i1();
    auto abcd = abcd_of(p);
    auto path = DownRightPath::from_bits("DRD");
    auto labels = outgoing_labels(path);
    auto w = model_weights(p);
    auto mu = stationary_exact(step_transition_matrix(path, w));

    std::vector<double> times = {0.9, 1.0, 1.1};
    double aw = gen_fun_aw(labels, abcd, p.kappa, p.I, times);
    double exact = exact_gen_fun(mu, times, 3, 1);
    CHECK(aw == doctest::Approx(exact).epsilon(1e-4));

    std::vector<double> too_many = {0.7, 0.9, 1.1, 1.3};
    std::vector<Arrow> labels4 = {Arrow::Up, Arrow::Up, Arrow::Horizontal, Arrow::Up};
    CHECK_THROWS_AS(gen_fun_aw(labels4, abcd, p.kappa, p.I, too_many), TooManyTimes);
}

TEST_CASE("partition function and the finite-N density") {
    auto p = params_i1();
    PhasePoint pp;
    pp.abcd = abcd_of(p);
    pp.kappa = p.kappa;
    pp.I = p.I;

    // Z_N(1) > 0 and log Z stable under doubling is built into log_partition.
    double lz = log_partition(3, 2, 1.0, pp);
    CHECK(std::isfinite(lz));

    // Mean-density identity at N = 3 against the exact stationary measure,
    // for both up-edge counts; the matching path has n_up Right steps.
    auto w = model_weights(p);
    for (int n_up : {1, 2}) {
        std::string bits;
        for (int i = 0; i < n_up; ++i) bits += 'R';
        for (int i = n_up; i < 3; ++i) bits += 'D';
        auto path = DownRightPath::from_bits(bits);
        auto mu = stationary_exact(step_transition_matrix(path, w));
        double exact = mean_density(mu, 3, 1);
        double aw = mean_density_finite(3, n_up, pp);
        CHECK(aw == doctest::Approx(exact).epsilon(1e-6));
    }
}

TEST_CASE("phase classification") {
    ABCDParams a;
    a.q = 0.5;
    a.B = a.D = -0.05;
    a.A = 1.5;
    a.C = 0.5;
    CHECK(classify_phase(a) == Phase::HighDensity);
    a.A = 0.5;
    CHECK(classify_phase(a) == Phase::MaximalCurrent);
    a.C = 1.5;
    CHECK(classify_phase(a) == Phase::LowDensity);
    a.A = 0.999999999;
    a.C = 0.5;
    CHECK(classify_phase(a) == Phase::Boundary);
}

TEST_CASE("limit density G") {
    // I = 1, MC, kappa = 1: G(1) = 1/2 regardless of lambda.
    PhasePoint mc;
    mc.abcd.q = 0.5;
    mc.abcd.A = mc.abcd.C = 0.5;
    mc.abcd.B = mc.abcd.D = -0.05;
    mc.kappa = 1.0;
    mc.I = 1;
    mc.lambda = 0.3;
    CHECK(density_limit(mc) == doctest::Approx(0.5).epsilon(1e-14));

    // I = 1, HD with A = 3, kappa = 0.5, lambda = 1: A kappa/(A kappa + 1) = 0.6.
    PhasePoint hd;
    hd.abcd.q = 0.5;
    hd.abcd.A = 3.0;
    hd.abcd.C = 0.2;
    hd.abcd.B = hd.abcd.D = -0.05;
    hd.kappa = 0.5;
    hd.I = 1;
    hd.lambda = 1.0;
    CHECK(density_limit(hd) == doctest::Approx(0.6).epsilon(1e-14));

    // I = 2 MC at kappa = 0.5, lambda = 0: finite sanity value G(1/kappa).
    PhasePoint mc2 = mc;
    mc2.kappa = 0.5;
    mc2.I = 2;
    mc2.lambda = 0.0;
    double expect = 2.0 / (2.0 + std::pow(0.5, -0.5)) + 2.0 / (2.0 + std::pow(0.5, 0.5));
    CHECK(density_limit(mc2) == doctest::Approx(expect).epsilon(1e-14));

    PhasePoint bd = mc;
    bd.abcd.A = 1.0 + 1e-12;
    CHECK_THROWS_AS(density_limit(bd), PhaseBoundary);

    // With phase data fixed, the lambda = 0 and lambda = 1 limits swap under
    // kappa <-> 1/kappa.
    PhasePoint lhs = mc;
    lhs.kappa = 0.4;
    lhs.lambda = 0.0;
    PhasePoint rhs = mc;
    rhs.kappa = 1.0 / 0.4;
    rhs.lambda = 1.0;
    CHECK(density_limit(lhs) == doctest::Approx(density_limit(rhs)).epsilon(1e-14));
}

TEST_CASE("largest atom dominates log Z in HD at large N") {
    PhasePoint hd;
    hd.abcd.q = 0.5;
    hd.abcd.A = 1.5;
    hd.abcd.C = 0.5;
    hd.abcd.B = hd.abcd.D = -0.05;
    hd.kappa = 0.5;
    hd.I = 1;

    const int N = 2000, n_up = 1000;
    AWMeasure m = marginal(1.0, hd.abcd);
    REQUIRE(!m.atoms.empty());
    // Continuous part alone vs the full logsumexp.
    double full = log_partition(N, n_up, 1.0, hd);
    double atom_term =
        std::log(m.atoms[0].mass) + n_up * log_h_factor(1.0, m.atoms[0].y, hd.kappa, 0.5, 1, true) +
        (N - n_up) * log_h_factor(1.0, m.atoms[0].y, hd.kappa, 0.5, 1, false);
    CHECK(atom_term > full - 1.0);  // the atom carries almost all of log Z
    CHECK(full - atom_term < 1e-6); // and the rest is exponentially negligible
}

TEST_CASE("AW-route stationary distribution matches Perron at N = 2") {
    auto p = params_i1();
    auto abcd = abcd_of(p);
    auto path = DownRightPath::from_bits("DR");
    auto labels = outgoing_labels(path);
    auto w = model_weights(p);
    auto mu = stationary_exact(step_transition_matrix(path, w));
    auto aw = aw_stationary_distribution(labels, abcd, p.kappa, p.I);
    REQUIRE(aw.size() == mu.size());
    for (size_t i = 0; i < mu.size(); ++i)
        CHECK(aw[i] == doctest::Approx(mu[i]).epsilon(1e-5));
}
