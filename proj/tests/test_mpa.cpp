#include "doctest.h"

#include <functional>
#include <map>
#include <random>

#include "fusedstrip/mpa.hpp"

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

ModelParams params_i2() {
    ModelParams p;
    p.I = 2;
    p.q = 0.5;
    p.kappa = 0.5;
    p.aa = p.bb = 3.0;
    p.cc = p.dd = 0.05;
    return p;
}

BandedRep rep_for(const ModelParams& p, int dim) {
    auto dehp = dehp_from_boundary(p.aa, p.bb, p.cc, p.dd, p.q);
    return usw_rep(abcd_from_rates(dehp), dim);
}

// Normal-ordering oracle for gamma = delta = 0: any word in D, E reduces to
// sum c_{ij} E^i D^j via DE = qED + D + E, and <W|E^i D^j|V> = alpha^-i beta^-j.
struct NormalForm {
    std::map<std::pair<int, int>, double> coef;  // (i, j) -> weight of E^i D^j

    static NormalForm one() {
        NormalForm n;
        n.coef[{0, 0}] = 1.0;
        return n;
    }

    void add(int i, int j, double c) { coef[{i, j}] += c; }

    // Multiply by E (resp. D) on the right.
    NormalForm times(char op, double q) const {
        NormalForm out;
        for (const auto& [ij, c] : coef) {
            auto [i, j] = ij;
            if (op == 'D') {
                out.add(i, j + 1, c);
            } else {
                // E^i D^j E: push E through D^j.
                // D^j E = q^j E D^j + sum_{k=0}^{j-1} q^k (D + E) D^{j-1-k}
                //       = q^j E D^j + sum_k q^k D^{j-k} + sum_k q^k E D^{j-1-k}...
                // handled recursively below instead.
                std::map<std::pair<int, int>, double> cur;
                cur[{0, j}] = 1.0;  // D^j (with i E's prepended at the end)
                // move E left past each D one at a time
                std::map<std::pair<int, int>, double> acc;  // (e, d): E^e D^d after E insertion
                // Represent D^j E as sum over states; do it by recursion on j.
                std::function<void(int, double, std::map<std::pair<int, int>, double>&)> rec =
                    [&](int jj, double w, std::map<std::pair<int, int>, double>& into) {
                        if (jj == 0) {
                            into[{1, 0}] += w;
                            return;
                        }
                        // D^jj E = D^{jj-1} (DE) = D^{jj-1}(qED + D + E)
                        std::map<std::pair<int, int>, double> sub;
                        rec(jj - 1, w * q, sub);  // D^{jj-1} E, then append D
                        for (const auto& [ed, cw] : sub) into[{ed.first, ed.second + 1}] += cw;
                        into[{0, jj}] += w;  // D^{jj-1} D
                        std::map<std::pair<int, int>, double> sub2;
                        rec(jj - 1, w, sub2);  // D^{jj-1} E
                        for (const auto& [ed, cw] : sub2) into[ed] += cw;
                    };
                std::map<std::pair<int, int>, double> res;
                rec(j, 1.0, res);
                for (const auto& [ed, cw] : res) out.add(i + ed.first, ed.second, c * cw);
            }
        }
        return out;
    }

    double value(double alpha, double beta) const {
        double v = 0.0;
        for (const auto& [ij, c] : coef)
            v += c * std::pow(alpha, -ij.first) * std::pow(beta, -ij.second);
        return v;
    }
};

}  // namespace

TEST_CASE("dehp_from_boundary") {
    auto p = dehp_from_boundary(3.0, 3.0, 0.1, 0.1, 0.5);
    CHECK(p.alpha == doctest::Approx(15.0 / 19.0).epsilon(1e-15));
    CHECK(p.gamma == doctest::Approx(1.0 / 38.0).epsilon(1e-15));

    auto z = dehp_from_boundary(3.0, 3.0, 0.0, 0.0, 0.5);
    CHECK(z.gamma == 0.0);
    CHECK(z.delta == 0.0);

    // alpha > 0 whenever the strip-model constraints hold.
    ModelParams mp = params_i1();
    auto r = dehp_from_boundary(mp.aa, mp.bb, mp.cc, mp.dd, mp.q);
    CHECK(r.alpha > 0.0);
    CHECK(r.beta > 0.0);

    CHECK_THROWS_AS(dehp_from_boundary(2.0, 3.0, 1.0, 0.1, 0.5), DegenerateBoundary);
}

TEST_CASE("abcd round trips") {
    DEHPParams p;
    p.q = 0.5;
    p.beta = 0.125;
    p.delta = 0.0;
    p.alpha = 0.3;
    p.gamma = 0.05;
    auto abcd = abcd_from_rates(p);
    CHECK(abcd.A == doctest::Approx(3.0).epsilon(1e-14));  // (1-q-beta)/beta
    CHECK(abcd.B == doctest::Approx(0.0).epsilon(1e-14));

    auto back = rates_from_abcd(abcd);
    CHECK(back.alpha == doctest::Approx(p.alpha).epsilon(1e-12));
    CHECK(back.beta == doctest::Approx(p.beta).epsilon(1e-12));
    CHECK(back.gamma == doctest::Approx(p.gamma).epsilon(1e-12));
    CHECK(back.delta == doctest::Approx(p.delta).epsilon(1e-12));

    // Random round trips abcd -> rates -> abcd.
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> uni(0.01, 0.95);
    for (int trial = 0; trial < 30; ++trial) {
        ABCDParams a;
        a.q = 0.5;
        a.A = uni(gen) * 2.0;
        a.C = uni(gen) * 2.0;
        a.B = -uni(gen) * 0.9;
        a.D = -uni(gen) * 0.9;
        auto rates = rates_from_abcd(a);
        auto again = abcd_from_rates(rates);
        CHECK(again.A == doctest::Approx(a.A).epsilon(1e-11));
        CHECK(again.B == doctest::Approx(a.B).epsilon(1e-11));
        CHECK(again.C == doctest::Approx(a.C).epsilon(1e-11));
        CHECK(again.D == doctest::Approx(a.D).epsilon(1e-11));
    }

    // Strip-admissible parameters map into the fan region AC < 1; pushing C
    // up leaves it.
    ModelParams mp = params_i2();
    auto strip_abcd = abcd_from_rates(dehp_from_boundary(mp.aa, mp.bb, mp.cc, mp.dd, mp.q));
    CHECK(strip_abcd.fan_region());
    ABCDParams shock = strip_abcd;
    shock.A = 1.4;
    shock.C = 0.9;
    CHECK_FALSE(shock.fan_region());

    // Boundary params round trip through the DEHP map.
    auto dehp = dehp_from_boundary(3.0, 2.5, 0.1, 0.2, 0.5);
    auto bp = boundary_from_dehp(dehp);
    CHECK(bp.aa == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(bp.bb == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(bp.cc == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(bp.dd == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("usw_rep satisfies the algebra on the window") {
    // One set with gamma = delta = 0, one with gamma, delta > 0.
    for (double cd : {0.0, 0.1}) {
        auto dehp = dehp_from_boundary(3.0, 3.0, cd, cd, 0.5);
        auto abcd = abcd_from_rates(dehp);
        auto rep = usw_rep(abcd, 64);
        auto res = rep_residuals(rep, 3.0, 3.0, cd, cd);
        CHECK(res.algebra < 1e-10);
        CHECK(res.left < 1e-10);
        CHECK(res.right < 1e-10);
        auto dres = dehp_residuals(rep, dehp);
        CHECK(dres.algebra < 1e-10);
        CHECK(dres.left < 1e-10);
        CHECK(dres.right < 1e-10);
    }
}

TEST_CASE("gamma = delta = 0 reduces to boundary eigenrelations") {
    auto dehp = dehp_from_boundary(3.0, 3.0, 0.0, 0.0, 0.5);
    auto rep = usw_rep(abcd_from_rates(dehp), 32);
    DMatrix Dm = rep.D_mat(), Em = rep.E_mat();
    // <W| E = (1/alpha) <W| and D |V> = (1/beta) |V>.
    for (size_t j = 0; j + 2 < 32; ++j) {
        double expect = j == 0 ? 1.0 / dehp.alpha : 0.0;
        CHECK(Em(0, j) == doctest::Approx(expect).epsilon(1e-12));
    }
    for (size_t i = 0; i + 2 < 32; ++i) {
        double expect = i == 0 ? 1.0 / dehp.beta : 0.0;
        CHECK(Dm(i, 0) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("window exactness under truncation growth") {
    auto p = params_i1();
    auto dehp = dehp_from_boundary(p.aa, p.bb, p.cc, p.dd, p.q);
    auto abcd = abcd_from_rates(dehp);
    auto rep1 = usw_rep(abcd, 24);
    auto rep2 = usw_rep(abcd, 48);
    // <W| (DE)^3 |V> must be truncation-independent.
    auto val = [](const BandedRep& r) {
        DMatrix m = r.D_mat() * r.E_mat();
        DMatrix p3 = m * m * m;
        return p3(0, 0);
    };
    double v1 = val(rep1), v2 = val(rep2);
    CHECK(std::abs(v1 - v2) / std::abs(v2) < 1e-13);
}

TEST_CASE("fused_M structure") {
    auto p = params_i1();
    auto rep = rep_for(p, 24);
    // I = 1: M^0 = u + e, M^1 = 1/u + d.
    double u = 0.7;
    auto m0 = fused_M(u, 0, 1, rep);
    auto m1 = fused_M(u, 1, 1, rep);
    DMatrix e = rep.e_mat(), d = rep.d_mat();
    double diff0 = 0.0, diff1 = 0.0;
    for (size_t i = 0; i < m0.rows(); ++i)
        for (size_t j = 0; j < m0.cols(); ++j) {
            double t0 = e(i, j) + (i == j ? u : 0.0);
            double t1 = d(i, j) + (i == j ? 1.0 / u : 0.0);
            diff0 = std::max(diff0, std::abs(m0(i, j) - t0));
            diff1 = std::max(diff1, std::abs(m1(i, j) - t1));
        }
    CHECK(diff0 == 0.0);
    CHECK(diff1 == 0.0);

    // Bandwidth of M^I_zeta is at most I.
    for (int I : {1, 2, 3}) {
        for (int z = 0; z <= I; ++z) CHECK(matrix_bandwidth(fused_M(0.8, z, I, rep)) <= I);
    }

    // I = 2, zeta = 1: two-word expansion.
    double q = p.q;
    auto m = fused_M(u, 1, 2, rep);
    double v0 = u * std::pow(q, -0.5), v1 = u * std::pow(q, 0.5);
    auto M0 = [&](double v) {
        DMatrix r = rep.e_mat();
        for (size_t i = 0; i < r.rows(); ++i) r(i, i) += v;
        return r;
    };
    auto M1 = [&](double v) {
        DMatrix r = rep.d_mat();
        for (size_t i = 0; i < r.rows(); ++i) r(i, i) += 1.0 / v;
        return r;
    };
    DMatrix expect = M0(v0) * M1(v1) + M1(v0) * M0(v1);
    double diff = 0.0;
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) diff = std::max(diff, std::abs(m(i, j) - expect(i, j)));
    CHECK(diff < 1e-13);
}

TEST_CASE("mps_value basics") {
    auto p = params_i1();
    auto rep = rep_for(p, 16);
    // N = 0: <W|V> = 1.
    CHECK(mps_value({}, {}, p.kappa, p.I, rep) == 1.0);

    // Doubling the window leaves values unchanged.
    auto rep2 = rep_for(p, 32);
    std::vector<Arrow> labels = {Arrow::Up, Arrow::Horizontal, Arrow::Up};
    std::vector<int> tau = {1, 0, 1};
    double v1 = mps_value(labels, tau, p.kappa, p.I, rep);
    double v2 = mps_value(labels, tau, p.kappa, p.I, rep2);
    CHECK(std::abs(v1 - v2) / std::abs(v2) < 1e-13);

    std::vector<Arrow> big(15, Arrow::Up);
    std::vector<int> taub(15, 0);
    CHECK_THROWS_AS(mps_value(big, taub, p.kappa, p.I, rep), WindowTooSmall);
}

TEST_CASE("mps_value against normal-ordering oracle at gamma = delta = 0") {
    ModelParams p;
    p.I = 1;
    p.q = 0.5;
    p.kappa = 0.5;
    p.aa = p.bb = 3.0;
    p.cc = p.dd = 1e-14;  // dehp gamma, delta ~ 0 for the oracle
    auto dehp = dehp_from_boundary(3.0, 3.0, 0.0, 0.0, 0.5);
    auto rep = usw_rep(abcd_from_rates(dehp), 16);

    // M^up_t and M^right_t are affine in (D, E):
    //   M_0(v) = v - 1 + (1-q) E, M_1(v) = 1/v - 1 + (1-q) D.
    auto eval = [&](const std::vector<Arrow>& labels, const std::vector<int>& tau) {
        double q = 0.5, kappa = 0.5;
        std::vector<NormalForm> terms{NormalForm::one()};
        std::vector<double> weights{1.0};
        for (size_t i = 0; i < labels.size(); ++i) {
            double v = labels[i] == Arrow::Up ? 1.0 / kappa : kappa;
            double cst = tau[i] == 0 ? v - 1.0 : 1.0 / v - 1.0;
            char op = tau[i] == 0 ? 'E' : 'D';
            std::vector<NormalForm> nt;
            std::vector<double> nw;
            for (size_t k = 0; k < terms.size(); ++k) {
                nt.push_back(terms[k]);
                nw.push_back(weights[k] * cst);
                nt.push_back(terms[k].times(op, q));
                nw.push_back(weights[k] * (1.0 - q));
            }
            terms.swap(nt);
            weights.swap(nw);
        }
        double total = 0.0;
        for (size_t k = 0; k < terms.size(); ++k)
            total += weights[k] * terms[k].value(dehp.alpha, dehp.beta);
        return total;
    };

    std::vector<Arrow> labels = {Arrow::Up, Arrow::Horizontal};
    for (int t1 = 0; t1 <= 1; ++t1)
        for (int t2 = 0; t2 <= 1; ++t2) {
            std::vector<int> tau = {t1, t2};
            double got = mps_value(labels, tau, 0.5, 1, rep);
            double want = eval(labels, tau);
            CHECK(got == doctest::Approx(want).epsilon(1e-11));
        }
}

TEST_CASE("stationary_mpa equals the Perron vector") {
    struct CasePath {
        ModelParams p;
        DownRightPath path;
    };
    std::vector<CasePath> cases;
    cases.push_back({params_i1(), DownRightPath::from_bits("DR")});
    cases.push_back({params_i1(), DownRightPath::from_bits("RRR")});
    cases.push_back({params_i1(), DownRightPath::from_bits("DRD")});
    cases.push_back({params_i2(), DownRightPath::from_bits("RDR")});
    for (auto& cs : cases) {
        auto rep = rep_for(cs.p, cs.path.width() * cs.p.I + 8);
        auto mu = stationary_mpa(cs.path, cs.p, rep);
        double sum = 0.0;
        for (double v : mu) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

        auto w = model_weights(cs.p);
        auto T = step_transition_matrix(cs.path, w);
        auto st = stationary_exact(T);
        double linf = 0.0;
        for (size_t i = 0; i < mu.size(); ++i) linf = std::max(linf, std::abs(mu[i] - st[i]));
        CHECK(linf < 1e-10);
    }
}

TEST_CASE("stationary_mpa is translation invariant") {
    auto p = params_i1();
    auto path = DownRightPath::from_bits("DRD", 5);
    auto rep = rep_for(p, 16);
    auto mu1 = stationary_mpa(path, p, rep);
    auto mu2 = stationary_mpa(path.translated(1), p, rep);
    CHECK(mu1 == mu2);
}

TEST_CASE("consistency residuals and sensitivity") {
    auto p1 = params_i1();
    auto rep1 = rep_for(p1, 32);
    auto r1 = consistency_residual(p1, rep1);
    CHECK(r1.bulk < 1e-10);
    CHECK(r1.left < 1e-10);
    CHECK(r1.right < 1e-10);

    auto p2 = params_i2();
    auto rep2 = rep_for(p2, 32);
    auto r2 = consistency_residual(p2, rep2);
    CHECK(r2.bulk < 1e-9);
    CHECK(r2.left < 1e-9);
    CHECK(r2.right < 1e-9);

    // A 1% perturbation of x must blow the bulk residual above 1e-3.
    BandedRep bad = rep1;
    for (double& v : bad.x_sub) v *= 1.01;
    for (double& v : bad.x_diag) v *= 1.01;
    for (double& v : bad.x_sup) v *= 1.01;
    auto rb = consistency_residual(p1, bad);
    CHECK(rb.bulk > 1e-3);
}

TEST_CASE("ZF and GZ residuals at random admissible points") {
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> uni(0.3, 0.9);
    auto p2 = params_i2();
    auto rep2 = rep_for(p2, 40);
    for (int trial = 0; trial < 3; ++trial) {
        double x = uni(gen), y = uni(gen) + 1.0, u = uni(gen);
        auto res = zf_gz_residual(rep2, x, y, u, 2, p2);
        CHECK(res.zf < 1e-9);
        CHECK(res.gz_left < 1e-9);
        CHECK(res.gz_right < 1e-9);
    }

    auto p1 = params_i1();
    auto rep1 = rep_for(p1, 40);
    auto res1 = zf_gz_residual(rep1, 0.45, 1.7, 0.6, 1, p1);
    CHECK(res1.zf < 1e-12);
    CHECK(res1.gz_left < 1e-12);
    CHECK(res1.gz_right < 1e-12);

    // Specialization x = kappa, y = 1/kappa, u = kappa reproduces the
    // consistency relations.
    auto spec = zf_gz_residual(rep1, p1.kappa, 1.0 / p1.kappa, p1.kappa, 1, p1);
    auto cons = consistency_residual(p1, rep1);
    CHECK(std::abs(spec.zf - cons.bulk) < 1e-12);
    CHECK(std::abs(spec.gz_left - cons.left) < 1e-12);
    CHECK(std::abs(spec.gz_right - cons.right) < 1e-12);
}
