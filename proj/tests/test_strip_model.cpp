#include "doctest.h"

#include "fusedstrip/strip_model.hpp"

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

double max_abs_diff(const TransitionMatrix& a, const TransitionMatrix& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.m.size(); ++i) m = std::max(m, std::abs(a.m[i] - b.m[i]));
    return m;
}

}  // namespace

TEST_CASE("outgoing labels and horizontal count") {
    auto p = DownRightPath::from_bits("DRDRR");
    auto labels = outgoing_labels(p);
    REQUIRE(labels.size() == 5);
    CHECK(labels[0] == Arrow::Horizontal);
    CHECK(labels[1] == Arrow::Up);
    CHECK(labels[2] == Arrow::Horizontal);
    CHECK(labels[3] == Arrow::Up);
    CHECK(labels[4] == Arrow::Up);
    CHECK(horizontal_count(p) == 2);
    CHECK(up_count(p) == 3);

    auto h = DownRightPath::horizontal(4);
    for (Arrow a : outgoing_labels(h)) CHECK(a == Arrow::Up);
    CHECK(horizontal_count(h) == 0);

    auto z = DownRightPath::zigzag(5);
    CHECK(horizontal_count(z) == 3);  // (N+1)/2 Down steps for odd N
}

TEST_CASE("update schedule: empty, one-step, and the 15-vertex region") {
    auto p = DownRightPath::from_bits("DRDRR", 2);
    CHECK(update_schedule(p, p).empty());

    // Width-5 region between P = DRDRR anchored at (2,2) and Q = DRRRR
    // anchored at (4,4): exactly 15 vertices.
    auto q = DownRightPath::from_bits("DRRRR", 4);
    auto sched = update_schedule(p, q);
    CHECK(sched.size() == 15);
    // Row-major order, first row y = 1: (4,1), (5,1), (6,1).
    CHECK(sched[0].v == Vertex{4, 1});
    CHECK(sched[1].v == Vertex{5, 1});
    CHECK(sched[2].v == Vertex{6, 1});
    CHECK(sched[2].kind == VertexKind::RightBoundary);
    // Last row: the single left-boundary vertex (4,4).
    CHECK(sched.back().v == Vertex{4, 4});
    CHECK(sched.back().kind == VertexKind::LeftBoundary);
    int bulk = 0, left = 0, rightb = 0;
    for (auto& sv : sched) {
        if (sv.kind == VertexKind::Bulk) ++bulk;
        if (sv.kind == VertexKind::LeftBoundary) ++left;
        if (sv.kind == VertexKind::RightBoundary) ++rightb;
    }
    CHECK(left == 2);    // (3,3) and (4,4)
    CHECK(rightb == 3);  // (6,1), (7,2) and (8,3): the path end climbs three rows
    CHECK(bulk == 10);

    CHECK_THROWS_AS(update_schedule(q, p), PathOrder);
}

TEST_CASE("one-step schedule for N=2") {
    auto p = DownRightPath::from_bits("DR", 0);
    auto sched = update_schedule(p, p.translated(1));
    // Lower row holds the bulk vertex (1,0) then the right boundary (2,0);
    // the left boundary (1,1) sits one row above.
    REQUIRE(sched.size() == 3);
    CHECK(sched[0].v == Vertex{1, 0});
    CHECK(sched[0].kind == VertexKind::Bulk);
    CHECK(sched[1].v == Vertex{2, 0});
    CHECK(sched[1].kind == VertexKind::RightBoundary);
    CHECK(sched[2].v == Vertex{1, 1});
    CHECK(sched[2].kind == VertexKind::LeftBoundary);
}

TEST_CASE("transition matrix rows are stochastic") {
    auto w = model_weights(params_i1());
    auto T = step_transition_matrix(DownRightPath::zigzag(3), w);
    REQUIRE(T.dim == 8);
    for (size_t r = 0; r < T.dim; ++r) {
        double s = 0.0;
        for (size_t c = 0; c < T.dim; ++c) {
            s += T.at(r, c);
            CHECK(T.at(r, c) >= 0.0);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("N=1 transition equals hand enumeration") {
    auto w = model_weights(params_i1());
    // Horizontal path: left boundary then right boundary act on the single
    // edge: T(tau, tau') = sum_d lK(tau -> d) rK(d -> tau').
    auto T = step_transition_matrix(DownRightPath::horizontal(1), w);
    for (int a = 0; a <= 1; ++a)
        for (int c = 0; c <= 1; ++c) {
            double expect = 0.0;
            for (int d = 0; d <= 1; ++d) expect += w.left_K.at(a, d) * w.right_K.at(d, c);
            CHECK(T.at(static_cast<size_t>(a), static_cast<size_t>(c)) ==
                  doctest::Approx(expect).epsilon(1e-14));
        }
    // Down path: right boundary first, then left boundary.
    auto T2 = step_transition_matrix(DownRightPath::from_bits("D"), w);
    for (int b = 0; b <= 1; ++b)
        for (int d = 0; d <= 1; ++d) {
            double expect = 0.0;
            for (int c = 0; c <= 1; ++c) expect += w.right_K.at(b, c) * w.left_K.at(c, d);
            CHECK(T2.at(static_cast<size_t>(b), static_cast<size_t>(d)) ==
                  doctest::Approx(expect).epsilon(1e-14));
        }
}

TEST_CASE("irreducibility: strictly positive after N steps") {
    auto w = model_weights(params_i1());
    auto T = step_transition_matrix(DownRightPath::from_bits("DR"), w);
    TransitionMatrix P = T;
    TransitionMatrix Q = T;
    for (size_t i = 0; i < T.dim; ++i)
        for (size_t j = 0; j < T.dim; ++j) {
            double s = 0.0;
            for (size_t l = 0; l < T.dim; ++l) s += P.at(i, l) * T.at(l, j);
            Q.at(i, j) = s;
        }
    for (double v : Q.m) CHECK(v > 0.0);
}

TEST_CASE("stationary_exact") {
    // Identity is not irreducible.
    TransitionMatrix id;
    id.N = 1;
    id.I = 1;
    id.dim = 2;
    id.m = {1.0, 0.0, 0.0, 1.0};
    CHECK_THROWS_AS(stationary_exact(id), NotIrreducible);

    // Symmetric doubly stochastic matrix has the uniform distribution.
    TransitionMatrix sym;
    sym.N = 1;
    sym.I = 2;
    sym.dim = 3;
    sym.m = {0.2, 0.3, 0.5, 0.3, 0.5, 0.2, 0.5, 0.2, 0.3};
    auto mu = stationary_exact(sym);
    for (double v : mu) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-11));

    auto w = model_weights(params_i1());
    auto T = step_transition_matrix(DownRightPath::from_bits("DR"), w);
    auto st = stationary_exact(T);
    double res = 0.0;
    for (size_t j = 0; j < T.dim; ++j) {
        double tj = 0.0;
        for (size_t i = 0; i < T.dim; ++i) tj += st[i] * T.at(i, j);
        res += std::abs(tj - st[j]);
    }
    CHECK(res < 1e-12);
}

TEST_CASE("floquet transfer equals zig-zag schedule composition") {
    auto w1 = model_weights(params_i1());
    for (int N : {3, 5}) {
        auto F = floquet_transfer(w1, N);
        auto T = step_transition_matrix(DownRightPath::zigzag(N), w1);
        CHECK(max_abs_diff(F, T) < 1e-12);
        for (size_t r = 0; r < F.dim; ++r) {
            double s = 0.0;
            for (size_t c = 0; c < F.dim; ++c) s += F.at(r, c);
            CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    auto w2 = model_weights(params_i2());
    auto F = floquet_transfer(w2, 3);
    auto T = step_transition_matrix(DownRightPath::zigzag(3), w2);
    CHECK(max_abs_diff(F, T) < 1e-12);

    CHECK_THROWS_AS(floquet_transfer(w1, 4), EvenWidth);
}

TEST_CASE("sampling is reproducible and matches the exact kernel") {
    auto w = model_weights(params_i1());
    auto path = DownRightPath::from_bits("DR");
    auto T = step_transition_matrix(path, w);

    RngStream rng(42);
    Config c0;
    c0.tau = {1, 0};
    size_t from = config_index(c0, 1);

    // Empirical one-step distribution vs the exact matrix row.
    const int samples = 1000000;
    std::vector<double> hist(T.dim, 0.0);
    for (int s = 0; s < samples; ++s) {
        RngStream chain(42, static_cast<uint64_t>(s));
        Config c = sample_step(c0, path, w, chain, 0);
        hist[config_index(c, 1)] += 1.0;
    }
    for (double& v : hist) v /= samples;
    std::vector<double> row(T.dim);
    for (size_t j = 0; j < T.dim; ++j) row[j] = T.at(from, j);
    CHECK(total_variation(hist, row) < 5e-3);

    // Same seed, same trajectory.
    Config a = c0, b = c0;
    for (int s = 0; s < 25; ++s) {
        a = sample_step(a, path, w, rng, static_cast<uint64_t>(s));
        b = sample_step(b, path, w, rng, static_cast<uint64_t>(s));
    }
    CHECK(a.tau == b.tau);
}

TEST_CASE("mean density basics") {
    std::vector<double> point(9, 0.0);
    point[0] = 1.0;  // all-zero config at N=2, I=2
    CHECK(mean_density(point, 2, 2) == 0.0);

    std::vector<double> uniform(9, 1.0 / 9.0);
    CHECK(mean_density(uniform, 2, 2) == doctest::Approx(1.0));  // I/2

    std::vector<double> uniform1(8, 1.0 / 8.0);
    CHECK(mean_density(uniform1, 3, 1) == doctest::Approx(0.5));
}

TEST_CASE("empirical run against exact stationary") {
    auto w = model_weights(params_i1());
    auto path = DownRightPath::from_bits("DRDR");
    auto run = empirical_run(path, w, 100000, 2000, 7);
    REQUIRE(run.ok);
    auto T = step_transition_matrix(path, w);
    auto st = stationary_exact(T);
    CHECK(total_variation(run.histogram, st) < 0.02);

    auto rerun = empirical_run(path, w, 100000, 2000, 7);
    CHECK(run.histogram == rerun.histogram);

    auto empty = empirical_run(path, w, 0, 10, 7);
    CHECK_FALSE(empty.ok);
}
