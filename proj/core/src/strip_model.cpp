#include "fusedstrip/strip_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace fusedstrip {

DownRightPath DownRightPath::zigzag(int N, long long anchor) {
    DownRightPath p;
    p.anchor = anchor;
    p.steps.resize(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i)
        p.steps[static_cast<size_t>(i)] = (i % 2 == 0) ? Step::Down : Step::Right;
    return p;
}

DownRightPath DownRightPath::horizontal(int N, long long anchor) {
    DownRightPath p;
    p.anchor = anchor;
    p.steps.assign(static_cast<size_t>(N), Step::Right);
    return p;
}

DownRightPath DownRightPath::from_bits(const std::string& bits, long long anchor) {
    DownRightPath p;
    p.anchor = anchor;
    for (char c : bits) {
        if (c == 'D' || c == 'd' || c == '1')
            p.steps.push_back(Step::Down);
        else if (c == 'R' || c == 'r' || c == '0')
            p.steps.push_back(Step::Right);
        else
            throw InvalidParams(std::string("path bit-string: unexpected character '") + c + "'");
    }
    return p;
}

std::vector<Arrow> outgoing_labels(const DownRightPath& path) {
    std::vector<Arrow> labels;
    labels.reserve(path.steps.size());
    for (Step s : path.steps) labels.push_back(s == Step::Down ? Arrow::Horizontal : Arrow::Up);
    return labels;
}

int horizontal_count(const DownRightPath& path) {
    int c = 0;
    for (Step s : path.steps)
        if (s == Step::Down) ++c;
    return c;
}

int up_count(const DownRightPath& path) { return path.width() - horizontal_count(path); }

namespace {

struct PathProfile {
    long long x_min, x_max;
    std::map<long long, long long> y_max;  // per column: highest path vertex
    std::map<long long, long long> y_min;
};

PathProfile profile(const DownRightPath& p) {
    PathProfile pr;
    auto vs = p.vertices();
    pr.x_min = vs.front().x;
    pr.x_max = vs.back().x;
    for (const Vertex& v : vs) {
        auto it = pr.y_max.find(v.x);
        if (it == pr.y_max.end()) {
            pr.y_max[v.x] = v.y;
            pr.y_min[v.x] = v.y;
        } else {
            it->second = std::max(it->second, v.y);
            pr.y_min[v.x] = std::min(pr.y_min[v.x], v.y);
        }
    }
    return pr;
}

bool weakly_below(const Vertex& v, const PathProfile& q) {
    if (v.x < q.x_min) return true;
    if (v.x > q.x_max) return false;
    return v.y <= q.y_max.at(v.x);
}

bool weakly_above(const Vertex& v, const PathProfile& p) {
    if (v.x > p.x_max) return true;
    if (v.x < p.x_min) return false;
    return v.y >= p.y_min.at(v.x);
}

bool strictly_above(const Vertex& v, const PathProfile& p) {
    if (v.x > p.x_max) return true;
    if (v.x < p.x_min) return false;
    return v.y > p.y_max.at(v.x);
}

// Mutable path geometry used while sweeping the schedule; applying a vertex
// performs the corresponding local move.
struct PathGeom {
    long long anchor;
    std::vector<Step> steps;
    std::vector<Vertex> verts;

    explicit PathGeom(const DownRightPath& p) : anchor(p.anchor), steps(p.steps) {
        verts = p.vertices();
    }

    int width() const { return static_cast<int>(steps.size()); }

    // Returns the affected cut slots (0-based); updates geometry in place.
    std::pair<int, int> apply(const ScheduledVertex& sv) {
        const int N = width();
        switch (sv.kind) {
            case VertexKind::LeftBoundary: {
                if (!(steps.front() == Step::Right && verts.front().x == sv.v.x - 1 &&
                      verts.front().y == sv.v.y - 1))
                    throw PathOrder("left-boundary vertex not activatable");
                steps.front() = Step::Down;
                ++anchor;
                verts.front() = sv.v;
                return {0, 0};
            }
            case VertexKind::RightBoundary: {
                if (!(steps.back() == Step::Down && verts.back().x == sv.v.x - 1 &&
                      verts.back().y == sv.v.y - 1))
                    throw PathOrder("right-boundary vertex not activatable");
                steps.back() = Step::Right;
                verts.back() = sv.v;
                return {N - 1, N - 1};
            }
            case VertexKind::Bulk:
                break;
        }
        for (int j = 0; j + 1 < N; ++j) {
            if (steps[static_cast<size_t>(j)] == Step::Down &&
                steps[static_cast<size_t>(j + 1)] == Step::Right &&
                verts[static_cast<size_t>(j)].x == sv.v.x - 1 &&
                verts[static_cast<size_t>(j)].y == sv.v.y) {
                steps[static_cast<size_t>(j)] = Step::Right;
                steps[static_cast<size_t>(j + 1)] = Step::Down;
                verts[static_cast<size_t>(j + 1)] = sv.v;
                return {j, j + 1};
            }
        }
        throw PathOrder("bulk vertex not activatable");
    }
};

size_t pow_sz(int base, int exp) {
    size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= static_cast<size_t>(base);
    return r;
}

// Distribution updates. When a bulk vertex acts, slot j carries its left
// incoming edge b and slot j+1 its bottom incoming edge a; the pair becomes
// (c, d) = (top, right) with probability R^{c,d}_{a,b}.
void apply_bulk(std::vector<double>& dist, int slot, int N, const FusedWeights& w) {
    const int n = w.R.I + 1;
    const size_t right = pow_sz(n, N - slot - 2);
    const size_t pair_block = static_cast<size_t>(n) * static_cast<size_t>(n) * right;
    const size_t nouter = dist.size() / pair_block;
    std::vector<double> buf(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (size_t outer = 0; outer < nouter; ++outer) {
        for (size_t inner = 0; inner < right; ++inner) {
            const size_t base = outer * pair_block + inner;
            for (int b = 0; b < n; ++b)
                for (int a = 0; a < n; ++a)
                    buf[static_cast<size_t>(b * n + a)] =
                        dist[base + (static_cast<size_t>(b) * n + a) * right];
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double acc = 0.0;
                    for (int b = 0; b < n; ++b) {
                        int a = c + d - b;  // conservation
                        if (a < 0 || a >= n) continue;
                        acc += w.R.at(a, b, c, d) * buf[static_cast<size_t>(b * n + a)];
                    }
                    dist[base + (static_cast<size_t>(c) * n + d) * right] = acc;
                }
        }
    }
}

void apply_boundary(std::vector<double>& dist, int slot, int N, const KMatrix<double>& k) {
    const int n = k.I + 1;
    const size_t right = pow_sz(n, N - slot - 1);
    const size_t block = static_cast<size_t>(n) * right;
    const size_t nouter = dist.size() / block;
    std::vector<double> buf(static_cast<size_t>(n));
    for (size_t outer = 0; outer < nouter; ++outer) {
        for (size_t inner = 0; inner < right; ++inner) {
            const size_t base = outer * block + inner;
            for (int in = 0; in < n; ++in)
                buf[static_cast<size_t>(in)] = dist[base + static_cast<size_t>(in) * right];
            for (int out = 0; out < n; ++out) {
                double acc = 0.0;
                for (int in = 0; in < n; ++in) acc += k.at(in, out) * buf[static_cast<size_t>(in)];
                dist[base + static_cast<size_t>(out) * right] = acc;
            }
        }
    }
}

}  // namespace

std::vector<ScheduledVertex> update_schedule(const DownRightPath& P, const DownRightPath& Q) {
    if (P.width() != Q.width()) throw PathOrder("paths have different widths");
    const int N = P.width();
    PathProfile pp = profile(P);
    PathProfile pq = profile(Q);
    for (const Vertex& v : P.vertices())
        if (!weakly_below(v, pq)) throw PathOrder("Q does not sit above P");
    for (const Vertex& v : Q.vertices())
        if (!weakly_above(v, pp)) throw PathOrder("Q does not sit above P");

    std::vector<ScheduledVertex> sched;
    long long y_lo = pp.y_min.begin()->second;
    for (const auto& kv : pp.y_min) y_lo = std::min(y_lo, kv.second);
    long long y_hi = pq.y_max.begin()->second;
    for (const auto& kv : pq.y_max) y_hi = std::max(y_hi, kv.second);
    for (long long y = y_lo; y <= y_hi; ++y) {
        for (long long x = std::min(pp.x_min, pq.x_min); x <= std::max(pp.x_max, pq.x_max); ++x) {
            if (y > x || x > y + N) continue;  // outside the strip
            Vertex v{x, y};
            if (!strictly_above(v, pp) || !weakly_below(v, pq)) continue;
            ScheduledVertex sv;
            sv.v = v;
            sv.kind = (x == y) ? VertexKind::LeftBoundary
                               : (x == y + N ? VertexKind::RightBoundary : VertexKind::Bulk);
            sched.push_back(sv);
        }
    }
    // The loops already emit (row, column) order.
    return sched;
}

size_t config_index(const Config& c, int I) {
    size_t idx = 0;
    for (int t : c.tau) idx = idx * static_cast<size_t>(I + 1) + static_cast<size_t>(t);
    return idx;
}

Config config_from_index(size_t idx, int N, int I) {
    Config c;
    c.tau.assign(static_cast<size_t>(N), 0);
    for (int i = N - 1; i >= 0; --i) {
        c.tau[static_cast<size_t>(i)] = static_cast<int>(idx % static_cast<size_t>(I + 1));
        idx /= static_cast<size_t>(I + 1);
    }
    return c;
}

TransitionMatrix transition_matrix(const DownRightPath& P, const DownRightPath& Q,
                                   const FusedWeights& w, size_t state_cap) {
    const int N = P.width();
    const int I = w.R.I;
    const size_t dim = pow_sz(I + 1, N);
    if (dim > state_cap) throw StateSpaceTooLarge("transition_matrix: (I+1)^N exceeds cap");
    auto sched = update_schedule(P, Q);

    TransitionMatrix T;
    T.N = N;
    T.I = I;
    T.dim = dim;
    T.m.assign(dim * dim, 0.0);

    for (size_t from = 0; from < dim; ++from) {
        std::vector<double> dist(dim, 0.0);
        dist[from] = 1.0;
        PathGeom geom(P);
        for (const auto& sv : sched) {
            auto slots = geom.apply(sv);
            if (sv.kind == VertexKind::Bulk)
                apply_bulk(dist, slots.first, N, w);
            else if (sv.kind == VertexKind::LeftBoundary)
                apply_boundary(dist, slots.first, N, w.left_K);
            else
                apply_boundary(dist, slots.first, N, w.right_K);
        }
        for (size_t to = 0; to < dim; ++to) T.at(from, to) = dist[to];
    }
    return T;
}

TransitionMatrix step_transition_matrix(const DownRightPath& path, const FusedWeights& w,
                                        size_t state_cap) {
    return transition_matrix(path, path.translated(1), w, state_cap);
}

Config sample_step(const Config& c, const DownRightPath& path, const FusedWeights& w,
                   const RngStream& rng, uint64_t step_no) {
    const int I = w.R.I;
    auto sched = update_schedule(path, path.translated(1));
    Config cur = c;
    PathGeom geom(path);
    uint64_t draw = 0;
    for (const auto& sv : sched) {
        auto slots = geom.apply(sv);
        double u = rng.uniform(step_no, draw++);
        if (sv.kind == VertexKind::Bulk) {
            int b = cur.tau[static_cast<size_t>(slots.first)];
            int a = cur.tau[static_cast<size_t>(slots.second)];
            double acc = 0.0;
            int chosen_c = -1, chosen_d = -1;
            for (int cc = 0; cc <= I; ++cc) {
                int dd = a + b - cc;
                if (dd < 0 || dd > I) continue;
                acc += w.R.at(a, b, cc, dd);
                if (u < acc) {
                    chosen_c = cc;
                    chosen_d = dd;
                    break;
                }
            }
            if (chosen_c < 0) {  // rounding tail: take the last admissible pair
                for (int cc = I; cc >= 0; --cc) {
                    int dd = a + b - cc;
                    if (dd >= 0 && dd <= I) {
                        chosen_c = cc;
                        chosen_d = dd;
                        break;
                    }
                }
            }
            cur.tau[static_cast<size_t>(slots.first)] = chosen_c;
            cur.tau[static_cast<size_t>(slots.second)] = chosen_d;
        } else {
            const KMatrix<double>& k = sv.kind == VertexKind::LeftBoundary ? w.left_K : w.right_K;
            int in = cur.tau[static_cast<size_t>(slots.first)];
            double acc = 0.0;
            int chosen = I;
            for (int out = 0; out <= I; ++out) {
                acc += k.at(in, out);
                if (u < acc) {
                    chosen = out;
                    break;
                }
            }
            cur.tau[static_cast<size_t>(slots.first)] = chosen;
        }
    }
    return cur;
}

namespace {

bool strongly_connected(const TransitionMatrix& T) {
    const size_t n = T.dim;
    auto reach = [&](bool forward) {
        std::vector<char> seen(n, 0);
        std::vector<size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            size_t v = stack.back();
            stack.pop_back();
            for (size_t w = 0; w < n; ++w) {
                double p = forward ? T.at(v, w) : T.at(w, v);
                if (p > 0.0 && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        for (char s : seen)
            if (!s) return false;
        return true;
    };
    return reach(true) && reach(false);
}

std::vector<double> solve_stationary_direct(const TransitionMatrix& T) {
    // Null space of T^t - Id, with sum(mu) = 1 replacing the last equation.
    const size_t n = T.dim;
    std::vector<double> A(n * n, 0.0), b(n, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) A[i * n + j] = T.at(j, i) - (i == j ? 1.0 : 0.0);
    for (size_t j = 0; j < n; ++j) A[(n - 1) * n + j] = 1.0;
    b[n - 1] = 1.0;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (std::abs(A[piv * n + col]) < 1e-300)
            throw NonConvergence("stationary_exact: singular system");
        if (piv != col) {
            for (size_t j = 0; j < n; ++j) std::swap(A[piv * n + j], A[col * n + j]);
            std::swap(b[piv], b[col]);
        }
        for (size_t r = col + 1; r < n; ++r) {
            double f = A[r * n + col] / A[col * n + col];
            if (f == 0.0) continue;
            for (size_t j = col; j < n; ++j) A[r * n + j] -= f * A[col * n + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t j = i + 1; j < n; ++j) s -= A[i * n + j] * x[j];
        x[i] = s / A[i * n + i];
    }
    return x;
}

}  // namespace

std::vector<double> stationary_exact(const TransitionMatrix& T, double residual_tol,
                                     uint64_t max_iters) {
    const size_t n = T.dim;
    if (!strongly_connected(T)) throw NotIrreducible("stationary_exact: chain is not irreducible");

    std::vector<double> mu(n, 1.0 / static_cast<double>(n)), next(n, 0.0);
    for (uint64_t it = 0; it < max_iters; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (size_t i = 0; i < n; ++i) {
            double w = mu[i];
            if (w == 0.0) continue;
            for (size_t j = 0; j < n; ++j) next[j] += w * T.at(i, j);
        }
        double norm = 0.0;
        for (double v : next) norm += v;
        for (double& v : next) v /= norm;
        double res = 0.0;
        for (size_t j = 0; j < n; ++j) res += std::abs(next[j] - mu[j]);
        mu.swap(next);
        if (res < residual_tol) return mu;
        // A slowly mixing chain is cheaper to finish by a direct solve.
        if (it == 5000 && n <= 2048) {
            auto x = solve_stationary_direct(T);
            double r = 0.0;
            for (size_t j = 0; j < n; ++j) {
                double tj = 0.0;
                for (size_t i = 0; i < n; ++i) tj += x[i] * T.at(i, j);
                r += std::abs(tj - x[j]);
            }
            if (r < residual_tol) return x;
        }
    }
    throw NonConvergence("stationary_exact: power iteration did not converge");
}

TransitionMatrix floquet_transfer(const FusedWeights& w, int N, size_t state_cap) {
    if (N % 2 == 0) throw EvenWidth("floquet_transfer: width must be odd");
    const int I = w.R.I;
    const size_t dim = pow_sz(I + 1, N);
    if (dim > state_cap) throw StateSpaceTooLarge("floquet_transfer: (I+1)^N exceeds cap");

    TransitionMatrix T;
    T.N = N;
    T.I = I;
    T.dim = dim;
    T.m.assign(dim * dim, 0.0);
    for (size_t from = 0; from < dim; ++from) {
        std::vector<double> dist(dim, 0.0);
        dist[from] = 1.0;
        // Odd half: right boundary, then U_{2k-1,2k}.
        apply_boundary(dist, N - 1, N, w.right_K);
        for (int k = 1; 2 * k <= N - 1; ++k) apply_bulk(dist, 2 * k - 2, N, w);
        // Even half: U_{2k,2k+1}, then left boundary.
        for (int k = 1; 2 * k + 1 <= N; ++k) apply_bulk(dist, 2 * k - 1, N, w);
        apply_boundary(dist, 0, N, w.left_K);
        for (size_t to = 0; to < dim; ++to) T.at(from, to) = dist[to];
    }
    return T;
}

double mean_density(const std::vector<double>& dist, int N, int I) {
    double total = 0.0;
    double mass = 0.0;
    for (size_t idx = 0; idx < dist.size(); ++idx) {
        Config c = config_from_index(idx, N, I);
        int s = 0;
        for (int t : c.tau) s += t;
        total += dist[idx] * static_cast<double>(s);
        mass += dist[idx];
    }
    return total / (mass * static_cast<double>(N));
}

EmpiricalRun empirical_run(const DownRightPath& path, const FusedWeights& w, long long steps,
                           long long burn_in, uint64_t seed, size_t state_cap) {
    EmpiricalRun run;
    run.seed = seed;
    if (steps <= 0) {
        run.note = "no post-burn-in steps requested";
        return run;
    }
    const int N = path.width();
    const int I = w.R.I;
    size_t dim = 1;
    bool track_hist = true;
    for (int i = 0; i < N; ++i) {
        dim *= static_cast<size_t>(I + 1);
        if (dim > state_cap) {
            track_hist = false;
            break;
        }
    }
    if (track_hist) run.histogram.assign(dim, 0.0);

    RngStream rng(seed);
    Config c;
    c.tau.assign(static_cast<size_t>(N), 0);
    uint64_t step_no = 0;
    for (long long i = 0; i < burn_in; ++i) c = sample_step(c, path, w, rng, step_no++);
    double density_sum = 0.0;
    for (long long i = 0; i < steps; ++i) {
        c = sample_step(c, path, w, rng, step_no++);
        int s = 0;
        for (int t : c.tau) s += t;
        density_sum += static_cast<double>(s) / static_cast<double>(N);
        if (track_hist) run.histogram[config_index(c, I)] += 1.0;
        run.density_trace.push_back(density_sum / static_cast<double>(i + 1));
    }
    if (track_hist)
        for (double& v : run.histogram) v /= static_cast<double>(steps);
    run.recorded_steps = steps;
    run.ok = true;
    return run;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

}  // namespace fusedstrip
