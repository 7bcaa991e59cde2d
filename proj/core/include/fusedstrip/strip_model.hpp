#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fusedstrip/errors.hpp"
#include "fusedstrip/rng.hpp"
#include "fusedstrip/vertex_weights.hpp"

namespace fusedstrip {

enum class Step : uint8_t { Down, Right };

// Outgoing edge labels along a down-right path: a Down step emits a
// horizontal (->) edge at its top vertex, a Right step emits a vertical (^)
// edge at its right vertex.
enum class Arrow : uint8_t { Up, Horizontal };

struct Vertex {
    long long x = 0;
    long long y = 0;
    friend bool operator==(const Vertex& a, const Vertex& b) { return a.x == b.x && a.y == b.y; }
};

// Down-right path across the strip {0 <= y <= x <= y+N}, anchored at its
// starting left-boundary vertex (anchor, anchor). Any step sequence is valid;
// translation by (k,k) changes only the anchor.
struct DownRightPath {
    std::vector<Step> steps;
    long long anchor = 0;

    int width() const { return static_cast<int>(steps.size()); }

    DownRightPath translated(long long k) const {
        DownRightPath p = *this;
        p.anchor += k;
        return p;
    }

    std::vector<Vertex> vertices() const {
        std::vector<Vertex> v;
        v.reserve(steps.size() + 1);
        Vertex cur{anchor, anchor};
        v.push_back(cur);
        for (Step s : steps) {
            if (s == Step::Down)
                --cur.y;
            else
                ++cur.x;
            v.push_back(cur);
        }
        return v;
    }

    static DownRightPath zigzag(int N, long long anchor = 0);      // starts with a Down step
    static DownRightPath horizontal(int N, long long anchor = 0);  // all Right steps
    static DownRightPath from_bits(const std::string& bits, long long anchor = 0);
};

std::vector<Arrow> outgoing_labels(const DownRightPath& path);

// Number of horizontal outgoing edges (= number of Down steps).
int horizontal_count(const DownRightPath& path);

// Number of vertical outgoing edges (= number of Right steps = number of
// horizontal edges of the path itself).
int up_count(const DownRightPath& path);

enum class VertexKind : uint8_t { Bulk, LeftBoundary, RightBoundary };

struct ScheduledVertex {
    Vertex v;
    VertexKind kind = VertexKind::Bulk;
};

// Vertices of U(P,Q) (strictly above P, weakly below Q), sorted by row then
// column — the order in which the model samples them. Throws PathOrder if Q
// does not sit weakly above P.
std::vector<ScheduledVertex> update_schedule(const DownRightPath& P, const DownRightPath& Q);

// Occupation configuration on the N outgoing edges, entries in [[0, I]].
struct Config {
    std::vector<int> tau;
    int size() const { return static_cast<int>(tau.size()); }
};

struct TransitionMatrix {
    int N = 0;
    int I = 0;
    size_t dim = 0;
    std::vector<double> m;  // row-stochastic, row = from-state

    double& at(size_t r, size_t c) { return m[r * dim + c]; }
    double at(size_t r, size_t c) const { return m[r * dim + c]; }
};

constexpr size_t kDefaultStateCap = 4096;

// State index: tau -> sum tau_i (I+1)^{N-i}, slot 1 most significant.
size_t config_index(const Config& c, int I);
Config config_from_index(size_t idx, int N, int I);

// Exact one-step matrix P_{P, Y_1 P} by composing the single-vertex kernels
// over the update schedule.
TransitionMatrix step_transition_matrix(const DownRightPath& path, const FusedWeights& w,
                                        size_t state_cap = kDefaultStateCap);

// General P_{P,Q} for Q weakly above P (used by the local-move stationarity
// tests).
TransitionMatrix transition_matrix(const DownRightPath& P, const DownRightPath& Q,
                                   const FusedWeights& w, size_t state_cap = kDefaultStateCap);

// One stochastic sweep P -> Y_1 P by sequential vertex sampling; deterministic
// given the stream and step number.
Config sample_step(const Config& c, const DownRightPath& path, const FusedWeights& w,
                   const RngStream& rng, uint64_t step_no);

// Unique stationary probability vector of a row-stochastic irreducible matrix.
std::vector<double> stationary_exact(const TransitionMatrix& T, double residual_tol = 1e-13,
                                     uint64_t max_iters = 1000000);

// Two-step Floquet transfer matrix U^e U^o for odd N; equals the schedule
// composition on the zig-zag path started with a vertical edge.
TransitionMatrix floquet_transfer(const FusedWeights& w, int N,
                                  size_t state_cap = kDefaultStateCap);

double mean_density(const std::vector<double>& dist, int N, int I);

struct EmpiricalRun {
    bool ok = false;
    std::string note;
    uint64_t seed = 0;
    long long recorded_steps = 0;
    std::vector<double> histogram;      // present when (I+1)^N within cap
    std::vector<double> density_trace;  // running mean arrow density
};

EmpiricalRun empirical_run(const DownRightPath& path, const FusedWeights& w, long long steps,
                           long long burn_in, uint64_t seed,
                           size_t state_cap = kDefaultStateCap);

double total_variation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace fusedstrip
