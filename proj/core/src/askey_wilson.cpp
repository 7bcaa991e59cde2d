#include "fusedstrip/askey_wilson.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "fusedstrip/qseries.hpp"

namespace fusedstrip {

AWParams AWParams::all_real(double a, double b, double c, double d, double q) {
    AWParams p;
    p.q = q;
    p.reals = {a, b, c, d};
    return p;
}

AWParams AWParams::with_pair(double a, double b, double r, double cos_th, double q) {
    AWParams p;
    p.q = q;
    p.reals = {a, b};
    p.pairs.push_back({r, cos_th});
    return p;
}

double AWParams::product_all() const {
    double v = 1.0;
    for (double x : reals) v *= x;
    for (const auto& pr : pairs) v *= pr.r * pr.r;
    return v;
}

void AWParams::validate() const {
    if (slot_count() != 4) throw InvalidParams("AWParams: need exactly four slots");
    if (!(std::abs(q) < 1.0)) throw InvalidParams("AWParams: |q| must be < 1");
    // The pairwise products and abcd, q abcd must avoid [1, inf). Products
    // involving a conjugate pair are real only when both pair members enter,
    // in which case they equal r^2 (modulus squared) times a real factor.
    auto check = [this](double v, const char* what) {
        if (v >= 1.0 || q * v >= 1.0) {
            std::ostringstream os;
            os << "AWParams: product " << what << " = " << v << " lies in [1, inf)";
            throw InvalidParams(os.str());
        }
    };
    for (size_t i = 0; i < reals.size(); ++i)
        for (size_t j = i + 1; j < reals.size(); ++j) check(reals[i] * reals[j], "slot*slot");
    for (const auto& pr : pairs) check(pr.r * pr.r, "pair modulus^2");
    check(product_all(), "abcd");
}

namespace {

// Infinite products shared by the density and the normalizing constant.
double pair_products_with_real(double x, const AWParams::ConjPair& pr, double q) {
    // (x c; q)_inf (x d; q)_inf for the conjugate pair (c, d).
    return q_pochhammer_inf_abs2(x * pr.r, pr.cos_th, q);
}

double density_constant(const AWParams& p) {
    const double q = p.q;
    double num = q_pochhammer_inf(q, q);
    // Pairwise products over the four slots.
    for (size_t i = 0; i < p.reals.size(); ++i)
        for (size_t j = i + 1; j < p.reals.size(); ++j)
            num *= q_pochhammer_inf(p.reals[i] * p.reals[j], q);
    for (const auto& pr : p.pairs) {
        for (double x : p.reals) num *= pair_products_with_real(x, pr, q);
        num *= q_pochhammer_inf(pr.r * pr.r, q);
    }
    double den = 2.0 * M_PI * q_pochhammer_inf(p.product_all(), q);
    return num / den;
}

}  // namespace

double AWMeasure::theta_density(double th) const {
    const AWParams& p = params;
    const double q = p.q;
    double cs = std::cos(th), sn = std::sin(th);
    // |(e^{2 i th}; q)_inf|^2 vanishes like sin^2 at the endpoints, which
    // together with the Jacobian cancels the 1/sqrt(1-y^2) singularity.
    double num = q_pochhammer_inf_abs2(1.0, std::cos(2.0 * th), q);
    double den = 1.0;
    for (double x : p.reals) den *= q_pochhammer_inf_abs2(x, cs, q);
    for (const auto& pr : p.pairs) {
        double sx = std::sqrt(std::max(0.0, 1.0 - pr.cos_th * pr.cos_th));
        double c_plus = cs * pr.cos_th - sn * sx;   // cos(th + th_x)
        double c_minus = cs * pr.cos_th + sn * sx;  // cos(th - th_x)
        den *= q_pochhammer_inf_abs2(pr.r, c_plus, q) * q_pochhammer_inf_abs2(pr.r, c_minus, q);
    }
    double c = norm_const > 0.0 ? norm_const : density_constant(p);
    return c * num / den;
}

double AWMeasure::density(double y) const {
    if (!(y > -1.0 && y < 1.0)) return 0.0;
    double th = std::acos(y);
    return theta_density(th) / std::sin(th);
}

double aw_density(double y, const AWParams& p) {
    AWMeasure m;
    m.params = p;
    return m.density(y);
}

namespace {

// Finite q-Pochhammer (x; q)_j for the atom mass ratios.
double fq(double x, double q, int j) {
    double r = 1.0;
    double xq = x;
    for (int k = 0; k < j; ++k) {
        r *= (1.0 - xq);
        xq *= q;
    }
    return r;
}

// (x c; q)_j (x d; q)_j for the conjugate pair (c, d) = r e^{+-i th}.
double fq_pair(double x, const AWParams::ConjPair& pr, double q, int j) {
    double acc = 1.0;
    double s = x * pr.r;
    for (int k = 0; k < j; ++k) {
        acc *= (1.0 - 2.0 * s * pr.cos_th + s * s);
        s *= q;
    }
    return acc;
}

// Mass of the atoms generated by the real slot `chi` (index into p.reals).
void atom_masses_for(const AWParams& p, size_t chi_idx, std::vector<AWAtom>& out,
                     std::vector<std::string>* warnings) {
    const double q = p.q;
    const double a = p.reals[chi_idx];
    std::vector<double> others;
    for (size_t i = 0; i < p.reals.size(); ++i)
        if (i != chi_idx) others.push_back(p.reals[i]);

    // p(y_0) = (a^{-2}, bc, bd, cd; q)_inf / (b/a, c/a, d/a, abcd; q)_inf
    double num = q_pochhammer_inf(1.0 / (a * a), q);
    for (size_t i = 0; i < others.size(); ++i)
        for (size_t j = i + 1; j < others.size(); ++j)
            num *= q_pochhammer_inf(others[i] * others[j], q);
    for (const auto& pr : p.pairs) {
        for (double x : others) num *= pair_products_with_real(x, pr, q);
        num *= q_pochhammer_inf(pr.r * pr.r, q);
    }
    double den = q_pochhammer_inf(p.product_all(), q);
    for (double x : others) den *= q_pochhammer_inf(x / a, q);
    for (const auto& pr : p.pairs) den *= q_pochhammer_inf_abs2(pr.r / a, pr.cos_th, q);
    double p0 = num / den;

    double abcd = p.product_all();
    int j = 0;
    double chi_qj = a;
    while (std::abs(chi_qj) > 1.0) {
        if (warnings && std::abs(std::abs(chi_qj) - 1.0) < 1e-12)
            warnings->push_back("atom generator within 1e-12 of the unit circle");
        AWAtom atom;
        atom.y = 0.5 * (chi_qj + 1.0 / chi_qj);
        if (j == 0) {
            atom.mass = p0;
        } else {
            // p(y_j) = p(y_0) (a^2, ab, ac, ad; q)_j (1 - a^2 q^{2j})
            //          / ((q, qa/b, qa/c, qa/d; q)_j (1 - a^2)) (q/abcd)^j.
            double rn = fq(a * a, q, j) * (1.0 - a * a * std::pow(q, 2.0 * j));
            for (double x : others) rn *= fq(a * x, q, j);
            for (const auto& pr : p.pairs) rn *= fq_pair(a, pr, q, j);
            double rd = fq(q, q, j) * (1.0 - a * a);
            for (double x : others) rd *= fq(q * a / x, q, j);
            for (const auto& pr : p.pairs) {
                // (qa/c; q)_j (qa/d; q)_j with (c, d) = r e^{+-i th}:
                // modulus qa/r, same cosine.
                AWParams::ConjPair inv{1.0 / pr.r, pr.cos_th};
                rd *= fq_pair(q * a, inv, q, j);
            }
            atom.mass = p0 * rn / rd * std::pow(q / abcd, static_cast<double>(j));
        }
        out.push_back(atom);
        chi_qj *= q;
        ++j;
    }
}

}  // namespace

std::vector<AWAtom> aw_atoms(const AWParams& p, std::vector<std::string>* warnings) {
    std::vector<AWAtom> atoms;
    for (size_t i = 0; i < p.reals.size(); ++i)
        if (std::abs(p.reals[i]) > 1.0) atom_masses_for(p, i, atoms, warnings);
    return atoms;
}

AWMeasure aw_measure(const AWParams& p) {
    p.validate();
    AWMeasure m;
    m.params = p;
    m.atoms = aw_atoms(p, &m.warnings);
    m.norm_const = density_constant(p);
    return m;
}

AWMeasure marginal(double t, const ABCDParams& abcd) {
    if (!(t > 0.0)) throw InvalidParams("marginal: t must be positive");
    double lo = std::max({0.0, abcd.C * abcd.D, abcd.q * abcd.C * abcd.D});
    double hi_den = std::max({0.0, abcd.A * abcd.B, abcd.q * abcd.A * abcd.B});
    double hi = hi_den > 0.0 ? 1.0 / hi_den : std::numeric_limits<double>::infinity();
    if (!(t >= lo && t < hi)) throw InvalidParams("marginal: t outside the process interval");
    double st = std::sqrt(t);
    return aw_measure(AWParams::all_real(abcd.A * st, abcd.B * st, abcd.C / st, abcd.D / st,
                                         abcd.q));
}

AWMeasure transition(double s, double t, double x, const ABCDParams& abcd) {
    if (!(s < t)) throw InvalidParams("transition: need s < t");
    double st = std::sqrt(t);
    double r = std::sqrt(s / t);
    if (x > -1.0 && x < 1.0) {
        return aw_measure(AWParams::with_pair(abcd.A * st, abcd.B * st, r, x, abcd.q));
    }
    // Degenerate pair for |x| >= 1: real slots r(x +- sqrt(x^2 - 1)).
    double root = std::sqrt(std::max(x * x - 1.0, 0.0));
    return aw_measure(
        AWParams::all_real(abcd.A * st, abcd.B * st, r * (x + root), r * (x - root), abcd.q));
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mx;
    {
        std::lock_guard<std::mutex> lock(mx);
        auto it = cache.find(n);
        if (it != cache.end()) {
            nodes = it->second.first;
            weights = it->second.second;
            return;
        }
    }
    nodes.assign(static_cast<size_t>(n), 0.0);
    weights.assign(static_cast<size_t>(n), 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double z1, pp;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::abs(z - z1) > 1e-15);
        nodes[static_cast<size_t>(i)] = -z;
        nodes[static_cast<size_t>(n - 1 - i)] = z;
        weights[static_cast<size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[static_cast<size_t>(n - 1 - i)] = weights[static_cast<size_t>(i)];
    }
    std::lock_guard<std::mutex> lock(mx);
    cache[n] = {nodes, weights};
}

namespace {

double quad_expect_once(const AWMeasure& m, const std::function<double(double)>& f, int n) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    // theta = pi (u + 1) / 2 over u in [-1, 1].
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double th = M_PI * 0.5 * (x[static_cast<size_t>(i)] + 1.0);
        acc += w[static_cast<size_t>(i)] * m.theta_density(th) * f(std::cos(th));
    }
    acc *= M_PI * 0.5;
    for (const auto& a : m.atoms) acc += a.mass * f(a.y);
    return acc;
}

}  // namespace

double expect(const AWMeasure& m, const std::function<double(double)>& f, int nodes,
              double rel_tol, int max_nodes) {
    double prev = quad_expect_once(m, f, nodes);
    for (int n = 2 * nodes; n <= max_nodes; n *= 2) {
        double cur = quad_expect_once(m, f, n);
        if (std::abs(cur - prev) <= rel_tol * std::max({std::abs(cur), std::abs(prev), 1e-30}))
            return cur;
        prev = cur;
    }
    throw NonConvergence("expect: quadrature did not stabilize under node doubling");
}

double total_mass(const AWMeasure& m) {
    return expect(m, [](double) { return 1.0; });
}

double h_factor(double t, double y, double kappa, double q, int I, bool up) {
    double st = std::sqrt(t);
    double k = up ? kappa : 1.0 / kappa;
    double prod = 1.0;
    for (int a = 1; a <= I; ++a) {
        double qpow = std::pow(q, (I + 1) / 2.0 - a);
        prod *= 2.0 * st * y + t * qpow * k + 1.0 / (qpow * k);
    }
    return prod;
}

double log_h_factor(double t, double y, double kappa, double q, int I, bool up) {
    double st = std::sqrt(t);
    double k = up ? kappa : 1.0 / kappa;
    double acc = 0.0;
    for (int a = 1; a <= I; ++a) {
        double qpow = std::pow(q, (I + 1) / 2.0 - a);
        double v = 2.0 * st * y + t * qpow * k + 1.0 / (qpow * k);
        if (!(v > 0.0))
            throw NegativeIntegrand("log_h_factor: nonpositive factor on the support");
        acc += std::log(v);
    }
    return acc;
}

namespace {

struct TimeGroup {
    double t;
    int n_up = 0;
    int n_right = 0;
};

std::vector<TimeGroup> group_times(const std::vector<Arrow>& labels,
                                   const std::vector<double>& times) {
    if (labels.size() != times.size())
        throw InvalidParams("gen_fun_aw: labels/times length mismatch");
    std::map<double, TimeGroup> by_t;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (!(times[i] > 0.0)) throw InvalidParams("gen_fun_aw: times must be positive");
        auto& g = by_t[times[i]];
        g.t = times[i];
        if (labels[i] == Arrow::Up)
            ++g.n_up;
        else
            ++g.n_right;
    }
    std::vector<TimeGroup> groups;
    for (auto& [t, g] : by_t) groups.push_back(g);
    return groups;
}

void require_atom_free(const AWMeasure& m, const char* what) {
    if (!m.atoms.empty())
        throw InvalidParams(std::string("gen_fun_aw: ") + what +
                            " carries atoms; multi-time atom bookkeeping is unsupported");
}

double nested_numerator(const std::vector<TimeGroup>& groups, const ABCDParams& abcd,
                        double kappa, double q, int I, int n) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    std::vector<double> th(static_cast<size_t>(n)), yv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        th[static_cast<size_t>(i)] = M_PI * 0.5 * (x[static_cast<size_t>(i)] + 1.0);
        yv[static_cast<size_t>(i)] = std::cos(th[static_cast<size_t>(i)]);
    }

    const size_t L = groups.size();
    // Backward sweep: v_k(x) = int P_{t_k, t_{k+1}}(x, dy) g_{k+1}(y) v_{k+1}(y).
    std::vector<double> v(static_cast<size_t>(n), 1.0);
    for (size_t k = L; k-- > 1;) {
        const TimeGroup& g = groups[k];
        std::vector<double> nv(static_cast<size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {  // previous-time node x_i
            AWMeasure tr = transition(groups[k - 1].t, g.t, yv[static_cast<size_t>(i)], abcd);
            require_atom_free(tr, "a transition kernel");
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                double y = yv[static_cast<size_t>(j)];
                double gy = std::pow(h_factor(g.t, y, kappa, q, I, true), g.n_up) *
                            std::pow(h_factor(g.t, y, kappa, q, I, false), g.n_right);
                acc += w[static_cast<size_t>(j)] * tr.theta_density(th[static_cast<size_t>(j)]) *
                       gy * v[static_cast<size_t>(j)];
            }
            nv[static_cast<size_t>(i)] = acc * M_PI * 0.5;
        }
        v.swap(nv);
    }
    AWMeasure base = marginal(groups[0].t, abcd);
    require_atom_free(base, "the first marginal");
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double y = yv[static_cast<size_t>(i)];
        double gy = std::pow(h_factor(groups[0].t, y, kappa, q, I, true), groups[0].n_up) *
                    std::pow(h_factor(groups[0].t, y, kappa, q, I, false), groups[0].n_right);
        total += w[static_cast<size_t>(i)] * base.theta_density(th[static_cast<size_t>(i)]) * gy *
                 v[static_cast<size_t>(i)];
    }
    return total * M_PI * 0.5;
}

}  // namespace

double gen_fun_aw(const std::vector<Arrow>& labels, const ABCDParams& abcd, double kappa, int I,
                  const std::vector<double>& times) {
    if (!abcd.fan_region()) throw InvalidParams("gen_fun_aw: needs AC < 1");
    const int N = static_cast<int>(labels.size());
    auto groups = group_times(labels, times);
    const double q = abcd.q;

    double numerator;
    if (groups.size() == 1) {
        const TimeGroup& g = groups[0];
        AWMeasure m = marginal(g.t, abcd);
        numerator = expect(m, [&](double y) {
            return std::pow(h_factor(g.t, y, kappa, q, I, true), g.n_up) *
                   std::pow(h_factor(g.t, y, kappa, q, I, false), g.n_right);
        });
    } else {
        if (groups.size() > 3)
            throw TooManyTimes("gen_fun_aw: more than three distinct times unsupported");
        double prev = nested_numerator(groups, abcd, kappa, q, I, 200);
        double cur = nested_numerator(groups, abcd, kappa, q, I, 400);
        if (std::abs(cur - prev) > 1e-7 * std::max({std::abs(cur), std::abs(prev), 1e-30})) {
            prev = cur;
            cur = nested_numerator(groups, abcd, kappa, q, I, 800);
            if (std::abs(cur - prev) > 1e-7 * std::max({std::abs(cur), std::abs(prev), 1e-30}))
                throw NonConvergence("gen_fun_aw: nested quadrature did not stabilize");
        }
        numerator = cur;
    }

    AWMeasure m1 = marginal(1.0, abcd);
    double denominator = expect(
        m1, [&](double y) { return std::pow(h_factor(1.0, y, kappa, q, I, true), N); });
    return numerator / denominator;
}

namespace {

double logsumexp(const std::vector<double>& terms) {
    double m = -std::numeric_limits<double>::infinity();
    for (double t : terms) m = std::max(m, t);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

double log_partition_once(int N, int n_up, double t, const PhasePoint& pp, int n) {
    AWMeasure m = marginal(t, pp.abcd);
    const double q = pp.abcd.q;
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    std::vector<double> terms;
    terms.reserve(static_cast<size_t>(n) + m.atoms.size());
    for (int i = 0; i < n; ++i) {
        double th = M_PI * 0.5 * (x[static_cast<size_t>(i)] + 1.0);
        double y = std::cos(th);
        double g = m.theta_density(th) * w[static_cast<size_t>(i)] * M_PI * 0.5;
        if (g <= 0.0) continue;
        terms.push_back(std::log(g) + n_up * log_h_factor(t, y, pp.kappa, q, pp.I, true) +
                        (N - n_up) * log_h_factor(t, y, pp.kappa, q, pp.I, false));
    }
    for (const auto& a : m.atoms) {
        if (a.mass <= 0.0) continue;
        terms.push_back(std::log(a.mass) +
                        n_up * log_h_factor(t, a.y, pp.kappa, q, pp.I, true) +
                        (N - n_up) * log_h_factor(t, a.y, pp.kappa, q, pp.I, false));
    }
    return logsumexp(terms);
}

}  // namespace

double log_partition(int N, int n_up, double t, const PhasePoint& pp) {
    if (N < 1 || n_up < 0 || n_up > N) throw InvalidParams("log_partition: need 0 <= n_up <= N");
    if (!pp.abcd.fan_region()) throw InvalidParams("log_partition: needs AC < 1");
    double prev = log_partition_once(N, n_up, t, pp, 400);
    for (int n = 800; n <= 25600; n *= 2) {
        double cur = log_partition_once(N, n_up, t, pp, n);
        if (std::abs(cur - prev) <= 1e-9 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    throw NonConvergence("log_partition: node doubling did not stabilize");
}

double mean_density_finite(int N, int n_up, const PhasePoint& pp) {
    auto d_at = [&](double h) {
        double up = log_partition(N, n_up, 1.0 + h, pp);
        double dn = log_partition(N, n_up, 1.0 - h, pp);
        return (up - dn) / (2.0 * h);
    };
    double d1 = d_at(1e-4);
    double d2 = d_at(5e-5);
    double richardson = (4.0 * d2 - d1) / 3.0;
    return richardson / static_cast<double>(N);
}

Phase classify_phase(const ABCDParams& abcd, double tol) {
    if (!abcd.fan_region()) throw InvalidParams("classify_phase: needs AC < 1");
    if (std::abs(abcd.A - 1.0) < tol || std::abs(abcd.C - 1.0) < tol) return Phase::Boundary;
    if (abcd.A > 1.0) return Phase::HighDensity;
    if (abcd.C > 1.0) return Phase::LowDensity;
    return Phase::MaximalCurrent;
}

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::MaximalCurrent:
            return "MC";
        case Phase::HighDensity:
            return "HD";
        case Phase::LowDensity:
            return "LD";
        case Phase::Boundary:
            return "boundary";
    }
    return "?";
}

double G_limit(double x, const PhasePoint& pp) {
    Phase ph = classify_phase(pp.abcd);
    if (ph == Phase::Boundary)
        throw PhaseBoundary("G_limit: A or C within tolerance of the phase boundary");
    const double q = pp.abcd.q;
    double s = 0.0;
    for (int a = 1; a <= pp.I; ++a) {
        double qpow = std::pow(q, -(pp.I + 1) / 2.0 + a);
        switch (ph) {
            case Phase::MaximalCurrent:
                s += x / (x + qpow);
                break;
            case Phase::HighDensity:
                s += pp.abcd.A * x / (pp.abcd.A * x + qpow);
                break;
            case Phase::LowDensity:
                s += x / (x + pp.abcd.C * qpow);
                break;
            case Phase::Boundary:
                break;
        }
    }
    return s;
}

double density_limit(const PhasePoint& pp) {
    return pp.lambda * G_limit(pp.kappa, pp) + (1.0 - pp.lambda) * G_limit(1.0 / pp.kappa, pp);
}

std::vector<double> aw_stationary_distribution(const std::vector<Arrow>& labels,
                                               const ABCDParams& abcd, double kappa, int I) {
    const int N = static_cast<int>(labels.size());
    if (N > 3)
        throw TooManyTimes("aw_stationary_distribution: N > 3 needs more than three times");
    size_t dim = 1;
    for (int i = 0; i < N; ++i) dim *= static_cast<size_t>(I + 1);

    // The generating-function identity requires times sorted along the path,
    // so probe the polynomial E[prod t_i^{tau_i}] on strictly increasing time
    // tuples in general position and solve the dense linear system for mu.
    std::vector<double> A(dim * dim, 0.0), b(dim, 0.0);
    std::vector<int> grid(static_cast<size_t>(N), 0);
    const double base = 0.6, gap = 0.1, step = 0.25;
    for (size_t g = 0; g < dim; ++g) {
        size_t rem = g;
        for (int i = N - 1; i >= 0; --i) {
            grid[static_cast<size_t>(i)] = static_cast<int>(rem % static_cast<size_t>(I + 1));
            rem /= static_cast<size_t>(I + 1);
        }
        std::vector<double> times(static_cast<size_t>(N));
        double t = base;
        for (int i = 0; i < N; ++i) {
            t += (i == 0 ? 0.0 : gap) + step * grid[static_cast<size_t>(i)];
            times[static_cast<size_t>(i)] = t;
        }
        b[g] = gen_fun_aw(labels, abcd, kappa, I, times);
        for (size_t tau = 0; tau < dim; ++tau) {
            Config c = config_from_index(tau, N, I);
            double coef = 1.0;
            for (int i = 0; i < N; ++i)
                coef *= std::pow(times[static_cast<size_t>(i)], c.tau[static_cast<size_t>(i)]);
            A[g * dim + tau] = coef;
        }
    }

    // Gaussian elimination with partial pivoting.
    std::vector<double> mu(dim, 0.0);
    for (size_t col = 0; col < dim; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < dim; ++r)
            if (std::abs(A[r * dim + col]) > std::abs(A[piv * dim + col])) piv = r;
        if (std::abs(A[piv * dim + col]) < 1e-300)
            throw NonConvergence("aw_stationary_distribution: singular probe system");
        if (piv != col) {
            for (size_t j = 0; j < dim; ++j) std::swap(A[piv * dim + j], A[col * dim + j]);
            std::swap(b[piv], b[col]);
        }
        for (size_t r = col + 1; r < dim; ++r) {
            double f = A[r * dim + col] / A[col * dim + col];
            if (f == 0.0) continue;
            for (size_t j = col; j < dim; ++j) A[r * dim + j] -= f * A[col * dim + j];
            b[r] -= f * b[col];
        }
    }
    for (size_t i = dim; i-- > 0;) {
        double s = b[i];
        for (size_t j = i + 1; j < dim; ++j) s -= A[i * dim + j] * mu[j];
        mu[i] = s / A[i * dim + i];
    }
    double sum = 0.0;
    for (double v : mu) sum += v;
    for (double& v : mu) v /= sum;
    return mu;
}

}  // namespace fusedstrip
