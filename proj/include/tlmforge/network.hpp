#pragma once

// Brute-force discrete realization of the coupled two-rail resistance
// networks: a semiconductor rail spanning the whole structure, a metal rail
// wherever the region map places metal, and vertical contact resistors
// wherever metal covers the semiconductor. Built from a region map, solved
// by nodal analysis with a banded symmetric factorization, and interrogated
// for terminal resistance and per-cross-section rail currents. This is the
// independent oracle every closed form is checked against.
//
// Discretization: uniform grid of n_segments cells of width dx. Horizontal
// resistances r = R_sh*dx/W per cell; vertical coupling is lumped at grid
// nodes with half-cell weights at coverage edges, i.e. conductance
// W*w_i/rho_c with w_i the covered length adjacent to node i. Interval and
// cut positions are snapped to the nearest grid line. Zero-width partitions
// are realized as a one-cell removal of the metal rail; the removed cell
// carries no vertical coupling, so the limit is insensitive to dx.
//
// Width is factored out of the assembled system (conductances are stamped
// per unit width and the terminal resistance divided by W afterwards), so
// scaling W scales the resistance exactly.
//
// rho_c limits: rho_c = 0 is clamped to a tiny floor (the rails merge into
// a short); rho_c above `decouple_rho_threshold` is treated as a fully open
// interface (no vertical resistors), which makes partitioned maps
// legitimately unsolvable.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "tlmforge/core.hpp"

namespace tlmforge {

inline constexpr double rho_c_floor = 1e-30;           // ohm·m^2, short limit
inline constexpr double decouple_rho_threshold = 1e10;  // ohm·m^2, open limit

enum class Rail { metal, semiconductor };

// ---------------------------------------------------------------------------
// Banded SPD solver
// ---------------------------------------------------------------------------

namespace banded {

/// Symmetric positive-definite matrix in lower-band storage:
/// entry(d, j) holds A(j+d, j) for 0 <= d <= half_bandwidth.
class SpdMatrix {
public:
    SpdMatrix(int n, int half_bandwidth)
        : n_(n), hb_(half_bandwidth), a_((half_bandwidth + 1) * n, 0.0) {}

    int size() const { return n_; }
    int half_bandwidth() const { return hb_; }

    double& entry(int d, int j) { return a_[static_cast<size_t>(d) * n_ + j]; }
    double entry(int d, int j) const { return a_[static_cast<size_t>(d) * n_ + j]; }

    /// Stamp a conductance between nodes i and j (i == -1 means ground).
    void stamp(int i, int j, double g) {
        if (i >= 0) entry(0, i) += g;
        if (j >= 0) entry(0, j) += g;
        if (i >= 0 && j >= 0) {
            int lo = std::min(i, j), hi = std::max(i, j);
            entry(hi - lo, lo) -= g;
        }
    }

    std::vector<double> multiply(const std::vector<double>& x) const {
        std::vector<double> y(n_, 0.0);
        for (int j = 0; j < n_; ++j) {
            y[j] += entry(0, j) * x[j];
            for (int d = 1; d <= hb_ && j + d < n_; ++d) {
                const double v = entry(d, j);
                y[j + d] += v * x[j];
                y[j] += v * x[j + d];
            }
        }
        return y;
    }

private:
    int n_, hb_;
    std::vector<double> a_;
};

/// Cholesky factor in the same band layout. Throws unsolvable_topology on a
/// non-positive pivot (singular or indefinite system).
class CholeskyFactor {
public:
    explicit CholeskyFactor(const SpdMatrix& m)
        : n_(m.size()), hb_(m.half_bandwidth()), l_(m) {
        for (int j = 0; j < n_; ++j) {
            const int kmin = std::max(0, j - hb_);
            double diag = l_.entry(0, j);
            for (int k = kmin; k < j; ++k) {
                const double v = l_.entry(j - k, k);
                diag -= v * v;
            }
            if (!(diag > 0.0) || !std::isfinite(diag))
                throw unsolvable_topology(
                    "nodal system is singular (no conducting path between terminals)");
            const double piv = std::sqrt(diag);
            l_.entry(0, j) = piv;
            for (int d = 1; d <= hb_ && j + d < n_; ++d) {
                const int i = j + d;
                double v = l_.entry(d, j);
                for (int k = std::max(kmin, i - hb_); k < j; ++k)
                    v -= l_.entry(i - k, k) * l_.entry(j - k, k);
                l_.entry(d, j) = v / piv;
            }
        }
    }

    std::vector<double> solve(std::vector<double> b) const {
        for (int j = 0; j < n_; ++j) {  // L y = b
            double v = b[j];
            for (int k = std::max(0, j - hb_); k < j; ++k)
                v -= l_.entry(j - k, k) * b[k];
            b[j] = v / l_.entry(0, j);
        }
        for (int j = n_ - 1; j >= 0; --j) {  // L^T x = y
            double v = b[j];
            for (int d = 1; d <= hb_ && j + d < n_; ++d)
                v -= l_.entry(d, j) * b[j + d];
            b[j] = v / l_.entry(0, j);
        }
        return b;
    }

private:
    int n_, hb_;
    SpdMatrix l_;
};

/// Factor, solve, and apply one step of iterative refinement.
inline std::vector<double> solve_refined(const SpdMatrix& a, const std::vector<double>& b,
                                         double* residual_inf = nullptr) {
    CholeskyFactor f(a);
    std::vector<double> x = f.solve(b);
    std::vector<double> ax = a.multiply(x);
    std::vector<double> r(b.size());
    for (size_t i = 0; i < b.size(); ++i) r[i] = b[i] - ax[i];
    std::vector<double> dx = f.solve(r);
    for (size_t i = 0; i < b.size(); ++i) x[i] += dx[i];
    if (residual_inf) {
        ax = a.multiply(x);
        double m = 0.0;
        for (size_t i = 0; i < b.size(); ++i) m = std::max(m, std::abs(b[i] - ax[i]));
        *residual_inf = m;
    }
    return x;
}

} // namespace banded

// ---------------------------------------------------------------------------
// Region map
// ---------------------------------------------------------------------------

/// Structural description of a test or calibration configuration: where the
/// metal rail exists over [0, total_length], where it is severed by
/// zero-width partitions, and which rail each terminal attaches to.
struct RegionMap {
    double total_length = 0.0;
    std::vector<std::pair<double, double>> metal;  // sorted disjoint [a, b)
    std::vector<double> cuts;                      // zero-width rail breaks
    Rail left_terminal = Rail::metal;
    Rail right_terminal = Rail::metal;

    /// Full-coverage calibration structure: metal over 2*l_c + l_0.
    static RegionMap no_spacer(double l_c, double l_0) {
        RegionMap m;
        m.total_length = 2.0 * l_c + l_0;
        m.metal = {{0.0, m.total_length}};
        m.validate();
        return m;
    }

    /// Full coverage with zero-width partitions at both ends of the gap
    /// region (the theoretical structure the total-resistance line hits at
    /// full ladder coverage).
    static RegionMap partitioned(double l_c, double l_0) {
        RegionMap m = no_spacer(l_c, l_0);
        m.cuts = {l_c, l_c + l_0};
        m.validate();
        return m;
    }

    /// Two-pad spacer structure: metal on [0, l_c) and [l_c + l_s, 2 l_c + l_s).
    static RegionMap rtlm_spacer(double l_c, double l_s) {
        RegionMap m;
        m.total_length = 2.0 * l_c + l_s;
        if (l_s > 0.0)
            m.metal = {{0.0, l_c}, {l_c + l_s, m.total_length}};
        else {
            m.metal = {{0.0, m.total_length}};
            m.cuts = {l_c};
        }
        m.validate();
        return m;
    }

    /// Ladder test structure: electrodes of length l_c, bare per-side
    /// sections, and a metal-covered ladder region centered in the gap.
    /// Degenerates to `partitioned` when the ladder fills the gap.
    static RegionMap ladder(double l_c, const LtlmGeometry& g) {
        if (g.l_s <= 0.0) return partitioned(l_c, g.l_0);
        RegionMap m;
        m.total_length = 2.0 * l_c + g.l_0;
        m.metal = {{0.0, l_c},
                   {l_c + g.l_s, l_c + g.l_s + g.l_g},
                   {l_c + g.l_0, m.total_length}};
        if (g.l_g <= 0.0) m.metal.erase(m.metal.begin() + 1);
        m.validate();
        return m;
    }

    RegionMap mirrored() const {
        RegionMap m;
        m.total_length = total_length;
        for (auto it = metal.rbegin(); it != metal.rend(); ++it)
            m.metal.push_back({total_length - it->second, total_length - it->first});
        for (auto it = cuts.rbegin(); it != cuts.rend(); ++it)
            m.cuts.push_back(total_length - *it);
        m.left_terminal = right_terminal;
        m.right_terminal = left_terminal;
        m.validate();
        return m;
    }

    void validate() const {
        if (!(total_length > 0.0))
            throw std::invalid_argument("RegionMap: total_length must be > 0");
        double prev = 0.0;
        bool first = true;
        for (const auto& [a, b] : metal) {
            if (!(a >= 0.0) || !(b > a) || b > total_length * (1.0 + 1e-12))
                throw std::invalid_argument("RegionMap: malformed metal interval");
            if (!first && a < prev)
                throw std::invalid_argument("RegionMap: metal intervals must be sorted and disjoint");
            prev = b;
            first = false;
        }
        for (double c : cuts)
            if (!(c > 0.0) || !(c < total_length))
                throw std::invalid_argument("RegionMap: cut outside structure");
        if (left_terminal == Rail::metal &&
            (metal.empty() || metal.front().first > 1e-12 * total_length))
            throw std::invalid_argument("RegionMap: left terminal rail absent at x = 0");
        if (right_terminal == Rail::metal &&
            (metal.empty() || metal.back().second < total_length * (1.0 - 1e-12)))
            throw std::invalid_argument("RegionMap: right terminal rail absent at x = L");
    }
};

// ---------------------------------------------------------------------------
// Discrete network
// ---------------------------------------------------------------------------

/// Uniform-grid ladder network derived from a stack and a region map.
/// Nodes are interleaved per grid line (semiconductor first, then metal
/// where present), which keeps the half-bandwidth at 2.
struct DiscreteNetwork {
    int n_segments = 0;
    double dx = 0.0;
    double width = 0.0;
    double g_semi = 0.0;   // per-cell horizontal conductance, per unit width
    double g_metal = 0.0;
    std::vector<uint8_t> cell_metal;   // metal rail segment present in cell k
    std::vector<uint8_t> cell_coupled; // vertical coupling active in cell k
    std::vector<int> semi_node;        // grid line -> matrix index
    std::vector<int> metal_node;       // grid line -> matrix index or -1
    std::vector<double> g_vert;        // per grid line, per unit width (0 = none)
    int n_nodes = 0;
    int left_term = -1, right_term = -1;
};

inline DiscreteNetwork build_network(const SheetStack& stack, const RegionMap& map,
                                     int n_segments, guard_sink* sink = nullptr) {
    map.validate();
    if (n_segments < 100)
        throw std::invalid_argument("build_network: n_segments must be >= 100");

    DiscreteNetwork net;
    net.n_segments = n_segments;
    net.dx = map.total_length / n_segments;
    net.width = stack.width;
    net.g_semi = net.dx > 0.0 ? 1.0 / (stack.r_shs * net.dx) : 0.0;
    net.g_metal = net.dx > 0.0 ? 1.0 / (stack.r_shm * net.dx) : 0.0;

    const double lt = transfer_length(stack).meters;
    if (lt > 0.0 && net.dx > lt / 5.0)
        warn(sink, "grid too coarse to resolve the transfer length (dx > L_t/5)",
             net.dx / lt);

    const int n = n_segments;
    auto snap = [&](double x) {
        int i = static_cast<int>(std::llround(x / net.dx));
        return std::clamp(i, 0, n);
    };

    net.cell_metal.assign(n, 0);
    for (const auto& [a, b] : map.metal) {
        const int ia = snap(a), ib = snap(b);
        for (int k = ia; k < ib; ++k) net.cell_metal[k] = 1;
    }
    for (double c : map.cuts) {
        const int k = std::min(n - 1, snap(c));
        net.cell_metal[k] = 0;
    }
    // Coupling follows the (possibly cut) metal rail: a removed cell has no
    // metal above the semiconductor at all.
    net.cell_coupled = net.cell_metal;

    const bool decoupled = stack.rho_c >= decouple_rho_threshold;
    const double rho_eff = std::max(stack.rho_c, rho_c_floor);

    net.semi_node.assign(n + 1, -1);
    net.metal_node.assign(n + 1, -1);
    net.g_vert.assign(n + 1, 0.0);
    int idx = 0;
    for (int i = 0; i <= n; ++i) {
        net.semi_node[i] = idx++;
        const bool ml = i > 0 && net.cell_metal[i - 1];
        const bool mr = i < n && net.cell_metal[i];
        if (ml || mr) {
            net.metal_node[i] = idx++;
            if (!decoupled) {
                double w = 0.0;
                if (i > 0 && net.cell_coupled[i - 1]) w += net.dx / 2.0;
                if (i < n && net.cell_coupled[i]) w += net.dx / 2.0;
                net.g_vert[i] = w / rho_eff;
            }
        }
    }
    net.n_nodes = idx;

    auto terminal = [&](Rail rail, int line) {
        if (rail == Rail::semiconductor) return net.semi_node[line];
        if (net.metal_node[line] < 0)
            throw unsolvable_topology("terminal rail absent at structure end");
        return net.metal_node[line];
    };
    net.left_term = terminal(map.left_terminal, 0);
    net.right_term = terminal(map.right_terminal, n);
    return net;
}

// ---------------------------------------------------------------------------
// Solve
// ---------------------------------------------------------------------------

/// Solved network state for a given injected current: terminal resistance,
/// node potentials, per-cell rail currents, and the worst nodal current
/// residual (relative to the injected current).
struct OracleSolution {
    double resistance = 0.0;
    double injected = 1.0;
    double dx = 0.0;
    int n_segments = 0;
    std::vector<double> v_semi;    // per grid line
    std::vector<double> v_metal;   // per grid line, NaN where rail absent
    std::vector<double> i_metal;   // per cell
    std::vector<double> i_semi;    // per cell
    std::vector<uint8_t> cell_metal;
    double max_kcl_residual = 0.0; // relative to injected current

    double x_cell(int k) const { return (k + 0.5) * dx; }
};

inline OracleSolution solve(const DiscreteNetwork& net, double injected = 1.0) {
    const int n = net.n_segments;
    const int ground = net.right_term;

    // Assemble with the ground row/column eliminated. Index map: matrix
    // indices above ground shift down by one.
    auto reduced = [&](int node) { return node == ground ? -1 : (node > ground ? node - 1 : node); };
    const int m = net.n_nodes - 1;
    banded::SpdMatrix a(m, 2);
    for (int k = 0; k < n; ++k) {
        a.stamp(reduced(net.semi_node[k]), reduced(net.semi_node[k + 1]), net.g_semi);
        if (net.cell_metal[k])
            a.stamp(reduced(net.metal_node[k]), reduced(net.metal_node[k + 1]), net.g_metal);
    }
    for (int i = 0; i <= n; ++i)
        if (net.g_vert[i] > 0.0)
            a.stamp(reduced(net.semi_node[i]), reduced(net.metal_node[i]), net.g_vert[i]);

    std::vector<double> b(m, 0.0);
    b[reduced(net.left_term)] = 1.0;  // unit current, unit width

    double resid = 0.0;
    std::vector<double> y = banded::solve_refined(a, b, &resid);

    OracleSolution sol;
    sol.injected = injected;
    sol.dx = net.dx;
    sol.n_segments = n;
    sol.cell_metal = net.cell_metal;
    sol.max_kcl_residual = resid;  // per unit injected current

    // Potentials for the requested injection and physical width.
    const double scale = injected / net.width;
    auto potential = [&](int node) {
        if (node == ground) return 0.0;
        return y[reduced(node)] * scale;
    };
    sol.v_semi.resize(n + 1);
    sol.v_metal.assign(n + 1, std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i <= n; ++i) {
        sol.v_semi[i] = potential(net.semi_node[i]);
        if (net.metal_node[i] >= 0) sol.v_metal[i] = potential(net.metal_node[i]);
    }
    sol.resistance = (potential(net.left_term) - potential(net.right_term)) / injected;

    // Cell currents from the width-free solution: the width cancels.
    sol.i_metal.assign(n, 0.0);
    sol.i_semi.assign(n, 0.0);
    auto raw = [&](int node) { return node == ground ? 0.0 : y[reduced(node)]; };
    for (int k = 0; k < n; ++k) {
        sol.i_semi[k] = (raw(net.semi_node[k]) - raw(net.semi_node[k + 1])) * net.g_semi * injected;
        if (net.cell_metal[k])
            sol.i_metal[k] = (raw(net.metal_node[k]) - raw(net.metal_node[k + 1])) * net.g_metal * injected;
    }
    return sol;
}

inline OracleSolution solve(const SheetStack& stack, const RegionMap& map,
                            int n_segments, guard_sink* sink = nullptr,
                            double injected = 1.0) {
    return solve(build_network(stack, map, n_segments, sink), injected);
}

// ---------------------------------------------------------------------------
// Profiles and dissection
// ---------------------------------------------------------------------------

/// Per-cross-section rail current as a fraction of the injected current,
/// sampled at cell centers.
struct CurrentProfile {
    Rail rail = Rail::metal;
    std::vector<double> x;
    std::vector<double> fraction;

    /// Value at the cell whose center is nearest to x0.
    double at(double x0) const {
        if (x.empty()) throw std::out_of_range("empty profile");
        auto it = std::lower_bound(x.begin(), x.end(), x0);
        if (it == x.end()) return fraction.back();
        size_t i = static_cast<size_t>(it - x.begin());
        if (i > 0 && std::abs(x[i - 1] - x0) < std::abs(x[i] - x0)) --i;
        return fraction[i];
    }
};

inline CurrentProfile current_profile(const OracleSolution& sol, Rail rail) {
    CurrentProfile p;
    p.rail = rail;
    p.x.resize(sol.n_segments);
    p.fraction.resize(sol.n_segments);
    const auto& cur = rail == Rail::metal ? sol.i_metal : sol.i_semi;
    for (int k = 0; k < sol.n_segments; ++k) {
        p.x[k] = sol.x_cell(k);
        p.fraction[k] = cur[k] / sol.injected;
    }
    return p;
}

/// Semiconductor-rail potential drop between positions a and b divided by
/// the injected current: the dissection used to compare the access-region
/// closed form against the oracle.
inline double semiconductor_drop(const OracleSolution& sol, double a, double b) {
    auto line = [&](double x) {
        int i = static_cast<int>(std::llround(x / sol.dx));
        return std::clamp(i, 0, sol.n_segments);
    };
    return (sol.v_semi[line(a)] - sol.v_semi[line(b)]) / sol.injected;
}

// ---------------------------------------------------------------------------
// Grid refinement
// ---------------------------------------------------------------------------

struct RichardsonResult {
    double value = 0.0;           // extrapolated terminal resistance
    double error_estimate = 0.0;  // |R(2N) - R(N)|
    double observed_order = 0.0;  // from the N/2, N, 2N triple
    bool non_monotone = false;    // convergence not clean; value = raw R(2N)
    double r_coarse = 0.0, r_mid = 0.0, r_fine = 0.0;
};

/// Extrapolate a grid-convergent triple R(N/2), R(N), R(2N). Returns the raw
/// fine value (flagged) when the differences do not contract with a
/// consistent sign.
inline RichardsonResult richardson_extrapolate(double r_coarse, double r_mid, double r_fine) {
    RichardsonResult res;
    res.r_coarse = r_coarse;
    res.r_mid = r_mid;
    res.r_fine = r_fine;
    const double e1 = r_mid - r_coarse;
    const double e2 = r_fine - r_mid;
    res.error_estimate = std::abs(e2);
    if (e2 == 0.0) {  // already converged
        res.value = r_fine;
        res.observed_order = 0.0;
        return res;
    }
    if (e1 * e2 <= 0.0 || std::abs(e2) >= std::abs(e1)) {
        res.non_monotone = true;
        res.value = r_fine;
        return res;
    }
    double p = std::log2(std::abs(e1) / std::abs(e2));
    p = std::clamp(p, 0.5, 4.0);
    res.observed_order = p;
    res.value = r_fine + e2 / (std::pow(2.0, p) - 1.0);
    return res;
}

/// Solve at N/2, N and 2N and Richardson-extrapolate the terminal
/// resistance using the observed convergence order.
inline RichardsonResult richardson_refine(const SheetStack& stack, const RegionMap& map,
                                          int n_base, guard_sink* sink = nullptr) {
    if (n_base < 1000)
        throw std::invalid_argument("richardson_refine: n_base must be >= 1000");
    const double rc = solve(stack, map, n_base / 2, sink).resistance;
    const double rm = solve(stack, map, n_base, nullptr).resistance;
    const double rf = solve(stack, map, 2 * n_base, nullptr).resistance;
    RichardsonResult res = richardson_extrapolate(rc, rm, rf);
    if (res.non_monotone)
        warn(sink, "grid convergence is not monotone; returning unextrapolated value",
             res.error_estimate);
    return res;
}

} // namespace tlmforge
