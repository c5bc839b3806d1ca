#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "armchair/hill.hpp"
#include "armchair/rootscan.hpp"

namespace armchair {

/// Cached fundamental values on the scan grid x_lo..x_max (lambda = sign(x) x^2).
/// The floor x_lo is walked down until the whole spectral picture is safely
/// above it: F > 1 and 9F^2 clears every channel function with a factor 2.
struct HillGrid {
    double step = 0.01;
    double x_lo = 0.0;
    double x_max = 0.0;
    std::vector<double> xs;
    std::vector<HillValues> vals;

    static HillGrid build(const HillFunction& hf, double x_max, double step = 0.01) {
        HillGrid g;
        g.step = step;
        g.x_max = x_max;

        double x = -std::sqrt(1.0 + std::max(0.0, -hf.potential().min_regular()));
        bool ok = false;
        for (int i = 0; i < 120; ++i) {
            const HillValues hv = hf.values_model(lambda_of_x(x));
            const double bound = 5.0 + hv.Fminus * hv.Fminus +
                                 2.0 * std::sqrt(hv.Fminus * hv.Fminus + 4.0);
            if (hv.F > 1.0 && 9.0 * hv.F * hv.F >= 2.0 * bound) {
                ok = true;
                break;
            }
            x -= 0.5;
        }
        if (!ok) throw InternalInconsistency("HillGrid: could not find a spectral floor");
        g.x_lo = x - 0.5;

        const auto count = static_cast<std::size_t>(std::ceil((x_max - g.x_lo) / step)) + 1;
        g.xs.resize(count);
        g.vals.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            g.xs[i] = g.x_lo + static_cast<double>(i) * step;
            g.vals[i] = hf.values_model(lambda_of_x(g.xs[i]));
        }
        return g;
    }

    /// Zeros (in x) of w(HillValues); w evaluated off-grid through hf.
    std::vector<Zero> zeros_of(const HillFunction& hf,
                               const std::function<double(const HillValues&)>& w,
                               const ScanOptions& opt = {}) const {
        std::vector<double> ws(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) ws[i] = w(vals[i]);
        auto f = [&hf, &w](double x) { return w(hf.values_model(lambda_of_x(x))); };
        return locate_zeros(xs, ws, f, opt);
    }
};

struct EffectiveMass {
    int n = 0;          // gap index
    double lower = 0.0; // M_n^-
    double upper = 0.0; // M_n^+
};

/// Dirichlet spectrum, band edges, discriminant zeros and effective masses of
/// the Hill operator for one potential, up to sqrt(lambda) <= x_max.
struct HillLandmarks {
    double x_max = 0.0;
    std::vector<double> dirichlet;                 // mu_n, n >= 1
    std::vector<double> eta;                       // zeros of F, n >= 1
    double lambda0_plus = 0.0;                     // lowest band edge
    std::vector<std::array<double, 2>> band_edges; // (lam~_n^-, lam~_n^+), n >= 1
    std::vector<EffectiveMass> masses;             // for nonempty gaps only

    // Channels with |c_k| = 1 push the even-index band endpoints past the
    // Hill edges by O(F_-^2) when the potential is not even; these slacks
    // bound that excursion so the containment guards stay meaningful.
    double floor_slack = 0.0;                       // at lambda0_plus
    std::vector<std::array<double, 2>> edge_slack;  // per gap n (lower, upper edge)

    static constexpr double kGapWidthTol = 1e-9;

    bool gap_tilde_empty(int n) const {
        const auto& e = band_edges.at(static_cast<std::size_t>(n - 1));
        return e[1] - e[0] <= kGapWidthTol;
    }

    /// gamma~_n as an interval record (may be empty).
    std::array<double, 2> gap_tilde(int n) const {
        return band_edges.at(static_cast<std::size_t>(n - 1));
    }

    int hill_band_count() const { return static_cast<int>(band_edges.size()); }
};

namespace detail {

inline void validate_dirichlet_count(const Potential& q, const std::vector<double>& mu,
                                     double x_max) {
    // Counting window widened by the potential amplitude: mu_n lies within
    // [min q + (pi n)^2, max q + (pi n)^2].
    const double amp = q.amplitude();
    const double lo_arg = std::max(0.0, x_max * x_max - amp);
    const auto lo = static_cast<long>(std::floor(std::sqrt(lo_arg) / std::numbers::pi)) - 1;
    const auto hi = static_cast<long>(std::floor(std::sqrt(x_max * x_max + amp) /
                                                 std::numbers::pi)) + 1;
    const auto n = static_cast<long>(mu.size());
    if (n < lo || n > hi)
        throw CountMismatch("dirichlet_eigenvalues: located " + std::to_string(n) +
                            " eigenvalues, expected between " + std::to_string(lo) + " and " +
                            std::to_string(hi));
}

} // namespace detail

inline std::vector<double> dirichlet_eigenvalues(const HillFunction& hf, const HillGrid& grid) {
    auto zeros = grid.zeros_of(hf, [](const HillValues& v) { return v.phi1; });
    std::vector<double> mu;
    for (const auto& z : zeros) {
        if (z.x > grid.x_max) continue;
        if (z.multiplicity != 1)
            throw CountMismatch("dirichlet_eigenvalues: unexpected double zero of phi_1");
        mu.push_back(lambda_of_x(z.x));
    }
    detail::validate_dirichlet_count(hf.potential(), mu, grid.x_max);
    return mu;
}

inline std::vector<double> dirichlet_eigenvalues(const HillFunction& hf, double x_max) {
    return dirichlet_eigenvalues(hf, HillGrid::build(hf, x_max));
}

inline HillLandmarks hill_landmarks(const HillFunction& hf, const HillGrid& grid) {
    HillLandmarks lm;
    lm.x_max = grid.x_max;
    lm.dirichlet = dirichlet_eigenvalues(hf, grid);

    for (const auto& z : grid.zeros_of(hf, [](const HillValues& v) { return v.F; })) {
        if (z.x > grid.x_max) continue;
        if (z.multiplicity != 1)
            throw CountMismatch("hill_landmarks: F must have simple zeros only");
        lm.eta.push_back(lambda_of_x(z.x));
    }

    // Band edges: zeros of F-1 feed the even-index edges, zeros of F+1 the
    // odd-index ones; tangencies mark closed gaps.
    auto plus = expand_zeros(grid.zeros_of(hf, [](const HillValues& v) { return v.F - 1.0; }));
    auto minus = expand_zeros(grid.zeros_of(hf, [](const HillValues& v) { return v.F + 1.0; }));
    if (plus.empty()) throw CountMismatch("hill_landmarks: no lowest band edge found");
    lm.lambda0_plus = lambda_of_x(plus.front());
    std::size_t ip = 1, im = 0;
    for (int n = 1;; ++n) {
        auto& list = (n % 2 == 1) ? minus : plus;
        auto& idx = (n % 2 == 1) ? im : ip;
        if (idx + 2 > list.size()) break;
        const double lo = list[idx], hi = list[idx + 1];
        if (hi > grid.x_max) break;
        idx += 2;
        lm.band_edges.push_back({lambda_of_x(lo), lambda_of_x(hi)});
    }

    // Interlacing checks: edges increase, mu_n sits in its window. Collapsed
    // gaps are located through a tangency whose position is noise-limited, so
    // the containment tolerance is wider than the bisection one.
    double prev = lm.lambda0_plus;
    for (std::size_t i = 0; i < lm.band_edges.size(); ++i) {
        const auto& e = lm.band_edges[i];
        const double tol = 1e-5 * std::max(1.0, std::sqrt(std::abs(e[1])));
        if (!(e[0] >= prev - tol) || !(e[1] >= e[0] - tol))
            throw CountMismatch("hill_landmarks: band edges out of order");
        prev = e[1];
        if (i < lm.dirichlet.size() &&
            !(lm.dirichlet[i] >= e[0] - tol && lm.dirichlet[i] <= e[1] + tol))
            throw InternalInconsistency("hill_landmarks: mu_n escaped [lam~_n^-, lam~_n^+]");
    }

    for (std::size_t i = 0; i < lm.band_edges.size(); ++i) {
        if (lm.gap_tilde_empty(static_cast<int>(i + 1))) continue;
        const auto& e = lm.band_edges[i];
        EffectiveMass m;
        m.n = static_cast<int>(i + 1);
        m.lower = -hf.values(e[0]).F * hf.f_derivative(e[0], 1);
        m.upper = -hf.values(e[1]).F * hf.f_derivative(e[1], 1);
        lm.masses.push_back(m);
    }

    // excursion bound |lambda - lam~| <= F_-^2 / (12 |F'|) at a |c_k|=1
    // channel; stored with a factor-2 margin
    auto slack_at = [&hf](double edge) {
        const double h = 1e-4 * std::max(1.0, std::abs(edge));
        const HillValues v = hf.values(edge);
        const double fp = (hf.values(edge + h).F - hf.values(edge - h).F) / (2.0 * h);
        const double delta2 = v.Fminus * v.Fminus;
        return delta2 / (6.0 * std::max(0.02, std::abs(fp))) +
               1e-6 * std::max(1.0, std::sqrt(std::abs(edge)));
    };
    lm.floor_slack = slack_at(lm.lambda0_plus);
    for (const auto& e : lm.band_edges) lm.edge_slack.push_back({slack_at(e[0]), slack_at(e[1])});
    return lm;
}

inline HillLandmarks hill_landmarks(const HillFunction& hf, double x_max) {
    return hill_landmarks(hf, HillGrid::build(hf, x_max));
}

} // namespace armchair
