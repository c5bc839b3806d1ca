#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <lapacke.h>

#include "armchair/lyapunov.hpp"
#include "armchair/potential.hpp"

namespace armchair {

/// Second-order finite-difference discretization of one Floquet fiber of
/// H_k^a: six edges with m interior points each, vertex values eliminated
/// through the magnetic Kirchhoff conditions with the cell-to-cell phase
/// e^{i theta}. The matrix is mildly non-normal; eigenvalues with
/// |Im| <= 1e-6 (1+|Re|) are kept and their real parts reported.
inline std::vector<double> floquet_fd_spectrum(const Potential& q, const ChannelParams& ch,
                                               int m, double theta, double lambda_max) {
    if (m < 50) throw UsageError("floquet_fd_spectrum: m >= 50 required");
    using C = std::complex<double>;
    const int n = 6 * m;
    const double dl = 1.0 / (m + 1);
    const double inv_h2 = 1.0 / (dl * dl);

    const C e_a1 = std::polar(1.0, ch.a1);
    const C e_a2 = std::polar(1.0, ch.a2);
    const C e_th = std::polar(1.0, theta);
    const C sk = ch.sk_root();

    auto dof = [m](int edge, int i) { return edge * m + (i - 1); }; // edge 0..5, i 1..m

    // vertex values as linear forms over the interior unknowns: 9 v = sum w_i y_i
    struct Form {
        std::vector<std::pair<int, C>> terms;
        void add(int idx, C w) { terms.push_back({idx, w}); }
    };
    auto end_terms = [&](Form& f, int edge, C w) { // w (4 y_{e,m} - y_{e,m-1})
        f.add(dof(edge, m), 4.0 * w);
        f.add(dof(edge, m - 1), -w);
    };
    auto start_terms = [&](Form& f, int edge, C w) { // w (4 y_{e,1} - y_{e,2})
        f.add(dof(edge, 1), 4.0 * w);
        f.add(dof(edge, 2), -w);
    };

    Form vA, vB, vC, vD;
    end_terms(vA, 0, e_a1);
    start_terms(vA, 1, 1.0);
    start_terms(vA, 4, 1.0);
    end_terms(vB, 1, e_a2);
    start_terms(vB, 2, 1.0);
    start_terms(vB, 5, 1.0);
    end_terms(vC, 2, e_a1);
    start_terms(vC, 3, 1.0);
    end_terms(vC, 5, e_a1 / e_th);
    end_terms(vD, 3, e_a2 * sk);
    start_terms(vD, 0, 1.0);
    end_terms(vD, 4, 1.0 / (e_a1 * e_th));

    // each edge's boundary values expressed through the vertex forms
    struct Boundary {
        const Form* form;
        C phase;
    };
    const Boundary starts[6] = {{&vD, 1.0}, {&vA, 1.0}, {&vB, 1.0},
                                {&vC, 1.0}, {&vA, 1.0}, {&vB, 1.0}};
    const Boundary ends[6] = {{&vA, 1.0 / e_a1},        {&vB, 1.0 / e_a2},
                              {&vC, 1.0 / e_a1},        {&vD, 1.0 / (e_a2 * sk)},
                              {&vD, e_a1 * e_th},       {&vC, e_th / e_a1}};

    std::vector<C> A(static_cast<std::size_t>(n) * n, C(0.0));
    auto at = [&](int r, int c) -> C& { return A[static_cast<std::size_t>(c) * n + r]; };

    for (int e = 0; e < 6; ++e) {
        for (int i = 1; i <= m; ++i) {
            const int r = dof(e, i);
            at(r, r) += 2.0 * inv_h2 + q.eval_regular(i * dl);
            if (i > 1) at(r, dof(e, i - 1)) += -inv_h2;
            if (i < m) at(r, dof(e, i + 1)) += -inv_h2;
            if (i == 1) {
                const auto& b = starts[e];
                for (const auto& [idx, w] : b.form->terms)
                    at(r, idx) += -inv_h2 * b.phase * w / 9.0;
            }
            if (i == m) {
                const auto& b = ends[e];
                for (const auto& [idx, w] : b.form->terms)
                    at(r, idx) += -inv_h2 * b.phase * w / 9.0;
            }
        }
    }

    std::vector<C> w(static_cast<std::size_t>(n));
    const int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n,
                                   reinterpret_cast<lapack_complex_double*>(A.data()), n,
                                   reinterpret_cast<lapack_complex_double*>(w.data()), nullptr,
                                   1, nullptr, 1);
    if (info != 0)
        throw InternalInconsistency("floquet_fd_spectrum: zgeev failed with info " +
                                    std::to_string(info));

    std::vector<double> out;
    for (const C& z : w) {
        if (std::abs(z.imag()) > 1e-6 * (1.0 + std::abs(z.real()))) continue;
        if (z.real() <= lambda_max) out.push_back(z.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Eigenvalue lists over a theta grid.
inline std::vector<std::vector<double>> floquet_fd_spectrum(const Potential& q,
                                                            const ChannelParams& ch, int m,
                                                            const std::vector<double>& thetas,
                                                            double lambda_max) {
    std::vector<std::vector<double>> out;
    out.reserve(thetas.size());
    for (double th : thetas) out.push_back(floquet_fd_spectrum(q, ch, m, th, lambda_max));
    return out;
}

} // namespace armchair
