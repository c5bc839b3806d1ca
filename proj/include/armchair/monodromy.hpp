#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "armchair/hill.hpp"
#include "armchair/lyapunov.hpp"

namespace armchair {

using Complex = std::complex<double>;

/// 4x4 period map of H_k^a in the (y5, y6, y5', y6') boundary data at t=1,
/// assembled from the cell-1 Kirchhoff system.
struct MonodromyMatrix {
    double lambda = 0.0;
    Eigen::Matrix4cd M;

    static Eigen::Matrix4cd J() {
        Eigen::Matrix4cd j = Eigen::Matrix4cd::Zero();
        j(0, 3) = 1.0;
        j(1, 2) = 1.0;
        j(2, 1) = -1.0;
        j(3, 0) = -1.0;
        return j;
    }

    double det_residual() const { return std::abs(M.determinant() - Complex(1.0)); }

    double symplectic_residual() const {
        const Eigen::Matrix4cd r = M.transpose() * J() * M - J();
        return r.cwiseAbs().maxCoeff();
    }

    std::array<Complex, 4> eigenvalues() const {
        Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(M, false);
        std::array<Complex, 4> out;
        for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()(i);
        return out;
    }

    /// Worst defect of the reciprocal pairing {tau, 1/tau}.
    double reciprocal_pairing_residual() const {
        const auto ev = eigenvalues();
        double worst = 0.0;
        for (const auto& t : ev) {
            double best = 1e300;
            for (const auto& s : ev) best = std::min(best, std::abs(t * s - Complex(1.0)));
            worst = std::max(worst, best);
        }
        return worst;
    }
};

inline MonodromyMatrix assemble_monodromy(const HillFunction& hf, const ChannelParams& ch,
                                          double lambda) {
    const HillValues hv = hf.values(lambda);
    const Complex e1 = std::polar(1.0, ch.a1);
    const Complex e2 = std::polar(1.0, ch.a2);
    const Complex e1c = std::conj(e1);
    const Complex sk = ch.sk_root();
    const double t1 = hv.theta1, t1d = hv.theta1d, p1 = hv.phi1, p1d = hv.phi1d;

    // unknowns: (A_j, B_j) for cell-1 edges j=1..6, f_{1,j} = A_j theta + B_j phi
    auto A = [](int j) { return 2 * (j - 1); };
    auto B = [](int j) { return 2 * (j - 1) + 1; };

    Eigen::Matrix<Complex, 12, 12> K = Eigen::Matrix<Complex, 12, 12>::Zero();
    Eigen::Matrix<Complex, 12, 4> rhs = Eigen::Matrix<Complex, 12, 4>::Zero();
    int row = 0;
    auto continuity = [&](int j_from, int j_to) { // e^{ia} f_j(1) = f_{j_to}(0)
        const Complex phase = (j_from == 2 || j_from == 4) ? e2 : e1;
        const Complex skf = (j_from == 4) ? sk : Complex(1.0);
        K(row, A(j_from)) = phase * skf * t1;
        K(row, B(j_from)) = phase * skf * p1;
        K(row, A(j_to)) = -1.0;
        ++row;
    };

    continuity(1, 2); // e^{ia1} f_1(1) = f_2(0)
    K(row, A(2)) = 1.0;
    K(row, A(5)) = -1.0; // f_2(0) = f_5(0)
    ++row;
    continuity(2, 3); // e^{ia2} f_2(1) = f_3(0)
    K(row, A(3)) = 1.0;
    K(row, A(6)) = -1.0; // f_3(0) = f_6(0)
    ++row;
    continuity(3, 4); // e^{ia1} f_3(1) = f_4(0)
    K(row, A(4)) = 1.0; // f_4(0) = e^{ia1} f_{0,6}(1)
    rhs(row, 1) = e1;
    ++row;
    continuity(4, 1); // e^{ia2} s^k f_4(1) = f_1(0)
    K(row, A(1)) = 1.0; // f_1(0) = e^{-ia1} f_{0,5}(1)
    rhs(row, 0) = e1c;
    ++row;

    // derivative sums, cell 1
    K(row, A(1)) = e1 * t1d;
    K(row, B(1)) = e1 * p1d;
    K(row, B(2)) = -1.0;
    K(row, B(5)) = -1.0;
    ++row;
    K(row, A(2)) = e2 * t1d;
    K(row, B(2)) = e2 * p1d;
    K(row, B(3)) = -1.0;
    K(row, B(6)) = -1.0;
    ++row;
    K(row, A(3)) = e1 * t1d;
    K(row, B(3)) = e1 * p1d;
    K(row, B(4)) = -1.0;
    rhs(row, 3) = -e1; // + e^{ia1} f'_{0,6}(1) = 0
    ++row;
    K(row, A(4)) = e2 * sk * t1d;
    K(row, B(4)) = e2 * sk * p1d;
    K(row, B(1)) = -1.0;
    rhs(row, 2) = -e1c; // + e^{-ia1} f'_{0,5}(1) = 0
    ++row;

    Eigen::JacobiSVD<Eigen::Matrix<Complex, 12, 12>> svd(K);
    const double smin = svd.singularValues()(11);
    const double smax = svd.singularValues()(0);
    if (!(smin > 0.0) || smax / smin > 1e12)
        throw NearDirichletSingularity("assemble_monodromy: Kirchhoff system singular "
                                       "(lambda too close to the Dirichlet spectrum)");

    const Eigen::Matrix<Complex, 12, 4> sol = K.partialPivLu().solve(rhs);

    MonodromyMatrix mm;
    mm.lambda = lambda;
    for (int col = 0; col < 4; ++col) {
        const Complex A5 = sol(A(5), col), B5 = sol(B(5), col);
        const Complex A6 = sol(A(6), col), B6 = sol(B(6), col);
        mm.M(0, col) = A5 * t1 + B5 * p1;
        mm.M(1, col) = A6 * t1 + B6 * p1;
        mm.M(2, col) = A5 * t1d + B5 * p1d;
        mm.M(3, col) = A6 * t1d + B6 * p1d;
    }
    return mm;
}

/// Max residuals of the trace/determinant identities over a lambda grid.
struct MonodromyResiduals {
    double det = 0.0;
    double symplectic = 0.0;
    double trace_zero_field = 0.0;  // Tr M_0 vs 2(9F^2 - F_-^2 - 1)
    double trace_shift = 0.0;       // Tr M_k vs Tr M_0 - 4 sk^2
    double trace_sq_zero_field = 0.0;
    double trace_sq_shift = 0.0;
    double char_poly = 0.0;         // det(M_k - tau I) vs the branch product
    double reciprocal = 0.0;

    double worst() const {
        return std::max({det, symplectic, trace_zero_field, trace_shift, trace_sq_zero_field,
                         trace_sq_shift, char_poly, reciprocal});
    }
};

inline MonodromyResiduals monodromy_identity_residuals(const HillFunction& hf,
                                                       const ChannelParams& ch,
                                                       const std::vector<double>& lambdas) {
    MonodromyResiduals r;
    const ChannelParams zero = channel_params(0, ch.N, 0.0, 0.0);
    for (double lambda : lambdas) {
        const HillValues hv = hf.values(lambda);
        const auto mk = assemble_monodromy(hf, ch, lambda);
        const auto m0 = assemble_monodromy(hf, zero, lambda);

        r.det = std::max(r.det, mk.det_residual());
        r.symplectic = std::max(r.symplectic, mk.symplectic_residual());
        r.reciprocal = std::max(r.reciprocal, mk.reciprocal_pairing_residual());

        const Complex tr0 = m0.M.trace();
        const Complex trk = mk.M.trace();
        const double sk2 = ch.sk * ch.sk;
        const double ck2 = ch.ck * ch.ck;
        const double F2 = hv.F * hv.F;
        const double Fm2 = hv.Fminus * hv.Fminus;
        r.trace_zero_field =
            std::max(r.trace_zero_field, std::abs(tr0 - Complex(2.0 * (9.0 * F2 - Fm2 - 1.0))));
        r.trace_shift = std::max(r.trace_shift, std::abs(trk - (tr0 - Complex(4.0 * sk2))));

        const Complex tr0sq = (m0.M * m0.M).trace();
        const Complex trksq = (mk.M * mk.M).trace();
        r.trace_sq_zero_field = std::max(
            r.trace_sq_zero_field,
            std::abs(tr0sq - (Complex(72.0 * F2) + 0.5 * tr0 * tr0 - Complex(4.0))));
        r.trace_sq_shift =
            std::max(r.trace_sq_shift,
                     std::abs(trksq - (tr0sq - 8.0 * sk2 * tr0 - Complex(16.0 * sk2 * ck2))));

        const auto lv = lyapunov_values(hv, ch);
        const auto [f1, f2] = branches_complex(lv);
        for (const Complex tau : {Complex(2.0, 0.0), Complex(1.0, 1.0)}) {
            const Complex lhs = (mk.M - tau * Eigen::Matrix4cd::Identity()).determinant();
            const Complex rhsv =
                (tau * tau - 2.0 * f1 * tau + 1.0) * (tau * tau - 2.0 * f2 * tau + 1.0);
            r.char_poly = std::max(r.char_poly, std::abs(lhs - rhsv));
        }
    }
    return r;
}

} // namespace armchair
