#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "armchair/hill.hpp"

namespace armchair {

/// Channel constants for H_k^a: ck = cos(pi k/N + a), sk = sin(pi k/N + a).
/// a1 and a2 ride along for the eigenfunction and monodromy machinery.
struct ChannelParams {
    int k = 0;
    int N = 1;
    double a = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double ck = 1.0;
    double sk = 0.0;

    /// e^{2 pi i k / N}, the transverse quasimomentum factor.
    std::complex<double> sk_root() const {
        const double t = 2.0 * std::numbers::pi * k / N;
        return {std::cos(t), std::sin(t)};
    }
};

inline ChannelParams channel_params(int k, int N, double a1, double a2) {
    if (N < 1) throw UsageError("channel_params: N >= 1 required");
    ChannelParams ch;
    ch.N = N;
    ch.k = ((k % N) + N) % N;
    ch.a1 = a1;
    ch.a2 = a2;
    ch.a = a1 + a2;
    const double arg = std::numbers::pi * ch.k / N + ch.a;
    ch.ck = std::cos(arg);
    ch.sk = std::sin(arg);
    // snap the degenerate channels so the ck=0 / sk=0 special cases trigger
    // exactly when the angle hits them to double precision
    if (std::abs(ch.ck) < 1e-14) ch.ck = 0.0;
    if (std::abs(ch.sk) < 1e-14) ch.sk = 0.0;
    return ch;
}

/// All scalar channel functions at one energy. Branches F1 >= F2 exist only
/// when rho >= 0; otherwise they form a conjugate pair off the real axis and
/// `real_branches` is false. fk = sk^2 (1 - F_-^2/ck^2) is undefined at ck=0.
struct LyapunovValues {
    double lambda = 0.0;
    double xi = 0.0;
    double rho = 0.0;
    bool real_branches = true;
    double F1 = 0.0;
    double F2 = 0.0;
    double g1 = 0.0, g2 = 0.0; // g_{k,1} <= g_{k,2}
    double h1 = 0.0, h2 = 0.0; // h_1 <= h_2
    double u = 0.0, v = 0.0;
    bool fk_defined = true;
    double fk = 0.0;
    double Dplus = 0.0;  // det(M_k - I) = 4(F1-1)(F2-1)
    double Dminus = 0.0; // det(M_k + I) = 4(F1+1)(F2+1)

    bool branch_in_band(int nu) const {
        if (!real_branches) return false;
        const double f = nu == 1 ? F1 : F2;
        return f >= -1.0 && f <= 1.0;
    }
    bool in_ac_spectrum() const { return branch_in_band(1) || branch_in_band(2); }
};

inline LyapunovValues lyapunov_values(const HillValues& hv, const ChannelParams& ch) {
    LyapunovValues lv;
    lv.lambda = hv.lambda;
    const double F2 = hv.F * hv.F;
    const double Fm = hv.Fminus;
    const double Fm2 = Fm * Fm;
    const double ck2 = ch.ck * ch.ck;
    const double sk2 = ch.sk * ch.sk;

    lv.xi = 0.5 * (9.0 * F2 - Fm2 - 1.0) - sk2;
    lv.rho = (9.0 * F2 - sk2) * ck2 + sk2 * Fm2;
    if (lv.rho >= 0.0) {
        const double r = std::sqrt(lv.rho);
        lv.F1 = lv.xi + r;
        lv.F2 = lv.xi - r;
        lv.real_branches = true;
    } else {
        lv.real_branches = false;
        lv.F1 = lv.F2 = lv.xi; // real part; the pair leaves the real axis
    }

    const double root = std::sqrt(Fm2 + 4.0 * ck2);
    lv.g1 = 5.0 + Fm2 - 2.0 * root;
    lv.g2 = 5.0 + Fm2 + 2.0 * root;
    lv.h1 = (1.0 - std::abs(Fm)) * (1.0 - std::abs(Fm));
    lv.h2 = (1.0 + std::abs(Fm)) * (1.0 + std::abs(Fm));
    lv.u = std::abs(Fm) - sk2;
    lv.v = std::abs(Fm) - ck2;
    if (ch.ck == 0.0) {
        lv.fk_defined = false;
        lv.fk = 0.0;
    } else {
        lv.fk_defined = true;
        lv.fk = sk2 * (1.0 - Fm2 / ck2);
    }

    // (xi -+ 1)^2 - rho stays real for either sign of rho
    lv.Dplus = 4.0 * ((lv.xi - 1.0) * (lv.xi - 1.0) - lv.rho);
    lv.Dminus = 4.0 * ((lv.xi + 1.0) * (lv.xi + 1.0) - lv.rho);
    return lv;
}

inline LyapunovValues lyapunov_values(const HillFunction& hf, double lambda,
                                      const ChannelParams& ch) {
    return lyapunov_values(hf.values(lambda), ch);
}

/// Complex branch pair (valid for either sign of rho); F1 gets +sqrt.
inline std::pair<std::complex<double>, std::complex<double>>
branches_complex(const LyapunovValues& lv) {
    const std::complex<double> r = std::sqrt(std::complex<double>(lv.rho, 0.0));
    return {lv.xi + r, lv.xi - r};
}

/// Max over k of |D_k^-(lambda) - D_0^-(lambda)|; the antiperiodic
/// determinant must not depend on the channel.
inline double dminus_is_k_independent_check(const HillValues& hv, int N, double a) {
    const double d0 = lyapunov_values(hv, channel_params(0, N, a, 0.0)).Dminus;
    double worst = 0.0;
    for (int k = 1; k < N; ++k) {
        const double dk = lyapunov_values(hv, channel_params(k, N, a, 0.0)).Dminus;
        worst = std::max(worst, std::abs(dk - d0));
    }
    return worst;
}

} // namespace armchair
