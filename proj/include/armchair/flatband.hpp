#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <vector>

#include "armchair/hill.hpp"
#include "armchair/lyapunov.hpp"

namespace armchair {

/// Per-edge boundary data of a function on the reduced graph: values and
/// derivatives at both ends of edge (n, j), j in 1..6.
struct EdgeBoundaryData {
    std::complex<double> value0, value1; // f(0), f(1)
    std::complex<double> deriv0, deriv1; // f'(0), f'(1)
};

using EdgeDataMap = std::map<std::pair<int, int>, EdgeBoundaryData>;

/// Compactly supported flat-band eigenfunction at a Dirichlet energy mu:
/// psi_{n,j} = C_{n,j} * phi(. , mu), nonzero only on cells {0, 1} (before
/// translation). kappa1t/kappa2t are the obstruction factors whose vanishing
/// marks the degenerate branch (s_k, phi^2) = (0, 1).
struct CompactEigenfunction {
    int nu = 1;
    ChannelParams ch;
    double mu = 0.0;
    double phi = 0.0; // phi_1'(mu)
    bool degenerate = false;
    std::complex<double> kappa1t{1.0, 0.0};
    std::complex<double> kappa2t{1.0, 0.0};
    std::map<std::pair<int, int>, std::complex<double>> coeffs; // (n,j) -> C_{n,j}

    std::complex<double> coeff(int n, int j) const {
        const auto it = coeffs.find({n, j});
        return it == coeffs.end() ? std::complex<double>(0.0) : it->second;
    }

    /// Translated copy psi^{(shift,nu)}.
    CompactEigenfunction translated(int shift) const {
        CompactEigenfunction out = *this;
        out.coeffs.clear();
        for (const auto& [key, c] : coeffs) out.coeffs[{key.first + shift, key.second}] = c;
        return out;
    }

    /// Boundary data of every edge the eigenfunction touches (phi(0)=phi(1)=0
    /// at a Dirichlet energy, phi'(0)=1, phi'(1)=phi).
    EdgeDataMap boundary_data() const {
        EdgeDataMap out;
        for (const auto& [key, c] : coeffs) {
            EdgeBoundaryData d;
            d.value0 = d.value1 = 0.0;
            d.deriv0 = c;
            d.deriv1 = c * phi;
            out[key] = d;
        }
        return out;
    }
};

namespace detail {

inline bool degenerate_pair(const ChannelParams& ch, double phi) {
    return ch.sk == 0.0 && std::abs(phi * phi - 1.0) <= 1e-9;
}

} // namespace detail

inline CompactEigenfunction build_compact_eigenfunction(const HillFunction& hf,
                                                        const ChannelParams& ch, double mu,
                                                        int nu) {
    if (nu != 1 && nu != 2) throw UsageError("build_compact_eigenfunction: nu must be 1 or 2");
    const HillValues hv = hf.values(mu);
    if (std::abs(hv.phi1) > 1e-9)
        throw NotAnEigenvalue("build_compact_eigenfunction: mu is not a Dirichlet eigenvalue");

    CompactEigenfunction ef;
    ef.nu = nu;
    ef.ch = ch;
    ef.mu = mu;
    ef.phi = hv.phi1d;
    const double p = ef.phi;
    const std::complex<double> sk = ch.sk_root();
    const std::complex<double> e_a = std::polar(1.0, ch.a);
    const std::complex<double> e_a1 = std::polar(1.0, ch.a1);
    const std::complex<double> e_a2 = std::polar(1.0, ch.a2);
    const std::complex<double> e_2a = e_a * e_a;
    ef.kappa1t = 1.0 - sk * e_2a * p * p;
    ef.kappa2t = 1.0 - sk * e_2a * p * p * p * p;
    ef.degenerate = detail::degenerate_pair(ch, p);

    auto& C = ef.coeffs;
    if (!ef.degenerate) {
        if (std::abs(ef.kappa1t) < 1e-12 || std::abs(ef.kappa2t) < 1e-12)
            throw InternalInconsistency(
                "build_compact_eigenfunction: kappa~ vanished outside the degenerate branch");
        if (nu == 1) {
            C[{0, 2}] = -ef.kappa2t;
            C[{0, 5}] = ef.kappa2t;
            C[{0, 6}] = -ef.kappa2t * p * e_a2;
            C[{1, 1}] = ef.kappa1t * p / e_a1;
            C[{1, 2}] = ef.kappa1t * p * p;
            C[{1, 3}] = ef.kappa1t * p * p * p * e_a2;
            C[{1, 4}] = p * p * (p * p - 1.0) * e_a;
        } else {
            C[{0, 1}] = ef.kappa1t * sk * p * p * e_a2;
            C[{0, 2}] = sk * p * (p * p - 1.0) * e_a;
            C[{0, 3}] = ef.kappa1t / e_a1;
            C[{0, 4}] = ef.kappa1t * p;
            C[{0, 5}] = ef.kappa2t * sk * p * e_a;
            C[{0, 6}] = -ef.kappa2t / e_a1;
            C[{1, 4}] = -ef.kappa2t * p;
        }
    } else {
        // (s_k, phi^2) = (0, 1): s^k e^{2ia} = 1 and phi = +-1
        if (nu == 1) {
            C[{0, 1}] = 1.0;
            C[{0, 3}] = e_a;
            C[{0, 4}] = p * e_a * e_a1;
            C[{0, 5}] = p * e_a1;
            C[{0, 6}] = -e_a;
            C[{1, 4}] = -p * e_a * e_a1;
        } else {
            C[{0, 2}] = 1.0;
            C[{0, 5}] = -1.0;
            C[{0, 6}] = p * e_a2;
            C[{1, 4}] = e_a;
        }
    }
    std::erase_if(C, [](const auto& kv) { return std::abs(kv.second) == 0.0; });
    return ef;
}

/// Max residual of the twelve Kirchhoff conditions per cell (eight continuity
/// identities, four derivative sums), over every cell the data touches plus a
/// one-cell margin.
inline double kirchhoff_residual(const EdgeDataMap& data, const ChannelParams& ch) {
    if (data.empty()) return 0.0;
    int cell_lo = data.begin()->first.first;
    int cell_hi = cell_lo;
    for (const auto& [key, d] : data) {
        cell_lo = std::min(cell_lo, key.first);
        cell_hi = std::max(cell_hi, key.first);
    }

    auto get = [&data](int n, int j) {
        const auto it = data.find({n, j});
        return it == data.end() ? EdgeBoundaryData{} : it->second;
    };

    const std::complex<double> sk = ch.sk_root();
    const std::complex<double> e_a1 = std::polar(1.0, ch.a1);
    const std::complex<double> e_a2 = std::polar(1.0, ch.a2);

    double worst = 0.0;
    auto track = [&worst](std::complex<double> r) { worst = std::max(worst, std::abs(r)); };

    for (int n = cell_lo; n <= cell_hi + 1; ++n) {
        const auto f1 = get(n, 1), f2 = get(n, 2), f3 = get(n, 3);
        const auto f4 = get(n, 4), f5 = get(n, 5), f6 = get(n, 6);
        const auto p5 = get(n - 1, 5), p6 = get(n - 1, 6);

        track(e_a1 * f1.value1 - f2.value0);
        track(f2.value0 - f5.value0);
        track(e_a2 * f2.value1 - f3.value0);
        track(f3.value0 - f6.value0);
        track(e_a1 * f3.value1 - f4.value0);
        track(f4.value0 - e_a1 * p6.value1);
        track(e_a2 * sk * f4.value1 - f1.value0);
        track(f1.value0 - p5.value1 / e_a1);

        track(e_a1 * f1.deriv1 - f2.deriv0 - f5.deriv0);
        track(e_a2 * f2.deriv1 - f3.deriv0 - f6.deriv0);
        track(e_a1 * f3.deriv1 - f4.deriv0 + e_a1 * p6.deriv1);
        track(e_a2 * sk * f4.deriv1 - f1.deriv0 + p5.deriv1 / e_a1);
    }
    return worst;
}

/// hat f_{n,nu} pairs of the flat-band expansion.
struct ExpansionCoefficients {
    std::map<int, std::array<std::complex<double>, 2>> hat; // n -> (hat f_{n,1}, hat f_{n,2})

    std::complex<double> at(int n, int nu) const {
        const auto it = hat.find(n);
        return it == hat.end() ? std::complex<double>(0.0)
                               : it->second[static_cast<std::size_t>(nu - 1)];
    }
};

/// Coefficients of an eigenfunction with the given edge derivative data in
/// the translated compact basis. Non-degenerate branch reads edges (n,5),
/// (n,6); the degenerate branch reads (n,1), (n,2).
inline ExpansionCoefficients expansion_coefficients(const EdgeDataMap& data,
                                                    const ChannelParams& ch,
                                                    const HillFunction& hf, double mu) {
    const HillValues hv = hf.values(mu);
    if (std::abs(hv.phi1) > 1e-9)
        throw NotAnEigenvalue("expansion_coefficients: mu is not a Dirichlet eigenvalue");
    const double p = hv.phi1d;
    const bool degenerate = detail::degenerate_pair(ch, p);

    ExpansionCoefficients out;
    const std::complex<double> sk = ch.sk_root();
    const std::complex<double> e_a = std::polar(1.0, ch.a);
    const std::complex<double> e_a1 = std::polar(1.0, ch.a1);
    const std::complex<double> k1 = 1.0 - sk * e_a * e_a * p * p;
    const std::complex<double> k2 = 1.0 - sk * e_a * e_a * p * p * p * p;

    if (!degenerate && (std::abs(k1) < 1e-12 || std::abs(k2) < 1e-12))
        throw WrongBranch("expansion_coefficients: kappa~ vanished in the non-degenerate branch");

    std::set<int> cells;
    for (const auto& [key, d] : data) cells.insert(key.first);
    for (int n : cells) {
        std::array<std::complex<double>, 2> pair{0.0, 0.0};
        if (degenerate) {
            const auto it1 = data.find({n, 1});
            const auto it2 = data.find({n, 2});
            pair[0] = it1 == data.end() ? 0.0 : it1->second.deriv0;
            pair[1] = it2 == data.end() ? 0.0 : it2->second.deriv0;
        } else {
            const auto it5 = data.find({n, 5});
            const auto it6 = data.find({n, 6});
            const std::complex<double> d5 = it5 == data.end() ? 0.0 : it5->second.deriv0;
            const std::complex<double> d6 = it6 == data.end() ? 0.0 : it6->second.deriv0;
            pair[0] = (d5 + sk * p * e_a * e_a1 * d6) / (k1 * k2);
            pair[1] = -(e_a1 * d6 + p * e_a * d5) / (k1 * k2);
        }
        if (std::abs(pair[0]) != 0.0 || std::abs(pair[1]) != 0.0) out.hat[n] = pair;
    }
    return out;
}

} // namespace armchair
