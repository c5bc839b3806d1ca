#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "armchair/landmarks.hpp"
#include "armchair/lyapunov.hpp"

namespace armchair {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class Provenance { Periodic, Antiperiodic, Resonance };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::Periodic: return "periodic";
        case Provenance::Antiperiodic: return "antiperiodic";
        case Provenance::Resonance: return "resonance";
    }
    return "?";
}

/// lam_{nu,p}^{k,-} / ^{k,+}; p = 0 carries only the upper value.
struct EigenvaluePair {
    double lo = kNegInf;
    double hi = 0.0;
};

/// Periodic (even p, zeros of 9F^2 - g_{k,nu}) and antiperiodic (odd p, zeros
/// of 9F^2 - h_nu) eigenvalues, labeled by the component structure of
/// {9F^2 > g} and {9F^2 < h}.
struct LabeledEigenvalues {
    std::array<std::vector<EigenvaluePair>, 2> lam; // [nu-1][p]
    int p_max = 0;

    const EigenvaluePair& at(int nu, int p) const {
        return lam[static_cast<std::size_t>(nu - 1)].at(static_cast<std::size_t>(p));
    }
    /// kappa_n = (lam_{1,2n-1}^{0,-}, lam_{1,2n-1}^{0,+})
    EigenvaluePair kappa(int n) const { return at(1, 2 * n - 1); }
    int kappa_count() const { return (p_max + 1) / 2; }
};

enum class ResonanceStatus { Regular, RhoZero, DoubleAtEta, NoZeros };

struct ResonancePair {
    int n = 0;
    ResonanceStatus status = ResonanceStatus::NoZeros;
    double r_lo = 0.0;
    double r_hi = 0.0;
    std::vector<double> zeros; // all real zeros of rho in closure(kappa_n), with multiplicity
};

struct EndpointEntry {
    double lo = kNegInf, hi = 0.0;
    Provenance prov_lo = Provenance::Periodic, prov_hi = Provenance::Periodic;
};

struct EndpointArrays {
    std::array<std::vector<EndpointEntry>, 2> E; // [nu-1][p]
    int p_max = 0;
    const EndpointEntry& at(int nu, int p) const {
        return E[static_cast<std::size_t>(nu - 1)].at(static_cast<std::size_t>(p));
    }
};

enum class GapClass { Periodic, Antiperiodic, Resonance, PMix, RMix, Empty };

inline const char* to_string(GapClass c) {
    switch (c) {
        case GapClass::Periodic: return "periodic";
        case GapClass::Antiperiodic: return "antiperiodic";
        case GapClass::Resonance: return "resonance";
        case GapClass::PMix: return "p-mix";
        case GapClass::RMix: return "r-mix";
        case GapClass::Empty: return "empty";
    }
    return "?";
}

struct GapRecord {
    int index = 0; // G_{k,n} / G_n numbering, index 0 is (-inf, E)
    double lo = kNegInf;
    double hi = 0.0;
    GapClass cls = GapClass::Empty;
    Provenance prov_lo = Provenance::Periodic;
    Provenance prov_hi = Provenance::Periodic;

    bool empty() const {
        if (lo == kNegInf) return false;
        return hi - lo <= 1e-9 * std::max(1.0, std::abs(lo));
    }
    double width() const { return empty() ? 0.0 : hi - lo; }
};

struct Interval {
    double lo = 0.0, hi = 0.0;
};

struct MultiplicityMap {
    std::array<std::vector<Interval>, 2> S_nu; // stable sets per branch
    std::vector<Interval> S;                   // S_k = S_{k,1} cap S_{k,2}
    std::vector<Interval> S_R;                 // resonance multiplicity-4 set
    struct Piece {
        double lo, hi;
        int multiplicity; // 2 or 4
    };
    std::vector<Piece> pieces; // partition of sigma_ac below the scan limit
};

struct ChannelSpectrum {
    ChannelParams ch;
    double x_max = 0.0;
    LabeledEigenvalues labeled;
    std::vector<ResonancePair> resonances; // index n-1
    EndpointArrays endpoints;
    std::vector<GapRecord> gaps;       // indices 0 .. 4*n_max
    std::vector<Interval> bands;       // sigma_ac pieces up to the coverage limit
    double coverage = 0.0;             // sigma_ac is complete below this lambda
    MultiplicityMap multiplicity;
    int n_max = 0;

    /// S_{nu,n} = [E_{nu,n-1}^+, E_{nu,n}^-], n >= 1
    Interval branch_band(int nu, int n) const {
        return {endpoints.at(nu, n - 1).hi, endpoints.at(nu, n).lo};
    }
    int branch_band_count() const { return endpoints.p_max; }
};

namespace detail {

inline double order_tol(double lambda) {
    return 1e-6 * std::max(1.0, std::sqrt(std::abs(lambda)));
}

inline std::vector<double> zeros_below(const HillFunction& hf, const HillGrid& grid,
                                       const std::function<double(const HillValues&)>& w) {
    auto zs = grid.zeros_of(hf, w);
    std::vector<double> out;
    for (const auto& z : zs) {
        if (z.x > grid.x_max) continue;
        for (int i = 0; i < z.multiplicity; ++i) out.push_back(lambda_of_x(z.x));
    }
    return out;
}

// merge a union of (possibly overlapping) intervals
inline std::vector<Interval> merge_union(std::vector<Interval> v, double tol = 1e-9) {
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& it : v) {
        if (it.hi < it.lo) continue;
        if (!out.empty() && it.lo <= out.back().hi + tol)
            out.back().hi = std::max(out.back().hi, it.hi);
        else
            out.push_back(it);
    }
    return out;
}

inline std::vector<Interval> intersect_unions(const std::vector<Interval>& a,
                                              const std::vector<Interval>& b) {
    std::vector<Interval> out;
    for (const auto& x : a)
        for (const auto& y : b) {
            const double lo = std::max(x.lo, y.lo);
            const double hi = std::min(x.hi, y.hi);
            if (hi > lo) out.push_back({lo, hi});
        }
    return merge_union(out);
}

inline bool contains(const std::vector<Interval>& u, double x, double tol) {
    for (const auto& it : u)
        if (x >= it.lo - tol && x <= it.hi + tol) return true;
    return false;
}

} // namespace detail

/// Locate and label the periodic/antiperiodic eigenvalues of channel ch.
inline LabeledEigenvalues locate_labeled_eigenvalues(const HillFunction& hf, const HillGrid& grid,
                                                     const HillLandmarks& lm,
                                                     const ChannelParams& ch) {
    LabeledEigenvalues out;
    const double ck2 = ch.ck * ch.ck;

    auto g_fun = [ck2](int nu) {
        return [nu, ck2](const HillValues& v) {
            const double fm2 = v.Fminus * v.Fminus;
            const double root = std::sqrt(fm2 + 4.0 * ck2);
            const double g = 5.0 + fm2 + (nu == 1 ? -2.0 : 2.0) * root;
            return 9.0 * v.F * v.F - g;
        };
    };
    auto h_fun = [](int nu) {
        return [nu](const HillValues& v) {
            const double afm = std::abs(v.Fminus);
            const double h = nu == 1 ? (1.0 - afm) * (1.0 - afm) : (1.0 + afm) * (1.0 + afm);
            return 9.0 * v.F * v.F - h;
        };
    };

    int p_min = std::numeric_limits<int>::max();
    for (int nu = 1; nu <= 2; ++nu) {
        const auto zg = detail::zeros_below(hf, grid, g_fun(nu));
        const auto zh = detail::zeros_below(hf, grid, h_fun(nu));
        if (zg.empty())
            throw CountMismatch("locate_labeled_eigenvalues: no periodic eigenvalue found");

        auto& lam = out.lam[static_cast<std::size_t>(nu - 1)];
        // p = 0: gamma_{nu,0} = (-inf, z_0)
        lam.push_back({kNegInf, zg[0]});
        int p = 0;
        for (;;) {
            const int next = p + 1;
            if (next % 2 == 1) { // antiperiodic pair p=2m-1 uses zh[2m-2], zh[2m-1]
                const std::size_t m = static_cast<std::size_t>((next + 1) / 2);
                if (2 * m > zh.size()) break;
                lam.push_back({zh[2 * m - 2], zh[2 * m - 1]});
            } else { // periodic pair p=2m uses zg[2m-1], zg[2m]
                const std::size_t m = static_cast<std::size_t>(next / 2);
                if (2 * m + 1 > zg.size()) break;
                lam.push_back({zg[2 * m - 1], zg[2 * m]});
            }
            p = next;
        }
        p_min = std::min(p_min, p);
    }
    out.p_max = p_min;
    for (auto& lam : out.lam) lam.resize(static_cast<std::size_t>(out.p_max) + 1);

    // interlacing of the two chains against the Hill landmarks
    for (int n = 1; 2 * n <= out.p_max; ++n) {
        const int p = 2 * n - 1;
        const auto& l1m = out.at(1, p);
        const auto& l2m = out.at(2, p);
        const auto& l1e = out.at(1, p - 1);
        const auto& l2e = out.at(2, p - 1);
        const auto& l1n = out.at(1, p + 1);
        const auto& l2n = out.at(2, p + 1);
        const double tol = detail::order_tol(l2n.lo);
        const double window_lo =
            (n == 1) ? lm.lambda0_plus
                     : lm.band_edges[static_cast<std::size_t>(n - 2)][1];
        const double window_hi = lm.band_edges[static_cast<std::size_t>(n - 1)][0];
        const double eta = lm.eta.at(static_cast<std::size_t>(n - 1));
        // the window-edge comparisons carry the |c_k|=1 excursion slack
        const double slack_lo =
            (n == 1) ? lm.floor_slack : lm.edge_slack[static_cast<std::size_t>(n - 2)][1];
        const double slack_hi = lm.edge_slack[static_cast<std::size_t>(n - 1)][0];
        const bool ok = window_lo <= l2e.hi + tol + slack_lo &&
                        l2e.hi <= std::min(l2m.lo, l1e.hi) + tol &&
                        std::max(l2m.lo, l1e.hi) <= l1m.lo + tol &&
                        l1m.lo <= eta + tol && eta <= l1m.hi + tol &&
                        l1m.hi <= std::min(l1n.lo, l2m.hi) + tol &&
                        std::max(l1n.lo, l2m.hi) <= l2n.lo + tol &&
                        l2n.lo <= window_hi + tol + slack_hi;
        if (!ok)
            throw CountMismatch("locate_labeled_eigenvalues: interlacing violated near band " +
                                std::to_string(n));
    }
    return out;
}

/// All real zeros of rho_k inside each closed kappa_n, with the two special
/// channels handled exactly.
inline std::vector<ResonancePair> locate_resonances(const HillFunction& hf,
                                                    const HillLandmarks& lm,
                                                    const ChannelParams& ch,
                                                    const LabeledEigenvalues& labeled) {
    std::vector<ResonancePair> out;
    const double sk2 = ch.sk * ch.sk;
    const double ck2 = ch.ck * ch.ck;

    auto rho_fun = [sk2, ck2](const HillValues& v) {
        return (9.0 * v.F * v.F - sk2) * ck2 + sk2 * v.Fminus * v.Fminus;
    };

    for (int n = 1; n <= labeled.kappa_count(); ++n) {
        ResonancePair rp;
        rp.n = n;
        const auto kap = labeled.kappa(n);
        if (ch.ck == 0.0) {
            rp.status = ResonanceStatus::RhoZero;
            out.push_back(rp);
            continue;
        }
        if (ch.sk == 0.0) {
            const double eta = lm.eta.at(static_cast<std::size_t>(n - 1));
            rp.status = ResonanceStatus::DoubleAtEta;
            rp.r_lo = rp.r_hi = eta;
            rp.zeros = {eta, eta};
            out.push_back(rp);
            continue;
        }

        const double pad = 1e-9;
        const double xa = x_of_lambda(kap.lo) - pad;
        const double xb = x_of_lambda(kap.hi) + pad;
        std::vector<Zero> zs;
        for (int refine = 0; refine < 3; ++refine) {
            const std::size_t pts = 64u << (2 * refine);
            std::vector<double> xs(pts + 1), ws(pts + 1);
            for (std::size_t i = 0; i <= pts; ++i) {
                xs[i] = xa + (xb - xa) * static_cast<double>(i) / static_cast<double>(pts);
                ws[i] = rho_fun(hf.values_model(lambda_of_x(xs[i])));
            }
            auto f = [&](double x) { return rho_fun(hf.values_model(lambda_of_x(x))); };
            zs = locate_zeros(xs, ws, f);
            std::size_t count = 0;
            for (const auto& z : zs) count += static_cast<std::size_t>(z.multiplicity);
            if (count % 2 == 0) break;
            if (refine == 2)
                throw CountMismatch("locate_resonances: odd zero count in kappa_" +
                                    std::to_string(n));
        }
        for (const auto& z : zs)
            for (int i = 0; i < z.multiplicity; ++i) rp.zeros.push_back(lambda_of_x(z.x));
        if (rp.zeros.empty()) {
            rp.status = ResonanceStatus::NoZeros;
        } else {
            rp.status = ResonanceStatus::Regular;
            rp.r_lo = rp.zeros.front();
            rp.r_hi = rp.zeros.back();
        }
        out.push_back(rp);
    }
    return out;
}

/// Band endpoints per the case split: even-p and branch-2 endpoints come from
/// the labeled eigenvalues; the branch-1 antiperiodic pair survives only where
/// v_k >= 0, otherwise the resonance pair takes over.
inline EndpointArrays band_endpoints(const HillFunction& hf, const ChannelParams& ch,
                                     const LabeledEigenvalues& labeled,
                                     const std::vector<ResonancePair>& resonances) {
    EndpointArrays out;
    out.p_max = labeled.p_max;
    const double ck2 = ch.ck * ch.ck;
    auto v_at = [&](double lambda) { return std::abs(hf.values(lambda).Fminus) - ck2; };

    for (int nu = 1; nu <= 2; ++nu) {
        auto& dst = out.E[static_cast<std::size_t>(nu - 1)];
        for (int p = 0; p <= labeled.p_max; ++p) {
            const auto& src = labeled.at(nu, p);
            EndpointEntry e;
            if (p % 2 == 0) {
                e = {src.lo, src.hi, Provenance::Periodic, Provenance::Periodic};
            } else if (nu == 2) {
                e = {src.lo, src.hi, Provenance::Antiperiodic, Provenance::Antiperiodic};
            } else {
                const int n = (p + 1) / 2;
                const auto& rp = resonances.at(static_cast<std::size_t>(n - 1));
                e = {src.lo, src.hi, Provenance::Antiperiodic, Provenance::Antiperiodic};
                if (rp.status != ResonanceStatus::RhoZero) {
                    if (v_at(src.lo) < 0.0) {
                        if (rp.status == ResonanceStatus::NoZeros)
                            throw InternalInconsistency(
                                "band_endpoints: v<0 but rho has no zero in kappa_" +
                                std::to_string(n));
                        e.lo = rp.r_lo;
                        e.prov_lo = Provenance::Resonance;
                    }
                    if (v_at(src.hi) < 0.0) {
                        if (rp.status == ResonanceStatus::NoZeros)
                            throw InternalInconsistency(
                                "band_endpoints: v<0 but rho has no zero in kappa_" +
                                std::to_string(n));
                        e.hi = rp.r_hi;
                        e.prov_hi = Provenance::Resonance;
                    }
                }
            }
            dst.push_back(e);
        }
    }
    return out;
}

/// Gap table of one channel, indices 0..4*n_max.
inline std::vector<GapRecord> gaps_channel(const EndpointArrays& ep, const HillLandmarks& lm,
                                           const LabeledEigenvalues& labeled) {
    std::vector<GapRecord> gaps;
    const int n_max = ep.p_max / 2;

    GapRecord g0;
    g0.index = 0;
    g0.lo = kNegInf;
    g0.hi = ep.at(2, 0).hi;
    g0.cls = GapClass::Periodic;
    g0.prov_hi = Provenance::Periodic;
    gaps.push_back(g0);

    auto push = [&gaps](int index, double lo, double hi, Provenance pl, Provenance ph) {
        GapRecord g;
        g.index = index;
        g.lo = lo;
        g.hi = hi;
        g.prov_lo = pl;
        g.prov_hi = ph;
        gaps.push_back(g);
    };

    for (int n = 1; n <= n_max; ++n) {
        const int p = 2 * n - 1;
        const auto& e1m = ep.at(1, p);     // E_{1,2n-1}
        const auto& e1e = ep.at(1, p - 1); // E_{1,2n-2}
        const auto& e1n = ep.at(1, p + 1); // E_{1,2n}
        const auto& e2m = ep.at(2, p);     // E_{2,2n-1}
        const auto& e2n = ep.at(2, p + 1); // E_{2,2n}
        push(4 * n - 3, e2m.lo, e1e.hi, e2m.prov_lo, e1e.prov_hi);
        push(4 * n - 2, e1m.lo, e1m.hi, e1m.prov_lo, e1m.prov_hi);
        push(4 * n - 1, e1n.lo, e2m.hi, e1n.prov_lo, e2m.prov_hi);
        push(4 * n, e2n.lo, e2n.hi, e2n.prov_lo, e2n.prov_hi);

        // containments: gamma~_n inside G_{4n}, G_{4n-2} inside kappa_n,
        // eta_n inside the closed branch-1 antiperiodic window
        const auto gt = lm.gap_tilde(n);
        const auto kap = labeled.kappa(n);
        const double tol = detail::order_tol(kap.hi);
        const auto& slack = lm.edge_slack.at(static_cast<std::size_t>(n - 1));
        if (!(e2n.lo <= gt[0] + tol + slack[0] && gt[1] <= e2n.hi + tol + slack[1]))
            throw InternalInconsistency("gaps_channel: gamma~ escaped G_{4n}");
        if (!(kap.lo <= e1m.lo + tol && e1m.hi <= kap.hi + tol))
            throw InternalInconsistency("gaps_channel: G_{4n-2} escaped kappa_n");
        const double eta = lm.eta.at(static_cast<std::size_t>(n - 1));
        if (!(std::min(e1m.lo, e1m.hi) - tol <= eta && eta <= std::max(e1m.lo, e1m.hi) + tol))
            throw InternalInconsistency("gaps_channel: eta_n outside [E_{1,p}^-, E_{1,p}^+]");
    }
    return gaps;
}

namespace detail {

struct ZeroSetMembership {
    bool periodic = false, antiperiodic = false, resonance = false;
    bool any() const { return periodic || antiperiodic || resonance; }
};

inline void collect_membership(double e, const LabeledEigenvalues& labeled,
                               const std::vector<ResonancePair>& resonances, double tol,
                               ZeroSetMembership& m) {
    for (int nu = 1; nu <= 2; ++nu)
        for (int p = 0; p <= labeled.p_max; ++p) {
            const auto& pr = labeled.at(nu, p);
            const bool hit = (p > 0 && std::abs(pr.lo - e) <= tol) || std::abs(pr.hi - e) <= tol;
            if (!hit) continue;
            (p % 2 == 0 ? m.periodic : m.antiperiodic) = true;
        }
    for (const auto& rp : resonances)
        for (double z : rp.zeros)
            if (std::abs(z - e) <= tol) m.resonance = true;
}

inline GapClass classify_from_membership(const ZeroSetMembership& a,
                                         const ZeroSetMembership& b) {
    if (!a.any() || !b.any())
        throw ClassificationFailure("classify_gap: endpoint matches no zero set");
    if (a.periodic && b.periodic) return GapClass::Periodic;
    if (a.antiperiodic && b.antiperiodic) return GapClass::Antiperiodic;
    if (a.resonance && b.resonance) return GapClass::Resonance;
    if ((a.antiperiodic && b.periodic) || (a.periodic && b.antiperiodic)) return GapClass::PMix;
    if ((a.antiperiodic && b.resonance) || (a.resonance && b.antiperiodic)) return GapClass::RMix;
    throw ClassificationFailure("classify_gap: periodic/resonance endpoint pairing");
}

} // namespace detail

/// Match both endpoints of a nonempty gap against the periodic, antiperiodic
/// and resonance zero sets and classify.
inline GapClass classify_gap(const GapRecord& gap, const LabeledEigenvalues& labeled,
                             const std::vector<ResonancePair>& resonances,
                             double tol_scale = 1e-8) {
    if (gap.empty()) return GapClass::Empty;
    if (gap.lo == kNegInf) return GapClass::Periodic;
    detail::ZeroSetMembership a, b;
    detail::collect_membership(gap.lo, labeled, resonances,
                               tol_scale * std::max(1.0, std::abs(gap.lo)), a);
    detail::collect_membership(gap.hi, labeled, resonances,
                               tol_scale * std::max(1.0, std::abs(gap.hi)), b);
    return detail::classify_from_membership(a, b);
}

/// Multiplicity-4 and multiplicity-2 decomposition of sigma_ac for one channel.
inline MultiplicityMap multiplicity_map(const HillFunction& hf, const ChannelParams& ch,
                                        const LabeledEigenvalues& labeled,
                                        const std::vector<ResonancePair>& resonances,
                                        const std::vector<Interval>& bands) {
    MultiplicityMap mm;
    const double ck2 = ch.ck * ch.ck;
    auto v_at = [&](double lambda) { return std::abs(hf.values(lambda).Fminus) - ck2; };

    for (int nu = 1; nu <= 2; ++nu) {
        auto& dst = mm.S_nu[static_cast<std::size_t>(nu - 1)];
        for (int n = 1; 2 * n <= labeled.p_max; ++n) {
            const int p = 2 * n - 1;
            const auto& prev = labeled.at(nu, p - 1);
            const auto& mid = labeled.at(nu, p);
            const auto& next = labeled.at(nu, p + 1);
            dst.push_back({prev.hi, mid.lo});
            dst.push_back({mid.hi, next.lo});
        }
        dst = detail::merge_union(dst, 0.0);
    }
    mm.S = detail::intersect_unions(mm.S_nu[0], mm.S_nu[1]);
    std::erase_if(mm.S, [](const Interval& i) { return i.hi - i.lo <= 1e-9; });

    if (ch.ck != 0.0) {
        for (const auto& rp : resonances) {
            if (rp.status == ResonanceStatus::NoZeros || rp.status == ResonanceStatus::RhoZero)
                continue;
            const auto kap = labeled.kappa(rp.n);
            if (v_at(kap.lo) < 0.0 && rp.r_lo > kap.lo) mm.S_R.push_back({kap.lo, rp.r_lo});
            if (v_at(kap.hi) < 0.0 && rp.r_hi < kap.hi) mm.S_R.push_back({rp.r_hi, kap.hi});
        }
        mm.S_R = detail::merge_union(mm.S_R, 0.0);
    }

    auto four = detail::merge_union([&] {
        std::vector<Interval> u = mm.S;
        u.insert(u.end(), mm.S_R.begin(), mm.S_R.end());
        return u;
    }());

    for (const auto& band : bands) {
        // slice the band by the multiplicity-4 subintervals it contains
        std::vector<Interval> cuts;
        for (const auto& f : four) {
            const double lo = std::max(band.lo, f.lo);
            const double hi = std::min(band.hi, f.hi);
            if (hi > lo + 1e-12) cuts.push_back({lo, hi});
        }
        double cursor = band.lo;
        for (const auto& c : cuts) {
            if (c.lo > cursor + 1e-12) mm.pieces.push_back({cursor, c.lo, 2});
            mm.pieces.push_back({c.lo, c.hi, 4});
            cursor = c.hi;
        }
        if (band.hi > cursor + 1e-12) mm.pieces.push_back({cursor, band.hi, 2});
    }
    return mm;
}

/// Full per-channel analysis on a shared grid.
inline ChannelSpectrum analyze_channel(const HillFunction& hf, const HillGrid& grid,
                                       const HillLandmarks& lm, const ChannelParams& ch) {
    ChannelSpectrum cs;
    cs.ch = ch;
    cs.x_max = grid.x_max;
    cs.labeled = locate_labeled_eigenvalues(hf, grid, lm, ch);
    cs.resonances = locate_resonances(hf, lm, ch, cs.labeled);
    cs.endpoints = band_endpoints(hf, ch, cs.labeled, cs.resonances);
    cs.gaps = gaps_channel(cs.endpoints, lm, cs.labeled);
    cs.n_max = cs.endpoints.p_max / 2;

    for (auto& g : cs.gaps)
        g.cls = g.empty() ? GapClass::Empty : classify_gap(g, cs.labeled, cs.resonances);

    // sigma_ac = complement of the gaps below the coverage limit
    if (cs.n_max >= 1) {
        cs.coverage = cs.gaps.at(static_cast<std::size_t>(4 * cs.n_max)).hi;
        std::vector<GapRecord> open;
        for (const auto& g : cs.gaps)
            if (g.index > 0 && !g.empty()) open.push_back(g);
        std::sort(open.begin(), open.end(),
                  [](const GapRecord& a, const GapRecord& b) { return a.lo < b.lo; });
        double cursor = cs.gaps[0].hi;
        for (const auto& g : open) {
            if (g.lo >= cs.coverage) break;
            if (g.lo > cursor + 1e-12) cs.bands.push_back({cursor, g.lo});
            cursor = std::max(cursor, g.hi);
        }
        if (cs.coverage > cursor + 1e-12) cs.bands.push_back({cursor, cs.coverage});
    }
    cs.multiplicity = multiplicity_map(hf, ch, cs.labeled, cs.resonances, cs.bands);
    return cs;
}

/// Spectrum of the full operator: per-channel gaps intersected index by index.
struct FullSpectrum {
    int N = 1;
    double a1 = 0.0, a2 = 0.0, a = 0.0;
    double x_max = 0.0;
    std::vector<ChannelSpectrum> channels;
    std::vector<GapRecord> gaps;    // G_n^a
    std::vector<double> flat_bands; // sigma_pp = Dirichlet spectrum
    std::vector<Interval> bands;    // sigma_ac pieces
    double coverage = 0.0;
    HillLandmarks landmarks;
};

namespace detail {

// one pass at a fixed grid step; CountMismatch propagates to the caller
inline std::pair<HillLandmarks, std::vector<ChannelSpectrum>>
analyze_channels_once(const HillFunction& hf, int N, double a1, double a2, double x_max,
                      double step) {
    const HillGrid grid = HillGrid::build(hf, x_max, step);
    HillLandmarks lm = hill_landmarks(hf, grid);
    std::vector<ChannelSpectrum> channels;
    for (int k = 0; k < N; ++k)
        channels.push_back(analyze_channel(hf, grid, lm, channel_params(k, N, a1, a2)));
    return {std::move(lm), std::move(channels)};
}

} // namespace detail

inline FullSpectrum analyze_full(const HillFunction& hf, int N, double a1, double a2,
                                 double x_max, double step = 0.01) {
    FullSpectrum fs;
    fs.N = N;
    fs.a1 = a1;
    fs.a2 = a2;
    fs.a = a1 + a2;
    fs.x_max = x_max;

    // two-stage grid refinement before a count mismatch becomes fatal
    for (int refine = 0;; ++refine) {
        try {
            std::tie(fs.landmarks, fs.channels) =
                detail::analyze_channels_once(hf, N, a1, a2, x_max, step);
            break;
        } catch (const CountMismatch&) {
            if (refine >= 2) throw;
            step *= 0.5;
            fs.channels.clear();
        }
    }

    int n_max = fs.channels[0].n_max;
    for (const auto& cs : fs.channels) n_max = std::min(n_max, cs.n_max);

    for (int idx = 0; idx <= 4 * n_max; ++idx) {
        GapRecord g = fs.channels[0].gaps.at(static_cast<std::size_t>(idx));
        for (std::size_t k = 1; k < fs.channels.size(); ++k) {
            const auto& gk = fs.channels[k].gaps.at(static_cast<std::size_t>(idx));
            if (idx > 0 && gk.lo > g.lo) {
                g.lo = gk.lo;
                g.prov_lo = gk.prov_lo;
            }
            if (gk.hi < g.hi) {
                g.hi = gk.hi;
                g.prov_hi = gk.prov_hi;
            }
        }
        if (idx > 0 && !g.empty()) {
            // the two endpoints may come from different channels; match each
            // against the union of every channel's zero sets
            detail::ZeroSetMembership a, b;
            for (const auto& cs : fs.channels) {
                detail::collect_membership(g.lo, cs.labeled, cs.resonances,
                                           1e-8 * std::max(1.0, std::abs(g.lo)), a);
                detail::collect_membership(g.hi, cs.labeled, cs.resonances,
                                           1e-8 * std::max(1.0, std::abs(g.hi)), b);
            }
            g.cls = detail::classify_from_membership(a, b);
        } else if (idx > 0) {
            g.cls = GapClass::Empty;
        }
        fs.gaps.push_back(g);
    }

    // TM-3 containments on the merged table
    for (int n = 1; n <= n_max; ++n) {
        const auto gt = fs.landmarks.gap_tilde(n);
        const auto& g4n = fs.gaps.at(static_cast<std::size_t>(4 * n));
        const auto& g4n2 = fs.gaps.at(static_cast<std::size_t>(4 * n - 2));
        const auto kap = fs.channels[0].labeled.kappa(n);
        const double tol = detail::order_tol(kap.hi);
        const auto& slack = fs.landmarks.edge_slack.at(static_cast<std::size_t>(n - 1));
        if (!(g4n.lo <= gt[0] + tol + slack[0] && gt[1] <= g4n.hi + tol + slack[1]))
            throw InternalInconsistency("analyze_full: gamma~_n escaped G_{4n}");
        if (!g4n2.empty() && !(kap.lo - tol <= g4n2.lo && g4n2.hi <= kap.hi + tol))
            throw InternalInconsistency("analyze_full: G_{4n-2} escaped kappa_n");
        const double eta = fs.landmarks.eta.at(static_cast<std::size_t>(n - 1));
        if (!g4n2.empty() && !(g4n2.lo - tol <= eta && eta <= g4n2.hi + tol))
            throw InternalInconsistency("analyze_full: eta_n outside [E-, E+]");
    }

    for (double mu : fs.landmarks.dirichlet) fs.flat_bands.push_back(mu);

    fs.coverage = fs.channels[0].coverage;
    for (const auto& cs : fs.channels) fs.coverage = std::min(fs.coverage, cs.coverage);
    std::vector<GapRecord> open;
    for (const auto& g : fs.gaps)
        if (g.index > 0 && !g.empty()) open.push_back(g);
    std::sort(open.begin(), open.end(),
              [](const GapRecord& a, const GapRecord& b) { return a.lo < b.lo; });
    double cursor = fs.gaps[0].hi;
    for (const auto& g : open) {
        if (g.lo >= fs.coverage) break;
        if (g.lo > cursor + 1e-12) fs.bands.push_back({cursor, g.lo});
        cursor = std::max(cursor, g.hi);
    }
    if (fs.coverage > cursor + 1e-12) fs.bands.push_back({cursor, fs.coverage});
    return fs;
}

/// Leading term of the high-energy endpoint asymptotics.
inline std::pair<double, double> asymptotic_endpoints(int n, int m, double a, double q0) {
    if (n < 1) throw UsageError("asymptotic_endpoints: n >= 1");
    if (m != 0 && m != 1) throw UsageError("asymptotic_endpoints: m in {0,1}");
    const double theta =
        m == 0 ? std::acos(std::sqrt(5.0 + 4.0 * std::abs(std::cos(a))) / 3.0)
               : std::asin(std::sin(a) / 3.0);
    const double base = std::numbers::pi * (n - 0.5 * m);
    const double lo = (base - theta) * (base - theta) + q0;
    const double hi = (base + theta) * (base + theta) + q0;
    return {lo, hi};
}

struct SmallFieldPrediction {
    double E4n_lo = 0.0, E4n_hi = 0.0;   // G_{4n} endpoints
    double E4n2_lo = 0.0, E4n2_hi = 0.0; // G_{4n-2} endpoints
};

/// Leading small-field expansions for an even potential.
inline SmallFieldPrediction small_a_predictions(const HillFunction& hf, const HillLandmarks& lm,
                                                int n, double a) {
    if (!hf.potential().is_even())
        throw EvennessRequired("small_a_predictions: potential must be even");
    SmallFieldPrediction p;
    const auto edge = lm.gap_tilde(n);
    if (!lm.gap_tilde_empty(n)) {
        double m_lo = 0.0, m_hi = 0.0;
        for (const auto& m : lm.masses)
            if (m.n == n) {
                m_lo = m.lower;
                m_hi = m.upper;
            }
        p.E4n_lo = edge[0] + a * a / (9.0 * m_lo);
        p.E4n_hi = edge[1] + a * a / (9.0 * m_hi);
    } else {
        const double e = edge[1];
        const double fpp = hf.f_derivative(e, 2);
        const double shift = std::numbers::sqrt2 * a / (3.0 * std::sqrt(std::abs(fpp)));
        p.E4n_lo = e - shift;
        p.E4n_hi = e + shift;
    }
    const double eta = lm.eta.at(static_cast<std::size_t>(n - 1));
    const double fp = hf.f_derivative(eta, 1);
    p.E4n2_lo = eta - a / (3.0 * std::abs(fp));
    p.E4n2_hi = eta + a / (3.0 * std::abs(fp));
    return p;
}

} // namespace armchair
