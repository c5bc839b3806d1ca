#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "armchair/errors.hpp"

namespace armchair {

/// A located zero in the scan coordinate. multiplicity 2 marks a tangency
/// (touch without sign change).
struct Zero {
    double x = 0.0;
    int multiplicity = 1;
};

struct ScanOptions {
    double x_tol = 1e-12;        // bisection interval width
    double tangency_tol = 1e-10; // |w| at an extremum below this counts as a double zero
    int max_bisect = 128;
};

namespace detail {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double flo,
                     const ScanOptions& opt) {
    for (int i = 0; i < opt.max_bisect && hi - lo > opt.x_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) != (fm < 0.0))
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

// Extremum of w on [lo,hi]; direction = +1 looks for a minimum (w positive at
// the ends), -1 for a maximum. Coarse ternary search, then a parabolic vertex
// fit with a stride wide enough that evaluation noise does not steer it.
inline std::pair<double, double> extremum(const std::function<double(double)>& f, double lo,
                                          double hi, int direction) {
    const double lo0 = lo, hi0 = hi;
    for (int i = 0; i < 80 && hi - lo > 1e-4; ++i) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (direction * f(m1) < direction * f(m2))
            hi = m2;
        else
            lo = m1;
    }
    double xm = 0.5 * (lo + hi);
    for (double d : {2e-3, 3e-4}) {
        const double wl = f(xm - d), w0 = f(xm), wr = f(xm + d);
        const double curv = wl - 2.0 * w0 + wr;
        if (direction * curv <= 0.0) break;
        double shift = 0.5 * d * (wl - wr) / curv;
        shift = std::clamp(shift, -2.0 * d, 2.0 * d);
        xm = std::clamp(xm + shift, lo0, hi0);
    }
    return {xm, f(xm)};
}

} // namespace detail

/// Locate zeros of w on a precomputed grid: sign changes bisected, tangencies
/// caught by refining cells whose parabola through three points dips near
/// zero. Near-tangent pairs (a dip that actually crosses) come back as two
/// simple zeros.
inline std::vector<Zero> locate_zeros(std::span<const double> xs, std::span<const double> ws,
                                      const std::function<double(double)>& f,
                                      const ScanOptions& opt = {}) {
    std::vector<Zero> zeros;
    const std::size_t n = xs.size();
    if (n < 2) return zeros;

    std::vector<bool> consumed(n, false); // cells already resolved by a dip refinement

    auto add_zero = [&](double x, int mult) { zeros.push_back({x, mult}); };

    // pass 1: dip candidates (local extremum of w approaching zero without a
    // grid sign change nearby)
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double w0 = ws[i - 1], w1 = ws[i], w2 = ws[i + 1];
        if (w0 == 0.0 || w1 == 0.0 || w2 == 0.0) continue;
        const bool same_sign = (w0 > 0) == (w1 > 0) && (w1 > 0) == (w2 > 0);
        if (!same_sign) continue;
        const int dir = w1 > 0 ? 1 : -1;
        if (!(std::abs(w1) <= std::abs(w0) && std::abs(w1) <= std::abs(w2))) continue;
        // parabola through the three points; predicted extremal value
        const double curv = (w0 - 2.0 * w1 + w2); // = w'' d^2
        if (dir * curv <= 0.0) continue;          // not curving back toward zero
        const double slope = (w2 - w0) / 2.0;
        const double pred = w1 - slope * slope / (2.0 * curv);
        const double scale = std::max(1.0, std::max(std::abs(w0), std::abs(w2)));
        if (dir * pred > 0.05 * scale) continue; // extremum stays well away from zero
        auto [xm, wm] = detail::extremum(f, xs[i - 1], xs[i + 1], dir);
        if (dir * wm < 0.0) {
            // the dip crosses: two simple zeros inside [x_{i-1}, x_{i+1}]
            add_zero(detail::bisect(f, xs[i - 1], xm, f(xs[i - 1]), opt), 1);
            add_zero(detail::bisect(f, xm, xs[i + 1], wm, opt), 1);
            consumed[i - 1] = consumed[i] = true;
        } else if (std::abs(wm) <= opt.tangency_tol * scale) {
            add_zero(xm, 2);
            consumed[i - 1] = consumed[i] = true;
        }
    }

    // pass 2: plain sign changes
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (consumed[i]) continue;
        const double wl = ws[i], wr = ws[i + 1];
        if (wl == 0.0) {
            if (i == 0 || ws[i - 1] != 0.0) add_zero(xs[i], 1);
            continue;
        }
        if ((wl < 0.0) != (wr < 0.0)) add_zero(detail::bisect(f, xs[i], xs[i + 1], wl, opt), 1);
    }

    std::sort(zeros.begin(), zeros.end(), [](const Zero& a, const Zero& b) { return a.x < b.x; });
    return zeros;
}

/// Zeros expanded with multiplicity into a flat sorted list.
inline std::vector<double> expand_zeros(const std::vector<Zero>& zs) {
    std::vector<double> out;
    out.reserve(zs.size() * 2);
    for (const auto& z : zs)
        for (int i = 0; i < z.multiplicity; ++i) out.push_back(z.x);
    return out;
}

} // namespace armchair
