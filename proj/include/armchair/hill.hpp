#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "armchair/errors.hpp"
#include "armchair/potential.hpp"

namespace armchair {

/// Fundamental-solution data of -y'' + q y = lambda y on [0,1] at t=1:
/// theta has (y,y')(0) = (1,0), phi has (y,y')(0) = (0,1).
struct HillValues {
    double lambda = 0.0;
    double theta1 = 1.0;
    double theta1d = 0.0;
    double phi1 = 0.0;
    double phi1d = 1.0;
    double F = 1.0;      // (phi1d + theta1)/2
    double Fminus = 0.0; // (phi1d - theta1)/2

    double wronskian() const { return theta1 * phi1d - theta1d * phi1; }
};

namespace detail {

// 2x2 fundamental matrix [[theta, phi],[theta', phi']]
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    friend Mat2 operator*(const Mat2& l, const Mat2& r) {
        return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
                l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
    }
    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
    }
};

// Propagator over a constant-potential piece: tau = lambda - v, length len.
// Entries stay real for either sign of tau; series kicks in near tau*len^2 = 0.
inline Mat2 const_propagator(double tau, double len) {
    const double z = tau * len * len;
    double c, s; // s carries the factor len: s = len*sinc-like
    if (std::abs(z) < 1e-6) {
        c = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0;
        s = len * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
    } else if (tau > 0.0) {
        const double w = std::sqrt(tau);
        c = std::cos(w * len);
        s = std::sin(w * len) / w;
    } else {
        const double w = std::sqrt(-tau);
        c = std::cosh(w * len);
        s = std::sinh(w * len) / w;
    }
    return {c, s, -tau * s, c};
}

inline Mat2 delta_jump(double strength) { return {1.0, 0.0, strength, 1.0}; }

} // namespace detail

/// Evaluation engine for the Hill data of one potential. Exact transfer
/// products for piecewise/delta potentials; fixed-step RK4 with cached
/// stage samples of q for the sampled/fourier kinds.
class HillFunction {
public:
    static constexpr double kVerifiedTol = 1e-10;

    explicit HillFunction(Potential q) : q_(std::move(q)) {
        exact_ = q_.exactly_integrable();
        amplitude_ = q_.amplitude();
        if (q_.kind == PotentialKind::Samples)
            grid_quantum_ = static_cast<int>(q_.samples.size());
        if (exact_) build_segments();
    }

    const Potential& potential() const { return q_; }
    bool exact_path() const { return exact_; }

    /// Contract accuracy: exact for piecewise/delta, RK4 certified by a
    /// step-halving check to relative 1e-10 otherwise.
    HillValues values(double lambda) const {
        if (exact_) return from_matrix(lambda, exact_matrix(lambda));
        int n = model_steps(lambda, kVerifiedTol);
        double diff = 0.0;
        for (int attempt = 0; attempt < 5; ++attempt) {
            const detail::Mat2 coarse = integrate(lambda, n);
            const detail::Mat2 fine = integrate(lambda, 2 * n);
            diff = rel_diff(coarse, fine);
            if (diff <= kVerifiedTol) return from_matrix(lambda, fine);
            n *= 2;
        }
        throw IntegrationFailure("fundamental_values: step halving did not converge", diff);
    }

    /// Fixed-step evaluation at the verified-tolerance step model, without the
    /// halving certificate. Deterministic and smooth in lambda; this is what
    /// grid scans and bisections run on.
    HillValues values_model(double lambda) const {
        if (exact_) return from_matrix(lambda, exact_matrix(lambda));
        return from_matrix(lambda, integrate(lambda, model_steps(lambda, kVerifiedTol)));
    }

    /// Fixed step count; used to keep a bisection or a difference stencil on
    /// one smooth approximant.
    HillValues values_fixed(double lambda, int steps) const {
        if (exact_) return from_matrix(lambda, exact_matrix(lambda));
        return from_matrix(lambda, integrate(lambda, steps));
    }

    /// Step count certified by the halving check near this lambda (0 on the
    /// exact path).
    int locked_steps(double lambda) const {
        if (exact_) return 0;
        int n = model_steps(lambda, kVerifiedTol);
        double diff = 0.0;
        for (int attempt = 0; attempt < 5; ++attempt) {
            const detail::Mat2 coarse = integrate(lambda, n);
            const detail::Mat2 fine = integrate(lambda, 2 * n);
            diff = rel_diff(coarse, fine);
            if (diff <= kVerifiedTol) return 2 * n;
            n *= 2;
        }
        throw IntegrationFailure("locked_steps: step halving did not converge", diff);
    }

    double F(double lambda) const { return values(lambda).F; }

    /// Richardson-extrapolated central difference of F; order 1 or 2.
    double f_derivative(double lambda, int order) const {
        if (order != 1 && order != 2) throw UsageError("f_derivative: order must be 1 or 2");
        const double scale = std::sqrt(std::max(1.0, std::abs(lambda)));
        const int n = locked_steps(lambda);
        auto f = [&](double l) { return values_fixed(l, n).F; };
        if (order == 1) {
            const double s = 0.02 * scale;
            const double d1 = (f(lambda + s) - f(lambda - s)) / (2.0 * s);
            const double d2 = (f(lambda + s / 2) - f(lambda - s / 2)) / s;
            return (4.0 * d2 - d1) / 3.0;
        }
        const double s = 0.035 * scale;
        const double f0 = f(lambda);
        const double d1 = (f(lambda + s) - 2.0 * f0 + f(lambda - s)) / (s * s);
        const double d2 = (f(lambda + s / 2) - 2.0 * f0 + f(lambda - s / 2)) / (s * s / 4.0);
        return (4.0 * d2 - d1) / 3.0;
    }

private:
    Potential q_;
    bool exact_ = false;
    double amplitude_ = 0.0;
    int grid_quantum_ = 0; // sample count; RK4 steps are multiples of it

    // exact path: constant pieces and delta jumps, left to right
    struct Piece {
        double length;
        double value;    // potential on the piece
        double jump;     // delta strength applied after the piece (0 for none)
    };
    std::vector<Piece> pieces_;

    mutable std::mutex cache_mutex_;
    mutable std::map<int, std::shared_ptr<const std::vector<double>>> stage_cache_;

    void build_segments() {
        pieces_.clear();
        if (q_.kind == PotentialKind::Piecewise) {
            double prev = 0.0;
            for (std::size_t i = 0; i < q_.breakpoints.size(); ++i) {
                pieces_.push_back({q_.breakpoints[i] - prev, q_.mean_shift + q_.values[i], 0.0});
                prev = q_.breakpoints[i];
            }
            pieces_.push_back({1.0 - prev, q_.mean_shift + q_.values.back(), 0.0});
        } else { // Delta
            double prev = 0.0;
            for (const auto& d : q_.deltas) {
                pieces_.push_back({d.position - prev, q_.mean_shift, d.strength});
                prev = d.position;
            }
            pieces_.push_back({1.0 - prev, q_.mean_shift, 0.0});
        }
    }

    detail::Mat2 exact_matrix(double lambda) const {
        detail::Mat2 m;
        for (const auto& p : pieces_) {
            if (p.length > 0.0) m = detail::const_propagator(lambda - p.value, p.length) * m;
            if (p.jump != 0.0) m = detail::delta_jump(p.jump) * m;
        }
        return m;
    }

    static HillValues from_matrix(double lambda, const detail::Mat2& m) {
        HillValues hv;
        hv.lambda = lambda;
        hv.theta1 = m.a;
        hv.phi1 = m.b;
        hv.theta1d = m.c;
        hv.phi1d = m.d;
        hv.F = 0.5 * (m.d + m.a);
        hv.Fminus = 0.5 * (m.d - m.a);
        return hv;
    }

    static double rel_diff(const detail::Mat2& a, const detail::Mat2& b) {
        const double scale = std::max(1.0, std::max(a.max_abs(), b.max_abs()));
        double d = std::abs(a.a - b.a);
        d = std::max(d, std::abs(a.b - b.b));
        d = std::max(d, std::abs(a.c - b.c));
        d = std::max(d, std::abs(a.d - b.d));
        return d / scale;
    }

    // RK4 phase-error model: error ~ w^5 h^4 / 120 with w the local frequency.
    int model_steps(double lambda, double tol) const {
        const double w = std::sqrt(std::abs(lambda) + amplitude_ + 4.0);
        const double n_raw = 1.4 * std::pow(w, 1.25) / std::pow(120.0 * tol, 0.25);
        int n = std::max(64, static_cast<int>(std::ceil(n_raw)));
        if (grid_quantum_ > 0) {
            int mul = (n + grid_quantum_ - 1) / grid_quantum_;
            int p = 1;
            while (p < mul) p *= 2;
            return grid_quantum_ * p;
        }
        int p = 64;
        while (p < n) p *= 2;
        return p;
    }

    std::shared_ptr<const std::vector<double>> stage_values(int n) const {
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            auto it = stage_cache_.find(n);
            if (it != stage_cache_.end()) return it->second;
        }
        auto vals = std::make_shared<std::vector<double>>(2 * n + 1);
        const double h2 = 0.5 / static_cast<double>(n);
        for (int j = 0; j <= 2 * n; ++j) (*vals)[j] = q_.eval_regular(j * h2);
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto [it, inserted] = stage_cache_.emplace(n, std::move(vals));
        return it->second;
    }

    detail::Mat2 integrate(double lambda, int n) const {
        const auto qs_ptr = stage_values(n);
        const std::vector<double>& qs = *qs_ptr;
        const double h = 1.0 / static_cast<double>(n);
        double u1 = 1.0, v1 = 0.0; // theta column
        double u2 = 0.0, v2 = 1.0; // phi column
        for (int i = 0; i < n; ++i) {
            const double Q0 = qs[2 * i] - lambda;
            const double Qh = qs[2 * i + 1] - lambda;
            const double Q1 = qs[2 * i + 2] - lambda;
            rk4_step(u1, v1, Q0, Qh, Q1, h);
            rk4_step(u2, v2, Q0, Qh, Q1, h);
        }
        return {u1, u2, v1, v2};
    }

    static void rk4_step(double& u, double& v, double Q0, double Qh, double Q1, double h) {
        const double k1u = v;
        const double k1v = Q0 * u;
        const double k2u = v + 0.5 * h * k1v;
        const double k2v = Qh * (u + 0.5 * h * k1u);
        const double k3u = v + 0.5 * h * k2v;
        const double k3v = Qh * (u + 0.5 * h * k2u);
        const double k4u = v + h * k3v;
        const double k4v = Q1 * (u + h * k3u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
};

inline HillValues fundamental_values(const Potential& q, double lambda) {
    return HillFunction(q).values(lambda);
}

inline double f_derivative(const Potential& q, double lambda, int order) {
    return HillFunction(q).f_derivative(lambda, order);
}

/// lambda(x) = sign(x) x^2; all spectral scans run in x.
inline double lambda_of_x(double x) { return x >= 0.0 ? x * x : -x * x; }
inline double x_of_lambda(double lambda) {
    return lambda >= 0.0 ? std::sqrt(lambda) : -std::sqrt(-lambda);
}

} // namespace armchair
