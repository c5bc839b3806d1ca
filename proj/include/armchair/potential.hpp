#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "armchair/errors.hpp"

namespace armchair {

enum class PotentialKind { Samples, Piecewise, Fourier, Delta };

struct DeltaTerm {
    double position = 0.5; // in (0,1)
    double strength = 0.0; // jump of y' across the point: y'(c+) = y'(c-) + strength*y(c)
};

/// 1-periodic edge potential q on [0,1]. Four representations share a common
/// additive constant `mean_shift`; deltas live on top of that constant.
struct Potential {
    PotentialKind kind = PotentialKind::Fourier;

    std::vector<double> samples;     // values at t_i = i/G, periodic, linearly interpolated
    std::vector<double> breakpoints; // strictly increasing, inside (0,1)
    std::vector<double> values;      // piecewise values, size = breakpoints.size() + 1
    std::vector<double> cosines;     // c_m, m = 1..M  (terms c_m cos 2pi m t)
    std::vector<double> sines;       // s_m            (terms s_m sin 2pi m t)
    std::vector<DeltaTerm> deltas;
    double mean_shift = 0.0;

    static Potential zero() { return fourier({}, {}); }

    static Potential fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                             double shift = 0.0) {
        Potential q;
        q.kind = PotentialKind::Fourier;
        q.cosines = std::move(cos_coeffs);
        q.sines = std::move(sin_coeffs);
        q.mean_shift = shift;
        return q;
    }

    static Potential from_samples(std::vector<double> vals, double shift = 0.0) {
        if (vals.empty()) throw UsageError("sampled potential needs at least one sample");
        Potential q;
        q.kind = PotentialKind::Samples;
        q.samples = std::move(vals);
        q.mean_shift = shift;
        return q;
    }

    static Potential piecewise(std::vector<double> breaks, std::vector<double> vals,
                               double shift = 0.0) {
        if (vals.size() != breaks.size() + 1)
            throw UsageError("piecewise potential needs len(values) == len(breakpoints)+1");
        for (std::size_t i = 0; i < breaks.size(); ++i) {
            if (!(breaks[i] > 0.0 && breaks[i] < 1.0))
                throw UsageError("piecewise breakpoints must lie inside (0,1)");
            if (i > 0 && !(breaks[i] > breaks[i - 1]))
                throw UsageError("piecewise breakpoints must be strictly increasing");
        }
        Potential q;
        q.kind = PotentialKind::Piecewise;
        q.breakpoints = std::move(breaks);
        q.values = std::move(vals);
        q.mean_shift = shift;
        return q;
    }

    static Potential delta(std::vector<DeltaTerm> terms, double shift = 0.0) {
        for (const auto& d : terms)
            if (!(d.position > 0.0 && d.position < 1.0))
                throw UsageError("delta positions must lie strictly inside (0,1)");
        Potential q;
        q.kind = PotentialKind::Delta;
        q.deltas = std::move(terms);
        std::sort(q.deltas.begin(), q.deltas.end(),
                  [](const DeltaTerm& a, const DeltaTerm& b) { return a.position < b.position; });
        q.mean_shift = shift;
        return q;
    }

    bool has_delta() const { return kind == PotentialKind::Delta && !deltas.empty(); }

    /// Exact transfer-matrix evaluation applies to these kinds.
    bool exactly_integrable() const {
        return kind == PotentialKind::Piecewise || kind == PotentialKind::Delta;
    }

    /// Mean value q0 = integral over one period (delta masses included).
    double q0() const {
        switch (kind) {
            case PotentialKind::Samples: {
                double s = 0.0;
                for (double v : samples) s += v;
                return mean_shift + s / static_cast<double>(samples.size());
            }
            case PotentialKind::Piecewise: {
                double s = 0.0, prev = 0.0;
                for (std::size_t i = 0; i < breakpoints.size(); ++i) {
                    s += values[i] * (breakpoints[i] - prev);
                    prev = breakpoints[i];
                }
                s += values.back() * (1.0 - prev);
                return mean_shift + s;
            }
            case PotentialKind::Fourier:
                return mean_shift;
            case PotentialKind::Delta: {
                double s = 0.0;
                for (const auto& d : deltas) s += d.strength;
                return mean_shift + s;
            }
        }
        return mean_shift;
    }

    /// Regular (non-delta) part at t; periodic extension.
    double eval_regular(double t) const {
        t -= std::floor(t);
        switch (kind) {
            case PotentialKind::Samples: {
                const auto G = static_cast<double>(samples.size());
                double u = t * G;
                auto i0 = static_cast<std::size_t>(std::floor(u));
                if (i0 >= samples.size()) i0 = 0;
                const std::size_t i1 = (i0 + 1) % samples.size();
                const double w = u - std::floor(u);
                return mean_shift + (1.0 - w) * samples[i0] + w * samples[i1];
            }
            case PotentialKind::Piecewise: {
                const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
                return mean_shift + values[static_cast<std::size_t>(it - breakpoints.begin())];
            }
            case PotentialKind::Fourier: {
                double s = mean_shift;
                const double w = 2.0 * std::numbers::pi * t;
                for (std::size_t m = 0; m < cosines.size(); ++m)
                    s += cosines[m] * std::cos(w * static_cast<double>(m + 1));
                for (std::size_t m = 0; m < sines.size(); ++m)
                    s += sines[m] * std::sin(w * static_cast<double>(m + 1));
                return s;
            }
            case PotentialKind::Delta:
                return mean_shift;
        }
        return mean_shift;
    }

    /// Lower bound estimate for the regular part (used to pick the scan floor).
    double min_regular() const {
        if (kind == PotentialKind::Delta) return mean_shift;
        double m = eval_regular(0.0);
        for (int i = 1; i < 2048; ++i) m = std::min(m, eval_regular(i / 2048.0));
        return m;
    }

    /// Rough amplitude scale (regular part), used by step-size models.
    double amplitude() const {
        double m = 0.0;
        if (kind == PotentialKind::Delta) {
            for (const auto& d : deltas) m += std::abs(d.strength);
            return std::abs(mean_shift) + m;
        }
        for (int i = 0; i < 512; ++i) m = std::max(m, std::abs(eval_regular(i / 512.0)));
        return m;
    }

    double l2_norm() const {
        if (kind == PotentialKind::Delta) return amplitude();
        double s = 0.0;
        constexpr int n = 4096;
        for (int i = 0; i < n; ++i) {
            const double v = eval_regular((i + 0.5) / n);
            s += v * v;
        }
        return std::sqrt(s / n);
    }

    /// q(1-t) == q(t)? Exact for fourier (all sines zero) and delta
    /// (mirror-symmetric term list); pointwise test elsewhere.
    bool is_even(double tol = 1e-10) const {
        switch (kind) {
            case PotentialKind::Fourier:
                for (double s : sines)
                    if (s != 0.0) return false;
                return true;
            case PotentialKind::Delta: {
                const std::size_t n = deltas.size();
                for (std::size_t i = 0; i < n; ++i) {
                    const auto& d = deltas[i];
                    const auto& m = deltas[n - 1 - i];
                    if (std::abs((1.0 - d.position) - m.position) > 1e-12) return false;
                    if (std::abs(d.strength - m.strength) > 1e-12) return false;
                }
                return true;
            }
            case PotentialKind::Samples: {
                const std::size_t G = samples.size();
                for (std::size_t i = 0; i < G; ++i)
                    if (std::abs(samples[i] - samples[(G - i) % G]) > tol) return false;
                return true;
            }
            case PotentialKind::Piecewise: {
                // compare q(t) and q(1-t) at midpoints of the partition merged
                // with its mirror image
                std::vector<double> pts{0.0, 1.0};
                for (double b : breakpoints) {
                    pts.push_back(b);
                    pts.push_back(1.0 - b);
                }
                std::sort(pts.begin(), pts.end());
                for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                    const double t = 0.5 * (pts[i] + pts[i + 1]);
                    if (pts[i + 1] - pts[i] < 1e-14) continue;
                    if (std::abs(eval_regular(t) - eval_regular(1.0 - t)) > tol) return false;
                }
                return true;
            }
        }
        return false;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        switch (kind) {
            case PotentialKind::Samples:
                j["type"] = "samples";
                j["values"] = samples;
                break;
            case PotentialKind::Piecewise:
                j["type"] = "piecewise";
                j["breakpoints"] = breakpoints;
                j["values"] = values;
                break;
            case PotentialKind::Fourier:
                j["type"] = "fourier";
                j["cos"] = cosines;
                j["sin"] = sines;
                break;
            case PotentialKind::Delta: {
                j["type"] = "delta";
                auto terms = nlohmann::json::array();
                for (const auto& d : deltas)
                    terms.push_back({{"position", d.position}, {"strength", d.strength}});
                j["terms"] = terms;
                break;
            }
        }
        if (mean_shift != 0.0) j["mean_shift"] = mean_shift;
        return j;
    }

    static Potential from_json(const nlohmann::json& j) {
        if (!j.contains("type")) throw UsageError("potential file: missing 'type'");
        const std::string type = j.at("type").get<std::string>();
        const double shift = j.value("mean_shift", 0.0);
        if (type == "samples")
            return from_samples(j.at("values").get<std::vector<double>>(), shift);
        if (type == "piecewise")
            return piecewise(j.at("breakpoints").get<std::vector<double>>(),
                             j.at("values").get<std::vector<double>>(), shift);
        if (type == "fourier")
            return fourier(j.value("cos", std::vector<double>{}),
                           j.value("sin", std::vector<double>{}), shift);
        if (type == "delta") {
            std::vector<DeltaTerm> terms;
            for (const auto& t : j.at("terms"))
                terms.push_back({t.at("position").get<double>(), t.at("strength").get<double>()});
            return delta(std::move(terms), shift);
        }
        throw UsageError("potential file: unknown type '" + type + "'");
    }

    static Potential load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open potential file: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("potential file parse error: " + std::string(e.what()));
        }
        return from_json(j);
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw UsageError("cannot write potential file: " + path);
        out << to_json().dump(2) << "\n";
    }
};

} // namespace armchair
