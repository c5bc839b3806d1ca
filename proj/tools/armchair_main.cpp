// Command-line front end: spectral analysis of magnetic Schrodinger operators
// on armchair tube graphs. Subcommands: geometry, hill, lyapunov, bands,
// gaps, sweep, flatband, verify.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "armchair/csv.hpp"
#include "armchair/floquet_fd.hpp"
#include "armchair/flatband.hpp"
#include "armchair/geometry.hpp"
#include "armchair/monodromy.hpp"
#include "armchair/spectrum.hpp"

namespace {

using namespace armchair;

constexpr double kPi = std::numbers::pi;

int thread_count() {
    if (const char* s = std::getenv("ARMCHAIR_THREADS")) {
        const int n = std::atoi(s);
        if (n >= 1) return n;
    }
    return 1;
}

template <typename F>
void parallel_for(int n, F&& body) {
    const int workers = std::min(thread_count(), std::max(1, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

struct Range {
    double lo = 0.0, hi = 0.0, step = 0.0;
};

Range parse_range(const std::string& text, bool with_step) {
    Range r;
    std::istringstream in(text);
    char c1 = 0, c2 = 0;
    if (with_step) {
        if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':' ||
            r.step <= 0.0)
            throw UsageError("expected range lo:hi:step, got '" + text + "'");
    } else {
        if (!(in >> r.lo >> c1 >> r.hi) || c1 != ':')
            throw UsageError("expected range lo:hi, got '" + text + "'");
    }
    if (r.hi < r.lo) throw UsageError("range upper bound below lower bound: '" + text + "'");
    return r;
}

std::string tolerance_echo() {
    return "tolerances: scan_step_x=0.01, bisect_xtol=1e-12, rk4_rel_tol=1e-10, "
           "tangency_tol=1e-10, gap_width_tol=1e-9, endpoint_match_tol=1e-8, "
           "dirichlet_match_tol=1e-9, fd_imag_filter=1e-6, fd_band_inflation=5e-3";
}

struct FieldChoice {
    std::optional<double> B;
    std::optional<double> a1, a2;

    void validate(int N) const {
        const bool has_b = B.has_value();
        const bool has_a = a1.has_value() || a2.has_value();
        if (has_b == has_a)
            throw UsageError("supply exactly one of --B or the pair --a1/--a2");
        if (has_a && (!a1.has_value() || !a2.has_value()))
            throw UsageError("abstract mode needs both --a1 and --a2");
        if (has_b && N < 2) throw UsageError("--B requires N >= 2 (geometry is involved)");
        if (!has_b && N < 1) throw UsageError("N >= 1 required");
    }

    std::pair<double, double> phases(int N) const {
        if (B.has_value()) {
            const auto m = magnetic_phases(*B, N);
            return {m.a1, m.a2};
        }
        return {*a1, *a2};
    }

    std::string echo() const {
        if (B.has_value()) return "B=" + csv::format_double(*B);
        return "a1=" + csv::format_double(*a1) + ", a2=" + csv::format_double(*a2);
    }
};

void echo_config(csv::Writer& w, const std::string& subcommand, const std::string& details) {
    w.comment("armchair " + subcommand);
    w.comment("config: " + details);
    w.comment(tolerance_echo());
}

std::string potential_echo(const std::string& path, const Potential& q) {
    const char* kind = "fourier";
    switch (q.kind) {
        case PotentialKind::Samples: kind = "samples"; break;
        case PotentialKind::Piecewise: kind = "piecewise"; break;
        case PotentialKind::Fourier: kind = "fourier"; break;
        case PotentialKind::Delta: kind = "delta"; break;
    }
    return "potential=" + path + " (" + kind + ", q0=" + csv::format_double(q.q0()) +
           ", even=" + (q.is_even() ? "yes" : "no") + ")";
}

// ---------------------------------------------------------------- geometry

int run_geometry(int N, double B, const std::string& cells, const std::string& out_path,
                 int precision, csv::OutputSet& outputs) {
    const Range win = parse_range(cells, false);
    const int lo = static_cast<int>(std::floor(win.lo));
    const int hi = static_cast<int>(std::floor(win.hi));
    const auto geo = build_geometry(N, lo, hi);
    const auto mag = magnetic_phases(B, N);

    auto& w = outputs.open(out_path, precision);
    echo_config(w, "geometry",
                "N=" + std::to_string(N) + ", B=" + csv::format_double(B) + ", cells=" + cells);
    w.comment("R=" + csv::format_double(geo.R, precision) +
              ", R1=" + csv::format_double(geo.R1, precision) +
              ", R2=" + csv::format_double(geo.R2, precision) +
              ", h=" + csv::format_double(geo.h, precision) +
              ", a1=" + csv::format_double(mag.a1, precision) +
              ", a2=" + csv::format_double(mag.a2, precision) +
              ", a=" + csv::format_double(mag.a, precision));
    w.header({"n", "j", "k", "x1", "y1", "z1", "x2", "y2", "z2"});
    for (const auto& [idx, e] : geo.edge_vectors) {
        const Vec3 p = geo.start(idx);
        const Vec3 q = p + e;
        w.row() << idx.n << idx.j << idx.k << p[0] << p[1] << p[2] << q[0] << q[1] << q[2];
    }
    return 0;
}

// -------------------------------------------------------------------- hill

int run_hill(const std::string& pot_path, double xmax, const std::string& out_path,
             int precision, csv::OutputSet& outputs) {
    const Potential q = Potential::load(pot_path);
    HillFunction hf(q);
    const auto grid = HillGrid::build(hf, xmax);
    const auto lm = hill_landmarks(hf, grid);

    auto& w = outputs.open(out_path, precision);
    echo_config(w, "hill", potential_echo(pot_path, q) + ", xmax=" + csv::format_double(xmax));
    w.comment("record types: grid(x,lambda,F,Fminus) dirichlet(n,mu) eta(n,value) "
              "edge0(lambda) edge(n,lo,hi) mass(n,lower,upper)");
    w.header({"record", "c1", "c2", "c3", "c4"});
    for (std::size_t i = 0; i < grid.xs.size(); ++i) {
        if (grid.xs[i] > grid.x_max) break;
        w.row() << "grid" << grid.xs[i] << lambda_of_x(grid.xs[i]) << grid.vals[i].F
                << grid.vals[i].Fminus;
    }
    for (std::size_t i = 0; i < lm.dirichlet.size(); ++i)
        w.row() << "dirichlet" << static_cast<int>(i + 1) << lm.dirichlet[i];
    for (std::size_t i = 0; i < lm.eta.size(); ++i)
        w.row() << "eta" << static_cast<int>(i + 1) << lm.eta[i];
    w.row() << "edge0" << lm.lambda0_plus;
    for (std::size_t i = 0; i < lm.band_edges.size(); ++i)
        w.row() << "edge" << static_cast<int>(i + 1) << lm.band_edges[i][0]
                << lm.band_edges[i][1];
    for (const auto& m : lm.masses) w.row() << "mass" << m.n << m.lower << m.upper;
    return 0;
}

// ---------------------------------------------------------------- lyapunov

int run_lyapunov(const std::string& pot_path, int N, double a, int k, const std::string& xrange,
                 const std::string& out_path, int precision, csv::OutputSet& outputs) {
    const Potential q = Potential::load(pot_path);
    HillFunction hf(q);
    const Range r = parse_range(xrange, true);
    const auto ch = channel_params(k, N, a, 0.0);

    auto& w = outputs.open(out_path, precision);
    echo_config(w, "lyapunov",
                potential_echo(pot_path, q) + ", N=" + std::to_string(N) +
                    ", a=" + csv::format_double(a) + ", k=" + std::to_string(k) +
                    ", xrange=" + xrange);
    w.header({"x", "lambda", "F", "Fminus", "xi", "rho", "F1", "F2", "in_band1", "in_band2"});
    const auto count = static_cast<int>(std::floor((r.hi - r.lo) / r.step)) + 1;
    for (int i = 0; i < count; ++i) {
        const double x = r.lo + i * r.step;
        const double lambda = lambda_of_x(x);
        const auto hv = hf.values_model(lambda);
        const auto lv = lyapunov_values(hv, ch);
        auto row = w.row();
        row << x << lambda << hv.F << hv.Fminus << lv.xi << lv.rho;
        if (lv.real_branches)
            row << lv.F1 << lv.F2;
        else
            row << "complex_pair" << "complex_pair";
        row << (lv.branch_in_band(1) ? 1 : 0) << (lv.branch_in_band(2) ? 1 : 0);
    }
    return 0;
}

// ------------------------------------------------------------ bands / gaps

void write_channel_files(const FullSpectrum& fs, const HillGrid& grid,
                         const std::string& out_dir, int precision, csv::OutputSet& outputs,
                         const std::string& config) {
    for (const auto& cs : fs.channels) {
        const std::string suffix = "_k" + std::to_string(cs.ch.k) + ".csv";

        auto& wg = outputs.open(out_dir + "/channel" + suffix, precision);
        echo_config(wg, "bands", config + ", k=" + std::to_string(cs.ch.k));
        wg.header({"x", "lambda", "F", "Fminus", "F1", "F2", "in_band1", "in_band2"});
        for (std::size_t i = 0; i < grid.xs.size(); ++i) {
            if (grid.xs[i] > grid.x_max) break;
            const auto lv = lyapunov_values(grid.vals[i], cs.ch);
            auto row = wg.row();
            row << grid.xs[i] << lambda_of_x(grid.xs[i]) << grid.vals[i].F
                << grid.vals[i].Fminus;
            if (lv.real_branches)
                row << lv.F1 << lv.F2;
            else
                row << "complex_pair" << "complex_pair";
            row << (lv.branch_in_band(1) ? 1 : 0) << (lv.branch_in_band(2) ? 1 : 0);
        }

        auto& we = outputs.open(out_dir + "/endpoints" + suffix, precision);
        echo_config(we, "bands", config + ", k=" + std::to_string(cs.ch.k));
        we.header({"nu", "p", "side", "value", "provenance"});
        for (int nu = 1; nu <= 2; ++nu)
            for (int p = 0; p <= cs.endpoints.p_max; ++p) {
                const auto& e = cs.endpoints.at(nu, p);
                if (p > 0) we.row() << nu << p << "-" << e.lo << to_string(e.prov_lo);
                we.row() << nu << p << "+" << e.hi << to_string(e.prov_hi);
            }

        auto& wgap = outputs.open(out_dir + "/gaps" + suffix, precision);
        echo_config(wgap, "bands", config + ", k=" + std::to_string(cs.ch.k));
        wgap.header({"n", "lo", "hi", "class"});
        for (const auto& g : cs.gaps) {
            auto row = wgap.row();
            row << g.index;
            if (g.index == 0)
                row << "-inf";
            else
                row << g.lo;
            row << g.hi << to_string(g.empty() ? GapClass::Empty : g.cls);
        }

        auto& wm = outputs.open(out_dir + "/multiplicity" + suffix, precision);
        echo_config(wm, "bands", config + ", k=" + std::to_string(cs.ch.k));
        wm.header({"lo", "hi", "multiplicity"});
        for (const auto& piece : cs.multiplicity.pieces)
            wm.row() << piece.lo << piece.hi << piece.multiplicity;
    }
}

void write_merged_gaps(const FullSpectrum& fs, csv::Writer& w) {
    w.comment("record types: gap(n,lo,hi,class) flat(n,mu) band(lo,hi)");
    w.header({"record", "c1", "c2", "c3", "c4"});
    for (const auto& g : fs.gaps) {
        auto row = w.row();
        row << "gap" << g.index;
        if (g.index == 0)
            row << "-inf";
        else
            row << g.lo;
        row << g.hi << to_string(g.empty() ? GapClass::Empty : g.cls);
    }
    for (std::size_t i = 0; i < fs.flat_bands.size(); ++i)
        w.row() << "flat" << static_cast<int>(i + 1) << fs.flat_bands[i];
    for (const auto& b : fs.bands) w.row() << "band" << b.lo << b.hi;
}

int run_bands(const std::string& pot_path, int N, const FieldChoice& field, double xmax,
              double xstep, std::optional<int> k_single, const std::string& out_dir,
              int precision, csv::OutputSet& outputs) {
    field.validate(N);
    const auto [a1, a2] = field.phases(N);
    const Potential q = Potential::load(pot_path);
    HillFunction hf(q);

    std::filesystem::create_directories(out_dir);
    const std::string config = potential_echo(pot_path, q) + ", N=" + std::to_string(N) + ", " +
                               field.echo() + ", xmax=" + csv::format_double(xmax) +
                               ", xstep=" + csv::format_double(xstep) +
                               (k_single ? ", k=" + std::to_string(*k_single) : "");

    const HillGrid grid = HillGrid::build(hf, xmax, xstep);
    if (k_single) {
        // single-channel run: channel files only, no merged table
        const auto lm = hill_landmarks(hf, grid);
        FullSpectrum fs;
        fs.x_max = xmax;
        fs.channels.push_back(
            analyze_channel(hf, grid, lm, channel_params(*k_single, N, a1, a2)));
        write_channel_files(fs, grid, out_dir, precision, outputs, config);
        return 0;
    }

    const auto fs = analyze_full(hf, N, a1, a2, xmax, xstep);
    write_channel_files(fs, grid, out_dir, precision, outputs, config);
    auto& w = outputs.open(out_dir + "/gaps_merged.csv", precision);
    echo_config(w, "bands", config);
    write_merged_gaps(fs, w);
    return 0;
}

int run_gaps(const std::string& pot_path, int N, const FieldChoice& field, double xmax,
             const std::string& out_path, int precision, csv::OutputSet& outputs) {
    field.validate(N);
    const auto [a1, a2] = field.phases(N);
    const Potential q = Potential::load(pot_path);
    HillFunction hf(q);
    const auto fs = analyze_full(hf, N, a1, a2, xmax);
    auto& w = outputs.open(out_path, precision);
    echo_config(w, "gaps",
                potential_echo(pot_path, q) + ", N=" + std::to_string(N) + ", " + field.echo() +
                    ", xmax=" + csv::format_double(xmax));
    write_merged_gaps(fs, w);
    return 0;
}

// ------------------------------------------------------------------- sweep

int run_sweep(const std::string& pot_path, int N, const std::string& b_range, double xmax,
              const std::string& out_path, int precision, csv::OutputSet& outputs) {
    if (N < 2) throw UsageError("sweep works in geometry mode and needs N >= 2");
    const Range r = parse_range(b_range, true);
    const Potential q = Potential::load(pot_path);
    HillFunction hf(q);

    const auto count = static_cast<int>(std::floor((r.hi - r.lo) / r.step + 1e-12)) + 1;
    std::vector<FullSpectrum> results(static_cast<std::size_t>(count));
    std::vector<std::string> failures(static_cast<std::size_t>(count));
    parallel_for(count, [&](int i) {
        const double B = r.lo + i * r.step;
        const auto m = magnetic_phases(B, N);
        try {
            results[static_cast<std::size_t>(i)] = analyze_full(hf, N, m.a1, m.a2, xmax);
        } catch (const Error& e) {
            failures[static_cast<std::size_t>(i)] = e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) throw InternalInconsistency("sweep: " + f);

    auto& w = outputs.open(out_path, precision);
    echo_config(w, "sweep",
                potential_echo(pot_path, q) + ", N=" + std::to_string(N) + ", B=" + b_range +
                    ", xmax=" + csv::format_double(xmax));
    w.header({"B", "a", "gap_index", "lo", "hi", "class"});
    for (int i = 0; i < count; ++i) {
        const double B = r.lo + i * r.step;
        const auto& fs = results[static_cast<std::size_t>(i)];
        for (const auto& g : fs.gaps) {
            if (g.index == 0 || g.empty()) continue;
            w.row() << B << fs.a << g.index << g.lo << g.hi << to_string(g.cls);
        }
    }
    return 0;
}

// ---------------------------------------------------------------- flatband

int run_flatband(const std::string& pot_path, int N, const FieldChoice& field, int k,
                 int n_dirichlet, int nu, const std::string& out_path, int precision,
                 csv::OutputSet& outputs) {
    field.validate(N);
    const auto [a1, a2] = field.phases(N);
    if (n_dirichlet < 1) throw UsageError("--n-dirichlet is 1-based");
    const Potential q = Potential::load(pot_path);
    HillFunction hf(q);

    const double x_need = std::sqrt((n_dirichlet + 2) * kPi * (n_dirichlet + 2) * kPi +
                                    q.amplitude()) + 1.0;
    const auto mu = dirichlet_eigenvalues(hf, x_need);
    if (static_cast<std::size_t>(n_dirichlet) > mu.size())
        throw InternalInconsistency("flatband: requested Dirichlet level not located");
    const double mu_n = mu[static_cast<std::size_t>(n_dirichlet - 1)];

    const auto ch = channel_params(k, N, a1, a2);
    const auto ef = build_compact_eigenfunction(hf, ch, mu_n, nu);
    const double residual = kirchhoff_residual(ef.boundary_data(), ch);

    auto& w = outputs.open(out_path, precision);
    echo_config(w, "flatband",
                potential_echo(pot_path, q) + ", N=" + std::to_string(N) + ", " + field.echo() +
                    ", k=" + std::to_string(k) + ", n_dirichlet=" + std::to_string(n_dirichlet) +
                    ", nu=" + std::to_string(nu));
    w.comment("mu=" + csv::format_double(mu_n, precision) +
              ", phi=" + csv::format_double(ef.phi, precision) +
              ", degenerate=" + (ef.degenerate ? std::string("yes") : std::string("no")));
    w.comment("kappa1t=(" + csv::format_double(ef.kappa1t.real(), precision) + "," +
              csv::format_double(ef.kappa1t.imag(), precision) + "), kappa2t=(" +
              csv::format_double(ef.kappa2t.real(), precision) + "," +
              csv::format_double(ef.kappa2t.imag(), precision) + ")");
    w.comment("kirchhoff_residual=" + csv::format_double(residual, 6));
    w.header({"n", "j", "re", "im"});
    for (int n = 0; n <= 1; ++n)
        for (int j = 1; j <= 6; ++j) {
            const auto c = ef.coeff(n, j);
            w.row() << n << j << c.real() << c.imag();
        }
    return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyReport {
    csv::Writer& w;
    bool all_pass = true;
    void line(const std::string& name, double value, double tol) {
        const bool pass = value <= tol;
        all_pass = all_pass && pass;
        w.row() << name << value << tol << (pass ? "pass" : "fail");
    }
};

void verify_monodromy(const HillFunction& hf, int N, double a1, double a2, VerifyReport& rep) {
    std::mt19937 rng(417);
    std::uniform_real_distribution<double> lam(0.4, 45.0);
    std::uniform_int_distribution<int> kpick(0, N - 1);
    double det = 0, symp = 0, recip = 0;
    int accepted = 0;
    while (accepted < 50) {
        const double lambda = lam(rng);
        const auto ch = channel_params(kpick(rng), N, a1, a2);
        try {
            const auto mm = assemble_monodromy(hf, ch, lambda);
            det = std::max(det, mm.det_residual());
            symp = std::max(symp, mm.symplectic_residual());
            recip = std::max(recip, mm.reciprocal_pairing_residual());
            ++accepted;
        } catch (const NearDirichletSingularity&) {
            // resample away from sigma_D
        }
    }
    rep.line("monodromy_det", det, 1e-8);
    rep.line("monodromy_symplectic", symp, 1e-8);
    rep.line("monodromy_reciprocal_pairs", recip, 1e-7);
}

void verify_traces(const HillFunction& hf, int N, double a1, double a2, VerifyReport& rep) {
    std::vector<double> grid;
    for (int i = 0; i < 40; ++i) {
        double l = 0.5 + i * 0.93;
        const double x = std::sqrt(l);
        if (std::abs(x / kPi - std::round(x / kPi)) < 0.03) l += 0.35;
        grid.push_back(l);
    }
    const auto ch = channel_params(1 % N, N, a1, a2);
    const auto res = monodromy_identity_residuals(hf, ch, grid);
    rep.line("trace_zero_field", res.trace_zero_field, 1e-8);
    rep.line("trace_shift", res.trace_shift, 1e-8);
    rep.line("trace_sq_zero_field", res.trace_sq_zero_field, 1e-7);
    rep.line("trace_sq_shift", res.trace_sq_shift, 1e-7);
    rep.line("char_poly_product", res.char_poly, 1e-7);
}

void verify_floquet(const HillFunction& hf, int N, double a1, double a2, int fd_m,
                    VerifyReport& rep) {
    const auto fs = analyze_full(hf, N, a1, a2, 6.0);
    const double lam_max = fs.coverage - 0.05;
    double worst = 0.0;
    const int n_theta = 8;
    std::vector<double> excursions(n_theta, 0.0);
    for (int k = 0; k < N; ++k) {
        const auto& cs = fs.channels[static_cast<std::size_t>(k)];
        const auto ch = channel_params(k, N, a1, a2);
        parallel_for(n_theta, [&](int i) {
            const double theta = 2.0 * kPi * i / n_theta;
            const auto lams = floquet_fd_spectrum(hf.potential(), ch, fd_m, theta, lam_max);
            double local = 0.0;
            for (double l : lams) {
                double d = 1e300;
                for (const auto& b : cs.bands)
                    d = std::min(d, (l < b.lo) ? b.lo - l : (l > b.hi ? l - b.hi : 0.0));
                for (double mu : fs.flat_bands) d = std::min(d, std::abs(l - mu));
                local = std::max(local, d);
            }
            excursions[static_cast<std::size_t>(i)] =
                std::max(excursions[static_cast<std::size_t>(i)], local);
        });
        for (double e : excursions) worst = std::max(worst, e);
    }
    rep.line("floquet_band_containment", worst, 5e-3);
}

int run_verify(const std::string& suite, const std::string& pot_path, int N,
               const FieldChoice& field, int fd_m, const std::string& out_path, int precision,
               csv::OutputSet& outputs) {
    field.validate(N);
    const auto [a1, a2] = field.phases(N);
    const Potential q = Potential::load(pot_path);
    HillFunction hf(q);

    auto& w = outputs.open(out_path, precision);
    echo_config(w, "verify",
                potential_echo(pot_path, q) + ", N=" + std::to_string(N) + ", " + field.echo() +
                    ", suite=" + suite);
    w.header({"check", "max_residual", "tolerance", "status"});
    VerifyReport rep{w};
    if (suite == "monodromy" || suite == "all") verify_monodromy(hf, N, a1, a2, rep);
    if (suite == "traces" || suite == "all") verify_traces(hf, N, a1, a2, rep);
    if (suite == "floquet" || suite == "all") verify_floquet(hf, N, a1, a2, fd_m, rep);
    if (suite != "monodromy" && suite != "traces" && suite != "floquet" && suite != "all")
        throw UsageError("unknown suite '" + suite + "'");
    return rep.all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral toolkit for magnetic armchair tube graphs"};
    app.require_subcommand(1);
    int precision = 15;
    app.add_option("--precision", precision, "significant digits in outputs")
        ->check(CLI::Range(3, 17));

    // geometry
    auto* cmd_geo = app.add_subcommand("geometry", "embedded graph and phase constants");
    int geo_N = 2;
    double geo_B = 0.0;
    std::string geo_cells = "0:1", geo_out;
    cmd_geo->add_option("--N", geo_N, "circumference cell count")->required();
    cmd_geo->add_option("--B", geo_B, "field amplitude")->required();
    cmd_geo->add_option("--cells", geo_cells, "cell window lo:hi");
    cmd_geo->add_option("--out", geo_out, "output CSV")->required();

    // hill
    auto* cmd_hill = app.add_subcommand("hill", "discriminant scan and landmarks");
    std::string hill_pot, hill_out;
    double hill_xmax = 10.0;
    cmd_hill->add_option("--potential", hill_pot)->required();
    cmd_hill->add_option("--xmax", hill_xmax)->required();
    cmd_hill->add_option("--out", hill_out)->required();

    // lyapunov
    auto* cmd_lya = app.add_subcommand("lyapunov", "channel branch functions on a grid");
    std::string lya_pot, lya_xrange, lya_out;
    int lya_N = 1, lya_k = 0;
    double lya_a = 0.0;
    cmd_lya->add_option("--potential", lya_pot)->required();
    cmd_lya->add_option("--N", lya_N)->required();
    cmd_lya->add_option("--a", lya_a)->required();
    cmd_lya->add_option("--k", lya_k)->required();
    cmd_lya->add_option("--xrange", lya_xrange, "lo:hi:step in x = sqrt(lambda)")->required();
    cmd_lya->add_option("--out", lya_out)->required();

    // bands / gaps / sweep / flatband / verify share the field choice
    auto add_field = [](CLI::App* cmd, FieldChoice& f) {
        cmd->add_option("--B", [&f](const std::vector<std::string>& v) {
                f.B = std::stod(v[0]);
                return true;
            },
            "field amplitude (geometry mode)");
        cmd->add_option("--a1", [&f](const std::vector<std::string>& v) {
                f.a1 = std::stod(v[0]);
                return true;
            },
            "phase a1 (abstract mode)");
        cmd->add_option("--a2", [&f](const std::vector<std::string>& v) {
                f.a2 = std::stod(v[0]);
                return true;
            },
            "phase a2 (abstract mode)");
    };

    auto* cmd_bands = app.add_subcommand("bands", "full per-channel band/gap analysis");
    std::string bands_pot, bands_out;
    int bands_N = 2;
    double bands_xmax = 10.0, bands_xstep = 0.01;
    std::optional<int> bands_k;
    FieldChoice bands_field;
    cmd_bands->add_option("--potential", bands_pot)->required();
    cmd_bands->add_option("--N", bands_N)->required();
    add_field(cmd_bands, bands_field);
    cmd_bands->add_option("--xmax", bands_xmax)->required();
    cmd_bands->add_option("--xstep", bands_xstep, "scan step in x")
        ->check(CLI::Range(1e-4, 0.1));
    cmd_bands->add_option("--k",
                          [&bands_k](const std::vector<std::string>& v) {
                              bands_k = std::stoi(v[0]);
                              return true;
                          },
                          "restrict to a single channel");
    cmd_bands->add_option("--out", bands_out, "output directory")->required();

    auto* cmd_gaps = app.add_subcommand("gaps", "merged gap table only");
    std::string gaps_pot, gaps_out;
    int gaps_N = 2;
    double gaps_xmax = 10.0;
    FieldChoice gaps_field;
    cmd_gaps->add_option("--potential", gaps_pot)->required();
    cmd_gaps->add_option("--N", gaps_N)->required();
    add_field(cmd_gaps, gaps_field);
    cmd_gaps->add_option("--xmax", gaps_xmax)->required();
    cmd_gaps->add_option("--out", gaps_out)->required();

    auto* cmd_sweep = app.add_subcommand("sweep", "gap edges as a function of B");
    std::string sweep_pot, sweep_B, sweep_out;
    int sweep_N = 2;
    double sweep_xmax = 8.0;
    cmd_sweep->add_option("--potential", sweep_pot)->required();
    cmd_sweep->add_option("--N", sweep_N)->required();
    cmd_sweep->add_option("--B", sweep_B, "lo:hi:step")->required();
    cmd_sweep->add_option("--xmax", sweep_xmax);
    cmd_sweep->add_option("--out", sweep_out)->required();

    auto* cmd_flat = app.add_subcommand("flatband", "compact flat-band eigenfunction");
    std::string flat_pot, flat_out;
    int flat_N = 2, flat_k = 0, flat_n = 1, flat_nu = 1;
    FieldChoice flat_field;
    cmd_flat->add_option("--potential", flat_pot)->required();
    cmd_flat->add_option("--N", flat_N)->required();
    add_field(cmd_flat, flat_field);
    cmd_flat->add_option("--k", flat_k)->required();
    cmd_flat->add_option("--n-dirichlet", flat_n)->required();
    cmd_flat->add_option("--nu", flat_nu)->check(CLI::Range(1, 2))->required();
    cmd_flat->add_option("--out", flat_out)->required();

    auto* cmd_verify = app.add_subcommand("verify", "cross-validation residual suites");
    std::string verify_suite = "all", verify_pot, verify_out;
    int verify_N = 2, verify_fd_m = 120;
    FieldChoice verify_field;
    cmd_verify->add_option("--suite", verify_suite, "monodromy|traces|floquet|all");
    cmd_verify->add_option("--potential", verify_pot)->required();
    cmd_verify->add_option("--N", verify_N)->required();
    add_field(cmd_verify, verify_field);
    cmd_verify->add_option("--fd-m", verify_fd_m, "points per edge for the FD suite");
    cmd_verify->add_option("--out", verify_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    csv::OutputSet outputs;
    try {
        if (cmd_geo->parsed())
            return run_geometry(geo_N, geo_B, geo_cells, geo_out, precision, outputs);
        if (cmd_hill->parsed())
            return run_hill(hill_pot, hill_xmax, hill_out, precision, outputs);
        if (cmd_lya->parsed())
            return run_lyapunov(lya_pot, lya_N, lya_a, lya_k, lya_xrange, lya_out, precision,
                                outputs);
        if (cmd_bands->parsed())
            return run_bands(bands_pot, bands_N, bands_field, bands_xmax, bands_xstep, bands_k,
                             bands_out, precision, outputs);
        if (cmd_gaps->parsed())
            return run_gaps(gaps_pot, gaps_N, gaps_field, gaps_xmax, gaps_out, precision,
                            outputs);
        if (cmd_sweep->parsed())
            return run_sweep(sweep_pot, sweep_N, sweep_B, sweep_xmax, sweep_out, precision,
                             outputs);
        if (cmd_flat->parsed())
            return run_flatband(flat_pot, flat_N, flat_field, flat_k, flat_n, flat_nu, flat_out,
                                precision, outputs);
        if (cmd_verify->parsed())
            return run_verify(verify_suite, verify_pot, verify_N, verify_field, verify_fd_m,
                              verify_out, precision, outputs);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        outputs.discard_all();
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        outputs.discard_all();
        return 1;
    }
    return 2;
}
