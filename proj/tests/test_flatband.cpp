#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "armchair/flatband.hpp"
#include "armchair/landmarks.hpp"

using namespace armchair;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double pi = std::numbers::pi;

Potential uneven() {
    std::vector<double> v(48);
    for (int i = 0; i < 48; ++i) {
        const double t = i / 48.0;
        v[i] = 1.1 * std::cos(2 * pi * t) - 0.6 * std::sin(2 * pi * t);
    }
    return Potential::from_samples(v);
}
} // namespace

TEST_CASE("worked coefficients at mu = pi^2, q = 0") {
    HillFunction hf(Potential::zero());
    SECTION("N=2, k=1, a=0: non-degenerate with kappa~ = 2") {
        auto ch = channel_params(1, 2, 0.0, 0.0);
        auto ef = build_compact_eigenfunction(hf, ch, pi * pi, 1);
        CHECK_FALSE(ef.degenerate);
        CHECK_THAT(ef.phi, WithinAbs(-1.0, 1e-9));
        CHECK_THAT(std::abs(ef.kappa1t - 2.0), WithinAbs(0.0, 1e-9));
        CHECK_THAT(std::abs(ef.kappa2t - 2.0), WithinAbs(0.0, 1e-9));
        CHECK_THAT(std::abs(ef.coeff(1, 4)), WithinAbs(0.0, 1e-9)); // phi^2(phi^2-1) = 0
        CHECK_THAT(std::abs(ef.coeff(0, 5) - 2.0), WithinAbs(0.0, 1e-9));
    }
    SECTION("k=0, a=0: degenerate branch") {
        auto ch = channel_params(0, 2, 0.0, 0.0);
        auto ef = build_compact_eigenfunction(hf, ch, pi * pi, 2);
        CHECK(ef.degenerate);
        CHECK_THAT(std::abs(ef.coeff(0, 1)), WithinAbs(0.0, 1e-12));
        CHECK_THAT(std::abs(ef.coeff(0, 2) - 1.0), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("translation shifts the support") {
    HillFunction hf(Potential::zero());
    auto ch = channel_params(1, 3, 0.2, 0.1);
    auto ef = build_compact_eigenfunction(hf, ch, pi * pi, 1);
    auto shifted = ef.translated(5);
    for (const auto& [key, c] : ef.coeffs)
        CHECK(std::abs(shifted.coeff(key.first + 5, key.second) - c) < 1e-15);
}

TEST_CASE("constructed eigenfunctions satisfy the Kirchhoff conditions") {
    for (const Potential& q : {Potential::zero(), Potential::fourier({1.0}, {}), uneven()}) {
        HillFunction hf(q);
        auto grid = HillGrid::build(hf, 8.0);
        auto mu = dirichlet_eigenvalues(hf, grid);
        REQUIRE(mu.size() >= 2);
        for (int k = 0; k < 3; ++k) {
            for (double a : {0.0, 0.37}) {
                auto ch = channel_params(k, 3, a, 0.12);
                for (int nu : {1, 2}) {
                    for (int n : {0, 1}) {
                        auto ef = build_compact_eigenfunction(hf, ch, mu[n], nu);
                        CHECK(kirchhoff_residual(ef.boundary_data(), ch) <= 1e-10);
                    }
                }
            }
        }
    }
}

TEST_CASE("zero data has zero residual, perturbations are visible") {
    HillFunction hf(Potential::zero());
    auto ch = channel_params(1, 2, 0.3, 0.1);
    CHECK(kirchhoff_residual({}, ch) == 0.0);

    auto ef = build_compact_eigenfunction(hf, ch, pi * pi, 1);
    auto data = ef.boundary_data();
    auto key = data.begin()->first;
    data[key].deriv0 += 1e-3;
    CHECK(kirchhoff_residual(data, ch) >= 1e-4);
}

TEST_CASE("edge profile solves the edge equation") {
    // psi_{n,j} = C phi(., mu); sample phi on a fine uniform grid with a
    // test-local integrator and check the five-point stencil residual of
    // -phi'' + q phi - mu phi at ten interior points
    for (const Potential& q : {Potential::zero(), uneven()}) {
        HillFunction hf(q);
        auto grid = HillGrid::build(hf, 7.0);
        const double mu = dirichlet_eigenvalues(hf, grid)[0];

        const int m = 8000;
        const double h = 1.0 / m;
        std::vector<double> phi(m + 1);
        double u = 0.0, v = 1.0;
        phi[0] = 0.0;
        for (int i = 0; i < m; ++i) {
            auto rhs = [&](double t, double uu) { return (q.eval_regular(t) - mu) * uu; };
            const double t = i * h;
            const double k1u = v, k1v = rhs(t, u);
            const double k2u = v + 0.5 * h * k1v, k2v = rhs(t + 0.5 * h, u + 0.5 * h * k1u);
            const double k3u = v + 0.5 * h * k2v, k3v = rhs(t + 0.5 * h, u + 0.5 * h * k2u);
            const double k4u = v + h * k3v, k4v = rhs(t + h, u + h * k3u);
            u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
            v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
            phi[static_cast<std::size_t>(i) + 1] = u;
        }
        CHECK_THAT(phi[m], WithinAbs(0.0, 1e-7)); // Dirichlet at both ends

        for (int p = 1; p <= 10; ++p) {
            const int i = p * m / 11;
            const double d2 =
                (-phi[i + 2] + 16 * phi[i + 1] - 30 * phi[i] + 16 * phi[i - 1] - phi[i - 2]) /
                (12 * h * h);
            const double r = -d2 + (q.eval_regular(i * h) - mu) * phi[i];
            CHECK_THAT(r, WithinAbs(0.0, 1e-8));
        }
    }
}

TEST_CASE("vanishing at vertices") {
    HillFunction hf(uneven());
    auto grid = HillGrid::build(hf, 8.0);
    auto mu = dirichlet_eigenvalues(hf, grid);
    auto ch = channel_params(2, 3, 0.4, 0.0);
    auto ef = build_compact_eigenfunction(hf, ch, mu[0], 2);
    for (const auto& [key, d] : ef.boundary_data()) {
        CHECK(std::abs(d.value0) <= 1e-10);
        CHECK(std::abs(d.value1) <= 1e-10);
    }
}

TEST_CASE("degeneracy dichotomy: kappa~ vanishes exactly at (s_k, phi^2) = (0,1)") {
    for (int N : {2, 3}) {
        for (int k = 0; k < N; ++k) {
            for (double a : {0.0, 0.3, pi / (2.0 * 3)}) {
                auto ch = channel_params(k, N, a, 0.0);
                for (double phi : {-1.0, 1.0, -0.7, 1.3}) {
                    const std::complex<double> sk = ch.sk_root();
                    const auto e2ia = std::polar(1.0, 2.0 * ch.a);
                    const auto k1 = 1.0 - sk * e2ia * phi * phi;
                    const auto k2 = 1.0 - sk * e2ia * phi * phi * phi * phi;
                    const bool vanished = std::abs(k1 * k2) < 1e-12;
                    const bool degenerate = ch.sk == 0.0 && std::abs(phi * phi - 1.0) < 1e-12;
                    CHECK(vanished == degenerate);
                }
            }
        }
    }
}

TEST_CASE("the two eigenfunctions are linearly independent") {
    HillFunction hf(Potential::fourier({1.0}, {}));
    auto grid = HillGrid::build(hf, 8.0);
    auto mu = dirichlet_eigenvalues(hf, grid);
    for (auto [k, a] : {std::pair<int, double>{1, 0.0}, {0, 0.25}, {0, 0.0}}) {
        auto ch = channel_params(k, 2, a, 0.0);
        auto e1 = build_compact_eigenfunction(hf, ch, mu[0], 1);
        auto e2 = build_compact_eigenfunction(hf, ch, mu[0], 2);
        // rank-2 test on the witness edges of the relevant branch
        const auto j_pair = e1.degenerate ? std::pair<int, int>{1, 2} : std::pair<int, int>{5, 6};
        const std::complex<double> det = e1.coeff(0, j_pair.first) * e2.coeff(0, j_pair.second) -
                                         e1.coeff(0, j_pair.second) * e2.coeff(0, j_pair.first);
        CHECK(std::abs(det) > 1e-9);
    }
}

TEST_CASE("expansion round trip") {
    HillFunction hf(uneven());
    auto grid = HillGrid::build(hf, 8.0);
    auto mu = dirichlet_eigenvalues(hf, grid);

    SECTION("non-degenerate branch") {
        auto ch = channel_params(1, 3, 0.21, 0.05);
        for (int nu : {1, 2}) {
            for (int shift : {0, 3}) {
                auto ef = build_compact_eigenfunction(hf, ch, mu[1], nu).translated(shift);
                auto hat = expansion_coefficients(ef.boundary_data(), ch, hf, mu[1]);
                for (const auto& [n, pair] : hat.hat) {
                    REQUIRE(pair.size() == 2);
                    for (int b : {1, 2}) {
                        const std::complex<double> expect = (n == shift && b == nu) ? 1.0 : 0.0;
                        CHECK(std::abs(hat.at(n, b) - expect) <= 1e-10);
                    }
                }
                CHECK(std::abs(hat.at(shift, nu) - 1.0) <= 1e-10);
            }
        }
    }
    SECTION("degenerate branch") {
        HillFunction even(Potential::fourier({1.0}, {}));
        auto egrid = HillGrid::build(even, 8.0);
        auto emu = dirichlet_eigenvalues(even, egrid);
        auto ch = channel_params(0, 2, 0.0, 0.0);
        for (int nu : {1, 2}) {
            auto ef = build_compact_eigenfunction(even, ch, emu[0], nu);
            REQUIRE(ef.degenerate);
            auto hat = expansion_coefficients(ef.boundary_data(), ch, even, emu[0]);
            CHECK(std::abs(hat.at(0, nu) - 1.0) <= 1e-10);
            CHECK(std::abs(hat.at(0, 3 - nu)) <= 1e-10);
            CHECK(std::abs(hat.at(1, nu)) <= 1e-10);
        }
    }
    SECTION("linearity and the zero function") {
        auto ch = channel_params(2, 3, 0.4, 0.1);
        auto e1 = build_compact_eigenfunction(hf, ch, mu[0], 1);
        auto e2 = build_compact_eigenfunction(hf, ch, mu[0], 2);
        const std::complex<double> alpha{0.3, -1.1}, beta{2.0, 0.7};
        EdgeDataMap mix;
        for (int n : {0, 1})
            for (int j = 1; j <= 6; ++j) {
                EdgeBoundaryData d;
                d.deriv0 = alpha * e1.coeff(n, j) + beta * e2.coeff(n, j);
                d.deriv1 = (alpha * e1.coeff(n, j) + beta * e2.coeff(n, j)) * e1.phi;
                mix[{n, j}] = d;
            }
        auto hat = expansion_coefficients(mix, ch, hf, mu[0]);
        CHECK(std::abs(hat.at(0, 1) - alpha) <= 1e-12);
        CHECK(std::abs(hat.at(0, 2) - beta) <= 1e-12);

        auto zero = expansion_coefficients({}, ch, hf, mu[0]);
        CHECK(zero.hat.empty());
    }
}

TEST_CASE("rejects non-Dirichlet energies") {
    HillFunction hf(Potential::zero());
    auto ch = channel_params(0, 2, 0.1, 0.1);
    CHECK_THROWS_AS(build_compact_eigenfunction(hf, ch, 5.0, 1), NotAnEigenvalue);
    CHECK_THROWS_AS(expansion_coefficients({}, ch, hf, 5.0), NotAnEigenvalue);
}
