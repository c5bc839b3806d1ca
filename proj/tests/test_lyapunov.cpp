#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "armchair/lyapunov.hpp"

using namespace armchair;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double pi = std::numbers::pi;

Potential random_sampled(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-1.5, 1.5);
    const double c1 = amp(rng), c2 = amp(rng), s1 = amp(rng);
    std::vector<double> v(48);
    for (int i = 0; i < 48; ++i) {
        const double t = i / 48.0;
        v[i] = c1 * std::cos(2 * pi * t) + c2 * std::cos(4 * pi * t) + s1 * std::sin(2 * pi * t);
    }
    return Potential::from_samples(v);
}
} // namespace

TEST_CASE("channel params basics") {
    auto c0 = channel_params(0, 2, 0.0, 0.0);
    CHECK(c0.ck == 1.0);
    CHECK(c0.sk == 0.0);

    auto c1 = channel_params(1, 2, 0.0, 0.0);
    CHECK_THAT(c1.ck, WithinAbs(0.0, 1e-15));
    CHECK_THAT(c1.sk, WithinAbs(1.0, 1e-15));

    // k reduced mod N
    auto c5 = channel_params(5, 3, 0.1, 0.2);
    auto c2 = channel_params(2, 3, 0.1, 0.2);
    CHECK(c5.k == 2);
    CHECK(c5.ck == c2.ck);

    CHECK(c5.ck * c5.ck + c5.sk * c5.sk == Catch::Approx(1.0).margin(1e-14));
    CHECK_THROWS_AS(channel_params(0, 0, 0.0, 0.0), UsageError);
}

TEST_CASE("channel shift law: (k, a + pi/N) equals (k+1, a)") {
    const int N = 5;
    for (int k = 0; k < N; ++k) {
        for (double a : {0.0, 0.37, -1.2}) {
            auto lhs = channel_params(k, N, a + pi / N, 0.0);
            auto rhs = channel_params(k + 1, N, a, 0.0);
            if (k + 1 < N) {
                CHECK_THAT(lhs.ck, WithinAbs(rhs.ck, 1e-14));
                CHECK_THAT(lhs.sk, WithinAbs(rhs.sk, 1e-14));
            } else {
                // index wrap flips the sign of (ck, sk); every spectral
                // quantity depends on their squares only
                CHECK_THAT(lhs.ck * lhs.ck, WithinAbs(rhs.ck * rhs.ck, 1e-14));
                CHECK_THAT(lhs.sk * lhs.sk, WithinAbs(rhs.sk * rhs.sk, 1e-14));
            }
        }
    }
}

TEST_CASE("free potential channel values at lambda=0") {
    HillFunction hf(Potential::zero());
    auto lv = lyapunov_values(hf, 0.0, channel_params(0, 2, 0.0, 0.0));
    CHECK_THAT(lv.xi, WithinAbs(4.0, 1e-10));
    CHECK_THAT(lv.rho, WithinAbs(9.0, 1e-10));
    CHECK_THAT(lv.F1, WithinAbs(7.0, 1e-10));
    CHECK_THAT(lv.F2, WithinAbs(1.0, 1e-10));
    CHECK_THAT(lv.Dplus, WithinAbs(0.0, 1e-9));
    CHECK_THAT(lv.Dminus, WithinAbs(64.0, 1e-9));
}

TEST_CASE("even potential collapses the |F_-| kernels") {
    HillFunction hf(Potential::fourier({1.0}, {}));
    for (double lambda : {0.3, 2.0, 11.0}) {
        for (int k : {0, 1, 2}) {
            auto ch = channel_params(k, 3, 0.21, 0.0);
            auto lv = lyapunov_values(hf, lambda, ch);
            CHECK_THAT(lv.h1, WithinAbs(1.0, 1e-9));
            CHECK_THAT(lv.h2, WithinAbs(1.0, 1e-9));
            CHECK_THAT(lv.u, WithinAbs(-ch.sk * ch.sk, 1e-9));
            CHECK_THAT(lv.v, WithinAbs(-ch.ck * ch.ck, 1e-9));
        }
    }
}

TEST_CASE("ck = 0 degeneracy") {
    // N=2, k=1, a=0 puts the channel at ck=0
    HillFunction hf(Potential::delta({{0.52, 3.0}}));
    auto ch = channel_params(1, 2, 0.0, 0.0);
    REQUIRE_THAT(ch.ck, WithinAbs(0.0, 1e-15));
    for (double lambda : {0.5, 3.0, 24.0}) {
        auto hv = hf.values(lambda);
        auto lv = lyapunov_values(hv, ch);
        CHECK_FALSE(lv.fk_defined);
        const double expect = ch.sk * ch.sk * hv.Fminus * hv.Fminus;
        CHECK_THAT(lv.rho, WithinAbs(expect, 1e-9));
        CHECK(lv.rho >= 0.0);
        CHECK_THAT(lv.F1 - lv.F2, WithinAbs(2.0 * std::abs(ch.sk * hv.Fminus), 1e-9));
    }
}

TEST_CASE("D_k^- does not depend on k") {
    SECTION("free potential worked point") {
        HillFunction hf(Potential::zero());
        CHECK(dminus_is_k_independent_check(hf.values(2.0), 3, 0.4) <= 1e-10);
    }
    SECTION("F_- = 0 forces Dminus = (9F^2-1)^2") {
        HillFunction hf(Potential::fourier({0.8}, {}));
        for (double lambda : {0.9, 5.0}) {
            auto hv = hf.values(lambda);
            const double expect = std::pow(9.0 * hv.F * hv.F - 1.0, 2);
            for (int k = 0; k < 3; ++k) {
                auto lv = lyapunov_values(hv, channel_params(k, 3, 0.7, 0.0));
                CHECK_THAT(lv.Dminus, WithinAbs(expect, 1e-8 * std::max(1.0, expect)));
            }
        }
    }
    SECTION("random potential, random energies") {
        HillFunction hf(random_sampled(11));
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> lam(-3.0, 60.0);
        for (int i = 0; i < 100; ++i) {
            auto hv = hf.values(lam(rng));
            CHECK(dminus_is_k_independent_check(hv, 4, 0.31) <= 1e-9);
        }
    }
}

TEST_CASE("factorization against the g and h functions") {
    HillFunction hf(random_sampled(5));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> lam(-2.0, 40.0);
    std::uniform_real_distribution<double> field(-0.8, 0.8);
    for (int i = 0; i < 60; ++i) {
        auto hv = hf.values(lam(rng));
        auto ch = channel_params(i % 3, 3, field(rng), 0.0);
        auto lv = lyapunov_values(hv, ch);
        const double nineF2 = 9.0 * hv.F * hv.F;
        const double dplus = (nineF2 - lv.g1) * (nineF2 - lv.g2);
        const double dminus = (nineF2 - lv.h1) * (nineF2 - lv.h2);
        const double scale = std::max({1.0, std::abs(dplus), std::abs(dminus)});
        CHECK_THAT(lv.Dplus, WithinAbs(dplus, 1e-8 * scale));
        CHECK_THAT(lv.Dminus, WithinAbs(dminus, 1e-8 * scale));
    }
}

TEST_CASE("branch symmetry (k,a) <-> (N-k,-a) and pi-periodicity") {
    HillFunction hf(random_sampled(3));
    const int N = 4;
    for (double lambda : {0.7, 6.1, 19.0}) {
        auto hv = hf.values(lambda);
        for (int k = 0; k < N; ++k) {
            for (double a : {0.2, 0.55}) {
                auto lhs = lyapunov_values(hv, channel_params(k, N, -a, 0.0));
                auto rhs = lyapunov_values(hv, channel_params(N - k, N, a, 0.0));
                CHECK_THAT(lhs.xi, WithinAbs(rhs.xi, 1e-12));
                CHECK_THAT(lhs.rho, WithinAbs(rhs.rho, 1e-12));
                CHECK_THAT(lhs.F1, WithinAbs(rhs.F1, 1e-12));
                CHECK_THAT(lhs.F2, WithinAbs(rhs.F2, 1e-12));
                CHECK_THAT(lhs.g1, WithinAbs(rhs.g1, 1e-12));
                CHECK_THAT(lhs.v, WithinAbs(rhs.v, 1e-12));

                auto per = lyapunov_values(hv, channel_params(k, N, a + pi, 0.0));
                auto base = lyapunov_values(hv, channel_params(k, N, a, 0.0));
                CHECK_THAT(per.F1, WithinAbs(base.F1, 1e-10));
                CHECK_THAT(per.F2, WithinAbs(base.F2, 1e-10));
            }
        }
    }
}

TEST_CASE("branch is locally monotone inside the band") {
    HillFunction hf(Potential::fourier({1.0}, {}));
    auto ch = channel_params(0, 2, 0.3, 0.0);
    // secant slopes of whichever branch sits strictly inside (-1,1), away
    // from branch points and from zeros of F
    for (double lambda = 0.5; lambda < 30.0; lambda += 0.73) {
        auto mid = lyapunov_values(hf.values(lambda), ch);
        if (!mid.real_branches || mid.rho < 1e-4) continue;
        if (std::abs(hf.values(lambda).F) < 1e-3) continue;
        auto lo = lyapunov_values(hf.values(lambda - 1e-5), ch);
        auto hi = lyapunov_values(hf.values(lambda + 1e-5), ch);
        if (!lo.real_branches || !hi.real_branches) continue;
        for (int nu : {1, 2}) {
            const double fm = nu == 1 ? mid.F1 : mid.F2;
            if (!(fm > -0.98 && fm < 0.98)) continue;
            const double slope = ((nu == 1 ? hi.F1 : hi.F2) - (nu == 1 ? lo.F1 : lo.F2)) / 2e-5;
            CHECK(std::abs(slope) > 1e-6);
        }
    }
}
