#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "levylab/kernel.hpp"

#include <cmath>

using namespace levylab;

TEST_CASE("zero-width propagator is the discrete delta") {
    GridSpec g(1, 128, 16.0);
    SymbolParams p = SymbolParams::isotropic(1, 1.5);
    KernelTable k = propagator(p, 0.3, 0.3, g);
    for (const auto& m : k.multiplier) CHECK(std::abs(m - complex(1.0)) < 1e-14);
    Field d = delta_field(g);
    double err = 0.0;
    for (int idx = 0; idx < g.points(); ++idx)
        err = std::max(err, std::abs(k.kernel.values[idx] - d.values[idx]));
    CHECK(err < 1e-9);
    CHECK_THROWS(propagator(p, 1.0, 0.5, g));
}

TEST_CASE("heat kernel closed form at alpha=2") {
    GridSpec g(1, 256, 32.0);
    SymbolParams p;
    p.dim = 1;
    p.alpha = 2.0;
    p.mu = 1.0;
    p.quad = SphereQuadrature::make(1);
    p.drift = CoefficientTable<std::vector<double>>::frozen({0.0});
    p.diffusion = CoefficientTable<std::vector<double>>::frozen({1.0});
    p.jump_density = CoefficientTable<std::vector<double>>::frozen({0.0, 0.0});
    double tau = 0.5;
    KernelTable k = propagator(p, 0.0, tau, g);
    double err = 0.0;
    for (int idx = 0; idx < g.points(); ++idx) {
        double x = g.point(idx)[0];
        double expect = std::exp(-x * x / (4.0 * tau)) / std::sqrt(4.0 * M_PI * tau);
        err = std::max(err, std::abs(k.kernel.values[idx] - complex(expect)));
    }
    CHECK(err < 1e-8);
    CHECK(std::abs(riemann_integral(k.kernel) - complex(1.0)) < 1e-10);
}

TEST_CASE("Cauchy kernel closed form at alpha=1") {
    // periodization of the |x|^{-2} tail contributes about pi/(3 L^2)
    // uniformly, so L = 64 keeps the aliasing within the 1e-3 budget
    GridSpec g(1, 512, 64.0);
    SymbolParams p = SymbolParams::isotropic(1, 1.0); // psi = -|xi| exactly
    KernelTable k = propagator(p, 0.0, 1.0, g);
    double err = 0.0;
    for (int idx = 0; idx < g.points(); ++idx) {
        double x = g.point(idx)[0];
        if (std::abs(x) > g.length / 4.0) continue;
        double expect = (1.0 / M_PI) / (1.0 + x * x);
        err = std::max(err, std::abs(k.kernel.values[idx] - complex(expect)));
    }
    CHECK(err < 1e-3);
    CHECK(std::abs(riemann_integral(k.kernel) - complex(1.0)) < 1e-10);
}

TEST_CASE("kernel mass, positivity and spectral domination") {
    GridSpec g(1, 256, 32.0);
    for (double alpha : {1.0, 1.5, 2.0}) {
        SymbolParams p = SymbolParams::isotropic(1, alpha);
        if (alpha == 2.0) {
            p.diffusion = CoefficientTable<std::vector<double>>::frozen({1.0});
            p.jump_density = CoefficientTable<std::vector<double>>::frozen({0.0, 0.0});
        }
        p.mu = 1.0; // sup Re psi~ = -1 for these calibrated symbols
        KernelTable k = propagator(p, 0.0, 0.7, g);
        CHECK(std::abs(riemann_integral(k.kernel) - complex(1.0)) < 1e-10);
        double mx = 0.0, mn = 0.0;
        for (const auto& v : k.kernel.values) {
            mx = std::max(mx, v.real());
            mn = std::min(mn, v.real());
        }
        CHECK(mn >= -1e-3 * mx);
        CHECK(domination_margin(k, p.mu, alpha) <= 1.0 + 1e-12);
        CHECK(k.symmetrization_deviation < 1e-12);
        CHECK(k.kernel.max_imag() < 1e-12 * mx);
    }
}

TEST_CASE("Chapman-Kolmogorov composition") {
    GridSpec g(1, 128, 16.0);
    SymbolParams p = SymbolParams::isotropic(1, 1.3);
    // time-varying density: two pieces
    p.jump_density.knots = {0.0, 0.4, 1.0};
    p.jump_density.values = {{1.0, 1.0}, {2.0, 2.0}};
    KernelTable k_su = propagator(p, 0.1, 0.5, g);
    KernelTable k_ut = propagator(p, 0.5, 0.9, g);
    KernelTable k_st = propagator(p, 0.1, 0.9, g);
    Field comp = periodic_convolve(k_su.kernel, k_ut.kernel);
    double err = 0.0;
    for (int idx = 0; idx < g.points(); ++idx)
        err = std::max(err, std::abs(comp.values[idx] - k_st.kernel.values[idx]));
    CHECK(err < 1e-10);
}

TEST_CASE("dyadic kernel at t=s is the widened block kernel") {
    GridSpec g(1, 256, 32.0);
    SymbolParams p = SymbolParams::isotropic(1, 1.5);
    LPBank bank = build_bank(g, default_bank_order(g));
    DyadicKernel dk = dyadic_kernel(p, bank, 0, 0.0, 0.0);
    for (int idx = 0; idx < g.points(); ++idx)
        CHECK(std::abs(dk.multiplier[idx] - complex(bank.tilde[0][idx])) < 1e-14);
}

TEST_CASE("dyadic kernel spectrum lives on the widened annulus") {
    GridSpec g(1, 256, 32.0);
    SymbolParams p = SymbolParams::isotropic(1, 1.5);
    LPBank bank = build_bank(g, default_bank_order(g));
    for (int j = 1; j <= 3; ++j) {
        DyadicKernel dk = dyadic_kernel(p, bank, j, 0.0, 0.25);
        for (int idx = 0; idx < g.points(); ++idx) {
            double r = g.freq_norm(idx);
            if (r < std::exp2(j - 2) || r > std::exp2(j + 2))
                CHECK(std::abs(dk.multiplier[idx]) == 0.0);
        }
    }
}

TEST_CASE("L1 decay scan: envelope domination, positive rate, collapse") {
    // dxi = 2 pi/64 resolves the low blocks, n/L = 256 points per unit
    // resolves the j = 4 kernel scale
    GridSpec g(1, 16384, 64.0);
    SymbolParams p = SymbolParams::isotropic(1, 1.5);
    LPBank bank = build_bank(g, default_bank_order(g));
    std::vector<int> js{1, 2, 3, 4};
    std::vector<double> taus;
    for (int k = 0; k <= 8; ++k) taus.push_back(std::exp2(-1.5 * k));
    DecayScanResult res = l1_decay_scan(p, bank, js, taus);

    CHECK(res.c_fit > 0.0);
    const double floor = 1e-8 * 3.0;
    for (const auto& e : res.entries)
        if (e.l1 > floor) CHECK(e.l1 <= e.envelope * (1.0 + 1e-12));
    CHECK(res.collapse_spread < 0.2);
    CHECK(res.h0_max < 4.0);
    for (double v : res.h0_l1) CHECK(std::isfinite(v));

    // beyond the envelope peak the norms decay monotonically in u
    for (int j : js) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& e : res.entries)
            if (e.j == j && e.u >= 2.0 && e.l1 > 1e-10) pts.push_back({e.u, e.l1});
        std::sort(pts.begin(), pts.end());
        bool decreasing = true;
        for (std::size_t k = 1; k < pts.size(); ++k)
            if (pts[k].second > pts[k - 1].second) decreasing = false;
        CHECK(decreasing);
    }
}

TEST_CASE("self-similarity of frozen kernels") {
    GridSpec g(1, 256, 32.0);
    SymbolParams gauss;
    gauss.dim = 1;
    gauss.alpha = 2.0;
    gauss.quad = SphereQuadrature::make(1);
    gauss.drift = CoefficientTable<std::vector<double>>::frozen({0.0});
    gauss.diffusion = CoefficientTable<std::vector<double>>::frozen({1.0});
    gauss.jump_density = CoefficientTable<std::vector<double>>::frozen({0.0, 0.0});
    CHECK(selfsimilarity_check(gauss, g, 0.5, 1.0) < 1e-8);

    // the |x|^{-2} tail needs a wide domain: the rescaled image lattice
    // differs from the direct one, so aliasing sets the error floor
    GridSpec gw(1, 1024, 128.0);
    SymbolParams cauchy = SymbolParams::isotropic(1, 1.0);
    CHECK(selfsimilarity_check(cauchy, gw, 0.5, 1.0) < 1e-3);

    CHECK(selfsimilarity_check(cauchy, gw, 0.75, 0.75) == 0.0);

    SymbolParams varying = SymbolParams::isotropic(1, 1.5);
    varying.jump_density.knots = {0.0, 0.5, 1.0};
    varying.jump_density.values = {{1.0, 1.0}, {2.0, 2.0}};
    CHECK_THROWS(selfsimilarity_check(varying, g, 0.5, 1.0));
}
