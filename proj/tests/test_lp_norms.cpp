#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "levylab/lp_norms.hpp"
#include "levylab/rng.hpp"

#include <cmath>

using namespace levylab;

namespace {

Field random_field(const GridSpec& g, int channels, std::uint64_t stream) {
    RngStream rng(99, stream);
    Field f(g, channels);
    for (auto& v : f.values) v = complex(rng.normal(), rng.normal());
    return f;
}

// random real field with spectrum restricted to lo <= |xi| <= hi
Field band_limited(const GridSpec& g, double lo, double hi, std::uint64_t stream) {
    RngStream rng(7, stream);
    Field spec(g);
    for (int idx = 0; idx < g.points(); ++idx) {
        double r = g.freq_norm(idx);
        if (r < lo || r > hi) continue;
        spec.values[idx] = complex(rng.normal(), rng.normal());
    }
    // hermitian symmetrization for a real field
    Field sym(g);
    for (int idx = 0; idx < g.points(); ++idx) {
        sym.values[idx] =
            0.5 * (spec.values[idx] + std::conj(spec.values[g.reflect(idx)]));
    }
    return realize(idft(sym), 1e-6);
}

} // namespace

TEST_CASE("bump profile: support, positivity, telescoping") {
    CHECK(bump_profile(0.49) == 0.0);
    CHECK(bump_profile(2.01) == 0.0);
    for (double r : {0.6, 1.0, 1.7}) CHECK(bump_profile(r) > 0.0);
    for (double r : {0.3, 0.9, 2.7, 11.0}) {
        double s = 0.0;
        for (int j = -30; j <= 30; ++j) s += bump_profile(std::exp2(-j) * r);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(smooth_step(0.3) + smooth_step(0.7) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bank partition of unity on the lattice") {
    GridSpec g(1, 256, 32.0);
    LPBank bank = build_bank(g, default_bank_order(g));
    RngStream rng(4, 0);
    for (int trial = 0; trial < 10000; ++trial) {
        int idx = static_cast<int>(rng.uniform() * g.points());
        double s = 0.0;
        for (int j = 0; j < bank.blocks; ++j) s += bank.mask[j][idx];
        CHECK(std::abs(s - 1.0) < 1e-14);
    }
    // at xi = 0 only the complementary block contributes
    CHECK(bank.mask[0][0] == doctest::Approx(1.0));
}

TEST_CASE("masks live on their dyadic annuli with at most two overlapping") {
    GridSpec g(2, 64, 16.0);
    LPBank bank = build_bank(g, default_bank_order(g));
    for (int idx = 0; idx < g.points(); ++idx) {
        double r = g.freq_norm(idx);
        int nonzero = 0;
        for (int j = 1; j < bank.blocks; ++j) {
            if (bank.mask[j][idx] != 0.0) {
                ++nonzero;
                CHECK(r >= std::exp2(j - 1));
                CHECK(r <= std::exp2(j + 1));
            }
            CHECK(bank.mask[j][idx] >= 0.0);
            CHECK(bank.mask[j][idx] <= 1.0);
        }
        CHECK(nonzero <= 2);
    }
}

TEST_CASE("bank rejects orders too small for the lattice") {
    GridSpec g(1, 256, 32.0); // max |xi| ~ 25.1
    CHECK_THROWS(build_bank(g, 4));
    CHECK_NOTHROW(build_bank(g, 5));
}

TEST_CASE("block reconstruction and band support") {
    GridSpec g(1, 128, 16.0);
    LPBank bank = build_bank(g, default_bank_order(g));
    Field f = random_field(g, 1, 1);
    Field sum(g);
    for (int j = 0; j < bank.blocks; ++j) sum += lp_block(f, bank, j);
    double err = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        err = std::max(err, std::abs(sum.values[i] - f.values[i]));
    CHECK(err < 1e-12 * f.max_abs());

    // a field strictly inside annulus j hits only blocks j-1, j, j+1
    Field banded = band_limited(g, std::exp2(2) * 1.01, std::exp2(3) * 0.99, 3); // inside block 3
    for (int j = 0; j < bank.blocks; ++j) {
        Field b = lp_block(banded, bank, j);
        if (j < 2 || j > 4) CHECK(b.max_abs() < 1e-12 * banded.max_abs());
    }
}

TEST_CASE("pure tone block response is the mask value") {
    GridSpec g(1, 128, 16.0);
    LPBank bank = build_bank(g, default_bank_order(g));
    int mode = 8; // |xi| = 2 pi 8/16 = pi
    Field tone = tone_field(g, mode);
    int j = 2;    // pi is inside (2,4)
    Field b = lp_block(tone, bank, j);
    int idx = mode; // lattice index of the mode
    double m = bank.mask[j][idx];
    double err = 0.0;
    for (std::size_t i = 0; i < tone.values.size(); ++i)
        err = std::max(err, std::abs(b.values[i] - m * tone.values[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("sobolev norm of a pure tone is the multiplier") {
    GridSpec g(1, 64, 16.0);
    LPBank bank = build_bank(g, default_bank_order(g));
    Field tone = tone_field(g, 5);
    double xi = 2.0 * M_PI * 5 / 16.0;
    for (double beta : {-1.0, 0.7, 2.0}) {
        double expect = std::pow(1.0 + xi * xi, beta / 2.0) * riemann_lp(tone, 3.0);
        double got = norm(tone, {NormFamily::sobolev, beta, 3.0, TimeStructure::none}, bank);
        CHECK(got == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("p=2, beta=0 norms coincide with L2 on single-mask spectra") {
    GridSpec g(1, 256, 32.0);
    LPBank bank = build_bank(g, default_bank_order(g));
    // spectrum confined to |xi| <= 1 where only the complementary mask is active
    Field f = band_limited(g, 0.0, 1.0, 5);
    double l2 = riemann_lp(f, 2.0);
    NormDescriptor nb{NormFamily::besov, 0.0, 2.0, TimeStructure::none};
    NormDescriptor ns{NormFamily::sobolev, 0.0, 2.0, TimeStructure::none};
    NormDescriptor nh{NormFamily::htilde, 0.0, 2.0, TimeStructure::none};
    CHECK(norm(f, nb, bank) == doctest::Approx(l2).epsilon(1e-10));
    CHECK(norm(f, ns, bank) == doctest::Approx(l2).epsilon(1e-10));
    CHECK(norm(f, nh, bank) == doctest::Approx(l2).epsilon(1e-10));
}

TEST_CASE("besov and htilde agree within a moderate equivalence factor") {
    GridSpec g(1, 256, 32.0);
    LPBank bank = build_bank(g, default_bank_order(g));
    Field f = band_limited(g, 1.0, 16.0, 8);
    double nb = norm(f, {NormFamily::besov, 0.7, 4.0, TimeStructure::none}, bank);
    double nh = norm(f, {NormFamily::htilde, 0.7, 4.0, TimeStructure::none}, bank);
    CHECK(nb / nh < 4.0);
    CHECK(nh / nb < 4.0);
}

TEST_CASE("besov norm is monotone in beta on high-frequency fields") {
    GridSpec g(1, 256, 32.0);
    LPBank bank = build_bank(g, default_bank_order(g));
    Field f = band_limited(g, 2.0, 16.0, 9);
    double n1 = norm(f, {NormFamily::besov, 0.3, 2.0, TimeStructure::none}, bank);
    double n2 = norm(f, {NormFamily::besov, 0.9, 2.0, TimeStructure::none}, bank);
    CHECK(n1 <= n2);
}

TEST_CASE("sobolev p=2 equals the Parseval form") {
    GridSpec g(1, 128, 16.0);
    LPBank bank = build_bank(g, default_bank_order(g));
    Field f = random_field(g, 2, 12);
    double beta = 0.8;
    double got = norm(f, {NormFamily::sobolev, beta, 2.0, TimeStructure::none}, bank);
    Field spec = dft(f);
    double sum = 0.0;
    for (int c = 0; c < f.channels; ++c)
        for (int idx = 0; idx < g.points(); ++idx) {
            double w = std::pow(1.0 + std::pow(g.freq_norm(idx), 2.0), beta);
            sum += w * std::norm(spec.at(c, idx));
        }
    sum /= g.length; // (1/L)^d lattice measure = (2 pi)^{-d} d xi
    CHECK(got * got == doctest::Approx(sum).epsilon(1e-10));
}

TEST_CASE("bessel potential: identity at beta=0, constants fixed, exact inverse") {
    GridSpec g(1, 64, 16.0);
    Field f = random_field(g, 1, 20);
    Field id = bessel_potential(f, 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        err = std::max(err, std::abs(id.values[i] - f.values[i]));
    CHECK(err < 1e-13 * f.max_abs());

    Field c = constant_field(g, 3.25);
    Field bc = bessel_potential(c, 1.7);
    for (const auto& v : bc.values) CHECK(std::abs(v - complex(3.25)) < 1e-12);

    Field tone = tone_field(g, 4);
    double xi = 2.0 * M_PI * 4 / 16.0;
    Field b2 = bessel_potential(tone, 2.0);
    for (std::size_t i = 0; i < tone.values.size(); ++i)
        CHECK(std::abs(b2.values[i] - (1.0 + xi * xi) * tone.values[i]) < 1e-12);

    Field round = bessel_potential(bessel_potential(f, 1.3), -1.3);
    err = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        err = std::max(err, std::abs(round.values[i] - f.values[i]));
    CHECK(err < 1e-10 * f.max_abs());
}

TEST_CASE("fractional derivative: tone multiplier and beta -> 0 limit") {
    GridSpec g(1, 64, 16.0);
    Field tone = tone_field(g, 6);
    double xi = 2.0 * M_PI * 6 / 16.0;
    Field d = frac_deriv(tone, 0.8);
    double err = 0.0;
    for (std::size_t i = 0; i < tone.values.size(); ++i)
        err = std::max(err, std::abs(d.values[i] + std::pow(xi, 0.8) * tone.values[i]));
    CHECK(err < 1e-12);

    // mean-zero field: beta -> 0 tends to -f
    Field f = band_limited(g, 0.5, 8.0, 30);
    Field d0 = frac_deriv(f, 1e-9);
    err = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        err = std::max(err, std::abs(d0.values[i] + f.values[i]));
    CHECK(err < 1e-6 * f.max_abs());
}

TEST_CASE("hypersingular route matches the Fourier route on a Gaussian") {
    GridSpec g(1, 256, 32.0);
    Field gauss = gaussian_field(g, 1.0);
    Field ref = frac_deriv(gauss, 0.5, FracDerivMethod::fourier);
    Field hyp = frac_deriv(gauss, 0.5, FracDerivMethod::hypersingular);
    double err = 0.0;
    for (std::size_t i = 0; i < ref.values.size(); ++i)
        err = std::max(err, std::abs(hyp.values[i] - ref.values[i]));
    CHECK(err < 1e-3 * ref.max_abs());
    CHECK_THROWS(frac_deriv(gauss, 1.5, FracDerivMethod::hypersingular));

    // calibration recovers the classical normalizing constant
    double c = hypersingular_calibrate(0.5, g);
    double closed = 0.5 * std::pow(2.0, -0.5) *
                    std::exp(std::lgamma((1.0 + 0.5) / 2.0) - std::lgamma(1.0 - 0.25)) /
                    std::sqrt(M_PI);
    CHECK(c == doctest::Approx(closed).epsilon(2e-2));
}

TEST_CASE("E and Etilde structures reduce to closed forms on constants") {
    GridSpec g(1, 32, 8.0);
    LPBank bank = build_bank(g, default_bank_order(g));
    TimeGrid tg(0.0, 1.0, 16);
    Field f = band_limited(g, 0.0, 1.0, 40);
    double l2 = riemann_lp(f, 2.0);

    SpaceTimeField st(tg, g, 1);
    for (auto& fr : st.frames) fr = f;
    double ne = norm(st, {NormFamily::sobolev, 0.0, 2.0, TimeStructure::E}, bank);
    CHECK(ne == doctest::Approx(l2).epsilon(1e-12)); // time length 1

    TwoTimeField tt(tg, g, 1);
    for (int j = 0; j < tg.knots(); ++j)
        for (int i = 0; i <= j; ++i) tt.frame(i, j) = f;
    double nt = norm(tt, {NormFamily::sobolev, 0.0, 2.0, TimeStructure::Etilde}, bank);
    // left-rule double integral of 1 over {0<=s<=t<=1} = sum_j dt * (j dt) = dt^2 M(M-1)/2
    double dt = tg.dt();
    double tri = 0.0;
    for (int j = 0; j < tg.steps; ++j) tri += dt * (j * dt);
    CHECK(nt == doctest::Approx(l2 * std::sqrt(tri)).epsilon(1e-12));
}

TEST_CASE("barred norms: closed form on time-constant frames, p=2 collapse") {
    GridSpec g(1, 32, 8.0);
    LPBank bank = build_bank(g, default_bank_order(g));
    TimeGrid tg(0.0, 1.0, 8);
    Field f = band_limited(g, 1.5, 3.9, 41);

    TwoTimeField tt(tg, g, 1);
    for (int j = 0; j < tg.knots(); ++j)
        for (int i = 0; i <= j; ++i) tt.frame(i, j) = f;

    // H-bar at p=2 equals the Etilde sobolev norm (sums commute)
    double hbar = norm(tt, {NormFamily::sobolev, 0.4, 2.0, TimeStructure::barred}, bank);
    double het = norm(tt, {NormFamily::sobolev, 0.4, 2.0, TimeStructure::Etilde}, bank);
    CHECK(hbar == doctest::Approx(het).epsilon(1e-12));

    // B-bar on a single-block field at p=4: block weight factors out
    double bbar = norm(tt, {NormFamily::besov, 0.3, 4.0, TimeStructure::barred}, bank);
    CHECK(bbar > 0.0);
    CHECK(std::isfinite(bbar));

    // mismatched shapes are rejected
    CHECK_THROWS(norm(tt, {NormFamily::htilde, 0.3, 4.0, TimeStructure::barred}, bank));
    CHECK_THROWS(norm(f, {NormFamily::besov, 0.0, 2.0, TimeStructure::E}, bank));
}
