#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "levylab/singular_ops.hpp"
#include "levylab/rng.hpp"

#include <cmath>

using namespace levylab;

namespace {

SpaceTimeField random_st(const GridSpec& g, const TimeGrid& tg, int ch, std::uint64_t stream) {
    SpaceTimeField f(tg, g, ch);
    RngStream rng(17, stream);
    for (auto& fr : f.frames)
        for (auto& v : fr.values) v = complex(rng.normal(), rng.normal());
    return f;
}

} // namespace

TEST_CASE("diagonal frames of I g equal g") {
    GridSpec g(1, 64, 16.0);
    TimeGrid tg(0.0, 1.0, 8);
    SymbolParams p = SymbolParams::isotropic(1, 1.5);
    SpaceTimeField f = random_st(g, tg, 2, 1);
    TwoTimeField ig = apply_I(f, p);
    for (int i = 0; i < tg.knots(); ++i) {
        double err = 0.0;
        for (std::size_t k = 0; k < f.frames[i].values.size(); ++k)
            err = std::max(err, std::abs(ig.frame(i, i).values[k] - f.frames[i].values[k]));
        CHECK(err < 1e-12 * f.frames[i].max_abs());
    }
}

TEST_CASE("constant-in-x g is preserved by the mass-1 kernels") {
    GridSpec g(1, 64, 16.0);
    TimeGrid tg(0.0, 1.0, 6);
    SymbolParams p = SymbolParams::isotropic(1, 1.2);
    SpaceTimeField f(tg, g, 1);
    for (int i = 0; i < tg.knots(); ++i)
        f.frames[i] = constant_field(g, complex(1.0 + i, -0.5 * i));
    TwoTimeField ig = apply_I(f, p);
    for (int j = 0; j < tg.knots(); ++j)
        for (int i = 0; i <= j; ++i) {
            for (const auto& v : ig.frame(i, j).values)
                CHECK(std::abs(v - f.frames[i].values[0]) < 1e-12 * std::abs(f.frames[i].values[0]));
        }
}

TEST_CASE("single-tone frames decay by the spectral domination rate") {
    GridSpec g(1, 128, 16.0);
    TimeGrid tg(0.0, 1.0, 8);
    SymbolParams p = SymbolParams::isotropic(1, 1.5);
    p.mu = 1.0; // calibrated isotropic symbol: Re psi~ = -1
    int mode = 9; // |xi| = 2 pi 9/16 ~ 3.53, inside block j=2
    SpaceTimeField f(tg, g, 1);
    for (auto& fr : f.frames) fr = tone_field(g, mode);
    AssumptionBReport rep;
    TwoTimeField ig = apply_I(f, p, &rep);
    CHECK(rep.pass);
    double xi = 2.0 * M_PI * mode / g.length;
    int jblock = 2;
    REQUIRE(xi >= std::exp2(jblock - 1));
    REQUIRE(xi <= std::exp2(jblock + 1));
    for (int j = 1; j < tg.knots(); ++j) {
        double lhs = riemann_lp(ig.frame(0, j), 2.0);
        double rhs = std::exp(-p.mu * std::exp2((jblock - 1) * p.alpha) * tg.knot(j)) *
                     riemann_lp(f.frames[0], 2.0);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("apply_R: zero input, constant input, tone oracle") {
    GridSpec g(1, 64, 16.0);
    SymbolParams p = SymbolParams::isotropic(1, 1.5);

    TimeGrid tg(0.0, 1.0, 16);
    SpaceTimeField zero(tg, g, 1);
    Field r0 = apply_R(zero, p, 1.0);
    CHECK(r0.max_abs() == 0.0);

    SpaceTimeField cst(tg, g, 1);
    for (auto& fr : cst.frames) fr = constant_field(g, 2.5);
    Field rc = apply_R(cst, p, 0.75);
    for (const auto& v : rc.values) CHECK(std::abs(v - complex(2.5 * 0.75)) < 1e-12);

    // tone at xi0, frozen symbol: Rf(t) = tone (e^{psi t} - 1)/psi
    TimeGrid fine(0.0, 1.0, 512);
    int mode = 3;
    double xi = 2.0 * M_PI * mode / g.length;
    SpaceTimeField tone(fine, g, 1);
    for (auto& fr : tone.frames) fr = tone_field(g, mode);
    Field rt = apply_R(tone, p, 1.0);
    complex psi = eval_symbol(p, 0.0, {xi, 0.0}).value;
    complex factor = (std::exp(psi) - 1.0) / psi;
    Field expect = tone_field(g, mode);
    double err = 0.0;
    for (std::size_t k = 0; k < rt.values.size(); ++k)
        err = std::max(err, std::abs(rt.values[k] - factor * expect.values[k]));
    CHECK(err < 1e-6);

    CHECK_THROWS(apply_R(tone, p, 0.1234567));
}

TEST_CASE("apply_T: identity at t=0, heat closed form, mass preservation") {
    GridSpec g(1, 256, 32.0);
    SymbolParams heat;
    heat.dim = 1;
    heat.alpha = 2.0;
    heat.quad = SphereQuadrature::make(1);
    heat.drift = CoefficientTable<std::vector<double>>::frozen({0.0});
    heat.diffusion = CoefficientTable<std::vector<double>>::frozen({1.0});
    heat.jump_density = CoefficientTable<std::vector<double>>::frozen({0.0, 0.0});

    Field u0 = gaussian_field(g, 1.0);
    Field t0 = apply_T(u0, heat, 0.0);
    double err = 0.0;
    for (std::size_t k = 0; k < u0.values.size(); ++k)
        err = std::max(err, std::abs(t0.values[k] - u0.values[k]));
    CHECK(err < 1e-12);

    // e^{-x^2/2} evolved by e^{-xi^2 t}: variance 1 -> 1 + 2t
    double t = 0.4;
    Field tt = apply_T(u0, heat, t);
    double var = 1.0 + 2.0 * t;
    err = 0.0;
    for (int idx = 0; idx < g.points(); ++idx) {
        double x = g.point(idx)[0];
        double expect = std::sqrt(1.0 / var) * std::exp(-x * x / (2.0 * var));
        err = std::max(err, std::abs(tt.values[idx] - complex(expect)));
    }
    CHECK(err < 1e-8);

    SymbolParams p = SymbolParams::isotropic(1, 1.4);
    Field moved = apply_T(u0, p, 0.7);
    CHECK(std::abs(riemann_integral(moved) - riemann_integral(u0)) < 1e-10);
}

TEST_CASE("semigroup compatibility for frozen coefficients") {
    GridSpec g(1, 128, 16.0);
    SymbolParams p = SymbolParams::isotropic(1, 1.3);
    Field u0 = gaussian_field(g, 2.0);
    Field one = apply_T(u0, p, 0.9);
    Field two = apply_T(apply_T(u0, p, 0.35), p, 0.55);
    double err = 0.0;
    for (std::size_t k = 0; k < one.values.size(); ++k)
        err = std::max(err, std::abs(one.values[k] - two.values[k]));
    CHECK(err < 1e-9);
}

TEST_CASE("operators are linear") {
    GridSpec g(1, 64, 16.0);
    TimeGrid tg(0.0, 1.0, 8);
    SymbolParams p = SymbolParams::isotropic(1, 1.6);
    SpaceTimeField f1 = random_st(g, tg, 1, 5);
    SpaceTimeField f2 = random_st(g, tg, 1, 6);
    complex a(1.3, -0.2), b(0.4, 0.9);
    SpaceTimeField mix(tg, g, 1);
    for (int i = 0; i < tg.knots(); ++i) mix.frames[i] = a * f1.frames[i] + b * f2.frames[i];
    Field lhs = apply_R(mix, p, 1.0);
    Field rhs = a * apply_R(f1, p, 1.0) + b * apply_R(f2, p, 1.0);
    double err = 0.0;
    for (std::size_t k = 0; k < lhs.values.size(); ++k)
        err = std::max(err, std::abs(lhs.values[k] - rhs.values[k]));
    CHECK(err < 1e-11 * lhs.max_abs());
}

TEST_CASE("functionals: zero input, p=2 single-mark collapse, tone oracle") {
    GridSpec g(1, 64, 16.0);
    TimeGrid tg(0.0, 1.0, 256);
    SymbolParams p = SymbolParams::isotropic(1, 1.5);

    MarkedField zero{tg, {1.0}, {SpaceTimeField(tg, g, 1)}};
    auto z = functionals_I1_I2(zero, p, 2.0);
    CHECK(z.i1 == 0.0);
    CHECK(z.i2 == 0.0);

    MarkedField one{tg, {0.7}, {random_st(g, tg, 1, 9)}};
    auto both = functionals_I1_I2(one, p, 2.0);
    CHECK(both.i1 == doctest::Approx(both.i2).epsilon(1e-13));

    CHECK_THROWS(functionals_I1_I2(one, p, 1.5));

    // one-tone field, two marks: closed-form reduction; the trapezoid
    // error scales with (|psi| dt)^2, so a low tone and M = 1024 reach 1e-6
    GridSpec gs(1, 32, 16.0);
    TimeGrid tf(0.0, 1.0, 1024);
    int mode = 2;
    double xi = 2.0 * M_PI * mode / gs.length;
    MarkedField tones{tf, {0.5, 2.0}, {SpaceTimeField(tf, gs, 1), SpaceTimeField(tf, gs, 1)}};
    complex a0(0.8, 0.0), a1(0.0, -1.1);
    for (int i = 0; i < tf.knots(); ++i) {
        tones.per_mark[0].frames[i] = a0 * tone_field(gs, mode);
        tones.per_mark[1].frames[i] = a1 * tone_field(gs, mode);
    }
    double p_exp = 4.0;
    auto got = functionals_I1_I2(tones, p, p_exp);

    double re_psi = eval_symbol(p, 0.0, {xi, 0.0}).value.real();
    double da = std::pow(xi, p.alpha);
    double lam_a2 = 0.5 * std::norm(a0) + 2.0 * std::norm(a1);
    // I1 = L int_0^T { lam_a2 da^2 (1 - e^{2 Re psi t})/(-2 Re psi) }^{p/2} dt
    auto inner = [&](double t) {
        return lam_a2 * da * da * (1.0 - std::exp(2.0 * re_psi * t)) / (-2.0 * re_psi);
    };
    double i1_expect = 0.0;
    const int fine = 200000;
    for (int k = 0; k <= fine; ++k) {
        double t = static_cast<double>(k) / fine;
        double w = (k == 0 || k == fine) ? 0.5 : 1.0;
        i1_expect += w * std::pow(inner(t), p_exp / 2.0) / fine;
    }
    i1_expect *= gs.length;
    CHECK(got.i1 == doctest::Approx(i1_expect).epsilon(1e-6));

    // I2 = L (sum lam |a|^p) da^p int_0^T (1 - e^{p Re psi t})/(-p Re psi) dt
    double lam_ap = 0.5 * std::pow(std::abs(a0), p_exp) + 2.0 * std::pow(std::abs(a1), p_exp);
    double i2_expect = 0.0;
    for (int k = 0; k <= fine; ++k) {
        double t = static_cast<double>(k) / fine;
        double w = (k == 0 || k == fine) ? 0.5 : 1.0;
        i2_expect += w * (1.0 - std::exp(p_exp * re_psi * t)) / (-p_exp * re_psi) / fine;
    }
    i2_expect *= gs.length * lam_ap * std::pow(da, p_exp);
    CHECK(got.i2 == doctest::Approx(i2_expect).epsilon(1e-6));
}
