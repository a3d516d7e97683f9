#pragma once

#include "levylab/grid.hpp"

#include <vector>

namespace levylab {

// Smooth step built from sigma(u) = e^{-1/u} 1_{u>0}: zero for u <= 0,
// one for u >= 1, with s(u) + s(1-u) = 1.
double smooth_step(double u);

// Radial bump phi(r) = t(r) - t(2r) with t(r) = smooth_step(2 - r):
// supported on {1/2 <= r <= 2}, positive inside, and the dyadic sum
// sum_j phi(2^-j r) telescopes to 1 for r > 0.
double bump_profile(double r);

// Cached Fourier masks of the dyadic blocks on a grid's lattice.
// mask[0] is defined by complementarity (1 - sum_{k>=1} masks), so the
// partition of unity is exact including xi = 0.  tilde[j] widens block j
// by one dyadic step on each side; for j >= 1 it is built from pure
// scalings of the bump (the j-1 = 0 term uses the annulus profile at
// scale 2^0, not the complementary low-pass block), which keeps its
// spectral support inside {2^{j-2} <= |xi| <= 2^{j+2}}.
struct LPBank {
    GridSpec grid;
    int blocks = 0; // masks j = 0..blocks-1
    std::vector<std::vector<double>> mask;
    std::vector<std::vector<double>> tilde;

    int top() const { return blocks - 1; }
};

// Throws if 2^J < max lattice |xi| (the bank would not cover the
// lattice and the partition of unity would fail on the outer modes).
LPBank build_bank(const GridSpec& grid, int J);
int default_bank_order(const GridSpec& grid);

// F^{-1}(F phi_j . F f) per channel.
Field lp_block(const Field& f, const LPBank& bank, int j);

enum class NormFamily { besov, sobolev, htilde };
enum class TimeStructure { none, E, Etilde, barred };

struct NormDescriptor {
    NormFamily family = NormFamily::besov;
    double beta = 0.0;
    double p = 2.0;
    TimeStructure time = TimeStructure::none;
};

// Spatial norms: Besov {sum_j 2^{j beta p} int |phi_j * f|_V^p dx}^{1/p},
// Sobolev |F^{-1}((1+|xi|^2)^{beta/2} F f)|_{V,p}, and the square
// function {int (sum_j 2^{2 beta j} |phi_j * f|_V^2)^{p/2} dx}^{1/p}.
double norm(const Field& f, const NormDescriptor& d, const LPBank& bank);

// Time integrals use left Riemann sums on the knot grid (the inner
// integral over s in [a,t] excludes s = t), which is what makes the
// p = 2 spectral energy bound for the two-time operator hold without a
// quadrature fudge.
double norm(const SpaceTimeField& f, const NormDescriptor& d, const LPBank& bank);
double norm(const TwoTimeField& f, const NormDescriptor& d, const LPBank& bank);

std::vector<double> left_time_weights(const TimeGrid& t);

enum class FracDerivMethod { fourier, hypersingular };

struct HypersingularRule {
    double rho_min = 1e-4;
    double span_factor = 64.0; // rho_max = span_factor * L
    int per_decade = 256;
    int angles = 32; // d = 2 only
};

// Fractional derivative -F^{-1}(|xi|^beta F f), or for beta in (0,1)
// the normalized singular integral c_beta int [f(x+y)-f(x)] |y|^{-d-beta} dy
// evaluated by spectral shifts over a log-graded radial rule, with the
// far tail of the defect -f(x) folded in analytically through the field
// mean.  c_beta comes from hypersingular_calibrate.
Field frac_deriv(const Field& f, double beta, FracDerivMethod method = FracDerivMethod::fourier,
                 const HypersingularRule& rule = {});

// c_beta with which the hypersingular route matches the Fourier route on
// a reference Gaussian (least-squares over the grid).
double hypersingular_calibrate(double beta, const GridSpec& g, const HypersingularRule& rule = {});

// F^{-1}((1+|xi|^2)^{beta/2} F f); exact inverse of the -beta potential.
Field bessel_potential(const Field& f, double beta);

} // namespace levylab
