#pragma once

#include "levylab/fft.hpp"
#include "levylab/grid.hpp"
#include "levylab/lp_norms.hpp"
#include "levylab/symbol.hpp"

#include <vector>

namespace levylab {

// integral_s^t psi(r, xi) dr on the whole lattice.  Composite Simpson
// over segments aligned with the coefficient knots; on piecewise
// constant coefficients all Simpson nodes of a segment coincide, so the
// rule is exact there.
cvector integrate_symbol_lattice(const SymbolParams& p, double s, double t, const GridSpec& g);

// Per-interval exponents I_k(xi) = integral_{t_k}^{t_{k+1}} psi dr for a
// knot grid; prefix sums give every knot-aligned propagator exponent.
std::vector<cvector> knot_interval_exponents(const SymbolParams& p, const TimeGrid& tg,
                                             const GridSpec& g);

struct KernelTable {
    GridSpec grid;
    double s = 0.0;
    double t = 0.0;
    cvector multiplier; // exp(int psi), conjugate-reflection symmetrized
    Field kernel;       // real spatial kernel
    double symmetrization_deviation = 0.0;
    const char* time_rule = "simpson on coefficient-aligned segments";
};

// G_{s,t} on a grid.  Throws on s > t.  The multiplier is symmetrized
// (averaged with its conjugate reflection) before inversion so that
// quadrature asymmetries in m cannot leak imaginary mass; the deviation
// is recorded.
KernelTable propagator(const SymbolParams& p, double s, double t, const GridSpec& g);

// max over the lattice of |multiplier| e^{mu |xi|^alpha (t-s)}; <= 1
// when the spectral domination bound holds.
double domination_margin(const KernelTable& k, double mu, double alpha);

struct DyadicKernel {
    int j = 0;
    GridSpec grid;
    double s = 0.0;
    double t = 0.0;
    cvector multiplier; // propagator multiplier times the widened mask
    Field kernel;
};

DyadicKernel dyadic_kernel(const SymbolParams& p, const LPBank& bank, int j, double s, double t);

struct DecayScanEntry {
    int j = 0;
    double tau = 0.0;
    double u = 0.0; // 2^{j alpha} tau
    double l1 = 0.0;
    double envelope = 0.0;
    double ratio = 0.0; // l1 / envelope
};

struct DecayScanResult {
    std::vector<DecayScanEntry> entries; // j >= 1 rows
    double C_fit = 0.0;                  // envelope amplitude (dominates the data)
    double c_fit = 0.0;                  // fitted decay rate
    double max_log_residual = 0.0;       // fit quality before inflation
    double collapse_spread = 0.0;        // max relative spread within equal-u groups
    std::vector<double> h0_l1;           // per tau
    double h0_max = 0.0;
};

// Measures |h^j|_{L1} over (j, tau), fits the envelope
// C e^{-c u} sum_{k<=d0} u^k in u = 2^{j alpha} tau by least squares in
// log space, then inflates C so the envelope dominates every sample.
// Entries with equal u (within rounding) form the collapse groups.
DecayScanResult l1_decay_scan(const SymbolParams& p, const LPBank& bank,
                              const std::vector<int>& js, const std::vector<double>& taus);

// Verifies G_{0,tau1}(x) = r^{-d/alpha} G_{0,tau2}(r^{-1/alpha} x),
// r = tau1/tau2, for frozen coefficients, resampling the tau2 kernel by
// an exact spectral sum; returns the max error on |x| <= L/4 relative
// to the kernel peak.  Throws on time-dependent coefficients.
double selfsimilarity_check(const SymbolParams& p, const GridSpec& g, double tau1, double tau2);

} // namespace levylab
