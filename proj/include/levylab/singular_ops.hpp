#pragma once

#include "levylab/kernel.hpp"

#include <functional>

namespace levylab {

// g(s, x, v_i) with mark weights lambda_i: the mark measure is the
// weighted atom sum.  Scalar channel per mark.
struct MarkedField {
    TimeGrid time;
    std::vector<double> weights;
    std::vector<SpaceTimeField> per_mark;

    void validate() const;
};

// Shared spectral machinery for the two-time operator: knot-aligned
// propagator exponents as prefix sums (so Chapman-Kolmogorov holds to
// rounding) plus the transformed frames of g.
class IgSpectra {
public:
    IgSpectra(const SpaceTimeField& g, const SymbolParams& p);

    const TimeGrid& time() const { return time_; }
    const GridSpec& grid() const { return grid_; }
    int channels() const { return channels_; }

    // mult(s_i, t_j) .* Fg_c(s_i) written into out
    void frame_spectrum(int i, int j, int c, cvector& out) const;
    const cvector& g_spectrum(int i, int c) const { return gspec_[i][c]; }
    // exp(prefix_j - prefix_i) at one lattice index
    complex multiplier(int i, int j, int idx) const {
        return std::exp(prefix_[j][idx] - prefix_[i][idx]);
    }
    // exp of the exponent over one knot interval; products of these give
    // any knot-aligned multiplier
    cvector interval_multiplier(int k) const {
        cvector out(prefix_[k].size());
        for (std::size_t idx = 0; idx < out.size(); ++idx)
            out[idx] = std::exp(prefix_[k + 1][idx] - prefix_[k][idx]);
        return out;
    }

private:
    TimeGrid time_;
    GridSpec grid_;
    int channels_;
    std::vector<cvector> prefix_;
    std::vector<std::vector<cvector>> gspec_;
};

// I g(s,t,x) = G_{s,t} * g(s,x) for every knot pair s_i <= t_j.
// Warns (returns via report pointer if given) when Assumption B fails.
TwoTimeField apply_I(const SpaceTimeField& g, const SymbolParams& p,
                     AssumptionBReport* b_report = nullptr);

// Rf(t,x) = integral_0^t G_{s,t} * f(s,x) ds, trapezoid in s; t must be
// a knot of f's grid.
Field apply_R(const SpaceTimeField& f, const SymbolParams& p, double t);

// T_t u0 = G_{0,t} * u0.
Field apply_T(const Field& u0, const SymbolParams& p, double t);

// The deterministic singular functionals, with the fractional derivative
// realized as the Fourier multiplier:
//   I1 = int_0^T int ( int_0^t sum_i lambda_i [d^alpha G_{s,t} * g](s,x,v_i)^2 ds )^{p/2} dx dt
//   I2 = int_0^T int_0^t int sum_i lambda_i |d^alpha G_{s,t} * g(s,x,v_i)|^p dx ds dt
// Both use trapezoid time quadrature with identical weights, so they
// coincide exactly for p = 2 and a single mark.  Throws for p < 2.
struct FunctionalPair {
    double i1 = 0.0;
    double i2 = 0.0;
};
FunctionalPair functionals_I1_I2(const MarkedField& g, const SymbolParams& p, double p_exp);
double functional_I1(const MarkedField& g, const SymbolParams& p, double p_exp);
double functional_I2(const MarkedField& g, const SymbolParams& p, double p_exp);

std::vector<double> trapezoid_weights(double dt, int knots);

} // namespace levylab
