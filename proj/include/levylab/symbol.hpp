#pragma once

#include "levylab/grid.hpp"

#include <array>
#include <string>
#include <vector>

namespace levylab {

// Quadrature over the unit sphere S^{d-1}.  d = 1 uses the two-point
// set {-1,+1} with counting measure; d = 2 a uniform trapezoid rule in
// the angle (spectrally accurate for smooth densities).
struct SphereQuadrature {
    int dim = 1;
    std::vector<std::array<double, 2>> nodes;
    std::vector<double> weights;

    static SphereQuadrature make(int dim, int n_nodes = 512);
};

// Piecewise-constant-in-time coefficient table: value k applies on
// [knot_k, knot_{k+1}); a single entry means frozen coefficients.
template <typename T>
struct CoefficientTable {
    std::vector<double> knots; // size = pieces + 1, increasing
    std::vector<T> values;     // size = pieces

    static CoefficientTable frozen(T v) { return {{0.0, 1.0}, {v}}; }

    int pieces() const { return static_cast<int>(values.size()); }
    int piece_of(double t) const {
        if (pieces() == 1) return 0;
        if (t <= knots.front()) return 0;
        if (t >= knots.back()) return pieces() - 1;
        int lo = 0, hi = pieces() - 1;
        while (lo < hi) {
            int mid = (lo + hi + 1) / 2;
            if (knots[mid] <= t) lo = mid; else hi = mid - 1;
        }
        return lo;
    }
    const T& at(double t) const { return values[piece_of(t)]; }
};

// Everything the symbol needs: alpha, drift b(t) (alpha = 1 only),
// diffusion B(t) (alpha = 2 only), spherical jump density m(t,w) at the
// quadrature nodes, the margin mu and bound K of the assumptions, and
// the normalizing constant.
struct SymbolParams {
    int dim = 1;
    double alpha = 1.5;
    double mu = 0.5;
    double K = 10.0;
    double C_norm = 0.5;

    SphereQuadrature quad;
    CoefficientTable<std::vector<double>> drift;     // size dim per piece
    CoefficientTable<std::vector<double>> diffusion; // row-major dim x dim per piece
    CoefficientTable<std::vector<double>> jump_density; // one value per quad node per piece

    bool frozen() const {
        return drift.pieces() == 1 && diffusion.pieces() == 1 && jump_density.pieces() == 1;
    }

    // Throws std::invalid_argument on any violated invariant:
    // m >= 0, B symmetric nonnegative-definite, |b|,|B|,|m| and the
    // finite-difference derivatives of m up to d0 = floor(d/2)+1 bounded
    // by K, and for alpha = 1 the vanishing sphere average of w m(t,w).
    void validate() const;

    // Convenience constructor: frozen coefficients, m constant.
    static SymbolParams isotropic(int dim, double alpha, double m_value = 1.0, int n_nodes = 512);
};

struct SymbolValue {
    complex value;
    complex drift_part;
    complex diffusion_part;
    complex jump_part;
};

// The Levy symbol
//   psi(t,xi) = i (b(t),xi) 1_{a=1} - sum B^{ij}(t) xi_i xi_j 1_{a=2}
//     - C int_{S^{d-1}} |(w,xi)|^a [1 - i (tan(a pi/2) sgn(w,xi) 1_{a!=1}
//         - (2/pi) sgn(w,xi) ln|(w,xi)| 1_{a=1})] m(t,w) dw,
// evaluated with the stored quadrature; psi(t,0) = 0 exactly and the
// alpha = 1 integrand takes |u| ln|u| -> 0 at u = 0.
SymbolValue eval_symbol(const SymbolParams& p, double t, const std::array<double, 2>& xi);

// psi(t, xi/|xi|); eval_symbol = |xi|^alpha * reduced_symbol for every
// alpha (the alpha = 1 log terms rearrange because the sphere average
// of w m vanishes).  Throws on xi = 0.
SymbolValue reduced_symbol(const SymbolParams& p, double t, const std::array<double, 2>& xi);

// C with which the m = 1, b = 0 jump part has real part exactly
// -|xi|^alpha: C = 1 / int_{S^{d-1}} |(w,e)|^alpha dw.
double normalize_constant(const SymbolParams& p);

struct AssumptionBReport {
    double sup_re_reduced = 0.0;
    double mu = 0.0;
    bool pass = false;
};

// Samples Re psi~ over the unit sphere (dense angular grid for d = 2)
// and all coefficient pieces; pass iff the sup is <= -mu.
AssumptionBReport check_assumption_B(const SymbolParams& p);

// Convenience: symbol on a full frequency lattice at fixed time.
std::vector<complex> symbol_on_lattice(const SymbolParams& p, double t, const GridSpec& g);

// Structured-text (JSON) config, schema documented in the README.
SymbolParams load_symbol_params(const std::string& json_text);

} // namespace levylab
