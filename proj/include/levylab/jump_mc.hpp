#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace levylab {

// Finite mark set {(v_i, lambda_i)} on a horizon [0, T].
struct PoissonSpec {
    std::vector<double> mark_values;
    std::vector<double> intensities;
    double horizon = 1.0;

    void validate() const;
    double total_intensity() const;
    PoissonSpec scaled(double kappa) const; // lambda -> kappa lambda
};

struct JumpRecord {
    std::vector<double> times; // increasing
    std::vector<int> marks;    // index into the spec's mark set
    std::uint64_t seed = 0;
    std::vector<long> counts;  // realized count per mark
};

// Per mark: count ~ Poisson(lambda_i T), times uniform on [0, T];
// deterministic under (spec, seed).
JumpRecord simulate_ppm(const PoissonSpec& spec, std::uint64_t seed);

// deterministic integrand g(s, mark index)
using JumpIntegrand = std::function<double(double, int)>;

// Q_t = sum_{tau_k <= t} g(tau_k, m_k) - int_0^t sum_i lambda_i g(s, i) ds
// evaluated at the given knots; the compensator uses composite trapezoid
// with the stated substeps (exact for piecewise-linear g).
std::vector<double> compensated_integral(const JumpIntegrand& g, const JumpRecord& rec,
                                         const PoissonSpec& spec, const std::vector<double>& knots,
                                         int substeps = 8);

struct BdgReport {
    double p = 2.0;
    double kappa = 1.0;
    long n_paths = 0;
    double lhs_sup = 0.0;          // MC estimate of E sup_{t<=T} |Q_t|^p
    double lhs_std_err = 0.0;
    double endpoint_moment = 0.0;  // MC estimate of E |Q_T|^p
    double endpoint_std_err = 0.0;
    double rhs = 0.0;              // int |g|^p dPi ds + (int g^2 dPi ds)^{p/2}
    double ratio = 0.0;            // lhs_sup / rhs
};

// Two-sided moment experiment: the sup over paths is evaluated on the
// jump times (left and right limits) plus a 512-point grid, which is
// exact up to the compensator slope between grid points.  Throws for
// p < 2.
BdgReport bdg_two_sided(const JumpIntegrand& g, const PoissonSpec& spec, double p, long n_paths,
                        std::uint64_t seed);

// Skewed alpha-stable increments over time dt, alpha in (1, 2), with the
// Levy direction weights (m_plus, m_minus) matching the calibrated
// symbol: the characteristic function of a sample is exp(dt psi(xi))
// where psi(xi) = -C (m_+ + m_-) |xi|^alpha [1 - i beta tan(pi alpha/2)
// sgn xi], beta = (m_+ - m_-)/(m_+ + m_-), C = 1/2.  Generated by the
// Chambers-Mallows-Stuck transform of S_alpha(1, beta, 0) scaled by
// sigma = (C (m_+ + m_-) dt)^{1/alpha}.
std::vector<double> stable_increments(double alpha, double m_plus, double m_minus, double dt,
                                      long count, std::uint64_t seed);

// single draw from an already-seeded uniform/exponential pair supply
double stable_sample(double alpha, double beta_skew, double sigma, double u_unit,
                     double w_exponential);

} // namespace levylab
