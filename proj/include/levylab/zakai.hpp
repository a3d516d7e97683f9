#pragma once

#include "levylab/fft.hpp"
#include "levylab/grid.hpp"
#include "levylab/jump_mc.hpp"
#include "levylab/symbol.hpp"

#include <cstdint>
#include <vector>

namespace levylab {

// Example model: 1-d signal dX = b dt + dW^alpha (alpha in (1,2), Levy
// direction weights m_plus/m_minus calibrated against the symbol
// module), observation jumps with state-dependent intensity
// rho(x, y_i) pi_i bounded in [c1, C1].
struct FilterModel {
    GridSpec grid{1, 256, 32.0};
    double alpha = 1.5;
    double drift = 0.0; // constant b
    double m_plus = 1.0;
    double m_minus = 1.0;
    Field u0; // nonnegative, unit mass
    std::vector<double> obs_marks;
    std::vector<double> obs_intensities;
    std::vector<std::vector<double>> likelihood; // rho[mark][grid index]
    double c1 = 0.5;
    double C1 = 2.0;
    double T = 1.0;
    int steps = 128;
    double kde_bandwidth = 0.0; // 0: Silverman rule floored at 1.5 cells

    void validate() const;
    TimeGrid time() const { return TimeGrid(0.0, T, steps); }
    SymbolParams signal_symbol() const;
    // rho(x, y_i) by periodic linear interpolation of the table
    double rho_at(int mark, double x) const;
    // Lambda(x) = sum_i pi_i (rho(x, y_i) - 1) on the grid
    std::vector<double> compensator_exponent() const;
};

// Multiplier of the adjoint generator: the density of the signal evolves
// with the direction-reflected jump density, whose symbol is the complex
// conjugate, plus the -b d/dx divergence drift:
//   psi_star(xi) = conj(psi_jump(xi)) - i b xi.
cvector adjoint_multiplier(const FilterModel& m, double dt);

struct FilterState {
    int step = 0;
    Field v;                    // unnormalized density
    std::vector<double> masses; // mass after every completed step
};

// One splitting step over (t_k, t_k + dt]: (a) spectral transport by the
// adjoint multiplier, (b) compensator decay e^{-Lambda dt}, (c) one
// likelihood factor per observation jump in the interval.  Aborts on
// non-finite values.
void zakai_step(FilterState& st, const FilterModel& m, const cvector& step_multiplier,
                const std::vector<double>& lambda, const JumpRecord& obs);

struct FilterRun {
    std::vector<Field> densities; // one per knot, index 0 = u0
    std::vector<double> masses;
    double min_value = 0.0; // most negative sample over the run
};

FilterRun run_spectral_filter(const FilterModel& m, const JumpRecord& obs);

// law of the signal alone: F^{-1}(e^{t psi_star} F u0)
Field unconditional_density(const FilterModel& m, double t);

struct TruthPath {
    std::vector<double> x; // signal at the model knots
    JumpRecord obs;        // accepted observation jumps
};

// Euler path with exact stable increments; observation jumps by thinning
// from the dominating intensity C1 pi_i, accepted with
// rho(X at the knot entering the interval) / C1.
TruthPath simulate_truth(const FilterModel& m, std::uint64_t seed);

// observation record under the reference measure (plain intensity pi_i,
// no signal coupling); the filter mass is a mean-one martingale for
// records drawn this way
JumpRecord reference_observations(const FilterModel& m, std::uint64_t seed);

struct ParticleRun {
    std::vector<Field> densities; // weighted KDE per knot
    int resample_count = 0;
};

ParticleRun particle_filter(const FilterModel& m, const JumpRecord& obs, long n_particles,
                            std::uint64_t seed);

struct FilterComparison {
    std::vector<double> l1;  // per knot, normalized densities
    std::vector<double> tv;  // l1 / 2
    double tv_time_avg = 0.0;
};

FilterComparison compare_filters(const FilterRun& spectral, const ParticleRun& particle);

struct MassMartingaleReport {
    double mean = 0.0;
    double std_err = 0.0;
    long realizations = 0;
};

MassMartingaleReport mass_martingale_experiment(const FilterModel& m, long realizations,
                                                std::uint64_t seed);

} // namespace levylab
