#include "levylab/zakai.hpp"

#include "levylab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levylab {

void FilterModel::validate() const {
    if (grid.dim != 1) throw std::invalid_argument("filter model: d = 1 only");
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("filter model: alpha must be in (1,2)");
    if (m_plus < 0.0 || m_minus < 0.0 || m_plus + m_minus <= 0.0)
        throw std::invalid_argument("filter model: bad jump weights");
    if (!(u0.grid == grid) || u0.channels != 1)
        throw std::invalid_argument("filter model: u0 must be scalar on the model grid");
    for (const auto& v : u0.values)
        if (v.real() < -1e-12) throw std::invalid_argument("filter model: u0 must be nonnegative");
    if (std::abs(riemann_integral(u0) - complex(1.0)) > 1e-8)
        throw std::invalid_argument("filter model: u0 must have unit mass");
    if (obs_marks.size() != obs_intensities.size() || obs_marks.size() != likelihood.size())
        throw std::invalid_argument("filter model: observation tables must align");
    if (!(c1 > 0.0 && C1 >= c1)) throw std::invalid_argument("filter model: need C1 >= c1 > 0");
    for (const auto& row : likelihood) {
        if (static_cast<int>(row.size()) != grid.points())
            throw std::invalid_argument("filter model: likelihood rows must match the grid");
        for (double r : row)
            if (r < c1 - 1e-12 || r > C1 + 1e-12)
                throw std::invalid_argument("filter model: likelihood outside [c1, C1]");
    }
    if (!(T > 0.0) || steps < 1) throw std::invalid_argument("filter model: bad horizon");
}

SymbolParams FilterModel::signal_symbol() const {
    SymbolParams p;
    p.dim = 1;
    p.alpha = alpha;
    p.quad = SphereQuadrature::make(1);
    p.drift = CoefficientTable<std::vector<double>>::frozen({0.0});
    p.diffusion = CoefficientTable<std::vector<double>>::frozen({0.0});
    p.jump_density = CoefficientTable<std::vector<double>>::frozen({m_plus, m_minus});
    p.C_norm = 0.5;
    p.mu = 0.499 * (m_plus + m_minus);
    p.K = std::max({1.0, m_plus, m_minus}) * 2.0;
    return p;
}

double FilterModel::rho_at(int mark, double x) const {
    const auto& row = likelihood[mark];
    double pos = (x + 0.5 * grid.length) / grid.cell();
    double wrapped = pos - std::floor(pos / grid.n) * grid.n;
    int k0 = static_cast<int>(wrapped) % grid.n;
    double f = wrapped - std::floor(wrapped);
    double v = row[k0] * (1.0 - f) + row[(k0 + 1) % grid.n] * f;
    return std::clamp(v, c1, C1);
}

std::vector<double> FilterModel::compensator_exponent() const {
    std::vector<double> lambda(grid.points(), 0.0);
    for (std::size_t i = 0; i < obs_marks.size(); ++i)
        for (int idx = 0; idx < grid.points(); ++idx)
            lambda[idx] += obs_intensities[i] * (likelihood[i][idx] - 1.0);
    return lambda;
}

cvector adjoint_multiplier(const FilterModel& m, double dt) {
    SymbolParams p = m.signal_symbol();
    cvector out(m.grid.points());
    for (int idx = 0; idx < m.grid.points(); ++idx) {
        double xi = m.grid.freq(idx)[0];
        complex psi_star = std::conj(eval_symbol(p, 0.0, {xi, 0.0}).value) -
                           complex(0.0, m.drift * xi);
        out[idx] = std::exp(dt * psi_star);
    }
    return out;
}

void zakai_step(FilterState& st, const FilterModel& m, const cvector& step_multiplier,
                const std::vector<double>& lambda, const JumpRecord& obs) {
    const double dt = m.T / m.steps;
    const double t0 = st.step * dt;
    const double t1 = t0 + dt;
    const int pts = m.grid.points();

    // (a) spectral transport by the adjoint generator
    cvector spec = channel_spectrum(st.v, 0);
    for (int idx = 0; idx < pts; ++idx) spec[idx] *= step_multiplier[idx];
    spectrum_to_values(m.grid, std::move(spec), st.v.channel(0));

    // (b) compensator decay
    for (int idx = 0; idx < pts; ++idx)
        st.v.values[idx] *= std::exp(-lambda[idx] * dt);

    // (c) likelihood factor per observation jump in (t0, t1]
    for (std::size_t k = 0; k < obs.times.size(); ++k) {
        if (obs.times[k] <= t0 || obs.times[k] > t1) continue;
        const auto& row = m.likelihood[obs.marks[k]];
        for (int idx = 0; idx < pts; ++idx) st.v.values[idx] *= row[idx];
    }

    ++st.step;
    double mass = riemann_integral(st.v).real();
    if (!std::isfinite(mass)) throw std::runtime_error("zakai_step: non-finite density");
    st.masses.push_back(mass);
}

FilterRun run_spectral_filter(const FilterModel& m, const JumpRecord& obs) {
    m.validate();
    FilterRun run;
    cvector mult = adjoint_multiplier(m, m.T / m.steps);
    std::vector<double> lambda = m.compensator_exponent();

    FilterState st;
    st.v = m.u0;
    run.densities.push_back(st.v);
    run.masses.push_back(riemann_integral(st.v).real());
    for (int k = 0; k < m.steps; ++k) {
        zakai_step(st, m, mult, lambda, obs);
        run.densities.push_back(st.v);
        run.masses.push_back(st.masses.back());
        for (const auto& v : st.v.values) run.min_value = std::min(run.min_value, v.real());
    }
    return run;
}

Field unconditional_density(const FilterModel& m, double t) {
    cvector mult = adjoint_multiplier(m, t);
    cvector spec = channel_spectrum(m.u0, 0);
    for (int idx = 0; idx < m.grid.points(); ++idx) spec[idx] *= mult[idx];
    Field out(m.grid, 1);
    spectrum_to_values(m.grid, std::move(spec), out.channel(0));
    return out;
}

namespace {

double sample_from_density(const Field& u0, double u) {
    const GridSpec& g = u0.grid;
    double target = u * riemann_integral(u0).real();
    double acc = 0.0;
    for (int idx = 0; idx < g.points(); ++idx) {
        double w = std::max(u0.values[idx].real(), 0.0) * g.cell();
        if (acc + w >= target) {
            double f = w > 0.0 ? (target - acc) / w : 0.5;
            return g.point(idx)[0] + f * g.cell();
        }
        acc += w;
    }
    return g.point(g.points() - 1)[0];
}

} // namespace

TruthPath simulate_truth(const FilterModel& m, std::uint64_t seed) {
    m.validate();
    TruthPath out;
    const double dt = m.T / m.steps;
    const double beta = (m.m_plus - m.m_minus) / (m.m_plus + m.m_minus);
    const double sigma = std::pow(0.5 * (m.m_plus + m.m_minus) * dt, 1.0 / m.alpha);

    RngStream init(seed, 0x1417);
    RngStream dyn(seed, 0xd1d);
    out.x.resize(m.steps + 1);
    out.x[0] = sample_from_density(m.u0, init.uniform());
    for (int k = 0; k < m.steps; ++k) {
        double u = dyn.uniform();
        double w = dyn.exponential();
        out.x[k + 1] = out.x[k] + m.drift * dt + stable_sample(m.alpha, beta, sigma, u, w);
    }

    // thinning from the dominating rate C1 pi_i; the path value in force
    // just before tau is the Euler value at the knot entering the interval
    std::vector<std::pair<double, int>> accepted;
    for (std::size_t i = 0; i < m.obs_marks.size(); ++i) {
        RngStream rng(seed, stream_id(0x0b5, i));
        long n = rng.poisson(m.C1 * m.obs_intensities[i] * m.T);
        for (long k = 0; k < n; ++k) {
            double tau = rng.uniform() * m.T;
            double xm = out.x[std::min<int>(static_cast<int>(tau / dt), m.steps)];
            if (rng.uniform() < m.rho_at(static_cast<int>(i), xm) / m.C1)
                accepted.push_back({tau, static_cast<int>(i)});
        }
    }
    std::sort(accepted.begin(), accepted.end());
    out.obs.seed = seed;
    out.obs.counts.assign(m.obs_marks.size(), 0);
    for (const auto& [t, mk] : accepted) {
        out.obs.times.push_back(t);
        out.obs.marks.push_back(mk);
        ++out.obs.counts[mk];
    }
    return out;
}

JumpRecord reference_observations(const FilterModel& m, std::uint64_t seed) {
    PoissonSpec spec{m.obs_marks, m.obs_intensities, m.T};
    return simulate_ppm(spec, seed);
}

ParticleRun particle_filter(const FilterModel& m, const JumpRecord& obs, long n_particles,
                            std::uint64_t seed) {
    m.validate();
    if (n_particles < 2) throw std::invalid_argument("particle_filter: need at least 2 particles");
    const double dt = m.T / m.steps;
    const double beta = (m.m_plus - m.m_minus) / (m.m_plus + m.m_minus);
    const double sigma = std::pow(0.5 * (m.m_plus + m.m_minus) * dt, 1.0 / m.alpha);
    const int pts = m.grid.points();
    std::vector<double> lambda_row(pts);
    {
        auto lam = m.compensator_exponent();
        lambda_row = lam;
    }
    auto lambda_at = [&](double x) {
        double pos = (x + 0.5 * m.grid.length) / m.grid.cell();
        double wrapped = pos - std::floor(pos / m.grid.n) * m.grid.n;
        int k0 = static_cast<int>(wrapped) % m.grid.n;
        double f = wrapped - std::floor(wrapped);
        return lambda_row[k0] * (1.0 - f) + lambda_row[(k0 + 1) % m.grid.n] * f;
    };

    std::vector<double> x(n_particles), w(n_particles, 1.0 / n_particles);
    std::vector<RngStream> streams;
    streams.reserve(n_particles);
    for (long j = 0; j < n_particles; ++j) streams.emplace_back(seed, stream_id(0x9a, j));
    for (long j = 0; j < n_particles; ++j) x[j] = sample_from_density(m.u0, streams[j].uniform());
    RngStream resample_rng(seed, 0x4e5a);

    ParticleRun run;
    auto kde = [&]() {
        // weighted cloud-in-cell binning, then a spectral Gaussian smooth
        Field hist(m.grid, 1);
        double wsum = 0.0, mean = 0.0, m2 = 0.0, w2 = 0.0;
        for (long j = 0; j < n_particles; ++j) {
            wsum += w[j];
            w2 += w[j] * w[j];
            mean += w[j] * x[j];
        }
        if (!(wsum > 0.0) || !std::isfinite(wsum))
            throw std::runtime_error("particle_filter: weight collapse");
        mean /= wsum;
        for (long j = 0; j < n_particles; ++j) m2 += w[j] * (x[j] - mean) * (x[j] - mean);
        double sdev = std::sqrt(std::max(m2 / wsum, 1e-12));
        double n_eff = wsum * wsum / w2;
        double h = m.kde_bandwidth > 0.0
                       ? m.kde_bandwidth
                       : std::max(1.06 * sdev * std::pow(n_eff, -0.2), 1.5 * m.grid.cell());
        for (long j = 0; j < n_particles; ++j) {
            double pos = (x[j] + 0.5 * m.grid.length) / m.grid.cell();
            double wrapped = pos - std::floor(pos / m.grid.n) * m.grid.n;
            int k0 = static_cast<int>(wrapped) % m.grid.n;
            double f = wrapped - std::floor(wrapped);
            hist.values[k0] += w[j] / wsum * (1.0 - f) / m.grid.cell();
            hist.values[(k0 + 1) % m.grid.n] += w[j] / wsum * f / m.grid.cell();
        }
        cvector spec = channel_spectrum(hist, 0);
        for (int idx = 0; idx < pts; ++idx) {
            double xi = m.grid.freq(idx)[0];
            spec[idx] *= std::exp(-0.5 * xi * xi * h * h);
        }
        Field out(m.grid, 1);
        spectrum_to_values(m.grid, std::move(spec), out.channel(0));
        run.densities.push_back(out);
    };
    kde();

    std::size_t next_jump = 0;
    for (int k = 0; k < m.steps; ++k) {
        double t1 = (k + 1) * dt;
        for (long j = 0; j < n_particles; ++j) {
            double u = streams[j].uniform();
            double we = streams[j].exponential();
            x[j] += m.drift * dt + stable_sample(m.alpha, beta, sigma, u, we);
            w[j] *= std::exp(-lambda_at(x[j]) * dt);
        }
        while (next_jump < obs.times.size() && obs.times[next_jump] <= t1 + 1e-15) {
            int mk = obs.marks[next_jump];
            for (long j = 0; j < n_particles; ++j) w[j] *= m.rho_at(mk, x[j]);
            ++next_jump;
        }
        kde();

        double wsum = 0.0, w2 = 0.0;
        for (long j = 0; j < n_particles; ++j) {
            wsum += w[j];
            w2 += w[j] * w[j];
        }
        if (!(wsum > 0.0)) throw std::runtime_error("particle_filter: weight collapse");
        double n_eff = wsum * wsum / w2;
        if (n_eff < 0.5 * n_particles) {
            // systematic resampling
            std::vector<double> nx(n_particles);
            double u0r = resample_rng.uniform() / n_particles;
            double cum = w[0] / wsum;
            long src = 0;
            for (long j = 0; j < n_particles; ++j) {
                double target = u0r + static_cast<double>(j) / n_particles;
                while (cum < target && src + 1 < n_particles) cum += w[++src] / wsum;
                nx[j] = x[src];
            }
            x = std::move(nx);
            std::fill(w.begin(), w.end(), 1.0 / n_particles);
            ++run.resample_count;
        }
    }
    return run;
}

FilterComparison compare_filters(const FilterRun& spectral, const ParticleRun& particle) {
    if (spectral.densities.size() != particle.densities.size())
        throw std::invalid_argument("compare_filters: knot counts differ");
    FilterComparison cmp;
    for (std::size_t k = 0; k < spectral.densities.size(); ++k) {
        const Field& a = spectral.densities[k];
        const Field& b = particle.densities[k];
        if (!(a.grid == b.grid)) throw std::invalid_argument("compare_filters: grid mismatch");
        double ma = riemann_integral(a).real();
        double mb = riemann_integral(b).real();
        if (!(ma > 0.0) || !(mb > 0.0))
            throw std::invalid_argument("compare_filters: zero-mass frame");
        double l1 = 0.0;
        for (int idx = 0; idx < a.grid.points(); ++idx)
            l1 += std::abs(a.values[idx].real() / ma - b.values[idx].real() / mb);
        l1 *= a.grid.cell_volume();
        cmp.l1.push_back(l1);
        cmp.tv.push_back(0.5 * l1);
        cmp.tv_time_avg += 0.5 * l1;
    }
    cmp.tv_time_avg /= static_cast<double>(cmp.tv.size());
    return cmp;
}

MassMartingaleReport mass_martingale_experiment(const FilterModel& m, long realizations,
                                                std::uint64_t seed) {
    MassMartingaleReport rep;
    rep.realizations = realizations;
    double sum = 0.0, sum2 = 0.0;
    for (long r = 0; r < realizations; ++r) {
        JumpRecord obs = reference_observations(m, stream_id(seed, 0x0b5e, r));
        FilterRun run = run_spectral_filter(m, obs);
        double mass = run.masses.back();
        sum += mass;
        sum2 += mass * mass;
    }
    rep.mean = sum / realizations;
    rep.std_err = std::sqrt(std::max(0.0, sum2 / realizations - rep.mean * rep.mean) /
                            static_cast<double>(realizations));
    return rep;
}

} // namespace levylab
