#include "levylab/jump_mc.hpp"

#include "levylab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace levylab {

void PoissonSpec::validate() const {
    if (mark_values.size() != intensities.size())
        throw std::invalid_argument("poisson spec: marks and intensities must match");
    for (double l : intensities)
        if (!(l > 0.0)) throw std::invalid_argument("poisson spec: intensities must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("poisson spec: horizon must be positive");
}

double PoissonSpec::total_intensity() const {
    return std::accumulate(intensities.begin(), intensities.end(), 0.0);
}

PoissonSpec PoissonSpec::scaled(double kappa) const {
    PoissonSpec out = *this;
    for (double& l : out.intensities) l *= kappa;
    return out;
}

JumpRecord simulate_ppm(const PoissonSpec& spec, std::uint64_t seed) {
    if (!spec.mark_values.empty()) spec.validate();
    JumpRecord rec;
    rec.seed = seed;
    rec.counts.assign(spec.mark_values.size(), 0);
    std::vector<std::pair<double, int>> events;
    for (std::size_t i = 0; i < spec.mark_values.size(); ++i) {
        RngStream rng(seed, stream_id(0x705, i));
        long n = rng.poisson(spec.intensities[i] * spec.horizon);
        rec.counts[i] = n;
        for (long k = 0; k < n; ++k)
            events.push_back({rng.uniform() * spec.horizon, static_cast<int>(i)});
    }
    std::sort(events.begin(), events.end());
    rec.times.reserve(events.size());
    rec.marks.reserve(events.size());
    for (const auto& [t, m] : events) {
        rec.times.push_back(t);
        rec.marks.push_back(m);
    }
    return rec;
}

namespace {

// cumulative trapezoid of the compensator rate sum_i lambda_i g(s, i)
std::vector<double> compensator_on_grid(const JumpIntegrand& g, const PoissonSpec& spec,
                                        const std::vector<double>& grid, int substeps) {
    auto rate = [&](double s) {
        double r = 0.0;
        for (std::size_t i = 0; i < spec.intensities.size(); ++i)
            r += spec.intensities[i] * g(s, static_cast<int>(i));
        return r;
    };
    std::vector<double> comp(grid.size(), 0.0);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        double a = grid[k - 1], b = grid[k];
        double h = (b - a) / substeps;
        double piece = 0.0;
        for (int s = 0; s < substeps; ++s)
            piece += 0.5 * h * (rate(a + s * h) + rate(a + (s + 1) * h));
        comp[k] = comp[k - 1] + piece;
    }
    return comp;
}

} // namespace

std::vector<double> compensated_integral(const JumpIntegrand& g, const JumpRecord& rec,
                                         const PoissonSpec& spec, const std::vector<double>& knots,
                                         int substeps) {
    std::vector<double> comp = compensator_on_grid(g, spec, knots, substeps);
    std::vector<double> out(knots.size(), 0.0);
    double jumpsum = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < knots.size(); ++k) {
        while (next < rec.times.size() && rec.times[next] <= knots[k]) {
            jumpsum += g(rec.times[next], rec.marks[next]);
            ++next;
        }
        out[k] = jumpsum - comp[k];
    }
    return out;
}

BdgReport bdg_two_sided(const JumpIntegrand& g, const PoissonSpec& spec, double p, long n_paths,
                        std::uint64_t seed) {
    if (p < 2.0) throw std::invalid_argument("bdg_two_sided: p must be >= 2");
    spec.validate();
    const double T = spec.horizon;

    // deterministic right-hand side by dense trapezoid
    const int dense = 4096;
    double int_gp = 0.0, int_g2 = 0.0;
    for (int k = 0; k <= dense; ++k) {
        double s = T * k / dense;
        double w = (k == 0 || k == dense) ? 0.5 : 1.0;
        for (std::size_t i = 0; i < spec.intensities.size(); ++i) {
            double gv = g(s, static_cast<int>(i));
            int_gp += w * spec.intensities[i] * std::pow(std::abs(gv), p) * T / dense;
            int_g2 += w * spec.intensities[i] * gv * gv * T / dense;
        }
    }
    BdgReport rep;
    rep.p = p;
    rep.n_paths = n_paths;
    rep.rhs = int_gp + std::pow(int_g2, p / 2.0);

    // shared evaluation grid and compensator
    const int ngrid = 512;
    std::vector<double> grid(ngrid + 1);
    for (int k = 0; k <= ngrid; ++k) grid[k] = T * k / ngrid;
    std::vector<double> comp = compensator_on_grid(g, spec, grid, 8);
    auto comp_at = [&](double t) {
        double pos = t / T * ngrid;
        int k = std::min(static_cast<int>(pos), ngrid - 1);
        double f = pos - k;
        return comp[k] * (1.0 - f) + comp[k + 1] * f;
    };

    double sum_sup = 0.0, sum_sup2 = 0.0, sum_end = 0.0, sum_end2 = 0.0;
    for (long path = 0; path < n_paths; ++path) {
        JumpRecord rec = simulate_ppm(spec, stream_id(seed, 0xbd6, path));
        double sup = 0.0, jumpsum = 0.0;
        std::size_t next = 0;
        for (int k = 0; k <= ngrid; ++k) {
            double t = grid[k];
            while (next < rec.times.size() && rec.times[next] <= t) {
                double tau = rec.times[next];
                double before = jumpsum - comp_at(tau);
                sup = std::max(sup, std::abs(before)); // left limit
                jumpsum += g(tau, rec.marks[next]);
                sup = std::max(sup, std::abs(jumpsum - comp_at(tau)));
                ++next;
            }
            sup = std::max(sup, std::abs(jumpsum - comp[k]));
        }
        double qT = jumpsum - comp[ngrid];
        double sp = std::pow(sup, p);
        double ep = std::pow(std::abs(qT), p);
        sum_sup += sp;
        sum_sup2 += sp * sp;
        sum_end += ep;
        sum_end2 += ep * ep;
    }
    double n = static_cast<double>(n_paths);
    rep.lhs_sup = sum_sup / n;
    rep.lhs_std_err = std::sqrt(std::max(0.0, sum_sup2 / n - rep.lhs_sup * rep.lhs_sup) / n);
    rep.endpoint_moment = sum_end / n;
    rep.endpoint_std_err =
        std::sqrt(std::max(0.0, sum_end2 / n - rep.endpoint_moment * rep.endpoint_moment) / n);
    rep.ratio = rep.lhs_sup / rep.rhs;
    return rep;
}

double stable_sample(double alpha, double beta_skew, double sigma, double u_unit,
                     double w_exponential) {
    double U = M_PI * (u_unit - 0.5);
    double W = w_exponential;
    double zeta = -beta_skew * std::tan(alpha * M_PI / 2.0);
    double xi0 = std::atan(-zeta) / alpha;
    double X = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * alpha)) *
               std::sin(alpha * (U + xi0)) / std::pow(std::cos(U), 1.0 / alpha) *
               std::pow(std::cos(U - alpha * (U + xi0)) / W, (1.0 - alpha) / alpha);
    return sigma * X;
}

std::vector<double> stable_increments(double alpha, double m_plus, double m_minus, double dt,
                                      long count, std::uint64_t seed) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("stable_increments: alpha must be in (1,2)");
    if (m_plus < 0.0 || m_minus < 0.0 || m_plus + m_minus <= 0.0)
        throw std::invalid_argument("stable_increments: need nonnegative weights, not both zero");
    if (!(dt > 0.0)) throw std::invalid_argument("stable_increments: dt must be positive");

    const double c1d = 0.5; // d = 1 symbol normalization
    double beta = (m_plus - m_minus) / (m_plus + m_minus);
    double sigma = std::pow(c1d * (m_plus + m_minus) * dt, 1.0 / alpha);

    std::vector<double> out(count);
    RngStream rng(seed, 0x57ab1e);
    for (long k = 0; k < count; ++k) {
        double u = rng.uniform();
        double w = rng.exponential();
        out[k] = stable_sample(alpha, beta, sigma, u, w);
    }
    return out;
}

} // namespace levylab
