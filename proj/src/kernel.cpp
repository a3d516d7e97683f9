#include "levylab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace levylab {

namespace {

std::vector<double> segment_breaks(const SymbolParams& p, double s, double t) {
    std::set<double> breaks{s, t};
    for (const auto* table : {&p.drift, &p.diffusion, &p.jump_density})
        for (double k : table->knots)
            if (k > s && k < t) breaks.insert(k);
    return {breaks.begin(), breaks.end()};
}

} // namespace

cvector integrate_symbol_lattice(const SymbolParams& p, double s, double t, const GridSpec& g) {
    if (s > t) throw std::invalid_argument("integrate_symbol_lattice: need s <= t");
    cvector acc(g.points(), 0.0);
    if (s == t) return acc;
    auto breaks = segment_breaks(p, s, t);
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        double len = breaks[k + 1] - breaks[k];
        double mid = 0.5 * (breaks[k] + breaks[k + 1]);
        auto values = symbol_on_lattice(p, mid, g);
        for (int idx = 0; idx < g.points(); ++idx) acc[idx] += len * values[idx];
    }
    return acc;
}

std::vector<cvector> knot_interval_exponents(const SymbolParams& p, const TimeGrid& tg,
                                             const GridSpec& g) {
    std::vector<cvector> out(tg.steps);
    for (int k = 0; k < tg.steps; ++k)
        out[k] = integrate_symbol_lattice(p, tg.knot(k), tg.knot(k + 1), g);
    return out;
}

namespace {

// exp of the exponent, averaged with its conjugate reflection
std::pair<cvector, double> symmetrized_multiplier(const GridSpec& g, const cvector& exponent) {
    cvector mult(g.points());
    for (int idx = 0; idx < g.points(); ++idx) mult[idx] = std::exp(exponent[idx]);
    double dev = 0.0;
    cvector out(g.points());
    for (int idx = 0; idx < g.points(); ++idx) {
        complex sym = 0.5 * (mult[idx] + std::conj(mult[g.reflect(idx)]));
        dev = std::max(dev, std::abs(mult[idx] - sym));
        out[idx] = sym;
    }
    return {std::move(out), dev};
}

Field invert_multiplier(const GridSpec& g, const cvector& mult) {
    Field spec(g);
    std::copy(mult.begin(), mult.end(), spec.values.begin());
    return idft(spec);
}

} // namespace

KernelTable propagator(const SymbolParams& p, double s, double t, const GridSpec& g) {
    if (s > t) throw std::invalid_argument("propagator: need s <= t");
    KernelTable table;
    table.grid = g;
    table.s = s;
    table.t = t;
    auto exponent = integrate_symbol_lattice(p, s, t, g);
    auto [mult, dev] = symmetrized_multiplier(g, exponent);
    table.multiplier = std::move(mult);
    table.symmetrization_deviation = dev;
    table.kernel = invert_multiplier(g, table.multiplier);
    return table;
}

double domination_margin(const KernelTable& k, double mu, double alpha) {
    double margin = 0.0;
    double tau = k.t - k.s;
    for (int idx = 0; idx < k.grid.points(); ++idx) {
        double r = k.grid.freq_norm(idx);
        margin = std::max(margin,
                          std::abs(k.multiplier[idx]) * std::exp(mu * std::pow(r, alpha) * tau));
    }
    return margin;
}

DyadicKernel dyadic_kernel(const SymbolParams& p, const LPBank& bank, int j, double s, double t) {
    if (j < 0 || j >= bank.blocks) throw std::invalid_argument("dyadic_kernel: block outside bank");
    if (s > t) throw std::invalid_argument("dyadic_kernel: need s <= t");
    DyadicKernel dk;
    dk.j = j;
    dk.grid = bank.grid;
    dk.s = s;
    dk.t = t;
    auto exponent = integrate_symbol_lattice(p, s, t, bank.grid);
    auto [mult, dev] = symmetrized_multiplier(bank.grid, exponent);
    (void)dev;
    dk.multiplier.resize(bank.grid.points());
    for (int idx = 0; idx < bank.grid.points(); ++idx)
        dk.multiplier[idx] = mult[idx] * bank.tilde[j][idx];
    dk.kernel = invert_multiplier(bank.grid, dk.multiplier);
    return dk;
}

namespace {

// log of e^{-c u} sum_{k<=d0} u^k, safe for large c u
double log_envelope_shape(double u, double c, int d0) {
    double poly = 0.0, uk = 1.0;
    for (int k = 0; k <= d0; ++k) {
        poly += uk;
        uk *= u;
    }
    return -c * u + std::log(poly);
}

} // namespace

DecayScanResult l1_decay_scan(const SymbolParams& p, const LPBank& bank,
                              const std::vector<int>& js, const std::vector<double>& taus) {
    if (js.empty() || taus.empty()) throw std::invalid_argument("l1_decay_scan: empty scan range");
    DecayScanResult res;
    const int d0 = p.dim / 2 + 1;

    double max_l1 = 0.0;
    for (int j : js) {
        if (j < 1) continue;
        for (double tau : taus) {
            DyadicKernel dk = dyadic_kernel(p, bank, j, 0.0, tau);
            DecayScanEntry e;
            e.j = j;
            e.tau = tau;
            e.u = std::exp2(j * p.alpha) * tau;
            e.l1 = riemann_l1(dk.kernel);
            max_l1 = std::max(max_l1, e.l1);
            res.entries.push_back(e);
        }
    }
    for (double tau : taus) {
        DyadicKernel dk = dyadic_kernel(p, bank, 0, 0.0, tau);
        res.h0_l1.push_back(riemann_l1(dk.kernel));
        res.h0_max = std::max(res.h0_max, res.h0_l1.back());
    }

    // entries at the FFT noise floor carry no decay information
    const double floor = 1e-8 * max_l1;
    std::vector<const DecayScanEntry*> fit;
    for (auto& e : res.entries)
        if (e.l1 > floor) fit.push_back(&e);
    if (fit.empty()) throw std::runtime_error("l1_decay_scan: every sample at the noise floor");

    // least squares in log space over the decay rate, golden section
    auto sse = [&](double c) {
        double mean = 0.0;
        for (const auto* e : fit) mean += std::log(e->l1) - log_envelope_shape(e->u, c, d0);
        mean /= static_cast<double>(fit.size());
        double s = 0.0;
        for (const auto* e : fit) {
            double r = std::log(e->l1) - log_envelope_shape(e->u, c, d0) - mean;
            s += r * r;
        }
        return s;
    };
    double a = 1e-4, b = 20.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = sse(x1), f2 = sse(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = sse(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = sse(x2);
        }
    }
    res.c_fit = 0.5 * (a + b);
    double mean = 0.0;
    for (const auto* e : fit) mean += std::log(e->l1) - log_envelope_shape(e->u, res.c_fit, d0);
    mean /= static_cast<double>(fit.size());
    double max_res = 0.0;
    for (const auto* e : fit) {
        double r = std::log(e->l1) - mean - log_envelope_shape(e->u, res.c_fit, d0);
        max_res = std::max(max_res, r);
        res.max_log_residual = std::max(res.max_log_residual, std::abs(r));
    }
    double log_C = mean + max_res; // inflate so the envelope dominates the data
    res.C_fit = std::exp(log_C);
    for (auto& e : res.entries) {
        e.envelope = std::exp(log_C + log_envelope_shape(e.u, res.c_fit, d0));
        e.ratio = e.envelope > 0.0 ? e.l1 / e.envelope : 0.0;
    }

    // rescaled collapse: group informative entries by u
    std::vector<std::pair<long long, double>> keyed;
    for (const auto* e : fit) keyed.push_back({llround(std::log2(e->u) * 1e6), e->l1});
    std::sort(keyed.begin(), keyed.end());
    std::size_t i = 0;
    while (i < keyed.size()) {
        std::size_t k = i;
        double lo_l1 = keyed[i].second, hi_l1 = keyed[i].second;
        while (k + 1 < keyed.size() && keyed[k + 1].first == keyed[i].first) {
            ++k;
            lo_l1 = std::min(lo_l1, keyed[k].second);
            hi_l1 = std::max(hi_l1, keyed[k].second);
        }
        if (k > i) res.collapse_spread = std::max(res.collapse_spread, hi_l1 / lo_l1 - 1.0);
        i = k + 1;
    }
    return res;
}

double selfsimilarity_check(const SymbolParams& p, const GridSpec& g, double tau1, double tau2) {
    if (!p.frozen())
        throw std::invalid_argument("selfsimilarity_check: identity only holds for frozen coefficients");
    if (!(tau1 > 0.0 && tau2 > 0.0))
        throw std::invalid_argument("selfsimilarity_check: need positive times");

    KernelTable k1 = propagator(p, 0.0, tau1, g);
    KernelTable k2 = propagator(p, 0.0, tau2, g);
    double peak = k1.kernel.max_abs();
    double r = tau1 / tau2;
    double stretch = std::pow(r, -1.0 / p.alpha);
    double amp = std::pow(r, -static_cast<double>(p.dim) / p.alpha);

    double err = 0.0;
    const double bulk = g.length / 4.0;
    const double inv_ld = 1.0 / std::pow(g.length, g.dim);
    for (int idx = 0; idx < g.points(); ++idx) {
        auto x = g.point(idx);
        double nx = std::sqrt(x[0] * x[0] + x[1] * x[1]);
        if (nx > bulk) continue;
        complex expected;
        if (tau1 == tau2) {
            expected = k2.kernel.values[idx];
        } else {
            // exact spectral evaluation of the band-limited periodized
            // kernel at the stretched point
            complex s = 0.0;
            double y0 = stretch * x[0], y1 = stretch * x[1];
            for (int m = 0; m < g.points(); ++m) {
                auto xi = g.freq(m);
                s += k2.multiplier[m] * std::polar(1.0, xi[0] * y0 + xi[1] * y1);
            }
            expected = amp * s * inv_ld;
        }
        err = std::max(err, std::abs(k1.kernel.values[idx] - expected));
    }
    return err / peak;
}

} // namespace levylab
