#include "levylab/estimate_lab.hpp"

#include "levylab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levylab {

void FieldEnsembleSpec::validate(const GridSpec& g) const {
    if (count < 1) throw std::invalid_argument("ensemble: count must be >= 1");
    if (channels < 1) throw std::invalid_argument("ensemble: channels must be >= 1");
    if (band_lo < 0.0 || band_hi <= band_lo)
        throw std::invalid_argument("ensemble: bad band");
    if (band_hi >= M_PI * g.n / g.length)
        throw std::invalid_argument("ensemble: band must stay inside the lattice");
    if (time_harmonics < 0) throw std::invalid_argument("ensemble: bad harmonics count");
    if (band_lo == 0.0 && band_hi == 0.0) throw std::invalid_argument("ensemble: empty band");
}

namespace {

bool canonical_mode(const GridSpec& g, int idx) {
    auto a = g.axes(idx);
    int m0 = g.mode(a[0]);
    int m1 = g.dim == 2 ? g.mode(a[1]) : 0;
    if (m0 != 0) return m0 > 0;
    return m1 >= 0; // m = (0, m1>=0), including the zero mode
}

std::uint64_t mode_key(const GridSpec& g, int idx) {
    auto a = g.axes(idx);
    auto enc = [](int m) { return static_cast<std::uint64_t>(static_cast<std::int64_t>(m) + (1 << 20)); };
    return stream_id(enc(g.mode(a[0])), g.dim == 2 ? enc(g.mode(a[1])) : 0);
}

} // namespace

Field random_field(const FieldEnsembleSpec& spec, const GridSpec& g, int sample) {
    spec.validate(g);
    Field sp(g, spec.channels);
    for (int c = 0; c < spec.channels; ++c) {
        for (int idx = 0; idx < g.points(); ++idx) {
            if (!canonical_mode(g, idx)) continue;
            double r = g.freq_norm(idx);
            if (r < spec.band_lo || r > spec.band_hi) continue;
            RngStream rng(spec.seed, stream_id(sample, c, mode_key(g, idx)));
            double amp = r > 0.0 ? std::pow(r, -spec.decay) : 1.0;
            int refl = g.reflect(idx);
            if (refl == idx) {
                sp.at(c, idx) = amp * rng.normal();
            } else {
                complex z(rng.normal(), rng.normal());
                sp.at(c, idx) = amp * z * M_SQRT1_2;
                sp.at(c, refl) = std::conj(sp.at(c, idx));
            }
        }
    }
    return idft(sp);
}

SpaceTimeField random_space_time_field(const FieldEnsembleSpec& spec, const GridSpec& g,
                                       const TimeGrid& tg, int sample) {
    spec.validate(g);
    SpaceTimeField out(tg, g, spec.channels);
    const int Q = spec.time_harmonics;
    Field sp(g, spec.channels);
    std::vector<double> tf(tg.knots());
    for (int c = 0; c < spec.channels; ++c) {
        for (int idx = 0; idx < g.points(); ++idx) {
            if (!canonical_mode(g, idx)) continue;
            double r = g.freq_norm(idx);
            if (r < spec.band_lo || r > spec.band_hi) continue;
            RngStream rng(spec.seed, stream_id(sample, c, mode_key(g, idx)));
            double amp = r > 0.0 ? std::pow(r, -spec.decay) : 1.0;
            int refl = g.reflect(idx);
            complex base;
            if (refl == idx) base = amp * rng.normal();
            else base = amp * complex(rng.normal(), rng.normal()) * M_SQRT1_2;

            // smooth time modulation from a fixed harmonic basis keeps the
            // field refinement-consistent in the knot count
            for (int i = 0; i < tg.knots(); ++i) tf[i] = 0.0;
            for (int q = 0; q <= Q; ++q) {
                double aq = rng.normal() / (1.0 + q);
                double bq = rng.normal() / (1.0 + q);
                for (int i = 0; i < tg.knots(); ++i) {
                    double ph = 2.0 * M_PI * q * (tg.knot(i) - tg.a) / (tg.b - tg.a);
                    tf[i] += aq * std::cos(ph) + (q > 0 ? bq * std::sin(ph) : 0.0);
                }
            }
            sp.at(c, idx) = base;
            for (int i = 0; i < tg.knots(); ++i) {
                out.frames[i].at(c, idx) = base * tf[i];
                if (refl != idx) out.frames[i].at(c, refl) = std::conj(base) * tf[i];
            }
        }
    }
    for (auto& fr : out.frames) fr = idft(fr);
    return out;
}

double periodogram_slope(const std::vector<Field>& ensemble, double band_lo, double band_hi) {
    if (ensemble.empty()) throw std::invalid_argument("periodogram_slope: empty ensemble");
    const GridSpec& g = ensemble.front().grid;
    // radial bins, log-spaced
    const int nbins = 12;
    std::vector<double> power(nbins, 0.0), count(nbins, 0.0);
    double llo = std::log(band_lo), lhi = std::log(band_hi);
    for (const auto& f : ensemble) {
        Field sp = dft(f);
        for (int c = 0; c < f.channels; ++c)
            for (int idx = 0; idx < g.points(); ++idx) {
                double r = g.freq_norm(idx);
                if (r < band_lo || r > band_hi || r == 0.0) continue;
                int b = std::min(nbins - 1,
                                 static_cast<int>(nbins * (std::log(r) - llo) / (lhi - llo)));
                power[b] += std::norm(sp.at(c, idx));
                count[b] += 1.0;
            }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (int b = 0; b < nbins; ++b) {
        if (count[b] == 0.0) continue;
        double x = llo + (b + 0.5) * (lhi - llo) / nbins;
        double y = std::log(power[b] / count[b]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++used;
    }
    if (used < 2) throw std::runtime_error("periodogram_slope: too few populated bins");
    return (used * sxy - sx * sy) / (used * sxx - sx * sx);
}

// ---------------------------------------------------------------------
// proposition harnesses
// ---------------------------------------------------------------------

namespace {

// blocks whose masks overlap the spectral support of g
std::vector<int> active_blocks(const IgSpectra& S, const LPBank& bank) {
    const int pts = bank.grid.points();
    std::vector<char> has(pts, 0);
    for (int i = 0; i < S.time().knots(); ++i)
        for (int c = 0; c < S.channels(); ++c) {
            const cvector& sp = S.g_spectrum(i, c);
            for (int idx = 0; idx < pts; ++idx)
                if (std::abs(sp[idx]) > 0.0) has[idx] = 1;
        }
    std::vector<int> blocks;
    for (int b = 0; b < bank.blocks; ++b) {
        bool active = false;
        for (int idx = 0; idx < pts && !active; ++idx)
            active = has[idx] && bank.mask[b][idx] > 0.0;
        if (active) blocks.push_back(b);
    }
    return blocks;
}

// visits every ordered knot pair (i < j, j < knots-1 has weight dt; the
// final knot carries zero left-rule weight and is skipped);
// mult = exp(prefix_j - prefix_i) built incrementally.
template <typename Fn>
void sweep_pairs(const IgSpectra& S, Fn&& fn) {
    const int knots = S.time().knots();
    const int pts = S.grid().points();
    std::vector<cvector> steps(knots - 1);
    for (int k = 0; k < knots - 1; ++k) steps[k] = S.interval_multiplier(k);
    cvector mult(pts);
    for (int i = 0; i < knots - 1; ++i) {
        std::fill(mult.begin(), mult.end(), complex(1.0));
        for (int j = i + 1; j < knots; ++j) {
            const cvector& st = steps[j - 1];
            for (int idx = 0; idx < pts; ++idx) mult[idx] *= st[idx];
            if (j == knots - 1) continue; // zero outer weight
            fn(i, j, mult);
        }
    }
}

} // namespace

RatioSample ratio_prop1(const SpaceTimeField& g, const SymbolParams& p, double beta, double p_exp,
                        const LPBank& bank, int sample_id) {
    if (p_exp < 2.0) throw std::invalid_argument("ratio_prop1: p must be >= 2");
    const GridSpec& grid = g.grid();
    const TimeGrid& tg = g.time;
    const int pts = grid.points();
    const double dt = tg.dt();
    const double index = beta + p.alpha;

    IgSpectra S(g, p);
    auto blocks = active_blocks(S, bank);

    double total = 0.0;
    cvector scratch(pts);
    std::vector<complex> frame(pts);
    std::vector<double> sq(pts);
    sweep_pairs(S, [&](int i, int j, const cvector& mult) {
        (void)j;
        sq.assign(pts, 0.0);
        for (int c = 0; c < g.channels(); ++c) {
            const cvector& gs = S.g_spectrum(i, c);
            for (int b : blocks) {
                double w = std::pow(2.0, 2.0 * index * b);
                const auto& mask = bank.mask[b];
                for (int idx = 0; idx < pts; ++idx) scratch[idx] = mask[idx] * mult[idx] * gs[idx];
                spectrum_to_values(grid, scratch, frame.data());
                for (int idx = 0; idx < pts; ++idx) sq[idx] += w * std::norm(frame[idx]);
            }
        }
        double ip = 0.0;
        for (int idx = 0; idx < pts; ++idx) ip += std::pow(sq[idx], p_exp / 2.0);
        total += dt * dt * ip * grid.cell_volume();
    });
    double lhs = std::pow(total, 1.0 / p_exp);

    NormDescriptor rd{NormFamily::besov, index - p.alpha / p_exp, p_exp, TimeStructure::E};
    double rhs = norm(g, rd, bank);
    if (rhs == 0.0) throw std::invalid_argument("ratio_prop1: zero right-hand side");
    return {sample_id, lhs, rhs, lhs / rhs};
}

RatioSample ratio_prop2(const SpaceTimeField& g, const SymbolParams& p, double beta, double p_exp,
                        NormFamily family, const LPBank& bank, int sample_id) {
    if (p_exp < 2.0) throw std::invalid_argument("ratio_prop2: p must be >= 2");
    if (family != NormFamily::sobolev && family != NormFamily::besov)
        throw std::invalid_argument("ratio_prop2: family must be sobolev or besov");
    const GridSpec& grid = g.grid();
    const TimeGrid& tg = g.time;
    const int pts = grid.points();
    const double dt = tg.dt();
    const int knots = tg.knots();

    IgSpectra S(g, p);
    auto blocks = active_blocks(S, bank);

    // fractional derivative multiplier -|xi|^{alpha/2}
    std::vector<double> da(pts);
    for (int idx = 0; idx < pts; ++idx) da[idx] = -std::pow(grid.freq_norm(idx), p.alpha / 2.0);

    double lhs = 0.0;
    cvector scratch(pts);
    std::vector<complex> frame(pts);
    if (family == NormFamily::sobolev) {
        std::vector<double> bes(pts);
        for (int idx = 0; idx < pts; ++idx)
            bes[idx] = std::pow(1.0 + std::pow(grid.freq_norm(idx), 2.0), beta / 2.0);
        // acc[j][x]: inner L2-in-s accumulations per outer knot
        std::vector<std::vector<double>> acc(knots, std::vector<double>(pts, 0.0));
        sweep_pairs(S, [&](int i, int j, const cvector& mult) {
            for (int c = 0; c < g.channels(); ++c) {
                const cvector& gs = S.g_spectrum(i, c);
                for (int idx = 0; idx < pts; ++idx)
                    scratch[idx] = bes[idx] * da[idx] * mult[idx] * gs[idx];
                spectrum_to_values(grid, scratch, frame.data());
                for (int idx = 0; idx < pts; ++idx) acc[j][idx] += dt * std::norm(frame[idx]);
            }
        });
        for (int j = 0; j < knots - 1; ++j) {
            double ip = 0.0;
            for (int idx = 0; idx < pts; ++idx) ip += std::pow(acc[j][idx], p_exp / 2.0);
            lhs += dt * ip * grid.cell_volume();
        }
    } else {
        for (int b : blocks) {
            const auto& mask = bank.mask[b];
            std::vector<std::vector<double>> acc(knots, std::vector<double>(pts, 0.0));
            sweep_pairs(S, [&](int i, int j, const cvector& mult) {
                for (int c = 0; c < g.channels(); ++c) {
                    const cvector& gs = S.g_spectrum(i, c);
                    for (int idx = 0; idx < pts; ++idx)
                        scratch[idx] = mask[idx] * da[idx] * mult[idx] * gs[idx];
                    spectrum_to_values(grid, scratch, frame.data());
                    for (int idx = 0; idx < pts; ++idx) acc[j][idx] += dt * std::norm(frame[idx]);
                }
            });
            double bsum = 0.0;
            for (int j = 0; j < knots - 1; ++j) {
                double ip = 0.0;
                for (int idx = 0; idx < pts; ++idx) ip += std::pow(acc[j][idx], p_exp / 2.0);
                bsum += dt * ip * grid.cell_volume();
            }
            lhs += std::pow(2.0, beta * p_exp * b) * bsum;
        }
    }
    lhs = std::pow(lhs, 1.0 / p_exp);

    NormDescriptor rd{family, beta, p_exp, TimeStructure::E};
    double rhs = norm(g, rd, bank);
    if (rhs == 0.0) throw std::invalid_argument("ratio_prop2: zero right-hand side");
    return {sample_id, lhs, rhs, lhs / rhs};
}

RatioReport prop1_report(const FieldEnsembleSpec& spec, const GridSpec& g, const TimeGrid& tg,
                         const SymbolParams& p, double beta, double p_exp, const LPBank& bank) {
    RatioReport rep;
    for (int s = 0; s < spec.count; ++s) {
        SpaceTimeField f = random_space_time_field(spec, g, tg, s);
        rep.samples.push_back(ratio_prop1(f, p, beta, p_exp, bank, s));
        rep.max_ratio = std::max(rep.max_ratio, rep.samples.back().ratio);
    }
    return rep;
}

RatioReport prop2_report(const FieldEnsembleSpec& spec, const GridSpec& g, const TimeGrid& tg,
                         const SymbolParams& p, double beta, double p_exp, NormFamily family,
                         const LPBank& bank) {
    RatioReport rep;
    for (int s = 0; s < spec.count; ++s) {
        SpaceTimeField f = random_space_time_field(spec, g, tg, s);
        rep.samples.push_back(ratio_prop2(f, p, beta, p_exp, family, bank, s));
        rep.max_ratio = std::max(rep.max_ratio, rep.samples.back().ratio);
    }
    return rep;
}

SpaceTimeField g_aggregate(const SpaceTimeField& g, const SymbolParams& p) {
    const GridSpec& grid = g.grid();
    const int pts = grid.points();
    const double dt = g.time.dt();
    IgSpectra S(g, p);
    std::vector<double> da(pts);
    for (int idx = 0; idx < pts; ++idx) da[idx] = -std::pow(grid.freq_norm(idx), p.alpha / 2.0);

    SpaceTimeField out(g.time, grid, 1);
    std::vector<std::vector<double>> acc(g.time.knots(), std::vector<double>(pts, 0.0));
    cvector scratch(pts);
    std::vector<complex> frame(pts);
    const int knots = g.time.knots();
    // the aggregate is wanted at the final knot too, so sweep manually
    std::vector<cvector> steps(knots - 1);
    for (int k = 0; k < knots - 1; ++k) steps[k] = S.interval_multiplier(k);
    cvector mult(pts);
    for (int i = 0; i < knots - 1; ++i) {
        std::fill(mult.begin(), mult.end(), complex(1.0));
        for (int j = i + 1; j < knots; ++j) {
            const cvector& st = steps[j - 1];
            for (int idx = 0; idx < pts; ++idx) mult[idx] *= st[idx];
            for (int c = 0; c < g.channels(); ++c) {
                const cvector& gs = S.g_spectrum(i, c);
                for (int idx = 0; idx < pts; ++idx) scratch[idx] = da[idx] * mult[idx] * gs[idx];
                spectrum_to_values(grid, scratch, frame.data());
                for (int idx = 0; idx < pts; ++idx) acc[j][idx] += dt * std::norm(frame[idx]);
            }
        }
    }
    for (int j = 0; j < knots; ++j)
        for (int idx = 0; idx < pts; ++idx) out.frames[j].values[idx] = std::sqrt(acc[j][idx]);
    return out;
}

// ---------------------------------------------------------------------
// homogeneous-symbol lemma oracle
// ---------------------------------------------------------------------

namespace {

// trapezoid over sorted nodes of [F(xi+y)-F(xi)] |y|^{-1-delta} on one
// side of the 1-d singular integral; the interval straddling ystar is
// the excluded disc and is integrated separately
double side_integral_1d(const std::function<double(double)>& F, double F_xi, double xi,
                        double delta, const std::vector<double>& nodes, double ystar) {
    double sum = 0.0;
    auto G = [&](double y) {
        double arg = xi + y;
        if (std::abs(arg) < 1e-13) return 0.0; // measure-zero dodge of the F singularity
        return (F(arg) - F_xi) * std::pow(std::abs(y), -1.0 - delta);
    };
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        if (nodes[k] < ystar && nodes[k + 1] > ystar) continue;
        sum += 0.5 * (nodes[k + 1] - nodes[k]) * (G(nodes[k]) + G(nodes[k + 1]));
    }
    return sum;
}

} // namespace

AuxL2Report verify_auxl2(double l, double delta,
                         const std::function<double(std::array<double, 2>)>& m_profile, int dim,
                         double refine) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("verify_auxl2: delta in (0,1)");
    if (!(l > -dim && l < delta)) throw std::invalid_argument("verify_auxl2: need l in (-d, delta)");

    // the same normalizing constant that makes the hypersingular field
    // route agree with the Fourier multiplier
    GridSpec cal_grid = dim == 1 ? GridSpec(1, 256, 32.0) : GridSpec(2, 64, 16.0);
    double c_delta = hypersingular_calibrate(delta, cal_grid);

    AuxL2Report rep;
    const double y_min = 1e-6, y_max = 1e6;
    const int per_decade = std::max(8, static_cast<int>(std::lround(48 * refine)));

    const int n_radii = 12;
    std::vector<double> radii(n_radii);
    for (int k = 0; k < n_radii; ++k)
        radii[k] = std::exp(std::log(1.0) + (std::log(8.0) - std::log(1.0)) * k / (n_radii - 1));

    if (dim == 1) {
        auto F = [&](double x) {
            return std::pow(std::abs(x), l) * m_profile({x > 0 ? 1.0 : -1.0, 0.0});
        };
        double m_pos = m_profile({1.0, 0.0});
        double m_neg = m_profile({-1.0, 0.0});
        for (double sign : {1.0, -1.0}) {
            std::vector<double> vals;
            for (double r : radii) {
                double xi = sign * r;
                double F_xi = F(xi);
                double ystar = -xi;
                double r0 = 0.25 * r; // disc around the F singularity

                // master log grid, skipping the disc (its endpoints added
                // exactly so the trapezoid boundary is clean)
                std::vector<double> pos, neg;
                auto push = [&](double y) {
                    if (y > ystar - r0 && y < ystar + r0) return;
                    if (y >= y_min && y <= y_max) pos.push_back(y);
                    else if (-y >= y_min && -y <= y_max) neg.push_back(y);
                };
                const int decades = static_cast<int>(std::ceil(std::log10(y_max / y_min)));
                for (int k = 0; k <= decades * per_decade; ++k) {
                    double y = y_min * std::pow(10.0, static_cast<double>(k) / per_decade);
                    push(y);
                    push(-y);
                }
                (ystar - r0 > 0 ? pos : neg).push_back(ystar - r0);
                (ystar + r0 > 0 ? pos : neg).push_back(ystar + r0);
                std::sort(pos.begin(), pos.end());
                std::sort(neg.begin(), neg.end());
                double integral = side_integral_1d(F, F_xi, xi, delta, pos, ystar) +
                                  side_integral_1d(F, F_xi, xi, delta, neg, ystar);

                // disc part: F(xi + y) = |z|^l m(sgn z) with z = y - ystar;
                // the |z|^l factor is integrated exactly per interval so the
                // singularity costs no quadrature order
                auto kernel_antideriv = [&](double y) {
                    // antiderivative of |y|^{-1-delta} on one sign
                    return -std::pow(std::abs(y), -delta) / delta * (y > 0 ? 1.0 : -1.0);
                };
                auto power_int = [&](double z1, double z2) {
                    // integral of |z|^l over [z1, z2], same sign
                    double a1 = std::pow(std::abs(z1), l + 1.0) / (l + 1.0);
                    double a2 = std::pow(std::abs(z2), l + 1.0) / (l + 1.0);
                    return z1 >= 0 ? a2 - a1 : a1 - a2;
                };
                double local = 0.0;
                const double z_min = 1e-10;
                const int zk = 4 * per_decade;
                for (double s : {1.0, -1.0}) {
                    // innermost sliver [0, z_min]: |z|^l mass with the smooth
                    // factor frozen at the singularity
                    local += std::pow(z_min, l + 1.0) / (l + 1.0) * m_profile({s, 0.0}) *
                             std::pow(std::abs(ystar), -1.0 - delta);
                    double prev = s * z_min;
                    for (int k = 1; k <= zk; ++k) {
                        double z = s * z_min * std::pow(r0 / z_min, static_cast<double>(k) / zk);
                        double zm = 0.5 * (prev + z);
                        double smooth =
                            m_profile({s, 0.0}) * std::pow(std::abs(ystar + zm), -1.0 - delta);
                        local += power_int(std::min(prev, z), std::max(prev, z)) * smooth;
                        prev = z;
                    }
                }
                local -= F_xi * (kernel_antideriv(ystar + r0) - kernel_antideriv(ystar - r0));
                integral += local;

                // far tails: F(xi+y) ~ m(sgn y) |y|^l
                integral += m_pos * std::pow(y_max, l - delta) / (delta - l) -
                            F_xi * std::pow(y_max, -delta) / delta;
                integral += m_neg * std::pow(y_max, l - delta) / (delta - l) -
                            F_xi * std::pow(y_max, -delta) / delta;
                double normalized = std::pow(r, delta - l) * std::abs(c_delta * integral);
                vals.push_back(normalized);
                rep.table.push_back({r, sign, normalized});
                rep.sup_normalized = std::max(rep.sup_normalized, normalized);
            }
            double mx = *std::max_element(vals.begin(), vals.end());
            double mn = *std::min_element(vals.begin(), vals.end());
            if (mx > 0.0) rep.ray_spread = std::max(rep.ray_spread, (mx - mn) / mx);
        }
        return rep;
    }

    // dim == 2: polar quadrature around the evaluation point
    auto F2 = [&](double x0, double x1) {
        double r = std::hypot(x0, x1);
        return std::pow(r, l) * m_profile({x0 / r, x1 / r});
    };
    const int n_angles = 8;
    const int quad_angles = static_cast<int>(std::lround(128 * refine));
    double m_avg = 0.0;
    for (int q = 0; q < quad_angles; ++q) {
        double th = 2.0 * M_PI * q / quad_angles;
        m_avg += m_profile({std::cos(th), std::sin(th)}) / quad_angles;
    }
    for (int a = 0; a < n_angles; ++a) {
        double phi = 2.0 * M_PI * (a + 0.21) / n_angles;
        std::vector<double> vals;
        for (double r : radii) {
            double xi0 = r * std::cos(phi), xi1 = r * std::sin(phi);
            double F_xi = F2(xi0, xi1);
            const int decades = static_cast<int>(std::ceil(std::log10(y_max / y_min)));
            double integral = 0.0;
            double prev_rho = 0.0, prev_val = 0.0;
            for (int k = 0; k <= decades * per_decade; ++k) {
                double rho = y_min * std::pow(10.0, static_cast<double>(k) / per_decade);
                double ring = 0.0;
                for (int q = 0; q < quad_angles; ++q) {
                    double th = 2.0 * M_PI * q / quad_angles;
                    double p0 = xi0 + rho * std::cos(th), p1 = xi1 + rho * std::sin(th);
                    if (std::hypot(p0, p1) < 1e-13) continue;
                    ring += (F2(p0, p1) - F_xi) * (2.0 * M_PI / quad_angles);
                }
                double val = ring * std::pow(rho, -1.0 - delta);
                if (k > 0) integral += 0.5 * (rho - prev_rho) * (val + prev_val);
                prev_rho = rho;
                prev_val = val;
            }
            integral += 2.0 * M_PI * (m_avg * std::pow(y_max, l - delta) / (delta - l) -
                                      F_xi * std::pow(y_max, -delta) / delta);
            double normalized = std::pow(r, delta - l) * std::abs(c_delta * integral);
            vals.push_back(normalized);
            rep.table.push_back({r, phi, normalized});
            rep.sup_normalized = std::max(rep.sup_normalized, normalized);
        }
        double mx = *std::max_element(vals.begin(), vals.end());
        double mn = *std::min_element(vals.begin(), vals.end());
        if (mx > 0.0) rep.ray_spread = std::max(rep.ray_spread, (mx - mn) / mx);
    }
    return rep;
}

// ---------------------------------------------------------------------
// parabolic maximal and sharp functions
// ---------------------------------------------------------------------

namespace {

// prefix sums over (time, space) of a scalar space-time array, with
// periodic wrap handled by range splitting
class BoxSums {
public:
    BoxSums(const SpaceTimeField& h, bool absolute) : g_(h.grid()), knots_(h.time.knots()) {
        if (h.channels() != 1)
            throw std::invalid_argument("maximal/sharp: scalar-channel fields only");
        const int pts = g_.points();
        vals_.resize(static_cast<std::size_t>(knots_) * pts);
        for (int i = 0; i < knots_; ++i)
            for (int idx = 0; idx < pts; ++idx) {
                double v = h.frames[i].values[idx].real();
                vals_[static_cast<std::size_t>(i) * pts + idx] = absolute ? std::abs(v) : v;
            }
        if (g_.dim == 1) {
            p1_.assign(static_cast<std::size_t>(knots_ + 1) * (g_.n + 1), 0.0);
            for (int i = 0; i < knots_; ++i)
                for (int k = 0; k < g_.n; ++k)
                    at1(i + 1, k + 1) = vals_[static_cast<std::size_t>(i) * pts + k] +
                                        at1(i, k + 1) + at1(i + 1, k) - at1(i, k);
        } else {
            std::size_t strate = static_cast<std::size_t>(g_.n + 1) * (g_.n + 1);
            p2_.assign(static_cast<std::size_t>(knots_ + 1) * strate, 0.0);
            for (int i = 0; i < knots_; ++i)
                for (int a = 0; a < g_.n; ++a)
                    for (int b = 0; b < g_.n; ++b)
                        at2(i + 1, a + 1, b + 1) =
                            vals_[(static_cast<std::size_t>(i) * pts) + a * g_.n + b] +
                            at2(i, a + 1, b + 1) + at2(i + 1, a, b + 1) + at2(i + 1, a + 1, b) -
                            at2(i, a, b + 1) - at2(i, a + 1, b) - at2(i + 1, a, b) + at2(i, a, b);
        }
    }

    double value(int i, int idx) const {
        return vals_[static_cast<std::size_t>(i) * g_.points() + idx];
    }

    // inclusive index ranges; x ranges may wrap (lo > hi means wrap)
    double box_sum(int i0, int i1, int a0, int a1, int b0 = 0, int b1 = 0) const {
        double s = 0.0;
        auto segs = [&](int lo, int hi) {
            std::vector<std::pair<int, int>> out;
            lo = ((lo % g_.n) + g_.n) % g_.n;
            hi = ((hi % g_.n) + g_.n) % g_.n;
            if (lo <= hi) out.push_back({lo, hi});
            else {
                out.push_back({lo, g_.n - 1});
                out.push_back({0, hi});
            }
            return out;
        };
        if (g_.dim == 1) {
            for (auto [lo, hi] : segs(a0, a1)) s += rect1(i0, i1, lo, hi);
        } else {
            for (auto [alo, ahi] : segs(a0, a1))
                for (auto [blo, bhi] : segs(b0, b1)) s += rect2(i0, i1, alo, ahi, blo, bhi);
        }
        return s;
    }

private:
    double& at1(int i, int k) { return p1_[static_cast<std::size_t>(i) * (g_.n + 1) + k]; }
    double at1(int i, int k) const { return p1_[static_cast<std::size_t>(i) * (g_.n + 1) + k]; }
    double& at2(int i, int a, int b) {
        return p2_[(static_cast<std::size_t>(i) * (g_.n + 1) + a) * (g_.n + 1) + b];
    }
    double at2(int i, int a, int b) const {
        return p2_[(static_cast<std::size_t>(i) * (g_.n + 1) + a) * (g_.n + 1) + b];
    }

    double rect1(int i0, int i1, int k0, int k1) const {
        return at1(i1 + 1, k1 + 1) - at1(i0, k1 + 1) - at1(i1 + 1, k0) + at1(i0, k0);
    }
    double rect2(int i0, int i1, int a0, int a1, int b0, int b1) const {
        auto corner = [&](int i) {
            return at2(i, a1 + 1, b1 + 1) - at2(i, a0, b1 + 1) - at2(i, a1 + 1, b0) +
                   at2(i, a0, b0);
        };
        return corner(i1 + 1) - corner(i0);
    }

    GridSpec g_;
    int knots_;
    std::vector<double> vals_;
    std::vector<double> p1_;
    std::vector<double> p2_;
};

struct TimeWindow {
    int lo, hi; // inclusive knot range, clipped to the domain
    int count() const { return hi - lo + 1; }
};

TimeWindow time_window(const TimeGrid& tg, double center, double half) {
    int lo = static_cast<int>(std::ceil((center - half - tg.a) / tg.dt() - 1e-12));
    int hi = static_cast<int>(std::floor((center + half - tg.a) / tg.dt() + 1e-12));
    return {std::max(lo, 0), std::min(hi, tg.steps)};
}

} // namespace

SpaceTimeField maximal_fn(const SpaceTimeField& h, double alpha) {
    const GridSpec& g = h.grid();
    const TimeGrid& tg = h.time;
    const int pts = g.points();
    BoxSums sums(h, /*absolute=*/true);

    int scales = 0;
    while ((1 << scales) <= g.n / 2) ++scales; // delta = cell .. L/2

    SpaceTimeField out(tg, g, 1);
    for (int i = 0; i < tg.knots(); ++i) {
        double t = tg.knot(i);
        for (int idx = 0; idx < pts; ++idx) {
            double best = sums.value(i, idx); // singleton box
            auto ax = g.axes(idx);
            for (int k = 0; k < scales; ++k) {
                double delta = g.cell() * (1 << k);
                TimeWindow tw = time_window(tg, t, std::pow(delta, alpha));
                int half = (1 << k) - 1; // offsets with |o| cell < delta
                long cells = g.dim == 1 ? (2 * half + 1)
                                        : static_cast<long>(2 * half + 1) * (2 * half + 1);
                if (half == 0 && tw.count() == 1) continue; // that is the singleton again
                double s = sums.box_sum(tw.lo, tw.hi, ax[0] - half, ax[0] + half, ax[1] - half,
                                        ax[1] + half);
                best = std::max(best, s / (static_cast<double>(tw.count()) * cells));
            }
            out.frames[i].values[idx] = best;
        }
    }
    return out;
}

SpaceTimeField sharp_fn(const SpaceTimeField& h, double alpha) {
    const GridSpec& g = h.grid();
    const TimeGrid& tg = h.time;
    const int pts = g.points();
    BoxSums means(h, /*absolute=*/false);

    int scales = 0;
    while ((1 << scales) <= g.n / 2) ++scales;

    SpaceTimeField out(tg, g, 1); // zero: singleton boxes have no oscillation

    // a tile of scale k spans side_x = 2 delta in x and 2 delta^alpha in t
    for (int k = 0; k < scales; ++k) {
        double delta = g.cell() * (1 << k);
        int side_x = std::min(2 * (1 << k), g.n);
        int side_t = std::max(1L, std::lround(2.0 * std::pow(delta, alpha) / tg.dt()));
        side_t = std::min<long>(side_t, tg.knots());
        for (int shift = 0; shift < 2; ++shift) {
            int off_x = shift * side_x / 2;
            int off_t = shift * side_t / 2;
            for (int t0 = -off_t; t0 < tg.knots(); t0 += side_t) {
                int i0 = std::max(t0, 0);
                int i1 = std::min(t0 + side_t - 1, tg.knots() - 1);
                if (i0 > i1) continue;
                int nx_tiles = (g.n + side_x - 1) / side_x;
                for (int xa = 0; xa < nx_tiles; ++xa) {
                    int a0 = xa * side_x + off_x;
                    int a1 = a0 + side_x - 1; // may wrap
                    if (g.dim == 1) {
                        long cnt = static_cast<long>(i1 - i0 + 1) * side_x;
                        double mean = means.box_sum(i0, i1, a0, a1) / cnt;
                        double dev = 0.0;
                        for (int i = i0; i <= i1; ++i)
                            for (int o = 0; o < side_x; ++o) {
                                int idx = (a0 + o) % g.n;
                                if (idx < 0) idx += g.n;
                                dev += std::abs(means.value(i, idx) - mean);
                            }
                        dev /= cnt;
                        for (int i = i0; i <= i1; ++i)
                            for (int o = 0; o < side_x; ++o) {
                                int idx = (a0 + o) % g.n;
                                if (idx < 0) idx += g.n;
                                auto& v = out.frames[i].values[idx];
                                v = std::max(v.real(), dev);
                            }
                    } else {
                        for (int xb = 0; xb < nx_tiles; ++xb) {
                            int b0 = xb * side_x + off_x;
                            int b1 = b0 + side_x - 1;
                            long cnt = static_cast<long>(i1 - i0 + 1) * side_x * side_x;
                            double mean = means.box_sum(i0, i1, a0, a1, b0, b1) / cnt;
                            double dev = 0.0;
                            for (int i = i0; i <= i1; ++i)
                                for (int oa = 0; oa < side_x; ++oa)
                                    for (int ob = 0; ob < side_x; ++ob) {
                                        int ia = (((a0 + oa) % g.n) + g.n) % g.n;
                                        int ib = (((b0 + ob) % g.n) + g.n) % g.n;
                                        dev += std::abs(means.value(i, ia * g.n + ib) - mean);
                                    }
                            dev /= cnt;
                            for (int i = i0; i <= i1; ++i)
                                for (int oa = 0; oa < side_x; ++oa)
                                    for (int ob = 0; ob < side_x; ++ob) {
                                        int ia = (((a0 + oa) % g.n) + g.n) % g.n;
                                        int ib = (((b0 + ob) % g.n) + g.n) % g.n;
                                        auto& v = out.frames[i].values[ia * g.n + ib];
                                        v = std::max(v.real(), dev);
                                    }
                        }
                    }
                }
            }
        }
    }
    return out;
}

FeffermanSteinSample fefferman_stein_sample(const SpaceTimeField& h, double alpha, double p) {
    SpaceTimeField sharp = sharp_fn(h, alpha);
    const double cellw = h.grid().cell_volume() * h.time.dt();
    double hn = 0.0, sn = 0.0;
    for (int i = 0; i < h.time.knots(); ++i)
        for (int idx = 0; idx < h.grid().points(); ++idx) {
            hn += std::pow(std::abs(h.frames[i].values[idx].real()), p) * cellw;
            sn += std::pow(sharp.frames[i].values[idx].real(), p) * cellw;
        }
    hn = std::pow(hn, 1.0 / p);
    sn = std::pow(sn, 1.0 / p);
    return {hn, sn, sn > 0.0 ? hn / sn : 0.0};
}

} // namespace levylab
