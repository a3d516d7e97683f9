#include "levylab/lp_norms.hpp"

#include "levylab/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace levylab {

double smooth_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double a = std::exp(-1.0 / u);
    double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

double bump_profile(double r) {
    auto t = [](double x) { return smooth_step(2.0 - x); }; // 1 for x<=1, 0 for x>=2
    return t(r) - t(2.0 * r);
}

int default_bank_order(const GridSpec& grid) {
    return static_cast<int>(std::ceil(std::log2(grid.max_freq())));
}

LPBank build_bank(const GridSpec& grid, int J) {
    if (J < 1) throw std::invalid_argument("build_bank: need J >= 1");
    if (std::exp2(J) < grid.max_freq())
        throw std::invalid_argument("build_bank: 2^J below max lattice frequency, bank cannot cover the lattice");

    LPBank bank;
    bank.grid = grid;
    bank.blocks = J + 1;
    const int pts = grid.points();

    // raw scalings phi(2^-k xi), k = 0..J+1
    std::vector<std::vector<double>> scal(J + 2, std::vector<double>(pts));
    for (int k = 0; k <= J + 1; ++k) {
        double inv = std::exp2(-static_cast<double>(k));
        for (int idx = 0; idx < pts; ++idx) scal[k][idx] = bump_profile(inv * grid.freq_norm(idx));
    }

    bank.mask.assign(bank.blocks, std::vector<double>(pts));
    for (int j = 1; j <= J; ++j) bank.mask[j] = scal[j];
    for (int idx = 0; idx < pts; ++idx) {
        double s = 0.0;
        for (int k = 1; k <= J; ++k) s += scal[k][idx];
        bank.mask[0][idx] = 1.0 - s;
    }

    bank.tilde.assign(bank.blocks, std::vector<double>(pts));
    for (int idx = 0; idx < pts; ++idx)
        bank.tilde[0][idx] = bank.mask[0][idx] + scal[1][idx];
    for (int j = 1; j <= J; ++j)
        for (int idx = 0; idx < pts; ++idx)
            bank.tilde[j][idx] = scal[j - 1][idx] + scal[j][idx] + (j + 1 <= J + 1 ? scal[j + 1][idx] : 0.0);
    return bank;
}

namespace {

void check_bank(const Field& f, const LPBank& bank) {
    if (!(f.grid == bank.grid)) throw std::invalid_argument("lp: bank/grid mismatch");
}

void inverse_into(const GridSpec& g, cvector spec, complex* out) {
    spectrum_to_values(g, std::move(spec), out);
}

} // namespace

Field lp_block(const Field& f, const LPBank& bank, int j) {
    check_bank(f, bank);
    if (j < 0 || j >= bank.blocks) throw std::invalid_argument("lp_block: block outside bank");
    Field out(f.grid, f.channels);
    const int pts = f.grid.points();
    for (int c = 0; c < f.channels; ++c) {
        cvector spec = channel_spectrum(f, c);
        for (int idx = 0; idx < pts; ++idx) spec[idx] *= bank.mask[j][idx];
        inverse_into(f.grid, std::move(spec), out.channel(c));
    }
    return out;
}

namespace {

// blocks of |phi_j * f|_V^2 accumulated pointwise: out[idx] += 2^{2 beta j} |...|^2
void accumulate_block_squares(const Field& f, const LPBank& bank, double beta,
                              std::vector<double>& sq) {
    const int pts = f.grid.points();
    sq.assign(pts, 0.0);
    std::vector<cvector> spectra(f.channels);
    for (int c = 0; c < f.channels; ++c) spectra[c] = channel_spectrum(f, c);
    cvector scratch(pts);
    std::vector<complex> block(pts);
    for (int j = 0; j < bank.blocks; ++j) {
        double w = std::pow(2.0, 2.0 * beta * j);
        for (int c = 0; c < f.channels; ++c) {
            scratch = spectra[c];
            bool nonzero = false;
            for (int idx = 0; idx < pts; ++idx) {
                scratch[idx] *= bank.mask[j][idx];
                nonzero = nonzero || scratch[idx] != complex(0.0);
            }
            if (!nonzero) continue;
            inverse_into(f.grid, scratch, block.data());
            for (int idx = 0; idx < pts; ++idx) sq[idx] += w * std::norm(block[idx]);
        }
    }
}

double spatial_besov(const Field& f, const LPBank& bank, double beta, double p) {
    const int pts = f.grid.points();
    cvector scratch(pts);
    std::vector<complex> block(pts);
    std::vector<double> vsq(pts);
    double total = 0.0;
    std::vector<cvector> spectra(f.channels);
    for (int c = 0; c < f.channels; ++c) spectra[c] = channel_spectrum(f, c);
    for (int j = 0; j < bank.blocks; ++j) {
        vsq.assign(pts, 0.0);
        bool nonzero = false;
        for (int c = 0; c < f.channels; ++c) {
            scratch = spectra[c];
            bool nz = false;
            for (int idx = 0; idx < pts; ++idx) {
                scratch[idx] *= bank.mask[j][idx];
                nz = nz || scratch[idx] != complex(0.0);
            }
            if (!nz) continue;
            nonzero = true;
            inverse_into(f.grid, scratch, block.data());
            for (int idx = 0; idx < pts; ++idx) vsq[idx] += std::norm(block[idx]);
        }
        if (!nonzero) continue;
        double ip = 0.0;
        for (int idx = 0; idx < pts; ++idx) ip += std::pow(vsq[idx], p / 2.0);
        total += std::pow(2.0, beta * p * j) * ip * f.grid.cell_volume();
    }
    return std::pow(total, 1.0 / p);
}

double spatial_htilde(const Field& f, const LPBank& bank, double beta, double p) {
    std::vector<double> sq;
    accumulate_block_squares(f, bank, beta, sq);
    double total = 0.0;
    for (double v : sq) total += std::pow(v, p / 2.0);
    return std::pow(total * f.grid.cell_volume(), 1.0 / p);
}

double spatial_sobolev(const Field& f, double beta, double p) {
    Field g = bessel_potential(f, beta);
    return riemann_lp(g, p);
}

double spatial_norm(const Field& f, const NormDescriptor& d, const LPBank& bank) {
    switch (d.family) {
        case NormFamily::besov: return spatial_besov(f, bank, d.beta, d.p);
        case NormFamily::sobolev: return spatial_sobolev(f, d.beta, d.p);
        case NormFamily::htilde: return spatial_htilde(f, bank, d.beta, d.p);
    }
    return 0.0;
}

} // namespace

std::vector<double> left_time_weights(const TimeGrid& t) {
    std::vector<double> w(t.knots(), t.dt());
    w.back() = 0.0;
    return w;
}

double norm(const Field& f, const NormDescriptor& d, const LPBank& bank) {
    if (d.time != TimeStructure::none)
        throw std::invalid_argument("norm: time structure does not match a plain field");
    if (d.p < 1.0) throw std::invalid_argument("norm: p must be >= 1");
    check_bank(f, bank);
    return spatial_norm(f, d, bank);
}

double norm(const SpaceTimeField& f, const NormDescriptor& d, const LPBank& bank) {
    if (d.time != TimeStructure::E)
        throw std::invalid_argument("norm: space-time field requires the E structure");
    if (d.p < 1.0) throw std::invalid_argument("norm: p must be >= 1");
    check_bank(f.frames.front(), bank);
    auto w = left_time_weights(f.time);
    double total = 0.0;
    for (int i = 0; i < f.time.knots(); ++i) {
        if (w[i] == 0.0) continue;
        total += w[i] * std::pow(spatial_norm(f.frames[i], d, bank), d.p);
    }
    return std::pow(total, 1.0 / d.p);
}

double norm(const TwoTimeField& f, const NormDescriptor& d, const LPBank& bank) {
    if (d.p < 1.0) throw std::invalid_argument("norm: p must be >= 1");
    check_bank(f.frames.front(), bank);
    const TimeGrid& tg = f.time;
    auto w = left_time_weights(tg);
    const double dt = tg.dt();

    if (d.time == TimeStructure::Etilde) {
        double total = 0.0;
        for (int j = 0; j < tg.knots(); ++j) {
            if (w[j] == 0.0) continue;
            double inner = 0.0;
            for (int i = 0; i < j; ++i)
                inner += dt * std::pow(spatial_norm(f.frame(i, j), d, bank), d.p);
            total += w[j] * inner;
        }
        return std::pow(total, 1.0 / d.p);
    }

    if (d.time == TimeStructure::barred) {
        if (d.family == NormFamily::htilde)
            throw std::invalid_argument("norm: barred structure requires besov or sobolev");
        const GridSpec& g = f.grid();
        const int pts = g.points();
        const int ch = f.channels();

        // inner L2 in s sits inside the spatial L^p integral
        if (d.family == NormFamily::sobolev) {
            double total = 0.0;
            std::vector<double> acc(pts);
            for (int j = 0; j < tg.knots(); ++j) {
                if (w[j] == 0.0) continue;
                acc.assign(pts, 0.0);
                for (int i = 0; i < j; ++i) {
                    Field b = bessel_potential(f.frame(i, j), d.beta);
                    for (int idx = 0; idx < pts; ++idx) {
                        double v2 = 0.0;
                        for (int c = 0; c < ch; ++c) v2 += std::norm(b.at(c, idx));
                        acc[idx] += dt * v2;
                    }
                }
                double ip = 0.0;
                for (int idx = 0; idx < pts; ++idx) ip += std::pow(acc[idx], d.p / 2.0);
                total += w[j] * ip * g.cell_volume();
            }
            return std::pow(total, 1.0 / d.p);
        }

        // besov: block sum outside everything
        double total = 0.0;
        std::vector<double> acc(pts);
        for (int blk = 0; blk < bank.blocks; ++blk) {
            double tj_sum = 0.0;
            for (int j = 0; j < tg.knots(); ++j) {
                if (w[j] == 0.0) continue;
                acc.assign(pts, 0.0);
                for (int i = 0; i < j; ++i) {
                    Field b = lp_block(f.frame(i, j), bank, blk);
                    for (int idx = 0; idx < pts; ++idx) {
                        double v2 = 0.0;
                        for (int c = 0; c < ch; ++c) v2 += std::norm(b.at(c, idx));
                        acc[idx] += dt * v2;
                    }
                }
                double ip = 0.0;
                for (int idx = 0; idx < pts; ++idx) ip += std::pow(acc[idx], d.p / 2.0);
                tj_sum += w[j] * ip * g.cell_volume();
            }
            total += std::pow(2.0, d.beta * d.p * blk) * tj_sum;
        }
        return std::pow(total, 1.0 / d.p);
    }

    throw std::invalid_argument("norm: two-time field requires the Etilde or barred structure");
}

namespace {

// c = 1 application of int [f(x+y) - f(x)] |y|^{-d-beta} dy to one
// channel: log-graded shells evaluated by spectral shifts, far tail of
// the non-decaying periodic integrand folded in through the field mean.
std::vector<complex> hypersingular_raw(const GridSpec& g, const complex* values, double beta,
                                       const HypersingularRule& rule) {
    const int pts = g.points();
    const double rho_max = rule.span_factor * g.length;
    const double du = std::log(10.0) / rule.per_decade;
    const int shells = static_cast<int>(std::ceil(std::log(rho_max / rule.rho_min) / du)) + 1;

    std::vector<std::array<double, 2>> dirs;
    std::vector<double> ang_w;
    double ang_total;
    if (g.dim == 1) {
        dirs = {{1.0, 0.0}, {-1.0, 0.0}};
        ang_w = {1.0, 1.0};
        ang_total = 2.0;
    } else {
        for (int q = 0; q < rule.angles; ++q) {
            double th = 2.0 * M_PI * q / rule.angles;
            dirs.push_back({std::cos(th), std::sin(th)});
            ang_w.push_back(2.0 * M_PI / rule.angles);
        }
        ang_total = 2.0 * M_PI;
    }

    cvector spec(pts);
    fft_forward(g.dim, g.n, values, spec.data());
    for (int idx = 0; idx < pts; ++idx) {
        auto a = g.axes(idx);
        spec[idx] *= ((a[0] + a[1]) & 1) ? -g.cell_volume() : g.cell_volume();
    }
    complex mean = spec[0] / std::pow(g.length, g.dim);

    std::vector<complex> acc(pts, 0.0);
    cvector shifted(pts);
    std::vector<complex> shift_spec(pts);
    for (int k = 0; k < shells; ++k) {
        double rho = rule.rho_min * std::exp(k * du);
        if (rho > rho_max) break;
        double wk = du * std::pow(rho, -beta); // trapezoid in log rho
        if (k == 0 || k == shells - 1) wk *= 0.5;
        for (int idx = 0; idx < pts; ++idx) shift_spec[idx] = 0.0;
        for (std::size_t q = 0; q < dirs.size(); ++q) {
            for (int idx = 0; idx < pts; ++idx) {
                auto xi = g.freq(idx);
                double phase = rho * (xi[0] * dirs[q][0] + xi[1] * dirs[q][1]);
                shift_spec[idx] += ang_w[q] * std::polar(1.0, phase) * spec[idx];
            }
        }
        inverse_into(g, shift_spec, shifted.data());
        for (int idx = 0; idx < pts; ++idx)
            acc[idx] += wk * (shifted[idx] - ang_total * values[idx]);
    }
    double tail = std::pow(rho_max, -beta) / beta;
    for (int idx = 0; idx < pts; ++idx)
        acc[idx] += tail * ang_total * (mean - values[idx]);
    return acc;
}

} // namespace

Field frac_deriv(const Field& f, double beta, FracDerivMethod method,
                 const HypersingularRule& rule) {
    const GridSpec& g = f.grid;
    const int pts = g.points();

    if (method == FracDerivMethod::fourier) {
        Field out(g, f.channels);
        for (int c = 0; c < f.channels; ++c) {
            cvector spec = channel_spectrum(f, c);
            for (int idx = 0; idx < pts; ++idx) {
                double r = g.freq_norm(idx);
                double m;
                if (r == 0.0) {
                    if (beta > 0.0) m = 0.0;
                    else if (beta == 0.0) m = 1.0;
                    else {
                        if (std::abs(spec[idx]) > 1e-9 * (1.0 + f.max_abs()))
                            throw std::invalid_argument(
                                "frac_deriv: negative order needs a vanishing mean");
                        m = 0.0;
                    }
                } else {
                    m = std::pow(r, beta);
                }
                spec[idx] *= -m;
            }
            inverse_into(g, std::move(spec), out.channel(c));
        }
        return out;
    }

    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("frac_deriv: hypersingular route needs beta in (0,1)");

    double c_beta = hypersingular_calibrate(beta, g, rule);
    Field out(g, f.channels);
    for (int c = 0; c < f.channels; ++c) {
        auto raw = hypersingular_raw(g, f.channel(c), beta, rule);
        complex* oc = out.channel(c);
        for (int idx = 0; idx < pts; ++idx) oc[idx] = c_beta * raw[idx];
    }
    return out;
}

double hypersingular_calibrate(double beta, const GridSpec& g, const HypersingularRule& rule) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("hypersingular_calibrate: beta must be in (0,1)");
    Field ref = gaussian_field(g, 1.0);
    Field target = frac_deriv(ref, beta, FracDerivMethod::fourier);
    auto raw = hypersingular_raw(g, ref.channel(0), beta, rule);
    double num = 0.0, den = 0.0;
    for (int idx = 0; idx < g.points(); ++idx) {
        num += (target.values[idx] * std::conj(raw[idx])).real();
        den += std::norm(raw[idx]);
    }
    if (den == 0.0) throw std::runtime_error("hypersingular_calibrate: degenerate reference");
    return num / den;
}

Field bessel_potential(const Field& f, double beta) {
    Field out(f.grid, f.channels);
    const int pts = f.grid.points();
    for (int c = 0; c < f.channels; ++c) {
        cvector spec = channel_spectrum(f, c);
        for (int idx = 0; idx < pts; ++idx) {
            double r2 = 1.0 + std::pow(f.grid.freq_norm(idx), 2.0);
            spec[idx] *= std::pow(r2, beta / 2.0);
        }
        inverse_into(f.grid, std::move(spec), out.channel(c));
    }
    return out;
}

} // namespace levylab
