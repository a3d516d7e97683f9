#include "levylab/singular_ops.hpp"

#include "levylab/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace levylab {

void MarkedField::validate() const {
    if (weights.empty() || per_mark.size() != weights.size())
        throw std::invalid_argument("marked field: marks and weights must match");
    for (double w : weights)
        if (!(w > 0.0)) throw std::invalid_argument("marked field: weights must be positive");
    for (const auto& f : per_mark) {
        if (f.time.knots() != time.knots() || f.time.a != time.a || f.time.b != time.b)
            throw std::invalid_argument("marked field: time grids must match");
        if (!(f.grid() == per_mark.front().grid()))
            throw std::invalid_argument("marked field: grids must match");
    }
}

IgSpectra::IgSpectra(const SpaceTimeField& g, const SymbolParams& p)
    : time_(g.time), grid_(g.grid()), channels_(g.channels()) {
    if (grid_.dim != p.dim) throw std::invalid_argument("apply_I: dim mismatch");
    auto intervals = knot_interval_exponents(p, time_, grid_);
    prefix_.assign(time_.knots(), cvector(grid_.points(), 0.0));
    for (int k = 0; k < time_.steps; ++k)
        for (int idx = 0; idx < grid_.points(); ++idx)
            prefix_[k + 1][idx] = prefix_[k][idx] + intervals[k][idx];
    gspec_.resize(time_.knots());
    for (int i = 0; i < time_.knots(); ++i) {
        gspec_[i].resize(channels_);
        for (int c = 0; c < channels_; ++c) gspec_[i][c] = channel_spectrum(g.frames[i], c);
    }
}

void IgSpectra::frame_spectrum(int i, int j, int c, cvector& out) const {
    const cvector& gs = gspec_[i][c];
    out.resize(gs.size());
    if (i == j) {
        out = gs;
        return;
    }
    for (std::size_t idx = 0; idx < gs.size(); ++idx)
        out[idx] = std::exp(prefix_[j][idx] - prefix_[i][idx]) * gs[idx];
}

TwoTimeField apply_I(const SpaceTimeField& g, const SymbolParams& p,
                     AssumptionBReport* b_report) {
    if (b_report) *b_report = check_assumption_B(p);
    IgSpectra spectra(g, p);
    TwoTimeField out(g.time, g.grid(), g.channels());
    cvector scratch;
    for (int j = 0; j < g.time.knots(); ++j)
        for (int i = 0; i <= j; ++i) {
            Field& frame = out.frame(i, j);
            for (int c = 0; c < g.channels(); ++c) {
                spectra.frame_spectrum(i, j, c, scratch);
                spectrum_to_values(g.grid(), scratch, frame.channel(c));
            }
        }
    return out;
}

std::vector<double> trapezoid_weights(double dt, int knots) {
    if (knots == 1) return {0.0};
    std::vector<double> w(knots, dt);
    w.front() = 0.5 * dt;
    w.back() = 0.5 * dt;
    return w;
}

Field apply_R(const SpaceTimeField& f, const SymbolParams& p, double t) {
    const TimeGrid& tg = f.time;
    double pos = (t - tg.a) / tg.dt();
    int jt = static_cast<int>(std::lround(pos));
    if (jt < 0 || jt >= tg.knots() || std::abs(pos - jt) > 1e-9)
        throw std::invalid_argument("apply_R: t must lie on the time grid");

    Field out(f.grid(), f.channels());
    if (jt == 0) return out;

    IgSpectra spectra(f, p);
    auto w = trapezoid_weights(tg.dt(), jt + 1);
    const int pts = f.grid().points();
    std::vector<cvector> acc(f.channels(), cvector(pts, 0.0));
    cvector scratch;
    for (int i = 0; i <= jt; ++i)
        for (int c = 0; c < f.channels(); ++c) {
            spectra.frame_spectrum(i, jt, c, scratch);
            for (int idx = 0; idx < pts; ++idx) acc[c][idx] += w[i] * scratch[idx];
        }
    for (int c = 0; c < f.channels(); ++c)
        spectrum_to_values(f.grid(), std::move(acc[c]), out.channel(c));
    return out;
}

Field apply_T(const Field& u0, const SymbolParams& p, double t) {
    if (t < 0.0) throw std::invalid_argument("apply_T: need t >= 0");
    auto exponent = integrate_symbol_lattice(p, 0.0, t, u0.grid);
    Field out(u0.grid, u0.channels);
    const int pts = u0.grid.points();
    cvector scratch(pts);
    for (int c = 0; c < u0.channels; ++c) {
        cvector spec = channel_spectrum(u0, c);
        for (int idx = 0; idx < pts; ++idx) scratch[idx] = std::exp(exponent[idx]) * spec[idx];
        spectrum_to_values(u0.grid, scratch, out.channel(c));
    }
    return out;
}

FunctionalPair functionals_I1_I2(const MarkedField& g, const SymbolParams& p, double p_exp) {
    if (p_exp < 2.0) throw std::invalid_argument("functionals: p must be >= 2");
    g.validate();
    const GridSpec& grid = g.per_mark.front().grid();
    const TimeGrid& tg = g.time;
    const int pts = grid.points();
    const int marks = static_cast<int>(g.weights.size());

    // fractional-derivative multiplier -|xi|^alpha
    std::vector<double> da(pts);
    for (int idx = 0; idx < pts; ++idx) da[idx] = -std::pow(grid.freq_norm(idx), p.alpha);

    std::vector<IgSpectra> spectra;
    spectra.reserve(marks);
    for (int v = 0; v < marks; ++v) spectra.emplace_back(g.per_mark[v], p);

    auto w_outer = trapezoid_weights(tg.dt(), tg.knots());
    FunctionalPair out;
    cvector scratch(pts);
    std::vector<complex> frame(pts);
    std::vector<double> inner_sq(pts);

    for (int j = 0; j < tg.knots(); ++j) {
        auto w_inner = trapezoid_weights(tg.dt(), j + 1);
        inner_sq.assign(pts, 0.0);
        double i2_slice = 0.0;
        for (int i = 0; i <= j; ++i) {
            for (int v = 0; v < marks; ++v) {
                spectra[v].frame_spectrum(i, j, 0, scratch);
                for (int idx = 0; idx < pts; ++idx) scratch[idx] *= da[idx];
                spectrum_to_values(grid, scratch, frame.data());
                double lam = g.weights[v];
                double lp = 0.0;
                for (int idx = 0; idx < pts; ++idx) {
                    double a2 = std::norm(frame[idx]);
                    inner_sq[idx] += w_inner[i] * lam * a2;
                    lp += std::pow(a2, p_exp / 2.0);
                }
                i2_slice += w_inner[i] * lam * lp * grid.cell_volume();
            }
        }
        double i1_slice = 0.0;
        for (int idx = 0; idx < pts; ++idx) i1_slice += std::pow(inner_sq[idx], p_exp / 2.0);
        out.i1 += w_outer[j] * i1_slice * grid.cell_volume();
        out.i2 += w_outer[j] * i2_slice;
    }
    return out;
}

double functional_I1(const MarkedField& g, const SymbolParams& p, double p_exp) {
    return functionals_I1_I2(g, p, p_exp).i1;
}

double functional_I2(const MarkedField& g, const SymbolParams& p, double p_exp) {
    return functionals_I1_I2(g, p, p_exp).i2;
}

} // namespace levylab
