#include "levylab/grid.hpp"

#include "levylab/fft.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace levylab {

GridSpec::GridSpec(int d, int n_, double len) : dim(d), n(n_), length(len) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("GridSpec: dim must be 1 or 2");
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("GridSpec: n must be a power of two");
    if (length <= 0.0) throw std::invalid_argument("GridSpec: length must be positive");
}

double GridSpec::cell_volume() const {
    double c = cell();
    return dim == 1 ? c : c * c;
}

int GridSpec::reflect(int idx) const {
    auto a = axes(idx);
    int r0 = (n - a[0]) % n;
    if (dim == 1) return r0;
    int r1 = (n - a[1]) % n;
    return r0 * n + r1;
}

double GridSpec::max_freq() const {
    double nyq = M_PI * n / length; // |mode| = n/2
    return dim == 1 ? nyq : nyq * std::sqrt(2.0);
}

double Field::max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
}

double Field::max_imag() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
    return m;
}

double Field::vnorm_at(int idx) const {
    double s = 0.0;
    for (int c = 0; c < channels; ++c) s += std::norm(at(c, idx));
    return std::sqrt(s);
}

static void require_same_shape(const Field& a, const Field& b) {
    if (!(a.grid == b.grid) || a.channels != b.channels)
        throw std::invalid_argument("field shape mismatch");
}

Field& Field::operator+=(const Field& o) {
    require_same_shape(*this, o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    require_same_shape(*this, o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
}

Field& Field::operator*=(complex a) {
    for (auto& v : values) v *= a;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(complex a, Field f) { return f *= a; }

TimeGrid::TimeGrid(double a_, double b_, int steps_) : a(a_), b(b_), steps(steps_) {
    if (!(b > a)) throw std::invalid_argument("TimeGrid: need b > a");
    if (steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
}

SpaceTimeField::SpaceTimeField(const TimeGrid& t, const GridSpec& g, int channels) : time(t) {
    frames.assign(t.knots(), Field(g, channels));
}

TwoTimeField::TwoTimeField(const TimeGrid& t, const GridSpec& g, int channels) : time(t) {
    int last = t.knots() - 1;
    frames.assign(tri_index(last, last) + 1, Field(g, channels));
}

Field& TwoTimeField::frame(int i, int j) {
    if (i > j) throw std::invalid_argument("TwoTimeField: need s index <= t index");
    return frames[tri_index(i, j)];
}

const Field& TwoTimeField::frame(int i, int j) const {
    if (i > j) throw std::invalid_argument("TwoTimeField: need s index <= t index");
    return frames[tri_index(i, j)];
}

// Forward: Fh(xi_m) = (L/n)^d * (-1)^(sum of axis indices) * FFT(h)[m mod n].
// The parity factor carries the -L/2 grid offset (e^{i pi m} with n even).
Field dft(const Field& f) {
    Field out(f.grid, f.channels);
    const int n = f.grid.n;
    const int dim = f.grid.dim;
    const int pts = f.grid.points();
    const double scale = f.grid.cell_volume();
    for (int c = 0; c < f.channels; ++c) {
        fft_forward(dim, n, f.channel(c), out.channel(c));
        complex* o = out.channel(c);
        for (int idx = 0; idx < pts; ++idx) {
            auto a = f.grid.axes(idx);
            double sign = ((a[0] + a[1]) & 1) ? -scale : scale;
            o[idx] *= sign;
        }
    }
    return out;
}

Field idft(const Field& f) {
    Field tmp(f.grid, f.channels);
    const int n = f.grid.n;
    const int dim = f.grid.dim;
    const int pts = f.grid.points();
    const double scale = 1.0 / std::pow(f.grid.length, dim);
    for (int c = 0; c < f.channels; ++c) {
        const complex* in = f.channel(c);
        complex* t = tmp.channel(c);
        for (int idx = 0; idx < pts; ++idx) {
            auto a = f.grid.axes(idx);
            t[idx] = ((a[0] + a[1]) & 1) ? -in[idx] : in[idx];
        }
        fft_inverse(dim, n, t, t);
        for (int idx = 0; idx < pts; ++idx) t[idx] *= scale;
    }
    return tmp;
}

std::vector<complex> channel_spectrum(const Field& f, int c) {
    std::vector<complex> spec(f.grid.points());
    fft_forward(f.grid.dim, f.grid.n, f.channel(c), spec.data());
    const double scale = f.grid.cell_volume();
    for (int idx = 0; idx < f.grid.points(); ++idx) {
        auto a = f.grid.axes(idx);
        spec[idx] *= ((a[0] + a[1]) & 1) ? -scale : scale;
    }
    return spec;
}

void spectrum_to_values(const GridSpec& g, std::vector<complex> spec, complex* out) {
    const double scale = 1.0 / std::pow(g.length, g.dim);
    for (int idx = 0; idx < g.points(); ++idx) {
        auto a = g.axes(idx);
        if ((a[0] + a[1]) & 1) spec[idx] = -spec[idx];
    }
    fft_inverse(g.dim, g.n, spec.data(), spec.data());
    for (int idx = 0; idx < g.points(); ++idx) out[idx] = spec[idx] * scale;
}

Field periodic_convolve(const Field& f, const Field& g) {
    if (!(f.grid == g.grid)) throw std::invalid_argument("periodic_convolve: grid mismatch");
    if (g.channels != 1 && g.channels != f.channels)
        throw std::invalid_argument("periodic_convolve: channel mismatch");
    Field fs = dft(f);
    Field gs = dft(g);
    const int pts = f.grid.points();
    for (int c = 0; c < f.channels; ++c) {
        complex* fc = fs.channel(c);
        const complex* gc = gs.channel(g.channels == 1 ? 0 : c);
        for (int idx = 0; idx < pts; ++idx) fc[idx] *= gc[idx];
    }
    return idft(fs);
}

Field realize(const Field& f, double tol) {
    double bound = tol * std::max(f.max_abs(), 1e-300);
    double mi = f.max_imag();
    if (mi > bound) throw std::runtime_error("realize: imaginary part " + std::to_string(mi) +
                                             " exceeds tolerance " + std::to_string(bound));
    Field out = f;
    for (auto& v : out.values) v = complex(v.real(), 0.0);
    return out;
}

double riemann_l1(const Field& f) {
    double s = 0.0;
    const int pts = f.grid.points();
    for (int idx = 0; idx < pts; ++idx) s += f.vnorm_at(idx);
    return s * f.grid.cell_volume();
}

complex riemann_integral(const Field& f, int channel) {
    complex s = 0.0;
    const complex* v = f.channel(channel);
    const int pts = f.grid.points();
    for (int idx = 0; idx < pts; ++idx) s += v[idx];
    return s * f.grid.cell_volume();
}

double riemann_lp(const Field& f, double p) {
    double s = 0.0;
    const int pts = f.grid.points();
    for (int idx = 0; idx < pts; ++idx) s += std::pow(f.vnorm_at(idx), p);
    return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

void save_field_binary(const Field& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os.write("LVLF", 4);
    std::uint32_t dim = f.grid.dim, n = f.grid.n, ch = f.channels;
    double len = f.grid.length;
    os.write(reinterpret_cast<const char*>(&dim), 4);
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(&len), 8);
    os.write(reinterpret_cast<const char*>(&ch), 4);
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(complex)));
}

Field load_field_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, "LVLF", 4) != 0) throw std::runtime_error("bad field file: " + path);
    std::uint32_t dim, n, ch;
    double len;
    is.read(reinterpret_cast<char*>(&dim), 4);
    is.read(reinterpret_cast<char*>(&n), 4);
    is.read(reinterpret_cast<char*>(&len), 8);
    is.read(reinterpret_cast<char*>(&ch), 4);
    Field f(GridSpec(static_cast<int>(dim), static_cast<int>(n), len), static_cast<int>(ch));
    is.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(complex)));
    if (!is) throw std::runtime_error("truncated field file: " + path);
    return f;
}

void save_field_csv(const Field& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "# d=" << f.grid.dim << " n=" << f.grid.n << " L=" << f.grid.length
       << " channels=" << f.channels << "\n";
    os << (f.grid.dim == 1 ? "x" : "x0,x1");
    for (int c = 0; c < f.channels; ++c) os << ",re" << c << ",im" << c;
    os << "\n";
    char buf[64];
    const int pts = f.grid.points();
    for (int idx = 0; idx < pts; ++idx) {
        auto p = f.grid.point(idx);
        std::snprintf(buf, sizeof(buf), "%.17g", p[0]);
        os << buf;
        if (f.grid.dim == 2) {
            std::snprintf(buf, sizeof(buf), ",%.17g", p[1]);
            os << buf;
        }
        for (int c = 0; c < f.channels; ++c) {
            std::snprintf(buf, sizeof(buf), ",%.17g,%.17g", f.at(c, idx).real(), f.at(c, idx).imag());
            os << buf;
        }
        os << "\n";
    }
}

Field delta_field(const GridSpec& g) {
    Field f(g);
    // mass-1 point mass at x = 0 (axis index n/2)
    int idx0 = g.dim == 1 ? g.n / 2 : (g.n / 2) * g.n + g.n / 2;
    f.values[idx0] = 1.0 / g.cell_volume();
    return f;
}

Field constant_field(const GridSpec& g, complex c, int channels) {
    Field f(g, channels);
    for (auto& v : f.values) v = c;
    return f;
}

Field tone_field(const GridSpec& g, int mode0, int mode1) {
    Field f(g);
    const int pts = g.points();
    double xi0 = 2.0 * M_PI * mode0 / g.length;
    double xi1 = 2.0 * M_PI * mode1 / g.length;
    for (int idx = 0; idx < pts; ++idx) {
        auto p = g.point(idx);
        double phase = xi0 * p[0] + xi1 * p[1];
        f.values[idx] = complex(std::cos(phase), std::sin(phase));
    }
    return f;
}

Field gaussian_field(const GridSpec& g, double variance) {
    Field f(g);
    const int pts = g.points();
    for (int idx = 0; idx < pts; ++idx) {
        auto p = g.point(idx);
        double r2 = p[0] * p[0] + p[1] * p[1];
        f.values[idx] = std::exp(-r2 / (2.0 * variance));
    }
    return f;
}

} // namespace levylab
