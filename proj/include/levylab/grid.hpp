#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace levylab {

using complex = std::complex<double>;

// Periodic grid on [-L/2, L/2)^d with points x_k = -L/2 + k L/n and the
// frequency lattice xi_m = 2 pi m / L, m in [-n/2, n/2).
struct GridSpec {
    int dim = 1;       // 1 or 2
    int n = 256;       // points per axis, power of two
    double length = 32.0;

    GridSpec() = default;
    GridSpec(int d, int n_, double len);

    int points() const { return dim == 1 ? n : n * n; }
    double cell() const { return length / n; }
    double cell_volume() const;

    // axis index k -> coordinate / signed mode / frequency
    double coord(int k) const { return -0.5 * length + k * (length / n); }
    int mode(int k) const { return k < n / 2 ? k : k - n; }
    double freq1(int k) const { return 2.0 * M_PI * mode(k) / length; }

    // flat index -> per-axis indices
    std::array<int, 2> axes(int idx) const {
        return dim == 1 ? std::array<int, 2>{idx, 0} : std::array<int, 2>{idx / n, idx % n};
    }
    // frequency vector of a flat lattice index
    std::array<double, 2> freq(int idx) const {
        auto a = axes(idx);
        return {freq1(a[0]), dim == 2 ? freq1(a[1]) : 0.0};
    }
    double freq_norm(int idx) const {
        auto f = freq(idx);
        return std::sqrt(f[0] * f[0] + f[1] * f[1]);
    }
    std::array<double, 2> point(int idx) const {
        auto a = axes(idx);
        return {coord(a[0]), dim == 2 ? coord(a[1]) : 0.0};
    }
    // flat index of the reflected lattice point/mode (negation mod n)
    int reflect(int idx) const;
    double max_freq() const;

    bool operator==(const GridSpec& o) const {
        return dim == o.dim && n == o.n && length == o.length;
    }
};

// Complex multi-channel samples on a grid.  Channel-major storage:
// values[c * points + idx].
struct Field {
    GridSpec grid;
    int channels = 1;
    std::vector<complex> values;

    Field() = default;
    explicit Field(const GridSpec& g, int ch = 1)
        : grid(g), channels(ch), values(static_cast<std::size_t>(g.points()) * ch) {}

    complex& at(int c, int idx) { return values[static_cast<std::size_t>(c) * grid.points() + idx]; }
    const complex& at(int c, int idx) const {
        return values[static_cast<std::size_t>(c) * grid.points() + idx];
    }
    complex* channel(int c) { return values.data() + static_cast<std::size_t>(c) * grid.points(); }
    const complex* channel(int c) const {
        return values.data() + static_cast<std::size_t>(c) * grid.points();
    }

    double max_abs() const;
    double max_imag() const;
    // channel-Euclidean |f(x)|_V at a lattice point
    double vnorm_at(int idx) const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(complex a);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(complex a, Field f);

// Uniform time grid on [a,b] with steps+1 knots.
struct TimeGrid {
    double a = 0.0;
    double b = 1.0;
    int steps = 64;

    TimeGrid() = default;
    TimeGrid(double a_, double b_, int steps_);

    int knots() const { return steps + 1; }
    double dt() const { return (b - a) / steps; }
    double knot(int i) const { return a + i * dt(); }
};

// One Field per time knot.
struct SpaceTimeField {
    TimeGrid time;
    std::vector<Field> frames;

    SpaceTimeField() = default;
    SpaceTimeField(const TimeGrid& t, const GridSpec& g, int channels);

    const GridSpec& grid() const { return frames.front().grid; }
    int channels() const { return frames.front().channels; }
};

// Lower-triangular (s_i <= t_j) array of Fields; frame (i,j) lives at
// tri_index(i,j) = j(j+1)/2 + i.
struct TwoTimeField {
    TimeGrid time;
    std::vector<Field> frames;

    TwoTimeField() = default;
    TwoTimeField(const TimeGrid& t, const GridSpec& g, int channels);

    static std::size_t tri_index(int i, int j) {
        return static_cast<std::size_t>(j) * (j + 1) / 2 + i;
    }
    Field& frame(int i, int j);
    const Field& frame(int i, int j) const;
    const GridSpec& grid() const { return frames.front().grid; }
    int channels() const { return frames.front().channels; }
};

// Forward transform with the convention
//   Fh(xi) = integral e^{-i (xi, x)} h(x) dx
// approximated by the Riemann sum with cell volume (L/n)^d; idft inverts
// it exactly on the lattice.
Field dft(const Field& f);
Field idft(const Field& f);

// Single-channel buffer versions used by the operator pipelines.
std::vector<complex> channel_spectrum(const Field& f, int c);
void spectrum_to_values(const GridSpec& g, std::vector<complex> spec, complex* out);

// F^{-1}(Ff . Fg); g must share the grid and be scalar-channel or
// channel-matched.
Field periodic_convolve(const Field& f, const Field& g);

// Asserts the imaginary part is below tol * max|f| and strips it.
Field realize(const Field& f, double tol = 1e-8);

// (L/n)^d sum |f|_V at lattice points, and the plain Riemann integral.
double riemann_l1(const Field& f);
complex riemann_integral(const Field& f, int channel = 0);
double riemann_lp(const Field& f, double p); // { (L/n)^d sum |f|_V^p }^{1/p}

// Binary layout: magic "LVLF", u32 dim, u32 n, f64 length, u32 channels,
// then channel-major row-major float64 (re, im) pairs.
void save_field_binary(const Field& f, const std::string& path);
Field load_field_binary(const std::string& path);
void save_field_csv(const Field& f, const std::string& path);

// Small constructors used across tests and experiments.
Field delta_field(const GridSpec& g);                 // discrete delta, mass 1
Field constant_field(const GridSpec& g, complex c, int channels = 1);
Field tone_field(const GridSpec& g, int mode0, int mode1 = 0); // e^{i (xi_m, x)}
Field gaussian_field(const GridSpec& g, double variance);      // e^{-|x|^2/(2 var)}

} // namespace levylab
