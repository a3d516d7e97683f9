#include "levylab/symbol.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace levylab {

SphereQuadrature SphereQuadrature::make(int dim, int n_nodes) {
    SphereQuadrature q;
    q.dim = dim;
    if (dim == 1) {
        q.nodes = {{1.0, 0.0}, {-1.0, 0.0}};
        q.weights = {1.0, 1.0}; // counting measure on {-1,1}
    } else if (dim == 2) {
        if (n_nodes < 4) throw std::invalid_argument("sphere quadrature: too few nodes");
        q.nodes.resize(n_nodes);
        q.weights.assign(n_nodes, 2.0 * M_PI / n_nodes);
        for (int k = 0; k < n_nodes; ++k) {
            double th = 2.0 * M_PI * k / n_nodes;
            q.nodes[k] = {std::cos(th), std::sin(th)};
        }
    } else {
        throw std::invalid_argument("sphere quadrature: dim must be 1 or 2");
    }
    return q;
}

namespace {

double dot2(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return a[0] * b[0] + a[1] * b[1];
}

// |u|^a [1 - i (tan(a pi/2) sgn u 1_{a!=1} - (2/pi) sgn u ln|u| 1_{a=1})]
complex jump_integrand(double u, double alpha, double tan_factor) {
    double au = std::abs(u);
    if (au == 0.0) return 0.0;
    double pa = std::pow(au, alpha);
    if (alpha == 1.0) {
        // u ln|u| -> 0 continuously at u = 0
        return complex(au, au * ((2.0 / M_PI) * (u > 0 ? 1.0 : -1.0) * std::log(au)));
    }
    double sgn = u > 0 ? 1.0 : -1.0;
    return complex(pa, -pa * tan_factor * sgn);
}

} // namespace

void SymbolParams::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("symbol: dim must be 1 or 2");
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("symbol: alpha must be in (0,2]");
    if (!(mu > 0.0)) throw std::invalid_argument("symbol: mu must be positive");
    if (quad.dim != dim) throw std::invalid_argument("symbol: quadrature dim mismatch");
    const int nq = static_cast<int>(quad.nodes.size());

    for (const auto& b : drift.values) {
        if (static_cast<int>(b.size()) != dim) throw std::invalid_argument("symbol: drift size");
        double nb = 0.0;
        for (double v : b) nb += v * v;
        if (std::sqrt(nb) > K) throw std::invalid_argument("symbol: |b| exceeds K");
    }
    for (const auto& B : diffusion.values) {
        if (static_cast<int>(B.size()) != dim * dim)
            throw std::invalid_argument("symbol: diffusion size");
        double nB = 0.0;
        for (double v : B) nB += v * v;
        if (std::sqrt(nB) > K) throw std::invalid_argument("symbol: |B| exceeds K");
        if (dim == 1) {
            if (B[0] < 0.0) throw std::invalid_argument("symbol: B not nonnegative");
        } else {
            if (std::abs(B[1] - B[2]) > 1e-12) throw std::invalid_argument("symbol: B not symmetric");
            double tr = B[0] + B[3], det = B[0] * B[3] - B[1] * B[2];
            if (tr < -1e-12 || det < -1e-12)
                throw std::invalid_argument("symbol: B not nonnegative-definite");
        }
    }
    const int d0 = dim / 2 + 1;
    for (const auto& m : jump_density.values) {
        if (static_cast<int>(m.size()) != nq) throw std::invalid_argument("symbol: m size");
        for (double v : m) {
            if (v < 0.0) throw std::invalid_argument("symbol: m must be nonnegative");
            if (v > K) throw std::invalid_argument("symbol: m exceeds K");
        }
        if (dim == 2) {
            // finite-difference angular derivatives of the 0-homogeneous
            // extension, checked at the quadrature nodes up to order d0
            std::vector<double> der(m.begin(), m.end());
            double h = 2.0 * M_PI / nq;
            for (int order = 1; order <= d0; ++order) {
                std::vector<double> next(nq);
                for (int k = 0; k < nq; ++k)
                    next[k] = (der[(k + 1) % nq] - der[(k + nq - 1) % nq]) / (2.0 * h);
                der = next;
                for (double v : der)
                    if (std::abs(v) > K)
                        throw std::invalid_argument("symbol: derivative of m exceeds K");
            }
        }
        if (alpha == 1.0) {
            double s0 = 0.0, s1 = 0.0;
            for (int k = 0; k < nq; ++k) {
                s0 += quad.weights[k] * quad.nodes[k][0] * m[k];
                s1 += quad.weights[k] * quad.nodes[k][1] * m[k];
            }
            if (std::abs(s0) > 1e-10 || std::abs(s1) > 1e-10)
                throw std::invalid_argument("symbol: alpha=1 requires vanishing sphere average of w m");
        }
    }
}

SymbolParams SymbolParams::isotropic(int dim, double alpha, double m_value, int n_nodes) {
    SymbolParams p;
    p.dim = dim;
    p.alpha = alpha;
    p.quad = SphereQuadrature::make(dim, n_nodes);
    p.drift = CoefficientTable<std::vector<double>>::frozen(std::vector<double>(dim, 0.0));
    p.diffusion = CoefficientTable<std::vector<double>>::frozen(std::vector<double>(dim * dim, 0.0));
    p.jump_density = CoefficientTable<std::vector<double>>::frozen(
        std::vector<double>(p.quad.nodes.size(), m_value));
    p.C_norm = normalize_constant(p);
    return p;
}

SymbolValue eval_symbol(const SymbolParams& p, double t, const std::array<double, 2>& xi) {
    SymbolValue out{};
    double nxi2 = xi[0] * xi[0] + xi[1] * xi[1];
    if (nxi2 == 0.0) return out; // psi(t,0) = 0 exactly

    if (p.alpha == 1.0) {
        const auto& b = p.drift.at(t);
        double bx = b[0] * xi[0] + (p.dim == 2 ? b[1] * xi[1] : 0.0);
        out.drift_part = complex(0.0, bx);
    }
    if (p.alpha == 2.0) {
        const auto& B = p.diffusion.at(t);
        double q = p.dim == 1 ? B[0] * xi[0] * xi[0]
                              : B[0] * xi[0] * xi[0] + (B[1] + B[2]) * xi[0] * xi[1] +
                                    B[3] * xi[1] * xi[1];
        out.diffusion_part = -q;
    }

    // tan(a pi/2): exactly zero at alpha = 2
    double tan_factor = p.alpha == 2.0 ? 0.0 : std::tan(p.alpha * M_PI / 2.0);
    const auto& m = p.jump_density.at(t);
    complex jsum = 0.0;
    for (std::size_t k = 0; k < p.quad.nodes.size(); ++k) {
        double u = dot2(p.quad.nodes[k], xi);
        jsum += p.quad.weights[k] * m[k] * jump_integrand(u, p.alpha, tan_factor);
    }
    out.jump_part = -p.C_norm * jsum;
    out.value = out.drift_part + out.diffusion_part + out.jump_part;
    return out;
}

SymbolValue reduced_symbol(const SymbolParams& p, double t, const std::array<double, 2>& xi) {
    double nxi = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1]);
    if (nxi == 0.0) throw std::invalid_argument("reduced_symbol: xi = 0");
    return eval_symbol(p, t, {xi[0] / nxi, xi[1] / nxi});
}

double normalize_constant(const SymbolParams& p) {
    if (!(p.alpha > 0.0 && p.alpha <= 2.0))
        throw std::invalid_argument("normalize_constant: alpha out of range");
    if (p.quad.nodes.empty()) throw std::invalid_argument("normalize_constant: degenerate quadrature");
    double s = 0.0;
    if (p.dim == 1) {
        for (std::size_t k = 0; k < p.quad.nodes.size(); ++k)
            s += p.quad.weights[k] * std::pow(std::abs(p.quad.nodes[k][0]), p.alpha);
    } else {
        // |cos|^alpha has derivative kinks, so the stored evaluation rule
        // is not accurate enough for a calibration constant; use a dense
        // one-time trapezoid instead.
        const int n = std::max<std::size_t>(32768, p.quad.nodes.size());
        for (int k = 0; k < n; ++k)
            s += std::pow(std::abs(std::cos(2.0 * M_PI * k / n)), p.alpha) * (2.0 * M_PI / n);
    }
    if (s <= 0.0) throw std::invalid_argument("normalize_constant: degenerate quadrature");
    return 1.0 / s;
}

AssumptionBReport check_assumption_B(const SymbolParams& p) {
    AssumptionBReport rep;
    rep.mu = p.mu;
    rep.sup_re_reduced = -1e300;

    std::vector<double> times;
    for (const auto* table :
         {&p.drift, &p.diffusion, &p.jump_density}) {
        for (int k = 0; k < table->pieces(); ++k)
            times.push_back(0.5 * (table->knots[k] + table->knots[k + 1]));
    }

    std::vector<std::array<double, 2>> dirs;
    if (p.dim == 1) {
        dirs = {{1.0, 0.0}, {-1.0, 0.0}};
    } else {
        const int n_ang = 1024;
        for (int k = 0; k < n_ang; ++k) {
            double th = 2.0 * M_PI * (k + 0.37) / n_ang; // offset off the quad nodes
            dirs.push_back({std::cos(th), std::sin(th)});
        }
    }
    for (double t : times)
        for (const auto& w : dirs)
            rep.sup_re_reduced = std::max(rep.sup_re_reduced, eval_symbol(p, t, w).value.real());
    rep.pass = rep.sup_re_reduced <= -p.mu;
    return rep;
}

std::vector<complex> symbol_on_lattice(const SymbolParams& p, double t, const GridSpec& g) {
    if (g.dim != p.dim) throw std::invalid_argument("symbol_on_lattice: dim mismatch");
    std::vector<complex> out(g.points());
    for (int idx = 0; idx < g.points(); ++idx)
        out[idx] = eval_symbol(p, t, g.freq(idx)).value;
    return out;
}

SymbolParams load_symbol_params(const std::string& json_text) {
    using nlohmann::json;
    json j = json::parse(json_text);
    static const char* known[] = {"dim",   "alpha",        "mu",    "K",
                                  "C_norm", "quadrature_nodes", "drift", "diffusion",
                                  "jump_density", "knots"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw std::invalid_argument("symbol config: unknown key '" + it.key() + "'");
    }

    SymbolParams p;
    p.dim = j.value("dim", 1);
    p.alpha = j.at("alpha").get<double>();
    p.mu = j.value("mu", 0.5);
    p.K = j.value("K", 10.0);
    p.quad = SphereQuadrature::make(p.dim, j.value("quadrature_nodes", 512));
    const int nq = static_cast<int>(p.quad.nodes.size());

    std::vector<double> knots = {0.0, 1.0};
    if (j.contains("knots")) knots = j.at("knots").get<std::vector<double>>();
    int pieces = static_cast<int>(knots.size()) - 1;
    if (pieces < 1) throw std::invalid_argument("symbol config: need at least one knot interval");

    auto read_table = [&](const char* key, int entry_size,
                          double fallback) -> CoefficientTable<std::vector<double>> {
        CoefficientTable<std::vector<double>> tab;
        if (!j.contains(key)) {
            tab = CoefficientTable<std::vector<double>>::frozen(
                std::vector<double>(entry_size, fallback));
            return tab;
        }
        const auto& node = j.at(key);
        tab.knots = knots;
        if (node.is_number()) {
            tab.values.assign(pieces, std::vector<double>(entry_size, node.get<double>()));
        } else {
            tab.values = node.get<std::vector<std::vector<double>>>();
            if (static_cast<int>(tab.values.size()) != pieces)
                throw std::invalid_argument(std::string("symbol config: ") + key +
                                            " must have one row per knot interval");
        }
        return tab;
    };

    p.drift = read_table("drift", p.dim, 0.0);
    p.diffusion = read_table("diffusion", p.dim * p.dim, 0.0);
    p.jump_density = read_table("jump_density", nq, 0.0);
    // a scalar jump_density row means a constant density over the sphere
    for (auto& row : p.jump_density.values)
        if (static_cast<int>(row.size()) == 1) row.assign(nq, row[0]);

    if (j.contains("C_norm") && j.at("C_norm").is_number())
        p.C_norm = j.at("C_norm").get<double>();
    else
        p.C_norm = normalize_constant(p);
    p.validate();
    return p;
}

} // namespace levylab
