#include "ghost/fieldgrid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "ghost/errors.hpp"

namespace ghost {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// Fraction of the cell [x - dx/2, x + dx/2] covered by [a, b].
double cell_coverage(double x, double dx, double a, double b) {
    const double lo = std::max(x - 0.5 * dx, a);
    const double hi = std::min(x + 0.5 * dx, b);
    return std::clamp((hi - lo) / dx, 0.0, 1.0);
}

void require_inside(const Grid1D& grid, double a, double b) {
    const double half = 0.5 * grid.length();
    if (a < -half || b > half)
        fail(ErrorKind::InvalidInput, "slit [" + fmt_num(a) + ", " + fmt_num(b) + "] extends beyond the grid");
}

}  // namespace

Grid1D::Grid1D(std::size_t n, double length) : n_(n), length_(length) {
    if (n < 16 || n % 2 != 0) fail(ErrorKind::InvalidInput, "grid size must be even and >= 16, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length)) fail(ErrorKind::InvalidInput, "grid length must be > 0");
    dx_ = length / static_cast<double>(n);
    dq_ = 2.0 * kPi / length;
    xs_.resize(n);
    qs_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        xs_[j] = x(j);
        qs_[j] = q(j);
    }
}

std::optional<std::size_t> Grid1D::index_of_x(double xv) const {
    const double pos = xv / dx_ + half();
    const double r = std::round(pos);
    if (std::abs(pos - r) > 1e-9 || r < 0.0 || r >= static_cast<double>(n_)) return std::nullopt;
    return static_cast<std::size_t>(r);
}

Grid1D make_grid(std::size_t n, double length) { return Grid1D(n, length); }

std::string describe(const ObjectSpec& spec) {
    return std::visit(overloaded{
                          [](const SingleSlit& s) {
                              return "single_slit(width=" + fmt_num(s.width) + ", center=" + fmt_num(s.center) + ")";
                          },
                          [](const DoubleSlit& s) {
                              return "double_slit(separation=" + fmt_num(s.separation) + ", width=" + fmt_num(s.width) + ")";
                          },
                          [](const GaussianAperture& s) { return "gaussian(waist=" + fmt_num(s.waist) + ")"; },
                          [](const TableFile& s) { return "table(" + s.path + ")"; },
                          [](const Uniform&) { return std::string("uniform"); },
                      },
                      spec);
}

std::optional<std::pair<double, double>> ObjectProfile::support(const Grid1D& grid) const {
    std::optional<std::pair<double, double>> out;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (std::abs(values[j]) == 0.0) continue;
        const double xj = grid.x(j);
        if (!out) out = std::make_pair(xj, xj);
        out->first = std::min(out->first, xj);
        out->second = std::max(out->second, xj);
    }
    return out;
}

ObjectProfile sample_object(const ObjectSpec& spec, const Grid1D& grid) {
    ObjectProfile out;
    out.descriptor = describe(spec);
    out.values.assign(grid.size(), cplx(0.0, 0.0));
    const double dx = grid.dx();

    auto add_slit = [&](double a, double b) {
        require_inside(grid, a, b);
        for (std::size_t j = 0; j < grid.size(); ++j) out.values[j] += cell_coverage(grid.x(j), dx, a, b);
    };

    std::visit(overloaded{
                   [&](const SingleSlit& s) {
                       if (!(s.width > 0.0)) fail(ErrorKind::InvalidInput, "slit width must be > 0");
                       add_slit(s.center - 0.5 * s.width, s.center + 0.5 * s.width);
                   },
                   [&](const DoubleSlit& s) {
                       if (!(s.width > 0.0)) fail(ErrorKind::InvalidInput, "slit width must be > 0");
                       if (!(s.separation > s.width))
                           fail(ErrorKind::InvalidInput, "double slit separation must exceed the slit width");
                       const double c = 0.5 * s.separation;
                       add_slit(-c - 0.5 * s.width, -c + 0.5 * s.width);
                       add_slit(c - 0.5 * s.width, c + 0.5 * s.width);
                   },
                   [&](const GaussianAperture& s) {
                       if (!(s.waist > 0.0)) fail(ErrorKind::InvalidInput, "gaussian waist must be > 0");
                       for (std::size_t j = 0; j < grid.size(); ++j) {
                           const double u = grid.x(j) / s.waist;
                           out.values[j] = std::exp(-u * u);
                       }
                   },
                   [&](const TableFile& s) {
                       const Table t = read_table(s.path);
                       for (const cplx& v : t.value)
                           if (std::abs(v) > 1.0 + 1e-12)
                               fail(ErrorKind::InvalidInput, "object table " + s.path + " has |T| > 1");
                       out.values = interpolate(t, grid.xs());
                   },
                   [&](const Uniform&) { std::fill(out.values.begin(), out.values.end(), cplx(1.0, 0.0)); },
               },
               spec);
    return out;
}

std::string describe(const SpectrumSpec& spec) {
    return std::visit(overloaded{
                          [](const FlatSpectrum& s) {
                              return std::isinf(s.bandwidth) ? std::string("flat(inf)")
                                                             : "flat(bandwidth=" + fmt_num(s.bandwidth) + ")";
                          },
                          [](const GaussianSpectrum& s) { return "gaussian(width=" + fmt_num(s.width) + ")"; },
                          [](const TableFile& s) { return "table(" + s.path + ")"; },
                      },
                      spec);
}

SpectrumProfile sample_spectrum(const SpectrumSpec& spec, const Grid1D& grid, SpectrumKind kind) {
    SpectrumProfile out;
    out.kind = kind;
    out.descriptor = describe(spec);
    out.values.assign(grid.size(), cplx(0.0, 0.0));
    std::visit(overloaded{
                   [&](const FlatSpectrum& s) {
                       if (std::isnan(s.bandwidth) || s.bandwidth < 0.0)
                           fail(ErrorKind::InvalidInput, "spectrum bandwidth must be >= 0");
                       for (std::size_t j = 0; j < grid.size(); ++j)
                           out.values[j] = std::abs(grid.q(j)) <= s.bandwidth ? 1.0 : 0.0;
                   },
                   [&](const GaussianSpectrum& s) {
                       if (!(s.width > 0.0)) fail(ErrorKind::InvalidInput, "spectrum width must be > 0");
                       for (std::size_t j = 0; j < grid.size(); ++j) {
                           const double u = grid.q(j) / s.width;
                           out.values[j] = std::exp(-0.5 * u * u);
                       }
                   },
                   [&](const TableFile& s) {
                       const Table t = read_table(s.path);
                       if (kind == SpectrumKind::PowerSpectrum)
                           for (const cplx& v : t.value)
                               if (v.imag() != 0.0 || v.real() < 0.0)
                                   fail(ErrorKind::InvalidInput, "power spectrum table " + s.path + " must be real and >= 0");
                       out.values = interpolate(t, grid.qs());
                   },
               },
               spec);
    return out;
}

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open table " + path);
    Table t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<double> cols;
        double v;
        while (ls >> v) cols.push_back(v);
        if (!ls.eof()) fail(ErrorKind::InvalidInput, path + ":" + std::to_string(lineno) + ": not a number");
        if (cols.empty()) continue;
        if (cols.size() != 2 && cols.size() != 3)
            fail(ErrorKind::InvalidInput, path + ":" + std::to_string(lineno) + ": expected 2 or 3 columns");
        if (!t.coordinate.empty() && !(cols[0] > t.coordinate.back()))
            fail(ErrorKind::InvalidInput, path + ":" + std::to_string(lineno) + ": coordinates must ascend");
        t.coordinate.push_back(cols[0]);
        t.value.emplace_back(cols[1], cols.size() == 3 ? cols[2] : 0.0);
    }
    if (t.coordinate.size() < 2) fail(ErrorKind::InvalidInput, "table " + path + " needs at least two rows");
    return t;
}

void write_table(const std::string& path, const std::vector<double>& coordinate, const std::vector<cplx>& value) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::IoFailure, "cannot write " + path);
    out << std::setprecision(17);
    for (std::size_t i = 0; i < coordinate.size(); ++i)
        out << coordinate[i] << ' ' << value[i].real() << ' ' << value[i].imag() << '\n';
    if (!out) fail(ErrorKind::IoFailure, "write failed for " + path);
}

std::vector<cplx> interpolate(const Table& t, const std::vector<double>& at) {
    std::vector<cplx> out(at.size(), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double x = at[i];
        if (x < t.coordinate.front() || x > t.coordinate.back()) continue;
        auto it = std::upper_bound(t.coordinate.begin(), t.coordinate.end(), x);
        if (it == t.coordinate.end()) {
            out[i] = t.value.back();
            continue;
        }
        const std::size_t hi = static_cast<std::size_t>(it - t.coordinate.begin());
        const std::size_t lo = hi - 1;
        const double w = (x - t.coordinate[lo]) / (t.coordinate[hi] - t.coordinate[lo]);
        out[i] = (1.0 - w) * t.value[lo] + w * t.value[hi];
    }
    return out;
}

double quadratic_phase_step(double a, double spacing, double edge) {
    // |a| (edge^2 - (edge - spacing)^2)
    return std::abs(a) * spacing * (2.0 * std::abs(edge) - spacing);
}

std::vector<std::string> SamplingReport::offending() const {
    std::vector<std::string> out;
    for (const auto& f : factors)
        if (!(f.margin > 0.0)) out.push_back(f.name);
    return out;
}

std::string SamplingReport::summary() const {
    std::ostringstream os;
    os << std::setprecision(6);
    for (const auto& f : factors)
        os << (f.margin > 0.0 ? "  ok   " : "  FAIL ") << f.name << ": step " << f.step << " rad (margin " << f.margin
           << ")\n";
    return os.str();
}

SamplingReport validate_sampling(const Geometry& g, const Grid1D& grid, const SamplingOptions& opt) {
    if (!std::isfinite(g.z2) || !std::isfinite(g.f) || !std::isfinite(g.k) || !(g.k > 0.0))
        fail(ErrorKind::InvalidInput, "sampling check needs finite z2, f and k > 0");
    const double z1 = g.require_z1();
    const double z3 = g.require_z3();
    if (z3 == g.f) fail(ErrorKind::DegenerateGeometry, "degenerate: z3 == f");

    SamplingReport rep;
    const double dq = grid.dq();
    const double dx = grid.dx();
    const double q_edge = grid.q_max();
    const double x_edge = grid.x_max();

    auto add_q = [&](const std::string& name, double z) {
        const double step = quadratic_phase_step(z / (2.0 * g.k), dq, q_edge);
        rep.factors.push_back({"exp(-i q^2 z/2k) " + name, step, kPi - step});
    };
    auto add_x = [&](const std::string& name, double d, double edge) {
        const double step = quadratic_phase_step(g.k / (2.0 * d), dx, edge);
        rep.factors.push_back({"exp(i k x^2/2d) " + name, step, kPi - step});
    };

    const double z_eff = g.z2 + z3 * g.f / (g.f - z3);
    add_q("arm1 free space z1", z1);
    add_q("arm2 effective propagation z2 + z3 f/(f - z3)", z_eff);
    if (g.scheme == Scheme::SchemeI) {
        double edge = x_edge;
        if (opt.object_extent)
            edge = std::max(std::abs(opt.object_extent->first), std::abs(opt.object_extent->second)) + dx;
        add_x("object chirp d = z3 - f", z3 - g.f, std::min(edge, x_edge));
    }
    if (opt.include_composition) {
        add_q("free space z2", g.z2);
        add_q("free space z3", z3);
        add_x("thin lens d = f", g.f, x_edge);
    }

    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& f : rep.factors) rep.worst_margin = std::min(rep.worst_margin, f.margin);
    return rep;
}

}  // namespace ghost
