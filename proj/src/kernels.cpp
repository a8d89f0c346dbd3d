#include "ghost/kernels.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "ghost/errors.hpp"

namespace ghost {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);
const cplx kI(0.0, 1.0);

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> rows_or_grid(const std::optional<std::vector<double>>& rows, const Grid1D& grid) {
    return rows ? *rows : grid.xs();
}

void check_object(const ObjectProfile& object, const Grid1D& grid) {
    if (object.values.size() != grid.size())
        fail(ErrorKind::GridMismatch, "object sampled on a different grid (" + std::to_string(object.values.size()) +
                                          " samples, grid has " + std::to_string(grid.size()) + ")");
}

void check_arm(const ArmDescription& arm, const Grid1D& grid) {
    if (arm.elements.empty()) fail(ErrorKind::InvalidInput, "arm has no elements");
    if (!(arm.k > 0.0)) fail(ErrorKind::InvalidInput, "arm wavenumber must be > 0");
    int masks = 0;
    for (std::size_t i = 0; i < arm.elements.size(); ++i) {
        const bool last = i + 1 == arm.elements.size();
        std::visit(overloaded{
                       [](const FreeSpace& e) {
                           if (!(e.z >= 0.0) || !std::isfinite(e.z))
                               fail(ErrorKind::InvalidInput, "free-space distance must be finite and >= 0");
                       },
                       [](const ThinLens& e) {
                           if (e.f == 0.0 || !std::isfinite(e.f))
                               fail(ErrorKind::InvalidInput, "lens focal length must be finite and nonzero");
                       },
                       [&](const Mask& e) {
                           check_object(e.object, grid);
                           if (++masks > 1) fail(ErrorKind::InvalidInput, "at most one mask per arm");
                       },
                       [&](const CollectiveFF& e) {
                           if (!(e.fc > 0.0)) fail(ErrorKind::InvalidInput, "collective focal length must be > 0");
                           if (!last) fail(ErrorKind::InvalidInput, "collective lens must terminate the arm");
                       },
                   },
                   arm.elements[i]);
    }
}

void free_space(CMatrix& u, double z, double k, const std::vector<double>& wavevectors) {
    fft_columns(u, -1);
    const double inv_n = 1.0 / static_cast<double>(u.rows());
    for (Eigen::Index p = 0; p < u.rows(); ++p) {
        const double q = wavevectors[static_cast<std::size_t>(p)];
        u.row(p) *= std::polar(inv_n, k * z - q * q * z / (2.0 * k));
    }
    fft_columns(u, +1);
}

}  // namespace

SamplingReport validate_arm_sampling(const ArmDescription& arm, const Grid1D& grid) {
    SamplingReport rep;
    for (const ArmElement& el : arm.elements) {
        if (const auto* fs = std::get_if<FreeSpace>(&el)) {
            const double step = quadratic_phase_step(fs->z / (2.0 * arm.k), grid.dq(), grid.q_max());
            rep.factors.push_back({"exp(-i q^2 z/2k) free space z = " + std::to_string(fs->z), step, kPi - step});
        } else if (const auto* lens = std::get_if<ThinLens>(&el)) {
            const double step = quadratic_phase_step(arm.k / (2.0 * lens->f), grid.dx(), grid.x_max());
            rep.factors.push_back({"exp(-i k x^2/2f) thin lens f = " + std::to_string(lens->f), step, kPi - step});
        }
    }
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& f : rep.factors) rep.worst_margin = std::min(rep.worst_margin, f.margin);
    return rep;
}

TransferMap compose_arm(const ArmDescription& arm, const Grid1D& grid, std::optional<std::vector<double>> rows_in) {
    check_arm(arm, grid);
    if (const SamplingReport rep = validate_arm_sampling(arm, grid); !rep.ok())
        fail(ErrorKind::SamplingViolation, "arm undersampled:\n" + rep.summary());

    const auto n = static_cast<Eigen::Index>(grid.size());
    const double k = arm.k;
    const std::vector<double> wavevectors = fft_wavevectors(grid);

    CMatrix u(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
            u(r, c) = std::polar(kInvSqrt2Pi, -grid.q(static_cast<std::size_t>(c)) * grid.x(static_cast<std::size_t>(r)));

    const std::vector<double> rows = rows_or_grid(rows_in, grid);
    bool collected = false;
    CMatrix out;

    for (const ArmElement& el : arm.elements) {
        std::visit(overloaded{
                       [&](const FreeSpace& e) { free_space(u, e.z, k, wavevectors); },
                       [&](const ThinLens& e) {
                           for (Eigen::Index r = 0; r < n; ++r) {
                               const double x = grid.x(static_cast<std::size_t>(r));
                               u.row(r) *= std::polar(1.0, -k * x * x / (2.0 * e.f));
                           }
                       },
                       [&](const Mask& e) {
                           for (Eigen::Index r = 0; r < n; ++r) u.row(r) *= e.object.values[static_cast<std::size_t>(r)];
                       },
                       [&](const CollectiveFF& e) {
                           // sqrt(k/(2 pi fc)) e^{2ik fc} \int E(x) exp(-i k x x_out / fc) dx
                           const auto nr = static_cast<Eigen::Index>(rows.size());
                           const double nyquist = kPi / grid.dx() * (1.0 + 1e-12);
                           CMatrix a(nr, n);
                           for (Eigen::Index r = 0; r < nr; ++r) {
                               const double nu = k * rows[static_cast<std::size_t>(r)] / e.fc;
                               for (Eigen::Index j = 0; j < n; ++j)
                                   a(r, j) = std::abs(nu) > nyquist
                                                 ? cplx(0.0, 0.0)
                                                 : std::polar(grid.dx(), -nu * grid.x(static_cast<std::size_t>(j)));
                           }
                           out = std::polar(std::sqrt(k / (2.0 * kPi * e.fc)), 2.0 * k * e.fc) * (a * u);
                           collected = true;
                       },
                   },
                   el);
    }

    if (!collected) {
        out.resize(static_cast<Eigen::Index>(rows.size()), n);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto idx = grid.index_of_x(rows[r]);
            if (!idx) fail(ErrorKind::InvalidInput, "row coordinate " + std::to_string(rows[r]) + " is not a grid point");
            out.row(static_cast<Eigen::Index>(r)) = u.row(static_cast<Eigen::Index>(*idx));
        }
    }
    return TransferMap{std::move(out), rows, grid, Provenance::Composed};
}

ArmDescription scheme_arm1(const Geometry& g, const ObjectProfile& object) {
    if (g.scheme == Scheme::SchemeI) return {{FreeSpace{g.require_z1()}}, g.k};
    return {{FreeSpace{g.require_z1()}, Mask{object}, CollectiveFF{g.fc}}, g.k};
}

ArmDescription scheme_arm2(const Geometry& g, const ObjectProfile& object) {
    if (g.scheme == Scheme::SchemeI)
        return {{FreeSpace{g.z2}, ThinLens{g.f}, FreeSpace{g.require_z3()}, Mask{object}, CollectiveFF{g.fc}}, g.k};
    return {{FreeSpace{g.z2}, ThinLens{g.f}, FreeSpace{g.require_z3()}}, g.k};
}

TransferMap closed_form_s1_arm1(const Geometry& g, const Grid1D& grid, std::optional<std::vector<double>> rows_in) {
    const double z1 = g.require_z1();
    const double k = g.k;
    const std::vector<double> rows = rows_or_grid(rows_in, grid);
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto n = static_cast<Eigen::Index>(grid.size());
    CMatrix h(nr, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const double q = grid.q(static_cast<std::size_t>(c));
        const double common = k * z1 - q * q * z1 / (2.0 * k);
        for (Eigen::Index r = 0; r < nr; ++r) h(r, c) = std::polar(kInvSqrt2Pi, common - q * rows[static_cast<std::size_t>(r)]);
    }
    return TransferMap{std::move(h), rows, grid, Provenance::ClosedForm};
}

TransferMap closed_form_s1_arm2(const Geometry& g, const ObjectProfile& object, const Grid1D& grid,
                                std::optional<std::vector<double>> rows_in) {
    check_object(object, grid);
    const double z3 = g.require_z3();
    const double f = g.f;
    const double k = g.k;
    if (z3 == f) fail(ErrorKind::DegenerateGeometry, "degenerate: z3 == f");
    if (!(g.fc > 0.0)) fail(ErrorKind::InvalidInput, "fc must be > 0");

    std::vector<cplx> chirped(object.values.size());
    for (std::size_t j = 0; j < chirped.size(); ++j) {
        const double x = grid.x(j);
        chirped[j] = object.values[j] * std::polar(1.0, k * x * x / (2.0 * (z3 - f)));
    }
    const std::vector<double> rows = rows_or_grid(rows_in, grid);
    CMatrix h = bandlimited_fourier(chirped, grid, k / g.fc, rows, f / (f - z3), grid.qs());

    // (1/2pi) sqrt(k f / (i (f - z3) fc)) on the principal branch.
    const cplx amp = std::sqrt(cplx(k * f / ((f - z3) * g.fc), 0.0) / kI) / (2.0 * kPi);
    const double z_eff = g.z2 + z3 * f / (f - z3);
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
        const double q = grid.q(static_cast<std::size_t>(c));
        h.col(c) *= amp * std::polar(1.0, k * (g.z2 + z3 + 2.0 * g.fc) - q * q * z_eff / (2.0 * k));
    }
    return TransferMap{std::move(h), rows, grid, Provenance::ClosedForm};
}

TransferMap closed_form_s2_arm1(const Geometry& g, const ObjectProfile& object, const Grid1D& grid,
                                std::optional<std::vector<double>> rows_in) {
    check_object(object, grid);
    const double z1 = g.require_z1();
    const double k = g.k;
    if (!(g.fc > 0.0)) fail(ErrorKind::InvalidInput, "fc must be > 0");
    const std::vector<double> rows = rows_or_grid(rows_in, grid);
    CMatrix h = bandlimited_fourier(object.values, grid, k / g.fc, rows, 1.0, grid.qs());

    const cplx amp = std::sqrt(cplx(k / g.fc, 0.0) / kI) / (2.0 * kPi);
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
        const double q = grid.q(static_cast<std::size_t>(c));
        h.col(c) *= amp * std::polar(1.0, k * (z1 + 2.0 * g.fc) - z1 * q * q / (2.0 * k));
    }
    return TransferMap{std::move(h), rows, grid, Provenance::ClosedForm};
}

TransferMap closed_form_s2_arm2(const Geometry& g, const Grid1D& grid, std::optional<std::vector<double>> rows_in) {
    const double z3 = g.require_z3();
    const double f = g.f;
    const double k = g.k;
    if (z3 == f) fail(ErrorKind::DegenerateGeometry, "degenerate: z3 == f");
    const std::vector<double> rows = rows_or_grid(rows_in, grid);
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto n = static_cast<Eigen::Index>(grid.size());

    const cplx amp = std::sqrt(cplx(f / (2.0 * kPi * (f - z3)), 0.0));
    const double z_eff = g.z2 + z3 * f / (f - z3);
    const double scale = f / (f - z3);
    CMatrix h(nr, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const double q = grid.q(static_cast<std::size_t>(c));
        const double common = k * (g.z2 + z3) - q * q * z_eff / (2.0 * k);
        for (Eigen::Index r = 0; r < nr; ++r) {
            const double x = rows[static_cast<std::size_t>(r)];
            h(r, c) = amp * std::polar(1.0, common - q * x * scale - k * x * x / (2.0 * (f - z3)));
        }
    }
    return TransferMap{std::move(h), rows, grid, Provenance::ClosedForm};
}

MapComparison compare_maps(const TransferMap& a, const TransferMap& b) {
    if (!(a.grid == b.grid) || a.rows != b.rows || a.h.rows() != b.h.rows() || a.h.cols() != b.h.cols())
        fail(ErrorKind::GridMismatch, "transfer maps are sampled differently");
    const cplx overlap = (b.h.conjugate().cwiseProduct(a.h)).sum();
    const double phase = std::arg(overlap);
    const double ref = b.h.norm();
    if (ref == 0.0) fail(ErrorKind::InvalidInput, "reference transfer map is identically zero");
    const double diff = (a.h - std::polar(1.0, phase) * b.h).norm();
    return {diff / ref, phase};
}

void dump_kernel(const TransferMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::IoFailure, "cannot write " + path);
    out << "# " << TransferMap::kConvention << "\n# x q re im\n" << std::setprecision(17);
    for (Eigen::Index r = 0; r < map.h.rows(); ++r)
        for (Eigen::Index c = 0; c < map.h.cols(); ++c)
            out << map.rows[static_cast<std::size_t>(r)] << ' ' << map.grid.q(static_cast<std::size_t>(c)) << ' '
                << map.h(r, c).real() << ' ' << map.h(r, c).imag() << '\n';
    if (!out) fail(ErrorKind::IoFailure, "write failed for " + path);
}

}  // namespace ghost
