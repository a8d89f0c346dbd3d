#include "ghost/coincidence.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ghost/errors.hpp"

namespace ghost {

namespace {

void check_pair(const TransferMap& h1, const TransferMap& h2, const SpectrumProfile& s) {
    if (!(h1.grid == h2.grid)) fail(ErrorKind::GridMismatch, "transfer maps use different grids");
    if (s.values.size() != h1.grid.size())
        fail(ErrorKind::GridMismatch, "spectrum sampled on a different grid");
}

// Columns permuted so that column j holds h(x, -q_j).
CMatrix at_negated_q(const TransferMap& m) {
    CMatrix out(m.h.rows(), m.h.cols());
    for (Eigen::Index j = 0; j < m.h.cols(); ++j)
        out.col(j) = m.h.col(static_cast<Eigen::Index>(m.grid.negated(static_cast<std::size_t>(j))));
    return out;
}

std::vector<double> column(const RMatrix& m, Eigen::Index c) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) out[static_cast<std::size_t>(r)] = m(r, c);
    return out;
}

std::vector<double> row(const RMatrix& m, Eigen::Index r) {
    std::vector<double> out(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)] = m(r, c);
    return out;
}

double spacing(const std::vector<double>& xs) {
    return xs.size() > 1 ? (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1) : 1.0;
}

}  // namespace

JointIntensityResult joint_intensity_classical(const TransferMap& h1, const TransferMap& h2, const SpectrumProfile& s) {
    check_pair(h1, h2, s);
    if (s.kind != SpectrumKind::PowerSpectrum) fail(ErrorKind::InvalidInput, "thermal source needs a power spectrum");
    const double dq = h1.grid.dq();
    const auto n = static_cast<Eigen::Index>(h1.grid.size());

    Eigen::VectorXd w(n);
    for (Eigen::Index j = 0; j < n; ++j) w(j) = s.values[static_cast<std::size_t>(j)].real() * dq;

    const CMatrix a = at_negated_q(h1);
    const CMatrix b = at_negated_q(h2);

    const Eigen::VectorXd marg1 = a.cwiseAbs2() * w;
    const Eigen::VectorXd marg2 = b.cwiseAbs2() * w;
    const CMatrix cross = a.conjugate() * w.asDiagonal() * b.transpose();

    JointIntensityResult out;
    out.background = marg1 * marg2.transpose();
    out.correlation = cross.cwiseAbs2();
    out.total = out.background + out.correlation;
    out.x1 = h1.rows;
    out.x2 = h2.rows;
    return out;
}

JointIntensityResult joint_intensity_quantum(const TransferMap& h1, const TransferMap& h2, const SpectrumProfile& w) {
    check_pair(h1, h2, w);
    const double dq = h1.grid.dq();
    const auto n = static_cast<Eigen::Index>(h1.grid.size());
    Eigen::VectorXcd wq(n);
    for (Eigen::Index j = 0; j < n; ++j) wq(j) = w.values[static_cast<std::size_t>(j)] * dq;

    // h1 at -q against h2 at +q: conjugate wavevectors.
    const CMatrix amp = at_negated_q(h1) * wq.asDiagonal() * h2.h.transpose();

    JointIntensityResult out;
    out.correlation = amp.cwiseAbs2();
    out.background = RMatrix::Zero(out.correlation.rows(), out.correlation.cols());
    out.total = out.correlation;
    out.x1 = h1.rows;
    out.x2 = h2.rows;
    return out;
}

Spectra Spectra::broadband(const Grid1D& grid) {
    return {sample_spectrum(FlatSpectrum{}, grid, SpectrumKind::PowerSpectrum),
            sample_spectrum(FlatSpectrum{}, grid, SpectrumKind::BiphotonAmplitude)};
}

std::pair<double, double> predicted_image_roi(const ObjectProfile& object, const Grid1D& grid, double m) {
    const auto sup = object.support(grid);
    if (!sup) fail(ErrorKind::EmptyRegion, "object is opaque; no image region");
    const double a = m * sup->first;
    const double b = m * sup->second;
    return {std::min(a, b), std::max(a, b)};
}

double visibility(const GhostImage& img, std::pair<double, double> roi) {
    const double tol = 1e-9 * spacing(img.coordinate);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < img.coordinate.size(); ++i) {
        const double x = img.coordinate[i];
        if (x < roi.first - tol || x > roi.second + tol) continue;
        lo = std::min(lo, img.total[i]);
        hi = std::max(hi, img.total[i]);
    }
    if (!std::isfinite(lo)) fail(ErrorKind::EmptyRegion, "region of interest holds no samples");
    if (hi + lo <= 0.0) return 0.0;
    return std::clamp((hi - lo) / (hi + lo), 0.0, 1.0);
}

GhostImage ghost_image(const Geometry& geom, SourceKind src, const ObjectProfile& object, const Grid1D& grid,
                       const Spectra& spectra, const ImageOptions& opt) {
    if (src == SourceKind::DualTypeI) fail(ErrorKind::InvalidInput, "dual source: use dual_image");
    validate_physical(geom);
    if (object.values.size() != grid.size()) fail(ErrorKind::GridMismatch, "object sampled on a different grid");

    if (!opt.allow_defocus) {
        const double residual = imaging_residual(geom, src);
        if (!(std::abs(residual) <= opt.focus_tolerance)) {
            std::ostringstream os;
            os << "imaging equation unsatisfied for the " << to_string(src) << " source: residual f(1/(z2"
               << (src == SourceKind::QuantumEntangled ? "+" : "-") << "z1) + 1/z3) - 1 = " << residual;
            fail(ErrorKind::ImagingEquationUnsatisfied, os.str());
        }
    }

    SamplingOptions sopt;
    sopt.object_extent = object.support(grid);
    if (const SamplingReport rep = validate_sampling(geom, grid, sopt); !rep.ok())
        fail(ErrorKind::SamplingViolation, "grid undersamples the kernels:\n" + rep.summary());

    const std::vector<double> fixed{opt.fixed_coordinate};
    GhostImage img;
    img.fixed_coordinate = opt.fixed_coordinate;
    img.magnification = plane_magnification(geom);

    JointIntensityResult joint;
    const bool quantum = src == SourceKind::QuantumEntangled;
    if (geom.scheme == Scheme::SchemeI) {
        const TransferMap h1 = closed_form_s1_arm1(geom, grid);
        const TransferMap h2 = closed_form_s1_arm2(geom, object, grid, fixed);
        joint = quantum ? joint_intensity_quantum(h1, h2, spectra.biphoton)
                        : joint_intensity_classical(h1, h2, spectra.thermal);
        img.scan_axis = ScanAxis::X1;
        img.coordinate = joint.x1;
        img.total = column(joint.total, 0);
        img.background = column(joint.background, 0);
        img.correlation = column(joint.correlation, 0);
    } else {
        const TransferMap h1 = closed_form_s2_arm1(geom, object, grid, fixed);
        const TransferMap h2 = closed_form_s2_arm2(geom, grid);
        joint = quantum ? joint_intensity_quantum(h1, h2, spectra.biphoton)
                        : joint_intensity_classical(h1, h2, spectra.thermal);
        img.scan_axis = ScanAxis::X2;
        img.coordinate = joint.x2;
        img.total = row(joint.total, 0);
        img.background = row(joint.background, 0);
        img.correlation = row(joint.correlation, 0);
    }

    img.background_subtracted.resize(img.total.size());
    for (std::size_t i = 0; i < img.total.size(); ++i) img.background_subtracted[i] = img.total[i] - img.background[i];

    img.roi = opt.roi ? *opt.roi : predicted_image_roi(object, grid, img.magnification);
    img.visibility = visibility(img, img.roi);
    return img;
}

DualImage dual_image(const Geometry& geom, const ObjectProfile& object, const Grid1D& grid, const Spectra& spectra,
                     const DualWeights& weights, const ImageOptions& options) {
    validate(weights);
    ImageOptions opt = options;
    opt.allow_defocus = true;
    auto branch = [&](SourceKind src, const char* name) {
        try {
            return ghost_image(geom, src, object, grid, spectra, opt);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(name) + " branch: " + e.what(), name);
        }
    };
    DualImage out;
    out.classical = branch(SourceKind::ThermalClassical, "classical");
    out.quantum = branch(SourceKind::QuantumEntangled, "quantum");
    out.combined.resize(out.classical.total.size());
    for (std::size_t i = 0; i < out.combined.size(); ++i)
        out.combined[i] = weights.classical * out.classical.total[i] + weights.quantum * out.quantum.correlation[i];
    return out;
}

std::pair<double, double> analysis_window(const GhostImage& img) {
    const double w = img.roi.second - img.roi.first;
    const double c = 0.5 * (img.roi.first + img.roi.second);
    const double period = std::abs(img.magnification) * spacing(img.coordinate) * static_cast<double>(img.coordinate.size());
    const double half = std::min(1.5 * w, 0.5 * period);
    return {c - half, c + half};
}

namespace {

bool inside(double x, std::pair<double, double> win, double tol) { return x >= win.first - tol && x <= win.second + tol; }

}  // namespace

double image_sharpness(const GhostImage& img) {
    const auto& p = img.background_subtracted;
    if (p.empty()) fail(ErrorKind::EmptyRegion, "empty profile");
    const auto win = analysis_window(img);
    const double tol = 1e-9 * spacing(img.coordinate);
    double peak = -std::numeric_limits<double>::infinity();
    double area = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!inside(img.coordinate[i], win, tol)) continue;
        peak = std::max(peak, p[i]);
        area += p[i];
    }
    if (!std::isfinite(peak)) fail(ErrorKind::EmptyRegion, "analysis window holds no samples");
    area *= spacing(img.coordinate);
    if (!(peak > 0.0) || !(area > 0.0)) return 0.0;
    return std::abs(img.magnification) * peak / area;
}

std::vector<double> peak_centres(const GhostImage& img, double fraction) {
    const auto& p = img.background_subtracted;
    std::vector<double> out;
    if (p.empty()) return out;
    const auto win = analysis_window(img);
    const double tol = 1e-9 * spacing(img.coordinate);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i)
        if (inside(img.coordinate[i], win, tol)) top = std::max(top, p[i]);
    const double thr = fraction * top;
    auto above = [&](std::size_t i) { return inside(img.coordinate[i], win, tol) && p[i] > thr; };
    std::size_t i = 0;
    while (i < p.size()) {
        if (!above(i)) {
            ++i;
            continue;
        }
        double sw = 0.0;
        double sx = 0.0;
        for (; i < p.size() && above(i); ++i) {
            sw += p[i];
            sx += p[i] * img.coordinate[i];
        }
        out.push_back(sx / sw);
    }
    return out;
}

std::string to_csv(const GhostImage& img) {
    std::ostringstream os;
    os << "coordinate,total,background,correlation,background_subtracted\n" << std::setprecision(17);
    for (std::size_t i = 0; i < img.coordinate.size(); ++i)
        os << img.coordinate[i] << ',' << img.total[i] << ',' << img.background[i] << ',' << img.correlation[i] << ','
           << img.background_subtracted[i] << '\n';
    return os.str();
}

}  // namespace ghost
