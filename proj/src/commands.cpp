#include "ghost/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include "ghost/coincidence.hpp"
#include "ghost/kernels.hpp"
#include "ghost/montecarlo.hpp"
#include "ghost/raydiagram.hpp"
#include "ghost/scenario.hpp"

namespace ghost {

namespace {

namespace fs = std::filesystem;

// Files rendered in memory, then written together: all temporaries first,
// then one rename each.
class OutputSet {
public:
    void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

    std::vector<std::string> commit(const std::string& dir) const {
        std::vector<std::pair<fs::path, fs::path>> staged;
        auto cleanup = [&] {
            std::error_code ec;
            for (const auto& [tmp, dst] : staged) fs::remove(tmp, ec);
        };
        for (const auto& [name, content] : files_) {
            const fs::path dst = fs::path(dir) / name;
            const fs::path tmp = fs::path(dir) / (name + ".tmp");
            std::ofstream out(tmp, std::ios::binary);
            if (out) out << content;
            if (!out) {
                cleanup();
                fail(ErrorKind::IoFailure, "cannot write " + tmp.string());
            }
            staged.emplace_back(tmp, dst);
        }
        std::vector<std::string> written;
        for (const auto& [tmp, dst] : staged) {
            std::error_code ec;
            fs::rename(tmp, dst, ec);
            if (ec) {
                cleanup();
                fail(ErrorKind::IoFailure, "cannot move " + tmp.string() + " to " + dst.string() + ": " + ec.message());
            }
            written.push_back(dst.string());
        }
        return written;
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void require_out_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) fail(ErrorKind::IoFailure, "output directory does not exist: " + dir);
}

std::vector<SourceKind> branches(SourceKind src) {
    if (src == SourceKind::DualTypeI) return {SourceKind::QuantumEntangled, SourceKind::ThermalClassical};
    return {src};
}

// Fills the scheme's unknown from the branch's imaging equation when the
// scenario leaves it out.
Geometry complete(Geometry g, SourceKind src) {
    const bool missing = g.scheme == Scheme::SchemeI ? !g.z1 : !g.z3;
    if (!missing) return g;
    if (src == SourceKind::DualTypeI)
        fail(ErrorKind::InvalidInput, "a dual-source run needs both z1 and z3: the setup fixes one plane for both branches");
    const ImageSolution sol = solve_coincidence_image(g, src);
    (g.scheme == Scheme::SchemeI ? g.z1 : g.z3) = sol.image_distance;
    return g;
}

Scenario load(const CommandOptions& opt) {
    Scenario s = load_scenario(opt.scenario);
    if (opt.seed) s.seed = *opt.seed;
    s.allow_defocus = s.allow_defocus || opt.allow_defocus;
    return s;
}

struct Prepared {
    Geometry geom;
    Grid1D grid;
    ObjectProfile object;
    Spectra spectra;
    ImageOptions options;
};

Prepared prepare(const Scenario& s, SourceKind src) {
    if (!s.object) fail(ErrorKind::InvalidInput, "[object] type is required");
    Prepared p{complete(to_geometry(s, true), src), to_grid(s), {}, {}, {}};
    p.object = sample_object(*s.object, p.grid);
    p.spectra.thermal = sample_spectrum(s.thermal_spectrum, p.grid, SpectrumKind::PowerSpectrum);
    p.spectra.biphoton = sample_spectrum(s.biphoton_spectrum, p.grid, SpectrumKind::BiphotonAmplitude);
    p.options.fixed_coordinate = s.fixed_coordinate;
    p.options.allow_defocus = s.allow_defocus;
    return p;
}

std::string peaks_text(const GhostImage& img) {
    std::string out;
    for (double c : peak_centres(img)) out += (out.empty() ? "" : " ") + num(c);
    return out.empty() ? "-" : out;
}

void report_image(std::ostream& out, const char* branch, const GhostImage& img) {
    out << branch << ": magnification " << num(img.magnification) << ", visibility " << num(img.visibility)
        << ", peaks at " << peaks_text(img) << " mm\n";
}

int cmd_solve(const CommandOptions& opt, std::ostream& out) {
    const Scenario s = load(opt);
    const Geometry g = to_geometry(s, false);
    const char* unknown = g.scheme == Scheme::SchemeI ? "z1" : "z3";

    std::vector<std::pair<SourceKind, ImageSolution>> rows;
    if (s.source == SourceKind::DualTypeI) {
        const DualSolution d = dual_solve(g, s.weights);
        rows = {{SourceKind::QuantumEntangled, d.quantum}, {SourceKind::ThermalClassical, d.classical}};
    } else {
        rows = {{s.source, solve_coincidence_image(g, s.source)}};
    }

    char line[160];
    std::snprintf(line, sizeof line, "%-10s %-8s %14s %14s %-8s %14s\n", "branch", "unknown", "distance_mm",
                  "magnification", "reality", "joint_path_mm");
    out << "scheme " << to_string(g.scheme) << '\n' << line;
    for (const auto& [src, sol] : rows) {
        std::snprintf(line, sizeof line, "%-10s %-8s %14.6g %14.6g %-8s %14.6g\n", to_string(src), unknown,
                      sol.image_distance, sol.magnification, to_string(sol.reality), sol.joint_path);
        out << line;
    }
    return 0;
}

int cmd_image(const CommandOptions& opt, std::ostream& out, bool force_dual) {
    Scenario s = load(opt);
    require_out_dir(opt.out_dir);
    if (force_dual) s.source = SourceKind::DualTypeI;

    OutputSet files;
    if (s.source == SourceKind::DualTypeI) {
        const Prepared p = prepare(s, s.source);
        const DualImage d = dual_image(p.geom, p.object, p.grid, p.spectra, s.weights, p.options);
        files.add(s.stem + "_quantum.csv", to_csv(d.quantum));
        files.add(s.stem + "_classical.csv", to_csv(d.classical));
        std::ostringstream comb;
        comb << "coordinate,combined\n" << std::setprecision(17);
        for (std::size_t i = 0; i < d.combined.size(); ++i) comb << d.quantum.coordinate[i] << ',' << d.combined[i] << '\n';
        files.add(s.stem + "_combined.csv", comb.str());
        report_image(out, "quantum", d.quantum);
        report_image(out, "classical", d.classical);
    } else {
        const Prepared p = prepare(s, s.source);
        const GhostImage img = ghost_image(p.geom, s.source, p.object, p.grid, p.spectra, p.options);
        files.add(s.stem + "_" + to_string(s.source) + ".csv", to_csv(img));
        report_image(out, to_string(s.source), img);
    }
    files.add(s.stem + "_manifest.ini", to_ini(s));
    for (const auto& path : files.commit(opt.out_dir)) out << "wrote " << path << '\n';
    return 0;
}

int cmd_mc(const CommandOptions& opt, std::ostream& out) {
    Scenario s = load(opt);
    require_out_dir(opt.out_dir);
    if (s.source == SourceKind::QuantumEntangled)
        fail(ErrorKind::InvalidInput, "Monte-Carlo sampling covers the thermal field only; the source is quantum");
    const Prepared p = prepare(s, SourceKind::ThermalClassical);

    validate_physical(p.geom);
    if (!s.allow_defocus) {
        const double r = imaging_residual(p.geom, SourceKind::ThermalClassical);
        if (!(std::abs(r) <= p.options.focus_tolerance))
            fail(ErrorKind::ImagingEquationUnsatisfied,
                 "imaging equation unsatisfied for the classical branch (residual " + num(r) + "); pass --allow-defocus");
    }
    SamplingOptions sopt;
    sopt.object_extent = p.object.support(p.grid);
    if (const SamplingReport rep = validate_sampling(p.geom, p.grid, sopt); !rep.ok())
        fail(ErrorKind::SamplingViolation, "grid undersamples the kernels:\n" + rep.summary());

    const std::vector<double> fixed{s.fixed_coordinate};
    const bool s1 = p.geom.scheme == Scheme::SchemeI;
    const TransferMap h1 = s1 ? closed_form_s1_arm1(p.geom, p.grid) : closed_form_s2_arm1(p.geom, p.object, p.grid, fixed);
    const TransferMap h2 = s1 ? closed_form_s1_arm2(p.geom, p.object, p.grid, fixed) : closed_form_s2_arm2(p.geom, p.grid);

    const EmpiricalCorrelation e = accumulate(p.spectra.thermal, h1, h2, s.realizations, s.seed);
    const JointIntensityResult a = joint_intensity_classical(h1, h2, p.spectra.thermal);
    const Eigen::MatrixXd cov = e.covariance();

    std::ostringstream csv;
    csv << "coordinate,mean_scan,stderr_scan,mean_fixed,joint,stderr_joint,covariance,analytic_joint,"
           "analytic_correlation\n"
        << std::setprecision(17);
    const std::size_t count = s1 ? e.x1.size() : e.x2.size();
    for (std::size_t i = 0; i < count; ++i) {
        const auto r = static_cast<Eigen::Index>(s1 ? i : 0);
        const auto c = static_cast<Eigen::Index>(s1 ? 0 : i);
        csv << (s1 ? e.x1[i] : e.x2[i]) << ',' << (s1 ? e.mean_i1(r) : e.mean_i2(c)) << ','
            << (s1 ? e.stderr_i1(r) : e.stderr_i2(c)) << ',' << (s1 ? e.mean_i2(0) : e.mean_i1(0)) << ','
            << e.joint(r, c) << ',' << e.stderr_joint(r, c) << ',' << cov(r, c) << ',' << a.total(r, c) << ','
            << a.correlation(r, c) << '\n';
    }

    const double rel = (cov - a.correlation).norm() / a.correlation.norm();
    out << "classical Monte Carlo: " << s.realizations << " realizations, seed " << s.seed
        << ", relative L2 deviation of the covariance from the analytic correlation " << num(rel) << '\n';

    OutputSet files;
    files.add(s.stem + "_mc.csv", csv.str());
    files.add(s.stem + "_manifest.ini", to_ini(s));
    for (const auto& path : files.commit(opt.out_dir)) out << "wrote " << path << '\n';
    return 0;
}

int cmd_rays(const CommandOptions& opt, std::ostream& out) {
    const Scenario s = load(opt);
    require_out_dir(opt.out_dir);
    const Geometry g = to_geometry(s, false);
    const double height = s.object_height.value_or(0.2 * g.z2);

    OutputSet files;
    for (SourceKind src : branches(s.source)) {
        RayScene scene;
        try {
            scene = build_scene(g, src, height);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(to_string(src)) + " branch: " + e.what(), to_string(src));
        }
        const auto& fin = *scene.final_image;
        out << to_string(src) << ": final image at " << num(fin.tip.axial) << " mm on arm " << fin.arm
            << ", height " << num(fin.tip.height) << " mm, " << to_string(*fin.reality) << '\n';
        files.add(s.stem + "_rays_" + to_string(src) + ".svg", render(scene));
    }
    files.add(s.stem + "_manifest.ini", to_ini(s));
    for (const auto& path : files.commit(opt.out_dir)) out << "wrote " << path << '\n';
    return 0;
}

}  // namespace

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DegenerateGeometry: return 3;
        case ErrorKind::SamplingViolation: return 4;
        case ErrorKind::IoFailure: return 5;
        case ErrorKind::InvalidInput:
        case ErrorKind::GridMismatch:
        case ErrorKind::ImagingEquationUnsatisfied:
        case ErrorKind::EmptyRegion: return 2;
    }
    return 2;
}

int run_command(const std::string& verb, const CommandOptions& options, std::ostream& out, std::ostream& err) {
    try {
        if (verb == "solve") return cmd_solve(options, out);
        if (verb == "image") return cmd_image(options, out, false);
        if (verb == "dual") return cmd_image(options, out, true);
        if (verb == "mc") return cmd_mc(options, out);
        if (verb == "rays") return cmd_rays(options, out);
        err << "error: unknown command '" << verb << "'\n";
        return 2;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code(e.kind());
    }
}

}  // namespace ghost
