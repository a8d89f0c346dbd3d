#include "ghost/geometry.hpp"

#include <cmath>
#include <string>

#include "ghost/errors.hpp"

namespace ghost {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid input";
        case ErrorKind::DegenerateGeometry: return "degenerate geometry";
        case ErrorKind::SamplingViolation: return "sampling violation";
        case ErrorKind::GridMismatch: return "grid mismatch";
        case ErrorKind::ImagingEquationUnsatisfied: return "imaging equation unsatisfied";
        case ErrorKind::EmptyRegion: return "empty region";
        case ErrorKind::IoFailure: return "i/o failure";
    }
    return "unknown";
}

const char* to_string(Scheme s) { return s == Scheme::SchemeI ? "I" : "II"; }

const char* to_string(SourceKind s) {
    switch (s) {
        case SourceKind::ThermalClassical: return "classical";
        case SourceKind::QuantumEntangled: return "quantum";
        case SourceKind::DualTypeI: return "dual";
    }
    return "unknown";
}

const char* to_string(Reality r) { return r == Reality::Real ? "real" : "virtual"; }

namespace {

// Relative closeness used for the degeneracy tests; exact zeros are too
// brittle once distances come out of arithmetic.
constexpr double kDegenerateRel = 1e-12;

bool near_zero(double value, double scale) {
    return std::abs(value) <= kDegenerateRel * std::max(std::abs(scale), 1e-300);
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, std::string(name) + " must be finite");
}

void check_common(const Geometry& g) {
    require_finite(g.z2, "z2");
    require_finite(g.f, "f");
    if (!(g.z2 > 0.0)) fail(ErrorKind::InvalidInput, "z2 must be > 0");
    if (g.f == 0.0) fail(ErrorKind::InvalidInput, "f must be nonzero");
}

}  // namespace

double Geometry::require_z1() const {
    if (!z1) fail(ErrorKind::InvalidInput, "z1 is required");
    return *z1;
}

double Geometry::require_z3() const {
    if (!z3) fail(ErrorKind::InvalidInput, "z3 is required");
    return *z3;
}

void validate(const DualWeights& w) {
    if (!(w.classical >= 0.0) || !(w.quantum >= 0.0))
        fail(ErrorKind::InvalidInput, "dual weights must be non-negative");
    if (w.classical == 0.0 && w.quantum == 0.0)
        fail(ErrorKind::InvalidInput, "dual weights must not both be zero");
}

int joint_path_sign(SourceKind src) {
    switch (src) {
        case SourceKind::ThermalClassical: return -1;
        case SourceKind::QuantumEntangled: return +1;
        case SourceKind::DualTypeI: break;
    }
    fail(ErrorKind::InvalidInput, "dual source has two joint paths; use dual_solve");
}

ImageSolution solve_coincidence_image(const Geometry& g, SourceKind src) {
    check_common(g);
    const int sign = joint_path_sign(src);
    const double f = g.f;
    ImageSolution sol;

    if (g.scheme == Scheme::SchemeI) {
        const double z3 = g.require_z3();
        require_finite(z3, "z3");
        if (!(z3 > 0.0)) fail(ErrorKind::InvalidInput, "z3 must be > 0");
        if (near_zero(z3 - f, f))
            fail(ErrorKind::DegenerateGeometry, "degenerate: object in the focal plane (z3 == f), joint path at infinity");
        // Joint path is the image distance: 1/(z2 -/+ z1) = 1/f - 1/z3.
        const double joint = z3 * f / (z3 - f);
        const double z1 = sign * (joint - g.z2);
        if (near_zero(z1, g.z2))
            fail(ErrorKind::DegenerateGeometry, "degenerate: solved z1 == 0 (detector at the source plane)");
        sol.image_distance = z1;
        sol.joint_path = joint;
        sol.magnification = f / (f - z3);
    } else {
        const double z1 = g.require_z1();
        require_finite(z1, "z1");
        if (!(z1 > 0.0)) fail(ErrorKind::InvalidInput, "z1 must be > 0");
        const double joint = g.z2 + sign * z1;
        if (near_zero(joint, g.z2))
            fail(ErrorKind::DegenerateGeometry, "degenerate: joint path z2 +/- z1 == 0");
        if (near_zero(joint - f, f))
            fail(ErrorKind::DegenerateGeometry, "degenerate: joint path equals f, image at infinity");
        const double z3 = joint * f / (joint - f);
        sol.image_distance = z3;
        sol.joint_path = joint;
        sol.magnification = (f - z3) / f;
    }

    if (!std::isfinite(sol.image_distance) || !std::isfinite(sol.magnification))
        fail(ErrorKind::DegenerateGeometry, "degenerate: non-finite image solution");
    sol.reality = sol.image_distance > 0.0 ? Reality::Real : Reality::Virtual;
    return sol;
}

Reality classify_reality(const Geometry& geom, SourceKind src) {
    return solve_coincidence_image(geom, src).reality;
}

DualSolution dual_solve(const Geometry& geom, const DualWeights& weights) {
    validate(weights);
    DualSolution out;
    auto branch = [&](SourceKind src, const char* name) {
        try {
            return solve_coincidence_image(geom, src);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(name) + " branch: " + e.what(), name);
        }
    };
    out.classical = branch(SourceKind::ThermalClassical, "classical");
    out.quantum = branch(SourceKind::QuantumEntangled, "quantum");
    return out;
}

double imaging_residual(const Geometry& g, SourceKind src) {
    const int sign = joint_path_sign(src);
    const double z1 = g.require_z1();
    const double z3 = g.require_z3();
    const double joint = g.z2 + sign * z1;
    if (joint == 0.0 || z3 == 0.0) return std::numeric_limits<double>::infinity();
    return g.f * (1.0 / joint + 1.0 / z3) - 1.0;
}

double plane_magnification(const Geometry& g) {
    const double z3 = g.require_z3();
    if (g.scheme == Scheme::SchemeI) {
        if (near_zero(z3 - g.f, g.f)) fail(ErrorKind::DegenerateGeometry, "degenerate: z3 == f");
        return g.f / (g.f - z3);
    }
    return (g.f - z3) / g.f;
}

void validate_physical(const Geometry& g) {
    check_common(g);
    const double z1 = g.require_z1();
    const double z3 = g.require_z3();
    require_finite(z1, "z1");
    require_finite(z3, "z3");
    require_finite(g.fc, "fc");
    require_finite(g.k, "k");
    if (!(g.fc > 0.0)) fail(ErrorKind::InvalidInput, "fc must be > 0");
    if (!(g.k > 0.0)) fail(ErrorKind::InvalidInput, "k must be > 0");
    // The distance that plays the image role may be virtual (negative) but not zero.
    if (g.scheme == Scheme::SchemeI) {
        if (!(z3 > 0.0)) fail(ErrorKind::InvalidInput, "z3 must be > 0");
        if (z1 == 0.0) fail(ErrorKind::DegenerateGeometry, "degenerate: z1 == 0");
        if (near_zero(z3 - g.f, g.f)) fail(ErrorKind::DegenerateGeometry, "degenerate: z3 == f");
    } else {
        if (!(z1 > 0.0)) fail(ErrorKind::InvalidInput, "z1 must be > 0");
        if (z3 == 0.0) fail(ErrorKind::DegenerateGeometry, "degenerate: z3 == 0");
        if (near_zero(z3 - g.f, g.f)) fail(ErrorKind::DegenerateGeometry, "degenerate: z3 == f");
    }
}

}  // namespace ghost
