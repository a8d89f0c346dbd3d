#pragma once

#include <optional>
#include <utility>

namespace ghost {

// Scheme I: object and imaging lens share arm 2, D1 scans in arm 1.
// Scheme II: object sits in arm 1 before the collective lens, imaging lens in arm 2.
enum class Scheme { SchemeI, SchemeII };

enum class SourceKind { ThermalClassical, QuantumEntangled, DualTypeI };

enum class Reality { Real, Virtual };

const char* to_string(Scheme s);
const char* to_string(SourceKind s);
const char* to_string(Reality r);

// All lengths share one unit (millimetres throughout the toolkit); k is in
// radians per that unit. The solved unknown (z1 for scheme I, z3 for
// scheme II) may be left empty.
struct Geometry {
    Scheme scheme = Scheme::SchemeI;
    std::optional<double> z1;  // source -> D1 (I) or source -> object (II)
    double z2 = 0.0;           // source -> imaging lens F
    std::optional<double> z3;  // object -> F (I) or F -> D2 (II)
    double f = 0.0;            // imaging lens focal length
    double fc = 0.0;           // collective lens focal length
    double k = 0.0;            // wavenumber

    double require_z1() const;
    double require_z3() const;
};

// Mixing weights of the type-I dual source.
struct DualWeights {
    double classical = 1.0;
    double quantum = 1.0;
};

void validate(const DualWeights& w);

struct ImageSolution {
    double image_distance = 0.0;  // solved z1 (scheme I) or z3 (scheme II)
    double magnification = 0.0;   // signed, negative = inverted
    Reality reality = Reality::Real;
    double joint_path = 0.0;      // z2 - z1 (classical) or z2 + z1 (quantum)
};

// Joint-path sign: -1 for the thermal source, +1 for the entangled source.
int joint_path_sign(SourceKind src);

// Solves the coincidence imaging equation for the scheme's unknown.
// Supplied values of the unknown are ignored. Throws DegenerateGeometry when
// the image or the joint path would be at infinity or the solved distance is 0.
ImageSolution solve_coincidence_image(const Geometry& geom, SourceKind src);

Reality classify_reality(const Geometry& geom, SourceKind src);

struct DualSolution {
    ImageSolution classical;
    ImageSolution quantum;
};

DualSolution dual_solve(const Geometry& geom, const DualWeights& weights);

// Residual of the imaging equation for a fully specified geometry, scaled by f
// so it is dimensionless: f * (1/(z2 -/+ z1) + 1/z3 - 1/f).
double imaging_residual(const Geometry& geom, SourceKind src);

// Magnification of the image plane the geometry actually places, computed
// from z3 alone: f/(f - z3) for scheme I, (f - z3)/f for scheme II.
double plane_magnification(const Geometry& geom);

// Basic positivity checks for a setup where every distance is supplied.
void validate_physical(const Geometry& geom);

}  // namespace ghost
