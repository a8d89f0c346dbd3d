#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ghost/geometry.hpp"

namespace ghost {

// Image construction rules of the coincidence optics:
//  entangled source - the ordinary image is reflected by the source and then
//                     by the beamsplitter;
//  thermal source   - reflected by the beamsplitter only (the source acts as a
//                     phase-conjugate mirror).
enum class FoldRule { QuantumDoubleReflection, ClassicalSingleReflection };

FoldRule fold_rule_for(SourceKind src);

struct ScenePoint {
    double axial = 0.0;   // along the arm, measured from the source
    double height = 0.0;  // transverse
};

// Result of ordinary thin-lens imaging. `distance` is measured from the lens:
// positive on the far side (real), negative on the object side (virtual).
struct OrdinaryImage {
    double distance = 0.0;
    double height = 0.0;
};

// Chief ray through the lens centre intersected with the focal ray.
// object_distance > 0 puts the object in front of the lens.
OrdinaryImage trace_ordinary(double object_height, double object_distance, double focal_length);

// Maps a source-frame axial coordinate across the fold: -u for the double
// reflection, u for the single one.
double fold_axial(double source_frame_coordinate, FoldRule rule);

struct FinalImage {
    double distance = 0.0;  // along arm 1 from the source
    double height = 0.0;
    Reality reality = Reality::Real;
};

// Scheme I: the intermediate image lies `intermediate.distance` from lens F
// toward the source, i.e. at source-frame coordinate z2 - distance.
FinalImage fold(const OrdinaryImage& intermediate, const Geometry& geom, FoldRule rule);

enum class ElementKind { Source, BeamSplitter, Lens, CollectiveLens, Object, Detector };

struct SceneElement {
    ElementKind kind = ElementKind::Source;
    int arm = 0;  // 1 or 2; 0 for the shared source/beamsplitter
    double axial = 0.0;
    double half_height = 0.0;
    std::string label;
};

struct SceneRay {
    int arm = 2;
    std::vector<ScenePoint> points;
    bool dashed = false;  // virtual extension
};

struct ImageMarker {
    int arm = 2;
    ScenePoint tip;  // arrow from the axis to tip
    bool dashed = false;
    std::optional<Reality> reality;
};

struct RayScene {
    Scheme scheme = Scheme::SchemeI;
    SourceKind source = SourceKind::QuantumEntangled;
    std::vector<SceneElement> elements;
    std::optional<ImageMarker> object;
    std::vector<SceneRay> rays;
    std::optional<ImageMarker> intermediate;
    std::optional<ImageMarker> final_image;
    // Arms are drawn on parallel axes, arm 1 below arm 2; both start at the source.
    double arm1_offset = 0.0;
};

// Scheme I needs z2, z3, f (z1 is solved); scheme II needs z1, z2, f (z3 is
// solved). Without an object height only the optical elements are placed.
RayScene build_scene(const Geometry& geom, SourceKind src, std::optional<double> object_height);

// Deterministic SVG, millimetre user units.
std::string render(const RayScene& scene);
void write_svg(const RayScene& scene, const std::string& path);

}  // namespace ghost
