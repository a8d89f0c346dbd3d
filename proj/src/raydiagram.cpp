#include "ghost/raydiagram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ghost/errors.hpp"

namespace ghost {

FoldRule fold_rule_for(SourceKind src) {
    switch (src) {
        case SourceKind::QuantumEntangled: return FoldRule::QuantumDoubleReflection;
        case SourceKind::ThermalClassical: return FoldRule::ClassicalSingleReflection;
        case SourceKind::DualTypeI: break;
    }
    fail(ErrorKind::InvalidInput, "dual source has two fold rules; build one scene per branch");
}

OrdinaryImage trace_ordinary(double object_height, double object_distance, double f) {
    if (f == 0.0 || !std::isfinite(f)) fail(ErrorKind::InvalidInput, "focal length must be finite and nonzero");
    if (object_distance == 0.0) fail(ErrorKind::DegenerateGeometry, "degenerate: object on the lens");
    const double h = object_height != 0.0 ? object_height : 1.0;

    // Lens at s = 0, object tip at (-d, h).
    // Chief ray:  (-d, h) + t (d, -h)      (through the lens centre)
    // Focal ray:  (0, h)  + u (f, -h)      (parallel in, through the far focus)
    const double ax = object_distance, ay = -h;
    const double bx = f, by = -h;
    const double cx = object_distance, cy = 0.0;  // (0, h) - (-d, h)
    const double det = -ax * by + bx * ay;
    if (std::abs(det) <= 1e-12 * std::abs(ax * by)) fail(ErrorKind::DegenerateGeometry, "degenerate: object in the focal plane");
    const double u = (ax * cy - ay * cx) / det;
    const double s = u * bx;
    const double y = h + u * by;
    return {s, object_height != 0.0 ? y : 0.0};
}

double fold_axial(double u, FoldRule rule) { return rule == FoldRule::QuantumDoubleReflection ? -u : u; }

FinalImage fold(const OrdinaryImage& intermediate, const Geometry& geom, FoldRule rule) {
    const double u = geom.z2 - intermediate.distance;
    const double d = fold_axial(u, rule);
    return {d, intermediate.height, d > 0.0 ? Reality::Real : Reality::Virtual};
}

namespace {

SceneRay ray(int arm, std::initializer_list<ScenePoint> pts, bool dashed = false) {
    return SceneRay{arm, std::vector<ScenePoint>(pts), dashed};
}

// Two construction rays from `tip` through a lens at `lens_axial` whose image
// lands at `image`. `dir` is +1 when light crosses the lens toward +axial.
void add_construction_rays(RayScene& sc, int arm, ScenePoint tip, double lens_axial, double f, int dir,
                           ScenePoint image) {
    const bool real = (image.axial - lens_axial) * dir > 0.0;
    const ScenePoint centre{lens_axial, 0.0};
    const ScenePoint hit{lens_axial, tip.height};
    const ScenePoint focus{lens_axial + dir * f, 0.0};
    if (real) {
        sc.rays.push_back(ray(arm, {tip, centre, image}));
        sc.rays.push_back(ray(arm, {tip, hit, image}));
    } else {
        // Diverging rays: draw a stretch past the lens, extend back dashed.
        const double run = std::abs(lens_axial - tip.axial);
        auto beyond = [&](ScenePoint from, ScenePoint through) {
            const double t = run / std::max(std::abs(through.axial - from.axial), 1e-300);
            return ScenePoint{through.axial + dir * run, through.height + (through.height - from.height) * t};
        };
        sc.rays.push_back(ray(arm, {tip, centre, beyond(tip, centre)}));
        sc.rays.push_back(ray(arm, {tip, hit, beyond(hit, focus)}));
        sc.rays.push_back(ray(arm, {centre, image}, true));
        sc.rays.push_back(ray(arm, {hit, image}, true));
    }
}

}  // namespace

RayScene build_scene(const Geometry& g, SourceKind src, std::optional<double> object_height) {
    const FoldRule rule = fold_rule_for(src);
    RayScene sc;
    sc.scheme = g.scheme;
    sc.source = src;
    sc.elements.push_back({ElementKind::Source, 0, 0.0, 0.0, "source"});
    sc.elements.push_back({ElementKind::BeamSplitter, 0, 0.0, 0.0, "BS"});

    if (g.scheme == Scheme::SchemeI) {
        const double z3 = g.require_z3();
        if (!(g.z2 > 0.0) || !(z3 > 0.0)) fail(ErrorKind::InvalidInput, "scheme I scene needs z2 > 0 and z3 > 0");
        const double obj_axial = g.z2 + z3;
        sc.elements.push_back({ElementKind::Lens, 2, g.z2, 0.0, "F"});
        sc.elements.push_back({ElementKind::Object, 2, obj_axial, 0.0, "T"});
        if (g.fc > 0.0) {
            sc.elements.push_back({ElementKind::CollectiveLens, 2, obj_axial + g.fc, 0.0, "Fc"});
            sc.elements.push_back({ElementKind::Detector, 2, obj_axial + 2.0 * g.fc, 0.0, "D2"});
        }
        if (object_height) {
            const double h = *object_height;
            // Image the object back through F toward the source.
            const OrdinaryImage inter = trace_ordinary(h, z3, g.f);
            const FinalImage fin = fold(inter, g, rule);
            const ScenePoint tip{obj_axial, h};
            const ScenePoint inter_pt{g.z2 - inter.distance, inter.height};
            sc.object = ImageMarker{2, tip, false, std::nullopt};
            add_construction_rays(sc, 2, tip, g.z2, g.f, -1, inter_pt);
            sc.intermediate = ImageMarker{2, inter_pt, true, std::nullopt};
            sc.final_image = ImageMarker{1, {fin.distance, fin.height}, false, fin.reality};
            sc.elements.push_back({ElementKind::Detector, 1, fin.distance, 0.0, "D1"});
        }
    } else {
        const double z1 = g.require_z1();
        if (!(g.z2 > 0.0) || !(z1 > 0.0)) fail(ErrorKind::InvalidInput, "scheme II scene needs z1 > 0 and z2 > 0");
        sc.elements.push_back({ElementKind::Object, 1, z1, 0.0, "T"});
        if (g.fc > 0.0) {
            sc.elements.push_back({ElementKind::CollectiveLens, 1, z1 + g.fc, 0.0, "Fc"});
            sc.elements.push_back({ElementKind::Detector, 1, z1 + 2.0 * g.fc, 0.0, "D1"});
        }
        sc.elements.push_back({ElementKind::Lens, 2, g.z2, 0.0, "F"});
        if (object_height) {
            const double h = *object_height;
            // Move the object onto the lens axis across the fold, then image it.
            const double folded = fold_axial(z1, rule);
            const ScenePoint folded_tip{folded, h};
            const OrdinaryImage img = trace_ordinary(h, g.z2 - folded, g.f);
            const ScenePoint image_pt{g.z2 + img.distance, img.height};
            sc.object = ImageMarker{1, {z1, h}, false, std::nullopt};
            sc.intermediate = ImageMarker{2, folded_tip, true, std::nullopt};
            add_construction_rays(sc, 2, folded_tip, g.z2, g.f, +1, image_pt);
            sc.final_image = ImageMarker{2, image_pt, false, img.distance > 0.0 ? Reality::Real : Reality::Virtual};
            sc.elements.push_back({ElementKind::Detector, 2, image_pt.axial, 0.0, "D2"});
        }
    }

    // Element sizes follow the tallest feature and the axial extent.
    double tallest = 1.0;
    double lo = 0.0, hi = 0.0;
    for (const auto* m : {&sc.object, &sc.intermediate, &sc.final_image})
        if (*m) {
            tallest = std::max(tallest, std::abs((*m)->tip.height));
            lo = std::min(lo, (*m)->tip.axial);
            hi = std::max(hi, (*m)->tip.axial);
        }
    for (const auto& e : sc.elements) {
        lo = std::min(lo, e.axial);
        hi = std::max(hi, e.axial);
    }
    const double half = std::max(1.3 * tallest, 0.05 * (hi - lo));
    for (auto& e : sc.elements) e.half_height = half;
    sc.arm1_offset = -3.0 * half;
    return sc;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v == 0.0 ? 0.0 : v);
    return buf;
}

struct Canvas {
    double min_x, max_x, min_y, max_y;
    double arm1_offset;

    double X(double axial) const { return axial - min_x; }
    double Y(int arm, double height) const { return max_y - (height + (arm == 1 ? arm1_offset : 0.0)); }
};

const char* element_class(ElementKind k) {
    switch (k) {
        case ElementKind::Source: return "source";
        case ElementKind::BeamSplitter: return "beamsplitter";
        case ElementKind::Lens: return "lens";
        case ElementKind::CollectiveLens: return "collective-lens";
        case ElementKind::Object: return "object";
        case ElementKind::Detector: return "detector";
    }
    return "element";
}

}  // namespace

std::string render(const RayScene& sc) {
    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    auto grow = [&](int arm, double axial, double height) {
        const double y = height + (arm == 1 ? sc.arm1_offset : 0.0);
        min_x = std::min(min_x, axial);
        max_x = std::max(max_x, axial);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
    };
    for (const auto& e : sc.elements) {
        const int arm = e.arm == 0 ? 2 : e.arm;
        grow(arm, e.axial, e.half_height);
        grow(arm, e.axial, -e.half_height);
        if (e.arm == 0) grow(1, e.axial, -e.half_height);
    }
    for (const auto& r : sc.rays)
        for (const auto& p : r.points) grow(r.arm, p.axial, p.height);
    for (const auto* m : {&sc.object, &sc.intermediate, &sc.final_image})
        if (*m) grow((*m)->arm, (*m)->tip.axial, (*m)->tip.height);

    const double span = std::max(max_x - min_x, max_y - min_y);
    const double pad = 0.08 * span + 1.0;
    const double legend = 0.15 * span + 4.0;
    Canvas cv{min_x - pad, max_x + pad, min_y - pad, max_y + pad, sc.arm1_offset};
    const double width = cv.max_x - cv.min_x;
    const double height = cv.max_y - cv.min_y + legend;
    const double stroke = span / 400.0 + 0.02;
    const double font = span / 40.0 + 0.4;

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "mm\" height=\"" << num(height)
       << "mm\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" data-scale=\"1 user unit = 1 mm\">\n"
       << "<title>Coincidence imaging, scheme " << to_string(sc.scheme) << ", " << to_string(sc.source)
       << " source</title>\n"
       << "<g fill=\"none\" stroke=\"black\" stroke-width=\"" << num(stroke) << "\" font-family=\"sans-serif\" font-size=\""
       << num(font) << "\">\n";

    // Arm axes.
    for (int arm : {2, 1})
        os << "<line class=\"axis\" x1=\"" << num(cv.X(cv.min_x + pad / 2)) << "\" y1=\"" << num(cv.Y(arm, 0.0))
           << "\" x2=\"" << num(cv.X(cv.max_x - pad / 2)) << "\" y2=\"" << num(cv.Y(arm, 0.0))
           << "\" stroke=\"gray\"/>\n"
           << "<text stroke=\"none\" fill=\"gray\" text-anchor=\"end\" x=\"" << num(cv.X(cv.max_x - pad / 2))
           << "\" y=\"" << num(cv.Y(arm, 0.0) - font / 3) << "\">arm " << arm << "</text>\n";

    for (const auto& e : sc.elements) {
        const int arm = e.arm == 0 ? 2 : e.arm;
        const double x = cv.X(e.axial);
        const char* cls = element_class(e.kind);
        switch (e.kind) {
            case ElementKind::Source:
                os << "<circle class=\"" << cls << "\" cx=\"" << num(x) << "\" cy=\"" << num(cv.Y(2, 0.0)) << "\" r=\""
                   << num(2 * stroke + font / 6) << "\" fill=\"black\"/>\n";
                break;
            case ElementKind::BeamSplitter:
                // Drawn at the source and joining the two arm axes.
                os << "<line class=\"" << cls << "\" x1=\"" << num(x - font / 2) << "\" y1=\"" << num(cv.Y(1, 0.0))
                   << "\" x2=\"" << num(x + font / 2) << "\" y2=\"" << num(cv.Y(2, 0.0)) << "\"/>\n";
                break;
            case ElementKind::Lens:
            case ElementKind::CollectiveLens:
                os << "<ellipse class=\"" << cls << "\" cx=\"" << num(x) << "\" cy=\"" << num(cv.Y(arm, 0.0))
                   << "\" rx=\"" << num(font / 4) << "\" ry=\"" << num(e.half_height) << "\"/>\n";
                break;
            case ElementKind::Object:
                os << "<line class=\"" << cls << "\" x1=\"" << num(x) << "\" y1=\"" << num(cv.Y(arm, e.half_height))
                   << "\" x2=\"" << num(x) << "\" y2=\"" << num(cv.Y(arm, -e.half_height))
                   << "\" stroke=\"gray\" stroke-dasharray=\"" << num(stroke) << ' ' << num(3 * stroke) << "\"/>\n";
                break;
            case ElementKind::Detector:
                os << "<line class=\"" << cls << "\" x1=\"" << num(x) << "\" y1=\"" << num(cv.Y(arm, e.half_height))
                   << "\" x2=\"" << num(x) << "\" y2=\"" << num(cv.Y(arm, -e.half_height)) << "\" stroke-width=\""
                   << num(3 * stroke) << "\"/>\n";
                break;
        }
        // Source and beamsplitter labels sit left of the shared origin.
        double label_x = x + font / 3;
        double label_y = cv.Y(arm, -e.half_height) + font;
        const char* anchor = "start";
        if (e.kind == ElementKind::Source) {
            label_x = x - font / 2;
            label_y = cv.Y(2, 0.0) - font / 2;
            anchor = "end";
        } else if (e.kind == ElementKind::BeamSplitter) {
            label_x = x - font;
            label_y = 0.5 * (cv.Y(1, 0.0) + cv.Y(2, 0.0)) + font / 3;
            anchor = "end";
        }
        os << "<text stroke=\"none\" fill=\"black\" text-anchor=\"" << anchor << "\" x=\"" << num(label_x) << "\" y=\""
           << num(label_y) << "\">" << e.label << "</text>\n";
    }

    for (const auto& r : sc.rays) {
        os << "<polyline class=\"" << (r.dashed ? "ray-extension" : "ray") << "\" points=\"";
        for (std::size_t i = 0; i < r.points.size(); ++i)
            os << (i ? " " : "") << num(cv.X(r.points[i].axial)) << ',' << num(cv.Y(r.arm, r.points[i].height));
        os << "\" stroke=\"" << (r.dashed ? "gray" : "black") << '"';
        if (r.dashed) os << " stroke-dasharray=\"" << num(4 * stroke) << ' ' << num(3 * stroke) << '"';
        os << "/>\n";
    }

    auto arrow = [&](const ImageMarker& m, const char* cls, const char* colour) {
        const double x = cv.X(m.tip.axial);
        os << "<line class=\"" << cls << "\" x1=\"" << num(x) << "\" y1=\"" << num(cv.Y(m.arm, 0.0)) << "\" x2=\""
           << num(x) << "\" y2=\"" << num(cv.Y(m.arm, m.tip.height)) << "\" stroke=\"" << colour << "\" stroke-width=\""
           << num(2 * stroke) << '"';
        if (m.dashed) os << " stroke-dasharray=\"" << num(4 * stroke) << ' ' << num(3 * stroke) << '"';
        os << "/>\n";
    };
    if (sc.object) arrow(*sc.object, "object-arrow", "black");
    if (sc.intermediate) arrow(*sc.intermediate, "intermediate-image", "gray");
    // Fold connector: scheme I carries the intermediate image to arm 1,
    // scheme II carries the object onto the lens axis.
    if (sc.intermediate && sc.final_image && sc.object) {
        const bool same_arm = sc.intermediate->arm == sc.final_image->arm;
        const ImageMarker& a = same_arm ? *sc.object : *sc.intermediate;
        const ImageMarker& b = same_arm ? *sc.intermediate : *sc.final_image;
        os << "<line class=\"fold\" x1=\"" << num(cv.X(a.tip.axial)) << "\" y1=\"" << num(cv.Y(a.arm, a.tip.height))
           << "\" x2=\"" << num(cv.X(b.tip.axial)) << "\" y2=\"" << num(cv.Y(b.arm, b.tip.height))
           << "\" stroke=\"gray\" stroke-dasharray=\"" << num(stroke) << ' ' << num(2 * stroke) << "\"/>\n";
    }
    if (sc.final_image) {
        const bool real = sc.final_image->reality == Reality::Real;
        arrow(*sc.final_image, real ? "final-image real" : "final-image virtual", "black");
        os << "<circle class=\"" << (real ? "final-marker filled" : "final-marker hollow") << "\" cx=\""
           << num(cv.X(sc.final_image->tip.axial)) << "\" cy=\""
           << num(cv.Y(sc.final_image->arm, sc.final_image->tip.height)) << "\" r=\"" << num(font / 3) << "\" fill=\""
           << (real ? "black" : "white") << "\"/>\n";
    }

    // Legend font shrinks so the longest line fits the drawing width.
    const char* notes[] = {"solid: rays; dashed: intermediate image and virtual extensions",
                           "filled dot: real final image; hollow dot: virtual final image",
                           "beamsplitter drawn at the source; the imaging equations hold without that assumption"};
    const double small = std::min(0.8 * font, width / (0.6 * 84.0));
    double ly = cv.max_y - cv.min_y + 1.2 * small;
    for (const char* note : notes) {
        os << "<text class=\"legend\" stroke=\"none\" fill=\"black\" font-size=\"" << num(small) << "\" x=\""
           << num(small / 2) << "\" y=\"" << num(ly) << "\">" << note << "</text>\n";
        ly += 1.3 * small;
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

void write_svg(const RayScene& scene, const std::string& path) {
    const std::string doc = render(scene);
    const std::filesystem::path target(path);
    if (target.has_parent_path() && !std::filesystem::is_directory(target.parent_path()))
        fail(ErrorKind::IoFailure, "output directory does not exist: " + target.parent_path().string());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail(ErrorKind::IoFailure, "cannot write " + tmp);
        out << doc;
        if (!out) fail(ErrorKind::IoFailure, "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(ErrorKind::IoFailure, "cannot move " + tmp + " to " + path + ": " + ec.message());
}

}  // namespace ghost
