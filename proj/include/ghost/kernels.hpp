#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ghost/fieldgrid.hpp"
#include "ghost/fourier.hpp"
#include "ghost/geometry.hpp"

namespace ghost {

enum class Provenance { Composed, ClosedForm };

// Sampled arm transfer function h(x_i, q_j): the field at detector
// coordinate rows[i] produced by the input plane wave exp(-i q_j x')/sqrt(2 pi),
// i.e. h(x, q) = (1/sqrt(2 pi)) \int h(x, x') exp(-i q x') dx'.
// Columns follow grid.qs(); column grid.negated(j) holds -q_j.
struct TransferMap {
    static constexpr const char* kConvention = "h(x,q) = (1/sqrt(2pi)) int h(x,x') exp(-i q x') dx'";

    CMatrix h;
    std::vector<double> rows;
    Grid1D grid;
    Provenance provenance = Provenance::ClosedForm;
};

struct FreeSpace {
    double z = 0.0;
};
struct ThinLens {
    double f = 0.0;
};
struct Mask {
    ObjectProfile object;
};
// Object and detector in the two focal planes of a lens of focal length fc.
struct CollectiveFF {
    double fc = 0.0;
};

using ArmElement = std::variant<FreeSpace, ThinLens, Mask, CollectiveFF>;

struct ArmDescription {
    std::vector<ArmElement> elements;
    double k = 0.0;
};

// Quadratic-phase sampling factors of an arm's elements, edge-of-grid.
SamplingReport validate_arm_sampling(const ArmDescription& arm, const Grid1D& grid);

// Propagates every plane-wave column through the element chain on the grid's
// DFT pair. Rows default to the full grid; they may be arbitrary only when the
// arm ends in a CollectiveFF, otherwise they must be grid points.
TransferMap compose_arm(const ArmDescription& arm, const Grid1D& grid,
                        std::optional<std::vector<double>> rows = std::nullopt);

// Arm descriptions matching the two physical arms of each scheme.
ArmDescription scheme_arm1(const Geometry& geom, const ObjectProfile& object);
ArmDescription scheme_arm2(const Geometry& geom, const ObjectProfile& object);

// Closed-form kernels (free propagation, lens and object chain evaluated
// analytically, the object integral by band-limited grid quadrature).
TransferMap closed_form_s1_arm1(const Geometry& geom, const Grid1D& grid,
                                std::optional<std::vector<double>> rows = std::nullopt);
TransferMap closed_form_s1_arm2(const Geometry& geom, const ObjectProfile& object, const Grid1D& grid,
                                std::optional<std::vector<double>> rows = std::nullopt);
TransferMap closed_form_s2_arm1(const Geometry& geom, const ObjectProfile& object, const Grid1D& grid,
                                std::optional<std::vector<double>> rows = std::nullopt);
TransferMap closed_form_s2_arm2(const Geometry& geom, const Grid1D& grid,
                                std::optional<std::vector<double>> rows = std::nullopt);

struct MapComparison {
    double relative_l2 = 0.0;  // ||a - e^{i phase} b|| / ||b||
    double phase = 0.0;        // fitted global phase
};

// Compares two maps on identical rows and grid after removing the single
// global phase that best aligns `a` with `b`.
MapComparison compare_maps(const TransferMap& a, const TransferMap& b);

// Plain-text dump, one "x q re im" row per matrix entry.
void dump_kernel(const TransferMap& map, const std::string& path);

}  // namespace ghost
