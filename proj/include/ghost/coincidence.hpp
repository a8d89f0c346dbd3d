#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ghost/fieldgrid.hpp"
#include "ghost/geometry.hpp"
#include "ghost/kernels.hpp"

namespace ghost {

using RMatrix = Eigen::MatrixXd;

// <I1(x1) I2(x2)> over rows of H1 (x1) and rows of H2 (x2), up to the overall
// constant. For the thermal source total = background + correlation; for the
// entangled source background is identically zero.
struct JointIntensityResult {
    RMatrix total;
    RMatrix background;
    RMatrix correlation;
    std::vector<double> x1;
    std::vector<double> x2;
};

JointIntensityResult joint_intensity_classical(const TransferMap& h1, const TransferMap& h2, const SpectrumProfile& s);
JointIntensityResult joint_intensity_quantum(const TransferMap& h1, const TransferMap& h2, const SpectrumProfile& w);

enum class ScanAxis { X1, X2 };

struct GhostImage {
    ScanAxis scan_axis = ScanAxis::X1;
    double fixed_coordinate = 0.0;
    std::vector<double> coordinate;
    std::vector<double> total;
    std::vector<double> background;
    std::vector<double> correlation;
    std::vector<double> background_subtracted;
    double magnification = 0.0;  // imaging-law scale at the detector plane the geometry places
    std::pair<double, double> roi{0.0, 0.0};
    double visibility = 0.0;
};

struct Spectra {
    SpectrumProfile thermal;   // S(q)
    SpectrumProfile biphoton;  // W(q)

    // Broadband limit: both flat over the whole sampled band.
    static Spectra broadband(const Grid1D& grid);
};

struct ImageOptions {
    double fixed_coordinate = 0.0;
    bool allow_defocus = false;
    double focus_tolerance = 1e-9;  // on the dimensionless imaging residual
    std::optional<std::pair<double, double>> roi;
};

// Builds the scheme's two closed-form kernels, evaluates the joint intensity
// with the collective detector fixed, and scans the other detector.
GhostImage ghost_image(const Geometry& geom, SourceKind src, const ObjectProfile& object, const Grid1D& grid,
                       const Spectra& spectra, const ImageOptions& options = {});

// (max - min)/(max + min) of the total profile over the closed interval roi.
double visibility(const GhostImage& img, std::pair<double, double> roi);

// Default region of interest: the object support mapped through the plane's
// magnification.
std::pair<double, double> predicted_image_roi(const ObjectProfile& object, const Grid1D& grid, double magnification);

struct DualImage {
    GhostImage classical;
    GhostImage quantum;
    std::vector<double> combined;  // w_cl * classical total + w_qu * quantum
};

// Both branches on the one physical setup; a branch whose imaging equation
// does not hold is returned defocused rather than rejected.
DualImage dual_image(const Geometry& geom, const ObjectProfile& object, const Grid1D& grid, const Spectra& spectra,
                     const DualWeights& weights, const ImageOptions& options = {});

// The roi grown by its own width on each side, capped at half the spacing
// |m| L of the periodic object replicas that the finite window folds back in.
std::pair<double, double> analysis_window(const GhostImage& img);

// Peak-to-width sharpness of the background-subtracted profile inside the
// analysis window, with the width (area / peak) measured in object coordinates
// so that a perfectly focused image scores the same at any magnification.
double image_sharpness(const GhostImage& img);

// Area-weighted centres of the connected runs above `fraction` of the peak of
// the background-subtracted profile, inside the analysis window.
std::vector<double> peak_centres(const GhostImage& img, double fraction = 0.5);

// CSV: coordinate,total,background,correlation,background_subtracted
std::string to_csv(const GhostImage& img);

}  // namespace ghost
