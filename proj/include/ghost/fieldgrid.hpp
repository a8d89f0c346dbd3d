#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ghost/geometry.hpp"

namespace ghost {

using cplx = std::complex<double>;

// Uniform 1D grid with its exact discrete-Fourier dual:
//   x[j] = (j - n/2) dx,  q[j] = (j - n/2) dq,  dx = L/n,  dq = 2 pi / L.
// Both axes are periodic; the first sample (-n/2) is its own mirror image.
class Grid1D {
public:
    Grid1D(std::size_t n, double length);

    std::size_t size() const { return n_; }
    double length() const { return length_; }
    double dx() const { return dx_; }
    double dq() const { return dq_; }
    double x(std::size_t j) const { return (static_cast<double>(j) - half()) * dx_; }
    double q(std::size_t j) const { return (static_cast<double>(j) - half()) * dq_; }
    double q_max() const { return half() * dq_; }
    double x_max() const { return half() * dx_; }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& qs() const { return qs_; }

    // Column holding -q[j] on the periodic wavevector axis.
    std::size_t negated(std::size_t j) const { return (n_ - j) % n_; }

    // Index of x exactly on the grid, if any (tolerance 1e-9 dx).
    std::optional<std::size_t> index_of_x(double x) const;

    bool operator==(const Grid1D& o) const { return n_ == o.n_ && length_ == o.length_; }

private:
    double half() const { return static_cast<double>(n_ / 2); }

    std::size_t n_;
    double length_;
    double dx_;
    double dq_;
    std::vector<double> xs_;
    std::vector<double> qs_;
};

Grid1D make_grid(std::size_t n, double length);

// ---- object transmission ---------------------------------------------------

struct SingleSlit {
    double width = 0.0;
    double center = 0.0;
};
struct DoubleSlit {
    double separation = 0.0;  // centre-to-centre
    double width = 0.0;
};
struct GaussianAperture {
    double waist = 0.0;  // T(waist) = 1/e
};
struct TableFile {
    std::string path;
};
struct Uniform {};  // T == 1, used for bare-arm checks

using ObjectSpec = std::variant<SingleSlit, DoubleSlit, GaussianAperture, TableFile, Uniform>;

std::string describe(const ObjectSpec& spec);

struct ObjectProfile {
    std::vector<cplx> values;
    std::string descriptor;

    // Smallest interval holding every sample with |T| > 0; nullopt if opaque.
    std::optional<std::pair<double, double>> support(const Grid1D& grid) const;
};

// Slits use cell-average sampling: a sample whose cell straddles an edge gets
// the covered fraction, so band centres are not biased by half a cell.
ObjectProfile sample_object(const ObjectSpec& spec, const Grid1D& grid);

// ---- spectra -----------------------------------------------------------------

enum class SpectrumKind { PowerSpectrum, BiphotonAmplitude };

struct FlatSpectrum {
    double bandwidth = std::numeric_limits<double>::infinity();  // 1 for |q| <= b
};
struct GaussianSpectrum {
    double width = 0.0;  // S(width) = exp(-1/2) S(0)
};

using SpectrumSpec = std::variant<FlatSpectrum, GaussianSpectrum, TableFile>;

std::string describe(const SpectrumSpec& spec);

struct SpectrumProfile {
    std::vector<cplx> values;  // S(q_j) real >= 0, or W(q_j) complex
    SpectrumKind kind = SpectrumKind::PowerSpectrum;
    std::string descriptor;
};

SpectrumProfile sample_spectrum(const SpectrumSpec& spec, const Grid1D& grid,
                                SpectrumKind kind = SpectrumKind::PowerSpectrum);

// ---- plain-text tables ---------------------------------------------------------

// Whitespace separated (coordinate, value) or (coordinate, re, im) rows,
// ascending coordinates; '#' starts a comment. Values outside the tabulated
// range are zero.
struct Table {
    std::vector<double> coordinate;
    std::vector<cplx> value;
};

Table read_table(const std::string& path);
void write_table(const std::string& path, const std::vector<double>& coordinate,
                 const std::vector<cplx>& value);
std::vector<cplx> interpolate(const Table& table, const std::vector<double>& at);

// ---- sampling validity ------------------------------------------------------------

// Phase change between the two outermost adjacent samples of exp(i a u^2)
// on points spaced `spacing` apart whose largest magnitude is `edge`.
double quadratic_phase_step(double a, double spacing, double edge);

struct PhaseFactor {
    std::string name;
    double step = 0.0;    // radians between outermost adjacent samples
    double margin = 0.0;  // pi - step; negative means aliased
};

struct SamplingReport {
    std::vector<PhaseFactor> factors;
    double worst_margin = 0.0;

    bool ok() const { return worst_margin > 0.0; }
    std::vector<std::string> offending() const;
    std::string summary() const;
};

struct SamplingOptions {
    // Half-open hull of the object support. Chirps that multiply T(x) only
    // matter there; without it the grid edge is used.
    std::optional<std::pair<double, double>> object_extent;
    // Also check the per-element factors used by operator composition.
    bool include_composition = false;
};

SamplingReport validate_sampling(const Geometry& geom, const Grid1D& grid,
                                 const SamplingOptions& options = {});

}  // namespace ghost
