#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ghost/fieldgrid.hpp"
#include "ghost/geometry.hpp"

namespace ghost {

// One INI file drives every command. Lengths in millimetres, wavelength in
// nanometres.
//
//   [geometry]  scheme = I|II, z1, z2, z3, f, fc, wavelength_nm
//   [source]    kind = thermal|quantum|dual, thermal_spectrum, biphoton_spectrum,
//               w_cl, w_qu        (spectra: flat | flat:<b> | gaussian:<sigma> | table:<path>)
//   [object]    type = single_slit|double_slit|gaussian|table|uniform,
//               width, center, separation, waist, path
//   [grid]      n, length
//   [run]       realizations, seed, fixed_coordinate, allow_defocus,
//               object_height, stem
struct Scenario {
    Scheme scheme = Scheme::SchemeI;
    std::optional<double> z1, z2, z3, f, fc, wavelength_nm;

    SourceKind source = SourceKind::QuantumEntangled;
    SpectrumSpec thermal_spectrum = FlatSpectrum{};
    SpectrumSpec biphoton_spectrum = FlatSpectrum{};
    DualWeights weights;

    std::optional<ObjectSpec> object;

    std::optional<std::size_t> n;
    std::optional<double> length;

    std::size_t realizations = 1000;
    std::uint64_t seed = 1;
    double fixed_coordinate = 0.0;
    bool allow_defocus = false;
    std::optional<double> object_height;
    std::string stem = "ghost";
};

// Relative table paths are resolved against `base_dir` and stored absolute.
Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

// The manifest is itself a scenario: feeding it back reproduces the run.
std::string to_ini(const Scenario& s);

// k = 2 pi / lambda in rad/mm.
double wavenumber(const Scenario& s);

// Geometry with every field the scenario supplies; throws InvalidInput when
// z2 or f is missing, or when `optics` is set and fc or the wavelength is.
Geometry to_geometry(const Scenario& s, bool optics);

Grid1D to_grid(const Scenario& s);

std::string spectrum_to_string(const SpectrumSpec& spec);
SpectrumSpec spectrum_from_string(const std::string& text, const std::string& base_dir = ".");

}  // namespace ghost
