#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ghost/fieldgrid.hpp"

namespace ghost {

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

// In-place unnormalised DFT over every column of `m`; sign -1 is forward.
void fft_columns(CMatrix& m, int sign);

// Wavevector of each DFT bin in FFT order for the grid (bin p -> p dq, wrapped).
std::vector<double> fft_wavevectors(const Grid1D& grid);

// Fourier integral of the band-limited interpolant of sampled data,
//   F(nu) = dx sum_j g_j exp(-i nu x_j)   for |nu| < pi/dx, else 0,
// evaluated at out(r, c) for nu = alpha * row[r] + beta * col[c].
// The separable phase makes this two matrix products.
CMatrix bandlimited_fourier(std::span<const cplx> samples, const Grid1D& grid, double alpha,
                            std::span<const double> rows, double beta, std::span<const double> cols);

}  // namespace ghost
