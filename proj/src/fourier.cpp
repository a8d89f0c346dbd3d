#include "ghost/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace ghost {

namespace {
// FFTW's planner is not thread-safe.
std::mutex g_plan_mutex;
}  // namespace

void fft_columns(CMatrix& m, int sign) {
    const int n = static_cast<int>(m.rows());
    const int howmany = static_cast<int>(m.cols());
    if (n == 0 || howmany == 0) return;
    auto* data = reinterpret_cast<fftw_complex*>(m.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        // ESTIMATE keeps the algorithm choice, and so the rounding, reproducible.
        plan = fftw_plan_many_dft(1, &n, howmany, data, nullptr, 1, n, data, nullptr, 1, n,
                                  sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    fftw_destroy_plan(plan);
}

std::vector<double> fft_wavevectors(const Grid1D& grid) {
    const std::size_t n = grid.size();
    std::vector<double> out(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double idx = p < n / 2 ? static_cast<double>(p) : static_cast<double>(p) - static_cast<double>(n);
        out[p] = idx * grid.dq();
    }
    return out;
}

CMatrix bandlimited_fourier(std::span<const cplx> g, const Grid1D& grid, double alpha, std::span<const double> rows,
                            double beta, std::span<const double> cols) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto nc = static_cast<Eigen::Index>(cols.size());
    const double dx = grid.dx();

    // Skip samples where g vanishes; objects are often mostly opaque.
    std::vector<Eigen::Index> live;
    for (Eigen::Index j = 0; j < n; ++j)
        if (g[static_cast<std::size_t>(j)] != cplx(0.0, 0.0)) live.push_back(j);
    const auto m = static_cast<Eigen::Index>(live.size());

    CMatrix left(nr, m);
    CMatrix right(m, nc);
    for (Eigen::Index s = 0; s < m; ++s) {
        const double x = grid.x(static_cast<std::size_t>(live[s]));
        const cplx gw = g[static_cast<std::size_t>(live[s])] * dx;
        for (Eigen::Index r = 0; r < nr; ++r) left(r, s) = std::polar(1.0, -alpha * rows[r] * x);
        for (Eigen::Index c = 0; c < nc; ++c) right(s, c) = gw * std::polar(1.0, -beta * cols[c] * x);
    }
    CMatrix out = left * right;

    // The Nyquist sample itself is kept: it is its own alias on the periodic axis.
    const double nyquist = std::numbers::pi / dx * (1.0 + 1e-12);
    for (Eigen::Index c = 0; c < nc; ++c)
        for (Eigen::Index r = 0; r < nr; ++r)
            if (std::abs(alpha * rows[r] + beta * cols[c]) > nyquist) out(r, c) = 0.0;
    return out;
}

}  // namespace ghost
