#include <cmath>
#include <numbers>

#include <doctest.h>

#include "ghost/coincidence.hpp"
#include "ghost/errors.hpp"
#include "ghost/montecarlo.hpp"

using namespace ghost;

namespace {

constexpr double kPi = std::numbers::pi;

Geometry free_arm(double z, double k) {
    Geometry g;
    g.scheme = Scheme::SchemeI;
    g.z1 = z;
    g.z2 = 20;
    g.z3 = 15;
    g.f = 10;
    g.fc = 100;
    g.k = k;
    return g;
}

SpectrumProfile zero_spectrum(const Grid1D& grid) {
    SpectrumProfile s = sample_spectrum(FlatSpectrum{}, grid);
    s.values.assign(grid.size(), cplx(0, 0));
    return s;
}

}  // namespace

TEST_CASE("counter rng is a pure function of seed, stream and counter") {
    CounterRng a(42, 7), b(42, 7), c(43, 7), d(42, 8);
    bool differs_seed = false, differs_stream = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        differs_seed |= va != c.next_u64();
        differs_stream |= va != d.next_u64();
    }
    CHECK(differs_seed);
    CHECK(differs_stream);

    CounterRng u(1, 0);
    for (int i = 0; i < 10000; ++i) {
        const double x = u.next_uniform();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }

    // Moments of the normal draws, and zero correlation across streams.
    CounterRng n0(9, 0), n1(9, 1);
    const int N = 200000;
    double s0 = 0, s00 = 0, s01 = 0;
    for (int i = 0; i < N; ++i) {
        const double x = n0.next_normal(), y = n1.next_normal();
        s0 += x;
        s00 += x * x;
        s01 += x * y;
    }
    CHECK(std::abs(s0 / N) < 4 / std::sqrt(N));
    CHECK(std::abs(s00 / N - 1) < 4 * std::sqrt(2.0 / N));
    CHECK(std::abs(s01 / N) < 4 / std::sqrt(N));
}

TEST_CASE("realizations have the requested second moments") {
    const Grid1D grid = make_grid(64, 4.0);
    const SpectrumProfile s = sample_spectrum(GaussianSpectrum{10.0}, grid);
    const int M = 20000;
    std::vector<double> re2(grid.size(), 0.0), im2(grid.size(), 0.0), reim(grid.size(), 0.0);
    for (int m = 0; m < M; ++m) {
        const Realization r = draw_realization(s, grid, 5, static_cast<std::uint64_t>(m));
        for (std::size_t j = 0; j < grid.size(); ++j) {
            re2[j] += r.amplitudes[j].real() * r.amplitudes[j].real();
            im2[j] += r.amplitudes[j].imag() * r.amplitudes[j].imag();
            reim[j] += r.amplitudes[j].real() * r.amplitudes[j].imag();
        }
    }
    for (std::size_t j = 0; j < grid.size(); j += 4) {
        const double expect = s.values[j].real() * grid.dq() / 2;
        if (expect == 0.0) continue;
        CHECK(std::abs(re2[j] / M - expect) < 5 * expect * std::sqrt(2.0 / M));
        CHECK(std::abs(im2[j] / M - expect) < 5 * expect * std::sqrt(2.0 / M));
        CHECK(std::abs(reim[j] / M) < 5 * expect / std::sqrt(M));
    }

    const Realization z = draw_realization(zero_spectrum(grid), grid, 5, 0);
    for (const auto& v : z.amplitudes) CHECK(v == cplx(0, 0));

    SpectrumProfile w = s;
    w.kind = SpectrumKind::BiphotonAmplitude;
    CHECK_THROWS_AS(draw_realization(w, grid, 1, 0), Error);
}

TEST_CASE("propagation of simple spectra") {
    const Grid1D grid = make_grid(128, 4.0);
    const TransferMap h = closed_form_s1_arm1(free_arm(0.0, 100.0), grid);

    // One spectral component: constant intensity.
    SpectrumProfile one = zero_spectrum(grid);
    one.values[70] = 1.0;
    const Realization r1 = draw_realization(one, grid, 3, 0);
    const std::vector<double> i1 = propagate(h, r1);
    const double expect = std::norm(r1.amplitudes[70]) / (2 * kPi);
    for (double v : i1) CHECK(v == doctest::Approx(expect).epsilon(1e-12));

    // Components at +q0 and -q0: a fringe of period pi/q0.
    const std::size_t jp = 64 + 5, jm = 64 - 5;
    SpectrumProfile two = zero_spectrum(grid);
    two.values[jp] = 1.0;
    two.values[jm] = 1.0;
    const Realization r2 = draw_realization(two, grid, 3, 1);
    const std::vector<double> i2 = propagate(h, r2);
    const double q0 = grid.q(jp);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        // h(x, -q) F(q) = exp(i q x) F(q) / sqrt(2 pi)
        const cplx a = std::polar(1.0, q0 * grid.x(i)) * r2.amplitudes[jp] +
                       std::polar(1.0, -q0 * grid.x(i)) * r2.amplitudes[jm];
        CHECK(i2[i] == doctest::Approx(std::norm(a) / (2 * kPi)).epsilon(1e-10));
    }

    // Lossless free space conserves energy: sum I dx = sum |F|^2 / dq.
    const SpectrumProfile flat = sample_spectrum(FlatSpectrum{}, grid);
    const Realization r3 = draw_realization(flat, grid, 3, 2);
    const TransferMap fs = closed_form_s1_arm1(free_arm(0.4, 100.0), grid);
    double power = 0, energy = 0;
    for (const auto& v : r3.amplitudes) power += std::norm(v);
    for (double v : propagate(fs, r3)) energy += v * grid.dx();
    CHECK(energy == doctest::Approx(power / grid.dq()).epsilon(1e-10));
}

TEST_CASE("accumulated statistics") {
    const Grid1D grid = make_grid(64, 4.0);
    const double k = 100.0;
    const std::vector<double> rows{-0.5, 0.0, 0.25};
    const TransferMap h = closed_form_s1_arm1(free_arm(0.3, k), grid, rows);
    const SpectrumProfile s = sample_spectrum(GaussianSpectrum{6.0}, grid);

    const EmpiricalCorrelation e = accumulate(s, h, h, 8000, 11, 1);
    CHECK(e.realizations == 8000);
    CHECK(e.x1 == rows);
    const JointIntensityResult a = joint_intensity_classical(h, h, s);
    for (Eigen::Index i = 0; i < 3; ++i) {
        // Thermal statistics: <I^2> = 2 <I>^2 at a point.
        CHECK(e.joint(i, i) / (e.mean_i1(i) * e.mean_i1(i)) == doctest::Approx(2.0).epsilon(0.08));
        const double mean = std::sqrt(a.background(i, i));
        CHECK(std::abs(e.mean_i1(i) - mean) < 5 * e.stderr_i1(i));
        for (Eigen::Index j = 0; j < 3; ++j)
            CHECK(std::abs(e.joint(i, j) - a.total(i, j)) < 5 * e.stderr_joint(i, j));
    }

    // Thread count does not change a single bit.
    const EmpiricalCorrelation t3 = accumulate(s, h, h, 1000, 11, 3);
    const EmpiricalCorrelation t1 = accumulate(s, h, h, 1000, 11, 1);
    CHECK(t3.joint == t1.joint);
    CHECK(t3.mean_i1 == t1.mean_i1);
    CHECK(t3.stderr_joint == t1.stderr_joint);
    // Different seeds give different estimates.
    CHECK_FALSE(accumulate(s, h, h, 1000, 12, 1).joint == t1.joint);

    // A single realization passes straight through with undefined errors.
    const EmpiricalCorrelation one = accumulate(s, h, h, 1, 11, 1);
    const std::vector<double> i0 = propagate(h, draw_realization(s, grid, 11, 0));
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(one.mean_i1(i) == i0[static_cast<std::size_t>(i)]);
        CHECK(std::isnan(one.stderr_joint(i, 0)));
    }

    CHECK_THROWS_AS(accumulate(s, h, h, 0, 11), Error);
    SpectrumProfile w = s;
    w.kind = SpectrumKind::BiphotonAmplitude;
    CHECK_THROWS_AS(accumulate(w, h, h, 10, 11), Error);
    const TransferMap other = closed_form_s1_arm1(free_arm(0.3, k), make_grid(32, 4.0));
    CHECK_THROWS_AS(accumulate(s, h, other, 10, 11), Error);
}

TEST_CASE("fourth-order gaussian moment") {
    const Grid1D grid = make_grid(32, 2.0);
    const SpectrumProfile s = sample_spectrum(FlatSpectrum{}, grid);
    // Paired in both ways, paired one way, and unpaired.
    const MomentReport both = verify_gaussian_moment(s, grid, 20000, {10, 10, 10, 10}, 3);
    CHECK(both.prediction == doctest::Approx(2 * grid.dq() * grid.dq()));
    CHECK(both.sigmas() < 5);
    const MomentReport pair = verify_gaussian_moment(s, grid, 20000, {10, 12, 12, 10}, 3);
    CHECK(pair.prediction == doctest::Approx(grid.dq() * grid.dq()));
    CHECK(pair.sigmas() < 5);
    const MomentReport none = verify_gaussian_moment(s, grid, 20000, {10, 12, 13, 11}, 3);
    CHECK(none.prediction == 0.0);
    CHECK(none.sigmas() < 5);
    CHECK_THROWS_AS(verify_gaussian_moment(s, grid, 1, {1, 1, 1, 1}, 3), Error);
    CHECK_THROWS_AS(verify_gaussian_moment(s, grid, 10, {99, 1, 1, 1}, 3), Error);
}
