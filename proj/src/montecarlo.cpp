#include "ghost/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "ghost/errors.hpp"

namespace ghost {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::size_t kBlock = 64;

struct Sums {
    Eigen::VectorXd i1, i1sq, i2, i2sq;
    Eigen::MatrixXd joint, jointsq;

    Sums(Eigen::Index n1, Eigen::Index n2)
        : i1(Eigen::VectorXd::Zero(n1)),
          i1sq(Eigen::VectorXd::Zero(n1)),
          i2(Eigen::VectorXd::Zero(n2)),
          i2sq(Eigen::VectorXd::Zero(n2)),
          joint(Eigen::MatrixXd::Zero(n1, n2)),
          jointsq(Eigen::MatrixXd::Zero(n1, n2)) {}

    void add(const Sums& o) {
        i1 += o.i1;
        i1sq += o.i1sq;
        i2 += o.i2;
        i2sq += o.i2sq;
        joint += o.joint;
        jointsq += o.jointsq;
    }
};

CMatrix at_negated_q(const TransferMap& m) {
    CMatrix out(m.h.rows(), m.h.cols());
    for (Eigen::Index j = 0; j < m.h.cols(); ++j)
        out.col(j) = m.h.col(static_cast<Eigen::Index>(m.grid.negated(static_cast<std::size_t>(j))));
    return out;
}

Eigen::VectorXd intensity(const CMatrix& hneg, const std::vector<cplx>& f) {
    const Eigen::Map<const Eigen::VectorXcd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
    return (hneg * fv).cwiseAbs2();
}

void check_power(const SpectrumProfile& s, const Grid1D& grid) {
    if (s.kind != SpectrumKind::PowerSpectrum)
        fail(ErrorKind::InvalidInput, "Monte-Carlo sampling needs a power spectrum, not a biphoton amplitude");
    if (s.values.size() != grid.size()) fail(ErrorKind::GridMismatch, "spectrum sampled on a different grid");
}

Eigen::VectorXd stderr_of(const Eigen::VectorXd& sum, const Eigen::VectorXd& sumsq, double m) {
    if (m < 2.0) return Eigen::VectorXd::Constant(sum.size(), std::numeric_limits<double>::quiet_NaN());
    const Eigen::VectorXd mean = sum / m;
    const Eigen::VectorXd var = ((sumsq / m - mean.cwiseAbs2()) * (m / (m - 1.0))).cwiseMax(0.0);
    return (var / m).cwiseSqrt();
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

std::uint64_t CounterRng::next_u64() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

double CounterRng::next_uniform() {
    // 53 random bits mapped into the open interval (0, 1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

Realization draw_realization(const SpectrumProfile& s, const Grid1D& grid, std::uint64_t seed, std::uint64_t stream) {
    check_power(s, grid);
    CounterRng rng(seed, stream);
    Realization r{std::vector<cplx>(grid.size()), seed, stream};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double sigma = std::sqrt(s.values[j].real() * grid.dq() / 2.0);
        const double g1 = rng.next_normal();
        const double g2 = rng.next_normal();
        r.amplitudes[j] = sigma * cplx(g1, g2);
    }
    return r;
}

std::vector<double> propagate(const TransferMap& h, const Realization& r) {
    if (r.amplitudes.size() != h.grid.size()) fail(ErrorKind::GridMismatch, "realization and transfer map grids differ");
    const Eigen::VectorXd i = intensity(at_negated_q(h), r.amplitudes);
    return {i.data(), i.data() + i.size()};
}

Eigen::MatrixXd EmpiricalCorrelation::covariance() const { return joint - mean_i1 * mean_i2.transpose(); }

EmpiricalCorrelation accumulate(const SpectrumProfile& s, const TransferMap& h1, const TransferMap& h2,
                                std::size_t realizations, std::uint64_t seed, unsigned threads) {
    if (!(h1.grid == h2.grid)) fail(ErrorKind::GridMismatch, "transfer maps use different grids");
    check_power(s, h1.grid);
    if (realizations == 0) fail(ErrorKind::InvalidInput, "need at least one realization");

    const CMatrix a = at_negated_q(h1);
    const CMatrix b = at_negated_q(h2);
    const Eigen::Index n1 = a.rows();
    const Eigen::Index n2 = b.rows();

    const std::size_t blocks = (realizations + kBlock - 1) / kBlock;
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, blocks));

    auto run_block = [&](std::size_t blk, Sums& acc) {
        acc = Sums(n1, n2);
        const std::size_t end = std::min(realizations, (blk + 1) * kBlock);
        for (std::size_t m = blk * kBlock; m < end; ++m) {
            const Realization r = draw_realization(s, h1.grid, seed, m);
            const Eigen::VectorXd i1 = intensity(a, r.amplitudes);
            const Eigen::VectorXd i2 = intensity(b, r.amplitudes);
            acc.i1 += i1;
            acc.i1sq += i1.cwiseAbs2();
            acc.i2 += i2;
            acc.i2sq += i2.cwiseAbs2();
            acc.joint.noalias() += i1 * i2.transpose();
            acc.jointsq.noalias() += i1.cwiseAbs2() * i2.cwiseAbs2().transpose();
        }
    };

    // Blocks are computed a wave at a time and folded into the total in block
    // order, so the sum is the same for any worker count.
    Sums total(n1, n2);
    std::vector<Sums> wave(workers, Sums(0, 0));
    for (std::size_t start = 0; start < blocks; start += workers) {
        const std::size_t count = std::min<std::size_t>(workers, blocks - start);
        if (count == 1) {
            run_block(start, wave[0]);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < count; ++w) pool.emplace_back([&, w] { run_block(start + w, wave[w]); });
            for (auto& t : pool) t.join();
        }
        for (std::size_t w = 0; w < count; ++w) total.add(wave[w]);
    }

    const double m = static_cast<double>(realizations);
    EmpiricalCorrelation out;
    out.realizations = realizations;
    out.seed = seed;
    out.x1 = h1.rows;
    out.x2 = h2.rows;
    out.mean_i1 = total.i1 / m;
    out.mean_i2 = total.i2 / m;
    out.joint = total.joint / m;
    out.stderr_i1 = stderr_of(total.i1, total.i1sq, m);
    out.stderr_i2 = stderr_of(total.i2, total.i2sq, m);
    if (realizations < 2) {
        out.stderr_joint = Eigen::MatrixXd::Constant(n1, n2, std::numeric_limits<double>::quiet_NaN());
    } else {
        const Eigen::ArrayXXd mean = out.joint.array();
        const Eigen::ArrayXXd var = ((total.jointsq.array() / m - mean.square()) * (m / (m - 1.0))).max(0.0);
        out.stderr_joint = (var / m).sqrt().matrix();
    }
    return out;
}

double MomentReport::sigmas() const {
    const double dev = std::abs(empirical - prediction);
    if (standard_error == 0.0) return dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return dev / standard_error;
}

MomentReport verify_gaussian_moment(const SpectrumProfile& s, const Grid1D& grid, std::size_t realizations,
                                    const MomentProbe& p, std::uint64_t seed) {
    check_power(s, grid);
    const std::size_t n = grid.size();
    if (p.q1 >= n || p.q2 >= n || p.q1p >= n || p.q2p >= n) fail(ErrorKind::InvalidInput, "probe index off the grid");
    if (realizations < 2) fail(ErrorKind::InvalidInput, "need at least two realizations");

    double sum_re = 0.0, sum_im = 0.0, sq_re = 0.0, sq_im = 0.0;
    for (std::size_t m = 0; m < realizations; ++m) {
        const Realization r = draw_realization(s, grid, seed, m);
        const auto& f = r.amplitudes;
        const cplx v = std::conj(f[p.q1]) * std::conj(f[p.q2]) * f[p.q2p] * f[p.q1p];
        sum_re += v.real();
        sum_im += v.imag();
        sq_re += v.real() * v.real();
        sq_im += v.imag() * v.imag();
    }
    const double m = static_cast<double>(realizations);
    const double mean_re = sum_re / m;
    const double mean_im = sum_im / m;
    const double var_re = std::max(0.0, (sq_re / m - mean_re * mean_re) * m / (m - 1.0));
    const double var_im = std::max(0.0, (sq_im / m - mean_im * mean_im) * m / (m - 1.0));

    const double dq = grid.dq();
    const double s1 = s.values[p.q1].real();
    const double s2 = s.values[p.q2].real();
    const double pairs = (p.q1 == p.q1p && p.q2 == p.q2p ? 1.0 : 0.0) + (p.q1 == p.q2p && p.q2 == p.q1p ? 1.0 : 0.0);

    MomentReport rep;
    rep.empirical = cplx(mean_re, mean_im);
    rep.prediction = s1 * s2 * dq * dq * pairs;
    rep.standard_error = std::sqrt((var_re + var_im) / m);
    rep.realizations = realizations;
    return rep;
}

}  // namespace ghost
