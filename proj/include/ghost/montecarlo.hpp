#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ghost/fieldgrid.hpp"
#include "ghost/kernels.hpp"

namespace ghost {

// Counter-based generator: the n-th draw of (seed, stream) is a pure function
// of (seed, stream, n), so realizations can be produced in any order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    double next_uniform();  // (0, 1)
    double next_normal();   // standard normal, Box-Muller

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Spectral amplitudes F(q_j), circular Gaussian with <|F|^2> = S(q_j) dq.
struct Realization {
    std::vector<cplx> amplitudes;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

Realization draw_realization(const SpectrumProfile& s, const Grid1D& grid, std::uint64_t seed, std::uint64_t stream);

// I(x_i) = |sum_j h(x_i, -q_j) F(q_j)|^2
std::vector<double> propagate(const TransferMap& h, const Realization& r);

struct EmpiricalCorrelation {
    Eigen::VectorXd mean_i1;
    Eigen::VectorXd mean_i2;
    Eigen::MatrixXd joint;          // <I1 I2>
    Eigen::VectorXd stderr_i1;
    Eigen::VectorXd stderr_i2;
    Eigen::MatrixXd stderr_joint;   // NaN when only one realization
    std::size_t realizations = 0;
    std::uint64_t seed = 0;
    std::vector<double> x1;
    std::vector<double> x2;

    // <I1 I2> - <I1><I2>, the estimator of the correlation term.
    Eigen::MatrixXd covariance() const;
};

// Both arms see the same realization of the one thermal beam. Realization m
// uses stream m; partial sums are reduced in fixed block order, so the result
// does not depend on the number of worker threads.
EmpiricalCorrelation accumulate(const SpectrumProfile& s, const TransferMap& h1, const TransferMap& h2,
                                std::size_t realizations, std::uint64_t seed, unsigned threads = 0);

struct MomentProbe {
    std::size_t q1 = 0, q2 = 0, q2p = 0, q1p = 0;  // grid indices
};

struct MomentReport {
    cplx empirical;
    double prediction = 0.0;
    double standard_error = 0.0;
    std::size_t realizations = 0;

    double sigmas() const;  // |empirical - prediction| / standard_error
};

// Empirical <F*(q1) F*(q2) F(q2') F(q1')> against
// S(q1) S(q2) dq^2 [d(q1,q1') d(q2,q2') + d(q1,q2') d(q2,q1')].
MomentReport verify_gaussian_moment(const SpectrumProfile& s, const Grid1D& grid, std::size_t realizations,
                                    const MomentProbe& probe, std::uint64_t seed);

}  // namespace ghost
