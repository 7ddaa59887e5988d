#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fq/error.hpp"
#include "fq/quantize_core.hpp"

namespace fq {

enum class OptimizerMethod { lloyd, sgd };
enum class EmptyCellPolicy { split_largest, resample };

std::string to_string(OptimizerMethod m);
std::string to_string(EmptyCellPolicy p);

struct OptimizerConfig {
    OptimizerMethod method = OptimizerMethod::lloyd;
    std::size_t max_iters = 200;
    /// Lloyd: stop when the relative distortion improvement falls below tol.
    /// SGD: stop when the relative stationarity residual falls below tol.
    double tol = 1e-8;
    /// Step schedule c0 / (1 + decay k). c0 <= 0 selects 0.1 S^(2-r), S the
    /// initial quantization error; decay < 0 selects 1/N.
    double sgd_c0 = 0.0;
    double sgd_decay = -1.0;
    /// SGD iterations between distortion/residual evaluations; 0 selects N.
    std::size_t sgd_eval_interval = 0;
    EmptyCellPolicy empty_cell_policy = EmptyCellPolicy::split_largest;
    std::uint64_t seed = 0;

    void validate() const;
};

struct OptimizeTrace {
    std::vector<std::size_t> iteration;
    std::vector<double> distortion;
    std::vector<double> residual;  // relative stationarity residual at each record
    double exit_residual = 0.0;    // relative, see StationarityReport::relative_max_residual
    std::size_t iterations = 0;
    std::size_t empty_cell_events = 0;
    std::string exit_reason;
};

struct OptimizeResult {
    Codebook codebook;
    OptimizeTrace trace;
};

/// Raised when SGD distortion exceeds 10x its initial value.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, OptimizeTrace trace)
        : Error(ErrorCode::optimization, what), trace_(std::move(trace)) {}
    const OptimizeTrace& trace() const { return trace_; }

private:
    OptimizeTrace trace_;
};

/**
 * One Lloyd fixed-point update for p = 2, r >= 2: each atom becomes the mean
 * of its cell weighted by ||x - a_i||^(r-2). Empty cells are repaired per
 * `policy` before the update; `empty_events` receives the repair count.
 */
Codebook lloyd_step(const Codebook& codebook, const PathSample& sample, double r,
                    EmptyCellPolicy policy = EmptyCellPolicy::split_largest,
                    std::uint64_t seed = 0, std::size_t* empty_events = nullptr);

OptimizeResult lloyd_run(const OptimizerConfig& config, const Codebook& init,
                         const PathSample& sample, double r);

/**
 * Competitive-learning stochastic gradient descent on the empirical
 * distortion: draw x, take its nearest atom a, and move
 * a <- a - step_k r ||x - a||^(r-1) grad||.||_p(a - x).
 */
OptimizeResult sgd_run(const OptimizerConfig& config, const Codebook& init,
                       const PathSample& sample, double r);

/// Lloyd when p = 2 and r >= 2 and config asks for it, SGD otherwise.
OptimizeResult optimize(const OptimizerConfig& config, const Codebook& init,
                        const PathSample& sample, double r);

/**
 * Differential of the empirical distortion at an admissible codebook:
 * entry i is r E(1_{C_i \ {a_i}}(X) ||X - a_i||^(r-1) grad||.||(a_i - X)),
 * a function on the grid paired with directions via dual_pairing.
 */
std::vector<Path> distortion_gradient(const Codebook& codebook, const PathSample& sample,
                                      double r);

/// Sample mean path.
Path sample_mean(const PathSample& sample);

/**
 * Codebooks of sizes 1..n: optimize size k, then add a copy of the atom with
 * the largest distortion share nudged towards a random path of its cell.
 * `traces`, when given, receives the optimizer trace of every size.
 */
std::vector<Codebook> splitting_ladder(const PathSample& sample, const DiscretePathSpace& space,
                                       std::size_t n, double r, std::uint64_t seed,
                                       const OptimizerConfig& config = {},
                                       std::vector<OptimizeTrace>* traces = nullptr);

Codebook splitting_init(const PathSample& sample, const DiscretePathSpace& space,
                        std::size_t n, double r, std::uint64_t seed,
                        const OptimizerConfig& config = {});

inline constexpr std::size_t kDefaultProductCap = 4096;

/// Cartesian product of d one-dimensional codebooks on a shared grid; the
/// last coordinate varies fastest.
Codebook product_quantizer(std::span<const Codebook> marginals,
                           std::size_t cap = kDefaultProductCap);

}  // namespace fq
