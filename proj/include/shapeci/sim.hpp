#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "shapeci/regression.hpp"
#include "shapeci/rkd.hpp"

namespace shapeci {

/// True kink effect of the simulation design.
inline constexpr double kDgpTheta = 0.5;

/// Treatment schedule of the design: T(x) = 0.5 x for x < 0, else 0.
KinkSchedule dgp_schedule();

/// Outcome of the design given running variable and error:
/// y = 0.5 T(x) - 0.1 x + u.
double dgp_outcome(double x, double u);

/// n draws of (x, y) with (x, u) bivariate normal: mean 0, Var(x) = 1,
/// Cov(x, u) = 0.1, Var(u) = 0.1. Full sample, not windowed.
Dataset dgp_sample(std::size_t n, std::uint64_t seed);

struct SimDesign {
    std::size_t n = 1000;
    std::size_t reps = 2000;
    RkdConfig rkd;                ///< rkd.seed is the base seed of the study
    std::size_t threads = 0;      ///< 0: SHAPECI_THREADS or hardware concurrency

    void validate() const;
};

/// Seeds of replication `rep`: data and bootstrap streams are derived from
/// the base seed through SplitMix64 so distinct replications never share a
/// stream; both shape modes of a replication share them.
std::uint64_t replication_data_seed(std::uint64_t base, std::size_t rep) noexcept;
std::uint64_t replication_bootstrap_seed(std::uint64_t base, std::size_t rep) noexcept;

/// Outcome of one mode in one replication.
struct ReplicationOutcome {
    LpStatus status = LpStatus::Optimal;
    bool failed = false; ///< a numerical error aborted the replication
    double lower = 0.0;
    double upper = 0.0;

    bool usable() const noexcept { return !failed && status == LpStatus::Optimal; }
    bool covers(double theta) const noexcept { return usable() && lower <= theta && theta <= upper; }
};

/// outcomes[rep][mode index] in the order of design.rkd.modes.
using ReplicationTable = std::vector<std::vector<ReplicationOutcome>>;

struct SimResult {
    std::size_t k = 0;
    std::size_t n = 0;
    ShapeMode mode = ShapeMode::None;
    double avg_length = 0.0;
    double coverage = 0.0;
    std::size_t reps = 0;
    std::size_t infeasible_count = 0;
    std::size_t failed_count = 0;
};

/// Runs every replication (in parallel when threads > 1).
ReplicationTable simulate_replications(const SimDesign& design);

/// Per-mode means over usable replications, summed in replication order.
std::vector<SimResult> summarize(const SimDesign& design, const ReplicationTable& table);

/// simulate_replications followed by summarize.
std::vector<SimResult> run_study(const SimDesign& design);

/// CSV with header k,n,shape_mode,avg_length,coverage,reps,infeasible_count.
void write_sim_csv(std::ostream& out, std::span<const SimResult> results);

/// Thread count from SHAPECI_THREADS, else hardware concurrency (>= 1).
std::size_t default_thread_count();

} // namespace shapeci
