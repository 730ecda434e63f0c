#include "shapeci/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <string>
#include <thread>

#include "shapeci/errors.hpp"
#include "shapeci/format.hpp"
#include "shapeci/rng.hpp"

namespace shapeci {

KinkSchedule dgp_schedule() { return KinkSchedule::piecewise(0.5, 0.0, 0.0); }

double dgp_outcome(double x, double u) {
    const double t = x < 0.0 ? 0.5 * x : 0.0;
    return 0.5 * t - 0.1 * x + u;
}

Dataset dgp_sample(std::size_t n, std::uint64_t seed) {
    // Cholesky factor of [[1, 0.1], [0.1, 0.1]].
    constexpr double kLoad = 0.1;
    const double resid_sd = std::sqrt(0.1 - kLoad * kLoad);
    Engine eng(seed);
    Dataset d;
    d.x.resize(n);
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [z1, z2] = standard_normal_pair(eng);
        const double x = z1;
        const double u = kLoad * z1 + resid_sd * z2;
        d.x[i] = x;
        d.y[i] = dgp_outcome(x, u);
    }
    return d;
}

void SimDesign::validate() const {
    if (n < 1) {
        throw DomainError("simulation: n must be at least 1");
    }
    if (reps < 1) {
        throw DomainError("simulation: reps must be at least 1");
    }
    rkd.validate();
}

std::uint64_t replication_data_seed(std::uint64_t base, std::size_t rep) noexcept {
    return mix_seed(base ^ (2 * static_cast<std::uint64_t>(rep)));
}

std::uint64_t replication_bootstrap_seed(std::uint64_t base, std::size_t rep) noexcept {
    return mix_seed(base ^ (2 * static_cast<std::uint64_t>(rep) + 1));
}

std::size_t default_thread_count() {
    if (const char* env = std::getenv("SHAPECI_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

namespace {

std::vector<ReplicationOutcome> one_replication(const SimDesign& design, std::size_t rep) {
    const Dataset data = dgp_sample(design.n, replication_data_seed(design.rkd.seed, rep));
    RkdConfig cfg = design.rkd;
    cfg.seed = replication_bootstrap_seed(design.rkd.seed, rep);

    std::vector<ReplicationOutcome> out(cfg.modes.size());
    try {
        const auto reports = run_rkd(data, dgp_schedule(), cfg);
        for (std::size_t m = 0; m < reports.size(); ++m) {
            out[m].status = reports[m].ci.status;
            out[m].lower = reports[m].ci.lower;
            out[m].upper = reports[m].ci.upper;
        }
    } catch (const Error&) {
        for (auto& o : out) {
            o.failed = true;
        }
    }
    return out;
}

} // namespace

ReplicationTable simulate_replications(const SimDesign& design) {
    design.validate();
    ReplicationTable table(design.reps);
    const std::size_t threads = std::min(design.reps, design.threads > 0 ? design.threads : default_thread_count());
    if (threads <= 1) {
        for (std::size_t rep = 0; rep < design.reps; ++rep) {
            table[rep] = one_replication(design, rep);
        }
        return table;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t rep = next++; rep < design.reps; rep = next++) {
                table[rep] = one_replication(design, rep);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    return table;
}

std::vector<SimResult> summarize(const SimDesign& design, const ReplicationTable& table) {
    std::vector<SimResult> results;
    for (std::size_t m = 0; m < design.rkd.modes.size(); ++m) {
        SimResult r;
        r.k = design.rkd.k;
        r.n = design.n;
        r.mode = design.rkd.modes[m];
        r.reps = table.size();
        double length_sum = 0.0;
        std::size_t covered = 0;
        std::size_t usable = 0;
        for (const auto& row : table) {
            const ReplicationOutcome& o = row[m];
            if (o.failed) {
                ++r.failed_count;
                continue;
            }
            if (o.status == LpStatus::Infeasible) {
                ++r.infeasible_count;
                continue;
            }
            if (!o.usable()) {
                ++r.failed_count;
                continue;
            }
            ++usable;
            length_sum += o.upper - o.lower;
            if (o.covers(kDgpTheta)) {
                ++covered;
            }
        }
        if (usable > 0) {
            r.avg_length = length_sum / static_cast<double>(usable);
            r.coverage = static_cast<double>(covered) / static_cast<double>(usable);
        } else {
            r.avg_length = std::nan("");
            r.coverage = std::nan("");
        }
        results.push_back(r);
    }
    return results;
}

std::vector<SimResult> run_study(const SimDesign& design) { return summarize(design, simulate_replications(design)); }

void write_sim_csv(std::ostream& out, std::span<const SimResult> results) {
    out << "k,n,shape_mode,avg_length,coverage,reps,infeasible_count\n";
    for (const SimResult& r : results) {
        out << r.k << ',' << r.n << ',' << to_string(r.mode) << ',' << format_double(r.avg_length) << ','
            << format_double(r.coverage) << ',' << r.reps << ',' << r.infeasible_count << '\n';
    }
}

} // namespace shapeci
