#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>

#include "shapeci/linalg.hpp"

namespace shapeci {

enum class Sense { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus status) noexcept;

/// optimize c^T beta over free beta subject to g beta <= h.
struct LpProblem {
    Sense sense = Sense::Minimize;
    Vector c;
    Matrix g;
    Vector h;

    std::size_t num_vars() const noexcept { return c.size(); }
    std::size_t num_constraints() const noexcept { return g.rows(); }

    /// Throws DomainError on inconsistent dimensions or non-finite entries.
    void validate() const;
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vector beta;             ///< optimizer when status is Optimal
    double objective = 0.0;  ///< c^T beta when status is Optimal
    double infeasibility = 0.0; ///< phase-1 residual (row-normalized units) when Infeasible
    std::size_t pivots = 0;
};

struct LpOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-9;
};

/// Two-phase primal simplex on the standard form obtained by writing
/// beta = beta+ - beta- and adding one slack per row. Rows are normalized
/// to unit max-abs coefficient first. Pricing is Dantzig's rule, switching
/// to Bland's rule after m + k consecutive degenerate pivots. Throws
/// IterationLimit after 10000 (m + k) pivots.
LpSolution solve(const LpProblem& problem, const LpOptions& options = {});

/// Text format: a header line `min|max k m`, one line with the k objective
/// coefficients, then m lines holding a row of g followed by its h entry.
/// Blank lines and lines starting with '#' are ignored. Throws InputError
/// naming the offending line.
LpProblem parse_lp_problem(std::istream& in);

/// Status line; on success also `objective <value>` and `beta <values...>`.
void write_lp_solution(std::ostream& out, const LpSolution& solution);

} // namespace shapeci
