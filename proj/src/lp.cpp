#include "shapeci/lp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "shapeci/errors.hpp"
#include "shapeci/format.hpp"

namespace shapeci {

std::string_view to_string(LpStatus status) noexcept {
    switch (status) {
    case LpStatus::Optimal:
        return "optimal";
    case LpStatus::Infeasible:
        return "infeasible";
    case LpStatus::Unbounded:
        return "unbounded";
    }
    return "unknown";
}

void LpProblem::validate() const {
    if (c.empty()) {
        throw DomainError("LpProblem: need at least one variable");
    }
    if (g.rows() == 0) {
        throw DomainError("LpProblem: need at least one constraint");
    }
    if (g.cols() != c.size() || h.size() != g.rows()) {
        throw DomainError("LpProblem: dimensions of c, g, h disagree");
    }
    const bool finite = g.all_finite() && std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); }) &&
                        std::all_of(h.begin(), h.end(), [](double v) { return std::isfinite(v); });
    if (!finite) {
        throw DomainError("LpProblem: non-finite coefficient");
    }
}

namespace {

constexpr double kPivotTol = 1e-11;

// Dense simplex tableau for: minimize cost^T x, A x = b, x >= 0, b >= 0.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), a_(rows, cols + 1), basis_(rows), cost_(cols + 1) {}

    double& at(std::size_t i, std::size_t j) { return a_(i, j); }
    double at(std::size_t i, std::size_t j) const { return a_(i, j); }
    double& rhs(std::size_t i) { return a_(i, n_); }
    double rhs(std::size_t i) const { return a_(i, n_); }
    std::size_t& basic(std::size_t i) { return basis_[i]; }
    std::size_t basic(std::size_t i) const { return basis_[i]; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    // Reduced costs and objective for the given column costs and current basis.
    void price(const std::vector<double>& c) {
        for (std::size_t j = 0; j < n_; ++j) {
            cost_[j] = c[j];
        }
        cost_[n_] = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = c[basis_[i]];
            if (cb == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j <= n_; ++j) {
                cost_[j] -= cb * a_(i, j);
            }
        }
    }

    double reduced_cost(std::size_t j) const { return cost_[j]; }
    double objective() const { return -cost_[n_]; }

    void pivot(std::size_t r, std::size_t e) {
        const double p = a_(r, e);
        for (std::size_t j = 0; j <= n_; ++j) {
            a_(r, j) /= p;
        }
        a_(r, e) = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) {
                continue;
            }
            const double f = a_(i, e);
            if (f == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j <= n_; ++j) {
                a_(i, j) -= f * a_(r, j);
            }
            a_(i, e) = 0.0;
            if (a_(i, n_) < 0.0 && a_(i, n_) > -1e-12) {
                a_(i, n_) = 0.0;
            }
        }
        const double f = cost_[e];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= n_; ++j) {
                cost_[j] -= f * a_(r, j);
            }
            cost_[e] = 0.0;
        }
        basis_[r] = e;
    }

private:
    std::size_t m_;
    std::size_t n_;
    Matrix a_;
    std::vector<std::size_t> basis_;
    std::vector<double> cost_;
};

enum class PhaseResult { Optimal, Unbounded };

class SimplexRun {
public:
    SimplexRun(Tableau& t, std::vector<bool> eligible, double opt_tol, std::size_t degenerate_limit,
               std::size_t& pivots, std::size_t pivot_limit)
        : t_(t), eligible_(std::move(eligible)), opt_tol_(opt_tol), degenerate_limit_(degenerate_limit),
          pivots_(pivots), pivot_limit_(pivot_limit) {}

    PhaseResult run() {
        bool bland = false;
        std::size_t degenerate = 0;
        for (;;) {
            const auto entering = choose_entering(bland);
            if (!entering) {
                return PhaseResult::Optimal;
            }
            const std::size_t e = *entering;
            const auto leaving = choose_leaving(e);
            if (!leaving) {
                return PhaseResult::Unbounded;
            }
            const std::size_t r = *leaving;
            if (++pivots_ > pivot_limit_) {
                throw IterationLimit("lp: pivot limit exceeded");
            }
            if (t_.rhs(r) <= 1e-12) {
                if (++degenerate > degenerate_limit_) {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            t_.pivot(r, e);
        }
    }

private:
    std::optional<std::size_t> choose_entering(bool bland) const {
        std::optional<std::size_t> best;
        double best_rc = -opt_tol_;
        for (std::size_t j = 0; j < t_.cols(); ++j) {
            if (!eligible_[j]) {
                continue;
            }
            const double rc = t_.reduced_cost(j);
            if (rc < best_rc) {
                best = j;
                if (bland) {
                    break;
                }
                best_rc = rc;
            }
        }
        return best;
    }

    // Minimum ratio test; near-ties go to the smallest basic index (Bland).
    std::optional<std::size_t> choose_leaving(std::size_t e) const {
        std::optional<std::size_t> best;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t_.rows(); ++i) {
            const double a = t_.at(i, e);
            if (a <= kPivotTol) {
                continue;
            }
            const double ratio = t_.rhs(i) / a;
            if (!best || ratio < best_ratio - 1e-12) {
                best = i;
                best_ratio = ratio;
            } else if (ratio <= best_ratio + 1e-12 && t_.basic(i) < t_.basic(*best)) {
                best = i;
                best_ratio = std::min(best_ratio, ratio);
            }
        }
        return best;
    }

    Tableau& t_;
    std::vector<bool> eligible_;
    double opt_tol_;
    std::size_t degenerate_limit_;
    std::size_t& pivots_;
    std::size_t pivot_limit_;
};

LpSolution solve_minimize(const LpProblem& p, const LpOptions& opt) {
    const std::size_t k = p.num_vars();
    const std::size_t m_all = p.num_constraints();

    // Row normalization; all-zero rows are either vacuous or contradictory.
    std::vector<std::size_t> kept;
    std::vector<double> scale;
    double zero_row_violation = 0.0;
    for (std::size_t i = 0; i < m_all; ++i) {
        const double s = norm_inf(p.g.row(i));
        if (s == 0.0) {
            zero_row_violation = std::max(zero_row_violation, -p.h[i]);
            continue;
        }
        kept.push_back(i);
        scale.push_back(s);
    }
    if (zero_row_violation > opt.feasibility_tol) {
        LpSolution out;
        out.status = LpStatus::Infeasible;
        out.infeasibility = zero_row_violation;
        return out;
    }

    const std::size_t m = kept.size();
    std::size_t n_art = 0;
    for (std::size_t r = 0; r < m; ++r) {
        if (p.h[kept[r]] < 0.0) {
            ++n_art;
        }
    }
    const std::size_t slack0 = 2 * k;
    const std::size_t art0 = slack0 + m;
    const std::size_t ncols = art0 + n_art;

    Tableau t(m, ncols);
    std::size_t art = art0;
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = kept[r];
        const double rhs = p.h[i] / scale[r];
        const double sign = rhs < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double v = sign * p.g(i, j) / scale[r];
            t.at(r, j) = v;
            t.at(r, k + j) = -v;
        }
        t.at(r, slack0 + r) = sign;
        t.rhs(r) = sign * rhs;
        if (sign < 0.0) {
            t.at(r, art) = 1.0;
            t.basic(r) = art++;
        } else {
            t.basic(r) = slack0 + r;
        }
    }

    const std::size_t degenerate_limit = m + k;
    const std::size_t pivot_limit = 10000 * (m_all + k);
    LpSolution out;

    if (n_art > 0) {
        std::vector<double> phase1(ncols, 0.0);
        std::fill(phase1.begin() + static_cast<std::ptrdiff_t>(art0), phase1.end(), 1.0);
        t.price(phase1);
        SimplexRun(t, std::vector<bool>(ncols, true), opt.optimality_tol, degenerate_limit, out.pivots, pivot_limit)
            .run();
        if (t.objective() > opt.feasibility_tol) {
            out.status = LpStatus::Infeasible;
            out.infeasibility = t.objective();
            return out;
        }
        // Drive zero-level artificials out of the basis where possible.
        for (std::size_t r = 0; r < m; ++r) {
            if (t.basic(r) < art0) {
                continue;
            }
            for (std::size_t j = 0; j < art0; ++j) {
                if (std::abs(t.at(r, j)) > 1e-9) {
                    t.pivot(r, j);
                    break;
                }
            }
        }
    }

    const double cscale = norm_inf(p.c);
    std::vector<double> phase2(ncols, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        const double cj = cscale > 0.0 ? p.c[j] / cscale : 0.0;
        phase2[j] = cj;
        phase2[k + j] = -cj;
    }
    std::vector<bool> eligible(ncols, true);
    std::fill(eligible.begin() + static_cast<std::ptrdiff_t>(art0), eligible.end(), false);
    t.price(phase2);
    const PhaseResult res =
        SimplexRun(t, std::move(eligible), opt.optimality_tol, degenerate_limit, out.pivots, pivot_limit).run();
    if (res == PhaseResult::Unbounded) {
        out.status = LpStatus::Unbounded;
        return out;
    }

    Vector x(ncols, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        x[t.basic(r)] = t.rhs(r);
    }
    out.status = LpStatus::Optimal;
    out.beta.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        out.beta[j] = x[j] - x[k + j];
    }
    out.objective = dot(p.c, out.beta);
    return out;
}

} // namespace

LpSolution solve(const LpProblem& problem, const LpOptions& options) {
    problem.validate();
    if (problem.sense == Sense::Maximize) {
        LpProblem flipped = problem;
        flipped.sense = Sense::Minimize;
        for (double& v : flipped.c) {
            v = -v;
        }
        LpSolution s = solve_minimize(flipped, options);
        if (s.status == LpStatus::Optimal) {
            s.objective = -s.objective;
        }
        return s;
    }
    return solve_minimize(problem, options);
}

namespace {

// Next line that is neither blank nor a comment; false at end of input.
bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        return true;
    }
    return false;
}

std::vector<double> parse_numbers(const std::string& line, std::size_t expected, std::size_t line_no) {
    std::istringstream ss(line);
    std::vector<double> values;
    std::string token;
    while (ss >> token) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || !std::isfinite(v)) {
            throw InputError("expected a number, got '" + token + "'", line_no);
        }
        values.push_back(v);
    }
    if (values.size() != expected) {
        throw InputError("expected " + std::to_string(expected) + " numbers, got " + std::to_string(values.size()),
                         line_no);
    }
    return values;
}

} // namespace

LpProblem parse_lp_problem(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!next_content_line(in, line, line_no)) {
        throw InputError("empty LP problem");
    }
    std::istringstream header(line);
    std::string sense;
    long long k = 0;
    long long m = 0;
    std::string extra;
    if (!(header >> sense >> k >> m) || (header >> extra) || (sense != "min" && sense != "max") || k < 1 || m < 1) {
        throw InputError("header must read 'min|max k m' with k, m >= 1", line_no);
    }

    LpProblem p;
    p.sense = sense == "min" ? Sense::Minimize : Sense::Maximize;
    const auto nk = static_cast<std::size_t>(k);
    const auto nm = static_cast<std::size_t>(m);
    if (!next_content_line(in, line, line_no)) {
        throw InputError("missing objective line", line_no + 1);
    }
    p.c = parse_numbers(line, nk, line_no);
    p.g = Matrix(nm, nk);
    p.h.resize(nm);
    for (std::size_t i = 0; i < nm; ++i) {
        if (!next_content_line(in, line, line_no)) {
            throw InputError("missing constraint row " + std::to_string(i + 1), line_no + 1);
        }
        const auto row = parse_numbers(line, nk + 1, line_no);
        std::copy(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(nk), p.g.row(i).begin());
        p.h[i] = row[nk];
    }
    if (next_content_line(in, line, line_no)) {
        throw InputError("unexpected trailing content", line_no);
    }
    return p;
}

void write_lp_solution(std::ostream& out, const LpSolution& solution) {
    out << to_string(solution.status) << '\n';
    if (solution.status != LpStatus::Optimal) {
        return;
    }
    out << "objective " << format_double(solution.objective) << '\n';
    out << "beta";
    for (double b : solution.beta) {
        out << ' ' << format_double(b);
    }
    out << '\n';
}

} // namespace shapeci
