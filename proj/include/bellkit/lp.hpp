#pragma once

// Exact rational linear programming.
//
// solve() runs a two-phase tableau simplex over GMP rationals and returns the
// optimum together with a dual certificate; verify_certificate() re-checks a
// claimed optimum from the program alone. Sign conventions for the dual
// vector y (one multiplier per row) and reduced costs d = c - A^T y:
//
//   maximize:  y_i >= 0 on <= rows, d_j <= 0 on bounded variables
//   minimize:  y_i <= 0 on <= rows, d_j >= 0 on bounded variables
//
// with y free on equality rows and d_j = 0 on free variables. The dual
// objective is b^T y + sum_j l_j d_j and equals the optimal value.

#include "bellkit/constraints.hpp"
#include "bellkit/rational.hpp"

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bellkit {

enum class Sense { Maximize, Minimize };
enum class RowType { Equal, LessEqual };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
    switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

struct LpRow {
    std::vector<SparseTerm> terms;
    RowType type = RowType::Equal;
    Rational rhs;
    std::string label;
};

class LinearProgram {
public:
    explicit LinearProgram(Sense sense = Sense::Maximize) : sense_(sense) {}

    /// Adds a variable with lower bound `lower` (nullopt = free) and returns its index.
    std::size_t add_variable(std::string label, std::optional<Rational> lower = Rational(0), Rational cost = 0) {
        labels_.push_back(std::move(label));
        lower_.push_back(std::move(lower));
        cost_.push_back(std::move(cost));
        return labels_.size() - 1;
    }

    /// Adds `count` nonnegative variables labeled prefix[0..count) and returns the first index.
    std::size_t add_variables(std::size_t count, const std::string& prefix) {
        const std::size_t first = labels_.size();
        for (std::size_t i = 0; i < count; ++i) add_variable(prefix + "[" + std::to_string(i) + "]");
        return first;
    }

    void set_cost(std::size_t var, Rational c) { cost_.at(var) = std::move(c); }
    void set_sense(Sense s) { sense_ = s; }

    std::size_t add_row(std::vector<SparseTerm> terms, RowType type, Rational rhs, std::string label) {
        for (const auto& t : terms)
            if (t.column >= labels_.size()) throw StructuralError("LP row \"" + label + "\" refers to an unknown variable");
        rows_.push_back({std::move(terms), type, std::move(rhs), std::move(label)});
        return rows_.size() - 1;
    }

    /// Copies every row of `sys`, shifting its columns by `offset`.
    void add_system(const LinearConstraintSystem& sys, std::size_t offset = 0) {
        auto shifted = [offset](const LinearRow& r) {
            std::vector<SparseTerm> t;
            t.reserve(r.terms.size());
            for (const auto& term : r.terms) t.push_back({term.column + offset, term.coeff});
            return t;
        };
        for (const auto& r : sys.equalities()) add_row(shifted(r), RowType::Equal, r.rhs, r.label);
        for (const auto& r : sys.inequalities()) add_row(shifted(r), RowType::LessEqual, r.rhs, r.label);
    }

    Sense sense() const { return sense_; }
    std::size_t num_variables() const { return labels_.size(); }
    std::size_t num_rows() const { return rows_.size(); }
    const std::vector<LpRow>& rows() const { return rows_; }
    const RationalVector& costs() const { return cost_; }
    const std::vector<std::optional<Rational>>& lower_bounds() const { return lower_; }
    const std::vector<std::string>& variable_labels() const { return labels_; }

    Rational objective(const RationalVector& x) const { return dot(cost_, x); }

    /// Human-readable dump for debugging; not a stable format.
    void print(std::ostream& os) const {
        os << (sense_ == Sense::Maximize ? "maximize" : "minimize");
        for (std::size_t j = 0; j < cost_.size(); ++j)
            if (sgn(cost_[j]) != 0) os << ' ' << (sgn(cost_[j]) > 0 ? "+" : "") << cost_[j].get_str() << '*' << labels_[j];
        os << "\nsubject to\n";
        for (const auto& r : rows_) {
            os << "  " << r.label << ':';
            for (const auto& t : r.terms) os << ' ' << (sgn(t.coeff) > 0 ? "+" : "") << t.coeff.get_str() << '*' << labels_[t.column];
            os << (r.type == RowType::Equal ? " = " : " <= ") << r.rhs.get_str() << '\n';
        }
        os << "bounds\n";
        for (std::size_t j = 0; j < labels_.size(); ++j)
            if (!lower_[j]) os << "  " << labels_[j] << " free\n";
            else if (sgn(*lower_[j]) != 0) os << "  " << labels_[j] << " >= " << lower_[j]->get_str() << '\n';
    }

private:
    Sense sense_;
    std::vector<std::string> labels_;
    std::vector<std::optional<Rational>> lower_;
    RationalVector cost_;
    std::vector<LpRow> rows_;
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Rational value;
    RationalVector primal;
    RationalVector dual;   // optimal: one multiplier per row
    RationalVector farkas; // infeasible: row multipliers proving emptiness
    std::size_t iterations = 0;
};

/// Reduced costs c - A^T y.
inline RationalVector reduced_costs(const LinearProgram& lp, const RationalVector& y) {
    RationalVector d = lp.costs();
    for (std::size_t i = 0; i < lp.num_rows(); ++i)
        if (sgn(y[i]) != 0)
            for (const auto& t : lp.rows()[i].terms) d[t.column] -= t.coeff * y[i];
    return d;
}

/// True iff x satisfies every row and bound exactly.
inline bool primal_feasible(const LinearProgram& lp, const RationalVector& x) {
    if (x.size() != lp.num_variables()) return false;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (lp.lower_bounds()[j] && x[j] < *lp.lower_bounds()[j]) return false;
    for (const auto& r : lp.rows()) {
        Rational lhs = 0;
        for (const auto& t : r.terms) lhs += t.coeff * x[t.column];
        if (r.type == RowType::Equal ? lhs != r.rhs : lhs > r.rhs) return false;
    }
    return true;
}

/// Dual objective b^T y + sum_j l_j d_j, or nullopt when y violates the
/// sign conditions of the program's sense.
inline std::optional<Rational> dual_objective(const LinearProgram& lp, const RationalVector& y) {
    if (y.size() != lp.num_rows()) return std::nullopt;
    const int orient = lp.sense() == Sense::Maximize ? 1 : -1;
    for (std::size_t i = 0; i < lp.num_rows(); ++i)
        if (lp.rows()[i].type == RowType::LessEqual && orient * sgn(y[i]) < 0) return std::nullopt;
    const RationalVector d = reduced_costs(lp, y);
    Rational value = 0;
    for (std::size_t i = 0; i < lp.num_rows(); ++i) value += lp.rows()[i].rhs * y[i];
    for (std::size_t j = 0; j < d.size(); ++j) {
        const auto& l = lp.lower_bounds()[j];
        if (!l) {
            if (sgn(d[j]) != 0) return std::nullopt;
        } else {
            if (orient * sgn(d[j]) > 0) return std::nullopt;
            value += *l * d[j];
        }
    }
    return value;
}

/// Re-checks an optimal solution from the program alone: exact primal
/// feasibility, dual feasibility, and equality of the claimed value with both
/// the primal and the dual objective.
inline bool verify_certificate(const LinearProgram& lp, const LpSolution& sol) {
    if (sol.status != LpStatus::Optimal) return false;
    if (!primal_feasible(lp, sol.primal)) return false;
    if (lp.objective(sol.primal) != sol.value) return false;
    const auto dual_value = dual_objective(lp, sol.dual);
    return dual_value && *dual_value == sol.value;
}

/// Checks a Farkas certificate y for emptiness of the feasible set:
/// y_i >= 0 on <= rows, (A^T y)_j >= 0 on bounded variables, = 0 on free ones,
/// and b^T y - sum_j l_j (A^T y)_j < 0.
inline bool verify_infeasibility(const LinearProgram& lp, const RationalVector& y) {
    if (y.size() != lp.num_rows()) return false;
    RationalVector aty(lp.num_variables());
    Rational rhs = 0;
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        const auto& r = lp.rows()[i];
        if (r.type == RowType::LessEqual && sgn(y[i]) < 0) return false;
        if (sgn(y[i]) == 0) continue;
        rhs += r.rhs * y[i];
        for (const auto& t : r.terms) aty[t.column] += t.coeff * y[i];
    }
    for (std::size_t j = 0; j < aty.size(); ++j) {
        const auto& l = lp.lower_bounds()[j];
        if (!l) {
            if (sgn(aty[j]) != 0) return false;
        } else {
            if (sgn(aty[j]) < 0) return false;
            rhs -= *l * aty[j];
        }
    }
    return sgn(rhs) < 0;
}

enum class PivotRule {
    Bland,        // lowest-index improving column, lowest-index leaving variable
    DantzigBland, // largest reduced cost; Bland's rule while pivots are degenerate
};

struct SolveOptions {
    PivotRule rule = PivotRule::DantzigBland;
    std::size_t max_iterations = 0; // 0 = unlimited
};

class IterationLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Dense simplex tableau over the standard-form program
///     max c'x'  s.t.  A'x' = b',  x' >= 0,  b' >= 0.
/// Columns: structural | slacks | artificials; the last entry of each row is
/// the right-hand side. Every row starts with its own unit column in the
/// basis (a slack or an artificial), which lets the final reduced costs of
/// those columns double as the dual vector.
class Tableau {
public:
    Tableau(const LinearProgram& lp, PivotRule rule) : lp_(lp), rule_(rule) { build(); }

    LpSolution run(std::size_t max_iterations) {
        max_iterations_ = max_iterations;
        LpSolution sol;

        // Phase 1: maximize -sum(artificials).
        RationalVector phase1_cost(width_, 0);
        for (std::size_t j = first_artificial_; j < width_; ++j) phase1_cost[j] = -1;
        price(phase1_cost);
        if (!optimize()) throw std::logic_error("phase 1 cannot be unbounded");
        if (sgn(objective_value_) < 0) {
            sol.status = LpStatus::Infeasible;
            sol.farkas = row_multipliers(phase1_cost);
            sol.iterations = iterations_;
            return sol;
        }
        drive_out_artificials();

        // Phase 2 over the true objective; artificials stay out of the basis.
        RationalVector cost(width_, 0);
        for (std::size_t j = 0; j < structural_; ++j) cost[j] = orient_ * column_cost_[j];
        price(cost);
        if (!optimize()) {
            sol.status = LpStatus::Unbounded;
            sol.iterations = iterations_;
            return sol;
        }

        sol.status = LpStatus::Optimal;
        sol.primal = primal();
        sol.value = lp_.objective(sol.primal);
        sol.dual = row_multipliers(cost);
        if (orient_ < 0)
            for (auto& y : sol.dual) y = -y;
        sol.iterations = iterations_;
        return sol;
    }

private:
    struct ColumnOrigin {
        std::size_t var;
        int sign; // +1: x = l + x', -1: negative part of a free variable
    };

    void build() {
        orient_ = lp_.sense() == Sense::Maximize ? 1 : -1;
        const std::size_t n = lp_.num_variables();
        rows_ = lp_.num_rows();
        for (std::size_t j = 0; j < n; ++j) {
            var_first_column_.push_back(origins_.size());
            origins_.push_back({j, 1});
            column_cost_.push_back(lp_.costs()[j]);
            if (!lp_.lower_bounds()[j]) {
                origins_.push_back({j, -1});
                column_cost_.push_back(-lp_.costs()[j]);
            }
        }
        structural_ = origins_.size();

        std::size_t slacks = 0;
        for (const auto& r : lp_.rows())
            if (r.type == RowType::LessEqual) ++slacks;
        first_artificial_ = structural_ + slacks;

        // rhs after shifting bounded variables by their lower bound
        RationalVector rhs(rows_);
        row_sign_.assign(rows_, 1);
        std::size_t artificials = 0;
        for (std::size_t i = 0; i < rows_; ++i) {
            const auto& r = lp_.rows()[i];
            rhs[i] = r.rhs;
            for (const auto& t : r.terms)
                if (const auto& l = lp_.lower_bounds()[t.column]; l && sgn(*l) != 0) rhs[i] -= t.coeff * *l;
            if (sgn(rhs[i]) < 0) row_sign_[i] = -1;
            if (r.type == RowType::Equal || row_sign_[i] < 0) ++artificials;
        }
        width_ = first_artificial_ + artificials;

        tab_.assign(rows_, RationalVector(width_ + 1));
        basis_.assign(rows_, 0);
        unit_column_.assign(rows_, 0);
        std::size_t next_slack = structural_, next_art = first_artificial_;
        for (std::size_t i = 0; i < rows_; ++i) {
            const auto& r = lp_.rows()[i];
            auto& row = tab_[i];
            for (const auto& t : r.terms) {
                const std::size_t c = var_first_column_[t.column];
                row[c] += row_sign_[i] * t.coeff;
                if (!lp_.lower_bounds()[t.column]) row[c + 1] -= row_sign_[i] * t.coeff;
            }
            row[width_] = row_sign_[i] * rhs[i];
            std::optional<std::size_t> slack;
            if (r.type == RowType::LessEqual) {
                slack = next_slack++;
                row[*slack] = row_sign_[i];
            }
            if (slack && row_sign_[i] > 0) {
                unit_column_[i] = *slack;
            } else {
                unit_column_[i] = next_art;
                row[next_art++] = 1;
            }
            basis_[i] = unit_column_[i];
        }
    }

    /// Recomputes reduced costs and objective value for `cost` at the current basis.
    void price(const RationalVector& cost) {
        reduced_.assign(width_, 0);
        for (std::size_t j = 0; j < width_; ++j) reduced_[j] = cost[j];
        objective_value_ = 0;
        for (std::size_t i = 0; i < rows_; ++i) {
            const Rational& cb = cost[basis_[i]];
            if (sgn(cb) == 0) continue;
            const auto& row = tab_[i];
            for (std::size_t j = 0; j < width_; ++j)
                if (sgn(row[j]) != 0) reduced_[j] -= cb * row[j];
            objective_value_ += cb * row[width_];
        }
    }

    bool may_enter(std::size_t j) const { return j < first_artificial_; }

    std::optional<std::size_t> choose_entering(bool bland) const {
        std::optional<std::size_t> best;
        for (std::size_t j = 0; j < first_artificial_; ++j) {
            if (sgn(reduced_[j]) <= 0) continue;
            if (bland) return j;
            if (!best || reduced_[j] > reduced_[*best]) best = j;
        }
        return best;
    }

    std::optional<std::size_t> choose_leaving(std::size_t col) const {
        std::optional<std::size_t> best;
        Rational best_ratio, ratio;
        for (std::size_t i = 0; i < rows_; ++i) {
            const Rational& a = tab_[i][col];
            if (sgn(a) <= 0) continue;
            ratio = tab_[i][width_] / a;
            if (!best || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[*best])) {
                best = i;
                best_ratio = ratio;
            }
        }
        return best;
    }

    /// Returns false when the objective is unbounded.
    bool optimize() {
        bool degenerate_mode = rule_ == PivotRule::Bland;
        while (true) {
            const auto enter = choose_entering(degenerate_mode);
            if (!enter) return true;
            const auto leave = choose_leaving(*enter);
            if (!leave) return false;
            if (max_iterations_ && iterations_ >= max_iterations_)
                throw IterationLimit("simplex iteration limit reached (" + std::to_string(max_iterations_) + ")");
            const bool degenerate = sgn(tab_[*leave][width_]) == 0;
            pivot(*leave, *enter);
            if (rule_ == PivotRule::DantzigBland) degenerate_mode = degenerate;
        }
    }

    void pivot(std::size_t pr, std::size_t pc) {
        ++iterations_;
        auto& prow = tab_[pr];
        const Rational inv = 1 / prow[pc];
        nonzero_.clear();
        for (std::size_t j = 0; j <= width_; ++j)
            if (sgn(prow[j]) != 0) {
                prow[j] *= inv;
                nonzero_.push_back(j);
            }
        Rational factor, tmp;
        auto eliminate = [&](RationalVector& row) {
            factor = row[pc];
            for (auto j : nonzero_) {
                mpq_mul(tmp.get_mpq_t(), factor.get_mpq_t(), prow[j].get_mpq_t());
                mpq_sub(row[j].get_mpq_t(), row[j].get_mpq_t(), tmp.get_mpq_t());
            }
        };
        for (std::size_t i = 0; i < rows_; ++i)
            if (i != pr && sgn(tab_[i][pc]) != 0) eliminate(tab_[i]);

        // objective row: reduced costs live in reduced_, the value in objective_value_
        if (sgn(reduced_[pc]) != 0) {
            factor = reduced_[pc];
            for (auto j : nonzero_) {
                if (j == width_) objective_value_ += factor * prow[j];
                else reduced_[j] -= factor * prow[j];
            }
        }
        basis_[pr] = pc;
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < rows_; ++i) {
            if (basis_[i] < first_artificial_) continue;
            for (std::size_t j = 0; j < first_artificial_; ++j)
                if (sgn(tab_[i][j]) != 0) {
                    pivot(i, j);
                    break;
                }
            // otherwise the row is redundant: its artificial stays basic at zero
        }
    }

    /// Row multipliers of the original program for standard-form cost vector
    /// `cost`, read off the reduced costs of each row's initial unit column.
    RationalVector row_multipliers(const RationalVector& cost) const {
        RationalVector y(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            const std::size_t u = unit_column_[i];
            y[i] = row_sign_[i] * (cost[u] - reduced_[u]);
        }
        return y;
    }

    RationalVector primal() const {
        RationalVector xs(structural_);
        for (std::size_t i = 0; i < rows_; ++i)
            if (basis_[i] < structural_) xs[basis_[i]] = tab_[i][width_];
        RationalVector x(lp_.num_variables());
        for (std::size_t c = 0; c < structural_; ++c) {
            const auto& o = origins_[c];
            if (o.sign > 0) x[o.var] += xs[c];
            else x[o.var] -= xs[c];
        }
        for (std::size_t j = 0; j < x.size(); ++j)
            if (const auto& l = lp_.lower_bounds()[j]) x[j] += *l;
        return x;
    }

    const LinearProgram& lp_;
    PivotRule rule_;
    int orient_ = 1;
    std::size_t rows_ = 0;
    std::size_t structural_ = 0;
    std::size_t first_artificial_ = 0;
    std::size_t width_ = 0;
    std::vector<ColumnOrigin> origins_;
    std::vector<std::size_t> var_first_column_;
    RationalVector column_cost_;
    std::vector<int> row_sign_;
    std::vector<RationalVector> tab_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> unit_column_;
    RationalVector reduced_;
    Rational objective_value_;
    std::vector<std::size_t> nonzero_;
    std::size_t iterations_ = 0;
    std::size_t max_iterations_ = 0;
};

} // namespace detail

/// Exact optimum with primal point and dual certificate. Deterministic for a
/// fixed program and options.
inline LpSolution solve(const LinearProgram& lp, const SolveOptions& options = {}) {
    detail::Tableau t(lp, options.rule);
    return t.run(options.max_iterations);
}

} // namespace bellkit
