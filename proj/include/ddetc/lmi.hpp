#pragma once

#include "ddetc/linalg.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ddetc::lmi {

/// Affine matrix-valued expression  C + sum_i x_i * F_i  in the scalar
/// decision variables x of a Problem. Expressions are plain values; the
/// arithmetic below covers what the controller and trigger programs need.
class Expr {
public:
    Expr() = default;
    explicit Expr(Matrix constant);
    static Expr zero(Eigen::Index rows, Eigen::Index cols);
    static Expr variable_entry(int index, Eigen::Index rows, Eigen::Index cols, const Matrix& coef);

    Eigen::Index rows() const { return constant_.rows(); }
    Eigen::Index cols() const { return constant_.cols(); }
    const Matrix& constant() const { return constant_; }
    const std::map<int, Matrix>& terms() const { return terms_; }

    Expr transpose() const;
    Matrix evaluate(const Vector& x) const;

    Expr& operator+=(const Expr& other);
    Expr& operator-=(const Expr& other);

    friend Expr operator+(Expr a, const Expr& b) { return a += b; }
    friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
    friend Expr operator-(const Expr& a);
    friend Expr operator*(double s, const Expr& a);
    friend Expr operator*(const Matrix& L, const Expr& a);
    friend Expr operator*(const Expr& a, const Matrix& R);
    friend Expr operator+(Expr a, const Matrix& M) { return a += Expr(M); }
    friend Expr operator-(Expr a, const Matrix& M) { return a -= Expr(M); }

    // (scalar expression) * M, for 1x1 expressions.
    static Expr scalar_times(const Expr& s, const Matrix& M);

    // Block assembly; every row of blocks must share a height and every
    // column a width.
    static Expr block(const std::vector<std::vector<Expr>>& blocks);

    // Maximum |coefficient| over the constant and all variable terms.
    double data_scale() const;

private:
    Matrix constant_;
    std::map<int, Matrix> terms_;
};

enum class VariableKind { Scalar, Matrix, Symmetric };

struct VariableInfo {
    std::string name;
    VariableKind kind = VariableKind::Scalar;
    Eigen::Index rows = 1;
    Eigen::Index cols = 1;
    int offset = 0;
    int count = 1;
};

struct Constraint {
    std::string name;
    Expr F;          // F <= 0 (or F < 0 when strict)
    bool strict = false;
    double shift = 0.0;  // strict constraints are solved as F <= -shift * I
};

struct Equality {
    std::string name;
    Expr E;  // E == 0 entrywise
};

class Problem {
public:
    Expr add_scalar(const std::string& name);
    Expr add_matrix(const std::string& name, Eigen::Index rows, Eigen::Index cols);
    Expr add_symmetric(const std::string& name, Eigen::Index n);

    // F <= 0 (strict: F < 0). F must be symmetric.
    void add_nsd(const std::string& name, const Expr& F, bool strict = true);
    // F >= 0 (strict: F > 0).
    void add_psd(const std::string& name, const Expr& F, bool strict = true) { add_nsd(name, -F, strict); }
    void add_equality(const std::string& name, const Expr& E);

    void maximize(const Expr& scalar_objective);
    bool has_objective() const { return has_objective_; }
    const Expr& objective() const { return objective_; }

    int num_variables() const { return num_vars_; }
    const std::vector<VariableInfo>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<Equality>& equalities() const { return equalities_; }

    // Box |x_i| <= variable_bound keeps feasibility problems over cones bounded.
    double variable_bound = 1e4;

    // Line-oriented debugging dump (see docs/lmi_dump.md).
    std::string dump() const;

private:
    int num_vars_ = 0;
    std::vector<VariableInfo> vars_;
    std::vector<Constraint> constraints_;
    std::vector<Equality> equalities_;
    Expr objective_;
    bool has_objective_ = false;
};

inline constexpr double kStrictShiftRel = 1e-6;
inline constexpr double kVerifyTol = 1e-7;

enum class Status { Feasible, Infeasible, NumericalFailure };

std::string to_string(Status status);

struct Residual {
    std::string name;
    double max_eig = 0.0;  // largest eigenvalue of the unshifted F
    bool strict = false;
    bool satisfied = false;
};

struct Solution {
    Status status = Status::NumericalFailure;
    Vector x;
    std::vector<Residual> residuals;
    double objective = 0.0;
    double equality_residual = 0.0;
    double phase1_margin = 0.0;  // optimal s of the phase-I program when run
    int newton_steps = 0;
    std::string message;

    bool feasible() const { return status == Status::Feasible; }
    Matrix value(const Expr& e) const { return e.evaluate(x); }
    double scalar(const Expr& e) const { return e.evaluate(x)(0, 0); }
};

struct SolverOptions {
    double gap_tol = 1e-9;         // relative duality-gap target
    double barrier_growth = 8.0;
    int max_newton_per_center = 80;
    int max_outer = 80;
};

/// Primal log-det barrier method. Equalities are eliminated by a null-space
/// parametrization; a phase-I program (minimize s with F_j <= s I) finds a
/// strictly feasible point or certifies infeasibility; phase II then follows
/// the central path of the objective, or returns the analytic center of the
/// (boxed) feasible set when there is no objective.
Solution solve(const Problem& p, const SolverOptions& opts = {});

// Recompute residuals of p at x independently of the solver.
std::vector<Residual> verify(const Problem& p, const Vector& x);

/// True iff [A11 A12; A12^T A22] <= 0, decided through the complement
/// A11 - A12 A22^{-1} A12^T. Requires A22 < 0.
bool schur_nsd_equivalent(const Matrix& A11, const Matrix& A12, const Matrix& A22);

/// eps^{-1} B B^T + eps C^T Delta Delta^T C, which dominates
/// B D^T C + C^T D B^T for every D with D D^T <= Delta Delta^T.
Matrix petersen_upper_bound(const Matrix& B, const Matrix& C, const Matrix& Delta, double eps);

/// Random D = Delta * W with ||W|| <= 1 (W has `cols` columns): a Gaussian
/// direction normalized to unit spectral norm, scaled by a uniform factor.
Matrix sample_disturbance_matrix(const Matrix& Delta, Eigen::Index cols, std::uint64_t seed);

}  // namespace ddetc::lmi
