#include "ddetc/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace ddetc::lmi {

namespace {

void check_same_shape(const Expr& a, const Expr& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error("dimension mismatch in affine expression");
}

}  // namespace

Expr::Expr(Matrix constant) : constant_(std::move(constant)) {}

Expr Expr::zero(Eigen::Index rows, Eigen::Index cols) {
    return Expr(Matrix::Zero(rows, cols));
}

Expr Expr::variable_entry(int index, Eigen::Index rows, Eigen::Index cols, const Matrix& coef) {
    if (coef.rows() != rows || coef.cols() != cols) throw Error("dimension mismatch in affine expression");
    Expr e = zero(rows, cols);
    e.terms_[index] = coef;
    return e;
}

Expr Expr::transpose() const {
    Expr e(constant_.transpose());
    for (const auto& [k, F] : terms_) e.terms_[k] = F.transpose();
    return e;
}

Matrix Expr::evaluate(const Vector& x) const {
    Matrix M = constant_;
    for (const auto& [k, F] : terms_) {
        if (k >= x.size()) throw Error("variable index out of range");
        M += x(k) * F;
    }
    return M;
}

Expr& Expr::operator+=(const Expr& other) {
    check_same_shape(*this, other);
    constant_ += other.constant_;
    for (const auto& [k, F] : other.terms_) {
        auto it = terms_.find(k);
        if (it == terms_.end()) terms_[k] = F;
        else it->second += F;
    }
    return *this;
}

Expr& Expr::operator-=(const Expr& other) {
    return *this += -other;
}

Expr operator-(const Expr& a) {
    return -1.0 * a;
}

Expr operator*(double s, const Expr& a) {
    Expr e(s * a.constant_);
    for (const auto& [k, F] : a.terms_) e.terms_[k] = s * F;
    return e;
}

Expr operator*(const Matrix& L, const Expr& a) {
    if (L.cols() != a.rows()) throw Error("dimension mismatch in affine expression");
    Expr e(L * a.constant_);
    for (const auto& [k, F] : a.terms_) e.terms_[k] = L * F;
    return e;
}

Expr operator*(const Expr& a, const Matrix& R) {
    if (a.cols() != R.rows()) throw Error("dimension mismatch in affine expression");
    Expr e(a.constant_ * R);
    for (const auto& [k, F] : a.terms_) e.terms_[k] = F * R;
    return e;
}

Expr Expr::scalar_times(const Expr& s, const Matrix& M) {
    if (s.rows() != 1 || s.cols() != 1) throw Error("scalar_times needs a 1x1 expression");
    Expr e(s.constant_(0, 0) * M);
    for (const auto& [k, F] : s.terms_) e.terms_[k] = F(0, 0) * M;
    return e;
}

Expr Expr::block(const std::vector<std::vector<Expr>>& blocks) {
    if (blocks.empty() || blocks.front().empty()) throw Error("empty block expression");
    const std::size_t br = blocks.size();
    const std::size_t bc = blocks.front().size();
    std::vector<Eigen::Index> heights(br), widths(bc);
    for (std::size_t i = 0; i < br; ++i) {
        if (blocks[i].size() != bc) throw Error("ragged block expression");
        heights[i] = blocks[i][0].rows();
    }
    for (std::size_t j = 0; j < bc; ++j) widths[j] = blocks[0][j].cols();
    Eigen::Index R = 0, C = 0;
    for (auto h : heights) R += h;
    for (auto w : widths) C += w;

    Expr out = zero(R, C);
    Eigen::Index r0 = 0;
    for (std::size_t i = 0; i < br; ++i) {
        Eigen::Index c0 = 0;
        for (std::size_t j = 0; j < bc; ++j) {
            const Expr& b = blocks[i][j];
            if (b.rows() != heights[i] || b.cols() != widths[j])
                throw Error("dimension mismatch in block expression");
            out.constant_.block(r0, c0, b.rows(), b.cols()) = b.constant_;
            for (const auto& [k, F] : b.terms_) {
                auto it = out.terms_.find(k);
                if (it == out.terms_.end()) it = out.terms_.emplace(k, Matrix::Zero(R, C)).first;
                it->second.block(r0, c0, b.rows(), b.cols()) = F;
            }
            c0 += widths[j];
        }
        r0 += heights[i];
    }
    return out;
}

double Expr::data_scale() const {
    double s = constant_.size() ? constant_.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& [k, F] : terms_) s = std::max(s, F.cwiseAbs().maxCoeff());
    return s;
}

Expr Problem::add_scalar(const std::string& name) {
    VariableInfo v{name, VariableKind::Scalar, 1, 1, num_vars_, 1};
    vars_.push_back(v);
    return Expr::variable_entry(num_vars_++, 1, 1, Matrix::Ones(1, 1));
}

Expr Problem::add_matrix(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    if (rows <= 0 || cols <= 0) throw Error("matrix variable needs positive dimensions");
    VariableInfo v{name, VariableKind::Matrix, rows, cols, num_vars_, static_cast<int>(rows * cols)};
    vars_.push_back(v);
    Expr e = Expr::zero(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            Matrix E = Matrix::Zero(rows, cols);
            E(i, j) = 1.0;
            e += Expr::variable_entry(num_vars_++, rows, cols, E);
        }
    return e;
}

Expr Problem::add_symmetric(const std::string& name, Eigen::Index n) {
    if (n <= 0) throw Error("symmetric variable needs positive dimension");
    VariableInfo v{name, VariableKind::Symmetric, n, n, num_vars_, static_cast<int>(n * (n + 1) / 2)};
    vars_.push_back(v);
    Expr e = Expr::zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j; i < n; ++i) {
            Matrix E = Matrix::Zero(n, n);
            E(i, j) = 1.0;
            E(j, i) = 1.0;
            e += Expr::variable_entry(num_vars_++, n, n, E);
        }
    return e;
}

void Problem::add_nsd(const std::string& name, const Expr& F, bool strict) {
    if (F.rows() != F.cols() || F.rows() == 0) throw Error("constraint '" + name + "' is not square");
    const double tol = 1e-12 * (1.0 + F.data_scale());
    if (!linalg::is_symmetric(F.constant(), tol)) throw Error("constraint '" + name + "' is not symmetric");
    for (const auto& [k, G] : F.terms())
        if (!linalg::is_symmetric(G, tol)) throw Error("constraint '" + name + "' is not symmetric");
    Constraint c;
    c.name = name;
    c.F = F;
    c.strict = strict;
    c.shift = strict ? kStrictShiftRel * (1.0 + F.data_scale()) : 0.0;
    constraints_.push_back(std::move(c));
}

void Problem::add_equality(const std::string& name, const Expr& E) {
    equalities_.push_back({name, E});
}

void Problem::maximize(const Expr& scalar_objective) {
    if (scalar_objective.rows() != 1 || scalar_objective.cols() != 1)
        throw Error("objective must be scalar");
    objective_ = scalar_objective;
    has_objective_ = true;
}

namespace {

const char* kind_name(VariableKind k) {
    switch (k) {
    case VariableKind::Scalar: return "scalar";
    case VariableKind::Matrix: return "matrix";
    case VariableKind::Symmetric: return "symmetric";
    }
    return "scalar";
}

void dump_matrix(std::ostringstream& os, const std::string& tag, const Matrix& M) {
    os << "  " << tag;
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) os << ' ' << M(i, j);
    os << '\n';
}

void dump_expr(std::ostringstream& os, const Expr& e) {
    dump_matrix(os, "const", e.constant());
    for (const auto& [k, F] : e.terms()) dump_matrix(os, "coef " + std::to_string(k), F);
}

}  // namespace

std::string Problem::dump() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "lmi-problem v1\n";
    os << "variables " << num_vars_ << " bound " << variable_bound << '\n';
    for (const auto& v : vars_)
        os << "var " << v.name << ' ' << kind_name(v.kind) << ' ' << v.rows << ' ' << v.cols << " offset "
           << v.offset << " count " << v.count << '\n';
    for (const auto& c : constraints_) {
        os << "nsd " << c.name << ' ' << (c.strict ? "strict" : "nonstrict") << " size " << c.F.rows()
           << " shift " << c.shift << '\n';
        dump_expr(os, c.F);
    }
    for (const auto& e : equalities_) {
        os << "eq " << e.name << ' ' << e.E.rows() << ' ' << e.E.cols() << '\n';
        dump_expr(os, e.E);
    }
    if (has_objective_) {
        os << "maximize\n";
        dump_expr(os, objective_);
    }
    os << "end\n";
    return os.str();
}

std::string to_string(Status status) {
    switch (status) {
    case Status::Feasible: return "feasible";
    case Status::Infeasible: return "infeasible";
    case Status::NumericalFailure: return "numerical-failure";
    }
    return "numerical-failure";
}

// ---------------------------------------------------------------------------
// Barrier engine over the reduced variable z.

namespace {

struct Block {
    Matrix C;                 // F(z) = C + sum_k z_k G_k  (must stay < 0)
    std::vector<int> index;   // k with nonzero G_k
    std::vector<Matrix> G;
};

struct Program {
    int nz = 0;
    std::vector<Block> blocks;
    Matrix A;  // linear inequalities A z + b < 0
    Vector b;
    Vector c;  // minimize c^T z

    int barrier_degree() const {
        int m = static_cast<int>(A.rows());
        for (const auto& blk : blocks) m += static_cast<int>(blk.C.rows());
        return m;
    }
};

Matrix block_value(const Block& blk, const Vector& z) {
    Matrix F = blk.C;
    for (std::size_t i = 0; i < blk.index.size(); ++i) F += z(blk.index[i]) * blk.G[i];
    return F;
}

// Barrier value; +inf outside the domain.
double barrier(const Program& p, const Vector& z) {
    double phi = 0.0;
    for (const auto& blk : p.blocks) {
        Matrix negF = -block_value(blk, z);
        Eigen::LLT<Matrix> llt(negF);
        if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
        const auto& L = llt.matrixLLT();
        for (Eigen::Index i = 0; i < L.rows(); ++i) {
            double d = L(i, i);
            if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
            phi -= 2.0 * std::log(d);
        }
    }
    if (p.A.rows() > 0) {
        Vector s = -(p.A * z + p.b);
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (!(s(i) > 0.0)) return std::numeric_limits<double>::infinity();
            phi -= std::log(s(i));
        }
    }
    return std::isfinite(phi) ? phi : std::numeric_limits<double>::infinity();
}

void barrier_derivatives(const Program& p, const Vector& z, Vector& g, Matrix& H) {
    g = Vector::Zero(p.nz);
    H = Matrix::Zero(p.nz, p.nz);
    for (const auto& blk : p.blocks) {
        Matrix negF = -block_value(blk, z);
        Eigen::LLT<Matrix> llt(negF);
        Matrix W = llt.solve(Matrix::Identity(negF.rows(), negF.cols()));
        const std::size_t q = blk.index.size();
        std::vector<Matrix> WG(q);
        for (std::size_t i = 0; i < q; ++i) {
            WG[i] = W * blk.G[i];
            g(blk.index[i]) += WG[i].trace();
        }
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = i; j < q; ++j) {
                double h = WG[i].cwiseProduct(WG[j].transpose()).sum();
                H(blk.index[i], blk.index[j]) += h;
                if (i != j) H(blk.index[j], blk.index[i]) += h;
            }
    }
    if (p.A.rows() > 0) {
        Vector s = -(p.A * z + p.b);
        Vector inv = s.cwiseInverse();
        g += p.A.transpose() * inv;
        H += p.A.transpose() * inv.cwiseAbs2().asDiagonal() * p.A;
    }
}

struct CenterResult {
    bool ok = true;
    bool stopped = false;
    int steps = 0;
};

// Damped Newton on t c^T z + phi(z). `stop` is polled after every step.
template <class Stop>
CenterResult center(const Program& p, double t, Vector& z, int max_steps, Stop stop) {
    CenterResult res;
    for (int it = 0; it < max_steps; ++it) {
        Vector g;
        Matrix H;
        barrier_derivatives(p, z, g, H);
        Vector grad = t * p.c + g;
        Eigen::LDLT<Matrix> ldlt(H);
        Vector dz = -ldlt.solve(grad);
        if (ldlt.info() != Eigen::Success || !dz.allFinite()) {
            // Fall back to a regularized system.
            double reg = 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
            Eigen::LDLT<Matrix> ldlt2(H + reg * Matrix::Identity(p.nz, p.nz));
            dz = -ldlt2.solve(grad);
            if (!dz.allFinite()) {
                res.ok = false;
                return res;
            }
        }
        const double lambda2 = -grad.dot(dz);
        if (lambda2 < 0.0 && std::abs(lambda2) > 1e-12 * (1.0 + grad.norm())) {
            res.ok = false;
            return res;
        }
        if (0.5 * lambda2 <= 1e-10) return res;

        const double f0 = t * p.c.dot(z) + barrier(p, z);
        double alpha = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
            Vector zn = z + alpha * dz;
            double f1 = t * p.c.dot(zn) + barrier(p, zn);
            if (std::isfinite(f1) && f1 <= f0 - 0.25 * alpha * lambda2) {
                z = zn;
                moved = true;
                break;
            }
        }
        ++res.steps;
        if (!moved) {
            // No descent at floating-point resolution: the center is reached
            // as accurately as the arithmetic allows.
            return res;
        }
        if (stop(z)) {
            res.stopped = true;
            return res;
        }
    }
    return res;
}

// Initial barrier weight balancing the objective against the barrier gradient.
double initial_weight(const Program& p, const Vector& z) {
    Vector g;
    Matrix H;
    barrier_derivatives(p, z, g, H);
    Eigen::LDLT<Matrix> ldlt(H + 1e-14 * std::max(1.0, H.diagonal().maxCoeff()) * Matrix::Identity(p.nz, p.nz));
    Vector Hc = ldlt.solve(p.c);
    Vector Hg = ldlt.solve(g);
    double cc = p.c.dot(Hc);
    if (!(cc > 0.0)) return 1.0;
    double t0 = -p.c.dot(Hg) / cc;
    return std::clamp(t0, 1e-3, 1e3);
}

struct Reduced {
    Vector xp;   // particular solution of the equalities
    Matrix N;    // null-space basis, x = xp + N z
    double eq_residual = 0.0;
    bool consistent = true;
};

Reduced eliminate_equalities(const Problem& prob) {
    const int nv = prob.num_variables();
    Reduced red;
    int rows = 0;
    for (const auto& e : prob.equalities()) rows += static_cast<int>(e.E.rows() * e.E.cols());
    if (rows == 0) {
        red.xp = Vector::Zero(nv);
        red.N = Matrix::Identity(nv, nv);
        return red;
    }
    Matrix Aeq = Matrix::Zero(rows, nv);
    Vector beq = Vector::Zero(rows);
    int r = 0;
    for (const auto& e : prob.equalities()) {
        for (Eigen::Index j = 0; j < e.E.cols(); ++j)
            for (Eigen::Index i = 0; i < e.E.rows(); ++i, ++r) {
                beq(r) = -e.E.constant()(i, j);
                for (const auto& [k, F] : e.E.terms()) Aeq(r, k) = F(i, j);
            }
    }
    Eigen::JacobiSVD<Matrix> svd(Aeq, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    const double cutoff = 1e-10 * (s.size() ? std::max(s(0), 1e-300) : 1.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) ++rank;
    Vector xp = Vector::Zero(nv);
    Vector Utb = svd.matrixU().leftCols(rank).transpose() * beq;
    for (Eigen::Index i = 0; i < rank; ++i) xp += svd.matrixV().col(i) * (Utb(i) / s(i));
    red.xp = xp;
    red.N = svd.matrixV().rightCols(nv - rank);
    red.eq_residual = (Aeq * xp - beq).cwiseAbs().maxCoeff();
    red.consistent = red.eq_residual <= 1e-9 * (1.0 + beq.cwiseAbs().maxCoeff());
    return red;
}

Program build_program(const Problem& prob, const Reduced& red, double bound) {
    Program p;
    const int nv = prob.num_variables();
    p.nz = static_cast<int>(red.N.cols());
    for (const auto& con : prob.constraints()) {
        const Eigen::Index d = con.F.rows();
        Block blk;
        blk.C = con.F.constant();
        std::vector<Matrix> G(static_cast<std::size_t>(p.nz), Matrix::Zero(d, d));
        for (const auto& [i, F] : con.F.terms()) {
            blk.C += red.xp(i) * F;
            for (int k = 0; k < p.nz; ++k) {
                double w = red.N(i, k);
                if (w != 0.0) G[static_cast<std::size_t>(k)] += w * F;
            }
        }
        blk.C = linalg::sym(blk.C) + con.shift * Matrix::Identity(d, d);
        const double scale = 1e-14 * (1.0 + con.F.data_scale());
        for (int k = 0; k < p.nz; ++k) {
            Matrix Gk = linalg::sym(G[static_cast<std::size_t>(k)]);
            if (Gk.cwiseAbs().maxCoeff() > scale) {
                blk.index.push_back(k);
                blk.G.push_back(std::move(Gk));
            }
        }
        p.blocks.push_back(std::move(blk));
    }
    p.A.resize(2 * nv, p.nz);
    p.b.resize(2 * nv);
    for (int i = 0; i < nv; ++i) {
        p.A.row(2 * i) = red.N.row(i);
        p.b(2 * i) = red.xp(i) - bound;
        p.A.row(2 * i + 1) = -red.N.row(i);
        p.b(2 * i + 1) = -red.xp(i) - bound;
    }
    p.c = Vector::Zero(p.nz);
    if (prob.has_objective()) {
        Vector cx = Vector::Zero(nv);
        for (const auto& [k, F] : prob.objective().terms()) cx(k) = F(0, 0);
        p.c = -(red.N.transpose() * cx);
    }
    return p;
}

double objective_value(const Problem& prob, const Vector& x) {
    return prob.has_objective() ? prob.objective().evaluate(x)(0, 0) : 0.0;
}

}  // namespace

std::vector<Residual> verify(const Problem& p, const Vector& x) {
    std::vector<Residual> out;
    for (const auto& c : p.constraints()) {
        Residual r;
        r.name = c.name;
        r.strict = c.strict;
        r.max_eig = linalg::lambda_max_sym(c.F.evaluate(x));
        r.satisfied = c.strict ? r.max_eig < 0.0 : r.max_eig <= kVerifyTol;
        out.push_back(r);
    }
    return out;
}

Solution solve(const Problem& prob, const SolverOptions& opts) {
    Solution sol;
    const int nv = prob.num_variables();
    if (nv == 0) throw Error("problem has no variables");

    Reduced red = eliminate_equalities(prob);
    sol.equality_residual = red.eq_residual;
    if (!red.consistent) {
        sol.status = Status::Infeasible;
        sol.x = red.xp;
        sol.message = "inconsistent equality constraints";
        return sol;
    }
    double bound = std::max(prob.variable_bound, 10.0 * red.xp.cwiseAbs().maxCoeff() + 1.0);
    Program p = build_program(prob, red, bound);
    if (p.nz == 0) {
        sol.x = red.xp;
        sol.residuals = verify(prob, sol.x);
        bool ok = std::all_of(sol.residuals.begin(), sol.residuals.end(), [](const Residual& r) { return r.satisfied; });
        sol.status = ok ? Status::Feasible : Status::Infeasible;
        sol.objective = objective_value(prob, sol.x);
        sol.message = "equalities determine the point";
        return sol;
    }

    Vector z = Vector::Zero(p.nz);
    auto constraint_max = [&](const Vector& zz) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& blk : p.blocks) worst = std::max(worst, linalg::lambda_max_sym(block_value(blk, zz)));
        return worst;
    };

    // Phase I: minimize s subject to F_j(z) <= s I.
    if (!p.blocks.empty() && constraint_max(z) >= 0.0) {
        Program q;
        q.nz = p.nz + 1;
        const int si = p.nz;
        for (const auto& blk : p.blocks) {
            Block b2 = blk;
            b2.index.push_back(si);
            b2.G.push_back(-Matrix::Identity(blk.C.rows(), blk.C.cols()));
            q.blocks.push_back(std::move(b2));
        }
        q.A = Matrix::Zero(p.A.rows(), q.nz);
        q.A.leftCols(p.nz) = p.A;
        q.b = p.b;
        q.c = Vector::Zero(q.nz);
        q.c(si) = 1.0;

        double s0 = constraint_max(z);
        Vector w(q.nz);
        w << z, s0 + 1.0 + 0.1 * std::abs(s0);
        auto reached = [&](const Vector& ww) { return ww(si) < 0.0; };
        const int m = q.barrier_degree();
        double t = initial_weight(q, w);
        bool found = false;
        bool certified = false;
        for (int outer = 0; outer < opts.max_outer; ++outer) {
            CenterResult cr = center(q, t, w, opts.max_newton_per_center, reached);
            sol.newton_steps += cr.steps;
            if (cr.stopped || reached(w)) {
                found = true;
                break;
            }
            if (!cr.ok) break;
            // On the central path s - m/t is a lower bound on the optimal s.
            if (w(si) - m / t > 0.0) {
                certified = true;
                break;
            }
            if (m / t < 1e-12 * (1.0 + std::abs(w(si)))) break;
            t *= opts.barrier_growth;
        }
        sol.phase1_margin = w(si);
        if (!found) {
            sol.x = red.xp + red.N * w.head(p.nz);
            sol.residuals = verify(prob, sol.x);
            sol.objective = objective_value(prob, sol.x);
            if (certified || w(si) > 1e-9) {
                sol.status = Status::Infeasible;
                sol.message = "no strictly feasible point (phase-I optimum " + std::to_string(w(si)) + ")";
            } else {
                sol.status = Status::NumericalFailure;
                sol.message = "phase I stalled at the feasibility boundary";
            }
            return sol;
        }
        z = w.head(p.nz);
    }

    // Phase II.
    auto never = [](const Vector&) { return false; };
    bool ok = true;
    if (!prob.has_objective()) {
        CenterResult cr = center(p, 0.0, z, 400, never);
        sol.newton_steps += cr.steps;
        ok = cr.ok;
    } else {
        const int m = p.barrier_degree();
        double t = initial_weight(p, z);
        for (int outer = 0; outer < opts.max_outer; ++outer) {
            Vector z_prev = z;
            CenterResult cr = center(p, t, z, opts.max_newton_per_center, never);
            sol.newton_steps += cr.steps;
            if (!cr.ok) {
                z = z_prev;
                ok = false;
                break;
            }
            double f = p.c.dot(z);
            if (m / t <= opts.gap_tol * std::max(1.0, std::abs(f))) break;
            t *= opts.barrier_growth;
        }
    }

    sol.x = red.xp + red.N * z;
    sol.residuals = verify(prob, sol.x);
    sol.objective = objective_value(prob, sol.x);
    bool all = std::all_of(sol.residuals.begin(), sol.residuals.end(), [](const Residual& r) { return r.satisfied; });
    if (all) {
        sol.status = Status::Feasible;
        sol.message = ok ? "solved" : "solved (central path ended early)";
    } else {
        sol.status = Status::NumericalFailure;
        sol.message = "returned point fails verification";
    }
    return sol;
}

bool schur_nsd_equivalent(const Matrix& A11, const Matrix& A12, const Matrix& A22) {
    if (A11.rows() != A11.cols() || A22.rows() != A22.cols() || A12.rows() != A11.rows() ||
        A12.cols() != A22.rows())
        throw Error("Schur blocks have inconsistent dimensions");
    Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::sym(A22));
    const Vector& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (ev.cwiseAbs().minCoeff() <= 1e-14 * scale) throw Error("Schur pivot singular");
    if (ev.maxCoeff() > 0.0) throw Error("Schur pivot must be negative definite");
    Matrix comp = A11 - A12 * es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                            es.eigenvectors().transpose() * A12.transpose();
    return linalg::lambda_max_sym(comp) <= 0.0;
}

Matrix petersen_upper_bound(const Matrix& B, const Matrix& C, const Matrix& Delta, double eps) {
    if (!(eps > 0.0)) throw Error("invalid multiplier");
    if (C.cols() != B.rows() || Delta.rows() != C.rows()) throw Error("Petersen blocks have inconsistent dimensions");
    return B * B.transpose() / eps + eps * C.transpose() * Delta * Delta.transpose() * C;
}

Matrix sample_disturbance_matrix(const Matrix& Delta, Eigen::Index cols, std::uint64_t seed) {
    if (cols <= 0) throw Error("disturbance matrix needs at least one column");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix W(Delta.cols(), cols);
    for (Eigen::Index j = 0; j < W.cols(); ++j)
        for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = gauss(rng);
    double nrm = linalg::spectral_norm(W);
    if (nrm > 0.0) W /= nrm;
    W *= unit(rng);
    Matrix D = Delta * W;
    // Membership check; rounding can only push ||W|| above 1 by a few ulps.
    Matrix gap = Delta * Delta.transpose() - D * D.transpose();
    if (gap.size() && linalg::lambda_min_sym(gap) < -1e-12 * (1.0 + gap.cwiseAbs().maxCoeff())) D *= 1.0 - 1e-12;
    return D;
}

}  // namespace ddetc::lmi
