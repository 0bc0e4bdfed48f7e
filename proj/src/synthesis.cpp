#include "ddetc/synthesis.hpp"

#include "ddetc/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ddetc {

using lmi::Expr;

std::string to_string(Regime r) {
    return r == Regime::NoiseFree ? "noisefree" : "robust";
}

Regime regime_from_string(const std::string& s) {
    if (s == "noisefree" || s == "noise-free") return Regime::NoiseFree;
    if (s == "robust" || s == "noisy") return Regime::Robust;
    throw Error("unknown regime '" + s + "'");
}

namespace {

constexpr double kClosureTol = 1e-8;

void require_rich(const DataMatrices& dm) {
    dm.validate();
    if (!check_richness(dm).pass) throw Error("system of equations unsolvable");
}

Matrix right_inverse(const DataMatrices& dm) {
    require_rich(dm);
    Matrix W = dm.stacked();
    Matrix Wp = linalg::pinv(W, 1e-12);
    Matrix I = Matrix::Identity(W.rows(), W.rows());
    if ((W * Wp - I).cwiseAbs().maxCoeff() > kClosureTol) throw Error("system of equations unsolvable");
    return Wp;
}

Matrix min_norm_solution(const DataMatrices& dm, const Matrix& rhs) {
    Matrix W = dm.stacked();
    Matrix X = right_inverse(dm) * rhs;
    double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if ((W * X - rhs).cwiseAbs().maxCoeff() > kClosureTol * scale) throw Error("system of equations unsolvable");
    return X;
}

double sigma_ratio(double sigma) {
    if (!(sigma > 0.0)) throw Error("sigma must be positive");
    return std::isinf(sigma) ? 1.0 : sigma / (1.0 + sigma);
}

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

// [B, Y^T; Y, I] >= 0, i.e. Y^T Y <= B.
Expr norm_ball(const Expr& Y, const Expr& B) {
    return Expr::block({{B, Y.transpose()}, {Y, Expr(identity(Y.rows()))}});
}

// [r I, Y^T; Y, r I] >= 0, i.e. ||Y|| <= r.
Expr linear_norm_ball(const Expr& Y, const Expr& r) {
    return Expr::block({{Expr::scalar_times(r, identity(Y.cols())), Y.transpose()},
                        {Y, Expr::scalar_times(r, identity(Y.rows()))}});
}

Expr trace_of(const Expr& A) {
    Expr tr = Expr::zero(1, 1);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        Matrix e = Matrix::Zero(A.rows(), 1);
        e(i, 0) = 1.0;
        tr += e.transpose() * A * e;
    }
    return tr;
}

// diag(I_n, 0_n) and diag(0_n, I_n) in R^{2n x 2n}.
Matrix upper_selector(Eigen::Index n) {
    Matrix E = Matrix::Zero(2 * n, 2 * n);
    E.topLeftCorner(n, n).setIdentity();
    return E;
}

Matrix lower_selector(Eigen::Index n) {
    Matrix E = Matrix::Zero(2 * n, 2 * n);
    E.bottomRightCorner(n, n).setIdentity();
    return E;
}

void finish_design(ControllerDesign& cd, const DataMatrices& dm) {
    const Eigen::Index n = dm.n();
    Matrix P = linalg::sym(dm.X0 * cd.Y);
    Eigen::LLT<Matrix> llt(P);
    if (llt.info() != Eigen::Success) throw Error("invalid design: X0 Y is not positive definite");
    cd.S = linalg::sym(llt.solve(identity(n)));
    cd.K = dm.U0 * cd.Y * cd.S;
    cd.G = solve_G(dm, cd.K);
    cd.L = solve_L(dm, cd.K);
    RightInverse ri = compute_V0(dm);
    cd.J0 = ri.J0;
    cd.V0 = ri.V0;
    Matrix SX1G = cd.S * dm.X1 * cd.G;
    cd.Q = -(SX1G.transpose() + SX1G);
    if (cd.Omega.size() == 0) cd.Omega = Matrix::Zero(n, n);
    if (cd.Delta.size() == 0) cd.Delta = Matrix::Zero(n, n);
    cd.norms = compute_norms(cd, dm);
}

double max_residual(const lmi::Solution& sol) {
    double r = -std::numeric_limits<double>::infinity();
    for (const auto& res : sol.residuals) r = std::max(r, res.max_eig);
    return r;
}

}  // namespace

Matrix solve_L(const DataMatrices& dm, const Matrix& K) {
    if (K.rows() != dm.m() || K.cols() != dm.n()) throw Error("gain dimensions do not match the data");
    Matrix rhs(dm.m() + dm.n(), dm.n());
    rhs << K, Matrix::Zero(dm.n(), dm.n());
    return min_norm_solution(dm, rhs);
}

Matrix solve_G(const DataMatrices& dm, const Matrix& K) {
    if (K.rows() != dm.m() || K.cols() != dm.n()) throw Error("gain dimensions do not match the data");
    Matrix rhs(dm.m() + dm.n(), dm.n());
    rhs << K, identity(dm.n());
    return min_norm_solution(dm, rhs);
}

RightInverse compute_V0(const DataMatrices& dm) {
    Matrix Wp = right_inverse(dm);
    return {Wp.leftCols(dm.m()), Wp.rightCols(dm.n())};
}

DesignNorms compute_norms(const ControllerDesign& cd, const DataMatrices& dm) {
    DesignNorms nm;
    nm.X1G = linalg::spectral_norm(dm.X1 * cd.G);
    nm.X1L = linalg::spectral_norm(dm.X1 * cd.L);
    nm.X1V0 = linalg::spectral_norm(dm.X1 * cd.V0);
    nm.G = linalg::spectral_norm(cd.G);
    nm.L = linalg::spectral_norm(cd.L);
    nm.V0 = linalg::spectral_norm(cd.V0);
    nm.Delta = cd.Delta.size() ? linalg::spectral_norm(cd.Delta) : 0.0;
    nm.alpha = std::max(nm.X1G, nm.X1L);
    nm.c_A = nm.X1V0 + nm.Delta * nm.V0;
    nm.c_Phi = nm.X1G + nm.Delta * nm.G;
    nm.c_e = nm.X1L + nm.Delta * nm.L;
    if (cd.Omega.size()) nm.omega1 = linalg::lambda_min_sym(cd.S * cd.Omega * cd.S);
    const double nS = linalg::spectral_norm(cd.S);
    nm.omega2 = 2.0 * linalg::spectral_norm(cd.S * dm.X1 * cd.L) + 2.0 * nS * nm.Delta * nm.L;
    nm.omega3 = 2.0 * nS;
    return nm;
}

ControllerDesign design_controller_noisefree(const DataMatrices& dm) {
    require_rich(dm);
    const Eigen::Index n = dm.n();
    const Eigen::Index T = dm.T();

    lmi::Problem p;
    Expr Y = p.add_matrix("Y", T, n);
    Expr X1Y = dm.X1 * Y;
    Expr X0Y = dm.X0 * Y;
    p.add_nsd("X1Y+(X1Y)'<0", X1Y + X1Y.transpose());
    p.add_equality("X0Y=(X0Y)'", X0Y - X0Y.transpose());
    p.add_psd("X0Y>0", 0.5 * (X0Y + X0Y.transpose()));
    // The program is homogeneous in Y; the ball ||Y|| <= 1 makes its
    // analytic center well defined.
    p.add_psd("||Y||<=1", norm_ball(Y, Expr(identity(n))), false);
    auto sol = lmi::solve(p);
    if (!sol.feasible()) throw Error("stabilization SDP infeasible");

    ControllerDesign cd;
    cd.regime = Regime::NoiseFree;
    cd.Y = sol.value(Y);
    // Normalize to trace(X0 Y) = n.
    cd.Y *= static_cast<double>(n) / (dm.X0 * cd.Y).trace();
    finish_design(cd, dm);
    Matrix X1Yv = dm.X1 * cd.Y;
    cd.lmi_residual = std::max(linalg::lambda_max_sym(X1Yv + X1Yv.transpose()),
                               -linalg::lambda_min_sym(dm.X0 * cd.Y));
    return cd;
}

ControllerDesign design_controller_robust(const DataMatrices& dm, const DisturbanceModel& model, const Matrix& Omega) {
    require_rich(dm);
    const Eigen::Index n = dm.n();
    const Eigen::Index T = dm.T();
    if (Omega.rows() != n || Omega.cols() != n || linalg::lambda_min_sym(Omega) <= 0.0)
        throw Error("Omega must be positive definite");
    if (model.Delta.rows() != n) throw Error("disturbance bound dimension mismatch");

    const Matrix DDt = model.Delta * model.Delta.transpose();
    // The LMI is homogeneous in (Y, eps) apart from Omega: (Y, eps) solves it
    // for Omega / c iff c (Y, eps) solves it for Omega, and K is unchanged.
    // Solving with a normalized Omega keeps Y inside the solver box.
    // Stage 1 finds the smallest ||Y||; stage 2 returns the analytic center
    // within twice that norm.
    auto build = [&](lmi::Problem& p, Expr& Y, Expr& eps, const Matrix& Om) {
        Y = p.add_matrix("Y", T, n);
        eps = p.add_scalar("eps");
        Expr X1Y = dm.X1 * Y;
        Expr X0Y = dm.X0 * Y;
        Expr top = X1Y + X1Y.transpose() + Expr(Om) + Expr::scalar_times(eps, DDt);
        p.add_nsd("robust", Expr::block({{top, Y.transpose()}, {Y, Expr::scalar_times(eps, -identity(T))}}));
        p.add_equality("X0Y=(X0Y)'", X0Y - X0Y.transpose());
        p.add_psd("X0Y>0", 0.5 * (X0Y + X0Y.transpose()));
    };
    const double omega_max = linalg::lambda_max_sym(linalg::sym(Omega));
    Matrix Y_val;
    double eps_val = 0.0;
    double residual = 0.0;
    bool solved = false;
    for (double c = omega_max; !solved && c <= 1e4 * omega_max; c *= 100.0) {
        const Matrix Om = linalg::sym(Omega) / c;
        lmi::Problem p1;
        Expr Y1, eps1;
        build(p1, Y1, eps1, Om);
        Expr r = p1.add_scalar("r");
        p1.add_psd("||Y||<=r", linear_norm_ball(Y1, r), false);
        p1.maximize(-r);
        auto sol1 = lmi::solve(p1);
        if (!sol1.feasible()) continue;

        lmi::Problem p2;
        Expr Y2, eps2;
        build(p2, Y2, eps2, Om);
        p2.add_psd("||Y||<=2r*", linear_norm_ball(Y2, Expr(Matrix::Constant(1, 1, 2.0 * sol1.scalar(r)))), false);
        auto sol2 = lmi::solve(p2);
        if (sol2.feasible()) {
            Y_val = sol2.value(Y2);
            eps_val = sol2.scalar(eps2);
            residual = max_residual(sol2);
        } else {
            Y_val = sol1.value(Y1);
            eps_val = sol1.scalar(eps1);
            residual = max_residual(sol1);
        }
        Y_val *= c;
        eps_val *= c;
        residual *= c;
        solved = true;
    }
    if (!solved) throw Error("robust SDP infeasible (noise level too high)");

    ControllerDesign cd;
    cd.regime = Regime::Robust;
    cd.Y = Y_val;
    cd.epsilon = eps_val;
    cd.Omega = linalg::sym(Omega);
    cd.Delta = model.Delta;
    cd.delta = model.delta;
    finish_design(cd, dm);
    cd.lmi_residual = residual;
    return cd;
}

ControllerDesign design_controller_robust(const DataMatrices& dm, const DisturbanceModel& model) {
    return design_controller_robust(dm, model, 10.0 * identity(dm.n()));
}

double sampled_robust_margin(const ControllerDesign& cd, const DataMatrices& dm, const DisturbanceModel& model,
                             int draws, std::uint64_t seed) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < draws; ++i) {
        Matrix D = lmi::sample_disturbance_matrix(model.Delta, dm.T(), seed + static_cast<std::uint64_t>(i));
        Matrix XY = (dm.X1 - D) * cd.Y;
        worst = std::max(worst, linalg::lambda_max_sym(XY + XY.transpose() + cd.Omega));
    }
    return worst;
}

Matrix trigger_matrix_M(const ControllerDesign& cd, const DataMatrices& dm, double gamma, const Matrix& shift11) {
    const Eigen::Index n = cd.n();
    Matrix M = Matrix::Zero(2 * n, 2 * n);
    M.topLeftCorner(n, n) = -(1.0 - gamma) * cd.Q;
    if (shift11.size()) M.topLeftCorner(n, n) += shift11;
    Matrix SX1L = cd.S * dm.X1 * cd.L;
    M.topRightCorner(n, n) = SX1L;
    M.bottomLeftCorner(n, n) = SX1L.transpose();
    return linalg::sym(M);
}

namespace {

// Solves  max s  s.t.  mu * M + s * diag(I,0) - diag(0,I) < 0,  mu, s > 0.
struct SigmaProgram {
    double mu = 0.0;
    double s = 0.0;
    bool feasible = false;
};

SigmaProgram solve_sigma_program(const Matrix& M, Eigen::Index n, bool maximize) {
    lmi::Problem p;
    Expr mu = p.add_scalar("mu");
    Expr s = p.add_scalar("sigma2");
    Expr F = Expr::scalar_times(mu, M) + Expr::scalar_times(s, upper_selector(n)) - lower_selector(n);
    p.add_nsd("mu*M-Psi(sigma)", F);
    p.add_psd("mu>0", mu);
    p.add_psd("sigma2>0", s);
    if (maximize) p.maximize(s);
    auto sol = lmi::solve(p);
    SigmaProgram out;
    out.feasible = sol.feasible();
    if (out.feasible) {
        out.mu = sol.scalar(mu);
        out.s = sol.scalar(s);
    }
    return out;
}

}  // namespace

TriggerDesignResult design_sigma_noisefree(const ControllerDesign& cd, const DataMatrices& dm,
                                           std::optional<double> gamma, bool maximize) {
    if (cd.regime != Regime::NoiseFree) throw Error("noise-free triggering design needs a noise-free controller");
    double g = gamma.value_or(0.0);
    if (gamma && !(g > 0.0 && g < 1.0)) throw Error("gamma must lie in (0,1)");
    const Eigen::Index n = cd.n();
    Matrix M = trigger_matrix_M(cd, dm, g);
    auto prog = solve_sigma_program(M, n, maximize);
    if (!prog.feasible) throw Error("triggering SDP infeasible (numerical conditioning)");

    TriggerDesignResult r;
    r.mu = prog.mu;
    r.sigma = std::sqrt(prog.s);
    r.gamma = g;
    r.residual = linalg::lambda_max_sym(r.mu * M - psi_matrix(r.sigma, n));
    r.tau.tau = miet_tau(cd, r.sigma);
    return r;
}

TriggerDesignResult design_sigma_mixed(const ControllerDesign& cd, const DataMatrices& dm,
                                       const DisturbanceModel& model, double nu) {
    if (cd.regime != Regime::Robust) throw Error("mixed triggering design needs a robust controller");
    const Eigen::Index n = cd.n();
    const Eigen::Index s = model.Delta.cols();
    const Matrix SOS2 = 0.5 * linalg::sym(cd.S * cd.Omega * cd.S);
    const Matrix SX1L = cd.S * dm.X1 * cd.L;
    const Matrix SD = cd.S * model.Delta;
    const Matrix LtL = cd.L.transpose() * cd.L;

    lmi::Problem p;
    Expr mu = p.add_scalar("mu");
    Expr eps = p.add_scalar("eps");
    Expr s2 = p.add_scalar("sigma2");
    Expr b11 = Expr::scalar_times(mu, -SOS2) + Expr::scalar_times(s2, 2.0 * identity(n));
    Expr b12 = Expr::scalar_times(mu, SX1L);
    Expr b13 = Expr::scalar_times(mu, SD);
    Expr b22 = Expr(-identity(n)) + Expr::scalar_times(eps, LtL);
    Expr b33 = Expr::scalar_times(eps, -identity(s));
    Expr F = Expr::block({{b11, b12, b13},
                          {b12.transpose(), b22, Expr::zero(n, s)},
                          {b13.transpose(), Expr::zero(s, n), b33}});
    p.add_nsd("mixed", F);
    p.add_psd("mu>0", mu);
    p.add_psd("sigma2>0", s2);
    p.maximize(s2);
    auto sol = lmi::solve(p);
    if (!sol.feasible()) throw Error("mixed-trigger SDP infeasible");

    TriggerDesignResult r;
    r.mu = sol.scalar(mu);
    r.eps = sol.scalar(eps);
    r.sigma = std::sqrt(sol.scalar(s2));
    r.sigma2 = r.sigma;
    r.nu = nu;
    r.residual = max_residual(sol);
    r.tau.tau_bar = miet_bar_tau(cd, model, r.sigma, nu);
    return r;
}

double sampled_mixed_margin(const ControllerDesign& cd, const DataMatrices& dm, const DisturbanceModel& model,
                            double mu, double sigma, int draws, std::uint64_t seed) {
    const Eigen::Index n = cd.n();
    const Matrix Pb = psi_bar_matrix(sigma, n);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < draws; ++i) {
        Matrix D = lmi::sample_disturbance_matrix(model.Delta, dm.T(), seed + static_cast<std::uint64_t>(i));
        Matrix Mb = Matrix::Zero(2 * n, 2 * n);
        Mb.topLeftCorner(n, n) = -0.5 * cd.S * cd.Omega * cd.S;
        Matrix off = cd.S * (dm.X1 - D) * cd.L;
        Mb.topRightCorner(n, n) = off;
        Mb.bottomLeftCorner(n, n) = off.transpose();
        worst = std::max(worst, linalg::lambda_max_sym(mu * Mb - Pb));
    }
    return worst;
}

TimeRegBound sigma_bound_timereg(const ControllerDesign& cd, const DataMatrices& dm, const DisturbanceModel& model) {
    TimeRegBound b;
    b.omega1 = linalg::lambda_min_sym(cd.S * cd.Omega * cd.S);
    const double nS = linalg::spectral_norm(cd.S);
    b.omega2 = 2.0 * linalg::spectral_norm(cd.S * dm.X1 * cd.L) +
               2.0 * nS * linalg::spectral_norm(model.Delta) * linalg::spectral_norm(cd.L);
    b.omega3 = 2.0 * nS;
    b.sigma_max = b.omega2 > 0.0 ? b.omega1 / b.omega2 : std::numeric_limits<double>::infinity();
    b.sigma = 0.9 * b.sigma_max;
    return b;
}

namespace {

// mu and eps coefficients of the left side of the robust quadratic-trigger
// inequality, in the (x, e, w) coordinates.
void noisy_quadratic_parts(const ControllerDesign& cd, const DataMatrices& dm, const DisturbanceModel& model,
                           Matrix& Mmu, Matrix& Meps) {
    const Eigen::Index n = cd.n();
    const Eigen::Index s = model.Delta.cols();
    const Eigen::Index dim = 2 * n + s;
    Mmu = Matrix::Zero(dim, dim);
    Meps = Matrix::Zero(dim, dim);
    const Matrix SX1L = cd.S * dm.X1 * cd.L;
    const Matrix SD = cd.S * model.Delta;
    Mmu.topLeftCorner(n, n) = -0.5 * linalg::sym(cd.S * cd.Omega * cd.S);
    Mmu.block(0, n, n, n) = SX1L;
    Mmu.block(n, 0, n, n) = SX1L.transpose();
    Mmu.block(0, 2 * n, n, s) = SD;
    Mmu.block(2 * n, 0, s, n) = SD.transpose();
    Meps.block(n, n, n, n) = cd.L.transpose() * cd.L;
    Meps.bottomRightCorner(s, s) = -identity(s);
}

}  // namespace

Matrix quadratic_noisy_lmi(const ControllerDesign& cd, const DataMatrices& dm, const DisturbanceModel& model,
                           double mu, double eps, const Matrix& PsiTilde) {
    Matrix Mmu, Meps;
    noisy_quadratic_parts(cd, dm, model, Mmu, Meps);
    Matrix F = mu * Mmu + eps * Meps;
    F.topLeftCorner(PsiTilde.rows(), PsiTilde.cols()) -= PsiTilde;
    return F;
}

TriggerDesignResult design_quadratic_psi(const ControllerDesign& cd, const DataMatrices& dm,
                                         const std::optional<DisturbanceModel>& model, double nu) {
    const Eigen::Index n = cd.n();
    const bool noisy = model.has_value();
    if (noisy && cd.regime != Regime::Robust) throw Error("robust quadratic design needs a robust controller");
    if (!noisy && cd.regime != Regime::NoiseFree) throw Error("noise-free quadratic design needs a noise-free controller");

    // Psi-bar scales the x-block by 2; Psi by 1.
    const double xscale = noisy ? 2.0 : 1.0;
    const Eigen::Index s = noisy ? model->Delta.cols() : 0;
    const Eigen::Index dim = 2 * n + s;
    Matrix Emb = Matrix::Zero(2 * n, dim);
    Emb.leftCols(2 * n).setIdentity();

    Matrix Mmu, Meps;
    if (!noisy)
        Mmu = trigger_matrix_M(cd, dm);
    else
        noisy_quadratic_parts(cd, dm, *model, Mmu, Meps);
    if (Meps.size() == 0) Meps = Matrix::Zero(dim, dim);

    auto build = [&](lmi::Problem& p, Expr& mu, Expr& eps, Expr& Psi, const Expr& s2) {
        mu = p.add_scalar("mu");
        if (noisy) eps = p.add_scalar("eps");
        Psi = p.add_symmetric("PsiTilde", 2 * n);
        Expr first = Expr::scalar_times(mu, Mmu) - Emb.transpose() * Psi * Emb;
        if (noisy) first += Expr::scalar_times(eps, Meps);
        p.add_nsd(noisy ? "first<=diag(PsiTilde,0)" : "mu*M-PsiTilde<0", first);
        Expr bound = Psi + Expr::scalar_times(s2, xscale * upper_selector(n)) - lower_selector(n);
        p.add_nsd("PsiTilde<=Psi", bound, false);
        p.add_psd("mu>0", mu);
    };

    // Stage 1: largest sigma^2.
    lmi::Problem p1;
    Expr s2 = p1.add_scalar("sigma2");
    Expr mu1, eps1, Psi1;
    build(p1, mu1, eps1, Psi1, s2);
    p1.add_psd("sigma2>0", s2);
    p1.maximize(s2);
    auto sol1 = lmi::solve(p1);
    const char* fail = noisy ? "robust quadratic-trigger SDP infeasible" : "quadratic-trigger SDP infeasible";
    if (!sol1.feasible()) throw Error(fail);

    // Stage 2: sigma^2 backed off slightly, then the largest trace(PsiTilde).
    const double s_fix = sol1.scalar(s2) * (1.0 - 5e-5);
    lmi::Problem p2;
    Expr mu2, eps2, Psi2;
    build(p2, mu2, eps2, Psi2, Expr(Matrix::Constant(1, 1, s_fix)));
    p2.maximize(trace_of(Psi2));
    auto sol2 = lmi::solve(p2);
    const bool use2 = sol2.feasible();
    const lmi::Solution& sol = use2 ? sol2 : sol1;

    TriggerDesignResult r;
    r.sigma = std::sqrt(use2 ? s_fix : sol1.scalar(s2));
    r.mu = sol.scalar(use2 ? mu2 : mu1);
    if (noisy) r.eps = sol.scalar(use2 ? eps2 : eps1);
    r.PsiTilde = linalg::sym(sol.value(use2 ? Psi2 : Psi1));
    r.residual = max_residual(sol);
    if (noisy) {
        TimeRegBound tb = sigma_bound_timereg(cd, dm, *model);
        r.sigma2 = r.sigma;
        r.sigma1 = tb.sigma;
        r.nu = nu;
        r.tau.tau_bar = nu > 0.0 ? miet_bar_tau(cd, *model, r.sigma2, nu) : 0.0;
        r.tau.tau_d = miet_tau_d(cd, r.sigma1);
    } else {
        r.tau.tau = miet_tau(cd, r.sigma);
    }
    return r;
}

double compute_rho1(const ControllerDesign& cd) {
    if (cd.Q.size() == 0 || linalg::lambda_min_sym(cd.Q) <= 0.0) throw Error("invalid design");
    Matrix R = linalg::inv_sqrt_spd(cd.S);
    return 0.99 * linalg::lambda_min_sym(R * cd.Q * R);
}

TriggerDesignResult design_sigma_decay_v(const ControllerDesign& cd, const DataMatrices& dm, double varsigma) {
    if (cd.regime != Regime::NoiseFree) throw Error("decay-threshold design needs a noise-free controller");
    if (!(varsigma > 0.0 && varsigma < 1.0)) throw Error("varsigma must lie in (0,1)");
    const double rho1 = compute_rho1(cd);
    const Eigen::Index n = cd.n();
    Matrix M = trigger_matrix_M(cd, dm, 0.0, varsigma * rho1 * cd.S);
    auto prog = solve_sigma_program(M, n, true);
    if (!prog.feasible) throw Error("decay-threshold SDP infeasible");
    TriggerDesignResult r;
    r.mu = prog.mu;
    r.sigma = std::sqrt(prog.s);
    r.rho1 = rho1;
    r.varsigma = varsigma;
    r.residual = linalg::lambda_max_sym(r.mu * M - psi_matrix(r.sigma, n));
    r.tau.tau = miet_tau(cd, r.sigma);
    return r;
}

double select_varsigma_d(const ControllerDesign& cd, double margin) {
    if (!(margin >= 0.0 && margin < 1.0)) throw Error("margin must lie in [0,1)");
    Matrix R = linalg::inv_sqrt_spd(cd.S);
    return (1.0 - margin) * linalg::lambda_min_sym(R * cd.S * cd.Omega * cd.S * R);
}

double tau_from_alpha(double alpha, double sigma) {
    const double r = sigma_ratio(sigma);
    if (!(alpha > 0.0)) return std::numeric_limits<double>::infinity();
    return r / alpha;
}

double tau_d_from_constants(double c_A, double c_Phi, double sigma) {
    const double r = sigma_ratio(sigma);
    const double den = std::max(c_Phi, 1.0);
    if (!(c_A > 0.0)) return r / den;
    return std::log1p(r * c_A / den) / c_A;
}

double miet_tau(const ControllerDesign& cd, double sigma) {
    return tau_from_alpha(cd.norms.alpha, sigma);
}

double miet_bar_tau(const ControllerDesign& cd, const DisturbanceModel& model, double sigma, double nu) {
    if (!(nu > 0.0)) throw Error("mixed MIET undefined at ν=0");
    const double r = sigma_ratio(sigma);
    const double nD = linalg::spectral_norm(model.Delta);
    const double a = std::max({cd.norms.X1G + nD * cd.norms.G, cd.norms.X1L + nD * cd.norms.L,
                               sigma * model.delta / nu});
    if (!(a > 0.0)) return std::numeric_limits<double>::infinity();
    return r / a;
}

double miet_tau_d(const ControllerDesign& cd, double sigma) {
    return tau_d_from_constants(cd.norms.c_A, cd.norms.c_Phi, sigma);
}

double miet_tau_m(const PlantModel& plant, const Matrix& K, double sigma) {
    const double r = sigma_ratio(sigma);
    const double nA = linalg::spectral_norm(plant.A);
    const double den = std::max(linalg::spectral_norm(plant.A + plant.B * K), 1.0);
    if (nA == 0.0) return r / den;
    return std::log1p(r * nA / den) / nA;
}

double miet_absolute_semiglobal(double c_phi, double c_e, double nu, double cbar_x, double d_sup) {
    if (!(c_phi > 0.0) || !(nu > 0.0) || !(cbar_x > 0.0) || !(d_sup >= 0.0) || c_e < 0.0)
        throw Error("invalid semiglobal bound inputs");
    const double den = c_phi * cbar_x + d_sup;
    if (c_e == 0.0) return nu / den;
    return std::log1p(c_e * nu / den) / c_e;
}

double ultimate_bound_radius(const ControllerDesign& cd, double mu, double nu) {
    if (!(mu > 0.0)) throw Error("mu must be positive");
    if (nu < 0.0) throw Error("nu must be nonnegative");
    const double omega = linalg::lambda_min_sym(0.5 * cd.S * cd.Omega * cd.S);
    if (!(omega > 0.0)) throw Error("ultimate bound needs S Omega S positive definite");
    return nu * std::sqrt(2.0 * linalg::condition_spd(cd.S) / (omega * mu));
}

}  // namespace ddetc
