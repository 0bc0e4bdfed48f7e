#include "ddetc/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ddetc::linalg {

double spectral_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues()(0);
}

Matrix sym(const Matrix& M) { return 0.5 * (M + M.transpose()); }

double lambda_max_sym(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(M), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double lambda_min_sym(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(M), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_real_eig(const Matrix& M) {
    Eigen::EigenSolver<Matrix> es(M, false);
    return es.eigenvalues().real().maxCoeff();
}

Matrix pinv(const Matrix& M, double rtol) {
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    double cutoff = s.size() > 0 ? rtol * s(0) : 0.0;
    Vector inv = Vector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

int rank(const Matrix& M, double rtol) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& s = svd.singularValues();
    double cutoff = rtol * s(0);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) ++r;
    return r;
}

Matrix inv_sqrt_spd(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(S));
    const Vector& ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0) throw Error("matrix not positive definite");
    return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

double condition_spd(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(S), Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0) throw Error("matrix not positive definite");
    return ev.maxCoeff() / ev.minCoeff();
}

}  // namespace ddetc::linalg
