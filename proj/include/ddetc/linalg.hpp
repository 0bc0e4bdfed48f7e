#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ddetc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Error raised by every module on contract violations and solver failures.
/// The message is the machine-readable reason surfaced by the CLI.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace linalg {

// Induced 2-norm.
double spectral_norm(const Matrix& M);

Matrix sym(const Matrix& M);

double lambda_max_sym(const Matrix& M);
double lambda_min_sym(const Matrix& M);

// Largest real part over the spectrum of a square matrix.
double max_real_eig(const Matrix& M);

// Moore-Penrose pseudoinverse via SVD with relative cutoff rtol * sigma_max.
Matrix pinv(const Matrix& M, double rtol = 1e-12);

// Numerical rank with relative cutoff rtol * sigma_max.
int rank(const Matrix& M, double rtol = 1e-10);

// Symmetric inverse square root of an SPD matrix.
Matrix inv_sqrt_spd(const Matrix& S);

// Condition number of an SPD matrix (lambda_max / lambda_min).
double condition_spd(const Matrix& S);

inline bool is_symmetric(const Matrix& M, double tol = 1e-12) {
    if (M.rows() != M.cols()) return false;
    double scale = 1.0 + M.cwiseAbs().maxCoeff();
    return (M - M.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace linalg
}  // namespace ddetc
