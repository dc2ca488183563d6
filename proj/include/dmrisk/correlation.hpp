#pragma once

#include <string>

#include <Eigen/Dense>

namespace dmrisk {

/// Validated correlation matrix with its Cholesky factor.
class CorrelationMatrix {
public:
    CorrelationMatrix() = default;
    /// Throws DomainError unless symmetric with unit diagonal and PSD within
    /// 1e-10. Eigenvalues in [-1e-8, 0) are repaired by clipping when
    /// repair_near_psd is set; anything more negative is reported.
    explicit CorrelationMatrix(const Eigen::MatrixXd& m, bool repair_near_psd = true);

    static CorrelationMatrix identity(int d);
    /// Equicorrelation matrix with off-diagonal rho.
    static CorrelationMatrix exchangeable(int d, double rho);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const Eigen::MatrixXd& cholesky() const { return chol_; }
    bool repaired() const { return repaired_; }

private:
    Eigen::MatrixXd matrix_;
    Eigen::MatrixXd chol_;
    bool repaired_ = false;
};

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

/// Eigenvalue clipping at floor followed by rescaling to unit diagonal.
Eigen::MatrixXd repair_psd(const Eigen::MatrixXd& m, double floor = 1e-8);

/// Loads a square matrix from CSV. Asymmetric input is symmetrized from the
/// upper triangle; *symmetrized reports whether that happened.
Eigen::MatrixXd load_matrix_csv(const std::string& path, bool* symmetrized = nullptr);

}  // namespace dmrisk
