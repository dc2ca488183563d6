#include "dmrisk/correlation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "dmrisk/error.hpp"

namespace dmrisk {

double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd repair_psd(const Eigen::MatrixXd& m, double floor) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(floor);
    Eigen::MatrixXd r = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
    const Eigen::VectorXd s = r.diagonal().cwiseSqrt().cwiseInverse();
    r = s.asDiagonal() * r * s.asDiagonal();
    r.diagonal().setOnes();
    return 0.5 * (r + r.transpose());
}

CorrelationMatrix::CorrelationMatrix(const Eigen::MatrixXd& m, bool repair_near_psd) {
    require(m.rows() == m.cols() && m.rows() >= 1, "correlation matrix must be square");
    const auto d = m.rows();
    for (Eigen::Index i = 0; i < d; ++i) {
        require(std::abs(m(i, i) - 1.0) <= 1e-10, "correlation matrix must have unit diagonal");
        for (Eigen::Index j = 0; j < d; ++j) {
            require(std::isfinite(m(i, j)), "correlation matrix has non-finite entries");
            require(std::abs(m(i, j) - m(j, i)) <= 1e-10, "correlation matrix must be symmetric");
            require(std::abs(m(i, j)) <= 1.0 + 1e-12, "correlation entries must lie in [-1, 1]");
        }
    }
    matrix_ = m;
    const double lmin = min_eigenvalue(m);
    if (lmin < -1e-10) {
        if (repair_near_psd && lmin >= -1e-8) {
            matrix_ = repair_psd(m);
            repaired_ = true;
        } else {
            std::ostringstream os;
            os << "correlation matrix is not positive semidefinite: smallest eigenvalue " << lmin;
            throw DomainError(os.str());
        }
    }
    // Pivot-free Cholesky of a possibly singular PSD matrix via LDLT.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(matrix_);
    Eigen::VectorXd dvec = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd l = ldlt.matrixL();
    Eigen::MatrixXd p = ldlt.transpositionsP() * Eigen::MatrixXd::Identity(d, d);
    chol_ = p.transpose() * l * dvec.asDiagonal();
}

CorrelationMatrix CorrelationMatrix::identity(int d) {
    return CorrelationMatrix(Eigen::MatrixXd::Identity(d, d));
}

CorrelationMatrix CorrelationMatrix::exchangeable(int d, double rho) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, rho);
    m.diagonal().setOnes();
    return CorrelationMatrix(m);
}

Eigen::MatrixXd load_matrix_csv(const std::string& path, bool* symmetrized) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open matrix file " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw InputError(path + ":" + std::to_string(lineno) + ": not a number '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    const auto d = static_cast<Eigen::Index>(rows.size());
    require(d >= 1, path + ": empty matrix");
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != d) {
            throw InputError(path + ": matrix is not square");
        }
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rows[i][j];
    }
    bool sym = false;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            if (m(j, i) != m(i, j)) {
                m(j, i) = m(i, j);
                sym = true;
            }
        }
    }
    if (symmetrized) *symmetrized = sym;
    return m;
}

}  // namespace dmrisk
