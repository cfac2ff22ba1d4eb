#include "rydpol/eigensolver.hpp"

#include <stdexcept>
#include <string>

namespace rydpol {

namespace {

template <typename Matrix>
double defect_of(const Matrix& h) {
    const double scale = h.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

template <typename Matrix>
auto solve(const Matrix& h, bool with_vectors, double tolerance) {
    using Scalar = typename Matrix::Scalar;
    if (h.rows() != h.cols()) throw std::invalid_argument("eigenspectrum needs a square matrix");
    if (h.rows() > kMaxDenseDimension)
        throw std::length_error("dimension " + std::to_string(h.rows()) +
                                " exceeds the dense eigensolver cap");
    if (!h.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
    const double defect = defect_of(h);
    if (defect > tolerance)
        throw std::invalid_argument("matrix is not Hermitian (relative defect " +
                                    std::to_string(defect) + ")");

    Spectrum<Scalar> out;
    if (h.rows() == 0) return out;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(
        h, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
    out.values = solver.eigenvalues();
    if (with_vectors) out.vectors = solver.eigenvectors();
    return out;
}

}  // namespace

double hermiticity_defect(const Eigen::MatrixXd& h) { return defect_of(h); }
double hermiticity_defect(const Eigen::MatrixXcd& h) { return defect_of(h); }

Spectrum<double> eigenspectrum(const Eigen::MatrixXd& h, bool with_vectors, double tolerance) {
    return solve(h, with_vectors, tolerance);
}

Spectrum<std::complex<double>> eigenspectrum(const Eigen::MatrixXcd& h, bool with_vectors,
                                             double tolerance) {
    return solve(h, with_vectors, tolerance);
}

}  // namespace rydpol
