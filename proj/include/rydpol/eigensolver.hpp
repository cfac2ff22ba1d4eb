#pragma once

#include <Eigen/Dense>

namespace rydpol {

inline constexpr Eigen::Index kMaxDenseDimension = 4096;

/// Ascending eigenvalues; `vectors` holds the matching columns when requested.
template <typename Scalar>
struct Spectrum {
    Eigen::VectorXd values;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
};

/// Largest |H - H^dagger| entry relative to the largest |H| entry.
double hermiticity_defect(const Eigen::MatrixXd& h);
double hermiticity_defect(const Eigen::MatrixXcd& h);

/// Dense Hermitian diagonalization (Householder tridiagonalization followed
/// by implicit symmetric QR). Rejects non-Hermitian input beyond `tolerance`
/// and matrices larger than kMaxDenseDimension.
Spectrum<double> eigenspectrum(const Eigen::MatrixXd& h, bool with_vectors = false,
                               double tolerance = 1e-12);
Spectrum<std::complex<double>> eigenspectrum(const Eigen::MatrixXcd& h, bool with_vectors = false,
                                             double tolerance = 1e-12);

}  // namespace rydpol
