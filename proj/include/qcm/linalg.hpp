#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace qcm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Max absolute entry of A - B.
double maxAbsDiff(const Matrix& a, const Matrix& b);

/// Max absolute entry.
double maxAbs(const Matrix& a);

bool isUnitary(const Matrix& u, double tol);

/// Haar-distributed unitary: QR of a seeded complex Gaussian matrix with the
/// phases of R's diagonal folded back into Q (Mezzadri correction).
Matrix haarUnitary(int dim, std::uint64_t seed);

/// Embeds `op`, acting on the subsystems listed in `positions` (in that
/// order), into the full tensor-product space described by `dims`.
Matrix embedOperator(const Matrix& op, const std::vector<int>& positions,
                     const std::vector<int>& dims);

/// Traces out the subsystem at `position`.
Matrix partialTrace(const Matrix& rho, int position, const std::vector<int>& dims);

/// rho_keep (x) rho_new, with the new subsystem appended as the last factor.
Matrix tensorAppend(const Matrix& a, const Matrix& b);

/// Moves the last subsystem of `rho` to `position`, i.e. inverts the order
/// produced by partialTrace + tensorAppend on the same wire.
Matrix moveLastSubsystemTo(const Matrix& rho, int position, const std::vector<int>& finalDims);

} // namespace qcm
