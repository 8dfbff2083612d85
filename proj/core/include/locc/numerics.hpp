#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "locc/errors.hpp"

namespace locc::numerics {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Hermitian-symmetry tolerance used by the decomposition entry points.
inline constexpr double kHermitianTol = 1e-10;
/// Relative cutoff separating numerical zeros from genuine rank.
inline constexpr double kDefaultRankTol = 1e-10;
/// Eigenvalues closer than this (absolute) count as one degenerate cluster.
inline constexpr double kClusterTol = 1e-8;
/// Eigenvalues below this are genuine negativity, not roundoff.
inline constexpr double kPsdErrorTol = -1e-8;

/// Eigendecomposition of a Hermitian matrix; eigenvalues sorted descending,
/// eigenvector columns aligned with them.
struct HermitianEig {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;
};

/// Full singular value decomposition m = u * diag(singular_values) * w†,
/// singular values sorted descending, u and w unitary.
struct Svd {
    ComplexMatrix u;
    RealVector singular_values;
    ComplexMatrix w;
};

struct SubspaceIntersection {
    Eigen::Index dimension;
    ComplexMatrix basis; // orthonormal columns spanning the intersection
};

/// A degenerate eigenvalue cluster: mean value and a projector onto its
/// eigenspace.
struct EigenvalueCluster {
    double value;
    ComplexMatrix projector;
    Eigen::Index multiplicity;
};

void require_finite(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);

HermitianEig hermitian_eig(const ComplexMatrix& m);
Svd svd(const ComplexMatrix& m);

ComplexMatrix psd_sqrt(const ComplexMatrix& m);
ComplexMatrix psd_pinv_sqrt(const ComplexMatrix& m, double rank_tol = kDefaultRankTol);

/// Moore-Penrose pseudo-inverse with a relative rank cutoff.
ComplexMatrix pinv(const ComplexMatrix& m, double rank_tol = kDefaultRankTol);

/// Largest singular value.
double operator_norm(const ComplexMatrix& m);

/// Rank with a relative singular-value cutoff.
Eigen::Index numeric_rank(const ComplexMatrix& m, double rank_tol = kDefaultRankTol);

/// Intersection of the ranges of a family of orthogonal projectors, detected
/// as the near-1 eigenspace of the averaged projector.
SubspaceIntersection subspace_intersection(const std::vector<ComplexMatrix>& projectors,
                                           double tol);

/// Groups a Hermitian spectrum into degenerate clusters (descending order,
/// chain clustering with an absolute gap threshold).
std::vector<EigenvalueCluster> eigenvalue_clusters(const HermitianEig& eig,
                                                   double cluster_tol = kClusterTol);

/// Extends orthonormal columns to a full unitary; the input columns are kept
/// verbatim in front, the completion follows the canonical basis order.
ComplexMatrix complete_unitary(const ComplexMatrix& columns);

} // namespace locc::numerics
