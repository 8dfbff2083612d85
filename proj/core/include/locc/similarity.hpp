#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "locc/states.hpp"

namespace locc::similarity {

using numerics::ComplexMatrix;
using numerics::RealVector;
using states::BipartitePureState;
using states::Side;

/// Frobenius residual admitted on certificate block structure.
inline constexpr double kCertificateTol = 1e-7;

/// F = rho(ref)^{-1/2} rho(other) rho(ref)^{-1/2}, the relative marginal
/// density operator of the pair on one side; computed on the support of the
/// reference marginal.
struct RelativeMarginal {
    ComplexMatrix matrix;
    Eigen::Index source_rank; // rank of the reference state's marginal
};

/// Witness that a set of operators is simultaneously unitarily
/// block-diagonalizable as v† F_l v = diag(scales[l] * I_k, blocks[l]),
/// with the shared scalar block occupying the first k coordinates of v.
struct SimilarityCertificate {
    Eigen::Index k = 0;
    ComplexMatrix v;
    RealVector scales;                 // s_l > 0, one per operator
    std::vector<ComplexMatrix> blocks; // Hermitian (N-k)x(N-k) residuals
};

/// Outcome of a failed certificate search; best_k is the largest block size
/// that does admit a certificate (0 if none).
struct SimilarityRefusal {
    Eigen::Index best_k = 0;
};

using SimilarityDecision = std::variant<SimilarityCertificate, SimilarityRefusal>;

RelativeMarginal relative_marginal(const BipartitePureState& ref,
                                   const BipartitePureState& other, Side side);

/// Searches for a common k-dimensional scalar block across the set.  One
/// eigenvalue cluster per operator is enumerated (descending eigenvalue,
/// lexicographic across operators, positive clusters only) and the cluster
/// eigenspaces intersected; the first tuple whose intersection reaches
/// dimension k wins.
SimilarityDecision check_similar_about_ik(const std::vector<RelativeMarginal>& operators,
                                          Eigen::Index k);

struct KEquivalence {
    bool equivalent = false;
    std::optional<double> ratio; // the constant c with mu_t(a) = c * mu_t(b)
};

/// Tests whether the k largest Schmidt coefficients of a and b are
/// proportional within relative tolerance tol; c is fit as the median ratio.
KEquivalence k_subspace_equivalent(const BipartitePureState& a, const BipartitePureState& b,
                                   Eigen::Index k, double tol);

/// max_l || v† F_l v - diag(s_l I_k, D_l) ||_F, for reports and tests.
double certificate_residual(const SimilarityCertificate& cert,
                            const std::vector<RelativeMarginal>& operators);

/// Throws InvalidCertificate unless the certificate matches the operators
/// within kCertificateTol and all scales are positive.
void validate_certificate(const SimilarityCertificate& cert,
                          const std::vector<RelativeMarginal>& operators);

} // namespace locc::similarity
