#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "locc/similarity.hpp"

namespace locc::transform {

using numerics::ComplexMatrix;
using numerics::RealVector;
using similarity::SimilarityCertificate;
using similarity::SimilarityRefusal;
using states::BipartitePureState;
using states::Side;

/// Success probabilities below this are treated as vanishing branches.
inline constexpr double kProbabilityFloor = 1e-14;

/// One branch of a generalized measurement on a single side.  The operator
/// satisfies op† op <= I; epsilon records the success scale chosen when the
/// filter was built.
struct LocalFilter {
    ComplexMatrix op;
    Side side = Side::A;
    double epsilon = 1.0;
};

/// Validates the measurement invariant (largest eigenvalue of op† op within
/// 1e-10 of at most 1) and epsilon in (0, 1].
LocalFilter make_filter(ComplexMatrix op, Side side, double epsilon = 1.0);

/// sqrt(I - op† op) on the same side: the branch completing the filter to a
/// trace-preserving instrument.
LocalFilter complement_filter(const LocalFilter& filter);

/// A two-side generalized measurement: branches alice_ops[k] (x) bob_ops[l],
/// each side summing to at most the identity.
struct LocalProtocol {
    std::vector<ComplexMatrix> alice_ops;
    std::vector<ComplexMatrix> bob_ops;
};

/// Result of one measurement branch.  `state` is absent when the branch
/// probability fell below kProbabilityFloor.
struct ProtocolOutcome {
    ComplexMatrix raw;
    std::optional<BipartitePureState> state;
    double probability = 0.0;
};

/// Unitarity audit of the T matrices of the one-side necessity argument.
struct NecessityReport {
    bool marginals_equal_a = false;
    bool marginals_equal_b = false;
    std::vector<ComplexMatrix> t_matrices;
    RealVector unitarity_defects; // ||T† T - I||_F per source
};

struct Theorem1Result {
    SimilarityCertificate certificate;
    LocalFilter filter;
    std::vector<ProtocolOutcome> outcomes;
};

using Theorem1Decision = std::variant<Theorem1Result, SimilarityRefusal>;

struct Theorem2Verdict {
    bool feasible = false;
    std::optional<Side> side;
};

/// Bob-side operator moved to Alice's side across a shared state:
/// (alice_op (x) I)|psi> = rescale * (I (x) bob_op)|psi>.
struct Transfer {
    ComplexMatrix alice_op;
    double rescale = 1.0;
};

/// One state of a two-side measurement rewritten as a one-side instance.
struct TwoSideInstance {
    std::optional<BipartitePureState> reduced_state; // after the moved Bob op
    ComplexMatrix one_side_op;                       // alice_op * moved bob_op
    double scale = 1.0;                              // transfer rescale
    double residual = 0.0;                           // amplitude equality defect
};

ProtocolOutcome apply_filter(const BipartitePureState& state, const LocalFilter& filter);

std::vector<ProtocolOutcome> apply_protocol(const BipartitePureState& state,
                                            const LocalProtocol& protocol);

/// The common filter of the sufficient condition: P = sqrt(eps) sqrt(gamma)
/// V† rho_ref^{-1/2}, with eps maximal such that P† P <= I.  `target` must be
/// supported exactly on the certificate's k shared coordinates.
LocalFilter build_common_filter(const std::vector<BipartitePureState>& sources,
                                const RealVector& target,
                                const SimilarityCertificate& certificate, Side side);

/// Decides whether the set admits one filter mapping every member to
/// k-subspace equivalent outcomes; on success returns the certificate, the
/// filter built for the uniform k-dimensional target, and the verified
/// outcomes.
Theorem1Decision decide_theorem1(const std::vector<BipartitePureState>& sources,
                                 Eigen::Index k, Side side);

/// Full-rank sets are transformable to N-dimensional-subspace equivalent
/// outputs iff one side's marginals all agree.
Theorem2Verdict decide_theorem2(const std::vector<BipartitePureState>& sources);

/// Reconstructs the T matrices linking each source to the reference through
/// the realized outcomes and reports their unitarity defects together with
/// the marginal-equality flags.
NecessityReport verify_necessity(const std::vector<BipartitePureState>& sources,
                                 const LocalFilter& filter,
                                 const std::vector<ProtocolOutcome>& outcomes);

/// Transpose mirror across the maximally entangled state.
ComplexMatrix ricochet(const ComplexMatrix& op, Eigen::Index n);

Transfer transfer_bob_to_alice(const BipartitePureState& state, const ComplexMatrix& bob_op);

/// Rewrites the two-side branch alice_op (x) bob_op on each state as an
/// equivalent one-side action, amplitude-verified.
std::vector<TwoSideInstance> two_side_reduction(const std::vector<BipartitePureState>& pair,
                                                const ComplexMatrix& alice_op,
                                                const ComplexMatrix& bob_op);

/// From a one-side filter run that produced k-subspace equivalent outcomes,
/// rebuilds a similarity certificate for the sources' relative marginals.
SimilarityCertificate extract_one_side_necessity(
    const std::vector<BipartitePureState>& sources, const LocalFilter& filter,
    const std::vector<ProtocolOutcome>& outcomes, Eigen::Index k);

} // namespace locc::transform
