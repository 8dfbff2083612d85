#include "locc/transform.hpp"

#include <algorithm>
#include <cmath>

namespace locc::transform {

namespace {

using states::DensityOperator;
using states::SchmidtForm;

constexpr double kEqualMarginalTol = 1e-9;
constexpr double kPairwiseTol = 1e-7;

Eigen::Index side_dim(const BipartitePureState& s, Side side) {
    return side == Side::A ? s.dim_a() : s.dim_b();
}

void require_same_systems(const std::vector<BipartitePureState>& states) {
    if (states.empty())
        throw EmptySet("state set is empty");
    for (const auto& s : states)
        if (s.dim_a() != states.front().dim_a() || s.dim_b() != states.front().dim_b())
            throw DimensionMismatch("states live on different systems");
}

ComplexMatrix sqrt_diag(const RealVector& v) {
    RealVector r = v.cwiseMax(0.0).cwiseSqrt();
    return r.asDiagonal().toDenseMatrix().cast<numerics::Complex>();
}

ComplexMatrix inv_sqrt_diag(const RealVector& v) {
    RealVector r(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        r[i] = 1.0 / std::sqrt(v[i]);
    return r.asDiagonal().toDenseMatrix().cast<numerics::Complex>();
}

bool marginals_all_equal(const std::vector<BipartitePureState>& sources, Side side) {
    const ComplexMatrix first = states::marginal(sources.front(), side).matrix();
    for (std::size_t i = 1; i < sources.size(); ++i)
        if ((states::marginal(sources[i], side).matrix() - first).norm() > kEqualMarginalTol)
            return false;
    return true;
}

std::vector<similarity::RelativeMarginal>
relative_marginals_of(const std::vector<BipartitePureState>& sources, Side side) {
    std::vector<similarity::RelativeMarginal> rels;
    rels.reserve(sources.size());
    for (const auto& s : sources)
        rels.push_back(similarity::relative_marginal(sources.front(), s, side));
    return rels;
}

} // namespace

LocalFilter make_filter(ComplexMatrix op, Side side, double epsilon) {
    numerics::require_finite(op);
    if (op.rows() != op.cols())
        throw NotSquare("filter operator must be square");
    const double top = numerics::operator_norm(op);
    if (top * top > 1.0 + 1e-10)
        throw NotContractive("largest eigenvalue of P†P is " + std::to_string(top * top));
    if (!(epsilon > 0.0) || epsilon > 1.0 + 1e-12)
        throw Error("epsilon must lie in (0, 1]");
    return LocalFilter{std::move(op), side, std::min(epsilon, 1.0)};
}

LocalFilter complement_filter(const LocalFilter& filter) {
    const Eigen::Index n = filter.op.rows();
    ComplexMatrix gram = ComplexMatrix::Identity(n, n) - filter.op.adjoint() * filter.op;
    return make_filter(numerics::psd_sqrt(gram), filter.side, 1.0);
}

ProtocolOutcome apply_filter(const BipartitePureState& state, const LocalFilter& filter) {
    const ComplexMatrix& m = state.amplitudes();
    const Eigen::Index need = filter.side == Side::A ? m.rows() : m.cols();
    if (filter.op.rows() != filter.op.cols() || filter.op.rows() != need)
        throw DimensionMismatch("filter dimension does not match the chosen side");

    ComplexMatrix raw = filter.side == Side::A ? ComplexMatrix(filter.op * m)
                                               : ComplexMatrix(m * filter.op.transpose());
    const double p = raw.squaredNorm();
    if (p < kProbabilityFloor)
        throw ZeroProbability("branch probability " + std::to_string(p) + " vanishes");
    return ProtocolOutcome{raw, BipartitePureState::normalized(raw), p};
}

std::vector<ProtocolOutcome> apply_protocol(const BipartitePureState& state,
                                            const LocalProtocol& protocol) {
    const ComplexMatrix& m = state.amplitudes();
    if (protocol.alice_ops.empty() || protocol.bob_ops.empty())
        throw IncompleteProtocol("protocol needs at least one branch per side");

    auto check_side = [](const std::vector<ComplexMatrix>& ops, Eigen::Index dim,
                         const char* side) {
        ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
        for (const auto& op : ops) {
            if (op.rows() != dim || op.cols() != dim)
                throw DimensionMismatch(std::string("operator size mismatch on side ") + side);
            sum += op.adjoint() * op;
        }
        numerics::HermitianEig eig = numerics::hermitian_eig(0.5 * (sum + sum.adjoint()));
        if (eig.eigenvalues[0] > 1.0 + 1e-9)
            throw IncompleteProtocol(std::string("completeness bound violated on side ") + side);
    };
    check_side(protocol.alice_ops, m.rows(), "A");
    check_side(protocol.bob_ops, m.cols(), "B");

    std::vector<ProtocolOutcome> outcomes;
    outcomes.reserve(protocol.alice_ops.size() * protocol.bob_ops.size());
    for (const auto& a : protocol.alice_ops) {
        for (const auto& b : protocol.bob_ops) {
            ComplexMatrix raw = a * m * b.transpose();
            const double p = raw.squaredNorm();
            std::optional<BipartitePureState> out;
            if (p >= kProbabilityFloor)
                out = BipartitePureState::normalized(raw);
            outcomes.push_back(ProtocolOutcome{std::move(raw), std::move(out), p});
        }
    }
    return outcomes;
}

LocalFilter build_common_filter(const std::vector<BipartitePureState>& sources,
                                const RealVector& target,
                                const SimilarityCertificate& certificate, Side side) {
    require_same_systems(sources);
    const Eigen::Index n = side_dim(sources.front(), side);
    const Eigen::Index k = certificate.k;
    if (certificate.v.rows() != n)
        throw InvalidCertificate("certificate dimension does not match the side");

    if (target.size() != n)
        throw BadTargetSupport("target needs one coefficient per side dimension");
    if (std::abs(target.sum() - 1.0) > 1e-9)
        throw BadTargetSupport("target coefficients must sum to 1");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i < k && !(target[i] > 0.0))
            throw BadTargetSupport("target must be positive on the first k coordinates");
        if (i >= k && std::abs(target[i]) > 1e-14)
            throw BadTargetSupport("target must vanish outside the first k coordinates");
    }

    const ComplexMatrix rho = states::marginal(sources.front(), side).matrix();
    if (numerics::numeric_rank(rho) < k)
        throw RankDeficientReference("reference marginal rank below k");

    similarity::validate_certificate(certificate, relative_marginals_of(sources, side));

    const ComplexMatrix whitener = numerics::psd_pinv_sqrt(rho);
    ComplexMatrix base = sqrt_diag(target) * certificate.v.adjoint() * whitener;
    const double top = numerics::operator_norm(base);
    if (top < 1e-12)
        throw InvalidCertificate("filter collapsed to zero; certificate block "
                                 "escapes the reference support");
    const double epsilon = 1.0 / (top * top);
    return make_filter(std::sqrt(epsilon) * base, side, epsilon);
}

Theorem1Decision decide_theorem1(const std::vector<BipartitePureState>& sources,
                                 Eigen::Index k, Side side) {
    require_same_systems(sources);
    const Eigen::Index n = side_dim(sources.front(), side);

    similarity::SimilarityDecision decision =
        similarity::check_similar_about_ik(relative_marginals_of(sources, side), k);
    if (std::holds_alternative<SimilarityRefusal>(decision))
        return std::get<SimilarityRefusal>(decision);

    auto certificate = std::get<SimilarityCertificate>(decision);
    RealVector target = RealVector::Zero(n);
    target.head(k).setConstant(1.0 / static_cast<double>(k));

    LocalFilter filter = build_common_filter(sources, target, certificate, side);
    std::vector<ProtocolOutcome> outcomes;
    outcomes.reserve(sources.size());
    for (const auto& s : sources)
        outcomes.push_back(apply_filter(s, filter));

    for (std::size_t i = 0; i < outcomes.size(); ++i)
        for (std::size_t j = i + 1; j < outcomes.size(); ++j)
            if (!similarity::k_subspace_equivalent(*outcomes[i].state, *outcomes[j].state,
                                                   k, kPairwiseTol)
                     .equivalent)
                throw InvalidCertificate("constructed filter failed the outcome "
                                         "equivalence check");

    return Theorem1Result{std::move(certificate), std::move(filter), std::move(outcomes)};
}

Theorem2Verdict decide_theorem2(const std::vector<BipartitePureState>& sources) {
    require_same_systems(sources);
    const Eigen::Index n = std::max(sources.front().dim_a(), sources.front().dim_b());
    for (const auto& s : sources) {
        if (s.dim_a() != s.dim_b())
            throw NotFullRank("state cannot have Schmidt rank N on unequal dimensions");
        if (states::schmidt(s).rank != n)
            throw NotFullRank("source is not an N-dimensional entangled state");
    }
    if (marginals_all_equal(sources, Side::A))
        return Theorem2Verdict{true, Side::A};
    if (marginals_all_equal(sources, Side::B))
        return Theorem2Verdict{true, Side::B};
    return Theorem2Verdict{false, std::nullopt};
}

namespace {

struct SideNormalized {
    std::vector<BipartitePureState> sources;
    std::vector<BipartitePureState> outcome_states;
    std::vector<double> probabilities;
};

// Rewrites a side-B run as the equivalent side-A run on swapped states.
SideNormalized normalize_to_side_a(const std::vector<BipartitePureState>& sources,
                                   const LocalFilter& filter,
                                   const std::vector<ProtocolOutcome>& outcomes) {
    if (sources.size() != outcomes.size() || sources.empty())
        throw DimensionMismatch("sources and outcomes must align one-to-one");
    SideNormalized out;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (!outcomes[i].state)
            throw RankDeficientOutcome("outcome " + std::to_string(i) +
                                       " has a vanishing branch");
        out.sources.push_back(filter.side == Side::A ? sources[i]
                                                     : states::swap_sides(sources[i]));
        out.outcome_states.push_back(filter.side == Side::A
                                         ? *outcomes[i].state
                                         : states::swap_sides(*outcomes[i].state));
        out.probabilities.push_back(outcomes[i].probability);
    }
    return out;
}

// T_nu = sqrt(p_1/p_nu) F_1^T B_1* diag(lambda^{-1/2}) A_1† A_nu
//        diag(sqrt(mu)) B_nu^T F_nu*, built entirely from Schmidt data.
ComplexMatrix necessity_t_matrix(const SchmidtForm& src_ref, const SchmidtForm& out_ref,
                                 const SchmidtForm& src, const SchmidtForm& out,
                                 double p_ref, double p) {
    const ComplexMatrix ref_inverse = src_ref.u_b.conjugate() *
                                      inv_sqrt_diag(src_ref.coefficients) *
                                      src_ref.u_a.adjoint();
    const ComplexMatrix src_amp = src.u_a * sqrt_diag(src.coefficients) * src.u_b.transpose();
    return std::sqrt(p_ref / p) * out_ref.u_b.transpose() * ref_inverse * src_amp *
           out.u_b.conjugate();
}

} // namespace

NecessityReport verify_necessity(const std::vector<BipartitePureState>& sources,
                                 const LocalFilter& filter,
                                 const std::vector<ProtocolOutcome>& outcomes) {
    require_same_systems(sources);
    NecessityReport report;
    report.marginals_equal_a = marginals_all_equal(sources, Side::A);
    report.marginals_equal_b = marginals_all_equal(sources, Side::B);

    SideNormalized run = normalize_to_side_a(sources, filter, outcomes);
    const Eigen::Index n = run.sources.front().dim_a();
    if (run.sources.front().dim_b() != n)
        throw NotFullRank("necessity audit needs square states");

    const SchmidtForm src_ref = states::schmidt(run.sources.front());
    if (src_ref.rank != n)
        throw NotFullRank("reference source is not full Schmidt rank");
    const SchmidtForm out_ref = states::schmidt(run.outcome_states.front());
    if (out_ref.rank != n)
        throw RankDeficientOutcome("reference outcome is not full Schmidt rank");

    report.unitarity_defects.resize(Eigen::Index(run.sources.size()));
    for (std::size_t i = 0; i < run.sources.size(); ++i) {
        const SchmidtForm src = states::schmidt(run.sources[i]);
        const SchmidtForm out = states::schmidt(run.outcome_states[i]);
        if (out.rank != n)
            throw RankDeficientOutcome("outcome " + std::to_string(i) +
                                       " is not full Schmidt rank");
        ComplexMatrix t = necessity_t_matrix(src_ref, out_ref, src, out,
                                             run.probabilities.front(),
                                             run.probabilities[i]);
        report.unitarity_defects[Eigen::Index(i)] =
            (t.adjoint() * t - ComplexMatrix::Identity(n, n)).norm();
        report.t_matrices.push_back(std::move(t));
    }
    return report;
}

ComplexMatrix ricochet(const ComplexMatrix& op, Eigen::Index n) {
    if (op.rows() != op.cols())
        throw NotSquare("ricochet needs a square operator");
    if (op.rows() != n)
        throw DimensionMismatch("operator does not act on dimension n");
    return op.transpose();
}

Transfer transfer_bob_to_alice(const BipartitePureState& state, const ComplexMatrix& bob_op) {
    const ComplexMatrix& m = state.amplitudes();
    if (bob_op.rows() != state.dim_b() || bob_op.cols() != state.dim_b())
        throw DimensionMismatch("Bob operator does not match dim_b");

    const ComplexMatrix moved = m * bob_op.transpose() * numerics::pinv(m);
    const ComplexMatrix target = m * bob_op.transpose();
    const double leak = (moved * m - target).norm();
    if (leak > 1e-9 * std::max(1.0, target.norm()))
        throw UnsupportedOperator("Bob operator leaks outside the state's support");

    const double top = numerics::operator_norm(moved);
    const double rescale = top > 1.0 ? 1.0 / top : 1.0;
    return Transfer{rescale * moved, rescale};
}

std::vector<TwoSideInstance> two_side_reduction(const std::vector<BipartitePureState>& pair,
                                                const ComplexMatrix& alice_op,
                                                const ComplexMatrix& bob_op) {
    require_same_systems(pair);
    std::vector<TwoSideInstance> instances;
    instances.reserve(pair.size());
    for (const auto& state : pair) {
        const ComplexMatrix& m = state.amplitudes();
        if (alice_op.rows() != state.dim_a() || alice_op.cols() != state.dim_a())
            throw DimensionMismatch("Alice operator does not match dim_a");
        Transfer transfer = transfer_bob_to_alice(state, bob_op);

        TwoSideInstance instance;
        instance.one_side_op = alice_op * transfer.alice_op;
        instance.scale = transfer.rescale;
        // one-side action on the reduced state vs the original two-side action
        instance.residual = (instance.one_side_op * m -
                             transfer.rescale * alice_op * m * bob_op.transpose())
                                .norm();
        ComplexMatrix reduced_raw = transfer.alice_op * m;
        if (reduced_raw.squaredNorm() >= kProbabilityFloor)
            instance.reduced_state = BipartitePureState::normalized(reduced_raw);
        instances.push_back(std::move(instance));
    }
    return instances;
}

SimilarityCertificate extract_one_side_necessity(
    const std::vector<BipartitePureState>& sources, const LocalFilter& filter,
    const std::vector<ProtocolOutcome>& outcomes, Eigen::Index k) {
    require_same_systems(sources);
    SideNormalized run = normalize_to_side_a(sources, filter, outcomes);
    const Eigen::Index n = run.sources.front().dim_a();
    if (run.sources.front().dim_b() != n)
        throw NotFullRank("one-side extraction needs square states");

    const SchmidtForm src_ref = states::schmidt(run.sources.front());
    if (src_ref.rank != n)
        throw NotFullRank("reference source is not full Schmidt rank");
    const SchmidtForm out_ref = states::schmidt(run.outcome_states.front());
    if (out_ref.rank < k)
        throw NotKEquivalent("reference outcome rank below k");

    for (std::size_t i = 0; i < run.outcome_states.size(); ++i) {
        similarity::KEquivalence eq = similarity::k_subspace_equivalent(
            run.outcome_states.front(), run.outcome_states[i], k, kPairwiseTol);
        if (!eq.equivalent)
            throw NotKEquivalent("outcome " + std::to_string(i) +
                                 " is not k-subspace equivalent to the reference");
    }

    // The reference outcome's Bob unitary, mirrored back through the
    // reference source frame, simultaneously block-diagonalizes the set's
    // relative marginals.
    SimilarityCertificate cert;
    cert.k = k;
    cert.v = src_ref.u_a * src_ref.u_b.transpose() * out_ref.u_b.conjugate();

    std::vector<similarity::RelativeMarginal> rels;
    rels.reserve(run.sources.size());
    for (const auto& s : run.sources)
        rels.push_back(similarity::relative_marginal(run.sources.front(), s, Side::A));

    cert.scales.resize(Eigen::Index(run.sources.size()));
    for (std::size_t l = 0; l < rels.size(); ++l) {
        ComplexMatrix g = cert.v.adjoint() * rels[l].matrix * cert.v;
        cert.scales[Eigen::Index(l)] = g.topLeftCorner(k, k).real().trace() /
                                       static_cast<double>(k);
        ComplexMatrix d = g.bottomRightCorner(n - k, n - k);
        cert.blocks.push_back(0.5 * (d + d.adjoint()));
    }
    similarity::validate_certificate(cert, rels);
    return cert;
}

} // namespace locc::transform
