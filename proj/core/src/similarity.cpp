#include "locc/similarity.hpp"

#include <algorithm>
#include <cmath>

namespace locc::similarity {

namespace {

constexpr double kPositiveScaleTol = 1e-10;
constexpr double kIntersectionTol = 1e-7;

struct ClusterChoice {
    double value;
    ComplexMatrix projector;
};

// Positive eigenvalue clusters of one operator, descending.
std::vector<ClusterChoice> positive_clusters(const ComplexMatrix& op) {
    std::vector<ClusterChoice> out;
    for (const auto& c : numerics::eigenvalue_clusters(numerics::hermitian_eig(op)))
        if (c.value > kPositiveScaleTol)
            out.push_back(ClusterChoice{c.value, c.projector});
    return out;
}

// Depth-first enumeration over one positive cluster per operator, pruning on
// the running intersection dimension.  Lexicographic (descending-eigenvalue)
// order makes the first accepted tuple deterministic.
bool search_common_block(const std::vector<std::vector<ClusterChoice>>& clusters,
                         std::size_t level, Eigen::Index k,
                         ComplexMatrix current_basis,
                         std::vector<double>& scales_out,
                         ComplexMatrix& basis_out) {
    if (level == clusters.size()) {
        basis_out = std::move(current_basis);
        return true;
    }
    for (const auto& choice : clusters[level]) {
        ComplexMatrix current_proj = current_basis * current_basis.adjoint();
        numerics::SubspaceIntersection isec =
            numerics::subspace_intersection({current_proj, choice.projector},
                                            kIntersectionTol);
        if (isec.dimension < k)
            continue;
        scales_out[level] = choice.value;
        if (search_common_block(clusters, level + 1, k, isec.basis, scales_out, basis_out))
            return true;
    }
    return false;
}

std::optional<SimilarityCertificate> try_k(const std::vector<RelativeMarginal>& operators,
                                           Eigen::Index k) {
    const Eigen::Index n = operators.front().matrix.rows();
    std::vector<std::vector<ClusterChoice>> clusters;
    clusters.reserve(operators.size());
    for (const auto& op : operators) {
        clusters.push_back(positive_clusters(op.matrix));
        if (clusters.back().empty())
            return std::nullopt;
    }

    std::vector<double> scales(operators.size(), 0.0);
    ComplexMatrix basis;
    if (!search_common_block(clusters, 0, k, ComplexMatrix::Identity(n, n), scales, basis))
        return std::nullopt;

    SimilarityCertificate cert;
    cert.k = k;
    cert.v = numerics::complete_unitary(basis.leftCols(k));
    cert.scales = Eigen::Map<const RealVector>(scales.data(), Eigen::Index(scales.size()));
    const auto rest = cert.v.rightCols(n - k);
    for (const auto& op : operators) {
        ComplexMatrix d = rest.adjoint() * op.matrix * rest;
        cert.blocks.push_back(0.5 * (d + d.adjoint()));
    }
    return cert;
}

} // namespace

RelativeMarginal relative_marginal(const BipartitePureState& ref,
                                   const BipartitePureState& other, Side side) {
    if (ref.dim_a() != other.dim_a() || ref.dim_b() != other.dim_b())
        throw DimensionMismatch("relative marginal needs states on the same systems");
    const ComplexMatrix rho_ref = states::marginal(ref, side).matrix();
    const ComplexMatrix rho_other = states::marginal(other, side).matrix();
    const ComplexMatrix w = numerics::psd_pinv_sqrt(rho_ref);
    ComplexMatrix f = w * rho_other * w;
    return RelativeMarginal{0.5 * (f + f.adjoint()), numerics::numeric_rank(rho_ref)};
}

SimilarityDecision check_similar_about_ik(const std::vector<RelativeMarginal>& operators,
                                          Eigen::Index k) {
    if (operators.empty())
        throw EmptySet("no operators to check");
    const Eigen::Index n = operators.front().matrix.rows();
    for (const auto& op : operators)
        if (op.matrix.rows() != n || op.matrix.cols() != n)
            throw DimensionMismatch("operators have mixed dimensions");
    if (k < 1 || k > n)
        throw DimensionMismatch("k must satisfy 1 <= k <= N");

    if (auto cert = try_k(operators, k)) {
        validate_certificate(*cert, operators);
        return *cert;
    }
    for (Eigen::Index smaller = k - 1; smaller >= 1; --smaller)
        if (try_k(operators, smaller))
            return SimilarityRefusal{smaller};
    return SimilarityRefusal{0};
}

KEquivalence k_subspace_equivalent(const BipartitePureState& a, const BipartitePureState& b,
                                   Eigen::Index k, double tol) {
    const states::SchmidtForm sa = states::schmidt(a);
    const states::SchmidtForm sb = states::schmidt(b);
    if (k < 1)
        throw DimensionMismatch("k must be positive");
    if (sa.rank < k || sb.rank < k)
        throw RankTooSmall("Schmidt ranks " + std::to_string(sa.rank) + ", " +
                           std::to_string(sb.rank) + " below k=" + std::to_string(k));

    std::vector<double> ratios(static_cast<std::size_t>(k));
    for (Eigen::Index t = 0; t < k; ++t)
        ratios[static_cast<std::size_t>(t)] = sa.coefficients[t] / sb.coefficients[t];
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    const double c = sorted.size() % 2 == 1
                         ? sorted[mid]
                         : 0.5 * (sorted[mid - 1] + sorted[mid]);

    for (double r : ratios)
        if (std::abs(r - c) > tol * c)
            return KEquivalence{false, std::nullopt};
    return KEquivalence{true, c};
}

double certificate_residual(const SimilarityCertificate& cert,
                            const std::vector<RelativeMarginal>& operators) {
    const Eigen::Index n = cert.v.rows();
    double worst = 0.0;
    for (std::size_t l = 0; l < operators.size(); ++l) {
        ComplexMatrix block = ComplexMatrix::Zero(n, n);
        block.topLeftCorner(cert.k, cert.k) =
            cert.scales[Eigen::Index(l)] * ComplexMatrix::Identity(cert.k, cert.k);
        block.bottomRightCorner(n - cert.k, n - cert.k) = cert.blocks[l];
        worst = std::max(worst,
                         (cert.v.adjoint() * operators[l].matrix * cert.v - block).norm());
    }
    return worst;
}

void validate_certificate(const SimilarityCertificate& cert,
                          const std::vector<RelativeMarginal>& operators) {
    if (cert.scales.size() != Eigen::Index(operators.size()) ||
        cert.blocks.size() != operators.size())
        throw InvalidCertificate("certificate arity does not match the operator set");
    const Eigen::Index n = cert.v.rows();
    if ((cert.v.adjoint() * cert.v - ComplexMatrix::Identity(n, n)).norm() > 1e-9)
        throw InvalidCertificate("certificate V is not unitary within 1e-9");
    if (cert.scales.minCoeff() <= 0.0)
        throw InvalidCertificate("certificate scale is not positive");
    const double residual = certificate_residual(cert, operators);
    if (residual > kCertificateTol)
        throw InvalidCertificate("certificate residual " + std::to_string(residual) +
                                 " exceeds tolerance");
}

} // namespace locc::similarity
