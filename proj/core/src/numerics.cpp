#include "locc/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace locc::numerics {

namespace {

void require_square(const ComplexMatrix& m) {
    if (m.rows() != m.cols())
        throw NotSquare("matrix is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", expected square");
}

} // namespace

void require_finite(const ComplexMatrix& m) {
    if (!m.allFinite())
        throw NotFinite("matrix contains NaN or Inf entries");
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols())
        return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

HermitianEig hermitian_eig(const ComplexMatrix& m) {
    require_finite(m);
    require_square(m);
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kHermitianTol)
        throw NotHermitian("asymmetry " + std::to_string(asym) + " exceeds tolerance");

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (m + m.adjoint()));
    if (solver.info() != Eigen::Success)
        throw Error("hermitian eigendecomposition failed to converge");

    // Eigen sorts ascending; flip to descending.
    const Eigen::Index n = m.rows();
    HermitianEig out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = ComplexMatrix(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        out.eigenvectors.col(j) = solver.eigenvectors().col(n - 1 - j);
    return out;
}

Svd svd(const ComplexMatrix& m) {
    require_finite(m);
    Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return Svd{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

namespace {

// Shared eigenvalue-function kernel for the PSD matrix functions.
ComplexMatrix psd_eigen_map(const ComplexMatrix& m, auto&& fn) {
    HermitianEig eig = hermitian_eig(m);
    RealVector vals = eig.eigenvalues;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals[i] < kPsdErrorTol)
            throw NotPsd("eigenvalue " + std::to_string(vals[i]) +
                         " below the PSD tolerance");
        if (vals[i] < 0.0)
            vals[i] = 0.0; // roundoff negativity clamps to zero
    }
    RealVector mapped(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        mapped[i] = fn(vals[i], vals);
    ComplexMatrix result = eig.eigenvectors * mapped.asDiagonal().toDenseMatrix().cast<Complex>() *
                           eig.eigenvectors.adjoint();
    return 0.5 * (result + result.adjoint());
}

} // namespace

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    return psd_eigen_map(m, [](double v, const RealVector&) { return std::sqrt(v); });
}

ComplexMatrix psd_pinv_sqrt(const ComplexMatrix& m, double rank_tol) {
    return psd_eigen_map(m, [rank_tol](double v, const RealVector& all) {
        const double cutoff = rank_tol * std::max(all.maxCoeff(), 0.0);
        return v > cutoff && v > 0.0 ? 1.0 / std::sqrt(v) : 0.0;
    });
}

ComplexMatrix pinv(const ComplexMatrix& m, double rank_tol) {
    Svd dec = svd(m);
    const double cutoff = rank_tol * (dec.singular_values.size() > 0
                                          ? dec.singular_values.maxCoeff()
                                          : 0.0);
    RealVector inv = dec.singular_values;
    for (Eigen::Index i = 0; i < inv.size(); ++i)
        inv[i] = inv[i] > cutoff && inv[i] > 0.0 ? 1.0 / inv[i] : 0.0;
    return dec.w * inv.asDiagonal().toDenseMatrix().cast<Complex>() * dec.u.adjoint();
}

double operator_norm(const ComplexMatrix& m) {
    if (m.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> solver(m);
    return solver.singularValues().size() > 0 ? solver.singularValues()[0] : 0.0;
}

Eigen::Index numeric_rank(const ComplexMatrix& m, double rank_tol) {
    Eigen::JacobiSVD<ComplexMatrix> solver(m);
    const auto& s = solver.singularValues();
    if (s.size() == 0)
        return 0;
    const double cutoff = rank_tol * s[0];
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > cutoff && s[i] > 0.0)
            ++r;
    return r;
}

SubspaceIntersection subspace_intersection(const std::vector<ComplexMatrix>& projectors,
                                           double tol) {
    if (projectors.empty())
        throw EmptySet("subspace_intersection needs at least one projector");
    const Eigen::Index n = projectors.front().rows();
    ComplexMatrix avg = ComplexMatrix::Zero(n, n);
    for (const auto& p : projectors) {
        if (p.rows() != n || p.cols() != n)
            throw DimensionMismatch("projector dimensions disagree");
        if (!is_hermitian(p, 1e-9) || (p * p - p).cwiseAbs().maxCoeff() > 1e-9)
            throw NotProjector("input is not an orthogonal projector within 1e-9");
        avg += p;
    }
    avg /= static_cast<double>(projectors.size());

    HermitianEig eig = hermitian_eig(avg);
    Eigen::Index dim = 0;
    while (dim < n && eig.eigenvalues[dim] >= 1.0 - tol)
        ++dim;
    return SubspaceIntersection{dim, eig.eigenvectors.leftCols(dim)};
}

std::vector<EigenvalueCluster> eigenvalue_clusters(const HermitianEig& eig,
                                                   double cluster_tol) {
    std::vector<EigenvalueCluster> clusters;
    const Eigen::Index n = eig.eigenvalues.size();
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && eig.eigenvalues[end - 1] - eig.eigenvalues[end] < cluster_tol)
            ++end;
        const auto vecs = eig.eigenvectors.middleCols(start, end - start);
        clusters.push_back(EigenvalueCluster{
            eig.eigenvalues.segment(start, end - start).mean(),
            vecs * vecs.adjoint(),
            end - start});
        start = end;
    }
    return clusters;
}

ComplexMatrix complete_unitary(const ComplexMatrix& columns) {
    const Eigen::Index n = columns.rows();
    const Eigen::Index k = columns.cols();
    ComplexMatrix v(n, n);
    v.leftCols(k) = columns;
    Eigen::Index filled = k;
    // Prefer canonical basis vectors so completions of coordinate subspaces
    // stay in natural order.
    for (Eigen::Index j = 0; j < n && filled < n; ++j) {
        Eigen::VectorXcd cand = Eigen::VectorXcd::Unit(n, j);
        for (int pass = 0; pass < 2; ++pass)
            cand -= v.leftCols(filled) * (v.leftCols(filled).adjoint() * cand);
        const double norm = cand.norm();
        if (norm > 0.5)
            v.col(filled++) = cand / norm;
    }
    if (filled < n) {
        // Leftover directions poorly aligned with the canonical basis; take
        // them from a full QR of the input columns instead.
        Eigen::HouseholderQR<ComplexMatrix> qr(columns);
        ComplexMatrix q = qr.householderQ();
        for (Eigen::Index j = k; j < n && filled < n; ++j) {
            Eigen::VectorXcd cand = q.col(j);
            for (int pass = 0; pass < 2; ++pass)
                cand -= v.leftCols(filled) * (v.leftCols(filled).adjoint() * cand);
            const double norm = cand.norm();
            if (norm > 1e-6)
                v.col(filled++) = cand / norm;
        }
    }
    if (filled != n)
        throw Error("unitary completion failed; input columns not orthonormal?");
    return v;
}

} // namespace locc::numerics
