#include "locc/states.hpp"

#include <algorithm>
#include <cmath>

namespace locc::states {

namespace {

constexpr double kNormTol = 1e-10;
constexpr double kZeroStateTol = 1e-14;

} // namespace

BipartitePureState::BipartitePureState(ComplexMatrix amplitudes)
    : amplitudes_(std::move(amplitudes)) {
    numerics::require_finite(amplitudes_);
    if (amplitudes_.rows() < 1 || amplitudes_.cols() < 1)
        throw DimensionMismatch("state needs positive dimensions");
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kNormTol)
        throw NotNormalized("amplitude norm " + std::to_string(norm) + " is not 1");
}

BipartitePureState BipartitePureState::normalized(ComplexMatrix amplitudes) {
    numerics::require_finite(amplitudes);
    const double norm = amplitudes.norm();
    if (norm * norm < kZeroStateTol)
        throw ZeroProbability("cannot normalize a (near-)zero amplitude matrix");
    return BipartitePureState(amplitudes / norm);
}

DensityOperator::DensityOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    numerics::require_finite(matrix_);
    if (matrix_.rows() != matrix_.cols())
        throw NotSquare("density operator must be square");
    if (!numerics::is_hermitian(matrix_, 1e-10))
        throw NotHermitian("density operator must be Hermitian within 1e-10");
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > 1e-10)
        throw NotNormalized("density operator trace " + std::to_string(tr) + " is not 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10)
        throw NotPsd("density operator has a negative eigenvalue");
}

SchmidtForm schmidt(const BipartitePureState& state) {
    numerics::Svd dec = numerics::svd(state.amplitudes());
    SchmidtForm form;
    form.coefficients = dec.singular_values.array().square();
    form.u_a = dec.u;
    form.u_b = dec.w.conjugate(); // M = U diag(s) W†  =>  u_b = conj(W)
    const double largest = form.coefficients.size() > 0 ? form.coefficients[0] : 0.0;
    form.rank = 0;
    for (Eigen::Index i = 0; i < form.coefficients.size(); ++i)
        if (form.coefficients[i] > numerics::kDefaultRankTol * largest)
            ++form.rank;
    return form;
}

DensityOperator marginal(const BipartitePureState& state, Side side) {
    const ComplexMatrix& m = state.amplitudes();
    ComplexMatrix rho = side == Side::A
                            ? ComplexMatrix(m * m.adjoint())
                            : ComplexMatrix(m.transpose() * m.conjugate());
    return DensityOperator(0.5 * (rho + rho.adjoint()));
}

bool local_unitary_equivalent(const BipartitePureState& a, const BipartitePureState& b,
                              double tol) {
    if (a.dim_a() != b.dim_a() || a.dim_b() != b.dim_b())
        throw DimensionMismatch("states live on different systems");
    const RealVector ca = schmidt(a).coefficients;
    const RealVector cb = schmidt(b).coefficients;
    return (ca - cb).cwiseAbs().maxCoeff() <= tol;
}

BipartitePureState from_schmidt(const RealVector& coefficients, const ComplexMatrix& u_a,
                                const ComplexMatrix& u_b) {
    const Eigen::Index da = u_a.rows();
    const Eigen::Index db = u_b.rows();
    if (u_a.cols() != da || u_b.cols() != db)
        throw NotUnitary("Schmidt unitaries must be square");
    if ((u_a.adjoint() * u_a - ComplexMatrix::Identity(da, da)).norm() > 1e-9 ||
        (u_b.adjoint() * u_b - ComplexMatrix::Identity(db, db)).norm() > 1e-9)
        throw NotUnitary("Schmidt factor is not unitary within 1e-9");
    if (coefficients.size() > std::min(da, db))
        throw DimensionMismatch("more coefficients than min(dim_a, dim_b)");
    if (coefficients.minCoeff() < -1e-12)
        throw NotUnitSum("negative Schmidt coefficient");
    if (std::abs(coefficients.sum() - 1.0) > 1e-10)
        throw NotUnitSum("Schmidt coefficients sum to " +
                         std::to_string(coefficients.sum()) + ", expected 1");

    ComplexMatrix core = ComplexMatrix::Zero(da, db);
    for (Eigen::Index i = 0; i < coefficients.size(); ++i)
        core(i, i) = std::sqrt(std::max(coefficients[i], 0.0));
    return BipartitePureState::normalized(u_a * core * u_b.transpose());
}

BipartitePureState maximally_entangled(Eigen::Index m) {
    if (m < 1)
        throw DimensionMismatch("dimension must be positive");
    return BipartitePureState(ComplexMatrix::Identity(m, m) / std::sqrt(double(m)));
}

BipartitePureState swap_sides(const BipartitePureState& state) {
    return BipartitePureState(state.amplitudes().transpose());
}

BipartitePureState padded_to_square(const BipartitePureState& state) {
    const Eigen::Index n = std::max(state.dim_a(), state.dim_b());
    if (state.dim_a() == n && state.dim_b() == n)
        return state;
    ComplexMatrix padded = ComplexMatrix::Zero(n, n);
    padded.topLeftCorner(state.dim_a(), state.dim_b()) = state.amplitudes();
    return BipartitePureState(padded);
}

double fidelity_up_to_local_unitaries(const BipartitePureState& a,
                                      const BipartitePureState& b) {
    RealVector ca = schmidt(a).coefficients;
    RealVector cb = schmidt(b).coefficients;
    const Eigen::Index n = std::min(ca.size(), cb.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        acc += std::sqrt(std::max(ca[i], 0.0) * std::max(cb[i], 0.0));
    return acc * acc;
}

} // namespace locc::states
