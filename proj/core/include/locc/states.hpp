#pragma once

#include "locc/numerics.hpp"

namespace locc::states {

using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::RealVector;

enum class Side { A, B };

inline const char* to_string(Side s) { return s == Side::A ? "A" : "B"; }

/// A normalized bipartite pure state stored as its amplitude matrix M,
/// |psi> = sum_ij M(i,j) |i_A>|j_B>.  Local operations are then matrix
/// products: (A (x) B)|psi> has amplitude matrix A * M * B^T.
class BipartitePureState {
public:
    /// Validates unit Frobenius norm (within 1e-10) and finiteness.
    explicit BipartitePureState(ComplexMatrix amplitudes);

    /// Rescales to unit norm; throws ZeroProbability on (near-)zero input.
    static BipartitePureState normalized(ComplexMatrix amplitudes);

    Eigen::Index dim_a() const { return amplitudes_.rows(); }
    Eigen::Index dim_b() const { return amplitudes_.cols(); }
    const ComplexMatrix& amplitudes() const { return amplitudes_; }

private:
    ComplexMatrix amplitudes_;
};

/// Schmidt data of a state: coefficients (squared singular values, descending,
/// summing to 1) and the local unitaries with
/// amplitudes = u_a * rect_diag(sqrt(coefficients)) * u_b^T.
struct SchmidtForm {
    RealVector coefficients;
    ComplexMatrix u_a;
    ComplexMatrix u_b;
    Eigen::Index rank;
};

/// Hermitian, PSD, unit-trace operator.
class DensityOperator {
public:
    explicit DensityOperator(ComplexMatrix matrix);
    const ComplexMatrix& matrix() const { return matrix_; }
    Eigen::Index dim() const { return matrix_.rows(); }

private:
    ComplexMatrix matrix_;
};

SchmidtForm schmidt(const BipartitePureState& state);

DensityOperator marginal(const BipartitePureState& state, Side side);

/// True iff the sorted Schmidt coefficient vectors agree elementwise within tol.
bool local_unitary_equivalent(const BipartitePureState& a, const BipartitePureState& b,
                              double tol);

/// Inverse of schmidt(): builds the state u_a * rect_diag(sqrt(c)) * u_b^T.
BipartitePureState from_schmidt(const RealVector& coefficients, const ComplexMatrix& u_a,
                                const ComplexMatrix& u_b);

/// The m-dimensional maximally entangled state (amplitude matrix I/sqrt(m)).
BipartitePureState maximally_entangled(Eigen::Index m);

/// Same state with the roles of the two subsystems exchanged (amplitude
/// transpose); marginal spectra are untouched.
BipartitePureState swap_sides(const BipartitePureState& state);

/// Zero-pads the amplitude matrix to max(dim_a, dim_b) square.  Spectra are
/// preserved; needed by the square-only transforms.
BipartitePureState padded_to_square(const BipartitePureState& state);

/// Largest achievable overlap |<a|(U_A (x) U_B)|b>|^2 over local unitaries,
/// i.e. (sum_i sqrt(lambda_i mu_i))^2 on sorted Schmidt coefficients.
double fidelity_up_to_local_unitaries(const BipartitePureState& a,
                                      const BipartitePureState& b);

} // namespace locc::states
