#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "locc/transform.hpp"

namespace locc::applications {

using numerics::ComplexMatrix;
using numerics::RealVector;
using states::BipartitePureState;
using states::DensityOperator;
using states::Side;
using transform::LocalFilter;

/// Convex mixture of bipartite pure states.
struct MixedStateEnsemble {
    std::vector<std::pair<double, BipartitePureState>> terms;
};

/// Validates positive weights summing to 1 on a shared system.
MixedStateEnsemble make_ensemble(std::vector<std::pair<double, BipartitePureState>> terms);

/// Joint density operator sum_i w_i |psi_i><psi_i| on the composite system.
DensityOperator ensemble_density(const MixedStateEnsemble& ensemble);

/// Result of a best-k concentration search.  `purity` is the largest
/// eigenvalue of the post-filter mixture and is only filled by purify_mixed.
struct ConcentrationResult {
    Eigen::Index k = 0;
    std::optional<LocalFilter> filter;
    RealVector per_term_probability;
    bool verdict_n_dim = false;
    std::optional<double> purity;
};

/// Finds the largest k for which one common filter maps every source to the
/// k-dimensional maximally entangled state (up to local unitaries).  k = 1
/// always succeeds for valid inputs via a rank-one product filter.
ConcentrationResult concentrate_set(const std::vector<BipartitePureState>& sources,
                                    Side side);

/// Mixed-state concentration through the spectral decomposition.  The
/// decomposition is always re-derived from the density operator; at k >= 2 a
/// dimension only counts when the post-filter mixture is pure (largest
/// eigenvalue >= 1 - 1e-9), so verdict_n_dim reproduces the impossibility of
/// purifying a genuinely mixed N-dimensional state at k = N.
ConcentrationResult purify_mixed(const MixedStateEnsemble& ensemble);

/// Bob's encoding set {I, sigma_x, i sigma_y, sigma_z}; bits (b1 b2) map to
/// index 2*b1 + b2.
ComplexMatrix superdense_encoding(int message);

struct SuperdenseTrial {
    int message = 0;
    bool filter_succeeded = false;
    std::optional<int> decoded;
    double success_probability = 0.0;
};

struct SuperdenseStats {
    int message = 0;
    long trials = 0;
    long filter_successes = 0;
    long decode_correct = 0;
    double analytic_success = 0.0;

    double empirical_success() const {
        return trials > 0 ? static_cast<double>(filter_successes) / trials : 0.0;
    }
};

/// Monte Carlo run of the probabilistic superdense coding protocol: Bob
/// encodes, Alice applies her concentration filter (built from the shared
/// state alone) and on success discriminates the four encoded states exactly.
SuperdenseStats superdense_run(const BipartitePureState& shared_state, int message,
                               long trials, std::uint64_t seed);

} // namespace locc::applications
