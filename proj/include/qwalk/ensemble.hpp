#pragma once

#include "qwalk/disorder.hpp"
#include "qwalk/walk.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qwalk {

enum class Engine { quantum, classical };

struct EnsembleConfig {
    Engine engine = Engine::quantum;
    CoinOperator coin = hadamard_coin();
    CoinState initial = CoinState::L();
    std::optional<Absorber> absorber;
    std::optional<DisorderSpec> disorder; ///< empty: clean walk, every step of length 1
    std::int64_t realizations = 1;
    std::int64_t steps = 1;
    std::uint64_t master_seed = 0;
    unsigned workers = 0; ///< 0: hardware concurrency. Results do not depend on it.

    void validate() const;
};

/// One disorder realization of an ensemble.
struct RealizationRun {
    std::uint64_t seed = 0;
    AbsorptionRecord absorption;
    std::vector<double> sigma;
    bool mass_exhausted = false;
};

/// Realization `index` uses seed mix_seed(master_seed, index).
RealizationRun run_realization(const EnsembleConfig& config, std::int64_t index);

struct AveragedCurve {
    std::vector<std::int64_t> abscissa;
    std::vector<double> values;
    std::vector<double> std_errors;
    /// Realizations left out of each point's average.
    std::vector<std::int64_t> excluded;
    std::int64_t realizations = 0;
};

struct FitResult {
    double alpha = 0.0;
    double intercept = 0.0;
    double ci95_halfwidth = 0.0;
    double residual_rms = 0.0;
    std::int64_t t_lo = 0;
    std::int64_t t_hi = 0;
    std::size_t points = 0;
};

/// sum_{t<=n} t p_t / sum_{t<=n} p_t. NumericalError when nothing was absorbed by n.
double finite_horizon_avg_time(const AbsorptionRecord& record, std::int64_t n);

/// Realization average of the finite-horizon absorption time at each horizon.
/// Realizations with no absorption by a horizon are excluded from that point.
AveragedCurve disorder_avg_absorb_time(const EnsembleConfig& config, std::span<const std::int64_t> horizons);

/// Realization average of sigma(t) (renormalized when an absorber is present).
AveragedCurve disorder_avg_sigma(const EnsembleConfig& config, std::span<const std::int64_t> t_grid);

/// OLS of ln(value) against ln(t) over abscissa in [t_lo, t_hi]; the 95% half-width
/// is the slope standard error times the Student-t quantile at points - 2 dof.
FitResult fit_exponent(const AveragedCurve& curve, std::int64_t t_lo, std::int64_t t_hi);

std::vector<std::int64_t> integer_range(std::int64_t lo, std::int64_t hi);

} // namespace qwalk
