#pragma once

#include "qwalk/lattice.hpp"
#include "qwalk/walk.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qwalk {

/// p'(n) = p(n+l)/2 + p(n-l)/2.
ClassicalState crw_step(ClassicalState state, int length);

/// Same rule as the quantum absorber: mass at or beyond m1 is removed.
Absorbed<ClassicalState> crw_apply_absorber(ClassicalState state, const Absorber& absorber);

/// First-passage probability of the clean walk at m1 after exactly t steps:
/// |m1| / (t 2^t) * t! / (((t+m1)/2)! ((t-m1)/2)!), zero unless t >= |m1| and t = m1 mod 2.
/// Evaluated in log space; usable for t up to ~1e7.
double classical_first_passage(std::int64_t t, std::int64_t m1);

/// sum_{t <= horizon} p_t
double classical_total_absorption(std::int64_t m1, std::int64_t horizon);

/// sum t p_t / sum p_t over t <= horizon. NumericalError if nothing was absorbed yet.
double classical_avg_time_partial(std::int64_t m1, std::int64_t horizon);

struct ClassicalRunConfig {
    Position start = 0;
    std::int64_t steps = 1;
    std::optional<Absorber> absorber;
    StepSchedule schedule = StepSchedule::clean();

    void validate() const;
};

struct ClassicalRun {
    AbsorptionRecord absorption;
    std::vector<double> sigma;
    ClassicalState final_state;
    bool mass_exhausted = false;
};

using ClassicalObserver = std::function<void(const ClassicalState&)>;

ClassicalRun run_classical(const ClassicalRunConfig& config, const ClassicalObserver& observer = {});

/// Monte Carlo estimate of p_t from `trials` sampled trajectories. Cross-check only;
/// all reported classical quantities use exact propagation.
std::vector<double> sampled_first_passage(const ClassicalRunConfig& config, std::int64_t trials,
                                          std::uint64_t seed);

} // namespace qwalk
