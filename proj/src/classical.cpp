#include "qwalk/classical.hpp"

#include "qwalk/errors.hpp"
#include "qwalk/random.hpp"

#include <cmath>
#include <numbers>

namespace qwalk {

ClassicalState crw_step(ClassicalState state, int length)
{
    if (length < 0) throw ConfigError("step length must be nonnegative");
    if (length == 0 || state.empty()) {
        state.set_time(state.time() + 1);
        return state;
    }

    const auto l = static_cast<std::size_t>(length);
    const auto src = state.probs();
    std::vector<double> next(src.size() + 2 * l, 0.0);
    // mass at index i moves to i (left by l) and i + 2l (right by l) in the widened window
    for (std::size_t i = 0; i < src.size(); ++i) {
        next[i] += 0.5 * src[i];
        next[i + 2 * l] += 0.5 * src[i];
    }
    return ClassicalState(state.n_min() - length, std::move(next), state.time() + 1);
}

Absorbed<ClassicalState> crw_apply_absorber(ClassicalState state, const Absorber& absorber)
{
    const Position m1 = absorber.position();
    double absorbed = 0.0;
    Position n = state.n_min();
    for (double p : state.probs()) {
        if (absorber.absorbs(n)) absorbed += p;
        ++n;
    }
    if (m1 > 0)
        state.restrict_to(state.n_min(), m1 - 1);
    else
        state.restrict_to(m1 + 1, state.n_max());
    return {std::move(state), absorbed};
}

double classical_first_passage(std::int64_t t, std::int64_t m1)
{
    const std::int64_t m = m1 < 0 ? -m1 : m1;
    if (m == 0 || t < m || (t - m) % 2 != 0) return 0.0;
    const auto td = static_cast<double>(t);
    const double up = static_cast<double>((t + m) / 2);
    const double down = static_cast<double>((t - m) / 2);
    const double log_p = std::log(static_cast<double>(m)) - std::log(td) + std::lgamma(td + 1.0)
                         - std::lgamma(up + 1.0) - std::lgamma(down + 1.0) - td * std::numbers::ln2;
    return std::exp(log_p);
}

double classical_total_absorption(std::int64_t m1, std::int64_t horizon)
{
    double sum = 0.0;
    for (std::int64_t t = 1; t <= horizon; ++t) sum += classical_first_passage(t, m1);
    return sum;
}

double classical_avg_time_partial(std::int64_t m1, std::int64_t horizon)
{
    double weighted = 0.0;
    double mass = 0.0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
        const double p = classical_first_passage(t, m1);
        weighted += static_cast<double>(t) * p;
        mass += p;
    }
    if (!(mass > 0.0)) throw NumericalError("no absorption within horizon");
    return weighted / mass;
}

void ClassicalRunConfig::validate() const
{
    if (steps < 1) throw ConfigError("steps must be positive");
    if (!schedule.is_clean() && schedule.size() < static_cast<std::size_t>(steps))
        throw ConfigError("step schedule shorter than the number of steps");
    if (absorber && absorber->absorbs(start))
        throw ConfigError("walker starts on or beyond the absorber");
}

ClassicalRun run_classical(const ClassicalRunConfig& config, const ClassicalObserver& observer)
{
    config.validate();

    ClassicalRun run;
    run.absorption.per_step.reserve(static_cast<std::size_t>(config.steps));
    run.sigma.reserve(static_cast<std::size_t>(config.steps));

    ClassicalState state = ClassicalState::localized(config.start);
    for (std::int64_t t = 1; t <= config.steps; ++t) {
        state = crw_step(std::move(state), config.schedule.length_at(t));

        double p_t = 0.0;
        if (config.absorber) {
            auto [rest, absorbed] = crw_apply_absorber(std::move(state), *config.absorber);
            state = std::move(rest);
            p_t = absorbed;
        }
        run.absorption.per_step.push_back(p_t);
        run.absorption.cumulative += p_t;

        if (total_mass(state) <= exhausted_mass) {
            run.mass_exhausted = true;
            break;
        }
        run.sigma.push_back(std_dev(probability_distribution(state)));
        if (observer) observer(state);
    }
    run.final_state = std::move(state);
    return run;
}

std::vector<double> sampled_first_passage(const ClassicalRunConfig& config, std::int64_t trials,
                                          std::uint64_t seed)
{
    config.validate();
    if (!config.absorber) throw ConfigError("sampled first passage needs an absorber");
    if (trials < 1) throw ConfigError("trials must be positive");

    std::vector<double> hits(static_cast<std::size_t>(config.steps), 0.0);
    Rng rng(seed);
    for (std::int64_t k = 0; k < trials; ++k) {
        Position x = config.start;
        for (std::int64_t t = 1; t <= config.steps; ++t) {
            const int l = config.schedule.length_at(t);
            x += (rng() >> 63) ? l : -l;
            if (config.absorber->absorbs(x)) {
                hits[static_cast<std::size_t>(t - 1)] += 1.0;
                break;
            }
        }
    }
    for (double& h : hits) h /= static_cast<double>(trials);
    return hits;
}

} // namespace qwalk
