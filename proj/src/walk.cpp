#include "qwalk/walk.hpp"

#include "qwalk/errors.hpp"

#include <cmath>
#include <string>

namespace qwalk {

namespace {
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
}

bool CoinOperator::is_unitary(double tol) const
{
    const double col_l = std::norm(a) + std::norm(b);
    const double col_r = std::norm(c) + std::norm(d);
    const Amplitude overlap = a * std::conj(c) + b * std::conj(d);
    return std::abs(col_l - 1.0) <= tol && std::abs(col_r - 1.0) <= tol && std::abs(overlap) <= tol;
}

CoinOperator hadamard_coin(HadamardVariant variant)
{
    if (variant == HadamardVariant::alternate) return {-inv_sqrt2, inv_sqrt2, inv_sqrt2, inv_sqrt2};
    return {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2};
}

CoinOperator kempe_coin()
{
    const Amplitude i_over_sqrt2{0.0, inv_sqrt2};
    return {inv_sqrt2, i_over_sqrt2, i_over_sqrt2, inv_sqrt2};
}

Absorber::Absorber(Position m1) : m1_(m1)
{
    if (m1 == 0) throw ConfigError("absorber position must be nonzero");
}

CoinState::CoinState(Amplitude left, Amplitude right) : left_(left), right_(right)
{
    if (std::abs(std::norm(left) + std::norm(right) - 1.0) > 1e-12)
        throw ConfigError("initial coin state must be normalized");
}

StepSchedule StepSchedule::from_lengths(std::vector<int> lengths)
{
    for (int l : lengths)
        if (l < 0) throw ConfigError("step lengths must be nonnegative");
    StepSchedule s;
    s.lengths_ = std::move(lengths);
    return s;
}

int StepSchedule::length_at(std::int64_t t) const
{
    if (is_clean()) return 1;
    if (t < 1 || static_cast<std::size_t>(t) > lengths_.size())
        throw ConfigError("step schedule has no length for step " + std::to_string(t));
    return lengths_[static_cast<std::size_t>(t - 1)];
}

void WalkRunConfig::validate() const
{
    if (!coin.is_unitary()) throw ConfigError("coin operator is not unitary");
    if (steps < 1) throw ConfigError("steps must be positive");
    if (!schedule.is_clean() && schedule.size() < static_cast<std::size_t>(steps))
        throw ConfigError("step schedule shorter than the number of steps");
    if (absorber && absorber->absorbs(start))
        throw ConfigError("walker starts on or beyond the absorber");
}

QuantumState apply_coin(QuantumState state, const CoinOperator& coin)
{
    for (auto& site : state.sites()) {
        const Amplitude l = site.left;
        const Amplitude r = site.right;
        site.left = coin.a * l + coin.c * r;
        site.right = coin.b * l + coin.d * r;
    }
    return state;
}

QuantumState apply_shift(QuantumState state, int length)
{
    if (length < 0) throw ConfigError("shift length must be nonnegative");
    if (length == 0 || state.empty()) return state;

    // L moves n -> n - l, R moves n -> n + l; the window widens by l on each side.
    const auto width = state.size() + 2 * static_cast<std::size_t>(length);
    std::vector<SiteAmplitudes> shifted(width);
    const auto src = state.sites();
    for (std::size_t i = 0; i < src.size(); ++i) {
        shifted[i].left = src[i].left;
        shifted[i + 2 * static_cast<std::size_t>(length)].right = src[i].right;
    }
    return QuantumState(state.n_min() - length, std::move(shifted), state.time());
}

QuantumState step(QuantumState state, const CoinOperator& coin, int length)
{
    QuantumState next = apply_shift(apply_coin(std::move(state), coin), length);
    next.set_time(next.time() + 1);
    return next;
}

Absorbed<QuantumState> apply_absorber(QuantumState state, const Absorber& absorber)
{
    const Position m1 = absorber.position();
    double absorbed = 0.0;
    Position n = state.n_min();
    for (const auto& site : state.sites()) {
        if (absorber.absorbs(n)) absorbed += site.probability();
        ++n;
    }
    if (m1 > 0)
        state.restrict_to(state.n_min(), m1 - 1);
    else
        state.restrict_to(m1 + 1, state.n_max());
    return {std::move(state), absorbed};
}

QuantumRun run_quantum(const WalkRunConfig& config, const QuantumObserver& observer)
{
    config.validate();

    QuantumRun run;
    run.absorption.per_step.reserve(static_cast<std::size_t>(config.steps));
    run.sigma.reserve(static_cast<std::size_t>(config.steps));

    QuantumState state =
        QuantumState::localized(config.start, config.initial.left(), config.initial.right());
    for (std::int64_t t = 1; t <= config.steps; ++t) {
        state = step(std::move(state), config.coin, config.schedule.length_at(t));

        double p_t = 0.0;
        if (config.absorber) {
            auto [rest, absorbed] = apply_absorber(std::move(state), *config.absorber);
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

} // namespace qwalk
