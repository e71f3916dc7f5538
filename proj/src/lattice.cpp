#include "qwalk/lattice.hpp"

#include "qwalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qwalk {

QuantumState::QuantumState(Position first, std::vector<SiteAmplitudes> sites, std::int64_t time)
    : first_(first), sites_(std::move(sites)), time_(time)
{
}

QuantumState QuantumState::localized(Position n, Amplitude left, Amplitude right)
{
    return QuantumState(n, {SiteAmplitudes{left, right}}, 0);
}

SiteAmplitudes QuantumState::at(Position n) const
{
    if (!contains(n)) return {};
    return sites_[static_cast<std::size_t>(n - first_)];
}

namespace {

// Shared window clipping for both state types.
template <typename T>
void clip_window(Position& first, std::vector<T>& data, Position lo, Position hi)
{
    const Position last = first + static_cast<Position>(data.size()) - 1;
    lo = std::max(lo, first);
    hi = std::min(hi, last);
    if (data.empty() || lo > hi) {
        data.clear();
        return;
    }
    const auto begin = static_cast<std::size_t>(lo - first);
    const auto end = static_cast<std::size_t>(hi - first) + 1;
    data.erase(data.begin() + static_cast<std::ptrdiff_t>(end), data.end());
    data.erase(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(begin));
    first = lo;
}

} // namespace

void QuantumState::restrict_to(Position lo, Position hi)
{
    clip_window(first_, sites_, lo, hi);
}

ClassicalState::ClassicalState(Position first, std::vector<double> probs, std::int64_t time)
    : first_(first), probs_(std::move(probs)), time_(time)
{
}

ClassicalState ClassicalState::localized(Position n)
{
    return ClassicalState(n, {1.0}, 0);
}

double ClassicalState::at(Position n) const
{
    if (empty() || n < n_min() || n > n_max()) return 0.0;
    return probs_[static_cast<std::size_t>(n - first_)];
}

void ClassicalState::restrict_to(Position lo, Position hi)
{
    clip_window(first_, probs_, lo, hi);
}

double PositionDistribution::sum() const
{
    double s = 0.0;
    for (const auto& e : entries) s += e.probability;
    return s;
}

PositionDistribution probability_distribution(const QuantumState& state)
{
    PositionDistribution dist;
    dist.time = state.time();
    dist.entries.reserve(state.size());
    Position n = state.n_min();
    for (const auto& site : state.sites()) dist.entries.push_back({n++, site.probability()});
    return dist;
}

PositionDistribution probability_distribution(const ClassicalState& state)
{
    PositionDistribution dist;
    dist.time = state.time();
    dist.entries.reserve(state.size());
    Position n = state.n_min();
    for (double p : state.probs()) dist.entries.push_back({n++, p});
    return dist;
}

double std_dev(const PositionDistribution& dist)
{
    const double mass = dist.sum();
    if (!(mass > 0.0)) throw EmptyDistributionError("std_dev");

    // two-pass: mean first, then central second moment
    double mean = 0.0;
    for (const auto& e : dist.entries) mean += static_cast<double>(e.position) * e.probability;
    mean /= mass;
    double var = 0.0;
    for (const auto& e : dist.entries) {
        const double d = static_cast<double>(e.position) - mean;
        var += d * d * e.probability;
    }
    return std::sqrt(var / mass);
}

PositionDistribution renormalize(const PositionDistribution& dist)
{
    const double mass = dist.sum();
    if (!(mass > 0.0)) throw EmptyDistributionError("renormalize");
    PositionDistribution out = dist;
    for (auto& e : out.entries) e.probability /= mass;
    return out;
}

double total_mass(const QuantumState& state)
{
    double s = 0.0;
    for (const auto& site : state.sites()) s += site.probability();
    return s;
}

double total_mass(const ClassicalState& state)
{
    return std::accumulate(state.probs().begin(), state.probs().end(), 0.0);
}

} // namespace qwalk
