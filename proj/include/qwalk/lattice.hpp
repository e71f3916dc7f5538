#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qwalk {

using Position = std::int64_t;
using Amplitude = std::complex<double>;

/// Coin-space amplitudes (psi_L, psi_R) at one lattice site.
struct SiteAmplitudes {
    Amplitude left{};
    Amplitude right{};

    double probability() const { return std::norm(left) + std::norm(right); }
};

/// Walker state of the coined quantum walk on a finite window [n_min, n_max]
/// of the integer lattice. Everything outside the window is zero.
class QuantumState {
  public:
    QuantumState() = default;
    QuantumState(Position first, std::vector<SiteAmplitudes> sites, std::int64_t time = 0);

    static QuantumState localized(Position n, Amplitude left, Amplitude right);

    std::int64_t time() const { return time_; }
    void set_time(std::int64_t t) { time_ = t; }

    bool empty() const { return sites_.empty(); }
    std::size_t size() const { return sites_.size(); }
    Position n_min() const { return first_; }
    Position n_max() const { return first_ + static_cast<Position>(sites_.size()) - 1; }
    bool contains(Position n) const { return !empty() && n >= n_min() && n <= n_max(); }

    /// Zero outside the window.
    SiteAmplitudes at(Position n) const;
    Amplitude left(Position n) const { return at(n).left; }
    Amplitude right(Position n) const { return at(n).right; }

    std::span<const SiteAmplitudes> sites() const { return sites_; }
    std::span<SiteAmplitudes> sites() { return sites_; }

    /// Keeps only positions in [lo, hi]; the window shrinks accordingly.
    void restrict_to(Position lo, Position hi);

  private:
    Position first_ = 0;
    std::vector<SiteAmplitudes> sites_;
    std::int64_t time_ = 0;
};

/// Occupation probabilities of the classical walker on a finite window.
class ClassicalState {
  public:
    ClassicalState() = default;
    ClassicalState(Position first, std::vector<double> probs, std::int64_t time = 0);

    static ClassicalState localized(Position n);

    std::int64_t time() const { return time_; }
    void set_time(std::int64_t t) { time_ = t; }

    bool empty() const { return probs_.empty(); }
    std::size_t size() const { return probs_.size(); }
    Position n_min() const { return first_; }
    Position n_max() const { return first_ + static_cast<Position>(probs_.size()) - 1; }

    double at(Position n) const;
    std::span<const double> probs() const { return probs_; }
    std::span<double> probs() { return probs_; }

    void restrict_to(Position lo, Position hi);

  private:
    Position first_ = 0;
    std::vector<double> probs_;
    std::int64_t time_ = 0;
};

struct PositionProbability {
    Position position = 0;
    double probability = 0.0;

    friend bool operator==(const PositionProbability&, const PositionProbability&) = default;
};

struct PositionDistribution {
    std::int64_t time = 0;
    std::vector<PositionProbability> entries;

    double sum() const;
};

PositionDistribution probability_distribution(const QuantumState& state);
PositionDistribution probability_distribution(const ClassicalState& state);

/// sqrt(E[n^2] - E[n]^2) of the distribution normalized to unit mass.
/// Throws EmptyDistributionError on zero mass.
double std_dev(const PositionDistribution& dist);

PositionDistribution renormalize(const PositionDistribution& dist);

double total_mass(const QuantumState& state);
double total_mass(const ClassicalState& state);

} // namespace qwalk
