#pragma once

#include "qwalk/lattice.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qwalk {

/// 2x2 coin acting as C|L> = a|L> + b|R>, C|R> = c|L> + d|R>.
struct CoinOperator {
    Amplitude a{1.0}, b{}, c{}, d{1.0};

    bool is_unitary(double tol = 1e-12) const;

    static CoinOperator identity() { return {}; }
};

enum class HadamardVariant { standard, alternate };

/// standard: a = b = c = 1/sqrt2, d = -1/sqrt2.
/// alternate: a = -1/sqrt2, b = c = d = 1/sqrt2.
CoinOperator hadamard_coin(HadamardVariant variant = HadamardVariant::standard);

/// Balanced coin a = d = 1/sqrt2, b = c = i/sqrt2.
CoinOperator kempe_coin();

/// Boundary at m1 != 0 that removes every amplitude at or beyond it
/// (n >= m1 for m1 > 0, n <= m1 for m1 < 0).
class Absorber {
  public:
    explicit Absorber(Position m1);

    Position position() const { return m1_; }
    bool absorbs(Position n) const { return m1_ > 0 ? n >= m1_ : n <= m1_; }

  private:
    Position m1_;
};

/// Normalized initial coin state alpha_L |L> + alpha_R |R>.
class CoinState {
  public:
    CoinState(Amplitude left, Amplitude right);

    static CoinState L() { return {1.0, 0.0}; }
    static CoinState R() { return {0.0, 1.0}; }

    Amplitude left() const { return left_; }
    Amplitude right() const { return right_; }

  private:
    Amplitude left_, right_;
};

/// Step length per time step: constant 1, or an explicit sequence l_1..l_n.
class StepSchedule {
  public:
    static StepSchedule clean() { return StepSchedule{}; }
    static StepSchedule from_lengths(std::vector<int> lengths);

    bool is_clean() const { return lengths_.empty(); }
    /// t is 1-based.
    int length_at(std::int64_t t) const;
    std::size_t size() const { return lengths_.size(); }
    const std::vector<int>& lengths() const { return lengths_; }

  private:
    std::vector<int> lengths_;
};

struct WalkRunConfig {
    CoinOperator coin = hadamard_coin();
    Position start = 0;
    CoinState initial = CoinState::L();
    std::int64_t steps = 1;
    std::optional<Absorber> absorber;
    StepSchedule schedule = StepSchedule::clean();

    /// Throws ConfigError on a non-unitary coin, steps < 1, or a schedule
    /// shorter than steps.
    void validate() const;
};

/// p_t for t = 1..horizon plus their running sum.
struct AbsorptionRecord {
    std::vector<double> per_step;
    double cumulative = 0.0;

    std::int64_t horizon() const { return static_cast<std::int64_t>(per_step.size()); }
};

struct QuantumRun {
    AbsorptionRecord absorption;
    /// sigma[t-1] is the spread of the surviving (renormalized) distribution after step t.
    std::vector<double> sigma;
    QuantumState final_state;
    /// Set when the absorber drained all mass; record and sigma stop at that step.
    bool mass_exhausted = false;
};

template <typename State>
struct Absorbed {
    State state;
    double absorbed = 0.0;
};

QuantumState apply_coin(QuantumState state, const CoinOperator& coin);
QuantumState apply_shift(QuantumState state, int length);
QuantumState step(QuantumState state, const CoinOperator& coin, int length);
Absorbed<QuantumState> apply_absorber(QuantumState state, const Absorber& absorber);

/// Called after each complete time step (coin, shift, absorb).
using QuantumObserver = std::function<void(const QuantumState&)>;

QuantumRun run_quantum(const WalkRunConfig& config, const QuantumObserver& observer = {});

/// Surviving mass below this counts as fully absorbed.
inline constexpr double exhausted_mass = 1e-12;

} // namespace qwalk
