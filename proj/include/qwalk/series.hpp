#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace qwalk {

/// Truncated formal power series sum_{k <= order} c_k z^k with real coefficients.
/// Products are truncated at the smaller order of the operands, so every
/// retained coefficient is exact.
class PowerSeries {
  public:
    /// Zero series of the given truncation order.
    explicit PowerSeries(std::size_t order);
    explicit PowerSeries(std::vector<double> coefficients);

    static PowerSeries one(std::size_t order);

    std::size_t order() const { return coeffs_.size() - 1; }
    /// Coefficient of z^k; zero beyond the truncation order.
    double operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }
    double& coefficient(std::size_t k) { return coeffs_.at(k); }
    std::span<const double> coefficients() const { return coeffs_; }

    PowerSeries truncated(std::size_t order) const;

    /// Exact division by z^k. Throws NumericalError if a dropped coefficient is nonzero.
    PowerSeries divided_by_z(std::size_t k) const;

    PowerSeries& operator+=(const PowerSeries& rhs);
    PowerSeries& operator-=(const PowerSeries& rhs);
    PowerSeries& operator*=(double s);

    friend PowerSeries operator+(PowerSeries lhs, const PowerSeries& rhs) { return lhs += rhs; }
    friend PowerSeries operator-(PowerSeries lhs, const PowerSeries& rhs) { return lhs -= rhs; }
    friend PowerSeries operator*(PowerSeries lhs, double s) { return lhs *= s; }
    friend PowerSeries operator*(double s, PowerSeries rhs) { return rhs *= s; }
    friend PowerSeries operator*(const PowerSeries& lhs, const PowerSeries& rhs);

    PowerSeries pow(unsigned exponent) const;

  private:
    std::vector<double> coeffs_;
};

/// sqrt(1 + z^4) = sum_k binom(1/2, k) z^{4k}
PowerSeries series_sqrt_one_plus_z4(std::size_t order);

/// f(z) = (1 + z^2 - sqrt(1+z^4)) / (sqrt2 z)
PowerSeries series_f(std::size_t order);
/// g(z) = (1 - z^2 - sqrt(1+z^4)) / (sqrt2 z)
PowerSeries series_g(std::size_t order);

enum class BasisCoin { L, R };

/// Absorption-amplitude generating function of the Hadamard walk started at |0, coin>
/// with the absorber at m1: g^m1 for R, f g^(m1-1) for L; f and g swap roles for m1 < 0.
PowerSeries generating_function(std::int64_t m1, BasisCoin initial, std::size_t order);

/// |a_t|^2 for m1 = 2 and |0,L>, from the closed-form coefficients at t = 4m - 2.
double quantum_absorption_prob(std::int64_t t);

enum class TailModel { none, power_law };

struct AbsorptionSummary {
    double total = 0.0;        ///< P, sum p_t
    double weighted = 0.0;     ///< sum t p_t
    double mean_time = 0.0;    ///< weighted / total
    std::size_t horizon = 0;
    TailModel tail = TailModel::none;
    double tail_exponent = 0.0; ///< fitted beta in p_t ~ c t^-beta (power_law only)
};

/// Sums p_t = [z^t]G^2 for t <= order. With power_law, p_t is fitted by c t^-beta on
/// the last decade (in blocks of 8 steps, one lattice period of the oscillation)
/// and the fit is integrated beyond the horizon.
AbsorptionSummary summarize_absorption(const PowerSeries& amplitudes, TailModel tail);

double total_absorption(std::int64_t m1, BasisCoin initial, std::size_t order, TailModel tail);
double avg_absorb_time(std::int64_t m1, BasisCoin initial, std::size_t order, TailModel tail);

enum class RaabeVerdict { converges, diverges, inconclusive };

struct RaabeReport {
    std::vector<std::pair<std::int64_t, double>> estimates; ///< (n, E_n)
    double extrapolated = 0.0;
    RaabeVerdict verdict = RaabeVerdict::inconclusive;
};

/// Each call yields the next term u_1, u_2, ...
using TermGenerator = std::function<double()>;

/// E_n = n (u_n / u_{n+1} - 1) at geometrically spaced n <= n_max, extrapolated to
/// n -> infinity by least squares on E_n = E + c/n over the top two octaves.
RaabeReport raabe_estimate(TermGenerator next_term, std::int64_t n_max,
                           double inconclusive_band = 0.05);

/// Summand of the clean classical mean absorption time at t = m1 + 2n, n >= 1.
TermGenerator classical_mean_time_terms(std::int64_t m1);
/// (4m - 2) |a_{4m-2}|^2, the numerator terms of the quantum mean time for m1 = 2.
TermGenerator quantum_mean_time_numerator_terms();
/// u_n = ratio^n
TermGenerator geometric_terms(double ratio);

const char* to_string(RaabeVerdict v);

} // namespace qwalk
