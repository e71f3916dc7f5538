#include "qwalk/series.hpp"

#include "qwalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qwalk {

PowerSeries::PowerSeries(std::size_t order) : coeffs_(order + 1, 0.0) {}

PowerSeries::PowerSeries(std::vector<double> coefficients) : coeffs_(std::move(coefficients))
{
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

PowerSeries PowerSeries::one(std::size_t order)
{
    PowerSeries s(order);
    s.coeffs_[0] = 1.0;
    return s;
}

PowerSeries PowerSeries::truncated(std::size_t order) const
{
    std::vector<double> c(order + 1, 0.0);
    std::copy_n(coeffs_.begin(), std::min(c.size(), coeffs_.size()), c.begin());
    return PowerSeries(std::move(c));
}

PowerSeries PowerSeries::divided_by_z(std::size_t k) const
{
    if (k > order()) throw NumericalError("cannot divide a series of order " +
                                          std::to_string(order()) + " by z^" + std::to_string(k));
    for (std::size_t i = 0; i < k; ++i)
        if (std::abs(coeffs_[i]) > 1e-15)
            throw NumericalError("series division by z^" + std::to_string(k) +
                                 " is not exact: coefficient " + std::to_string(i) + " is nonzero");
    return PowerSeries(std::vector<double>(coeffs_.begin() + static_cast<std::ptrdiff_t>(k), coeffs_.end()));
}

PowerSeries& PowerSeries::operator+=(const PowerSeries& rhs)
{
    const std::size_t n = std::min(coeffs_.size(), rhs.coeffs_.size());
    coeffs_.resize(n);
    for (std::size_t i = 0; i < n; ++i) coeffs_[i] += rhs.coeffs_[i];
    return *this;
}

PowerSeries& PowerSeries::operator-=(const PowerSeries& rhs)
{
    const std::size_t n = std::min(coeffs_.size(), rhs.coeffs_.size());
    coeffs_.resize(n);
    for (std::size_t i = 0; i < n; ++i) coeffs_[i] -= rhs.coeffs_[i];
    return *this;
}

PowerSeries& PowerSeries::operator*=(double s)
{
    for (double& c : coeffs_) c *= s;
    return *this;
}

PowerSeries operator*(const PowerSeries& lhs, const PowerSeries& rhs)
{
    const std::size_t order = std::min(lhs.order(), rhs.order());
    std::vector<double> out(order + 1, 0.0);
    const auto a = lhs.coefficients();
    const auto b = rhs.coefficients();
    for (std::size_t i = 0; i <= order; ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue; // f and g are odd, half of every product is zeros
        double* dst = out.data() + i;
        const std::size_t n = order - i;
        for (std::size_t j = 0; j <= n; ++j) dst[j] += ai * b[j];
    }
    return PowerSeries(std::move(out));
}

PowerSeries PowerSeries::pow(unsigned exponent) const
{
    PowerSeries result = one(order());
    for (unsigned k = 0; k < exponent; ++k) result = result * *this;
    return result;
}

PowerSeries series_sqrt_one_plus_z4(std::size_t order)
{
    PowerSeries s(order);
    double c = 1.0; // binom(1/2, k)
    for (std::size_t k = 0; 4 * k <= order; ++k) {
        s.coefficient(4 * k) = c;
        c *= (0.5 - static_cast<double>(k)) / static_cast<double>(k + 1);
    }
    return s;
}

namespace {

// (1 + sign z^2 - sqrt(1+z^4)) / (sqrt2 z)
PowerSeries hadamard_factor(std::size_t order, double sign)
{
    PowerSeries numerator = PowerSeries::one(order + 1) - series_sqrt_one_plus_z4(order + 1);
    if (order + 1 >= 2) numerator.coefficient(2) += sign;
    return numerator.divided_by_z(1) * (1.0 / std::numbers::sqrt2);
}

} // namespace

PowerSeries series_f(std::size_t order)
{
    return hadamard_factor(order, +1.0);
}

PowerSeries series_g(std::size_t order)
{
    return hadamard_factor(order, -1.0);
}

PowerSeries generating_function(std::int64_t m1, BasisCoin initial, std::size_t order)
{
    if (m1 == 0) throw ConfigError("absorber position must be nonzero");
    const auto m = static_cast<unsigned>(m1 < 0 ? -m1 : m1);
    if (order < m) throw ConfigError("series order must be at least |m1|");

    // a left absorber exchanges the expressions for the two initial states
    const bool pure_g = (initial == BasisCoin::R) == (m1 > 0);
    const PowerSeries g = series_g(order);
    if (pure_g) return g.pow(m);
    return series_f(order) * g.pow(m - 1);
}

double quantum_absorption_prob(std::int64_t t)
{
    if (t < 2 || (t + 2) % 4 != 0) return 0.0;
    const double m = static_cast<double>((t + 2) / 4);
    // |a_t| = (2m-2)! / (2^(2m-1) (m-1)! m!)
    const double log_a = std::lgamma(2.0 * m - 1.0) - (2.0 * m - 1.0) * std::numbers::ln2
                         - std::lgamma(m) - std::lgamma(m + 1.0);
    return std::exp(2.0 * log_a);
}

namespace {

struct TailFit {
    double density = 0.0; // c in p_t ~ c t^-beta
    double beta = 0.0;
};

TailFit fit_tail(std::span<const double> p, std::size_t horizon)
{
    constexpr std::size_t block = 8;
    std::vector<double> xs, ys;
    for (std::size_t end = horizon; end >= block && end - block + 1 > horizon / 10; end -= block) {
        double sum = 0.0;
        for (std::size_t t = end - block + 1; t <= end; ++t) sum += p[t];
        if (sum > 0.0) {
            xs.push_back(std::log(static_cast<double>(end) - 0.5 * (block - 1)));
            ys.push_back(std::log(sum));
        }
    }
    if (xs.size() < 3) throw NumericalError("horizon too short for a power-law tail fit");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    return {std::exp(intercept) / static_cast<double>(block), -slope};
}

} // namespace

AbsorptionSummary summarize_absorption(const PowerSeries& amplitudes, TailModel tail)
{
    const std::size_t horizon = amplitudes.order();
    std::vector<double> p(horizon + 1, 0.0);
    AbsorptionSummary s;
    s.horizon = horizon;
    s.tail = tail;
    for (std::size_t t = 1; t <= horizon; ++t) {
        p[t] = amplitudes[t] * amplitudes[t];
        s.total += p[t];
        s.weighted += static_cast<double>(t) * p[t];
    }
    if (tail == TailModel::power_law) {
        const TailFit fit = fit_tail(p, horizon);
        if (!(fit.beta > 2.0))
            throw NumericalError("absorption tail decays too slowly for a finite mean time (beta = " +
                                 std::to_string(fit.beta) + ")");
        const double from = static_cast<double>(horizon) + 0.5;
        s.total += fit.density * std::pow(from, 1.0 - fit.beta) / (fit.beta - 1.0);
        s.weighted += fit.density * std::pow(from, 2.0 - fit.beta) / (fit.beta - 2.0);
        s.tail_exponent = fit.beta;
    }
    if (!(s.total > 0.0)) throw NumericalError("no absorption within horizon");
    s.mean_time = s.weighted / s.total;
    return s;
}

double total_absorption(std::int64_t m1, BasisCoin initial, std::size_t order, TailModel tail)
{
    return summarize_absorption(generating_function(m1, initial, order), tail).total;
}

double avg_absorb_time(std::int64_t m1, BasisCoin initial, std::size_t order, TailModel tail)
{
    return summarize_absorption(generating_function(m1, initial, order), tail).mean_time;
}

RaabeReport raabe_estimate(TermGenerator next_term, std::int64_t n_max, double inconclusive_band)
{
    if (n_max < 4) throw ConfigError("raabe estimate needs n_max >= 4");

    // sample points: n = floor(2^(j/16)), deduplicated
    std::vector<std::int64_t> samples;
    for (int j = 0;; ++j) {
        const auto n = static_cast<std::int64_t>(std::floor(std::exp2(j / 16.0)));
        if (n > n_max) break;
        if (samples.empty() || samples.back() != n) samples.push_back(n);
    }

    RaabeReport report;
    double u = next_term();
    std::size_t next_sample = 0;
    for (std::int64_t n = 1; n <= n_max && next_sample < samples.size(); ++n) {
        const double u_next = next_term();
        if (!(u > 0.0)) throw NumericalError("nonpositive term at index " + std::to_string(n));
        if (!(u_next > 0.0)) throw NumericalError("nonpositive term at index " + std::to_string(n + 1));
        if (n == samples[next_sample]) {
            report.estimates.emplace_back(n, static_cast<double>(n) * (u / u_next - 1.0));
            ++next_sample;
        }
        u = u_next;
    }

    // E_n = E + c/n on the top two octaves
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, e] : report.estimates)
        if (4 * n >= n_max) pts.emplace_back(1.0 / static_cast<double>(n), e);
    if (pts.size() < 2)
        for (const auto& [n, e] : report.estimates) pts.emplace_back(1.0 / static_cast<double>(n), e);

    if (pts.size() == 1) {
        report.extrapolated = pts.front().second;
    } else {
        double mx = 0.0, my = 0.0;
        for (const auto& [x, y] : pts) {
            mx += x;
            my += y;
        }
        mx /= static_cast<double>(pts.size());
        my /= static_cast<double>(pts.size());
        double sxy = 0.0, sxx = 0.0;
        for (const auto& [x, y] : pts) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
        report.extrapolated = sxx > 0.0 ? my - (sxy / sxx) * mx : my;
    }

    if (std::abs(report.extrapolated - 1.0) < inconclusive_band)
        report.verdict = RaabeVerdict::inconclusive;
    else
        report.verdict = report.extrapolated > 1.0 ? RaabeVerdict::converges : RaabeVerdict::diverges;
    return report;
}

TermGenerator classical_mean_time_terms(std::int64_t m1)
{
    if (m1 == 0) throw ConfigError("absorber position must be nonzero");
    const double m = static_cast<double>(m1 < 0 ? -m1 : m1);
    // u_n = (m + 2n)! / (4^n (m + n)! n!), generated by its term ratio
    return [m, n = 0.0, u = 0.0]() mutable {
        if (n == 0.0) {
            n = 1.0;
            u = (m + 2.0) / 4.0;
            return u;
        }
        u *= (m + 2.0 * n + 1.0) * (m + 2.0 * n + 2.0) / (4.0 * (m + n + 1.0) * (n + 1.0));
        n += 1.0;
        return u;
    };
}

TermGenerator quantum_mean_time_numerator_terms()
{
    // a_m = (2m-2)! / (2^(2m-1) (m-1)! m!), a_{m+1}/a_m = (2m-1) / (2(m+1))
    return [m = 0.0, a = 0.0]() mutable {
        if (m == 0.0) {
            m = 1.0;
            a = 0.5;
        } else {
            a *= (2.0 * m - 1.0) / (2.0 * (m + 1.0));
            m += 1.0;
        }
        return (4.0 * m - 2.0) * a * a;
    };
}

TermGenerator geometric_terms(double ratio)
{
    return [ratio, u = 1.0]() mutable {
        u *= ratio;
        return u;
    };
}

const char* to_string(RaabeVerdict v)
{
    switch (v) {
    case RaabeVerdict::converges: return "converges";
    case RaabeVerdict::diverges: return "diverges";
    case RaabeVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

} // namespace qwalk
