#include "qwalk/ensemble.hpp"

#include "qwalk/classical.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/random.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace qwalk {

namespace {

// Evaluates fn(i) for i in [0, count) on up to `workers` threads; results come
// back in index order so reductions over them are independent of scheduling.
template <typename Fn>
auto parallel_map(std::int64_t count, unsigned workers, Fn fn)
{
    using T = decltype(fn(std::int64_t{}));
    std::vector<T> out(static_cast<std::size_t>(count));
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::int64_t>(workers, count));

    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto work = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[static_cast<std::size_t>(i)] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) failure = std::current_exception();
                next = count;
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

struct Accumulator {
    std::vector<double> values;

    void add(double x) { values.push_back(x); }
    std::int64_t count() const { return static_cast<std::int64_t>(values.size()); }
    double mean() const
    {
        double sum = 0.0;
        for (double x : values) sum += x;
        return sum / static_cast<double>(values.size());
    }
    double std_error() const
    {
        if (values.size() < 2) return 0.0;
        const double n = static_cast<double>(values.size());
        const double m = mean();
        double ss = 0.0;
        for (double x : values) ss += (x - m) * (x - m);
        return std::sqrt(ss / (n - 1.0) / n);
    }
};

void check_grid(std::span<const std::int64_t> grid, std::int64_t steps, const char* what)
{
    if (grid.empty()) throw ConfigError(std::string(what) + " grid is empty");
    for (auto t : grid)
        if (t < 1 || t > steps)
            throw ConfigError(std::string(what) + " " + std::to_string(t) + " outside [1, " +
                              std::to_string(steps) + "]");
}

} // namespace

void EnsembleConfig::validate() const
{
    if (realizations < 1) throw ConfigError("realizations must be positive");
    if (steps < 1) throw ConfigError("steps must be positive");
    if (engine == Engine::quantum && !coin.is_unitary()) throw ConfigError("coin operator is not unitary");
}

RealizationRun run_realization(const EnsembleConfig& config, std::int64_t index)
{
    RealizationRun out;
    out.seed = mix_seed(config.master_seed, static_cast<std::uint64_t>(index));
    StepSchedule schedule = StepSchedule::clean();
    if (config.disorder)
        schedule = StepSchedule::from_lengths(sample_realization(*config.disorder, config.steps, out.seed).lengths);

    if (config.engine == Engine::quantum) {
        WalkRunConfig wc;
        wc.coin = config.coin;
        wc.initial = config.initial;
        wc.steps = config.steps;
        wc.absorber = config.absorber;
        wc.schedule = std::move(schedule);
        QuantumRun run = run_quantum(wc);
        out.absorption = std::move(run.absorption);
        out.sigma = std::move(run.sigma);
        out.mass_exhausted = run.mass_exhausted;
    } else {
        ClassicalRunConfig cc;
        cc.steps = config.steps;
        cc.absorber = config.absorber;
        cc.schedule = std::move(schedule);
        ClassicalRun run = run_classical(cc);
        out.absorption = std::move(run.absorption);
        out.sigma = std::move(run.sigma);
        out.mass_exhausted = run.mass_exhausted;
    }
    return out;
}

double finite_horizon_avg_time(const AbsorptionRecord& record, std::int64_t n)
{
    if (n < 1 || n > record.horizon())
        throw ConfigError("horizon " + std::to_string(n) + " outside the record");
    double weighted = 0.0, mass = 0.0;
    for (std::int64_t t = 1; t <= n; ++t) {
        const double p = record.per_step[static_cast<std::size_t>(t - 1)];
        weighted += static_cast<double>(t) * p;
        mass += p;
    }
    if (!(mass > 0.0)) throw NumericalError("no absorption within horizon " + std::to_string(n));
    return weighted / mass;
}

AveragedCurve disorder_avg_absorb_time(const EnsembleConfig& config, std::span<const std::int64_t> horizons)
{
    config.validate();
    if (!config.absorber) throw ConfigError("absorption time needs an absorber");
    check_grid(horizons, config.steps, "horizon");

    // per realization: t_a^(n) at each horizon, NaN where nothing was absorbed yet
    const auto per_run = parallel_map(config.realizations, config.workers, [&](std::int64_t i) {
        const RealizationRun run = run_realization(config, i);
        const auto& p = run.absorption.per_step;
        std::vector<double> weighted(p.size() + 1, 0.0), mass(p.size() + 1, 0.0);
        for (std::size_t t = 0; t < p.size(); ++t) {
            weighted[t + 1] = weighted[t] + static_cast<double>(t + 1) * p[t];
            mass[t + 1] = mass[t] + p[t];
        }
        std::vector<double> ta(horizons.size(), std::nan(""));
        for (std::size_t h = 0; h < horizons.size(); ++h) {
            // a fully drained run stops early; later horizons see the final sums
            const auto n = std::min<std::size_t>(static_cast<std::size_t>(horizons[h]), p.size());
            if (mass[n] > 0.0) ta[h] = weighted[n] / mass[n];
        }
        return ta;
    });

    AveragedCurve curve;
    curve.realizations = config.realizations;
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        Accumulator acc;
        for (const auto& ta : per_run)
            if (!std::isnan(ta[h])) acc.add(ta[h]);
        if (acc.count() == 0)
            throw NumericalError("no realization absorbed anything by horizon " + std::to_string(horizons[h]));
        curve.abscissa.push_back(horizons[h]);
        curve.values.push_back(acc.mean());
        curve.std_errors.push_back(acc.std_error());
        curve.excluded.push_back(config.realizations - acc.count());
    }
    return curve;
}

AveragedCurve disorder_avg_sigma(const EnsembleConfig& config, std::span<const std::int64_t> t_grid)
{
    config.validate();
    check_grid(t_grid, config.steps, "time");

    const auto per_run = parallel_map(config.realizations, config.workers, [&](std::int64_t i) {
        const RealizationRun run = run_realization(config, i);
        std::vector<double> s;
        s.reserve(t_grid.size());
        for (auto t : t_grid) {
            if (static_cast<std::size_t>(t) > run.sigma.size())
                throw EmptyDistributionError("realization " + std::to_string(i) + " fully absorbed before t = " +
                                             std::to_string(t));
            s.push_back(run.sigma[static_cast<std::size_t>(t - 1)]);
        }
        return s;
    });

    AveragedCurve curve;
    curve.realizations = config.realizations;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        Accumulator acc;
        for (const auto& s : per_run) acc.add(s[k]);
        curve.abscissa.push_back(t_grid[k]);
        curve.values.push_back(acc.mean());
        curve.std_errors.push_back(acc.std_error());
        curve.excluded.push_back(0);
    }
    return curve;
}

FitResult fit_exponent(const AveragedCurve& curve, std::int64_t t_lo, std::int64_t t_hi)
{
    if (!(t_lo < t_hi)) throw ConfigError("fit range needs t_lo < t_hi");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < curve.abscissa.size(); ++i) {
        const auto t = curve.abscissa[i];
        if (t < t_lo || t > t_hi) continue;
        if (t <= 0 || !(curve.values[i] > 0.0))
            throw NumericalError("nonpositive value at t = " + std::to_string(t) + " in fit range");
        xs.push_back(std::log(static_cast<double>(t)));
        ys.push_back(std::log(curve.values[i]));
    }
    if (xs.size() < 3) throw ConfigError("fit needs at least 3 points in range");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    FitResult fit;
    fit.alpha = sxy / sxx;
    fit.intercept = my - fit.alpha * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.alpha * xs[i]);
        ssr += r * r;
    }
    fit.residual_rms = std::sqrt(ssr / n);
    const double slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
    const boost::math::students_t dist(n - 2.0);
    fit.ci95_halfwidth = boost::math::quantile(dist, 0.975) * slope_se;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.points = xs.size();
    return fit;
}

std::vector<std::int64_t> integer_range(std::int64_t lo, std::int64_t hi)
{
    std::vector<std::int64_t> v;
    for (std::int64_t t = lo; t <= hi; ++t) v.push_back(t);
    return v;
}

} // namespace qwalk
