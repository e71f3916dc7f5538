#include "qwalk/disorder.hpp"

#include "qwalk/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace qwalk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double log_choose(double n, double k)
{
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void validate(const DisorderSpec::Law& law)
{
    std::visit(overloaded{
                   [](const PoissonLaw& d) {
                       if (!(d.lambda > 0.0)) throw ConfigError("poisson: lambda must be > 0");
                   },
                   [](const BinomialLaw& d) {
                       if (d.n < 1) throw ConfigError("binomial: n must be >= 1");
                       if (!(d.p >= 0.0 && d.p <= 1.0)) throw ConfigError("binomial: p must be in [0,1]");
                   },
                   [](const HypergeometricLaw& d) {
                       if (d.population < 1) throw ConfigError("hypergeometric: N must be >= 1");
                       if (d.successes < 0 || d.successes > d.population)
                           throw ConfigError("hypergeometric: need N >= K >= 0");
                       if (d.draws < 0 || d.draws > d.population)
                           throw ConfigError("hypergeometric: need N >= n >= 0");
                   },
                   [](const NegativeBinomialLaw& d) {
                       if (!(d.r > 0.0)) throw ConfigError("negative_binomial: r must be > 0");
                       if (!(d.k > 0.0 && d.k < 1.0)) throw ConfigError("negative_binomial: k must be in (0,1)");
                   },
                   [](const GeometricLaw& d) {
                       if (!(d.k > 0.0 && d.k <= 1.0)) throw ConfigError("geometric: k must be in (0,1]");
                   },
                   [](const ShiftedGeometricLaw& d) {
                       if (!(d.k > 0.0 && d.k <= 1.0))
                           throw ConfigError("geometric_shifted: k must be in (0,1]");
                   },
               },
               law);
}

std::string format_number(double x)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

double parse_number(const std::string& key, const std::string& value)
{
    double x = 0.0;
    const char* first = value.data();
    const char* last = first + value.size();
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc{} || ptr != last || value.empty())
        throw ConfigError("invalid value for " + key + ": '" + value + "'");
    return x;
}

int parse_integer(const std::string& key, const std::string& value)
{
    int x = 0;
    const char* first = value.data();
    const char* last = first + value.size();
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc{} || ptr != last || value.empty())
        throw ConfigError("invalid integer for " + key + ": '" + value + "'");
    return x;
}

using Params = std::map<std::string, std::string>;

class ParamReader {
  public:
    ParamReader(std::string family, Params params) : family_(std::move(family)), params_(std::move(params)) {}

    double number(const std::string& key) { return parse_number(key, take(key)); }
    int integer(const std::string& key) { return parse_integer(key, take(key)); }

    void finish() const
    {
        if (!params_.empty())
            throw ConfigError(family_ + ": unknown parameter '" + params_.begin()->first + "'");
    }

  private:
    std::string take(const std::string& key)
    {
        auto it = params_.find(key);
        if (it == params_.end()) throw ConfigError(family_ + ": missing parameter '" + key + "'");
        std::string v = it->second;
        params_.erase(it);
        return v;
    }

    std::string family_;
    Params params_;
};

DisorderSpec build(const std::string& family, Params params)
{
    ParamReader r(family, std::move(params));
    auto done = [&r](DisorderSpec s) {
        r.finish();
        return s;
    };
    if (family == "poisson") return done(DisorderSpec::poisson(r.number("lambda")));
    if (family == "binomial") {
        const int n = r.integer("n");
        return done(DisorderSpec::binomial(n, r.number("p")));
    }
    if (family == "hypergeometric") {
        const int N = r.integer("N");
        const int K = r.integer("K");
        return done(DisorderSpec::hypergeometric(N, K, r.integer("n")));
    }
    if (family == "negative_binomial" || family == "negbinomial") {
        const double rr = r.number("r");
        return done(DisorderSpec::negative_binomial(rr, r.number("k")));
    }
    if (family == "geometric") return done(DisorderSpec::geometric(r.number("k")));
    if (family == "geometric_shifted") return done(DisorderSpec::geometric_shifted(r.number("k")));
    throw ConfigError("unknown disorder family '" + family + "'");
}

std::pair<std::string, std::string> split_pair(std::string_view item)
{
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("expected key=value, got '" + std::string(item) + "'");
    return {std::string(item.substr(0, eq)), std::string(item.substr(eq + 1))};
}

} // namespace

DisorderSpec::DisorderSpec(Law law) : law_(std::move(law))
{
    validate(law_);
}

DisorderSpec DisorderSpec::parse(std::string_view text)
{
    if (auto preset = find_preset(text)) return preset->spec;

    const auto colon = text.find(':');
    const std::string family(text.substr(0, colon));
    Params params;
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto item = rest.substr(0, comma);
            auto [k, v] = split_pair(item);
            if (!params.emplace(k, v).second) throw ConfigError("duplicate parameter '" + k + "'");
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
    }
    return build(family, std::move(params));
}

DisorderSpec DisorderSpec::deserialize(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string token, family;
    Params params;
    while (in >> token) {
        auto [k, v] = split_pair(token);
        if (k == "family") {
            family = v;
            continue;
        }
        if (!params.emplace(k, v).second) throw ConfigError("duplicate parameter '" + k + "'");
    }
    if (family.empty()) throw ConfigError("disorder spec is missing 'family='");
    return build(family, std::move(params));
}

std::string DisorderSpec::family() const
{
    return std::visit(overloaded{
                          [](const PoissonLaw&) { return std::string("poisson"); },
                          [](const BinomialLaw&) { return std::string("binomial"); },
                          [](const HypergeometricLaw&) { return std::string("hypergeometric"); },
                          [](const NegativeBinomialLaw&) { return std::string("negative_binomial"); },
                          [](const GeometricLaw&) { return std::string("geometric"); },
                          [](const ShiftedGeometricLaw&) { return std::string("geometric_shifted"); },
                      },
                      law_);
}

std::string DisorderSpec::serialize() const
{
    std::string params = std::visit(
        overloaded{
            [](const PoissonLaw& d) { return "lambda=" + format_number(d.lambda); },
            [](const BinomialLaw& d) { return "n=" + std::to_string(d.n) + " p=" + format_number(d.p); },
            [](const HypergeometricLaw& d) {
                return "N=" + std::to_string(d.population) + " K=" + std::to_string(d.successes) +
                       " n=" + std::to_string(d.draws);
            },
            [](const NegativeBinomialLaw& d) { return "r=" + format_number(d.r) + " k=" + format_number(d.k); },
            [](const GeometricLaw& d) { return "k=" + format_number(d.k); },
            [](const ShiftedGeometricLaw& d) { return "k=" + format_number(d.k); },
        },
        law_);
    return "family=" + family() + " " + params;
}

double DisorderSpec::pmf(int l) const
{
    if (l < 0) return 0.0;
    const double x = l;
    return std::visit(
        overloaded{
            [x](const PoissonLaw& d) { return std::exp(x * std::log(d.lambda) - d.lambda - std::lgamma(x + 1.0)); },
            [x, l](const BinomialLaw& d) {
                if (l > d.n) return 0.0;
                return std::exp(log_choose(d.n, x)) * std::pow(d.p, x) * std::pow(1.0 - d.p, d.n - x);
            },
            [x, l](const HypergeometricLaw& d) {
                const int failures = d.population - d.successes;
                if (l > d.successes || d.draws - l > failures || l > d.draws) return 0.0;
                return std::exp(log_choose(d.successes, x) + log_choose(failures, d.draws - x) -
                                log_choose(d.population, d.draws));
            },
            [x](const NegativeBinomialLaw& d) {
                return std::exp(std::lgamma(x + d.r) - std::lgamma(x + 1.0) - std::lgamma(d.r) +
                                d.r * std::log(d.k) + x * std::log1p(-d.k));
            },
            [x, l](const GeometricLaw& d) {
                if (l < 1) return 0.0;
                return std::pow(1.0 - d.k, x - 1.0) * d.k;
            },
            [x](const ShiftedGeometricLaw& d) { return std::pow(1.0 - d.k, x) * d.k; },
        },
        law_);
}

Moments DisorderSpec::moments() const
{
    Moments m;
    std::visit(overloaded{
                   [&m](const PoissonLaw& d) { m.mean = m.variance = d.lambda; },
                   [&m](const BinomialLaw& d) {
                       m.mean = d.n * d.p;
                       m.variance = d.n * d.p * (1.0 - d.p);
                   },
                   [&m](const HypergeometricLaw& d) {
                       const double N = d.population, K = d.successes, n = d.draws;
                       m.mean = n * K / N;
                       m.variance = d.population > 1 ? n * K * (N - K) * (N - n) / (N * N * (N - 1.0)) : 0.0;
                   },
                   [&m](const NegativeBinomialLaw& d) {
                       m.mean = d.r * (1.0 - d.k) / d.k;
                       m.variance = d.r * (1.0 - d.k) / (d.k * d.k);
                   },
                   [&m](const GeometricLaw& d) {
                       m.mean = 1.0 / d.k;
                       m.variance = (1.0 - d.k) / (d.k * d.k);
                   },
                   [&m](const ShiftedGeometricLaw& d) {
                       m.mean = (1.0 - d.k) / d.k;
                       m.variance = (1.0 - d.k) / (d.k * d.k);
                   },
               },
               law_);
    const double tol = 1e-12 * std::max(1.0, std::abs(m.mean));
    if (std::abs(m.variance - m.mean) <= tol)
        m.dispersion = Dispersion::poissonian;
    else
        m.dispersion = m.variance < m.mean ? Dispersion::sub_poissonian : Dispersion::super_poissonian;
    return m;
}

int DisorderSpec::min_support() const
{
    if (std::holds_alternative<GeometricLaw>(law_)) return 1;
    if (const auto* h = std::get_if<HypergeometricLaw>(&law_))
        return std::max(0, h->draws - (h->population - h->successes));
    return 0;
}

std::optional<int> DisorderSpec::max_support() const
{
    return std::visit(overloaded{
                          [](const BinomialLaw& d) -> std::optional<int> { return d.p > 0.0 ? d.n : 0; },
                          [](const HypergeometricLaw& d) -> std::optional<int> {
                              return std::min(d.draws, d.successes);
                          },
                          [](const GeometricLaw& d) -> std::optional<int> {
                              if (d.k == 1.0) return 1;
                              return std::nullopt;
                          },
                          [](const ShiftedGeometricLaw& d) -> std::optional<int> {
                              if (d.k == 1.0) return 0;
                              return std::nullopt;
                          },
                          [](const auto&) -> std::optional<int> { return std::nullopt; },
                      },
                      law_);
}

bool operator==(const DisorderSpec& a, const DisorderSpec& b)
{
    return a.serialize() == b.serialize();
}

const std::vector<DisorderPreset>& table_ii_presets()
{
    static const std::vector<DisorderPreset> presets = {
        {"tableII-binomial", DisorderSpec::binomial(2, 0.5), ""},
        {"tableII-hypergeometric", DisorderSpec::hypergeometric(10, 5, 2),
         "reconstructed parameters (N=10,K=5,n=2): mean 1, variance 4/9"},
        {"tableII-negbinomial", DisorderSpec::negative_binomial(1.0, 0.5), ""},
        {"tableII-geometric", DisorderSpec::geometric_shifted(0.5),
         "shifted geometric on l>=0 (k=1/2): mean 1, variance 2; the l>=1 form cannot have unit mean and variance 2"},
    };
    return presets;
}

std::optional<DisorderPreset> find_preset(std::string_view name)
{
    for (const auto& p : table_ii_presets())
        if (p.name == name) return p;
    return std::nullopt;
}

LengthSampler::LengthSampler(const DisorderSpec& spec) : offset_(spec.min_support())
{
    constexpr double tail_cut = 1e-12;
    constexpr int max_table = 10'000'000;
    const auto last = spec.max_support();
    const double mean = spec.moments().mean;

    double cum = 0.0;
    for (int l = offset_;; ++l) {
        cum += spec.pmf(l);
        cdf_.push_back(cum);
        if (last && l >= *last) break;
        if (1.0 - cum < tail_cut && l >= mean) break;
        if (static_cast<int>(cdf_.size()) >= max_table)
            throw ConfigError("disorder law " + spec.serialize() + " has too heavy a tail to tabulate");
    }
    for (double& c : cdf_) c /= cum;
    cdf_.back() = 1.0;
}

int LengthSampler::draw(Rng& rng) const
{
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
    return offset_ + static_cast<int>(idx);
}

Realization sample_realization(const DisorderSpec& spec, std::int64_t n_steps, std::uint64_t seed)
{
    if (n_steps < 1) throw ConfigError("realization needs at least one step");
    const LengthSampler sampler(spec);
    Rng rng(seed);
    Realization r;
    r.seed = seed;
    r.lengths.reserve(static_cast<std::size_t>(n_steps));
    for (std::int64_t i = 0; i < n_steps; ++i) r.lengths.push_back(sampler.draw(rng));
    return r;
}

const char* to_string(Dispersion d)
{
    switch (d) {
    case Dispersion::sub_poissonian: return "sub_poissonian";
    case Dispersion::poissonian: return "poissonian";
    case Dispersion::super_poissonian: return "super_poissonian";
    }
    return "poissonian";
}

} // namespace qwalk
