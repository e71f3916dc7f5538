#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qwalk/random.hpp"

namespace qwalk {

struct PoissonLaw {
    double lambda = 1.0;
};
struct BinomialLaw {
    int n = 1;
    double p = 0.5;
};
struct HypergeometricLaw {
    int population = 1; ///< N
    int successes = 0;  ///< K
    int draws = 0;      ///< n
};
/// pmf binom(l + r - 1, l) k^r (1 - k)^l, mean r(1-k)/k.
struct NegativeBinomialLaw {
    double r = 1.0;
    double k = 0.5;
};
/// pmf (1-k)^(l-1) k on l >= 1.
struct GeometricLaw {
    double k = 0.5;
};
/// pmf (1-k)^l k on l >= 0.
struct ShiftedGeometricLaw {
    double k = 0.5;
};

enum class Dispersion { sub_poissonian, poissonian, super_poissonian };

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    Dispersion dispersion = Dispersion::poissonian;
};

/// Step-length law of glassy disorder: parameters fixed for a whole walk.
class DisorderSpec {
  public:
    using Law = std::variant<PoissonLaw, BinomialLaw, HypergeometricLaw, NegativeBinomialLaw,
                             GeometricLaw, ShiftedGeometricLaw>;

    /// Throws ConfigError if parameters are outside the family's domain.
    explicit DisorderSpec(Law law);

    static DisorderSpec poisson(double lambda) { return DisorderSpec(PoissonLaw{lambda}); }
    static DisorderSpec binomial(int n, double p) { return DisorderSpec(BinomialLaw{n, p}); }
    static DisorderSpec hypergeometric(int population, int successes, int draws)
    {
        return DisorderSpec(HypergeometricLaw{population, successes, draws});
    }
    static DisorderSpec negative_binomial(double r, double k)
    {
        return DisorderSpec(NegativeBinomialLaw{r, k});
    }
    static DisorderSpec geometric(double k) { return DisorderSpec(GeometricLaw{k}); }
    static DisorderSpec geometric_shifted(double k) { return DisorderSpec(ShiftedGeometricLaw{k}); }

    /// Command-line grammar `family:key=value,key=value`, or a preset name.
    static DisorderSpec parse(std::string_view text);
    /// Key-value form produced by serialize(): `family=poisson lambda=1`.
    static DisorderSpec deserialize(std::string_view text);
    std::string serialize() const;

    const Law& law() const { return law_; }
    std::string family() const;

    double pmf(int l) const;
    Moments moments() const;
    int min_support() const;
    /// Largest l with nonzero mass, if finite.
    std::optional<int> max_support() const;

    friend bool operator==(const DisorderSpec&, const DisorderSpec&);

  private:
    Law law_;
};

bool operator==(const DisorderSpec& a, const DisorderSpec& b);

struct DisorderPreset {
    std::string name;
    DisorderSpec spec;
    /// Nonempty when the parameters are a reconstruction rather than given values.
    std::string note;
};

/// Unit-mean laws reproducing the variance column of the sub-/super-Poissonian table.
const std::vector<DisorderPreset>& table_ii_presets();
std::optional<DisorderPreset> find_preset(std::string_view name);

/// Inverse-CDF sampler on a cumulative table cut where the tail mass drops below 1e-12.
class LengthSampler {
  public:
    explicit LengthSampler(const DisorderSpec& spec);

    int draw(Rng& rng) const;
    const std::vector<double>& cdf() const { return cdf_; }
    int offset() const { return offset_; }

  private:
    int offset_ = 0;
    std::vector<double> cdf_;
};

struct Realization {
    std::uint64_t seed = 0;
    std::vector<int> lengths;
};

/// Deterministic in (spec, n_steps, seed).
Realization sample_realization(const DisorderSpec& spec, std::int64_t n_steps, std::uint64_t seed);

const char* to_string(Dispersion d);

} // namespace qwalk
