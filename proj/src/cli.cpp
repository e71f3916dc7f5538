#include "qwalk/cli.hpp"

#include "qwalk/classical.hpp"
#include "qwalk/disorder.hpp"
#include "qwalk/ensemble.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/random.hpp"
#include "qwalk/series.hpp"
#include "qwalk/walk.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

namespace qwalk::cli {

namespace {

using json = nlohmann::ordered_json;

std::string num(double x)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::string num(std::int64_t x)
{
    return std::to_string(x);
}

struct CommonFlags {
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::string format = "csv";
    std::string output;
};

struct WalkFlags {
    std::string engine = "quantum";
    std::string coin = "hadamard";
    std::string initial = "L";
    std::int64_t steps = 0;
    std::optional<std::int64_t> absorber;
    std::string disorder;
};

/// A finished result: metadata plus either a CSV table or a JSON body.
struct Report {
    json meta = json::object();
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    json result = json::object();
};

void add_common(CLI::App* cmd, CommonFlags& c)
{
    cmd->add_option("--seed", c.seed, "master seed (env QWALK_SEED)");
    cmd->add_option("--workers", c.workers, "worker threads, 0 = all cores (env QWALK_WORKERS)");
    cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output,-o", c.output, "write to FILE instead of stdout");
}

void add_walk(CLI::App* cmd, WalkFlags& w, bool steps_required)
{
    cmd->add_option("--engine", w.engine)->check(CLI::IsMember({"quantum", "classical"}));
    cmd->add_option("--coin", w.coin)->check(CLI::IsMember({"hadamard", "hadamard-alt", "kempe"}));
    cmd->add_option("--initial", w.initial, "initial coin state")->check(CLI::IsMember({"L", "R"}));
    auto* steps = cmd->add_option("--steps", w.steps, "number of time steps");
    if (steps_required) steps->required();
    cmd->add_option("--absorber", w.absorber, "absorber position m1 (nonzero)");
    cmd->add_option("--disorder", w.disorder, "step-length law, family:key=value,... or a preset");
}

CoinOperator parse_coin(const std::string& name)
{
    if (name == "hadamard") return hadamard_coin(HadamardVariant::standard);
    if (name == "hadamard-alt") return hadamard_coin(HadamardVariant::alternate);
    if (name == "kempe") return kempe_coin();
    throw ConfigError("--coin: unknown coin '" + name + "'");
}

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text, const std::string& sep,
                                                  const std::string& flag)
{
    const auto at = text.find(sep);
    if (at == std::string::npos) throw ConfigError(flag + ": expected LO" + sep + "HI, got '" + text + "'");
    auto to_int = [&](const std::string& s) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
            throw ConfigError(flag + ": invalid integer '" + s + "'");
        return v;
    };
    const auto lo = to_int(text.substr(0, at));
    const auto hi = to_int(text.substr(at + sep.size()));
    if (lo > hi) throw ConfigError(flag + ": empty range '" + text + "'");
    return {lo, hi};
}

std::optional<DisorderSpec> resolve_disorder(const WalkFlags& w, json& meta)
{
    if (w.disorder.empty()) return std::nullopt;
    DisorderSpec spec = [&] {
        try {
            return DisorderSpec::parse(w.disorder);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("--disorder: ") + e.what());
        }
    }();
    meta["disorder"] = spec.serialize();
    if (auto preset = find_preset(w.disorder); preset && !preset->note.empty()) meta["disorder_note"] = preset->note;
    return spec;
}

json walk_config_json(const WalkFlags& w)
{
    json c;
    c["engine"] = w.engine;
    if (w.engine == "quantum") {
        c["coin"] = w.coin;
        c["initial"] = w.initial;
    }
    c["steps"] = w.steps;
    c["absorber"] = w.absorber ? json(*w.absorber) : json(nullptr);
    c["disorder"] = w.disorder.empty() ? json(nullptr) : json(w.disorder);
    return c;
}

EnsembleConfig ensemble_from(const WalkFlags& w, const CommonFlags& c, std::optional<DisorderSpec> disorder)
{
    EnsembleConfig e;
    e.engine = w.engine == "classical" ? Engine::classical : Engine::quantum;
    e.coin = parse_coin(w.coin);
    e.initial = w.initial == "R" ? CoinState::R() : CoinState::L();
    if (w.absorber) e.absorber.emplace(*w.absorber);
    e.disorder = std::move(disorder);
    e.steps = w.steps;
    e.master_seed = c.seed;
    e.workers = c.workers;
    return e;
}

json base_meta(const std::string& command, const CommonFlags& c)
{
    json m;
    m["tool"] = tool_version;
    m["command"] = command;
    m["seed"] = c.seed;
    m["config"] = nullptr;
    m["exclusions"] = 0;
    return m;
}

void write_report(const Report& r, const CommonFlags& c, std::ostream& out)
{
    std::ostringstream body;
    if (c.format == "json") {
        json doc;
        doc["meta"] = r.meta;
        doc["result"] = r.result;
        body << doc.dump(2) << '\n';
    } else {
        for (const auto& [key, value] : r.meta.items())
            body << "# " << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
        for (std::size_t i = 0; i < r.header.size(); ++i) body << (i ? "," : "") << r.header[i];
        body << '\n';
        for (const auto& row : r.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) body << (i ? "," : "") << row[i];
            body << '\n';
        }
    }
    if (c.output.empty()) {
        out << body.str();
        return;
    }
    std::ofstream file(c.output, std::ios::binary);
    if (!file) throw ConfigError("--output: cannot open '" + c.output + "'");
    file << body.str();
}

// ---------------------------------------------------------------- walk

Report cmd_walk(const WalkFlags& w, const CommonFlags& c, std::vector<std::int64_t> snapshots)
{
    Report r;
    r.meta = base_meta("walk", c);
    json cfg = walk_config_json(w);
    if (snapshots.empty()) snapshots.push_back(w.steps);
    for (auto t : snapshots)
        if (t < 1 || t > w.steps)
            throw ConfigError("--snapshot: " + std::to_string(t) + " outside [1, " + std::to_string(w.steps) + "]");
    cfg["snapshots"] = snapshots;
    r.meta["config"] = cfg;

    auto disorder = resolve_disorder(w, r.meta);
    StepSchedule schedule = StepSchedule::clean();
    if (disorder) {
        const auto seed = mix_seed(c.seed, 0);
        schedule = StepSchedule::from_lengths(sample_realization(*disorder, w.steps, seed).lengths);
    }
    std::optional<Absorber> absorber;
    if (w.absorber) absorber.emplace(*w.absorber);
    r.meta["exclusions"] = 0;

    std::vector<PositionDistribution> taken;
    auto wanted = [&](std::int64_t t) { return std::find(snapshots.begin(), snapshots.end(), t) != snapshots.end(); };
    if (w.engine == "quantum") {
        WalkRunConfig cfg_run;
        cfg_run.coin = parse_coin(w.coin);
        cfg_run.initial = w.initial == "R" ? CoinState::R() : CoinState::L();
        cfg_run.steps = w.steps;
        cfg_run.absorber = absorber;
        cfg_run.schedule = schedule;
        run_quantum(cfg_run, [&](const QuantumState& s) {
            if (wanted(s.time())) taken.push_back(probability_distribution(s));
        });
    } else {
        ClassicalRunConfig cfg_run;
        cfg_run.steps = w.steps;
        cfg_run.absorber = absorber;
        cfg_run.schedule = schedule;
        run_classical(cfg_run, [&](const ClassicalState& s) {
            if (wanted(s.time())) taken.push_back(probability_distribution(s));
        });
    }
    if (taken.size() < snapshots.size()) throw EmptyDistributionError("walker fully absorbed before a snapshot");

    r.header = {"t", "n", "p"};
    r.result["snapshots"] = json::array();
    for (const auto& d : taken) {
        json snap;
        snap["t"] = d.time;
        snap["mass"] = d.sum();
        snap["sigma"] = std_dev(d);
        json entries = json::array();
        for (const auto& e : d.entries) {
            if (e.probability == 0.0) continue;
            r.rows.push_back({num(d.time), num(e.position), num(e.probability)});
            entries.push_back({e.position, e.probability});
        }
        snap["distribution"] = std::move(entries);
        r.result["snapshots"].push_back(std::move(snap));
    }
    return r;
}

// ---------------------------------------------------------------- absorb

Report cmd_absorb(const WalkFlags& w, const CommonFlags& c, std::optional<std::int64_t> realizations,
                  const std::vector<std::int64_t>& horizon_list)
{
    if (!w.absorber) throw ConfigError("--absorber is required for absorb");
    Report r;
    r.meta = base_meta("absorb", c);
    json cfg = walk_config_json(w);
    auto disorder = resolve_disorder(w, r.meta);
    EnsembleConfig e = ensemble_from(w, c, disorder);

    if (!disorder) {
        if (realizations && *realizations != 1) throw ConfigError("--realizations needs --disorder");
        r.meta["config"] = cfg;
        r.meta["exclusions"] = 0;
        const RealizationRun run = run_realization(e, 0);
        const auto& p = run.absorption.per_step;
        r.header = {"t", "p_t", "cumulative", "t_a"};
        double weighted = 0.0, mass = 0.0;
        json ta_curve = json::array();
        for (std::size_t i = 0; i < p.size(); ++i) {
            weighted += static_cast<double>(i + 1) * p[i];
            mass += p[i];
            const std::string ta = mass > 0.0 ? num(weighted / mass) : "";
            r.rows.push_back({num(static_cast<std::int64_t>(i + 1)), num(p[i]), num(mass), ta});
            ta_curve.push_back(mass > 0.0 ? json(weighted / mass) : json(nullptr));
        }
        r.result["horizon"] = static_cast<std::int64_t>(p.size());
        r.result["cumulative_P"] = mass;
        r.result["t_a"] = mass > 0.0 ? json(weighted / mass) : json(nullptr);
        r.result["mass_exhausted"] = run.mass_exhausted;
        r.result["per_step"] = p;
        r.result["t_a_curve"] = std::move(ta_curve);
        return r;
    }

    e.realizations = realizations.value_or(40);
    cfg["realizations"] = e.realizations;
    const auto horizons = horizon_list.empty() ? integer_range(1, w.steps) : horizon_list;
    if (!horizon_list.empty()) cfg["horizons"] = horizon_list;
    r.meta["config"] = cfg;
    const AveragedCurve curve = disorder_avg_absorb_time(e, horizons);
    std::int64_t max_excluded = 0;
    for (auto x : curve.excluded) max_excluded = std::max(max_excluded, x);
    r.meta["exclusions"] = max_excluded;
    r.meta["note"] = "finite-horizon averages; values depend on realizations and horizon";

    r.header = {"n", "mean_t_a", "std_error", "excluded"};
    for (std::size_t i = 0; i < curve.abscissa.size(); ++i)
        r.rows.push_back({num(curve.abscissa[i]), num(curve.values[i]), num(curve.std_errors[i]),
                          num(curve.excluded[i])});
    r.result["realizations"] = curve.realizations;
    r.result["horizons"] = curve.abscissa;
    r.result["mean_t_a"] = curve.values;
    r.result["std_error"] = curve.std_errors;
    r.result["excluded"] = curve.excluded;
    return r;
}

// ---------------------------------------------------------------- series

struct SeriesFlags {
    std::string m1_range = "1..10";
    std::int64_t order = 16384;
    std::string tail = "power_law";
    std::string initial = "L";
    std::string raabe;
    std::int64_t m1 = 2;
    std::int64_t n_max = 1'000'000;
};

Report cmd_series(const SeriesFlags& s, const CommonFlags& c)
{
    Report r;
    r.meta = base_meta("series", c);
    json cfg;
    if (!s.raabe.empty()) {
        cfg["raabe"] = s.raabe;
        cfg["m1"] = s.m1;
        cfg["n_max"] = s.n_max;
        r.meta["config"] = cfg;
        r.meta["exclusions"] = 0;
        if (s.raabe == "quantum" && s.m1 != 2)
            throw ConfigError("--raabe quantum: closed-form terms exist only for --m1 2");
        TermGenerator terms = s.raabe == "classical" ? classical_mean_time_terms(s.m1) : quantum_mean_time_numerator_terms();
        const RaabeReport rep = raabe_estimate(std::move(terms), s.n_max);
        r.meta["extrapolated_E"] = rep.extrapolated;
        r.meta["verdict"] = to_string(rep.verdict);
        r.header = {"n", "E_n"};
        json est = json::array();
        for (const auto& [n, e] : rep.estimates) {
            r.rows.push_back({num(n), num(e)});
            est.push_back({n, e});
        }
        r.result["extrapolated_E"] = rep.extrapolated;
        r.result["verdict"] = to_string(rep.verdict);
        r.result["estimates"] = std::move(est);
        return r;
    }

    const auto [lo, hi] = parse_range(s.m1_range, "..", "--m1-range");
    if (s.order < 1) throw ConfigError("--T must be positive");
    cfg["m1_range"] = s.m1_range;
    cfg["T"] = s.order;
    cfg["tail"] = s.tail;
    cfg["initial"] = s.initial;
    r.meta["config"] = cfg;
    r.meta["exclusions"] = 0;
    const TailModel tail = s.tail == "power_law" ? TailModel::power_law : TailModel::none;
    const BasisCoin initial = s.initial == "R" ? BasisCoin::R : BasisCoin::L;

    r.header = {"m1", "P", "t_a", "tail_beta"};
    r.result["rows"] = json::array();
    for (std::int64_t m1 = lo; m1 <= hi; ++m1) {
        if (m1 == 0) continue;
        const auto G = generating_function(m1, initial, static_cast<std::size_t>(s.order));
        const AbsorptionSummary sum = summarize_absorption(G, tail);
        r.rows.push_back({num(m1), num(sum.total), num(sum.mean_time), num(sum.tail_exponent)});
        json row;
        row["m1"] = m1;
        row["P"] = sum.total;
        row["t_a"] = sum.mean_time;
        row["tail_beta"] = sum.tail_exponent;
        r.result["rows"].push_back(std::move(row));
    }
    return r;
}

// ---------------------------------------------------------------- exponent

json fit_json(const FitResult& f)
{
    json j;
    j["alpha"] = f.alpha;
    j["intercept"] = f.intercept;
    j["ci95_halfwidth"] = f.ci95_halfwidth;
    j["residual_rms"] = f.residual_rms;
    j["t_lo"] = f.t_lo;
    j["t_hi"] = f.t_hi;
    j["points"] = f.points;
    return j;
}

Report cmd_exponent(WalkFlags w, const CommonFlags& c, std::optional<std::int64_t> realizations,
                    const std::string& t_range)
{
    Report r;
    r.meta = base_meta("exponent", c);
    const auto [t_lo, t_hi] = parse_range(t_range, ":", "--t-range");
    if (t_lo < 1) throw ConfigError("--t-range: times start at 1");
    if (w.steps == 0) w.steps = t_hi;
    if (w.steps < t_hi) throw ConfigError("--steps must reach the end of --t-range");
    json cfg = walk_config_json(w);
    auto disorder = resolve_disorder(w, r.meta);
    EnsembleConfig e = ensemble_from(w, c, disorder);
    e.realizations = realizations.value_or(disorder ? 200 : 1);
    cfg["realizations"] = e.realizations;
    cfg["t_range"] = t_range;
    r.meta["config"] = cfg;
    r.meta["exclusions"] = 0;

    const auto grid = integer_range(1, w.steps);
    const AveragedCurve curve = disorder_avg_sigma(e, grid);
    const FitResult fit = fit_exponent(curve, t_lo, t_hi);
    r.meta["fit"] = fit_json(fit);
    r.header = {"t", "mean_sigma", "std_error"};
    for (std::size_t i = 0; i < curve.abscissa.size(); ++i)
        r.rows.push_back({num(curve.abscissa[i]), num(curve.values[i]), num(curve.std_errors[i])});
    r.result = fit_json(fit);
    return r;
}

// ---------------------------------------------------------------- sweep

Report cmd_sweep(const CommonFlags& c, std::int64_t realizations, std::int64_t absorber, const std::string& t_range,
                 std::vector<std::string> presets)
{
    Report r;
    r.meta = base_meta("sweep", c);
    const auto [t_lo, t_hi] = parse_range(t_range, ":", "--t-range");
    if (t_lo < 1) throw ConfigError("--t-range: times start at 1");
    if (presets.empty())
        for (const auto& p : table_ii_presets()) presets.push_back(p.name);
    json cfg;
    cfg["realizations"] = realizations;
    cfg["absorber"] = absorber;
    cfg["t_range"] = t_range;
    cfg["presets"] = presets;
    r.meta["config"] = cfg;
    r.meta["exclusions"] = 0;

    Absorber abs(absorber);
    json notes = json::object();
    r.header = {"preset", "disorder", "mean", "variance", "absorber", "alpha", "ci95"};
    r.result["rows"] = json::array();
    for (const auto& name : presets) {
        const auto preset = find_preset(name);
        if (!preset) throw ConfigError("--presets: unknown preset '" + name + "'");
        if (!preset->note.empty()) notes[name] = preset->note;
        const Moments mom = preset->spec.moments();
        for (bool with_absorber : {true, false}) {
            EnsembleConfig e;
            e.engine = Engine::quantum;
            e.disorder = preset->spec;
            if (with_absorber) e.absorber = abs;
            e.realizations = realizations;
            e.steps = t_hi;
            e.master_seed = c.seed;
            e.workers = c.workers;
            const auto grid = integer_range(1, t_hi);
            const FitResult fit = fit_exponent(disorder_avg_sigma(e, grid), t_lo, t_hi);
            r.rows.push_back({name, "\"" + preset->spec.serialize() + "\"", num(mom.mean), num(mom.variance),
                              with_absorber ? "yes" : "no", num(fit.alpha), num(fit.ci95_halfwidth)});
            json row;
            row["preset"] = name;
            row["disorder"] = preset->spec.serialize();
            row["mean"] = mom.mean;
            row["variance"] = mom.variance;
            row["absorber"] = with_absorber;
            row["fit"] = fit_json(fit);
            r.result["rows"].push_back(std::move(row));
        }
    }
    if (!notes.empty()) r.meta["preset_notes"] = notes;
    return r;
}

template <typename T>
void env_default(const EnvLookup& env, const char* name, T& target)
{
    if (auto v = env(name)) {
        T parsed{};
        auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
        if (ec != std::errc{} || p != v->data() + v->size())
            throw ConfigError(std::string(name) + ": invalid value '" + *v + "'");
        target = parsed;
    }
}

} // namespace

EnvLookup process_env()
{
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env)
{
    CommonFlags common;
    try {
        env_default(env, "QWALK_SEED", common.seed);
        env_default(env, "QWALK_WORKERS", common.workers);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return invalid_config;
    }

    CLI::App app{"Quantum and classical walks with absorbers and step-length disorder", "qwalk"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    WalkFlags walk_flags;
    std::vector<std::int64_t> snapshots;
    auto* walk = app.add_subcommand("walk", "position distributions at snapshot times");
    add_walk(walk, walk_flags, true);
    walk->add_option("--snapshot", snapshots, "time of a distribution snapshot (repeatable)");
    add_common(walk, common);

    WalkFlags absorb_flags;
    std::optional<std::int64_t> absorb_realizations;
    std::vector<std::int64_t> horizons;
    auto* absorb = app.add_subcommand("absorb", "absorption probabilities and finite-horizon mean times");
    add_walk(absorb, absorb_flags, true);
    absorb->add_option("--realizations", absorb_realizations, "disorder realizations (default 40)");
    absorb->add_option("--horizons", horizons, "horizons n for the averaged curve")->delimiter(',');
    add_common(absorb, common);

    SeriesFlags series_flags;
    auto* series = app.add_subcommand("series", "generating-function totals and Raabe diagnostics");
    series->add_option("--m1-range", series_flags.m1_range, "absorber positions LO..HI");
    series->add_option("--T", series_flags.order, "series truncation order");
    series->add_option("--tail", series_flags.tail)->check(CLI::IsMember({"none", "power_law"}));
    series->add_option("--initial", series_flags.initial)->check(CLI::IsMember({"L", "R"}));
    series->add_option("--raabe", series_flags.raabe, "Raabe test of the mean-time series")
        ->check(CLI::IsMember({"classical", "quantum"}));
    series->add_option("--m1", series_flags.m1, "absorber position for --raabe");
    series->add_option("--n-max", series_flags.n_max, "largest Raabe index");
    add_common(series, common);

    WalkFlags exponent_flags;
    std::optional<std::int64_t> exponent_realizations;
    std::string exponent_range = "20:80";
    auto* exponent = app.add_subcommand("exponent", "fit sigma ~ t^alpha on a disorder-averaged curve");
    add_walk(exponent, exponent_flags, false);
    exponent->add_option("--realizations", exponent_realizations, "disorder realizations (default 200 with --disorder, else 1)");
    exponent->add_option("--t-range", exponent_range, "fit range LO:HI");
    add_common(exponent, common);

    std::int64_t sweep_realizations = 200;
    std::int64_t sweep_absorber = 2;
    std::string sweep_range = "20:80";
    std::vector<std::string> sweep_presets;
    auto* sweep = app.add_subcommand("sweep", "exponents for the unit-mean disorder presets");
    sweep->add_option("--realizations", sweep_realizations);
    sweep->add_option("--absorber", sweep_absorber);
    sweep->add_option("--t-range", sweep_range);
    sweep->add_option("--presets", sweep_presets)->delimiter(',');
    add_common(sweep, common);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForVersion&) {
        out << tool_version << '\n';
        return ok;
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return ok;
    } catch (const CLI::Success&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return invalid_config;
    }

    try {
        Report report;
        if (walk->parsed())
            report = cmd_walk(walk_flags, common, snapshots);
        else if (absorb->parsed())
            report = cmd_absorb(absorb_flags, common, absorb_realizations, horizons);
        else if (series->parsed())
            report = cmd_series(series_flags, common);
        else if (exponent->parsed())
            report = cmd_exponent(exponent_flags, common, exponent_realizations, exponent_range);
        else
            report = cmd_sweep(common, sweep_realizations, sweep_absorber, sweep_range, sweep_presets);
        write_report(report, common, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return invalid_config;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    }
    return ok;
}

} // namespace qwalk::cli
