#include <doctest.h>

#include "qwalk/cli.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args, std::map<std::string, std::string> env = {})
{
    std::ostringstream out, err;
    const qwalk::cli::EnvLookup lookup = [env](const std::string& k) -> std::optional<std::string> {
        auto it = env.find(k);
        if (it == env.end()) return std::nullopt;
        return it->second;
    };
    const int code = qwalk::cli::run(args, out, err, lookup);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string header_line(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') return line;
    return {};
}

nlohmann::json as_json(const std::string& text)
{
    return nlohmann::json::parse(text);
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("walk one quantum step")
    {
        auto r = run({"walk", "--engine", "quantum", "--steps", "1", "--coin", "hadamard"});
        REQUIRE(r.code == 0);
        CHECK(header_line(r.out) == "t,n,p");
        auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0][1] == "-1");
        CHECK(std::stod(rows[0][2]) == doctest::Approx(0.5));
        CHECK(rows[1][1] == "1");
        CHECK(std::stod(rows[1][2]) == doctest::Approx(0.5));
    }

    TEST_CASE("walk two classical steps")
    {
        auto r = run({"walk", "--engine", "classical", "--steps", "2"});
        REQUIRE(r.code == 0);
        auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0][1] == "-2");
        CHECK(rows[0][2] == "0.25");
        CHECK(rows[1][2] == "0.5");
        CHECK(rows[2][1] == "2");
    }

    TEST_CASE("walk with absorber peaks far to the left")
    {
        auto r = run({"walk", "--engine", "quantum", "--coin", "hadamard", "--steps", "50", "--absorber", "2",
                      "--snapshot", "50"});
        REQUIRE(r.code == 0);
        int peak = 0;
        double best = -1.0;
        for (const auto& row : csv_rows(r.out)) {
            const int n = std::stoi(row[1]);
            const double p = std::stod(row[2]);
            CHECK(n < 2);
            if (p > best) best = p, peak = n;
        }
        CHECK(std::abs(peak + 32) <= 3);
    }

    TEST_CASE("walk snapshots")
    {
        auto r = run({"walk", "--steps", "5", "--snapshot", "2", "--snapshot", "5", "--format", "json"});
        REQUIRE(r.code == 0);
        auto j = as_json(r.out);
        REQUIRE(j["result"]["snapshots"].size() == 2);
        CHECK(j["result"]["snapshots"][0]["t"] == 2);
        CHECK(j["result"]["snapshots"][1]["sigma"].get<double>() > 0.0);
        CHECK(run({"walk", "--steps", "5", "--snapshot", "6"}).code == 2);
    }

    TEST_CASE("absorb clean quantum")
    {
        auto r = run({"absorb", "--engine", "quantum", "--absorber", "2", "--steps", "400"});
        REQUIRE(r.code == 0);
        CHECK(header_line(r.out) == "t,p_t,cumulative,t_a");
        auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 400);
        CHECK(std::stod(rows.back()[2]) == doctest::Approx(0.27).epsilon(0.01));
        CHECK(std::abs(std::stod(rows.back()[3]) - 2.66) < 0.02);
        CHECK(r.out.find("\n1,0,0,\n") != std::string::npos);
    }

    TEST_CASE("absorb clean classical")
    {
        auto r = run({"absorb", "--engine", "classical", "--absorber", "1", "--steps", "1000", "--format", "json"});
        REQUIRE(r.code == 0);
        auto j = as_json(r.out);
        CHECK(j["result"]["cumulative_P"].get<double>() >= 0.97);
        CHECK(j["meta"]["seed"] == 1);
        CHECK(j["meta"]["exclusions"] == 0);
        CHECK(j["meta"]["config"]["absorber"] == 1);
        CHECK(j["meta"]["tool"] == qwalk::cli::tool_version);
    }

    TEST_CASE("absorber at the origin is rejected")
    {
        auto r = run({"absorb", "--absorber", "0", "--steps", "10"});
        CHECK(r.code == 2);
        CHECK(r.err.find("absorber position must be nonzero") != std::string::npos);
        CHECK(r.out.empty());
    }

    TEST_CASE("absorb with disorder reports exclusions")
    {
        auto r = run({"absorb", "--engine", "classical", "--absorber", "3", "--steps", "20", "--disorder",
                      "poisson:lambda=1", "--realizations", "10", "--horizons", "3,20"});
        REQUIRE(r.code == 0);
        CHECK(header_line(r.out) == "n,mean_t_a,std_error,excluded");
        auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 2);
        CHECK(std::stoi(rows[0][3]) >= std::stoi(rows[1][3]));
        CHECK(r.out.find("# exclusions: ") != std::string::npos);
    }

    TEST_CASE("numerical failure exits with 3")
    {
        auto r = run({"absorb", "--engine", "classical", "--absorber", "40", "--steps", "5", "--disorder",
                      "binomial:n=2,p=0.5", "--realizations", "4"});
        CHECK(r.code == 3);
        CHECK(r.err.find("no realization absorbed") != std::string::npos);
    }

    TEST_CASE("series raabe")
    {
        auto c = as_json(run({"series", "--raabe", "classical", "--m1", "2", "--format", "json"}).out);
        CHECK(std::abs(c["result"]["extrapolated_E"].get<double>() - 0.5) <= 0.01);
        CHECK(c["result"]["verdict"] == "diverges");
        auto q = as_json(run({"series", "--raabe", "quantum", "--m1", "2", "--format", "json"}).out);
        CHECK(std::abs(q["result"]["extrapolated_E"].get<double>() - 2.0) <= 0.02);
        CHECK(q["result"]["verdict"] == "converges");
        CHECK(run({"series", "--raabe", "quantum", "--m1", "3"}).code == 2);
    }

    TEST_CASE("series table rows")
    {
        auto r = run({"series", "--m1-range", "1..10", "--T", "4096", "--tail", "power_law"});
        REQUIRE(r.code == 0);
        CHECK(header_line(r.out) == "m1,P,t_a,tail_beta");
        auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 10);
        CHECK(std::stod(rows[1][1]) == doctest::Approx(0.27).epsilon(0.02));
        CHECK(std::abs(std::stod(rows[1][2]) - 2.66) <= 0.05);
        CHECK(run({"series", "--m1-range", "3..1"}).code == 2);
        CHECK(run({"series", "--m1-range", "x"}).code == 2);
    }

    TEST_CASE("exponent fits")
    {
        auto q = as_json(run({"exponent", "--engine", "quantum", "--absorber", "2", "--t-range", "20:80", "--format",
                              "json"})
                             .out);
        CHECK(std::abs(q["result"]["alpha"].get<double>() - 0.96) <= 0.02);

        auto c = as_json(run({"exponent", "--engine", "classical", "--disorder", "poisson:lambda=1", "--t-range",
                              "20:80", "--format", "json"})
                             .out);
        CHECK(std::abs(c["result"]["alpha"].get<double>() - 0.51) <= 0.04);
        CHECK(c["meta"]["config"]["realizations"] == 200);

        auto d = as_json(run({"exponent", "--engine", "quantum", "--disorder", "poisson:lambda=1", "--realizations",
                              "200", "--format", "json"})
                             .out);
        CHECK(std::abs(d["result"]["alpha"].get<double>() - 0.70) <= 0.05);
    }

    TEST_CASE("sweep reports every preset with and without absorber")
    {
        auto r = run({"sweep", "--realizations", "20", "--presets", "tableII-binomial,tableII-geometric"});
        REQUIRE(r.code == 0);
        auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 4);
        CHECK(rows[0][0] == "tableII-binomial");
        CHECK(rows[0][4] == "yes");
        CHECK(rows[1][4] == "no");
        CHECK(r.out.find("# preset_notes: ") != std::string::npos);
        CHECK(run({"sweep", "--presets", "tableII-unknown"}).code == 2);
    }

    TEST_CASE("invalid flags exit with 2")
    {
        CHECK(run({}).code == 2);
        CHECK(run({"walk"}).code == 2);
        CHECK(run({"walk", "--steps", "3", "--coin", "grover"}).code == 2);
        CHECK(run({"walk", "--steps", "3", "--engine", "bogus"}).code == 2);
        CHECK(run({"walk", "--steps", "0"}).code == 2);
        CHECK(run({"walk", "--steps", "3", "--format", "xml"}).code == 2);
        auto d = run({"walk", "--steps", "3", "--disorder", "poisson:lambda=-1"});
        CHECK(d.code == 2);
        CHECK(d.err.find("--disorder") != std::string::npos);
        CHECK(run({"exponent", "--t-range", "20-80"}).code == 2);
        CHECK(run({"absorb", "--steps", "5"}).code == 2);
        CHECK(run({"walk", "--steps", "3"}, {{"QWALK_SEED", "abc"}}).code == 2);
    }

    TEST_CASE("help and version")
    {
        auto v = run({"--version"});
        CHECK(v.code == 0);
        CHECK(v.out.find("qwalk") != std::string::npos);
        CHECK(run({"--help"}).code == 0);
        CHECK(run({"walk", "--help"}).code == 0);
    }

    TEST_CASE("identical invocations give identical output")
    {
        const std::vector<std::string> args = {"absorb", "--engine", "quantum", "--absorber", "2", "--steps", "60",
                                               "--disorder", "tableII-negbinomial", "--realizations", "16"};
        auto a = run(args);
        auto b = run(args);
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);

        auto w1 = args, w4 = args;
        w1.insert(w1.end(), {"--workers", "1"});
        w4.insert(w4.end(), {"--workers", "4"});
        auto o1 = run(w1).out, o4 = run(w4).out;
        CHECK(csv_rows(o1) == csv_rows(o4));
    }

    TEST_CASE("seed from the environment")
    {
        const std::vector<std::string> args = {"walk", "--steps", "20", "--disorder", "poisson:lambda=1"};
        auto env = run(args, {{"QWALK_SEED", "9"}});
        auto flag = run({"walk", "--steps", "20", "--disorder", "poisson:lambda=1", "--seed", "9"});
        auto other = run(args);
        CHECK(env.out == flag.out);
        CHECK(env.out.find("# seed: 9") != std::string::npos);
        CHECK(env.out != other.out);
        auto both = run({"walk", "--steps", "20", "--disorder", "poisson:lambda=1", "--seed", "1"},
                        {{"QWALK_SEED", "9"}});
        CHECK(both.out == other.out);
    }

    TEST_CASE("metadata header")
    {
        auto r = run({"walk", "--steps", "3", "--disorder", "tableII-geometric"});
        REQUIRE(r.code == 0);
        CHECK(r.out.rfind("# tool: qwalk", 0) == 0);
        for (const char* key : {"# command: walk", "# seed: 1", "# config: {", "# exclusions: 0",
                                "# disorder: family=geometric_shifted k=0.5", "# disorder_note: "})
            CHECK(r.out.find(key) != std::string::npos);
    }

    TEST_CASE("output file")
    {
        const auto path = std::filesystem::temp_directory_path() / "qwalk_cli_test_output.csv";
        auto r = run({"walk", "--steps", "2", "--output", path.string()});
        REQUIRE(r.code == 0);
        CHECK(r.out.empty());
        CHECK(read_file(path) == run({"walk", "--steps", "2"}).out);
        std::filesystem::remove(path);
        CHECK(run({"walk", "--steps", "2", "--output", "/nonexistent-dir/x.csv"}).code == 2);
    }
}

TEST_SUITE("golden")
{
    TEST_CASE("golden outputs")
    {
        const std::filesystem::path dir = QWALK_GOLDEN_DIR;
        const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
            {"walk_quantum_t4.csv", {"walk", "--steps", "4"}},
            {"walk_classical_absorber.csv", {"walk", "--engine", "classical", "--steps", "6", "--absorber", "-2"}},
            {"walk_kempe.json", {"walk", "--steps", "3", "--coin", "kempe", "--initial", "R", "--format", "json"}},
            {"absorb_quantum_m2.csv", {"absorb", "--absorber", "2", "--steps", "14"}},
            {"absorb_poisson.csv",
             {"absorb", "--engine", "classical", "--absorber", "2", "--steps", "30", "--disorder", "poisson:lambda=1",
              "--realizations", "6", "--horizons", "10,20,30", "--seed", "7"}},
            {"series_table.csv", {"series", "--m1-range", "1..4", "--T", "512", "--tail", "none"}},
            {"series_raabe.json", {"series", "--raabe", "quantum", "--n-max", "64", "--format", "json"}},
            {"exponent_classical.json",
             {"exponent", "--engine", "classical", "--disorder", "binomial:n=2,p=0.5", "--realizations", "5",
              "--t-range", "5:20", "--format", "json"}},
        };
        for (const auto& [file, args] : cases) {
            INFO(file);
            auto r = run(args);
            REQUIRE(r.code == 0);
            const auto path = dir / file;
            if (std::getenv("QWALK_UPDATE_GOLDEN")) {
                std::ofstream(path, std::ios::binary) << r.out;
                continue;
            }
            REQUIRE(std::filesystem::exists(path));
            CHECK(r.out == read_file(path));
        }
    }
}
