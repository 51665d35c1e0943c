// SPDX-License-Identifier: Apache-2.0
#include "cli_util.hpp"
#include "dbris/error.hpp"
#include "dbris/experiments.hpp"

#include <doctest.h>

#include <random>

using namespace dbris;

namespace
{

json load(const std::string& name)
{
    return parse_json(read_text_file(cli::kData + "/configs/" + name), name);
}

CommandOutput run_cfg(const std::string& verb, const std::string& name, std::optional<std::uint64_t> seed = {})
{
    return run_command(verb, load(name), cli::kData + "/configs", seed);
}

const std::string& file(const CommandOutput& out, const std::string& name)
{
    for (const auto& [n, text] : out.files)
        if (n == name)
            return text;
    throw std::runtime_error("missing output " + name);
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string l;
    while (std::getline(ss, l))
        out.push_back(l);
    return out;
}

ErrorKind kind_of(const std::function<void()>& f)
{
    try
    {
        f();
    }
    catch (const Error& e)
    {
        return e.kind();
    }
    throw std::runtime_error("no dbris error raised");
}

} // namespace

TEST_SUITE("ris-cli")
{
    TEST_CASE("number formatting round-trips")
    {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(-1e6, 1e6);
        for (int i = 0; i < 1000; ++i)
        {
            const double v = u(rng) * std::pow(10.0, static_cast<int>(u(rng)) % 40);
            CHECK(std::strtod(fmt_double(v).c_str(), nullptr) == v);
        }
        CHECK(fmt_double(NAN) == "nan");
        CHECK(fmt_double(-INFINITY) == "-inf");
        CHECK(fmt_double(0.5) == "0.5");
    }

    TEST_CASE("pattern csv round-trips")
    {
        const auto grid = AngleGrid::uniform(-90, 90, 5, {0.0, 90.0});
        std::vector<cplx> v;
        for (std::size_t g = 0; g < grid.size(); ++g)
            v.emplace_back(std::sin(0.1 * g), std::cos(0.37 * g) * 1e-7);
        const ComplexPattern p(grid, v);
        const auto back = read_pattern_csv(write_pattern_csv(p));
        CHECK(back.grid() == grid);
        CHECK(std::equal(back.values().begin(), back.values().end(), p.values().begin()));
        CHECK(kind_of([] { read_pattern_csv("theta_deg,phi_deg,re,im\n0,0,1,x\n"); }) == ErrorKind::Parse);
    }

    TEST_CASE("json syntax errors name line and column")
    {
        try
        {
            parse_json("{\n  \"a\": 1,\n  \"b\": ]\n}", "cfg.json");
            FAIL("expected a parse error");
        }
        catch (const Error& e)
        {
            CHECK(e.kind() == ErrorKind::Parse);
            CHECK(std::string(e.what()).rfind("cfg.json:3:", 0) == 0);
        }
    }

    TEST_CASE("exit codes by failure kind")
    {
        CHECK(exit_code(ErrorKind::InvalidInput) == 2);
        CHECK(exit_code(ErrorKind::Parse) == 2);
        CHECK(exit_code(ErrorKind::NonPassive) == 2);
        CHECK(exit_code(ErrorKind::IncompatibleTraces) == 2);
        CHECK(exit_code(ErrorKind::InfeasiblePopulation) == 3);
        CHECK(exit_code(ErrorKind::SingularNetwork) == 4);
        CHECK(exit_code(ErrorKind::NullField) == 4);
    }

    TEST_CASE("config envelope")
    {
        auto cfg = load("psi_single.json");
        cfg.erase("seed");
        CHECK(kind_of([&] { run_command("psi", cfg, "", {}); }) == ErrorKind::InvalidInput);
        CHECK_NOTHROW(run_command("psi", cfg, "", 5));
        cfg["version"] = 2;
        CHECK(kind_of([&] { run_command("psi", cfg, "", 5); }) == ErrorKind::InvalidInput);
        CHECK(kind_of([&] { run_command("bogus", load("psi_single.json"), "", {}); }) == ErrorKind::InvalidInput);
    }

    TEST_CASE("synth-array outputs")
    {
        const auto big = run_cfg("synth-array", "synth_mmwave.json");
        const auto net = parse_json(file(big, "network.json"), "net");
        CHECK(net.at("ports").get<int>() == 64);
        CHECK(net.at("Z").size() == 64 * 64);
        CHECK(file(big, "patterns/port_063.csv").size() > 0);
        const auto one = run_cfg("synth-array", "synth_single.json");
        CHECK(parse_json(file(one, "network.json"), "net").at("ports").get<int>() == 1);
        CHECK(one.files.size() == 3);
        CHECK(kind_of([] { run_cfg("synth-array", "synth_nonpassive.json"); }) == ErrorKind::NonPassive);
    }

    TEST_CASE("steer report shape and empty target list")
    {
        const auto out = run_cfg("steer", "steer_mmwave.json");
        const auto rows = lines(file(out, "steering_report.csv"));
        CHECK(rows.size() == 14);
        CHECK(rows[0] == "target_theta,achieved_theta,pointing_error,sll_db,peak_rel_db");
        auto cfg = load("steer_mmwave.json");
        cfg["targets"] = json::array();
        const auto empty = run_command("steer", cfg, "", {});
        CHECK(lines(file(empty, "steering_report.csv")).size() == 1);
        cfg["targets"] = json::array({json{{"theta", 12.5}}});
        const auto off = run_command("steer", cfg, "", {});
        CHECK(lines(file(off, "steering_report.csv"))[1] == "12.5,nan,nan,nan,nan");
    }

    TEST_CASE("optimize-topology on the toy")
    {
        const auto out = run_cfg("optimize-topology", "optimize_toy.json");
        const auto ent = lines(file(out, "entropy_vs_angle.csv"));
        CHECK(ent.size() == 1 + 17); // header plus theta -40..40 step 5
        for (const auto& l : ent)
            CHECK(std::count(l.begin(), l.end(), ',') == 5);
        const auto hist = lines(file(out, "history.csv"));
        CHECK(hist.size() == 1 + 21);
        const auto s = parse_json(file(out, "summary.json"), "summary");
        CHECK(s.at("broadside_phases_deg").size() == 2);
        auto infeasible = load("optimize_toy.json");
        infeasible["switches"] = 3;
        infeasible["ga"]["init_attempts"] = 500;
        CHECK(kind_of([&] { run_command("optimize-topology", infeasible, "", {}); }) ==
              ErrorKind::InfeasiblePopulation);
    }

    TEST_CASE("psi cascade matches its golden sweep")
    {
        const auto out = run_cfg("psi", "psi_cascade.json");
        CHECK(file(out, "sweep.csv") == read_text_file(cli::kData + "/golden/psi_cascade_sweep.csv"));
    }

    TEST_CASE("subtract matches its golden trace and cancels identical inputs")
    {
        const auto out = run_cfg("subtract", "subtract_example.json");
        CHECK(file(out, "scat.csv") == read_text_file(cli::kData + "/golden/scat_example.csv"));
        const auto tot = read_trace_csv(read_text_file(cli::kData + "/traces/example_total.csv"));
        const auto env = read_trace_csv(read_text_file(cli::kData + "/traces/example_env.csv"));
        const auto scat = read_trace_csv(file(out, "scat.csv"));
        for (std::size_t i = 0; i < scat.values.size(); ++i)
            CHECK(scat.values[i] == tot.values[i] - env.values[i]);
        const auto zero = read_trace_csv(file(run_cfg("subtract", "subtract_identity.json"), "scat.csv"));
        for (const cplx& v : zero.values)
            CHECK(v == cplx(0.0));
    }

    TEST_CASE("independence decoupled and with injected coupling")
    {
        const auto a = parse_json(file(run_cfg("independence", "independence_decoupled.json"), "summary.json"), "s");
        CHECK(a.at("states").get<int>() == 8);
        CHECK(a.at("max_deviation_db").get<double>() == 0.0);
        const auto b = parse_json(file(run_cfg("independence", "independence_coupled.json"), "summary.json"), "s");
        CHECK(b.at("max_deviation_db").get<double>() > 0.0);
        auto neg = load("independence_coupled.json");
        neg["epsilon"] = -0.1;
        CHECK(kind_of([&] { run_command("independence", neg, cli::kData + "/configs", {}); }) ==
              ErrorKind::InvalidInput);
    }

    TEST_CASE("metrics of the shipped pattern")
    {
        const auto m = parse_json(file(run_cfg("metrics", "metrics_example.json"), "metrics.json"), "m");
        CHECK(m.at("peak_theta_deg").get<double>() == 20.0);
        CHECK(m.at("sidelobe_level_db").get<double>() < -8.0);
    }

    TEST_CASE("binary: exit codes and no partial outputs")
    {
        const auto out = cli::scratch("nonpassive");
        const auto r = cli::run("synth-array", cli::kData + "/configs/synth_nonpassive.json", out);
        CHECK(r.code == 2);
        CHECK(r.err.find("non-passive network") != std::string::npos);
        CHECK_FALSE(cli::fs::exists(out));

        const auto bad = cli::scratch("bad.json");
        {
            std::ofstream f(bad);
            f << "{\n  \"version\": 1,\n  \"seed\": }\n";
        }
        const auto r2 = cli::run("psi", bad.string(), cli::scratch("bad_out"));
        CHECK(r2.code == 2);
        CHECK(r2.err.find(":3:") != std::string::npos);

        auto toy = load("optimize_toy.json");
        toy["switches"] = 3;
        toy["ga"]["init_attempts"] = 500;
        const auto inf = cli::scratch("infeasible.json");
        {
            std::ofstream f(inf);
            f << toy.dump(2);
        }
        const auto out3 = cli::scratch("infeasible_out");
        CHECK(cli::run("optimize-topology", inf.string(), out3).code == 3);
        CHECK_FALSE(cli::fs::exists(out3));

        const auto ok = cli::scratch("psi_ok");
        CHECK(cli::run("psi", cli::kData + "/configs/psi_single.json", ok).code == 0);
        CHECK(cli::fs::exists(ok / "sweep.csv"));
        CHECK(cli::run("psi", cli::kData + "/configs/psi_single.json", ok, "--seed 9").code == 0);
        CHECK(cli::run("nonsense", cli::kData + "/configs/psi_single.json", ok).code == 2);
        for (const auto& p : {out, bad, inf, ok, cli::scratch("bad_out"), out3})
        {
            cli::fs::remove_all(p);
            cli::fs::remove(cli::fs::path(p.string() + ".stderr"));
        }
    }

    TEST_CASE("same config and seed give identical outputs in process")
    {
        for (const auto& [verb, cfg] : std::vector<std::pair<std::string, std::string>>{
                 {"optimize-topology", "optimize_toy.json"}, {"steer", "steer_sub6.json"}})
        {
            const auto a = run_cfg(verb, cfg);
            const auto b = run_cfg(verb, cfg);
            CHECK(a.files == b.files);
        }
    }
}
