// SPDX-License-Identifier: Apache-2.0
//
// dbris <command> --config FILE [--seed N] [--out DIR]

#include "dbris/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>

int main(int argc, char** argv)
{
    CLI::App app{"Dual-band RIS design and analysis"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;

    const char* verbs[][2] = {
        {"synth-array", "synthesize an array port network and its patterns"},
        {"steer", "build steering codebooks and a pointing report"},
        {"optimize-topology", "search sub-element switch geometries for phase entropy"},
        {"psi", "sweep the isolation of one PSI circuit or a cascade of two"},
        {"subtract", "subtract an environment trace from a total trace"},
        {"independence", "check mmWave patterns against sub-6 switching"},
        {"metrics", "peak, sidelobe and beamwidth of a pattern file"},
    };
    for (const auto& v : verbs)
    {
        auto* sub = app.add_subcommand(v[0], v[1]);
        sub->add_option("--config", config, "JSON config file")->required();
        sub->add_option("--seed", seed, "overrides the config seed");
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string verb = app.get_subcommands().front()->get_name();
    try
    {
        const auto cfg = dbris::parse_json(dbris::read_text_file(config), config);
        const auto dir = std::filesystem::path(config).parent_path().string();
        const auto out = dbris::run_command(verb, cfg, dir, seed);
        dbris::write_outputs(out, out_dir);
        std::printf("%s: %s\n", verb.c_str(), out.message.c_str());
        return 0;
    }
    catch (const dbris::Error& e)
    {
        std::fprintf(stderr, "dbris %s: %s\n", verb.c_str(), e.what());
        return dbris::exit_code(e.kind());
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "dbris %s: %s\n", verb.c_str(), e.what());
        return 2;
    }
}
