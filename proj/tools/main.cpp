// harmap — prescribed-singularity harmonic map solver and geometry toolkit.
//
//   harmap solve <config.json> [--out DIR] [--workers N]
//   harmap verify [--lemma ID]... [--seed N] [--samples N]
//   harmap geo <dist|busemann|geodesic> [--family R|C|H] [--ell L] <numbers...>
//
// Exit codes: 0 success, 1 configuration/usage error, 2 not converged or
// failed checks, 3 numerical failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harmap/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"harmonic maps with prescribed singularities: solver, certification, geometry"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_override;
    int workers = 1;
    app.add_option("--out", out_override, "output directory (overrides the config)");
    app.add_option("--workers", workers, "worker threads for energy/gradient sweeps")
        ->check(CLI::PositiveNumber);

    auto* solve = app.add_subcommand("solve", "solve the problem described by a JSON config");
    std::string config_path;
    solve->add_option("config", config_path, "path to the JSON configuration")->required();

    auto* verify = app.add_subcommand("verify", "run the numerical certification suite");
    std::vector<std::string> lemma_ids;
    std::uint64_t seed = 1;
    long samples = 1000;
    verify->add_option("--lemma", lemma_ids, "check id to run (repeatable; default: all)")
        ->take_all();
    verify->add_option("--seed", seed, "base random seed");
    verify->add_option("--samples", samples, "sample count per check and family");

    auto* geo = app.add_subcommand("geo", "evaluate distances, Busemann functions, geodesics");
    std::string query;
    std::string family = "R";
    long ell = 2;
    std::vector<std::string> coords;
    geo->add_option("query", query, "dist | busemann | geodesic")->required();
    geo->add_option("--family", family, "R | C | H (default R)");
    geo->add_option("--ell", ell, "rank parameter (default 2)");
    geo->add_option("coords", coords, "horospherical coordinates: u then v-components per point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11's own exit codes do not match the documented contract; any
        // command-line problem is a usage error.  --help stays successful.
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (solve->parsed())
        return harmap::cmd_solve(config_path, out_override, workers, std::cout, std::cerr);
    if (verify->parsed())
        return harmap::cmd_verify(lemma_ids, seed, samples, std::cout, std::cerr);
    return harmap::cmd_geo(query, family, ell, coords, std::cout, std::cerr);
}
