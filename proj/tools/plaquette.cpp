// Command-line front end for the plaquette random-cluster / lattice gauge
// toolkit: sampling, threshold sweeps, Wilson scans and the exact-identity
// verification suite.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "prcm/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"plaquette random-cluster model and Potts lattice gauge theory"};
    app.require_subcommand(1);

    prcm::RunConfig cfg;
    std::string config_file;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "JSON config file; flags override its fields");
        sub->add_option("--geometry", cfg.geometry, "torus | box");
        sub->add_option("-d,--d", cfg.d, "ambient dimension");
        sub->add_option("-N,--N", cfg.N, "torus period or box radius");
        sub->add_option("--boundary", cfg.boundary, "free | wired (boxes)");
        sub->add_option("-p,--p", cfg.p, "open probability");
        sub->add_option("--beta", cfg.beta, "inverse temperature (alternative to p)");
        sub->add_option("-q,--q", cfg.q, "cluster weight");
        sub->add_option("--q-field", cfg.q_field, "prime coefficient field (default: derived)");
        sub->add_option("-i,--i", cfg.i, "plaquette dimension");
        sub->add_option("--sweeps", cfg.sweeps, "samples per chain");
        sub->add_option("--burnin", cfg.burnin, "burn-in sweeps");
        sub->add_option("--thinning", cfg.thinning, "sweeps between samples");
        sub->add_option("--n-chains", cfg.n_chains, "independent chains");
        sub->add_option("--seed", cfg.seed, "run seed");
        sub->add_option("--algorithm", cfg.algorithm, "auto | bernoulli | glauber | sw");
        sub->add_option("-o,--output", cfg.output, "CSV output path (default stdout)");
        sub->add_option("--report-out", cfg.report_out, "JSON report path");
        sub->add_flag("--emit-plot-script", cfg.emit_plot_script,
                      "write a plotting stub next to the CSV");
    };

    CLI::App* sample = app.add_subcommand("sample", "estimate the percolation events at one p");
    add_common(sample);

    CLI::App* sweep = app.add_subcommand("sweep", "estimate the events over a grid of p");
    add_common(sweep);
    sweep->add_option("--p-min", cfg.p_min, "grid start");
    sweep->add_option("--p-max", cfg.p_max, "grid end");
    sweep->add_option("--p-steps", cfg.p_steps, "grid points");

    CLI::App* lambda = app.add_subcommand("lambda", "bisect for the p with mu(A) = 1/2");
    add_common(lambda);
    lambda->add_option("--lambda-tol", cfg.lambda_tol, "bracket width tolerance");
    lambda->add_option("--lambda-max-iter", cfg.lambda_max_iter, "iteration cap");

    CLI::App* wilson = app.add_subcommand("wilson", "loop scan over sizes at fixed parameters");
    add_common(wilson);
    wilson->add_option("--loop-sizes", cfg.loop_sizes, "square loop sizes");
    wilson->add_option("--v-mode", cfg.v_mode, "auto | direct | ti");
    wilson->add_flag("--wilson-side,!--no-wilson-side", cfg.with_wilson,
                     "estimate the Wilson variable with the spin chain too (default on)");

    CLI::App* swrun = app.add_subcommand("sw-run", "run the cluster spin chain and log moves");
    add_common(swrun);

    CLI::App* verify = app.add_subcommand("verify", "exact identity suite");
    add_common(verify);
    verify->add_option("--only", cfg.verify_only,
                       "comma list: duality,partition,alexander,coupling,sw-stationarity,"
                       "glauber,homology,fkg,wilson");
    // Named group flags; combining them selects exactly those groups.
    for (const char* group : {"duality", "partition", "alexander", "coupling",
                              "sw-stationarity", "glauber", "homology", "fkg", "wilson"}) {
        std::string g = group;
        verify->add_flag_callback("--" + g, [&cfg, g]() {
            cfg.verify_only += (cfg.verify_only.empty() ? "" : ",") + g;
        });
    }
    verify->add_flag("--inject-weight-error", cfg.inject_weight_error,
                     "negative control: corrupt the weight and expect failures");
    verify->add_option("--alexander-configs", cfg.alexander_configs,
                       "random configurations per instance");
    verify->add_option("--homology-trials", cfg.homology_trials,
                       "random complexes for the rank oracle check");

    // Sweep/lambda/sample share p defaults: p unset means beta must be given;
    // verify needs neither.
    cfg.p = -1;
    cfg.beta = -1;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? prcm::kOk : prcm::kUsage;
    }

    cfg.command = app.get_subcommands().front()->get_name();

    if (!config_file.empty()) {
        // Config file first, then flags given on the command line win.
        prcm::RunConfig from_file = prcm::config_from_json_file(config_file, cfg);
        CLI::App* sub = app.get_subcommands().front();
        // Re-apply: any flag the user passed explicitly keeps its value.
        // (cfg already holds parsed values; only unset fields fall back.)
        // Simplest rule: fields present in the file override defaults but not
        // explicit flags, which CLI11 already wrote into cfg. Detect explicit
        // flags by count().
        prcm::RunConfig merged = from_file;
        auto keep = [&](const std::string& flag, auto member) {
            if (sub->count(flag)) merged.*member = cfg.*member;
        };
        keep("--geometry", &prcm::RunConfig::geometry);
        keep("--d", &prcm::RunConfig::d);
        keep("--N", &prcm::RunConfig::N);
        keep("--boundary", &prcm::RunConfig::boundary);
        keep("--p", &prcm::RunConfig::p);
        keep("--beta", &prcm::RunConfig::beta);
        keep("--q", &prcm::RunConfig::q);
        keep("--q-field", &prcm::RunConfig::q_field);
        keep("--i", &prcm::RunConfig::i);
        keep("--sweeps", &prcm::RunConfig::sweeps);
        keep("--burnin", &prcm::RunConfig::burnin);
        keep("--thinning", &prcm::RunConfig::thinning);
        keep("--n-chains", &prcm::RunConfig::n_chains);
        keep("--seed", &prcm::RunConfig::seed);
        keep("--algorithm", &prcm::RunConfig::algorithm);
        keep("--output", &prcm::RunConfig::output);
        keep("--report-out", &prcm::RunConfig::report_out);
        merged.command = cfg.command;
        cfg = merged;
    }

    return prcm::run_command(cfg, std::cout);
}
