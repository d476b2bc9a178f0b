#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace prcm {

// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kUsage = 1, kCheckFailure = 2, kNonConvergence = 3 };

// One flat configuration record covering all subcommands; a JSON config file
// carries the same field names and any field can be overridden by the
// matching command-line flag.
struct RunConfig {
    std::string command = "sample"; // sample | sweep | lambda | wilson | sw-run | verify

    // geometry
    std::string geometry = "torus"; // torus | box
    int d = 2;
    int N = 8; // torus period, or box radius
    std::string boundary = "free"; // free | wired

    // model: exactly one of p / beta is given, the other is derived
    double p = -1;
    double beta = -1;
    double q = 1.0;
    uint32_t q_field = 0; // 0 = derive (q when q is a prime integer, else 2)
    int i = 1;

    // chain
    uint64_t sweeps = 1000; // samples per chain
    uint64_t burnin = 1000;
    uint64_t thinning = 10;
    int n_chains = 1;
    uint64_t seed = 1;
    std::string algorithm = "auto";

    // sweep grid
    double p_min = 0.2;
    double p_max = 0.8;
    int p_steps = 7;

    // lambda search
    double lambda_tol = 0.01;
    int lambda_max_iter = 40;

    // wilson scan
    std::vector<int> loop_sizes = {2, 3, 4, 5};
    std::string v_mode = "auto"; // auto | direct | ti
    bool with_wilson = true;

    // verify
    std::string verify_only; // comma-separated group names, empty = all
    bool inject_weight_error = false;
    int alexander_configs = 500;
    int homology_trials = 500;

    // output
    std::string output;      // CSV path ("" = stdout)
    std::string report_out;  // JSON report path for lambda / verify
    bool emit_plot_script = false;
};

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json_file(const std::string& path, const RunConfig& base);

int run_command(const RunConfig& cfg, std::ostream& log);

} // namespace prcm
