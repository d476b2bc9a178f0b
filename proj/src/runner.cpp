#include "prcm/runner.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "prcm/duality.hpp"
#include "prcm/io.hpp"
#include "prcm/loop_scan.hpp"
#include "prcm/pltg.hpp"
#include "prcm/rng.hpp"
#include "prcm/sampler.hpp"
#include "prcm/verify.hpp"

namespace prcm {

namespace {

using nlohmann::json;

json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["geometry"] = c.geometry;
    j["d"] = c.d;
    j["N"] = c.N;
    j["boundary"] = c.boundary;
    j["p"] = c.p;
    j["beta"] = c.beta;
    j["q"] = c.q;
    j["q_field"] = c.q_field;
    j["i"] = c.i;
    j["sweeps"] = c.sweeps;
    j["burnin"] = c.burnin;
    j["thinning"] = c.thinning;
    j["n_chains"] = c.n_chains;
    j["seed"] = c.seed;
    j["algorithm"] = c.algorithm;
    j["p_min"] = c.p_min;
    j["p_max"] = c.p_max;
    j["p_steps"] = c.p_steps;
    j["lambda_tol"] = c.lambda_tol;
    j["lambda_max_iter"] = c.lambda_max_iter;
    j["loop_sizes"] = c.loop_sizes;
    j["v_mode"] = c.v_mode;
    j["with_wilson"] = c.with_wilson;
    j["verify_only"] = c.verify_only;
    j["inject_weight_error"] = c.inject_weight_error;
    j["alexander_configs"] = c.alexander_configs;
    j["homology_trials"] = c.homology_trials;
    j["output"] = c.output;
    j["report_out"] = c.report_out;
    return j;
}

struct Derived {
    double p = 0;
    double beta = 0;
    uint32_t q_field = 2;
};

uint32_t derive_q_field(const RunConfig& cfg) {
    if (cfg.q_field != 0) return cfg.q_field;
    if (cfg.q >= 2 && cfg.q == std::floor(cfg.q) && Fq::is_prime(static_cast<uint32_t>(cfg.q)))
        return static_cast<uint32_t>(cfg.q);
    return 2;
}

Derived derive_model(const RunConfig& cfg) {
    Derived m;
    if (cfg.p >= 0 && cfg.beta >= 0)
        throw std::invalid_argument("give exactly one of p and beta");
    if (cfg.p < 0 && cfg.beta < 0) throw std::invalid_argument("one of p or beta is required");
    if (cfg.p >= 0) {
        m.p = cfg.p;
        m.beta = cfg.p < 1 ? -std::log1p(-cfg.p) : std::numeric_limits<double>::infinity();
    } else {
        m.beta = cfg.beta;
        m.p = 1.0 - std::exp(-cfg.beta);
    }
    m.q_field = derive_q_field(cfg);
    return m;
}

Complex make_complex(const RunConfig& cfg) {
    if (cfg.geometry == "torus") {
        int max_dim = std::min(cfg.d, cfg.i + 1);
        return Complex::torus(cfg.d, cfg.N, max_dim);
    }
    if (cfg.geometry == "box") {
        BoundaryCondition bc =
            cfg.boundary == "wired" ? BoundaryCondition::Wired : BoundaryCondition::Free;
        return Complex::box(cfg.d, cfg.N, cfg.d, bc);
    }
    throw std::invalid_argument("geometry must be torus or box");
}

class OutputFile {
public:
    OutputFile(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

void write_metadata(CsvWriter& csv, const RunConfig& cfg, const Complex* X = nullptr) {
    csv.comment(std::string("version = ") + kVersion);
    csv.comment("rng = " + Rng::algorithm());
    csv.comment("config = " + to_json(cfg).dump());
    if (X) csv.comment("complex = " + X->describe());
}

void emit_plot_stub(const RunConfig& cfg) {
    if (!cfg.emit_plot_script || cfg.output.empty()) return;
    std::ofstream py(cfg.output + ".plot.py", std::ios::binary);
    py << "#!/usr/bin/env python3\n"
          "# Generic plot stub for the CSV written alongside this script.\n"
          "import csv, sys\n"
          "import matplotlib.pyplot as plt\n\n"
          "path = \"" << cfg.output << "\"\n"
          "rows = [r for r in csv.reader(l for l in open(path) if not l.startswith('#'))]\n"
          "head, data = rows[0], rows[1:]\n"
          "print('columns:', head)\n"
          "x = [float(r[0]) for r in data]\n"
          "for col in range(1, len(head)):\n"
          "    try:\n"
          "        plt.plot(x, [float(r[col]) for r in data], label=head[col])\n"
          "    except ValueError:\n"
          "        pass\n"
          "plt.xlabel(head[0]); plt.legend(); plt.savefig(path + '.png', dpi=150)\n";
}

const std::vector<std::string> kEstimateHeader = {"p",        "q",      "i",       "d",
                                                  "N",        "boundary", "event",  "estimate",
                                                  "stderr",   "n_samples", "seed"};

void estimate_rows(CsvWriter& csv, const RunConfig& cfg, const Complex& X, double p,
                   uint32_t q_field) {
    RcmParams params;
    params.p = p;
    params.q = cfg.q;
    params.q_field = q_field;
    params.i = cfg.i;
    ChainSettings settings;
    settings.n_samples = cfg.sweeps;
    settings.burnin_sweeps = cfg.burnin;
    settings.thinning = cfg.thinning;
    settings.n_chains = cfg.n_chains;
    settings.seed = cfg.seed;
    settings.algorithm = cfg.algorithm;
    for (EventKind kind : {EventKind::GiantNontrivial, EventKind::GiantSurjective}) {
        EventSpec event;
        event.kind = kind;
        Estimate est = estimate_event(X, params, event, settings);
        csv.row({format_double(p), format_double(cfg.q), format_int(cfg.i), format_int(cfg.d),
                 format_int(cfg.N), cfg.boundary,
                 kind == EventKind::GiantNontrivial ? "A" : "S", format_double(est.value),
                 format_double(est.se), format_int(static_cast<int64_t>(est.n)),
                 format_int(static_cast<int64_t>(cfg.seed))});
    }
}

int cmd_sample(const RunConfig& cfg, std::ostream& log) {
    Derived m = derive_model(cfg);
    Complex X = make_complex(cfg);
    OutputFile out(cfg.output, log);
    CsvWriter csv(out.stream());
    write_metadata(csv, cfg, &X);
    csv.row(kEstimateHeader);
    estimate_rows(csv, cfg, X, m.p, m.q_field);
    emit_plot_stub(cfg);
    return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
    uint32_t q_field = derive_q_field(cfg);
    Complex X = make_complex(cfg);
    OutputFile out(cfg.output, log);
    CsvWriter csv(out.stream());
    write_metadata(csv, cfg, &X);
    csv.row(kEstimateHeader);
    for (int s = 0; s < cfg.p_steps; ++s) {
        double p = cfg.p_steps == 1 ? cfg.p_min
                                    : cfg.p_min + (cfg.p_max - cfg.p_min) * s /
                                                      static_cast<double>(cfg.p_steps - 1);
        estimate_rows(csv, cfg, X, p, q_field);
    }
    emit_plot_stub(cfg);
    return kOk;
}

int cmd_lambda(const RunConfig& cfg, std::ostream& log) {
    Complex X = make_complex(cfg);
    if (!X.is_torus()) throw std::invalid_argument("the threshold search runs on tori");
    uint32_t q_field = derive_q_field(cfg);

    auto mu_a = [&](double p, uint64_t n_samples) {
        RcmParams params;
        params.p = p;
        params.q = cfg.q;
        params.q_field = q_field;
        params.i = cfg.i;
        ChainSettings settings;
        settings.n_samples = n_samples;
        settings.burnin_sweeps = cfg.burnin;
        settings.thinning = cfg.thinning;
        settings.n_chains = cfg.n_chains;
        settings.seed = cfg.seed;
        settings.algorithm = cfg.algorithm;
        EventSpec event;
        event.kind = EventKind::GiantNontrivial;
        return estimate_event(X, params, event, settings);
    };

    OutputFile out(cfg.output, log);
    CsvWriter csv(out.stream());
    write_metadata(csv, cfg, &X);
    csv.row({"iteration", "p", "estimate", "stderr", "n_samples"});

    double lo = 0.02, hi = 0.98;
    bool converged = false;
    int iter = 0;
    json iterations = json::array();
    while (iter < cfg.lambda_max_iter) {
        if (hi - lo <= cfg.lambda_tol) {
            converged = true;
            break;
        }
        double mid = 0.5 * (lo + hi);
        uint64_t n = cfg.sweeps;
        Estimate est;
        while (true) {
            est = mu_a(mid, n);
            if (est.value - 2 * est.se > 0.5 || est.value + 2 * est.se < 0.5 ||
                n >= 8 * cfg.sweeps)
                break;
            n *= 2;
        }
        ++iter;
        csv.row({format_int(iter), format_double(mid), format_double(est.value),
                 format_double(est.se), format_int(static_cast<int64_t>(est.n))});
        iterations.push_back({{"p", mid}, {"estimate", est.value}, {"stderr", est.se},
                              {"n_samples", est.n}});
        if (est.value + 2 * est.se < 0.5) {
            lo = mid;
        } else if (est.value - 2 * est.se > 0.5) {
            hi = mid;
        } else {
            // The chain cannot tell this point from the threshold at the
            // sample budget: narrow the bracket symmetrically around it.
            double quarter = 0.25 * (hi - lo);
            lo = mid - quarter;
            hi = mid + quarter;
        }
    }
    double lambda_hat = 0.5 * (lo + hi);
    json report;
    report["version"] = kVersion;
    report["rng"] = Rng::algorithm();
    report["config"] = to_json(cfg);
    report["lambda"] = lambda_hat;
    report["ci_lo"] = lo;
    report["ci_hi"] = hi;
    report["converged"] = converged;
    report["iterations"] = iterations;
    csv.comment("lambda = " + format_double(lambda_hat) + " ci = [" + format_double(lo) + "," +
                format_double(hi) + "] converged = " + (converged ? "true" : "false"));
    if (!cfg.report_out.empty()) {
        std::ofstream rep(cfg.report_out, std::ios::binary);
        rep << report.dump(2) << "\n";
    }
    emit_plot_stub(cfg);
    return converged ? kOk : kNonConvergence;
}

int cmd_wilson(const RunConfig& cfg, std::ostream& log) {
    Derived m = derive_model(cfg);
    LoopScanSettings settings;
    settings.seed = cfg.seed;
    settings.mode = cfg.v_mode;
    settings.burnin_sweeps = cfg.burnin;
    settings.direct_max_samples = std::max<uint64_t>(cfg.sweeps, 1000);
    settings.direct_thinning = std::max<uint64_t>(1, cfg.thinning);

    std::vector<LoopScanRow> rows = area_perimeter_scan(
        cfg.d, cfg.i, cfg.q, m.q_field, m.p, cfg.loop_sizes, cfg.with_wilson, settings);

    OutputFile out(cfg.output, log);
    CsvWriter csv(out.stream());
    write_metadata(csv, cfg);
    std::vector<std::string> header = {"beta", "p", "q", "i", "d", "N"};
    for (int j = 1; j <= cfg.i; ++j) header.push_back("n" + std::to_string(j));
    for (const char* c : {"per", "area", "re_w", "im_w", "stderr", "v_gamma_est", "v_stderr",
                          "n_samples", "seed"})
        header.push_back(c);
    csv.row(header);
    for (const LoopScanRow& r : rows) {
        std::vector<std::string> fields = {format_double(r.beta), format_double(r.p),
                                           format_double(cfg.q), format_int(cfg.i),
                                           format_int(cfg.d), format_int(r.n)};
        for (int j = 0; j < cfg.i; ++j) fields.push_back(format_int(r.n));
        double v_est = std::exp(r.v.log_mu);
        fields.push_back(format_int(static_cast<int64_t>(r.per)));
        fields.push_back(format_int(static_cast<int64_t>(r.area)));
        fields.push_back(r.wilson_present ? format_double(r.w.re) : "");
        fields.push_back(r.wilson_present ? format_double(r.w.im) : "");
        fields.push_back(r.wilson_present ? format_double(r.w.se) : "");
        fields.push_back(format_double(v_est));
        fields.push_back(format_double(v_est * r.v.se_log));
        fields.push_back(format_int(static_cast<int64_t>(r.v.n_samples)));
        fields.push_back(format_int(static_cast<int64_t>(cfg.seed)));
        csv.row(fields);
    }
    emit_plot_stub(cfg);
    return kOk;
}

int cmd_swrun(const RunConfig& cfg, std::ostream& log) {
    Derived m = derive_model(cfg);
    Complex X = make_complex(cfg);
    if (!(cfg.q >= 2 && cfg.q == std::floor(cfg.q) &&
          Fq::is_prime(static_cast<uint32_t>(cfg.q))))
        throw std::invalid_argument("the cluster chain needs a prime integer q");
    uint32_t q = static_cast<uint32_t>(cfg.q);
    Fq F(q);

    SwChain chain(X, cfg.i, m.p, q, cfg.seed, 0);
    // Coboundary-image front for cohomological triviality of the new spins.
    SparseMatFq delta(0, 0);
    bool have_delta = cfg.i >= 2;
    if (have_delta) delta = X.boundary_matrix(cfg.i - 1, F).transpose();

    OutputFile out(cfg.output, log);
    CsvWriter csv(out.stream());
    write_metadata(csv, cfg, &X);
    csv.row({"step", "beta", "p", "q", "i", "d", "N", "energy", "nonlocal_move", "seed"});
    for (uint64_t b = 0; b < cfg.burnin; ++b) chain.step();
    for (uint64_t s = 0; s < cfg.sweeps; ++s) {
        chain.step();
        const SpinCochain& f = chain.spins();
        SparseVec fv;
        for (uint32_t c = 0; c < f.values.size(); ++c)
            if (f.values[c]) fv.nz.emplace_back(c, f.values[c]);
        bool nontrivial;
        if (have_delta)
            nontrivial = !solve(F, delta, fv).has_value();
        else
            nontrivial = !fv.empty();
        csv.row({format_int(static_cast<int64_t>(s)), format_double(m.beta),
                 format_double(m.p), format_double(cfg.q), format_int(cfg.i),
                 format_int(cfg.d), format_int(cfg.N),
                 format_int(hamiltonian(X, cfg.i, f, F)),
                 nontrivial ? "1" : "0", format_int(static_cast<int64_t>(cfg.seed))});
    }
    emit_plot_stub(cfg);
    return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    VerifyOptions opt;
    opt.seed = cfg.seed;
    opt.inject_weight_error = cfg.inject_weight_error;
    opt.alexander_configs = cfg.alexander_configs;
    opt.homology_trials = cfg.homology_trials;
    if (!cfg.verify_only.empty()) {
        opt.duality = opt.partition = opt.alexander = opt.coupling = opt.sw_stationarity =
            opt.glauber_checks = opt.homology_oracle = opt.fkg = opt.wilson = false;
        std::stringstream ss(cfg.verify_only);
        std::string group;
        while (std::getline(ss, group, ',')) {
            if (group == "duality") opt.duality = true;
            else if (group == "partition") opt.partition = true;
            else if (group == "alexander") opt.alexander = true;
            else if (group == "coupling") opt.coupling = true;
            else if (group == "sw-stationarity") opt.sw_stationarity = true;
            else if (group == "glauber") opt.glauber_checks = true;
            else if (group == "homology") opt.homology_oracle = true;
            else if (group == "fkg") opt.fkg = true;
            else if (group == "wilson") opt.wilson = true;
            else throw std::invalid_argument("unknown verify group: " + group);
        }
    }
    std::vector<CheckResult> results = run_verify_suite(opt);
    json checks = json::array();
    for (const CheckResult& r : results) {
        log << (r.pass ? "PASS " : "FAIL ") << r.name << " value=" << format_double(r.value)
            << " tol=" << format_double(r.tolerance)
            << (r.detail.empty() ? "" : " (" + r.detail + ")") << "\n";
        checks.push_back({{"name", r.name},
                          {"pass", r.pass},
                          {"value", r.value},
                          {"tolerance", r.tolerance},
                          {"detail", r.detail}});
    }
    bool ok = all_passed(results);
    json report;
    report["version"] = kVersion;
    report["rng"] = Rng::algorithm();
    report["config"] = to_json(cfg);
    report["pass"] = ok;
    report["checks"] = checks;
    std::string path = !cfg.report_out.empty() ? cfg.report_out : cfg.output;
    if (!path.empty()) {
        std::ofstream rep(path, std::ios::binary);
        rep << report.dump(2) << "\n";
    }
    log << (ok ? "verification suite passed" : "verification suite FAILED") << "\n";
    return ok ? kOk : kCheckFailure;
}

} // namespace

std::string config_to_json(const RunConfig& cfg) { return to_json(cfg).dump(2); }

RunConfig config_from_json_file(const std::string& path, const RunConfig& base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    json j = json::parse(in);
    RunConfig cfg = base;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("command", cfg.command);
    get("geometry", cfg.geometry);
    get("d", cfg.d);
    get("N", cfg.N);
    get("boundary", cfg.boundary);
    get("p", cfg.p);
    get("beta", cfg.beta);
    get("q", cfg.q);
    get("q_field", cfg.q_field);
    get("i", cfg.i);
    get("sweeps", cfg.sweeps);
    get("burnin", cfg.burnin);
    get("thinning", cfg.thinning);
    get("n_chains", cfg.n_chains);
    get("seed", cfg.seed);
    get("algorithm", cfg.algorithm);
    get("p_min", cfg.p_min);
    get("p_max", cfg.p_max);
    get("p_steps", cfg.p_steps);
    get("lambda_tol", cfg.lambda_tol);
    get("lambda_max_iter", cfg.lambda_max_iter);
    get("loop_sizes", cfg.loop_sizes);
    get("v_mode", cfg.v_mode);
    get("with_wilson", cfg.with_wilson);
    get("verify_only", cfg.verify_only);
    get("inject_weight_error", cfg.inject_weight_error);
    get("alexander_configs", cfg.alexander_configs);
    get("homology_trials", cfg.homology_trials);
    get("output", cfg.output);
    get("report_out", cfg.report_out);
    return cfg;
}

int run_command(const RunConfig& cfg, std::ostream& log) {
    try {
        if (cfg.command == "sample") return cmd_sample(cfg, log);
        if (cfg.command == "sweep") return cmd_sweep(cfg, log);
        if (cfg.command == "lambda") return cmd_lambda(cfg, log);
        if (cfg.command == "wilson") return cmd_wilson(cfg, log);
        if (cfg.command == "sw-run") return cmd_swrun(cfg, log);
        if (cfg.command == "verify") return cmd_verify(cfg, log);
        log << "unknown command: " << cfg.command << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kCheckFailure;
    }
}

} // namespace prcm
