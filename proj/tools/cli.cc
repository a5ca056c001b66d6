// Copyright 2026 The Gaussify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "gaussify/csv_io.h"
#include "gaussify/errors.h"
#include "gaussify/homodyne.h"
#include "gaussify/protocol.h"
#include "gaussify/seeding.h"
#include "gaussify/tomography.h"

namespace gaussify::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Which option groups a subcommand takes.
struct Groups {
    bool state = false;
    bool protocol = false;
    bool homodyne = false;
    bool recon = false;
    bool grid = false;
    bool predict = false;
    bool batch_in = false;
};

Groups groups_for(const std::string &command) {
    if (command == "iterate") {
        return {true, true, false, false, false, false, false};
    }
    if (command == "sweep") {
        return {true, true, false, false, true, false, false};
    }
    if (command == "predict") {
        return {true, true, false, false, true, true, false};
    }
    if (command == "sample") {
        return {true, true, true, false, false, false, false};
    }
    if (command == "reconstruct") {
        return {false, false, true, true, false, false, true};
    }
    return {true, true, true, true, false, false, false};  // sample-and-reconstruct
}

json to_json(const RunSpec &s) {
    Groups g = groups_for(s.command);
    json j;
    j["command"] = s.command;
    if (g.state) {
        j["family"] = s.family;
        j["mean"] = s.mean ? json(*s.mean) : json(nullptr);
        j["probs_file"] = s.probs_file;
        j["trunc_cap"] = s.trunc_cap;
        j["trunc_tol"] = s.trunc_tol;
    }
    if (g.protocol) {
        j["eta"] = s.eta;
        j["iters"] = s.iters;
        j["mode"] = s.mode;
        j["accept_truncation"] = s.accept_truncation;
        j["max_iters"] = s.max_iters;
        j["success_floor"] = s.success_floor;
        j["no_distance"] = s.no_distance;
    }
    if (s.command == "iterate") {
        j["snapshots"] = s.snapshots;
        j["grid_points"] = s.grid_points;
    }
    if (g.grid) {
        j["alpha2"] = s.alpha2;
        j["alpha2_min"] = s.alpha2_min;
        j["alpha2_max"] = s.alpha2_max;
        j["alpha2_step"] = s.alpha2_step;
    }
    if (g.predict) {
        j["eta_bhd"] = s.eta_bhd;
        j["measurements"] = s.measurements;
    }
    if (g.homodyne) {
        if (s.command != "reconstruct") {
            j["eta_h"] = s.eta_h;
            j["samples"] = s.samples;
        }
        j["seed"] = s.seed;
    }
    if (g.batch_in) {
        j["batch_file"] = s.batch_file;
    }
    if (g.recon) {
        j["runs"] = s.runs;
        j["bins"] = s.bins;
        j["tol"] = s.tol;
        j["n_max"] = s.n_max ? json(*s.n_max) : json(nullptr);
    }
    if (s.command == "sweep" || g.recon) {
        j["jobs"] = s.jobs;
    }
    j["out_dir"] = s.out_dir;
    return j;
}

HeaderFields provenance(const RunSpec &spec) {
    HeaderFields fields{{"tool", kToolVersion}};
    json j = to_json(spec);
    for (const auto &[key, value] : j.items()) {
        fields.emplace_back(key, value.is_string() ? value.get<std::string>() : value.dump());
    }
    return fields;
}

std::string flag_name(const std::string &key) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    return "--" + name;
}

void add_options(CLI::App &sub, RunSpec &s, const Groups &g) {
    sub.add_option("--config", "JSON file with defaults; command-line flags win");
    sub.add_flag("--dump-config", "print the resolved configuration as JSON and exit");
    sub.add_option("--out-dir", s.out_dir, "output directory");
    if (g.state) {
        sub.add_option("--family", s.family, "input state family")->check(CLI::IsMember({"poisson", "thermal", "custom"}));
        sub.add_option("--mean", s.mean, "mean photon number (|alpha|^2 for poisson)");
        sub.add_option("--probs-file", s.probs_file, "CSV of photon-number weights for --family custom");
        sub.add_option("--trunc-cap", s.trunc_cap, "largest photon number kept");
        sub.add_option("--trunc-tol", s.trunc_tol, "input tail mass dropped when truncating");
    }
    if (g.protocol) {
        sub.add_option("--eta", s.eta, "heralding detector efficiency (list for sweep/predict)");
        sub.add_option("--iters", s.iters, "number of Gaussification iterations N");
        sub.add_option("--mode", s.mode, "heralded and/or deterministic")
            ->check(CLI::IsMember({"heralded", "deterministic"}));
        sub.add_flag("--accept-truncation", s.accept_truncation, "allow trunc-cap < 2^N n_max(input)");
        sub.add_option("--max-iters", s.max_iters, "upper limit on --iters");
        sub.add_option("--success-floor", s.success_floor, "heralding probability below which a run aborts");
        sub.add_flag("--no-distance", s.no_distance, "skip the statistical distance D");
    }
    if (s.command == "iterate") {
        sub.add_flag("--snapshots", s.snapshots, "write per-iteration p_n and P(x) grids");
        sub.add_option("--grid-points", s.grid_points, "points of each P(x) grid");
    }
    if (g.grid) {
        sub.add_option("--alpha2", s.alpha2, "explicit list of input mean photon numbers");
        sub.add_option("--alpha2-min", s.alpha2_min);
        sub.add_option("--alpha2-max", s.alpha2_max);
        sub.add_option("--alpha2-step", s.alpha2_step);
    }
    if (g.predict) {
        sub.add_option("--eta-bhd", s.eta_bhd, "balanced homodyne efficiency for the eight-port factor");
        sub.add_option("--measurements", s.measurements, "numbers M of simultaneous heralding measurements");
    }
    if (g.homodyne) {
        if (s.command != "reconstruct") {
            sub.add_option("--eta-h", s.eta_h, "homodyne detection efficiency");
            sub.add_option("--samples", s.samples, "quadrature samples");
        }
        sub.add_option("--seed", s.seed, "master seed");
    }
    if (g.batch_in) {
        sub.add_option("--batch-file", s.batch_file, "quadrature batch CSV")->required();
    }
    if (g.recon) {
        sub.add_option("--runs", s.runs, "Monte Carlo runs for error bars (0 to skip)");
        sub.add_option("--bins", s.bins, "histogram bins for maximum likelihood");
        sub.add_option("--tol", s.tol, "per-sample log-likelihood gain at which EM stops");
        sub.add_option("--n-max", s.n_max, "reconstruction support");
    }
    if (s.command == "sweep" || g.recon) {
        sub.add_option("--jobs", s.jobs, "worker threads");
    }
}

std::vector<std::string> config_args(const std::string &path, const std::vector<std::string> &cli_args,
                                     const CLI::App &sub) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        throw ConfigError("malformed config file " + path + ": " + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config file must hold a JSON object");
    }
    auto given = [&cli_args](const std::string &flag) {
        return std::any_of(cli_args.begin(), cli_args.end(),
                           [&flag](const std::string &a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    std::vector<std::string> out;
    for (const auto &[key, value] : j.items()) {
        if (key == "command" || key == "config" || key == "dump_config") {
            continue;
        }
        std::string flag = flag_name(key);
        if (sub.get_option_no_throw(flag) == nullptr) {
            throw ConfigError(fmt::format("unknown config key '{}' for {}", key, sub.get_name()));
        }
        if (given(flag) || value.is_null()) {
            continue;
        }
        if (value.is_boolean()) {
            if (value.get<bool>()) {
                out.push_back(flag);
            }
            continue;
        }
        auto scalar = [](const json &v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        if (value.is_array()) {
            for (const auto &v : value) {
                out.push_back(flag);
                out.push_back(scalar(v));
            }
        } else {
            out.push_back(flag);
            out.push_back(scalar(value));
        }
    }
    return out;
}

void require(bool ok, const std::string &message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

void validate_spec(const RunSpec &s) {
    Groups g = groups_for(s.command);
    if (g.state && s.command != "sweep") {
        require(!s.family.empty(), "--family is required");
        if (s.family == "custom") {
            require(!s.probs_file.empty(), "--family custom needs --probs-file");
        } else if (s.command != "predict" || s.alpha2.empty()) {
            require(s.mean.has_value(), "--mean is required for --family " + s.family);
        }
    }
    if (s.command == "sweep") {
        require(s.family.empty() || s.family == "poisson" || s.family == "thermal",
                "sweep supports --family poisson or thermal");
    }
    if (s.mean) {
        require(std::isfinite(*s.mean) && *s.mean >= 0.0, "--mean must be finite and non-negative");
    }
    if (g.state) {
        require(s.trunc_cap >= 1, "--trunc-cap must be positive");
        require(s.trunc_tol > 0.0 && s.trunc_tol < 1.0, "--trunc-tol must lie in (0, 1)");
    }
    if (g.protocol) {
        require(!s.eta.empty(), "--eta needs at least one value");
        for (double e : s.eta) {
            require(e >= 0.0 && e <= 1.0, "--eta values must lie in [0, 1]");
        }
        require(!s.mode.empty(), "--mode needs at least one value");
        require(s.success_floor >= 0.0 && s.success_floor < 1.0, "--success-floor must lie in [0, 1)");
        require(s.iters >= 0 && s.iters <= s.max_iters,
                fmt::format("--iters must lie in [0, {}] (raise --max-iters to go further)", s.max_iters));
        if (s.command != "sweep" && s.command != "predict") {
            require(s.eta.size() == 1, "--eta takes a single value for " + s.command);
            require(s.mode.size() == 1, "--mode takes a single value for " + s.command);
        }
    }
    if (s.command == "iterate") {
        require(s.grid_points >= 2, "--grid-points must be at least 2");
    }
    if (g.grid) {
        for (double a : alpha2_grid(s)) {
            require(std::isfinite(a) && a >= 0.0, "alpha2 values must be finite and non-negative");
        }
        if (s.command == "sweep") {
            require(!alpha2_grid(s).empty(), "sweep needs --alpha2 or --alpha2-min/--alpha2-max/--alpha2-step");
        }
    }
    if (g.predict) {
        require(s.eta_bhd > 0.0 && s.eta_bhd <= 1.0, "--eta-bhd must lie in (0, 1]");
        for (int m : s.measurements) {
            require(m >= 1, "--measurements values must be at least 1");
        }
    }
    if (g.homodyne && s.command != "reconstruct") {
        require(s.eta_h > 0.0 && s.eta_h <= 1.0, "--eta-h must lie in (0, 1]");
        require(s.samples >= 1, "--samples must be at least 1");
    }
    if (g.recon) {
        require(s.runs == 0 || s.runs >= 2, "--runs must be 0 or at least 2");
        require(s.bins >= 2, "--bins must be at least 2");
        require(s.tol > 0.0, "--tol must be positive");
        require(!s.n_max || *s.n_max >= 0, "--n-max must be non-negative");
        require(s.jobs >= 1, "--jobs must be at least 1");
    }
    if (s.command == "sweep") {
        require(s.jobs >= 1, "--jobs must be at least 1");
    }
}

PhotonDistribution family_state(const std::string &family, double mean, const RunSpec &s) {
    TruncationPolicy policy{s.trunc_tol, s.trunc_cap};
    if (family == "thermal") {
        return make_thermal(mean, policy);
    }
    return make_poisson(mean, policy);
}

PhotonDistribution input_state(const RunSpec &s) {
    if (s.family == "custom") {
        std::ifstream in(s.probs_file);
        if (!in) {
            throw ConfigError("cannot open probs file " + s.probs_file);
        }
        return trim_tail(read_distribution_csv(in), {0.0, s.trunc_cap}).state;
    }
    return family_state(s.family, *s.mean, s);
}

ProtocolConfig protocol_config(const RunSpec &s, PhotonDistribution input, double eta, const std::string &mode) {
    ProtocolConfig c;
    c.input = std::move(input);
    c.detector_eta = DetectorEfficiency(eta);
    c.iterations = s.iters;
    c.mode = parse_mode(mode);
    c.truncation_cap = s.trunc_cap;
    c.accept_truncation = s.accept_truncation;
    c.max_iterations = s.max_iters;
    c.success_floor = s.success_floor;
    c.compute_distance = !s.no_distance;
    return c;
}

std::filesystem::path out_path(const RunSpec &s, const std::string &name) {
    std::filesystem::create_directories(s.out_dir);
    return std::filesystem::path(s.out_dir) / name;
}

std::ofstream open_out(const RunSpec &s, const std::string &name) {
    auto path = out_path(s, name);
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return f;
}

std::string csv_text(std::string text) {
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

int cmd_iterate(const RunSpec &s, std::ostream &out) {
    ProtocolConfig config = protocol_config(s, input_state(s), s.eta.front(), s.mode.front());
    validate(config);
    IterationTrace trace = run_protocol(config);
    HeaderFields fields = provenance(s);
    fields.emplace_back("input_n_max", std::to_string(config.input.n_max()));
    {
        auto f = open_out(s, "trace.csv");
        write_trace_csv(f, trace, fields);
    }
    if (s.snapshots) {
        for (const IterationRecord &r : trace.records) {
            HeaderFields snap = fields;
            snap.emplace_back("j", std::to_string(r.index));
            auto f = open_out(s, fmt::format("state_{}.csv", r.index));
            write_distribution_csv(f, r.state, snap);
            auto g = open_out(s, fmt::format("quadrature_{}.csv", r.index));
            write_quadrature_grid_csv(g, r.state, s.grid_points, snap);
        }
    }
    const IterationRecord &last = trace.records.back();
    out << fmt::format("iterations={} mean={:.10g} K={:.6g} p_tot={:.6g} status={}\n", last.index, last.mean,
                       last.kurtosis, last.p_tot, to_string(trace.status));
    if (trace.status == RunStatus::kCapSaturated) {
        out << trace.message << '\n';
        return kExitCapSaturated;
    }
    return kExitOk;
}

struct SweepPoint {
    double alpha2;
    std::string mode;
    double eta;
};

struct SweepResult {
    std::vector<IterationRecord> records;
    std::string status = "ok";
    bool vanishing = false;
    bool saturated = false;
};

int cmd_sweep(const RunSpec &s, std::ostream &out) {
    std::string family = s.family.empty() ? "poisson" : s.family;
    std::vector<SweepPoint> points;
    for (double a : alpha2_grid(s)) {
        for (const std::string &mode : s.mode) {
            if (mode == "deterministic") {
                points.push_back({a, mode, 0.0});
                continue;
            }
            for (double eta : s.eta) {
                points.push_back({a, mode, eta});
            }
        }
    }
    // validate everything before computing anything
    std::vector<ProtocolConfig> configs;
    for (const SweepPoint &p : points) {
        configs.push_back(protocol_config(s, family_state(family, p.alpha2, s), p.eta, p.mode));
        validate(configs.back());
    }
    std::vector<SweepResult> results(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            SweepResult &r = results[i];
            try {
                IterationTrace trace = run_protocol(configs[i]);
                r.records = std::move(trace.records);
                if (trace.status == RunStatus::kCapSaturated) {
                    r.status = "cap_saturated";
                    r.saturated = true;
                }
            } catch (const VanishingSuccessError &) {
                r.status = "vanishing_success";
                r.vanishing = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::min<int>(s.jobs, static_cast<int>(points.size())); ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }

    auto f = open_out(s, "sweep.csv");
    HeaderFields fields = provenance(s);
    fields.emplace_back("family_resolved", family);
    write_header(f, "gaussify sweep", fields);
    f << "alpha2,N,mode,eta,mean,variance,K,D,p_succ_N,p_tot_N,status\n";
    bool vanishing = false;
    bool saturated = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const SweepPoint &p = points[i];
        const SweepResult &r = results[i];
        vanishing |= r.vanishing;
        saturated |= r.saturated;
        for (int n = 0; n <= s.iters; ++n) {
            f << format_number(p.alpha2) << ',' << n << ',' << p.mode << ',' << format_number(p.eta) << ',';
            if (static_cast<std::size_t>(n) < r.records.size()) {
                const IterationRecord &rec = r.records[static_cast<std::size_t>(n)];
                f << format_number(rec.mean) << ',' << format_number(rec.variance) << ','
                  << format_number(rec.kurtosis) << ',' << format_number(rec.distance) << ','
                  << format_number(rec.p_succ) << ',' << format_number(rec.p_tot) << ",ok\n";
            } else {
                for (int c = 0; c < 6; ++c) {
                    f << format_number(kNaN) << ',';
                }
                f << r.status << '\n';
            }
        }
    }
    out << fmt::format("sweep points={} rows={}\n", points.size(), points.size() * (s.iters + 1));
    if (vanishing) {
        return kExitVanishingSuccess;
    }
    return saturated ? kExitCapSaturated : kExitOk;
}

int cmd_predict(const RunSpec &s, std::ostream &out) {
    std::vector<std::pair<double, PhotonDistribution>> inputs;
    std::vector<double> grid = alpha2_grid(s);
    if (!grid.empty()) {
        require(s.family != "custom", "--alpha2 lists need --family poisson or thermal");
        for (double a : grid) {
            inputs.emplace_back(a, family_state(s.family, a, s));
        }
    } else {
        PhotonDistribution state = input_state(s);
        double mean_in = s.family == "custom" ? photon_moments(state).mean : *s.mean;
        inputs.emplace_back(mean_in, std::move(state));
    }
    auto f = open_out(s, "predict.csv");
    write_header(f, "gaussify analytic predictions", provenance(s));
    f << "mean_in,eta,p0_prime,p1_prime,converges,nbar_inf,nbar_inf_covariance,poisson_threshold,p_succ_lower,"
         "p_succ_upper,p_succ_asymptotic,error\n";
    bool errors = false;
    for (const auto &[mean_in, state] : inputs) {
        for (double eta : s.eta) {
            DetectorEfficiency e(eta);
            std::string error;
            double p0 = kNaN;
            double p1 = kNaN;
            double nbar = kNaN;
            double nbar_cov = kNaN;
            double asymptotic = kNaN;
            bool converges = false;
            try {
                AsymptotePrediction pred = predict_asymptote(state, e);
                p0 = pred.p0;
                p1 = pred.p1;
                converges = pred.mean.has_value();
                if (converges) {
                    nbar = *pred.mean;
                    asymptotic = 1.0 / (1.0 + eta * nbar);
                }
                if (converges && eta < 1.0) {
                    nbar_cov = predict_asymptote_via_covariance(state, e);
                }
            } catch (const DomainError &ex) {
                error = ex.what();
                errors = true;
            }
            SuccessBounds bounds = success_bounds(mean_in, e);
            double threshold = eta > 0.0 ? 1.0 / eta : std::numeric_limits<double>::infinity();
            f << format_number(mean_in) << ',' << format_number(eta) << ',' << format_number(p0) << ','
              << format_number(p1) << ',' << (converges ? 1 : 0) << ',' << format_number(nbar) << ','
              << format_number(nbar_cov) << ',' << format_number(threshold) << ',' << format_number(bounds.lower)
              << ',' << format_number(bounds.upper) << ',' << format_number(asymptotic) << ',' << csv_text(error)
              << '\n';
            out << fmt::format("mean_in={:.6g} eta={:.6g} threshold={:.6g} nbar_inf={} bounds=[{:.6g}, {:.6g}]\n",
                               mean_in, eta, threshold, converges ? fmt::format("{:.10g}", nbar) : "diverges",
                               bounds.lower, bounds.upper);
        }
    }
    auto g = open_out(s, "ehd.csv");
    write_header(g, "gaussify eight-port homodyne reduction factors", provenance(s));
    g << "eta,eta_bhd,M,factor,error\n";
    for (double eta : s.eta) {
        for (int m : s.measurements) {
            double factor = kNaN;
            std::string error;
            try {
                if (eta >= s.eta_bhd) {
                    // no emulation exists; reported, not an error
                    g << format_number(eta) << ',' << format_number(s.eta_bhd) << ',' << m << ','
                      << format_number(kNaN) << ",not applicable: eta >= eta_bhd\n";
                    continue;
                }
                factor = ehd_reduction_factor(DetectorEfficiency(eta), DetectorEfficiency(s.eta_bhd), m);
                out << fmt::format("ehd eta={:.6g} eta_bhd={:.6g} M={} factor={:.6g}\n", eta, s.eta_bhd, m, factor);
            } catch (const DomainError &ex) {
                error = ex.what();
                errors = true;
            }
            g << format_number(eta) << ',' << format_number(s.eta_bhd) << ',' << m << ',' << format_number(factor)
              << ',' << csv_text(error) << '\n';
        }
    }
    return errors ? kExitConfig : kExitOk;
}

// State handed to the homodyne stage: the input, or the protocol output after --iters.
std::pair<PhotonDistribution, int> generator_state(const RunSpec &s, HeaderFields &fields) {
    PhotonDistribution state = input_state(s);
    if (s.iters == 0) {
        return {state, kExitOk};
    }
    ProtocolConfig config = protocol_config(s, std::move(state), s.eta.front(), s.mode.front());
    config.compute_distance = false;
    validate(config);
    IterationTrace trace = run_protocol(config);
    fields.emplace_back("protocol_status", to_string(trace.status));
    fields.emplace_back("protocol_p_tot", format_number(trace.p_tot()));
    int code = trace.status == RunStatus::kCapSaturated ? kExitCapSaturated : kExitOk;
    return {trace.records.back().state, code};
}

std::string source_label(const RunSpec &s) {
    std::string base = s.family == "custom" ? "custom:" + s.probs_file : fmt::format("{}({:.17g})", s.family, *s.mean);
    if (s.iters > 0) {
        base += fmt::format(" after {} {} iterations eta={:.17g}", s.iters, s.mode.front(), s.eta.front());
    }
    return base;
}

MaxLikOptions maxlik_options(const RunSpec &s) {
    MaxLikOptions opt;
    opt.n_max = s.n_max;
    opt.bins = s.bins;
    opt.tolerance = s.tol;
    return opt;
}

void write_summary(const RunSpec &s, const HeaderFields &fields, const std::vector<std::pair<std::string, double>> &rows) {
    auto f = open_out(s, "summary.csv");
    write_header(f, "gaussify reconstruction summary", fields);
    f << "quantity,value\n";
    for (const auto &[k, v] : rows) {
        f << k << ',' << format_number(v) << '\n';
    }
}

// Reconstruction, error bars and pattern-function statistics of one batch.
int analyse_batch(const RunSpec &s, const QuadratureBatch &batch, HeaderFields fields,
                  const PhotonDistribution *truth, std::ostream &out) {
    MaxLikOptions opt = maxlik_options(s);
    Reconstruction rec = reconstruct_maxlik(batch, opt);
    fields.emplace_back("reconstruction_n_max", std::to_string(rec.state.size() - 1));
    fields.emplace_back("em_iterations", std::to_string(rec.iterations));
    fields.emplace_back("em_converged", rec.converged ? "true" : "false");
    fields.emplace_back("monte_carlo_seed", std::to_string(monte_carlo_seed(s.seed)));
    fields.emplace_back("bootstrap_seed", std::to_string(bootstrap_seed(s.seed)));
    std::vector<double> std_dev;
    if (s.runs >= 2) {
        // error bars as in the experiment: the reconstruction is taken as the truth
        MaxLikOptions mc_opt = opt;
        mc_opt.n_max = static_cast<int>(rec.state.size() - 1);
        MonteCarloErrors mc = monte_carlo_errors(rec.state, batch.eta_h, batch.samples.size(), s.runs,
                                                 monte_carlo_seed(s.seed), mc_opt, s.jobs);
        std_dev = mc.std_dev;
    }
    {
        auto f = open_out(s, "reconstruction.csv");
        write_reconstruction_csv(f, rec.state, std_dev, fields);
    }
    std::vector<std::pair<std::string, double>> rows;
    rows.emplace_back("samples", static_cast<double>(batch.samples.size()));
    rows.emplace_back("log_likelihood", rec.log_likelihood.back());
    if (truth) {
        rows.emplace_back("fidelity_to_generator", bhattacharyya_fidelity(rec.state, *truth));
        rows.emplace_back("total_variation_to_generator", total_variation(rec.state, *truth));
    }
    PhotonMoments pm = photon_moments(rec.state);
    rows.emplace_back("reconstruction_mean", pm.mean);
    rows.emplace_back("reconstruction_variance", pm.variance);
    rows.emplace_back("reconstruction_kurtosis", excess_kurtosis(rec.state));
    rows.emplace_back("reconstruction_fidelity_to_thermal", fidelity_to_thermal(rec.state));
    if (batch.samples.size() >= kMinSamplesForStatistics) {
        MomentReport report = estimate_moments(batch, kDefaultBootstrapResamples, bootstrap_seed(s.seed));
        rows.emplace_back("pattern_x2", report.x_moments[1].value);
        rows.emplace_back("pattern_x2_err", report.x_moments[1].std_error);
        rows.emplace_back("pattern_mean_n", report.mean_n.value);
        rows.emplace_back("pattern_mean_n_err", report.mean_n.std_error);
        rows.emplace_back("pattern_variance_n", report.variance_n.value);
        rows.emplace_back("pattern_variance_n_err", report.variance_n.std_error);
        rows.emplace_back("pattern_kurtosis", report.kurtosis.value);
        rows.emplace_back("pattern_kurtosis_err", report.kurtosis.std_error);
        rows.emplace_back("binned_distance_to_gaussian", binned_distance_to_gaussian(batch));
    }
    write_summary(s, fields, rows);
    for (const auto &[k, v] : rows) {
        out << k << '=' << fmt::format("{:.10g}", v) << '\n';
    }
    return kExitOk;
}

int cmd_sample(const RunSpec &s, std::ostream &out) {
    HeaderFields fields = provenance(s);
    auto [state, code] = generator_state(s, fields);
    fields.emplace_back("batch_seed", std::to_string(batch_seed(s.seed)));
    QuadratureBatch batch =
        sample_homodyne(state, DetectorEfficiency(s.eta_h), s.samples, batch_seed(s.seed), source_label(s));
    auto f = open_out(s, "batch.csv");
    write_batch_csv(f, batch, fields);
    out << fmt::format("samples={} eta_h={:.6g} seed={}\n", batch.samples.size(), s.eta_h, batch.seed);
    return code;
}

int cmd_reconstruct(const RunSpec &s, std::ostream &out) {
    std::ifstream in(s.batch_file);
    if (!in) {
        throw ConfigError("cannot open batch file " + s.batch_file);
    }
    QuadratureBatch batch = read_batch_csv(in);
    HeaderFields fields = provenance(s);
    fields.emplace_back("batch_eta_h", format_number(batch.eta_h.value()));
    fields.emplace_back("batch_seed", std::to_string(batch.seed));
    fields.emplace_back("batch_source", batch.source);
    return analyse_batch(s, batch, fields, nullptr, out);
}

int cmd_sample_and_reconstruct(const RunSpec &s, std::ostream &out) {
    HeaderFields fields = provenance(s);
    auto [state, code] = generator_state(s, fields);
    fields.emplace_back("batch_seed", std::to_string(batch_seed(s.seed)));
    {
        auto f = open_out(s, "generator.csv");
        write_distribution_csv(f, state, fields);
    }
    QuadratureBatch batch =
        sample_homodyne(state, DetectorEfficiency(s.eta_h), s.samples, batch_seed(s.seed), source_label(s));
    {
        auto f = open_out(s, "batch.csv");
        write_batch_csv(f, batch, fields);
    }
    int analysed = analyse_batch(s, batch, fields, &state, out);
    return code != kExitOk ? code : analysed;
}

}  // namespace

std::uint64_t batch_seed(std::uint64_t master) {
    return derive_seed(master, 0);
}

std::uint64_t monte_carlo_seed(std::uint64_t master) {
    return derive_seed(master, 1);
}

std::uint64_t bootstrap_seed(std::uint64_t master) {
    return derive_seed(master, 2);
}

std::vector<double> alpha2_grid(const RunSpec &spec) {
    if (!spec.alpha2.empty()) {
        return spec.alpha2;
    }
    std::vector<double> grid;
    if (spec.alpha2_step > 0.0 && spec.alpha2_max >= spec.alpha2_min) {
        auto steps = static_cast<long>(std::floor((spec.alpha2_max - spec.alpha2_min) / spec.alpha2_step + 1e-9));
        for (long i = 0; i <= steps; ++i) {
            grid.push_back(spec.alpha2_min + static_cast<double>(i) * spec.alpha2_step);
        }
    }
    return grid;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    static const std::vector<std::pair<std::string, std::string>> commands{
        {"iterate", "run the Gaussification protocol and write its trace"},
        {"sweep", "sweep the input mean photon number and iteration count"},
        {"predict", "closed-form asymptotes, thresholds and success bounds"},
        {"sample", "simulate a lossy homodyne batch"},
        {"reconstruct", "maximum-likelihood reconstruction of a batch"},
        {"sample-and-reconstruct", "protocol, homodyne sampling and reconstruction end to end"},
    };
    RunSpec spec;
    CLI::App app{"Simulator of iterative Gaussification and virtual homodyne tomography", "gaussify"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    bool dump = false;
    std::string config_path;
    for (const auto &[name, help] : commands) {
        CLI::App *sub = app.add_subcommand(name, help);
        if (!args.empty() && args.front() == name) {
            spec.command = name;
            add_options(*sub, spec, groups_for(name));
            sub->get_option("--config")->each([&config_path](const std::string &v) { config_path = v; });
            sub->get_option("--dump-config")->each([&dump](const std::string &) { dump = true; });
        }
    }
    try {
        std::vector<std::string> full = args;
        for (std::size_t i = 1; i + 1 < args.size(); ++i) {
            if (args[i] == "--config") {
                config_path = args[i + 1];
            } else if (args[i].rfind("--config=", 0) == 0) {
                config_path = args[i].substr(9);
            }
        }
        if (args.size() > 1 && args.back() == "--config") {
            throw ConfigError("--config needs a file name");
        }
        if (!config_path.empty() && !spec.command.empty()) {
            auto extra = config_args(config_path, args, *app.get_subcommand(spec.command));
            full.insert(full.begin() + 1, extra.begin(), extra.end());
        }
        std::reverse(full.begin(), full.end());
        app.parse(full);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        validate_spec(spec);
        if (dump) {
            out << to_json(spec).dump(2) << '\n';
            return kExitOk;
        }
        if (spec.command == "iterate") {
            return cmd_iterate(spec, out);
        }
        if (spec.command == "sweep") {
            return cmd_sweep(spec, out);
        }
        if (spec.command == "predict") {
            return cmd_predict(spec, out);
        }
        if (spec.command == "sample") {
            return cmd_sample(spec, out);
        }
        if (spec.command == "reconstruct") {
            return cmd_reconstruct(spec, out);
        }
        return cmd_sample_and_reconstruct(spec, out);
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError &e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const VanishingSuccessError &e) {
        err << "vanishing success: " << e.what() << '\n';
        return kExitVanishingSuccess;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace gaussify::cli
