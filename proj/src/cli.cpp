#include "rydpol/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "rydpol/collective.hpp"
#include "rydpol/config.hpp"
#include "rydpol/fitting.hpp"
#include "rydpol/interactions.hpp"
#include "rydpol/photon_stats.hpp"
#include "rydpol/protocol.hpp"
#include "rydpol/random.hpp"
#include "rydpol/structure.hpp"
#include "rydpol/units.hpp"

namespace rydpol {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string file_checksum(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a_hex(buf.str());
}

namespace {

struct Common {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    unsigned threads = 0;
};

// Collects artifacts of one run and writes the manifest last.
class Run {
public:
    Run(std::string subcommand, const Common& common, const ExperimentConfig& config,
        std::vector<std::string> args)
        : subcommand_(std::move(subcommand)), common_(common), config_(config), args_(std::move(args)) {
        fs::create_directories(common_.output_dir);
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path path = fs::path(common_.output_dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << content;
        checksums_[name] = fnv1a_hex(content);
    }

    void finish() {
        json m;
        m["subcommand"] = subcommand_;
        m["arguments"] = args_;
        m["config"] = to_json(config_);
        m["seed"] = common_.seed;
        m["version"] = std::string(kVersion);
        m["outputs"] = checksums_;
        const fs::path path = fs::path(common_.output_dir) / (subcommand_ + ".manifest.json");
        std::ofstream out(path, std::ios::binary);
        out << m.dump(2) << '\n';
    }

private:
    std::string subcommand_;
    Common common_;
    ExperimentConfig config_;
    std::vector<std::string> args_;
    std::map<std::string, std::string> checksums_;
};

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
        os << '\n';
    }
    return os.str();
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "JSON config file (fallback: $RYDPOL_CONFIG)");
    sub->add_option("--seed", c.seed, "Master seed for stochastic stages");
    sub->add_option("--output-dir", c.output_dir, "Directory for artifacts and the manifest");
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

InteractionOptions parse_interactions(const std::string& form, const std::string& graph) {
    InteractionOptions o;
    if (form == "rwa") o.form = ExchangeForm::rotating_wave;
    else if (form == "full") o.form = ExchangeForm::full_dipole;
    else throw CLI::ValidationError("--form", "expected rwa or full");
    if (graph == "all") o.graph = CouplingGraph::all_pairs;
    else if (graph == "nn") o.graph = CouplingGraph::nearest_neighbor;
    else throw CLI::ValidationError("--graph", "expected all or nn");
    return o;
}

FitData read_xy_sigma(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    FitData d;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x, y, s;
        if (!(row >> x >> y >> s)) {
            if (lineno == 1) continue;  // header
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected x, y, sigma");
        }
        d.x.push_back(x);
        d.y.push_back(y);
        d.sigma.push_back(s);
    }
    return d;
}

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t index) {
    Philox4x32 g(seed, index);
    return g();
}

json fit_to_json(const FitResult& r, ModelId id) {
    json j;
    j["model"] = std::string(to_string(id));
    j["status"] = std::string(to_string(r.status));
    j["iterations"] = r.iterations;
    j["chi2"] = r.chi2;
    j["reduced_chi2"] = r.reduced_chi2;
    j["gradient_norm"] = r.gradient_norm;
    json params = json::object();
    for (std::size_t i = 0; i < r.names.size(); ++i)
        params[r.names[i]] = {{"value", r.parameters[i]}, {"error", r.errors[i]}};
    j["parameters"] = params;
    return j;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rydberg polariton simulation and analysis toolkit", "rydpol"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(kVersion));
    Common common;

    // radius
    auto* radius = app.add_subcommand("radius", "Blockade radii and characteristic interaction");
    add_common(radius, common);
    std::optional<double> r_c6, r_eit, r_c3, r_omega;
    radius->add_option("--c6", r_c6, "C6 in GHz um^6 (magnitude used)");
    radius->add_option("--eit-width", r_eit, "EIT linewidth in MHz");
    radius->add_option("--c3", r_c3, "C3 in GHz um^3 (magnitude used)");
    radius->add_option("--omega-mu", r_omega, "Microwave Rabi frequency in MHz");

    // structure
    auto* structure = app.add_subcommand("structure", "Quantum-defect energies and radial matrix elements");
    add_common(structure, common);
    int s_na = 60, s_la = 0, s_nb = 59, s_lb = 1;
    double s_ja = 0.5, s_jb = 1.5, s_angular = std::sqrt(2.0 / 9.0);
    std::string s_model = "rb87";
    structure->add_option("--n-a", s_na, "Principal quantum number of the lower state");
    structure->add_option("--l-a", s_la);
    structure->add_option("--j-a", s_ja);
    structure->add_option("--n-b", s_nb, "Principal quantum number of the upper state");
    structure->add_option("--l-b", s_lb);
    structure->add_option("--j-b", s_jb);
    structure->add_option("--angular", s_angular, "Angular factor in [0, 1]");
    structure->add_option("--model", s_model, "rb87 or hydrogen")->check(CLI::IsMember({"rb87", "hydrogen"}));

    // rabi-curve
    auto* rabi_curve = app.add_subcommand("rabi-curve", "Collective retrieval probability versus rotation angle");
    add_common(rabi_curve, common);
    int rc_n = 1, rc_steps = 500;
    double rc_theta_max = 4.0 * constants::kPi;
    rabi_curve->add_option("--n-polaritons", rc_n)->check(CLI::Range(0, 64));
    rabi_curve->add_option("--theta-max", rc_theta_max, "Largest angle in rad");
    rabi_curve->add_option("--steps", rc_steps)->check(CLI::Range(1, 10000000));

    // eigenscan
    auto* eigenscan = app.add_subcommand("eigenscan", "Two-polariton spectrum versus separation");
    add_common(eigenscan, common);
    double es_omega = 20.0, es_rmin = 4.0, es_rmax = 14.0;
    int es_steps = 200;
    std::string es_form = "rwa", es_graph = "all";
    eigenscan->add_option("--omega-mu", es_omega, "Microwave Rabi frequency in MHz");
    eigenscan->add_option("--r-min", es_rmin);
    eigenscan->add_option("--r-max", es_rmax);
    eigenscan->add_option("--steps", es_steps)->check(CLI::Range(2, 100000));
    eigenscan->add_option("--form", es_form, "rwa or full");
    eigenscan->add_option("--graph", es_graph, "all or nn");

    // rabi-scan
    auto* rabi_scan = app.add_subcommand("rabi-scan", "Monte Carlo retrieval versus microwave Rabi frequency");
    add_common(rabi_scan, common);
    double rs_min = 1.0, rs_max = 80.0, rs_pulse_ns = 300.0;
    int rs_points = 40;
    std::uint64_t rs_trials = 3334;
    std::string rs_form = "rwa", rs_graph = "all";
    rabi_scan->add_option("--omega-min", rs_min);
    rabi_scan->add_option("--omega-max", rs_max);
    rabi_scan->add_option("--points", rs_points)->check(CLI::Range(1, 100000));
    rabi_scan->add_option("--pulse-ns", rs_pulse_ns);
    rabi_scan->add_option("--trials", rs_trials, "Experiments per point");
    rabi_scan->add_option("--form", rs_form, "rwa or full");
    rabi_scan->add_option("--graph", rs_graph, "all or nn");

    // g2
    auto* g2 = app.add_subcommand("g2", "Simulated HBT correlation of the retrieved light");
    add_common(g2, common);
    std::uint64_t g_trials = 100000;
    std::string g_source = "protocol", g_shape = "sinusoidal";
    int g_emitters = 3, g_max_lag = 50;
    double g_eff = 0.5, g_mean = 0.5, g_drift = 0.0, g_period = 3334.0;
    std::optional<double> g_background, g_rho;
    g2->add_option("--trials", g_trials);
    g2->add_option("--source", g_source, "protocol, emitters, poisson or single")
        ->check(CLI::IsMember({"protocol", "emitters", "poisson", "single"}));
    g2->add_option("--n-emitters", g_emitters)->check(CLI::Range(1, 1000));
    g2->add_option("--emitter-efficiency", g_eff)->check(CLI::Range(0.0, 1.0));
    g2->add_option("--mean-photons", g_mean, "Mean photons per pulse for the Poisson source");
    g2->add_option("--background-rate", g_background, "Counts per us in the window (default: config)");
    g2->add_option("--drift-std", g_drift, "Relative std of the efficiency drift");
    g2->add_option("--drift-shape", g_shape)->check(CLI::IsMember({"sinusoidal", "linear"}));
    g2->add_option("--drift-period", g_period, "Drift period in trials");
    g2->add_option("--max-lag", g_max_lag)->check(CLI::Range(50, 100000));
    g2->add_option("--signal-fraction", g_rho, "Also report the background-corrected g2(0)");

    // fit
    auto* fitcmd = app.add_subcommand("fit", "Levenberg-Marquardt fit of x, y, sigma data");
    add_common(fitcmd, common);
    std::string f_model = "rabi_collective", f_input;
    double f_pulse_ns = 300.0;
    std::optional<double> f_fix_b;
    fitcmd->add_option("--model", f_model)->check(CLI::IsMember({"lorentzian", "rabi_collective"}));
    fitcmd->add_option("--input", f_input, "CSV with columns x, y, sigma")->required();
    fitcmd->add_option("--pulse-ns", f_pulse_ns, "Microwave pulse duration (rabi_collective)");
    fitcmd->add_option("--fix-background", f_fix_b, "Hold B at this value instead of fitting it");

    // protocol
    auto* protocol = app.add_subcommand("protocol", "Store / rotate / retrieve Monte Carlo summary");
    add_common(protocol, common);
    double p_omega = 0.0, p_pulse_ns = 0.0;
    std::uint64_t p_trials = 10000;
    bool p_per_trial = false;
    std::string p_form = "rwa", p_graph = "all";
    protocol->add_option("--omega-mu", p_omega);
    protocol->add_option("--pulse-ns", p_pulse_ns);
    protocol->add_option("--trials", p_trials);
    protocol->add_option("--form", p_form, "rwa or full");
    protocol->add_option("--graph", p_graph, "all or nn");
    protocol->add_flag("--per-trial", p_per_trial, "Also write one CSV row per trial");

    if (args.empty()) {
        err << app.help();
        return kExitUsage;
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        ExperimentConfig config = resolve_config(common.config_path);
        for (const auto& w : config_warnings(config)) err << "warning: " << w << '\n';
        Run run(name, common, config, args);
        json result;

        if (name == "radius") {
            const double c6 = r_c6.value_or(config.pair.c6);
            const double eit = r_eit.value_or(config.eit_width);
            const double c3 = r_c3.value_or(config.pair.c3);
            const double r_o = optical_blockade_radius(c6, eit);
            result["r_o_um"] = r_o;
            result["v_dd_at_r_o_mhz"] = dipole_interaction(c3, r_o);
            result["motional_dephasing_us"] = motional_dephasing_time(config);
            if (r_omega) result["r_mu_um"] = microwave_blockade_radius(c3, *r_omega);
            run.write("radius.json", result.dump(2) + "\n");
        } else if (name == "structure") {
            const QuantumDefectModel model =
                s_model == "rb87" ? QuantumDefectModel::rubidium87() : QuantumDefectModel::hydrogenic();
            const RadialWavefunction a = numerov_wavefunction(model, s_na, s_la, s_ja);
            const RadialWavefunction b = numerov_wavefunction(model, s_nb, s_lb, s_jb);
            const double radial = radial_matrix_element(a, b);
            result["energy_ghz"] = binding_energy(model, s_na, s_la, s_ja);
            result["energy_b_ghz"] = binding_energy(model, s_nb, s_lb, s_jb);
            result["transition_ghz"] = transition_frequency(model, s_na, s_la, s_ja, s_nb, s_lb, s_jb);
            result["radial_element_ea0"] = radial;
            result["dipole_ea0"] = transition_dipole(std::abs(radial), s_angular);
            run.write("structure.json", result.dump(2) + "\n");
        } else if (name == "rabi-curve") {
            std::vector<std::vector<double>> rows;
            double min_p = 2.0, theta_at_min = 0.0;
            for (int i = 0; i <= rc_steps; ++i) {
                const double theta = rc_theta_max * i / rc_steps;
                const double p = retrieval_probability(rc_n, theta);
                rows.push_back({theta, p});
                if (p < min_p) {
                    min_p = p;
                    theta_at_min = theta;
                }
            }
            run.write("rabi_curve.csv", csv({"theta_rad", "probability"}, rows));
            result = {{"points", rows.size()}, {"min_probability", min_p}, {"theta_at_min_rad", theta_at_min}};
        } else if (name == "eigenscan") {
            const InteractionOptions opts = parse_interactions(es_form, es_graph);
            const EigenScan scan = pair_eigenscan(es_omega, config.pair.c3, es_rmin, es_rmax, es_steps, opts);
            std::vector<std::string> header{"r_um"};
            for (int k = 0; k < 16; ++k) header.push_back("eig_" + std::to_string(k) + "_mhz");
            std::vector<std::vector<double>> sorted_rows, branch_rows;
            for (std::size_t i = 0; i < scan.separations.size(); ++i) {
                std::vector<double> row{scan.separations[i]};
                row.insert(row.end(), scan.sorted[i].begin(), scan.sorted[i].end());
                sorted_rows.push_back(row);
                std::vector<double> brow{scan.separations[i]};
                for (Eigen::Index k = 0; k < scan.branches.cols(); ++k)
                    brow.push_back(scan.branches(static_cast<Eigen::Index>(i), k));
                branch_rows.push_back(brow);
            }
            run.write("eigenscan.csv", csv(header, sorted_rows));
            header.assign(1, "r_um");
            for (int k = 0; k < 16; ++k) header.push_back("branch_" + std::to_string(k) + "_mhz");
            run.write("eigenscan_branches.csv", csv(header, branch_rows));
            const double r_o = optical_blockade_radius(config.pair.c6, config.eit_width);
            const auto crossings = find_branch_crossings(scan, 1e-6 * std::max(1.0, es_omega), r_o);
            result["r_o_um"] = r_o;
            result["r_mu_um"] = microwave_blockade_radius(config.pair.c3, es_omega);
            result["crossings_beyond_r_o"] = crossings.size();
        } else if (name == "rabi-scan") {
            const double pulse = rs_pulse_ns * 1e-3;
            ShotOptions opts;
            opts.interactions = parse_interactions(rs_form, rs_graph);
            std::vector<std::vector<double>> rows;
            for (int i = 0; i < rs_points; ++i) {
                const double omega = rs_points == 1 ? rs_min : rs_min + (rs_max - rs_min) * i / (rs_points - 1.0);
                const auto shots = run_shots(config, config.pair, omega, pulse,
                                             point_seed(common.seed, static_cast<std::uint64_t>(i)), rs_trials,
                                             common.threads, opts);
                const MeanEstimate m = mean_retrieved(shots);
                rows.push_back({omega, m.mean, m.error});
            }
            run.write("rabi_scan.csv", csv({"omega_mu_mhz", "retrieved_mean", "retrieved_err"}, rows));
            result = {{"points", rows.size()}, {"trials_per_point", rs_trials}, {"pulse_us", pulse}};
        } else if (name == "g2") {
            if (g_background) config.background_rate = *g_background;
            validate(config);
            std::vector<int> counts(g_trials, 0);
            if (g_source == "protocol") {
                const auto shots = run_shots(config, config.pair, 0.0, 0.0, common.seed, g_trials, common.threads);
                for (std::size_t i = 0; i < shots.size(); ++i) counts[i] = shots[i].detected_signal;
            } else {
                for (std::uint64_t p = 0; p < g_trials; ++p) {
                    Sampler rng(common.seed, trial_stream(p, StreamPurpose::synthetic));
                    if (g_source == "emitters") counts[p] = rng.binomial(g_emitters, g_eff);
                    else if (g_source == "poisson") counts[p] = rng.poisson(g_mean);
                    else counts[p] = 1;
                }
            }
            ClickRecord clicks = generate_click_stream(config, counts, common.seed);
            if (g_drift > 0.0) {
                DriftSpec spec;
                spec.shape = g_shape == "linear" ? DriftShape::linear : DriftShape::sinusoidal;
                spec.amplitude = drift_amplitude_for(spec.shape, g_drift);
                spec.period_trials = g_period;
                spec.seed = common.seed;
                clicks = efficiency_drift_model(clicks, spec);
            }
            G2Options gopts;
            gopts.max_lag = g_max_lag;
            const G2Result g = hbt_g2(clicks, gopts, common.threads);
            std::vector<std::vector<double>> rows;
            json bins = json::array();
            for (std::size_t i = 0; i < g.lags.size(); ++i) {
                rows.push_back({static_cast<double>(g.lags[i]), g.tau_bins[i], g.g2[i], g.error[i]});
                bins.push_back({{"k", g.lags[i]}, {"tau_us", g.tau_bins[i]}, {"g2", g.g2[i]}, {"err", g.error[i]}});
            }
            result["g2_zero"] = g.g2_zero;
            result["g2_zero_err"] = g.g2_zero_err;
            result["side_peak_level"] = g.side_peak_level;
            result["side_peak_err"] = g.side_peak_err;
            result["clicks"] = clicks.events.size();
            if (g_rho) result["g2_zero_corrected"] = background_correct_g2(g.g2_zero, *g_rho);
            result["bins"] = bins;
            run.write("g2.csv", csv({"k", "tau_us", "g2", "err"}, rows));
            run.write("g2.json", result.dump(2) + "\n");
            result.erase("bins");
        } else if (name == "fit") {
            const ModelId id = parse_model_id(f_model);
            const FitData data = read_xy_sigma(f_input);
            const double pulse = f_pulse_ns * 1e-3;
            ModelSpec spec = initial_guess(id, data, pulse);
            if (f_fix_b) {
                if (id != ModelId::rabi_collective)
                    throw CLI::ValidationError("--fix-background", "only applies to rabi_collective");
                const std::size_t b = spec.index_of("background");
                spec.initial[b] = *f_fix_b;
                spec.fixed[b] = true;
            }
            const FitResult r = fit(spec, data);
            result = fit_to_json(r, id);
            run.write("fit.json", result.dump(2) + "\n");
        } else if (name == "protocol") {
            ShotOptions opts;
            opts.interactions = parse_interactions(p_form, p_graph);
            const auto shots =
                run_shots(config, config.pair, p_omega, p_pulse_ns * 1e-3, common.seed, p_trials, common.threads, opts);
            std::vector<std::uint64_t> histogram;
            double n_sum = 0.0;
            for (const auto& s : shots) {
                const auto k = static_cast<std::size_t>(s.n_polaritons);
                if (histogram.size() <= k) histogram.resize(k + 1, 0);
                ++histogram[k];
                n_sum += s.n_polaritons;
            }
            const json hist = histogram;
            const MeanEstimate ret = mean_retrieved(shots);
            const MeanEstimate det = mean_detected(shots);
            result["trials"] = p_trials;
            result["r_o_um"] = optical_blockade_radius(config.pair.c6, config.eit_width);
            result["mean_polaritons"] = shots.empty() ? 0.0 : n_sum / static_cast<double>(shots.size());
            result["polariton_histogram"] = hist;
            result["retrieved_mean"] = ret.mean;
            result["retrieved_err"] = ret.error;
            result["detected_mean"] = det.mean;
            result["detected_err"] = det.error;
            run.write("protocol.json", result.dump(2) + "\n");
            if (p_per_trial) {
                std::vector<std::vector<double>> rows;
                for (std::size_t i = 0; i < shots.size(); ++i)
                    rows.push_back({static_cast<double>(i), static_cast<double>(shots[i].n_polaritons),
                                    shots[i].retrieval_overlap, static_cast<double>(shots[i].retrieved),
                                    static_cast<double>(shots[i].detected())});
                run.write("protocol_trials.csv",
                          csv({"trial", "n_polaritons", "overlap", "retrieved", "detected"}, rows));
            }
        }
        run.finish();
        out << result.dump(2) << '\n';
        return kExitOk;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n\n" << sub->help();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    }
}

}  // namespace rydpol
