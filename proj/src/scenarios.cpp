#include "stirap/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "stirap/darkstate.hpp"
#include "stirap/errors.hpp"
#include "stirap/measure.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stirap {

namespace {

double ov_num(const Json& ov, const std::string& key, double fallback) {
    if (ov.contains(key))
        return ov.at(key).get<double>();
    return fallback;
}

int ov_int(const Json& ov, const std::string& key, int fallback) {
    if (ov.contains(key))
        return ov.at(key).get<int>();
    return fallback;
}

void apply_common_overrides(SystemSpec& spec, const Json& ov) {
    if (ov.contains("G")) {
        const double g = ov.at("G").get<double>();
        for (auto& c : spec.couplings)
            if (c.pulse.shape == PulseShape::Gaussian)
                c.pulse.amplitude = g;
    }
    if (ov.contains("Delta")) {
        const double d = ov.at("Delta").get<double>();
        for (auto& x : spec.detunings)
            x = d;
    }
    for (size_t a = 0; a < spec.detunings.size(); ++a) {
        const std::string key = "detuning." + std::to_string(a);
        if (ov.contains(key))
            spec.detunings[a] = ov.at(key).get<double>();
    }
    if (ov.contains("gamma")) {
        spec.losses.clear();
        for (const auto& [mode, g] : ov.at("gamma").items())
            spec.losses.push_back({std::stoi(mode), g.get<double>()});
    }
}

Json window_json(const IntegrationWindow& w) {
    return Json{{"t_start", w.t_start},
                {"t_end", w.t_end},
                {"samples", w.samples},
                {"tolerance", w.tolerance}};
}

IntegrationWindow window_from_json(IntegrationWindow w, const Json& j) {
    if (j.contains("t_start"))
        w.t_start = j.at("t_start").get<double>();
    if (j.contains("t_end"))
        w.t_end = j.at("t_end").get<double>();
    if (j.contains("samples"))
        w.samples = j.at("samples").get<int>();
    if (j.contains("tolerance"))
        w.tolerance = j.at("tolerance").get<double>();
    return w;
}

Json pulses_json(const SystemSpec& spec) {
    Json out = Json::array();
    for (const auto& c : spec.couplings) {
        Json p{{"name", c.name},
               {"atom", c.atom},
               {"mode", c.mode},
               {"shape", c.pulse.shape == PulseShape::Gaussian ? "gaussian" : "constant"},
               {"amplitude", c.pulse.amplitude}};
        if (c.pulse.shape == PulseShape::Gaussian) {
            p["center"] = c.pulse.center;
            p["width"] = c.pulse.width;
        }
        if (c.pulse.sign < 0)
            p["sign"] = -1;
        if (c.transition == Transition::MinusI)
            p["transition"] = "I";
        else if (c.transition == Transition::MinusII)
            p["transition"] = "II";
        out.push_back(std::move(p));
    }
    return out;
}

Json losses_json(const SystemSpec& spec) {
    Json out = Json::array();
    for (const auto& l : spec.losses)
        out.push_back(Json{{"mode", l.mode}, {"gamma", l.gamma}});
    return out;
}

std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string write_csv(const std::filesystem::path& path, const PopulationTable& table,
                      const Eigen::VectorXd& norms) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << "t";
    for (const auto& l : table.labels)
        out << ',' << l;
    for (Index m = 0; m < table.mode_numbers.cols(); ++m)
        out << ",nbar" << (m + 1);
    out << ",norm\n";
    for (Index r = 0; r < table.times.size(); ++r) {
        out << format_g17(table.times[r]);
        for (Index c = 0; c < table.values.cols(); ++c)
            out << ',' << format_g17(table.values(r, c));
        for (Index c = 0; c < table.mode_numbers.cols(); ++c)
            out << ',' << format_g17(table.mode_numbers(r, c));
        out << ',' << format_g17(norms[r]) << '\n';
    }
    return path.string();
}

std::string write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    return path.string();
}

Json adiabaticity_json(const AdiabaticityReport& report) {
    Json pulses = Json::array();
    for (const auto& p : report.pulses) {
        Json e{{"name", p.name}, {"amplitude", p.amplitude}};
        if (p.width > 0.0) {
            e["width"] = p.width;
            e["G_sigma"] = p.adiabaticity;
        }
        pulses.push_back(std::move(e));
    }
    Json out{{"pulses", std::move(pulses)}};
    if (report.min_gap)
        out["min_gap"] = *report.min_gap;
    if (report.bridge_ratio_max)
        out["bridge_ratio_max"] = *report.bridge_ratio_max;
    return out;
}

Generator::Threads threads_mode(const RunOptions& opts) {
#ifdef _OPENMP
    if (opts.workers > 0)
        omp_set_num_threads(opts.workers);
#endif
    return Generator::Threads::Auto;
}

// ---------------------------------------------------------------------------
// Transfer scenarios (sector or full-space), possibly staged.
// ---------------------------------------------------------------------------

struct Stage {
    SystemSpec spec;
    IntegrationWindow window;
    HConfigRoles roles; // bridge ratio when g1a >= 0
};

struct TransferDef {
    std::string name;
    std::vector<Stage> stages;
    int sector_N = 1; // -1: full space
    std::function<StateVector(BasisPtr)> initial;
    std::function<StateVector(BasisPtr)> target; // optional
    std::string target_label;
    Json params;
    int default_samples = 1001;
};

ScenarioResult run_transfer(const TransferDef& def, const RunOptions& opts) {
    ScenarioResult result;
    result.name = def.name;
    BasisPtr basis = def.stages.front().spec.make_basis();
    const auto threads = threads_mode(opts);

    StateVector psi = def.initial(basis);
    std::vector<Index> watch;
    if (def.sector_N >= 0)
        watch = excitation_sector(*basis, def.sector_N);
    else
        for (int m = 0; m < basis->mode_count(); ++m) {
            std::vector<int> label(static_cast<size_t>(basis->factor_count()), 0);
            label[static_cast<size_t>(m)] = std::min(1, basis->mode(m).n_max);
            watch.push_back(basis->index_of(label));
        }

    Json stages_json = Json::array();
    Json integ{{"accepted", 0}, {"rejected", 0}, {"rhs_evals", 0}};
    Json adiab;
    std::map<std::string, double> final_pops, max_pops;
    std::vector<std::string> files;
    const std::filesystem::path dir = resolve_out_dir(opts);
    if (opts.write_files)
        std::filesystem::create_directories(dir);

    double time_offset = 0.0;
    VectorXc reduced;
    double final_norm = 1.0;
    for (size_t s = 0; s < def.stages.size(); ++s) {
        const Stage& stage = def.stages[s];
        IntegrationWindow window = stage.window;
        if (opts.samples > 0)
            window.samples = opts.samples;
        else if (window.samples == 0)
            window.samples = def.default_samples;
        if (opts.tolerance > 0.0)
            window.tolerance = opts.tolerance;

        Generator gen(stage.spec, basis, threads);
        Generator active = def.sector_N >= 0 ? gen.sector(def.sector_N) : gen;
        if (s == 0)
            reduced = active.restrict_state(psi.amps);

        Trajectory traj = integrate(active, window, reduced);
        reduced = traj.final_state();
        final_norm = traj.norms[traj.norms.size() - 1];

        PopulationTable table = populations(traj, active, watch);
        for (size_t c = 0; c < table.labels.size(); ++c) {
            const auto col = table.values.col(static_cast<Index>(c));
            max_pops[table.labels[c]] =
                std::max(max_pops[table.labels[c]], col.maxCoeff());
            final_pops[table.labels[c]] = col[col.size() - 1];
        }

        AdiabaticityReport report = adiabaticity_report(active, window);
        if (stage.roles.g1a >= 0)
            add_bridge_ratio(report, stage.spec, window, stage.roles);
        if (s == 0)
            adiab = adiabaticity_json(report);
        else
            adiab["stages"].push_back(adiabaticity_json(report));

        integ["accepted"] = integ["accepted"].get<long>() + traj.stats.accepted;
        integ["rejected"] = integ["rejected"].get<long>() + traj.stats.rejected;
        integ["rhs_evals"] = integ["rhs_evals"].get<long>() + traj.stats.rhs_evals;

        Json sj = window_json(window);
        sj["pulses"] = pulses_json(stage.spec);
        sj["losses"] = losses_json(stage.spec);
        if (def.stages.size() > 1) {
            sj["time_offset"] = time_offset; // stages appended on one physical axis
        }
        stages_json.push_back(std::move(sj));

        if (opts.write_files) {
            PopulationTable shifted = table;
            shifted.times.array() += time_offset;
            const std::string suffix =
                def.stages.size() > 1 ? "_stage" + std::to_string(s + 1) : "";
            files.push_back(write_csv(dir / (def.name + suffix + ".trajectory.csv"),
                                      shifted, traj.norms));
        }
        time_offset += window.t_end - window.t_start;
    }

    psi.amps = def.sector_N >= 0
                   ? Generator(def.stages.back().spec, basis, threads)
                         .sector(def.sector_N)
                         .prolong_state(reduced)
                   : reduced;

    Json summary{{"scenario", def.name}, {"parameters", def.params}};
    summary["stages"] = std::move(stages_json);
    summary["integrator"] = std::move(integ);
    if (def.target) {
        StateVector target = def.target(basis);
        const double f = fidelity(psi, target);
        result.fidelity = f;
        summary["fidelity"] = Json{{"target", def.target_label},
                                   {"amplitude", f},
                                   {"squared", f * f}};
    }
    Json fp, mp;
    for (const auto& [k, v] : final_pops)
        fp[k] = v;
    for (const auto& [k, v] : max_pops)
        mp[k] = v;
    summary["populations"] = Json{{"final", std::move(fp)}, {"max", std::move(mp)}};
    summary["norm"] = Json{{"final", final_norm}, {"survival", final_norm * final_norm}};
    summary["adiabaticity"] = std::move(adiab);

    result.final_populations = std::move(final_pops);
    result.max_populations = std::move(max_pops);
    if (opts.write_files) {
        Json fj = Json::array();
        for (const auto& f : files)
            fj.push_back(f);
        summary["files"] = fj;
        result.files = files;
        const std::string sp =
            write_json(dir / (def.name + ".summary.json"), summary);
        result.files.push_back(sp);
    }
    result.summary = std::move(summary);
    return result;
}

// ---------------------------------------------------------------------------
// Preset builders
// ---------------------------------------------------------------------------

SystemSpec h_config_spec(double G, double sigma, double t1a, double t2a, double t1b,
                         double t3b, double gamma1 = 0.0) {
    SystemSpec spec;
    spec.modes = {ModeSpace{1}, ModeSpace{1}, ModeSpace{1}};
    spec.atoms = {AtomKind::TwoLevel, AtomKind::TwoLevel};
    spec.detunings = {0.0, 0.0};
    spec.couplings = {
        {0, 0, Transition::Minus, PulseSpec::gaussian(G, t1a, sigma), "g1a"},
        {0, 1, Transition::Minus, PulseSpec::gaussian(G, t2a, sigma), "g2a"},
        {1, 0, Transition::Minus, PulseSpec::gaussian(G, t1b, sigma), "g1b"},
        {1, 2, Transition::Minus, PulseSpec::gaussian(G, t3b, sigma), "g3b"},
    };
    if (gamma1 > 0.0)
        spec.losses = {{0, gamma1}};
    return spec;
}

HConfigRoles h_roles() { return {0, 1, 2, 3}; }

std::function<StateVector(BasisPtr)> label_state(const std::string& label) {
    return [label](BasisPtr basis) {
        StateVector out{basis, VectorXc::Zero(basis->dim())};
        out.amps[basis->parse_label(label)] = 1.0;
        return out;
    };
}

Json h_params(const SystemSpec& spec) {
    Json p;
    p["pulses"] = pulses_json(spec);
    p["losses"] = losses_json(spec);
    p["detunings"] = spec.detunings;
    return p;
}

TransferDef make_h_counterintuitive(const Json& ov, bool swapped) {
    const double G = swapped ? 300.0 : 100.0;
    const double t_mid_a = swapped ? -1.72 : 1.78;
    const double t_mid_b = swapped ? 1.78 : -1.72;
    SystemSpec spec = h_config_spec(G, 3.0, t_mid_a, 5.28, t_mid_b, -5.22);
    apply_common_overrides(spec, ov);
    TransferDef def;
    def.name = swapped ? "h_counterintuitive_swapped" : "h_counterintuitive";
    def.stages = {{spec, default_window(spec), h_roles()}};
    def.initial = label_state("0.1.0.-.-");
    def.target = label_state("0.0.1.-.-");
    def.target_label = "0.0.1.-.-";
    def.params = h_params(spec);
    return def;
}

TransferDef make_h_nested(const Json& ov) {
    SystemSpec spec = h_config_spec(100.0, 3.0, -3.0, 3.0, 3.0, -3.0);
    spec.couplings[0].pulse.width = 6.0; // g1a
    spec.couplings[1].pulse.width = 2.0; // g2a
    spec.couplings[2].pulse.width = 6.0; // g1b
    spec.couplings[3].pulse.width = 2.0; // g3b
    apply_common_overrides(spec, ov);
    TransferDef def;
    def.name = "h_nested";
    def.stages = {{spec, default_window(spec), h_roles()}};
    def.initial = label_state("0.1.0.-.-");
    def.target = label_state("0.0.1.-.-");
    def.target_label = "0.0.1.-.-";
    def.params = h_params(spec);
    return def;
}

TransferDef make_double_stirap(const Json& ov, double gamma) {
    // Two consecutive atom transits; each stage window is centered on its
    // pulse pair. The photon waits in the lossy middle cavity in between.
    const double G = 100.0, sigma = 2.0;
    SystemSpec stage1 = h_config_spec(G, sigma, -3.0, -1.0, 0.0, 0.0, gamma);
    stage1.couplings.resize(2); // atom a only
    SystemSpec stage2 = h_config_spec(G, sigma, 0.0, 0.0, 3.0, 1.0, gamma);
    stage2.couplings.erase(stage2.couplings.begin(), stage2.couplings.begin() + 2);
    apply_common_overrides(stage1, ov);
    apply_common_overrides(stage2, ov);
    TransferDef def;
    def.name = gamma == 0.0 ? "double_stirap"
                            : (gamma == 1.0 ? "double_stirap_loss1" : "double_stirap_lossy");
    def.stages = {{stage1, {-10.0, 6.0, 1001, 1e-9}, {}},
                  {stage2, {-6.0, 10.0, 1001, 1e-9}, {}}};
    def.initial = label_state("0.1.0.-.-");
    def.target = label_state("0.0.1.-.-");
    def.target_label = "0.0.1.-.-";
    def.params = Json{{"stage1", h_params(stage1)}, {"stage2", h_params(stage2)}};
    return def;
}

TransferDef make_h_epr(const Json& ov) {
    SystemSpec spec = h_config_spec(5.0, 3.0, 2.0, -2.0, 2.0, -2.0);
    apply_common_overrides(spec, ov);
    TransferDef def;
    def.name = "h_epr";
    def.stages = {{spec, default_window(spec), h_roles()}};
    def.initial = label_state("1.0.0.-.-");
    def.target = [](BasisPtr b) { return target_epr(b, 1, 2, +1); };
    def.target_label = "(|0,1> + |1,0>)/sqrt(2) on cavities 2,3";
    def.params = h_params(spec);
    return def;
}

SystemSpec star_spec(int M, double G, double sigma, double t_ring, double t_M,
                     int perturbers, double g_pert) {
    SystemSpec spec;
    for (int i = 0; i < M; ++i)
        spec.modes.push_back(ModeSpace{1});
    spec.atoms = {AtomKind::TwoLevel};
    spec.detunings = {0.0};
    for (int i = 0; i < M - 1; ++i)
        spec.couplings.push_back({0, i, Transition::Minus,
                                  PulseSpec::gaussian(G, t_ring, sigma),
                                  "g" + std::to_string(i + 1)});
    spec.couplings.push_back(
        {0, M - 1, Transition::Minus, PulseSpec::gaussian(G, t_M, sigma),
         "g" + std::to_string(M)});
    // extra ground-state atoms pinned to cavities 3, 2, ... with constant coupling
    const int pinned[2] = {2, 1};
    const char* names[2] = {"g3b", "g2c"};
    for (int p = 0; p < perturbers; ++p) {
        spec.atoms.push_back(AtomKind::TwoLevel);
        spec.detunings.push_back(0.0);
        spec.couplings.push_back({1 + p, pinned[p], Transition::Minus,
                                  PulseSpec::constant(g_pert), names[p]});
    }
    return spec;
}

TransferDef make_star_w(const Json& ov) {
    SystemSpec spec = star_spec(4, 5.0, 2.0, -1.0, 1.0, 0, 0.0);
    apply_common_overrides(spec, ov);
    TransferDef def;
    def.name = "star_w";
    def.stages = {{spec, default_window(spec), {}}};
    def.initial = label_state("0.0.0.1.-");
    def.target = [](BasisPtr b) {
        const int modes[] = {0, 1, 2};
        return target_w(b, modes);
    };
    def.target_label = "W over cavities 1-3";
    def.params = h_params(spec);
    return def;
}

TransferDef make_star_perturbed(const Json& ov, int perturbers) {
    SystemSpec spec = star_spec(4, 50.0, 2.0, -1.0, 1.0, perturbers, 5.0);
    apply_common_overrides(spec, ov);
    TransferDef def;
    def.name = perturbers == 1 ? "star_perturbed_one" : "star_perturbed_two";
    std::string suffix;
    for (int p = 0; p < perturbers; ++p)
        suffix += ".-";
    def.stages = {{spec, default_window(spec), {}}};
    def.initial = label_state("0.0.0.1.-" + suffix);
    if (perturbers == 1) {
        def.target = [suffix](BasisPtr b) { return target_epr(b, 0, 1, +1); };
        def.target_label = "(|0,1> + |1,0>)/sqrt(2) on cavities 1,2";
    } else {
        def.target = label_state("1.0.0.0.-" + suffix);
        def.target_label = "1.0.0.0.-" + suffix;
    }
    def.params = h_params(spec);
    return def;
}

TransferDef make_h_experimental(const Json& ov) {
    // Fig-2 schedule mapped onto laboratory scales: couplings in rad/s
    // (G/2pi = 100 MHz), times in seconds (sigma = 0.3 us).
    const double cscale = 2e6 * M_PI, tscale = 1e-7;
    SystemSpec spec = h_config_spec(100.0 * cscale, 3.0 * tscale, 1.78 * tscale,
                                    5.28 * tscale, -1.72 * tscale, -5.22 * tscale);
    apply_common_overrides(spec, ov);
    TransferDef def;
    def.name = "h_experimental_units";
    def.stages = {{spec, default_window(spec), h_roles()}};
    def.initial = label_state("0.1.0.-.-");
    def.target = label_state("0.0.1.-.-");
    def.target_label = "0.0.1.-.-";
    def.params = h_params(spec);
    return def;
}

SystemSpec two_mode_spec(int n_max, double G, double sigma, double t_pump,
                         double t_stokes, double stokes_sign = +1.0) {
    SystemSpec spec;
    spec.modes = {ModeSpace{n_max}, ModeSpace{n_max}};
    spec.atoms = {AtomKind::TwoLevel};
    spec.detunings = {0.0};
    spec.couplings = {
        {0, 0, Transition::Minus, PulseSpec::gaussian(G, t_pump, sigma), "g1"},
        {0, 1, Transition::Minus,
         PulseSpec::gaussian(G, t_stokes, sigma, stokes_sign), "g2"},
    };
    return spec;
}

TransferDef make_two_mode_fock(const Json& ov) {
    const int n = ov_int(ov, "n", 2);
    SystemSpec spec = two_mode_spec(std::max(n, 1), 20.0, 3.0, 2.0, -2.0);
    apply_common_overrides(spec, ov);
    TransferDef def;
    def.name = "two_mode_fock";
    def.stages = {{spec, default_window(spec), {}}};
    def.sector_N = n;
    const std::string start = std::to_string(n) + ".0.-";
    const std::string end = "0." + std::to_string(n) + ".-";
    def.initial = label_state(start);
    def.target = label_state(end);
    def.target_label = end;
    def.params = h_params(spec);
    def.params["n"] = n;
    return def;
}

TransferDef make_fractional_half(const Json& ov) {
    SystemSpec spec = two_mode_spec(1, 15.0, 3.0, 2.0, -2.0);
    // second Stokes component rides along with the pump so g2/g1 -> 1
    spec.couplings.push_back(
        {0, 1, Transition::Minus, PulseSpec::gaussian(15.0, 2.0, 3.0), "g2_late"});
    apply_common_overrides(spec, ov);
    TransferDef def;
    def.name = "fractional_half";
    def.stages = {{spec, default_window(spec), {}}};
    def.initial = label_state("1.0.-");
    def.target = [](BasisPtr b) { return target_epr(b, 0, 1, -1); };
    def.target_label = "(|1,0> - |0,1>)/sqrt(2)";
    def.params = h_params(spec);
    return def;
}

TransferDef make_two_mode_coherent(const Json& ov) {
    const double alpha = ov_num(ov, "alpha", 1.0);
    const int n_max = ov_int(ov, "n_max", 12);
    SystemSpec spec = two_mode_spec(n_max, 15.0, 3.0, 2.0, -2.0);
    apply_common_overrides(spec, ov);
    TransferDef def;
    def.name = "two_mode_coherent";
    def.stages = {{spec, default_window(spec), {}}};
    def.sector_N = -1;
    def.default_samples = 201;
    def.initial = [alpha](BasisPtr b) {
        return product_state(b,
                             {coherent_state(alpha, b->mode(0)).amps,
                              fock_amplitudes(0, b->mode(1))},
                             {level_amplitudes(0, 2)});
    };
    def.target = [alpha](BasisPtr b) {
        return product_state(b,
                             {fock_amplitudes(0, b->mode(0)),
                              coherent_state(-alpha, b->mode(1)).amps},
                             {level_amplitudes(0, 2)});
    };
    def.target_label = "|0,-alpha>";
    def.params = h_params(spec);
    def.params["alpha"] = alpha;
    def.params["n_max"] = n_max;
    return def;
}

// ---------------------------------------------------------------------------
// Cat-state protocols (three modes, spectator level, staged measurements)
// ---------------------------------------------------------------------------

struct CatSetup {
    double alpha, G, sigma, t_sep, tolerance;
    int n_max, samples;
    Json params;
};

CatSetup cat_setup(const Json& ov, const RunOptions& opts) {
    CatSetup s{};
    s.alpha = ov_num(ov, "alpha", 1.0);
    s.G = ov_num(ov, "G", 15.0);
    s.sigma = ov_num(ov, "sigma", 3.0);
    s.t_sep = ov_num(ov, "t_sep", 2.0);
    s.n_max = ov_int(ov, "n_max", 12);
    s.samples = opts.samples > 0 ? opts.samples : 201;
    s.tolerance = opts.tolerance > 0.0 ? opts.tolerance : 1e-9;
    s.params = Json{{"alpha", s.alpha}, {"G", s.G},         {"sigma", s.sigma},
                    {"t_sep", s.t_sep}, {"n_max", s.n_max}};
    return s;
}

/// One STIRAP pass of an atom across (mode_from -> mode_to): the coupling to
/// the empty target mode opens first.
SystemSpec cat_pass_spec(const CatSetup& s, int n_modes, AtomKind kind, int mode_from,
                         int mode_to, double sign_from = +1.0,
                         Transition tr = Transition::Minus) {
    SystemSpec spec;
    for (int m = 0; m < n_modes; ++m)
        spec.modes.push_back(ModeSpace{s.n_max});
    spec.atoms = {kind};
    spec.detunings = {0.0};
    spec.couplings = {
        {0, mode_to, tr, PulseSpec::gaussian(s.G, -s.t_sep, s.sigma), "g_to"},
        {0, mode_from, tr, PulseSpec::gaussian(s.G, s.t_sep, s.sigma, sign_from),
         "g_from"},
    };
    return spec;
}

struct StageOutcome {
    Trajectory traj;
    StateVector state; // full space, post evolution
};

StageOutcome run_cat_stage(const SystemSpec& spec, const CatSetup& s,
                           const StateVector& psi0, const RunOptions& opts) {
    IntegrationWindow window = default_window(spec, s.samples, s.tolerance);
    Generator gen(spec, psi0.basis, threads_mode(opts));
    Trajectory traj = integrate(gen, window, psi0.amps);
    StateVector out{psi0.basis, traj.final_state()};
    return {std::move(traj), std::move(out)};
}

Json stats_json(const IntegratorStats& st) {
    return Json{{"accepted", st.accepted},
                {"rejected", st.rejected},
                {"rhs_evals", st.rhs_evals}};
}

std::string write_cat_csv(const std::string& name, const std::string& suffix,
                          const Trajectory& traj, const Generator& gen,
                          const RunOptions& opts, std::vector<std::string>& files) {
    if (!opts.write_files)
        return {};
    const std::filesystem::path dir = resolve_out_dir(opts);
    std::filesystem::create_directories(dir);
    PopulationTable table = populations(traj, gen, {});
    const std::string p =
        write_csv(dir / (name + suffix + ".trajectory.csv"), table, traj.norms);
    files.push_back(p);
    return p;
}

void maybe_sample_branches(Json& summary, const RunOptions& opts,
                           const std::vector<BranchRow>& rows) {
    if (!opts.seed)
        return;
    std::mt19937_64 rng(*opts.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double u = uni(rng);
    std::string picked = rows.empty() ? "" : rows.back().outcome;
    for (const auto& r : rows) {
        if (u < r.probability) {
            picked = r.outcome;
            break;
        }
        u -= r.probability;
    }
    summary["sampled"] = Json{{"seed", *opts.seed}, {"outcome", picked}};
}

ScenarioResult finish_cat(ScenarioResult result, Json summary, const RunOptions& opts,
                          std::vector<std::string> files) {
    if (opts.write_files) {
        Json fj = Json::array();
        for (const auto& f : files)
            fj.push_back(f);
        summary["files"] = fj;
        const std::filesystem::path dir = resolve_out_dir(opts);
        files.push_back(write_json(dir / (result.name + ".summary.json"), summary));
    }
    result.files = std::move(files);
    result.summary = std::move(summary);
    return result;
}

ScenarioResult run_cat_two_measurements(const Json& ov, const RunOptions& opts) {
    const CatSetup s = cat_setup(ov, opts);
    ScenarioResult result;
    result.name = "cat_two_measurements";
    std::vector<std::string> files;

    auto basis = std::make_shared<ProductBasis>(
        std::vector<ModeSpace>(3, ModeSpace{s.n_max}),
        std::vector<AtomKind>{AtomKind::WithSpectator});
    const VectorXc chi_plus = chi_basis_vector(0, +1).amplitudes;

    // stage 1: atom a in chi+, coherent state moved from cavity 2 to cavity 1
    StateVector psi0 = product_state(
        basis,
        {fock_amplitudes(0, basis->mode(0)), coherent_state(s.alpha, basis->mode(1)).amps,
         fock_amplitudes(0, basis->mode(2))},
        {chi_plus});
    SystemSpec pass1 = cat_pass_spec(s, 3, AtomKind::WithSpectator, 1, 0);
    StageOutcome st1 = run_cat_stage(pass1, s, psi0, opts);
    {
        Generator gen(pass1, basis, Generator::Threads::Auto);
        write_cat_csv(result.name, "_stage1", st1.traj, gen, opts, files);
    }

    const AtomBasisVector chis[] = {chi_basis_vector(0, +1), chi_basis_vector(0, -1)};
    auto first = branch_all(st1.state, 0, chis);

    // closed-form check of the projection algebra on the ideal pre-measurement
    // state (truncation is the only error source there)
    Json oracle;
    {
        auto ideal = product_state(
            basis,
            {coherent_state(-s.alpha, basis->mode(0)).amps,
             fock_amplitudes(0, basis->mode(1)), fock_amplitudes(0, basis->mode(2))},
            {level_amplitudes(0, 3)});
        auto keep = product_state(
            basis,
            {fock_amplitudes(0, basis->mode(0)),
             coherent_state(s.alpha, basis->mode(1)).amps,
             fock_amplitudes(0, basis->mode(2))},
            {level_amplitudes(2, 3)});
        StateVector pre{basis, (ideal.amps + keep.amps) / std::sqrt(2.0)};
        auto ideal_branches = branch_all(pre, 0, chis);
        const double expo = std::exp(-std::norm(s.alpha));
        oracle["p_plus"] = ideal_branches[0].probability;
        oracle["p_minus"] = ideal_branches[1].probability;
        oracle["closed_form_plus"] = (1.0 + expo) / 2.0;
        oracle["closed_form_minus"] = (1.0 - expo) / 2.0;
        oracle["max_deviation"] =
            std::max(std::abs(ideal_branches[0].probability - (1.0 + expo) / 2.0),
                     std::abs(ideal_branches[1].probability - (1.0 - expo) / 2.0));
    }

    // stage 2 per first-measurement branch: atom b in chi+, cavity 1 -> 3
    Json branch_table = Json::array();
    Json first_meas = Json::array();
    IntegratorStats total = st1.traj.stats;
    for (int i = 0; i < 2; ++i) {
        const auto& br = first[static_cast<size_t>(i)];
        first_meas.push_back(Json{{"outcome", br.outcome}, {"probability", br.probability}});
        // attach atom b in chi+: field index block times atom level stride
        StateVector psi1{basis, VectorXc::Zero(basis->dim())};
        {
            const ProductBasis& fb = *br.post_state.basis;
            const Index stride = basis->factor_stride(3);
            for (Index f = 0; f < fb.dim(); ++f) {
                if (br.post_state.amps[f] == Complex(0.0))
                    continue;
                for (int l = 0; l < 3; ++l)
                    if (chi_plus[l] != Complex(0.0))
                        psi1.amps[f + stride * l] = br.post_state.amps[f] * chi_plus[l];
            }
        }
        SystemSpec pass2 = cat_pass_spec(s, 3, AtomKind::WithSpectator, 0, 2);
        StageOutcome st2 = run_cat_stage(pass2, s, psi1, opts);
        total.accepted += st2.traj.stats.accepted;
        total.rejected += st2.traj.stats.rejected;
        total.rhs_evals += st2.traj.stats.rhs_evals;
        {
            Generator gen(pass2, basis, Generator::Threads::Auto);
            write_cat_csv(result.name, "_stage2_" + br.outcome, st2.traj, gen, opts,
                          files);
        }
        auto second = branch_all(st2.state, 0, chis);
        for (int j = 0; j < 2; ++j) {
            const auto& br2 = second[static_cast<size_t>(j)];
            const double joint = br.probability * br2.probability;
            StateVector target = target_psi_ij(br2.post_state.basis, s.alpha, i, j);
            const double fid = fidelity(br2.post_state, target);
            result.branches.push_back(
                {"psi_" + std::to_string(i) + std::to_string(j), joint, fid});
            branch_table.push_back(Json{{"outcome", result.branches.back().outcome},
                                        {"probability", joint},
                                        {"fidelity", fid}});
        }
        // nonadiabatic leak of the second measurement
        const double leak2 = br.probability * second[2].probability;
        result.branches.push_back({"leak_b" + std::to_string(i), leak2, std::nullopt});
        branch_table.push_back(
            Json{{"outcome", result.branches.back().outcome}, {"probability", leak2}});
    }
    // stage-1 leak branch
    result.branches.push_back({"leak_a", first[2].probability, std::nullopt});
    branch_table.push_back(
        Json{{"outcome", "leak_a"}, {"probability", first[2].probability}});

    double psum = 0.0;
    for (const auto& b : result.branches)
        psum += b.probability;

    Json summary{{"scenario", result.name}, {"parameters", s.params}};
    summary["integrator"] = stats_json(total);
    summary["first_measurement"] = std::move(first_meas);
    summary["measurement_oracle"] = std::move(oracle);
    summary["branches"] = std::move(branch_table);
    summary["branch_probability_sum"] = psum;
    maybe_sample_branches(summary, opts, result.branches);
    return finish_cat(std::move(result), std::move(summary), opts, std::move(files));
}

ScenarioResult run_cat_displaced(const Json& ov, const RunOptions& opts) {
    const CatSetup s = cat_setup(ov, opts);
    const double beta = s.alpha / 2.0;
    ScenarioResult result;
    result.name = "cat_displaced";
    std::vector<std::string> files;

    auto basis = std::make_shared<ProductBasis>(
        std::vector<ModeSpace>(3, ModeSpace{s.n_max}),
        std::vector<AtomKind>{AtomKind::WithSpectator});
    const VectorXc chi_plus = chi_basis_vector(0, +1).amplitudes;
    StateVector psi0 = product_state(
        basis,
        {fock_amplitudes(0, basis->mode(0)), coherent_state(s.alpha, basis->mode(1)).amps,
         fock_amplitudes(0, basis->mode(2))},
        {chi_plus});
    SystemSpec pass1 = cat_pass_spec(s, 3, AtomKind::WithSpectator, 1, 0);
    StageOutcome st1 = run_cat_stage(pass1, s, psi0, opts);
    const AtomBasisVector chis[] = {chi_basis_vector(0, +1), chi_basis_vector(0, -1)};
    auto first = branch_all(st1.state, 0, chis);

    Json branch_table = Json::array();
    IntegratorStats total = st1.traj.stats;
    for (int i = 0; i < 2; ++i) {
        const auto& br = first[static_cast<size_t>(i)];
        // atom b enters in |-> and leaves in |->: project it back out
        StateVector psi1{basis, VectorXc::Zero(basis->dim())};
        const ProductBasis& fb = *br.post_state.basis;
        for (Index f = 0; f < fb.dim(); ++f)
            psi1.amps[f] = br.post_state.amps[f]; // level 0 = |->
        SystemSpec pass2 = cat_pass_spec(s, 3, AtomKind::WithSpectator, 0, 2);
        StageOutcome st2 = run_cat_stage(pass2, s, psi1, opts);
        total.accepted += st2.traj.stats.accepted;
        total.rejected += st2.traj.stats.rejected;
        total.rhs_evals += st2.traj.stats.rhs_evals;
        auto out = project_atom(st2.state, level_basis_vector(0, AtomKind::WithSpectator, 0));

        StateVector displaced = displace(out.post_state, 1, -beta);
        displaced = displace(displaced, 2, -beta);
        StateVector cat_target =
            target_entangled_cat(displaced.basis, 1, 2, beta, i);
        const double fid = fidelity(displaced, cat_target);

        StateVector merged = beam_splitter(displaced, 1, 2);
        StateVector single_target =
            target_cat(merged.basis, 1, std::sqrt(2.0) * beta, i % 2 == 0 ? +1 : -1);
        const double fid_bs = fidelity(merged, single_target);

        const double joint = br.probability * out.probability;
        result.branches.push_back({std::string("i=") + std::to_string(i), joint, fid});
        branch_table.push_back(Json{{"outcome", result.branches.back().outcome},
                                    {"probability", joint},
                                    {"fidelity_displaced", fid},
                                    {"fidelity_beam_splitter", fid_bs},
                                    {"beta", beta}});
    }
    result.branches.push_back({"leak_a", first[2].probability, std::nullopt});
    branch_table.push_back(
        Json{{"outcome", "leak_a"}, {"probability", first[2].probability}});

    Json summary{{"scenario", result.name}, {"parameters", s.params}};
    summary["parameters"]["beta"] = beta;
    summary["integrator"] = stats_json(total);
    summary["branches"] = std::move(branch_table);
    maybe_sample_branches(summary, opts, result.branches);
    return finish_cat(std::move(result), std::move(summary), opts, std::move(files));
}

ScenarioResult run_cat_sign(const Json& ov, const RunOptions& opts) {
    const CatSetup s = cat_setup(ov, opts);
    const int prep_sign = ov_int(ov, "atom_sign", +1);
    ScenarioResult result;
    result.name = "cat_sign_couplings";
    std::vector<std::string> files;

    // Conditional STIRAP: each ground level drives its own transition into the
    // shared excited state; the branches evolve independently and recombine.
    auto basis = std::make_shared<ProductBasis>(
        std::vector<ModeSpace>(2, ModeSpace{s.n_max}),
        std::vector<AtomKind>{AtomKind::TwoGroundLevels});
    auto two_level = std::make_shared<ProductBasis>(
        std::vector<ModeSpace>(2, ModeSpace{s.n_max}),
        std::vector<AtomKind>{AtomKind::TwoLevel});

    IntegratorStats total{};
    std::vector<VectorXc> evolved(2);
    std::vector<double> weights(2);
    for (int branch = 0; branch < 2; ++branch) {
        // couplings G_1 = G for both transitions; G_2 flips sign on level II
        const double sign2 = branch == 0 ? +1.0 : -1.0;
        SystemSpec spec = cat_pass_spec(s, 2, AtomKind::TwoLevel, 0, 1);
        spec.couplings[0].pulse.sign = sign2; // Stokes on mode 2
        StateVector field0 = product_state(
            two_level,
            {coherent_state(s.alpha, two_level->mode(0)).amps,
             fock_amplitudes(0, two_level->mode(1))},
            {level_amplitudes(0, 2)});
        StageOutcome st = run_cat_stage(spec, s, field0, opts);
        total.accepted += st.traj.stats.accepted;
        total.rejected += st.traj.stats.rejected;
        total.rhs_evals += st.traj.stats.rhs_evals;
        {
            Generator gen(spec, two_level, Generator::Threads::Auto);
            write_cat_csv(result.name, branch == 0 ? "_I" : "_II", st.traj, gen, opts,
                          files);
        }
        auto ground = project_atom(st.state, level_basis_vector(0, AtomKind::TwoLevel, 0));
        evolved[static_cast<size_t>(branch)] = ground.post_state.amps;
        weights[static_cast<size_t>(branch)] = ground.probability;
    }

    // recombine: (|field_I>|I> + prep_sign |field_II>|II>)/sqrt(2)
    StateVector state{basis, VectorXc::Zero(basis->dim())};
    const Index stride = basis->factor_stride(2);
    for (int branch = 0; branch < 2; ++branch) {
        const double w =
            std::sqrt(weights[static_cast<size_t>(branch)] / 2.0) * (branch == 1 ? prep_sign : 1);
        for (Index f = 0; f < evolved[static_cast<size_t>(branch)].size(); ++f)
            state.amps[f + stride * branch] = w * evolved[static_cast<size_t>(branch)][f];
    }

    const AtomBasisVector pair[] = {ground_pair_basis_vector(0, +1),
                                    ground_pair_basis_vector(0, -1)};
    auto branches = branch_all(state, 0, pair, true, "leak");
    Json branch_table = Json::array();
    for (int j = 0; j < 2; ++j) {
        const auto& br = branches[static_cast<size_t>(j)];
        // outcome psi_j leaves N(|0,-alpha> + prep*j |0,alpha>) in cavity 2
        const int cat_sign = (j == 0 ? +1 : -1) * prep_sign;
        StateVector target = target_cat(br.post_state.basis, 1, s.alpha, cat_sign);
        const double fid = fidelity(br.post_state, target);
        result.branches.push_back({br.outcome, br.probability, fid});
        branch_table.push_back(Json{{"outcome", br.outcome},
                                    {"probability", br.probability},
                                    {"fidelity", fid},
                                    {"cat_sign", cat_sign}});
    }
    result.branches.push_back({"leak", branches[2].probability, std::nullopt});
    branch_table.push_back(
        Json{{"outcome", "leak"}, {"probability", branches[2].probability}});

    Json summary{{"scenario", result.name}, {"parameters", s.params}};
    summary["parameters"]["atom_sign"] = prep_sign;
    summary["integrator"] = stats_json(total);
    summary["branches"] = std::move(branch_table);
    maybe_sample_branches(summary, opts, result.branches);
    return finish_cat(std::move(result), std::move(summary), opts, std::move(files));
}

// ---------------------------------------------------------------------------
// Custom configs and the registry
// ---------------------------------------------------------------------------

SystemSpec spec_from_json(const Json& j) {
    SystemSpec spec;
    for (const auto& m : j.at("modes"))
        spec.modes.push_back(ModeSpace{m.at("n_max").get<int>()});
    for (const auto& a : j.at("atoms")) {
        const std::string kind = a.get<std::string>();
        if (kind == "two_level")
            spec.atoms.push_back(AtomKind::TwoLevel);
        else if (kind == "with_spectator")
            spec.atoms.push_back(AtomKind::WithSpectator);
        else if (kind == "two_ground")
            spec.atoms.push_back(AtomKind::TwoGroundLevels);
        else
            throw ConfigError("unknown atom kind '" + kind + "'");
    }
    if (j.contains("detunings"))
        spec.detunings = j.at("detunings").get<std::vector<double>>();
    else
        spec.detunings.assign(spec.atoms.size(), 0.0);
    for (const auto& c : j.at("couplings")) {
        CouplingSpec cs;
        cs.atom = c.at("atom").get<int>();
        cs.mode = c.at("mode").get<int>();
        if (c.contains("transition")) {
            const std::string t = c.at("transition").get<std::string>();
            cs.transition = t == "I" ? Transition::MinusI
                                     : (t == "II" ? Transition::MinusII : Transition::Minus);
        }
        const auto& p = c.at("pulse");
        const std::string shape = p.value("shape", "gaussian");
        if (shape == "gaussian")
            cs.pulse = PulseSpec::gaussian(p.at("amplitude").get<double>(),
                                           p.at("center").get<double>(),
                                           p.at("width").get<double>(),
                                           p.value("sign", 1.0));
        else if (shape == "constant")
            cs.pulse = PulseSpec::constant(p.at("amplitude").get<double>(),
                                           p.value("sign", 1.0));
        else
            throw ConfigError("unknown pulse shape '" + shape + "'");
        cs.name = c.value("name", "");
        spec.couplings.push_back(std::move(cs));
    }
    if (j.contains("losses"))
        for (const auto& l : j.at("losses"))
            spec.losses.push_back({l.at("mode").get<int>(), l.at("gamma").get<double>()});
    return spec;
}

TransferDef custom_transfer(const Json& config) {
    TransferDef def;
    def.name = config.value("name", "custom");
    SystemSpec spec = spec_from_json(config.at("system"));
    spec.validate();
    Stage stage{spec, {}, {}};
    stage.window = config.contains("window")
                       ? window_from_json(default_window(spec), config.at("window"))
                       : default_window(spec);
    def.stages = {stage};
    def.sector_N = config.value("sector", 1);

    const Json& init = config.at("initial");
    if (init.contains("label")) {
        def.initial = label_state(init.at("label").get<std::string>());
    } else {
        def.initial = [init](BasisPtr b) {
            std::vector<VectorXc> modes;
            const auto& ms = init.at("modes");
            for (int m = 0; m < b->mode_count(); ++m) {
                const auto& d = ms.at(static_cast<size_t>(m));
                if (d.contains("coherent"))
                    modes.push_back(
                        coherent_state(d.at("coherent").get<double>(), b->mode(m)).amps);
                else
                    modes.push_back(fock_amplitudes(d.value("fock", 0), b->mode(m)));
            }
            std::vector<VectorXc> atoms;
            for (int a = 0; a < b->atom_count(); ++a) {
                int level = 0;
                if (init.contains("atoms"))
                    level = init.at("atoms").at(static_cast<size_t>(a)).get<int>();
                atoms.push_back(level_amplitudes(level, atom_dim(b->atom(a))));
            }
            return product_state(b, modes, atoms);
        };
        if (init.contains("modes")) {
            bool coherent = false;
            for (const auto& d : init.at("modes"))
                if (d.contains("coherent"))
                    coherent = true;
            if (coherent)
                def.sector_N = -1;
        }
    }
    if (config.contains("sector"))
        def.sector_N = config.at("sector").is_string() ? -1 : config.at("sector").get<int>();

    if (config.contains("target")) {
        const Json tgt = config.at("target");
        if (tgt.contains("label")) {
            const std::string l = tgt.at("label").get<std::string>();
            def.target = label_state(l);
            def.target_label = l;
        } else if (tgt.contains("epr")) {
            const auto modes = tgt.at("epr").at("modes").get<std::vector<int>>();
            const int sign = tgt.at("epr").value("sign", 1);
            def.target = [modes, sign](BasisPtr b) {
                return target_epr(b, modes.at(0), modes.at(1), sign);
            };
            def.target_label = "epr";
        } else if (tgt.contains("w")) {
            const auto modes = tgt.at("w").at("modes").get<std::vector<int>>();
            def.target = [modes](BasisPtr b) { return target_w(b, modes); };
            def.target_label = "w";
        } else {
            throw ConfigError("unknown target descriptor");
        }
    }
    def.params = Json{{"system", config.at("system")}};
    return def;
}

using Runner = std::function<ScenarioResult(const Json&, const RunOptions&)>;

ScenarioResult run_transfer_preset(TransferDef def, const Json& config,
                                   const RunOptions& opts) {
    if (config.contains("window"))
        for (auto& st : def.stages)
            st.window = window_from_json(st.window, config.at("window"));
    return run_transfer(def, opts);
}

Json overrides_of(const Json& config) {
    return config.value("overrides", Json::object());
}

const std::map<std::string, Runner>& preset_runners() {
    static const std::map<std::string, Runner> table = {
        {"h_counterintuitive",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_h_counterintuitive(overrides_of(c), false), c, o);
         }},
        {"h_counterintuitive_swapped",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_h_counterintuitive(overrides_of(c), true), c, o);
         }},
        {"h_nested",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_h_nested(overrides_of(c)), c, o);
         }},
        {"double_stirap",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_double_stirap(overrides_of(c), 0.0), c, o);
         }},
        {"double_stirap_lossy",
         [](const Json& c, const RunOptions& o) {
             Json ov = overrides_of(c);
             if (!ov.contains("gamma"))
                 ov["gamma"] = Json{{"0", 0.1}};
             return run_transfer_preset(make_double_stirap(ov, 0.1), c, o);
         }},
        {"double_stirap_loss1",
         [](const Json& c, const RunOptions& o) {
             Json ov = overrides_of(c);
             if (!ov.contains("gamma"))
                 ov["gamma"] = Json{{"0", 1.0}};
             return run_transfer_preset(make_double_stirap(ov, 1.0), c, o);
         }},
        {"h_epr",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_h_epr(overrides_of(c)), c, o);
         }},
        {"star_w",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_star_w(overrides_of(c)), c, o);
         }},
        {"star_perturbed_one",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_star_perturbed(overrides_of(c), 1), c, o);
         }},
        {"star_perturbed_two",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_star_perturbed(overrides_of(c), 2), c, o);
         }},
        {"h_experimental_units",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_h_experimental(overrides_of(c)), c, o);
         }},
        {"two_mode_fock",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_two_mode_fock(overrides_of(c)), c, o);
         }},
        {"two_mode_coherent",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_two_mode_coherent(overrides_of(c)), c, o);
         }},
        {"fractional_half",
         [](const Json& c, const RunOptions& o) {
             return run_transfer_preset(make_fractional_half(overrides_of(c)), c, o);
         }},
        {"cat_two_measurements",
         [](const Json& c, const RunOptions& o) {
             return run_cat_two_measurements(overrides_of(c), o);
         }},
        {"cat_displaced",
         [](const Json& c, const RunOptions& o) {
             return run_cat_displaced(overrides_of(c), o);
         }},
        {"cat_sign_couplings",
         [](const Json& c, const RunOptions& o) {
             return run_cat_sign(overrides_of(c), o);
         }},
    };
    return table;
}

} // namespace

std::string resolve_out_dir(const RunOptions& opts) {
    if (!opts.out_dir.empty())
        return opts.out_dir;
    if (const char* env = std::getenv("CAVITY_STIRAP_OUT"))
        return env;
    return ".";
}

std::vector<PresetInfo> preset_catalog() {
    std::vector<PresetInfo> out;
    const Json none = Json::object();
    auto add = [&out](std::string name, std::string desc, Json params) {
        out.push_back({std::move(name), std::move(desc), std::move(params)});
    };
    add("h_counterintuitive",
        "fully counterintuitive four-pulse transfer across the H configuration "
        "(cavity 2 to cavity 3 through a barely populated middle cavity)",
        make_h_counterintuitive(none, false).params);
    add("h_counterintuitive_swapped",
        "same transfer with the two middle pulses exchanged; needs a stronger "
        "drive for the same quality",
        make_h_counterintuitive(none, true).params);
    add("h_nested",
        "nested pulse pairs of unequal widths realizing the same H-configuration "
        "transfer",
        make_h_nested(none).params);
    add("double_stirap",
        "two consecutive single-atom passes parking the photon in the middle "
        "cavity (contrast case for loss)",
        make_double_stirap(none, 0.0).params);
    add("double_stirap_lossy", "double pass with middle-cavity decay rate 0.1",
        make_double_stirap(Json{{"gamma", Json{{"0", 0.1}}}}, 0.1).params);
    add("double_stirap_loss1", "double pass with middle-cavity decay rate 1",
        make_double_stirap(Json{{"gamma", Json{{"0", 1.0}}}}, 1.0).params);
    add("h_epr",
        "simultaneous pulse pairs splitting one photon into an EPR state of the "
        "outer cavities",
        make_h_epr(none).params);
    add("star_w",
        "four-cavity star: single photon spread into a W state over three "
        "cavities",
        make_star_w(none).params);
    add("star_perturbed_one",
        "star with a weak extra atom pinned to cavity 3; its cavity drops out of "
        "the final state",
        make_star_perturbed(none, 1).params);
    add("star_perturbed_two",
        "star with extra atoms on cavities 3 and 2; the photon lands in cavity 1",
        make_star_perturbed(none, 2).params);
    add("h_experimental_units",
        "counterintuitive H transfer at laboratory scales (coupling 2*pi*100 MHz, "
        "widths 0.3 us)",
        make_h_experimental(none).params);
    add("two_mode_fock", "two-photon Fock state moved between two cavities",
        make_two_mode_fock(none).params);
    add("two_mode_coherent",
        "coherent state moved between two cavities (amplitude flips sign)",
        make_two_mode_coherent(none).params);
    add("fractional_half",
        "fractional variant ending at equal couplings, leaving "
        "(|1,0>-|0,1>)/sqrt(2)",
        make_fractional_half(none).params);
    {
        CatSetup s = cat_setup(none, {});
        add("cat_two_measurements",
            "spectator-level atoms measured in the chi basis after consecutive "
            "passes; four entangled coherent branches",
            s.params);
        Json dp = s.params;
        dp["beta"] = s.alpha / 2.0;
        add("cat_displaced",
            "single measured atom, then displacements and a 50/50 beam splitter "
            "turn the branch into a one-mode cat",
            dp);
        Json sp = s.params;
        sp["atom_sign"] = 1;
        add("cat_sign_couplings",
            "two degenerate ground levels with opposite second-cavity coupling "
            "signs; measuring the atom leaves a cat in cavity 2",
            sp);
    }
    add("star_w_sweep_G", "W-state fidelity versus common coupling amplitude",
        Json{{"preset", "star_w"},
             {"sweep", Json{{"path", "G"},
                            {"values", Json::array({0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0,
                                                    2.25, 2.5, 2.75, 3.0, 4.0, 5.0})}}}});
    add("star_w_sweep_Delta", "W-state fidelity versus common detuning",
        Json{{"preset", "star_w"},
             {"sweep", Json{{"path", "Delta"},
                            {"values",
                             Json::array({-10.0, -8.0, -6.0, -5.0, -4.0, -3.0, -2.0,
                                          -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0,
                                          3.0, 4.0, 5.0, 6.0, 8.0, 10.0})}}}});
    return out;
}

ScenarioResult run_scenario(const Json& config, const RunOptions& opts) {
    if (config.contains("preset")) {
        const std::string name = config.at("preset").get<std::string>();
        const auto& table = preset_runners();
        const auto it = table.find(name);
        if (it == table.end())
            throw ConfigError("unknown preset '" + name + "'");
        return it->second(config, opts);
    }
    if (config.contains("system"))
        return run_transfer(custom_transfer(config), opts);
    throw ConfigError("config needs either a 'preset' or a 'system' section");
}

ScenarioResult run_preset(const std::string& preset, const RunOptions& opts) {
    return run_scenario(Json{{"preset", preset}}, opts);
}

SweepResult run_sweep(const Json& config, const RunOptions& opts) {
    if (!config.contains("sweep"))
        throw ConfigError("sweep config needs a 'sweep' section");
    const Json& sw = config.at("sweep");
    const std::string path = sw.at("path").get<std::string>();
    std::vector<double> values;
    if (sw.contains("values")) {
        values = sw.at("values").get<std::vector<double>>();
    } else {
        const double start = sw.at("start").get<double>();
        const double stop = sw.at("stop").get<double>();
        const int steps = sw.at("steps").get<int>();
        if (steps < 1)
            throw ConfigError("sweep needs at least one step");
        for (int i = 0; i < steps; ++i)
            values.push_back(steps == 1 ? start
                                        : start + (stop - start) * i / (steps - 1));
    }
    if (values.empty())
        throw ConfigError("sweep has no points");

    SweepResult result;
    result.name = config.value("name", config.value("preset", "sweep")) + "_sweep_" + path;
    result.axis = path;
    result.points.resize(values.size());

    RunOptions point_opts = opts;
    point_opts.write_files = false;
    std::vector<std::string> errors(values.size());
#ifdef _OPENMP
    if (opts.workers > 0)
        omp_set_num_threads(opts.workers);
#endif
#pragma omp parallel for schedule(dynamic)
    for (size_t i = 0; i < values.size(); ++i) {
        try {
            Json point = config;
            point.erase("sweep");
            if (!point.contains("overrides"))
                point["overrides"] = Json::object();
            point["overrides"][path] = values[i];
            ScenarioResult r = run_scenario(point, point_opts);
            if (!r.fidelity)
                throw ConfigError("swept scenario reports no fidelity");
            result.points[i] = {values[i], *r.fidelity};
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty())
            throw ConfigError("sweep point failed: " + e);

    Json rows = Json::array();
    for (const auto& p : result.points)
        rows.push_back(Json{{"value", p.value},
                            {"fidelity", p.fidelity},
                            {"fidelity_squared", p.fidelity * p.fidelity}});
    result.summary = Json{{"scenario", result.name},
                          {"axis", path},
                          {"points", std::move(rows)}};
    if (opts.write_files) {
        const std::filesystem::path dir = resolve_out_dir(opts);
        std::filesystem::create_directories(dir);
        std::ofstream csv(dir / (result.name + ".csv"));
        csv << path << ",fidelity,fidelity_squared\n";
        for (const auto& p : result.points)
            csv << format_g17(p.value) << ',' << format_g17(p.fidelity) << ','
                << format_g17(p.fidelity * p.fidelity) << '\n';
        result.files.push_back((dir / (result.name + ".csv")).string());
        result.files.push_back(
            write_json(dir / (result.name + ".summary.json"), result.summary));
    }
    return result;
}

} // namespace stirap
