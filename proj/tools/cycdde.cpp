#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cycdde/cycdde.hpp"

using namespace cycdde;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ArgumentError(what + ": '" + item + "' is not a number");
        }
    }
    return out;
}

/// Writes to the named file, or stdout when the name is empty or "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ArgumentError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void print_json(const json& j, const std::string& path) {
    Output out(path);
    out.stream() << j.dump(2) << '\n';
}

Window parse_window(const std::string& text) {
    const auto v = parse_list(text, "--window");
    if (v.size() != 4) throw ArgumentError("--window expects re_lo,re_hi,im_lo,im_hi");
    return {v[0], v[1], v[2], v[3]};
}

json a1_json(const A1Report& a1) {
    return {{"holds", a1.holds},
            {"reason", a1.reason},
            {"sigma0", a1.sigma0},
            {"omega", a1.omega},
            {"sigma_next", std::isfinite(a1.sigma_next) ? json(a1.sigma_next) : json(nullptr)}};
}

json transform_json(const GeneTransform& tr) {
    return {{"mu", tr.system.mu()},
            {"K", tr.K},
            {"total_delay", tr.total_delay},
            {"shift", tr.shift},
            {"signs", tr.signs},
            {"equilibrium", {{"r", tr.equilibrium.r}, {"p", tr.equilibrium.p}, {"residual", tr.equilibrium.residual}}}};
}

CharFunction char_function(const SystemSpec& spec) {
    if (const auto* u = std::get_if<UnidirectionalSystem>(&spec)) return CharFunction::of(*u);
    if (const auto* c = std::get_if<CyclicSystem>(&spec)) return CharFunction::of(*c);
    return CharFunction::of(to_unidirectional(std::get<GeneNetwork>(spec)).system);
}

CyclicSystem as_cyclic(const SystemSpec& spec) {
    if (const auto* u = std::get_if<UnidirectionalSystem>(&spec)) return u->to_cyclic();
    if (const auto* c = std::get_if<CyclicSystem>(&spec)) return *c;
    return to_unidirectional(std::get<GeneNetwork>(spec)).system.to_cyclic();
}

json orbit_bounds_json(const GeneTransform& tr, const GeneNetwork& net, const OrbitReport& r) {
    bool ok = !r.curve.empty();
    for (const auto& x : r.curve)
        for (std::size_t k = 0; k < x.size(); ++k)
            ok = ok && within_gene_bounds(net, tr.variables[k].column(), tr.to_gene(k, x[k]));
    return ok;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string spec;
    std::string window;
    double margin = 1.0;
    std::string out;
};

int cmd_analyze(const AnalyzeArgs& a) {
    const SystemSpec spec = load_system_spec(a.spec);
    json report;
    FeedbackReport fb;
    if (const auto* g = std::get_if<GeneNetwork>(&spec)) {
        const auto tr = to_unidirectional(*g);
        report["transform"] = transform_json(tr);
        fb = validate_feedback(tr.system);
    } else {
        fb = validate_feedback(as_cyclic(spec));
    }
    const CharFunction cf = char_function(spec);
    const A1Report a1 = verify_a1(cf, a.margin);
    SpectrumReport sr = a1.spectrum;
    if (!a.window.empty()) {
        sr = find_roots(cf, parse_window(a.window));
        sr.a1_holds = a1.spectrum.a1_holds;
        sr.a1_reason = a1.spectrum.a1_reason;
        sr.K_u = a1.spectrum.K_u;
        sr.K_c = a1.spectrum.K_c;
        sr.omega1 = a1.spectrum.omega1;
    }
    json j = to_json(sr);
    j["K"] = cf.is_unidirectional() ? json(cf.K()) : json(nullptr);
    j["feedback"] = to_json(fb);
    j["a1"] = a1_json(a1);
    if (report.contains("transform")) j["transform"] = report["transform"];
    print_json(j, a.out);
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string spec;
    std::string model;
    double t_end = 20.0;
    std::size_t m = 128;
    double seed_eps = std::nan("");
    std::string initial;
    bool random_initial = false;
    unsigned long long rng_seed = 0;
    bool gene_coordinates = false;
    double sample_dt = 0.1;
    std::string out;
    std::string v_out;
};

SystemState leading_seed(const CyclicSystem& sys, double eps, std::size_t m) {
    const A1Report a1 = verify_a1(CharFunction::of(sys));
    if (!a1.spectrum.leading) throw NumericalError("no roots found near the imaginary axis");
    SpectralProjection proj(sys.linearization(), a1.spectrum.leading->lambda);
    return proj.eigenfunction(m, false, eps);
}

int cmd_simulate(const SimulateArgs& a) {
    if (!std::isnan(a.seed_eps) && !(a.seed_eps > 0.0)) throw ArgumentError("--seed-eps must be positive (zero seed rejected)");
    std::optional<ModelSystem> model;
    std::optional<SystemSpec> spec;
    if (!a.model.empty()) {
        const auto v = parse_list(a.model, "--model");
        if (v.size() != 2 || v[0] < 0 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]))
            throw ArgumentError("--model expects N,J with integers N >= 0 and odd J");
        model = model_system(static_cast<std::size_t>(v[0]), static_cast<int>(v[1]));
    } else if (!a.spec.empty()) {
        spec = load_system_spec(a.spec);
    } else {
        throw ArgumentError("simulate needs a system spec or --model");
    }

    if (spec && a.gene_coordinates) {
        const auto* net = std::get_if<GeneNetwork>(&*spec);
        if (!net) throw ArgumentError("--gene-coordinates requires a gene spec");
        const auto eq = equilibrium_gene(*net);
        const double eps = std::isnan(a.seed_eps) ? 0.01 : a.seed_eps;
        std::vector<double> start;
        for (std::size_t i = 0; i < net->size(); ++i) {
            start.push_back(eq.r[i] * (1.0 + eps));
            start.push_back(eq.p[i] * (1.0 + eps));
        }
        const auto gt = integrate_gene(*net, GeneInitial::constant(start), a.t_end, a.m);
        Output out(a.out);
        write_gene_trajectory_csv(out.stream(), gt);
        return 0;
    }

    const CyclicSystem sys = model ? model->system : as_cyclic(*spec);
    SystemState init;
    if (!a.initial.empty()) {
        std::ifstream in(a.initial);
        if (!in) throw ArgumentError("cannot open '" + a.initial + "'");
        json j;
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw ArgumentError(std::string("malformed initial state JSON: ") + e.what());
        }
        init = parse_initial_state(j, sys.tau()).resampled(a.m);
    } else if (a.random_initial) {
        std::mt19937_64 rng(a.rng_seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        double amp[3], phase[3];
        for (int k = 0; k < 3; ++k) {
            amp[k] = U(rng);
            phase[k] = 3.14159 * U(rng);
        }
        const double offset = U(rng);
        const double tau = sys.tau();
        std::vector<double> tail;
        for (std::size_t i = 1; i < sys.dimension(); ++i) tail.push_back(U(rng));
        init = SystemState::from_function(
            tau, a.m,
            [&](double th) {
                double v = offset;
                for (int k = 0; k < 3; ++k) v += amp[k] * std::sin((k + 1) * 3.14159 * th / tau + phase[k]);
                return v;
            },
            [&](double th) {
                double v = 0.0;
                for (int k = 0; k < 3; ++k)
                    v += amp[k] * (k + 1) * 3.14159 / tau * std::cos((k + 1) * 3.14159 * th / tau + phase[k]);
                return v;
            },
            std::move(tail));
    } else if (!std::isnan(a.seed_eps)) {
        init = leading_seed(sys, a.seed_eps, a.m);
    } else if (model) {
        init = model->exact_state(0.0, a.m);
    } else {
        throw ArgumentError("simulate needs --seed-eps, --initial or --random-initial");
    }
    const Trajectory tr = integrate(sys, init, a.t_end, a.m);
    {
        Output out(a.out);
        write_trajectory_csv(out.stream(), tr);
    }
    if (!a.v_out.empty()) {
        Output vout(a.v_out);
        write_v_series_csv(vout.stream(), v_series(tr, a.sample_dt));
    }
    return 0;
}

// ---------------------------------------------------------------- orbit

struct OrbitArgs {
    std::string spec;
    OrbitOptions opts;
    double eps_rel = 1e-3;
    std::string out;
    std::string samples_out;
};

int cmd_orbit(const OrbitArgs& a) {
    const SystemSpec spec = load_system_spec(a.spec);
    json j;
    OrbitReport rep;
    if (const auto* u = std::get_if<UnidirectionalSystem>(&spec)) {
        const auto res = find_orbit(*u, a.opts, a.eps_rel);
        rep = res.orbit;
        j = to_json(rep);
        j["a1"] = a1_json(res.a1);
        j["box"] = res.box ? to_json(*res.box) : json(nullptr);
    } else if (const auto* g = std::get_if<GeneNetwork>(&spec)) {
        const auto tr = to_unidirectional(*g);
        const auto res = find_orbit(tr.system, a.opts, a.eps_rel);
        rep = res.orbit;
        j = to_json(rep);
        j["a1"] = a1_json(res.a1);
        j["box"] = res.box ? to_json(*res.box) : json(nullptr);
        j["transform"] = transform_json(tr);
        j["gene_period"] = rep.converged ? json(rep.period * tr.total_delay) : json(nullptr);
        j["gene_bounds"] = rep.converged ? orbit_bounds_json(tr, *g, rep) : json(nullptr);
    } else {
        const auto& sys = std::get<CyclicSystem>(spec);
        const A1Report a1 = verify_a1(CharFunction::of(sys));
        const SystemState seed = seed_on_eigenspace(sys, a1, a.eps_rel, a.opts.m);
        rep = detect_cycle(sys, seed, PlaneProjector::spectral(SpectralProjection(sys.linearization(), a1.lambda)),
                           a.opts);
        j = to_json(rep);
        j["a1"] = a1_json(a1);
        j["box"] = nullptr;
    }
    print_json(j, a.out);
    if (!a.samples_out.empty()) {
        Output out(a.samples_out);
        write_orbit_csv(out.stream(), rep);
    }
    return 0;
}

// ---------------------------------------------------------------- box

int cmd_box(const std::string& path, const std::string& out) {
    const SystemSpec spec = load_system_spec(path);
    if (const auto* u = std::get_if<UnidirectionalSystem>(&spec)) {
        print_json(to_json(attractor_box(*u)), out);
    } else if (const auto* g = std::get_if<GeneNetwork>(&spec)) {
        print_json(to_json(attractor_box(to_unidirectional(*g).system)), out);
    } else {
        throw ArgumentError("box: attractor boxes are only available for unidirectional and gene systems");
    }
    return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string spec;
    std::string param = "K";
    std::string grid;
    bool no_orbit = false;
    std::size_t m = 128;
    std::string out;
};

int cmd_sweep(const SweepArgs& a) {
    const SystemSpec spec = load_system_spec(a.spec);
    auto values = parse_list(a.grid, "--grid");
    if (values.empty()) throw ArgumentError("--grid needs at least one value");
    std::sort(values.begin(), values.end());
    if (a.param != "K" && a.param != "T") throw ArgumentError("--param must be K or T");
    Output out(a.out);
    auto& os = out.stream();
    os << "param,value,sigma0,omega,K,K_u,K_c,a1_holds,period\n";
    for (double v : values) {
        UnidirectionalSystem sys;
        if (const auto* u = std::get_if<UnidirectionalSystem>(&spec)) {
            if (a.param == "K")
                sys = u->with_loop_gain(v);
            else
                sys = UnidirectionalSystem(u->mu(), u->g(), v);
        } else if (const auto* g = std::get_if<GeneNetwork>(&spec)) {
            if (a.param != "T") throw ArgumentError("gene sweeps support --param T only");
            GeneNetwork net = *g;
            const double scale = v / net.total_delay();
            for (auto& d : net.tau_p) d *= scale;
            for (auto& d : net.tau_r) d *= scale;
            sys = to_unidirectional(net).system;
        } else {
            throw ArgumentError("sweep supports unidirectional and gene systems");
        }
        const A1Report a1 = verify_a1(CharFunction::of(sys));
        std::string period;
        if (!a.no_orbit && a1.holds) {
            OrbitOptions o;
            o.m = a.m;
            const auto res = find_orbit(sys, o);
            if (res.orbit.converged) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", res.orbit.period);
                period = buf;
            }
        }
        char line[512];
        const auto& sr = a1.spectrum;
        std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,", a.param.c_str(), v, a1.sigma0,
                      a1.omega, sys.loop_gain(), sr.K_u.value_or(std::nan("")), sr.K_c.value_or(std::nan("")),
                      a1.holds ? 1 : 0);
        os << line << period << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- repressilator

struct RepressilatorArgs {
    double T = 1.0;
    double nu = 2.0;
    double beta = 1.0;
    double c = 1.0;
    bool no_orbit = false;
    std::size_t m = 128;
    std::string out;
};

int cmd_repressilator(const RepressilatorArgs& a) {
    const GeneNetwork net = repressilator_preset(a.T, a.nu, a.beta, a.c);
    const GeneTransform tr = to_unidirectional(net);
    const FeedbackReport fb = validate_feedback(tr.system);
    const A1Report a1 = verify_a1(CharFunction::of(tr.system));
    json j;
    j["network"] = to_json(net);
    j["transform"] = transform_json(tr);
    j["feedback"] = to_json(fb);
    j["spectrum"] = to_json(a1.spectrum);
    j["a1"] = a1_json(a1);
    j["K_over_K_u"] = a1.spectrum.K_u ? json(tr.K / *a1.spectrum.K_u) : json(nullptr);
    if (!a.no_orbit && a1.holds) {
        OrbitOptions o;
        o.m = a.m;
        const auto res = find_orbit(tr.system, o);
        j["orbit"] = to_json(res.orbit);
        j["gene_period"] = res.orbit.converged ? json(res.orbit.period * tr.total_delay) : json(nullptr);
        j["gene_bounds"] = res.orbit.converged ? orbit_bounds_json(tr, net, res.orbit) : json(nullptr);
    } else {
        j["orbit"] = nullptr;
    }
    print_json(j, a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cyclic negative-feedback delay systems: spectra, borders, boxes and periodic orbits"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Feedback signs, characteristic roots, K_u, K_c and the leading pair");
    analyze->add_option("spec", an.spec, "System spec JSON file")->required();
    analyze->add_option("--window", an.window, "Root search window re_lo,re_hi,im_lo,im_hi");
    analyze->add_option("--margin", an.margin, "Leading-pair check covers Re >= -margin");
    analyze->add_option("-o,--out", an.out, "Output file (default stdout)");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Integrate and write the trajectory CSV (and V series)");
    simulate->add_option("spec", sim.spec, "System spec JSON file");
    simulate->add_option("--model", sim.model, "Built-in linear model system N,J with exact cosine solution");
    simulate->add_option("--t-end", sim.t_end, "Final time");
    simulate->add_option("--m", sim.m, "Steps per delay interval");
    simulate->add_option("--seed-eps", sim.seed_eps, "Start from eps times the leading eigenfunction");
    simulate->add_option("--initial", sim.initial, "Initial state JSON {\"history\": [...], \"tail\": [...]}");
    simulate->add_flag("--random-initial", sim.random_initial, "Random smooth initial state");
    simulate->add_option("--rng-seed", sim.rng_seed, "Seed for --random-initial");
    simulate->add_flag("--gene-coordinates", sim.gene_coordinates, "Simulate a gene spec in r,p coordinates");
    simulate->add_option("--sample-dt", sim.sample_dt, "V series sampling step");
    simulate->add_option("-o,--out", sim.out, "Trajectory CSV (default stdout)");
    simulate->add_option("--v-out", sim.v_out, "V series CSV");

    OrbitArgs orb;
    auto* orbit = app.add_subcommand("orbit", "Detect the periodic orbit from an eigenspace seed");
    orbit->add_option("spec", orb.spec, "System spec JSON file")->required();
    orbit->add_option("--m", orb.opts.m, "Steps per delay interval");
    orbit->add_option("--eps-rel", orb.eps_rel, "Seed size relative to the box radius");
    orbit->add_option("--horizon", orb.opts.horizon, "Initial horizon in delay intervals");
    orbit->add_option("--max-horizon", orb.opts.max_horizon, "Largest horizon in delay intervals");
    orbit->add_option("--tol-rel", orb.opts.tol_rel, "Radius agreement of consecutive crossings");
    orbit->add_option("--tol-T", orb.opts.tol_T, "Return time agreement relative to the period");
    orbit->add_option("-o,--out", orb.out, "Output file (default stdout)");
    orbit->add_option("--samples-out", orb.samples_out, "Orbit samples CSV phase,t,x0,...");

    std::string box_spec, box_out;
    auto* box = app.add_subcommand("box", "Attracting invariant box");
    box->add_option("spec", box_spec, "System spec JSON file")->required();
    box->add_option("-o,--out", box_out, "Output file (default stdout)");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Per-point spectrum and orbit summary over a parameter grid");
    sweep->add_option("spec", sw.spec, "System spec JSON file")->required();
    sweep->add_option("--param", sw.param, "K (loop gain) or T (total delay)");
    sweep->add_option("--grid", sw.grid, "Comma separated parameter values")->required();
    sweep->add_flag("--no-orbit", sw.no_orbit, "Skip orbit detection");
    sweep->add_option("--m", sw.m, "Steps per delay interval for orbit detection");
    sweep->add_option("-o,--out", sw.out, "Output CSV (default stdout)");

    RepressilatorArgs rep;
    auto* repr = app.add_subcommand("repressilator", "Symmetric three-gene repression loop report");
    repr->add_option("--T", rep.T, "Total loop delay")->required();
    repr->add_option("--nu", rep.nu, "Hill exponent");
    repr->add_option("--beta", rep.beta, "Maximal transcription rate");
    repr->add_option("--c", rep.c, "Translation rate");
    repr->add_flag("--no-orbit", rep.no_orbit, "Skip orbit detection");
    repr->add_option("--m", rep.m, "Steps per delay interval");
    repr->add_option("-o,--out", rep.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*analyze) return cmd_analyze(an);
        if (*simulate) return cmd_simulate(sim);
        if (*orbit) return cmd_orbit(orb);
        if (*box) return cmd_box(box_spec, box_out);
        if (*sweep) return cmd_sweep(sw);
        if (*repr) return cmd_repressilator(rep);
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
