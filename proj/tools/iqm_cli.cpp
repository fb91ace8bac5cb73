#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "iqm/flow.hpp"
#include "iqm/hyperfine.hpp"
#include "iqm/io.hpp"
#include "iqm/numerics.hpp"
#include "iqm/toroid.hpp"
#include "iqm/tracker.hpp"

namespace fs = std::filesystem;
using namespace iqm;

namespace {

constexpr double kPi = std::numbers::pi;

// exit codes
constexpr int kSuiteFailed = 1;
constexpr int kInvalid = 2;
constexpr int kNumerical = 3;

enum class Level { error, warn, info, debug };

Level log_level() {
    const char* env = std::getenv("IQM_LOG_LEVEL");
    const std::string s = env ? env : "warn";
    if (s == "error") return Level::error;
    if (s == "info") return Level::info;
    if (s == "debug") return Level::debug;
    return Level::warn;
}

void log(Level l, const std::string& msg) {
    static const Level threshold = log_level();
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (l <= threshold) std::cerr << "[" << names[static_cast<int>(l)] << "] " << msg << '\n';
}

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "iqm_out";
    std::optional<double> tol;
    std::optional<std::string> mode;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "scenario JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "RNG seed");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--tol", c.tol, "integration / location tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--mode", c.mode, "evolution mode")->check(CLI::IsMember({"ode", "svd"}));
}

void write_json(const fs::path& p, const json& j) { write_text_file(p, j.dump(2) + "\n"); }

template <class F>
std::string to_text(F&& f) {
    std::ostringstream os;
    f(os);
    return os.str();
}

Scenario load_scenario(const Common& c) {
    Scenario s;
    if (!c.config.empty()) {
        const fs::path p(c.config);
        s = scenario_from_json(read_json_file(p), p.parent_path());
    }
    if (c.seed) s.seed = *c.seed;
    if (c.tol) s.tol = *c.tol;
    if (c.mode) s.mode = flow_mode_from_string(*c.mode);
    return s;
}

// ---- simulate -------------------------------------------------------------

int run_simulate(const Common& c) {
    const Scenario s = load_scenario(c);
    const StateVector gamma = scenario_state(s);
    const HamiltonianSpec h = scenario_hamiltonian(s);
    const PolarFrame f0 = scenario_frame(s, gamma);
    const auto times = linspace(s.t0, s.t1, s.samples);
    log(Level::info, "simulate " + s.name + ": " + std::to_string(s.samples) + " samples, mode " + to_string(s.mode));

    EvolveOptions eo;
    eo.mode = s.mode;
    eo.tol = s.tol;
    const PolarTrajectory tr = evolve_polar(gamma, f0, h, times, eo);
    TrackOptions to;
    const LabelTimeline tl = track_labels(tr, to);

    const fs::path out(c.out);
    write_text_file(out / "trajectory.csv", to_text([&](std::ostream& os) { write_trajectory_csv(os, tr); }));
    write_text_file(out / "jumps.jsonl", to_text([&](std::ostream& os) { write_jumps_jsonl(os, tl.jumps); }));
    write_text_file(out / "labels.csv", to_text([&](std::ostream& os) { write_label_timeline_csv(os, tl); }));

    double norm_dev = 0.0, radii_sum_dev = 0.0, radii_drift = 0.0;
    for (size_t i = 0; i < times.size(); ++i) {
        norm_dev = std::max(norm_dev, std::abs(tr.gammas[i].amplitudes().norm() - 1.0));
        radii_sum_dev = std::max(radii_sum_dev, std::abs(tr.frames[i].radii().squaredNorm() - 1.0));
        radii_drift = std::max(radii_drift, (tr.frames[i].radii() - f0.radii()).cwiseAbs().maxCoeff());
    }
    const int m = f0.size();
    std::vector<long> counts(m, 0);
    long boundary = 0, degenerate = 0;
    for (size_t i = 0; i < times.size(); ++i) {
        if (tl.labels[i] >= 0) ++counts[tl.labels[i]];
        boundary += tl.on_boundary[i];
        degenerate += tl.degenerate[i];
    }
    json summary = {
        {"command", "simulate"},
        {"scenario", scenario_to_json(s)},
        {"seed", s.seed},
        {"mode", to_string(s.mode)},
        {"tolerances",
         {{"tol", s.tol},
          {"degeneracy_floor", eo.degeneracy_floor},
          {"boundary_tol", to.boundary_tol},
          {"distinct_tol", to.distinct_tol},
          {"jump_time_tol", to.time_tol},
          {"bridge_samples", to.bridge_samples},
          {"bridge_time", to.bridge_time}}},
        {"samples", times.size()},
        {"jump_count", tl.jumps.size()},
        {"initial_label", tl.labels.front()},
        {"final_label", tl.labels.back()},
        {"label_counts", counts},
        {"boundary_samples", boundary},
        {"degenerate_samples", degenerate},
        {"bridged_degeneracies", tl.bridged.size()},
        {"permanent_degeneracy", tl.permanent_degeneracy},
        {"residuals",
         {{"max_reconstruct", tr.max_reconstruct_residual},
          {"max_norm_deviation", norm_dev},
          {"max_radii_sum_deviation", radii_sum_dev},
          {"max_radii_drift", radii_drift}}},
    };
    write_json(out / "summary.json", summary);
    std::cout << "simulate " << s.name << ": " << tl.jumps.size() << " jumps, final label " << tl.labels.back()
              << ", outputs in " << out.string() << '\n';
    return 0;
}

// ---- partition --------------------------------------------------------------

struct PartitionArgs {
    std::vector<double> radii;
    std::vector<std::string> queries;  // comma separated phases
    std::vector<std::string> suites;
    long samples = 0;
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ValidationError("not a number: \"" + item + "\"");
        }
    }
    return v;
}

int run_partition(const Common& c, PartitionArgs a) {
    json cfg = json::object();
    if (!c.config.empty()) cfg = read_json_file(c.config);
    if (cfg.contains("schema_version") && cfg.at("schema_version") != kScenarioSchemaVersion)
        throw ValidationError("unsupported partition schema_version");
    if (a.radii.empty()) {
        // golden-ratio pair by default
        const double phi = 0.5 * (1.0 + std::sqrt(5.0));
        a.radii = cfg.value("radii", std::vector<double>{phi / std::sqrt(1.0 + phi * phi), 1.0 / std::sqrt(1.0 + phi * phi)});
    }
    std::vector<std::vector<double>> queries;
    for (const auto& q : cfg.value("queries", std::vector<std::vector<double>>{})) queries.push_back(q);
    for (const auto& q : a.queries) queries.push_back(parse_list(q));
    if (a.suites.empty()) a.suites = cfg.value("suites", std::vector<std::string>{});
    if (a.samples == 0) a.samples = cfg.value("samples", 100000L);
    const std::uint64_t seed = c.seed.value_or(cfg.value("seed", std::uint64_t{1}));
    const double tol = c.tol.value_or(cfg.value("tol", 1e-9));
    if (a.samples < 1) throw ValidationError("samples must be positive");

    const RightToroid t(a.radii);
    const int n = t.n();
    const fs::path out(c.out);
    fs::create_directories(out);

    json answers = json::array();
    for (const auto& q : queries) {
        if (static_cast<int>(q.size()) != n) throw DimensionError("query needs one phase per radius");
        RVec arc(n);
        for (int k = 0; k < n; ++k) arc(k) = t.radius(k) * q[k];
        const LocateDetail d = locate_detail(make_point(t, arc), t);
        answers.push_back({{"phases", q}, {"label", d.label.k}, {"on_boundary", d.label.on_boundary}, {"tau", d.tau}});
    }

    bool all_pass = true;
    json suites = json::object();
    for (const std::string& name : a.suites) {
        json r;
        bool pass = false;
        if (name == "diagonal") {
            double worst = 0.0;
            for (int i = 0; i < 16; ++i) {
                RVec base(n);
                for (int k = 0; k < n; ++k)
                    base(k) = counter_uniform(seed, static_cast<std::uint64_t>(i * n + k)) * t.side(k);
                const DiagonalArcs d = diagonal_arcs(t, make_point(t, base));
                for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(d.lengths(k) - 2.0 * kPi * t.weights()[k]));
            }
            pass = worst <= tol;
            r = {{"base_points", 16}, {"max_error", worst}, {"tol", tol}};
        } else if (name == "volume") {
            constexpr double sigmas = 4.0;
            const MeasureEstimate m = part_measures(t, a.samples, seed);
            double worst = 0.0;
            for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(m.fraction(k) - t.weights()[k]) / m.sigma(k));
            pass = worst <= sigmas;
            r = {{"samples", m.samples}, {"fractions", std::vector<double>(m.fraction.begin(), m.fraction.end())},
                 {"max_sigma", worst}, {"sigma_limit", sigmas}, {"boundary_hits", m.boundary_hits}};
        } else if (name == "naturality") {
            long violations = 0;
            const long per_axis = std::min(a.samples, 10000L);
            for (int axis = 0; axis < n && n >= 2; ++axis) {
                const NaturalityReport nr = check_naturality(t, axis, per_axis, seed + static_cast<std::uint64_t>(axis));
                violations += nr.violations + nr.limit_violations;
            }
            pass = violations == 0;
            r = {{"samples_per_axis", per_axis}, {"violations", violations}};
        } else if (name == "convexity") {
            if (n > 3) throw ValidationError("convexity suite supports n <= 3");
            json parts = json::array();
            pass = true;
            for (int k = 0; k < n; ++k) {
                const ConvexityReport cr = check_convexity(t, k, std::min(a.samples, 2000L), seed + static_cast<std::uint64_t>(k));
                pass = pass && cr.ok();
                parts.push_back({{"k", k}, {"facets_ok", cr.facets_ok}, {"chords_ok", cr.chords_ok},
                                 {"label_mismatches", cr.label_mismatches}});
            }
            r = {{"parts", parts}};
        } else {
            throw ValidationError("unknown suite \"" + name + "\" (diagonal, volume, naturality, convexity)");
        }
        r["pass"] = pass;
        suites[name] = r;
        all_pass = all_pass && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << name << '\n';
    }

    json exports = json::array();
    if (n == 2) {
        write_text_file(out / "tiling.svg", tiling_svg(t));
        exports.push_back("tiling.svg");
    } else if (n == 3) {
        write_text_file(out / "tiling.obj", tiling_obj(t));
        exports.push_back("tiling.obj");
    }

    write_json(out / "partition.json", {{"radii", a.radii}, {"weights", t.weights()}, {"queries", answers}});
    write_json(out / "summary.json", {{"command", "partition"},
                                      {"seed", seed},
                                      {"tolerances", {{"diagonal", tol}, {"boundary_tol", kBoundaryTol}}},
                                      {"samples", a.samples},
                                      {"suites", suites},
                                      {"exports", exports},
                                      {"pass", all_pass}});
    for (const auto& q : answers) std::cout << "label " << q.at("label") << (q.at("on_boundary") ? " (boundary)" : "") << '\n';
    return all_pass ? 0 : kSuiteFailed;
}

// ---- hyperfine --------------------------------------------------------------

int run_hyperfine(const Common& c) {
    Scenario s;
    s.t1 = 10.0 * kPi / 4.0;  // wt in [0, 10 pi] at mu = 1
    s.samples = 1001;
    if (!c.config.empty()) s = scenario_from_json(read_json_file(c.config), fs::path(c.config).parent_path());
    if (c.tol) s.tol = *c.tol;
    if (c.mode) s.mode = flow_mode_from_string(*c.mode);
    const HyperfineParams p(s.mu, s.theta, s.q_plus0);
    const auto times = linspace(s.t0, s.t1, s.samples);
    constexpr double check_tol = 1e-6;

    EvolveOptions eo;
    eo.mode = s.mode;
    eo.tol = s.tol;
    const PolarTrajectory tr = evolve_polar(hyperfine_gamma(p, s.t0), closed_form_frame(p, s.t0),
                                            HamiltonianSpec::constant(hyperfine_hamiltonian(p.mu)), times, eo);

    std::ostringstream csv;
    csv << "t,re_q_plus,im_q_plus,re_q_minus,im_q_minus,tau_plus,tau_minus,x,y,z,label\n" << std::setprecision(17);
    double worst = 0.0;
    long plus_late = 0, late = 0;
    for (size_t i = 0; i < times.size(); ++i) {
        const HyperfineClosedForm cf = hyperfine_closed_form(p, times[i]);
        const BlochPair b = bloch_trajectory(p, times[i]);
        const SignResult sg = label_sign_amplitudes(cf.frame.q(0), cf.frame.q(1));
        worst = std::max(worst, (tr.frames[i].q - cf.frame.q).norm());
        const char label = sg.on_boundary ? '0' : (sg.sign > 0 ? '+' : '-');
        if (p.omega() * times[i] >= 3.0 * kPi) {
            ++late;
            plus_late += label == '+';
        }
        csv << times[i] << ',' << cf.frame.q(0).real() << ',' << cf.frame.q(0).imag() << ',' << cf.frame.q(1).real()
            << ',' << cf.frame.q(1).imag() << ',' << cf.tau_plus << ',' << cf.tau_minus << ',' << b.electron[0] << ','
            << b.electron[1] << ',' << b.electron[2] << ',' << label << '\n';
    }
    const fs::path out(c.out);
    fs::create_directories(out);
    write_text_file(out / "hyperfine.csv", csv.str());
    const bool pass = worst <= check_tol;
    write_json(out / "summary.json",
               {{"command", "hyperfine"},
                {"params", {{"mu", p.mu}, {"theta", p.theta}, {"q_plus0", p.q_plus0}, {"e", p.e()}, {"omega", p.omega()}}},
                {"mode", to_string(s.mode)},
                {"seed", s.seed},
                {"tolerances", {{"tol", s.tol}, {"closed_form_check", check_tol}, {"boundary_tol", kBoundaryTol}}},
                {"samples", times.size()},
                {"max_closed_form_deviation", worst},
                {"plus_fraction_wt_from_3pi", late ? double(plus_late) / double(late) : 0.0},
                {"pass", pass}});
    std::cout << "hyperfine: max |q_numeric - q_closed| = " << worst << (pass ? " (ok)" : " (FAIL)") << ", '+' on "
              << plus_late << " of " << late << " samples with wt >= 3pi\n";
    return pass ? 0 : kSuiteFailed;
}

// ---- epr-demo -----------------------------------------------------------------

int run_epr(const Common& c) {
    // Gamma = sum_i y_i alpha_i (x) beta_i (x) gamma_i on C^2 (x) C^3 (x) C^3,
    // alpha_i photon states (not orthogonal), beta_i and gamma_i orthonormal
    const std::uint64_t seed = c.seed.value_or(7);
    Rng rng(seed);
    const Mat bu = random_unitary(3, rng), gu = random_unitary(3, rng);
    std::vector<Vec> alpha;
    for (int i = 0; i < 3; ++i) alpha.push_back(random_unit_vector(2, rng));
    const std::vector<double> y = {std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)};
    Vec gamma = Vec::Zero(18);
    for (int i = 0; i < 3; ++i) gamma += y[i] * product_vector(product_vector(alpha[i], bu.col(i)), gu.col(i));
    const std::vector<int> dims{2, 3, 3};

    const StateVector whole(BipartiteSpace(1, 18), gamma);
    const PolarFrame f1 = polar_decompose(rebipartition(whole, dims, {0, 1}));
    const RightToroid t1 = RightToroid::from_amplitudes(f1.q);
    Mat mixture = Mat::Zero(2, 2);
    for (int i = 0; i < 3; ++i) mixture += y[i] * y[i] * alpha[i] * alpha[i].adjoint();
    const Mat photon = reduced_trace(rebipartition(whole, dims, {0}), 1).matrix();

    std::cout << "stage 1: cut (photon + atom | detector), radii";
    for (int k = 0; k < t1.n(); ++k) std::cout << ' ' << t1.radius(k);
    std::cout << '\n';

    json runs = json::array();
    for (int k = 0; k < t1.n(); ++k) {
        RVec arc = RVec::Zero(t1.n());
        arc(k) = 0.05 * t1.side(k) * t1.weights()[k];  // on the generating circle C_k
        const ConditionalState st = iterate_conditional(gamma, dims, {{0, 1}, {0}}, {make_point(t1, arc), std::nullopt});
        std::vector<double> overlaps;
        for (const Vec& a : alpha) overlaps.push_back(std::abs(st.ray.dot(a)));
        json prov = json::array();
        for (const auto& step : st.provenance)
            prov.push_back({{"system", step.system}, {"subsystem", step.subsystem}, {"k", step.k},
                            {"on_boundary", step.on_boundary}});
        runs.push_back({{"point_on_circle", k}, {"overlaps_with_alpha", overlaps}, {"provenance", prov}});
        std::cout << "point on C_" << k << ": stage-1 label " << st.provenance[0].k << ", photon ray overlaps";
        for (double o : overlaps) std::cout << ' ' << o;
        std::cout << '\n';
    }
    const double mix_res = (photon - mixture).norm();
    std::cout << "photon density vs sum y_i^2 |alpha_i><alpha_i|: residual " << mix_res << '\n';

    const fs::path out(c.out);
    fs::create_directories(out);
    write_json(out / "epr.json", {{"weights", {0.5, 0.3, 0.2}}, {"runs", runs}, {"mixture_residual", mix_res}});
    write_json(out / "summary.json", {{"command", "epr-demo"}, {"seed", seed}, {"tolerances", {{"product_tol", 1e-8}}},
                                      {"mixture_residual", mix_res}});
    return 0;
}

void emit_error(const Common& c, const Error& e) {
    json j = {{"error", {{"kind", e.kind()}, {"message", e.what()}}}};
    if (const auto* d = dynamic_cast<const DegenerateError*>(&e)) j["error"]["t"] = d->time;
    if (const auto* d = dynamic_cast<const IntegrationError*>(&e)) j["error"]["t"] = d->time;
    std::cerr << j.dump() << '\n';
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (!ec) std::ofstream(fs::path(c.out) / "error.json") << j.dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polar-decomposition dynamics, toroid partitions and conditional spectral states"};
    app.require_subcommand(1);
    Common common;
    PartitionArgs part;

    auto* sim = app.add_subcommand("simulate", "evolve a scenario and track its label");
    add_common(sim, common);
    auto* prt = app.add_subcommand("partition", "locate points and run partition suites");
    add_common(prt, common);
    prt->add_option("--radii", part.radii, "toroid radii")->delimiter(',');
    prt->add_option("--query", part.queries, "phases theta_k, comma separated (repeatable)");
    prt->add_option("--suite", part.suites, "diagonal, volume, naturality or convexity (repeatable)");
    prt->add_option("--samples", part.samples, "Monte Carlo samples");
    auto* hyp = app.add_subcommand("hyperfine", "closed-form hyperfine dump and numerical cross-check");
    add_common(hyp, common);
    auto* epr = app.add_subcommand("epr-demo", "three-factor iterated conditioning walkthrough");
    add_common(epr, common);

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(common.out);
        if (sim->parsed()) return run_simulate(common);
        if (prt->parsed()) return run_partition(common, part);
        if (hyp->parsed()) return run_hyperfine(common);
        return run_epr(common);
    } catch (const Error& e) {
        emit_error(common, e);
        return e.kind() == "validation" || e.kind() == "dimension" ? kInvalid : kNumerical;
    } catch (const json::exception& e) {
        emit_error(common, ValidationError(std::string("malformed JSON value: ") + e.what()));
        return kInvalid;
    } catch (const std::filesystem::filesystem_error& e) {
        emit_error(common, ValidationError(e.what()));
        return kInvalid;
    }
}
