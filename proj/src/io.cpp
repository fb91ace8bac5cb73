#include "iqm/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "iqm/hyperfine.hpp"
#include "iqm/numerics.hpp"

namespace iqm {

namespace {

json real_rows(const Mat& m, bool imag) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
        rows.push_back(row);
    }
    return rows;
}

Mat parse_rows(const json& re, const json& im) {
    if (!re.is_array() || re.empty()) throw ValidationError("matrix needs a non-empty \"re\" array");
    const auto rows = static_cast<Eigen::Index>(re.size());
    const auto cols = static_cast<Eigen::Index>(re[0].size());
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(re[i].size()) != cols) throw ValidationError("ragged matrix rows");
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double b = im.is_null() ? 0.0 : im.at(i).at(j).get<double>();
            m(i, j) = cplx(re[i][j].get<double>(), b);
        }
    }
    return m;
}

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("missing key \"") + key + "\"");
    return j.at(key);
}

std::filesystem::path resolve(const Scenario& s, const std::string& f) {
    std::filesystem::path p(f);
    return p.is_absolute() || s.base_dir.empty() ? p : s.base_dir / p;
}

} // namespace

json matrix_to_json(const Mat& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", real_rows(m, false)}, {"im", real_rows(m, true)}};
}

Mat matrix_from_json(const json& j) {
    return parse_rows(require(j, "re"), j.contains("im") ? j.at("im") : json());
}

json state_to_json(const StateVector& s) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
        re.push_back(s.amplitudes()(i).real());
        im.push_back(s.amplitudes()(i).imag());
    }
    return {{"n1", s.space().n1}, {"n2", s.space().n2}, {"re", re}, {"im", im}};
}

StateVector state_from_json(const json& j) {
    const int n1 = require(j, "n1").get<int>(), n2 = require(j, "n2").get<int>();
    const json& re = require(j, "re");
    const json im = j.contains("im") ? j.at("im") : json();
    if (!re.is_array()) throw ValidationError("state \"re\" must be an array");
    Vec a(re.size());
    for (size_t i = 0; i < re.size(); ++i) a(i) = cplx(re[i].get<double>(), im.is_null() ? 0.0 : im.at(i).get<double>());
    return StateVector(BipartiteSpace(n1, n2), a);
}

json density_to_json(const DensityOperator& d) { return matrix_to_json(d.matrix()); }

DensityOperator density_from_json(const json& j) { return DensityOperator(matrix_from_json(j)); }

json hamiltonian_to_json(const HamiltonianSpec& h) {
    json j;
    if (h.split()) {
        const auto& s = *h.split();
        j = {{"n1", s.n1}, {"n2", s.n2}, {"h0", matrix_to_json(s.h0)}, {"h1", matrix_to_json(s.h1)},
             {"h2", matrix_to_json(s.h2)}};
    } else {
        j = matrix_to_json(h.static_part());
        j["dim"] = h.dim();
    }
    if (h.drive()) {
        const auto& d = *h.drive();
        j["drive"] = matrix_to_json(d.h);
        j["drive"]["family"] = "sinusoidal";
        j["drive"]["omega"] = d.omega;
        j["drive"]["phase"] = d.phase;
    }
    return j;
}

HamiltonianSpec hamiltonian_from_json(const json& j) {
    if (j.contains("h0")) {
        HamiltonianSplit s;
        s.n1 = require(j, "n1").get<int>();
        s.n2 = require(j, "n2").get<int>();
        s.h0 = matrix_from_json(j.at("h0"));
        s.h1 = matrix_from_json(require(j, "h1"));
        s.h2 = matrix_from_json(require(j, "h2"));
        if (j.contains("drive")) throw ValidationError("a drive cannot be combined with a split Hamiltonian");
        return HamiltonianSpec::from_split(s);
    }
    const Mat h = matrix_from_json(j);
    if (j.contains("dim") && j.at("dim").get<int>() != h.rows())
        throw DimensionError("Hamiltonian \"dim\" disagrees with its matrix");
    if (!j.contains("drive")) return HamiltonianSpec::constant(h);
    const json& d = j.at("drive");
    const std::string family = d.value("family", "sinusoidal");
    if (family != "sinusoidal") throw ValidationError("unknown drive family \"" + family + "\"");
    return HamiltonianSpec::sinusoidal(h, matrix_from_json(d), require(d, "omega").get<double>(),
                                       d.value("phase", 0.0));
}

json read_json_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ValidationError("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(p.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + p.string());
    out << text;
}

void write_trajectory_csv(std::ostream& os, const PolarTrajectory& traj) {
    const int m = traj.frames.empty() ? 0 : traj.frames[0].size();
    os << "t";
    for (int k = 0; k < m; ++k) os << ",r" << k << ",arg" << k << ",energy" << k;
    os << '\n' << std::setprecision(17);
    for (size_t i = 0; i < traj.times.size(); ++i) {
        os << traj.times[i];
        for (int k = 0; k < m; ++k) {
            const cplx q = traj.frames[i].q(k);
            os << ',' << std::abs(q) << ',' << std::arg(q) << ','
               << (traj.energy_phase.empty() ? 0.0 : traj.energy_phase[i](k));
        }
        os << '\n';
    }
}

void write_jumps_jsonl(std::ostream& os, const std::vector<JumpEvent>& jumps) {
    for (const auto& e : jumps)
        os << json{{"t", e.t}, {"from", e.from_k}, {"to", e.to_k}, {"boundary_kind", e.boundary_kind}}.dump()
           << '\n';
}

void write_label_timeline_csv(std::ostream& os, const LabelTimeline& tl) {
    os << "t,label,on_boundary,degenerate\n" << std::setprecision(17);
    for (size_t i = 0; i < tl.times.size(); ++i)
        os << tl.times[i] << ',' << tl.labels[i] << ',' << int(tl.on_boundary[i]) << ',' << int(tl.degenerate[i])
           << '\n';
}

void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    for (size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw DimensionError("row width differs from header");
        for (size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
        os << '\n';
    }
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
    Scenario s;
    s.base_dir = base_dir;
    s.schema_version = j.value("schema_version", 0);
    if (s.schema_version != kScenarioSchemaVersion)
        throw ValidationError("unsupported scenario schema_version " + std::to_string(s.schema_version));
    s.name = j.value("name", s.name);
    if (j.contains("space")) {
        const json& sp = j.at("space");
        s.n1 = sp.value("n1", s.n1);
        s.n2 = sp.value("n2", s.n2);
    }
    if (j.contains("state")) {
        const json& st = j.at("state");
        s.state = st.value("preset", s.state);
        s.theta = st.value("theta", s.theta);
        s.q_plus0 = st.value("q_plus0", s.q_plus0);
        s.state_file = st.value("file", s.state_file);
        if (st.contains("phases")) s.initial_phases = st.at("phases").get<std::vector<double>>();
        if (!s.state_file.empty()) s.state = "file";
    }
    if (j.contains("hamiltonian")) {
        const json& h = j.at("hamiltonian");
        s.hamiltonian = h.value("preset", s.hamiltonian);
        s.mu = h.value("mu", s.mu);
        s.hamiltonian_file = h.value("file", s.hamiltonian_file);
        if (!s.hamiltonian_file.empty()) s.hamiltonian = "file";
    }
    if (j.contains("time")) {
        const json& t = j.at("time");
        s.t0 = t.value("t0", s.t0);
        s.t1 = t.value("t1", s.t1);
        s.samples = t.value("samples", s.samples);
    }
    s.tol = j.value("tol", s.tol);
    if (j.contains("mode")) s.mode = flow_mode_from_string(j.at("mode").get<std::string>());
    s.seed = j.value("seed", s.seed);

    if (!(s.tol > 0.0)) throw ValidationError("tol must be positive");
    if (s.samples < 2) throw ValidationError("time.samples must be at least 2");
    if (!(s.t1 > s.t0)) throw ValidationError("time.t1 must exceed time.t0");
    if (s.n1 < 1 || s.n2 < 1) throw ValidationError("space dimensions must be positive");
    for (const auto& f : {s.state_file, s.hamiltonian_file})
        if (!f.empty() && !std::filesystem::exists(resolve(s, f)))
            throw ValidationError("referenced file does not exist: " + resolve(s, f).string());
    return s;
}

json scenario_to_json(const Scenario& s) {
    json state = {{"preset", s.state}, {"theta", s.theta}, {"q_plus0", s.q_plus0}, {"phases", s.initial_phases}};
    if (!s.state_file.empty()) state["file"] = s.state_file;
    json ham = {{"preset", s.hamiltonian}, {"mu", s.mu}};
    if (!s.hamiltonian_file.empty()) ham["file"] = s.hamiltonian_file;
    return {{"schema_version", s.schema_version},
            {"name", s.name},
            {"space", {{"n1", s.n1}, {"n2", s.n2}}},
            {"state", state},
            {"hamiltonian", ham},
            {"time", {{"t0", s.t0}, {"t1", s.t1}, {"samples", s.samples}}},
            {"tol", s.tol},
            {"mode", to_string(s.mode)},
            {"seed", s.seed}};
}

StateVector scenario_state(const Scenario& s) {
    const BipartiteSpace sp(s.n1, s.n2);
    if (s.state == "file") {
        StateVector g = state_from_json(read_json_file(resolve(s, s.state_file)));
        if (!(g.space() == sp)) throw DimensionError("state file dimensions differ from the scenario space");
        return g;
    }
    if (s.state == "hyperfine") {
        if (s.n1 != 2 || s.n2 != 2) throw DimensionError("hyperfine preset needs a 2 x 2 space");
        return hyperfine_gamma(HyperfineParams(s.mu, s.theta, s.q_plus0), 0.0);
    }
    if (s.state == "product") {
        Vec a = Vec::Zero(s.n1), b = Vec::Constant(s.n2, cplx(1.0, 0.0));
        a(0) = 1.0;
        return StateVector::normalized(sp, product_vector(a, b));
    }
    if (s.state == "singlet") {
        if (s.n1 != s.n2) throw DimensionError("singlet preset needs n1 = n2");
        Vec v = Vec::Zero(sp.dim());
        if (s.n1 == 2) {
            v(1) = 1.0;
            v(2) = -1.0;
        } else {
            for (int k = 0; k < s.n1; ++k) v(k * s.n2 + k) = 1.0;
        }
        return StateVector::normalized(sp, v);
    }
    if (s.state == "random") {
        Rng rng(s.seed);
        return StateVector(sp, random_unit_vector(sp.dim(), rng));
    }
    throw ValidationError("unknown state preset \"" + s.state + "\"");
}

HamiltonianSpec scenario_hamiltonian(const Scenario& s) {
    const int dim = s.n1 * s.n2;
    HamiltonianSpec h;
    if (s.hamiltonian == "file") {
        h = hamiltonian_from_json(read_json_file(resolve(s, s.hamiltonian_file)));
    } else if (s.hamiltonian == "hyperfine") {
        if (s.n1 != 2 || s.n2 != 2) throw DimensionError("hyperfine preset needs a 2 x 2 space");
        h = HamiltonianSpec::constant(hyperfine_hamiltonian(s.mu), split_hamiltonian(hyperfine_hamiltonian(s.mu), 2, 2));
    } else if (s.hamiltonian == "local") {
        Rng rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
        HamiltonianSplit sp;
        sp.n1 = s.n1;
        sp.n2 = s.n2;
        sp.h1 = random_hermitian(s.n1, rng, s.mu);
        sp.h2 = random_hermitian(s.n2, rng, s.mu);
        sp.h0 = Mat::Zero(dim, dim);
        h = HamiltonianSpec::from_split(sp);
    } else if (s.hamiltonian == "random") {
        Rng rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
        const Mat m = random_hermitian(dim, rng, s.mu);
        h = HamiltonianSpec::constant(m, split_hamiltonian(m, s.n1, s.n2));
    } else {
        throw ValidationError("unknown hamiltonian preset \"" + s.hamiltonian + "\"");
    }
    if (h.dim() != dim) throw DimensionError("Hamiltonian dimension differs from the scenario space");
    return h;
}

PolarFrame scenario_frame(const Scenario& s, const StateVector& gamma) {
    PolarFrame f;
    if (s.state == "hyperfine") {
        f = hyperfine_closed_form(HyperfineParams(s.mu, s.theta, s.q_plus0), 0.0).frame;
    } else {
        f = polar_decompose(gamma);
    }
    if (!s.initial_phases.empty()) {
        if (static_cast<int>(s.initial_phases.size()) != f.size())
            throw DimensionError("state.phases needs one entry per nonzero radius");
        for (int k = 0; k < f.size(); ++k) {
            // q_k phi_k (x) psi_k is unchanged when the phase moves from q to phi
            const cplx z = std::polar(1.0, s.initial_phases[k]);
            f.q(k) *= z;
            f.phi.col(k) /= z;
        }
    }
    return f;
}

} // namespace iqm
