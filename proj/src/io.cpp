#include "multiree/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace multiree {

using nlohmann::json;

namespace {

json matrix_entries(const CMatrix& m) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json rrow = json::array(), irow = json::array();
        for (int j = 0; j < m.cols(); ++j) {
            rrow.push_back(m.re(i, j));
            irow.push_back(m.im(i, j));
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

CMatrix matrix_from_entries(const json& j, int rows, int cols) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<int>(re.size()) != rows || static_cast<int>(im.size()) != rows)
        throw validation_error("matrix file: row count mismatch");
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(re[i].size()) != cols || static_cast<int>(im[i].size()) != cols)
            throw validation_error("matrix file: column count mismatch");
        for (int j2 = 0; j2 < cols; ++j2) {
            m.re(i, j2) = re[i][j2].get<double>();
            m.im(i, j2) = im[i][j2].get<double>();
        }
    }
    return m;
}

SubsystemLayout layout_from_json(const json& j) {
    std::vector<int> dims;
    for (const auto& d : j) dims.push_back(d.get<int>());
    return SubsystemLayout(dims);
}

json ensemble_json(const ProductEnsemble& e) {
    json atoms = json::array();
    for (const auto& a : e.atoms) {
        json parts = json::array();
        for (const auto& p : a.parts) parts.push_back(matrix_entries(p));
        atoms.push_back(std::move(parts));
    }
    json weights = json::array();
    for (const auto& a : e.atoms) weights.push_back(a.weight);
    return json{{"version", 1}, {"dims", e.layout.dims}, {"weights", std::move(weights)}, {"atoms", std::move(atoms)}};
}

}  // namespace

std::string matrix_to_json(const CMatrix& m, const SubsystemLayout& layout) {
    json j{{"version", 1}, {"dims", layout.dims}};
    json ent = matrix_entries(m);
    j["re"] = std::move(ent["re"]);
    j["im"] = std::move(ent["im"]);
    return j.dump(1);
}

LoadedMatrix matrix_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.at("version").get<int>() != 1) throw validation_error("matrix file: unsupported version");
    SubsystemLayout layout = layout_from_json(j.at("dims"));
    const int d = static_cast<int>(layout.total_dim());
    return {matrix_from_entries(j, d, d), layout};
}

void save_matrix(const std::string& path, const CMatrix& m, const SubsystemLayout& layout) {
    write_text_file(path, matrix_to_json(m, layout));
}

LoadedMatrix load_matrix(const std::string& path) { return matrix_from_json(read_text_file(path)); }

std::string ensemble_to_json(const ProductEnsemble& e) { return ensemble_json(e).dump(1); }

ProductEnsemble ensemble_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.at("version").get<int>() != 1) throw validation_error("ensemble file: unsupported version");
    ProductEnsemble e;
    e.layout = layout_from_json(j.at("dims"));
    const auto& weights = j.at("weights");
    const auto& atoms = j.at("atoms");
    if (weights.size() != atoms.size()) throw validation_error("ensemble file: weights/atoms mismatch");
    for (size_t i = 0; i < atoms.size(); ++i) {
        ProductEnsemble::Atom a;
        a.weight = weights[i].get<double>();
        if (static_cast<int>(atoms[i].size()) != e.layout.parties())
            throw validation_error("ensemble file: atom party count mismatch");
        for (int p = 0; p < e.layout.parties(); ++p) {
            int d = e.layout.dims[p];
            a.parts.push_back(matrix_from_entries(atoms[i][p], d, d));
        }
        e.atoms.push_back(std::move(a));
    }
    e.validate();
    return e;
}

void save_ensemble(const std::string& path, const ProductEnsemble& e) {
    write_text_file(path, ensemble_to_json(e));
}

ProductEnsemble load_ensemble(const std::string& path) { return ensemble_from_json(read_text_file(path)); }

HamiltonianSpec hamiltonian_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.contains("version") && j.at("version").get<int>() != 1)
        throw validation_error("hamiltonian file: unsupported version");
    if (j.contains("eigenvalues")) {
        std::vector<double> ev;
        for (const auto& x : j.at("eigenvalues")) ev.push_back(x.get<double>());
        return HamiltonianSpec::from_levels(std::move(ev));
    }
    if (j.contains("oscillator")) {
        const auto& o = j.at("oscillator");
        OscillatorSpec osc;
        osc.modes = o.at("l").get<int>();
        for (const auto& w : o.at("omegas")) osc.omegas.push_back(w.get<double>());
        osc.hbar = o.contains("hbar") ? o.at("hbar").get<double>() : 1.0;
        int trunc = j.contains("truncation") ? j.at("truncation").get<int>() : 1000;
        return HamiltonianSpec::from_oscillator(osc, trunc);
    }
    throw validation_error("hamiltonian file: needs eigenvalues or oscillator");
}

HamiltonianSpec load_hamiltonian(const std::string& path) {
    return hamiltonian_from_json(read_text_file(path));
}

std::string hamiltonian_to_json(const HamiltonianSpec& h) {
    json j{{"version", 1}};
    if (h.oscillator) {
        j["oscillator"] = json{{"l", h.oscillator->modes}, {"omegas", h.oscillator->omegas}, {"hbar", h.oscillator->hbar}};
        j["truncation"] = h.levels();
    } else {
        j["eigenvalues"] = h.eigenvalues;
    }
    return j.dump(1);
}

std::string solve_result_to_json(const SolveResult& r, uint64_t seed) {
    json j{{"version", 1},
           {"seed", seed},
           {"value", r.value},
           {"gap", r.gap},
           {"lower_bound", r.value - r.gap},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"ensemble", ensemble_json(r.ensemble)}};
    return j.dump(1);
}

std::string audit_report_to_json(const AuditReport& r, uint64_t seed) {
    json recs = json::array();
    for (const auto& rec : r.records)
        recs.push_back(json{{"name", rec.name},
                            {"lhs", rec.lhs},
                            {"rhs", rec.rhs},
                            {"slack", rec.slack},
                            {"pass", rec.pass}});
    json j{{"version", 1}, {"seed", seed}, {"records", std::move(recs)}, {"all_pass", r.all_pass()}};
    return j.dump(1);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open for writing: " + path);
    out << text << "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int log_level() {
    static int level = [] {
        const char* v = std::getenv("MULTIREE_LOG");
        return v ? std::atoi(v) : 0;
    }();
    return level;
}

void log_msg(int level, const std::string& msg) {
    if (log_level() >= level) std::fprintf(stderr, "[multiree] %s\n", msg.c_str());
}

}  // namespace multiree
