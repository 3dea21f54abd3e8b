#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "multiree/approx.hpp"
#include "multiree/energy.hpp"
#include "multiree/entropy.hpp"
#include "multiree/io.hpp"
#include "multiree/ree.hpp"
#include "multiree/separable.hpp"

using namespace multiree;
using nlohmann::json;

namespace {

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stoi(tok));
        } catch (...) {
            throw validation_error(what + ": cannot parse '" + tok + "'");
        }
    }
    if (out.empty()) throw validation_error(what + ": empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw validation_error(what + ": cannot parse '" + tok + "'");
        }
    }
    if (out.empty()) throw validation_error(what + ": empty list");
    return out;
}

// subset strings are 1-based on the command line
std::vector<int> parse_subset(const std::string& text) {
    std::vector<int> subset = parse_int_list(text, "--subset");
    for (int& s : subset) s -= 1;
    return subset;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        if (text.empty() || text.back() != '\n') std::fputc('\n', stdout);
    } else {
        write_text_file(out_path, text);
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

LoadedMatrix load_state(const std::string& path, const std::string& layout_arg) {
    LoadedMatrix lm = load_matrix(path);
    if (!layout_arg.empty()) {
        SubsystemLayout ly(parse_int_list(layout_arg, "--layout"));
        if (ly.total_dim() != lm.layout.total_dim())
            throw validation_error("--layout conflicts with the state dimension");
        lm.layout = ly;
    }
    CMatrix& m = lm.matrix;
    require_hermitian(m, 1e-12, "state file");
    return lm;
}

PureState extract_pure(const CMatrix& rho) {
    EigSystem es = hermitian_eig(rho);
    if (numerical_rank(es.values) != 1) throw validation_error("state is not pure");
    return PureState(es.column(0));
}

TailModel parse_tail(const std::string& text) {
    if (text.empty()) return {TailModel::Kind::None, 0.0, 0.0};
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    TailModel m;
    if (parts[0] == "geometric" && parts.size() == 2) {
        m.kind = TailModel::Kind::Geometric;
        m.p0 = std::stod(parts[1]);
    } else if (parts[0] == "powerlaw" && parts.size() == 2) {
        m.kind = TailModel::Kind::PowerLaw;
        m.p0 = std::stod(parts[1]);
    } else if (parts[0] == "loglaw" && parts.size() == 3) {
        m.kind = TailModel::Kind::LogCorrected;
        m.p0 = std::stod(parts[1]);
        m.p1 = std::stod(parts[2]);
    } else {
        throw validation_error("cannot parse tail model '" + text + "'");
    }
    return m;
}

struct SequenceSpec {
    std::vector<double> values;
    TailModel tail;
};

SequenceSpec parse_sequence(const std::string& arg, const std::string& tail_arg, int terms,
                            bool is_spectrum) {
    SequenceSpec out;
    if (arg.rfind("model:", 0) == 0) {
        std::string body = arg.substr(6);
        if (is_spectrum) {
            out.tail = parse_tail(body);
            out.values = spectrum_from_model(out.tail, terms);
        } else {
            std::vector<std::string> parts;
            std::stringstream ss(body);
            std::string tok;
            while (std::getline(ss, tok, ':')) parts.push_back(tok);
            if (parts[0] == "zero") {
                out.values = weights_from_model("zero", 0.0, terms);
                out.tail = {TailModel::Kind::None, 0.0, 0.0};
            } else if (parts[0] == "lnpow" && parts.size() == 2) {
                double q = std::stod(parts[1]);
                out.values = weights_from_model("lnpow", q, terms);
                out.tail = {TailModel::Kind::LogCorrected, 1.0, q};
            } else if (parts[0] == "linear" && parts.size() == 2) {
                double a = std::stod(parts[1]);
                out.values = weights_from_model("linear", a, terms);
                out.tail = {TailModel::Kind::PowerLaw, 1.0, 0.0};
            } else {
                throw validation_error("cannot parse weights model '" + body + "'");
            }
        }
        return out;
    }
    json j = json::parse(read_text_file(arg));
    for (const auto& x : j.at("values")) out.values.push_back(x.get<double>());
    out.tail = parse_tail(tail_arg);
    return out;
}

json result_header(const std::string& command, uint64_t seed) {
    return json{{"version", 1}, {"command", command}, {"seed", seed}};
}

struct SweepSpec {
    std::string variable;
    double lo = 0.0, hi = 0.0;
    int points = 0;
};

std::optional<SweepSpec> parse_sweep(const std::string& text) {
    if (text.empty()) return std::nullopt;
    auto eq = text.find('=');
    auto c1 = text.find(':', eq);
    auto c2 = text.find(':', c1 + 1);
    if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos)
        throw validation_error("cannot parse --sweep '" + text + "' (want var=a:b:n)");
    SweepSpec s;
    s.variable = text.substr(0, eq);
    s.lo = std::stod(text.substr(eq + 1, c1 - eq - 1));
    s.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    s.points = std::stoi(text.substr(c2 + 1));
    if (s.variable != "epsilon") throw validation_error("--sweep supports epsilon only");
    if (s.points < 2) throw validation_error("--sweep needs at least 2 points");
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multipartite state approximation and relative entropy of entanglement toolkit"};
    app.require_subcommand(1);

    std::string state_path, sigma_path, layout_arg, out_path, format;
    std::string subset_arg, f_arg, cond_arg, order_arg, sweep_arg;
    std::vector<std::string> ham_paths;
    double tol = 1e-3, energy = std::numeric_limits<double>::infinity();
    double epsilon = 0.0, tparam = 1.0, hbar = 1.0;
    std::string dims_arg, omegas_arg, spectrum_arg, weights_arg, spectrum_tail_arg, weights_tail_arg;
    int restarts = 16, max_iter = 300, rmax = 2, jobs = 1, mparties = 1, nparties = 2, lmodes = 1,
        terms = 2000;
    uint64_t seed = 0;
    bool strict = false, want_qmi = false, optimize_t_flag = false;

    auto add_solver_opts = [&](CLI::App* cmd) {
        cmd->add_option("--tol", tol, "duality-gap stopping tolerance");
        cmd->add_option("--restarts", restarts, "product-vector search restarts");
        cmd->add_option("--max-iter", max_iter, "iteration cap");
        cmd->add_option("--seed", seed, "random seed (all randomness derives from it)");
        cmd->add_option("--jobs", jobs, "parallel workers for sweeps");
        cmd->add_flag("--strict", strict, "exit 3 when the solver does not converge");
    };

    CLI::App* entropy_cmd = app.add_subcommand("entropy", "entropy functionals of a state file");
    entropy_cmd->add_option("state", state_path)->required();
    entropy_cmd->add_option("--layout", layout_arg);
    entropy_cmd->add_flag("--qmi", want_qmi, "multipartite mutual information");
    entropy_cmd->add_option("--cond", cond_arg, "conditional entropy: A|B or B|A");
    entropy_cmd->add_option("--rel", sigma_path, "relative entropy against this state");
    entropy_cmd->add_option("--out", out_path);
    entropy_cmd->add_option("--format", format);

    CLI::App* ree_cmd = app.add_subcommand("ree", "relative entropy of entanglement");
    ree_cmd->add_option("state", state_path)->required();
    ree_cmd->add_option("--layout", layout_arg);
    ree_cmd->add_option("--energy", energy, "separable-side mean energy cap");
    ree_cmd->add_option("--ham", ham_paths, "per-party Hamiltonian spec files");
    ree_cmd->add_option("--out", out_path);
    add_solver_opts(ree_cmd);

    CLI::App* trunc_cmd = app.add_subcommand("truncate", "spectral truncation experiment table");
    trunc_cmd->add_option("state", state_path)->required();
    trunc_cmd->add_option("--layout", layout_arg);
    trunc_cmd->add_option("--subset", subset_arg)->required();
    trunc_cmd->add_option("--f", f_arg)->required();
    trunc_cmd->add_option("--rmax", rmax)->required();
    trunc_cmd->add_option("--out", out_path);
    add_solver_opts(trunc_cmd);

    CLI::App* bounds_cmd = app.add_subcommand("bounds", "uniform continuity bounds");
    bounds_cmd->require_subcommand(1);
    CLI::App* b_finite = bounds_cmd->add_subcommand("finite", "dimension bound");
    b_finite->add_option("--epsilon", epsilon)->required();
    b_finite->add_option("--dims", dims_arg)->required();
    b_finite->add_option("--sweep", sweep_arg);
    b_finite->add_option("--out", out_path);
    b_finite->add_option("--format", format);
    b_finite->add_option("--jobs", jobs);
    CLI::App* b_energy = bounds_cmd->add_subcommand("energy", "summed-Hamiltonian bound");
    b_energy->add_option("--epsilon", epsilon)->required();
    b_energy->add_option("--energy", energy)->required();
    b_energy->add_option("--m", mparties)->required();
    b_energy->add_option("--n", nparties)->required();
    b_energy->add_option("--ham", ham_paths)->required();
    b_energy->add_option("--sweep", sweep_arg);
    b_energy->add_option("--out", out_path);
    b_energy->add_option("--format", format);
    b_energy->add_option("--jobs", jobs);
    CLI::App* b_iid = bounds_cmd->add_subcommand("iid", "identical-subsystem bound");
    b_iid->add_option("--epsilon", epsilon)->required();
    b_iid->add_option("--energy", energy)->required();
    b_iid->add_option("--m", mparties)->required();
    b_iid->add_option("--n", nparties)->required();
    b_iid->add_option("--t", tparam);
    b_iid->add_flag("--optimize-t", optimize_t_flag);
    b_iid->add_option("--l", lmodes);
    b_iid->add_option("--omegas", omegas_arg);
    b_iid->add_option("--hbar", hbar);
    b_iid->add_option("--ham", ham_paths, "numeric spectrum instead of an oscillator");
    b_iid->add_option("--sweep", sweep_arg);
    b_iid->add_option("--out", out_path);
    b_iid->add_option("--format", format);
    b_iid->add_option("--jobs", jobs);
    CLI::App* b_osc = bounds_cmd->add_subcommand("oscillator", "oscillator closed form");
    b_osc->add_option("--epsilon", epsilon)->required();
    b_osc->add_option("--energy", energy)->required();
    b_osc->add_option("--t", tparam)->required();
    b_osc->add_option("--l", lmodes)->required();
    b_osc->add_option("--omegas", omegas_arg)->required();
    b_osc->add_option("--hbar", hbar);
    b_osc->add_option("--m", mparties)->required();
    b_osc->add_option("--n", nparties)->required();
    b_osc->add_option("--sweep", sweep_arg);
    b_osc->add_option("--out", out_path);
    b_osc->add_option("--format", format);
    b_osc->add_option("--jobs", jobs);

    CLI::App* fa_cmd = app.add_subcommand("fa-check", "finite-approximation spectrum test");
    fa_cmd->add_option("--spectrum", spectrum_arg)->required();
    fa_cmd->add_option("--weights", weights_arg)->required();
    fa_cmd->add_option("--spectrum-tail", spectrum_tail_arg);
    fa_cmd->add_option("--weights-tail", weights_tail_arg);
    fa_cmd->add_option("--terms", terms);
    fa_cmd->add_option("--out", out_path);

    CLI::App* audit_cmd = app.add_subcommand("audit", "inequality audit for a state");
    audit_cmd->add_option("state", state_path)->required();
    audit_cmd->add_option("--layout", layout_arg);
    audit_cmd->add_option("--out", out_path);
    add_solver_opts(audit_cmd);

    CLI::App* lemma_cmd = app.add_subcommand("lemma-omega",
                                             "marginal-matching separable ensemble of a pure state");
    lemma_cmd->add_option("state", state_path)->required();
    lemma_cmd->add_option("--layout", layout_arg);
    lemma_cmd->add_option("--order", order_arg, "peel order, 1-based");
    lemma_cmd->add_option("--out", out_path, "ensemble file destination");

    CLI::App* gibbs_cmd = app.add_subcommand("gibbs", "maximum-entropy state at a mean energy");
    gibbs_cmd->add_option("--ham", ham_paths)->required();
    gibbs_cmd->add_option("--energy", energy)->required();
    gibbs_cmd->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        SolveOptions opts;
        opts.tol = tol;
        opts.max_iter = max_iter;
        opts.restarts = restarts;
        opts.seed = seed;
        opts.jobs = jobs;

        if (app.got_subcommand(entropy_cmd)) {
            LoadedMatrix lm = load_state(state_path, layout_arg);
            json j = result_header("entropy", seed);
            if (want_qmi) {
                j["kind"] = "qmi";
                j["value"] = mutual_information(lm.matrix, lm.layout);
            } else if (!cond_arg.empty()) {
                if (lm.layout.parties() != 2) throw validation_error("--cond needs a bipartite layout");
                j["kind"] = "conditional";
                if (cond_arg == "A|B") {
                    j["value"] = conditional_entropy_ext(lm.matrix, lm.layout);
                } else if (cond_arg == "B|A") {
                    CMatrix sw = permute_systems(lm.matrix, lm.layout, {1, 0});
                    j["value"] = conditional_entropy_ext(
                        sw, SubsystemLayout({lm.layout.dims[1], lm.layout.dims[0]}));
                } else {
                    throw validation_error("--cond must be A|B or B|A");
                }
            } else if (!sigma_path.empty()) {
                LoadedMatrix sm = load_state(sigma_path, "");
                j["kind"] = "relative";
                double v = relative_entropy(lm.matrix, sm.matrix);
                if (std::isinf(v))
                    j["value"] = "infinity";
                else
                    j["value"] = v;
            } else {
                j["kind"] = "von_neumann";
                j["value"] = von_neumann_entropy(lm.matrix);
            }
            emit(j.dump(1), out_path);
            return 0;
        }

        if (app.got_subcommand(ree_cmd)) {
            LoadedMatrix lm = load_state(state_path, layout_arg);
            SolveResult res;
            if (std::isfinite(energy) || !ham_paths.empty()) {
                if (static_cast<int>(ham_paths.size()) != lm.layout.parties())
                    throw validation_error("--energy needs one --ham per party");
                std::vector<HamiltonianSpec> hams;
                for (const auto& p : ham_paths) hams.push_back(load_hamiltonian(p));
                res = energy_constrained_ree(lm.matrix, lm.layout, hams, energy, opts);
            } else {
                res = estimate_ree(lm.matrix, lm.layout, opts);
            }
            if (strict && !res.converged) {
                log_msg(0, "solver did not converge to the requested gap");
                return 3;
            }
            emit(solve_result_to_json(res, seed), out_path);
            return 0;
        }

        if (app.got_subcommand(trunc_cmd)) {
            LoadedMatrix lm = load_state(state_path, layout_arg);
            ExperimentTable t = truncation_experiment(lm.matrix, lm.layout, parse_subset(subset_arg),
                                                      functional_from_name(f_arg), rmax, opts);
            std::ostringstream csv;
            csv << "r,c_r,delta_r,value,bound,valid_regime\n";
            for (const auto& row : t.rows)
                csv << row.r << ',' << format_double(row.c_r) << ',' << format_double(row.delta_r)
                    << ',' << format_double(row.value) << ',' << format_double(row.bound) << ','
                    << (row.valid_regime ? 1 : 0) << "\n";
            emit(csv.str(), out_path);
            return 0;
        }

        if (bounds_cmd->parsed()) {
            std::vector<HamiltonianSpec> hams;
            for (const auto& p : ham_paths) hams.push_back(load_hamiltonian(p));
            std::optional<SweepSpec> sweep = parse_sweep(sweep_arg);

            // one row of the requested bound at a given epsilon
            auto eval_row = [&](double eps) -> std::vector<std::pair<std::string, double>> {
                if (bounds_cmd->got_subcommand(b_finite)) {
                    return {{"value", cb_finite_dim(eps, parse_int_list(dims_arg, "--dims"))}};
                }
                if (bounds_cmd->got_subcommand(b_energy)) {
                    return {{"value", cb_energy(eps, energy, mparties, nparties, hams)}};
                }
                if (bounds_cmd->got_subcommand(b_iid)) {
                    FFunction fhat = hams.empty()
                                         ? FFunction::oscillator_bar(
                                               {lmodes, parse_double_list(omegas_arg, "--omegas"), hbar})
                                         : FFunction::numeric(hams[0]);
                    double t_use = tparam;
                    if (optimize_t_flag) t_use = optimize_t(eps, energy, mparties, nparties, fhat).t;
                    double v = cb_energy_iid(eps, energy, mparties, nparties, t_use, fhat);
                    return {{"t", t_use}, {"value", v}};
                }
                OscCbTerms terms2 = cb_oscillator(eps, energy, tparam, lmodes,
                                                  parse_double_list(omegas_arg, "--omegas"), mparties,
                                                  nparties, hbar);
                return {{"t", tparam},    {"value", terms2.total}, {"term1", terms2.term1},
                        {"term2", terms2.term2}, {"g1", terms2.g1},       {"g2", terms2.g2}};
            };

            if (sweep) {
                std::vector<double> eps_grid(sweep->points);
                for (int k = 0; k < sweep->points; ++k)
                    eps_grid[k] = sweep->lo + (sweep->hi - sweep->lo) * k / (sweep->points - 1);
                std::vector<std::vector<std::pair<std::string, double>>> rows(eps_grid.size());
                for (size_t k = 0; k < eps_grid.size(); ++k) rows[k] = eval_row(eps_grid[k]);
                std::ostringstream csv;
                csv << "epsilon,t,E,value";
                for (const auto& [name, _] : rows[0])
                    if (name != "value" && name != "t") csv << ',' << name;
                csv << "\n";
                for (size_t k = 0; k < rows.size(); ++k) {
                    double trow = tparam, vrow = 0.0;
                    std::vector<std::pair<std::string, double>> extras;
                    for (const auto& [name, val] : rows[k]) {
                        if (name == "t")
                            trow = val;
                        else if (name == "value")
                            vrow = val;
                        else
                            extras.push_back({name, val});
                    }
                    csv << format_double(eps_grid[k]) << ',' << format_double(trow) << ','
                        << format_double(energy) << ',' << format_double(vrow);
                    for (const auto& [_, val] : extras) csv << ',' << format_double(val);
                    csv << "\n";
                }
                emit(csv.str(), out_path);
                return 0;
            }

            json j = result_header("bounds", seed);
            j["epsilon"] = epsilon;
            if (std::isfinite(energy)) j["E"] = energy;
            for (const auto& [name, val] : eval_row(epsilon)) j[name] = val;
            emit(j.dump(1), out_path);
            return 0;
        }

        if (app.got_subcommand(fa_cmd)) {
            SequenceSpec spec = parse_sequence(spectrum_arg, spectrum_tail_arg, terms, true);
            SequenceSpec wts = parse_sequence(weights_arg, weights_tail_arg, terms, false);
            FaCheckResult r = fa_check(spec.values, spec.tail, wts.values, wts.tail);
            json j = result_header("fa-check", seed);
            j["energy"] = std::isinf(r.energy) ? json("infinity") : json(r.energy);
            j["energy_finite"] = r.energy_finite;
            j["hcond_plus"] = verdict_name(r.hcond);
            j["overall"] = verdict_name(r.overall);
            json trace = json::array();
            for (auto [beta, y] : r.beta_trace)
                trace.push_back(json::array({beta, std::isinf(y) ? json("infinity") : json(y)}));
            j["beta_trace"] = std::move(trace);
            emit(j.dump(1), out_path);
            return 0;
        }

        if (app.got_subcommand(audit_cmd)) {
            LoadedMatrix lm = load_state(state_path, layout_arg);
            AuditReport rep = audit_state(lm.matrix, lm.layout, opts);
            emit(audit_report_to_json(rep, seed), out_path);
            return 0;
        }

        if (app.got_subcommand(lemma_cmd)) {
            LoadedMatrix lm = load_state(state_path, layout_arg);
            PureState psi = extract_pure(lm.matrix);
            std::optional<std::vector<int>> order;
            if (!order_arg.empty()) {
                std::vector<int> ord = parse_int_list(order_arg, "--order");
                for (int& x : ord) x -= 1;
                order = ord;
            }
            ProductEnsemble e =
                marginal_matching_separable(psi, lm.layout, order ? &*order : nullptr);
            CMatrix sigma = assemble(e);
            CMatrix omega = psi.projector();
            double dist = 0.0;
            for (int p = 0; p < lm.layout.parties(); ++p)
                dist = std::max(dist, trace_distance(marginal(sigma, lm.layout, p),
                                                     marginal(omega, lm.layout, p)));
            double bound = 0.0;
            std::vector<int> ord(lm.layout.parties());
            for (int p = 0; p < lm.layout.parties(); ++p) ord[p] = order ? (*order)[p] : p;
            for (int p = 0; p + 1 < lm.layout.parties(); ++p)
                bound += von_neumann_entropy(marginal(omega, lm.layout, ord[p]));
            json j = result_header("lemma-omega", seed);
            j["atoms"] = e.atoms.size();
            j["rel_entropy"] = relative_entropy(omega, sigma);
            j["marginal_bound"] = bound;
            j["max_marginal_distance"] = dist;
            if (!out_path.empty()) {
                save_ensemble(out_path, e);
                j["ensemble_file"] = out_path;
            }
            std::fputs((j.dump(1) + "\n").c_str(), stdout);
            return 0;
        }

        if (app.got_subcommand(gibbs_cmd)) {
            if (ham_paths.size() != 1) throw validation_error("gibbs: exactly one --ham");
            HamiltonianSpec h = load_hamiltonian(ham_paths[0]);
            GibbsResult r = gibbs_state(h, energy);
            json j = result_header("gibbs", seed);
            j["beta"] = r.beta;
            j["mean_energy"] = r.mean_energy;
            j["entropy"] = r.entropy;
            j["clamped"] = r.clamped;
            if (r.tail_bound > 0.0) j["tail_bound"] = r.tail_bound;
            j["probs"] = r.probs;
            emit(j.dump(1), out_path);
            return 0;
        }

        throw validation_error("no subcommand handled");
    } catch (const validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
