#pragma once

#include <string>

#include "multiree/energy.hpp"
#include "multiree/ree.hpp"
#include "multiree/separable.hpp"
#include "multiree/states.hpp"

namespace multiree {

// File formats are versioned JSON text objects; numbers round-trip exactly.
// Matrix:   {"version":1, "dims":[...], "re":[[...]], "im":[[...]]}
// Ensemble: {"version":1, "dims":[...], "weights":[...], "atoms":[[{re,im},...],...]}
// Hamiltonian: {"version":1, "eigenvalues":[...]} or
//              {"version":1, "oscillator":{"l":..,"omegas":[..],"hbar":..}, "truncation":N}

struct LoadedMatrix {
    CMatrix matrix;
    SubsystemLayout layout;
};

std::string matrix_to_json(const CMatrix& m, const SubsystemLayout& layout);
LoadedMatrix matrix_from_json(const std::string& text);
void save_matrix(const std::string& path, const CMatrix& m, const SubsystemLayout& layout);
LoadedMatrix load_matrix(const std::string& path);

std::string ensemble_to_json(const ProductEnsemble& e);
ProductEnsemble ensemble_from_json(const std::string& text);
void save_ensemble(const std::string& path, const ProductEnsemble& e);
ProductEnsemble load_ensemble(const std::string& path);

HamiltonianSpec hamiltonian_from_json(const std::string& text);
HamiltonianSpec load_hamiltonian(const std::string& path);
std::string hamiltonian_to_json(const HamiltonianSpec& h);

std::string solve_result_to_json(const SolveResult& r, uint64_t seed);
std::string audit_report_to_json(const AuditReport& r, uint64_t seed);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Environment-controlled verbosity (MULTIREE_LOG=0,1,2); messages go to stderr.
int log_level();
void log_msg(int level, const std::string& msg);

}  // namespace multiree
