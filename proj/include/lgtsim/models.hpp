// models.hpp — gauge-theory model builders: Hamiltonians, Gauss-law generators,
// protection terms, coherent error terms, jump operators, and initial states

#pragma once

#include "lgtsim/hilbert.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace lgtsim::models {

enum class ModelKind { u1_qlm, z2_lgt };
enum class GeneratorSource { full, pseudo };

struct U1Params {
    double J = 1.0;
    double mu = 0.5;
    int L = 4;
    Boundary boundary = Boundary::periodic;
};

struct Z2Params {
    double J = 1.0;
    double h = 0.54;
    int L = 4;
    Boundary boundary = Boundary::periodic;
};

// ----------------------------- protection sequences ------------------------

enum class SequenceKind {
    compliant_l4,     // (-115, 116, -118, 122)/122, L = 4 only
    staggered,        // (-1)^j
    stark_staggered,  // j (-1)^j
    stark_linear,     // j
    z2_geometric,     // ((-6)^j + 5)/11
    custom
};

struct ProtectionSequence {
    SequenceKind kind = SequenceKind::custom;
    std::vector<double> c;  // one coefficient per site, j = 1..L
};

ProtectionSequence make_sequence(SequenceKind kind, int n_sites);
ProtectionSequence custom_sequence(std::vector<double> c);
SequenceKind sequence_kind_from_string(const std::string& name);
std::string to_string(SequenceKind kind);

// --------------------------------- bundle ----------------------------------

struct JumpOperator {
    std::string label;  // e.g. "matter_1", "gauge_12"
    Operator op;
};

struct ModelBundle {
    ModelKind kind = ModelKind::u1_qlm;
    LatticeSpec lattice;
    double J = 1.0;
    double mass_or_field = 0.0;  // mu (U(1)) or h (Z2)
    Operator h0;
    std::vector<Operator> generators;        // G_j, j = 1..L
    std::vector<Operator> pseudogenerators;  // W_j (Z2 only, empty otherwise)
    std::vector<JumpOperator> jump_ops;
    std::vector<int> target_sector;  // g_j^tar
};

ModelBundle build_u1_qlm(const U1Params& params);
ModelBundle build_z2_lgt(const Z2Params& params);

// sum_j c_j G_j (or sum_j c_j W_j with the pseudogenerator source)
Operator build_linear_protection(const ModelBundle& bundle, const ProtectionSequence& seq,
                                 GeneratorSource source = GeneratorSource::full);

// sum_j (G_j - g_j^tar)^2; positive semidefinite, annihilates the target sector
Operator build_quadratic_protection(const ModelBundle& bundle);

// model-specific gauge-breaking Hamiltonian H_1 (unit error strength)
Operator build_coherent_error(const ModelBundle& bundle,
                              const std::array<double, 4>& eta = {1.0, 1.0, 1.0, 1.0});

// (1/L) sum_j (G_j - g_j^tar)^2 — the gauge-violation observable
Operator violation_operator(const ModelBundle& bundle);

// ----------------------------- sectors & states ----------------------------

struct Sector {
    std::vector<int> g;
    Matrix projector;
    int rank = 0;
};

// joint eigenspaces of the full generators, sorted lexicographically by g
std::vector<Sector> sector_projectors(const ModelBundle& bundle);

struct ComplianceRow {
    std::vector<int> g;
    double value;  // sum_j c_j (g_j - g_j^tar)
};

struct ComplianceReport {
    std::vector<ComplianceRow> rows;
    bool compliant = false;  // value nonzero for every non-target sector
};

ComplianceReport check_compliance(const ProtectionSequence& seq, const std::vector<Sector>& sectors,
                                  const std::vector<int>& target);

enum class StatePreset {
    u1_vacuum,
    u1_charge_proliferated,
    u1_domainwall_x,
    u1_domainwall_z,
    z2_cdw,
    z2_domainwall_x,
    z2_domainwall_z,
    custom
};

StatePreset preset_from_string(const std::string& name);
std::string to_string(StatePreset preset);

// normalized product state; verify checks the preset's sector content
Vector build_initial_state(const ModelBundle& bundle, StatePreset preset,
                           const std::string& bitstring = "", bool verify = true);

// ------------------------------- local tables ------------------------------

struct Z2LocalRow {
    int n;       // matter occupation
    int tau_l;   // tau^x on link (j-1, j)
    int tau_r;   // tau^x on link (j, j+1)
    int g;       // G_j eigenvalue
    int w_tar_m; // W_j eigenvalue, g^tar = -1
    int w_tar_p; // W_j eigenvalue, g^tar = +1
};

// evaluated from the local operators on a 3-subsystem patch
std::vector<Z2LocalRow> z2_local_eigenvalue_table();

}  // namespace lgtsim::models
