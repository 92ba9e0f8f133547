#pragma once

#include "qpfisher/numerics.hpp"
#include "qpfisher/wavefunction.hpp"

#include <cstdint>
#include <vector>

namespace qpf {

struct BohmianOptions {
    DiffScheme scheme = DiffScheme::central4;
    // Nodes: rho < eps_node * max(rho).
    double eps_node = 1e-12;
    // States whose masked fraction reaches this are rejected as node-dominated.
    double max_masked_fraction = 0.05;
};

// A field defined only at unmasked nodes; masked entries hold NaN.
struct MaskedField {
    std::vector<double> values;
    std::vector<std::uint8_t> mask; // 1 where masked
};

struct PolarFields {
    std::vector<double> rho;
    std::vector<double> R;
    std::vector<double> p_q;
    std::vector<double> osmotic;
    std::vector<double> Q;
    std::vector<std::uint8_t> node_mask;
    // Masked share of the nodes between the first and last unmasked node.
    // Underflowing tails are not counted.
    double masked_fraction = 0.0;
};

// All fields in one pass. p_q = hbar Im(psi'/psi), osmotic = hbar Re(psi'/psi)
// and Q = -(hbar^2 / 2m) R''/R with
//   R''/R = Re(psi''/psi) + (p_q / hbar)^2,
// which is the chain rule for sqrt(rho) written through psi. psi'' is the
// first-derivative operator applied twice.
PolarFields polar_fields(const Wavefunction &psi, const BohmianOptions &opts = {});

MaskedField local_momentum(const Wavefunction &psi, const BohmianOptions &opts = {});
MaskedField osmotic_momentum(const Wavefunction &psi, const BohmianOptions &opts = {});
MaskedField quantum_potential(const Wavefunction &psi, const BohmianOptions &opts = {});

// I = integral (rho')^2 / rho, with rho' differentiated from rho itself. At
// masked nodes the integrand takes its limit 4 |psi'|^2.
double fisher_information(const Wavefunction &psi, const BohmianOptions &opts = {});

struct QuantumPotentialIdentity {
    double mean_Q = 0.0;      // integral rho Q over unmasked nodes
    double fisher_term = 0.0; // hbar^2 I / 8m
    double fisher_I = 0.0;
    double residual_abs = 0.0;
    double residual_rel = 0.0; // residual_abs / mean_Q
    double masked_fraction = 0.0;
};

QuantumPotentialIdentity mean_quantum_potential(const Wavefunction &psi, const BohmianOptions &opts = {});

} // namespace qpf
