#pragma once

#include <string>
#include <vector>

#include "pauli.hpp"

// Hamiltonian-algebra machinery: commutator closure g(H), the involution
// split g = k (+) m by Y-count parity, a maximal abelian subalgebra h of m,
// and the partition k = k0 (+) k1 with [k0, X0] = 0.

namespace aimdmft::lie {

enum class Role { g, k, m, h, k0, k1 };

const char* role_name(Role r);

// Ordered set of unit Pauli strings, each standing for a basis direction i*P
// of a real Lie algebra.
struct AlgebraBasis {
    Role role = Role::g;
    int n = 0;
    std::vector<PauliTerm> elements;  // unit coefficient, phase +1

    std::size_t size() const { return elements.size(); }
    bool contains(const PauliTerm& t) const;
};

// Smallest string set containing the Hamiltonian strings and closed under
// commutators. Deterministic: breadth-first rounds, new strings of a round
// sorted by (x_bits, z_bits). Throws when the closure exceeds `cap`
// (default 4^n - 1, the full traceless string count).
AlgebraBasis generate_closure(const PauliSum& hamiltonian, std::size_t cap = 0);

struct Split {
    AlgebraBasis k;  // odd Y count
    AlgebraBasis m;  // even Y count
};

// Involution theta(a) = (-1)^{Y-parity} a. Requires every Hamiltonian string
// to have even Y count so that iH lands in m; `hamiltonian` is checked when
// provided.
Split involution_split(const AlgebraBasis& g, const PauliSum* hamiltonian = nullptr);

// Greedy maximal abelian subalgebra of m, seeded with the first Hamiltonian
// string appearing in m, scanning m in order.
AlgebraBasis find_cartan_subalgebra(const AlgebraBasis& m, const PauliSum& hamiltonian);

struct KPartition {
    AlgebraBasis k0;  // commutes with X0
    AlgebraBasis k1;
};

KPartition partition_k(const AlgebraBasis& k);

// Everything the Cartan solver needs, computed once per Hamiltonian family.
struct Decomposition {
    AlgebraBasis g;
    AlgebraBasis k;
    AlgebraBasis m;
    AlgebraBasis h;
    AlgebraBasis k0;
    AlgebraBasis k1;
    bool k_abelian = false;
};

Decomposition analyze(const PauliSum& hamiltonian, std::size_t cap = 0);

// Line-oriented dump: "role <name>" header then one string per line.
std::string dump(const AlgebraBasis& basis);
AlgebraBasis load(const std::string& text);

}  // namespace aimdmft::lie
