#include "lie.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace aimdmft::lie {

namespace {

using Key = std::pair<std::uint64_t, std::uint64_t>;

Key key_of(const PauliTerm& t) { return {t.x_bits, t.z_bits}; }

PauliTerm unit_term(int n, Key k) {
    PauliTerm t;
    t.n = n;
    t.x_bits = k.first;
    t.z_bits = k.second;
    return t;
}

}  // namespace

const char* role_name(Role r) {
    switch (r) {
        case Role::g: return "g";
        case Role::k: return "k";
        case Role::m: return "m";
        case Role::h: return "h";
        case Role::k0: return "k0";
        case Role::k1: return "k1";
    }
    return "?";
}

bool AlgebraBasis::contains(const PauliTerm& t) const {
    for (const PauliTerm& e : elements) {
        if (e.x_bits == t.x_bits && e.z_bits == t.z_bits) return true;
    }
    return false;
}

AlgebraBasis generate_closure(const PauliSum& hamiltonian, std::size_t cap) {
    if (hamiltonian.empty()) throw PauliError("empty Hamiltonian");
    const int n = hamiltonian.n();
    if (cap == 0) {
        cap = n >= 32 ? static_cast<std::size_t>(-1)
                      : (std::size_t{1} << (2 * n)) - 1;
    }

    AlgebraBasis basis;
    basis.role = Role::g;
    basis.n = n;
    std::set<Key> seen;
    for (std::size_t i = 0; i < hamiltonian.size(); ++i) {
        PauliTerm t = hamiltonian.term_at(i);
        t.coeff = 1.0;
        t.phase_pow = 0;
        if (seen.insert(key_of(t)).second) basis.elements.push_back(t);
    }

    // Breadth-first rounds: commute all current pairs, append the round's new
    // strings in (x,z) order, repeat until stable.
    bool grew = true;
    while (grew) {
        grew = false;
        std::set<Key> fresh;
        for (std::size_t i = 0; i < basis.elements.size(); ++i) {
            for (std::size_t j = i + 1; j < basis.elements.size(); ++j) {
                auto c = commutator(basis.elements[i], basis.elements[j]);
                if (!c) continue;
                Key k = key_of(*c);
                if (!seen.count(k)) fresh.insert(k);
            }
        }
        if (!fresh.empty()) {
            grew = true;
            for (const Key& k : fresh) {
                seen.insert(k);
                basis.elements.push_back(unit_term(n, k));
            }
            if (basis.elements.size() > cap) {
                throw PauliError("Hamiltonian algebra closure exceeds cap (" +
                                 std::to_string(cap) + " strings)");
            }
        }
    }
    return basis;
}

Split involution_split(const AlgebraBasis& g, const PauliSum* hamiltonian) {
    if (hamiltonian) {
        for (std::size_t i = 0; i < hamiltonian->size(); ++i) {
            if (hamiltonian->term_at(i).y_count() % 2 != 0) {
                throw PauliError(
                    "Hamiltonian string with odd Y count; the Y-parity "
                    "involution does not place iH in m");
            }
        }
    }
    Split out;
    out.k.role = Role::k;
    out.m.role = Role::m;
    out.k.n = out.m.n = g.n;
    for (const PauliTerm& e : g.elements) {
        (e.y_count() % 2 ? out.k : out.m).elements.push_back(e);
    }
    return out;
}

AlgebraBasis find_cartan_subalgebra(const AlgebraBasis& m, const PauliSum& hamiltonian) {
    AlgebraBasis h;
    h.role = Role::h;
    h.n = m.n;
    if (m.elements.empty()) return h;

    // Seed: first element of m that is a Hamiltonian string.
    std::set<std::pair<std::uint64_t, std::uint64_t>> ham_keys;
    for (std::size_t i = 0; i < hamiltonian.size(); ++i) {
        PauliTerm t = hamiltonian.term_at(i);
        ham_keys.insert({t.x_bits, t.z_bits});
    }
    std::size_t seed = 0;
    for (std::size_t i = 0; i < m.elements.size(); ++i) {
        if (ham_keys.count(key_of(m.elements[i]))) {
            seed = i;
            break;
        }
    }
    h.elements.push_back(m.elements[seed]);
    for (std::size_t i = 0; i < m.elements.size(); ++i) {
        if (i == seed) continue;
        bool ok = true;
        for (const PauliTerm& e : h.elements) {
            if (!strings_commute(m.elements[i], e)) {
                ok = false;
                break;
            }
        }
        if (ok) h.elements.push_back(m.elements[i]);
    }
    return h;
}

KPartition partition_k(const AlgebraBasis& k) {
    KPartition out;
    out.k0.role = Role::k0;
    out.k1.role = Role::k1;
    out.k0.n = out.k1.n = k.n;
    for (const PauliTerm& e : k.elements) {
        // Commutes with X0 iff the qubit-0 letter is I or X (no Z bit).
        ((e.z_bits & 1) == 0 ? out.k0 : out.k1).elements.push_back(e);
    }
    return out;
}

Decomposition analyze(const PauliSum& hamiltonian, std::size_t cap) {
    Decomposition d;
    d.g = generate_closure(hamiltonian, cap);
    Split s = involution_split(d.g, &hamiltonian);
    d.k = std::move(s.k);
    d.m = std::move(s.m);
    d.h = find_cartan_subalgebra(d.m, hamiltonian);
    KPartition p = partition_k(d.k);
    d.k0 = std::move(p.k0);
    d.k1 = std::move(p.k1);
    d.k_abelian = true;
    for (std::size_t i = 0; i < d.k.elements.size() && d.k_abelian; ++i) {
        for (std::size_t j = i + 1; j < d.k.elements.size(); ++j) {
            if (!strings_commute(d.k.elements[i], d.k.elements[j])) {
                d.k_abelian = false;
                break;
            }
        }
    }
    return d;
}

std::string dump(const AlgebraBasis& basis) {
    std::ostringstream out;
    out << "role " << role_name(basis.role) << "\n";
    for (const PauliTerm& e : basis.elements) out << e.string_repr() << "\n";
    return out.str();
}

AlgebraBasis load(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    AlgebraBasis basis;
    bool have_role = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!have_role) {
            if (line.rfind("role ", 0) != 0) throw PauliError("missing role header");
            std::string name = line.substr(5);
            bool found = false;
            for (Role r : {Role::g, Role::k, Role::m, Role::h, Role::k0, Role::k1}) {
                if (name == role_name(r)) {
                    basis.role = r;
                    found = true;
                    break;
                }
            }
            if (!found) throw PauliError("unknown role: " + name);
            have_role = true;
            continue;
        }
        PauliTerm t = PauliTerm::from_string(line);
        if (basis.n == 0) basis.n = t.n;
        if (t.n != basis.n) throw PauliError("mixed qubit counts in basis dump");
        basis.elements.push_back(t);
    }
    if (!have_role) throw PauliError("empty basis dump");
    return basis;
}

}  // namespace aimdmft::lie
