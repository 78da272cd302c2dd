#include "circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "optim.hpp"

namespace aimdmft::circuit {

namespace {

const char* kind_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::S: return "S";
        case GateKind::Sdg: return "SDG";
        case GateKind::X: return "X";
        case GateKind::Rx: return "RX";
        case GateKind::Rz: return "RZ";
        case GateKind::Cnot: return "CNOT";
    }
    return "?";
}

bool kind_has_theta(GateKind k) { return k == GateKind::Rx || k == GateKind::Rz; }

void check_operands(const Circuit& c, const Gate& g) {
    if (g.q0 < 0 || g.q0 >= c.width ||
        (g.kind == GateKind::Cnot && (g.q1 < 0 || g.q1 >= c.width || g.q1 == g.q0))) {
        throw CircuitError("gate operand out of range");
    }
    if (kind_has_theta(g.kind) && !std::isfinite(g.theta)) {
        throw CircuitError("non-finite rotation angle");
    }
}

}  // namespace

int Circuit::cnot_count() const {
    int count = 0;
    for (const Gate& g : gates) count += g.kind == GateKind::Cnot;
    return count;
}

void Circuit::append(const Gate& g) {
    check_operands(*this, g);
    gates.push_back(g);
}

void Circuit::append(const Circuit& fragment) {
    if (fragment.width > width) throw CircuitError("fragment wider than circuit");
    for (const Gate& g : fragment.gates) append(g);
}

std::string Circuit::export_text() const {
    std::ostringstream out;
    out << "width " << width << "\n";
    char buf[64];
    for (const Gate& g : gates) {
        if (g.kind == GateKind::Cnot) {
            out << "CNOT " << g.q0 << " " << g.q1 << "\n";
        } else if (kind_has_theta(g.kind)) {
            std::snprintf(buf, sizeof(buf), "%s %d %.17g", kind_name(g.kind), g.q0,
                          g.theta);
            out << buf << "\n";
        } else {
            out << kind_name(g.kind) << " " << g.q0 << "\n";
        }
    }
    return out.str();
}

Circuit Circuit::import_text(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    Circuit c;
    if (!(in >> tag >> c.width) || tag != "width") {
        throw CircuitError("missing width header");
    }
    while (in >> tag) {
        if (tag == "CNOT") {
            int a, b;
            in >> a >> b;
            c.append(Gate::cnot(a, b));
        } else if (tag == "RX" || tag == "RZ") {
            int q;
            double th;
            in >> q >> th;
            c.append(tag == "RX" ? Gate::rx(q, th) : Gate::rz(q, th));
        } else if (tag == "H" || tag == "S" || tag == "SDG" || tag == "X") {
            int q;
            in >> q;
            if (tag == "H") c.append(Gate::h(q));
            else if (tag == "S") c.append(Gate::s(q));
            else if (tag == "SDG") c.append(Gate::sdg(q));
            else c.append(Gate::x(q));
        } else {
            throw CircuitError("unknown gate: " + tag);
        }
    }
    return c;
}

Circuit ground_state_ansatz(double theta, int width) {
    if (width < 4) throw CircuitError("ansatz needs at least 4 qubits");
    Circuit c(width);
    for (int q = 0; q < 4; ++q) c.append(Gate::x(q));
    c.append(Gate::rx(2, theta));
    c.append(Gate::cnot(2, 1));
    c.append(Gate::s(1));
    c.append(Gate::x(2));
    c.append(Gate::h(1));
    c.append(Gate::h(2));
    c.append(Gate::cnot(1, 0));
    c.append(Gate::cnot(2, 3));
    return c;
}

double optimize_ansatz_angle(double u, double v) {
    if (v == 0.0) throw CircuitError("V = 0: degenerate ground space");
    PauliSum h = jw_aim_hamiltonian(AimParameters::half_filled_two_site(u, std::abs(v)));
    dense::Matrix hm = dense::sum_matrix(h);
    auto energy = [&](double th) {
        dense::Matrix uc = unitary_of(ground_state_ansatz(th));
        dense::Vector psi = uc.col(0);  // acting on |0000>
        return std::real(psi.dot(hm * psi));
    };
    // Scan for a bracket, then Brent.
    const int coarse = 64;
    double best_theta = -M_PI, best_e = energy(-M_PI);
    for (int i = 1; i < coarse; ++i) {
        double th = -M_PI + 2.0 * M_PI * i / coarse;
        double e = energy(th);
        if (e < best_e) {
            best_e = e;
            best_theta = th;
        }
    }
    double span = 2.0 * M_PI / coarse;
    auto r = optim::brent_minimize(energy, best_theta - span, best_theta + span, 1e-12);
    return r.x;
}

Circuit compile_pauli_exponential(const PauliTerm& p, double theta, int width,
                                  bool linear_chain) {
    if (!p.is_hermitian()) throw CircuitError("need a Hermitian Pauli term");
    if (width < 0) width = p.n;
    if (width < p.n) throw CircuitError("width smaller than string length");
    Circuit c(width);
    if (p.is_identity_string()) return c;  // global phase only

    const double eff = theta * p.coeff * p.sign();
    std::vector<int> supports;
    for (int q = 0; q < p.n; ++q) {
        if (((p.x_bits | p.z_bits) >> q) & 1) supports.push_back(q);
    }

    Circuit basis(width);
    for (int q : supports) {
        bool x = (p.x_bits >> q) & 1, z = (p.z_bits >> q) & 1;
        if (x && z) {  // Y: Sdg then H maps Y -> Z
            basis.append(Gate::sdg(q));
            basis.append(Gate::h(q));
        } else if (x) {
            basis.append(Gate::h(q));
        }
    }
    c.append(basis);

    // Parity ladder onto the last support qubit, with restoring SWAPs when
    // restricted to nearest-neighbor CNOTs.
    std::vector<Gate> swaps;
    std::vector<int> pos = supports;
    auto emit_swap = [&](Circuit& dst, int a, int b) {
        dst.append(Gate::cnot(a, b));
        dst.append(Gate::cnot(b, a));
        dst.append(Gate::cnot(a, b));
    };
    if (linear_chain) {
        for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
            while (pos[i] < pos[i + 1] - 1) {
                emit_swap(c, pos[i], pos[i] + 1);
                swaps.push_back(Gate::cnot(pos[i], pos[i] + 1));  // marker
                ++pos[i];
            }
        }
    }
    Circuit ladder(width);
    for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
        ladder.append(Gate::cnot(pos[i], pos[i + 1]));
    }
    c.append(ladder);
    c.append(Gate::rz(pos.back(), 2.0 * eff));
    for (auto it = ladder.gates.rbegin(); it != ladder.gates.rend(); ++it) c.append(*it);
    for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) {
        emit_swap(c, it->q0, it->q1);
    }

    // Undo the basis layer (reverse order, inverse gates).
    for (auto it = basis.gates.rbegin(); it != basis.gates.rend(); ++it) {
        if (it->kind == GateKind::Sdg) c.append(Gate::s(it->q0));
        else c.append(Gate::h(it->q0));
    }
    return c;
}

Circuit greens_prefix(const cartan::CartanSolution& sol, double theta_gs) {
    if (sol.n != 4) throw CircuitError("Green's function circuit needs 4 system qubits");
    if (!sol.k_abelian) {
        throw CircuitError("k is not abelian; simple product compilation unavailable");
    }
    const int width = 5;
    Circuit c(width);
    c.append(ground_state_ansatz(theta_gs, width));
    // e^{-i k0} folded into preparation ([k0, X0] = 0).
    for (std::size_t j : sol.k0_indices) {
        c.append(compile_pauli_exponential(sol.k_basis[j], sol.kappa[j], width));
    }
    c.append(Gate::h(kGreensAncilla));
    c.append(Gate::cnot(kGreensAncilla, 0));
    for (std::size_t j : sol.k1_indices) {
        c.append(compile_pauli_exponential(sol.k_basis[j], sol.kappa[j], width));
    }
    return c;
}

Circuit greens_suffix(const cartan::CartanSolution& sol, double t) {
    if (sol.n != 4) throw CircuitError("Green's function circuit needs 4 system qubits");
    const int width = 5;
    Circuit c(width);
    // Only these Rz angles depend on t; the gate sequence shape is fixed.
    for (std::size_t j = 0; j < sol.h_basis.size(); ++j) {
        c.append(compile_pauli_exponential(sol.h_basis[j], t * sol.eta[j], width));
    }
    for (std::size_t idx = sol.k1_indices.size(); idx-- > 0;) {
        std::size_t j = sol.k1_indices[idx];
        c.append(compile_pauli_exponential(sol.k_basis[j], -sol.kappa[j], width));
    }
    c.append(Gate::cnot(kGreensAncilla, 0));
    c.append(Gate::h(kGreensAncilla));
    return c;
}

Circuit greens_function_circuit(const cartan::CartanSolution& sol, double t,
                                double theta_gs) {
    Circuit c = greens_prefix(sol, theta_gs);
    c.append(greens_suffix(sol, t));
    return c;
}

namespace {

// Index of the next gate after i acting on any qubit of gates[i]; -1 if none.
int next_overlapping(const std::vector<Gate>& gates, std::size_t i) {
    const Gate& g = gates[i];
    for (std::size_t j = i + 1; j < gates.size(); ++j) {
        if (gates[j].touches(g.q0) || (g.kind == GateKind::Cnot && gates[j].touches(g.q1))) {
            return static_cast<int>(j);
        }
    }
    return -1;
}

bool rotation_is_identity(double theta) {
    double r = std::remainder(theta, 2.0 * M_PI);
    return std::abs(r) < 1e-12;
}

}  // namespace

Circuit optimize_circuit(const Circuit& c) {
    Circuit out = c;
    auto& gates = out.gates;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < gates.size() && !changed; ++i) {
            Gate& g = gates[i];
            if (kind_has_theta(g.kind) && rotation_is_identity(g.theta)) {
                gates.erase(gates.begin() + static_cast<long>(i));
                changed = true;
                break;
            }
            int jn = next_overlapping(gates, i);
            if (jn < 0) continue;
            std::size_t j = static_cast<std::size_t>(jn);
            const Gate& h = gates[j];
            // For a CNOT the "next overlapping" gate may touch only one of
            // the two operands; cancellation needs both free in between,
            // which the single scan guarantees only when the pair matches.
            bool cancel_pair = false;
            if (g.kind == GateKind::Cnot && h.kind == GateKind::Cnot &&
                g.q0 == h.q0 && g.q1 == h.q1) {
                // Ensure no gate between touches either operand.
                bool clean = true;
                for (std::size_t m = i + 1; m < j; ++m) {
                    if (gates[m].touches(g.q0) || gates[m].touches(g.q1)) {
                        clean = false;
                        break;
                    }
                }
                cancel_pair = clean;
            } else if (g.kind == h.kind && g.q0 == h.q0 && g.kind == GateKind::H) {
                cancel_pair = true;
            } else if (g.q0 == h.q0 &&
                       ((g.kind == GateKind::S && h.kind == GateKind::Sdg) ||
                        (g.kind == GateKind::Sdg && h.kind == GateKind::S))) {
                cancel_pair = true;
            } else if (g.kind == h.kind && g.q0 == h.q0 && g.kind == GateKind::X) {
                cancel_pair = true;
            } else if (g.kind == h.kind && g.q0 == h.q0 &&
                       (g.kind == GateKind::Rz || g.kind == GateKind::Rx)) {
                g.theta += h.theta;
                gates.erase(gates.begin() + static_cast<long>(j));
                changed = true;
                break;
            }
            if (cancel_pair) {
                gates.erase(gates.begin() + static_cast<long>(j));
                gates.erase(gates.begin() + static_cast<long>(i));
                changed = true;
            }
        }
    }
    return out;
}

Circuit transpile_linear(const Circuit& c) {
    // Chain with the Green's-function ancilla at one end for width 5.
    std::vector<int> chain(c.width);
    if (c.width == 5) {
        chain = {4, 0, 1, 2, 3};
    } else {
        for (int q = 0; q < c.width; ++q) chain[q] = q;
    }
    std::vector<int> pos(c.width);  // qubit -> chain position
    for (int i = 0; i < c.width; ++i) pos[chain[i]] = i;

    Circuit out(c.width);
    auto swap_at = [&](int pa, int pb) {  // adjacent chain positions
        out.append(Gate::cnot(chain[pa], chain[pb]));
        out.append(Gate::cnot(chain[pb], chain[pa]));
        out.append(Gate::cnot(chain[pa], chain[pb]));
    };
    for (const Gate& g : c.gates) {
        if (g.kind != GateKind::Cnot) {
            out.append(g);
            continue;
        }
        int pa = pos[g.q0], pb = pos[g.q1];
        if (std::abs(pa - pb) == 1) {
            out.append(g);
            continue;
        }
        // Bubble the control next to the target, apply, restore.
        int step = pa < pb ? 1 : -1;
        std::vector<int> moves;
        for (int p = pa; std::abs(p - pb) > 1; p += step) {
            swap_at(p, p + step);
            moves.push_back(p);
        }
        out.append(Gate::cnot(chain[pb - step], chain[pb]));
        for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
            swap_at(*it, *it + step);
        }
    }
    return out;
}

dense::Matrix unitary_of(const Circuit& c) {
    const long dim = 1L << c.width;
    dense::Matrix u = dense::Matrix::Identity(dim, dim);
    const dense::Cplx im(0.0, 1.0);
    for (const Gate& g : c.gates) {
        if (g.kind == GateKind::Cnot) {
            dense::Matrix m = dense::Matrix::Zero(dim, dim);
            for (long i = 0; i < dim; ++i) {
                long j = (i >> g.q0) & 1 ? i ^ (1L << g.q1) : i;
                m(j, i) = 1.0;
            }
            u = m * u;
            continue;
        }
        Eigen::Matrix2cd k;
        switch (g.kind) {
            case GateKind::H: k << 1, 1, 1, -1; k /= std::sqrt(2.0); break;
            case GateKind::S: k << 1, 0, 0, im; break;
            case GateKind::Sdg: k << 1, 0, 0, -im; break;
            case GateKind::X: k << 0, 1, 1, 0; break;
            case GateKind::Rx:
                k << std::cos(g.theta / 2), -im * std::sin(g.theta / 2),
                     -im * std::sin(g.theta / 2), std::cos(g.theta / 2);
                break;
            case GateKind::Rz:
                k << std::exp(-im * (g.theta / 2)), 0, 0, std::exp(im * (g.theta / 2));
                break;
            default: throw CircuitError("unreachable");
        }
        dense::Matrix m = dense::Matrix::Zero(dim, dim);
        for (long i = 0; i < dim; ++i) {
            long bit = (i >> g.q0) & 1;
            long flip = i ^ (1L << g.q0);
            m(i, i) += k(bit, bit);
            m(flip, i) += k(bit ^ 1, bit);
        }
        u = m * u;
    }
    return u;
}

}  // namespace aimdmft::circuit
