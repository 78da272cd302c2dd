#include "sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace aimdmft::sim {

namespace {

using circuit::Gate;
using circuit::GateKind;

Eigen::Matrix2cd gate_kernel(const Gate& g) {
    const dense::Cplx im(0.0, 1.0);
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
        default: throw SimError("no kernel for CNOT");
    }
    return k;
}

void apply_1q_vec(Eigen::VectorXcd& v, int q, const Eigen::Matrix2cd& k) {
    const long dim = v.size();
    const long bit = 1L << q;
    for (long i = 0; i < dim; ++i) {
        if (i & bit) continue;
        dense::Cplx a = v[i], b = v[i | bit];
        v[i] = k(0, 0) * a + k(0, 1) * b;
        v[i | bit] = k(1, 0) * a + k(1, 1) * b;
    }
}

void apply_cnot_vec(Eigen::VectorXcd& v, int c, int t) {
    const long dim = v.size();
    const long cb = 1L << c, tb = 1L << t;
    for (long i = 0; i < dim; ++i) {
        if ((i & cb) && !(i & tb)) std::swap(v[i], v[i | tb]);
    }
}

void apply_gate_vec(Eigen::VectorXcd& v, const Gate& g) {
    if (g.kind == GateKind::Cnot) apply_cnot_vec(v, g.q0, g.q1);
    else apply_1q_vec(v, g.q0, gate_kernel(g));
}

void apply_gate_rho(Eigen::MatrixXcd& rho, const Gate& g) {
    const long dim = rho.rows();
    if (g.kind == GateKind::Cnot) {
        const long cb = 1L << g.q0, tb = 1L << g.q1;
        for (long col = 0; col < dim; ++col) {  // rho -> U rho
            for (long i = 0; i < dim; ++i) {
                if ((i & cb) && !(i & tb)) std::swap(rho(i, col), rho(i | tb, col));
            }
        }
        for (long row = 0; row < dim; ++row) {  // -> (U rho) U^dag
            for (long j = 0; j < dim; ++j) {
                if ((j & cb) && !(j & tb)) std::swap(rho(row, j), rho(row, j | tb));
            }
        }
        return;
    }
    const Eigen::Matrix2cd k = gate_kernel(g);
    const long bit = 1L << g.q0;
    for (long col = 0; col < dim; ++col) {
        for (long i = 0; i < dim; ++i) {
            if (i & bit) continue;
            dense::Cplx a = rho(i, col), b = rho(i | bit, col);
            rho(i, col) = k(0, 0) * a + k(0, 1) * b;
            rho(i | bit, col) = k(1, 0) * a + k(1, 1) * b;
        }
    }
    const Eigen::Matrix2cd kc = k.conjugate();
    for (long row = 0; row < dim; ++row) {
        for (long j = 0; j < dim; ++j) {
            if (j & bit) continue;
            dense::Cplx a = rho(row, j), b = rho(row, j | bit);
            rho(row, j) = kc(0, 0) * a + kc(0, 1) * b;
            rho(row, j | bit) = kc(1, 0) * a + kc(1, 1) * b;
        }
    }
}

// Two-qubit depolarizing: rho -> (1-eps) rho + eps (I_4/4 (x) Tr_{ab} rho).
void depolarize_pair(Eigen::MatrixXcd& rho, int a, int b, double eps) {
    if (eps == 0.0) return;
    const long dim = rho.rows();
    const long ab = (1L << a) | (1L << b);
    // Partial trace over {a,b}, indexed by the remaining bits.
    std::vector<dense::Cplx> traced(static_cast<std::size_t>(dim * dim), 0.0);
    auto rest = [&](long i) { return i & ~ab; };
    for (long i = 0; i < dim; ++i) {
        for (long j = 0; j < dim; ++j) {
            if ((i & ab) != (j & ab)) continue;
            traced[static_cast<std::size_t>(rest(i) * dim + rest(j))] += rho(i, j);
        }
    }
    rho *= (1.0 - eps);
    const long abit = 1L << a, bbit = 1L << b;
    for (long i = 0; i < dim; ++i) {
        if (i & ab) continue;
        for (long j = 0; j < dim; ++j) {
            if (j & ab) continue;
            dense::Cplx w = 0.25 * eps * traced[static_cast<std::size_t>(i * dim + j)];
            rho(i, j) += w;
            rho(i | abit, j | abit) += w;
            rho(i | bbit, j | bbit) += w;
            rho(i | ab, j | ab) += w;
        }
    }
}

}  // namespace

bool NoiseModel::ideal_readout() const {
    for (const ReadoutFlip& f : readout) {
        if (f.p10 != 0.0 || f.p01 != 0.0) return false;
    }
    return true;
}

std::vector<double> QuantumState::probabilities() const {
    std::vector<double> p(static_cast<std::size_t>(dim()));
    if (mode == Mode::statevector) {
        for (long i = 0; i < dim(); ++i) p[static_cast<std::size_t>(i)] = std::norm(vec[i]);
    } else {
        for (long i = 0; i < dim(); ++i) {
            p[static_cast<std::size_t>(i)] = std::max(0.0, std::real(rho(i, i)));
        }
    }
    return p;
}

QuantumState initial_state(int n, bool density) {
    QuantumState s;
    s.n = n;
    if (density) {
        s.mode = QuantumState::Mode::density;
        s.rho = Eigen::MatrixXcd::Zero(s.dim(), s.dim());
        s.rho(0, 0) = 1.0;
    } else {
        s.mode = QuantumState::Mode::statevector;
        s.vec = Eigen::VectorXcd::Zero(s.dim());
        s.vec[0] = 1.0;
    }
    return s;
}

void apply(QuantumState& state, const circuit::Circuit& c, const NoiseModel* noise) {
    if (c.width != state.n) throw SimError("circuit width does not match state");
    const bool noisy = noise != nullptr && !noise->ideal_gates();
    if (noisy && state.mode != QuantumState::Mode::density) {
        throw SimError("noisy propagation needs a density matrix");
    }
    for (const Gate& g : c.gates) {
        if (state.mode == QuantumState::Mode::statevector) {
            apply_gate_vec(state.vec, g);
        } else {
            apply_gate_rho(state.rho, g);
            if (noisy && g.kind == GateKind::Cnot) {
                depolarize_pair(state.rho, g.q0, g.q1, noise->cnot_depolarizing);
            }
        }
    }
}

QuantumState run(const circuit::Circuit& c, const NoiseModel* noise) {
    const bool noisy = noise != nullptr && !noise->ideal_gates();
    if (noisy) {
        if (c.width > kDensityCap) throw SimError("width over density-matrix cap");
    } else if (c.width > kStatevectorCap) {
        throw SimError("width over statevector cap");
    }
    QuantumState s = initial_state(c.width, noisy);
    apply(s, c, noise);
    return s;
}

double expectation_z(const QuantumState& state, int qubit) {
    if (qubit < 0 || qubit >= state.n) throw SimError("qubit index out of range");
    std::vector<double> p = state.probabilities();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += (i >> qubit) & 1 ? -p[i] : p[i];
    }
    return acc;
}

std::string ShotRecord::to_text(int n_qubits) const {
    std::ostringstream out;
    out << "shots " << total_shots << " retained " << post_selected << "\n";
    for (const auto& [outcome, count] : counts) {
        std::string bits(static_cast<std::size_t>(n_qubits), '0');
        for (int q = 0; q < n_qubits; ++q) {
            if ((outcome >> q) & 1) bits[static_cast<std::size_t>(q)] = '1';
        }
        out << bits << " " << count
            << (in_half_filled_sector(outcome) ? " keep" : " drop") << "\n";
    }
    return out.str();
}

ShotRecord sample_shots(const QuantumState& state, std::uint64_t shots,
                        const NoiseModel& noise, std::uint64_t seed) {
    if (shots < 1) throw SimError("need at least one shot");
    std::vector<double> p = state.probabilities();
    // Readout confusion per qubit.
    for (int q = 0; q < state.n && q < static_cast<int>(noise.readout.size()); ++q) {
        const ReadoutFlip& f = noise.readout[static_cast<std::size_t>(q)];
        if (f.p10 == 0.0 && f.p01 == 0.0) continue;
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i & bit) continue;
            double p0 = p[i], p1 = p[i | bit];
            p[i] = (1.0 - f.p10) * p0 + f.p01 * p1;
            p[i | bit] = f.p10 * p0 + (1.0 - f.p01) * p1;
        }
    }
    // Cumulative distribution; tolerate rounding by normalizing.
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        cdf[i] = acc;
    }
    if (acc <= 0.0) throw SimError("zero-probability state");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, acc);
    ShotRecord rec;
    rec.total_shots = shots;
    rec.post_selected = shots;
    for (std::uint64_t s = 0; s < shots; ++s) {
        double r = uni(rng);
        auto it = std::lower_bound(cdf.begin(), cdf.end(), r);
        std::uint64_t outcome = static_cast<std::uint64_t>(it - cdf.begin());
        if (outcome >= p.size()) outcome = p.size() - 1;
        ++rec.counts[outcome];
    }
    return rec;
}

std::vector<double> mitigate_readout(const ShotRecord& record, int n_qubits,
                                     const NoiseModel& noise) {
    std::vector<double> p(std::size_t{1} << n_qubits, 0.0);
    for (const auto& [outcome, count] : record.counts) {
        p[outcome] = static_cast<double>(count) / static_cast<double>(record.total_shots);
    }
    for (int q = 0; q < n_qubits && q < static_cast<int>(noise.readout.size()); ++q) {
        const ReadoutFlip& f = noise.readout[static_cast<std::size_t>(q)];
        if (f.p10 == 0.0 && f.p01 == 0.0) continue;
        double det = 1.0 - f.p10 - f.p01;
        if (std::abs(det) < 1e-12) throw SimError("singular readout confusion matrix");
        // Inverse of [[1-p10, p01], [p10, 1-p01]] applied on qubit q.
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i & bit) continue;
            double m0 = p[i], m1 = p[i | bit];
            p[i] = ((1.0 - f.p01) * m0 - f.p01 * m1) / det;
            p[i | bit] = (-f.p10 * m0 + (1.0 - f.p10) * m1) / det;
        }
    }
    double total = 0.0;
    for (double& x : p) {
        if (x < 0.0) x = 0.0;
        total += x;
    }
    if (total <= 0.0) throw SimError("mitigation produced an empty distribution");
    for (double& x : p) x /= total;
    return p;
}

bool in_half_filled_sector(std::uint64_t outcome) {
    bool up = ((outcome >> 0) & 1) != ((outcome >> 1) & 1);
    bool down = ((outcome >> 2) & 1) != ((outcome >> 3) & 1);
    return up && down;
}

ShotRecord post_select(const ShotRecord& record) {
    ShotRecord out;
    out.total_shots = record.total_shots;
    for (const auto& [outcome, count] : record.counts) {
        if (in_half_filled_sector(outcome)) {
            out.counts[outcome] = count;
            out.post_selected += count;
        }
    }
    if (out.post_selected == 0) {
        throw SimError("post-selection retained zero shots");
    }
    return out;
}

double post_select_distribution(std::vector<double>& probs) {
    double kept = 0.0, total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        total += probs[i];
        if (in_half_filled_sector(i)) kept += probs[i];
        else probs[i] = 0.0;
    }
    if (kept <= 0.0) throw SimError("post-selection retained zero weight");
    for (double& x : probs) x /= kept;
    return total > 0.0 ? kept / total : 0.0;
}

double ancilla_expectation(const std::vector<double>& probs, int ancilla) {
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += (i >> ancilla) & 1 ? -probs[i] : probs[i];
    }
    return acc;
}

}  // namespace aimdmft::sim
