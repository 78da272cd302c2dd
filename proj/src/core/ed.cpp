#include "ed.hpp"

#include <algorithm>
#include <cmath>

namespace aimdmft::ed {

double Spectrum::greens(double t) const {
    double acc = 0.0;
    for (const Pole& p : poles) acc += p.weight * std::cos(p.omega * t);
    return acc;
}

Spectrum lehmann(const PauliSum& hamiltonian) {
    const auto es = dense::hermitian_eigen(dense::sum_matrix(hamiltonian));
    const long dim = es.values.size();
    if (dim > 1 && es.values[1] - es.values[0] < 1e-10) {
        throw PauliError("degenerate ground state in Lehmann solver");
    }
    dense::Vector psi0 = es.vectors.col(0);
    dense::Matrix x0 =
        dense::term_matrix(PauliTerm::single(hamiltonian.n(), 0, 'X'));
    dense::Vector excited = x0 * psi0;

    Spectrum out;
    out.ground_energy = es.values[0];
    std::vector<Pole> raw;
    for (long k = 0; k < dim; ++k) {
        double w = std::norm(es.vectors.col(k).dot(excited));
        if (w > 1e-12) raw.push_back({es.values[k] - es.values[0], w});
    }
    std::sort(raw.begin(), raw.end(),
              [](const Pole& a, const Pole& b) { return a.omega < b.omega; });
    // Particle and hole branches contribute at the same |omega|; cluster them.
    for (const Pole& p : raw) {
        if (!out.poles.empty() && std::abs(out.poles.back().omega - p.omega) < 1e-8) {
            out.poles.back().weight += p.weight;
        } else {
            out.poles.push_back(p);
        }
    }
    return out;
}

Spectrum lehmann(double u, double v) {
    return lehmann(jw_aim_hamiltonian(AimParameters::half_filled_two_site(u, v)));
}

TwoPole two_pole(const Spectrum& s) {
    TwoPole t;
    if (s.poles.empty()) throw PauliError("no Green's function poles");
    if (s.poles.size() == 1) {
        t.omega1 = t.omega2 = s.poles[0].omega;
        t.alpha1 = t.alpha2 = s.poles[0].weight / 4.0;
        return t;
    }
    if (s.poles.size() != 2) throw PauliError("expected a two-pole spectrum");
    t.omega1 = s.poles[0].omega;
    t.omega2 = s.poles[1].omega;
    t.alpha1 = s.poles[0].weight / 2.0;
    t.alpha2 = s.poles[1].weight / 2.0;
    return t;
}

GroundState ground_state(const PauliSum& hamiltonian, double gap_tol) {
    const auto es = dense::hermitian_eigen(dense::sum_matrix(hamiltonian));
    if (es.values.size() > 1 && es.values[1] - es.values[0] < gap_tol) {
        throw PauliError("degenerate ground state");
    }
    return {es.values[0], es.vectors.col(0)};
}

dense::Cplx correlation(const PauliSum& hamiltonian, const PauliTerm& a,
                        const PauliTerm& b, double t) {
    const auto es = dense::hermitian_eigen(dense::sum_matrix(hamiltonian));
    dense::Vector psi0 = es.vectors.col(0);
    dense::Matrix u = dense::evolution_operator(es, t);
    dense::Matrix am = dense::term_matrix(a);
    dense::Matrix bm = dense::term_matrix(b);
    // <psi0| U^dag A U B |psi0>
    dense::Vector right = u * (bm * psi0);
    dense::Vector left = u * psi0;
    return left.dot(am * right);
}

}  // namespace aimdmft::ed
