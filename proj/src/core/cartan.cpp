#include "cartan.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

namespace aimdmft::cartan {

namespace {

using Key = std::pair<std::uint64_t, std::uint64_t>;

Key key_of(const PauliTerm& t) { return {t.x_bits, t.z_bits}; }

// i[p, s] for a unit string p: i[p,q] = 2i(pq) for anticommuting p,q, and
// 2i * (+/- i) folds to a real sign, so coefficients stay real.
PauliSum i_commutator(const PauliTerm& p, const PauliSum& s) {
    std::vector<PauliSum::Entry> entries;
    entries.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        PauliTerm q = s.term_at(i);
        if (strings_commute(p, q)) continue;
        PauliTerm pq = multiply(p, q);
        double sign = pq.phase_pow == 1 ? -1.0 : 1.0;
        entries.push_back({pq.x_bits, pq.z_bits, 2.0 * sign * pq.coeff});
    }
    return PauliSum::from_entries(s.n(), std::move(entries));
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

PauliSum cartan_v(const std::vector<PauliTerm>& h_basis) {
    if (h_basis.empty()) throw CartanError("empty h basis");
    const double gamma = M_PI;
    std::vector<double> coeffs(h_basis.size());
    double c = 1.0;
    for (std::size_t j = 0; j < h_basis.size(); ++j) {
        c *= gamma;  // gamma^{j+1}
        coeffs[j] = c;
        if (std::abs(c) > 1e100) c /= 1e100;  // overflow guard for huge h
    }
    // Scale to unit trace norm: f is linear in v, so the extremum set is
    // unchanged and objective/gradient magnitudes stay O(||H||).
    double nrm = 0.0;
    for (double x : coeffs) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (double& x : coeffs) x /= nrm;
    PauliSum v(h_basis.front().n);
    for (std::size_t j = 0; j < h_basis.size(); ++j) {
        v.add(h_basis[j].x_bits, h_basis[j].z_bits, coeffs[j]);
    }
    return v;
}

double objective(const std::vector<double>& kappa,
                 const std::vector<PauliTerm>& k_basis, const PauliSum& v,
                 const PauliSum& hamiltonian) {
    if (kappa.size() != k_basis.size()) {
        throw CartanError("kappa / k-basis dimension mismatch");
    }
    PauliSum w = v;
    for (std::size_t j = k_basis.size(); j-- > 0;) {
        w = adjoint_rotate(kappa[j], k_basis[j], w);
    }
    return trace_inner(w, hamiltonian);
}

std::vector<double> objective_gradient(const std::vector<double>& kappa,
                                       const std::vector<PauliTerm>& k_basis,
                                       const PauliSum& v,
                                       const PauliSum& hamiltonian) {
    const std::size_t dim = k_basis.size();
    if (kappa.size() != dim) throw CartanError("kappa / k-basis dimension mismatch");
    // Suffix conjugations S_j = Ad_{F_j ... F_{J-1}}(v), F_j = e^{i kappa_j k_j}.
    std::vector<PauliSum> suffix(dim + 1);
    suffix[dim] = v;
    for (std::size_t j = dim; j-- > 0;) {
        suffix[j] = adjoint_rotate(kappa[j], k_basis[j], suffix[j + 1]);
    }
    // grad_j = < i[k_j, S_j], Ad_{(F_0...F_{j-1})^dag}(H) >.
    std::vector<double> grad(dim);
    PauliSum pulled = hamiltonian;
    for (std::size_t j = 0; j < dim; ++j) {
        grad[j] = trace_inner(i_commutator(k_basis[j], suffix[j]), pulled);
        pulled = adjoint_rotate(-kappa[j], k_basis[j], pulled);
    }
    return grad;
}

PauliSum conjugated_hamiltonian(const std::vector<double>& kappa,
                                const std::vector<PauliTerm>& k_basis,
                                const PauliSum& hamiltonian) {
    PauliSum w = hamiltonian;
    for (std::size_t j = 0; j < k_basis.size(); ++j) {
        w = adjoint_rotate(-kappa[j], k_basis[j], w);
    }
    return w;
}

namespace {

struct ResidualMap {
    std::map<Key, std::size_t> off_h_index;  // g-keys outside h
    std::vector<Key> keys;
};

ResidualMap make_residual_map(const lie::Decomposition& dec) {
    ResidualMap rm;
    std::map<Key, bool> in_h;
    for (const PauliTerm& e : dec.h.elements) in_h[key_of(e)] = true;
    for (const PauliTerm& e : dec.g.elements) {
        Key k = key_of(e);
        if (!in_h.count(k)) {
            rm.off_h_index[k] = rm.keys.size();
            rm.keys.push_back(k);
        }
    }
    return rm;
}

Eigen::VectorXd residual_vector(const PauliSum& w, const ResidualMap& rm) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<long>(rm.keys.size()));
    for (const auto& e : w.terms()) {
        auto it = rm.off_h_index.find({e.x_bits, e.z_bits});
        if (it != rm.off_h_index.end()) r[static_cast<long>(it->second)] = e.coeff;
    }
    return r;
}

// BFGS with Armijo backtracking; accepted iterates are strictly
// non-increasing in f.
struct BfgsResult {
    std::vector<double> kappa;
    double f;
    double grad_norm;
    std::vector<double> f_history;
    bool converged;
};

BfgsResult bfgs_minimize(std::vector<double> kappa,
                         const std::vector<PauliTerm>& k_basis,
                         const PauliSum& v, const PauliSum& hamiltonian,
                         double gtol, int max_iter) {
    const long dim = static_cast<long>(kappa.size());
    auto fval = [&](const std::vector<double>& x) {
        return objective(x, k_basis, v, hamiltonian);
    };
    auto gval = [&](const std::vector<double>& x) {
        std::vector<double> g = objective_gradient(x, k_basis, v, hamiltonian);
        return Eigen::Map<Eigen::VectorXd>(g.data(), dim).eval();
    };

    BfgsResult res;
    res.kappa = kappa;
    res.f = fval(kappa);
    res.f_history.push_back(res.f);
    if (dim == 0) {
        res.grad_norm = 0.0;
        res.converged = true;
        return res;
    }

    Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(kappa.data(), dim);
    Eigen::VectorXd g = gval(kappa);
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);
    double f = res.f;
    double window_best = f;
    int since_progress = 0;

    for (int iter = 0; iter < max_iter; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() <= gtol) break;
        // Terminal stall: f improvements below rounding noise; the residual
        // polish owns the last digits.
        if (f < window_best - 1e-14 * (1.0 + std::abs(f))) {
            window_best = f;
            since_progress = 0;
        } else if (++since_progress > 30) {
            break;
        }
        Eigen::VectorXd d = -(hinv * g);
        double slope = g.dot(d);
        if (slope >= 0.0) {  // lost positive definiteness; restart
            hinv.setIdentity();
            d = -g;
            slope = g.dot(d);
        }
        double alpha = 1.0;
        double fnew = f;
        Eigen::VectorXd xnew = x;
        bool accepted = false;
        for (int back = 0; back < 60; ++back) {
            xnew = x + alpha * d;
            std::vector<double> xv(xnew.data(), xnew.data() + dim);
            fnew = fval(xv);
            if (fnew <= f + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;  // cannot make progress at double precision
        std::vector<double> xv(xnew.data(), xnew.data() + dim);
        Eigen::VectorXd gnew = gval(xv);
        Eigen::VectorXd s = xnew - x;
        Eigen::VectorXd y = gnew - g;
        double sy = s.dot(y);
        if (sy > 1e-14 * s.norm() * y.norm()) {
            Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
            Eigen::MatrixXd left = eye - (s * y.transpose()) / sy;
            hinv = left * hinv * left.transpose() + (s * s.transpose()) / sy;
        } else {
            hinv.setIdentity();
        }
        x = xnew;
        g = gnew;
        f = fnew;
        res.f_history.push_back(f);
    }

    res.kappa.assign(x.data(), x.data() + dim);
    res.f = f;
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    res.converged = res.grad_norm <= gtol;
    return res;
}

// Levenberg-Marquardt polish of || off-h part of Ad_K^dag(H) ||.
void polish_residual(std::vector<double>& kappa,
                     const std::vector<PauliTerm>& k_basis,
                     const PauliSum& hamiltonian, const ResidualMap& rm,
                     int max_iter) {
    const long dim = static_cast<long>(k_basis.size());
    const long rdim = static_cast<long>(rm.keys.size());
    if (dim == 0 || rdim == 0) return;

    auto forward = [&](const std::vector<double>& x) {
        // G_0 = H, G_{j+1} = Ad_{e^{-i x_j k_j}}(G_j); returns all stages.
        std::vector<PauliSum> stages(k_basis.size() + 1);
        stages[0] = hamiltonian;
        for (std::size_t j = 0; j < k_basis.size(); ++j) {
            stages[j + 1] = adjoint_rotate(-x[j], k_basis[j], stages[j]);
        }
        return stages;
    };

    double lambda = 1e-12;
    std::vector<PauliSum> stages = forward(kappa);
    Eigen::VectorXd r = residual_vector(stages.back(), rm);
    double best = r.norm();

    for (int iter = 0; iter < max_iter && best > 0.0; ++iter) {
        // Jacobian column j: Ad_{rot j+1..end}( -i[k_j, G_{j+1}] ).
        Eigen::MatrixXd jac(rdim, dim);
        for (std::size_t j = 0; j < k_basis.size(); ++j) {
            PauliSum d = i_commutator(k_basis[j], stages[j + 1]);
            // d = i[k_j, G_{j+1}]; the derivative is -d.
            for (std::size_t l = j + 1; l < k_basis.size(); ++l) {
                d = adjoint_rotate(-kappa[l], k_basis[l], d);
            }
            jac.col(static_cast<long>(j)) = -residual_vector(d, rm);
        }
        Eigen::MatrixXd a = jac.transpose() * jac;
        Eigen::VectorXd b = -jac.transpose() * r;
        bool improved = false;
        for (int attempt = 0; attempt < 8; ++attempt) {
            Eigen::MatrixXd damped = a + lambda * Eigen::MatrixXd::Identity(dim, dim);
            Eigen::VectorXd delta = damped.ldlt().solve(b);
            std::vector<double> trial = kappa;
            for (long j = 0; j < dim; ++j) trial[static_cast<std::size_t>(j)] += delta[j];
            auto trial_stages = forward(trial);
            double tn = residual_vector(trial_stages.back(), rm).norm();
            if (tn < best) {
                kappa = trial;
                stages = std::move(trial_stages);
                r = residual_vector(stages.back(), rm);
                best = tn;
                lambda = std::max(lambda * 0.25, 1e-14);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }
}

}  // namespace

CartanSolution solve(const PauliSum& hamiltonian, const lie::Decomposition& dec,
                     std::uint64_t seed, const Options& opts) {
    CartanSolution sol;
    sol.n = hamiltonian.n();
    sol.k_abelian = dec.k_abelian;
    sol.k_basis = dec.k.elements;
    sol.h_basis = dec.h.elements;
    for (std::size_t i = 0; i < sol.k_basis.size(); ++i) {
        ((sol.k_basis[i].z_bits & 1) == 0 ? sol.k0_indices : sol.k1_indices)
            .push_back(i);
    }

    PauliSum v = cartan_v(sol.h_basis);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-M_PI, M_PI);
    std::vector<double> kappa(sol.k_basis.size());
    for (double& x : kappa) x = uni(rng);

    // Gradient tolerance is relative to the objective scale (v has unit norm).
    const double scale = std::max(1.0, hamiltonian.norm());
    BfgsResult bfgs = bfgs_minimize(kappa, sol.k_basis, v, hamiltonian,
                                    opts.gradient_tol * scale, opts.max_iterations);
    sol.kappa = bfgs.kappa;
    sol.f_value = bfgs.f;
    sol.f_history = bfgs.f_history;

    ResidualMap rm = make_residual_map(dec);
    polish_residual(sol.kappa, sol.k_basis, hamiltonian, rm, opts.polish_iterations);
    if (!bfgs.converged) {
        // The polish may still have landed on an exact extremum; judge by the
        // polished gradient, otherwise report the optimizer failure.
        std::vector<double> g =
            objective_gradient(sol.kappa, sol.k_basis, v, hamiltonian);
        double gn = 0.0;
        for (double x : g) gn = std::max(gn, std::abs(x));
        if (gn > 1e3 * opts.gradient_tol * scale) {
            throw CartanError(
                "optimizer failed to reach gradient tolerance (|g| = " +
                std::to_string(gn) + ")");
        }
    }

    PauliSum w = conjugated_hamiltonian(sol.kappa, sol.k_basis, hamiltonian);
    sol.eta.assign(sol.h_basis.size(), 0.0);
    double off = 0.0;
    for (const auto& e : w.terms()) {
        bool matched = false;
        for (std::size_t j = 0; j < sol.h_basis.size(); ++j) {
            if (sol.h_basis[j].x_bits == e.x_bits && sol.h_basis[j].z_bits == e.z_bits) {
                sol.eta[j] = e.coeff;
                matched = true;
                break;
            }
        }
        if (!matched) off += e.coeff * e.coeff;
    }
    sol.residual = std::sqrt(off);

    const double tol = opts.residual_tol_factor * hamiltonian.norm();
    if (sol.residual > tol) {
        throw CartanError("spurious extremum: residual " +
                          std::to_string(sol.residual) + " above tolerance " +
                          std::to_string(tol));
    }
    return sol;
}

CartanSolution solve_with_retries(const PauliSum& hamiltonian,
                                  const lie::Decomposition& dec,
                                  std::uint64_t seed, int retries,
                                  const Options& opts) {
    std::string last;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        try {
            return solve(hamiltonian, dec, seed + 0x9e3779b97f4a7c15ULL * attempt, opts);
        } catch (const CartanError& e) {
            last = e.what();
        }
    }
    throw CartanError("all Cartan restarts failed; last: " + last);
}

std::string CartanSolution::serialize() const {
    std::ostringstream out;
    out << "cartan-solution n=" << n << " abelian=" << (k_abelian ? 1 : 0) << "\n";
    out << "k " << k_basis.size() << "\n";
    for (std::size_t j = 0; j < k_basis.size(); ++j) {
        out << k_basis[j].string_repr() << " " << format_double(kappa[j]) << "\n";
    }
    out << "h " << h_basis.size() << "\n";
    for (std::size_t j = 0; j < h_basis.size(); ++j) {
        out << h_basis[j].string_repr() << " " << format_double(eta[j]) << "\n";
    }
    out << "residual " << format_double(residual) << "\n";
    out << "f " << format_double(f_value) << "\n";
    return out.str();
}

CartanSolution CartanSolution::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    CartanSolution sol;
    int abelian = 0;
    std::string head;
    std::getline(in, head);
    if (std::sscanf(head.c_str(), "cartan-solution n=%d abelian=%d", &sol.n,
                    &abelian) != 2) {
        throw CartanError("bad solution header");
    }
    sol.k_abelian = abelian != 0;
    std::size_t count = 0;
    in >> tag >> count;
    if (tag != "k") throw CartanError("expected k section");
    for (std::size_t j = 0; j < count; ++j) {
        std::string s;
        double val;
        in >> s >> val;
        PauliTerm t = PauliTerm::from_string(s);
        sol.k_basis.push_back(t);
        sol.kappa.push_back(val);
        (((t.z_bits & 1) == 0) ? sol.k0_indices : sol.k1_indices).push_back(j);
    }
    in >> tag >> count;
    if (tag != "h") throw CartanError("expected h section");
    for (std::size_t j = 0; j < count; ++j) {
        std::string s;
        double val;
        in >> s >> val;
        sol.h_basis.push_back(PauliTerm::from_string(s));
        sol.eta.push_back(val);
    }
    in >> tag >> sol.residual;
    if (tag != "residual") throw CartanError("expected residual");
    in >> tag >> sol.f_value;
    if (tag != "f") throw CartanError("expected f");
    return sol;
}

dense::Matrix dense_k(const CartanSolution& sol) {
    const long dim = 1L << sol.n;
    dense::Matrix k = dense::Matrix::Identity(dim, dim);
    for (std::size_t j = 0; j < sol.k_basis.size(); ++j) {
        k = k * dense::string_exponential(sol.kappa[j], sol.k_basis[j]);
    }
    return k;
}

dense::Matrix khk_evolution(const CartanSolution& sol, double t) {
    const long dim = 1L << sol.n;
    dense::Matrix mid = dense::Matrix::Identity(dim, dim);
    for (std::size_t j = 0; j < sol.h_basis.size(); ++j) {
        mid = mid * dense::string_exponential(-t * sol.eta[j], sol.h_basis[j]);
    }
    dense::Matrix k = dense_k(sol);
    return k * mid * k.adjoint();
}

double reconstruction_error(const CartanSolution& sol, const PauliSum& hamiltonian,
                            double t) {
    dense::Matrix exact =
        dense::evolution_operator(dense::sum_matrix(hamiltonian), t);
    return dense::frobenius_distance(exact, khk_evolution(sol, t));
}

}  // namespace aimdmft::cartan
