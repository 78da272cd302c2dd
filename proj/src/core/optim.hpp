#pragma once

#include <cmath>
#include <functional>

// Small shared 1-D minimizer (Brent's method, bounded).

namespace aimdmft::optim {

struct BrentResult {
    double x;
    double f;
};

template <typename F>
BrentResult brent_minimize(F&& f, double a, double b, double xtol = 1e-10,
                           int max_iter = 200) {
    const double golden = 0.3819660112501051;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        double mid = 0.5 * (a + b);
        double tol1 = xtol * std::abs(x) + 1e-15;
        double tol2 = 2.0 * tol1;
        if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) break;

        bool golden_step = true;
        if (std::abs(e) > tol1) {
            // Parabolic fit through x, v, w.
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            double etmp = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * etmp) && p > q * (a - x) &&
                p < q * (b - x)) {
                d = p / q;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = x < mid ? tol1 : -tol1;
                golden_step = false;
            }
        }
        if (golden_step) {
            e = (x < mid ? b : a) - x;
            d = golden * e;
        }
        double u = std::abs(d) >= tol1 ? x + d : x + (d > 0 ? tol1 : -tol1);
        double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {x, fx};
}

}  // namespace aimdmft::optim
