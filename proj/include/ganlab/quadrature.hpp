// Adaptive Gauss-Kronrod 7/15 quadrature on a finite interval.
//
// Refinement policy is fixed and load-independent: the interval with the
// largest error estimate is bisected first, ties broken by left endpoint.
// Termination is on ABSOLUTE error (relative tolerances degenerate on the
// zero-valued integrals this library meets, e.g. a divergence of a density
// against itself). Node and weight constants are the public-domain QUADPACK
// dqk15 values.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

namespace ganlab {

struct QuadResult {
    double value = 0.0;
    double error_est = 0.0;   // achieved absolute-error estimate
    bool converged = false;
    int subdivisions = 0;
};

namespace detail {

// QUADPACK dqk15 abscissae (positive half) and weights
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkEstimate {
    double integral;
    double error;
};

template <class F>
GkEstimate gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    const double fc = f(c);
    double res_g = fc * kWg[3];
    double res_k = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double fsum = f(c - x) + f(c + x);
        res_k += kWgk[j] * fsum;
        if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
    }
    res_g *= h;
    res_k *= h;

    // QUADPACK-style sharpened error estimate
    const double diff = std::abs(res_k - res_g);
    double err = diff;
    if (diff != 0.0) {
        const double scaled = std::pow(200.0 * diff, 1.5);
        if (scaled < diff) err = scaled;
    }
    return {res_k, err};
}

struct Piece {
    double a, b, integral, error;
};

struct PieceWorse {
    bool operator()(const Piece& x, const Piece& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;  // deterministic tie-break: leftmost first
    }
};

}  // namespace detail

template <class F>
QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-7,
                     int max_subdivisions = 1 << 14) {
    QuadResult out;
    if (!(b > a)) {
        out.converged = true;
        return out;
    }

    std::priority_queue<detail::Piece, std::vector<detail::Piece>, detail::PieceWorse> heap;
    auto first = detail::gk15(f, a, b);
    heap.push({a, b, first.integral, first.error});
    double total = first.integral;
    double total_err = first.error;
    int subdivisions = 0;

    while (total_err > abs_tol && subdivisions < max_subdivisions) {
        const detail::Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {  // interval at double resolution
            heap.push(worst);
            break;
        }
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        total += left.integral + right.integral - worst.integral;
        total_err += left.error + right.error - worst.error;
        heap.push({worst.a, mid, left.integral, left.error});
        heap.push({mid, worst.b, right.integral, right.error});
        ++subdivisions;
    }

    out.value = total;
    out.error_est = total_err;
    out.converged = total_err <= abs_tol || !std::isfinite(total);
    out.subdivisions = subdivisions;
    return out;
}

}  // namespace ganlab
