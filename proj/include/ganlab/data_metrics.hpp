#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/density.hpp"
#include "ganlab/rng.hpp"

// Synthetic data: the 2D Gaussian ring, latent noise, the mode-coverage
// metric, and the 1-d toy scenarios used by the loss-curve and gradient
// tools.

namespace ganlab {

struct RingSpec {
    int n_modes = 8;
    double radius = 1.0;
    double variance = 1e-4;
    int n_samples = 50000;
};

inline void validate(const RingSpec& s) {
    if (s.n_modes < 1) throw std::invalid_argument("RingSpec: n_modes must be >= 1");
    if (!(s.radius > 0.0)) throw std::invalid_argument("RingSpec: radius must be positive");
    if (!(s.variance > 0.0)) throw std::invalid_argument("RingSpec: variance must be positive");
    if (s.n_samples < 0) throw std::invalid_argument("RingSpec: n_samples must be >= 0");
}

inline Eigen::MatrixXd mode_means(const RingSpec& s) {
    validate(s);
    Eigen::MatrixXd m(s.n_modes, 2);
    for (int i = 0; i < s.n_modes; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / s.n_modes;
        m(i, 0) = s.radius * std::cos(theta);
        m(i, 1) = s.radius * std::sin(theta);
    }
    return m;
}

// One row per sample. Mode index uniform, isotropic Gaussian noise with
// sigma = sqrt(variance). Pass modes_out to also receive each row's mode.
inline Eigen::MatrixXd sample_ring(const RingSpec& spec, std::uint64_t seed,
                                   std::vector<int>* modes_out = nullptr) {
    validate(spec);
    Rng rng(seed);
    const Eigen::MatrixXd means = mode_means(spec);
    const double sigma = std::sqrt(spec.variance);
    Eigen::MatrixXd x(spec.n_samples, 2);
    if (modes_out) {
        modes_out->clear();
        modes_out->reserve(static_cast<std::size_t>(spec.n_samples));
    }
    for (int i = 0; i < spec.n_samples; ++i) {
        const int mode = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.n_modes)));
        x(i, 0) = means(mode, 0) + sigma * rng.normal();
        x(i, 1) = means(mode, 1) + sigma * rng.normal();
        if (modes_out) modes_out->push_back(mode);
    }
    return x;
}

// Count of modes having at least one sample within 3*sqrt(variance) of the
// mode mean (Euclidean).
inline int mode_coverage(const Eigen::MatrixXd& samples, const RingSpec& spec) {
    validate(spec);
    if (samples.cols() != 2) throw std::invalid_argument("mode_coverage: samples must be n x 2");
    const Eigen::MatrixXd means = mode_means(spec);
    const double r = 3.0 * std::sqrt(spec.variance);
    const double r2 = r * r;
    int covered = 0;
    for (int m = 0; m < spec.n_modes; ++m) {
        bool hit = false;
        for (Eigen::Index i = 0; i < samples.rows() && !hit; ++i) {
            const double dx = samples(i, 0) - means(m, 0);
            const double dy = samples(i, 1) - means(m, 1);
            hit = dx * dx + dy * dy <= r2;
        }
        covered += hit ? 1 : 0;
    }
    return covered;
}

inline Eigen::MatrixXd latent_noise(int dim, int n, std::uint64_t seed) {
    if (dim < 0 || n < 0) throw std::invalid_argument("latent_noise: dims must be >= 0");
    Rng rng(seed);
    Eigen::MatrixXd z(n, dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) z(i, j) = rng.normal();
    return z;
}

// ---------------------------------------------------------------------------
// 1-d toy scenarios

struct Scenario {
    std::string name;
    Density1D p_r;
    Density1D p_g;
};

inline Scenario figure_scenario(const std::string& name) {
    if (name == "fig1")
        return {name, make_gaussian(-2.0, 0.5), make_gaussian(2.0, 0.5)};
    if (name == "fig4")
        return {name, make_mixture({{0.5, 2.0, 0.5}, {0.5, 3.0, 0.5}}), make_gaussian(2.0, 0.5)};
    if (name == "fig6")
        return {name, make_mixture({{0.5, 1.0, 0.3}, {0.5, 4.0, 0.3}}), make_gaussian(4.0, 0.3)};
    if (name == "fig7")
        return {name, make_gaussian(4.0, 0.5),
                make_mixture({{0.1, 1.0, 1.0 / 9.0}, {0.9, 3.9, 0.5}})};
    throw std::invalid_argument("figure_scenario: unknown scenario '" + name +
                                "' (expected fig1, fig4, fig6, or fig7)");
}

inline std::vector<std::string> scenario_names() { return {"fig1", "fig4", "fig6", "fig7"}; }

// ---------------------------------------------------------------------------
// CSV export (x, y, mode_index)

inline void write_ring_csv(std::ostream& os, const Eigen::MatrixXd& samples,
                           const std::vector<int>& modes) {
    if (samples.cols() != 2 || static_cast<std::size_t>(samples.rows()) != modes.size())
        throw std::invalid_argument("write_ring_csv: samples/modes shape mismatch");
    os << "x,y,mode_index\n";
    char buf[96];
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", samples(i, 0), samples(i, 1),
                      modes[static_cast<std::size_t>(i)]);
        os << buf;
    }
}

}  // namespace ganlab
