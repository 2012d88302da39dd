#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/activations.hpp"
#include "ganlab/rng.hpp"

// Dense MLP with explicit forward caches, reverse-mode gradients, Adam, and a
// versioned binary snapshot format. Batches are row-major: one sample per
// row. Eigen supplies the matrix products; everything else is written out
// here so the arithmetic is auditable.

namespace ganlab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Mlp {
    std::vector<int> layer_sizes;    // [in, h1, ..., out]
    std::vector<Mat> weights;        // weights[i] is (layer_sizes[i+1] x layer_sizes[i])
    std::vector<Vec> biases;
    std::vector<Act> activations;    // one per weight layer, last = output activation
    std::uint64_t version = 0;       // bumped on every parameter mutation

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    std::size_t n_layers() const { return weights.size(); }

    std::vector<double> frobenius_norms() const {
        std::vector<double> out;
        out.reserve(weights.size());
        for (const Mat& w : weights) out.push_back(w.norm());
        return out;
    }
};

inline Mlp make_mlp(const std::vector<int>& layer_sizes, const std::vector<Act>& activations,
                    Rng& rng) {
    if (layer_sizes.size() < 2) throw std::invalid_argument("make_mlp: need at least two layer sizes");
    for (int s : layer_sizes)
        if (s < 1) throw std::invalid_argument("make_mlp: layer sizes must be >= 1");
    if (activations.size() != layer_sizes.size() - 1)
        throw std::invalid_argument("make_mlp: need one activation per weight layer");
    Mlp mlp;
    mlp.layer_sizes = layer_sizes;
    mlp.activations = activations;
    for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
        const int fan_in = layer_sizes[i];
        const int fan_out = layer_sizes[i + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        Mat w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-limit, limit);
        mlp.weights.push_back(std::move(w));
        mlp.biases.push_back(Vec::Zero(fan_out));
    }
    return mlp;
}

// ---------------------------------------------------------------------------
// forward / backward

struct ForwardCache {
    Mat input;
    std::vector<Mat> pre;    // pre-activation per layer
    std::vector<Mat> post;   // post-activation per layer
    std::uint64_t version = 0;
    Eigen::Index rows = 0;
};

namespace detail {

inline Mat act_apply_mat(Act a, const Mat& z) {
    return z.unaryExpr([a](double v) { return act_apply(a, v); });
}

inline Mat act_deriv_mat(Act a, const Mat& z, const Mat& y) {
    Mat d(z.rows(), z.cols());
    for (Eigen::Index c = 0; c < z.cols(); ++c)
        for (Eigen::Index r = 0; r < z.rows(); ++r) d(r, c) = act_deriv(a, z(r, c), y(r, c));
    return d;
}

}  // namespace detail

inline Mat forward(const Mlp& mlp, const Mat& x, ForwardCache* cache = nullptr) {
    if (x.cols() != mlp.input_dim())
        throw std::invalid_argument("forward: input width does not match the first layer");
    if (cache) {
        cache->input = x;
        cache->pre.clear();
        cache->post.clear();
        cache->version = mlp.version;
        cache->rows = x.rows();
    }
    Mat a = x;
    for (std::size_t i = 0; i < mlp.n_layers(); ++i) {
        Mat z = a * mlp.weights[i].transpose();
        z.rowwise() += mlp.biases[i].transpose();
        a = detail::act_apply_mat(mlp.activations[i], z);
        if (cache) {
            cache->pre.push_back(std::move(z));
            cache->post.push_back(a);
        }
    }
    return a;
}

struct Gradients {
    std::vector<Mat> d_weights;
    std::vector<Vec> d_biases;
    Mat d_input;
};

// grad_out holds dL/dy for the cached forward's output, one row per sample.
inline Gradients backward(const Mlp& mlp, const ForwardCache& cache, const Mat& grad_out) {
    if (cache.version != mlp.version)
        throw std::logic_error("backward: stale forward cache (parameters changed since forward)");
    if (cache.pre.size() != mlp.n_layers())
        throw std::invalid_argument("backward: cache layer count does not match the network");
    if (grad_out.rows() != cache.rows || grad_out.cols() != mlp.output_dim())
        throw std::invalid_argument("backward: grad_out shape does not match the cached forward");
    Gradients g;
    g.d_weights.resize(mlp.n_layers());
    g.d_biases.resize(mlp.n_layers());
    Mat upstream = grad_out;
    for (std::size_t idx = mlp.n_layers(); idx-- > 0;) {
        const Mat delta =
            (upstream.array() *
             detail::act_deriv_mat(mlp.activations[idx], cache.pre[idx], cache.post[idx]).array())
                .matrix();
        const Mat& below = idx == 0 ? cache.input : cache.post[idx - 1];
        g.d_weights[idx] = delta.transpose() * below;
        g.d_biases[idx] = delta.colwise().sum().transpose();
        upstream = delta * mlp.weights[idx];
    }
    g.d_input = std::move(upstream);
    return g;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t t = 0;
    std::vector<Mat> m_w, v_w;
    std::vector<Vec> m_b, v_b;
};

inline AdamState make_adam(const Mlp& mlp) {
    AdamState s;
    for (std::size_t i = 0; i < mlp.n_layers(); ++i) {
        s.m_w.push_back(Mat::Zero(mlp.weights[i].rows(), mlp.weights[i].cols()));
        s.v_w.push_back(Mat::Zero(mlp.weights[i].rows(), mlp.weights[i].cols()));
        s.m_b.push_back(Vec::Zero(mlp.biases[i].size()));
        s.v_b.push_back(Vec::Zero(mlp.biases[i].size()));
    }
    return s;
}

inline void adam_step(Mlp& mlp, AdamState& s, const Gradients& g, double lr) {
    if (s.m_w.size() != mlp.n_layers() || g.d_weights.size() != mlp.n_layers())
        throw std::invalid_argument("adam_step: state/gradient layer count mismatch");
    s.t += 1;
    const double bc1 = 1.0 - std::pow(s.beta1, double(s.t));
    const double bc2 = 1.0 - std::pow(s.beta2, double(s.t));
    for (std::size_t i = 0; i < mlp.n_layers(); ++i) {
        s.m_w[i] = s.beta1 * s.m_w[i] + (1.0 - s.beta1) * g.d_weights[i];
        s.v_w[i] = (s.beta2 * s.v_w[i].array() +
                    (1.0 - s.beta2) * g.d_weights[i].array().square())
                       .matrix();
        mlp.weights[i].array() -=
            lr * (s.m_w[i].array() / bc1) / ((s.v_w[i].array() / bc2).sqrt() + s.eps);
        s.m_b[i] = s.beta1 * s.m_b[i] + (1.0 - s.beta1) * g.d_biases[i];
        s.v_b[i] =
            (s.beta2 * s.v_b[i].array() + (1.0 - s.beta2) * g.d_biases[i].array().square()).matrix();
        mlp.biases[i].array() -=
            lr * (s.m_b[i].array() / bc1) / ((s.v_b[i].array() / bc2).sqrt() + s.eps);
    }
    mlp.version += 1;
}

// ---------------------------------------------------------------------------
// snapshots
//
// Byte layout (all integers and floats little-endian):
//   bytes 0..3   magic "GLNN"
//   u32          format version (currently 1)
//   u32          L = number of weight layers
//   u32 x (L+1)  layer sizes
//   u8  x L      activation tags (0 relu, 1 leaky_relu, 2 tanh, 3 sigmoid, 4 identity)
//   per layer i in order: weights[i] as f64 row-major (rows*cols values),
//                         then biases[i] as f64 (rows values)

namespace detail {

inline std::uint8_t act_to_tag(Act a) {
    switch (a) {
        case Act::relu: return 0;
        case Act::leaky_relu: return 1;
        case Act::tanh: return 2;
        case Act::sigmoid: return 3;
        case Act::identity: return 4;
    }
    throw std::logic_error("act_to_tag: unreachable");
}

inline Act act_from_tag(std::uint8_t t) {
    switch (t) {
        case 0: return Act::relu;
        case 1: return Act::leaky_relu;
        case 2: return Act::tanh;
        case 3: return Act::sigmoid;
        case 4: return Act::identity;
    }
    throw std::runtime_error("snapshot: unknown activation tag");
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double d) {
    const std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

struct ByteReader {
    const std::vector<std::uint8_t>& buf;
    std::size_t pos = 0;

    std::uint8_t u8() {
        if (pos + 1 > buf.size()) throw std::runtime_error("snapshot: truncated file");
        return buf[pos++];
    }
    std::uint32_t u32() {
        if (pos + 4 > buf.size()) throw std::runtime_error("snapshot: truncated file");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(buf[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    double f64() {
        if (pos + 8 > buf.size()) throw std::runtime_error("snapshot: truncated file");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(buf[pos + i]) << (8 * i);
        pos += 8;
        return std::bit_cast<double>(v);
    }
};

}  // namespace detail

inline void save_weights(const Mlp& mlp, const std::string& path) {
    std::vector<std::uint8_t> out;
    out.push_back('G');
    out.push_back('L');
    out.push_back('N');
    out.push_back('N');
    detail::put_u32(out, 1);
    detail::put_u32(out, std::uint32_t(mlp.n_layers()));
    for (int s : mlp.layer_sizes) detail::put_u32(out, std::uint32_t(s));
    for (Act a : mlp.activations) out.push_back(detail::act_to_tag(a));
    for (std::size_t i = 0; i < mlp.n_layers(); ++i) {
        const Mat& w = mlp.weights[i];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) detail::put_f64(out, w(r, c));
        for (Eigen::Index r = 0; r < mlp.biases[i].size(); ++r)
            detail::put_f64(out, mlp.biases[i](r));
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("save_weights: cannot open " + path);
    f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
    if (!f) throw std::runtime_error("save_weights: write failed for " + path);
}

inline Mlp load_weights(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_weights: cannot open " + path);
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
    detail::ByteReader rd{buf};
    if (buf.size() < 4 || buf[0] != 'G' || buf[1] != 'L' || buf[2] != 'N' || buf[3] != 'N')
        throw std::runtime_error("load_weights: bad magic");
    rd.pos = 4;
    if (rd.u32() != 1) throw std::runtime_error("load_weights: unsupported format version");
    const std::uint32_t n_layers = rd.u32();
    if (n_layers == 0 || n_layers > 1024) throw std::runtime_error("load_weights: bad layer count");
    Mlp mlp;
    for (std::uint32_t i = 0; i <= n_layers; ++i) {
        const std::uint32_t s = rd.u32();
        if (s == 0 || s > (1u << 24)) throw std::runtime_error("load_weights: bad layer size");
        mlp.layer_sizes.push_back(int(s));
    }
    for (std::uint32_t i = 0; i < n_layers; ++i)
        mlp.activations.push_back(detail::act_from_tag(rd.u8()));
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        const int rows = mlp.layer_sizes[i + 1];
        const int cols = mlp.layer_sizes[i];
        Mat w(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) w(r, c) = rd.f64();
        Vec b(rows);
        for (int r = 0; r < rows; ++r) b(r) = rd.f64();
        mlp.weights.push_back(std::move(w));
        mlp.biases.push_back(std::move(b));
    }
    if (rd.pos != buf.size()) throw std::runtime_error("load_weights: trailing bytes");
    return mlp;
}

}  // namespace ganlab
