#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "ganlab/tensor_nn.hpp"

using namespace ganlab;

namespace {

void require_close(double got, double want, double tol) {
    CAPTURE(got, want, tol);
    REQUIRE(std::abs(got - want) <= tol);
}

Mat random_mat(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = scale * rng.uniform(-1.0, 1.0);
    return m;
}

double weighted_sum(const Mlp& mlp, const Mat& x, const Mat& g) {
    return (forward(mlp, x).array() * g.array()).sum();
}

}  // namespace

TEST_CASE("make_mlp builds the requested shapes", "[tensor_nn]") {
    Rng rng(11);
    const Mlp mlp = make_mlp({3, 5, 2}, {Act::leaky_relu, Act::identity}, rng);
    REQUIRE(mlp.input_dim() == 3);
    REQUIRE(mlp.output_dim() == 2);
    REQUIRE(mlp.n_layers() == 2);
    REQUIRE(mlp.weights[0].rows() == 5);
    REQUIRE(mlp.weights[0].cols() == 3);
    REQUIRE(mlp.weights[1].rows() == 2);
    REQUIRE(mlp.weights[1].cols() == 5);
    REQUIRE(mlp.biases[0].size() == 5);
    REQUIRE(mlp.biases[1].size() == 2);
    REQUIRE(mlp.version == 0);

    for (const Vec& b : mlp.biases) REQUIRE(b.cwiseAbs().maxCoeff() == 0.0);
    const double lim0 = std::sqrt(6.0 / (3 + 5));
    REQUIRE(mlp.weights[0].cwiseAbs().maxCoeff() <= lim0);
    REQUIRE(mlp.weights[0].cwiseAbs().maxCoeff() > 0.0);

    Rng r1(5), r2(5);
    const Mlp a = make_mlp({2, 4, 1}, {Act::relu, Act::sigmoid}, r1);
    const Mlp b = make_mlp({2, 4, 1}, {Act::relu, Act::sigmoid}, r2);
    for (std::size_t i = 0; i < a.n_layers(); ++i)
        REQUIRE((a.weights[i] - b.weights[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("make_mlp rejects malformed requests", "[tensor_nn]") {
    Rng rng(1);
    REQUIRE_THROWS_AS(make_mlp({4}, {}, rng), std::invalid_argument);
    REQUIRE_THROWS_AS(make_mlp({4, 0}, {Act::relu}, rng), std::invalid_argument);
    REQUIRE_THROWS_AS(make_mlp({4, 2}, {Act::relu, Act::relu}, rng), std::invalid_argument);
}

TEST_CASE("forward matches a hand computation", "[tensor_nn]") {
    Rng rng(3);
    Mlp mlp = make_mlp({2, 2, 1}, {Act::identity, Act::identity}, rng);
    mlp.weights[0] << 1.0, 2.0, 3.0, 4.0;
    mlp.biases[0] << 0.5, -0.5;
    mlp.weights[1] << 1.0, -1.0;
    mlp.biases[1] << 0.25;

    Mat x(2, 2);
    x << 1.0, 1.0, 2.0, -1.0;
    ForwardCache cache;
    const Mat y = forward(mlp, x, &cache);
    REQUIRE(y.rows() == 2);
    REQUIRE(y.cols() == 1);
    require_close(y(0, 0), -2.75, 1e-15);
    require_close(y(1, 0), -0.75, 1e-15);

    REQUIRE(cache.rows == 2);
    REQUIRE(cache.version == mlp.version);
    REQUIRE(cache.pre.size() == 2);
    REQUIRE(cache.post.size() == 2);
    require_close(cache.pre[0](0, 0), 3.5, 1e-15);
    require_close(cache.pre[0](0, 1), 6.5, 1e-15);
    require_close(cache.pre[0](1, 0), 0.5, 1e-15);
    REQUIRE((cache.post[1] - y).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((cache.input - x).cwiseAbs().maxCoeff() == 0.0);

    mlp.activations[0] = Act::relu;
    Mat neg(1, 2);
    neg << -1.0, 0.0;
    require_close(forward(mlp, neg)(0, 0), 0.25, 1e-15);

    Mat bad(1, 3);
    bad.setZero();
    REQUIRE_THROWS_AS(forward(mlp, bad), std::invalid_argument);
}

TEST_CASE("backward agrees with finite differences", "[tensor_nn]") {
    struct Config {
        std::vector<int> sizes;
        std::vector<Act> acts;
    };
    const Config configs[] = {
        {{2, 4, 1}, {Act::relu, Act::identity}},
        {{3, 5, 2}, {Act::leaky_relu, Act::tanh}},
        {{2, 3, 2}, {Act::tanh, Act::sigmoid}},
        {{4, 3, 3, 1}, {Act::sigmoid, Act::leaky_relu, Act::identity}},
        {{2, 2, 2}, {Act::identity, Act::relu}},
    };
    Rng rng(29);
    for (const Config& cfg : configs) {
        Mlp mlp = make_mlp(cfg.sizes, cfg.acts, rng);
        for (Vec& b : mlp.biases)
            for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-0.3, 0.3);
        const Mat x = random_mat(rng, 4, cfg.sizes.front());
        const Mat g = random_mat(rng, 4, cfg.sizes.back());

        ForwardCache cache;
        forward(mlp, x, &cache);
        const Gradients grads = backward(mlp, cache, g);

        const auto check = [&](double analytic, double* param) {
            const double save = *param;
            const double h = 1e-5 * std::max(1.0, std::abs(save));
            *param = save + h;
            const double up = weighted_sum(mlp, x, g);
            *param = save - h;
            const double dn = weighted_sum(mlp, x, g);
            *param = save;
            const double fd = (up - dn) / (2.0 * h);
            if (std::abs(analytic) < 1e-4 && std::abs(fd) < 1e-4) return;
            const double rel = std::abs(analytic - fd) / std::max(std::abs(analytic), std::abs(fd));
            CAPTURE(analytic, fd, rel);
            REQUIRE(rel <= 1e-4);
        };

        for (std::size_t layer = 0; layer < mlp.n_layers(); ++layer) {
            Mat& w = mlp.weights[layer];
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c)
                    check(grads.d_weights[layer](r, c), &w(r, c));
            Vec& b = mlp.biases[layer];
            for (Eigen::Index i = 0; i < b.size(); ++i) check(grads.d_biases[layer](i), &b(i));
        }

        // input gradients against perturbed inputs
        Mat xp = x;
        for (Eigen::Index r = 0; r < xp.rows(); ++r)
            for (Eigen::Index c = 0; c < xp.cols(); ++c) {
                const double save = xp(r, c);
                const double h = 1e-5 * std::max(1.0, std::abs(save));
                xp(r, c) = save + h;
                const double up = weighted_sum(mlp, xp, g);
                xp(r, c) = save - h;
                const double dn = weighted_sum(mlp, xp, g);
                xp(r, c) = save;
                const double fd = (up - dn) / (2.0 * h);
                const double analytic = grads.d_input(r, c);
                if (std::abs(analytic) < 1e-4 && std::abs(fd) < 1e-4) continue;
                const double rel =
                    std::abs(analytic - fd) / std::max(std::abs(analytic), std::abs(fd));
                CAPTURE(analytic, fd, rel);
                REQUIRE(rel <= 1e-4);
            }
    }
}

TEST_CASE("backward rejects stale caches and bad shapes", "[tensor_nn]") {
    Rng rng(17);
    Mlp mlp = make_mlp({2, 3, 1}, {Act::tanh, Act::identity}, rng);
    const Mat x = random_mat(rng, 2, 2);
    ForwardCache cache;
    forward(mlp, x, &cache);

    Mat g_bad_rows(3, 1);
    g_bad_rows.setZero();
    REQUIRE_THROWS_AS(backward(mlp, cache, g_bad_rows), std::invalid_argument);
    Mat g_bad_cols(2, 2);
    g_bad_cols.setZero();
    REQUIRE_THROWS_AS(backward(mlp, cache, g_bad_cols), std::invalid_argument);

    Mat g(2, 1);
    g.setOnes();
    AdamState adam = make_adam(mlp);
    const Gradients grads = backward(mlp, cache, g);
    adam_step(mlp, adam, grads, 1e-3);
    REQUIRE_THROWS_AS(backward(mlp, cache, g), std::logic_error);
}

TEST_CASE("adam leaves parameters alone under zero gradients", "[tensor_nn]") {
    Rng rng(23);
    Mlp mlp = make_mlp({2, 3, 1}, {Act::relu, Act::identity}, rng);
    const Mat w0 = mlp.weights[0];
    AdamState adam = make_adam(mlp);
    Gradients zero;
    for (std::size_t i = 0; i < mlp.n_layers(); ++i) {
        zero.d_weights.push_back(Mat::Zero(mlp.weights[i].rows(), mlp.weights[i].cols()));
        zero.d_biases.push_back(Vec::Zero(mlp.biases[i].size()));
    }
    adam_step(mlp, adam, zero, 0.1);
    REQUIRE((mlp.weights[0] - w0).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(adam.t == 1);
    REQUIRE(mlp.version == 1);
}

TEST_CASE("adam first step has learning-rate magnitude", "[tensor_nn]") {
    Rng rng(31);
    Mlp mlp = make_mlp({1, 1}, {Act::identity}, rng);
    mlp.weights[0](0, 0) = 0.7;
    AdamState adam = make_adam(mlp);
    Gradients g;
    g.d_weights.push_back(Mat::Constant(1, 1, 0.3));
    g.d_biases.push_back(Vec::Zero(1));
    adam_step(mlp, adam, g, 0.01);
    require_close(mlp.weights[0](0, 0), 0.7 - 0.01, 1e-8);
}

TEST_CASE("adam walks a quadratic downhill", "[tensor_nn]") {
    Rng rng(37);
    Mlp mlp = make_mlp({1, 1}, {Act::identity}, rng);
    mlp.weights[0](0, 0) = 1.0;
    AdamState adam = make_adam(mlp);
    for (int step = 0; step < 10; ++step) {
        Gradients g;
        g.d_weights.push_back(Mat::Constant(1, 1, mlp.weights[0](0, 0)));
        g.d_biases.push_back(Vec::Zero(1));
        adam_step(mlp, adam, g, 0.05);
    }
    REQUIRE(std::abs(mlp.weights[0](0, 0)) < 1.0);
    REQUIRE(adam.t == 10);
}

TEST_CASE("snapshots round-trip every field", "[tensor_nn]") {
    Rng rng(41);
    Mlp mlp = make_mlp({3, 4, 3, 2, 2, 1},
                       {Act::relu, Act::leaky_relu, Act::tanh, Act::sigmoid, Act::identity}, rng);
    for (Vec& b : mlp.biases)
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-2.0, 2.0);

    const std::string path = "/tmp/ganlab_snapshot_roundtrip.bin";
    save_weights(mlp, path);
    const Mlp back = load_weights(path);
    REQUIRE(back.layer_sizes == mlp.layer_sizes);
    REQUIRE(back.activations == mlp.activations);
    REQUIRE(back.n_layers() == mlp.n_layers());
    for (std::size_t i = 0; i < mlp.n_layers(); ++i) {
        REQUIRE((back.weights[i] - mlp.weights[i]).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE((back.biases[i] - mlp.biases[i]).cwiseAbs().maxCoeff() == 0.0);
    }
    std::remove(path.c_str());
}

TEST_CASE("snapshot loader rejects malformed files", "[tensor_nn]") {
    Rng rng(43);
    const Mlp mlp = make_mlp({2, 2, 1}, {Act::tanh, Act::identity}, rng);
    const std::string path = "/tmp/ganlab_snapshot_malformed.bin";
    save_weights(mlp, path);

    std::vector<char> bytes;
    {
        std::ifstream f(path, std::ios::binary);
        bytes.assign((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    }
    const auto rewrite = [&](const std::vector<char>& content) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f.write(content.data(), std::streamsize(content.size()));
    };

    std::vector<char> corrupt = bytes;
    corrupt[0] = 'X';
    rewrite(corrupt);
    REQUIRE_THROWS_WITH(load_weights(path), Catch::Matchers::ContainsSubstring("bad magic"));

    corrupt = bytes;
    corrupt.resize(bytes.size() / 2);
    rewrite(corrupt);
    REQUIRE_THROWS_WITH(load_weights(path), Catch::Matchers::ContainsSubstring("truncated"));

    corrupt = bytes;
    corrupt.push_back(0);
    rewrite(corrupt);
    REQUIRE_THROWS_WITH(load_weights(path), Catch::Matchers::ContainsSubstring("trailing"));

    // first activation tag sits after magic, format, layer count, and 3 sizes
    corrupt = bytes;
    corrupt[4 + 4 + 4 + 4 * 3] = 9;
    rewrite(corrupt);
    REQUIRE_THROWS_WITH(load_weights(path),
                        Catch::Matchers::ContainsSubstring("unknown activation tag"));

    std::remove(path.c_str());
    REQUIRE_THROWS_WITH(load_weights("/tmp/ganlab_snapshot_missing.bin"),
                        Catch::Matchers::ContainsSubstring("cannot open"));
}

TEST_CASE("frobenius norms report per-layer magnitudes", "[tensor_nn]") {
    Rng rng(47);
    Mlp mlp = make_mlp({2, 1, 1}, {Act::identity, Act::identity}, rng);
    mlp.weights[0] << 3.0, 4.0;
    mlp.weights[1] << 2.0;
    const std::vector<double> norms = mlp.frobenius_norms();
    REQUIRE(norms.size() == 2);
    require_close(norms[0], 5.0, 1e-15);
    require_close(norms[1], 2.0, 1e-15);
}
