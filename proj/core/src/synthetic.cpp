#include "embadapt/synthetic.hpp"

#include "embadapt/seeding.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace embadapt {

void SynthSpec::validate() const {
    if (n_samples < 2) throw std::invalid_argument("synth: n_samples must be at least 2");
    if (n_modalities < 1) throw std::invalid_argument("synth: n_modalities must be positive");
    if (dims.size() != n_modalities || signal_dims.size() != n_modalities) {
        throw std::invalid_argument("synth: dims and signal_dims need one entry per modality");
    }
    for (std::size_t j = 0; j < n_modalities; ++j) {
        if (dims[j] < 1) throw std::invalid_argument("synth: modality dimensions must be positive");
        if (signal_dims[j] > dims[j]) throw std::invalid_argument("synth: signal_dims exceeds dims");
        if (nonlinearity == Nonlinearity::xor_rotate && signal_dims[j] % 2 != 0) {
            throw std::invalid_argument("synth: xor-rotate needs an even number of signal dims");
        }
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw std::invalid_argument("synth: noise_sigma must be non-negative");
    if (!(class_balance > 0.0 && class_balance < 1.0)) throw std::invalid_argument("synth: class_balance must lie in (0,1)");
    if (class_balance * static_cast<double>(n_samples) < 1.0 || (1.0 - class_balance) * static_cast<double>(n_samples) < 1.0) {
        throw std::invalid_argument("synth: class_balance leaves a class empty");
    }
    if (!std::isfinite(signal_offset) || !std::isfinite(signal_noise_ratio) || signal_noise_ratio < 0.0) {
        throw std::invalid_argument("synth: bad signal parameters");
    }
}

namespace {

Matrix random_rotation(std::size_t d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index k = 0; k < g.cols(); ++k) g(i, k) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Haar measure: fix column signs by the sign of R's diagonal.
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
        if (r(k, k) < 0.0) q.col(k) *= -1.0;
    }
    return q;
}

}  // namespace

SyntheticDraw draw_synthetic(const SynthSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_samples;
    Rng rng(spec.seed);

    auto n_pos = static_cast<std::size_t>(std::llround(spec.class_balance * static_cast<double>(n)));
    n_pos = std::clamp<std::size_t>(n_pos, 1, n - 1);
    Labels labels(n, 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_pos), 1);
    std::shuffle(labels.begin(), labels.end(), rng);

    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "s%06zu", i);
        ids.emplace_back(buf);
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    const double half = 0.5 * spec.signal_offset;
    const double signal_sigma = spec.noise_sigma * spec.signal_noise_ratio;

    std::vector<std::string> names;
    std::vector<EmbeddingMatrix> mods;
    std::vector<EmbeddingMatrix> latent;
    std::vector<Matrix> rotations;
    for (std::size_t j = 0; j < spec.n_modalities; ++j) {
        const auto d = static_cast<Eigen::Index>(spec.dims[j]);
        const auto s = static_cast<Eigen::Index>(spec.signal_dims[j]);
        EmbeddingMatrix x(static_cast<Eigen::Index>(n), d);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const int y = labels[static_cast<std::size_t>(i)];
            if (spec.nonlinearity == Nonlinearity::none) {
                const double mean = y == 1 ? half : -half;
                for (Eigen::Index k = 0; k < s; ++k) x(i, k) = mean + signal_sigma * normal(rng);
            } else {
                for (Eigen::Index k = 0; k < s; k += 2) {
                    const double a = coin(rng) ? 1.0 : -1.0;
                    const double b = y == 1 ? a : -a;
                    x(i, k) = half * a + signal_sigma * normal(rng);
                    x(i, k + 1) = half * b + signal_sigma * normal(rng);
                }
            }
            for (Eigen::Index k = s; k < d; ++k) x(i, k) = spec.noise_sigma * normal(rng);
        }
        latent.emplace_back(x.leftCols(s));
        if (spec.nonlinearity == Nonlinearity::xor_rotate) {
            Matrix q = random_rotation(spec.dims[j], rng);
            x = (x * q.transpose()).eval();
            rotations.push_back(std::move(q));
        } else {
            rotations.push_back(Matrix::Identity(d, d));
        }
        names.push_back("m" + std::to_string(j));
        mods.push_back(std::move(x));
    }

    return SyntheticDraw{MultimodalDataset(std::move(names), std::move(mods), std::move(labels), std::move(ids)),
                         std::move(latent), std::move(rotations)};
}

MultimodalDataset generate_synthetic(const SynthSpec& spec) {
    return draw_synthetic(spec).data;
}

}  // namespace embadapt
