#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "acx/core/ops.hpp"
#include "acx/graph/mask.hpp"

namespace acx::explainer {

/// Node input shared by both networks: the graph's features, plus a 0/1
/// column marking the target node for node-classification instances.
Matrix node_inputs(const Graph& g, bool target_flag);

/// Mask generator: graph convolutions over [X ‖ one-hot(l)] followed by an
/// inner-product edge decoder,
///   M = A ⊙ sym(sigmoid(Z Zᵀ / w + b)), w the last hidden width.
///
/// Parameter layout: W_0, b_0, ..., W_{L-1}, b_{L-1}, decoder bias (1x1).
class Generator {
public:
    Generator() = default;
    // Throws DimensionError when params do not fit the widths.
    Generator(std::size_t feature_width, std::size_t classes, bool target_flag, std::vector<std::size_t> hidden,
              std::vector<Matrix> params);

    static Generator initialize(std::size_t feature_width, std::size_t classes, bool target_flag, std::uint64_t seed,
                                std::vector<std::size_t> hidden = {32, 32, 32});

    std::size_t feature_width() const noexcept { return feature_width_; }
    std::size_t classes() const noexcept { return classes_; }
    bool target_flag() const noexcept { return target_flag_; }
    const std::vector<std::size_t>& hidden() const noexcept { return hidden_; }
    std::span<const Matrix> parameters() const noexcept { return params_; }
    std::span<Matrix> mutable_parameters() noexcept { return params_; }
    std::uint64_t checksum() const;

    /// Dense n x n mask on the tape, zero off the edges of g.
    /// Throws UsageError when label is out of range.
    ad::Var apply(std::span<const ad::Var> params, const Graph& g, int label) const;

    // Inference on a private constant tape.
    WeightedMask mask(const Graph& g, int label) const;

private:
    std::size_t feature_width_ = 0;
    std::size_t classes_ = 0;
    bool target_flag_ = false;
    std::vector<std::size_t> hidden_;
    std::vector<Matrix> params_;
};

/// Five graph convolutions, mean pooling, then a real/fake head and a class head.
///
/// Parameter layout: W_0, b_0, ..., W_4, b_4, W_src, b_src, W_cls, b_cls.
class Discriminator {
public:
    struct Output {
        ad::Var source;       // 1x1, probability the input is a ground-truth explanation
        ad::Var class_logits; // 1 x classes
    };

    Discriminator() = default;
    Discriminator(std::size_t input_width, std::size_t classes, std::vector<std::size_t> hidden,
                  std::vector<Matrix> params);

    static Discriminator initialize(std::size_t input_width, std::size_t classes, std::uint64_t seed,
                                    std::vector<std::size_t> hidden = {32, 32, 32, 32, 32});

    std::size_t input_width() const noexcept { return input_width_; }
    std::size_t classes() const noexcept { return classes_; }
    const std::vector<std::size_t>& hidden() const noexcept { return hidden_; }
    std::span<const Matrix> parameters() const noexcept { return params_; }
    std::span<Matrix> mutable_parameters() noexcept { return params_; }
    std::uint64_t checksum() const;

    Output apply(std::span<const ad::Var> params, ad::Var adjacency, const Matrix& inputs) const;

    struct Prediction {
        double p_real = 0.5; // clamped to [1e-7, 1 - 1e-7]
        std::vector<double> classes;
    };
    Prediction predict(const Matrix& adjacency, const Matrix& inputs) const;

private:
    std::size_t input_width_ = 0;
    std::size_t classes_ = 0;
    std::vector<std::size_t> hidden_;
    std::vector<Matrix> params_;
};

// Weight files tagged "gen" and "disc".
std::string format_generator(const Generator& g, std::map<std::string, std::string> meta = {});
Generator parse_generator(std::string_view text, std::map<std::string, std::string>* meta = nullptr);
std::string format_discriminator(const Discriminator& d, std::map<std::string, std::string> meta = {});
Discriminator parse_discriminator(std::string_view text, std::map<std::string, std::string>* meta = nullptr);

void save_generator(const std::filesystem::path& path, const Generator& g,
                    const std::map<std::string, std::string>& meta = {});
Generator load_generator(const std::filesystem::path& path, std::map<std::string, std::string>* meta = nullptr);
void save_discriminator(const std::filesystem::path& path, const Discriminator& d,
                        const std::map<std::string, std::string>& meta = {});
Discriminator load_discriminator(const std::filesystem::path& path,
                                 std::map<std::string, std::string>* meta = nullptr);

} // namespace acx::explainer
