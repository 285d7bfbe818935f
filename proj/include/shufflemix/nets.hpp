/**
 * Copyright 2026 The ShuffleMix Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SHUFFLEMIX_NETS_HPP
#define SHUFFLEMIX_NETS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shufflemix/augment.hpp"
#include "shufflemix/layers.hpp"
#include "shufflemix/sampling.hpp"
#include "shufflemix/tensor.hpp"

namespace shufflemix {

/// Feed-forward network f = f_k o g_k with hook points between blocks.
///
/// Hook 0 is the raw input; hook i (1..L) is the output of blocks[i-1]. The head
/// maps hook L to K logits. `eligible` is the set S of hooks where mixing may happen.
struct Network {
  std::string architecture;  // "mlp" or "cnn"
  Shape input{1, 1, 1, 1};   // n is ignored
  std::vector<std::vector<LayerParams>> blocks;
  std::vector<LayerParams> head;
  std::vector<int> eligible;
  std::size_t num_classes = 0;

  std::size_t num_hooks() const { return blocks.size() + 1; }
  int top_hook() const { return static_cast<int>(blocks.size()); }
  /// Shape of the activations at hook k for a batch of n samples.
  Shape hook_shape(int k, std::size_t n) const;

  std::size_t parameter_count() const;
  /// All weights then biases, layer by layer: blocks in order, then head.
  std::vector<double> flatten_parameters() const;
  void assign_parameters(std::span<const double> flat);

  /// Throws ParameterError/DimensionError on broken structural invariants.
  void validate() const;
  void set_eligible(std::vector<int> hooks);

  friend bool operator==(const Network&, const Network&) = default;
};

/// FC -> ReLU blocks (one per hidden width, hooks 0..L) followed by a linear head.
Network build_mlp(std::size_t input_dim, std::span<const std::size_t> hidden_widths,
                  std::size_t num_classes);

/// Four conv3x3 + ReLU stages (hooks 0..4), global-average-pool, linear head.
Network build_small_cnn(const Shape& input, std::span<const std::size_t> stage_widths,
                        std::size_t num_classes);

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every weight and bias.
void initialize_parameters(Network& net, Rng& rng);

/// Clean forward pass; returns [N, K, 1, 1] logits.
Tensor forward(const Network& net, const Tensor& batch);

/// Inverted dropout on the input of the final head layer (training only).
struct DropoutSpec {
  double rate = 0.0;
  std::uint64_t seed = 0;
};

struct BatchOutput {
  Tensor logits;
  std::vector<SoftLabel> mixed_labels;
  std::vector<AugmentPlan> plans;
};

/// Cached activations of one injection forward pass, consumed by backward_with_injection.
struct InjectionTrace {
  struct Group {
    int k = 0;
    std::vector<std::size_t> rows;
    Tensor mixed;  // hook-k input to the tail (after noise)
    std::vector<Tensor> tail_inputs;  // input of every layer after hook k, in order
    std::vector<ChannelWeights> weights;  // per row
    std::vector<Tensor> nfm_mult;  // per row, empty when the plan has no noise
    std::vector<double> nfm_delta_mult;
    std::vector<double> dropout_mask;  // flattened [rows, features] or empty
  };
  std::size_t batch = 0;
  int deepest = 0;
  std::vector<std::vector<Tensor>> clean_inputs;  // [block][layer] inputs, clean stream
  std::vector<Tensor> clean_hooks;                // hook 0..deepest
  std::vector<Group> groups;
  std::vector<AugmentPlan> plans;
};

/// Injection forward: sample i takes the clean hook-k state of itself and of its
/// partner, mixes them with the plan's operator, optionally adds feature noise, and
/// continues through the remaining blocks. Samples are grouped by k; each sample's
/// result is bit-identical to running it alone.
BatchOutput forward_with_injection(const Network& net, const Tensor& batch,
                                   std::span<const SoftLabel> labels,
                                   std::span<const AugmentPlan> plans,
                                   InjectionTrace* trace = nullptr,
                                   const DropoutSpec& dropout = {});

/// Gradient of sum_i <grad_logits_i, logits_i> w.r.t. the flattened parameters.
/// Gradients reach both the sample's and the partner's activation paths.
std::vector<double> backward_with_injection(const Network& net, const InjectionTrace& trace,
                                            const Tensor& grad_logits);

struct LossResult {
  double loss = 0.0;
  Tensor grad;  // d loss / d logits
};

/// Mean over the batch of -sum_k t_k log softmax(z)_k; grad = (softmax - t) / N.
LossResult soft_cross_entropy(const Tensor& logits, std::span<const SoftLabel> targets);

/// Mean over the batch of per-class binary cross-entropy summed over classes.
LossResult bce_multilabel(const Tensor& logits, std::span<const SoftLabel> targets);

std::vector<double> softmax_row(std::span<const double> logits);
double sigmoid(double z);

/// Versioned checkpoint; see README for the byte layout.
void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);

}  // namespace shufflemix

#endif  // SHUFFLEMIX_NETS_HPP
