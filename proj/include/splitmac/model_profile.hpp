#pragma once
// Model and compute profiles for split training, plus derivation of a profile
// from a convolutional layer stack.
//
// Conventions (documented because they fix the FLOP numbers):
//   - conv/fc forward FLOPs = 2 x multiply-accumulates (multiply + add),
//   - pooling counts one comparison per window element,
//   - backward pass = 2 x forward (gradient w.r.t. inputs + w.r.t. weights),
//   - parameter counts include biases,
//   - convolutions are stride-1 with same padding; pooling windows of size k
//     use stride k with floor division of the spatial dims.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitmac {

struct ModelProfile {
  double device_model_bits = 0.0;      // device-side parameters, bits
  double smashed_bits_per_batch = 0.0; // cut-layer activations for one batch, bits
  double grad_bits_per_batch = 0.0;    // cut-layer gradients for one batch, bits
  double fwd_device_flops_per_sample = 0.0;
  double bwd_device_flops_per_sample = 0.0;
  double fwd_server_flops_per_sample = 0.0;
  double bwd_server_flops_per_sample = 0.0;
  int batch_size = 0;

  void validate() const {
    const double fields[] = {device_model_bits, smashed_bits_per_batch,
                             grad_bits_per_batch, fwd_device_flops_per_sample, bwd_device_flops_per_sample,
                             fwd_server_flops_per_sample, bwd_server_flops_per_sample};
    for (double f : fields)
      if (!(f > 0.0))
        throw std::invalid_argument("ModelProfile: all sizes and FLOP counts must be positive");
    if (batch_size < 1)
      throw std::invalid_argument("ModelProfile: batch_size must be >= 1");
  }
};

struct ComputeProfile {
  double server_cpu_hz = 100.0e9;
  double device_intensity_flops_per_cycle = 4.0;
  double server_intensity_flops_per_cycle = 16.0;

  void validate() const {
    if (!(server_cpu_hz > 0.0) || !(device_intensity_flops_per_cycle > 0.0) ||
        !(server_intensity_flops_per_cycle > 0.0))
      throw std::invalid_argument("ComputeProfile: all fields must be positive");
  }
};

struct LayerSpec {
  enum class Kind { conv, pool, fc };
  Kind kind = Kind::conv;
  int filters = 0;  // conv: output channels; fc: units
  int kernel = 0;   // conv/pool window edge

  static LayerSpec conv(int filters, int kernel) { return {Kind::conv, filters, kernel}; }
  static LayerSpec pool(int kernel) { return {Kind::pool, 0, kernel}; }
  static LayerSpec fc(int units) { return {Kind::fc, units, 0}; }
};

// The 12-layer MNIST convnet used as the default workload:
// 6 same-padded 3x3 conv layers interleaved with 2x2 pooling, then 3 fc layers.
inline std::vector<LayerSpec> mnist_lenet_layers() {
  return {LayerSpec::conv(32, 3),  LayerSpec::conv(32, 3),  LayerSpec::pool(2),
          LayerSpec::conv(64, 3),  LayerSpec::conv(64, 3),  LayerSpec::pool(2),
          LayerSpec::conv(128, 3), LayerSpec::conv(128, 3), LayerSpec::pool(2),
          LayerSpec::fc(382),      LayerSpec::fc(192),      LayerSpec::fc(10)};
}

// Walks the layer stack and splits it after `cut_layer` layers (1-based count
// of device-side layers).  Activation volume at the cut fixes the smashed-data
// and gradient payloads; parameter counts fix the device model size.
inline ModelProfile derive_model_profile(const std::vector<LayerSpec>& layers,
                                         int cut_layer, int batch_size,
                                         int bits_per_value, int input_channels = 1,
                                         int input_h = 28, int input_w = 28) {
  if (layers.empty())
    throw std::invalid_argument("derive_model_profile: layer list is empty");
  if (cut_layer < 1 || cut_layer >= static_cast<int>(layers.size()))
    throw std::invalid_argument(
        "derive_model_profile: cut_layer must be in [1, n_layers-1], got " +
        std::to_string(cut_layer));
  if (batch_size < 1 || bits_per_value < 1)
    throw std::invalid_argument("derive_model_profile: batch and bits must be >= 1");
  if (input_channels < 1 || input_h < 1 || input_w < 1)
    throw std::invalid_argument("derive_model_profile: input shape must be positive");

  int c = input_channels, h = input_h, w = input_w;
  bool flattened = false;
  std::vector<double> fwd_flops, params;
  double cut_values = 0.0;

  for (std::size_t idx = 0; idx < layers.size(); ++idx) {
    const LayerSpec& layer = layers[idx];
    switch (layer.kind) {
      case LayerSpec::Kind::conv: {
        if (flattened)
          throw std::invalid_argument("derive_model_profile: conv after fc");
        if (layer.filters < 1 || layer.kernel < 1)
          throw std::invalid_argument("derive_model_profile: bad conv shape");
        const double macs = static_cast<double>(layer.kernel) * layer.kernel * c *
                            h * w * layer.filters;
        fwd_flops.push_back(2.0 * macs);
        params.push_back(
            (static_cast<double>(layer.kernel) * layer.kernel * c + 1.0) * layer.filters);
        c = layer.filters;
        break;
      }
      case LayerSpec::Kind::pool: {
        if (flattened)
          throw std::invalid_argument("derive_model_profile: pool after fc");
        if (layer.kernel < 1)
          throw std::invalid_argument("derive_model_profile: bad pool window");
        h /= layer.kernel;
        w /= layer.kernel;
        if (h < 1 || w < 1)
          throw std::invalid_argument("derive_model_profile: pooling exhausted the input");
        fwd_flops.push_back(static_cast<double>(layer.kernel) * layer.kernel * c * h * w);
        params.push_back(0.0);
        break;
      }
      case LayerSpec::Kind::fc: {
        if (layer.filters < 1)
          throw std::invalid_argument("derive_model_profile: bad fc width");
        const double fan_in = flattened ? static_cast<double>(c)
                                        : static_cast<double>(c) * h * w;
        fwd_flops.push_back(2.0 * fan_in * layer.filters);
        params.push_back((fan_in + 1.0) * layer.filters);
        c = layer.filters;
        h = w = 1;
        flattened = true;
        break;
      }
    }
    if (static_cast<int>(idx) + 1 == cut_layer)
      cut_values = flattened ? static_cast<double>(c)
                             : static_cast<double>(c) * h * w;
  }

  double device_fwd = 0.0, server_fwd = 0.0, device_params = 0.0;
  for (std::size_t idx = 0; idx < layers.size(); ++idx) {
    if (static_cast<int>(idx) < cut_layer) {
      device_fwd += fwd_flops[idx];
      device_params += params[idx];
    } else {
      server_fwd += fwd_flops[idx];
    }
  }
  if (!(device_params > 0.0))
    throw std::invalid_argument(
        "derive_model_profile: device side has no parameters (cut too early)");

  ModelProfile profile;
  profile.device_model_bits = device_params * bits_per_value;
  profile.smashed_bits_per_batch =
      static_cast<double>(batch_size) * bits_per_value * cut_values;
  profile.grad_bits_per_batch = profile.smashed_bits_per_batch;
  profile.fwd_device_flops_per_sample = device_fwd;
  profile.bwd_device_flops_per_sample = 2.0 * device_fwd;
  profile.fwd_server_flops_per_sample = server_fwd;
  profile.bwd_server_flops_per_sample = 2.0 * server_fwd;
  profile.batch_size = batch_size;
  profile.validate();
  return profile;
}

}  // namespace splitmac
