#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "fluocnn/nn/network.hpp"
#include "fluocnn/nn/train.hpp"

namespace fluocnn::nn {

/// Model checkpoint container, all integers and floats little-endian:
///
///     offset  size        field
///     0       5           magic "OCNN1"
///     5       8 x u32     input_length, filters1, ksize1, pool,
///                         filters2, ksize2, dense1, dense2
///     37      4 x f64     dropout, learning_rate, target offset, target scale
///     69      u64         parameter count n
///     77      n x f64     parameters, block by block in Block order
///                         (conv1 filters [c][j][k], conv1 biases, conv2 ...,
///                         dense weights row-major [out][in], biases)
///
/// The file length must be exactly 77 + 8n bytes.
struct Checkpoint {
  Network network;
  TargetScaling scaling;
};

inline constexpr std::string_view kCheckpointMagic = "OCNN1";

std::string encode_checkpoint(const Network& net, const TargetScaling& scaling);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Network& net,
                     const TargetScaling& scaling);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fluocnn::nn
