#include "fluocnn/nn/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "fluocnn/error.hpp"
#include "fluocnn/text_io.hpp"

namespace fluocnn::nn {

namespace {

constexpr std::size_t kHeaderBytes = 5 + 8 * 4 + 4 * 8 + 8;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t u(int width) {
    if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) {
      throw Error(ErrorKind::parse, "checkpoint truncated at byte " + std::to_string(pos_));
    }
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::size_t u32() { return static_cast<std::size_t>(u(4)); }
  double f64() { return std::bit_cast<double>(u(8)); }
  std::size_t position() const { return pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::size_t v) {
  if (v > 0xffffffffULL) throw Error(ErrorKind::domain, "value does not fit the checkpoint header");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string encode_checkpoint(const Network& net, const TargetScaling& scaling) {
  const auto& hp = net.hyper_params();
  std::string out(kCheckpointMagic);
  for (std::size_t v : {net.input_length(), hp.filters1, hp.ksize1, hp.pool, hp.filters2,
                        hp.ksize2, hp.dense1, hp.dense2}) {
    put_u32(out, checked_u32(v));
  }
  put_f64(out, hp.dropout);
  put_f64(out, hp.learning_rate);
  put_f64(out, scaling.offset);
  put_f64(out, scaling.scale);
  put_u64(out, net.parameter_count());
  for (auto block : net.parameter_blocks()) {
    for (double v : block) put_f64(out, v);
  }
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes || bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw Error(ErrorKind::parse, "not an OCNN1 checkpoint");
  }
  Reader r(bytes.substr(kCheckpointMagic.size()));
  HyperParams hp;
  const std::size_t input_length = r.u32();
  hp.filters1 = r.u32();
  hp.ksize1 = r.u32();
  hp.pool = r.u32();
  hp.filters2 = r.u32();
  hp.ksize2 = r.u32();
  hp.dense1 = r.u32();
  hp.dense2 = r.u32();
  hp.dropout = r.f64();
  hp.learning_rate = r.f64();
  TargetScaling scaling{r.f64(), r.f64()};
  const auto count = r.u(8);

  Checkpoint cp{Network::zeros(hp, input_length), scaling};
  if (count != cp.network.parameter_count()) {
    throw Error(ErrorKind::parse, "checkpoint declares " + std::to_string(count) +
                                      " parameters, architecture has " +
                                      std::to_string(cp.network.parameter_count()));
  }
  if (bytes.size() != kHeaderBytes + 8 * count) {
    throw Error(ErrorKind::parse, "checkpoint has " + std::to_string(bytes.size()) +
                                      " bytes, expected " +
                                      std::to_string(kHeaderBytes + 8 * count));
  }
  for (auto block : cp.network.parameter_blocks()) {
    for (double& v : block) v = r.f64();
  }
  return cp;
}

void save_checkpoint(const std::filesystem::path& path, const Network& net,
                     const TargetScaling& scaling) {
  text::write_file(path, encode_checkpoint(net, scaling));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(text::read_file(path));
}

}  // namespace fluocnn::nn
