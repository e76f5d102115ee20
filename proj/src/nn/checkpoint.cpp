#include "tomoforge/nn/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "tomoforge/error.hpp"

namespace tomoforge::nn {

namespace {

constexpr char kMagic[8] = {'T', 'M', 'F', 'G', 'C', 'K', 'P', 'T'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw FormatError("checkpoint is truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void put_array(std::ostream& out, const std::vector<double>& v) {
  put<std::uint64_t>(out, v.size());
  for (const double x : v) put<double>(out, x);
}

void get_array(std::istream& in, std::vector<double>& v) {
  const auto n = get<std::uint64_t>(in);
  if (n != v.size()) throw FormatError("checkpoint array size does not match the network");
  for (double& x : v) x = get<double>(in);
}

void write_network(std::ostream& out, const Network& net) {
  const NetworkConfig& c = net.config();
  put<std::int32_t>(out, static_cast<std::int32_t>(c.role));
  put<std::int32_t>(out, static_cast<std::int32_t>(c.scale));
  put<std::int32_t>(out, c.in_c);
  put<std::int32_t>(out, c.in_h);
  put<std::int32_t>(out, c.in_w);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.layers.size()));
  for (const auto& l : c.layers) {
    put<std::int32_t>(out, static_cast<std::int32_t>(l.op));
    put<std::int32_t>(out, l.kernel);
    put<std::int32_t>(out, l.stride);
    put<std::int32_t>(out, l.padding);
    put<std::int32_t>(out, l.in_ch);
    put<std::int32_t>(out, l.out_ch);
    put<std::int32_t>(out, l.has_bias ? 1 : 0);
  }
  auto& mutable_net = const_cast<Network&>(net);
  for (const Param* p : mutable_net.params()) put_array(out, p->value);
  for (const auto* b : mutable_net.buffers()) put_array(out, *b);
}

Network read_network(std::istream& in) {
  NetworkConfig c;
  const auto role = get<std::int32_t>(in);
  const auto scale = get<std::int32_t>(in);
  if (role < 0 || role > 1 || scale < 0 || scale > 1) throw FormatError("checkpoint has an invalid network header");
  c.role = static_cast<Role>(role);
  c.scale = static_cast<Scale>(scale);
  c.in_c = get<std::int32_t>(in);
  c.in_h = get<std::int32_t>(in);
  c.in_w = get<std::int32_t>(in);
  const auto n_layers = get<std::uint32_t>(in);
  if (n_layers == 0 || n_layers > 1024) throw FormatError("checkpoint has an implausible layer count");
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    LayerSpec l;
    const auto op = get<std::int32_t>(in);
    if (op < 0 || op > static_cast<std::int32_t>(LayerOp::Tanh)) throw FormatError("checkpoint has an unknown layer op");
    l.op = static_cast<LayerOp>(op);
    l.kernel = get<std::int32_t>(in);
    l.stride = get<std::int32_t>(in);
    l.padding = get<std::int32_t>(in);
    l.in_ch = get<std::int32_t>(in);
    l.out_ch = get<std::int32_t>(in);
    l.has_bias = get<std::int32_t>(in) != 0;
    c.layers.push_back(l);
  }
  Network net = [&] {
    try {
      return Network(c);
    } catch (const ArgumentError& e) {
      throw FormatError(std::string("checkpoint describes an invalid network: ") + e.what());
    }
  }();
  for (Param* p : net.params()) get_array(in, p->value);
  for (auto* b : net.buffers()) get_array(in, *b);
  return net;
}

}  // namespace

void write_checkpoint(std::ostream& out, const TrainedModel& model) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::int32_t>(out, static_cast<std::int32_t>(model.colormap));
  put<std::int64_t>(out, model.epochs_trained);
  write_network(out, model.generator);
  write_network(out, model.critic);
  if (!out) throw FormatError("failed writing checkpoint");
}

TrainedModel read_checkpoint(std::istream& in) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw FormatError("not a tomoforge checkpoint");
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto cmap = get<std::int32_t>(in);
  if (cmap < 0 || cmap > 2) throw FormatError("checkpoint has an unknown colormap");
  const auto epochs = get<std::int64_t>(in);
  Network g = read_network(in);
  Network d = read_network(in);
  if (g.config().role != Role::Generator || d.config().role != Role::Critic) {
    throw FormatError("checkpoint networks are in the wrong order");
  }
  return TrainedModel{std::move(g), std::move(d), static_cast<ColormapId>(cmap), static_cast<long>(epochs)};
}

void save_checkpoint(const std::string& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  write_checkpoint(out, model);
}

TrainedModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return read_checkpoint(in);
}

}  // namespace tomoforge::nn
