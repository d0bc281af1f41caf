#include "orient8/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

#include "orient8/errors.hpp"

namespace orient8::nn {

namespace {

constexpr char kMagic[4] = {'O', 'R', '8', 'W'};
constexpr uint32_t kVersion = 1;

void put_u16(std::ostream& os, uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

void put_u32(std::ostream& os, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

void put_f32(std::ostream& os, float v) {
  uint32_t u;
  std::memcpy(&u, &v, 4);
  put_u32(os, u);
}

struct Reader {
  std::ifstream in;
  std::string path;
  size_t offset = 0;

  void read(char* dst, size_t n, const char* what) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n) {
      throw FormatError(path + ": truncated " + what + " at offset " +
                        std::to_string(offset));
    }
    offset += n;
  }
  uint16_t u16(const char* what) {
    unsigned char b[2];
    read(reinterpret_cast<char*>(b), 2, what);
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
  }
  uint32_t u32(const char* what) {
    unsigned char b[4];
    read(reinterpret_cast<char*>(b), 4, what);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
  }
  float f32(const char* what) {
    const uint32_t u = u32(what);
    float v;
    std::memcpy(&v, &u, 4);
    return v;
  }
  bool at_eof() {
    in.peek();
    return in.eof();
  }
};

}  // namespace

void save_checkpoint(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);

  out.write(kMagic, 4);
  put_u32(out, kVersion);
  const auto& c = net.config();
  put_u32(out, static_cast<uint32_t>(c.input_size));
  put_u32(out, static_cast<uint32_t>(c.in_channels));
  for (int ch : c.conv_channels) put_u32(out, static_cast<uint32_t>(ch));
  put_u32(out, static_cast<uint32_t>(c.kernel));
  put_u32(out, static_cast<uint32_t>(c.hidden_units));
  put_u32(out, static_cast<uint32_t>(c.classes));
  put_u32(out, c.seed);

  for (const auto& t : net.params()) {
    put_u16(out, static_cast<uint16_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    out.put(static_cast<char>(t.shape.size()));
    for (int d : t.shape) put_u32(out, static_cast<uint32_t>(d));
    for (float v : t.data) put_f32(out, v);
  }
  out.flush();
  if (!out) throw IoError("write failed for checkpoint: " + path);
}

Network load_checkpoint(const std::string& path) {
  Reader r;
  r.path = path;
  r.in.open(path, std::ios::binary);
  if (!r.in) throw IoError("cannot open checkpoint: " + path);

  char magic[4];
  r.read(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(path + ": bad magic at offset 0 (not an OR8W checkpoint)");
  }
  const uint32_t version = r.u32("version");
  if (version != kVersion) {
    throw FormatError(path + ": unsupported checkpoint version " +
                      std::to_string(version));
  }

  NetworkConfig cfg;
  cfg.input_size = static_cast<int>(r.u32("config"));
  cfg.in_channels = static_cast<int>(r.u32("config"));
  for (int s = 0; s < 3; ++s) cfg.conv_channels[s] = static_cast<int>(r.u32("config"));
  cfg.kernel = static_cast<int>(r.u32("config"));
  cfg.hidden_units = static_cast<int>(r.u32("config"));
  cfg.classes = static_cast<int>(r.u32("config"));
  cfg.seed = r.u32("config");
  try {
    cfg.validate();
  } catch (const ArgumentError& e) {
    throw FormatError(path + ": invalid config block: " + e.what());
  }

  Network net(cfg);
  std::map<std::string, bool> filled;
  for (const auto& t : net.params()) filled[t.name] = false;

  while (!r.at_eof()) {
    const uint16_t name_len = r.u16("tensor name length");
    std::string name(name_len, '\0');
    r.read(name.data(), name_len, "tensor name");

    Tensor* target = nullptr;
    for (auto& t : net.params()) {
      if (t.name == name) {
        target = &t;
        break;
      }
    }
    if (!target) {
      throw FormatError(path + ": unknown tensor '" + name + "' at offset " +
                        std::to_string(r.offset));
    }
    if (filled[name]) {
      throw FormatError(path + ": duplicate tensor '" + name + "'");
    }

    char rank_byte;
    r.read(&rank_byte, 1, "tensor rank");
    const int rank = static_cast<unsigned char>(rank_byte);
    std::vector<int> dims(rank);
    for (int d = 0; d < rank; ++d) dims[d] = static_cast<int>(r.u32("tensor dims"));
    if (dims != target->shape) {
      std::string want, got;
      for (int d : target->shape) want += std::to_string(d) + " ";
      for (int d : dims) got += std::to_string(d) + " ";
      throw FormatError(path + ": tensor '" + name + "' has shape [ " + got +
                        "], expected [ " + want + "]");
    }
    for (auto& v : target->data) v = r.f32("tensor data");
    filled[name] = true;
  }

  for (const auto& [name, ok] : filled) {
    if (!ok) throw FormatError(path + ": missing tensor '" + name + "'");
  }
  return net;
}

}  // namespace orient8::nn
