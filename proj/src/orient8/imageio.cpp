#include "orient8/imageio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "orient8/errors.hpp"

namespace orient8::io {

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         std::equal(suffix.rbegin(), suffix.rend(), s.rbegin());
}

struct ByteReader {
  std::ifstream in;
  std::string path;
  size_t offset = 0;

  void read(char* dst, size_t n, const char* what) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n) {
      throw FormatError(path + ": offset " + std::to_string(offset) +
                        ": truncated " + what);
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
};

void put_u16(std::ostream& os, uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

void put_u32(std::ostream& os, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

constexpr uint32_t kOri8Version = 1;
constexpr uint32_t kMaxDim = 1u << 20;

}  // namespace

Slice read_image(const std::string& path) {
  if (has_suffix(path, ".pgm")) return read_pgm(path);
  if (has_suffix(path, ".ori8")) return read_ori8(path);
  throw ArgumentError("unsupported image extension: " + path +
                      " (expected .pgm or .ori8)");
}

void write_image(const Slice& slice, const std::string& path) {
  if (has_suffix(path, ".pgm")) {
    write_pgm(slice, path);
    return;
  }
  if (has_suffix(path, ".ori8")) {
    write_ori8(slice, path);
    return;
  }
  throw ArgumentError("unsupported image extension: " + path +
                      " (expected .pgm or .ori8)");
}

Slice read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image: " + path);

  // Header tokens may be separated by whitespace and '#' comments.
  auto next_token = [&](const char* what) -> std::string {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
      if (ch == '#') {
        while ((ch = in.get()) != EOF && ch != '\n') {
        }
        continue;
      }
      if (std::isspace(ch)) {
        if (!tok.empty()) return tok;
        continue;
      }
      tok.push_back(static_cast<char>(ch));
    }
    if (tok.empty()) {
      throw FormatError(path + ": offset " + std::to_string(in.tellg() == -1
                            ? 0 : static_cast<long>(in.tellg())) +
                        ": missing " + std::string(what));
    }
    return tok;
  };

  const std::string magic = next_token("magic");
  if (magic != "P5") {
    throw FormatError(path + ": offset 0: bad magic '" + magic +
                      "' (expected P5)");
  }
  auto parse_int = [&](const std::string& tok, const char* what) {
    try {
      size_t pos = 0;
      long v = std::stol(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw FormatError(path + ": invalid " + std::string(what) + " '" + tok + "'");
    }
  };
  const long width = parse_int(next_token("width"), "width");
  const long height = parse_int(next_token("height"), "height");
  const long maxval = parse_int(next_token("maxval"), "maxval");
  if (width < 2 || height < 2 || width > kMaxDim || height > kMaxDim) {
    throw FormatError(path + ": unsupported dimensions " + std::to_string(width) +
                      "x" + std::to_string(height));
  }
  if (maxval <= 0 || maxval > 65535) {
    throw FormatError(path + ": maxval " + std::to_string(maxval) +
                      " out of range [1,65535]");
  }

  const bool wide = maxval > 255;
  const size_t n = static_cast<size_t>(width) * height;
  std::vector<unsigned char> raw(n * (wide ? 2 : 1));
  const size_t data_offset = static_cast<size_t>(in.tellg());
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(in.gcount()) != raw.size()) {
    throw FormatError(path + ": offset " +
                      std::to_string(data_offset + static_cast<size_t>(in.gcount())) +
                      ": truncated pixel data");
  }

  Slice s = Slice::zeros(1, static_cast<int>(height), static_cast<int>(width));
  const float inv = 1.0f / static_cast<float>(maxval);
  for (size_t i = 0; i < n; ++i) {
    // 16-bit PGM stores the most significant byte first.
    const unsigned v = wide ? (raw[2 * i] << 8 | raw[2 * i + 1]) : raw[i];
    s.pixels[i] = static_cast<float>(v) * inv;
  }
  return s;
}

void write_pgm(const Slice& slice, const std::string& path, int maxval) {
  if (slice.channels != 1) {
    throw ArgumentError("PGM supports single-channel slices, got " +
                        std::to_string(slice.channels));
  }
  if (maxval != 255 && maxval != 65535) {
    throw ArgumentError("PGM maxval must be 255 or 65535");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open image for writing: " + path);
  out << "P5\n" << slice.width << " " << slice.height << "\n" << maxval << "\n";
  for (float v : slice.pixels) {
    const float c = std::clamp(v, 0.0f, 1.0f);
    const unsigned q = static_cast<unsigned>(std::lround(c * maxval));
    if (maxval > 255) out.put(static_cast<char>(q >> 8));
    out.put(static_cast<char>(q & 0xff));
  }
  if (!out) throw IoError("write failed: " + path);
}

Slice read_ori8(const std::string& path) {
  ByteReader r;
  r.path = path;
  r.in.open(path, std::ios::binary);
  if (!r.in) throw IoError("cannot open image: " + path);

  char magic[4];
  r.read(magic, 4, "magic");
  if (std::memcmp(magic, "ORI8", 4) != 0) {
    throw FormatError(path + ": offset 0: bad magic (not an ORI8 file)");
  }
  const uint32_t version = r.u32("version");
  if (version != kOri8Version) {
    throw FormatError(path + ": offset 4: unsupported version " +
                      std::to_string(version));
  }
  const uint32_t channels = r.u32("channels");
  const uint32_t height = r.u32("height");
  const uint32_t width = r.u32("width");
  if (channels < 1 || channels > 64 || height < 2 || width < 2 ||
      height > kMaxDim || width > kMaxDim) {
    throw FormatError(path + ": offset 8: bad dimensions " +
                      std::to_string(channels) + "x" + std::to_string(height) +
                      "x" + std::to_string(width));
  }

  Slice s = Slice::zeros(static_cast<int>(channels), static_cast<int>(height),
                         static_cast<int>(width));
  std::vector<unsigned char> raw(s.pixels.size() * 4);
  r.read(reinterpret_cast<char*>(raw.data()), raw.size(), "pixel data");
  for (size_t i = 0; i < s.pixels.size(); ++i) {
    uint32_t u = static_cast<uint32_t>(raw[4 * i]) |
                 (static_cast<uint32_t>(raw[4 * i + 1]) << 8) |
                 (static_cast<uint32_t>(raw[4 * i + 2]) << 16) |
                 (static_cast<uint32_t>(raw[4 * i + 3]) << 24);
    std::memcpy(&s.pixels[i], &u, 4);
  }

  const uint16_t pid_len = r.u16("patient id length");
  s.patient_id.resize(pid_len);
  r.read(s.patient_id.data(), pid_len, "patient id");
  const uint16_t mod_len = r.u16("modality length");
  std::string modality(mod_len, '\0');
  r.read(modality.data(), mod_len, "modality");
  try {
    s.modality = modality_from_string(modality);
  } catch (const ArgumentError& e) {
    throw FormatError(path + ": offset " + std::to_string(r.offset - mod_len) +
                      ": " + e.what());
  }
  char flag;
  r.read(&flag, 1, "orientation flag");
  if (flag != 0 && flag != 1) {
    throw FormatError(path + ": offset " + std::to_string(r.offset - 1) +
                      ": orientation flag must be 0 or 1");
  }
  if (flag) {
    char label;
    r.read(&label, 1, "orientation label");
    if (label < 0 || label > 7) {
      throw FormatError(path + ": offset " + std::to_string(r.offset - 1) +
                        ": orientation label out of range");
    }
    s.true_orientation = label;
  }
  return s;
}

void write_ori8(const Slice& slice, const std::string& path) {
  slice.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open image for writing: " + path);
  out.write("ORI8", 4);
  put_u32(out, kOri8Version);
  put_u32(out, static_cast<uint32_t>(slice.channels));
  put_u32(out, static_cast<uint32_t>(slice.height));
  put_u32(out, static_cast<uint32_t>(slice.width));
  for (float v : slice.pixels) {
    uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32(out, u);
  }
  put_u16(out, static_cast<uint16_t>(slice.patient_id.size()));
  out.write(slice.patient_id.data(),
            static_cast<std::streamsize>(slice.patient_id.size()));
  const std::string modality = to_string(slice.modality);
  put_u16(out, static_cast<uint16_t>(modality.size()));
  out.write(modality.data(), static_cast<std::streamsize>(modality.size()));
  out.put(slice.true_orientation ? 1 : 0);
  if (slice.true_orientation) out.put(static_cast<char>(*slice.true_orientation));
  if (!out) throw IoError("write failed: " + path);
}

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open manifest for writing: " + path);
  for (const auto& e : entries) {
    out << e.relative_path << '\t' << e.patient_id << '\t'
        << to_string(e.modality) << '\t' << e.label << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  std::vector<ManifestEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<std::string, 4> fields;
    size_t start = 0;
    for (int f = 0; f < 4; ++f) {
      const size_t tab = line.find('\t', start);
      if (f < 3 && tab == std::string::npos) {
        throw FormatError(path + ":" + std::to_string(lineno) +
                          ": expected 4 tab-separated fields");
      }
      fields[f] = line.substr(start, tab == std::string::npos ? tab : tab - start);
      start = tab + 1;
    }
    ManifestEntry e;
    e.relative_path = fields[0];
    e.patient_id = fields[1];
    try {
      e.modality = modality_from_string(fields[2]);
      e.label = std::stoi(fields[3]);
    } catch (const std::exception& ex) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + ex.what());
    }
    if (e.label < 0 || e.label > 7) {
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": label out of range [0,7]");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace orient8::io
