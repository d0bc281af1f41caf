#pragma once

#include <string>
#include <vector>

#include "orient8/slice.hpp"

namespace orient8::io {

// Two on-disk image formats:
//
//  .pgm  — binary PGM (P5), maxval 255 or 65535, single channel. Values are
//          scaled to [0,1] on read and quantized on write, so PGM is an
//          interchange format, not a lossless store.
//  .ori8 — native raw tensor (little-endian):
//            magic "ORI8", version u32,
//            channels u32, height u32, width u32,
//            float32 pixels in [channel][y][x] order,
//            patient id  (u16 length + UTF-8),
//            modality    (u16 length + UTF-8, one of C0/LGE/T2),
//            orientation (u8 presence flag, then u8 label when present).
//          Round trips are lossless including metadata.
//
// Malformed input throws FormatError naming the byte offset.

Slice read_image(const std::string& path);
void write_image(const Slice& slice, const std::string& path);

Slice read_pgm(const std::string& path);
void write_pgm(const Slice& slice, const std::string& path, int maxval = 255);

Slice read_ori8(const std::string& path);
void write_ori8(const Slice& slice, const std::string& path);

// Dataset manifest: one line per slice file,
// "relative-path<TAB>patient<TAB>modality<TAB>label".
struct ManifestEntry {
  std::string relative_path;
  std::string patient_id;
  Modality modality = Modality::C0;
  int label = 0;
};

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::string& path);
std::vector<ManifestEntry> read_manifest(const std::string& path);

}  // namespace orient8::io
