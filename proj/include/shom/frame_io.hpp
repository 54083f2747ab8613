#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "binary_io.hpp"
#include "detector.hpp"
#include "error.hpp"

namespace shom {

/// ZHF1 event-list file, all integers and floats little-endian:
///
///   offset  size  field
///        0     4  magic "ZHF1"
///        4     2  version (1)
///        6     2  reserved, 0
///        8    24  + grid: start [m] f64, step [m] f64, n_bins u32, reserved u32
///       32    24  - grid: same layout
///       56     8  n_frames u64 (< 2^32)
///       64     8  n_events u64
///       72   8*k  events: frame_index u32, bin_index u16, region u8 (0 = +, 1 = -), reserved u8
///
/// Events are ordered by frame, then region, then bin, without duplicates.
inline constexpr char kFrameMagic[4] = {'Z', 'H', 'F', '1'};
inline constexpr std::uint16_t kFrameVersion = 1;

namespace detail {

inline void put_grid(std::ostream& os, const WavelengthGrid& g) {
  io::put_f64(os, g.start());
  io::put_f64(os, g.step());
  io::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.size()));
  io::put_le<std::uint32_t>(os, 0);
}

inline WavelengthGrid get_grid(std::istream& is) {
  const double start = io::get_f64(is, "grid start");
  const double step = io::get_f64(is, "grid step");
  const auto n = io::get_le<std::uint32_t>(is, "grid size");
  io::get_le<std::uint32_t>(is, "grid padding");
  if (n > 0xffff) throw FormatError("grid larger than 16-bit bin index");
  try {
    return {start, step, n};
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid grid descriptor: ") + e.what());
  }
}

}  // namespace detail

inline void write_frames(std::ostream& os, const FrameBatch& batch) {
  os.write(kFrameMagic, 4);
  io::put_le<std::uint16_t>(os, kFrameVersion);
  io::put_le<std::uint16_t>(os, 0);
  detail::put_grid(os, batch.grid_plus());
  detail::put_grid(os, batch.grid_minus());
  io::put_le<std::uint64_t>(os, batch.n_frames());
  io::put_le<std::uint64_t>(os, batch.n_events());
  for (std::uint64_t f = 0; f < batch.n_frames(); ++f)
    for (const DetectionEvent& e : batch.frame(f)) {
      io::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f));
      io::put_le<std::uint16_t>(os, e.bin);
      io::put_le<std::uint8_t>(os, static_cast<std::uint8_t>(e.port));
      io::put_le<std::uint8_t>(os, 0);
    }
  if (!os) throw FormatError("failed writing frame file");
}

inline FrameBatch read_frames(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != std::string(kFrameMagic, 4))
    throw FormatError("not a ZHF1 frame file (bad magic)");
  const auto version = io::get_le<std::uint16_t>(is, "version");
  if (version != kFrameVersion) throw FormatError("unsupported ZHF1 version " + std::to_string(version));
  io::get_le<std::uint16_t>(is, "reserved");
  const WavelengthGrid gp = detail::get_grid(is);
  const WavelengthGrid gm = detail::get_grid(is);
  const auto n_frames = io::get_le<std::uint64_t>(is, "frame count");
  const auto n_events = io::get_le<std::uint64_t>(is, "event count");
  if (n_frames > 0xffffffffULL) throw FormatError("frame count exceeds 32-bit frame index");

  FrameBatch batch(gp, gm);
  std::vector<DetectionEvent> current;
  std::uint64_t frame = 0;
  auto flush_until = [&](std::uint64_t target) {
    while (frame < target) {
      batch.push_frame(current);
      current.clear();
      ++frame;
    }
  };
  DetectionEvent previous{0, Port::plus};
  for (std::uint64_t k = 0; k < n_events; ++k) {
    const auto f = io::get_le<std::uint32_t>(is, "event frame index");
    const auto bin = io::get_le<std::uint16_t>(is, "event bin");
    const auto region = io::get_le<std::uint8_t>(is, "event region");
    io::get_le<std::uint8_t>(is, "event padding");
    if (f >= n_frames) throw FormatError("event frame index out of range");
    if (f < frame) throw FormatError("events not ordered by frame");
    if (region > 1) throw FormatError("event region must be 0 or 1");
    const DetectionEvent e{bin, static_cast<Port>(region)};
    if (bin >= (e.port == Port::plus ? gp.size() : gm.size())) throw FormatError("event bin out of range");
    if (f == frame && !current.empty() && !(previous < e))
      throw FormatError("events within a frame not strictly ordered");
    flush_until(f);
    current.push_back(e);
    previous = e;
  }
  flush_until(n_frames);
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after last event");
  return batch;
}

inline void write_frames(const std::filesystem::path& path, const FrameBatch& batch) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_frames(os, batch);
}

inline FrameBatch read_frames(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_frames(is);
}

/// One line per click: frame,region,bin,lambda_nm. Meant for small batches.
inline void write_frames_csv(std::ostream& os, const FrameBatch& batch) {
  os << "frame,region,bin,lambda_nm\n";
  for (std::uint64_t f = 0; f < batch.n_frames(); ++f)
    for (const DetectionEvent& e : batch.frame(f)) {
      const bool plus = e.port == Port::plus;
      const WavelengthGrid& g = plus ? batch.grid_plus() : batch.grid_minus();
      os << f << ',' << (plus ? '+' : '-') << ',' << e.bin << ',' << g.center_nm(e.bin) << '\n';
    }
}

}  // namespace shom
