#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "solver.hpp"

namespace deconv {

// ---------------------------------------------------------------------------
// Time series CSV

inline constexpr const char* kTimeseriesHeader =
    "t,h0_sq,h1_sq,aw_sq,dissipation_integral,work_integral,energy_residual,absorb_bound";

namespace detail {

inline void append_double(std::string& out, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}

}  // namespace detail

/// Shortest round-trip decimal per value, one row per sample.
inline std::string format_timeseries(const Trajectory& traj) {
  std::string out = kTimeseriesHeader;
  out += '\n';
  for (const auto& s : traj.samples) {
    const double row[] = {s.t, s.h0_sq, s.h1_sq, s.aw_sq, s.dissipation_integral,
                          s.work_integral, s.energy_residual, s.absorb_bound};
    for (std::size_t i = 0; i < 8; ++i) {
      if (i) out += ',';
      detail::append_double(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

inline Trajectory parse_timeseries(std::string_view text) {
  Trajectory traj;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw IoError("time series: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTimeseriesHeader) throw IoError("time series line 1: unexpected header");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 8> v{};
    std::size_t col = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view cell = rest.substr(0, comma);
      if (col >= v.size())
        throw IoError("time series line " + std::to_string(line_no) + ": too many columns");
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v[col]);
      if (ec != std::errc{} || p != cell.data() + cell.size())
        throw IoError("time series line " + std::to_string(line_no) + ": cannot parse '" +
                      std::string(cell) + "'");
      ++col;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (col != v.size())
      throw IoError("time series line " + std::to_string(line_no) + ": expected 8 columns, got " +
                    std::to_string(col));
    traj.samples.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
  }
  return traj;
}

inline void write_timeseries(const Trajectory& traj, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << format_timeseries(traj);
  if (!f) throw IoError("write failed for '" + path + "'");
}

inline Trajectory read_timeseries(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_timeseries(ss.str());
}

// ---------------------------------------------------------------------------
// Binary snapshots
//
// Little-endian layout:
//   0  char[8] magic "DCNVSNAP"     32 f64 nu
//   8  u32 version (1)              40 f64 delta
//   12 u32 K                        48 u32 N
//   16 u8  dealias (0: 2/3, 1: none), 3 zero bytes
//   20 i32 max_mode (-1: none)      52 u32 reserved
//   24 f64 t                        56 u64 stored mode count K*K*(K/2+1)
//   64 payload: modes ordered lexicographically by signed (k1, k2, k3), with
//      k1, k2 in (-K/2, K/2] and k3 in [0, K/2]; per mode three components
//      of (re, im) f64. Negative-k3 modes are the conjugates of stored ones.

inline constexpr char kSnapshotMagic[8] = {'D', 'C', 'N', 'V', 'S', 'N', 'A', 'P'};
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 64;

struct Snapshot {
  double t = 0.0;
  double nu = 0.0;
  double delta = 0.0;
  int N = 0;
  SpectralVectorField field;
};

inline Snapshot make_snapshot(const SolverState& s, const ModelParams& p) {
  return Snapshot{s.t, p.nu, p.filter.delta, p.filter.order, s.w};
}

namespace detail {

template <typename T>
void put_le(std::vector<unsigned char>& out, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  const U u = std::bit_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<unsigned char>(u >> (8 * i)));
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) u |= U(p[i]) << (8 * i);
  return std::bit_cast<T>(u);
}

/// Storage indices in canonical snapshot order.
inline std::vector<std::size_t> canonical_order(const WaveGrid& g) {
  const int K = g.resolution();
  std::vector<std::size_t> order;
  order.reserve(g.stored_modes());
  auto wrap = [K](int k) { return k < 0 ? k + K : k; };
  for (int k1 = -K / 2 + 1; k1 <= K / 2; ++k1)
    for (int k2 = -K / 2 + 1; k2 <= K / 2; ++k2)
      for (int k3 = 0; k3 <= K / 2; ++k3) order.push_back(g.index(wrap(k1), wrap(k2), k3));
  return order;
}

}  // namespace detail

inline std::vector<unsigned char> encode_snapshot(const Snapshot& s) {
  const WaveGrid& g = s.field.grid();
  std::vector<unsigned char> out;
  out.reserve(kSnapshotHeaderBytes + g.stored_modes() * 48);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(kSnapshotMagic[i]));
  detail::put_le(out, kSnapshotVersion);
  detail::put_le(out, std::uint32_t(g.resolution()));
  detail::put_le(out, std::uint8_t(g.rule() == DealiasRule::two_thirds ? 0 : 1));
  for (int i = 0; i < 3; ++i) detail::put_le(out, std::uint8_t(0));
  detail::put_le(out, std::int32_t(g.max_mode()));
  detail::put_le(out, s.t);
  detail::put_le(out, s.nu);
  detail::put_le(out, s.delta);
  detail::put_le(out, std::uint32_t(s.N));
  detail::put_le(out, std::uint32_t(0));
  detail::put_le(out, std::uint64_t(g.stored_modes()));
  for (std::size_t idx : detail::canonical_order(g))
    for (int c = 0; c < 3; ++c) {
      detail::put_le(out, s.field.at(c, idx).real());
      detail::put_le(out, s.field.at(c, idx).imag());
    }
  return out;
}

inline Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kSnapshotHeaderBytes) throw IoError("snapshot truncated: header incomplete");
  if (std::memcmp(bytes.data(), kSnapshotMagic, 8) != 0) throw IoError("snapshot: bad magic");
  const unsigned char* p = bytes.data();
  const auto version = detail::get_le<std::uint32_t>(p + 8);
  if (version != kSnapshotVersion)
    throw IoError("snapshot: unsupported version " + std::to_string(version));
  const auto K = detail::get_le<std::uint32_t>(p + 12);
  const auto rule_byte = p[16];
  if (rule_byte > 1) throw IoError("snapshot: bad dealias rule byte");
  const auto max_mode = detail::get_le<std::int32_t>(p + 20);
  if (K < 4 || K % 2 != 0 || K > 4096) throw IoError("snapshot: invalid K " + std::to_string(K));
  GridPtr grid = make_grid(int(K), rule_byte == 0 ? DealiasRule::two_thirds : DealiasRule::none,
                           max_mode);
  Snapshot s;
  s.t = detail::get_le<double>(p + 24);
  s.nu = detail::get_le<double>(p + 32);
  s.delta = detail::get_le<double>(p + 40);
  s.N = int(detail::get_le<std::uint32_t>(p + 48));
  const auto count = detail::get_le<std::uint64_t>(p + 56);
  if (count != grid->stored_modes())
    throw IoError("snapshot: mode count " + std::to_string(count) + " inconsistent with K=" +
                  std::to_string(K));
  if (bytes.size() != kSnapshotHeaderBytes + count * 48)
    throw IoError("snapshot truncated: expected " + std::to_string(kSnapshotHeaderBytes + count * 48) +
                  " bytes, got " + std::to_string(bytes.size()));
  s.field = SpectralVectorField(grid);
  const unsigned char* q = p + kSnapshotHeaderBytes;
  for (std::size_t idx : detail::canonical_order(*grid))
    for (int c = 0; c < 3; ++c) {
      const double re = detail::get_le<double>(q);
      const double im = detail::get_le<double>(q + 8);
      s.field.at(c, idx) = Complex{re, im};
      q += 16;
    }
  return s;
}

inline void write_snapshot(const Snapshot& s, const std::string& path) {
  const auto bytes = encode_snapshot(s);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!f) throw IoError("write failed for '" + path + "'");
}

inline void write_snapshot(const SolverState& state, const ModelParams& params,
                           const std::string& path) {
  write_snapshot(make_snapshot(state, params), path);
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

/// Rejects a snapshot whose grid differs from the configured one.
inline void check_snapshot_grid(const Snapshot& s, const WaveGrid& expected) {
  const WaveGrid& g = s.field.grid();
  if (g.resolution() != expected.resolution())
    throw ValidationError("snapshot grid K=" + std::to_string(g.resolution()) +
                          " does not match configured K=" + std::to_string(expected.resolution()));
  if (!(g == expected)) throw ValidationError("snapshot dealiasing does not match configured grid");
}

}  // namespace deconv
