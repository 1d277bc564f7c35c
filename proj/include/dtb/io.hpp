// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "dtb/data_set.hpp"
#include "dtb/dense_matrix.hpp"
#include "dtb/errors.hpp"
#include "dtb/inversion.hpp"

namespace dtb {

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const std::string& in, std::size_t& pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos++])) << (8 * i);
  return v;
}

inline double get_f64(const std::string& in, std::size_t& pos) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos++])) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

// Shortest decimal form that round-trips an f64.
inline std::string f64_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Writes payload to path through a sibling temporary file plus rename, so a
// crash never leaves a half-written result behind.
inline void atomic_write(const std::filesystem::path& path, const std::string& payload) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("atomic_write: cannot open " + tmp.string());
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw FormatError("atomic_write: short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw FormatError("atomic_write: rename to " + path.string() + ": " + ec.message());
}

inline constexpr char kDataMagic[4] = {'D', 'T', 'B', 'D'};
inline constexpr std::uint32_t kDataVersion = 1;

// Serializes a data set: magic "DTBD", version, m, two_n as u32, tau as f64,
// then the frames in time order, each row-major. Everything little-endian.
inline std::string encode_data_set(const DataSet& data) {
  std::string out;
  out.reserve(24 + 8 * data.two_n * data.m * data.m);
  out.append(kDataMagic, 4);
  detail::put_u32(out, kDataVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(data.m));
  detail::put_u32(out, static_cast<std::uint32_t>(data.two_n));
  detail::put_f64(out, data.tau);
  for (std::size_t k = 0; k < data.two_n; ++k) {
    const DenseMatrix& fr = data.frame(k);
    for (std::size_t r = 0; r < data.m; ++r)
      for (std::size_t c = 0; c < data.m; ++c) detail::put_f64(out, fr(r, c));
  }
  return out;
}

// Parses the container format; frame symmetry and shape are re-validated by
// the DataSet constructor.
inline DataSet decode_data_set(const std::string& bytes) {
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kDataMagic, 4) != 0)
    throw FormatError("data container: bad magic");
  std::size_t pos = 4;
  const std::uint32_t version = detail::get_u32(bytes, pos);
  if (version != kDataVersion)
    throw FormatError("data container: unsupported version " + std::to_string(version));
  const std::uint32_t m = detail::get_u32(bytes, pos);
  const std::uint32_t two_n = detail::get_u32(bytes, pos);
  const double tau = detail::get_f64(bytes, pos);
  const std::size_t expect =
      24 + 8 * static_cast<std::size_t>(two_n) * static_cast<std::size_t>(m) * m;
  if (bytes.size() != expect)
    throw FormatError("data container: expected " + std::to_string(expect) + " bytes, got " +
                      std::to_string(bytes.size()));
  std::vector<DenseMatrix> frames(two_n, DenseMatrix(m, m));
  for (std::uint32_t k = 0; k < two_n; ++k)
    for (std::uint32_t r = 0; r < m; ++r)
      for (std::uint32_t c = 0; c < m; ++c) frames[k](r, c) = detail::get_f64(bytes, pos);
  return DataSet(tau, std::move(frames));
}

inline void write_data_set(const std::filesystem::path& path, const DataSet& data) {
  atomic_write(path, encode_data_set(data));
}

inline DataSet read_data_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("data container: cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_data_set(bytes);
}

// One row per time sample: t, then the m*m frame entries in row-major order.
inline std::string traces_csv(const DataSet& data) {
  std::string out = "t";
  for (std::size_t r = 0; r < data.m; ++r)
    for (std::size_t c = 0; c < data.m; ++c)
      out += ",D_" + std::to_string(r + 1) + "_" + std::to_string(c + 1);
  out += "\n";
  for (std::size_t k = 0; k < data.two_n; ++k) {
    out += detail::f64_text(static_cast<double>(k) * data.tau);
    const DenseMatrix& fr = data.frame(k);
    for (std::size_t r = 0; r < data.m; ++r)
      for (std::size_t c = 0; c < data.m; ++c) out += "," + detail::f64_text(fr(r, c));
    out += "\n";
  }
  return out;
}

// Staggered impedance ladders side by side; the dual grid has its own column
// pair because the node sets differ.
inline std::string impedance_csv(const ImpedanceEstimate& est) {
  std::string out = "T_primary,sigma_primary,T_dual,sigma_dual\n";
  for (std::size_t j = 0; j < est.n; ++j) {
    out += detail::f64_text(est.primary_nodes[j]) + "," +
           detail::f64_text(est.primary_values[j]) + "," + detail::f64_text(est.dual_nodes[j]) +
           "," + detail::f64_text(est.dual_values[j]) + "\n";
  }
  return out;
}

// Grid image as x,y,value rows (row-major, y outer) for easy plotting.
inline std::string image_csv(const Image& img, double h) {
  std::string out = "x,y,value\n";
  for (std::size_t iy = 0; iy < img.ny; ++iy)
    for (std::size_t ix = 0; ix < img.nx; ++ix) {
      out += detail::f64_text(static_cast<double>(ix) * h) + "," +
             detail::f64_text(static_cast<double>(iy) * h) + "," +
             detail::f64_text(img.at(ix, iy)) + "\n";
    }
  return out;
}

}  // namespace dtb
