#pragma once

// Deterministic writers: CSV field dumps, binary NetPBM (P6) heat maps with a
// diverging colormap, key=value metadata sidecars, and point tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "scars/core/errors.hpp"
#include "scars/core/field.hpp"

namespace scars::io {

/// Shortest round-trip-safe decimal text of a double.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Field as a CSV matrix: header `q\p,<p_0>,...`, then one row per q node.
/// Both axes are written in ascending coordinate order.
inline void write_field_csv(std::ostream& out, const RealField& field) {
  const RealField f = field.ascending();
  out << "q\\p";
  for (Eigen::Index j = 0; j < f.p.size; ++j) out << ',' << format_real(f.p.coord(j));
  out << '\n';
  for (Eigen::Index i = 0; i < f.q.size; ++i) {
    out << format_real(f.q.coord(i));
    for (Eigen::Index j = 0; j < f.p.size; ++j) out << ',' << format_real(f.values(i, j));
    out << '\n';
  }
}

struct Rgb {
  std::uint8_t r = 255, g = 255, b = 255;
};

/// Diverging map: white at zero, blue for positive, red for negative,
/// linear in value / limit and saturated beyond +-limit.
inline Rgb diverging_color(double value, double limit) {
  if (!(limit > 0.0) || !std::isfinite(value)) return {};
  const double t = std::clamp(value / limit, -1.0, 1.0);
  const auto fade = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::abs(t))));
  if (t >= 0.0) return {fade, fade, 255};
  return {255, fade, fade};
}

/// P6 image of a field: q runs left to right, p bottom to top.
/// `limit` <= 0 selects the symmetric default max |field|.
inline double write_field_ppm(std::ostream& out, const RealField& field, double limit = 0.0) {
  const RealField f = field.ascending();
  if (!(limit > 0.0)) limit = f.values.cwiseAbs().maxCoeff();
  const Eigen::Index w = f.q.size, h = f.p.size;
  out << "P6\n" << w << ' ' << h << "\n255\n";
  std::vector<char> row(static_cast<std::size_t>(3 * w));
  for (Eigen::Index y = 0; y < h; ++y) {
    const Eigen::Index j = h - 1 - y;
    for (Eigen::Index i = 0; i < w; ++i) {
      const Rgb c = diverging_color(f.values(i, j), limit);
      row[static_cast<std::size_t>(3 * i)] = static_cast<char>(c.r);
      row[static_cast<std::size_t>(3 * i + 1)] = static_cast<char>(c.g);
      row[static_cast<std::size_t>(3 * i + 2)] = static_cast<char>(c.b);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  return limit;
}

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline void write_sidecar(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << k << '=' << v << '\n';
}

/// Output directory wrapper: creates the directory and writes whole files.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    require(!ec, "output: cannot create directory '" + root_.string() + "'");
  }

  [[nodiscard]] std::filesystem::path path(const std::string& name) const { return root_ / name; }

  template <class Writer>
  void write(const std::string& name, Writer&& writer, bool binary = false) const {
    std::ofstream out(path(name), binary ? std::ios::binary : std::ios::out);
    require(static_cast<bool>(out), "output: cannot open '" + path(name).string() + "'");
    writer(out);
    out.flush();
    require(static_cast<bool>(out), "output: failed writing '" + path(name).string() + "'");
  }

  /// Image plus CSV plus sidecar for one field. Returns the colormap limit.
  double write_field(const std::string& stem, const RealField& field, Metadata meta, double limit = 0.0) const {
    double used = limit;
    write(stem + ".ppm", [&](std::ostream& o) { used = write_field_ppm(o, field, limit); }, true);
    write(stem + ".csv", [&](std::ostream& o) { write_field_csv(o, field); });
    meta.emplace_back("min", format_real(field.values.minCoeff()));
    meta.emplace_back("max", format_real(field.values.maxCoeff()));
    meta.emplace_back("color_limit", format_real(used));
    write(stem + ".txt", [&](std::ostream& o) { write_sidecar(o, meta); });
    return used;
  }

 private:
  std::filesystem::path root_;
};

}  // namespace scars::io
