#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotorb/orbit.hpp"
#include "rotorb/tetra.hpp"

namespace rotorb {

namespace detail {

inline std::ofstream open_for_write(const std::string& path) {
  if (path.empty()) throw std::runtime_error("output path is empty");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

inline void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// 9 significant digits, enough to recover a float32 exactly
inline std::string g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

/// CSV with header x,y[,z],word_len.
template <int D>
void write_cloud_csv(const OrbitCloud<D>& cloud, const std::string& path) {
  auto out = detail::open_for_write(path);
  out << (D == 2 ? "x,y,word_len\n" : "x,y,z,word_len\n");
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points()[i];
    for (int c = 0; c < D; ++c) out << detail::g9(p[c]) << ',';
    out << cloud.word_len()[i] << '\n';
  }
  detail::finish(out, path);
}

/// ASCII PLY, float coordinates; planar clouds get z = 0.
template <int D>
void write_cloud_ply(const OrbitCloud<D>& cloud, const std::string& path) {
  auto out = detail::open_for_write(path);
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  for (const auto& p : cloud.points()) {
    const float z = D == 3 ? static_cast<float>(p[D - 1]) : 0.0f;
    out << detail::g9(static_cast<float>(p[0])) << ' ' << detail::g9(static_cast<float>(p[1])) << ' '
        << detail::g9(z) << '\n';
  }
  detail::finish(out, path);
}

template <int D>
struct CloudRows {
  std::vector<Vec<D>> points;
  std::vector<int> word_len;
};

template <int D>
CloudRows<D> read_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::string line;
  std::getline(in, line);
  const std::string expected = D == 2 ? "x,y,word_len" : "x,y,z,word_len";
  if (line != expected) throw std::runtime_error("unexpected CSV header '" + line + "'");
  CloudRows<D> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    Vec<D> p;
    for (int c = 0; c < D; ++c) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("short CSV row '" + line + "'");
      p[c] = std::stod(cell);
    }
    if (!std::getline(ss, cell, ',')) throw std::runtime_error("short CSV row '" + line + "'");
    rows.points.push_back(p);
    rows.word_len.push_back(std::stoi(cell));
  }
  return rows;
}

/// Tumble frames as rows (step, label, x, y, z); label is a vertex letter or P.
inline void write_tumble_csv(const TumbleTrace& trace, const std::string& path) {
  auto out = detail::open_for_write(path);
  out << "step,label,x,y,z\n";
  const auto row = [&](std::size_t step, char label, const Vec3& v) {
    out << step << ',' << label << ',' << detail::g9(v[0]) << ',' << detail::g9(v[1]) << ',' << detail::g9(v[2])
        << '\n';
  };
  for (const auto& f : trace.frames) {
    for (std::size_t i = 0; i < 4; ++i) row(f.step, kVertexLabels[i], f.vertices[i]);
    row(f.step, 'P', f.point);
  }
  detail::finish(out, path);
}

}  // namespace rotorb
