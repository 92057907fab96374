#include "fhl/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fhl/errors.hpp"

namespace fhl {

double Trajectory::sup_norm() const {
  double s = 0.0;
  for (const auto& f : frames) s = std::max(s, f.sup_norm());
  return s;
}

namespace {

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu.bin", i);
  return buf;
}

}  // namespace

void export_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                       const std::vector<ManifestColumn>& columns) {
  std::filesystem::create_directories(dir);
  for (const auto& col : columns)
    if (col.values.size() != traj.size()) throw InputError("manifest column " + col.name + " has wrong length");
  std::ofstream man(dir / "manifest.csv");
  if (!man) throw InputError("cannot write manifest in " + dir.string());
  man << std::setprecision(17) << "time";
  for (const auto& col : columns) man << ',' << col.name;
  man << ",file\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto name = frame_name(i);
    write_binary(dir / name, traj.frames[i]);
    man << traj.times[i];
    for (const auto& col : columns) man << ',' << col.values[i];
    man << ',' << name << '\n';
  }
}

Trajectory import_trajectory(const std::filesystem::path& dir) {
  std::ifstream man(dir / "manifest.csv");
  if (!man) throw InputError("no manifest.csv in " + dir.string());
  std::string line;
  std::getline(man, line);
  Trajectory traj;
  while (std::getline(man, line)) {
    if (line.empty()) continue;
    const auto first = line.find(',');
    const auto last = line.rfind(',');
    traj.times.push_back(std::stod(line.substr(0, first)));
    traj.frames.push_back(read_field(dir / line.substr(last + 1)));
  }
  if (traj.frames.empty()) throw InputError("empty trajectory in " + dir.string());
  return traj;
}

}  // namespace fhl
