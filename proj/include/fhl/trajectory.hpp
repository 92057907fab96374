#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fhl/field.hpp"

namespace fhl {

/// Time-ordered samples of a spatial field.
struct Trajectory {
  std::vector<double> times;
  std::vector<Field> frames;

  std::size_t size() const { return frames.size(); }
  const Grid& grid() const { return frames.front().grid(); }
  int m() const { return frames.front().m(); }
  /// sup over all frames of |u|.
  double sup_norm() const;
};

/// Extra per-sample CSV columns written next to the time column.
struct ManifestColumn {
  std::string name;
  std::vector<double> values;
};

/// Writes frame_00000.bin ... plus manifest.csv (time, extra columns, file).
void export_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                       const std::vector<ManifestColumn>& columns);
Trajectory import_trajectory(const std::filesystem::path& dir);

}  // namespace fhl
