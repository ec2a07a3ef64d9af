#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "eie/evalmetrics.hpp"
#include "eie/flow.hpp"
#include "eie/linalg.hpp"
#include "eie/spectral.hpp"
#include "eie/trainer.hpp"

namespace eie::io {

namespace fs = std::filesystem;

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// step,loss_d,loss_g,wall_ms
void write_history_csv(const fs::path& path, const TrainHistory& history);
/// x0,x1,... one row per sample.
void write_samples_csv(const fs::path& path, const SampleBatch& samples);
/// step,particle_id,x0,x1,...
void write_snapshots_csv(const fs::path& path, const std::vector<ParticleSnapshot>& snapshots);
void write_snapshots_csv(const fs::path& path, const std::vector<Snapshot>& snapshots);
/// step,energy
void write_energy_csv(const fs::path& path, const std::vector<EnergyPoint>& energy);
void write_energy_csv(const fs::path& path, const std::vector<EnergyTracePoint>& energy);
/// step,time,k_x,k_y,amplitude
void write_modes_csv(const fs::path& path, const spectral::AmplitudeHistory& history);
/// Bare matrix, one CSV row per matrix row, no header.
void write_matrix_csv(const fs::path& path, const Matrix& values);

/// Reads a numeric CSV. A first line containing non-numeric fields is treated
/// as a header. Throws std::runtime_error on ragged rows or unparsable cells.
SampleBatch read_samples_csv(const fs::path& path);

/// Pretty-printed JSON followed by a newline.
void write_json(const fs::path& path, const nlohmann::json& value);
nlohmann::json read_json(const fs::path& path);

nlohmann::json to_json(const CoverageReport& report);

struct ScatterSeries {
  SampleBatch points;
  std::string color;
  std::string label;
};

/// Minimal 2-D scatter plot. Points outside the extent are dropped.
void write_svg_scatter(const fs::path& path, const std::vector<ScatterSeries>& series,
                       const GridExtent& extent, const std::string& title = "");
/// Greyscale heat map of values(i, j) at (x_i, y_j); darker is larger.
void write_svg_heatmap(const fs::path& path, const Matrix& values, const GridExtent& extent,
                       const std::string& title = "");

}  // namespace eie::io
