#include "eie/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eie::io {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void coordinate_header(std::ostream& out, Eigen::Index dims) {
  for (Eigen::Index c = 0; c < dims; ++c) out << ",x" << c;
  out << '\n';
}

void coordinate_row(std::ostream& out, const SampleBatch& m, Eigen::Index row) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << format_double(m(row, c));
  out << '\n';
}

template <typename Snap>
void write_snapshot_rows(const fs::path& path, const std::vector<Snap>& snapshots,
                         const SampleBatch& (*points)(const Snap&)) {
  std::ofstream out = open_out(path);
  const Eigen::Index dims = snapshots.empty() ? 0 : points(snapshots.front()).cols();
  out << "step,particle_id";
  coordinate_header(out, dims);
  for (const Snap& s : snapshots) {
    const SampleBatch& p = points(s);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      out << s.step << ',' << i;
      coordinate_row(out, p, i);
    }
  }
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_number(const std::string& text, double& value) {
  const char* begin = text.c_str();
  while (*begin == ' ' || *begin == '\t') ++begin;
  char* end = nullptr;
  value = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

// SVG pixel mapping for a square plot area with a margin.
struct Canvas {
  GridExtent extent;
  double size = 480.0;
  double margin = 24.0;
  double px(double x) const {
    return margin + (x - extent.x_min) / (extent.x_max - extent.x_min) * size;
  }
  double py(double y) const {
    return margin + (extent.y_max - y) / (extent.y_max - extent.y_min) * size;
  }
  double total() const { return size + 2.0 * margin; }
};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void svg_open(std::ostream& out, const Canvas& canvas, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(canvas.total())
      << "\" height=\"" << fixed(canvas.total()) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    out << "<text x=\"" << fixed(canvas.margin) << "\" y=\"16\" font-size=\"12\">" << title << "</text>\n";
  }
}

void svg_frame(std::ostream& out, const Canvas& canvas) {
  out << "<rect x=\"" << fixed(canvas.margin) << "\" y=\"" << fixed(canvas.margin) << "\" width=\""
      << fixed(canvas.size) << "\" height=\"" << fixed(canvas.size)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_history_csv(const fs::path& path, const TrainHistory& history) {
  std::ofstream out = open_out(path);
  out << "step,loss_d,loss_g,wall_ms\n";
  for (const StepRecord& r : history.records()) {
    out << r.step << ',' << format_double(r.loss_d) << ',' << format_double(r.loss_g) << ','
        << format_double(r.wall_ms) << '\n';
  }
}

void write_samples_csv(const fs::path& path, const SampleBatch& samples) {
  std::ofstream out = open_out(path);
  for (Eigen::Index c = 0; c < samples.cols(); ++c) out << (c ? ",x" : "x") << c;
  out << '\n';
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
      out << (c ? "," : "") << format_double(samples(i, c));
    }
    out << '\n';
  }
}

void write_snapshots_csv(const fs::path& path, const std::vector<ParticleSnapshot>& snapshots) {
  write_snapshot_rows<ParticleSnapshot>(
      path, snapshots, [](const ParticleSnapshot& s) -> const SampleBatch& { return s.particles; });
}

void write_snapshots_csv(const fs::path& path, const std::vector<Snapshot>& snapshots) {
  write_snapshot_rows<Snapshot>(path, snapshots,
                                [](const Snapshot& s) -> const SampleBatch& { return s.samples; });
}

void write_energy_csv(const fs::path& path, const std::vector<EnergyPoint>& energy) {
  std::ofstream out = open_out(path);
  out << "step,energy\n";
  for (const auto& e : energy) out << e.step << ',' << format_double(e.energy) << '\n';
}

void write_energy_csv(const fs::path& path, const std::vector<EnergyTracePoint>& energy) {
  std::ofstream out = open_out(path);
  out << "step,energy\n";
  for (const auto& e : energy) out << e.step << ',' << format_double(e.energy) << '\n';
}

void write_modes_csv(const fs::path& path, const spectral::AmplitudeHistory& history) {
  std::ofstream out = open_out(path);
  out << "step,time,k_x,k_y,amplitude\n";
  for (std::size_t s = 0; s < history.steps.size(); ++s) {
    for (const auto& m : history.modes) {
      out << history.steps[s] << ',' << format_double(history.times[s]) << ',' << m.kx << ','
          << m.ky << ',' << format_double(m.amplitude[s]) << '\n';
    }
  }
}

void write_matrix_csv(const fs::path& path, const Matrix& values) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      out << (j ? "," : "") << format_double(values(i, j));
    }
    out << '\n';
  }
}

SampleBatch read_samples_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size(); ++k) numeric = numeric && parse_number(fields[k], row[k]);
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": non-numeric value");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
  SampleBatch out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
  }
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& value) {
  std::ofstream out = open_out(path);
  out << value.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

nlohmann::json to_json(const CoverageReport& report) {
  return {{"modes_total", report.modes_total},
          {"modes_hit", report.modes_hit},
          {"high_quality_fraction", report.high_quality_fraction},
          {"assigned", report.assigned},
          {"high_quality", report.high_quality}};
}

void write_svg_scatter(const fs::path& path, const std::vector<ScatterSeries>& series,
                       const GridExtent& extent, const std::string& title) {
  const Canvas canvas{extent};
  std::ofstream out = open_out(path);
  svg_open(out, canvas, title);
  for (const ScatterSeries& s : series) {
    out << "<g fill=\"" << s.color << "\" fill-opacity=\"0.6\">";
    if (!s.label.empty()) out << "<title>" << s.label << "</title>";
    out << '\n';
    for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
      const double x = s.points(i, 0), y = s.points.cols() > 1 ? s.points(i, 1) : 0.0;
      if (x < extent.x_min || x > extent.x_max || y < extent.y_min || y > extent.y_max) continue;
      out << "<circle cx=\"" << fixed(canvas.px(x)) << "\" cy=\"" << fixed(canvas.py(y))
          << "\" r=\"1.5\"/>\n";
    }
    out << "</g>\n";
  }
  svg_frame(out, canvas);
  out << "</svg>\n";
}

void write_svg_heatmap(const fs::path& path, const Matrix& values, const GridExtent& extent,
                       const std::string& title) {
  const Canvas canvas{extent};
  std::ofstream out = open_out(path);
  svg_open(out, canvas, title);
  const double hi = values.size() ? values.maxCoeff() : 0.0;
  const double lo = values.size() ? values.minCoeff() : 0.0;
  const double cw = canvas.size / static_cast<double>(values.rows());
  const double ch = canvas.size / static_cast<double>(values.cols());
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const double t = hi > lo ? (values(i, j) - lo) / (hi - lo) : 0.0;
      const int shade = 255 - static_cast<int>(std::clamp(t, 0.0, 1.0) * 255.0 + 0.5);
      const double x = canvas.margin + static_cast<double>(i) * cw;
      const double y = canvas.margin + canvas.size - static_cast<double>(j + 1) * ch;
      out << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" width=\"" << fixed(cw)
          << "\" height=\"" << fixed(ch) << "\" fill=\"rgb(" << shade << ',' << shade << ','
          << shade << ")\"/>\n";
    }
  }
  svg_frame(out, canvas);
  out << "</svg>\n";
}

}  // namespace eie::io
