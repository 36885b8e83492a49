#include "cvm/output.hpp"

#include "json.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#ifndef CVM_VERSION
#define CVM_VERSION "0.0.0"
#endif

namespace cvm {

std::string version_string() { return CVM_VERSION; }

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

CsvWriter::CsvWriter(std::filesystem::path path, const std::vector<std::string>& header)
    : path_(std::move(path)), out_(path_, std::ios::binary), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open '" + path_.string() + "' for writing");
  write_line(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw std::logic_error("row has " + std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(columns_) + " in '" + path_.string() + "'");
  write_line(cells);
}

void CsvWriter::write_line(const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k].find_first_of(",\n\"") != std::string::npos)
      throw std::logic_error("CSV cell contains a separator: '" + cells[k] + "'");
    if (k > 0) out_ << ',';
    out_ << cells[k];
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
  out_.close();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

Image::Image(int w, int h, Rgb fill) : width(w), height(h) {
  if (w < 1 || h < 1) throw std::invalid_argument("image dimensions must be positive");
  pixels.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  for (std::size_t k = 0; k < pixels.size(); k += 3) {
    pixels[k] = fill.r;
    pixels[k + 1] = fill.g;
    pixels[k + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  const std::size_t k = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
  return {pixels.at(k), pixels.at(k + 1), pixels.at(k + 2)};
}

void Image::set(int x, int y, Rgb color) {
  const std::size_t k = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
  pixels.at(k) = color.r;
  pixels.at(k + 1) = color.g;
  pixels.at(k + 2) = color.b;
}

Rgb opinion_color(Opinion opinion) {
  static constexpr std::array<Rgb, 10> palette{{{230, 25, 75},
                                                {60, 180, 75},
                                                {0, 130, 200},
                                                {255, 225, 25},
                                                {145, 30, 180},
                                                {70, 240, 240},
                                                {245, 130, 48},
                                                {240, 50, 230},
                                                {210, 245, 60},
                                                {0, 128, 128}}};
  if (opinion < 1) throw std::out_of_range("opinions start at 1");
  return palette[static_cast<std::size_t>(opinion - 1) % palette.size()];
}

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  const std::string bytes = encode_ppm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

SpaceTimeTrajectory sample_spacetime(const Params& params, const DensityVector& density, int cycle_size,
                                     double t_max, int rows, std::uint64_t seed) {
  if (rows < 1) throw std::invalid_argument("need at least one snapshot row");
  if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be nonnegative");
  auto graph = std::make_shared<const Graph>(Graph::cycle(cycle_size));
  CounterRng rng(seed, 0);
  Configuration initial = sample_initial(graph, density, rng);
  RunState state(std::move(initial), params, rng);

  SpaceTimeTrajectory out;
  for (int k = 0; k < rows; ++k) out.times.push_back(t_max * k / rows);
  const Observer snapshot{"snapshot", out.times, [](const RunState& s) {
                            const auto o = s.configuration().opinions();
                            return std::vector<double>(o.begin(), o.end());
                          }};
  StopRule stop = StopRule::until_time(out.times.back());
  stop.at_absorption = true;
  RunResult result = run(state, stop, {&snapshot, 1});
  for (const auto& values : result.series.front().values)
    out.rows.emplace_back(values.begin(), values.end());
  return out;
}

Image render_spacetime(const SpaceTimeTrajectory& trajectory, bool interfaces_only) {
  if (trajectory.rows.empty()) throw std::invalid_argument("trajectory has no snapshots");
  const int width = static_cast<int>(trajectory.rows.front().size());
  Image image(width, static_cast<int>(trajectory.rows.size()), kBackgroundColor);
  for (int y = 0; y < image.height; ++y) {
    const auto& row = trajectory.rows[static_cast<std::size_t>(y)];
    if (static_cast<int>(row.size()) != width) throw std::invalid_argument("snapshot widths differ");
    for (int x = 0; x < width; ++x) {
      if (interfaces_only) {
        if (row[static_cast<std::size_t>(x)] != row[static_cast<std::size_t>((x + 1) % width)])
          image.set(x, y, kInterfaceColor);
      } else {
        image.set(x, y, opinion_color(row[static_cast<std::size_t>(x)]));
      }
    }
  }
  return image;
}

Rgb phase_color(Phase phase) {
  switch (phase) {
    case Phase::Fluctuation: return {0, 130, 200};
    case Phase::FixationProved: return {230, 25, 75};
    case Phase::Unresolved: return {170, 170, 170};
  }
  return {170, 170, 170};
}

Image render_phase_diagram(const std::vector<PhaseCell>& cells, int scale) {
  if (cells.empty()) throw std::invalid_argument("phase diagram has no cells");
  if (scale < 1) throw std::invalid_argument("scale must be positive");
  int max_f = 2;
  for (const auto& c : cells) max_f = std::max(max_f, c.opinions);
  // Rows F = 2..max_f, columns theta = 1..max_f - 1.
  Image image((max_f - 1) * scale, (max_f - 1) * scale, kBackgroundColor);
  for (const auto& c : cells) {
    const Rgb color = phase_color(c.phase);
    for (int dy = 0; dy < scale; ++dy)
      for (int dx = 0; dx < scale; ++dx) image.set((c.theta - 1) * scale + dx, (c.opinions - 2) * scale + dy, color);
  }
  return image;
}

std::filesystem::path write_manifest(const std::filesystem::path& directory, const RunConfig& config,
                                     const ManifestInfo& info) {
  nlohmann::ordered_json j;
  j["tool"] = "cvm";
  j["version"] = version_string();
  j["command"] = info.command;
  j["seed"] = info.seed ? nlohmann::ordered_json(*info.seed) : nlohmann::ordered_json(nullptr);
  const std::string canonical = canonical_text(config);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a64(canonical));
  j["config_hash"] = hash;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.assignments) j["config"][k] = v;
  j["artifacts"] = info.artifacts;

  const auto path = directory / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  return path;
}

} // namespace cvm
