#pragma once

// Artifact writers: CSV tables, binary PPM images and run manifests.

#include "cvm/analytics.hpp"
#include "cvm/config.hpp"
#include "cvm/model.hpp"
#include "cvm/rational.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace cvm {

std::string version_string();

/// 12 significant digits, C locale ("%.12g").
std::string format_real(double value);

class CsvWriter {
 public:
  /// Opens `path` for writing and emits the header. Throws std::runtime_error
  /// naming the path on failure.
  CsvWriter(std::filesystem::path path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  /// Flushes and checks the stream.
  void close();

  const std::filesystem::path& path() const noexcept { return path_; }

  static std::string cell(double value) { return format_real(value); }
  static std::string cell(const Rational& value) { return to_fraction_string(value); }
  static std::string cell(long long value) { return std::to_string(value); }
  static std::string cell(std::uint64_t value) { return std::to_string(value); }
  static std::string cell(int value) { return std::to_string(value); }

 private:
  void write_line(const std::vector<std::string>& cells);

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// Parses a file written by CsvWriter (no quoting) into rows of fields.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

struct Rgb {
  std::uint8_t r, g, b;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB

  Image(int w, int h, Rgb fill);
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb color);
};

/// Palette entry for an opinion; wraps after ten colors.
Rgb opinion_color(Opinion opinion);
inline constexpr Rgb kInterfaceColor{0, 0, 0};
inline constexpr Rgb kBackgroundColor{255, 255, 255};

/// "P6\n<w> <h>\n255\n" followed by the raw pixels.
std::string encode_ppm(const Image& image);
void write_ppm(const std::filesystem::path& path, const Image& image);

/// Opinion snapshots of one cycle run, one row per sample time.
struct SpaceTimeTrajectory {
  std::vector<double> times;
  std::vector<std::vector<Opinion>> rows;
};

/// Samples `rows` snapshots at t = k t_max / rows, k = 0..rows-1.
SpaceTimeTrajectory sample_spacetime(const Params& params, const DensityVector& density, int cycle_size,
                                     double t_max, int rows, std::uint64_t seed);

/// One pixel per vertex and snapshot. In interface mode the pixel at column x
/// is black exactly when x and x+1 (cyclically) disagree, white otherwise.
Image render_spacetime(const SpaceTimeTrajectory& trajectory, bool interfaces_only);

/// F on the vertical axis (top = 2), theta horizontal, `scale` pixels per cell.
Image render_phase_diagram(const std::vector<PhaseCell>& cells, int scale = 8);
Rgb phase_color(Phase phase);

struct ManifestInfo {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> artifacts;
};

/// Writes manifest.json (tool version, command, seed, config hash and the
/// configuration itself) into `directory`.
std::filesystem::path write_manifest(const std::filesystem::path& directory, const RunConfig& config,
                                     const ManifestInfo& info);

} // namespace cvm
