#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "seisal/core.hpp"
#include "seisal/dcs.hpp"
#include "seisal/fusion.hpp"
#include "seisal/segy.hpp"
#include "seisal/spectral.hpp"
#include "seisal/synth.hpp"
#include "seisal/volume.hpp"
#include "seisal/volume_io.hpp"

namespace seisal {

enum class FusionMode { Equal, Manual, Adapt };

inline FusionMode fusion_mode_from_name(const std::string& s) {
  if (s == "equal") return FusionMode::Equal;
  if (s == "manual") return FusionMode::Manual;
  if (s == "adapt") return FusionMode::Adapt;
  throw std::invalid_argument("unknown fusion mode '" + s +
                              "', expected equal, manual or adapt");
}

inline const char* fusion_mode_name(FusionMode m) {
  switch (m) {
    case FusionMode::Equal: return "equal";
    case FusionMode::Manual: return "manual";
    case FusionMode::Adapt: return "adapt";
  }
  return "equal";
}

// Everything a `saliency` run needs, loadable from a flat key=value file.
// CLI flags overwrite individual fields after the file is read; the
// effective config is echoed into the run report.
struct PipelineConfig {
  std::string input;
  std::string output;
  std::string mask;  // optional ground-truth mask, enables detection metrics

  int tile_n = 16;
  int tile_stride = 8;
  Taper taper = Taper::None;

  std::array<std::string, 3> dcs_orientation{"full", "full", "full"};
  int dcs_radius = 2;
  double dcs_sigma = 1.0;
  DcsWeighting dcs_weighting = DcsWeighting::Inner;
  std::string dcs_template;  // window template file; overrides orientations

  FusionMode fusion_mode = FusionMode::Equal;
  Vec3 manual_weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  TrainerConfig trainer;
  std::string desired = "axis:t";  // axis:t|x|y or a labeled .svol path
  int readapt_every = 0;
  std::string mse_out;  // CSV path for the training curve

  Axis slice_axis = Axis::T;
  std::vector<int> slice_indices;
  std::vector<double> slice_times_ms;
  std::string slice_dir;
  bool save_maps = false;      // persist S_t, S_x, S_y next to the output
  bool save_energies = false;  // persist E_t, E_x, E_y next to the output

  SegyOptions segy;

  int threads = 0;  // 0 = auto

  bool operator==(const PipelineConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string fmt_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline int cfg_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
    throw config_error("bad integer for " + key + ": '" + v + "'");
  return out;
}

inline double cfg_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
    throw config_error("bad number for " + key + ": '" + v + "'");
  return out;
}

inline bool cfg_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw config_error("bad boolean for " + key + ": '" + v +
                     "' (use true/false)");
}

template <typename T, typename Parse>
std::vector<T> cfg_list(const std::string& key, const std::string& v,
                        Parse parse) {
  std::vector<T> out;
  std::string item;
  std::istringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse(key, item));
  }
  return out;
}

template <typename T, typename Fmt>
std::string join_list(const std::vector<T>& v, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out;
}

}  // namespace detail

// Applies one key=value pair; throws config_error for unknown keys or bad
// values. Shared by the config-file parser and CLI flag overrides.
inline void apply_config_kv(PipelineConfig& cfg, const std::string& key,
                            const std::string& value) {
  using detail::cfg_bool;
  using detail::cfg_double;
  using detail::cfg_int;
  try {
    if (key == "input") cfg.input = value;
    else if (key == "output") cfg.output = value;
    else if (key == "mask") cfg.mask = value;
    else if (key == "tiling.n") cfg.tile_n = cfg_int(key, value);
    else if (key == "tiling.stride") cfg.tile_stride = cfg_int(key, value);
    else if (key == "tiling.taper") cfg.taper = taper_from_name(value);
    else if (key == "dcs.orientation_t") cfg.dcs_orientation[0] = value;
    else if (key == "dcs.orientation_x") cfg.dcs_orientation[1] = value;
    else if (key == "dcs.orientation_y") cfg.dcs_orientation[2] = value;
    else if (key == "dcs.radius") cfg.dcs_radius = cfg_int(key, value);
    else if (key == "dcs.sigma") cfg.dcs_sigma = cfg_double(key, value);
    else if (key == "dcs.weighting")
      cfg.dcs_weighting = weighting_from_name(value);
    else if (key == "dcs.template") cfg.dcs_template = value;
    else if (key == "fusion.mode") cfg.fusion_mode = fusion_mode_from_name(value);
    else if (key == "fusion.weights") {
      const auto w = detail::cfg_list<double>(key, value, cfg_double);
      if (w.size() != 3)
        throw config_error("fusion.weights needs exactly Wt,Wx,Wy");
      cfg.manual_weights = {w[0], w[1], w[2]};
    } else if (key == "fusion.trainer")
      cfg.trainer.kind = trainer_from_name(value);
    else if (key == "fusion.mu_lms") cfg.trainer.mu_lms = cfg_double(key, value);
    else if (key == "fusion.mu_nlms")
      cfg.trainer.mu_nlms = cfg_double(key, value);
    else if (key == "fusion.eps") cfg.trainer.eps = cfg_double(key, value);
    else if (key == "fusion.lambda") cfg.trainer.lambda = cfg_double(key, value);
    else if (key == "fusion.delta") cfg.trainer.delta = cfg_double(key, value);
    else if (key == "fusion.desired") cfg.desired = value;
    else if (key == "fusion.readapt_every")
      cfg.readapt_every = cfg_int(key, value);
    else if (key == "fusion.mse_out") cfg.mse_out = value;
    else if (key == "export.slice_axis") cfg.slice_axis = axis_from_name(value);
    else if (key == "export.slice_indices")
      cfg.slice_indices = detail::cfg_list<int>(key, value, cfg_int);
    else if (key == "export.slice_times_ms")
      cfg.slice_times_ms = detail::cfg_list<double>(key, value, cfg_double);
    else if (key == "export.dir") cfg.slice_dir = value;
    else if (key == "export.save_maps") cfg.save_maps = cfg_bool(key, value);
    else if (key == "export.save_energies")
      cfg.save_energies = cfg_bool(key, value);
    else if (key == "segy.inline_byte")
      cfg.segy.inline_byte = cfg_int(key, value);
    else if (key == "segy.crossline_byte")
      cfg.segy.crossline_byte = cfg_int(key, value);
    else if (key == "segy.fill_missing")
      cfg.segy.fill_missing = cfg_bool(key, value);
    else if (key == "threads")
      cfg.threads = value == "auto" ? 0 : cfg_int(key, value);
    else
      throw config_error("unknown config key '" + key + "'");
  } catch (const std::invalid_argument& e) {
    throw config_error(key + ": " + e.what());
  }
}

inline PipelineConfig parse_config(std::istream& in) {
  PipelineConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) +
                         ": expected key=value, got '" + line + "'");
    apply_config_kv(cfg, detail::trim(line.substr(0, eq)),
                    detail::trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline PipelineConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path);
  return parse_config(in);
}

inline std::string serialize_config(const PipelineConfig& cfg) {
  using detail::fmt_double;
  std::ostringstream out;
  out << "input=" << cfg.input << "\n";
  out << "output=" << cfg.output << "\n";
  out << "mask=" << cfg.mask << "\n";
  out << "tiling.n=" << cfg.tile_n << "\n";
  out << "tiling.stride=" << cfg.tile_stride << "\n";
  out << "tiling.taper=" << taper_name(cfg.taper) << "\n";
  out << "dcs.orientation_t=" << cfg.dcs_orientation[0] << "\n";
  out << "dcs.orientation_x=" << cfg.dcs_orientation[1] << "\n";
  out << "dcs.orientation_y=" << cfg.dcs_orientation[2] << "\n";
  out << "dcs.radius=" << cfg.dcs_radius << "\n";
  out << "dcs.sigma=" << fmt_double(cfg.dcs_sigma) << "\n";
  out << "dcs.weighting=" << weighting_name(cfg.dcs_weighting) << "\n";
  out << "dcs.template=" << cfg.dcs_template << "\n";
  out << "fusion.mode=" << fusion_mode_name(cfg.fusion_mode) << "\n";
  out << "fusion.weights=" << fmt_double(cfg.manual_weights[0]) << ","
      << fmt_double(cfg.manual_weights[1]) << ","
      << fmt_double(cfg.manual_weights[2]) << "\n";
  out << "fusion.trainer=" << trainer_name(cfg.trainer.kind) << "\n";
  out << "fusion.mu_lms=" << fmt_double(cfg.trainer.mu_lms) << "\n";
  out << "fusion.mu_nlms=" << fmt_double(cfg.trainer.mu_nlms) << "\n";
  out << "fusion.eps=" << fmt_double(cfg.trainer.eps) << "\n";
  out << "fusion.lambda=" << fmt_double(cfg.trainer.lambda) << "\n";
  out << "fusion.delta=" << fmt_double(cfg.trainer.delta) << "\n";
  out << "fusion.desired=" << cfg.desired << "\n";
  out << "fusion.readapt_every=" << cfg.readapt_every << "\n";
  out << "fusion.mse_out=" << cfg.mse_out << "\n";
  out << "export.slice_axis=" << axis_name(cfg.slice_axis) << "\n";
  out << "export.slice_indices="
      << detail::join_list(cfg.slice_indices,
                           [](int v) { return std::to_string(v); })
      << "\n";
  out << "export.slice_times_ms="
      << detail::join_list(cfg.slice_times_ms, fmt_double) << "\n";
  out << "export.dir=" << cfg.slice_dir << "\n";
  out << "export.save_maps=" << (cfg.save_maps ? "true" : "false") << "\n";
  out << "export.save_energies=" << (cfg.save_energies ? "true" : "false")
      << "\n";
  out << "segy.inline_byte=" << cfg.segy.inline_byte << "\n";
  out << "segy.crossline_byte=" << cfg.segy.crossline_byte << "\n";
  out << "segy.fill_missing=" << (cfg.segy.fill_missing ? "true" : "false")
      << "\n";
  if (cfg.threads == 0)
    out << "threads=auto\n";
  else
    out << "threads=" << cfg.threads << "\n";
  return out.str();
}

// Maps a time in ms onto a t-axis sample index using the volume's sample
// interval.
inline int time_to_slice_index(const Volume3D& v, double ms) {
  if (!(v.sample_interval_ms > 0.0f))
    throw config_error("volume has no sample interval; cannot map " +
                       detail::fmt_double(ms) + " ms to a slice index");
  return static_cast<int>(std::lround(ms / v.sample_interval_ms));
}

// Writes one PGM per index into dir, named <axis>_<index>.pgm. The volume is
// normalized once so all slices share one gray scale.
inline std::vector<std::string> export_slices(const Volume3D& v, Axis axis,
                                              std::span<const int> indices,
                                              const std::string& dir) {
  const Volume3D norm = minmax_normalize(v);
  std::vector<std::string> files;
  for (int idx : indices) {
    if (idx < 0 || idx >= v.dims.along(axis))
      throw config_error("slice index " + std::to_string(idx) +
                         " out of range for axis " +
                         std::string(axis_name(axis)) + " of " + v.dims.str());
    std::filesystem::path p(dir.empty() ? "." : dir);
    p /= std::string(axis_name(axis)) + "_" + std::to_string(idx) + ".pgm";
    write_pgm(extract_slice(norm, axis, idx), p.string());
    files.push_back(p.string());
  }
  return files;
}

struct StageTime {
  std::string name;
  double seconds = 0.0;
};

struct RunReport {
  Dims dims;
  std::vector<StageTime> stages;
  FusionWeights weights;
  bool adapted = false;
  bool segy_input = false;
  SegyLoadReport segy;
  bool has_detection = false;
  DetectionReport detection;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  std::string config_echo;
};

namespace detail {

class StageClock {
 public:
  explicit StageClock(RunReport& rep) : rep_(rep) {}

  template <typename Fn>
  auto run(const std::string& name, Fn&& fn) -> decltype(fn()) {
    current_ = name;
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(name, start);
    } else {
      auto result = fn();
      record(name, start);
      return result;
    }
  }

  const std::string& current() const { return current_; }

 private:
  void record(const std::string& name,
              std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - start;
    rep_.stages.push_back({name, dt.count()});
  }

  RunReport& rep_;
  std::string current_ = "setup";
};

inline bool file_is_svol(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  return in.gcount() == 4 && std::memcmp(magic, "SVOL", 4) == 0;
}

}  // namespace detail

// The whole chain: load, tile, spectral energies, directional
// center-surround, fusion, export. Any failure removes files written so far
// and resurfaces config/parse errors unchanged; everything else becomes a
// stage_error naming the stage it died in.
inline std::pair<Volume3D, RunReport> run_saliency(const PipelineConfig& cfg) {
  RunReport rep;
  rep.config_echo = serialize_config(cfg);
  detail::StageClock clock(rep);

  auto cleanup = [&rep]() {
    for (const std::string& f : rep.outputs) {
      std::error_code ec;
      std::filesystem::remove(f, ec);
    }
  };

  try {
    if (cfg.input.empty()) throw config_error("no input path configured");
    if (cfg.output.empty()) throw config_error("no output path configured");

    Volume3D v = clock.run("load", [&] {
      if (detail::file_is_svol(cfg.input)) {
        SvolLoad l = load_svol_checked(cfg.input);
        if (l.zeroed_nonfinite)
          rep.warnings.push_back(std::to_string(l.zeroed_nonfinite) +
                                 " non-finite samples zeroed while loading " +
                                 cfg.input);
        return std::move(l.volume);
      }
      SegyLoadResult r = load_segy(cfg.input, cfg.segy);
      rep.segy_input = true;
      rep.segy = r.report;
      if (r.report.zeroed_samples)
        rep.warnings.push_back(std::to_string(r.report.zeroed_samples) +
                               " non-finite or absurd samples zeroed while "
                               "loading " + cfg.input);
      return std::move(r.volume);
    });
    rep.dims = v.dims;

    const TileGrid plan = clock.run("tile", [&] {
      return tile_plan(v.dims, cfg.tile_n, cfg.tile_stride);
    });

    const EnergyVolumes energies = clock.run("spectral", [&] {
      return energy_volumes(v, plan, cfg.taper, cfg.threads);
    });

    const SaliencyMaps maps = clock.run("dcs", [&] {
      auto cfg_for = [&](int axis_idx) {
        DcsConfig c;
        if (!cfg.dcs_template.empty())
          c.window = load_window(cfg.dcs_template);
        else
          c.window = make_window(cfg.dcs_orientation[axis_idx], cfg.dcs_radius,
                                 cfg.dcs_sigma);
        c.radius = cfg.dcs_radius;
        c.sigma = cfg.dcs_sigma;
        c.weighting = cfg.dcs_weighting;
        return c;
      };
      return dcs_all(energies, cfg_for(0), cfg_for(1), cfg_for(2),
                     cfg.threads);
    });

    Volume3D labeled;  // keeps a labeled desired map alive through fusion
    Volume3D s = clock.run("fusion", [&]() -> Volume3D {
      switch (cfg.fusion_mode) {
        case FusionMode::Equal:
          rep.weights = FusionWeights::equal();
          return combine(maps.s_t, maps.s_x, maps.s_y, rep.weights,
                         cfg.threads);
        case FusionMode::Manual:
          rep.weights = FusionWeights::manual(cfg.manual_weights[0],
                                              cfg.manual_weights[1],
                                              cfg.manual_weights[2]);
          return combine(maps.s_t, maps.s_x, maps.s_y, rep.weights,
                         cfg.threads);
        case FusionMode::Adapt: {
          DesiredMap desired;
          desired.section_stride = cfg.readapt_every;
          if (cfg.desired.rfind("axis:", 0) == 0) {
            desired.source = DesiredMap::Source::SelectAxis;
            desired.axis = axis_from_name(cfg.desired.substr(5));
          } else {
            labeled = load_svol(cfg.desired);
            desired.source = DesiredMap::Source::Labeled;
            desired.labeled = &labeled;
          }
          auto [fused, weights] =
              fuse_adaptive(maps, desired, cfg.trainer, cfg.threads);
          rep.weights = std::move(weights);
          rep.adapted = true;
          return std::move(fused);
        }
      }
      throw config_error("unreachable fusion mode");
    });
    if (rep.weights.any_negative())
      rep.warnings.push_back("adapted fusion weights contain negative values");

    clock.run("export", [&] {
      save_svol(s, cfg.output, "saliency of " + cfg.input);
      rep.outputs.push_back(cfg.output);
      rep.outputs.push_back(sidecar_path(cfg.output));

      const std::filesystem::path out_base(cfg.output);
      auto side_volume = [&](const Volume3D& m, const char* tag) {
        std::filesystem::path p = out_base;
        p.replace_extension();
        p += std::string("_") + tag + ".svol";
        save_svol(m, p.string(), std::string(tag) + " of " + cfg.input);
        rep.outputs.push_back(p.string());
        rep.outputs.push_back(sidecar_path(p.string()));
      };
      if (cfg.save_energies) {
        side_volume(energies.e_t, "Et");
        side_volume(energies.e_x, "Ex");
        side_volume(energies.e_y, "Ey");
      }
      if (cfg.save_maps) {
        side_volume(maps.s_t, "St");
        side_volume(maps.s_x, "Sx");
        side_volume(maps.s_y, "Sy");
      }

      if (!cfg.slice_indices.empty() || !cfg.slice_times_ms.empty()) {
        std::vector<int> indices = cfg.slice_indices;
        for (double ms : cfg.slice_times_ms)
          indices.push_back(time_to_slice_index(s, ms));
        const std::string dir =
            cfg.slice_dir.empty()
                ? out_base.parent_path().string()
                : cfg.slice_dir;
        for (const std::string& f :
             export_slices(s, cfg.slice_axis, indices, dir))
          rep.outputs.push_back(f);
      }

      if (!cfg.mse_out.empty() && rep.adapted) {
        std::ofstream csv(cfg.mse_out, std::ios::trunc);
        if (!csv) throw config_error("cannot open " + cfg.mse_out);
        write_mse_csv(csv, rep.weights.history);
        rep.outputs.push_back(cfg.mse_out);
      }

      if (!cfg.mask.empty()) {
        const Volume3D mask = load_svol(cfg.mask);
        if (mask.dims != s.dims)
          throw config_error("mask dims " + mask.dims.str() +
                             " do not match volume dims " + s.dims.str());
        rep.detection = auc(s, mask);
        rep.has_detection = true;
      }
    });

    return {std::move(s), std::move(rep)};
  } catch (const config_error&) {
    cleanup();
    throw;
  } catch (const parse_error&) {
    cleanup();
    throw;
  } catch (const stage_error&) {
    cleanup();
    throw;
  } catch (const std::exception& e) {
    cleanup();
    throw stage_error(clock.current(), e.what());
  }
}

}  // namespace seisal
