// Command-line front end: convert, synth, saliency, fuse, export, info.
// Exit codes: 0 ok, 2 config error, 3 parse error, 4 numeric/stage error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seisal/seisal.hpp"

namespace {

using nlohmann::json;

void emit_report(const json& j, const std::string& report_path) {
  if (report_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(report_path, std::ios::trunc);
    if (!out)
      throw seisal::config_error("cannot open report file " + report_path);
    out << j.dump(2) << "\n";
  }
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

json segy_report_json(const seisal::SegyLoadReport& r) {
  return json{{"traces", r.trace_count},
              {"inline_range", {r.inline_min, r.inline_max}},
              {"crossline_range", {r.crossline_min, r.crossline_max}},
              {"samples_per_trace", r.samples_per_trace},
              {"format_code", r.data_format_code},
              {"sample_interval_ms", r.sample_interval_ms},
              {"zeroed_samples", r.zeroed_samples},
              {"filled_traces", r.filled_traces}};
}

json detection_json(const seisal::DetectionReport& d) {
  return json{{"auc", d.auc},
              {"mean_in", d.mean_in},
              {"mean_out", d.mean_out},
              {"contrast_ratio", finite_or_string(d.contrast_ratio)},
              {"in_count", d.in_count},
              {"out_count", d.out_count}};
}

json config_json(const std::string& serialized) {
  json j = json::object();
  std::istringstream in(serialized);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos)
      j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

struct WeightsSpec {
  seisal::FusionMode mode = seisal::FusionMode::Equal;
  seisal::Vec3 manual{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};

WeightsSpec parse_weights_spec(const std::string& s) {
  WeightsSpec w;
  if (s == "equal") {
    w.mode = seisal::FusionMode::Equal;
  } else if (s == "adapt") {
    w.mode = seisal::FusionMode::Adapt;
  } else if (s.rfind("manual:", 0) == 0) {
    w.mode = seisal::FusionMode::Manual;
    const std::string list = s.substr(7);
    double a, b, c;
    char sep1, sep2;
    std::istringstream ss(list);
    if (!(ss >> a >> sep1 >> b >> sep2 >> c) || sep1 != ',' || sep2 != ',' ||
        !(ss >> std::ws).eof())
      throw seisal::config_error("bad manual weights '" + list +
                                 "', expected Wt,Wx,Wy");
    w.manual = {a, b, c};
  } else {
    throw seisal::config_error("bad --weights value '" + s +
                               "', expected equal, manual:Wt,Wx,Wy or adapt");
  }
  return w;
}

int cmd_convert(const std::string& in_path, const std::string& out_path,
                const seisal::SegyOptions& opt, const std::string& report) {
  seisal::SegyLoadResult res = seisal::load_segy(in_path, opt);
  seisal::save_svol(res.volume, out_path, "converted from " + in_path);
  json j = segy_report_json(res.report);
  j["input"] = in_path;
  j["output"] = out_path;
  j["dims"] = {{"t", res.volume.dims.t},
               {"x", res.volume.dims.x},
               {"y", res.volume.dims.y}};
  emit_report(j, report);
  return 0;
}

int cmd_saliency(const seisal::PipelineConfig& cfg, const std::string& report) {
  auto [s, rep] = seisal::run_saliency(cfg);
  json j;
  j["input"] = cfg.input;
  j["output"] = cfg.output;
  j["dims"] = {{"t", rep.dims.t}, {"x", rep.dims.x}, {"y", rep.dims.y}};
  json stages = json::array();
  for (const auto& st : rep.stages)
    stages.push_back({{"name", st.name}, {"seconds", st.seconds}});
  j["stages"] = stages;
  j["weights"] = {{"wt", rep.weights.w[0]},
                  {"wx", rep.weights.w[1]},
                  {"wy", rep.weights.w[2]},
                  {"trainer", seisal::trainer_name(rep.weights.trainer)},
                  {"adapted", rep.adapted}};
  if (rep.adapted && !rep.weights.history.empty())
    j["mse"] = {{"windows", rep.weights.history.size()},
                {"final", rep.weights.history.back().mse}};
  if (rep.segy_input) j["segy"] = segy_report_json(rep.segy);
  if (rep.has_detection) j["detection"] = detection_json(rep.detection);
  j["outputs"] = rep.outputs;
  j["warnings"] = rep.warnings;
  j["config"] = config_json(rep.config_echo);
  emit_report(j, report);
  return 0;
}

int cmd_info(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw seisal::parse_error("cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  probe.read(magic, 4);
  probe.close();

  if (std::string(magic, 4) == "SVOL") {
    const seisal::SvolLoad l = seisal::load_svol_checked(path);
    const seisal::Volume3D& v = l.volume;
    float lo = v.data.empty() ? 0.0f : v.data[0], hi = lo;
    for (float f : v.data) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
    std::cout << path << ": seisvol v1\n"
              << "  dims (t,x,y): " << v.dims.str() << "\n"
              << "  sample interval: " << v.sample_interval_ms << " ms\n"
              << "  value range: [" << lo << ", " << hi << "]\n";
    if (l.zeroed_nonfinite)
      std::cout << "  zeroed non-finite samples: " << l.zeroed_nonfinite
                << "\n";
    const std::string side = seisal::sidecar_path(path);
    std::ifstream sc(side);
    if (sc) {
      std::cout << "  sidecar " << side << ":\n";
      std::string line;
      while (std::getline(sc, line)) std::cout << "    " << line << "\n";
    }
    return 0;
  }

  seisal::FileSource src(path);
  auto [text, bin] = seisal::parse_headers(src);
  const seisal::SegyGeometry geo = seisal::scan_geometry(src, bin);
  std::cout << path << ": SEG-Y\n"
            << "  textual header: 3200 bytes (EBCDIC, preserved verbatim)\n"
            << "  data format code: " << bin.data_format_code
            << (bin.data_format_code == 1 ? " (IBM float)" : " (IEEE float)")
            << "\n"
            << "  samples per trace: " << geo.samples << "\n"
            << "  sample interval: " << bin.sample_interval_us / 1000.0
            << " ms\n"
            << "  traces: " << geo.trace_count << "\n"
            << "  inlines: " << geo.inlines.size() << " ["
            << geo.inlines.front() << ".." << geo.inlines.back() << "]\n"
            << "  crosslines: " << geo.crosslines.size() << " ["
            << geo.crosslines.front() << ".." << geo.crosslines.back()
            << "]\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"saliency mapping for 3D seismic volumes"};
  app.require_subcommand(1);

  // convert
  auto* convert = app.add_subcommand("convert", "SEG-Y to seisvol");
  std::string cv_in, cv_out, cv_report;
  seisal::SegyOptions cv_opt;
  convert->add_option("input", cv_in, "SEG-Y file")->required();
  convert->add_option("output", cv_out, "seisvol file to write")->required();
  convert->add_option("--inline-bytes", cv_opt.inline_byte,
                      "1-based trace-header byte of the inline number");
  convert->add_option("--xline-bytes", cv_opt.crossline_byte,
                      "1-based trace-header byte of the crossline number");
  convert->add_flag("--fill-missing", cv_opt.fill_missing,
                    "zero-fill missing traces instead of failing");
  convert->add_option("--report", cv_report, "write the JSON report here");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic volume");
  std::string sy_scenario = "layered+fault", sy_dims = "64,64,64";
  std::string sy_out, sy_mask;
  seisal::SyntheticSpec sy_spec;
  synth->add_option("--scenario", sy_scenario,
                    "layered, layered+fault, layered+dome or chaotic-patch");
  synth->add_option("--dims", sy_dims, "T,X,Y extents");
  synth->add_option("--dip", sy_spec.dip_deg, "fault dip in degrees");
  synth->add_option("--throw", sy_spec.throw_voxels, "fault throw in voxels");
  synth->add_option("--noise", sy_spec.noise_sigma, "additive noise sigma");
  synth->add_option("--seed", sy_spec.seed, "generator seed");
  synth->add_option("--dome-radius", sy_spec.dome_radius, "dome radius");
  synth->add_option("--out", sy_out, "volume output path")->required();
  synth->add_option("--mask", sy_mask, "ground-truth mask output path");

  // saliency
  auto* sal = app.add_subcommand("saliency", "run the full pipeline");
  std::string sa_config, sa_report, sa_weights, sa_taper, sa_weighting;
  std::string sa_orientation, sa_trainer, sa_slice_axis, sa_threads;
  seisal::PipelineConfig base;
  std::vector<std::string> sa_sets;
  std::vector<int> sa_slice_indices;
  std::vector<double> sa_slice_times;
  std::string sa_input, sa_output, sa_mask, sa_template, sa_desired;
  std::string sa_slice_dir, sa_mse_out;
  int sa_n = 0, sa_stride = 0, sa_radius = 0, sa_readapt = -1;
  double sa_sigma = 0.0;
  bool sa_save_maps = false, sa_save_energies = false, sa_fill = false;
  int sa_inline_b = 0, sa_xline_b = 0;
  sal->add_option("--config", sa_config, "key=value config file");
  sal->add_option("--input,-i", sa_input, "input volume (.svol or SEG-Y)");
  sal->add_option("--output,-o", sa_output, "saliency volume to write");
  sal->add_option("--mask", sa_mask, "ground-truth mask for detection metrics");
  sal->add_option("--n", sa_n, "local cube side");
  sal->add_option("--stride", sa_stride, "tile stride");
  sal->add_option("--taper", sa_taper, "none or hann");
  sal->add_option("--orientation", sa_orientation,
                  "window orientation for all three maps");
  sal->add_option("--radius", sa_radius, "window radius");
  sal->add_option("--sigma", sa_sigma, "window sigma");
  sal->add_option("--weighting", sa_weighting, "inner or outer");
  sal->add_option("--template", sa_template, "window template file");
  sal->add_option("--weights", sa_weights,
                  "equal, manual:Wt,Wx,Wy or adapt");
  sal->add_option("--trainer", sa_trainer, "lms, nlms or rls");
  sal->add_option("--desired", sa_desired, "axis:t|x|y or labeled .svol");
  sal->add_option("--readapt-every", sa_readapt,
                  "retrain every N inline sections");
  sal->add_option("--mse-out", sa_mse_out, "write the MSE curve CSV here");
  sal->add_option("--slice-axis", sa_slice_axis, "t, x or y");
  sal->add_option("--slice-index", sa_slice_indices, "slice index to export");
  sal->add_option("--slice-time", sa_slice_times,
                  "slice time in ms to export (t axis)");
  sal->add_option("--slice-dir", sa_slice_dir, "directory for PGM slices");
  sal->add_flag("--save-maps", sa_save_maps, "persist S_t, S_x, S_y");
  sal->add_flag("--save-energies", sa_save_energies, "persist E_t, E_x, E_y");
  sal->add_option("--inline-bytes", sa_inline_b, "SEG-Y inline byte");
  sal->add_option("--xline-bytes", sa_xline_b, "SEG-Y crossline byte");
  sal->add_flag("--fill-missing", sa_fill, "zero-fill missing SEG-Y traces");
  sal->add_option("--threads", sa_threads, "worker count or auto");
  sal->add_option("--set", sa_sets, "raw key=value override (repeatable)");
  sal->add_option("--report", sa_report, "write the JSON report here");

  // fuse
  auto* fuse = app.add_subcommand("fuse", "re-fuse saved directional maps");
  std::string fu_st, fu_sx, fu_sy, fu_out, fu_weights = "equal";
  std::string fu_trainer = "nlms", fu_desired = "axis:t", fu_mse, fu_report;
  int fu_readapt = 0, fu_threads = 1;
  fuse->add_option("--st", fu_st, "S_t map (.svol)")->required();
  fuse->add_option("--sx", fu_sx, "S_x map (.svol)")->required();
  fuse->add_option("--sy", fu_sy, "S_y map (.svol)")->required();
  fuse->add_option("--out", fu_out, "combined map to write")->required();
  fuse->add_option("--weights", fu_weights,
                   "equal, manual:Wt,Wx,Wy or adapt");
  fuse->add_option("--trainer", fu_trainer, "lms, nlms or rls");
  fuse->add_option("--desired", fu_desired, "axis:t|x|y or labeled .svol");
  fuse->add_option("--readapt-every", fu_readapt,
                   "retrain every N inline sections");
  fuse->add_option("--mse-out", fu_mse, "write the MSE curve CSV here");
  fuse->add_option("--threads", fu_threads, "worker count");
  fuse->add_option("--report", fu_report, "write the JSON report here");

  // export
  auto* exp = app.add_subcommand("export", "write PGM slices of a volume");
  std::string ex_in, ex_axis = "t", ex_dir = ".";
  std::vector<int> ex_indices;
  std::vector<double> ex_times;
  exp->add_option("input", ex_in, "volume (.svol)")->required();
  exp->add_option("--axis", ex_axis, "t, x or y");
  exp->add_option("--index", ex_indices, "slice index (repeatable)");
  exp->add_option("--time", ex_times, "slice time in ms (repeatable)");
  exp->add_option("--dir", ex_dir, "output directory");

  // info
  auto* info = app.add_subcommand("info", "describe a volume file");
  std::string in_path;
  info->add_option("file", in_path, ".svol or SEG-Y file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (convert->parsed())
      return cmd_convert(cv_in, cv_out, cv_opt, cv_report);

    if (synth->parsed()) {
      sy_spec.scenario = seisal::scenario_from_name(sy_scenario);
      int t = 0, x = 0, y = 0;
      char c1 = 0, c2 = 0;
      std::istringstream ds(sy_dims);
      if (!(ds >> t >> c1 >> x >> c2 >> y) || c1 != ',' || c2 != ',' ||
          !(ds >> std::ws).eof())
        throw seisal::config_error("bad --dims '" + sy_dims +
                                   "', expected T,X,Y");
      sy_spec.dims = {t, x, y};
      try {
        auto [vol, mask] = seisal::generate(sy_spec);
        seisal::save_svol(vol, sy_out, "synthetic " + sy_scenario);
        std::uint64_t in_mask = 0;
        for (float m : mask.data)
          if (m >= 0.5f) ++in_mask;
        std::cout << "wrote " << sy_out << " (" << vol.dims.str() << ", "
                  << sy_scenario << ")\n";
        if (!sy_mask.empty()) {
          seisal::save_svol(mask, sy_mask,
                            "ground-truth mask for " + sy_scenario);
          std::cout << "wrote " << sy_mask << " (" << in_mask
                    << " in-mask voxels)\n";
        }
      } catch (const std::invalid_argument& e) {
        throw seisal::config_error(e.what());
      }
      return 0;
    }

    if (sal->parsed()) {
      seisal::PipelineConfig cfg;
      if (!sa_config.empty()) cfg = seisal::parse_config_file(sa_config);
      auto set = [&](const char* key, const std::string& v) {
        seisal::apply_config_kv(cfg, key, v);
      };
      if (sal->count("--input")) set("input", sa_input);
      if (sal->count("--output")) set("output", sa_output);
      if (sal->count("--mask")) set("mask", sa_mask);
      if (sal->count("--n")) set("tiling.n", std::to_string(sa_n));
      if (sal->count("--stride")) set("tiling.stride", std::to_string(sa_stride));
      if (sal->count("--taper")) set("tiling.taper", sa_taper);
      if (sal->count("--orientation")) {
        set("dcs.orientation_t", sa_orientation);
        set("dcs.orientation_x", sa_orientation);
        set("dcs.orientation_y", sa_orientation);
      }
      if (sal->count("--radius")) set("dcs.radius", std::to_string(sa_radius));
      if (sal->count("--sigma"))
        set("dcs.sigma", seisal::detail::fmt_double(sa_sigma));
      if (sal->count("--weighting")) set("dcs.weighting", sa_weighting);
      if (sal->count("--template")) set("dcs.template", sa_template);
      if (sal->count("--weights")) {
        const WeightsSpec w = parse_weights_spec(sa_weights);
        cfg.fusion_mode = w.mode;
        if (w.mode == seisal::FusionMode::Manual) cfg.manual_weights = w.manual;
      }
      if (sal->count("--trainer")) set("fusion.trainer", sa_trainer);
      if (sal->count("--desired")) set("fusion.desired", sa_desired);
      if (sal->count("--readapt-every"))
        set("fusion.readapt_every", std::to_string(sa_readapt));
      if (sal->count("--mse-out")) set("fusion.mse_out", sa_mse_out);
      if (sal->count("--slice-axis")) set("export.slice_axis", sa_slice_axis);
      if (sal->count("--slice-index")) {
        std::string list;
        for (std::size_t i = 0; i < sa_slice_indices.size(); ++i)
          list += (i ? "," : "") + std::to_string(sa_slice_indices[i]);
        set("export.slice_indices", list);
      }
      if (sal->count("--slice-time")) {
        std::string list;
        for (std::size_t i = 0; i < sa_slice_times.size(); ++i)
          list += (i ? "," : "") + seisal::detail::fmt_double(sa_slice_times[i]);
        set("export.slice_times_ms", list);
      }
      if (sal->count("--slice-dir")) set("export.dir", sa_slice_dir);
      if (sa_save_maps) set("export.save_maps", "true");
      if (sa_save_energies) set("export.save_energies", "true");
      if (sal->count("--inline-bytes"))
        set("segy.inline_byte", std::to_string(sa_inline_b));
      if (sal->count("--xline-bytes"))
        set("segy.crossline_byte", std::to_string(sa_xline_b));
      if (sa_fill) set("segy.fill_missing", "true");
      if (sal->count("--threads")) set("threads", sa_threads);
      for (const std::string& kv : sa_sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw seisal::config_error("--set expects key=value, got '" + kv +
                                     "'");
        set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
      }
      return cmd_saliency(cfg, sa_report);
    }

    if (fuse->parsed()) {
      seisal::SaliencyMaps maps;
      maps.s_t = seisal::load_svol(fu_st);
      maps.s_x = seisal::load_svol(fu_sx);
      maps.s_y = seisal::load_svol(fu_sy);
      const WeightsSpec w = parse_weights_spec(fu_weights);
      seisal::FusionWeights weights;
      seisal::Volume3D out;
      seisal::Volume3D labeled;
      if (w.mode == seisal::FusionMode::Adapt) {
        seisal::DesiredMap desired;
        desired.section_stride = fu_readapt;
        if (fu_desired.rfind("axis:", 0) == 0) {
          desired.axis = seisal::axis_from_name(fu_desired.substr(5));
        } else {
          labeled = seisal::load_svol(fu_desired);
          desired.source = seisal::DesiredMap::Source::Labeled;
          desired.labeled = &labeled;
        }
        seisal::TrainerConfig trainer;
        trainer.kind = seisal::trainer_from_name(fu_trainer);
        auto [fused, fw] =
            seisal::fuse_adaptive(maps, desired, trainer, fu_threads);
        out = std::move(fused);
        weights = std::move(fw);
      } else {
        weights = w.mode == seisal::FusionMode::Equal
                      ? seisal::FusionWeights::equal()
                      : seisal::FusionWeights::manual(w.manual[0], w.manual[1],
                                                      w.manual[2]);
        out = seisal::combine(maps.s_t, maps.s_x, maps.s_y, weights,
                              fu_threads);
      }
      seisal::save_svol(out, fu_out, "fused from " + fu_st + ", " + fu_sx +
                                         ", " + fu_sy);
      if (!fu_mse.empty()) {
        std::ofstream csv(fu_mse, std::ios::trunc);
        if (!csv) throw seisal::config_error("cannot open " + fu_mse);
        seisal::write_mse_csv(csv, weights.history);
      }
      json j;
      j["output"] = fu_out;
      j["weights"] = {{"wt", weights.w[0]},
                      {"wx", weights.w[1]},
                      {"wy", weights.w[2]},
                      {"trainer", seisal::trainer_name(weights.trainer)}};
      if (!weights.history.empty())
        j["mse"] = {{"windows", weights.history.size()},
                    {"final", weights.history.back().mse}};
      emit_report(j, fu_report);
      return 0;
    }

    if (exp->parsed()) {
      const seisal::Volume3D v = seisal::load_svol(ex_in);
      const seisal::Axis axis = seisal::axis_from_name(ex_axis);
      std::vector<int> indices = ex_indices;
      for (double ms : ex_times)
        indices.push_back(seisal::time_to_slice_index(v, ms));
      if (indices.empty())
        throw seisal::config_error("nothing to export: pass --index or --time");
      for (const std::string& f :
           seisal::export_slices(v, axis, indices, ex_dir))
        std::cout << "wrote " << f << "\n";
      return 0;
    }

    if (info->parsed()) return cmd_info(in_path);
  } catch (const seisal::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const seisal::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const seisal::stage_error& e) {
    std::cerr << "stage error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
