#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qoct/constants.hpp"
#include "qoct/errors.hpp"
#include "qoct/extract.hpp"
#include "qoct/interferometer.hpp"
#include "qoct/io.hpp"
#include "qoct/spdc.hpp"

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SourceOpts {
  std::string kind = "bbo";
  double pump_um = 0.4;
  double crystal_mm = 1.5;
  double center_um = 0.8;
  double fwhm_thz = 5.0;
  std::size_t points = 4096;
  double span_radps = 0.0;
};

void add_source_options(CLI::App* cmd, SourceOpts& o) {
  cmd->add_option("--source", o.kind, "spectral model: bbo (type-II crystal) or gaussian")
      ->check(CLI::IsMember({"bbo", "gaussian"}))
      ->capture_default_str();
  cmd->add_option("--pump-um", o.pump_um, "pump vacuum wavelength in um (bbo)")
      ->capture_default_str();
  cmd->add_option("--crystal-mm", o.crystal_mm, "crystal length in mm (bbo)")
      ->capture_default_str();
  cmd->add_option("--center-um", o.center_um, "center wavelength in um (gaussian)")
      ->capture_default_str();
  cmd->add_option("--gauss-fwhm-thz", o.fwhm_thz, "spectral FWHM in THz (gaussian)")
      ->capture_default_str();
  cmd->add_option("--freq-points", o.points, "spectral samples (rounded up to odd)")
      ->capture_default_str();
  cmd->add_option("--span-radps", o.span_radps,
                  "symmetric half-span override in rad/s (0 = automatic)")
      ->capture_default_str();
}

qoct::TwinPhotonSource build_source(const SourceOpts& o) {
  if (o.kind == "gaussian") {
    const double fwhm_radps = 2.0 * qoct::kPi * o.fwhm_thz * 1e12;
    return qoct::gaussian_source(o.center_um * 1e-6, fwhm_radps, o.points, o.span_radps);
  }
  return qoct::bbo_type2_source(o.pump_um * 1e-6, o.crystal_mm * 1e-3, o.points, o.span_radps);
}

struct TargetOpts {
  std::string preset;
  std::string sample_path;
  double start_um = kNaN;
  double stop_um = kNaN;
  std::size_t points = 0;
};

void add_target_options(CLI::App* cmd, TargetOpts& o, bool with_window) {
  cmd->add_option("--preset", o.preset, "built-in sample (see 'presets')");
  cmd->add_option("--sample", o.sample_path, "sample description JSON file");
  if (with_window) {
    cmd->add_option("--start-um", o.start_um, "first depth point in um");
    cmd->add_option("--stop-um", o.stop_um, "last depth point in um");
    cmd->add_option("--points", o.points, "depth sample count");
  }
}

// resolves preset/sample exclusivity; fills window defaults from the preset
qoct::LayeredSample resolve_target(TargetOpts& o) {
  const bool has_preset = !o.preset.empty();
  const bool has_file = !o.sample_path.empty();
  if (has_preset == has_file) {
    throw qoct::ConfigError("give exactly one of --preset or --sample");
  }
  if (has_file) {
    return qoct::sample_from_json_file(o.sample_path);
  }
  const qoct::PresetBundle bundle = qoct::find_preset(o.preset);
  if (std::isnan(o.start_um)) {
    o.start_um = bundle.depth_start * 1e6;
  }
  if (std::isnan(o.stop_um)) {
    o.stop_um = bundle.depth_stop * 1e6;
  }
  if (o.points == 0) {
    o.points = bundle.depth_points;
  }
  return bundle.sample;
}

void require_window(const TargetOpts& o) {
  if (std::isnan(o.start_um) || std::isnan(o.stop_um) || o.points == 0) {
    throw qoct::ConfigError("--start-um, --stop-um and --points are required with --sample");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw qoct::ConfigError("cannot open '" + path + "' for writing");
  }
  out << text;
  if (!out) {
    throw qoct::ConfigError("failed while writing '" + path + "'");
  }
}

// parabola through a grid minimum and its neighbors; returns the refined value
double refined_extremum(const std::vector<double>& y, std::size_t j) {
  if (j == 0 || j + 1 >= y.size()) {
    return y[j];
  }
  const double ym = y[j - 1];
  const double y0 = y[j];
  const double yp = y[j + 1];
  const double denom = ym - 2.0 * y0 + yp;
  if (std::abs(denom) < 1e-300) {
    return y0;
  }
  const double off = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
  return y0 - 0.25 * (ym - yp) * off;
}

// deepest arm rate near a combined-trace dip position
double arm_depth_near(const qoct::Interferogram& ig, const std::vector<double>& trace,
                      double position) {
  std::size_t center = 0;
  double best = std::numeric_limits<double>::max();
  for (std::size_t j = 0; j < ig.depth_m.size(); ++j) {
    const double d = std::abs(ig.depth_m[j] - position);
    if (d < best) {
      best = d;
      center = j;
    }
  }
  const std::size_t lo = center >= 3 ? center - 3 : 0;
  const std::size_t hi = std::min(center + 3, ig.depth_m.size() - 1);
  std::size_t jmin = lo;
  for (std::size_t j = lo; j <= hi; ++j) {
    if (trace[j] < trace[jmin]) {
      jmin = j;
    }
  }
  return 1.0 - refined_extremum(trace, jmin);
}

int run(int argc, char** argv) {
  CLI::App app{"simulator and inverse analyzer for polarization-sensitive quantum OCT"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "scan a sample and write the coincidence traces");
  auto sim_src = std::make_shared<SourceOpts>();
  auto sim_tgt = std::make_shared<TargetOpts>();
  auto sim_out = std::make_shared<std::string>();
  auto sim_sidecar = std::make_shared<std::string>();
  auto sim_reflect = std::make_shared<double>(0.5);
  auto sim_serial = std::make_shared<bool>(false);
  add_target_options(sim, *sim_tgt, true);
  add_source_options(sim, *sim_src);
  sim->add_option("--bs-reflect", *sim_reflect, "beam splitter power reflectance")
      ->capture_default_str();
  sim->add_option("--out", *sim_out, "output CSV path")->required();
  sim->add_option("--sidecar", *sim_sidecar, "also write scan metadata JSON here");
  sim->add_flag("--serial", *sim_serial, "disable the parallel scan loop");
  sim->callback([=]() {
    qoct::LayeredSample sample = resolve_target(*sim_tgt);
    require_window(*sim_tgt);
    if (sim_tgt->points < 2) {
      throw qoct::ConfigError("--points must be at least 2");
    }
    const qoct::TwinPhotonSource source = build_source(*sim_src);
    const qoct::Engine engine(sample, source);
    const qoct::BeamSplitter bs{*sim_reflect};
    const qoct::Interferogram ig =
        qoct::scan(engine, bs, sim_tgt->start_um * 1e-6, sim_tgt->stop_um * 1e-6,
                   sim_tgt->points, !*sim_serial);
    qoct::write_interferogram_csv(ig, *sim_out);
    if (!sim_sidecar->empty()) {
      write_text_file(*sim_sidecar, qoct::sidecar_json(ig, sample, source));
    }
    std::cout << "wrote " << *sim_out << " (" << ig.depth_m.size() << " points)\n";
    if (ig.empty_sample) {
      std::cerr << "note: sample reflects nothing; traces are all zero\n";
    }
    if (ig.clip_count > 0) {
      std::cerr << "note: " << ig.clip_count << " rate values clipped at zero\n";
    }
  });

  // extract
  auto* ext = app.add_subcommand("extract", "locate interfaces in a scan CSV");
  auto ext_csv = std::make_shared<std::string>();
  auto ext_sidecar = std::make_shared<std::string>();
  auto ext_out = std::make_shared<std::string>();
  auto ext_prominence = std::make_shared<double>(0.05);
  ext->add_option("--csv", *ext_csv, "scan CSV produced by simulate")->required();
  ext->add_option("--sidecar", *ext_sidecar, "scan metadata JSON (supplies lambda0)");
  ext->add_option("--prominence", *ext_prominence, "feature depth threshold")
      ->capture_default_str();
  ext->add_option("--out", *ext_out, "report JSON path (default: stdout)");
  ext->callback([=]() {
    const qoct::Interferogram ig = qoct::read_interferogram_csv(*ext_csv);
    double l0h = 0.0;
    double l0v = 0.0;
    if (!ext_sidecar->empty()) {
      std::ifstream in(*ext_sidecar, std::ios::binary);
      if (!in) {
        throw qoct::ConfigError("cannot open sidecar '" + *ext_sidecar + "'");
      }
      try {
        nlohmann::json doc = nlohmann::json::parse(in);
        l0h = doc.at("lambda0").at("h").get<double>();
        l0v = doc.at("lambda0").at("v").get<double>();
      } catch (const nlohmann::json::exception& e) {
        throw qoct::ConfigError(std::string("sidecar JSON: ") + e.what());
      }
    }
    const std::vector<qoct::DipFeature> features = qoct::find_dips(ig, *ext_prominence);
    qoct::ExtractionReport report = qoct::layer_report(features, l0h, l0v);

    // the arm-rate ratio is read at the rearmost dip, the echo that has
    // traversed every layer above it
    const qoct::DipFeature* last = nullptr;
    for (const qoct::DipFeature& f : features) {
      if (f.kind == qoct::FeatureKind::InterfaceDip &&
          (last == nullptr || f.position > last->position)) {
        last = &f;
      }
    }
    if (last != nullptr && ig.depth_m.size() >= 2) {
      const double dh = arm_depth_near(ig, ig.r_h, last->position);
      const double dv = arm_depth_near(ig, ig.r_v, last->position);
      try {
        report.delta_ratio = qoct::delta_from_ratio(dv, dh);
        report.delta_preimages = qoct::delta_branches(report.delta_ratio);
      } catch (const qoct::DegenerateError&) {
        // both arm dips vanish at this feature; leave the ratio unset
      }
    }

    const std::string json = qoct::extraction_json(report);
    if (ext_out->empty()) {
      std::cout << json;
    } else {
      write_text_file(*ext_out, json);
      std::cout << "wrote " << *ext_out << "\n";
    }
  });

  // null
  auto* nul = app.add_subcommand("null",
                                 "find the reference-arm angles nulling the echo at one delay");
  auto nul_src = std::make_shared<SourceOpts>();
  auto nul_tgt = std::make_shared<TargetOpts>();
  auto nul_at = std::make_shared<double>(0.0);
  auto nul_step = std::make_shared<double>(1.0);
  auto nul_reflect = std::make_shared<double>(0.5);
  auto nul_out = std::make_shared<std::string>();
  add_target_options(nul, *nul_tgt, false);
  add_source_options(nul, *nul_src);
  nul->add_option("--at-um", *nul_at, "dip depth coordinate in um")->required();
  nul->add_option("--coarse-step-deg", *nul_step, "coarse search step in degrees")
      ->capture_default_str();
  nul->add_option("--bs-reflect", *nul_reflect, "beam splitter power reflectance")
      ->capture_default_str();
  nul->add_option("--out", *nul_out, "report JSON path (default: stdout)");
  nul->callback([=]() {
    const qoct::LayeredSample sample = resolve_target(*nul_tgt);
    const qoct::TwinPhotonSource source = build_source(*nul_src);
    const qoct::Engine engine(sample, source);
    const qoct::BeamSplitter bs{*nul_reflect};
    const double tau_star = 2.0 * *nul_at * 1e-6 / qoct::kSpeedOfLight;
    const qoct::NullResult null =
        qoct::null_search(engine, bs, tau_star, *nul_step * qoct::kPi / 180.0);
    const double delta_est = qoct::retardance_from_null(null.theta, null.phi);

    double delta_ratio = kNaN;
    try {
      const double l0 = engine.lambda_constant();
      const double rh =
          engine.coincidence_rate(qoct::ReferenceArm::rotator(0.0), bs, tau_star) / l0;
      const double rv =
          engine.coincidence_rate(qoct::ReferenceArm::rotator(0.25 * qoct::kPi), bs, tau_star) /
          l0;
      delta_ratio = qoct::delta_from_ratio(1.0 - rv, 1.0 - rh);
    } catch (const qoct::DegenerateError&) {
      // no dip in either arm at this delay; the ratio stays unset
    }

    const double alpha = qoct::alpha_from_null(null.theta, null.phi, delta_est);
    const std::vector<double> residuals =
        qoct::null_residuals(null.theta, null.phi, delta_est, alpha);
    const std::string json = qoct::null_json(null, delta_est, delta_ratio, alpha, residuals);
    if (nul_out->empty()) {
      std::cout << json;
    } else {
      write_text_file(*nul_out, json);
      std::cout << "wrote " << *nul_out << "\n";
    }
  });

  // presets
  auto* pre = app.add_subcommand("presets", "list built-in samples");
  auto pre_dir = std::make_shared<std::string>();
  pre->add_option("--write", *pre_dir, "also write each preset's sample JSON into this directory");
  pre->callback([=]() {
    for (const qoct::PresetBundle& p : qoct::all_presets()) {
      std::cout << p.name << " (" << p.alias << "): " << p.summary << "; window "
                << p.depth_start * 1e6 << ".." << p.depth_stop * 1e6 << " um, "
                << p.depth_points << " points\n";
    }
    if (!pre_dir->empty()) {
      const std::filesystem::path dir(*pre_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      for (const qoct::PresetBundle& p : qoct::all_presets()) {
        const std::filesystem::path path = dir / (p.name + ".json");
        write_text_file(path.string(), qoct::sample_to_json(p.sample));
        std::cout << "wrote " << path.string() << "\n";
      }
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? qoct::kExitOk : qoct::kExitConfig;
  }
  return qoct::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const qoct::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qoct::kExitConfig;
  } catch (const qoct::PhysicsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qoct::kExitPhysics;
  } catch (const qoct::DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qoct::kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
