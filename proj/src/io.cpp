#include "qoct/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>
#include <utility>

#include "json.hpp"
#include "qoct/constants.hpp"
#include "qoct/errors.hpp"
#include "qoct/materials.hpp"

namespace qoct {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_cell(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", value);
  return buf;
}

// dump() would turn NaN into null anyway; make the intent explicit
ordered_json number_or_null(double value) {
  if (std::isnan(value)) {
    return nullptr;
  }
  return value;
}

double degrees(double radians) { return radians * 180.0 / kPi; }

std::pair<IndexModel, IndexModel> layer_indices_from_json(const ordered_json& node) {
  if (node.is_string()) {
    const std::string name = node.get<std::string>();
    if (name == "quartz") {
      return {quartz_ordinary_constant(), quartz_extraordinary_constant()};
    }
    if (name == "quartz-sellmeier") {
      return {quartz_ordinary_sellmeier(), quartz_extraordinary_sellmeier()};
    }
    if (name == "bbo") {
      return {bbo_ordinary(), bbo_extraordinary()};
    }
    throw ConfigError("unknown material '" + name +
                      "' (known: quartz, quartz-sellmeier, bbo, or {\"n_o\":..,\"n_e\":..})");
  }
  if (node.is_object()) {
    if (!node.contains("n_o") || !node.contains("n_e")) {
      throw ConfigError("custom material needs both n_o and n_e");
    }
    return {IndexModel::constant(node.at("n_o").get<double>()),
            IndexModel::constant(node.at("n_e").get<double>())};
  }
  throw ConfigError("material must be a name or an {\"n_o\":..,\"n_e\":..} object");
}

ordered_json layer_indices_to_json(const Layer& layer) {
  if (layer.n_o.is_constant() && layer.n_e.is_constant()) {
    ordered_json node;
    node["n_o"] = layer.n_o.n_value;
    node["n_e"] = layer.n_e.n_value;
    return node;
  }
  if (layer.n_o.citation == "Ghosh 1999" && layer.n_e.citation == "Ghosh 1999") {
    return "quartz-sellmeier";
  }
  if (layer.n_o.citation == "Kato 1986" && layer.n_e.citation == "Kato 1986") {
    return "bbo";
  }
  throw ConfigError("layer index model has no JSON name");
}

LayeredSample sample_from_doc(const ordered_json& doc) {
  LayeredSample sample;
  try {
    if (!doc.is_object() || !doc.contains("interfaces") || !doc.contains("layers")) {
      throw ConfigError("sample JSON needs 'interfaces' and 'layers' arrays");
    }
    for (const ordered_json& node : doc.at("interfaces")) {
      const ordered_json& r = node.at("r");
      if (!r.is_array() || r.size() != 2) {
        throw ConfigError("interface 'r' must be [re, im]");
      }
      sample.interfaces.push_back(Interface{cplx{r[0].get<double>(), r[1].get<double>()}});
    }
    for (const ordered_json& node : doc.at("layers")) {
      Layer layer;
      layer.thickness = node.at("d_um").get<double>() * 1e-6;
      layer.axis_angle = node.at("alpha_deg").get<double>() * kPi / 180.0;
      std::tie(layer.n_o, layer.n_e) = layer_indices_from_json(node.at("material"));
      if (node.contains("gvd_s2_per_m")) {
        layer.gvd_inject = node.at("gvd_s2_per_m").get<double>();
      }
      sample.layers.push_back(layer);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sample JSON: ") + e.what());
  }
  sample.validate();
  return sample;
}

}  // namespace

void write_interferogram_csv(const Interferogram& ig, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot open '" + path + "' for writing");
  }
  out << "ctau_um,R_H,R_V,R_T\n";
  for (std::size_t j = 0; j < ig.depth_m.size(); ++j) {
    out << format_cell(ig.depth_m[j] * 1e6) << ',' << format_cell(ig.r_h[j]) << ','
        << format_cell(ig.r_v[j]) << ',' << format_cell(ig.r_t[j]) << '\n';
  }
  if (!out) {
    throw ConfigError("failed while writing '" + path + "'");
  }
}

Interferogram read_interferogram_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line) || line != "ctau_um,R_H,R_V,R_T") {
    throw ConfigError("'" + path + "' is not a scan CSV (bad header)");
  }
  Interferogram ig;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) {
      continue;
    }
    std::istringstream cells(line);
    double v[4];
    char sep;
    if (!(cells >> v[0] >> sep >> v[1] >> sep >> v[2] >> sep >> v[3])) {
      throw ConfigError("'" + path + "' row " + std::to_string(row) + ": expected 4 numbers");
    }
    ig.depth_m.push_back(v[0] * 1e-6);
    ig.r_h.push_back(v[1]);
    ig.r_v.push_back(v[2]);
    ig.r_t.push_back(v[3]);
  }
  if (ig.depth_m.empty()) {
    throw ConfigError("'" + path + "' has no data rows");
  }
  return ig;
}

LayeredSample sample_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sample JSON: ") + e.what());
  }
  return sample_from_doc(doc);
}

LayeredSample sample_from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open sample file '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return sample_from_json(text.str());
}

std::string sample_to_json(const LayeredSample& sample) {
  ordered_json doc;
  doc["interfaces"] = ordered_json::array();
  for (const Interface& iface : sample.interfaces) {
    ordered_json node;
    node["r"] = {iface.reflectance.real(), iface.reflectance.imag()};
    doc["interfaces"].push_back(node);
  }
  doc["layers"] = ordered_json::array();
  for (const Layer& layer : sample.layers) {
    ordered_json node;
    node["d_um"] = layer.thickness * 1e6;
    node["alpha_deg"] = degrees(layer.axis_angle);
    node["material"] = layer_indices_to_json(layer);
    if (layer.gvd_inject != 0.0) {
      node["gvd_s2_per_m"] = layer.gvd_inject;
    }
    doc["layers"].push_back(node);
  }
  return doc.dump(2) + "\n";
}

std::string sidecar_json(const Interferogram& ig, const LayeredSample& sample,
                         const TwinPhotonSource& source) {
  ordered_json doc;
  doc["format"] = "qoct-scan";

  ordered_json axis;
  axis["column"] = "ctau_um";
  axis["meaning"] = "single-pass optical depth; an interface behind group optical path n*z dips at n*z";
  axis["arm_delay_s"] = "tau = 2e-6 * ctau_um / c";
  axis["points"] = ig.depth_m.size();
  if (ig.depth_m.size() >= 2) {
    axis["start_um"] = ig.depth_m.front() * 1e6;
    axis["step_um"] = (ig.depth_m[1] - ig.depth_m[0]) * 1e6;
    axis["arm_delay_start_s"] = 2.0 * ig.depth_m.front() / kSpeedOfLight;
    axis["arm_delay_step_s"] = 2.0 * (ig.depth_m[1] - ig.depth_m[0]) / kSpeedOfLight;
  }
  doc["axis"] = axis;

  doc["lambda0"] = {{"h", ig.lambda0_h}, {"v", ig.lambda0_v}};
  doc["traces_normalized_by"] = "lambda0";
  doc["clip_count"] = ig.clip_count;
  doc["empty_sample"] = ig.empty_sample;
  doc["noncommuting_layers"] = !layers_coaligned(sample);

  ordered_json src;
  src["kind"] = source.kind;
  src["omega0_radps"] = source.omega0;
  src["center_um"] = 2.0 * kPi * kSpeedOfLight / source.omega0 * 1e6;
  if (source.kind == "bbo-type2") {
    src["pump_um"] = source.pump_wavelength * 1e6;
    src["crystal_mm"] = source.crystal_length * 1e3;
    src["cut_angle_deg"] = degrees(source.cut_angle);
  } else {
    src["gaussian_fwhm_radps"] = source.gaussian_fwhm;
  }
  ordered_json grid;
  grid["points"] = source.grid.size();
  grid["step_radps"] = source.grid.step;
  if (source.grid.size() >= 2) {
    grid["span_below_radps"] = -source.grid.offsets.front();
    grid["span_above_radps"] = source.grid.offsets.back();
    double peak = 0.0;
    for (const double e : source.grid.envelope) {
      peak = std::max(peak, e);
    }
    grid["edge_to_peak_lo"] = peak > 0.0 ? source.grid.envelope.front() / peak : 0.0;
    grid["edge_to_peak_hi"] = peak > 0.0 ? source.grid.envelope.back() / peak : 0.0;
  }
  src["grid"] = grid;
  doc["source"] = src;

  doc["sample"] = ordered_json::parse(sample_to_json(sample));
  return doc.dump(2) + "\n";
}

std::string extraction_json(const ExtractionReport& report) {
  ordered_json doc;
  doc["format"] = "qoct-extract";
  doc["dips_found"] = report.dips_found;
  doc["midpoints_found"] = report.midpoints_found;
  doc["lambda0"] = {{"h", report.lambda0_h}, {"v", report.lambda0_v}};

  doc["layers"] = ordered_json::array();
  for (const LayerSummary& s : report.layers) {
    ordered_json node;
    node["position_um"] = s.position * 1e6;
    node["separation_um"] = s.separation * 1e6;
    node["relative_reflectance_sq"] = number_or_null(s.reflectance_sq);
    doc["layers"].push_back(node);
  }
  doc["reflectance_ratio_first_over_second"] = number_or_null(report.reflectance_ratio);

  doc["delta_ratio_rad"] = number_or_null(report.delta_ratio);
  doc["delta_ratio_deg"] = number_or_null(std::isnan(report.delta_ratio)
                                              ? report.delta_ratio
                                              : degrees(report.delta_ratio));
  doc["delta_preimages_rad"] = report.delta_preimages;
  doc["delta_est_rad"] = number_or_null(report.delta_est);
  doc["alpha_est_rad"] = number_or_null(report.alpha_est);
  doc["alpha_est_deg"] =
      number_or_null(std::isnan(report.alpha_est) ? report.alpha_est : degrees(report.alpha_est));
  doc["theta_star_deg"] = number_or_null(std::isnan(report.theta_star) ? report.theta_star
                                                                       : degrees(report.theta_star));
  doc["phi_star_deg"] =
      number_or_null(std::isnan(report.phi_star) ? report.phi_star : degrees(report.phi_star));
  doc["residuals"] = report.residuals;
  return doc.dump(2) + "\n";
}

std::string null_json(const NullResult& null, double delta_est, double delta_ratio,
                      double alpha_est, const std::vector<double>& residuals) {
  ordered_json doc;
  doc["format"] = "qoct-null";
  doc["theta_star_rad"] = null.theta;
  doc["theta_star_deg"] = degrees(null.theta);
  doc["phi_star_rad"] = null.phi;
  doc["phi_star_deg"] = degrees(null.phi);
  doc["rate_at_null"] = null.rate;
  doc["delta_est_rad"] = number_or_null(delta_est);
  doc["delta_est_deg"] = number_or_null(std::isnan(delta_est) ? delta_est : degrees(delta_est));
  doc["delta_ratio_rad"] = number_or_null(delta_ratio);
  doc["delta_ratio_deg"] =
      number_or_null(std::isnan(delta_ratio) ? delta_ratio : degrees(delta_ratio));
  doc["alpha_est_rad"] = number_or_null(alpha_est);
  doc["alpha_est_deg"] = number_or_null(std::isnan(alpha_est) ? alpha_est : degrees(alpha_est));
  doc["residuals"] = residuals;
  return doc.dump(2) + "\n";
}

PresetBundle preset_single_plate() {
  PresetBundle p;
  p.name = "fig4";
  p.alias = "single-plate";
  p.summary = "mirror buried under 120 um of quartz behind a dark front surface";
  p.sample.interfaces = {Interface{cplx{0.0, 0.0}}, Interface{cplx{1.0, 0.0}}};
  Layer layer;
  layer.thickness = 120e-6;
  layer.axis_angle = 0.0;
  layer.n_o = quartz_ordinary_constant();
  layer.n_e = quartz_extraordinary_constant();
  p.sample.layers = {layer};
  p.depth_start = 100e-6;
  p.depth_stop = 270e-6;
  p.depth_points = 1000;
  return p;
}

PresetBundle preset_two_surface() {
  PresetBundle p;
  p.name = "fig5";
  p.alias = "two-surface";
  p.summary = "145 um quartz plate between two equally reflective surfaces";
  const double amp = std::sqrt(0.5);
  p.sample.interfaces = {Interface{cplx{amp, 0.0}}, Interface{cplx{amp, 0.0}}};
  Layer layer;
  layer.thickness = 145e-6;
  layer.axis_angle = 0.0;
  layer.n_o = quartz_ordinary_constant();
  layer.n_e = quartz_extraordinary_constant();
  p.sample.layers = {layer};
  p.depth_start = -40e-6;
  p.depth_stop = 280e-6;
  p.depth_points = 1000;
  return p;
}

std::vector<PresetBundle> all_presets() { return {preset_single_plate(), preset_two_surface()}; }

PresetBundle find_preset(const std::string& name) {
  for (const PresetBundle& p : all_presets()) {
    if (p.name == name || p.alias == name) {
      return p;
    }
  }
  throw ConfigError("unknown preset '" + name + "' (known: fig4/single-plate, fig5/two-surface)");
}

}  // namespace qoct
