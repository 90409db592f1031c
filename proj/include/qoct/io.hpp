#pragma once

#include <string>

#include "qoct/extract.hpp"
#include "qoct/interferometer.hpp"
#include "qoct/sample.hpp"
#include "qoct/spdc.hpp"

namespace qoct {

// Scan CSV: header "ctau_um,R_H,R_V,R_T", one row per depth point, %.12e.
// Reruns with identical inputs produce identical bytes.
void write_interferogram_csv(const Interferogram& ig, const std::string& path);
Interferogram read_interferogram_csv(const std::string& path);

// Sample description JSON:
// {
//   "interfaces": [{"r": [re, im]}, ...],
//   "layers": [{"d_um": ..., "alpha_deg": ...,
//               "material": "quartz" | "quartz-sellmeier" | "bbo" | {"n_o":..,"n_e":..},
//               "gvd_s2_per_m": ...}, ...]
// }
LayeredSample sample_from_json(const std::string& text);
LayeredSample sample_from_json_file(const std::string& path);
std::string sample_to_json(const LayeredSample& sample);

// Machine-readable scan metadata: delay-axis conversion formulas, the
// constant rate split by arm, grid edges, clip counter. Deliberately carries
// no timestamps or absolute paths.
std::string sidecar_json(const Interferogram& ig, const LayeredSample& sample,
                         const TwinPhotonSource& source);

std::string extraction_json(const ExtractionReport& report);
std::string null_json(const NullResult& null, double delta_est, double delta_ratio,
                      double alpha_est, const std::vector<double>& residuals);

struct PresetBundle {
  std::string name;     // CLI token
  std::string alias;    // descriptive second token
  std::string summary;  // one-line description for the listing
  LayeredSample sample;
  double depth_start = 0.0;  // m
  double depth_stop = 0.0;   // m
  std::size_t depth_points = 0;
};

// "fig4" / "single-plate": fully reflective interface buried under 120 um of
// quartz behind a dark front surface. One dip; the arm-rate ratio at the dip
// is tan^2 of the layer retardance.
PresetBundle preset_single_plate();

// "fig5" / "two-surface": 145 um quartz plate between two equally reflective
// surfaces. Paired dips plus the cross-echo midpoint feature.
PresetBundle preset_two_surface();

std::vector<PresetBundle> all_presets();

// Lookup by name or alias; throws ConfigError for unknown names.
PresetBundle find_preset(const std::string& name);

}  // namespace qoct
