#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qoct/constants.hpp"
#include "qoct/errors.hpp"
#include "qoct/extract.hpp"
#include "qoct/interferometer.hpp"
#include "qoct/io.hpp"
#include "qoct/spdc.hpp"

using namespace qoct;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("qoct_io_test_" + std::to_string(static_cast<long>(::getpid())));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  REQUIRE(out.good());
}

json parse_file(const fs::path& path) { return json::parse(slurp(path)); }

const char* cli_path() {
  const char* cli = std::getenv("QOCT_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "QOCT_CLI must point at the CLI binary (set by CTest)");
  return cli;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

Interferogram small_scan() {
  LayeredSample sample;
  sample.interfaces = {Interface{cplx{0.3, 0.1}}, Interface{cplx{0.8, 0.0}}};
  Layer layer;
  layer.thickness = 30e-6;
  layer.axis_angle = 0.2;
  layer.n_o = IndexModel::constant(1.5);
  layer.n_e = IndexModel::constant(1.49);
  sample.layers = {layer};
  const Engine engine(sample, gaussian_source(0.8e-6, 2.0 * kPi * 5e12, 257));
  return scan(engine, BeamSplitter::balanced(), 0.0, 80e-6, 101);
}

}  // namespace

TEST_CASE("scan CSV round trip") {
  const Interferogram ig = small_scan();
  const fs::path path = work_dir() / "roundtrip.csv";
  write_interferogram_csv(ig, path.string());
  const Interferogram back = read_interferogram_csv(path.string());

  REQUIRE(back.depth_m.size() == ig.depth_m.size());
  for (std::size_t j = 0; j < ig.depth_m.size(); ++j) {
    CHECK(std::abs(back.depth_m[j] - ig.depth_m[j]) <= 1e-12 * std::abs(ig.depth_m[j]) + 1e-18);
    CHECK(std::abs(back.r_h[j] - ig.r_h[j]) <= 1e-12 * std::abs(ig.r_h[j]) + 1e-15);
    CHECK(std::abs(back.r_v[j] - ig.r_v[j]) <= 1e-12 * std::abs(ig.r_v[j]) + 1e-15);
    CHECK(std::abs(back.r_t[j] - ig.r_t[j]) <= 1e-12 * std::abs(ig.r_t[j]) + 1e-15);
  }
}

TEST_CASE("scan CSV rejects damaged files") {
  const fs::path bad_header = work_dir() / "bad_header.csv";
  spit(bad_header, "depth,a,b,c\n1,2,3,4\n");
  CHECK_THROWS_AS(read_interferogram_csv(bad_header.string()), ConfigError);

  const fs::path bad_row = work_dir() / "bad_row.csv";
  spit(bad_row, "ctau_um,R_H,R_V,R_T\n1.0,2.0,oops,4.0\n");
  CHECK_THROWS_AS(read_interferogram_csv(bad_row.string()), ConfigError);

  const fs::path short_row = work_dir() / "short_row.csv";
  spit(short_row, "ctau_um,R_H,R_V,R_T\n1.0,2.0\n");
  CHECK_THROWS_AS(read_interferogram_csv(short_row.string()), ConfigError);

  const fs::path empty = work_dir() / "empty.csv";
  spit(empty, "ctau_um,R_H,R_V,R_T\n");
  CHECK_THROWS_AS(read_interferogram_csv(empty.string()), ConfigError);

  CHECK_THROWS_AS(read_interferogram_csv((work_dir() / "missing.csv").string()), ConfigError);
}

TEST_CASE("sample JSON round trip preserves every field") {
  LayeredSample sample;
  sample.interfaces = {Interface{cplx{0.0, 0.0}}, Interface{cplx{0.25, -0.5}},
                       Interface{cplx{0.9, 0.0}}};
  Layer quartz_layer;
  quartz_layer.thickness = 120e-6;
  quartz_layer.axis_angle = 0.3;
  quartz_layer.n_o = quartz_ordinary_constant();
  quartz_layer.n_e = quartz_extraordinary_constant();
  quartz_layer.gvd_inject = 4e-24;
  Layer custom_layer;
  custom_layer.thickness = 55e-6;
  custom_layer.axis_angle = 1.1;
  custom_layer.n_o = IndexModel::constant(1.52);
  custom_layer.n_e = IndexModel::constant(1.505);
  sample.layers = {quartz_layer, custom_layer};

  const LayeredSample back = sample_from_json(sample_to_json(sample));
  REQUIRE(back.interfaces.size() == 3);
  REQUIRE(back.layers.size() == 2);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.interfaces[i].reflectance == sample.interfaces[i].reflectance);
  }
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.layers[i].thickness == doctest::Approx(sample.layers[i].thickness).epsilon(1e-14));
    CHECK(back.layers[i].axis_angle ==
          doctest::Approx(sample.layers[i].axis_angle).epsilon(1e-14));
    CHECK(back.layers[i].gvd_inject == sample.layers[i].gvd_inject);
    CHECK(back.layers[i].n_o.is_constant());
    CHECK(back.layers[i].n_o.n_value == sample.layers[i].n_o.n_value);
    CHECK(back.layers[i].n_e.n_value == sample.layers[i].n_e.n_value);
  }

  // dispersive materials round trip through their names
  LayeredSample named;
  named.interfaces = {Interface{cplx{0.1, 0.0}}, Interface{cplx{0.2, 0.0}},
                      Interface{cplx{0.3, 0.0}}};
  Layer sell = quartz_layer;
  sell.n_o = quartz_ordinary_sellmeier();
  sell.n_e = quartz_extraordinary_sellmeier();
  sell.gvd_inject = 0.0;
  Layer crystal = custom_layer;
  crystal.n_o = bbo_ordinary();
  crystal.n_e = bbo_extraordinary();
  named.layers = {sell, crystal};
  const std::string text = sample_to_json(named);
  CHECK(text.find("quartz-sellmeier") != std::string::npos);
  CHECK(text.find("\"bbo\"") != std::string::npos);
  CHECK(text.find("gvd") == std::string::npos);  // zero injection stays implicit
  const LayeredSample named_back = sample_from_json(text);
  CHECK(named_back.layers[0].n_o.citation == "Ghosh 1999");
  CHECK(named_back.layers[1].n_o.citation == "Kato 1986");
  CHECK_FALSE(named_back.layers[0].n_o.is_constant());
}

TEST_CASE("sample JSON validation errors") {
  CHECK_THROWS_AS(sample_from_json("{"), ConfigError);
  CHECK_THROWS_AS(sample_from_json("[]"), ConfigError);
  CHECK_THROWS_AS(sample_from_json(R"({"interfaces": [], "layers": []})"), ConfigError);
  CHECK_THROWS_AS(sample_from_json(R"({"interfaces": [{}], "layers": []})"), ConfigError);
  CHECK_THROWS_AS(sample_from_json(R"({"interfaces": [{"r": [1.5, 0]}], "layers": []})"),
                  ConfigError);
  CHECK_THROWS_AS(sample_from_json(R"({"interfaces": [{"r": [0.5]}], "layers": []})"),
                  ConfigError);
  const std::string unknown_material = R"({
    "interfaces": [{"r": [0.0, 0.0]}, {"r": [1.0, 0.0]}],
    "layers": [{"d_um": 10, "alpha_deg": 0, "material": "glass"}]
  })";
  CHECK_THROWS_AS(sample_from_json(unknown_material), ConfigError);
  const std::string bad_thickness = R"({
    "interfaces": [{"r": [0.0, 0.0]}, {"r": [1.0, 0.0]}],
    "layers": [{"d_um": -5, "alpha_deg": 0, "material": "quartz"}]
  })";
  CHECK_THROWS_AS(sample_from_json(bad_thickness), ConfigError);
  CHECK_THROWS_AS(sample_from_json_file((work_dir() / "nope.json").string()), ConfigError);
}

TEST_CASE("sidecar carries the scan geometry and source description") {
  const PresetBundle preset = preset_single_plate();
  const TwinPhotonSource source = bbo_type2_source(0.4e-6, 1.5e-3);
  const Engine engine(preset.sample, source);
  const Interferogram ig =
      scan(engine, BeamSplitter::balanced(), preset.depth_start, preset.depth_stop, 200);

  const json doc = json::parse(sidecar_json(ig, preset.sample, source));
  CHECK(doc.at("format") == "qoct-scan");
  CHECK(doc.at("axis").at("column") == "ctau_um");
  CHECK(doc.at("axis").at("points") == 200);
  CHECK(doc.at("axis").at("start_um").get<double>() == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(doc.at("axis").at("arm_delay_start_s").get<double>() ==
        doctest::Approx(2.0 * 100e-6 / kSpeedOfLight).epsilon(1e-12));
  CHECK(doc.at("lambda0").at("h").get<double>() == ig.lambda0_h);
  CHECK(doc.at("traces_normalized_by") == "lambda0");
  CHECK(doc.at("clip_count") == 0);
  CHECK(doc.at("empty_sample") == false);
  CHECK(doc.at("noncommuting_layers") == false);
  CHECK(doc.at("source").at("kind") == "bbo-type2");
  CHECK(doc.at("source").at("pump_um").get<double>() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(doc.at("source").at("grid").at("points") == 4097);
  CHECK(doc.at("source").at("grid").at("edge_to_peak_hi").get<double>() < 1e-4);
  CHECK(doc.at("sample").at("layers")[0].at("d_um").get<double>() ==
        doctest::Approx(120.0).epsilon(1e-12));

  // a twisted two-layer stack is flagged
  LayeredSample twisted;
  twisted.interfaces = {Interface{cplx{0.1, 0.0}}, Interface{cplx{0.1, 0.0}},
                        Interface{cplx{0.1, 0.0}}};
  Layer a = preset.sample.layers[0];
  Layer b = preset.sample.layers[0];
  b.axis_angle = 0.4;
  twisted.layers = {a, b};
  const json doc2 = json::parse(sidecar_json(ig, twisted, source));
  CHECK(doc2.at("noncommuting_layers") == true);
}

TEST_CASE("report JSON encodes absent values as null") {
  ExtractionReport blank;
  const json doc = json::parse(extraction_json(blank));
  CHECK(doc.at("format") == "qoct-extract");
  CHECK(doc.at("delta_est_rad").is_null());
  CHECK(doc.at("delta_ratio_rad").is_null());
  CHECK(doc.at("alpha_est_rad").is_null());
  CHECK(doc.at("reflectance_ratio_first_over_second").is_null());
  CHECK(extraction_json(blank).find("nan") == std::string::npos);

  NullResult null;
  null.theta = 0.3;
  null.phi = 0.6;
  null.rate = 1.01;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const json ndoc = json::parse(null_json(null, 0.5, nan, 0.2, {1e-9, -1e-9}));
  CHECK(ndoc.at("format") == "qoct-null");
  CHECK(ndoc.at("delta_est_rad").get<double>() == 0.5);
  CHECK(ndoc.at("delta_ratio_rad").is_null());
  CHECK(ndoc.at("alpha_est_deg").get<double>() == doctest::Approx(0.2 * 180.0 / kPi));
  CHECK(ndoc.at("residuals").size() == 2);
}

TEST_CASE("preset lookup") {
  CHECK(all_presets().size() == 2);
  CHECK(find_preset("fig4").name == "fig4");
  CHECK(find_preset("single-plate").name == "fig4");
  CHECK(find_preset("fig5").name == "fig5");
  CHECK(find_preset("two-surface").name == "fig5");
  CHECK_THROWS_AS(find_preset("fig6"), ConfigError);

  const PresetBundle p4 = find_preset("fig4");
  CHECK_NOTHROW(p4.sample.validate());
  CHECK(p4.sample.interfaces[0].reflectance == cplx{0.0, 0.0});
  CHECK(p4.sample.interfaces[1].reflectance == cplx{1.0, 0.0});
  CHECK(p4.sample.layers[0].thickness == doctest::Approx(120e-6).epsilon(1e-14));
  CHECK(p4.depth_points == 1000);

  const PresetBundle p5 = find_preset("fig5");
  CHECK_NOTHROW(p5.sample.validate());
  CHECK(std::norm(p5.sample.interfaces[0].reflectance) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::norm(p5.sample.interfaces[1].reflectance) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p5.sample.layers[0].thickness == doctest::Approx(145e-6).epsilon(1e-14));
  CHECK(p5.depth_start < 0.0);
}

TEST_CASE("cli scan pipeline reproduces the buried-mirror figures") {
  const fs::path dir = work_dir();
  const fs::path csv = dir / "fig4.csv";
  const fs::path side = dir / "fig4_side.json";
  const std::string base = "simulate --preset fig4 --out " + csv.string();

  REQUIRE(run_cli(base + " --sidecar " + side.string()) == 0);
  REQUIRE(fs::exists(csv));
  REQUIRE(fs::exists(side));

  // reruns, the serial path, and a thread cap all give identical bytes
  const std::string bytes = slurp(csv);
  const fs::path csv2 = dir / "fig4_again.csv";
  REQUIRE(run_cli("simulate --preset fig4 --out " + csv2.string()) == 0);
  CHECK(slurp(csv2) == bytes);
  const fs::path csv3 = dir / "fig4_serial.csv";
  REQUIRE(run_cli("simulate --preset fig4 --serial --out " + csv3.string()) == 0);
  CHECK(slurp(csv3) == bytes);
  const fs::path csv4 = dir / "fig4_capped.csv";
  const std::string capped =
      "QOCT_THREADS=2 " + std::string(cli_path()) + " simulate --preset fig4 --out " +
      csv4.string() + " >/dev/null 2>&1";
  REQUIRE(std::system(capped.c_str()) == 0);
  CHECK(slurp(csv4) == bytes);

  // the combined trace bottoms out at the buried interface's optical depth
  const Interferogram ig = read_interferogram_csv(csv.string());
  std::size_t jmin = 0;
  for (std::size_t j = 1; j < ig.r_t.size(); ++j) {
    if (ig.r_t[j] < ig.r_t[jmin]) {
      jmin = j;
    }
  }
  const double step_m = (270e-6 - 100e-6) / 999.0;
  CHECK(std::abs(ig.depth_m[jmin] - (100e-6 + 500.0 * step_m)) < 1e-12);
  CHECK(std::abs(ig.depth_m[jmin] - 1.54217 * 120e-6) < step_m);
  CHECK(ig.r_t[jmin] == doctest::Approx(0.003593013116).epsilon(1e-6));

  const json sdoc = parse_file(side);
  CHECK(sdoc.at("lambda0").at("h").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));

  // extraction finds the single dip and the winding ladder brackets the
  // forward retardance
  const fs::path ex = dir / "fig4_extract.json";
  REQUIRE(run_cli("extract --csv " + csv.string() + " --sidecar " + side.string() + " --out " +
                  ex.string()) == 0);
  const json edoc = parse_file(ex);
  CHECK(edoc.at("dips_found") == 1);
  CHECK(edoc.at("midpoints_found") == 0);
  CHECK(edoc.at("reflectance_ratio_first_over_second").is_null());
  CHECK(edoc.at("layers")[0].at("position_um").get<double>() ==
        doctest::Approx(185.06).epsilon(2e-3));
  CHECK(edoc.at("delta_ratio_rad").get<double>() == doctest::Approx(1.0567).epsilon(2e-3));
  bool winding_found = false;
  for (const auto& v : edoc.at("delta_preimages_rad")) {
    if (std::abs(v.get<double>() - 8.3681) < 5e-3) {
      winding_found = true;
    }
  }
  CHECK(winding_found);

  // nulling at the dip recovers the retardance; the fast axis lies at zero
  const fs::path nj = dir / "fig4_null.json";
  REQUIRE(run_cli("null --preset fig4 --at-um 185.0604 --out " + nj.string()) == 0);
  const json ndoc = parse_file(nj);
  const double delta_est = ndoc.at("delta_est_rad").get<double>();
  CHECK(delta_est == doctest::Approx(1.05558).epsilon(1e-3));
  const double alpha = ndoc.at("alpha_est_rad").get<double>();
  CHECK(std::min(alpha, kPi - alpha) < 1e-6);
  for (const auto& r : ndoc.at("residuals")) {
    CHECK(std::abs(r.get<double>()) < 1e-6);
  }
  CHECK(ndoc.at("rate_at_null").get<double>() > 1.0);
  // with the axis at zero the nulling angle phi* equals the retardance
  CHECK(std::abs(ndoc.at("phi_star_rad").get<double>() - delta_est) < 1e-6);
}

TEST_CASE("cli preset export round trips through simulate --sample") {
  const fs::path dir = work_dir() / "presets";
  REQUIRE(run_cli("presets --write " + dir.string()) == 0);
  REQUIRE(fs::exists(dir / "fig4.json"));
  REQUIRE(fs::exists(dir / "fig5.json"));

  const fs::path a = work_dir() / "by_preset.csv";
  const fs::path b = work_dir() / "by_sample.csv";
  REQUIRE(run_cli("simulate --preset fig5 --out " + a.string()) == 0);
  REQUIRE(run_cli("simulate --sample " + (dir / "fig5.json").string() +
                  " --start-um -40 --stop-um 280 --points 1000 --out " + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));

  // the paired-surface scan shows two dips, their midpoint echo, and the
  // near-unity depth ratio of a polarization-insensitive combined trace
  const fs::path ex = work_dir() / "fig5_extract.json";
  REQUIRE(run_cli("extract --csv " + a.string() + " --out " + ex.string()) == 0);
  const json edoc = parse_file(ex);
  CHECK(edoc.at("dips_found") == 2);
  CHECK(edoc.at("midpoints_found") == 1);
  CHECK(edoc.at("layers")[1].at("separation_um").get<double>() ==
        doctest::Approx(223.614257).epsilon(1e-4));
  CHECK(edoc.at("reflectance_ratio_first_over_second").get<double>() ==
        doctest::Approx(1.0052493007).epsilon(1e-6));
}

TEST_CASE("cli failure modes use distinct exit codes") {
  const fs::path out = work_dir() / "unused.csv";
  // configuration problems
  CHECK(run_cli("simulate --preset fig6 --out " + out.string()) == 2);
  CHECK(run_cli("simulate --out " + out.string()) == 2);
  CHECK(run_cli("simulate --preset fig4 --sample x.json --out " + out.string()) == 2);
  CHECK(run_cli("simulate --preset fig4") == 2);  // --out is required
  CHECK(run_cli("bogus") == 2);
  CHECK(run_cli("extract --csv " + (work_dir() / "missing.csv").string()) == 2);
  CHECK(run_cli("--help") == 0);

  // physics problems: a pump outside the supported band
  CHECK(run_cli("simulate --preset fig4 --pump-um 0.75 --out " + out.string()) == 3);

  // degenerate analysis: an isotropic layer leaves the axis indeterminate
  const fs::path iso = work_dir() / "isotropic.json";
  spit(iso, R"({
  "interfaces": [{"r": [0.0, 0.0]}, {"r": [1.0, 0.0]}],
  "layers": [{"d_um": 50, "alpha_deg": 0, "material": {"n_o": 1.5, "n_e": 1.5}}]
})");
  CHECK(run_cli("null --sample " + iso.string() + " --at-um 75") == 4);
}
