#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "dklb/config.hpp"
#include "dklb/error.hpp"

using namespace dklb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dklb_test_config_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string message_of(const ConfigValues& v) {
  try {
    (void)build_config(v);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

ConfigValues with(const std::string& assignment) {
  ConfigValues v = config_defaults();
  apply_override(v, assignment);
  return v;
}

}  // namespace

TEST_CASE("defaults build") {
  const ExperimentConfig c = build_config(config_defaults());
  CHECK(c.model.phase_text == "kdvks");
  CHECK(c.grid.N == 256);
  CHECK(c.solver.method == "etdrk4");
  CHECK(c.initial.kind == InitialKind::Gaussian);
  CHECK(c.weights.list.empty());
  CHECK(c.ensemble.seed == 1);
  CHECK(c.conjugation.b == std::vector<double>{0.25, 0.5});
  CHECK(c.existence.norms.empty());
  CHECK_FALSE(c.solver.r.has_value());
}

TEST_CASE("overrides") {
  ConfigValues v = config_defaults();
  apply_override(v, "grid.N=512");
  apply_override(v, " solver.T = 0.5 ");
  apply_override(v, "weights.list=poly:0.5, exp:0.25");
  apply_override(v, "model.phase=optimality:3");
  const ExperimentConfig c = build_config(v);
  CHECK(c.grid.N == 512);
  CHECK(c.solver.T == 0.5);
  REQUIRE(c.weights.list.size() == 2);
  CHECK(c.weights.labels == std::vector<std::string>{"poly_0.5", "exp_0.25"});
  CHECK(c.model.phase.p() == 6.0);

  CHECK_THROWS_AS(apply_override(v, "grid.bogus=1"), ValidationError);
  CHECK_THROWS_AS(apply_override(v, "nosection.key=1"), ValidationError);
  CHECK_THROWS_AS(apply_override(v, "gridN=1"), ValidationError);
  CHECK_THROWS_AS(apply_override(v, "grid.N"), ValidationError);
}

TEST_CASE("validation names the field") {
  CHECK(message_of(with("grid.N=-5")).starts_with("grid.N"));
  CHECK(message_of(with("grid.N=100")).find("power of two") != std::string::npos);
  CHECK(message_of(with("grid.L=0")).starts_with("grid.L"));
  CHECK(message_of(with("solver.method=euler")).starts_with("solver.method"));
  CHECK(message_of(with("solver.T=abc")).starts_with("solver.T"));
  CHECK(message_of(with("model.eta=-1")).starts_with("model.eta"));
  CHECK(message_of(with("weights.list=poly")).starts_with("weights.list"));
  CHECK(message_of(with("bracket.max_n=13")).starts_with("bracket.max_n"));
  CHECK(message_of(with("convergence.dts=0.001")).starts_with("convergence.dts"));
  CHECK(message_of(with("output.plots=maybe")).starts_with("output.plots"));
  CHECK(message_of(config_defaults()).empty());
}

TEST_CASE("ini files") {
  const fs::path dir = scratch("ini");
  const fs::path good = dir / "good.ini";
  std::ofstream(good) << "[grid]\nN = 64\nL = 20\n\n[solver]\nmethod = picard\n";
  const ExperimentConfig c = build_config(load_config_file(good.string()));
  CHECK(c.grid.N == 64);
  CHECK(c.grid.L == 20.0);
  CHECK(c.solver.method == "picard");
  CHECK(c.solver.dt == 0.001);

  const fs::path bad_key = dir / "bad_key.ini";
  std::ofstream(bad_key) << "[grid]\nNN = 64\n";
  CHECK_THROWS_WITH_AS(load_config_file(bad_key.string()), doctest::Contains("grid.NN"), ValidationError);

  const fs::path bad_sec = dir / "bad_sec.ini";
  std::ofstream(bad_sec) << "[gird]\nN = 64\n";
  CHECK_THROWS_AS(load_config_file(bad_sec.string()), ValidationError);

  CHECK_THROWS_AS(load_config_file((dir / "missing.ini").string()), ValidationError);
}

TEST_CASE("ini echo round-trips") {
  ConfigValues v = config_defaults();
  apply_override(v, "grid.N=128");
  apply_override(v, "decay.t=0.1, 0.2");
  const fs::path p = scratch("echo") / "echo.ini";
  std::ofstream(p) << to_ini(v);
  CHECK(load_config_file(p.string()) == v);
}

TEST_CASE("initial data") {
  ConfigValues v = config_defaults();
  apply_override(v, "initial.norm=0.3");
  const ExperimentConfig c = build_config(v);
  const GridPtr g = c.make_grid();
  CHECK(coefficient_l2(c.make_initial(g)) == doctest::Approx(0.3).epsilon(1e-12));

  apply_override(v, "initial.kind=zero");
  CHECK(coefficient_l2(build_config(v).make_initial(g)) == 0.0);

  apply_override(v, "initial.kind=mixture");
  const ExperimentConfig m = build_config(v);
  const SpectralField a = m.make_initial(g);
  const SpectralField b = m.make_initial(g);
  CHECK(coefficient_l2(a - b) == 0.0);
  CHECK(coefficient_l2(a) > 0.0);
}
