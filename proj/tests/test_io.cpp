#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dklb/csv.hpp"
#include "dklb/error.hpp"
#include "dklb/manifest.hpp"
#include "dklb/plot.hpp"

using namespace dklb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dklb_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CsvTable convergence_table(double order) {
  CsvTable t({"dt", "error", "order"});
  for (double dt : {4e-3, 2e-3, 1e-3, 5e-4}) {
    t.add_row({format_number(dt), format_number(3.0 * std::pow(dt, order)), ""});
  }
  return t;
}

}  // namespace

TEST_CASE("numbers round-trip exactly") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    CsvTable t({"x"});
    t.add_row({format_number(v)});
    CHECK(t.number(0, 0) == v);
  }
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(2.0) == "2");
}

TEST_CASE("csv tables") {
  CsvTable t({"a", "b"});
  t.add_row({"1", "x"});
  CHECK_THROWS_AS(t.add_row({"1"}), ValidationError);
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(t.column("c"), ValidationError);
  CHECK_THROWS_AS(t.number(0, 1), ValidationError);
  CHECK(t.str() == "a,b\n1,x\n");

  const fs::path p = scratch("csv") / "t.csv";
  t.write(p.string());
  const CsvTable back = CsvTable::read(p.string());
  CHECK(back.header() == t.header());
  CHECK(back.rows() == t.rows());
  CHECK_THROWS_AS(CsvTable::read((scratch("csv2") / "none.csv").string()), ValidationError);
}

TEST_CASE("git blob hashes") {
  // Values printed by `git hash-object`.
  CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  const fs::path p = scratch("hash") / "h.txt";
  std::ofstream(p, std::ios::binary) << "hello\n";
  CHECK(file_blob_hash(p.string()) == git_blob_hash("hello\n"));
}

TEST_CASE("manifest round-trip") {
  Manifest m;
  m.subcommand = "simulate";
  m.seed = 18446744073709551615ull;
  m.config = config_defaults();
  m.config["grid"]["N"] = "64";
  m.inputs["effective_config"] = git_blob_hash(to_ini(m.config));
  m.outputs["trajectory.csv"] = git_blob_hash("step,t\n");
  m.warnings = {"weight exp_1: boundary leakage 0.5 exceeds weights.leakage_threshold"};

  const fs::path p = scratch("manifest") / "manifest.json";
  write_manifest(p.string(), m);
  const Manifest back = read_manifest(p.string());
  CHECK(back.subcommand == m.subcommand);
  CHECK(back.seed == m.seed);
  CHECK(back.config == m.config);
  CHECK(back.inputs == m.inputs);
  CHECK(back.outputs == m.outputs);
  CHECK(back.warnings == m.warnings);
  CHECK(manifest_json(back) == slurp(p));

  std::ofstream(p) << "{not json";
  CHECK_THROWS_AS(read_manifest(p.string()), ValidationError);
  CHECK_THROWS_AS(read_manifest((p.parent_path() / "missing.json").string()), ValidationError);
}

TEST_CASE("plot kinds") {
  for (PlotKind k : {PlotKind::NormVsTime, PlotKind::Histogram, PlotKind::Convergence}) {
    CHECK(parse_plot_kind(plot_kind_name(k)) == k);
  }
  CHECK_THROWS_AS(parse_plot_kind("pie"), ValidationError);
}

TEST_CASE("plots are deterministic") {
  const fs::path dir = scratch("plot");
  convergence_table(4.0).write((dir / "c.csv").string());
  emit_plot((dir / "c.csv").string(), PlotKind::Convergence, (dir / "a.svg").string());
  emit_plot((dir / "c.csv").string(), PlotKind::Convergence, (dir / "b.svg").string());
  const std::string a = slurp(dir / "a.svg");
  CHECK(a == slurp(dir / "b.svg"));
  CHECK(a.starts_with("<svg"));
  CHECK(a.find("width=\"640\"") != std::string::npos);
}

TEST_CASE("convergence plot reports the fitted slope") {
  CHECK(loglog_slope(convergence_table(4.0)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(loglog_slope(convergence_table(2.5)) == doctest::Approx(2.5).epsilon(1e-12));
  const std::string svg = render_svg(convergence_table(4.0), PlotKind::Convergence, "self-convergence");
  CHECK(svg.find("slope = 4.000") != std::string::npos);
}

TEST_CASE("empty data and header mismatch") {
  const std::string svg = render_svg(CsvTable({"step", "t", "l2"}), PlotKind::NormVsTime, "empty");
  CHECK(svg.find("no data") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(render_svg(CsvTable({"sample_id", "ratio"}), PlotKind::Histogram, "").find("no data") !=
        std::string::npos);

  CHECK_THROWS_AS(render_svg(CsvTable({"t", "l2"}), PlotKind::NormVsTime, ""), ValidationError);
  CHECK_THROWS_AS(render_svg(CsvTable({"id", "ratio"}), PlotKind::Histogram, ""), ValidationError);
  CHECK_THROWS_AS(render_svg(CsvTable({"error", "dt"}), PlotKind::Convergence, ""), ValidationError);
}

TEST_CASE("histogram skips summary rows") {
  CsvTable t({"sample_id", "ratio"});
  t.add_row({"0", "0.5"});
  t.add_row({"1", "0.7"});
  const std::string plain = render_svg(t, PlotKind::Histogram, "h");
  t.add_row({"max", "0.7"});
  CHECK(render_svg(t, PlotKind::Histogram, "h") == plain);
}
