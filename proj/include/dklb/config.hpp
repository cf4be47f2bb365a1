#pragma once

// Experiment configuration: INI-style [section] key = value files, command
// line overrides of the form section.key=value, and the typed view used by
// the subcommands. Every key has a default; unknown sections or keys are
// rejected.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dklb/grid.hpp"
#include "dklb/norms.hpp"
#include "dklb/symbols.hpp"

namespace dklb {

/// section -> key -> raw value
using ConfigValues = std::map<std::string, std::map<std::string, std::string>>;

/// All known keys with their default values.
const ConfigValues& config_defaults();

/// Reads an INI file and merges it over the defaults. Throws ValidationError
/// for unreadable files, syntax errors and unknown sections or keys.
ConfigValues load_config_file(const std::string& path);

/// Applies "section.key=value". Throws ValidationError for malformed or unknown keys.
void apply_override(ConfigValues& values, const std::string& assignment);

/// Serialises values back to INI text (sorted, defaults included).
std::string to_ini(const ConfigValues& values);

enum class InitialKind { Gaussian, Mixture, Zero };

struct ExperimentConfig {
  ConfigValues values;  // the full echo, defaults included

  struct {
    std::string phase_text;
    double eta;
    PhaseFunction phase = make_preset(PresetKind::KdVKS, 1.0).phase;
  } model;
  struct {
    std::size_t N;
    double L;
    double dealias;
  } grid;
  struct {
    std::string method;  // etdrk4 | picard | linear
    double T;
    double dt;
    std::size_t nt;
    double tol;
    std::size_t max_iter;
    double s;
    double cstar;
    std::optional<double> r;
    std::optional<double> b;
  } solver;
  struct {
    InitialKind kind;
    double center;
    double width;
    double norm;
    std::uint64_t id;
  } initial;
  struct {
    std::vector<WeightSpec> list;
    std::vector<std::string> labels;
    double leakage_threshold;
  } weights;
  struct {
    std::size_t size;
    std::uint64_t seed;
  } ensemble;
  struct {
    std::string dir;
    std::size_t save_every;
    bool snapshots;
    bool plots;
  } output;
  struct {
    int max_n;
    int max_a;
    double tol;
  } bracket;
  SmoothingSetup smoothing;
  struct {
    std::vector<double> b;
    std::vector<double> t;
    double center;
    double width;
    std::size_t N;
    double L;
  } conjugation;
  struct {
    int k;
    double alpha;
    double gamma;
    double h;
    double epsilon;
    std::vector<double> t;
    std::vector<double> sigma;
    std::size_t N;
    double L;
    double r;
    double s;
    std::vector<double> exchange_t;
  } decay;
  struct {
    std::vector<double> norms;  // empty: H^s norm of the initial data
    std::vector<double> cstar;
  } existence;
  struct {
    std::vector<double> dts;
    double reference_dt;
    double T;
    std::size_t N;
    double L;
    double width;  // centred Gaussian datum
    double norm;
  } convergence;

  /// Grid described by [grid].
  GridPtr make_grid() const;
  /// Initial datum described by [initial] on `grid`.
  SpectralField make_initial(const GridPtr& grid) const;
};

/// Parses and validates every key. Error messages name the offending field
/// as section.key.
ExperimentConfig build_config(const ConfigValues& values);

}  // namespace dklb
