#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "yblab/verify.hpp"
#include "yblab/weights.hpp"

namespace yblab::lattice {

using weights::AnySpin;
using weights::Model;

/// Edge of a spin graph carrying the weight W_alpha(a, b).
struct Edge {
  int a;
  int b;
  double alpha;
};

/// Sites with fixed or free spins, joined by weighted edges. Free sites carry
/// the single-spin weight S; fixed sites do not.
struct SpinGraph {
  std::vector<AnySpin> spins;  // value for fixed sites, start value for free ones
  std::vector<bool> fixed;
  std::vector<Edge> edges;

  int size() const { return static_cast<int>(spins.size()); }
  int free_sites() const;
  void validate(const Model& model) const;
};

/// Square lattice rows x cols with fixed perimeter spins. Horizontal edges
/// carry W_alpha, vertical edges W_{eta - alpha}.
struct LatticeSpec {
  int rows = 3;
  int cols = 3;
  /// Perimeter spins in row-major order of the perimeter sites; empty means
  /// all zero (gamma model: (0, 0)).
  std::vector<AnySpin> boundary;
  double alpha = 0.0;

  int internal_sites() const;
  int perimeter_sites() const;
  void validate(const Model& model) const;
  SpinGraph to_graph(const Model& model) const;
  /// Rows and columns exchanged, boundary carried along, alpha -> eta - alpha.
  LatticeSpec transposed(const Model& model) const;
};

/// One free site joined to the three outer spins of a star configuration by
/// crossed edges; its partition function is the star side of the STR.
SpinGraph star_graph(const Model& model, const verify::StarConfig& cfg);

/// Quadrature nodes for one site variable. For the gamma model every node is
/// repeated for n in [-n_max, n_max].
struct GridDiscretization {
  std::vector<double> x;
  std::vector<double> w;
  int n_max = 0;
  double scale = 0.0;  // half-width (hyperbolic) or tan scale (gamma) used to build the grid; 0 if custom

  /// Default grid per model: equispaced periodic nodes on [0, pi) (elliptic),
  /// trapezoid nodes on [-X, X] (hyperbolic), tan-mapped Gauss-Legendre on the
  /// whole line (gamma, power-law tails). scale = 0 picks a model default.
  static GridDiscretization for_model(const Model& model, int nodes = 64, int n_max = 8, double scale = 0.0);
  /// As for_model, with the scale widened to cover the fixed spins of `graph`.
  static GridDiscretization for_graph(const Model& model, const SpinGraph& graph, int nodes = 64, int n_max = 8);
  int states() const { return static_cast<int>(x.size()) * (2 * n_max + 1); }
  void validate() const;
};

enum class Method { Exact, MC };

struct PartitionResult {
  double log_z = 0.0;
  double per_site = 0.0;
  Method method = Method::Exact;
  double error_estimate = 0.0;
  int internal_sites = 0;
};

struct ExactOptions {
  /// Re-run on a refined grid (1.5x nodes, n_max + 4) and report the change.
  bool estimate_error = true;
};

/// Sum/quadrature over all free spins by variable elimination. At most four
/// free sites, and the free-site graph must be eliminable through vertices of
/// degree <= 2 (paths, cycles, the 2x2 block).
PartitionResult exact_partition(const SpinGraph& graph, const Model& model, const GridDiscretization& grid,
                                 const ExactOptions& opts = {});
PartitionResult exact_partition(const LatticeSpec& spec, const Model& model, const GridDiscretization& grid,
                                const ExactOptions& opts = {});

/// Exact <log W> averaged over the edges that touch a free site, from the
/// derivative of log Z with those edge logs scaled by t at t = 1.
double exact_mean_log_w(const SpinGraph& graph, const Model& model, const GridDiscretization& grid);

struct MCConfig {
  int sweeps = 20000;
  int burn_in = 2000;
  double x_step = 0.5;
  double n_step_prob = 0.3;
  std::uint64_t seed = 1;
  /// Record site values every `thin` sweeps (0 disables the trace).
  int trace_every = 0;

  void validate() const;
};

struct Observables {
  double mean_log_w = 0.0;  // per edge touching a free site
  double std_error = 0.0;   // batch means
  double tau_int = 0.0;     // integrated autocorrelation time, in sweeps
  double acceptance = 0.0;
  std::vector<double> series;  // one measurement per post-burn-in sweep
  /// Free-site values at every trace_every-th sweep after burn-in, flattened
  /// as (x, n) per free site.
  std::vector<double> trace;
  std::vector<std::string> warnings;
};

/// Metropolis sampling of the Gibbs measure of the graph. Deterministic for a
/// given seed. Elliptic spins are wrapped into [0, pi).
Observables mc_run(const SpinGraph& graph, const Model& model, const MCConfig& mc);
Observables mc_run(const LatticeSpec& spec, const Model& model, const MCConfig& mc);

/// N^-1 log Z for each spec, in order.
std::vector<double> free_energy_trend(const std::vector<LatticeSpec>& specs, const Model& model,
                                      const GridDiscretization& grid);

}  // namespace yblab::lattice
