#include "yblab/lattice.hpp"

#include <Eigen/Dense>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <memory>
#include <sstream>
#include <unordered_map>

namespace yblab::lattice {

namespace {

using std::numbers::pi;
using weights::DualSpin;
using weights::EdgeWeight;
using weights::ModelKind;
using weights::Spin;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct XN {
  double x;
  long n;
};

XN unpack(const AnySpin& s) {
  if (const auto* d = std::get_if<DualSpin>(&s)) return {d->x, d->n};
  return {std::get<Spin>(s).x, 0};
}

AnySpin zero_spin(const Model& m) {
  if (m.uses_dual_spins()) return DualSpin{0.0, 0};
  return Spin{0.0};
}

// Edge evaluator for the lattice code. Hyperbolic weights factor as
// kappa^-1 e^{4 pi alpha x1} g(x1 + x2) g(x1 - x2); g is expensive for real b,
// so it is memoised (exact sums) or tabulated on a spline (Monte Carlo).
class EdgeEval {
 public:
  enum class Mode { Memo, Spline };

  EdgeEval(const Model& model, double alpha, Mode mode) : weight_(model, alpha), alpha_(alpha), mode_(mode) {
    if (model.kind() != ModelKind::Hyperbolic) return;
    hyp_ = model.as_hyperbolic();
    budget_ = model.budget();
    log_norm_ = -specfun::log_kappa_hyperbolic(alpha, hyp_->b, budget_).real();
    if (mode_ == Mode::Spline) {
      const int n = static_cast<int>(2.0 * kSplineHalfWidth / kSplineStep) + 1;
      std::vector<double> v(n);
      for (int i = 0; i < n; ++i) v[i] = g_direct(-kSplineHalfWidth + i * kSplineStep);
      spline_ = std::make_unique<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
          v.begin(), v.end(), -kSplineHalfWidth, kSplineStep);
    }
  }

  double log_value(double x1, long n1, double x2, long n2) {
    if (!hyp_) return weight_.log_value(x1, n1, x2, n2);
    return log_norm_ + 4.0 * pi * alpha_ * x1 + g(x1 + x2) + g(x1 - x2);
  }

 private:
  static constexpr double kSplineHalfWidth = 10.0;
  static constexpr double kSplineStep = 0.01;

  double g_direct(double s) const {
    const auto& b = hyp_->b;
    return (specfun::log_ncqdl({s, alpha_}, b, budget_) - specfun::log_ncqdl({s, -alpha_}, b, budget_)).real();
  }

  double g(double s) {
    if (mode_ == Mode::Spline) {
      if (std::abs(s) < kSplineHalfWidth) return (*spline_)(s);
      return g_direct(s);
    }
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
    const double v = g_direct(s);
    memo_.emplace(s, v);
    return v;
  }

  EdgeWeight weight_;
  double alpha_;
  Mode mode_;
  const weights::HyperbolicModel* hyp_ = nullptr;
  PrecisionBudget budget_;
  double log_norm_ = 0.0;
  std::unordered_map<double, double> memo_;
  std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

class EdgeCache {
 public:
  EdgeCache(const Model& model, EdgeEval::Mode mode) : model_(model), mode_(mode) {}
  EdgeEval& operator()(double alpha) {
    auto it = cache_.find(alpha);
    if (it == cache_.end()) it = cache_.emplace(alpha, std::make_unique<EdgeEval>(model_, alpha, mode_)).first;
    return *it->second;
  }

 private:
  const Model& model_;
  EdgeEval::Mode mode_;
  std::map<double, std::unique_ptr<EdgeEval>> cache_;
};

// Gauss-Legendre nodes/weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  Matrix J = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(J);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    w[i] = 2.0 * v * v;
  }
}

// Discrete states of one free site.
struct States {
  std::vector<double> x;
  std::vector<long> n;
  Vector log_w;  // log quadrature weight
};

States expand(const GridDiscretization& g) {
  States s;
  const int per = static_cast<int>(g.x.size());
  const int total = g.states();
  s.x.reserve(total);
  s.n.reserve(total);
  s.log_w.resize(total);
  int k = 0;
  for (int n = -g.n_max; n <= g.n_max; ++n)
    for (int i = 0; i < per; ++i, ++k) {
      s.x.push_back(g.x[i]);
      s.n.push_back(n);
      s.log_w(k) = std::log(g.w[i]);
    }
  return s;
}

double log_sum_exp(const Vector& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// log sum_k exp(A(a,k) + B(k,c)) for all (a,c), with per-row/column shifts.
Matrix log_matmul(const Matrix& A, const Matrix& B) {
  const Vector ra = A.rowwise().maxCoeff();
  const Eigen::RowVectorXd cb = B.colwise().maxCoeff();
  Matrix ea = A.colwise() - ra;
  Matrix eb = B.rowwise() - cb;
  ea = ea.array().exp();
  eb = eb.array().exp();
  Matrix prod = ea * eb;
  Matrix out = prod.array().log();
  out.colwise() += ra;
  out.rowwise() += cb;
  return out;
}

struct FactorGraph {
  double constant = 0.0;
  std::vector<int> free_ids;           // graph site index of each free variable
  std::vector<Vector> unary;           // per free variable
  std::map<std::pair<int, int>, Matrix> pair;  // key (i, j), i < j, over free variables
};

// Builds log factors; edges touching a free site have their log W scaled by t.
FactorGraph build_factors(const SpinGraph& g, const Model& model, const States& st, double t, EdgeCache& edges) {
  FactorGraph fg;
  std::vector<int> var_of(g.size(), -1);
  for (int i = 0; i < g.size(); ++i)
    if (!g.fixed[i]) {
      var_of[i] = static_cast<int>(fg.free_ids.size());
      fg.free_ids.push_back(i);
    }
  const int K = static_cast<int>(st.x.size());
  for (int site : fg.free_ids) {
    (void)site;
    Vector u(K);
    for (int k = 0; k < K; ++k) u(k) = st.log_w(k) + weights::log_single_spin_weight(model, st.x[k], st.n[k]);
    fg.unary.push_back(std::move(u));
  }
  for (const Edge& e : g.edges) {
    EdgeEval& w = edges(e.alpha);
    const int va = var_of[e.a], vb = var_of[e.b];
    if (va < 0 && vb < 0) {
      const XN a = unpack(g.spins[e.a]), b = unpack(g.spins[e.b]);
      fg.constant += w.log_value(a.x, a.n, b.x, b.n);
    } else if (va < 0 || vb < 0) {
      const int v = va < 0 ? vb : va;
      const XN f = unpack(g.spins[va < 0 ? e.a : e.b]);
      const bool fixed_first = va < 0;
      for (int k = 0; k < K; ++k) {
        const double l = fixed_first ? w.log_value(f.x, f.n, st.x[k], st.n[k]) : w.log_value(st.x[k], st.n[k], f.x, f.n);
        fg.unary[v](k) += t * l;
      }
    } else {
      if (va == vb) throw DomainError("SpinGraph: self-loop");
      const bool swap = va > vb;
      const auto key = std::make_pair(std::min(va, vb), std::max(va, vb));
      Matrix m(K, K);
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
          // m(k, l): k indexes key.first, l indexes key.second
          const double lw = swap ? w.log_value(st.x[l], st.n[l], st.x[k], st.n[k])
                                 : w.log_value(st.x[k], st.n[k], st.x[l], st.n[l]);
          m(k, l) = t * lw;
        }
      auto it = fg.pair.find(key);
      if (it == fg.pair.end())
        fg.pair.emplace(key, std::move(m));
      else
        it->second += m;
    }
  }
  return fg;
}

double eliminate(FactorGraph fg) {
  const int nv = static_cast<int>(fg.free_ids.size());
  std::vector<bool> alive(nv, true);
  double total = fg.constant;
  auto neighbours = [&](int v) {
    std::vector<int> nb;
    for (const auto& [key, m] : fg.pair) {
      if (key.first == v) nb.push_back(key.second);
      if (key.second == v) nb.push_back(key.first);
    }
    return nb;
  };
  // Matrix oriented as (v, other).
  auto oriented = [&](int v, int o) -> Matrix {
    const auto key = std::make_pair(std::min(v, o), std::max(v, o));
    const Matrix& m = fg.pair.at(key);
    return key.first == v ? m : Matrix(m.transpose());
  };
  for (int step = 0; step < nv; ++step) {
    int best = -1;
    std::size_t best_deg = 0;
    for (int v = 0; v < nv; ++v) {
      if (!alive[v]) continue;
      const std::size_t d = neighbours(v).size();
      if (best < 0 || d < best_deg) {
        best = v;
        best_deg = d;
      }
    }
    const int v = best;
    const auto nb = neighbours(v);
    if (nb.size() > 2)
      throw TooManyInternalSites("exact_partition: free-site graph needs a vertex of degree > 2 to be eliminated");
    if (nb.empty()) {
      total += log_sum_exp(fg.unary[v]);
    } else if (nb.size() == 1) {
      const int o = nb[0];
      Matrix m = oriented(v, o);  // (v, o)
      m.colwise() += fg.unary[v];
      const Eigen::RowVectorXd mx = m.colwise().maxCoeff();
      Matrix e = (m.rowwise() - mx).array().exp();
      Vector msg = (e.colwise().sum().array().log() + mx.array()).transpose();
      fg.unary[o] += msg;
      fg.pair.erase(std::make_pair(std::min(v, o), std::max(v, o)));
    } else {
      const int a = nb[0], c = nb[1];
      Matrix A = oriented(a, v);  // (a, v)
      A.rowwise() += fg.unary[v].transpose();
      const Matrix B = oriented(v, c);  // (v, c)
      Matrix Q = log_matmul(A, B);     // (a, c)
      fg.pair.erase(std::make_pair(std::min(v, a), std::max(v, a)));
      fg.pair.erase(std::make_pair(std::min(v, c), std::max(v, c)));
      const auto key = std::make_pair(std::min(a, c), std::max(a, c));
      if (key.first != a) Q.transposeInPlace();
      auto it = fg.pair.find(key);
      if (it == fg.pair.end())
        fg.pair.emplace(key, std::move(Q));
      else
        it->second += Q;
    }
    alive[v] = false;
  }
  return total;
}

double log_z_on(const SpinGraph& g, const Model& model, const GridDiscretization& grid, double t,
                EdgeCache& edges) {
  const States st = expand(grid);
  return eliminate(build_factors(g, model, st, t, edges));
}

double log_z_on(const SpinGraph& g, const Model& model, const GridDiscretization& grid, double t) {
  EdgeCache edges(model, EdgeEval::Mode::Memo);
  return log_z_on(g, model, grid, t, edges);
}

constexpr int kMaxFreeSites = 4;

}  // namespace

int SpinGraph::free_sites() const {
  return static_cast<int>(std::count(fixed.begin(), fixed.end(), false));
}

void SpinGraph::validate(const Model& model) const {
  if (fixed.size() != spins.size()) throw ConfigError("SpinGraph: fixed mask and spins differ in length");
  for (const auto& s : spins)
    if (std::holds_alternative<DualSpin>(s) != model.uses_dual_spins())
      throw KindMismatch("SpinGraph: spin kind does not match the model");
  for (const Edge& e : edges) {
    if (e.a < 0 || e.b < 0 || e.a >= size() || e.b >= size()) throw ConfigError("SpinGraph: edge endpoint out of range");
    if (e.a == e.b) throw ConfigError("SpinGraph: self-loop");
    if (!std::isfinite(e.alpha)) throw NaNError("SpinGraph: non-finite spectral value");
  }
}

int LatticeSpec::internal_sites() const { return std::max(0, rows - 2) * std::max(0, cols - 2); }
int LatticeSpec::perimeter_sites() const { return rows * cols - internal_sites(); }

void LatticeSpec::validate(const Model& model) const {
  if (rows < 1 || cols < 1) throw ConfigError("LatticeSpec: rows and cols must be >= 1");
  if (!boundary.empty() && static_cast<int>(boundary.size()) != perimeter_sites())
    throw ConfigError("LatticeSpec: boundary must list exactly the perimeter sites");
  const double eta = model.eta();
  if (!(alpha > 0.0 && alpha < eta)) throw DomainError("LatticeSpec: alpha must lie in (0, eta)");
  for (const auto& s : boundary)
    if (std::holds_alternative<DualSpin>(s) != model.uses_dual_spins())
      throw KindMismatch("LatticeSpec: boundary spin kind does not match the model");
}

SpinGraph LatticeSpec::to_graph(const Model& model) const {
  validate(model);
  SpinGraph g;
  const int n = rows * cols;
  g.spins.resize(n, zero_spin(model));
  g.fixed.resize(n, true);
  int b = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int id = r * cols + c;
      const bool perimeter = r == 0 || c == 0 || r == rows - 1 || c == cols - 1;
      if (perimeter) {
        if (!boundary.empty()) g.spins[id] = boundary[b];
        ++b;
      } else {
        g.fixed[id] = false;
        g.spins[id] = model.uses_dual_spins() ? AnySpin(DualSpin{0.5, 0})
                                              : AnySpin(Spin{model.kind() == ModelKind::Elliptic ? 0.25 * pi : 0.5});
      }
    }
  const double eta = model.eta();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int id = r * cols + c;
      if (c + 1 < cols) g.edges.push_back({id, id + 1, alpha});
      if (r + 1 < rows) g.edges.push_back({id, id + cols, eta - alpha});
    }
  return g;
}

LatticeSpec LatticeSpec::transposed(const Model& model) const {
  validate(model);
  LatticeSpec t;
  t.rows = cols;
  t.cols = rows;
  t.alpha = model.eta() - alpha;
  if (!boundary.empty()) {
    std::map<std::pair<int, int>, AnySpin> at;
    int b = 0;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (r == 0 || c == 0 || r == rows - 1 || c == cols - 1) at.emplace(std::make_pair(r, c), boundary[b++]);
    for (int r = 0; r < t.rows; ++r)
      for (int c = 0; c < t.cols; ++c)
        if (r == 0 || c == 0 || r == t.rows - 1 || c == t.cols - 1) t.boundary.push_back(at.at({c, r}));
  }
  return t;
}

SpinGraph star_graph(const Model& model, const verify::StarConfig& cfg) {
  cfg.validate(model);
  SpinGraph g;
  g.spins = {cfg.outer[0], cfg.outer[1], cfg.outer[2],
             model.uses_dual_spins() ? AnySpin(DualSpin{0.5, 0}) : AnySpin(Spin{0.5})};
  g.fixed = {true, true, true, false};
  const double eta = model.eta();
  for (int i = 0; i < 3; ++i) g.edges.push_back({i, 3, eta - cfg.spectral[i]});
  return g;
}

GridDiscretization GridDiscretization::for_model(const Model& model, int nodes, int n_max, double scale) {
  if (nodes < 2) throw ConfigError("GridDiscretization: nodes must be >= 2");
  if (n_max < 0) throw ConfigError("GridDiscretization: n_max must be >= 0");
  GridDiscretization g;
  switch (model.kind()) {
    case ModelKind::Elliptic:
      // The integrands are pi-periodic and analytic: the trapezoid rule converges geometrically.
      for (int i = 0; i < nodes; ++i) {
        g.x.push_back(pi * (i + 0.5) / nodes);
        g.w.push_back(pi / nodes);
      }
      break;
    case ModelKind::Hyperbolic: {
      // Analytic integrand with exponential decay: the trapezoid rule on a
      // truncated line beats Gauss-Legendre, whose nodes crowd the ends.
      const double X = scale > 0.0 ? scale : std::max(2.0, 3.0 / model.eta());
      g.scale = X;
      const double h = 2.0 * X / nodes;
      for (int i = 0; i < nodes; ++i) {
        g.x.push_back(-X + (i + 0.5) * h);
        g.w.push_back(h);
      }
      break;
    }
    case ModelKind::Gamma: {
      const double c = scale > 0.0 ? scale : 1.5;
      g.scale = c;
      std::vector<double> t, w;
      gauss_legendre(nodes, t, w);
      for (int i = 0; i < nodes; ++i) {
        const double th = 0.5 * pi * t[i];
        const double sec = 1.0 / std::cos(th);
        g.x.push_back(c * std::tan(th));
        g.w.push_back(0.5 * pi * w[i] * c * sec * sec);
      }
      g.n_max = n_max;
      break;
    }
  }
  return g;
}

GridDiscretization GridDiscretization::for_graph(const Model& model, const SpinGraph& graph, int nodes, int n_max) {
  double reach = 0.0;
  for (int i = 0; i < graph.size(); ++i)
    if (graph.fixed[i]) reach = std::max(reach, std::abs(unpack(graph.spins[i]).x));
  switch (model.kind()) {
    case ModelKind::Elliptic:
      return for_model(model, nodes, 0);
    case ModelKind::Hyperbolic:
      return for_model(model, nodes, 0, reach + std::max(2.0, 3.0 / model.eta()));
    case ModelKind::Gamma:
      return for_model(model, nodes, n_max, 1.5 + reach);
  }
  return for_model(model, nodes, n_max);
}

void GridDiscretization::validate() const {
  if (x.empty() || x.size() != w.size()) throw ConfigError("GridDiscretization: nodes and weights must match");
  for (double v : w)
    if (!(v > 0.0)) throw ConfigError("GridDiscretization: weights must be positive");
  if (n_max < 0) throw ConfigError("GridDiscretization: n_max must be >= 0");
}

PartitionResult exact_partition(const SpinGraph& graph, const Model& model, const GridDiscretization& grid,
                                const ExactOptions& opts) {
  graph.validate(model);
  grid.validate();
  if (!model.uses_dual_spins() && grid.n_max != 0)
    throw ConfigError("GridDiscretization: n_max applies to the gamma model only");
  const int nfree = graph.free_sites();
  if (nfree > kMaxFreeSites) {
    std::ostringstream os;
    os << "exact_partition: " << nfree << " free sites (limit " << kMaxFreeSites << ")";
    throw TooManyInternalSites(os.str());
  }
  PartitionResult r;
  r.method = Method::Exact;
  r.internal_sites = nfree;
  r.log_z = log_z_on(graph, model, grid, 1.0);
  if (!std::isfinite(r.log_z)) throw NaNError("exact_partition: log Z is not finite");
  r.per_site = r.log_z / std::max(1, nfree);
  if (opts.estimate_error && nfree > 0) {
    const int nodes = static_cast<int>(grid.x.size());
    // Refine only grids we know how to rebuild; custom grids get no estimate.
    const auto base = GridDiscretization::for_model(model, nodes, grid.n_max, grid.scale);
    if (base.x == grid.x) {
      const auto fine = GridDiscretization::for_model(model, nodes + nodes / 2,
                                                      model.uses_dual_spins() ? grid.n_max + 4 : 0, grid.scale);
      r.error_estimate = std::abs(log_z_on(graph, model, fine, 1.0) - r.log_z);
    }
  }
  return r;
}

PartitionResult exact_partition(const LatticeSpec& spec, const Model& model, const GridDiscretization& grid,
                                const ExactOptions& opts) {
  if (spec.internal_sites() > kMaxFreeSites) {
    std::ostringstream os;
    os << "exact_partition: " << spec.internal_sites() << " internal sites (limit " << kMaxFreeSites << ")";
    throw TooManyInternalSites(os.str());
  }
  return exact_partition(spec.to_graph(model), model, grid, opts);
}

double exact_mean_log_w(const SpinGraph& graph, const Model& model, const GridDiscretization& grid) {
  graph.validate(model);
  int n_edges = 0;
  for (const Edge& e : graph.edges)
    if (!graph.fixed[e.a] || !graph.fixed[e.b]) ++n_edges;
  if (n_edges == 0) throw DomainError("exact_mean_log_w: no edge touches a free site");
  if (graph.free_sites() > kMaxFreeSites) throw TooManyInternalSites("exact_mean_log_w: too many free sites");
  const double h = 1e-4;
  EdgeCache edges(model, EdgeEval::Mode::Memo);
  const double up = log_z_on(graph, model, grid, 1.0 + h, edges);
  const double dn = log_z_on(graph, model, grid, 1.0 - h, edges);
  return (up - dn) / (2.0 * h) / n_edges;
}

void MCConfig::validate() const {
  if (sweeps < 1) throw ConfigError("MCConfig: sweeps must be >= 1");
  if (burn_in < 0 || burn_in >= sweeps) throw ConfigError("MCConfig: burn_in must satisfy 0 <= burn_in < sweeps");
  if (!(x_step >= 0.0)) throw ConfigError("MCConfig: x_step must be >= 0");
  if (!(n_step_prob >= 0.0 && n_step_prob <= 1.0)) throw ConfigError("MCConfig: n_step_prob must lie in [0, 1]");
  if (trace_every < 0) throw ConfigError("MCConfig: trace_every must be >= 0");
}

Observables mc_run(const SpinGraph& graph, const Model& model, const MCConfig& mc) {
  graph.validate(model);
  mc.validate();
  const int ns = graph.size();
  std::vector<double> x(ns);
  std::vector<long> n(ns);
  for (int i = 0; i < ns; ++i) {
    const XN v = unpack(graph.spins[i]);
    x[i] = v.x;
    n[i] = v.n;
  }
  const bool elliptic = model.kind() == ModelKind::Elliptic;
  const bool dual = model.uses_dual_spins();

  EdgeCache cache(model, EdgeEval::Mode::Spline);
  std::vector<EdgeEval*> ew;
  for (const Edge& e : graph.edges) ew.push_back(&cache(e.alpha));
  std::vector<std::vector<int>> incident(ns);
  std::vector<int> free_edges;
  for (int k = 0; k < static_cast<int>(graph.edges.size()); ++k) {
    const Edge& e = graph.edges[k];
    incident[e.a].push_back(k);
    incident[e.b].push_back(k);
    if (!graph.fixed[e.a] || !graph.fixed[e.b]) free_edges.push_back(k);
  }
  std::vector<int> free_ids;
  for (int i = 0; i < ns; ++i)
    if (!graph.fixed[i]) free_ids.push_back(i);
  if (free_ids.empty()) throw DomainError("mc_run: no free sites");

  auto edge_log = [&](int k) {
    const Edge& e = graph.edges[k];
    const double l = ew[k]->log_value(x[e.a], n[e.a], x[e.b], n[e.b]);
    if (!std::isfinite(l)) throw RealityViolation("mc_run: non-positive edge weight encountered");
    return l;
  };
  auto local = [&](int site) {
    double l = weights::log_single_spin_weight(model, x[site], n[site]);
    for (int k : incident[site]) l += edge_log(k);
    return l;
  };

  std::mt19937_64 rng(mc.seed);
  std::normal_distribution<double> step(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Observables obs;
  std::int64_t proposals = 0, accepted = 0, n_moves = 0;
  for (int sweep = 0; sweep < mc.sweeps; ++sweep) {
    for (int site : free_ids) {
      const double x_old = x[site];
      const long n_old = n[site];
      const double l_old = local(site);
      double x_new = x_old + mc.x_step * step(rng);
      if (elliptic) x_new = weights::canonical_spin(x_new);
      long n_new = n_old;
      if (dual && unif(rng) < mc.n_step_prob) n_new += unif(rng) < 0.5 ? -1 : 1;
      x[site] = x_new;
      n[site] = n_new;
      const double l_new = local(site);
      ++proposals;
      const double d = l_new - l_old;
      if (d >= 0.0 || unif(rng) < std::exp(d)) {
        ++accepted;
        if (n_new != n_old) ++n_moves;
      } else {
        x[site] = x_old;
        n[site] = n_old;
      }
    }
    if (sweep >= mc.burn_in) {
      double s = 0.0;
      for (int k : free_edges) s += edge_log(k);
      obs.series.push_back(free_edges.empty() ? 0.0 : s / static_cast<double>(free_edges.size()));
      if (mc.trace_every > 0 && (sweep - mc.burn_in) % mc.trace_every == 0)
        for (int site : free_ids) {
          obs.trace.push_back(x[site]);
          obs.trace.push_back(static_cast<double>(n[site]));
        }
    }
  }
  obs.acceptance = static_cast<double>(accepted) / static_cast<double>(proposals);

  const auto& s = obs.series;
  const std::size_t N = s.size();
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(N);
  obs.mean_log_w = mean;
  double c0 = 0.0;
  for (double v : s) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(N);
  // Integrated autocorrelation time with Sokal's automatic window (c = 6).
  double tau = 0.5;
  if (c0 > 0.0) {
    for (std::size_t t = 1; t < N / 2; ++t) {
      double ct = 0.0;
      for (std::size_t i = 0; i + t < N; ++i) ct += (s[i] - mean) * (s[i + t] - mean);
      ct /= static_cast<double>(N - t);
      tau += ct / c0;
      if (static_cast<double>(t) >= 6.0 * tau) break;
    }
  }
  obs.tau_int = std::max(tau, 0.5);
  // Batch means with 32 batches.
  const std::size_t nb = 32;
  if (N >= 2 * nb) {
    const std::size_t len = N / nb;
    std::vector<double> bm(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t i = 0; i < len; ++i) bm[b] += s[b * len + i];
      bm[b] /= static_cast<double>(len);
    }
    double bmean = 0.0;
    for (double v : bm) bmean += v;
    bmean /= nb;
    double var = 0.0;
    for (double v : bm) var += (v - bmean) * (v - bmean);
    var /= static_cast<double>(nb - 1);
    obs.std_error = std::sqrt(var / nb);
  } else {
    obs.std_error = std::sqrt(2.0 * obs.tau_int * c0 / static_cast<double>(N));
  }

  if (obs.acceptance < 0.01) obs.warnings.push_back("ErgodicityWarning: acceptance rate below 1%");
  if (dual && mc.n_step_prob > 0.0 && n_moves == 0)
    obs.warnings.push_back("ErgodicityWarning: integer spin components never moved");
  return obs;
}

Observables mc_run(const LatticeSpec& spec, const Model& model, const MCConfig& mc) {
  return mc_run(spec.to_graph(model), model, mc);
}

std::vector<double> free_energy_trend(const std::vector<LatticeSpec>& specs, const Model& model,
                                      const GridDiscretization& grid) {
  std::vector<double> out;
  out.reserve(specs.size());
  ExactOptions opts;
  opts.estimate_error = false;
  for (const auto& s : specs) out.push_back(exact_partition(s, model, grid, opts).per_site);
  return out;
}

}  // namespace yblab::lattice
