#include "yblab/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace yblab::quad {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Segment {
  double lo;
  double hi;
  Complex value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const Integrand& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const Complex fc = f(center);
  Complex resk = fc * kWgk[7];
  Complex resg = fc * kWg[3];
  double resabs = std::abs(fc) * kWgk[7];
  std::array<Complex, 15> fv{};
  fv[7] = fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const Complex f1 = f(center - dx);
    const Complex f2 = f(center + dx);
    fv[j] = f1;
    fv[14 - j] = f2;
    resk += (f1 + f2) * kWgk[j];
    resabs += (std::abs(f1) + std::abs(f2)) * kWgk[j];
    if (j % 2 == 1) resg += (f1 + f2) * kWg[j / 2];
  }
  const Complex mean = resk * 0.5;
  double resasc = std::abs(fc - mean) * kWgk[7];
  for (int j = 0; j < 7; ++j)
    resasc += (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean)) * kWgk[j];
  resk *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(resk.real()) || !std::isfinite(resk.imag()))
    throw NaNError("quadrature: integrand returned a non-finite value");
  return {lo, hi, resk, err};
}

}  // namespace

void TailPolicy::validate() const {
  if (!(initial_cutoff > 0.0)) throw ConfigError("TailPolicy: initial_cutoff must be > 0");
  if (!(growth_factor >= 1.5)) throw ConfigError("TailPolicy: growth_factor must be >= 1.5");
  if (!(stop_rel > 0.0)) throw ConfigError("TailPolicy: stop_rel must be > 0");
}

QuadResult integrate_finite(const Integrand& f, Interval iv, const PrecisionBudget& budget) {
  budget.validate();
  if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
    throw DomainError("integrate_finite: interval must satisfy lo < hi, both finite");

  std::priority_queue<Segment> heap;
  Segment first = gk15(f, iv.lo, iv.hi);
  Complex total = first.value;
  double total_err = first.error;
  std::int64_t evals = 15;
  heap.push(first);

  auto target = [&] { return std::max(budget.abs_tol, budget.rel_tol * std::abs(total)); };
  int segments = 1;
  while (total_err > target()) {
    if (segments >= budget.max_refinements)
      throw BudgetExhausted("integrate_finite: subdivision budget exhausted (error " +
                                sci(total_err) + ")",
                            total.real(), total_err);
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval can no longer be split in double precision; keep it.
      throw BudgetExhausted("integrate_finite: interval collapsed below machine resolution",
                            total.real(), total_err);
    }
    Segment left = gk15(f, worst.lo, mid);
    Segment right = gk15(f, mid, worst.hi);
    evals += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
    if (segments % 64 == 0) {
      // Re-sum to avoid drift from repeated subtraction.
      std::vector<Segment> all;
      all.reserve(heap.size());
      Complex v{};
      double e = 0.0;
      while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
      }
      std::sort(all.begin(), all.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
      for (const auto& s : all) {
        v += s.value;
        e += s.error;
        heap.push(s);
      }
      total = v;
      total_err = e;
    }
  }
  return {total, total_err, evals, 0.0};
}

QuadResult integrate_line(const Integrand& f, const TailPolicy& tail, const PrecisionBudget& budget) {
  tail.validate();
  budget.validate();
  double cutoff = tail.initial_cutoff;
  QuadResult core = integrate_finite(f, {-cutoff, cutoff}, budget);
  Complex value = core.value;
  double err = core.error_estimate;
  std::int64_t evals = core.evaluations;
  double last_increment = std::abs(value);

  for (int step = 0; step < tail.max_growth; ++step) {
    const double next = cutoff * tail.growth_factor;
    PrecisionBudget shell = budget;
    shell.abs_tol = std::max(budget.abs_tol, 0.01 * tail.stop_rel * std::abs(value));
    const QuadResult left = integrate_finite(f, {-next, -cutoff}, shell);
    const QuadResult right = integrate_finite(f, {cutoff, next}, shell);
    const Complex increment = left.value + right.value;
    value += increment;
    err += left.error_estimate + right.error_estimate;
    evals += left.evaluations + right.evaluations;
    cutoff = next;
    last_increment = std::abs(increment);
    if (last_increment <= tail.stop_rel * std::abs(value) || last_increment <= budget.abs_tol) {
      // The last shell bounds the remaining tail for the monotone decays we
      // integrate (exactly for exponential, to within a factor ~1 for power laws).
      return {value, err + last_increment, evals, cutoff};
    }
  }
  throw TailNotDecaying("integrate_line: tail increments did not fall below stop_rel after " +
                        std::to_string(tail.max_growth) + " growth steps (last increment " +
                        sci(last_increment) + ")");
}

double power_law_tail(double shell_prev, double shell_last, double n_last) {
  if (shell_last == 0.0) return 0.0;
  if (!(shell_prev > shell_last) || n_last < 2.0) return std::numeric_limits<double>::infinity();
  const double s = std::log(shell_prev / shell_last) / std::log(n_last / (n_last - 1.0));
  if (!(s > 1.0)) return std::numeric_limits<double>::infinity();
  // sum_{n > N} C n^-s ~ C N^(1-s) / (s - 1) with C = shell(N) N^s.
  return shell_last * n_last / (s - 1.0);
}

QuadResult sum_bilateral(const Term& term, const TailPolicy& tail, const PrecisionBudget& budget) {
  tail.validate();
  budget.validate();
  Complex value = term(0);
  std::int64_t evals = 1;
  std::int64_t n = 0;
  double shell_prev = std::numeric_limits<double>::infinity();
  double shell_last = std::abs(value);
  auto cutoff = static_cast<std::int64_t>(std::ceil(tail.initial_cutoff));
  Complex since_check{};
  double last_tail = std::numeric_limits<double>::infinity();

  for (int step = 0; step <= tail.max_growth; ++step) {
    since_check = {};
    while (n < cutoff) {
      ++n;
      const Complex shell = term(n) + term(-n);
      evals += 2;
      value += shell;
      since_check += shell;
      shell_prev = shell_last;
      shell_last = std::abs(shell);
      if (n >= budget.max_terms)
        throw ConvergenceError("sum_bilateral: max_terms reached before convergence");
    }
    last_tail = power_law_tail(shell_prev, shell_last, static_cast<double>(n));
    const double scale = std::abs(value);
    const double thresh = std::max(tail.stop_rel * scale, budget.abs_tol);
    if (step > 0 && std::abs(since_check) <= thresh && last_tail <= thresh)
      return {value, last_tail, evals, static_cast<double>(n)};
    cutoff = static_cast<std::int64_t>(std::ceil(static_cast<double>(cutoff) * tail.growth_factor));
  }
  throw TailNotDecaying("sum_bilateral: shells did not decay within the growth budget (fitted tail " +
                        sci(last_tail) + ")");
}

}  // namespace yblab::quad
