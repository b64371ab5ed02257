#include "qam/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "qam/error.hpp"

namespace qam {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// QUADPACK qk15 abscissae and weights
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  QuadResult r;
  bool operator<(const Panel& o) const { return r.error < o.r.error; }
};

}  // namespace

QuadResult gauss_kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fv1[7], fv2[7];
  const double fc = f(c);
  double resg = fc * wg[3];
  double resk = fc * wgk[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 3; ++j) {
    const int jj = 2 * j + 1;
    const double x = h * xgk[jj];
    const double f1 = f(c - x), f2 = f(c + x);
    fv1[jj] = f1;
    fv2[jj] = f2;
    resg += wg[j] * (f1 + f2);
    resk += wgk[jj] * (f1 + f2);
    resabs += wgk[jj] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jj = 2 * j;
    const double x = h * xgk[jj];
    const double f1 = f(c - x), f2 = f(c + x);
    fv1[jj] = f1;
    fv2[jj] = f2;
    resk += wgk[jj] * (f1 + f2);
    resabs += wgk[jj] * (std::abs(f1) + std::abs(f2));
  }
  const double reskh = 0.5 * resk;
  double resasc = wgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  QuadResult r;
  r.value = resk * h;
  r.evaluations = 15;
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
  r.error = err;
  if (!std::isfinite(r.value)) {
    r.error = std::numeric_limits<double>::infinity();
    r.converged = false;
  }
  return r;
}

std::array<QuadNode, 15> kronrod15_nodes(double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::array<QuadNode, 15> out;
  out[0] = {c, h * wgk[7]};
  for (int j = 0; j < 7; ++j) {
    out[1 + 2 * j] = {c - h * xgk[j], h * wgk[j]};
    out[2 + 2 * j] = {c + h * xgk[j], h * wgk[j]};
  }
  return out;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt) {
  if (a == b) return {};
  std::priority_queue<Panel> heap;
  QuadResult first = gauss_kronrod15(f, a, b);
  QuadResult total = first;
  heap.push({a, b, first});
  int intervals = 1;
  auto done = [&] { return total.error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total.value)); };
  while (!done()) {
    if (intervals >= opt.max_intervals) {
      total.converged = false;
      break;
    }
    Panel p = heap.top();
    const double m = 0.5 * (p.a + p.b);
    // panel at roundoff scale: divergent or too singular (QUADPACK ier = 3)
    if (p.b - p.a <= 100.0 * kEps * std::max(std::abs(p.a), std::abs(p.b)) + 1000.0 * std::numeric_limits<double>::min() ||
        m == p.a || m == p.b) {
      total.converged = false;
      break;
    }
    heap.pop();
    const QuadResult l = gauss_kronrod15(f, p.a, m), r = gauss_kronrod15(f, m, p.b);
    total.value += l.value + r.value - p.r.value;
    total.error += l.error + r.error - p.r.error;
    total.evaluations += l.evaluations + r.evaluations;
    heap.push({p.a, m, l});
    heap.push({m, p.b, r});
    ++intervals;
    if (!std::isfinite(total.value)) {
      total.converged = false;
      break;
    }
  }
  // recompute the sums to shed accumulated cancellation
  double v = 0.0, e = 0.0;
  while (!heap.empty()) {
    v += heap.top().r.value;
    e += heap.top().r.error;
    heap.pop();
  }
  total.value = v;
  total.error = e;
  if (total.converged) total.converged = done();
  return total;
}

QuadResult integrate_semi_infinite(const std::function<double(double)>& f, const QuadOptions& opt,
                                   const TailHints& hints) {
  if (!(hints.origin_exponent > -1.0)) throw DomainError("quadrature: origin exponent must exceed -1");
  QuadResult head;
  if (hints.origin_exponent < 0.0) {
    const double beta = 1.0 + hints.origin_exponent;
    const double inv = 1.0 / beta;
    head = integrate([&](double v) { return f(std::pow(v, inv)) * inv * std::pow(v, inv - 1.0); }, 0.0, 1.0, opt);
  } else {
    head = integrate(f, 0.0, 1.0, opt);
  }
  QuadResult tail;
  if (hints.tail_power > 1.0) {
    const double s = 1.0 / (hints.tail_power - 1.0);
    tail = integrate(
        [&](double w) {
          const double tau = std::pow(w, -s);
          const double jac = s * std::pow(w, -s - 1.0);
          return std::isfinite(jac) ? f(tau) * jac : 0.0;
        },
        0.0, 1.0, opt);
  } else {
    tail = integrate(
        [&](double t) {
          const double om = 1.0 - t;
          const double jac = 1.0 / (om * om);
          return std::isfinite(jac) ? f(1.0 + t / om) * jac : 0.0;
        },
        0.0, 1.0, opt);
  }
  QuadResult r;
  r.value = head.value + tail.value;
  r.error = head.error + tail.error;
  r.evaluations = head.evaluations + tail.evaluations;
  r.converged = head.converged && tail.converged;
  return r;
}

}  // namespace qam
