#include "qam/compose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "qam/error.hpp"

namespace qam {

double Weights::sum() const noexcept {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

void Weights::validate(WeightRule rule) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      std::ostringstream os;
      os << "weights: theta[" << i << "] = " << values[i] << " must be finite and >= 0";
      throw ParameterError(os.str());
    }
  }
  switch (rule) {
    case WeightRule::sum_to_one:
      if (std::abs(sum() - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "weights: sum_to_one rule requires sum(theta) = 1, got " << sum();
        throw ParameterError(os.str());
      }
      break;
    case WeightRule::trivial_ones:
      for (double v : values) {
        if (v != 1.0) throw ParameterError("weights: trivial_ones rule requires every theta = 1");
      }
      break;
    case WeightRule::unconstrained:
      break;
  }
}

std::size_t CompositionSpec::dim() const {
  std::size_t d = 0;
  if (partition.empty()) {
    for (const auto& c : children) d += c.dim();
  } else {
    for (auto p : partition) d += p;
  }
  return d;
}

void CompositionSpec::validate() const {
  if (children.size() < 2) throw ParameterError("composition: at least 2 children required");
  if (weights.size() != children.size()) {
    std::ostringstream os;
    os << "composition: " << weights.size() << " weights for " << children.size() << " children";
    throw ParameterError(os.str());
  }
  if (!partition.empty()) {
    if (partition.size() != children.size()) {
      throw ParameterError("composition: partition length does not match the number of children");
    }
    for (std::size_t i = 0; i < children.size(); ++i) {
      if (partition[i] != children[i].dim()) {
        std::ostringstream os;
        os << "composition: partition d[" << i << "] = " << partition[i] << " but child " << i
           << " (" << children[i].name() << ") has dimension " << children[i].dim();
        throw ParameterError(os.str());
      }
    }
  }
  weights.validate(rule());
}

double quasi_arithmetic(const Generator& g, std::span<const double> values,
                        std::span<const double> weights) {
  const Interval& dom = g.inv_domain();
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!dom.contains(values[i])) {
      std::ostringstream os;
      os << "composition " << g.name() << ": child " << i << " value " << values[i]
         << " outside the domain of phi^-1";
      throw DomainError(os.str());
    }
    if (weights[i] == 0.0) continue;  // avoids 0 * inf
    s += weights[i] * g.phi_inv(values[i]);
  }
  return g.phi(s);
}

namespace {

struct Composed {
  Generator generator;
  std::vector<Kernel> children;
  std::vector<double> theta;

  double operator()(std::span<const double> x) const {
    double buf[16];
    std::vector<double> heap;
    double* v = buf;
    if (children.size() > 16) {
      heap.resize(children.size());
      v = heap.data();
    }
    std::size_t offset = 0;
    for (std::size_t i = 0; i < children.size(); ++i) {
      const std::size_t d = children[i].dim();
      v[i] = children[i].eval(x.subspan(offset, d));
      offset += d;
    }
    return quasi_arithmetic(generator, {v, children.size()}, theta);
  }
};

std::string composed_name(const Generator& g, const std::vector<Kernel>& children) {
  std::string name = "Q[" + g.name() + "](";
  for (std::size_t i = 0; i < children.size(); ++i) name += (i ? ", " : "") + children[i].name();
  return name + ")";
}

}  // namespace

Kernel compose(const CompositionSpec& spec) {
  spec.validate();
  const std::size_t dim = spec.dim();
  return Kernel(composed_name(spec.generator, spec.children), dim,
                Composed{spec.generator, spec.children, spec.weights.values});
}

Kernel nest(const Generator& outer, const CompositionSpec& inner,
            const std::vector<Kernel>& extra_children, const Weights& weights,
            const std::vector<std::size_t>& partition) {
  Kernel inner_kernel = compose(inner);
  std::vector<Kernel> children{inner_kernel};
  children.insert(children.end(), extra_children.begin(), extra_children.end());
  if (weights.size() != children.size()) {
    std::ostringstream os;
    os << "nest: " << weights.size() << " outer weights for " << children.size()
       << " outer children (inner block + extras)";
    throw ParameterError(os.str());
  }
  if (!partition.empty()) {
    if (partition.size() != children.size()) {
      throw ParameterError("nest: outer partition length does not match inner block + extra children");
    }
    for (std::size_t i = 0; i < children.size(); ++i) {
      if (partition[i] != children[i].dim()) {
        std::ostringstream os;
        os << "nest: outer partition d[" << i << "] = " << partition[i] << " but block " << i
           << " has dimension " << children[i].dim();
        throw ParameterError(os.str());
      }
    }
  }
  weights.validate(outer.weight_rule() == WeightRule::sum_to_one ? WeightRule::sum_to_one
                                                                 : WeightRule::unconstrained);
  std::size_t dim = 0;
  for (const auto& c : children) dim += c.dim();
  return Kernel(composed_name(outer, children), dim, Composed{outer, std::move(children), weights.values});
}

SubadditivityReport check_subadditive(const Generator& g1, const Generator& g2,
                                      std::span<const double> grid) {
  auto g = [&](double t) { return g1.phi_inv(g2.phi(t)); };
  std::vector<double> gv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gv[i] = g(grid[i]);

  SubadditivityReport rep;
  rep.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i; j < grid.size(); ++j) {
      const double rhs = gv[i] + gv[j];
      const double excess = g(grid[i] + grid[j]) - rhs;
      rep.worst_excess = std::max(rep.worst_excess, excess);
      // 1e-12 absolute, scaled for large values where round-trip error dominates
      if (excess > 1e-12 * std::max(1.0, std::abs(rhs)) && rep.holds) {
        rep.holds = false;
        rep.witness = std::make_pair(grid[i], grid[j]);
      }
    }
  }
  return rep;
}

OrderingReport ordering_report(const std::vector<CompositionSpec>& specs, const PointSet& points) {
  if (specs.empty()) throw ParameterError("ordering_report: no specs");
  const CompositionSpec& ref = specs.front();
  for (const auto& s : specs) {
    s.validate();
    bool same = s.children.size() == ref.children.size() && s.weights.values == ref.weights.values &&
                s.dim() == ref.dim();
    for (std::size_t i = 0; same && i < s.children.size(); ++i) {
      same = s.children[i].name() == ref.children[i].name() && s.children[i].dim() == ref.children[i].dim();
    }
    if (!same) throw ParameterError("ordering_report: specs must share children, weights and partition");
  }
  if (points.dim() != ref.dim()) throw DomainError("ordering_report: point dimension does not match specs");

  const std::size_t m = specs.size();
  OrderingReport rep;
  rep.leq.assign(m, std::vector<bool>(m, true));
  rep.above_geometric.assign(m, true);
  rep.below_arithmetic.assign(m, true);
  std::vector<Kernel> kernels;
  for (const auto& s : specs) {
    kernels.push_back(compose(s));
    rep.names.push_back(s.generator.name());
  }

  const auto& theta = ref.weights.values;
  std::vector<double> q(m), f(ref.children.size());
  auto flag = [&](std::vector<bool>::reference ok, auto&& relation, std::span<const double> x,
                  double excess) {
    if (excess > kOrderingSlack && ok) {
      ok = false;
      rep.violations.push_back({relation(), {x.begin(), x.end()}, excess});
    }
  };
  auto q_name = [](std::size_t k) { return "Q[" + std::to_string(k) + "]"; };

  for (std::size_t p = 0; p < points.size(); ++p) {
    auto x = points[p];
    std::size_t offset = 0;
    double log_g = 0.0, arith = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::size_t d = ref.children[i].dim();
      f[i] = ref.children[i].eval(x.subspan(offset, d));
      offset += d;
      if (theta[i] == 0.0) continue;
      log_g += theta[i] * std::log(f[i]);
      arith += theta[i] * f[i];
    }
    const double geo = std::exp(log_g);
    for (std::size_t k = 0; k < m; ++k) q[k] = kernels[k].eval(x);
    for (std::size_t k = 0; k < m; ++k) {
      flag(rep.above_geometric[k], [&] { return "Q_G <= " + q_name(k); }, x, geo - q[k]);
      flag(rep.below_arithmetic[k], [&] { return q_name(k) + " <= Q_A"; }, x, q[k] - arith);
      for (std::size_t j = 0; j < m; ++j) {
        if (j == k) continue;
        flag(rep.leq[k][j], [&] { return q_name(k) + " <= " + q_name(j); }, x, q[k] - q[j]);
      }
    }
  }
  return rep;
}

}  // namespace qam
