#include "radsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace radsim {

void ParamSpec::validate() const {
  if (entries.empty()) throw std::invalid_argument("param spec: no parameters");
  for (const ParamEntry& e : entries) {
    if (!(e.lower < e.upper))
      throw std::invalid_argument("param '" + e.name + "': lower must be < upper");
    if (!(e.initial >= e.lower && e.initial <= e.upper))
      throw std::invalid_argument("param '" + e.name + "': initial must be within bounds");
  }
}

std::vector<double> ParamSpec::initial_values() const {
  std::vector<double> v;
  v.reserve(entries.size());
  for (const ParamEntry& e : entries) v.push_back(e.initial);
  return v;
}

std::vector<double> ParamSpec::clamp(std::vector<double> values) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    values[i] = std::clamp(values[i], entries[i].lower, entries[i].upper);
  return values;
}

namespace {

struct Best {
  std::vector<double> values;
  double objective = -std::numeric_limits<double>::infinity();

  void offer(const std::vector<double>& v, double f) {
    if (f > objective) {
      objective = f;
      values = v;
    }
  }
};

}  // namespace

CalibrationResult nelder_mead(const Objective& objective, const ParamSpec& spec, int max_evals,
                              double tolerance) {
  spec.validate();
  const int dim = int(spec.size());
  if (max_evals < dim + 1)
    throw std::invalid_argument("nelder_mead: max_evals must be >= dim + 1");

  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  CalibrationResult result;
  Best best;
  int evals = 0;
  auto eval = [&](const std::vector<double>& v) {
    double f = objective(v);
    ++evals;
    best.offer(v, f);
    return f;
  };

  // Initial simplex: the spec point plus one step per axis, kept inside the box.
  std::vector<std::vector<double>> xs;
  std::vector<double> fs;
  std::vector<double> x0 = spec.initial_values();
  xs.push_back(x0);
  fs.push_back(eval(x0));
  for (int i = 0; i < dim && evals < max_evals; ++i) {
    std::vector<double> xi = x0;
    double step = 0.2 * (spec.entries[i].upper - spec.entries[i].lower);
    xi[i] = (xi[i] + step <= spec.entries[i].upper) ? xi[i] + step : xi[i] - step;
    xs.push_back(spec.clamp(xi));
    fs.push_back(eval(xs.back()));
  }

  auto record_iteration = [&] { result.trace.push_back(best.objective); };
  record_iteration();

  while (evals < max_evals && int(xs.size()) == dim + 1) {
    // Descending objective: index 0 best, index dim worst.
    std::vector<int> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] > fs[b]; });
    std::vector<std::vector<double>> xs2(xs.size());
    std::vector<double> fs2(fs.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      xs2[k] = xs[idx[k]];
      fs2[k] = fs[idx[k]];
    }
    xs.swap(xs2);
    fs.swap(fs2);

    if (fs.front() - fs.back() < tolerance) break;

    std::vector<double> centroid(dim, 0.0);
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i) centroid[i] += xs[k][i] / dim;

    auto along = [&](double coeff) {
      std::vector<double> p(dim);
      for (int i = 0; i < dim; ++i) p[i] = centroid[i] + coeff * (centroid[i] - xs[dim][i]);
      return spec.clamp(p);
    };

    std::vector<double> xr = along(kReflect);
    double fr = eval(xr);
    if (fr > fs[0]) {
      if (evals < max_evals) {
        std::vector<double> xe = along(kExpand);
        double fe = eval(xe);
        if (fe > fr) {
          xs[dim] = xe;
          fs[dim] = fe;
        } else {
          xs[dim] = xr;
          fs[dim] = fr;
        }
      } else {
        xs[dim] = xr;
        fs[dim] = fr;
      }
    } else if (fr > fs[dim - 1]) {
      xs[dim] = xr;
      fs[dim] = fr;
    } else if (evals < max_evals) {
      bool outside = fr > fs[dim];
      std::vector<double> xc(dim);
      const std::vector<double>& towards = outside ? xr : xs[dim];
      for (int i = 0; i < dim; ++i) xc[i] = centroid[i] + kContract * (towards[i] - centroid[i]);
      xc = spec.clamp(xc);
      double fc = eval(xc);
      if (fc > (outside ? fr : fs[dim])) {
        xs[dim] = xc;
        fs[dim] = fc;
      } else {
        for (int k = 1; k <= dim && evals < max_evals; ++k) {
          for (int i = 0; i < dim; ++i) xs[k][i] = xs[0][i] + kShrink * (xs[k][i] - xs[0][i]);
          xs[k] = spec.clamp(xs[k]);
          fs[k] = eval(xs[k]);
        }
      }
    }
    record_iteration();
  }

  result.best_values = best.values;
  result.best_objective = best.objective;
  result.evaluations = evals;
  return result;
}

CalibrationResult grid_search(const Objective& objective, const ParamSpec& spec,
                              int points_per_dim) {
  spec.validate();
  if (points_per_dim < 2) throw std::invalid_argument("grid_search: points_per_dim must be >= 2");
  const int dim = int(spec.size());

  CalibrationResult result;
  Best best;
  std::vector<int> counter(dim, 0);
  while (true) {
    std::vector<double> v(dim);
    for (int i = 0; i < dim; ++i) {
      const ParamEntry& e = spec.entries[i];
      v[i] = e.lower + (e.upper - e.lower) * counter[i] / (points_per_dim - 1);
    }
    best.offer(v, objective(v));
    ++result.evaluations;
    result.trace.push_back(best.objective);

    int i = 0;
    for (; i < dim; ++i) {
      if (++counter[i] < points_per_dim) break;
      counter[i] = 0;
    }
    if (i == dim) break;
  }

  result.best_values = best.values;
  result.best_objective = best.objective;
  return result;
}

}  // namespace radsim
