#include "mmot/cost.hpp"

#include <cstring>
#include <fstream>

#include "mmot/errors.hpp"
#include "mmot/parallel.hpp"

namespace mmot {

std::size_t shape_total(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

std::vector<std::size_t> shape_strides(const std::vector<int>& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i)
    strides[i] = strides[i + 1] * static_cast<std::size_t>(shape[i + 1]);
  return strides;
}

std::vector<int> unflatten_index(const std::vector<int>& shape, std::size_t flat) {
  std::vector<int> idx(shape.size());
  for (int i = static_cast<int>(shape.size()) - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % static_cast<std::size_t>(shape[i]));
    flat /= static_cast<std::size_t>(shape[i]);
  }
  return idx;
}

std::size_t flatten_index(const std::vector<int>& shape,
                          const std::vector<int>& idx) {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < shape.size(); ++i)
    flat = flat * static_cast<std::size_t>(shape[i]) +
           static_cast<std::size_t>(idx[i]);
  return flat;
}

CostTensor CostTensor::from_values(const ManifoldSpec& spec,
                                   std::vector<int> shape,
                                   std::vector<double> values) {
  if (shape_total(shape) != values.size())
    throw ConfigError("cost tensor value count does not match its shape");
  CostTensor t;
  t.spec = spec;
  t.shape = std::move(shape);
  t.values = std::move(values);
  return t;
}

CostEvaluation evaluate(const ManifoldSpec& spec, const CostFamily& family,
                        const std::vector<ManifoldPoint>& tuple,
                        const KarcherOptions& opts) {
  KarcherProblem prob{spec, tuple, {}, family};
  const KarcherResult res = solve(prob, opts);
  CostEvaluation ev;
  ev.value = res.value;
  ev.ybar = res.minimizers.front();  // lexicographically smallest
  ev.unique = res.unique;
  ev.min_cut_margin = res.min_cut_margin;
  return ev;
}

CostTensor build_tensor(const ManifoldSpec& spec, const CostFamily& family,
                        const std::vector<DiscreteMeasure>& measures,
                        const CostTensorOptions& opts) {
  if (measures.size() < 2) throw ConfigError("need at least two marginals");
  if (family.size() != measures.size())
    throw ConfigError("cost family size must match the marginal count");
  for (const auto& mu : measures) {
    mu.validate();
    if (!(mu.spec == spec))
      throw ConfigError("all marginals must live on the tensor's manifold");
  }

  CostTensor t;
  t.spec = spec;
  t.family = family;
  for (const auto& mu : measures) t.shape.push_back(mu.size());
  const std::size_t total = t.total();
  if (total > opts.size_cap)
    throw SizeCapError("cost tensor exceeds the configured size cap");

  t.values.assign(total, 0.0);
  t.argmin.assign(total, ManifoldPoint{});
  t.unique_flags.assign(total, 1);

  const int m = t.order();
  parallel_for(total, [&](std::size_t begin, std::size_t end) {
    std::vector<ManifoldPoint> tuple(m);
    for (std::size_t flat = begin; flat < end; ++flat) {
      const std::vector<int> idx = unflatten_index(t.shape, flat);
      for (int i = 0; i < m; ++i)
        tuple[i] = measures[static_cast<std::size_t>(i)].points[static_cast<std::size_t>(idx[i])];
      KarcherOptions ko = opts.karcher;
      ko.seed = mix_seed(opts.karcher.seed, flat);  // entry-local stream
      const CostEvaluation ev = evaluate(spec, family, tuple, ko);
      t.values[flat] = ev.value;
      t.argmin[flat] = ev.ybar;
      t.unique_flags[flat] = ev.unique ? 1 : 0;
    }
  });
  return t;
}

TangentVector cost_gradient_x1(const ManifoldSpec& spec,
                               const CostFamily& family,
                               const std::vector<ManifoldPoint>& tuple,
                               const CostEvaluation& eval) {
  if (!eval.unique)
    throw NonUniqueError("cost gradient is undefined at a tied minimizer");
  const ManifoldPoint& x1 = tuple.front();
  const double d = distance(spec, x1, eval.ybar);
  if (d == 0.0)
    return TangentVector{x1, Vec::Zero(spec.ambient_dim())};
  const TangentVector lg = log_map(spec, x1, eval.ybar);
  return TangentVector{x1, -family.front().derivative_over_t(d) * lg.components};
}

ManifoldPoint reconstruct_minimizer(const ManifoldSpec& spec,
                                    const CostFunction& f1,
                                    const ManifoldPoint& x1,
                                    const TangentVector& grad) {
  const double gnorm = grad.norm();
  if (gnorm == 0.0) return x1;
  const double d = f1.derivative_inverse(gnorm);
  TangentVector step{x1, grad.components * (-d / gnorm)};
  return exp_map(spec, x1, step);
}

void CostTensor::write_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  const char magic[8] = {'M', 'M', 'O', 'T', 'T', 'E', 'N', 'S'};
  out.write(magic, 8);
  const std::uint32_t version = 1;
  const std::uint32_t order = static_cast<std::uint32_t>(shape.size());
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&order), 4);
  for (int s : shape) {
    const std::uint64_t v = static_cast<std::uint64_t>(s);
    out.write(reinterpret_cast<const char*>(&v), 8);
  }
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) throw ConfigError("short write to " + path);
}

CostTensor CostTensor::read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "MMOTTENS", 8) != 0)
    throw ConfigError(path + " is not a cost tensor dump");
  std::uint32_t version = 0, order = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&order), 4);
  if (!in || version != 1) throw ConfigError("unsupported tensor dump version");
  CostTensor t;
  for (std::uint32_t i = 0; i < order; ++i) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    t.shape.push_back(static_cast<int>(v));
  }
  t.values.resize(shape_total(t.shape));
  in.read(reinterpret_cast<char*>(t.values.data()),
          static_cast<std::streamsize>(t.values.size() * sizeof(double)));
  if (!in) throw ConfigError("truncated tensor dump " + path);
  return t;
}

void CostTensor::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out.precision(17);
  for (int i = 0; i < order(); ++i) out << "i" << (i + 1) << ",";
  out << "value,unique\n";
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    for (int v : unflatten_index(shape, flat)) out << v << ",";
    out << values[flat] << ","
        << (unique_flags.empty() ? 1 : static_cast<int>(unique_flags[flat]))
        << "\n";
  }
}

}  // namespace mmot
