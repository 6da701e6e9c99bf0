#include "diracweyl/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "diracweyl/errors.hpp"

namespace diracweyl {

namespace {

enum class Kernel { phi1, phi1_prime };

// phi ~ sum_k alpha_k (z + i kappa)^-k. The pole sits kappa below the real axis so the
// remainder stays smooth along the sampling line even for small eta.
struct TailModel {
  double kappa = 1.0;
  std::vector<Matrix> alpha;
};

double pole_depth(const WeylSamples& w) { return std::max(1.0, 10.0 * w.step()); }

std::vector<double> quadrature_weights(const WeylSamples& w, bool taper) {
  const int nz = w.nz();
  std::vector<double> wt(static_cast<std::size_t>(nz), w.step());
  wt.front() *= 0.5;
  wt.back() *= 0.5;
  if (taper) {
    for (int k = 0; k < nz; ++k) {
      const double t = std::abs(w.zeta(k)) / w.a();
      const double r = std::clamp((t - 0.9) / 0.1, 0.0, 1.0);
      wt[static_cast<std::size_t>(k)] *= 0.5 * (1.0 + std::cos(std::numbers::pi * r));
    }
  }
  return wt;
}

TailModel fit_tail(const WeylSamples& w, int order, double fraction) {
  const BlockDims dims = w.dims();
  std::vector<int> rows;
  for (int k = 0; k < w.nz(); ++k) {
    if (std::abs(w.zeta(k)) >= fraction * w.a()) rows.push_back(k);
  }
  const int K = order + 1;
  if (static_cast<int>(rows.size()) < 2 * K) throw Error("too few samples for the tail fit");
  const Eigen::Index entries = dims.m1() * dims.m2();
  Matrix A(static_cast<Eigen::Index>(rows.size()), K);
  Matrix B(static_cast<Eigen::Index>(rows.size()), entries);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const cd s = (w.z(rows[r]) + cd(0.0, pole_depth(w))) / w.a();
    const cd inv = 1.0 / s;
    cd p = 1.0;
    for (int k = 0; k < K; ++k) {
      A(static_cast<Eigen::Index>(r), k) = p;
      p *= inv;
    }
    B.row(static_cast<Eigen::Index>(r)) = w[rows[r]].reshaped().transpose();
  }
  const Matrix beta = A.colPivHouseholderQr().solve(B);
  TailModel model;
  model.kappa = pole_depth(w);
  double scale = 1.0;
  for (int k = 0; k < K; ++k) {
    Matrix a = beta.row(k).transpose().reshaped(dims.m2(), dims.m1());
    model.alpha.push_back(a * scale);
    scale *= w.a();
  }
  return model;
}

Matrix model_value(const TailModel& model, cd z) {
  Matrix out = Matrix::Zero(model.alpha.front().rows(), model.alpha.front().cols());
  const cd inv = 1.0 / (z + cd(0.0, model.kappa));
  cd p = 1.0;
  for (const Matrix& a : model.alpha) {
    out += p * a;
    p *= inv;
  }
  return out;
}

/// Exact transform of the model for y > 0 from the residues at 0 and -i kappa (the k = 0
/// delta term of the derivative is dropped).
Matrix model_transform(const TailModel& model, double y, Kernel kernel) {
  Matrix out = Matrix::Zero(model.alpha.front().rows(), model.alpha.front().cols());
  const cd s(0.0, -2.0 * y);
  const cd ik(0.0, model.kappa);
  const double decay = std::exp(-2.0 * model.kappa * y);
  const std::size_t K = model.alpha.size();
  // s^m / m!, m = 0..K-1
  std::vector<cd> powers(K, 1.0);
  for (std::size_t m = 1; m < K; ++m) powers[m] = powers[m - 1] * s / static_cast<double>(m);
  if (kernel == Kernel::phi1) {
    out -= model.alpha[0];
    for (std::size_t k = 1; k < K; ++k) {
      cd t = -std::pow(ik, -static_cast<int>(k));
      for (std::size_t j = 0; j < k; ++j) t += decay * powers[k - 1 - j] * std::pow(ik, -static_cast<int>(j + 1));
      out += t * model.alpha[k];
    }
  } else {
    for (std::size_t k = 1; k < K; ++k) out += cd(0.0, 2.0) * decay * powers[k - 1] * model.alpha[k];
  }
  return out;
}

struct Evaluation {
  std::vector<Matrix> values;
  std::vector<Matrix> outer;  // contribution of |zeta| >= 0.9a
};

/// Half-grid y_k = k h/2, k = 0..2n.
Evaluation evaluate(const WeylSamples& w, double length, int cells, const TransformOptions& options,
                    Kernel kernel) {
  if (cells < 2) throw ShapeError("the transform needs at least two cells");
  if (!(length > 0.0)) throw ShapeError("transform length must be positive");
  const double limit = max_zeta_step(length);
  if (w.step() > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "zeta step " << w.step() << " too coarse for L = " << length << "; need <= " << limit;
    throw AliasingError(os.str(), limit);
  }
  const BlockDims dims = w.dims();
  const int nz = w.nz();
  const std::vector<double> wt = quadrature_weights(w, options.taper);

  TailModel model;
  if (options.tail_subtraction) model = fit_tail(w, options.tail_order, options.tail_fit_fraction);

  std::vector<Matrix> f(static_cast<std::size_t>(nz));
  for (int k = 0; k < nz; ++k) {
    const cd z = w.z(k);
    Matrix phi = w[k];
    if (options.tail_subtraction) phi -= model_value(model, z);
    const cd factor = kernel == Kernel::phi1 ? wt[static_cast<std::size_t>(k)] / (cd(0.0, 2.0) * z)
                                             : cd(wt[static_cast<std::size_t>(k)]);
    f[static_cast<std::size_t>(k)] = factor * phi;
  }

  const double h = length / cells;
  const int count = 2 * cells + 1;
  const double sign = kernel == Kernel::phi1 ? 1.0 : -1.0;
  Evaluation out;
  out.values.reserve(static_cast<std::size_t>(count));
  out.outer.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double y = 0.5 * i * h;
    Matrix acc = Matrix::Zero(dims.m2(), dims.m1());
    Matrix outer = Matrix::Zero(dims.m2(), dims.m1());
    for (int k = 0; k < nz; ++k) {
      const cd e = std::polar(1.0, -2.0 * y * w.zeta(k));
      acc += e * f[static_cast<std::size_t>(k)];
      if (std::abs(w.zeta(k)) >= 0.9 * w.a()) outer += e * f[static_cast<std::size_t>(k)];
    }
    const double amp = sign * std::exp(2.0 * y * w.eta()) / std::numbers::pi;
    acc *= amp;
    outer *= amp;
    if (options.tail_subtraction) acc += model_transform(model, y, kernel);
    out.values.push_back(std::move(acc));
    out.outer.push_back(std::move(outer));
  }
  return out;
}

std::vector<Matrix> every_other(const std::vector<Matrix>& half, int offset) {
  std::vector<Matrix> out;
  for (std::size_t i = static_cast<std::size_t>(offset); i < half.size(); i += 2) out.push_back(half[i]);
  return out;
}

std::vector<Matrix> cell_differences(const GridFunction& nodes) {
  std::vector<Matrix> q;
  q.reserve(static_cast<std::size_t>(nodes.cells()));
  const double h = nodes.step();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) q.push_back((nodes[i + 1] - nodes[i]) / h);
  return q;
}

GridFunction difference(const GridFunction& a, const GridFunction& b) {
  return a.map([&](std::size_t i, const Matrix& s) { return Matrix(s - b[i]); });
}

}  // namespace

TransformOptions TransformOptions::round_trip() {
  TransformOptions o;
  o.taper = true;
  o.tail_subtraction = true;
  return o;
}

const char* to_string(Provenance p) {
  return p == Provenance::from_weyl ? "from_weyl" : "synthetic";
}

Phi1Profile::Phi1Profile(BlockDims dims_, GridFunction phi1_, GridFunction phi1_mid_, GridFunction phi1_prime_,
                         Provenance provenance_, Matrix origin_value_, double tail_estimate_)
    : dims(dims_),
      phi1(std::move(phi1_)),
      phi1_mid(std::move(phi1_mid_)),
      phi1_prime(std::move(phi1_prime_)),
      provenance(provenance_),
      origin_value(std::move(origin_value_)),
      tail_estimate(tail_estimate_) {
  if (phi1.layout() != Layout::nodes) throw ShapeError("Phi1 lives at nodes");
  if (phi1_mid.layout() != Layout::midpoints || phi1_prime.layout() != Layout::midpoints) {
    throw ShapeError("Phi1 midpoint values and Phi1' live at midpoints");
  }
  if (phi1_mid.cells() != phi1.cells() || phi1_prime.cells() != phi1.cells()) {
    throw ShapeError("Phi1 grids disagree");
  }
  for (const GridFunction* g : {&phi1, &phi1_mid, &phi1_prime}) {
    if (g->rows() != dims.m2() || g->cols() != dims.m1()) throw ShapeError("Phi1 samples must be m2 x m1");
  }
}

Phi1Profile Phi1Profile::synthetic(BlockDims dims, double length, int cells,
                                   const std::function<Matrix(double)>& phi1,
                                   const std::function<Matrix(double)>& phi1_prime) {
  GridFunction nodes = GridFunction::sample(length, cells, Layout::nodes, phi1);
  GridFunction mid = GridFunction::sample(length, cells, Layout::midpoints, phi1);
  GridFunction prime = phi1_prime
                           ? GridFunction::sample(length, cells, Layout::midpoints, phi1_prime)
                           : GridFunction(length, cells, Layout::midpoints, cell_differences(nodes));
  Matrix origin = nodes[0];
  return Phi1Profile(dims, std::move(nodes), std::move(mid), std::move(prime), Provenance::synthetic,
                     std::move(origin));
}

Phi1Profile Phi1Profile::zero(BlockDims dims, double length, int cells) {
  const Matrix z = Matrix::Zero(dims.m2(), dims.m1());
  return synthetic(dims, length, cells, [&](double) { return z; }, [&](double) { return z; });
}

double max_zeta_step(double length) { return std::numbers::pi / (2.0 * length); }

Phi1Profile phi1_from_weyl(const WeylSamples& w, double length, int cells, const TransformOptions& options) {
  const Evaluation e = evaluate(w, length, cells, options, Kernel::phi1);
  GridFunction nodes(length, cells, Layout::nodes, every_other(e.values, 0));
  GridFunction mid(length, cells, Layout::midpoints, every_other(e.values, 1));
  GridFunction prime;
  if (options.derivative == DerivativeSource::finite_difference) {
    prime = GridFunction(length, cells, Layout::midpoints, cell_differences(nodes));
  } else {
    prime = phi1_prime_from_weyl(w, length, cells, options).phi1_prime;
  }
  // The symmetric truncated integral converges to the mean of the one-sided limits at 0,
  // and Phi1 vanishes on the left. The tail model carries the jump itself.
  Matrix origin = options.tail_subtraction ? Matrix(nodes[0]) : Matrix(2.0 * nodes[0]);
  const double tail = l2_norm(GridFunction(length, cells, Layout::nodes, every_other(e.outer, 0)));
  return Phi1Profile(w.dims(), std::move(nodes), std::move(mid), std::move(prime), Provenance::from_weyl,
                     std::move(origin), tail);
}

Phi1PrimeReport phi1_prime_from_weyl(const WeylSamples& w, double length, int cells,
                                     const TransformOptions& options) {
  const Evaluation e = evaluate(w, length, cells, options, Kernel::phi1_prime);
  Phi1PrimeReport r;
  r.phi1_prime = GridFunction(length, cells, Layout::midpoints, every_other(e.values, 1));
  TransformOptions fd = options;
  fd.derivative = DerivativeSource::finite_difference;
  const Phi1Profile p = phi1_from_weyl(w, length, cells, fd);
  r.fd_discrepancy = l2_norm(difference(r.phi1_prime, p.phi1_prime));
  return r;
}

double eta_independence_check(const WeylSamples& w1, const WeylSamples& w2, double length, int cells,
                              const TransformOptions& options) {
  if (!(w1.dims() == w2.dims())) throw ShapeError("Weyl samples have different block sizes");
  const Phi1Profile p1 = phi1_from_weyl(w1, length, cells, options);
  const Phi1Profile p2 = phi1_from_weyl(w2, length, cells, options);
  return l2_norm(difference(p1.phi1, p2.phi1));
}

}  // namespace diracweyl
