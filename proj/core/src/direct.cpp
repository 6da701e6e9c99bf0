#include "diracweyl/direct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "diracweyl/errors.hpp"

namespace diracweyl {

namespace {

constexpr double rescale_threshold = 1e50;

struct CellData {
  Matrix P;  // exp(M h)
  Matrix W;  // int_0^h exp(M s)* exp(M s) ds
};

Matrix cell_matrix(const PotentialProfile& v, std::size_t cell, cd z, const Matrix& j) {
  const cd i(0.0, 1.0);
  return i * (z * j + j * v.block_potential(cell));
}

CellData cell_data(const Matrix& M, double h) {
  const Eigen::Index m = M.rows();
  // Van Loan: exp(h [[-M*, I], [0, M]]) = [[., F12], [0, exp(Mh)]], W = exp(Mh)* F12.
  Matrix C = Matrix::Zero(2 * m, 2 * m);
  C.topLeftCorner(m, m) = -M.adjoint();
  C.topRightCorner(m, m) = Matrix::Identity(m, m);
  C.bottomRightCorner(m, m) = M;
  const Matrix F = (h * C).exp();
  CellData d;
  d.P = F.bottomRightCorner(m, m);
  d.W = d.P.adjoint() * F.topRightCorner(m, m);
  d.W = 0.5 * (d.W + d.W.adjoint()).eval();
  return d;
}

bool same_cell(const PotentialProfile& v, std::size_t a, std::size_t b) {
  return v.v()[a] == v.v()[b];
}

void check_finite(const Matrix& u, std::size_t cell) {
  if (!u.allFinite()) {
    throw IntegrationFailure("non-finite fundamental solution after cell " + std::to_string(cell));
  }
}

int node_index(const PotentialProfile& v, double b) {
  const double h = v.step();
  const double k = std::round(b / h);
  if (std::abs(k * h - b) > 1e-9 * std::max(1.0, b)) {
    std::ostringstream os;
    os << "length " << b << " is not a multiple of the cell size " << h;
    throw OffGridError(os.str());
  }
  if (k < 1 || k > v.cells()) {
    std::ostringstream os;
    os << "length " << b << " outside (0, " << v.length() << "]";
    throw OffGridError(os.str());
  }
  return static_cast<int>(k);
}

/// Gram matrices at the requested node counts (sorted ascending), rescaled by a common
/// positive factor per matrix so that u stays below the overflow threshold.
std::vector<Matrix> scaled_grams(const PotentialProfile& v, cd z, const std::vector<int>& nodes) {
  const BlockDims dims = v.dims();
  const Matrix j = SignatureMatrix(dims).matrix();
  const double h = v.step();
  Matrix u = Matrix::Identity(dims.m(), dims.m());
  Matrix G = Matrix::Zero(dims.m(), dims.m());
  std::vector<Matrix> out;
  out.reserve(nodes.size());
  std::size_t next = 0;
  CellData d;
  const int last = nodes.empty() ? 0 : nodes.back();
  for (int c = 0; c < last; ++c) {
    const auto cell = static_cast<std::size_t>(c);
    if (c == 0 || !same_cell(v, cell, cell - 1)) d = cell_data(cell_matrix(v, cell, z, j), h);
    G += u.adjoint() * d.W * u;
    u = d.P * u;
    check_finite(u, cell);
    const double big = u.cwiseAbs().maxCoeff();
    if (big > rescale_threshold) {
      u /= big;
      G /= big * big;
    }
    while (next < nodes.size() && nodes[next] == c + 1) {
      out.push_back(G);
      ++next;
    }
  }
  return out;
}

Matrix weyl_from_gram(const Matrix& G, BlockDims dims) {
  const Matrix G22 = G.bottomRightCorner(dims.m2(), dims.m2());
  const Matrix G21 = G.bottomLeftCorner(dims.m2(), dims.m1());
  Eigen::LLT<Matrix> llt(0.5 * (G22 + G22.adjoint()));
  if (llt.info() != Eigen::Success) throw Error("G22 is numerically singular");
  return -llt.solve(G21);
}

double sigma_max(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

std::vector<int> schedule_nodes(const PotentialProfile& v, const DirectOptions& options) {
  std::vector<int> nodes;
  if (options.b_schedule.empty()) {
    const int n = v.cells();
    for (double f : {0.25, 0.5, 1.0}) nodes.push_back(std::max(1, static_cast<int>(std::lround(f * n))));
  } else {
    for (double b : options.b_schedule) nodes.push_back(node_index(v, b));
  }
  if (!std::is_sorted(nodes.begin(), nodes.end()) ||
      std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
    throw Error("b_schedule must be strictly increasing");
  }
  return nodes;
}

}  // namespace

FundamentalSolutionSlice propagate(const PotentialProfile& v, cd z) {
  const BlockDims dims = v.dims();
  const Matrix j = SignatureMatrix(dims).matrix();
  const double h = v.step();
  std::vector<Matrix> u;
  u.reserve(static_cast<std::size_t>(v.cells()) + 1);
  u.push_back(Matrix::Identity(dims.m(), dims.m()));
  Matrix P;
  for (std::size_t c = 0; c < static_cast<std::size_t>(v.cells()); ++c) {
    if (c == 0 || !same_cell(v, c, c - 1)) P = (h * cell_matrix(v, c, z, j)).exp();
    u.push_back(P * u.back());
    check_finite(u.back(), c);
  }
  return {z, GridFunction(v.length(), v.cells(), Layout::nodes, std::move(u))};
}

Matrix gram(const PotentialProfile& v, cd z, double b) {
  if (!(z.imag() > 0.0)) throw Error("gram requires Im z > 0");
  if (z.imag() * b > gram_overflow_cap) {
    std::ostringstream os;
    os << "Im(z)*b = " << z.imag() * b << " exceeds the overflow cap " << gram_overflow_cap
       << "; use b <= " << gram_overflow_cap / z.imag() << " or the rescaled weyl_point";
    throw OverflowCapExceeded(os.str());
  }
  const int k = node_index(v, b);
  const BlockDims dims = v.dims();
  const Matrix j = SignatureMatrix(dims).matrix();
  const double h = v.step();
  Matrix u = Matrix::Identity(dims.m(), dims.m());
  Matrix G = Matrix::Zero(dims.m(), dims.m());
  CellData d;
  for (int c = 0; c < k; ++c) {
    const auto cell = static_cast<std::size_t>(c);
    if (c == 0 || !same_cell(v, cell, cell - 1)) d = cell_data(cell_matrix(v, cell, z, j), h);
    G += u.adjoint() * d.W * u;
    u = d.P * u;
    check_finite(u, cell);
  }
  return 0.5 * (G + G.adjoint());
}

WeylPoint weyl_point_unchecked(const PotentialProfile& v, cd z, const DirectOptions& options) {
  if (!(z.imag() > 0.0)) throw Error("weyl_point requires Im z > 0");
  const std::vector<int> nodes = schedule_nodes(v, options);
  const std::vector<Matrix> grams = scaled_grams(v, z, nodes);
  WeylPoint p;
  Matrix prev;
  for (std::size_t k = 0; k < grams.size(); ++k) {
    Matrix phi = weyl_from_gram(grams[k], v.dims());
    if (k > 0) p.increments.push_back((phi - prev).norm());
    prev = std::move(phi);
  }
  p.phi = prev;
  p.converged = !p.increments.empty() && p.increments.back() < options.tol_weyl;
  p.sigma_max = sigma_max(p.phi);
  return p;
}

WeylPoint weyl_point(const PotentialProfile& v, cd z, const DirectOptions& options) {
  WeylPoint p = weyl_point_unchecked(v, z, options);
  if (!p.converged) {
    std::ostringstream os;
    os << "Weyl point at z = " << z << " did not settle: last increment " << p.last_increment()
       << " (tolerance " << options.tol_weyl << ")";
    throw NonConvergence(os.str(), p.increments);
  }
  return p;
}

WeylSamples::WeylSamples(BlockDims dims, double eta, double a, std::vector<Matrix> values,
                         std::vector<bool> converged)
    : dims_(dims), eta_(eta), a_(a), values_(std::move(values)), converged_(std::move(converged)) {
  if (!(eta > 0.0)) throw ShapeError("Weyl samples need eta > 0");
  if (!(a > 0.0)) throw ShapeError("Weyl samples need a > 0");
  if (values_.size() < 2) throw ShapeError("Weyl samples need at least two points");
  if (converged_.empty()) converged_.assign(values_.size(), true);
  if (converged_.size() != values_.size()) throw ShapeError("one convergence flag per sample");
  for (const Matrix& phi : values_) {
    if (phi.rows() != dims.m2() || phi.cols() != dims.m1()) {
      throw ShapeError("Weyl samples must be m2 x m1");
    }
  }
}

WeylSamples WeylSamples::from_function(BlockDims dims, double eta, double a, int nz,
                                       const std::function<Matrix(cd)>& phi) {
  if (nz < 2) throw ShapeError("nz must be at least 2");
  std::vector<Matrix> values;
  values.reserve(static_cast<std::size_t>(nz));
  const double dz = 2.0 * a / (nz - 1);
  for (int k = 0; k < nz; ++k) values.push_back(phi(cd(-a + k * dz, eta)));
  return WeylSamples(dims, eta, a, std::move(values));
}

bool WeylSamples::all_converged() const {
  return std::all_of(converged_.begin(), converged_.end(), [](bool b) { return b; });
}

int WeylSamples::failures() const {
  return static_cast<int>(std::count(converged_.begin(), converged_.end(), false));
}

double WeylSamples::max_singular_value() const {
  double s = 0.0;
  for (const Matrix& phi : values_) s = std::max(s, sigma_max(phi));
  return s;
}

WeylSamples WeylSamples::truncated(double a_new) const {
  const double dz = step();
  const double half = std::round(a_new / dz);
  if (std::abs(half * dz - a_new) > 1e-9 * std::max(1.0, a_new) || half < 1 || a_new > a_ * (1 + 1e-12)) {
    throw OffGridError("truncation length must be a zeta grid point inside [0, a]");
  }
  const int centre = (nz() - 1) / 2;
  const int first = centre - static_cast<int>(half);
  const int count = 2 * static_cast<int>(half) + 1;
  std::vector<Matrix> values(values_.begin() + first, values_.begin() + first + count);
  std::vector<bool> flags(converged_.begin() + first, converged_.begin() + first + count);
  return WeylSamples(dims_, eta_, half * dz, std::move(values), std::move(flags));
}

WeylSamples weyl_line(const PotentialProfile& v, double eta, double a, int nz, const DirectOptions& options) {
  if (!(eta > 0.0)) throw Error("weyl_line requires eta > 0");
  if (nz < 2) throw ShapeError("nz must be at least 2");
  std::vector<Matrix> values(static_cast<std::size_t>(nz));
  std::vector<char> flags(static_cast<std::size_t>(nz), 0);
  const double dz = 2.0 * a / (nz - 1);
  schedule_nodes(v, options);  // schedule errors surface before any worker starts

  const int threads = std::clamp(options.threads > 0 ? options.threads : default_thread_count(), 1, nz);
  auto work = [&](int begin, int end) {
    for (int k = begin; k < end; ++k) {
      WeylPoint p = weyl_point_unchecked(v, cd(-a + k * dz, eta), options);
      values[static_cast<std::size_t>(k)] = std::move(p.phi);
      flags[static_cast<std::size_t>(k)] = p.converged ? 1 : 0;
    }
  };
  if (threads == 1) {
    work(0, nz);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    const int chunk = (nz + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(nz, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (std::thread& th : pool) th.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<bool> converged(flags.begin(), flags.end());
  return WeylSamples(v.dims(), eta, a, std::move(values), std::move(converged));
}

cd constant_potential_weyl_oracle(cd c, cd z) {
  if (c == cd(0.0)) return 0.0;
  cd lambda = std::sqrt(std::norm(c) - z * z);
  if (lambda.real() > 0.0) lambda = -lambda;
  return (lambda - cd(0.0, 1.0) * z) / (cd(0.0, 1.0) * c);
}

int default_thread_count() {
  if (const char* env = std::getenv("DIRACWEYL_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

}  // namespace diracweyl
