#include "diracweyl/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "diracweyl/errors.hpp"

namespace diracweyl {

BlockDims::BlockDims(int m1, int m2) : m1_(m1), m2_(m2) {
  if (m1 < 1 || m2 < 1) {
    throw ShapeError("block sizes must be positive, got m1=" + std::to_string(m1) +
                     " m2=" + std::to_string(m2));
  }
}

SignatureMatrix::SignatureMatrix(BlockDims dims) : dims_(dims), j_(Matrix::Identity(dims.m(), dims.m())) {
  j_.bottomRightCorner(dims.m2(), dims.m2()) *= -1.0;
}

const char* to_string(Layout layout) {
  switch (layout) {
    case Layout::nodes:
      return "node";
    case Layout::midpoints:
      return "midpoint";
    case Layout::origin_midpoints:
      return "origin+midpoint";
  }
  return "unknown";
}

std::size_t sample_count(Layout layout, int cells) {
  switch (layout) {
    case Layout::nodes:
    case Layout::origin_midpoints:
      return static_cast<std::size_t>(cells) + 1;
    case Layout::midpoints:
      return static_cast<std::size_t>(cells);
  }
  return 0;
}

GridFunction::GridFunction(double length, int cells, Layout layout, std::vector<Matrix> samples)
    : length_(length), cells_(cells), layout_(layout), samples_(std::move(samples)) {
  if (!(length > 0.0) || !std::isfinite(length)) throw ShapeError("grid length must be positive");
  if (cells < 2) throw ShapeError("a grid needs at least two cells");
  if (samples_.size() != sample_count(layout, cells)) {
    throw ShapeError(std::string("expected ") + std::to_string(sample_count(layout, cells)) +
                     " samples for layout " + to_string(layout) + ", got " +
                     std::to_string(samples_.size()));
  }
  for (const Matrix& s : samples_) {
    if (s.rows() != samples_.front().rows() || s.cols() != samples_.front().cols()) {
      throw ShapeError("grid samples must share one shape");
    }
  }
}

GridFunction GridFunction::sample(double length, int cells, Layout layout,
                                  const std::function<Matrix(double)>& f) {
  const std::size_t count = sample_count(layout, cells);
  std::vector<Matrix> samples;
  samples.reserve(count);
  const double h = length / cells;
  for (std::size_t i = 0; i < count; ++i) {
    double x = 0.0;
    switch (layout) {
      case Layout::nodes:
        x = static_cast<double>(i) * h;
        break;
      case Layout::midpoints:
        x = (static_cast<double>(i) + 0.5) * h;
        break;
      case Layout::origin_midpoints:
        x = i == 0 ? 0.0 : (static_cast<double>(i) - 0.5) * h;
        break;
    }
    samples.push_back(f(x));
  }
  return GridFunction(length, cells, layout, std::move(samples));
}

double GridFunction::coordinate(std::size_t i) const {
  const double h = step();
  switch (layout_) {
    case Layout::nodes:
      return static_cast<double>(i) * h;
    case Layout::midpoints:
      return (static_cast<double>(i) + 0.5) * h;
    case Layout::origin_midpoints:
      return i == 0 ? 0.0 : (static_cast<double>(i) - 0.5) * h;
  }
  return 0.0;
}

std::vector<double> GridFunction::coordinates() const {
  std::vector<double> x(size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = coordinate(i);
  return x;
}

GridFunction GridFunction::map(const std::function<Matrix(std::size_t, const Matrix&)>& f) const {
  std::vector<Matrix> out;
  out.reserve(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) out.push_back(f(i, samples_[i]));
  return GridFunction(length_, cells_, layout_, std::move(out));
}

double GridFunction::sup_norm() const {
  double s = 0.0;
  for (const Matrix& m : samples_) s = std::max(s, m.norm());
  return s;
}

bool GridFunction::same_grid(const GridFunction& other) const {
  return cells_ == other.cells_ && layout_ == other.layout_ &&
         std::abs(length_ - other.length_) <= 1e-12 * std::max(1.0, length_);
}

PotentialProfile::PotentialProfile(BlockDims dims, GridFunction v) : dims_(dims), v_(std::move(v)) {
  if (v_.layout() != Layout::midpoints) throw ShapeError("potentials are sampled at cell midpoints");
  if (v_.rows() != dims.m1() || v_.cols() != dims.m2()) {
    throw ShapeError("potential samples must be m1 x m2");
  }
}

PotentialProfile PotentialProfile::from_function(BlockDims dims, double length, int cells,
                                                 const std::function<Matrix(double)>& v) {
  return PotentialProfile(dims, GridFunction::sample(length, cells, Layout::midpoints, v));
}

PotentialProfile PotentialProfile::constant(const Matrix& value, double length, int cells) {
  const BlockDims dims(static_cast<int>(value.rows()), static_cast<int>(value.cols()));
  return from_function(dims, length, cells, [&](double) { return value; });
}

const Matrix& PotentialProfile::at(double x) const {
  const auto cell = static_cast<long>(std::floor(x / step()));
  const long last = static_cast<long>(v_.size()) - 1;
  return v_[static_cast<std::size_t>(std::clamp(cell, 0L, last))];
}

Matrix PotentialProfile::block_potential(std::size_t cell) const {
  const int m1 = dims_.m1();
  const int m2 = dims_.m2();
  Matrix V = Matrix::Zero(m1 + m2, m1 + m2);
  V.topRightCorner(m1, m2) = v_[cell];
  V.bottomLeftCorner(m2, m1) = v_[cell].adjoint();
  return V;
}

BlockRowPair::BlockRowPair(BlockDims dims_, GridFunction beta_, GridFunction gamma_)
    : dims(dims_), beta(std::move(beta_)), gamma(std::move(gamma_)) {
  if (!beta.same_grid(gamma)) throw ShapeError("beta and gamma must share a grid");
  if (beta.rows() != dims.m1() || beta.cols() != dims.m()) throw ShapeError("beta must be m1 x m");
  if (gamma.rows() != dims.m2() || gamma.cols() != dims.m()) throw ShapeError("gamma must be m2 x m");
}

namespace {

double sup_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

double JResiduals::sup_beta_beta() const { return sup_of(beta_beta); }
double JResiduals::sup_gamma_gamma() const { return sup_of(gamma_gamma); }
double JResiduals::sup_beta_gamma() const { return sup_of(beta_gamma); }
double JResiduals::sup_dgamma_gamma() const { return sup_of(dgamma_gamma); }
double JResiduals::sup() const {
  return std::max({sup_beta_beta(), sup_gamma_gamma(), sup_beta_gamma(), sup_dgamma_gamma()});
}

JResiduals j_residuals(const BlockRowPair& pair) {
  const Matrix j = SignatureMatrix(pair.dims).matrix();
  const int m1 = pair.dims.m1();
  const int m2 = pair.dims.m2();
  const GridFunction dgamma = differentiate(pair.gamma);
  JResiduals r;
  const std::size_t n = pair.beta.size();
  r.beta_beta.resize(n);
  r.gamma_gamma.resize(n);
  r.beta_gamma.resize(n);
  r.dgamma_gamma.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix& b = pair.beta[i];
    const Matrix& g = pair.gamma[i];
    r.beta_beta[i] = (b * j * b.adjoint() - Matrix::Identity(m1, m1)).norm();
    r.gamma_gamma[i] = (g * j * g.adjoint() + Matrix::Identity(m2, m2)).norm();
    r.beta_gamma[i] = (b * j * g.adjoint()).norm();
    r.dgamma_gamma[i] = (dgamma[i] * j * g.adjoint()).norm();
  }
  return r;
}

std::pair<Matrix, Matrix> block_split(const Matrix& row, BlockDims dims) {
  if (row.cols() != dims.m()) {
    throw ShapeError("block_split expects " + std::to_string(dims.m()) + " columns, got " +
                     std::to_string(row.cols()));
  }
  return {row.leftCols(dims.m1()), row.rightCols(dims.m2())};
}

Matrix block_join(const Matrix& left, const Matrix& right) {
  if (left.rows() != right.rows()) throw ShapeError("block_join row count mismatch");
  Matrix out(left.rows(), left.cols() + right.cols());
  out << left, right;
  return out;
}

GridFunction differentiate(const GridFunction& f) {
  const std::size_t n = f.size();
  if (n < 3) throw ShapeError("differentiation needs at least three samples");
  const std::vector<double> x = f.coordinates();
  std::vector<Matrix> d;
  d.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = std::clamp<std::size_t>(i, 1, n - 2);
    const double x0 = x[c - 1], x1 = x[c], x2 = x[c + 1], xi = x[i];
    // Derivative of the Lagrange interpolant through (x0, x1, x2) evaluated at xi.
    const double w0 = ((xi - x1) + (xi - x2)) / ((x0 - x1) * (x0 - x2));
    const double w1 = ((xi - x0) + (xi - x2)) / ((x1 - x0) * (x1 - x2));
    const double w2 = ((xi - x0) + (xi - x1)) / ((x2 - x0) * (x2 - x1));
    d.push_back(w0 * f[c - 1] + w1 * f[c] + w2 * f[c + 1]);
  }
  return GridFunction(f.length(), f.cells(), f.layout(), std::move(d));
}

double l2_norm(const GridFunction& f) {
  double sum = 0.0;
  if (f.layout() == Layout::midpoints) {
    for (const Matrix& m : f.samples()) sum += m.squaredNorm();
    return std::sqrt(sum * f.step());
  }
  const std::vector<double> x = f.coordinates();
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    sum += 0.5 * (x[i + 1] - x[i]) * (f[i].squaredNorm() + f[i + 1].squaredNorm());
  }
  if (f.layout() == Layout::origin_midpoints) {
    // Last half cell up to L, rectangle at the final midpoint.
    sum += 0.5 * f.step() * f[f.size() - 1].squaredNorm();
  }
  return std::sqrt(sum);
}

double sup_norm_until(const GridFunction& f, double x_max) {
  double s = 0.0;
  const double slack = 1e-12 * f.step();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.coordinate(i) <= x_max + slack) s = std::max(s, f[i].norm());
  }
  return s;
}

}  // namespace diracweyl
