#include "diracweyl/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include <unistd.h>

#include "diracweyl/errors.hpp"

namespace diracweyl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw IoError("cannot open " + path.string());
  }

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      line = trim(line);
      if (!line.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

  double number(const std::string& s) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) fail("malformed number '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("malformed number '" + s + "'");
    }
  }

  int integer(const std::string& s) const {
    const double v = number(s);
    if (v != std::round(v)) fail("expected an integer, got '" + s + "'");
    return static_cast<int>(v);
  }

  /// Header fields after the leading '#'.
  std::vector<std::string> header() {
    std::string line;
    if (!next(line) || line.front() != '#') fail("missing '#' header line");
    return split(line.substr(1));
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  int line_no_ = 0;
};

std::ostringstream number_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

void write_entries(std::ostream& os, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << ',' << m(r, c).real() << ',' << m(r, c).imag();
  }
}

Matrix read_entries(const Reader& rd, const std::vector<std::string>& f, std::size_t first, int rows, int cols) {
  if (f.size() < first + 2 * static_cast<std::size_t>(rows * cols)) rd.fail("too few columns");
  Matrix m(rows, cols);
  std::size_t k = first;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = cd(rd.number(f[k]), rd.number(f[k + 1]));
      k += 2;
    }
  }
  return m;
}

BlockDims read_dims(const Reader& rd, const std::vector<std::string>& h) {
  try {
    return BlockDims(rd.integer(h[0]), rd.integer(h[1]));
  } catch (const ShapeError& e) {
    rd.fail(e.what());
  }
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PotentialProfile read_potential(const std::filesystem::path& path) {
  Reader rd(path);
  const std::vector<std::string> h = rd.header();
  if (h.size() < 5 || h[4] != "layout=midpoint") rd.fail("expected header '# m1,m2,L,n,layout=midpoint'");
  const BlockDims dims = read_dims(rd, h);
  const double L = rd.number(h[2]);
  const int n = rd.integer(h[3]);
  std::vector<Matrix> samples;
  std::string line;
  while (rd.next(line)) {
    if (line.front() == '#') continue;
    const std::vector<std::string> f = split(line);
    samples.push_back(read_entries(rd, f, 1, dims.m1(), dims.m2()));
  }
  try {
    return PotentialProfile(dims, GridFunction(L, n, Layout::midpoints, std::move(samples)));
  } catch (const ShapeError& e) {
    rd.fail(e.what());
  }
}

void write_potential(const std::filesystem::path& path, const PotentialProfile& v) {
  std::ostringstream os = number_stream();
  os << "# " << v.dims().m1() << ',' << v.dims().m2() << ',' << v.length() << ',' << v.cells()
     << ",layout=midpoint\n";
  for (std::size_t i = 0; i < v.v().size(); ++i) {
    os << v.v().coordinate(i);
    write_entries(os, v.v()[i]);
    os << '\n';
  }
  write_atomic(path, os.str());
}

WeylSamples read_weyl(const std::filesystem::path& path) {
  Reader rd(path);
  const std::vector<std::string> h = rd.header();
  if (h.size() < 5) rd.fail("expected header '# m1,m2,eta,a,nz'");
  const BlockDims dims = read_dims(rd, h);
  const double eta = rd.number(h[2]);
  const double a = rd.number(h[3]);
  const int nz = rd.integer(h[4]);
  const std::size_t entries = 2 * static_cast<std::size_t>(dims.m1() * dims.m2());
  std::vector<Matrix> values;
  std::vector<bool> flags;
  std::string line;
  while (rd.next(line)) {
    if (line.front() == '#') continue;
    const std::vector<std::string> f = split(line);
    values.push_back(read_entries(rd, f, 1, dims.m2(), dims.m1()));
    flags.push_back(f.size() > 1 + entries ? rd.integer(f[1 + entries]) != 0 : true);
    const double expected = -a + static_cast<double>(values.size() - 1) * 2.0 * a / (nz - 1);
    if (std::abs(rd.number(f[0]) - expected) > 1e-9 * std::max(1.0, a)) rd.fail("zeta grid is not uniform on [-a, a]");
  }
  if (static_cast<int>(values.size()) != nz) rd.fail("expected " + std::to_string(nz) + " samples");
  try {
    return WeylSamples(dims, eta, a, std::move(values), std::move(flags));
  } catch (const ShapeError& e) {
    rd.fail(e.what());
  }
}

void write_weyl(const std::filesystem::path& path, const WeylSamples& w) {
  std::ostringstream os = number_stream();
  os << "# " << w.dims().m1() << ',' << w.dims().m2() << ',' << w.eta() << ',' << w.a() << ',' << w.nz() << '\n';
  for (int k = 0; k < w.nz(); ++k) {
    os << w.zeta(k);
    write_entries(os, w[k]);
    os << ',' << (w.converged()[static_cast<std::size_t>(k)] ? 1 : 0) << '\n';
  }
  write_atomic(path, os.str());
}

Phi1Profile read_phi1(const std::filesystem::path& path) {
  Reader rd(path);
  const std::vector<std::string> h = rd.header();
  if (h.size() < 5 || h[4] != "layout=half-grid") rd.fail("expected header '# m1,m2,L,n,layout=half-grid'");
  const BlockDims dims = read_dims(rd, h);
  const double L = rd.number(h[2]);
  const int n = rd.integer(h[3]);
  std::string line;
  if (!rd.next(line) || line.rfind("#", 0) != 0) rd.fail("missing origin line");
  const std::vector<std::string> o = split(line.substr(1));
  if (o.empty() || o[0] != "origin") rd.fail("missing origin line");
  const Matrix origin = read_entries(rd, o, 1, dims.m2(), dims.m1());
  std::vector<Matrix> nodes, mid, prime;
  const std::size_t entries = 2 * static_cast<std::size_t>(dims.m1() * dims.m2());
  int k = 0;
  while (rd.next(line)) {
    if (line.front() == '#') continue;
    const std::vector<std::string> f = split(line);
    if (k % 2 == 0) {
      nodes.push_back(read_entries(rd, f, 1, dims.m2(), dims.m1()));
    } else {
      mid.push_back(read_entries(rd, f, 1, dims.m2(), dims.m1()));
      prime.push_back(read_entries(rd, f, 1 + entries, dims.m2(), dims.m1()));
    }
    ++k;
  }
  try {
    return Phi1Profile(dims, GridFunction(L, n, Layout::nodes, std::move(nodes)),
                       GridFunction(L, n, Layout::midpoints, std::move(mid)),
                       GridFunction(L, n, Layout::midpoints, std::move(prime)), Provenance::from_weyl, origin);
  } catch (const ShapeError& e) {
    rd.fail(e.what());
  }
}

void write_phi1(const std::filesystem::path& path, const Phi1Profile& p) {
  std::ostringstream os = number_stream();
  os << "# " << p.dims.m1() << ',' << p.dims.m2() << ',' << p.length() << ',' << p.cells() << ",layout=half-grid\n";
  os << "# origin";
  write_entries(os, p.origin_value);
  os << '\n';
  const Matrix blank = Matrix::Constant(p.dims.m2(), p.dims.m1(), cd(std::numeric_limits<double>::quiet_NaN(),
                                                                      std::numeric_limits<double>::quiet_NaN()));
  for (int k = 0; k <= 2 * p.cells(); ++k) {
    const auto i = static_cast<std::size_t>(k / 2);
    os << 0.5 * k * p.step();
    if (k % 2 == 0) {
      write_entries(os, p.phi1[i]);
      write_entries(os, blank);
    } else {
      write_entries(os, p.phi1_mid[i]);
      write_entries(os, p.phi1_prime[i]);
    }
    os << '\n';
  }
  write_atomic(path, os.str());
}

}  // namespace diracweyl
