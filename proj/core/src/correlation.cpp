#include "nebv/correlation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Sparse>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "nebv/csv.hpp"
#include "nebv/types.hpp"

namespace nebv {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_args(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

double to_double(const std::string& s, std::string_view context) {
  double v = 0.0;
  if (!parse_double_cell(s, v)) {
    throw std::invalid_argument("correlation: bad number '" + s + "' in '" + std::string(context) + "'");
  }
  return v;
}

Eigen::MatrixXd banded(std::size_t p, int d, double rho) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p && j <= i + static_cast<std::size_t>(d); ++j) {
      r(i, j) = r(j, i) = rho;
    }
  }
  return r;
}

Eigen::MatrixXd autoregressive(std::size_t p, double rho) {
  Eigen::MatrixXd r(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    r(i, i) = 1.0;
    double v = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      v *= rho;
      r(i, j) = r(j, i) = v;
    }
  }
  return r;
}

Eigen::MatrixXd sparse_gram(std::size_t p, const SparseCorrelation& spec, Rng& rng) {
  const std::uint64_t cells = static_cast<std::uint64_t>(p) * p;
  const auto nnz = static_cast<std::uint64_t>(std::llround(spec.density * static_cast<double>(cells)));
  if (nnz == 0) throw std::invalid_argument("sparse correlation: density leaves A empty");

  // Floyd's sampling of nnz distinct cells, in generation order.
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(nnz * 2);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(nnz);
  for (std::uint64_t j = cells - nnz; j < cells; ++j) {
    std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) {
      t = j;
      chosen.insert(t);
    }
    const double value = spec.a == spec.b ? spec.a : rng.uniform(spec.a, spec.b);
    triplets.emplace_back(static_cast<int>(t / p), static_cast<int>(t % p), value);
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseMatrix<double> gram = (a.transpose() * a).pruned(0.0);

  Eigen::VectorXd inv_sqrt(p);
  for (std::size_t j = 0; j < p; ++j) {
    const double d = gram.coeff(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    if (!(d > 0.0)) {
      throw std::runtime_error("sparse correlation: column " + std::to_string(j) +
                               " of A is all zero; increase the density");
    }
    inv_sqrt(static_cast<Eigen::Index>(j)) = 1.0 / std::sqrt(d);
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(p, p);
  for (int col = 0; col < gram.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(gram, col); it; ++it) {
      // The sparse product's summation order can differ between (j, l) and
      // (l, j); take one triangle so the result is exactly symmetric.
      if (it.row() < it.col()) {
        const double v = it.value() * inv_sqrt(it.row()) * inv_sqrt(it.col());
        r(it.row(), it.col()) = v;
        r(it.col(), it.row()) = v;
      }
    }
  }
  r.diagonal().setOnes();
  return r;
}

Eigen::MatrixXd from_file(std::size_t p, const FileCorrelation& spec, Rng& rng) {
  if (spec.subset_size != p) {
    throw std::invalid_argument("file correlation: subset_size " + std::to_string(spec.subset_size) +
                                " must equal p=" + std::to_string(p));
  }
  const Eigen::MatrixXd data = read_numeric_matrix(spec.path);
  const auto cols = static_cast<std::size_t>(data.cols());
  if (cols < p) {
    throw std::invalid_argument("file correlation: '" + spec.path + "' has " + std::to_string(cols) +
                                " columns, need " + std::to_string(p));
  }
  if (data.rows() < 2) throw std::invalid_argument("file correlation: need at least 2 rows");

  std::vector<std::size_t> idx(cols);
  for (std::size_t i = 0; i < cols; ++i) idx[i] = i;
  for (std::size_t i = 0; i < p; ++i) std::swap(idx[i], idx[i + rng.below(cols - i)]);

  Eigen::MatrixXd sub(data.rows(), static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j) sub.col(static_cast<Eigen::Index>(j)) = data.col(static_cast<Eigen::Index>(idx[j]));
  const Eigen::RowVectorXd mean = sub.colwise().mean();
  sub.rowwise() -= mean;
  Eigen::MatrixXd cov = (sub.transpose() * sub) / static_cast<double>(data.rows() - 1);
  Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  for (Eigen::Index j = 0; j < sd.size(); ++j) {
    if (!(sd(j) > 0.0)) {
      throw std::invalid_argument("file correlation: column " + std::to_string(idx[static_cast<std::size_t>(j)]) +
                                  " has zero variance");
    }
  }
  Eigen::MatrixXd r = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
  r = 0.5 * (r + r.transpose());
  r.diagonal().setOnes();
  return r;
}

void check_correlation_shape(const Eigen::MatrixXd& r) {
  if (r.rows() != r.cols()) throw std::invalid_argument("correlation matrix must be square");
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    if (std::abs(r(i, i) - 1.0) > 1e-12) throw std::invalid_argument("correlation diagonal must be 1");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(r(i, j) - r(j, i)) > 1e-12) throw std::invalid_argument("correlation matrix must be symmetric");
    }
  }
}

}  // namespace

CorrelationSpec parse_correlation(std::string_view text) {
  const std::string t = trim(text);
  std::string name = t;
  std::vector<std::string> args;
  if (const auto open = t.find('('); open != std::string::npos) {
    if (t.back() != ')') throw std::invalid_argument("correlation: missing ')' in '" + t + "'");
    name = trim(std::string_view(t).substr(0, open));
    args = split_args(std::string_view(t).substr(open + 1, t.size() - open - 2));
  }
  for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  if (name == "identity" || name == "independent") {
    return IdentityCorrelation{};
  }
  if (name == "banded" && args.size() == 2) {
    const double d = to_double(args[0], t);
    if (!(d >= 1.0) || d != std::floor(d)) throw std::invalid_argument("banded: d must be a positive integer");
    return BandedCorrelation{static_cast<int>(d), to_double(args[1], t)};
  }
  if (name == "ar" && args.size() == 1) {
    const double rho = to_double(args[0], t);
    if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("ar: rho must lie in (-1,1)");
    return ArCorrelation{rho};
  }
  if (name == "sparse" && (args.size() == 2 || args.size() == 3)) {
    SparseCorrelation s{to_double(args[0], t), to_double(args[1], t)};
    if (args.size() == 3) s.density = to_double(args[2], t);
    if (!(s.a <= s.b)) throw std::invalid_argument("sparse: need a <= b");
    if (!(s.density > 0.0 && s.density <= 1.0)) throw std::invalid_argument("sparse: density must lie in (0,1]");
    return s;
  }
  if (name == "file" && args.size() == 2) {
    const double n = to_double(args[1], t);
    if (!(n >= 1.0) || n != std::floor(n)) throw std::invalid_argument("file: subset size must be a positive integer");
    return FileCorrelation{args[0], static_cast<std::size_t>(n)};
  }
  throw std::invalid_argument("correlation: cannot parse '" + t +
                              "' (valid: identity, banded(d,rho), ar(rho), sparse(a,b[,density]), file(path,size))");
}

std::string to_string(const CorrelationSpec& spec) {
  struct Visitor {
    std::string operator()(const IdentityCorrelation&) const { return "identity"; }
    std::string operator()(const BandedCorrelation& s) const {
      return "banded(" + std::to_string(s.d) + "," + format_number(s.rho) + ")";
    }
    std::string operator()(const ArCorrelation& s) const { return "ar(" + format_number(s.rho) + ")"; }
    std::string operator()(const SparseCorrelation& s) const {
      return "sparse(" + format_number(s.a) + "," + format_number(s.b) + "," + format_number(s.density) + ")";
    }
    std::string operator()(const FileCorrelation& s) const {
      return "file(" + s.path + "," + std::to_string(s.subset_size) + ")";
    }
  };
  return std::visit(Visitor{}, spec);
}

Eigen::MatrixXd build_correlation(const CorrelationSpec& spec, std::size_t p, Rng& rng) {
  if (p == 0) throw std::invalid_argument("correlation: p must be >= 1");
  struct Visitor {
    std::size_t p;
    Rng& rng;
    Eigen::MatrixXd operator()(const IdentityCorrelation&) const { return Eigen::MatrixXd::Identity(p, p); }
    Eigen::MatrixXd operator()(const BandedCorrelation& s) const { return banded(p, s.d, s.rho); }
    Eigen::MatrixXd operator()(const ArCorrelation& s) const { return autoregressive(p, s.rho); }
    Eigen::MatrixXd operator()(const SparseCorrelation& s) const { return sparse_gram(p, s, rng); }
    Eigen::MatrixXd operator()(const FileCorrelation& s) const { return from_file(p, s, rng); }
  };
  Eigen::MatrixXd r = std::visit(Visitor{p, rng}, spec);
  check_correlation_shape(r);
  const CorrelationFactor f = factor_correlation(r);
  if (f.jitter > 0.0) {
    r.diagonal().array() += f.jitter;
    r /= 1.0 + f.jitter;
    r.diagonal().setOnes();
  }
  return r;
}

CorrelationFactor factor_correlation(const Eigen::MatrixXd& r) {
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() == Eigen::Success) return {llt.matrixL(), 0.0};
  const auto n = r.rows();
  for (double eps = 1e-10; eps <= 1e-6 * (1.0 + 1e-9); eps *= 2.0) {
    Eigen::MatrixXd shifted = r + eps * Eigen::MatrixXd::Identity(n, n);
    shifted /= 1.0 + eps;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), eps};
  }
  throw std::runtime_error("correlation matrix is not positive definite even after 1e-6 diagonal jitter");
}

double off_diagonal_zero_fraction(const Eigen::MatrixXd& r) {
  const auto n = r.rows();
  if (n < 2) return 0.0;
  std::size_t zeros = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j && r(i, j) == 0.0) ++zeros;
    }
  }
  return static_cast<double>(zeros) / static_cast<double>(n * (n - 1));
}

Eigen::MatrixXd read_numeric_matrix(const std::string& path) {
  const auto rows = read_delimited(path);
  std::vector<std::vector<double>> values;
  std::size_t width = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<double> parsed;
    bool numeric = true;
    for (const auto& cell : rows[r].cells) {
      double v = 0.0;
      if (!parse_double_cell(cell, v) || !std::isfinite(v)) {
        numeric = false;
        break;
      }
      parsed.push_back(v);
    }
    if (!numeric) {
      if (r == 0) continue;  // header
      throw ParseError(path, rows[r].line, "non-numeric cell in matrix body");
    }
    if (width == 0) width = parsed.size();
    if (parsed.size() != width) {
      throw ParseError(path, rows[r].line,
                       "expected " + std::to_string(width) + " columns, found " + std::to_string(parsed.size()));
    }
    values.push_back(std::move(parsed));
  }
  if (values.empty()) throw std::invalid_argument("'" + path + "' holds no numeric rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
  }
  return m;
}

}  // namespace nebv
