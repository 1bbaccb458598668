#include "qmerl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qmerl {

Register::Register(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) {
    throw std::invalid_argument("Register: at least one site is required");
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] < 2) {
      throw std::invalid_argument("Register: site " + std::to_string(i) + " has dimension " +
                                  std::to_string(dims_[i]) + " (must be >= 2)");
    }
    total_ *= dims_[i];
  }
}

std::size_t Register::dim(std::size_t site) const {
  if (site >= dims_.size()) {
    throw std::out_of_range("Register: site " + std::to_string(site) + " out of range for " +
                            to_string());
  }
  return dims_[site];
}

std::size_t Register::left_dim(std::size_t site) const {
  std::size_t d = 1;
  for (std::size_t i = 0; i < site; ++i) d *= dims_[i];
  return d;
}

std::size_t Register::right_dim(std::size_t site) const {
  std::size_t d = 1;
  for (std::size_t i = site + 1; i < dims_.size(); ++i) d *= dims_[i];
  return d;
}

Register Register::concat(const Register& other) const {
  std::vector<std::size_t> d = dims_;
  d.insert(d.end(), other.dims_.begin(), other.dims_.end());
  return Register(std::move(d));
}

std::string Register::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
  os << ']';
  return os.str();
}

ComplexMatrix identity(std::size_t dim) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace {

void check_local(const ComplexMatrix& local, std::size_t site, const Register& reg) {
  const std::size_t d = reg.dim(site);
  if (local.rows() != local.cols() || static_cast<std::size_t>(local.rows()) != d) {
    throw std::invalid_argument("local operator is " + std::to_string(local.rows()) + "x" +
                                std::to_string(local.cols()) + " but site " +
                                std::to_string(site) + " of " + reg.to_string() +
                                " has dimension " + std::to_string(d));
  }
}

void check_square(const ComplexMatrix& m, const Register& reg) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != reg.total_dim()) {
    throw std::invalid_argument("operator is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " but register " + reg.to_string() +
                                " has total dimension " + std::to_string(reg.total_dim()));
  }
}

// Splits every full basis index into (kept index, traced index).
struct IndexSplit {
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> traced;
  Eigen::Index kept_dim = 1;
  Eigen::Index traced_dim = 1;
};

IndexSplit split_indices(const Register& reg, std::span<const std::size_t> keep) {
  if (keep.empty()) {
    throw std::invalid_argument("partial_trace: keep set must not be empty");
  }
  std::vector<bool> is_kept(reg.site_count(), false);
  for (std::size_t s : keep) {
    if (s >= reg.site_count()) {
      throw std::out_of_range("partial_trace: site " + std::to_string(s) + " out of range for " +
                              reg.to_string());
    }
    is_kept[s] = true;
  }
  IndexSplit split;
  for (std::size_t s = 0; s < reg.site_count(); ++s) {
    (is_kept[s] ? split.kept_dim : split.traced_dim) *= static_cast<Eigen::Index>(reg.dims()[s]);
  }
  const auto total = static_cast<Eigen::Index>(reg.total_dim());
  split.kept.resize(static_cast<std::size_t>(total));
  split.traced.resize(static_cast<std::size_t>(total));
  std::vector<std::size_t> digits(reg.site_count(), 0);
  for (Eigen::Index idx = 0; idx < total; ++idx) {
    Eigen::Index k = 0;
    Eigen::Index t = 0;
    for (std::size_t s = 0; s < reg.site_count(); ++s) {
      const auto d = static_cast<Eigen::Index>(reg.dims()[s]);
      const auto digit = static_cast<Eigen::Index>(digits[s]);
      if (is_kept[s]) {
        k = k * d + digit;
      } else {
        t = t * d + digit;
      }
    }
    split.kept[static_cast<std::size_t>(idx)] = k;
    split.traced[static_cast<std::size_t>(idx)] = t;
    // odometer increment, last site fastest
    for (std::size_t s = reg.site_count(); s-- > 0;) {
      if (++digits[s] < reg.dims()[s]) break;
      digits[s] = 0;
    }
  }
  return split;
}

}  // namespace

ComplexMatrix embed(const ComplexMatrix& local, std::size_t site, const Register& reg) {
  check_local(local, site, reg);
  return kron(kron(identity(reg.left_dim(site)), local), identity(reg.right_dim(site)));
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const Register& reg,
                            std::span<const std::size_t> keep) {
  check_square(m, reg);
  const IndexSplit split = split_indices(reg, keep);
  ComplexMatrix out = ComplexMatrix::Zero(split.kept_dim, split.kept_dim);
  const auto total = static_cast<Eigen::Index>(reg.total_dim());
  for (Eigen::Index j = 0; j < total; ++j) {
    const auto tj = split.traced[static_cast<std::size_t>(j)];
    const auto kj = split.kept[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < total; ++i) {
      if (split.traced[static_cast<std::size_t>(i)] == tj) {
        out(split.kept[static_cast<std::size_t>(i)], kj) += m(i, j);
      }
    }
  }
  return out;
}

ComplexMatrix partial_trace_pure(const ComplexVector& v, const Register& reg,
                                 std::span<const std::size_t> keep) {
  if (static_cast<std::size_t>(v.size()) != reg.total_dim()) {
    throw std::invalid_argument("partial_trace_pure: vector length " + std::to_string(v.size()) +
                                " does not match register " + reg.to_string());
  }
  const IndexSplit split = split_indices(reg, keep);
  ComplexMatrix psi = ComplexMatrix::Zero(split.kept_dim, split.traced_dim);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    psi(split.kept[static_cast<std::size_t>(i)], split.traced[static_cast<std::size_t>(i)]) = v(i);
  }
  return psi * psi.adjoint();
}

ComplexVector apply_local(const ComplexMatrix& local, std::size_t site, const Register& reg,
                          const ComplexVector& v) {
  check_local(local, site, reg);
  const auto left = static_cast<Eigen::Index>(reg.left_dim(site));
  const auto d = static_cast<Eigen::Index>(reg.dim(site));
  const auto right = static_cast<Eigen::Index>(reg.right_dim(site));
  ComplexVector out = ComplexVector::Zero(v.size());
  for (Eigen::Index l = 0; l < left; ++l) {
    // columns of this block are the `right` fibres along the site index
    Eigen::Map<const ComplexMatrix> in(v.data() + l * d * right, right, d);
    Eigen::Map<ComplexMatrix> res(out.data() + l * d * right, right, d);
    res.noalias() = in * local.transpose();
  }
  return out;
}

ComplexMatrix conjugate_local(const ComplexMatrix& local, std::size_t site, const Register& reg,
                              const ComplexMatrix& m) {
  check_square(m, reg);
  ComplexMatrix left_applied(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    left_applied.col(c) = apply_local(local, site, reg, m.col(c));
  }
  // (P M P^†) = (P (P M)^†)^†
  ComplexMatrix adj = left_applied.adjoint();
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < adj.cols(); ++c) {
    out.col(c) = apply_local(local, site, reg, adj.col(c));
  }
  return out.adjoint();
}

double max_abs_entry(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  return dev <= rel_tol * (1.0 + max_abs_entry(m));
}

std::vector<SpectralEntry> hermitian_eig_grouped(const ComplexMatrix& h, double group_tol) {
  if (h.rows() == 0 || !is_hermitian(h)) {
    throw std::invalid_argument("hermitian_eig_grouped: matrix is not Hermitian");
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig_grouped: eigensolver did not converge");
  }
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const ComplexMatrix& vectors = solver.eigenvectors();
  const double radius = values.cwiseAbs().maxCoeff();
  const double tol = group_tol * (1.0 + radius);

  std::vector<SpectralEntry> out;
  Eigen::Index hi = values.size() - 1;
  while (hi >= 0) {
    Eigen::Index lo = hi;
    while (lo > 0 && values(hi) - values(lo - 1) <= tol) --lo;
    const Eigen::Index count = hi - lo + 1;
    const auto block = vectors.middleCols(lo, count);
    out.push_back({values.segment(lo, count).mean(), block * block.adjoint()});
    hi = lo - 1;
  }
  return out;
}

}  // namespace qmerl
