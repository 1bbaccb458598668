#include "qmerl/state.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace qmerl {

struct StateAccess {
  static QuantumState pure(Register reg, ComplexVector v) { return {std::move(reg), std::move(v)}; }
  static QuantumState mixed(Register reg, ComplexMatrix m) { return {std::move(reg), std::move(m)}; }
};

namespace {

constexpr double kNormTol = 1e-10;
constexpr double kImagTol = 1e-9;

void require_same_register(const Register& a, const Register& b, const char* op) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(op) + ": register mismatch " + a.to_string() +
                                " vs " + b.to_string());
  }
}

double real_trace_product(const ComplexMatrix& rho, const ComplexMatrix& op) {
  // Tr(rho op) without forming the product
  const Complex t = (rho.transpose().cwiseProduct(op)).sum();
  if (std::abs(t.imag()) > kImagTol * (1.0 + std::abs(t.real()))) {
    throw std::runtime_error("expectation has imaginary residue " + std::to_string(t.imag()));
  }
  return t.real();
}

}  // namespace

QuantumState QuantumState::pure(Register reg, ComplexVector amplitudes) {
  if (static_cast<std::size_t>(amplitudes.size()) != reg.total_dim()) {
    throw std::invalid_argument("pure state has " + std::to_string(amplitudes.size()) +
                                " amplitudes but register " + reg.to_string() + " needs " +
                                std::to_string(reg.total_dim()));
  }
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTol) {
    throw std::invalid_argument("pure state is not normalized (sum |amp|^2 = " +
                                std::to_string(norm2) + ")");
  }
  return {std::move(reg), std::move(amplitudes)};
}

QuantumState QuantumState::normalized(Register reg, ComplexVector amplitudes) {
  const double n = amplitudes.norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  amplitudes /= n;
  return pure(std::move(reg), std::move(amplitudes));
}

QuantumState QuantumState::mixed(Register reg, ComplexMatrix rho) {
  if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != reg.total_dim()) {
    throw std::invalid_argument("density matrix shape does not match register " +
                                reg.to_string());
  }
  if (!is_hermitian(rho)) throw std::invalid_argument("density matrix is not Hermitian");
  const Complex tr = rho.trace();
  if (std::abs(tr - Complex(1.0)) > kNormTol) {
    throw std::invalid_argument("density matrix trace is " + std::to_string(tr.real()));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (rho + rho.adjoint()),
                                                      Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-9) {
    throw std::invalid_argument("density matrix has negative eigenvalue " +
                                std::to_string(solver.eigenvalues().minCoeff()));
  }
  return {std::move(reg), std::move(rho)};
}

const ComplexVector& QuantumState::amplitudes() const {
  if (!is_pure()) throw std::logic_error("amplitudes() called on a mixed state");
  return std::get<ComplexVector>(data_);
}

const ComplexMatrix& QuantumState::density() const {
  if (is_pure()) throw std::logic_error("density() called on a pure state");
  return std::get<ComplexMatrix>(data_);
}

ComplexMatrix QuantumState::density_matrix() const {
  if (is_pure()) {
    const auto& v = amplitudes();
    return v * v.adjoint();
  }
  return density();
}

ComplexMatrix QuantumState::reduced(std::span<const std::size_t> keep) const {
  return is_pure() ? partial_trace_pure(amplitudes(), reg_, keep)
                   : partial_trace(density(), reg_, keep);
}

ComplexMatrix QuantumState::reduced_site(std::size_t site) const {
  const std::array<std::size_t, 1> keep{site};
  return reduced(keep);
}

QuantumState QuantumState::tensor(const QuantumState& other) const {
  Register reg = reg_.concat(other.reg_);
  if (is_pure() && other.is_pure()) {
    ComplexVector v = kron(amplitudes(), other.amplitudes());
    return {std::move(reg), std::move(v)};
  }
  return {std::move(reg), kron(density_matrix(), other.density_matrix())};
}

Observable::Observable(Register reg, std::size_t site, ComplexMatrix local, double group_tol)
    : reg_(std::move(reg)), site_(site), local_(std::move(local)) {
  const std::size_t d = reg_.dim(site_);
  if (local_.rows() != local_.cols() || static_cast<std::size_t>(local_.rows()) != d) {
    throw std::invalid_argument("observable on site " + std::to_string(site_) + " must be " +
                                std::to_string(d) + "x" + std::to_string(d) + ", got " +
                                std::to_string(local_.rows()) + "x" +
                                std::to_string(local_.cols()));
  }
  if (!is_hermitian(local_)) {
    throw std::invalid_argument("observable on site " + std::to_string(site_) +
                                " is not Hermitian");
  }
  spectrum_ = hermitian_eig_grouped(local_, group_tol);
}

double expectation(const Observable& q, const QuantumState& s) {
  require_same_register(q.reg(), s.reg(), "expectation");
  return real_trace_product(s.reduced_site(q.site()), q.matrix());
}

double variance(const Observable& q, const QuantumState& s) {
  require_same_register(q.reg(), s.reg(), "variance");
  const ComplexMatrix rho = s.reduced_site(q.site());
  const double mean = real_trace_product(rho, q.matrix());
  const double second = real_trace_product(rho, q.matrix() * q.matrix());
  const double v = second - mean * mean;
  if (v < 0.0 && v >= -1e-10) return 0.0;
  return v;
}

std::vector<OutcomeBranch> measure_branches(const Observable& o, const QuantumState& s,
                                            double prune_tol) {
  require_same_register(o.reg(), s.reg(), "measure_branches");
  std::vector<OutcomeBranch> out;
  out.reserve(o.spectrum().size());
  for (const auto& entry : o.spectrum()) {
    OutcomeBranch branch;
    branch.eigenvalue = entry.eigenvalue;
    if (s.is_pure()) {
      ComplexVector projected = apply_local(entry.projector, o.site(), s.reg(), s.amplitudes());
      branch.probability = projected.squaredNorm();
      if (branch.probability >= prune_tol) {
        projected /= std::sqrt(branch.probability);
        branch.post_state = StateAccess::pure(s.reg(), std::move(projected));
      }
    } else {
      ComplexMatrix projected = conjugate_local(entry.projector, o.site(), s.reg(), s.density());
      branch.probability = projected.trace().real();
      if (branch.probability >= prune_tol) {
        projected /= branch.probability;
        branch.post_state = StateAccess::mixed(s.reg(), std::move(projected));
      }
    }
    out.push_back(std::move(branch));
  }
  return out;
}

RobertsonTerms robertson_check(const Observable& r, const Observable& s, const QuantumState& st) {
  require_same_register(r.reg(), s.reg(), "robertson_check");
  require_same_register(r.reg(), st.reg(), "robertson_check");
  const double lhs = variance(r, st) * variance(s, st);
  if (r.site() != s.site()) return {lhs, 0.0};  // operators on different sites commute
  const ComplexMatrix comm = r.matrix() * s.matrix() - s.matrix() * r.matrix();
  const ComplexMatrix rho = st.reduced_site(r.site());
  const Complex mean = (rho.transpose().cwiseProduct(comm)).sum();
  return {lhs, 0.25 * std::norm(mean)};
}

namespace {

ComplexVector gaussian_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return v;
}

}  // namespace

QuantumState haar_random_pure(const Register& reg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ComplexVector v = gaussian_vector(reg.total_dim(), rng);
  v /= v.norm();
  return StateAccess::pure(reg, std::move(v));
}

ComplexMatrix random_hermitian(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ComplexMatrix g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index c = 0; c < g.cols(); ++c) g.col(c) = gaussian_vector(dim, rng);
  return 0.5 * (g + g.adjoint());
}

}  // namespace qmerl
