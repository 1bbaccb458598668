#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qmerl {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Ordered list of subsystem dimensions. Site 0 is the most significant
/// index of the composite basis.
class Register {
 public:
  Register() = default;
  explicit Register(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t site_count() const { return dims_.size(); }
  std::size_t dim(std::size_t site) const;
  std::size_t total_dim() const { return total_; }

  // Product of dimensions strictly before / after `site`.
  std::size_t left_dim(std::size_t site) const;
  std::size_t right_dim(std::size_t site) const;

  Register concat(const Register& other) const;

  bool operator==(const Register& other) const { return dims_ == other.dims_; }

  std::string to_string() const;

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 1;
};

ComplexMatrix identity(std::size_t dim);

/// Kronecker product, first factor most significant.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// I ⊗ ... ⊗ local ⊗ ... ⊗ I with `local` at `site`.
ComplexMatrix embed(const ComplexMatrix& local, std::size_t site, const Register& reg);

/// Reduced operator on `keep` (sites in ascending order define the output
/// ordering). Throws std::invalid_argument on an empty keep set.
ComplexMatrix partial_trace(const ComplexMatrix& m, const Register& reg,
                            std::span<const std::size_t> keep);

/// Same as partial_trace(|v><v|, reg, keep) without forming |v><v|.
ComplexMatrix partial_trace_pure(const ComplexVector& v, const Register& reg,
                                 std::span<const std::size_t> keep);

/// (I ⊗ local ⊗ I) v, computed site-locally.
ComplexVector apply_local(const ComplexMatrix& local, std::size_t site, const Register& reg,
                          const ComplexVector& v);

/// (I ⊗ local ⊗ I) m (I ⊗ local ⊗ I)^†, computed site-locally.
ComplexMatrix conjugate_local(const ComplexMatrix& local, std::size_t site, const Register& reg,
                              const ComplexMatrix& m);

double max_abs_entry(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-10);

struct SpectralEntry {
  double eigenvalue;
  ComplexMatrix projector;
};

inline constexpr double kDefaultGroupTol = 1e-9;

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted
/// descending; eigenvalues closer than group_tol * (1 + spectral radius)
/// share one projector onto the merged eigenspace.
std::vector<SpectralEntry> hermitian_eig_grouped(const ComplexMatrix& h,
                                                 double group_tol = kDefaultGroupTol);

}  // namespace qmerl
