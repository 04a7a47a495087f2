// Copyright 2026 The lgcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LGCERT_QCORE_HPP_
#define LGCERT_QCORE_HPP_

// Dense complex linear algebra for few-level systems: states, observables,
// unitary evolution and the dephasing / clumsiness channels.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lgcert {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Tolerance for algebraic identities (hermiticity, trace, idempotence).
inline constexpr double kAlgebraicTol = 1e-12;
/// Tolerance on eigenvalue positivity; absorbs accumulated rounding.
inline constexpr double kPositivityTol = 1e-10;

/// Raised whenever a value would violate a type invariant. The message
/// names the offending field so that input layers can surface it verbatim.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline double max_abs_entry(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const ComplexMatrix& m) {
  return max_abs_entry(m - m.adjoint());
}

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void require_square(const ComplexMatrix& m, const std::string& what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw InvariantError(what + ": matrix must be square and non-empty (got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ")");
  }
  if (!all_finite(m)) throw InvariantError(what + ": entries must be finite");
}

inline void require_hermitian(const ComplexMatrix& m, const std::string& what) {
  const double defect = hermiticity_defect(m);
  if (defect > kAlgebraicTol) {
    throw InvariantError(what + ": not Hermitian (max |M - M^dagger| = " +
                         fmt(defect) + ")");
  }
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b,
                             const std::string& what) {
  if (a != b) {
    throw std::invalid_argument(what + ": dimension mismatch (" +
                                std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  }
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) * 0.5;
}

}  // namespace detail

/// Hermitian, positive semidefinite, unit-trace operator.
class DensityOperator {
 public:
  explicit DensityOperator(ComplexMatrix m) : matrix_(std::move(m)) {
    validate();
  }

  static DensityOperator maximally_mixed(Eigen::Index dim) {
    return DensityOperator(ComplexMatrix::Identity(dim, dim) /
                           static_cast<double>(dim));
  }

  /// |k><k| in the computational basis.
  static DensityOperator basis_state(Eigen::Index dim, Eigen::Index k) {
    if (k < 0 || k >= dim) {
      throw InvariantError("basis_state: index out of range");
    }
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(k, k) = 1.0;
    return DensityOperator(std::move(m));
  }

  static DensityOperator pure(const Eigen::VectorXcd& psi) {
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw InvariantError("pure: zero state vector");
    const Eigen::VectorXcd v = psi / norm;
    return DensityOperator(detail::hermitian_part(v * v.adjoint()));
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  void validate() const {
    detail::require_square(matrix_, "density operator");
    detail::require_hermitian(matrix_, "density operator");
    const double trace = matrix_.trace().real();
    if (std::abs(trace - 1.0) > kAlgebraicTol) {
      throw InvariantError("density operator: trace = " + detail::fmt(trace) +
                           ", expected 1 (tolerance 1e-12)");
    }
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        matrix_, Eigen::EigenvaluesOnly);
    const double lowest = es.eigenvalues().minCoeff();
    if (lowest < -kPositivityTol) {
      throw InvariantError("density operator: eigenvalue " +
                           detail::fmt(lowest) + " is negative");
    }
  }

  ComplexMatrix matrix_;
};

/// Hermitian generator of the dynamics (hbar = 1). The eigendecomposition is
/// computed once at construction; propagators are built from it exactly.
class Hamiltonian {
 public:
  explicit Hamiltonian(ComplexMatrix m) : matrix_(std::move(m)) {
    detail::require_square(matrix_, "hamiltonian");
    detail::require_hermitian(matrix_, "hamiltonian");
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        detail::hermitian_part(matrix_));
    energies_ = es.eigenvalues();
    basis_ = es.eigenvectors();
  }

  static Hamiltonian zero(Eigen::Index dim) {
    return Hamiltonian(ComplexMatrix::Zero(dim, dim));
  }

  /// (omega / 2) sigma_x on a qubit.
  static Hamiltonian precession(double omega) {
    ComplexMatrix m(2, 2);
    m << 0.0, omega / 2.0, omega / 2.0, 0.0;
    return Hamiltonian(std::move(m));
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  /// exp(-i H t).
  ComplexMatrix propagator(double t) const {
    if (!std::isfinite(t)) throw std::invalid_argument("propagator: non-finite time");
    Eigen::VectorXcd phases(energies_.size());
    for (Eigen::Index k = 0; k < energies_.size(); ++k) {
      phases(k) = std::polar(1.0, -energies_(k) * t);
    }
    return basis_ * phases.asDiagonal() * basis_.adjoint();
  }

 private:
  ComplexMatrix matrix_;
  Eigen::VectorXd energies_;
  ComplexMatrix basis_;
};

/// Projective decomposition sum_n P_n = 1 with one outcome label per
/// projector.
class ManyValuedObservable {
 public:
  ManyValuedObservable(std::vector<ComplexMatrix> projectors,
                       std::vector<int> labels)
      : projectors_(std::move(projectors)), labels_(std::move(labels)) {
    validate();
  }

  const std::vector<ComplexMatrix>& projectors() const { return projectors_; }
  const std::vector<int>& labels() const { return labels_; }
  std::size_t outcomes() const { return projectors_.size(); }
  Eigen::Index dim() const { return projectors_.front().rows(); }

 private:
  void validate() const {
    if (projectors_.empty()) throw InvariantError("observable: no projectors");
    if (projectors_.size() != labels_.size()) {
      throw InvariantError("observable: projector/label count mismatch");
    }
    const Eigen::Index d = projectors_.front().rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < projectors_.size(); ++i) {
      const auto& p = projectors_[i];
      const std::string name = "observable projector " + std::to_string(i);
      detail::require_square(p, name);
      detail::require_same_dim(p.rows(), d, name);
      detail::require_hermitian(p, name);
      if (detail::max_abs_entry(p * p - p) > kAlgebraicTol) {
        throw InvariantError(name + ": not idempotent");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (detail::max_abs_entry(p * projectors_[j]) > kAlgebraicTol) {
          throw InvariantError(name + ": not orthogonal to projector " +
                               std::to_string(j));
        }
        if (labels_[i] == labels_[j]) {
          throw InvariantError("observable: duplicate outcome label " +
                               std::to_string(labels_[i]));
        }
      }
      sum += p;
    }
    if (detail::max_abs_entry(sum - ComplexMatrix::Identity(d, d)) >
        kAlgebraicTol) {
      throw InvariantError("observable: projectors do not sum to identity");
    }
  }

  std::vector<ComplexMatrix> projectors_;
  std::vector<int> labels_;
};

/// Operator Q with Q^2 = 1. Projectors are P_s = (1 + s Q) / 2, always built
/// from Q itself rather than from computed eigenvectors.
class DichotomicObservable {
 public:
  explicit DichotomicObservable(ComplexMatrix q) : matrix_(std::move(q)) {
    detail::require_square(matrix_, "observable");
    detail::require_hermitian(matrix_, "observable");
    const auto d = matrix_.rows();
    if (detail::max_abs_entry(matrix_ * matrix_ -
                              ComplexMatrix::Identity(d, d)) > kAlgebraicTol) {
      throw InvariantError("observable: Q^2 != identity (eigenvalues must be +-1)");
    }
  }

  static DichotomicObservable sigma_z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return DichotomicObservable(std::move(m));
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  ComplexMatrix projector(int sign) const {
    if (sign != 1 && sign != -1) {
      throw std::invalid_argument("projector: sign must be +1 or -1");
    }
    const auto d = matrix_.rows();
    return (ComplexMatrix::Identity(d, d) + static_cast<double>(sign) * matrix_) *
           0.5;
  }

  /// The same measurement as a two-outcome decomposition, labels (+1, -1).
  ManyValuedObservable projective() const {
    return ManyValuedObservable({projector(+1), projector(-1)}, {+1, -1});
  }

 private:
  ComplexMatrix matrix_;
};

struct ClumsinessModel {
  enum class Kind { none, depolarizing, unitary_kick };

  Kind kind = Kind::none;
  double strength = 0.0;
  std::optional<Hamiltonian> generator;

  static ClumsinessModel none() { return {}; }

  static ClumsinessModel depolarizing(double eps) {
    ClumsinessModel m{Kind::depolarizing, eps, std::nullopt};
    m.validate();
    return m;
  }

  static ClumsinessModel unitary_kick(double angle, Hamiltonian generator) {
    ClumsinessModel m{Kind::unitary_kick, angle, std::move(generator)};
    m.validate();
    return m;
  }

  void validate() const {
    switch (kind) {
      case Kind::none:
        return;
      case Kind::depolarizing:
        if (!(strength >= 0.0 && strength <= 1.0)) {
          throw InvariantError("clumsiness: depolarizing strength " +
                               detail::fmt(strength) + " outside [0, 1]");
        }
        return;
      case Kind::unitary_kick:
        if (!std::isfinite(strength)) {
          throw InvariantError("clumsiness: kick angle must be finite");
        }
        if (!generator) throw InvariantError("clumsiness: kick needs a generator");
        return;
    }
  }
};

namespace detail {

// Linear (trace-scaling) action of the channels on possibly unnormalized
// operators; the branch propagators in protocols rely on this.
inline ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& m) {
  return u * m * u.adjoint();
}

inline ComplexMatrix dephase_raw(const ComplexMatrix& m,
                                 const std::vector<ComplexMatrix>& projectors) {
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  for (const auto& p : projectors) out += p * m * p;
  return out;
}

inline ComplexMatrix clumsiness_raw(const ComplexMatrix& m,
                                    const ClumsinessModel& model) {
  switch (model.kind) {
    case ClumsinessModel::Kind::none:
      return m;
    case ClumsinessModel::Kind::depolarizing: {
      const auto d = m.rows();
      return (1.0 - model.strength) * m +
             model.strength * m.trace() *
                 ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    }
    case ClumsinessModel::Kind::unitary_kick:
      require_same_dim(model.generator->dim(), m.rows(), "clumsiness");
      return conjugate(model.generator->propagator(model.strength), m);
  }
  return m;
}

}  // namespace detail

/// exp(-iHt) rho exp(iHt).
inline DensityOperator evolve(const DensityOperator& rho, const Hamiltonian& h,
                              double t) {
  detail::require_same_dim(rho.dim(), h.dim(), "evolve");
  if (!std::isfinite(t)) throw std::invalid_argument("evolve: non-finite time");
  return DensityOperator(detail::hermitian_part(
      detail::conjugate(h.propagator(t), rho.matrix())));
}

/// Heisenberg-picture projector exp(iHt) P_s exp(-iHt).
inline ComplexMatrix heisenberg_projector(const DichotomicObservable& q,
                                          int sign, const Hamiltonian& h,
                                          double t) {
  detail::require_same_dim(q.dim(), h.dim(), "heisenberg_projector");
  const ComplexMatrix u = h.propagator(t);
  return detail::hermitian_part(u.adjoint() * q.projector(sign) * u);
}

inline DensityOperator dephase(const DensityOperator& rho,
                               const ManyValuedObservable& q) {
  detail::require_same_dim(rho.dim(), q.dim(), "dephase");
  return DensityOperator(
      detail::hermitian_part(detail::dephase_raw(rho.matrix(), q.projectors())));
}

inline DensityOperator dephase(const DensityOperator& rho,
                               const DichotomicObservable& q) {
  return dephase(rho, q.projective());
}

/// Artificial dephasing: the average of U rho U^dagger over `samples` random
/// phases phi ~ U[0, 2pi), U = exp(-i phi Q / 2).
///
/// Since Q^2 = 1, U = cos(phi/2) - i sin(phi/2) Q, so the average reduces to
///   <c^2> rho + <s^2> Q rho Q + i <cs> (rho Q - Q rho)
/// with c, s the half-angle cosine and sine averaged over the draws.
inline DensityOperator random_phase_dephase(const DensityOperator& rho,
                                            const DichotomicObservable& q,
                                            std::uint64_t samples,
                                            std::uint64_t seed) {
  if (samples == 0) {
    throw std::invalid_argument("random_phase_dephase: samples must be >= 1");
  }
  detail::require_same_dim(rho.dim(), q.dim(), "random_phase_dephase");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  double cc = 0.0, ss = 0.0, cs = 0.0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    const double half = 0.5 * phase(rng);
    const double c = std::cos(half), s = std::sin(half);
    cc += c * c;
    ss += s * s;
    cs += c * s;
  }
  const double n = static_cast<double>(samples);
  const ComplexMatrix& r = rho.matrix();
  const ComplexMatrix& qm = q.matrix();
  const ComplexMatrix avg = (cc / n) * r + (ss / n) * (qm * r * qm) +
                            Complex(0.0, cs / n) * (r * qm - qm * r);
  return DensityOperator(detail::hermitian_part(avg));
}

inline DensityOperator apply_clumsiness(const DensityOperator& rho,
                                        const ClumsinessModel& model) {
  model.validate();
  if (model.kind == ClumsinessModel::Kind::none) return rho;
  return DensityOperator(
      detail::hermitian_part(detail::clumsiness_raw(rho.matrix(), model)));
}

}  // namespace lgcert

#endif  // LGCERT_QCORE_HPP_
