#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

// Shared aliases and tolerance constants for the unambiguous-discrimination
// simulator.  All dense linear algebra is backed by Eigen; matrices are
// complex double throughout.
namespace udsim {

using complex = std::complex<double>;
using cmatrix = Eigen::MatrixXcd;
using cvector = Eigen::VectorXcd;
using rmatrix = Eigen::MatrixXd;
using rvector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;

// Tolerances used by validating constructors and contract checks.  Values
// are part of the numerical contract of the library, not tuning knobs.
namespace tol {
inline constexpr double state_norm = 1e-12;      // unit-norm states
inline constexpr double hermitian = 1e-12;       // Hermiticity of densities
inline constexpr double trace_one = 1e-12;       // unit trace of densities
inline constexpr double psd = 1e-10;             // eigenvalue floor (>= -psd)
inline constexpr double cptp_strict = 1e-10;     // built-in channel families
inline constexpr double cptp_accept = 1e-8;      // user-supplied Kraus sets
inline constexpr double isometry = 1e-9;         // dilation block columns
inline constexpr double unitary = 1e-9;          // completed joint unitaries
inline constexpr double born = 1e-9;             // Born-rule consistency
inline constexpr double support_cut = 1e-9;      // eigenvalue cut, rel. trace
inline constexpr double pinv_cut = 1e-10;        // sigma cut, rel. sigma_max
inline constexpr double bisection = 1e-12;       // POVM scale search width
inline constexpr double truncation = 1e-10;      // Fock-tail leakage bound
}  // namespace tol

// Dimension bookkeeping: d is the logical qudit dimension the experiment
// addresses, d_trunc the Fock truncation operators are stored at.
struct hilbert_dim {
  int d;
  int d_trunc;

  explicit hilbert_dim(int d_, int d_trunc_ = -1)
      : d(d_), d_trunc(d_trunc_ < 0 ? d_ : d_trunc_) {
    if (d < 2) throw std::invalid_argument("hilbert_dim: d must be >= 2");
    if (d_trunc < d)
      throw std::invalid_argument("hilbert_dim: d_trunc must be >= d");
  }
};

}  // namespace udsim
