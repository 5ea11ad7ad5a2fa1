#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rlab/bitstream.hpp"

// Two-level quantum simulator for beam-splitter random bit sources.

namespace rlab {

using Complex = std::complex<double>;

/// Tolerance for every matrix and state invariant in this module.
inline constexpr double kQsimTolerance = 1e-12;

/// Row-major 2x2 complex matrix.
struct Matrix2 {
  std::array<Complex, 4> e{};

  Complex operator()(int r, int c) const { return e[static_cast<std::size_t>(2 * r + c)]; }
  Complex& operator()(int r, int c) { return e[static_cast<std::size_t>(2 * r + c)]; }

  static Matrix2 identity() { return {{Complex{1}, Complex{0}, Complex{0}, Complex{1}}}; }
  Matrix2 adjoint() const;
  Complex trace() const { return e[0] + e[3]; }

  friend Matrix2 operator*(const Matrix2& a, const Matrix2& b);
  friend Matrix2 operator*(Complex s, const Matrix2& a);
  friend Matrix2 operator+(const Matrix2& a, const Matrix2& b);
  friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

/// Largest absolute entry of a - b.
double max_abs_diff(const Matrix2& a, const Matrix2& b);

struct PureState {
  Complex a0;
  Complex a1;

  double norm_squared() const { return std::norm(a0) + std::norm(a1); }
  friend bool operator==(const PureState&, const PureState&) = default;
};

struct DensityMatrix {
  Matrix2 rho;
  friend bool operator==(const DensityMatrix&, const DensityMatrix&) = default;
};

using QState = std::variant<PureState, DensityMatrix>;

struct SplitterParams {
  double omega = 0;
  double alpha = 0;
  double phi = 0;
  double beta = 0;
  friend bool operator==(const SplitterParams&, const SplitterParams&) = default;
};

struct Unitary2 {
  Matrix2 matrix = Matrix2::identity();
  std::optional<SplitterParams> params;  // set when built by make_unitary
  std::vector<std::string> warnings;     // parameters outside their canonical ranges

  friend bool operator==(const Unitary2& a, const Unitary2& b) {
    return a.matrix == b.matrix && a.params == b.params;
  }
};

/// e^{-i beta} times the SU(2) matrix
///   [ e^{i alpha} cos(omega)   -e^{-i phi} sin(omega) ]
///   [ e^{i phi}   sin(omega)    e^{-i alpha} cos(omega) ].
/// Canonical ranges are -pi <= beta, omega <= pi and -pi/2 <= alpha, phi <= pi/2;
/// values outside only add warnings. Non-finite parameters throw InvalidArgument.
Unitary2 make_unitary(double omega, double alpha, double phi, double beta);

/// (1/sqrt 2) [[1, 1], [1, -1]], built from the general form with
/// omega = pi/4 and alpha = beta = phi = -pi/2.
Unitary2 hadamard();
Unitary2 identity_splitter();
Unitary2 compose(const Unitary2& outer, const Unitary2& inner);

PureState ket0();
PureState ket1();
/// H|0> and H|1>.
PureState ket0_prime();
PureState ket1_prime();

DensityMatrix to_density(const PureState& s);

/// Throws InvalidState when the invariants (unit norm; or Hermitian, unit
/// trace, positive semidefinite) are violated beyond kQsimTolerance.
void validate(const QState& s);

QState evolve(const Unitary2& u, const QState& s);
PureState evolve(const Unitary2& u, const PureState& s);
DensityMatrix evolve(const Unitary2& u, const DensityMatrix& s);

/// Born rule: Tr[rho |outcome><outcome|]. outcome must be 0 or 1.
double born_probability(const QState& s, int outcome);

enum class DemonMode { pure, mixed };

/// The oscillating source. With theta = 2 pi nu t:
///   pure:  sin(theta)|0'> + cos(theta)|1'>
///   mixed: sin^2(theta)|0'><0'| + cos^2(theta)|1'><1'|
/// nu <= 0 throws InvalidArgument.
QState demon_state(double nu, double t, DemonMode mode);

using StateFunction = std::function<QState(double)>;

/// Sample i is taken at t = i / rate: the state is passed through `splitter`
/// and measured, the outcome drawn from the reference PRNG seeded by `seed`.
BitString sample_bits(const StateFunction& state_fn, const Unitary2& splitter, double rate,
                      std::uint64_t n_bits, std::uint64_t seed);

}  // namespace rlab
