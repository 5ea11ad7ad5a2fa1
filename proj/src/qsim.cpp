#include "rlab/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rlab/errors.hpp"
#include "rlab/sources.hpp"

namespace rlab {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_range(std::vector<std::string>& warnings, const char* name, double v, double lo, double hi) {
  if (v < lo || v > hi) {
    warnings.push_back(std::string(name) + " = " + std::to_string(v) + " outside [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

Matrix2 Matrix2::adjoint() const {
  return {{std::conj(e[0]), std::conj(e[2]), std::conj(e[1]), std::conj(e[3])}};
}

Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
  Matrix2 r;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  }
  return r;
}

Matrix2 operator*(Complex s, const Matrix2& a) {
  Matrix2 r = a;
  for (auto& v : r.e) v *= s;
  return r;
}

Matrix2 operator+(const Matrix2& a, const Matrix2& b) {
  Matrix2 r;
  for (std::size_t k = 0; k < 4; ++k) r.e[k] = a.e[k] + b.e[k];
  return r;
}

double max_abs_diff(const Matrix2& a, const Matrix2& b) {
  double m = 0;
  for (std::size_t k = 0; k < 4; ++k) m = std::max(m, std::abs(a.e[k] - b.e[k]));
  return m;
}

Unitary2 make_unitary(double omega, double alpha, double phi, double beta) {
  for (double v : {omega, alpha, phi, beta}) {
    if (!std::isfinite(v)) throw InvalidArgument("unitary parameters must be finite");
  }
  using std::numbers::pi;
  Unitary2 u;
  check_range(u.warnings, "omega", omega, -pi, pi);
  check_range(u.warnings, "beta", beta, -pi, pi);
  check_range(u.warnings, "alpha", alpha, -pi / 2, pi / 2);
  check_range(u.warnings, "phi", phi, -pi / 2, pi / 2);

  const double c = std::cos(omega);
  const double s = std::sin(omega);
  Matrix2 t;
  t(0, 0) = std::exp(kI * alpha) * c;
  t(0, 1) = -std::exp(-kI * phi) * s;
  t(1, 0) = std::exp(kI * phi) * s;
  t(1, 1) = std::exp(-kI * alpha) * c;
  u.matrix = std::exp(-kI * beta) * t;
  u.params = SplitterParams{omega, alpha, phi, beta};
  return u;
}

Unitary2 hadamard() {
  using std::numbers::pi;
  return make_unitary(pi / 4, -pi / 2, -pi / 2, -pi / 2);
}

Unitary2 identity_splitter() { return make_unitary(0, 0, 0, 0); }

Unitary2 compose(const Unitary2& outer, const Unitary2& inner) {
  Unitary2 u;
  u.matrix = outer.matrix * inner.matrix;
  return u;
}

PureState ket0() { return {Complex{1}, Complex{0}}; }
PureState ket1() { return {Complex{0}, Complex{1}}; }
PureState ket0_prime() { return evolve(hadamard(), ket0()); }
PureState ket1_prime() { return evolve(hadamard(), ket1()); }

DensityMatrix to_density(const PureState& s) {
  DensityMatrix d;
  d.rho(0, 0) = s.a0 * std::conj(s.a0);
  d.rho(0, 1) = s.a0 * std::conj(s.a1);
  d.rho(1, 0) = s.a1 * std::conj(s.a0);
  d.rho(1, 1) = s.a1 * std::conj(s.a1);
  return d;
}

void validate(const QState& s) {
  if (const auto* p = std::get_if<PureState>(&s)) {
    const double n = p->norm_squared();
    if (!std::isfinite(n) || std::abs(n - 1.0) > kQsimTolerance) {
      throw InvalidState("pure state norm^2 = " + std::to_string(n));
    }
    return;
  }
  const Matrix2& r = std::get<DensityMatrix>(s).rho;
  if (max_abs_diff(r, r.adjoint()) > kQsimTolerance) throw InvalidState("density matrix is not Hermitian");
  const double tr = r.trace().real();
  if (std::abs(tr - 1.0) > kQsimTolerance) throw InvalidState("density matrix trace = " + std::to_string(tr));
  const double a = r(0, 0).real();
  const double d = r(1, 1).real();
  const double min_eig = 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(r(0, 1)));
  if (min_eig < -kQsimTolerance) throw InvalidState("density matrix has eigenvalue " + std::to_string(min_eig));
}

PureState evolve(const Unitary2& u, const PureState& s) {
  const Matrix2& m = u.matrix;
  return {m(0, 0) * s.a0 + m(0, 1) * s.a1, m(1, 0) * s.a0 + m(1, 1) * s.a1};
}

DensityMatrix evolve(const Unitary2& u, const DensityMatrix& s) {
  return {u.matrix * s.rho * u.matrix.adjoint()};
}

QState evolve(const Unitary2& u, const QState& s) {
  return std::visit([&](const auto& st) -> QState { return evolve(u, st); }, s);
}

double born_probability(const QState& s, int outcome) {
  if (outcome != 0 && outcome != 1) throw InvalidArgument("outcome must be 0 or 1");
  validate(s);
  if (const auto* p = std::get_if<PureState>(&s)) return std::norm(outcome == 0 ? p->a0 : p->a1);
  const Matrix2& r = std::get<DensityMatrix>(s).rho;
  return r(outcome, outcome).real();
}

QState demon_state(double nu, double t, DemonMode mode) {
  if (!(nu > 0) || !std::isfinite(nu)) throw InvalidArgument("demon frequency must be positive");
  if (!std::isfinite(t)) throw InvalidArgument("time must be finite");
  const double theta = 2 * std::numbers::pi * nu * t;
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const PureState p0 = ket0_prime();
  const PureState p1 = ket1_prime();
  if (mode == DemonMode::pure) return PureState{s * p0.a0 + c * p1.a0, s * p0.a1 + c * p1.a1};
  // Squared weights keep the trace at one.
  return DensityMatrix{Complex{s * s} * to_density(p0).rho + Complex{c * c} * to_density(p1).rho};
}

BitString sample_bits(const StateFunction& state_fn, const Unitary2& splitter, double rate,
                      std::uint64_t n_bits, std::uint64_t seed) {
  if (!(rate > 0) || !std::isfinite(rate)) throw InvalidArgument("sampling rate must be positive");
  XorShift64Star rng(seed);
  BitWriter out(n_bits);
  for (std::uint64_t i = 0; i < n_bits; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double p0 = born_probability(evolve(splitter, state_fn(t)), 0);
    out.push(!(rng.uniform_open() < p0));
  }
  return std::move(out).finish();
}

}  // namespace rlab
