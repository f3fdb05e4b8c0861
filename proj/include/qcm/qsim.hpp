#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qcm/random.hpp"

/// Dense statevector simulator. Qubit 0 is the least-significant bit of the
/// basis index. No noise, no circuit IR: gates act on the amplitudes directly.
namespace qcm::qsim {

using Amplitude = std::complex<double>;
using AmplitudeSpan = std::span<Amplitude>;

inline constexpr int kDefaultQubitCap = 24;

/// Requested register exceeds the simulator's qubit cap.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

class StateVector {
public:
    /// |0...0> on `n_qubits` qubits. Throws CapacityError outside [1, cap].
    explicit StateVector(int n_qubits, int qubit_cap = kDefaultQubitCap);

    /// Takes ownership of `amplitudes`; the size must be a power of two >= 2.
    static StateVector from_amplitudes(std::vector<Amplitude> amplitudes);

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t dimension() const noexcept { return amps_.size(); }
    AmplitudeSpan amplitudes() noexcept { return amps_; }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    const Amplitude& operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const noexcept;

private:
    StateVector() = default;
    int n_qubits_ = 0;
    std::vector<Amplitude> amps_;
};

StateVector init_state(int n_qubits, int qubit_cap = kDefaultQubitCap);

/// Unitary acting in place on a contiguous block of 2^w amplitudes.
using SliceUnitary = std::function<void(AmplitudeSpan)>;

/// Row-major dense d x d complex matrix, used to cache powers of small unitaries.
class DenseMatrix {
public:
    explicit DenseMatrix(std::size_t dim = 0);
    static DenseMatrix identity(std::size_t dim);
    /// Column k is `unitary` applied to basis vector k.
    static DenseMatrix from_unitary(std::size_t dim, const SliceUnitary& unitary);

    std::size_t dim() const noexcept { return dim_; }
    Amplitude& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const Amplitude& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    DenseMatrix operator*(const DenseMatrix& rhs) const;
    DenseMatrix power(std::uint64_t exponent) const;
    void apply(AmplitudeSpan v) const;

private:
    std::size_t dim_;
    std::vector<Amplitude> data_;
};

// Gate kinds --------------------------------------------------------------

struct H { int qubit; };
struct X { int qubit; };
struct Ry { int qubit; double angle; };
/// O_f: negates every amplitude whose basis index satisfies the predicate.
struct PhaseFlipIf { std::function<bool(std::uint64_t)> predicate; };
/// Ry on `target` with the angle chosen per basis index of the remaining
/// qubits (the callback sees the index with the target bit cleared).
struct ControlledRy { int target; std::function<double(std::uint64_t)> angle; };
/// diag(1, 1, 1, e^{i phi}) on (control, target).
struct ControlledPhase { int control; int target; double phi; };
struct Swap { int a; int b; };
/// unitary^exponent on the low `work_qubits` qubits wherever `control` is 1.
struct ControlledUPower {
    int control;
    int work_qubits;
    SliceUnitary unitary;
    std::uint64_t exponent;
};

using Gate = std::variant<H, X, Ry, PhaseFlipIf, ControlledRy, ControlledPhase, Swap, ControlledUPower>;

/// Span overloads let callers act on a sub-register slice; the span size
/// must be a power of two. Invalid qubit indices throw std::out_of_range.
void apply_gate(AmplitudeSpan amps, const Gate& gate);
void apply_gate(StateVector& state, const Gate& gate);

void apply_h(AmplitudeSpan amps, int qubit);
void apply_x(AmplitudeSpan amps, int qubit);
void apply_ry(AmplitudeSpan amps, int qubit, double angle);
void apply_phase_flip_if(AmplitudeSpan amps, const std::function<bool(std::uint64_t)>& predicate);
void apply_controlled_ry(AmplitudeSpan amps, int target, const std::function<double(std::uint64_t)>& angle);
void apply_controlled_phase(AmplitudeSpan amps, int control, int target, double phi);
void apply_swap(AmplitudeSpan amps, int a, int b);
void apply_controlled_power(AmplitudeSpan amps, int control, int work_qubits, const SliceUnitary& unitary,
                            std::uint64_t exponent);
/// Same as apply_controlled_power with a precomputed matrix.
void apply_controlled_matrix(AmplitudeSpan amps, int control, const DenseMatrix& matrix);

/// D = 2|s><s| - I restricted to `qubits`: within every assignment of the
/// other qubits, each amplitude becomes 2 * mean - amplitude.
void diffusion(AmplitudeSpan amps, std::span<const int> qubits);
void diffusion(StateVector& state, std::span<const int> qubits);

/// Discrete Fourier transform on a register (register[0] is its LSB):
/// qft maps |x> to 2^{-m/2} sum_y exp(+2 pi i x y / 2^m) |y>.
void qft(AmplitudeSpan amps, std::span<const int> register_qubits);
void inverse_qft(AmplitudeSpan amps, std::span<const int> register_qubits);
void qft(StateVector& state, std::span<const int> register_qubits);
void inverse_qft(StateVector& state, std::span<const int> register_qubits);

/// Probability that measuring `qubit` yields `outcome`.
double probability_of(std::span<const Amplitude> amps, int qubit, int outcome);
double probability_of(const StateVector& state, int qubit, int outcome);

/// Marginal distribution of a register (register[0] is its LSB).
std::vector<double> register_distribution(std::span<const Amplitude> amps, std::span<const int> register_qubits);

/// Samples a full basis index from |amplitude|^2.
std::uint64_t measure_all(const StateVector& state, SplitMix64& rng);

/// Number of qubits addressed by a span of 2^n amplitudes.
int qubits_of(std::span<const Amplitude> amps);

}  // namespace qcm::qsim
