#include "qcm/qsim.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace qcm::qsim {

namespace {

void check_qubit(std::span<const Amplitude> amps, int q) {
    if (q < 0 || q >= qubits_of(amps))
        throw std::out_of_range("qubit index " + std::to_string(q) + " out of range");
}

void check_distinct(int a, int b) {
    if (a == b) throw std::invalid_argument("gate targets must be distinct");
}

/// Basis indices whose `qubits` bits are all zero, paired with the offsets
/// that enumerate every assignment of those bits.
struct RegisterLayout {
    std::uint64_t mask = 0;
    std::vector<std::uint64_t> offsets;  // offsets[y] sets register value y
};

RegisterLayout layout_of(std::span<const Amplitude> amps, std::span<const int> qubits) {
    RegisterLayout layout;
    for (int q : qubits) {
        check_qubit(amps, q);
        const std::uint64_t bit = std::uint64_t{1} << q;
        if (layout.mask & bit) throw std::invalid_argument("register qubits must be distinct");
        layout.mask |= bit;
    }
    const std::size_t m = qubits.size();
    layout.offsets.assign(std::size_t{1} << m, 0);
    for (std::size_t y = 0; y < layout.offsets.size(); ++y)
        for (std::size_t k = 0; k < m; ++k)
            if ((y >> k) & 1U) layout.offsets[y] |= std::uint64_t{1} << qubits[k];
    return layout;
}

}  // namespace

int qubits_of(std::span<const Amplitude> amps) {
    const std::size_t n = amps.size();
    if (n < 2 || !std::has_single_bit(n)) throw std::invalid_argument("amplitude count must be a power of two >= 2");
    return std::countr_zero(n);
}

// StateVector ---------------------------------------------------------------

StateVector::StateVector(int n_qubits, int qubit_cap) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > qubit_cap)
        throw CapacityError("state of " + std::to_string(n_qubits) + " qubits outside [1, " +
                            std::to_string(qubit_cap) + "]");
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amplitudes) {
    StateVector s;
    s.n_qubits_ = qubits_of(amplitudes);
    s.amps_ = std::move(amplitudes);
    return s;
}

double StateVector::norm_squared() const noexcept {
    double total = 0.0;
    for (const Amplitude& a : amps_) total += std::norm(a);
    return total;
}

StateVector init_state(int n_qubits, int qubit_cap) { return StateVector(n_qubits, qubit_cap); }

// DenseMatrix -----------------------------------------------------------------

DenseMatrix::DenseMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, Amplitude{0.0, 0.0}) {}

DenseMatrix DenseMatrix::identity(std::size_t dim) {
    DenseMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_unitary(std::size_t dim, const SliceUnitary& unitary) {
    DenseMatrix m(dim);
    std::vector<Amplitude> column(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        std::fill(column.begin(), column.end(), Amplitude{0.0, 0.0});
        column[c] = 1.0;
        unitary(column);
        for (std::size_t r = 0; r < dim; ++r) m(r, c) = column[r];
    }
    return m;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
    if (dim_ != rhs.dim_) throw std::invalid_argument("matrix dimension mismatch");
    DenseMatrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t k = 0; k < dim_; ++k) {
            const Amplitude a = (*this)(i, k);
            if (a == Amplitude{0.0, 0.0}) continue;
            const Amplitude* row = &rhs.data_[k * dim_];
            Amplitude* dst = &out.data_[i * dim_];
            for (std::size_t j = 0; j < dim_; ++j) dst[j] += a * row[j];
        }
    return out;
}

DenseMatrix DenseMatrix::power(std::uint64_t exponent) const {
    DenseMatrix result = identity(dim_);
    DenseMatrix base = *this;
    while (exponent > 0) {
        if (exponent & 1U) result = result * base;
        exponent >>= 1;
        if (exponent > 0) base = base * base;
    }
    return result;
}

void DenseMatrix::apply(AmplitudeSpan v) const {
    if (v.size() != dim_) throw std::invalid_argument("vector dimension mismatch");
    std::vector<Amplitude> out(dim_, Amplitude{0.0, 0.0});
    for (std::size_t i = 0; i < dim_; ++i) {
        Amplitude acc{0.0, 0.0};
        const Amplitude* row = &data_[i * dim_];
        for (std::size_t j = 0; j < dim_; ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
    std::copy(out.begin(), out.end(), v.begin());
}

// Gates -----------------------------------------------------------------------

void apply_h(AmplitudeSpan amps, int qubit) {
    check_qubit(amps, qubit);
    const double r = std::numbers::sqrt2 / 2.0;
    const std::size_t half = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps.size(); base += 2 * half)
        for (std::size_t i = base; i < base + half; ++i) {
            const Amplitude a = amps[i], b = amps[i + half];
            amps[i] = (a + b) * r;
            amps[i + half] = (a - b) * r;
        }
}

void apply_x(AmplitudeSpan amps, int qubit) {
    check_qubit(amps, qubit);
    const std::size_t half = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps.size(); base += 2 * half)
        for (std::size_t i = base; i < base + half; ++i) std::swap(amps[i], amps[i + half]);
}

void apply_ry(AmplitudeSpan amps, int qubit, double angle) {
    check_qubit(amps, qubit);
    const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    const std::size_t half = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps.size(); base += 2 * half)
        for (std::size_t i = base; i < base + half; ++i) {
            const Amplitude a = amps[i], b = amps[i + half];
            amps[i] = c * a - s * b;
            amps[i + half] = s * a + c * b;
        }
}

void apply_phase_flip_if(AmplitudeSpan amps, const std::function<bool(std::uint64_t)>& predicate) {
    qubits_of(amps);
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (predicate(i)) amps[i] = -amps[i];
}

void apply_controlled_ry(AmplitudeSpan amps, int target, const std::function<double(std::uint64_t)>& angle) {
    check_qubit(amps, target);
    const std::size_t half = std::size_t{1} << target;
    for (std::size_t base = 0; base < amps.size(); base += 2 * half)
        for (std::size_t i = base; i < base + half; ++i) {
            const double theta = angle(i);
            if (theta == 0.0) continue;
            const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
            const Amplitude a = amps[i], b = amps[i + half];
            amps[i] = c * a - s * b;
            amps[i + half] = s * a + c * b;
        }
}

void apply_controlled_phase(AmplitudeSpan amps, int control, int target, double phi) {
    check_qubit(amps, control);
    check_qubit(amps, target);
    check_distinct(control, target);
    const std::uint64_t mask = (std::uint64_t{1} << control) | (std::uint64_t{1} << target);
    const Amplitude phase = std::polar(1.0, phi);
    for (std::size_t i = 0; i < amps.size(); ++i)
        if ((i & mask) == mask) amps[i] *= phase;
}

void apply_swap(AmplitudeSpan amps, int a, int b) {
    check_qubit(amps, a);
    check_qubit(amps, b);
    check_distinct(a, b);
    const std::uint64_t ba = std::uint64_t{1} << a, bb = std::uint64_t{1} << b;
    for (std::size_t i = 0; i < amps.size(); ++i)
        if ((i & ba) && !(i & bb)) std::swap(amps[i], amps[(i ^ ba) | bb]);
}

namespace {

void check_controlled_layout(AmplitudeSpan amps, int control, int work_qubits) {
    check_qubit(amps, control);
    if (work_qubits < 1 || work_qubits >= qubits_of(amps))
        throw std::out_of_range("work register width out of range");
    if (control < work_qubits) throw std::invalid_argument("control qubit lies inside the work register");
}

template <class Fn>
void for_each_controlled_slice(AmplitudeSpan amps, int control, std::size_t slice, Fn&& fn) {
    const std::uint64_t bit = std::uint64_t{1} << control;
    for (std::size_t base = 0; base < amps.size(); base += slice)
        if (base & bit) fn(amps.subspan(base, slice));
}

}  // namespace

void apply_controlled_matrix(AmplitudeSpan amps, int control, const DenseMatrix& matrix) {
    const std::size_t slice = matrix.dim();
    if (slice < 2 || !std::has_single_bit(slice)) throw std::invalid_argument("matrix dimension must be 2^w");
    check_controlled_layout(amps, control, std::countr_zero(slice));
    for_each_controlled_slice(amps, control, slice, [&](AmplitudeSpan s) { matrix.apply(s); });
}

void apply_controlled_power(AmplitudeSpan amps, int control, int work_qubits, const SliceUnitary& unitary,
                            std::uint64_t exponent) {
    check_controlled_layout(amps, control, work_qubits);
    if (exponent == 0) return;
    const std::size_t slice = std::size_t{1} << work_qubits;
    // For small work registers, squaring a cached matrix beats repeated application.
    if (exponent > 1 && slice <= 1024) {
        apply_controlled_matrix(amps, control, DenseMatrix::from_unitary(slice, unitary).power(exponent));
        return;
    }
    for_each_controlled_slice(amps, control, slice, [&](AmplitudeSpan s) {
        for (std::uint64_t k = 0; k < exponent; ++k) unitary(s);
    });
}

void apply_gate(AmplitudeSpan amps, const Gate& gate) {
    std::visit(
        [&](const auto& g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, H>) apply_h(amps, g.qubit);
            else if constexpr (std::is_same_v<G, X>) apply_x(amps, g.qubit);
            else if constexpr (std::is_same_v<G, Ry>) apply_ry(amps, g.qubit, g.angle);
            else if constexpr (std::is_same_v<G, PhaseFlipIf>) apply_phase_flip_if(amps, g.predicate);
            else if constexpr (std::is_same_v<G, ControlledRy>) apply_controlled_ry(amps, g.target, g.angle);
            else if constexpr (std::is_same_v<G, ControlledPhase>)
                apply_controlled_phase(amps, g.control, g.target, g.phi);
            else if constexpr (std::is_same_v<G, Swap>) apply_swap(amps, g.a, g.b);
            else if constexpr (std::is_same_v<G, ControlledUPower>)
                apply_controlled_power(amps, g.control, g.work_qubits, g.unitary, g.exponent);
        },
        gate);
}

void apply_gate(StateVector& state, const Gate& gate) { apply_gate(state.amplitudes(), gate); }

// Register operations ---------------------------------------------------------

void diffusion(AmplitudeSpan amps, std::span<const int> qubits) {
    const RegisterLayout layout = layout_of(amps, qubits);
    const double count = static_cast<double>(layout.offsets.size());
    for (std::size_t base = 0; base < amps.size(); ++base) {
        if (base & layout.mask) continue;
        Amplitude mean{0.0, 0.0};
        for (std::uint64_t off : layout.offsets) mean += amps[base | off];
        mean /= count;
        for (std::uint64_t off : layout.offsets) amps[base | off] = 2.0 * mean - amps[base | off];
    }
}

void diffusion(StateVector& state, std::span<const int> qubits) { diffusion(state.amplitudes(), qubits); }

namespace {

/// Textbook circuit: Hadamards and controlled phases, then reverse the bit order.
void fourier(AmplitudeSpan amps, std::span<const int> reg, double sign) {
    layout_of(amps, reg);  // validates
    const int m = static_cast<int>(reg.size());
    if (sign > 0) {
        for (int j = m - 1; j >= 0; --j) {
            apply_h(amps, reg[j]);
            for (int k = j - 1; k >= 0; --k)
                apply_controlled_phase(amps, reg[k], reg[j], std::numbers::pi / std::ldexp(1.0, j - k));
        }
        for (int i = 0; i < m / 2; ++i) apply_swap(amps, reg[i], reg[m - 1 - i]);
    } else {
        for (int i = 0; i < m / 2; ++i) apply_swap(amps, reg[i], reg[m - 1 - i]);
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < j; ++k)
                apply_controlled_phase(amps, reg[k], reg[j], -std::numbers::pi / std::ldexp(1.0, j - k));
            apply_h(amps, reg[j]);
        }
    }
}

}  // namespace

void qft(AmplitudeSpan amps, std::span<const int> register_qubits) { fourier(amps, register_qubits, +1.0); }
void inverse_qft(AmplitudeSpan amps, std::span<const int> register_qubits) {
    fourier(amps, register_qubits, -1.0);
}
void qft(StateVector& state, std::span<const int> register_qubits) { qft(state.amplitudes(), register_qubits); }
void inverse_qft(StateVector& state, std::span<const int> register_qubits) {
    inverse_qft(state.amplitudes(), register_qubits);
}

double probability_of(std::span<const Amplitude> amps, int qubit, int outcome) {
    check_qubit(amps, qubit);
    if (outcome != 0 && outcome != 1) throw std::invalid_argument("outcome must be 0 or 1");
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    double total = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (((i & bit) != 0) == (outcome == 1)) total += std::norm(amps[i]);
    return total;
}

double probability_of(const StateVector& state, int qubit, int outcome) {
    return probability_of(state.amplitudes(), qubit, outcome);
}

std::vector<double> register_distribution(std::span<const Amplitude> amps, std::span<const int> register_qubits) {
    const RegisterLayout layout = layout_of(amps, register_qubits);
    std::vector<double> dist(layout.offsets.size(), 0.0);
    for (std::size_t base = 0; base < amps.size(); ++base) {
        if (base & layout.mask) continue;
        for (std::size_t y = 0; y < layout.offsets.size(); ++y) dist[y] += std::norm(amps[base | layout.offsets[y]]);
    }
    return dist;
}

std::uint64_t measure_all(const StateVector& state, SplitMix64& rng) {
    std::vector<double> probs(state.dimension());
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(state[i]);
    return sample_discrete(rng, probs);
}

}  // namespace qcm::qsim
