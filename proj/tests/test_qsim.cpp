#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "qcm/qsim.hpp"

using namespace qcm;
using namespace qcm::qsim;

namespace {

std::vector<Amplitude> random_state(int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Amplitude> v(std::size_t{1} << n);
    double norm = 0;
    for (auto& a : v) {
        a = {uniform01(rng) - 0.5, uniform01(rng) - 0.5};
        norm += std::norm(a);
    }
    for (auto& a : v) a /= std::sqrt(norm);
    return v;
}

double distance(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Textbook DFT with the same sign convention as qft().
std::vector<Amplitude> dft(const std::vector<Amplitude>& x) {
    const std::size_t n = x.size();
    std::vector<Amplitude> y(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            y[k] += x[j] * std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                                      2 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(n));
    return y;
}

}  // namespace

TEST_CASE("init_state and capacity") {
    const StateVector s = init_state(3);
    CHECK(s.dimension() == 8);
    CHECK(s[0] == Amplitude{1, 0});
    for (std::size_t i = 1; i < 8; ++i) CHECK(s[i] == Amplitude{0, 0});
    CHECK_THROWS_AS(StateVector(25), CapacityError);
    CHECK_THROWS_AS(StateVector(0), CapacityError);
    CHECK_THROWS_AS(StateVector(5, 4), CapacityError);
}

TEST_CASE("single-qubit gates") {
    StateVector s(1);
    apply_gate(s, H{0});
    CHECK(s[0].real() == doctest::Approx(std::sqrt(0.5)));
    CHECK(s[1].real() == doctest::Approx(std::sqrt(0.5)));
    apply_gate(s, H{0});
    CHECK(std::abs(s[0] - 1.0) < 1e-15);

    StateVector x(2);
    apply_gate(x, X{1});
    CHECK(x[2] == Amplitude{1, 0});

    StateVector r(1);
    apply_gate(r, Ry{0, 2 * std::asin(std::sqrt(0.3))});
    CHECK(probability_of(r, 0, 1) == doctest::Approx(0.3));

    CHECK_THROWS_AS(apply_gate(r, H{1}), std::out_of_range);
    CHECK_THROWS_AS(apply_gate(x, Swap{1, 1}), std::invalid_argument);
}

TEST_CASE("phase flip on a uniform state") {
    StateVector s(2);
    apply_gate(s, H{0});
    apply_gate(s, H{1});
    apply_gate(s, PhaseFlipIf{[](std::uint64_t i) { return i == 3; }});
    CHECK(s[0].real() == doctest::Approx(0.5));
    CHECK(s[1].real() == doctest::Approx(0.5));
    CHECK(s[2].real() == doctest::Approx(0.5));
    CHECK(s[3].real() == doctest::Approx(-0.5));
}

TEST_CASE("diffusion reflects about the mean") {
    auto v = random_state(3, 5);
    auto expected = v;
    Amplitude mean = std::accumulate(v.begin(), v.end(), Amplitude{}) / 8.0;
    for (auto& a : expected) a = 2.0 * mean - a;
    const std::vector<int> all{0, 1, 2};
    diffusion(v, all);
    CHECK(distance(v, expected) < 1e-12);
}

TEST_CASE("diffusion on a sub-register equals H flip0 H on that register") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto a = random_state(4, seed);
        auto b = a;
        const std::vector<int> reg{1, 3};
        diffusion(a, reg);
        // H^{reg} (2|0><0| - I) H^{reg}, with 2|0><0| - I = -(I - 2|0><0|)
        for (int q : reg) apply_h(b, q);
        apply_phase_flip_if(b, [](std::uint64_t i) { return (i & 0b1010) != 0; });
        for (int q : reg) apply_h(b, q);
        CHECK(distance(a, b) < 1e-12);
    }
}

TEST_CASE("qft matches the DFT and inverse_qft undoes it") {
    for (int m = 1; m <= 4; ++m) {
        auto v = random_state(m, 100 + m);
        const auto expected = dft(v);
        std::vector<int> reg(m);
        std::iota(reg.begin(), reg.end(), 0);
        qft(v, reg);
        CHECK(distance(v, expected) < 1e-12);
        inverse_qft(v, reg);
        CHECK(distance(v, random_state(m, 100 + m)) < 1e-12);
    }
}

TEST_CASE("inverse qft maps a phase ramp to its basis state") {
    const int m = 4;
    const std::size_t M = 16;
    for (std::size_t k = 0; k < M; ++k) {
        std::vector<Amplitude> v(2 * M);
        // Register on qubits 1..4; qubit 0 stays |1>.
        for (std::size_t y = 0; y < M; ++y)
            v[(y << 1) | 1] = std::polar(0.25, 2 * std::numbers::pi * static_cast<double>(k * y) / M);
        const std::vector<int> reg{1, 2, 3, 4};
        inverse_qft(v, reg);
        const auto dist = register_distribution(v, reg);
        CHECK(dist[k] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(probability_of(v, 0, 1) == doctest::Approx(1.0));
    }
    (void)m;
}

TEST_CASE("gate sequence followed by its adjoint restores the state") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto start = random_state(3, 1000 + trial);
        auto v = start;
        std::vector<Gate> seq;
        std::vector<Gate> inv;
        for (int g = 0; g < 12; ++g) {
            const int a = static_cast<int>(uniform_below(rng, 3));
            const int b = (a + 1 + static_cast<int>(uniform_below(rng, 2))) % 3;
            const double angle = uniform01(rng) * 6.0;
            switch (uniform_below(rng, 5)) {
                case 0: seq.push_back(H{a}); inv.push_back(H{a}); break;
                case 1: seq.push_back(X{a}); inv.push_back(X{a}); break;
                case 2: seq.push_back(Ry{a, angle}); inv.push_back(Ry{a, -angle}); break;
                case 3: seq.push_back(ControlledPhase{a, b, angle}); inv.push_back(ControlledPhase{a, b, -angle}); break;
                default: seq.push_back(Swap{a, b}); inv.push_back(Swap{a, b}); break;
            }
        }
        for (const auto& g : seq) apply_gate(std::span<Amplitude>(v), g);
        double norm = 0;
        for (auto& a : v) norm += std::norm(a);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
        for (auto it = inv.rbegin(); it != inv.rend(); ++it) apply_gate(std::span<Amplitude>(v), *it);
        CHECK(distance(v, start) < 1e-9);
    }
}

TEST_CASE("controlled_ry sees the index with the target cleared") {
    StateVector s(2);
    apply_h(s.amplitudes(), 0);
    apply_controlled_ry(s.amplitudes(), 1, [](std::uint64_t i) {
        CHECK((i & 2) == 0);
        return i == 1 ? std::numbers::pi : 0.0;
    });
    CHECK(std::norm(s[0]) == doctest::Approx(0.5));
    CHECK(std::norm(s[3]) == doctest::Approx(0.5));
}

TEST_CASE("controlled power: dense and direct paths agree") {
    const SliceUnitary u = [](AmplitudeSpan s) {
        apply_ry(s, 0, 0.3);
        apply_controlled_phase(s, 0, 1, 0.7);
        apply_h(s, 1);
    };
    for (std::uint64_t e : {0ULL, 1ULL, 2ULL, 5ULL, 16ULL}) {
        auto a = random_state(4, 300 + e);
        auto b = a;
        apply_controlled_power(a, 3, 2, u, e);
        // direct reference
        for (std::size_t base = 0; base < b.size(); base += 4)
            if (base & 8)
                for (std::uint64_t k = 0; k < e; ++k) u(std::span<Amplitude>(b).subspan(base, 4));
        CHECK(distance(a, b) < 1e-10);
    }
    const DenseMatrix m = DenseMatrix::from_unitary(4, u);
    const DenseMatrix p = m.power(3);
    const DenseMatrix q = m * m * m;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(p(r, c) - q(r, c)) < 1e-12);
}

TEST_CASE("probabilities and measurement") {
    StateVector s(2);
    apply_ry(s.amplitudes(), 0, 2 * std::asin(std::sqrt(0.2)));
    CHECK(probability_of(s, 0, 1) == doctest::Approx(0.2));
    CHECK(probability_of(s, 0, 0) == doctest::Approx(0.8));
    CHECK(probability_of(s, 1, 1) == doctest::Approx(0.0));
    const std::vector<int> reg{0};
    const auto d = register_distribution(s.amplitudes(), reg);
    CHECK(d[1] == doctest::Approx(0.2));

    SplitMix64 rng(1);
    int ones = 0;
    for (int i = 0; i < 20000; ++i) ones += measure_all(s, rng) == 1;
    CHECK(ones / 20000.0 == doctest::Approx(0.2).epsilon(0.05));
    CHECK(s.norm_squared() == doctest::Approx(1.0));
}
