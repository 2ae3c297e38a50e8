#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "renyi/divergences.hpp"
#include "renyi/states.hpp"

using namespace renyi;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

HermitianOperator ket(int d, int k) {
    ComplexVector v = ComplexVector::Zero(d);
    v(k) = 1.0;
    return HermitianOperator::outer(v);
}

HermitianOperator plus() {
    ComplexVector v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return HermitianOperator::outer(v);
}

const auto kR = HermitianOperator::diagonal({0.5, 0.5});
const auto kS = HermitianOperator::diagonal({0.25, 0.75});

double classical_renyi(const std::vector<double> &p, const std::vector<double> &q, double a) {
    double s = 0.0;
    double tr = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        tr += p[i];
        if (p[i] > 0.0) {
            s += std::pow(p[i], a) * std::pow(q[i], 1.0 - a);
        }
    }
    return std::log2(s / tr) / (a - 1.0);
}

double classical_kl(const std::vector<double> &p, const std::vector<double> &q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            s += p[i] * std::log2(p[i] / q[i]);
        }
    }
    return s;
}

std::vector<double> random_simplex(Rng &rng, int d) {
    std::vector<double> p(d);
    double s = 0.0;
    for (auto &x : p) {
        x = rng.uniform() + 1e-3;
        s += x;
    }
    for (auto &x : p) {
        x /= s;
    }
    return p;
}

// tr Z_a^a evaluated directly, for finite differences.
double trace_power(const HermitianOperator &x, const HermitianOperator &y, double a) {
    return sandwiched_trace_power(x, y, a);
}

} // namespace

TEST_CASE("RenyiOrder classification and guards") {
    CHECK(RenyiOrder(0.5).is_core());
    CHECK(RenyiOrder(3.0).is_core());
    CHECK(RenyiOrder(0.3).validity() == OrderValidity::extended);
    CHECK_THROWS_AS(RenyiOrder(1.0), ValidationError);
    CHECK_THROWS_AS(RenyiOrder(1.0 + 1e-5), ValidationError);
    CHECK_THROWS_AS(RenyiOrder(0.0), ValidationError);
    CHECK_THROWS_AS(RenyiOrder(-2.0), ValidationError);
    CHECK_THROWS_AS(RenyiOrder(kInf), ValidationError);
    CHECK_NOTHROW(RenyiOrder(1.0 + 1e-3));
}

TEST_CASE("sandwiched divergence examples") {
    const auto mixed = 0.5 * HermitianOperator::identity(2);
    for (double a : {0.5, 0.75, 1.5, 2.0, 10.0}) {
        CHECK_THAT(sandwiched_divergence(mixed, mixed, RenyiOrder(a)).value, WithinAbs(0.0, 1e-14));
    }
    CHECK_THAT(sandwiched_divergence(kR, kS, RenyiOrder(2.0)).value,
               WithinAbs(std::log2(4.0 / 3.0), 1e-12));

    const auto inf = sandwiched_divergence(ket(2, 0), ket(2, 1), RenyiOrder(2.0));
    CHECK(inf.value == kInf);
    CHECK(inf.reason == DivergenceReason::sigma_not_dominating);

    const auto orth = sandwiched_divergence(ket(2, 0), ket(2, 1), RenyiOrder(0.5));
    CHECK(orth.value == kInf);
    CHECK(orth.reason == DivergenceReason::orthogonal_states);

    // -2 log F with F = |<0|+>| = 2^{-1/2}.
    CHECK_THAT(sandwiched_divergence(ket(2, 0), plus(), RenyiOrder(0.5)).value,
               WithinAbs(1.0, 1e-12));

    // alpha < 1 with non-dominating sigma stays finite.
    const auto partial = sandwiched_divergence(HermitianOperator::diagonal({0.5, 0.5}), ket(2, 0),
                                               RenyiOrder(0.5));
    CHECK(partial.is_finite());

    CHECK_THROWS_AS(sandwiched_divergence(HermitianOperator::zero(2), kS, RenyiOrder(2.0)),
                    ValidationError);
    CHECK_THROWS_AS(sandwiched_divergence(kR, HermitianOperator::identity(3), RenyiOrder(2.0)),
                    ValidationError);
}

TEST_CASE("scalar normalization D(1||1/2) = 1") {
    const auto one = HermitianOperator::diagonal({1.0});
    const auto half = HermitianOperator::diagonal({0.5});
    for (double a : {0.5, 2.0, 7.0}) {
        CHECK_THAT(sandwiched_divergence(one, half, RenyiOrder(a)).value, WithinAbs(1.0, 1e-14));
    }
}

TEST_CASE("commuting inputs match the classical formula") {
    Rng rng(99);
    for (int t = 0; t < 40; ++t) {
        const int d = 2 + t % 5;
        auto p = random_simplex(rng, d);
        const auto q = random_simplex(rng, d);
        const double scale = 0.3 + 0.7 * rng.uniform();
        for (auto &x : p) {
            x *= scale;
        }
        const auto rho = HermitianOperator::diagonal(p);
        const auto sigma = HermitianOperator::diagonal(q);
        for (double a : {0.5, 0.75, 1.5, 2.0, 4.0}) {
            const double want = classical_renyi(p, q, a);
            CHECK_THAT(sandwiched_divergence(rho, sigma, RenyiOrder(a)).value, WithinAbs(want, 1e-10));
            CHECK_THAT(petz_divergence(rho, sigma, RenyiOrder(a)).value, WithinAbs(want, 1e-10));
        }
    }
}

TEST_CASE("Petz divergence examples") {
    CHECK_THAT(petz_divergence(kR, kS, RenyiOrder(2.0)).value, WithinAbs(std::log2(4.0 / 3.0), 1e-12));
    const auto rho = random_density(3, 3, 4).op();
    CHECK_THAT(petz_divergence(rho, rho, RenyiOrder(1.5)).value, WithinAbs(0.0, 1e-12));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = random_density(3, 3, seed).op();
        const auto s = random_density(3, 3, seed + 500).op();
        CHECK(sandwiched_divergence(r, s, RenyiOrder(1.5)).value <=
              petz_divergence(r, s, RenyiOrder(1.5)).value + 1e-9);
    }
    CHECK(petz_divergence(ket(2, 0), ket(2, 1), RenyiOrder(2.0)).value == kInf);
}

TEST_CASE("relative entropy examples") {
    CHECK_THAT(relative_entropy(kR, kS).value, WithinAbs(1.0 - std::log2(3.0) / 2.0, 1e-12));
    CHECK_THAT(relative_entropy(kR, kS).value, WithinAbs(classical_kl({0.5, 0.5}, {0.25, 0.75}), 1e-12));
    const auto rho = random_density(3, 2, 5).op();
    CHECK_THAT(relative_entropy(rho, rho).value, WithinAbs(0.0, 1e-12));
    const auto inf = relative_entropy(kR, ket(2, 0));
    CHECK(inf.value == kInf);
    CHECK(inf.reason == DivergenceReason::sigma_not_dominating);
}

TEST_CASE("max relative entropy examples") {
    const auto mixed = 0.5 * HermitianOperator::identity(2);
    CHECK_THAT(max_relative_entropy(ket(2, 0), mixed).value, WithinAbs(1.0, 1e-12));
    const auto rho = random_density(3, 3, 6).op();
    CHECK_THAT(max_relative_entropy(rho, rho).value, WithinAbs(0.0, 1e-10));
    CHECK(max_relative_entropy(kR, ket(2, 1)).value == kInf);
}

TEST_CASE("fidelity examples") {
    const auto rho = random_density(3, 3, 7).op();
    CHECK_THAT(fidelity(rho, rho), WithinAbs(rho.trace(), 1e-12));
    const auto sub = 0.4 * rho;
    CHECK_THAT(fidelity(sub, sub), WithinAbs(0.4, 1e-12));
    CHECK_THAT(fidelity(ket(2, 0), plus()), WithinAbs(1.0 / std::sqrt(2.0), 1e-12));
    CHECK_THAT(fidelity(ket(2, 0), ket(2, 1)), WithinAbs(0.0, 1e-12));
}

TEST_CASE("entropy examples") {
    for (int d : {2, 3, 5}) {
        const auto u = (1.0 / d) * HermitianOperator::identity(d);
        for (double a : {0.5, 2.0, 9.0}) {
            CHECK_THAT(renyi_entropy(u, RenyiOrder(a)), WithinAbs(std::log2(d), 1e-12));
        }
        CHECK_THAT(min_entropy(u), WithinAbs(std::log2(d), 1e-12));
        CHECK_THAT(von_neumann_entropy(u), WithinAbs(std::log2(d), 1e-12));
    }
    CHECK_THAT(renyi_entropy(ket(3, 1), RenyiOrder(2.0)), WithinAbs(0.0, 1e-12));
    CHECK_THAT(min_entropy(ket(3, 1)), WithinAbs(0.0, 1e-12));
    CHECK_THAT(renyi_entropy(HermitianOperator::diagonal({0.75, 0.25}), RenyiOrder(2.0)),
               WithinAbs(std::log2(8.0 / 5.0), 1e-12));
    Options nats;
    nats.log_base = std::numbers::e;
    CHECK_THAT(renyi_entropy(0.5 * HermitianOperator::identity(2), RenyiOrder(2.0), nats),
               WithinAbs(std::log(2.0), 1e-12));
}

TEST_CASE("entropy equals minus divergence to the support identity") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int d = 2 + static_cast<int>(seed % 4);
        const auto rho = random_density(d, 1 + static_cast<int>(seed % d), seed).op();
        const auto proj = support(rho).projector;
        for (double a : {0.5, 0.75, 1.5, 2.0, 4.0}) {
            CHECK_THAT(renyi_entropy(rho, RenyiOrder(a)),
                       WithinAbs(-sandwiched_divergence(rho, proj, RenyiOrder(a)).value, 1e-9));
        }
    }
}

TEST_CASE("auxiliary divergence") {
    const auto rho = random_density(3, 3, 8).op();
    for (double a : {0.6, 0.8, 1.5, 3.0}) {
        CHECK_THAT(auxiliary_divergence(rho, rho, rho, RenyiOrder(a)).value, WithinAbs(0.0, 1e-10));
    }
    // Optimal tau recovers the sandwiched value; no other tau exceeds it.
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const int d = 2 + static_cast<int>(seed % 3);
        const auto r = random_density(d, d, seed + 10).op();
        const auto s = random_density(d, d, seed + 20).op();
        for (double a : {0.6, 0.8, 1.5, 3.0}) {
            const double target = sandwiched_divergence(r, s, RenyiOrder(a)).value;
            const auto tau = optimal_auxiliary_tau(r, s, RenyiOrder(a));
            CHECK_THAT(tau.trace(), WithinAbs(1.0, 1e-12));
            double best = auxiliary_divergence(r, s, tau, RenyiOrder(a)).value;
            CHECK_THAT(best, WithinAbs(target, 1e-6));
            for (std::uint64_t k = 0; k < 20; ++k) {
                const auto t = random_density(d, d, 1000 * seed + k).op();
                const double v = auxiliary_divergence(r, s, t, RenyiOrder(a)).value;
                CHECK(v <= target + 1e-9);
                best = std::max(best, v);
            }
            CHECK_THAT(best, WithinAbs(target, 1e-6));
        }
    }
    // alpha > 1, sigma misses part of the support picked out by tau.
    const auto inf = auxiliary_divergence(kR, ket(2, 0), kR, RenyiOrder(2.0));
    CHECK(inf.value == kInf);
    const auto neg = auxiliary_divergence(kR, kR, ket(2, 0), RenyiOrder(0.5));
    CHECK(neg.value == -kInf);
    CHECK(neg.reason == DivergenceReason::tau_not_dominating);
    CHECK_THROWS_AS(auxiliary_divergence(0.5 * kR, kR, kR, RenyiOrder(2.0)), ValidationError);
}

TEST_CASE("alpha derivative") {
    const auto x = random_density(3, 3, 30).op();
    CHECK_THAT(divergence_alpha_derivative(x, x, 1.0), WithinAbs(0.0, 1e-12));

    const double d_kl = 1.0 - std::log2(3.0) / 2.0;
    CHECK_THAT(divergence_alpha_derivative(kR, kS, 1.0), WithinRel(std::numbers::ln2 * d_kl, 1e-10));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto a = random_density(3, 3, seed + 40).op();
        const auto b = random_density(3, 3, seed + 60).op();
        for (double alpha : {0.7, 1.0, 1.7}) {
            const double h = 1e-5;
            const double fd = (trace_power(a, b, alpha + h) - trace_power(a, b, alpha - h)) / (2 * h);
            const double an = divergence_alpha_derivative(a, b, alpha);
            CHECK(std::abs(an - fd) <= 1e-4 * std::max(std::abs(fd), 1e-12));
        }
        CHECK_THAT(divergence_alpha_derivative(a, b, 1.0),
                   WithinRel(std::numbers::ln2 * relative_entropy(a, b).value, 1e-6));
    }
    // Y with a kernel: the derivative lives on supp Y.
    const auto y = HermitianOperator::diagonal({0.6, 0.4, 0.0});
    const auto xs = HermitianOperator::diagonal({0.3, 0.7, 0.0});
    CHECK_THAT(divergence_alpha_derivative(xs, y, 1.0),
               WithinRel(std::numbers::ln2 * classical_kl({0.3, 0.7}, {0.6, 0.4}), 1e-10));
    CHECK_THROWS_AS(divergence_alpha_derivative(kR, ket(2, 0), 1.0), ValidationError);
}

TEST_CASE("regularization sequences") {
    const auto rho = random_density(3, 3, 70).op();
    const auto full = random_density(3, 3, 71).op();
    const auto seq = limit_extrapolation(rho, full, RenyiOrder(1.5));
    // First-order drift in xi, scaled by the smallest eigenvalue of sigma.
    const double c = 10.0 / full.min_eigenvalue();
    for (std::size_t i = 0; i < seq.xis.size(); ++i) {
        CHECK(std::abs(seq.values[i] - seq.reference.value) <= c * seq.xis[i]);
    }
    CHECK(seq.final_gap <= 1e-4);

    // supp rho inside supp sigma, alpha < 1.
    const auto r = HermitianOperator::diagonal({0.7, 0.3, 0.0});
    const auto s = HermitianOperator::diagonal({0.2, 0.3, 0.5});
    const auto s_sing = HermitianOperator::diagonal({0.4, 0.6, 0.0});
    const auto conv = limit_extrapolation(r, s_sing, RenyiOrder(0.7));
    CHECK(conv.final_gap <= 1e-4);
    CHECK(limit_extrapolation(r, s, RenyiOrder(0.7)).final_gap <= 1e-4);

    // alpha > 1 without dominance diverges.
    const auto div = limit_extrapolation(kR, ket(2, 0), RenyiOrder(2.0));
    CHECK(div.reference.value == kInf);
    CHECK(div.nondecreasing_as_xi_shrinks);
    CHECK(div.values.back() > div.values.front() + 5.0);
    CHECK_THROWS_AS(regularized_divergence(kR, kS, RenyiOrder(2.0), 0.0), ValidationError);
}

TEST_CASE("limit checks") {
    const auto rho = random_density(3, 3, 80).op();
    const auto same = limit_checks(rho, rho);
    CHECK_THAT(same.gap_one, WithinAbs(0.0, 1e-10));
    CHECK_THAT(same.large_alpha, WithinAbs(0.0, 1e-10));
    CHECK_THAT(same.max_relative.value, WithinAbs(0.0, 1e-10));

    const auto c = limit_checks(kR, kS);
    CHECK_THAT(c.relative.value, WithinAbs(classical_kl({0.5, 0.5}, {0.25, 0.75}), 1e-12));
    CHECK_THAT(c.max_relative.value, WithinAbs(std::log2(2.0), 1e-12));
    CHECK_THAT(c.below_one, WithinAbs(classical_renyi({0.5, 0.5}, {0.25, 0.75}, 1.0 - 1e-3), 1e-10));
    CHECK_THAT(c.large_alpha, WithinAbs(classical_renyi({0.5, 0.5}, {0.25, 0.75}, 200.0), 1e-10));
    CHECK(c.gap_one < 5e-3);
    CHECK(c.gap_infinity < 1e-2);
}

TEST_CASE("large alpha stays finite") {
    const auto r = random_density(4, 4, 90).op();
    const auto s = random_density(4, 4, 91).op();
    const auto v = sandwiched_divergence(r, s, RenyiOrder(200.0));
    CHECK(v.is_finite());
    CHECK(v.value <= max_relative_entropy(r, s).value + 1e-9);
}

TEST_CASE("min relative entropy helper") {
    CHECK_THAT(min_relative_entropy(ket(2, 0), 0.5 * HermitianOperator::identity(2)).value,
               WithinAbs(1.0, 1e-12));
    CHECK(min_relative_entropy(ket(2, 0), ket(2, 1)).value == kInf);
}
