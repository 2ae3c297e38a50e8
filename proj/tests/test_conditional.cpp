#include <catch_amalgamated.hpp>

#include <cmath>

#include "renyi/conditional.hpp"

using namespace renyi;
using Catch::Matchers::WithinAbs;

namespace {

MultipartiteState bell() {
    ComplexVector v = ComplexVector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return {DensityOperator(HermitianOperator::outer(v)), {2, 2}};
}

MultipartiteState product(const HermitianOperator &a, const HermitianOperator &b) {
    return {DensityOperator(tensor_product(a, b)), {a.dim(), b.dim()}};
}

MultipartiteState mixed_ab(std::uint64_t seed, int da = 2, int db = 2, int rank = 0) {
    const int d = da * db;
    return {random_density(d, rank > 0 ? rank : d, seed), {da, db}};
}

ConditionalOptions with(OptimizerMethod m) {
    ConditionalOptions o;
    o.method = m;
    return o;
}

Matrix hadamard() {
    Matrix h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

} // namespace

TEST_CASE("duality pair") {
    CHECK_THAT(duality_pair(2.0), WithinAbs(2.0 / 3.0, 1e-15));
    CHECK_THAT(duality_pair(1.5), WithinAbs(0.75, 1e-15));
    CHECK_THAT(duality_pair(3.0), WithinAbs(0.6, 1e-15));
    CHECK_THAT(duality_pair(0.75), WithinAbs(1.5, 1e-15));
    CHECK_THAT(duality_pair(200.0), WithinAbs(200.0 / 399.0, 1e-15));
    for (double a : {0.6, 0.9, 1.3, 4.0}) {
        CHECK_THAT(1.0 / a + 1.0 / duality_pair(a), WithinAbs(2.0, 1e-14));
    }
    CHECK_THROWS_AS(duality_pair(0.5), ValidationError);
}

TEST_CASE("product state gives the marginal entropy") {
    const auto ra = random_density(2, 2, 1).op();
    const auto sb = random_density(2, 2, 2).op();
    const auto s = product(ra, sb);
    for (double a : {0.5, 0.75, 1.5, 2.0, 3.0}) {
        const double want = renyi_entropy(ra, RenyiOrder(a));
        CHECK_THAT(conditional_renyi(s, a).value, WithinAbs(want, 1e-5));
        CHECK_THAT(conditional_renyi(s, a, with(OptimizerMethod::grid_oracle)).value,
                   WithinAbs(want, 1e-5));
    }
}

TEST_CASE("maximally entangled state has H = -1") {
    for (double a : {0.5, 0.75, 1.5, 2.0, 5.0}) {
        CHECK_THAT(conditional_renyi(bell(), a).value, WithinAbs(-1.0, 1e-5));
        CHECK_THAT(conditional_renyi(bell(), a, with(OptimizerMethod::grid_oracle)).value,
                   WithinAbs(-1.0, 1e-5));
    }
    CHECK_THAT(conditional_renyi(bell(), 2.0, with(OptimizerMethod::fixed_point)).value,
               WithinAbs(-1.0, 1e-5));
}

TEST_CASE("maximally mixed state has H = 1") {
    const MultipartiteState u(DensityOperator(0.25 * HermitianOperator::identity(4)), {2, 2});
    for (double a : {0.5, 1.5, 3.0}) {
        const auto r = conditional_renyi(u, a);
        CHECK_THAT(r.value, WithinAbs(1.0, 1e-6));
        CHECK((r.optimizer_state.matrix() - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-3);
    }
    CHECK_THAT(conditional_min_entropy(u).value, WithinAbs(1.0, 1e-6));
}

TEST_CASE("min and max entropy examples") {
    CHECK_THAT(conditional_min_entropy(bell()).value, WithinAbs(-1.0, 1e-4));
    const auto pure_a = random_density(2, 1, 3).op();
    const auto sb = random_density(3, 3, 4).op();
    CHECK_THAT(conditional_min_entropy(product(pure_a, sb)).value, WithinAbs(0.0, 1e-5));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = mixed_ab(seed + 10);
        CHECK_THAT(conditional_min_entropy(s).value,
                   WithinAbs(conditional_renyi(s, 200.0).value, 2e-2));
        CHECK(conditional_max_entropy(s).value == conditional_renyi(s, 0.5).value);
    }
}

TEST_CASE("von Neumann conditional entropy") {
    const auto ra = random_density(3, 3, 5).op();
    const auto sb = random_density(2, 2, 6).op();
    CHECK_THAT(conditional_vn_entropy(product(ra, sb)), WithinAbs(von_neumann_entropy(ra), 1e-12));
    CHECK_THAT(conditional_vn_entropy(bell()), WithinAbs(-1.0, 1e-12));

    // cq-state (+)_y p_y rho_A^y with Y as the conditioning system.
    const std::vector<double> p{0.3, 0.7};
    const std::vector<MultipartiteState> blocks{{random_density(2, 2, 7), {2}},
                                                {random_density(2, 2, 8), {2}}};
    const auto ya = classical_quantum_assemble(p, blocks);
    const double want = p[0] * von_neumann_entropy(blocks[0].op()) +
                        p[1] * von_neumann_entropy(blocks[1].op());
    CHECK_THAT(conditional_vn_entropy(ya.grouped({{1}, {0}})), WithinAbs(want, 1e-12));
}

TEST_CASE("alpha near one brackets the von Neumann value") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = mixed_ab(seed + 20, 2, 2 + static_cast<int>(seed % 2));
        const double vn = conditional_vn_entropy(s);
        const double below = conditional_renyi(s, 1.0 - 1e-3).value;
        const double above = conditional_renyi(s, 1.0 + 1e-3).value;
        CHECK(below >= above - 2e-5);
        CHECK(std::abs(below - vn) <= 5e-3);
        CHECK(std::abs(above - vn) <= 5e-3);
    }
}

TEST_CASE("conditional entropy is nonincreasing in alpha") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto s = mixed_ab(seed + 30, 2, 2 + static_cast<int>(seed % 2));
        double prev = kInf;
        for (double a : {0.6, 0.8, 1.3, 2.0, 3.0, 5.0}) {
            const double v = conditional_renyi(s, a).value;
            CHECK(v <= prev + 2e-5);
            prev = v;
        }
    }
}

TEST_CASE("mirror descent agrees with the Bloch grid") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto s = mixed_ab(seed + 40, 2 + static_cast<int>(seed % 2), 2);
        for (double a : {0.6, 1.5, 3.0}) {
            const auto md = conditional_renyi(s, a);
            const auto grid = conditional_renyi(s, a, with(OptimizerMethod::grid_oracle));
            CHECK(std::abs(md.value - grid.value) <= 1e-4);
            const auto fp = conditional_renyi(s, a, with(OptimizerMethod::fixed_point));
            CHECK(std::abs(fp.value - grid.value) <= 1e-4);
        }
    }
}

TEST_CASE("optimizer state is a normalized state with the right support") {
    // rho_B of rank one inside a qutrit.
    const auto ra = random_density(2, 2, 50).op();
    const auto rb = random_density(3, 1, 51).op();
    const auto s = product(ra, rb);
    for (double a : {0.7, 2.0}) {
        const auto r = conditional_renyi(s, a);
        CHECK_THAT(r.optimizer_state.trace(), WithinAbs(1.0, 1e-8));
        CHECK(r.optimizer_state.min_eigenvalue() > -1e-10);
        CHECK(dominates(r.optimizer_state, rb));
        CHECK(dominates(rb, r.optimizer_state));
        CHECK_THAT(r.value, WithinAbs(renyi_entropy(ra, RenyiOrder(a)), 1e-5));
    }
    const auto full = conditional_renyi(mixed_ab(52, 2, 3), 2.0);
    CHECK_THAT(full.optimizer_state.trace(), WithinAbs(1.0, 1e-8));
    CHECK(dominates(full.optimizer_state, mixed_ab(52, 2, 3).marginal({1}).op()));
    CHECK(full.iterations > 0);
    CHECK(full.residual < 1e-5);
}

TEST_CASE("conditional entropy input validation") {
    const MultipartiteState sub(DensityOperator(0.2 * HermitianOperator::identity(4)), {2, 2});
    CHECK_THROWS_AS(conditional_renyi(sub, 2.0), ValidationError);
    CHECK_THROWS_AS(conditional_renyi(bell(), 0.3), ValidationError);
    CHECK_THROWS_AS(conditional_renyi(bell(), 1.0), ValidationError);
    CHECK_THROWS_AS(conditional_renyi(mixed_ab(1, 2, 3), 2.0, with(OptimizerMethod::grid_oracle)),
                    ValidationError);
    CHECK_THROWS_AS(conditional_renyi(bell(), 0.5, with(OptimizerMethod::fixed_point)),
                    ValidationError);
    const MultipartiteState single(random_density(2, 2, 1), {2});
    CHECK_THROWS_AS(conditional_renyi(single, 2.0), ValidationError);
}

TEST_CASE("data processing on B") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = mixed_ab(seed + 60, 2, 2);
        const auto ch = random_channel(2, 2, 2, seed + 61);
        const auto out = apply_channel_to_subsystem(s, ch, 1);
        for (double a : {0.75, 2.0}) {
            CHECK(conditional_renyi(s, a).value <= conditional_renyi(out, a).value + 2e-5);
        }
    }
    // Discarding C cannot lower the entropy.
    const MultipartiteState abc(random_density(8, 8, 70), {2, 2, 2});
    for (double a : {0.75, 2.0}) {
        CHECK(conditional_renyi(abc.marginal({0, 1}), a).value >=
              conditional_renyi(abc.grouped({{0}, {1, 2}}), a).value - 2e-5);
    }
}

TEST_CASE("classical conditioning") {
    SECTION("single block") {
        const auto b = mixed_ab(80);
        CHECK_THAT(classical_conditional({1.0}, {b}, 2.0).value,
                   WithinAbs(conditional_renyi(b, 2.0).value, 1e-12));
    }
    SECTION("identical blocks") {
        const auto b = mixed_ab(81);
        const double h = conditional_renyi(b, 1.5).value;
        for (double p : {0.1, 0.5, 0.8}) {
            CHECK_THAT(classical_conditional({p, 1.0 - p}, {b, b}, 1.5).value, WithinAbs(h, 1e-10));
        }
    }
    SECTION("Arimoto scalar example") {
        const std::vector<MultipartiteState> blocks{
            {DensityOperator(HermitianOperator::diagonal({1.0, 0.0})), {2, 1}},
            {DensityOperator(HermitianOperator::diagonal({0.5, 0.5})), {2, 1}}};
        const double want = -2.0 * std::log2(0.5 * (1.0 + std::pow(2.0, -0.5)));
        const auto r = classical_conditional({0.5, 0.5}, blocks, 2.0);
        CHECK_THAT(r.value, WithinAbs(want, 1e-12));
        CHECK_THAT(arimoto_conditional_entropy({0.5, 0.5}, {{1.0, 0.0}, {0.5, 0.5}}, 2.0),
                   WithinAbs(want, 1e-12));
        CHECK_THAT(r.optimal_weights[0] + r.optimal_weights[1], WithinAbs(1.0, 1e-14));
    }
    SECTION("closed form against the direct optimizer") {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const std::vector<double> w{0.35, 0.65};
            const std::vector<MultipartiteState> blocks{mixed_ab(90 + seed), mixed_ab(190 + seed)};
            const auto assembled = classical_quantum_assemble(w, blocks);
            for (double a : {0.7, 2.0}) {
                const double closed = classical_conditional(w, blocks, a).value;
                const double direct = conditional_renyi(assembled.grouped({{1}, {2, 0}}), a).value;
                CHECK(std::abs(closed - direct) <= 2e-5);
            }
        }
    }
    CHECK_THROWS_AS(classical_conditional({0.5, 0.6}, {mixed_ab(1), mixed_ab(2)}, 2.0),
                    ValidationError);
}

TEST_CASE("chain rule") {
    const auto ra = random_density(2, 2, 100).op();
    const auto rb = random_density(2, 2, 101).op();
    const auto rc = random_density(2, 2, 102).op();
    const MultipartiteState abc(DensityOperator(tensor_product(tensor_product(ra, rb), rc)), {2, 2, 2});
    for (double a : {0.75, 2.0}) {
        const auto c = chain_rule_check(abc, a);
        const double want = 1.0 - renyi_entropy(rc, RenyiOrder(a));
        CHECK_THAT(c.slack, WithinAbs(want, 2e-5));
        CHECK(c.rank_c == 2);
    }
    const MultipartiteState trivial_c(DensityOperator(tensor_product(ra, rb)), {2, 2, 1});
    const auto t = chain_rule_check(trivial_c, 1.5);
    CHECK(t.rank_c == 1);
    CHECK_THAT(t.slack, WithinAbs(0.0, 2e-5));
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const MultipartiteState r(random_density(8, 4, seed + 110), {2, 2, 2});
        CHECK(chain_rule_check(r, 1.5).slack >= -2e-5);
    }
    CHECK_THROWS_AS(chain_rule_check(bell(), 2.0), ValidationError);
}

TEST_CASE("duality") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto psi = random_pure({2, 2, 2}, seed + 120);
        for (double a : {2.0, 1.5, 0.75}) {
            const auto d = duality_check(psi, a);
            CHECK_THAT(d.beta, WithinAbs(duality_pair(a), 1e-15));
            CHECK(std::abs(d.gap) <= 2e-5);
        }
    }
    const auto ghz = [] {
        ComplexVector v = ComplexVector::Zero(8);
        v(0) = v(7) = 1.0 / std::sqrt(2.0);
        return MultipartiteState(DensityOperator(HermitianOperator::outer(v)), {2, 2, 2});
    }();
    CHECK_THAT(duality_check(ghz, 2.0).gap, WithinAbs(0.0, 1e-5));
    CHECK_THROWS_AS(duality_check(MultipartiteState(random_density(8, 2, 1), {2, 2, 2}), 2.0),
                    ValidationError);
}

TEST_CASE("duality at the limiting orders") {
    const auto psi = random_pure({2, 2, 2}, 130);
    const double hmin = conditional_min_entropy(psi.marginal({0, 1})).value;
    const double hmax = conditional_max_entropy(psi.marginal({0, 2})).value;
    CHECK(std::abs(hmin + hmax) <= 2e-2);
    const auto d = duality_check(psi, 200.0);
    CHECK(std::abs(d.gap) <= 2e-4);
}

TEST_CASE("minimax objective") {
    // Bell pair on AB with trivial C: a/(1-a) log 2^{1 - 1/a} = -1.
    ComplexVector v = ComplexVector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    const MultipartiteState bell_c(DensityOperator(HermitianOperator::outer(v)), {2, 2, 1});
    for (double a : {0.75, 2.0}) {
        CHECK_THAT(minimax_objective(bell_c, 0.5 * HermitianOperator::identity(2),
                                     HermitianOperator::identity(1), a),
                   WithinAbs(-1.0, 1e-12));
    }

    // The dual order with B and C swapped gives the negated objective.
    const auto psi = random_pure({2, 2, 3}, 140);
    const auto swapped = psi.marginal({0, 2, 1});
    const auto sb = random_density(2, 2, 141).op();
    const auto tc = random_density(3, 3, 142).op();
    for (double a : {0.75, 1.5, 3.0}) {
        const double b = duality_pair(a);
        CHECK_THAT(minimax_objective(swapped, tc, sb, b),
                   WithinAbs(-minimax_objective(psi, sb, tc, a), 1e-10));
    }

    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto p = random_pure({2, 2, 2}, seed + 150);
        for (double a : {0.75, 2.0}) {
            const auto m = alternating_minimax(p, a);
            CHECK(std::abs(m.value - conditional_renyi(p.marginal({0, 1}), a).value) <= 1e-4);
            CHECK_THAT(m.sigma_b.trace(), WithinAbs(1.0, 1e-10));
            CHECK_THAT(m.tau_c.trace(), WithinAbs(1.0, 1e-10));
        }
    }
}

TEST_CASE("uncertainty relation") {
    const POVM z = POVM::from_basis(Matrix::Identity(2, 2));
    const POVM x = POVM::from_basis(hadamard());
    CHECK_THAT(overlap_constant(z, x), WithinAbs(1.0 / std::sqrt(2.0), 1e-12));
    CHECK_THAT(overlap_constant(z, z), WithinAbs(1.0, 1e-12));

    const auto psi = random_pure({2, 2, 2}, 160);
    const auto u = uncertainty_check(psi, z, x, 2.0);
    CHECK_THAT(u.bound_printed, WithinAbs(0.5, 1e-12));
    CHECK_THAT(u.c_squared, WithinAbs(0.5, 1e-12));
    CHECK_THAT(u.bound_squared, WithinAbs(1.0, 1e-12));
    CHECK(u.margin_squared >= -2e-4);
    CHECK_THAT(u.lhs, WithinAbs(u.h_xb + u.h_yc, 1e-15));

    // Identical measurements on |0><0| with trivial B and C.
    ComplexVector k0 = ComplexVector::Zero(2);
    k0(0) = 1.0;
    const MultipartiteState zero(DensityOperator(HermitianOperator::outer(k0)), {2, 1, 1});
    const auto t = uncertainty_check(zero, z, z, 1.5);
    CHECK_THAT(t.lhs, WithinAbs(0.0, 1e-6));
    CHECK_THAT(t.c_printed, WithinAbs(1.0, 1e-12));
    CHECK_THAT(t.bound_squared, WithinAbs(0.0, 1e-12));
    CHECK_THAT(t.margin_squared, WithinAbs(0.0, 1e-6));

    CHECK_THROWS_AS(uncertainty_check(psi, z, x, 0.5), ValidationError);
    CHECK_THROWS_AS(uncertainty_check(psi.marginal({0, 1}), z, x, 2.0), ValidationError);
}
