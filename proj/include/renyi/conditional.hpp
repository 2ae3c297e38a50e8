#pragma once

/**
 * @file conditional.hpp
 * @brief Conditional Renyi entropies H_a(A|B) = sup_sigma -D_a(rho_AB || id_A (x) sigma_B)
 * and the identities built on them: classical conditioning, chain rule,
 * duality, and the entropic uncertainty relation.
 *
 * Three independent routes evaluate the supremum:
 *  - mirror descent on the density-matrix simplex with a central-difference
 *    gradient (default);
 *  - a fixed-point iteration alternating the two variational optimizers of
 *    the Schatten norm (sigma on B, tau on AB);
 *  - an exhaustive Bloch-ball grid with local refinement (qubit B only),
 *    used to certify the other two.
 *
 * The search always runs on supp rho_B: the entropy is invariant under
 * embedding B into a larger space, so nothing is lost, and for a < 1 the
 * optimizer is then supported inside supp rho_B as required.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "renyi/divergences.hpp"
#include "renyi/states.hpp"

namespace renyi {

enum class OptimizerMethod { mirror_descent, fixed_point, grid_oracle };

inline const char *to_string(OptimizerMethod m) {
    switch (m) {
    case OptimizerMethod::mirror_descent:
        return "mirror_descent";
    case OptimizerMethod::fixed_point:
        return "fixed_point";
    case OptimizerMethod::grid_oracle:
        return "grid_oracle";
    }
    return "unknown";
}

struct ConditionalOptions {
    OptimizerMethod method = OptimizerMethod::mirror_descent;
    double tolerance = 1e-5;
    int max_iterations = 500;
    Options base{};
};

struct ConditionalEntropyResult {
    double value = 0.0;
    /// Optimal conditioning state on the full B space.
    HermitianOperator optimizer_state;
    OptimizerMethod method = OptimizerMethod::mirror_descent;
    int iterations = 0;
    /// Frank-Wolfe gap tr[sigma G] - lambda_min(G) for mirror descent; last
    /// step decrement for the fixed point; final pattern step for the grid.
    double residual = 0.0;
};

namespace detail {

/// Hermitian matrix function on an already Hermitian Eigen matrix (no validation).
template <typename F> Matrix hermitian_apply(const Matrix &m, F &&f) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    RealVector v = es.eigenvalues();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = f(v(i));
    }
    return es.eigenvectors() * v.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix power_on_support(const Matrix &m, double p, const ZeroThreshold &zt) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    const RealVector &v = es.eigenvalues();
    const double cut = zt.cutoff(v.size() ? v(v.size() - 1) : 0.0);
    RealVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out(i) = v(i) > cut ? std::pow(v(i), p) : 0.0;
    }
    return es.eigenvectors() * out.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

/**
 * The conditioning problem restricted to A (x) supp rho_B. Evaluates
 * sigma -> D_a(rho || id_A (x) sigma) for r x r conditioning states.
 */
class ConditioningProblem {
  public:
    /// `restrict_to_support = false` keeps all of B (used by the grid oracle).
    ConditioningProblem(const MultipartiteState &state, double alpha, const Options &opt,
                        bool restrict_to_support = true)
        : alpha_(alpha), opt_(opt) {
        if (state.dims().size() != 2) {
            throw ValidationError("conditional entropy needs a bipartite state [dA, dB]");
        }
        d_a_ = state.dims()[0];
        d_b_ = state.dims()[1];
        const auto rho_b = state.marginal({1});
        if (restrict_to_support) {
            const auto supp = support(rho_b.op(), opt.zero);
            basis_ = supp.basis;
            r_ = supp.rank;
        } else {
            basis_ = Matrix::Identity(d_b_, d_b_);
            r_ = d_b_;
        }
        const Matrix lift = kron(Matrix::Identity(d_a_, d_a_), basis_);
        rho_ = Matrix(lift.adjoint() * state.matrix() * lift);
        rho_ = (rho_ + rho_.adjoint()) * 0.5;
        trace_rho_ = rho_.trace().real();
        rho_b_reduced_ = Matrix(basis_.adjoint() * rho_b.matrix() * basis_);
        rho_b_reduced_ = (rho_b_reduced_ + rho_b_reduced_.adjoint()) * 0.5;
        rho_b_reduced_ /= rho_b_reduced_.trace().real();
    }

    [[nodiscard]] int reduced_dim() const { return r_; }
    [[nodiscard]] int d_a() const { return d_a_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] const Matrix &rho() const { return rho_; }
    [[nodiscard]] const Matrix &rho_b() const { return rho_b_reduced_; }
    [[nodiscard]] const Options &options() const { return opt_; }

    /// Embeds a reduced conditioning state back into B.
    [[nodiscard]] HermitianOperator lift(const Matrix &sigma) const {
        return HermitianOperator(Matrix(basis_ * sigma * basis_.adjoint()), 1e-8);
    }

    /// D_a(rho || id_A (x) sigma); +inf on support failures. `sigma` is r x r PSD.
    [[nodiscard]] double divergence(const Matrix &sigma) const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
        const RealVector &lam = es.eigenvalues();
        const double lam_max = lam(lam.size() - 1);
        if (!(lam_max > 0.0)) {
            return kInf;
        }
        const double cut = opt_.zero.cutoff(lam_max);
        const double g = (1.0 - alpha_) / (2.0 * alpha_);
        RealVector powered(r_);
        bool singular = false;
        for (int i = 0; i < r_; ++i) {
            if (lam(i) > cut) {
                powered(i) = std::pow(lam(i), g);
            } else {
                powered(i) = 0.0;
                singular = true;
            }
        }
        const Matrix &v = es.eigenvectors();
        if (singular && alpha_ > 1.0) {
            // rho must sit inside supp(id (x) sigma).
            Matrix kernel = Matrix::Zero(r_, r_);
            for (int i = 0; i < r_; ++i) {
                if (lam(i) <= cut) {
                    kernel += v.col(i) * v.col(i).adjoint();
                }
            }
            const Matrix k = kron(Matrix::Identity(d_a_, d_a_), kernel);
            const double leak = (k * rho_).trace().real();
            if (leak > 1e-12 * trace_rho_) {
                return kInf;
            }
        }
        const Matrix sp = v * powered.cast<Complex>().asDiagonal() * v.adjoint();
        const Matrix s = kron(Matrix::Identity(d_a_, d_a_), sp);
        Matrix m = s * rho_ * s;
        m = (m + m.adjoint()) * 0.5;
        Eigen::SelfAdjointEigenSolver<Matrix> em(m, Eigen::EigenvaluesOnly);
        const double ln_q = log_power_sum(em.eigenvalues(), alpha_, opt_.zero);
        if (!std::isfinite(ln_q)) {
            return kInf;
        }
        return opt_.from_ln(ln_q - std::log(trace_rho_)) / (alpha_ - 1.0);
    }

  private:
    double alpha_;
    Options opt_;
    int d_a_ = 1, d_b_ = 1, r_ = 1;
    Matrix basis_;
    Matrix rho_;
    Matrix rho_b_reduced_;
    double trace_rho_ = 1.0;
};

/// Orthonormal (Hilbert-Schmidt) Hermitian basis of r x r matrices.
inline std::vector<Matrix> hermitian_basis(int r) {
    std::vector<Matrix> out;
    const double inv = 1.0 / std::numbers::sqrt2;
    for (int k = 0; k < r; ++k) {
        Matrix e = Matrix::Zero(r, r);
        e(k, k) = 1.0;
        out.push_back(e);
    }
    for (int k = 0; k < r; ++k) {
        for (int l = k + 1; l < r; ++l) {
            Matrix re = Matrix::Zero(r, r);
            re(k, l) = inv;
            re(l, k) = inv;
            out.push_back(re);
            Matrix im = Matrix::Zero(r, r);
            im(k, l) = Complex(0.0, -inv);
            im(l, k) = Complex(0.0, inv);
            out.push_back(im);
        }
    }
    return out;
}

using MatrixObjective = std::function<double(const Matrix &)>;

struct SimplexSearchResult {
    Matrix sigma;
    double value = kInf;
    int iterations = 0;
    double residual = 0.0;
};

/**
 * Minimizes f over r x r density matrices by matrix exponentiated gradient:
 * log sigma <- log sigma - eta G, renormalized, with G a central-difference
 * gradient on a Hermitian basis and eta set by backtracking. Stops when the
 * Frank-Wolfe gap drops below tolerance, when no step decreases f, or after
 * max_iterations.
 */
inline SimplexSearchResult mirror_descent(const MatrixObjective &f, const Matrix &start,
                                          double tolerance, int max_iterations) {
    const int r = static_cast<int>(start.rows());
    SimplexSearchResult out;
    Matrix sigma = start / start.trace().real();
    double value = f(sigma);
    if (r == 1) {
        out.sigma = sigma;
        out.value = value;
        return out;
    }
    if (!std::isfinite(value)) {
        throw ComputationError("mirror descent needs a feasible starting state");
    }
    const auto basis = hermitian_basis(r);
    Matrix log_sigma =
        hermitian_apply(sigma, [](double x) { return std::log(std::max(x, 1e-300)); });
    double eta = 1.0;
    Matrix grad(r, r);
    int it = 0;
    for (; it < max_iterations; ++it) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(sigma, Eigen::EigenvaluesOnly);
        const double h = std::min(1e-6, 0.1 * es.eigenvalues()(0));
        grad.setZero();
        for (const auto &e : basis) {
            const double fp = f(sigma + h * e);
            const double fm = f(sigma - h * e);
            grad += ((fp - fm) / (2.0 * h)) * e;
        }
        {
            Eigen::SelfAdjointEigenSolver<Matrix> eg(grad, Eigen::EigenvaluesOnly);
            out.residual = (sigma * grad).trace().real() - eg.eigenvalues()(0);
        }
        if (out.residual < tolerance) {
            break;
        }
        bool accepted = false;
        double next_value = value;
        Matrix next_sigma, next_log;
        while (eta > 1e-14) {
            Matrix trial_log = log_sigma - eta * grad;
            trial_log = (trial_log + trial_log.adjoint()) * 0.5;
            Matrix trial = hermitian_apply(trial_log, [](double x) { return std::exp(x); });
            const double tr = trial.trace().real();
            trial /= tr;
            trial_log -= std::log(tr) * Matrix::Identity(r, r);
            const double fv = f(trial);
            if (fv < value) {
                accepted = true;
                next_value = fv;
                next_sigma = trial;
                next_log = trial_log;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) {
            break;
        }
        sigma = next_sigma;
        log_sigma = next_log;
        value = next_value;
        eta = std::min(eta * 2.0, 1e4);
    }
    out.sigma = sigma;
    out.value = value;
    out.iterations = it;
    return out;
}

inline Matrix bloch_state(double x, double y, double z) {
    Matrix m(2, 2);
    m(0, 0) = 0.5 * (1.0 + z);
    m(1, 1) = 0.5 * (1.0 - z);
    m(0, 1) = Complex(0.5 * x, -0.5 * y);
    m(1, 0) = Complex(0.5 * x, 0.5 * y);
    return m;
}

/**
 * Exhaustive minimization over the Bloch ball: radii i/40 (i = 0..40) times
 * 400 Fibonacci-sphere directions, then a compass search from the best
 * point with the step halved down to 1e-10.
 */
inline SimplexSearchResult bloch_grid_minimize(const MatrixObjective &f) {
    constexpr int kRadii = 40;
    constexpr int kDirections = 400;
    std::vector<std::array<double, 3>> dirs;
    dirs.reserve(kDirections);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < kDirections; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / kDirections;
        const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * k;
        dirs.push_back({rad * std::cos(phi), rad * std::sin(phi), z});
    }
    SimplexSearchResult out;
    std::array<double, 3> best{0.0, 0.0, 0.0};
    out.value = f(bloch_state(0, 0, 0));
    int evals = 1;
    for (int i = 1; i <= kRadii; ++i) {
        const double radius = static_cast<double>(i) / kRadii;
        for (const auto &d : dirs) {
            const double v = f(bloch_state(radius * d[0], radius * d[1], radius * d[2]));
            ++evals;
            if (v < out.value) {
                out.value = v;
                best = {radius * d[0], radius * d[1], radius * d[2]};
            }
        }
    }
    double step = 1.0 / kRadii;
    while (step > 1e-10) {
        bool improved = false;
        for (int axis = 0; axis < 3; ++axis) {
            for (double sign : {1.0, -1.0}) {
                auto cand = best;
                cand[axis] += sign * step;
                const double norm =
                    std::sqrt(cand[0] * cand[0] + cand[1] * cand[1] + cand[2] * cand[2]);
                if (norm > 1.0) {
                    for (auto &c : cand) {
                        c /= norm;
                    }
                }
                const double v = f(bloch_state(cand[0], cand[1], cand[2]));
                ++evals;
                if (v < out.value) {
                    out.value = v;
                    best = cand;
                    improved = true;
                }
            }
        }
        if (!improved) {
            step *= 0.5;
        }
    }
    out.sigma = bloch_state(best[0], best[1], best[2]);
    out.iterations = evals;
    out.residual = step;
    return out;
}

/**
 * Alternates the two variational optimizers:
 *   tau   <- (rho^1/2 (id (x) sigma^{(1-a)/a}) rho^1/2)^a / tr,
 *   sigma <- (tr_A[rho^1/2 tau^{(a-1)/a} rho^1/2])^b / tr,  b = a / (2a - 1).
 */
inline SimplexSearchResult fixed_point_iteration(const ConditioningProblem &problem,
                                                 double tolerance, int max_iterations) {
    const double a = problem.alpha();
    if (std::abs(2.0 * a - 1.0) < 1e-12) {
        throw ValidationError("fixed-point method is undefined at alpha = 1/2");
    }
    const double b = a / (2.0 * a - 1.0);
    const int r = problem.reduced_dim();
    const int da = problem.d_a();
    const ZeroThreshold &zt = problem.options().zero;
    const Matrix root = power_on_support(problem.rho(), 0.5, zt);
    SimplexSearchResult out;
    Matrix sigma = problem.rho_b();
    double value = problem.divergence(sigma);
    int it = 0;
    double decrement = kInf;
    const int dims[2] = {da, r};
    const int trace_a[1] = {0};
    for (; it < max_iterations && r > 1; ++it) {
        const Matrix sp = power_on_support(sigma, (1.0 - a) / a, zt);
        Matrix x = root * kron(Matrix::Identity(da, da), sp) * root;
        x = (x + x.adjoint()) * 0.5;
        Matrix tau = power_on_support(x, a, zt);
        tau /= tau.trace().real();
        const Matrix tp = power_on_support(tau, (a - 1.0) / a, zt);
        Matrix n = partial_trace(Matrix(root * tp * root), dims, trace_a);
        n = (n + n.adjoint()) * 0.5;
        Matrix next = power_on_support(n, b, zt);
        next /= next.trace().real();
        const double next_value = problem.divergence(next);
        decrement = std::abs(value - next_value);
        sigma = next;
        value = next_value;
        if (decrement < tolerance / 10.0) {
            ++it;
            break;
        }
    }
    out.sigma = sigma;
    out.value = value;
    out.iterations = it;
    out.residual = r > 1 ? decrement : 0.0;
    return out;
}

inline void require_normalized(const MultipartiteState &state) {
    if (std::abs(state.density().trace() - 1.0) > 1e-8) {
        throw ValidationError("conditional entropies need a normalized state (trace " +
                              std::to_string(state.density().trace()) + ")");
    }
}

inline void require_core_order(double alpha) {
    const RenyiOrder order(alpha);
    if (!order.is_core()) {
        throw ValidationError("conditional Renyi entropy needs alpha in [1/2, 1) u (1, inf)");
    }
}

} // namespace detail

/**
 * H_a(A|B) = sup over states sigma_B of -D_a(rho_AB || id_A (x) sigma_B)
 * for a normalized bipartite state with dims [dA, dB].
 */
inline ConditionalEntropyResult conditional_renyi(const MultipartiteState &rho_ab, double alpha,
                                                  const ConditionalOptions &copt = {}) {
    detail::require_normalized(rho_ab);
    detail::require_core_order(alpha);
    const detail::ConditioningProblem problem(rho_ab, alpha, copt.base);
    detail::SimplexSearchResult found;
    switch (copt.method) {
    case OptimizerMethod::mirror_descent:
        found = detail::mirror_descent([&](const Matrix &s) { return problem.divergence(s); },
                                       problem.rho_b(), copt.tolerance, copt.max_iterations);
        break;
    case OptimizerMethod::fixed_point:
        found = detail::fixed_point_iteration(problem, copt.tolerance, copt.max_iterations);
        break;
    case OptimizerMethod::grid_oracle: {
        if (rho_ab.dims()[1] != 2) {
            throw ValidationError("grid oracle needs a qubit conditioning system");
        }
        // Searches all of B, not just supp rho_B, so it also checks the restriction.
        const detail::ConditioningProblem full(rho_ab, alpha, copt.base, false);
        found = detail::bloch_grid_minimize([&](const Matrix &s) { return full.divergence(s); });
        ConditionalEntropyResult res;
        res.value = -found.value;
        res.optimizer_state = full.lift(found.sigma);
        res.method = copt.method;
        res.iterations = found.iterations;
        res.residual = found.residual;
        return res;
    }
    }
    ConditionalEntropyResult res;
    res.value = -found.value;
    res.optimizer_state = problem.lift(found.sigma);
    res.method = copt.method;
    res.iterations = found.iterations;
    res.residual = found.residual;
    return res;
}

/**
 * H_min(A|B) = sup_sigma -D_max(rho_AB || id_A (x) sigma_B). Warm-started from
 * the a = 200 optimizer, then refined by mirror descent on D_max itself.
 */
inline ConditionalEntropyResult conditional_min_entropy(const MultipartiteState &rho_ab,
                                                        const ConditionalOptions &copt = {}) {
    detail::require_normalized(rho_ab);
    ConditionalOptions warm = copt;
    warm.method = OptimizerMethod::mirror_descent;
    const auto start = conditional_renyi(rho_ab, 200.0, warm);
    const detail::ConditioningProblem problem(rho_ab, 200.0, copt.base);
    const int da = rho_ab.dims()[0];
    const Options base = copt.base;
    auto dmax = [&](const Matrix &s) {
        const auto lifted = problem.lift(s);
        return max_relative_entropy(
                   rho_ab.op(),
                   HermitianOperator(kron(Matrix::Identity(da, da), lifted.matrix()), 1e-8), base)
            .value;
    };
    // Conditioning state in reduced coordinates.
    const auto rho_b = rho_ab.marginal({1});
    const auto supp = support(rho_b.op(), copt.base.zero);
    Matrix reduced = supp.basis.adjoint() * start.optimizer_state.matrix() * supp.basis;
    reduced = (reduced + reduced.adjoint()) * 0.5;
    auto found = detail::mirror_descent(dmax, reduced, copt.tolerance, copt.max_iterations);
    ConditionalEntropyResult res;
    res.value = -found.value;
    res.optimizer_state = problem.lift(found.sigma);
    res.method = OptimizerMethod::mirror_descent;
    res.iterations = found.iterations + start.iterations;
    res.residual = found.residual;
    return res;
}

/// H_max(A|B) = H_{1/2}(A|B).
inline ConditionalEntropyResult conditional_max_entropy(const MultipartiteState &rho_ab,
                                                        const ConditionalOptions &copt = {}) {
    return conditional_renyi(rho_ab, 0.5, copt);
}

/// H(A|B) = H(rho_AB) - H(rho_B).
inline double conditional_vn_entropy(const MultipartiteState &rho_ab, const Options &opt = {}) {
    detail::require_normalized(rho_ab);
    if (rho_ab.dims().size() != 2) {
        throw ValidationError("conditional entropy needs a bipartite state [dA, dB]");
    }
    return von_neumann_entropy(rho_ab.op(), opt) -
           von_neumann_entropy(rho_ab.marginal({1}).op(), opt);
}

// ---------------------------------------------------------------------------
// Classical conditioning

struct ClassicalConditionalResult {
    double value = 0.0;
    std::vector<double> block_entropies;
    /// q_y = r_y / sum_z r_z with r_y = p_y b^{((1-a)/a) H_a(A|B)_y}.
    std::vector<double> optimal_weights;
};

/**
 * H_a(A|BY) for rho_ABY = (+)_y p_y rho_AB^y from the per-block conditional
 * entropies: a/(1-a) log sum_y p_y b^{((1-a)/a) H_a(A|B)_{rho^y}}.
 * Blocks are bipartite [dA, dB] states; dB = 1 means an empty B.
 */
inline ClassicalConditionalResult classical_conditional(const std::vector<double> &weights,
                                                        const std::vector<MultipartiteState> &blocks,
                                                        double alpha,
                                                        const ConditionalOptions &copt = {}) {
    detail::require_core_order(alpha);
    if (weights.size() != blocks.size() || weights.empty()) {
        throw ValidationError("need one weight per block");
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0) {
            throw ValidationError("weights must be nonnegative");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) {
        throw ValidationError("weights must sum to 1");
    }
    const Options &o = copt.base;
    const double k = (1.0 - alpha) / alpha;
    ClassicalConditionalResult out;
    double sum = 0.0;
    for (std::size_t y = 0; y < blocks.size(); ++y) {
        double h = 0.0;
        if (blocks[y].dims().size() == 2 && blocks[y].dims()[1] == 1) {
            h = renyi_entropy(blocks[y].op(), RenyiOrder(alpha), o);
        } else {
            h = conditional_renyi(blocks[y], alpha, copt).value;
        }
        out.block_entropies.push_back(h);
        const double ry = weights[y] * o.exp(k * h);
        out.optimal_weights.push_back(ry);
        sum += ry;
    }
    for (auto &q : out.optimal_weights) {
        q /= sum;
    }
    out.value = alpha / (1.0 - alpha) * o.log(sum);
    return out;
}

/**
 * Arimoto's conditional entropy a/(1-a) log sum_y p_y (sum_x p(x|y)^a)^{1/a}.
 */
inline double arimoto_conditional_entropy(const std::vector<double> &p_y,
                                          const std::vector<std::vector<double>> &p_x_given_y,
                                          double alpha, const Options &opt = {}) {
    if (p_y.size() != p_x_given_y.size()) {
        throw ValidationError("need one conditional distribution per y");
    }
    double sum = 0.0;
    for (std::size_t y = 0; y < p_y.size(); ++y) {
        double inner = 0.0;
        for (double p : p_x_given_y[y]) {
            inner += std::pow(p, alpha);
        }
        sum += p_y[y] * std::pow(inner, 1.0 / alpha);
    }
    return alpha / (1.0 - alpha) * opt.log(sum);
}

// ---------------------------------------------------------------------------
// Chain rule

struct ChainRuleCheck {
    double lhs = 0.0; // H_a(A|BC)
    double rhs = 0.0; // H_a(AC|B) - log rank(rho_C)
    double slack = 0.0;
    int rank_c = 0;
};

inline ChainRuleCheck chain_rule_check(const MultipartiteState &rho_abc, double alpha,
                                       const ConditionalOptions &copt = {}) {
    if (rho_abc.dims().size() != 3) {
        throw ValidationError("chain rule needs a tripartite state [dA, dB, dC]");
    }
    ChainRuleCheck out;
    out.rank_c = support(rho_abc.marginal({2}).op(), copt.base.zero).rank;
    out.lhs = conditional_renyi(rho_abc.grouped({{0}, {1, 2}}), alpha, copt).value;
    const double h_ac_b = conditional_renyi(rho_abc.grouped({{0, 2}, {1}}), alpha, copt).value;
    out.rhs = h_ac_b - copt.base.log(static_cast<double>(out.rank_c));
    out.slack = out.lhs - out.rhs;
    return out;
}

// ---------------------------------------------------------------------------
// Duality

/// beta with 1/alpha + 1/beta = 2.
inline double duality_pair(double alpha) {
    if (!(alpha > 0.5) || !std::isfinite(alpha)) {
        throw ValidationError("dual order needs alpha > 1/2");
    }
    return alpha / (2.0 * alpha - 1.0);
}

namespace detail {
inline void require_pure(const MultipartiteState &s) {
    if (s.dims().size() != 3) {
        throw ValidationError("need a tripartite state [dA, dB, dC]");
    }
    const auto &v = s.op().spectrum().values;
    if (std::abs(v(0) - 1.0) > 1e-8) {
        throw ValidationError("state must be pure and normalized");
    }
}
} // namespace detail

struct DualityCheck {
    double h_ab = 0.0;       // H_a(A|B)
    double minus_h_ac = 0.0; // -H_b(A|C)
    double gap = 0.0;        // H_a(A|B) + H_b(A|C)
    double beta = 0.0;
};

inline DualityCheck duality_check(const MultipartiteState &pure_abc, double alpha,
                                  const ConditionalOptions &copt = {}) {
    detail::require_pure(pure_abc);
    DualityCheck out;
    out.beta = duality_pair(alpha);
    out.h_ab = conditional_renyi(pure_abc.marginal({0, 1}), alpha, copt).value;
    const double h_ac = conditional_renyi(pure_abc.marginal({0, 2}), out.beta, copt).value;
    out.minus_h_ac = -h_ac;
    out.gap = out.h_ab + h_ac;
    return out;
}

/**
 * a/(1-a) log <phi| id_A (x) sigma_B^{1/a - 1} (x) tau_C^{1 - 1/a} |phi>
 * with generalized powers, for a pure state on A (x) B (x) C.
 */
inline double minimax_objective(const MultipartiteState &pure_abc, const HermitianOperator &sigma_b,
                                const HermitianOperator &tau_c, double alpha,
                                const Options &opt = {}) {
    detail::require_pure(pure_abc);
    const auto &d = pure_abc.dims();
    if (sigma_b.dim() != d[1] || tau_c.dim() != d[2]) {
        throw ValidationError("sigma_B / tau_C dimensions do not match the state");
    }
    const auto sp = matrix_power_on_support(sigma_b, 1.0 / alpha - 1.0, opt.zero);
    const auto tp = matrix_power_on_support(tau_c, 1.0 - 1.0 / alpha, opt.zero);
    const Matrix op = kron(kron(Matrix::Identity(d[0], d[0]), sp.matrix()), tp.matrix());
    const double v = (pure_abc.matrix() * op).trace().real();
    if (!(v > 0.0)) {
        return alpha < 1.0 ? -kInf : kInf;
    }
    return alpha / (1.0 - alpha) * opt.log(v);
}

struct MinimaxResult {
    double value = 0.0;
    HermitianOperator sigma_b;
    HermitianOperator tau_c;
    int iterations = 0;
};

/**
 * Alternating best responses on the minimax form, from maximally mixed
 * starts: tau_C <- M_C^a / tr with M_C = tr_AB[S phi S], S = sqrt(sigma^{1/a-1}),
 * sigma_B <- N_B^b / tr with N_B = tr_AC[T phi T], T = sqrt(tau^{1-1/a}).
 * The returned value is the objective after the last tau response.
 */
inline MinimaxResult alternating_minimax(const MultipartiteState &pure_abc, double alpha,
                                         double tolerance = 1e-10, int max_iterations = 2000,
                                         const Options &opt = {}) {
    detail::require_pure(pure_abc);
    const double b = duality_pair(alpha);
    const auto &d = pure_abc.dims();
    const ZeroThreshold &zt = opt.zero;
    Matrix sigma = Matrix::Identity(d[1], d[1]) / d[1];
    Matrix tau = Matrix::Identity(d[2], d[2]) / d[2];
    const Matrix &phi = pure_abc.matrix();
    const int trace_ab[2] = {0, 1};
    const int trace_ac[2] = {0, 2};
    MinimaxResult out;
    double prev = kInf;
    int it = 0;
    for (; it < max_iterations; ++it) {
        const Matrix s_half = detail::power_on_support(sigma, 0.5 * (1.0 / alpha - 1.0), zt);
        const Matrix ls = kron(kron(Matrix::Identity(d[0], d[0]), s_half), Matrix::Identity(d[2], d[2]));
        Matrix mc = partial_trace(Matrix(ls * phi * ls), d, trace_ab);
        mc = (mc + mc.adjoint()) * 0.5;
        tau = detail::power_on_support(mc, alpha, zt);
        tau /= tau.trace().real();
        const double value = minimax_objective(pure_abc, HermitianOperator(sigma, 1e-8),
                                               HermitianOperator(tau, 1e-8), alpha, opt);
        out.value = value;
        if (std::abs(value - prev) < tolerance) {
            ++it;
            break;
        }
        prev = value;
        const Matrix t_half = detail::power_on_support(tau, 0.5 * (1.0 - 1.0 / alpha), zt);
        const Matrix lt = kron(kron(Matrix::Identity(d[0], d[0]), Matrix::Identity(d[1], d[1])), t_half);
        Matrix nb = partial_trace(Matrix(lt * phi * lt), d, trace_ac);
        nb = (nb + nb.adjoint()) * 0.5;
        sigma = detail::power_on_support(nb, b, zt);
        sigma /= sigma.trace().real();
    }
    out.sigma_b = HermitianOperator(sigma, 1e-8);
    out.tau_c = HermitianOperator(tau, 1e-8);
    out.iterations = it;
    return out;
}

// ---------------------------------------------------------------------------
// Uncertainty relation

struct UncertaintyCheck {
    double h_xb = 0.0;
    double h_yc = 0.0;
    double lhs = 0.0;
    double beta = 0.0;
    /// max ||sqrt(M_x) sqrt(N_y)|| (the unsquared convention).
    double c_printed = 0.0;
    /// c_printed^2; reduces to max |<e_x|f_y>|^2 for rank-one projectors.
    double c_squared = 0.0;
    double bound_printed = 0.0;
    double bound_squared = 0.0;
    double margin_printed = 0.0;
    double margin_squared = 0.0;
};

inline double overlap_constant(const POVM &m, const POVM &n) {
    double c = 0.0;
    for (const auto &mx : m.elements()) {
        const Matrix a = matrix_power_on_support(mx, 0.5).matrix();
        for (const auto &ny : n.elements()) {
            const Matrix b = matrix_power_on_support(ny, 0.5).matrix();
            c = std::max(c, operator_norm(a * b));
        }
    }
    return c;
}

/**
 * H_a(X|B) + H_b(Y|C) against log 1/c for POVMs M, N on A of a normalized
 * state [dA, dB, dC], with 1/a + 1/b = 2.
 */
inline UncertaintyCheck uncertainty_check(const MultipartiteState &rho_abc, const POVM &m,
                                          const POVM &n, double alpha,
                                          const ConditionalOptions &copt = {}) {
    if (rho_abc.dims().size() != 3) {
        throw ValidationError("uncertainty relation needs a tripartite state [dA, dB, dC]");
    }
    detail::require_normalized(rho_abc);
    UncertaintyCheck out;
    out.beta = duality_pair(alpha);
    detail::require_core_order(out.beta);
    const auto xbc = measure(rho_abc, m, 0);
    const auto ybc = measure(rho_abc, n, 0);
    out.h_xb = conditional_renyi(xbc.marginal({0, 1}), alpha, copt).value;
    out.h_yc = conditional_renyi(ybc.marginal({0, 2}), out.beta, copt).value;
    out.lhs = out.h_xb + out.h_yc;
    out.c_printed = overlap_constant(m, n);
    out.c_squared = out.c_printed * out.c_printed;
    out.bound_printed = -copt.base.log(out.c_printed);
    out.bound_squared = -copt.base.log(out.c_squared);
    out.margin_printed = out.lhs - out.bound_printed;
    out.margin_squared = out.lhs - out.bound_squared;
    return out;
}

} // namespace renyi
