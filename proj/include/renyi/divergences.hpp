#pragma once

/**
 * @file divergences.hpp
 * @brief Sandwiched and Petz Renyi divergences, their alpha -> 1 and
 * alpha -> infinity limits, the two-argument auxiliary form, and the alpha
 * derivative of the sandwiched trace functional.
 *
 * Infinite values are semantic: they are returned as tagged values with a
 * reason, decided from support relations, never produced by overflow.
 */

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "renyi/linalg.hpp"

namespace renyi {

struct Options {
    ZeroThreshold zero{};
    /// 2 for bits; std::numbers::e for nats.
    double log_base = 2.0;

    [[nodiscard]] double log(double x) const { return std::log(x) / std::log(log_base); }
    [[nodiscard]] double exp(double x) const { return std::pow(log_base, x); }
    /// Converts a natural logarithm to this base.
    [[nodiscard]] double from_ln(double ln_x) const { return ln_x / std::log(log_base); }
};

enum class OrderValidity {
    core,     // [1/2, 1) u (1, inf)
    extended, // (0, 1/2)
};

/// Renyi order alpha > 0 away from the removable singularity at 1.
class RenyiOrder {
  public:
    static constexpr double kMinDistanceFromOne = 1e-4;

    explicit RenyiOrder(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) {
            throw ValidationError("Renyi order must be a finite positive number, got " +
                                  std::to_string(alpha));
        }
        if (std::abs(alpha - 1.0) < kMinDistanceFromOne) {
            throw ValidationError("Renyi order " + std::to_string(alpha) +
                                  " too close to 1 for direct evaluation; use relative_entropy");
        }
    }

    [[nodiscard]] double value() const { return alpha_; }
    [[nodiscard]] OrderValidity validity() const {
        return alpha_ >= 0.5 ? OrderValidity::core : OrderValidity::extended;
    }
    [[nodiscard]] bool is_core() const { return validity() == OrderValidity::core; }

  private:
    double alpha_;
};

enum class DivergenceReason { ok, sigma_not_dominating, orthogonal_states, tau_not_dominating };

inline const char *to_string(DivergenceReason r) {
    switch (r) {
    case DivergenceReason::ok:
        return "ok";
    case DivergenceReason::sigma_not_dominating:
        return "sigma_not_dominating";
    case DivergenceReason::orthogonal_states:
        return "orthogonal_states";
    case DivergenceReason::tau_not_dominating:
        return "tau_not_dominating";
    }
    return "unknown";
}

/// Extended real with the reason for an infinite value.
struct DivergenceValue {
    double value = 0.0;
    DivergenceReason reason = DivergenceReason::ok;

    static DivergenceValue finite(double v) { return {v, DivergenceReason::ok}; }
    static DivergenceValue plus_infinity(DivergenceReason why) { return {kInf, why}; }
    static DivergenceValue minus_infinity(DivergenceReason why) { return {-kInf, why}; }

    [[nodiscard]] bool is_finite() const { return std::isfinite(value); }
};

// ---------------------------------------------------------------------------
// Support relations

/// supp rho contained in supp sigma, tested as tr[P_rho (1 - P_sigma)] <= 1e-9.
inline bool dominates(const HermitianOperator &sigma, const HermitianOperator &rho,
                      const ZeroThreshold &zt = {}) {
    const auto s = support(sigma, zt);
    const auto r = support(rho, zt);
    const Matrix outside = r.basis.adjoint() * s.basis;
    const double inside = outside.squaredNorm();
    return static_cast<double>(r.rank) - inside <= 1e-9;
}

/// tr[P_rho P_sigma] <= 1e-9.
inline bool orthogonal(const HermitianOperator &rho, const HermitianOperator &sigma,
                       const ZeroThreshold &zt = {}) {
    const auto s = support(sigma, zt);
    const auto r = support(rho, zt);
    if (r.rank == 0 || s.rank == 0) {
        return true;
    }
    return (r.basis.adjoint() * s.basis).squaredNorm() <= 1e-9;
}

namespace detail {

inline void require_nonzero(const HermitianOperator &rho, const ZeroThreshold &zt) {
    require_psd(rho, zt, "rho");
    if (rho.dim() == 0 || rho.max_eigenvalue() <= zt.abs) {
        throw ValidationError("rho must be nonzero");
    }
}

inline void require_same_dim(const HermitianOperator &a, const HermitianOperator &b) {
    HermitianOperator::check_same_dim(a, b);
}

/// tr[(sigma^{(1-a)/2a} rho sigma^{(1-a)/2a})^a] with generalized powers.
inline double sandwiched_trace(const HermitianOperator &rho, const HermitianOperator &sigma,
                               double alpha, const ZeroThreshold &zt) {
    const auto s = matrix_power_on_support(sigma, (1.0 - alpha) / (2.0 * alpha), zt);
    const HermitianOperator m(Matrix(s.matrix() * rho.matrix() * s.matrix()), 1e-8);
    return trace_function_on_support(m, [alpha](double x) { return std::pow(x, alpha); }, zt);
}

/// ln sum_i x_i^a over the positive entries, scaled by the largest so large a cannot overflow.
inline double log_power_sum(const RealVector &x, double alpha, const ZeroThreshold &zt) {
    const double top = x.size() ? x.maxCoeff() : 0.0;
    if (!(top > 0.0)) {
        return -kInf;
    }
    const double cut = zt.cutoff(top);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) > cut) {
            sum += std::pow(x(i) / top, alpha);
        }
    }
    return alpha * std::log(top) + std::log(sum);
}

/// ln tr[(sigma^{(1-a)/2a} rho sigma^{(1-a)/2a})^a].
inline double log_sandwiched_trace(const HermitianOperator &rho, const HermitianOperator &sigma,
                                   double alpha, const ZeroThreshold &zt) {
    const auto s = matrix_power_on_support(sigma, (1.0 - alpha) / (2.0 * alpha), zt);
    const HermitianOperator m(Matrix(s.matrix() * rho.matrix() * s.matrix()), 1e-8);
    return log_power_sum(m.spectrum().values, alpha, zt);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Divergences

/**
 * Sandwiched Renyi divergence
 *   1/(a-1) log( tr[(sigma^{(1-a)/2a} rho sigma^{(1-a)/2a})^a] / tr rho ),
 * +inf when rho and sigma are orthogonal or when a > 1 and sigma does not
 * dominate rho.
 */
inline DivergenceValue sandwiched_divergence(const HermitianOperator &rho,
                                             const HermitianOperator &sigma, RenyiOrder order,
                                             const Options &opt = {}) {
    detail::require_same_dim(rho, sigma);
    detail::require_nonzero(rho, opt.zero);
    require_psd(sigma, opt.zero, "sigma");
    const double a = order.value();
    if (a > 1.0 && !dominates(sigma, rho, opt.zero)) {
        return DivergenceValue::plus_infinity(DivergenceReason::sigma_not_dominating);
    }
    if (orthogonal(rho, sigma, opt.zero)) {
        return DivergenceValue::plus_infinity(DivergenceReason::orthogonal_states);
    }
    const double ln_q = detail::log_sandwiched_trace(rho, sigma, a, opt.zero);
    if (!std::isfinite(ln_q)) {
        return DivergenceValue::plus_infinity(DivergenceReason::orthogonal_states);
    }
    return DivergenceValue::finite(opt.from_ln(ln_q - std::log(rho.trace())) / (a - 1.0));
}

/// Petz divergence 1/(a-1) log( tr[rho^a sigma^{1-a}] / tr rho ).
inline DivergenceValue petz_divergence(const HermitianOperator &rho, const HermitianOperator &sigma,
                                       RenyiOrder order, const Options &opt = {}) {
    detail::require_same_dim(rho, sigma);
    detail::require_nonzero(rho, opt.zero);
    require_psd(sigma, opt.zero, "sigma");
    const double a = order.value();
    if (a > 1.0 && !dominates(sigma, rho, opt.zero)) {
        return DivergenceValue::plus_infinity(DivergenceReason::sigma_not_dominating);
    }
    if (orthogonal(rho, sigma, opt.zero)) {
        return DivergenceValue::plus_infinity(DivergenceReason::orthogonal_states);
    }
    const auto ra = matrix_power_on_support(rho, a, opt.zero);
    const auto sb = matrix_power_on_support(sigma, 1.0 - a, opt.zero);
    const double q = (ra.matrix() * sb.matrix()).trace().real();
    if (!(q > 0.0)) {
        return DivergenceValue::plus_infinity(DivergenceReason::orthogonal_states);
    }
    return DivergenceValue::finite(opt.log(q / rho.trace()) / (a - 1.0));
}

/// tr[rho (log rho - log sigma)] / tr rho; +inf unless sigma dominates rho.
inline DivergenceValue relative_entropy(const HermitianOperator &rho,
                                        const HermitianOperator &sigma, const Options &opt = {}) {
    detail::require_same_dim(rho, sigma);
    detail::require_nonzero(rho, opt.zero);
    require_psd(sigma, opt.zero, "sigma");
    if (!dominates(sigma, rho, opt.zero)) {
        return DivergenceValue::plus_infinity(DivergenceReason::sigma_not_dominating);
    }
    const auto lr = matrix_log_on_support(rho, opt.log_base, opt.zero);
    const auto ls = matrix_log_on_support(sigma, opt.log_base, opt.zero);
    const double v = (rho.matrix() * (lr.matrix() - ls.matrix())).trace().real();
    return DivergenceValue::finite(v / rho.trace());
}

/// log lambda_max(sigma^{-1/2} rho sigma^{-1/2}), the smallest lambda with rho <= b^lambda sigma.
inline DivergenceValue max_relative_entropy(const HermitianOperator &rho,
                                            const HermitianOperator &sigma,
                                            const Options &opt = {}) {
    detail::require_same_dim(rho, sigma);
    detail::require_nonzero(rho, opt.zero);
    require_psd(sigma, opt.zero, "sigma");
    if (!dominates(sigma, rho, opt.zero)) {
        return DivergenceValue::plus_infinity(DivergenceReason::sigma_not_dominating);
    }
    const auto s = matrix_power_on_support(sigma, -0.5, opt.zero);
    const HermitianOperator m(Matrix(s.matrix() * rho.matrix() * s.matrix()), 1e-8);
    return DivergenceValue::finite(opt.log(m.max_eigenvalue()));
}

/// -log tr[P_rho sigma]. Standalone helper; not a limit of the sandwiched family.
inline DivergenceValue min_relative_entropy(const HermitianOperator &rho,
                                            const HermitianOperator &sigma,
                                            const Options &opt = {}) {
    detail::require_same_dim(rho, sigma);
    detail::require_nonzero(rho, opt.zero);
    require_psd(sigma, opt.zero, "sigma");
    const auto p = support(rho, opt.zero);
    const double t = (p.projector.matrix() * sigma.matrix()).trace().real();
    if (!(t > opt.zero.abs)) {
        return DivergenceValue::plus_infinity(DivergenceReason::orthogonal_states);
    }
    return DivergenceValue::finite(-opt.log(t));
}

/// F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1 (sum of singular values).
inline double fidelity(const HermitianOperator &rho, const HermitianOperator &sigma,
                       const ZeroThreshold &zt = {}) {
    detail::require_same_dim(rho, sigma);
    const auto a = matrix_power_on_support(rho, 0.5, zt);
    const auto b = matrix_power_on_support(sigma, 0.5, zt);
    Eigen::JacobiSVD<Matrix> svd(a.matrix() * b.matrix());
    return svd.singularValues().sum();
}

// ---------------------------------------------------------------------------
// Entropies

/// 1/(1-a) log( tr rho^a / tr rho ).
inline double renyi_entropy(const HermitianOperator &rho, RenyiOrder order,
                            const Options &opt = {}) {
    detail::require_nonzero(rho, opt.zero);
    const double a = order.value();
    const double q =
        trace_function_on_support(rho, [a](double x) { return std::pow(x, a); }, opt.zero);
    return opt.log(q / rho.trace()) / (1.0 - a);
}

/// -log ||rho||_inf.
inline double min_entropy(const HermitianOperator &rho, const Options &opt = {}) {
    detail::require_nonzero(rho, opt.zero);
    return -opt.log(rho.max_eigenvalue());
}

/// -tr[rho log rho] / tr rho.
inline double von_neumann_entropy(const HermitianOperator &rho, const Options &opt = {}) {
    detail::require_nonzero(rho, opt.zero);
    const double s = trace_function_on_support(
        rho, [&opt](double x) { return x * opt.log(x); }, opt.zero);
    return -s / rho.trace();
}

// ---------------------------------------------------------------------------
// Auxiliary two-state form

/**
 * a/(a-1) log tr( rho^{1/2} sigma^{(1-a)/a} rho^{1/2} tau^{(a-1)/a} ) for
 * normalized rho. Its supremum over tau >= 0, tr tau <= 1, is the sandwiched
 * divergence.
 */
inline DivergenceValue auxiliary_divergence(const HermitianOperator &rho,
                                            const HermitianOperator &sigma,
                                            const HermitianOperator &tau, RenyiOrder order,
                                            const Options &opt = {}) {
    detail::require_same_dim(rho, sigma);
    detail::require_same_dim(rho, tau);
    detail::require_nonzero(rho, opt.zero);
    require_psd(sigma, opt.zero, "sigma");
    require_psd(tau, opt.zero, "tau");
    if (std::abs(rho.trace() - 1.0) > 1e-10) {
        throw ValidationError("auxiliary divergence requires a normalized rho");
    }
    const double a = order.value();
    const auto sq = matrix_power_on_support(rho, 0.5, opt.zero);
    const auto sp = matrix_power_on_support(sigma, (1.0 - a) / a, opt.zero);
    const auto tp = matrix_power_on_support(tau, (a - 1.0) / a, opt.zero);
    const HermitianOperator with_sigma(Matrix(sq.matrix() * sp.matrix() * sq.matrix()), 1e-8);
    const HermitianOperator with_tau(Matrix(sq.matrix() * tp.matrix() * sq.matrix()), 1e-8);
    if (a > 1.0 && !dominates(sigma, with_tau, opt.zero)) {
        return DivergenceValue::plus_infinity(DivergenceReason::sigma_not_dominating);
    }
    if (a < 1.0 && !dominates(tau, with_sigma, opt.zero)) {
        return DivergenceValue::minus_infinity(DivergenceReason::tau_not_dominating);
    }
    const double t = (with_sigma.matrix() * tp.matrix()).trace().real();
    if (!(t > 0.0)) {
        return a > 1.0 ? DivergenceValue::minus_infinity(DivergenceReason::orthogonal_states)
                       : DivergenceValue::plus_infinity(DivergenceReason::orthogonal_states);
    }
    return DivergenceValue::finite(a / (a - 1.0) * opt.log(t));
}

/// The maximizing tau: (rho^{1/2} sigma^{(1-a)/a} rho^{1/2})^a, normalized.
inline HermitianOperator optimal_auxiliary_tau(const HermitianOperator &rho,
                                               const HermitianOperator &sigma, RenyiOrder order,
                                               const ZeroThreshold &zt = {}) {
    const double a = order.value();
    const auto sq = matrix_power_on_support(rho, 0.5, zt);
    const auto sp = matrix_power_on_support(sigma, (1.0 - a) / a, zt);
    const HermitianOperator x(Matrix(sq.matrix() * sp.matrix() * sq.matrix()), 1e-8);
    const auto t = matrix_power_on_support(x, a, zt);
    const double tr = t.trace();
    if (!(tr > 0.0)) {
        throw ComputationError("optimal tau undefined: rho and sigma are orthogonal");
    }
    return (1.0 / tr) * t;
}

// ---------------------------------------------------------------------------
// Alpha derivative and limits

namespace detail {

struct RestrictedPair {
    HermitianOperator x;
    HermitianOperator y;
};

inline RestrictedPair restrict_to_support_of_y(const HermitianOperator &x,
                                               const HermitianOperator &y,
                                               const ZeroThreshold &zt) {
    require_psd(x, zt, "X");
    require_psd(y, zt, "Y");
    require_same_dim(x, y);
    if (!dominates(y, x, zt)) {
        throw ValidationError("derivative requires supp X inside supp Y");
    }
    const auto s = support(y, zt);
    const Matrix v = s.basis;
    return {HermitianOperator(Matrix(v.adjoint() * x.matrix() * v), 1e-8),
            HermitianOperator(Matrix(v.adjoint() * y.matrix() * v), 1e-8)};
}

} // namespace detail

/// tr Z_a^a with Z_a = Y^{(1-a)/2a} X Y^{(1-a)/2a}, on supp Y.
inline double sandwiched_trace_power(const HermitianOperator &x, const HermitianOperator &y,
                                     double alpha, const ZeroThreshold &zt = {}) {
    const auto r = detail::restrict_to_support_of_y(x, y, zt);
    return detail::sandwiched_trace(r.x, r.y, alpha, zt);
}

/**
 * d/da tr Z_a^a = tr[Z_a^a ln Z_a] - (1/a) tr[Z_a^a ln Y] (natural logs),
 * evaluated on supp Y. At a = 1 this equals ln 2 * tr X * D(X||Y) with D in bits.
 */
inline double divergence_alpha_derivative(const HermitianOperator &x, const HermitianOperator &y,
                                          double alpha, const ZeroThreshold &zt = {}) {
    if (!(alpha > 0.0)) {
        throw ValidationError("derivative needs alpha > 0");
    }
    const auto r = detail::restrict_to_support_of_y(x, y, zt);
    const auto yp = matrix_power_on_support(r.y, (1.0 - alpha) / (2.0 * alpha), zt);
    const HermitianOperator z(Matrix(yp.matrix() * r.x.matrix() * yp.matrix()), 1e-8);
    const auto za = matrix_power_on_support(z, alpha, zt);
    const auto ln_z = matrix_log_on_support(z, std::numbers::e, zt);
    const auto ln_y = matrix_log_on_support(r.y, std::numbers::e, zt);
    const double first = (za.matrix() * ln_z.matrix()).trace().real();
    const double second = (za.matrix() * ln_y.matrix()).trace().real();
    return first - second / alpha;
}

/// Sandwiched divergence against sigma + xi * id.
inline double regularized_divergence(const HermitianOperator &rho, const HermitianOperator &sigma,
                                     RenyiOrder order, double xi, const Options &opt = {}) {
    if (!(xi > 0.0)) {
        throw ValidationError("regularization xi must be positive");
    }
    const auto shifted = sigma + xi * HermitianOperator::identity(sigma.dim());
    const auto v = sandwiched_divergence(rho, shifted, order, opt);
    return v.value;
}

struct RegularizationSequence {
    std::vector<double> xis;
    std::vector<double> values;
    DivergenceValue reference;
    /// |value at the smallest xi - reference| (inf when reference is infinite).
    double final_gap = kInf;
    bool nondecreasing_as_xi_shrinks = false;
};

inline RegularizationSequence limit_extrapolation(const HermitianOperator &rho,
                                                  const HermitianOperator &sigma,
                                                  RenyiOrder order, const Options &opt = {},
                                                  std::vector<double> xis = {1e-2, 1e-3, 1e-4,
                                                                             1e-5, 1e-6, 1e-7,
                                                                             1e-8}) {
    RegularizationSequence out;
    out.xis = std::move(xis);
    for (double xi : out.xis) {
        out.values.push_back(regularized_divergence(rho, sigma, order, xi, opt));
    }
    out.reference = sandwiched_divergence(rho, sigma, order, opt);
    if (out.reference.is_finite() && !out.values.empty()) {
        out.final_gap = std::abs(out.values.back() - out.reference.value);
    }
    out.nondecreasing_as_xi_shrinks = true;
    for (std::size_t i = 1; i < out.values.size(); ++i) {
        if (out.values[i] < out.values[i - 1]) {
            out.nondecreasing_as_xi_shrinks = false;
        }
    }
    return out;
}

struct LimitReport {
    double below_one = 0.0;     // sandwiched at 1 - 1e-3
    double above_one = 0.0;     // sandwiched at 1 + 1e-3
    DivergenceValue relative;   // alpha = 1
    double large_alpha = 0.0;   // sandwiched at 200
    DivergenceValue max_relative;
    double gap_one = 0.0;       // max |sandwiched(1 +- 1e-3) - D|
    double gap_infinity = 0.0;  // |sandwiched(200) - D_max|
};

inline LimitReport limit_checks(const HermitianOperator &rho, const HermitianOperator &sigma,
                                const Options &opt = {}) {
    LimitReport r;
    r.below_one = sandwiched_divergence(rho, sigma, RenyiOrder(1.0 - 1e-3), opt).value;
    r.above_one = sandwiched_divergence(rho, sigma, RenyiOrder(1.0 + 1e-3), opt).value;
    r.relative = relative_entropy(rho, sigma, opt);
    r.large_alpha = sandwiched_divergence(rho, sigma, RenyiOrder(200.0), opt).value;
    r.max_relative = max_relative_entropy(rho, sigma, opt);
    if (r.relative.is_finite()) {
        r.gap_one = std::max(std::abs(r.below_one - r.relative.value),
                             std::abs(r.above_one - r.relative.value));
    } else {
        r.gap_one = kInf;
    }
    r.gap_infinity = r.max_relative.is_finite() ? std::abs(r.large_alpha - r.max_relative.value) : kInf;
    return r;
}

} // namespace renyi
