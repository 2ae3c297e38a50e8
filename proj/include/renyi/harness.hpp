#pragma once

/**
 * @file harness.hpp
 * @brief Randomized property suites, data-processing counterexample mining
 * below alpha = 1/2, and the joint convexity probe.
 *
 * Every trial draws its inputs from Rng::for_trial(seed, trial), so a report
 * is reproducible from (suite, trials, max_dim, seed) alone. Violations are
 * signed slack in the inequality's direction: positive means broken.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "renyi/conditional.hpp"
#include "renyi/divergences.hpp"
#include "renyi/io.hpp"
#include "renyi/states.hpp"

namespace renyi {

using SandwichedEvaluator =
    std::function<DivergenceValue(const HermitianOperator &, const HermitianOperator &, RenyiOrder)>;

inline SandwichedEvaluator default_evaluator(Options opt = {}) {
    return [opt](const HermitianOperator &r, const HermitianOperator &s, RenyiOrder a) {
        return sandwiched_divergence(r, s, a, opt);
    };
}

struct SuiteConfig {
    int trials = 200;
    /// Largest single-system dimension drawn (at least 2).
    int max_dim = 3;
    std::uint64_t seed = 42;
    /// Overrides the suite's default alpha grid when nonempty.
    std::vector<double> alphas;
    SandwichedEvaluator evaluator = default_evaluator();
    ConditionalOptions conditional{};
};

struct PropertyReport {
    std::string property_id;
    int trials = 0;
    std::uint64_t seed = 0;
    double worst_violation = -kInf;
    double tolerance = 0.0;
    /// Existence probes pass when the worst violation exceeds the tolerance.
    bool expect_violation = false;
    Json params = Json::object();
    Json counterexamples = Json::array();

    [[nodiscard]] bool pass() const {
        if (std::isnan(worst_violation)) {
            return false;
        }
        return expect_violation ? worst_violation > tolerance : worst_violation <= tolerance;
    }
    [[nodiscard]] std::string verdict() const { return pass() ? "pass" : "fail"; }

    [[nodiscard]] Json to_json() const {
        Json p = params;
        p["tolerance"] = tolerance;
        if (expect_violation) {
            p["expect_violation"] = true;
        }
        Json worst = std::isfinite(worst_violation) ? Json(worst_violation)
                     : std::isnan(worst_violation) ? Json("nan")
                     : Json(worst_violation > 0 ? "inf" : "-inf");
        return {{"property_id", property_id},
                {"trials", trials},
                {"seed", seed},
                {"worst_violation", worst},
                {"verdict", verdict()},
                {"params", p},
                {"counterexamples", counterexamples}};
    }
};

namespace detail {

constexpr int kMaxWitnesses = 5;
/// Inequalities whose two sides each come from an optimizer run.
constexpr double kOptimizerSlack = 2e-4;

/**
 * Tracks named checks with their own tolerances. The report's
 * worst_violation is normalized to the first check's tolerance so one
 * threshold decides the verdict; raw per-check maxima go to params.
 */
class ViolationTracker {
  public:
    void observe(const std::string &check, double violation, double tolerance,
                 const std::function<Json()> &witness = {}) {
        if (std::isnan(violation)) {
            violation = kInf;
        }
        auto it = checks_.find(check);
        if (it == checks_.end()) {
            order_.push_back(check);
            it = checks_.emplace(check, Entry{-kInf, tolerance, 0, 0}).first;
        }
        Entry &e = it->second;
        e.worst = std::max(e.worst, violation);
        ++e.count;
        if (violation > tolerance) {
            ++e.failures;
            if (witness && static_cast<int>(witnesses_.size()) < kMaxWitnesses) {
                Json w = witness();
                w["check"] = check;
                w["violation"] = std::isfinite(violation) ? Json(violation) : Json("inf");
                witnesses_.push_back(std::move(w));
            }
        }
    }

    void finish(PropertyReport &report) const {
        report.tolerance = order_.empty() ? 0.0 : checks_.at(order_.front()).tolerance;
        double worst = -kInf;
        Json checks = Json::object();
        for (const auto &name : order_) {
            const Entry &e = checks_.at(name);
            const double scaled =
                e.worst == -kInf ? -kInf : e.worst / e.tolerance * report.tolerance;
            worst = std::max(worst, scaled);
            checks[name] = {{"worst_violation", std::isfinite(e.worst) ? Json(e.worst) : Json(e.worst > 0 ? "inf" : "-inf")},
                            {"tolerance", e.tolerance},
                            {"evaluations", e.count},
                            {"violations", e.failures}};
        }
        report.worst_violation = worst;
        report.params["checks"] = checks;
        report.counterexamples = witnesses_;
    }

  private:
    struct Entry {
        double worst;
        double tolerance;
        int count;
        int failures;
    };
    std::map<std::string, Entry> checks_;
    std::vector<std::string> order_;
    Json witnesses_ = Json::array();
};

/// lhs - rhs with inf - inf treated as satisfied.
inline double slack(double lhs, double rhs) {
    if (std::isinf(lhs) && std::isinf(rhs) && (lhs > 0) == (rhs > 0)) {
        return 0.0;
    }
    return lhs - rhs;
}

inline int draw_dim(Rng &rng, int max_dim) {
    return max_dim <= 2 ? 2 : rng.uniform_int(2, max_dim);
}

inline HermitianOperator draw_state(Rng &rng, int d, bool full_rank = false) {
    const int rank = full_rank ? d : rng.uniform_int(1, d);
    return random_density(d, rank, rng).op();
}

inline Json pair_witness(const HermitianOperator &rho, const HermitianOperator &sigma, double alpha) {
    return {{"alpha", alpha}, {"rho", matrix_to_json(rho.matrix())},
            {"sigma", matrix_to_json(sigma.matrix())}};
}

inline std::vector<double> grid_or(const SuiteConfig &cfg, std::vector<double> fallback) {
    return cfg.alphas.empty() ? std::move(fallback) : cfg.alphas;
}

inline PropertyReport start_report(const std::string &id, const SuiteConfig &cfg,
                                   const std::vector<double> &alphas) {
    PropertyReport r;
    r.property_id = id;
    r.trials = cfg.trials;
    r.seed = cfg.seed;
    r.params["max_dim"] = cfg.max_dim;
    r.params["alphas"] = alphas;
    return r;
}

inline double g_alpha(double d, double alpha) { return std::exp2((alpha - 1.0) * d); }

// ---------------------------------------------------------------------------
// Divergence suites

inline PropertyReport suite_axioms(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.5, 0.7, 1.3, 2.0, 3.0});
    auto report = start_report("axioms", cfg, alphas);
    ViolationTracker tr;
    const auto &D = cfg.evaluator;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const int d = draw_dim(rng, cfg.max_dim);
        const auto rho = draw_state(rng, d);
        const auto sigma = draw_state(rng, d, true);
        const Matrix u = random_unitary(d, rng);
        const auto rho_full = draw_state(rng, d, true);
        const auto p = draw_state(rng, d);
        const double u_lo = rng.uniform();
        const double u_hi = rng.uniform();
        const auto tau = draw_state(rng, 2);
        const auto omega = draw_state(rng, 2, true);
        const double w = 0.5 + 0.5 * rng.uniform();
        const double share = rng.uniform();
        const double v = 0.5 + 0.5 * rng.uniform();
        const double q = rng.uniform();
        for (double a : alphas) {
            const RenyiOrder order(a);
            const double base = D(rho, sigma, order).value;
            // unitary invariance
            const double rotated =
                D(rho.conjugate_by(u), sigma.conjugate_by(u), order).value;
            tr.observe("unitary_invariance", std::abs(slack(rotated, base)), 1e-9,
                       [&] { return pair_witness(rho, sigma, a); });
            // normalization on scalars
            if (t == 0) {
                const double scalar = D(HermitianOperator::diagonal({1.0}),
                                        HermitianOperator::diagonal({0.5}), order)
                                          .value;
                tr.observe("normalization", std::abs(scalar - 1.0), 1e-10);
            }
            // order: rho >= sigma_lo and rho <= sigma_hi
            const double shrink = u_lo * rho_full.min_eigenvalue() / p.max_eigenvalue();
            const auto sigma_lo = rho_full - shrink * p;
            const auto sigma_hi = rho_full + u_hi * p;
            tr.observe("order_above", -D(rho_full, sigma_lo, order).value, 1e-10,
                       [&] { return pair_witness(rho_full, sigma_lo, a); });
            tr.observe("order_below", D(rho_full, sigma_hi, order).value, 1e-10,
                       [&] { return pair_witness(rho_full, sigma_hi, a); });
            // additivity
            const double joint = D(tensor_product(rho, tau), tensor_product(sigma, omega), order).value;
            const double split = base + D(tau, omega, order).value;
            tr.observe("additivity", std::abs(slack(joint, split)), 1e-8);
            // direct-sum mean with g(t) = 2^{(a-1)t}, tr rho + tr tau <= 1, tr sigma + tr omega <= 1
            const auto r1 = (w * share) * rho_full;
            const auto r2 = (w * (1.0 - share)) * tau;
            const auto s1 = (v * q) * sigma;
            const auto s2 = (v * (1.0 - q)) * omega;
            if (r1.trace() > 1e-6 && r2.trace() > 1e-6) {
                const double lhs = D(direct_sum(r1, r2), direct_sum(s1, s2), order).value;
                const double t1 = r1.trace();
                const double t2 = r2.trace();
                const double mean = (t1 * g_alpha(D(r1, s1, order).value, a) +
                                     t2 * g_alpha(D(r2, s2, order).value, a)) /
                                    (t1 + t2);
                tr.observe("direct_sum_mean", std::abs(lhs - std::log2(mean) / (a - 1.0)), 1e-8);
            }
        }
    }
    tr.finish(report);
    return report;
}

inline PropertyReport suite_positivity(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.5, 0.7, 0.9, 1.3, 2.0, 3.0, 5.0});
    auto report = start_report("positivity", cfg, alphas);
    ViolationTracker tr;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const int d = draw_dim(rng, cfg.max_dim);
        const double w = 0.2 + 0.8 * rng.uniform();
        const auto rho = w * draw_state(rng, d);
        const auto sigma = (w * rng.uniform()) * draw_state(rng, d);
        for (double a : alphas) {
            tr.observe("trace_ordered_nonnegative", -cfg.evaluator(rho, sigma, RenyiOrder(a)).value,
                       1e-10, [&] { return pair_witness(rho, sigma, a); });
        }
    }
    tr.finish(report);
    return report;
}

inline PropertyReport suite_sigma_monotone(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.5, 0.7, 0.9, 1.3, 2.0, 3.0, 5.0});
    auto report = start_report("sigma-monotone", cfg, alphas);
    ViolationTracker tr;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const int d = draw_dim(rng, cfg.max_dim);
        const auto rho = draw_state(rng, d);
        const auto sigma = draw_state(rng, d);
        const auto bigger = sigma + rng.uniform() * draw_state(rng, d);
        for (double a : alphas) {
            const RenyiOrder order(a);
            tr.observe("larger_sigma_smaller_divergence",
                       slack(cfg.evaluator(rho, bigger, order).value,
                             cfg.evaluator(rho, sigma, order).value),
                       1e-9, [&] { return pair_witness(rho, sigma, a); });
        }
    }
    tr.finish(report);
    return report;
}

inline PropertyReport suite_pinching(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.3, 0.5, 0.7, 1.3, 2.0, 3.0});
    auto report = start_report("pinching", cfg, alphas);
    ViolationTracker tr;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const int d = draw_dim(rng, cfg.max_dim);
        const auto rho = draw_state(rng, d);
        HermitianOperator sigma;
        if (t % 2 == 0) {
            sigma = draw_state(rng, d, true);
        } else {
            // Degenerate spectrum: the top eigenvalue repeated.
            std::vector<double> spec(d);
            spec[0] = 0.2 + rng.uniform();
            for (int i = 1; i < d; ++i) {
                spec[i] = i == 1 ? spec[0] : 0.1 + rng.uniform();
            }
            sigma = HermitianOperator::diagonal(spec).conjugate_by(random_unitary(d, rng));
        }
        const auto pinched = pinching(sigma, rho);
        for (double a : alphas) {
            const RenyiOrder order(a);
            tr.observe("pinched_not_larger",
                       slack(cfg.evaluator(pinched, sigma, order).value,
                             cfg.evaluator(rho, sigma, order).value),
                       1e-9, [&] { return pair_witness(rho, sigma, a); });
        }
    }
    tr.finish(report);
    return report;
}

inline PropertyReport suite_alt_order(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.3, 0.5, 0.7, 1.3, 2.0, 3.0});
    auto report = start_report("alt-order", cfg, alphas);
    ViolationTracker tr;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const int d = draw_dim(rng, cfg.max_dim);
        const auto rho = draw_state(rng, d);
        const auto sigma = draw_state(rng, d);
        for (double a : alphas) {
            const RenyiOrder order(a);
            tr.observe("sandwiched_below_petz",
                       slack(cfg.evaluator(rho, sigma, order).value,
                             petz_divergence(rho, sigma, order).value),
                       1e-9, [&] { return pair_witness(rho, sigma, a); });
        }
    }
    tr.finish(report);
    return report;
}

inline PropertyReport suite_monotone_alpha(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.5, 0.6, 0.75, 0.9, 1.2, 1.5, 2.0, 3.0});
    auto report = start_report("monotone-alpha", cfg, alphas);
    ViolationTracker tr;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const int d = draw_dim(rng, cfg.max_dim);
        const auto rho = draw_state(rng, d);
        const auto sigma = draw_state(rng, d, true);
        const auto tau = draw_state(rng, d, true);
        double prev = -kInf;
        double prev_aux = -kInf;
        for (double a : alphas) {
            const RenyiOrder order(a);
            const double cur = cfg.evaluator(rho, sigma, order).value;
            tr.observe("sandwiched_nondecreasing", slack(prev, cur), 1e-9,
                       [&] { return pair_witness(rho, sigma, a); });
            prev = cur;
            const double aux = auxiliary_divergence(rho, sigma, tau, order).value;
            tr.observe("auxiliary_nondecreasing", slack(prev_aux, aux), 1e-9);
            prev_aux = aux;
        }
    }
    tr.finish(report);
    return report;
}

inline PropertyReport suite_dp_sandwiched(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.5, 0.7, 0.9, 1.3, 2.0, 3.0, 5.0});
    auto report = start_report("dp-sandwiched", cfg, alphas);
    ViolationTracker tr;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const int d_in = draw_dim(rng, cfg.max_dim);
        const int d_out = draw_dim(rng, cfg.max_dim);
        const int k_min = (d_in + d_out - 1) / d_out;
        const int kraus = rng.uniform_int(k_min, k_min + 2);
        const auto rho = draw_state(rng, d_in);
        const auto sigma = draw_state(rng, d_in);
        const auto channel = random_channel(d_in, d_out, kraus, rng);
        const auto rho_out = channel.apply(rho);
        const auto sigma_out = channel.apply(sigma);
        for (double a : alphas) {
            const RenyiOrder order(a);
            tr.observe("channel_does_not_increase",
                       slack(cfg.evaluator(rho_out, sigma_out, order).value,
                             cfg.evaluator(rho, sigma, order).value),
                       1e-8, [&] {
                           Json w = pair_witness(rho, sigma, a);
                           w["channel"] = channel_to_json(channel);
                           return w;
                       });
        }
    }
    tr.finish(report);
    return report;
}

inline PropertyReport convexity_suite(const SuiteConfig &cfg, const std::string &id,
                                      std::vector<double> alphas, bool convex) {
    alphas = grid_or(cfg, std::move(alphas));
    auto report = start_report(id, cfg, alphas);
    ViolationTracker tr;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const int d = draw_dim(rng, cfg.max_dim);
        const auto r1 = draw_state(rng, d);
        const auto r2 = draw_state(rng, d);
        const auto s1 = draw_state(rng, d, true);
        const auto s2 = draw_state(rng, d, true);
        for (double a : alphas) {
            const RenyiOrder order(a);
            const double g1 = g_alpha(cfg.evaluator(r1, s1, order).value, a);
            const double g2 = g_alpha(cfg.evaluator(r2, s2, order).value, a);
            for (double l : {0.25, 0.5, 0.75}) {
                const double gm =
                    g_alpha(cfg.evaluator(l * r1 + (1 - l) * r2, l * s1 + (1 - l) * s2, order).value, a);
                const double mean = l * g1 + (1 - l) * g2;
                tr.observe(convex ? "jointly_convex" : "jointly_concave",
                           convex ? gm - mean : mean - gm, 1e-9, [&] {
                               return Json{{"alpha", a},
                                           {"lambda", l},
                                           {"rho1", matrix_to_json(r1.matrix())},
                                           {"rho2", matrix_to_json(r2.matrix())},
                                           {"sigma1", matrix_to_json(s1.matrix())},
                                           {"sigma2", matrix_to_json(s2.matrix())}};
                           });
            }
        }
    }
    tr.finish(report);
    return report;
}

inline PropertyReport suite_limits(const SuiteConfig &cfg) {
    auto report = start_report("limits", cfg, {1.0 - 1e-3, 1.0 + 1e-3, 200.0});
    ViolationTracker tr;
    const int max_dim = std::min(cfg.max_dim, 4);
    report.params["max_dim"] = max_dim;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const int d = draw_dim(rng, max_dim);
        const auto rho = draw_state(rng, d, true);
        const auto sigma = draw_state(rng, d, true);
        const double rel = relative_entropy(rho, sigma).value;
        const double lo = cfg.evaluator(rho, sigma, RenyiOrder(1.0 - 1e-3)).value;
        const double hi = cfg.evaluator(rho, sigma, RenyiOrder(1.0 + 1e-3)).value;
        const double big = cfg.evaluator(rho, sigma, RenyiOrder(200.0)).value;
        const double dmax = max_relative_entropy(rho, sigma).value;
        const double near_one = std::max(std::abs(lo - rel), std::abs(hi - rel)) / (1.0 + std::abs(rel));
        tr.observe("alpha_to_one", near_one, 5e-3, [&] { return pair_witness(rho, sigma, 1.0); });
        tr.observe("alpha_to_infinity", std::abs(big - dmax), 1e-2,
                   [&] { return pair_witness(rho, sigma, 200.0); });
    }
    tr.finish(report);
    return report;
}

inline PropertyReport suite_derivative(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.7, 1.0, 1.7});
    auto report = start_report("derivative", cfg, alphas);
    ViolationTracker tr;
    constexpr double h = 1e-5;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const int d = draw_dim(rng, cfg.max_dim);
        const auto x = (0.5 + 0.5 * rng.uniform()) * draw_state(rng, d);
        const auto y = draw_state(rng, d, true);
        for (double a : alphas) {
            const double analytic = divergence_alpha_derivative(x, y, a);
            const double fd =
                (sandwiched_trace_power(x, y, a + h) - sandwiched_trace_power(x, y, a - h)) / (2 * h);
            tr.observe("finite_difference", std::abs(analytic - fd) / std::max(std::abs(fd), 1e-3),
                       1e-4, [&] { return pair_witness(x, y, a); });
            if (std::abs(a - 1.0) < 1e-12) {
                const double kl = std::numbers::ln2 * x.trace() * relative_entropy(x, y).value;
                tr.observe("relative_entropy_at_one",
                           std::abs(analytic - kl) / std::max(std::abs(kl), 1e-3), 1e-6);
            }
        }
    }
    tr.finish(report);
    return report;
}

// ---------------------------------------------------------------------------
// Conditional-entropy suites

inline MultipartiteState random_mixed(const std::vector<int> &dims, Rng &rng, int rank = 0) {
    int d = 1;
    for (int k : dims) {
        d *= k;
    }
    if (rank <= 0) {
        rank = rng.uniform_int(1, d);
    }
    return {random_density(d, rank, rng), dims};
}

inline PropertyReport suite_dp_conditional(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.6, 0.8, 1.3, 2.0, 3.0, 5.0});
    auto report = start_report("dp-conditional", cfg, alphas);
    ViolationTracker tr;
    const double tol = kOptimizerSlack;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const double a = alphas[t % alphas.size()];
        if (t % 2 == 0) {
            const auto rho = random_mixed({2, 2}, rng);
            const auto ch = random_channel(2, 2, rng.uniform_int(1, 3), rng);
            const auto out = apply_channel_to_subsystem(rho, ch, 1);
            const double before = conditional_renyi(rho, a, cfg.conditional).value;
            const double after = conditional_renyi(out, a, cfg.conditional).value;
            tr.observe("channel_on_b", before - after, tol, [&] {
                return Json{{"alpha", a}, {"rho", state_to_json(rho)}, {"channel", channel_to_json(ch)}};
            });
        } else {
            const auto rho = random_mixed({2, 2, 2}, rng);
            const double ab = conditional_renyi(rho.marginal({0, 1}), a, cfg.conditional).value;
            const double abc = conditional_renyi(rho.grouped({{0}, {1, 2}}), a, cfg.conditional).value;
            tr.observe("trace_out_c", abc - ab, tol, [&] {
                return Json{{"alpha", a}, {"rho", state_to_json(rho)}};
            });
        }
    }
    report.params["optimizer_tolerance"] = cfg.conditional.tolerance;
    tr.finish(report);
    return report;
}

inline PropertyReport suite_duality(const SuiteConfig &cfg) {
    const std::vector<double> alphas = grid_or(cfg, {2.0, 1.5, 0.75});
    auto report = start_report("duality", cfg, alphas);
    ViolationTracker tr;
    const double tol = kOptimizerSlack;
    ConditionalOptions grid = cfg.conditional;
    grid.method = OptimizerMethod::grid_oracle;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const double a = alphas[t % alphas.size()];
        const auto phi = random_pure({2, 2, 2}, rng);
        const auto check = duality_check(phi, a, cfg.conditional);
        tr.observe("gap", std::abs(check.gap), tol, [&] {
            return Json{{"alpha", a}, {"state", state_to_json(phi)}};
        });
        const double oracle_ab = conditional_renyi(phi.marginal({0, 1}), a, grid).value;
        const double oracle_ac = conditional_renyi(phi.marginal({0, 2}), check.beta, grid).value;
        tr.observe("oracle_ab", std::abs(check.h_ab - oracle_ab), 1e-4);
        tr.observe("oracle_ac", std::abs(-check.minus_h_ac - oracle_ac), 1e-4);
    }
    report.params["optimizer_tolerance"] = cfg.conditional.tolerance;
    tr.finish(report);
    return report;
}

inline PropertyReport suite_chain_rule(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.6, 0.8, 1.3, 2.0, 3.0});
    auto report = start_report("chain-rule", cfg, alphas);
    ViolationTracker tr;
    const double tol = kOptimizerSlack;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const double a = alphas[t % alphas.size()];
        MultipartiteState rho = random_mixed({2, 2, 2}, rng);
        if (t % 3 == 0) {
            // Pure C: rank(rho_C) = 1 and the bound must hold with equality.
            const auto ab = random_density(4, rng.uniform_int(1, 4), rng);
            const auto c = random_density(2, 1, rng);
            rho = MultipartiteState(DensityOperator(tensor_product(ab.op(), c.op())), {2, 2, 2});
        }
        const auto check = chain_rule_check(rho, a, cfg.conditional);
        tr.observe("lower_bound", -check.slack, tol, [&] {
            return Json{{"alpha", a}, {"rho", state_to_json(rho)}};
        });
    }
    report.params["optimizer_tolerance"] = cfg.conditional.tolerance;
    tr.finish(report);
    return report;
}

inline PropertyReport suite_classical_conditioning(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.6, 0.8, 1.5, 2.0, 3.0});
    auto report = start_report("classical-conditioning", cfg, alphas);
    ViolationTracker tr;
    const double tol = 2e-5;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const double a = alphas[t % alphas.size()];
        const double p = 0.05 + 0.9 * rng.uniform();
        const std::vector<double> w{p, 1.0 - p};
        const std::vector<MultipartiteState> blocks{random_mixed({2, 2}, rng),
                                                    random_mixed({2, 2}, rng)};
        const double closed = classical_conditional(w, blocks, a, cfg.conditional).value;
        const auto assembled = classical_quantum_assemble(w, blocks);
        const double direct =
            conditional_renyi(assembled.grouped({{1}, {2, 0}}), a, cfg.conditional).value;
        tr.observe("closed_form", std::abs(closed - direct), tol, [&] {
            return Json{{"alpha", a}, {"weights", w}, {"assembled", state_to_json(assembled)}};
        });
        // Arimoto: classical A, empty B.
        const int nx = rng.uniform_int(2, 4);
        std::vector<std::vector<double>> cond(2, std::vector<double>(nx));
        std::vector<MultipartiteState> diag_blocks;
        for (auto &row : cond) {
            double s = 0.0;
            for (auto &x : row) {
                x = rng.uniform() + 1e-3;
                s += x;
            }
            for (auto &x : row) {
                x /= s;
            }
            diag_blocks.emplace_back(DensityOperator(HermitianOperator::diagonal(row)),
                                     std::vector<int>{nx, 1});
        }
        const double via_blocks = classical_conditional(w, diag_blocks, a, cfg.conditional).value;
        tr.observe("arimoto", std::abs(via_blocks - arimoto_conditional_entropy(w, cond, a)), 1e-9);
    }
    report.params["optimizer_tolerance"] = cfg.conditional.tolerance;
    tr.finish(report);
    return report;
}

inline POVM draw_qubit_measurement(Rng &rng) {
    if (rng.uniform() < 0.5) {
        return POVM::from_basis(random_unitary(2, rng));
    }
    return random_povm(2, rng.uniform_int(2, 3), rng);
}

inline PropertyReport suite_uncertainty(const SuiteConfig &cfg) {
    const auto alphas = grid_or(cfg, {0.75, 1.5, 2.0});
    auto report = start_report("uncertainty", cfg, alphas);
    ViolationTracker tr;
    const double tol = kOptimizerSlack;
    double worst_printed = -kInf;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
        const double a = alphas[t % alphas.size()];
        const auto rho = t % 2 == 0 ? random_pure({2, 2, 2}, rng) : random_mixed({2, 2, 2}, rng);
        const auto m = draw_qubit_measurement(rng);
        const auto n = draw_qubit_measurement(rng);
        const auto check = uncertainty_check(rho, m, n, a, cfg.conditional);
        tr.observe("squared_overlap_margin", -check.margin_squared, tol, [&] {
            return Json{{"alpha", a},
                        {"rho", state_to_json(rho)},
                        {"M", povm_to_json(m)},
                        {"N", povm_to_json(n)}};
        });
        worst_printed = std::max(worst_printed, -check.margin_printed);
        if (t == 0) {
            const double s = 1.0 / std::numbers::sqrt2;
            Matrix hadamard(2, 2);
            hadamard << s, s, s, -s;
            const auto zx = uncertainty_check(rho, POVM::from_basis(Matrix::Identity(2, 2)),
                                              POVM::from_basis(hadamard), a, cfg.conditional);
            tr.observe("zx_bound_is_one", std::abs(zx.bound_squared - 1.0), 1e-12);
        }
    }
    report.params["optimizer_tolerance"] = cfg.conditional.tolerance;
    report.params["worst_violation_printed_convention"] = worst_printed;
    tr.finish(report);
    return report;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Registry

struct SuiteInfo {
    std::string id;
    std::string description;
    std::function<PropertyReport(const SuiteConfig &)> run;
};

inline const std::vector<SuiteInfo> &suite_registry() {
    static const std::vector<SuiteInfo> registry{
        {"axioms", "unitary invariance, normalization, order, additivity, direct-sum mean",
         detail::suite_axioms},
        {"positivity", "tr rho >= tr sigma implies D >= 0", detail::suite_positivity},
        {"sigma-monotone", "D(rho||sigma + P) <= D(rho||sigma)", detail::suite_sigma_monotone},
        {"pinching", "D(rho||sigma) >= D(pinched rho||sigma)", detail::suite_pinching},
        {"alt-order", "sandwiched <= Petz", detail::suite_alt_order},
        {"monotone-alpha", "D and the auxiliary quantity nondecreasing in alpha",
         detail::suite_monotone_alpha},
        {"dp-sandwiched", "data processing under random channels", detail::suite_dp_sandwiched},
        {"dp-conditional", "conditional entropy does not decrease under channels on B",
         detail::suite_dp_conditional},
        {"joint-convexity", "2^{(a-1)D} jointly convex for a > 1",
         [](const SuiteConfig &c) {
             return detail::convexity_suite(c, "joint-convexity", {1.5, 2.0, 3.0}, true);
         }},
        {"joint-concavity", "2^{(a-1)D} jointly concave for 1/2 <= a < 1",
         [](const SuiteConfig &c) {
             return detail::convexity_suite(c, "joint-concavity", {0.5, 0.75}, false);
         }},
        {"limits", "alpha -> 1 and alpha -> infinity", detail::suite_limits},
        {"derivative", "alpha-derivative against finite differences", detail::suite_derivative},
        {"duality", "H_a(A|B) + H_b(A|C) = 0 on pure states", detail::suite_duality},
        {"chain-rule", "H(A|BC) >= H(AC|B) - log rank(rho_C)", detail::suite_chain_rule},
        {"classical-conditioning", "closed form for classical Y and Arimoto",
         detail::suite_classical_conditioning},
        {"uncertainty", "H_a(X|B) + H_b(Y|C) >= log 1/c", detail::suite_uncertainty},
    };
    return registry;
}

inline std::vector<std::string> suite_ids() {
    std::vector<std::string> ids;
    for (const auto &s : suite_registry()) {
        ids.push_back(s.id);
    }
    return ids;
}

inline PropertyReport run_suite(const std::string &id, const SuiteConfig &cfg = {}) {
    if (cfg.trials <= 0) {
        throw ValidationError("trials must be positive");
    }
    if (cfg.max_dim < 2) {
        throw ValidationError("max_dim must be at least 2");
    }
    for (const auto &s : suite_registry()) {
        if (s.id == id) {
            return s.run(cfg);
        }
    }
    throw ValidationError("unknown suite '" + id + "'");
}

// ---------------------------------------------------------------------------
// Counterexample mining below alpha = 1/2

struct CounterexampleRecord {
    double alpha = 0.0;
    HermitianOperator rho;
    HermitianOperator sigma;
    QuantumChannel channel = QuantumChannel::identity(1);
    /// D(E(rho)||E(sigma)) - D(rho||sigma).
    double violation = 0.0;

    [[nodiscard]] Json to_json() const {
        return {{"alpha", alpha},
                {"rho", matrix_to_json(rho.matrix())},
                {"sigma", matrix_to_json(sigma.matrix())},
                {"channel", channel_to_json(channel)},
                {"violation", violation}};
    }

    static CounterexampleRecord from_json(const Json &j) {
        CounterexampleRecord r;
        r.alpha = j.at("alpha").get<double>();
        r.rho = HermitianOperator(matrix_from_json(j.at("rho")));
        r.sigma = HermitianOperator(matrix_from_json(j.at("sigma")));
        r.channel = channel_from_json(j.at("channel"));
        r.violation = j.at("violation").get<double>();
        return r;
    }
};

/// Recomputes a record's violation from its inputs.
inline double data_processing_violation(const HermitianOperator &rho, const HermitianOperator &sigma,
                                        const QuantumChannel &channel, double alpha) {
    const RenyiOrder order(alpha);
    const auto before = sandwiched_divergence(rho, sigma, order);
    if (!before.is_finite()) {
        return -kInf;
    }
    const auto after = sandwiched_divergence(channel.apply(rho), channel.apply(sigma), order);
    return after.value - before.value;
}

inline double reverify(const CounterexampleRecord &r) {
    return data_processing_violation(r.rho, r.sigma, r.channel, r.alpha);
}

struct MiningResult {
    std::vector<CounterexampleRecord> records;
    int trials = 0;
    int refined_candidates = 0;
    double best_violation = -kInf;

    [[nodiscard]] Json to_json(std::uint64_t seed) const {
        Json recs = Json::array();
        for (const auto &r : records) {
            recs.push_back(r.to_json());
        }
        return {{"property_id", "dp-counterexamples"},
                {"trials", trials},
                {"seed", seed},
                {"worst_violation", std::isfinite(best_violation) ? Json(best_violation) : Json(nullptr)},
                {"verdict", records.empty() ? "none found in budget" : "found"},
                {"params", {{"refined_candidates", refined_candidates}, {"threshold", 1e-6}}},
                {"counterexamples", recs}};
    }
};

namespace detail {

struct MiningCandidate {
    Matrix rho_factor;
    Matrix sigma_factor;
    Matrix isometry;
    int d_out = 0;
    double violation = -kInf;
};

inline HermitianOperator from_factor(const Matrix &f) {
    Matrix m = f * f.adjoint();
    m /= m.trace().real();
    return HermitianOperator(m, 1e-8);
}

inline QuantumChannel from_isometry(const Matrix &v, int d_out) {
    std::vector<Matrix> ks;
    for (Eigen::Index j = 0; j < v.rows() / d_out; ++j) {
        ks.push_back(v.middleRows(j * d_out, d_out));
    }
    return QuantumChannel(std::move(ks), 1e-8);
}

/// Nearest isometry (polar factor) of v.
inline Matrix polar_isometry(const Matrix &v) {
    Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

inline double candidate_violation(const MiningCandidate &c, double alpha) {
    return data_processing_violation(from_factor(c.rho_factor), from_factor(c.sigma_factor),
                                     from_isometry(c.isometry, c.d_out), alpha);
}

} // namespace detail

/**
 * Searches for data-processing violations of the sandwiched divergence at
 * alpha in (0, 1/2): random qubit/qutrit pairs under random channels, then a
 * shrinking Gaussian perturbation around the ten largest slacks. Every pair
 * with violation > 1e-6 is returned.
 */
inline MiningResult mine_counterexamples(double alpha, int max_trials, std::uint64_t seed,
                                         std::vector<int> dims = {2}) {
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw ValidationError("counterexample mining needs alpha in (0, 1/2)");
    }
    if (max_trials <= 0 || dims.empty()) {
        throw ValidationError("mining needs a positive trial budget and at least one dimension");
    }
    constexpr double kThreshold = 1e-6;
    constexpr std::size_t kRefine = 10;
    MiningResult out;
    out.trials = max_trials;
    std::vector<detail::MiningCandidate> top;
    auto keep = [&](detail::MiningCandidate c) {
        if (c.violation > kThreshold) {
            out.records.push_back({alpha, detail::from_factor(c.rho_factor),
                                   detail::from_factor(c.sigma_factor),
                                   detail::from_isometry(c.isometry, c.d_out), c.violation});
            out.best_violation = std::max(out.best_violation, c.violation);
        }
    };
    for (int t = 0; t < max_trials; ++t) {
        Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(t));
        const int d = dims[static_cast<std::size_t>(t) % dims.size()];
        detail::MiningCandidate c;
        c.d_out = d;
        c.rho_factor = ginibre(d, rng.uniform_int(1, d), rng);
        c.sigma_factor = ginibre(d, rng.uniform_int(1, d), rng);
        c.isometry = random_isometry(d * rng.uniform_int(1, 3), d, rng);
        c.violation = detail::candidate_violation(c, alpha);
        if (!std::isfinite(c.violation)) {
            continue;
        }
        keep(c);
        if (top.size() < kRefine || c.violation > top.back().violation) {
            top.push_back(std::move(c));
            std::sort(top.begin(), top.end(),
                      [](const auto &x, const auto &y) { return x.violation > y.violation; });
            if (top.size() > kRefine) {
                top.pop_back();
            }
        }
    }
    for (std::size_t i = 0; i < top.size(); ++i) {
        Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(max_trials) + i);
        auto best = top[i];
        double scale = 0.1;
        for (int step = 0; step < 200 && scale > 1e-6; ++step) {
            auto trial = best;
            trial.rho_factor += scale * ginibre(static_cast<int>(best.rho_factor.rows()),
                                                static_cast<int>(best.rho_factor.cols()), rng);
            trial.sigma_factor += scale * ginibre(static_cast<int>(best.sigma_factor.rows()),
                                                  static_cast<int>(best.sigma_factor.cols()), rng);
            trial.isometry = detail::polar_isometry(
                best.isometry + scale * ginibre(static_cast<int>(best.isometry.rows()),
                                                static_cast<int>(best.isometry.cols()), rng));
            trial.violation = detail::candidate_violation(trial, alpha);
            if (std::isfinite(trial.violation) && trial.violation > best.violation) {
                best = std::move(trial);
            } else {
                scale *= 0.9;
            }
        }
        if (best.violation > top[i].violation) {
            keep(best);
        }
        ++out.refined_candidates;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Joint convexity probe

enum class DivergenceVariant { sandwiched, petz };

namespace detail {

inline double variant_g(DivergenceVariant v, const HermitianOperator &r, const HermitianOperator &s,
                        double alpha) {
    const RenyiOrder order(alpha);
    const auto d = v == DivergenceVariant::sandwiched ? sandwiched_divergence(r, s, order)
                                                      : petz_divergence(r, s, order);
    return g_alpha(d.value, alpha);
}

struct MixtureTest {
    HermitianOperator r1, r2, s1, s2;
    double lambda = 0.5;
};

/// g(mix) - mean: positive breaks convexity, negative breaks concavity.
inline double mixture_gap(DivergenceVariant v, const MixtureTest &m, double alpha) {
    const double l = m.lambda;
    const double gm = variant_g(v, l * m.r1 + (1 - l) * m.r2, l * m.s1 + (1 - l) * m.s2, alpha);
    return gm - (l * variant_g(v, m.r1, m.s1, alpha) + (1 - l) * variant_g(v, m.r2, m.s2, alpha));
}

/**
 * Curvature-guided pairs around a full-rank centre (rho, sigma): the extreme
 * eigenvectors of a finite-difference Hessian of g give directions (X, Y);
 * the pairs (rho +- eX, sigma +- eY) mixed at 1/2 probe each direction.
 */
inline std::vector<MixtureTest> curvature_pairs(DivergenceVariant v, const HermitianOperator &rho,
                                                const HermitianOperator &sigma, double alpha) {
    const int d = rho.dim();
    const auto basis = hermitian_basis(d);
    const int n = static_cast<int>(basis.size());
    std::vector<Matrix> rho_dirs;
    for (const auto &b : basis) {
        rho_dirs.push_back(b - (b.trace() / static_cast<double>(d)) * Matrix::Identity(d, d));
    }
    const double lam = std::min(rho.min_eigenvalue(), sigma.min_eigenvalue());
    const double h = 1e-3 * lam;
    const int p = 2 * n;
    auto direction = [&](const Eigen::VectorXd &c, Matrix &x, Matrix &y) {
        x = Matrix::Zero(d, d);
        y = Matrix::Zero(d, d);
        for (int k = 0; k < n; ++k) {
            x += c(k) * rho_dirs[k];
            y += c(n + k) * basis[k];
        }
    };
    auto g_at = [&](const Matrix &x, const Matrix &y, double s) {
        return variant_g(v, HermitianOperator(Matrix(rho.matrix() + s * x), 1e-8),
                         HermitianOperator(Matrix(sigma.matrix() + s * y), 1e-8), alpha);
    };
    Eigen::MatrixXd hess(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            Eigen::VectorXd ei = Eigen::VectorXd::Zero(p);
            Eigen::VectorXd ej = Eigen::VectorXd::Zero(p);
            ei(i) = 1.0;
            ej(j) = 1.0;
            Matrix xp, yp, xm, ym;
            direction(ei + ej, xp, yp);
            direction(ei - ej, xm, ym);
            hess(i, j) = hess(j, i) =
                (g_at(xp, yp, h) - g_at(xm, ym, h) - g_at(xm, ym, -h) + g_at(xp, yp, -h)) / (4 * h * h);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
    std::vector<MixtureTest> out;
    for (int col : {0, p - 1}) {
        Matrix x, y;
        direction(es.eigenvectors().col(col), x, y);
        const double size = std::max(x.norm(), y.norm());
        for (double frac : {0.5, 0.2, 0.05}) {
            const double e = frac * lam / size;
            MixtureTest m{HermitianOperator(Matrix(rho.matrix() + e * x), 1e-8),
                          HermitianOperator(Matrix(rho.matrix() - e * x), 1e-8),
                          HermitianOperator(Matrix(sigma.matrix() + e * y), 1e-8),
                          HermitianOperator(Matrix(sigma.matrix() - e * y), 1e-8), 0.5};
            if (m.r1.min_eigenvalue() > 0 && m.r2.min_eigenvalue() > 0 &&
                m.s1.min_eigenvalue() > 0 && m.s2.min_eigenvalue() > 0) {
                out.push_back(std::move(m));
            }
        }
    }
    return out;
}

inline Json mixture_witness(const MixtureTest &m, double gap) {
    return {{"lambda", m.lambda},
            {"rho1", matrix_to_json(m.r1.matrix())},
            {"rho2", matrix_to_json(m.r2.matrix())},
            {"sigma1", matrix_to_json(m.s1.matrix())},
            {"sigma2", matrix_to_json(m.s2.matrix())},
            {"gap", gap}};
}

} // namespace detail

/**
 * Searches both directions of joint convexity of g = 2^{(a-1)D} with random
 * qubit/qutrit mixtures and curvature-guided qubit pairs. Sandwiched a > 1
 * passes when no convexity violation exceeds 1e-9, sandwiched a < 1 when no
 * concavity violation does; Petz passes when violations of both directions
 * are found.
 */
inline PropertyReport convexity_probe(DivergenceVariant variant, double alpha, int trials,
                                      std::uint64_t seed) {
    const RenyiOrder order(alpha);
    if (trials <= 0) {
        throw ValidationError("trials must be positive");
    }
    constexpr double kTol = 1e-9;
    PropertyReport report;
    const bool petz = variant == DivergenceVariant::petz;
    report.property_id = petz ? "convexity-probe-petz" : "convexity-probe-sandwiched";
    report.trials = trials;
    report.seed = seed;
    report.tolerance = kTol;
    report.params["alpha"] = alpha;
    report.params["order"] = order.is_core() ? "core" : "extended";
    double worst_convex = -kInf;
    double worst_concave = -kInf;
    int convex_breaks = 0;
    int concave_breaks = 0;
    Json witnesses_convex = Json::array();
    Json witnesses_concave = Json::array();
    auto record = [&](const detail::MixtureTest &m) {
        const double gap = detail::mixture_gap(variant, m, alpha);
        worst_convex = std::max(worst_convex, gap);
        worst_concave = std::max(worst_concave, -gap);
        if (gap > kTol) {
            ++convex_breaks;
            if (witnesses_convex.size() < 3) {
                witnesses_convex.push_back(detail::mixture_witness(m, gap));
            }
        }
        if (-gap > kTol) {
            ++concave_breaks;
            if (witnesses_concave.size() < 3) {
                witnesses_concave.push_back(detail::mixture_witness(m, gap));
            }
        }
    };
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(t));
        const int d = 2 + t % 2;
        detail::MixtureTest m{detail::draw_state(rng, d), detail::draw_state(rng, d),
                              detail::draw_state(rng, d, true), detail::draw_state(rng, d, true)};
        for (double l : {0.25, 0.5, 0.75}) {
            m.lambda = l;
            record(m);
        }
        const auto centre_rho = detail::draw_state(rng, 2, true);
        const auto centre_sigma = detail::draw_state(rng, 2, true);
        for (const auto &pair : detail::curvature_pairs(variant, centre_rho, centre_sigma, alpha)) {
            record(pair);
        }
    }
    report.params["convexity_violations"] = convex_breaks;
    report.params["concavity_violations"] = concave_breaks;
    report.params["worst_convexity_violation"] = worst_convex;
    report.params["worst_concavity_violation"] = worst_concave;
    Json ce = Json::array();
    for (auto &w : witnesses_convex) {
        w["direction"] = "convexity";
        ce.push_back(w);
    }
    for (auto &w : witnesses_concave) {
        w["direction"] = "concavity";
        ce.push_back(w);
    }
    report.counterexamples = ce;
    if (petz) {
        report.expect_violation = true;
        report.worst_violation = std::min(worst_convex, worst_concave);
    } else {
        report.worst_violation = alpha > 1.0 ? worst_convex : worst_concave;
    }
    return report;
}

} // namespace renyi
