// Command-line front end: loads states, channels and POVMs from JSON and
// prints divergences, entropies and property reports.
//
// Exit codes: 0 success, 1 validation error (bad flags, unreadable or invalid
// input), 2 computation error or a failing property report.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "renyi/renyi.hpp"

namespace {

using namespace renyi;

struct Globals {
    std::string log_base = "2";
    int precision = 6;
    double eps_abs = 1e-12;
    double eps_rel = 1e-10;

    [[nodiscard]] Options options() const {
        Options o;
        o.zero = ZeroThreshold{eps_abs, eps_rel};
        o.log_base = log_base == "e" ? std::numbers::e : 2.0;
        return o;
    }
};

class Printer {
  public:
    explicit Printer(int precision) : precision_(precision) {}

    [[nodiscard]] std::string number(double v) const {
        if (std::isinf(v)) {
            return v > 0 ? "inf" : "-inf";
        }
        std::ostringstream os;
        os.setf(std::ios::fixed);
        os.precision(precision_);
        // Avoid printing "-0.000000".
        const double shown = std::abs(v) < 0.5 * std::pow(10.0, -precision_) ? 0.0 : v;
        os << shown;
        return os.str();
    }

    [[nodiscard]] std::string value(const DivergenceValue &v) const {
        if (v.is_finite()) {
            return number(v.value);
        }
        return number(v.value) + " (" + to_string(v.reason) + ")";
    }

  private:
    int precision_;
};

std::vector<int> parse_dims(const std::string &text) {
    std::vector<int> dims;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int d = std::stoi(item, &used);
            if (used != item.size() || d <= 0) {
                throw std::invalid_argument(item);
            }
            dims.push_back(d);
        } catch (const std::exception &) {
            throw ValidationError("--dims expects positive integers like 2,2 (got '" + text + "')");
        }
    }
    if (dims.empty()) {
        throw ValidationError("--dims must not be empty");
    }
    return dims;
}

MultipartiteState load_state(const std::string &path, const std::string &dims_flag) {
    const Json j = read_json_file(path);
    MultipartiteState s = state_from_json(j);
    if (!dims_flag.empty()) {
        return {s.density(), parse_dims(dims_flag), s.classical()};
    }
    return s;
}

HermitianOperator load_operator(const std::string &path) {
    return HermitianOperator(matrix_from_json(read_json_file(path)));
}

OptimizerMethod parse_method(const std::string &m) {
    if (m == "mirror") {
        return OptimizerMethod::mirror_descent;
    }
    if (m == "fixed-point") {
        return OptimizerMethod::fixed_point;
    }
    return OptimizerMethod::grid_oracle;
}

void emit(const Json &j, const std::string &output) {
    if (output.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json_file(output, j);
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Sandwiched Renyi divergences, conditional entropies and property checks"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--log-base", g.log_base, "Logarithm base: 2 (bits) or e (nats)")
        ->check(CLI::IsMember({"2", "e"}));
    app.add_option("--precision", g.precision, "Digits after the decimal point")
        ->check(CLI::Range(0, 17));
    app.add_option("--eps-abs", g.eps_abs, "Absolute eigenvalue cutoff for supports")
        ->check(CLI::PositiveNumber);
    app.add_option("--eps-rel", g.eps_rel, "Relative eigenvalue cutoff for supports")
        ->check(CLI::NonNegativeNumber);

    // divergence
    auto *div = app.add_subcommand("divergence", "D(rho||sigma) for one variant");
    std::string variant = "sandwiched";
    std::string rho_path, sigma_path;
    std::optional<double> alpha;
    div->add_option("--variant", variant)
        ->check(CLI::IsMember({"sandwiched", "petz", "relative", "max", "min", "fidelity"}));
    div->add_option("--alpha", alpha, "Order (sandwiched and petz)");
    div->add_option("--rho", rho_path)->required();
    div->add_option("--sigma", sigma_path)->required();

    // entropy
    auto *ent = app.add_subcommand("entropy", "Renyi, min or von Neumann entropy of rho");
    std::string ent_variant = "renyi";
    ent->add_option("--variant", ent_variant)->check(CLI::IsMember({"renyi", "min", "vn"}));
    ent->add_option("--alpha", alpha);
    ent->add_option("--rho", rho_path)->required();

    // conditional
    auto *cond = app.add_subcommand("conditional", "Conditional entropy H(A|B) of a bipartite state");
    std::string state_path, dims_flag, method = "mirror", kind = "renyi", output;
    double tolerance = 1e-5;
    cond->add_option("--state", state_path)->required();
    cond->add_option("--dims", dims_flag, "Subsystem dimensions, e.g. 2,2");
    cond->add_option("--alpha", alpha);
    cond->add_option("--kind", kind)->check(CLI::IsMember({"renyi", "min", "max", "vn"}));
    cond->add_option("--method", method)->check(CLI::IsMember({"mirror", "fixed-point", "grid"}));
    cond->add_option("--tolerance", tolerance)->check(CLI::PositiveNumber);
    cond->add_option("--output", output, "Write value and optimal conditioning state as JSON");

    // duality
    auto *dual = app.add_subcommand("duality", "H_a(A|B) + H_b(A|C) for a pure tripartite state");
    dual->add_option("--state", state_path)->required();
    dual->add_option("--dims", dims_flag);
    dual->add_option("--alpha", alpha)->required();
    dual->add_option("--tolerance", tolerance)->check(CLI::PositiveNumber);

    // limits
    auto *lim = app.add_subcommand("limits", "alpha -> 1 and alpha -> infinity limits");
    lim->add_option("--rho", rho_path)->required();
    lim->add_option("--sigma", sigma_path)->required();

    // suite
    auto *suite = app.add_subcommand("suite", "Run property suites and print JSON reports");
    std::string suite_id;
    bool all = false, list = false;
    int trials = 200, max_dim = 3;
    std::uint64_t seed = 42;
    auto *id_opt = suite->add_option("--id", suite_id);
    suite->add_flag("--all", all)->excludes(id_opt);
    suite->add_flag("--list", list);
    suite->add_option("--trials", trials)->check(CLI::PositiveNumber);
    suite->add_option("--max-dim", max_dim)->check(CLI::Range(2, 6));
    suite->add_option("--seed", seed);
    suite->add_option("--output", output);

    // mine
    auto *mine = app.add_subcommand("mine", "Search for data-processing violations at alpha < 1/2");
    std::string verify_path;
    int mine_trials = 100000;
    mine->add_option("--alpha", alpha);
    mine->add_option("--trials", mine_trials)->check(CLI::PositiveNumber);
    mine->add_option("--seed", seed);
    mine->add_option("--output", output);
    mine->add_option("--verify", verify_path, "Re-check every record of a saved report");

    // uncertainty
    auto *unc = app.add_subcommand("uncertainty", "H_a(X|B) + H_b(Y|C) against log 1/c");
    std::string m_path, n_path;
    unc->add_option("--state", state_path)->required();
    unc->add_option("--dims", dims_flag);
    unc->add_option("--alpha", alpha)->required();
    unc->add_option("--povm-m", m_path, "Defaults to the computational basis");
    unc->add_option("--povm-n", n_path, "Defaults to the Hadamard basis");
    unc->add_option("--tolerance", tolerance)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 1;
    }

    const Options opt = g.options();
    const Printer out(g.precision);
    ConditionalOptions copt;
    copt.tolerance = tolerance;
    copt.method = parse_method(method);
    copt.base = opt;

    try {
        auto need_alpha = [&](const char *what) {
            if (!alpha) {
                throw ValidationError(std::string("--alpha is required for ") + what);
            }
            return *alpha;
        };

        if (*div) {
            const auto rho = load_operator(rho_path);
            const auto sigma = load_operator(sigma_path);
            if (variant == "sandwiched") {
                std::cout << out.value(sandwiched_divergence(rho, sigma, RenyiOrder(need_alpha("sandwiched")), opt)) << '\n';
            } else if (variant == "petz") {
                std::cout << out.value(petz_divergence(rho, sigma, RenyiOrder(need_alpha("petz")), opt)) << '\n';
            } else if (variant == "relative") {
                std::cout << out.value(relative_entropy(rho, sigma, opt)) << '\n';
            } else if (variant == "max") {
                std::cout << out.value(max_relative_entropy(rho, sigma, opt)) << '\n';
            } else if (variant == "min") {
                std::cout << out.value(min_relative_entropy(rho, sigma, opt)) << '\n';
            } else {
                std::cout << out.number(fidelity(rho, sigma, opt.zero)) << '\n';
            }
            return 0;
        }

        if (*ent) {
            const auto rho = load_operator(rho_path);
            if (ent_variant == "renyi") {
                std::cout << out.number(renyi_entropy(rho, RenyiOrder(need_alpha("renyi entropy")), opt)) << '\n';
            } else if (ent_variant == "min") {
                std::cout << out.number(min_entropy(rho, opt)) << '\n';
            } else {
                std::cout << out.number(von_neumann_entropy(rho, opt)) << '\n';
            }
            return 0;
        }

        if (*cond) {
            const auto state = load_state(state_path, dims_flag);
            ConditionalEntropyResult res;
            if (kind == "vn") {
                std::cout << out.number(conditional_vn_entropy(state, opt)) << '\n';
                return 0;
            }
            if (kind == "min") {
                res = conditional_min_entropy(state, copt);
            } else if (kind == "max") {
                res = conditional_max_entropy(state, copt);
            } else {
                res = conditional_renyi(state, need_alpha("conditional"), copt);
            }
            std::cout << out.number(res.value) << '\n';
            if (!output.empty()) {
                write_json_file(output, {{"value", res.value},
                                         {"method", to_string(res.method)},
                                         {"iterations", res.iterations},
                                         {"residual", res.residual},
                                         {"optimizer_state", matrix_to_json(res.optimizer_state.matrix())}});
            }
            return 0;
        }

        if (*dual) {
            const auto state = load_state(state_path, dims_flag);
            const auto check = duality_check(state, *alpha, copt);
            std::cout << "beta " << out.number(check.beta) << '\n'
                      << "H_alpha(A|B) " << out.number(check.h_ab) << '\n'
                      << "-H_beta(A|C) " << out.number(check.minus_h_ac) << '\n'
                      << "gap " << out.number(check.gap) << '\n';
            return 0;
        }

        if (*lim) {
            const auto rho = load_operator(rho_path);
            const auto sigma = load_operator(sigma_path);
            const auto r = limit_checks(rho, sigma, opt);
            std::cout << "D(alpha=0.999) " << out.number(r.below_one) << '\n'
                      << "D(alpha=1.001) " << out.number(r.above_one) << '\n'
                      << "D " << out.value(r.relative) << '\n'
                      << "D(alpha=200) " << out.number(r.large_alpha) << '\n'
                      << "D_max " << out.value(r.max_relative) << '\n';
            return 0;
        }

        if (*suite) {
            if (list) {
                for (const auto &s : suite_registry()) {
                    std::cout << s.id << "  " << s.description << '\n';
                }
                return 0;
            }
            if (!all && suite_id.empty()) {
                throw ValidationError("suite needs --id <name>, --all or --list");
            }
            SuiteConfig cfg;
            cfg.trials = trials;
            cfg.max_dim = max_dim;
            cfg.seed = seed;
            cfg.conditional.tolerance = tolerance;
            cfg.evaluator = default_evaluator(opt);
            Json reports = Json::array();
            bool ok = true;
            for (const auto &id : all ? suite_ids() : std::vector<std::string>{suite_id}) {
                const auto r = run_suite(id, cfg);
                ok = ok && r.pass();
                std::cerr << id << ": " << r.verdict() << '\n';
                reports.push_back(r.to_json());
            }
            emit(all ? reports : reports[0], output);
            return ok ? 0 : 2;
        }

        if (*mine) {
            if (!verify_path.empty()) {
                const Json report = read_json_file(verify_path);
                int bad = 0;
                for (const auto &rec : report.at("counterexamples")) {
                    const auto r = CounterexampleRecord::from_json(rec);
                    const double v = reverify(r);
                    if (!(v > 1e-6) || std::abs(v - r.violation) > 1e-9) {
                        ++bad;
                    }
                }
                std::cout << "records " << report.at("counterexamples").size() << " mismatched " << bad << '\n';
                return bad == 0 ? 0 : 2;
            }
            const auto res = mine_counterexamples(need_alpha("mine"), mine_trials, seed);
            std::cout << "records " << res.records.size() << '\n'
                      << "best " << out.number(res.best_violation) << '\n';
            if (res.records.empty()) {
                std::cout << "none found in budget\n";
            }
            if (!output.empty()) {
                write_json_file(output, res.to_json(seed));
            }
            return 0;
        }

        if (*unc) {
            const auto state = load_state(state_path, dims_flag);
            const double s = 1.0 / std::numbers::sqrt2;
            Matrix hadamard(2, 2);
            hadamard << s, s, s, -s;
            const int d_a = state.dims().empty() ? 0 : state.dims()[0];
            const POVM m = m_path.empty() ? POVM::from_basis(Matrix::Identity(d_a, d_a))
                                          : povm_from_json(read_json_file(m_path));
            if (n_path.empty() && d_a != 2) {
                throw ValidationError("--povm-n is required unless A is a qubit");
            }
            const POVM n = n_path.empty() ? POVM::from_basis(hadamard) : povm_from_json(read_json_file(n_path));
            const auto c = uncertainty_check(state, m, n, *alpha, copt);
            std::cout << "lhs " << out.number(c.lhs) << '\n'
                      << "c_printed " << out.number(c.c_printed) << '\n'
                      << "bound_printed " << out.number(c.bound_printed) << '\n'
                      << "margin_printed " << out.number(c.margin_printed) << '\n'
                      << "c_squared " << out.number(c.c_squared) << '\n'
                      << "bound_squared " << out.number(c.bound_squared) << '\n'
                      << "margin_squared " << out.number(c.margin_squared) << '\n';
            return 0;
        }
    } catch (const ValidationError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "error: invalid JSON content: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "computation error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
