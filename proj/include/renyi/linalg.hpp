#pragma once

/**
 * @file linalg.hpp
 * @brief Dense Hermitian operators and the matrix functions used by the
 * divergence functionals.
 *
 * Every matrix function here follows the generalized-inverse convention:
 * it is evaluated on the support of its argument and maps eigenvalues that
 * are classified as zero to zero, for every exponent (including negative
 * ones) and for the logarithm.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace renyi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Invalid input: shapes, domains, broken invariants of loaded data.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A well-formed request that could not be computed.
class ComputationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * Numerical rank decision. An eigenvalue is treated as zero iff
 * lambda <= max(abs, rel * lambda_max).
 */
struct ZeroThreshold {
    double abs = 1e-12;
    double rel = 1e-10;

    [[nodiscard]] double cutoff(double lambda_max) const {
        return std::max(abs, rel * std::max(lambda_max, 0.0));
    }
};

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
struct Spectrum {
    RealVector values;
    Matrix vectors;
};

namespace detail {

inline Spectrum hermitian_spectrum(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw ComputationError("Hermitian eigensolver did not converge");
    }
    Spectrum s;
    s.values = solver.eigenvalues().reverse();
    s.vectors = solver.eigenvectors().rowwise().reverse();
    return s;
}

inline double max_abs_entry(const Matrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace detail

/**
 * Dense d x d Hermitian matrix with a lazily computed, shared spectrum.
 *
 * Values are immutable after construction. Copies share the spectrum cache,
 * which is filled at most once (std::call_once), so instances may be read
 * from several threads.
 */
class HermitianOperator {
  public:
    HermitianOperator() : HermitianOperator(Matrix::Zero(0, 0)) {}

    /// Validates hermiticity (relative to the largest entry) and symmetrizes.
    explicit HermitianOperator(const Matrix &m, double tolerance = 1e-12)
        : cache_(std::make_shared<Cache>()) {
        if (m.rows() != m.cols()) {
            throw ValidationError("operator must be square, got " + std::to_string(m.rows()) +
                                  "x" + std::to_string(m.cols()));
        }
        const double scale = detail::max_abs_entry(m);
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = i; j < m.cols(); ++j) {
                const double diff = std::abs(m(i, j) - std::conj(m(j, i)));
                if (diff > tolerance * std::max(scale, 1e-300)) {
                    std::ostringstream os;
                    os << "operator is not Hermitian: entries[" << i << "][" << j << "] and entries["
                       << j << "][" << i << "] differ from conjugates by " << diff;
                    throw ValidationError(os.str());
                }
            }
        }
        m_ = (m + m.adjoint()) * 0.5;
    }

    static HermitianOperator identity(int d) { return HermitianOperator(Matrix::Identity(d, d)); }
    static HermitianOperator zero(int d) { return HermitianOperator(Matrix::Zero(d, d)); }

    static HermitianOperator diagonal(const std::vector<double> &diag) {
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(diag.size()),
                                static_cast<Eigen::Index>(diag.size()));
        for (std::size_t i = 0; i < diag.size(); ++i) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
        }
        return HermitianOperator(m);
    }

    /// |v><v| (not normalized).
    static HermitianOperator outer(const ComplexVector &v) {
        return HermitianOperator(Matrix(v * v.adjoint()));
    }

    /// Builds V diag(values) V^dagger without re-validating.
    static HermitianOperator from_spectrum(const RealVector &values, const Matrix &vectors) {
        Matrix m = vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
        return HermitianOperator(m, kRelaxed);
    }

    [[nodiscard]] int dim() const { return static_cast<int>(m_.rows()); }
    [[nodiscard]] const Matrix &matrix() const { return m_; }
    [[nodiscard]] double trace() const { return m_.trace().real(); }

    [[nodiscard]] const Spectrum &spectrum() const {
        std::call_once(cache_->once, [this] { cache_->spectrum = detail::hermitian_spectrum(m_); });
        return cache_->spectrum;
    }

    [[nodiscard]] double max_eigenvalue() const {
        return dim() == 0 ? 0.0 : spectrum().values(0);
    }
    [[nodiscard]] double min_eigenvalue() const {
        return dim() == 0 ? 0.0 : spectrum().values(dim() - 1);
    }

    friend HermitianOperator operator+(const HermitianOperator &a, const HermitianOperator &b) {
        check_same_dim(a, b);
        return HermitianOperator(Matrix(a.m_ + b.m_), kRelaxed);
    }
    friend HermitianOperator operator-(const HermitianOperator &a, const HermitianOperator &b) {
        check_same_dim(a, b);
        return HermitianOperator(Matrix(a.m_ - b.m_), kRelaxed);
    }
    friend HermitianOperator operator*(double s, const HermitianOperator &a) {
        return HermitianOperator(Matrix(s * a.m_), kRelaxed);
    }

    /// U A U^dagger for any (not necessarily square) U.
    [[nodiscard]] HermitianOperator conjugate_by(const Matrix &u) const {
        if (u.cols() != m_.rows()) {
            throw ValidationError("conjugation dimension mismatch");
        }
        return HermitianOperator(Matrix(u * m_ * u.adjoint()), kRelaxed);
    }

    static void check_same_dim(const HermitianOperator &a, const HermitianOperator &b) {
        if (a.dim() != b.dim()) {
            throw ValidationError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                                  std::to_string(b.dim()));
        }
    }

  private:
    // Products of Hermitian factors carry rounding-level asymmetry only.
    static constexpr double kRelaxed = 1e-8;

    struct Cache {
        std::once_flag once;
        Spectrum spectrum;
    };
    Matrix m_;
    std::shared_ptr<Cache> cache_;
};

/// Support of a PSD operator: rank, projector, and the cutoff used.
struct SupportInfo {
    int rank = 0;
    HermitianOperator projector;
    double zero_threshold = 0.0;
    /// Orthonormal basis of the support (d x rank).
    Matrix basis;
};

inline const Spectrum &eigendecompose(const HermitianOperator &a) { return a.spectrum(); }

/// Throws if `a` has an eigenvalue below -max(abs, 1e-10 * lambda_max).
inline void require_psd(const HermitianOperator &a, const ZeroThreshold &zt = {},
                        const char *what = "operator") {
    if (a.dim() == 0) {
        return;
    }
    const auto &v = a.spectrum().values;
    const double scale = std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
    const double floor = -std::max(zt.abs, 1e-10 * scale);
    if (v(v.size() - 1) < floor) {
        std::ostringstream os;
        os << what << " is not positive semi-definite (smallest eigenvalue " << v(v.size() - 1)
           << ")";
        throw ValidationError(os.str());
    }
}

inline SupportInfo support(const HermitianOperator &a, const ZeroThreshold &zt = {}) {
    const auto &s = a.spectrum();
    SupportInfo info;
    info.zero_threshold = zt.cutoff(a.max_eigenvalue());
    int r = 0;
    while (r < a.dim() && s.values(r) > info.zero_threshold) {
        ++r;
    }
    info.rank = r;
    info.basis = s.vectors.leftCols(r);
    info.projector = HermitianOperator(Matrix(info.basis * info.basis.adjoint()), 1e-8);
    return info;
}

/**
 * Applies f to the eigenvalues classified as nonzero; the rest map to 0.
 * Small negative eigenvalues of a PSD input are clipped.
 */
inline HermitianOperator apply_on_support(const HermitianOperator &a,
                                          const std::function<double(double)> &f,
                                          const ZeroThreshold &zt = {}) {
    require_psd(a, zt);
    const auto &s = a.spectrum();
    const double cut = zt.cutoff(a.max_eigenvalue());
    RealVector mapped(a.dim());
    for (int i = 0; i < a.dim(); ++i) {
        mapped(i) = s.values(i) > cut ? f(s.values(i)) : 0.0;
    }
    return HermitianOperator::from_spectrum(mapped, s.vectors);
}

inline HermitianOperator matrix_power_on_support(const HermitianOperator &a, double p,
                                                 const ZeroThreshold &zt = {}) {
    return apply_on_support(a, [p](double x) { return std::pow(x, p); }, zt);
}

/// Logarithm on the support, in the given base (2 by default).
inline HermitianOperator matrix_log_on_support(const HermitianOperator &a, double base = 2.0,
                                               const ZeroThreshold &zt = {}) {
    const double ln_base = std::log(base);
    return apply_on_support(a, [ln_base](double x) { return std::log(x) / ln_base; }, zt);
}

/// sum of f(lambda) over support eigenvalues.
inline double trace_function_on_support(const HermitianOperator &a,
                                        const std::function<double(double)> &f,
                                        const ZeroThreshold &zt = {}) {
    require_psd(a, zt);
    const auto &v = a.spectrum().values;
    const double cut = zt.cutoff(a.max_eigenvalue());
    double acc = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        if (v(i) > cut) {
            acc += f(v(i));
        }
    }
    return acc;
}

/**
 * Schatten p-(quasi)norm (tr A^p)^{1/p} over the support of a PSD operator.
 * p = +inf gives the operator norm; negative p is evaluated on the support.
 */
inline double schatten_norm(const HermitianOperator &a, double p, const ZeroThreshold &zt = {}) {
    if (p == 0.0 || std::isnan(p)) {
        throw ValidationError("Schatten exponent must be nonzero");
    }
    require_psd(a, zt);
    const double cut = zt.cutoff(a.max_eigenvalue());
    const bool is_zero = a.dim() == 0 || a.max_eigenvalue() <= cut;
    if (is_zero) {
        if (p < 0) {
            throw ValidationError("zero operator has no Schatten norm for negative exponent");
        }
        return 0.0;
    }
    if (std::isinf(p)) {
        return a.max_eigenvalue();
    }
    const double sum = trace_function_on_support(a, [p](double x) { return std::pow(x, p); }, zt);
    return std::pow(sum, 1.0 / p);
}

struct NormDualityCheck {
    double direct = 0.0;
    double variational = 0.0;
};

/**
 * Evaluates the Schatten (quasi)norm both directly and through the
 * variational characterization over trace-bounded Z >= 0 diagonal in the
 * eigenbasis of X: sup tr[X Z^{1/q}] for p > 1, inf over Z >> X for p < 1.
 *
 * The variational side solves the KKT system for the simplex constraint by
 * bisection on the Lagrange multiplier and then evaluates the objective at
 * the resulting Z, independently of the closed-form norm.
 */
inline NormDualityCheck variational_norm_check(const HermitianOperator &x, double p,
                                               const ZeroThreshold &zt = {}) {
    if (p == 0.0 || p == 1.0 || !std::isfinite(p)) {
        throw ValidationError("variational norm check needs finite p not in {0, 1}");
    }
    NormDualityCheck out;
    out.direct = schatten_norm(x, p, zt);

    std::vector<double> lam;
    const auto &v = x.spectrum().values;
    const double cut = zt.cutoff(x.max_eigenvalue());
    for (int i = 0; i < x.dim(); ++i) {
        if (v(i) > cut) {
            lam.push_back(v(i));
        }
    }
    if (lam.empty()) {
        out.variational = 0.0;
        return out;
    }
    const double s = 1.0 - 1.0 / p; // exponent 1/q on Z
    // Stationarity of sum_i x_i z_i^s - mu (sum_i z_i - 1):
    //   z_i = (s x_i / mu)^{1/(1-s)}, and sum_i z_i is monotone in mu.
    const double e = 1.0 / (1.0 - s);
    auto total = [&](double log_mu) {
        double acc = 0.0;
        for (double l : lam) {
            acc += std::exp(e * (std::log(std::abs(s) * l) - log_mu));
        }
        return acc;
    };
    // total is decreasing in log_mu when e > 0 and increasing when e < 0.
    double lo = -700.0, hi = 700.0;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double t = total(mid);
        const bool too_big = t > 1.0;
        if ((e > 0) == too_big) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double log_mu = 0.5 * (lo + hi);
    double objective = 0.0, mass = 0.0;
    std::vector<double> z(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        z[i] = std::exp(e * (std::log(std::abs(s) * lam[i]) - log_mu));
        mass += z[i];
    }
    for (std::size_t i = 0; i < lam.size(); ++i) {
        objective += lam[i] * std::pow(z[i] / mass, s);
    }
    out.variational = objective;
    return out;
}

/// Kronecker product; composite index a * dB + b.
inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline HermitianOperator tensor_product(const HermitianOperator &a, const HermitianOperator &b) {
    return HermitianOperator(kron(a.matrix(), b.matrix()), 1e-8);
}

inline int product_of(std::span<const int> dims) {
    return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

namespace detail {

inline void check_dims(Eigen::Index n, std::span<const int> dims) {
    if (dims.empty() || std::any_of(dims.begin(), dims.end(), [](int d) { return d <= 0; })) {
        throw ValidationError("subsystem dimensions must be positive");
    }
    if (product_of(dims) != n) {
        throw ValidationError("product of subsystem dimensions " +
                              std::to_string(product_of(dims)) + " does not match operator dimension " +
                              std::to_string(n));
    }
}

inline std::vector<int> unravel(int index, std::span<const int> dims) {
    std::vector<int> digits(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        digits[k] = index % dims[k];
        index /= dims[k];
    }
    return digits;
}

inline int ravel(const std::vector<int> &digits, std::span<const int> dims,
                 std::span<const int> order) {
    int index = 0;
    for (int k : order) {
        index = index * dims[k] + digits[k];
    }
    return index;
}

} // namespace detail

/**
 * Reorders tensor factors: output factor k is input factor perm[k].
 */
inline Matrix permute_subsystems(const Matrix &m, std::span<const int> dims,
                                 std::span<const int> perm) {
    detail::check_dims(m.rows(), dims);
    if (perm.size() != dims.size()) {
        throw ValidationError("permutation length does not match number of subsystems");
    }
    std::vector<int> seen(dims.size(), 0);
    for (int p : perm) {
        if (p < 0 || p >= static_cast<int>(dims.size()) || seen[p]++) {
            throw ValidationError("invalid subsystem permutation");
        }
    }
    const int n = static_cast<int>(m.rows());
    std::vector<int> target(n);
    for (int i = 0; i < n; ++i) {
        target[i] = detail::ravel(detail::unravel(i, dims), dims, perm);
    }
    Matrix out(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out(target[i], target[j]) = m(i, j);
        }
    }
    return out;
}

/// Traces out the listed subsystems; the remaining ones keep their order.
inline Matrix partial_trace(const Matrix &m, std::span<const int> dims,
                            std::span<const int> traced) {
    detail::check_dims(m.rows(), dims);
    const int k = static_cast<int>(dims.size());
    std::vector<bool> is_traced(k, false);
    for (int t : traced) {
        if (t < 0 || t >= k) {
            throw ValidationError("partial trace subsystem index out of range");
        }
        is_traced[t] = true;
    }
    std::vector<int> kept, gone;
    for (int i = 0; i < k; ++i) {
        (is_traced[i] ? gone : kept).push_back(i);
    }
    std::vector<int> perm = kept;
    perm.insert(perm.end(), gone.begin(), gone.end());
    const Matrix p = permute_subsystems(m, dims, perm);
    int d_keep = 1, d_gone = 1;
    for (int i : kept) {
        d_keep *= dims[i];
    }
    for (int i : gone) {
        d_gone *= dims[i];
    }
    Matrix out = Matrix::Zero(d_keep, d_keep);
    for (int i = 0; i < d_keep; ++i) {
        for (int j = 0; j < d_keep; ++j) {
            Complex acc = 0.0;
            for (int r = 0; r < d_gone; ++r) {
                acc += p(i * d_gone + r, j * d_gone + r);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

enum class Subsystem { A, B };

/// Bipartite partial trace over `traced` for an operator on C^dA (x) C^dB.
inline HermitianOperator partial_trace(const HermitianOperator &a, int d_a, int d_b,
                                       Subsystem traced) {
    const int dims[2] = {d_a, d_b};
    const int which[1] = {traced == Subsystem::A ? 0 : 1};
    return HermitianOperator(partial_trace(a.matrix(), dims, which), 1e-8);
}

/**
 * Dephasing in the eigenbasis of `sigma`: rho -> sum_k P_k rho P_k over the
 * eigenprojectors of sigma. Eigenvalues within 1e-9 * |lambda|_max of each
 * other share one eigenprojector.
 */
inline HermitianOperator pinching(const HermitianOperator &sigma, const HermitianOperator &rho,
                                  double merge_tolerance = 1e-9) {
    HermitianOperator::check_same_dim(sigma, rho);
    const auto &s = sigma.spectrum();
    const int d = sigma.dim();
    double scale = 0.0;
    for (int i = 0; i < d; ++i) {
        scale = std::max(scale, std::abs(s.values(i)));
    }
    const double gap = merge_tolerance * std::max(scale, 1e-300);
    Matrix out = Matrix::Zero(d, d);
    int start = 0;
    while (start < d) {
        int end = start + 1;
        while (end < d && s.values(end - 1) - s.values(end) <= gap) {
            ++end;
        }
        const Matrix v = s.vectors.middleCols(start, end - start);
        const Matrix proj = v * v.adjoint();
        out += proj * rho.matrix() * proj;
        start = end;
    }
    return HermitianOperator(out, 1e-8);
}

/// Block-diagonal A (+) B.
inline HermitianOperator direct_sum(const HermitianOperator &a, const HermitianOperator &b) {
    Matrix m = Matrix::Zero(a.dim() + b.dim(), a.dim() + b.dim());
    m.topLeftCorner(a.dim(), a.dim()) = a.matrix();
    m.bottomRightCorner(b.dim(), b.dim()) = b.matrix();
    return HermitianOperator(m, 1e-8);
}

/// Operator (spectral) norm of an arbitrary matrix.
inline double operator_norm(const Matrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

inline double frobenius_distance(const Matrix &a, const Matrix &b) { return (a - b).norm(); }

} // namespace renyi
