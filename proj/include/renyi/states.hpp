#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "renyi/linalg.hpp"

namespace renyi {

/// Positive semi-definite operator with trace in (0, 1].
class DensityOperator {
  public:
    explicit DensityOperator(HermitianOperator op, const ZeroThreshold &zt = {})
        : op_(std::move(op)) {
        require_psd(op_, zt, "density operator");
        const double tr = op_.trace();
        if (!(tr > 0.0) || tr > 1.0 + 1e-12) {
            throw ValidationError("density operator trace must lie in (0, 1], got " +
                                  std::to_string(tr));
        }
    }
    explicit DensityOperator(const Matrix &m) : DensityOperator(HermitianOperator(m)) {}

    [[nodiscard]] const HermitianOperator &op() const { return op_; }
    [[nodiscard]] const Matrix &matrix() const { return op_.matrix(); }
    [[nodiscard]] int dim() const { return op_.dim(); }
    [[nodiscard]] double trace() const { return op_.trace(); }

    operator const HermitianOperator &() const { return op_; } // NOLINT

  private:
    HermitianOperator op_;
};

/// Density operator with declared subsystem dimensions and classical registers.
class MultipartiteState {
  public:
    MultipartiteState(DensityOperator op, std::vector<int> dims, std::vector<int> classical = {})
        : op_(std::move(op)), dims_(std::move(dims)), classical_(std::move(classical)) {
        detail::check_dims(op_.matrix().rows(), dims_);
        for (int c : classical_) {
            if (c < 0 || c >= static_cast<int>(dims_.size())) {
                throw ValidationError("classical register index out of range");
            }
        }
    }

    [[nodiscard]] const DensityOperator &density() const { return op_; }
    [[nodiscard]] const HermitianOperator &op() const { return op_.op(); }
    [[nodiscard]] const Matrix &matrix() const { return op_.matrix(); }
    [[nodiscard]] const std::vector<int> &dims() const { return dims_; }
    [[nodiscard]] const std::vector<int> &classical() const { return classical_; }
    [[nodiscard]] int dim() const { return op_.dim(); }

    /// Marginal on the listed subsystems (in the listed order).
    [[nodiscard]] MultipartiteState marginal(const std::vector<int> &keep) const {
        std::vector<int> traced;
        for (int i = 0; i < static_cast<int>(dims_.size()); ++i) {
            if (std::find(keep.begin(), keep.end(), i) == keep.end()) {
                traced.push_back(i);
            }
        }
        std::vector<int> sorted_keep = keep;
        std::sort(sorted_keep.begin(), sorted_keep.end());
        Matrix reduced = partial_trace(matrix(), dims_, traced);
        std::vector<int> kept_dims;
        for (int i : sorted_keep) {
            kept_dims.push_back(dims_[i]);
        }
        // partial_trace keeps ascending order; reorder to match `keep`.
        std::vector<int> perm;
        for (int k : keep) {
            perm.push_back(static_cast<int>(
                std::find(sorted_keep.begin(), sorted_keep.end(), k) - sorted_keep.begin()));
        }
        std::vector<int> out_dims;
        std::vector<int> out_classical;
        for (std::size_t pos = 0; pos < keep.size(); ++pos) {
            out_dims.push_back(dims_[keep[pos]]);
            if (std::find(classical_.begin(), classical_.end(), keep[pos]) != classical_.end()) {
                out_classical.push_back(static_cast<int>(pos));
            }
        }
        return {DensityOperator(HermitianOperator(permute_subsystems(reduced, kept_dims, perm), 1e-8)),
                out_dims, out_classical};
    }

    /// Regroups subsystems into consecutive blocks, e.g. {{0}, {1, 2}}.
    [[nodiscard]] MultipartiteState grouped(const std::vector<std::vector<int>> &groups) const {
        std::vector<int> order;
        std::vector<int> out_dims;
        for (const auto &g : groups) {
            int d = 1;
            for (int i : g) {
                order.push_back(i);
                d *= dims_.at(i);
            }
            out_dims.push_back(d);
        }
        if (order.size() != dims_.size()) {
            throw ValidationError("grouping must use every subsystem exactly once");
        }
        Matrix m = permute_subsystems(matrix(), dims_, order);
        return {DensityOperator(HermitianOperator(m, 1e-8)), out_dims};
    }

  private:
    DensityOperator op_;
    std::vector<int> dims_;
    std::vector<int> classical_;
};

/// CPTP map in Kraus form, K_j of shape d_out x d_in.
class QuantumChannel {
  public:
    explicit QuantumChannel(std::vector<Matrix> kraus, double tolerance = 1e-10)
        : kraus_(std::move(kraus)) {
        if (kraus_.empty()) {
            throw ValidationError("channel needs at least one Kraus operator");
        }
        d_in_ = static_cast<int>(kraus_.front().cols());
        d_out_ = static_cast<int>(kraus_.front().rows());
        Matrix sum = Matrix::Zero(d_in_, d_in_);
        for (const auto &k : kraus_) {
            if (k.cols() != d_in_ || k.rows() != d_out_) {
                throw ValidationError("Kraus operators must share one shape");
            }
            sum += k.adjoint() * k;
        }
        const double err = (sum - Matrix::Identity(d_in_, d_in_)).cwiseAbs().maxCoeff();
        if (err > tolerance) {
            throw ValidationError("Kraus operators are not trace preserving (deviation " +
                                  std::to_string(err) + ")");
        }
    }

    static QuantumChannel identity(int d) { return QuantumChannel({Matrix::Identity(d, d)}); }

    [[nodiscard]] int input_dim() const { return d_in_; }
    [[nodiscard]] int output_dim() const { return d_out_; }
    [[nodiscard]] const std::vector<Matrix> &kraus() const { return kraus_; }

    [[nodiscard]] HermitianOperator apply(const HermitianOperator &rho) const {
        if (rho.dim() != d_in_) {
            throw ValidationError("channel input dimension " + std::to_string(d_in_) +
                                  " does not match operator dimension " + std::to_string(rho.dim()));
        }
        Matrix out = Matrix::Zero(d_out_, d_out_);
        for (const auto &k : kraus_) {
            out += k * rho.matrix() * k.adjoint();
        }
        return HermitianOperator(out, 1e-8);
    }

    /// id_left (x) this (x) id_right.
    [[nodiscard]] QuantumChannel extended(int left, int right) const {
        std::vector<Matrix> ks;
        ks.reserve(kraus_.size());
        for (const auto &k : kraus_) {
            ks.push_back(kron(kron(Matrix::Identity(left, left), k), Matrix::Identity(right, right)));
        }
        return QuantumChannel(std::move(ks), 1e-8);
    }

  private:
    std::vector<Matrix> kraus_;
    int d_in_ = 0;
    int d_out_ = 0;
};

inline DensityOperator apply_channel(const QuantumChannel &channel, const DensityOperator &rho) {
    return DensityOperator(channel.apply(rho.op()));
}

/// Applies `channel` to subsystem `which`, leaving the others untouched.
inline MultipartiteState apply_channel_to_subsystem(const MultipartiteState &state,
                                                    const QuantumChannel &channel, int which) {
    const auto &dims = state.dims();
    if (which < 0 || which >= static_cast<int>(dims.size()) || dims[which] != channel.input_dim()) {
        throw ValidationError("channel does not act on the selected subsystem");
    }
    int left = 1, right = 1;
    for (int i = 0; i < which; ++i) {
        left *= dims[i];
    }
    for (int i = which + 1; i < static_cast<int>(dims.size()); ++i) {
        right *= dims[i];
    }
    auto out_dims = dims;
    out_dims[which] = channel.output_dim();
    return {DensityOperator(channel.extended(left, right).apply(state.op())), out_dims,
            state.classical()};
}

/// Positive operator-valued measure; elements sum to the identity.
class POVM {
  public:
    explicit POVM(std::vector<HermitianOperator> elements, double tolerance = 1e-10)
        : elements_(std::move(elements)) {
        if (elements_.empty()) {
            throw ValidationError("POVM needs at least one element");
        }
        const int d = elements_.front().dim();
        Matrix sum = Matrix::Zero(d, d);
        for (const auto &e : elements_) {
            HermitianOperator::check_same_dim(elements_.front(), e);
            require_psd(e, {}, "POVM element");
            sum += e.matrix();
        }
        const double err = (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
        if (err > tolerance) {
            throw ValidationError("POVM elements do not sum to identity (deviation " +
                                  std::to_string(err) + ")");
        }
    }

    /// Rank-one projective measurement onto the columns of a unitary.
    static POVM from_basis(const Matrix &unitary) {
        std::vector<HermitianOperator> els;
        for (Eigen::Index c = 0; c < unitary.cols(); ++c) {
            els.push_back(HermitianOperator(Matrix(unitary.col(c) * unitary.col(c).adjoint()), 1e-8));
        }
        return POVM(std::move(els), 1e-8);
    }

    [[nodiscard]] int dim() const { return elements_.front().dim(); }
    [[nodiscard]] std::size_t size() const { return elements_.size(); }
    [[nodiscard]] const std::vector<HermitianOperator> &elements() const { return elements_; }

  private:
    std::vector<HermitianOperator> elements_;
};

/**
 * Measures subsystem `which` with `povm`; the outcome replaces that subsystem
 * as a classical register in front: output dims [n_outcomes, rest...] with
 * block x equal to tr_which[(sqrt(M_x) (x) id) rho (sqrt(M_x) (x) id)].
 */
inline MultipartiteState measure(const MultipartiteState &state, const POVM &povm, int which = 0) {
    const auto &dims = state.dims();
    if (which < 0 || which >= static_cast<int>(dims.size())) {
        throw ValidationError("measured subsystem index out of range");
    }
    if (povm.dim() != dims[which]) {
        throw ValidationError("POVM dimension " + std::to_string(povm.dim()) +
                              " does not match subsystem dimension " + std::to_string(dims[which]));
    }
    int left = 1, right = 1;
    for (int i = 0; i < which; ++i) {
        left *= dims[i];
    }
    for (int i = which + 1; i < static_cast<int>(dims.size()); ++i) {
        right *= dims[i];
    }
    std::vector<int> rest_dims;
    for (int i = 0; i < static_cast<int>(dims.size()); ++i) {
        if (i != which) {
            rest_dims.push_back(dims[i]);
        }
    }
    const int d_rest = left * right;
    const int n = static_cast<int>(povm.size());
    Matrix out = Matrix::Zero(n * d_rest, n * d_rest);
    const int traced[1] = {which};
    for (int x = 0; x < n; ++x) {
        const Matrix root = matrix_power_on_support(povm.elements()[x], 0.5).matrix();
        const Matrix lifted =
            kron(kron(Matrix::Identity(left, left), root), Matrix::Identity(right, right));
        const Matrix post = lifted * state.matrix() * lifted;
        out.block(x * d_rest, x * d_rest, d_rest, d_rest) = partial_trace(post, dims, traced);
    }
    std::vector<int> out_dims{n};
    out_dims.insert(out_dims.end(), rest_dims.begin(), rest_dims.end());
    return {DensityOperator(HermitianOperator(out, 1e-8)), out_dims, {0}};
}

/**
 * Spectral purification sum_i sqrt(lambda_i) |i>_R |v_i>_B of a normalized
 * state; returned on R (x) B with dim R = dim B.
 */
inline MultipartiteState purify(const DensityOperator &rho) {
    if (std::abs(rho.trace() - 1.0) > 1e-10) {
        throw ValidationError("purification requires a normalized state");
    }
    const int d = rho.dim();
    const auto &s = rho.op().spectrum();
    ComplexVector psi = ComplexVector::Zero(d * d);
    for (int i = 0; i < d; ++i) {
        const double w = std::sqrt(std::max(s.values(i), 0.0));
        for (int b = 0; b < d; ++b) {
            psi(i * d + b) += w * s.vectors(b, i);
        }
    }
    psi /= psi.norm();
    return {DensityOperator(HermitianOperator::outer(psi)), {d, d}};
}

/**
 * Block-diagonal classical-quantum state sum_y p_y |y><y| (x) rho^y with the
 * classical register Y as subsystem 0.
 */
inline MultipartiteState classical_quantum_assemble(const std::vector<double> &weights,
                                                    const std::vector<MultipartiteState> &blocks) {
    if (weights.empty() || weights.size() != blocks.size()) {
        throw ValidationError("need one weight per block");
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) {
            throw ValidationError("weights must be nonnegative");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) {
        throw ValidationError("weights must sum to 1, got " + std::to_string(total));
    }
    const auto &dims = blocks.front().dims();
    const int d = blocks.front().dim();
    const int n = static_cast<int>(blocks.size());
    Matrix out = Matrix::Zero(n * d, n * d);
    for (int y = 0; y < n; ++y) {
        if (blocks[y].dims() != dims) {
            throw ValidationError("all blocks must share subsystem dimensions");
        }
        if (std::abs(blocks[y].density().trace() - 1.0) > 1e-10) {
            throw ValidationError("blocks must be normalized");
        }
        out.block(y * d, y * d, d, d) = weights[y] * blocks[y].matrix();
    }
    std::vector<int> out_dims{n};
    out_dims.insert(out_dims.end(), dims.begin(), dims.end());
    return {DensityOperator(HermitianOperator(out, 1e-8)), out_dims, {0}};
}

/**
 * Seedable 64-bit generator (std::mt19937_64) with portable uniform and
 * Gaussian draws (Box-Muller on raw 53-bit mantissas, no <random>
 * distributions whose output varies across standard libraries).
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for trial t of a run seeded with `seed`.
    static Rng for_trial(std::uint64_t seed, std::uint64_t trial) { return Rng(seed ^ trial); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    Complex complex_normal() {
        const double re = normal();
        const double im = normal();
        const double k = 1.0 / std::numbers::sqrt2;
        return {re * k, im * k};
    }

    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    std::uint64_t next() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline Matrix ginibre(int rows, int cols, Rng &rng) {
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            g(i, j) = rng.complex_normal();
        }
    }
    return g;
}

/// rows x cols matrix with orthonormal columns (Gram-Schmidt via QR with phase fix).
inline Matrix random_isometry(int rows, int cols, Rng &rng) {
    if (cols > rows || cols <= 0) {
        throw ValidationError("isometry needs 0 < cols <= rows");
    }
    const Matrix g = ginibre(rows, cols, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    const Matrix r = qr.matrixQR();
    for (int j = 0; j < cols; ++j) {
        const Complex d = r(j, j);
        const double a = std::abs(d);
        if (a > 0) {
            q.col(j) *= d / a;
        }
    }
    return q;
}

inline Matrix random_unitary(int d, Rng &rng) { return random_isometry(d, d, rng); }

/// Ginibre ensemble G G^dagger / tr, G of shape dim x rank.
inline DensityOperator random_density(int dim, int rank, Rng &rng) {
    if (dim <= 0 || rank <= 0 || rank > dim) {
        throw ValidationError("random_density needs 0 < rank <= dim");
    }
    const Matrix g = ginibre(dim, rank, rng);
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityOperator(HermitianOperator(m, 1e-8));
}

inline DensityOperator random_density(int dim, int rank, std::uint64_t seed) {
    Rng rng(seed);
    return random_density(dim, rank, rng);
}

inline ComplexVector random_unit_vector(int dim, Rng &rng) {
    ComplexVector v(dim);
    for (int i = 0; i < dim; ++i) {
        v(i) = rng.complex_normal();
    }
    return v / v.norm();
}

inline MultipartiteState random_pure(const std::vector<int> &dims, Rng &rng) {
    const int d = product_of(dims);
    if (d <= 0) {
        throw ValidationError("random_pure needs positive dimensions");
    }
    return {DensityOperator(HermitianOperator::outer(random_unit_vector(d, rng))), dims};
}

inline MultipartiteState random_pure(const std::vector<int> &dims, std::uint64_t seed) {
    Rng rng(seed);
    return random_pure(dims, rng);
}

/// Kraus operators are the d_out-row blocks of a random isometry C^d_in -> C^(d_out * k).
inline QuantumChannel random_channel(int d_in, int d_out, int kraus_count, Rng &rng) {
    if (d_in <= 0 || d_out <= 0 || kraus_count <= 0 || d_out * kraus_count < d_in) {
        throw ValidationError("random_channel needs d_out * kraus_count >= d_in > 0");
    }
    const Matrix v = random_isometry(d_out * kraus_count, d_in, rng);
    std::vector<Matrix> ks;
    for (int j = 0; j < kraus_count; ++j) {
        ks.push_back(v.middleRows(j * d_out, d_out));
    }
    return QuantumChannel(std::move(ks));
}

inline QuantumChannel random_channel(int d_in, int d_out, int kraus_count, std::uint64_t seed) {
    Rng rng(seed);
    return random_channel(d_in, d_out, kraus_count, rng);
}

/// M_x = K_x^dagger K_x for a random isometry split into `outcomes` rows.
inline POVM random_povm(int dim, int outcomes, Rng &rng) {
    const Matrix v = random_isometry(dim * outcomes, dim, rng);
    std::vector<HermitianOperator> els;
    for (int x = 0; x < outcomes; ++x) {
        const Matrix k = v.middleRows(x * dim, dim);
        els.push_back(HermitianOperator(Matrix(k.adjoint() * k), 1e-8));
    }
    return POVM(std::move(els), 1e-9);
}

} // namespace renyi
