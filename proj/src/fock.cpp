#include "stirap/fock.hpp"

#include <cmath>
#include <sstream>

#include "stirap/errors.hpp"

namespace stirap {

int atom_dim(AtomKind kind) {
    return kind == AtomKind::TwoLevel ? 2 : 3;
}

int excited_level(AtomKind kind) {
    return kind == AtomKind::TwoGroundLevels ? 2 : 1;
}

int level_excitation(AtomKind kind, int level) {
    return level == excited_level(kind) ? 1 : 0;
}

const char* level_name(AtomKind kind, int level) {
    switch (kind) {
    case AtomKind::TwoLevel: {
        static const char* names[] = {"-", "+"};
        return names[level];
    }
    case AtomKind::WithSpectator: {
        static const char* names[] = {"-", "+", "q"};
        return names[level];
    }
    case AtomKind::TwoGroundLevels: {
        static const char* names[] = {"I", "II", "+"};
        return names[level];
    }
    }
    return "?";
}

ProductBasis::ProductBasis(std::vector<ModeSpace> modes, std::vector<AtomKind> atoms)
    : modes_(std::move(modes)), atoms_(std::move(atoms)) {
    for (const auto& m : modes_) {
        if (m.n_max < 0)
            throw std::invalid_argument("ProductBasis: n_max must be >= 0");
        dims_.push_back(m.dim());
    }
    for (const auto& a : atoms_)
        dims_.push_back(atom_dim(a));
    if (dims_.empty())
        throw std::invalid_argument("ProductBasis: empty basis");
    dim_ = 1;
    strides_.resize(dims_.size());
    for (size_t f = 0; f < dims_.size(); ++f) {
        strides_[f] = dim_;
        dim_ *= dims_[f];
    }
}

Index ProductBasis::index_of(std::span<const int> label) const {
    if (label.size() != dims_.size())
        throw std::invalid_argument("index_of: label length mismatch");
    Index idx = 0;
    for (size_t f = 0; f < dims_.size(); ++f) {
        if (label[f] < 0 || label[f] >= dims_[f])
            throw std::invalid_argument("index_of: label digit out of range");
        idx += strides_[f] * label[f];
    }
    return idx;
}

std::vector<int> ProductBasis::label_of(Index index) const {
    std::vector<int> out(dims_.size());
    for (size_t f = 0; f < dims_.size(); ++f) {
        out[f] = static_cast<int>(index % dims_[f]);
        index /= dims_[f];
    }
    return out;
}

int ProductBasis::digit(Index index, int factor) const {
    return static_cast<int>((index / strides_[static_cast<size_t>(factor)]) %
                            dims_[static_cast<size_t>(factor)]);
}

std::string ProductBasis::label_string(Index index) const {
    std::ostringstream out;
    const auto label = label_of(index);
    for (int f = 0; f < factor_count(); ++f) {
        if (f > 0)
            out << '.';
        if (f < mode_count())
            out << label[static_cast<size_t>(f)];
        else
            out << level_name(atoms_[static_cast<size_t>(f - mode_count())],
                              label[static_cast<size_t>(f)]);
    }
    return out.str();
}

Index ProductBasis::parse_label(const std::string& text) const {
    std::vector<int> label;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, '.')) {
        const int f = static_cast<int>(label.size());
        if (f >= factor_count())
            throw std::invalid_argument("parse_label: too many fields in '" + text + "'");
        if (f < mode_count()) {
            label.push_back(std::stoi(part));
        } else {
            const AtomKind kind = atoms_[static_cast<size_t>(f - mode_count())];
            int level = -1;
            for (int l = 0; l < atom_dim(kind); ++l)
                if (part == level_name(kind, l))
                    level = l;
            if (level < 0)
                throw std::invalid_argument("parse_label: unknown level '" + part + "'");
            label.push_back(level);
        }
    }
    if (static_cast<int>(label.size()) != factor_count())
        throw std::invalid_argument("parse_label: too few fields in '" + text + "'");
    return index_of(label);
}

int ProductBasis::excitation(Index index) const {
    int n = 0;
    for (int m = 0; m < mode_count(); ++m)
        n += digit(index, m);
    for (int a = 0; a < atom_count(); ++a)
        n += level_excitation(atoms_[static_cast<size_t>(a)], digit(index, mode_count() + a));
    return n;
}

bool ProductBasis::same_shape(const ProductBasis& other) const {
    return dims_ == other.dims_ && atoms_ == other.atoms_;
}

SparseRd mode_lowering(const ProductBasis& basis, int mode) {
    if (mode < 0 || mode >= basis.mode_count())
        throw std::invalid_argument("mode_lowering: mode index out of range");
    const Index stride = basis.factor_stride(mode);
    const int d = basis.factor_dim(mode);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(basis.dim() / d * (d - 1)));
    for (Index idx = 0; idx < basis.dim(); ++idx) {
        const int n = basis.digit(idx, mode);
        if (n > 0)
            trips.emplace_back(idx - stride, idx, std::sqrt(static_cast<double>(n)));
    }
    SparseRd op(basis.dim(), basis.dim());
    op.setFromTriplets(trips.begin(), trips.end());
    return op;
}

CoherentState coherent_state(Complex alpha, const ModeSpace& space, double tail_tol) {
    const int d = space.dim();
    VectorXc amps(d);
    amps[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < d; ++n)
        amps[n] = amps[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    const double kept = amps.squaredNorm();
    const double tail = std::max(0.0, 1.0 - kept);
    if (tail > tail_tol)
        throw TruncationError("coherent_state: Poisson tail " + std::to_string(tail) +
                              " exceeds tolerance at n_max=" + std::to_string(space.n_max));
    amps /= std::sqrt(kept);
    return {std::move(amps), tail};
}

Complex inner_product(const StateVector& a, const StateVector& b) {
    if (!a.basis || !b.basis || !a.basis->same_shape(*b.basis))
        throw std::invalid_argument("inner_product: basis mismatch");
    return a.amps.dot(b.amps); // Eigen dot conjugates the left factor
}

namespace {

// y <- (U x) applied on one tensor factor.
void apply_factor_matrix(const ProductBasis& basis, int factor, const MatrixXc& U,
                         const VectorXc& x, VectorXc& y) {
    const Index stride = basis.factor_stride(factor);
    const int d = basis.factor_dim(factor);
    y.resize(x.size());
    VectorXc in(d), out(d);
    for (Index blk = 0; blk < basis.dim(); blk += stride * d) {
        for (Index off = 0; off < stride; ++off) {
            for (int m = 0; m < d; ++m)
                in[m] = x[blk + off + stride * m];
            out.noalias() = U * in;
            for (int m = 0; m < d; ++m)
                y[blk + off + stride * m] = out[m];
        }
    }
}

// y <- (U x) on a pair of factors; U indexed by (m_i + d_i * m_j).
void apply_pair_matrix(const ProductBasis& basis, int fi, int fj, const MatrixXc& U,
                       const VectorXc& x, VectorXc& y) {
    const Index si = basis.factor_stride(fi), sj = basis.factor_stride(fj);
    const int di = basis.factor_dim(fi), dj = basis.factor_dim(fj);
    const int dpair = di * dj;
    y.resize(x.size());
    std::vector<char> visited(static_cast<size_t>(basis.dim()), 0);
    VectorXc in(dpair), out(dpair);
    for (Index base = 0; base < basis.dim(); ++base) {
        if (visited[static_cast<size_t>(base)])
            continue;
        if (basis.digit(base, fi) != 0 || basis.digit(base, fj) != 0)
            continue;
        for (int mi = 0; mi < di; ++mi)
            for (int mj = 0; mj < dj; ++mj) {
                const Index idx = base + si * mi + sj * mj;
                in[mi + di * mj] = x[idx];
                visited[static_cast<size_t>(idx)] = 1;
            }
        out.noalias() = U * in;
        for (int mi = 0; mi < di; ++mi)
            for (int mj = 0; mj < dj; ++mj)
                y[base + si * mi + sj * mj] = out[mi + di * mj];
    }
}

// exp(G) for anti-Hermitian G via eigendecomposition of iG.
MatrixXc exp_antihermitian(const MatrixXc& G) {
    const MatrixXc K = Complex(0, 1) * G;
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(K);
    const VectorXc phases =
        (Complex(0, -1) * es.eigenvalues().cast<Complex>().array()).exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

MatrixXc single_mode_lowering(int d) {
    MatrixXc a = MatrixXc::Zero(d, d);
    for (int n = 1; n < d; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

} // namespace

StateVector displace(const StateVector& state, int mode, Complex beta, double tail_tol) {
    const ProductBasis& basis = *state.basis;
    if (mode < 0 || mode >= basis.mode_count())
        throw std::invalid_argument("displace: mode index out of range");
    const int d = basis.factor_dim(mode);
    const MatrixXc a = single_mode_lowering(d);
    const MatrixXc G = beta * a.adjoint() - std::conj(beta) * a;
    StateVector out{state.basis, {}};
    apply_factor_matrix(basis, mode, exp_antihermitian(G), state.amps, out.amps);
    const double top = top_level_population(out, mode);
    if (top > tail_tol)
        throw TruncationError("displace: top-level population " + std::to_string(top) +
                              " exceeds tolerance; raise n_max");
    return out;
}

StateVector beam_splitter(const StateVector& state, int mode_i, int mode_j, double theta) {
    const ProductBasis& basis = *state.basis;
    if (mode_i == mode_j || mode_i < 0 || mode_j < 0 || mode_i >= basis.mode_count() ||
        mode_j >= basis.mode_count())
        throw std::invalid_argument("beam_splitter: bad mode pair");
    const int di = basis.factor_dim(mode_i), dj = basis.factor_dim(mode_j);
    if (di != dj)
        throw std::invalid_argument("beam_splitter: mismatched cutoffs");
    const MatrixXc a = single_mode_lowering(di);
    // pair index (m_i + d_i*m_j): a_i acts on the fast factor, a_j on the slow
    MatrixXc Ai = MatrixXc::Zero(di * dj, di * dj), Aj = Ai;
    for (int mj = 0; mj < dj; ++mj)
        for (int r = 0; r < di; ++r)
            for (int c = 0; c < di; ++c) {
                if (a(r, c) != 0.0)
                    Ai(r + di * mj, c + di * mj) = a(r, c);
            }
    for (int mi = 0; mi < di; ++mi)
        for (int r = 0; r < dj; ++r)
            for (int c = 0; c < dj; ++c) {
                if (a(r, c) != 0.0)
                    Aj(mi + di * r, mi + di * c) = a(r, c);
            }
    const MatrixXc G = theta * (Ai * Aj.adjoint() - Ai.adjoint() * Aj);
    StateVector out{state.basis, {}};
    apply_pair_matrix(basis, mode_i, mode_j, exp_antihermitian(G), state.amps, out.amps);
    return out;
}

StateVector product_state(BasisPtr basis, const std::vector<VectorXc>& mode_amps,
                          const std::vector<VectorXc>& atom_amps) {
    const ProductBasis& b = *basis;
    if (static_cast<int>(mode_amps.size()) != b.mode_count() ||
        static_cast<int>(atom_amps.size()) != b.atom_count())
        throw std::invalid_argument("product_state: factor count mismatch");
    std::vector<const VectorXc*> factors;
    for (const auto& v : mode_amps)
        factors.push_back(&v);
    for (const auto& v : atom_amps)
        factors.push_back(&v);
    for (int f = 0; f < b.factor_count(); ++f)
        if (factors[static_cast<size_t>(f)]->size() != b.factor_dim(f))
            throw std::invalid_argument("product_state: factor dimension mismatch");
    StateVector out{std::move(basis), VectorXc(b.dim())};
    for (Index idx = 0; idx < b.dim(); ++idx) {
        Complex c = 1.0;
        for (int f = 0; f < b.factor_count(); ++f)
            c *= (*factors[static_cast<size_t>(f)])[b.digit(idx, f)];
        out.amps[idx] = c;
    }
    return out;
}

VectorXc fock_amplitudes(int n, const ModeSpace& space) {
    if (n < 0 || n > space.n_max)
        throw TruncationError("fock_amplitudes: n exceeds n_max");
    VectorXc v = VectorXc::Zero(space.dim());
    v[n] = 1.0;
    return v;
}

VectorXc level_amplitudes(int level, int dim) {
    VectorXc v = VectorXc::Zero(dim);
    v[level] = 1.0;
    return v;
}

Eigen::VectorXd mode_number_expectations(const StateVector& state) {
    const ProductBasis& b = *state.basis;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(b.mode_count());
    for (Index idx = 0; idx < b.dim(); ++idx) {
        const double p = std::norm(state.amps[idx]);
        if (p == 0.0)
            continue;
        for (int m = 0; m < b.mode_count(); ++m)
            out[m] += p * b.digit(idx, m);
    }
    return out;
}

double top_level_population(const StateVector& state, int mode) {
    const ProductBasis& b = *state.basis;
    const int top = b.factor_dim(mode) - 1;
    double p = 0.0;
    for (Index idx = 0; idx < b.dim(); ++idx)
        if (b.digit(idx, mode) == top)
            p += std::norm(state.amps[idx]);
    return p;
}

} // namespace stirap
