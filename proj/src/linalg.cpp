#include "afmsr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace afmsr {

namespace {

std::string shape(const CMatrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

double hermitian_tolerance(const CMatrix& m) {
    return 1e-10 * std::max(1.0, m.norm_inf());
}

void require_square(const CMatrix& m, const char* what) {
    if (!m.square()) {
        throw std::invalid_argument(std::string(what) + ": expected a square matrix, got " + shape(m));
    }
}

void require_hermitian(const CMatrix& m, const char* what) {
    require_square(m, what);
    const double defect = hermitian_defect(m);
    if (!(defect <= hermitian_tolerance(m))) {
        std::ostringstream os;
        os << what << ": matrix is not Hermitian (max |m - m^H| = " << defect << ")";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// CMatrix / CVector

CMatrix::CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("CMatrix: dimensions must be positive, got " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
    }
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries) : CMatrix(rows, cols) {
    if (entries.size() != rows * cols) {
        throw std::invalid_argument("CMatrix: entry count " + std::to_string(entries.size()) + " does not match " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    }
    data_ = std::move(entries);
    if (!all_finite()) throw std::invalid_argument("CMatrix: non-finite entry");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("CMatrix: empty initializer");
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) throw std::invalid_argument("CMatrix: ragged initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
    if (!all_finite()) throw std::invalid_argument("CMatrix: non-finite entry");
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(std::span<const double> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t k = 0; k < d.size(); ++k) m(k, k) = d[k];
    return m;
}

CMatrix CMatrix::diagonal(const CVector& d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t k = 0; k < d.size(); ++k) m(k, k) = d[k];
    return m;
}

CMatrix CMatrix::outer(const CVector& v) {
    CMatrix m(v.size(), v.size());
    for (std::size_t r = 0; r < v.size(); ++r)
        for (std::size_t c = 0; c < v.size(); ++c) m(r, c) = v[r] * std::conj(v[c]);
    return m;
}

CVector CMatrix::column(std::size_t c) const {
    CVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

bool CMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double CMatrix::norm_inf() const noexcept {
    double best = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) sum += std::abs((*this)(r, c));
        best = std::max(best, sum);
    }
    return best;
}

double CMatrix::norm_frobenius() const noexcept {
    double sum = 0.0;
    for (const auto& z : data_) sum += std::norm(z);
    return std::sqrt(sum);
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("CMatrix +=: shape mismatch " + shape(*this) + " vs " + shape(other));
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("CMatrix -=: shape mismatch " + shape(*this) + " vs " + shape(other));
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
}

CVector::CVector(std::size_t n) : data_(n) {
    if (n == 0) throw std::invalid_argument("CVector: length must be positive");
}

CVector::CVector(std::vector<cplx> entries) : data_(std::move(entries)) {
    if (data_.empty()) throw std::invalid_argument("CVector: length must be positive");
    if (!all_finite()) throw std::invalid_argument("CVector: non-finite entry");
}

CVector::CVector(std::initializer_list<cplx> entries) : CVector(std::vector<cplx>(entries)) {}

CVector CVector::ones(std::size_t n) {
    CVector v(n);
    std::fill(v.data_.begin(), v.data_.end(), cplx(1.0));
    return v;
}

CVector CVector::unit(std::size_t n, std::size_t k) {
    CVector v(n);
    v.data_.at(k) = 1.0;
    return v;
}

bool CVector::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double CVector::squared_norm() const noexcept {
    double sum = 0.0;
    for (const auto& z : data_) sum += std::norm(z);
    return sum;
}

double CVector::norm() const noexcept { return std::sqrt(squared_norm()); }

double CVector::norm_inf() const noexcept {
    double best = 0.0;
    for (const auto& z : data_) best = std::max(best, std::abs(z));
    return best;
}

CVector& CVector::operator+=(const CVector& other) {
    if (size() != other.size()) throw std::invalid_argument("CVector +=: length mismatch");
    for (std::size_t k = 0; k < size(); ++k) data_[k] += other.data_[k];
    return *this;
}

CVector& CVector::operator-=(const CVector& other) {
    if (size() != other.size()) throw std::invalid_argument("CVector -=: length mismatch");
    for (std::size_t k = 0; k < size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

CVector& CVector::operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix m) { return m *= s; }
CVector operator+(CVector a, const CVector& b) { return a += b; }
CVector operator-(CVector a, const CVector& b) { return a -= b; }
CVector operator*(cplx s, CVector v) { return v *= s; }

// ---------------------------------------------------------------------------
// Basic algebra

CMatrix as_column(const CVector& v) { return CMatrix(v.size(), 1, std::vector<cplx>(v.begin(), v.end())); }

CMatrix hermitian(const CMatrix& m) {
    CMatrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = std::conj(m(r, c));
    return out;
}

CMatrix conjugate(const CMatrix& m) {
    CMatrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = std::conj(m(r, c));
    return out;
}

CVector conjugate(const CVector& v) {
    CVector out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::conj(v[k]);
    return out;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions differ (" + shape(a) + " * " + shape(b) + ")");
    }
    CMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx lhs = a(r, k);
            if (lhs == cplx(0.0)) continue;
            for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += lhs * b(k, c);
        }
    }
    return out;
}

CVector matvec(const CMatrix& a, const CVector& x) {
    if (a.cols() != x.size()) {
        throw std::invalid_argument("matvec: " + shape(a) + " times vector of length " + std::to_string(x.size()));
    }
    CVector out(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        cplx sum = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) sum += a(r, c) * x[c];
        out[r] = sum;
    }
    return out;
}

cplx inner(const CVector& x, const CVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("inner: length mismatch");
    cplx sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) sum += std::conj(x[k]) * y[k];
    return sum;
}

cplx quadratic_form(const CVector& x, const CMatrix& m) { return inner(x, matvec(m, x)); }

double hermitian_defect(const CMatrix& m) {
    if (!m.square()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = r; c < m.cols(); ++c) worst = std::max(worst, std::abs(m(r, c) - std::conj(m(c, r))));
    return worst;
}

CMatrix hermitian_part(const CMatrix& m) {
    require_square(m, "hermitian_part");
    CMatrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out(r, r) = m(r, r).real();
        for (std::size_t c = r + 1; c < m.cols(); ++c) {
            out(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));
            out(c, r) = std::conj(out(r, c));
        }
    }
    return out;
}

CVector canonical_phase(CVector v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw std::domain_error("canonical_phase: zero vector");
    v *= 1.0 / n;
    for (const auto& z : v) {
        if (std::abs(z) > 1e-12) {
            const cplx rot = std::conj(z) / std::abs(z);
            v *= rot;
            break;
        }
    }
    // The pivot entry is real by construction; drop the rounding residue.
    for (auto& z : v) {
        if (std::abs(z) > 1e-12) {
            z = z.real();
            break;
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Cholesky

Cholesky::Cholesky(const CMatrix& z) {
    require_hermitian(z, "Cholesky");
    const std::size_t n = z.rows();
    lower_ = CMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = z(j, j).real();
        for (std::size_t k = 0; k < j; ++k) pivot -= std::norm(lower_(j, k));
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            std::ostringstream os;
            os << "Cholesky: matrix is not positive definite (pivot " << j << " = " << pivot << ")";
            throw std::domain_error(os.str());
        }
        const double ljj = std::sqrt(pivot);
        lower_(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx sum = z(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= lower_(i, k) * std::conj(lower_(j, k));
            lower_(i, j) = sum / ljj;
        }
    }
}

CMatrix Cholesky::solve_lower(const CMatrix& b) const {
    const std::size_t n = dim();
    if (b.rows() != n) throw std::invalid_argument("Cholesky::solve: rhs has " + shape(b) + ", factor is " + shape(lower_));
    CMatrix x = b;
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            cplx sum = x(i, c);
            for (std::size_t k = 0; k < i; ++k) sum -= lower_(i, k) * x(k, c);
            x(i, c) = sum / lower_(i, i);
        }
    }
    return x;
}

CMatrix Cholesky::solve_upper(const CMatrix& b) const {
    const std::size_t n = dim();
    if (b.rows() != n) throw std::invalid_argument("Cholesky::solve: rhs has " + shape(b) + ", factor is " + shape(lower_));
    CMatrix x = b;
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t ii = n; ii-- > 0;) {
            cplx sum = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) sum -= std::conj(lower_(k, ii)) * x(k, c);
            x(ii, c) = sum / lower_(ii, ii);
        }
    }
    return x;
}

CMatrix Cholesky::solve(const CMatrix& b) const { return solve_upper(solve_lower(b)); }

CVector Cholesky::solve(const CVector& b) const {
    return solve(as_column(b)).column(0);
}

CMatrix solve_hermitian_pd(const CMatrix& z, const CMatrix& b) { return Cholesky(z).solve(b); }

// ---------------------------------------------------------------------------
// Hermitian eigensolver

namespace {

// Reduces h to Hermitian tridiagonal form in place with Householder
// reflections and returns the accumulated unitary Q (h_in = Q T Q^H).
CMatrix householder_tridiagonalize(CMatrix& a) {
    const std::size_t n = a.rows();
    CMatrix q = CMatrix::identity(n);
    if (n < 3) return q;

    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t len = n - k - 1;
        std::vector<cplx> v(len);
        double xnorm2 = 0.0;
        for (std::size_t t = 0; t < len; ++t) {
            v[t] = a(k + 1 + t, k);
            xnorm2 += std::norm(v[t]);
        }
        double tail2 = xnorm2 - std::norm(v[0]);
        if (tail2 <= std::numeric_limits<double>::min()) continue;

        const double xnorm = std::sqrt(xnorm2);
        const cplx phase = std::abs(v[0]) > 0.0 ? v[0] / std::abs(v[0]) : cplx(1.0);
        const cplx alpha = -phase * xnorm;
        v[0] -= alpha;
        double vv = 0.0;
        for (const auto& z : v) vv += std::norm(z);
        const double beta = 2.0 / vv;

        // a <- H a, rows k+1..n-1
        for (std::size_t c = 0; c < n; ++c) {
            cplx s = 0.0;
            for (std::size_t t = 0; t < len; ++t) s += std::conj(v[t]) * a(k + 1 + t, c);
            s *= beta;
            for (std::size_t t = 0; t < len; ++t) a(k + 1 + t, c) -= v[t] * s;
        }
        // a <- a H and q <- q H, columns k+1..n-1
        for (std::size_t r = 0; r < n; ++r) {
            cplx s = 0.0;
            cplx sq = 0.0;
            for (std::size_t t = 0; t < len; ++t) {
                s += a(r, k + 1 + t) * v[t];
                sq += q(r, k + 1 + t) * v[t];
            }
            s *= beta;
            sq *= beta;
            for (std::size_t t = 0; t < len; ++t) {
                a(r, k + 1 + t) -= s * std::conj(v[t]);
                q(r, k + 1 + t) -= sq * std::conj(v[t]);
            }
        }
    }
    return q;
}

// Implicit QL with Wilkinson-style shifts on a real symmetric tridiagonal
// matrix. Rotations are applied to the columns of z. Returns the number of
// sweeps used.
std::size_t tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, CMatrix& z, std::size_t max_sweeps) {
    const std::size_t n = d.size();
    const double eps = std::numeric_limits<double>::epsilon();
    std::size_t sweeps = 0;

    for (std::size_t l = 0; l < n; ++l) {
        std::size_t mm = l;
        do {
            for (mm = l; mm + 1 < n; ++mm) {
                const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= eps * dd) break;
            }
            if (mm == l) break;
            if (++sweeps > max_sweeps) {
                std::ostringstream os;
                os << "hermitian_eig: no convergence after " << max_sweeps << " sweeps (residual off-diagonal "
                   << std::abs(e[l]) << ")";
                throw std::runtime_error(os.str());
            }

            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            bool underflow = false;
            for (std::size_t i = mm; i-- > l;) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for (std::size_t k = 0; k < z.rows(); ++k) {
                    const cplx zi1 = z(k, i + 1);
                    const cplx zi = z(k, i);
                    z(k, i + 1) = s * zi + c * zi1;
                    z(k, i) = c * zi - s * zi1;
                }
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        } while (mm != l);
    }
    return sweeps;
}

}  // namespace

HermitianEigen hermitian_eig(const CMatrix& h, std::size_t max_sweeps) {
    require_hermitian(h, "hermitian_eig");
    if (!h.all_finite()) throw std::invalid_argument("hermitian_eig: non-finite entry");
    const std::size_t n = h.rows();
    if (max_sweeps == 0) max_sweeps = 100 * n;

    CMatrix a = hermitian_part(h);
    CMatrix q = householder_tridiagonalize(a);

    // Rotate the complex off-diagonal onto the positive real axis.
    std::vector<double> d(n);
    std::vector<double> e(n, 0.0);
    cplx p = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = a(j, j).real();
        if (j > 0) {
            for (std::size_t r = 0; r < n; ++r) q(r, j) *= p;
        }
        if (j + 1 < n) {
            const cplx off = a(j + 1, j);
            const double mag = std::abs(off);
            e[j] = mag;
            if (mag > 0.0) p *= off / mag;
        }
    }

    const std::size_t sweeps = tridiagonal_ql(d, e, q, max_sweeps);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });

    HermitianEigen out;
    out.sweeps = sweeps;
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = d[order[k]];
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = q(r, order[k]);
    }
    return out;
}

EigenResult dominant_eig_qr(const CMatrix& m) {
    const HermitianEigen eig = hermitian_eig(m);
    EigenResult result;
    result.value = eig.values.front();
    result.vector = canonical_phase(eig.vectors.column(0));
    result.iterations = eig.sweeps;
    result.converged = true;
    return result;
}

EigenResult dominant_eig_power(const LinearOperator& apply, std::size_t dim, double tol, std::size_t max_iter) {
    if (dim == 0) throw std::invalid_argument("dominant_eig_power: dimension must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("dominant_eig_power: tolerance must be positive");
    if (max_iter == 0) throw std::invalid_argument("dominant_eig_power: max_iter must be positive");

    CVector v = CVector::ones(dim);
    v *= 1.0 / std::sqrt(static_cast<double>(dim));

    EigenResult result;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t it = 1; it <= max_iter; ++it) {
        const CVector y = apply(v);
        if (y.size() != dim) throw std::invalid_argument("dominant_eig_power: operator changed the dimension");
        const double estimate = inner(v, y).real();
        result.iterations = it;

        const double ny = y.norm();
        if (!(ny > 0.0)) {
            // v lies in the null space; nothing better is reachable from here.
            result.value = 0.0;
            result.vector = canonical_phase(v);
            result.converged = true;
            return result;
        }
        CVector next = y;
        next *= 1.0 / ny;

        const cplx overlap = inner(v, next);
        const cplx align = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0);
        const double moved = (next - align * v).norm_inf();
        v = std::move(next);

        const bool settled = it > 1 && std::abs(estimate - previous) <= tol * std::max(std::abs(estimate), 1e-300);
        previous = estimate;
        if (settled || moved <= tol) {
            result.converged = true;
            break;
        }
    }

    result.vector = canonical_phase(v);
    result.value = inner(result.vector, apply(result.vector)).real();
    return result;
}

EigenResult generalized_dominant(const CMatrix& phi, const CMatrix& z, EigMethod method) {
    require_hermitian(phi, "generalized_dominant(phi)");
    if (phi.rows() != z.rows() || z.rows() != z.cols()) {
        throw std::invalid_argument("generalized_dominant: phi is " + shape(phi) + ", z is " + shape(z));
    }
    if (!phi.all_finite() || !z.all_finite()) throw std::invalid_argument("generalized_dominant: non-finite entry");
    const Cholesky chol(z);

    if (method == EigMethod::QR) {
        // L^{-1} Phi L^{-H}
        const CMatrix left = chol.solve_lower(phi);
        const CMatrix whitened = hermitian_part(hermitian(chol.solve_lower(hermitian(left))));
        const HermitianEigen eig = hermitian_eig(whitened);
        EigenResult result;
        result.value = eig.values.front();
        result.vector = canonical_phase(chol.solve_upper(as_column(eig.vectors.column(0))).column(0));
        result.iterations = eig.sweeps;
        result.converged = true;
        return result;
    }

    const auto apply = [&](const CVector& v) { return chol.solve(matvec(phi, v)); };
    EigenResult result = dominant_eig_power(apply, phi.rows());
    result.value = rayleigh_quotient(result.vector, phi, z);
    return result;
}

double rayleigh_quotient(const CVector& w, const CMatrix& phi, const CMatrix& z) {
    if (phi.rows() != w.size() || z.rows() != w.size() || !phi.square() || !z.square()) {
        throw std::invalid_argument("rayleigh_quotient: vector of length " + std::to_string(w.size()) +
                                    " against phi " + shape(phi) + " and z " + shape(z));
    }
    const double w2 = w.squared_norm();
    const cplx num = quadratic_form(w, phi);
    const cplx den = quadratic_form(w, z);

    const auto check = [&](const cplx& q, const CMatrix& m, const char* name) {
        const double scale = std::abs(q.real()) + m.norm_inf() * w2;
        if (std::abs(q.imag()) > 1e-10 * scale) {
            std::ostringstream os;
            os << "rayleigh_quotient: " << name << " form has imaginary part " << q.imag() << " (matrix not Hermitian?)";
            throw std::domain_error(os.str());
        }
    };
    check(num, phi, "numerator");
    check(den, z, "denominator");
    if (!(den.real() > 0.0)) throw std::domain_error("rayleigh_quotient: denominator w^H Z w is not positive");
    return num.real() / den.real();
}

}  // namespace afmsr
