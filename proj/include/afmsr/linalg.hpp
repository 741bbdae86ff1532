#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace afmsr {

using cplx = std::complex<double>;

class CVector;

/// Dense complex matrix, row-major storage.
class CMatrix {
public:
    CMatrix() = default;
    /// Zero-filled rows x cols matrix. Both dimensions must be >= 1.
    CMatrix(std::size_t rows, std::size_t cols);
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<const double> d);
    static CMatrix diagonal(const CVector& d);
    /// v * v^H
    static CMatrix outer(const CVector& v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const cplx> entries() const noexcept { return data_; }
    CVector column(std::size_t c) const;

    bool all_finite() const noexcept;
    /// Maximum absolute row sum.
    double norm_inf() const noexcept;
    double norm_frobenius() const noexcept;

    CMatrix& operator+=(const CMatrix& other);
    CMatrix& operator-=(const CMatrix& other);
    CMatrix& operator*=(cplx s);

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

class CVector {
public:
    CVector() = default;
    explicit CVector(std::size_t n);
    explicit CVector(std::vector<cplx> entries);
    CVector(std::initializer_list<cplx> entries);

    static CVector ones(std::size_t n);
    static CVector unit(std::size_t n, std::size_t k);

    std::size_t size() const noexcept { return data_.size(); }
    cplx& operator[](std::size_t k) { return data_[k]; }
    const cplx& operator[](std::size_t k) const { return data_[k]; }
    std::span<const cplx> entries() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool all_finite() const noexcept;
    double norm() const noexcept;
    double squared_norm() const noexcept;
    double norm_inf() const noexcept;

    CVector& operator+=(const CVector& other);
    CVector& operator-=(const CVector& other);
    CVector& operator*=(cplx s);

    friend bool operator==(const CVector&, const CVector&) = default;

private:
    std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix m);
CVector operator+(CVector a, const CVector& b);
CVector operator-(CVector a, const CVector& b);
CVector operator*(cplx s, CVector v);

/// n x 1 matrix holding v.
CMatrix as_column(const CVector& v);
/// Conjugate transpose.
CMatrix hermitian(const CMatrix& m);
/// Entry-wise complex conjugate.
CMatrix conjugate(const CMatrix& m);
CVector conjugate(const CVector& v);

/// Throws std::invalid_argument with both shapes when a.cols() != b.rows().
CMatrix matmul(const CMatrix& a, const CMatrix& b);
CVector matvec(const CMatrix& a, const CVector& x);
inline CMatrix operator*(const CMatrix& a, const CMatrix& b) { return matmul(a, b); }
inline CVector operator*(const CMatrix& a, const CVector& x) { return matvec(a, x); }

/// x^H y
cplx inner(const CVector& x, const CVector& y);
/// x^H M x, complex so callers can inspect the imaginary residue.
cplx quadratic_form(const CVector& x, const CMatrix& m);

/// Max-abs entry of m - m^H.
double hermitian_defect(const CMatrix& m);
/// (m + m^H) / 2
CMatrix hermitian_part(const CMatrix& m);

/// Scales v to unit norm and rotates it so the first entry with magnitude
/// above 1e-12 is real and positive.
CVector canonical_phase(CVector v);

/// Cholesky factor Z = L L^H of a Hermitian positive definite matrix.
class Cholesky {
public:
    /// Throws std::invalid_argument when z is not Hermitian and
    /// std::domain_error when a pivot is not strictly positive.
    explicit Cholesky(const CMatrix& z);

    std::size_t dim() const noexcept { return lower_.rows(); }
    const CMatrix& lower() const noexcept { return lower_; }

    /// Z X = B
    CMatrix solve(const CMatrix& b) const;
    CVector solve(const CVector& b) const;
    /// L X = B
    CMatrix solve_lower(const CMatrix& b) const;
    /// L^H X = B
    CMatrix solve_upper(const CMatrix& b) const;

private:
    CMatrix lower_;
};

CMatrix solve_hermitian_pd(const CMatrix& z, const CMatrix& b);

struct EigenResult {
    double value = 0.0;
    CVector vector;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Full spectrum of a Hermitian matrix, eigenvalues in descending order.
/// Column k of `vectors` belongs to values[k].
struct HermitianEigen {
    std::vector<double> values;
    CMatrix vectors;
    std::size_t sweeps = 0;
};

/// Householder tridiagonalisation followed by implicit Wilkinson-shifted QR
/// sweeps. Throws std::runtime_error when the off-diagonal does not deflate
/// within max_sweeps (0 selects 100 * n).
HermitianEigen hermitian_eig(const CMatrix& h, std::size_t max_sweeps = 0);

/// Largest eigenpair of a Hermitian matrix via hermitian_eig. Ties go to the
/// lowest index in the tridiagonal ordering.
EigenResult dominant_eig_qr(const CMatrix& m);

using LinearOperator = std::function<CVector(const CVector&)>;

/// Power iteration from the normalised all-ones vector. Stops when the
/// relative change of the eigenvalue estimate drops below tol or the iterate
/// stops moving. On max_iter the last iterate is returned with
/// converged = false.
EigenResult dominant_eig_power(const LinearOperator& apply, std::size_t dim,
                               double tol = 1e-10, std::size_t max_iter = 1000);

enum class EigMethod { QR, Power };

/// Dominant eigenpair of Z^{-1} Phi for a Hermitian PSD phi and Hermitian PD z.
/// The product is never formed: the QR route whitens with the Cholesky
/// factor of z, the power route solves against it every step.
EigenResult generalized_dominant(const CMatrix& phi, const CMatrix& z, EigMethod method);

/// (w^H Phi w) / (w^H Z w)
double rayleigh_quotient(const CVector& w, const CMatrix& phi, const CMatrix& z);

}  // namespace afmsr
