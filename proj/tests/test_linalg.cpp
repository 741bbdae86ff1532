#include "catch_amalgamated.hpp"

#include "afmsr/linalg.hpp"
#include "test_support.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace afmsr;
using afmsr::testing::alignment;
using afmsr::testing::max_abs_diff;
using afmsr::testing::random_hermitian;
using afmsr::testing::random_matrix;
using afmsr::testing::random_pd;
using afmsr::testing::random_psd;
using afmsr::testing::random_vector;
using Catch::Approx;

namespace {

const cplx I{0.0, 1.0};

CMatrix naive_product(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c) {
            cplx sum = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) sum += a(r, k) * b(k, c);
            out(r, c) = sum;
        }
    return out;
}

Eigen::MatrixXcd to_eigen(const CMatrix& m) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
    return out;
}

double residual(const CMatrix& h, const EigenResult& e) {
    CVector r = matvec(h, e.vector);
    r -= cplx(e.value) * e.vector;
    return r.norm();
}

}  // namespace

TEST_CASE("hermitian transpose") {
    CHECK(hermitian(CMatrix::identity(2)) == CMatrix::identity(2));
    CHECK(hermitian(CMatrix{{I}}) == CMatrix{{-I}});

    std::mt19937_64 rng(7);
    const CMatrix m = random_matrix(3, 2, rng);
    const CMatrix h = hermitian(m);
    REQUIRE(h.rows() == 2);
    REQUIRE(h.cols() == 3);
    CHECK(h(1, 2) == std::conj(m(2, 1)));
    CHECK(hermitian(h) == m);
}

TEST_CASE("matmul") {
    std::mt19937_64 rng(11);

    SECTION("identity and hand expansion") {
        const CMatrix m = random_matrix(3, 4, rng);
        CHECK(matmul(CMatrix::identity(3), m) == m);
        const CMatrix a{{1.0, I}, {0.0, 1.0}};
        const CMatrix b{{1.0}, {1.0}};
        CHECK(matmul(a, b) == CMatrix{{1.0 + I}, {1.0}});
    }

    SECTION("agrees with the triple-loop oracle") {
        for (int trial = 0; trial < 20; ++trial) {
            const CMatrix a = random_matrix(1 + trial % 5, 2 + trial % 3, rng);
            const CMatrix b = random_matrix(2 + trial % 3, 1 + trial % 4, rng);
            CHECK(max_abs_diff(matmul(a, b), naive_product(a, b)) <= 1e-13);
        }
    }

    SECTION("associativity") {
        for (int trial = 0; trial < 20; ++trial) {
            const CMatrix a = random_matrix(3, 4, rng);
            const CMatrix b = random_matrix(4, 2, rng);
            const CMatrix c = random_matrix(2, 5, rng);
            const double scale = a.norm_inf() * b.norm_inf() * c.norm_inf();
            CHECK(((a * b) * c - a * (b * c)).norm_inf() <= 1e-10 * scale);
        }
    }

    SECTION("shape mismatch names both shapes") {
        try {
            (void)matmul(CMatrix(2, 3), CMatrix(2, 3));
            FAIL("expected a throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("2x3 * 2x3") != std::string::npos);
        }
    }
}

TEST_CASE("matrix construction rejects bad shapes and values") {
    CHECK_THROWS_AS(CMatrix(0, 3), std::invalid_argument);
    CHECK_THROWS_AS(CMatrix(2, 2, std::vector<cplx>(3)), std::invalid_argument);
    CHECK_THROWS_AS(CMatrix(1, 1, {cplx(std::nan(""), 0.0)}), std::invalid_argument);
    CHECK_THROWS_AS(CVector(std::vector<cplx>{}), std::invalid_argument);
}

TEST_CASE("solve_hermitian_pd") {
    std::mt19937_64 rng(13);

    SECTION("identity and diagonal systems") {
        const CMatrix b = random_matrix(3, 2, rng);
        CHECK(max_abs_diff(solve_hermitian_pd(CMatrix::identity(3), b), b) <= 1e-15);
        const CMatrix z{{2.0, 0.0}, {0.0, 4.0}};
        const CMatrix x = solve_hermitian_pd(z, CMatrix{{2.0}, {4.0}});
        CHECK(max_abs_diff(x, CMatrix{{1.0}, {1.0}}) <= 1e-15);
    }

    SECTION("construct-then-solve recovers the planted solution") {
        for (std::size_t n = 1; n <= 6; ++n) {
            const CMatrix z = random_pd(n, rng);
            const CMatrix x0 = random_matrix(n, 3, rng);
            const CMatrix b = z * x0;
            const CMatrix x = solve_hermitian_pd(z, b);
            CHECK(max_abs_diff(x, x0) <= 1e-8);
            CHECK((z * x - b).norm_inf() <= 1e-9 * b.norm_inf());
        }
    }

    SECTION("errors") {
        CHECK_THROWS_AS(solve_hermitian_pd(CMatrix{{1.0, 1.0}, {0.0, 1.0}}, CMatrix(2, 1)), std::invalid_argument);
        try {
            (void)solve_hermitian_pd(CMatrix{{1.0, 2.0}, {2.0, 1.0}}, CMatrix(2, 1));
            FAIL("expected a throw");
        } catch (const std::domain_error& e) {
            CHECK(std::string(e.what()).find("pivot 1") != std::string::npos);
        }
    }
}

TEST_CASE("dominant_eig_qr") {
    SECTION("diagonal") {
        const CMatrix d{{3.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 2.0}};
        const EigenResult e = dominant_eig_qr(d);
        CHECK(e.value == Approx(3.0).margin(1e-14));
        CHECK(max_abs_diff(e.vector, CVector::unit(3, 0)) <= 1e-14);
        CHECK(e.converged);
    }

    SECTION("2x2 by characteristic polynomial") {
        const EigenResult e = dominant_eig_qr(CMatrix{{2.0, 1.0}, {1.0, 2.0}});
        CHECK(e.value == Approx(3.0).margin(1e-14));
        const double h = 1.0 / std::sqrt(2.0);
        CHECK(max_abs_diff(e.vector, CVector{h, h}) <= 1e-14);
    }

    SECTION("random Hermitian: residual, unit norm and phase convention") {
        std::mt19937_64 rng(17);
        for (std::size_t n = 1; n <= 9; ++n) {
            for (int trial = 0; trial < 5; ++trial) {
                const CMatrix h = random_hermitian(n, rng);
                const EigenResult e = dominant_eig_qr(h);
                CHECK(residual(h, e) <= 1e-9 * h.norm_inf());
                CHECK(std::abs(e.vector.norm() - 1.0) <= 1e-12);
                CHECK(e.vector[0].imag() == 0.0);
                CHECK(e.vector[0].real() > 0.0);
            }
        }
    }

    SECTION("full spectrum matches Eigen's self-adjoint solver") {
        std::mt19937_64 rng(19);
        for (std::size_t n = 2; n <= 8; ++n) {
            const CMatrix h = random_hermitian(n, rng);
            const HermitianEigen mine = hermitian_eig(h);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(to_eigen(h));
            for (std::size_t k = 0; k < n; ++k) {
                // Eigen sorts ascending.
                CHECK(mine.values[k] == Approx(ref.eigenvalues()(n - 1 - k)).margin(1e-10));
            }
            // Q is unitary.
            const CMatrix gram = hermitian(mine.vectors) * mine.vectors;
            CHECK(max_abs_diff(gram, CMatrix::identity(n)) <= 1e-12);
        }
    }

    SECTION("repeated dominant eigenvalue takes the lowest index") {
        const CMatrix d{{2.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 1.0}};
        const EigenResult e = dominant_eig_qr(d);
        CHECK(e.value == Approx(2.0));
        CHECK(max_abs_diff(e.vector, CVector::unit(3, 0)) <= 1e-14);
    }

    SECTION("identical input gives bitwise identical output") {
        std::mt19937_64 rng(23);
        const CMatrix h = random_hermitian(6, rng);
        const EigenResult a = dominant_eig_qr(h);
        const EigenResult b = dominant_eig_qr(h);
        CHECK(a.value == b.value);
        CHECK(a.vector == b.vector);
    }

    SECTION("rejects non-Hermitian input") {
        CHECK_THROWS_AS(dominant_eig_qr(CMatrix{{1.0, 2.0}, {0.0, 1.0}}), std::invalid_argument);
        CHECK_THROWS_AS(dominant_eig_qr(CMatrix(2, 3)), std::invalid_argument);
    }

    SECTION("sweep budget exhaustion is reported") {
        std::mt19937_64 rng(29);
        const CMatrix h = random_hermitian(6, rng);
        CHECK_THROWS_AS(hermitian_eig(h, 1), std::runtime_error);
    }
}

TEST_CASE("dominant_eig_power") {
    SECTION("diagonal operator") {
        const CMatrix d{{5.0, 0.0}, {0.0, 1.0}};
        const EigenResult e = dominant_eig_power([&](const CVector& v) { return d * v; }, 2);
        CHECK(e.converged);
        CHECK(e.value == Approx(5.0).epsilon(1e-10));
        CHECK(max_abs_diff(e.vector, CVector::unit(2, 0)) <= 1e-5);
    }

    SECTION("degenerate spectrum converges in one step") {
        const EigenResult e = dominant_eig_power([](const CVector& v) { return v; }, 4);
        CHECK(e.converged);
        CHECK(e.iterations == 1);
        CHECK(e.value == Approx(1.0).margin(1e-15));
    }

    SECTION("agrees with the QR path on gapped random PSD matrices") {
        std::mt19937_64 rng(31);
        int compared = 0;
        for (int trial = 0; trial < 30; ++trial) {
            const CMatrix h = random_psd(5, 5, rng);
            const HermitianEigen full = hermitian_eig(h);
            if (full.values[0] - full.values[1] < 1e-3 * full.values[0]) continue;
            const EigenResult qr = dominant_eig_qr(h);
            const EigenResult pw = dominant_eig_power([&](const CVector& v) { return h * v; }, 5, 1e-14, 100000);
            CHECK(pw.converged);
            CHECK(pw.value == Approx(qr.value).epsilon(1e-8));
            ++compared;
        }
        CHECK(compared > 20);
    }

    SECTION("iteration budget exhaustion returns the best iterate") {
        const CMatrix d{{1.0, 0.0}, {0.0, 0.999}};
        const EigenResult e = dominant_eig_power([&](const CVector& v) { return d * v; }, 2, 1e-15, 3);
        CHECK_FALSE(e.converged);
        CHECK(e.iterations == 3);
        CHECK(std::abs(e.vector.norm() - 1.0) <= 1e-12);
    }

    SECTION("argument validation") {
        const auto id = [](const CVector& v) { return v; };
        CHECK_THROWS_AS(dominant_eig_power(id, 0), std::invalid_argument);
        CHECK_THROWS_AS(dominant_eig_power(id, 2, 0.0), std::invalid_argument);
    }
}

TEST_CASE("generalized_dominant") {
    for (const EigMethod method : {EigMethod::QR, EigMethod::Power}) {
        CAPTURE(method == EigMethod::QR ? "QR" : "Power");

        SECTION("diagonal pencils") {
            const EigenResult a = generalized_dominant(CMatrix{{2.0, 0.0}, {0.0, 1.0}}, CMatrix::identity(2), method);
            CHECK(a.value == Approx(2.0).epsilon(1e-12));
            CHECK(max_abs_diff(a.vector, CVector::unit(2, 0)) <= 1e-6);

            const EigenResult b = generalized_dominant(CMatrix{{4.0, 0.0}, {0.0, 1.0}},
                                                       CMatrix{{2.0, 0.0}, {0.0, 1.0}}, method);
            CHECK(b.value == Approx(2.0).epsilon(1e-12));
            CHECK(max_abs_diff(b.vector, CVector::unit(2, 0)) <= 1e-6);
        }

        SECTION("value dominates random probes") {
            std::mt19937_64 rng(37);
            for (int trial = 0; trial < 5; ++trial) {
                const CMatrix phi = random_psd(4, 2, rng);
                const CMatrix z = random_pd(4, rng);
                const EigenResult e = generalized_dominant(phi, z, method);
                CHECK(rayleigh_quotient(e.vector, phi, z) == Approx(e.value).epsilon(1e-9));
                int violations = 0;
                for (int probe = 0; probe < 1000; ++probe) {
                    const CVector w = random_vector(4, rng);
                    if (rayleigh_quotient(w, phi, z) > e.value * (1.0 + 1e-9)) ++violations;
                }
                CHECK(violations == 0);
            }
        }
    }

    SECTION("QR and power agree on rank-one pencils") {
        std::mt19937_64 rng(41);
        for (int trial = 0; trial < 20; ++trial) {
            const CMatrix phi = random_psd(5, 1, rng);
            const CMatrix z = random_pd(5, rng);
            const EigenResult qr = generalized_dominant(phi, z, EigMethod::QR);
            const EigenResult pw = generalized_dominant(phi, z, EigMethod::Power);
            CHECK(pw.value == Approx(qr.value).epsilon(1e-10));
            CHECK(alignment(qr.vector, pw.vector) == Approx(1.0).epsilon(1e-10));
        }
    }

    SECTION("shape mismatch") {
        CHECK_THROWS_AS(generalized_dominant(CMatrix::identity(2), CMatrix::identity(3), EigMethod::QR),
                        std::invalid_argument);
    }
}

TEST_CASE("rayleigh_quotient") {
    CHECK(rayleigh_quotient(CVector::unit(2, 0), CMatrix{{2.0, 0.0}, {0.0, 1.0}}, CMatrix::identity(2)) == 2.0);

    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const CMatrix phi = random_psd(3, 2, rng);
        const CMatrix z = random_pd(3, rng);
        const CVector w = random_vector(3, rng);
        const double q = rayleigh_quotient(w, phi, z);

        cplx c(u(rng), u(rng));
        if (std::abs(c) < 1e-3) c = 1.0;
        CHECK(rayleigh_quotient(c * w, phi, z) == Approx(q).epsilon(1e-12));

        // Direct expansion of both quadratic forms.
        cplx num = 0.0;
        cplx den = 0.0;
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t k = 0; k < 3; ++k) {
                num += std::conj(w[r]) * phi(r, k) * w[k];
                den += std::conj(w[r]) * z(r, k) * w[k];
            }
        CHECK(q == Approx(num.real() / den.real()).epsilon(1e-13));
    }

    CHECK_THROWS_AS(rayleigh_quotient(CVector(2), CMatrix::identity(2), CMatrix::identity(2)), std::domain_error);
    CHECK_THROWS_AS(rayleigh_quotient(CVector(3), CMatrix::identity(2), CMatrix::identity(2)), std::invalid_argument);
}

TEST_CASE("canonical_phase") {
    const CVector v = canonical_phase(CVector{cplx(0.0, 0.0), cplx(0.0, 2.0), cplx(1.0, 1.0)});
    CHECK(v[1].imag() == 0.0);
    CHECK(v[1].real() > 0.0);
    CHECK(v.norm() == Approx(1.0));
    CHECK_THROWS_AS(canonical_phase(CVector(2)), std::domain_error);
}
