#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "substoch/generators.hpp"
#include "substoch/substochastic.hpp"

using namespace substoch;
using oracle::q;

namespace {

Errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected substoch::Error");
    return Errc::IoError;
}

const Matrix<Rational> kChain{{q(1, 2), q(1, 4)}, {q(1, 3), q(1, 3)}};
const Matrix<Rational> kSwapHalf{{q(0), q(1, 2)}, {q(1, 2), q(0)}};
const Matrix<Rational> kSwap{{q(0), q(1)}, {q(1), q(0)}};

GenSpec spec_for(std::uint64_t seed, Index n)
{
    GenSpec s;
    s.n = n;
    s.seed = seed;
    s.density = q(3, 4);
    return s;
}

} // namespace

TEST_CASE("validate_substochastic certification paths", "[substochastic]")
{
    CHECK(validate_substochastic(kSwapHalf).certification() == Certification::RowSumStrict);
    CHECK(code_of([] { validate_substochastic(kSwap); }) == Errc::SpectralRadiusNotLessThanOne);

    try {
        validate_substochastic(Matrix<Rational>{{q(1, 2), q(-1, 4)}, {q(0), q(0)}});
        FAIL("expected NegativeEntry");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NegativeEntry);
        CHECK(e.row() == 1u);
        CHECK(e.col() == 2u);
    }
    try {
        validate_substochastic(Matrix<Rational>{{q(1, 2), q(1, 4)}, {q(3, 5), q(1, 2)}});
        FAIL("expected RowSumExceedsOne");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::RowSumExceedsOne);
        CHECK(e.row() == 2u);
    }

    // a row summing to one that still leaks through another state
    const Matrix<Rational> leaky{{q(0), q(1)}, {q(1, 2), q(0)}};
    CHECK(validate_substochastic(leaky).certification() == Certification::MMatrixCertified);
    // closed class {1} under row sum one
    const Matrix<Rational> trapped{{q(1), q(0)}, {q(1, 2), q(0)}};
    CHECK(code_of([&] { validate_substochastic(trapped); }) == Errc::SpectralRadiusNotLessThanOne);

    CHECK(code_of([] { validate_substochastic(Matrix<Rational>(2, 3)); }) == Errc::NotSquare);
    CHECK(validate_substochastic(convert<double>(kChain)).certification() == Certification::RowSumStrict);
}

TEST_CASE("spectral_radius_lt_one via leading minors of I - P", "[substochastic]")
{
    CHECK(spectral_radius_lt_one(Matrix<Rational>::zero(3)));
    CHECK_FALSE(spectral_radius_lt_one(kSwap));
    CHECK(spectral_radius_lt_one(kChain));
    CHECK(leading_principal_minors(Matrix<Rational>::identity(2) - kChain) == std::vector<Rational>{q(1, 2), q(1, 4)});
    CHECK(code_of([] { spectral_radius_lt_one(Matrix<Rational>{{q(-1)}}); }) == Errc::PreconditionViolated);
    CHECK(code_of([] { spectral_radius_lt_one(Matrix<Rational>{{q(3, 2)}}); }) == Errc::PreconditionViolated);
}

TEST_CASE("spectral_radius_estimate", "[substochastic]")
{
    CHECK(spectral_radius_estimate(Matrix<Rational>::zero(3), 50, 1) == 0.0);
    const Matrix<Rational> diag{{q(1, 2), q(0)}, {q(0), q(1, 4)}};
    CHECK(spectral_radius_estimate(diag, 200, 9) == Catch::Approx(0.5).margin(1e-9));
    // periodic matrix: plain power iteration would oscillate
    CHECK(spectral_radius_estimate(kSwapHalf, 200, 3) == Catch::Approx(0.5).margin(1e-9));
    CHECK(spectral_radius_estimate(kSwap, 200, 3) == Catch::Approx(1.0).margin(1e-9));
    CHECK(spectral_radius_estimate(kChain, 100, 5) == spectral_radius_estimate(kChain, 100, 5));
    CHECK(code_of([] { spectral_radius_estimate(Matrix<Rational>(2, 3), 10, 0); }) == Errc::NotSquare);
}

TEST_CASE("certified matrices have spectral estimate below one", "[substochastic][property]")
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto sp = gen_substochastic(spec_for(seed, 2 + seed % 7));
        CHECK(spectral_radius_lt_one(sp.matrix()));
        CHECK(spectral_radius_estimate(sp.matrix(), 500, seed) < 1.0 + 1e-6);
    }
}

TEST_CASE("det(I - P^T)", "[substochastic]")
{
    for (Index n = 1; n <= 5; ++n) {
        CHECK(det_I_minus_Pt_positive(validate_substochastic(Matrix<Rational>::zero(n))) == 1);
    }
    CHECK(det_I_minus_Pt_positive(validate_substochastic(kSwapHalf)) == q(3, 4));
    CHECK(det_I_minus_Pt_positive(validate_substochastic(kChain)) == q(1, 4));
    CHECK(det_I_minus_Pt_positive(validate_substochastic(convert<double>(kChain))) == Catch::Approx(0.25));
}

TEST_CASE("fundamental_matrix", "[substochastic]")
{
    const auto sp = validate_substochastic(kChain);
    CHECK(fundamental_matrix(sp, false) == Matrix<Rational>{{q(8, 3), q(1)}, {q(4, 3), q(2)}});
    CHECK(fundamental_matrix(sp, true) == Matrix<Rational>{{q(8, 3), q(4, 3)}, {q(1), q(2)}});
    CHECK(fundamental_matrix(validate_substochastic(Matrix<Rational>::zero(3)), true) == Matrix<Rational>::identity(3));
    CHECK(fundamental_matrix(validate_substochastic(kSwapHalf), false)
          == Matrix<Rational>{{q(4, 3), q(2, 3)}, {q(2, 3), q(4, 3)}});
}

TEST_CASE("fundamental matrices are nonnegative and transposes of each other", "[substochastic][property]")
{
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto sp = gen_substochastic(spec_for(seed + 500, 2 + seed % 6));
        const auto c = fundamental_matrix(sp, false);
        const auto ct = fundamental_matrix(sp, true);
        CHECK(ct == transpose(c));
        for (const Rational& x : c.entries()) {
            CHECK(sgn(x) >= 0);
        }
        CHECK(det_I_minus_Pt_positive(sp) > 0);
    }
}

TEST_CASE("check_diagonal_maximality", "[substochastic]")
{
    const auto rep = check_diagonal_maximality(validate_substochastic(kChain));
    CHECK(rep.holds);
    CHECK_FALSE(rep.witness.has_value());
    CHECK(rep.c(1, 1) == q(8, 3));
    CHECK(rep.c(1, 2) == q(4, 3));
    CHECK(rep.c(2, 2) == 2);
    CHECK(rep.c(2, 1) == 1);

    const auto zero = check_diagonal_maximality(validate_substochastic(Matrix<Rational>::zero(4)));
    CHECK(zero.holds);
    CHECK(zero.c == Matrix<Rational>::identity(4));

    // equality is allowed: P with identical rows gives ties in C
    const Matrix<Rational> ties{{q(1, 4), q(1, 4)}, {q(1, 4), q(1, 4)}};
    CHECK(check_diagonal_maximality(validate_substochastic(ties)).holds);

    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        const auto sp = gen_substochastic(spec_for(seed + 2000, 2 + seed % 7));
        const auto r = check_diagonal_maximality(sp);
        CHECK(r.holds);
        CHECK(r.holds == !r.witness.has_value());
    }
}

TEST_CASE("merge_rows_reduction", "[substochastic]")
{
    CHECK(merge_rows_reduction(kSwapHalf, 1) == Matrix<Rational>{{q(1, 2)}});
    CHECK(merge_rows_reduction(Matrix<Rational>::zero(3), 2) == Matrix<Rational>::zero(2));

    const Matrix<Rational> q3{{q(1, 5), q(0), q(1, 3)}, {q(1, 5), q(1, 2), q(1, 3)}, {q(1, 5), q(1, 4), q(0)}};
    // rows 2 and 3 merged, column 2 deleted
    CHECK(merge_rows_reduction(q3, 2) == Matrix<Rational>{{q(1, 5), q(1, 3)}, {q(2, 5), q(1, 3)}});

    CHECK(code_of([&] { merge_rows_reduction(q3, 3); }) == Errc::IndexOutOfRange);
    CHECK(code_of([&] { merge_rows_reduction(q3, 0); }) == Errc::IndexOutOfRange);
    CHECK(code_of([] { merge_rows_reduction(Matrix<Rational>{{q(0)}}, 1); }) == Errc::MatrixTooSmall);
    // row substochastic but not column substochastic
    const Matrix<Rational> rows_only{{q(1, 2), q(1, 2)}, {q(3, 4), q(0)}};
    CHECK(code_of([&] { merge_rows_reduction(rows_only, 1); }) == Errc::NotColumnSubstochastic);
}

TEST_CASE("merge reduction is column substochastic with det(I - reduced) >= 0", "[substochastic][property]")
{
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        const Index n = 2 + seed % 6;
        const auto qm = gen_column_substochastic(spec_for(seed + 4000, n));
        const auto a = Matrix<Rational>::identity(n) - qm;
        for (Index m = 1; m < n; ++m) {
            const auto red = merge_rows_reduction(qm, m);
            const Rational det = determinant(Matrix<Rational>::identity(n - 1) - red);
            CHECK(det >= 0);
            // the reduction realises M_mm + M_{m+1,m} of I - Q
            CHECK(det == minor(a, m, m) + minor(a, m + 1, m));
        }
    }
}

TEST_CASE("minor_sum_nonneg", "[substochastic]")
{
    const auto zero = validate_substochastic(Matrix<Rational>::zero(3));
    for (Index m = 1; m <= 3; ++m) {
        for (Index l = 1; l <= 3; ++l) {
            CHECK(minor_sum_nonneg(zero, m, l) == (m == l ? 0 : 1));
        }
    }
    CHECK(code_of([&] { minor_sum_nonneg(zero, 4, 1); }) == Errc::IndexOutOfRange);

    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const Index n = 2 + seed % 5;
        const auto sp = gen_substochastic(spec_for(seed + 6000, n));
        const auto a = Matrix<Rational>::identity(n) - transpose(sp.matrix());
        for (Index m = 1; m <= n; ++m) {
            for (Index l = 1; l <= n; ++l) {
                const Rational v = minor_sum_nonneg(sp, m, l);
                CHECK(v >= 0);
                if (m != l) {
                    const Rational sign = ((m + l) % 2 == 0) ? q(1) : q(-1);
                    CHECK(v == oracle::laplace_minor(a, m, m) - sign * oracle::laplace_minor(a, l, m));
                }
            }
        }
    }
}
