#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "ubmlab/tensor.hpp"

using namespace ubmlab;

namespace {

std::vector<ComplexMatrix> random_mats(std::size_t count, std::size_t dim, std::mt19937_64& gen) {
    std::vector<ComplexMatrix> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(oracle::random_matrix(dim, gen));
    return out;
}

}  // namespace

TEST(Permutation, RejectsNonBijection) {
    EXPECT_THROW(Permutation({0, 0, 1}), std::invalid_argument);
    EXPECT_THROW(Permutation({0, 3}), std::invalid_argument);
    EXPECT_THROW(Permutation(std::vector<std::size_t>{}), std::invalid_argument);
}

TEST(Permutation, CyclesPartitionAndRecompose) {
    for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto& s : Permutation::all(n)) {
            std::vector<bool> seen(n, false);
            for (const auto& c : s.cycles()) {
                for (auto v : c) {
                    EXPECT_FALSE(seen[v]);
                    seen[v] = true;
                }
            }
            EXPECT_EQ(Permutation::from_cycles(n, s.cycles()), s);
        }
    }
}

TEST(Permutation, GroupLaws) {
    const auto all = Permutation::all(4);
    EXPECT_EQ(all.size(), 24u);
    const auto e = Permutation::identity(4);
    for (const auto& a : all) {
        EXPECT_EQ(a * e, a);
        EXPECT_EQ(e * a, a);
        EXPECT_EQ(a * a.inverse(), e);
        for (const auto& b : all) {
            const auto& c = all[(a(0) * 7 + b(1) * 3) % all.size()];
            EXPECT_EQ((a * b) * c, a * (b * c));
            // (ab)(i) = a(b(i))
            for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ((a * b)(i), a(b(i)));
        }
    }
}

TEST(Permutation, FullCycleAndTransposition) {
    const auto c = Permutation::full_cycle(3);
    EXPECT_EQ(c.one_line(), (std::vector<std::size_t>{1, 2, 0}));
    EXPECT_EQ(c.cycle_count(), 1u);
    const auto t = Permutation::transposition(3, 0, 2);
    EXPECT_EQ(t.one_line(), (std::vector<std::size_t>{2, 1, 0}));
    EXPECT_EQ(t.to_string(), "(0 2)(1)");
    EXPECT_THROW(Permutation::transposition(3, 1, 1), std::invalid_argument);
}

TEST(TensorPower, MatchesEntrywiseDefinition) {
    std::mt19937_64 gen(1);
    for (std::size_t dim : {2u, 3u}) {
        for (std::size_t n : {1u, 2u, 3u}) {
            const ComplexMatrix m = oracle::random_matrix(dim, gen);
            const ComplexMatrix expect = oracle::kron_entries(std::vector<oracle::Matrix>(n, m));
            EXPECT_EQ(tensor_power(m, n), expect);
        }
    }
}

TEST(TensorPower, IdentityAndSingleFactor) {
    std::mt19937_64 gen(2);
    const ComplexMatrix m = oracle::random_matrix(3, gen);
    EXPECT_EQ(tensor_power(m, 1), m);
    EXPECT_EQ(tensor_power(identity(2), 3), identity(8));
}

TEST(TensorPower, Multiplicative) {
    std::mt19937_64 gen(3);
    const ComplexMatrix m = oracle::random_matrix(3, gen);
    const ComplexMatrix d = oracle::random_matrix(3, gen);
    const ComplexMatrix lhs = tensor_power(m * d, 3);
    const ComplexMatrix rhs = tensor_power(m, 3) * tensor_power(d, 3);
    EXPECT_LE((lhs - rhs).norm(), 1e-10 * (1.0 + lhs.norm()));
}

TEST(TensorPower, BudgetExceeded) {
    EXPECT_THROW(tensor_power(identity(4), 7), BudgetExceeded);
    EXPECT_THROW(tensor_dim(2, 13), BudgetExceeded);
    EXPECT_EQ(tensor_dim(2, 12), 4096u);
    EXPECT_THROW(tensor_dim(3, 3, TensorBudget{26}), BudgetExceeded);
    EXPECT_THROW(permutation_operator(Permutation::identity(7), 4), BudgetExceeded);
    EXPECT_THROW(transposition_sum(7, 4), BudgetExceeded);
}

TEST(PermutationOperator, MatchesOracleExactly) {
    for (std::size_t dim : {2u, 3u}) {
        for (std::size_t n = 1; n <= 3; ++n) {
            for (const auto& s : Permutation::all(n)) {
                EXPECT_EQ(permutation_operator(s, dim), oracle::permutation_matrix(s.one_line(), dim)) << s.to_string();
            }
        }
    }
}

TEST(PermutationOperator, SwapForN2) {
    const ComplexMatrix p = permutation_operator(Permutation::transposition(2, 0, 1), 2);
    ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
    expect(0, 0) = 1.0;
    expect(1, 2) = 1.0;
    expect(2, 1) = 1.0;
    expect(3, 3) = 1.0;
    EXPECT_EQ(p, expect);
}

TEST(PermutationOperator, HomomorphismExactForNUpTo4) {
    for (std::size_t dim : {2u, 3u}) {
        for (std::size_t n = 1; n <= 4; ++n) {
            const auto all = Permutation::all(n);
            for (std::size_t a = 0; a < all.size(); ++a) {
                for (std::size_t b = 0; b < all.size(); b += (n == 4 ? 5 : 1)) {
                    const ComplexMatrix lhs = permutation_operator(all[a] * all[b], dim);
                    const ComplexMatrix rhs = permutation_operator(all[a], dim) * permutation_operator(all[b], dim);
                    ASSERT_EQ(lhs, rhs);
                }
            }
        }
    }
}

TEST(PermutationOperator, TraceCountsCycles) {
    for (std::size_t dim : {2u, 3u}) {
        for (std::size_t n = 1; n <= 3; ++n) {
            for (const auto& s : Permutation::all(n)) {
                // Brute-force count of basis vectors fixed by [s].
                std::size_t fixed = 0;
                for (std::size_t i = 0; i < oracle::ipow(dim, n); ++i) fixed += permuted_index(s, dim, i) == i;
                EXPECT_EQ(fixed, oracle::ipow(dim, s.cycle_count()));
                EXPECT_EQ(permutation_operator(s, dim).trace().real(), static_cast<double>(fixed));
            }
        }
    }
}

TEST(PermutationOperator, ImplicitApplicationMatchesDense) {
    std::mt19937_64 gen(4);
    for (const auto& s : Permutation::all(3)) {
        const ComplexMatrix x = oracle::random_matrix(8, gen);
        const ComplexMatrix p = permutation_operator(s, 2);
        EXPECT_EQ(apply_permutation_left(s, 2, x), p * x);
        EXPECT_EQ(apply_permutation_right(x, s, 2), x * p);
    }
}

TEST(SchurWeyl, PermutationsCommuteWithTensorPowers) {
    std::mt19937_64 gen(5);
    for (std::size_t dim : {2u, 3u}) {
        for (std::size_t n = 2; n <= 3; ++n) {
            const ComplexMatrix m = oracle::random_matrix(dim, gen);
            const ComplexMatrix mp = tensor_power(m, n);
            for (const auto& s : Permutation::all(n)) {
                const ComplexMatrix p = permutation_operator(s, dim);
                EXPECT_LE((p * mp - mp * p).norm(), 1e-10 * mp.norm());
            }
        }
    }
}

TEST(TraceCycleProduct, AgreesWithExplicitTensorTrace) {
    std::mt19937_64 gen(6);
    for (std::size_t dim : {2u, 3u}) {
        for (std::size_t n = 1; n <= 3; ++n) {
            for (const auto& s : Permutation::all(n)) {
                const auto mats = random_mats(n, dim, gen);
                const Complex brute = (oracle::permutation_matrix(s.one_line(), dim) * oracle::kron_entries(mats)).trace();
                const Complex fast = trace_cycle_product(s, mats);
                EXPECT_LE(std::abs(fast - brute), 1e-10 * std::max(1.0, std::abs(brute))) << s.to_string();
            }
        }
    }
}

TEST(TraceCycleProduct, SpecialCases) {
    std::mt19937_64 gen(7);
    const auto mats = random_mats(3, 3, gen);
    Complex prod = 1.0;
    for (const auto& m : mats) prod *= m.trace();
    EXPECT_LE(std::abs(trace_cycle_product(Permutation::identity(3), mats) - prod), 1e-12 * std::abs(prod));

    const std::vector<ComplexMatrix> same(3, mats[0]);
    const Complex cube = (mats[0] * mats[0] * mats[0]).trace();
    EXPECT_LE(std::abs(trace_cycle_product(Permutation::full_cycle(3), same) - cube), 1e-12 * std::abs(cube));

    const std::vector<ComplexMatrix> two{mats[0], mats[1]};
    const Complex swap = (mats[1] * mats[0]).trace();
    EXPECT_LE(std::abs(trace_cycle_product(Permutation::transposition(2, 0, 1), two) - swap), 1e-12 * std::abs(swap));
}

TEST(TraceCycleProduct, SizeMismatch) {
    const std::vector<ComplexMatrix> two{identity(2), identity(2)};
    EXPECT_THROW(trace_cycle_product(Permutation::identity(3), two), std::invalid_argument);
    const std::vector<ComplexMatrix> mixed{identity(2), identity(3)};
    EXPECT_THROW(trace_cycle_product(Permutation::identity(2), mixed), std::invalid_argument);
}

TEST(MatrixUnitContraction, EqualsTraceTimesIdentity) {
    std::mt19937_64 gen(8);
    for (std::size_t dim = 1; dim <= 8; ++dim) {
        const ComplexMatrix m = oracle::random_matrix(dim, gen);
        const ComplexMatrix c = matrix_unit_contraction(m);
        EXPECT_LE((c - m.trace() * identity(dim)).norm(), 1e-12 * (1.0 + std::abs(m.trace())));
        EXPECT_LE((c - oracle::unit_sandwich(m)).norm(), 1e-12 * (1.0 + c.norm()));
    }
    EXPECT_EQ(matrix_unit_contraction(identity(3)), 3.0 * identity(3));
    ComplexMatrix traceless = ComplexMatrix::Zero(2, 2);
    traceless(0, 0) = 1.0;
    traceless(1, 1) = -1.0;
    traceless(0, 1) = Complex(0.0, 2.0);
    EXPECT_EQ(matrix_unit_contraction(traceless), ComplexMatrix::Zero(2, 2));
}

TEST(TranspositionSum, StructureAndTrace) {
    EXPECT_EQ(transposition_sum(2, 3), permutation_operator(Permutation::transposition(2, 0, 1), 3));
    for (std::size_t dim : {2u, 3u}) {
        for (std::size_t n = 2; n <= 4; ++n) {
            const ComplexMatrix t = transposition_sum(n, dim);
            EXPECT_EQ(t, t.transpose());
            for (Eigen::Index i = 0; i < t.rows(); ++i) {
                for (Eigen::Index j = 0; j < t.cols(); ++j) {
                    EXPECT_EQ(t(i, j).imag(), 0.0);
                    EXPECT_EQ(t(i, j).real(), std::round(t(i, j).real()));
                }
            }
            const double expect = static_cast<double>(n * (n - 1) / 2 * oracle::ipow(dim, n - 1));
            EXPECT_EQ(t.trace().real(), expect);
        }
    }
    EXPECT_THROW(transposition_sum(1, 2), std::invalid_argument);
}

TEST(TranspositionSum, CommutesWithTensorPowers) {
    std::mt19937_64 gen(9);
    const ComplexMatrix m = oracle::random_matrix(2, gen);
    const ComplexMatrix t = transposition_sum(3, 2);
    const ComplexMatrix mp = tensor_power(m, 3);
    EXPECT_LE((t * mp - mp * t).norm(), 1e-10 * mp.norm());
}

TEST(TranspositionSum, SpectrumForN3Dim2) {
    // (C^2)^{(x)3} = Sym^3 (dim 4, content sum 3) + two copies of the
    // (2,1) isotypic part (dim 2 each, content sum 0). No antisymmetric part.
    const ComplexMatrix t = transposition_sum(3, 2);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(t);
    const auto ev = es.eigenvalues();
    int threes = 0;
    int zeros = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i) - 3.0) < 1e-10) ++threes;
        if (std::abs(ev(i)) < 1e-10) ++zeros;
    }
    EXPECT_EQ(threes, 4);
    EXPECT_EQ(zeros, 4);
}

TEST(Embedding, SlotsAndPairs) {
    std::mt19937_64 gen(10);
    const ComplexMatrix m = oracle::random_matrix(2, gen);
    const ComplexMatrix d = oracle::random_matrix(2, gen);
    const ComplexMatrix id = identity(2);
    EXPECT_EQ(embed_at(m, 1, 3), oracle::kron_entries({id, m, id}));
    EXPECT_EQ(embed_pair(m, d, 0, 2, 3), oracle::kron_entries({m, id, d}));
    EXPECT_THROW(embed_at(m, 3, 3), std::invalid_argument);
    EXPECT_THROW(embed_pair(m, d, 2, 1, 3), std::invalid_argument);
}

TEST(Linalg, ExpmMatchesSeriesAndIsUnitaryOnSkewHermitian) {
    std::mt19937_64 gen(11);
    for (double scale : {1e-6, 1e-2, 0.3, 2.0, 20.0}) {
        const ComplexMatrix g = oracle::random_matrix(4, gen);
        const ComplexMatrix a = scale * (g - g.adjoint()) / 2.0;
        const ComplexMatrix e = expm(a);
        EXPECT_LE(unitarity_defect(e), 1e-12 * (1.0 + scale));
        if (scale <= 2.0) {
            EXPECT_LE((e - oracle::exp_series(a)).norm(), 1e-12 * e.norm());
        }
        // exp(A) exp(-A) = I
        EXPECT_LE((e * expm(ComplexMatrix(-a)) - identity(4)).norm(), 1e-11 * (1.0 + scale));
    }
    EXPECT_EQ(expm(ComplexMatrix::Zero(3, 3)), identity(3));
}

TEST(Linalg, ExpmOnCommutingDiagonal) {
    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(0, 0) = 1.5;
    d(1, 1) = -2.0;
    d(2, 2) = Complex(0.0, 3.0);
    const ComplexMatrix e = expm(d);
    EXPECT_NEAR(std::abs(e(0, 0) - std::exp(1.5)), 0.0, 1e-13 * std::exp(1.5));
    EXPECT_NEAR(std::abs(e(1, 1) - std::exp(-2.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(e(2, 2) - std::exp(Complex(0.0, 3.0))), 0.0, 1e-14);
}

TEST(Linalg, PolarFactor) {
    std::mt19937_64 gen(12);
    const ComplexMatrix m = oracle::random_matrix(3, gen);
    const ComplexMatrix u = polar_unitary(m);
    EXPECT_LE(unitarity_defect(u), 1e-13);
    // M = U H with H = U^* M Hermitian positive.
    const ComplexMatrix h = u.adjoint() * m;
    EXPECT_LE((h - h.adjoint()).norm(), 1e-12 * m.norm());
    ComplexMatrix singular = ComplexMatrix::Zero(2, 2);
    singular(0, 0) = 1.0;
    EXPECT_THROW(polar_unitary(singular), StepFailure);
}

TEST(Linalg, Predicates) {
    const ComplexMatrix id = identity(3);
    EXPECT_TRUE(is_unitary(id, 1e-14));
    EXPECT_TRUE(is_symmetry(id, 1e-14));
    ComplexMatrix x = ComplexMatrix::Zero(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = -1.0;
    EXPECT_TRUE(is_skew_hermitian(x, 1e-14));
    EXPECT_FALSE(is_symmetry(x, 1e-3));
    EXPECT_TRUE(all_finite(x));
    x(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_FALSE(all_finite(x));
}
