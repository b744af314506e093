#include <gtest/gtest.h>

#include <cmath>

#include "frozen_values.hpp"
#include "oracles.hpp"
#include "ubmlab/heat_kernel.hpp"
#include "ubmlab/process.hpp"

using namespace ubmlab;

TEST(HeatKernel, OrderOneIsScalarDecay) {
    for (double t : {0.0, 0.3, 2.0}) {
        const auto k = expected_tensor_power_ubm(1, 3, t);
        EXPECT_LE((k.value - std::exp(-t / 2) * identity(3)).norm(), 1e-15);
    }
}

TEST(HeatKernel, IdentityAtTimeZero) {
    for (std::size_t n = 1; n <= 3; ++n) EXPECT_LE((expected_tensor_power_ubm(n, 3, 0.0).value - identity(oracle::ipow(3, n))).norm(), 1e-15);
}

TEST(HeatKernel, OrderTwoCoshSinhForm) {
    for (std::size_t dim : {2u, 3u, 4u}) {
        for (double t : {0.1, 0.5, 3.0}) {
            const ComplexMatrix swap = permutation_operator(Permutation::transposition(2, 0, 1), dim);
            const ComplexMatrix expect = std::exp(-t) * (std::cosh(t / dim) * identity(dim * dim) - std::sinh(t / dim) * swap);
            EXPECT_LE((expected_tensor_power_ubm(2, dim, t).value - expect).norm(), 1e-13);
        }
    }
}

TEST(HeatKernel, FrozenEntriesN2) {
    const ComplexMatrix k = expected_tensor_power_ubm(2, 2, 0.5).value;
    EXPECT_NEAR(k(0, 0).real(), frozen::kHeat2Diag, 1e-15);
    EXPECT_NEAR(k(1, 1).real(), frozen::kHeat2Mixed, 1e-15);
    EXPECT_NEAR(k(1, 2).real(), frozen::kHeat2Swap, 1e-15);
}

TEST(HeatKernel, CommutesWithPermutations) {
    for (std::size_t dim : {2u, 3u}) {
        for (std::size_t n = 2; n <= 3; ++n) {
            const ComplexMatrix k = expected_tensor_power_ubm(n, dim, 0.7).value;
            for (const auto& s : Permutation::all(n)) {
                const ComplexMatrix p = permutation_operator(s, dim);
                EXPECT_LE((p * k - k * p).norm(), 1e-10);
            }
        }
    }
}

TEST(HeatKernel, SemigroupProperty) {
    const ComplexMatrix a = expected_tensor_power_ubm(3, 3, 0.4).value;
    const ComplexMatrix b = expected_tensor_power_ubm(3, 3, 0.9).value;
    const ComplexMatrix ab = expected_tensor_power_ubm(3, 3, 1.3).value;
    EXPECT_LE((a * b - ab).norm(), 1e-12);
}

TEST(HeatKernel, DerivativeAtZeroIsGenerator) {
    for (std::size_t n = 1; n <= 3; ++n) {
        const double h = 1e-4;
        const ComplexMatrix fd =
            (expected_tensor_power_ubm(n, 3, h).value - expected_tensor_power_ubm(n, 3, 0.0).value) / h;
        // One-sided at t = 0; use the symmetric extension e^{-tG} at -h instead.
        const ComplexMatrix g = tensor_power_generator(n, 3);
        const ComplexMatrix back = expm(ComplexMatrix(-h * g));
        const ComplexMatrix central = (expected_tensor_power_ubm(n, 3, h).value - back) / (2.0 * h);
        EXPECT_LE((central - g).norm(), 1e-6 * (1.0 + g.norm()));
        EXPECT_LE((fd - g).norm(), 1e-3 * (1.0 + g.norm()));
    }
}

TEST(HeatKernel, BudgetExceeded) { EXPECT_THROW(expected_tensor_power_ubm(7, 4, 1.0), BudgetExceeded); }

TEST(Biane, FrozenValues) {
    for (const auto& v : frozen::kUbmMoments) {
        EXPECT_NEAR(biane_moment(v.n, v.dim, v.t), v.value, 1e-13 * (1.0 + std::abs(v.value))) << v.n << " " << v.dim << " " << v.t;
    }
}

TEST(Biane, OrderOneAndTimeZero) {
    for (std::size_t dim = 1; dim <= 8; ++dim) {
        for (double t : {0.0, 0.5, 3.0}) EXPECT_NEAR(biane_moment(1, dim, t), std::exp(-t / 2), 1e-15);
        for (std::size_t n = 1; n <= dim; ++n) EXPECT_NEAR(biane_moment(n, dim, 0.0), 1.0, 1e-12);
    }
}

TEST(Biane, OrderTwoClosedForm) {
    for (std::size_t dim : {2u, 3u, 5u}) {
        for (double t : {0.25, 1.0, 4.0}) {
            const double expect = std::exp(-t) * (std::cosh(t / dim) - dim * std::sinh(t / dim));
            EXPECT_NEAR(biane_moment(2, dim, t), expect, 1e-14);
        }
    }
}

TEST(Biane, BoundedOnGrid) {
    for (std::size_t dim = 1; dim <= 6; ++dim) {
        for (std::size_t n = 1; n <= dim; ++n) {
            for (int k = 0; k <= 50; ++k) EXPECT_LE(std::abs(biane_moment(n, dim, 0.1 * k)), 1.0 + 1e-12);
        }
    }
}

TEST(Biane, LargeDimensionStaysFinite) {
    for (std::size_t n = 1; n <= 10; ++n) {
        const double v = biane_moment(n, 50, 1.0);
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_LE(std::abs(v), 1.0 + 1e-9);
    }
}

TEST(Biane, DomainErrors) {
    EXPECT_THROW(biane_moment(3, 2, 1.0), DomainError);
    EXPECT_THROW(biane_moment(0, 2, 1.0), DomainError);
    EXPECT_THROW(biane_moment(1, 2, -1.0), DomainError);
}

TEST(Biane, CycleContractionOfHeatKernel) {
    for (std::size_t n = 1; n <= 3; ++n) {
        for (std::size_t dim : {3u, 4u}) {
            for (double t : {0.25, 1.0, 4.0}) {
                const ComplexMatrix k = expected_tensor_power_ubm(n, dim, t).value;
                const Complex via_kernel = (permutation_operator(Permutation::full_cycle(n), dim) * k).trace() / static_cast<double>(dim);
                const double b = biane_moment(n, dim, t);
                EXPECT_LE(std::abs(via_kernel - b), 1e-8 * std::abs(b));
            }
        }
    }
}

TEST(TwistedMoments, NuFrozenForMixedFixture) {
    const auto pair = make_fixture({4, 3, 1, false, 0});
    for (const auto& v : frozen::kNuMixedFixture) {
        const Complex nu = nu_moment(pair, v.n, v.t);
        EXPECT_NEAR(nu.real(), v.re, 1e-13);
        EXPECT_NEAR(nu.imag(), v.im, 1e-13);
    }
}

TEST(TwistedMoments, IdentityTwistIsBiane) {
    for (std::size_t n = 1; n <= 3; ++n) {
        EXPECT_NEAR(expected_trace_power_twisted(identity(3), n, 0.8).real(), biane_moment(n, 3, 0.8), 1e-12);
    }
}

TEST(F1ClosedForm, FrozenAndLimits) {
    const auto pair = make_fixture({4, 3, 1, false, 0});
    EXPECT_DOUBLE_EQ(pair.alpha(), 0.5);
    EXPECT_DOUBLE_EQ(pair.beta(), -0.5);
    EXPECT_DOUBLE_EQ(pair.xi(), 0.0);
    for (std::size_t i = 0; i < frozen::kF1Times.size(); ++i) EXPECT_NEAR(f1_closed_form(pair, frozen::kF1Times[i]), frozen::kF1Mixed[i], 1e-15);
    EXPECT_NEAR(f1_closed_form(pair, 60.0), pair.alpha() * pair.beta(), 1e-15);
    const auto trivial = make_fixture({3, 3, 3, false, 0});
    for (double t : {0.0, 1.0, 5.0}) EXPECT_DOUBLE_EQ(f1_closed_form(trivial, t), 1.0);
}

TEST(ExpectedA, ClosedFormProperties) {
    const auto pair = make_fixture({4, 3, 1, true, 9});
    EXPECT_LE((expected_A_closed_form(pair.r(), pair.s(), 0.0) - pair.rs()).norm(), 1e-14);
    EXPECT_LE((expected_A_closed_form(pair.r(), pair.s(), 60.0) - pair.beta() * pair.r()).norm(), 1e-14);
    for (double t : {0.2, 1.0}) {
        EXPECT_NEAR(normalized_trace(expected_A_closed_form(pair.r(), pair.s(), t)).real(), f1_closed_form(pair, t), 1e-14);
    }
    ComplexMatrix r = identity(2);
    r(1, 1) = -1.0;
    const ComplexMatrix s = identity(2);
    EXPECT_LE((expected_A_closed_form(r, s, 0.7) - r).norm(), 1e-15);
    EXPECT_THROW(expected_A_closed_form(2.0 * r, s, 0.7), std::invalid_argument);
}
