#include <gtest/gtest.h>

#include <random>

#include <bethe3/continuation.hpp>
#include <bethe3/wavefunction.hpp>

using namespace bethe3;

namespace {

std::mt19937_64& rng()
{
    static std::mt19937_64 g(42);
    return g;
}

double unif(double a = 0, double b = 1) { return std::uniform_real_distribution<double>(a, b)(rng()); }

} // namespace

TEST(Amplitudes, FreeCase)
{
    const auto a = amplitudes({cplx(-1), cplx(0.5), cplx(2)}, 0.0);
    for (Perm p : all_perms) EXPECT_EQ(a[p], cplx(1));
}

TEST(Amplitudes, HardCoreLimit)
{
    const auto a = amplitudes({cplx(-1), cplx(0.5), cplx(2)}, 1e12);
    EXPECT_NEAR(std::abs(a[Perm::P213] + 1.0), 0, 1e-10);
    EXPECT_NEAR(std::abs(a[Perm::P321] + 1.0), 0, 1e-10);
    EXPECT_NEAR(std::abs(a[Perm::P231] - 1.0), 0, 1e-10);
}

TEST(Amplitudes, UnimodularForRealMomenta)
{
    for (int i = 0; i < 100; ++i) {
        const Momenta k{cplx(unif(-20, 20)), cplx(unif(-20, 20)), cplx(unif(-20, 20))};
        const auto a = amplitudes(k, unif(-10, 10));
        for (Perm p : all_perms) EXPECT_NEAR(std::abs(a[p]), 1, 1e-12);
    }
}

TEST(Amplitudes, Failures)
{
    EXPECT_THROW(amplitudes({cplx(1), cplx(1), cplx(2)}, 1.0), SolverError);
    // deep trimer: alpha + c is below the resolution of alpha
    EXPECT_THROW(WaveFunction(solve_at({0, 0}, -40)), SolverError);
}

TEST(WaveFunction, FreeGroundStateIsConstant)
{
    const WaveFunction wf(solve_at({0, 0}, 0.0));
    for (int i = 0; i < 20; ++i) EXPECT_NEAR(std::abs(wf(unif(), unif(), unif()) - 6.0), 0, 1e-14);
}

TEST(WaveFunction, TotallySymmetric)
{
    const WaveFunction wf(solve_at({1, 2}, -3));
    for (int i = 0; i < 50; ++i) {
        const double a = unif(), b = unif(), c = unif();
        const cplx v = wf(a, b, c);
        for (auto [x, y, z] : {std::array{b, a, c}, std::array{c, b, a}, std::array{a, c, b}, std::array{b, c, a}})
            EXPECT_NEAR(std::abs(wf(x, y, z) - v), 0, 1e-12 * (1 + std::abs(v)));
    }
}

TEST(WaveFunction, CentreOfMassPhase)
{
    for (const QuantumLabel l : {QuantumLabel{0, 1}, QuantumLabel{1, 2}, QuantumLabel{0, 0}}) {
        const StateSolution s = solve_at(l, -2);
        const WaveFunction wf(s);
        for (int i = 0; i < 30; ++i) {
            const double a = unif(), b = unif(), c = unif(), sh = unif();
            const cplx v = wf(a, b, c), w = wf(a + sh, b + sh, c + sh);
            EXPECT_NEAR(std::abs(w - std::exp(cplx(0, l.p() * sh)) * v), 0, 1e-10 * (1 + std::abs(v))) << l.str();
        }
    }
}

TEST(WaveFunction, BoundStateClosedForm)
{
    // p = gamma = 0: psi is proportional to sum e^{alpha r} + prefactor * sum e^{-alpha r}
    for (auto [l, c] : {std::pair{QuantumLabel{0, 0}, -6.5}, std::pair{QuantumLabel{1, 1}, -9.0}}) {
        const StateSolution s = solve_at(l, c);
        const WaveFunction wf(s);
        const double a = std::get<ComplexCoords>(s.coords).alpha, f = dimer_prefactor(s);
        cplx ratio0 = 0;
        for (int i = 0; i < 30; ++i) {
            std::array<double, 3> x{unif(), unif(), unif()};
            std::sort(x.begin(), x.end());
            const double r12 = x[1] - x[0], r23 = x[2] - x[1], r31 = 1 - r12 - r23;
            const double ref = std::exp(a * r12) + std::exp(a * r23) + std::exp(a * r31) +
                               f * (std::exp(-a * r12) + std::exp(-a * r23) + std::exp(-a * r31));
            const cplx ratio = wf(x[0], x[1], x[2]) / ref;
            if (i == 0) ratio0 = ratio;
            EXPECT_NEAR(std::abs(ratio - ratio0), 0, 1e-10 * std::abs(ratio0)) << l.str();
        }
    }
}

TEST(JumpCondition, SolvedStates)
{
    for (double c : {-8.0, -2.0, 1.0, 5.0}) {
        const WaveFunction wf(solve_at({2, 2}, c));
        for (int i = 0; i < 20; ++i) EXPECT_LT(jump_residual(wf, unif(), unif()), 1e-9);
    }
    const WaveFunction tri(solve_at({0, 0}, -9));
    for (int i = 0; i < 20; ++i) EXPECT_LT(jump_residual(tri, unif(), unif()), 1e-9);
    const WaveFunction free(solve_at({1, 3}, 0.0));
    EXPECT_EQ(free.c(), 0.0);
    for (int i = 0; i < 5; ++i) EXPECT_LT(jump_residual(free, unif(), unif()), 1e-13);
}

TEST(Periodicity, SolvedStates)
{
    for (const QuantumLabel l : {QuantumLabel{0, 2}, QuantumLabel{1, 2}, QuantumLabel{2, 3}, QuantumLabel{3, 1}}) {
        for (double c : {-5.0, -1.0, 2.0}) {
            const WaveFunction wf(solve_at(l, c));
            for (int i = 0; i < 20; ++i) {
                const double a = unif(), b = unif();
                EXPECT_LT(periodicity_residual(wf, std::min(a, b), std::max(a, b)), 1e-9) << l.str() << " c=" << c;
            }
        }
    }
    const WaveFunction ref(solve_at({1, 2}, 0.0));
    EXPECT_LT(periodicity_residual(ref, 0.3, 0.7), 1e-12);
}

TEST(Periodicity, GrowsWithPerturbation)
{
    const StateSolution s = solve_at({2, 3}, 2.0);
    const auto r = std::get<RealCoords>(s.coords);
    double prev = 0;
    std::vector<double> res;
    for (double eps : {1e-6, 1e-5, 1e-4}) {
        const StateSolution t = make_state(s.label, s.c, RealCoords{r.delta1 + eps, r.delta2, r.p});
        res.push_back(periodicity_residual(WaveFunction(t), 0.2, 0.6));
    }
    for (std::size_t i = 1; i < res.size(); ++i) {
        EXPECT_NEAR(res[i] / res[i - 1], 10, 1);
        EXPECT_GT(res[i], prev);
        prev = res[i];
    }
}

TEST(Groups, TrimerAndDimerWeights)
{
    const auto w00 = dimer_trimer_weights(solve_at({0, 0}, -9));
    EXPECT_GT(w00.trimer, w00.dimer);
    const auto w02 = dimer_trimer_weights(solve_at({0, 2}, -9));
    EXPECT_GT(w02.dimer, w02.trimer);
    EXPECT_NEAR(w02.dimer + w02.trimer, 1, 1e-15);
    EXPECT_THROW(dimer_trimer_weights(solve_at({2, 2}, -9)), SolverError);
}

TEST(Groups, DimerPrefactorLimits)
{
    EXPECT_NEAR(dimer_prefactor(solve_at({0, 0}, -40)), 3, 0.03);
    EXPECT_GT(std::abs(dimer_prefactor(solve_at({1, 1}, -40))), 100);
    EXPECT_THROW(dimer_prefactor(solve_at({2, 2}, -1)), SolverError);
}
