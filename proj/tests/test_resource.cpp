#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gkpsim/resource.hpp"
#include "gkpsim/zgw.hpp"

using namespace gkpsim;

namespace {

constexpr double kPi = std::numbers::pi;

LogicalDensityMatrix qubit(const std::vector<cdouble>& psi) { return LogicalDensityMatrix::pure(psi); }

void expect_density_matrix(const LogicalDensityMatrix& r, double tol = 1e-10)
{
    EXPECT_NEAR(r.rho.trace().real(), 1, tol);
    EXPECT_LT((r.rho - r.rho.adjoint()).cwiseAbs().maxCoeff(), tol);
    Eigen::SelfAdjointEigenSolver<Matrix<cdouble>> es(r.rho);
    EXPECT_GE(es.eigenvalues().minCoeff(), -tol);
}

RealisticGKPState codeword(int d, int j, double delta)
{
    RealisticGKPState st;
    st.d = d;
    st.delta = delta;
    st.amplitudes.assign(d, 0.0);
    st.amplitudes[j] = 1.0;
    return st;
}

}  // namespace

TEST(ROM, StabilizerAndMagicStates)
{
    EXPECT_NEAR(rom(qubit({1.0, 0.0})).rom, 1, 1e-15);
    EXPECT_NEAR(rom(qubit({1 / std::sqrt(2.0), cdouble(0, 1 / std::sqrt(2.0))})).rom, 1, 1e-15);
    LogicalDensityMatrix mixed{2, Matrix<cdouble>::Identity(2, 2) / 2.0};
    EXPECT_NEAR(rom(mixed).rom, 0, 1e-15);
    const double beta = 0.5 * std::acos(1 / std::sqrt(3.0));
    const LogicalDensityMatrix T = qubit({std::cos(beta), std::exp(cdouble(0, kPi / 4)) * std::sin(beta)});
    const ROMReport r = rom(T, 1.5);
    EXPECT_NEAR(r.rom, std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(r.fidelity_to_T, 1, 1e-14);
    EXPECT_TRUE(r.distillable);
    EXPECT_FALSE(rom(T).distillable);
    EXPECT_NEAR(r.bloch.x, r.bloch.y, 1e-14);
    EXPECT_GT(r.bloch.y, 0);
}

TEST(ROM, BlochNeedsQubit)
{
    try {
        bloch_vector(LogicalDensityMatrix{3, Matrix<cdouble>::Identity(3, 3) / 3.0});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.invariant(), "dimension");
    }
}

TEST(ECOverlap, MatchesDisplacedStateOnTheComb)
{
    // independent route: displace the Gaussian sum, then sum it over the comb
    const GaussianSum psi = codeword(2, 1, 0.25).gaussian_sum();
    const Wavefunction f = [&](double x) { return psi(x); };
    const double ell = GKPParameters::make(2).ell;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-ell / 2, ell / 2);
    const int M = ssd_truncation(psi, 2);
    for (int trial = 0; trial < 6; ++trial) {
        const double sx = U(rng), sz = U(rng);
        const GaussianSum moved = psi.displace(sx, sz);
        for (int l = 0; l < 2; ++l) {
            cdouble want = 0;
            for (int m = -M; m <= M; ++m) want += moved((l + 2.0 * m) * ell);
            double tail = 1;
            const cdouble got = ec_overlap(f, sx, sz, l, 2, M, &tail);
            EXPECT_LT(std::abs(got - want), 1e-10 * std::max(1.0, std::abs(want)));
            EXPECT_LT(tail, 1e-12);
        }
    }
}

TEST(ECOverlap, CorrectLabelDominates)
{
    const GaussianSum psi = codeword(2, 0, 0.1).gaussian_sum();
    const Wavefunction f = [&](double x) { return psi(x); };
    const int M = ssd_truncation(psi, 2);
    const double right = std::abs(ec_overlap(f, 0, 0, 0, 2, M));
    const double wrong = std::abs(ec_overlap(f, 0, 0, 1, 2, M));
    EXPECT_GT(right, 1e3 * wrong);
}

TEST(SSD, SqueezedCodewordsProjectToTheirLabels)
{
    for (int d : {2, 3}) {
        for (int j = 0; j < d; ++j) {
            const LogicalDensityMatrix r = stabilizer_ssd(codeword(d, j, 0.1).gaussian_sum(), d);
            expect_density_matrix(r);
            EXPECT_GT(r.rho(j, j).real(), 0.99) << "d " << d << " label " << j;
        }
    }
}

TEST(SSD, SmallDeltaReproducesLogicalBlochVector)
{
    for (double theta : {0.3, 1.2, 2.5})
        for (double phi : {0.0, 0.9, -2.0}) {
            const ROMReport r = rom(stabilizer_ssd(gkp_theta_family(0.08, theta, phi).gaussian_sum(), 2));
            EXPECT_NEAR(r.bloch.x, std::sin(theta) * std::cos(phi), 0.02);
            EXPECT_NEAR(r.bloch.y, std::sin(theta) * std::sin(phi), 0.02);
            EXPECT_NEAR(r.bloch.z, std::cos(theta), 0.02);
        }
}

TEST(SSD, VacuumIsMagicAndConverged)
{
    SSDConfig coarse, fine;
    fine.zak_grid = 128;
    const LogicalDensityMatrix a = stabilizer_ssd(vacuum_state(), 2, coarse);
    const LogicalDensityMatrix b = stabilizer_ssd(vacuum_state(), 2, fine);
    expect_density_matrix(a);
    EXPECT_LT((a.rho - b.rho).cwiseAbs().maxCoeff(), 1e-4);
    EXPECT_GT(rom(a).rom, 1.1);
    // the vacuum is even about q = 0 and p = 0, so the projection is real
    EXPECT_LT(std::abs(a.rho(0, 1).imag()), 1e-12);
}

TEST(SSD, ValidatesConfig)
{
    SSDConfig bad;
    bad.zak_grid = 8;
    EXPECT_THROW(stabilizer_ssd(vacuum_state(), 2, bad), ValidationError);
    const Wavefunction f = [](double x) { return cdouble(std::exp(-x * x / 2)); };
    try {
        stabilizer_ssd(f, 2, SSDConfig{});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.invariant(), "comb_truncation");
    }
    SSDConfig explicit_m;
    explicit_m.comb_truncation = 8;
    const LogicalDensityMatrix byfn = stabilizer_ssd(f, 2, explicit_m);
    const LogicalDensityMatrix bysum = stabilizer_ssd(vacuum_state(), 2);
    EXPECT_LT((byfn.rho - bysum.rho).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PreUnitary, IdentityAndLogicalDisplacement)
{
    const GaussianSum zero = codeword(2, 0, 0.15).gaussian_sum();
    const LogicalDensityMatrix base = stabilizer_ssd(zero, 2);
    const LogicalDensityMatrix id = pre_unitary_map(zero, identity_operation(1), 2);
    EXPECT_LT((base.rho - id.rho).cwiseAbs().maxCoeff(), 1e-14);

    Vector<double> c(2);
    c << std::sqrt(kPi), 0;
    const LogicalDensityMatrix flipped = pre_unitary_map(zero, make_operation(RationalMatrix::Identity(2, 2), c), 2);
    EXPECT_NEAR(flipped.rho(1, 1).real(), base.rho(0, 0).real(), 1e-8);
}

TEST(PreUnitary, RotationLeavesVacuumUnchanged)
{
    RationalMatrix F(2, 2);
    F << 0, 1, -1, 0;
    const LogicalDensityMatrix a = stabilizer_ssd(vacuum_state(), 2);
    const LogicalDensityMatrix b = pre_unitary_map(vacuum_state(), make_operation(F, Vector<double>::Zero(2)), 2);
    EXPECT_NEAR(rom(a).rom, rom(b).rom, 1e-8);
    // the GKP Fourier gate acts as a logical Hadamard: x and z swap
    EXPECT_NEAR(rom(a).bloch.x, rom(b).bloch.z, 1e-8);
}

TEST(StrangeState, IsPureAndNegative)
{
    const LogicalDensityMatrix s = strange_state();
    EXPECT_NEAR(s.rho.trace().real(), 1, 1e-15);
    EXPECT_NEAR((s.rho * s.rho).trace().real(), 1, 1e-15);
    EXPECT_NEAR(std::abs(s.rho(0, 0)), 0, 1e-15);
    EXPECT_LT(gross_wigner(s.rho, 3).minCoeff(), 0);
}

TEST(ROMSweep, LinearShortcutMatchesDirectProjection)
{
    const std::vector<double> deltas{0.2, 0.45}, thetas{0.0, 0.9, 2.1, kPi};
    const double phi = kPi / 4;
    const ROMSweep a = rom_sweep(deltas, thetas, phi, {}, std::nullopt, 1);
    const ROMSweep b = rom_sweep(deltas, thetas, phi, {}, std::nullopt, 2);
    for (std::size_t i = 0; i < deltas.size(); ++i)
        for (std::size_t j = 0; j < thetas.size(); ++j) {
            const double direct = rom(stabilizer_ssd(gkp_theta_family(deltas[i], thetas[j], phi).gaussian_sum(), 2)).rom;
            EXPECT_NEAR(a.at(i, j).report.rom, direct, 1e-10);
            EXPECT_EQ(a.at(i, j).report.rom, b.at(i, j).report.rom);
            EXPECT_EQ(a.at(i, j).delta, deltas[i]);
            EXPECT_EQ(a.at(i, j).theta, thetas[j]);
        }
    EXPECT_THROW(rom_sweep({}, thetas, phi), ValidationError);
    EXPECT_THROW(rom_sweep({0.0}, thetas, phi), ValidationError);
}

TEST(ROMSweep, MagicAngleIsBestAtSmallDelta)
{
    std::vector<double> thetas;
    for (int i = 0; i <= 60; ++i) thetas.push_back(kPi * i / 60);
    const ROMSweep s = rom_sweep({0.1}, thetas, kPi / 4);
    std::size_t best = 0;
    for (std::size_t j = 0; j < thetas.size(); ++j)
        if (s.at(0, j).report.rom > s.at(0, best).report.rom) best = j;
    const double magic = std::acos(1 / std::sqrt(3.0));
    const double step = kPi / 60;
    const double t = thetas[best];
    EXPECT_TRUE(std::abs(t - magic) < step || std::abs(t - (kPi - magic)) < step) << t;
    EXPECT_NEAR(s.at(0, best).report.rom, std::sqrt(3.0), 0.03);
}
