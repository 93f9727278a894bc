#include <qrtrap/units.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace qrtrap;

namespace {

constexpr double L_table = 4.47e5;

// Round to `digits` significant figures.
double round_sig(double v, int digits) {
    if (v == 0.0) return 0.0;
    const double scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
    return std::round(v * scale) / scale;
}

std::vector<SpeciesParams> bundled() { return load_species(std::string(QRTRAP_DATA_DIR) + "/species.dat"); }

}  // namespace

TEST(ScaledSigma, TableRows) {
    EXPECT_NEAR(scaled_sigma(L_table, 1.494e4), 29.92, 5e-3);
    EXPECT_EQ(std::round(scaled_sigma(L_table, 1.494e4)), 30.0);
    EXPECT_NEAR(scaled_sigma(L_table, 8.239e3), 54.25, 5e-3);
    EXPECT_EQ(scaled_sigma(123.0, 123.0), 1.0);
}

TEST(ScaledSigma, RoundTripIsExact) {
    for (double L : {1.0, 3.3e4, 4.47e5, 9.1e7}) {
        for (double beta : {0.7, 8.239e3, 4.033e4}) {
            const double s = scaled_sigma(L, beta);
            EXPECT_NEAR(s * beta, L, 1e-14 * L);
        }
    }
}

TEST(ScaledSigma, RejectsNonPositive) {
    EXPECT_THROW(scaled_sigma(0.0, 1.0), InvalidParameter);
    EXPECT_THROW(scaled_sigma(1.0, -2.0), InvalidParameter);
}

TEST(RadialGamma, TableRows) {
    EXPECT_EQ(round_sig(radial_gamma(65.3, L_table), 3), 2.92e-4);
    EXPECT_EQ(round_sig(radial_gamma(-2160.0, L_table), 3), -9.66e-3);
    EXPECT_EQ(radial_gamma(0.0, L_table), 0.0);
    EXPECT_THROW(radial_gamma(1.0, 0.0), InvalidParameter);
}

TEST(ScaledTime, SodiumTrapIsAboutHalfASecond) {
    const double m_na = 22.9897692820 * constants::electron_masses_per_amu;
    const double t = scaled_time_to_seconds(1.0, m_na, L_table);
    // 2 m L^2 in atomic time units times 2.4188843e-17 s.
    EXPECT_NEAR(t, 0.405, 5e-4);
    EXPECT_GT(t, 0.4);
    EXPECT_LT(t, 0.5);
    EXPECT_EQ(scaled_time_to_seconds(0.0, m_na, L_table), 0.0);
}

TEST(ScaledTime, LinearInTau) {
    const double m = 4.19e4;
    for (double tau : {1e-3, 0.37, 1.0, 12.5}) {
        const double a = scaled_time_to_seconds(tau, m, L_table);
        const double b = scaled_time_to_seconds(2.0 * tau, m, L_table);
        EXPECT_NEAR(b, 2.0 * a, 1e-14 * b);
    }
    EXPECT_THROW(scaled_time_to_seconds(1.0, 0.0, 1.0), InvalidParameter);
    EXPECT_THROW(scaled_time_to_seconds(1.0, 1.0, -1.0), InvalidParameter);
}

// Simpson's rule on a fine grid, independent of the adaptive routine.
double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

TEST(InitialKineticEnergy, MatchesIndependentQuadrature) {
    for (double a : {2.0, 5.0, 9.0}) {
        const double n2 = simpson([a](double x) { return x * x * std::exp(-2 * a * x); }, 0.0, 1.0);
        const double k = simpson(
            [a](double x) {
                const double d = (1 - a * x) * std::exp(-a * x);
                return d * d;
            },
            0.0, 1.0);
        EXPECT_NEAR(initial_kinetic_energy_scaled(a), k / n2, 1e-9 * k / n2);
    }
}

TEST(InitialKineticEnergy, ApproachesASquaredForSharpPackets) {
    // Untruncated packet: int |psi'|^2 = a^2.
    EXPECT_NEAR(initial_kinetic_energy_scaled(5.0) / 25.0, 1.0, 1e-3);
    EXPECT_NEAR(initial_kinetic_energy_scaled(20.0) / 400.0, 1.0, 1e-12);
}

TEST(InitialKineticEnergy, SodiumNanokelvinScale) {
    const double m_na = 22.9897692820 * constants::electron_masses_per_amu;
    const double e = initial_kinetic_energy_physical(5.0, m_na, 4.5e5);
    EXPECT_NEAR(e, 1.5e-15, 0.05e-15);
    // Order of a nanokelvin.
    const double kelvin = e / constants::boltzmann_hartree_per_kelvin;
    EXPECT_GT(kelvin, 1e-10);
    EXPECT_LT(kelvin, 1e-8);
}

TEST(InitialKineticEnergy, ScalesAsInverseLSquared) {
    const double e1 = initial_kinetic_energy_physical(5.0, 4.19e4, 4.5e5);
    const double e2 = initial_kinetic_energy_physical(5.0, 4.19e4, 9.0e5);
    EXPECT_NEAR(e2, 0.25 * e1, 1e-14 * e1);
}

TEST(SpeciesFile, BundledTableReproducesPrintedDigits) {
    const auto table = bundled();
    ASSERT_EQ(table.size(), 3u);
    const auto li = scale(find_species(table, "Li"), L_table);
    const auto na = scale(find_species(table, "Na"), L_table);
    const auto rb = scale(find_species(table, "Rb"), L_table);
    EXPECT_EQ(round_sig(li.sigma, 4), 54.25);
    EXPECT_EQ(std::round(na.sigma), 30.0);
    EXPECT_EQ(std::round(rb.sigma), 11.0);
    EXPECT_EQ(round_sig(li.gamma, 3), -9.66e-3);
    EXPECT_EQ(round_sig(na.gamma, 3), 2.92e-4);
    EXPECT_EQ(round_sig(rb.gamma, 1), 0.01);
}

TEST(SpeciesFile, UncertaintiesPropagateLinearly) {
    const auto table = bundled();
    const auto na = scale(find_species(table, "Na"), L_table);
    ASSERT_TRUE(na.gamma_uncertainty);
    EXPECT_DOUBLE_EQ(na.gamma_uncertainty->plus, 2.0 * 0.9 / L_table);
    const auto rb = scale(find_species(table, "Rb"), L_table);
    ASSERT_TRUE(rb.gamma_uncertainty);
    EXPECT_DOUBLE_EQ(rb.gamma_uncertainty->plus, 2.0 * 600 / L_table);
    EXPECT_DOUBLE_EQ(rb.gamma_uncertainty->minus, 2.0 * 350 / L_table);
}

TEST(SpeciesFile, UnknownSpeciesListsAvailable) {
    const auto table = bundled();
    try {
        find_species(table, "Cs");
        FAIL() << "expected LookupError";
    } catch (const LookupError& e) {
        EXPECT_NE(std::string(e.what()).find("Li, Na, Rb"), std::string::npos);
    }
}

TEST(SpeciesFile, RejectsMalformedInput) {
    EXPECT_THROW(parse_species(kv::parse_string("[Na]\nmass_amu = 23\n")), ConfigError);  // no version
    EXPECT_THROW(parse_species(kv::parse_string("format_version = 2\n")), ConfigError);
    EXPECT_THROW(parse_species(kv::parse_string("format_version = 1\n[X]\nmass_amu = 1\nbeta4_au = 1\n")),
                 ConfigError);  // missing a_int
    EXPECT_THROW(parse_species(kv::parse_string(
                     "format_version = 1\n[X]\nmass_amu = 1\nbeta4_au = 1\na_int_au = 1\ncolour = red\n")),
                 ConfigError);
    EXPECT_THROW(parse_species(kv::parse_string(
                     "format_version = 1\n[X]\nmass_amu = -1\nbeta4_au = 1\na_int_au = 1\n")),
                 ConfigError);
    EXPECT_THROW(kv::parse_string("a = 1\na = 2\n"), ConfigError);
}

TEST(SpeciesFile, UserSpeciesCanBeAdded) {
    const auto t = parse_species(kv::parse_string(
        "format_version = 1\n[K39]\nmass_amu = 38.9637\nbeta4_au = 3.0e4\na_int_au = -33\na_int_err_au = +5 -2\n"));
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].name, "K39");
    EXPECT_DOUBLE_EQ(t[0].a_int_uncertainty->plus, 5.0);
    EXPECT_DOUBLE_EQ(t[0].a_int_uncertainty->minus, 2.0);
}
