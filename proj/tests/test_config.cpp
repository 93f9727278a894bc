#include <qrtrap/config.hpp>
#include <qrtrap/csv.hpp>

#include <gtest/gtest.h>

#include <clocale>
#include <sstream>

using namespace qrtrap;

TEST(RunConfig, DefaultsArePaperProfile) {
    const RunConfig c;
    EXPECT_EQ(c.profile, Profile::paper);
    EXPECT_DOUBLE_EQ(c.grid.dx(), 1e-3);
    EXPECT_DOUBLE_EQ(c.propagator.dt, 2.5e-6);
    EXPECT_EQ(c.sample_every(), 400u);
    EXPECT_EQ(c, RunConfig::defaults(Profile::paper));
    EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, FastProfile) {
    const auto c = RunConfig::defaults(Profile::fast);
    EXPECT_DOUBLE_EQ(c.grid.dx(), 2e-3);
    EXPECT_DOUBLE_EQ(c.propagator.dt, 1e-5);
    EXPECT_EQ(c.sample_every(), 100u);
}

TEST(RunConfig, EmptyTextGivesDefaults) {
    EXPECT_EQ(parse_run_config(kv::parse_string("")), RunConfig{});
    EXPECT_EQ(parse_run_config(kv::parse_string("profile = fast\n")), RunConfig::defaults(Profile::fast));
}

TEST(RunConfig, ProfileOverrideWinsOverFile) {
    const auto c = parse_run_config(kv::parse_string("profile = paper\n"), Profile::fast);
    EXPECT_EQ(c.profile, Profile::fast);
    EXPECT_DOUBLE_EQ(c.propagator.dt, 1e-5);
}

TEST(RunConfig, ExplicitKeysOverrideProfile) {
    const auto c = parse_run_config(kv::parse_string("profile = fast\n[propagator]\ndt = 5e-6\n[grid]\nx_max = 6\n"));
    EXPECT_DOUBLE_EQ(c.propagator.dt, 5e-6);
    EXPECT_DOUBLE_EQ(c.grid.x_max, 6.0);
    EXPECT_DOUBLE_EQ(c.grid.dx(), 2e-3);
}

TEST(RunConfig, ParsesEverySection) {
    const auto c = parse_run_config(kv::parse_string(R"(
[run]
sigma = 40
gamma = -0.62
a = 4
tau_end = 0.5
sample_interval = 0.002
[collapse]
density_factor = 30
[baseline]
x_max = 20
[sweep]
sigmas = 20, 50
gammas = [0, -0.1]
workers = 3
[critical]
gamma_lo = -0.8
)"));
    EXPECT_EQ(c.sigma(), 40.0);
    EXPECT_EQ(c.gamma(), -0.62);
    EXPECT_EQ(c.a, 4.0);
    EXPECT_EQ(c.tau_end, 0.5);
    EXPECT_EQ(c.sample_every(), 800u);
    EXPECT_EQ(c.collapse.density_factor, 30.0);
    EXPECT_EQ(c.baseline.x_max, 20.0);
    EXPECT_EQ(c.sigmas, (std::vector<double>{20, 50}));
    EXPECT_EQ(c.gammas, (std::vector<double>{0, -0.1}));
    EXPECT_EQ(c.workers, 3);
    EXPECT_EQ(c.gamma_lo, -0.8);
}

TEST(RunConfig, StrictSchema) {
    EXPECT_THROW(parse_run_config(kv::parse_string("[grid]\ndx = 1e-3\n")), ConfigError);
    EXPECT_THROW(parse_run_config(kv::parse_string("[gird]\nx_max = 4\n")), ConfigError);
    EXPECT_THROW(parse_run_config(kv::parse_string("speed = 3\n")), ConfigError);
    EXPECT_THROW(parse_run_config(kv::parse_string("profile = turbo\n")), ConfigError);
    EXPECT_THROW(parse_run_config(kv::parse_string("[run]\nsigma = forty\n")), ConfigError);
    EXPECT_THROW(parse_run_config(kv::parse_string("[run]\nsigma = 1\nsigma = 2\n")), ConfigError);
}

TEST(RunConfig, ValidationErrorsAreConfigErrors) {
    EXPECT_THROW(parse_run_config(kv::parse_string("[propagator]\ndt = 0\n")), ConfigError);
    EXPECT_THROW(parse_run_config(kv::parse_string("[run]\na = -1\n")), ConfigError);
    EXPECT_THROW(parse_run_config(kv::parse_string("[absorber]\nstart = 0.5\n")), ConfigError);
    EXPECT_THROW(parse_run_config(kv::parse_string("[collapse]\ncliff_fraction = 1.5\n")), ConfigError);
}

TEST(RunConfig, TextRoundTrip) {
    RunConfig c = RunConfig::defaults(Profile::fast);
    c.propagator.gamma = -0.1 + 1e-17;
    c.propagator.trap.sigma = 1.0 / 3.0;
    c.sigmas = {20, 30.125};
    c.gamma_hi = -0.5;
    EXPECT_EQ(parse_run_config(kv::parse_string(to_text(c))), c);
}

TEST(RunConfig, JsonRoundTrip) {
    RunConfig c;
    c.propagator.gamma = -0.627;
    c.propagator.absorber.strength = 123.5;
    c.workers = 4;
    EXPECT_EQ(run_config_from_json(to_json(c)), c);
    EXPECT_EQ(run_config_from_json(nlohmann::json::parse(to_json(c).dump())), c);
}

TEST(RunConfig, JsonRejectsUnknownKeys) {
    auto j = to_json(RunConfig{});
    j["run"]["speed"] = 1;
    EXPECT_THROW(run_config_from_json(j), ConfigError);
    auto k = to_json(RunConfig{});
    k.erase("grid");
    EXPECT_THROW(run_config_from_json(k), ConfigError);
}

TEST(RunConfig, HashIsStableAndSensitive) {
    RunConfig a, b;
    EXPECT_EQ(config_hash(to_json(a)), config_hash(to_json(b)));
    b.propagator.gamma = 1e-12;
    EXPECT_NE(config_hash(to_json(a)), config_hash(to_json(b)));
}

TEST(Csv, ExactRoundTripAndLocaleIndependence) {
    std::setlocale(LC_ALL, "de_DE.UTF-8");  // may be unavailable; to_chars ignores locale anyway
    for (double v : {0.1, -0.627, 1.0 / 3.0, 6.02214076e23, 5e-324, 0.0}) {
        const auto s = csv::exact(v);
        EXPECT_EQ(s.find(','), std::string::npos);
        EXPECT_EQ(csv::parse_double(s), v) << s;
    }
    std::setlocale(LC_ALL, "C");
    EXPECT_EQ(csv::brief(0.10182), "0.1018");
}

TEST(Csv, SeriesRoundTrip) {
    ObservableSeries s;
    s.samples.push_back({0.0, 1.0, 25.0, 0.0, -38.9, -13.9, 1.0, 2.7});
    s.samples.push_back({0.001, 0.99123456789, 24.5, -0.1, -37.0, -12.6, 0.999, 2.6});
    std::stringstream buf;
    csv::write_series(buf, s);
    const auto back = csv::read_series(buf);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].rho_s, 0.99123456789);
    EXPECT_EQ(back[1].e_int, -37.0);
    std::stringstream bad("tau,rho\n1,2\n");
    EXPECT_THROW(csv::read_series(bad), ConfigError);
}
