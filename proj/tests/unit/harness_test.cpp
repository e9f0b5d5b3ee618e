#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ermip/harness.hpp"
#include "ermip/rng.hpp"

using namespace ermip;

namespace {

const std::string kSmall = R"(
[experiment]
name = small
model = white_noise
estimator = net
[operator]
kind = convolution
q = 1
[ellipsoid]
d = 1
s = 2
L = 1
[truth]
generator = fixed_trig
[sweep]
n_grid = 2^8..2^12
replications = 8
base_seed = 5
)";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_error_key(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

}  // namespace

TEST(SlopeFit, ExactPowerLaw) {
    std::vector<std::pair<double, double>> rows;
    for (double x : {1.0, 2.0, 4.0, 8.0, 16.0}) rows.emplace_back(x, std::pow(x, -0.5));
    const auto fit = fit_loglog_slope(rows);
    EXPECT_NEAR(fit.slope, -0.5, 1e-14);
    EXPECT_LT(fit.ci95, 1e-12);
}

TEST(SlopeFit, Preconditions) {
    EXPECT_THROW(fit_loglog_slope({{1.0, 1.0}, {2.0, 0.5}}), DomainError);
    EXPECT_THROW(fit_loglog_slope({{1.0, 1.0}, {2.0, 0.0}, {3.0, 1.0}}), DomainError);
    EXPECT_THROW(fit_loglog_slope({{-1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}}), DomainError);
}

TEST(SlopeFit, NoisyPowerLawWithinInterval) {
    // Over many synthetic data sets, the 95% interval should cover the truth
    // about 95% of the time.
    CounterRng rng(123);
    int covered = 0;
    const int sets = 400;
    for (int t = 0; t < sets; ++t) {
        std::vector<std::pair<double, double>> rows;
        for (int k = 0; k < 9; ++k) {
            const double x = std::pow(2.0, 8 + k);
            rows.emplace_back(x, std::pow(x, -0.8) * (1.0 + 0.01 * (2.0 * rng.uniform() - 1.0)));
        }
        const auto fit = fit_loglog_slope(rows);
        if (std::abs(fit.slope + 0.8) <= fit.ci95) ++covered;
    }
    EXPECT_GT(covered, static_cast<int>(0.9 * sets));
}

TEST(Config, ParsesNumberLists) {
    EXPECT_EQ(parse_number_list("2^8..2^10", "k"), (std::vector<double>{256, 512, 1024}));
    EXPECT_EQ(parse_number_list("1e3, 2^4, 0.5", "k"), (std::vector<double>{1000, 16, 0.5}));
    EXPECT_THROW(parse_number_list("2^8..3^9", "k"), ConfigError);
    EXPECT_THROW(parse_number_list("", "k"), ConfigError);
}

TEST(Config, ErrorsCarryKeys) {
    EXPECT_EQ(config_error_key(kSmall + "bogus = 1\n"), "sweep.bogus");
    EXPECT_EQ(config_error_key(kSmall + "replications = 3\n"), "sweep.replications");
    EXPECT_EQ(config_error_key(kSmall + "[nowhere]\n"), "nowhere");
    auto text = kSmall;
    text.replace(text.find("n_grid = 2^8..2^12"), 18, "n_grid = 100, 50");
    EXPECT_EQ(config_error_key(text), "sweep.n_grid");
    text = kSmall;
    text.replace(text.find("generator = fixed_trig"), 22, "generator = explicit\ncoefficients = (1|0)=2");
    EXPECT_EQ(config_error_key(text), "truth");
    text = kSmall;
    text.replace(text.find("kind = convolution"), 18, "kind = wavelet");
    EXPECT_EQ(config_error_key(text), "operator.kind");
}

TEST(Config, TruthInsideEllipsoid) {
    for (const char* gen : {"fixed_trig", "boundary", "random_interior"}) {
        auto text = kSmall;
        text.replace(text.find("fixed_trig"), 10, gen);
        const auto cfg = parse_config(text);
        EXPECT_TRUE(in_ellipsoid(cfg.ellipsoid, cfg.truth())) << gen;
    }
    const auto cfg = parse_config(kSmall);
    EXPECT_NEAR(std::sqrt(ell_weighted_norm_sq(cfg.ellipsoid, cfg.truth())), 0.9 * cfg.ellipsoid.L, 1e-12);
}

TEST(Sweep, Deterministic) {
    const auto cfg = parse_config(kSmall);
    const auto a = run_mise_sweep(cfg);
    const auto b = run_mise_sweep(cfg);
    EXPECT_EQ(sweep_raw_csv(a), sweep_raw_csv(b));
    EXPECT_EQ(sweep_report_text(a), sweep_report_text(b));
}

TEST(Sweep, SerialMatchesOpenMP) {
    const auto cfg = parse_config(kSmall);
    const auto a = run_mise_sweep(cfg, {ExecPolicy::serial()});
    const auto b = run_mise_sweep(cfg, {ExecPolicy::openmp(4)});
    EXPECT_EQ(sweep_raw_csv(a), sweep_raw_csv(b));
    EXPECT_EQ(sweep_aggregate_csv(a), sweep_aggregate_csv(b));
}

TEST(Sweep, NoiselessBiasBelowDeltaSquared) {
    for (const char* path : {"direct.ini", "deconvolution.ini", "radon.ini", "additive.ini"}) {
        auto cfg = load_config(std::filesystem::path(ERMIP_CONFIG_DIR) / path);
        cfg.replications = 1;
        const auto r = run_mise_sweep(cfg, {ExecPolicy::openmp(), NoiseMode::zero});
        for (const auto& row : r.rows) {
            // Additive: the component radii add up.
            double delta_sum = 0.0;
            for (double d : sweep_deltas(cfg, row.n)) delta_sum += d;
            EXPECT_LE(row.mise_mean, delta_sum * delta_sum) << path << " n = " << row.n;
        }
    }
}

TEST(Sweep, StderrDefinition) {
    const auto r = run_mise_sweep(parse_config(kSmall));
    for (const auto& row : r.rows) {
        double mean = 0.0;
        for (double m : row.mise) mean += m;
        mean /= row.mise.size();
        double ss = 0.0;
        for (double m : row.mise) ss += (m - mean) * (m - mean);
        const double se = std::sqrt(ss / (row.mise.size() - 1)) / std::sqrt(static_cast<double>(row.mise.size()));
        EXPECT_NEAR(row.mise_mean, mean, 1e-15 * (1 + mean));
        EXPECT_NEAR(row.mise_stderr, se, 1e-12 * (1 + se));
    }
}

TEST(Sweep, MiseNonincreasingInN) {
    for (const char* path : {"direct.ini", "deconvolution.ini", "radon.ini", "additive.ini", "density.ini"}) {
        auto cfg = load_config(std::filesystem::path(ERMIP_CONFIG_DIR) / path);
        cfg.replications = std::min(cfg.replications, 40);
        const auto r = run_mise_sweep(cfg, {ExecPolicy::openmp()});
        for (std::size_t i = 1; i < r.rows.size(); ++i) {
            const auto& prev = r.rows[i - 1];
            const auto& cur = r.rows[i];
            const double slack = 2.0 * std::hypot(prev.mise_stderr, cur.mise_stderr);
            EXPECT_LE(cur.mise_mean, prev.mise_mean + slack) << path << " n = " << cur.n;
        }
    }
}

TEST(Sweep, CsvFormat) {
    const auto r = run_mise_sweep(parse_config(kSmall));
    const auto raw = sweep_raw_csv(r);
    const auto agg = sweep_aggregate_csv(r);
    EXPECT_EQ(raw.substr(0, raw.find('\n')), "n,replication,delta,mise");
    EXPECT_EQ(agg.substr(0, agg.find('\n')), "n,mise_mean,mise_stderr,delta,bound,pass");
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(r.rng_algorithm, "splitmix64-counter/marsaglia-polar");
}

TEST(Sweep, OutputDirectoryNotOverwritten) {
    const auto dir = std::filesystem::temp_directory_path() / "ermip_harness_test_out";
    std::filesystem::remove_all(dir);
    const auto r = run_mise_sweep(parse_config(kSmall));
    write_sweep_outputs(r, dir, false);
    EXPECT_EQ(slurp(dir / "raw.csv"), sweep_raw_csv(r));
    EXPECT_THROW(write_sweep_outputs(r, dir, false), Error);
    EXPECT_NO_THROW(write_sweep_outputs(r, dir, true));
    std::filesystem::remove_all(dir);
}

TEST(Scalings, IdentityOperatorHasFlatRho) {
    auto cfg = load_config(std::filesystem::path(ERMIP_CONFIG_DIR) / "scalings_convolution.ini");
    cfg.operator_kind = OperatorKind::identity;
    cfg.q = 0.0;
    const auto r = verify_scalings(cfg, cfg.delta_grid);
    EXPECT_NEAR(r.rho_fit.slope, 0.0, 1e-12);
    EXPECT_NEAR(r.rho_K_fit.slope, 0.0, 1e-12);
    EXPECT_TRUE(r.pass());
}

TEST(Scalings, ConvolutionRhoSlope) {
    const auto cfg = load_config(std::filesystem::path(ERMIP_CONFIG_DIR) / "scalings_convolution.ini");
    const auto r = verify_scalings(cfg, cfg.delta_grid, ExecPolicy::openmp());
    EXPECT_NEAR(r.rho_fit.slope, -0.5, 0.1);
    EXPECT_DOUBLE_EQ(r.upper_exponent, r.lower_exponent);
}

TEST(Scalings, RejectsShortGrid) {
    const auto cfg = load_config(std::filesystem::path(ERMIP_CONFIG_DIR) / "scalings_convolution.ini");
    EXPECT_THROW(verify_scalings(cfg, {0.01, 0.02, 0.04}), DomainError);
    EXPECT_THROW(verify_scalings(cfg, {0.01, 0.012, 0.014, 0.016}), DomainError);
}

TEST(Suite, FastLevelPassesQuicklyAndReproducibly) {
    const auto start = std::chrono::steady_clock::now();
    const auto a = run_verification_suite(SuiteLevel::fast, ExecPolicy::openmp());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_TRUE(a.pass()) << a.to_text();
    EXPECT_LT(seconds, 60.0);
    EXPECT_EQ(a.to_text(), run_verification_suite(SuiteLevel::fast, ExecPolicy::serial()).to_text());
}
