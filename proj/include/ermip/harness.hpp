#pragma once

// Monte Carlo driver: MISE sweeps over n, log-log slope fits, scaling checks
// for nets/packings/operator norms, the oracle suite, and file output.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ermip/config.hpp"
#include "ermip/parallel.hpp"
#include "ermip/rates.hpp"
#include "ermip/simulate.hpp"

namespace ermip {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci95 = 0.0;  // half-width
};

/// OLS of log y on log x; the CI uses the Student t quantile with n-2 dof.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& rows);

struct SweepRow {
    double n = 0.0;
    double delta = 0.0;
    double mise_mean = 0.0;
    double mise_stderr = 0.0;
    double log_card = 0.0;  // log #F_delta (sum over components for additive)
    double rho = 0.0;       // rho(Q, F_delta) (max over components for additive)
    double bound = 0.0;     // oracle risk bound (sum bound for additive); NaN when not applicable
    bool pass = true;       // mise_mean <= bound
    std::vector<double> mise;  // per replication
};

struct SweepResult {
    std::string name;
    std::vector<SweepRow> rows;
    SlopeFit fit;
    double theory_slope = 0.0;  // minus the MISE exponent
    double slope_tolerance = 0.0;
    bool slope_pass = false;
    bool bounds_pass = false;
    std::string bound_kind;
    std::optional<DensityBounds> density_bounds;
    double C_tau_used = 0.0;
    bool conditions_pass = true;  // density only: rho >= 1 and finite B, B'
    std::string rng_algorithm;

    bool pass() const { return slope_pass && bounds_pass && conditions_pass; }
};

struct SweepOptions {
    ExecPolicy policy = ExecPolicy::serial();
    NoiseMode noise = NoiseMode::gaussian;
};

/// delta used for sample size n under the config's rule; one per additive component.
std::vector<double> sweep_deltas(const ExperimentConfig& config, double n);

/// Substream key of replication `rep` at sample size n.
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t rep, double n);

SweepResult run_mise_sweep(const ExperimentConfig& config, const SweepOptions& options = {});

/// One replication: simulate, estimate, return the squared L2 error.
struct SingleRun {
    double delta = 0.0;
    double mise = 0.0;
    double risk = 0.0;
    CoefVec theta_hat;
};
SingleRun run_single(const ExperimentConfig& config, double n, std::uint64_t seed,
                     NoiseMode noise = NoiseMode::gaussian);

/// sup over the ellipsoid of ||Af||_inf and ||Qf||_inf via the pointwise
/// Cauchy-Schwarz bound L sqrt(sum (w_j phi_j(x) / a_j)^2), maximized over a
/// grid of `grid_points` and completed by an analytic tail beyond |j| = cutoff.
/// One-dimensional Fourier basis with the default singular-value rule only.
DensityBounds density_sup_bounds(const EllipsoidSpec& spec, const DiagonalOperator& op, int grid_points = 4096,
                                 int cutoff = 256);

struct ScalingPoint {
    double delta = 0.0;
    double log_card = 0.0;
    double rho = 0.0;
    double rho_K = 0.0;
    double packing_log_count = 0.0;
    std::size_t packing_shell = 0;
    std::string error;  // nonempty when the packing was infeasible
};

struct ScalingReport {
    std::vector<ScalingPoint> points;
    SlopeFit card_fit;
    SlopeFit rho_fit;
    SlopeFit rho_K_fit;
    SlopeFit packing_fit;
    double expected_card = 0.0;  // -d/s
    double expected_rho = 0.0;   // -q/s
    double expected_rho_K = 0.0; // +q/s
    bool card_pass = false;
    bool rho_pass = false;
    bool rho_K_pass = false;
    double upper_exponent = 0.0;  // from the rate equation with a = q/s, b = d/s
    double lower_exponent = 0.0;  // from the packing equation with a_K = q/s, b = d/s
    double measured_upper_exponent = 0.0;
    double measured_lower_exponent = 0.0;
    bool exponents_match = false;

    bool pass() const { return card_pass && rho_pass && rho_K_pass && exponents_match; }
};

ScalingReport verify_scalings(const ExperimentConfig& config, const std::vector<double>& delta_grid,
                              const ExecPolicy& policy = ExecPolicy::serial());

enum class SuiteLevel { fast, full };

struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::vector<CheckResult> checks;
    bool pass() const;
    std::string to_text() const;
};

SuiteReport run_verification_suite(SuiteLevel level, const ExecPolicy& policy = ExecPolicy::serial(),
                                   std::uint64_t seed = 20240501);

// ---------------------------------------------------------------------------
// Output

/// %.17g
std::string format_real(double x);

std::string sweep_raw_csv(const SweepResult& result);
std::string sweep_aggregate_csv(const SweepResult& result);
std::string sweep_report_text(const SweepResult& result);
std::string scaling_report_text(const ScalingReport& report);

/// Writes raw.csv, aggregate.csv and report.txt into `dir`, creating it if
/// needed. Existing files are only replaced with `force`.
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir, bool force);

}  // namespace ermip
