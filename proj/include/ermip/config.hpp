#pragma once

// Experiment configuration files: UTF-8, one `key = value` per line, grouped
// under `[section]` headers, `#` starts a comment. Unknown sections or keys
// are errors. See README.md for the schema.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ermip/estimators.hpp"
#include "ermip/operators.hpp"
#include "ermip/sequence_core.hpp"

namespace ermip {

enum class EstimatorKind { net, dense, additive };
enum class DeltaRule { optimal, fixed };
enum class TruthGenerator { fixed_trig, boundary, random_interior, explicit_coefficients };

struct ExperimentConfig {
    std::string name = "experiment";
    StatModel model = StatModel::white_noise;
    EstimatorKind estimator = EstimatorKind::net;

    OperatorKind operator_kind = OperatorKind::identity;
    double q = 0.0;
    std::optional<CoefVec> kernel;

    EllipsoidSpec ellipsoid;
    std::vector<AdditiveComponent> components;  // estimator = additive

    TruthGenerator truth_generator = TruthGenerator::fixed_trig;
    CoefVec truth_coefficients;  // explicit only
    std::uint64_t truth_seed = 1;

    std::vector<double> n_grid;
    int replications = 1;
    std::uint64_t base_seed = 1;
    DeltaRule delta_rule = DeltaRule::optimal;
    double kappa = 1.0;
    double delta = 0.1;
    double slope_tolerance = 0.12;

    double xi = 0.48;
    double C_tau = 9.0;
    double orthogonality_c = 1.0;

    std::vector<double> delta_grid;
    std::uint64_t packing_seed = 1;

    /// Basis of the coefficient vectors (Fourier, Zernike or the d-dim Fourier
    /// basis that hosts the additive components).
    BasisId basis() const;
    DiagonalOperator make_operator() const;
    /// Dimension of the index space.
    int dim() const;
    /// Realized truth; checked to lie in the ellipsoid (per component for additive).
    CoefVec truth() const;
    /// Smoothness/ill-posedness pair driving optimal_delta and the theory exponent.
    double theory_mise_exponent() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "2^8..2^16" expands to the integer powers in between; otherwise a comma
/// list of numbers, each either decimal/scientific or base^exponent.
std::vector<double> parse_number_list(std::string_view text, const std::string& key);

}  // namespace ermip
