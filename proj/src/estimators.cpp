#include "ermip/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ermip {

namespace {

void require_box_covers(const WhiteNoiseObs& obs, const std::vector<MultiIndex>& indices) {
    for (const auto& j : indices) {
        if (!std::binary_search(obs.active.begin(), obs.active.end(), j)) {
            throw DomainError("net index " + j.to_string() + " is not in the observation box");
        }
    }
}

CoefVec restrict(const CoefVec& y, const std::vector<MultiIndex>& indices) {
    CoefVec out;
    for (const auto& j : indices) out.set(j, y.get(j));
    return out;
}

}  // namespace

EstimateReport delta_net_estimate(const WhiteNoiseObs& obs, const NetSpec& net) {
    require_box_covers(obs, net.active);
    EstimateReport report;
    report.theta_hat = quantize(net, restrict(obs.y, net.active));
    report.risk_value = empirical_risk(obs, report.theta_hat);
    return report;
}

EstimateReport delta_net_estimate(const DensitySample& sample, const DiagonalOperator& op, const NetSpec& net) {
    if (!(op.input_basis() == net.basis)) throw DomainError("net basis differs from the operator basis");
    const CoefVec z = density_statistics(sample, op, net.active);
    EstimateReport report;
    report.theta_hat = quantize(net, z);
    report.risk_value = empirical_risk(sample, op, report.theta_hat);
    return report;
}

EstimateReport dense_estimate(const WhiteNoiseObs& obs, const EllipsoidSpec& spec, double eps_n) {
    spec.validate();
    const double L2 = spec.L * spec.L;
    const double y_norm_sq = obs.y.norm_sq();
    if (eps_n < 0.0) eps_n = 1e-10 * (1.0 + y_norm_sq);

    std::vector<double> y;
    std::vector<double> a2;
    for (const auto& j : obs.active) {
        y.push_back(obs.y.get(j));
        const double a = ell_coeff(spec, j);
        a2.push_back(a * a);
    }
    auto weighted_at = [&](double lambda) {
        double acc = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double c = y[i] / (1.0 + lambda * a2[i]);
            acc += a2[i] * c * c;
        }
        return acc;
    };

    double lambda = 0.0;
    const double weighted = weighted_at(0.0);
    if (weighted > L2) {
        const double max_a2 = *std::max_element(a2.begin(), a2.end());
        double lo = 0.0;
        double hi = (std::sqrt(weighted) / spec.L - 1.0) * max_a2 + 1.0;
        int expansions = 0;
        while (weighted_at(hi) > L2) {
            lo = hi;
            hi *= 2.0;
            if (++expansions > 200 || !std::isfinite(hi)) throw InfeasibleError("bisection failed to bracket lambda");
        }
        for (int it = 0; it < 400 && hi > lo; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (weighted_at(mid) > L2) {
                lo = mid;
            } else {
                hi = mid;
            }
            if (std::abs(weighted_at(hi) - L2) <= 1e-13 * L2) break;
        }
        lambda = hi;  // feasible side
    }

    EstimateReport report;
    double stationarity = 0.0;
    double weighted_hat = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double c = y[i] / (1.0 + lambda * a2[i]);
        report.theta_hat.set(obs.active[i], c);
        stationarity = std::max(stationarity, std::abs(c - y[i] + lambda * a2[i] * c));
        weighted_hat += a2[i] * c * c;
    }
    const double violation = std::max(0.0, weighted_hat - L2) / L2;
    const double slackness = lambda > 0.0 ? std::abs(weighted_hat - L2) / L2 : 0.0;

    auto& cert = report.certificate;
    cert.kind = CertificateKind::kkt_projection;
    cert.lambda = lambda;
    cert.kkt_residual = std::max({stationarity, violation, slackness});
    // theta_hat minimizes the Lagrangian at lambda, so primal minus dual
    // value is lambda (L^2 - weighted), which bounds the suboptimality.
    cert.duality_gap = lambda * std::max(0.0, L2 - weighted_hat);
    cert.eps_n = eps_n;
    if (cert.duality_gap > eps_n) throw InfeasibleError("dense minimizer missed the eps_n tolerance");
    report.risk_value = empirical_risk(obs, report.theta_hat);
    return report;
}

std::vector<NetSpec> additive_nets(int dim, const std::vector<AdditiveComponent>& components,
                                   const std::vector<double>& deltas) {
    if (components.empty()) throw DomainError("additive model needs at least one component");
    if (components.size() != deltas.size()) throw DomainError("one delta per additive component is required");
    std::set<int> axes;
    std::vector<NetSpec> nets;
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& comp = components[k];
        if (comp.spec.d != 1) throw DomainError("additive components are one-dimensional (spec.d must be 1)");
        if (comp.axis < 0 || comp.axis >= dim) throw DomainError("additive component axis out of range");
        if (!axes.insert(comp.axis).second) {
            throw DomainError("two additive components share axis " + std::to_string(comp.axis) +
                              "; components must be orthogonal");
        }
        nets.push_back(build_net(comp.spec, BasisId::additive(dim, comp.axis), deltas[k]));
    }
    return nets;
}

EstimateReport additive_estimate(const WhiteNoiseObs& obs, const std::vector<AdditiveComponent>& components,
                                 const std::vector<double>& deltas) {
    if (obs.active.empty()) throw DomainError("observation box is empty");
    const auto nets = additive_nets(static_cast<int>(obs.active.front().dim()), components, deltas);
    EstimateReport report;
    report.certificate.kind = CertificateKind::direct_sum;
    for (const auto& net : nets) {
        require_box_covers(obs, net.active);
        report.theta_hat += quantize(net, restrict(obs.y, net.active));
        report.certificate.per_component.push_back(Certificate{});
    }
    report.risk_value = empirical_risk(obs, report.theta_hat);
    return report;
}

double mise(const CoefVec& theta_hat, const CoefVec& theta_true) {
    const double d = l2_dist(theta_hat, theta_true);
    return d * d;
}

}  // namespace ermip
