#include "nlb/transforms.hpp"

#include "nlb/error.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace nlb {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

} // namespace

double discount_apply(const DiscountFunction& d, double v) {
    switch (d.family) {
    case DiscountFamily::Linear:
        return d.kappa * d.gamma * v;
    case DiscountFamily::Power: {
        if (d.gamma == 1.0) return d.kappa * v;
        const double mag = std::expm1(d.gamma * std::log1p(std::abs(v)));
        return d.kappa * std::copysign(mag, v);
    }
    }
    return 0.0;
}

double discount_derivative(const DiscountFunction& d, double v) {
    switch (d.family) {
    case DiscountFamily::Linear:
        return d.kappa * d.gamma;
    case DiscountFamily::Power:
        if (d.gamma == 1.0) return d.kappa;
        // kappa gamma (|v| + 1)^(gamma - 1); peaks at kappa gamma at the origin.
        return d.kappa * d.gamma * std::exp((d.gamma - 1.0) * std::log1p(std::abs(v)));
    }
    return 0.0;
}

double discount_lipschitz(const DiscountFunction& d) {
    return d.family == DiscountFamily::Linear ? d.kappa * d.gamma : d.kappa;
}

std::string to_string(TransformKind kind) {
    switch (kind) {
    case TransformKind::Linear: return "linear";
    case TransformKind::RewardTransform: return "reward";
    case TransformKind::ValueDiscount: return "value-discount";
    case TransformKind::SquashTarget: return "squash";
    case TransformKind::Hdtd: return "hdtd";
    }
    return "?";
}

std::string to_string(DiscountFamily family) {
    return family == DiscountFamily::Linear ? "linear" : "power";
}

TransformSpec TransformSpec::linear(double gamma) {
    require(in_unit(gamma), "linear transform: gamma must lie in [0, 1]");
    TransformSpec s;
    s.kind_ = TransformKind::Linear;
    s.gamma_ = gamma;
    return s;
}

TransformSpec TransformSpec::hyperbolic_reward(double gamma, double k, double r_ref) {
    require(gamma > 0.0 && gamma < 1.0, "reward transform: gamma must lie in (0, 1)");
    require(k > 0.0 && std::isfinite(k), "reward transform: k must be positive");
    require(r_ref != 0.0 && std::isfinite(r_ref), "reward transform: r_ref must be non-zero");
    TransformSpec s;
    s.kind_ = TransformKind::RewardTransform;
    s.gamma_ = gamma;
    s.k_ = k;
    s.eta_ = -std::log(gamma) / k;
    s.r_ref_ = r_ref;
    return s;
}

TransformSpec TransformSpec::value_discount(DiscountFunction discount) {
    require(in_unit(discount.gamma), "value discount: gamma must lie in [0, 1]");
    require(discount.kappa > 0.0 && discount.kappa <= 1.0,
            "value discount: kappa must lie in (0, 1]");
    TransformSpec s;
    s.kind_ = TransformKind::ValueDiscount;
    s.gamma_ = discount.gamma;
    s.kappa_ = discount.kappa;
    s.discount_ = discount;
    return s;
}

TransformSpec TransformSpec::power_discount(double gamma, double kappa) {
    return value_discount({DiscountFamily::Power, gamma, kappa});
}

TransformSpec TransformSpec::linear_discount(double gamma, double kappa) {
    return value_discount({DiscountFamily::Linear, gamma, kappa});
}

TransformSpec TransformSpec::squash_target(double gamma, double squash_eps) {
    require(in_unit(gamma), "squash target: gamma must lie in [0, 1]");
    require(squash_eps >= 0.0 && std::isfinite(squash_eps),
            "squash target: squash_eps must be non-negative");
    TransformSpec s;
    s.kind_ = TransformKind::SquashTarget;
    s.gamma_ = gamma;
    s.squash_eps_ = squash_eps;
    return s;
}

TransformSpec TransformSpec::hdtd(double k) {
    require(k > 0.0 && std::isfinite(k), "hdtd: k must be positive");
    TransformSpec s;
    s.kind_ = TransformKind::Hdtd;
    s.k_ = k;
    return s;
}

bool TransformSpec::nonexpansion_only() const noexcept {
    return kind_ == TransformKind::ValueDiscount && discount_lipschitz(discount_) >= 1.0;
}

std::string TransformSpec::describe() const {
    char buf[160];
    switch (kind_) {
    case TransformKind::Linear:
        std::snprintf(buf, sizeof buf, "linear(gamma=%g)", gamma_);
        break;
    case TransformKind::RewardTransform:
        std::snprintf(buf, sizeof buf, "reward(gamma=%g, k=%g, r_ref=%g, eta=%g)", gamma_, k_,
                      r_ref_, eta_);
        break;
    case TransformKind::ValueDiscount:
        std::snprintf(buf, sizeof buf, "%s-discount(gamma=%g, kappa=%g)",
                      to_string(discount_.family).c_str(), gamma_, kappa_);
        break;
    case TransformKind::SquashTarget:
        std::snprintf(buf, sizeof buf, "squash(gamma=%g, eps=%g)", gamma_, squash_eps_);
        break;
    case TransformKind::Hdtd:
        std::snprintf(buf, sizeof buf, "hdtd(k=%g)", k_);
        break;
    }
    return buf;
}

double eval_target(const TransformSpec& spec, double r, double v) {
    switch (spec.kind()) {
    case TransformKind::Linear:
        return r + spec.gamma() * v;
    case TransformKind::RewardTransform:
        return hyperbolic_equivalent_g(spec, r) + spec.gamma() * v;
    case TransformKind::ValueDiscount:
        return r + discount_apply(spec.discount(), v);
    case TransformKind::SquashTarget:
        return squash(spec.squash_eps(), r + spec.gamma() * unsquash(spec.squash_eps(), v));
    case TransformKind::Hdtd: {
        const double denom = 1.0 + spec.k() * v;
        if (std::abs(denom) <= kHdtdPoleGuard) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "hdtd singularity: 1 + k*v = %.3g at v = %.17g", denom,
                          v);
            throw SingularityError(buf);
        }
        return (r + v) / denom;
    }
    }
    return 0.0;
}

double hyperbolic_equivalent_g(const TransformSpec& spec, double reward) {
    if (spec.kind() != TransformKind::RewardTransform) {
        throw DomainError("hyperbolic_equivalent_g needs a reward transform spec");
    }
    if (reward == 0.0) return 0.0;
    return spec.r_ref() * std::exp(spec.eta() * (reward / spec.r_ref() - 1.0));
}

double squash(double eps, double x) {
    // sqrt(u + 1) - 1 written as u / (sqrt(u + 1) + 1) to stay accurate near zero.
    const double u = std::abs(x);
    return std::copysign(u / (std::sqrt(u + 1.0) + 1.0), x) + eps * x;
}

double unsquash(double eps, double y) {
    // With t = sqrt(|x| + 1): eps t^2 + t - (1 + eps + |y|) = 0. Solving for
    // t - 1 in rationalized form avoids cancellation near y = 0, and
    // |x| = (t - 1)(t + 1).
    const double u = std::abs(y);
    const double b = 1.0 + 2.0 * eps;
    const double disc = b * b + 4.0 * eps * u;
    const double t1 = 2.0 * u / (std::sqrt(disc) + b);
    return std::copysign(t1 * (t1 + 2.0), y);
}

double squash(const TransformSpec& spec, double x) { return squash(spec.squash_eps(), x); }
double unsquash(const TransformSpec& spec, double y) { return unsquash(spec.squash_eps(), y); }

std::optional<double> lipschitz_bound(const TransformSpec& spec) {
    switch (spec.kind()) {
    case TransformKind::Linear:
    case TransformKind::RewardTransform:
        return spec.gamma();
    case TransformKind::ValueDiscount:
        return discount_lipschitz(spec.discount());
    case TransformKind::SquashTarget: {
        const double eps = spec.squash_eps();
        if (spec.gamma() == 0.0) return 0.0;
        if (eps == 0.0) return std::numeric_limits<double>::infinity();
        return (0.5 + eps) * spec.gamma() / eps;
    }
    case TransformKind::Hdtd:
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace nlb
