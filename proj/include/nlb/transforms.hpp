#pragma once

#include <optional>
#include <string>

namespace nlb {

/// Default slope of the squash function's linear term.
inline constexpr double kDefaultSquashEps = 1e-2;

/// |1 + k v| at or below this is treated as the Hdtd pole.
inline constexpr double kHdtdPoleGuard = 1e-9;

enum class DiscountFamily { Linear, Power };

/**
 * Value discount g_gamma, scaled by kappa.
 *
 * Linear: kappa * gamma * v.
 * Power:  kappa * sign(v) * ((|v| + 1)^gamma - 1), whose slope is
 *         kappa / (|v| + 1)^(1 - gamma), maximal (= kappa) at the origin.
 */
struct DiscountFunction {
    DiscountFamily family = DiscountFamily::Power;
    double gamma = 1.0;
    double kappa = 1.0;
};

double discount_apply(const DiscountFunction& d, double v);
double discount_derivative(const DiscountFunction& d, double v);
/// Declared Lipschitz bound: kappa gamma for the linear family, kappa for the
/// power family (whose actual supremum kappa gamma never exceeds it).
double discount_lipschitz(const DiscountFunction& d);

/// Which part of the bootstrap target is non-linear.
enum class TransformKind {
    Linear,          ///< r + gamma v
    RewardTransform, ///< g(r) + gamma v, with the hyperbolic-equivalent g
    ValueDiscount,   ///< r + g_gamma(v)
    SquashTarget,    ///< h(r + gamma h^-1(v))
    Hdtd,            ///< (r + v) / (1 + k v)
};

std::string to_string(TransformKind kind);
std::string to_string(DiscountFamily family);

/**
 * A bootstrap target f(r, v) plus the parameters it needs.
 *
 * Construct through the named factories; each one checks its parameter
 * ranges and throws DomainError on violation. Parameters that a kind does not
 * use keep neutral defaults.
 */
class TransformSpec {
public:
    static TransformSpec linear(double gamma);
    /// Reward transform g(R) = r_ref * exp(eta (R / r_ref - 1)), eta = -log(gamma) / k.
    static TransformSpec hyperbolic_reward(double gamma, double k, double r_ref);
    static TransformSpec value_discount(DiscountFunction discount);
    static TransformSpec power_discount(double gamma, double kappa = 1.0);
    static TransformSpec linear_discount(double gamma, double kappa = 1.0);
    static TransformSpec squash_target(double gamma, double squash_eps = kDefaultSquashEps);
    static TransformSpec hdtd(double k);

    TransformKind kind() const noexcept { return kind_; }
    double gamma() const noexcept { return gamma_; }
    double k() const noexcept { return k_; }
    double eta() const noexcept { return eta_; }
    double kappa() const noexcept { return kappa_; }
    double r_ref() const noexcept { return r_ref_; }
    double squash_eps() const noexcept { return squash_eps_; }
    /// Only meaningful for ValueDiscount.
    const DiscountFunction& discount() const noexcept { return discount_; }

    /// A value discount with kappa = 1 is a non-expansion, not a strict contraction.
    bool nonexpansion_only() const noexcept;

    std::string describe() const;

private:
    TransformSpec() = default;

    TransformKind kind_ = TransformKind::Linear;
    double gamma_ = 1.0;
    double k_ = 1.0;
    double eta_ = 0.0;
    double kappa_ = 1.0;
    double r_ref_ = 1.0;
    double squash_eps_ = kDefaultSquashEps;
    DiscountFunction discount_{};
};

/// f(r, v) for the given spec. Throws SingularityError at the Hdtd pole.
double eval_target(const TransformSpec& spec, double r, double v);

/**
 * Hyperbolic-equivalent reward transform.
 *
 * Defined piecewise: g(0) = 0, and r_ref * exp(eta (R / r_ref - 1)) otherwise.
 * The exponential alone does not vanish at zero; the sparse-reward ordering
 * argument needs zero rewards to stay zero, hence the explicit branch.
 */
double hyperbolic_equivalent_g(const TransformSpec& spec, double reward);

/// h(x) = sign(x) (sqrt(|x| + 1) - 1) + eps x.
double squash(double eps, double x);
/// Closed-form inverse of squash.
double unsquash(double eps, double y);
double squash(const TransformSpec& spec, double x);
double unsquash(const TransformSpec& spec, double y);

/**
 * Analytic bound on |df/dv|.
 *
 * nullopt for Hdtd, which has no known bound. For SquashTarget the bound is
 * sup h' * gamma * sup (h^-1)' = (1/2 + eps) * gamma / eps, infinite at eps = 0.
 */
std::optional<double> lipschitz_bound(const TransformSpec& spec);

} // namespace nlb
