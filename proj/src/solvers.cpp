#include "nlb/solvers.hpp"

#include "nlb/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

namespace nlb {

namespace {

void check_values(const Mdp& mdp, const ValueVector& v) {
    if (v.size() != mdp.n_states()) {
        throw DomainError("value vector has " + std::to_string(v.size()) + " entries, mdp has " +
                          std::to_string(mdp.n_states()) + " states");
    }
}

double successor_value(const Mdp& mdp, const ValueVector& v, std::size_t s) {
    return mdp.is_terminal(s) ? 0.0 : v[s];
}

double expected_target(const Mdp& mdp, const TransformSpec& spec, const ValueVector& v,
                       std::size_t s, std::size_t a) {
    double q = 0.0;
    for (const auto& o : mdp.outcomes(s, a)) {
        const double next = successor_value(mdp, v, o.next_state);
        double inner = 0.0;
        for (const auto& r : o.rewards) inner += r.prob * eval_target(spec, r.value, next);
        q += o.prob * inner;
    }
    return q;
}

double sup_distance(const ValueVector& a, const ValueVector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

std::string fmt(const char* pattern, double x) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, x);
    return buf;
}

} // namespace

ValueVector apply_operator(const Mdp& mdp, const Policy& policy, const TransformSpec& spec,
                           const ValueVector& v) {
    check_values(mdp, v);
    ValueVector out(mdp.n_states(), 0.0);
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        if (mdp.is_terminal(s)) continue;
        double total = 0.0;
        for (const auto& ap : policy.at(s)) {
            if (ap.prob == 0.0) continue;
            total += ap.prob * expected_target(mdp, spec, v, s, ap.action);
        }
        out[s] = total;
    }
    return out;
}

double bellman_residual(const Mdp& mdp, const Policy& policy, const TransformSpec& spec,
                        const ValueVector& v) {
    return sup_distance(apply_operator(mdp, policy, spec, v), v);
}

SolveResult fixed_point(const Mdp& mdp, const Policy& policy, const TransformSpec& spec,
                        ValueVector v0, double tol, std::size_t max_iters) {
    if (!(tol > 0.0)) throw DomainError("fixed_point tolerance must be positive");
    check_values(mdp, v0);
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        if (mdp.is_terminal(s)) v0[s] = 0.0;

    SolveResult result;
    auto& diag = result.diagnostics;
    if (spec.nonexpansion_only()) {
        diag.warnings.push_back("kappa = 1 guarantees only a non-expansion; use kappa < 1 for a "
                                "strict contraction");
    }
    if (spec.kind() == TransformKind::Hdtd) {
        diag.warnings.push_back("hdtd carries no contraction certificate; convergence is checked "
                                "empirically");
    }

    ValueVector v = std::move(v0);
    std::size_t rising = 0;
    double log_ratio_sum = 0.0;
    std::size_t ratio_count = 0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        ValueVector next = apply_operator(mdp, policy, spec, v);
        const double residual = sup_distance(next, v);
        diag.iterations = it + 1;
        if (!diag.residuals.empty()) {
            const double prev = diag.residuals.back();
            if (prev > 0.0 && residual > 0.0) {
                log_ratio_sum += std::log(residual / prev);
                ++ratio_count;
            }
            rising = residual > prev ? rising + 1 : 0;
        }
        diag.residuals.push_back(residual);
        diag.empirical_rate = ratio_count ? std::exp(log_ratio_sum / ratio_count) : 0.0;

        if (!std::isfinite(residual)) {
            throw DivergenceError("fixed point iteration diverged: non-finite residual at sweep " +
                                      std::to_string(it + 1),
                                  it + 1, residual);
        }
        if (residual < tol) {
            diag.final_residual = residual;
            diag.converged = true;
            result.values = std::move(v);
            return result;
        }
        if (rising >= kDivergenceWindow) {
            throw DivergenceError(
                fmt("fixed point iteration diverged: residual %.6g after ", residual) +
                    std::to_string(kDivergenceWindow) + " consecutive increases",
                it + 1, residual);
        }
        v = std::move(next);
    }
    const double last = diag.residuals.empty() ? 0.0 : diag.residuals.back();
    throw NonConvergenceError(fmt("fixed point iteration did not converge: residual %.6g after ",
                                  last) +
                                  std::to_string(max_iters) + " sweeps",
                              max_iters, last);
}

SolveResult td0(const Mdp& mdp, const Policy& policy, const TransformSpec& spec,
                const TdConfig& cfg) {
    if (!cfg.visit_decay && !(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) {
        throw DomainError("td0 step size must lie in (0, 1]");
    }
    if (cfg.horizon < 1) throw DomainError("td0 horizon must be at least 1");

    ValueVector v = cfg.v0.empty() ? ValueVector(mdp.n_states(), 0.0) : cfg.v0;
    check_values(mdp, v);

    std::vector<std::size_t> starts;
    if (cfg.start_state) {
        if (*cfg.start_state >= mdp.n_states()) throw DomainError("td0 start state out of range");
        starts.push_back(*cfg.start_state);
    } else {
        for (std::size_t s = 0; s < mdp.n_states(); ++s)
            if (!mdp.is_terminal(s)) starts.push_back(s);
    }

    SolveResult result;
    auto& diag = result.diagnostics;
    std::vector<std::size_t> visits(mdp.n_states(), 0);
    const RngState base(cfg.seed);
    for (std::size_t e = 0; e < cfg.episodes && !starts.empty(); ++e) {
        RngState rng = base.split(e);
        const std::size_t start =
            starts.size() == 1 ? starts.front() : starts[rng.below(starts.size())];
        const auto traj = rollout(mdp, policy, start, cfg.horizon, rng);
        for (std::size_t t = 0; t < traj.steps.size(); ++t) {
            const auto& step = traj.steps[t];
            const double next = step.terminal ? 0.0 : v[step.next_state];
            double target = 0.0;
            try {
                target = eval_target(spec, step.reward, next);
            } catch (const SingularityError& err) {
                throw SingularityError(std::string(err.what()) + " (episode " +
                                       std::to_string(e) + ", step " + std::to_string(t) + ")");
            }
            const double alpha =
                cfg.visit_decay ? 1.0 / static_cast<double>(++visits[step.state]) : cfg.alpha;
            v[step.state] += alpha * (target - v[step.state]);
            ++diag.iterations;
        }
    }
    diag.final_residual = bellman_residual(mdp, policy, spec, v);
    diag.converged = diag.final_residual < cfg.residual_tol;
    diag.empirical_rate = std::numeric_limits<double>::quiet_NaN();
    result.values = std::move(v);
    return result;
}

ActionValueTable action_values(const Mdp& mdp, const TransformSpec& spec, const ValueVector& v) {
    check_values(mdp, v);
    ActionValueTable q(mdp.n_states(), mdp.n_actions());
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        if (mdp.is_terminal(s)) continue;
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) q(s, a) = expected_target(mdp, spec, v, s, a);
    }
    return q;
}

Policy greedy_policy(const ActionValueTable& q) {
    std::vector<std::size_t> actions(q.n_states(), 0);
    for (std::size_t s = 0; s < q.n_states(); ++s) {
        std::size_t best = 0;
        for (std::size_t a = 1; a < q.n_actions(); ++a)
            if (q(s, a) > q(s, best)) best = a;
        actions[s] = best;
    }
    return Policy::deterministic(q.n_actions(), actions);
}

double empirical_contraction(const Mdp& mdp, const Policy& policy, const TransformSpec& spec,
                             std::size_t pairs, double v_max, std::uint64_t seed) {
    if (pairs < 1) throw DomainError("empirical_contraction needs at least one pair");
    if (!(v_max > 0.0)) throw DomainError("empirical_contraction needs v_max > 0");

    const std::size_t n = mdp.n_states();
    const auto& term = mdp.terminal();
    // With every state terminal T is constant and no pair has a positive distance.
    if (std::all_of(term.begin(), term.end(), [](bool t) { return t; })) return 0.0;
    const RngState base(seed);
    auto ratio_for = [&](std::size_t i) {
        RngState rng = base.split(i);
        ValueVector v1(n, 0.0);
        ValueVector v2(n, 0.0);
        double denom = 0.0;
        do {
            for (std::size_t s = 0; s < n; ++s) {
                if (mdp.is_terminal(s)) continue;
                v1[s] = rng.uniform(-v_max, v_max);
                v2[s] = rng.uniform(-v_max, v_max);
            }
            denom = sup_distance(v1, v2);
        } while (denom < 1e-12);
        return sup_distance(apply_operator(mdp, policy, spec, v1),
                            apply_operator(mdp, policy, spec, v2)) /
               denom;
    };

    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::min<std::size_t>(pairs, 8));
    std::vector<double> best(workers, 0.0);
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < pairs; i += workers)
                        best[w] = std::max(best[w], ratio_for(i));
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return *std::max_element(best.begin(), best.end());
}

double default_v_max(const Mdp& mdp, const TransformSpec& spec) {
    double r_max = mdp.max_abs_reward();
    if (r_max == 0.0) r_max = 1.0;
    const double gamma = spec.gamma();
    return gamma < 1.0 ? r_max / (1.0 - gamma) : 10.0 * r_max;
}

} // namespace nlb
