#include "nlb/mdp.hpp"

#include "nlb/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace nlb {

namespace {

std::string fmt_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

std::string at(std::size_t s, std::size_t a) {
    return "(" + std::to_string(s) + "," + std::to_string(a) + ")";
}

} // namespace

double Outcome::mean_reward() const {
    double m = 0.0;
    for (const auto& r : rewards) m += r.prob * r.value;
    return m;
}

Mdp::Mdp(std::size_t n_states, std::size_t n_actions, std::vector<bool> terminal,
         std::vector<std::vector<Outcome>> rows)
    : n_states_(n_states), n_actions_(n_actions), terminal_(std::move(terminal)),
      rows_(std::move(rows)) {
    if (n_states_ == 0 || n_actions_ == 0) {
        throw ValidationError("mdp needs at least one state and one action");
    }
    if (terminal_.size() != n_states_) {
        throw ValidationError("terminal flags: expected " + std::to_string(n_states_) +
                              " entries, got " + std::to_string(terminal_.size()));
    }
    if (rows_.size() != n_states_ * n_actions_) {
        throw ValidationError("transition table has wrong size");
    }
    for (std::size_t s = 0; s < n_states_; ++s) {
        for (std::size_t a = 0; a < n_actions_; ++a) {
            for (const auto& o : rows_[s * n_actions_ + a]) {
                if (o.next_state >= n_states_) {
                    throw ValidationError("next state " + std::to_string(o.next_state) +
                                          " out of range at " + at(s, a));
                }
            }
        }
    }
}

bool Mdp::has_terminal_states() const {
    return std::find(terminal_.begin(), terminal_.end(), true) != terminal_.end();
}

std::span<const Outcome> Mdp::outcomes(std::size_t s, std::size_t a) const {
    if (s >= n_states_ || a >= n_actions_) {
        throw DomainError("state-action " + at(s, a) + " out of range");
    }
    return rows_[s * n_actions_ + a];
}

double Mdp::expected_reward(std::size_t s, std::size_t a) const {
    double m = 0.0;
    for (const auto& o : outcomes(s, a)) m += o.prob * o.mean_reward();
    return m;
}

double Mdp::max_abs_reward() const {
    double m = 0.0;
    for (const auto& row : rows_)
        for (const auto& o : row)
            for (const auto& r : o.rewards) m = std::max(m, std::abs(r.value));
    return m;
}

MdpBuilder::MdpBuilder(std::size_t n_states, std::size_t n_actions)
    : n_states_(n_states), n_actions_(n_actions), terminal_(n_states, false),
      rows_(n_states * n_actions) {}

MdpBuilder& MdpBuilder::set_terminal(std::size_t s, bool terminal) {
    terminal_.at(s) = terminal;
    return *this;
}

MdpBuilder& MdpBuilder::add(std::size_t s, std::size_t a, std::size_t next_state, double prob,
                            std::vector<RewardAtom> rewards) {
    if (s >= n_states_ || a >= n_actions_) {
        throw ValidationError("state-action " + at(s, a) + " out of range");
    }
    rows_[s * n_actions_ + a].push_back(Outcome{next_state, prob, std::move(rewards)});
    return *this;
}

MdpBuilder& MdpBuilder::add(std::size_t s, std::size_t a, std::size_t next_state, double prob,
                            double reward) {
    return add(s, a, next_state, prob, std::vector<RewardAtom>{{reward, 1.0}});
}

Mdp MdpBuilder::build() const { return Mdp(n_states_, n_actions_, terminal_, rows_); }

Policy::Policy(std::size_t n_actions, std::vector<std::vector<ActionProb>> probs)
    : n_actions_(n_actions), probs_(std::move(probs)) {}

Policy Policy::uniform(const Mdp& mdp) {
    std::vector<std::vector<ActionProb>> rows(mdp.n_states());
    const double p = 1.0 / static_cast<double>(mdp.n_actions());
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        if (mdp.is_terminal(s)) continue;
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) rows[s].push_back({a, p});
    }
    return Policy(mdp.n_actions(), std::move(rows));
}

Policy Policy::deterministic(std::size_t n_actions, const std::vector<std::size_t>& actions) {
    std::vector<std::vector<ActionProb>> rows;
    rows.reserve(actions.size());
    for (auto a : actions) rows.push_back({{a, 1.0}});
    return Policy(n_actions, std::move(rows));
}

ValidationReport validate(const Mdp& mdp) {
    ValidationReport report;
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        if (mdp.is_terminal(s)) {
            bool has_edges = false;
            for (std::size_t a = 0; a < mdp.n_actions(); ++a) has_edges |= !mdp.outcomes(s, a).empty();
            if (has_edges) {
                report.push_back(
                    {"terminal state " + std::to_string(s) + " has transitions", s, std::nullopt});
            }
            continue;
        }
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            const auto row = mdp.outcomes(s, a);
            double sum = 0.0;
            for (std::size_t i = 0; i < row.size(); ++i) {
                const auto& o = row[i];
                if (!(o.prob >= 0.0) || !std::isfinite(o.prob)) {
                    report.push_back({"negative probability " + fmt_num(o.prob) + " at " + at(s, a),
                                      s, a});
                }
                sum += o.prob;
                double rsum = 0.0;
                bool bad_reward = false;
                for (const auto& r : o.rewards) {
                    if (!(r.prob >= 0.0) || !std::isfinite(r.prob)) bad_reward = true;
                    if (!std::isfinite(r.value)) bad_reward = true;
                    rsum += r.prob;
                }
                if (bad_reward) {
                    report.push_back({"invalid reward atom at " + at(s, a) + " -> " +
                                          std::to_string(o.next_state),
                                      s, a});
                }
                if (std::abs(rsum - 1.0) > kProbabilityTolerance) {
                    report.push_back({"reward distribution sum " + fmt_num(rsum) + " at " +
                                          at(s, a) + " -> " + std::to_string(o.next_state),
                                      s, a});
                }
            }
            if (std::abs(sum - 1.0) > kProbabilityTolerance) {
                report.push_back({"row sum " + fmt_num(sum) + " at " + at(s, a), s, a});
            }
        }
    }
    return report;
}

ValidationReport validate(const Mdp& mdp, const Policy& policy) {
    ValidationReport report;
    if (policy.n_states() != mdp.n_states()) {
        report.push_back({"policy covers " + std::to_string(policy.n_states()) +
                              " states, mdp has " + std::to_string(mdp.n_states()),
                          std::nullopt, std::nullopt});
        return report;
    }
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        if (mdp.is_terminal(s)) continue;
        double sum = 0.0;
        for (const auto& ap : policy.at(s)) {
            if (ap.action >= mdp.n_actions()) {
                report.push_back({"invalid action " + std::to_string(ap.action) + " in state " +
                                      std::to_string(s),
                                  s, ap.action});
            }
            if (!(ap.prob >= 0.0)) {
                report.push_back({"negative action probability in state " + std::to_string(s), s,
                                  ap.action});
            }
            sum += ap.prob;
        }
        if (std::abs(sum - 1.0) > kProbabilityTolerance) {
            report.push_back({"policy row sum " + fmt_num(sum) + " in state " + std::to_string(s),
                              s, std::nullopt});
        }
    }
    return report;
}

StepSample sample_step(const Mdp& mdp, std::size_t state, std::size_t action, RngState rng) {
    if (mdp.is_terminal(state)) {
        throw DomainError("cannot sample from terminal state " + std::to_string(state));
    }
    const auto row = mdp.outcomes(state, action);
    if (row.empty()) {
        throw DomainError("no transitions at " + at(state, action));
    }
    // Inverse-CDF draws; the last entry absorbs round-off in the cumulative sums.
    double u = rng.uniform();
    const Outcome* chosen = &row.back();
    for (const auto& o : row) {
        if (u < o.prob) {
            chosen = &o;
            break;
        }
        u -= o.prob;
    }
    double w = rng.uniform();
    double reward = chosen->rewards.empty() ? 0.0 : chosen->rewards.back().value;
    for (const auto& r : chosen->rewards) {
        if (w < r.prob) {
            reward = r.value;
            break;
        }
        w -= r.prob;
    }
    return StepSample{reward, chosen->next_state, mdp.is_terminal(chosen->next_state), rng};
}

std::size_t sample_action(const Policy& policy, std::size_t state, RngState& rng) {
    const auto row = policy.at(state);
    if (row.empty()) {
        throw DomainError("policy has no actions for state " + std::to_string(state));
    }
    if (row.size() == 1) return row.front().action;
    double u = rng.uniform();
    for (const auto& ap : row) {
        if (u < ap.prob) return ap.action;
        u -= ap.prob;
    }
    return row.back().action;
}

Trajectory rollout(const Mdp& mdp, const Policy& policy, std::size_t start_state,
                   std::size_t horizon, RngState rng) {
    if (horizon < 1) throw DomainError("rollout horizon must be at least 1");
    Trajectory traj;
    traj.seed = rng.key();
    std::size_t s = start_state;
    if (mdp.is_terminal(s)) return traj;
    traj.steps.reserve(std::min<std::size_t>(horizon, 1024));
    for (std::size_t t = 0; t < horizon; ++t) {
        const std::size_t a = sample_action(policy, s, rng);
        const auto out = sample_step(mdp, s, a, rng);
        rng = out.rng;
        traj.steps.push_back({s, a, out.reward, out.next_state, out.terminal});
        if (out.terminal) break;
        s = out.next_state;
    }
    return traj;
}

std::vector<double> policy_transition_matrix(const Mdp& mdp, const Policy& policy) {
    const std::size_t n = mdp.n_states();
    std::vector<double> p(n * n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        if (mdp.is_terminal(s)) continue;
        for (const auto& ap : policy.at(s)) {
            for (const auto& o : mdp.outcomes(s, ap.action)) {
                p[s * n + o.next_state] += ap.prob * o.prob;
            }
        }
    }
    return p;
}

std::vector<double> stationary_distribution(const Mdp& mdp, const Policy& policy, double tol,
                                            std::size_t max_iters) {
    if (mdp.has_terminal_states()) {
        throw DomainError("stationary distribution requires an mdp without terminal states");
    }
    if (!(tol > 0.0)) throw DomainError("stationary distribution tolerance must be positive");
    const std::size_t n = mdp.n_states();
    const auto p = policy_transition_matrix(mdp, policy);

    auto step = [&](const std::vector<double>& d) {
        std::vector<double> next(n, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            if (d[s] == 0.0) continue;
            for (std::size_t t = 0; t < n; ++t) next[t] += d[s] * p[s * n + t];
        }
        return next;
    };

    std::vector<double> d(n, 1.0 / static_cast<double>(n));
    double residual = 0.0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        const auto dp = step(d);
        residual = 0.0;
        for (std::size_t s = 0; s < n; ++s) residual += std::abs(dp[s] - d[s]);
        if (residual < tol) return d;
        double total = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            d[s] = 0.5 * (d[s] + dp[s]);
            total += d[s];
        }
        for (auto& x : d) x /= total;
    }
    throw NonConvergenceError("stationary distribution did not converge (residual " +
                                  fmt_num(residual) + "); chain may not be ergodic",
                              max_iters, residual);
}

} // namespace nlb
