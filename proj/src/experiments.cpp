#include "nlb/experiments.hpp"

#include "nlb/error.hpp"

#include <cmath>
#include <cstdio>

namespace nlb {

namespace {

std::string num(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_num(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

TransformSpec family_spec(DiscountFamily family, double gamma, double kappa) {
    return TransformSpec::value_discount({family, gamma, kappa});
}

} // namespace

std::string Axis::tick_label(std::size_t i) const {
    return i < labels.size() ? labels[i] : short_num(ticks.at(i));
}

std::size_t SweepResult::expected_cells() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size();
    return n;
}

double SweepResult::at(std::span<const std::size_t> index) const {
    if (index.size() != axes.size()) throw DomainError("sweep index has wrong rank");
    std::size_t flat = 0;
    for (std::size_t d = 0; d < axes.size(); ++d) {
        if (index[d] >= axes[d].size()) throw DomainError("sweep index out of range");
        flat = flat * axes[d].size() + index[d];
    }
    return cells.at(flat);
}

double SweepResult::at(std::size_t i, std::size_t j) const {
    const std::size_t idx[] = {i, j};
    return at(idx);
}

double SweepResult::at(std::size_t i, std::size_t j, std::size_t k) const {
    const std::size_t idx[] = {i, j, k};
    return at(idx);
}

SweepResult flatten_series(const SweepResult& result) {
    if (result.axes.size() <= 2) return result;
    SweepResult out;
    out.value_name = result.value_name;
    out.metadata = result.metadata;

    Axis series;
    for (std::size_t d = 0; d + 1 < result.axes.size(); ++d) {
        series.name += (d ? "," : "") + result.axes[d].name;
    }
    std::vector<std::size_t> idx(result.axes.size() - 1, 0);
    const std::size_t n_series = result.expected_cells() / result.axes.back().size();
    for (std::size_t i = 0; i < n_series; ++i) {
        std::string label;
        for (std::size_t d = 0; d < idx.size(); ++d) {
            if (d) label += ' ';
            label += result.axes[d].name + "=" + result.axes[d].tick_label(idx[d]);
        }
        series.ticks.push_back(static_cast<double>(i));
        series.labels.push_back(label);
        for (std::size_t d = idx.size(); d-- > 0;) {
            if (++idx[d] < result.axes[d].size()) break;
            idx[d] = 0;
        }
    }
    out.axes = {series, result.axes.back()};
    out.cells = result.cells;
    return out;
}

std::vector<double> default_curve_gammas() { return {0.25, 0.5, 0.75, 0.9, 0.99}; }

std::vector<double> default_v_grid() {
    std::vector<double> grid;
    for (int i = -100; i <= 100; ++i) grid.push_back(i / 10.0);
    return grid;
}

SweepResult discount_curves(std::span<const double> gammas, std::span<const double> v_grid,
                            double kappa) {
    if (gammas.empty() || v_grid.empty()) throw DomainError("discount_curves: empty grid");
    SweepResult r;
    r.value_name = "g";
    r.axes = {Axis{"gamma", {gammas.begin(), gammas.end()}, {}},
              Axis{"family", {0.0, 1.0}, {"linear", "power"}},
              Axis{"v", {v_grid.begin(), v_grid.end()}, {}}};
    r.metadata["kappa"] = num(kappa);
    r.cells.reserve(r.expected_cells());
    for (double gamma : gammas) {
        // Dashed reference curves are the plain gamma v, without kappa.
        const DiscountFunction linear{DiscountFamily::Linear, gamma, 1.0};
        const DiscountFunction power{DiscountFamily::Power, gamma, kappa};
        for (double v : v_grid) r.cells.push_back(discount_apply(linear, v));
        for (double v : v_grid) r.cells.push_back(discount_apply(power, v));
    }
    return r;
}

std::vector<double> default_gap_probabilities() { return {0.05, 0.1, 0.25, 0.5, 1.0}; }

std::vector<double> default_gap_gammas() {
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
    return grid;
}

Mdp gap_example_mdp(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("gap example: p must lie in (0, 1]");
    MdpBuilder b(4, 2);
    b.add(0, 0, 1, 1.0, 0.0);
    b.add(0, 1, 2, p, 0.0);
    if (p < 1.0) b.add(0, 1, 3, 1.0 - p, 0.0);
    for (std::size_t s : {1, 2})
        for (std::size_t a : {0, 1}) b.add(s, a, s, 1.0, 0.0);
    b.set_terminal(3);
    return b.build();
}

ValueVector gap_example_values(double p) { return {0.0, 1.0, 2.0 / p, 0.0}; }

Mdp gap_embedded_mdp(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("gap example: p must lie in (0, 1]");
    MdpBuilder b(5, 2);
    b.add(0, 0, 1, 1.0, 0.0);
    b.add(0, 1, 2, p, 0.0);
    if (p < 1.0) b.add(0, 1, 4, 1.0 - p, 0.0);
    for (std::size_t a : {0, 1}) {
        b.add(1, a, 3, 1.0, 1.0);
        b.add(2, a, 3, 1.0, 2.0 / p);
    }
    b.set_terminal(3);
    b.set_terminal(4);
    return b.build();
}

double action_gap(double p, double gamma, DiscountFamily family, double kappa, GapMode mode) {
    const auto spec = family_spec(family, gamma, kappa);
    if (mode == GapMode::Injected) {
        const auto q = action_values(gap_example_mdp(p), spec, gap_example_values(p));
        return q(0, 1) - q(0, 0);
    }
    const auto mdp = gap_embedded_mdp(p);
    const auto solved =
        fixed_point(mdp, Policy::uniform(mdp), spec, ValueVector(mdp.n_states(), 0.0));
    const auto q = action_values(mdp, spec, solved.values);
    return q(0, 1) - q(0, 0);
}

SweepResult action_gap_sweep(std::span<const double> p_list, std::span<const double> gamma_grid,
                             DiscountFamily family, double kappa, GapMode mode) {
    if (p_list.empty() || gamma_grid.empty()) throw DomainError("action_gap_sweep: empty grid");
    SweepResult r;
    r.value_name = "gap";
    r.axes = {Axis{"p", {p_list.begin(), p_list.end()}, {}},
              Axis{"gamma", {gamma_grid.begin(), gamma_grid.end()}, {}}};
    r.metadata["family"] = to_string(family);
    r.metadata["kappa"] = num(kappa);
    r.metadata["mode"] = mode == GapMode::Injected ? "injected" : "embedded";
    r.cells.reserve(r.expected_cells());
    for (double p : p_list)
        for (double gamma : gamma_grid) r.cells.push_back(action_gap(p, gamma, family, kappa, mode));
    return r;
}

std::vector<double> default_ordering_rewards() {
    std::vector<double> grid;
    for (int i = 0; i <= 18; ++i) grid.push_back(0.5 + 0.25 * i);
    return grid;
}

std::vector<std::size_t> default_ordering_delays() {
    std::vector<std::size_t> grid;
    for (std::size_t t = 0; t <= 50; ++t) grid.push_back(t);
    return grid;
}

OrderingGridResult ordering_grid(double gamma, double k, double r_ref,
                                 std::span<const double> reward_grid,
                                 std::span<const std::size_t> delay_grid, bool outer_log) {
    OrderingGridResult out;
    out.verdicts = verify_ordering_equivalence(gamma, k, r_ref, reward_grid, delay_grid, outer_log);

    auto& t = out.table;
    t.value_name = "agree";
    std::vector<double> delays;
    for (auto d : delay_grid) delays.push_back(static_cast<double>(d));
    t.axes = {Axis{"R", {reward_grid.begin(), reward_grid.end()}, {}}, Axis{"T", delays, {}}};
    t.cells.reserve(out.verdicts.size());
    for (const auto& v : out.verdicts) {
        if (v.boundary) {
            ++out.boundary;
            t.cells.push_back(-1.0);
            continue;
        }
        ++out.eligible;
        out.agreeing += v.agree ? 1 : 0;
        out.prefer_later += v.prefers_later_by_hyperbolic ? 1 : 0;
        t.cells.push_back(v.agree ? 1.0 : 0.0);
    }
    if (out.eligible > 0) {
        out.agreement_fraction =
            static_cast<double>(out.agreeing) / static_cast<double>(out.eligible);
    }
    t.metadata["gamma"] = num(gamma);
    t.metadata["k"] = num(k);
    t.metadata["r_ref"] = num(r_ref);
    t.metadata["eligible"] = std::to_string(out.eligible);
    t.metadata["boundary"] = std::to_string(out.boundary);
    t.metadata["agreement_fraction"] =
        out.agreement_fraction ? num(*out.agreement_fraction) : "n/a (no eligible cells)";
    return out;
}

OrderingGridResult ordering_grid(double gamma, double k, double r_ref) {
    const auto rewards = default_ordering_rewards();
    const auto delays = default_ordering_delays();
    return ordering_grid(gamma, k, r_ref, rewards, delays);
}

} // namespace nlb
