#include "nlb/io.hpp"

#include "nlb/defaults.hpp"
#include "nlb/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace nlb {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

json read_json(const fs::path& path) {
    const auto text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

namespace {

// Wraps nlohmann type/lookup errors into ValidationError with a context prefix.
template <class F>
auto parse_guard(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ValidationError(std::string(what) + ": " + e.what());
    }
}

std::size_t index_field(const json& obj, const char* key, std::size_t limit, const char* what) {
    if (!obj.contains(key)) throw ValidationError(std::string(what) + ": missing \"" + key + "\"");
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ValidationError(std::string(what) + ": \"" + key + "\" must be a non-negative integer");
    }
    const auto i = v.get<std::size_t>();
    if (i >= limit) {
        throw ValidationError(std::string(what) + ": \"" + key + "\" = " + std::to_string(i) +
                              " out of range");
    }
    return i;
}

} // namespace

json to_json(const Mdp& mdp) {
    json doc;
    doc["n_states"] = mdp.n_states();
    doc["n_actions"] = mdp.n_actions();
    doc["terminal"] = mdp.terminal();
    json rows = json::array();
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            const auto out = mdp.outcomes(s, a);
            if (out.empty()) continue;
            json list = json::array();
            for (const auto& o : out) {
                json rewards = json::array();
                for (const auto& r : o.rewards) rewards.push_back({{"r", r.value}, {"p", r.prob}});
                list.push_back({{"s2", o.next_state}, {"p", o.prob}, {"rewards", rewards}});
            }
            rows.push_back({{"s", s}, {"a", a}, {"out", list}});
        }
    }
    doc["transitions"] = rows;
    return doc;
}

Mdp mdp_from_json(const json& doc) {
    return parse_guard("mdp", [&] {
        if (!doc.is_object()) throw ValidationError("mdp: document must be an object");
        const auto n_states = doc.at("n_states").get<std::size_t>();
        const auto n_actions = doc.at("n_actions").get<std::size_t>();
        if (n_states == 0 || n_actions == 0) {
            throw ValidationError("mdp: n_states and n_actions must be positive");
        }
        std::vector<bool> terminal(n_states, false);
        if (doc.contains("terminal")) {
            const auto flags = doc.at("terminal").get<std::vector<bool>>();
            if (flags.size() != n_states) {
                throw ValidationError("mdp: \"terminal\" needs " + std::to_string(n_states) +
                                      " entries");
            }
            terminal = flags;
        }
        std::vector<std::vector<Outcome>> rows(n_states * n_actions);
        std::vector<bool> seen(n_states * n_actions, false);
        for (const auto& entry : doc.at("transitions")) {
            const auto s = index_field(entry, "s", n_states, "mdp transition");
            const auto a = index_field(entry, "a", n_actions, "mdp transition");
            if (seen[s * n_actions + a]) {
                throw ValidationError("mdp: duplicate transitions for (" + std::to_string(s) + "," +
                                      std::to_string(a) + ")");
            }
            seen[s * n_actions + a] = true;
            auto& row = rows[s * n_actions + a];
            for (const auto& o : entry.at("out")) {
                Outcome out;
                out.next_state = index_field(o, "s2", n_states, "mdp outcome");
                out.prob = o.at("p").get<double>();
                if (o.contains("rewards")) {
                    for (const auto& r : o.at("rewards")) {
                        out.rewards.push_back({r.at("r").get<double>(), r.at("p").get<double>()});
                    }
                } else {
                    out.rewards.push_back({0.0, 1.0});
                }
                row.push_back(std::move(out));
            }
        }
        return Mdp(n_states, n_actions, std::move(terminal), std::move(rows));
    });
}

json to_json(const Policy& policy) {
    json rows = json::array();
    for (std::size_t s = 0; s < policy.n_states(); ++s) {
        json actions = json::array();
        for (const auto& ap : policy.at(s)) actions.push_back({{"a", ap.action}, {"p", ap.prob}});
        if (!actions.empty()) rows.push_back({{"s", s}, {"actions", actions}});
    }
    return {{"n_states", policy.n_states()}, {"n_actions", policy.n_actions()}, {"probs", rows}};
}

Policy policy_from_json(const json& doc) {
    return parse_guard("policy", [&] {
        if (!doc.is_object()) throw ValidationError("policy: document must be an object");
        const auto n_states = doc.at("n_states").get<std::size_t>();
        const auto n_actions = doc.at("n_actions").get<std::size_t>();
        std::vector<std::vector<ActionProb>> probs(n_states);
        std::vector<bool> seen(n_states, false);
        for (const auto& entry : doc.at("probs")) {
            const auto s = index_field(entry, "s", n_states, "policy entry");
            if (seen[s]) throw ValidationError("policy: duplicate entry for state " + std::to_string(s));
            seen[s] = true;
            for (const auto& ap : entry.at("actions")) {
                probs[s].push_back(
                    {index_field(ap, "a", n_actions, "policy action"), ap.at("p").get<double>()});
            }
        }
        return Policy(n_actions, std::move(probs));
    });
}

json to_json(const TransformSpec& spec) {
    switch (spec.kind()) {
    case TransformKind::Linear:
        return {{"kind", "linear"}, {"gamma", spec.gamma()}};
    case TransformKind::RewardTransform:
        return {{"kind", "reward"}, {"gamma", spec.gamma()}, {"k", spec.k()}, {"r_ref", spec.r_ref()}};
    case TransformKind::ValueDiscount:
        return {{"kind", spec.discount().family == DiscountFamily::Power ? "power" : "linear-discount"},
                {"gamma", spec.gamma()},
                {"kappa", spec.kappa()}};
    case TransformKind::SquashTarget:
        return {{"kind", "squash"}, {"gamma", spec.gamma()}, {"squash_eps", spec.squash_eps()}};
    case TransformKind::Hdtd:
        return {{"kind", "hdtd"}, {"k", spec.k()}};
    }
    return {};
}

TransformSpec transform_from_json(const json& doc) {
    return parse_guard("transform", [&] {
        if (!doc.is_object()) throw ValidationError("transform: expected an object");
        static const std::set<std::string> known = {"kind", "gamma", "k", "kappa", "r_ref",
                                                    "squash_eps"};
        for (const auto& item : doc.items()) {
            if (!known.count(item.key())) {
                throw ValidationError("transform: unknown key \"" + item.key() + "\"");
            }
        }
        auto get = [&](const char* key, double fallback) {
            return doc.contains(key) ? doc.at(key).get<double>() : fallback;
        };
        const auto kind = doc.at("kind").get<std::string>();
        const double gamma = get("gamma", defaults::gamma);
        if (kind == "linear") return TransformSpec::linear(gamma);
        if (kind == "reward") {
            return TransformSpec::hyperbolic_reward(gamma, get("k", defaults::k),
                                                    get("r_ref", defaults::r_ref));
        }
        if (kind == "power") return TransformSpec::power_discount(gamma, get("kappa", defaults::kappa));
        if (kind == "linear-discount") {
            return TransformSpec::linear_discount(gamma, get("kappa", defaults::kappa));
        }
        if (kind == "squash") {
            return TransformSpec::squash_target(gamma, get("squash_eps", defaults::squash_eps));
        }
        if (kind == "hdtd") return TransformSpec::hdtd(get("k", defaults::k));
        throw ValidationError("transform: unknown kind \"" + kind + "\"");
    });
}

json to_json(const ActionValueTable& q) {
    json rows = json::array();
    for (std::size_t s = 0; s < q.n_states(); ++s) {
        json row = json::array();
        for (std::size_t a = 0; a < q.n_actions(); ++a) row.push_back(q(s, a));
        rows.push_back(row);
    }
    return rows;
}

json to_json(const SolveDiagnostics& diag) {
    json doc;
    doc["iterations"] = diag.iterations;
    doc["final_residual"] = diag.final_residual;
    doc["converged"] = diag.converged;
    // NaN has no JSON spelling.
    if (std::isfinite(diag.empirical_rate)) {
        doc["empirical_rate"] = diag.empirical_rate;
    } else {
        doc["empirical_rate"] = nullptr;
    }
    return doc;
}

ValueVector values_from_json(const json& doc) {
    return parse_guard("values", [&] {
        if (!doc.is_array()) throw ValidationError("values: expected a JSON array of numbers");
        return doc.get<ValueVector>();
    });
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void append_row(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    out += '\n';
}

} // namespace

std::string to_csv(const SweepResult& result) {
    if (result.cells.size() != result.expected_cells()) {
        throw DomainError("sweep result has " + std::to_string(result.cells.size()) +
                          " cells, axes need " + std::to_string(result.expected_cells()));
    }
    std::string out;
    std::vector<std::string> header;
    for (const auto& a : result.axes) header.push_back(a.name);
    header.push_back(result.value_name);
    append_row(out, header);

    std::vector<std::size_t> idx(result.axes.size(), 0);
    for (double cell : result.cells) {
        std::vector<std::string> fields;
        for (std::size_t d = 0; d < idx.size(); ++d) {
            const auto& axis = result.axes[d];
            fields.push_back(idx[d] < axis.labels.size() ? axis.labels[idx[d]]
                                                         : format_number(axis.ticks[idx[d]]));
        }
        fields.push_back(format_number(cell));
        append_row(out, fields);
        for (std::size_t d = idx.size(); d-- > 0;) {
            if (++idx[d] < result.axes[d].size()) break;
            idx[d] = 0;
        }
    }
    return out;
}

std::string to_csv(std::span<const OrderingVerdict> verdicts) {
    std::string out;
    append_row(out, {"R", "T", "G0", "prefers_G", "prefers_H", "agree", "boundary"});
    auto b = [](bool x) { return std::string(x ? "true" : "false"); };
    for (const auto& v : verdicts) {
        append_row(out, {format_number(v.reward), std::to_string(v.delay), format_number(v.g_return),
                         b(v.prefers_later_by_g), b(v.prefers_later_by_hyperbolic), b(v.agree),
                         b(v.boundary)});
    }
    return out;
}

void emit_csv(const SweepResult& result, const fs::path& path) { write_text(path, to_csv(result)); }

void emit_csv(std::span<const OrderingVerdict> verdicts, const fs::path& path) {
    write_text(path, to_csv(verdicts));
}

CsvTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            record.push_back(std::move(field));
            records.push_back(std::move(record));
            field.clear();
            record.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw ValidationError("csv: unterminated quoted field");
    if (any) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    CsvTable table;
    if (records.empty()) return table;
    table.header = std::move(records.front());
    table.rows.assign(std::make_move_iterator(records.begin() + 1),
                      std::make_move_iterator(records.end()));
    return table;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string px(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string format_tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

// Roughly five round-numbered ticks covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

} // namespace

std::string render_svg_lineplot(const SweepResult& result, const PlotOptions& options) {
    if (result.axes.size() != 2) {
        throw DomainError("svg line plot: unsupported shape, need exactly one series axis and one "
                          "x axis (got " +
                          std::to_string(result.axes.size()) + " axes)");
    }
    if (result.cells.size() != result.expected_cells()) {
        throw DomainError("svg line plot: cell count does not match axes");
    }
    const auto& series = result.axes[0];
    const auto& xs = result.axes[1];
    if (series.size() == 0 || xs.size() == 0) throw DomainError("svg line plot: empty axis");

    double x_lo = *std::min_element(xs.ticks.begin(), xs.ticks.end());
    double x_hi = *std::max_element(xs.ticks.begin(), xs.ticks.end());
    double y_lo = 0.0;
    double y_hi = 0.0;
    for (double c : result.cells) {
        if (!std::isfinite(c)) throw DomainError("svg line plot: non-finite cell");
        y_lo = std::min(y_lo, c);
        y_hi = std::max(y_hi, c);
    }
    if (x_hi - x_lo <= 0.0) {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    if (y_hi - y_lo <= 0.0) {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    const double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    const double left = 70, right = 190, top = 40, bottom = 60;
    const double w = options.width, h = options.height;
    const double plot_w = w - left - right;
    const double plot_h = h - top - bottom;
    auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto sy = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        svg << "<text x=\"" << px(left + plot_w / 2) << "\" y=\"22\" text-anchor=\"middle\" "
            << "font-size=\"15\">" << xml_escape(options.title) << "</text>\n";
    }

    // Frame, grid ticks and labels.
    svg << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(plot_w)
        << "\" height=\"" << px(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(x_lo, x_hi)) {
        svg << "<line x1=\"" << px(sx(t)) << "\" y1=\"" << px(top + plot_h) << "\" x2=\""
            << px(sx(t)) << "\" y2=\"" << px(top + plot_h + 5) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(sx(t)) << "\" y=\"" << px(top + plot_h + 19)
            << "\" text-anchor=\"middle\">" << format_tick(t) << "</text>\n";
    }
    for (double t : nice_ticks(y_lo, y_hi)) {
        svg << "<line x1=\"" << px(left - 5) << "\" y1=\"" << px(sy(t)) << "\" x2=\"" << px(left)
            << "\" y2=\"" << px(sy(t)) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(left - 8) << "\" y=\"" << px(sy(t) + 4)
            << "\" text-anchor=\"end\">" << format_tick(t) << "</text>\n";
    }
    const std::string x_label = options.x_label.empty() ? xs.name : options.x_label;
    const std::string y_label = options.y_label.empty() ? result.value_name : options.y_label;
    svg << "<text x=\"" << px(left + plot_w / 2) << "\" y=\"" << px(h - 15)
        << "\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n";
    svg << "<text x=\"18\" y=\"" << px(top + plot_h / 2) << "\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 18 " << px(top + plot_h / 2) << ")\">" << xml_escape(y_label)
        << "</text>\n";

    // Zero line.
    svg << "<line x1=\"" << px(left) << "\" y1=\"" << px(sy(0.0)) << "\" x2=\"" << px(left + plot_w)
        << "\" y2=\"" << px(sy(0.0)) << "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";

    const std::size_t n_x = xs.size();
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        const bool dashed = i < options.dashed.size() && options.dashed[i];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (dashed) svg << " stroke-dasharray=\"6,4\"";
        svg << " points=\"";
        for (std::size_t j = 0; j < n_x; ++j) {
            if (j) svg << ' ';
            svg << px(sx(xs.ticks[j])) << ',' << px(sy(result.cells[i * n_x + j]));
        }
        svg << "\"/>\n";

        const double ly = top + 10 + 16 * static_cast<double>(i);
        const double lx = left + plot_w + 15;
        svg << "<line x1=\"" << px(lx) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(lx + 24)
            << "\" y2=\"" << px(ly) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (dashed) svg << " stroke-dasharray=\"6,4\"";
        svg << "/>\n";
        svg << "<text x=\"" << px(lx + 30) << "\" y=\"" << px(ly + 4) << "\">"
            << xml_escape(i < series.labels.size() ? series.labels[i]
                                                   : series.name + "=" + series.tick_label(i))
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_svg_lineplot(const SweepResult& result, const fs::path& path,
                       const PlotOptions& options) {
    write_text(path, render_svg_lineplot(result, options));
}

} // namespace nlb
