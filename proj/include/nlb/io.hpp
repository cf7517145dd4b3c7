#pragma once

#include "nlb/experiments.hpp"
#include "nlb/mdp.hpp"
#include "nlb/returns.hpp"
#include "nlb/solvers.hpp"
#include "nlb/transforms.hpp"

#include "json.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nlb {

using json = nlohmann::json;

// Files. Failures throw IoError naming the path.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& value);

// Model files. Malformed documents throw ValidationError.
json to_json(const Mdp& mdp);
Mdp mdp_from_json(const json& doc);
json to_json(const Policy& policy);
Policy policy_from_json(const json& doc);

/// {"kind": ..., plus the parameters that kind uses}.
json to_json(const TransformSpec& spec);
/**
 * Kinds: linear, reward, power, linear-discount, squash, hdtd. Recognized
 * fields: gamma, k, kappa, r_ref, squash_eps; anything else is rejected.
 * Missing fields fall back to the documented defaults.
 */
TransformSpec transform_from_json(const json& doc);

json to_json(const ActionValueTable& q);
json to_json(const SolveDiagnostics& diag);
ValueVector values_from_json(const json& doc);

// CSV: RFC 4180 quoting, LF line endings, numbers with 17 significant digits.
std::string format_number(double x);
std::string to_csv(const SweepResult& result);
std::string to_csv(std::span<const OrderingVerdict> verdicts);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);
void emit_csv(std::span<const OrderingVerdict> verdicts, const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable parse_csv(const std::string& text);

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    /// Per-series dashed flag; missing entries are solid.
    std::vector<bool> dashed;
    int width = 720;
    int height = 440;
};

/// Line plot of a two-axis sweep: axis 0 indexes series, axis 1 is x.
std::string render_svg_lineplot(const SweepResult& result, const PlotOptions& options = {});
void emit_svg_lineplot(const SweepResult& result, const std::filesystem::path& path,
                       const PlotOptions& options = {});

} // namespace nlb
