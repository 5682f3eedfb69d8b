#include "cli_config.hpp"

#include <fmt/core.h>

#include <fstream>
#include <initializer_list>
#include <string>

#include "smoothride/error.hpp"

namespace smoothride::cli {

namespace {

void reject_unknown(const nlohmann::json& doc, const std::string& where,
                    std::initializer_list<const char*> known) {
  for (const auto& item : doc.items()) {
    bool found = false;
    for (const char* k : known) found = found || item.key() == k;
    if (!found) throw ParseError(fmt::format("config: unknown key \"{}{}\"", where, item.key()));
  }
}

const nlohmann::json& section(const nlohmann::json& doc, const char* key) {
  static const nlohmann::json null;
  if (!doc.contains(key)) return null;
  const nlohmann::json& s = doc[key];
  if (!s.is_object()) throw ParseError(fmt::format("config: \"{}\" must be an object", key));
  return s;
}

template <typename T>
void read(const nlohmann::json& doc, const char* section_name, const char* key, T& field) {
  if (doc.is_null() || !doc.contains(key)) return;
  try {
    field = doc[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(fmt::format("config: field \"{}.{}\" has the wrong type", section_name, key));
  }
}

}  // namespace

Config config_from_json(const nlohmann::json& doc) {
  Config c;
  if (doc.is_null()) return c;
  if (!doc.is_object()) throw ParseError("config: top level must be an object");
  reject_unknown(doc, "",
                 {"objective", "filter", "solver", "reconstruction", "match", "compare", "psd",
                  "contours"});

  const auto& objective = section(doc, "objective");
  if (!objective.is_null()) {
    reject_unknown(objective, "objective.", {"variant", "time_weight"});
    std::string variant{variant_name(c.objective.variant)};
    read(objective, "objective", "variant", variant);
    c.objective.variant = parse_variant(variant);
    read(objective, "objective", "time_weight", c.objective.time_weight);
  }

  const auto& filter = section(doc, "filter");
  if (!filter.is_null()) {
    reject_unknown(filter, "filter.", {"tau1_s", "tau2_s", "cooldown_s"});
    const FilterConfig f = filter_config_from_json(filter);
    c.objective.filter = f.spec;
    c.objective.cooldown = f.cooldown;
  }

  const auto& solver = section(doc, "solver");
  if (!solver.is_null()) {
    reject_unknown(solver, "solver.",
                   {"tolerance", "max_iterations", "restarts", "perturbation", "seed", "memory"});
    c.solver = solver_settings_from_json(solver);
  }

  const auto& rec = section(doc, "reconstruction");
  if (!rec.is_null()) {
    reject_unknown(rec, "reconstruction.",
                   {"weights", "heading_smoothness", "max_iterations", "relative_tolerance",
                    "initial_fit_window_s", "align", "max_shift_s", "min_valid_speed"});
    if (rec.contains("weights")) c.weights = weight_schedule_from_json(rec["weights"]);
    read(rec, "reconstruction", "heading_smoothness", c.reconstruction.heading_smoothness);
    read(rec, "reconstruction", "max_iterations", c.reconstruction.max_iterations);
    read(rec, "reconstruction", "relative_tolerance", c.reconstruction.relative_tolerance);
    read(rec, "reconstruction", "initial_fit_window_s", c.reconstruction.initial_fit_window);
    read(rec, "reconstruction", "align", c.align);
    read(rec, "reconstruction", "max_shift_s", c.max_shift);
    read(rec, "reconstruction", "min_valid_speed", c.min_valid_speed);
  }

  const auto& match = section(doc, "match");
  if (!match.is_null()) {
    reject_unknown(match, "match.", {"time_tolerance_s"});
    read(match, "match", "time_tolerance_s", c.match_tolerance);
  }

  const auto& compare = section(doc, "compare");
  if (!compare.is_null()) {
    reject_unknown(compare, "compare.", {"time_match_tolerance_s"});
    read(compare, "compare", "time_match_tolerance_s", c.comparability_tolerance);
  }

  const auto& psd = section(doc, "psd");
  if (!psd.is_null()) {
    reject_unknown(psd, "psd.", {"rate_hz", "max_segment", "overlap", "detrend"});
    read(psd, "psd", "rate_hz", c.psd_rate);
    read(psd, "psd", "max_segment", c.welch.max_segment);
    read(psd, "psd", "overlap", c.welch.overlap);
    read(psd, "psd", "detrend", c.welch.detrend);
  }

  const auto& contours = section(doc, "contours");
  if (!contours.is_null()) {
    reject_unknown(contours, "contours.", {"factors"});
    read(contours, "contours", "factors", c.contour_factors);
  }

  c.objective.validate();
  c.weights.validate();
  if (c.reconstruction.max_iterations <= 0) {
    throw ValidationError("config: reconstruction.max_iterations must be > 0");
  }
  if (!(c.max_shift > 0.0)) throw ValidationError("config: reconstruction.max_shift_s must be > 0");
  if (!(c.match_tolerance > 0.0)) throw ValidationError("config: match.time_tolerance_s must be > 0");
  if (!(c.comparability_tolerance > 0.0)) {
    throw ValidationError("config: compare.time_match_tolerance_s must be > 0");
  }
  if (!(c.psd_rate > 0.0)) throw ValidationError("config: psd.rate_hz must be > 0");
  if (!(c.welch.overlap >= 0.0 && c.welch.overlap < 1.0)) {
    throw ValidationError("config: psd.overlap must be in [0, 1)");
  }
  for (double f : c.contour_factors) {
    if (!(f > 0.0)) throw ValidationError("config: contour factors must be > 0");
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return config_from_json(doc);
}

nlohmann::json config_to_json(const Config& c) {
  nlohmann::json rec = reconstruction_settings_to_json(c.reconstruction);
  rec["weights"] = weight_schedule_to_json(c.weights);
  rec["align"] = c.align;
  rec["max_shift_s"] = c.max_shift;
  rec["min_valid_speed"] = c.min_valid_speed;
  return {
      {"objective",
       {{"variant", variant_name(c.objective.variant)},
        {"time_weight", c.objective.time_weight}}},
      {"filter", filter_config_to_json({c.objective.filter, c.objective.cooldown})},
      {"solver", solver_settings_to_json(c.solver)},
      {"reconstruction", rec},
      {"match", {{"time_tolerance_s", c.match_tolerance}}},
      {"compare", {{"time_match_tolerance_s", c.comparability_tolerance}}},
      {"psd",
       {{"rate_hz", c.psd_rate},
        {"max_segment", c.welch.max_segment},
        {"overlap", c.welch.overlap},
        {"detrend", c.welch.detrend}}},
      {"contours", {{"factors", c.contour_factors}}},
  };
}

}  // namespace smoothride::cli
