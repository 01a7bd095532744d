#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgs/compare.hpp"
#include "tgs/curve.hpp"
#include "tgs/errors.hpp"
#include "tgs/mask.hpp"
#include "tgs/matching.hpp"
#include "tgs/scenario.hpp"

namespace tgs::io {

using nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << text;
}

// ---- curves -------------------------------------------------------------
// {"length": T, "values": [...], "raw": bool?}; values outside [0,1] are
// accepted only when "raw" is true.

struct CurveFile {
  bool raw = false;
  std::vector<double> values;
};

inline CurveFile curve_from_json(const json& j) {
  CurveFile file;
  try {
    file.raw = j.value("raw", false);
    file.values = j.at("values").get<std::vector<double>>();
    const auto length = j.at("length").get<std::size_t>();
    if (length != file.values.size())
      throw ValidationError("curve file: length field does not match values");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("curve file: ") + e.what());
  }
  if (file.raw) {
    RawScoreCurve check(file.values);  // validates
  } else {
    SimilarityCurve check(file.values);
  }
  return file;
}

inline CurveFile load_curve(const std::string& path) {
  return curve_from_json(read_json_file(path));
}

inline json curve_to_json(const SimilarityCurve& curve) {
  return json{{"length", curve.length()}, {"values", curve.values}};
}

inline json curve_to_json(const RawScoreCurve& curve) {
  return json{{"length", curve.length()}, {"values", curve.values}, {"raw", true}};
}

// ---- masks --------------------------------------------------------------
// {"h": H, "w": W, "rows": ["0110", ...]} with bit-exact text rows.

inline MaskFrame mask_from_json(const json& j) {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<std::string> rows;
  try {
    h = j.at("h").get<std::size_t>();
    w = j.at("w").get<std::size_t>();
    rows = j.at("rows").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("mask file: ") + e.what());
  }
  if (rows.size() != h)
    throw ValidationError("mask file: row count does not match h");
  MaskFrame m(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    if (rows[r].size() != w)
      throw ValidationError("mask file: row length does not match w");
    for (std::size_t c = 0; c < w; ++c) {
      if (rows[r][c] != '0' && rows[r][c] != '1')
        throw ValidationError("mask file: rows must contain only 0 and 1");
      m.set(r, c, rows[r][c] == '1');
    }
  }
  return m;
}

inline json mask_to_json(const MaskFrame& m) {
  std::vector<std::string> rows;
  rows.reserve(m.height);
  for (std::size_t r = 0; r < m.height; ++r) {
    std::string row(m.width, '0');
    for (std::size_t c = 0; c < m.width; ++c)
      if (m.at(r, c)) row[c] = '1';
    rows.push_back(std::move(row));
  }
  return json{{"h", m.height}, {"w", m.width}, {"rows", rows}};
}

// ---- token files ----------------------------------------------------------
// {"find": [[...]], "frames": [[...]], "labels": [[0|1,...]],
//  "tau": 0.07, "lambda_p": 2.0, "omega": null | [[i,j],...]}

inline TokenMatrix tokens_from_json(const json& j) {
  TokenMatrix tm;
  try {
    tm.find_tokens = j.at("find").get<std::vector<std::vector<double>>>();
    tm.frame_tokens = j.at("frames").get<std::vector<std::vector<double>>>();
    tm.labels = j.at("labels").get<std::vector<std::vector<int>>>();
    tm.temperature = j.value("tau", 0.07);
    tm.positive_weight = j.value("lambda_p", 2.0);
    if (j.contains("omega") && !j.at("omega").is_null()) {
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (const auto& entry : j.at("omega")) {
        if (!entry.is_array() || entry.size() != 2)
          throw ValidationError("token file: omega entries must be [i, j] pairs");
        pairs.emplace_back(entry[0].get<std::size_t>(), entry[1].get<std::size_t>());
      }
      tm.valid_pairs = std::move(pairs);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("token file: ") + e.what());
  }
  validate_token_matrix(tm);
  return tm;
}

inline TokenMatrix load_tokens(const std::string& path) {
  return tokens_from_json(read_json_file(path));
}

// ---- scenarios ------------------------------------------------------------

inline Scenario scenario_from_json(const json& j) {
  Scenario cfg;
  try {
    cfg.horizon = j.at("horizon").get<std::int64_t>();
    const auto gt = j.at("gt_interval");
    if (!gt.is_array() || gt.size() != 2)
      throw ValidationError("scenario file: gt_interval must be [start, end]");
    cfg.gt_interval = {gt[0].get<std::int64_t>(), gt[1].get<std::int64_t>()};
    const auto& cm = j.at("curve_model");
    for (const auto& b : cm.at("bumps")) {
      cfg.curve_model.bumps.push_back(GaussianBump{
          b.at("center").get<double>(), b.at("width").get<double>(),
          b.at("amplitude").get<double>()});
    }
    cfg.curve_model.noise_sigma = cm.value("noise_sigma", 0.0);
    const auto& tr = j.at("tracker");
    cfg.tracker.q0 = tr.value("q0", 0.98);
    cfg.tracker.track_decay = tr.value("track_decay", 0.0);
    cfg.tracker.quality_decay = tr.value("quality_decay", 0.0);
    cfg.tracker.p_in = tr.value("p_in", 1.0);
    cfg.tracker.p_out = tr.value("p_out", 0.0);
    const auto& g = j.at("mask_geometry");
    cfg.mask_geometry.grid_h = g.at("grid_h").get<std::size_t>();
    cfg.mask_geometry.grid_w = g.at("grid_w").get<std::size_t>();
    cfg.mask_geometry.rect_h = g.at("rect_h").get<std::size_t>();
    cfg.mask_geometry.rect_w = g.at("rect_w").get<std::size_t>();
    cfg.mask_geometry.x0 = g.value("x0", 0.0);
    cfg.mask_geometry.y0 = g.value("y0", 0.0);
    cfg.mask_geometry.vx = g.value("vx", 0.0);
    cfg.mask_geometry.vy = g.value("vy", 0.0);
    cfg.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario file: ") + e.what());
  }
  validate_scenario(cfg);
  return cfg;
}

inline json scenario_to_json(const Scenario& cfg) {
  json bumps = json::array();
  for (const auto& b : cfg.curve_model.bumps)
    bumps.push_back(json{{"center", b.center},
                         {"width", b.width},
                         {"amplitude", b.amplitude}});
  return json{
      {"horizon", cfg.horizon},
      {"gt_interval", {cfg.gt_interval.start, cfg.gt_interval.end}},
      {"curve_model",
       {{"bumps", bumps}, {"noise_sigma", cfg.curve_model.noise_sigma}}},
      {"tracker",
       {{"q0", cfg.tracker.q0},
        {"track_decay", cfg.tracker.track_decay},
        {"quality_decay", cfg.tracker.quality_decay},
        {"p_in", cfg.tracker.p_in},
        {"p_out", cfg.tracker.p_out}}},
      {"mask_geometry",
       {{"grid_h", cfg.mask_geometry.grid_h},
        {"grid_w", cfg.mask_geometry.grid_w},
        {"rect_h", cfg.mask_geometry.rect_h},
        {"rect_w", cfg.mask_geometry.rect_w},
        {"x0", cfg.mask_geometry.x0},
        {"y0", cfg.mask_geometry.y0},
        {"vx", cfg.mask_geometry.vx},
        {"vy", cfg.mask_geometry.vy}}},
      {"seed", cfg.seed}};
}

/// Loads a scenario file and materializes it. When the file embeds the
/// derived "curve" (as written by `gen`), the loader recomputes and checks
/// it, so stale embedded curves are rejected instead of silently trusted.
inline MaterializedScenario load_scenario(const std::string& path) {
  const json j = read_json_file(path);
  const Scenario cfg = scenario_from_json(j);
  MaterializedScenario sc = gen_scenario(cfg);
  if (j.contains("curve") && !j.at("curve").is_null()) {
    const CurveFile embedded = curve_from_json(j.at("curve"));
    if (embedded.values != sc.curve.values)
      throw ValidationError(path + ": embedded curve does not match the config");
  }
  return sc;
}

// ---- comparison results -----------------------------------------------------

inline json compare_to_json(const CompareResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back(json{{"strategy", r.strategy},
                        {"seed", r.seed},
                        {"k", r.k},
                        {"jf", r.jf},
                        {"j_mean", r.j_mean},
                        {"f_mean", r.f_mean},
                        {"tsg_iou", r.tsg_iou},
                        {"n_updates", r.n_updates}});
  }
  json summary = json::array();
  for (const auto& s : result.summary) {
    summary.push_back(json{{"strategy", s.strategy},
                           {"runs", s.runs},
                           {"jf_mean", s.jf_mean},
                           {"jf_std", s.jf_std},
                           {"miou_mean", s.tsg_iou_mean},
                           {"miou_std", s.tsg_iou_std}});
  }
  return json{{"rows", rows}, {"summary", summary}};
}

}  // namespace tgs::io
