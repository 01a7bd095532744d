// Command-line front end: scenario generation, grounding, sampling, the
// matching loss, mask propagation, and strategy comparison over curve /
// token / scenario JSON files.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tgs/compare.hpp"
#include "tgs/json_io.hpp"
#include "tgs/matching.hpp"
#include "tgs/pipeline.hpp"

namespace {

using tgs::io::json;

struct CurveOptions {
  std::string path;
  std::int64_t frames = 0;  // 0 -> keep native length
  double sigma = 1.0;
  std::size_t radius = 3;
  bool no_smooth = false;
};

void add_curve_options(CLI::App* cmd, CurveOptions& opts) {
  cmd->add_option("--curve", opts.path, "Curve JSON file")->required();
  cmd->add_option("--frames", opts.frames,
                  "Resample the curve to this many frames (0 keeps the native length)");
  cmd->add_option("--sigma", opts.sigma, "Gaussian smoothing sigma (frames)");
  cmd->add_option("--radius", opts.radius, "Gaussian smoothing half-width");
  cmd->add_flag("--no-smooth", opts.no_smooth, "Skip Gaussian smoothing");
}

// Raw curves are resampled (optional), activated, then smoothed; similarity
// curves skip activation.
tgs::SimilarityCurve load_conditioned_curve(const CurveOptions& opts) {
  const tgs::io::CurveFile file = tgs::io::load_curve(opts.path);
  tgs::SimilarityCurve curve = [&] {
    if (file.raw) {
      tgs::RawScoreCurve raw(file.values);
      if (opts.frames > 0)
        raw = tgs::resample_linear(raw, static_cast<std::size_t>(opts.frames));
      return tgs::activate(raw);
    }
    tgs::SimilarityCurve sim(file.values);
    if (opts.frames > 0)
      sim = tgs::resample_linear(sim, static_cast<std::size_t>(opts.frames));
    return sim;
  }();
  if (opts.no_smooth) return curve;
  return tgs::condition_curve(curve, opts.sigma, opts.radius);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto range_at = text.find("..");
  if (range_at != std::string::npos) {
    const std::uint64_t lo = std::stoull(text.substr(0, range_at));
    const std::uint64_t hi = std::stoull(text.substr(range_at + 2));
    if (hi < lo) throw tgs::ValidationError("--seeds: range end below start");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma - pos);
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (seeds.empty()) throw tgs::ValidationError("--seeds: no seeds given");
  return seeds;
}

tgs::FrameInterval parse_interval(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw tgs::ValidationError("expected start,end");
  return {std::stoll(text.substr(0, comma)), std::stoll(text.substr(comma + 1))};
}

json segment_to_json(const tgs::Segment& s) {
  return json{{"start", s.start}, {"end", s.end}, {"score", s.score}};
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    tgs::io::write_text_file(out_path, j.dump(2) + "\n");
}

int run_gen(const std::string& config_path, std::uint64_t seed,
            bool seed_given, const std::string& out_path) {
  const json j = tgs::io::read_json_file(config_path);
  tgs::Scenario cfg = tgs::io::scenario_from_json(j);
  if (seed_given) cfg.seed = seed;
  const tgs::MaterializedScenario sc = tgs::gen_scenario(cfg);
  json out = tgs::io::scenario_to_json(cfg);
  out["curve"] = tgs::io::curve_to_json(sc.curve);
  emit(out, out_path);
  return 0;
}

int run_ground(const CurveOptions& curve_opts, double theta,
               std::int64_t window, const std::optional<std::string>& gt_text,
               const std::string& out_path) {
  const tgs::SimilarityCurve curve = load_conditioned_curve(curve_opts);
  const std::int64_t w =
      window > 0 ? window
                 : tgs::default_window(static_cast<std::int64_t>(curve.length()));
  const tgs::GroundingOutcome g = tgs::ground_curve(curve, w, theta);

  json out;
  out["center"] = g.moment.center;
  out["window_start"] = g.moment.window_start;
  out["window"] = g.moment.window;
  out["segments"] = json::array();
  for (const auto& s : g.segments) out["segments"].push_back(segment_to_json(s));
  out["best"] = g.best ? segment_to_json(*g.best) : json(nullptr);
  out["predicted"] = {g.predicted.start, g.predicted.end};
  if (gt_text) {
    const tgs::FrameInterval gt = parse_interval(*gt_text);
    out["iou"] = tgs::interval_iou(g.predicted, gt);
  }
  emit(out, out_path);
  return 0;
}

int run_sample(const CurveOptions& curve_opts, const std::string& strategy_name,
               std::int64_t k, std::int64_t window, std::uint64_t seed,
               const std::string& out_path) {
  const tgs::SimilarityCurve curve = load_conditioned_curve(curve_opts);
  const auto horizon = static_cast<std::int64_t>(curve.length());
  const tgs::Strategy strategy = tgs::parse_strategy(strategy_name);
  const std::int64_t w = window > 0 ? window : tgs::default_window(horizon);

  tgs::SampleSet set;
  json k_left(nullptr);
  json k_right(nullptr);
  switch (strategy) {
    case tgs::Strategy::kFirstK:
      set = tgs::sample_first_k(horizon, k);
      break;
    case tgs::Strategy::kUniform:
      set = tgs::sample_uniform(horizon, k);
      break;
    case tgs::Strategy::kRandom: {
      tgs::RngStream rng(seed, "random-sample");
      set = tgs::sample_random(horizon, k, rng);
      break;
    }
    case tgs::Strategy::kTopK:
      set = tgs::sample_top_k(curve, k);
      break;
    case tgs::Strategy::kNearbyK:
      set = tgs::sample_nearby_k(curve, k, tgs::moment_center(curve, w).center);
      break;
    case tgs::Strategy::kMcs: {
      const tgs::McsResult mcs = tgs::moment_centric_sample(
          curve, k, tgs::moment_center(curve, w).center, seed);
      set = mcs.samples;
      k_left = mcs.k_left;
      k_right = mcs.k_right;
      break;
    }
  }

  json out;
  out["indices"] = set.indices;
  out["center"] = set.center ? json(*set.center) : json(nullptr);
  out["k_left"] = k_left;
  out["k_right"] = k_right;
  emit(out, out_path);
  return 0;
}

int run_loss(const std::string& tokens_path, bool grad_check,
             const std::string& out_path) {
  const tgs::TokenMatrix tm = tgs::io::load_tokens(tokens_path);
  const auto logits = tgs::similarity_matrix(tm);

  json out;
  out["loss"] = tgs::find_loss(logits, tm);
  if (grad_check) {
    const auto grad = tgs::find_loss_grad(logits, tm);
    // Central finite differences on every valid pair.
    const double step = 1e-5;
    double max_rel_err = 0.0;
    auto bumped = logits;
    for (std::size_t i = 0; i < tm.num_find(); ++i) {
      for (std::size_t j = 0; j < tm.num_frames(); ++j) {
        bumped[i][j] = logits[i][j] + step;
        const double hi = tgs::find_loss(bumped, tm);
        bumped[i][j] = logits[i][j] - step;
        const double lo = tgs::find_loss(bumped, tm);
        bumped[i][j] = logits[i][j];
        const double fd = (hi - lo) / (2.0 * step);
        const double denom = std::max({std::abs(fd), std::abs(grad[i][j]), 1e-12});
        max_rel_err = std::max(max_rel_err, std::abs(fd - grad[i][j]) / denom);
      }
    }
    out["grad"] = grad;
    out["grad_check"] = {{"step", step},
                         {"max_rel_err", max_rel_err},
                         {"pass", max_rel_err < 1e-4}};
  }
  emit(out, out_path);
  return 0;
}

int run_propagate(const std::string& scenario_path,
                  const std::string& anchors_from, std::int64_t k,
                  double lambda, std::uint64_t seed, bool baseline, bool csv,
                  const std::string& out_path) {
  const tgs::MaterializedScenario sc = tgs::io::load_scenario(scenario_path);
  const auto horizon = static_cast<std::int64_t>(sc.curve.length());
  tgs::PipelineParams params;
  params.k = k;
  params.lambda = lambda;

  const tgs::SimilarityCurve curve =
      tgs::condition_curve(sc.curve, params.smooth_sigma, params.smooth_radius);
  const std::int64_t center =
      tgs::moment_center(curve, tgs::default_window(horizon)).center;

  tgs::MockTracker tracker(sc.config.tracker, sc.config.gt_interval, sc.gt_masks);

  std::vector<tgs::MaskFrame> masks;
  std::vector<tgs::UpdateEvent> decisions;
  tgs::SampleSet anchors;
  std::int64_t start = 0;
  if (baseline) {
    masks = tgs::run_forward_baseline(horizon, tracker);
  } else {
    if (anchors_from == "mcs") {
      anchors = tgs::moment_centric_sample(curve, k, center, seed).samples;
      start = center;
    } else if (anchors_from == "uniform") {
      anchors = tgs::sample_uniform(horizon, k);
      start = anchors.indices.front();
    } else if (anchors_from == "firstk") {
      anchors = tgs::sample_first_k(horizon, k);
      start = anchors.indices.front();
    } else {
      throw tgs::ValidationError("--anchors-from must be mcs, uniform, or firstk");
    }
    if (!anchors.contains(start)) {
      anchors.indices.push_back(start);
      std::sort(anchors.indices.begin(), anchors.indices.end());
    }
    const tgs::PropagationPlan plan = tgs::plan_bap(horizon, start, anchors);
    tgs::BapResult bap = tgs::run_bap(plan, tracker, lambda);
    masks = std::move(bap.masks);
    decisions = std::move(bap.decisions);
  }

  std::vector<double> per_frame_j(masks.size());
  double mean_j = 0.0;
  for (std::size_t t = 0; t < masks.size(); ++t) {
    per_frame_j[t] = tgs::region_j(masks[t], sc.gt_masks[t]);
    mean_j += per_frame_j[t];
  }
  mean_j /= static_cast<double>(masks.size());

  if (csv) {
    std::string text = "frame,j\n";
    char buf[64];
    for (std::size_t t = 0; t < per_frame_j.size(); ++t) {
      std::snprintf(buf, sizeof(buf), "%zu,%.10g\n", t, per_frame_j[t]);
      text += buf;
    }
    if (out_path.empty())
      std::cout << text;
    else
      tgs::io::write_text_file(out_path, text);
    return 0;
  }

  json out;
  out["mean_j"] = mean_j;
  out["per_frame_j"] = per_frame_j;
  out["baseline"] = baseline;
  if (!baseline) {
    out["start"] = start;
    out["anchors"] = anchors.indices;
    out["n_updates"] = 0;
    json events = json::array();
    std::int64_t clears = 0;
    for (const auto& e : decisions) {
      events.push_back(
          json{{"frame", e.frame},
               {"pass", e.pass == tgs::Pass::kForward ? "forward" : "backward"},
               {"cum_track", e.cum_track},
               {"s_p", e.predict_score},
               {"cleared", e.cleared}});
      clears += e.cleared ? 1 : 0;
    }
    out["updates"] = events;
    out["n_updates"] = clears;
  }
  emit(out, out_path);
  return 0;
}

int run_compare(const std::string& corpus_dir, const std::string& strategies_text,
                const tgs::PipelineParams& params, const std::string& seeds_text,
                const std::string& out_path, bool mirror_json,
                std::size_t workers) {
  std::vector<tgs::NamedScenario> corpus;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files)
    corpus.push_back(
        tgs::NamedScenario{path.filename().string(), tgs::io::load_scenario(path.string())});
  if (corpus.empty())
    throw tgs::ValidationError("--corpus: no scenario .json files in " + corpus_dir);

  std::vector<tgs::Strategy> strategies;
  std::size_t pos = 0;
  while (pos < strategies_text.size()) {
    const auto comma = strategies_text.find(',', pos);
    const std::string tok = strategies_text.substr(pos, comma - pos);
    if (!tok.empty()) strategies.push_back(tgs::parse_strategy(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (strategies.empty())
    throw tgs::ValidationError("--strategies: no strategies given");

  const std::vector<std::uint64_t> seeds = parse_seeds(seeds_text);
  const tgs::CompareResult result =
      tgs::compare_strategies(corpus, strategies, params, seeds, workers);

  const std::string csv = tgs::to_csv(result);
  if (out_path.empty())
    std::cout << csv;
  else
    tgs::io::write_text_file(out_path, csv);
  if (mirror_json) {
    std::string json_path = out_path;
    const auto dot = json_path.rfind('.');
    if (dot != std::string::npos) json_path.resize(dot);
    json_path += ".json";
    if (out_path.empty())
      std::cout << tgs::io::compare_to_json(result).dump(2) << "\n";
    else
      tgs::io::write_text_file(json_path,
                               tgs::io::compare_to_json(result).dump(2) + "\n");
  }
  std::cerr << tgs::summary_table(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal grounding, frame sampling, and mask propagation toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic scenario from a config");
  std::string gen_config;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--config", gen_config, "Scenario config JSON")->required();
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "Scenario seed");
  gen->add_option("-o,--out", gen_out, "Output scenario file");

  // ground
  auto* ground = app.add_subcommand("ground", "Locate the query moment on a curve");
  CurveOptions ground_curve_opts;
  double ground_theta = 0.4;
  std::int64_t ground_window = 0;
  std::string ground_gt;
  std::string ground_out;
  add_curve_options(ground, ground_curve_opts);
  ground->add_option("--theta", ground_theta, "Segment threshold in (0, 1)");
  ground->add_option("--window", ground_window, "Moment window size (0 -> ceil(T/10))");
  auto* ground_gt_opt = ground->add_option("--gt", ground_gt, "Ground-truth interval start,end");
  ground->add_option("-o,--out", ground_out, "Output file (stdout by default)");

  // sample
  auto* sample = app.add_subcommand("sample", "Select frames with a sampling strategy");
  CurveOptions sample_curve_opts;
  std::string sample_strategy = "mcs";
  std::int64_t sample_k = 8;
  std::int64_t sample_window = 0;
  std::uint64_t sample_seed = 0;
  std::string sample_out;
  add_curve_options(sample, sample_curve_opts);
  sample->add_option("--strategy", sample_strategy,
                     "firstk|uniform|random|topk|nearbyk|mcs");
  sample->add_option("--k", sample_k, "Number of frames to select");
  sample->add_option("--window", sample_window, "Moment window size (0 -> ceil(T/10))");
  sample->add_option("--seed", sample_seed, "Sampling seed");
  sample->add_option("-o,--out", sample_out, "Output file (stdout by default)");

  // loss
  auto* loss = app.add_subcommand("loss", "Evaluate the token-matching loss");
  std::string loss_tokens;
  bool loss_grad_check = false;
  std::string loss_out;
  loss->add_option("--tokens", loss_tokens, "Token JSON file")->required();
  loss->add_flag("--grad-check", loss_grad_check,
                 "Verify the analytic gradient against finite differences");
  loss->add_option("-o,--out", loss_out, "Output file (stdout by default)");

  // propagate
  auto* propagate = app.add_subcommand("propagate", "Propagate masks over a scenario");
  std::string prop_scenario;
  std::string prop_anchors = "mcs";
  std::int64_t prop_k = 8;
  double prop_lambda = 0.9;
  std::uint64_t prop_seed = 0;
  bool prop_baseline = false;
  bool prop_csv = false;
  std::string prop_out;
  propagate->add_option("--scenario", prop_scenario, "Scenario JSON file")->required();
  propagate->add_option("--anchors-from", prop_anchors, "mcs|uniform|firstk");
  propagate->add_option("--k", prop_k, "Number of anchors");
  propagate->add_option("--lambda", prop_lambda, "Memory-update sensitivity in (0, 1]");
  propagate->add_option("--seed", prop_seed, "Sampling seed for mcs anchors");
  propagate->add_flag("--baseline", prop_baseline, "Forward-only baseline, no updates");
  propagate->add_flag("--csv", prop_csv, "Emit one CSV row per frame");
  propagate->add_option("-o,--out", prop_out, "Output file (stdout by default)");

  // compare
  auto* compare = app.add_subcommand("compare", "Compare strategies over a corpus");
  std::string cmp_corpus;
  std::string cmp_strategies = "mcs,nearbyk,uniform,firstk";
  std::string cmp_seeds = "0..19";
  tgs::PipelineParams cmp_params;
  std::string cmp_out;
  bool cmp_json = false;
  std::size_t cmp_workers = 0;
  compare->add_option("--corpus", cmp_corpus, "Directory of scenario .json files")->required();
  compare->add_option("--strategies", cmp_strategies, "Comma-separated strategy list");
  compare->add_option("--seeds", cmp_seeds, "Seed list: a..b or comma-separated");
  compare->add_option("--k", cmp_params.k, "Frames per run");
  compare->add_option("--window", cmp_params.window, "Moment window (0 -> ceil(T/10))");
  compare->add_option("--theta", cmp_params.theta, "Segment threshold");
  compare->add_option("--lambda", cmp_params.lambda, "Memory-update sensitivity");
  compare->add_option("--workers", cmp_workers, "Worker threads (0 -> hardware)");
  compare->add_flag("--json", cmp_json, "Also write a JSON mirror of the CSV");
  compare->add_option("-o,--out", cmp_out, "Output CSV file (stdout by default)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return run_gen(gen_config, gen_seed, gen_seed_opt->count() > 0, gen_out);
    if (ground->parsed())
      return run_ground(ground_curve_opts, ground_theta, ground_window,
                        ground_gt_opt->count() > 0
                            ? std::optional<std::string>(ground_gt)
                            : std::nullopt,
                        ground_out);
    if (sample->parsed())
      return run_sample(sample_curve_opts, sample_strategy, sample_k,
                        sample_window, sample_seed, sample_out);
    if (loss->parsed()) return run_loss(loss_tokens, loss_grad_check, loss_out);
    if (propagate->parsed())
      return run_propagate(prop_scenario, prop_anchors, prop_k, prop_lambda,
                           prop_seed, prop_baseline, prop_csv, prop_out);
    if (compare->parsed())
      return run_compare(cmp_corpus, cmp_strategies, cmp_params, cmp_seeds,
                         cmp_out, cmp_json, cmp_workers);
  } catch (const tgs::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tgs::DegenerateWeightsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
