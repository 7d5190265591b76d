// vsgrasp: dataset, evaluation and servo-simulation pipelines.
//
//   vsgrasp augment  --input DIR --out DIR [--side 320] [--stride 1] [--cap N]
//   vsgrasp gen-vs   --config FILE --poses N [--pairs M] --out FILE
//   vsgrasp simulate --config FILE --out FILE
//   vsgrasp evaluate --annotations DIR --predictions FILE [--split iw|ow|none]
//
// Global flags: --seed (default 0), --out, --quiet.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vsgrasp.hpp"

namespace fs = std::filesystem;
using namespace vsgrasp;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  bool quiet = false;
};

void say(const Globals& g, const std::string& line) {
  if (!g.quiet) std::cout << line << '\n';
}

void warn(const std::string& line) { std::cerr << "warning: " << line << '\n'; }

std::string fmt(double v, int precision = 6) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(precision);
  ss << v;
  return ss.str();
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void require_out(const Globals& g) {
  if (g.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
}

// ---- augment ----------------------------------------------------------------

struct AugmentArgs {
  std::string input;
  int side = 320;
  int target = 224;
  int stride = 1;
  std::optional<std::size_t> cap;
};

int cmd_augment(const Globals& g, const AugmentArgs& a) {
  require_out(g);
  const auto images = cgd::read_directory(a.input);
  if (images.empty()) throw Error(ErrorCode::kEmptyInput, "no images in " + a.input);

  AugmentOptions opt;
  opt.side = a.side;
  opt.target_side = a.target;
  opt.stride = a.stride;
  opt.cap_per_image = a.cap;
  opt.seed = g.seed;

  const fs::path out_dir(g.out);
  fs::create_directories(out_dir);
  auto instances = open_out(out_dir / "instances.jsonl");
  const Manifest manifest = expand_dataset(images, opt, [&](const AugmentedInstance& inst) {
    instances << to_json(inst).dump() << '\n';
  });
  auto manifest_out = open_out(out_dir / "manifest.csv");
  write_manifest_csv(manifest_out, manifest);

  std::size_t skipped = 0;
  for (const auto& r : manifest.rows) skipped += r.skipped ? 1 : 0;
  for (const auto& r : manifest.rows) {
    if (r.skipped) warn(r.image_id + ": no valid window, skipped");
  }
  say(g, "images: " + std::to_string(images.size()) + " (skipped " + std::to_string(skipped) + ")");
  say(g, "instances: " + std::to_string(manifest.total()));
  say(g, "expansion factor: " +
             fmt(static_cast<double>(manifest.total()) / static_cast<double>(images.size()), 3));
  say(g, "wrote " + (out_dir / "instances.jsonl").string() + ", " +
             (out_dir / "manifest.csv").string());
  return 0;
}

// ---- gen-vs -----------------------------------------------------------------

struct GenVsArgs {
  std::string config;
  std::size_t poses = 100;
  std::optional<std::size_t> pairs;
};

int cmd_gen_vs(const Globals& g, const GenVsArgs& a) {
  require_out(g);
  const SamplingConfig sampling = sampling_from_json(read_json_file(a.config));
  const auto poses = sample_poses(sampling, a.poses, g.seed);
  const std::size_t total = ordered_pair_count(poses.size());

  Pairing pairing = Pairing::all();
  if (a.pairs) {
    if (*a.pairs > total) {
      warn("requested " + std::to_string(*a.pairs) + " pairs but only " + std::to_string(total) +
           " ordered pairs exist; clamped");
    } else {
      pairing = Pairing::random(*a.pairs, g.seed);
    }
  }
  const auto instances = build_instances(poses, pairing);

  VsDatasetHeader header;
  header.sampling = sampling;
  header.seed = g.seed;
  header.pose_count = poses.size();
  header.pairing = pairing.kind == Pairing::Kind::kAllPairs ? "all" : "random";
  header.pair_count = instances.size();
  auto out = open_out(g.out);
  write_dataset(out, header, instances);

  say(g, "poses: " + std::to_string(poses.size()) + ", instances: " +
             std::to_string(instances.size()) + " (" + header.pairing + " pairs)");
  say(g, "wrote " + g.out);
  return 0;
}

// ---- simulate ---------------------------------------------------------------

int cmd_simulate(const Globals& g, const std::string& config_path) {
  require_out(g);
  const EpisodeConfig config = episode_from_json(read_json_file(config_path), g.seed);
  const SimTrace trace = run_episode(config);
  auto out = open_out(g.out);
  write_trace_csv(out, trace);

  const auto err = pose_error(trace.last().pose, config.desired);
  say(g, "status: " + std::string(to_string(trace.status)));
  say(g, "iterations: " + std::to_string(trace.records.size()));
  say(g, "final error [mm]: " + fmt(err[0] * 1e3, 3) + " " + fmt(err[1] * 1e3, 3) + " " +
             fmt(err[2] * 1e3, 3));
  say(g, "final error [deg]: " + fmt(err[3], 4) + " " + fmt(err[4], 4) + " " + fmt(err[5], 4));
  say(g, "wrote " + g.out);
  if (trace.status == TerminalStatus::kMaxIterations) {
    warn("episode did not converge within " + std::to_string(config.stop.max_iterations) +
         " iterations");
  }
  return 0;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string annotations;
  std::string predictions;
  std::string split = "none";
  std::vector<double> fractions{0.84, 0.01, 0.15};
  bool no_wrap = false;
};

void print_report(const Globals& g, const std::string& name, const EvalReport& r) {
  say(g, name + ": " + std::to_string(r.correct) + "/" + std::to_string(r.total) +
             " correct, accuracy " + fmt(r.accuracy, 3));
}

int cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
  const auto images = cgd::read_directory(a.annotations);
  if (images.empty()) throw Error(ErrorCode::kEmptyInput, "no images in " + a.annotations);
  const auto predictions = cgd::read_predictions(fs::path(a.predictions));
  SuccessCriteria criteria;
  criteria.wrap_angle = !a.no_wrap;

  const EvalReport overall = evaluate(predictions, images, criteria);
  print_report(g, "all", overall);

  nlohmann::json summary = {{"total", overall.total}, {"correct", overall.correct},
                            {"accuracy", overall.accuracy}};
  if (a.split != "none") {
    if (a.fractions.size() != 3) throw Error(ErrorCode::kInvalidArgument, "--fractions needs 3 values");
    const SplitMode mode = a.split == "ow" ? SplitMode::kObjectWise : SplitMode::kImageWise;
    const auto split = split_dataset(images, mode, {a.fractions[0], a.fractions[1], a.fractions[2]},
                                     g.seed);
    const auto subset = [&](const std::vector<AnnotatedImage>& part) {
      std::map<std::string, GraspRectangle> sub;
      for (const auto& img : part) {
        if (auto it = predictions.find(img.image_id); it != predictions.end()) {
          sub.emplace(it->first, it->second);
        }
      }
      return evaluate(sub, part, criteria);
    };
    const std::array<std::pair<const char*, const std::vector<AnnotatedImage>*>, 3> parts{
        {{"train", &split.train}, {"val", &split.val}, {"test", &split.test}}};
    std::map<std::string, std::set<std::string>> objects;
    for (const auto& [name, part] : parts) {
      const EvalReport r = subset(*part);
      print_report(g, std::string(name) + " (" + std::to_string(part->size()) + " images)", r);
      summary[name] = {{"images", part->size()}, {"total", r.total},
                       {"correct", r.correct}, {"accuracy", r.accuracy}};
      for (const auto& img : *part) objects[name].insert(img.object_id);
    }
    std::size_t overlap = 0;
    for (const auto& id : objects["train"]) {
      overlap += objects["val"].count(id) + objects["test"].count(id);
    }
    for (const auto& id : objects["val"]) overlap += objects["test"].count(id);
    say(g, "object overlap across sets: " + std::to_string(overlap));
    summary["object_overlap"] = overlap;
  }
  if (!g.out.empty()) {
    auto out = open_out(g.out);
    out << summary.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grasp-rectangle and visual-servoing toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->default_val(0);
  app.add_option("--out", g.out, "Output path (file or directory, per command)");
  app.add_flag("--quiet", g.quiet, "Suppress the summary on stdout");

  AugmentArgs aug;
  auto* augment = app.add_subcommand("augment", "Sliding-crop augmentation of CGD annotations");
  augment->add_option("--input", aug.input, "Directory with <id>cpos.txt files")->required();
  augment->add_option("--side", aug.side, "Crop window side in pixels")->default_val(320);
  augment->add_option("--target", aug.target, "Network input side in pixels")->default_val(224);
  augment->add_option("--stride", aug.stride, "Window stride in pixels")->default_val(1);
  augment->add_option("--cap", aug.cap, "Maximum windows per image (seeded subsample)");

  GenVsArgs gen;
  auto* gen_vs = app.add_subcommand("gen-vs", "Generate a PBVS velocity-label dataset");
  gen_vs->add_option("--config", gen.config, "Sampling config JSON")->required();
  gen_vs->add_option("--poses", gen.poses, "Number of sampled poses")->default_val(100);
  gen_vs->add_option("--pairs", gen.pairs, "Random ordered pairs (default: all pairs)");

  std::string episode_path;
  auto* simulate = app.add_subcommand("simulate", "Run one servo episode and write its trace");
  simulate->add_option("--config", episode_path, "Episode config JSON")->required();

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score grasp predictions");
  evaluate_cmd->add_option("--annotations", ev.annotations, "CGD annotation directory")->required();
  evaluate_cmd->add_option("--predictions", ev.predictions, "Prediction JSONL")->required();
  evaluate_cmd->add_option("--split", ev.split, "iw, ow or none")
      ->check(CLI::IsMember({"iw", "ow", "none"}))
      ->default_val("none");
  evaluate_cmd->add_option("--fractions", ev.fractions, "train val test fractions")
      ->expected(3)
      ->delimiter(',');
  evaluate_cmd->add_flag("--no-wrap", ev.no_wrap, "Compare angles without 180 degree wrapping");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*augment) return cmd_augment(g, aug);
    if (*gen_vs) return cmd_gen_vs(g, gen);
    if (*simulate) return cmd_simulate(g, episode_path);
    if (*evaluate_cmd) return cmd_evaluate(g, ev);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
