// addf -- command-line front end: the raster pipeline, the season simulator,
// parameter sweeps and report emission.
//
// Exit codes: 0 success, 2 usage or config error, 3 runtime contract
// violation.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "addf/addf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SeedFlags {
  std::optional<std::uint64_t> cli;  // --seed
  std::optional<std::uint64_t> env;  // ADDF_SEED
  std::uint64_t resolve(std::uint64_t fallback) const {
    if (cli) return *cli;
    if (env) return *env;
    return fallback;
  }
};

std::optional<std::uint64_t> read_env_seed() {
  const char* raw = std::getenv("ADDF_SEED");
  if (!raw || !*raw) return std::nullopt;
  try {
    return std::stoull(raw);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("ADDF_SEED is not an integer: ") + raw);
  }
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

addf::GrayImage load_raster(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
    return addf::read_csv_matrix(path);
  return addf::read_pgm(path);
}

void set_dotted(json& j, const std::string& path, const json& value) {
  json* cur = &j;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (key.empty()) throw std::invalid_argument("empty key in axis '" + path + "'");
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      return;
    }
    cur = &((*cur)[key]);
    pos = dot + 1;
  }
}

json parse_axis_value(const std::string& raw) {
  try {
    return json::parse(raw);
  } catch (const std::exception&) {
    return json(raw);  // plain string value
  }
}

struct PipelineArgs {
  std::vector<std::string> inputs;
  int p = 12;
  double sigma = 2.5;
  int k_clusters = 10;
  int obs_levels = 3;
  std::string diff_clip = "neg";
  std::string severity = "bins";
  std::string mask_path;
  std::string out_dir;
};

int run_pipeline(const PipelineArgs& args, const SeedFlags& seeds, const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = seeds.resolve(1);

  std::vector<addf::GrayImage> rasters;
  try {
    for (const std::string& path : args.inputs) rasters.push_back(load_raster(path));
    for (const addf::GrayImage& r : rasters)
      if (!addf::same_shape(r, rasters.front()))
        throw std::invalid_argument("raster dimensions differ across the series");
    if (args.p < 1) throw std::invalid_argument("--p must be >= 1");
    if (!(args.sigma > 0)) throw std::invalid_argument("--sigma must be > 0");
    if (args.k_clusters < 1) throw std::invalid_argument("--k-clusters must be >= 1");
    if (args.obs_levels < 2) throw std::invalid_argument("--obs-levels must be >= 2");
  } catch (const std::exception& e) {
    std::cerr << "addf pipeline: " << e.what() << "\n";
    return 2;
  }

  try {
    fs::create_directories(args.out_dir);
    const fs::path out(args.out_dir);
    addf::RunManifest manifest;
    manifest.command = command;
    manifest.seed = seed;

    const auto name = [](const char* stem, std::size_t i) {
      std::ostringstream s;
      s << stem << "_" << (i < 10 ? "0" : "") << i << ".pgm";
      return s.str();
    };

    std::vector<addf::GrayImage> approx;
    for (std::size_t i = 0; i < rasters.size(); ++i) {
      approx.push_back(addf::approximate(rasters[i], args.p));
      addf::write_pgm((out / name("approx", i)).string(), approx.back());
      manifest.outputs.push_back(name("approx", i));
    }

    const addf::DiffClip clip =
        args.diff_clip == "pos" ? addf::DiffClip::positive : addf::DiffClip::negative;
    std::vector<addf::DiffMatrix> diffs;
    for (std::size_t i = 0; i + 1 < rasters.size(); ++i) {
      diffs.push_back(addf::diff(rasters[i], rasters[i + 1], args.p, clip));
      // Diff cells are in [-1,0]; store magnitudes so bigger declines render brighter.
      addf::GrayImage mag(diffs.back().width, diffs.back().height);
      for (std::size_t c = 0; c < mag.size(); ++c) mag.data[c] = -diffs.back().data[c];
      addf::write_pgm((out / name("diff", i)).string(), mag);
      manifest.outputs.push_back(name("diff", i));
    }

    const addf::VarianceMap variance = addf::variance_map(diffs);
    addf::write_pgm((out / "variance.pgm").string(), addf::as_image(variance));
    manifest.outputs.push_back("variance.pgm");

    const addf::GrayImage blurred = addf::gaussian_blur(addf::as_image(variance), args.sigma);
    addf::write_pgm((out / "blurred.pgm").string(), blurred);
    manifest.outputs.push_back("blurred.pgm");

    std::optional<std::vector<std::uint8_t>> mask;
    if (!args.mask_path.empty()) {
      const addf::GrayImage mask_raster = load_raster(args.mask_path);
      if (!addf::same_shape(mask_raster, rasters.front()))
        throw std::invalid_argument("mask dimensions do not match the rasters");
      const addf::GrayImage mask_cells = addf::approximate(mask_raster, args.p);
      mask.emplace(mask_cells.size());
      for (std::size_t i = 0; i < mask_cells.size(); ++i)
        (*mask)[i] = mask_cells.data[i] >= 0.5 ? 1 : 0;
    }

    std::vector<addf::SectorReport> sectors =
        addf::segment(blurred, args.k_clusters, seed, mask ? &*mask : nullptr);
    const auto severities = args.severity == "kmeans"
                                ? addf::severity_observe_kmeans(sectors, args.obs_levels)
                                : addf::severity_observe(sectors, args.obs_levels);
    for (const auto& [sector_id, level] : severities) sectors[sector_id].severity_level = level;

    addf::GrayImage labels(blurred.width, blurred.height, 0.0);
    const double n = static_cast<double>(sectors.size());
    for (const addf::SectorReport& s : sectors)
      for (const auto& [x, y] : s.cells) labels.at(x, y) = (n - s.sector_id) / n;
    addf::write_pgm((out / "labels.pgm").string(), labels);
    manifest.outputs.push_back("labels.pgm");

    std::ofstream sj((out / "sectors.json").string());
    sj << addf::sectors_to_json(sectors).dump(2) << "\n";
    manifest.outputs.push_back("sectors.json");

    manifest.config = {{"p", args.p},
                       {"sigma", args.sigma},
                       {"k_clusters", args.k_clusters},
                       {"obs_levels", args.obs_levels},
                       {"diff_clip", args.diff_clip},
                       {"severity", args.severity},
                       {"inputs", args.inputs},
                       {"mask", args.mask_path}};
    manifest.duration_seconds = seconds_since(t0);
    manifest.write((out / "manifest.json").string());
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "addf pipeline: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "addf pipeline: contract violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "addf pipeline: " << e.what() << "\n";
    return 3;
  }
}

void write_run_outputs(const fs::path& out, const addf::ExperimentResult& res,
                       addf::RunManifest& manifest) {
  {
    std::ofstream csv((out / "tally.csv").string());
    addf::write_tally_csv(csv, res);
    manifest.outputs.push_back("tally.csv");
  }
  {
    std::ofstream events((out / "events.ndjson").string());
    res.log.write(events);
    manifest.outputs.push_back("events.ndjson");
  }
  {
    std::ofstream learners((out / "learners.json").string());
    learners << json{{"fast", addf::checkpoint_to_json(res.fast_q, res.fast_policy)},
                     {"slow", addf::checkpoint_to_json(res.slow_q, res.slow_policy)}}
                    .dump(2)
             << "\n";
    manifest.outputs.push_back("learners.json");
  }
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 const SeedFlags& seeds, const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();
  addf::SimConfig cfg;
  try {
    cfg = addf::load_config(config_path);
    cfg.seed = seeds.resolve(cfg.seed);
  } catch (const std::exception& e) {
    std::cerr << "addf simulate: " << e.what() << "\n";
    return 2;
  }

  try {
    fs::create_directories(out_dir);
    const addf::ExperimentResult res = addf::run_experiment(cfg);

    addf::RunManifest manifest;
    manifest.command = command;
    manifest.seed = cfg.seed;
    manifest.config = addf::config_to_json(cfg);
    manifest.metrics = {{"fast_accuracy", res.fast.accuracy()},
                        {"slow_accuracy", res.slow.accuracy()},
                        {"slow_decisions_per_season", res.slow_decisions_per_season()},
                        {"oracle_consults", res.oracle_consults},
                        {"stressed_identified", res.stressed_identified},
                        {"frozen_season", res.fast_frozen_season}};
    write_run_outputs(out_dir, res, manifest);
    manifest.duration_seconds = seconds_since(t0);
    manifest.write((fs::path(out_dir) / "manifest.json").string());
    return 0;
  } catch (const std::logic_error& e) {
    std::cerr << "addf simulate: contract violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "addf simulate: " << e.what() << "\n";
    return 3;
  }
}

int run_sweep(const std::string& config_path, const std::string& axis,
              const std::vector<std::string>& values, const std::string& out_dir,
              const SeedFlags& seeds, const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();
  json base;
  std::vector<std::pair<std::string, addf::SimConfig>> runs;
  try {
    if (values.empty()) throw std::invalid_argument("no sweep values given");
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open " + config_path);
    in >> base;
    if (base.is_object() && base.contains("config") && base.contains("version"))
      base = base.at("config");
    for (const std::string& v : values) {
      json j = base;
      set_dotted(j, axis, parse_axis_value(v));
      addf::SimConfig cfg = addf::config_from_json(j);  // rejects unknown axes
      cfg.seed = seeds.resolve(cfg.seed);
      runs.emplace_back(v, cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "addf sweep: " << e.what() << "\n";
    return 2;
  }

  try {
    fs::create_directories(out_dir);
    addf::RunManifest manifest;
    manifest.command = command;
    manifest.seed = runs.front().second.seed;
    manifest.config = {{"base", base}, {"axis", axis}, {"values", values}};

    std::ostringstream summary;
    summary << "value,agent,tp,tn,fp,fn,overall\n";
    for (const auto& [value, cfg] : runs) {
      std::string dir_name = axis + "=" + value;
      for (char& c : dir_name)
        if (c == '/' || c == '\\') c = '_';
      const fs::path run_dir = fs::path(out_dir) / dir_name;
      fs::create_directories(run_dir);

      const addf::ExperimentResult res = addf::run_experiment(cfg);
      addf::RunManifest run_manifest;
      run_manifest.command = command + " [" + axis + "=" + value + "]";
      run_manifest.seed = cfg.seed;
      run_manifest.config = addf::config_to_json(cfg);
      write_run_outputs(run_dir, res, run_manifest);
      run_manifest.write((run_dir / "manifest.json").string());

      std::istringstream csv(addf::tally_csv(res));
      std::string line;
      std::getline(csv, line);  // header
      while (std::getline(csv, line))
        if (!line.empty()) summary << value << "," << line << "\n";
      manifest.outputs.push_back(dir_name);
    }

    std::ofstream sum((fs::path(out_dir) / "summary.csv").string());
    sum << summary.str();
    manifest.outputs.push_back("summary.csv");
    manifest.duration_seconds = seconds_since(t0);
    manifest.write((fs::path(out_dir) / "manifest.json").string());
    return 0;
  } catch (const std::logic_error& e) {
    std::cerr << "addf sweep: contract violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "addf sweep: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ADDF: NDVI stress pipeline and layered-team season simulator"};
  app.require_subcommand(1);

  SeedFlags seeds;
  try {
    seeds.env = read_env_seed();
  } catch (const std::exception& e) {
    std::cerr << "addf: " << e.what() << "\n";
    return 2;
  }
  const std::string command = join_args(argc, argv);

  std::uint64_t seed_flag = 0;

  PipelineArgs pargs;
  CLI::App* pipeline = app.add_subcommand("pipeline", "Run the raster pipeline on an NDVI series");
  pipeline->add_option("inputs", pargs.inputs, "Ordered rasters (PGM, or CSV matrices)")
      ->required()
      ->expected(2, -1);
  pipeline->add_option("--p", pargs.p, "Approximation block size in pixels");
  pipeline->add_option("--sigma", pargs.sigma, "Gaussian blur standard deviation in cells");
  pipeline->add_option("--k-clusters", pargs.k_clusters, "K-means cluster count");
  pipeline->add_option("--obs-levels", pargs.obs_levels, "Severity level count");
  pipeline->add_option("--diff-clip", pargs.diff_clip, "Which difference side to keep")
      ->check(CLI::IsMember({"neg", "pos"}));
  pipeline->add_option("--severity", pargs.severity, "Severity discretization")
      ->check(CLI::IsMember({"bins", "kmeans"}));
  pipeline->add_option("--mask", pargs.mask_path, "In-field mask raster (nonzero = in field)");
  pipeline->add_option("--out", pargs.out_dir, "Output directory")->required();
  CLI::Option* pipeline_seed = pipeline->add_option("--seed", seed_flag, "Master seed");

  std::string sim_config, sim_out;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a season experiment from a config");
  simulate->add_option("--config", sim_config, "Config JSON (or a previous run manifest)")
      ->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();
  CLI::Option* simulate_seed = simulate->add_option("--seed", seed_flag, "Master seed");

  std::string sweep_config, sweep_axis, sweep_out;
  std::vector<std::string> sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "Run one experiment per value of a config key");
  sweep->add_option("--config", sweep_config, "Base config JSON")->required();
  sweep->add_option("--axis", sweep_axis, "Dotted config key, e.g. heuristic.m")->required();
  sweep->add_option("--values", sweep_values, "Values to sweep")->required()->delimiter(',');
  sweep->add_option("--out", sweep_out, "Output directory")->required();
  CLI::Option* sweep_seed = sweep->add_option("--seed", seed_flag, "Master seed");

  CLI::App* version = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (version->parsed()) {
    std::cout << "addf " << addf::kVersion << "\n";
    return 0;
  }
  if (pipeline->parsed()) {
    if (pipeline_seed->count()) seeds.cli = seed_flag;
    return run_pipeline(pargs, seeds, command);
  }
  if (simulate->parsed()) {
    if (simulate_seed->count()) seeds.cli = seed_flag;
    return run_simulate(sim_config, sim_out, seeds, command);
  }
  if (sweep->parsed()) {
    if (sweep_seed->count()) seeds.cli = seed_flag;
    return run_sweep(sweep_config, sweep_axis, sweep_values, sweep_out, seeds, command);
  }
  return 2;
}
