// ntc — sparse nonnegative tensor completion CLI.
//
// Subcommands: complete (factorize a .tns file), synth (generate low-rank
// data, optionally complete it), image (corrupt + restore a binary PPM),
// bench (threads x rank timing sweep, CSV output).

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ntc/ao.hpp"
#include "ntc/image.hpp"
#include "ntc/synth.hpp"
#include "ntc/tns_io.hpp"

namespace fs = std::filesystem;
using ConfigKv = std::vector<std::pair<std::string, std::string>>;

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// RFC-4180-style quoting; our fields are numeric so this rarely fires.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  q += '"';
  return q;
}

void write_csv(const fs::path& path, const ConfigKv& config,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (const auto& [k, v] : config) out << "# " << k << "=" << v << '\n';
  for (std::size_t j = 0; j < header.size(); ++j)
    out << (j ? "," : "") << csv_field(header[j]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j)
      out << (j ? "," : "") << csv_field(row[j]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_metrics_csv(const fs::path& path, const ConfigKv& config,
                       const std::vector<ntc::MetricsRecord>& history) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(history.size());
  for (const auto& r : history)
    rows.push_back({fmt_g(r.epoch), std::to_string(r.entries_accessed),
                    fmt_g(r.objective), fmt_g(r.rel_error), fmt_g(r.wall_seconds)});
  write_csv(path, config, {"epoch", "entries_accessed", "objective", "rel_error", "wall_seconds"},
            rows);
}

// Dense text matrix: "rows cols" header then one whitespace-separated row
// per line, full double precision.
void write_factor(const ntc::Matrix& m, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << fmt_g(row[j]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_factors(const ntc::FactorSet& f, const fs::path& dir,
                   const std::string& prefix) {
  for (std::size_t i = 0; i < f.order(); ++i)
    write_factor(f.factors[i], dir / (prefix + std::to_string(i + 1) + ".txt"));
}

// Solver flags shared by complete/synth/image.
struct SolverArgs {
  std::size_t rank = 0;
  double lambda = 1e-3;
  double c = 1.0;
  int max_inner = 1;
  double epochs = 100.0;
  double term_tol = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
  int chunk = 0;
  int power_iters = 30;
  double power_tol = 1e-6;
  int metrics_every = 1;
  bool quiet = false;

  ntc::AoConfig to_ao() const {
    ntc::AoConfig cfg;
    cfg.rank = rank;
    cfg.lambda = lambda;
    cfg.c = c;
    cfg.max_inner = max_inner;
    cfg.max_epochs = epochs;
    cfg.term_tol = term_tol;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.chunk = chunk;
    cfg.power_iters = power_iters;
    cfg.power_tol = power_tol;
    cfg.metrics_every = metrics_every;
    return cfg;
  }

  ConfigKv config_kv() const {
    return {{"rank", std::to_string(rank)},
            {"lambda", fmt_g(lambda)},
            {"c", fmt_g(c)},
            {"max_inner", std::to_string(max_inner)},
            {"epochs", fmt_g(epochs)},
            {"term_tol", fmt_g(term_tol)},
            {"seed", std::to_string(seed)},
            {"threads", std::to_string(threads)},
            {"chunk", std::to_string(chunk)},
            {"power_iters", std::to_string(power_iters)},
            {"power_tol", fmt_g(power_tol)},
            {"metrics_every", std::to_string(metrics_every)}};
  }
};

void add_solver_flags(CLI::App* cmd, SolverArgs& s, bool rank_required) {
  auto* rank = cmd->add_option("--rank", s.rank, "CPD rank R");
  if (rank_required) rank->required();
  cmd->add_option("--lambda", s.lambda, "Tikhonov weight (> 0)");
  cmd->add_option("--c", s.c, "per-row sampling fraction in (0, 1]");
  cmd->add_option("--max-inner", s.max_inner, "inner iterations per factor update");
  cmd->add_option("--epochs", s.epochs, "epoch budget (|Omega| entry accesses each)");
  cmd->add_option("--term-tol", s.term_tol,
                  "stop when rel_error moves < tol over 3 straight sweeps (0 = off)");
  cmd->add_option("--seed", s.seed, "RNG seed");
  cmd->add_option("--threads", s.threads, "worker threads for row updates");
  cmd->add_option("--chunk", s.chunk, "dynamic-schedule chunk size (0 = static)");
  cmd->add_option("--power-iters", s.power_iters, "power-method iteration cap");
  cmd->add_option("--power-tol", s.power_tol, "power-method relative tolerance");
  cmd->add_option("--metrics-every", s.metrics_every, "record metrics every k-th sweep");
  cmd->add_flag("--quiet", s.quiet, "suppress per-sweep progress on stderr");
}

ntc::SweepObserver progress(bool quiet) {
  if (quiet) return {};
  return [](const ntc::MetricsRecord& r, const ntc::FactorSet&) {
    std::fprintf(stderr, "epoch %9.3f  objective %-14.8g  rel_error %.8g\n", r.epoch,
                 r.objective, r.rel_error);
  };
}

struct CompleteArgs {
  std::string input;
  std::string output_dir = "ntc_out";
  SolverArgs solver;
};

int cmd_complete(const CompleteArgs& a) {
  const ntc::SparseTensor tensor = ntc::read_tns(a.input);
  const ntc::AoConfig cfg = a.solver.to_ao();
  ntc::FactorSet init = ntc::initial_factors(tensor.dims(), cfg.rank, cfg.seed);
  fs::create_directories(a.output_dir);

  const ntc::AoResult res =
      ntc::ao_ntc(tensor, std::move(init), cfg, progress(a.solver.quiet));

  write_factors(res.factors, a.output_dir, "mode");
  ConfigKv kv = a.solver.config_kv();
  kv.insert(kv.begin(), {{"command", "complete"}, {"input", a.input}});
  write_metrics_csv(fs::path(a.output_dir) / "metrics.csv", kv, res.history);

  const auto& last = res.history.back();
  std::cout << "completed: epoch " << fmt_g(last.epoch) << ", objective "
            << fmt_g(last.objective) << ", rel_error " << fmt_g(last.rel_error)
            << "\nfactors and metrics.csv written to " << a.output_dir << '\n';
  return 0;
}

struct SynthArgs {
  std::vector<std::size_t> dims;
  std::size_t truth_rank = 10;
  double noise_sigma = 0.0;
  std::optional<double> target_snr;
  std::optional<double> density;
  std::optional<std::string> mask_from;
  bool generate_only = false;
  std::string output_dir = "ntc_out";
  SolverArgs solver;
};

int cmd_synth(SynthArgs a) {
  ntc::SynthSpec spec;
  spec.dims = a.dims;
  spec.rank = a.truth_rank;
  spec.noise_sigma = a.noise_sigma;
  spec.target_snr = a.target_snr;
  spec.density = a.density;
  spec.pattern_from = a.mask_from;
  spec.seed = a.solver.seed;

  const ntc::SynthResult gen = ntc::synth_generate(spec);
  fs::create_directories(a.output_dir);
  ntc::write_tns(gen.observed, (fs::path(a.output_dir) / "observed.tns").string());
  write_factors(gen.truth, a.output_dir, "truth_mode");

  std::cout << "generated: " << gen.observed.nnz() << " observed entries, sigma "
            << fmt_g(gen.sigma_used) << ", achieved SNR " << fmt_g(gen.achieved_snr)
            << ", clamped " << gen.clamped << '\n';

  ConfigKv kv{{"command", "synth"}};
  for (std::size_t d : spec.dims) kv.push_back({"dim", std::to_string(d)});
  kv.push_back({"truth_rank", std::to_string(spec.rank)});
  kv.push_back({"noise_sigma", fmt_g(spec.noise_sigma)});
  if (spec.target_snr) kv.push_back({"target_snr", fmt_g(*spec.target_snr)});
  if (spec.density) kv.push_back({"density", fmt_g(*spec.density)});
  if (spec.pattern_from) kv.push_back({"mask_from", *spec.pattern_from});
  kv.push_back({"achieved_snr", fmt_g(gen.achieved_snr)});
  kv.push_back({"sigma_used", fmt_g(gen.sigma_used)});
  kv.push_back({"clamped", std::to_string(gen.clamped)});

  if (a.generate_only) {
    write_csv(fs::path(a.output_dir) / "metrics.csv", kv,
              {"epoch", "entries_accessed", "objective", "rel_error", "wall_seconds"}, {});
    std::cout << "observed.tns and truth factors written to " << a.output_dir << '\n';
    return 0;
  }

  if (a.solver.rank == 0) a.solver.rank = spec.rank;  // default: complete at the true rank
  const ntc::AoConfig cfg = a.solver.to_ao();
  ntc::FactorSet init = ntc::initial_factors(gen.observed.dims(), cfg.rank, cfg.seed);
  const ntc::AoResult res =
      ntc::ao_ntc(gen.observed, std::move(init), cfg, progress(a.solver.quiet));

  write_factors(res.factors, a.output_dir, "mode");
  ConfigKv solver_kv = a.solver.config_kv();
  kv.insert(kv.end(), solver_kv.begin(), solver_kv.end());
  write_metrics_csv(fs::path(a.output_dir) / "metrics.csv", kv, res.history);

  const auto& last = res.history.back();
  std::cout << "completed: epoch " << fmt_g(last.epoch) << ", objective "
            << fmt_g(last.objective) << ", rel_error " << fmt_g(last.rel_error)
            << "\noutputs written to " << a.output_dir << '\n';
  return 0;
}

struct ImageArgs {
  std::string input;
  double keep_fraction = 1.0;
  std::string output_dir = "ntc_out";
  SolverArgs solver;
};

// Full-image relative error of img against ref, holes counting as 0.
double image_rel_error(const ntc::Image& ref, const ntc::Image& img) {
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < ref.pixels.size(); ++t) {
    const double r = ref.pixels[t], v = img.pixels[t];
    num += (r - v) * (r - v);
    den += r * r;
  }
  return std::sqrt(num / den);
}

int cmd_image(const ImageArgs& a) {
  const ntc::Image original = ntc::read_ppm(a.input);
  const ntc::SparseTensor full = ntc::image_to_tensor(original);
  const ntc::SparseTensor observed =
      a.keep_fraction < 1.0 ? ntc::corrupt(full, a.keep_fraction, a.solver.seed) : full;

  fs::create_directories(a.output_dir);
  const ntc::Image corrupted_img = ntc::tensor_to_image(observed);
  ntc::write_ppm(corrupted_img, (fs::path(a.output_dir) / "corrupted.ppm").string());

  const ntc::AoConfig cfg = a.solver.to_ao();
  ntc::FactorSet init = ntc::initial_factors(observed.dims(), cfg.rank, cfg.seed);
  const ntc::AoResult res =
      ntc::ao_ntc(observed, std::move(init), cfg, progress(a.solver.quiet));

  const ntc::Image restored = ntc::render_model(res.factors);
  ntc::write_ppm(restored, (fs::path(a.output_dir) / "restored.ppm").string());
  write_factors(res.factors, a.output_dir, "mode");

  ConfigKv kv = a.solver.config_kv();
  kv.insert(kv.begin(), {{"command", "image"},
                         {"input", a.input},
                         {"keep_fraction", fmt_g(a.keep_fraction)}});
  write_metrics_csv(fs::path(a.output_dir) / "metrics.csv", kv, res.history);

  const auto& last = res.history.back();
  std::cout << "completed: epoch " << fmt_g(last.epoch) << ", rel_error on observed "
            << fmt_g(last.rel_error) << '\n'
            << "full-image rel_error: corrupted " << fmt_g(image_rel_error(original, corrupted_img))
            << ", restored " << fmt_g(image_rel_error(original, restored)) << '\n'
            << "corrupted.ppm, restored.ppm, factors, metrics.csv written to "
            << a.output_dir << '\n';
  return 0;
}

struct BenchArgs {
  std::string input;
  std::vector<std::size_t> dims;
  std::size_t truth_rank = 10;
  double density = 0.1;
  double noise_sigma = 0.0;
  std::vector<int> threads{1};
  std::vector<std::size_t> ranks{10};
  int trials = 5;
  double lambda = 1e-3;
  double c = 0.5;
  int max_inner = 1;
  double epochs = 1.0;
  std::uint64_t seed = 0;
  int chunk = 0;
  int power_iters = 30;
  double power_tol = 1e-6;
  std::string output_dir = "ntc_out";
};

int cmd_bench(const BenchArgs& a) {
  if (a.trials < 1) throw std::invalid_argument("bench: --trials must be >= 1");
  if (a.threads.empty() || a.ranks.empty())
    throw std::invalid_argument("bench: --threads and --rank must be nonempty");

  ntc::SparseTensor tensor = [&] {
    if (!a.input.empty()) return ntc::read_tns(a.input);
    if (a.dims.empty())
      throw std::invalid_argument("bench: provide --input or --dims");
    ntc::SynthSpec spec;
    spec.dims = a.dims;
    spec.rank = a.truth_rank;
    spec.noise_sigma = a.noise_sigma;
    spec.density = a.density;
    spec.seed = a.seed;
    return ntc::synth_generate(spec).observed;
  }();

  fs::create_directories(a.output_dir);

  // seconds-per-epoch samples per (rank, threads); trial seeds are seed+t.
  std::map<std::pair<std::size_t, int>, std::vector<double>> samples;
  for (std::size_t rank : a.ranks) {
    for (int threads : a.threads) {
      for (int trial = 0; trial < a.trials; ++trial) {
        ntc::AoConfig cfg;
        cfg.rank = rank;
        cfg.lambda = a.lambda;
        cfg.c = a.c;
        cfg.max_inner = a.max_inner;
        cfg.max_epochs = a.epochs;
        cfg.seed = a.seed + static_cast<std::uint64_t>(trial);
        cfg.threads = threads;
        cfg.chunk = a.chunk;
        cfg.power_iters = a.power_iters;
        cfg.power_tol = a.power_tol;
        cfg.eval_metrics = false;  // timing must not include metrics evaluation

        ntc::FactorSet init = ntc::initial_factors(tensor.dims(), rank, cfg.seed);
        const ntc::AoResult res = ntc::ao_ntc(tensor, std::move(init), cfg);
        const auto& last = res.history.back();
        if (!(last.epoch > 0.0))
          throw std::runtime_error("bench: no sweep ran; increase --epochs");
        samples[{rank, threads}].push_back(last.wall_seconds / last.epoch);
      }
    }
  }

  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };

  std::vector<std::vector<std::string>> rows;
  for (std::size_t rank : a.ranks) {
    const bool have_base =
        samples.count({rank, 1}) != 0;  // speedup is against the 1-thread mean
    const double base = have_base ? mean(samples.at({rank, 1})) : 0.0;
    for (int threads : a.threads) {
      const auto& secs = samples.at({rank, threads});
      const double m = mean(secs);
      const std::string speedup = have_base ? fmt_g(base / m) : "";
      for (int trial = 0; trial < a.trials; ++trial)
        rows.push_back({std::to_string(threads), std::to_string(rank),
                        std::to_string(trial), fmt_g(secs[trial]), speedup});
      rows.push_back(
          {std::to_string(threads), std::to_string(rank), "mean", fmt_g(m), speedup});
      std::cout << "rank " << rank << "  threads " << threads << "  s/epoch "
                << fmt_g(m) << (have_base ? "  speedup " + speedup : "") << '\n';
    }
  }

  ConfigKv kv{{"command", "bench"}};
  if (!a.input.empty()) kv.push_back({"input", a.input});
  for (std::size_t d : a.dims) kv.push_back({"dim", std::to_string(d)});
  if (a.input.empty()) {
    kv.push_back({"truth_rank", std::to_string(a.truth_rank)});
    kv.push_back({"density", fmt_g(a.density)});
    kv.push_back({"noise_sigma", fmt_g(a.noise_sigma)});
  }
  std::string rank_list, thread_list;
  for (std::size_t r : a.ranks) rank_list += (rank_list.empty() ? "" : " ") + std::to_string(r);
  for (int t : a.threads)
    thread_list += (thread_list.empty() ? "" : " ") + std::to_string(t);
  kv.push_back({"rank", rank_list});
  kv.push_back({"threads", thread_list});
  kv.push_back({"trials", std::to_string(a.trials)});
  kv.push_back({"lambda", fmt_g(a.lambda)});
  kv.push_back({"c", fmt_g(a.c)});
  kv.push_back({"max_inner", std::to_string(a.max_inner)});
  kv.push_back({"epochs", fmt_g(a.epochs)});
  kv.push_back({"seed", std::to_string(a.seed)});
  kv.push_back({"chunk", std::to_string(a.chunk)});

  write_csv(fs::path(a.output_dir) / "bench.csv", kv,
            {"threads", "rank", "trial", "seconds_per_epoch", "speedup_vs_1thread"},
            rows);
  std::cout << "bench.csv written to " << a.output_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse nonnegative tensor completion"};
  app.require_subcommand(1);

  CompleteArgs ca;
  auto* complete = app.add_subcommand("complete", "factorize an observed .tns tensor");
  complete->add_option("--input", ca.input, ".tns input path")->required();
  complete->add_option("--output-dir", ca.output_dir, "output directory");
  add_solver_flags(complete, ca.solver, /*rank_required=*/true);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate synthetic low-rank data");
  synth->add_option("--dims", sa.dims, "tensor dimensions, comma separated")
      ->delimiter(',');
  synth->add_option("--truth-rank", sa.truth_rank, "rank of the generated model");
  synth->add_option("--noise-sigma", sa.noise_sigma, "additive noise std dev");
  synth->add_option("--target-snr", sa.target_snr,
                    "derive noise sigma for this SNR (overrides --noise-sigma)");
  synth->add_option("--density", sa.density, "Bernoulli observation probability");
  synth->add_option("--mask-from", sa.mask_from, "reuse the support of this .tns file");
  synth->add_flag("--generate-only", sa.generate_only, "skip the completion run");
  synth->add_option("--output-dir", sa.output_dir, "output directory");
  add_solver_flags(synth, sa.solver, /*rank_required=*/false);

  ImageArgs ia;
  auto* image = app.add_subcommand("image", "corrupt and restore a binary PPM image");
  image->add_option("--input", ia.input, "PPM (P6) input path")->required();
  image->add_option("--keep-fraction", ia.keep_fraction,
                    "fraction of pixels kept when corrupting (1 = keep all)");
  image->add_option("--output-dir", ia.output_dir, "output directory");
  add_solver_flags(image, ia.solver, /*rank_required=*/true);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "threads x rank timing sweep");
  bench->add_option("--input", ba.input, ".tns input path (else synthetic)");
  bench->add_option("--dims", ba.dims, "synthetic dimensions, comma separated")
      ->delimiter(',');
  bench->add_option("--truth-rank", ba.truth_rank, "synthetic model rank");
  bench->add_option("--density", ba.density, "synthetic observation probability");
  bench->add_option("--noise-sigma", ba.noise_sigma, "synthetic noise std dev");
  bench->add_option("--threads", ba.threads, "thread counts, comma separated")
      ->delimiter(',');
  bench->add_option("--rank", ba.ranks, "ranks, comma separated")->delimiter(',');
  bench->add_option("--trials", ba.trials, "trials per configuration");
  bench->add_option("--lambda", ba.lambda, "Tikhonov weight");
  bench->add_option("--c", ba.c, "per-row sampling fraction");
  bench->add_option("--max-inner", ba.max_inner, "inner iterations per factor update");
  bench->add_option("--epochs", ba.epochs, "epoch budget per run");
  bench->add_option("--seed", ba.seed, "base RNG seed; trial t uses seed+t");
  bench->add_option("--chunk", ba.chunk, "dynamic-schedule chunk size (0 = static)");
  bench->add_option("--output-dir", ba.output_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (complete->parsed()) return cmd_complete(ca);
    if (synth->parsed()) return cmd_synth(std::move(sa));
    if (image->parsed()) return cmd_image(ia);
    if (bench->parsed()) return cmd_bench(ba);
  } catch (const std::exception& ex) {
    std::cerr << "ntc: error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
