// esn-mor: experiment driver. Every subcommand reads a flat key=value config
// (flags override file keys), writes its artifacts under --out, and drops a
// manifest carrying the resolved config, its hash, the seed, and the toolkit
// version. Exit codes: 0 success, 2 validation, 3 numerical divergence, 4 IO.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <esnmor/config.hpp>
#include <esnmor/deim.hpp>
#include <esnmor/esn.hpp>
#include <esnmor/model_io.hpp>
#include <esnmor/pod.hpp>
#include <esnmor/rng.hpp>
#include <esnmor/tasks.hpp>
#include <esnmor/training.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace esnmor;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

// Marks failures that should map to the IO exit code.
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Fn>
auto io_guard(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw IoFailure(e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw IoFailure("write failed: " + path.string());
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const Config& cfg) {
  json m;
  m["command"] = command;
  m["toolkit_version"] = kToolkitVersion;
  m["config_hash"] = cfg.hash();
  m["seed"] = cfg.get_u64("seed", 0);
  json entries = json::object();
  for (const auto& [k, v] : cfg.entries()) entries[k] = v;
  m["config"] = entries;
  write_text(out_dir / ("manifest-" + command + ".json"), m.dump(2) + "\n");
}

HyperParams hyper_from(const Config& cfg) {
  HyperParams hp;
  hp.reservoir_size = cfg.get_index("reservoir_size");
  hp.spectral_radius = cfg.get_double("spectral_radius");
  hp.leak_rate = cfg.get_double("leak_rate", 1.0);
  hp.input_scaling = cfg.get_double("input_scaling", 0.1);
  hp.bias_scaling = cfg.get_double("bias_scaling", hp.input_scaling);
  hp.n_inputs = cfg.get_index("n_inputs", 1);
  hp.n_outputs = cfg.get_index("n_outputs", 1);
  hp.seed = cfg.get_u64("seed", 0);
  return hp;
}

SignalSpec signal_from(const Config& cfg, const std::string& prefix) {
  SignalSpec ss;
  const std::string kind = cfg.get_string(prefix + "kind", "white_noise");
  if (kind == "white_noise")
    ss.kind = SignalKind::white_noise;
  else if (kind == "aprbs")
    ss.kind = SignalKind::aprbs;
  else if (kind == "uniform")
    ss.kind = SignalKind::uniform;
  else
    throw std::invalid_argument("unknown signal kind: " + kind);
  ss.length = cfg.get_index(prefix + "length", 5000);
  ss.seed = cfg.get_u64(prefix + "seed", cfg.get_u64("seed", 0) + 1000);
  ss.mean = cfg.get_double(prefix + "mean", 0.0);
  ss.std_dev = cfg.get_double(prefix + "std_dev", 1.0);
  ss.lo = cfg.get_double(prefix + "lo", 0.0);
  ss.hi = cfg.get_double(prefix + "hi", 1.0);
  ss.min_period = cfg.get_index(prefix + "min_period", 1);
  return ss;
}

Dataset narma10_dataset(const Config& cfg) {
  SignalSpec ss;
  ss.kind = SignalKind::uniform;
  ss.length = cfg.get_index("length", 5000);
  ss.lo = cfg.get_double("input_lo", 0.0);
  ss.hi = cfg.get_double("input_hi", 0.05);
  ss.seed = cfg.get_u64("signal_seed", cfg.get_u64("seed", 0) + 1000);
  const Vector u = gen_signal(ss);
  const Vector y = narma_sim(u);
  Dataset data;
  data.inputs = u.transpose();
  data.targets = y.transpose();
  data.train_end = cfg.get_index("train_end", ss.length * 2 / 5);
  data.val_end = cfg.get_index("val_end", data.train_end);
  return data;
}

Dataset dataset_from(const Config& cfg) {
  if (cfg.has("dataset"))
    return io_guard([&] {
      return load_dataset_csv(cfg.get_string("dataset"),
                              cfg.get_index("train_end"),
                              cfg.get_index("val_end", cfg.get_index("train_end")));
    });
  const std::string task = cfg.get_string("task", "");
  if (task == "narma10") return narma10_dataset(cfg);
  throw std::invalid_argument(
      "train: need either dataset=<csv> or task=narma10");
}

json r2_json(const std::vector<std::optional<double>>& r2) {
  json arr = json::array();
  for (const auto& v : r2)
    arr.push_back(v ? json(*v) : json(nullptr));
  return arr;
}

// Collects post-washout states of the loaded full model driven by a signal.
PodBasis snapshot_basis(const EchoStateNetwork& esn, const Config& cfg) {
  Matrix inputs;
  if (cfg.has("dataset")) {
    const Dataset data = dataset_from(cfg);
    inputs = data.inputs.leftCols(data.train_end);
  } else if (cfg.get_string("task", "") == "narma10") {
    const Dataset data = narma10_dataset(cfg);
    inputs = data.inputs.leftCols(data.train_end);
  } else {
    const Vector sig = gen_signal(signal_from(cfg, "signal_"));
    inputs = sig.transpose();
  }
  if (inputs.rows() != esn.w_ir.cols())
    throw std::invalid_argument("reduce: snapshot signal width mismatch");
  const Index washout =
      cfg.get_index("washout", std::min<Index>(kDefaultWashout,
                                               inputs.cols() / 4));
  const auto traj = esn_run(esn, inputs, Vector::Zero(esn.size()));
  return svd_snapshots(traj.states.rightCols(inputs.cols() - washout));
}

// ---------------------------------------------------------------------------

int cmd_gen_esn(const Config& cfg, const fs::path& out) {
  const auto esn = generate_esn(hyper_from(cfg));
  const fs::path path = out / cfg.get_string("model_out", "esn.json");
  io_guard([&] { save_model(esn, path.string()); });
  std::cout << "wrote " << path.string() << " (N=" << esn.size()
            << ", recomputed spectral radius "
            << spectral_radius_power(Matrix(esn.w_rr)) << ")\n";
  return 0;
}

int cmd_train(const Config& cfg, const fs::path& out) {
  const auto esn =
      io_guard([&] { return load_esn(cfg.get_string("model")); });
  const Dataset data = dataset_from(cfg);
  const Index washout = cfg.get_index("washout", kDefaultWashout);
  std::optional<double> lambda;
  if (cfg.has("lambda")) lambda = cfg.get_double("lambda");
  auto [trained, report] = train_readout(esn, data, washout, lambda);

  const fs::path model_path =
      out / cfg.get_string("model_out", "trained.json");
  io_guard([&] { save_model(trained, model_path.string()); });
  json rep;
  rep["lambda"] = report.lambda;
  rep["washout"] = report.washout;
  rep["train_r2"] = r2_json(report.train_r2);
  rep["test_r2"] = r2_json(report.test_r2);
  rep["config_hash"] = cfg.hash();
  rep["seed"] = cfg.get_u64("seed", 0);
  rep["toolkit_version"] = kToolkitVersion;
  write_text(out / "fit_report.json", rep.dump(2) + "\n");
  std::cout << "wrote " << model_path.string();
  if (!report.test_r2.empty() && report.test_r2[0])
    std::cout << " (test R2 " << *report.test_r2[0] << ")";
  std::cout << "\n";
  return 0;
}

int cmd_reduce(const Config& cfg, const fs::path& out) {
  const auto esn =
      io_guard([&] { return load_esn(cfg.get_string("model")); });
  const PodBasis basis = snapshot_basis(esn, cfg);
  const double pod_cutoff = cfg.get_double("pod_cutoff");
  const PodEsn pe = pod_reduce(esn, basis, pod_cutoff);

  json rep;
  rep["rank"] = basis.rank();
  rep["m"] = pe.size();
  rep["energy_kept"] = pe.energy_kept;
  rep["config_hash"] = cfg.hash();
  rep["seed"] = cfg.get_u64("seed", 0);
  rep["toolkit_version"] = kToolkitVersion;

  const fs::path pod_path = out / cfg.get_string("pod_out", "pod.json");
  io_guard([&] { save_model(pe, pod_path.string()); });
  std::cout << "wrote " << pod_path.string() << " (m=" << pe.size() << ")\n";

  if (cfg.has("deim_cutoff")) {
    const DeimEsn de = deim_build(esn, pe, basis, cfg.get_double("deim_cutoff"));
    const fs::path deim_path = out / cfg.get_string("deim_out", "deim.json");
    io_guard([&] { save_model(de, deim_path.string()); });
    rep["m_d"] = de.points();
    std::cout << "wrote " << deim_path.string() << " (m_d=" << de.points()
              << ")\n";
  }
  write_text(out / "reduction_report.json", rep.dump(2) + "\n");
  return 0;
}

std::unique_ptr<StepModel> step_model_from_file(const std::string& path) {
  AnyModel any = io_guard([&] { return load_model(path); });
  return std::visit([](const auto& m) { return make_step_model(m); }, any);
}

int cmd_mc(const Config& cfg, const fs::path& out) {
  auto model = step_model_from_file(cfg.get_string("model"));
  SignalSpec ss = signal_from(cfg, "signal_");
  if (!cfg.has("signal_length")) ss.length = 6000;
  const Vector eta = gen_signal(ss);
  const Index n_mc = cfg.get_index("n_mc", kDefaultNMc);
  const Index washout = cfg.get_index("washout", kDefaultWashout);
  const double lambda = cfg.get_double("lambda", kDefaultLambda);
  const McResult res = memory_capacity(*model, eta, n_mc, washout, lambda);

  json rep;
  rep["mc"] = res.mc;
  rep["n_mc"] = res.n_mc;
  rep["r_n"] = res.r_n;
  rep["config_hash"] = cfg.hash();
  rep["seed"] = cfg.get_u64("seed", 0);
  rep["toolkit_version"] = kToolkitVersion;
  write_text(out / "mc_result.json", rep.dump(2) + "\n");
  std::cout << "MC = " << res.mc << " over " << res.n_mc << " delays\n";
  return 0;
}

int cmd_narma_bench(const Config& cfg, const fs::path& out, bool paper_scale) {
  const Index n_seeds = cfg.get_index("n_seeds", paper_scale ? 12 : 3);
  const std::uint64_t seed0 = cfg.get_u64("seed", 1);
  std::ofstream csv(out / "narma_results.csv");
  if (!csv) throw IoFailure("cannot write narma_results.csv");
  csv << "seed,reservoir_size,lambda,train_r2,test_r2\n";
  for (Index i = 0; i < n_seeds; ++i) {
    Config run = cfg;
    run.set("seed", std::to_string(seed0 + static_cast<std::uint64_t>(i)));
    HyperParams hp = hyper_from(run);
    const auto esn = generate_esn(hp);
    const Dataset data = narma10_dataset(run);
    const Index washout = cfg.get_index("washout", kDefaultWashout);
    std::optional<double> lambda;
    if (cfg.has("lambda")) lambda = cfg.get_double("lambda");
    auto [trained, rep] = train_readout(esn, data, washout, lambda);
    csv << hp.seed << ',' << hp.reservoir_size << ',' << rep.lambda << ','
        << rep.train_r2[0].value_or(std::nan("")) << ','
        << rep.test_r2[0].value_or(std::nan("")) << "\n";
    std::cout << "seed " << hp.seed << ": test R2 "
              << rep.test_r2[0].value_or(std::nan("")) << "\n";
  }
  if (!csv.flush()) throw IoFailure("write failed: narma_results.csv");
  return 0;
}

int cmd_svd_profile(const Config& cfg, const fs::path& out, bool paper_scale) {
  const Index n_seeds = cfg.get_index("n_seeds", paper_scale ? 20 : 5);
  const std::uint64_t seed0 = cfg.get_u64("seed", 1);
  const Index top = cfg.get_index("top", 10);
  std::vector<std::string> signals;
  {
    std::string raw = cfg.get_string("signals", "white_noise,aprbs");
    size_t pos = 0;
    while (pos != std::string::npos) {
      const size_t comma = raw.find(',', pos);
      signals.push_back(raw.substr(pos, comma - pos));
      pos = comma == std::string::npos ? comma : comma + 1;
    }
  }
  std::ofstream csv(out / "svd_profile.csv");
  if (!csv) throw IoFailure("cannot write svd_profile.csv");
  csv << "signal,seed,j,sigma_j,epsilon_j\n";
  csv.precision(17);
  for (const std::string& name : signals) {
    for (Index i = 0; i < n_seeds; ++i) {
      Config run = cfg;
      run.set("seed", std::to_string(seed0 + static_cast<std::uint64_t>(i)));
      run.set("signal_kind", name);
      const auto esn = generate_esn(hyper_from(run));
      const SignalSpec ss = signal_from(run, "signal_");
      const Vector sig = gen_signal(ss);
      const Index washout = cfg.get_index("washout", kDefaultWashout);
      const auto traj =
          esn_run(esn, sig.transpose(), Vector::Zero(esn.size()));
      const PodBasis basis =
          svd_snapshots(traj.states.rightCols(sig.size() - washout));
      const Index rows = std::min<Index>(top, basis.rank());
      for (Index j = 0; j < rows; ++j)
        csv << name << ',' << run.get_u64("seed", 0) << ',' << j + 1 << ','
            << basis.sigma[j] << ',' << basis.energy[j] << "\n";
    }
  }
  if (!csv.flush()) throw IoFailure("write failed: svd_profile.csv");
  std::cout << "wrote " << (out / "svd_profile.csv").string() << "\n";
  return 0;
}

int cmd_timing(const Config& cfg, const fs::path& out) {
  std::vector<std::string> paths;
  {
    std::string raw = cfg.get_string("models");
    size_t pos = 0;
    while (pos != std::string::npos) {
      const size_t comma = raw.find(',', pos);
      paths.push_back(raw.substr(pos, comma - pos));
      pos = comma == std::string::npos ? comma : comma + 1;
    }
  }
  const Index n_steps = cfg.get_index("n_steps", 5000);
  const Index warmup = cfg.get_index("warmup", 500);
  SignalSpec ss = signal_from(cfg, "signal_");
  ss.length = n_steps + warmup;
  const Vector sig = gen_signal(ss);

  std::ofstream csv(out / "timing.csv");
  if (!csv) throw IoFailure("cannot write timing.csv");
  csv << "model_id,n_states,n_tanh_nodes,mean_step_ms,std_step_ms,n_steps,"
         "warmup_steps\n";
  for (const std::string& path : paths) {
    AnyModel any = io_guard([&] { return load_model(path); });
    auto model =
        std::visit([](const auto& m) { return make_step_model(m); }, any);
    const Index n_states = model->state_dim();
    const Index n_tanh = std::visit(
        [](const auto& m) -> Index {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, DeimEsn>)
            return m.points();
          else if constexpr (std::is_same_v<T, PodEsn>)
            return m.full_size();
          else
            return m.size();
        },
        any);
    model->reset();
    Vector u(1);
    // Timing steps run serially; per-step numbers stay comparable across
    // models on any core count.
    for (Index k = 0; k < warmup; ++k) {
      u[0] = sig[k];
      model->step(u);
    }
    std::vector<double> ms(static_cast<size_t>(n_steps));
    for (Index k = 0; k < n_steps; ++k) {
      u[0] = sig[warmup + k];
      const auto t0 = std::chrono::steady_clock::now();
      model->step(u);
      ms[static_cast<size_t>(k)] =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - t0)
              .count();
    }
    const double mean =
        std::accumulate(ms.begin(), ms.end(), 0.0) / double(n_steps);
    double var = 0.0;
    for (double v : ms) var += (v - mean) * (v - mean);
    const double stdev = std::sqrt(var / double(n_steps));

    const std::string id = fs::path(path).stem().string();
    std::ofstream raw(out / ("timing_raw_" + id + ".csv"));
    if (!raw) throw IoFailure("cannot write timing raw log");
    raw.precision(17);
    raw << "step,step_ms\n";
    for (Index k = 0; k < n_steps; ++k)
      raw << k << ',' << ms[static_cast<size_t>(k)] << "\n";
    if (!raw.flush()) throw IoFailure("write failed: timing raw log");

    csv.precision(17);
    csv << id << ',' << n_states << ',' << n_tanh << ','
        << mean << ',' << stdev << ',' << n_steps << ',' << warmup << "\n";
    std::cout << id << ": " << mean << " ms/step over " << n_steps
              << " steps\n";
  }
  if (!csv.flush()) throw IoFailure("write failed: timing.csv");
  return 0;
}

int cmd_stability(const Config& cfg, const fs::path& out) {
  const auto esn =
      io_guard([&] { return load_esn(cfg.get_string("model")); });
  std::optional<PodEsn> pe;
  std::optional<DeimEsn> de;
  if (cfg.has("pod_model"))
    pe = io_guard([&] { return load_pod_esn(cfg.get_string("pod_model")); });
  if (cfg.has("deim_model"))
    de = io_guard(
        [&] { return load_deim_esn(cfg.get_string("deim_model")); });

  const Index n_points = cfg.get_index("n_points", 10);
  const double scale = cfg.get_double("point_scale", 0.1);
  Rng rng(cfg.get_u64("seed", 0) + 42);
  json records = json::array();
  for (Index p = 0; p < n_points; ++p) {
    Vector x(esn.size());
    for (Index i = 0; i < esn.size(); ++i) x[i] = scale * rng.normal();
    Vector u(esn.w_ir.cols());
    for (Index i = 0; i < u.size(); ++i) u[i] = rng.normal();
    const StabilityReport rep = stability_spectrum(
        esn, pe ? &*pe : nullptr, de ? &*de : nullptr, x, u);
    json rec;
    rec["point_id"] = p;
    rec["rho_full"] = rep.rho_full;
    rec["rho_pod"] = rep.rho_pod ? json(*rep.rho_pod) : json(nullptr);
    rec["rho_deim"] = rep.rho_deim ? json(*rep.rho_deim) : json(nullptr);
    records.push_back(rec);
    std::cout << "point " << p << ": rho_full " << rep.rho_full;
    if (rep.rho_pod) std::cout << ", rho_pod " << *rep.rho_pod;
    if (rep.rho_deim) std::cout << ", rho_deim " << *rep.rho_deim;
    std::cout << "\n";
  }
  json doc;
  doc["records"] = records;
  doc["config_hash"] = cfg.hash();
  doc["seed"] = cfg.get_u64("seed", 0);
  doc["toolkit_version"] = kToolkitVersion;
  write_text(out / "stability.json", doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reservoir-computing model-order-reduction toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  bool paper_scale = false;

  const std::vector<std::string> names = {
      "gen-esn", "train",       "reduce", "mc",
      "narma-bench", "svd-profile", "timing", "stability"};
  for (const std::string& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value config file")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed_override, "override the config seed");
    sub->add_flag("--paper-scale", paper_scale,
                  "full experiment grids instead of desk-scale defaults");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Config cfg = io_guard([&] { return Config::from_file(config_path); });
    if (seed_override) cfg.set("seed", std::to_string(*seed_override));
    if (paper_scale) cfg.set("paper_scale", "true");
    paper_scale = cfg.get_bool("paper_scale", false);

    const fs::path out(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoFailure("cannot create output directory: " + out_dir);

    int rc = 1;
    if (command == "gen-esn")
      rc = cmd_gen_esn(cfg, out);
    else if (command == "train")
      rc = cmd_train(cfg, out);
    else if (command == "reduce")
      rc = cmd_reduce(cfg, out);
    else if (command == "mc")
      rc = cmd_mc(cfg, out);
    else if (command == "narma-bench")
      rc = cmd_narma_bench(cfg, out, paper_scale);
    else if (command == "svd-profile")
      rc = cmd_svd_profile(cfg, out, paper_scale);
    else if (command == "timing")
      rc = cmd_timing(cfg, out);
    else if (command == "stability")
      rc = cmd_stability(cfg, out);
    if (rc == 0) write_manifest(out, command, cfg);
    return rc;
  } catch (const DivergenceError& e) {
    std::cerr << "esn-mor: diverged at step " << e.step << ": " << e.what()
              << "\n";
    return kExitDivergence;
  } catch (const IoFailure& e) {
    std::cerr << "esn-mor: io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "esn-mor: " << e.what() << "\n";
    return kExitValidation;
  }
}
