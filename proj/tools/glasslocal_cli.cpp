// glasslocal: command-line driver for the sampler, its components, and the
// baseline experiments. Every command accepts --config <file.json> plus flag
// overrides, writes its result to --output (or stdout), and echoes the
// resolved configuration to <output>.config.json.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "glasslocal/config.hpp"
#include "glasslocal/glasslocal.hpp"
#include "glasslocal/invariants.hpp"

namespace {

using namespace glasslocal;
using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

json parse_number_list(const std::string& s, bool integer) {
  json arr = json::array();
  for (const auto& item : split(s, ',')) {
    if (integer)
      arr.push_back(std::stoull(item));
    else
      arr.push_back(std::stod(item));
  }
  return arr;
}

/// "2:0.5,3:1" or a JSON object.
json parse_mixture(const std::string& s) {
  if (!s.empty() && s.front() == '{') return json::parse(s);
  json j = json::object();
  for (const auto& item : split(s, ',')) {
    const auto kv = split(item, ':');
    if (kv.size() != 2) throw ConfigError("/mixture", "expected p:c2 pairs, got '" + item + "'");
    j[kv[0]] = std::stod(kv[1]);
  }
  return j;
}

/// Output sink: a file when `output` is set, stdout otherwise.
class Sink {
 public:
  explicit Sink(const json& cfg) {
    if (cfg.contains("output")) {
      path_ = cfg["output"].get<std::string>();
      file_.open(path_, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open " + path_ + " for writing");
    }
  }
  std::ostream& os() { return path_.empty() ? std::cout : file_; }

 private:
  std::string path_;
  std::ofstream file_;
};

void echo_config(const json& cfg) {
  if (!cfg.contains("output")) return;
  std::ofstream os(cfg["output"].get<std::string>() + ".config.json", std::ios::binary);
  os << cfg.dump(2) << "\n";
}

struct Instance {
  DisorderTensors g;
  Vec y;  // tilt: t x + B(t) for planted instances, zero otherwise
};

DisorderTensors load_or_generate(const json& cfg, int threads) {
  if (cfg.contains("tensor")) return load_disorder(cfg["tensor"].get<std::string>());
  const auto spec = mixture_from_json(cfg["mixture"]);
  const int n = cfg["n"].get<int>();
  const auto seed = cfg["seed"].get<std::uint64_t>();
  if (cfg.value("kind", "random") == "planted")
    return gen_planted(spec, n, cfg["planted_beta"].get<double>(), random_spins(n, seed), seed, kDefaultTensorBudget, threads);
  return gen_random(spec, n, seed, kDefaultTensorBudget, threads);
}

Instance make_instance(const json& cfg, int threads) {
  Instance inst{load_or_generate(cfg, threads), {}};
  const double t = cfg.value("t", 0.0);
  inst.y = Vec::Zero(inst.g.n);
  if (inst.g.planted_x && t > 0.0)
    inst.y = planted_observation(*inst.g.planted_x, t, rng::derive(cfg["seed"].get<std::uint64_t>(), "observation"));
  return inst;
}

SamplerParams sampler_params(const json& cfg) {
  SamplerParams p;
  const auto& s = cfg["sampler"];
  p.beta = cfg["beta"].get<double>();
  p.delta = s["delta"].get<double>();
  p.L = s["L"].get<int>();
  p.K_amp = s["K_amp"].get<int>();
  p.K_ngd = s["K_ngd"].get<int>();
  p.eta = s["eta"].get<double>();
  p.gamma_reg = s["Gamma"].get<double>();
  p.warm_start = s["warm_start"].get<bool>();
  p.keep_trajectory = s["keep_trajectory"].get<bool>();
  p.seed = cfg["seed"].get<std::uint64_t>();
  return p;
}

std::string bits_hex(const Vec& x) {
  std::string out;
  char buf[3];
  for (Eigen::Index b = 0; b < (x.size() + 7) / 8; ++b) {
    unsigned v = 0;
    for (int k = 0; k < 8 && b * 8 + k < x.size(); ++k)
      if (x[b * 8 + k] > 0) v |= 1u << k;
    std::snprintf(buf, sizeof buf, "%02x", v);
    out += buf;
  }
  return out;
}

std::vector<std::uint64_t> seed_list(const json& cfg) { return cfg["seeds"].get<std::vector<std::uint64_t>>(); }

int cmd_gen_disorder(const json& cfg, int threads) {
  if (!cfg.contains("output")) throw ConfigError("/output", "gen-disorder needs an output path");
  save_disorder(cfg["output"].get<std::string>(), load_or_generate(cfg, threads));
  return 0;
}

int cmd_thresholds(const json& cfg, int) {
  ThresholdOptions opt;
  opt.beta3_c0 = cfg["beta3_c0"].get<double>();
  Sink sink(cfg);
  sink.os() << to_json(thresholds(mixture_from_json(cfg["mixture"]), opt)).dump(2) << "\n";
  return 0;
}

int cmd_se(const json& cfg, int threads) {
  const auto spec = mixture_from_json(cfg["mixture"]);
  const double beta = cfg["beta"].get<double>(), t_max = cfg["t_max"].get<double>();
  const int points = cfg["t_points"].get<int>();
  std::vector<std::string> rows(points);
  parallel_for(points, threads, [&](std::size_t i) {
    const double t = points == 1 ? t_max : t_max * static_cast<double>(i) / (points - 1);
    const double q = q_star(spec, beta, t);
    rows[i] = fmt(t) + "," + fmt(q) + "," + fmt(psi_star(spec, beta, t)) + "," + fmt(1.0 - q);
  });
  Sink sink(cfg);
  sink.os() << "t,q_star,psi_star,mmse\n";
  for (const auto& r : rows) sink.os() << r << "\n";
  return 0;
}

int cmd_amp(const json& cfg, int threads) {
  const auto inst = make_instance(cfg, threads);
  const double beta = cfg["beta"].get<double>(), t = cfg["t"].get<double>();
  const int K = cfg["K"].get<int>();
  const auto traj = amp_run(inst.g, inst.y, beta, K);
  const auto se = se_recursion(inst.g.spec, beta, t, K);
  const double n = inst.g.n;
  Sink sink(cfg);
  sink.os() << "k,q_hat,mse_empirical,mse_predicted,z_increment_ratio\n";
  for (int k = 0; k <= K; ++k) {
    const auto& s = traj.states[k];
    const std::string mse = inst.g.planted_x ? fmt((s.m_hat - *inst.g.planted_x).squaredNorm() / n) : "nan";
    double ratio = 0.0;
    if (k > 0 && s.z.norm() > 0.0) ratio = (s.z - traj.states[k - 1].z).norm() / s.z.norm();
    // the k-th iterate is compared with 1 - q_k (q_0 = 0 is the uninformed start)
    sink.os() << k << "," << fmt(s.q_hat) << "," << mse << "," << fmt(1.0 - se.q_sequence[k]) << "," << fmt(ratio) << "\n";
  }
  return 0;
}

int cmd_tap(const json& cfg, int threads) {
  const auto inst = make_instance(cfg, threads);
  const auto& g = inst.g;
  const double beta = cfg["beta"].get<double>(), t = cfg["t"].get<double>();
  const auto& tc = cfg["tap"];
  const double q = tc.contains("q") ? tc["q"].get<double>() : q_star(g.spec, beta, t);
  const double gamma_reg = tc["Gamma"].get<double>();
  const std::string source = tc["m_source"].get<std::string>();
  const int K = cfg["K"].get<int>();
  Vec m;
  if (source == "amp") {
    m = amp_run(g, inst.y, beta, K).last().m_hat;
  } else if (source == "ngd") {
    m = mean_estimate(g, inst.y, beta, q, K, cfg["sampler"]["K_ngd"].get<int>(), cfg["sampler"]["eta"].get<double>(), gamma_reg);
  } else {
    const rng::Stream u(cfg["seed"].get<std::uint64_t>(), "tap-m");
    m.resize(g.n);
    for (int i = 0; i < g.n; ++i) m[i] = 1.8 * u.uniform(i) - 0.9;
  }
  for (int i = 0; i < g.n; ++i) m[i] = std::clamp(m[i], -1.0 + 1e-12, 1.0 - 1e-12);
  TapParams prm{beta, q, gamma_reg, inst.y};
  const Vec gr = ftap_grad(g, m, prm);
  json out;
  out["n"] = g.n;
  out["beta"] = beta;
  out["q"] = q;
  out["Gamma"] = gamma_reg;
  out["m_source"] = source;
  out["Q"] = m.squaredNorm() / g.n;
  out["ftap"] = ftap_value(g, m, prm);
  out["grad_norm"] = gr.norm();
  out["grad_norm_per_sqrt_n"] = gr.norm() / std::sqrt(static_cast<double>(g.n));
  if (g.n <= kDefaultHessianCap) {
    const auto r = relative_hessian_extremes(g, m, prm);
    out["relative_hessian"] = {{"min_eig", r.min_eig}, {"max_eig", r.max_eig}};
  } else {
    out["relative_hessian"] = nullptr;
  }
  Sink sink(cfg);
  sink.os() << out.dump(2) << "\n";
  return 0;
}

int cmd_sample(const json& cfg, int threads) {
  const auto g = load_or_generate(cfg, threads);
  const auto base = sampler_params(cfg);
  base.validate();
  const int replicas = cfg["replicas"].get<int>();
  const auto sched = q_schedule(g.spec, base.beta, base.delta, base.L);
  std::vector<SampleRun> runs(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    SamplerParams p = base;
    p.seed = rng::derive(rng::derive(base.seed, "replica"), r);
    runs[r] = sample(g, p, &sched);
  });
  Sink sink(cfg);
  sink.os() << "replica,seed,final_q,grad_norm_last,x_bits_hex\n";
  for (int r = 0; r < replicas; ++r)
    sink.os() << r << "," << runs[r].seed << "," << fmt(runs[r].final_q()) << "," << fmt(runs[r].steps.back().grad_norm) << ","
              << bits_hex(runs[r].x_alg) << "\n";
  if (cfg.contains("trajectory_out") && base.keep_trajectory) {
    std::ofstream os(cfg["trajectory_out"].get<std::string>(), std::ios::binary);
    for (const auto& run : runs)
      for (const auto& y : run.y_trajectory) os.write(reinterpret_cast<const char*>(y.data()), y.size() * sizeof(double));
  }
  if (cfg.contains("batch_out")) {
    SampleBatch b;
    b.source = BatchSource::algorithm;
    b.seed = base.seed;
    b.x.resize(replicas, g.n);
    for (int r = 0; r < replicas; ++r) b.x.row(r) = runs[r].x_alg.transpose();
    save_batch(cfg["batch_out"].get<std::string>(), b);
  }
  return 0;
}

int cmd_exact(const json& cfg, int threads) {
  const auto inst = make_instance(cfg, threads);
  const auto d = Enumerator(inst.g, kDefaultEnumerationCap, threads).gibbs(cfg["beta"].get<double>(), inst.y);
  Sink sink(cfg);
  sink.os() << "i,mean,variance\n";
  for (int i = 0; i < d.n; ++i) sink.os() << i << "," << fmt(d.mean[i]) << "," << fmt(d.covariance(i, i)) << "\n";
  const int M = cfg["M"].get<int>();
  if (M > 0 && cfg.contains("batch_out"))
    save_batch(cfg["batch_out"].get<std::string>(), exact_sample(d, M, rng::derive(cfg["seed"].get<std::uint64_t>(), "exact-batch")));
  return 0;
}

int cmd_glauber(const json& cfg, int threads) {
  const auto g = load_or_generate(cfg, threads);
  const auto seed = cfg["seed"].get<std::uint64_t>();
  GlauberOptions opt{cfg["burn_in"].get<int>(), cfg["thin"].get<int>()};
  const auto batch = glauber_run(g, cfg["beta"].get<double>(), random_spins(g.n, rng::derive(seed, "glauber-x0")),
                                 cfg["sweeps"].get<int>(), seed, opt);
  Sink sink(cfg);
  sink.os() << "sample,energy,magnetization\n";
  for (int j = 0; j < batch.size(); ++j) {
    const Vec x = batch.x.row(j).transpose();
    sink.os() << j << "," << fmt(hamiltonian(g, x)) << "," << fmt(x.mean()) << "\n";
  }
  if (cfg.contains("batch_out")) save_batch(cfg["batch_out"].get<std::string>(), batch);
  return 0;
}

int cmd_w2(const json& cfg, int) {
  if (!cfg.contains("batch_a") || !cfg.contains("batch_b")) throw ConfigError("/batch_a", "w2 needs batch_a and batch_b");
  const auto a = load_batch(cfg["batch_a"].get<std::string>());
  const auto b = load_batch(cfg["batch_b"].get<std::string>());
  Sink sink(cfg);
  sink.os() << "M,n,w2,overlap_moment\n";
  sink.os() << a.size() << "," << a.n() << "," << fmt(empirical_w2(a, b)) << "," << fmt(overlap_moment(a, b)) << "\n";
  return 0;
}

int cmd_chaos(const json& cfg, int threads) {
  const auto s_list = cfg["s_list"].get<std::vector<double>>();
  const auto seeds = seed_list(cfg);
  ChaosOptions opt{cfg["M"].get<int>(), threads};
  const auto tab = chaos_experiment(mixture_from_json(cfg["mixture"]), cfg["n"].get<int>(), cfg["beta"].get<double>(), s_list, seeds, opt);
  Sink sink(cfg);
  sink.os() << "seed,s,overlap,overlap_exact,w2,w2_baseline\n";
  auto row = [&](const std::string& seed, const ChaosRow& r) {
    sink.os() << seed << "," << fmt(r.s) << "," << fmt(r.overlap) << "," << fmt(r.overlap_exact) << "," << fmt(r.w2) << ","
              << fmt(r.w2_baseline) << "\n";
  };
  for (std::size_t k = 0; k < seeds.size(); ++k)
    for (const auto& r : tab.per_seed[k]) row(std::to_string(seeds[k]), r);
  for (const auto& r : tab.mean) row("mean", r);
  return 0;
}

int cmd_stability(const json& cfg, int threads) {
  const auto spec = mixture_from_json(cfg["mixture"]);
  const int n = cfg["n"].get<int>();
  const auto params = sampler_params(cfg);
  const auto seeds = seed_list(cfg);
  StabilityOptions opt{cfg["replicas"].get<int>(), threads};
  const auto disorder_rows = stability_experiment(spec, n, cfg["s_list"].get<std::vector<double>>(), params, seeds, opt);
  const auto beta_list = cfg["beta_list"].get<std::vector<double>>();
  std::vector<StabilityRow> temp_rows;
  if (!beta_list.empty()) temp_rows = stability_temperature(spec, n, beta_list, params, seeds, opt);
  Sink sink(cfg);
  sink.os() << "variant,value,x_distance,m_distance\n";
  for (const auto& r : disorder_rows) sink.os() << "disorder," << fmt(r.value) << "," << fmt(r.x_distance) << "," << fmt(r.m_distance) << "\n";
  for (const auto& r : temp_rows) sink.os() << "temperature," << fmt(r.value) << "," << fmt(r.x_distance) << "," << fmt(r.m_distance) << "\n";
  return 0;
}

int cmd_validate(const json& cfg, int threads) {
  const auto results = run_invariants(threads);
  Sink sink(cfg);
  sink.os() << "check,value,bound,status\n";
  bool ok = true;
  for (const auto& r : results) {
    sink.os() << '"' << r.name << "\"," << fmt(r.value) << "," << fmt(r.bound) << "," << (r.pass() ? "pass" : "FAIL") << "\n";
    ok = ok && r.pass();
  }
  return ok ? 0 : 4;
}

const std::map<std::string, std::function<int(const json&, int)>>& commands() {
  static const std::map<std::string, std::function<int(const json&, int)>> table = {
      {"gen-disorder", cmd_gen_disorder}, {"thresholds", cmd_thresholds}, {"se", cmd_se},         {"amp", cmd_amp},
      {"tap", cmd_tap},                   {"sample", cmd_sample},         {"exact", cmd_exact},   {"glauber", cmd_glauber},
      {"w2", cmd_w2},                     {"chaos", cmd_chaos},           {"stability", cmd_stability}, {"validate", cmd_validate}};
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-localization sampler for mixed p-spin Gibbs measures"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  int threads_flag = 0;
  bool print_schema = false;
  json overrides = json::object();
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--threads", threads_flag, "worker threads (default: GLASSLOCAL_THREADS or 1)")->check(CLI::PositiveNumber);
  app.add_flag("--print-schema", print_schema, "print the configuration JSON schema and exit");

  using Path = std::vector<std::string>;
  auto set = [&](const Path& path, json value) {
    json* node = &overrides;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) node = &(*node)[path[k]];
    (*node)[path.back()] = std::move(value);
  };
  auto num = [&](const char* flag, Path path, const char* help) {
    app.add_option_function<double>(flag, [=](const double& v) { set(path, v); }, help);
  };
  auto integer = [&](const char* flag, Path path, const char* help) {
    app.add_option_function<long long>(flag, [=](const long long& v) { set(path, v); }, help);
  };
  auto str = [&](const char* flag, Path path, const char* help) {
    app.add_option_function<std::string>(flag, [=](const std::string& v) { set(path, v); }, help);
  };
  app.add_option_function<std::string>("--mixture", [&](const std::string& v) { set({"mixture"}, parse_mixture(v)); },
                                       "mixture as p:c2 pairs (2:0.5,3:1) or a JSON object");
  integer("--n", {"n"}, "dimension");
  num("--beta", {"beta"}, "inverse temperature");
  app.add_option_function<unsigned long long>("--seed", [&](const unsigned long long& v) { set({"seed"}, v); }, "master seed");
  str("--tensor", {"tensor"}, "disorder file to read");
  str("--kind", {"kind"}, "random | planted");
  num("--planted-beta", {"planted_beta"}, "spike strength of a planted instance");
  num("--t", {"t"}, "observation time of the planted tilt");
  integer("--K", {"K"}, "AMP iterations");
  num("--t-max", {"t_max"}, "largest t on the se grid");
  integer("--t-points", {"t_points"}, "points on the se grid");
  num("--beta3-c0", {"beta3_c0"}, "constant in the general beta3 formula");
  num("--delta", {"sampler", "delta"}, "Euler step");
  integer("--L", {"sampler", "L"}, "Euler steps");
  integer("--K-amp", {"sampler", "K_amp"}, "AMP iterations per mean estimate");
  integer("--K-ngd", {"sampler", "K_ngd"}, "NGD iterations per mean estimate");
  num("--eta", {"sampler", "eta"}, "NGD step size");
  num("--gamma", {"sampler", "Gamma"}, "TAP regularization Gamma");
  app.add_flag_function("--warm-start", [&](std::int64_t) { set({"sampler", "warm_start"}, true); }, "non-canonical NGD warm start");
  app.add_flag_function("--keep-trajectory", [&](std::int64_t) { set({"sampler", "keep_trajectory"}, true); }, "retain y_0..y_L");
  num("--q", {"tap", "q"}, "TAP linearization point");
  str("--m-source", {"tap", "m_source"}, "amp | ngd | random");
  integer("--replicas", {"replicas"}, "independent runs");
  integer("--M", {"M"}, "samples per batch");
  integer("--sweeps", {"sweeps"}, "Glauber sweeps");
  integer("--burn-in", {"burn_in"}, "Glauber sweeps discarded");
  integer("--thin", {"thin"}, "record every thin-th sweep");
  app.add_option_function<std::string>("--s-list", [&](const std::string& v) { set({"s_list"}, parse_number_list(v, false)); },
                                       "comma-separated interpolation values");
  app.add_option_function<std::string>("--beta-list", [&](const std::string& v) { set({"beta_list"}, parse_number_list(v, false)); },
                                       "comma-separated beta' values for the temperature variant");
  app.add_option_function<std::string>("--seeds", [&](const std::string& v) { set({"seeds"}, parse_number_list(v, true)); },
                                       "comma-separated disorder seeds");
  str("--batch-a", {"batch_a"}, "first batch file (w2)");
  str("--batch-b", {"batch_b"}, "second batch file (w2)");
  str("--batch-out", {"batch_out"}, "write samples as a batch file");
  str("--trajectory-out", {"trajectory_out"}, "write y trajectories (f64)");
  str("--output", {"output"}, "result file (default stdout)");

  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help = {
      {"gen-disorder", "write a disorder tensor file"},
      {"thresholds", "beta1, beta2, beta3, beta_c(RS), beta_dyn as JSON"},
      {"se", "state-evolution fixed points over a t-grid (CSV)"},
      {"amp", "AMP iterates against state evolution on a planted instance (CSV)"},
      {"tap", "TAP free energy value, gradient and relative-Hessian spectrum (JSON)"},
      {"sample", "run the localization sampler (CSV, one row per replica)"},
      {"exact", "exact Gibbs mean and variances by enumeration (CSV)"},
      {"glauber", "heat-bath Glauber chain (CSV)"},
      {"w2", "empirical W2 and overlap moment between two batch files (CSV)"},
      {"chaos", "disorder-chaos overlap experiment with exact sampling (CSV)"},
      {"stability", "sampler stability under disorder or temperature perturbation (CSV)"},
      {"validate", "run the built-in invariant checks (CSV)"}};
  for (const auto& name : command_names()) subs[name] = app.add_subcommand(name, help.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (print_schema) {
    std::cout << config_schema().dump(2) << "\n";
    return 0;
  }

  try {
    json cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw std::runtime_error("cannot open config " + config_path);
      try {
        cfg = json::parse(is);
      } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("not valid JSON: ") + e.what());
      }
      validate_config(cfg);
    }
    cfg.merge_patch(overrides);
    std::string command;
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) command = name;
    if (command.empty()) {
      if (!cfg.contains("command")) {
        std::cerr << app.help();
        return 2;
      }
      command = cfg["command"].get<std::string>();
    }
    int threads = threads_flag > 0 ? threads_flag : cfg.value("threads", 0);
    if (threads <= 0) threads = env_threads();
    const json resolved = resolve_config(cfg, command);
    const int status = commands().at(command)(resolved, threads);
    echo_config(resolved);
    return status;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
