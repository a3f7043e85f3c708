// Command-line front end. Exit status: 0 success, 1 validation failure
// (rejected atom, failed probe), 2 usage or input error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dhl/atoms.hpp"
#include "dhl/hardy.hpp"
#include "dhl/io.hpp"
#include "dhl/operators.hpp"
#include "dhl/parallel.hpp"
#include "dhl/probes.hpp"

namespace {

using namespace dhl;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Values from --config, applied to every option not given on the command line.
class ConfigFile {
 public:
  void load(const std::string& path) {
    if (path.empty()) return;
    try {
      json_ = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("config " + path + ": " + e.what());
    }
    if (!json_.is_object()) throw FormatError("config " + path + ": top level must be an object");
  }

  const nlohmann::json& json() const { return json_; }

  template <class T>
  void fill(const CLI::App* app, const std::string& flag, const std::string& key, T& var) const {
    if (app->count(flag) > 0 || !json_.contains(key)) return;
    try {
      var = json_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw FormatError("config field \"" + key + "\" has the wrong type");
    }
  }

  template <class T>
  void fill(const CLI::App* app, const std::string& flag, const std::string& key, std::optional<T>& var) const {
    if (app->count(flag) > 0 || !json_.contains(key)) return;
    T v{};
    fill(app, flag, key, v);
    var = v;
  }

 private:
  nlohmann::json json_ = nlohmann::json::object();
};

Box parse_out_box(const std::string& spec, const LatticeSeq& b) {
  if (spec.rfind("auto:", 0) == 0) {
    double d = 0.0;
    try {
      std::size_t used = 0;
      d = std::stod(spec.substr(5), &used);
      if (used != spec.size() - 5) throw std::invalid_argument(spec);
    } catch (const std::exception&) {
      throw UsageError("--out-box: cannot read the dilation in \"" + spec + "\"");
    }
    const auto sb = support_box(b);
    return dilate_box(sb ? *sb : b.box(), d);
  }
  // origin:shape, each a comma-separated integer list.
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("--out-box must be auto:D or o1,..,on:s1,..,sn");
  const auto ints = [&](const std::string& s) {
    Point v;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const auto comma = s.find(',', pos);
      const std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        std::size_t used = 0;
        v.push_back(std::stoll(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError("--out-box: bad integer \"" + item + "\"");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return v;
  };
  Box box(ints(spec.substr(0, colon)), ints(spec.substr(colon + 1)));
  if (box.dim() != b.dim()) throw UsageError("--out-box: dimension differs from the input");
  return box;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("DHL_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("DHL_SEED is not an unsigned integer: ") + s);
  }
}

struct OperatorArgs {
  std::string in, out, out_box = "auto:2", method = "fft";
  double alpha = 0.0;
};

struct HardyArgs {
  std::string in, out;
  double p = 1.0;
  std::optional<double> potential;
  double dilation = 8.0;
  double growth = 1.01;
  std::optional<double> t_cap;
  bool no_tail = false;
};

struct AtomGenArgs {
  int n = 1;
  std::vector<std::int64_t> center;
  std::int64_t radius = 1;
  double p = 1.0;
  std::uint64_t seed = 1;
  std::string out;
};

struct AtomCheckArgs {
  std::string in, out;
  std::optional<double> p;
  double tol = 1e-10;
};

struct ProbeArgs {
  std::string suite, out_dir = ".", json, csv;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
};

int run_probes(const ProbeArgs& a, const ConfigFile& cfg) {
  std::vector<ProbeKind> kinds;
  if (a.suite == "all") {
    kinds = all_probe_kinds();
  } else if (auto k = parse_probe_kind(a.suite)) {
    kinds = {*k};
  } else {
    throw UsageError("--suite: unknown suite \"" + a.suite + "\"");
  }
  nlohmann::json common = cfg.json();
  for (const char* key : {"suite", "out_dir", "threads"}) common.erase(key);
  const auto seed_env = env_seed();
  bool all_pass = true;
  for (auto kind : kinds) {
    const std::string name = probe_name(kind);
    ProbeConfig pc = ProbeConfig::defaults(kind);
    pc.merge_json(common);
    if (common.contains(name)) pc.merge_json(common[name]);
    if (seed_env) pc.seed = *seed_env;
    if (a.seed) pc.seed = *a.seed;
    if (a.trials) pc.trials = *a.trials;
    if (kinds.size() == 1 && !a.json.empty()) pc.json_path = a.json;
    if (kinds.size() == 1 && !a.csv.empty()) pc.csv_path = a.csv;
    const std::filesystem::path dir(a.out_dir);
    // A suite-wide json/csv path only applies when a single probe runs.
    const bool shared = kinds.size() > 1 && !(common.contains(name) && common[name].contains("json"));
    if (pc.json_path.empty() || shared) pc.json_path = (dir / (name + ".json")).string();
    const bool shared_csv = kinds.size() > 1 && !(common.contains(name) && common[name].contains("csv"));
    if (pc.csv_path.empty() || shared_csv) pc.csv_path = (dir / (name + ".csv")).string();
    pc.validate(kind);

    const auto report = run_probe(kind, pc);
    write_text_file(pc.json_path, dump_json17(report_to_json(report)) + "\n");
    write_text_file(pc.csv_path, report_to_csv(report));
    std::size_t passed = 0;
    for (const auto& s : report.series) passed += s.pass ? 1 : 0;
    std::cout << name << ": " << (report.pass ? "pass" : "fail") << " (" << passed << "/" << report.series.size()
              << " series) -> " << pc.json_path << "\n";
    all_pass = all_pass && report.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Riesz potentials, maximal operators and Hardy-space estimates on Z^n"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  unsigned threads = 0;
  app.add_option("--config", config_path, "JSON file with default option values")->check(CLI::ExistingFile);
  app.add_option("--threads", threads, "Worker thread cap (0: hardware concurrency)");

  OperatorArgs riesz_args;
  auto* riesz = app.add_subcommand("riesz", "Apply I_alpha to a sequence file");
  riesz->add_option("--in", riesz_args.in, "Input sequence");
  riesz->add_option("--alpha", riesz_args.alpha, "Order in (0, n)");
  riesz->add_option("--out-box", riesz_args.out_box, "auto:D or o1,..,on:s1,..,sn");
  riesz->add_option("--method", riesz_args.method, "fft or direct");
  riesz->add_option("--out", riesz_args.out, "Output sequence (default stdout)");

  OperatorArgs max_args;
  auto* maximal = app.add_subcommand("maximal", "Apply M_alpha (alpha = 0: Hardy-Littlewood)");
  maximal->add_option("--in", max_args.in, "Input sequence");
  maximal->add_option("--alpha", max_args.alpha, "Order in [0, n)");
  maximal->add_option("--out-box", max_args.out_box, "auto:D or o1,..,on:s1,..,sn");
  maximal->add_option("--out", max_args.out, "Output sequence (default stdout)");

  HardyArgs hardy_args;
  auto* hardy = app.add_subcommand("hardy-norm", "Estimate the H^p quasi-norm");
  hardy->add_option("--in", hardy_args.in, "Input sequence");
  hardy->add_option("--p", hardy_args.p, "Exponent p > 0");
  hardy->add_option("--potential", hardy_args.potential, "Estimate the norm of I_alpha b for this alpha");
  hardy->add_option("--dilation", hardy_args.dilation, "Evaluation box dilation D");
  hardy->add_option("--growth", hardy_args.growth, "t-grid growth factor");
  hardy->add_option("--t-cap", hardy_args.t_cap, "Largest t");
  hardy->add_flag("--no-tail", hardy_args.no_tail, "Skip the 2D tail diagnostic");
  hardy->add_option("--out", hardy_args.out, "Output JSON (default stdout)");

  AtomGenArgs gen_args;
  auto* gen = app.add_subcommand("atom-gen", "Generate a random atom");
  gen->add_option("--n", gen_args.n, "Dimension");
  gen->add_option("--center", gen_args.center, "Cube center (default origin)")->delimiter(',');
  gen->add_option("--radius", gen_args.radius, "Cube radius m");
  gen->add_option("--p", gen_args.p, "Exponent in (0, 1]");
  gen->add_option("--seed", gen_args.seed, "Random seed (DHL_SEED overrides the config)");
  gen->add_option("--out", gen_args.out, "Output atom (default stdout)");

  AtomCheckArgs check_args;
  auto* check = app.add_subcommand("atom-check", "Validate an atom file");
  check->add_option("--in", check_args.in, "Atom or sequence file");
  check->add_option("--p", check_args.p, "Exponent (default: the file's p, else 1)");
  check->add_option("--tol", check_args.tol, "Relative moment tolerance");
  check->add_option("--out", check_args.out, "Report JSON (default stdout)");

  ProbeArgs probe_args;
  auto* probe = app.add_subcommand("probe", "Run a probe suite");
  probe->add_option("--suite", probe_args.suite, "kernel, atom-pointwise, atom-uniform, main, lp-lq, majorization, all");
  probe->add_option("--out-dir", probe_args.out_dir, "Directory for <suite>.json and <suite>.csv");
  probe->add_option("--json", probe_args.json, "JSON report path (single suite)");
  probe->add_option("--csv", probe_args.csv, "CSV table path (single suite)");
  probe->add_option("--seed", probe_args.seed, "Base seed");
  probe->add_option("--trials", probe_args.trials, "Trials per scale");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "dhl: " << e.what() << "\n";
    return 2;
  }

  try {
    ConfigFile cfg;
    cfg.load(config_path);
    cfg.fill(&app, "--threads", "threads", threads);
    if (threads > 0) set_max_threads(threads);

    const auto require = [](const std::string& v, const char* flag) {
      if (v.empty()) throw UsageError(std::string(flag) + " is required");
    };

    if (*riesz || *maximal) {
      auto* sub = *riesz ? riesz : maximal;
      auto& a = *riesz ? riesz_args : max_args;
      cfg.fill(sub, "--in", "in", a.in);
      cfg.fill(sub, "--alpha", "alpha", a.alpha);
      cfg.fill(sub, "--out-box", "out_box", a.out_box);
      cfg.fill(sub, "--out", "out", a.out);
      require(a.in, "--in");
      const auto b = read_seq_file(a.in);
      const Box box = parse_out_box(a.out_box, b);
      LatticeSeq result;
      if (*riesz) {
        cfg.fill(sub, "--method", "method", a.method);
        if (a.method != "fft" && a.method != "direct") throw UsageError("--method must be fft or direct");
        result = riesz_apply(b, a.alpha, box, a.method == "fft" ? RieszMethod::fft : RieszMethod::direct);
      } else {
        result = frac_maximal(b, a.alpha, box);
      }
      emit(a.out, seq_to_json_text(result) + "\n");
      return 0;
    }

    if (*hardy) {
      auto& a = hardy_args;
      cfg.fill(hardy, "--in", "in", a.in);
      cfg.fill(hardy, "--p", "p", a.p);
      cfg.fill(hardy, "--potential", "potential", a.potential);
      cfg.fill(hardy, "--dilation", "dilation", a.dilation);
      cfg.fill(hardy, "--growth", "growth", a.growth);
      cfg.fill(hardy, "--t-cap", "t_cap", a.t_cap);
      cfg.fill(hardy, "--no-tail", "no_tail", a.no_tail);
      cfg.fill(hardy, "--out", "out", a.out);
      require(a.in, "--in");
      const auto b = read_seq_file(a.in);
      HardyConfig hc;
      hc.dilation = a.dilation;
      hc.grid.growth = a.growth;
      hc.grid.t_cap = a.t_cap;
      hc.compute_tail = !a.no_tail;
      const BumpProfile profile(b.dim());
      const auto e = a.potential ? potential_hardy_norm(b, *a.potential, a.p, profile, hc)
                                 : hardy_norm(b, a.p, profile, hc);
      emit(a.out, dump_json17(to_json(e)) + "\n");
      return 0;
    }

    if (*gen) {
      auto& a = gen_args;
      cfg.fill(gen, "--n", "n", a.n);
      cfg.fill(gen, "--center", "center", a.center);
      cfg.fill(gen, "--radius", "radius", a.radius);
      cfg.fill(gen, "--p", "p", a.p);
      cfg.fill(gen, "--seed", "seed", a.seed);
      cfg.fill(gen, "--out", "out", a.out);
      if (gen->count("--seed") == 0) {
        if (const auto s = env_seed()) a.seed = *s;
      }
      if (a.center.empty()) a.center.assign(static_cast<std::size_t>(std::max(a.n, 1)), 0);
      if (static_cast<int>(a.center.size()) != a.n) throw UsageError("--center must have n entries");
      const auto atom = atom_generate(DiscreteCube(a.center, a.radius), a.p, a.seed);
      emit(a.out, dump_json17(atom_to_json(atom)) + "\n");
      return 0;
    }

    if (*check) {
      auto& a = check_args;
      cfg.fill(check, "--in", "in", a.in);
      cfg.fill(check, "--p", "p", a.p);
      cfg.fill(check, "--tol", "tol", a.tol);
      cfg.fill(check, "--out", "out", a.out);
      require(a.in, "--in");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text_file(a.in));
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(a.in + ": " + e.what());
      }
      auto atom = atom_from_json(j, a.p.value_or(1.0));
      if (a.p) atom.p = *a.p;
      if (!(a.tol >= 0.0)) throw UsageError("--tol must be nonnegative");
      const auto r = atom_validate(atom.seq, atom.cube, atom.p, a.tol);
      nlohmann::ordered_json out;
      out["accepted"] = r.accepted();
      out["p"] = atom.p;
      out["moment_order"] = r.moment_order;
      out["support_ok"] = r.support_ok;
      out["bound_ok"] = r.bound_ok;
      out["moments_ok"] = r.moments_ok;
      out["bound_ratio"] = r.bound_ratio;
      out["worst_moment"] = r.worst_moment;
      emit(a.out, dump_json17(out) + "\n");
      return r.accepted() ? 0 : 1;
    }

    if (*probe) {
      auto& a = probe_args;
      cfg.fill(probe, "--suite", "suite", a.suite);
      cfg.fill(probe, "--out-dir", "out_dir", a.out_dir);
      if (a.suite.empty()) throw UsageError("--suite is required");
      return run_probes(a, cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "dhl: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
