// Command-line front end over the C API.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "airysim/airysim.h"

#ifndef AIRYSIM_BUILD_ID
#define AIRYSIM_BUILD_ID "unknown"
#endif

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCheckFailed = 4;
constexpr std::size_t kChunks = 64;

struct CliFailure {
  int code;
  std::string message;
};

void check(airy_status st, const std::string& op) {
  if (st == AIRY_OK) return;
  const std::string msg = op + ": " + airy_last_error();
  if (st == AIRY_ERR_NUMERIC || st == AIRY_ERR_INTERNAL) throw CliFailure{kExitNumeric, msg};
  throw CliFailure{kExitUsage, msg};
}

// ---- test functions given as text: exp:RATE, const:C, indicator:LO:HI ----

struct FunctionSpec {
  std::string kind;
  double a = 0.0, b = 0.0;
};

double eval_spec(double x, void* user) {
  const auto* f = static_cast<const FunctionSpec*>(user);
  if (f->kind == "exp") return std::exp(-f->a * x);
  if (f->kind == "const") return f->a;
  return (x >= f->a && x < f->b) ? 1.0 : 0.0;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::unique_ptr<FunctionSpec> parse_function(const std::string& text, const std::string& key) {
  const auto parts = split(text, ':');
  auto f = std::make_unique<FunctionSpec>();
  try {
    if (parts.size() == 2 && (parts[0] == "exp" || parts[0] == "const")) {
      f->kind = parts[0];
      f->a = std::stod(parts[1]);
      if (f->kind == "exp" && f->a < 0) throw std::invalid_argument("rate");
      return f;
    }
    if (parts.size() == 3 && parts[0] == "indicator") {
      f->kind = parts[0];
      f->a = std::stod(parts[1]);
      f->b = std::stod(parts[2]);
      if (!(f->a < f->b)) throw std::invalid_argument("interval");
      return f;
    }
  } catch (const std::exception&) {
  }
  throw CliFailure{kExitUsage, "invalid value for --" + key + ": " + text +
                                   " (expected exp:RATE, const:C or indicator:LO:HI)"};
}

airy_test_function as_c(FunctionSpec* f) {
  const double c1 = f->kind == "const" ? std::fabs(f->a) : 1.0;
  return airy_test_function{&eval_spec, f, c1, 0.0, 0.5};
}

// ---- output ----

struct Output {
  std::string path;
  std::string format = "jsonl";
  std::vector<json> records;

  void write_jsonl(std::ostream& os) const {
    for (const auto& r : records) os << r.dump() << '\n';
  }

  static std::string cell(const json& v) {
    if (v.is_null()) return "";
    if (!v.is_string()) return v.dump();
    const std::string t = v.get<std::string>();
    if (t.find_first_of(",\"\n") == std::string::npos) return t;
    std::string q = "\"";
    for (char c : t) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }

  void write_csv(std::ostream& os) const {
    if (records.empty()) return;
    // Columns are the union of record keys in order of first appearance.
    std::vector<std::string> cols;
    for (const auto& r : records) {
      const json flat = r.flatten();
      for (auto it = flat.begin(); it != flat.end(); ++it)
        if (std::find(cols.begin(), cols.end(), it.key()) == cols.end()) cols.push_back(it.key());
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
      std::string name = cols[i].substr(1);
      for (char& c : name)
        if (c == '/') c = '.';
      os << (i ? "," : "") << name;
    }
    os << '\n';
    for (const auto& r : records) {
      const json flat = r.flatten();
      for (std::size_t i = 0; i < cols.size(); ++i) {
        os << (i ? "," : "");
        if (flat.contains(cols[i])) os << cell(flat[cols[i]]);
      }
      os << '\n';
    }
  }

  void flush() const {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!path.empty() && path != "-") {
      file.open(path);
      if (!file) throw CliFailure{kExitUsage, "cannot open output file " + path};
      os = &file;
    }
    if (format == "csv")
      write_csv(*os);
    else
      write_jsonl(*os);
  }
};

json estimate_json(const airy_estimate& e) {
  return json{{"mean", e.mean}, {"stderr", e.std_error}, {"n", e.n}};
}

json provenance(std::uint64_t seed, std::uint64_t stream) {
  return json{{"build", AIRYSIM_BUILD_ID},
              {"seed", seed},
              {"chunk_plan", json{{"n_chunks", kChunks}, {"base_stream", stream}}}};
}

// ---- key=value configuration ----

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CliFailure{kExitUsage, "cannot open config file " + path};
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CliFailure{kExitUsage, path + ":" + std::to_string(lineno) + ": expected key=value"};
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

// Config entries become `--key value` arguments unless the key was given
// on the command line, so flags always win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config_path.empty()) return args;
  for (const auto& [key, value] : read_config(config_path)) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
    if (!given) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

// ---- shared parameter blocks ----

std::map<std::string, std::string>& default_formats() {
  static std::map<std::string, std::string> m;
  return m;
}

struct Common {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  unsigned workers = 1;
  std::string out;
  std::string format;
  bool timing = false;
};

void add_common(CLI::App* sub, Common& c, bool needs_seed, const std::string& default_format) {
  auto* seed = sub->add_option("--seed", c.seed, "master seed (no entropy default)");
  if (needs_seed) seed->required();
  sub->add_option("--stream", c.stream, "base stream id")->capture_default_str();
  sub->add_option("--workers", c.workers, "worker threads (results do not depend on it)")->check(CLI::Range(1u, 1024u));
  sub->add_option("--out", c.out, "output file (default stdout)");
  sub->add_option("--format", c.format, "csv or jsonl (default " + default_format + ")")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  default_formats()[sub->get_name()] = default_format;
  sub->add_flag("--timing", c.timing, "report wall time on stderr");
}

struct FkBlock {
  airy_fk_params p{};
  std::string mode = "annealed";
};

void add_fk(CLI::App* sub, FkBlock& b) {
  airy_fk_params_default(&b.p);
  sub->add_option("--beta", b.p.beta)->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--w", b.p.w)->capture_default_str();
  sub->add_option("--T", b.p.T)->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--steps", b.p.n_steps, "time steps per path")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--delta-a", b.p.delta_a, "level bin width (<= 0: sqrt(T / steps))")->capture_default_str();
  sub->add_option("--paths", b.p.n_paths)->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--mode", b.mode)->check(CLI::IsMember({"annealed", "quenched"}))->capture_default_str();
}

json fk_params_json(const airy_fk_params& p, const std::string& mode) {
  return json{{"beta", p.beta}, {"w", p.w}, {"T", p.T}, {"mode", mode}, {"n_paths", p.n_paths}};
}

json fk_grid_json(const airy_fk_params& p) {
  const double da = p.delta_a > 0 ? p.delta_a : std::sqrt(p.T / static_cast<double>(p.n_steps));
  return json{{"n_steps", p.n_steps}, {"delta_a", da}};
}

airy_model_form parse_form(const std::string& s) {
  if (s == "de") return AIRY_FORM_DUMITRIU_EDELMAN;
  if (s == "spiked") return AIRY_FORM_SPIKED_H;
  return AIRY_FORM_MODIFIED_M;
}

struct NoiseHandle {
  airy_noise* h = nullptr;
  ~NoiseHandle() { airy_noise_free(h); }
};

struct MatrixHandle {
  airy_matrix* h = nullptr;
  ~MatrixHandle() { airy_matrix_free(h); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiked beta-ensemble edge and stochastic Airy semigroup simulator"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  app.add_option("--config", "key=value file; command-line flags take precedence");

  Output output;
  Common common;
  std::string op;
  int exit_code = 0;

  // build-matrix
  auto* build = app.add_subcommand("build-matrix", "sample a tridiagonal model and write its bands");
  double bm_beta = 2, bm_w = 0;
  std::int64_t bm_N = 100;
  std::string bm_form = "modified";
  build->add_option("--beta", bm_beta)->check(CLI::PositiveNumber)->capture_default_str();
  build->add_option("--w", bm_w)->capture_default_str();
  build->add_option("--N", bm_N)->check(CLI::PositiveNumber)->capture_default_str();
  build->add_option("--form", bm_form)->check(CLI::IsMember({"de", "spiked", "modified"}))->capture_default_str();
  add_common(build, common, true, "csv");

  // bilinear
  auto* bil = app.add_subcommand("bilinear", "mean of (pi_N f)^T (M/2 sqrt N)^k (pi_N g) over matrix seeds");
  std::string bil_f = "exp:1", bil_g = "exp:1";
  double bil_beta = 2, bil_w = 0, bil_T = 1;
  std::int64_t bil_N = 1000;
  std::uint64_t bil_seeds = 200;
  bil->add_option("--f", bil_f)->capture_default_str();
  bil->add_option("--g", bil_g)->capture_default_str();
  bil->add_option("--beta", bil_beta)->check(CLI::PositiveNumber)->capture_default_str();
  bil->add_option("--w", bil_w)->capture_default_str();
  bil->add_option("--T", bil_T)->check(CLI::NonNegativeNumber)->capture_default_str();
  bil->add_option("--N", bil_N)->check(CLI::PositiveNumber)->capture_default_str();
  bil->add_option("--seeds", bil_seeds, "number of matrices")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(bil, common, true, "jsonl");

  // edge-spectrum
  auto* edge = app.add_subcommand("edge-spectrum", "top eigenvalues and edge fluctuations");
  double es_beta = 2, es_w = 0;
  std::int64_t es_N = 1000;
  std::string es_form = "spiked";
  std::size_t es_q = 3;
  std::uint64_t es_samples = 1;
  edge->add_option("--beta", es_beta)->check(CLI::PositiveNumber)->capture_default_str();
  edge->add_option("--w", es_w)->capture_default_str();
  edge->add_option("--N", es_N)->check(CLI::PositiveNumber)->capture_default_str();
  edge->add_option("--form", es_form)->check(CLI::IsMember({"de", "spiked", "modified"}))->capture_default_str();
  edge->add_option("--q", es_q)->check(CLI::PositiveNumber)->capture_default_str();
  edge->add_option("--samples", es_samples)->check(CLI::PositiveNumber)->capture_default_str();
  add_common(edge, common, true, "csv");

  // fk-apply
  auto* fka = app.add_subcommand("fk-apply", "Monte Carlo (U_T f)(x)");
  FkBlock fk_a;
  std::string fka_f = "exp:1";
  std::vector<double> fka_x{0.5};
  std::uint64_t fka_noise_seed = 0;
  fka->add_option("--f", fka_f)->capture_default_str();
  fka->add_option("--x", fka_x, "evaluation points")->delimiter(',')->capture_default_str();
  fka->add_option("--noise-seed", fka_noise_seed, "seed of the level noise (quenched)");
  add_fk(fka, fk_a);
  add_common(fka, common, true, "jsonl");

  // kernel
  auto* ker = app.add_subcommand("kernel", "Monte Carlo K_T(x, y)");
  FkBlock fk_k;
  double ker_x = 0.5, ker_y = 0.5;
  std::uint64_t ker_noise_seed = 0;
  ker->add_option("--x", ker_x)->check(CLI::NonNegativeNumber)->capture_default_str();
  ker->add_option("--y", ker_y)->check(CLI::NonNegativeNumber)->capture_default_str();
  ker->add_option("--noise-seed", ker_noise_seed);
  add_fk(ker, fk_k);
  add_common(ker, common, true, "jsonl");

  // kernel00
  auto* k00 = app.add_subcommand("kernel00", "E[K_T(0,0)] by reflected-bridge Monte Carlo");
  FkBlock fk_0;
  add_fk(k00, fk_0);
  add_common(k00, common, true, "jsonl");

  // trace
  auto* tr = app.add_subcommand("trace", "int_0^x_max E[K_T(x,x)] dx");
  FkBlock fk_t;
  double tr_xmax = 0;
  std::size_t tr_nx = 32;
  tr->add_option("--x-max", tr_xmax, "upper limit (default 8 sqrt T)");
  tr->add_option("--nx", tr_nx)->check(CLI::PositiveNumber)->capture_default_str();
  add_fk(tr, fk_t);
  add_common(tr, common, true, "jsonl");

  // semigroup-check
  auto* sg = app.add_subcommand("semigroup-check", "Chapman-Kolmogorov residual for one noise realization");
  FkBlock fk_s;
  double sg_x = 0.5, sg_y = 0.5, sg_T1 = 0.5, sg_T2 = 0.5;
  std::uint64_t sg_noise_seed = 0;
  sg->add_option("--x", sg_x)->check(CLI::NonNegativeNumber)->capture_default_str();
  sg->add_option("--y", sg_y)->check(CLI::NonNegativeNumber)->capture_default_str();
  sg->add_option("--T1", sg_T1)->check(CLI::PositiveNumber)->capture_default_str();
  sg->add_option("--T2", sg_T2)->check(CLI::PositiveNumber)->capture_default_str();
  sg->add_option("--noise-seed", sg_noise_seed)->required();
  add_fk(sg, fk_s);
  add_common(sg, common, true, "jsonl");

  // validate-skorokhod
  auto* vs = app.add_subcommand("validate-skorokhod", "exhaustive check of the discrete Skorokhod bijection");
  std::size_t vs_k = 12;
  std::vector<std::int64_t> vs_starts{0};
  std::string vs_path;
  vs->add_option("--k", vs_k)->check(CLI::Range(0, 24))->capture_default_str();
  vs->add_option("--start", vs_starts, "start values")->delimiter(',')->capture_default_str();
  vs->add_option("--path", vs_path, "also map one path given as start;s1,...,sk");
  add_common(vs, common, false, "jsonl");

  // validate-thm18
  auto* vt = app.add_subcommand("validate-thm18", "conditional Gaussian law given the local time at zero");
  std::string vt_route = "bessel";
  std::vector<double> vt_alpha{1, 2, 4};
  std::uint64_t vt_samples = 100000;
  std::size_t vt_steps = 2048;
  double vt_half = 0.1, vt_da = 0, vt_sigma = 3;
  vt->add_option("--route", vt_route)->check(CLI::IsMember({"bessel", "sde", "path"}))->capture_default_str();
  vt->add_option("--alpha", vt_alpha)->delimiter(',')->capture_default_str();
  vt->add_option("--samples", vt_samples, "samples (Bessel) or paths (path route)")->capture_default_str();
  vt->add_option("--steps", vt_steps)->capture_default_str();
  vt->add_option("--half-width", vt_half)->capture_default_str();
  vt->add_option("--delta-a", vt_da, "path-route bin width (<= 0: sqrt(1/steps))")->capture_default_str();
  vt->add_option("--sigma", vt_sigma, "pass band in standard errors")->capture_default_str();
  add_common(vt, common, true, "jsonl");

  // validate-weak-convergence
  auto* vw = app.add_subcommand("validate-weak-convergence", "KS checks of the lazy-walk invariance principle");
  std::size_t vw_k = 10000, vw_cont = 1024;
  std::uint64_t vw_samples = 100000;
  vw->add_option("--k", vw_k, "walk steps (N^{2/3})")->capture_default_str();
  vw->add_option("--samples", vw_samples)->capture_default_str();
  vw->add_option("--continuum-steps", vw_cont)->capture_default_str();
  add_common(vw, common, true, "jsonl");

  // moments-a
  auto* ma = app.add_subcommand("moments-a", "moments of A: closed form against the printed table");
  ma->alias("moments-table");
  int ma_max = 14;
  std::uint64_t ma_draws = 0;
  ma->add_option("--max-n", ma_max)->check(CLI::Range(1, 14))->capture_default_str();
  ma->add_option("--draws", ma_draws, "also sample the mixture law (needs --seed)");
  add_common(ma, common, false, "csv");

  // noise-path
  auto* np = app.add_subcommand("noise-path", "partial-sum noise path of a ModifiedM build");
  double np_beta = 2, np_w = 0, np_xmax = 4;
  std::int64_t np_N = 1000;
  np->add_option("--beta", np_beta)->check(CLI::PositiveNumber)->capture_default_str();
  np->add_option("--w", np_w)->capture_default_str();
  np->add_option("--N", np_N)->check(CLI::PositiveNumber)->capture_default_str();
  np->add_option("--x-max", np_xmax)->check(CLI::PositiveNumber)->capture_default_str();
  add_common(np, common, true, "csv");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  }

  const auto t0 = std::chrono::steady_clock::now();
  CLI::App* chosen = app.get_subcommands().front();
  op = chosen->get_name();
  output.path = common.out;
  if (common.format.empty()) common.format = default_formats()[op];
  output.format = common.format;

  try {
    if (chosen == build) {
      MatrixHandle m;
      check(airy_matrix_build(bm_beta, bm_w, bm_N, parse_form(bm_form), common.seed, common.stream, &m.h), op);
      if (common.format == "csv") {
        if (common.out.empty() || common.out == "-") {
          const std::string tmp = "/dev/stdout";
          check(airy_matrix_write_csv(m.h, tmp.c_str()), op);
        } else {
          check(airy_matrix_write_csv(m.h, common.out.c_str()), op);
        }
        output.path = "";
        output.records.clear();
        output.format = "none";
      } else {
        std::size_t n = 0;
        check(airy_matrix_dim(m.h, &n), op);
        std::vector<double> d(n), e(n ? n - 1 : 0);
        check(airy_matrix_diag(m.h, d.data(), d.size()), op);
        check(airy_matrix_offdiag(m.h, e.data(), e.size()), op);
        output.records.push_back(json{{"op", op},
                                      {"params", {{"beta", bm_beta}, {"w", bm_w}, {"N", bm_N}, {"form", bm_form}}},
                                      {"diag", d},
                                      {"offdiag", e},
                                      {"seed", common.seed},
                                      {"provenance", provenance(common.seed, common.stream)}});
      }
    } else if (chosen == bil) {
      auto f = parse_function(bil_f, "f");
      auto g = parse_function(bil_g, "g");
      json rec{{"op", op},
               {"params", {{"f", bil_f}, {"g", bil_g}, {"beta", bil_beta}, {"w", bil_w}, {"T", bil_T}, {"N", bil_N}}}};
      std::int64_t k = 0;
      check(airy_lattice_steps(bil_T, bil_N, &k), op);
      if (bil_seeds == 1) {
        double v = 0;
        check(airy_bilinear_form(as_c(f.get()), as_c(g.get()), bil_beta, bil_w, bil_N, bil_T, common.seed,
                                 common.stream, &v),
              op);
        rec.update(json{{"mean", v}, {"stderr", 0.0}, {"n", 1}});
      } else {
        airy_estimate e{};
        check(airy_bilinear_mean(as_c(f.get()), as_c(g.get()), bil_beta, bil_w, bil_N, bil_T, common.seed,
                                 common.stream, bil_seeds, common.workers, &e),
              op);
        rec.update(estimate_json(e));
      }
      rec["seed"] = common.seed;
      rec["grid"] = json{{"k", k}, {"scale", 2.0 * std::sqrt(static_cast<double>(bil_N))}};
      rec["provenance"] = provenance(common.seed, common.stream);
      output.records.push_back(rec);
    } else if (chosen == edge) {
      for (std::uint64_t i = 0; i < es_samples; ++i) {
        MatrixHandle m;
        check(airy_matrix_build(es_beta, es_w, es_N, parse_form(es_form), common.seed, common.stream + i, &m.h), op);
        std::vector<double> lam(es_q), Lam(es_q);
        check(airy_matrix_top_eigenvalues(m.h, es_q, lam.data()), op);
        check(airy_matrix_edge_fluctuations(m.h, es_q, es_N, Lam.data()), op);
        for (std::size_t q = 0; q < es_q; ++q)
          output.records.push_back(json{{"op", op},
                                        {"sample", i},
                                        {"q", q + 1},
                                        {"lambda", lam[q]},
                                        {"Lambda", Lam[q]},
                                        {"params", {{"beta", es_beta}, {"w", es_w}, {"N", es_N}, {"form", es_form}}},
                                        {"seed", common.seed},
                                        {"stream", common.stream + i}});
      }
    } else if (chosen == fka) {
      auto f = parse_function(fka_f, "f");
      fk_a.p.quenched = fk_a.mode == "quenched";
      fk_a.p.workers = common.workers;
      NoiseHandle noise;
      if (fk_a.p.quenched) {
        const double da = fk_a.p.delta_a > 0 ? fk_a.p.delta_a : std::sqrt(fk_a.p.T / static_cast<double>(fk_a.p.n_steps));
        check(airy_noise_generate(da, fka_noise_seed, 0, &noise.h), op);
      }
      for (std::size_t i = 0; i < fka_x.size(); ++i) {
        airy_estimate e{};
        check(airy_fk_apply(as_c(f.get()), fka_x[i], &fk_a.p, noise.h, common.seed, common.stream + i, &e), op);
        json params = fk_params_json(fk_a.p, fk_a.mode);
        params["f"] = fka_f;
        params["x"] = fka_x[i];
        if (fk_a.p.quenched) params["noise_seed"] = fka_noise_seed;
        json rec{{"op", op}, {"params", params}};
        rec.update(estimate_json(e));
        rec["seed"] = common.seed;
        rec["grid"] = fk_grid_json(fk_a.p);
        rec["provenance"] = provenance(common.seed, common.stream + i);
        output.records.push_back(rec);
      }
    } else if (chosen == ker) {
      fk_k.p.quenched = fk_k.mode == "quenched";
      fk_k.p.workers = common.workers;
      NoiseHandle noise;
      if (fk_k.p.quenched) {
        const double da = fk_k.p.delta_a > 0 ? fk_k.p.delta_a : std::sqrt(fk_k.p.T / static_cast<double>(fk_k.p.n_steps));
        check(airy_noise_generate(da, ker_noise_seed, 0, &noise.h), op);
      }
      airy_estimate e{}, c{};
      double expected = 0;
      check(airy_kernel_estimate(ker_x, ker_y, &fk_k.p, noise.h, common.seed, common.stream, &e, &c, &expected), op);
      json params = fk_params_json(fk_k.p, fk_k.mode);
      params["x"] = ker_x;
      params["y"] = ker_y;
      if (fk_k.p.quenched) params["noise_seed"] = ker_noise_seed;
      json rec{{"op", op}, {"params", params}};
      rec.update(estimate_json(e));
      rec["crossing"] = json{{"frequency", c.mean}, {"stderr", c.std_error}, {"expected", expected}};
      rec["seed"] = common.seed;
      rec["grid"] = fk_grid_json(fk_k.p);
      rec["provenance"] = provenance(common.seed, common.stream);
      output.records.push_back(rec);
    } else if (chosen == k00) {
      fk_0.p.workers = common.workers;
      airy_estimate e{};
      check(airy_expected_kernel_00(&fk_0.p, common.seed, common.stream, &e), op);
      json params = fk_params_json(fk_0.p, "annealed");
      json rec{{"op", op}, {"params", params}};
      rec.update(estimate_json(e));
      if (fk_0.p.beta == 2.0) {
        double exact = 0;
        check(airy_expected_kernel_00_beta2(fk_0.p.w, fk_0.p.T, &exact), op);
        rec["closed_form"] = exact;
        rec["z"] = e.std_error > 0 ? (e.mean - exact) / e.std_error : 0.0;
      }
      rec["seed"] = common.seed;
      rec["grid"] = fk_grid_json(fk_0.p);
      rec["provenance"] = provenance(common.seed, common.stream);
      output.records.push_back(rec);
    } else if (chosen == tr) {
      fk_t.p.workers = common.workers;
      const double xmax = tr_xmax > 0 ? tr_xmax : 8.0 * std::sqrt(fk_t.p.T);
      airy_estimate e{};
      double tail = 0;
      check(airy_trace_estimate(&fk_t.p, xmax, tr_nx, common.seed, common.stream, &e, &tail), op);
      json params = fk_params_json(fk_t.p, "annealed");
      params["x_max"] = xmax;
      params["nx"] = tr_nx;
      json rec{{"op", op}, {"params", params}};
      rec.update(estimate_json(e));
      rec["tail"] = tail;
      rec["seed"] = common.seed;
      rec["grid"] = fk_grid_json(fk_t.p);
      rec["provenance"] = provenance(common.seed, common.stream);
      output.records.push_back(rec);
    } else if (chosen == sg) {
      fk_s.p.workers = common.workers;
      fk_s.p.quenched = 1;
      fk_s.p.T = sg_T1 + sg_T2;
      NoiseHandle noise;
      const double da = fk_s.p.delta_a > 0 ? fk_s.p.delta_a : std::sqrt(fk_s.p.T / static_cast<double>(fk_s.p.n_steps));
      fk_s.p.delta_a = da;
      check(airy_noise_generate(da, sg_noise_seed, 0, &noise.h), op);
      airy_estimate r{}, c{}, d{};
      check(airy_semigroup_residual(sg_x, sg_y, sg_T1, sg_T2, &fk_s.p, noise.h, common.seed, common.stream, &r, &c, &d),
            op);
      json params = fk_params_json(fk_s.p, "quenched");
      params.erase("T");
      params.update(json{{"x", sg_x}, {"y", sg_y}, {"T1", sg_T1}, {"T2", sg_T2}, {"noise_seed", sg_noise_seed}});
      json rec{{"op", op}, {"params", params}};
      rec.update(estimate_json(r));
      rec["composed"] = estimate_json(c);
      rec["direct"] = estimate_json(d);
      rec["seed"] = common.seed;
      rec["grid"] = fk_grid_json(fk_s.p);
      rec["provenance"] = provenance(common.seed, common.stream);
      output.records.push_back(rec);
    } else if (chosen == vs) {
      bool all_ok = true;
      for (auto start : vs_starts) {
        airy_skorokhod_report rep{};
        check(airy_validate_skorokhod(vs_k, start, &rep), op);
        all_ok = all_ok && rep.ok;
        output.records.push_back(json{{"op", op},
                                      {"params", {{"k", vs_k}, {"start", start}}},
                                      {"paths", rep.paths},
                                      {"round_trips", rep.round_trips},
                                      {"lazy_outputs", rep.lazy_outputs},
                                      {"distinct_images", rep.distinct_images},
                                      {"horizontal_ok", rep.horizontal_ok},
                                      {"passed", rep.ok == 1}});
      }
      if (!vs_path.empty()) {
        std::vector<char> buf(vs_path.size() + 64);
        std::vector<char> back(vs_path.size() + 64);
        // A flat step marks a lazy-walk path: run the inverse first.
        const auto semi = vs_path.find(';');
        const std::string steps = "," + (semi == std::string::npos ? vs_path : vs_path.substr(semi + 1)) + ",";
        const bool lazy = steps.find(",0,") != std::string::npos;
        if (lazy) {
          check(airy_skorokhod_inverse_text(vs_path.c_str(), buf.data(), buf.size()), op);
          check(airy_skorokhod_map_text(buf.data(), back.data(), back.size()), op);
        } else {
          check(airy_skorokhod_map_text(vs_path.c_str(), buf.data(), buf.size()), op);
          check(airy_skorokhod_inverse_text(buf.data(), back.data(), back.size()), op);
        }
        std::int64_t h = 0;
        check(airy_horizontal_count_text(lazy ? vs_path.c_str() : buf.data(), &h), op);
        const bool rt = vs_path == std::string(back.data());
        all_ok = all_ok && rt;
        output.records.push_back(json{{"op", op},
                                      {"input", vs_path},
                                      {"direction", lazy ? "inverse" : "map"},
                                      {"mapped", std::string(buf.data())},
                                      {"round_trip", std::string(back.data())},
                                      {"horizontal_count", h},
                                      {"round_trip_exact", rt}});
      }
      if (!all_ok) exit_code = kExitCheckFailed;
    } else if (chosen == vt) {
      bool all_ok = true;
      const airy_law_route route = vt_route == "bessel" ? AIRY_ROUTE_BESSEL_MODULUS
                                   : vt_route == "sde"  ? AIRY_ROUTE_BESSEL_SDE
                                                        : AIRY_ROUTE_PATH_BINNING;
      const double da = vt_da > 0 ? vt_da : std::sqrt(1.0 / static_cast<double>(vt_steps));
      for (std::size_t i = 0; i < vt_alpha.size(); ++i) {
        airy_moment_check c{};
        check(airy_conditional_law_check(route, vt_alpha[i], vt_half, vt_samples, vt_steps, da,
                                         common.seed + i, common.workers, &c),
              op);
        const bool ok = std::fabs(c.mean_z) <= vt_sigma && std::fabs(c.variance_z) <= vt_sigma &&
                        std::fabs(c.skewness_z) <= vt_sigma;
        all_ok = all_ok && ok;
        json params{{"route", vt_route}, {"alpha", vt_alpha[i]}, {"samples", vt_samples}, {"steps", vt_steps}};
        if (route == AIRY_ROUTE_PATH_BINNING) params.update(json{{"half_width", vt_half}, {"delta_a", da}});
        output.records.push_back(json{
            {"op", op},
            {"params", params},
            {"n", c.n},
            {"mean", c.mean},
            {"mean_stderr", c.mean_se},
            {"target_mean", c.target_mean},
            {"variance", c.variance},
            {"variance_stderr", c.variance_se},
            {"target_variance", c.target_variance},
            {"skewness", c.skewness},
            {"skewness_stderr", c.skewness_se},
            {"z", {{"mean", c.mean_z}, {"variance", c.variance_z}, {"skewness", c.skewness_z}}},
            {"passed", ok},
            {"seed", common.seed + i},
            {"provenance", provenance(common.seed + i, static_cast<std::uint64_t>(route))}});
      }
      if (!all_ok) exit_code = kExitCheckFailed;
    } else if (chosen == vw) {
      airy_ks_check a{}, b{};
      check(airy_ks_lazy_endpoint(vw_k, vw_samples, common.seed, common.workers, 0.01, &a), op);
      check(airy_ks_horizontal_local_time(vw_k, vw_samples, vw_cont, common.seed, common.workers, 0.015, &b), op);
      output.records.push_back(json{{"op", op},
                                    {"check", "lazy_endpoint_vs_half_normal"},
                                    {"params", {{"k", vw_k}, {"samples", vw_samples}}},
                                    {"ks", a.statistic},
                                    {"threshold", a.threshold},
                                    {"passed", a.passed == 1},
                                    {"seed", common.seed}});
      output.records.push_back(json{{"op", op},
                                    {"check", "horizontal_count_vs_half_local_time"},
                                    {"params", {{"k", vw_k}, {"samples", vw_samples}, {"continuum_steps", vw_cont}}},
                                    {"ks", b.statistic},
                                    {"threshold", b.threshold},
                                    {"passed", b.passed == 1},
                                    {"seed", common.seed}});
      if (!(a.passed && b.passed)) exit_code = kExitCheckFailed;
    } else if (chosen == ma) {
      std::vector<double> means(static_cast<std::size_t>(ma_max)), ses(static_cast<std::size_t>(ma_max));
      if (ma_draws > 0) {
        if (ma->count("--seed") == 0) throw CliFailure{kExitUsage, "--draws needs --seed"};
        check(airy_mixture_moments(ma_draws, ma_max, common.seed, common.workers, means.data(), ses.data()), op);
      }
      for (int n = 1; n <= ma_max; ++n) {
        double cf = 0;
        airy_table_entry t{};
        check(airy_moment_A(n, &cf), op);
        check(airy_moment_table_entry(n, &t), op);
        json rec{{"n", n}, {"closed_form", cf}, {"table1_value", t.value}, {"abs_diff", std::fabs(cf - t.value)}};
        if (ma_draws > 0) {
          rec["sample_mean"] = means[static_cast<std::size_t>(n - 1)];
          rec["sample_stderr"] = ses[static_cast<std::size_t>(n - 1)];
        }
        output.records.push_back(rec);
      }
    } else if (chosen == np) {
      MatrixHandle m;
      check(airy_matrix_build(np_beta, np_w, np_N, AIRY_FORM_MODIFIED_M, common.seed, common.stream, &m.h), op);
      std::size_t len = 0;
      double dt = 0;
      check(airy_matrix_noise_path(m.h, np_xmax, &dt, nullptr, 0, &len), op);
      std::vector<double> vals(len);
      check(airy_matrix_noise_path(m.h, np_xmax, &dt, vals.data(), vals.size(), &len), op);
      for (std::size_t i = 0; i < len; ++i)
        output.records.push_back(json{{"t", dt * static_cast<double>(i)}, {"value", vals[i]}});
    }
    if (output.format != "none") output.flush();
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << '\n';
    if (f.code == kExitNumeric) {
      output.records = {json{{"op", op}, {"status", "numeric_failure"}, {"error", f.message}, {"seed", common.seed}}};
      output.format = "jsonl";
      try {
        output.flush();
      } catch (const CliFailure&) {
      }
    }
    return f.code;
  }
  if (common.timing) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "%s: %.3f s\n", op.c_str(), secs);
  }
  return exit_code;
}
