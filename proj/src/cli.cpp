#include "stepbayes/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "stepbayes/asymptotics.hpp"
#include "stepbayes/entropy.hpp"
#include "stepbayes/errors.hpp"
#include "stepbayes/io.hpp"
#include "stepbayes/kernel.hpp"
#include "stepbayes/predictive.hpp"
#include "stepbayes/sampler.hpp"
#include "stepbayes/urn.hpp"

#ifndef STEPBAYES_VERSION
#define STEPBAYES_VERSION "0.0.0"
#endif

namespace stepbayes::cli {

namespace {

struct Key {
  const char* name;
  const char* fallback;
  const char* help;
};

struct Command {
  const char* name;
  const char* help;
  std::vector<Key> keys;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> table = {
      {"simulate", "draw a dataset from a regression function",
       {{"truth", "const:0.5", "const:P, step:u..;w.., or a function JSON file"},
        {"n", "1000", "sample size"}}},
      {"fit", "posterior-mean estimate by reversible-jump sampling",
       {{"data", "", "dataset CSV"},
        {"prior", "geometric:0.5", "hierarchy prior over the number of splits"},
        {"iters", "200000", "chain iterations"},
        {"burn_in", "50000", "discarded iterations"},
        {"thin", "10", "keep every thin-th state"},
        {"grid", "256", "number of grid intervals K"},
        {"move_width", "0.05", "width of the split displacement proposal"},
        {"truth", "", "optional truth for error reports"}}},
      {"exact-z", "exact log predictive probabilities log Z_m",
       {{"data", "", "dataset CSV"},
        {"m_max", "4", "largest split count"},
        {"n_max", "14", "size limit of the occupancy sum"},
        {"method", "exact", "exact or series"}}},
      {"model-posterior", "posterior over the number of splits",
       {{"data", "", "dataset CSV"},
        {"prior", "geometric:0.5", "hierarchy prior"},
        {"m_max", "6", "largest split count"},
        {"source", "exact", "exact, series or mc"},
        {"samples", "100000", "Monte Carlo samples per m"}}},
      {"zone-scan", "middle-zone decay of log Z_m against -H(f)",
       {{"truth", "step:0.5;0.2,0.8", "regression function"},
        {"n", "4000", "sample size"},
        {"m_list", "0,10,40", "split counts"},
        {"samples", "20000", "Monte Carlo samples per m"},
        {"splits_per_m", "10", "random split vectors per m"},
        {"source", "mc", "mc or series"}}},
      {"beginning-zone", "largest log Z_m over m <= K against -H(f)",
       {{"truth", "const:0.5", "regression function"},
        {"n", "4000", "sample size"},
        {"K", "2", "largest split count"}}},
      {"psi", "Poissonized rate n^-1 log Z*_{alpha n} for constant truth",
       {{"p", "0.8", "success probability"},
        {"alphas", "0.5,1,2", "split intensities per data point"},
        {"n", "2000", "expected sample size"},
        {"replicates", "20", "independent datasets"},
        {"inner", "0", "0 for the exact recursion, else Monte Carlo draws"},
        {"pattern", "observed", "observed, all_ones, all_zeros, alternating, random"}}},
      {"piecewise", "two-level rate against the combination of its pieces",
       {{"pL", "0.2", "left level"},
        {"pR", "0.8", "right level"},
        {"b", "0.5", "jump location"},
        {"alpha", "1", "split intensity per data point"},
        {"n", "2000", "expected sample size"},
        {"replicates", "20", "independent datasets"},
        {"inner", "0", "0 for the exact recursion, else Monte Carlo draws"}}},
      {"end-zone", "end-zone rates against -H(f)",
       {{"truth", "const:0.8", "regression function"},
        {"alphas", "0.5,1,2", "split intensities per data point"},
        {"n", "2000", "expected sample size"},
        {"replicates", "20", "independent datasets"},
        {"inner", "0", "0 for the exact recursion, else Monte Carlo draws"}}},
      {"badset", "measure of (epsilon, kappa)-bad points",
       {{"data", "", "dataset CSV; simulated from truth when empty"},
        {"truth", "const:0.5", "regression function"},
        {"n", "500", "sample size when simulating"},
        {"epsilon", "0.3", "relative count tolerance"},
        {"kappa", "50", "minimal interval length times n"}}},
      {"urn-terms", "per-step information terms of the rechargeable urn",
       {{"p", "0.8", "Bernoulli success probability"},
        {"r", "0.5", "recharge probability"},
        {"k_list", "5,10,20", "prefix lengths"},
        {"replicates", "100000", "independent sequences"}}},
      {"urn-mixing", "total variation of future blocks given a prefix",
       {{"r", "0.5", "recharge probability"},
        {"m_list", "1,2,3,4,5,6,7,8", "block lengths"},
        {"prefix", "111", "observed prefix as 0/1 characters"}}},
      {"entropy", "entropy functional H(f)",
       {{"truth", "const:0.5", "regression function"}}},
  };
  return table;
}

const Command& find_command(const std::string& name) {
  for (const auto& c : commands())
    if (name == c.name) return c;
  throw ConfigError("unknown subcommand '" + name + "'");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + " line " + std::to_string(no) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

class Params {
 public:
  explicit Params(const RunConfig& c) : c_(c) {}

  const std::string& str(const std::string& key) const {
    const auto it = c_.params.find(key);
    if (it == c_.params.end()) throw ConfigError("missing key '" + key + "'");
    return it->second;
  }
  const std::string& required(const std::string& key) const {
    const auto& v = str(key);
    if (v.empty()) throw ConfigError("key '" + key + "' is required");
    return v;
  }
  double real(const std::string& key) const {
    const auto& v = str(key);
    double d = 0.0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc() || end != v.data() + v.size() || v.empty() || !std::isfinite(d))
      throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
    return d;
  }
  std::size_t count(const std::string& key) const {
    const auto& v = str(key);
    std::size_t n = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc() || end != v.data() + v.size() || v.empty())
      throw ConfigError("key '" + key + "' expects a count, got '" + v + "'");
    return n;
  }
  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split(str(key))) {
      double d = 0.0;
      const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), d);
      if (ec != std::errc() || end != item.data() + item.size() || item.empty())
        throw ConfigError("key '" + key + "' expects numbers, got '" + item + "'");
      out.push_back(d);
    }
    return out;
  }
  std::vector<std::size_t> counts(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : split(str(key))) {
      std::size_t n = 0;
      const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), n);
      if (ec != std::errc() || end != item.data() + item.size() || item.empty())
        throw ConfigError("key '" + key + "' expects counts, got '" + item + "'");
      out.push_back(n);
    }
    return out;
  }
  HierarchyPrior prior(const std::string& key) const { return HierarchyPrior::parse(str(key)); }
  RegressionFunction truth(const std::string& key) const {
    try {
      return parse_truth(required(key));
    } catch (const ParseError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key '" + key + "': " + e.what());
    }
  }

 private:
  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) out.push_back(trim(item));
    return out;
  }
  const RunConfig& c_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& out, const RunConfig& c) {
  out << "# stepbayes " << STEPBAYES_VERSION << '\n';
  out << "# subcommand: " << c.subcommand << '\n';
  out << "# seed: " << c.seed << '\n';
  for (const auto& [k, v] : c.params) out << "# " << k << '=' << v << '\n';
}

nlohmann::json header_json(const RunConfig& c) {
  nlohmann::json h;
  h["version"] = STEPBAYES_VERSION;
  h["subcommand"] = c.subcommand;
  h["seed"] = c.seed;
  h["config"] = c.params;
  return h;
}

ZSource parse_source(const std::string& s) {
  if (s == "exact") return ZSource::exact;
  if (s == "series") return ZSource::series;
  if (s == "mc") return ZSource::mc;
  throw ConfigError("unknown source '" + s + "'");
}

ResponsePattern parse_pattern(const std::string& s) {
  if (s == "observed") return ResponsePattern::observed;
  if (s == "all_ones") return ResponsePattern::all_ones;
  if (s == "all_zeros") return ResponsePattern::all_zeros;
  if (s == "alternating") return ResponsePattern::alternating;
  if (s == "random") return ResponsePattern::random;
  throw ConfigError("unknown response pattern '" + s + "'");
}

PsiSettings psi_settings(const Params& p) {
  PsiSettings s;
  s.replicates = p.count("replicates");
  s.inner_samples = p.count("inner");
  if (s.replicates < 2) throw ConfigError("replicates must be at least 2");
  return s;
}

void run_simulate(const RunConfig& c, const Params& p, std::ostream& out) {
  const auto f = p.truth("truth");
  const auto data = sample_dataset(f, p.count("n"), derive_seed(c.seed, "simulate"));
  write_header(out, c);
  write_dataset(out, data);
}

void run_fit(const RunConfig& c, const Params& p, std::ostream& out) {
  const auto data = load_dataset(p.required("data"));
  ChainSettings cs;
  cs.n_iters = p.count("iters");
  cs.burn_in = p.count("burn_in");
  cs.thin = p.count("thin");
  cs.tuning.move_width = p.real("move_width");
  if (cs.n_iters <= cs.burn_in) throw ConfigError("iters must exceed burn_in");
  if (cs.thin == 0) throw ConfigError("thin must be at least 1");
  const std::size_t K = p.count("grid");
  if (K < 2) throw ConfigError("grid must be at least 2");
  const auto nu = p.prior("prior");
  const auto chain = run_chain(data, nu, cs, c.seed);
  const auto mean = posterior_mean(data, chain, K);

  nlohmann::json j;
  j["header"] = header_json(c);
  j["grid"] = std::vector<double>(mean.values().begin(), mean.values().end());
  j["samples"] = chain.samples.size();
  double m_mean = 0.0;
  for (const auto& s : chain.samples) m_mean += static_cast<double>(s.m());
  j["posterior_mean_m"] = m_mean / static_cast<double>(chain.samples.size());
  const char* names[] = {"birth", "death", "move"};
  for (std::size_t k = 0; k < 3; ++k) j["acceptance"][names[k]] = chain.stats[k].rate();
  if (!p.str("truth").empty()) {
    const auto f = p.truth("truth");
    const double level = data.empty() ? 0.5 : static_cast<double>(data.total_successes()) /
                                                  static_cast<double>(data.size());
    j["ise_vs_truth"] = l2_squared_distance(mean, f);
    j["ise_constant_fit"] = l2_squared_distance(StepFunction::constant(level), f);
    j["l1_vs_truth"] = l1_distance(mean, f);
  }
  out << j.dump(1) << '\n';
}

void run_exact_z(const RunConfig& c, const Params& p, std::ostream& out) {
  const auto data = load_dataset(p.required("data"));
  const std::size_t m_max = p.count("m_max");
  const std::string method = p.str("method");
  std::vector<double> z;
  if (method == "exact") {
    const std::size_t n_max = p.count("n_max");
    for (std::size_t m = 0; m <= m_max; ++m) z.push_back(exact_log_Z_m(data, m, n_max).log());
  } else if (method == "series") {
    z = series_log_Z(data, m_max);
  } else {
    throw ConfigError("unknown method '" + method + "'");
  }
  write_header(out, c);
  out << "m,log_Z\n";
  for (std::size_t m = 0; m <= m_max; ++m) out << m << ',' << fmt(z[m]) << '\n';
}

void run_model_posterior(const RunConfig& c, const Params& p, std::ostream& out) {
  const auto data = load_dataset(p.required("data"));
  const auto nu = p.prior("prior");
  const std::size_t m_max = p.count("m_max");
  McSettings mc{p.count("samples"), derive_seed(c.seed, "model-posterior")};
  const auto post = model_posterior(data, nu, m_max, parse_source(p.str("source")), mc);
  write_header(out, c);
  out << "# prior_mass: " << fmt(post.prior_mass) << '\n';
  out << "# truncated: " << (post.truncated ? "true" : "false") << '\n';
  out << "m,prior,log_Z,std_error,posterior\n";
  for (std::size_t m = 0; m <= m_max; ++m)
    out << m << ',' << fmt(nu.mass(m)) << ',' << fmt(post.log_Z[m]) << ','
        << fmt(post.log_Z_std_error[m]) << ',' << fmt(post.probabilities[m]) << '\n';
}

void run_zone_scan(const RunConfig& c, const Params& p, std::ostream& out) {
  const auto f = p.truth("truth");
  ZoneScanSettings s;
  s.n_samples = p.count("samples");
  s.splits_per_m = p.count("splits_per_m");
  s.source = parse_source(p.str("source"));
  if (s.source == ZSource::mc && s.n_samples < 2) throw ConfigError("samples must be at least 2");
  const auto r = middle_zone_scan(f, p.count("n"), p.counts("m_list"), s, c.seed);
  write_header(out, c);
  write_csv(out, r);
}

void run_beginning_zone(const RunConfig& c, const Params& p, std::ostream& out) {
  const auto r = beginning_zone_check(p.truth("truth"), p.count("K"), p.count("n"), c.seed);
  write_header(out, c);
  write_csv(out, r);
}

void run_psi(const RunConfig& c, const Params& p, std::ostream& out) {
  const double prob = p.real("p");
  if (!(prob >= 0.0 && prob <= 1.0)) throw ConfigError("p must lie in [0,1]");
  auto s = psi_settings(p);
  s.pattern = parse_pattern(p.str("pattern"));
  const double n = p.real("n");
  std::vector<PsiEstimate> rows;
  const auto alphas = p.reals("alphas");
  for (std::size_t a = 0; a < alphas.size(); ++a)
    rows.push_back(psi_estimate(prob, alphas[a], n, s, derive_seed(c.seed, "psi", a)));
  write_header(out, c);
  write_csv(out, rows, -shannon(prob));
}

void run_piecewise(const RunConfig& c, const Params& p, std::ostream& out) {
  const auto r = psi_piecewise_check(p.real("pL"), p.real("pR"), p.real("b"), p.real("alpha"),
                                     p.real("n"), psi_settings(p), c.seed);
  write_header(out, c);
  out << "direct,direct_se,combined,combined_se,difference,difference_se,agrees\n";
  out << fmt(r.direct.estimate) << ',' << fmt(r.direct.std_error) << ',' << fmt(r.combined) << ','
      << fmt(r.combined_std_error) << ',' << fmt(r.difference()) << ','
      << fmt(r.difference_std_error()) << ',' << (r.agrees() ? "true" : "false") << '\n';
}

void run_end_zone(const RunConfig& c, const Params& p, std::ostream& out) {
  const auto r = end_zone_dominance(p.truth("truth"), p.reals("alphas"), p.real("n"),
                                    psi_settings(p), c.seed);
  write_header(out, c);
  write_csv(out, r);
}

void run_badset(const RunConfig& c, const Params& p, std::ostream& out) {
  const auto f = p.truth("truth");
  const auto data = p.str("data").empty()
                        ? sample_dataset(f, p.count("n"), derive_seed(c.seed, "badset.data"))
                        : load_dataset(p.str("data"));
  const auto r = badset_measure(data, f, p.real("epsilon"), p.real("kappa"));
  write_header(out, c);
  write_csv(out, r);
}

void run_urn_terms(const RunConfig& c, const Params& p, std::ostream& out) {
  const auto r = relative_entropy_terms(p.real("p"), p.real("r"), p.counts("k_list"),
                                        p.count("replicates"), c.seed);
  write_header(out, c);
  out << "# discrepancy_bound: " << fmt(r.discrepancy_bound) << '\n';
  write_csv(out, r);
}

void run_urn_mixing(const RunConfig& c, const Params& p, std::ostream& out) {
  std::vector<bool> prefix;
  for (char ch : p.str("prefix")) {
    if (ch != '0' && ch != '1') throw ConfigError("prefix must consist of 0 and 1");
    prefix.push_back(ch == '1');
  }
  const double r = p.real("r");
  write_header(out, c);
  out << "m,tv,no_recharge_bound\n";
  for (auto m : p.counts("m_list"))
    out << m << ',' << fmt(mixing_distance(m, r, prefix)) << ','
        << fmt(std::pow(1.0 - r, static_cast<double>(m))) << '\n';
}

void run_entropy(const RunConfig& c, const Params& p, std::ostream& out) {
  write_header(out, c);
  out << "entropy\n" << fmt(entropy_functional(p.truth("truth"))) << '\n';
}

}  // namespace

std::vector<std::string> subcommands() {
  std::vector<std::string> out;
  for (const auto& c : commands()) out.emplace_back(c.name);
  return out;
}

namespace {

struct Parsed {
  RunConfig config;
  bool help = false;
  std::string help_text;
};

Parsed parse(const std::vector<std::string>& args) {
  CLI::App app{"Uniform-mixture-prior binary regression experiments", "stepbayes"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::string out_path, config_path;
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_path, "output file (default: standard output)");
  app.add_option("--config", config_path, "key = value file; flags override it");
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : commands()) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    subs[c.name] = sub;
    for (const auto& k : c.keys) {
      values[c.name][k.name] = k.fallback;
      options[c.name][k.name] =
          sub->add_option(std::string("--") + k.name, values[c.name][k.name], k.help)
              ->capture_default_str();
    }
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  Parsed p;
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    p.help = true;
    p.help_text = app.help();
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) p.help_text = sub->help();
    return p;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  const CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  RunConfig& rc = p.config;
  rc.subcommand = name;
  rc.params = values[name];
  const bool seed_given = app.get_option("--seed")->count() > 0;
  const bool out_given = app.get_option("--out")->count() > 0;
  if (!config_path.empty()) {
    for (const auto& [k, v] : read_config_file(config_path)) {
      if (k == "seed") {
        if (!seed_given) {
          const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
          if (ec != std::errc() || end != v.data() + v.size())
            throw ConfigError("seed expects an unsigned integer, got '" + v + "'");
        }
        continue;
      }
      if (k == "out") {
        if (!out_given) out_path = v;
        continue;
      }
      if (k == "subcommand") {
        if (v != name) throw ConfigError("config file is for '" + v + "', not " + name);
        continue;
      }
      const auto it = options[name].find(k);
      if (it == options[name].end())
        throw ConfigError("unknown key '" + k + "' for subcommand " + name);
      if (it->second->count() == 0) rc.params[k] = v;
    }
  }
  rc.seed = seed;
  rc.out = out_path;
  return p;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  auto p = parse(args);
  if (p.help) throw ConfigError("help requested");
  return p.config;
}

void run(const RunConfig& config, std::ostream& out) {
  const auto& cmd = find_command(config.subcommand);
  for (const auto& [k, v] : config.params) {
    const bool known = std::any_of(cmd.keys.begin(), cmd.keys.end(),
                                   [&](const Key& key) { return k == key.name; });
    if (!known) throw ConfigError("unknown key '" + k + "' for subcommand " + config.subcommand);
  }
  RunConfig c = config;
  for (const auto& key : cmd.keys) c.params.try_emplace(key.name, key.fallback);
  const Params p(c);

  std::ostringstream buffer;  // nothing is written unless the run succeeds
  const std::string& s = c.subcommand;
  if (s == "simulate") run_simulate(c, p, buffer);
  else if (s == "fit") run_fit(c, p, buffer);
  else if (s == "exact-z") run_exact_z(c, p, buffer);
  else if (s == "model-posterior") run_model_posterior(c, p, buffer);
  else if (s == "zone-scan") run_zone_scan(c, p, buffer);
  else if (s == "beginning-zone") run_beginning_zone(c, p, buffer);
  else if (s == "psi") run_psi(c, p, buffer);
  else if (s == "piecewise") run_piecewise(c, p, buffer);
  else if (s == "end-zone") run_end_zone(c, p, buffer);
  else if (s == "badset") run_badset(c, p, buffer);
  else if (s == "urn-terms") run_urn_terms(c, p, buffer);
  else if (s == "urn-mixing") run_urn_mixing(c, p, buffer);
  else if (s == "entropy") run_entropy(c, p, buffer);
  if (c.out.empty()) {
    out << buffer.str();
    out.flush();
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + c.out);
  file << buffer.str();
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto fail = [&err](const char* kind, const std::string& what, int code) {
    std::string msg = what;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << kind << ": " << msg << '\n';
    return code;
  };
  try {
    const auto p = parse(args);
    if (p.help) {
      out << p.help_text;
      return kOk;
    }
    run(p.config, out);
    return kOk;
  } catch (const ConfigError& e) {
    return fail("config", e.what(), kConfigError);
  } catch (const OversizedRequestError& e) {
    return fail("oversized", e.what(), kOversized);
  } catch (const DuplicateCovariateError& e) {
    return fail("duplicate-covariate", e.what(), kDataError);
  } catch (const SplitCoincidenceError& e) {
    return fail("split-coincidence", e.what(), kDataError);
  } catch (const ParseError& e) {
    return fail("parse", e.what(), kDataError);
  } catch (const std::invalid_argument& e) {
    return fail("invalid-argument", e.what(), kConfigError);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), kFailure);
  }
}

}  // namespace stepbayes::cli
