#include "drbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace drbandit {

PolicyKind parse_policy(const std::string& token) {
  if (token == "etc") return PolicyKind::Etc;
  if (token == "ucb") return PolicyKind::Ucb;
  if (token == "ce-ucb") return PolicyKind::CeUcb;
  if (token == "uniform") return PolicyKind::Uniform;
  throw std::invalid_argument("unknown policy token: '" + token + "'");
}

std::string policy_token(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Etc: return "etc";
    case PolicyKind::Ucb: return "ucb";
    case PolicyKind::CeUcb: return "ce-ucb";
    case PolicyKind::Uniform: return "uniform";
  }
  return "?";
}

namespace {

std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(std::tolower(c));
  return out;
}

}  // namespace

EpsRule EpsRule::parse(const std::string& token) {
  EpsRule rule;
  const std::string norm = strip_spaces(token);
  if (norm == "sqrt(klogt/t)" || norm == "sqrt(k*logt/t)") {
    rule.formula = true;
    return rule;
  }
  std::size_t pos = 0;
  rule.fixed = std::stod(norm, &pos);
  if (pos != norm.size())
    throw std::invalid_argument("eps is neither a number nor the sqrt rule: '" + token + "'");
  if (rule.fixed <= 0.0 || rule.fixed > 1.0)
    throw std::invalid_argument("eps must be in (0,1]");
  return rule;
}

double EpsRule::value(std::size_t K, std::uint64_t T) const {
  if (!formula) return fixed;
  return std::sqrt(static_cast<double>(K) * std::log(static_cast<double>(T)) /
                   static_cast<double>(T));
}

std::string EpsRule::token() const {
  if (formula) return "sqrt(K logT / T)";
  std::ostringstream os;
  os << fixed;
  return os.str();
}

std::size_t ExperimentConfig::K() const { return parse_arms(arms).size(); }

std::uint64_t ExperimentConfig::explore_for(std::uint64_t T) const {
  const std::size_t k = K();
  std::uint64_t per_arm = explore_per_arm;
  if (per_arm == 0)
    per_arm = static_cast<std::uint64_t>(std::ceil(rho * static_cast<double>(T)));
  return std::min<std::uint64_t>(per_arm, T / k);
}

const AggregateRow* AggregateResult::find(PolicyKind policy,
                                          std::uint64_t checkpoint) const {
  for (const AggregateRow& row : rows)
    if (row.policy == policy && row.checkpoint == checkpoint) return &row;
  return nullptr;
}

std::uint64_t instance_hash(const DistortionSpec& spec,
                            const std::vector<ArmModel>& arms) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto fold = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  const auto fold_double = [&](double d) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(d));
    std::memcpy(&bits, &d, sizeof(bits));
    fold(bits);
  };
  fold(static_cast<std::uint64_t>(spec.kind()));
  fold_double(spec.param());
  for (const ArmModel& a : arms)
    for (const Atom& atom : a.cdf().atoms()) {
      fold_double(atom.value);
      fold_double(atom.prob);
    }
  return h;
}

OracleValue oracle_value(const DistortionSpec& spec, const std::vector<ArmModel>& arms) {
  OracleValue v;
  v.value = oracle_continuous(spec, arms).value;
  v.instance_hash = instance_hash(spec, arms);
  return v;
}

double regret_of_trajectory(const PolicyTrajectory& traj, const DistortionSpec& spec,
                            const std::vector<ArmModel>& arms, const OracleValue& vstar) {
  if (vstar.instance_hash != instance_hash(spec, arms))
    throw std::invalid_argument("regret: oracle value belongs to a different instance");
  std::vector<FiniteCdf> cdfs;
  cdfs.reserve(arms.size());
  for (const ArmModel& a : arms) cdfs.push_back(a.cdf());
  return vstar.value - mixture_value(spec, traj.final_fractions(), cdfs);
}

std::size_t worker_count() {
  if (const char* env = std::getenv("DRBANDIT_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {

/// Run `fn(trial)` for trial = 0..trials-1 on the worker pool. Results and
/// errors land in per-trial slots, so scheduling order never shows.
template <typename Fn>
std::vector<double> map_trials(std::size_t trials, Fn&& fn) {
  std::vector<double> results(trials, 0.0);
  std::vector<std::string> errors(trials);
  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(trials, 1));

  const auto body = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= trials) return;
      try {
        results[j] = fn(j);
      } catch (const std::exception& ex) {
        errors[j] = ex.what();
      }
    }
  };

  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (std::thread& th : pool) th.join();
  }
  for (std::size_t j = 0; j < trials; ++j)
    if (!errors[j].empty())
      throw std::runtime_error("trial " + std::to_string(j) + ": " + errors[j]);
  return results;
}

AggregateRow summarize(const std::vector<double>& regrets) {
  AggregateRow row;
  row.trials = regrets.size();
  row.min = 1e300;
  row.max = -1e300;
  double sum = 0.0;
  for (double r : regrets) {
    sum += r;
    row.min = std::min(row.min, r);
    row.max = std::max(row.max, r);
  }
  row.mean = sum / static_cast<double>(regrets.size());
  double ss = 0.0;
  for (double r : regrets) ss += (r - row.mean) * (r - row.mean);
  row.stderr_ = regrets.size() > 1
                    ? std::sqrt(ss / static_cast<double>(regrets.size() - 1)) /
                          std::sqrt(static_cast<double>(regrets.size()))
                    : 0.0;
  return row;
}

}  // namespace

AggregateResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("run_experiment: trials must be >= 1");
  const DistortionSpec spec = parse_riskmetric(cfg.riskmetric);
  const std::vector<ArmModel> arms = parse_arms(cfg.arms);
  const std::size_t K = arms.size();
  const OracleValue vstar = oracle_value(spec, arms);

  AggregateResult out;
  out.sweep_param = cfg.sweep_param;
  out.seed = cfg.seed;

  for (std::uint64_t T : cfg.horizons) {
    const double eps = cfg.eps_rule.value(K, T);
    const std::uint64_t explore = cfg.explore_for(T);

    for (PolicyKind policy : cfg.policies) {
      // Shared instance-level setup stays on this thread; trials fan out.
      EtcConfig etc_cfg;
      UcbConfig ucb_cfg;
      if (policy == PolicyKind::Etc) {
        etc_cfg.eps = eps;
        etc_cfg.explore_per_arm = explore;
        etc_cfg.delta_min =
            cfg.delta_min > 0.0
                ? cfg.delta_min
                : min_gap(spec, arms, GridSpec{K, eps, GridScheme::EtcLattice});
      } else if (policy == PolicyKind::Ucb || policy == PolicyKind::CeUcb) {
        ucb_cfg.rho = cfg.rho;
        ucb_cfg.eps = eps;
        ucb_cfg.variant = policy == PolicyKind::Ucb
                              ? UcbVariant::Exact
                              : UcbVariant::ComputationallyEfficient;
        ucb_cfg.explore_per_arm = explore;
        ucb_cfg.recompute_stride = cfg.recompute_stride;
      }

      std::vector<double> regrets;
      try {
        regrets = map_trials(cfg.trials, [&](std::size_t trial) {
          BanditEnv env{arms, T, cfg.seed, trial};
          PolicyTrajectory traj;
          switch (policy) {
            case PolicyKind::Etc: traj = etc_run(env, etc_cfg, spec); break;
            case PolicyKind::Ucb:
            case PolicyKind::CeUcb: traj = ucb_run(env, ucb_cfg, spec); break;
            case PolicyKind::Uniform: traj = uniform_run(env); break;
          }
          return regret_of_trajectory(traj, spec, arms, vstar);
        });
      } catch (const std::exception& ex) {
        throw std::runtime_error("experiment aborted at policy=" + policy_token(policy) +
                                 " T=" + std::to_string(T) + ": " + ex.what());
      }

      AggregateRow row = summarize(regrets);
      row.policy = policy;
      row.checkpoint = T;
      row.sweep_value = static_cast<double>(T);
      out.rows.push_back(row);
    }
  }
  return out;
}

double fit_scaling(const AggregateResult& result, PolicyKind policy,
                   std::vector<std::string>* notes) {
  std::vector<double> xs, ys;
  for (const AggregateRow& row : result.rows) {
    if (row.policy != policy) continue;
    const double t = static_cast<double>(row.checkpoint);
    if (row.mean <= 0.0) {
      if (notes)
        notes->push_back("fit: excluded nonpositive mean regret at T=" +
                         std::to_string(row.checkpoint));
      continue;
    }
    xs.push_back(std::log(std::log(t) / t));
    ys.push_back(std::log(row.mean));
  }
  if (xs.size() < 4)
    throw std::invalid_argument("fit_scaling: need >= 4 checkpoints with positive regret");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

SweepKind parse_sweep(const std::string& token) {
  if (token == "T" || token == "t") return SweepKind::OverT;
  if (token == "K" || token == "k") return SweepKind::OverK;
  if (token == "gap") return SweepKind::OverGap;
  if (token == "rho") return SweepKind::OverRho;
  throw std::invalid_argument("unknown sweep kind: '" + token + "'");
}

std::string uniform_gap_arms(std::size_t K) {
  if (K == 0) throw std::invalid_argument("uniform_gap_arms: K must be >= 1");
  std::ostringstream os;
  for (std::size_t i = 0; i < K; ++i) {
    if (i) os << ",";
    const double p =
        K == 1 ? 0.4 : 0.4 + 0.5 * static_cast<double>(i) / static_cast<double>(K - 1);
    os << "bern:" << p;
  }
  return os.str();
}

AggregateResult sweep(SweepKind kind, const ExperimentConfig& base,
                      const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  AggregateResult out;
  out.seed = base.seed;

  switch (kind) {
    case SweepKind::OverT: {
      ExperimentConfig cfg = base;
      cfg.sweep_param = "T";
      cfg.horizons.clear();
      for (double v : values) cfg.horizons.push_back(static_cast<std::uint64_t>(v));
      return run_experiment(cfg);
    }
    case SweepKind::OverK: {
      // Uniform-gap instances at T = 3e5 with exploration T/20 per arm.
      out.sweep_param = "K";
      for (double v : values) {
        ExperimentConfig cfg = base;
        cfg.sweep_param = "K";
        cfg.arms = uniform_gap_arms(static_cast<std::size_t>(v));
        cfg.horizons = {300000};
        cfg.rho = 0.05;
        AggregateResult slice = run_experiment(cfg);
        for (AggregateRow row : slice.rows) {
          row.sweep_value = v;
          out.rows.push_back(row);
        }
        out.notes.insert(out.notes.end(), slice.notes.begin(), slice.notes.end());
      }
      return out;
    }
    case SweepKind::OverGap: {
      // Second arm mean swept against p1 = 0.55 at T = 1e5.
      out.sweep_param = "gap";
      for (double v : values) {
        ExperimentConfig cfg = base;
        cfg.sweep_param = "gap";
        std::ostringstream os;
        os << "bern:0.55,bern:" << v;
        cfg.arms = os.str();
        cfg.horizons = {100000};
        AggregateResult slice = run_experiment(cfg);
        for (AggregateRow row : slice.rows) {
          row.sweep_value = v;
          out.rows.push_back(row);
        }
        out.notes.insert(out.notes.end(), slice.notes.begin(), slice.notes.end());
      }
      return out;
    }
    case SweepKind::OverRho: {
      // Exploration coefficient swept on the K = 3 instance at T = 7.5e4.
      out.sweep_param = "rho";
      for (double v : values) {
        ExperimentConfig cfg = base;
        cfg.sweep_param = "rho";
        cfg.rho = v;
        cfg.arms = uniform_gap_arms(3);
        cfg.horizons = {75000};
        AggregateResult slice = run_experiment(cfg);
        for (AggregateRow row : slice.rows) {
          row.sweep_value = v;
          out.rows.push_back(row);
        }
        out.notes.insert(out.notes.end(), slice.notes.begin(), slice.notes.end());
      }
      return out;
    }
  }
  throw std::logic_error("sweep: unreachable");
}

ExportFormat parse_format(const std::string& token) {
  if (token == "csv") return ExportFormat::Csv;
  if (token == "json") return ExportFormat::Json;
  if (token == "svg") return ExportFormat::Svg;
  throw std::invalid_argument("unknown format: '" + token + "'");
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_csv(const AggregateResult& result) {
  std::ostringstream os;
  os << "sweep_param,policy,checkpoint,mean,min,max,stderr,seed\n";
  for (const AggregateRow& row : result.rows) {
    os << fmt_double(row.sweep_value) << ',' << policy_token(row.policy) << ','
       << row.checkpoint << ',' << fmt_double(row.mean) << ',' << fmt_double(row.min)
       << ',' << fmt_double(row.max) << ',' << fmt_double(row.stderr_) << ','
       << result.seed << '\n';
  }
  return os.str();
}

std::string render_json(const AggregateResult& result) {
  nlohmann::json j;
  j["sweep_param"] = result.sweep_param;
  j["seed"] = result.seed;
  j["notes"] = result.notes;
  j["rows"] = nlohmann::json::array();
  for (const AggregateRow& row : result.rows) {
    j["rows"].push_back({{"sweep_param", row.sweep_value},
                         {"policy", policy_token(row.policy)},
                         {"checkpoint", row.checkpoint},
                         {"mean", row.mean},
                         {"min", row.min},
                         {"max", row.max},
                         {"stderr", row.stderr_},
                         {"trials", row.trials}});
  }
  return j.dump(2) + "\n";
}

std::string render_svg(const AggregateResult& result) {
  // Mean curve per policy with a min/max band, linear axes.
  constexpr double W = 640, H = 400, ML = 70, MR = 20, MT = 20, MB = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
  for (const AggregateRow& r : result.rows) {
    xmin = std::min(xmin, r.sweep_value);
    xmax = std::max(xmax, r.sweep_value);
    ymax = std::max(ymax, r.max);
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  ymax *= 1.05;
  const auto px = [&](double x) {
    return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR);
  };
  const auto py = [&](double y) {
    return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);
  };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::map<PolicyKind, std::vector<const AggregateRow*>> by_policy;
  for (const AggregateRow& r : result.rows) by_policy[r.policy].push_back(&r);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
     << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
     << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\""
     << H - MB << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (W / 2) << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-size=\"14\">" << result.sweep_param
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << (H / 2)
     << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
     << (H / 2) << ")\">regret</text>\n";

  int color = 0;
  double legend_y = MT + 14;
  for (auto& [policy, rows] : by_policy) {
    std::sort(rows.begin(), rows.end(), [](const AggregateRow* a, const AggregateRow* b) {
      return a->sweep_value < b->sweep_value;
    });
    const char* c = kColors[color++ % 4];
    os << "<polygon fill=\"" << c << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (const AggregateRow* r : rows) os << px(r->sweep_value) << ',' << py(r->max) << ' ';
    for (auto it = rows.rbegin(); it != rows.rend(); ++it)
      os << px((*it)->sweep_value) << ',' << py((*it)->min) << ' ';
    os << "\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"" << c
       << "\" stroke-width=\"2\" stroke-dasharray=\"6 3\" points=\"";
    for (const AggregateRow* r : rows) os << px(r->sweep_value) << ',' << py(r->mean) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << W - MR - 8 << "\" y=\"" << legend_y
       << "\" text-anchor=\"end\" font-size=\"13\" fill=\"" << c << "\">"
       << policy_token(policy) << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string render(const AggregateResult& result, ExportFormat format) {
  if (result.rows.empty()) throw std::invalid_argument("render: empty result");
  switch (format) {
    case ExportFormat::Csv: return render_csv(result);
    case ExportFormat::Json: return render_json(result);
    case ExportFormat::Svg: return render_svg(result);
  }
  throw std::logic_error("render: unreachable");
}

void export_result(const AggregateResult& result, ExportFormat format,
                   const std::string& path) {
  const std::string body = render(result, format);  // throws before any I/O
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output path: " + path);
  out << body;
  if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

AggregateResult parse_csv(const std::string& text) {
  AggregateResult out;
  std::istringstream is(text);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 8) throw std::invalid_argument("csv: bad row: " + line);
    AggregateRow r;
    r.sweep_value = std::stod(fields[0]);
    r.policy = parse_policy(fields[1]);
    r.checkpoint = std::stoull(fields[2]);
    r.mean = std::stod(fields[3]);
    r.min = std::stod(fields[4]);
    r.max = std::stod(fields[5]);
    r.stderr_ = std::stod(fields[6]);
    out.seed = std::stoull(fields[7]);
    out.rows.push_back(r);
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) out[key] = value;
  }
  return out;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
  const auto split_list = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(item);
    return out;
  };
  if (key == "riskmetric") {
    cfg.riskmetric = value;
  } else if (key == "arms") {
    cfg.arms = value;
  } else if (key == "policy") {
    cfg.policies.clear();
    for (const std::string& p : split_list(value)) cfg.policies.push_back(parse_policy(p));
  } else if (key == "horizon") {
    cfg.horizons.clear();
    for (const std::string& t : split_list(value)) cfg.horizons.push_back(std::stoull(t));
  } else if (key == "trials") {
    cfg.trials = std::stoul(value);
  } else if (key == "eps" || key == "eps-rule") {
    cfg.eps_rule = EpsRule::parse(value);
  } else if (key == "rho") {
    cfg.rho = std::stod(value);
  } else if (key == "seed") {
    cfg.seed = std::stoull(value);
  } else if (key == "explore") {
    cfg.explore_per_arm = std::stoull(value);
  } else if (key == "delta-min") {
    cfg.delta_min = std::stod(value);
  } else if (key == "stride") {
    cfg.recompute_stride = std::stoull(value);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "format") {
    parse_format(value);  // validate
    cfg.format = value;
  } else if (key == "paper-scale") {
    if (value == "true" || value == "1") cfg.trials = 1000;
  } else {
    throw std::invalid_argument("unknown config key: '" + key + "'");
  }
}

}  // namespace drbandit
