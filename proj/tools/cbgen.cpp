// Command-line front end: eval, sample, verify, particle.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
// 3 resource cap reached (partial output is flagged invalid).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cbgen/csv.hpp"
#include "cbgen/kernel.hpp"
#include "cbgen/numeric.hpp"
#include "cbgen/particle.hpp"
#include "cbgen/paths.hpp"
#include "cbgen/samplers.hpp"
#include "cbgen/stats.hpp"
#include "cbgen/suites.hpp"

namespace {

using json = nlohmann::json;
using cbgen::ModelParams;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

struct Common {
  double beta = 1.0;
  double theta = 1.0;
  std::uint64_t seed = 42;
  std::int64_t samples = 100000;
  double eps = 1e-3;
  std::string out;
  std::string format = "csv";
  std::string config;
};

template <class T>
struct is_optional : std::false_type {};
template <class T>
struct is_optional<std::optional<T>> : std::true_type {};

// Keys a config file may set, mapped to the option that a flag would set.
struct Bindings {
  std::map<std::string, CLI::Option*> options;
  std::map<std::string, std::function<void(const json&)>> setters;
  mutable std::vector<std::string> applied;

  bool given(const std::string& key) const {
    return options.at(key)->count() > 0 || std::find(applied.begin(), applied.end(), key) != applied.end();
  }

  template <class T>
  void bind(const std::string& key, CLI::Option* opt, T& target) {
    options[key] = opt;
    setters[key] = [&target](const json& v) {
      if constexpr (is_optional<T>::value)
        target = v.get<typename T::value_type>();
      else
        target = v.get<T>();
    };
  }

  // Flags given on the command line win over file values.
  void apply(const std::string& path) const {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw cbgen::ConfigError("cannot read config file " + path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw cbgen::ConfigError("config file " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw cbgen::ConfigError("config file must hold a flat JSON object");
    for (const auto& [key, value] : doc.items()) {
      const auto it = setters.find(key);
      if (it == setters.end()) throw cbgen::ConfigError("config file: unknown key '" + key + "'");
      if (options.at(key)->count() > 0) continue;
      try {
        it->second(value);
        applied.push_back(key);
      } catch (const json::exception&) {
        throw cbgen::ConfigError("config file: bad value for '" + key + "'");
      }
    }
  }
};

void add_common(CLI::App* cmd, Common& c, Bindings& b, bool with_samples) {
  b.bind("beta", cmd->add_option("--beta", c.beta, "time-scale parameter")->capture_default_str(), c.beta);
  b.bind("theta", cmd->add_option("--theta", c.theta, "size parameter")->capture_default_str(), c.theta);
  b.bind("seed", cmd->add_option("--seed", c.seed, "random seed")->capture_default_str(), c.seed);
  if (with_samples) {
    b.bind("samples", cmd->add_option("--samples", c.samples, "replicate count")->capture_default_str(),
           c.samples);
    b.bind("eps", cmd->add_option("--eps", c.eps, "depth cutoff")->capture_default_str(), c.eps);
    b.bind("out", cmd->add_option("--out", c.out, "output path"), c.out);
    b.bind("format", cmd->add_option("--format", c.format, "csv or json")
                         ->check(CLI::IsMember({"csv", "json"}))
                         ->capture_default_str(),
           c.format);
  }
  cmd->add_option("--config", c.config, "flat JSON file of option values; flags override");
}

// ------------------------------------------------------------------ eval

using Args = std::map<std::string, double>;

struct Quantity {
  std::string name;
  std::vector<std::string> args;
  std::string help;
  std::function<double(const ModelParams&, const Args&)> eval;
};

const std::vector<Quantity>& catalogue() {
  using namespace cbgen::kernel;
  using A = const Args&;
  using P = const ModelParams&;
  static const std::vector<Quantity> q{
      {"psi", {"lambda"}, "branching mechanism", [](P p, A a) { return branching_mechanism(p, a.at("lambda")); }},
      {"u", {"lambda", "t"}, "cumulant semigroup", [](P p, A a) { return cumulant(p, a.at("lambda"), a.at("t")); }},
      {"c", {"t"}, "excursion survival rate", [](P p, A a) { return extinction_rate(p, a.at("t")); }},
      {"c-inv", {"y"}, "inverse of c", [](P p, A a) { return extinction_rate_inverse(p, a.at("y")); }},
      {"c-prime", {"t"}, "derivative of c", [](P p, A a) { return extinction_rate_derivative(p, a.at("t")); }},
      {"band-cumulant", {"lambda", "t"}, "integral of u over [0, t]",
       [](P p, A a) { return band_cumulant_integral(p, a.at("lambda"), a.at("t")); }},
      {"tail-rate", {"s"}, "integral of c over [s, inf)", [](P p, A a) { return tail_rate_integral(p, a.at("s")); }},
      {"band-rate", {"t", "s"}, "integral of c over [t, s]",
       [](P p, A a) { return band_rate_integral(p, a.at("t"), a.at("s")); }},
      {"excursion-mean", {"t"}, "excursion mass at time t", [](P p, A a) { return excursion_mean(p, a.at("t")); }},
      {"survival-laplace", {"lambda", "t"}, "Laplace transform on survival",
       [](P p, A a) { return survival_laplace(p, a.at("lambda"), a.at("t")); }},
      {"extinct-weighted-mean", {"s", "t"}, "mass at s weighted by extinction by s+t",
       [](P p, A a) { return extinct_weighted_mean(p, a.at("s"), a.at("t")); }},
      {"pop-laplace", {"lambda"}, "stationary population Laplace transform",
       [](P p, A a) { return pop_laplace(p, a.at("lambda")); }},
      {"pop-mean", {}, "stationary mean", [](P p, A) { return pop_mean(p); }},
      {"pop-second-moment", {}, "stationary second moment", [](P p, A) { return pop_second_moment(p); }},
      {"pop-autocov", {"s"}, "E[Z_0 Z_s]", [](P p, A a) { return pop_autocovariance_raw(p, a.at("s")); }},
      {"tmrca-cdf", {"t"}, "P(TMRCA <= t)", [](P p, A a) { return tmrca_cdf(p, a.at("t")); }},
      {"tmrca-mean", {}, "mean TMRCA", [](P p, A) { return tmrca_mean(p); }},
      {"ancestors-mean", {"r"}, "E[M_{-r}]", [](P p, A a) { return ancestors_mean(p, a.at("r")); }},
      {"ancestors-second-moment", {"r"}, "E[M_{-r}^2]",
       [](P p, A a) { return ancestors_second_moment(p, a.at("r")); }},
      {"ancestors-laplace", {"lambda", "r"}, "E[exp(-lambda M_{-r})]",
       [](P p, A a) { return ancestors_laplace(p, a.at("lambda"), a.at("r")); }},
      {"joint-laplace", {"mu", "lambda", "t", "r"}, "joint transform of counts at depths t < r",
       [](P p, A a) { return joint_forward_laplace(p, a.at("mu"), a.at("lambda"), a.at("t"), a.at("r")); }},
      {"cond-mean", {"t", "r", "m"}, "E[M_{-t} | M_{-r} = m]",
       [](P p, A a) { return cond_mean(p, a.at("t"), a.at("r"), a.at("m")); }},
      {"cross-moment", {"t", "r"}, "E[M_{-t} M_{-r}]",
       [](P p, A a) { return cross_moment(p, a.at("t"), a.at("r")); }},
      {"two-time-cross-moment", {"r", "s", "q"}, "E[M^0_{-r} M^s_{s-q}]",
       [](P p, A a) { return two_time_cross_moment(p, a.at("r"), a.at("s"), a.at("q")); }},
      {"slice-laplace", {"lambda", "v", "q"}, "excursion slice transform",
       [](P p, A a) { return slice_laplace(p, a.at("lambda"), a.at("v"), a.at("q")); }},
      {"slice-mean", {"v", "q"}, "excursion slice mean", [](P p, A a) { return slice_mean(p, a.at("v"), a.at("q")); }},
      {"slice-mean-conditioned", {"v", "q"}, "slice mean given survival past v",
       [](P p, A a) { return slice_mean_conditioned(p, a.at("v"), a.at("q")); }},
      {"thinning-factor", {"lambda", "q", "r"}, "one-step thinning transform",
       [](P p, A a) { return thinning_factor(p, a.at("lambda"), a.at("q"), a.at("r")); }},
      {"restricted-laplace-1", {"lambda", "v", "q", "s"}, "slice transform on extinction by v+q+s",
       [](P p, A a) { return restricted_laplace_1(p, a.at("lambda"), a.at("v"), a.at("q"), a.at("s")); }},
      {"restricted-laplace-2", {"lambda", "mu", "v", "q", "s", "vp"}, "two-count restricted transform, vp < q",
       [](P p, A a) {
         return restricted_laplace_2(p, a.at("lambda"), a.at("mu"), a.at("v"), a.at("q"), a.at("s"), a.at("vp"));
       }},
      {"restricted-laplace-3", {"lambda", "mu", "v", "q", "s", "vp"}, "two-level restricted transform, vp < v",
       [](P p, A a) {
         return restricted_laplace_3(p, a.at("lambda"), a.at("mu"), a.at("v"), a.at("q"), a.at("s"), a.at("vp"));
       }},
      {"restricted-mean", {"v", "q", "s"}, "slice mean on extinction by v+q+s",
       [](P p, A a) { return restricted_mean(p, a.at("v"), a.at("q"), a.at("s")); }},
      {"length-mean", {"eps"}, "mean truncated tree length", [](P p, A a) { return length_mean(p, a.at("eps")); }},
      {"increment-second-moment", {"eps", "eta"}, "E[(L_eps - L_eta)^2] compensated",
       [](P p, A a) { return compensated_increment_second_moment(p, a.at("eps"), a.at("eta")); }},
      {"compensated-second-moment", {"eps"}, "second moment of the compensated length",
       [](P p, A a) { return compensated_second_moment(p, a.at("eps")); }},
      {"truncation-error", {"eta"}, "E[(W - L_eta)^2]",
       [](P p, A a) { return compensated_truncation_error(p, a.at("eta")); }},
      {"truncation-bound", {"eta"}, "upper bound 4 eta / (beta theta)",
       [](P p, A a) { return truncation_error_bound(p, a.at("eta")); }},
      {"length-variance", {"eps"}, "variance of the truncated length",
       [](P p, A a) { return length_variance(p, a.at("eps")); }},
      {"phi", {"lambda"}, "Laplace exponent of W given Z", [](P, A a) { return phi(a.at("lambda")); }},
      {"w-laplace", {"lambda"}, "E[exp(-2 beta theta lambda W)], lambda < 1",
       [](P p, A a) { return w_laplace(p, a.at("lambda")); }},
      {"w-laplace-conditional", {"lambda", "z"}, "transform of W given 2 theta Z0 = z",
       [](P, A a) { return w_laplace_conditional(a.at("lambda"), a.at("z")); }},
      {"w-second-moment", {}, "E[W^2]", [](P p, A) { return w_second_moment(p); }},
      {"w-cov", {"s"}, "E[W_0 W_s]", [](P p, A a) { return w_covariance(p, a.at("s")); }},
      {"w-increment", {"s"}, "E[(W_s - W_0)^2]", [](P p, A a) { return w_increment_second_moment(p, a.at("s")); }},
      {"graft", {"t"}, "P(M_{-t} = 0)", [](P p, A a) { return graft_identity(p, a.at("t")); }},
      {"dilog", {"x"}, "dilogarithm, x <= 1", [](P, A a) { return cbgen::numeric::dilogarithm(a.at("x")); }},
  };
  return q;
}

std::string catalogue_text() {
  std::ostringstream os;
  os << "Quantities:\n";
  for (const auto& q : catalogue()) {
    std::string args;
    for (const auto& a : q.args) args += " --" + a;
    os << "  " << q.name << args << "\n      " << q.help << "\n";
  }
  return os.str();
}

const std::vector<std::string> kEvalArgs{"lambda", "mu", "t", "s", "r", "q", "v", "vp", "y", "m", "eps", "eta", "z", "x"};

// --------------------------------------------------------------- helpers

std::string sink_path(const std::string& given, const std::string& fallback) {
  return given.empty() ? fallback : given;
}

json estimate_json(const cbgen::MCEstimate& e, double analytic) {
  return {{"mean", e.mean}, {"stderr", e.stderr_}, {"n", e.n}, {"analytic", analytic}};
}

std::vector<double> lagged(const std::vector<double>& x, const std::vector<double>& y, std::size_t lag) {
  std::vector<double> out;
  for (std::size_t i = 0; i + lag < x.size(); ++i) out.push_back(x[i] * y[i + lag]);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification toolkit for the genealogy of a stationary quadratic branching population"};
  app.require_subcommand(1);
  app.footer(catalogue_text());
  Common c;
  Bindings eval_b, sample_b, verify_b, particle_b;

  auto* eval = app.add_subcommand("eval", "print one kernel quantity");
  eval->footer(catalogue_text());
  std::string quantity;
  eval->add_option("quantity", quantity, "quantity name")->required();
  std::map<std::string, double> eval_args;
  for (const auto& name : kEvalArgs) {
    eval_args[name] = std::nan("");
    eval->add_option("--" + name, eval_args[name]);
  }
  add_common(eval, c, eval_b, false);

  auto* sample = app.add_subcommand("sample", "write samples as CSV or JSON");
  sample->footer(catalogue_text());
  std::string target;
  sample->add_option("target", target, "z0, lineage, forward-chain, birth-path or death-path")->required();
  std::vector<double> levels{0.5, 1.0};
  double path_horizon = 6.0;
  add_common(sample, c, sample_b, true);
  sample_b.bind("levels", sample->add_option("--levels", levels, "forward-chain depths")->delimiter(','),
                levels);
  sample_b.bind("horizon", sample->add_option("--horizon", path_horizon, "path horizon")->capture_default_str(),
                path_horizon);

  auto* verify = app.add_subcommand("verify", "run a verification suite and write its JSON report");
  verify->footer(catalogue_text());
  std::string suite;
  verify->add_option("suite,--suite", suite, "kernel, single-time, two-time, paths, fluctuation or particle");
  cbgen::SuiteOptions sopts;
  std::optional<double> suite_burn_in;
  add_common(verify, c, verify_b, true);
  verify_b.bind("n", verify->add_option("--n", sopts.particles, "particle count")->capture_default_str(),
                sopts.particles);
  verify_b.bind("burn-in", verify->add_option("--burn-in", suite_burn_in, "particle burn-in"), suite_burn_in);
  verify_b.bind("horizon", verify->add_option("--horizon", sopts.horizon, "total particle horizon")
                               ->capture_default_str(),
                sopts.horizon);

  auto* particle = app.add_subcommand("particle", "run the event-driven particle system");
  particle->footer(catalogue_text());
  std::int64_t n_particles = 2000;
  std::optional<double> burn_in;
  double horizon = 5.0;
  int replicates = 1;
  std::string summary_path;
  add_common(particle, c, particle_b, true);
  particle_b.bind("n", particle->add_option("--n", n_particles, "particle count (>= 100)")->capture_default_str(),
                n_particles);
  particle_b.bind("burn-in", particle->add_option("--burn-in", burn_in, "burn-in, default 10 / (2 beta theta)"),
                burn_in);
  particle_b.bind("horizon", particle->add_option("--horizon", horizon, "observation window")->capture_default_str(),
                horizon);
  particle_b.bind("replicates", particle->add_option("--replicates", replicates, "independent runs")
                                  ->capture_default_str(),
                replicates);
  particle_b.bind("summary", particle->add_option("--summary", summary_path, "summary JSON path"), summary_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Bindings& active = *eval ? eval_b : *sample ? sample_b : *verify ? verify_b : particle_b;
    active.apply(c.config);
    const ModelParams p(c.beta, c.theta);

    if (*eval) {
      const auto& cat = catalogue();
      const auto it = std::find_if(cat.begin(), cat.end(), [&](const Quantity& q) { return q.name == quantity; });
      if (it == cat.end()) throw cbgen::ConfigError("unknown quantity '" + quantity + "'");
      Args args;
      for (const auto& a : it->args) {
        const double v = eval_args.at(a);
        if (std::isnan(v)) throw cbgen::ConfigError(quantity + " requires --" + a);
        args[a] = v;
      }
      std::cout << cbgen::format_number(it->eval(p, args), 15) << "\n";
      return kExitOk;
    }

    if (*sample) {
      if (c.samples < 1) throw cbgen::ConfigError("--samples must be positive");
      cbgen::RandomStream base(c.seed, 0);
      const std::string out = sink_path(c.out, target + "." + c.format);
      std::string text;
      const bool as_json = c.format == "json";
      if (target == "z0") {
        auto z = cbgen::parallel_map(c.samples, base,
                                     [&](std::int64_t, cbgen::RandomStream& rng) { return cbgen::sample_z0(p, rng); });
        if (as_json) {
          text = json(z).dump() + "\n";
        } else {
          text = "sample_id,z0\n";
          for (std::size_t i = 0; i < z.size(); ++i)
            text += std::to_string(i) + "," + cbgen::format_number(z[i], 12) + "\n";
        }
      } else if (target == "lineage") {
        std::vector<cbgen::LineageSample> all(static_cast<std::size_t>(c.samples));
        cbgen::parallel_map(c.samples, base, [&](std::int64_t i, cbgen::RandomStream& rng) {
          all[static_cast<std::size_t>(i)] = cbgen::sample_lineage(p, rng, c.eps);
          return 0.0;
        });
        if (as_json) {
          json arr = json::array();
          for (const auto& s : all) arr.push_back({{"z0", s.z0}, {"lifetimes", s.lifetimes}});
          text = arr.dump() + "\n";
        } else {
          text = cbgen::lineage_csv(all);
        }
      } else if (target == "forward-chain") {
        std::vector<cbgen::ForwardChain> all(static_cast<std::size_t>(c.samples));
        cbgen::parallel_map(c.samples, base, [&](std::int64_t i, cbgen::RandomStream& rng) {
          all[static_cast<std::size_t>(i)] = cbgen::forward_thinning_chain(p, rng, levels);
          return 0.0;
        });
        if (as_json) {
          json arr = json::array();
          for (const auto& ch : all) arr.push_back({{"z0", ch.z0}, {"levels", levels}, {"counts", ch.counts}});
          text = arr.dump() + "\n";
        } else {
          text = "sample_id,z0,level,count\n";
          for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t k = 0; k < levels.size(); ++k)
              text += std::to_string(i) + "," + cbgen::format_number(all[i].z0, 12) + "," +
                      cbgen::format_number(levels[k], 12) + "," + std::to_string(all[i].counts[k]) + "\n";
        }
      } else if (target == "birth-path" || target == "death-path") {
        std::vector<cbgen::StepPath> all(static_cast<std::size_t>(c.samples));
        cbgen::PathSimConfig cfg;
        cfg.horizon = path_horizon;
        cfg.eps_stop = c.eps;
        const bool birth = target == "birth-path";
        cbgen::parallel_map(c.samples, base, [&](std::int64_t i, cbgen::RandomStream& rng) {
          all[static_cast<std::size_t>(i)] = birth ? cbgen::simulate_birth_path(p, rng, cfg)
                                                   : cbgen::simulate_death_path(p, rng, c.eps, path_horizon);
          return 0.0;
        });
        if (as_json) {
          json arr = json::array();
          for (const auto& s : all) arr.push_back({{"time", s.breakpoints}, {"count", s.values}});
          text = arr.dump() + "\n";
        } else {
          text = cbgen::path_csv(all);
        }
      } else {
        throw cbgen::ConfigError("unknown sample target '" + target + "'");
      }
      cbgen::write_file_atomic(out, text);
      std::cout << out << " " << c.samples << " samples\n";
      return kExitOk;
    }

    if (*verify) {
      if (suite.empty()) throw cbgen::ConfigError("verify needs a suite name");
      sopts.params = p;
      sopts.seed = c.seed;
      sopts.eps = c.eps;
      if (verify_b.given("samples")) sopts.samples = c.samples;
      sopts.burn_in = suite_burn_in;
      const auto known = cbgen::suite_names();
      if (std::find(known.begin(), known.end(), suite) == known.end())
        throw cbgen::ConfigError("unknown suite '" + suite + "'");
      const cbgen::SuiteReport rep = cbgen::run_suite(suite, sopts);
      for (const auto& chk : rep.checks) {
        std::cout << (chk.passed ? "PASS " : "FAIL ") << chk.name << "  analytic=" << cbgen::format_number(chk.analytic, 15)
                  << " estimate=" << cbgen::format_number(chk.estimate.mean, 15)
                  << " score=" << cbgen::format_number(chk.zscore, 4) << "/" << cbgen::format_number(chk.threshold, 4)
                  << "\n";
      }
      const std::string out = sink_path(c.out, "report-" + suite + ".json");
      cbgen::write_file_atomic(out, cbgen::to_json(rep));
      std::cout << (rep.overall_pass ? "overall PASS" : "overall FAIL") << "  report " << out << "\n";
      return rep.overall_pass ? kExitOk : kExitVerify;
    }

    if (*particle) {
      cbgen::ParticleConfig cfg;
      cfg.params = p;
      cfg.n = n_particles;
      cfg.burn_in = burn_in.value_or(10.0 / p.rate());
      cfg.horizon = horizon;
      cfg.validate();
      if (replicates < 1) throw cbgen::ConfigError("--replicates must be positive");
      const std::string genealogy_out = sink_path(c.out, "genealogy.csv");
      const std::string summary_out = sink_path(summary_path, "particle-summary.json");

      // Observation grid every 0.05 over the window.
      const double dt = 0.05;
      const auto steps = static_cast<std::int64_t>(std::floor(horizon / dt + 1e-9));
      const cbgen::ObservationSpec spec{{0.5, 0.8, 1.0}, {0.01}};
      std::vector<double> z, z2, m05, auto05, cross, len, len_cov;
      std::int64_t events = 0;
      bool valid = true;
      std::string note;
      for (int rep = 0; rep < replicates; ++rep) {
        cbgen::EventParticleSystem sys(cfg, cbgen::RandomStream(c.seed, static_cast<std::uint64_t>(rep)), false);
        std::vector<double> zr, m05r, m08r, m1r, lr;
        cbgen::TreeSnapshot snap;
        try {
          sys.advance_to(cfg.burn_in);
          for (std::int64_t k = 0; k <= steps; ++k) {
            sys.advance_to(cfg.burn_in + static_cast<double>(k) * dt);
            sys.observe(spec, snap);
            zr.push_back(static_cast<double>(snap.population) / static_cast<double>(cfg.n));
            m05r.push_back(static_cast<double>(snap.ancestors[0]));
            m08r.push_back(static_cast<double>(snap.ancestors[1]));
            m1r.push_back(static_cast<double>(snap.ancestors[2]));
            lr.push_back(cbgen::compensated_from_snapshot(p, cfg.n, snap, 0, 0.01));
          }
        } catch (const cbgen::ResourceError& e) {
          valid = false;
          note = e.what();
        }
        events += sys.events();
        if (rep == 0) cbgen::write_file_atomic(genealogy_out, cbgen::genealogy_csv(sys.ancestral_log()));
        z.insert(z.end(), zr.begin(), zr.end());
        for (double v : zr) z2.push_back(v * v);
        m05.insert(m05.end(), m05r.begin(), m05r.end());
        const auto a = lagged(zr, zr, 10);
        auto05.insert(auto05.end(), a.begin(), a.end());
        const auto x = lagged(m1r, m08r, 6);
        cross.insert(cross.end(), x.begin(), x.end());
        len.insert(len.end(), lr.begin(), lr.end());
        const auto lc = lagged(lr, lr, 10);
        len_cov.insert(len_cov.end(), lc.begin(), lc.end());
        if (!valid) break;
      }
      // Serially correlated observations: batch means with 10 batches.
      auto bm = [](const std::vector<double>& v) {
        return v.size() >= 20 ? cbgen::batch_means(v, 10) : cbgen::summarize(v);
      };
      using namespace cbgen::kernel;
      json summary = {
          {"valid", valid},
          {"n", cfg.n},
          {"burn_in", cfg.burn_in},
          {"horizon", cfg.horizon},
          {"replicates", replicates},
          {"seed", c.seed},
          {"params", {{"beta", p.beta()}, {"theta", p.theta()}}},
          {"events", events},
          {"observation_dt", dt},
          {"genealogy", genealogy_out},
      };
      if (!note.empty()) summary["note"] = note;
      if (z.size() >= 2) {
        summary["scaled_mean"] = estimate_json(bm(z), pop_mean(p));
        summary["scaled_second_moment"] = estimate_json(bm(z2), pop_second_moment(p));
        if (auto05.size() >= 2) summary["autocov_0.5"] = estimate_json(bm(auto05), pop_autocovariance_raw(p, 0.5));
        summary["ancestors_mean_0.5"] = estimate_json(bm(m05), ancestors_mean(p, 0.5));
        if (cross.size() >= 2)
          summary["cross_time_r1_s0.3_q0.8"] = estimate_json(bm(cross), two_time_cross_moment(p, 1.0, 0.3, 0.8));
        std::vector<double> l2;
        for (double v : len) l2.push_back(v * v);
        summary["length_second_moment_0.01"] = estimate_json(bm(l2), compensated_second_moment(p, 0.01));
        if (len_cov.size() >= 2) summary["length_cov_0.5"] = estimate_json(bm(len_cov), w_covariance(p, 0.5));
      }
      cbgen::write_file_atomic(summary_out, summary.dump(2) + "\n");
      std::cout << summary_out << "\n";
      if (summary.contains("scaled_mean"))
        std::cout << "scaled mean " << cbgen::format_number(summary["scaled_mean"]["mean"].get<double>(), 15) << "\n";
      return valid ? kExitOk : kExitResource;
    }
  } catch (const cbgen::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cbgen::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerify;
  }
  return kExitUsage;
}
