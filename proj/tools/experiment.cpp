#include "experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "robin3/degree.hpp"
#include "robin3/diskspec.hpp"

namespace robin3::cli {

using nlohmann::json;
using std::numbers::pi;

namespace {

const std::vector<std::pair<Command, std::string>> kCommands{
    {Command::DiskSpectrum, "disk-spectrum"}, {Command::DomainSpectrum, "domain-spectrum"},
    {Command::FindTrial, "find-trial"},       {Command::VerifyBound, "verify-bound"},
    {Command::DegreeCheck, "degree-check"},   {Command::Sweep, "sweep"}};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs work(i) for i in [0, n) on `jobs` threads.
void parallel_for(int n, int jobs, const std::function<void(int)>& work) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) work(i);
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < std::min(jobs, n); ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

bool in_theorem_range(double beta) { return beta >= -1.0 && beta <= 1.0; }

// ---- domain rows -------------------------------------------------------

struct Row {
  std::string domain;
  double beta = 0, alpha = 0;
  std::array<double, 4> lambdas{};
  double area = 0, perimeter = 0, lambda3_area = 0, disk_bound = 0, margin = 0, ratio = 0, convergence = 0;
  bool has_trial = false;
  ZeroCandidate zero;
  double orth_f1 = 0, orth_f2 = 0, rayleigh = 0, rayleigh_area = 0;
  bool has_certificate = false;
  Certificate certificate;
  bool pass = false;
  std::string error;
  double solve_seconds = 0, trial_seconds = 0;
};

bool wants_bound(Command c) { return c == Command::VerifyBound || c == Command::Sweep; }
bool wants_trial(Command c) { return c == Command::FindTrial || c == Command::Sweep; }

Row compute_row(const ExperimentConfig& cfg, const NamedDomain& nd, double beta) {
  Row r;
  r.domain = nd.name;
  r.beta = beta;
  r.alpha = 4 * pi * beta;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const DomainSpec domain = build_domain(nd.coeffs, nd.scale);
    SolverConfig sc = cfg.solver;
    sc.alpha = r.alpha;
    const SpectrumResult spec = solve_spectrum(domain, sc);
    r.lambdas = spec.lambdas;
    r.area = domain.area;
    r.perimeter = domain.perimeter;
    r.lambda3_area = spec.lambdas[2] * domain.area;
    r.disk_bound = 2 * pi * disk_lambda2(beta).lambda;
    r.margin = r.disk_bound - r.lambda3_area;
    r.ratio = r.lambda3_area / r.disk_bound;
    r.convergence = spec.convergence_estimate;
    r.solve_seconds = seconds_since(t0);
    r.pass = true;
    if (wants_bound(cfg.command)) r.pass = r.margin > 10 * r.convergence;

    if (wants_trial(cfg.command) || cfg.degree.certificate) {
      const auto t1 = std::chrono::steady_clock::now();
      const TrialField field(domain, spec, default_profile(r.alpha), cfg.search.order);
      if (wants_trial(cfg.command)) {
        SearchConfig search = cfg.search;
        search.jobs = 1;
        const SearchResult res = find_zero(field, search);
        r.has_trial = true;
        r.zero = res.best;
        const TrialParams tp = r.zero.trial();
        const FoldQuadrature quad(tp.cap, domain, spec, cfg.search.order);
        const auto h = field.trial_values(tp, quad);
        const double unorm = std::sqrt(quad.mass(h));
        const VectorFieldValue v = quad.field(h);
        r.orth_f1 = std::abs(v.inner1) / unorm;
        r.orth_f2 = std::abs(v.inner2 + spec.rho * v.inner1) / unorm;
        const RayleighBreakdown rq = field.rayleigh(tp);
        r.rayleigh = rq.quotient;
        r.rayleigh_area = rq.quotient * domain.area;
        const double tol = cfg.search.tolerance;
        const bool ok = r.zero.converged && r.zero.residual < tol && r.orth_f1 < 1e-6 && r.orth_f2 < 1e-6 &&
                        r.rayleigh >= spec.lambdas[2] - 10 * tol && r.rayleigh_area < r.disk_bound + 10 * tol;
        r.pass = r.pass && ok;
      }
      if (cfg.degree.certificate) {
        r.has_certificate = true;
        r.certificate = degree_certificate(field, cfg.degree.level, cfg.search.tolerance, cfg.seed);
      }
      r.trial_seconds = seconds_since(t1);
    }
  } catch (const std::exception& e) {
    r.pass = false;
    r.error = e.what();
  }
  return r;
}

const char* kDomainHeader =
    "domain,beta,alpha,in_theorem_range,lambda1,lambda2,lambda3,lambda4,area,perimeter,lambda3_area,disk_bound,"
    "margin,ratio,convergence_estimate,trial_case,trial_residual,trial_converged,orth_f1,orth_f2,rayleigh,"
    "rayleigh_area,pass,error\n";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_domain_csv(std::ostream& out, const std::vector<Row>& rows) {
  out << kDomainHeader;
  for (const Row& r : rows) {
    out << csv_field(r.domain) << ',' << num(r.beta) << ',' << num(r.alpha) << ',' << in_theorem_range(r.beta);
    for (double l : r.lambdas) out << ',' << num(l);
    out << ',' << num(r.area) << ',' << num(r.perimeter) << ',' << num(r.lambda3_area) << ',' << num(r.disk_bound)
        << ',' << num(r.margin) << ',' << num(r.ratio) << ',' << num(r.convergence);
    if (r.has_trial)
      out << ',' << r.zero.case_tag() << ',' << num(r.zero.residual) << ',' << r.zero.converged << ','
          << num(r.orth_f1) << ',' << num(r.orth_f2) << ',' << num(r.rayleigh) << ',' << num(r.rayleigh_area);
    else
      out << ",,,,,,,";
    out << ',' << r.pass << ',' << csv_field(r.error) << '\n';
  }
}

json degree_json(const DegreeResult& d) {
  return {{"degree", d.value},
          {"degree_next", d.value_next},
          {"preimage_count", d.preimage_count},
          {"regular_value", {d.regular_value[0], d.regular_value[1], d.regular_value[2], d.regular_value[3]}},
          {"agreed", d.confident()},
          {"min_jacobian_margin", d.min_jacobian_margin}};
}

json row_json(const Row& r) {
  json j{{"domain", r.domain},
         {"beta", r.beta},
         {"alpha", r.alpha},
         {"in_theorem_range", in_theorem_range(r.beta)},
         {"lambdas", r.lambdas},
         {"area", r.area},
         {"perimeter", r.perimeter},
         {"lambda3_area", r.lambda3_area},
         {"disk_bound", r.disk_bound},
         {"margin", r.margin},
         {"ratio", r.ratio},
         {"convergence_estimate", r.convergence},
         {"pass", r.pass},
         {"solve_seconds", r.solve_seconds}};
  if (!r.error.empty()) j["error"] = r.error;
  if (r.has_trial) {
    const auto& p = r.zero.params;
    j["trial"] = {{"case", r.zero.case_tag()},
                  {"residual", r.zero.residual},
                  {"converged", r.zero.converged},
                  {"iterations", r.zero.iterations},
                  {"a", {p.a.real(), p.a.imag()}},
                  {"b", {p.b.real(), p.b.imag()}},
                  {"t", p.t},
                  {"orth_f1", r.orth_f1},
                  {"orth_f2", r.orth_f2},
                  {"rayleigh", r.rayleigh},
                  {"rayleigh_area", r.rayleigh_area},
                  {"seconds", r.trial_seconds}};
  }
  if (r.has_certificate) {
    const auto& c = r.certificate;
    json cj{{"zero_located", c.zero_located}, {"indeterminate", c.indeterminate}};
    if (c.zero_located)
      cj["zero"] = {{"x", {c.zero_point[0], c.zero_point[1], c.zero_point[2], c.zero_point[3]}}, {"t", c.zero_t}};
    else
      cj.update({{"W0", degree_json(c.w0)}, {"W1", degree_json(c.w1)}});
    j["certificate"] = cj;
  }
  return j;
}

// ---- degree rows -------------------------------------------------------

struct DegreeRow {
  std::string map_id;
  std::string expected;  // integer, or "sum0" for half-annulus pairs
  DegreeResult result;
  bool pass = false;
  std::string error;
};

void write_degree_csv(std::ostream& out, const std::vector<DegreeRow>& rows, int level) {
  out << "map_id,level,expected,degree,degree_next,preimage_count,y0,y1,y2,y3,agreed,pass,error\n";
  for (const auto& r : rows) {
    const auto& d = r.result;
    out << r.map_id << ',' << level << ',' << r.expected << ',' << d.value << ',' << d.value_next << ','
        << d.preimage_count;
    for (int k = 0; k < 4; ++k) out << ',' << num(d.regular_value[k]);
    out << ',' << d.confident() << ',' << r.pass << ',' << csv_field(r.error) << '\n';
  }
}

std::vector<DegreeRow> degree_rows(const ExperimentConfig& cfg) {
  const int level = cfg.degree.level;
  const std::uint64_t seed = cfg.seed;
  std::vector<DegreeRow> rows;
  auto add = [&](std::string id, int expected, const SphereMap& m) {
    DegreeRow r{std::move(id), std::to_string(expected), {}, false, {}};
    try {
      r.result = sphere_degree(m, level, seed);
      r.pass = r.result.confident() && r.result.value == expected;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    rows.push_back(std::move(r));
  };
  add("identity", 1, [](const Vec4& x) { return x; });
  add("constant", 0, [](const Vec4&) { return Vec4(1, 0, 0, 0); });
  add("reflection", -1, [](const Vec4& x) { return Vec4(x[0], -x[1], x[2], x[3]); });
  add("antipodal", 1, [](const Vec4& x) { return Vec4(-x); });
  for (int i = 1; i <= cfg.degree.refsym_maps; ++i) {
    const std::uint64_t s = seed * 1000 + i;
    const SphereMap phi = refsym_map(s, cfg.degree.amplitude);
    DegreeRow r{"refsym_" + std::to_string(i), "1", {}, false, {}};
    try {
      r.result = verify_refsym_degree(s, level, cfg.degree.amplitude);
      r.pass = r.result.confident() && r.result.value == 1;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    rows.push_back(std::move(r));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rad(0.6, 0.9), ang(0.15, pi / 2 - 0.15);
  for (int i = 1; i <= cfg.degree.half_annulus_maps; ++i) {
    const double r0 = rad(rng), th = ang(rng);
    const Vec4 zero(0.0, r0 * std::cos(th), 0.0, r0 * std::sin(th));
    const FieldMap phi = half_annulus_map(seed * 1000 + 500 + i, zero);
    DegreeRow up{"half_annulus_" + std::to_string(i) + "_upper", "sum0", {}, false, {}};
    DegreeRow lo{"half_annulus_" + std::to_string(i) + "_lower", "sum0", {}, false, {}};
    try {
      up.result = region_degree(phi, {Region::Kind::UpperHalfAnnulus}, level, seed);
      lo.result = region_degree(phi, {Region::Kind::LowerHalfAnnulus}, level, seed);
      const bool ok = up.result.value + lo.result.value == 0 && up.result.value_next + lo.result.value_next == 0;
      up.pass = lo.pass = ok;
    } catch (const std::exception& e) {
      up.error = lo.error = e.what();
    }
    rows.push_back(std::move(up));
    rows.push_back(std::move(lo));
  }
  return rows;
}

json degree_report(const std::vector<DegreeRow>& rows, int level) {
  json out = json::array();
  for (const auto& r : rows) {
    const auto& d = r.result;
    out.push_back({{"map_id", r.map_id},
                   {"level", level},
                   {"degree", d.value},
                   {"preimage_count", d.preimage_count},
                   {"regular_value", {d.regular_value[0], d.regular_value[1], d.regular_value[2], d.regular_value[3]}},
                   {"agreed", d.confident()}});
  }
  return out;
}

std::vector<double> parse_betas(const json& j) {
  std::vector<double> out;
  for (const auto& b : j) {
    const double v = b.get<double>();
    if (!in_theorem_range(v)) throw ConfigError("beta_grid entries must lie in [-1, 1]");
    out.push_back(v);
  }
  return out;
}

NamedDomain parse_domain(const json& j, std::size_t index) {
  NamedDomain d;
  d.name = j.value("name", "domain" + std::to_string(index));
  d.scale = j.value("scale", 1.0);
  for (const auto& c : j.value("coeffs", json::array())) {
    if (c.is_number())
      d.coeffs.emplace_back(c.get<double>(), 0.0);
    else if (c.is_array() && c.size() == 2)
      d.coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
    else
      throw ConfigError("coefficients must be numbers or [re, im] pairs");
  }
  try {
    (void)build_domain(d.coeffs, d.scale);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("domain " + d.name + ": " + e.what());
  }
  return d;
}

}  // namespace

Command parse_command(const std::string& name) {
  for (const auto& [c, n] : kCommands)
    if (n == name) return c;
  throw ConfigError("unknown command: " + name);
}

std::string command_name(Command c) {
  for (const auto& [k, n] : kCommands)
    if (k == c) return n;
  return "?";
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    cfg.command = parse_command(j.at("command").get<std::string>());
    if (j.contains("beta_grid")) cfg.beta_grid = parse_betas(j["beta_grid"]);
    cfg.extended_beta = j.value("extended_beta", false);
    if (j.contains("domains"))
      for (std::size_t i = 0; i < j["domains"].size(); ++i) cfg.domains.push_back(parse_domain(j["domains"][i], i));
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      cfg.solver.N = s.value("N", cfg.solver.N);
      cfg.solver.M = s.value("M", cfg.solver.M);
      cfg.solver.n_r = s.value("n_r", cfg.solver.n_r);
      cfg.solver.n_theta = s.value("n_theta", cfg.solver.n_theta);
    }
    try {
      validate(cfg.solver);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("solver: ") + e.what());
    }
    if (j.contains("search")) {
      const auto& s = j["search"];
      cfg.search.tolerance = s.value("tolerance", cfg.search.tolerance);
      cfg.search.starts = s.value("starts", cfg.search.starts);
      cfg.search.max_iterations = s.value("max_iterations", cfg.search.max_iterations);
    }
    if (j.contains("degree")) {
      const auto& d = j["degree"];
      cfg.degree.level = d.value("level", cfg.degree.level);
      cfg.degree.refsym_maps = d.value("refsym_maps", cfg.degree.refsym_maps);
      cfg.degree.amplitude = d.value("amplitude", cfg.degree.amplitude);
      cfg.degree.half_annulus_maps = d.value("half_annulus_maps", cfg.degree.half_annulus_maps);
      cfg.degree.certificate = d.value("certificate", cfg.degree.certificate);
      if (cfg.degree.level < 0 || cfg.degree.level > 5) throw ConfigError("degree.level must be in [0, 5]");
      if (!(cfg.degree.amplitude >= 0 && cfg.degree.amplitude < 0.5))
        throw ConfigError("degree.amplitude must be in [0, 0.5)");
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_path = j.value("output_path", cfg.output_path.string());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const bool domain_command = cfg.command != Command::DiskSpectrum && cfg.command != Command::DegreeCheck;
  if (domain_command && cfg.domains.empty()) throw ConfigError("command needs a nonempty domain list");
  return cfg;
}

std::vector<double> effective_betas(const ExperimentConfig& cfg) {
  std::vector<double> b = cfg.beta_grid;
  if (b.empty())
    for (int i = 0; i <= 20; ++i) b.push_back((i - 10) / 10.0);
  if (cfg.extended_beta)
    for (int i = 3; i <= 12; ++i) b.push_back(i / 2.0);
  return b;
}

int run(const ExperimentConfig& cfg, std::ostream& log) {
  std::filesystem::create_directories(cfg.output_path);
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const std::string cmd = command_name(cfg.command);
  json sidecar{{"command", cmd}, {"seed", cfg.seed}, {"started", started}};
  bool ok = true;

  if (cfg.command == Command::DiskSpectrum) {
    const auto betas = effective_betas(cfg);
    auto csv = open_out(cfg.output_path / "disk_spectrum.csv");
    csv << "beta,x,lambda1,lambda2,lambda3,lambda4\n";
    json rows = json::array();
    for (double beta : betas) {
      const auto mode = disk_lambda2(beta);
      const auto tab = disk_lambda_table(beta);
      csv << num(beta) << ',' << num(mode.x);
      for (double l : tab) csv << ',' << num(l);
      csv << '\n';
      rows.push_back({{"beta", beta}, {"x", mode.x}, {"lambdas", tab}, {"in_theorem_range", in_theorem_range(beta)}});
    }
    auto prof = open_out(cfg.output_path / "disk_profile.csv");
    write_profile_csv(prof, betas);
    sidecar["rows"] = rows;
  } else if (cfg.command == Command::DegreeCheck) {
    const auto rows = degree_rows(cfg);
    auto csv = open_out(cfg.output_path / "degree.csv");
    write_degree_csv(csv, rows, cfg.degree.level);
    auto rep = open_out(cfg.output_path / "degree_report.json");
    rep << degree_report(rows, cfg.degree.level).dump(2) << '\n';
    for (const auto& r : rows) {
      ok = ok && r.pass;
      if (!r.pass) log << "degree-check: " << r.map_id << " failed " << r.error << '\n';
    }
    if (cfg.degree.certificate && !cfg.domains.empty()) {
      ExperimentConfig c2 = cfg;
      c2.command = Command::DomainSpectrum;
      json certs = json::array();
      for (const auto& d : cfg.domains)
        for (double beta : effective_betas(cfg)) certs.push_back(row_json(compute_row(c2, d, beta)));
      sidecar["certificates"] = certs;
    }
  } else {
    const auto betas = effective_betas(cfg);
    std::vector<std::pair<std::size_t, double>> cases;
    for (std::size_t d = 0; d < cfg.domains.size(); ++d)
      for (double b : betas) cases.emplace_back(d, b);
    std::vector<Row> rows(cases.size());
    parallel_for(static_cast<int>(cases.size()), std::max(1, cfg.jobs), [&](int i) {
      rows[i] = compute_row(cfg, cfg.domains[cases[i].first], cases[i].second);
    });
    auto csv = open_out(cfg.output_path / "results.csv");
    write_domain_csv(csv, rows);
    json jr = json::array();
    for (const auto& r : rows) {
      jr.push_back(row_json(r));
      // rows outside the theorem range are exploratory and never fail the run
      if (!r.pass && (in_theorem_range(r.beta) || !r.error.empty())) {
        ok = false;
        log << cmd << ": " << r.domain << " beta=" << num(r.beta) << " failed" << (r.error.empty() ? "" : ": ")
            << r.error << '\n';
      }
    }
    sidecar["rows"] = jr;
  }
  sidecar["finished"] = utc_now();
  sidecar["seconds"] = seconds_since(t0);
  sidecar["all_passed"] = ok;
  auto side = open_out(cfg.output_path / (cmd + ".json"));
  side << sidecar.dump(2) << '\n';
  return ok ? 0 : 2;
}

}  // namespace robin3::cli
