#include "experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "orlicz/orlicz.hpp"

namespace orlicz::tools {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- parameters

double num(const json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  require(p.at(key).is_number(), ErrorKind::kValidation, std::string("parameter '") + key + "' must be a number");
  return p.at(key).get<double>();
}

std::size_t count(const json& p, const char* key, std::size_t fallback) {
  if (!p.contains(key)) return fallback;
  const auto& v = p.at(key);
  require(v.is_number_unsigned() || (v.is_number() && v.get<double>() >= 0.0 && std::floor(v.get<double>()) == v.get<double>()),
          ErrorKind::kValidation, std::string("parameter '") + key + "' must be a non-negative integer");
  return v.is_number_unsigned() ? v.get<std::size_t>() : std::size_t(v.get<double>());
}

const json& need(const json& p, const char* key) {
  require(p.contains(key), ErrorKind::kValidation, std::string("missing parameter '") + key + "'");
  return p.at(key);
}

// An explicit array, or {"min", "max", "points", "spacing": "log"|"linear"}.
std::vector<double> grid_param(const json& p, const char* key, double lo, double hi, std::size_t n, bool log) {
  if (!p.contains(key)) return log ? log_spaced(lo, hi, n) : linear_spaced(lo, hi, n);
  const auto& g = p.at(key);
  if (g.is_array()) {
    auto v = g.get<std::vector<double>>();
    require(v.size() >= 2, ErrorKind::kValidation, std::string("grid '") + key + "' needs two points");
    for (std::size_t i = 1; i < v.size(); ++i)
      require(v[i] > v[i - 1], ErrorKind::kValidation, std::string("grid '") + key + "' must increase");
    return v;
  }
  const double a = num(g, "min", lo), b = num(g, "max", hi);
  const std::size_t k = count(g, "points", n);
  const bool lg = g.value("spacing", log ? "log" : "linear") == "log";
  return lg ? log_spaced(a, b, k) : linear_spaced(a, b, k);
}

std::vector<json> one_or_many(const json& p, const char* many, const char* one) {
  std::vector<json> out;
  if (p.contains(many)) {
    require(p.at(many).is_array() && !p.at(many).empty(), ErrorKind::kValidation,
            std::string("'") + many + "' must be a non-empty array");
    for (const auto& c : p.at(many)) out.push_back(c);
  } else if (p.contains(one)) {
    out.push_back(p.at(one));
  }
  return out;
}

void check_budget(std::size_t used, std::size_t limit, const std::string& what) {
  if (limit != 0 && used > limit)
    fail(ErrorKind::kBudget, what + " " + std::to_string(used) + " exceeds the budget of " + std::to_string(limit));
}

double rel_error(double got, double want) { return std::abs(got / want - 1.0); }

// W(z) for the conjugate and norm kinds.
struct WSpec {
  std::string kind = "power";  // power: s z^a; exp: s e^{r z}; file: CSV written by write_grid_function
  double exponent = 2.0;
  double rate = 1.0;
  double scale = 1.0;
  fs::path file;
  std::vector<double> z;

  static WSpec parse(const json& j, const json& z_parent, double z_lo, double z_hi, std::size_t n) {
    WSpec w;
    w.kind = j.value("kind", "power");
    w.scale = num(j, "scale", 1.0);
    if (w.kind == "power") {
      w.exponent = num(j, "exponent", 2.0);
      require(w.exponent > 1.0, ErrorKind::kValidation, "power W needs exponent > 1");
    } else if (w.kind == "exp") {
      w.rate = num(j, "rate", 1.0);
      require(w.rate > 0.0, ErrorKind::kValidation, "exp W needs rate > 0");
    } else if (w.kind == "file") {
      w.file = need(j, "path").get<std::string>();
    } else {
      fail(ErrorKind::kValidation, "unknown W kind '" + w.kind + "'");
    }
    require(w.scale > 0.0, ErrorKind::kValidation, "W scale must be positive");
    if (w.kind != "file") {
      w.z = grid_param(z_parent, "z", z_lo, z_hi, n, false);
      if (w.kind == "power") require(w.z.front() >= 0.0, ErrorKind::kValidation, "power W needs z >= 0");
    }
    return w;
  }

  double operator()(double z) const {
    return kind == "power" ? scale * std::pow(z, exponent) : scale * std::exp(rate * z);
  }

  GridFunction build() const {
    if (kind == "file") return read_grid_function(file);
    return tabulate([this](double z) { return (*this)(z); }, z);
  }

  std::size_t points() const { return z.size(); }

  // Conjugate of W restricted to [z_0, z_1]; empty when the maximizer leaves the window.
  std::optional<double> exact_conjugate(double p) const {
    if (kind == "file") return std::nullopt;
    double zs = kind == "power" ? std::pow(p / (scale * exponent), 1.0 / (exponent - 1.0))
                                : std::log(p / (scale * rate)) / rate;
    if (zs > z.back()) return std::nullopt;
    zs = std::max(zs, z.front());
    return p * zs - (*this)(zs);
  }

  json describe() const {
    json j = {{"kind", kind}, {"scale", scale}};
    if (kind == "power") j["exponent"] = exponent;
    if (kind == "exp") j["rate"] = rate;
    if (kind == "file") j["path"] = file.string();
    return j;
  }
};

// A case draws from a generator or loads a file.
struct SampleSource {
  std::optional<GeneratorSpec> generator;
  fs::path file;

  static SampleSource parse(const json& c) {
    SampleSource s;
    if (c.contains("sample_file")) {
      s.file = c.at("sample_file").get<std::string>();
    } else {
      s.generator = generator_from_json(need(c, "generator"));
    }
    return s;
  }
  Sample load(std::size_t n, const SeedSpec& seed) const {
    return generator ? generate(*generator, n, seed) : read_sample(file);
  }
  std::size_t draws(std::size_t n) const { return generator ? n : 0; }
  json describe() const { return generator ? generator_to_json(*generator) : json{{"sample_file", file.string()}}; }
};

TailModel parse_model(const json& p) {
  const std::string m = p.value("model", "weibull");
  if (m == "weibull") return TailModel::kWeibull;
  if (m == "loglog") return TailModel::kLogLog;
  fail(ErrorKind::kValidation, "unknown tail model '" + m + "'");
}

struct FitWindow {
  TailModel model = TailModel::kWeibull;
  double q_lo = default_config().fit_q_lo;
  double q_hi = default_config().fit_q_hi;
  static FitWindow parse(const json& p) {
    FitWindow w;
    w.model = parse_model(p);
    w.q_lo = num(p, "q_lo", w.q_lo);
    w.q_hi = num(p, "q_hi", w.q_hi);
    require(w.q_lo > 0.0 && w.q_hi > w.q_lo && w.q_hi < 1.0, ErrorKind::kValidation, "fit window needs 0 < q_lo < q_hi < 1");
    return w;
  }
  TailFit fit(const Sample& s) const { return tail_exponent_fit(s.values(), model, q_lo, q_hi); }
};

void append_tail_rows(Table& t, double case_index, const TailFit& fit) {
  for (std::size_t i = 0; i < fit.u.size(); ++i) {
    const double x = fit.model == "loglog" ? std::log(std::log(fit.u[i])) : std::log(fit.u[i]);
    t.rows.push_back({case_index, fit.u[i], fit.tail[i], std::exp(-std::exp(fit.intercept + fit.slope * x))});
  }
}

Table tail_table() { return {"tail.csv", {"case", "u", "tail", "fitted_tail"}, {}}; }

// ---------------------------------------------------------------- kinds

using Runner = std::function<Outcome()>;

Runner prepare_conjugate(const ExperimentConfig& cfg) {
  const json& p = cfg.parameters;
  if (p.contains("psi") || p.contains("cases")) {
    // psi -> W -> psi round trips; each case carries its own z and p grids.
    struct Case {
      PsiSpec psi;
      std::vector<double> z, p_dense, p_check;
    };
    std::vector<Case> cases;
    std::vector<json> raw = one_or_many(p, "cases", "psi");
    if (!p.contains("cases")) raw = {p};
    std::size_t largest = 0;
    for (const auto& c : raw) {
      need(c, "z");
      Case k{psi_from_json(need(c, "psi")), grid_param(c, "z", 0.0, 1.0, 2, false),
             grid_param(c, "p_dense", 2.0, default_config().p_max, default_config().grid_points, true),
             grid_param(c, "p", 2.0, 100.0, 400, true)};
      largest = std::max({largest, k.z.size(), k.p_dense.size(), k.p_check.size()});
      cases.push_back(std::move(k));
    }
    check_budget(largest, cfg.budget.max_grid, "grid size");
    return [cases] {
      Outcome o;
      Table t{"psi.csv", {"case", "p", "psi", "psi_round_trip"}, {}};
      Table wt{"w.csv", {"case", "z", "w"}, {}};
      double worst = 0.0, werr = 0.0;
      bool closed_form = false;
      json out = json::array();
      for (std::size_t c = 0; c < cases.size(); ++c) {
        const auto& [psi, z, p_dense, p_check] = cases[c];
        const auto w = w_from_psi(psi, z, p_dense);
        const auto back = psi_from_w(w, p_check);
        double case_worst = 0.0;
        for (double q : p_check) {
          case_worst = std::max(case_worst, rel_error(back(q), psi(q)));
          t.rows.push_back({double(c), q, psi(q), back(q)});
        }
        worst = std::max(worst, case_worst);
        for (std::size_t i = 0; i < z.size(); ++i) wt.rows.push_back({double(c), z[i], w.values()[i]});
        json cj = {{"psi", psi_to_json(psi)}, {"w_convex", is_convex(w)}, {"round_trip_rel_error", case_worst}};
        if (const auto* mr = std::get_if<MrPsi>(&psi.kind()); mr && mr->r == 0.0 && psi.factor() == 1.0) {
          // W = e^{mz-1}/m wherever the maximizer e^{mz-1} sits inside the p-grid.
          double e = 0.0;
          for (std::size_t i = 0; i < z.size(); ++i) {
            const double ps = std::exp(mr->m * z[i] - 1.0);
            if (ps <= p_dense.front() * 1.025 || ps >= p_dense.back() / 1.05) continue;
            e = std::max(e, rel_error(w.values()[i], ps / mr->m));
          }
          closed_form = true;
          werr = std::max(werr, e);
          cj["w_closed_form_rel_error"] = e;
        }
        out.push_back(std::move(cj));
      }
      o.metrics["round_trip_rel_error"] = worst;
      if (closed_form) o.metrics["w_closed_form_rel_error"] = werr;
      o.results["cases"] = std::move(out);
      o.tables = {std::move(wt), std::move(t)};
      return o;
    };
  }
  const auto w = WSpec::parse(p.value("w", json::object()), p, 2.0, 50.0, 100000);
  const auto dual = grid_param(p, "p", 2.0, 96.0, 2000, false);
  check_budget(std::max(w.points(), dual.size()), cfg.budget.max_grid, "grid size");
  return [w, dual] {
    Outcome o;
    const auto f = w.build();
    const auto conj = fenchel_conjugate(f, dual);
    Table t{"conjugate.csv", {"p", "conjugate", "maximizer_z"}, {}};
    double worst = 0.0;
    bool have_exact = w.kind != "file";
    for (std::size_t i = 0; i < dual.size(); ++i) {
      t.rows.push_back({dual[i], conj.conjugate.values()[i], conj.maximizer_z[i]});
      if (!have_exact) continue;
      const auto ex = w.exact_conjugate(dual[i]);
      if (!ex) {
        have_exact = false;
        continue;
      }
      worst = std::max(worst, std::abs(conj.conjugate.values()[i] - *ex) / std::max(1.0, std::abs(*ex)));
    }
    o.metrics["biconjugate_residual"] = biconjugate_residual(f);
    if (have_exact) o.metrics["max_rel_error"] = worst;
    o.metrics["convex"] = is_convex(f);
    o.results = {{"w", w.describe()}, {"grid_points", f.size()}};
    o.tables = {std::move(t)};
    return o;
  };
}

Runner prepare_norm(const ExperimentConfig& cfg) {
  const json& p = cfg.parameters;
  const std::size_t n = count(p, "n", 1000000);
  require(n >= 2, ErrorKind::kValidation, "norm experiment needs n >= 2");
  std::optional<WSpec> w;
  if (p.contains("n_function")) {
    const auto& nf = p.at("n_function");
    w = WSpec::parse(nf.value("w", json::object()), nf, 0.0, 40.0, 40001);
  }
  const auto psi_grid = grid_param(p, "psi_grid", 2.0, 1000.0, 2000, true);
  const auto pg = grid_param(p, "p", 2.0, 2.0 * std::log2(double(n)), 32, true);
  struct Case {
    SampleSource src;
    std::optional<PsiSpec> psi;  // empty: derived from the N-function
    std::string expect;
  };
  std::vector<Case> cases;
  std::vector<json> raw = one_or_many(p, "cases", "case");
  if (raw.empty()) raw.push_back(p);
  std::size_t draws = 0;
  for (const auto& c : raw) {
    Case k{SampleSource::parse(c), std::nullopt, c.value("expect_trend", "")};
    const json psi_j = c.contains("psi") ? c.at("psi") : p.value("psi", json());
    if (!psi_j.is_null()) k.psi = psi_from_json(psi_j);
    require(k.psi || w, ErrorKind::kValidation, "a case needs psi or an n_function to derive it from");
    if (!k.expect.empty())
      require(k.expect == "decreasing" || k.expect == "plateau" || k.expect == "growing" || k.expect == "inconclusive",
              ErrorKind::kValidation, "unknown expect_trend '" + k.expect + "'");
    draws += k.src.draws(n);
    cases.push_back(std::move(k));
  }
  check_budget(draws, cfg.budget.max_samples, "sample draws");
  if (w) check_budget(w->points(), cfg.budget.max_grid, "grid size");
  const std::uint64_t seed = cfg.seed;
  return [=] {
    Outcome o;
    std::optional<NFunctionSpec> n_fn;
    std::optional<PsiSpec> derived;
    if (w) {
      const auto f = w->build();
      n_fn = n_from_w(f);
      derived = psi_from_w(f, psi_grid);
      o.results["n_function"] = {{"w", w->describe()}, {"convex", n_fn->convex()}};
    }
    Table t{"moments.csv", {"case", "p", "lp", "ess", "reliable", "ratio_to_psi"}, {}};
    json cases_out = json::array();
    double lo = INFINITY, hi = 0.0;
    std::size_t mismatches = 0;
    bool any_expect = false;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto& c = cases[i];
      const auto s = c.src.load(n, {seed, i});
      const auto curve = moment_curve(s, pg);
      const PsiSpec psi = c.psi ? *c.psi : *derived;
      auto rep = gpsi_norm(curve, psi);
      const auto trend = g0_membership(curve, psi);
      json cj = {{"source", c.src.describe()}, {"psi", psi_to_json(psi)}, {"n", s.size()}, {"trend", trend_to_json(trend)}};
      if (n_fn) {
        rep.luxemburg_norm = luxemburg_norm(s, *n_fn);
        const double ratio = *rep.luxemburg_norm / rep.gpsi_norm;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        cj["luxemburg_over_gpsi"] = ratio;
      }
      cj["norm"] = norm_report_to_json(rep);
      if (!c.expect.empty()) {
        any_expect = true;
        const bool ok = to_string(trend.verdict) == c.expect;
        mismatches += ok ? 0 : 1;
        cj["expect_trend"] = c.expect;
      }
      for (std::size_t j = 0; j < pg.size(); ++j)
        t.rows.push_back({double(i), pg[j], curve.lp_values[j], curve.ess[j], curve.reliable[j] ? 1.0 : 0.0,
                          curve.lp_values[j] / psi(pg[j])});
      if (i == 0) {
        o.metrics["gpsi_norm"] = rep.gpsi_norm;
        o.metrics["argmax_p"] = rep.argmax_p;
        o.metrics["trend"] = std::string(to_string(trend.verdict));
        o.metrics["trend_slope"] = trend.slope;
        if (rep.luxemburg_norm) o.metrics["luxemburg_norm"] = *rep.luxemburg_norm;
      }
      cases_out.push_back(std::move(cj));
    }
    if (n_fn) {
      o.metrics["ratio_min"] = lo;
      o.metrics["ratio_max"] = hi;
      o.metrics["ratio_band"] = hi / lo;
    }
    if (any_expect) o.metrics["trend_mismatches"] = mismatches;
    o.metrics["cases"] = cases.size();
    o.results["cases"] = std::move(cases_out);
    o.tables = {std::move(t)};
    return o;
  };
}

Runner prepare_tailfit(const ExperimentConfig& cfg) {
  const json& p = cfg.parameters;
  const std::size_t n = count(p, "n", 10000000);
  const auto window = FitWindow::parse(p);
  struct Case {
    SampleSource src;
    std::optional<double> expected;
  };
  std::vector<Case> cases;
  std::vector<json> raw = one_or_many(p, "cases", "case");
  if (raw.empty()) raw.push_back(p);
  std::size_t draws = 0;
  for (const auto& c : raw) {
    Case k{SampleSource::parse(c), std::nullopt};
    if (c.contains("expected")) k.expected = num(c, "expected", 0.0);
    draws += k.src.draws(n);
    cases.push_back(std::move(k));
  }
  check_budget(draws, cfg.budget.max_samples, "sample draws");
  const std::uint64_t seed = cfg.seed;
  return [=] {
    Outcome o;
    auto t = tail_table();
    json out = json::array();
    double worst = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto fit = window.fit(cases[i].src.load(n, {seed, i}));
      json cj = {{"source", cases[i].src.describe()}, {"fit", tail_fit_to_json(fit)}};
      if (cases[i].expected) {
        any = true;
        const double e = rel_error(fit.slope, *cases[i].expected);
        worst = std::max(worst, e);
        cj["expected"] = *cases[i].expected;
        cj["rel_error"] = e;
      }
      if (i == 0) o.metrics["slope"] = fit.slope;
      append_tail_rows(t, double(i), fit);
      out.push_back(std::move(cj));
    }
    if (any) o.metrics["max_rel_error"] = worst;
    o.results["cases"] = std::move(out);
    o.tables = {std::move(t)};
    return o;
  };
}

Runner prepare_rademacher(const ExperimentConfig& cfg) {
  const json& p = cfg.parameters;
  const std::size_t n = count(p, "n", 1000000);
  const auto window = FitWindow::parse(p);
  std::vector<double> bs;
  const auto& bj = need(p, "B");
  if (bj.is_array())
    bs = bj.get<std::vector<double>>();
  else
    bs = {num(p, "B", 0.0)};
  std::vector<RademacherSeriesSpec> specs;
  for (double b : bs) {
    RademacherSeriesSpec s;
    s.b = b;
    s.k = count(p, "K", 10000);
    if (p.contains("L")) s.l = slowly_varying_from_json(p.at("L"));
    s.validate();
    specs.push_back(s);
  }
  check_budget(n * specs.size(), cfg.budget.max_samples, "sample draws");
  const std::uint64_t seed = cfg.seed;
  return [=] {
    Outcome o;
    auto t = tail_table();
    json out = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto& s = specs[i];
      const auto fit = window.fit(sample_rademacher_series(s, n, {seed, i}));
      const auto target = rademacher_tail_exponent(s);
      const double e = rel_error(fit.slope, target.exponent);
      worst = std::max(worst, e);
      if (i == 0) {
        o.metrics["fitted_exponent"] = fit.slope;
        o.metrics["target_exponent"] = target.exponent;
        o.metrics["variance"] = rademacher_variance(s);
        o.metrics["truncation_variance"] = rademacher_truncation_variance(s);
      }
      out.push_back({{"generator", generator_to_json(s)},
                     {"fit", tail_fit_to_json(fit)},
                     {"target_exponent", target.exponent},
                     {"rel_error", e},
                     {"variance", rademacher_variance(s)},
                     {"truncation_variance", rademacher_truncation_variance(s)}});
      append_tail_rows(t, double(i), fit);
    }
    o.metrics["max_rel_error"] = worst;
    o.results["cases"] = std::move(out);
    o.tables = {std::move(t)};
    return o;
  };
}

Runner prepare_product(const ExperimentConfig& cfg) {
  const json& p = cfg.parameters;
  const std::size_t n = count(p, "n", 10000000);
  const auto window = FitWindow::parse(p);
  struct Case {
    ProductSpec spec;
    std::optional<double> expected;
  };
  std::vector<Case> cases;
  std::vector<json> raw = one_or_many(p, "cases", "case");
  if (raw.empty()) raw.push_back(p);
  for (const auto& c : raw) {
    const auto g = generator_from_json({{"kind", "product"}, {"parameters", {{"xi", need(c, "xi")}, {"eta", need(c, "eta")}}}});
    Case k{std::get<ProductSpec>(g), std::nullopt};
    if (c.contains("expected"))
      k.expected = num(c, "expected", 0.0);
    else if (k.spec.xi.l.is_constant() && k.spec.eta.l.is_constant())
      k.expected = k.spec.xi.m * k.spec.eta.m / (k.spec.xi.m + k.spec.eta.m);
    cases.push_back(std::move(k));
  }
  check_budget(2 * n * cases.size(), cfg.budget.max_samples, "sample draws");
  const std::uint64_t seed = cfg.seed;
  return [=] {
    Outcome o;
    auto t = tail_table();
    json out = json::array();
    double worst = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto& c = cases[i];
      const auto fit = window.fit(sample_product(c.spec.xi, c.spec.eta, n, {seed, i}));
      json cj = {{"generator", generator_to_json(c.spec)}, {"fit", tail_fit_to_json(fit)}};
      if (c.expected) {
        any = true;
        const double e = rel_error(fit.slope, *c.expected);
        worst = std::max(worst, e);
        cj["expected_exponent"] = *c.expected;
        cj["rel_error"] = e;
      }
      if (i == 0) {
        o.metrics["fitted_exponent"] = fit.slope;
        if (c.expected) o.metrics["expected_exponent"] = *c.expected;
      }
      append_tail_rows(t, double(i), fit);
      out.push_back(std::move(cj));
    }
    if (any) o.metrics["max_rel_error"] = worst;
    o.results["cases"] = std::move(out);
    o.tables = {std::move(t)};
    return o;
  };
}

std::size_t signal_size(const json& p, const Budget& budget, std::size_t factor) {
  const std::size_t grid = count(p, "grid", std::size_t(1) << 20);
  require(grid >= 8 && (grid & (grid - 1)) == 0, ErrorKind::kValidation, "grid must be a power of two >= 8");
  check_budget(grid * factor, budget.max_grid, "grid size");
  return grid;
}

Runner prepare_hilbert(const ExperimentConfig& cfg) {
  const json& p = cfg.parameters;
  const double m = num(p, "m", 1.0);
  require(m > 0.0, ErrorKind::kValidation, "hilbert experiment needs m > 0");
  const std::size_t grid = signal_size(p, cfg.budget, 2);
  return [=] {
    Outcome o;
    const auto rep = lemma1_experiment(m, grid);
    const auto g = gm_signal(m, grid);
    const double target = m / (m + 1.0);
    o.metrics["tail_slope"] = rep.tail_slope;
    o.metrics["tail_slope_refined"] = rep.tail_slope_refined;
    o.metrics["target_slope"] = target;
    o.metrics["abs_error"] = std::abs(rep.tail_slope - target);
    o.metrics["drift"] = std::abs(rep.tail_slope_refined - rep.tail_slope) / std::abs(rep.tail_slope);
    o.metrics["band"] = rep.band;
    o.metrics["band_refined"] = rep.band_refined;
    o.metrics["unresolved"] = rep.unresolved;
    o.metrics["parseval_defect"] = parseval_defect(g);
    o.metrics["isometry_defect"] = hilbert_isometry_defect(g);
    o.results = {{"m", m},
                 {"grid", grid},
                 {"x_lo", rep.x_lo},
                 {"x_hi", rep.x_hi},
                 {"tail_stderr", rep.tail_stderr},
                 {"gm_tail_slope", rep.gm_tail_slope},
                 {"tail_fit", tail_fit_to_json(rep.tail_fit)}};
    auto t = tail_table();
    append_tail_rows(t, 0.0, rep.tail_fit);
    o.tables = {std::move(t)};
    return o;
  };
}

std::vector<std::size_t> n_set_param(const json& p, int lo, int hi) {
  std::vector<std::size_t> out;
  if (p.contains("n_set") && p.at("n_set").is_array()) {
    out = p.at("n_set").get<std::vector<std::size_t>>();
  } else {
    const json r = p.value("n_set", json::object());
    const int a = int(num(r, "min_log2", lo)), b = int(num(r, "max_log2", hi));
    require(a >= 0 && b >= a && b < 63, ErrorKind::kValidation, "n_set log2 range is invalid");
    for (int e = a; e <= b; ++e) out.push_back(std::size_t(1) << e);
  }
  require(!out.empty(), ErrorKind::kValidation, "n_set is empty");
  return out;
}

Runner prepare_fourier(const ExperimentConfig& cfg) {
  const json& p = cfg.parameters;
  const std::string mode = p.value("mode", "riesz");
  const std::size_t grid = signal_size(p, cfg.budget, 1);
  const auto pg = grid_param(p, "p", 2.0, 64.0, mode == "riesz" ? 16 : 24, true);
  if (mode == "riesz") {
    const double m = num(p, "m", 1.0);
    require(m > 0.0, ErrorKind::kValidation, "fourier experiment needs m > 0");
    const auto ns = n_set_param(p, 4, 12);
    for (auto k : ns) require(2 * k < grid, ErrorKind::kValidation, "every N must be below grid/2");
    return [=] {
      Outcome o;
      const auto g = gm_signal(m, grid);
      const auto fit = riesz_growth_fit(g, pg, ns);
      o.metrics["riesz_slope"] = fit.a;
      o.metrics["single_c"] = fit.single_c;
      o.metrics["parseval_defect"] = parseval_defect(g);
      o.metrics["isometry_defect"] = hilbert_isometry_defect(g);
      o.results = {{"m", m}, {"grid", grid}, {"n_set", ns}, {"fit_constant", fit.c}};
      Table t{"riesz.csv", {"p", "ratio", "residual"}, {}};
      for (std::size_t j = 0; j < fit.p.size(); ++j) t.rows.push_back({fit.p[j], fit.ratio[j], fit.residuals[j]});
      o.tables = {std::move(t)};
      return o;
    };
  }
  require(mode == "nonconvergence", ErrorKind::kValidation, "fourier mode must be riesz or nonconvergence");
  std::vector<double> ms;
  if (p.contains("m") && p.at("m").is_array())
    ms = p.at("m").get<std::vector<double>>();
  else
    ms = {num(p, "m", 1.0)};
  for (double m : ms) require(m > 0.0, ErrorKind::kValidation, "fourier experiment needs m > 0");
  const auto ns = n_set_param(p, 2, 14);
  for (auto k : ns) require(2 * k < grid, ErrorKind::kValidation, "every N must be below grid/2");
  return [=] {
    Outcome o;
    Table t{"residuals.csv", {"m", "n", "gpsi_residual", "l2_residual"}, {}};
    double min_ratio = INFINITY, min_drop = INFINITY;
    json out = json::array();
    for (double m : ms) {
      const auto rep = nonconvergence_experiment(m, grid, ns, pg);
      const double ratio = rep.gpsi_residual.back() / rep.gpsi_residual.front();
      const double drop = rep.l2_residual.front() / rep.l2_residual.back();
      min_ratio = std::min(min_ratio, ratio);
      min_drop = std::min(min_drop, drop);
      for (std::size_t i = 0; i < rep.n_set.size(); ++i)
        t.rows.push_back({m, double(rep.n_set[i]), rep.gpsi_residual[i], rep.l2_residual[i]});
      out.push_back({{"m", m}, {"gpsi_final_over_initial", ratio}, {"l2_drop", drop}});
    }
    o.metrics["min_gpsi_final_over_initial"] = min_ratio;
    o.metrics["min_l2_drop"] = min_drop;
    o.results = {{"grid", grid}, {"n_set", ns}, {"cases", out}};
    o.tables = {std::move(t)};
    return o;
  };
}

Runner prepare_martingale(const ExperimentConfig& cfg, const fs::path& dir) {
  const json& p = cfg.parameters;
  const auto spec = martingale_spec_from_json(need(p, "spec"));
  const std::size_t paths = count(p, "paths", 10000);
  require(paths >= 2, ErrorKind::kValidation, "martingale experiment needs at least two paths");
  std::vector<std::size_t> cps;
  if (p.contains("checkpoints")) {
    cps = p.at("checkpoints").get<std::vector<std::size_t>>();
  } else {
    for (std::size_t n = 2; n <= spec.n_max; n *= 2) cps.push_back(n);
  }
  require(!cps.empty(), ErrorKind::kValidation, "no checkpoints");
  for (std::size_t i = 0; i < cps.size(); ++i) {
    require(cps[i] >= 2 && cps[i] <= spec.n_max, ErrorKind::kValidation, "checkpoints must lie in [2, n_max]");
    if (i > 0) require(cps[i] > cps[i - 1], ErrorKind::kValidation, "checkpoints must increase");
  }
  const auto psi = psi_from_json(need(p, "psi"));
  std::vector<PsiSpec> nus;
  if (const auto& nj = need(p, "nu"); nj.is_array())
    for (const auto& x : nj) nus.push_back(psi_from_json(x));
  else
    nus.push_back(psi_from_json(nj));
  require(!nus.empty(), ErrorKind::kValidation, "'nu' is empty");
  const std::vector<double> pg = p.contains("p") ? grid_param(p, "p", 2.0, 64.0, 24, true) : std::vector<double>{};
  std::optional<std::pair<MartingaleSpec, std::size_t>> moment;
  if (p.contains("moment_check")) {
    const auto& mc = p.at("moment_check");
    moment.emplace(martingale_spec_from_json(need(mc, "spec")), count(mc, "paths", paths));
  }
  const bool save = p.value("save_paths", false);
  check_budget(paths * spec.n_max + (moment ? moment->second * moment->first.n_max : 0), cfg.budget.max_samples,
               "path steps");
  const std::uint64_t seed = cfg.seed;
  return [=] {
    Outcome o;
    const auto pc = simulate(spec, paths, {seed, 0}, cps);
    if (save) write_paths(dir / "paths", pc);
    if (pc.partial)
      fail(ErrorKind::kBudget, "max_work cut the horizon at n = " + std::to_string(pc.horizon) + " of " +
                                   std::to_string(spec.n_max));
    json reports = json::array();
    for (std::size_t i = 0; i < nus.size(); ++i) {
      const auto rep = convergence_diagnostic(pc, psi, nus[i], cps, pg);
      std::size_t violations = 0;
      for (const auto& r : rep.rows) violations += r.bound >= r.empirical_norm ? 0 : 1;
      const std::string sfx = "_nu" + std::to_string(i);
      o.metrics["final_over_initial" + sfx] = rep.final_over_initial;
      o.metrics["bound_violations" + sfx] = violations;
      o.metrics["verdict" + sfx] = rep.verdict;
      if (i == 0) {
        o.metrics["k_estimate"] = rep.k_estimate;
        o.metrics["doob_ok"] = rep.doob_ok;
        o.metrics["wide_error"] = rep.wide_error;
      }
      reports.push_back({{"nu", psi_to_json(nus[i])}, {"diagnostic", convergence_to_json(rep)}});
      Table t{"diagnostic" + sfx + ".csv", {"checkpoint", "gamma_n", "empirical_norm", "bound"}, {}};
      for (const auto& r : rep.rows) t.rows.push_back({double(r.n), r.gamma_n, r.empirical_norm, r.bound});
      o.tables.push_back(std::move(t));
    }
    o.results = {{"spec", martingale_spec_to_json(spec)},
                 {"psi", psi_to_json(psi)},
                 {"paths", paths},
                 {"checkpoints", cps},
                 {"tail_variance", pc.tail_variance},
                 {"reports", std::move(reports)}};
    if (moment) {
      const auto& [mspec, mpaths] = *moment;
      const std::vector<std::size_t> last = {mspec.n_max};
      const auto mc = simulate(mspec, mpaths, {seed, 1}, last);
      if (mc.partial) fail(ErrorKind::kBudget, "max_work cut the moment-check horizon");
      std::vector<double> s2(mpaths), s4(mpaths);
      for (std::size_t i = 0; i < mpaths; ++i) {
        const double v = mc.paths[i].values.back();
        s2[i] = v * v;
        s4[i] = s2[i] * s2[i];
      }
      const double mean2 = pairwise_sum(s2) / double(mpaths);
      const double var2 = pairwise_sum(s4) / double(mpaths) - mean2 * mean2;
      const double oracle = second_moment(mspec, mspec.n_max);
      const double z = std::abs(mean2 - oracle) / std::sqrt(var2 / double(mpaths));
      o.metrics["moment_check_z"] = z;
      o.results["moment_check"] = {{"spec", martingale_spec_to_json(mspec)},
                                   {"paths", mpaths},
                                   {"empirical_second_moment", mean2},
                                   {"oracle_second_moment", oracle}};
    }
    if (save) o.results["paths_manifest"] = "paths.json";
    return o;
  };
}

// Dense log-scan of the R objective over beta in [1 + 1e-3, 1e3].
double r_dense_scan(double delta, double p, const PsiSpec& psi, std::size_t points) {
  const double a = std::log(1.0 + 1e-3), b = std::log(1e3);
  double best = INFINITY;
  for (std::size_t i = 0; i < points; ++i) {
    const double beta = std::exp(a + (b - a) * double(i) / double(points - 1));
    const double q = beta / (beta - 1.0) * p;
    if (q > psi.max_p()) continue;
    const double pb = p * beta;
    best = std::min(best, 2.0 / (pb + 2.0) * std::log(delta) + pb / (pb + 2.0) * psi.log_value(q));
  }
  return std::exp(best);
}

Runner prepare_bound(const ExperimentConfig& cfg) {
  const json& p = cfg.parameters;
  struct Case {
    double delta, p;
    PsiSpec psi;
  };
  std::vector<Case> cases;
  if (p.contains("cases")) {
    for (const auto& c : p.at("cases"))
      cases.push_back({num(c, "delta", 0.0), num(c, "p", 0.0), psi_from_json(need(c, "psi"))});
  }
  if (p.contains("random")) {
    // Catalog draws from the config seed; Philox keeps them identical across platforms.
    const std::size_t k = count(p.at("random"), "count", 20);
    const CounterRng rng({cfg.seed, 0});
    for (std::size_t i = 0; i < k; ++i) {
      const auto r = rng.block(i);
      const double u0 = CounterRng::unit(r[0], r[1]), u1 = CounterRng::unit(r[2], r[3]);
      const auto r2 = rng.block(k + i);
      const double u2 = CounterRng::unit(r2[0], r2[1]), u3 = CounterRng::unit(r2[2], r2[3]);
      const PsiSpec psi = (i % 2 == 0) ? PsiSpec::mr(0.5 + 3.5 * u2, 0.25 * u3)
                                       : PsiSpec::zbeta(0.05 + 0.5 * u2, 0.1 + 0.4 * u3);
      cases.push_back({std::exp(-12.0 * u0 - 0.01), 2.0 + 62.0 * u1, psi});
    }
  }
  for (const auto& c : cases)
    require(c.delta > 0.0 && c.delta < 1.0 && c.p >= 2.0, ErrorKind::kValidation, "cases need delta in (0,1) and p >= 2");
  const std::size_t scan = count(p, "scan_points", 1000000);
  require(scan >= 2, ErrorKind::kValidation, "scan_points must be at least 2");
  struct T9 {
    PsiSpec psi, nu;
    double k;
    std::vector<double> gammas, p;
  };
  std::optional<T9> t9;
  if (p.contains("gamma_bound")) {
    const auto& t = p.at("gamma_bound");
    t9 = T9{psi_from_json(need(t, "psi")), psi_from_json(need(t, "nu")), num(t, "k", 1.0),
            need(t, "gammas").get<std::vector<double>>(), grid_param(t, "p", 2.0, 64.0, 24, true)};
    require(t9->k > 0.0, ErrorKind::kValidation, "gamma_bound k must be positive");
  }
  require(!cases.empty() || t9, ErrorKind::kValidation, "bound experiment needs cases, random, or gamma_bound");
  check_budget(scan * cases.size(), cfg.budget.max_samples, "scan evaluations");
  return [=] {
    Outcome o;
    Table t{"r_function.csv", {"delta", "p", "r_function", "beta", "closed_form", "dense_scan"}, {}};
    double worst_ratio = 0.0, worst_scan = 0.0;
    json out = json::array();
    for (const auto& c : cases) {
      const auto det = r_function_detail(c.delta, c.p, c.psi);
      const double cor = corollary1_bound(c.delta, c.p, c.psi);
      const double dense = r_dense_scan(c.delta, c.p, c.psi, scan);
      worst_ratio = std::max(worst_ratio, det.value / cor);
      worst_scan = std::max(worst_scan, rel_error(det.value, dense));
      t.rows.push_back({c.delta, c.p, det.value, det.beta, cor, dense});
      out.push_back({{"delta", c.delta}, {"p", c.p}, {"psi", psi_to_json(c.psi)}, {"r", det.value}, {"beta", det.beta}});
    }
    if (!cases.empty()) {
      o.metrics["max_r_over_closed_form"] = worst_ratio;
      o.metrics["max_scan_rel_error"] = worst_scan;
      o.tables.push_back(std::move(t));
    }
    o.results["cases"] = std::move(out);
    if (t9) {
      Table b{"gamma_bound.csv", {"gamma", "bound", "bound_maximal"}, {}};
      for (double g : t9->gammas)
        b.rows.push_back({g, theorem9_bound(g, t9->psi, t9->nu, t9->k, t9->p),
                          theorem9_bound(g, t9->psi, t9->nu, t9->k, t9->p, true)});
      o.metrics["gamma_bound_max"] = b.rows.empty() ? 0.0 : b.rows.back()[1];
      o.results["gamma_bound"] = {{"psi", psi_to_json(t9->psi)}, {"nu", psi_to_json(t9->nu)}, {"k", t9->k}};
      o.tables.push_back(std::move(b));
    }
    return o;
  };
}

std::string default_headline(const std::string& kind, const json& p) {
  if (kind == "conjugate") return p.contains("psi") || p.contains("cases") ? "round_trip_rel_error" : "biconjugate_residual";
  if (kind == "norm") return "gpsi_norm";
  if (kind == "tailfit") return "slope";
  if (kind == "rademacher" || kind == "product") return "fitted_exponent";
  if (kind == "hilbert") return "tail_slope";
  if (kind == "fourier") return p.value("mode", "riesz") == "riesz" ? "single_c" : "min_gpsi_final_over_initial";
  if (kind == "martingale") return "final_over_initial_nu0";
  return "max_r_over_closed_form";
}

// Bounds applied when the config declares none.
std::vector<Bound> default_acceptance(const std::string& kind, const json& p) {
  if (kind == "conjugate")
    return p.contains("psi") || p.contains("cases") ? std::vector<Bound>{{"round_trip_rel_error", std::nullopt, 1e-3, std::nullopt}}
                             : std::vector<Bound>{{"biconjugate_residual", std::nullopt, 1e-6, std::nullopt}};
  if (kind == "fourier" && p.value("mode", "riesz") == "riesz")
    return {{"parseval_defect", std::nullopt, 1e-10, std::nullopt}, {"isometry_defect", std::nullopt, 1e-10, std::nullopt}};
  if (kind == "martingale") return {{"bound_violations_nu0", std::nullopt, 0.0, std::nullopt}};
  if (kind == "bound" && (p.contains("cases") || p.contains("random")))
    return {{"max_r_over_closed_form", std::nullopt, 1.0 + 1e-12, std::nullopt}};
  if (kind == "norm") {
    bool expect = p.contains("expect_trend");
    if (p.contains("cases"))
      for (const auto& c : p.at("cases")) expect = expect || c.contains("expect_trend");
    if (expect) return {{"trend_mismatches", std::nullopt, 0.0, std::nullopt}};
  }
  return {};
}

json bound_to_json(const Bound& b) {
  json j = {{"metric", b.metric}};
  if (b.min) j["min"] = *b.min;
  if (b.max) j["max"] = *b.max;
  if (b.equals) j["equals"] = *b.equals;
  return j;
}

Bound bound_from_json(const json& j) {
  Bound b;
  b.metric = need(j, "metric").get<std::string>();
  if (j.contains("min")) b.min = num(j, "min", 0.0);
  if (j.contains("max")) b.max = num(j, "max", 0.0);
  if (j.contains("equals")) b.equals = j.at("equals");
  return b;
}

bool satisfies(const Bound& b, const json& v) {
  if (b.equals) return v == *b.equals;
  if (!v.is_number() && !v.is_boolean()) return false;
  const double x = v.is_boolean() ? (v.get<bool>() ? 1.0 : 0.0) : v.get<double>();
  if (std::isnan(x)) return false;
  if (b.min && !(x >= *b.min)) return false;
  if (b.max && !(x <= *b.max)) return false;
  return true;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return format_double(v.get<double>());
  return v.is_null() ? "" : v.dump();
}

void write_table(const fs::path& path, const Table& t) {
  std::ofstream out(path);
  require(bool(out), ErrorKind::kIo, "cannot write " + path.string());
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
    case ErrorKind::kDomain:
    case ErrorKind::kPrecondition:
    case ErrorKind::kAliasing:
    case ErrorKind::kIo:
      return kExitValidation;
    case ErrorKind::kBudget:
      return kExitBudget;
    default:
      return kExitAcceptance;
  }
}

std::string status_for(int code) {
  switch (code) {
    case kExitPass: return "pass";
    case kExitValidation: return "validation";
    case kExitBudget: return "budget";
    default: return "fail";
  }
}

Runner prepare_in(const ExperimentConfig& cfg, const fs::path& dir) {
  const auto& kinds = experiment_kinds();
  require(std::find(kinds.begin(), kinds.end(), cfg.kind) != kinds.end(), ErrorKind::kValidation,
          "unknown experiment kind '" + cfg.kind + "'");
  require(cfg.parameters.is_object(), ErrorKind::kValidation, "parameters must be an object");
  try {
    if (cfg.kind == "conjugate") return prepare_conjugate(cfg);
    if (cfg.kind == "norm") return prepare_norm(cfg);
    if (cfg.kind == "tailfit") return prepare_tailfit(cfg);
    if (cfg.kind == "rademacher") return prepare_rademacher(cfg);
    if (cfg.kind == "product") return prepare_product(cfg);
    if (cfg.kind == "hilbert") return prepare_hilbert(cfg);
    if (cfg.kind == "fourier") return prepare_fourier(cfg);
    if (cfg.kind == "martingale") return prepare_martingale(cfg, dir);
    return prepare_bound(cfg);
  } catch (const json::exception& e) {
    fail(ErrorKind::kValidation, std::string("malformed parameters: ") + e.what());
  }
}

fs::path output_dir(const ExperimentConfig& cfg) {
  return (cfg.out.empty() ? default_output_root() : cfg.out) / cfg.name;
}

RunResult execute(const ExperimentConfig& cfg, const Runner* prepared) {
  RunResult res;
  res.dir = output_dir(cfg);
  json report = {{"name", cfg.name},
                 {"experiment", cfg.kind},
                 {"seed", cfg.seed},
                 {"version", {{"orlicz", version()}}},
                 {"config", cfg.to_json()},
                 {"errors", json::array()}};
  auto bounds = cfg.acceptance.empty() ? default_acceptance(cfg.kind, cfg.parameters) : cfg.acceptance;
  res.headline_metric = bounds.empty() ? default_headline(cfg.kind, cfg.parameters) : bounds.front().metric;
  if (!bounds.empty()) res.headline_bound = bounds.front();
  std::vector<std::string> artifacts = {"report.json"};
  try {
    fs::create_directories(res.dir);
  } catch (const fs::filesystem_error& e) {
    res.exit_code = kExitValidation;
    res.status = status_for(res.exit_code);
    report["errors"].push_back({{"kind", "io"}, {"message", e.what()}});
    report["status"] = res.status;
    report["exit_code"] = res.exit_code;
    res.report = report;
    return res;
  }
  try {
    const Runner runner = prepared ? *prepared : prepare_in(cfg, res.dir);
    Outcome o = runner();
    json checks = json::array();
    bool ok = true;
    for (const auto& b : bounds) {
      json v = o.metrics.value(b.metric, json());
      const bool pass = !v.is_null() && satisfies(b, v);
      if (v.is_null()) report["errors"].push_back({{"kind", "validation"}, {"message", "acceptance metric '" + b.metric + "' was not produced"}});
      ok = ok && pass;
      auto cj = bound_to_json(b);
      cj["value"] = v;
      cj["pass"] = pass;
      checks.push_back(std::move(cj));
    }
    for (const auto& t : o.tables) {
      write_table(res.dir / t.file, t);
      artifacts.push_back(t.file);
    }
    if (o.results.contains("paths_manifest")) {
      artifacts.push_back("paths.json");
      artifacts.push_back("paths.bin");
      artifacts.push_back("paths.max.bin");
    }
    res.exit_code = ok ? kExitPass : kExitAcceptance;
    res.headline_value = o.metrics.value(res.headline_metric, json());
    report["metrics"] = std::move(o.metrics);
    report["results"] = std::move(o.results);
    report["acceptance"] = std::move(checks);
  } catch (const Error& e) {
    res.exit_code = exit_code_for(e.kind());
    report["errors"].push_back({{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}});
  } catch (const json::exception& e) {
    res.exit_code = kExitValidation;
    report["errors"].push_back({{"kind", "validation"}, {"message", e.what()}});
  } catch (const std::exception& e) {
    res.exit_code = kExitAcceptance;
    report["errors"].push_back({{"kind", "internal"}, {"message", e.what()}});
  }
  res.status = status_for(res.exit_code);
  report["status"] = res.status;
  report["exit_code"] = res.exit_code;
  report["headline"] = {{"metric", res.headline_metric}, {"value", res.headline_value}};
  if (res.headline_bound) report["headline"]["bound"] = bound_to_json(*res.headline_bound);
  report["artifacts"] = artifacts;
  try {
    write_json(res.dir / "report.json", report);
  } catch (const Error& e) {
    if (res.exit_code == kExitPass) res.exit_code = kExitValidation;
    res.status = status_for(res.exit_code);
  }
  res.report = std::move(report);
  return res;
}

}  // namespace

// ---------------------------------------------------------------- public

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"conjugate", "norm",    "tailfit",    "rademacher", "product",
                                                 "hilbert",   "fourier", "martingale", "bound"};
  return kinds;
}

ExperimentConfig ExperimentConfig::from_json(const json& in) {
  try {
    require(in.is_object(), ErrorKind::kValidation, "config must be a JSON object");
    const json& j = (in.contains("config") && in.at("config").is_object()) ? in.at("config") : in;
    static const std::set<std::string> known = {"name", "experiment", "seed", "out", "budget", "parameters", "acceptance"};
    for (const auto& [k, v] : j.items())
      require(known.count(k) > 0, ErrorKind::kValidation, "unknown config key '" + k + "'");
    ExperimentConfig c;
    c.kind = need(j, "experiment").get<std::string>();
    c.name = j.value("name", c.kind);
    require(!c.name.empty() && c.name.find('/') == std::string::npos && c.name != "." && c.name != "..",
            ErrorKind::kValidation, "experiment name must be a plain, non-empty file name");
    if (j.contains("seed")) {
      require(j.at("seed").is_number_unsigned(), ErrorKind::kValidation, "seed must be a non-negative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("budget")) {
      c.budget.max_samples = count(j.at("budget"), "max_samples", 0);
      c.budget.max_grid = count(j.at("budget"), "max_grid", 0);
    }
    c.parameters = j.value("parameters", json::object());
    if (j.contains("acceptance")) {
      const auto& a = j.at("acceptance");
      if (a.is_array())
        for (const auto& b : a) c.acceptance.push_back(bound_from_json(b));
      else
        c.acceptance.push_back(bound_from_json(a));
    }
    return c;
  } catch (const json::exception& e) {
    fail(ErrorKind::kValidation, std::string("malformed config: ") + e.what());
  }
}

json ExperimentConfig::to_json() const {
  json j = {{"name", name},
            {"experiment", kind},
            {"seed", seed},
            {"budget", {{"max_samples", budget.max_samples}, {"max_grid", budget.max_grid}}},
            {"parameters", parameters}};
  if (!out.empty()) j["out"] = out.string();
  if (!acceptance.empty()) {
    j["acceptance"] = json::array();
    for (const auto& b : acceptance) j["acceptance"].push_back(bound_to_json(b));
  }
  return j;
}

std::function<Outcome()> prepare(const ExperimentConfig& config) { return prepare_in(config, output_dir(config)); }

RunResult run(const ExperimentConfig& config) { return execute(config, nullptr); }

fs::path default_output_root() {
  if (const char* env = std::getenv("ORLICZ_OUT"); env && *env) return env;
  return "orlicz-out";
}

std::string version() { return ORLICZ_VERSION; }

int suite(const fs::path& manifest, const std::optional<fs::path>& out, std::ostream& log) {
  std::vector<ExperimentConfig> configs;
  fs::path root;
  try {
    const json m = read_json(manifest);
    const json list = m.is_array() ? m : m.value("experiments", json::array());
    require(list.is_array(), ErrorKind::kValidation, "manifest 'experiments' must be an array");
    root = out ? *out : (m.is_object() && m.contains("out")) ? fs::path(m.at("out").get<std::string>()) : default_output_root();
    std::set<std::string> names;
    for (const auto& entry : list) {
      json cj = entry;
      if (entry.is_string()) cj = read_json(manifest.parent_path() / entry.get<std::string>());
      auto c = ExperimentConfig::from_json(cj);
      require(names.insert(c.name).second, ErrorKind::kValidation, "duplicate experiment name '" + c.name + "'");
      c.out = root;
      configs.push_back(std::move(c));
    }
  } catch (const Error& e) {
    log << "suite: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    log << "suite: malformed manifest: " << e.what() << '\n';
    return kExitValidation;
  }

  // Every member validates before anything runs; budget refusals are per member.
  std::vector<std::optional<Runner>> runners(configs.size());
  std::vector<std::optional<Error>> refused(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    try {
      runners[i] = prepare(configs[i]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kBudget) {
        log << "suite: " << configs[i].name << ": " << e.what() << '\n';
        return kExitValidation;
      }
      refused[i] = e;
    }
  }

  try {
    fs::create_directories(root);
  } catch (const fs::filesystem_error& e) {
    log << "suite: " << e.what() << '\n';
    return kExitValidation;
  }
  std::ofstream summary(root / "summary.csv");
  if (!summary) {
    log << "suite: cannot write " << (root / "summary.csv").string() << '\n';
    return kExitValidation;
  }
  summary << "name,experiment,metric,value,min,max,status,exit_code\n";
  bool any_fail = false, any_budget = false, any_invalid = false;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    RunResult r;
    if (refused[i]) {
      const Runner raise = [e = *refused[i]]() -> Outcome { throw e; };
      r = execute(configs[i], &raise);
    } else {
      r = execute(configs[i], &*runners[i]);
    }
    any_fail = any_fail || r.exit_code == kExitAcceptance;
    any_budget = any_budget || r.exit_code == kExitBudget;
    any_invalid = any_invalid || r.exit_code == kExitValidation;
    const auto& b = r.headline_bound;
    summary << configs[i].name << ',' << configs[i].kind << ',' << r.headline_metric << ','
            << format_value(r.headline_value) << ',' << (b && b->min ? format_double(*b->min) : "") << ','
            << (b && b->max ? format_double(*b->max) : "") << ',' << r.status << ',' << r.exit_code << '\n';
    summary.flush();
    log << configs[i].name << ": " << r.status << ' ' << r.headline_metric << '=' << format_value(r.headline_value)
        << '\n';
  }
  if (any_fail) return kExitAcceptance;
  if (any_budget) return kExitBudget;
  if (any_invalid) return kExitValidation;
  return kExitPass;
}

}  // namespace orlicz::tools
