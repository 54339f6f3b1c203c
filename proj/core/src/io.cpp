#include "orlicz/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "orlicz/error.hpp"

namespace orlicz {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

json slope_to_json(double s) { return std::isfinite(s) ? json(s) : json(nullptr); }
double slope_from_json(const json& j) { return j.is_null() ? kDomainEnd : j.get<double>(); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::kValidation, std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.is_object() && j.contains(key) ? j.at(key).get<T>() : fallback;
}

// Shortest round-trip representation.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return in;
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

void put_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) fail(ErrorKind::kIo, "truncated binary stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

void put_doubles(std::ostream& out, std::span<const double> xs) {
  for (double x : xs) put_u64_le(out, std::bit_cast<std::uint64_t>(x));
}

std::vector<double> get_doubles(std::istream& in, std::uint64_t n) {
  std::vector<double> xs(n);
  for (auto& x : xs) x = std::bit_cast<double>(get_u64_le(in));
  return xs;
}

json weibull_params(const WeibullSymSpec& s) { return {{"m", s.m}, {"L", slowly_varying_to_json(s.l)}}; }
WeibullSymSpec weibull_from(const json& p) {
  WeibullSymSpec s;
  s.m = field(p, "m").get<double>();
  if (p.contains("L")) s.l = slowly_varying_from_json(p.at("L"));
  return s;
}

}  // namespace

json slowly_varying_to_json(const SlowlyVaryingSpec& l) {
  json factors = json::array();
  for (const auto& f : l.factors) factors.push_back({{"power", f.power}, {"shift", f.shift}});
  return {{"coefficient", l.coefficient}, {"factors", factors}};
}

SlowlyVaryingSpec slowly_varying_from_json(const json& j) {
  SlowlyVaryingSpec l;
  if (j.is_number()) {
    l.coefficient = j.get<double>();
  } else {
    l.coefficient = get_or(j, "coefficient", 1.0);
    if (j.contains("factors"))
      for (const auto& f : j.at("factors")) l.factors.push_back({field(f, "power").get<double>(), get_or(f, "shift", 2.0)});
  }
  l.validate();
  return l;
}

json grid_function_to_json(const GridFunction& f) {
  return {{"grid", f.grid()},
          {"values", f.values()},
          {"left_slope", slope_to_json(f.left_slope())},
          {"right_slope", slope_to_json(f.right_slope())},
          {"convex", f.convex()}};
}

GridFunction grid_function_from_json(const json& j) {
  return GridFunction(field(j, "grid").get<std::vector<double>>(), field(j, "values").get<std::vector<double>>(),
                      slope_from_json(j.value("left_slope", json(nullptr))),
                      slope_from_json(j.value("right_slope", json(nullptr))), get_or(j, "convex", false));
}

json psi_to_json(const PsiSpec& psi) {
  json out = std::visit(
      Overloaded{
          [](const MrPsi& s) { return json{{"kind", "MR"}, {"parameters", {{"m", s.m}, {"r", s.r}}}}; },
          [](const ZBetaPsi& s) { return json{{"kind", "ZBeta"}, {"parameters", {{"Z", s.z}, {"beta", s.beta}}}}; },
          [](const GridPsi& s) {
            return json{{"kind", "GridBacked"}, {"parameters", {{"p_log_psi", grid_function_to_json(s.p_log_psi)}}}};
          },
      },
      psi.kind());
  if (psi.factor() != 1.0) out["parameters"]["factor"] = psi.factor();
  return out;
}

PsiSpec psi_from_json(const json& j) {
  const auto kind = field(j, "kind").get<std::string>();
  const json& p = field(j, "parameters");
  PsiSpec out = [&] {
    if (kind == "MR") return PsiSpec::mr(field(p, "m").get<double>(), get_or(p, "r", 0.0));
    if (kind == "ZBeta") return PsiSpec::zbeta(field(p, "Z").get<double>(), field(p, "beta").get<double>());
    if (kind == "GridBacked") return PsiSpec::grid_backed(grid_function_from_json(field(p, "p_log_psi")));
    fail(ErrorKind::kValidation, "unknown psi kind '" + kind + "'");
  }();
  if (p.contains("factor")) out = out.scaled(p.at("factor").get<double>());
  return out;
}

json generator_to_json(const GeneratorSpec& spec) {
  return std::visit(
      Overloaded{
          [](const GaussianSpec& s) { return json{{"kind", "gaussian"}, {"parameters", {{"sigma", s.sigma}}}}; },
          [](const ExponentialSpec& s) { return json{{"kind", "exponential"}, {"parameters", {{"scale", s.scale}}}}; },
          [](const UniformSpec& s) { return json{{"kind", "uniform"}, {"parameters", {{"half_width", s.half_width}}}}; },
          [](const GmLawSpec& s) { return json{{"kind", "gm_law"}, {"parameters", {{"m", s.m}}}}; },
          [](const WeibullSymSpec& s) { return json{{"kind", "weibull"}, {"parameters", weibull_params(s)}}; },
          [](const RademacherSeriesSpec& s) {
            return json{{"kind", "rademacher"},
                        {"parameters", {{"B", s.b}, {"K", s.k}, {"L", slowly_varying_to_json(s.l)}}}};
          },
          [](const ProductSpec& s) {
            return json{{"kind", "product"}, {"parameters", {{"xi", weibull_params(s.xi)}, {"eta", weibull_params(s.eta)}}}};
          },
      },
      spec);
}

GeneratorSpec generator_from_json(const json& j) {
  const auto kind = field(j, "kind").get<std::string>();
  const json p = j.value("parameters", json::object());
  GeneratorSpec out = [&]() -> GeneratorSpec {
    if (kind == "gaussian") return GaussianSpec{get_or(p, "sigma", 1.0)};
    if (kind == "exponential") return ExponentialSpec{get_or(p, "scale", 1.0)};
    if (kind == "uniform") return UniformSpec{get_or(p, "half_width", 1.0)};
    if (kind == "gm_law") return GmLawSpec{field(p, "m").get<double>()};
    if (kind == "weibull") return weibull_from(p);
    if (kind == "rademacher") {
      RademacherSeriesSpec s;
      s.b = field(p, "B").get<double>();
      s.k = get_or<std::size_t>(p, "K", 10000);
      if (p.contains("L")) s.l = slowly_varying_from_json(p.at("L"));
      return s;
    }
    if (kind == "product") return ProductSpec{weibull_from(field(p, "xi")), weibull_from(field(p, "eta"))};
    fail(ErrorKind::kValidation, "unknown generator kind '" + kind + "'");
  }();
  validate_generator(out);
  return out;
}

json martingale_spec_to_json(const MartingaleSpec& spec) {
  json out = std::visit(
      Overloaded{
          [](const SimpleKind& s) {
            return json{{"kind", "simple"}, {"parameters", {{"B", s.b}, {"L0", slowly_varying_to_json(s.l0)}}}};
          },
          [](const DoubleProductKind& s) {
            return json{{"kind", "double_product"}, {"parameters", {{"B", s.b}, {"L0", slowly_varying_to_json(s.l0)}}}};
          },
          [](const YSeriesKind& s) {
            return json{{"kind", "y_series"}, {"parameters", {{"B", s.b}, {"gamma", s.gamma}, {"d_max", s.d_max}}}};
          },
      },
      spec.kind);
  out["n_max"] = spec.n_max;
  out["truncation"] = spec.k();
  out["max_work"] = spec.max_work;
  return out;
}

MartingaleSpec martingale_spec_from_json(const json& j) {
  const auto kind = field(j, "kind").get<std::string>();
  const json p = j.value("parameters", json::object());
  MartingaleSpec spec;
  if (kind == "simple" || kind == "double_product") {
    const double b = field(p, "B").get<double>();
    const auto l0 = p.contains("L0") ? slowly_varying_from_json(p.at("L0")) : SlowlyVaryingSpec{};
    if (kind == "simple")
      spec.kind = SimpleKind{b, l0};
    else
      spec.kind = DoubleProductKind{b, l0};
  } else if (kind == "y_series") {
    spec.kind = YSeriesKind{field(p, "B").get<double>(), get_or(p, "gamma", 1.0), get_or<std::size_t>(p, "d_max", 6)};
  } else {
    fail(ErrorKind::kValidation, "unknown martingale kind '" + kind + "'");
  }
  spec.n_max = get_or<std::size_t>(j, "n_max", 1024);
  spec.truncation = get_or<std::size_t>(j, "truncation", 0);
  spec.max_work = get_or(j, "max_work", 0.0);
  spec.validate();
  return spec;
}

json tail_fit_to_json(const TailFit& fit) {
  return {{"model", fit.model},       {"slope", fit.slope},   {"intercept", fit.intercept},
          {"slope_stderr", fit.slope_stderr}, {"u_lo", fit.u_lo}, {"u_hi", fit.u_hi},
          {"q_lo", fit.q_lo},         {"q_hi", fit.q_hi},     {"points", fit.points}};
}

json norm_report_to_json(const NormReport& rep) {
  json out = {{"gpsi_norm", rep.gpsi_norm}, {"argmax_p", rep.argmax_p}, {"psi", rep.psi}};
  out["luxemburg_norm"] = rep.luxemburg_norm ? json(*rep.luxemburg_norm) : json(nullptr);
  out["tail_fit"] = rep.tail_fit ? tail_fit_to_json(*rep.tail_fit) : json(nullptr);
  return out;
}

json moment_curve_to_json(const MomentCurve& c) {
  return {{"p", c.p_grid}, {"lp", c.lp_values}, {"ess", c.ess},
          {"reliable", c.reliable}, {"n", c.n}, {"cap", c.cap}, {"above_cap", c.above_cap}};
}

json trend_to_json(const TrendReport& t) {
  return {{"verdict", to_string(t.verdict)}, {"slope", t.slope}, {"points", t.points},
          {"p", t.p}, {"ratio", t.ratio}, {"used", t.used}};
}

json order_to_json(const OrderReport& o) {
  return {{"verdict", to_string(o.verdict)}, {"slope", o.slope}, {"band", o.band}};
}

json convergence_to_json(const ConvergenceReport& r) {
  json rows = json::array();
  for (const auto& c : r.rows)
    rows.push_back({{"n", c.n}, {"gamma_n", c.gamma_n}, {"empirical_norm", c.empirical_norm},
                    {"bound", c.bound}, {"bound_maximal", c.bound_maximal}, {"psi_norm", c.psi_norm},
                    {"maximal_psi_norm", c.maximal_psi_norm}});
  return {{"rows", rows}, {"p_grid", r.p_grid}, {"k_estimate", r.k_estimate},
          {"order", order_to_json(r.order)}, {"final_over_initial", r.final_over_initial},
          {"verdict", r.verdict}, {"wide_error", r.wide_error}, {"doob_ok", r.doob_ok}};
}

void write_grid_function(const std::filesystem::path& csv, const GridFunction& f) {
  auto out = open_out(csv);
  out << "z,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) out << format_double(f.grid()[i]) << ',' << format_double(f.values()[i]) << '\n';
  write_json(csv.string() + ".json", {{"left_slope", slope_to_json(f.left_slope())},
                                      {"right_slope", slope_to_json(f.right_slope())},
                                      {"convex", f.convex()},
                                      {"points", f.size()}});
}

GridFunction read_grid_function(const std::filesystem::path& csv) {
  auto in = open_in(csv);
  std::string line;
  std::getline(in, line);
  if (line.rfind("z,value", 0) != 0) fail(ErrorKind::kIo, csv.string() + ": expected header z,value");
  std::vector<double> z, v;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    double a, b;
    if (comma == std::string::npos || !parse_double(std::string_view(line).substr(0, comma), a) ||
        !parse_double(std::string_view(line).substr(comma + 1), b))
      fail(ErrorKind::kIo, csv.string() + ": malformed row '" + line + "'");
    z.push_back(a);
    v.push_back(b);
  }
  json side = json::object();
  const std::filesystem::path sidecar = csv.string() + ".json";
  if (std::filesystem::exists(sidecar)) side = read_json(sidecar);
  return GridFunction(std::move(z), std::move(v), slope_from_json(side.value("left_slope", json(nullptr))),
                      slope_from_json(side.value("right_slope", json(nullptr))), get_or(side, "convex", false));
}

void write_sample_csv(const std::filesystem::path& path, const Sample& s) {
  auto out = open_out(path);
  out << "value\n";
  for (double x : s.values()) out << format_double(x) << '\n';
}

Sample read_sample_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<double> xs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    double v;
    if (!parse_double(line, v)) {
      if (first) {
        first = false;
        continue;
      }
      fail(ErrorKind::kIo, path.string() + ": malformed value '" + line + "'");
    }
    first = false;
    xs.push_back(v);
  }
  Provenance p;
  p.source = path.string();
  return Sample(std::move(xs), std::move(p));
}

void write_sample_binary(const std::filesystem::path& path, std::span<const double> values) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  put_u64_le(out, values.size());
  put_doubles(out, values);
}

void write_sample_binary(const std::filesystem::path& path, const Sample& s) { write_sample_binary(path, s.values()); }

Sample read_sample_binary(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  const std::uint64_t n = get_u64_le(in);
  const auto size = std::filesystem::file_size(path);
  if (size != 8 + 8 * n) fail(ErrorKind::kIo, path.string() + ": count header disagrees with file size");
  Provenance p;
  p.source = path.string();
  return Sample(get_doubles(in, n), std::move(p));
}

Sample read_sample(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? read_sample_csv(path) : read_sample_binary(path);
}

void write_paths(const std::filesystem::path& stem, const PathCollection& paths) {
  const std::filesystem::path bin = stem.string() + ".bin";
  std::vector<double> flat;
  flat.reserve(paths.paths.size() * (paths.times.size() + 1));
  for (const auto& p : paths.paths) flat.insert(flat.end(), p.values.begin(), p.values.end());
  for (const auto& p : paths.paths) flat.push_back(p.limit_value);
  write_sample_binary(bin, flat);
  std::vector<double> maxima;
  for (const auto& p : paths.paths) maxima.insert(maxima.end(), p.running_max.begin(), p.running_max.end());
  const std::filesystem::path max_bin = stem.string() + ".max.bin";
  write_sample_binary(max_bin, maxima);
  write_json(stem.string() + ".json",
             {{"spec", martingale_spec_to_json(paths.spec)},
              {"seed", paths.seed.seed},
              {"stream", paths.seed.stream_id},
              {"times", paths.times},
              {"n_paths", paths.paths.size()},
              {"horizon", paths.horizon},
              {"truncation", paths.truncation},
              {"partial", paths.partial},
              {"tail_variance", paths.tail_variance},
              {"values_file", bin.filename().string()},
              {"running_max_file", max_bin.filename().string()}});
}

PathCollection read_paths(const std::filesystem::path& manifest) {
  const json j = read_json(manifest);
  PathCollection out;
  out.spec = martingale_spec_from_json(field(j, "spec"));
  out.seed = {field(j, "seed").get<std::uint64_t>(), get_or<std::uint64_t>(j, "stream", 0)};
  out.times = field(j, "times").get<std::vector<std::size_t>>();
  out.horizon = field(j, "horizon").get<std::size_t>();
  out.truncation = field(j, "truncation").get<std::size_t>();
  out.partial = get_or(j, "partial", false);
  out.tail_variance = field(j, "tail_variance").get<double>();
  const auto n_paths = field(j, "n_paths").get<std::size_t>();
  const auto dir = manifest.parent_path();
  const auto values = read_sample_binary(dir / field(j, "values_file").get<std::string>());
  const auto maxima = read_sample_binary(dir / field(j, "running_max_file").get<std::string>());
  const std::size_t nt = out.times.size();
  if (values.size() != n_paths * (nt + 1) || maxima.size() != n_paths * nt)
    fail(ErrorKind::kIo, manifest.string() + ": path files do not match the manifest");
  out.paths.resize(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    out.paths[p].values.assign(values.values().begin() + std::ptrdiff_t(p * nt),
                               values.values().begin() + std::ptrdiff_t((p + 1) * nt));
    out.paths[p].running_max.assign(maxima.values().begin() + std::ptrdiff_t(p * nt),
                                    maxima.values().begin() + std::ptrdiff_t((p + 1) * nt));
    out.paths[p].limit_value = values.values()[n_paths * nt + p];
  }
  return out;
}

void write_diagnostic_csv(const std::filesystem::path& path, const ConvergenceReport& r) {
  auto out = open_out(path);
  out << "checkpoint,gamma_n,empirical_norm,bound\n";
  for (const auto& row : r.rows)
    out << row.n << ',' << format_double(row.gamma_n) << ',' << format_double(row.empirical_norm) << ','
        << format_double(row.bound) << '\n';
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kValidation, path.string() + ": " + e.what());
  }
}

}  // namespace orlicz
