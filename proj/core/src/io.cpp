#include "chldp/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace chldp {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

namespace {

void header(std::ostream& out, const char* first, char prefix, std::size_t n) {
  out << first;
  for (std::size_t j = 0; j < n; ++j) out << ',' << prefix << j;
  out << '\n';
}

void row(std::ostream& out, double t, std::span<const double> vals) {
  out << format_double(t);
  for (double v : vals) out << ',' << format_double(v);
  out << '\n';
}

std::vector<double> split_doubles(const std::string& line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(',', pos);
    if (next == std::string::npos) next = line.size();
    const std::string cell = line.substr(pos, next - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw InvalidArgument("bad number '" + cell + "' in CSV");
    }
    pos = next + 1;
  }
  return out;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  header(out, "t", 'u', traj.grid().size());
  for (std::size_t m = 0; m < traj.points(); ++m) row(out, traj.t(m), traj.at(m));
}

void write_control_csv(const ControlPath& v, std::ostream& out) {
  header(out, "t", 'v', v.grid().size());
  for (std::size_t m = 0; m < v.steps(); ++m) row(out, v.time().dt * static_cast<double>(m), v.at(m));
}

ControlPath read_control_csv(std::istream& in, const Grid& grid, const TimeGrid& time) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("control CSV is empty");
  ControlPath v(grid, time);
  std::size_t m = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (m >= time.steps) throw InvalidArgument("control CSV has more rows than time steps");
    const auto vals = split_doubles(line);
    if (vals.size() != grid.size() + 1) throw InvalidArgument("control CSV row width does not match grid");
    std::copy(vals.begin() + 1, vals.end(), v.at(m).begin());
    ++m;
  }
  if (m != time.steps) throw InvalidArgument("control CSV has fewer rows than time steps");
  return v;
}

ControlPath read_control_csv(const std::string& path, const Grid& grid, const TimeGrid& time) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open control file '" + path + "'");
  return read_control_csv(in, grid, time);
}

void write_field_csv(const GridField& g, std::ostream& out) {
  out << (g.grid.dim == 1 ? "j,x,value\n" : "j,x1,x2,value\n");
  for (std::size_t j = 0; j < g.values.size(); ++j) {
    out << j << ',';
    if (g.grid.dim == 1) {
      out << format_double(g.grid.point(static_cast<int>(j)));
    } else {
      out << format_double(g.grid.point(static_cast<int>(j) / g.grid.n)) << ','
          << format_double(g.grid.point(static_cast<int>(j) % g.grid.n));
    }
    out << ',' << format_double(g.values[j]) << '\n';
  }
}

ordered_json certificate_to_json(const RateCertificate& cert) {
  ordered_json j;
  j["cost"] = cert.cost;
  j["residual"] = cert.residual;
  j["feasible"] = cert.feasible();
  j["trace"] = {{"iterations", cert.trace.iterations},
                {"grad_norm", cert.trace.grad_norm},
                {"stationary", cert.trace.stationary},
                {"final_mu", cert.trace.final_mu},
                {"restore_scale", cert.trace.restore_scale}};
  ordered_json restarts = ordered_json::array();
  for (const auto& r : cert.restarts) {
    restarts.push_back({{"start", r.start},
                        {"cost", r.cost},
                        {"residual", r.residual},
                        {"iterations", r.iterations},
                        {"stationary", r.stationary}});
  }
  j["restarts"] = restarts;
  const Grid& g = cert.control.grid();
  j["grid"] = {{"d", g.dim}, {"n", g.n}};
  j["time"] = {{"dt", cert.control.time().dt}, {"steps", cert.control.time().steps}};
  j["endpoint"] = cert.endpoint.values;
  std::ostringstream csv;
  write_control_csv(cert.control, csv);
  j["control_csv"] = csv.str();
  return j;
}

RateCertificate certificate_from_json(const json& j) {
  try {
    RateCertificate c;
    const Grid grid{j.at("grid").at("d").get<int>(), j.at("grid").at("n").get<int>()};
    const TimeGrid time{j.at("time").at("dt").get<double>(), j.at("time").at("steps").get<std::size_t>()};
    std::istringstream csv(j.at("control_csv").get<std::string>());
    c.control = read_control_csv(csv, grid, time);
    c.cost = j.at("cost").get<double>();
    c.residual = j.at("residual").get<double>();
    c.endpoint = GridField(grid, j.at("endpoint").get<std::vector<double>>());
    const json& t = j.at("trace");
    c.trace.iterations = t.at("iterations").get<int>();
    c.trace.grad_norm = t.at("grad_norm").get<double>();
    c.trace.stationary = t.at("stationary").get<bool>();
    c.trace.final_mu = t.at("final_mu").get<double>();
    c.trace.restore_scale = t.at("restore_scale").get<double>();
    for (const json& r : j.at("restarts")) {
      c.restarts.push_back(RestartRecord{r.at("start").get<int>(), r.at("cost").get<double>(),
                                         r.at("residual").get<double>(), r.at("iterations").get<int>(),
                                         r.at("stationary").get<bool>()});
    }
    return c;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed certificate: ") + e.what());
  }
}

RateCertificate read_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open certificate '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("certificate is not valid JSON: ") + e.what());
  }
  return certificate_from_json(j);
}

ordered_json estimate_to_json(const ProbabilityEstimate& e) {
  ordered_json j;
  j["method"] = e.method;
  j["epsilon"] = e.epsilon;
  j["replicas"] = e.replicas;
  j["hits"] = e.hits;
  j["p_hat"] = e.p_hat;
  j["ci_lo"] = e.ci_lo;
  j["ci_hi"] = e.ci_hi;
  j["std_error"] = e.std_error;
  j["eps_log_p"] = e.eps_log_p;
  j["zero_hit"] = e.zero_hit;
  j["mean_weight"] = e.mean_weight;
  j["weight_se"] = e.weight_se;
  j["sample_variance"] = e.sample_variance;
  j["aborted"] = e.aborted;
  return j;
}

void write_estimates_csv(const std::vector<ProbabilityEstimate>& rows, std::ostream& out) {
  out << "epsilon,method,replicas,hits,p_hat,ci_lo,ci_hi,std_error,eps_log_p,zero_hit,aborted\n";
  for (const auto& e : rows) {
    out << format_double(e.epsilon) << ',' << e.method << ',' << e.replicas << ',' << e.hits << ','
        << format_double(e.p_hat) << ',' << format_double(e.ci_lo) << ',' << format_double(e.ci_hi) << ','
        << format_double(e.std_error) << ',' << format_double(e.eps_log_p) << ',' << (e.zero_hit ? 1 : 0) << ','
        << e.aborted << '\n';
  }
}

ordered_json scaling_to_json(const ScalingReport& r) {
  ordered_json j;
  j["label"] = r.label;
  j["certificate_cost"] = r.certificate_cost;
  j["trend_slope"] = r.trend_slope;
  j["trend_se"] = r.trend_se;
  j["nondecreasing"] = r.nondecreasing;
  j["fitted_limit"] = r.fitted_limit;
  j["final_gap_ratio"] = r.final_gap_ratio;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json o = estimate_to_json(row.estimate);
    o["neg_eps_log_p"] = row.neg_eps_log_p;
    o["neg_lo"] = row.neg_lo;
    o["neg_hi"] = row.neg_hi;
    o["bound_only"] = row.bound_only;
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j;
}

void write_scaling_csv(const ScalingReport& r, std::ostream& out) {
  out << "epsilon,p_hat,ci_lo,ci_hi,eps_log_p,neg_eps_log_p,neg_lo,neg_hi,method,replicas,bound_only\n";
  for (const auto& row : r.rows) {
    const auto& e = row.estimate;
    out << format_double(e.epsilon) << ',' << format_double(e.p_hat) << ',' << format_double(e.ci_lo) << ','
        << format_double(e.ci_hi) << ',' << format_double(e.eps_log_p) << ',' << format_double(row.neg_eps_log_p)
        << ',' << format_double(row.neg_lo) << ',' << format_double(row.neg_hi) << ',' << e.method << ','
        << e.replicas << ',' << (row.bound_only ? 1 : 0) << '\n';
  }
}

void write_distance_csv(const std::vector<DistanceRow>& rows, std::ostream& out) {
  out << "parameter,distance,std_error,control_norm_sq\n";
  for (const auto& r : rows) {
    out << format_double(r.parameter) << ',' << format_double(r.distance) << ',' << format_double(r.std_error) << ','
        << format_double(r.control_norm_sq) << '\n';
  }
}

namespace {
ordered_json fit_json(const ExponentFit& f) {
  return {{"increments", f.increments}, {"integrals", f.integrals}, {"exponent", f.exponent}, {"constant", f.constant}};
}
}  // namespace

ordered_json green_to_json(const GreenIncrementReport& r) {
  ordered_json j;
  j["gamma_hat"] = r.space.exponent;
  j["gamma_prime_hat"] = r.square_norm.exponent;
  j["gamma_prime_time_hat"] = r.time.exponent;
  j["space"] = fit_json(r.space);
  j["time"] = fit_json(r.time);
  j["square_norm"] = fit_json(r.square_norm);
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace chldp
