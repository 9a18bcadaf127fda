#include "imopt/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace imopt {

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TraceIoError("cannot open " + path + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw TraceIoError("write to " + path + " failed");
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw TraceIoError(fmt::format("line {}: '{}' is not a number", line_no, text));
  }
  return v;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

nlohmann::json events_json(const std::vector<SupervisorEvent>& events) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : events) {
    out.push_back({{"step", e.step}, {"kind", to_string(e.kind)}, {"detail", e.detail}});
  }
  return out;
}

}  // namespace

void write_trace_csv(const Trace& trace, const std::string& path) {
  auto out = open_for_write(path);
  const Eigen::Index n = trace.n;
  std::string header = "k,alg";
  for (Eigen::Index i = 1; i <= n; ++i) header += fmt::format(",x_{}", i);
  for (Eigen::Index i = 1; i <= n; ++i) header += fmt::format(",xstar_{}", i);
  header += ",err,cum_err,phase\n";
  out << header;

  fmt::memory_buffer buf;
  for (Step k = 0; k < trace.steps(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    for (const auto& a : trace.algorithms) {
      buf.clear();
      fmt::format_to(std::back_inserter(buf), "{},{}", k, a.name);
      for (Eigen::Index i = 0; i < n; ++i) fmt::format_to(std::back_inserter(buf), ",{:.17g}", a.x[ku](i));
      for (Eigen::Index i = 0; i < n; ++i) {
        fmt::format_to(std::back_inserter(buf), ",{:.17g}", trace.x_star[ku](i));
      }
      fmt::format_to(std::back_inserter(buf), ",{:.17g},{:.17g},{}\n", a.error[ku], a.cumulative[ku],
                     a.phase[ku]);
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
  }
  finish(out, path);
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceIoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw TraceIoError(path + ": missing header row");
  const auto header = split_commas(line);
  if (header.size() < 7 || (header.size() - 5) % 2 != 0 || header[0] != "k" || header[1] != "alg") {
    throw TraceIoError(path + ": unexpected header");
  }
  const auto n = static_cast<Eigen::Index>((header.size() - 5) / 2);
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (header[static_cast<std::size_t>(1 + i)] != fmt::format("x_{}", i) ||
        header[static_cast<std::size_t>(1 + n + i)] != fmt::format("xstar_{}", i)) {
      throw TraceIoError(path + ": unexpected header");
    }
  }
  if (header[header.size() - 3] != "err" || header[header.size() - 2] != "cum_err" || header.back() != "phase") {
    throw TraceIoError(path + ": unexpected header");
  }

  Trace trace;
  trace.n = n;
  std::map<std::string, std::size_t> index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != header.size()) throw TraceIoError(fmt::format("line {}: wrong field count", line_no));
    const auto k = static_cast<Step>(parse_double(f[0], line_no));
    const std::string& name = f[1];
    auto it = index.find(name);
    if (it == index.end()) {
      it = index.emplace(name, trace.algorithms.size()).first;
      AlgorithmTrace a;
      a.name = name;
      a.kind = name;
      trace.algorithms.push_back(std::move(a));
    }
    AlgorithmTrace& a = trace.algorithms[it->second];
    if (static_cast<Step>(a.x.size()) != k) {
      throw TraceIoError(fmt::format("line {}: step {} out of order for {}", line_no, k, name));
    }
    Eigen::VectorXd x(n), xs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i) = parse_double(f[static_cast<std::size_t>(2 + i)], line_no);
      xs(i) = parse_double(f[static_cast<std::size_t>(2 + n + i)], line_no);
    }
    if (static_cast<Step>(trace.x_star.size()) == k) trace.x_star.push_back(xs);
    a.x.push_back(std::move(x));
    a.error.push_back(parse_double(f[f.size() - 3], line_no));
    a.cumulative.push_back(parse_double(f[f.size() - 2], line_no));
    a.phase.push_back(f.back());
    a.projected = true;
  }
  for (const auto& a : trace.algorithms) {
    if (a.x.size() != trace.x_star.size()) throw TraceIoError(path + ": algorithms have unequal lengths");
  }
  return trace;
}

void write_trace_json(const Trace& trace, const std::string& path) {
  nlohmann::json doc;
  doc["seed"] = trace.seed;
  doc["n"] = trace.n;
  doc["steps"] = trace.steps();
  nlohmann::json algs = nlohmann::json::array();
  for (const auto& a : trace.algorithms) {
    nlohmann::json j;
    j["name"] = a.name;
    j["kind"] = a.kind;
    j["b_checksum"] = fmt::format("{:016x}", a.b_checksum);
    j["final_cumulative_error"] = a.cumulative.empty() ? 0.0 : a.cumulative.back();
    j["feasibility_violations"] = a.feasibility_violations;
    j["events"] = events_json(a.events);
    nlohmann::json snapshots = nlohmann::json::array();
    for (const auto& d : a.d_hat) snapshots.push_back(vector_json(d));
    j["d_hat"] = std::move(snapshots);
    algs.push_back(std::move(j));
  }
  doc["algorithms"] = std::move(algs);
  auto out = open_for_write(path);
  out << doc.dump(1) << '\n';
  finish(out, path);
}

std::string summary_to_json(const Summary& summary) {
  nlohmann::json doc;
  doc["steps"] = summary.steps;
  doc["seed"] = summary.seed;
  nlohmann::json algs = nlohmann::json::array();
  for (const auto& a : summary.algorithms) {
    nlohmann::json j;
    j["name"] = a.name;
    j["final_cumulative_error"] = a.final_cumulative_error;
    j["best_window_median_error"] = a.best_window_median;
    j["best_window_start"] = a.best_window_start;
    j["window"] = a.window;
    j["first_structured_step"] = a.first_structured ? nlohmann::json(*a.first_structured) : nlohmann::json();
    nlohmann::json switches = nlohmann::json::array();
    for (const auto& s : a.phase_switches) switches.push_back({{"step", s.step}, {"phase", s.phase}});
    j["phase_switches"] = std::move(switches);
    j["events"] = events_json(a.events);
    j["feasibility_violations"] = a.feasibility_violations;
    algs.push_back(std::move(j));
  }
  doc["algorithms"] = std::move(algs);
  return doc.dump(2) + "\n";
}

void write_summary_json(const Summary& summary, const std::string& path) {
  auto out = open_for_write(path);
  out << summary_to_json(summary);
  finish(out, path);
}

std::string summary_to_table(const Summary& summary) {
  std::ostringstream os;
  os << fmt::format("{} steps\n", summary.steps);
  os << fmt::format("{:<12} {:>16} {:>16} {:>12} {:>10}\n", "algorithm", "cumulative", "best median",
                    "window at", "1st struct");
  for (const auto& a : summary.algorithms) {
    os << fmt::format("{:<12} {:>16.6e} {:>16.6e} {:>12} {:>10}\n", a.name, a.final_cumulative_error,
                      a.best_window_median, a.best_window_start,
                      a.first_structured ? std::to_string(*a.first_structured) : std::string("-"));
  }
  for (const auto& a : summary.algorithms) {
    for (const auto& s : a.phase_switches) {
      os << fmt::format("{}: step {} -> {}\n", a.name, s.step, s.phase);
    }
  }
  return os.str();
}

}  // namespace imopt
