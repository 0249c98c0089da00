#include "stepbayes/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "stepbayes/errors.hpp"

namespace stepbayes {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, std::size_t line, const char* what) {
  s = trim(s);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty())
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(s) + "'");
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> number_list(std::string_view s) {
  std::vector<double> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(parse_double(s.substr(0, comma), 1, "number"));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

DataSet read_dataset(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  bool header = false;
  std::vector<Observation> pts;
  while (std::getline(in, raw)) {
    ++line;
    const auto s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    if (!header) {
      if (s != "x,y") throw ParseError(line, "expected header 'x,y'");
      header = true;
      continue;
    }
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) throw ParseError(line, "expected two fields");
    const double x = parse_double(s.substr(0, comma), line, "covariate");
    if (!(x >= 0.0 && x <= 1.0)) throw ParseError(line, "covariate outside [0,1]");
    const auto y = trim(s.substr(comma + 1));
    if (y != "0" && y != "1") throw ParseError(line, "response must be 0 or 1");
    pts.push_back({x, y == "1"});
  }
  if (!header) throw ParseError(line, "missing header 'x,y'");
  return DataSet(std::move(pts));
}

DataSet load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_dataset(in);
}

void write_dataset(std::ostream& out, const DataSet& data) {
  out << "x,y\n";
  for (const auto& p : data.points()) out << format_double(p.x) << ',' << (p.y ? 1 : 0) << '\n';
}

void save_dataset(const DataSet& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_dataset(out, data);
}

RegressionFunction parse_function_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(1, std::string("invalid JSON: ") + e.what());
  }
  try {
    if (j.contains("grid")) return GridFunction(j.at("grid").get<std::vector<double>>());
    return StepFunction(j.value("breakpoints", std::vector<double>{}),
                        j.at("levels").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("bad function description: ") + e.what());
  }
}

RegressionFunction load_function(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_function_json(ss.str());
}

void write_function_json(std::ostream& out, const RegressionFunction& f) {
  nlohmann::json j;
  if (const auto* s = std::get_if<StepFunction>(&f)) {
    j["breakpoints"] = std::vector<double>(s->breakpoints().begin(), s->breakpoints().end());
    j["levels"] = std::vector<double>(s->levels().begin(), s->levels().end());
  } else {
    const auto& g = std::get<GridFunction>(f);
    j["grid"] = std::vector<double>(g.values().begin(), g.values().end());
  }
  out << j.dump() << '\n';
}

RegressionFunction parse_truth(std::string_view spec) {
  if (spec.starts_with("const:"))
    return StepFunction::constant(parse_double(spec.substr(6), 1, "level"));
  if (spec.starts_with("step:")) {
    spec.remove_prefix(5);
    const auto semi = spec.find(';');
    if (semi == std::string_view::npos) throw ParseError(1, "step truth needs 'splits;levels'");
    return StepFunction(number_list(spec.substr(0, semi)), number_list(spec.substr(semi + 1)));
  }
  return load_function(std::filesystem::path(std::string(spec)));
}

}  // namespace stepbayes
