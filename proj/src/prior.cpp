#include "stepbayes/prior.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "stepbayes/errors.hpp"
#include "stepbayes/kernel.hpp"

namespace stepbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double parse_number(std::string_view s) {
  try {
    std::size_t used = 0;
    const std::string str(s);
    const double v = std::stod(str, &used);
    if (used != str.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + std::string(s) + "' in prior");
  }
}

}  // namespace

HierarchyPrior HierarchyPrior::geometric(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("geometric parameter outside (0,1]");
  HierarchyPrior p;
  p.kind_ = Kind::geometric;
  p.parameter_ = theta;
  return p;
}

HierarchyPrior HierarchyPrior::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("bad Poisson mean");
  HierarchyPrior p;
  p.kind_ = Kind::poisson;
  p.parameter_ = mean;
  return p;
}

HierarchyPrior HierarchyPrior::table(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("bad prior weight");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("prior weights sum to zero");
  HierarchyPrior p;
  p.kind_ = Kind::table;
  p.parameter_ = static_cast<double>(weights.size());
  p.log_table_.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    p.log_table_[i] = weights[i] > 0.0 ? std::log(weights[i] / total) : kNegInf;
  return p;
}

HierarchyPrior HierarchyPrior::point_mass(std::size_t m) {
  std::vector<double> w(m + 1, 0.0);
  w[m] = 1.0;
  return table(std::move(w));
}

HierarchyPrior HierarchyPrior::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("prior must be kind:value");
  const auto kind = text.substr(0, colon);
  const auto arg = text.substr(colon + 1);
  try {
    if (kind == "geometric") return geometric(parse_number(arg));
    if (kind == "poisson") return poisson(parse_number(arg));
    if (kind == "point") {
      const double m = parse_number(arg);
      if (m < 0 || m != std::floor(m)) throw ConfigError("point prior needs a count");
      return point_mass(static_cast<std::size_t>(m));
    }
    if (kind == "table") {
      std::vector<double> w;
      std::string_view rest = arg;
      while (true) {
        const auto comma = rest.find(',');
        w.push_back(parse_number(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      return table(std::move(w));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid prior: ") + e.what());
  }
  throw ConfigError("unknown prior kind '" + std::string(kind) + "'");
}

double HierarchyPrior::log_mass(std::size_t m) const noexcept {
  switch (kind_) {
    case Kind::geometric:
      if (m == 0) return std::log(parameter_);
      if (parameter_ == 1.0) return kNegInf;
      return std::log(parameter_) + static_cast<double>(m) * std::log1p(-parameter_);
    case Kind::poisson:
      if (parameter_ == 0.0) return m == 0 ? 0.0 : kNegInf;
      return -parameter_ + static_cast<double>(m) * std::log(parameter_) - log_factorial(m);
    case Kind::table:
      return m < log_table_.size() ? log_table_[m] : kNegInf;
  }
  return kNegInf;
}

double HierarchyPrior::mass(std::size_t m) const noexcept { return std::exp(log_mass(m)); }

double HierarchyPrior::mass_through(std::size_t m_max) const noexcept {
  if (kind_ == Kind::geometric)
    return parameter_ == 1.0 ? 1.0
                             : -std::expm1(static_cast<double>(m_max + 1) * std::log1p(-parameter_));
  double s = 0.0;
  const std::size_t top = std::min(m_max, support_max());
  for (std::size_t m = 0; m <= top; ++m) s += mass(m);
  return std::min(s, 1.0);
}

std::size_t HierarchyPrior::support_max() const noexcept {
  if (kind_ == Kind::table) {
    for (std::size_t m = log_table_.size(); m-- > 0;)
      if (log_table_[m] != kNegInf) return m;
    return 0;
  }
  if (kind_ == Kind::geometric && parameter_ == 1.0) return 0;
  if (kind_ == Kind::poisson && parameter_ == 0.0) return 0;
  return SIZE_MAX;
}

HierarchyPrior HierarchyPrior::truncated(std::size_t m_max) const {
  std::vector<double> w(m_max + 1);
  for (std::size_t m = 0; m <= m_max; ++m) w[m] = mass(m);
  return table(std::move(w));
}

std::string HierarchyPrior::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::geometric:
      os << "geometric:" << parameter_;
      break;
    case Kind::poisson:
      os << "poisson:" << parameter_;
      break;
    case Kind::table:
      os << "table:";
      for (std::size_t i = 0; i < log_table_.size(); ++i) os << (i ? "," : "") << std::exp(log_table_[i]);
      break;
  }
  return os.str();
}

}  // namespace stepbayes
