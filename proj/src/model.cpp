#include "stopkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace stopkit {

using ordered_json = nlohmann::ordered_json;

double DiscreteDistribution::mean() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.value * a.prob;
  return s;
}

double DiscreteDistribution::maxValue() const {
  return atoms.empty() ? 0.0 : atoms.back().value;
}

double DiscreteDistribution::cdf(double v) const {
  double s = 0.0;
  for (const auto& a : atoms) {
    if (a.value <= v) s += a.prob;
  }
  return s;
}

double DiscreteDistribution::massAbove(double threshold) const {
  double s = 0.0;
  for (const auto& a : atoms) {
    if (a.value > threshold) s += a.prob;
  }
  return s;
}

double DiscreteDistribution::expectedMaxAgainst(double threshold) const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.prob * std::max(a.value, threshold);
  return s;
}

int DiscreteDistribution::nonzeroAtomCount() const {
  int c = 0;
  for (const auto& a : atoms) {
    if (a.value > 0.0) ++c;
  }
  return c;
}

DiscreteDistribution makeDistribution(std::vector<PointMass> atoms, bool padToOne) {
  std::map<double, double> mass;
  for (const auto& a : atoms) {
    if (a.prob > 0.0) mass[a.value] += a.prob;
  }
  if (padToOne) {
    double total = 0.0;
    for (const auto& [v, p] : mass) total += p;
    if (total < 1.0) mass[0.0] += 1.0 - total;
  }
  DiscreteDistribution d;
  d.atoms.reserve(mass.size());
  for (const auto& [v, p] : mass) {
    if (p > 0.0) d.atoms.push_back({v, p});
  }
  return d;
}

std::string ValidationReport::joined() const {
  std::string out;
  for (const auto& s : issues) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

ValidationReport validate(const Instance& instance) {
  ValidationReport report;
  auto issue = [&](const std::string& s) { report.issues.push_back(s); };
  if (instance.variables.empty()) issue("instance has no variables");
  if (!(instance.scale > 0.0)) issue("scale must be positive");
  for (int i = 0; i < instance.size(); ++i) {
    const auto& atoms = instance.variables[static_cast<std::size_t>(i)].atoms;
    std::string where = "variable " + std::to_string(i);
    if (atoms.empty()) {
      issue(where + ": no atoms");
      continue;
    }
    double total = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const auto& a = atoms[j];
      if (a.value < 0.0) issue(where + ": negative value " + std::to_string(a.value));
      if (!(a.prob > 0.0)) issue(where + ": nonpositive prob " + std::to_string(a.prob));
      if (a.prob > 1.0 + kMassTolerance)
        issue(where + ": prob " + std::to_string(a.prob) + " exceeds 1");
      if (j > 0) {
        if (a.value == atoms[j - 1].value)
          issue(where + ": duplicate value " + std::to_string(a.value));
        else if (a.value < atoms[j - 1].value)
          issue(where + ": values not sorted");
      }
      total += a.prob;
    }
    if (total < 1.0 - kMassTolerance)
      issue(where + ": mass deficit " + std::to_string(1.0 - total));
    else if (total > 1.0 + kMassTolerance)
      issue(where + ": mass surplus " + std::to_string(total - 1.0));
  }
  return report;
}

void requireValid(const Instance& instance) {
  ValidationReport report = validate(instance);
  if (!report.ok()) throw ValidationError("invalid instance: " + report.joined());
}

double expectedMax(const Instance& instance, std::size_t supportCap) {
  std::vector<double> grid;
  for (const auto& var : instance.variables) {
    for (const auto& a : var.atoms) grid.push_back(a.value);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() > supportCap)
    throw LimitError("union support of " + std::to_string(grid.size()) +
                     " values exceeds the cap of " + std::to_string(supportCap));
  if (grid.empty()) return 0.0;

  // P(max <= grid[j]) as a running product of per-variable CDFs.
  std::vector<double> pAtMost(grid.size(), 1.0);
  for (const auto& var : instance.variables) {
    double cumulative = 0.0;
    std::size_t next = 0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      while (next < var.atoms.size() && var.atoms[next].value <= grid[j])
        cumulative += var.atoms[next++].prob;
      pAtMost[j] *= std::min(cumulative, 1.0);
    }
  }
  double e = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    e += grid[j] * (pAtMost[j] - prev);
    prev = pAtMost[j];
  }
  return e;
}

Instance normalize(const Instance& instance) {
  double e = expectedMax(instance);
  if (!(e > 0.0)) throw ValidationError("cannot normalize: expected maximum is 0");
  Instance out = instance;
  for (auto& var : out.variables) {
    for (auto& a : var.atoms) a.value /= e;
  }
  out.scale = instance.scale * e;
  return out;
}

namespace {

Instance instanceFromJson(const ordered_json& j) {
  if (!j.is_object()) throw ParseError("instance file: top level must be an object");
  if (!j.contains("variables")) throw ParseError("instance file: missing \"variables\"");
  const auto& vars = j.at("variables");
  if (!vars.is_array()) throw ParseError("instance file: \"variables\" must be an array");
  Instance inst;
  if (j.contains("scale")) {
    if (!j.at("scale").is_number()) throw ParseError("instance file: \"scale\" must be a number");
    inst.scale = j.at("scale").get<double>();
  }
  int vi = 0;
  for (const auto& v : vars) {
    std::string where = "variable " + std::to_string(vi++);
    if (!v.is_object() || !v.contains("atoms"))
      throw ParseError("instance file: " + where + " missing \"atoms\"");
    const auto& atoms = v.at("atoms");
    if (!atoms.is_array()) throw ParseError("instance file: " + where + " \"atoms\" must be an array");
    DiscreteDistribution dist;
    for (const auto& a : atoms) {
      if (!a.is_object() || !a.contains("value") || !a.contains("prob"))
        throw ParseError("instance file: " + where + " atom needs \"value\" and \"prob\"");
      if (!a.at("value").is_number() || !a.at("prob").is_number())
        throw ParseError("instance file: " + where + " atom fields must be numbers");
      dist.atoms.push_back({a.at("value").get<double>(), a.at("prob").get<double>()});
    }
    std::sort(dist.atoms.begin(), dist.atoms.end(),
              [](const PointMass& x, const PointMass& y) { return x.value < y.value; });
    inst.variables.push_back(std::move(dist));
  }
  ValidationReport report = validate(inst);
  if (!report.ok()) throw ParseError("instance file: " + report.joined());
  return inst;
}

ordered_json instanceToJson(const Instance& instance) {
  ordered_json j;
  j["scale"] = instance.scale;
  ordered_json vars = ordered_json::array();
  for (const auto& var : instance.variables) {
    ordered_json atoms = ordered_json::array();
    for (const auto& a : var.atoms) {
      ordered_json atom;
      atom["value"] = a.value;
      atom["prob"] = a.prob;
      atoms.push_back(std::move(atom));
    }
    ordered_json v;
    v["atoms"] = std::move(atoms);
    vars.push_back(std::move(v));
  }
  j["variables"] = std::move(vars);
  return j;
}

}  // namespace

Instance instanceFromJsonText(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance file: ") + e.what());
  }
  return instanceFromJson(j);
}

std::string instanceToJsonText(const Instance& instance) {
  return instanceToJson(instance).dump(2) + "\n";
}

Instance readInstance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return instanceFromJsonText(ss.str());
}

void writeInstance(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << instanceToJsonText(instance);
}

SchemeConfig SchemeConfig::desk(double epsilon) {
  SchemeConfig c;
  c.epsilon = epsilon;
  c.smallProbExp = 2.0;
  c.ignoreMassExp = 2.0;
  c.blockMassExp = 1.0;
  c.blockCountExp = 1.0;
  c.profile = Profile::Desk;
  c.validate();
  return c;
}

SchemeConfig SchemeConfig::theoretical(double epsilon) {
  SchemeConfig c;
  c.epsilon = epsilon;
  c.smallProbExp = 20.0;
  c.ignoreMassExp = 10.0;
  c.blockMassExp = 4.0;
  c.blockCountExp = 4.0;
  c.profile = Profile::Theoretical;
  c.validate();
  return c;
}

void SchemeConfig::validate() const {
  if (!(epsilon > 0.0) || !(epsilon < 0.5))
    throw ValidationError("epsilon must lie in (0, 0.5), got " + std::to_string(epsilon));
  if (!(smallProbExp > 0.0) || !(ignoreMassExp > 0.0) || !(blockMassExp > 0.0) ||
      !(blockCountExp > 0.0))
    throw ValidationError("scheme exponents must be positive");
}

double SchemeConfig::smallProbThreshold() const { return std::pow(epsilon, smallProbExp); }

double SchemeConfig::ignoreMassThreshold() const { return std::pow(epsilon, ignoreMassExp); }

double SchemeConfig::highValueThreshold() const { return 1.0 / (epsilon * epsilon); }

int SchemeConfig::blockCount() const {
  double k = std::pow(epsilon, -blockCountExp);
  return std::max(1, static_cast<int>(std::llround(k)));
}

const char* SchemeConfig::profileName() const {
  return profile == Profile::Desk ? "desk" : "theoretical";
}

}  // namespace stopkit
