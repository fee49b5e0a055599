#include "suspflow/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "suspflow/errors.hpp"

namespace suspflow {

namespace {

namespace pt = boost::property_tree;

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_real(v[i]);
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw ValidationError("config: " + key + " is not a number");
  return v;
}

std::uint64_t to_count(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || s[0] == '-')
    throw ValidationError("config: " + key + " is not a non-negative integer");
  return v;
}

std::vector<double> to_list(const std::string& key, std::string text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') text.erase(0, 1);
  if (!text.empty() && text.back() == ']') text.pop_back();
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_real(key, item));
  }
  return out;
}

const char* kSections[] = {"roof", "cone", "budget", "run"};
const char* kKeys[][8] = {{"ell", "c0", "cos", "sin", "y_min", "y_max", "kappa0", nullptr},
                          {"gamma0", "r", nullptr},
                          {"max_words", "max_tuples", nullptr},
                          {"seed", "workers", "format", "output", nullptr}};

}  // namespace

RoofFunction RunConfig::roof() const {
  return RoofFunction(ell, c0, cos_coeffs, sin_coeffs, ClassBounds{y_min, y_max, kappa0});
}

ConeParams RunConfig::cone() const { return make_cone(roof(), gamma0, r); }

OrbitOptions RunConfig::orbit_options() const { return OrbitOptions{workers, max_words}; }

RunConfig RunConfig::parse(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.message() + " at line " +
                          std::to_string(e.line()));
  }
  for (const auto& [section, body] : tree) {
    int s = -1;
    for (int i = 0; i < 4; ++i)
      if (section == kSections[i]) s = i;
    if (s < 0) throw ValidationError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      bool known = false;
      for (int k = 0; kKeys[s][k]; ++k) known = known || key == kKeys[s][k];
      if (!known) throw ValidationError("config: unknown key " + section + "." + key);
    }
  }
  RunConfig c;
  auto get = [&](const char* path) { return tree.get_optional<std::string>(path); };
  if (auto v = get("roof.ell")) c.ell = static_cast<int>(to_count("roof.ell", *v));
  if (auto v = get("roof.c0")) c.c0 = to_real("roof.c0", *v);
  if (auto v = get("roof.cos")) c.cos_coeffs = to_list("roof.cos", *v);
  if (auto v = get("roof.sin")) c.sin_coeffs = to_list("roof.sin", *v);
  if (auto v = get("roof.y_min")) c.y_min = to_real("roof.y_min", *v);
  if (auto v = get("roof.y_max")) c.y_max = to_real("roof.y_max", *v);
  if (auto v = get("roof.kappa0")) c.kappa0 = to_real("roof.kappa0", *v);
  if (auto v = get("cone.gamma0")) c.gamma0 = to_real("cone.gamma0", *v);
  if (auto v = get("cone.r")) c.r = to_real("cone.r", *v);
  if (auto v = get("budget.max_words")) c.max_words = to_count("budget.max_words", *v);
  if (auto v = get("budget.max_tuples")) c.max_tuples = to_count("budget.max_tuples", *v);
  if (auto v = get("run.seed")) c.seed = to_count("run.seed", *v);
  if (auto v = get("run.workers")) c.workers = static_cast<int>(to_count("run.workers", *v));
  if (auto v = get("run.format")) c.format = trim(*v);
  if (auto v = get("run.output")) c.output = trim(*v);
  if (c.format != "json" && c.format != "csv")
    throw ValidationError("config: run.format must be json or csv");
  if (c.workers < 1) throw ValidationError("config: run.workers must be >= 1");
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

std::string serialize_impl(const RunConfig& c, bool with_run_env) {
  std::ostringstream o;
  o << "[roof]\n"
    << "ell = " << c.ell << "\n"
    << "c0 = " << fmt_real(c.c0) << "\n"
    << "cos = " << fmt_list(c.cos_coeffs) << "\n"
    << "sin = " << fmt_list(c.sin_coeffs) << "\n"
    << "y_min = " << fmt_real(c.y_min) << "\n"
    << "y_max = " << fmt_real(c.y_max) << "\n"
    << "kappa0 = " << fmt_real(c.kappa0) << "\n\n"
    << "[cone]\n"
    << "gamma0 = " << fmt_real(c.gamma0) << "\n"
    << "r = " << fmt_real(c.r) << "\n\n"
    << "[budget]\n"
    << "max_words = " << c.max_words << "\n"
    << "max_tuples = " << c.max_tuples << "\n\n"
    << "[run]\n"
    << "seed = " << c.seed << "\n";
  if (with_run_env) o << "workers = " << c.workers << "\n";
  o << "format = " << c.format << "\n";
  if (with_run_env) o << "output = " << c.output << "\n";
  return o.str();
}

}  // namespace

std::string RunConfig::serialize() const { return serialize_impl(*this, true); }

std::string RunConfig::digest() const { return fnv1a_hex(serialize_impl(*this, false)); }

std::string resolve_output_path(const std::string& path) {
  if (path.empty() || path == "-") return path;
  const char* dir = std::getenv("SUSPFLOW_OUTPUT_DIR");
  if (!dir || !*dir || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(dir) / path).string();
}

}  // namespace suspflow
