#include "goldeneq/instance_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace goldeneq {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();  // row-major
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

[[noreturn]] void fail_field(const std::string& name, const std::string& why) {
  throw std::runtime_error("instance file: field '" + name + "' " + why);
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) fail_field(name, "is missing");
  return *it;
}

double number_field(const json& j, const char* name) {
  const json& f = field(j, name);
  if (!f.is_number()) fail_field(name, "is not a number");
  return f.get<double>();
}

Eigen::VectorXd vector_field(const json& j, const char* name, Eigen::Index expected) {
  const json& f = field(j, name);
  if (!f.is_array() || static_cast<Eigen::Index>(f.size()) != expected)
    fail_field(name, "is not an array of length " + std::to_string(expected));
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    if (!f[static_cast<std::size_t>(i)].is_number())
      fail_field(name, "holds a non-numeric entry");
    v[i] = f[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_field(const json& j, const char* name, Eigen::Index m) {
  const Eigen::VectorXd flat = vector_field(j, name, m * m);
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < m; ++k) out(i, k) = flat[i * m + k];
  return out;
}

}  // namespace

void save_instance(const ProblemInstance& instance, const std::filesystem::path& path) {
  json j;
  j["format_version"] = kInstanceFormatVersion;
  j["dimension"] = instance.dim();
  j["seed"] = instance.seed;
  j["rng_id"] = instance.rng_id;
  j["P"] = matrix_to_json(instance.bifunction.P());
  j["Q"] = matrix_to_json(instance.bifunction.Q());
  j["q"] = vector_to_json(instance.bifunction.q());
  j["box_lower"] = vector_to_json(instance.box.lower());
  j["box_upper"] = vector_to_json(instance.box.upper());
  j["x_start"] = vector_to_json(instance.x_start);
  j["xbar_start"] = vector_to_json(instance.xbar_start);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("instance file: cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("instance file: write failed: " + path.string());
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("instance file: cannot open: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("instance file: not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw std::runtime_error("instance file: top level is not an object");

  const json& version = field(j, "format_version");
  if (!version.is_number_integer() || version.get<int>() != kInstanceFormatVersion)
    fail_field("format_version", "must be " + std::to_string(kInstanceFormatVersion));

  const double dim_raw = number_field(j, "dimension");
  const auto m = static_cast<Eigen::Index>(dim_raw);
  if (m < 1 || static_cast<double>(m) != dim_raw) fail_field("dimension", "must be a positive integer");

  const json& seed_field = field(j, "seed");
  if (!seed_field.is_number_unsigned() && !seed_field.is_number_integer())
    fail_field("seed", "is not an integer");
  const auto seed = seed_field.get<std::uint64_t>();

  const json& rng_field = field(j, "rng_id");
  if (!rng_field.is_string()) fail_field("rng_id", "is not a string");

  const Eigen::MatrixXd p = matrix_field(j, "P", m);
  const Eigen::MatrixXd q_mat = matrix_field(j, "Q", m);
  const Eigen::VectorXd q_vec = vector_field(j, "q", m);
  const Eigen::VectorXd lower = vector_field(j, "box_lower", m);
  const Eigen::VectorXd upper = vector_field(j, "box_upper", m);
  const Eigen::VectorXd x_start = vector_field(j, "x_start", m);
  const Eigen::VectorXd xbar_start = vector_field(j, "xbar_start", m);

  return ProblemInstance(AffineBifunction(p, q_mat, q_vec), BoxSet(lower, upper), x_start,
                         xbar_start, seed, rng_field.get<std::string>());
}

}  // namespace goldeneq
