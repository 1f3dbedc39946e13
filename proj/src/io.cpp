#include "steerlab/io.hpp"

#include <fstream>
#include <iomanip>

#include "steerlab/error.hpp"

namespace steerlab {

nlohmann::json matrix_to_json(const CMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("matrix_to_json: matrix must be square");
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return {{"dim", m.rows()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im"))
    throw InvalidInput("matrix json: expected an object with dim, re and im");
  if (!j["dim"].is_number_integer() || j["dim"].get<long>() < 1)
    throw InvalidInput("matrix json: dim must be a positive integer");
  const auto dim = j["dim"].get<Eigen::Index>();
  const auto& re = j["re"];
  const auto& im = j["im"];
  const auto n = static_cast<std::size_t>(dim * dim);
  if (!re.is_array() || !im.is_array() || re.size() != n || im.size() != n)
    throw InvalidInput("matrix json: re and im must hold dim*dim numbers");
  CMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index k = 0; k < dim; ++k) {
      const auto idx = static_cast<std::size_t>(i * dim + k);
      if (!re[idx].is_number() || !im[idx].is_number()) throw InvalidInput("matrix json: non-numeric entry");
      m(i, k) = Complex(re[idx].get<double>(), im[idx].get<double>());
    }
  return m;
}

nlohmann::json map_to_json(const AdaptationMap& map) {
  return {{"variant", std::string(to_string(map.variant()))},
          {"e", matrix_to_json(map.matrix())},
          {"sigma_s", matrix_to_json(map.sigma_s().matrix())},
          {"sigma_a", matrix_to_json(map.sigma_a().matrix())}};
}

AdaptationMap map_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("variant") || !j["variant"].is_string())
    throw InvalidInput("map json: missing variant");
  for (const char* key : {"e", "sigma_s", "sigma_a"})
    if (!j.contains(key)) throw InvalidInput(std::string("map json: missing ") + key);
  return AdaptationMap(matrix_from_json(j["e"]), parse_map_variant(j["variant"].get<std::string>()),
                       HermitianMatrix(matrix_from_json(j["sigma_s"])),
                       HermitianMatrix(matrix_from_json(j["sigma_a"])));
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path + " for writing");
  os << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open " + path);
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void write_spectrum_csv(const Spectrum& spectrum, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path + " for writing");
  os << "theta_deg,power_db\n" << std::setprecision(10);
  for (std::size_t k = 0; k < spectrum.values.size(); ++k)
    os << spectrum.grid.angle(k) << "," << to_db(spectrum.values[k]) << "\n";
}

}  // namespace steerlab
