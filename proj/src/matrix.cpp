#include "ringlab/matrix.hpp"

#include <json.hpp>

#include "ringlab/error.hpp"

namespace ringlab {

std::string matrix_to_json(const Matrix& m) {
  const std::size_t d = m.dim();
  nlohmann::json j;
  j["dim"] = d;
  j["field"] = field_name(m.field());
  std::vector<double> re(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) re[i * d + k] = m(i, k).real();
  j["re"] = re;
  if (m.field() == Field::Complex) {
    std::vector<double> im(d * d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) im[i * d + k] = m(i, k).imag();
    j["im"] = im;
  }
  return j.dump();
}

Matrix matrix_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(std::string("matrix JSON: ") + e.what());
  }
  if (!j.contains("dim") || !j["dim"].is_number_unsigned())
    throw config_error("matrix JSON: missing positive integer 'dim'");
  const std::size_t d = j["dim"].get<std::size_t>();
  if (d == 0) throw config_error("matrix JSON: dim must be >= 1");

  Field field = Field::Complex;
  if (j.contains("field")) {
    const std::string f = j["field"].get<std::string>();
    if (f == "real")
      field = Field::Real;
    else if (f == "complex")
      field = Field::Complex;
    else
      throw config_error("matrix JSON: field must be 'real' or 'complex'",
                         0, "field");
  }

  if (!j.contains("re") || !j["re"].is_array() || j["re"].size() != d * d)
    throw config_error("matrix JSON: 're' must hold dim*dim values", 0, "re");
  std::vector<double> re = j["re"].get<std::vector<double>>();

  std::vector<double> im;
  if (j.contains("im")) {
    if (!j["im"].is_array() || j["im"].size() != d * d)
      throw config_error("matrix JSON: 'im' must hold dim*dim values", 0,
                         "im");
    im = j["im"].get<std::vector<double>>();
    if (field == Field::Real)
      for (double v : im)
        if (v != 0.0)
          throw config_error(
              "matrix JSON: real field with nonzero imaginary part", 0, "im");
  }

  Matrix m(d, field);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      m(i, k) = cplx{re[i * d + k], im.empty() ? 0.0 : im[i * d + k]};
  if (!m.finite()) throw config_error("matrix JSON: non-finite entries");
  return m;
}

}  // namespace ringlab
