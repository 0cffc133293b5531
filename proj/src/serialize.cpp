#include "qwalk/serialize.hpp"

#include <cstdio>
#include <sstream>

#include "qwalk/errors.hpp"

namespace qwalk::io {

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v[i]));
  return out;
}

Json to_json(const ObservableReport& r) {
  Json j;
  j["n"] = r.step;
  j["position"] = r.position;
  j["manhattan"] = r.manhattan;
  j["tv"] = r.tv;
  j["entropy"] = r.entropy ? Json(*r.entropy) : Json(nullptr);
  if (r.variance) j["variance"] = *r.variance;
  if (!r.marginal_s.empty()) {
    j["marginal_s"] = r.marginal_s;
    j["marginal_t"] = r.marginal_t;
  }
  return j;
}

Json to_json(const Attractor& a) {
  Json j;
  j["lambda"] = to_json(a.lambda);
  j["kind"] = to_string(a.kind);
  j["matrix"] = to_json(a.matrix);
  j["residual"] = a.residual;
  return j;
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ValidationError("expected a number or a [re, im] pair, got " + j.dump());
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ValidationError("expected a nested array of rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ValidationError("ragged matrix rows");
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = complex_from_json(j[i][k]);
    }
  }
  return m;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("expected a non-empty array of amplitudes");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
  return v;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string reports_to_csv(const std::vector<ObservableReport>& reports) {
  std::ostringstream os;
  const std::size_t v = reports.empty() ? 0 : reports.front().position.size();
  os << "n";
  for (std::size_t x = 0; x < v; ++x) os << ",P" << x;
  os << ",manhattan,tv,entropy,variance\n";
  for (const auto& r : reports) {
    os << r.step;
    for (double p : r.position) os << ',' << format_double(p);
    os << ',' << format_double(r.manhattan) << ',' << format_double(r.tv) << ',';
    if (r.entropy) os << format_double(*r.entropy);
    os << ',';
    if (r.variance) os << format_double(*r.variance);
    os << '\n';
  }
  return os.str();
}

std::string distribution_to_csv(const std::vector<double>& p) {
  std::ostringstream os;
  os << "x,P\n";
  for (std::size_t x = 0; x < p.size(); ++x) os << x << ',' << format_double(p[x]) << '\n';
  return os.str();
}

}  // namespace qwalk::io
