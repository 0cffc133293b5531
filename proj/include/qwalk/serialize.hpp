#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qwalk/attractors.hpp"
#include "qwalk/evolve.hpp"

namespace qwalk::io {

using Json = nlohmann::json;

// Complex numbers are [re, im]; matrices are row-major nested arrays.
Json to_json(Complex z);
Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const ObservableReport& r);
Json to_json(const Attractor& a);

/// Accepts [re, im] pairs or plain reals. Throws ValidationError otherwise.
Complex complex_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);
Vector vector_from_json(const Json& j);

/// One header line, then one row per report. Doubles use 17 significant digits.
std::string reports_to_csv(const std::vector<ObservableReport>& reports);
std::string distribution_to_csv(const std::vector<double>& p);

std::string format_double(double x);

}  // namespace qwalk::io
