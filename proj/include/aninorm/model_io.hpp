#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "aninorm/statespace.hpp"

namespace aninorm {

/// Malformed model files: missing keys, wrong shapes, non-finite entries.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Model = std::variant<CtStateSpace, DtStateSpace>;

/// Reads {"n","m","p","A".."D"} (continuous) or {"n","m","p","A_T".."D_T"}
/// (discrete); matrices are row-major nested arrays.
Model parse_model(const nlohmann::json& j);
Model read_model(const std::string& path);

nlohmann::json to_json(const CtStateSpace& sys);
nlohmann::json to_json(const DtStateSpace& sys);
nlohmann::json to_json(const MatrixXd& X);

/// JSON text with every floating-point number printed with 17 significant
/// digits.
std::string dump(const nlohmann::json& j, int indent = 2);

/// %.17g
std::string format_double(double x);

}  // namespace aninorm
