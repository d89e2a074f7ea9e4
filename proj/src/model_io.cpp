#include "aninorm/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace aninorm {
namespace {

using nlohmann::json;

MatrixXd read_matrix(const json& j, const char* key, Index rows, Index cols) {
  if (!j.contains(key)) throw ModelError(std::string("model file: missing \"") + key + "\"");
  const json& a = j.at(key);
  MatrixXd X(rows, cols);
  const auto bad_shape = [&] {
    return ModelError(std::string("model file: \"") + key + "\" must be a " +
                      std::to_string(rows) + "x" + std::to_string(cols) + " array");
  };
  if (!a.is_array() || static_cast<Index>(a.size()) != rows) {
    // An empty matrix with zero rows may also be written as [].
    if (rows == 0 && a.is_array() && a.empty()) return X;
    throw bad_shape();
  }
  for (Index i = 0; i < rows; ++i) {
    const json& row = a[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw bad_shape();
    for (Index k = 0; k < cols; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw bad_shape();
      X(i, k) = v.get<double>();
      if (!std::isfinite(X(i, k))) {
        throw ModelError(std::string("model file: non-finite entry in \"") + key + "\"");
      }
    }
  }
  return X;
}

Index read_dim(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0) {
    throw ModelError(std::string("model file: \"") + key + "\" must be a nonnegative integer");
  }
  return static_cast<Index>(j.at(key).get<long long>());
}

void write(std::ostringstream& os, const json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    case json::value_t::object: {
      if (j.empty()) { os << "{}"; return; }
      os << "{" << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << "," << nl;
        first = false;
        os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write(os, it.value(), indent, depth + 1);
      }
      os << nl << close_pad << "}";
      return;
    }
    case json::value_t::array: {
      // Numeric rows stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_primitive(); });
      if (j.empty()) { os << "[]"; return; }
      os << "[";
      bool first = true;
      for (const json& v : j) {
        if (!first) os << (flat ? ", " : ",");
        if (!flat) os << nl << pad;
        first = false;
        write(os, v, indent, depth + 1);
      }
      if (!flat) os << nl << close_pad;
      os << "]";
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

Model parse_model(const json& j) {
  if (!j.is_object()) throw ModelError("model file: expected a JSON object");
  const Index n = read_dim(j, "n");
  const Index m = read_dim(j, "m");
  const Index p = read_dim(j, "p");
  const bool ct = j.contains("A") || j.contains("B") || j.contains("C") || j.contains("D");
  const bool dt = j.contains("A_T") || j.contains("B_T") || j.contains("C_T") || j.contains("D_T");
  if (ct == dt) {
    throw ModelError("model file: give either A,B,C,D (continuous) or A_T,B_T,C_T,D_T (discrete)");
  }
  const char* keys[4] = {"A", "B", "C", "D"};
  const char* keys_t[4] = {"A_T", "B_T", "C_T", "D_T"};
  const char* const* k = ct ? keys : keys_t;
  MatrixXd A = read_matrix(j, k[0], n, n);
  MatrixXd B = read_matrix(j, k[1], n, m);
  MatrixXd C = read_matrix(j, k[2], p, n);
  MatrixXd D = read_matrix(j, k[3], p, m);
  try {
    if (ct) return CtStateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
    return DtStateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
  } catch (const std::exception& e) {
    throw ModelError(std::string("model file: ") + e.what());
  }
}

Model read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ModelError("model file " + path + ": " + e.what());
  }
  return parse_model(j);
}

json to_json(const MatrixXd& X) {
  json rows = json::array();
  for (Index i = 0; i < X.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < X.cols(); ++k) row.push_back(X(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const CtStateSpace& sys) {
  return json{{"n", sys.states()}, {"m", sys.inputs()}, {"p", sys.outputs()},
              {"A", to_json(sys.A())}, {"B", to_json(sys.B())},
              {"C", to_json(sys.C())}, {"D", to_json(sys.D())}};
}

json to_json(const DtStateSpace& sys) {
  return json{{"n", sys.states()}, {"m", sys.inputs()}, {"p", sys.outputs()},
              {"A_T", to_json(sys.A())}, {"B_T", to_json(sys.B())},
              {"C_T", to_json(sys.C())}, {"D_T", to_json(sys.D())}};
}

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // Keep the value a JSON float so it parses back as one.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string dump(const json& j, int indent) {
  std::ostringstream os;
  write(os, j, indent, 0);
  return os.str();
}

}  // namespace aninorm
