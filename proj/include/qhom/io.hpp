#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qhom/common.hpp"
#include "qhom/fourier.hpp"
#include "qhom/trigsum.hpp"
#include "qhom/winding.hpp"

namespace qhom::io {

using nlohmann::json;

// Shortest round-trip formatting; used for every CSV number so reruns are
// byte-identical.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  CsvWriter& raw(const std::string& s) {
    if (!first_) os_ << ",";
    os_ << s;
    first_ = false;
    return *this;
  }
  CsvWriter& col(double x) { return raw(fmt(x)); }
  CsvWriter& col(int x) { return raw(std::to_string(x)); }
  void endrow() {
    os_ << "\n";
    first_ = true;
  }

 private:
  std::ostream& os_;
  bool first_ = true;
};

// --- coefficient documents -------------------------------------------------
//
// {
//   "dimension": 1,
//   "size": 1,                          // optional, defaults to dimension
//   "entries": [
//     {"k": 1, "l": 1, "terms": [
//        {"freq": [0.0], "cos": 3.0},
//        {"freq": [1.0], "sin": 1.0},
//        {"freq": [1.4142135623730951], "sin": 1.0}]}
//   ],
//   "lambda": [[1.0], [1.4142135623730951]]   // optional M x d override
// }
//
// Indices k, l are 1-based in files.

inline TrigSum trig_from_json(const json& jterms, int dim) {
  TrigSum f(dim);
  for (const auto& t : jterms) {
    if (!t.contains("freq") || !t["freq"].is_array() || int(t["freq"].size()) != dim)
      throw Error(Errc::malformed_input, "term needs a freq array of length 'dimension'");
    Vec freq(dim);
    for (int c = 0; c < dim; ++c) freq[c] = t["freq"][c].get<double>();
    if (t.contains("cos")) f.add_cos(freq, t["cos"].get<double>());
    if (t.contains("sin")) f.add_sin(freq, t["sin"].get<double>());
  }
  return f;
}

struct CoefficientSpec {
  std::string name;
  QPMatrix A;
  std::optional<Mat> lambda_override;
};

inline CoefficientSpec coefficient_from_json(const json& j) {
  if (!j.contains("dimension")) throw Error(Errc::malformed_input, "missing 'dimension'");
  int dim = j["dimension"].get<int>();
  int size = j.value("size", dim);
  CoefficientSpec spec{j.value("name", std::string("custom")), QPMatrix(dim, size), {}};
  if (!j.contains("entries")) throw Error(Errc::malformed_input, "missing 'entries'");
  for (const auto& e : j["entries"]) {
    int k = e.at("k").get<int>() - 1;
    int l = e.at("l").get<int>() - 1;
    if (k < 0 || k >= size || l < 0 || l >= size)
      throw Error(Errc::malformed_input, "entry index out of range");
    TrigSum f = trig_from_json(e.at("terms"), dim);
    spec.A.at(k, l) = f;
    if (k != l) spec.A.at(l, k) = f;
  }
  if (j.contains("lambda")) {
    const auto& jl = j["lambda"];
    int M = int(jl.size());
    Mat L(M, dim);
    for (int i = 0; i < M; ++i)
      for (int c = 0; c < dim; ++c) L(i, c) = jl[i][c].get<double>();
    spec.lambda_override = L;
  }
  spec.A.validate();
  return spec;
}

inline CoefficientSpec preset(const std::string& name) {
  const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
  if (name == "constant-identity") {
    CoefficientSpec s{name, QPMatrix::scaled_identity(1, 1.0), {}};
    return s;
  }
  if (name == "constant-2.5") {
    CoefficientSpec s{name, QPMatrix::scaled_identity(1, 2.5), {}};
    return s;
  }
  if (name == "periodic-cos") {
    // a(x) = 2 + cos x
    QPMatrix A(1, 1);
    A.at(0, 0).add_cos(0.0, 2.0).add_cos(1.0, 1.0);
    Mat L(1, 1);
    L(0, 0) = 1.0;
    return {name, A, L};
  }
  if (name == "qp-sin-sqrt2") {
    // a(x) = 3 + sin x + sin(sqrt2 x)
    QPMatrix A(1, 1);
    A.at(0, 0).add_cos(0.0, 3.0).add_sin(1.0, 1.0).add_sin(s2, 1.0);
    Mat L(2, 1);
    L(0, 0) = 1.0;
    L(1, 0) = s2;
    return {name, A, L};
  }
  if (name == "remark-matrix") {
    // 2x2 example matrix over x in R: [[sin x + sin(sqrt2 x), cos(sqrt2 x)],
    // [cos(sqrt2 x), cos(sqrt3 x)]]. Not coercive; lift/restrict demo only.
    QPMatrix A(1, 2);
    A.at(0, 0).add_sin(1.0, 1.0).add_sin(s2, 1.0);
    A.at(0, 1).add_cos(s2, 1.0);
    A.at(1, 0).add_cos(s2, 1.0);
    A.at(1, 1).add_cos(s3, 1.0);
    Mat L(3, 1);
    L(0, 0) = 1.0;
    L(1, 0) = s2;
    L(2, 0) = s3;
    return {name, A, L};
  }
  throw Error(Errc::config, "unknown preset '" + name + "'");
}

// Accepts a preset name or a path to a coefficient JSON document.
inline CoefficientSpec load_coefficient(const std::string& arg) {
  if (arg.find(".json") != std::string::npos) {
    std::ifstream in(arg);
    if (!in) throw Error(Errc::config, "cannot open coefficient file " + arg);
    json j = json::parse(in, nullptr, true, true);
    return coefficient_from_json(j);
  }
  return preset(arg);
}

inline json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(row);
  }
  return rows;
}

inline json field_to_json(const MatrixField& b) {
  json out;
  out["M"] = b.M();
  json coeffs = json::array();
  for (const auto& [n, c] : b.coeffs()) {
    json jc;
    jc["n"] = n;
    json re = json::array(), im = json::array();
    for (int i = 0; i < c.rows(); ++i) {
      json rrow = json::array(), irow = json::array();
      for (int j = 0; j < c.cols(); ++j) {
        rrow.push_back(c(i, j).real());
        irow.push_back(c(i, j).imag());
      }
      re.push_back(rrow);
      im.push_back(irow);
    }
    jc["re"] = re;
    jc["im"] = im;
    coeffs.push_back(jc);
  }
  out["coeffs"] = coeffs;
  return out;
}

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

// "0.1,0.2;0.3,0.4" -> two 2-vectors; plain comma lists are 1-vectors.
inline std::vector<Vec> parse_vec_list(const std::string& s, int d) {
  std::vector<Vec> out;
  std::stringstream ss(s);
  std::string row;
  while (std::getline(ss, row, ';')) {
    if (row.empty()) continue;
    std::vector<double> vals = parse_double_list(row);
    if (d == 1 && int(vals.size()) > 1) {
      for (double v : vals) out.push_back(Vec::Constant(1, v));
      continue;
    }
    if (int(vals.size()) != d)
      throw Error(Errc::config, "vector entry has wrong dimension");
    Vec v(d);
    for (int c = 0; c < d; ++c) v[c] = vals[c];
    out.push_back(v);
  }
  return out;
}

}  // namespace qhom::io
