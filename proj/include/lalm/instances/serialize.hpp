#pragma once

#include <lalm/instances/minimax.hpp>
#include <lalm/instances/tiny.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <string>
#include <variant>

namespace lalm {

using Json = nlohmann::json;

using InstanceData = std::variant<BpdnData, QcqpData, MinimaxData, TinyKind>;

/// Reproducible description of an instance: the generated data plus the
/// generator spec and seed it came from (null for hand-built data).
struct InstanceDocument {
  InstanceData data;
  Json spec;
  std::uint64_t seed = 0;
};

inline std::string instance_kind(const InstanceData& data) {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BpdnData>) return "bpdn";
        else if constexpr (std::is_same_v<T, QcqpData>) return "qcqp";
        else if constexpr (std::is_same_v<T, MinimaxData>) return "minimax";
        else return std::string("tiny:") + to_string(d);
      },
      data);
}

inline ProblemInstance build_instance(const InstanceData& data) {
  return std::visit(
      [](const auto& d) -> ProblemInstance {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BpdnData>) return build_bpdn(d);
        else if constexpr (std::is_same_v<T, QcqpData>) return build_qcqp(d);
        else if constexpr (std::is_same_v<T, MinimaxData>) return build_minimax(d);
        else return tiny_reference(d).first;
      },
      data);
}

namespace json_io {

inline Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double to_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InvalidArgument("instance JSON: expected a number, got " + j.dump());
}

inline Json vector(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

inline Vector to_vector(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("instance JSON: expected an array");
  Vector out(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) out[static_cast<Index>(i)] = to_number(j[i]);
  return out;
}

/// Dense matrix, row-major.
inline Json matrix(const Matrix& m) {
  Json values = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) values.push_back(number(m(i, j)));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", std::move(values)}};
}

inline Matrix to_matrix(const Json& j) {
  const Index rows = j.at("rows").get<Index>(), cols = j.at("cols").get<Index>();
  const Json& values = j.at("values");
  if (rows < 0 || cols < 0 || values.size() != static_cast<std::size_t>(rows * cols)) {
    throw InvalidArgument("instance JSON: matrix shape does not match its values");
  }
  Matrix out(rows, cols);
  std::size_t k = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c) out(i, c) = to_number(values[k++]);
  }
  return out;
}

inline Json box(const Box& b) { return Json{{"lower", vector(b.lower)}, {"upper", vector(b.upper)}}; }
inline Box to_box(const Json& j) { return Box{to_vector(j.at("lower")), to_vector(j.at("upper"))}; }

inline Json data(const BpdnData& d) {
  return Json{{"a", matrix(d.a)},           {"b", vector(d.b)},
              {"delta", number(d.delta)},   {"x_true", vector(d.x_true)},
              {"box", d.box ? box(*d.box) : Json()}, {"blocks", d.blocks}};
}

inline Json data(const QcqpData& d) {
  Json q = Json::array(), c = Json::array(), dd = Json::array();
  for (std::size_t j = 0; j < d.q.size(); ++j) {
    q.push_back(matrix(d.q[j]));
    c.push_back(vector(d.c[j]));
    dd.push_back(number(d.d[j]));
  }
  return Json{{"q", q}, {"c", c}, {"d", dd}, {"box", box(d.box)}, {"blocks", d.blocks}};
}

inline Json data(const MinimaxData& d) {
  Json pieces = Json::array();
  for (const auto& p : d.pieces) pieces.push_back(Json{{"q", matrix(p.q)}, {"c", vector(p.c)}, {"d", number(p.d)}});
  return Json{{"pieces", pieces}, {"box", box(d.box)}};
}

inline BpdnData to_bpdn(const Json& j) {
  BpdnData d;
  d.a = to_matrix(j.at("a"));
  d.b = to_vector(j.at("b"));
  d.delta = to_number(j.at("delta"));
  d.x_true = to_vector(j.at("x_true"));
  if (j.contains("box") && !j.at("box").is_null()) d.box = to_box(j.at("box"));
  d.blocks = j.value("blocks", Index{1});
  return d;
}

inline QcqpData to_qcqp(const Json& j) {
  QcqpData d;
  for (const auto& q : j.at("q")) d.q.push_back(to_matrix(q));
  for (const auto& c : j.at("c")) d.c.push_back(to_vector(c));
  for (const auto& v : j.at("d")) d.d.push_back(to_number(v));
  d.box = to_box(j.at("box"));
  d.blocks = j.value("blocks", Index{1});
  return d;
}

inline MinimaxData to_minimax(const Json& j) {
  MinimaxData d;
  for (const auto& p : j.at("pieces")) {
    d.pieces.push_back(QuadraticPiece{to_matrix(p.at("q")), to_vector(p.at("c")), to_number(p.at("d"))});
  }
  d.box = to_box(j.at("box"));
  return d;
}

}  // namespace json_io

inline Json to_json(const BpdnSpec& s) {
  return Json{{"rows", s.rows},
              {"cols", s.cols},
              {"sparsity", s.sparsity},
              {"noise", s.noise},
              {"delta_policy", s.delta_policy == BpdnSpec::DeltaPolicy::realized_noise ? "realized-noise" : "fixed"},
              {"delta_value", s.delta_value},
              {"dictionary", "identity"},
              {"blocks", s.blocks}};
}

inline Json to_json(const QcqpSpec& s) {
  return Json{{"m", s.m},         {"p", s.p},           {"lower", s.lower},
              {"upper", s.upper}, {"d_constraint", s.d_constraint}, {"blocks", s.blocks}};
}

inline InstanceDocument make_document(const BpdnSpec& spec) {
  return InstanceDocument{generate_bpdn_data(spec), to_json(spec), spec.seed};
}

inline InstanceDocument make_document(const QcqpSpec& spec) {
  return InstanceDocument{generate_qcqp_data(spec), to_json(spec), spec.seed};
}

inline InstanceDocument make_document(TinyKind kind) { return InstanceDocument{kind, Json(), 0}; }

inline Json to_json(const InstanceDocument& doc) {
  Json out{{"kind", instance_kind(doc.data)}, {"spec", doc.spec}, {"seed", doc.seed}};
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, TinyKind>) out["data"] = Json();
        else out["data"] = json_io::data(d);
      },
      doc.data);
  return out;
}

inline InstanceDocument document_from_json(const Json& j) {
  const auto kind = j.at("kind").get<std::string>();
  InstanceDocument doc;
  doc.spec = j.value("spec", Json());
  doc.seed = j.value("seed", std::uint64_t{0});
  if (kind == "bpdn") doc.data = json_io::to_bpdn(j.at("data"));
  else if (kind == "qcqp") doc.data = json_io::to_qcqp(j.at("data"));
  else if (kind == "minimax") doc.data = json_io::to_minimax(j.at("data"));
  else if (kind.rfind("tiny:", 0) == 0) doc.data = tiny_kind_from_string(kind.substr(5));
  else throw InvalidArgument("instance JSON: unknown kind '" + kind + "'");
  return doc;
}

inline void save_document(const InstanceDocument& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << to_json(doc).dump(1) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline InstanceDocument load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("instance JSON '" + path + "': " + e.what());
  }
  return document_from_json(j);
}

}  // namespace lalm
