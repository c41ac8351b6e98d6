#pragma once

#include <memory>
#include <string>
#include <type_traits>
#include <variant>

#include <json.hpp>

#include "symcap/builders.hpp"
#include "symcap/certificate.hpp"
#include "symcap/expr_io.hpp"

namespace symcap {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCertificateSchema = "symcap.certificate/1";

namespace detail {

inline Json tuple_json(const AxisTuple& t) {
  Json arr = Json::array();
  for (const auto& v : t) arr.push_back(format(v));
  return arr;
}

inline AxisTuple tuple_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInput("expected an array of expressions");
  AxisTuple t;
  for (const auto& v : j) t.push_back(parse_expr(v.get<std::string>()));
  return t;
}

inline Json certificate_body(const EmbeddingCertificate& c);

inline Json rule_params(const StepRule& rule) {
  using namespace rules;
  Json p = Json::object();
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Permute>) {
          p["permutation"] = r.perm;
        } else if constexpr (std::is_same_v<T, Rescale>) {
          p["t"] = format(r.t);
          p["inner"] = certificate_body(*r.inner);
        } else if constexpr (std::is_same_v<T, Suspend>) {
          p["m"] = r.m;
          p["inner"] = certificate_body(*r.inner);
        } else if constexpr (std::is_same_v<T, AxiomMSsqrt> || std::is_same_v<T, AxiomMSg2>) {
          p["b"] = format(r.b);
        } else if constexpr (std::is_same_v<T, AxiomLambda35>) {
          p["lambda"] = format(r.lambda);
          p["b"] = format(r.b);
        } else if constexpr (std::is_same_v<T, BallPack4D>) {
          p["e"] = r.e.get_str();
          p["f"] = r.f.get_str();
          p["c"] = r.c.get_str();
          p["d"] = r.d.get_str();
        }
      },
      rule);
  return p;
}

inline Json certificate_body(const EmbeddingCertificate& c) {
  Json steps = Json::array();
  for (const auto& s : c.steps)
    steps.push_back(Json{{"rule", rule_name(s.rule)}, {"params", rule_params(s.rule)}, {"result", tuple_json(s.result)}});
  return Json{{"source", tuple_json(c.source.axes())}, {"target", tuple_json(c.target.axes())}, {"steps", std::move(steps)}};
}

inline EmbeddingCertificate certificate_from_body(const Json& j);

inline StepRule rule_from_json(const std::string& name, const Json& p) {
  using namespace rules;
  auto expr = [&](const char* key) { return parse_expr(p.at(key).get<std::string>()); };
  auto integer = [&](const char* key) { return parse_integer(p.at(key).get<std::string>()); };
  auto inner = [&]() { return std::make_shared<const EmbeddingCertificate>(certificate_from_body(p.at("inner"))); };
  if (name == "Inclusion") return Inclusion{};
  if (name == "Permute") return Permute{p.at("permutation").get<std::vector<std::size_t>>()};
  if (name == "Rescale") return Rescale{expr("t"), inner()};
  if (name == "Suspend") return Suspend{p.at("m").get<std::size_t>(), inner()};
  if (name == "AxiomMSsqrt") return AxiomMSsqrt{expr("b")};
  if (name == "AxiomMSg2") return AxiomMSg2{expr("b")};
  if (name == "AxiomTwoA1") return AxiomTwoA1{};
  if (name == "AxiomLambda35") return AxiomLambda35{expr("lambda"), expr("b")};
  if (name == "BallPack4D") return BallPack4D{integer("e"), integer("f"), integer("c"), integer("d")};
  throw InvalidInput("unknown rule '" + name + "'");
}

inline EmbeddingCertificate certificate_from_body(const Json& j) {
  EmbeddingCertificate c{Ellipsoid(tuple_from_json(j.at("source"))), Ellipsoid(tuple_from_json(j.at("target"))), {}};
  for (const auto& s : j.at("steps"))
    c.steps.push_back(EmbeddingStep{rule_from_json(s.at("rule").get<std::string>(), s.at("params")),
                                    tuple_from_json(s.at("result"))});
  return c;
}

}  // namespace detail

/// {schema, source, target, steps: [{rule, params, result}]}; every number
/// is a string in the expression grammar.
inline Json certificate_to_json(const EmbeddingCertificate& c) {
  Json body = detail::certificate_body(c);
  Json out{{"schema", kCertificateSchema}};
  for (const auto& item : body.items()) out[item.key()] = item.value();
  return out;
}

inline EmbeddingCertificate certificate_from_json(const Json& j) {
  try {
    if (j.contains("schema") && j.at("schema") != kCertificateSchema)
      throw InvalidInput("unsupported certificate schema " + j.at("schema").dump());
    return detail::certificate_from_body(j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed certificate JSON: ") + e.what());
  }
}

inline EmbeddingCertificate parse_certificate(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("certificate is not valid JSON: ") + e.what());
  }
  return certificate_from_json(j);
}

inline constexpr const char* kPackSchema = "symcap.pack/1";

inline Json pack_to_json(const PackCertificate& pc) {
  Json toric{{"method", pc.toric_explicit ? "explicit" : "affine"}, {"ok", pc.toric.ok}};
  return Json{{"schema", kPackSchema},
              {"k", pc.k.get_str()},
              {"n", pc.n},
              {"toric", std::move(toric)},
              {"ellipsoid", certificate_to_json(pc.ellipsoid)}};
}

}  // namespace symcap
