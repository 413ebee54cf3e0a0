#include "scalekit/model_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace scalekit {

using nlohmann::json;

LevyModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model JSON parse error: ") + e.what());
  }
  LevyModel m;
  m.sigma = j.value("sigma", 0.0);
  m.drift = j.value("drift", 0.0);
  m.description = j.value("description", std::string{});
  if (j.contains("jumps") && !j["jumps"].is_null()) {
    const json& jj = j["jumps"];
    std::string kind = jj.value("kind", "none");
    m.jumps.lambda = jj.value("lambda", 0.0);
    if (kind == "none") {
      m.jumps.law = NoJumps{};
    } else if (kind == "exp") {
      m.jumps.law = ExponentialJumps{jj.at("rate").get<double>()};
    } else if (kind == "erlang") {
      m.jumps.law = ErlangJumps{jj.at("shape").get<int>(), jj.at("rate").get<double>()};
    } else if (kind == "hyperexp") {
      HyperExponentialJumps h;
      h.weights = jj.at("weights").get<std::vector<double>>();
      h.rates = jj.at("rates").get<std::vector<double>>();
      m.jumps.law = h;
    } else {
      throw ConfigError("unknown jump kind: " + kind);
    }
  }
  m.validate();
  return m;
}

LevyModel model_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

std::string model_to_json(const LevyModel& m) {
  json j;
  j["sigma"] = m.sigma;
  j["drift"] = m.drift;
  j["description"] = m.description;
  json jj;
  jj["lambda"] = m.jumps.lambda;
  struct Visitor {
    json* jj;
    void operator()(const NoJumps&) const { (*jj)["kind"] = "none"; }
    void operator()(const ExponentialJumps& e) const {
      (*jj)["kind"] = "exp";
      (*jj)["rate"] = e.rate;
    }
    void operator()(const ErlangJumps& e) const {
      (*jj)["kind"] = "erlang";
      (*jj)["shape"] = e.shape;
      (*jj)["rate"] = e.rate;
    }
    void operator()(const HyperExponentialJumps& h) const {
      (*jj)["kind"] = "hyperexp";
      (*jj)["weights"] = h.weights;
      (*jj)["rates"] = h.rates;
    }
  };
  std::visit(Visitor{&jj}, m.jumps.law);
  j["jumps"] = jj;
  return j.dump(2);
}

}  // namespace scalekit
