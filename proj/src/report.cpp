#include "obstructa/report.hpp"

#include <stdexcept>

namespace obstructa {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ObstructionFound:
      return "ObstructionFound";
    case Verdict::NoObstruction:
      return "NoObstruction";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

Verdict verdict_from_name(std::string_view name) {
  if (name == "ObstructionFound") return Verdict::ObstructionFound;
  if (name == "NoObstruction") return Verdict::NoObstruction;
  if (name == "Inconclusive") return Verdict::Inconclusive;
  throw std::invalid_argument("unknown verdict: " + std::string(name));
}

nlohmann::json ObstructionReport::to_json() const {
  nlohmann::json j;
  j["test"] = test;
  j["verdict"] = std::string(verdict_name(verdict));
  j["evidence"] = evidence;
  j["assumptions"] = assumptions;
  return j;
}

ObstructionReport ObstructionReport::from_json(const nlohmann::json& j) {
  ObstructionReport r;
  r.test = j.value("test", "");
  r.verdict = verdict_from_name(j.at("verdict").get<std::string>());
  if (j.contains("evidence"))
    r.evidence = j.at("evidence").get<std::map<std::string, double>>();
  if (j.contains("assumptions"))
    r.assumptions = j.at("assumptions").get<std::vector<std::string>>();
  return r;
}

}  // namespace obstructa
