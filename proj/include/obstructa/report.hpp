#ifndef OBSTRUCTA_REPORT_HPP
#define OBSTRUCTA_REPORT_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace obstructa {

/// All tests here are necessary conditions: ObstructionFound refutes
/// stabilizability / safety, NoObstruction only says the specific family
/// checked produced no contradiction, and Inconclusive carries no
/// information either way.
enum class Verdict { ObstructionFound, NoObstruction, Inconclusive };

std::string_view verdict_name(Verdict v);
Verdict verdict_from_name(std::string_view name);

struct ObstructionReport {
  std::string test;
  Verdict verdict = Verdict::Inconclusive;
  std::map<std::string, double> evidence;
  std::vector<std::string> assumptions;

  nlohmann::json to_json() const;
  static ObstructionReport from_json(const nlohmann::json& j);
};

}  // namespace obstructa

#endif
