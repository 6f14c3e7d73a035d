#include "philr/report.hpp"

#include <fstream>

#include "philr/error.hpp"

namespace philr {

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  doc["tool_version"] = tool_version;
  doc["inputs"] = inputs;
  doc["outputs"] = outputs;
  return doc;
}

std::string RunReport::dump() const { return to_json().dump(2) + "\n"; }

void RunReport::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io_failure, "cannot write report " + path.string());
  out << dump();
  require(static_cast<bool>(out), ErrorKind::io_failure, "report write failed: " + path.string());
}

nlohmann::ordered_json without_timings(nlohmann::ordered_json doc) {
  if (doc.contains("outputs") && doc["outputs"].is_object()) doc["outputs"].erase("timings");
  return doc;
}

}  // namespace philr
