#pragma once

// JSON / CSV serialization of solver results and run manifests.

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatctl/bangbang.hpp"
#include "heatctl/oracle.hpp"

namespace heatctl {

using Json = nlohmann::ordered_json;

// Shortest text that is identical across runs: 17 significant digits.
std::string format_double(double x);

Json to_json(const DualCertificate& c);
Json to_json(const TargetSolution& s);
Json to_json(const TimeSolution& s);
Json to_json(const CurveReport& r);
Json to_json(const InverseReport& r);
Json to_json(const BangBangReport& r);
Json to_json(const UniquenessReport& r);
Json to_json(const OracleSolution& s);

std::vector<double> step_norms(const ControlProfile& u);

// tau,eps,converged
std::string curve_csv(const CurveReport& r);
// step,t,norm,bound,residual
std::string bang_bang_csv(const BangBangReport& r);

struct RunManifest {
  std::string scenario_name;
  std::string scenario_hash;
  std::string version = HEATCTL_VERSION;
  std::string command;
  std::chrono::system_clock::time_point started;
  std::chrono::system_clock::time_point finished;
  std::vector<std::string> outputs;
};

std::string iso_timestamp(std::chrono::system_clock::time_point t);
Json to_json(const RunManifest& m);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace heatctl
