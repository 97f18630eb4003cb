// Reference external simulator: wraps the built-in generators behind the
// line protocol (one JSON request per line on stdin, one JSON reply per line
// on stdout; an empty line or EOF ends the session with exit code 0).

#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>

#include "crlearn/simulator.hpp"

using json = nlohmann::json;

int main(int argc, char** argv) {
  CLI::App app{"line-protocol wrapper around the built-in simulators"};
  std::string kind = "gaussian_location_scale";
  app.add_option("--kind", kind, "gaussian_location_scale | ar1");
  CLI11_PARSE(app, argc, argv);

  crlearn::SimulatorSpec spec;
  if (kind == "gaussian_location_scale")
    spec.kind = crlearn::SimulatorKind::GaussianLocationScale;
  else if (kind == "ar1")
    spec.kind = crlearn::SimulatorKind::AR1;
  else {
    std::cerr << "unknown kind '" << kind << "'\n";
    return 2;
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) break;
    json reply;
    try {
      const json request = json::parse(line);
      crlearn::Vector theta(request.at("theta").size());
      for (std::size_t i = 0; i < request.at("theta").size(); ++i)
        theta[static_cast<crlearn::Index>(i)] =
            request.at("theta")[i].get<double>();
      const auto n = request.at("n").get<crlearn::Index>();
      const auto seed = request.at("seed").get<std::uint64_t>();
      const crlearn::DataMatrix y = crlearn::simulate(spec, theta, n, seed);
      json rows = json::array();
      for (crlearn::Index i = 0; i < y.rows(); ++i) {
        json row = json::array();
        for (crlearn::Index j = 0; j < y.cols(); ++j)
          row.push_back(y.values()(i, j));
        rows.push_back(std::move(row));
      }
      reply["y"] = std::move(rows);
    } catch (const std::exception& e) {
      reply = json{{"error", e.what()}};
    }
    std::cout << reply.dump() << "\n" << std::flush;
  }
  return 0;
}
