#include <sstream>

#include <doctest.h>

#include "netstation/errors.hpp"
#include "netstation/report.hpp"
#include "support.hpp"

using namespace netstation;

namespace {

struct Solved {
  Instance instance;
  StationProblem problem;
  ControlPlan plan;
};

const Solved& solvedMini() {
  static const Solved solved = [] {
    Instance instance = testing::loadWithRanges("mini_station.json", 5000);
    StationProblem problem(instance.spec, instance.scenario, instance.weights);
    const HighsBackend backend;
    StationSolver solver(problem, backend);
    ControlPlan plan = solver.solve();
    return Solved{std::move(instance), std::move(problem), std::move(plan)};
  }();
  return solved;
}

RunReport sampleRun(std::string status, std::size_t steps, double wall, std::optional<double> gap) {
  RunReport r;
  r.instance = "x";
  r.steps = steps;
  r.status = std::move(status);
  r.wallTime = wall;
  r.objective = 10.0;
  r.breakdown = {{"modeChange", 10.0}};
  r.gap = gap;
  r.lowerBound = gap ? std::optional<double>(10.0 * (1.0 - *gap)) : std::nullopt;
  r.shares = {0.5, 0.25, 0.25};
  return r;
}

}  // namespace

TEST_CASE("plan document") {
  const Solved& s = solvedMini();
  const auto doc = planToJson(s.problem, s.plan);
  REQUIRE(doc["steps"].size() == 5);
  CHECK(doc["steps"][0]["time"] == 0.0);
  CHECK(doc["steps"][4]["time"] == 60.0);
  CHECK(doc["steps"][0]["direction"].is_null());
  CHECK(doc["steps"][1]["direction"] == "f1");
  for (const auto& step : doc["steps"]) {
    const std::string mode = step["mode"];
    CHECK((mode == "oValve" || mode == "oComp"));
    const std::string regulator = step["regulators"]["rg1"];
    CHECK((regulator == "closed" || regulator == "bypass" || regulator == "active"));
  }
  CHECK(doc["objective"].get<double>() == doctest::Approx(s.plan.objective));
  double sum = 0.0;
  for (const auto& [key, value] : doc["breakdown"].items()) sum += value.get<double>();
  CHECK(sum == doctest::Approx(s.plan.objective));
  CHECK(doc.contains("timings"));
  CHECK(doc.contains("counts"));
}

TEST_CASE("states table") {
  const Solved& s = solvedMini();
  std::ostringstream out;
  writeStatesCsv(out, s.problem, s.plan.states);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("time,p.S,p.n1,p.n2,p.n3,p.X,", 0) == 0);
  CHECK(header.find("qin.p1,qout.p1") != std::string::npos);
  CHECK(header.find("q.cs1") != std::string::npos);
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("0,50,50,50,50,50,", 0) == 0);
  std::size_t rows = 1;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("run summaries") {
  const Solved& s = solvedMini();
  RunReport run = makeRunReport("mini", s.problem, s.plan, 1.25);
  run.lowerBound = s.plan.objective * 0.9;
  run.gap = 0.1;
  CHECK(run.steps == 4);
  CHECK(run.status == "ok");
  CHECK(run.modeChanges == 1);
  const RunReport back = runReportFromJson(toJson(run));
  CHECK(back == run);

  auto broken = toJson(run);
  broken.erase("status");
  CHECK_THROWS_AS(runReportFromJson(broken), SchemaError);

  const auto summary = aggregate({sampleRun("ok", 12, 1.0, 0.05), sampleRun("ok", 12, 3.0, 0.2),
                                  sampleRun("ok", 24, 2.0, std::nullopt),
                                  sampleRun("abort", 12, 9.0, std::nullopt)});
  CHECK(summary["runs"] == 4);
  CHECK(summary["status"]["ok"] == 3);
  CHECK(summary["status"]["abort"] == 1);
  CHECK(summary["wallTimeBySteps"]["12"]["count"] == 2);
  CHECK(summary["wallTimeBySteps"]["12"]["median"].get<double>() == doctest::Approx(2.0));
  CHECK(summary["wallTimeBySteps"]["24"]["max"].get<double>() == 2.0);
  CHECK(summary["gap"]["count"] == 2);
  CHECK(summary["gap"]["atMost10Percent"].get<double>() == doctest::Approx(0.5));
  CHECK(summary["meanShares"]["initial"].get<double>() == doctest::Approx(0.5));
  CHECK(aggregate({})["runs"] == 0);
}
