#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bathcool/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = bathcool::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::map<std::string, std::string> header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      csv.header[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (csv.columns.empty()) {
      csv.columns = cells;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    csv.rows.push_back(row);
  }
  return csv;
}

std::map<std::string, double> parse_report(const std::string& text) {
  std::map<std::string, double> values;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    try {
      values[line.substr(0, eq)] = std::stod(line.substr(eq + 1));
    } catch (const std::exception&) {
    }
  }
  return values;
}

const std::vector<std::string> kFigure{"simulate", "--law", "newton", "--t0", "2000", "--tr", "200",
                                       "--gamma", "1", "--t-end", "3", "--dt", "0.01"};

}  // namespace

TEST_CASE("simulate: analytic law rows") {
  const auto r = run(kFigure);
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  CHECK(csv.columns == std::vector<std::string>{"t", "value", "valid"});
  REQUIRE(csv.rows.size() == 301);
  CHECK(csv.rows.front()[0] == 0);
  CHECK(csv.rows.front()[1] == 2000);
  CHECK(csv.rows.back()[0] == 3);
  CHECK(csv.rows[99][2] == 1);   // t = 0.99
  CHECK(csv.rows[100][2] == 0);  // t = 1
  CHECK(csv.rows[50][1] == doctest::Approx(1291.75519).epsilon(1e-9));
}

TEST_CASE("simulate: modified curve reaches 800 at the inverted time") {
  const auto r = run({"simulate", "--law", "modified", "--t0", "2000", "--tr", "200", "--gamma", "1", "--t-end",
                      "0.788078", "--dt", "0.01"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  CHECK(csv.rows.back()[0] == doctest::Approx(0.788078));
  CHECK(std::abs(csv.rows.back()[1] - 800) < 0.1);
}

TEST_CASE("simulate: header carries the full parameter set") {
  const auto csv = parse_csv(run(kFigure).out);
  for (const char* key : {"command", "law", "gamma", "theta0", "t0", "tr", "map", "t_end", "dt", "steps", "format"})
    CHECK(csv.header.count(key) == 1);
  CHECK(csv.header.at("law") == "newton");
  CHECK(csv.header.at("steps") == "300");
}

TEST_CASE("simulate: output is deterministic and honours --out") {
  CHECK(run(kFigure).out == run(kFigure).out);
  const auto path = (std::filesystem::temp_directory_path() / "bathcool_cli_test.csv").string();
  auto args = kFigure;
  args.insert(args.end(), {"--out", path});
  const auto r = run(args);
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == run(kFigure).out);
  std::remove(path.c_str());
}

TEST_CASE("simulate: master-equation run tracks the modified occupation curve") {
  const std::vector<std::string> common{"--n0", "8", "--nr", "2", "--gamma", "1", "--dt", "0.005", "--t-end", "3"};
  auto lind = std::vector<std::string>{"simulate", "--law", "lindblad", "--model", "eq28"};
  lind.insert(lind.end(), common.begin(), common.end());
  auto modified = std::vector<std::string>{"simulate", "--law", "modified"};
  modified.insert(modified.end(), common.begin(), common.end());

  const auto a = run(lind);
  const auto b = run(modified);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const auto ca = parse_csv(a.out), cb = parse_csv(b.out);
  CHECK(ca.columns == std::vector<std::string>{"t", "n_bar", "trace", "purity", "valid", "neg_rate_flag"});
  CHECK(ca.header.at("dim") == "52");
  CHECK(ca.header.at("initial") == "number");
  REQUIRE(ca.rows.size() == cb.rows.size());
  double worst = 0;
  for (std::size_t k = 0; k < ca.rows.size(); ++k) worst = std::max(worst, std::abs(ca.rows[k][1] - cb.rows[k][1]));
  CHECK(worst < 1e-5);
}

TEST_CASE("simulate: ladder and temperature mapping") {
  const auto r = run({"simulate", "--law", "ladder", "--model", "markov", "--t0", "3", "--tr", "1", "--map", "exact",
                      "--gamma", "1", "--t-end", "1", "--dt", "0.01", "--record-every", "10"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  CHECK(csv.header.at("initial") == "thermal");
  CHECK(csv.rows.size() == 11);
  // Mean of the geometric distribution cut at dim levels.
  const double n = 1 / std::expm1(1.0 / 3), ratio = n / (1 + n);
  const double dim = std::stod(csv.header.at("dim")), rN = std::pow(ratio, dim);
  CHECK(rN < 1e-9);
  CHECK(csv.rows.front()[1] == doctest::Approx(ratio / (1 - ratio) - dim * rN / (1 - rN)).epsilon(1e-8));

  const auto linear = run({"simulate", "--law", "markov", "--t0", "30", "--tr", "10", "--theta0", "2", "--map",
                           "linear", "--gamma", "1", "--t-end", "0"});
  REQUIRE(linear.code == 0);
  CHECK(parse_csv(linear.out).rows.front()[1] == 15);
}

TEST_CASE("simulate: invalid arguments exit with 2") {
  CHECK(run({"simulate", "--law", "newton", "--t0", "2", "--tr", "1", "--n0", "3", "--gamma", "1"}).code == 2);
  CHECK(run({"simulate", "--law", "newton", "--gamma", "1"}).code == 2);
  CHECK(run({"simulate", "--law", "newton", "--t0", "2", "--tr", "1"}).code == 2);
  CHECK(run({"simulate", "--law", "bogus", "--t0", "2", "--tr", "1", "--gamma", "1"}).code == 2);
  CHECK(run({"simulate", "--law", "lindblad", "--t0", "2", "--tr", "1", "--gamma", "1"}).code == 2);
  CHECK(run({"simulate", "--law", "lindblad", "--model", "eq99", "--n0", "2", "--nr", "1", "--gamma", "1"}).code == 2);
  CHECK(run({"simulate", "--law", "newton", "--t0", "2", "--tr", "1", "--gamma", "1", "--map", "cubic"}).code == 2);
  CHECK(run({"simulate", "--law", "newton", "--t0", "2", "--tr", "1", "--gamma", "-1"}).code == 2);
  CHECK(run({"simulate", "--law", "newton", "--t0", "2", "--tr", "1", "--gamma", "1", "--dt", "0"}).code == 2);
  CHECK(run({"simulate", "--law", "newton", "--t0", "2", "--tr", "1", "--gamma", "1", "--format", "json"}).code == 2);
  CHECK(run({"simulate", "--law", "lindblad", "--n0", "2.5", "--nr", "1", "--gamma", "1", "--initial", "number"})
            .code == 2);
  CHECK(run({"simulate", "--law", "lindblad", "--n0", "9", "--nr", "1", "--gamma", "1", "--dim", "5"}).code == 2);
  CHECK(run({"simulate", "--law", "newton", "--t0", "2", "--tr", "1", "--gamma", "1", "--out", "/no/such/dir/x.csv"})
            .code == 2);
  CHECK(run({"simulate", "--frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("simulate: tolerance failure exits with 3") {
  // Negative absorption under the literal feedback law breaks positivity near t = 2.5.
  const auto r = run({"simulate", "--law", "lindblad", "--model", "eq27", "--n0", "0", "--nr", "2", "--gamma", "1",
                      "--dim", "40", "--dt", "0.005", "--t-end", "3"});
  CHECK(r.code == 3);
  CHECK(r.err.find("t=2.5") != std::string::npos);
}

TEST_CASE("halftime") {
  auto v = parse_report(run({"halftime", "--law", "newton", "--gamma", "1"}).out);
  CHECK(v.at("t_half") == doctest::Approx(0.693147).epsilon(1e-6));
  const auto modified = run({"halftime", "--law", "modified", "--gamma", "1"});
  CHECK(modified.out.find("formula=(sqrt(1+2*ln(2))-1)/gamma") != std::string::npos);
  CHECK(parse_report(modified.out).at("t_half") == doctest::Approx(0.544764).epsilon(1e-6));
  CHECK(parse_report(run({"halftime", "--law", "modified", "--gamma", "0.5"}).out).at("t_half") ==
        doctest::Approx(1.089527).epsilon(1e-6));
  CHECK(run({"halftime", "--law", "modified"}).code == 2);
  CHECK(run({"halftime", "--law", "lindblad", "--gamma", "1"}).code == 2);
}

TEST_CASE("cooltime") {
  const auto r = run({"cooltime", "--compare", "--t0", "2000", "--tr", "200", "--target", "800", "--gamma", "1"});
  REQUIRE(r.code == 0);
  const auto v = parse_report(r.out);
  CHECK(v.at("newton") == doctest::Approx(1.098612).epsilon(1e-6));
  CHECK(v.at("modified") == doctest::Approx(0.788078).epsilon(1e-6));
  CHECK(std::abs(v.at("ratio") - 0.7173) < 1e-4);

  const auto mid = parse_report(
      run({"cooltime", "--compare", "--t0", "2000", "--tr", "200", "--target", "1100", "--gamma", "1"}).out);
  CHECK(mid.at("newton") == doctest::Approx(parse_report(run({"halftime", "--law", "newton", "--gamma", "1"}).out)
                                                .at("t_half")));
  CHECK(mid.at("modified") == doctest::Approx(parse_report(run({"halftime", "--law", "modified", "--gamma", "1"}).out)
                                                  .at("t_half")));

  CHECK(parse_report(run({"cooltime", "--law", "modified", "--t0", "2000", "--tr", "200", "--target", "800",
                          "--gamma", "1"})
                         .out)
            .at("modified") == doctest::Approx(0.788078).epsilon(1e-6));
  CHECK(run({"cooltime", "--compare", "--t0", "2000", "--tr", "200", "--target", "100", "--gamma", "1"}).code == 2);
  CHECK(run({"cooltime", "--compare", "--t0", "2000", "--tr", "200", "--gamma", "1"}).code == 2);
}

TEST_CASE("verify") {
  const auto wick = run({"verify", "--suite", "wick"});
  CHECK(wick.code == 0);
  CHECK(wick.out.find("FAIL") == std::string::npos);
  CHECK(wick.out.find("PASS wick RLRL n=1") != std::string::npos);
  const auto ladder = run({"verify", "--suite", "ladder-equiv"});
  CHECK(ladder.code == 0);
  CHECK(ladder.out.find("measured=") != std::string::npos);
  CHECK(run({"verify", "--suite", "nope"}).code == 2);
}
