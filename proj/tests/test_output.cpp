#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ktree/output.hpp"

using namespace ktree;
using ktree::output::ordered_json;

TEST_CASE("magnitude strings use the power shorthand only when exact") {
    CHECK(output::magnitudeString(Int(1) << 64) == "2^64");
    CHECK(output::magnitudeString(Int(2)) == "2^1");
    CHECK(output::magnitudeString(Int(12345)) == "12345");
    CHECK(output::magnitudeString((Int(1) << 64) - 59) == "18446744073709551557");
}

TEST_CASE("bound pair serialization is ordered and round-trippable") {
    BoundsEngine engine(Int(1) << 32, 4);
    BoundPair pb = engine.probBounds(Int(1626));
    ordered_json j = output::toJson(pb);
    REQUIRE(j.contains("lower"));
    REQUIRE(j.contains("upper"));
    CHECK(j["lower"]["rounding"] == "down");
    CHECK(j["upper"]["rounding"] == "up");
    double lo = std::stod(j["lower"]["decimal"].get<std::string>());
    double hi = std::stod(j["upper"]["decimal"].get<std::string>());
    CHECK(lo <= hi);
    CHECK(lo == doctest::Approx(pb.lower.toDouble()).epsilon(1e-12));
    // log2 values carry magnitudes decimals cannot
    CHECK(j["lower"]["log2"].get<double>() ==
          doctest::Approx(pb.lower.log2Value()).epsilon(1e-9));
}

TEST_CASE("huge bounds serialize without overflow via log2") {
    BoundsEngine engine(Int(1) << 256, 1024);
    BoundPair sz = engine.sizeBounds(Int(1) << 24);
    ordered_json j = output::toJson(sz);
    double log2 = j["upper"]["log2"].get<double>();
    CHECK(log2 > 500);  // astronomically large, still finite in the record
    std::string dec = j["upper"]["decimal"].get<std::string>();
    CHECK(dec.find('e') != std::string::npos);
}

TEST_CASE("sweep CSV has the frozen header and empty empirical cells") {
    SweepOptions options;
    std::vector<SweepRow> rows = sweepOverC(Int(1) << 64, 4, {1.0}, options);
    std::string csv = output::sweepCsv(rows);
    std::istringstream is(csv);
    std::string header, line;
    std::getline(is, header);
    CHECK(header ==
          "n,c,prob_lb,prob_ub,prob_analytic_lb,prob_analytic_ub,size_lb,size_ub,"
          "emp_rate,emp_ci99,emp_total_size_mean,emp_total_size_std,emp_max_level_mean");
    std::getline(is, line);
    // 13 columns; the last five are empty without empirical runs.
    CHECK(std::count(line.begin(), line.end(), ',') == 12);
    CHECK(line.substr(line.size() - 4) == ",,,,");
}

TEST_CASE("record envelope carries schema version, command, params") {
    ordered_json rec = output::record(
        "bounds", output::paramsJson(Int(1) << 64, 8, 65536, Mode::IntegerSum, 192),
        ordered_json{{"x", 1}});
    CHECK(rec["schemaVersion"] == 1);
    CHECK(rec["command"] == "bounds");
    CHECK(rec["params"]["mCompact"] == "2^64");
    CHECK(rec["params"]["m"] == "18446744073709551616");
    CHECK(rec["params"]["k"] == 8);
    CHECK(rec["params"]["mode"] == "int");
    CHECK(rec["results"]["x"] == 1);
}

TEST_CASE("flags serialization") {
    HypothesisFlags f = hypothesisCheck(Int(1) << 64, 4);
    ordered_json j = output::toJson(f);
    CHECK(j["allTrue"] == true);
    f = hypothesisCheck(Int(1) << 10, 4);
    j = output::toJson(f);
    CHECK(j["mGt30Pow"] == false);
    CHECK(j["allTrue"] == false);
}
