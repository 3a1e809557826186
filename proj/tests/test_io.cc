#include "polar/io.hh"
#include "util.hh"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace polar;

TEST_SUITE("io") {

TEST_CASE("list JSON round trips exactly for the exact backend")
{
	std::mt19937_64 rng(89);
	for (int it = 0; it < 30; ++it) {
		auto P = random_rat_list(rng, 8);
		auto Q = list_from_json<Rat>(list_to_json(P));
		REQUIRE(Q.size() == P.size());
		for (size_t i = 0; i < P.size(); ++i) {
			CHECK(Q.e[i].mu == P.e[i].mu);
			CHECK(Q.e[i].theta == P.e[i].theta);
		}
	}

	auto j = Json::parse(R"({"entries":[{"mu":"1/3","theta":"0.78"},
	                                    {"mu":"2/3","theta":-1}]})");
	auto P = list_from_json<Rat>(j);
	CHECK(P.e[0].mu == Rat(1, 3));
	CHECK(P.e[0].theta == Rat(39, 50));
	CHECK(P.e[1].theta == -1);

	CHECK_THROWS_AS(list_from_json<Rat>(Json::parse(R"({"entries":[{"mu":0.5,"theta":0}]})")),
	                std::invalid_argument);
	CHECK_THROWS_AS(list_from_json<Rat>(Json::parse(R"({"rows":[]})")), std::invalid_argument);
	CHECK(list_from_json<double>(Json::parse(R"({"entries":[{"mu":0.5,"theta":0.25}]})"))
	          .e[0]
	          .mu == 0.5);
}

TEST_CASE("list CSV round trips and rejects malformed rows")
{
	std::mt19937_64 rng(97);
	auto P = random_rat_list(rng, 10);
	std::ostringstream os;
	list_to_csv(os, P);
	std::istringstream is(os.str());
	auto Q = list_from_csv<Rat>(is);
	REQUIRE(Q.size() == P.size());
	for (size_t i = 0; i < P.size(); ++i) {
		CHECK(Q.e[i].mu == P.e[i].mu);
		CHECK(Q.e[i].theta == P.e[i].theta);
	}

	std::istringstream bad1("theta,mu\n1,0\n");
	CHECK_THROWS_AS(list_from_csv<Rat>(bad1), std::invalid_argument);
	std::istringstream bad2("mu,theta\n1\n");
	CHECK_THROWS_AS(list_from_csv<Rat>(bad2), std::invalid_argument);
}

TEST_CASE("records CSV round trips through the plain format")
{
	ParamList<Rat> base{{Rat(1), Rat(39, 50)}};
	auto recs = analyze_all(base, 3, AnalysisMode::exact);
	std::ostringstream os;
	write_records_csv(os, recs, CsvOptions{false, 45});
	std::istringstream is(os.str());
	auto back = read_records_csv(is);
	REQUIRE(back.size() == recs.size());
	for (size_t i = 0; i < recs.size(); ++i) {
		CHECK(back[i].index_bits == recs[i].index_bits);
		// 45 digits cover these exact values, so the round trip is lossless
		CHECK(back[i].ber_lower == recs[i].ber_lower);
		CHECK(back[i].m_upper == recs[i].m_upper);
		CHECK(back[i].mode == AnalysisMode::exact);
	}

	std::istringstream bad("index_bits,ber_lower\n");
	CHECK_THROWS_AS(read_records_csv(bad), std::invalid_argument);
}

TEST_CASE("spec JSON round trips with derived sets and bounds")
{
	ParamList<Rat> base{{Rat(1), Rat(39, 50)}};
	auto recs = analyze_all(base, 4, AnalysisMode::exact);
	auto spec = select_frozen(recs, SelectPolicy::count(8));
	auto back = spec_from_json(spec_to_json(spec));
	CHECK(back.n == spec.n);
	CHECK(back.i0 == spec.i0);
	CHECK(back.i1 == spec.i1);
	CHECK(back.i0_reversed == spec.i0_reversed);
	CHECK(back.i1_reversed == spec.i1_reversed);
	CHECK(back.block_lower == spec.block_lower);
	CHECK(back.block_upper == spec.block_upper);

	Json j = spec_to_json(spec);
	j["i1"] = Json::array();
	CHECK_THROWS_AS(spec_from_json(j), std::invalid_argument);
}

TEST_CASE("Monte Carlo statistics serialize with stable keys")
{
	McResult res;
	res.trials = 10;
	res.per_index.push_back({"01", 3, 10, 0.3, 0.1});
	Json g = mc_to_json(res, McMode::genie_per_index);
	CHECK(g["mode"] == "genie_per_index");
	CHECK(g["per_index"][0]["index_bits"] == "01");
	CHECK(g["per_index"][0]["errors"] == 3);
	CHECK(g["per_index"][0]["stderr"] == 0.1);

	McResult blk;
	blk.trials = 10;
	blk.block_errors = 2;
	blk.block_freq = 0.2;
	Json b = mc_to_json(blk, McMode::block);
	CHECK(b["block"]["errors"] == 2);
	CHECK(!b.contains("per_index"));
}

}
