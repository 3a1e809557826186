#include "polar/transform.hh"
#include "util.hh"

#include <doctest.h>

#include <random>

using namespace polar;

namespace {

ParamList<Rat> unit_list(const Rat& theta)
{
	ParamList<Rat> P;
	P.e.push_back({Rat(1), theta});
	return P;
}

}  // namespace

TEST_SUITE("transform") {

TEST_CASE("op words map index bits, most significant first")
{
	CHECK(word_from_bits(0, 3) == "---");
	CHECK(word_from_bits(0b101, 3) == "+-+");
	CHECK(word_from_bits(1, 8) == "-------+");
	CHECK_THROWS_AS(check_word("+-x"), std::invalid_argument);
}

TEST_CASE("minus_op on singletons squares theta")
{
	auto M = minus_op(unit_list(Rat(39, 50)));
	REQUIRE(M.size() == 1);
	CHECK(M.e[0].mu == 1);
	CHECK(M.e[0].theta == Rat(39, 50) * Rat(39, 50));
}

TEST_CASE("plus_op shapes and values")
{
	auto Z = plus_op(unit_list(Rat(0)));
	REQUIRE(Z.size() == 2);    // symmetric zero case: {(1/2,0),(1/2,0)}
	CHECK(Z.e[0].mu == Rat(1, 2));
	CHECK(Z.e[0].theta == 0);
	CHECK(Z.e[1].mu == Rat(1, 2));
	CHECK(Z.e[1].theta == 0);

	auto P = plus_op(unit_list(Rat(39, 50)));
	REQUIRE(P.size() == 2);
	CHECK(P.e[0].mu == Rat(4021, 5000));      // (1 + 0.78^2)/2
	CHECK(P.e[0].theta == Rat(3900, 4021));   // 2*0.78/(1 + 0.78^2)
	CHECK(P.e[1].mu == Rat(979, 5000));       // (1 - 0.78^2)/2
	CHECK(P.e[1].theta == 0);

	auto D = plus_op(unit_list(Rat(1)));      // degenerate u=1 denominator
	REQUIRE(D.size() == 2);
	CHECK(D.e[0].mu == 1);
	CHECK(D.e[0].theta == 1);
	CHECK(D.e[1].mu == 0);
	CHECK(D.e[1].theta == 0);
}

TEST_CASE("raw output sizes are |P|^2 and 2|P|^2")
{
	std::mt19937_64 rng(23);
	for (int it = 0; it < 20; ++it) {
		auto P = random_rat_list(rng, 9);
		CHECK(minus_op(P).size() == P.size() * P.size());
		CHECK(plus_op(P).size() == 2 * P.size() * P.size());
	}
}

TEST_CASE("fused canonical ops equal canonicalize of raw ops")
{
	std::mt19937_64 rng(29);
	for (int it = 0; it < 200; ++it) {
		auto Pc = random_rat_list(rng, 12, true, it % 4 == 0);
		auto M1 = minus_canonical(Pc), M2 = canonicalize(minus_op(Pc));
		CHECK(same_multiset(M1, M2));
		CHECK(validate(M1).ok());
		auto P1 = plus_canonical(Pc), P2 = canonicalize(plus_op(Pc));
		CHECK(same_multiset(P1, P2));
		CHECK(validate(P1).ok());
	}
}

TEST_CASE("fused canonical ops match for the float backend")
{
	std::mt19937_64 rng(31);
	for (int it = 0; it < 50; ++it) {
		auto Pc = to_double_list(random_rat_list(rng, 10, true));
		auto M1 = minus_canonical(Pc), M2 = canonicalize(minus_op(Pc));
		REQUIRE(M1.size() == M2.size());
		for (size_t i = 0; i < M1.size(); ++i) {
			CHECK(M1.e[i].mu == doctest::Approx(M2.e[i].mu).epsilon(1e-12));
			CHECK(M1.e[i].theta == doctest::Approx(M2.e[i].theta).epsilon(1e-12));
		}
	}
}

TEST_CASE("streamed child enumeration is ascending and matches the raw ops")
{
	std::mt19937_64 rng(61);
	for (int it = 0; it < 150; ++it) {
		auto Pc = random_rat_list(rng, 10, true, it % 3 == 0);
		for (char op : {'-', '+'}) {
			ParamList<Rat> got;
			size_t out_of_order = 0;
			double last_lo = -1;
			for_each_child_ascending(Pc, op, [&](ParamList<Rat>::Entry&& x, double lo) {
				if (!got.e.empty() &&
				    lt_filtered(lo, x.theta, last_lo, got.e.back().theta))
					++out_of_order;
				if (x.mu <= 0)
					++out_of_order;
				last_lo = lo;
				got.e.push_back(std::move(x));
			});
			CHECK(out_of_order == 0);
			auto raw = op == '-' ? minus_op(Pc) : plus_op(Pc);
			CHECK(same_multiset(canonicalize(std::move(got)), canonicalize(std::move(raw))));
		}
	}

	ParamList<Rat> raw{{Rat(1, 2), Rat(3, 5)}, {Rat(1, 2), Rat(1, 5)}};
	auto sink = [](ParamList<Rat>::Entry&&, double) {};
	CHECK_THROWS_AS(for_each_child_ascending(raw, '-', sink), std::invalid_argument);
	CHECK_THROWS_AS(for_each_child_ascending(canonicalize(raw), '?', sink),
	                std::invalid_argument);
}

TEST_CASE("apply_word chains left to right")
{
	auto P = apply_word(unit_list(Rat(39, 50)), "--");
	REQUIRE(P.size() == 1);
	CHECK(P.e[0].theta == rat_pow(Rat(39, 50), 4));

	auto Q = apply_word(unit_list(Rat(39, 50)), "");
	REQUIRE(Q.size() == 1);
	CHECK(Q.canonical);

	std::mt19937_64 rng(37);
	for (int it = 0; it < 60; ++it) {
		auto P0 = random_rat_list(rng, 5);
		OpWord w;
		for (int k = int(rng() % 3); k-- > 0;)
			w += rng() % 2 ? '+' : '-';
		auto A = apply_word(P0, w, true);
		auto B = canonicalize(apply_word(P0, w, false));
		CHECK(same_multiset(A, B));
	}
}

TEST_CASE("apply_word enforces the size cap")
{
	ParamList<Rat> P{{Rat(1, 3), Rat(1, 10)}, {Rat(1, 3), Rat(1, 2)}, {Rat(1, 3), Rat(9, 10)}};
	CHECK_THROWS_AS(apply_word(P, "+", true, 5), std::length_error);
	CHECK_THROWS_AS(apply_word(P, "?"), std::invalid_argument);
}

TEST_CASE("theta_max_after follows the scalar recursion and the list maximum")
{
	CHECK(theta_max_after(Rat(39, 50), OpWord("-")) == Rat(39, 50) * Rat(39, 50));
	CHECK(theta_max_after(Rat(39, 50), OpWord("+")) == Rat(3900, 4021));
	CHECK(theta_max_after(0.5, OpWord("+-")) == doctest::Approx(0.64));

	std::mt19937_64 rng(41);
	for (int it = 0; it < 40; ++it) {
		Rat th(rng() % 1001, 1000);
		th.canonicalize();
		OpWord w;
		for (int k = int(1 + rng() % 4); k-- > 0;)
			w += rng() % 2 ? '+' : '-';
		auto P = apply_word(unit_list(th), w);
		REQUIRE(!P.e.empty());
		CHECK(P.e.back().theta == theta_max_after(th, w));
	}
}

}
