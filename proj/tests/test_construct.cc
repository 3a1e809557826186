#include "polar/construct.hh"
#include "oracle.hh"
#include "util.hh"

#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

using namespace polar;

namespace {

ParamList<Rat> bsc_base(const Rat& theta)
{
	ParamList<Rat> P;
	P.e.push_back({Rat(1), theta});
	return P;
}

// Random valid grid list: strictly ascending a in [0, 2^g], positive b
// summing exactly to 2^g. g <= 62 so slots fit plain integers.
DyadicList random_dyadic(std::mt19937_64& rng, long g, size_t max_len)
{
	DyadicList D;
	D.g = g;
	unsigned long top = 1ul << g;
	size_t len = 2 + rng() % max_len;
	std::set<unsigned long> av;
	if (rng() % 3 == 0)
		av.insert(0);
	if (rng() % 3 == 0)
		av.insert(top);
	while (av.size() < len)
		av.insert(rng() % (top + 1));
	unsigned long left = top;
	size_t i = av.size();
	for (unsigned long a : av) {
		D.a.push_back(mpz_class(a));
		unsigned long b = --i ? 1 + rng() % (left - i) : left;
		D.b.push_back(mpz_class(b));
		left -= b;
	}
	return D;
}

bool same_records(const std::vector<IndexRecord<Rat>>& A,
                  const std::vector<IndexRecord<Rat>>& B)
{
	if (A.size() != B.size())
		return false;
	for (size_t i = 0; i < A.size(); ++i)
		if (A[i].index_bits != B[i].index_bits || A[i].m_lower != B[i].m_lower ||
		    A[i].m_upper != B[i].m_upper || A[i].ber_lower != B[i].ber_lower ||
		    A[i].ber_upper != B[i].ber_upper || A[i].mode != B[i].mode)
			return false;
	return true;
}

}  // namespace

TEST_SUITE("construct") {

TEST_CASE("index helpers convert and reverse bits")
{
	CHECK(index_bits(0, 3) == "000");
	CHECK(index_bits(5, 3) == "101");
	CHECK(index_value("101") == 5);
	CHECK_THROWS_AS(index_value("10x"), std::invalid_argument);
	CHECK(bit_reverse(1, 3) == 4);    // 001 -> 100
	CHECK(bit_reverse(6, 4) == 6);    // 0110 palindromic
	for (uint64_t i = 0; i < 256; ++i) {
		CHECK(bit_reverse(bit_reverse(i, 8), 8) == i);
		CHECK(index_value(index_bits(i, 8)) == i);
	}
}

TEST_CASE("exact records match the joint-distribution oracle at n <= 2")
{
	std::mt19937_64 rng(71);
	for (int it = 0; it < 8; ++it) {
		auto base = random_rat_list(rng, 3, true);
		for (int n = 1; n <= 2; ++n) {
			auto rec = analyze_all(base, n, AnalysisMode::exact);
			auto ber = oracle_sc_ber(base, n, false);
			auto red = oracle_sc_ber(base, n, true);
			REQUIRE(rec.size() == ber.size());
			for (size_t i = 0; i < ber.size(); ++i) {
				CHECK(rec[i].ber_lower == ber[i]);
				CHECK(rec[i].ber_upper == ber[i]);
				CHECK(ber[i] == red[i]);    // sign reduction self-check
			}
		}
	}
}

TEST_CASE("exact records match the oracle at n = 3, including a theta = 1 base")
{
	std::mt19937_64 rng(73);
	std::vector<ParamList<Rat>> bases;
	bases.push_back(bsc_base(Rat(39, 50)));
	bases.push_back(ParamList<Rat>{{Rat(1, 2), Rat(1)}, {Rat(1, 2), Rat(1, 2)}});
	bases.push_back(random_rat_list(rng, 2, true));
	for (const auto& base : bases) {
		auto rec = analyze_all(base, 3, AnalysisMode::exact);
		auto ber = oracle_sc_ber(canonicalize(base), 3, true);
		for (size_t i = 0; i < 8; ++i)
			CHECK(rec[i].ber_lower == ber[i]);
	}
}

TEST_CASE("exact records match the oracle at n = 4 on a single-entry base")
{
	auto base = bsc_base(Rat(39, 50));
	auto rec = analyze_all(base, 4, AnalysisMode::exact);
	auto ber = oracle_sc_ber(base, 4, true);
	for (size_t i = 0; i < 16; ++i)
		CHECK(rec[i].ber_lower == ber[i]);
}

TEST_CASE("records carry the op-word metrics in index order")
{
	std::mt19937_64 rng(79);
	auto base = random_rat_list(rng, 6, true);
	auto rec = analyze_all(base, 3, AnalysisMode::exact);
	for (uint64_t i = 0; i < 8; ++i) {
		CHECK(rec[i].index_bits == index_bits(i, 3));
		CHECK(rec[i].m_lower == m_of_word(base, word_from_bits(i, 3)));
	}
}

TEST_CASE("single-one indices share one closed-form error probability")
{
	Rat theta(39, 50);
	auto base = bsc_base(theta);
	for (int n = 2; n <= 4; ++n) {
		auto rec = analyze_all(base, n, AnalysisMode::exact);
		Rat m1 = rat_pow(theta, 1ul << (n - 1));
		for (int k = 0; k < n; ++k) {
			auto& r = rec[size_t(1) << (n - 1 - k)];
			CHECK(r.m_lower == m1);
			CHECK(r.ber_lower == Rat((1 - m1) / 2));
		}
		CHECK(rec[0].m_lower == rat_pow(theta, 1ul << n));
	}
}

TEST_CASE("noiseless base stays noiseless in both modes")
{
	auto base = bsc_base(Rat(1));
	AnalyzeOptions opt;
	opt.q = 4;
	opt.grid_bits = 32;
	auto ex = analyze_all(base, 4, AnalysisMode::exact);
	auto iv = analyze_all(base, 4, AnalysisMode::interval, opt);
	for (size_t i = 0; i < 16; ++i) {
		CHECK(ex[i].ber_lower == 0);
		CHECK(ex[i].m_upper == 1);
		CHECK(iv[i].ber_lower == 0);
		CHECK(iv[i].ber_upper == 0);
		CHECK(iv[i].m_lower == 1);
	}
}

TEST_CASE("interval records bracket exact values and tighten with Q")
{
	ParamList<Rat> base{{Rat(1, 2), Rat(9, 10)}, {Rat(1, 2), Rat(2, 5)}};
	auto ex = analyze_all(base, 4, AnalysisMode::exact);
	Rat last_max(-1);
	for (size_t q : {64, 32, 16, 8}) {    // descending: widths must grow
		AnalyzeOptions opt;
		opt.q = q;
		opt.grid_bits = 128;
		auto iv = analyze_all(base, 4, AnalysisMode::interval, opt);
		Rat mx(0);
		for (size_t i = 0; i < 16; ++i) {
			CHECK(cmp(iv[i].m_lower, ex[i].m_lower) <= 0);
			CHECK(cmp(ex[i].m_upper, iv[i].m_upper) <= 0);
			CHECK(cmp(iv[i].ber_lower, ex[i].ber_lower) <= 0);
			CHECK(cmp(ex[i].ber_upper, iv[i].ber_upper) <= 0);
			CHECK(iv[i].mode == AnalysisMode::interval);
			Rat w = iv[i].ber_upper - iv[i].ber_lower;
			if (cmp(w, mx) > 0)
				mx = w;
		}
		CHECK(cmp(last_max, mx) < 0);
		last_max = mx;
		if (q == 8)
			CHECK(same_records(iv, analyze_all(base, 4, AnalysisMode::interval, opt)));
	}
}

TEST_CASE("worker splits reproduce the serial traversal")
{
	ParamList<Rat> base{{Rat(1, 2), Rat(9, 10)}, {Rat(1, 2), Rat(3, 5)}};
	AnalyzeOptions o1, o3;
	o1.q = o3.q = 8;
	o1.grid_bits = o3.grid_bits = 64;
	o3.threads = 3;
	for (auto mode : {AnalysisMode::exact, AnalysisMode::interval})
		CHECK(same_records(analyze_all(base, 4, mode, o1),
		                   analyze_all(base, 4, mode, o3)));
}

TEST_CASE("analyze_all rejects bad arguments")
{
	auto base = bsc_base(Rat(39, 50));
	AnalyzeOptions opt;
	CHECK_THROWS_AS(analyze_all(base, 0, AnalysisMode::exact), std::invalid_argument);
	CHECK_THROWS_AS(analyze_all(base, 27, AnalysisMode::exact), std::invalid_argument);
	opt.threads = 0;
	CHECK_THROWS_AS(analyze_all(base, 2, AnalysisMode::exact, opt), std::invalid_argument);
	opt.threads = 1;
	opt.q = 1;
	CHECK_THROWS_AS(analyze_all(base, 2, AnalysisMode::interval, opt), std::invalid_argument);
	opt.q = 8;
	opt.grid_bits = 4;
	CHECK_THROWS_AS(analyze_all(base, 2, AnalysisMode::interval, opt), std::invalid_argument);

	ParamList<double> fbase{{1.0, 0.78}};
	CHECK_THROWS_AS(analyze_all(fbase, 2, AnalysisMode::interval), std::invalid_argument);

	ParamList<Rat> off{{Rat(1, 2), Rat(1, 2)}};    // masses sum to 1/2
	CHECK_THROWS_AS(analyze_all(off, 2, AnalysisMode::exact), std::invalid_argument);

	opt = {};
	opt.size_cap = 8;
	ParamList<Rat> wide{{Rat(1, 4), Rat(1, 10)},
	                    {Rat(1, 4), Rat(3, 10)},
	                    {Rat(1, 4), Rat(2, 5)},
	                    {Rat(1, 4), Rat(4, 5)}};
	CHECK_THROWS_AS(analyze_all(wide, 4, AnalysisMode::exact, opt), std::length_error);
}

TEST_CASE("count selection ranks by m_lower with index-order ties")
{
	auto rec = analyze_all(bsc_base(Rat(39, 50)), 2, AnalysisMode::exact);
	// indices 01 and 10 tie exactly; 11 is best, 00 worst
	auto s2 = select_frozen(rec, SelectPolicy::count(2));
	CHECK(s2.i0 == std::vector<uint32_t>{1, 3});
	CHECK(s2.i1 == std::vector<uint32_t>{0, 2});
	auto s3 = select_frozen(rec, SelectPolicy::count(3));
	CHECK(s3.i0 == std::vector<uint32_t>{1, 2, 3});

	auto s0 = select_frozen(rec, SelectPolicy::count(0));
	CHECK(s0.i0.empty());
	CHECK(s0.i1.size() == 4);
	CHECK(s0.block_lower == 0);
	CHECK(s0.block_upper == 0);

	auto s4 = select_frozen(rec, SelectPolicy::count(4));
	CHECK(s4.i1.empty());

	// a noisy base pushes every BER toward 1/2, so the full sum clamps
	auto noisy = analyze_all(bsc_base(Rat(1, 10)), 2, AnalysisMode::exact);
	CHECK(select_frozen(noisy, SelectPolicy::count(4)).block_upper == 1);

	CHECK_THROWS_AS(select_frozen(rec, SelectPolicy::count(5)), std::invalid_argument);
	rec.pop_back();
	CHECK_THROWS_AS(select_frozen(rec, SelectPolicy::count(1)), std::invalid_argument);
}

TEST_CASE("threshold selection applies the doubly-exponential cut")
{
	// theta = 1/2, n = 1: m values {1/4, 1/2}; beta = 0 cuts at m >= 1/2,
	// met with exact equality by index 1 only.
	auto rec = analyze_all(bsc_base(Rat(1, 2)), 1, AnalysisMode::exact);
	auto s = select_frozen(rec, SelectPolicy::threshold(0.0));
	CHECK(s.i0 == std::vector<uint32_t>{1});
	CHECK(s.i1 == std::vector<uint32_t>{0});

	// noiseless base: slack is exactly zero, every index selected
	auto ones = analyze_all(bsc_base(Rat(1)), 2, AnalysisMode::exact);
	CHECK(select_frozen(ones, SelectPolicy::threshold(0.9)).i0.size() == 4);
}

TEST_CASE("block bounds take the worst member and the clamped sum")
{
	std::vector<IndexRecord<Rat>> rec;
	for (int i = 0; i < 4; ++i)
		rec.push_back({index_bits(uint64_t(i), 2), Rat(0), Rat(0),
		               detail::rat_frac(mpz_class(i + 1), mpz_class(10)),
		               detail::rat_frac(mpz_class(i + 2), mpz_class(10)), AnalysisMode::interval});
	auto b = block_error_bounds(rec, {0, 2});
	CHECK(b.first == Rat(3, 10));                              // max of 1/10, 3/10
	CHECK(b.second == detail::rat_frac(mpz_class(6), mpz_class(10)));  // 2/10 + 4/10
	CHECK(block_error_bounds(rec, {}) == std::pair<Rat, Rat>{Rat(0), Rat(0)});
	auto all = block_error_bounds(rec, {0, 1, 2, 3});
	CHECK(all.second == 1);    // 2+3+4+5 tenths clamps
	CHECK_THROWS_AS(block_error_bounds(rec, {4}), std::invalid_argument);
}

TEST_CASE("bit-reversed sets mirror the selection")
{
	auto rec = analyze_all(bsc_base(Rat(39, 50)), 3, AnalysisMode::exact);
	auto s = select_frozen(rec, SelectPolicy::count(5));
	std::set<uint32_t> seen;
	for (size_t k = 0; k < s.i0.size(); ++k)
		seen.insert(s.i0_reversed[k]);
	for (uint32_t ix : s.i0)
		CHECK(seen.count(uint32_t(bit_reverse(ix, 3))) == 1);
	CHECK(std::is_sorted(s.i0_reversed.begin(), s.i0_reversed.end()));
	CHECK(s.i0_reversed.size() + s.i1_reversed.size() == 8);

	CodeSpec<Rat> tiny;
	tiny.n = 3;
	tiny.i0 = {1};
	tiny = bit_reverse_sets(std::move(tiny));
	CHECK(tiny.i0_reversed == std::vector<uint32_t>{4});
}

TEST_CASE("paper-style strings switch form and direct the rounding")
{
	CHECK(paper_style_value(Rat(1, 4), true) == "2.500e-1");
	CHECK(paper_style_value(Rat(1, 7), true) == "1.429e-1");     // rounded up
	CHECK(paper_style_value(Rat(1, 7), false) == "1.428e-1");    // truncated
	// gamma = 1/7: below the 1/4 cutover, signed form
	Rat b = Rat(1, 2) - Rat(1, 7);
	CHECK(paper_style_value(b, true) == "-1.428e-1");     // gamma truncated
	CHECK(paper_style_value(b, false) == "-1.429e-1");    // gamma rounded up
	CHECK(paper_style_value(Rat(1, 2), true) == "-0");
	CHECK(paper_style_value(Rat(1, 2), false) == "-0");
}

TEST_CASE("record CSV emits directed plain values and the signed convention")
{
	std::vector<IndexRecord<Rat>> rec;
	rec.push_back({"0", Rat(1, 2), Rat(1, 2), Rat(1, 4), Rat(1, 4), AnalysisMode::exact});
	rec.push_back({"1", Rat(1, 3), Rat(2, 5), Rat(3, 10), Rat(1, 3), AnalysisMode::interval});

	std::ostringstream plain;
	CsvOptions po;
	po.sig = 6;
	write_records_csv(plain, rec, po);
	CHECK(plain.str() == "index_bits,ber_lower,ber_upper,m_lower,m_upper\n"
	                     "0,2.50000e-1,2.50000e-1,5.00000e-1,5.00000e-1\n"
	                     "1,3.00000e-1,3.33334e-1,3.33333e-1,4.00000e-1\n");

	std::ostringstream paper;
	CsvOptions pp;
	pp.paper_style = true;
	write_records_csv(paper, rec, pp);
	CHECK(paper.str() == "index_bits,ber_lower,ber_upper,m_lower,m_upper\n"
	                     "0,2.500e-1,2.500e-1,5.000e-1,5.000e-1\n"
	                     "1,-2.000e-1,-1.666e-1,3.333e-1,4.000e-1\n");
}

TEST_CASE("minus-then-plus orderings hold for the metric")
{
	std::mt19937_64 rng(83);
	for (int it = 0; it < 120; ++it) {
		auto P = random_rat_list(rng, 8);
		Rat m = m_value(P), mp = m_of_word(P, "+");
		CHECK(cmp(Rat(m * mp), m_of_word(P, "-+")) <= 0);
		CHECK(cmp(m_of_word(P, "-+"), m_of_word(P, "+-")) <= 0);
		for (unsigned k = 1; k <= 3; ++k) {
			OpWord w(k, '-');
			w += '+';
			Rat lo = Rat(rat_pow(m, (1ul << k) - 1) * mp);
			CHECK(cmp(lo, m_of_word(P, w)) <= 0);
			CHECK(cmp(m_of_word(P, w), rat_pow(mp, 1ul << k)) <= 0);
		}
	}
}

TEST_CASE("pairwise max identity via sum and difference")
{
	std::mt19937_64 rng(89);
	for (int it = 0; it < 500; ++it) {
		Rat a(int(rng() % 2001) - 1000, 1000), b(int(rng() % 2001) - 1000, 1000);
		a.canonicalize();
		b.canonicalize();
		Rat mx = cmp(abs(a), abs(b)) >= 0 ? Rat(abs(a)) : Rat(abs(b));
		CHECK(mx == Rat((abs(a + b) + abs(b - a)) / 2));
	}
}

}

TEST_SUITE("dyadic") {

TEST_CASE("grid lists validate and convert exactly")
{
	std::mt19937_64 rng(97);
	for (int it = 0; it < 200; ++it) {
		auto D = random_dyadic(rng, 16 + long(rng() % 3) * 8, 10);
		dyadic_check(D);
		auto L = dyadic_to_list(D);
		CHECK(L.canonical);
		CHECK(mass_sum(L) == 1);
		CHECK(dyadic_m(D) == m_value(L));
		for (auto dir : {Direction::degrade, Direction::upgrade}) {
			auto R = dyadic_from_list(L, D.g, dir);
			dyadic_check(R);
			REQUIRE(R.size() == D.size());
			for (size_t i = 0; i < D.size(); ++i) {
				CHECK(R.a[i] == D.a[i]);
				CHECK(R.b[i] == D.b[i]);
			}
		}
	}
	DyadicList bad;
	bad.g = 8;
	bad.a = {mpz_class(3), mpz_class(2)};
	bad.b = {mpz_class(128), mpz_class(128)};
	CHECK_THROWS_AS(dyadic_check(bad), std::invalid_argument);
	bad.a = {mpz_class(2), mpz_class(3)};
	bad.b = {mpz_class(128), mpz_class(127)};
	CHECK_THROWS_AS(dyadic_check(bad), std::invalid_argument);
}

TEST_CASE("grid snapping brackets arbitrary canonical lists")
{
	std::mt19937_64 rng(101);
	for (int it = 0; it < 200; ++it) {
		auto L = random_rat_list(rng, 10, true);
		auto lo = dyadic_from_list(L, 16, Direction::degrade);
		auto hi = dyadic_from_list(L, 16, Direction::upgrade);
		dyadic_check(lo);
		dyadic_check(hi);
		CHECK(cmp(dyadic_m(lo), m_value(L)) <= 0);
		CHECK(cmp(m_value(L), dyadic_m(hi)) <= 0);
	}
}

TEST_CASE("grid transforms keep the metric sandwich")
{
	std::mt19937_64 rng(103);
	for (int it = 0; it < 60; ++it) {
		auto L = random_rat_list(rng, 8, true);
		auto lo = dyadic_from_list(L, 16, Direction::degrade);
		auto hi = dyadic_from_list(L, 16, Direction::upgrade);
		Rat mm = m_value(minus_canonical(L)), mp = m_plus_canonical(L);
		auto lom = dyadic_minus(lo, Direction::degrade);
		auto him = dyadic_minus(hi, Direction::upgrade);
		auto lop = dyadic_plus(lo, Direction::degrade);
		auto hip = dyadic_plus(hi, Direction::upgrade);
		for (auto* D : {&lom, &him, &lop, &hip})
			dyadic_check(*D);
		CHECK(cmp(dyadic_m(lom), mm) <= 0);
		CHECK(cmp(mm, dyadic_m(him)) <= 0);
		CHECK(cmp(dyadic_m(lop), mp) <= 0);
		CHECK(cmp(mp, dyadic_m(hip)) <= 0);
	}
}

TEST_CASE("coarse grids make the minus transform exact")
{
	std::mt19937_64 rng(107);
	for (int it = 0; it < 100; ++it) {
		auto C = random_dyadic(rng, 8, 6);    // 8-bit values on a 32-bit grid
		DyadicList D;
		D.g = 32;
		for (size_t i = 0; i < C.size(); ++i) {
			D.a.push_back(C.a[i] << 24);
			D.b.push_back(C.b[i] << 24);
		}
		auto exact = minus_canonical(dyadic_to_list(D));
		for (auto dir : {Direction::degrade, Direction::upgrade}) {
			auto got = dyadic_to_list(dyadic_minus(D, dir));
			CHECK(same_multiset(got, exact));
		}
	}
}

TEST_CASE("theta-one branch degenerates without mass loss")
{
	auto L = canonicalize(ParamList<Rat>{{Rat(1, 2), Rat(1, 2)}, {Rat(1, 2), Rat(1)}});
	auto lo = dyadic_from_list(L, 16, Direction::degrade);
	auto hi = dyadic_from_list(L, 16, Direction::upgrade);
	auto lop = dyadic_plus(lo, Direction::degrade);
	auto hip = dyadic_plus(hi, Direction::upgrade);
	dyadic_check(lop);
	dyadic_check(hip);
	Rat mp = m_plus_canonical(L);
	CHECK(cmp(dyadic_m(lop), mp) <= 0);
	CHECK(cmp(mp, dyadic_m(hip)) <= 0);
}

TEST_CASE("fast merge quantizer mirrors the module greedy")
{
	std::mt19937_64 rng(109);
	for (int it = 0; it < 150; ++it) {
		auto D = random_dyadic(rng, 40, 24);
		size_t q = 1 + rng() % 10;
		auto L = dyadic_to_list(D);
		auto [ml, mc] = degrade(L, q);
		auto [dl, dc] = dyadic_quantize(D, q, Direction::degrade);
		dyadic_check(dl);
		REQUIRE(dl.size() == ml.size());
		Rat scale = Rat(1) / Rat(detail::pow2(D.g));
		for (size_t i = 0; i < dl.size(); ++i) {
			CHECK(Rat(Rat(dl.b[i]) * scale) == ml.e[i].mu);
			Rat th = Rat(Rat(dl.a[i]) * scale);
			CHECK(cmp(th, ml.e[i].theta) <= 0);
			CHECK(cmp(ml.e[i].theta, Rat(th + scale)) < 0);
		}
		CHECK(dc.actual_merge_loss_sum == mc.actual_merge_loss_sum);
		CHECK(dc.theta_c == mc.theta_c);
		CHECK(dc.delta_bound == mc.delta_bound);
		CHECK(cmp(dyadic_m(dl), dyadic_m(D)) <= 0);
		if (q >= D.size()) {
			CHECK(dl.size() == D.size());
			CHECK(dc.actual_merge_loss_sum == 0);
		}
	}
}

TEST_CASE("fast merge quantizer keeps module tie order on uniform lists")
{
	DyadicList D;
	D.g = 16;
	for (int i = 0; i < 8; ++i) {
		D.a.push_back(mpz_class(i * 4096));
		D.b.push_back(mpz_class(8192));
	}
	auto [dl, dc] = dyadic_quantize(D, 3, Direction::degrade);
	auto [ml, mc] = degrade(dyadic_to_list(D), 3);
	REQUIRE(dl.size() == ml.size());
	Rat scale = Rat(1) / Rat(detail::pow2(D.g));
	for (size_t i = 0; i < dl.size(); ++i) {
		CHECK(Rat(Rat(dl.b[i]) * scale) == ml.e[i].mu);
		CHECK(cmp(Rat(Rat(dl.a[i]) * scale), ml.e[i].theta) <= 0);
	}
	CHECK(dc.actual_merge_loss_sum == mc.actual_merge_loss_sum);
}

TEST_CASE("fast removal quantizer matches the module on a divisible lever")
{
	DyadicList D;
	D.g = 16;
	D.a = {mpz_class(0), mpz_class(256), mpz_class(512), mpz_class(65536)};
	D.b = {mpz_class(30000), mpz_class(2), mpz_class(30000), mpz_class(5534)};
	auto [dl, dc] = dyadic_quantize(D, 3, Direction::upgrade);
	auto [ml, mc] = upgrade(dyadic_to_list(D), 3);
	dyadic_check(dl);
	REQUIRE(dl.size() == 3);
	REQUIRE(ml.size() == 3);
	Rat scale = Rat(1) / Rat(detail::pow2(D.g));
	for (size_t i = 0; i < 3; ++i) {
		CHECK(Rat(Rat(dl.a[i]) * scale) == ml.e[i].theta);
		CHECK(Rat(Rat(dl.b[i]) * scale) == ml.e[i].mu);
	}
	CHECK(dc.actual_merge_loss_sum == mc.actual_merge_loss_sum);
	CHECK(dc.delta_bound == mc.delta_bound);
}

TEST_CASE("fast removal quantizer is one-sided and keeps boundaries")
{
	std::mt19937_64 rng(113);
	for (int it = 0; it < 150; ++it) {
		auto D = random_dyadic(rng, 40, 24);
		size_t q = 2 + rng() % 9;
		auto [up, cert] = dyadic_quantize(D, q, Direction::upgrade);
		dyadic_check(up);
		CHECK(up.size() == std::min(q, D.size()));
		CHECK(up.a.front() == D.a.front());
		CHECK(up.a.back() == D.a.back());
		CHECK(cmp(dyadic_m(D), dyadic_m(up)) <= 0);
		CHECK(cmp(cert.actual_merge_loss_sum, 0) >= 0);
		std::set<std::string> in;
		for (auto& a : D.a)
			in.insert(a.get_str());
		for (auto& a : up.a)
			CHECK(in.count(a.get_str()) == 1);
		if (q >= D.size())
			CHECK(cert.actual_merge_loss_sum == 0);
	}
}

TEST_CASE("leaf shortcut equals the canonical metrics")
{
	std::mt19937_64 rng(127);
	for (int it = 0; it < 200; ++it) {
		auto D = random_dyadic(rng, 32, 12);
		auto L = dyadic_to_list(D);
		Rat mv = m_value(L);
		CHECK(dyadic_leaf_m(D, '-') == Rat(mv * mv));
		CHECK(dyadic_leaf_m(D, '+') == m_plus_canonical(L));
	}
}

}
