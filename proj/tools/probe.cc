// Feasibility probe: per-level cost and rational bit growth of the
// quantize-then-transform pipeline at construction workloads.
#include "polar/metric.hh"
#include "polar/quantize.hh"
#include "polar/transform.hh"

#include <chrono>
#include <cstdio>
#include <string>

using namespace polar;
using Clock = std::chrono::steady_clock;

static size_t bits(const Rat& x)
{
	return mpz_sizeinbase(mpq_numref(x.get_mpq_t()), 2) +
	       mpz_sizeinbase(mpq_denref(x.get_mpq_t()), 2);
}

static void stats(const ParamList<Rat>& P, size_t& tb, size_t& mb)
{
	tb = mb = 0;
	for (auto& x : P.e) {
		tb = std::max(tb, bits(x.theta));
		mb = std::max(mb, bits(x.mu));
	}
}

static ParamList<Rat> unit()
{
	ParamList<Rat> P;
	P.e.push_back({Rat(1), Rat(39, 50)});
	return canonicalize(std::move(P));
}

static void run_interval(const OpWord& w, size_t Q, Direction dir)
{
	std::printf("== word %s Q=%zu %s ==\n", w.c_str(), Q,
	            dir == Direction::degrade ? "degrade" : "upgrade");
	auto P = unit();
	double total = 0;
	for (size_t i = 0; i < w.size(); ++i) {
		auto t0 = Clock::now();
		auto [Pq, cert] = quantize(P, {Q, dir, false});
		auto t1 = Clock::now();
		P = w[i] == '-' ? minus_canonical(Pq) : plus_canonical(Pq);
		auto t2 = Clock::now();
		size_t tb, mb;
		stats(P, tb, mb);
		double qms = std::chrono::duration<double, std::milli>(t1 - t0).count();
		double oms = std::chrono::duration<double, std::milli>(t2 - t1).count();
		total += qms + oms;
		std::printf("  lvl %2zu op %c  size %7zu  theta_bits %6zu  mu_bits %6zu  quant %8.1fms  op %8.1fms\n",
		            i + 1, w[i], P.size(), tb, mb, qms, oms);
	}
	auto t0 = Clock::now();
	auto [Pq, cert] = quantize(P, {Q, dir, false});
	Rat m = m_plus_canonical(Pq);
	auto t1 = Clock::now();
	total += std::chrono::duration<double, std::milli>(t1 - t0).count();
	std::printf("  final M approx %.6e   total %.1f ms\n", approx(m), total);
}

static void run_exact(const OpWord& w, size_t cap)
{
	std::printf("== exact word %s ==\n", w.c_str());
	auto P = unit();
	double total = 0;
	for (size_t i = 0; i < w.size(); ++i) {
		size_t proj = w[i] == '-' ? P.size() * P.size() : 2 * P.size() * P.size();
		if (proj > cap) {
			std::printf("  lvl %2zu: projected %zu exceeds cap %zu\n", i + 1, proj, cap);
			return;
		}
		auto t0 = Clock::now();
		P = w[i] == '-' ? minus_canonical(P) : plus_canonical(P);
		auto t1 = Clock::now();
		size_t tb, mb;
		stats(P, tb, mb);
		double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
		total += ms;
		std::printf("  lvl %2zu op %c  size %7zu  theta_bits %6zu  mu_bits %6zu  %8.1fms\n",
		            i + 1, w[i], P.size(), tb, mb, ms);
	}
	std::printf("  total %.1f ms\n", total);
}

int main(int argc, char** argv)
{
	setvbuf(stdout, nullptr, _IOLBF, 0);
	size_t Q = argc > 1 ? std::stoul(argv[1]) : 512;
	std::string mode = argc > 2 ? argv[2] : "interval";
	if (mode == "exact") {
		size_t cap = 1 << 22;
		run_exact("+++++++", cap);    // chain depth for n = 8 is 7
		run_exact("+-+-+-+", cap);
		run_exact("-+-+-+-", cap);
		run_exact("---++++", cap);
		return 0;
	}
	for (auto dir : {Direction::degrade, Direction::upgrade}) {
		run_interval("++++++++++", Q, dir);
		run_interval("+-+-+-+-+-", Q, dir);
	}
	return 0;
}
