// Command-line surface: construct / quantize / select / bounds / simulate,
// composing through the CSV and JSON artifact formats.
#include "polar/io.hh"
#include "polar/quantize.hh"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace polar;

namespace {

struct BaseOpts {
	std::string theta, bsc, list;
};

void add_base_flags(CLI::App* cmd, BaseOpts& b)
{
	auto* t = cmd->add_option("--theta", b.theta, "single-entry base with this theta");
	auto* e = cmd->add_option("--bsc", b.bsc, "crossover eps; base becomes {(1, 1-2eps)}");
	auto* l = cmd->add_option("--list", b.list, "base list file (.json or .csv)");
	t->excludes(e)->excludes(l);
	e->excludes(t)->excludes(l);
	l->excludes(t)->excludes(e);
}

ParamList<Rat> base_of(const BaseOpts& b)
{
	int got = int(!b.theta.empty()) + int(!b.bsc.empty()) + int(!b.list.empty());
	if (got != 1)
		throw std::invalid_argument("exactly one of --theta/--bsc/--list is required");
	if (!b.list.empty())
		return load_list<Rat>(b.list);
	ParamList<Rat> P;
	if (!b.theta.empty()) {
		P.e.push_back({Rat(1), rat_from_decimal(b.theta)});
	} else {
		Rat eps = rat_from_decimal(b.bsc);
		if (eps < 0 || eps > Rat(1, 2))
			throw std::invalid_argument("--bsc must lie in [0, 1/2]");
		P.e.push_back({Rat(1), Rat(1 - 2 * eps)});
	}
	return P;
}

ChannelModel channel_of(const BaseOpts& b)
{
	ParamList<double> base;
	for (const auto& x : base_of(b).e)
		base.e.push_back({approx(x.mu), approx(x.theta)});
	return ChannelModel::from_list(std::move(base));
}

void write_out(const std::string& path, const std::string& text)
{
	if (path.empty() || path == "-") {
		std::cout << text;
		return;
	}
	std::ofstream f(path);
	if (!f)
		throw std::invalid_argument("cannot open output file: " + path);
	f << text;
}

SelectPolicy policy_of(bool has_k, size_t k, bool has_beta, double beta)
{
	if (has_k == has_beta)
		throw std::invalid_argument("exactly one of --k/--beta is required");
	return has_k ? SelectPolicy::count(k) : SelectPolicy::threshold(beta);
}

void cmd_construct(const BaseOpts& b, int n, const std::string& mode, AnalyzeOptions opt,
                   bool paper_style, int sig, const std::string& out)
{
	if (mode != "exact" && mode != "interval")
		throw std::invalid_argument("--mode must be exact or interval");
	auto records = analyze_all(base_of(b), n,
	                           mode == "exact" ? AnalysisMode::exact : AnalysisMode::interval,
	                           opt);
	std::ostringstream os;
	write_records_csv(os, records, CsvOptions{paper_style, sig});
	write_out(out, os.str());
}

void cmd_quantize(const BaseOpts& b, size_t q, const std::string& dir, bool pin, bool csv,
                  const std::string& out)
{
	if (dir != "degrade" && dir != "upgrade")
		throw std::invalid_argument("--direction must be degrade or upgrade");
	auto Pc = canonicalize(base_of(b));
	auto [Q, cert] = quantize(
	    Pc, QuantizeConfig{q, dir == "degrade" ? Direction::degrade : Direction::upgrade, pin});
	std::ostringstream os;
	if (csv) {
		list_to_csv(os, Q);
	} else {
		Json j = list_to_json(Q);
		j["certificate"] = Json{{"theta_c", to_fraction(cert.theta_c)},
		                        {"merge_loss", to_fraction(cert.actual_merge_loss_sum)},
		                        {"loss_bound", to_fraction(cert.delta_bound)}};
		os << j.dump(2) << '\n';
	}
	write_out(out, os.str());
}

void cmd_select(const std::string& records_path, SelectPolicy policy, const std::string& out)
{
	auto spec = select_frozen(load_records(records_path), policy);
	write_out(out, spec_to_json(spec).dump(2) + "\n");
}

void cmd_bounds(const std::string& records_path, const std::string& spec_path,
                const std::string& out)
{
	auto records = load_records(records_path);
	auto i0 = load_spec(spec_path).i0;
	auto [lo, hi] = block_error_bounds(records, i0);
	Json j{{"block_lower", to_fraction(lo)},
	       {"block_upper", to_fraction(hi)},
	       {"block_lower_dec", to_decimal(lo, 6, Round::truncate)},
	       {"block_upper_dec", to_decimal(hi, 6, Round::up)}};
	write_out(out, j.dump(2) + "\n");
}

void cmd_simulate(const BaseOpts& b, const std::string& spec_path, uint64_t trials,
                  uint64_t seed, const std::string& mode, int threads, const std::string& out)
{
	if (mode != "genie" && mode != "block")
		throw std::invalid_argument("--mode must be genie or block");
	McMode m = mode == "genie" ? McMode::genie_per_index : McMode::block;
	auto res = monte_carlo(channel_of(b), load_spec(spec_path), trials, seed, m, threads);
	write_out(out, mc_to_json(res, m).dump(2) + "\n");
}

}    // namespace

int main(int argc, char** argv)
{
	CLI::App app{"binary polar code construction toolkit"};
	app.require_subcommand(1);

	BaseOpts cb;
	int cn = 0;
	std::string cmode = "exact", cout_path;
	AnalyzeOptions copt;
	bool cpaper = false;
	int csig = 40;
	auto* c = app.add_subcommand("construct", "bit error probabilities of all 2^n indices");
	add_base_flags(c, cb);
	c->add_option("--n", cn, "number of polarization levels")->required();
	c->add_option("--mode", cmode, "exact | interval");
	c->add_option("--Q", copt.q, "interval-mode list budget");
	c->add_option("--grid-bits", copt.grid_bits, "interval-mode dyadic grid depth");
	c->add_option("--size-cap", copt.size_cap, "exact-mode list size cap");
	c->add_option("--threads", copt.threads, "sibling-subtree workers");
	c->add_flag("--paper-style", cpaper, "signed 0.5-gamma rendering at 4 digits");
	c->add_option("--sig", csig, "plain-format significant digits");
	c->add_option("--out", cout_path, "output CSV path (default stdout)");
	c->callback([&] { cmd_construct(cb, cn, cmode, copt, cpaper, csig, cout_path); });

	BaseOpts qb;
	size_t qq = 0;
	std::string qdir = "degrade", qout;
	bool qpin = false, qcsv = false;
	auto* q = app.add_subcommand("quantize", "greedy list quantization with loss certificate");
	add_base_flags(q, qb);
	q->add_option("--Q", qq, "target list size")->required();
	q->add_option("--direction", qdir, "degrade | upgrade");
	q->add_flag("--pin", qpin, "set a theta = 1 tail entry aside");
	q->add_flag("--csv", qcsv, "emit the list as CSV instead of JSON");
	q->add_option("--out", qout, "output path (default stdout)");
	q->callback([&] { cmd_quantize(qb, qq, qdir, qpin, qcsv, qout); });

	std::string srec, sout;
	size_t sk = 0;
	double sbeta = 0;
	auto* s = app.add_subcommand("select", "frozen-set selection from a records CSV");
	s->add_option("--records", srec, "records CSV from construct")->required();
	auto* skopt = s->add_option("--k", sk, "decoded-set size");
	auto* sbopt = s->add_option("--beta", sbeta, "threshold exponent rate");
	skopt->excludes(sbopt);
	sbopt->excludes(skopt);
	s->add_option("--out", sout, "output spec JSON path (default stdout)");
	s->callback([&] {
		cmd_select(srec, policy_of(skopt->count() > 0, sk, sbopt->count() > 0, sbeta), sout);
	});

	std::string brec, bspec, bout;
	auto* bd = app.add_subcommand("bounds", "block error bounds of a spec over records");
	bd->add_option("--records", brec, "records CSV from construct")->required();
	bd->add_option("--spec", bspec, "spec JSON from select")->required();
	bd->add_option("--out", bout, "output JSON path (default stdout)");
	bd->callback([&] { cmd_bounds(brec, bspec, bout); });

	BaseOpts mb;
	std::string mspec, mmode = "genie", mout;
	uint64_t mtrials = 100000, mseed = 1;
	int mthreads = 1;
	auto* sim = app.add_subcommand("simulate", "Monte Carlo validation of a spec");
	add_base_flags(sim, mb);
	sim->add_option("--spec", mspec, "spec JSON from select")->required();
	sim->add_option("--trials", mtrials, "number of trials");
	sim->add_option("--seed", mseed, "base RNG seed");
	sim->add_option("--mode", mmode, "genie | block");
	sim->add_option("--threads", mthreads, "worker threads");
	sim->add_option("--out", mout, "output JSON path (default stdout)");
	sim->callback([&] { cmd_simulate(mb, mspec, mtrials, mseed, mmode, mthreads, mout); });

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		return app.exit(e);
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
	return 0;
}
