// File formats: symmetric-parameter lists as JSON or CSV, analysis records
// as CSV, code specifications and Monte Carlo statistics as JSON. All
// emitters use fixed key order and directed decimal rendering so identical
// inputs produce byte-identical artifacts.
#pragma once

#include <json.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "polar/codec.hh"
#include "polar/construct.hh"
#include "polar/scalar.hh"
#include "polar/symparam.hh"

namespace polar {

using Json = nlohmann::ordered_json;

namespace detail {

template <class S> S scalar_from_json(const Json& v)
{
	if (v.is_string())
		return scalar_traits<S>::from_decimal(v.template get<std::string>());
	if (v.is_number_integer())
		return S(v.template get<long>());
	if (v.is_number_float()) {
		if constexpr (scalar_traits<S>::exact)
			throw std::invalid_argument(
			    "exact lists need quoted values (e.g. \"39/50\" or \"0.78\"), got " +
			    v.dump());
		else
			return v.template get<double>();
	}
	throw std::invalid_argument("expected a number or numeric string, got " + v.dump());
}

inline std::string scalar_to_string(const Rat& x) { return to_fraction(x); }
inline std::string scalar_to_string(double x) { return to_decimal(x, 17, Round::nearest); }

inline std::vector<std::string> split_csv_row(const std::string& line)
{
	std::vector<std::string> cells(1);
	for (char c : line) {
		if (c == ',')
			cells.emplace_back();
		else if (c != '\r' && c != ' ' && c != '\t')
			cells.back() += c;
	}
	return cells;
}

}    // namespace detail

// {"entries": [{"mu": ..., "theta": ...}, ...]}; exact lists serialize and
// require fraction/decimal strings, the float backend also accepts numbers.
template <class S> ParamList<S> list_from_json(const Json& j)
{
	if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array())
		throw std::invalid_argument("list files need an \"entries\" array");
	ParamList<S> P;
	for (const Json& e : j["entries"]) {
		if (!e.is_object() || !e.contains("mu") || !e.contains("theta"))
			throw std::invalid_argument("each entry needs \"mu\" and \"theta\"");
		P.e.push_back({detail::scalar_from_json<S>(e["mu"]),
		               detail::scalar_from_json<S>(e["theta"])});
	}
	return P;
}

template <class S> Json list_to_json(const ParamList<S>& P)
{
	Json entries = Json::array();
	for (const auto& x : P.e)
		entries.push_back({{"mu", detail::scalar_to_string(x.mu)},
		                   {"theta", detail::scalar_to_string(x.theta)}});
	return Json{{"entries", std::move(entries)}};
}

// CSV with the header "mu,theta"; cells hold fractions or decimals.
template <class S> ParamList<S> list_from_csv(std::istream& is)
{
	std::string line;
	if (!std::getline(is, line) || detail::split_csv_row(line) !=
	                                   std::vector<std::string>{"mu", "theta"})
		throw std::invalid_argument("list CSV must start with the header mu,theta");
	ParamList<S> P;
	while (std::getline(is, line)) {
		if (line.empty() || line == "\r")
			continue;
		auto cells = detail::split_csv_row(line);
		if (cells.size() != 2)
			throw std::invalid_argument("list CSV rows need two cells: " + line);
		P.e.push_back({scalar_traits<S>::from_decimal(cells[0]),
		               scalar_traits<S>::from_decimal(cells[1])});
	}
	return P;
}

template <class S> void list_to_csv(std::ostream& os, const ParamList<S>& P)
{
	os << "mu,theta\n";
	for (const auto& x : P.e)
		os << detail::scalar_to_string(x.mu) << ',' << detail::scalar_to_string(x.theta)
		   << '\n';
}

// Dispatches on the .json / .csv filename suffix.
template <class S> ParamList<S> load_list(const std::string& path)
{
	std::ifstream f(path);
	if (!f)
		throw std::invalid_argument("cannot open list file: " + path);
	if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
		Json j;
		f >> j;
		return list_from_json<S>(j);
	}
	return list_from_csv<S>(f);
}

// Reads back the plain (non paper-style) records CSV emitted by
// write_records_csv; cells become exact decimal fractions.
inline std::vector<IndexRecord<Rat>> read_records_csv(std::istream& is)
{
	std::string line;
	if (!std::getline(is, line) ||
	    detail::split_csv_row(line) != std::vector<std::string>{"index_bits", "ber_lower",
	                                                            "ber_upper", "m_lower",
	                                                            "m_upper"})
		throw std::invalid_argument("records CSV header mismatch");
	std::vector<IndexRecord<Rat>> out;
	while (std::getline(is, line)) {
		if (line.empty() || line == "\r")
			continue;
		auto cells = detail::split_csv_row(line);
		if (cells.size() != 5)
			throw std::invalid_argument("records CSV rows need five cells: " + line);
		IndexRecord<Rat> r;
		r.index_bits = cells[0];
		index_value(r.index_bits);    // validates the bit string
		r.ber_lower = rat_from_decimal(cells[1]);
		r.ber_upper = rat_from_decimal(cells[2]);
		r.m_lower = rat_from_decimal(cells[3]);
		r.m_upper = rat_from_decimal(cells[4]);
		r.mode = r.ber_lower == r.ber_upper ? AnalysisMode::exact : AnalysisMode::interval;
		out.push_back(std::move(r));
	}
	return out;
}

inline std::vector<IndexRecord<Rat>> load_records(const std::string& path)
{
	std::ifstream f(path);
	if (!f)
		throw std::invalid_argument("cannot open records file: " + path);
	return read_records_csv(f);
}

template <class S> Json spec_to_json(const CodeSpec<S>& spec)
{
	return Json{{"n", spec.n},
	            {"i0", spec.i0},
	            {"i1", spec.i1},
	            {"i0_reversed", spec.i0_reversed},
	            {"i1_reversed", spec.i1_reversed},
	            {"block_lower", detail::scalar_to_string(spec.block_lower)},
	            {"block_upper", detail::scalar_to_string(spec.block_upper)}};
}

inline CodeSpec<Rat> spec_from_json(const Json& j)
{
	CodeSpec<Rat> spec;
	spec.n = j.at("n").get<int>();
	if (spec.n < 1 || spec.n > 26)
		throw std::invalid_argument("spec n out of range");
	spec.i0 = j.at("i0").get<std::vector<uint32_t>>();
	spec.i1 = j.at("i1").get<std::vector<uint32_t>>();
	if (j.contains("block_lower"))
		spec.block_lower = rat_from_decimal(j["block_lower"].get<std::string>());
	if (j.contains("block_upper"))
		spec.block_upper = rat_from_decimal(j["block_upper"].get<std::string>());
	size_t N = size_t(1) << spec.n;
	std::vector<char> seen(N, 0);
	for (uint32_t ix : spec.i0)
		seen.at(ix) += 1;
	for (uint32_t ix : spec.i1)
		seen.at(ix) += 1;
	for (char c : seen)
		if (c != 1)
			throw std::invalid_argument("i0 and i1 must partition the index range");
	return bit_reverse_sets(std::move(spec));
}

inline CodeSpec<Rat> load_spec(const std::string& path)
{
	std::ifstream f(path);
	if (!f)
		throw std::invalid_argument("cannot open spec file: " + path);
	Json j;
	f >> j;
	return spec_from_json(j);
}

inline Json mc_to_json(const McResult& res, McMode mode)
{
	Json j{{"trials", res.trials},
	       {"mode", mode == McMode::genie_per_index ? "genie_per_index" : "block"}};
	if (mode == McMode::genie_per_index) {
		Json rows = Json::array();
		for (const McIndexStat& st : res.per_index)
			rows.push_back({{"index_bits", st.index_bits},
			                {"errors", st.errors},
			                {"trials", st.trials},
			                {"freq", st.freq},
			                {"stderr", st.se}});
		j["per_index"] = std::move(rows);
	} else {
		j["block"] = Json{{"errors", res.block_errors},
		                  {"freq", res.block_freq},
		                  {"stderr", res.block_se}};
	}
	return j;
}

}    // namespace polar
