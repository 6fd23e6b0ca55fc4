#pragma once

#include <resetwalks/core_model.hpp>
#include <resetwalks/kernel_gf.hpp>
#include <resetwalks/moran_md.hpp>
#include <resetwalks/numeric.hpp>

#include <nlohmann/json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace resetwalks {

using Json = nlohmann::ordered_json;

namespace detail {

/// Fraction strings pass through; JSON numbers are read from their literal text.
template <class T>
T json_value(const Json& v) {
    if (v.is_string()) return parse_value<T>(v.get<std::string>());
    if (v.is_number()) return parse_value<T>(v.dump());
    throw Error(ErrorCode::ParseError, "expected a probability, got " + v.dump());
}

inline int parse_int_key(const std::string& s) {
    int k = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), k);
    RESETWALKS_REQUIRE(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::ParseError, "bad step key '" + s + "'");
    return k;
}

} // namespace detail

inline Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    RESETWALKS_REQUIRE(in.good(), ErrorCode::InvalidArgument, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// {"steps": {"1": "1/3", "2": "1/2"}, "q": "1/6"}
template <class T>
StepModel<T> model_from_json(const Json& j) {
    RESETWALKS_REQUIRE(j.is_object() && j.contains("steps") && j.contains("q") && j["steps"].is_object(),
                       ErrorCode::ParseError, "model needs \"steps\" object and \"q\"");
    std::map<int, T> steps;
    for (const auto& [k, v] : j["steps"].items()) steps[detail::parse_int_key(k)] += detail::json_value<T>(v);
    return validate_model<T>(std::move(steps), detail::json_value<T>(j["q"]));
}

template <class T>
Json model_to_json(const StepModel<T>& m) {
    Json steps = Json::object();
    for (const auto& [k, p] : m.steps()) steps[std::to_string(k)] = to_string_value(p);
    return Json{{"steps", steps}, {"q", to_string_value(m.q())}};
}

template <class T>
Json gf_to_json(const RationalGF<T>& gf) {
    Json num = Json::array(), den = Json::array();
    for (const auto& c : gf.num) num.push_back(to_string_value(c));
    for (const auto& c : gf.den) den.push_back(to_string_value(c));
    return Json{{"num", num}, {"den", den}};
}

template <class T>
RationalGF<T> gf_from_json(const Json& j) {
    RESETWALKS_REQUIRE(j.is_object() && j.contains("num") && j.contains("den"), ErrorCode::ParseError,
                       "gf needs \"num\" and \"den\"");
    RationalGF<T> gf;
    for (const auto& v : j["num"]) gf.num.push_back(detail::json_value<T>(v));
    for (const auto& v : j["den"]) gf.den.push_back(detail::json_value<T>(v));
    return gf;
}

/// "{}", "{1}", "{1,3}" with individuals numbered from 1.
inline Subset parse_subset(const std::string& text) {
    std::string s;
    for (char c : text)
        if (c != ' ') s += c;
    RESETWALKS_REQUIRE(s.size() >= 2 && s.front() == '{' && s.back() == '}', ErrorCode::ParseError, "bad subset '" + text + "'");
    Subset I = 0;
    std::stringstream body(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(body, item, ',')) {
        const int i = detail::parse_int_key(item);
        RESETWALKS_REQUIRE(i >= 1 && i <= kMaxSimIndividuals, ErrorCode::ParseError, "individual out of range in '" + text + "'");
        I |= Subset{1} << (i - 1);
    }
    return I;
}

inline std::string subset_key(Subset I) {
    std::string s = "{";
    for (int i = 0; I >> i; ++i)
        if ((I >> i) & 1u) s += (s.size() > 1 ? "," : "") + std::to_string(i + 1);
    return s + "}";
}

template <class T>
std::map<Subset, T> subset_probs_from_json(const Json& j) {
    RESETWALKS_REQUIRE(j.is_object(), ErrorCode::ParseError, "subset probabilities must be a JSON object");
    std::map<Subset, T> pI;
    for (const auto& [k, v] : j.items()) pI[parse_subset(k)] += detail::json_value<T>(v);
    return pI;
}

/// Minimal CSV writer; values are written verbatim.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os) { row(header); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << '\n';
    }

private:
    std::ostream& os_;
};

} // namespace resetwalks
