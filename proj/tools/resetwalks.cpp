#include <resetwalks/resetwalks.hpp>

#include <boost/program_options.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace po = boost::program_options;
using namespace resetwalks;

namespace {

constexpr int kExitFailedCheck = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitResource = 3;

// exact arithmetic stays cheap up to roughly these sizes
constexpr long long kExactAltitudeN = 2000;
constexpr long long kExactHeightN = 4096;
constexpr long long kExactWaitingN = 2000;

int log_level() {
    const char* v = std::getenv("RESETWALKS_LOG");
    if (!v) return 1;
    const std::string s(v);
    if (s == "quiet" || s == "0") return 0;
    if (s == "debug" || s == "2") return 2;
    return 1;
}

void log(int level, const std::string& msg) {
    if (level <= log_level()) std::cerr << "[resetwalks] " << msg << '\n';
}

struct Common {
    std::string mode = "auto";
    std::string format = "csv";
    std::string out;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

po::options_description common_options(Common& c) {
    po::options_description d("global options");
    d.add_options()
        ("help", "show help for this command")
        ("mode", po::value(&c.mode)->default_value("auto"), "exact | float | auto")
        ("format", po::value(&c.format)->default_value("csv"), "csv | json")
        ("out", po::value(&c.out), "write output to PATH instead of stdout")
        ("seed", po::value(&c.seed)->default_value(1), "Monte Carlo seed")
        ("threads", po::value(&c.threads)->default_value(1), "Monte Carlo worker threads");
    return d;
}

bool use_exact(const Common& c, long long n, long long cap) {
    RESETWALKS_REQUIRE(c.mode == "auto" || c.mode == "exact" || c.mode == "float", ErrorCode::InvalidArgument,
                       "mode must be exact, float or auto");
    if (c.mode == "exact") return true;
    if (c.mode == "float") return false;
    const bool exact = n <= cap;
    log(2, std::string("auto mode picked ") + (exact ? "exact" : "float"));
    return exact;
}

bool json_out(const Common& c) {
    RESETWALKS_REQUIRE(c.format == "csv" || c.format == "json", ErrorCode::InvalidArgument, "format must be csv or json");
    return c.format == "json";
}

template <class T>
Json jv(const T& v) {
    if constexpr (is_exact_v<T>) return to_string_value(v);
    else return static_cast<double>(v);
}

template <class T>
StepModel<T> model_option(const po::variables_map& vm) {
    if (vm.count("model")) return model_from_json<T>(parse_json(vm["model"].as<std::string>()));
    if (vm.count("model-file")) return model_from_json<T>(parse_json(read_file(vm["model-file"].as<std::string>())));
    if (vm.count("p")) return moran_model(parse_value<T>(vm["p"].as<std::string>()));
    throw Error(ErrorCode::InvalidArgument, "give --p, --model or --model-file");
}

void add_model_options(po::options_description& d) {
    d.add_options()
        ("p", po::value<std::string>(), "Moran walk with up-step probability p (e.g. 1/2)")
        ("model", po::value<std::string>(), "model literal {\"steps\":{\"1\":\"1/2\"},\"q\":\"1/2\"}")
        ("model-file", po::value<std::string>(), "file holding a model literal");
}

template <class T>
T p_option(const po::variables_map& vm) {
    RESETWALKS_REQUIRE(vm.count("p"), ErrorCode::InvalidArgument, "--p is required");
    const T p = parse_value<T>(vm["p"].as<std::string>());
    RESETWALKS_REQUIRE(p > T(0) && p < T(1), ErrorCode::InvalidArgument, "p must lie in (0,1)");
    return p;
}

double p_double(const po::variables_map& vm) { return to_double(p_option<Rational>(vm)); }

// altitude

template <class T>
void altitude(const po::variables_map& vm, const Common& c, std::ostream& os) {
    const auto model = model_option<T>(vm);
    const long long n = vm["n"].as<long long>();
    const auto d = altitude_dist_dp(model, n);
    const auto mv = altitude_mean_var(model, n);
    if (json_out(c)) {
        Json rows = Json::array();
        for (long long k = d.lo(); k <= d.hi(); ++k) rows.push_back(Json{{"k", k}, {"prob", jv(d.at(k))}});
        Json j{{"model", model_to_json(model)}, {"n", n}, {"mean", jv(mv.mean)}, {"variance", jv(mv.variance)},
               {"distribution", rows}};
        os << j.dump(2) << '\n';
        return;
    }
    CsvWriter w(os, {"k", "prob"});
    for (long long k = d.lo(); k <= d.hi(); ++k) w.row({std::to_string(k), to_string_value(d.at(k))});
    log(1, "mean " + to_string_value(mv.mean) + ", variance " + to_string_value(mv.variance));
}

// height

template <class T>
void height(const po::variables_map& vm, const Common& c, std::ostream& os) {
    const auto model = model_option<T>(vm);
    const long long n = vm["n"].as<long long>();
    RESETWALKS_REQUIRE(n >= 0, ErrorCode::InvalidArgument, "n must be nonnegative");
    const bool cdf = vm.count("cdf") > 0;
    std::vector<T> pmf;
    if (model.is_moran()) {
        RESETWALKS_REQUIRE(n <= (1LL << 30), ErrorCode::ResourceLimit, "n above 2^30");
        const T p = model.prob(1);
        long long hmax = vm.count("hmax") ? vm["hmax"].as<long long>() : n;
        T prev(0);
        for (long long h = 0; h <= std::min(hmax, n); ++h) {
            const T F = moran_height_cdf(p, h, n);
            pmf.push_back(F - prev);
            prev = F;
            if (!vm.count("hmax") && to_double(T(T(1) - F)) < 1e-17) break;
        }
    } else {
        const long long reach = static_cast<long long>(std::max(model.d(), 0)) * n;
        const long long hmax = vm.count("hmax") ? vm["hmax"].as<long long>() : reach;
        pmf = height_dist_dp(model, n, hmax).heights.masses;
    }
    T acc(0);
    if (json_out(c)) {
        Json rows = Json::array();
        for (std::size_t h = 0; h < pmf.size(); ++h) {
            acc += pmf[h];
            rows.push_back(Json{{"h", h}, {cdf ? "cdf" : "prob", jv(cdf ? acc : pmf[h])}});
        }
        os << Json{{"model", model_to_json(model)}, {"n", n}, {"distribution", rows}}.dump(2) << '\n';
        return;
    }
    CsvWriter w(os, {"h", cdf ? "cdf" : "prob"});
    for (std::size_t h = 0; h < pmf.size(); ++h) {
        acc += pmf[h];
        w.row({std::to_string(h), to_string_value(cdf ? acc : pmf[h])});
    }
}

template <class T>
void height_cdf(const po::variables_map& vm, const Common& c, std::ostream& os) {
    const T p = p_option<T>(vm);
    const long long h = vm["h"].as<long long>(), n = vm["n"].as<long long>();
    RESETWALKS_REQUIRE(n >= 0 && h >= 0, ErrorCode::InvalidArgument, "h and n must be nonnegative");
    RESETWALKS_REQUIRE(n <= (1LL << 30), ErrorCode::ResourceLimit, "n above 2^30");
    const T v = moran_height_cdf(p, h, n);
    if (json_out(c)) os << Json{{"p", jv(p)}, {"h", h}, {"n", n}, {"cdf", jv(v)}}.dump() << '\n';
    else os << to_string_value(v) << '\n';
}

// waiting time

template <class T>
void waiting(const po::variables_map& vm, const Common& c, std::ostream& os) {
    const T p = p_option<T>(vm);
    const long long h = vm["h"].as<long long>(), n = vm["n"].as<long long>();
    RESETWALKS_REQUIRE(h >= 1 && n >= 0, ErrorCode::InvalidArgument, "need h >= 1 and n >= 0");
    const auto gf = waiting_time_gf(p, h);
    if (json_out(c)) {
        const double pd = to_double(p);
        Json j{{"p", jv(p)}, {"h", h}, {"n", n}, {"gf", gf_to_json(gf)}, {"cdf", jv(waiting_time_cdf(p, h, n))},
               {"approx", waiting_time_cdf_approx(pd, h, static_cast<double>(n))},
               {"approx_consistent", waiting_time_cdf_consistent(pd, h, static_cast<double>(n))}};
        os << j.dump(2) << '\n';
        return;
    }
    RESETWALKS_REQUIRE(n <= 1000000, ErrorCode::ResourceLimit, "table limited to n <= 10^6; use --format json");
    const auto a = series_prefix(gf, n);
    CsvWriter w(os, {"t", "prob", "cdf"});
    T acc(0);
    for (long long t = 0; t <= n; ++t) {
        acc += a[static_cast<std::size_t>(t)];
        w.row({std::to_string(t), to_string_value(a[static_cast<std::size_t>(t)]), to_string_value(acc)});
    }
}

// asymptotics

void asymptotics(const po::variables_map& vm, std::ostream& os) {
    const double p = p_double(vm);
    const long long n = vm["n"].as<long long>();
    RESETWALKS_REQUIRE(n >= 1 && n <= (1LL << 30), ErrorCode::InvalidArgument, "n must lie in [1, 2^30]");
    const auto pk = peak_height(p, static_cast<double>(n));
    const auto a = alpha(p, static_cast<double>(n));
    const auto g = gumbel_convergence_check(p, n);
    const auto m = mean_asymptotic(p, static_cast<double>(n));
    const auto v = variance_asymptotic(p, static_cast<double>(n));
    long long argmax = 0;
    double best = -1, prev = 0;
    for (long long h = 0; h <= n && prev < 1.0; ++h) {
        const double F = moran_height_cdf(p, h, n);
        if (F - prev > best) best = F - prev, argmax = h;
        prev = F;
    }
    Json j{{"p", p}, {"n", n}, {"h_star", pk.h_star}, {"peak_prob", pk.peak_prob}, {"exact_argmax", argmax},
           {"alpha", a.alpha}, {"gumbel_distance", g.distance}, {"gumbel_distance_at", g.argmax}, {"mean", m.value}, {"mean_fluctuation", m.fluctuation},
           {"variance", v.value}, {"variance_fluctuation", v.fluctuation}};
    os << j.dump(2) << '\n';
}

// fluctuations

void fluctuations(const po::variables_map& vm, const Common& c, std::ostream& os) {
    const double p = p_double(vm);
    const int K = vm["K"].as<int>();
    const auto Q = K == kAutoK ? cached_series(p, SeriesKind::Q) : make_series(p, SeriesKind::Q, K);
    const auto R = K == kAutoK ? cached_series(p, SeriesKind::R) : make_series(p, SeriesKind::R, K);
    if (json_out(c)) {
        const auto sq = sup_over_period(Q), sr = sup_over_period(R);
        const auto dr = coefficient_decay_report(make_series(p, SeriesKind::Q, std::max(Q.K(), 5)));
        Json j{{"p", p}, {"period", Q.period()}, {"K_Q", Q.K()}, {"K_R", R.K()}, {"sup_Q", sq.sup}, {"sup_R", sr.sup},
               {"argsup_Q", sq.x}, {"argsup_R", sr.x}, {"closed_bound_Q", closed_bound_Q(p)},
               {"closed_bound_R", closed_bound_R(p)}, {"closed_bound_Q_corrected", closed_bound_Q_corrected(p)},
               {"closed_bound_R_corrected", closed_bound_R_corrected(p)}, {"sinh_bound_Q", sinh_bound_Q(p)},
               {"period_integral_Q", period_integral(Q)}, {"period_integral_R", period_integral(R)},
               {"decay_fitted_ratio", dr.fitted_ratio}, {"decay_predicted_ratio", dr.predicted_ratio},
               {"decay_geometric", dr.geometric}};
        os << j.dump(2) << '\n';
        return;
    }
    bool wantQ = false, wantR = false;
    std::stringstream emit(vm["emit"].as<std::string>());
    std::string item;
    while (std::getline(emit, item, ',')) {
        if (item == "Q") wantQ = true;
        else if (item == "R") wantR = true;
        else throw Error(ErrorCode::InvalidArgument, "--emit takes Q, R or Q,R");
    }
    const int samples = vm["samples"].as<int>();
    RESETWALKS_REQUIRE(samples >= 1 && samples <= 10000000, ErrorCode::InvalidArgument, "samples out of range");
    std::vector<std::string> header{"x"};
    if (wantQ) header.push_back("Q(x)");
    if (wantR) header.push_back("R(x)");
    CsvWriter w(os, header);
    for (int i = 0; i < samples; ++i) {
        const double x = Q.period() * i / samples;
        std::vector<std::string> row{to_string_value(x)};
        if (wantQ) row.push_back(to_string_value(Q(x)));
        if (wantR) row.push_back(to_string_value(R(x)));
        w.row(row);
    }
}

// multidimensional Moran

template <class T>
MoranMDModel<T> md_model_option(const po::variables_map& vm) {
    const int m = vm["m"].as<int>();
    RESETWALKS_REQUIRE(vm.count("pI"), ErrorCode::InvalidArgument, "--pI is required");
    std::vector<int> f0;
    if (vm.count("f0")) {
        std::stringstream ss(vm["f0"].as<std::string>());
        std::string item;
        while (std::getline(ss, item, ',')) f0.push_back(detail::parse_int_key(item));
    }
    return make_md_model<T>(m, subset_probs_from_json<T>(parse_json(vm["pI"].as<std::string>())), f0);
}

std::string ages_key(const AgeTuple& a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ";" : "") + std::to_string(a[i]);
    return s;
}

template <class T>
void moran_md(const po::variables_map& vm, const Common& c, std::ostream& os) {
    const auto model = md_model_option<T>(vm);
    const long long n = vm["n"].as<long long>();
    const std::string stat = vm["stat"].as<std::string>();
    const bool json = json_out(c);
    if (stat == "sim-age-hist") {
        const auto sim = simulate_md(model, n, vm["reps"].as<std::uint64_t>(), c.seed, c.threads);
        CsvWriter w(os, {"individual", "k", "count"});
        for (int i = 0; i < model.m(); ++i)
            for (const auto& [k, cnt] : sim.marginal(i)) w.row({std::to_string(i + 1), std::to_string(k), std::to_string(cnt)});
        return;
    }
    if (stat == "rationality") {
        RESETWALKS_REQUIRE(vm.count("x"), ErrorCode::InvalidArgument, "--x is required for rationality");
        std::vector<T> x;
        std::stringstream ss(vm["x"].as<std::string>());
        std::string item;
        while (std::getline(ss, item, ',')) x.push_back(parse_value<T>(item));
        const auto r = rationality_check(model, x, std::max<long long>(n, (1LL << model.m()) + 2));
        const auto rp = rationality_check(model, x, std::max<long long>(n, (1LL << model.m()) + 2), true);
        os << Json{{"m", model.m()}, {"degree", 1LL << model.m()}, {"classical_support", has_classical_support(model)},
                   {"residual", jv(r.residual)}, {"residual_classical_delta", jv(rp.residual)}}.dump(2) << '\n';
        return;
    }
    RESETWALKS_REQUIRE(model.m() <= kMaxExactIndividuals, ErrorCode::ResourceLimit, "measure evolution limited to m <= 6");
    const auto mu = evolve_measure(model, n);
    if (stat == "age-hist") {
        Json rows = Json::array();
        std::vector<std::vector<std::string>> table;
        for (int i = 0; i < model.m(); ++i) {
            const auto d = mu.marginal(i);
            for (long long k = d.lo(); k <= d.hi(); ++k) {
                if (d.at(k) == T(0)) continue;
                rows.push_back(Json{{"individual", i + 1}, {"k", k}, {"prob", jv(d.at(k))}});
                table.push_back({std::to_string(i + 1), std::to_string(k), to_string_value(d.at(k))});
            }
        }
        if (json) {
            os << Json{{"m", model.m()}, {"n", n}, {"marginals", rows}}.dump(2) << '\n';
        } else {
            CsvWriter w(os, {"individual", "k", "prob"});
            for (const auto& r : table) w.row(r);
        }
    } else if (stat == "age-count") {
        CsvWriter w(os, {"k", "expected"});
        for (int k = 0; k <= n + *std::max_element(model.f0().begin(), model.f0().end()); ++k) {
            const T e = age_count_statistics(mu, k);
            if (e != T(0)) w.row({std::to_string(k), to_string_value(e)});
        }
    } else if (stat == "joint") {
        CsvWriter w(os, {"ages", "prob"});
        for (const auto& [a, p] : mu.masses) w.row({ages_key(a), to_string_value(p)});
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown --stat " + stat);
    }
}

// soliton

void soliton(const po::variables_map& vm, const Common& c, std::ostream& os) {
    const int m = vm["m"].as<int>();
    if (vm.count("law")) {
        const long long n = vm["law"].as<long long>();
        CsvWriter w(os, {"length", "prob"});
        if (use_exact(c, m, 4))
            for (const auto& [L, p] : soliton_length_distribution<Rational>(m, n)) w.row({std::to_string(L), to_string_value(p)});
        else
            for (const auto& [L, p] : soliton_length_distribution<double>(m, n)) w.row({std::to_string(L), to_string_value(p)});
        return;
    }
    const long long steps = vm["steps"].as<long long>();
    RESETWALKS_REQUIRE(steps >= 0 && steps <= 100000000, ErrorCode::ResourceLimit, "steps out of range");
    const auto run = simulate_soliton(m, steps, c.seed);
    RESETWALKS_REQUIRE(run.representations_agree, ErrorCode::ResidualTooLarge, "urn and particle lengths disagree");
    if (json_out(c)) {
        os << Json{{"m", m}, {"steps", steps}, {"seed", c.seed}, {"final_length", run.lengths.back()},
                   {"max_length", *std::max_element(run.lengths.begin(), run.lengths.end())},
                   {"representations_agree", run.representations_agree}}.dump(2) << '\n';
        return;
    }
    CsvWriter w(os, {"t", "length"});
    for (std::size_t t = 0; t < run.lengths.size(); ++t) w.row({std::to_string(t), std::to_string(run.lengths[t])});
}

// validate

CheckResult model_identity_check(const StepModel<Rational>& model) {
    checks::Recorder rec("model-identities");
    const int N = std::min(12, static_cast<int>(std::log(1e6) / std::log(static_cast<double>(model.steps().size() + 1))));
    const auto en = enumerate_walks(model, N);
    for (int n = 0; n <= N; ++n) {
        const auto dp = altitude_dist_dp(model, n);
        const auto fo = altitude_dist_formula_all(model, n);
        const auto& e = en.altitude[static_cast<std::size_t>(n)];
        for (long long k = std::min(e.lo(), dp.lo()); k <= std::max(e.hi(), dp.hi()); ++k)
            rec.expect(e.at(k) == dp.at(k) && dp.at(k) == fo.at(k), "altitude law at n=" + std::to_string(n));
        const auto mv = altitude_mean_var(model, n);
        rec.expect(mv.mean == dp.mean() && mv.variance == dp.variance(), "moments at n=" + std::to_string(n));
        const auto& hh = en.height[static_cast<std::size_t>(n)];
        const auto hd = height_dist_dp(model, n, hh.hi());
        for (long long h = 0; h <= hh.hi(); ++h) rec.expect(hh.at(h) == hd.heights.at(h), "height law at n=" + std::to_string(n));
    }
    rec.note("n <= " + std::to_string(N));
    return rec.finish();
}

int validate(const po::variables_map& vm, const Common& c, std::ostream& os) {
    std::set<std::string> only;
    if (vm.count("only"))
        for (const auto& s : vm["only"].as<std::vector<std::string>>()) {
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ',')) only.insert(item);
        }
    const auto& reg = check_registry();
    if (vm.count("list")) {
        for (const auto& spec : reg) os << spec.name << (spec.in_default_suite ? "" : " (on request)") << ": " << spec.summary << '\n';
        return 0;
    }
    for (const auto& name : only)
        RESETWALKS_REQUIRE(std::any_of(reg.begin(), reg.end(), [&](const CheckSpec& s) { return s.name == name; }),
                           ErrorCode::InvalidArgument, "unknown check " + name);
    std::vector<CheckResult> results;
    if (vm.count("model") || vm.count("model-file")) results.push_back(model_identity_check(model_option<Rational>(vm)));
    for (const auto& spec : reg) {
        if (only.empty() ? !spec.in_default_suite || vm.count("model") || vm.count("model-file") : !only.count(spec.name)) continue;
        log(1, "running " + spec.name);
        results.push_back(spec.run());
    }
    bool ok = true;
    for (const auto& r : results) ok &= r.passed;
    if (c.format == "csv" && vm["format"].defaulted() == false) {
        CsvWriter w(os, {"name", "passed", "residual", "seconds"});
        for (const auto& r : results) w.row({r.name, r.passed ? "true" : "false", to_string_value(r.residual), to_string_value(r.seconds)});
    } else {
        Json arr = Json::array();
        for (const auto& r : results)
            arr.push_back(Json{{"name", r.name}, {"passed", r.passed}, {"residual", r.residual}, {"seconds", r.seconds}, {"detail", r.detail}});
        os << Json{{"passed", ok}, {"checks", arr}}.dump(2) << '\n';
    }
    return ok ? 0 : kExitFailedCheck;
}

const char* kUsage =
    "usage: resetwalks <command> [options]\n"
    "commands:\n"
    "  altitude             law of the final altitude (CSV k,prob)\n"
    "  height               law of the height (CSV h,prob; --cdf for h,cdf)\n"
    "  height-cdf           one value Pr(H_n <= h) for a Moran walk\n"
    "  waiting              waiting time to reach height h\n"
    "  asymptotics          peak, alpha and Gumbel distance (alias height-asymptotics)\n"
    "  fluctuations         periodic fluctuation series over one period\n"
    "  moran-md             multidimensional Moran ages\n"
    "  soliton              soliton wave lengths\n"
    "  validate             cross-check suite\n"
    "run `resetwalks <command> --help` for options\n";

int run(int argc, char** argv) {
    if (argc < 2 || std::string(argv[1]) == "--help" || std::string(argv[1]) == "-h") {
        std::cout << kUsage;
        return argc < 2 ? kExitInvalid : 0;
    }
    std::string cmd = argv[1];
    if (cmd == "height-asymptotics") cmd = "asymptotics";

    Common c;
    auto desc = common_options(c);
    po::options_description own(cmd + " options");
    if (cmd == "altitude") {
        add_model_options(own);
        own.add_options()("n", po::value<long long>()->required(), "walk length");
    } else if (cmd == "height") {
        add_model_options(own);
        own.add_options()("n", po::value<long long>()->required(), "walk length")
            ("hmax", po::value<long long>(), "largest height listed")("cdf", "emit Pr(H_n <= h)");
    } else if (cmd == "height-cdf" || cmd == "waiting") {
        own.add_options()("p", po::value<std::string>(), "up-step probability")
            ("h", po::value<long long>()->required(), "height")("n", po::value<long long>()->required(), "time");
    } else if (cmd == "asymptotics") {
        own.add_options()("p", po::value<std::string>(), "up-step probability")
            ("n", po::value<long long>()->required(), "walk length")("json", "JSON output (always on)");
    } else if (cmd == "fluctuations") {
        own.add_options()("p", po::value<std::string>(), "up-step probability")
            ("emit", po::value<std::string>()->default_value("Q,R"), "series to tabulate: Q, R or Q,R")
            ("samples", po::value<int>()->default_value(512), "points over one period")
            ("K", po::value<int>()->default_value(kAutoK), "harmonics kept (0 = automatic)");
    } else if (cmd == "moran-md") {
        own.add_options()("m", po::value<int>()->required(), "number of individuals")
            ("pI", po::value<std::string>(), "subset probabilities, e.g. {\"{}\":\"1/2\",\"{1,2}\":\"1/2\"}")
            ("f0", po::value<std::string>(), "initial ages, comma separated")
            ("n", po::value<long long>()->required(), "time")
            ("stat", po::value<std::string>()->default_value("age-hist"),
             "age-hist | age-count | joint | rationality | sim-age-hist")
            ("x", po::value<std::string>(), "evaluation point for rationality, comma separated")
            ("reps", po::value<std::uint64_t>()->default_value(100000), "simulation runs");
    } else if (cmd == "soliton") {
        own.add_options()("m", po::value<int>()->required(), "number of particles")
            ("steps", po::value<long long>()->default_value(1000), "simulated steps")
            ("emit", po::value<std::string>(), "write the length trace to PATH")
            ("law", po::value<long long>(), "exact length law at time N instead of a run");
    } else if (cmd == "validate") {
        add_model_options(own);
        own.add_options()("only", po::value<std::vector<std::string>>()->composing(), "run only these checks")
            ("list", "list available checks");
    } else {
        std::cerr << "unknown command '" << cmd << "'\n" << kUsage;
        return kExitInvalid;
    }
    desc.add(own);

    po::variables_map vm;
    po::store(po::command_line_parser(argc - 1, argv + 1).options(desc).run(), vm);
    if (vm.count("help")) {
        std::cout << desc << '\n';
        return 0;
    }
    po::notify(vm);
    if (vm.count("json")) c.format = "json";
    if (cmd == "soliton" && vm.count("emit")) c.out = vm["emit"].as<std::string>();

    std::ostringstream os;
    int status = 0;
    const auto nval = [&] { return vm.count("n") ? vm["n"].as<long long>() : 0LL; };
    if (cmd == "altitude") {
        use_exact(c, nval(), kExactAltitudeN) ? altitude<Rational>(vm, c, os) : altitude<double>(vm, c, os);
    } else if (cmd == "height") {
        use_exact(c, nval(), kExactHeightN) ? height<Rational>(vm, c, os) : height<double>(vm, c, os);
    } else if (cmd == "height-cdf") {
        use_exact(c, nval(), kExactHeightN) ? height_cdf<Rational>(vm, c, os) : height_cdf<double>(vm, c, os);
    } else if (cmd == "waiting") {
        use_exact(c, nval(), kExactWaitingN) ? waiting<Rational>(vm, c, os) : waiting<double>(vm, c, os);
    } else if (cmd == "asymptotics") {
        asymptotics(vm, os);
    } else if (cmd == "fluctuations") {
        fluctuations(vm, c, os);
    } else if (cmd == "moran-md") {
        use_exact(c, vm["m"].as<int>(), kMaxExactIndividuals) ? moran_md<Rational>(vm, c, os) : moran_md<double>(vm, c, os);
    } else if (cmd == "soliton") {
        soliton(vm, c, os);
    } else {
        status = validate(vm, c, os);
    }

    if (c.out.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(c.out, std::ios::binary);
        RESETWALKS_REQUIRE(f.good(), ErrorCode::InvalidArgument, "cannot write " + c.out);
        f << os.str();
        log(1, "wrote " + c.out);
    }
    return status;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::ResourceLimit ? kExitResource : kExitInvalid;
    } catch (const po::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
}
