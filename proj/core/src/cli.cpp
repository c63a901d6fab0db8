#include "exactq/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exactq/analytics.hpp"
#include "exactq/dcftp.hpp"
#include "exactq/errors.hpp"
#include "exactq/stats.hpp"
#include "exactq/version.hpp"
#include "exactq/walk_max.hpp"

namespace exactq {

namespace {

using nlohmann::json;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<double> split_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

DistributionSpec parse_distribution(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError("distribution '" + text + "': expected kind:param[,param...]");
    std::string kind = text.substr(0, colon);
    std::vector<double> p = split_doubles(text.substr(colon + 1));
    try {
        if (kind == "exp" || kind == "exponential") {
            if (p.size() != 1) throw ConfigError("exp takes one parameter (rate)");
            return DistributionSpec::exponential(p[0]);
        }
        if (kind == "erlang") {
            if (p.size() != 2) throw ConfigError("erlang takes shape,rate");
            return DistributionSpec::erlang(static_cast<int>(std::llround(p[0])), p[1]);
        }
        if (kind == "hyperexp" || kind == "hyperexponential") {
            if (p.size() < 4 || p.size() % 2 != 0)
                throw ConfigError("hyperexp takes alternating weight,rate pairs");
            std::vector<double> w, r;
            for (std::size_t i = 0; i < p.size(); i += 2) {
                w.push_back(p[i]);
                r.push_back(p[i + 1]);
            }
            return DistributionSpec::hyperexponential(w, r);
        }
        if (kind == "uniform") {
            if (p.size() != 2) throw ConfigError("uniform takes lo,hi");
            return DistributionSpec::uniform(p[0], p[1]);
        }
        if (kind == "det" || kind == "deterministic") {
            if (p.size() != 1) throw ConfigError("det takes one parameter (value)");
            return DistributionSpec::deterministic(p[0]);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("distribution '") + text + "': " + e.what());
    }
    throw ConfigError("unknown distribution kind '" + kind + "'");
}

namespace {

DistributionSpec distribution_from_json(const json& j) {
    if (j.is_string()) return parse_distribution(j.get<std::string>());
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "exponential" || kind == "exp")
        return DistributionSpec::exponential(j.at("rate").get<double>());
    if (kind == "erlang")
        return DistributionSpec::erlang(j.at("shape").get<int>(), j.at("rate").get<double>());
    if (kind == "hyperexponential" || kind == "hyperexp")
        return DistributionSpec::hyperexponential(j.at("weights").get<std::vector<double>>(),
                                                  j.at("rates").get<std::vector<double>>());
    if (kind == "uniform")
        return DistributionSpec::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
    if (kind == "deterministic" || kind == "det")
        return DistributionSpec::deterministic(j.at("value").get<double>());
    throw ConfigError("config: unknown distribution kind '" + kind + "'");
}

// canonical kind:params form, parseable by parse_distribution
std::string to_flag_string(const DistributionSpec& d) {
    std::ostringstream os;
    os.precision(17);
    switch (d.kind) {
        case DistKind::Exponential: os << "exp:" << d.rate; break;
        case DistKind::Erlang: os << "erlang:" << d.shape << ',' << d.rate; break;
        case DistKind::HyperExponential: {
            os << "hyperexp:";
            for (std::size_t i = 0; i < d.weights.size(); ++i)
                os << (i ? "," : "") << d.weights[i] << ',' << d.rates[i];
            break;
        }
        case DistKind::Uniform: os << "uniform:" << d.lo << ',' << d.hi; break;
        case DistKind::Deterministic: os << "det:" << d.value; break;
    }
    return os.str();
}

struct RunConfig {
    std::string command;
    std::string arrival = "exp:1";
    std::string service = "exp:2";
    int servers = 1;
    std::size_t reps = 100;
    std::uint64_t seed = 1;
    double t0 = 10.0;
    double a = 0.0;
    int max_doublings = 40;
    bool want_w1 = false;
    bool check_invariants = false;
    int threads = 1;
    std::string out;  // empty = stdout
    std::string format = "json";
    // study knobs
    std::string regime = "qd";
    std::vector<double> scales = {100.0};
    std::vector<double> lambdas = {5, 6, 7, 8, 9};
    double mu = 5.0;
    double t0_arrivals = 10.0;
    int hist_max = 15;
    std::string dump_timeline;
};

class OutputSink {
public:
    explicit OutputSink(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw ConfigError("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

DcftpConfig to_dcftp(const RunConfig& rc) {
    DcftpConfig cfg;
    cfg.interarrival = parse_distribution(rc.arrival);
    cfg.service = parse_distribution(rc.service);
    cfg.servers = rc.servers;
    cfg.a = rc.a;
    cfg.t0 = rc.t0;
    cfg.seed = rc.seed;
    cfg.max_doublings = rc.max_doublings;
    cfg.want_w1 = rc.want_w1;
    cfg.check_invariants = rc.check_invariants;
    return cfg;
}

json sample_record(std::size_t rep, const StationarySample& s) {
    json rec;
    rec["rep"] = rep;
    rec["Q0"] = s.z0.queue;
    rec["R0"] = s.z0.remaining;
    rec["E0"] = s.z0.since_arrival;
    rec["in_system"] = s.in_system();
    rec["T_coalesce"] = s.coalescence_time;
    rec["k_horizon"] = s.horizon_k;
    rec["t_horizon"] = s.horizon_time;
    rec["window_arrivals"] = s.window_arrivals;
    rec["detect_offset"] = s.detect_offset;
    json ren;
    for (std::size_t i = 0; i < s.renewals.size(); ++i) ren[std::to_string(i)] = s.renewals[i];
    rec["renewals"] = ren;
    rec["proposal_increments"] = s.proposal_increments;
    if (s.w1) rec["W1"] = *s.w1;
    return rec;
}

void write_sample_csv_header(std::ostream& os) {
    os << "rep,Q0,E0,in_system,T_coalesce,k_horizon,t_horizon,window_arrivals,"
          "detect_offset,renewals_total,proposal_increments,R0\n";
}

void write_sample_csv_row(std::ostream& os, std::size_t rep, const StationarySample& s) {
    std::uint64_t ren = 0;
    for (auto n : s.renewals) ren += n;
    os << rep << ',' << s.z0.queue << ',' << fmt(s.z0.since_arrival) << ',' << s.in_system()
       << ',' << fmt(s.coalescence_time) << ',' << s.horizon_k << ',' << fmt(s.horizon_time)
       << ',' << s.window_arrivals << ',' << s.detect_offset << ',' << ren << ','
       << s.proposal_increments << ',';
    for (std::size_t i = 0; i < s.z0.remaining.size(); ++i)
        os << (i ? ";" : "") << fmt(s.z0.remaining[i]);
    os << '\n';
}

int cmd_sample(const RunConfig& rc) {
    DcftpConfig cfg = to_dcftp(rc);
    cfg.validate();
    std::vector<StationarySample> results(rc.reps);
    parallel_for_reps(rc.reps, rc.threads,
                      [&](std::size_t r) { results[r] = sample_stationary(cfg, r); });

    OutputSink sink(rc.out);
    std::ostream& os = sink.stream();
    if (rc.format == "json") {
        json meta = {{"schema_version", kSchemaVersion}, {"command", "sample"},
                     {"version", kVersion},             {"seed", rc.seed},
                     {"arrival", rc.arrival},           {"service", rc.service},
                     {"servers", rc.servers},           {"reps", rc.reps}};
        os << meta.dump() << '\n';
        for (std::size_t r = 0; r < rc.reps; ++r) os << sample_record(r, results[r]).dump() << '\n';
    } else {
        os << "# schema_version=" << kSchemaVersion << " command=sample version=" << kVersion
           << " seed=" << rc.seed << " arrival=" << rc.arrival << " service=" << rc.service
           << " servers=" << rc.servers << "\n";
        write_sample_csv_header(os);
        for (std::size_t r = 0; r < rc.reps; ++r) write_sample_csv_row(os, r, results[r]);
    }

    std::vector<double> ts(rc.reps);
    for (std::size_t r = 0; r < rc.reps; ++r) ts[r] = results[r].coalescence_time;
    MeanCi ci = mean_ci95(ts);
    std::cerr << "sample: reps=" << rc.reps << " seed=" << rc.seed << " version=" << kVersion
              << " mean_T=" << ci.mean << " ci95=[" << ci.lo() << ", " << ci.hi() << "]\n";

    if (!rc.dump_timeline.empty()) {
        std::ofstream df(rc.dump_timeline);
        if (!df) throw ConfigError("cannot open timeline dump file: " + rc.dump_timeline);
        VacationTimeline tl(cfg.vacation_params(), cfg.seed, 0);
        tl.dump_csv(df, 2.0 * cfg.t0);
    }
    return 0;
}

int cmd_validate_mmc(const RunConfig& rc) {
    DcftpConfig cfg = to_dcftp(rc);
    cfg.validate();
    if (cfg.interarrival.kind != DistKind::Exponential ||
        cfg.service.kind != DistKind::Exponential)
        throw ConfigError("validate-mmc requires exponential interarrival and service laws");
    MmcParams p{1.0 / mean(cfg.interarrival), 1.0 / mean(cfg.service), cfg.servers};

    std::vector<StationarySample> results(rc.reps);
    parallel_for_reps(rc.reps, rc.threads,
                      [&](std::size_t r) { results[r] = sample_stationary(cfg, r); });

    int n_max = rc.hist_max;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n_max) + 2, 0);
    for (const auto& s : results) {
        std::int64_t n = s.in_system();
        ++counts[static_cast<std::size_t>(std::min<std::int64_t>(n, n_max + 1))];
    }
    std::vector<double> probs = erlang_c_pmf(p, n_max);
    ChiSquareResult gof = chi_square_gof(counts, probs);

    OutputSink sink(rc.out);
    std::ostream& os = sink.stream();
    os << "# schema_version=" << kSchemaVersion << " command=validate-mmc version=" << kVersion
       << " seed=" << rc.seed << " lambda=" << p.lambda << " mu=" << p.mu << " c=" << p.servers
       << " reps=" << rc.reps << "\n";
    os << "# chi_square=" << fmt(gof.statistic) << " dof=" << gof.dof
       << " p_value=" << fmt(gof.p_value) << "\n";
    os << "n,empirical,theoretical\n";
    double total = static_cast<double>(rc.reps);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        std::string label = i <= static_cast<std::size_t>(n_max) ? std::to_string(i)
                                                                 : (">" + std::to_string(n_max));
        os << label << ',' << fmt(counts[i] / total) << ',' << fmt(probs[i]) << '\n';
    }
    std::cerr << "validate-mmc: chi_square=" << gof.statistic << " dof=" << gof.dof
              << " p_value=" << gof.p_value << (gof.p_value > 0.01 ? " (pass)" : " (FAIL)")
              << "\n";
    return 0;
}

int cmd_coalesce_study(const RunConfig& rc) {
    ScalingRegime regime;
    if (rc.regime == "qd")
        regime = ScalingRegime::QD;
    else if (rc.regime == "qed")
        regime = ScalingRegime::QED;
    else
        throw ConfigError("regime must be qd or qed");

    OutputSink sink(rc.out);
    std::ostream& os = sink.stream();
    os << "# schema_version=" << kSchemaVersion << " command=coalesce-study version=" << kVersion
       << " seed=" << rc.seed << " regime=" << rc.regime << " reps=" << rc.reps << "\n";
    os << "regime,s,servers,reps,mean_T,ci_lo,ci_hi\n";
    for (double s : rc.scales) {
        CoalescenceStudyRow row =
            coalescence_study_point(regime, s, rc.reps, rc.seed, rc.threads);
        MmcParams p = regime_params(regime, s);
        os << rc.regime << ',' << s << ',' << p.servers << ',' << row.reps << ','
           << fmt(row.t.mean) << ',' << fmt(row.t.lo()) << ',' << fmt(row.t.hi()) << '\n';
        std::cerr << "coalesce-study " << rc.regime << " s=" << s << ": mean_T=" << row.t.mean
                  << " ci95=[" << row.t.lo() << ", " << row.t.hi() << "]\n";
    }
    return 0;
}

int cmd_complexity_study(const RunConfig& rc) {
    auto rows = complexity_study(rc.lambdas, rc.mu, rc.servers, rc.t0_arrivals, rc.reps,
                                 rc.seed, rc.threads);
    OutputSink sink(rc.out);
    std::ostream& os = sink.stream();
    os << "# schema_version=" << kSchemaVersion
       << " command=complexity-study version=" << kVersion << " seed=" << rc.seed
       << " mu=" << rc.mu << " servers=" << rc.servers << " reps=" << rc.reps
       << " t0_arrivals=" << rc.t0_arrivals << "\n";
    os << "# mean_renewals counts materialized epochs on all c+1 streams including the\n"
       << "# forward completion; mean_proposals counts every increment drawn inside the\n"
       << "# maximum sampler (rejected bundles included); mean_sampled is their sum, the\n"
       << "# total number of renewal gaps drawn. Absolute counts depend on the\n"
       << "# maximum-sampler internals and are not comparable across implementations;\n"
       << "# the (1-rho)^2-scaled column is the stable quantity.\n"
       << "# Inspection horizons cover ~t0_arrivals*2^k interarrival times; mean_horizon\n"
       << "# is the successful horizon in time units, reported in place of any\n"
       << "# per-inspection index.\n";
    os << "lambda,rho,mean_renewals,mean_proposals,mean_sampled,mean_T,mean_horizon,"
          "sampled_x_1mrho2\n";
    for (const auto& r : rows) {
        os << r.lambda << ',' << r.rho << ',' << fmt(r.mean_renewals) << ','
           << fmt(r.mean_proposals) << ',' << fmt(r.mean_sampled) << ',' << fmt(r.mean_t)
           << ',' << fmt(r.mean_horizon) << ',' << fmt(r.scaled_sampled) << '\n';
        std::cerr << "complexity-study lambda=" << r.lambda << ": sampled=" << r.mean_sampled
                  << " scaled=" << r.scaled_sampled << "\n";
    }
    return 0;
}

int cmd_selftest(const RunConfig& rc);

void load_config_file(RunConfig& rc, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config file parse error: ") + e.what());
    }
    if (j.contains("command")) rc.command = j["command"].get<std::string>();
    if (j.contains("arrival")) rc.arrival = to_flag_string(distribution_from_json(j["arrival"]));
    if (j.contains("service")) rc.service = to_flag_string(distribution_from_json(j["service"]));
    if (j.contains("servers")) rc.servers = j["servers"].get<int>();
    if (j.contains("reps")) rc.reps = j["reps"].get<std::size_t>();
    if (j.contains("seed")) rc.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("t0")) rc.t0 = j["t0"].get<double>();
    if (j.contains("a")) rc.a = j["a"].get<double>();
    if (j.contains("max_doublings")) rc.max_doublings = j["max_doublings"].get<int>();
    if (j.contains("w1")) rc.want_w1 = j["w1"].get<bool>();
    if (j.contains("check_invariants")) rc.check_invariants = j["check_invariants"].get<bool>();
    if (j.contains("threads")) rc.threads = j["threads"].get<int>();
    if (j.contains("out")) rc.out = j["out"].get<std::string>();
    if (j.contains("format")) rc.format = j["format"].get<std::string>();
    if (j.contains("regime")) rc.regime = j["regime"].get<std::string>();
    if (j.contains("scales")) rc.scales = j["scales"].get<std::vector<double>>();
    if (j.contains("lambdas")) rc.lambdas = j["lambdas"].get<std::vector<double>>();
    if (j.contains("mu")) rc.mu = j["mu"].get<double>();
    if (j.contains("t0_arrivals")) rc.t0_arrivals = j["t0_arrivals"].get<double>();
    if (j.contains("hist_max")) rc.hist_max = j["hist_max"].get<int>();
}

}  // namespace

namespace {

// --- selftest ---------------------------------------------------------------

struct SelfTest {
    int failures = 0;
    void check(bool ok, const std::string& name, const std::string& detail = "") {
        if (ok) {
            std::cout << "ok " << name << "\n";
        } else {
            ++failures;
            std::cout << "FAIL " << name << (detail.empty() ? "" : ": " + detail) << "\n";
        }
    }
};

int cmd_selftest(const RunConfig& rc) {
    (void)rc;
    SelfTest t;

    {  // deterministic rng derivation and byte-identical streams
        RngStream a(42, 3, 1), b(42, 3, 1), c(42, 3, 2);
        bool same = true, differ = false;
        for (int i = 0; i < 1000; ++i) {
            std::uint64_t xa = a.next_u64(), xb = b.next_u64(), xc = c.next_u64();
            same = same && xa == xb;
            differ = differ || xa != xc;
        }
        t.check(same && differ, "rng.derivation");
    }
    {  // distribution sample means within 4 sigma
        RngStream rng(7);
        auto d = DistributionSpec::erlang(3, 6.0);
        double acc = 0.0;
        int n = 20000;
        for (int i = 0; i < n; ++i) acc += sample(d, rng);
        double se = std::sqrt(variance(d) / n);
        t.check(std::abs(acc / n - mean(d)) < 4.0 * se, "dists.erlang_mean");
    }
    {  // mgf >= exp(theta * mean) on a grid
        bool ok = true;
        for (const auto& d :
             {DistributionSpec::exponential(3.0), DistributionSpec::erlang(2, 4.0),
              DistributionSpec::uniform(0.5, 1.5), DistributionSpec::deterministic(0.7)}) {
            double tmax = std::min(theta_max(d), 4.0);
            for (int i = 0; i < 8; ++i) {
                double th = tmax * (i + 0.5) / 9.0;
                ok = ok && mgf(d, th) >= std::exp(th * mean(d)) - 1e-12;
            }
        }
        t.check(ok, "dists.jensen");
    }
    {  // Cramer roots solve psi = 1
        WalkSpec arr{WalkFlavor::ArrivalType, DistributionSpec::exponential(1.0), 2.0, 1};
        WalkSpec srv{WalkFlavor::ServiceType, DistributionSpec::exponential(1.0), 0.7, 1};
        double ra = cramer_root(arr), rs = cramer_root(srv);
        t.check(std::abs(arr.psi(ra) - 1.0) <= 1e-10 && std::abs(srv.psi(rs) - 1.0) <= 1e-10,
                "rwmax.cramer_root");
    }
    {  // prefix stability and M-chain consistency
        WalkSpec arr{WalkFlavor::ArrivalType, DistributionSpec::exponential(1.0), 2.0, 1};
        MaxWalkStream w1(arr, RngStream(11)), w2(arr, RngStream(11));
        w1.extend(40);
        w1.extend(120);
        w2.extend(120);
        bool ok = true;
        for (std::size_t k = 0; k <= 120; ++k)
            ok = ok && w1.s(k) == w2.s(k) && w1.m(k) == w2.m(k);
        for (std::size_t k = 0; k < 120; ++k)
            ok = ok && std::abs(w1.m(k) - std::max(w1.s(k), w1.m(k + 1))) < 1e-12;
        t.check(ok, "rwmax.prefix_and_chain");
    }
    {  // kw replay equals recursion waiting times
        RngStream rng(5);
        bool ok = true;
        for (int rep = 0; rep < 50 && ok; ++rep) {
            int c = 1 + static_cast<int>(rng.uniform01() * 3);
            TrafficTrace trace;
            double time = 0.0;
            for (int n = 0; n < 40; ++n) {
                double gap = -std::log(rng.uniform01());
                double v = -std::log(rng.uniform01()) * c;
                trace.push_back({time, gap, v});
                time += gap;
            }
            auto ws = kw_run(trace, KWVector(c, 0.0), 0, trace.size() - 1);
            auto out = replay(trace, 0, trace.size() - 1, c, 0.0, time + 1000.0);
            for (std::size_t n = 0; n < trace.size(); ++n) {
                double wait = out.service_starts[n] - trace[n].time;
                ok = ok && std::abs(wait - ws[n][0]) <= 1e-9;
            }
        }
        t.check(ok, "kw.replay_equals_recursion");
    }
    {  // vacation queue, dual route: SDE replay vs exact maxima
        VacationParams p{DistributionSpec::exponential(3.0),
                         DistributionSpec::exponential(2.0), 2, 3.5};
        VacationTimeline tl(p, 99, 0);
        CouplingTrace trace = tl.extract_services(20.0);
        auto ref = tl.qv_from_maxima(20.0);
        bool ok = ref.size() <= trace.qv_path.size();
        for (std::size_t i = 0; i < ref.size() && ok; ++i)
            ok = trace.qv_path[i] == ref[i];
        t.check(ok, "vacation.qv_dual_route");
    }
    {  // driver invariants on a few replications
        DcftpConfig cfg;
        cfg.interarrival = parse_distribution("exp:3");
        cfg.service = parse_distribution("exp:2");
        cfg.servers = 2;
        cfg.seed = 2024;
        cfg.check_invariants = true;
        bool ok = true;
        std::string what;
        try {
            for (std::uint64_t r = 0; r < 20; ++r) (void)sample_stationary(cfg, r);
        } catch (const std::exception& e) {
            ok = false;
            what = e.what();
        }
        t.check(ok, "driver.invariants", what);
    }
    {  // determinism of the full sampler
        DcftpConfig cfg;
        cfg.interarrival = parse_distribution("exp:3");
        cfg.service = parse_distribution("exp:2");
        cfg.servers = 2;
        cfg.seed = 77;
        StationarySample s1 = sample_stationary(cfg, 4);
        StationarySample s2 = sample_stationary(cfg, 4);
        bool ok = s1.z0.queue == s2.z0.queue && s1.z0.remaining == s2.z0.remaining &&
                  s1.z0.since_arrival == s2.z0.since_arrival &&
                  s1.coalescence_time == s2.coalescence_time;
        t.check(ok, "driver.determinism");
    }

    std::cout << (t.failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
    return t.failures == 0 ? 0 : 4;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    RunConfig rc;

    // pre-scan for a config file so that explicit flags win
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                load_config_file(rc, argv[i + 1]);
            } catch (const ConfigError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
        }
    }

    CLI::App app{"exact steady-state sampling for FCFS GI/GI/c queues"};
    app.set_version_flag("--version", kVersion);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags win)");
    app.require_subcommand(0, 1);

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", rc.seed, "master seed");
        cmd->add_option("--reps", rc.reps, "number of replications");
        cmd->add_option("--threads", rc.threads, "worker threads over replications");
        cmd->add_option("--out", rc.out, "output path ('-' or empty = stdout)");
        cmd->add_option("--format", rc.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--config", config_path, "JSON config file (flags win)");
    };
    auto add_model = [&](CLI::App* cmd) {
        cmd->add_option("--arrival", rc.arrival, "interarrival law, kind:params");
        cmd->add_option("--service", rc.service, "service law, kind:params");
        cmd->add_option("--servers", rc.servers, "number of servers c");
        cmd->add_option("--a", rc.a, "compensation rate in (lambda, c*mu); 0 = midpoint");
        cmd->add_option("--t0", rc.t0, "base inspection horizon (checks at t0*2^k)");
        cmd->add_option("--max-doublings", rc.max_doublings, "horizon doubling cap");
    };

    CLI::App* sample = app.add_subcommand("sample", "draw exact stationary samples");
    add_common(sample);
    add_model(sample);
    sample->add_flag("--w1", rc.want_w1, "also report the workload vector at T_1");
    sample->add_flag("--check-invariants", rc.check_invariants,
                     "assert structural invariants per replication");
    sample->add_option("--dump-timeline", rc.dump_timeline,
                       "write a vacation timeline CSV for replication 0");

    CLI::App* validate = app.add_subcommand("validate-mmc",
                                            "chi-square against the M/M/c closed form");
    add_common(validate);
    add_model(validate);
    validate->add_option("--hist-max", rc.hist_max, "histogram cells 0..hist_max plus tail");

    CLI::App* coal = app.add_subcommand("coalesce-study",
                                        "forward-coupled coalescence time experiment");
    add_common(coal);
    coal->add_option("--regime", rc.regime, "qd or qed")
        ->check(CLI::IsMember({"qd", "qed"}));
    coal->add_option("--scale", rc.scales, "system scale s (comma-separated or repeated)")
        ->delimiter(',');

    CLI::App* cplx = app.add_subcommand("complexity-study",
                                        "renewal counts vs traffic intensity");
    add_common(cplx);
    cplx->add_option("--lambdas", rc.lambdas, "arrival rates (comma-separated or repeated)")
        ->delimiter(',');
    cplx->add_option("--mu", rc.mu, "service rate");
    cplx->add_option("--servers", rc.servers, "number of servers c");
    cplx->add_option("--t0-arrivals", rc.t0_arrivals,
                     "base inspection horizon, in mean interarrival times");

    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in invariant suite");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return app.exit(e);
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    std::string command = rc.command;
    if (sample->parsed()) command = "sample";
    if (validate->parsed()) command = "validate-mmc";
    if (coal->parsed()) command = "coalesce-study";
    if (cplx->parsed()) command = "complexity-study";
    if (selftest->parsed()) command = "selftest";
    if (command.empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        if (command == "sample") return cmd_sample(rc);
        if (command == "validate-mmc") return cmd_validate_mmc(rc);
        if (command == "coalesce-study") return cmd_coalesce_study(rc);
        if (command == "complexity-study") return cmd_complexity_study(rc);
        if (command == "selftest") return cmd_selftest(rc);
        std::cerr << "error: unknown command '" << command << "'\n";
        return 2;
    } catch (const ResourceCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace exactq
