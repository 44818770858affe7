#include "prusim/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "prusim/bounds.hpp"
#include "prusim/decoder.hpp"
#include "prusim/experiments.hpp"
#include "prusim/good_tuples.hpp"
#include "prusim/isometry_s.hpp"

namespace prusim {

using json = nlohmann::ordered_json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// NaN and infinities are not valid JSON numbers.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<int> parse_int_list(const std::string& s, const char* what) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad integer in ") + what + ": '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError(std::string(what) + " is empty");
    return out;
}

void require_power_of_two(const std::vector<int>& Ns) {
    for (int N : Ns)
        if (N < 2 || N > 256 || !is_power_of_two(N))
            throw ConfigError("N must be a power of two in [2, 256], got " + std::to_string(N));
}

// Collects what a suite produced and turns it into the exit code.
struct Outcome {
    bool failed = false;
    bool exhausted = false;
    std::vector<std::string> warnings;

    void warn(std::ostream& err, std::string w) {
        err << "warning: " << w << '\n';
        warnings.push_back(std::move(w));
    }
    int code() const {
        if (failed) return kExitCheckFailed;
        if (exhausted) return kExitBudget;
        return kExitOk;
    }
    std::string status() const {
        if (failed) return "fail";
        if (exhausted) return "budget_exhausted";
        return "pass";
    }
};

struct Common {
    std::string json_path;
    std::string csv_path;
    double time_budget = -1;
    double memory_gib = -1;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c, bool with_seed = true) {
    sub->add_option("--json", c.json_path, "Write the JSON report to this file");
    sub->add_option("--csv", c.csv_path, "Write per-point CSV rows to this file");
    sub->add_option("--time-budget", c.time_budget, "Suite time budget in seconds (default 600)");
    sub->add_option("--memory-budget", c.memory_gib, "Suite memory budget in GiB (default 4)");
    if (with_seed) sub->add_option("--seed", c.seed, "Master seed (default 0)");
}

Budget budget_for(const Common& c) {
    try {
        return resolve_budget(c.time_budget, c.memory_gib, std::getenv(kBudgetEnv));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

// A fresh budget with whatever time the suite has left.
Budget remaining(const Budget& suite) {
    Budget b = suite;
    b.seconds = std::max(0.0, suite.seconds - suite.elapsed());
    b.start = std::chrono::steady_clock::now();
    return b;
}

json budget_json(const Budget& b) {
    return {{"seconds", b.seconds}, {"memory_bytes", b.max_bytes}};
}

void write_outputs(const Common& c, const json& report, const std::string& csv,
                   std::ostream& err) {
    if (!c.json_path.empty()) {
        std::ofstream f(c.json_path);
        if (!f) throw ConfigError("cannot write " + c.json_path);
        f << report.dump(2) << '\n';
    }
    if (!c.csv_path.empty()) {
        std::ofstream f(c.csv_path);
        if (!f) throw ConfigError("cannot write " + c.csv_path);
        f << csv;
    }
    (void)err;
}

json envelope(const std::string& command, json config, const Common& c, const Budget& b,
              const Outcome& o, json results) {
    config["budget"] = budget_json(b);
    json r;
    r["schema"] = kReportSchema;
    r["version"] = PRUSIM_VERSION;
    r["command"] = command;
    r["config"] = std::move(config);
    r["seed"] = c.seed;
    r["status"] = o.status();
    r["exit_code"] = o.code();
    r["warnings"] = o.warnings;
    r["results"] = std::move(results);
    return r;
}

std::string fmt(double v, int prec = 6) {
    if (!std::isfinite(v)) return "-";
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

// ---- verify-bounds -------------------------------------------------------------

struct VerifyArgs {
    std::string suite;
    std::string N_grid;
    std::string t_list;
    std::string catalog;
};

int cmd_verify_bounds(const VerifyArgs& a, const Common& c, std::ostream& out,
                      std::ostream& err) {
    if (a.suite != "appendix-a" && a.suite != "s-lemmas")
        throw ConfigError("--suite must be appendix-a or s-lemmas");
    std::vector<BoundSpec> cat;
    try {
        cat = a.catalog.empty() ? builtin_catalog() : load_catalog(a.catalog);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bound catalog: ") + e.what());
    }
    auto specs = catalog_suite(cat, a.suite);
    std::optional<std::vector<int>> Ns, ts;
    if (!a.N_grid.empty()) {
        Ns = parse_int_list(a.N_grid, "--N-grid");
        require_power_of_two(*Ns);
    }
    if (!a.t_list.empty()) ts = parse_int_list(a.t_list, "--t");
    if (ts)
        for (int t : *ts)
            if (t < 1 || t > 4) throw ConfigError("--t values must be in [1, 4]");
    const Budget suite = budget_for(c);

    Outcome o;
    json results = json::array();
    std::ostringstream csv;
    csv << "id,N,t,measured,bound,verdict\n";
    out << std::left << std::setw(20) << "id" << std::setw(5) << "N" << std::setw(4) << "t"
        << std::setw(14) << "measured" << std::setw(14) << "bound" << std::setw(10) << "verdict"
        << "seconds\n";
    for (auto spec : specs) {
        if (Ns) spec.N_grid = *Ns;
        if (ts) spec.t_grid = *ts;
        spec.seed = c.seed;
        json entry;
        entry["id"] = spec.id;
        entry["description"] = spec.description;
        entry["kind"] = kind_name(spec.kind);
        entry["truncation"] = spec.truncation;
        entry["points"] = json::array();
        json trends = json::array();
        bool entry_ok = true;
        for (int t : spec.t_grid) {
            std::vector<int> done;
            std::vector<double> vals;
            for (int N : spec.N_grid) {
                BoundCheck r;
                try {
                    r = verify_bound(spec, N, t, remaining(suite));
                } catch (const BudgetExceeded& e) {
                    o.exhausted = true;
                    o.warn(err, spec.id + " t=" + std::to_string(t) + ": budget exhausted at N=" +
                                    std::to_string(N) + " (" + e.what() +
                                    "); grid degraded to the smaller N");
                    break;
                }
                done.push_back(N);
                vals.push_back(r.measured);
                const std::string verdict =
                    spec.kind == BoundKind::Trend ? "recorded" : (r.pass ? "pass" : "fail");
                if (!r.pass) entry_ok = false;
                entry["points"].push_back({{"N", N},
                                           {"t", t},
                                           {"measured", num(r.measured)},
                                           {"bound", num(r.bound)},
                                           {"verdict", verdict},
                                           {"columns", r.columns}});
                csv << spec.id << ',' << N << ',' << t << ',' << std::setprecision(12)
                    << r.measured << ',' << (std::isfinite(r.bound) ? fmt(r.bound, 12) : "")
                    << ',' << verdict << '\n';
                out << std::setw(20) << spec.id << std::setw(5) << N << std::setw(4) << t
                    << std::setw(14) << fmt(r.measured) << std::setw(14) << fmt(r.bound)
                    << std::setw(10) << verdict << fmt(r.seconds, 3) << '\n';
            }
            if (spec.kind == BoundKind::Trend) {
                const TrendVerdict v = judge_trend(spec, done, vals);
                const bool complete = done.size() == spec.N_grid.size();
                if (!v.pass && complete) entry_ok = false;
                trends.push_back({{"t", t},
                                  {"N", done},
                                  {"monotone", v.monotone},
                                  {"slope", num(v.slope)},
                                  {"slope_range", {spec.slope_lo, spec.slope_hi}},
                                  {"complete", complete},
                                  {"pass", v.pass && complete}});
                out << "  trend " << spec.id << " t=" << t << ": monotone=" << v.monotone
                    << " slope=" << fmt(v.slope, 4) << (complete ? "" : " (incomplete grid)")
                    << " -> " << (v.pass && complete ? "pass" : "fail") << '\n';
            }
        }
        if (spec.kind == BoundKind::Trend) entry["trend"] = trends;
        entry["pass"] = entry_ok;
        if (!entry_ok) o.failed = true;
        results.push_back(entry);
    }
    json config{{"suite", a.suite},
                {"N_grid", Ns ? json(*Ns) : json(nullptr)},
                {"t", ts ? json(*ts) : json(nullptr)},
                {"catalog", a.catalog.empty() ? json("builtin") : json(a.catalog)}};
    write_outputs(c, envelope("verify-bounds", config, c, suite, o, results), csv.str(), err);
    out << "status: " << o.status() << '\n';
    return o.code();
}

// ---- run-hybrids ---------------------------------------------------------------

struct HybridArgs {
    std::string pairs = "3-4,4-5,1-2,6-7";
    std::string N_grid = "4,8,16";
    int t = 1;
    std::string adversary = "identity";
    int dB = 1;
    int samples = 10000;
    int coupled_samples = 100;
};

int cmd_run_hybrids(const HybridArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
    const auto Ns = parse_int_list(a.N_grid, "--N-grid");
    require_power_of_two(Ns);
    if (a.t < 1 || a.t > 4) throw ConfigError("--t must be in [1, 4]");
    if (a.samples < 1 || a.coupled_samples < 1) throw ConfigError("sample counts must be positive");
    std::vector<std::pair<int, int>> pairs;
    {
        std::stringstream ss(a.pairs);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const auto dash = tok.find('-');
            if (dash == std::string::npos) throw ConfigError("pairs look like 3-4, got '" + tok + "'");
            const auto v = parse_int_list(tok.substr(0, dash) + "," + tok.substr(dash + 1), "--pairs");
            if (v[0] < 1 || v[0] > 7 || v[1] < 1 || v[1] > 7 || v[0] == v[1])
                throw ConfigError("hybrid indices must be distinct values in 1..7");
            pairs.emplace_back(v[0], v[1]);
        }
    }
    try {
        (void)adversary_by_name(a.adversary, Ns.front(), a.t, a.dB, c.seed);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const Budget suite = budget_for(c);
    Outcome o;
    json results = json::array();
    std::ostringstream csv;
    csv << "pair,N,t,td,sigma,verdict\n";
    out << std::left << std::setw(8) << "pair" << std::setw(5) << "N" << std::setw(14) << "TD"
        << std::setw(12) << "sigma" << "seconds\n";
    for (auto [i, j] : pairs) {
        json entry{{"pair", {i, j}}, {"adversary", a.adversary}};
        entry["points"] = json::array();
        std::vector<int> done;
        std::vector<double> tds;
        bool ok = true;
        const bool coupled = (i == 6 && j == 7) || (i == 7 && j == 6);
        for (int N : Ns) {
            const auto t0 = std::chrono::steady_clock::now();
            json p{{"N", N}};
            double td = 0, sigma = 0;
            try {
                const AdversarySpec adv = adversary_by_name(a.adversary, N, a.t, a.dB, c.seed);
                if (coupled) {
                    const CouplingReport cr = h6_h7_coupled(N, adv, a.coupled_samples, c.seed);
                    td = cr.td;
                    p["samples"] = cr.samples;
                    p["max_frobenius_gap"] = cr.max_frobenius_gap;
                    const bool pass = cr.max_frobenius_gap < 1e-9;
                    p["pass"] = pass;
                    ok = ok && pass;
                } else {
                    HybridConfig cfg;
                    cfg.N = N;
                    cfg.adv = adv;
                    cfg.samples = a.samples;
                    cfg.seed = c.seed;
                    cfg.budget = remaining(suite);
                    const HybridResult ri = hybrid(i, cfg);
                    cfg.budget = remaining(suite);
                    const HybridResult rj = hybrid(j, cfg);
                    td = trace_distance(ri.rho, rj.rho);
                    sigma = ri.td_sigma + rj.td_sigma;
                    p["trace"] = {num(ri.check.trace), num(rj.check.trace)};
                    p["exact"] = {ri.exact, rj.exact};
                }
            } catch (const BudgetExceeded& e) {
                o.exhausted = true;
                o.warn(err, "pair " + std::to_string(i) + "-" + std::to_string(j) +
                                ": budget exhausted at N=" + std::to_string(N) + " (" + e.what() +
                                "); grid degraded to the smaller N");
                break;
            }
            p["td"] = num(td);
            p["sigma"] = num(sigma);
            entry["points"].push_back(p);
            done.push_back(N);
            tds.push_back(td);
            csv << i << '-' << j << ',' << N << ',' << a.t << ',' << std::setprecision(12) << td
                << ',' << sigma << ',' << (coupled ? (ok ? "pass" : "fail") : "recorded") << '\n';
            out << std::setw(8) << (std::to_string(i) + "-" + std::to_string(j)) << std::setw(5)
                << N << std::setw(14) << fmt(td) << std::setw(12) << fmt(sigma)
                << fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3)
                << '\n';
        }
        const bool complete = done.size() == Ns.size();
        if (!coupled) {
            const bool mono = done.size() >= 2 && strictly_decreasing(tds);
            entry["monotone"] = mono;
            entry["slope"] = done.size() >= 2 ? num(loglog_slope(done, tds)) : json(nullptr);
            if (complete && !mono) ok = false;
        }
        entry["complete"] = complete;
        entry["pass"] = ok && complete;
        if (!ok) o.failed = true;
        results.push_back(entry);
    }
    json config{{"pairs", a.pairs},     {"N_grid", Ns},         {"t", a.t},
                {"adversary", a.adversary}, {"dB", a.dB},        {"samples", a.samples},
                {"coupled_samples", a.coupled_samples}};
    write_outputs(c, envelope("run-hybrids", config, c, suite, o, results), csv.str(), err);
    out << "status: " << o.status() << '\n';
    return o.code();
}

// ---- attack-demo ---------------------------------------------------------------

int cmd_attack(const std::string& grid, int trials, int key_bits, const Common& c,
               std::ostream& out, std::ostream& err) {
    const auto Ns = parse_int_list(grid, "--N-grid");
    require_power_of_two(Ns);
    if (trials < 1) throw ConfigError("--trials must be positive");
    const Budget suite = budget_for(c);
    Outcome o;
    json results = json::array();
    std::ostringstream csv;
    csv << "N,trials,insecure_success,full_success,chance,full_sigma,verdict\n";
    out << std::left << std::setw(5) << "N" << std::setw(12) << "insecure" << std::setw(12)
        << "full" << std::setw(10) << "chance" << "verdict\n";
    for (int N : Ns) {
        if (suite.elapsed() > suite.seconds) {
            o.exhausted = true;
            o.warn(err, "attack-demo: budget exhausted before N=" + std::to_string(N));
            break;
        }
        const AttackReport r = attack_insecure_variant(N, trials, c.seed, key_bits);
        const bool pass = r.insecure_pass && r.full_pass;
        if (!pass) o.failed = true;
        results.push_back({{"N", N},
                           {"trials", r.trials},
                           {"key_bits", r.key_bits},
                           {"insecure_success", r.insecure_success},
                           {"full_success", r.full_success},
                           {"chance", r.chance},
                           {"full_sigma", r.full_sigma},
                           {"insecure_pass", r.insecure_pass},
                           {"full_pass", r.full_pass}});
        csv << N << ',' << trials << ',' << r.insecure_success << ',' << r.full_success << ','
            << r.chance << ',' << r.full_sigma << ',' << (pass ? "pass" : "fail") << '\n';
        out << std::setw(5) << N << std::setw(12) << fmt(r.insecure_success) << std::setw(12)
            << fmt(r.full_success) << std::setw(10) << fmt(r.chance) << (pass ? "pass" : "fail")
            << '\n';
    }
    json config{{"N_grid", Ns}, {"trials", trials}, {"key_bits", key_bits}};
    write_outputs(c, envelope("attack-demo", config, c, suite, o, results), csv.str(), err);
    out << "status: " << o.status() << '\n';
    return o.code();
}

// ---- dec-roundtrip -------------------------------------------------------------

int cmd_roundtrip(int N, int max_size, bool exhaustive, std::uint64_t samples, const Common& c,
                  std::ostream& out, std::ostream& err) {
    require_power_of_two({N});
    if (max_size < 0 || max_size > 6) throw ConfigError("--max-size must be in [0, 6]");
    if (exhaustive == (samples > 0))
        throw ConfigError("choose exactly one of --exhaustive and --samples");
    const Budget suite = budget_for(c);
    const RoundtripReport r = exhaustive ? dec_roundtrip_exhaustive(N, max_size)
                                         : dec_roundtrip_sampled(N, max_size, samples, c.seed);
    Outcome o;
    if (!r.pass()) o.failed = true;
    json res{{"N", N},
             {"max_size", max_size},
             {"mode", r.mode},
             {"merged_checked", r.merged_checked},
             {"decodable", r.decodable},
             {"enc_dec_failures", r.enc_dec_failures},
             {"outputs_checked", r.outputs_checked},
             {"outputs_in_image", r.in_image},
             {"outputs_outside_image", r.outside_image},
             {"aliasing_failures", r.failure_count - r.enc_dec_failures},
             {"pass_on_image", r.pass_on_image()},
             {"pass", r.pass()},
             {"examples", r.failures}};
    std::ostringstream csv;
    csv << "N,max_size,mode,decodable,enc_dec_failures,outputs,in_image,outside_image,aliasing\n"
        << N << ',' << max_size << ',' << r.mode << ',' << r.decodable << ',' << r.enc_dec_failures
        << ',' << r.outputs_checked << ',' << r.in_image << ',' << r.outside_image << ','
        << r.failure_count - r.enc_dec_failures << '\n';
    out << "enc(dec(x)) = x: " << r.decodable << " decodable inputs, " << r.enc_dec_failures
        << " failures\n"
        << "dec(enc(d)) = d: " << r.outputs_checked << " valid outputs, " << r.in_image
        << " in image, " << r.outside_image << " undecodable, "
        << r.failure_count - r.enc_dec_failures << " aliased\n";
    for (const auto& f : r.failures) out << "  " << f << '\n';
    json config{{"N", N}, {"max_size", max_size}, {"exhaustive", exhaustive}, {"samples", samples}};
    write_outputs(c, envelope("dec-roundtrip", config, c, suite, o, res), csv.str(), err);
    out << "status: " << o.status() << '\n';
    return o.code();
}

// ---- good-tuple-census ---------------------------------------------------------

RelationQuad draw_quad(int N, const std::vector<int>& sizes, std::uint64_t seed) {
    CounterRng rng(seed, 0xC0DE'0000ULL);
    RelationQuad q;
    Relation* regs[4] = {&q.L1, &q.L2, &q.R1, &q.R2};
    for (int r = 0; r < 4; ++r) {
        const bool i_dist = r < 2;
        for (int tries = 0;; ++tries) {
            if (tries > 10000) throw ConfigError("cannot draw distinct relations of that size");
            Relation rel;
            for (int i = 0; i < sizes[r]; ++i)
                rel.insert(Pair{Value(rng.below(N)), Value(rng.below(N))});
            if (i_dist ? rel.i_distinct() : rel.d_distinct()) {
                *regs[r] = rel;
                break;
            }
        }
    }
    return q;
}

int cmd_census(int N, const std::string& sizes_s, const std::string& mode, std::uint64_t samples,
               const std::string& rule_s, const Common& c, std::ostream& out,
               std::ostream& err) {
    require_power_of_two({N});
    auto sizes = parse_int_list(sizes_s, "--sizes");
    if (sizes.size() == 1) sizes.assign(4, sizes[0]);
    if (sizes.size() != 4) throw ConfigError("--sizes takes one value or four (L1,L2,R1,R2)");
    for (int s : sizes)
        if (s < 0 || s > 4) throw ConfigError("relation sizes must be in [0, 4]");
    if (mode != "sampled" && mode != "exhaustive")
        throw ConfigError("--mode must be sampled or exhaustive");
    if (mode == "sampled" && samples == 0) throw ConfigError("--samples must be positive");
    ZRRule rule;
    if (rule_s == "dual")
        rule = ZRRule::Dual;
    else if (rule_s == "literal")
        rule = ZRRule::Literal;
    else
        throw ConfigError("--rule must be dual or literal");
    const Budget suite = budget_for(c);
    const RelationQuad q = draw_quad(N, sizes, c.seed);
    const int t = std::max(1, *std::max_element(sizes.begin(), sizes.end()));
    CensusReport r;
    Outcome o;
    if (mode == "exhaustive") {
        try {
            r = census_exhaustive(q, N, t, rule);
        } catch (const std::length_error& e) {
            o.exhausted = true;
            o.warn(err, std::string(e.what()) + "; falling back to sampling");
            r = census_sampled(q, N, t, samples ? samples : 100000, c.seed, rule);
        }
    } else {
        r = census_sampled(q, N, t, samples, c.seed, rule);
    }
    if (!r.pass) o.failed = true;
    json res{{"N", N},
             {"t", t},
             {"relations",
              {{"L1", q.L1.str()}, {"L2", q.L2.str()}, {"R1", q.R1.str()}, {"R2", q.R2.str()}}},
             {"mode", r.mode},
             {"universe", r.universe},
             {"good", r.good},
             {"fraction", r.fraction},
             {"sigma", r.sigma},
             {"bound", r.bound},
             {"pass", r.pass}};
    std::ostringstream csv;
    csv << "N,t,mode,universe,good,fraction,sigma,bound,verdict\n"
        << N << ',' << t << ',' << r.mode << ',' << r.universe << ',' << r.good << ','
        << std::setprecision(12) << r.fraction << ',' << r.sigma << ',' << r.bound << ','
        << (r.pass ? "pass" : "fail") << '\n';
    out << "relations L1=" << q.L1.str() << " L2=" << q.L2.str() << " R1=" << q.R1.str()
        << " R2=" << q.R2.str() << '\n'
        << "good fraction " << fmt(r.fraction, 8) << " (sigma " << fmt(r.sigma, 3)
        << ") vs bound " << fmt(r.bound, 8) << " over " << r.universe << " tuples\n";
    json config{{"N", N}, {"sizes", sizes}, {"mode", mode}, {"samples", samples}, {"rule", rule_s}};
    write_outputs(c, envelope("good-tuple-census", config, c, suite, o, res), csv.str(), err);
    out << "status: " << o.status() << '\n';
    return o.code();
}

// ---- s-equivalence -------------------------------------------------------------

int cmd_s_equivalence(int N, int max_size, std::uint64_t samples, const Common& c,
                      std::ostream& out, std::ostream& err) {
    require_power_of_two({N});
    if (max_size < 0 || max_size > 2) throw ConfigError("--max-size must be in [0, 2]");
    const Budget suite = budget_for(c);
    Outcome o;
    EquivalenceReport r;
    try {
        r = s_equivalence(N, max_size, samples, c.seed, remaining(suite));
    } catch (const BudgetExceeded& e) {
        o.exhausted = true;
        o.warn(err, std::string("s-equivalence: ") + e.what());
    }
    if (!o.exhausted && !r.pass) o.failed = true;
    json res{{"N", N},           {"max_size", max_size},
             {"mode", r.mode},   {"inputs", r.inputs},
             {"max_discrepancy", r.max_discrepancy},
             {"pass", r.pass}};
    std::ostringstream csv;
    csv << "N,max_size,mode,inputs,max_discrepancy,verdict\n"
        << N << ',' << max_size << ',' << r.mode << ',' << r.inputs << ',' << r.max_discrepancy
        << ',' << (r.pass ? "pass" : "fail") << '\n';
    out << r.inputs << " inputs, max |stage - closed form| = " << fmt(r.max_discrepancy, 3) << '\n';
    json config{{"N", N}, {"max_size", max_size}, {"samples", samples}};
    write_outputs(c, envelope("s-equivalence", config, c, suite, o, res), csv.str(), err);
    out << "status: " << o.status() << '\n';
    return o.code();
}

}  // namespace

Budget resolve_budget(double time_flag, double memory_gib_flag, const char* env) {
    Budget b;
    double seconds = 600, gib = 4;
    if (env && *env) {
        std::stringstream ss(env);
        std::string kv;
        while (std::getline(ss, kv, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(std::string(kBudgetEnv) + ": expected key=value, got '" +
                                            kv + "'");
            const std::string key = kv.substr(0, eq);
            double v = 0;
            try {
                v = std::stod(kv.substr(eq + 1));
            } catch (const std::exception&) {
                throw std::invalid_argument(std::string(kBudgetEnv) + ": bad number in '" + kv + "'");
            }
            if (key == "time")
                seconds = v;
            else if (key == "memory_gib")
                gib = v;
            else
                throw std::invalid_argument(std::string(kBudgetEnv) + ": unknown key '" + key + "'");
        }
    }
    if (time_flag >= 0) seconds = time_flag;
    if (memory_gib_flag >= 0) gib = memory_gib_flag;
    if (!(seconds > 0) || !(gib > 0)) throw std::invalid_argument("budgets must be positive");
    b.seconds = seconds;
    b.max_bytes = std::size_t(gib * double(std::size_t(1) << 30));
    // A visited column costs a label plus hash-set overhead.
    b.max_columns = std::min<std::size_t>(b.max_columns, b.max_bytes / 512);
    return b;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical checks for the path-recording PRU construction", "prusim"};
    app.set_version_flag("--version", std::string(PRUSIM_VERSION));
    app.require_subcommand(1);

    Common common;
    VerifyArgs va;
    auto* vb = app.add_subcommand("verify-bounds", "Operator-norm bound suites");
    vb->add_option("--suite", va.suite, "appendix-a or s-lemmas")->required();
    vb->add_option("--N-grid", va.N_grid, "Comma-separated N values (default from catalog)");
    vb->add_option("--t", va.t_list, "Comma-separated t values (default from catalog)");
    vb->add_option("--catalog", va.catalog, "Bound catalog JSON (default: built in)");
    add_common(vb, common);

    HybridArgs ha;
    auto* rh = app.add_subcommand("run-hybrids", "Trace distances between hybrid experiments");
    rh->add_option("--pairs", ha.pairs, "Hybrid pairs, e.g. 3-4,4-5,1-2,6-7");
    rh->add_option("--N-grid", ha.N_grid, "Comma-separated N values");
    rh->add_option("--t", ha.t, "Queries per oracle");
    rh->add_option("--adversary", ha.adversary,
                   "identity, random, random-dense, attack or distinguishing");
    rh->add_option("--dB", ha.dB, "Ancilla dimension");
    rh->add_option("--samples", ha.samples, "Monte Carlo samples for hybrids 1, 6, 7");
    rh->add_option("--coupled-samples", ha.coupled_samples, "Samples for the 6-7 coupling check");
    add_common(rh, common);

    std::string ad_grid = "4,8,16";
    int ad_trials = 1000, ad_bits = -1;
    auto* ad = app.add_subcommand("attack-demo", "Key recovery against U X^k U and the full construction");
    ad->add_option("--N-grid", ad_grid, "Comma-separated N values");
    ad->add_option("--trials", ad_trials, "Trials per N");
    ad->add_option("--key-bits", ad_bits, "Mask width for the short-key variant (default: full)");
    add_common(ad, common);

    int rt_N = 4, rt_size = 3;
    bool rt_exh = false;
    std::uint64_t rt_samples = 0;
    auto* rt = app.add_subcommand("dec-roundtrip", "Dec/Enc bijectivity checks");
    rt->add_option("--N", rt_N, "Alphabet size");
    rt->add_option("--max-size", rt_size, "Largest merged relation size");
    rt->add_flag("--exhaustive", rt_exh, "Enumerate every input");
    rt->add_option("--samples", rt_samples, "Random inputs of each kind instead");
    add_common(rt, common);

    int gc_N = 64;
    std::string gc_sizes = "1", gc_mode = "sampled", gc_rule = "dual";
    std::uint64_t gc_samples = 100000;
    auto* gc = app.add_subcommand("good-tuple-census", "Fraction of good key/z tuples");
    gc->add_option("--N", gc_N, "Alphabet size");
    gc->add_option("--sizes", gc_sizes, "Relation sizes: one value or L1,L2,R1,R2");
    gc->add_option("--mode", gc_mode, "sampled or exhaustive");
    gc->add_option("--samples", gc_samples, "Sample count in sampled mode");
    gc->add_option("--rule", gc_rule, "z_R condition: dual or literal");
    add_common(gc, common);

    int se_N = 4, se_size = 1;
    std::uint64_t se_samples = 0;
    auto* se = app.add_subcommand("s-equivalence", "Stage composition of S against its closed form");
    se->add_option("--N", se_N, "Alphabet size");
    se->add_option("--max-size", se_size, "Largest size of each relation register");
    se->add_option("--samples", se_samples, "Random inputs instead of exhaustive (0 = exhaustive)");
    add_common(se, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << PRUSIM_VERSION << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        if (vb->parsed()) return cmd_verify_bounds(va, common, out, err);
        if (rh->parsed()) return cmd_run_hybrids(ha, common, out, err);
        if (ad->parsed()) return cmd_attack(ad_grid, ad_trials, ad_bits, common, out, err);
        if (rt->parsed()) return cmd_roundtrip(rt_N, rt_size, rt_exh, rt_samples, common, out, err);
        if (gc->parsed())
            return cmd_census(gc_N, gc_sizes, gc_mode, gc_samples, gc_rule, common, out, err);
        if (se->parsed()) return cmd_s_equivalence(se_N, se_size, se_samples, common, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BudgetExceeded& e) {
        err << "error: budget exhausted: " << e.what() << '\n';
        return kExitBudget;
    }
    return kExitConfig;
}

}  // namespace prusim
