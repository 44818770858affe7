#include "prusim/bounds.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <stdexcept>

#include "prusim/experiments.hpp"
#include "prusim/isometry_s.hpp"
#include "prusim/path_oracles.hpp"

namespace prusim {

namespace {

using json = nlohmann::json;

const std::vector<int> kGrid{4, 8, 16};

std::vector<BoundSpec> make_builtin() {
    std::vector<BoundSpec> c;
    auto add = [&](std::string id, std::string suite, std::string desc, std::string trunc,
                   BoundKind kind, std::vector<int> ts, int unitaries = 0) {
        BoundSpec s;
        s.id = std::move(id);
        s.suite = std::move(suite);
        s.description = std::move(desc);
        s.truncation = std::move(trunc);
        s.kind = kind;
        s.N_grid = kGrid;
        s.t_grid = std::move(ts);
        s.unitaries = unitaries;
        c.push_back(std::move(s));
    };
    add("VL_FL", "appendix-a", "||(V^L - F^L) Pi|| <= sqrt(t(t+2)/N)", "sum", BoundKind::Upper,
        {1, 2});
    add("V_F", "appendix-a", "||(V - F) Pi|| <= 8 sqrt((t+2)(t+4)/N)", "sum", BoundKind::Upper,
        {1, 2});
    add("FLdag_FL_id", "appendix-a", "||(F^L,dag F^L - id) Pi|| = t/N", "sum", BoundKind::Equal,
        {1, 2});
    add("FLdag_U_FR", "appendix-a", "||F^L,dag U F^R Pi|| <= 3 sqrt(t(t+2)/N), Haar U", "sum",
        BoundKind::Upper, {1, 2}, 5);
    for (const auto& e : commuting_catalog())
        if (e.trend_checked)
            add(e.id, "s-lemmas", "||(" + e.description + ") Pi||", "per-register",
                BoundKind::Trend, {1});
    add("image_F1L", "s-lemmas", "max ||F^L,dag X^k3 S psi|| over kernel states of F1^L,dag",
        "per-register", BoundKind::Trend, {1}, 0);
    add("image_F2L", "s-lemmas", "max ||F^L,dag S psi|| over kernel states of F2^L,dag",
        "per-register", BoundKind::Trend, {1}, 0);
    return c;
}

DomainSpec monogamy_domain(int N, int t) {
    // A and the inputs of R move together, as do the outputs of L; the other
    // two coordinates stay rigid because F^L,dag and F^R read them across A.
    DomainSpec d = single_pair_domain(N, t);
    d.regs = {{0, true, 3, 2}, {1, false, 1, 0}};
    d.classes = {SymKind::Perm, SymKind::Rigid, SymKind::Rigid, SymKind::Perm};
    return d;
}

}  // namespace

std::string kind_name(BoundKind k) {
    switch (k) {
        case BoundKind::Upper: return "upper";
        case BoundKind::Equal: return "equal";
        case BoundKind::Trend: return "trend";
    }
    return "?";
}

BoundKind kind_from_name(const std::string& s) {
    if (s == "upper") return BoundKind::Upper;
    if (s == "equal") return BoundKind::Equal;
    if (s == "trend") return BoundKind::Trend;
    throw std::invalid_argument("unknown bound kind '" + s + "'");
}

double stated_bound(const std::string& id, int N, int t) {
    const double n = N, tt = t;
    if (id == "VL_FL") return std::sqrt(tt * (tt + 2) / n);
    if (id == "V_F") return 8 * std::sqrt((tt + 2) * (tt + 4) / n);
    if (id == "FLdag_FL_id") return tt / n;
    if (id == "FLdag_U_FR") return 3 * std::sqrt(tt * (tt + 2) / n);
    return std::numeric_limits<double>::quiet_NaN();
}

const std::vector<BoundSpec>& builtin_catalog() {
    static const std::vector<BoundSpec> c = make_builtin();
    return c;
}

std::vector<BoundSpec> load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open bound catalog '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("bound catalog: " + std::string(e.what()));
    }
    if (j.value("schema", "") != "prusim.bound_catalog/1")
        throw std::invalid_argument("bound catalog: unsupported schema");
    std::vector<BoundSpec> out;
    for (const auto& e : j.at("bounds")) {
        const std::string id = e.at("id");
        const BoundSpec* base = nullptr;
        for (const auto& b : builtin_catalog())
            if (b.id == id) base = &b;
        if (!base) throw std::invalid_argument("bound catalog: unknown id '" + id + "'");
        BoundSpec s = *base;
        s.suite = e.value("suite", s.suite);
        s.description = e.value("description", s.description);
        s.truncation = e.value("truncation", s.truncation);
        s.kind = kind_from_name(e.value("kind", kind_name(s.kind)));
        s.N_grid = e.value("N_grid", s.N_grid);
        s.t_grid = e.value("t_grid", s.t_grid);
        s.unitaries = e.value("unitaries", s.unitaries);
        s.seed = e.value("seed", s.seed);
        s.tol = e.value("tol", s.tol);
        s.slope_lo = e.value("slope_lo", s.slope_lo);
        s.slope_hi = e.value("slope_hi", s.slope_hi);
        for (int N : s.N_grid)
            if (!is_power_of_two(N)) throw std::invalid_argument("bound catalog: N not a power of two");
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<BoundSpec> catalog_suite(const std::vector<BoundSpec>& cat, const std::string& suite) {
    std::vector<BoundSpec> out;
    for (const auto& s : cat)
        if (s.suite == suite) out.push_back(s);
    return out;
}

BoundCheck verify_bound(const BoundSpec& spec, int N, int t, const Budget& budget) {
    BoundCheck r;
    r.id = spec.id;
    r.N = N;
    r.t = t;
    r.bound = stated_bound(spec.id, N, t);
    const auto t0 = std::chrono::steady_clock::now();
    NormOptions opt;
    auto measure = [&](const Op& op, const DomainSpec& d) {
        const NormResult n = op_norm_restricted(op, d, true, opt, budget);
        r.columns += n.columns;
        return n.norm;
    };
    const DomainSpec sum_dom = single_pair_domain(N, t);
    if (spec.id == "VL_FL") {
        r.measured = measure(*difference(make_VL(N), make_FL(N)), sum_dom);
    } else if (spec.id == "V_F") {
        r.measured = measure(*difference(make_V(N), make_F(N)), sum_dom);
    } else if (spec.id == "FLdag_FL_id") {
        r.measured =
            measure(*difference(product({adjoint(make_FL(N)), make_FL(N)}), identity_op()), sum_dom);
    } else if (spec.id == "FLdag_U_FR") {
        const DomainSpec d = monogamy_domain(N, t);
        for (int s = 0; s < std::max(spec.unitaries, 1); ++s) {
            CounterRng rng(spec.seed, std::uint64_t(s));
            const OpPtr op =
                product({adjoint(make_FL(N)), make_unitary_A(sample_haar(N, rng)), make_FR(N)});
            r.measured = std::max(r.measured, measure(*op, d));
        }
    } else if (spec.id == "tilde") {
        // Columns of S~ - S are orthogonal, so the norm is the largest column norm.
        r.measured = tilde_gap_closed_form(N, t);
    } else if (spec.id == "image_F1L" || spec.id == "image_F2L") {
        const ImageProbeReport p =
            image_lemma_probe(spec.id.substr(6), N, t, 64, spec.seed, budget);
        r.measured = p.max_norm;
        r.columns = p.kernel_dim;
    } else {
        const BoundReport b = commuting_norm(spec.id, N, t, true, opt, budget);
        r.measured = b.measured;
        r.columns = b.columns;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    switch (spec.kind) {
        case BoundKind::Upper: r.pass = r.measured <= r.bound + spec.tol; break;
        case BoundKind::Equal: r.pass = std::abs(r.measured - r.bound) <= spec.tol; break;
        case BoundKind::Trend: r.pass = true; break;
    }
    return r;
}

TrendVerdict judge_trend(const BoundSpec& spec, const std::vector<int>& N,
                         const std::vector<double>& values) {
    TrendVerdict v;
    if (N.size() < 2 || N.size() != values.size()) return v;
    v.monotone = strictly_decreasing(values);
    v.slope = loglog_slope(N, values);
    v.pass = v.monotone && v.slope >= spec.slope_lo && v.slope <= spec.slope_hi;
    return v;
}

}  // namespace prusim
