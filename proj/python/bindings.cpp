#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "prusim/bounds.hpp"
#include "prusim/cli.hpp"
#include "prusim/decoder.hpp"
#include "prusim/experiments.hpp"
#include "prusim/good_tuples.hpp"
#include "prusim/isometry_s.hpp"

namespace py = pybind11;
using namespace prusim;

namespace {

using PairList = std::vector<std::pair<int, int>>;

Relation rel(const PairList& p, int N) { return Relation::from_pairs(p, N); }

RelationQuad quad(const PairList& L1, const PairList& L2, const PairList& R1, const PairList& R2,
                  int N) {
    return {rel(L1, N), rel(L2, N), rel(R1, N), rel(R2, N)};
}

KeyTriple keys(const std::tuple<int, int, int>& k) {
    return {Value(std::get<0>(k)), Value(std::get<1>(k)), Value(std::get<2>(k))};
}

std::vector<Value> vals(const std::vector<int>& v) { return {v.begin(), v.end()}; }
std::vector<int> ints(const std::vector<Value>& v) { return {v.begin(), v.end()}; }

py::dict dec_dict(const DecOutput& d) {
    py::dict o;
    o["L_isolate"] = d.L_isolate.to_vector();
    o["R_isolate"] = d.R_isolate.to_vector();
    o["L_pair"] = d.L_pair.to_vector();
    o["R_pair"] = d.R_pair.to_vector();
    o["mL"] = ints(d.mL);
    o["mR"] = ints(d.mR);
    o["keys"] = py::make_tuple(d.keys.k1, d.keys.k2, d.keys.k3);
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Numerical checks for the path-recording PRU construction";
    m.attr("__version__") = PRUSIM_VERSION;

    m.def("augment", [](const PairList& r, const std::string& kind, std::tuple<int, int, int> k,
                        const std::vector<int>& z, int N) {
        static const std::map<std::string, AugKind> kinds{
            {"L1", AugKind::L1}, {"L2", AugKind::L2}, {"R1", AugKind::R1}, {"R2", AugKind::R2}};
        return augment(rel(r, N), kinds.at(kind), keys(k), vals(z)).to_vector();
    }, py::arg("rel"), py::arg("kind"), py::arg("keys"), py::arg("z") = std::vector<int>{},
       py::arg("N") = 256);

    m.def("dec", [](const PairList& L, const PairList& R, std::tuple<int, int, int> k, int N) -> py::object {
        const auto d = dec(rel(L, N), rel(R, N), keys(k));
        if (!d) return py::none();
        return dec_dict(*d);
    }, py::arg("L"), py::arg("R"), py::arg("keys"), py::arg("N") = 256,
       "Decoder output as a dict, or None on failure.");

    m.def("enc", [](const py::dict& d, int N) {
        DecOutput o;
        o.L_isolate = rel(d["L_isolate"].cast<PairList>(), N);
        o.R_isolate = rel(d["R_isolate"].cast<PairList>(), N);
        o.L_pair = rel(d["L_pair"].cast<PairList>(), N);
        o.R_pair = rel(d["R_pair"].cast<PairList>(), N);
        o.mL = vals(d["mL"].cast<std::vector<int>>());
        o.mR = vals(d["mR"].cast<std::vector<int>>());
        o.keys = keys(d["keys"].cast<std::tuple<int, int, int>>());
        const Merged mg = enc(o);
        return py::make_tuple(mg.L.to_vector(), mg.R.to_vector());
    }, py::arg("d"), py::arg("N") = 256);

    m.def("is_good", [](const PairList& L1, const PairList& L2, const PairList& R1, const PairList& R2,
                        std::tuple<int, int, int> k, const std::vector<int>& zL,
                        const std::vector<int>& zR, int N) {
        return GoodTupleChecker(quad(L1, L2, R1, R2, N)).is_good(keys(k), vals(zL), vals(zR));
    }, py::arg("L1"), py::arg("L2"), py::arg("R1"), py::arg("R2"), py::arg("keys"),
       py::arg("zL") = std::vector<int>{}, py::arg("zR") = std::vector<int>{}, py::arg("N") = 256);

    m.def("census", [](const PairList& L1, const PairList& L2, const PairList& R1, const PairList& R2,
                       int N, int t, std::uint64_t samples, std::uint64_t seed) {
        const RelationQuad q = quad(L1, L2, R1, R2, N);
        const CensusReport r = samples ? census_sampled(q, N, t, samples, seed) : census_exhaustive(q, N, t);
        py::dict o;
        o["mode"] = r.mode;
        o["universe"] = r.universe;
        o["good"] = r.good;
        o["fraction"] = r.fraction;
        o["sigma"] = r.sigma;
        o["bound"] = r.bound;
        o["pass"] = r.pass;
        return o;
    }, py::arg("L1"), py::arg("L2"), py::arg("R1"), py::arg("R2"), py::arg("N"), py::arg("t"),
       py::arg("samples") = 0, py::arg("seed") = 0, "samples = 0 counts exhaustively.");

    m.def("sample_haar", [](int N, std::uint64_t seed, std::uint64_t index) {
        CounterRng rng(seed, index);
        return sample_haar(N, rng);
    }, py::arg("N"), py::arg("seed") = 0, py::arg("index") = 0);

    m.def("attack", [](int N, int trials, std::uint64_t seed) {
        const AttackReport r = attack_insecure_variant(N, trials, seed);
        py::dict o;
        o["insecure_success"] = r.insecure_success;
        o["full_success"] = r.full_success;
        o["chance"] = r.chance;
        o["full_sigma"] = r.full_sigma;
        return o;
    }, py::arg("N"), py::arg("trials") = 1000, py::arg("seed") = 0);

    m.def("stated_bound", &stated_bound, py::arg("id"), py::arg("N"), py::arg("t"));
    m.def("tilde_gap", &tilde_gap_closed_form, py::arg("N"), py::arg("t"));

    m.def("partial_isometry_deviation", [](const std::string& which, int N, int t) {
        py::gil_scoped_release nogil;
        return partial_isometry_witness(which, N, t).deviation;
    }, py::arg("which"), py::arg("N"), py::arg("t") = 1);

    m.def("s_equivalence", [](int N, int max_size, std::uint64_t samples, std::uint64_t seed) {
        py::gil_scoped_release nogil;
        return s_equivalence(N, max_size, samples, seed).max_discrepancy;
    }, py::arg("N"), py::arg("max_size") = 1, py::arg("samples") = 0, py::arg("seed") = 0);

    m.def("run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "prusim");
        std::vector<const char*> argv;
        for (auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
            py::gil_scoped_release nogil;
            code = run_cli(int(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Runs a subcommand in-process; returns (exit_code, stdout, stderr).");
}
