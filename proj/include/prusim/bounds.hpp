#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prusim/norm.hpp"

namespace prusim {

// How a catalog entry is judged.
//   Upper:    measured <= stated + tol at every grid point.
//   Equal:    |measured - stated| <= tol.
//   Trend:    no constant is stated; values must decrease strictly along the N
//             grid with a log-log slope inside [slope_lo, slope_hi].
enum class BoundKind { Upper, Equal, Trend };

struct BoundSpec {
    std::string id;
    std::string suite;  // "appendix-a" or "s-lemmas"
    std::string description;
    std::string truncation;  // "sum" or "per-register"
    BoundKind kind = BoundKind::Upper;
    std::vector<int> N_grid;
    std::vector<int> t_grid;
    int unitaries = 0;  // Haar samples for entries with a random U
    std::uint64_t seed = 0;
    double tol = 1e-9;
    double slope_lo = -0.85;
    double slope_hi = -0.15;
};

std::string kind_name(BoundKind k);
BoundKind kind_from_name(const std::string& s);

// Stated bound at (N, t); NaN for trend entries.
double stated_bound(const std::string& id, int N, int t);

const std::vector<BoundSpec>& builtin_catalog();
// Reads a catalog file; every id must be known, grids may differ from the builtin.
std::vector<BoundSpec> load_catalog(const std::string& path);
std::vector<BoundSpec> catalog_suite(const std::vector<BoundSpec>& cat, const std::string& suite);

struct BoundCheck {
    std::string id;
    int N = 0;
    int t = 0;
    double measured = 0;
    double bound = 0;  // NaN for trend entries
    bool pass = true;  // per-point verdict; trend entries are judged on the curve
    std::size_t columns = 0;
    double seconds = 0;
};

BoundCheck verify_bound(const BoundSpec& spec, int N, int t, const Budget& budget = {});

struct TrendVerdict {
    bool monotone = false;
    double slope = 0;
    bool pass = false;
};
TrendVerdict judge_trend(const BoundSpec& spec, const std::vector<int>& N,
                         const std::vector<double>& values);

}  // namespace prusim
