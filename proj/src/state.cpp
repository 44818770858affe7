#include "prusim/state.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace prusim {

void Label::set_z(const std::vector<Value>& L, const std::vector<Value>& R) {
    if (L.size() + R.size() > z.size()) throw std::length_error("z registers too long");
    z.fill(0);
    zl = static_cast<std::uint8_t>(L.size());
    zr = static_cast<std::uint8_t>(R.size());
    std::copy(L.begin(), L.end(), z.begin());
    std::copy(R.begin(), R.end(), z.begin() + zl);
}

std::string Label::str() const {
    std::ostringstream os;
    os << "a=" << int(a) << " b=" << int(b);
    if (a2_set) os << " a'=" << int(a2);
    for (const auto& r : reg) os << ' ' << r.str();
    os << " k=(" << int(k.k1) << ',' << int(k.k2) << ',' << int(k.k3) << ')';
    if (zl + zr) {
        os << " z=";
        for (int i = 0; i < zl + zr; ++i) os << (i ? "," : "") << int(z[i]);
    }
    return os.str();
}

std::size_t& support_limit() {
    thread_local std::size_t limit = 0;
    return limit;
}

void State::throw_support_exceeded(std::size_t lim) {
    throw BudgetExceeded("state support exceeded " + std::to_string(lim) +
                         " entries (memory budget)");
}

void State::prune(double eps) {
    absl::erase_if(amp_, [eps](const auto& kv) { return std::abs(kv.second) < eps; });
}

cplx State::at(const Label& l) const {
    auto it = amp_.find(l);
    return it == amp_.end() ? cplx{} : it->second;
}

double State::norm() const {
    double s = 0;
    for (const auto& e : sorted()) s += std::norm(e.second);
    return std::sqrt(s);
}

std::vector<std::pair<Label, cplx>> State::sorted() const {
    std::vector<std::pair<Label, cplx>> v(amp_.begin(), amp_.end());
    std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
        return std::memcmp(&x.first, &y.first, sizeof(Label)) < 0;
    });
    return v;
}

cplx inner_product(const State& s1, const State& s2) {
    cplx acc{};
    for (const auto& [l, c] : s1.sorted()) acc += std::conj(c) * s2.at(l);
    return acc;
}

double max_abs_difference(const State& s1, const State& s2) {
    double m = 0;
    for (const auto& [l, c] : s1.map()) m = std::max(m, std::abs(c - s2.at(l)));
    for (const auto& [l, c] : s2.map()) m = std::max(m, std::abs(c - s1.at(l)));
    return m;
}

DensityMatrix reduced_density(const State& s, int N, int dB) {
    const int d = N * dB;
    DensityMatrix rho = DensityMatrix::Zero(d, d);
    // Group amplitudes by the traced-out part of the label.
    absl::flat_hash_map<Label, std::vector<std::pair<int, cplx>>> groups;
    for (const auto& [l, c] : s.sorted()) {
        Label rest = l;
        rest.a = 0;
        rest.b = 0;
        groups[rest].emplace_back(int(l.a) * dB + int(l.b), c);
    }
    std::vector<std::pair<Label, std::vector<std::pair<int, cplx>>>> ordered(groups.begin(),
                                                                           groups.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) {
        return std::memcmp(&x.first, &y.first, sizeof(Label)) < 0;
    });
    for (const auto& [rest, v] : ordered)
        for (const auto& [i, ci] : v)
            for (const auto& [j, cj] : v) rho(i, j) += ci * std::conj(cj);
    return rho;
}

double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2) {
    if (r1.rows() != r2.rows() || r1.cols() != r2.cols())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    DensityMatrix diff = r1 - r2;
    diff = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityCheck check_density(const DensityMatrix& r) {
    DensityCheck c;
    c.hermitian_residual = (r - r.adjoint()).cwiseAbs().maxCoeff();
    c.trace = r.trace().real();
    DensityMatrix h = 0.5 * (r + r.adjoint());
    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(h, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

}  // namespace prusim
