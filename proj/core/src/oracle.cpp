#include "spillover/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "spillover/errors.hpp"
#include "spillover/linalg.hpp"
#include "spillover/rng.hpp"

namespace spillover {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw SpilloverError(ErrorCode::InvalidConfig, msg); }

bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }

void add_outer(Mat3& m, const Vec3& u, const Vec3& v, double w) {
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m[r][c] += w * u[r] * v[c];
}

void add_scaled(Vec3& v, const Vec3& u, double w) {
    for (int r = 0; r < 3; ++r) v[r] += w * u[r];
}

Triple solve_or_singular(const Mat3& a, const Vec3& b, const char* what) {
    Vec3 x{};
    if (!solve3(symmetrize(a), b, x, 1e-12))
        throw SpilloverError(ErrorCode::SingularDesign, std::string(what) + " population design is singular");
    return x;
}

// Population moments for a regression of Y on (1, D, X) where X is predicted
// from instruments Z = (1, D, Z1) by a first-stage projection with the same weights.
struct MomentSet {
    Mat3 xx{};  // E[w X X'], X = (1, D, M)
    Vec3 xy{};  // E[w X Y]
    Mat3 zz{};  // E[w Z Z'], Z = (1, D, Z1)
    Vec3 zm{};  // E[w Z M]
    Vec3 zy{};  // E[w Z Y]

    void add(double p, double d, double m, double z1, double y) {
        const Vec3 x{1.0, d, m};
        const Vec3 z{1.0, d, z1};
        add_outer(xx, x, x, p);
        add_scaled(xy, x, p * y);
        add_outer(zz, z, z, p);
        add_scaled(zm, z, p * m);
        add_scaled(zy, z, p * y);
    }

    Triple least_squares(const char* what) const { return solve_or_singular(xx, xy, what); }

    // argmin E[(Y - b0 - bd D - bs L(M | 1, D, Z1))^2]
    Triple two_stage(const char* what) const {
        const Triple gamma = solve_or_singular(zz, zm, what);
        const Mat3 g{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {gamma[0], gamma[1], gamma[2]}}};
        const Mat3 hh = multiply(multiply(g, zz), transpose(g));
        Vec3 hy{};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) hy[r] += g[r][c] * zy[c];
        return solve_or_singular(hh, hy, what);
    }
};

double var_from(const Mat3& xx) {
    const double w = xx[0][0];
    return w > 0.0 ? xx[2][2] / w - (xx[0][2] / w) * (xx[0][2] / w) : 0.0;
}

}  // namespace

void EstimandReport::add(std::string name, double enumerated, double closed_form) {
    const double gap = std::abs(enumerated - closed_form);
    comparisons.push_back({std::move(name), enumerated, closed_form, gap});
    max_abs_gap = std::max(max_abs_gap, gap);
}

// ---------------------------------------------------------------- pair

void PairPopulationSpec::validate() const {
    if (types.empty()) invalid("pair spec has no types");
    if (!is_prob(p1_own) || !is_prob(p1_partner)) invalid("treatment probabilities must lie in [0, 1]");
    double total = 0.0;
    for (const auto& t : types) {
        if (!is_prob(t.weight) || !is_prob(t.p_link)) invalid("type weight and p_link must lie in [0, 1]");
        total += t.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) invalid("type weights must sum to 1");
}

EstimandSet pair_enumerate(const PairPopulationSpec& spec) {
    spec.validate();
    MomentSet all, linked;
    const double pI[2] = {1.0 - spec.p1_own, spec.p1_own};
    const double pJ[2] = {1.0 - spec.p1_partner, spec.p1_partner};
    for (const auto& t : spec.types) {
        const double pA[2] = {1.0 - t.p_link, t.p_link};
        for (int a = 0; a < 2; ++a)
            for (int d = 0; d < 2; ++d)
                for (int dj = 0; dj < 2; ++dj) {
                    const double p = t.weight * pA[a] * pI[d] * pJ[dj];
                    if (p == 0.0) continue;
                    const int s = spillover_pair(a, dj);
                    const double y = t.y[d][s];
                    all.add(p, d, s, dj, y);
                    if (a == 1) linked.add(p, d, dj, dj, y);
                }
    }
    if (var_from(all.xx) <= 1e-14) throw SpilloverError(ErrorCode::SingularDesign, "Var(S) = 0");
    if (linked.xx[0][0] <= 0.0 || var_from(linked.zz) <= 1e-14)
        throw SpilloverError(ErrorCode::SingularDesign, "Var(D_j | A = 1) is degenerate");
    EstimandSet out;
    out.ols = all.least_squares("OLS");
    out.tsls = all.two_stage("2SLS");
    out.wls = linked.least_squares("WLS");
    return out;
}

std::vector<EstimandReport> pair_closed_forms(const PairPopulationSpec& spec) {
    const EstimandSet e = pair_enumerate(spec);
    const double p1I = spec.p1_own, p0I = 1.0 - p1I;
    const double p1J = spec.p1_partner, p0J = 1.0 - p1J;

    double p1A = 0.0;
    for (const auto& t : spec.types) p1A += t.weight * t.p_link;
    const double p0A = 1.0 - p1A;

    // Conditional means given A from the type mixture.
    auto cond = [&](int a, auto f) {
        double num = 0.0, den = 0.0;
        for (const auto& t : spec.types) {
            const double w = t.weight * (a == 1 ? t.p_link : 1.0 - t.p_link);
            num += w * f(t);
            den += w;
        }
        return den > 0.0 ? num / den : 0.0;
    };
    auto delta = [](const PairUnitType& t, int s) { return t.y[1][s] - t.y[0][s]; };
    auto tau = [](const PairUnitType& t, int d) { return t.y[d][1] - t.y[d][0]; };
    auto delta_bar = [&](const PairUnitType& t) { return delta(t, 1) * p1J + delta(t, 0) * p0J; };
    auto tau_bar = [&](const PairUnitType& t) { return tau(t, 1) * p1I + tau(t, 0) * p0I; };

    const double e_delta_bar_1 = cond(1, delta_bar);
    const double e_delta0_0 = cond(0, [&](const PairUnitType& t) { return delta(t, 0); });
    const double e_tau_bar_1 = cond(1, tau_bar);
    double eta[2];
    for (int d = 0; d < 2; ++d) {
        auto base = [d](const PairUnitType& t) { return t.y[d][0]; };
        eta[d] = p0A > 0.0 ? cond(1, base) - cond(0, base) : 0.0;
    }
    const double eta_bar = eta[1] * p1I + eta[0] * p0I;
    const double selection = p0A > 0.0 ? eta_bar * p0A / (1.0 - p1A * p1J) : 0.0;

    // Ratio of instrument-residual moments, with L(D_j | D) = p1J under independence.
    double num = 0.0, den = 0.0;
    for (const auto& t : spec.types)
        for (int a = 0; a < 2; ++a)
            for (int d = 0; d < 2; ++d)
                for (int dj = 0; dj < 2; ++dj) {
                    const double p = t.weight * (a ? t.p_link : 1.0 - t.p_link) * (d ? p1I : p0I) *
                                     (dj ? p1J : p0J);
                    const int s = spillover_pair(a, dj);
                    num += p * (dj - p1J) * t.y[d][s];
                    den += p * (dj - p1J) * s;
                }

    std::vector<EstimandReport> reports(3);
    auto& ols = reports[0];
    ols.label = "ols";
    ols.method = Method::OLS;
    ols.beta_triple = e.ols;
    ols.add("beta_d = direct-effect average", e.ols[1], e_delta_bar_1 * p1A + e_delta0_0 * p0A);
    ols.add("beta_s = complier spillover + selection", e.ols[2], e_tau_bar_1 + selection);
    ols.decomposition = {{"causal", e_tau_bar_1}, {"selection", selection}, {"eta_bar", eta_bar}, {"p1A", p1A}};

    auto& tsls = reports[1];
    tsls.label = "tsls";
    tsls.method = Method::TSLS;
    tsls.beta_triple = e.tsls;
    tsls.add("beta_s = complier spillover average", e.tsls[2], e_tau_bar_1);
    tsls.add("beta_s = instrument-residual ratio", e.tsls[2], num / den);
    tsls.add("beta_d = OLS beta_d", e.tsls[1], e.ols[1]);
    tsls.decomposition = {{"late", e_tau_bar_1}};

    auto& wls = reports[2];
    wls.label = "wls";
    wls.method = Method::WLS;
    wls.beta_triple = e.wls;
    wls.add("beta_d = complier direct-effect average", e.wls[1], e_delta_bar_1);
    wls.add("beta_s = complier spillover average", e.wls[2], e_tau_bar_1);
    wls.decomposition = {{"late", e_tau_bar_1}};
    return reports;
}

// ---------------------------------------------------------------- network

void NetworkPopulationSpec::validate() const {
    if (units.empty()) invalid("network spec has no units");
    if (!is_prob(p1_own) || !is_prob(p1_partner)) invalid("treatment probabilities must lie in [0, 1]");
    for (const auto& u : units) {
        if (u.n_peers < 1 || u.n_peers > 3) invalid("n_i must lie in 1..3");
        if (u.atoms.empty()) invalid("unit without atoms");
        double total = 0.0;
        for (const auto& a : u.atoms) {
            if (!is_prob(a.weight)) invalid("atom weight must lie in [0, 1]");
            if (static_cast<int>(a.links.size()) != u.n_peers) invalid("link vector length differs from n_i");
            if (static_cast<int>(a.y.size()) != 2 * (u.n_peers + 1)) invalid("outcome table has wrong size");
            for (Binary l : a.links)
                if (l > 1) invalid("links must be binary");
            total += a.weight;
        }
        if (std::abs(total - 1.0) > 1e-12) invalid("atom weights must sum to 1");
    }
}

namespace {

int degree_of(const std::vector<Binary>& links) {
    int s = 0;
    for (Binary l : links) s += l;
    return s;
}

// Probability of each peer-treatment vector (bit j = peer j).
std::vector<double> peer_vector_probs(int n_peers, double p1) {
    std::vector<double> p(std::size_t{1} << n_peers, 1.0);
    for (std::size_t v = 0; v < p.size(); ++v)
        for (int j = 0; j < n_peers; ++j) p[v] *= ((v >> j) & 1u) ? p1 : 1.0 - p1;
    return p;
}

int exposure_count(const std::vector<Binary>& links, std::size_t v) {
    int r = 0;
    for (std::size_t j = 0; j < links.size(); ++j) r += links[j] * static_cast<int>((v >> j) & 1u);
    return r;
}

}  // namespace

EstimandSet network_enumerate(const NetworkPopulationSpec& spec, ExposureMap map) {
    spec.validate();
    const double n = static_cast<double>(spec.units.size());
    MomentSet all, linked;
    for (const auto& u : spec.units) {
        const auto pv = peer_vector_probs(u.n_peers, spec.p1_partner);
        for (const auto& atom : u.atoms) {
            const int deg = degree_of(atom.links);
            for (int d = 0; d < 2; ++d) {
                const double pd = d ? spec.p1_own : 1.0 - spec.p1_own;
                for (std::size_t v = 0; v < pv.size(); ++v) {
                    const double p = atom.weight * pd * pv[v] / n;
                    if (p == 0.0) continue;
                    const int r = exposure_count(atom.links, v);
                    const double m = exposure(r, u.n_peers, deg, map);
                    const double z1 = static_cast<double>(v & 1u);
                    const double y = u.outcome(atom, d, r);
                    all.add(p, d, m, z1, y);
                    if (atom.links[0]) linked.add(p, d, m, z1, y);
                }
            }
        }
    }
    if (var_from(all.xx) <= 1e-14) throw SpilloverError(ErrorCode::SingularDesign, "Var(M) = 0");
    if (linked.xx[0][0] <= 0.0) throw SpilloverError(ErrorCode::SingularDesign, "no unit links its first peer");
    EstimandSet out;
    out.ols = all.least_squares("OLS");
    out.tsls = all.two_stage("2SLS");
    out.wls = linked.two_stage("WLS");
    return out;
}

namespace {

struct LinkGroup {
    std::vector<Binary> links;
    double prob = 0.0;                     // Pr(A = a)
    std::vector<const NetworkAtom*> atoms;
};

std::vector<LinkGroup> group_by_links(const NetworkUnitSpec& u) {
    std::map<std::vector<Binary>, LinkGroup> groups;
    for (const auto& atom : u.atoms) {
        auto& g = groups[atom.links];
        g.links = atom.links;
        g.prob += atom.weight;
        g.atoms.push_back(&atom);
    }
    std::vector<LinkGroup> out;
    for (auto& [k, g] : groups)
        if (g.prob > 0.0) out.push_back(std::move(g));
    return out;
}

// E[f(atom) | A = a]
template <class F>
double cond_mean(const LinkGroup& g, F f) {
    double s = 0.0;
    for (const NetworkAtom* a : g.atoms) s += a->weight * f(*a);
    return s / g.prob;
}

// Pr(R = r | A = a) for r = 0..n_i, and the same for R(1) built from peers 2..n_i.
std::vector<double> exposure_law(const std::vector<Binary>& links, double p1) {
    std::vector<double> law(links.size() + 1, 0.0);
    const auto pv = peer_vector_probs(static_cast<int>(links.size()), p1);
    for (std::size_t v = 0; v < pv.size(); ++v) law[exposure_count(links, v)] += pv[v];
    return law;
}

std::vector<double> rest_law(const std::vector<Binary>& links, double p1) {
    std::vector<Binary> rest(links.begin() + 1, links.end());
    if (rest.empty()) return {1.0};
    return exposure_law(rest, p1);
}

struct ComplierSum {
    double value = 0.0;  // (1/n) sum_i sum_r omega_i(r) E[tau1_bar(r) | event]
    std::vector<WeightEntry> weights;
    double weight_sum = 0.0;
    double weight_min = 0.0;
    double compliance = 0.0;  // (1/n) sum_i E[M^1 - M^0]
};

ComplierSum complier_weighted_effects(const NetworkPopulationSpec& spec, ExposureMap map) {
    const double n = static_cast<double>(spec.units.size());
    const double p1I = spec.p1_own, p0I = 1.0 - p1I;
    ComplierSum out;

    for (const auto& u : spec.units)
        for (const auto& g : group_by_links(u)) {
            const auto rest = rest_law(g.links, spec.p1_partner);
            const int deg = degree_of(g.links);
            for (std::size_t k = 0; k < rest.size(); ++k) {
                const int r1 = g.links[0] + static_cast<int>(k);
                const int r0 = static_cast<int>(k);
                out.compliance += g.prob * rest[k] *
                                  (exposure(r1, u.n_peers, deg, map) - exposure(r0, u.n_peers, deg, map)) / n;
            }
        }
    if (!(out.compliance > 0.0))
        throw SpilloverError(ErrorCode::SingularDesign, "no compliance: E[M^1 - M^0] = 0");

    bool first = true;
    for (std::size_t i = 0; i < spec.units.size(); ++i) {
        const auto& u = spec.units[i];
        const auto groups = group_by_links(u);
        for (int r = 1; r <= u.n_peers; ++r) {
            // {R(1) >= r > R(0)} = {A_1 = 1, R(1) = r}
            double p_event = 0.0, effect_mass = 0.0;
            for (const auto& g : groups) {
                if (!g.links[0]) continue;
                const auto rest = rest_law(g.links, spec.p1_partner);
                const double pr = (r - 1) < static_cast<int>(rest.size()) ? rest[r - 1] : 0.0;
                p_event += g.prob * pr;
                effect_mass += g.prob * pr * cond_mean(g, [&](const NetworkAtom& a) {
                                   return p1I * (u.outcome(a, 1, r) - u.outcome(a, 1, r - 1)) +
                                          p0I * (u.outcome(a, 0, r) - u.outcome(a, 0, r - 1));
                               });
            }
            const double omega = p_event / out.compliance;
            const double late = p_event > 0.0 ? effect_mass / p_event : 0.0;
            out.value += omega * late / n;
            out.weight_sum += omega / n;
            out.weight_min = first ? omega : std::min(out.weight_min, omega);
            first = false;
            out.weights.push_back({i, r, {}, omega});
        }
    }
    return out;
}

}  // namespace

std::vector<EstimandReport> network_closed_forms(const NetworkPopulationSpec& spec, ExposureMap map) {
    const EstimandSet e = network_enumerate(spec, map);
    const double n = static_cast<double>(spec.units.size());
    const double p1I = spec.p1_own, p0I = 1.0 - p1I;

    struct Cell {
        std::size_t unit;
        int r;
        const LinkGroup* group;
        const NetworkUnitSpec* spec;
        double prob;  // Pr(R = r, A = a)
        double m;
    };
    std::vector<std::vector<LinkGroup>> groups;
    groups.reserve(spec.units.size());
    for (const auto& u : spec.units) groups.push_back(group_by_links(u));

    std::vector<Cell> cells;
    for (std::size_t i = 0; i < spec.units.size(); ++i) {
        const auto& u = spec.units[i];
        for (const auto& g : groups[i]) {
            const auto law = exposure_law(g.links, spec.p1_partner);
            const int deg = degree_of(g.links);
            for (int r = 0; r <= u.n_peers; ++r)
                cells.push_back({i, r, &g, &u, g.prob * law[r], exposure(r, u.n_peers, deg, map)});
        }
    }

    auto delta = [](const NetworkUnitSpec& u, int r) {
        return [&u, r](const NetworkAtom& a) { return u.outcome(a, 1, r) - u.outcome(a, 0, r); };
    };

    double direct = 0.0, direct_linked = 0.0, mu = 0.0;
    for (const auto& c : cells) {
        const double dr = cond_mean(*c.group, delta(*c.spec, c.r)) * c.prob / n;
        direct += dr;
        if (c.group->links[0]) direct_linked += dr;
        mu += c.m * c.prob / n;
    }
    double p_linked = 0.0;
    for (const auto& g_unit : groups)
        for (const auto& g : g_unit)
            if (g.links[0]) p_linked += g.prob / n;

    double spread = 0.0;
    for (const auto& c : cells) spread += (c.m - mu) * (c.m - mu) * c.prob / n;

    double causal = 0.0, selection = 0.0, pi_sum = 0.0, pi_min = 0.0;
    std::vector<WeightEntry> pis;
    for (const auto& c : cells) {
        const double pi = (c.m - mu) * c.prob / spread;
        const auto& u = *c.spec;
        const int r = c.r;
        const double tau0 = cond_mean(*c.group, [&](const NetworkAtom& a) {
            return p1I * (u.outcome(a, 1, r) - u.outcome(a, 1, 0)) + p0I * (u.outcome(a, 0, r) - u.outcome(a, 0, 0));
        });
        const double base = cond_mean(*c.group, [&](const NetworkAtom& a) {
            return u.outcome(a, 1, 0) * p1I + u.outcome(a, 0, 0) * p0I;
        });
        causal += pi * tau0 / n;
        selection += pi * base / n;
        pi_sum += pi / n;
        pi_min = pis.empty() ? pi : std::min(pi_min, pi);
        pis.push_back({c.unit, r, c.group->links, pi});
    }

    const ComplierSum cw = complier_weighted_effects(spec, map);

    std::vector<EstimandReport> reports(3);
    auto& ols = reports[0];
    ols.label = "ols";
    ols.method = Method::OLS;
    ols.beta_triple = e.ols;
    ols.add("beta_d = direct-effect average", e.ols[1], direct);
    ols.add("beta_s = pi-weighted effects + selection", e.ols[2], causal + selection);
    ols.decomposition = {{"causal", causal}, {"selection", selection}, {"pi_sum", pi_sum},
                         {"pi_min", pi_min}, {"mu", mu}};
    ols.weights = std::move(pis);

    auto& tsls = reports[1];
    tsls.label = "tsls";
    tsls.method = Method::TSLS;
    tsls.beta_triple = e.tsls;
    tsls.add("beta_s = omega-weighted complier effects", e.tsls[2], cw.value);
    tsls.add("beta_d = OLS beta_d", e.tsls[1], e.ols[1]);
    tsls.add("beta_d = direct-effect average", e.tsls[1], direct);
    tsls.decomposition = {{"weighted_late", cw.value}, {"omega_sum", cw.weight_sum},
                          {"omega_min", cw.weight_min}, {"compliance", cw.compliance}};
    tsls.weights = cw.weights;

    auto& wls = reports[2];
    wls.label = "wls";
    wls.method = Method::WLS;
    wls.beta_triple = e.wls;
    wls.add("beta_d = linked direct-effect average", e.wls[1], direct_linked / p_linked);
    wls.add("beta_s = omega-weighted complier effects", e.wls[2], cw.value);
    wls.decomposition = {{"weighted_late", cw.value}, {"omega_sum", cw.weight_sum},
                         {"omega_min", cw.weight_min}, {"compliance", cw.compliance}};
    wls.weights = cw.weights;
    return reports;
}

// ---------------------------------------------------------------- fixtures

PairPopulationSpec random_pair_spec(std::uint64_t seed, std::uint64_t index) {
    Stream s(seed, index, Tag::SpecDraw);
    PairPopulationSpec spec;
    const int k = s.integer(1, 4);
    double total = 0.0;
    for (int t = 0; t < k; ++t) {
        PairUnitType ty;
        ty.weight = s.uniform(0.1, 1.0);
        total += ty.weight;
        for (auto& row : ty.y)
            for (double& v : row) v = s.uniform(-5.0, 5.0);
        ty.p_link = s.uniform(0.1, 0.9);
        spec.types.push_back(ty);
    }
    for (auto& ty : spec.types) ty.weight /= total;
    spec.p1_own = s.uniform(0.1, 0.9);
    spec.p1_partner = s.uniform(0.1, 0.9);
    return spec;
}

NetworkPopulationSpec random_network_spec(std::uint64_t seed, std::uint64_t index, int max_units, int max_peers) {
    Stream s(seed, index, Tag::SpecDraw);
    NetworkPopulationSpec spec;
    const int units = s.integer(2, std::max(2, max_units));
    for (int i = 0; i < units; ++i) {
        NetworkUnitSpec u;
        u.n_peers = s.integer(1, std::clamp(max_peers, 1, 3));
        const int atoms = s.integer(1, 4);
        double total = 0.0;
        for (int a = 0; a < atoms; ++a) {
            NetworkAtom atom;
            atom.weight = s.uniform(0.1, 1.0);
            total += atom.weight;
            atom.y.resize(2 * (u.n_peers + 1));
            for (double& v : atom.y) v = s.uniform(-5.0, 5.0);
            atom.links.resize(u.n_peers);
            for (auto& l : atom.links) l = s.bernoulli(0.5) ? 1 : 0;
            u.atoms.push_back(std::move(atom));
        }
        for (auto& atom : u.atoms) atom.weight /= total;
        spec.units.push_back(std::move(u));
    }
    // Guarantees a complier so every estimand exists.
    spec.units[0].atoms[0].links[0] = 1;
    spec.p1_own = s.uniform(0.1, 0.9);
    spec.p1_partner = s.uniform(0.1, 0.9);
    return spec;
}

PairPopulationSpec discretized_pair_example() {
    std::vector<double> grid;
    for (int k = 0; k < 5; ++k) grid.push_back(-1.0 + (2.0 * k + 1.0) / 5.0);
    PairPopulationSpec spec;
    for (double ui : grid) {
        PairUnitType t;
        t.weight = 0.2;
        int linked = 0;
        for (double uj : grid) linked += (ui + uj > 0.0) ? 1 : 0;  // logistic(u) > 0.5 iff u > 0
        t.p_link = linked / 5.0;
        for (auto& row : t.y)
            for (double& v : row) v = 1.0 + ui;
        spec.types.push_back(t);
    }
    return spec;
}

NetworkPopulationSpec adversarial_network_spec() {
    NetworkPopulationSpec spec;
    for (int i = 0; i < 3; ++i) {
        NetworkUnitSpec u;
        u.n_peers = 2;
        NetworkAtom social{0.5, std::vector<double>(6, 4.0 + i), {1, 1}};
        NetworkAtom isolated{0.5, std::vector<double>(6, -2.0 + i), {0, 0}};
        u.atoms = {social, isolated};
        spec.units.push_back(u);
    }
    return spec;
}

NetworkDataset sample_from_network_spec(const NetworkPopulationSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    NetworkDataset ds;
    ds.y.resize(n);
    ds.d.resize(n);
    ds.n_peers.resize(n);
    ds.d_peers.emplace(n);
    ds.a_peers.emplace(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& u = spec.units[i % spec.units.size()];
        double pick = uniform01(seed, i, Tag::AtomChoice, 0);
        const NetworkAtom* atom = &u.atoms.back();
        for (const auto& a : u.atoms) {
            if (pick < a.weight) {
                atom = &a;
                break;
            }
            pick -= a.weight;
        }
        const int d = bernoulli(seed, i, Tag::OwnTreatment, 0, spec.p1_own) ? 1 : 0;
        std::vector<Binary> dp(u.n_peers);
        int r = 0;
        for (int j = 0; j < u.n_peers; ++j) {
            dp[j] = bernoulli(seed, i, Tag::PeerTreatment, j, spec.p1_partner) ? 1 : 0;
            r += dp[j] * atom->links[j];
        }
        ds.y[i] = u.outcome(*atom, d, r);
        ds.d[i] = static_cast<Binary>(d);
        ds.n_peers[i] = u.n_peers;
        (*ds.d_peers)[i] = std::move(dp);
        (*ds.a_peers)[i] = atom->links;
    }
    ds.validate();
    return ds;
}

// ---------------------------------------------------------------- JSON

std::string pair_spec_to_json(const PairPopulationSpec& spec) {
    nlohmann::json j;
    j["p1_own"] = spec.p1_own;
    j["p1_partner"] = spec.p1_partner;
    j["types"] = nlohmann::json::array();
    for (const auto& t : spec.types)
        j["types"].push_back({{"weight", t.weight},
                              {"p_link", t.p_link},
                              {"y", {{t.y[0][0], t.y[0][1]}, {t.y[1][0], t.y[1][1]}}}});
    return j.dump(2);
}

std::string network_spec_to_json(const NetworkPopulationSpec& spec) {
    nlohmann::json j;
    j["p1_own"] = spec.p1_own;
    j["p1_partner"] = spec.p1_partner;
    j["units"] = nlohmann::json::array();
    for (const auto& u : spec.units) {
        nlohmann::json ju{{"n_peers", u.n_peers}, {"atoms", nlohmann::json::array()}};
        for (const auto& a : u.atoms) {
            const auto half = static_cast<std::ptrdiff_t>(u.n_peers + 1);
            std::vector<double> y0(a.y.begin(), a.y.begin() + half), y1(a.y.begin() + half, a.y.end());
            std::vector<int> links(a.links.begin(), a.links.end());
            ju["atoms"].push_back({{"weight", a.weight}, {"y", {y0, y1}}, {"links", links}});
        }
        j["units"].push_back(ju);
    }
    return j.dump(2);
}

PairPopulationSpec pair_spec_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        PairPopulationSpec spec;
        spec.p1_own = j.value("p1_own", 0.5);
        spec.p1_partner = j.value("p1_partner", 0.5);
        for (const auto& jt : j.at("types")) {
            PairUnitType t;
            t.weight = jt.at("weight").get<double>();
            t.p_link = jt.at("p_link").get<double>();
            for (int d = 0; d < 2; ++d)
                for (int s = 0; s < 2; ++s) t.y[d][s] = jt.at("y").at(d).at(s).get<double>();
            spec.types.push_back(t);
        }
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& ex) {
        invalid(std::string("pair spec JSON: ") + ex.what());
    }
}

NetworkPopulationSpec network_spec_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        NetworkPopulationSpec spec;
        spec.p1_own = j.value("p1_own", 0.5);
        spec.p1_partner = j.value("p1_partner", 0.5);
        for (const auto& ju : j.at("units")) {
            NetworkUnitSpec u;
            u.n_peers = ju.at("n_peers").get<int>();
            for (const auto& ja : ju.at("atoms")) {
                NetworkAtom a;
                a.weight = ja.at("weight").get<double>();
                for (int d = 0; d < 2; ++d)
                    for (const auto& v : ja.at("y").at(d)) a.y.push_back(v.get<double>());
                for (const auto& l : ja.at("links")) a.links.push_back(static_cast<Binary>(l.get<int>()));
                u.atoms.push_back(std::move(a));
            }
            spec.units.push_back(std::move(u));
        }
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& ex) {
        invalid(std::string("network spec JSON: ") + ex.what());
    }
}

}  // namespace spillover
