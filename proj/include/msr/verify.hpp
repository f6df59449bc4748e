#ifndef MSR_VERIFY_HPP
#define MSR_VERIFY_HPP

#include <array>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "msr/codec.hpp"
#include "msr/cube.hpp"
#include "msr/params.hpp"
#include "msr/solver.hpp"

namespace msr {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail; // counterexample description on failure
};

struct VerificationReport {
    CodeParams params;
    std::vector<CheckResult> checks;
    double elapsed_sec = 0.0;
    bool sampled = false;   // true when a budget forced sampling
    std::uint64_t seed = 0; // recorded so sampled runs can be reproduced

    void add(std::string name, bool pass, std::string detail = "") {
        checks.push_back({std::move(name), pass, std::move(detail)});
    }

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    /// One check per line: status, name, detail.
    void render(std::ostream& os) const {
        os << "# (n=" << params.n << ", k=" << params.k << ", d=" << params.d << ") q=" << params.q
           << " t=" << params.t << " r=" << params.r << " alpha=" << params.alpha
           << " beta=" << params.beta << " m=" << params.m;
        if (sampled) os << " [sampled, seed=" << seed << "]";
        os << "\n";
        for (const auto& c : checks) {
            os << (c.pass ? "PASS" : "FAIL") << " " << c.name;
            if (!c.detail.empty()) os << " " << c.detail;
            os << "\n";
        }
        os << "# elapsed " << elapsed_sec << "s\n";
    }

    std::string render() const {
        std::ostringstream os;
        render(os);
        return os.str();
    }
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) result = result * static_cast<std::uint64_t>(n - k + i) / i;
    return result;
}

// Visit size-k subsets of [0, n) in lexicographic order; if the total count
// exceeds budget, visit `budget` uniformly sampled subsets instead (returns
// true in that case).
template <typename Visit>
bool for_each_subset(int n, int k, std::uint64_t budget, std::uint64_t seed, Visit&& visit) {
    const std::uint64_t total = binomial(n, k);
    if (total <= budget) {
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        for (;;) {
            visit(idx);
            int i = k - 1;
            while (i >= 0 && idx[i] == n - k + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
        return false;
    }
    std::mt19937_64 rng(seed);
    std::vector<int> pool(n);
    for (std::uint64_t s = 0; s < budget; ++s) {
        for (int i = 0; i < n; ++i) pool[i] = i;
        std::vector<int> idx;
        for (int i = 0; i < k; ++i) {
            std::uniform_int_distribution<int> pick(i, n - 1);
            std::swap(pool[i], pool[pick(rng)]);
            idx.push_back(pool[i]);
        }
        std::sort(idx.begin(), idx.end());
        visit(idx);
    }
    return true;
}

inline std::vector<gf_elem> random_message(const CodeParams& p, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint32_t> dist(0, (1u << p.m) - 1);
    std::vector<gf_elem> msg(static_cast<std::size_t>(p.k) * p.alpha);
    for (auto& v : msg) v = static_cast<gf_elem>(dist(rng));
    return msg;
}

inline std::string describe_ids(const std::vector<int>& ids) {
    std::string s = "{";
    for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
    return s + "}";
}

} // namespace detail

/// Columns of the parity-check matrix for the given nodes (all alpha planes
/// each); rows are every (j, a). Used for rank certificates.
inline GfMatrix h_columns(const CodeParams& p, const ThetaTable& tt, const std::vector<int>& nodes) {
    const std::size_t nrows = static_cast<std::size_t>(p.r) * p.alpha;
    GfMatrix m(nrows, nodes.size() * p.alpha);
    for (int j = 0; j < p.r; ++j)
        for (plane_t a = 0; a < p.alpha; ++a) {
            const std::size_t row = static_cast<std::size_t>(j) * p.alpha + a;
            for (std::size_t c = 0; c < nodes.size(); ++c) {
                const int x = nodes[c] % p.q, y = nodes[c] / p.q;
                for (plane_t z = 0; z < p.alpha; ++z)
                    m.at(row, c * p.alpha + z) = h_entry(tt, j, a, x, y, z);
            }
        }
    return m;
}

/// Every r-subset of real nodes must (a) index a full-column-rank submatrix
/// of H and (b) decode an encoded random word back exactly.
inline VerificationReport verify_mds(const CodeParams& p, const ThetaTable& tt,
                                     std::uint64_t budget = 100000, std::uint64_t seed = 0x6d737263) {
    detail::Stopwatch clock;
    VerificationReport report;
    report.params = p;
    report.seed = seed;

    std::mt19937_64 rng(seed);
    const Codeword original = encode(p, tt, detail::random_message(p, rng));

    std::uint64_t patterns = 0, rank_bad = 0, decode_bad = 0;
    std::string rank_example, decode_example;
    report.sampled = detail::for_each_subset(p.n, p.r, budget, seed, [&](const std::vector<int>& e) {
        ++patterns;
        const std::uint64_t want = static_cast<std::uint64_t>(e.size()) * p.alpha;
        bool rank_ok = false, decode_ok = false;
        try {
            rank_ok = rank(tt.field(), h_columns(p, tt, e)) == want;
            decode_ok = decode(p, tt, ErasureState::from_codeword(p, original, e)) == original;
        } catch (const error& ex) {
            if (decode_example.empty())
                decode_example = detail::describe_ids(e) + " threw: " + ex.what();
        }
        if (!rank_ok && rank_example.empty()) rank_example = detail::describe_ids(e);
        if (!decode_ok && decode_example.empty()) decode_example = detail::describe_ids(e);
        rank_bad += !rank_ok;
        decode_bad += !decode_ok;
    });

    report.add("mds_submatrix_rank", rank_bad == 0,
               rank_bad == 0 ? std::to_string(patterns) + " patterns at full rank"
                             : "first failing erasure set " + rank_example);
    report.add("mds_decode_exact", decode_bad == 0,
               decode_bad == 0 ? std::to_string(patterns) + " patterns decode exactly"
                               : "first failing erasure set " + decode_example);
    report.elapsed_sec = clock.seconds();
    return report;
}

/// Every (failed node, d-helper set) combination must rebuild the node
/// byte-exactly while each helper ships exactly its beta stored symbols on
/// the repair planes, verbatim.
inline VerificationReport verify_repair(const CodeParams& p, const ThetaTable& tt,
                                        std::uint64_t budget = 100000,
                                        std::uint64_t seed = 0x6d737272) {
    detail::Stopwatch clock;
    VerificationReport report;
    report.params = p;
    report.seed = seed;

    std::mt19937_64 rng(seed);
    const Codeword original = encode(p, tt, detail::random_message(p, rng));

    std::uint64_t combos = 0, rebuild_bad = 0, access_bad = 0;
    std::string rebuild_example, access_example;
    const std::uint64_t per_node_budget = budget / static_cast<std::uint64_t>(p.n) + 1;
    for (int failed = 0; failed < p.n; ++failed) {
        std::vector<int> others;
        for (int id = 0; id < p.n; ++id)
            if (id != failed) others.push_back(id);
        const std::vector<plane_t> r_planes = repair_planes(p, failed);
        const bool sampled = detail::for_each_subset(
            static_cast<int>(others.size()), p.d, per_node_budget, seed + failed,
            [&](const std::vector<int>& pick) {
                ++combos;
                std::vector<int> helpers;
                for (int i : pick) helpers.push_back(others[i]);
                const std::string combo_desc =
                    "failed " + std::to_string(failed) + " helpers " + detail::describe_ids(helpers);
                try {
                    const RepairResult res = repair(p, tt, original, failed, helpers);
                    bool rebuilt = true;
                    for (plane_t z = 0; z < p.alpha; ++z)
                        rebuilt = rebuilt && res.symbols[z] == original.at(failed, z);
                    if (!rebuilt) {
                        ++rebuild_bad;
                        if (rebuild_example.empty()) rebuild_example = combo_desc;
                    }
                    bool access_ok = res.trace.payload.size() == helpers.size();
                    for (std::size_t h = 0; access_ok && h < res.trace.payload.size(); ++h) {
                        const auto& sent = res.trace.payload[h];
                        access_ok = sent.size() == p.beta;
                        for (std::size_t i = 0; access_ok && i < sent.size(); ++i)
                            access_ok = sent[i].first == r_planes[i] &&
                                        sent[i].second ==
                                            original.at(res.trace.helpers[h], sent[i].first);
                    }
                    if (!access_ok) {
                        ++access_bad;
                        if (access_example.empty()) access_example = combo_desc;
                    }
                } catch (const error& ex) {
                    ++rebuild_bad;
                    if (rebuild_example.empty()) rebuild_example = combo_desc + " threw: " + ex.what();
                }
            });
        report.sampled = report.sampled || sampled;
    }

    report.add("repair_rebuild_exact", rebuild_bad == 0,
               rebuild_bad == 0 ? std::to_string(combos) + " combinations rebuild exactly"
                                : "first failure: " + rebuild_example);
    report.add("repair_optimal_access", access_bad == 0,
               access_bad == 0
                   ? "every helper sent exactly beta=" + std::to_string(p.beta) + " stored symbols"
                   : "first failure: " + access_example);
    if (p.k >= 2) {
        const bool bw = static_cast<std::uint64_t>(p.d) * p.beta <
                        static_cast<std::uint64_t>(p.k) * p.alpha;
        report.add("repair_bandwidth_below_full_read", bw,
                   "d*beta = " + std::to_string(p.d * p.beta) + " vs k*alpha = " +
                       std::to_string(p.k * p.alpha));
    }
    report.elapsed_sec = clock.seconds();
    return report;
}

/// M_{1,d} base-case matrix assembled from the displayed block forms:
/// V_i = [v(gamma*theta_i) v(theta_i)] with v(th) = (1, th, ..., th^{d-1})^T,
/// and Gamma = diag(gamma, 1) applied on the right where marked.
inline GfMatrix base_case_matrix(const Field& f, gf_elem gamma, const std::array<gf_elem, 3>& th,
                                 int e, int d) {
    if (e < 1 || e > 3) throw param_error("base case needs e in {1,2,3}");
    enum Cell { Z, V1, V2, V3, V1G, V2G, V3G };
    static const std::vector<std::vector<Cell>> layouts[3] = {
        {{V1}, {V1G}},
        {{V1, V2, Z}, {V1G, Z, V3}, {Z, V2G, V3G}},
        {{V1, V2, V3, Z, Z, Z},
         {V1G, Z, Z, Z, V2, V3},
         {Z, V2G, Z, V1, Z, V3G},
         {Z, Z, V3G, V1G, V2G, Z}},
    };
    const auto& layout = layouts[e - 1];
    GfMatrix m(layout.size() * static_cast<std::size_t>(d), layout[0].size() * 2);
    for (std::size_t br = 0; br < layout.size(); ++br)
        for (std::size_t bc = 0; bc < layout[br].size(); ++bc) {
            const Cell cell = layout[br][bc];
            if (cell == Z) continue;
            const int i = (cell == V1 || cell == V1G) ? 0 : (cell == V2 || cell == V2G) ? 1 : 2;
            const bool gammized = cell >= V1G;
            for (int row = 0; row < d; ++row) {
                gf_elem left = f.pow(f.mul(gamma, th[i]), row);
                gf_elem right = f.pow(th[i], row);
                if (gammized) left = f.mul(gamma, left);
                m.at(br * d + row, bc * 2) = left;
                m.at(br * d + row, bc * 2 + 1) = right;
            }
        }
    return m;
}

/// The matching closed-form determinant of M_{1,e}.
inline gf_elem base_case_determinant_closed_form(const Field& f, gf_elem gamma,
                                                 const std::array<gf_elem, 3>& th, int e) {
    const gf_elem one_minus_gamma = f.add(1, gamma);
    if (e == 1) return one_minus_gamma;
    if (e == 2) {
        gf_elem v = f.mul(gamma, f.pow(one_minus_gamma, 4));
        v = f.mul(v, th[0]);
        v = f.mul(v, f.add(th[1], th[0]));
        return f.mul(v, f.add(th[1], th[2]));
    }
    gf_elem v = f.mul(f.pow(gamma, 4), f.pow(one_minus_gamma, 6));
    v = f.mul(v, f.pow(f.add(th[0], th[1]), 2));
    v = f.mul(v, f.pow(f.add(th[0], th[2]), 2));
    v = f.mul(v, f.pow(f.add(th[1], th[2]), 4));
    v = f.mul(v, f.add(th[0], f.mul(gamma, th[2])));
    v = f.mul(v, f.add(f.mul(gamma, th[0]), th[2]));
    v = f.mul(v, f.add(th[0], f.mul(gamma, th[1])));
    v = f.mul(v, f.add(f.mul(gamma, th[0]), th[1]));
    return v;
}

/// Elimination determinant of the base-case matrix must equal the closed form
/// exactly, on the table's own thetas (every section) and on random draws.
inline VerificationReport verify_base_determinants(const CodeParams& p, const ThetaTable& tt,
                                                   int trials, std::uint64_t seed = 0x6d737264) {
    detail::Stopwatch clock;
    VerificationReport report;
    report.params = p;
    report.seed = seed;

    const Field& f = tt.field();
    const int e = p.q - 1;
    const gf_elem gamma = tt.gamma();

    auto matches = [&](const std::array<gf_elem, 3>& th) {
        return determinant(f, base_case_matrix(f, gamma, th, e, e)) ==
               base_case_determinant_closed_form(f, gamma, th, e);
    };

    bool actual_ok = true;
    std::string actual_example;
    for (int y = 0; y < p.t && actual_ok; ++y) {
        std::array<gf_elem, 3> th = {tt.theta_base(1, y),
                                     p.w >= 2 ? tt.theta_base(2, y) : gf_elem{0},
                                     p.w >= 3 ? tt.theta_base(3, y) : gf_elem{0}};
        actual_ok = matches(th);
        if (!actual_ok) actual_example = "section y=" + std::to_string(y);
        if (actual_ok && determinant(f, base_case_matrix(f, gamma, th, e, e)) == 0) {
            actual_ok = false;
            actual_example = "determinant vanished on the real table at y=" + std::to_string(y);
        }
    }
    report.add("base_determinant_actual_table", actual_ok, actual_example);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint32_t> nonzero(1, f.order());
    bool draws_ok = true;
    std::string draw_example;
    for (int i = 0; i < trials && draws_ok; ++i) {
        std::array<gf_elem, 3> th = {static_cast<gf_elem>(nonzero(rng)),
                                     static_cast<gf_elem>(nonzero(rng)),
                                     static_cast<gf_elem>(nonzero(rng))};
        draws_ok = matches(th);
        if (!draws_ok)
            draw_example = "theta draw {" + std::to_string(th[0]) + "," + std::to_string(th[1]) +
                           "," + std::to_string(th[2]) + "}";
    }
    report.add("base_determinant_random_draws", draws_ok,
               draws_ok ? std::to_string(trials) + " draws match exactly" : draw_example);
    report.elapsed_sec = clock.seconds();
    return report;
}

/// The four theta-table invariants, one check each.
inline VerificationReport verify_thetas(const CodeParams& p, const ThetaTable& tt) {
    detail::Stopwatch clock;
    VerificationReport report;
    report.params = p;
    auto run = [&](const char* name, std::optional<std::string> failure) {
        report.add(name, !failure, failure.value_or(""));
    };
    run("theta_diagonal_rule", tt.check_diagonal());
    run("theta_gamma_reciprocity", tt.check_reciprocity());
    run("theta_per_node_distinct", tt.check_per_node_distinct());
    run("theta_global_distinct", tt.check_global_distinct());
    report.elapsed_sec = clock.seconds();
    return report;
}

} // namespace msr

#endif
