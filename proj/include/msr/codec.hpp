#ifndef MSR_CODEC_HPP
#define MSR_CODEC_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msr/cube.hpp"
#include "msr/errors.hpp"
#include "msr/params.hpp"
#include "msr/solver.hpp"

namespace msr {

/// Which symbols of a cube are available, and their values.
/// Virtual nodes of a shortened code are always present and zero.
struct ErasureState {
    Codeword symbols;
    std::vector<std::uint8_t> known; // node-major, n_base * alpha flags
    std::vector<int> erased;         // sorted ids of erased real nodes

    static ErasureState from_codeword(const CodeParams& p, const Codeword& cw,
                                      const std::vector<int>& erased_ids) {
        ErasureState st{cw,
                        std::vector<std::uint8_t>(static_cast<std::size_t>(p.n_base) * p.alpha, 1),
                        validated_ids(p, erased_ids)};
        for (int id : st.erased)
            for (plane_t z = 0; z < p.alpha; ++z) {
                st.known[static_cast<std::size_t>(id) * p.alpha + z] = 0;
                st.symbols.set(id, z, 0);
            }
        return st;
    }

    /// Sorted, deduplicated-checked copy of an erased-node list.
    static std::vector<int> validated_ids(const CodeParams& p, std::vector<int> ids) {
        std::sort(ids.begin(), ids.end());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i] < 0 || ids[i] >= p.n)
                throw param_error("erased node id " + std::to_string(ids[i]) +
                                  " is not a real node");
            if (i > 0 && ids[i] == ids[i - 1]) throw param_error("duplicate erased node id");
        }
        return ids;
    }
};

/// Exact record of a repair session: who helped, who stayed aloof, and every
/// symbol each helper transmitted (verbatim stored values, beta per helper).
struct RepairTrace {
    int failed = -1;
    std::vector<int> helpers; // ascending
    std::vector<int> aloof;   // ascending, real nodes only
    std::vector<std::vector<std::pair<plane_t, gf_elem>>> payload; // aligned with helpers
};

struct RepairResult {
    std::vector<gf_elem> symbols; // the failed node's alpha symbols
    RepairTrace trace;
};

namespace detail {

// Working state of one sequential solve: symbol values plus known flags,
// with the plane-group machinery and per-shape inverse cache.
class SequentialSolver {
public:
    SequentialSolver(const CodeParams& p, const ThetaTable& tt)
        : p_(p), tt_(tt), f_(tt.field()),
          vals_(static_cast<std::size_t>(p.n_base) * p.alpha, 0),
          known_(static_cast<std::size_t>(p.n_base) * p.alpha, 0) {}

    gf_elem value(int node, plane_t z) const { return vals_[index(node, z)]; }
    bool is_known(int node, plane_t z) const { return known_[index(node, z)] != 0; }
    void set_known(int node, plane_t z, gf_elem v) {
        vals_[index(node, z)] = v;
        known_[index(node, z)] = 1;
    }

    // Solve the joint system of all parity rows (j, a), a in group, j in [0, r),
    // for the given unknown columns. The system must come out square; every
    // symbol referenced outside the columns must already be known.
    void solve_group(const PlaneGroup& group,
                     const std::vector<std::pair<int, plane_t>>& columns) {
        const std::size_t ncols = columns.size();
        const std::size_t nrows = group.planes.size() * static_cast<std::size_t>(p_.r);
        if (ncols != nrows)
            throw internal_error("plane-group system is not square: " + std::to_string(nrows) +
                                 " equations, " + std::to_string(ncols) + " unknowns");

        std::unordered_map<std::uint64_t, std::size_t> col_of;
        col_of.reserve(ncols * 2);
        for (std::size_t c = 0; c < ncols; ++c)
            col_of.emplace(index(columns[c].first, columns[c].second), c);

        GfMatrix a(nrows, ncols);
        std::vector<gf_elem> rhs(nrows, 0);
        for (std::size_t pi = 0; pi < group.planes.size(); ++pi) {
            const plane_t plane = group.planes[pi];
            for (int j = 0; j < p_.r; ++j) {
                const std::size_t row = pi * p_.r + j;
                for_each_parity_term(tt_, j, plane, [&](int node, plane_t z, gf_elem coeff) {
                    const auto it = col_of.find(index(node, z));
                    if (it != col_of.end()) {
                        a.at(row, it->second) ^= coeff;
                    } else if (known_[index(node, z)]) {
                        rhs[row] ^= f_.mul(coeff, vals_[index(node, z)]);
                    } else {
                        throw internal_error(
                            "parity row references an unsolved symbol outside the group "
                            "(node " + std::to_string(node) + ", plane " + std::to_string(z) + ")");
                    }
                });
            }
        }

        const GfMatrix& inv = cached_inverse(group, a);
        const std::vector<gf_elem> x = mat_vec(f_, inv, rhs);
        for (std::size_t c = 0; c < ncols; ++c)
            set_known(columns[c].first, columns[c].second, x[c]);
    }

    // Run the sequential pass over `planes`, in increasing intersection score
    // with E, forming a plane group per still-unsolved plane. `make_columns`
    // lists the unknown columns of one group.
    template <typename MakeColumns>
    void run(const NodeSet& erased, const std::vector<plane_t>& planes,
             MakeColumns&& make_columns) {
        std::map<int, std::vector<plane_t>> by_score;
        for (plane_t z : planes) by_score[intersection_score(erased, z)].push_back(z);

        std::unordered_map<plane_t, bool> done;
        done.reserve(planes.size() * 2);
        for (auto& [score, level] : by_score) {
            for (plane_t z : level) {
                if (done[z]) continue;
                PlaneGroup group = plane_group(erased, z);
                if (group.score != score)
                    throw internal_error("plane group straddles intersection-score levels");
                solve_group(group, make_columns(group));
                for (plane_t zz : group.planes) done[zz] = true;
            }
        }
    }

private:
    std::size_t index(int node, plane_t z) const {
        return static_cast<std::size_t>(node) * p_.alpha + z;
    }

    // Group matrices depend only on which sections vary (the erased digits
    // there are fixed by E) and on the frozen digit of each non-varying
    // section, so identical shapes share one inverse. A frozen digit that
    // hits an erased node never collides with one that does not, because the
    // digit value itself differs.
    const GfMatrix& cached_inverse(const PlaneGroup& group, const GfMatrix& a) {
        std::vector<int> key;
        key.reserve(p_.t);
        for (int y = 0; y < p_.t; ++y) {
            if (group.sections[y].size() > 1)
                key.push_back(-1);
            else
                key.push_back(group.sections[y][0]);
        }
        auto [it, inserted] = inverse_cache_.try_emplace(std::move(key));
        if (inserted) it->second = invert(f_, a);
        return it->second;
    }

    const CodeParams& p_;
    const ThetaTable& tt_;
    const Field& f_;
    std::vector<gf_elem> vals_;
    std::vector<std::uint8_t> known_;
    std::map<std::vector<int>, GfMatrix> inverse_cache_;
};

} // namespace detail

/// Recover the full cube from any state with at most r erased real nodes.
///
/// Planes are processed in increasing intersection score; within a level,
/// plane groups go in ascending order of their minimal plane ordinal. Each
/// group yields one square system per Corollary-style invertibility; a
/// singular system means the construction itself is broken.
inline Codeword decode(const CodeParams& p, const ThetaTable& tt, const ErasureState& state) {
    if (static_cast<int>(state.erased.size()) > p.r)
        throw unrecoverable_error("cannot recover " + std::to_string(state.erased.size()) +
                                  " erasures; the code tolerates at most " + std::to_string(p.r));
    if (state.erased.empty()) return state.symbols;

    // Pad to exactly r erasures with the lowest-id healthy real nodes so
    // every group system is square; their symbols are simply re-derived.
    const std::vector<int> base = ErasureState::validated_ids(p, state.erased);
    std::vector<int> erased_ids = base;
    for (int id = 0; id < p.n && static_cast<int>(erased_ids.size()) < p.r; ++id)
        if (!std::binary_search(base.begin(), base.end(), id)) erased_ids.push_back(id);
    std::sort(erased_ids.begin(), erased_ids.end());

    NodeSet erased(p);
    for (int id : erased_ids) erased.insert(id);

    detail::SequentialSolver solver(p, tt);
    for (int node = 0; node < p.n_base; ++node)
        for (plane_t z = 0; z < p.alpha; ++z)
            if (!erased.contains_id(node) &&
                (p.is_virtual(node) || state.known[static_cast<std::size_t>(node) * p.alpha + z]))
                solver.set_known(node, z, p.is_virtual(node) ? 0 : state.symbols.at(node, z));

    std::vector<plane_t> all_planes(p.alpha);
    for (plane_t z = 0; z < p.alpha; ++z) all_planes[z] = z;

    solver.run(erased, all_planes, [&](const PlaneGroup& group) {
        std::vector<std::pair<int, plane_t>> columns;
        columns.reserve(group.planes.size() * erased.ids().size());
        for (plane_t z : group.planes)
            for (int node : erased.ids()) columns.emplace_back(node, z);
        return columns;
    });

    Codeword out(p);
    for (int node = 0; node < p.n_base; ++node)
        for (plane_t z = 0; z < p.alpha; ++z) {
            if (!solver.is_known(node, z))
                throw internal_error("decode finished with unsolved symbols");
            out.set(node, z, solver.value(node, z));
        }
    return out;
}

/// Systematic encode: message symbols fill the k lowest-id real nodes, the r
/// parity nodes are derived by erasure-decoding them, virtual nodes stay zero.
inline Codeword encode(const CodeParams& p, const ThetaTable& tt,
                       std::span<const gf_elem> message) {
    if (message.size() != static_cast<std::size_t>(p.k) * p.alpha)
        throw param_error("message must hold exactly k*alpha symbols");

    Codeword cw(p);
    for (int node = 0; node < p.k; ++node)
        for (plane_t z = 0; z < p.alpha; ++z)
            cw.set(node, z, message[static_cast<std::size_t>(node) * p.alpha + z]);

    std::vector<int> parity_ids;
    for (int id = p.k; id < p.n; ++id) parity_ids.push_back(id);
    return decode(p, tt, ErasureState::from_codeword(p, cw, parity_ids));
}

/// Reference decoder: one global system over all erased columns, rows taken
/// straight from the parity-check matrix definition. No sequential structure;
/// exists as an independent oracle for the plane-by-plane decoder.
inline Codeword decode_naive(const CodeParams& p, const ThetaTable& tt,
                             const ErasureState& state) {
    if (static_cast<int>(state.erased.size()) > p.r)
        throw unrecoverable_error("cannot recover " + std::to_string(state.erased.size()) +
                                  " erasures; the code tolerates at most " + std::to_string(p.r));
    if (state.erased.empty()) return state.symbols;

    const Field& f = tt.field();
    const std::vector<int> erased = ErasureState::validated_ids(p, state.erased);
    const std::size_t ncols = erased.size() * p.alpha;
    const std::size_t nrows = static_cast<std::size_t>(p.r) * p.alpha;

    GfMatrix a(nrows, ncols);
    std::vector<gf_elem> rhs(nrows, 0);
    for (int j = 0; j < p.r; ++j)
        for (plane_t ap = 0; ap < p.alpha; ++ap) {
            const std::size_t row = static_cast<std::size_t>(j) * p.alpha + ap;
            for (int node = 0; node < p.n_base; ++node) {
                const int x = node % p.q, y = node / p.q;
                const auto er = std::lower_bound(erased.begin(), erased.end(), node);
                const bool node_erased = er != erased.end() && *er == node;
                const std::size_t block =
                    node_erased ? static_cast<std::size_t>(er - erased.begin()) : 0;
                for (plane_t z = 0; z < p.alpha; ++z) {
                    const gf_elem h = h_entry(tt, j, ap, x, y, z);
                    if (h == 0) continue;
                    if (node_erased)
                        a.at(row, block * p.alpha + z) ^= h;
                    else if (p.is_virtual(node))
                        ; // contributes zero
                    else
                        rhs[row] ^= f.mul(h, state.symbols.at(node, z));
                }
            }
        }

    const std::vector<gf_elem> x = solve_full_rank(f, a, rhs);
    Codeword out = state.symbols;
    for (std::size_t e = 0; e < erased.size(); ++e)
        for (plane_t z = 0; z < p.alpha; ++z) out.set(erased[e], z, x[e * p.alpha + z]);
    return out;
}

namespace detail {

// Shared core of the two repair entry points. payload[h][i] is the stored
// symbol of helpers[h] in the i-th plane of R (ascending ordinal); the solver
// sees nothing else from the helpers.
inline RepairResult repair_from_payload(const CodeParams& p, const ThetaTable& tt, int failed_id,
                                        std::vector<int> helpers, const std::vector<plane_t>& r_planes,
                                        const std::vector<std::vector<gf_elem>>& payload) {
    const NodeId failed = NodeId::from_id(p, failed_id);

    NodeSet aloof_set(p);
    std::vector<int> aloof;
    for (int id = 0; id < p.n; ++id)
        if (id != failed_id && !std::binary_search(helpers.begin(), helpers.end(), id)) {
            aloof.push_back(id);
            aloof_set.insert(id);
        }
    if (static_cast<int>(aloof.size()) != p.r - p.q)
        throw internal_error("aloof node count must be r - q");

    SequentialSolver solver(p, tt);
    RepairTrace trace;
    trace.failed = failed_id;
    trace.helpers = helpers;
    trace.aloof = aloof;
    trace.payload.resize(helpers.size());
    for (std::size_t h = 0; h < helpers.size(); ++h) {
        trace.payload[h].reserve(r_planes.size());
        for (std::size_t i = 0; i < r_planes.size(); ++i) {
            solver.set_known(helpers[h], r_planes[i], payload[h][i]);
            trace.payload[h].emplace_back(r_planes[i], payload[h][i]);
        }
    }
    for (int node = p.n; node < p.n_base; ++node)
        for (plane_t z = 0; z < p.alpha; ++z) solver.set_known(node, z, 0);

    solver.run(aloof_set, r_planes, [&](const PlaneGroup& group) {
        std::vector<std::pair<int, plane_t>> columns;
        columns.reserve(group.planes.size() * (aloof.size() + p.q));
        for (plane_t z : group.planes) {
            for (int node : aloof) columns.emplace_back(node, z);
            for (int x = 0; x < p.q; ++x)
                columns.emplace_back(failed_id, plane_sub(p.q, z, failed.y, x));
        }
        return columns;
    });

    RepairResult result;
    result.symbols.resize(p.alpha);
    for (plane_t z = 0; z < p.alpha; ++z) {
        if (!solver.is_known(failed_id, z))
            throw internal_error("repair finished with unsolved symbols");
        result.symbols[z] = solver.value(failed_id, z);
    }
    result.trace = std::move(trace);
    return result;
}

} // namespace detail

/// Planes helpers must serve for repairing `failed`: those whose digit in the
/// failed node's section equals its x coordinate. |R| = beta.
inline std::vector<plane_t> repair_planes(const CodeParams& p, int failed_id) {
    const NodeId failed = NodeId::from_id(p, failed_id);
    std::vector<plane_t> r_planes;
    r_planes.reserve(p.beta);
    for (plane_t z = 0; z < p.alpha; ++z)
        if (plane_digit(p.q, z, failed.y) == failed.x) r_planes.push_back(z);
    return r_planes;
}

inline void validate_repair_args(const CodeParams& p, int failed_id, std::vector<int>& helpers) {
    if (failed_id < 0 || failed_id >= p.n)
        throw param_error("failed node id must name a real node");
    std::sort(helpers.begin(), helpers.end());
    if (static_cast<int>(helpers.size()) != p.d)
        throw param_error("repair needs exactly d = " + std::to_string(p.d) + " helpers, got " +
                          std::to_string(helpers.size()));
    for (std::size_t i = 0; i < helpers.size(); ++i) {
        if (helpers[i] < 0 || helpers[i] >= p.n)
            throw param_error("helper " + std::to_string(helpers[i]) + " is not a real node");
        if (helpers[i] == failed_id) throw param_error("the failed node cannot help");
        if (i > 0 && helpers[i] == helpers[i - 1]) throw param_error("duplicate helper id");
    }
}

/// Repair one failed node from d helpers. Helpers contribute exactly their
/// beta stored symbols on the planes of R, read verbatim; aloof survivors
/// contribute nothing. Returns the failed node's alpha symbols plus the
/// transcript of every transmitted symbol.
inline RepairResult repair(const CodeParams& p, const ThetaTable& tt, const Codeword& survivors,
                           int failed_id, std::vector<int> helpers) {
    validate_repair_args(p, failed_id, helpers);
    const std::vector<plane_t> r_planes = repair_planes(p, failed_id);
    std::vector<std::vector<gf_elem>> payload(helpers.size());
    for (std::size_t h = 0; h < helpers.size(); ++h) {
        payload[h].reserve(r_planes.size());
        for (plane_t z : r_planes) payload[h].push_back(survivors.at(helpers[h], z));
    }
    return detail::repair_from_payload(p, tt, failed_id, std::move(helpers), r_planes, payload);
}

} // namespace msr

#endif
