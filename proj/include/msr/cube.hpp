#ifndef MSR_CUBE_HPP
#define MSR_CUBE_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "msr/errors.hpp"
#include "msr/params.hpp"

namespace msr {

/// Ordinal of a plane z in Z_q^t: sum of z_y * q^y (section 0 least significant).
using plane_t = std::uint32_t;

/// A node (x, y) of the base code; id = q*y + x.
struct NodeId {
    int x = 0;
    int y = 0;
    int id = 0;

    static NodeId from_id(const CodeParams& p, int id) {
        return {id % p.q, id / p.q, id};
    }
    static NodeId from_xy(const CodeParams& p, int x, int y) {
        return {x, y, p.q * y + x};
    }
    friend bool operator==(const NodeId& a, const NodeId& b) { return a.id == b.id; }
};

inline int plane_digit(int q, plane_t z, int y) {
    for (int i = 0; i < y; ++i) z /= static_cast<plane_t>(q);
    return static_cast<int>(z % static_cast<plane_t>(q));
}

/// z with digit y replaced by x.
inline plane_t plane_sub(int q, plane_t z, int y, int x) {
    plane_t w = 1;
    for (int i = 0; i < y; ++i) w *= static_cast<plane_t>(q);
    const int cur = plane_digit(q, z, y);
    return z + w * static_cast<plane_t>(x - cur);
}

/// Subset of the base-code nodes with per-section views.
class NodeSet {
public:
    NodeSet(int q, int t)
        : q_(q), t_(t), member_(static_cast<std::size_t>(q) * t, 0), sections_(t) {}

    explicit NodeSet(const CodeParams& p) : NodeSet(p.q, p.t) {}

    void insert(int node_id) {
        if (member_[node_id]) return;
        member_[node_id] = 1;
        ids_.push_back(node_id);
        std::sort(ids_.begin(), ids_.end());
        auto& xs = sections_[node_id / q_];
        xs.push_back(node_id % q_);
        std::sort(xs.begin(), xs.end());
    }

    bool contains_id(int node_id) const { return member_[node_id] != 0; }
    bool contains(int x, int y) const { return member_[static_cast<std::size_t>(q_) * y + x] != 0; }
    /// Sorted x coordinates of members in section y.
    const std::vector<int>& section(int y) const { return sections_[y]; }
    const std::vector<int>& ids() const { return ids_; }
    int size() const { return static_cast<int>(ids_.size()); }
    int q() const { return q_; }
    int t() const { return t_; }

private:
    int q_, t_;
    std::vector<std::uint8_t> member_;
    std::vector<std::vector<int>> sections_;
    std::vector<int> ids_;
};

/// Number of sections y whose digit z_y picks a node of E.
inline int intersection_score(const NodeSet& e, plane_t z) {
    int score = 0;
    for (int y = 0; y < e.t(); ++y)
        if (e.contains(plane_digit(e.q(), z, y), y)) ++score;
    return score;
}

/// The set of planes whose parity equations must be solved jointly with z:
/// per section, all erased digits when z_y hits an erased node, else just z_y.
struct PlaneGroup {
    std::vector<std::vector<int>> sections; // candidate digits per y
    std::vector<plane_t> planes;            // cartesian product, ascending ordinal
    int score = 0;
};

inline PlaneGroup plane_group(const NodeSet& e, plane_t z) {
    const int q = e.q(), t = e.t();
    PlaneGroup g;
    g.score = intersection_score(e, z);
    g.sections.resize(t);
    std::size_t total = 1;
    for (int y = 0; y < t; ++y) {
        const int zy = plane_digit(q, z, y);
        if (e.contains(zy, y))
            g.sections[y] = e.section(y);
        else
            g.sections[y] = {zy};
        total *= g.sections[y].size();
    }
    // enumerate the product with section 0 fastest; that is ascending ordinal order
    g.planes.reserve(total);
    std::vector<std::size_t> idx(t, 0);
    for (;;) {
        plane_t ord = 0;
        plane_t w = 1;
        for (int y = 0; y < t; ++y) {
            ord += w * static_cast<plane_t>(g.sections[y][idx[y]]);
            w *= static_cast<plane_t>(q);
        }
        g.planes.push_back(ord);
        int y = 0;
        while (y < t && ++idx[y] == g.sections[y].size()) {
            idx[y] = 0;
            ++y;
        }
        if (y == t) break;
    }
    return g;
}

/// The (q*t) x q^t symbol cube A(x, y; z), stored node-major.
class Codeword {
public:
    explicit Codeword(const CodeParams& p)
        : n_base_(p.n_base), alpha_(p.alpha),
          data_(static_cast<std::size_t>(p.n_base) * p.alpha, 0) {}

    int n_base() const { return n_base_; }
    std::uint64_t alpha() const { return alpha_; }

    gf_elem at(int node_id, plane_t z) const {
        return data_[static_cast<std::size_t>(node_id) * alpha_ + z];
    }
    void set(int node_id, plane_t z, gf_elem v) {
        data_[static_cast<std::size_t>(node_id) * alpha_ + z] = v;
    }
    std::span<const gf_elem> node_symbols(int node_id) const {
        return {data_.data() + static_cast<std::size_t>(node_id) * alpha_,
                static_cast<std::size_t>(alpha_)};
    }
    void set_node_symbols(int node_id, std::span<const gf_elem> symbols) {
        std::copy(symbols.begin(), symbols.end(),
                  data_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(node_id) * alpha_));
    }

    friend bool operator==(const Codeword& a, const Codeword& b) {
        return a.n_base_ == b.n_base_ && a.alpha_ == b.alpha_ && a.data_ == b.data_;
    }

private:
    int n_base_;
    std::uint64_t alpha_;
    std::vector<gf_elem> data_;
};

/// Parity-check matrix entry H((j, a), (x, y; z)):
///   theta_{x,y;z_y}^j                      if a = z,
///   gamma_{z_y,x} * theta_{x,y;z_y}^j      if a = z(y, x) and z_y != x,
///   0                                      otherwise.
inline gf_elem h_entry(const ThetaTable& tt, int j, plane_t a, int x, int y, plane_t z) {
    const int zy = plane_digit(tt.q(), z, y);
    if (a == z)
        return tt.field().pow(tt.theta(x, y, zy), j);
    if (zy != x && a == plane_sub(tt.q(), z, y, x))
        return tt.field().mul(tt.gamma_coeff(zy, x), tt.field().pow(tt.theta(x, y, zy), j));
    return 0;
}

/// Visit every nonzero term of parity row (j, a): visit(node_id, plane, coeff).
/// Per plane a the row touches each node in-plane once and, for each section,
/// the q-1 out-of-plane companions of the node the digit a_y selects.
template <typename Visitor>
inline void for_each_parity_term(const ThetaTable& tt, int j, plane_t a, Visitor&& visit) {
    const Field& f = tt.field();
    const int q = tt.q(), t = tt.t();
    for (int y = 0; y < t; ++y) {
        const int ay = plane_digit(q, a, y);
        for (int x = 0; x < q; ++x) {
            visit(q * y + x, a, f.pow(tt.theta(x, y, ay), j));
            if (x != ay) {
                const gf_elem c = f.mul(tt.gamma_coeff(x, ay), f.pow(tt.theta(ay, y, x), j));
                visit(q * y + ay, plane_sub(q, a, y, x), c);
            }
        }
    }
}

/// True iff the cube satisfies every parity equation for j in [0, r).
inline bool check_parity(const ThetaTable& tt, int r, const Codeword& c) {
    const Field& f = tt.field();
    const auto alpha = c.alpha();
    for (int j = 0; j < r; ++j)
        for (plane_t z = 0; z < alpha; ++z) {
            gf_elem acc = 0;
            for_each_parity_term(tt, j, z, [&](int node, plane_t zz, gf_elem coeff) {
                acc ^= f.mul(coeff, c.at(node, zz));
            });
            if (acc != 0) return false;
        }
    return true;
}

} // namespace msr

#endif
