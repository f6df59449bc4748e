#ifndef MSR_PARAMS_HPP
#define MSR_PARAMS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msr/errors.hpp"
#include "msr/gf2m.hpp"

namespace msr {

/// Derived parameters of a (possibly shortened) code instance.
///
/// The base code has n_base = q*t nodes and r parities; a user code with
/// n < q*t is obtained by fixing delta = q*t - n message nodes to zero.
struct CodeParams {
    int n = 0, k = 0, d = 0; // user-facing
    int q = 0;               // d - k + 1, in {2,3,4}
    int t = 0;               // ceil(n / q), sections
    int r = 0;               // n - k, parity count
    int n_base = 0;          // q * t
    int delta = 0;           // q*t - n virtual zero nodes
    std::uint64_t alpha = 0; // q^t symbols per node
    std::uint64_t beta = 0;  // q^(t-1) symbols per helper during repair
    int m = 0;               // field degree
    int w = 0;               // theta picks per section: 1 for q=2, 3 for q=3,4

    int real_nodes() const { return n; }
    bool is_virtual(int node_id) const { return node_id >= n; }
};

/// Smallest supported even field degree m satisfying both the size recipe
/// (Q >= 6t+2 for q=2, Q >= 18t+2 for q=3,4) and |G| = (Q-1)/3 > w*t.
inline int select_field(int q, int t) {
    if (q < 2 || q > 4) throw param_error("q must be 2, 3 or 4");
    if (t < 2) throw param_error("t must be at least 2");
    const int w = (q == 2) ? 1 : 3;
    const std::uint64_t need = (q == 2) ? 6ull * t + 2 : 18ull * t + 2;
    for (const auto& e : detail::kModulusTable) {
        const std::uint64_t Q = 1ull << e.m;
        if (Q >= need && (Q - 1) / 3 > static_cast<std::uint64_t>(w) * t)
            return e.m;
    }
    throw param_error("no supported field is large enough for q=" + std::to_string(q) +
                      ", t=" + std::to_string(t));
}

namespace detail {
// Sub-packetization cap: keeps cube storage at desk scale (n_base * alpha symbols).
inline constexpr std::uint64_t kMaxAlpha = 1ull << 24;
}

inline CodeParams derive_params(int n, int k, int d) {
    if (k < 1) throw param_error("k must be positive");
    if (n <= k) throw param_error("n must exceed k");
    if (d > n - 1) throw param_error("d must be at most n-1");
    if (d < k + 1 || d > k + 3)
        throw param_error("unsupported d: this construction covers d in [k+1, k+3]");

    CodeParams p;
    p.n = n;
    p.k = k;
    p.d = d;
    p.q = d - k + 1;
    p.t = (n + p.q - 1) / p.q;
    p.r = n - k;
    p.n_base = p.q * p.t;
    p.delta = p.n_base - n;
    p.w = (p.q == 2) ? 1 : 3;
    if (p.t < 2) throw param_error("parameters give t < 2; n must be at least 2q");
    if (p.r < p.q) throw internal_error("r < q cannot happen for d <= n-1");

    p.alpha = 1;
    for (int i = 0; i < p.t; ++i) {
        p.alpha *= static_cast<std::uint64_t>(p.q);
        if (p.alpha > detail::kMaxAlpha)
            throw param_error("sub-packetization q^t exceeds the supported scale");
    }
    p.beta = p.alpha / p.q;
    p.m = select_field(p.q, p.t);
    return p;
}

/// All code coefficients: gamma plus the per-section matrices Theta_y, with
/// theta_{x,y;z_y} = Theta_y(z_y, x).
///
/// Construction draws theta_{i,y} (i in [1,w]) from the subgroup G and
/// theta_{0,y} from the coset gamma^2*G, which makes the required
/// distinctness properties hold by disjointness; they are re-checked
/// explicitly. Owns its Field; immutable after construction.
class ThetaTable {
public:
    ThetaTable(const CodeParams& p, const Field& f)
        : q_(p.q), t_(p.t), w_(p.w), field_(f), gamma_(f.lambda()) {
        const CosetTriple cs = cosets(f);
        if (cs.g.size() <= static_cast<std::size_t>(w_ * t_))
            throw param_error("field too small: |G| must exceed w*t");

        base_.assign(static_cast<std::size_t>(t_) * 4, 0);
        const gf_elem g2 = f.mul(gamma_, gamma_);
        for (int y = 0; y < t_; ++y) {
            base_at(0, y) = f.mul(g2, cs.g[y]);
            for (int i = 1; i <= w_; ++i)
                base_at(i, y) = cs.g[static_cast<std::size_t>(w_) * y + i - 1];
        }

        entries_.assign(static_cast<std::size_t>(t_) * q_ * q_, 0);
        for (int y = 0; y < t_; ++y)
            fill_section(y);

        if (auto bad = check_invariants())
            throw internal_error("theta table invariant violated: " + *bad);
    }

    int q() const { return q_; }
    int t() const { return t_; }
    int w() const { return w_; }
    const Field& field() const { return field_; }
    gf_elem gamma() const { return gamma_; }

    /// theta_{x,y;z} = Theta_y(z, x).
    gf_elem theta(int x, int y, int z) const {
        return entries_[(static_cast<std::size_t>(y) * q_ + z) * q_ + x];
    }

    /// theta_{i,y} for i in [0, w]; theta_{0,y} is the common diagonal value.
    gf_elem theta_base(int i, int y) const { return base_[static_cast<std::size_t>(y) * 4 + i]; }

    /// Coefficient gamma_{x,x'}: gamma below the diagonal order, 1 above, 0 on it.
    gf_elem gamma_coeff(int x, int xp) const {
        if (x < xp) return gamma_;
        if (x == xp) return 0;
        return 1;
    }

    /// Diagonal rule: Theta_y(x, x) = theta_{0,y} for every x.
    std::optional<std::string> check_diagonal() const {
        for (int y = 0; y < t_; ++y)
            for (int x = 0; x < q_; ++x)
                if (theta(x, y, x) != theta_base(0, y))
                    return "diagonal entry (" + std::to_string(x) + "," + std::to_string(y) +
                           ") differs from theta_0";
        return std::nullopt;
    }

    /// theta_{x,y;z} = gamma * theta_{z,y;x} whenever x > z.
    std::optional<std::string> check_reciprocity() const {
        for (int y = 0; y < t_; ++y)
            for (int x = 0; x < q_; ++x)
                for (int z = 0; z < x; ++z)
                    if (theta(x, y, z) != field_.mul(gamma_, theta(z, y, x)))
                        return "reciprocity fails at (x=" + std::to_string(x) +
                               ",y=" + std::to_string(y) + ",z=" + std::to_string(z) + ")";
        return std::nullopt;
    }

    /// {theta_{x,y;i}, theta_{i,y;x}, theta_{x,y;x} : i != x} is duplicate-free
    /// for every node (x, y).
    std::optional<std::string> check_per_node_distinct() const {
        for (int y = 0; y < t_; ++y)
            for (int x = 0; x < q_; ++x) {
                std::set<gf_elem> seen;
                std::size_t count = 0;
                auto put = [&](gf_elem v) { seen.insert(v); ++count; };
                for (int i = 0; i < q_; ++i)
                    if (i != x) {
                        put(theta(x, y, i));
                        put(theta(i, y, x));
                    }
                put(theta(x, y, x));
                if (seen.size() != count)
                    return "per-node collection at (x=" + std::to_string(x) +
                           ",y=" + std::to_string(y) + ") has duplicates";
            }
        return std::nullopt;
    }

    /// {theta_{i,y}, gamma*theta_{i,y}, theta_{0,y} : i in [w], y in Z_t} is
    /// duplicate-free across the whole code.
    std::optional<std::string> check_global_distinct() const {
        std::set<gf_elem> seen;
        std::size_t count = 0;
        auto put = [&](gf_elem v) { seen.insert(v); ++count; };
        for (int y = 0; y < t_; ++y) {
            put(theta_base(0, y));
            for (int i = 1; i <= w_; ++i) {
                put(theta_base(i, y));
                put(field_.mul(gamma_, theta_base(i, y)));
            }
        }
        if (seen.size() != count) return "global theta collection has duplicates";
        return std::nullopt;
    }

    /// First violated invariant, or nullopt. Run at construction and by the
    /// verifier (which also feeds it deliberately corrupted copies).
    std::optional<std::string> check_invariants() const {
        if (auto r = check_diagonal()) return r;
        if (auto r = check_reciprocity()) return r;
        if (auto r = check_per_node_distinct()) return r;
        return check_global_distinct();
    }

    /// Test hook: overwrite one Theta_y entry, bypassing validation.
    void corrupt_entry(int x, int y, int z, gf_elem v) {
        entries_[(static_cast<std::size_t>(y) * q_ + z) * q_ + x] = v;
    }
    /// Test hook: overwrite one base theta and rebuild that section.
    void corrupt_base(int i, int y, gf_elem v) {
        base_at(i, y) = v;
        fill_section(y);
    }

private:
    gf_elem& base_at(int i, int y) { return base_[static_cast<std::size_t>(y) * 4 + i]; }

    void fill_section(int y) {
        const Field& f = field_;
        const gf_elem t0 = theta_base(0, y);
        const gf_elem t1 = theta_base(1, y);
        const gf_elem t2 = (w_ >= 2) ? theta_base(2, y) : 0;
        const gf_elem t3 = (w_ >= 3) ? theta_base(3, y) : 0;
        const gf_elem g = gamma_;
        auto set = [&](int z, int x, gf_elem v) {
            entries_[(static_cast<std::size_t>(y) * q_ + z) * q_ + x] = v;
        };
        switch (q_) {
        case 2:
            set(0, 0, t0); set(0, 1, f.mul(g, t1));
            set(1, 0, t1); set(1, 1, t0);
            break;
        case 3:
            set(0, 0, t0); set(0, 1, f.mul(g, t1)); set(0, 2, f.mul(g, t2));
            set(1, 0, t1); set(1, 1, t0);           set(1, 2, f.mul(g, t3));
            set(2, 0, t2); set(2, 1, t3);           set(2, 2, t0);
            break;
        case 4:
            set(0, 0, t0); set(0, 1, f.mul(g, t1)); set(0, 2, f.mul(g, t2)); set(0, 3, f.mul(g, t3));
            set(1, 0, t1); set(1, 1, t0);           set(1, 2, f.mul(g, t3)); set(1, 3, f.mul(g, t2));
            set(2, 0, t2); set(2, 1, t3);           set(2, 2, t0);           set(2, 3, f.mul(g, t1));
            set(3, 0, t3); set(3, 1, t2);           set(3, 2, t1);           set(3, 3, t0);
            break;
        default:
            throw internal_error("q out of range");
        }
    }

    int q_, t_, w_;
    Field field_;
    gf_elem gamma_;
    std::vector<gf_elem> base_;    // 4 slots per section, slots [w+1, 3] unused
    std::vector<gf_elem> entries_; // Theta_y(z, x) at ((y*q)+z)*q + x
};

inline ThetaTable assign_thetas(const CodeParams& p, const Field& f) {
    if (f.m() != p.m)
        throw param_error("field degree does not match the derived parameters");
    return ThetaTable(p, f);
}

inline gf_elem gamma_coeff(const ThetaTable& table, int x, int xp) {
    return table.gamma_coeff(x, xp);
}

} // namespace msr

#endif
