#include "soq/structure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

namespace soq {

const char* type_kind_name(TypeKind k) {
    switch (k) {
        case TypeKind::Type1o: return "type1o";
        case TypeKind::Type1e: return "type1e";
        case TypeKind::Type2: return "type2";
        case TypeKind::Type3: return "type3";
    }
    return "?";
}

std::uint64_t subspace_count(unsigned q, unsigned n) {
    long double total = 0;
    for (unsigned d = 0; d <= n; ++d) {
        long double val = 1;
        for (unsigned i = 0; i < d; ++i) {
            long double num = std::pow(static_cast<long double>(q), static_cast<int>(n - i)) - 1;
            long double den = std::pow(static_cast<long double>(q), static_cast<int>(d - i)) - 1;
            val *= num / den;
        }
        total += val;
        if (total > 4e18L) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(total + 0.5L);
}

// ---------------------------------------------------------------------------
// Echelon-basis enumeration of subspaces

namespace {

template <class Fn>
bool enumerate_echelon_dim(const FiniteField& F, unsigned n, unsigned d, Fn&& fn) {
    if (d == 0 || d > n) return false;
    std::vector<unsigned> piv(d);
    for (unsigned i = 0; i < d; ++i) piv[i] = i;
    for (;;) {
        std::vector<bool> is_piv(n, false);
        for (unsigned p : piv) is_piv[p] = true;
        std::vector<std::pair<unsigned, unsigned>> free_pos;
        for (unsigned i = 0; i < d; ++i)
            for (unsigned j = piv[i] + 1; j < n; ++j)
                if (!is_piv[j]) free_pos.emplace_back(i, j);
        std::uint64_t combos = 1;
        for (size_t t = 0; t < free_pos.size(); ++t) combos *= F.q();
        for (std::uint64_t code = 0; code < combos; ++code) {
            Mat m(F, d, n);
            for (unsigned i = 0; i < d; ++i) m.set(i, piv[i], F.one());
            std::uint64_t c = code;
            for (auto& [i, j] : free_pos) {
                m.set(i, j, static_cast<Fe>(c % F.q()));
                c /= F.q();
            }
            if (fn(m)) return true;
        }
        // next pivot combination in lex order
        int t = static_cast<int>(d) - 1;
        while (t >= 0 && piv[t] == n - d + t) --t;
        if (t < 0) break;
        ++piv[t];
        for (unsigned i = t + 1; i < d; ++i) piv[i] = piv[i - 1] + 1;
    }
    return false;
}

} // namespace

void for_each_subspace(const FiniteField& f, unsigned n, unsigned d,
                       const std::function<bool(const Mat&)>& fn) {
    enumerate_echelon_dim(f, n, d, [&](const Mat& m) { return fn(m); });
}

// ---------------------------------------------------------------------------
// Cached subspace tables with membership bitmasks (small spaces only)

namespace {

struct SubEntry {
    std::vector<std::uint16_t> row_idx;  // vec_index of each basis row
    std::vector<std::uint64_t> mask;     // membership bits over q^n indices
    std::vector<Fe> rows;                // d x n echelon entries
};

struct SubCache {
    unsigned n = 0;
    std::uint64_t space = 0;  // q^n
    std::vector<std::vector<SubEntry>> by_dim;
};

std::string field_key(const FiniteField& F) {
    std::string k = std::to_string(F.p()) + ":" + std::to_string(F.k());
    for (unsigned c : F.modulus()) k += "," + std::to_string(c);
    return k;
}

// Cache applies when q^n <= 1024 and the subspace count is small.
const SubCache* get_sub_cache(const FiniteField& F, unsigned n) {
    std::uint64_t space = 1;
    for (unsigned i = 0; i < n; ++i) {
        space *= F.q();
        if (space > 1024) return nullptr;
    }
    if (subspace_count(F.q(), n) > 50000) return nullptr;
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<SubCache>> caches;
    std::lock_guard<std::mutex> lock(mu);
    std::string key = field_key(F) + "#" + std::to_string(n);
    auto it = caches.find(key);
    if (it != caches.end()) return it->second.get();
    auto cache = std::make_unique<SubCache>();
    cache->n = n;
    cache->space = space;
    cache->by_dim.resize(n);
    const unsigned words = static_cast<unsigned>((space + 63) / 64);
    for (unsigned d = 1; d < n; ++d) {
        enumerate_echelon_dim(F, n, d, [&](const Mat& m) {
            SubEntry e;
            e.rows.assign(m.data().begin(), m.data().end());
            for (unsigned i = 0; i < d; ++i)
                e.row_idx.push_back(static_cast<std::uint16_t>(vec_index(F, m.row(i))));
            e.mask.assign(words, 0);
            std::uint64_t combos = 1;
            for (unsigned i = 0; i < d; ++i) combos *= F.q();
            for (std::uint64_t code = 0; code < combos; ++code) {
                Vec coords = vec_from_index(F, d, code);
                Vec v(n, 0);
                for (unsigned i = 0; i < d; ++i)
                    if (coords[i])
                        for (unsigned j = 0; j < n; ++j)
                            v[j] = F.add(v[j], F.mul(coords[i], m.at(i, j)));
                std::uint64_t idx = vec_index(F, v);
                e.mask[idx >> 6] |= 1ULL << (idx & 63);
            }
            cache->by_dim[d].push_back(std::move(e));
            return false;
        });
    }
    const SubCache* out = cache.get();
    caches.emplace(std::move(key), std::move(cache));
    return out;
}

bool mask_test(const std::vector<std::uint64_t>& mask, std::uint64_t idx) {
    return (mask[idx >> 6] >> (idx & 63)) & 1;
}

} // namespace

std::optional<Subspace> minimal_nondefective_invariant(const QuadSpace& sp,
                                                       const Mat& m) {
    const FiniteField& F = sp.field();
    const unsigned n = sp.dim();
    const SubCache* cache = get_sub_cache(F, n);
    if (cache) {
        // image table over all vector indices
        std::vector<std::uint16_t> img(cache->space);
        for (std::uint64_t idx = 0; idx < cache->space; ++idx)
            img[idx] = static_cast<std::uint16_t>(
                vec_index(F, m.apply(vec_from_index(F, n, idx))));
        for (unsigned d = 1; d < n; ++d)
            for (const SubEntry& e : cache->by_dim[d]) {
                bool inv = true;
                for (std::uint16_t r : e.row_idx)
                    if (!mask_test(e.mask, img[r])) { inv = false; break; }
                if (!inv) continue;
                std::vector<Vec> rows(d);
                for (unsigned i = 0; i < d; ++i)
                    rows[i] = Vec(e.rows.begin() + i * n, e.rows.begin() + (i + 1) * n);
                Subspace s = Subspace::span(F, n, rows);
                if (sp.radical(s).dim() == 0) return s;
            }
        return std::nullopt;
    }
    for (unsigned d = 1; d < n; ++d) {
        std::optional<Subspace> hit;
        enumerate_echelon_dim(F, n, d, [&](const Mat& basis) {
            // invariance by reduction, then nondefectiveness
            Subspace s = Subspace::row_space(basis);
            if (!s.is_invariant(m)) return false;
            if (sp.radical(s).dim() != 0) return false;
            hit = s;
            return true;
        });
        if (hit) return hit;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Decomposition into orthogonally indecomposable summands

namespace {

constexpr std::uint64_t kExhaustiveCap = 4'000'000;

Poly unit_root_prime(const FiniteField& F, bool plus_one) {
    // x - 1, or x + 1 (they coincide in characteristic 2)
    return plus_one ? Poly::from_ints(F, {1, 1}) : Poly::from_ints(F, {-1, 1});
}

bool is_unit_root_prime(const Poly& f) {
    if (f.degree() != 1 || !f.is_monic()) return false;
    Fe c = f.coeff(0);
    const FiniteField& F = f.field();
    return c == F.one() || c == F.neg(F.one());
}

TypeLabel label_of_indecomposable(const Mat& map) {
    const FiniteField& F = map.field();
    TypeLabel lab;
    lab.eldivs = elementary_divisors(map);
    Poly mu = min_poly(map);
    // unipotent: minimal polynomial a power of x-1
    Poly xm1 = unit_root_prime(F, false);
    Poly t = mu;
    while ((t % xm1).is_zero()) t = (t / xm1).monic();
    lab.unipotent = t.degree() == 0;

    const auto& e = lab.eldivs;
    if (e.size() == 2 && e[0] == e[1] && is_unit_root_prime(e[0].first)) {
        lab.kind = (e[0].second % 2 == 1) ? TypeKind::Type1o : TypeKind::Type1e;
        return lab;
    }
    if (e.size() == 1) {
        lab.kind = TypeKind::Type2;
        return lab;
    }
    if (e.size() == 2 && mu.degree() == static_cast<int>(map.rows())) {
        const Poly &p = e[0].first, &q = e[1].first;
        if (p != q && q == p.reciprocal().monic()) {
            if (e[0].second != e[1].second)
                throw InternalError("reciprocal elementary divisors with unequal exponents");
            lab.kind = TypeKind::Type3;
            return lab;
        }
    }
    throw DomainError("transformation does not match the indecomposable trichotomy");
}

struct DecompCtx {
    const QuadSpace* ambient_space;
    const Mat* ambient_map;
};

Subspace lift_to_ambient(const Subspace& chunk, const Subspace& local) {
    std::vector<Vec> rows;
    for (unsigned i = 0; i < local.dim(); ++i)
        rows.push_back(chunk.basis().apply(local.basis().row(i)));
    return Subspace::span(chunk.field(), chunk.ambient(), rows);
}

Summand finalize_part(const DecompCtx& ctx, const Subspace& part) {
    auto restr = ctx.ambient_space->restrict_to(part);
    Mat map = restriction(*ctx.ambient_map, part);
    Summand s{part, restr.space, map, label_of_indecomposable(map), false};
    std::uint64_t cnt = subspace_count(s.form.field().q(), s.form.dim());
    if (cnt <= kExhaustiveCap) {
        if (minimal_nondefective_invariant(s.form, s.map))
            throw InternalError("decomposition emitted a decomposable part");
        s.certified = true;
    }
    return s;
}

void process_chunk(const DecompCtx& ctx, const Subspace& chunk,
                   std::vector<Summand>& out);

// Chunk with a single self-reciprocal prime: split off a maximal-order
// nondegenerate cyclic, or a maximal-order bicyclic pair for the unit-root
// primes.
void split_self_reciprocal(const DecompCtx& ctx, const Subspace& chunk,
                           const QuadSpace& form, const Mat& map, const Poly& f,
                           std::vector<Summand>& out) {
    const FiniteField& F = form.field();
    const unsigned d = form.dim();
    auto eld = elementary_divisors(map);
    unsigned emax = 0;
    for (auto& [g, e] : eld) emax = std::max(emax, e);
    Poly target = f.pow(emax);

    std::uint64_t count = 1;
    bool capped = false;
    for (unsigned i = 0; i < d; ++i) {
        count *= F.q();
        if (count > (1ULL << 20)) { capped = true; break; }
    }
    const std::uint64_t limit = capped ? (1ULL << 20) : count;

    const unsigned fdim = emax * static_cast<unsigned>(f.degree());
    const bool skip_single = F.p() == 2 && fdim % 2 == 1;
    if (!skip_single) {
        for (std::uint64_t idx = 1; idx < limit; ++idx) {
            Vec v = vec_from_index(F, d, idx);
            if (local_min_poly(map, v) != target) continue;
            Subspace z = cyclic_space(map, v);
            if (form.radical(z).dim() != 0) continue;
            Subspace part = lift_to_ambient(chunk, z);
            out.push_back(finalize_part(ctx, part));
            Subspace rest_local = form.orthogonal_complement(z);
            process_chunk(ctx, lift_to_ambient(chunk, rest_local), out);
            return;
        }
    }
    if (is_unit_root_prime(f)) {
        for (std::uint64_t i1 = 1; i1 < limit; ++i1) {
            Vec v = vec_from_index(F, d, i1);
            if (local_min_poly(map, v) != target) continue;
            Subspace zv = cyclic_space(map, v);
            for (std::uint64_t i2 = i1 + 1; i2 < limit; ++i2) {
                Vec w = vec_from_index(F, d, i2);
                if (local_min_poly(map, w) != target) continue;
                Subspace z = zv.sum(cyclic_space(map, w));
                if (z.dim() != 2 * fdim) continue;
                if (form.radical(z).dim() != 0) continue;
                Subspace part = lift_to_ambient(chunk, z);
                out.push_back(finalize_part(ctx, part));
                Subspace rest_local = form.orthogonal_complement(z);
                process_chunk(ctx, lift_to_ambient(chunk, rest_local), out);
                return;
            }
        }
    }
    throw InternalError("no orthogonal split found in a primary chunk");
}

// Chunk whose minimal polynomial has exactly the primes f and f* with
// f != f*: pair each cyclic summand of the f-primary part with its dual.
void split_reciprocal_pair(const DecompCtx& ctx, const Subspace& chunk,
                           const QuadSpace& form, const Mat& map,
                           const Subspace& comp_p, const Subspace& comp_ps,
                           std::vector<Summand>& out) {
    auto cyc = cyclic_decomposition(restriction(map, comp_p));
    if (cyc.size() == 1) {
        out.push_back(finalize_part(ctx, chunk));
        return;
    }
    std::vector<Subspace> cyclics;
    for (auto& [gen_local, mu] : cyc)
        cyclics.push_back(cyclic_space(map, comp_p.basis().apply(gen_local)));
    unsigned total = 0;
    for (size_t i = 0; i < cyclics.size(); ++i) {
        Subspace others = Subspace::zero(form.field(), form.dim());
        for (size_t j = 0; j < cyclics.size(); ++j)
            if (j != i) others = others.sum(cyclics[j]);
        Subspace dual = comp_ps.intersect(form.orthogonal_complement(others));
        Subspace part_local = cyclics[i].sum(dual);
        if (part_local.dim() != 2 * cyclics[i].dim() ||
            form.radical(part_local).dim() != 0 || !part_local.is_invariant(map))
            throw InternalError("dual pairing produced an invalid summand");
        total += part_local.dim();
        out.push_back(finalize_part(ctx, lift_to_ambient(chunk, part_local)));
    }
    if (total != form.dim())
        throw InternalError("dual pairing did not exhaust the chunk");
}

void process_chunk(const DecompCtx& ctx, const Subspace& chunk,
                   std::vector<Summand>& out) {
    if (chunk.dim() == 0) return;
    const FiniteField& F = chunk.field();
    auto restr = ctx.ambient_space->restrict_to(chunk);
    const QuadSpace& form = restr.space;
    Mat map = restriction(*ctx.ambient_map, chunk);

    if (subspace_count(F.q(), form.dim()) <= kExhaustiveCap) {
        auto split = minimal_nondefective_invariant(form, map);
        if (!split) {
            out.push_back(finalize_part(ctx, chunk));
            return;
        }
        Subspace part = lift_to_ambient(chunk, *split);
        out.push_back(finalize_part(ctx, part));
        Subspace rest_local = form.orthogonal_complement(*split);
        if (rest_local.dim() + split->dim() != form.dim() ||
            !rest_local.is_invariant(map))
            throw InternalError("orthogonal complement of a split is invalid");
        process_chunk(ctx, lift_to_ambient(chunk, rest_local), out);
        return;
    }

    // large chunk: block split along reciprocal-paired primary components
    auto primary = primary_decomposition(map);
    std::vector<std::pair<Poly, Subspace>> by_prime(primary.begin(), primary.end());
    std::vector<bool> used(by_prime.size(), false);
    std::vector<Subspace> blocks;
    std::vector<std::pair<int, int>> block_primes;  // indices (p, p*) or (p, -1)
    for (size_t i = 0; i < by_prime.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        Poly fs = by_prime[i].first.reciprocal().monic();
        if (fs == by_prime[i].first) {
            blocks.push_back(by_prime[i].second);
            block_primes.emplace_back(static_cast<int>(i), -1);
            continue;
        }
        int partner = -1;
        for (size_t j = 0; j < by_prime.size(); ++j)
            if (!used[j] && by_prime[j].first == fs) { partner = static_cast<int>(j); break; }
        if (partner < 0)
            throw InternalError("irreducible factor without its reciprocal partner");
        used[partner] = true;
        blocks.push_back(by_prime[i].second.sum(by_prime[partner].second));
        block_primes.emplace_back(static_cast<int>(i), partner);
    }
    if (blocks.size() > 1) {
        for (auto& b : blocks) {
            if (form.radical(b).dim() != 0)
                throw InternalError("primary block is defective");
            process_chunk(ctx, lift_to_ambient(chunk, b), out);
        }
        return;
    }
    // single block
    if (block_primes[0].second >= 0) {
        split_reciprocal_pair(ctx, chunk, form, map,
                              by_prime[block_primes[0].first].second,
                              by_prime[block_primes[0].second].second, out);
    } else {
        split_self_reciprocal(ctx, chunk, form, map,
                              by_prime[block_primes[0].first].first, out);
    }
}

} // namespace

SummandDecomposition ortho_indecomposable_summands(const OrthMap& phi) {
    DecompCtx ctx{&phi.space(), &phi.mat()};
    SummandDecomposition dec;
    process_chunk(ctx, Subspace::full(phi.space().field(), phi.dim()), dec.parts);
    // validity: pairwise orthogonal, nondefective, invariant, direct sum
    unsigned total = 0;
    for (auto& p : dec.parts) {
        total += p.space.dim();
        if (!p.space.is_invariant(phi.mat()))
            throw InternalError("summand is not invariant");
        if (phi.space().radical(p.space).dim() != 0)
            throw InternalError("summand is defective");
    }
    if (total != phi.dim()) throw InternalError("summands do not exhaust the space");
    for (size_t i = 0; i < dec.parts.size(); ++i)
        for (size_t j = i + 1; j < dec.parts.size(); ++j)
            for (unsigned a = 0; a < dec.parts[i].space.dim(); ++a)
                for (unsigned b = 0; b < dec.parts[j].space.dim(); ++b)
                    if (phi.space().eval_f(dec.parts[i].space.basis().row(a),
                                           dec.parts[j].space.basis().row(b)) != 0)
                        throw InternalError("summands are not pairwise orthogonal");
    return dec;
}

TypeLabel classify_summand(const OrthMap& phi) {
    auto dec = ortho_indecomposable_summands(phi);
    if (dec.parts.size() != 1)
        throw DomainError("transformation is orthogonally decomposable");
    return dec.parts[0].label;
}

bool is_ortho_indecomposable(const OrthMap& phi) {
    return ortho_indecomposable_summands(phi).parts.size() == 1;
}

// ---------------------------------------------------------------------------
// Hyperbolic transformations

namespace {

// Constructive generators for an indecomposable type-1 transformation on a
// hyperbolic space in characteristic 2: vectors x, z with
// V = <x>_phi + <z>_phi, both cyclic subspaces totally isotropic.
std::pair<Vec, Vec> type1_hyperbolic_generators(const QuadSpace& sp, const Mat& m,
                                                unsigned expm) {
    const FiniteField& F = sp.field();
    const unsigned n = sp.dim();
    if (expm == 1) {
        // identity on a hyperbolic plane-like space: two isotropic lines
        std::uint64_t count = 1;
        for (unsigned i = 0; i < n; ++i) count *= F.q();
        for (std::uint64_t i1 = 1; i1 < count; ++i1) {
            Vec x = vec_from_index(F, n, i1);
            if (sp.eval_q(x) != 0) continue;
            for (std::uint64_t i2 = i1 + 1; i2 < count; ++i2) {
                Vec z = vec_from_index(F, n, i2);
                if (sp.eval_q(z) != 0) continue;
                if (Subspace::span(F, n, {x, z}).dim() == 2) return {x, z};
            }
        }
        throw InternalError("no isotropic pair on a hyperbolic plane");
    }
    auto [bahn, fix] = path_fix(m, 1);
    if (!sp.is_totally_isotropic(fix))
        throw InternalError("fix space of a type-1 transformation is not isotropic");
    Vec u0, w0;
    if (expm == 2) {
        u0 = fix.basis().row(0);
        w0 = fix.basis().row(1);
    } else {
        auto q = sp.quotient_form(bahn);
        if (!(q.radical == fix))
            throw InternalError("radical of the path space is not the fix space");
        // induced transformation in quotient coordinates
        const unsigned qd = q.space.dim();
        Mat qmap(F, qd, qd);
        std::vector<Vec> frame;
        for (unsigned i = 0; i < qd; ++i) frame.push_back(q.transversal.row(i));
        for (unsigned i = 0; i < fix.dim(); ++i) frame.push_back(fix.basis().row(i));
        Mat frame_m = Mat::from_rows(F, frame);
        for (unsigned i = 0; i < qd; ++i) {
            auto c = solve_left(frame_m, m.apply(q.transversal.row(i)));
            if (!c) throw InternalError("path space is not invariant");
            for (unsigned j = 0; j < qd; ++j) qmap.set(i, j, (*c)[j]);
        }
        auto [xq, zq] = type1_hyperbolic_generators(q.space, qmap, expm - 2);
        u0 = q.transversal.apply(xq);
        w0 = q.transversal.apply(zq);
    }

    Mat mp1 = m - Mat::identity(F, n);
    Poly target = unit_root_prime(F, true).pow(expm - 1);
    std::uint64_t fixcnt = 1;
    for (unsigned i = 0; i < fix.dim(); ++i) fixcnt *= F.q();

    auto isotropic_preimages = [&](const Vec& u) {
        std::vector<Vec> result;
        auto x0 = solve_left(mp1, u);
        if (!x0) return result;
        for (std::uint64_t t = 0; t < fixcnt; ++t) {
            Vec x = vec_add(F, *x0, fix.element(t));
            if (sp.eval_q(x) != 0) continue;
            if (!sp.is_totally_isotropic(cyclic_space(m, x))) continue;
            result.push_back(std::move(x));
        }
        return result;
    };

    for (std::uint64_t du = 0; du < fixcnt; ++du) {
        Vec u = vec_add(F, u0, fix.element(du));
        if (local_min_poly(m, u) != target) continue;
        auto xs = isotropic_preimages(u);
        if (xs.empty()) continue;
        for (std::uint64_t dw = 0; dw < fixcnt; ++dw) {
            Vec w = vec_add(F, w0, fix.element(dw));
            if (local_min_poly(m, w) != target) continue;
            auto zs = isotropic_preimages(w);
            for (const Vec& x : xs)
                for (const Vec& z : zs) {
                    if (cyclic_space(m, x).sum(cyclic_space(m, z)).dim() != n)
                        continue;
                    return {x, z};
                }
        }
    }
    throw InternalError("type-1 hyperbolic generators not found");
}

} // namespace

std::optional<std::pair<Subspace, Subspace>> is_hyperbolic_transform(const OrthMap& phi) {
    const QuadSpace& sp = phi.space();
    const FiniteField& F = sp.field();
    const unsigned n = sp.dim();
    if (n % 2) return std::nullopt;
    if (!sp.is_hyperbolic_space()) return std::nullopt;

    auto eld = elementary_divisors(phi.mat());
    bool type1_pattern = eld.size() == 2 && eld[0] == eld[1] &&
                         is_unit_root_prime(eld[0].first);
    if (type1_pattern && F.p() == 2) {
        auto [x, z] = type1_hyperbolic_generators(sp, phi.mat(), eld[0].second);
        Subspace u = cyclic_space(phi.mat(), x);
        Subspace w = cyclic_space(phi.mat(), z);
        if (!sp.is_totally_isotropic(u) || !sp.is_totally_isotropic(w) ||
            u.sum(w).dim() != n || !u.is_invariant(phi.mat()) ||
            !w.is_invariant(phi.mat()))
            throw InternalError("constructed hyperbolic split is invalid");
        return std::make_pair(u, w);
    }

    if (n > 8)
        throw DomainError("hyperbolicity search is limited to dimension 8");
    // exhaustive search over invariant totally isotropic middle-dimension
    // subspaces
    std::vector<Subspace> lagrangians;
    for_each_subspace(F, n, n / 2, [&](const Mat& basis) {
        Subspace s = Subspace::row_space(basis);
        if (!s.is_invariant(phi.mat())) return false;
        if (!sp.is_totally_isotropic(s)) return false;
        lagrangians.push_back(s);
        return false;
    });
    for (size_t i = 0; i < lagrangians.size(); ++i)
        for (size_t j = 0; j < lagrangians.size(); ++j)
            if (i != j && lagrangians[i].intersect(lagrangians[j]).dim() == 0)
                return std::make_pair(lagrangians[i], lagrangians[j]);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Fixtures

namespace {

// Basis of the linear space of upper-triangular Gram matrices U whose
// quadratic form is invariant under the row action of c:
// diag(c U c^T) = diag(U) and c (U + U^T) c^T = U + U^T.
std::vector<Mat> invariant_form_space(const Mat& c) {
    const FiniteField& F = c.field();
    const unsigned n = c.rows();
    std::vector<std::pair<unsigned, unsigned>> unknowns;
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = i; j < n; ++j) unknowns.emplace_back(i, j);
    const unsigned nu = static_cast<unsigned>(unknowns.size());
    std::vector<Vec> eqs;
    // diagonal equations
    for (unsigned d = 0; d < n; ++d) {
        Vec e(nu, 0);
        for (unsigned t = 0; t < nu; ++t) {
            auto [i, j] = unknowns[t];
            Fe coef = F.mul(c.at(d, i), c.at(d, j));
            if (i == d && j == d) coef = F.sub(coef, F.one());
            e[t] = coef;
        }
        eqs.push_back(std::move(e));
    }
    // bilinear equations
    for (unsigned r = 0; r < n; ++r)
        for (unsigned s = 0; s < n; ++s) {
            Vec e(nu, 0);
            for (unsigned t = 0; t < nu; ++t) {
                auto [i, j] = unknowns[t];
                Fe coef;
                if (i == j) {
                    Fe two = F.add(F.one(), F.one());
                    coef = F.mul(two, F.mul(c.at(r, i), c.at(s, i)));
                    if (r == i && s == i) coef = F.sub(coef, two);
                } else {
                    coef = F.add(F.mul(c.at(r, i), c.at(s, j)),
                                 F.mul(c.at(r, j), c.at(s, i)));
                    if ((r == i && s == j) || (r == j && s == i))
                        coef = F.sub(coef, F.one());
                }
                e[t] = coef;
            }
            eqs.push_back(std::move(e));
        }
    Mat em = Mat::from_rows(F, eqs);
    Subspace sols = kernel(em.transpose());
    std::vector<Mat> basis;
    for (unsigned g = 0; g < sols.dim(); ++g) {
        Vec v = sols.basis().row(g);
        Mat u(F, n, n);
        for (unsigned t = 0; t < nu; ++t) u.set(unknowns[t].first, unknowns[t].second, v[t]);
        basis.push_back(std::move(u));
    }
    return basis;
}

// Enumerates combinations code -> sum of code digits times the basis mats.
Mat form_from_code(const FiniteField& F, const std::vector<Mat>& basis,
                   std::uint64_t code, unsigned n) {
    Mat u(F, n, n);
    for (const Mat& b : basis) {
        Fe digit = static_cast<Fe>(code % F.q());
        code /= F.q();
        if (digit) u = u + b.scaled(digit);
    }
    return u;
}

std::optional<QuadSpace> find_invariant_space(
    const Mat& c, const std::function<bool(const QuadSpace&)>& accept,
    std::uint64_t pick_index = 0) {
    const FiniteField& F = c.field();
    const unsigned n = c.rows();
    auto basis = invariant_form_space(c);
    std::uint64_t combos = 1;
    for (size_t i = 0; i < basis.size(); ++i) {
        combos *= F.q();
        if (combos > (1ULL << 20)) throw DomainError("form search space too large");
    }
    std::uint64_t seen = 0;
    std::optional<QuadSpace> first;
    for (std::uint64_t code = 1; code < combos; ++code) {
        Mat u = form_from_code(F, basis, code, n);
        if (!(u + u.transpose()).inverse()) continue;
        QuadSpace sp(F, u);
        if (!accept(sp)) continue;
        if (seen == pick_index) return sp;
        if (!first) first = sp;
        ++seen;
    }
    if (first && pick_index > 0) return first;  // seed larger than pool: wrap
    return std::nullopt;
}

} // namespace

OrthMap make_type1_fixture(const FiniteField& f, unsigned m, bool hyperbolic) {
    if (f.p() != 2)
        throw DomainError("type-1 fixtures are defined in characteristic 2");
    Poly xp1 = unit_root_prime(f, true);
    if (hyperbolic) {
        if (m < 1) throw DomainError("hyperbolic fixture needs m >= 1");
        Mat p = Mat::companion(xp1.pow(2 * m));
        Mat pp = p.inverse().value().transpose();
        QuadSpace sp = QuadSpace::hyperbolic(f, 2 * m);
        Mat blk(f, 4 * m, 4 * m);
        for (unsigned i = 0; i < 2 * m; ++i)
            for (unsigned j = 0; j < 2 * m; ++j) {
                blk.set(i, j, p.at(i, j));
                blk.set(2 * m + i, 2 * m + j, pp.at(i, j));
            }
        OrthMap phi(sp, blk);
        auto eld = elementary_divisors(phi.mat());
        if (eld.size() != 2 || eld[0] != eld[1] || eld[0].second != 2 * m)
            throw InternalError("hyperbolic fixture has unexpected divisors");
        return phi;
    }
    if (m == 0) {
        QuadSpace sp = QuadSpace::anisotropic_plane(f);
        return OrthMap(sp, Mat::identity(f, 2));
    }
    const unsigned n = 4 * m + 2;
    Mat c = Mat::companion(xp1.pow(n));
    auto space = find_invariant_space(c, [&](const QuadSpace& sp) {
        return sp.witt_index() == 2 * m;
    });
    if (!space) throw InternalError("no invariant form with the prescribed Witt index");
    OrthMap psi(*space, c);
    OrthMap phi(*space, c * c);
    auto eld = elementary_divisors(phi.mat());
    if (eld.size() != 2 || eld[0] != eld[1] || eld[0].second != 2 * m + 1)
        throw InternalError("fixture square has unexpected divisors");
    return phi;
}

OrthMap make_cyclic_unipotent(const FiniteField& f, unsigned m, std::uint64_t seed) {
    if (f.p() != 2)
        throw DomainError("cyclic unipotent fixtures are defined in characteristic 2");
    if (m < 1) throw DomainError("need m >= 1");
    Mat c = Mat::companion(unit_root_prime(f, true).pow(2 * m));
    auto space = find_invariant_space(
        c, [](const QuadSpace&) { return true; }, seed % 97);
    if (!space) throw InternalError("no invariant nondefective form for the regular unipotent");
    return OrthMap(*space, c);
}

// ---------------------------------------------------------------------------
// Type-1e cover and conjugation

namespace {

bool type1e_pattern(const OrthMap& phi) {
    auto eld = elementary_divisors(phi.mat());
    return eld.size() == 2 && eld[0] == eld[1] &&
           is_unit_root_prime(eld[0].first) && eld[0].second % 2 == 0;
}

// Rows [u_1..u_d, w_1..w_d] where (u_i) is a basis of U and (w_i) the
// f-dual basis inside W; valid for complementary totally isotropic U, W.
Mat isotropic_pair_frame(const QuadSpace& sp, const Subspace& u, const Subspace& w) {
    const FiniteField& F = sp.field();
    const unsigned d = u.dim();
    Mat g(F, d, d);
    for (unsigned i = 0; i < d; ++i)
        for (unsigned k = 0; k < d; ++k)
            g.set(i, k, sp.eval_f(u.basis().row(i), w.basis().row(k)));
    auto gi = g.transpose().inverse();
    if (!gi) throw InternalError("isotropic complements do not pair perfectly");
    Mat dual = *gi * w.basis();
    std::vector<Vec> rows;
    for (unsigned i = 0; i < d; ++i) rows.push_back(u.basis().row(i));
    for (unsigned i = 0; i < d; ++i) rows.push_back(dual.row(i));
    return Mat::from_rows(F, rows);
}

} // namespace

Mat conjugate_type1e(const OrthMap& phi, const OrthMap& psi) {
    if (!(phi.space() == psi.space()))
        throw DomainError("conjugation needs transformations of one space");
    if (!type1e_pattern(phi) || !type1e_pattern(psi))
        throw DomainError("both transformations must be of type 1e");
    const QuadSpace& sp = phi.space();
    const FiniteField& F = sp.field();
    const unsigned n = sp.dim(), d = n / 2;

    auto su = is_hyperbolic_transform(phi);
    auto sx = is_hyperbolic_transform(psi);
    if (!su || !sx) throw InternalError("type-1e transformation is not hyperbolic");

    Mat pphi = isotropic_pair_frame(sp, su->first, su->second);
    Mat ppsi = isotropic_pair_frame(sp, sx->first, sx->second);
    Mat alpha0 = pphi.inverse().value() * ppsi;
    if (!is_orthogonal(sp, alpha0))
        throw InternalError("frame change is not orthogonal");

    auto block_of = [&](const Mat& frame, const Mat& m) {
        Mat t = frame * m * frame.inverse().value();
        for (unsigned i = 0; i < d; ++i)
            for (unsigned j = 0; j < d; ++j)
                if (t.at(i, d + j) != 0 || t.at(d + i, j) != 0)
                    throw InternalError("transformation is not block-diagonal in its frame");
        Mat a(F, d, d);
        for (unsigned i = 0; i < d; ++i)
            for (unsigned j = 0; j < d; ++j) a.set(i, j, t.at(i, j));
        return a;
    };
    Mat a = block_of(pphi, phi.mat());
    Mat dd = block_of(ppsi, psi.mat());
    auto s = module_similar(a, dd);
    if (!s) throw InternalError("restrictions of equal type are not similar");
    Mat sp_ = s->inverse().value().transpose();
    Mat blk(F, n, n);
    for (unsigned i = 0; i < d; ++i)
        for (unsigned j = 0; j < d; ++j) {
            blk.set(i, j, s->at(i, j));
            blk.set(d + i, d + j, sp_.at(i, j));
        }
    Mat beta = ppsi.inverse().value() * blk * ppsi;
    Mat alpha = alpha0 * beta;
    if (!is_orthogonal(sp, alpha))
        throw InternalError("conjugator is not orthogonal");
    if (!(alpha.inverse().value() * phi.mat() * alpha == psi.mat()))
        throw InternalError("conjugator does not conjugate");
    return alpha;
}

OrthMap cyclic_cover_type1e(const OrthMap& phi) {
    if (!type1e_pattern(phi))
        throw DomainError("cover construction needs a type-1e transformation");
    const QuadSpace& sp = phi.space();
    const FiniteField& F = sp.field();
    const unsigned n = sp.dim();
    const unsigned twot = n / 2;

    Poly r = Poly::from_ints(F, {1, 1, 1});  // x^2 + x + 1
    Mat c = Mat::companion(r.pow(twot));
    auto abstract = find_invariant_space(c, [&](const QuadSpace& s) {
        return s.witt_index() == n / 2;
    });
    if (!abstract) throw InternalError("no hyperbolic invariant form for the cover");

    // transport to phi's space via Witt pairs
    auto frame_from_pairs = [&](const QuadSpace& s) {
        auto wd = s.witt_decompose();
        if (2 * wd.pairs.size() != s.dim())
            throw InternalError("expected a hyperbolic space");
        std::vector<Vec> rows;
        for (auto& [e, f2] : wd.pairs) rows.push_back(e);
        for (auto& [e, f2] : wd.pairs) rows.push_back(f2);
        return Mat::from_rows(F, rows);
    };
    Mat pa = frame_from_pairs(*abstract);
    Mat pv = frame_from_pairs(sp);
    Mat t = pa.inverse().value() * pv;
    Mat eta1 = t.inverse().value() * c * t;
    OrthMap eta1m(sp, eta1);

    auto [semi, unip] = jordan_chevalley(eta1);
    if (!is_orthogonal(sp, unip))
        throw InternalError("unipotent factor left the orthogonal group");
    OrthMap etau(sp, unip);
    if (!type1e_pattern(etau))
        throw InternalError("unipotent factor is not of type 1e");

    Mat alpha = conjugate_type1e(etau, phi);
    Mat eta = alpha.inverse().value() * eta1 * alpha;
    OrthMap result(sp, eta);
    auto [s2, u2] = jordan_chevalley(eta);
    if (!(u2 == phi.mat()))
        throw InternalError("cover's unipotent factor is not the input");
    if (result.min_poly().degree() != static_cast<int>(n))
        throw InternalError("cover is not cyclic");
    return result;
}

} // namespace soq
