#pragma once

// EFO sentences over general relational structures: realized-disjoint-type
// counting in DynQF with precomputation. Counts live in [0, n^k) and are
// stored as k base-n digit functions; addition/subtraction chains ride on
// precomputed modular tables with carry relations.

#include "formula.hpp"

namespace dynlang {

struct EfoSentence {
    int k = 1;          // quantifier count, variables x1..xk
    Formula matrix;     // quantifier-free, relation and equality atoms only
};

// atom truth assignment of one disjoint l-type: for every vocabulary
// relation r and argument pattern over {1..l} one bit
struct DisjointType {
    int ell = 0;
    std::vector<uint8_t> atoms;

    bool operator==(const DisjointType& o) const { return ell == o.ell && atoms == o.atoms; }
    bool operator<(const DisjointType& o) const {
        return std::tie(ell, atoms) < std::tie(o.ell, o.atoms);
    }
};

namespace efo_detail {

struct AtomLayout {
    const Vocabulary* vocab;
    int ell;
    std::vector<int> offset;  // per relation
    int total = 0;

    AtomLayout(const Vocabulary& v, int l) : vocab(&v), ell(l) {
        for (int r = 0; r < v.size(); ++r) {
            offset.push_back(total);
            int cnt = 1;
            for (int i = 0; i < v.arity(r); ++i) cnt *= l;
            total += cnt;
        }
    }

    // pattern components in {1..ell}
    int index(int r, const std::vector<int>& pattern) const {
        int idx = 0;
        for (int c : pattern) idx = idx * ell + (c - 1);
        return offset[r] + idx;
    }
};

inline void check_matrix(const Formula& f) {
    using K = FormulaNode::K;
    switch (f->k) {
        case K::True:
        case K::False: return;
        case K::Rel:
        case K::Eq:
            for (const auto& a : f->args)
                if (a->k != TermNode::K::Var)
                    throw Error("EFO matrix atoms must use plain variables");
            return;
        case K::Not:
        case K::And:
        case K::Or:
            for (const auto& k : f->kids) check_matrix(k);
            return;
        default:
            throw Error("EFO matrix must be quantifier-free over relation and equality atoms");
    }
}

// evaluate the matrix under a collapse map var -> position, reading relation
// atoms from the type's assignment
inline bool matrix_under(const Formula& f, const AtomLayout& lay, const DisjointType& tau,
                         const std::map<VarId, int>& pos) {
    using K = FormulaNode::K;
    switch (f->k) {
        case K::True: return true;
        case K::False: return false;
        case K::Rel: {
            std::vector<int> pattern;
            for (const auto& a : f->args) pattern.push_back(pos.at(a->var));
            return tau.atoms[lay.index(f->sym, pattern)];
        }
        case K::Eq: return pos.at(f->args[0]->var) == pos.at(f->args[1]->var);
        case K::Not: return !matrix_under(f->kids[0], lay, tau, pos);
        case K::And:
            for (const auto& k : f->kids)
                if (!matrix_under(k, lay, tau, pos)) return false;
            return true;
        case K::Or:
            for (const auto& k : f->kids)
                if (matrix_under(k, lay, tau, pos)) return true;
            return false;
        default: throw Error("corrupt EFO matrix");
    }
}

}  // namespace efo_detail

inline std::vector<DisjointType> all_types(const Vocabulary& vocab, int ell) {
    efo_detail::AtomLayout lay(vocab, ell);
    if (lay.total > 20) throw Error("type enumeration capacity exceeded");
    std::vector<DisjointType> out;
    for (uint32_t bits = 0; bits < (uint32_t(1) << lay.total); ++bits) {
        DisjointType t;
        t.ell = ell;
        t.atoms.resize(lay.total);
        for (int i = 0; i < lay.total; ++i) t.atoms[i] = (bits >> i) & 1;
        out.push_back(std::move(t));
    }
    return out;
}

// theta_psi: the disjoint l-types (l = 1..k) whose realization makes the
// sentence true under some surjective collapse of the quantified variables
inline std::vector<DisjointType> types_of_sentence(const EfoSentence& psi,
                                                   const Vocabulary& vocab,
                                                   uint64_t bound = 1 << 16) {
    efo_detail::check_matrix(psi.matrix);
    uint64_t candidates = 0;
    for (int ell = 1; ell <= psi.k; ++ell) {
        efo_detail::AtomLayout lay(vocab, ell);
        if (lay.total >= 63) throw Error("type enumeration capacity exceeded");
        candidates += uint64_t(1) << lay.total;
        if (candidates > bound) throw Error("type enumeration capacity exceeded");
    }
    std::vector<DisjointType> theta;
    for (int ell = 1; ell <= psi.k; ++ell) {
        efo_detail::AtomLayout lay(vocab, ell);
        for (DisjointType& tau : all_types(vocab, ell)) {
            // surjective maps {x1..xk} -> {1..ell}
            std::vector<int> m(psi.k, 1);
            bool in_theta = false;
            while (!in_theta) {
                std::vector<bool> hit(ell + 1, false);
                for (int v : m) hit[v] = true;
                bool surj = true;
                for (int c = 1; c <= ell; ++c) surj = surj && hit[c];
                if (surj) {
                    std::map<VarId, int> pos;
                    for (int i = 0; i < psi.k; ++i) pos[tuple_var(i)] = m[i];
                    if (efo_detail::matrix_under(psi.matrix, lay, tau, pos)) in_theta = true;
                }
                int i = psi.k - 1;
                while (i >= 0 && m[i] == ell) m[i--] = 1;
                if (i < 0) break;
                ++m[i];
            }
            if (in_theta) theta.push_back(tau);
        }
    }
    return theta;
}

// ------------------------------------------------------------------
// Oracles
// ------------------------------------------------------------------

inline bool efo_oracle(const Structure& s, const EfoSentence& psi) {
    efo_detail::check_matrix(psi.matrix);
    std::function<bool(const Formula&, std::map<VarId, Element>&)> ev =
        [&](const Formula& f, std::map<VarId, Element>& env) -> bool {
        using K = FormulaNode::K;
        switch (f->k) {
            case K::True: return true;
            case K::False: return false;
            case K::Rel: {
                Element t[8];
                for (size_t i = 0; i < f->args.size(); ++i) t[i] = env.at(f->args[i]->var);
                return s.rels[f->sym].get_tuple(t);
            }
            case K::Eq: return env.at(f->args[0]->var) == env.at(f->args[1]->var);
            case K::Not: return !ev(f->kids[0], env);
            case K::And:
                for (const auto& k : f->kids)
                    if (!ev(k, env)) return false;
                return true;
            case K::Or:
                for (const auto& k : f->kids)
                    if (ev(k, env)) return true;
                return false;
            default: throw Error("corrupt EFO matrix");
        }
    };
    std::vector<Element> asg(psi.k, 1);
    while (true) {
        std::map<VarId, Element> env;
        for (int i = 0; i < psi.k; ++i) env[tuple_var(i)] = asg[i];
        if (ev(psi.matrix, env)) return true;
        int i = psi.k - 1;
        while (i >= 0 && asg[i] == s.n) asg[i--] = 1;
        if (i < 0) return false;
        ++asg[i];
    }
}

inline DisjointType type_of_tuple(const Structure& s, const std::vector<Element>& tup) {
    int ell = static_cast<int>(tup.size());
    efo_detail::AtomLayout lay(s.vocab, ell);
    DisjointType t;
    t.ell = ell;
    t.atoms.resize(lay.total);
    for (int r = 0; r < s.vocab.size(); ++r) {
        int m = s.vocab.arity(r);
        std::vector<int> pat(m, 1);
        while (true) {
            Element args[8];
            for (int i = 0; i < m; ++i) args[i] = tup[pat[i] - 1];
            t.atoms[lay.index(r, pat)] = s.rels[r].get_tuple(args) ? 1 : 0;
            int i = m - 1;
            while (i >= 0 && pat[i] == ell) pat[i--] = 1;
            if (i < 0) break;
            ++pat[i];
        }
        if (m == 0) t.atoms[lay.index(r, {})] = s.rels[r].get(0) ? 1 : 0;
    }
    return t;
}

// brute-force count of disjoint ell-tuples of type tau with fixed components
inline int64_t type_count_oracle(const Structure& s, const DisjointType& tau,
                                 const std::vector<int>& I, const std::vector<Element>& xs) {
    if (I.size() != xs.size()) throw Error("type_count_oracle: |I| != |xs|");
    int ell = tau.ell;
    int64_t count = 0;
    std::vector<Element> tup(ell, 1);
    while (true) {
        bool disjoint = true;
        for (int i = 0; i < ell && disjoint; ++i)
            for (int j = i + 1; j < ell; ++j)
                if (tup[i] == tup[j]) { disjoint = false; break; }
        if (disjoint) {
            bool anchored = true;
            for (size_t j = 0; j < I.size(); ++j)
                if (tup[I[j] - 1] != xs[j]) { anchored = false; break; }
            if (anchored && type_of_tuple(s, tup) == tau) ++count;
        }
        int i = ell - 1;
        while (i >= 0 && tup[i] == s.n) tup[i--] = 1;
        if (i < 0) break;
        ++tup[i];
    }
    return count;
}

// ------------------------------------------------------------------
// Compiler
// ------------------------------------------------------------------

struct EfoProgram {
    DynamicProgram prog;
    Vocabulary vocab;
    int k = 1;
    int width = 2;  // digit count: max(k,2), since an l=k=1 count can reach n^1
    std::vector<DisjointType> types;                 // all l-types, l = 1..k
    std::vector<DisjointType> theta;                 // accepting types
    // digit function symbols per (type index, I bitmask): k entries
    std::map<std::pair<int, uint32_t>, std::vector<int>> digits;
    int zero_sym = -1, one_sym = -1;

    int type_index(const DisjointType& t) const {
        for (size_t i = 0; i < types.size(); ++i)
            if (types[i] == t) return static_cast<int>(i);
        return -1;
    }

    // decoded value of f^I_tau(xs) in a state
    int64_t decode(const ProgramState& st, int type_idx, uint32_t imask,
                   const std::vector<Element>& xs) const {
        const auto& dsyms = digits.at({type_idx, imask});
        uint64_t idx = 0;
        for (Element e : xs) idx = idx * st.n + static_cast<uint64_t>(e - 1);
        int64_t value = 0, base = 1;
        for (int d = 0; d < width; ++d) {
            value += (st.fun[dsyms[d]][idx] - 1) * base;
            base *= st.n;
        }
        return value;
    }
};

namespace efo_detail {

// base-n numbers as digit-term vectors (least significant first)
struct Num {
    std::vector<Term> dig;
};

struct Arith {
    const Schema* sch;
    int plusfun, minfun, rplus, rminus, zero, one;

    Term zeroc() const { return app(*sch, zero, {}); }
    Term onec() const { return app(*sch, one, {}); }

    Num constant_zero(int k) const {
        Num z;
        for (int d = 0; d < k; ++d) z.dig.push_back(zeroc());
        return z;
    }

    Num add(const Num& a, const Num& b) const {
        Num out;
        Formula carry = fls();
        for (size_t d = 0; d < a.dig.size(); ++d) {
            Term t = app(*sch, plusfun, {a.dig[d], b.dig[d]});
            out.dig.push_back(ite(carry, app(*sch, plusfun, {t, onec()}), t));
            carry = bor(rel(*sch, rplus, {a.dig[d], b.dig[d]}),
                        band(carry, rel(*sch, rplus, {t, onec()})));
        }
        return out;
    }

    Num sub(const Num& a, const Num& b) const {
        Num out;
        Formula borrow = fls();
        for (size_t d = 0; d < a.dig.size(); ++d) {
            Term t = app(*sch, minfun, {a.dig[d], b.dig[d]});
            out.dig.push_back(ite(borrow, app(*sch, minfun, {t, onec()}), t));
            borrow = bor(rel(*sch, rminus, {a.dig[d], b.dig[d]}),
                         band(borrow, rel(*sch, rminus, {t, onec()})));
        }
        return out;
    }

    Num guarded(Formula g, const Num& a) const {
        Num out;
        for (const auto& t : a.dig) out.dig.push_back(ite(g, t, zeroc()));
        return out;
    }
};

}  // namespace efo_detail

inline EfoProgram compile_efo(const EfoSentence& psi, const Vocabulary& vocab,
                              uint64_t bound = 1 << 16) {
    EfoProgram ep;
    ep.vocab = vocab;
    ep.k = psi.k;
    ep.width = std::max(psi.k, 2);
    ep.theta = types_of_sentence(psi, vocab, bound);

    DynamicProgram& p = ep.prog;
    p.name = "efo";
    p.set_general_vocab(vocab);
    p.schema = make_schema(vocab);
    Schema& sch = *p.schema;
    int acc = sch.add_accept();

    int plusfun = sch.add("plusfun", 2, SymKind::PrecompFun);
    int minfun = sch.add("minfun", 2, SymKind::PrecompFun);
    int rplus = sch.add("Rplus", 2, SymKind::PrecompRel);
    int rminus = sch.add("Rminus", 2, SymKind::PrecompRel);
    int zero = sch.add("zeroc", 0, SymKind::PrecompFun);
    int one = sch.add("onec", 0, SymKind::PrecompFun);
    ep.zero_sym = zero;
    ep.one_sym = one;

    // all l-types and their digit functions
    for (int ell = 1; ell <= psi.k; ++ell)
        for (auto& t : all_types(vocab, ell)) ep.types.push_back(t);
    for (size_t ti = 0; ti < ep.types.size(); ++ti) {
        int ell = ep.types[ti].ell;
        for (uint32_t imask = 0; imask < (uint32_t(1) << ell); ++imask) {
            int arity = __builtin_popcount(imask);
            std::vector<int> ds;
            for (int d = 0; d < ep.width; ++d)
                ds.push_back(sch.add("f_t" + std::to_string(ti) + "_I" +
                                         std::to_string(imask) + "_d" + std::to_string(d),
                                     arity, SymKind::AuxFun));
            ep.digits[{static_cast<int>(ti), imask}] = ds;
        }
    }

    efo_detail::Arith ar{&sch, plusfun, minfun, rplus, rminus, zero, one};

    // per-(type, imask) update for one abstract update ins_R/del_R
    auto build_update = [&](const AbsUpdate& u, int R, bool insert) {
        int m = vocab.arity(R);
        std::vector<Term> yvars;
        for (int i = 0; i < m; ++i) yvars.push_back(vy(i));

        std::map<int, efo_detail::Num> new_values;  // first digit sym -> Num

        for (size_t ti = 0; ti < ep.types.size(); ++ti) {
            const DisjointType& tau = ep.types[ti];
            int ell = tau.ell;
            efo_detail::AtomLayout lay(vocab, ell);
            for (uint32_t imask = 0; imask < (uint32_t(1) << ell); ++imask) {
                std::vector<int> I;  // 1-based positions, ascending
                for (int b = 0; b < ell; ++b)
                    if (imask & (1u << b)) I.push_back(b + 1);
                std::vector<Term> xvars;
                for (size_t j = 0; j < I.size(); ++j) xvars.push_back(vx(static_cast<int>(j)));

                const auto& dsyms = ep.digits[{static_cast<int>(ti), imask}];
                efo_detail::Num total;
                for (int d = 0; d < ep.width; ++d)
                    total.dig.push_back(app(sch, dsyms[d], xvars));

                // enumerate indexings: maps of the y-slots into {1..ell}
                std::vector<int> ind(m, 1);
                bool done = m == 0 ? false : false;
                int iterations = 1;
                for (int i = 0; i < m; ++i) iterations *= ell;
                for (int it = 0; it < iterations; ++it) {
                    // pattern of the affected atom
                    std::vector<int> pattern(ind.begin(), ind.end());
                    int atom = lay.index(R, pattern);
                    bool positive_in_tau = tau.atoms[atom];

                    // properness guard over all slots (x slots carry indices
                    // I[j], y slots carry ind[i])
                    std::vector<std::pair<int, Term>> slots;
                    for (size_t j = 0; j < I.size(); ++j) slots.push_back({I[j], xvars[j]});
                    for (int i = 0; i < m; ++i) slots.push_back({ind[i], yvars[i]});
                    std::vector<Formula> guards;
                    for (size_t a = 0; a < slots.size(); ++a)
                        for (size_t b = a + 1; b < slots.size(); ++b)
                            guards.push_back(slots[a].first == slots[b].first
                                                 ? eq(slots[a].second, slots[b].second)
                                                 : neq(slots[a].second, slots[b].second));
                    Formula phi_ind = conj(guards);

                    // merged argument list of the source function: one term
                    // per index in I union ind, ordered by index
                    uint32_t imask2 = imask;
                    for (int i = 0; i < m; ++i) imask2 |= (1u << (ind[i] - 1));
                    std::vector<Term> args2;
                    for (int b = 0; b < ell; ++b) {
                        if (!(imask2 & (1u << b))) continue;
                        Term chosen;
                        for (const auto& [idx, t] : slots)
                            if (idx == b + 1) { chosen = t; break; }
                        args2.push_back(chosen);
                    }

                    // gained / lost sources
                    DisjointType flipped = tau;
                    flipped.atoms[atom] ^= 1;
                    int src_gain = ep.type_index(flipped);

                    bool gain_applies = insert ? positive_in_tau : !positive_in_tau;
                    bool lose_applies = !gain_applies;

                    if (gain_applies) {
                        const auto& gsyms = ep.digits[{src_gain, imask2}];
                        efo_detail::Num source;
                        for (int d = 0; d < ep.width; ++d)
                            source.dig.push_back(app(sch, gsyms[d], args2));
                        total = ar.add(total, ar.guarded(phi_ind, source));
                    }
                    if (lose_applies) {
                        const auto& lsyms = ep.digits[{static_cast<int>(ti), imask2}];
                        efo_detail::Num source;
                        for (int d = 0; d < ep.width; ++d)
                            source.dig.push_back(app(sch, lsyms[d], args2));
                        total = ar.sub(total, ar.guarded(phi_ind, source));
                    }

                    // next indexing
                    int i = m - 1;
                    while (i >= 0 && ind[i] == ell) ind[i--] = 1;
                    if (i < 0) break;
                    ++ind[i];
                }
                (void)done;

                for (int d = 0; d < ep.width; ++d) p.set_fun_update(u, dsyms[d], total.dig[d]);
                new_values[dsyms[0]] = total;
            }
        }

        // accept: some accepting type realized after the update
        std::vector<Formula> nonzero;
        for (const auto& tau : ep.theta) {
            int ti = ep.type_index(tau);
            const auto& dsyms = ep.digits[{ti, 0}];
            const efo_detail::Num& nv = new_values.at(dsyms[0]);
            for (int d = 0; d < ep.width; ++d)
                nonzero.push_back(neq(nv.dig[d], ar.zeroc()));
        }
        p.set_rel_update(u, acc, disj(nonzero));
    };

    for (int r = 0; r < vocab.size(); ++r) {
        build_update(AbsUpdate::ins_rel(r), r, true);
        build_update(AbsUpdate::del_rel(r), r, false);
    }

    // precomputation: modular arithmetic tables and the initial counts of
    // the all-negative types on the empty structure
    std::vector<DisjointType> types_copy = ep.types;
    auto digits_copy = ep.digits;
    int kk = ep.width;
    p.precompute = [types_copy, digits_copy, plusfun, minfun, rplus, rminus, zero, one, kk,
                    vocab](ProgramState& st) {
        int n = st.n;
        for (Element a = 1; a <= n; ++a)
            for (Element b = 1; b <= n; ++b) {
                uint64_t idx = static_cast<uint64_t>(a - 1) * n + (b - 1);
                int sum = (a - 1) + (b - 1);
                st.fun[plusfun][idx] = sum % n + 1;
                st.rel[rplus].set(idx, sum >= n);
                int diff = (a - 1) - (b - 1);
                st.fun[minfun][idx] = ((diff % n) + n) % n + 1;
                st.rel[rminus].set(idx, diff < 0);
            }
        st.fun[zero][0] = 1;
        st.fun[one][0] = n >= 2 ? 2 : 1;

        // every digit table starts at number zero (element 1); the engine's
        // first-element default is not a zero encoding
        for (const auto& [key, dsyms] : digits_copy)
            for (int d : dsyms) std::fill(st.fun[d].begin(), st.fun[d].end(), 1);

        // initial f^I_{tau_neg}: the number of disjoint extensions
        // (n-|I|)(n-|I|-1)...(n-ell+1) on distinct anchors, else 0
        for (size_t ti = 0; ti < types_copy.size(); ++ti) {
            const DisjointType& tau = types_copy[ti];
            bool all_negative = true;
            for (uint8_t a : tau.atoms) all_negative = all_negative && !a;
            if (!all_negative) continue;
            int ell = tau.ell;
            for (uint32_t imask = 0; imask < (uint32_t(1) << ell); ++imask) {
                int isz = __builtin_popcount(imask);
                const auto& dsyms = digits_copy.at({static_cast<int>(ti), imask});
                int64_t value = 1;
                for (int j = isz; j < ell; ++j) value *= (n - j);
                if (value < 0) value = 0;
                // fill per anchor tuple; duplicates get 0
                uint64_t tuples = RelTable::pow_count(n, isz);
                std::vector<Element> xs(isz, 1);
                for (uint64_t idx = 0; idx < tuples; ++idx) {
                    bool distinct = true;
                    for (int a = 0; a < isz && distinct; ++a)
                        for (int b = a + 1; b < isz; ++b)
                            if (xs[a] == xs[b]) { distinct = false; break; }
                    int64_t v = distinct ? value : 0;
                    int64_t rem = v;
                    for (int d = 0; d < kk; ++d) {
                        st.fun[dsyms[d]][idx] = static_cast<Element>(rem % n) + 1;
                        rem /= n;
                    }
                    for (int j = isz - 1; j >= 0; --j) {
                        if (++xs[j] <= n) break;
                        xs[j] = 1;
                    }
                }
            }
        }
    };

    p.validate();
    return ep;
}

// parse "exists x y : E(x,y) & !E(y,x)" style sentences; the vocabulary is
// inferred from the atoms unless provided
struct EfoParseResult {
    EfoSentence sentence;
    Vocabulary vocab;
};

namespace efo_detail {

struct Parser {
    const std::string& s;
    size_t pos = 0;
    Vocabulary& vocab;
    std::map<std::string, VarId> vars;

    Parser(const std::string& text, Vocabulary& v) : s(text), vocab(v) {}

    void skip() {
        while (pos < s.size() && isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    std::string name() {
        skip();
        size_t start = pos;
        while (pos < s.size() && (isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (start == pos) throw Error("EFO parse error at offset " + std::to_string(pos));
        return s.substr(start, pos - start);
    }

    Term variable(const std::string& n) {
        auto it = vars.find(n);
        if (it == vars.end()) throw Error("EFO sentence uses unquantified variable " + n);
        return var(it->second);
    }

    Formula expr() {
        Formula f = conjunction();
        skip();
        while (eat('|')) f = bor(f, conjunction());
        return f;
    }
    Formula conjunction() {
        Formula f = unary();
        skip();
        while (eat('&')) f = band(f, unary());
        return f;
    }
    Formula unary() {
        skip();
        if (eat('!')) return bnot(unary());
        if (eat('(')) {
            Formula f = expr();
            if (!eat(')')) throw Error("EFO parse error: expected )");
            return f;
        }
        std::string n = name();
        if (n == "true") return tru();
        if (n == "false") return fls();
        skip();
        if (pos < s.size() && s[pos] == '(') {
            ++pos;
            std::vector<Term> args;
            args.push_back(variable(name()));
            while (eat(',')) args.push_back(variable(name()));
            if (!eat(')')) throw Error("EFO parse error: expected ) after atom");
            int r = vocab.find(n);
            if (r < 0) r = vocab.add(n, static_cast<int>(args.size()));
            if (vocab.arity(r) != static_cast<int>(args.size()))
                throw Error("EFO atom arity mismatch for " + n);
            // relation atoms refer to input symbols; symbol ids in the
            // compiled schema coincide with vocabulary indices
            auto node = std::make_shared<FormulaNode>();
            node->k = FormulaNode::K::Rel;
            node->sym = r;
            node->args = std::move(args);
            return node;
        }
        if (eat('=')) return eq(variable(n), variable(name()));
        throw Error("EFO parse error near " + n);
    }
};

}  // namespace efo_detail

inline EfoParseResult parse_efo(const std::string& text, Vocabulary vocab = {}) {
    EfoParseResult out;
    out.vocab = std::move(vocab);
    efo_detail::Parser ps(text, out.vocab);
    std::string kw = ps.name();
    if (kw != "exists") throw Error("EFO sentence must start with 'exists'");
    std::vector<std::string> names;
    while (true) {
        ps.skip();
        if (ps.pos < text.size() && text[ps.pos] == ':') break;
        names.push_back(ps.name());
        if (names.size() > 8) throw Error("too many EFO variables");
    }
    ps.eat(':');
    out.sentence.k = static_cast<int>(names.size());
    if (out.sentence.k == 0) throw Error("EFO sentence needs at least one variable");
    for (size_t i = 0; i < names.size(); ++i)
        ps.vars[names[i]] = tuple_var(static_cast<int>(i));
    out.sentence.matrix = ps.expr();
    ps.skip();
    if (ps.pos != text.size()) throw Error("EFO parse error: trailing input");
    return out;
}

}  // namespace dynlang
