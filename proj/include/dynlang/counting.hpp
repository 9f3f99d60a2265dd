#pragma once

// Eq_r maintenance: unary counters in DynProp(SetSucc,Rel), and the DynQF
// variant built on an on-the-fly successor chain over touched positions.

#include "formula.hpp"

namespace dynlang {

// ------------------------------------------------------------------
// On-the-fly successor block
// ------------------------------------------------------------------

// Exports actdom/cmin/cmax/csucc/cpre/touched. The chain orders positions by
// first touch: cmin is the first touched position, each fresh touch becomes
// the new cmax. csucc(cmax)=cmax and cpre(cmin)=cmin via the default function
// initialization (every tuple maps to its first element).
struct SuccBlock {
    int actdom = -1, touched = -1;
    int cmin = -1, cmax = -1, csucc = -1, cpre = -1;
    const Schema* sch = nullptr;

    static SuccBlock add_to(Schema& sch) {
        SuccBlock b;
        b.actdom = sch.add("actdom", 1, SymKind::AuxRel);
        b.touched = sch.add("touched", 0, SymKind::AuxRel);
        b.cmin = sch.add("cmin", 0, SymKind::AuxFun);
        b.cmax = sch.add("cmax", 0, SymKind::AuxFun);
        b.csucc = sch.add("csucc", 1, SymKind::AuxFun);
        b.cpre = sch.add("cpre", 1, SymKind::AuxFun);
        b.sch = &sch;
        return b;
    }

    Term z() const { return vy(0); }
    Formula fresh() const {
        return bnot(rel(*sch, actdom, {z()}));  // z not active yet
    }

    // old-state reads
    Term old_min() const { return app(*sch, cmin, {}); }
    Term old_max() const { return app(*sch, cmax, {}); }
    Term old_succ(Term t) const { return app(*sch, csucc, {std::move(t)}); }
    Term old_pre(Term t) const { return app(*sch, cpre, {std::move(t)}); }
    Formula old_actdom(Term t) const { return rel(*sch, actdom, {std::move(t)}); }
    Formula old_touched() const { return rel(*sch, touched, {}); }

    // post-update values as terms over the old state ("first compute the new
    // successor functions and use these newly computed functions")
    Term new_min() const { return ite(old_touched(), old_min(), z()); }
    Term new_max() const { return ite(band(old_touched(), bnot(fresh())), old_max(), z()); }
    Term new_succ(Term t) const {
        Formula appends = band(old_touched(), band(fresh(), eq(t, old_max())));
        return ite(appends, z(), old_succ(t));
    }
    Term new_pre(Term t) const {
        Formula appends = band(old_touched(), band(fresh(), eq(t, z())));
        return ite(appends, old_max(), old_pre(t));
    }
    Formula new_actdom(Term t) const { return bor(old_actdom(t), eq(t, z())); }

    // register the block's update definitions for one abstract update
    void set_updates(DynamicProgram& p, const AbsUpdate& u) const {
        Term x = vx(0);
        p.set_rel_update(u, actdom, new_actdom(x));
        p.set_rel_update(u, touched, tru());
        p.set_fun_update(u, cmin, new_min());
        p.set_fun_update(u, cmax, new_max());
        p.set_fun_update(u, csucc, new_succ(x));
        p.set_fun_update(u, cpre, new_pre(x));
    }
};

// chain well-formedness: a total order on actdom with consistent fixpoints
inline bool check_succ_chain(const ProgramState& st, const SuccBlock& b) {
    bool touched = st.rel[b.touched].get(0);
    uint64_t active = st.rel[b.actdom].count();
    if (!touched) return active == 0;
    if (active == 0) return false;
    Element cur = st.fun[b.cmin][0];
    Element mx = st.fun[b.cmax][0];
    std::vector<bool> seen(st.n + 1, false);
    Element one = cur;
    if (st.fun[b.cpre][cur - 1] != cur) return false;  // cpre(min)=min
    uint64_t walked = 0;
    while (true) {
        if (cur < 1 || cur > st.n || seen[cur]) return false;
        seen[cur] = true;
        ++walked;
        if (!st.rel[b.actdom].get_tuple(&cur)) return false;
        Element nx = st.fun[b.csucc][cur - 1];
        if (nx == cur) break;  // reached the fixpoint
        if (st.fun[b.cpre][nx - 1] != cur) return false;  // cpre inverts csucc
        cur = nx;
    }
    (void)one;
    return cur == mx && walked == active;
}

// rank of an element in the chain (0 = cmin), or -1 if not active
inline int chain_rank(const ProgramState& st, const SuccBlock& b, Element e) {
    if (!st.rel[b.touched].get(0)) return -1;
    Element cur = st.fun[b.cmin][0];
    int r = 0;
    while (true) {
        if (cur == e) return r;
        Element nx = st.fun[b.csucc][cur - 1];
        if (nx == cur) return -1;
        cur = nx;
        ++r;
    }
}

// ------------------------------------------------------------------
// Eq_r
// ------------------------------------------------------------------

inline bool count_oracle(const Word& w, int r) {
    std::vector<int> counts(r, 0);
    for (int s : w) {
        if (s < 0 || s >= r) throw Error("count_oracle: symbol outside a1..ar");
        ++counts[s];
    }
    for (int i = 1; i < r; ++i)
        if (counts[i] != counts[0]) return false;
    return true;
}

inline Alphabet eqr_alphabet(int r) {
    std::vector<std::string> syms;
    for (int i = 1; i <= r; ++i) syms.push_back("a" + std::to_string(i));
    return Alphabet(syms);
}

namespace detail {

// One counter block tracks d = #a1 - #a_i. A1: d > 0, A2: d < 0, C maps |d|
// to a chain element (difference d is stored on the element of rank d-1).
struct CounterBlock {
    int A1 = -1, A2 = -1, C = -1;
};

struct CounterOps {
    std::function<Term()> minT;           // number-0 element, post-update where needed
    std::function<Term(Term)> succT, preT;

    Formula shift(const Schema& sch, const CounterBlock& b, bool toward_a1, bool for_c,
                  int which) const {
        Term x = vx(0);
        Formula a1 = rel(sch, b.A1, {});
        Formula a2 = rel(sch, b.A2, {});
        Formula cmin = rel(sch, b.C, {minT()});
        int grow = toward_a1 ? b.A1 : b.A2;   // flag on the growing side
        int shrink = toward_a1 ? b.A2 : b.A1;
        Formula growf = rel(sch, grow, {});
        Formula shrinkf = rel(sch, shrink, {});
        if (!for_c) {
            if (which == grow) return bnot(shrinkf);
            return band(shrinkf, bnot(cmin));
        }
        // C update, three cases. The shrink read C(succ(x)) needs the guard
        // succ(x) != x: at the top of the chain succ is a fixpoint and the
        // unguarded read would duplicate the counter element.
        Term sx = succT(x);
        return disj({band(bnot(bor(a1, a2)), eq(x, minT())),
                     band(growf, band(rel(sch, b.C, {preT(x)}), neq(x, minT()))),
                     band(shrinkf, band(rel(sch, b.C, {sx}), neq(sx, x)))});
    }
};

inline DynamicProgram eqr_program_impl(int r, bool use_builtins) {
    if (r < 2) throw Error("Eq_r needs r >= 2");
    DynamicProgram p;
    p.name = use_builtins ? "eqr_succ" : "eqr_qf";
    p.set_word_alphabet(eqr_alphabet(r));
    p.schema = make_schema(p.input_vocab);
    Schema& sch = *p.schema;
    int acc = sch.add_accept();

    SuccBlock block;
    if (use_builtins) sch.enable_setsucc();
    else block = SuccBlock::add_to(sch);

    std::vector<CounterBlock> blocks(r - 1);
    for (int b = 0; b < r - 1; ++b) {
        std::string suf = std::to_string(b + 2);
        blocks[b].A1 = sch.add("A1_" + suf, 0, SymKind::AuxRel);
        blocks[b].A2 = sch.add("A2_" + suf, 0, SymKind::AuxRel);
        blocks[b].C = sch.add("C_" + suf, 1, SymKind::AuxRel);
    }

    CounterOps ops;
    if (use_builtins) {
        ops.minT = [&sch]() { return app(sch, sch.min_sym, {}); };
        ops.succT = [&sch](Term t) { return app(sch, sch.succ_sym, {std::move(t)}); };
        ops.preT = [&sch](Term t) { return app(sch, sch.pre_sym, {std::move(t)}); };
    } else {
        // the freshly appended element must already be addressable, so all
        // chain reads go through the block's post-update terms
        ops.minT = [block]() { return block.new_min(); };
        ops.succT = [block](Term t) { return block.new_succ(std::move(t)); };
        ops.preT = [block](Term t) { return block.new_pre(std::move(t)); };
    }

    Term x = vx(0), z = vy(0);

    auto build_update = [&](const AbsUpdate& u, int inserted /* -1 for reset */) {
        std::vector<Formula> balanced;  // accept: all blocks end balanced
        for (int b = 0; b < r - 1; ++b) {
            const CounterBlock& cb = blocks[b];
            int other = b + 1;  // alphabet index of a_{b+2-1}: block b pairs a1 with a_{b+2}
            Formula fA1, fA2, fC;
            if (inserted == 0) {  // ins a1: every block grows toward a1
                fA1 = ops.shift(sch, cb, true, false, cb.A1);
                fA2 = ops.shift(sch, cb, true, false, cb.A2);
                fC = ops.shift(sch, cb, true, true, cb.C);
            } else if (inserted == other) {  // ins a_{b+2}: block b shrinks
                fA1 = ops.shift(sch, cb, false, false, cb.A1);
                fA2 = ops.shift(sch, cb, false, false, cb.A2);
                fC = ops.shift(sch, cb, false, true, cb.C);
            } else if (inserted > 0) {  // unrelated symbol: copy
                fA1 = rel(sch, cb.A1, {});
                fA2 = rel(sch, cb.A2, {});
                fC = rel(sch, cb.C, {x});
            } else {
                // reset: direction depends on the old label of z
                Formula was_a1 = rel(sch, 0, {z});
                Formula was_other = rel(sch, other, {z});
                Formula untouched = bnot(bor(was_a1, was_other));
                fA1 = disj({band(was_a1, ops.shift(sch, cb, false, false, cb.A1)),
                            band(was_other, ops.shift(sch, cb, true, false, cb.A1)),
                            band(untouched, rel(sch, cb.A1, {}))});
                fA2 = disj({band(was_a1, ops.shift(sch, cb, false, false, cb.A2)),
                            band(was_other, ops.shift(sch, cb, true, false, cb.A2)),
                            band(untouched, rel(sch, cb.A2, {}))});
                fC = disj({band(was_a1, ops.shift(sch, cb, false, true, cb.C)),
                           band(was_other, ops.shift(sch, cb, true, true, cb.C)),
                           band(untouched, rel(sch, cb.C, {x}))});
            }
            p.set_rel_update(u, cb.A1, fA1);
            p.set_rel_update(u, cb.A2, fA2);
            p.set_rel_update(u, cb.C, fC);
            balanced.push_back(band(bnot(fA1), bnot(fA2)));
        }
        p.set_rel_update(u, acc, conj(balanced));
        if (!use_builtins) block.set_updates(p, u);
    };

    for (int s = 0; s < r; ++s) build_update(AbsUpdate::ins(s), s);
    build_update(AbsUpdate::reset(), -1);

    p.validate();
    return normalize_update_discipline(p);
}

}  // namespace detail

inline DynamicProgram eqr_program_succ(int r) { return detail::eqr_program_impl(r, true); }
inline DynamicProgram eqr_program_qf(int r) { return detail::eqr_program_impl(r, false); }

// counter invariants: flag exclusivity, single C element, C empty iff flags off
inline bool check_counter_invariants(const ProgramState& st, int A1, int A2, int C) {
    bool a1 = st.rel[A1].get(0), a2 = st.rel[A2].get(0);
    if (a1 && a2) return false;
    uint64_t c = st.rel[C].count();
    if (c > 1) return false;
    if ((c == 0) != (!a1 && !a2)) return false;
    return true;
}

}  // namespace dynlang
