#pragma once

// Balanced-binary-tree-shaped structures (fixed heap universe, labels
// change), bottom-up tree automata, the quantifier-free maintenance program
// over precomputed tree functions, and the from-scratch run oracle.

#include "formula.hpp"

namespace dynlang {

// nodes are heap indices: node u has children 2u and 2u+1 while in range;
// this is the level-order reading of the paper's string-labeled universe
struct TreeUniverse {
    int n = 0;

    explicit TreeUniverse(int n_) : n(n_) {
        if (n <= 0) throw Error("tree universe needs at least one node");
    }

    Element parent(Element u) const { return u == 1 ? 1 : u / 2; }
    Element lchild(Element u) const { return 2 * u <= n ? 2 * u : u; }   // fixpoint if absent
    Element rchild(Element u) const { return 2 * u + 1 <= n ? 2 * u + 1 : u; }

    bool anc(Element x, Element y) const {  // strict ancestor
        while (y != 1) {
            y = y / 2;
            if (y == x) return true;
        }
        return false;
    }

    Element lca(Element x, Element y) const {
        while (x != y) {
            if (x > y) x = x / 2;
            else y = y / 2;
        }
        return x;
    }
};

struct TreeAutomaton {
    int states = 0;
    Alphabet alphabet;
    std::vector<int> initial;                    // q^I_sigma per symbol
    std::vector<std::vector<std::vector<int>>> delta;  // delta[q1][q2][sigma]
    std::vector<bool> accepting;

    void validate() const {
        if (states <= 0) throw Error("tree automaton needs at least one state");
        if (static_cast<int>(initial.size()) != alphabet.size())
            throw Error("tree automaton initial map must cover the alphabet");
        if (static_cast<int>(delta.size()) != states)
            throw Error("tree automaton transition table sized inconsistently");
        for (const auto& row : delta) {
            if (static_cast<int>(row.size()) != states)
                throw Error("tree automaton transition table sized inconsistently");
            for (const auto& cell : row)
                if (static_cast<int>(cell.size()) != alphabet.size())
                    throw Error("tree automaton transition table must be total");
        }
    }
};

// bottom-up evaluation of the maximal labeled subtree rooted at u;
// -1 encodes "no run" (unlabeled node or half-labeled children)
namespace tree_detail {

inline int run_state(const TreeUniverse& t, const std::vector<int>& labels,
                     const TreeAutomaton& a, Element u) {
    int lab = labels[u];
    if (lab < 0) return -1;
    Element l = 2 * u, r = 2 * u + 1;
    bool lpresent = l <= t.n && labels[l] >= 0;
    bool rpresent = r <= t.n && labels[r] >= 0;
    if (!lpresent && !rpresent) return a.initial[lab];
    if (!lpresent || !rpresent) return -1;  // exactly one labeled child: stuck
    int sl = run_state(t, labels, a, l);
    int sr = run_state(t, labels, a, r);
    if (sl < 0 || sr < 0) return -1;
    return a.delta[sl][sr][lab];
}

}  // namespace tree_detail

// acceptance of the encoded tree: the labeled subtree rooted at node 1;
// an unlabeled root is rejected
inline bool tree_oracle(const TreeUniverse& t, const std::vector<int>& labels,
                        const TreeAutomaton& a) {
    int q = tree_detail::run_state(t, labels, a, 1);
    return q >= 0 && a.accepting[q];
}

// ------------------------------------------------------------------
// Compiler: tree automaton -> quantifier-free program over precomputed
// anc/lca/parent/lchild/rchild (class DynProp(Fun,Rel))
// ------------------------------------------------------------------

inline DynamicProgram compile_tree(const TreeAutomaton& a) {
    a.validate();
    DynamicProgram p;
    p.name = "tree";
    p.set_word_alphabet(a.alphabet);  // unary label relations, ins/reset updates
    p.schema = make_schema(p.input_vocab);
    Schema& sch = *p.schema;
    int acc = sch.add_accept();

    int ANC = sch.add("anc", 2, SymKind::PrecompRel);
    int LCA = sch.add("lca", 2, SymKind::PrecompFun);
    int PAR = sch.add("parent", 1, SymKind::PrecompFun);
    int LCH = sch.add("lch", 1, SymKind::PrecompFun);
    int RCH = sch.add("rch", 1, SymKind::PrecompFun);
    int ROOT = sch.add("rootc", 0, SymKind::PrecompFun);

    int Q = a.states;
    int CON = sch.add("con", 2, SymKind::AuxRel);
    std::vector<int> Rq(Q);
    std::vector<std::vector<int>> Rqq(Q, std::vector<int>(Q));
    for (int q = 0; q < Q; ++q) Rq[q] = sch.add("Rq_" + std::to_string(q), 1, SymKind::AuxRel);
    for (int q1 = 0; q1 < Q; ++q1)
        for (int q2 = 0; q2 < Q; ++q2)
            Rqq[q1][q2] =
                sch.add("Rp_" + std::to_string(q1) + "_" + std::to_string(q2), 2,
                        SymKind::AuxRel);

    auto lch = [&](Term t) { return app(sch, LCH, {std::move(t)}); };
    auto rch = [&](Term t) { return app(sch, RCH, {std::move(t)}); };
    auto par = [&](Term t) { return app(sch, PAR, {std::move(t)}); };
    auto lca = [&](Term s, Term t) { return app(sch, LCA, {std::move(s), std::move(t)}); };
    auto ancf = [&](Term s, Term t) { return rel(sch, ANC, {std::move(s), std::move(t)}); };
    auto ancself = [&](Term s, Term t) { return bor(ancf(s, t), eq(s, t)); };
    auto eps = [&](Term t) {
        std::vector<Formula> fs;
        for (int s = 0; s < a.alphabet.size(); ++s) fs.push_back(bnot(rel(sch, s, {t})));
        return conj(fs);
    };
    // leaf within the labeled tree: each child absent or unlabeled
    auto leaf = [&](Term t) {
        return band(bor(eq(lch(t), t), eps(lch(t))), bor(eq(rch(t), t), eps(rch(t))));
    };
    // "if x were labeled sigma, subtree^x runs to state pq"
    auto phi_sigma = [&](int sigma, int pq, Term x) {
        std::vector<Formula> inner;
        for (int p1 = 0; p1 < Q; ++p1)
            for (int p2 = 0; p2 < Q; ++p2)
                if (a.delta[p1][p2][sigma] == pq)
                    inner.push_back(
                        band(rel(sch, Rq[p1], {lch(x)}), rel(sch, Rq[p2], {rch(x)})));
        Formula as_leaf = a.initial[sigma] == pq ? leaf(x) : fls();
        return bor(as_leaf, band(bnot(leaf(x)), disj(inner)));
    };
    // "y is reset and y2 = parent(y) becomes a leaf running to pq"
    auto psi = [&](int pq, Term y, Term y2) {
        std::vector<Formula> labs;
        for (int s = 0; s < a.alphabet.size(); ++s)
            if (a.initial[s] == pq) labs.push_back(rel(sch, s, {y2}));
        // the printed second disjunct tests eps(rchild) twice; the forced
        // reading checks the sibling of y on each side
        Formula shape = bor(band(eq(lch(y2), y), eps(rch(y2))),
                            band(eq(rch(y2), y), eps(lch(y2))));
        return band(disj(labs), shape);
    };

    Term y = vy(0), x = vx(0), x1 = vx(0), x2 = vx(1);

    // con updates
    for (int s = 0; s < a.alphabet.size(); ++s)
        p.set_rel_update(
            AbsUpdate::ins(s), CON,
            bor(band(bnot(band(ancself(x1, y), ancf(y, x2))), rel(sch, CON, {x1, x2})),
                band(rel(sch, CON, {x1, y}),
                     bor(rel(sch, CON, {lch(y), x2}), rel(sch, CON, {rch(y), x2})))));
    p.set_rel_update(AbsUpdate::reset(), CON,
                     band(bnot(band(ancself(x1, y), ancf(y, x2))), rel(sch, CON, {x1, x2})));

    // R_q updates
    for (int s = 0; s < a.alphabet.size(); ++s)
        for (int q = 0; q < Q; ++q) {
            std::vector<Formula> runs;
            for (int pq = 0; pq < Q; ++pq)
                runs.push_back(band(phi_sigma(s, pq, y), rel(sch, Rqq[q][pq], {x, y})));
            p.set_rel_update(
                AbsUpdate::ins(s), Rq[q],
                bor(band(bnot(band(ancself(x, y), rel(sch, CON, {x, y}))),
                         rel(sch, Rq[q], {x})),
                    band(band(ancself(x, y), rel(sch, CON, {x, y})), disj(runs))));
        }
    for (int q = 0; q < Q; ++q) {
        std::vector<Formula> runs;
        for (int pq = 0; pq < Q; ++pq)
            runs.push_back(band(psi(pq, y, par(y)), rel(sch, Rqq[q][pq], {x, par(y)})));
        p.set_rel_update(
            AbsUpdate::reset(), Rq[q],
            bor(band(bnot(band(ancself(x, y), rel(sch, CON, {x, y}))), rel(sch, Rq[q], {x})),
                band(ancf(x, y), disj(runs))));
    }

    // R_{q1,q2} updates
    for (int s = 0; s < a.alphabet.size(); ++s)
        for (int q1 = 0; q1 < Q; ++q1)
            for (int q2 = 0; q2 < Q; ++q2) {
                Term z = lca(x2, y);
                Formula keep = band(bor(bnot(rel(sch, CON, {x1, y})), ancself(x2, y)),
                                    rel(sch, Rqq[q1][q2], {x1, x2}));
                // y on the path above x2 (y a strict ancestor of x2)
                std::vector<Formula> on_path_l, on_path_r;
                for (int pq = 0; pq < Q; ++pq)
                    for (int p1 = 0; p1 < Q; ++p1)
                        for (int p2 = 0; p2 < Q; ++p2) {
                            if (a.delta[p1][p2][s] != pq) continue;
                            on_path_l.push_back(conj(
                                {rel(sch, Rqq[p1][q2], {lch(y), x2}),
                                 rel(sch, Rq[p2], {rch(y)}), rel(sch, Rqq[q1][pq], {x1, y})}));
                            on_path_r.push_back(conj(
                                {rel(sch, Rq[p1], {lch(y)}),
                                 rel(sch, Rqq[p2][q2], {rch(y), x2}),
                                 rel(sch, Rqq[q1][pq], {x1, y})}));
                        }
                Formula phi2 = band(band(ancf(y, x2), ancself(lch(y), x2)), disj(on_path_l));
                Formula phi3 = band(band(ancf(y, x2), ancself(rch(y), x2)), disj(on_path_r));
                // y off the path: z = lca(x2,y) != y; sigma' = label of z
                std::vector<Formula> off_l, off_r;
                for (int pq = 0; pq < Q; ++pq) {
                    Formula py = phi_sigma(s, pq, y);
                    for (int sp = 0; sp < a.alphabet.size(); ++sp)
                        for (int r1 = 0; r1 < Q; ++r1)
                            for (int r2 = 0; r2 < Q; ++r2) {
                                int rr = a.delta[r1][r2][sp];
                                off_l.push_back(conj(
                                    {py, rel(sch, sp, {z}),
                                     rel(sch, Rqq[r1][pq], {lch(z), y}),
                                     rel(sch, Rqq[r2][q2], {rch(z), x2}),
                                     rel(sch, Rqq[q1][rr], {x1, z})}));
                                off_r.push_back(conj(
                                    {py, rel(sch, sp, {z}),
                                     rel(sch, Rqq[r1][q2], {lch(z), x2}),
                                     rel(sch, Rqq[r2][pq], {rch(z), y}),
                                     rel(sch, Rqq[q1][rr], {x1, z})}));
                            }
                }
                Formula phi4 = band(band(neq(y, z), ancself(lch(z), y)), disj(off_l));
                Formula phi5 = band(band(neq(y, z), ancself(rch(z), y)), disj(off_r));

                Formula con_new =
                    bor(band(bnot(band(ancself(x1, y), ancf(y, x2))), rel(sch, CON, {x1, x2})),
                        band(rel(sch, CON, {x1, y}),
                             bor(rel(sch, CON, {lch(y), x2}), rel(sch, CON, {rch(y), x2}))));
                p.set_rel_update(AbsUpdate::ins(s), Rqq[q1][q2],
                                 band(band(ancself(x1, x2), con_new),
                                      disj({keep, phi2, phi3, phi4, phi5})));
            }
    for (int q1 = 0; q1 < Q; ++q1)
        for (int q2 = 0; q2 < Q; ++q2) {
            Term z = lca(x2, y);
            Term y2 = par(y);
            Formula keep = band(bor(bnot(rel(sch, CON, {x1, y})), ancself(x2, y)),
                                rel(sch, Rqq[q1][q2], {x1, x2}));
            std::vector<Formula> off_l, off_r;
            for (int pq = 0; pq < Q; ++pq) {
                Formula py = psi(pq, y, y2);
                for (int sp = 0; sp < a.alphabet.size(); ++sp)
                    for (int r1 = 0; r1 < Q; ++r1)
                        for (int r2 = 0; r2 < Q; ++r2) {
                            int rr = a.delta[r1][r2][sp];
                            off_l.push_back(conj({py, rel(sch, sp, {z}),
                                                  rel(sch, Rqq[r1][pq], {lch(z), y2}),
                                                  rel(sch, Rqq[r2][q2], {rch(z), x2}),
                                                  rel(sch, Rqq[q1][rr], {x1, z})}));
                            off_r.push_back(conj({py, rel(sch, sp, {z}),
                                                  rel(sch, Rqq[r1][q2], {lch(z), x2}),
                                                  rel(sch, Rqq[r2][pq], {rch(z), y2}),
                                                  rel(sch, Rqq[q1][rr], {x1, z})}));
                        }
            }
            Formula phi2 = band(band(neq(y, z), ancself(lch(z), y)), disj(off_l));
            Formula phi3 = band(band(neq(y, z), ancself(rch(z), y)), disj(off_r));
            p.set_rel_update(
                AbsUpdate::reset(), Rqq[q1][q2],
                band(conj({ancself(x1, x2), bnot(band(ancself(x1, y), ancf(y, x2))),
                           rel(sch, CON, {x1, x2})}),
                     disj({keep, phi2, phi3})));
        }

    // accept: some accepting state runs on subtree^root after the update
    for (int s = 0; s < a.alphabet.size(); ++s) {
        std::vector<Formula> accs;
        for (int q = 0; q < Q; ++q) {
            if (!a.accepting[q]) continue;
            Formula f = p.updates.at(AbsUpdate::ins(s)).rel.at(Rq[q]);
            accs.push_back(subst_vars(f, {{tuple_var(0), app(sch, ROOT, {})}}));
        }
        p.set_rel_update(AbsUpdate::ins(s), acc, disj(accs));
    }
    {
        std::vector<Formula> accs;
        for (int q = 0; q < Q; ++q) {
            if (!a.accepting[q]) continue;
            Formula f = p.updates.at(AbsUpdate::reset()).rel.at(Rq[q]);
            accs.push_back(subst_vars(f, {{tuple_var(0), app(sch, ROOT, {})}}));
        }
        p.set_rel_update(AbsUpdate::reset(), acc, disj(accs));
    }

    // precomputed tree tables
    p.precompute = [ANC, LCA, PAR, LCH, RCH, ROOT](ProgramState& st) {
        TreeUniverse t(st.n);
        for (Element u = 1; u <= st.n; ++u) {
            st.fun[PAR][u - 1] = t.parent(u);
            st.fun[LCH][u - 1] = t.lchild(u);
            st.fun[RCH][u - 1] = t.rchild(u);
            for (Element w = 1; w <= st.n; ++w) {
                Element tup[2] = {u, w};
                if (t.anc(u, w)) st.rel[ANC].set_tuple(tup, true);
                st.fun[LCA][(u - 1) * st.n + (w - 1)] = t.lca(u, w);
            }
        }
        st.fun[ROOT][0] = 1;
    };

    // initialization per the printed tables
    {
        Term i1 = vx(0), i2 = vx(1);
        p.init_formulas[CON] = eq(i1, i2);
        for (int q = 0; q < Q; ++q) p.init_formulas[Rq[q]] = fls();
        for (int q1 = 0; q1 < Q; ++q1)
            for (int q2 = 0; q2 < Q; ++q2)
                p.init_formulas[Rqq[q1][q2]] = q1 == q2 ? eq(i1, i2) : fls();
    }

    p.validate();
    return eliminate_init(p);
}

}  // namespace dynlang
