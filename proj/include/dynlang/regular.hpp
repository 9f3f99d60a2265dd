#pragma once

// DFAs, the DFA -> DynProp compiler, the (a+b)*a(a+b)* fixture program, the
// change-only variants with precomputed initialization, and neutral-element
// checking.

#include "formula.hpp"

namespace dynlang {

struct Dfa {
    int states = 0;
    Alphabet alphabet;
    std::vector<std::vector<int>> delta;  // delta[q][sym]
    int start = 0;
    std::vector<bool> accepting;

    void validate() const {
        if (states <= 0) throw Error("DFA needs at least one state");
        if (start < 0 || start >= states) throw Error("DFA start state out of range");
        if (static_cast<int>(delta.size()) != states ||
            static_cast<int>(accepting.size()) != states)
            throw Error("DFA tables sized inconsistently");
        for (const auto& row : delta) {
            if (static_cast<int>(row.size()) != alphabet.size())
                throw Error("DFA transition table is not total");
            for (int q : row)
                if (q < 0 || q >= states) throw Error("DFA transition target out of range");
        }
    }

    int run(int q, const Word& w) const {
        for (int sym : w) q = delta[q][sym];
        return q;
    }

    bool accepts(const Word& w) const { return accepting[run(start, w)]; }
};

// Moore partition refinement on the reachable part.
inline Dfa minimize(const Dfa& a) {
    a.validate();
    int k = a.alphabet.size();
    std::vector<int> reach;
    std::vector<bool> seen(a.states, false);
    reach.push_back(a.start);
    seen[a.start] = true;
    for (size_t i = 0; i < reach.size(); ++i)
        for (int s = 0; s < k; ++s) {
            int t = a.delta[reach[i]][s];
            if (!seen[t]) {
                seen[t] = true;
                reach.push_back(t);
            }
        }

    std::vector<int> cls(a.states, -1);
    for (int q : reach) cls[q] = a.accepting[q] ? 1 : 0;
    int classes = 2;
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<std::vector<int>, int> sig_to_class;
        std::vector<int> next(a.states, -1);
        int next_count = 0;
        for (int q : reach) {
            std::vector<int> sig;
            sig.push_back(cls[q]);
            for (int s = 0; s < k; ++s) sig.push_back(cls[a.delta[q][s]]);
            auto it = sig_to_class.find(sig);
            if (it == sig_to_class.end()) it = sig_to_class.emplace(sig, next_count++).first;
            next[q] = it->second;
        }
        if (next_count != classes) changed = true;
        else
            for (int q : reach)
                if (next[q] != cls[q]) { changed = true; break; }
        cls = next;
        classes = next_count;
    }

    Dfa m;
    m.states = classes;
    m.alphabet = a.alphabet;
    m.start = cls[a.start];
    m.delta.assign(classes, std::vector<int>(k, 0));
    m.accepting.assign(classes, false);
    for (int q : reach) {
        m.accepting[cls[q]] = a.accepting[q];
        for (int s = 0; s < k; ++s) m.delta[cls[q]][s] = cls[a.delta[q][s]];
    }
    return m;
}

inline bool agree_on_words(const Dfa& a, const Dfa& b, int maxlen) {
    if (a.alphabet.size() != b.alphabet.size()) return false;
    Word w;
    std::function<bool(int)> go = [&](int len) {
        if (a.accepts(w) != b.accepts(w)) return false;
        if (len == maxlen) return true;
        for (int s = 0; s < a.alphabet.size(); ++s) {
            w.push_back(s);
            bool ok = go(len + 1);
            w.pop_back();
            if (!ok) return false;
        }
        return true;
    };
    return go(0);
}

// ------------------------------------------------------------------
// DFA -> DynProp compiler
// ------------------------------------------------------------------

// Relations: R_{p,q}(i,j) "delta*(p, w(i,j)) = q" on the open interval,
// I_q(j) "delta*(s, w[1,j-1]) = q", F_p(i) "delta*(p, w[i+1,n]) in F";
// initialized by betas. compile_regular runs the result through
// eliminate_init; the with-init variant is kept for the transform tests.
inline DynamicProgram compile_regular_with_init(const Dfa& a) {
    a.validate();
    DynamicProgram p;
    p.name = "regular";
    p.set_word_alphabet(a.alphabet);
    p.schema = make_schema(p.input_vocab);
    Schema& sch = *p.schema;
    int acc = sch.add_accept();

    int Q = a.states;
    std::vector<std::vector<int>> R(Q, std::vector<int>(Q));
    std::vector<int> I(Q), F(Q);
    for (int q1 = 0; q1 < Q; ++q1)
        for (int q2 = 0; q2 < Q; ++q2)
            R[q1][q2] =
                sch.add("R_" + std::to_string(q1) + "_" + std::to_string(q2), 2, SymKind::AuxRel);
    for (int q = 0; q < Q; ++q) I[q] = sch.add("I_" + std::to_string(q), 1, SymKind::AuxRel);
    for (int q = 0; q < Q; ++q) F[q] = sch.add("F_" + std::to_string(q), 1, SymKind::AuxRel);

    Term y = vy(0), x = vx(0), x1 = vx(0), x2 = vx(1);
    Formula y_inside = in_open(y, x1, x2);

    // pairs (p', q') compatible with reading sigma, or staying put on reset
    auto mid_pairs = [&](int sigma_or_reset) {
        std::vector<std::pair<int, int>> pairs;
        for (int p1 = 0; p1 < Q; ++p1)
            pairs.push_back({p1, sigma_or_reset < 0 ? p1 : a.delta[p1][sigma_or_reset]});
        return pairs;
    };

    auto build = [&](AbsUpdate u, int sig) {
        auto pairs = mid_pairs(sig);
        for (int q1 = 0; q1 < Q; ++q1)
            for (int q2 = 0; q2 < Q; ++q2) {
                std::vector<Formula> inner;
                for (auto [p1, q1p] : pairs)
                    inner.push_back(
                        band(rel(sch, R[q1][p1], {x1, y}), rel(sch, R[q1p][q2], {y, x2})));
                p.set_rel_update(u, R[q1][q2],
                                 bor(band(bnot(y_inside), rel(sch, R[q1][q2], {x1, x2})),
                                     band(y_inside, disj(inner))));
            }
        for (int q = 0; q < Q; ++q) {
            std::vector<Formula> inner;
            for (auto [p1, q1p] : pairs)
                inner.push_back(band(rel(sch, I[p1], {y}), rel(sch, R[q1p][q], {y, x})));
            p.set_rel_update(u, I[q],
                             bor(band(le(x, y), rel(sch, I[q], {x})),
                                 band(lt(y, x), disj(inner))));
        }
        for (int q = 0; q < Q; ++q) {
            std::vector<Formula> inner;
            for (auto [p1, q1p] : pairs)
                inner.push_back(band(rel(sch, R[q][p1], {x, y}), rel(sch, F[q1p], {y})));
            p.set_rel_update(u, F[q],
                             bor(band(le(y, x), rel(sch, F[q], {x})),
                                 band(lt(x, y), disj(inner))));
        }
        std::vector<Formula> acc_inner;
        for (auto [p1, q1p] : pairs)
            acc_inner.push_back(band(rel(sch, I[p1], {y}), rel(sch, F[q1p], {y})));
        p.set_rel_update(u, acc, disj(acc_inner));
    };

    for (int s = 0; s < a.alphabet.size(); ++s) build(AbsUpdate::ins(s), s);
    build(AbsUpdate::reset(), -1);

    for (int q1 = 0; q1 < Q; ++q1)
        for (int q2 = 0; q2 < Q; ++q2)
            p.init_formulas[R[q1][q2]] = q1 == q2 ? lt(x1, x2) : fls();
    for (int q = 0; q < Q; ++q) p.init_formulas[I[q]] = q == a.start ? tru() : fls();
    for (int q = 0; q < Q; ++q) p.init_formulas[F[q]] = a.accepting[q] ? tru() : fls();

    p.validate();
    return p;
}

inline DynamicProgram compile_regular(const Dfa& a) {
    return eliminate_init(compile_regular_with_init(a));
}

// ------------------------------------------------------------------
// The printed example program for (a+b)*a(a+b)*
// ------------------------------------------------------------------

inline Dfa example_reg_dfa() {
    Dfa d;
    d.states = 2;
    d.alphabet = Alphabet{"a", "b"};
    d.start = 0;
    d.delta = {{1, 0}, {1, 1}};
    d.accepting = {false, true};
    return d;
}

inline DynamicProgram example_reg_program() {
    DynamicProgram p;
    p.name = "example_reg";
    p.set_word_alphabet(Alphabet{"a", "b"});
    p.schema = make_schema(p.input_vocab);
    Schema& sch = *p.schema;
    int acc = sch.add_accept();
    int A = sch.add("A", 2, SymKind::AuxRel);
    int I = sch.add("I", 1, SymKind::AuxRel);
    int F = sch.add("F", 1, SymKind::AuxRel);

    Term y = vy(0), x = vx(0), x1 = vx(0), x2 = vx(1);
    Formula outside = bor(le(y, x1), le(x2, y));

    AbsUpdate ia = AbsUpdate::ins(0);
    p.set_rel_update(ia, A,
                     bor(band(outside, rel(sch, A, {x1, x2})), in_open(y, x1, x2)));
    p.set_rel_update(ia, I, bor(band(le(x, y), rel(sch, I, {x})), lt(y, x)));
    p.set_rel_update(ia, F, bor(band(le(y, x), rel(sch, F, {x})), lt(x, y)));
    p.set_rel_update(ia, acc, tru());

    for (AbsUpdate u : {AbsUpdate::ins(1), AbsUpdate::reset()}) {
        p.set_rel_update(u, A,
                         bor(band(outside, rel(sch, A, {x1, x2})),
                             band(in_open(y, x1, x2),
                                  bor(rel(sch, A, {x1, y}), rel(sch, A, {y, x2})))));
        p.set_rel_update(u, I,
                         bor(band(le(x, y), rel(sch, I, {x})),
                             band(lt(y, x), bor(rel(sch, I, {y}), rel(sch, A, {y, x})))));
        // the A-atom must test the open interval (x, y); with arguments
        // reversed it is constantly false for y > x and F decays
        p.set_rel_update(u, F,
                         bor(band(le(y, x), rel(sch, F, {x})),
                             band(lt(x, y), bor(rel(sch, F, {y}), rel(sch, A, {x, y})))));
        p.set_rel_update(u, acc, bor(rel(sch, I, {y}), rel(sch, F, {y})));
    }
    p.validate();
    return p;
}

// ------------------------------------------------------------------
// Change-only semantics: precomputed initialization over a uniform word
// ------------------------------------------------------------------

// Same update formulas as compile_regular, but the relations start from the
// delta-powers of the initial symbol and the update alphabet has no reset.
inline DynamicProgram compile_regular_alt(const Dfa& a, int initial_symbol) {
    a.validate();
    if (initial_symbol < 0 || initial_symbol >= a.alphabet.size())
        throw Error("initial symbol outside the DFA alphabet");

    DynamicProgram p;
    p.name = "regular_alt";
    p.set_word_alphabet(a.alphabet);
    p.schema = make_schema(p.input_vocab);
    Schema& sch = *p.schema;
    int acc = sch.add_accept();

    int Q = a.states;
    std::vector<std::vector<int>> R(Q, std::vector<int>(Q));
    std::vector<int> I(Q), F(Q);
    for (int q1 = 0; q1 < Q; ++q1)
        for (int q2 = 0; q2 < Q; ++q2)
            R[q1][q2] =
                sch.add("R_" + std::to_string(q1) + "_" + std::to_string(q2), 2, SymKind::AuxRel);
    for (int q = 0; q < Q; ++q) I[q] = sch.add("I_" + std::to_string(q), 1, SymKind::AuxRel);
    for (int q = 0; q < Q; ++q) F[q] = sch.add("F_" + std::to_string(q), 1, SymKind::AuxRel);

    Term y = vy(0), x = vx(0), x1 = vx(0), x2 = vx(1);
    Formula y_inside = in_open(y, x1, x2);

    for (int s = 0; s < a.alphabet.size(); ++s) {
        AbsUpdate u = AbsUpdate::ins(s);
        std::vector<std::pair<int, int>> pairs;
        for (int p1 = 0; p1 < Q; ++p1) pairs.push_back({p1, a.delta[p1][s]});
        for (int q1 = 0; q1 < Q; ++q1)
            for (int q2 = 0; q2 < Q; ++q2) {
                std::vector<Formula> inner;
                for (auto [p1, q1p] : pairs)
                    inner.push_back(
                        band(rel(sch, R[q1][p1], {x1, y}), rel(sch, R[q1p][q2], {y, x2})));
                p.set_rel_update(u, R[q1][q2],
                                 bor(band(bnot(y_inside), rel(sch, R[q1][q2], {x1, x2})),
                                     band(y_inside, disj(inner))));
            }
        for (int q = 0; q < Q; ++q) {
            std::vector<Formula> inner;
            for (auto [p1, q1p] : pairs)
                inner.push_back(band(rel(sch, I[p1], {y}), rel(sch, R[q1p][q], {y, x})));
            p.set_rel_update(u, I[q],
                             bor(band(le(x, y), rel(sch, I[q], {x})),
                                 band(lt(y, x), disj(inner))));
        }
        for (int q = 0; q < Q; ++q) {
            std::vector<Formula> inner;
            for (auto [p1, q1p] : pairs)
                inner.push_back(band(rel(sch, R[q][p1], {x, y}), rel(sch, F[q1p], {y})));
            p.set_rel_update(u, F[q],
                             bor(band(le(y, x), rel(sch, F[q], {x})),
                                 band(lt(x, y), disj(inner))));
        }
        std::vector<Formula> acc_inner;
        for (auto [p1, q1p] : pairs)
            acc_inner.push_back(band(rel(sch, I[p1], {y}), rel(sch, F[q1p], {y})));
        p.set_rel_update(u, acc, disj(acc_inner));
    }

    p.initial_input = DynamicProgram::InitialInput::Uniform;
    p.initial_symbol = initial_symbol;

    Dfa d = a;
    int s0 = initial_symbol;
    p.precompute = [d, s0, R, I, F, acc, Q](ProgramState& st) {
        int n = st.n;
        // reach[k][q] = delta*(q, a^k)
        std::vector<std::vector<int>> reach(n + 1, std::vector<int>(Q));
        for (int q = 0; q < Q; ++q) reach[0][q] = q;
        for (int k = 1; k <= n; ++k)
            for (int q = 0; q < Q; ++q) reach[k][q] = d.delta[reach[k - 1][q]][s0];
        for (int q1 = 0; q1 < Q; ++q1)
            for (int q2 = 0; q2 < Q; ++q2)
                for (Element i = 1; i <= n; ++i)
                    for (Element j = i + 1; j <= n; ++j) {
                        Element t[2] = {i, j};
                        if (reach[j - i - 1][q1] == q2) st.rel[R[q1][q2]].set_tuple(t, true);
                    }
        for (Element i = 1; i <= n; ++i) {
            st.rel[I[reach[i - 1][d.start]]].set_tuple(&i, true);
            for (int q = 0; q < Q; ++q)
                if (d.accepting[reach[n - i][q]]) st.rel[F[q]].set_tuple(&i, true);
        }
        if (d.accepting[reach[n][d.start]]) st.rel[acc].set(0, true);
    };

    p.validate();
    return p;
}

// Prop. on MIDDLE: a single precomputed unary M marking the middle position
// of odd universes; accept is the only maintained relation.
inline DynamicProgram middle_program() {
    DynamicProgram p;
    p.name = "middle";
    p.set_word_alphabet(Alphabet{"a", "b"});
    p.schema = make_schema(p.input_vocab);
    Schema& sch = *p.schema;
    int acc = sch.add_accept();
    int M = sch.add("M", 1, SymKind::PrecompRel);

    Term y = vy(0);
    p.set_rel_update(AbsUpdate::ins(0), acc, band(rel(sch, acc, {}), bnot(rel(sch, M, {y}))));
    p.set_rel_update(AbsUpdate::ins(1), acc, bor(rel(sch, acc, {}), rel(sch, M, {y})));

    p.initial_input = DynamicProgram::InitialInput::Uniform;
    p.initial_symbol = 0;
    p.precompute = [M](ProgramState& st) {
        if (st.n % 2 == 1) {
            Element mid = (st.n + 1) / 2;
            st.rel[M].set_tuple(&mid, true);
        }
    };
    p.validate();
    return p;
}

inline bool middle_oracle(const Word& w) {
    // MIDDLE = { wbw' : |w| = |w'| } over {a=0, b=1}
    if (w.size() % 2 == 0) return false;
    return w[w.size() / 2] == 1;
}

// sigma is neutral for L(a): ww' in L iff w sigma w' in L. On the minimal DFA
// this is exactly "sigma loops on every state".
inline bool is_neutral(const Dfa& a, int sigma) {
    if (sigma < 0 || sigma >= a.alphabet.size()) throw Error("symbol outside the DFA alphabet");
    Dfa m = minimize(a);
    for (int q = 0; q < m.states; ++q)
        if (m.delta[q][sigma] != q) return false;
    return true;
}

}  // namespace dynlang
