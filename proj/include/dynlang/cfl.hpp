#pragma once

// CNF grammars with the E-augmentation, the CNF -> DynFO compiler
// maintaining the 4-ary derivation relations, and the CYK oracle.

#include "formula.hpp"

namespace dynlang {

struct CnfGrammar {
    std::vector<std::string> nonterminals;
    int start = 0;
    Alphabet terminals;
    // rule shapes: lhs -> a b | lhs -> terminal | lhs -> eps
    struct Binary {
        int lhs, a, b;
    };
    struct Terminal {
        int lhs, term;
    };
    std::vector<Binary> binary;
    std::vector<Terminal> terminal;
    std::vector<int> epsilon;  // lhs of eps-rules
    int eps_nt = -1;           // the distinguished E (after augmentation)

    int nt_count() const { return static_cast<int>(nonterminals.size()); }
    int find_nt(const std::string& s) const {
        for (int i = 0; i < nt_count(); ++i)
            if (nonterminals[i] == s) return i;
        return -1;
    }
    size_t rule_count() const { return binary.size() + terminal.size() + epsilon.size(); }

    std::vector<bool> nullable() const {
        std::vector<bool> nul(nt_count(), false);
        for (int u : epsilon) nul[u] = true;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& r : binary)
                if (!nul[r.lhs] && nul[r.a] && nul[r.b]) {
                    nul[r.lhs] = true;
                    changed = true;
                }
        }
        return nul;
    }

    // X => * Y surrounded by nullable material
    std::vector<std::vector<bool>> unit_reach() const {
        int n = nt_count();
        std::vector<bool> nul = nullable();
        std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
        for (int x = 0; x < n; ++x) reach[x][x] = true;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& r : binary)
                for (int y = 0; y < n; ++y) {
                    if (reach[r.lhs][y]) continue;
                    if ((reach[r.a][y] && nul[r.b]) || (nul[r.a] && reach[r.b][y])) {
                        reach[r.lhs][y] = true;
                        changed = true;
                    }
                }
        }
        return reach;
    }
};

// Adds a fresh nullable E with U -> UE and U -> EU for every U (E included);
// the language is unchanged.
inline CnfGrammar augment_cnf(const CnfGrammar& g) {
    CnfGrammar a = g;
    std::string ename = "E";
    while (a.find_nt(ename) >= 0) ename += "_";
    int e = a.nt_count();
    a.nonterminals.push_back(ename);
    a.eps_nt = e;
    a.epsilon.push_back(e);
    for (int u = 0; u <= e; ++u) {
        a.binary.push_back({u, u, e});
        a.binary.push_back({u, e, u});
    }
    return a;
}

// Derivability of a sentential form: items are terminals (>= 0 encoded as
// {false, sym}) or nonterminals ({true, nt}). Standard CYK with nullable
// absorption; the empty sequence reduces to nullability.
struct SentItem {
    bool is_nt = false;
    int id = 0;

    auto operator<=>(const SentItem&) const = default;
};

inline bool cnf_derives(const CnfGrammar& g, int from, const std::vector<SentItem>& items) {
    int n = static_cast<int>(items.size());
    std::vector<bool> nul = g.nullable();
    if (n == 0) return nul[from];
    auto reach = g.unit_reach();
    int V = g.nt_count();
    // dp[i][j] = set of U deriving items[i..i+j-1]
    std::vector<std::vector<std::vector<bool>>> dp(
        n, std::vector<std::vector<bool>>(n + 1, std::vector<bool>(V, false)));

    auto close = [&](std::vector<bool>& cell) {
        // U => * X with nullable padding
        std::vector<bool> out(V, false);
        for (int u = 0; u < V; ++u)
            for (int x = 0; x < V; ++x)
                if (reach[u][x] && cell[x]) out[u] = true;
        cell = out;
    };

    for (int i = 0; i < n; ++i) {
        std::vector<bool>& cell = dp[i][1];
        if (items[i].is_nt) {
            cell[items[i].id] = true;
        } else {
            for (const auto& r : g.terminal)
                if (r.term == items[i].id) cell[r.lhs] = true;
        }
        close(cell);
    }
    for (int len = 2; len <= n; ++len)
        for (int i = 0; i + len <= n; ++i) {
            std::vector<bool>& cell = dp[i][len];
            for (int split = 1; split < len; ++split)
                for (const auto& r : g.binary)
                    if (dp[i][split][r.a] && dp[i + split][len - split][r.b])
                        cell[r.lhs] = true;
            close(cell);
        }
    return dp[0][n][from];
}

inline bool cyk_oracle(const CnfGrammar& g, const Word& w) {
    std::vector<SentItem> items;
    for (int s : w) items.push_back({false, s});
    return cnf_derives(g, g.start, items);
}

// ------------------------------------------------------------------
// CNF -> DynFO compiler
// ------------------------------------------------------------------

// Maintains, for all X,Y, the 4-ary relation
//   R_{X,Y}(x1,x2,y1,y2) iff [y1,y2] subset of [x1,x2] and
//                            X =>* w[x1,y1-1] Y w[y2+1,x2].
// Initially (empty word) that is the nullable-padded unit reachability.
// min/max and the successor are spelled out in first-order logic, so the
// program needs no built-ins or precomputation.
inline DynamicProgram compile_cfl(const CnfGrammar& g) {
    if (g.eps_nt < 0) throw Error("compile_cfl expects an augmented grammar (no E)");
    DynamicProgram p;
    p.name = "cfl";
    p.set_word_alphabet(g.terminals);
    p.schema = make_schema(p.input_vocab);
    Schema& sch = *p.schema;
    int acc = sch.add_accept();

    int V = g.nt_count();
    std::vector<std::vector<int>> R(V, std::vector<int>(V));
    for (int x = 0; x < V; ++x)
        for (int y = 0; y < V; ++y)
            R[x][y] = sch.add("R_" + g.nonterminals[x] + "_" + g.nonterminals[y], 4,
                              SymKind::AuxRel);

    Term z = vy(0), x1 = vx(0), x2 = vx(1), y1 = vx(2), y2 = vx(3);
    Formula subset = conj({le(x1, y1), le(y1, y2), le(y2, x2)});

    VarId u1 = var_id("u1"), u2 = var_id("u2"), u3 = var_id("u3");
    VarId sv = var_id("u4"), vv = var_id("u5");

    auto succ_of = [&](VarId a, VarId b, Formula body) {
        // exists b: b = a+1 and body
        return exists(b, conj({lt(var(a), var(b)),
                               bnot(exists(vv, band(lt(var(a), var(vv)),
                                                    lt(var(vv), var(b))))),
                               body}));
    };

    // the "Z slots in at z" producers: Z -> sigma for inserts, Z = E for reset
    auto z_producers = [&](int sigma) {
        std::vector<int> zs;
        if (sigma < 0) {
            zs.push_back(g.eps_nt);
        } else {
            for (const auto& r : g.terminal)
                if (r.term == sigma) zs.push_back(r.lhs);
        }
        return zs;
    };

    auto pred_of = [&](VarId b, VarId a, Formula body) {
        // exists a: a+1 = b and body
        return exists(a, conj({lt(var(a), var(b)),
                               bnot(exists(vv, band(lt(var(a), var(vv)),
                                                    lt(var(vv), var(b))))),
                               body}));
    };

    auto build = [&](const AbsUpdate& u, int sigma) {
        std::vector<int> zs = z_producers(sigma);
        for (int X = 0; X < V; ++X)
            for (int Y = 0; Y < V; ++Y) {
                Formula self = rel(sch, R[X][Y], {x1, x2, y1, y2});
                Formula untouched =
                    band(bor(bnot(band(le(x1, z), le(z, x2))), band(le(y1, z), le(z, y2))),
                         self);
                // z strictly left of the hole: U -> U1 U2 where U1 derives
                // w[u1,z-1] Z w[z+1,u2] and U2 derives w[u2+1,y1-1] Y w[y2+1,u3]
                std::vector<Formula> left_pairs;
                for (int Z : zs)
                    for (int U1 = 0; U1 < V; ++U1) {
                        std::vector<Formula> tails;
                        for (const auto& r : g.binary) {
                            if (r.a != U1) continue;
                            tails.push_back(exists(
                                u3, conj({le(var(sv), var(u3)), le(y2, var(u3)),
                                          le(var(u3), x2),
                                          rel(sch, R[r.b][Y], {var(sv), var(u3), y1, y2}),
                                          rel(sch, R[X][r.lhs],
                                              {x1, x2, var(u1), var(u3)})})));
                        }
                        if (tails.empty()) continue;
                        left_pairs.push_back(
                            band(rel(sch, R[U1][Z], {var(u1), var(u2), z, z}),
                                 succ_of(u2, sv, disj(tails))));
                    }
                Formula left =
                    band(band(le(x1, z), lt(z, y1)),
                         exists(u1, exists(u2, band(conj({le(var(u1), var(u2)),
                                                          le(x1, var(u1)),
                                                          lt(var(u2), y1)}),
                                                    disj(left_pairs)))));
                // z strictly right of the hole: U -> U1 U2 where U1 derives
                // w[u1,y1-1] Y w[y2+1,u2-1] and U2 derives w[u2,z-1] Z w[z+1,u3]
                std::vector<Formula> right_pairs;
                for (int Z : zs)
                    for (int U2n = 0; U2n < V; ++U2n) {
                        std::vector<Formula> tails;
                        for (const auto& r : g.binary) {
                            if (r.b != U2n) continue;
                            tails.push_back(exists(
                                u1, conj({lt(var(u1), var(u2)), le(x1, var(u1)),
                                          le(var(u1), y1),
                                          rel(sch, R[r.a][Y], {var(u1), var(sv), y1, y2}),
                                          rel(sch, R[X][r.lhs],
                                              {x1, x2, var(u1), var(u3)})})));
                        }
                        if (tails.empty()) continue;
                        right_pairs.push_back(
                            band(rel(sch, R[U2n][Z], {var(u2), var(u3), z, z}),
                                 pred_of(u2, sv, disj(tails))));
                    }
                Formula right =
                    band(band(lt(y2, z), le(z, x2)),
                         exists(u2, exists(u3, band(conj({le(var(u2), var(u3)),
                                                          lt(y2, var(u2)),
                                                          le(var(u3), x2)}),
                                                    disj(right_pairs)))));
                p.set_rel_update(u, R[X][Y],
                                 band(subset, disj({untouched, left, right})));
            }
        // accept: R_{S,Z}(min, max, z, z)
        std::vector<Formula> accs;
        for (int Z : zs) accs.push_back(rel(sch, R[g.start][Z], {var(u1), var(u2), z, z}));
        Formula acceptf =
            exists(u1, band(bnot(exists(vv, lt(var(vv), var(u1)))),
                            exists(u2, band(bnot(exists(vv, lt(var(u2), var(vv)))),
                                            disj(accs)))));
        p.set_rel_update(u, acc, acceptf);
    };

    for (int s = 0; s < g.terminals.size(); ++s) build(AbsUpdate::ins(s), s);
    build(AbsUpdate::reset(), -1);

    // initialization: on the empty word R_{X,Y} is the nullable-padded unit
    // reachability, restricted to proper tuples
    auto reach = g.unit_reach();
    for (int X = 0; X < V; ++X)
        for (int Y = 0; Y < V; ++Y)
            p.init_formulas[R[X][Y]] = reach[X][Y] ? subset : fls();

    p.validate();
    return eliminate_init(p);
}

// grammar of D_1 in CNF (S -> SS | ( S ) | eps), pre-augmentation
inline CnfGrammar dyck1_cnf() {
    CnfGrammar g;
    g.nonterminals = {"S", "L", "R", "T"};
    g.start = 0;
    g.terminals = Alphabet{"(", ")"};
    // S -> SS | LT | LR ; T -> SR ; L -> ( ; R -> ) ; S -> eps
    g.binary = {{0, 0, 0}, {0, 1, 3}, {0, 1, 2}, {3, 0, 2}};
    g.terminal = {{1, 0}, {2, 1}};
    g.epsilon = {0};
    return g;
}

// grammar of { a^n b^n : n >= 0 }
inline CnfGrammar anbn_cnf() {
    CnfGrammar g;
    g.nonterminals = {"S", "A", "B", "T"};
    g.start = 0;
    g.terminals = Alphabet{"a", "b"};
    // S -> AB | AT | eps ; T -> SB ; A -> a ; B -> b
    g.binary = {{0, 1, 2}, {0, 1, 3}, {3, 0, 2}};
    g.terminal = {{1, 0}, {2, 1}};
    g.epsilon = {0};
    return g;
}

}  // namespace dynlang
