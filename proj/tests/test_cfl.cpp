#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "dynlang/cfl.hpp"

using namespace dynlang;

namespace {

CnfGrammar random_cnf(std::mt19937_64& rng) {
    CnfGrammar g;
    int V = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < V; ++i) g.nonterminals.push_back("N" + std::to_string(i));
    g.start = 0;
    int alpha = 1 + static_cast<int>(rng() % 2);
    g.terminals = Alphabet(alpha == 1 ? std::vector<std::string>{"a"}
                                      : std::vector<std::string>{"a", "b"});
    int nb = 1 + static_cast<int>(rng() % (2 * V));
    for (int i = 0; i < nb; ++i)
        g.binary.push_back({static_cast<int>(rng() % V), static_cast<int>(rng() % V),
                            static_cast<int>(rng() % V)});
    int nt = 1 + static_cast<int>(rng() % V);
    for (int i = 0; i < nt; ++i)
        g.terminal.push_back({static_cast<int>(rng() % V), static_cast<int>(rng() % alpha)});
    if (rng() % 2) g.epsilon.push_back(static_cast<int>(rng() % V));
    return g;
}

UpdateSequence random_word_sequence(std::mt19937_64& rng, int n, int alpha, int len) {
    UpdateSequence seq;
    for (int i = 0; i < len; ++i) {
        Element pos = 1 + static_cast<Element>(rng() % n);
        if (rng() % 4 == 0) seq.push_back(ConcreteUpdate::reset(pos));
        else seq.push_back(ConcreteUpdate::ins(static_cast<int>(rng() % alpha), pos));
    }
    return seq;
}

// brute-force derivation enumeration: all terminal words of length <= maxw
// derivable within depth rewriting steps
std::set<Word> enumerate_words(const CnfGrammar& g, int depth, int maxw) {
    std::set<std::vector<SentItem>> forms;
    std::vector<SentItem> start = {{true, g.start}};
    forms.insert(start);
    for (int d = 0; d < depth; ++d) {
        std::set<std::vector<SentItem>> next = forms;
        for (const auto& f : forms) {
            for (size_t i = 0; i < f.size(); ++i) {
                if (!f[i].is_nt) continue;
                auto expand = [&](const std::vector<SentItem>& repl) {
                    std::vector<SentItem> nf(f.begin(), f.begin() + i);
                    nf.insert(nf.end(), repl.begin(), repl.end());
                    nf.insert(nf.end(), f.begin() + i + 1, f.end());
                    int terms = 0;
                    for (auto& it : nf)
                        if (!it.is_nt) ++terms;
                    if (terms <= maxw && nf.size() <= 8) next.insert(nf);
                };
                for (const auto& r : g.binary)
                    if (r.lhs == f[i].id)
                        expand({{true, r.a}, {true, r.b}});
                for (const auto& r : g.terminal)
                    if (r.lhs == f[i].id) expand({{false, r.term}});
                for (int e : g.epsilon)
                    if (e == f[i].id) expand({});
                break;  // leftmost derivation only
            }
        }
        forms = std::move(next);
    }
    std::set<Word> words;
    for (const auto& f : forms) {
        bool all_term = true;
        Word w;
        for (const auto& it : f) {
            if (it.is_nt) { all_term = false; break; }
            w.push_back(it.id);
        }
        if (all_term && static_cast<int>(w.size()) <= maxw) words.insert(w);
    }
    return words;
}

}  // namespace

TEST_CASE("augment_cnf preserves the language and adds the E rules") {
    CnfGrammar g;
    g.nonterminals = {"S"};
    g.start = 0;
    g.terminals = Alphabet{"a"};
    g.epsilon = {0};
    CnfGrammar a = augment_cnf(g);
    REQUIRE(a.eps_nt == 1);
    REQUIRE(a.rule_count() == g.rule_count() + 1 + 2 * (g.nt_count() + 1));
    REQUIRE(cyk_oracle(a, {}));
    REQUIRE(!cyk_oracle(a, {0}));

    CnfGrammar d = dyck1_cnf();
    CnfGrammar ad = augment_cnf(d);
    for (int len = 0; len <= 6; ++len) {
        std::function<void(Word&)> go = [&](Word& w) {
            if (static_cast<int>(w.size()) == len) {
                REQUIRE(cyk_oracle(d, w) == cyk_oracle(ad, w));
                return;
            }
            for (int s = 0; s < 2; ++s) {
                w.push_back(s);
                go(w);
                w.pop_back();
            }
        };
        Word w;
        go(w);
    }
}

TEST_CASE("cyk oracle basics") {
    CnfGrammar d = dyck1_cnf();
    REQUIRE(cyk_oracle(d, {}));
    REQUIRE(cyk_oracle(d, {0, 0, 1, 1}));   // (())
    REQUIRE(!cyk_oracle(d, {0, 0, 1}));     // (()
    REQUIRE(cyk_oracle(d, {0, 1, 0, 1}));   // ()()
}

TEST_CASE("cyk agrees with derivation enumeration on random grammars") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 25; ++rep) {
        CnfGrammar g = random_cnf(rng);
        auto words = enumerate_words(g, 8, 4);
        // enumerated words are derivable; check CYK accepts them and spot
        // negatives
        for (const auto& w : words) REQUIRE(cyk_oracle(g, w));
        for (int probe = 0; probe < 20; ++probe) {
            Word w;
            int len = static_cast<int>(rng() % 4);
            for (int i = 0; i < len; ++i)
                w.push_back(static_cast<int>(rng() % g.terminals.size()));
            if (!cyk_oracle(g, w)) REQUIRE(words.count(w) == 0);
        }
    }
}

TEST_CASE("compile_cfl D1 traces and epsilon acceptance") {
    CnfGrammar g = augment_cnf(dyck1_cnf());
    DynamicProgram p = compile_cfl(g);
    REQUIRE(check_tier(p) == Tier::FO);
    REQUIRE(run_program(p, 4, {ConcreteUpdate::ins(0, 1), ConcreteUpdate::ins(1, 2)}) ==
            std::vector<bool>{false, true});
    // [ins_a(3), reset(3)]: after the reset the word is empty, S =>* eps
    auto t = run_program(p, 4, {ConcreteUpdate::ins(0, 3), ConcreteUpdate::reset(3)});
    REQUIRE(t == std::vector<bool>{false, true});
}

TEST_CASE("compile_cfl anbn") {
    CnfGrammar g = augment_cnf(anbn_cnf());
    DynamicProgram p = compile_cfl(g);
    // build "aabb" out of order on n=6
    UpdateSequence seq = {ConcreteUpdate::ins(1, 5), ConcreteUpdate::ins(0, 1),
                          ConcreteUpdate::ins(1, 6), ConcreteUpdate::ins(0, 3)};
    Runner r(p, 6);
    Structure s = new_empty_word_structure(p.alphabet, 6);
    for (const auto& u : seq) {
        bool got = r.step(u);
        apply_input_update(s, u);
        REQUIRE(got == cyk_oracle(g, word_of(s)));
    }
    REQUIRE(r.st.accept());
}

TEST_CASE("compile_cfl differential with splice spot-check") {
    std::mt19937_64 rng(99);
    int grammars = 0;
    while (grammars < 6) {
        CnfGrammar g0 = random_cnf(rng);
        CnfGrammar g = augment_cnf(g0);
        DynamicProgram p = compile_cfl(g);
        ++grammars;
        int V = g.nt_count();
        for (int c = 0; c < 4; ++c) {
            int n = 1 + static_cast<int>(rng() % 5);
            auto seq = random_word_sequence(rng, n, g.terminals.size(), 10);
            Runner r(p, n);
            Structure s = new_empty_word_structure(p.alphabet, n);
            for (const auto& u : seq) {
                bool got = r.step(u);
                apply_input_update(s, u);
                REQUIRE(got == cyk_oracle(g, word_of(s)));
            }
            // R_{X,E} splice semantics on the final state
            if (!r.st.rel[p.schema->find("I0")].get(0)) continue;
            for (int X = 0; X < V; ++X) {
                int sym = p.schema->find("R_" + g.nonterminals[X] + "_" +
                                         g.nonterminals[g.eps_nt]);
                for (Element i1 = 1; i1 <= n; ++i1)
                    for (Element i2 = 1; i2 <= n; ++i2)
                        for (Element j1 = 1; j1 <= n; ++j1)
                            for (Element j2 = 1; j2 <= n; ++j2) {
                                Element t[4] = {i1, i2, j1, j2};
                                bool maintained = r.st.rel[sym].get_tuple(t);
                                bool proper = i1 <= j1 && j1 <= j2 && j2 <= i2;
                                if (!proper) {
                                    REQUIRE(!maintained);
                                    continue;
                                }
                                std::vector<SentItem> items;
                                for (Element q = i1; q <= j1 - 1; ++q)
                                    if (s.label(q) >= 0) items.push_back({false, s.label(q)});
                                for (Element q = j2 + 1; q <= i2; ++q)
                                    if (s.label(q) >= 0) items.push_back({false, s.label(q)});
                                REQUIRE(maintained == cnf_derives(g, X, items));
                            }
            }
        }
    }
}
