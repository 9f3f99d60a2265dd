#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dynlang/trees.hpp"

using namespace dynlang;

namespace {

TreeAutomaton all_a_automaton() {
    TreeAutomaton a;
    a.states = 1;
    a.alphabet = Alphabet{"a"};
    a.initial = {0};
    a.delta = {{{0}}};
    a.accepting = {true};
    return a;
}

TreeAutomaton random_automaton(std::mt19937_64& rng) {
    TreeAutomaton a;
    a.states = 1 + static_cast<int>(rng() % 3);
    int alpha = 1 + static_cast<int>(rng() % 2);
    a.alphabet = Alphabet(alpha == 1 ? std::vector<std::string>{"a"}
                                     : std::vector<std::string>{"a", "b"});
    for (int s = 0; s < alpha; ++s) a.initial.push_back(static_cast<int>(rng() % a.states));
    a.delta.assign(a.states, std::vector<std::vector<int>>(
                                 a.states, std::vector<int>(alpha)));
    for (int q1 = 0; q1 < a.states; ++q1)
        for (int q2 = 0; q2 < a.states; ++q2)
            for (int s = 0; s < alpha; ++s)
                a.delta[q1][q2][s] = static_cast<int>(rng() % a.states);
    a.accepting.assign(a.states, false);
    for (int q = 0; q < a.states; ++q) a.accepting[q] = rng() % 2;
    return a;
}

std::vector<int> labels_of(const ProgramState& st) {
    std::vector<int> labels(st.n + 1, -1);
    for (Element u = 1; u <= st.n; ++u) labels[u] = st.label(u);
    return labels;
}

}  // namespace

TEST_CASE("tree universe heap arithmetic") {
    TreeUniverse t3(3);
    REQUIRE(t3.parent(2) == 1);
    REQUIRE(t3.parent(3) == 1);
    REQUIRE(t3.lca(2, 3) == 1);

    TreeUniverse t1(1);
    REQUIRE(t1.parent(1) == 1);
    REQUIRE(t1.lchild(1) == 1);

    TreeUniverse t7(7);
    REQUIRE(t7.anc(1, 7));
    REQUIRE(!t7.anc(2, 7));
    REQUIRE(t7.lca(4, 5) == 2);
    REQUIRE(t7.lca(4, 6) == 1);
}

TEST_CASE("tree oracle") {
    TreeAutomaton a = all_a_automaton();
    TreeUniverse t(3);
    std::vector<int> labels(4, -1);
    REQUIRE(!tree_oracle(t, labels, a));  // unlabeled root
    labels[1] = 0;
    REQUIRE(tree_oracle(t, labels, a));   // single labeled root is a leaf
    labels[2] = 0;
    REQUIRE(!tree_oracle(t, labels, a));  // exactly one labeled child: no run
    labels[3] = 0;
    REQUIRE(tree_oracle(t, labels, a));
}

TEST_CASE("compiled all-a traces") {
    TreeAutomaton a = all_a_automaton();
    DynamicProgram p = compile_tree(a);
    REQUIRE(check_tier(p) == Tier::QF);  // quantifier-free with precomputed functions

    REQUIRE(run_program(p, 3, {ConcreteUpdate::ins(0, 1)}) == std::vector<bool>{true});
    REQUIRE(run_program(p, 3, {ConcreteUpdate::ins(0, 1), ConcreteUpdate::ins(0, 2)}) ==
            std::vector<bool>{true, false});
    REQUIRE(run_program(p, 3,
                        {ConcreteUpdate::ins(0, 1), ConcreteUpdate::ins(0, 2),
                         ConcreteUpdate::ins(0, 3)}) ==
            std::vector<bool>{true, false, true});
}

TEST_CASE("tree differential with con and R_q coherence") {
    std::mt19937_64 rng(5150);
    for (int rep = 0; rep < 12; ++rep) {
        TreeAutomaton a = random_automaton(rng);
        DynamicProgram p = compile_tree(a);
        const Schema& sch = *p.schema;
        int CON = sch.find("con");
        int I0 = sch.find("I0");
        for (int nsel = 0; nsel < 2; ++nsel) {
            int n = std::vector<int>{1, 3, 7, 15}[rng() % 4];
            TreeUniverse t(n);
            Runner r(p, n);
            for (int i = 0; i < 18; ++i) {
                Element node = 1 + static_cast<Element>(rng() % n);
                ConcreteUpdate u =
                    rng() % 4 == 0
                        ? ConcreteUpdate::reset(node)
                        : ConcreteUpdate::ins(static_cast<int>(rng() % a.alphabet.size()),
                                              node);
                bool got = r.step(u);
                std::vector<int> labels = labels_of(r.st);
                REQUIRE(got == tree_oracle(t, labels, a));

                if (n > 7 || !r.st.rel[I0].get(0)) continue;
                // con coherence: path to y (exclusive) fully labeled
                for (Element x = 1; x <= n; ++x)
                    for (Element y = 1; y <= n; ++y) {
                        bool expect = false;
                        if (x == y || t.anc(x, y)) {
                            expect = true;
                            for (Element w = y; w != x;) {
                                w = t.parent(w);
                                if (labels[w] < 0) { expect = false; break; }
                            }
                        }
                        Element tup[2] = {x, y};
                        REQUIRE(r.st.rel[CON].get_tuple(tup) == expect);
                    }
                // R_q coherence: run of subtree^x to q
                for (int q = 0; q < a.states; ++q) {
                    int Rq = sch.find("Rq_" + std::to_string(q));
                    for (Element x = 1; x <= n; ++x) {
                        int state = tree_detail::run_state(t, labels, a, x);
                        REQUIRE(r.st.rel[Rq].get_tuple(&x) == (state == q));
                    }
                }
            }
        }
    }
}
