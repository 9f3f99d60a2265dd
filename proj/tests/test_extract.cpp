#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dynlang/extract.hpp"

using namespace dynlang;

namespace {

Dfa random_dfa(std::mt19937_64& rng, int max_states) {
    Dfa d;
    d.states = 1 + static_cast<int>(rng() % max_states);
    d.alphabet = Alphabet{"a", "b"};
    d.start = static_cast<int>(rng() % d.states);
    d.delta.assign(d.states, std::vector<int>(2));
    d.accepting.assign(d.states, false);
    for (int q = 0; q < d.states; ++q) {
        d.accepting[q] = rng() % 2;
        for (int s = 0; s < 2; ++s) d.delta[q][s] = static_cast<int>(rng() % d.states);
    }
    return d;
}

}  // namespace

TEST_CASE("compute_type sees the initialized R_{p,p} atoms") {
    DynamicProgram p = compile_regular_with_init(example_reg_dfa());
    ProgramState st = initial_state(p, 5);
    KType t = compute_type(st, {1, 2});
    // flipping one diagonal atom must change the type
    ProgramState st2 = st;
    int r00 = p.schema->find("R_0_0");
    Element args[2] = {1, 2};
    REQUIRE(st2.rel[r00].get_tuple(args));
    st2.rel[r00].set_tuple(args, false);
    REQUIRE(!(compute_type(st2, {1, 2}) == t));
}

TEST_CASE("all-negative unary type plus accept atom") {
    DynamicProgram p = example_reg_program();
    ProgramState st = initial_state(p, 4);
    KType t1 = compute_type(st, {2});
    KType t2 = compute_type(st, {3});
    REQUIRE(t1 == t2);  // nothing distinguishes empty positions
    REQUIRE(!t1.accept);
}

TEST_CASE("indiscernibility of the untouched suffix") {
    DynamicProgram p = compile_regular(example_reg_dfa());
    Runner r(p, 8);
    r.step(ConcreteUpdate::ins(0, 1));
    r.step(ConcreteUpdate::ins(1, 2));
    std::vector<Element> suffix = {3, 4, 5, 6, 7, 8};
    REQUIRE(check_indiscernible(r.st, suffix, 2));

    // vacuous: |I| == l, a single tuple
    REQUIRE(check_indiscernible(r.st, {3, 4}, 2));

    // planting one asymmetric atom breaks it
    int A = p.schema->find("R_0_1");
    Element t[2] = {4, 6};
    r.st.rel[A].set_tuple(t, true);
    REQUIRE(!check_indiscernible(r.st, suffix, 2));
}

TEST_CASE("always-accept program extracts to an all-accepting automaton") {
    DynamicProgram p;
    p.set_word_alphabet(Alphabet{"a", "b"});
    p.schema = make_schema(p.input_vocab);
    int acc = p.schema->add_accept();
    for (int s = 0; s < 2; ++s) p.set_rel_update(AbsUpdate::ins(s), acc, tru());
    p.set_rel_update(AbsUpdate::reset(), acc, tru());
    p.validate();

    Dfa d = extract_dfa(p, 1, 16);
    Word w;
    std::function<void(int)> go = [&](int rem) {
        REQUIRE(d.accepts(w));
        if (rem == 0) return;
        for (int s = 0; s < 2; ++s) {
            w.push_back(s);
            go(rem - 1);
            w.pop_back();
        }
    };
    go(4);
}

TEST_CASE("example_reg extraction is language-equal to the 2-state DFA") {
    DynamicProgram p = example_reg_program();
    Dfa d = extract_dfa(p, max_aux_arity(p), 40);
    REQUIRE(agree_on_words(d, example_reg_dfa(), 6));
}

TEST_CASE("round-trip: extract(compile(A)) agrees with A on short words") {
    std::mt19937_64 rng(123);
    for (int rep = 0; rep < 12; ++rep) {
        Dfa a = random_dfa(rng, 3);
        DynamicProgram p = compile_regular(a);
        ExtractionResult r = extract_dfa_checked(p, max_aux_arity(p), 60);
        REQUIRE(r.closed);
        REQUIRE(r.diagnostic.empty());
        REQUIRE(r.indiscernibility_ok);
        REQUIRE(agree_on_words(r.dfa, a, 6));
    }
}

TEST_CASE("extraction rejects unsuitable programs") {
    // FO-tier program
    DynamicProgram p;
    p.set_word_alphabet(Alphabet{"a"});
    p.schema = make_schema(p.input_vocab);
    int acc = p.schema->add_accept();
    p.set_rel_update(AbsUpdate::ins(0), acc,
                     exists(var_id("u1"), rel(*p.schema, 0, {var("u1")})));
    p.validate();
    REQUIRE_THROWS_AS(extract_dfa(p, 1, 10), Error);

    // precomputed program
    DynamicProgram m = middle_program();
    REQUIRE_THROWS_AS(extract_dfa(m, 1, 10), Error);
}
