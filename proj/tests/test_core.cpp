#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dynlang/core.hpp"

using namespace dynlang;

TEST_CASE("empty structures") {
    Alphabet ab{"a", "b"};
    Structure s = new_empty_word_structure(ab, 4);
    REQUIRE(s.rels[0].count() == 0);
    REQUIRE(s.rels[1].count() == 0);
    REQUIRE(word_of(s).empty());

    Structure s7 = new_empty_word_structure(ab, 7);
    REQUIRE(word_of(s7).empty());

    Vocabulary g;
    g.add("E", 2);
    Structure gs = new_empty_structure(g, 3);
    REQUIRE(gs.rels[0].count() == 0);

    REQUIRE_THROWS_AS(new_empty_structure(g, 0), Error);
}

TEST_CASE("insert overwrites and reset clears") {
    Alphabet ab{"a", "b"};
    Structure s = new_empty_word_structure(ab, 3);

    apply_input_update(s, ConcreteUpdate::ins(0, 2));  // ins_a(2)
    Element two = 2;
    REQUIRE(s.rels[0].get_tuple(&two));
    REQUIRE(word_of(s) == Word{0});

    // overwrite: ins_b(2) then ins_a(2) leaves only R_a at 2
    apply_input_update(s, ConcreteUpdate::ins(1, 2));
    apply_input_update(s, ConcreteUpdate::ins(0, 2));
    REQUIRE(s.rels[0].get_tuple(&two));
    REQUIRE(!s.rels[1].get_tuple(&two));

    apply_input_update(s, ConcreteUpdate::reset(2));
    REQUIRE(s.rels[0].count() == 0);
    REQUIRE(s.rels[1].count() == 0);
}

TEST_CASE("out-of-range updates are rejected with position and size") {
    Alphabet ab{"a"};
    Structure s = new_empty_word_structure(ab, 4);
    try {
        apply_input_update(s, ConcreteUpdate::ins(0, 9));
        FAIL("expected applicability error");
    } catch (const Error& e) {
        std::string msg = e.what();
        REQUIRE(msg.find("9") != std::string::npos);
        REQUIRE(msg.find("4") != std::string::npos);
    }
}

TEST_CASE("word_of orders labels by position") {
    Alphabet ab{"a", "b"};
    Structure s = new_empty_word_structure(ab, 5);
    apply_input_update(s, ConcreteUpdate::ins(0, 4));
    apply_input_update(s, ConcreteUpdate::ins(1, 1));
    REQUIRE(word_of(s) == Word{1, 0});  // "ba"

    Structure t = new_empty_word_structure(ab, 3);
    for (Element i = 1; i <= 3; ++i) apply_input_update(t, ConcreteUpdate::ins(0, i));
    REQUIRE(word_of(t) == Word{0, 0, 0});
}

TEST_CASE("general tuple updates") {
    Vocabulary g;
    g.add("E", 2);
    Structure s = new_empty_structure(g, 3);
    apply_input_update(s, ConcreteUpdate::ins_tuple(0, {1, 2}));
    Element t[2] = {1, 2};
    REQUIRE(s.rels[0].get_tuple(t));
    apply_input_update(s, ConcreteUpdate::del_tuple(0, {1, 2}));
    REQUIRE(!s.rels[0].get_tuple(t));
}

TEST_CASE("replay determinism and single-label invariant") {
    Alphabet ab{"a", "b", "c"};
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        int n = 1 + static_cast<int>(rng() % 8);
        UpdateSequence seq;
        for (int i = 0; i < 25; ++i) {
            Element pos = 1 + static_cast<Element>(rng() % n);
            if (rng() % 4 == 0) seq.push_back(ConcreteUpdate::reset(pos));
            else seq.push_back(ConcreteUpdate::ins(static_cast<int>(rng() % 3), pos));
        }
        Structure s1 = new_empty_word_structure(ab, n);
        Structure s2 = new_empty_word_structure(ab, n);
        for (const auto& u : seq) {
            apply_input_update(s1, u);
            // at most one label per position after any update
            for (Element p = 1; p <= n; ++p) {
                int labels = 0;
                for (int sym = 0; sym < 3; ++sym)
                    if (s1.rels[sym].get_tuple(&p)) ++labels;
                REQUIRE(labels <= 1);
            }
        }
        for (const auto& u : seq) apply_input_update(s2, u);
        for (int sym = 0; sym < 3; ++sym) REQUIRE(s1.rels[sym] == s2.rels[sym]);
    }
}

TEST_CASE("left-to-right insertion writes the word") {
    Alphabet ab{"a", "b"};
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 30; ++rep) {
        int n = 1 + static_cast<int>(rng() % 9);
        int len = static_cast<int>(rng() % (n + 1));
        Word w;
        Structure s = new_empty_word_structure(ab, n);
        for (int i = 0; i < len; ++i) {
            int sym = static_cast<int>(rng() % 2);
            w.push_back(sym);
            apply_input_update(s, ConcreteUpdate::ins(sym, i + 1));
        }
        REQUIRE(word_of(s) == w);
    }
}
