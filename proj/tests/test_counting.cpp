#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dynlang/counting.hpp"

using namespace dynlang;

namespace {

UpdateSequence random_sequence(std::mt19937_64& rng, int n, int alpha, int len) {
    UpdateSequence seq;
    for (int i = 0; i < len; ++i) {
        Element pos = 1 + static_cast<Element>(rng() % n);
        if (rng() % 4 == 0) seq.push_back(ConcreteUpdate::reset(pos));
        else seq.push_back(ConcreteUpdate::ins(static_cast<int>(rng() % alpha), pos));
    }
    return seq;
}

void check_all_counter_blocks(const ProgramState& st, int r) {
    const Schema& sch = st.schema();
    for (int b = 2; b <= r; ++b) {
        std::string suf = std::to_string(b);
        REQUIRE(check_counter_invariants(st, sch.find("A1_" + suf), sch.find("A2_" + suf),
                                         sch.find("C_" + suf)));
    }
}

}  // namespace

TEST_CASE("count_oracle basics") {
    REQUIRE(count_oracle({}, 2));
    REQUIRE(!count_oracle({0, 1, 0}, 2));
    REQUIRE(count_oracle({0, 1, 2}, 3));
}

TEST_CASE("eqr succ-version paper examples") {
    DynamicProgram p = eqr_program_succ(2);
    REQUIRE(check_tier(p) == Tier::PropSucc);
    REQUIRE(run_program(p, 5, {ConcreteUpdate::ins(0, 2), ConcreteUpdate::ins(1, 4)}) ==
            std::vector<bool>{false, true});
    REQUIRE(run_program(p, 5, {ConcreteUpdate::ins(0, 2), ConcreteUpdate::reset(2)}) ==
            std::vector<bool>{false, true});
}

TEST_CASE("eqr r=3 scattered insertions") {
    DynamicProgram p = eqr_program_succ(3);
    UpdateSequence seq = {ConcreteUpdate::ins(0, 5), ConcreteUpdate::ins(1, 2),
                          ConcreteUpdate::ins(2, 6)};
    Runner r(p, 6);
    Structure s = new_empty_word_structure(p.alphabet, 6);
    std::vector<bool> trace;
    for (const auto& u : seq) {
        trace.push_back(r.step(u));
        apply_input_update(s, u);
        REQUIRE(trace.back() == count_oracle(word_of(s), 3));
    }
    REQUIRE(trace.back());
}

TEST_CASE("eqr differential against the count oracle, both variants") {
    std::mt19937_64 rng(99);
    for (int r = 2; r <= 3; ++r) {
        DynamicProgram ps = eqr_program_succ(r);
        DynamicProgram pq = eqr_program_qf(r);
        REQUIRE(check_tier(pq) == Tier::QF);
        for (int c = 0; c < 30; ++c) {
            int n = 1 + static_cast<int>(rng() % 8);
            auto seq = random_sequence(rng, n, r, 25);
            Runner rs(ps, n), rq(pq, n);
            Structure s = new_empty_word_structure(ps.alphabet, n);
            for (const auto& u : seq) {
                bool bs = rs.step(u);
                bool bq = rq.step(u);
                apply_input_update(s, u);
                bool expect = count_oracle(word_of(s), r);
                REQUIRE(bs == expect);
                REQUIRE(bq == expect);
                check_all_counter_blocks(rs.st, r);
                check_all_counter_blocks(rq.st, r);
            }
        }
    }
}

TEST_CASE("overwrite normalization: a1 then a2 at the same position") {
    DynamicProgram p = eqr_program_succ(2);
    // word becomes "a2" only: counts 1/0 swapped -> reject
    REQUIRE(run_program(p, 4, {ConcreteUpdate::ins(0, 2), ConcreteUpdate::ins(1, 2)}) ==
            std::vector<bool>{false, false});
}

TEST_CASE("succ builder chain semantics") {
    // drive the block alone inside a minimal program
    DynamicProgram p;
    p.set_word_alphabet(Alphabet{"a"});
    p.schema = make_schema(p.input_vocab);
    int acc = p.schema->add_accept();
    SuccBlock block = SuccBlock::add_to(*p.schema);
    AbsUpdate u = AbsUpdate::ins(0);
    p.set_rel_update(u, acc, fls());
    block.set_updates(p, u);
    p.validate();

    Runner r(p, 8);
    r.step(ConcreteUpdate::ins(0, 5));
    REQUIRE(check_succ_chain(r.st, block));
    REQUIRE(r.st.fun[block.cmin][0] == 5);
    REQUIRE(r.st.fun[block.cmax][0] == 5);
    REQUIRE(r.st.fun[block.csucc][4] == 5);  // succ(5)=5
    REQUIRE(r.st.fun[block.cpre][4] == 5);   // pre(5)=5

    r.step(ConcreteUpdate::ins(0, 2));
    r.step(ConcreteUpdate::ins(0, 7));
    REQUIRE(check_succ_chain(r.st, block));
    REQUIRE(r.st.fun[block.cmin][0] == 5);
    REQUIRE(r.st.fun[block.cmax][0] == 7);
    REQUIRE(r.st.fun[block.csucc][4] == 2);
    REQUIRE(r.st.fun[block.csucc][1] == 7);
    REQUIRE(chain_rank(r.st, block, 5) == 0);
    REQUIRE(chain_rank(r.st, block, 2) == 1);
    REQUIRE(chain_rank(r.st, block, 7) == 2);

    // re-touch leaves the chain unchanged, actdom too
    ProgramState before = r.st;
    r.step(ConcreteUpdate::ins(0, 2));
    REQUIRE(r.st.rel[block.actdom] == before.rel[block.actdom]);
    REQUIRE(r.st.fun[block.csucc] == before.fun[block.csucc]);
    REQUIRE(r.st.fun[block.cmax][0] == 7);

    // fresh touch grows actdom by exactly one
    uint64_t active = r.st.rel[block.actdom].count();
    r.step(ConcreteUpdate::ins(0, 1));
    REQUIRE(r.st.rel[block.actdom].count() == active + 1);
    REQUIRE(check_succ_chain(r.st, block));
}

TEST_CASE("counter ceiling: C stays within the touched ranks") {
    DynamicProgram p = eqr_program_qf(2);
    const Schema& sch = *p.schema;
    SuccBlock block;
    block.actdom = sch.find("actdom");
    block.touched = sch.find("touched");
    block.cmin = sch.find("cmin");
    block.cmax = sch.find("cmax");
    block.csucc = sch.find("csucc");
    block.cpre = sch.find("cpre");
    block.sch = &sch;
    int C = sch.find("C_2");

    std::mt19937_64 rng(17);
    for (int c = 0; c < 20; ++c) {
        int n = 2 + static_cast<int>(rng() % 7);
        Runner r(p, n);
        int touched_count = 0;
        std::vector<bool> touched(n + 1, false);
        auto seq = random_sequence(rng, n, 2, 20);
        for (const auto& u : seq) {
            r.step(u);
            if (u.kind == ConcreteUpdate::Kind::InsSym && !touched[u.args[0]]) {
                touched[u.args[0]] = true;
                ++touched_count;
            }
            // reset on an untouched position is a no-op for the chain
            REQUIRE(check_succ_chain(r.st, block));
            for (Element e = 1; e <= n; ++e)
                if (r.st.rel[C].get_tuple(&e)) {
                    int rank = chain_rank(r.st, block, e);
                    REQUIRE(rank >= 0);
                    REQUIRE(rank < touched_count);
                }
        }
    }
}
