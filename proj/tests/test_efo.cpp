#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dynlang/efo.hpp"

using namespace dynlang;

namespace {

Vocabulary eu_vocab() {
    Vocabulary v;
    v.add("E", 2);
    v.add("U", 1);
    return v;
}

// all-at-once recomputation of every f^I_tau against the maintained tables
void audit_counts(const EfoProgram& ep, const ProgramState& st, const Structure& s) {
    for (size_t ti = 0; ti < ep.types.size(); ++ti) {
        const DisjointType& tau = ep.types[ti];
        int ell = tau.ell;
        for (uint32_t imask = 0; imask < (uint32_t(1) << ell); ++imask) {
            std::vector<int> I;
            for (int b = 0; b < ell; ++b)
                if (imask & (1u << b)) I.push_back(b + 1);
            int isz = static_cast<int>(I.size());
            uint64_t tuples = RelTable::pow_count(st.n, isz);
            std::vector<Element> xs(isz, 1);
            for (uint64_t idx = 0; idx < tuples; ++idx) {
                int64_t expect = type_count_oracle(s, tau, I, xs);
                int64_t got = ep.decode(st, static_cast<int>(ti), imask, xs);
                REQUIRE(got == expect);
                for (int j = isz - 1; j >= 0; --j) {
                    if (++xs[j] <= st.n) break;
                    xs[j] = 1;
                }
            }
        }
    }
}

ConcreteUpdate random_efo_update(std::mt19937_64& rng, const Vocabulary& v, int n) {
    int r = static_cast<int>(rng() % v.size());
    std::vector<Element> args;
    for (int i = 0; i < v.arity(r); ++i) args.push_back(1 + static_cast<Element>(rng() % n));
    return rng() % 2 ? ConcreteUpdate::ins_tuple(r, args) : ConcreteUpdate::del_tuple(r, args);
}

}  // namespace

TEST_CASE("parse_efo") {
    auto pr = parse_efo("exists x y : E(x,y) & !E(y,x)");
    REQUIRE(pr.sentence.k == 2);
    REQUIRE(pr.vocab.find("E") == 0);
    REQUIRE(pr.vocab.arity(0) == 2);
    REQUIRE_THROWS_AS(parse_efo("exists : true"), Error);
    REQUIRE_THROWS_AS(parse_efo("forall x : E(x,x)"), Error);
}

TEST_CASE("types_of_sentence") {
    Vocabulary v;
    v.add("E", 2);
    // exists x y E(x,y): the reflexive 1-type and every 2-type with E(1,2)
    // or E(2,1) positive
    auto pr = parse_efo("exists x y : E(x,y)", v);
    auto theta = types_of_sentence(pr.sentence, v);
    int count1 = 0, count2 = 0;
    for (const auto& t : theta) {
        if (t.ell == 1) {
            ++count1;
            REQUIRE(t.atoms[0] == 1);  // E(1,1)
        } else {
            ++count2;
            efo_detail::AtomLayout lay(v, 2);
            bool e12 = t.atoms[lay.index(0, {1, 2})];
            bool e21 = t.atoms[lay.index(0, {2, 1})];
            REQUIRE((e12 || e21));
        }
    }
    REQUIRE(count1 == 1);
    REQUIRE(count2 == 12);  // 16 2-types minus the 4 with both cross atoms negative

    // exists x true: every 1-type
    auto pr2 = parse_efo("exists x : true", v);
    auto theta2 = types_of_sentence(pr2.sentence, v);
    REQUIRE(theta2.size() == 2);  // E(1,1) positive or negative

    // unsatisfiable matrix
    auto pr3 = parse_efo("exists x : E(x,x) & !E(x,x)", v);
    REQUIRE(types_of_sentence(pr3.sentence, v).empty());
}

TEST_CASE("efo_oracle basics") {
    Vocabulary v;
    v.add("E", 2);
    auto pr = parse_efo("exists x y : E(x,y)", v);
    Structure s = new_empty_structure(v, 3);
    REQUIRE(!efo_oracle(s, pr.sentence));
    apply_input_update(s, ConcreteUpdate::ins_tuple(0, {2, 2}));
    REQUIRE(efo_oracle(s, pr.sentence));  // x = y = 2 allowed
}

TEST_CASE("compiled EFO: insert then delete") {
    Vocabulary v;
    v.add("E", 2);
    auto pr = parse_efo("exists x y : E(x,y)", v);
    EfoProgram ep = compile_efo(pr.sentence, v);
    REQUIRE(check_tier(ep.prog) == Tier::QF);
    auto trace = run_program(ep.prog, 3,
                             {ConcreteUpdate::ins_tuple(0, {1, 2}),
                              ConcreteUpdate::del_tuple(0, {1, 2})});
    REQUIRE(trace == std::vector<bool>{true, false});

    // count check: after ins_E(1,2) on n=3 the 2-type {E(1,2)} has one tuple
    Runner r(ep.prog, 3);
    r.step(ConcreteUpdate::ins_tuple(0, {1, 2}));
    efo_detail::AtomLayout lay(v, 2);
    DisjointType tau;
    tau.ell = 2;
    tau.atoms.assign(lay.total, 0);
    tau.atoms[lay.index(0, {1, 2})] = 1;
    REQUIRE(ep.decode(r.st, ep.type_index(tau), 0, {}) == 1);
}

TEST_CASE("initial all-negative counts and conservation") {
    Vocabulary v = eu_vocab();
    auto pr = parse_efo("exists x y : E(x,y)", v);
    EfoProgram ep = compile_efo(pr.sentence, v);
    ProgramState st = initial_state(ep.prog, 4);
    // tau_neg for ell=2: n(n-1) = 12
    DisjointType tneg;
    tneg.ell = 2;
    tneg.atoms.assign(efo_detail::AtomLayout(v, 2).total, 0);
    REQUIRE(ep.decode(st, ep.type_index(tneg), 0, {}) == 12);
    // I = {1}: (n - 1) = 3 per anchor
    REQUIRE(ep.decode(st, ep.type_index(tneg), 1, {3}) == 3);
    // positive types start at zero
    DisjointType tpos = tneg;
    tpos.atoms[0] = 1;
    REQUIRE(ep.decode(st, ep.type_index(tpos), 0, {}) == 0);
}

TEST_CASE("digit arithmetic is exact on [0, n^2)") {
    // exhaustively check the compiled add/sub chains through decode:
    // simulate by driving a 1-rel program and reading conservation instead;
    // here: direct table check of plusfun/minfun carries
    Vocabulary v;
    v.add("E", 2);
    auto pr = parse_efo("exists x y : E(x,y)", v);
    EfoProgram ep = compile_efo(pr.sentence, v);
    for (int n = 1; n <= 4; ++n) {
        ProgramState st = initial_state(ep.prog, n);
        const Schema& sch = *ep.prog.schema;
        int plusfun = sch.find("plusfun"), minfun = sch.find("minfun");
        int rplus = sch.find("Rplus"), rminus = sch.find("Rminus");
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                uint64_t idx = static_cast<uint64_t>(a) * n + b;
                REQUIRE(st.fun[plusfun][idx] - 1 == (a + b) % n);
                REQUIRE(st.rel[rplus].get(idx) == (a + b >= n));
                REQUIRE(st.fun[minfun][idx] - 1 == ((a - b) % n + n) % n);
                REQUIRE(st.rel[rminus].get(idx) == (a - b < 0));
            }
    }
}

TEST_CASE("master contract on random sequences") {
    Vocabulary v = eu_vocab();
    std::vector<std::string> sentences = {
        "exists x y : E(x,y)",
        "exists x y : E(x,y) & !E(y,x)",
        "exists x y : U(x) & E(x,y) | E(y,y)",
        "exists x : U(x) & E(x,x)",
    };
    std::mt19937_64 rng(17);
    for (const auto& txt : sentences) {
        auto pr = parse_efo(txt, v);
        EfoProgram ep = compile_efo(pr.sentence, v);
        for (int c = 0; c < 4; ++c) {
            int n = 2 + static_cast<int>(rng() % 4);
            Runner r(ep.prog, n);
            Structure s = new_empty_structure(v, n);
            for (int i = 0; i < 12; ++i) {
                ConcreteUpdate u = random_efo_update(rng, v, n);
                bool got = r.step(u);
                apply_input_update(s, u);
                REQUIRE(got == efo_oracle(s, pr.sentence));
                audit_counts(ep, r.st, s);
                // conservation per width
                for (int ell = 1; ell <= pr.sentence.k; ++ell) {
                    int64_t sum = 0;
                    for (size_t ti = 0; ti < ep.types.size(); ++ti)
                        if (ep.types[ti].ell == ell)
                            sum += ep.decode(r.st, static_cast<int>(ti), 0, {});
                    int64_t expect = 1;
                    for (int j = 0; j < ell; ++j) expect *= (n - j);
                    REQUIRE(sum == expect);
                }
            }
        }
    }
}
