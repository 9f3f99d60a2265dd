#pragma once

// The two Dyck constructions: D_1 via level ringlists in DynProp(SetSucc,Rel)
// and D_n in DynQF via matching/excess functions over an on-the-fly number
// chain; plus the stack-scan bracket oracle and from-scratch coherence
// helpers used by the tests.

#include "counting.hpp"  // SuccBlock
#include "formula.hpp"

namespace dynlang {

// alphabet (1 )1 (2 )2 ... ; open_k = 2i, close_k = 2i+1
inline Alphabet bracket_alphabet(int kinds) {
    if (kinds < 1) throw Error("bracket alphabet needs at least one kind");
    std::vector<std::string> syms;
    for (int i = 1; i <= kinds; ++i) {
        syms.push_back("(" + std::to_string(i));
        syms.push_back(")" + std::to_string(i));
    }
    return Alphabet(syms);
}

inline bool is_open_bracket(int sym) { return sym % 2 == 0; }
inline int bracket_kind(int sym) { return sym / 2; }

// true iff w is balanced with matching kinds (stack scan)
inline bool bracket_oracle(const Word& w, int kinds) {
    std::vector<int> stack;
    for (int s : w) {
        if (s < 0 || s >= 2 * kinds) throw Error("bracket_oracle: symbol out of range");
        if (is_open_bracket(s)) {
            stack.push_back(bracket_kind(s));
        } else {
            if (stack.empty() || stack.back() != bracket_kind(s)) return false;
            stack.pop_back();
        }
    }
    return stack.empty();
}

// ------------------------------------------------------------------
// D_1: level ringlists, DynProp(SetSucc, Rel)
// ------------------------------------------------------------------

// level(p) = #opens - #closes in w[1..p]; every position (labeled or not)
// has a level. For each interval [i,j] and level l the program stores the
// position-ordered ringlist of the level-l slice, with emptiness flags,
// order-minimum/maximum relations, the j=n variants (Fmax), and the level of
// position n (Last).
namespace dyck1_detail {

struct Family {
    // symbol ids per family: 0-level, positive levels, negative levels
    int L0, Lp, Lm;
    int F0, Fp, Fm;
    int Fx0, Fxp, Fxm;
    int Mn0, Mnp, Mnm;
    int Mx0, Mxp, Mxm;
    int La0, Lap, Lam;
};

}  // namespace dyck1_detail

inline DynamicProgram dyck1_program() {
    DynamicProgram p;
    p.name = "dyck1";
    p.set_word_alphabet(bracket_alphabet(1));
    p.schema = make_schema(p.input_vocab);
    Schema& sch = *p.schema;
    int acc = sch.add_accept();
    sch.enable_setsucc();

    dyck1_detail::Family F;
    F.L0 = sch.add("L0", 4, SymKind::AuxRel);
    F.Lp = sch.add("Lp", 5, SymKind::AuxRel);
    F.Lm = sch.add("Lm", 5, SymKind::AuxRel);
    F.F0 = sch.add("F0", 2, SymKind::AuxRel);
    F.Fp = sch.add("Fp", 3, SymKind::AuxRel);
    F.Fm = sch.add("Fm", 3, SymKind::AuxRel);
    F.Fx0 = sch.add("Fx0", 1, SymKind::AuxRel);
    F.Fxp = sch.add("Fxp", 2, SymKind::AuxRel);
    F.Fxm = sch.add("Fxm", 2, SymKind::AuxRel);
    F.Mn0 = sch.add("Mn0", 3, SymKind::AuxRel);
    F.Mnp = sch.add("Mnp", 4, SymKind::AuxRel);
    F.Mnm = sch.add("Mnm", 4, SymKind::AuxRel);
    F.Mx0 = sch.add("Mx0", 3, SymKind::AuxRel);
    F.Mxp = sch.add("Mxp", 4, SymKind::AuxRel);
    F.Mxm = sch.add("Mxm", 4, SymKind::AuxRel);
    F.La0 = sch.add("La0", 0, SymKind::AuxRel);
    F.Lap = sch.add("Lap", 1, SymKind::AuxRel);
    F.Lam = sch.add("Lam", 1, SymKind::AuxRel);

    Term x = vy(0);
    Term minE = app(sch, sch.min_sym, {});
    auto succT = [&](Term t) { return app(sch, sch.succ_sym, {std::move(t)}); };
    auto preT = [&](Term t) { return app(sch, sch.pre_sym, {std::move(t)}); };

    // family selector: sign -1/0/+1, level term (nullptr for 0-family)
    struct Fam {
        int sign;
        Term level;  // null for sign 0
    };

    // source family for the shifted right part: level v - dir where v is the
    // target level; lvl is the target's level term for signed families
    // dir=+1: insert '(' / reset ')'; dir=-1: insert ')' / reset '('
    //
    // For a relation kind we need, per family, atom builders over
    // (i, j, [lvl], tail...). These close over the symbol trio.
    auto atom = [&](int sym0, int symp, int symm, const Fam& f, std::vector<Term> head,
                    std::vector<Term> tail) {
        std::vector<Term> args = std::move(head);
        if (f.sign != 0) args.push_back(f.level);
        for (auto& t : tail) args.push_back(std::move(t));
        return rel(sch, f.sign == 0 ? sym0 : (f.sign > 0 ? symp : symm), args);
    };

    // shifted source family of the target's level under direction dir, as a
    // case split (formula transformer): builds source-atom given maker
    // cb(Fam) -> Formula, plus the "level out of range" empty case.
    auto shifted = [&](const Fam& target, int dir,
                       const std::function<Formula(const Fam&)>& cb) -> Formula {
        if (target.sign == 0) {
            // source level -dir: dir=+1 -> level -1, dir=-1 -> level +1
            Fam src{-dir, minE};
            return cb(src);
        }
        Term l = target.level;
        if (target.sign == +1) {
            if (dir == +1) {
                // source level l-1: l=min -> 0-family, else (+, pre l)
                return bor(band(eq(l, minE), cb(Fam{0, nullptr})),
                           band(neq(l, minE), cb(Fam{+1, preT(l)})));
            }
            // dir=-1: source level l+1; succ(l)=l means level n+1: empty
            return band(neq(succT(l), l), cb(Fam{+1, succT(l)}));
        }
        // target.sign == -1, level -l
        if (dir == +1) {
            // source level -l-1
            return band(neq(succT(l), l), cb(Fam{-1, succT(l)}));
        }
        // dir=-1: source level -l+1: l=min -> 0-family, else (-, pre l)
        return bor(band(eq(l, minE), cb(Fam{0, nullptr})),
                   band(neq(l, minE), cb(Fam{-1, preT(l)})));
    };

    // per-family-and-direction update formulas for each relation kind
    // L(i,j,[l],a,b)
    auto build_L = [&](const Fam& f, int dir) -> Formula {
        Term i = vx(0), j = vx(1);
        int off = f.sign == 0 ? 2 : 3;
        Term a = vx(off), b = vx(off + 1);
        Formula self = atom(F.L0, F.Lp, F.Lm, f, {i, j}, {a, b});
        // levels are global prefix sums: an update at x <= i shifts the whole
        // interval, only x > j leaves it untouched
        Formula outside = lt(j, x);
        Formula whole = shifted(f, dir, [&](const Fam& s) {
            return atom(F.L0, F.Lp, F.Lm, s, {i, j}, {a, b});
        });
        // merge of left list (same family, [i, pre(x)]) with the shifted
        // right list ([x, j]); both-empty handled by the F-guards
        Formula leftL = atom(F.L0, F.Lp, F.Lm, f, {i, preT(x)}, {a, b});
        Formula leftF = atom(F.F0, F.Fp, F.Fm, f, {i, preT(x)}, {});
        Formula leftMn = atom(F.Mn0, F.Mnp, F.Mnm, f, {i, preT(x)}, {b});
        Formula leftMx = atom(F.Mx0, F.Mxp, F.Mxm, f, {i, preT(x)}, {a});
        Formula rightL = shifted(f, dir, [&](const Fam& s) {
            return atom(F.L0, F.Lp, F.Lm, s, {x, j}, {a, b});
        });
        Formula rightF = shifted(f, dir, [&](const Fam& s) {
            return atom(F.F0, F.Fp, F.Fm, s, {x, j}, {});
        });
        Formula rightMn = shifted(f, dir, [&](const Fam& s) {
            return atom(F.Mn0, F.Mnp, F.Mnm, s, {x, j}, {b});
        });
        Formula rightMx = shifted(f, dir, [&](const Fam& s) {
            return atom(F.Mx0, F.Mxp, F.Mxm, s, {x, j}, {a});
        });
        Formula merge =
            disj({band(band(leftF, rightF),
                       disj({band(band(lt(a, b), lt(b, x)), leftL),
                             band(band(lt(a, x), le(x, b)), band(leftMx, rightMn)),
                             band(band(le(x, a), lt(a, b)), rightL),
                             band(lt(b, a), band(rightMx, leftMn))})),
                  band(band(leftF, bnot(rightF)), leftL),
                  band(band(bnot(leftF), rightF), rightL)});
        return disj({band(outside, self), band(le(x, i), whole),
                     band(band(lt(i, x), le(x, j)), merge)});
    };

    auto build_F = [&](const Fam& f, int dir) -> Formula {
        Term i = vx(0), j = vx(1);
        Formula self = atom(F.F0, F.Fp, F.Fm, f, {i, j}, {});
        Formula outside = lt(j, x);
        Formula whole = shifted(f, dir, [&](const Fam& s) {
            return atom(F.F0, F.Fp, F.Fm, s, {i, j}, {});
        });
        Formula leftF = atom(F.F0, F.Fp, F.Fm, f, {i, preT(x)}, {});
        Formula rightF = shifted(f, dir, [&](const Fam& s) {
            return atom(F.F0, F.Fp, F.Fm, s, {x, j}, {});
        });
        return disj({band(outside, self), band(le(x, i), whole),
                     band(band(lt(i, x), le(x, j)), bor(leftF, rightF))});
    };

    // Fmax(i,[l]) = F(i, n); only the minimal constant is available, so the
    // right part is the Fmax of the source family at x
    auto build_Fx = [&](const Fam& f, int dir) -> Formula {
        Term i = vx(0);
        Formula self = atom(F.Fx0, F.Fxp, F.Fxm, f, {i}, {});
        Formula whole = shifted(f, dir, [&](const Fam& s) {
            return atom(F.Fx0, F.Fxp, F.Fxm, s, {i}, {});
        });
        Formula leftF = atom(F.F0, F.Fp, F.Fm, f, {i, preT(x)}, {});
        Formula rightFx = shifted(f, dir, [&](const Fam& s) {
            return atom(F.Fx0, F.Fxp, F.Fxm, s, {x}, {});
        });
        (void)self;
        return disj({band(le(x, i), whole), band(lt(i, x), bor(leftF, rightFx))});
    };

    auto build_Mn = [&](const Fam& f, int dir) -> Formula {
        Term i = vx(0), j = vx(1);
        int off = f.sign == 0 ? 2 : 3;
        Term k = vx(off);
        Formula self = atom(F.Mn0, F.Mnp, F.Mnm, f, {i, j}, {k});
        Formula outside = lt(j, x);
        Formula whole = shifted(f, dir, [&](const Fam& s) {
            return atom(F.Mn0, F.Mnp, F.Mnm, s, {i, j}, {k});
        });
        Formula leftF = atom(F.F0, F.Fp, F.Fm, f, {i, preT(x)}, {});
        Formula leftMn = atom(F.Mn0, F.Mnp, F.Mnm, f, {i, preT(x)}, {k});
        Formula rightMn = shifted(f, dir, [&](const Fam& s) {
            return atom(F.Mn0, F.Mnp, F.Mnm, s, {x, j}, {k});
        });
        Formula merge = bor(band(leftF, leftMn), band(bnot(leftF), rightMn));
        return disj({band(outside, self), band(le(x, i), whole),
                     band(band(lt(i, x), le(x, j)), merge)});
    };

    auto build_Mx = [&](const Fam& f, int dir) -> Formula {
        Term i = vx(0), j = vx(1);
        int off = f.sign == 0 ? 2 : 3;
        Term k = vx(off);
        Formula self = atom(F.Mx0, F.Mxp, F.Mxm, f, {i, j}, {k});
        Formula outside = lt(j, x);
        Formula whole = shifted(f, dir, [&](const Fam& s) {
            return atom(F.Mx0, F.Mxp, F.Mxm, s, {i, j}, {k});
        });
        Formula rightF = shifted(f, dir, [&](const Fam& s) {
            return atom(F.F0, F.Fp, F.Fm, s, {x, j}, {});
        });
        Formula leftMx = atom(F.Mx0, F.Mxp, F.Mxm, f, {i, preT(x)}, {k});
        Formula rightMx = shifted(f, dir, [&](const Fam& s) {
            return atom(F.Mx0, F.Mxp, F.Mxm, s, {x, j}, {k});
        });
        Formula merge = bor(band(rightF, rightMx), band(bnot(rightF), leftMx));
        return disj({band(outside, self), band(le(x, i), whole),
                     band(band(lt(i, x), le(x, j)), merge)});
    };

    // Last: the level of position n, shifted globally by dir
    auto build_La = [&](const Fam& f, int dir) -> Formula {
        if (f.sign == 0)
            return dir == +1 ? rel(sch, F.Lam, {minE}) : rel(sch, F.Lap, {minE});
        Term l = f.level;
        if (f.sign == +1) {
            if (dir == +1)
                return bor(band(eq(l, minE), rel(sch, F.La0, {})),
                           band(neq(l, minE), rel(sch, F.Lap, {preT(l)})));
            return band(neq(succT(l), l), rel(sch, F.Lap, {succT(l)}));
        }
        if (dir == +1) return band(neq(succT(l), l), rel(sch, F.Lam, {succT(l)}));
        return bor(band(eq(l, minE), rel(sch, F.La0, {})),
                   band(neq(l, minE), rel(sch, F.Lam, {preT(l)})));
    };

    auto set_family_updates = [&](const AbsUpdate& u, Formula dir_plus_guard,
                                  Formula dir_minus_guard) {
        // guards select the shift direction (for reset: by the old label)
        auto choose = [&](Formula plus, Formula minus) {
            return bor(band(dir_plus_guard, plus), band(dir_minus_guard, minus));
        };
        Term lvl = vx(2);
        Fam f0{0, nullptr}, fp{+1, lvl}, fm{-1, lvl};
        p.set_rel_update(u, F.L0, choose(build_L(f0, +1), build_L(f0, -1)));
        p.set_rel_update(u, F.Lp, choose(build_L(fp, +1), build_L(fp, -1)));
        p.set_rel_update(u, F.Lm, choose(build_L(fm, +1), build_L(fm, -1)));
        p.set_rel_update(u, F.F0, choose(build_F(f0, +1), build_F(f0, -1)));
        p.set_rel_update(u, F.Fp, choose(build_F(fp, +1), build_F(fp, -1)));
        p.set_rel_update(u, F.Fm, choose(build_F(fm, +1), build_F(fm, -1)));
        Term lvl1 = vx(1);
        Fam fp1{+1, lvl1}, fm1{-1, lvl1};
        p.set_rel_update(u, F.Fx0, choose(build_Fx(f0, +1), build_Fx(f0, -1)));
        p.set_rel_update(u, F.Fxp, choose(build_Fx(fp1, +1), build_Fx(fp1, -1)));
        p.set_rel_update(u, F.Fxm, choose(build_Fx(fm1, +1), build_Fx(fm1, -1)));
        p.set_rel_update(u, F.Mn0, choose(build_Mn(f0, +1), build_Mn(f0, -1)));
        p.set_rel_update(u, F.Mnp, choose(build_Mn(fp, +1), build_Mn(fp, -1)));
        p.set_rel_update(u, F.Mnm, choose(build_Mn(fm, +1), build_Mn(fm, -1)));
        p.set_rel_update(u, F.Mx0, choose(build_Mx(f0, +1), build_Mx(f0, -1)));
        p.set_rel_update(u, F.Mxp, choose(build_Mx(fp, +1), build_Mx(fp, -1)));
        p.set_rel_update(u, F.Mxm, choose(build_Mx(fm, +1), build_Mx(fm, -1)));
        Term lvl0 = vx(0);
        Fam fpl{+1, lvl0}, fml{-1, lvl0};
        p.set_rel_update(u, F.La0, choose(build_La(f0, +1), build_La(f0, -1)));
        p.set_rel_update(u, F.Lap, choose(build_La(fpl, +1), build_La(fpl, -1)));
        p.set_rel_update(u, F.Lam, choose(build_La(fml, +1), build_La(fml, -1)));
        // accept: level of the last position is 0 and no level -1 anywhere
        Formula fxm_new = choose(build_Fx(Fam{-1, minE}, +1), build_Fx(Fam{-1, minE}, -1));
        fxm_new = subst_vars(fxm_new, {{tuple_var(0), minE}, {tuple_var(1), minE}});
        Formula la0_new = choose(build_La(f0, +1), build_La(f0, -1));
        p.set_rel_update(u, acc, band(bnot(fxm_new), la0_new));
    };

    set_family_updates(AbsUpdate::ins(0), tru(), fls());   // insert '('
    set_family_updates(AbsUpdate::ins(1), fls(), tru());   // insert ')'
    // reset: direction by the old label of x (disciplined sequences)
    set_family_updates(AbsUpdate::reset(), rel(sch, 1, {x}), rel(sch, 0, {x}));

    // initialization: all positions at level 0, ringlists are the ordered
    // cycles over whole intervals
    {
        Term i = vx(0), j = vx(1), a = vx(2), b = vx(3), k = vx(2);
        // the printed init lacks the a<j guard on the inner edge, which would
        // add a spurious (n,n) self-loop via succ(n)=n when j=n
        p.init_formulas[F.L0] =
            band(le(i, j), bor(band(band(le(i, a), lt(a, j)), eq(b, succT(a))),
                               band(eq(a, j), eq(b, i))));
        p.init_formulas[F.F0] = le(i, j);
        p.init_formulas[F.Fx0] = tru();
        p.init_formulas[F.Mn0] = band(le(i, j), eq(k, i));
        p.init_formulas[F.Mx0] = band(le(i, j), eq(k, j));
        p.init_formulas[F.La0] = tru();
    }

    p.validate();
    return normalize_update_discipline(eliminate_init(p));
}

// from-scratch level of position pos (word-mode state or structure labels)
inline std::vector<int> dyck_levels(const ProgramState& st) {
    std::vector<int> lvl(st.n + 1, 0);
    for (Element p = 1; p <= st.n; ++p) {
        int lab = st.label(p);
        lvl[p] = lvl[p - 1] + (lab < 0 ? 0 : (is_open_bracket(lab) ? 1 : -1));
    }
    return lvl;
}

// ------------------------------------------------------------------
// D_n: matching/excess functions over an on-the-fly number chain, DynQF
// ------------------------------------------------------------------

// Table semantics (all against the current string and the touch chain;
// numbers are chain elements, repr(c) = element of rank c, rank(cmin)=0):
//   d(a,b)    = #closes - #opens in w[a,b]
//   fr(u,m)   = min{w > u : Cl(w), d(u+1,w) = rank(m)},  rank(m) >= 1
//   fl(u,m)   = max{w < u : Op(w), d(w,u-1) = -rank(m)}
//   gr(u,v)   = repr(max{0} U {d(u+1,w)  : u < w < v})   (exclusive ends)
//   gl(u,v)   = repr(max{0} U {-d(w,u-1) : v < w < u})
//   R1(a,b)   = w[a,b] balanced
//   R2 (A,B,C,D) = w[A,  C-1] . w[D+1, B  ] balanced
//   R2L(A,B,C,D) = w[A+1,C-1] . w[D+1, B  ] balanced
//   R2R(A,B,C,D) = w[A,  C-1] . w[D+1, B-1] balanced
// Validity relations R_fr.. mark which function entries are defined; for
// gr/gl an invalid entry always means "the excess equals the chain size"
// (the repair branches below keep that invariant when the chain grows).
namespace dyckn_detail {

struct GT {
    Term v;
    Formula ok;
};

struct Builder {
    DynamicProgram p;
    Schema* sch = nullptr;
    int kinds = 1;
    int acc = -1;
    SuccBlock block;
    int fr_ = -1, fl_ = -1, gr_ = -1, gl_ = -1;
    int Rfr = -1, Rfl = -1, Rgr = -1, Rgl = -1;
    int R1 = -1, R2 = -1, R2L = -1, R2R = -1;
    int firstc = -1, lastc = -1;

    Term z() const { return vy(0); }

    Formula openl(int kind, Term t) const { return rel(*sch, 2 * kind, {std::move(t)}); }
    Formula closel(int kind, Term t) const { return rel(*sch, 2 * kind + 1, {std::move(t)}); }
    Formula Op(Term t) const {
        std::vector<Formula> fs;
        for (int i = 0; i < kinds; ++i) fs.push_back(openl(i, t));
        return disj(fs);
    }
    Formula Cl(Term t) const {
        std::vector<Formula> fs;
        for (int i = 0; i < kinds; ++i) fs.push_back(closel(i, t));
        return disj(fs);
    }

    // old-state chain reads
    Term ocmin() const { return app(*sch, block.cmin, {}); }
    Term ocmax() const { return app(*sch, block.cmax, {}); }
    Term osucc(Term t) const { return app(*sch, block.csucc, {std::move(t)}); }
    Formula otouched() const { return rel(*sch, block.touched, {}); }

    GT lit(Term t) const { return {std::move(t), tru()}; }

    GT read_fr(const GT& x, const GT& m) const {
        Term v = app(*sch, fr_, {x.v, m.v});
        return {v, conj({x.ok, m.ok, rel(*sch, Rfr, {x.v, m.v})})};
    }
    GT read_fl(const GT& x, const GT& m) const {
        Term v = app(*sch, fl_, {x.v, m.v});
        return {v, conj({x.ok, m.ok, rel(*sch, Rfl, {x.v, m.v})})};
    }
    GT read_gr(const GT& u, const GT& v) const {
        Term t = app(*sch, gr_, {u.v, v.v});
        return {t, conj({u.ok, v.ok, rel(*sch, Rgr, {u.v, v.v})})};
    }
    GT read_gl(const GT& u, const GT& v) const {
        Term t = app(*sch, gl_, {u.v, v.v});
        return {t, conj({u.ok, v.ok, rel(*sch, Rgl, {u.v, v.v})})};
    }

    // fr(x, number 1): plain read when the old chain has an element of rank 1,
    // otherwise the single-element special case (the lone touched position is
    // the crossing iff it carries a close right of x)
    GT fr_lit1(const GT& x) const {
        Term r1 = osucc(ocmin());
        Formula r1ok = neq(r1, ocmin());
        Term plain = app(*sch, fr_, {x.v, r1});
        Term v = ite(r1ok, plain, ocmin());
        Formula ok = band(x.ok, bor(band(r1ok, rel(*sch, Rfr, {x.v, r1})),
                                    conj({bnot(r1ok), otouched(), Cl(ocmin()),
                                          lt(x.v, ocmin())})));
        return {v, ok};
    }
    GT fl_lit1(const GT& x) const {
        Term r1 = osucc(ocmin());
        Formula r1ok = neq(r1, ocmin());
        Term plain = app(*sch, fl_, {x.v, r1});
        Term v = ite(r1ok, plain, ocmin());
        Formula ok = band(x.ok, bor(band(r1ok, rel(*sch, Rfl, {x.v, r1})),
                                    conj({bnot(r1ok), otouched(), Op(ocmin()),
                                          lt(ocmin(), x.v)})));
        return {v, ok};
    }

    // fr at number rank(m)+1, totalized: fr(x,c+1) = fr(fr(x,c),1); rank 0
    // falls back to fr(x,1) directly
    GT frp1(const GT& x, const GT& m) const {
        Formula isz = eq(m.v, ocmin());
        GT base = fr_lit1(x);
        GT deep = fr_lit1(read_fr(x, m));
        Term v = ite(isz, base.v, deep.v);
        Formula ok = conj({x.ok, m.ok, bor(band(isz, base.ok), band(bnot(isz), deep.ok))});
        return {v, ok};
    }
    GT flp1(const GT& x, const GT& m) const {
        Formula isz = eq(m.v, ocmin());
        GT base = fl_lit1(x);
        GT deep = fl_lit1(read_fl(x, m));
        Term v = ite(isz, base.v, deep.v);
        Formula ok = conj({x.ok, m.ok, bor(band(isz, base.ok), band(bnot(isz), deep.ok))});
        return {v, ok};
    }

    // crossing position with number m possibly 0 (rank 0 -> u itself)
    GT frz(const GT& u, const GT& m) const {
        Formula isz = eq(m.v, ocmin());
        Term v = ite(isz, u.v, app(*sch, fr_, {u.v, m.v}));
        Formula ok =
            conj({u.ok, m.ok, bor(isz, rel(*sch, Rfr, {u.v, m.v}))});
        return {v, ok};
    }
    GT flz(const GT& u, const GT& m) const {
        Formula isz = eq(m.v, ocmin());
        Term v = ite(isz, u.v, app(*sch, fl_, {u.v, m.v}));
        Formula ok =
            conj({u.ok, m.ok, bor(isz, rel(*sch, Rfl, {u.v, m.v}))});
        return {v, ok};
    }

    // --------------------------------------------------------------
    // R-family update programs
    // --------------------------------------------------------------

    struct Flavor {
        int sym;
        bool left_open;   // outer interval open at A
        bool right_open;  // outer interval open at B
    };

    Formula cov_start(const Flavor& f, Term a, Term t) const {
        return f.left_open ? lt(a, t) : le(a, t);
    }
    Formula cov_end(const Flavor& f, Term t, Term b) const {
        return f.right_open ? lt(t, b) : le(t, b);
    }

    // the subroutine P0, left-side version (the bracket pair sits in the
    // left piece); interior is the caller-supplied degenerate-hole read
    Formula P0L(const Flavor& f, const GT& i0, const GT& j0, Formula interior) const {
        Term A = vx(0), B = vx(1), C = vx(2), D = vx(3);
        GT m = read_gr(j0, lit(C));
        GT j1 = frz(j0, m);
        GT i1 = flz(i0, m);
        GT mp = read_gl(lit(C), j1);
        GT j2 = frz(lit(D), mp);
        // j2 = D marks "no pending opens cross the hole": legal even when
        // the right piece is empty (B <= D)
        return conj({i0.ok, j0.ok, m.ok, j1.ok, i1.ok, mp.ok, j2.ok, interior,
                     rel(*sch, R2, {i1.v, j1.v, i0.v, j0.v}),
                     rel(*sch, R2L, {j1.v, j2.v, C, D}),
                     rel(*sch, f.sym, {A, B, i1.v, j2.v}), cov_start(f, A, i1.v),
                     bor(eq(j2.v, D), cov_end(f, j2.v, B))});
    }

    Formula P0R(const Flavor& f, const GT& i0, const GT& j0, Formula interior) const {
        Term A = vx(0), B = vx(1), C = vx(2), D = vx(3);
        GT m = read_gl(i0, lit(D));
        GT i1 = flz(i0, m);
        GT j1 = frz(j0, m);
        GT mp = read_gr(lit(D), i1);
        GT i2 = flz(lit(C), mp);
        return conj({i0.ok, j0.ok, m.ok, i1.ok, j1.ok, mp.ok, i2.ok, interior,
                     rel(*sch, R2, {i1.v, j1.v, i0.v, j0.v}),
                     rel(*sch, R2R, {i2.v, i1.v, C, D}),
                     rel(*sch, f.sym, {A, B, i2.v, j1.v}),
                     bor(eq(i2.v, C), cov_start(f, A, i2.v)),
                     cov_end(f, j1.v, B)});
    }

    Formula r2_update(const Flavor& f, int sym_inserted /* -1 reset */) const {
        Term A = vx(0), B = vx(1), C = vx(2), D = vx(3);
        Term zz = z();
        Formula in_left = band(cov_start(f, A, zz), lt(zz, C));
        Formula in_right = band(lt(D, zz), cov_end(f, zz, B));
        Formula self = rel(*sch, f.sym, {A, B, C, D});

        Formula left_case, right_case;
        if (sym_inserted < 0) {
            left_case = P0L(f, lit(zz), lit(zz), tru());
            right_case = P0R(f, lit(zz), lit(zz), tru());
        } else if (is_open_bracket(sym_inserted)) {
            int l = bracket_kind(sym_inserted);
            GT j0 = fr_lit1(lit(zz));
            Formula interior = rel(*sch, R2, {zz, j0.v, j0.v, j0.v});
            Formula match_in_left = band(j0.ok, lt(j0.v, C));
            Formula then_part = band(closel(l, j0.v), P0L(f, lit(zz), j0, interior));
            // match beyond the hole: m pending opens of (z, C) plus z itself
            // close at fr(D, m+1)
            GT m = read_gl(lit(C), lit(zz));
            GT j0p = frp1(lit(D), m);
            Formula else_part =
                conj({m.ok, j0p.ok, closel(l, j0p.v), cov_end(f, j0p.v, B),
                      rel(*sch, R2R, {zz, j0p.v, C, D}),
                      rel(*sch, f.sym, {A, B, zz, j0p.v})});
            left_case = bor(band(match_in_left, then_part),
                            band(bnot(match_in_left), else_part));
            GT j0r = fr_lit1(lit(zz));
            Formula interior_r = rel(*sch, R2, {zz, j0r.v, j0r.v, j0r.v});
            right_case = conj({j0r.ok, cov_end(f, j0r.v, B), closel(l, j0r.v),
                               P0R(f, lit(zz), j0r, interior_r)});
        } else {
            int l = bracket_kind(sym_inserted);
            GT i0 = fl_lit1(lit(zz));
            Formula interior = rel(*sch, R2, {i0.v, zz, i0.v, i0.v});
            left_case = conj({i0.ok, cov_start(f, A, i0.v), openl(l, i0.v),
                              P0L(f, i0, lit(zz), interior)});
            Formula match_in_right = band(i0.ok, lt(D, i0.v));
            Formula then_part = band(openl(l, i0.v), P0R(f, i0, lit(zz), interior));
            GT m = read_gr(lit(D), lit(zz));
            GT i0p = flp1(lit(C), m);
            Formula else_part =
                conj({m.ok, i0p.ok, openl(l, i0p.v), cov_start(f, A, i0p.v),
                      rel(*sch, R2L, {i0p.v, zz, C, D}),
                      rel(*sch, f.sym, {A, B, i0p.v, zz})});
            right_case = bor(band(match_in_right, then_part),
                             band(bnot(match_in_right), else_part));
        }
        return disj({band(in_left, left_case), band(in_right, right_case),
                     band(band(bnot(in_left), bnot(in_right)), self)});
    }

    Formula r1_update(int sym_inserted) const {
        Term A = vx(0), B = vx(1), zz = z();
        Formula inside = band(le(A, zz), le(zz, B));
        Formula self = rel(*sch, R1, {A, B});
        Formula body;
        if (sym_inserted < 0) {
            body = rel(*sch, R2, {A, B, zz, zz});
        } else if (is_open_bracket(sym_inserted)) {
            int l = bracket_kind(sym_inserted);
            GT j0 = fr_lit1(lit(zz));
            body = conj({j0.ok, le(j0.v, B), closel(l, j0.v),
                         rel(*sch, R2, {zz, j0.v, j0.v, j0.v}),
                         rel(*sch, R2, {A, B, zz, j0.v})});
        } else {
            int l = bracket_kind(sym_inserted);
            GT i0 = fl_lit1(lit(zz));
            body = conj({i0.ok, le(A, i0.v), openl(l, i0.v),
                         rel(*sch, R2, {i0.v, zz, i0.v, i0.v}),
                         rel(*sch, R2, {A, B, i0.v, zz})});
        }
        return bor(band(inside, body), band(bnot(inside), self));
    }

    // --------------------------------------------------------------
    // fr/fl update programs (value term + validity formula)
    // --------------------------------------------------------------

    // entry validity always requires the second argument to be a chain
    // number of rank >= 1 after the update
    Formula num_ok(Term m) const {
        return band(block.new_actdom(m), neq(m, block.new_min()));
    }

    // "old crossing at number rank(m)": a plain table read, except when m is
    // the number born this very update (m = fresh z, rank t_old) whose value
    // only exists via the fr(x, t_old) = fr(fr(x, t_old - 1), 1) identity
    GT old_cross_r(Term x, Term m) const {
        Formula fresh_m = band(eq(m, z()), bnot(block.old_actdom(z())));
        GT tab{app(*sch, fr_, {x, m}), rel(*sch, Rfr, {x, m})};
        GT via_max = frp1(lit(x), GT{ocmax(), tru()});
        Term v = ite(fresh_m, via_max.v, tab.v);
        Formula ok = bor(band(fresh_m, band(otouched(), via_max.ok)),
                         band(bnot(fresh_m), tab.ok));
        return {v, ok};
    }
    GT old_cross_l(Term x, Term m) const {
        Formula fresh_m = band(eq(m, z()), bnot(block.old_actdom(z())));
        GT tab{app(*sch, fl_, {x, m}), rel(*sch, Rfl, {x, m})};
        GT via_max = flp1(lit(x), GT{ocmax(), tru()});
        Term v = ite(fresh_m, via_max.v, tab.v);
        Formula ok = bor(band(fresh_m, band(otouched(), via_max.ok)),
                         band(bnot(fresh_m), tab.ok));
        return {v, ok};
    }

    // d drops beyond z (insert open / reset close): crossings before z stay,
    // later ones move up by one number
    GT fr_dec() const {
        Term x = vx(0), m = vx(1), zz = z();
        GT oldc = old_cross_r(x, m);
        GT far = frp1(lit(x), lit(m));
        Formula keep = bor(le(zz, x), band(oldc.ok, lt(oldc.v, zz)));
        Term v = ite(keep, oldc.v, far.v);
        Formula ok = bor(band(le(zz, x), oldc.ok),
                         band(lt(x, zz), band(oldc.ok, bor(lt(oldc.v, zz), far.ok))));
        return {v, ok};
    }
    GT fl_inc_like_dec() const {  // mirror: insert close / reset open
        Term x = vx(0), m = vx(1), zz = z();
        GT oldc = old_cross_l(x, m);
        GT far = flp1(lit(x), lit(m));
        Formula keep = bor(le(x, zz), band(oldc.ok, lt(zz, oldc.v)));
        Term v = ite(keep, oldc.v, far.v);
        Formula ok = bor(band(le(x, zz), oldc.ok),
                         band(lt(zz, x), band(oldc.ok, bor(lt(zz, oldc.v), far.ok))));
        return {v, ok};
    }

    // d grows beyond z (insert close: with_z_candidate; reset open: without)
    GT fr_inc(bool with_z_candidate) const {
        Term x = vx(0), m = vx(1), zz = z();
        GT oldc = old_cross_r(x, m);
        Formula keep = bor(le(zz, x), band(oldc.ok, lt(oldc.v, zz)));
        // y = crossing of rank(m)-1 (x itself for rank 1)
        Term r1n = block.new_succ(block.new_min());
        Formula m_is_1 = eq(m, r1n);
        Term prem = block.new_pre(m);
        Term yv = ite(m_is_1, x, app(*sch, fr_, {x, prem}));
        Formula yok = bor(m_is_1, rel(*sch, Rfr, {x, prem}));
        Formula path_up = lt(zz, yv);
        GT g = read_gl(lit(zz), GT{yv, yok});
        Formula gzero = eq(g.v, ocmin());
        GT inner = with_z_candidate
                       ? GT{ite(gzero, zz, app(*sch, fr_, {zz, g.v})),
                            band(g.ok, bor(gzero, rel(*sch, Rfr, {zz, g.v})))}
                       : frp1(lit(zz), g);
        Term v = ite(keep, oldc.v, ite(path_up, yv, inner.v));
        Formula kept = band(oldc.ok, lt(oldc.v, zz));
        Formula ok =
            disj({band(le(zz, x), oldc.ok), band(lt(x, zz), kept),
                  conj({lt(x, zz), bnot(kept), yok, bor(path_up, inner.ok)})});
        return {v, ok};
    }
    GT fl_dec_like_inc(bool with_z_candidate) const {  // mirror
        Term x = vx(0), m = vx(1), zz = z();
        GT oldc = old_cross_l(x, m);
        Formula keep = bor(le(x, zz), band(oldc.ok, lt(zz, oldc.v)));
        Term r1n = block.new_succ(block.new_min());
        Formula m_is_1 = eq(m, r1n);
        Term prem = block.new_pre(m);
        Term yv = ite(m_is_1, x, app(*sch, fl_, {x, prem}));
        Formula yok = bor(m_is_1, rel(*sch, Rfl, {x, prem}));
        Formula path_up = lt(yv, zz);
        GT g = read_gr(lit(zz), GT{yv, yok});
        Formula gzero = eq(g.v, ocmin());
        GT inner = with_z_candidate
                       ? GT{ite(gzero, zz, app(*sch, fl_, {zz, g.v})),
                            band(g.ok, bor(gzero, rel(*sch, Rfl, {zz, g.v})))}
                       : flp1(lit(zz), g);
        Term v = ite(keep, oldc.v, ite(path_up, yv, inner.v));
        Formula kept = band(oldc.ok, lt(zz, oldc.v));
        Formula ok =
            disj({band(le(x, zz), oldc.ok), band(lt(zz, x), kept),
                  conj({lt(zz, x), bnot(kept), yok, bor(path_up, inner.ok)})});
        return {v, ok};
    }

    // --------------------------------------------------------------
    // gr/gl update programs, with the s=t repair for invalid entries
    // --------------------------------------------------------------

    GT gr_dec() const {
        Term x = vx(0), y = vx(1), zz = z();
        Formula in_range = band(lt(x, zz), lt(zz, y));
        Formula okG = rel(*sch, Rgr, {x, y});
        Term mv = app(*sch, gr_, {x, y});
        GT att = frz(lit(x), GT{mv, tru()});
        // valid old entry
        Term v_valid = ite(bor(bnot(in_range), lt(att.v, zz)), mv,
                           app(*sch, block.cpre, {mv}));
        // invalid old entry: s = old chain size t
        Formula fresh = bnot(block.old_actdom(zz));
        GT attx = frp1(lit(x), GT{ocmax(), tru()});
        Formula inv_stays_t = bor(bnot(in_range), band(attx.ok, lt(attx.v, zz)));
        Term v_inv = ite(band(otouched(), bnot(inv_stays_t)), ocmax(), zz);
        Formula ok_inv = bor(bnot(otouched()),
                             bor(band(inv_stays_t, fresh),
                                 band(bnot(inv_stays_t), tru())));
        Term v = ite(okG, v_valid, v_inv);
        Formula ok = bor(band(okG, tru()), band(bnot(okG), ok_inv));
        return {v, ok};
    }
    GT gl_inc_like_dec() const {  // mirror of gr_dec (insert close / reset open)
        Term x = vx(0), y = vx(1), zz = z();
        Formula in_range = band(lt(y, zz), lt(zz, x));
        Formula okG = rel(*sch, Rgl, {x, y});
        Term mv = app(*sch, gl_, {x, y});
        GT att = flz(lit(x), GT{mv, tru()});
        Term v_valid = ite(bor(bnot(in_range), lt(zz, att.v)), mv,
                           app(*sch, block.cpre, {mv}));
        Formula fresh = bnot(block.old_actdom(zz));
        GT attx = flp1(lit(x), GT{ocmax(), tru()});
        Formula inv_stays_t = bor(bnot(in_range), band(attx.ok, lt(zz, attx.v)));
        Term v_inv = ite(band(otouched(), bnot(inv_stays_t)), ocmax(), zz);
        Formula ok_inv = bor(bnot(otouched()),
                             bor(band(inv_stays_t, fresh),
                                 band(bnot(inv_stays_t), tru())));
        Term v = ite(okG, v_valid, v_inv);
        Formula ok = bor(okG, band(bnot(okG), ok_inv));
        return {v, ok};
    }

    GT gr_inc(bool with_z_candidate) const {
        Term x = vx(0), y = vx(1), zz = z();
        Formula in_range = band(lt(x, zz), lt(zz, y));
        Formula okG = rel(*sch, Rgr, {x, y});
        Term mv = app(*sch, gr_, {x, y});
        GT att = frz(lit(x), GT{mv, tru()});
        Formula path_up = lt(zz, att.v);
        GT g = read_gl(lit(zz), att);
        Formula gzero = eq(g.v, ocmin());
        Formula re_attained;
        if (with_z_candidate) {
            GT f2 = read_fr(lit(zz), g);
            re_attained = band(g.ok, bor(gzero, band(f2.ok, lt(f2.v, y))));
        } else {
            GT f2 = frp1(lit(zz), g);
            re_attained = band(g.ok, band(f2.ok, lt(f2.v, y)));
        }
        Formula grows = band(in_range, bor(path_up, re_attained));
        Term up = block.new_succ(mv);
        Term v_valid = ite(grows, up, mv);
        Formula ok_valid = bor(bnot(grows), neq(up, mv));
        // invalid old entry: s = t
        Formula fresh = bnot(block.old_actdom(zz));
        GT attx = frp1(lit(x), GT{ocmax(), tru()});
        Formula path_upx = band(attx.ok, lt(zz, attx.v));
        GT gx = read_gl(lit(zz), attx);
        Formula gzx = eq(gx.v, ocmin());
        Formula rex;
        if (with_z_candidate) {
            GT f2 = read_fr(lit(zz), gx);
            rex = band(gx.ok, bor(gzx, band(f2.ok, lt(f2.v, y))));
        } else {
            GT f2 = frp1(lit(zz), gx);
            rex = band(gx.ok, band(f2.ok, lt(f2.v, y)));
        }
        Formula growsx = band(in_range, bor(path_upx, rex));
        Term v_inv = zz;  // repr_new(t_old) when the chain grew
        Formula ok_inv = band(bnot(growsx), band(fresh, otouched()));
        Formula ok_inv_empty = bnot(in_range);  // empty old string: s stays 0
        Term v = ite(okG, v_valid, v_inv);
        Formula ok = bor(band(okG, ok_valid),
                         band(bnot(okG), bor(band(otouched(), ok_inv),
                                             band(bnot(otouched()), ok_inv_empty))));
        return {v, ok};
    }
    GT gl_dec_like_inc(bool with_z_candidate) const {  // mirror of gr_inc
        Term x = vx(0), y = vx(1), zz = z();
        Formula in_range = band(lt(y, zz), lt(zz, x));
        Formula okG = rel(*sch, Rgl, {x, y});
        Term mv = app(*sch, gl_, {x, y});
        GT att = flz(lit(x), GT{mv, tru()});
        Formula path_up = lt(att.v, zz);
        GT g = read_gr(lit(zz), att);
        Formula gzero = eq(g.v, ocmin());
        Formula re_attained;
        if (with_z_candidate) {
            GT f2 = read_fl(lit(zz), g);
            re_attained = band(g.ok, bor(gzero, band(f2.ok, lt(y, f2.v))));
        } else {
            GT f2 = flp1(lit(zz), g);
            re_attained = band(g.ok, band(f2.ok, lt(y, f2.v)));
        }
        Formula grows = band(in_range, bor(path_up, re_attained));
        Term up = block.new_succ(mv);
        Term v_valid = ite(grows, up, mv);
        Formula ok_valid = bor(bnot(grows), neq(up, mv));
        Formula fresh = bnot(block.old_actdom(zz));
        GT attx = flp1(lit(x), GT{ocmax(), tru()});
        Formula path_upx = band(attx.ok, lt(attx.v, zz));
        GT gx = read_gr(lit(zz), attx);
        Formula gzx = eq(gx.v, ocmin());
        Formula rex;
        if (with_z_candidate) {
            GT f2 = read_fl(lit(zz), gx);
            rex = band(gx.ok, bor(gzx, band(f2.ok, lt(y, f2.v))));
        } else {
            GT f2 = flp1(lit(zz), gx);
            rex = band(gx.ok, band(f2.ok, lt(y, f2.v)));
        }
        Formula growsx = band(in_range, bor(path_upx, rex));
        Term v_inv = zz;
        Formula ok_inv = band(bnot(growsx), band(fresh, otouched()));
        Formula ok_inv_empty = bnot(in_range);
        Term v = ite(okG, v_valid, v_inv);
        Formula ok = bor(band(okG, ok_valid),
                         band(bnot(okG), bor(band(otouched(), ok_inv),
                                             band(bnot(otouched()), ok_inv_empty))));
        return {v, ok};
    }

    // --------------------------------------------------------------
    // assembling one abstract update
    // --------------------------------------------------------------

    void set_update(const AbsUpdate& u, int sym_inserted) {
        // R-family + R1
        Flavor cc{R2, false, false}, lc{R2L, true, false}, cr{R2R, false, true};
        p.set_rel_update(u, R2, r2_update(cc, sym_inserted));
        p.set_rel_update(u, R2L, r2_update(lc, sym_inserted));
        p.set_rel_update(u, R2R, r2_update(cr, sym_inserted));
        Formula r1f = r1_update(sym_inserted);
        p.set_rel_update(u, R1, r1f);

        // functions: pick direction; reset dispatches on the old label
        GT frU, flU, grU, glU;
        if (sym_inserted < 0) {
            // removing an open raises the close-surplus (fr/gr grow) and
            // lowers the open-surplus (fl/gl shrink); removing a close is
            // the reverse, with no fresh crossing candidate at z
            GT fr_o = fr_inc(false), fr_c = fr_dec();
            GT fl_o = fl_inc_like_dec(), fl_c = fl_dec_like_inc(false);
            GT gr_o = gr_inc(false), gr_c = gr_dec();
            GT gl_o = gl_inc_like_dec(), gl_c = gl_dec_like_inc(false);
            Formula was_open = Op(z()), was_close = Cl(z());
            auto mix = [&](const GT& o, const GT& c) {
                return GT{ite(was_open, o.v, c.v),
                          bor(band(was_open, o.ok), band(was_close, c.ok))};
            };
            frU = mix(fr_o, fr_c);
            flU = mix(fl_o, fl_c);
            grU = mix(gr_o, gr_c);
            glU = mix(gl_o, gl_c);
        } else if (is_open_bracket(sym_inserted)) {
            frU = fr_dec();
            flU = fl_dec_like_inc(true);
            grU = gr_dec();
            glU = gl_dec_like_inc(true);
        } else {
            frU = fr_inc(true);
            flU = fl_inc_like_dec();
            grU = gr_inc(true);
            glU = gl_inc_like_dec();
        }
        Term m = vx(1);
        p.set_fun_update(u, fr_, frU.v);
        p.set_rel_update(u, Rfr, band(frU.ok, num_ok(m)));
        p.set_fun_update(u, fl_, flU.v);
        p.set_rel_update(u, Rfl, band(flU.ok, num_ok(m)));
        p.set_fun_update(u, gr_, grU.v);
        p.set_rel_update(u, Rgr, grU.ok);
        p.set_fun_update(u, gl_, glU.v);
        p.set_rel_update(u, Rgl, glU.ok);

        // first/last and accept: R1(first,last) after the update
        Term fnew = ite(otouched(), ite(lt(z(), app(*sch, firstc, {})),
                                        z(), app(*sch, firstc, {})),
                        z());
        Term lnew = ite(otouched(), ite(lt(app(*sch, lastc, {}), z()),
                                        z(), app(*sch, lastc, {})),
                        z());
        p.set_fun_update(u, firstc, fnew);
        p.set_fun_update(u, lastc, lnew);
        p.set_rel_update(u, acc,
                         subst_vars(r1f, {{tuple_var(0), fnew}, {tuple_var(1), lnew}}));

        block.set_updates(p, u);
    }
};

}  // namespace dyckn_detail

inline DynamicProgram dyckn_program(int kinds) {
    if (kinds < 1) throw Error("dyckn_program needs at least one bracket kind");
    dyckn_detail::Builder b;
    b.kinds = kinds;
    b.p.name = "dyckn_" + std::to_string(kinds);
    b.p.set_word_alphabet(bracket_alphabet(kinds));
    b.p.schema = make_schema(b.p.input_vocab);
    b.sch = b.p.schema.get();
    Schema& sch = *b.sch;
    b.acc = sch.add_accept();
    b.block = SuccBlock::add_to(sch);
    b.fr_ = sch.add("fr", 2, SymKind::AuxFun);
    b.fl_ = sch.add("fl", 2, SymKind::AuxFun);
    b.gr_ = sch.add("gr", 2, SymKind::AuxFun);
    b.gl_ = sch.add("gl", 2, SymKind::AuxFun);
    b.Rfr = sch.add("Rfr", 2, SymKind::AuxRel);
    b.Rfl = sch.add("Rfl", 2, SymKind::AuxRel);
    b.Rgr = sch.add("Rgr", 2, SymKind::AuxRel);
    b.Rgl = sch.add("Rgl", 2, SymKind::AuxRel);
    b.R1 = sch.add("R1", 2, SymKind::AuxRel);
    b.R2 = sch.add("R2", 4, SymKind::AuxRel);
    b.R2L = sch.add("R2L", 4, SymKind::AuxRel);
    b.R2R = sch.add("R2R", 4, SymKind::AuxRel);
    b.firstc = sch.add("first", 0, SymKind::AuxFun);
    b.lastc = sch.add("last", 0, SymKind::AuxFun);

    for (int s = 0; s < 2 * kinds; ++s) b.set_update(AbsUpdate::ins(s), s);
    b.set_update(AbsUpdate::reset(), -1);

    // on the empty word every spliced reading is balanced
    b.p.init_formulas[b.R1] = tru();
    b.p.init_formulas[b.R2] = tru();
    b.p.init_formulas[b.R2L] = tru();
    b.p.init_formulas[b.R2R] = tru();

    b.p.validate();
    return normalize_update_discipline(eliminate_init(b.p));
}

// ------------------------------------------------------------------
// from-scratch recomputation for the coherence tests
// ------------------------------------------------------------------

// chain = touch order (tracked by the caller); rank(chain[r]) = r
struct DycknOracle {
    int n = 0;
    std::vector<int> labels;      // -1 empty, else alphabet symbol
    std::vector<Element> chain;   // touch order

    int rank_of(Element e) const {
        for (size_t r = 0; r < chain.size(); ++r)
            if (chain[r] == e) return static_cast<int>(r);
        return -1;
    }
    int d(int a, int bnd) const {  // closes - opens in w[a,bnd]
        int s = 0;
        for (int q = a; q <= bnd; ++q) {
            if (q < 1 || q > n) continue;
            int lab = labels[q];
            if (lab < 0) continue;
            s += is_open_bracket(lab) ? -1 : 1;
        }
        return s;
    }
    // fr(u, m): defined iff rank(m) >= 1 and a crossing exists
    std::pair<bool, Element> fr(Element u, Element m) const {
        int c = rank_of(m);
        if (c < 1) return {false, 0};
        for (Element w = u + 1; w <= n; ++w)
            if (labels[w] >= 0 && !is_open_bracket(labels[w]) && d(u + 1, w) == c)
                return {true, w};
        return {false, 0};
    }
    std::pair<bool, Element> fl(Element u, Element m) const {
        int c = rank_of(m);
        if (c < 1) return {false, 0};
        for (Element w = u - 1; w >= 1; --w)
            if (labels[w] >= 0 && is_open_bracket(labels[w]) && d(w, u - 1) == -c)
                return {true, w};
        return {false, 0};
    }
    std::pair<bool, Element> gr(Element u, Element v) const {
        int s = 0;
        for (Element w = u + 1; w < v; ++w) s = std::max(s, d(u + 1, w));
        if (s >= static_cast<int>(chain.size())) return {false, 0};
        return {true, chain[s]};
    }
    std::pair<bool, Element> gl(Element u, Element v) const {
        int s = 0;
        for (Element w = v + 1; w < u; ++w) s = std::max(s, -d(w, u - 1));
        if (s >= static_cast<int>(chain.size())) return {false, 0};
        return {true, chain[s]};
    }
    bool balanced(const Word& w, int kinds) const { return bracket_oracle(w, kinds); }
    Word splice(int a1, int b1, int a2, int b2) const {
        Word w;
        for (int q = a1; q <= b1; ++q)
            if (q >= 1 && q <= n && labels[q] >= 0) w.push_back(labels[q]);
        for (int q = a2; q <= b2; ++q)
            if (q >= 1 && q <= n && labels[q] >= 0) w.push_back(labels[q]);
        return w;
    }
};

// ringlist well-formedness + level coherence for one slice: the maintained
// edge set must be the ordered cycle over {p in [i,j] : level(p) = l}
inline bool check_dyck1_slice(const ProgramState& st, int Lsym, const std::vector<Element>& base,
                              Element i, Element j, const std::vector<int>& lvl, int level) {
    std::vector<Element> slice;
    for (Element p = i; p <= j && p >= i; ++p)
        if (lvl[p] == level) slice.push_back(p);
    auto has_edge = [&](Element a, Element b) {
        std::vector<Element> t(base);
        t.push_back(a);
        t.push_back(b);
        return st.rel[Lsym].get_tuple(t.data());
    };
    // expected: ordered cycle
    for (Element a = 1; a <= st.n; ++a)
        for (Element b = 1; b <= st.n; ++b) {
            bool expect = false;
            if (!slice.empty()) {
                for (size_t q = 0; q < slice.size(); ++q) {
                    Element from = slice[q];
                    Element to = slice[(q + 1) % slice.size()];
                    if (slice.size() == 1) to = from;
                    if (a == from && b == to) expect = true;
                }
            }
            if (has_edge(a, b) != expect) return false;
        }
    return true;
}

}  // namespace dynlang
