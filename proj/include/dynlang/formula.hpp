#pragma once

// Update formulas and terms, dynamic programs, snapshot update semantics,
// tier checking, and the two program transformations (initialization
// elimination, update-discipline normalization).
//
// Formulas are built as immutable shared ASTs. For execution each update
// definition is compiled once into a flat node array with DAG sharing and
// per-tuple memoization; the reference evaluators eval_term/eval_formula
// stay as the simple recursive semantics.

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <unordered_map>
#include <vector>

#include "core.hpp"

namespace dynlang {

// ------------------------------------------------------------------
// Variables
// ------------------------------------------------------------------

using VarId = int;

struct VarPool {
    std::vector<std::string> names;
    std::unordered_map<std::string, int> index;

    static VarPool& instance() {
        static VarPool pool;
        return pool;
    }

    VarId intern(const std::string& s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(names.size());
        names.push_back(s);
        index.emplace(s, id);
        return id;
    }

    const std::string& name(VarId id) const { return names.at(id); }
};

inline VarId var_id(const std::string& name) { return VarPool::instance().intern(name); }
inline const std::string& var_name(VarId id) { return VarPool::instance().name(id); }

// canonical parameter variables: update parameters y1.., tuple variables x1..
inline VarId param_var(int i) { return var_id("y" + std::to_string(i + 1)); }
inline VarId tuple_var(int j) { return var_id("x" + std::to_string(j + 1)); }

// ------------------------------------------------------------------
// Schema
// ------------------------------------------------------------------

enum class SymKind { Input, AuxRel, AuxFun, PrecompRel, PrecompFun, BuiltinFun };

struct SymbolDecl {
    std::string name;
    int arity = 0;
    SymKind kind = SymKind::AuxRel;
};

struct Schema {
    std::vector<SymbolDecl> syms;
    int accept = -1;
    bool setsucc = false;
    int succ_sym = -1, pre_sym = -1, min_sym = -1;

    int add(const std::string& name, int arity, SymKind kind) {
        if (find(name) >= 0) throw Error("duplicate symbol in schema: " + name);
        if (arity < 0) throw Error("negative arity for symbol " + name);
        syms.push_back({name, arity, kind});
        return static_cast<int>(syms.size()) - 1;
    }

    int add_accept() {
        accept = add("accept", 0, SymKind::AuxRel);
        return accept;
    }

    void enable_setsucc() {
        setsucc = true;
        succ_sym = add("succ", 1, SymKind::BuiltinFun);
        pre_sym = add("pre", 1, SymKind::BuiltinFun);
        min_sym = add("min", 0, SymKind::BuiltinFun);
    }

    int find(const std::string& name) const {
        for (size_t i = 0; i < syms.size(); ++i)
            if (syms[i].name == name) return static_cast<int>(i);
        return -1;
    }

    int size() const { return static_cast<int>(syms.size()); }
    int arity(int s) const { return syms.at(s).arity; }
    SymKind kind(int s) const { return syms.at(s).kind; }
    const std::string& name(int s) const { return syms.at(s).name; }

    bool is_function(int s) const {
        SymKind k = kind(s);
        return k == SymKind::AuxFun || k == SymKind::PrecompFun || k == SymKind::BuiltinFun;
    }
    bool is_relation(int s) const { return !is_function(s); }
    bool updatable(int s) const {
        SymKind k = kind(s);
        return k == SymKind::AuxRel || k == SymKind::AuxFun;
    }
};

// schema whose input symbols mirror the given vocabulary, in order
inline std::shared_ptr<Schema> make_schema(const Vocabulary& input) {
    auto sch = std::make_shared<Schema>();
    for (int i = 0; i < input.size(); ++i) sch->add(input.name(i), input.arity(i), SymKind::Input);
    return sch;
}

// ------------------------------------------------------------------
// Terms and formulas
// ------------------------------------------------------------------

struct TermNode;
struct FormulaNode;
using Term = std::shared_ptr<const TermNode>;
using Formula = std::shared_ptr<const FormulaNode>;

namespace detail {
inline uint32_t next_uid() {
    static uint32_t counter = 0;
    return ++counter;
}
}  // namespace detail

struct TermNode {
    enum class K { Var, Apply, Ite };
    K k;
    VarId var = -1;
    int sym = -1;
    std::vector<Term> args;
    Formula cond;
    Term a, b;
    uint32_t uid = detail::next_uid();
};

struct FormulaNode {
    enum class K { True, False, Rel, Eq, Lt, Not, And, Or, Exists, Forall };
    K k;
    int sym = -1;
    std::vector<Term> args;      // Rel arguments; Eq/Lt use two entries
    std::vector<Formula> kids;   // Not: 1, And/Or: n, Exists/Forall: 1
    VarId var = -1;
    uint32_t uid = detail::next_uid();
};

inline Term var(VarId v) {
    auto n = std::make_shared<TermNode>();
    n->k = TermNode::K::Var;
    n->var = v;
    return n;
}
inline Term var(const std::string& name) { return var(var_id(name)); }
inline Term vx(int j) { return var(tuple_var(j)); }
inline Term vy(int i) { return var(param_var(i)); }

inline Term app(const Schema& sch, int sym, std::vector<Term> args) {
    if (!sch.is_function(sym))
        throw Error("app: " + sch.name(sym) + " is not a function symbol");
    if (static_cast<int>(args.size()) != sch.arity(sym))
        throw Error("arity mismatch applying function " + sch.name(sym));
    auto n = std::make_shared<TermNode>();
    n->k = TermNode::K::Apply;
    n->sym = sym;
    n->args = std::move(args);
    return n;
}

inline Term ite(Formula c, Term a, Term b) {
    auto n = std::make_shared<TermNode>();
    n->k = TermNode::K::Ite;
    n->cond = std::move(c);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline Formula tru() {
    auto n = std::make_shared<FormulaNode>();
    n->k = FormulaNode::K::True;
    return n;
}
inline Formula fls() {
    auto n = std::make_shared<FormulaNode>();
    n->k = FormulaNode::K::False;
    return n;
}

inline Formula rel(const Schema& sch, int sym, std::vector<Term> args) {
    if (!sch.is_relation(sym))
        throw Error("rel: " + sch.name(sym) + " is not a relation symbol");
    if (static_cast<int>(args.size()) != sch.arity(sym))
        throw Error("arity mismatch in atom of relation " + sch.name(sym));
    auto n = std::make_shared<FormulaNode>();
    n->k = FormulaNode::K::Rel;
    n->sym = sym;
    n->args = std::move(args);
    return n;
}

inline Formula eq(Term a, Term b) {
    auto n = std::make_shared<FormulaNode>();
    n->k = FormulaNode::K::Eq;
    n->args = {std::move(a), std::move(b)};
    return n;
}
inline Formula lt(Term a, Term b) {
    auto n = std::make_shared<FormulaNode>();
    n->k = FormulaNode::K::Lt;
    n->args = {std::move(a), std::move(b)};
    return n;
}

inline Formula bnot(Formula f) {
    if (f->k == FormulaNode::K::True) return fls();
    if (f->k == FormulaNode::K::False) return tru();
    if (f->k == FormulaNode::K::Not) return f->kids[0];
    auto n = std::make_shared<FormulaNode>();
    n->k = FormulaNode::K::Not;
    n->kids = {std::move(f)};
    return n;
}

inline Formula conj(std::vector<Formula> fs) {
    std::vector<Formula> kids;
    for (auto& f : fs) {
        if (f->k == FormulaNode::K::False) return fls();
        if (f->k == FormulaNode::K::True) continue;
        if (f->k == FormulaNode::K::And)
            kids.insert(kids.end(), f->kids.begin(), f->kids.end());
        else
            kids.push_back(f);
    }
    if (kids.empty()) return tru();
    if (kids.size() == 1) return kids[0];
    auto n = std::make_shared<FormulaNode>();
    n->k = FormulaNode::K::And;
    n->kids = std::move(kids);
    return n;
}

inline Formula disj(std::vector<Formula> fs) {
    std::vector<Formula> kids;
    for (auto& f : fs) {
        if (f->k == FormulaNode::K::True) return tru();
        if (f->k == FormulaNode::K::False) continue;
        if (f->k == FormulaNode::K::Or)
            kids.insert(kids.end(), f->kids.begin(), f->kids.end());
        else
            kids.push_back(f);
    }
    if (kids.empty()) return fls();
    if (kids.size() == 1) return kids[0];
    auto n = std::make_shared<FormulaNode>();
    n->k = FormulaNode::K::Or;
    n->kids = std::move(kids);
    return n;
}

inline Formula band(Formula a, Formula b) { return conj({std::move(a), std::move(b)}); }
inline Formula bor(Formula a, Formula b) { return disj({std::move(a), std::move(b)}); }
inline Formula le(Term a, Term b) { return bnot(lt(std::move(b), std::move(a))); }
inline Formula neq(Term a, Term b) { return bnot(eq(std::move(a), std::move(b))); }

inline Formula quant(FormulaNode::K k, VarId v, Formula body) {
    auto n = std::make_shared<FormulaNode>();
    n->k = k;
    n->var = v;
    n->kids = {std::move(body)};
    return n;
}
inline Formula exists(VarId v, Formula body) {
    return quant(FormulaNode::K::Exists, v, std::move(body));
}
inline Formula forall(VarId v, Formula body) {
    return quant(FormulaNode::K::Forall, v, std::move(body));
}

// a <= t <= b
inline Formula in_closed(Term t, Term a, Term b) {
    return band(le(a, t), le(t, b));
}
// a < t < b
inline Formula in_open(Term t, Term a, Term b) {
    return band(lt(a, t), lt(t, b));
}

// ------------------------------------------------------------------
// Printing (for diagnostics and tests)
// ------------------------------------------------------------------

inline void print_term(const Schema&, const Term&, std::string&);

inline void print_formula(const Schema& sch, const Formula& f, std::string& out) {
    using K = FormulaNode::K;
    switch (f->k) {
        case K::True: out += "true"; break;
        case K::False: out += "false"; break;
        case K::Rel: {
            out += sch.name(f->sym);
            if (!f->args.empty()) {
                out += '(';
                for (size_t i = 0; i < f->args.size(); ++i) {
                    if (i) out += ',';
                    print_term(sch, f->args[i], out);
                }
                out += ')';
            }
            break;
        }
        case K::Eq:
        case K::Lt:
            out += '(';
            print_term(sch, f->args[0], out);
            out += f->k == K::Eq ? " = " : " < ";
            print_term(sch, f->args[1], out);
            out += ')';
            break;
        case K::Not:
            out += "!";
            print_formula(sch, f->kids[0], out);
            break;
        case K::And:
        case K::Or: {
            out += '(';
            for (size_t i = 0; i < f->kids.size(); ++i) {
                if (i) out += f->k == K::And ? " & " : " | ";
                print_formula(sch, f->kids[i], out);
            }
            out += ')';
            break;
        }
        case K::Exists:
        case K::Forall:
            out += f->k == K::Exists ? "E " : "A ";
            out += var_name(f->var);
            out += ". ";
            print_formula(sch, f->kids[0], out);
            break;
    }
}

inline void print_term(const Schema& sch, const Term& t, std::string& out) {
    using K = TermNode::K;
    switch (t->k) {
        case K::Var: out += var_name(t->var); break;
        case K::Apply: {
            out += sch.name(t->sym);
            if (!t->args.empty()) {
                out += '(';
                for (size_t i = 0; i < t->args.size(); ++i) {
                    if (i) out += ',';
                    print_term(sch, t->args[i], out);
                }
                out += ')';
            }
            break;
        }
        case K::Ite:
            out += "ite(";
            print_formula(sch, t->cond, out);
            out += ", ";
            print_term(sch, t->a, out);
            out += ", ";
            print_term(sch, t->b, out);
            out += ')';
            break;
    }
}

inline std::string to_string(const Schema& sch, const Formula& f) {
    std::string s;
    print_formula(sch, f, s);
    return s;
}
inline std::string to_string(const Schema& sch, const Term& t) {
    std::string s;
    print_term(sch, t, s);
    return s;
}

// ------------------------------------------------------------------
// Dynamic programs
// ------------------------------------------------------------------

enum class Tier { Prop, PropSucc, QF, FO };

inline const char* tier_name(Tier t) {
    switch (t) {
        case Tier::Prop: return "Prop";
        case Tier::PropSucc: return "PropSucc";
        case Tier::QF: return "QF";
        case Tier::FO: return "FO";
    }
    return "?";
}

struct AbsUpdate {
    ConcreteUpdate::Kind kind = ConcreteUpdate::Kind::Reset;
    int sym = -1;

    static AbsUpdate ins(int sym) { return {ConcreteUpdate::Kind::InsSym, sym}; }
    static AbsUpdate reset() { return {ConcreteUpdate::Kind::Reset, -1}; }
    static AbsUpdate ins_rel(int rel) { return {ConcreteUpdate::Kind::InsTuple, rel}; }
    static AbsUpdate del_rel(int rel) { return {ConcreteUpdate::Kind::DelTuple, rel}; }

    bool operator<(const AbsUpdate& o) const {
        if (kind != o.kind) return kind < o.kind;
        return sym < o.sym;
    }
    bool operator==(const AbsUpdate& o) const { return kind == o.kind && sym == o.sym; }
};

struct UpdateDef {
    std::map<int, Formula> rel;  // updatable relation symbol -> update formula
    std::map<int, Term> fun;     // updatable function symbol -> update term
};

struct ProgramState;

struct CompiledUpdate;  // below

struct DynamicProgram {
    std::string name;
    bool word_mode = true;
    Alphabet alphabet;      // word mode
    Vocabulary input_vocab; // general mode; word mode: word_vocabulary(alphabet)
    std::shared_ptr<Schema> schema;

    std::map<AbsUpdate, UpdateDef> updates;
    std::map<int, Formula> init_formulas;  // beta per updatable relation

    // Fills precomputed tables (and, for precomputation-initialized programs,
    // initial contents of updatable symbols) on a fresh state.
    std::function<void(ProgramState&)> precompute;

    enum class InitialInput { Empty, Uniform };
    InitialInput initial_input = InitialInput::Empty;
    int initial_symbol = -1;  // Uniform: every position carries this symbol

    mutable std::map<std::pair<AbsUpdate, int>, std::shared_ptr<CompiledUpdate>> compiled_cache;

    const Vocabulary& input() const { return input_vocab; }

    void set_word_alphabet(const Alphabet& a) {
        word_mode = true;
        alphabet = a;
        input_vocab = word_vocabulary(a);
    }

    void set_general_vocab(const Vocabulary& v) {
        word_mode = false;
        input_vocab = v;
    }

    UpdateDef& def(const AbsUpdate& u) { return updates[u]; }

    void set_rel_update(const AbsUpdate& u, int sym, Formula f) {
        if (!schema->updatable(sym) || !schema->is_relation(sym))
            throw Error("update formula target is not an updatable relation: " + schema->name(sym));
        updates[u].rel[sym] = std::move(f);
    }
    void set_fun_update(const AbsUpdate& u, int sym, Term t) {
        if (!schema->updatable(sym) || !schema->is_function(sym))
            throw Error("update term target is not an updatable function: " + schema->name(sym));
        updates[u].fun[sym] = std::move(t);
    }

    // every (abstract update, updatable symbol) pair must have a definition
    void validate() const {
        for (const auto& [u, def] : updates) {
            for (int s = 0; s < schema->size(); ++s) {
                if (!schema->updatable(s)) continue;
                if (schema->is_relation(s)) {
                    if (!def.rel.count(s))
                        throw Error("missing update formula for relation " + schema->name(s));
                } else {
                    if (!def.fun.count(s))
                        throw Error("missing update term for function " + schema->name(s));
                }
            }
        }
    }
};

// ------------------------------------------------------------------
// Program state
// ------------------------------------------------------------------

struct ProgramState {
    const DynamicProgram* prog = nullptr;
    int n = 0;
    std::vector<RelTable> rel;               // per schema symbol (relations)
    std::vector<std::vector<Element>> fun;   // per schema symbol (functions)

    const Schema& schema() const { return *prog->schema; }

    bool accept() const { return rel[schema().accept].get(0); }

    bool rel_get(int sym, std::initializer_list<Element> t) const {
        std::vector<Element> v(t);
        return rel[sym].get_tuple(v.data());
    }

    Element fun_get(int sym, std::initializer_list<Element> t) const {
        const auto& tab = fun[sym];
        uint64_t idx = 0;
        for (Element e : t) idx = idx * n + static_cast<uint64_t>(e - 1);
        return tab[idx];
    }

    int label(Element i) const {
        const auto& a = prog->alphabet;
        for (int s = 0; s < a.size(); ++s)
            if (rel[s].get_tuple(&i)) return s;
        return -1;
    }

    Word word() const {
        Word w;
        for (Element i = 1; i <= n; ++i) {
            int l = label(i);
            if (l >= 0) w.push_back(l);
        }
        return w;
    }
};

// ------------------------------------------------------------------
// Reference evaluation (simple recursive semantics)
// ------------------------------------------------------------------

constexpr int kMaxVarSlots = 64;

struct Env {
    Element val[kMaxVarSlots] = {0};
    uint64_t bound = 0;

    void bind(VarId v, Element e) {
        if (v >= kMaxVarSlots) throw Error("too many distinct variables");
        val[v] = e;
        bound |= (uint64_t(1) << v);
    }
    void unbind(VarId v) { bound &= ~(uint64_t(1) << v); }
    bool is_bound(VarId v) const { return (bound >> v) & 1; }
};

inline bool eval_formula(const ProgramState& st, const Formula& f, Env& env);

inline Element eval_term(const ProgramState& st, const Term& t, Env& env) {
    switch (t->k) {
        case TermNode::K::Var:
            if (!env.is_bound(t->var))
                throw Error("unbound variable " + var_name(t->var));
            return env.val[t->var];
        case TermNode::K::Apply: {
            const Schema& sch = st.schema();
            Element a0 = 0;
            uint64_t idx = 0;
            for (size_t i = 0; i < t->args.size(); ++i) {
                Element e = eval_term(st, t->args[i], env);
                if (i == 0) a0 = e;
                idx = idx * st.n + static_cast<uint64_t>(e - 1);
            }
            if (sch.kind(t->sym) == SymKind::BuiltinFun) {
                if (t->sym == sch.succ_sym) return a0 < st.n ? a0 + 1 : st.n;
                if (t->sym == sch.pre_sym) return a0 > 1 ? a0 - 1 : 1;
                return 1;  // min
            }
            return st.fun[t->sym][idx];
        }
        case TermNode::K::Ite:
            return eval_formula(st, t->cond, env) ? eval_term(st, t->a, env)
                                                  : eval_term(st, t->b, env);
    }
    throw Error("corrupt term");
}

inline bool eval_formula(const ProgramState& st, const Formula& f, Env& env) {
    using K = FormulaNode::K;
    switch (f->k) {
        case K::True: return true;
        case K::False: return false;
        case K::Rel: {
            Element t[8];
            for (size_t i = 0; i < f->args.size(); ++i) t[i] = eval_term(st, f->args[i], env);
            return st.rel[f->sym].get_tuple(t);
        }
        case K::Eq: return eval_term(st, f->args[0], env) == eval_term(st, f->args[1], env);
        case K::Lt: return eval_term(st, f->args[0], env) < eval_term(st, f->args[1], env);
        case K::Not: return !eval_formula(st, f->kids[0], env);
        case K::And:
            for (const auto& k : f->kids)
                if (!eval_formula(st, k, env)) return false;
            return true;
        case K::Or:
            for (const auto& k : f->kids)
                if (eval_formula(st, k, env)) return true;
            return false;
        case K::Exists:
        case K::Forall: {
            bool was_bound = env.is_bound(f->var);
            Element old = env.val[f->var];
            bool result = f->k == K::Forall;
            for (Element v = 1; v <= st.n; ++v) {
                env.bind(f->var, v);
                bool b = eval_formula(st, f->kids[0], env);
                if (f->k == K::Exists && b) { result = true; break; }
                if (f->k == K::Forall && !b) { result = false; break; }
            }
            if (was_bound) env.bind(f->var, old);
            else env.unbind(f->var);
            return result;
        }
    }
    throw Error("corrupt formula");
}

// ------------------------------------------------------------------
// Compiled evaluation
// ------------------------------------------------------------------

// Flat DAG representation of one formula or term. Shared subterms keep a memo
// slot; memoization is enabled only for quantifier-free roots (their value is
// fixed for a fixed variable assignment).
struct Compiled {
    enum TOp : uint8_t { T_VAR, T_APPLY, T_SUCC, T_PRE, T_MIN, T_ITE };
    enum FOp : uint8_t { F_TRUE, F_FALSE, F_REL, F_EQ, F_LT, F_NOT, F_AND, F_OR, F_EXISTS, F_FORALL };

    struct TN {
        uint8_t op;
        int8_t slot = -1;        // T_VAR
        int32_t sym = -1;        // T_APPLY
        int32_t memo = -1;
        uint32_t kids0 = 0;      // offset into tkids (args), or ite: cond,a,b
        uint16_t nkids = 0;
        uint32_t cond = 0, a = 0, b = 0;  // T_ITE (cond: formula id)
    };
    struct FN {
        uint8_t op;
        int8_t slot = -1;        // quantifier slot
        int32_t sym = -1;        // F_REL
        int32_t memo = -1;
        uint32_t kids0 = 0;      // F_REL: term args; F_AND/F_OR: formula kids
        uint16_t nkids = 0;
        uint32_t a = 0;          // F_EQ/F_LT: term a; F_NOT/quant: kid formula
        uint32_t b = 0;          // F_EQ/F_LT: term b
    };

    std::vector<TN> tnodes;
    std::vector<FN> fnodes;
    std::vector<uint32_t> tkids;
    std::vector<uint32_t> fkids;
    uint32_t root = 0;
    bool root_is_formula = true;
    bool has_quantifier = false;
    int n_slots = 0;
    std::vector<int8_t> slot_of_var;  // VarId -> slot (-1 absent)

    int memo_t = 0, memo_f = 0;

    // scratch (single-threaded evaluation state)
    mutable std::vector<uint32_t> t_ep, f_ep;
    mutable std::vector<Element> t_val;
    mutable std::vector<uint8_t> f_val;
    mutable uint32_t epoch = 0;

    int slot(VarId v) const {
        if (v >= static_cast<int>(slot_of_var.size())) return -1;
        return slot_of_var[v];
    }

    void bump() const {
        if (++epoch == 0) {
            std::fill(t_ep.begin(), t_ep.end(), 0);
            std::fill(f_ep.begin(), f_ep.end(), 0);
            epoch = 1;
        }
    }
};

namespace detail {

struct CompileCtx {
    Compiled& out;
    std::unordered_map<const TermNode*, uint32_t> tmap;
    std::unordered_map<const FormulaNode*, uint32_t> fmap;
    std::unordered_map<const TermNode*, int> tseen;
    std::unordered_map<const FormulaNode*, int> fseen;

    explicit CompileCtx(Compiled& c) : out(c) {}

    int slot_for(VarId v) {
        if (v >= static_cast<int>(out.slot_of_var.size())) out.slot_of_var.resize(v + 1, -1);
        if (out.slot_of_var[v] < 0) {
            if (out.n_slots >= kMaxVarSlots) throw Error("too many variable slots");
            out.slot_of_var[v] = static_cast<int8_t>(out.n_slots++);
        }
        return out.slot_of_var[v];
    }

    void count_t(const Term& t) {
        if (++tseen[t.get()] > 1) return;
        switch (t->k) {
            case TermNode::K::Var: break;
            case TermNode::K::Apply:
                for (const auto& a : t->args) count_t(a);
                break;
            case TermNode::K::Ite:
                count_f(t->cond);
                count_t(t->a);
                count_t(t->b);
                break;
        }
    }
    void count_f(const Formula& f) {
        if (++fseen[f.get()] > 1) return;
        using K = FormulaNode::K;
        switch (f->k) {
            case K::Rel:
            case K::Eq:
            case K::Lt:
                for (const auto& a : f->args) count_t(a);
                break;
            default:
                for (const auto& k : f->kids) count_f(k);
                break;
        }
    }

    uint32_t go_t(const Schema& sch, const Term& t) {
        auto it = tmap.find(t.get());
        if (it != tmap.end()) return it->second;
        Compiled::TN node;
        switch (t->k) {
            case TermNode::K::Var:
                node.op = Compiled::T_VAR;
                node.slot = static_cast<int8_t>(slot_for(t->var));
                break;
            case TermNode::K::Apply: {
                if (sch.kind(t->sym) == SymKind::BuiltinFun) {
                    node.op = t->sym == sch.succ_sym ? Compiled::T_SUCC
                              : t->sym == sch.pre_sym ? Compiled::T_PRE
                                                      : Compiled::T_MIN;
                } else {
                    node.op = Compiled::T_APPLY;
                    node.sym = t->sym;
                }
                std::vector<uint32_t> kid_ids;
                for (const auto& a : t->args) kid_ids.push_back(go_t(sch, a));
                node.kids0 = static_cast<uint32_t>(out.tkids.size());
                node.nkids = static_cast<uint16_t>(kid_ids.size());
                for (uint32_t k : kid_ids) out.tkids.push_back(k);
                break;
            }
            case TermNode::K::Ite:
                node.op = Compiled::T_ITE;
                node.cond = go_f(sch, t->cond);
                node.a = go_t(sch, t->a);
                node.b = go_t(sch, t->b);
                break;
        }
        if (tseen[t.get()] > 1 && t->k != TermNode::K::Var) node.memo = out.memo_t++;
        uint32_t id = static_cast<uint32_t>(out.tnodes.size());
        out.tnodes.push_back(node);
        tmap.emplace(t.get(), id);
        return id;
    }

    uint32_t go_f(const Schema& sch, const Formula& f) {
        auto it = fmap.find(f.get());
        if (it != fmap.end()) return it->second;
        using K = FormulaNode::K;
        Compiled::FN node;
        switch (f->k) {
            case K::True: node.op = Compiled::F_TRUE; break;
            case K::False: node.op = Compiled::F_FALSE; break;
            case K::Rel: {
                node.op = Compiled::F_REL;
                node.sym = f->sym;
                std::vector<uint32_t> kid_ids;
                for (const auto& a : f->args) kid_ids.push_back(go_t(sch, a));
                node.kids0 = static_cast<uint32_t>(out.tkids.size());
                node.nkids = static_cast<uint16_t>(kid_ids.size());
                for (uint32_t k : kid_ids) out.tkids.push_back(k);
                break;
            }
            case K::Eq:
            case K::Lt:
                node.op = f->k == K::Eq ? Compiled::F_EQ : Compiled::F_LT;
                node.a = go_t(sch, f->args[0]);
                node.b = go_t(sch, f->args[1]);
                break;
            case K::Not:
                node.op = Compiled::F_NOT;
                node.a = go_f(sch, f->kids[0]);
                break;
            case K::And:
            case K::Or: {
                node.op = f->k == K::And ? Compiled::F_AND : Compiled::F_OR;
                std::vector<uint32_t> kid_ids;
                for (const auto& k : f->kids) kid_ids.push_back(go_f(sch, k));
                node.kids0 = static_cast<uint32_t>(out.fkids.size());
                node.nkids = static_cast<uint16_t>(kid_ids.size());
                for (uint32_t k : kid_ids) out.fkids.push_back(k);
                break;
            }
            case K::Exists:
            case K::Forall:
                node.op = f->k == K::Exists ? Compiled::F_EXISTS : Compiled::F_FORALL;
                node.slot = static_cast<int8_t>(slot_for(f->var));
                node.a = go_f(sch, f->kids[0]);
                out.has_quantifier = true;
                break;
        }
        if (fseen[f.get()] > 1 && f->k != K::True && f->k != K::False) node.memo = out.memo_f++;
        uint32_t id = static_cast<uint32_t>(out.fnodes.size());
        out.fnodes.push_back(node);
        fmap.emplace(f.get(), id);
        return id;
    }
};

}  // namespace detail

inline Compiled compile_formula(const Schema& sch, const Formula& f) {
    Compiled c;
    detail::CompileCtx cc(c);
    cc.count_f(f);
    c.root = cc.go_f(sch, f);
    c.root_is_formula = true;
    c.t_ep.assign(c.memo_t, 0);
    c.t_val.assign(c.memo_t, 0);
    c.f_ep.assign(c.memo_f, 0);
    c.f_val.assign(c.memo_f, 0);
    return c;
}

inline Compiled compile_term(const Schema& sch, const Term& t) {
    Compiled c;
    detail::CompileCtx cc(c);
    cc.count_t(t);
    c.root = cc.go_t(sch, t);
    c.root_is_formula = false;
    c.t_ep.assign(c.memo_t, 0);
    c.t_val.assign(c.memo_t, 0);
    c.f_ep.assign(c.memo_f, 0);
    c.f_val.assign(c.memo_f, 0);
    return c;
}

struct EvalCtx {
    const ProgramState* st = nullptr;
    int n = 0;
    Element env[kMaxVarSlots];
    bool use_memo = false;
};

inline bool ev_f(const Compiled& c, uint32_t id, EvalCtx& ctx);

inline Element ev_t(const Compiled& c, uint32_t id, EvalCtx& ctx) {
    const Compiled::TN& nd = c.tnodes[id];
    if (nd.memo >= 0 && ctx.use_memo && c.t_ep[nd.memo] == c.epoch) return c.t_val[nd.memo];
    Element r = 0;
    switch (nd.op) {
        case Compiled::T_VAR: return ctx.env[nd.slot];
        case Compiled::T_MIN: r = 1; break;
        case Compiled::T_SUCC: {
            Element a = ev_t(c, c.tkids[nd.kids0], ctx);
            r = a < ctx.n ? a + 1 : ctx.n;
            break;
        }
        case Compiled::T_PRE: {
            Element a = ev_t(c, c.tkids[nd.kids0], ctx);
            r = a > 1 ? a - 1 : 1;
            break;
        }
        case Compiled::T_APPLY: {
            uint64_t idx = 0;
            for (int i = 0; i < nd.nkids; ++i)
                idx = idx * ctx.n + static_cast<uint64_t>(ev_t(c, c.tkids[nd.kids0 + i], ctx) - 1);
            r = ctx.st->fun[nd.sym][idx];
            break;
        }
        case Compiled::T_ITE:
            r = ev_f(c, nd.cond, ctx) ? ev_t(c, nd.a, ctx) : ev_t(c, nd.b, ctx);
            break;
    }
    if (nd.memo >= 0 && ctx.use_memo) {
        c.t_ep[nd.memo] = c.epoch;
        c.t_val[nd.memo] = r;
    }
    return r;
}

inline bool ev_f(const Compiled& c, uint32_t id, EvalCtx& ctx) {
    const Compiled::FN& nd = c.fnodes[id];
    if (nd.memo >= 0 && ctx.use_memo && c.f_ep[nd.memo] == c.epoch) return c.f_val[nd.memo];
    bool r = false;
    switch (nd.op) {
        case Compiled::F_TRUE: return true;
        case Compiled::F_FALSE: return false;
        case Compiled::F_REL: {
            Element t[8];
            for (int i = 0; i < nd.nkids; ++i) t[i] = ev_t(c, c.tkids[nd.kids0 + i], ctx);
            r = ctx.st->rel[nd.sym].get_tuple(t);
            break;
        }
        case Compiled::F_EQ: r = ev_t(c, nd.a, ctx) == ev_t(c, nd.b, ctx); break;
        case Compiled::F_LT: r = ev_t(c, nd.a, ctx) < ev_t(c, nd.b, ctx); break;
        case Compiled::F_NOT: r = !ev_f(c, nd.a, ctx); break;
        case Compiled::F_AND:
            r = true;
            for (int i = 0; i < nd.nkids; ++i)
                if (!ev_f(c, c.fkids[nd.kids0 + i], ctx)) { r = false; break; }
            break;
        case Compiled::F_OR:
            r = false;
            for (int i = 0; i < nd.nkids; ++i)
                if (ev_f(c, c.fkids[nd.kids0 + i], ctx)) { r = true; break; }
            break;
        case Compiled::F_EXISTS:
        case Compiled::F_FORALL: {
            Element saved = ctx.env[nd.slot];
            r = nd.op == Compiled::F_FORALL;
            for (Element v = 1; v <= ctx.n; ++v) {
                ctx.env[nd.slot] = v;
                bool b = ev_f(c, nd.a, ctx);
                if (nd.op == Compiled::F_EXISTS && b) { r = true; break; }
                if (nd.op == Compiled::F_FORALL && !b) { r = false; break; }
            }
            ctx.env[nd.slot] = saved;
            break;
        }
    }
    if (nd.memo >= 0 && ctx.use_memo) {
        c.f_ep[nd.memo] = c.epoch;
        c.f_val[nd.memo] = static_cast<uint8_t>(r);
    }
    return r;
}

// Compiled definitions for one (abstract update, target symbol) pair.
struct CompiledUpdate {
    Compiled code;
    std::vector<int> param_slots;  // slot of y_i (-1 if unused)
    std::vector<int> tuple_slots;  // slot of x_j (-1 if unused)
};

inline std::shared_ptr<CompiledUpdate> compiled_for(const DynamicProgram& p, const AbsUpdate& u,
                                                    int sym) {
    auto key = std::make_pair(u, sym);
    auto it = p.compiled_cache.find(key);
    if (it != p.compiled_cache.end()) return it->second;

    const UpdateDef& def = p.updates.at(u);
    auto cu = std::make_shared<CompiledUpdate>();
    if (p.schema->is_relation(sym))
        cu->code = compile_formula(*p.schema, def.rel.at(sym));
    else
        cu->code = compile_term(*p.schema, def.fun.at(sym));

    int nparams = p.word_mode ? 1 : p.input_vocab.arity(u.sym);
    for (int i = 0; i < nparams; ++i) cu->param_slots.push_back(cu->code.slot(param_var(i)));
    for (int j = 0; j < p.schema->arity(sym); ++j)
        cu->tuple_slots.push_back(cu->code.slot(tuple_var(j)));
    p.compiled_cache.emplace(key, cu);
    return cu;
}

// ------------------------------------------------------------------
// Initial state, snapshot updates, runs
// ------------------------------------------------------------------

inline ProgramState initial_state(const DynamicProgram& p, int n) {
    if (n <= 0) throw Error("universe size must be at least 1, got " + std::to_string(n));
    if (p.schema->accept < 0) throw Error("program schema lacks the accept relation");
    ProgramState st;
    st.prog = &p;
    st.n = n;
    const Schema& sch = *p.schema;
    st.rel.resize(sch.size());
    st.fun.resize(sch.size());
    for (int s = 0; s < sch.size(); ++s) {
        if (sch.kind(s) == SymKind::BuiltinFun) continue;
        if (sch.is_relation(s)) {
            st.rel[s].init(n, sch.arity(s));
        } else {
            // default: map every tuple to its first element; constants to 1
            uint64_t count = RelTable::pow_count(n, sch.arity(s));
            st.fun[s].assign(count, 1);
            if (sch.arity(s) >= 1) {
                uint64_t block = RelTable::pow_count(n, sch.arity(s) - 1);
                for (Element e = 1; e <= n; ++e)
                    for (uint64_t i = 0; i < block; ++i) st.fun[s][(e - 1) * block + i] = e;
            }
        }
    }
    // uniform initial word (change-only semantics)
    if (p.initial_input == DynamicProgram::InitialInput::Uniform) {
        for (Element i = 1; i <= n; ++i) st.rel[p.initial_symbol].set_tuple(&i, true);
    }
    // initialization formulas (beta), evaluated on the otherwise-empty state
    if (!p.init_formulas.empty()) {
        ProgramState base = st;
        for (const auto& [sym, beta] : p.init_formulas) {
            Compiled code = compile_formula(sch, beta);
            EvalCtx ctx;
            ctx.st = &base;
            ctx.n = n;
            ctx.use_memo = false;
            int arity = sch.arity(sym);
            std::vector<int> slots;
            for (int j = 0; j < arity; ++j) slots.push_back(code.slot(tuple_var(j)));
            std::vector<Element> tup(arity, 1);
            uint64_t total = RelTable::pow_count(n, arity);
            for (uint64_t idx = 0; idx < total; ++idx) {
                for (int j = 0; j < arity; ++j)
                    if (slots[j] >= 0) ctx.env[slots[j]] = tup[j];
                st.rel[sym].set(idx, ev_f(code, code.root, ctx));
                for (int j = arity - 1; j >= 0; --j) {
                    if (++tup[j] <= n) break;
                    tup[j] = 1;
                }
            }
        }
    }
    if (p.precompute) p.precompute(st);
    return st;
}

inline void check_update(const DynamicProgram& p, const ProgramState& st,
                         const ConcreteUpdate& u) {
    for (Element x : u.args)
        if (x < 1 || x > st.n)
            throw Error("update position " + std::to_string(x) +
                        " out of range for universe size " + std::to_string(st.n));
    AbsUpdate key{u.kind, u.kind == ConcreteUpdate::Kind::Reset ? -1 : u.sym};
    if (!p.updates.count(key)) throw Error("program has no update definitions for this update kind");
    if (!p.word_mode && static_cast<int>(u.args.size()) != p.input_vocab.arity(u.sym))
        throw Error("tuple update arity mismatch for " + p.input_vocab.name(u.sym));
}

// Snapshot semantics: every new relation tuple and function value is computed
// from the old state; afterwards the input structure is updated.
inline void apply_update(const DynamicProgram& p, ProgramState& st, const ConcreteUpdate& u) {
    check_update(p, st, u);
    const Schema& sch = *p.schema;
    AbsUpdate key{u.kind, u.kind == ConcreteUpdate::Kind::Reset ? -1 : u.sym};

    ProgramState next = st;  // old tables stay readable in st

    EvalCtx ctx;
    ctx.st = &st;
    ctx.n = st.n;

    for (int sym = 0; sym < sch.size(); ++sym) {
        if (!sch.updatable(sym)) continue;
        auto cu = compiled_for(p, key, sym);
        const Compiled& code = cu->code;
        ctx.use_memo = !code.has_quantifier;
        for (size_t i = 0; i < cu->param_slots.size(); ++i)
            if (cu->param_slots[i] >= 0) ctx.env[cu->param_slots[i]] = u.args[i];

        int arity = sch.arity(sym);
        uint64_t total = RelTable::pow_count(st.n, arity);
        std::vector<Element> tup(arity, 1);
        bool is_rel = sch.is_relation(sym);
        for (uint64_t idx = 0; idx < total; ++idx) {
            for (int j = 0; j < arity; ++j)
                if (cu->tuple_slots[j] >= 0) ctx.env[cu->tuple_slots[j]] = tup[j];
            code.bump();
            if (is_rel)
                next.rel[sym].set(idx, ev_f(code, code.root, ctx));
            else
                next.fun[sym][idx] = ev_t(code, code.root, ctx);
            for (int j = arity - 1; j >= 0; --j) {
                if (++tup[j] <= st.n) break;
                tup[j] = 1;
            }
        }
    }

    // input structure update (labels / tuples), after aux evaluation
    switch (u.kind) {
        case ConcreteUpdate::Kind::InsSym:
            for (int s = 0; s < p.alphabet.size(); ++s)
                next.rel[s].set_tuple(&u.args[0], s == u.sym);
            break;
        case ConcreteUpdate::Kind::Reset:
            for (int s = 0; s < p.alphabet.size(); ++s) next.rel[s].set_tuple(&u.args[0], false);
            break;
        case ConcreteUpdate::Kind::InsTuple:
            next.rel[u.sym].set_tuple(u.args.data(), true);
            break;
        case ConcreteUpdate::Kind::DelTuple:
            next.rel[u.sym].set_tuple(u.args.data(), false);
            break;
    }

    st = std::move(next);
}

// Stepwise runner keeping the state accessible between updates.
struct Runner {
    const DynamicProgram* prog;
    ProgramState st;

    Runner(const DynamicProgram& p, int n) : prog(&p), st(initial_state(p, n)) {}

    bool step(const ConcreteUpdate& u) {
        apply_update(*prog, st, u);
        return st.accept();
    }
};

inline std::vector<bool> run_program(const DynamicProgram& p, int n, const UpdateSequence& us) {
    Runner r(p, n);
    std::vector<bool> trace;
    trace.reserve(us.size());
    for (const auto& u : us) trace.push_back(r.step(u));
    return trace;
}

// ------------------------------------------------------------------
// Tier checking and structural scans
// ------------------------------------------------------------------

namespace detail {

struct TierScan {
    bool quantifier = false;
    bool nonbuiltin_fun = false;
    bool builtin_fun = false;
    bool ite_term = false;
    int max_quant_depth = 0;
    // formulas are shared DAGs; remember visited nodes (per depth for the
    // quantifier-depth bookkeeping)
    std::set<std::pair<const void*, int>> seen;

    bool visited(const void* p, int depth) { return !seen.insert({p, depth}).second; }

    void term(const Schema& sch, const Term& t, int depth) {
        if (visited(t.get(), depth)) return;
        switch (t->k) {
            case TermNode::K::Var: return;
            case TermNode::K::Apply:
                if (sch.kind(t->sym) == SymKind::BuiltinFun) builtin_fun = true;
                else nonbuiltin_fun = true;
                for (const auto& a : t->args) term(sch, a, depth);
                return;
            case TermNode::K::Ite:
                ite_term = true;
                formula(sch, t->cond, depth);
                term(sch, t->a, depth);
                term(sch, t->b, depth);
                return;
        }
    }

    void formula(const Schema& sch, const Formula& f, int depth) {
        if (visited(f.get(), depth)) return;
        using K = FormulaNode::K;
        switch (f->k) {
            case K::Rel:
            case K::Eq:
            case K::Lt:
                for (const auto& a : f->args) term(sch, a, depth);
                return;
            case K::Exists:
            case K::Forall:
                quantifier = true;
                max_quant_depth = std::max(max_quant_depth, depth + 1);
                formula(sch, f->kids[0], depth + 1);
                return;
            default:
                for (const auto& k : f->kids) formula(sch, k, depth);
                return;
        }
    }
};

inline TierScan scan_program(const DynamicProgram& p) {
    TierScan scan;
    const Schema& sch = *p.schema;
    for (const auto& [u, def] : p.updates) {
        for (const auto& [sym, f] : def.rel) scan.formula(sch, f, 0);
        for (const auto& [sym, t] : def.fun) scan.term(sch, t, 0);
    }
    for (const auto& [sym, f] : p.init_formulas) scan.formula(sch, f, 0);
    return scan;
}

}  // namespace detail

struct StructuralStats {
    bool any_quantifier = false;
    int max_quant_depth = 0;
    bool any_function_app = false;   // non-builtin function applications
    bool any_builtin_app = false;    // succ/pre/min applications
    bool has_function_symbols = false;
};

inline StructuralStats structural_stats(const DynamicProgram& p) {
    detail::TierScan scan = detail::scan_program(p);
    StructuralStats s;
    s.any_quantifier = scan.quantifier;
    s.max_quant_depth = scan.max_quant_depth;
    s.any_function_app = scan.nonbuiltin_fun || scan.ite_term;
    s.any_builtin_app = scan.builtin_fun;
    for (int i = 0; i < p.schema->size(); ++i) {
        SymKind k = p.schema->kind(i);
        if (k == SymKind::AuxFun || k == SymKind::PrecompFun) s.has_function_symbols = true;
    }
    return s;
}

// Least tier admitting the program: quantifiers anywhere => FO; auxiliary or
// precomputed function symbols (or any non-SetSucc function use) => QF;
// SetSucc built-ins used => PropSucc; otherwise Prop.
inline Tier check_tier(const DynamicProgram& p) {
    StructuralStats s = structural_stats(p);
    if (s.any_quantifier) return Tier::FO;
    if (s.any_function_app || s.has_function_symbols) return Tier::QF;
    if (s.any_builtin_app) return Tier::PropSucc;
    return Tier::Prop;
}

// ------------------------------------------------------------------
// Substitution utilities
// ------------------------------------------------------------------

struct RelSubst {
    std::vector<VarId> params;
    Formula body;
};
struct FunSubst {
    std::vector<VarId> params;
    Term body;
};

namespace detail {

// variable -> term substitution; callers keep parameter and quantifier
// variable namespaces disjoint, which is asserted here
struct VarSubst {
    const std::map<VarId, Term>& m;
    std::unordered_map<const TermNode*, Term> tcache;
    std::unordered_map<const FormulaNode*, Formula> fcache;

    explicit VarSubst(const std::map<VarId, Term>& map) : m(map) {}

    Term term(const Term& t) {
        auto it = tcache.find(t.get());
        if (it != tcache.end()) return it->second;
        Term out;
        switch (t->k) {
            case TermNode::K::Var: {
                auto mit = m.find(t->var);
                out = mit != m.end() ? mit->second : t;
                break;
            }
            case TermNode::K::Apply: {
                auto n = std::make_shared<TermNode>(*t);
                n->uid = next_uid();
                n->args.clear();
                for (const auto& a : t->args) n->args.push_back(term(a));
                out = n;
                break;
            }
            case TermNode::K::Ite: {
                auto n = std::make_shared<TermNode>();
                n->k = TermNode::K::Ite;
                n->cond = formula(t->cond);
                n->a = term(t->a);
                n->b = term(t->b);
                out = n;
                break;
            }
        }
        tcache.emplace(t.get(), out);
        return out;
    }

    Formula formula(const Formula& f) {
        auto it = fcache.find(f.get());
        if (it != fcache.end()) return it->second;
        using K = FormulaNode::K;
        Formula out;
        switch (f->k) {
            case K::True:
            case K::False: out = f; break;
            case K::Rel:
            case K::Eq:
            case K::Lt: {
                auto n = std::make_shared<FormulaNode>(*f);
                n->uid = next_uid();
                n->args.clear();
                for (const auto& a : f->args) n->args.push_back(term(a));
                out = n;
                break;
            }
            case K::Exists:
            case K::Forall: {
                if (m.count(f->var))
                    throw Error("substitution would capture quantified variable " +
                                var_name(f->var));
                auto n = std::make_shared<FormulaNode>(*f);
                n->uid = next_uid();
                n->kids = {formula(f->kids[0])};
                out = n;
                break;
            }
            default: {
                auto n = std::make_shared<FormulaNode>(*f);
                n->uid = next_uid();
                n->kids.clear();
                for (const auto& k : f->kids) n->kids.push_back(formula(k));
                out = n;
                break;
            }
        }
        fcache.emplace(f.get(), out);
        return out;
    }
};

}  // namespace detail

inline Term subst_vars(const Term& t, const std::map<VarId, Term>& m) {
    detail::VarSubst vs(m);
    return vs.term(t);
}
inline Formula subst_vars(const Formula& f, const std::map<VarId, Term>& m) {
    detail::VarSubst vs(m);
    return vs.formula(f);
}

// One-level rewriting of relation atoms and function applications by guarded
// definitions: an atom R(t...) becomes body[params := t...]; inserted bodies
// are not rewritten again.
struct Rewriter {
    std::map<int, RelSubst> rels;
    std::map<int, FunSubst> funs;
    std::unordered_map<const TermNode*, Term> tcache;
    std::unordered_map<const FormulaNode*, Formula> fcache;

    Term term(const Term& t) {
        auto it = tcache.find(t.get());
        if (it != tcache.end()) return it->second;
        Term out;
        switch (t->k) {
            case TermNode::K::Var: out = t; break;
            case TermNode::K::Apply: {
                std::vector<Term> args;
                args.reserve(t->args.size());
                for (const auto& a : t->args) args.push_back(term(a));
                auto fit = funs.find(t->sym);
                if (fit != funs.end()) {
                    std::map<VarId, Term> m;
                    for (size_t i = 0; i < fit->second.params.size(); ++i)
                        m[fit->second.params[i]] = args[i];
                    out = subst_vars(fit->second.body, m);
                } else {
                    auto n = std::make_shared<TermNode>(*t);
                    n->uid = detail::next_uid();
                    n->args = std::move(args);
                    out = n;
                }
                break;
            }
            case TermNode::K::Ite: {
                auto n = std::make_shared<TermNode>();
                n->k = TermNode::K::Ite;
                n->cond = formula(t->cond);
                n->a = term(t->a);
                n->b = term(t->b);
                out = n;
                break;
            }
        }
        tcache.emplace(t.get(), out);
        return out;
    }

    Formula formula(const Formula& f) {
        auto it = fcache.find(f.get());
        if (it != fcache.end()) return it->second;
        using K = FormulaNode::K;
        Formula out;
        switch (f->k) {
            case K::True:
            case K::False: out = f; break;
            case K::Rel: {
                std::vector<Term> args;
                for (const auto& a : f->args) args.push_back(term(a));
                auto rit = rels.find(f->sym);
                if (rit != rels.end()) {
                    std::map<VarId, Term> m;
                    for (size_t i = 0; i < rit->second.params.size(); ++i)
                        m[rit->second.params[i]] = args[i];
                    out = subst_vars(rit->second.body, m);
                } else {
                    auto n = std::make_shared<FormulaNode>(*f);
                    n->uid = detail::next_uid();
                    n->args = std::move(args);
                    out = n;
                }
                break;
            }
            case K::Eq:
            case K::Lt: {
                auto n = std::make_shared<FormulaNode>(*f);
                n->uid = detail::next_uid();
                n->args = {term(f->args[0]), term(f->args[1])};
                out = n;
                break;
            }
            default: {
                auto n = std::make_shared<FormulaNode>(*f);
                n->uid = detail::next_uid();
                n->kids.clear();
                for (const auto& k : f->kids) n->kids.push_back(formula(k));
                out = n;
                break;
            }
        }
        fcache.emplace(f.get(), out);
        return out;
    }
};

// ------------------------------------------------------------------
// Initialization elimination (adds I0; first update reads the betas)
// ------------------------------------------------------------------

// Rewrites each atom R(t...) of an initialized relation to
//   (!I0 & beta_R(t...)) | (I0 & R(t...)).
// I0 holds once some update has occurred (its update formulas are constantly
// true), so the first update evaluates the betas and later updates the stored
// relations. Programs without init formulas are returned unchanged.
inline DynamicProgram eliminate_init(const DynamicProgram& p) {
    if (p.init_formulas.empty()) return p;
    DynamicProgram q = p;
    q.compiled_cache.clear();
    q.schema = std::make_shared<Schema>(*p.schema);
    std::string iname = "I0";
    while (q.schema->find(iname) >= 0) iname += "_";
    int i0 = q.schema->add(iname, 0, SymKind::AuxRel);

    Formula i0_atom = rel(*q.schema, i0, {});
    Rewriter rw;
    for (const auto& [sym, beta] : p.init_formulas) {
        int arity = q.schema->arity(sym);
        std::vector<VarId> params;
        std::vector<Term> args;
        for (int j = 0; j < arity; ++j) {
            params.push_back(tuple_var(j));
            args.push_back(vx(j));
        }
        Formula self = rel(*q.schema, sym, args);
        rw.rels[sym] = {params, bor(band(bnot(i0_atom), beta), band(i0_atom, self))};
    }

    std::map<AbsUpdate, UpdateDef> new_updates;
    for (const auto& [u, def] : p.updates) {
        UpdateDef nd;
        for (const auto& [sym, f] : def.rel) nd.rel[sym] = rw.formula(f);
        for (const auto& [sym, t] : def.fun) nd.fun[sym] = rw.term(t);
        nd.rel[i0] = tru();
        new_updates[u] = std::move(nd);
    }
    q.updates = std::move(new_updates);
    q.init_formulas.clear();
    return q;
}

// ------------------------------------------------------------------
// Update-discipline normalization
// ------------------------------------------------------------------

// Input: a word/tree-mode program correct for disciplined sequences only
// (reset hits a filled position, insert hits an empty one). Output: a program
// correct for arbitrary sequences. Reset on an empty position keeps all
// auxiliary values; insert on a filled position composes reset-then-insert by
// substituting the reset definitions for every symbol read in the insert
// definitions (input label reads see the position cleared).
inline DynamicProgram normalize_update_discipline(const DynamicProgram& p) {
    if (!p.word_mode) throw Error("normalize_update_discipline requires a word/tree program");
    if (!p.updates.count(AbsUpdate::reset()))
        throw Error("normalize_update_discipline requires reset definitions");
    DynamicProgram q = p;
    q.compiled_cache.clear();
    const Schema& sch = *q.schema;
    Term z = vy(0);

    std::vector<Formula> unlabeled;
    for (int s = 0; s < p.alphabet.size(); ++s) unlabeled.push_back(bnot(rel(sch, s, {z})));
    Formula z_empty = conj(unlabeled);

    const UpdateDef& resetdef = p.updates.at(AbsUpdate::reset());
    Rewriter rw;
    for (const auto& [sym, f] : resetdef.rel) {
        std::vector<VarId> params;
        for (int j = 0; j < sch.arity(sym); ++j) params.push_back(tuple_var(j));
        rw.rels[sym] = {params, f};
    }
    for (const auto& [sym, t] : resetdef.fun) {
        std::vector<VarId> params;
        for (int j = 0; j < sch.arity(sym); ++j) params.push_back(tuple_var(j));
        rw.funs[sym] = {params, t};
    }
    // input labels after reset(z): R_sigma(t) & t != z
    for (int s = 0; s < p.alphabet.size(); ++s) {
        VarId xp = tuple_var(0);
        rw.rels[s] = {{xp}, band(rel(sch, s, {var(xp)}), neq(var(xp), z))};
    }

    std::map<AbsUpdate, UpdateDef> new_updates;
    for (const auto& [u, def] : p.updates) {
        UpdateDef nd;
        if (u.kind == ConcreteUpdate::Kind::InsSym) {
            for (const auto& [sym, f] : def.rel)
                nd.rel[sym] = bor(band(z_empty, f), band(bnot(z_empty), rw.formula(f)));
            for (const auto& [sym, t] : def.fun)
                nd.fun[sym] = ite(z_empty, t, rw.term(t));
        } else {  // reset: identity when z was already empty, except for accept
            // A no-op reset must still report membership of the unchanged
            // string (epsilon included), and the initial accept is empty; so
            // accept alone is recomputed through a disciplined ins;reset
            // composition at z, which nets out to the same string.
            Rewriter ins_rw;
            {
                const UpdateDef& insdef = p.updates.at(AbsUpdate::ins(0));
                for (const auto& [sym, f] : insdef.rel) {
                    std::vector<VarId> params;
                    for (int j = 0; j < sch.arity(sym); ++j) params.push_back(tuple_var(j));
                    ins_rw.rels[sym] = {params, f};
                }
                for (const auto& [sym, t] : insdef.fun) {
                    std::vector<VarId> params;
                    for (int j = 0; j < sch.arity(sym); ++j) params.push_back(tuple_var(j));
                    ins_rw.funs[sym] = {params, t};
                }
                for (int s = 0; s < p.alphabet.size(); ++s) {
                    VarId xp = tuple_var(0);
                    Formula lab = rel(sch, s, {var(xp)});
                    ins_rw.rels[s] = {{xp}, s == 0 ? bor(lab, eq(var(xp), z))
                                                   : band(lab, neq(var(xp), z))};
                }
            }
            for (const auto& [sym, f] : def.rel) {
                std::vector<Term> args;
                for (int j = 0; j < sch.arity(sym); ++j) args.push_back(vx(j));
                Formula on_empty =
                    sym == sch.accept ? ins_rw.formula(f) : rel(sch, sym, args);
                nd.rel[sym] = bor(band(z_empty, on_empty), band(bnot(z_empty), f));
            }
            for (const auto& [sym, t] : def.fun) {
                std::vector<Term> args;
                for (int j = 0; j < sch.arity(sym); ++j) args.push_back(vx(j));
                nd.fun[sym] = ite(z_empty, app(sch, sym, args), t);
            }
        }
        new_updates[u] = std::move(nd);
    }
    q.updates = std::move(new_updates);
    return q;
}

}  // namespace dynlang
