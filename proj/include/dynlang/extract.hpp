#pragma once

// Constructive automaton extraction from quantifier-free programs: k-types of
// suffix windows, indiscernibility diagnostics, and the BFS over window types
// that reads a DFA off a DynProp recognizer.

#include <deque>
#include <sstream>

#include "regular.hpp"

namespace dynlang {

// Type of an l-tuple: truth of every relation atom over variables x1..xl
// (all schema relations with arity <= l, all argument patterns, 0-ary atoms
// included) plus the order/equality atoms. Canonically serialized.
struct KType {
    std::string key;
    bool accept = false;

    bool operator==(const KType& o) const { return key == o.key; }
    bool operator<(const KType& o) const { return key < o.key; }
};

inline KType compute_type(const ProgramState& st, const std::vector<Element>& tuple) {
    const Schema& sch = st.schema();
    int l = static_cast<int>(tuple.size());
    std::ostringstream out;
    KType t;
    for (int s = 0; s < sch.size(); ++s) {
        if (!sch.is_relation(s)) continue;
        int a = sch.arity(s);
        if (a > l && a > 0) continue;
        // all patterns of variables x_{j1}..x_{ja}
        std::vector<int> pat(a, 0);
        uint64_t total = 1;
        for (int i = 0; i < a; ++i) total *= l;
        for (uint64_t p = 0; p < total; ++p) {
            Element args[8];
            for (int i = 0; i < a; ++i) args[i] = tuple[pat[i]];
            bool v = st.rel[s].get_tuple(args);
            out << (v ? '1' : '0');
            if (s == sch.accept && v) t.accept = true;
            for (int i = a - 1; i >= 0; --i) {
                if (++pat[i] < l) break;
                pat[i] = 0;
            }
        }
    }
    out << '|';
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
            out << (tuple[i] < tuple[j] ? '<' : tuple[i] == tuple[j] ? '=' : '>');
        }
    t.key = out.str();
    return t;
}

// brute-force: all ordered l-tuples over I share one type
inline bool check_indiscernible(const ProgramState& st, const std::vector<Element>& set, int l) {
    if (static_cast<int>(set.size()) < l) throw Error("set smaller than tuple width");
    std::vector<Element> sorted = set;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> idx(l);
    for (int i = 0; i < l; ++i) idx[i] = i;
    bool first = true;
    KType ref;
    int m = static_cast<int>(sorted.size());
    while (true) {
        std::vector<Element> tup(l);
        for (int i = 0; i < l; ++i) tup[i] = sorted[idx[i]];
        KType t = compute_type(st, tup);
        if (first) {
            ref = t;
            first = false;
        } else if (!(t == ref)) {
            return false;
        }
        // next ordered combination
        int i = l - 1;
        while (i >= 0 && idx[i] == m - l + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < l; ++j) idx[j] = idx[j - 1] + 1;
    }
    return true;
}

struct ExtractionResult {
    Dfa dfa;
    int types_discovered = 0;
    bool closed = false;
    std::string diagnostic;  // non-empty on inconsistent transitions / non-closure
    bool indiscernibility_ok = true;
};

// Reads a DFA off a DynProp word program by simulating left-to-right
// insertions and keying automaton states by the k-type of the untouched
// window right of the written prefix. A (type, symbol) pair reappearing with
// a different successor type aborts with a diagnostic; for a genuine DynProp
// recognizer this cannot happen.
inline ExtractionResult extract_dfa_checked(const DynamicProgram& p, int k, int maxlen) {
    if (check_tier(p) > Tier::Prop)
        throw Error("extract_dfa requires a quantifier- and function-free program");
    if (p.precompute || p.initial_input != DynamicProgram::InitialInput::Empty)
        throw Error("extract_dfa requires a program without precomputation");
    if (k < 1) throw Error("window width must be at least 1");

    ExtractionResult res;
    int n = maxlen + k + 1;

    struct Pending {
        ProgramState st;
        int written;  // prefix length
        int id;       // automaton state of the window type
    };

    auto window_type = [&](const ProgramState& st, int written) {
        std::vector<Element> tup(k);
        for (int i = 0; i < k; ++i) tup[i] = written + 1 + i;
        return compute_type(st, tup);
    };

    std::map<std::string, int> type_ids;
    std::vector<KType> types;
    std::vector<int> expansions;  // per type: how many representatives were expanded
    std::deque<Pending> frontier;
    std::map<std::pair<int, int>, int> trans;
    const int rep_limit = 2;  // expand a second representative per type to feed the check

    ProgramState init = initial_state(p, n);
    KType t0 = window_type(init, 0);
    type_ids[t0.key] = 0;
    types.push_back(t0);
    expansions.push_back(0);
    frontier.push_back({std::move(init), 0, 0});

    while (!frontier.empty()) {
        Pending cur = std::move(frontier.front());
        frontier.pop_front();
        if (expansions[cur.id] >= rep_limit) continue;
        ++expansions[cur.id];
        if (cur.written >= maxlen) {
            res.diagnostic = "type closure not reached within maxlen=" + std::to_string(maxlen);
            res.types_discovered = static_cast<int>(types.size());
            return res;
        }
        for (int sym = 0; sym < p.alphabet.size(); ++sym) {
            ProgramState next = cur.st;
            apply_update(p, next, ConcreteUpdate::ins(sym, cur.written + 1));
            KType t = window_type(next, cur.written + 1);

            // Observation-1 diagnostic: the untouched suffix stays
            // k-indiscernible (sampled pairs of ordered k-tuples)
            {
                int lo = cur.written + 2, hi = n;
                if (hi - lo + 1 >= k + 1) {
                    std::vector<Element> a(k), b(k);
                    for (int i = 0; i < k; ++i) a[i] = lo + i;
                    for (int i = k - 1; i >= 0; --i) b[k - 1 - i] = hi - i;
                    for (int i = 1; i < k; ++i)
                        if (b[i] <= b[i - 1]) b[i] = b[i - 1] + 1;
                    if (!(compute_type(next, a) == compute_type(next, b)))
                        res.indiscernibility_ok = false;
                }
            }

            auto it = type_ids.find(t.key);
            int id;
            if (it == type_ids.end()) {
                id = static_cast<int>(types.size());
                type_ids[t.key] = id;
                types.push_back(t);
                expansions.push_back(0);
                frontier.push_back({std::move(next), cur.written + 1, id});
            } else {
                id = it->second;
                if (expansions[id] < rep_limit)
                    frontier.push_back({std::move(next), cur.written + 1, id});
            }
            auto tr = trans.find({cur.id, sym});
            if (tr != trans.end() && tr->second != id) {
                res.diagnostic = "inconsistent transition: type " + std::to_string(cur.id) +
                                 " under symbol " + p.alphabet.name(sym) +
                                 " reached two distinct successor types";
                res.types_discovered = static_cast<int>(types.size());
                return res;
            }
            trans[{cur.id, sym}] = id;
        }
    }

    res.closed = true;
    res.types_discovered = static_cast<int>(types.size());

    // The initial window type cannot tell whether the empty word is in the
    // language (accept is empty before any update), so the automaton gets a
    // dedicated start state whose acceptance is probed with ins;reset.
    bool eps_accept;
    {
        ProgramState probe = initial_state(p, n);
        apply_update(p, probe, ConcreteUpdate::ins(0, 1));
        apply_update(p, probe, ConcreteUpdate::reset(1));
        eps_accept = probe.accept();
    }

    Dfa& d = res.dfa;
    int t = static_cast<int>(types.size());
    d.states = t + 1;  // state t is the dedicated start, a copy of type 0
    d.alphabet = p.alphabet;
    d.start = t;
    d.delta.assign(d.states, std::vector<int>(p.alphabet.size(), 0));
    d.accepting.assign(d.states, false);
    for (int q = 0; q < t; ++q) d.accepting[q] = types[q].accept;
    d.accepting[t] = eps_accept;
    for (const auto& [key, target] : trans) d.delta[key.first][key.second] = target;
    for (int s = 0; s < p.alphabet.size(); ++s) d.delta[t][s] = d.delta[0][s];
    return res;
}

inline Dfa extract_dfa(const DynamicProgram& p, int k, int maxlen) {
    ExtractionResult r = extract_dfa_checked(p, k, maxlen);
    if (!r.closed) throw Error("extract_dfa: " + r.diagnostic);
    if (!r.diagnostic.empty()) throw Error("extract_dfa: " + r.diagnostic);
    return r.dfa;
}

// largest updatable-relation arity, the window width of the extraction
inline int max_aux_arity(const DynamicProgram& p) {
    int k = 1;
    for (int s = 0; s < p.schema->size(); ++s)
        if (p.schema->updatable(s)) k = std::max(k, p.schema->arity(s));
    return k;
}

}  // namespace dynlang
