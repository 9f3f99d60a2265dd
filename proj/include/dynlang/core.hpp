#pragma once

// Relational structures over finite ordered universes {1..n}, the concrete
// single-position updates, and the word view used by the language families.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynlang {

using Element = int32_t;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input alphabet for word-mode structures. Symbols are arbitrary tokens
// ("a", "(1", ...) identified by index.
struct Alphabet {
    std::vector<std::string> symbols;

    Alphabet() = default;
    Alphabet(std::initializer_list<std::string> syms) : symbols(syms) {}
    explicit Alphabet(std::vector<std::string> syms) : symbols(std::move(syms)) {}

    int size() const { return static_cast<int>(symbols.size()); }

    int index_of(const std::string& s) const {
        for (int i = 0; i < size(); ++i)
            if (symbols[i] == s) return i;
        return -1;
    }

    const std::string& name(int i) const { return symbols.at(i); }
};

// A word is a sequence of alphabet symbol indices.
using Word = std::vector<int>;

inline std::string word_to_string(const Word& w, const Alphabet& a) {
    std::string out;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i > 0 && a.name(w[i - 1]).size() > 1) out += ' ';
        else if (i > 0 && a.name(w[i]).size() > 1) out += ' ';
        out += a.name(w[i]);
    }
    return out;
}

struct RelDecl {
    std::string name;
    int arity = 0;
};

// Input vocabulary: relation symbols with arities. Unary label relations of
// word structures are a special case (one per alphabet symbol).
struct Vocabulary {
    std::vector<RelDecl> rels;

    int add(const std::string& name, int arity) {
        if (arity < 0) throw Error("relation arity must be non-negative: " + name);
        if (find(name) >= 0) throw Error("duplicate relation symbol: " + name);
        rels.push_back({name, arity});
        return static_cast<int>(rels.size()) - 1;
    }

    int find(const std::string& name) const {
        for (size_t i = 0; i < rels.size(); ++i)
            if (rels[i].name == name) return static_cast<int>(i);
        return -1;
    }

    int size() const { return static_cast<int>(rels.size()); }
    int arity(int i) const { return rels.at(i).arity; }
    const std::string& name(int i) const { return rels.at(i).name; }
};

inline Vocabulary word_vocabulary(const Alphabet& a) {
    Vocabulary v;
    for (const auto& s : a.symbols) v.add("R_" + s, 1);
    return v;
}

// Dense bit table for one relation over universe {1..n}.
struct RelTable {
    int arity = 0;
    int n = 0;
    uint64_t tuples = 0;  // n^arity
    std::vector<uint64_t> bits;

    static uint64_t pow_count(int n, int arity) {
        uint64_t r = 1;
        for (int i = 0; i < arity; ++i) r *= static_cast<uint64_t>(n);
        return r;
    }

    void init(int n_, int arity_) {
        n = n_;
        arity = arity_;
        tuples = pow_count(n, arity);
        bits.assign((tuples + 63) / 64, 0);
    }

    uint64_t index(const Element* t) const {
        uint64_t idx = 0;
        for (int i = 0; i < arity; ++i) idx = idx * n + static_cast<uint64_t>(t[i] - 1);
        return idx;
    }

    bool get(uint64_t idx) const { return (bits[idx >> 6] >> (idx & 63)) & 1; }

    void set(uint64_t idx, bool v) {
        if (v) bits[idx >> 6] |= (uint64_t(1) << (idx & 63));
        else bits[idx >> 6] &= ~(uint64_t(1) << (idx & 63));
    }

    bool get_tuple(const Element* t) const { return get(index(t)); }
    void set_tuple(const Element* t, bool v) { set(index(t), v); }

    uint64_t count() const {
        uint64_t c = 0;
        for (uint64_t w : bits) c += static_cast<uint64_t>(__builtin_popcountll(w));
        return c;
    }

    bool operator==(const RelTable& o) const {
        return arity == o.arity && n == o.n && bits == o.bits;
    }
};

// A concrete update: ins_sigma(i) / reset(i) in word or tree mode,
// ins_R(t) / del_R(t) on general structures.
struct ConcreteUpdate {
    enum class Kind { InsSym, Reset, InsTuple, DelTuple };

    Kind kind = Kind::Reset;
    int sym = -1;  // alphabet index (InsSym) or vocabulary relation (InsTuple/DelTuple)
    std::vector<Element> args;

    static ConcreteUpdate ins(int symbol, Element pos) { return {Kind::InsSym, symbol, {pos}}; }
    static ConcreteUpdate reset(Element pos) { return {Kind::Reset, -1, {pos}}; }
    static ConcreteUpdate ins_tuple(int rel, std::vector<Element> t) {
        return {Kind::InsTuple, rel, std::move(t)};
    }
    static ConcreteUpdate del_tuple(int rel, std::vector<Element> t) {
        return {Kind::DelTuple, rel, std::move(t)};
    }

    bool operator==(const ConcreteUpdate& o) const {
        return kind == o.kind && sym == o.sym && args == o.args;
    }
};

using UpdateSequence = std::vector<ConcreteUpdate>;

// Finite structure: universe {1..n} plus one table per vocabulary relation.
// In word mode the label relations are additionally kept single-valued per
// position.
struct Structure {
    int n = 0;
    bool word_mode = false;
    Alphabet alphabet;  // word mode only
    Vocabulary vocab;
    std::vector<RelTable> rels;

    bool has(int rel, const Element* t) const { return rels[rel].get_tuple(t); }

    // word mode label of position i, or -1 if unlabeled
    int label(Element i) const {
        for (int s = 0; s < alphabet.size(); ++s)
            if (rels[s].get_tuple(&i)) return s;
        return -1;
    }
};

inline Structure new_empty_structure(const Vocabulary& vocab, int n) {
    if (n <= 0) throw Error("universe size must be at least 1, got " + std::to_string(n));
    Structure s;
    s.n = n;
    s.vocab = vocab;
    s.rels.resize(vocab.size());
    for (int i = 0; i < vocab.size(); ++i) s.rels[i].init(n, vocab.arity(i));
    return s;
}

inline Structure new_empty_word_structure(const Alphabet& a, int n) {
    Structure s = new_empty_structure(word_vocabulary(a), n);
    s.word_mode = true;
    s.alphabet = a;
    return s;
}

// Word structure where every position carries `sym` (the E^a_n of the
// change-only semantics).
inline Structure new_uniform_word_structure(const Alphabet& a, int n, int sym) {
    Structure s = new_empty_word_structure(a, n);
    for (Element i = 1; i <= n; ++i) s.rels[sym].set_tuple(&i, true);
    return s;
}

inline void check_applicable(const Structure& s, const ConcreteUpdate& u) {
    for (Element x : u.args)
        if (x < 1 || x > s.n)
            throw Error("update position " + std::to_string(x) +
                        " out of range for universe size " + std::to_string(s.n));
    switch (u.kind) {
        case ConcreteUpdate::Kind::InsSym:
            if (!s.word_mode || u.sym < 0 || u.sym >= s.alphabet.size())
                throw Error("ins with unknown alphabet symbol");
            break;
        case ConcreteUpdate::Kind::Reset:
            if (!s.word_mode) throw Error("reset requires a word structure");
            break;
        case ConcreteUpdate::Kind::InsTuple:
        case ConcreteUpdate::Kind::DelTuple:
            if (u.sym < 0 || u.sym >= s.vocab.size())
                throw Error("tuple update with unknown relation");
            if (static_cast<int>(u.args.size()) != s.vocab.arity(u.sym))
                throw Error("tuple update arity mismatch for " + s.vocab.name(u.sym));
            break;
    }
}

inline Structure& apply_input_update(Structure& s, const ConcreteUpdate& u) {
    check_applicable(s, u);
    switch (u.kind) {
        case ConcreteUpdate::Kind::InsSym: {
            Element i = u.args[0];
            for (int sym = 0; sym < s.alphabet.size(); ++sym)
                s.rels[sym].set_tuple(&i, sym == u.sym);
            break;
        }
        case ConcreteUpdate::Kind::Reset: {
            Element i = u.args[0];
            for (int sym = 0; sym < s.alphabet.size(); ++sym) s.rels[sym].set_tuple(&i, false);
            break;
        }
        case ConcreteUpdate::Kind::InsTuple:
            s.rels[u.sym].set_tuple(u.args.data(), true);
            break;
        case ConcreteUpdate::Kind::DelTuple:
            s.rels[u.sym].set_tuple(u.args.data(), false);
            break;
    }
    return s;
}

// Read off the represented word: labels of labeled positions in order.
inline Word word_of(const Structure& s) {
    if (!s.word_mode) throw Error("word_of requires a word structure");
    Word w;
    for (Element i = 1; i <= s.n; ++i) {
        int lab = -1;
        for (int sym = 0; sym < s.alphabet.size(); ++sym) {
            if (s.rels[sym].get_tuple(&i)) {
                if (lab >= 0)
                    throw Error("position " + std::to_string(i) + " carries two labels");
                lab = sym;
            }
        }
        if (lab >= 0) w.push_back(lab);
    }
    return w;
}

}  // namespace dynlang
