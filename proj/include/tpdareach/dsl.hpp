#pragma once

// Line-oriented model language:
//
//   tpda                      # or: pda
//   states s1 s2 s3;
//   init s1;
//   clocks x y;               # tpda only
//   alphabet a b;
//   rule s1 -> s2 : push(a, [1:3));
//   rule s2 -> s3 : test(x, (1:inf));
//
// Operations: nop, test(x, IV), reset(x, IV), push(a, IV), pop(a, IV) for
// tpda; nop, push(a), pop(a) for pda. IV is [n:m], [n:m), (n:m] or (n:m)
// with inf allowed as an open upper bound.

#include "tpdareach/core_automata.hpp"
#include "tpdareach/errors.hpp"
#include "tpdareach/tpda.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tpdareach::dsl {

class ParseError : public ModelError {
public:
    ParseError(std::size_t line, std::size_t column, std::string token, const std::string &message);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string &token() const { return token_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string token_;
};

struct PdaModelRule {
    std::string src;
    pda::StackOp::Kind kind = pda::StackOp::Kind::Nop;
    std::string symbol;
    std::string dst;
    friend bool operator==(const PdaModelRule &, const PdaModelRule &) = default;
};

struct PdaModel {
    std::vector<std::string> states;
    std::string init;
    std::vector<std::string> alphabet;
    std::vector<PdaModelRule> rules;
    friend bool operator==(const PdaModel &, const PdaModel &) = default;
};

using Model = std::variant<tpda::Tpda, PdaModel>;

Model parse_model(std::string_view source);
Model load_model(const std::string &path);

// Canonical text; parse_model(render_model(m)) == m.
std::string render_model(const Model &m);

// Indexed automaton for a named PDA model (states and symbols in declaration order).
pda::Pda compile(const PdaModel &m);
std::optional<pda::StateId> state_id(const PdaModel &m, const std::string &name);
std::string render_rule(const PdaModel &m, const pda::PdaRule &r);

} // namespace tpdareach::dsl
