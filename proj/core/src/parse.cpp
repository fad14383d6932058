#include "zsm/parse.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace zsm {

ParseError::ParseError(std::vector<Diagnostic> diags)
    : Error([&diags] {
        std::ostringstream out;
        out << "parse failed:";
        for (const auto& d : diags) out << "\n  " << d.to_string();
        return out.str();
      }()),
      diagnostics(std::move(diags)) {}

namespace {

struct Token {
  enum class Kind { Ident, Int, Punct, Arrow, End } kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    int line = line_, col = col_;
    if (pos_ >= text_.size()) return {Token::Kind::End, "", line, col};
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        word += text_[pos_];
        advance();
      }
      return {Token::Kind::Ident, word, line, col};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits += text_[pos_];
        advance();
      }
      return {Token::Kind::Int, digits, line, col};
    }
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      advance();
      advance();
      return {Token::Kind::Arrow, "->", line, col};
    }
    advance();
    return {Token::Kind::Punct, std::string(1, c), line, col};
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct RawProduct {
  std::string symbol;
  Target::Kind kind;
  std::uint32_t in_membrane = 0;
  int line, col;
};

struct RawRule {
  std::string name;
  std::vector<std::string> lhs;
  std::vector<RawProduct> rhs;
  int line, col;
};

struct RawMembrane {
  std::uint32_t index = 0;
  std::vector<std::string> init;
  std::vector<RawRule> rules;
  std::vector<RawMembrane> children;
  int line, col;
  int init_line, init_col;
};

struct SyntaxError {
  Diagnostic diag;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { bump(); }

  RawMembrane parse_system(std::vector<std::string>* objects) {
    expect_keyword("psystem");
    expect_punct("{");
    expect_keyword("objects");
    expect_punct(":");
    while (tok_.kind == Token::Kind::Ident) {
      objects->push_back(tok_.text);
      bump();
    }
    if (objects->empty()) fail("expected at least one object name after 'objects:'");
    expect_punct(";");
    RawMembrane root = parse_membrane();
    expect_punct("}");
    if (tok_.kind != Token::Kind::End) fail("trailing input after closing '}'");
    return root;
  }

 private:
  RawMembrane parse_membrane() {
    RawMembrane m;
    m.line = tok_.line;
    m.col = tok_.col;
    expect_keyword("membrane");
    if (tok_.kind != Token::Kind::Int) fail("expected membrane index");
    m.index = static_cast<std::uint32_t>(std::stoul(tok_.text));
    bump();
    expect_punct("{");
    m.init_line = tok_.line;
    m.init_col = tok_.col;
    expect_keyword("init");
    expect_punct(":");
    while (tok_.kind == Token::Kind::Ident) {
      m.init.push_back(tok_.text);
      bump();
    }
    expect_punct(";");
    while (true) {
      if (tok_.kind == Token::Kind::Ident && tok_.text == "rule") {
        m.rules.push_back(parse_rule());
      } else if (tok_.kind == Token::Kind::Ident && tok_.text == "membrane") {
        m.children.push_back(parse_membrane());
      } else {
        break;
      }
    }
    expect_punct("}");
    return m;
  }

  RawRule parse_rule() {
    RawRule r;
    r.line = tok_.line;
    r.col = tok_.col;
    expect_keyword("rule");
    if (tok_.kind != Token::Kind::Ident) fail("expected rule name");
    r.name = tok_.text;
    bump();
    expect_punct(":");
    while (tok_.kind == Token::Kind::Ident) {
      r.lhs.push_back(tok_.text);
      bump();
    }
    if (tok_.kind != Token::Kind::Arrow) fail("expected '->' in rule body");
    bump();
    if (tok_.kind == Token::Kind::Punct && tok_.text == ";") {
      bump();
      return r;
    }
    r.rhs.push_back(parse_product());
    while (tok_.kind == Token::Kind::Punct && tok_.text == ",") {
      bump();
      r.rhs.push_back(parse_product());
    }
    expect_punct(";");
    return r;
  }

  RawProduct parse_product() {
    RawProduct p;
    p.line = tok_.line;
    p.col = tok_.col;
    expect_punct("(");
    if (tok_.kind != Token::Kind::Ident) fail("expected object name in product");
    p.symbol = tok_.text;
    bump();
    expect_punct(",");
    if (tok_.kind != Token::Kind::Ident) fail("expected target 'here', 'out' or 'in(<membrane>)'");
    if (tok_.text == "here") {
      p.kind = Target::Kind::Here;
      bump();
    } else if (tok_.text == "out") {
      p.kind = Target::Kind::Out;
      bump();
    } else if (tok_.text == "in") {
      p.kind = Target::Kind::In;
      bump();
      expect_punct("(");
      if (tok_.kind != Token::Kind::Int) fail("expected membrane index in 'in(...)'");
      p.in_membrane = static_cast<std::uint32_t>(std::stoul(tok_.text));
      bump();
      expect_punct(")");
    } else {
      fail("unknown target '" + tok_.text + "'");
    }
    expect_punct(")");
    return p;
  }

  void expect_keyword(const std::string& word) {
    if (tok_.kind != Token::Kind::Ident || tok_.text != word)
      fail("expected '" + word + "'" + found());
    bump();
  }

  void expect_punct(const std::string& p) {
    if (tok_.kind != Token::Kind::Punct || tok_.text != p)
      fail("expected '" + p + "'" + found());
    bump();
  }

  std::string found() const {
    if (tok_.kind == Token::Kind::End) return ", found end of input";
    return ", found '" + tok_.text + "'";
  }

  [[noreturn]] void fail(const std::string& message) {
    throw SyntaxError{Diagnostic{tok_.line, tok_.col, message}};
  }

  void bump() { tok_ = lexer_.next(); }

  Lexer lexer_;
  Token tok_{Token::Kind::End, "", 0, 0};
};

class Builder {
 public:
  Builder(const std::vector<std::string>& objects, const ParseOptions& options)
      : options_(options) {
    sys_.alphabet = objects;
    sys_.allow_skin_out = options.allow_skin_out;
  }

  std::vector<Diagnostic> diagnostics;

  void run(const RawMembrane& root, int objects_line) {
    std::set<std::string> seen;
    for (const auto& name : sys_.alphabet) {
      if (!seen.insert(name).second)
        report(objects_line, 1, "duplicate object name '" + name + "'");
    }

    collect(root, 0);
    std::uint32_t n = static_cast<std::uint32_t>(flat_.size());
    std::set<std::uint32_t> indices;
    for (const auto& [raw, parent] : flat_) {
      if (raw->index < 1 || raw->index > n)
        report(raw->line, raw->col,
               "membrane index " + std::to_string(raw->index) + " outside 1.." +
                   std::to_string(n));
      else if (!indices.insert(raw->index).second)
        report(raw->line, raw->col, "duplicate membrane index " + std::to_string(raw->index));
    }
    if (!diagnostics.empty()) return;
    if (flat_[0].first->index != 1)
      report(flat_[0].first->line, flat_[0].first->col, "the outermost membrane must have index 1");
    for (const auto& [raw, parent] : flat_) {
      if (parent != 0 && parent >= raw->index)
        report(raw->line, raw->col,
               "membrane " + std::to_string(raw->index) + " must have a larger index than its father " +
                   std::to_string(parent));
    }
    if (!diagnostics.empty()) return;

    sys_.parent_of.assign(n, 0);
    sys_.init.assign(n, SymbolMultiset{});
    sys_.rules.assign(n, {});
    for (const auto& [raw, parent] : flat_) {
      sys_.parent_of[raw->index - 1] = parent;
    }
    for (const auto& [raw, parent] : flat_) build_membrane(*raw);
  }

  MembraneSystem take() { return std::move(sys_); }

 private:
  void collect(const RawMembrane& m, std::uint32_t parent) {
    flat_.push_back({&m, parent});
    for (const auto& child : m.children) collect(child, m.index);
  }

  void build_membrane(const RawMembrane& raw) {
    std::uint32_t i = raw.index;
    for (const auto& name : raw.init) {
      if (auto id = sys_.symbol_id(name)) {
        sys_.init[i - 1].add(*id, 1);
      } else {
        report(raw.init_line, raw.init_col, "unknown symbol '" + name + "' in init of membrane " +
                                                std::to_string(i));
      }
    }
    std::set<std::string> names;
    std::set<std::uint32_t> child_set;
    for (const auto& child : raw.children) child_set.insert(child.index);
    for (const auto& rr : raw.rules) {
      if (!names.insert(rr.name).second)
        report(rr.line, rr.col, "duplicate rule name '" + rr.name + "' in membrane " +
                                    std::to_string(i));
      Rule rule;
      rule.name = rr.name;
      if (rr.lhs.empty())
        report(rr.line, rr.col, "empty left-hand side in rule '" + rr.name + "'");
      for (const auto& sym : rr.lhs) {
        if (auto id = sys_.symbol_id(sym))
          rule.lhs.add(*id, 1);
        else
          report(rr.line, rr.col, "unknown symbol '" + sym + "' in rule '" + rr.name + "'");
      }
      for (const auto& p : rr.rhs) {
        auto id = sys_.symbol_id(p.symbol);
        if (!id) {
          report(p.line, p.col, "unknown symbol '" + p.symbol + "' in rule '" + rr.name + "'");
          continue;
        }
        switch (p.kind) {
          case Target::Kind::Here:
            rule.rhs_here.add(*id, 1);
            break;
          case Target::Kind::Out:
            if (i == 1 && !options_.allow_skin_out)
              report(p.line, p.col,
                     "rule '" + rr.name + "' sends objects out of the skin membrane "
                     "(pass --allow-skin-out to accept; such objects are discarded)");
            else
              rule.rhs_out.add(*id, 1);
            break;
          case Target::Kind::In:
            if (!child_set.count(p.in_membrane))
              report(p.line, p.col,
                     "target in(" + std::to_string(p.in_membrane) + ") of rule '" + rr.name +
                         "' is not a direct child of membrane " + std::to_string(i));
            else
              rule.rhs_in[p.in_membrane].add(*id, 1);
            break;
        }
      }
      sys_.rules[i - 1].push_back(std::move(rule));
    }
  }

  void report(int line, int col, const std::string& message) {
    diagnostics.push_back({line, col, message});
  }

  const ParseOptions& options_;
  MembraneSystem sys_;
  std::vector<std::pair<const RawMembrane*, std::uint32_t>> flat_;
};

}  // namespace

ParseResult parse(std::string_view text, const ParseOptions& options) {
  ParseResult result;
  std::vector<std::string> objects;
  try {
    Parser parser(text);
    RawMembrane root = parser.parse_system(&objects);
    Builder builder(objects, options);
    builder.run(root, root.line);
    result.diagnostics = builder.diagnostics;
    if (result.diagnostics.empty()) result.system = builder.take();
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back(e.diag);
  }
  return result;
}

MembraneSystem parse_or_throw(std::string_view text, const ParseOptions& options) {
  ParseResult result = parse(text, options);
  if (!result.ok()) throw ParseError(result.diagnostics);
  return std::move(*result.system);
}

MembraneSystem parse_file_or_throw(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_or_throw(buffer.str(), options);
}

}  // namespace zsm
