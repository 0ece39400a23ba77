#pragma once

// Built-in Java frontend. A tolerant recursive-descent parser for the
// statement and expression grammar of Java methods; declarations outside
// method bodies (fields, initializers, annotations) are skipped. Method
// bodies become small ASTs whose node type names follow the JavaParser
// vocabulary, which is what the path-context extractor walks.

#include <cctype>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace repo2vec::java {

struct AstNode {
  std::string type;
  std::string token;  // nonempty for terminals
  std::vector<AstNode> children;

  static AstNode leaf(std::string type, std::string token) {
    return AstNode{std::move(type), std::move(token), {}};
  }
  static AstNode inner(std::string type, std::vector<AstNode> children = {}) {
    return AstNode{std::move(type), {}, std::move(children)};
  }
  bool is_terminal() const { return children.empty() && !token.empty(); }
};

struct MethodAst {
  std::string name;
  AstNode root;  // MethodDeclaration or ConstructorDeclaration
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what) {}
};

// ---------------------------------------------------------------------------
// Lexer

enum class TokKind { ident, keyword, int_lit, long_lit, float_lit, char_lit, string_lit, text_block, op, end };

struct Token {
  TokKind kind;
  std::string text;
  bool glued;  // no whitespace or comment before this token
  std::size_t line;
};

inline const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> kw = {
      "abstract", "assert",     "boolean",   "break",      "byte",      "case",     "catch",
      "char",     "class",      "const",     "continue",   "default",   "do",       "double",
      "else",     "enum",       "extends",   "final",      "finally",   "float",    "for",
      "goto",     "if",         "implements", "import",    "instanceof", "int",     "interface",
      "long",     "native",     "new",       "package",    "private",   "protected", "public",
      "return",   "short",      "static",    "strictfp",   "super",     "switch",   "synchronized",
      "this",     "throw",      "throws",    "transient",  "try",       "void",     "volatile",
      "while",    "true",       "false",     "null"};
  return kw;
}

inline bool is_primitive(std::string_view s) {
  return s == "boolean" || s == "byte" || s == "char" || s == "short" || s == "int" || s == "long" ||
         s == "float" || s == "double";
}

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  bool glued = false;
  auto at = [&](std::size_t k) { return i + k < src.size() ? src[i + k] : '\0'; };
  auto push = [&](TokKind k, std::size_t begin) {
    out.push_back({k, std::string(src.substr(begin, i - begin)), glued, line});
    glued = true;
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      glued = false;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      glued = false;
      continue;
    }
    if (c == '/' && at(1) == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      glued = false;
      continue;
    }
    if (c == '/' && at(1) == '*') {
      i += 2;
      while (i < src.size() && !(src[i] == '*' && at(1) == '/')) {
        if (src[i] == '\n') ++line;
        ++i;
      }
      if (i >= src.size()) throw ParseError("unterminated comment", line);
      i += 2;
      glued = false;
      continue;
    }
    const std::size_t begin = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
        static_cast<unsigned char>(c) >= 0x80) {
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_' ||
                                src[i] == '$' || static_cast<unsigned char>(src[i]) >= 0x80)) {
        ++i;
      }
      const auto word = src.substr(begin, i - begin);
      push(keywords().count(word) ? TokKind::keyword : TokKind::ident, begin);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(at(1))))) {
      bool is_float = false;
      if (c == '0' && (at(1) == 'x' || at(1) == 'X' || at(1) == 'b' || at(1) == 'B')) {
        i += 2;
        while (i < src.size() && (std::isxdigit(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      } else {
        while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
        if (i < src.size() && src[i] == '.' && std::isdigit(static_cast<unsigned char>(at(1)))) {
          is_float = true;
          ++i;
          while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
        } else if (i < src.size() && src[i] == '.' && !std::isalpha(static_cast<unsigned char>(at(1)))) {
          is_float = true;
          ++i;
        }
        if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
          is_float = true;
          ++i;
          if (i < src.size() && (src[i] == '+' || src[i] == '-')) ++i;
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      TokKind kind = is_float ? TokKind::float_lit : TokKind::int_lit;
      if (i < src.size()) {
        const char s = src[i];
        if (s == 'l' || s == 'L') {
          kind = TokKind::long_lit;
          ++i;
        } else if (s == 'f' || s == 'F' || s == 'd' || s == 'D') {
          kind = TokKind::float_lit;
          ++i;
        }
      }
      push(kind, begin);
      continue;
    }
    if (c == '"' && at(1) == '"' && at(2) == '"') {
      i += 3;
      while (i < src.size() && !(src[i] == '"' && at(1) == '"' && at(2) == '"')) {
        if (src[i] == '\\') ++i;
        if (i < src.size() && src[i] == '\n') ++line;
        ++i;
      }
      if (i >= src.size()) throw ParseError("unterminated text block", line);
      i += 3;
      push(TokKind::text_block, begin);
      continue;
    }
    if (c == '"' || c == '\'') {
      ++i;
      while (i < src.size() && src[i] != c) {
        if (src[i] == '\\') ++i;
        if (i < src.size() && src[i] == '\n') throw ParseError("unterminated literal", line);
        ++i;
      }
      if (i >= src.size()) throw ParseError("unterminated literal", line);
      ++i;
      push(c == '"' ? TokKind::string_lit : TokKind::char_lit, begin);
      continue;
    }
    // Operators. '>' is always a single token so nested generics close
    // cleanly; the parser reassembles >>, >=, >>= from glued pieces.
    static constexpr std::string_view ops[] = {
        "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", "<<", "+=", "-=",
        "*=",  "/=",  "%=", "&=", "|=", "^=", "(",  ")",  "{",  "}",  "[",  "]",  ";",  ",",
        ".",   "@",   "=",  "<",  ">",  "!",  "~",  "?",  ":",  "+",  "-",  "*",  "/",  "&",
        "|",   "^",   "%"};
    bool matched = false;
    for (auto op : ops) {
      if (src.substr(i, op.size()) == op) {
        i += op.size();
        push(TokKind::op, begin);
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line);
  }
  out.push_back({TokKind::end, "", false, line});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : t_(std::move(tokens)) {}

  std::vector<MethodAst> compilation_unit() {
    std::vector<MethodAst> methods;
    while (!at_end()) {
      if (accept(";")) continue;
      if (peek_is_word("package") || peek_is_word("import")) {
        skip_past(";");
        continue;
      }
      skip_modifiers();
      if (!type_declaration(methods)) fail("expected type declaration");
    }
    return methods;
  }

private:
  using Node = AstNode;

  std::vector<Token> t_;
  std::size_t pos_ = 0;

  // -- token helpers -------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    return t_[std::min(pos_ + k, t_.size() - 1)];
  }
  bool at_end() const { return peek().kind == TokKind::end; }
  bool peek_is(std::string_view s, std::size_t k = 0) const {
    const auto& tk = peek(k);
    return (tk.kind == TokKind::op || tk.kind == TokKind::keyword) && tk.text == s;
  }
  bool peek_is_word(std::string_view s, std::size_t k = 0) const {
    const auto& tk = peek(k);
    return (tk.kind == TokKind::ident || tk.kind == TokKind::keyword) && tk.text == s;
  }
  bool peek_ident(std::size_t k = 0) const { return peek(k).kind == TokKind::ident; }
  const Token& next() {
    const Token& tk = t_[pos_];
    if (tk.kind != TokKind::end) ++pos_;
    return tk;
  }
  bool accept(std::string_view s) {
    if (peek_is(s)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "' but found '" + peek().text + "'");
  }
  std::string expect_ident() {
    if (!peek_ident()) fail("expected identifier but found '" + peek().text + "'");
    return next().text;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line); }

  /// Skips a balanced group starting at an opening bracket.
  void skip_balanced() {
    const std::string open = peek().text;
    const std::string close = open == "(" ? ")" : open == "[" ? "]" : open == "{" ? "}" : ">";
    int depth = 0;
    do {
      if (at_end()) fail("unbalanced '" + open + "'");
      if (peek_is(open)) ++depth;
      if (peek_is(close)) --depth;
      next();
    } while (depth > 0);
  }

  void skip_past(std::string_view s) {
    while (!at_end() && !peek_is(s)) {
      if (peek_is("(") || peek_is("{") || peek_is("[")) {
        skip_balanced();
      } else {
        next();
      }
    }
    expect(s);
  }

  void skip_annotation() {
    expect("@");
    expect_ident();
    while (peek_is(".") && peek_ident(1)) {
      next();
      next();
    }
    if (peek_is("(")) skip_balanced();
  }

  void skip_modifiers() {
    static const std::set<std::string, std::less<>> mods = {
        "public", "protected", "private", "static", "abstract", "final", "native", "synchronized",
        "transient", "volatile", "strictfp", "default"};
    while (true) {
      if (peek_is("@") && !peek_is_word("interface", 1)) {
        skip_annotation();
      } else if (peek().kind == TokKind::keyword && mods.count(peek().text) &&
                 !(peek_is_word("synchronized") && peek_is("(", 1)) &&
                 !(peek_is_word("default") && (peek_is(":", 1) || peek_is("->", 1)))) {
        next();
      } else if (peek_is_word("sealed") && peek(1).kind == TokKind::keyword) {
        next();
      } else if (peek_is_word("non") && peek_is("-", 1) && peek_is_word("sealed", 2)) {
        pos_ += 3;
      } else {
        return;
      }
    }
  }

  // -- declarations --------------------------------------------------------

  bool type_declaration(std::vector<MethodAst>& methods) {
    bool is_enum = false;
    if (peek_is("@") && peek_is_word("interface", 1)) {
      next();
      next();
    } else if (peek_is_word("class") || peek_is_word("interface")) {
      next();
    } else if (peek_is_word("enum")) {
      is_enum = true;
      next();
    } else if (peek_is_word("record") && peek_ident(1)) {
      next();
    } else {
      return false;
    }
    const std::string name = expect_ident();
    while (!at_end() && !peek_is("{")) {
      if (peek_is("(") || peek_is("<")) {
        skip_balanced();
      } else {
        next();
      }
    }
    class_body(name, is_enum, methods);
    return true;
  }

  void class_body(const std::string& class_name, bool is_enum, std::vector<MethodAst>& methods) {
    expect("{");
    if (is_enum) {
      while (!at_end() && !peek_is(";") && !peek_is("}")) {
        if (peek_is("(") || peek_is("{")) {
          skip_balanced();
        } else {
          next();
        }
      }
      accept(";");
    }
    while (!accept("}")) {
      if (at_end()) fail("unterminated class body");
      member(class_name, methods);
    }
  }

  void member(const std::string& class_name, std::vector<MethodAst>& methods) {
    if (accept(";")) return;
    skip_modifiers();
    if (type_declaration(methods)) return;
    if (peek_is("{")) {
      skip_balanced();
      return;
    }
    if (peek_is("<")) skip_balanced();
    // Constructor (or compact record constructor).
    if (peek_ident() && peek().text == class_name && (peek_is("(", 1) || peek_is("{", 1))) {
      const std::string name = next().text;
      Node decl = Node::inner("ConstructorDeclaration");
      decl.children.push_back(Node::leaf("SimpleName", name));
      if (peek_is("(")) parameters(decl);
      if (peek_is_word("throws")) {
        while (!peek_is("{")) next();
      }
      decl.children.push_back(block());
      methods.push_back({name, std::move(decl)});
      return;
    }
    Node type = parse_type();
    if (!peek_ident()) fail("expected member name");
    const std::string name = next().text;
    if (!peek_is("(")) {
      skip_past(";");  // field
      return;
    }
    Node decl = Node::inner("MethodDeclaration");
    decl.children.push_back(std::move(type));
    decl.children.push_back(Node::leaf("SimpleName", name));
    parameters(decl);
    while (peek_is("[")) skip_balanced();
    if (peek_is_word("throws")) {
      while (!at_end() && !peek_is("{") && !peek_is(";")) next();
    }
    if (peek_is_word("default")) skip_past(";");
    else if (accept(";")) return;  // abstract or interface method
    else {
      decl.children.push_back(block());
      methods.push_back({name, std::move(decl)});
    }
  }

  void parameters(Node& decl) {
    expect("(");
    if (accept(")")) return;
    do {
      skip_modifiers();
      Node param = Node::inner("Parameter");
      param.children.push_back(parse_type());
      accept("...");
      if (peek_is_word("this")) {
        next();
        continue;
      }
      param.children.push_back(Node::leaf("VariableDeclaratorId", expect_ident()));
      while (peek_is("[")) skip_balanced();
      decl.children.push_back(std::move(param));
    } while (accept(","));
    expect(")");
  }

  // -- types ---------------------------------------------------------------

  void skip_type_arguments() {
    if (!peek_is("<")) return;
    int depth = 0;
    do {
      if (at_end()) fail("unbalanced type arguments");
      if (peek_is("<")) ++depth;
      else if (peek_is(">")) --depth;
      else if (!(peek_ident() || peek_is("?") || peek_is(",") || peek_is(".") || peek_is("[") ||
                 peek_is("]") || peek_is("&") || peek_is("@") || peek_is_word("extends") ||
                 peek_is_word("super") || is_primitive(peek().text))) {
        fail("bad type argument");
      }
      next();
    } while (depth > 0);
  }

  Node parse_type() {
    Node base;
    if (peek().kind == TokKind::keyword && is_primitive(peek().text)) {
      base = Node::leaf("PrimitiveType", next().text);
    } else if (peek_is_word("void")) {
      base = Node::leaf("VoidType", next().text);
    } else if (peek_ident()) {
      std::string name = next().text;
      skip_type_arguments();
      while (peek_is(".") && peek_ident(1)) {
        next();
        name = next().text;
        skip_type_arguments();
      }
      base = Node::leaf("ClassOrInterfaceType", name);
    } else {
      fail("expected type but found '" + peek().text + "'");
    }
    while (peek_is("@")) skip_annotation();
    while (peek_is("[") && peek_is("]", 1)) {
      next();
      next();
      base = Node::inner("ArrayType", {std::move(base)});
    }
    return base;
  }

  /// Speculative type parse; restores position on failure.
  bool try_type(Node& out) {
    const auto save = pos_;
    try {
      out = parse_type();
      return true;
    } catch (const ParseError&) {
      pos_ = save;
      return false;
    }
  }

  // -- statements ----------------------------------------------------------

  Node block() {
    expect("{");
    Node b = Node::inner("BlockStmt");
    while (!accept("}")) {
      if (at_end()) fail("unterminated block");
      b.children.push_back(statement());
    }
    return b;
  }

  bool looks_like_local_decl() {
    const auto save = pos_;
    Node type;
    bool ok = false;
    if (try_type(type) && peek_ident()) {
      ok = peek_is("=", 1) || peek_is(";", 1) || peek_is(",", 1) || peek_is("[", 1) || peek_is(":", 1);
    }
    pos_ = save;
    return ok;
  }

  Node local_var_decl() {
    Node decl = Node::inner("VariableDeclarationExpr");
    decl.children.push_back(parse_type());
    do {
      Node var = Node::inner("VariableDeclarator");
      var.children.push_back(Node::leaf("VariableDeclaratorId", expect_ident()));
      while (peek_is("[")) skip_balanced();
      if (accept("=")) var.children.push_back(peek_is("{") ? array_initializer() : expression());
      decl.children.push_back(std::move(var));
    } while (accept(","));
    return decl;
  }

  Node statement() {
    if (peek_is("{")) return block();
    if (accept(";")) return Node::inner("EmptyStmt");
    if (peek_ident() && peek_is(":", 1)) {
      Node s = Node::inner("LabeledStmt");
      s.children.push_back(Node::leaf("SimpleName", next().text));
      next();
      s.children.push_back(statement());
      return s;
    }
    if (peek_is_word("if")) {
      next();
      Node s = Node::inner("IfStmt");
      expect("(");
      s.children.push_back(expression());
      expect(")");
      s.children.push_back(statement());
      if (peek_is_word("else")) {
        next();
        s.children.push_back(statement());
      }
      return s;
    }
    if (peek_is_word("while")) {
      next();
      Node s = Node::inner("WhileStmt");
      expect("(");
      s.children.push_back(expression());
      expect(")");
      s.children.push_back(statement());
      return s;
    }
    if (peek_is_word("do")) {
      next();
      Node s = Node::inner("DoStmt");
      s.children.push_back(statement());
      if (!peek_is_word("while")) fail("expected while");
      next();
      expect("(");
      s.children.push_back(expression());
      expect(")");
      expect(";");
      return s;
    }
    if (peek_is_word("for")) return for_statement();
    if (peek_is_word("return")) {
      next();
      Node s = Node::inner("ReturnStmt");
      if (!peek_is(";")) s.children.push_back(expression());
      expect(";");
      return s;
    }
    if (peek_is_word("break") || peek_is_word("continue")) {
      Node s = Node::inner(next().text == "break" ? "BreakStmt" : "ContinueStmt");
      if (peek_ident()) s.children.push_back(Node::leaf("SimpleName", next().text));
      expect(";");
      return s;
    }
    if (peek_is_word("throw")) {
      next();
      Node s = Node::inner("ThrowStmt", {expression()});
      expect(";");
      return s;
    }
    if (peek_is_word("yield") && !peek_is("=", 1) && !peek_is("(", 1) && !peek_is(".", 1)) {
      next();
      Node s = Node::inner("YieldStmt", {expression()});
      expect(";");
      return s;
    }
    if (peek_is_word("assert")) {
      next();
      Node s = Node::inner("AssertStmt", {expression()});
      if (accept(":")) s.children.push_back(expression());
      expect(";");
      return s;
    }
    if (peek_is_word("synchronized") && peek_is("(", 1)) {
      next();
      Node s = Node::inner("SynchronizedStmt");
      expect("(");
      s.children.push_back(expression());
      expect(")");
      s.children.push_back(block());
      return s;
    }
    if (peek_is_word("try")) return try_statement();
    if (peek_is_word("switch")) {
      Node s = switch_construct("SwitchStmt");
      return s;
    }
    if (peek_is_word("class") || peek_is_word("interface") || peek_is_word("enum") ||
        ((peek_is_word("abstract") || peek_is_word("final") || peek_is_word("static")) &&
         (peek_is_word("class", 1) || peek_is_word("interface", 1)))) {
      while (!peek_is("{")) next();
      skip_balanced();
      return Node::inner("LocalClassDeclarationStmt");
    }
    if (peek_is_word("final") || peek_is("@")) {
      skip_modifiers();
      Node s = Node::inner("ExpressionStmt", {local_var_decl()});
      expect(";");
      return s;
    }
    if (looks_like_local_decl()) {
      Node s = Node::inner("ExpressionStmt", {local_var_decl()});
      expect(";");
      return s;
    }
    Node s = Node::inner("ExpressionStmt", {expression()});
    expect(";");
    return s;
  }

  Node for_statement() {
    next();
    expect("(");
    // Enhanced for: (Type name : expr)
    {
      const auto save = pos_;
      skip_modifiers();
      Node type;
      if (try_type(type) && peek_ident() && peek_is(":", 1)) {
        Node s = Node::inner("ForEachStmt");
        Node decl = Node::inner("VariableDeclarationExpr");
        decl.children.push_back(std::move(type));
        decl.children.push_back(Node::inner("VariableDeclarator", {Node::leaf("VariableDeclaratorId", next().text)}));
        s.children.push_back(std::move(decl));
        expect(":");
        s.children.push_back(expression());
        expect(")");
        s.children.push_back(statement());
        return s;
      }
      pos_ = save;
    }
    Node s = Node::inner("ForStmt");
    if (!peek_is(";")) {
      skip_modifiers();
      if (looks_like_local_decl()) {
        s.children.push_back(local_var_decl());
      } else {
        do {
          s.children.push_back(expression());
        } while (accept(","));
      }
    }
    expect(";");
    if (!peek_is(";")) s.children.push_back(expression());
    expect(";");
    if (!peek_is(")")) {
      do {
        s.children.push_back(expression());
      } while (accept(","));
    }
    expect(")");
    s.children.push_back(statement());
    return s;
  }

  Node try_statement() {
    next();
    Node s = Node::inner("TryStmt");
    if (accept("(")) {
      while (!accept(")")) {
        skip_modifiers();
        if (looks_like_local_decl()) {
          s.children.push_back(local_var_decl());
        } else {
          s.children.push_back(expression());
        }
        accept(";");
      }
    }
    s.children.push_back(block());
    while (peek_is_word("catch")) {
      next();
      Node c = Node::inner("CatchClause");
      expect("(");
      skip_modifiers();
      Node param = Node::inner("Parameter");
      param.children.push_back(parse_type());
      while (accept("|")) param.children.push_back(parse_type());
      param.children.push_back(Node::leaf("VariableDeclaratorId", expect_ident()));
      expect(")");
      c.children.push_back(std::move(param));
      c.children.push_back(block());
      s.children.push_back(std::move(c));
    }
    if (peek_is_word("finally")) {
      next();
      s.children.push_back(block());
    }
    return s;
  }

  Node switch_construct(const char* type) {
    next();
    Node s = Node::inner(type);
    expect("(");
    s.children.push_back(expression());
    expect(")");
    expect("{");
    while (!accept("}")) {
      if (at_end()) fail("unterminated switch");
      Node entry = Node::inner("SwitchEntry");
      if (peek_is_word("default")) {
        next();
      } else if (peek_is_word("case")) {
        next();
        do {
          entry.children.push_back(ternary());
        } while (accept(","));
      } else {
        fail("expected case or default");
      }
      if (accept("->")) {
        if (peek_is("{")) {
          entry.children.push_back(block());
        } else if (peek_is_word("throw")) {
          entry.children.push_back(statement());
        } else {
          entry.children.push_back(Node::inner("ExpressionStmt", {expression()}));
          expect(";");
        }
      } else {
        expect(":");
        while (!peek_is_word("case") && !peek_is_word("default") && !peek_is("}")) {
          if (at_end()) fail("unterminated switch entry");
          entry.children.push_back(statement());
        }
      }
      s.children.push_back(std::move(entry));
    }
    return s;
  }

  // -- expressions ---------------------------------------------------------

  Node array_initializer() {
    expect("{");
    Node n = Node::inner("ArrayInitializerExpr");
    while (!accept("}")) {
      n.children.push_back(peek_is("{") ? array_initializer() : expression());
      if (!accept(",")) {
        expect("}");
        break;
      }
    }
    return n;
  }

  /// Reads an operator made of glued tokens (>>=, >>>, >= ...) without
  /// consuming it. Returns the spelling and the number of tokens.
  std::pair<std::string, std::size_t> peek_operator() const {
    const auto& tk = peek();
    if (tk.kind != TokKind::op && !(tk.kind == TokKind::keyword && tk.text == "instanceof")) return {"", 0};
    if (tk.text != ">") return {tk.text, 1};
    std::string op = ">";
    std::size_t n = 1;
    while (n < 3 && peek(n).kind == TokKind::op && peek(n).glued && peek(n).text == ">") {
      op += '>';
      ++n;
    }
    if (peek(n).kind == TokKind::op && peek(n).glued && peek(n).text == "=") {
      op += '=';
      ++n;
    }
    return {op, n};
  }

  static const char* assign_name(const std::string& op) {
    if (op == "=") return "AssignExpr";
    if (op == "+=") return "AssignExpr:plus";
    if (op == "-=") return "AssignExpr:minus";
    if (op == "*=") return "AssignExpr:multiply";
    if (op == "/=") return "AssignExpr:divide";
    if (op == "%=") return "AssignExpr:remainder";
    if (op == "&=") return "AssignExpr:binAnd";
    if (op == "|=") return "AssignExpr:binOr";
    if (op == "^=") return "AssignExpr:xor";
    if (op == "<<=") return "AssignExpr:leftShift";
    if (op == ">>=") return "AssignExpr:signedRightShift";
    if (op == ">>>=") return "AssignExpr:unsignedRightShift";
    return nullptr;
  }

  Node expression() {
    if (is_lambda_start()) return lambda();
    Node lhs = ternary();
    const auto [op, n] = peek_operator();
    if (const char* name = assign_name(op)) {
      pos_ += n;
      Node rhs = peek_is("{") ? array_initializer() : expression();
      return Node::inner(name, {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  bool is_lambda_start() const {
    if (peek_ident() && peek_is("->", 1)) return true;
    if (!peek_is("(")) return false;
    int depth = 0;
    for (std::size_t k = 0;; ++k) {
      const auto& tk = peek(k);
      if (tk.kind == TokKind::end) return false;
      if (tk.kind == TokKind::op && tk.text == "(") ++depth;
      if (tk.kind == TokKind::op && tk.text == ")" && --depth == 0) return peek_is("->", k + 1);
    }
  }

  Node lambda() {
    Node n = Node::inner("LambdaExpr");
    if (peek_ident()) {
      n.children.push_back(Node::inner("Parameter", {Node::leaf("VariableDeclaratorId", next().text)}));
    } else {
      expect("(");
      while (!accept(")")) {
        skip_modifiers();
        Node param = Node::inner("Parameter");
        if (peek_ident() && (peek_is(",", 1) || peek_is(")", 1))) {
          param.children.push_back(Node::leaf("VariableDeclaratorId", next().text));
        } else {
          param.children.push_back(parse_type());
          accept("...");
          param.children.push_back(Node::leaf("VariableDeclaratorId", expect_ident()));
        }
        n.children.push_back(std::move(param));
        accept(",");
      }
    }
    expect("->");
    n.children.push_back(peek_is("{") ? block() : expression());
    return n;
  }

  Node ternary() {
    Node cond = binary(0);
    if (accept("?")) {
      Node a = is_lambda_start() ? lambda() : ternary();
      expect(":");
      Node b = is_lambda_start() ? lambda() : ternary();
      return Node::inner("ConditionalExpr", {std::move(cond), std::move(a), std::move(b)});
    }
    return cond;
  }

  static int precedence(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=") return 6;
    if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof") return 7;
    if (op == "<<" || op == ">>" || op == ">>>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    return -1;
  }

  static const char* binary_name(const std::string& op) {
    if (op == "||") return "BinaryExpr:or";
    if (op == "&&") return "BinaryExpr:and";
    if (op == "|") return "BinaryExpr:binOr";
    if (op == "^") return "BinaryExpr:xor";
    if (op == "&") return "BinaryExpr:binAnd";
    if (op == "==") return "BinaryExpr:equals";
    if (op == "!=") return "BinaryExpr:notEquals";
    if (op == "<") return "BinaryExpr:less";
    if (op == ">") return "BinaryExpr:greater";
    if (op == "<=") return "BinaryExpr:lessEquals";
    if (op == ">=") return "BinaryExpr:greaterEquals";
    if (op == "<<") return "BinaryExpr:leftShift";
    if (op == ">>") return "BinaryExpr:signedRightShift";
    if (op == ">>>") return "BinaryExpr:unsignedRightShift";
    if (op == "+") return "BinaryExpr:plus";
    if (op == "-") return "BinaryExpr:minus";
    if (op == "*") return "BinaryExpr:multiply";
    if (op == "/") return "BinaryExpr:divide";
    return "BinaryExpr:remainder";
  }

  Node binary(int min_prec) {
    Node lhs = unary();
    while (true) {
      const auto [op, n] = peek_operator();
      const int prec = precedence(op);
      if (prec < 0 || prec <= min_prec) return lhs;
      pos_ += n;
      if (op == "instanceof") {
        accept("final");
        Node type = parse_type();
        Node inst = Node::inner("InstanceOfExpr", {std::move(lhs), std::move(type)});
        if (peek_ident()) inst.children.push_back(Node::leaf("VariableDeclaratorId", next().text));
        lhs = std::move(inst);
        continue;
      }
      Node rhs = binary(prec);
      lhs = Node::inner(binary_name(op), {std::move(lhs), std::move(rhs)});
    }
  }

  bool cast_follows() const {
    const auto& tk = peek();
    switch (tk.kind) {
      case TokKind::ident:
      case TokKind::int_lit:
      case TokKind::long_lit:
      case TokKind::float_lit:
      case TokKind::char_lit:
      case TokKind::string_lit:
      case TokKind::text_block:
        return true;
      case TokKind::keyword:
        return tk.text == "this" || tk.text == "new" || tk.text == "super" || tk.text == "true" ||
               tk.text == "false" || tk.text == "null" || tk.text == "switch" || is_primitive(tk.text);
      case TokKind::op:
        return tk.text == "(" || tk.text == "!" || tk.text == "~";
      default:
        return false;
    }
  }

  Node unary() {
    static const std::pair<const char*, const char*> prefix[] = {
        {"++", "UnaryExpr:preIncrement"}, {"--", "UnaryExpr:preDecrement"}, {"!", "UnaryExpr:logicalComplement"},
        {"~", "UnaryExpr:bitwiseComplement"}, {"+", "UnaryExpr:plus"}, {"-", "UnaryExpr:minus"}};
    for (const auto& [op, name] : prefix) {
      if (accept(op)) return Node::inner(name, {unary()});
    }
    if (peek_is("(")) {
      const auto save = pos_;
      next();
      Node type;
      const bool primitive = peek().kind == TokKind::keyword && is_primitive(peek().text);
      if (try_type(type)) {
        while (accept("&")) parse_type();
        if (accept(")") && (primitive || cast_follows())) {
          return Node::inner("CastExpr", {std::move(type), unary()});
        }
      }
      pos_ = save;
    }
    return postfix(primary());
  }

  Node arguments() {
    Node args = Node::inner("Arguments");
    expect("(");
    while (!accept(")")) {
      args.children.push_back(expression());
      if (!accept(",")) {
        expect(")");
        break;
      }
    }
    return args;
  }

  static void append_args(Node& call, Node args) {
    for (auto& a : args.children) call.children.push_back(std::move(a));
  }

  Node creation() {
    next();  // new
    skip_type_arguments();
    while (peek_is("@")) skip_annotation();
    Node type;
    if (peek().kind == TokKind::keyword && is_primitive(peek().text)) {
      type = Node::leaf("PrimitiveType", next().text);
    } else {
      std::string name = expect_ident();
      skip_type_arguments();
      while (peek_is(".") && peek_ident(1)) {
        next();
        name = next().text;
        skip_type_arguments();
      }
      type = Node::leaf("ClassOrInterfaceType", name);
    }
    if (peek_is("[")) {
      Node arr = Node::inner("ArrayCreationExpr", {std::move(type)});
      while (peek_is("[")) {
        next();
        if (accept("]")) continue;
        arr.children.push_back(Node::inner("ArrayCreationLevel", {expression()}));
        expect("]");
      }
      if (peek_is("{")) arr.children.push_back(array_initializer());
      return arr;
    }
    Node obj = Node::inner("ObjectCreationExpr", {std::move(type)});
    append_args(obj, arguments());
    if (peek_is("{")) skip_balanced();  // anonymous class body
    return obj;
  }

  Node literal() {
    const Token& tk = next();
    auto clean = [](std::string s) {
      for (auto& c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) c = '_';
      }
      return s;
    };
    switch (tk.kind) {
      case TokKind::int_lit: return Node::leaf("IntegerLiteralExpr", tk.text);
      case TokKind::long_lit: return Node::leaf("LongLiteralExpr", tk.text);
      case TokKind::float_lit: return Node::leaf("DoubleLiteralExpr", tk.text);
      case TokKind::char_lit: return Node::leaf("CharLiteralExpr", clean(tk.text));
      case TokKind::string_lit: return Node::leaf("StringLiteralExpr", clean(tk.text));
      case TokKind::text_block: return Node::leaf("TextBlockLiteralExpr", clean(tk.text));
      default: break;
    }
    if (tk.text == "true" || tk.text == "false") return Node::leaf("BooleanLiteralExpr", tk.text);
    return Node::leaf("NullLiteralExpr", tk.text);
  }

  Node primary() {
    const auto& tk = peek();
    switch (tk.kind) {
      case TokKind::int_lit:
      case TokKind::long_lit:
      case TokKind::float_lit:
      case TokKind::char_lit:
      case TokKind::string_lit:
      case TokKind::text_block:
        return literal();
      default:
        break;
    }
    if (peek_is_word("true") || peek_is_word("false") || peek_is_word("null")) return literal();
    if (peek_is("(")) {
      next();
      Node inner = expression();
      expect(")");
      return Node::inner("EnclosedExpr", {std::move(inner)});
    }
    if (peek_is_word("this")) {
      next();
      if (peek_is("(")) {
        Node call = Node::inner("ExplicitConstructorInvocationStmt", {Node::leaf("ThisExpr", "this")});
        append_args(call, arguments());
        return call;
      }
      return Node::leaf("ThisExpr", "this");
    }
    if (peek_is_word("super")) {
      next();
      if (peek_is("(")) {
        Node call = Node::inner("ExplicitConstructorInvocationStmt", {Node::leaf("SuperExpr", "super")});
        append_args(call, arguments());
        return call;
      }
      return Node::leaf("SuperExpr", "super");
    }
    if (peek_is_word("new")) return creation();
    if (peek_is_word("switch")) return switch_construct("SwitchExpr");
    if (tk.kind == TokKind::keyword && (is_primitive(tk.text) || tk.text == "void")) {
      Node type = parse_type();
      if (accept("::")) {
        Node ref = Node::inner("MethodReferenceExpr", {Node::inner("TypeExpr", {std::move(type)})});
        ref.children.push_back(Node::leaf("SimpleName", next().text));
        return ref;
      }
      expect(".");
      if (!peek_is_word("class")) fail("expected class literal");
      next();
      return Node::inner("ClassExpr", {std::move(type)});
    }
    if (peek_ident()) {
      const std::string name = next().text;
      if (peek_is("(")) {
        Node call = Node::inner("MethodCallExpr", {Node::leaf("SimpleName", name)});
        append_args(call, arguments());
        return call;
      }
      // Generic type reference such as List<String>::new or Foo[]::new.
      if (peek_is("<") || (peek_is("[") && peek_is("]", 1))) {
        const auto save = pos_;
        try {
          skip_type_arguments();
          while (peek_is("[") && peek_is("]", 1)) {
            next();
            next();
          }
          if (peek_is("::")) return Node::inner("TypeExpr", {Node::leaf("ClassOrInterfaceType", name)});
          if (peek_is(".") && peek_is_word("class", 1)) {
            return Node::leaf("ClassOrInterfaceType", name);
          }
        } catch (const ParseError&) {
        }
        pos_ = save;
      }
      return Node::leaf("NameExpr", name);
    }
    if (peek_is("@")) {
      skip_annotation();
      return primary();
    }
    fail("unexpected token '" + tk.text + "'");
  }

  Node postfix(Node e) {
    while (true) {
      if (peek_is(".")) {
        next();
        if (peek_is("<")) skip_type_arguments();
        if (peek_is_word("new")) {
          Node inner = creation();
          inner.children.insert(inner.children.begin(), std::move(e));
          e = std::move(inner);
          continue;
        }
        if (peek_is_word("class")) {
          next();
          e = Node::inner("ClassExpr", {std::move(e)});
          continue;
        }
        if (peek_is_word("this")) {
          next();
          e = Node::inner("ThisExpr", {std::move(e)});
          continue;
        }
        if (peek_is_word("super")) {
          next();
          e = Node::inner("SuperExpr", {std::move(e)});
          continue;
        }
        const std::string name = expect_ident();
        if (peek_is("(")) {
          Node call = Node::inner("MethodCallExpr", {std::move(e), Node::leaf("SimpleName", name)});
          append_args(call, arguments());
          e = std::move(call);
        } else {
          e = Node::inner("FieldAccessExpr", {std::move(e), Node::leaf("SimpleName", name)});
        }
        continue;
      }
      if (peek_is("[")) {
        next();
        Node idx = expression();
        expect("]");
        e = Node::inner("ArrayAccessExpr", {std::move(e), std::move(idx)});
        continue;
      }
      if (peek_is("++") || peek_is("--")) {
        const bool inc = next().text == "++";
        e = Node::inner(inc ? "UnaryExpr:postIncrement" : "UnaryExpr:postDecrement", {std::move(e)});
        continue;
      }
      if (peek_is("::")) {
        next();
        if (peek_is("<")) skip_type_arguments();
        Node ref = Node::inner("MethodReferenceExpr", {std::move(e)});
        ref.children.push_back(Node::leaf("SimpleName", next().text));
        e = std::move(ref);
        continue;
      }
      return e;
    }
  }
};

/// Parses one Java compilation unit into the ASTs of its methods and
/// constructors (those with bodies), in source order.
inline std::vector<MethodAst> parse_methods(std::string_view source) {
  Parser p(lex(source));
  return p.compilation_unit();
}

}  // namespace repo2vec::java
