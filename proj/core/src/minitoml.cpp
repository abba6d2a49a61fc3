#include "renorm/minitoml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace renorm::toml {
namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  int line = 1;

  bool done() const { return i >= s.size(); }
  char peek() const { return s[i]; }
  char take() {
    char c = s[i++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++i;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "toml parse error at line " << line << ": " << msg;
    throw ParseError(os.str());
  }
};

bool bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& c) {
  std::string k;
  while (!c.done() && bare_key_char(c.peek())) k += c.take();
  if (k.empty()) c.fail("expected a key");
  return k;
}

std::string parse_basic_string(Cursor& c) {
  if (c.take() != '"') c.fail("expected '\"'");
  std::string out;
  while (true) {
    if (c.done()) c.fail("unterminated string");
    char ch = c.take();
    if (ch == '"') break;
    if (ch == '\n') c.fail("newline inside string");
    if (ch == '\\') {
      if (c.done()) c.fail("dangling escape");
      char e = c.take();
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: c.fail("unsupported escape");
      }
    } else {
      out += ch;
    }
  }
  return out;
}

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
  if (c.take() != '[') c.fail("expected '['");
  Array a;
  while (true) {
    c.skip_ws();
    if (!c.done() && c.peek() == '\n') { c.take(); continue; }
    if (c.done()) c.fail("unterminated array");
    if (c.peek() == ']') { c.take(); break; }
    a.push_back(parse_value(c));
    c.skip_ws();
    while (!c.done() && c.peek() == '\n') { c.take(); c.skip_ws(); }
    if (c.done()) c.fail("unterminated array");
    if (c.peek() == ',') { c.take(); continue; }
    if (c.peek() == ']') { c.take(); break; }
    c.fail("expected ',' or ']' in array");
  }
  return Value(std::move(a));
}

Value parse_scalar(Cursor& c) {
  std::string tok;
  while (!c.done()) {
    char ch = c.peek();
    if (ch == ',' || ch == ']' || ch == '\n' || ch == '#' || ch == ' ' || ch == '\t') break;
    tok += c.take();
  }
  if (tok.empty()) c.fail("expected a value");
  if (tok == "true") return Value(true);
  if (tok == "false") return Value(false);

  bool floaty = tok.find_first_of(".eE") != std::string::npos;
  // "1e3" is a float; "inf"/"nan" are rejected by from_chars below.
  if (!floaty) {
    std::int64_t iv = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), iv);
    if (ec == std::errc() && p == tok.data() + tok.size()) return Value(iv);
  }
  double dv = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), dv);
  if (ec == std::errc() && p == tok.data() + tok.size()) return Value(dv);
  c.fail("cannot parse value '" + tok + "'");
}

Value parse_value(Cursor& c) {
  c.skip_ws();
  if (c.done()) c.fail("expected a value");
  char ch = c.peek();
  if (ch == '"') return Value(parse_basic_string(c));
  if (ch == '[') return parse_array(c);
  if (ch == '{') c.fail("inline tables are not supported");
  return parse_scalar(c);
}

Table* descend(Table& root, const std::vector<std::string>& path, Cursor& c) {
  Table* t = &root;
  for (const auto& part : path) {
    auto it = t->find(part);
    if (it == t->end()) {
      auto [ins, ok] = t->emplace(part, Value(Table{}));
      (void)ok;
      it = ins;
    }
    if (!it->second.is_table()) c.fail("key '" + part + "' is not a table");
    t = &it->second.as_table();
  }
  return t;
}

}  // namespace

Table parse(const std::string& text) {
  Cursor c{text};
  Table root;
  Table* current = &root;
  while (!c.done()) {
    c.skip_ws();
    if (c.done()) break;
    char ch = c.peek();
    if (ch == '\n') { c.take(); continue; }
    if (ch == '#') {
      while (!c.done() && c.peek() != '\n') c.take();
      continue;
    }
    if (ch == '[') {
      c.take();
      if (!c.done() && c.peek() == '[') c.fail("arrays of tables are not supported");
      std::vector<std::string> path;
      while (true) {
        c.skip_ws();
        path.push_back(parse_bare_key(c));
        c.skip_ws();
        if (c.done()) c.fail("unterminated section header");
        char n = c.take();
        if (n == '.') continue;
        if (n == ']') break;
        c.fail("expected '.' or ']' in section header");
      }
      current = descend(root, path, c);
      continue;
    }
    std::string key = parse_bare_key(c);
    c.skip_ws();
    if (c.done() || c.take() != '=') c.fail("expected '=' after key '" + key + "'");
    Value v = parse_value(c);
    c.skip_ws();
    if (!c.done() && c.peek() == '#') {
      while (!c.done() && c.peek() != '\n') c.take();
    }
    if (!c.done() && c.peek() != '\n') c.fail("trailing characters after value for '" + key + "'");
    if (current->count(key)) c.fail("duplicate key '" + key + "'");
    current->emplace(key, std::move(v));
  }
  return root;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const Value* find(const Table& t, const std::string& dotted) {
  const Table* cur = &t;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = dotted.find('.', start);
    std::string part = dotted.substr(start, dot == std::string::npos ? dot : dot - start);
    auto it = cur->find(part);
    if (it == cur->end()) return nullptr;
    if (dot == std::string::npos) return &it->second;
    if (!it->second.is_table()) return nullptr;
    cur = &it->second.as_table();
    start = dot + 1;
  }
}

namespace {
void collect(const Table& t, const std::string& prefix, std::vector<std::string>& out) {
  for (const auto& [k, v] : t) {
    std::string name = prefix.empty() ? k : prefix + "." + k;
    if (v.is_table()) {
      collect(v.as_table(), name, out);
    } else {
      out.push_back(name);
    }
  }
}
}  // namespace

std::vector<std::string> leaf_keys(const Table& t) {
  std::vector<std::string> out;
  collect(t, "", out);
  return out;
}

}  // namespace renorm::toml
