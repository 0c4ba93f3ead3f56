#include "yaml_mini.hpp"

#include <cctype>

#include "bench/error.hpp"
#include "bench/util.hpp"

namespace bench::yaml {

namespace {

struct Line {
  int indent = 0;
  std::string text;  // comment-stripped, trailing spaces removed
  int number = 0;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(Errc::card_format, "line " + std::to_string(line) + ": " + msg);
}

// Strips a trailing comment that is outside quotes.
std::string strip_comment(const std::string& s) {
  bool in_quote = false;
  char quote_ch = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_quote) {
      if (c == '\\' && quote_ch == '"') ++i;
      else if (c == quote_ch) in_quote = false;
    } else if (c == '"' || c == '\'') {
      in_quote = true;
      quote_ch = c;
    } else if (c == '#' && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) {
      return s.substr(0, i);
    }
  }
  return s;
}

std::vector<Line> scan(const std::string& text) {
  std::vector<Line> out;
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string raw = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string stripped = strip_comment(raw);
    size_t indent = 0;
    while (indent < stripped.size() && stripped[indent] == ' ') ++indent;
    if (indent < stripped.size() && stripped[indent] == '\t')
      fail(number, "tab indentation is not supported");
    std::string body = trim(stripped.substr(indent));
    if (body.empty()) continue;
    out.push_back({static_cast<int>(indent), body, number});
  }
  return out;
}

// Parses a scalar literal: quoted string, inline list, or plain token.
NodePtr parse_scalar(const std::string& tok, int line);

std::string unquote(const std::string& s, int line) {
  std::string out;
  for (size_t i = 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (c == '\\' && s[0] == '"') {
      if (i + 2 >= s.size() + 1) fail(line, "bad escape");
      char e = s[++i];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: out.push_back(e); break;
      }
    } else {
      out.push_back(c);
    }
  }
  return out;
}

NodePtr parse_inline_list(const std::string& tok, int line) {
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::list;
  node->line = line;
  std::string inner = trim(tok.substr(1, tok.size() - 2));
  if (inner.empty()) return node;
  std::vector<std::string> parts;
  std::string cur;
  bool in_quote = false;
  char quote_ch = 0;
  for (size_t i = 0; i < inner.size(); ++i) {
    char c = inner[i];
    if (in_quote) {
      cur.push_back(c);
      if (c == '\\' && quote_ch == '"' && i + 1 < inner.size()) cur.push_back(inner[++i]);
      else if (c == quote_ch) in_quote = false;
    } else if (c == '"' || c == '\'') {
      in_quote = true;
      quote_ch = c;
      cur.push_back(c);
    } else if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(trim(cur));
  for (const auto& p : parts)
    if (!p.empty()) node->items.push_back(parse_scalar(p, line));
  return node;
}

NodePtr parse_scalar(const std::string& tok, int line) {
  auto node = std::make_shared<Node>();
  node->line = line;
  if (tok.size() >= 2 && tok.front() == '[' && tok.back() == ']')
    return parse_inline_list(tok, line);
  if (tok.size() >= 2 && ((tok.front() == '"' && tok.back() == '"') ||
                          (tok.front() == '\'' && tok.back() == '\''))) {
    node->scalar = unquote(tok, line);
    node->quoted = true;
  } else {
    node->scalar = tok;
  }
  return node;
}

class BlockParser {
 public:
  explicit BlockParser(std::vector<Line> lines) : lines_(std::move(lines)) {}

  NodePtr parse_document() {
    if (lines_.empty()) fail(1, "empty document");
    NodePtr root = parse_block(0, lines_[0].indent);
    if (ix_ != lines_.size()) fail(lines_[ix_].number, "unexpected trailing content");
    return root;
  }

 private:
  std::vector<Line> lines_;
  size_t ix_ = 0;

  NodePtr parse_block(int, int indent) {
    if (lines_[ix_].text.rfind("- ", 0) == 0 || lines_[ix_].text == "-")
      return parse_list(indent);
    return parse_map(indent);
  }

  NodePtr parse_map(int indent) {
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::map;
    node->line = lines_[ix_].number;
    while (ix_ < lines_.size() && lines_[ix_].indent == indent &&
           lines_[ix_].text.rfind("- ", 0) != 0 && lines_[ix_].text != "-") {
      const Line& ln = lines_[ix_];
      size_t colon = find_key_colon(ln.text, ln.number);
      std::string key = trim(ln.text.substr(0, colon));
      std::string rest = trim(ln.text.substr(colon + 1));
      ++ix_;
      if (!rest.empty()) {
        node->entries.emplace_back(key, parse_scalar(rest, ln.number));
      } else {
        if (ix_ < lines_.size() && lines_[ix_].indent > indent)
          node->entries.emplace_back(key, parse_block(ln.number, lines_[ix_].indent));
        else
          node->entries.emplace_back(key, parse_scalar("", ln.number));  // empty value
      }
    }
    if (ix_ < lines_.size() && lines_[ix_].indent > indent)
      fail(lines_[ix_].number, "unexpected deeper indentation");
    return node;
  }

  NodePtr parse_list(int indent) {
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::list;
    node->line = lines_[ix_].number;
    while (ix_ < lines_.size() && lines_[ix_].indent == indent &&
           (lines_[ix_].text.rfind("- ", 0) == 0 || lines_[ix_].text == "-")) {
      Line ln = lines_[ix_];
      std::string body = ln.text == "-" ? "" : trim(ln.text.substr(2));
      // The dash introduces a virtual indentation level two columns deeper.
      int item_indent = indent + 2;
      if (body.empty()) {
        ++ix_;
        if (ix_ < lines_.size() && lines_[ix_].indent > indent)
          node->items.push_back(parse_block(ln.number, lines_[ix_].indent));
        else
          node->items.push_back(parse_scalar("", ln.number));
        continue;
      }
      if (body.find(':') != std::string::npos && looks_like_key(body)) {
        // Rewrite "- key: value" as a map whose first entry sits on this line.
        lines_[ix_] = {item_indent, body, ln.number};
        node->items.push_back(parse_map(item_indent));
      } else {
        ++ix_;
        node->items.push_back(parse_scalar(body, ln.number));
      }
    }
    return node;
  }

  static bool looks_like_key(const std::string& body) {
    if (body.front() == '"' || body.front() == '\'' || body.front() == '[') return false;
    size_t colon = body.find(':');
    if (colon == std::string::npos) return false;
    return colon + 1 == body.size() || body[colon + 1] == ' ';
  }

  static size_t find_key_colon(const std::string& text, int line) {
    bool in_quote = false;
    char quote_ch = 0;
    for (size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (in_quote) {
        if (c == quote_ch) in_quote = false;
      } else if (c == '"' || c == '\'') {
        in_quote = true;
        quote_ch = c;
      } else if (c == ':' && (i + 1 == text.size() || text[i + 1] == ' ')) {
        return i;
      }
    }
    fail(line, "expected 'key: value'");
  }
};

}  // namespace

NodePtr parse(const std::string& text) {
  BlockParser p(scan(text));
  return p.parse_document();
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

}  // namespace bench::yaml
