#include "dialogtest/vxml_testgen.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "dialogtest/error.hpp"

namespace dialogtest {

DialogAutomaton::DialogAutomaton(std::vector<std::string> states, std::string initial,
                                 std::vector<Transition> transitions,
                                 std::map<std::string, std::string> prompts)
    : states_(std::move(states)),
      initial_(std::move(initial)),
      transitions_(std::move(transitions)),
      prompts_(std::move(prompts)) {
  std::set<std::string, std::less<>> known;
  for (const auto& s : states_) {
    if (s.empty()) throw std::invalid_argument("empty state id");
    if (!known.insert(s).second) throw std::invalid_argument("duplicate state id: " + s);
  }
  if (!known.contains(kEnd)) {
    states_.emplace_back(kEnd);
    known.emplace(kEnd);
  }
  if (!known.contains(initial_)) throw std::invalid_argument("unknown initial state: " + initial_);
  std::sort(transitions_.begin(), transitions_.end());
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const Transition& t = transitions_[i];
    if (!known.contains(t.from)) throw std::invalid_argument("unknown source state: " + t.from);
    if (!known.contains(t.to)) throw std::invalid_argument("unknown target state: " + t.to);
    if (t.label.empty()) throw std::invalid_argument("empty label leaving " + t.from);
    if (t.from == kEnd) throw std::invalid_argument("END has an outgoing transition");
    if (i > 0 && transitions_[i - 1].from == t.from && transitions_[i - 1].label == t.label) {
      throw Error(ErrorCode::NondeterministicField, t.from + ": option '" + t.label + "'");
    }
  }
  for (const auto& [state, text] : prompts_) {
    if (!known.contains(state)) throw std::invalid_argument("prompt for unknown state: " + state);
  }
}

bool DialogAutomaton::has_state(std::string_view id) const {
  return std::find(states_.begin(), states_.end(), id) != states_.end();
}

std::vector<const Transition*> DialogAutomaton::outgoing(std::string_view state) const {
  std::vector<const Transition*> out;
  auto it = std::lower_bound(transitions_.begin(), transitions_.end(), state,
                             [](const Transition& t, std::string_view s) { return t.from < s; });
  for (; it != transitions_.end() && it->from == state; ++it) out.push_back(&*it);
  return out;
}

std::optional<std::string> DialogAutomaton::next(std::string_view state,
                                                 std::string_view label) const {
  for (const Transition* t : outgoing(state)) {
    if (t->label == label) return t->to;
  }
  return std::nullopt;
}

const std::string* DialogAutomaton::prompt(std::string_view state) const {
  auto it = prompts_.find(std::string(state));
  return it == prompts_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Markup reader

namespace {

struct Element {
  std::string name;  // "#text" for character data
  std::map<std::string, std::string> attrs;
  std::vector<Element> children;
  std::string text;
  std::size_t line = 0;
};

[[noreturn]] void malformed(std::size_t line, const std::string& detail) {
  throw Error(ErrorCode::MalformedMarkup, detail, line);
}

bool is_name_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '-' || c == '.' || c == ':' || u >= 0x80;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view doc) : doc_(doc) {}

  Element read_document() {
    skip_misc();
    if (eof()) malformed(line_, "document has no root element");
    if (peek() != '<') malformed(line_, "text outside the root element");
    Element root = read_element();
    skip_misc();
    if (!eof()) malformed(line_, "content after the root element");
    return root;
  }

 private:
  bool eof() const { return pos_ >= doc_.size(); }
  char peek() const { return doc_[pos_]; }
  bool looking_at(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < doc_.size(); ++i) {
      if (doc_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  void skip_spaces() {
    while (!eof() && is_space(peek())) advance();
  }

  void skip_until(std::string_view terminator, std::string_view what) {
    const std::size_t start_line = line_;
    const auto end = doc_.find(terminator, pos_);
    if (end == std::string_view::npos) malformed(start_line, "unterminated " + std::string(what));
    advance(end + terminator.size() - pos_);
  }

  // Whitespace, comments, processing instructions and doctype.
  void skip_misc() {
    for (;;) {
      skip_spaces();
      if (looking_at("<!--")) {
        skip_until("-->", "comment");
      } else if (looking_at("<?")) {
        skip_until("?>", "processing instruction");
      } else if (looking_at("<!DOCTYPE")) {
        skip_until(">", "doctype");
      } else {
        return;
      }
    }
  }

  std::string read_name() {
    const std::size_t start = pos_;
    while (!eof() && is_name_char(peek())) advance();
    if (pos_ == start) malformed(line_, "expected a name");
    return std::string(doc_.substr(start, pos_ - start));
  }

  std::string decode(std::string_view raw, std::size_t line) {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      const auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) malformed(line, "unterminated entity");
      const std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "lt") {
        out += '<';
      } else if (ent == "gt") {
        out += '>';
      } else if (ent == "amp") {
        out += '&';
      } else if (ent == "quot") {
        out += '"';
      } else if (ent == "apos") {
        out += '\'';
      } else if (ent.size() > 1 && ent[0] == '#') {
        const bool hex = ent[1] == 'x' || ent[1] == 'X';
        const std::string digits(ent.substr(hex ? 2 : 1));
        std::size_t used = 0;
        unsigned long cp = 0;
        try {
          cp = std::stoul(digits, &used, hex ? 16 : 10);
        } catch (const std::exception&) {
          used = 0;
        }
        if (digits.empty() || used != digits.size() || cp == 0 || cp > 0x10FFFF ||
            (cp >= 0xD800 && cp <= 0xDFFF)) {
          malformed(line, "bad character reference &" + std::string(ent) + ";");
        }
        append_utf8(out, static_cast<char32_t>(cp));
      } else {
        malformed(line, "unknown entity &" + std::string(ent) + ";");
      }
      i = semi;
    }
    return out;
  }

  Element read_element() {
    Element el;
    el.line = line_;
    advance();  // '<'
    el.name = read_name();
    for (;;) {
      skip_spaces();
      if (eof()) malformed(el.line, "unterminated tag <" + el.name + ">");
      if (looking_at("/>")) {
        advance(2);
        return el;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      const std::size_t attr_line = line_;
      std::string key = read_name();
      skip_spaces();
      if (eof() || peek() != '=') malformed(attr_line, "attribute '" + key + "' needs a value");
      advance();
      skip_spaces();
      if (eof() || (peek() != '"' && peek() != '\'')) {
        malformed(attr_line, "attribute '" + key + "' value must be quoted");
      }
      const char quote = peek();
      advance();
      const auto end = doc_.find(quote, pos_);
      if (end == std::string_view::npos) malformed(attr_line, "unterminated attribute value");
      const std::string_view raw = doc_.substr(pos_, end - pos_);
      if (raw.find('<') != std::string_view::npos) malformed(attr_line, "'<' in attribute value");
      std::string value = decode(raw, attr_line);
      advance(end + 1 - pos_);
      if (!el.attrs.emplace(std::move(key), std::move(value)).second) {
        malformed(attr_line, "duplicate attribute in <" + el.name + ">");
      }
    }
    read_content(el);
    return el;
  }

  void read_content(Element& el) {
    for (;;) {
      if (eof()) malformed(el.line, "element <" + el.name + "> is not closed");
      if (looking_at("</")) {
        const std::size_t close_line = line_;
        advance(2);
        const std::string name = read_name();
        skip_spaces();
        if (eof() || peek() != '>') malformed(close_line, "malformed closing tag");
        advance();
        if (name != el.name) {
          malformed(close_line, "</" + name + "> does not close <" + el.name + ">");
        }
        return;
      }
      if (looking_at("<!--")) {
        skip_until("-->", "comment");
      } else if (looking_at("<![CDATA[")) {
        const std::size_t start_line = line_;
        advance(9);
        const auto end = doc_.find("]]>", pos_);
        if (end == std::string_view::npos) malformed(start_line, "unterminated CDATA section");
        push_text(el, std::string(doc_.substr(pos_, end - pos_)), start_line);
        advance(end + 3 - pos_);
      } else if (looking_at("<?")) {
        skip_until("?>", "processing instruction");
      } else if (peek() == '<') {
        el.children.push_back(read_element());
      } else {
        const std::size_t start_line = line_;
        const auto end = doc_.find('<', pos_);
        const std::size_t stop = end == std::string_view::npos ? doc_.size() : end;
        const std::string_view raw = doc_.substr(pos_, stop - pos_);
        if (raw.find('>') != std::string_view::npos && raw.find("]]>") != std::string_view::npos) {
          malformed(start_line, "']]>' in character data");
        }
        push_text(el, decode(raw, start_line), start_line);
        advance(stop - pos_);
      }
    }
  }

  static void push_text(Element& el, std::string text, std::size_t line) {
    if (!el.children.empty() && el.children.back().name == "#text") {
      el.children.back().text += text;
      return;
    }
    Element t;
    t.name = "#text";
    t.text = std::move(text);
    t.line = line;
    el.children.push_back(std::move(t));
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

// ---------------------------------------------------------------------------
// Subset interpretation

struct ToForm {
  std::string form;
};
struct ToEnd {};
using Route = std::variant<std::monostate, ToForm, ToEnd>;

struct OptionDecl {
  std::string label;
  Route route;
  std::size_t line = 0;
};

struct FieldDecl {
  std::string name;
  std::string prompt;
  std::vector<OptionDecl> options;
  Route route;
  std::size_t line = 0;
};

struct FormDecl {
  std::string id;
  std::string prompt;
  std::vector<FieldDecl> fields;
  Route route;
  std::size_t line = 0;
};

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return is_space(c); });
}

std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
    } else {
      if (pending) out += ' ';
      pending = false;
      out += c;
    }
  }
  return out;
}

[[noreturn]] void unsupported(const Element& el, std::string_view context) {
  throw Error(ErrorCode::UnsupportedElement, "<" + el.name + "> inside <" + std::string(context) + ">",
              el.line);
}

void require_no_text(const Element& el, std::string_view context) {
  if (el.name == "#text" && !blank(el.text)) {
    malformed(el.line, "unexpected text inside <" + std::string(context) + ">");
  }
}

std::string text_of(const Element& el, std::string_view context) {
  std::string raw;
  for (const auto& c : el.children) {
    if (c.name != "#text") unsupported(c, context);
    raw += c.text;
  }
  return collapse_spaces(raw);
}

Route read_route(const Element& el) {
  if (el.name == "exit") {
    for (const auto& c : el.children) {
      if (c.name != "#text") unsupported(c, "exit");
      require_no_text(c, "exit");
    }
    return ToEnd{};
  }
  auto it = el.attrs.find("next");
  if (it == el.attrs.end()) malformed(el.line, "<goto> needs a next attribute");
  const std::string& next = it->second;
  if (next.size() < 2 || next.front() != '#') {
    malformed(el.line, "<goto next> must name a form as '#id', got '" + next + "'");
  }
  for (const auto& c : el.children) {
    if (c.name != "#text") unsupported(c, "goto");
    require_no_text(c, "goto");
  }
  return ToForm{next.substr(1)};
}

void set_route(Route& slot, Route value, const Element& el, std::string_view owner) {
  if (!std::holds_alternative<std::monostate>(slot)) {
    malformed(el.line, "<" + std::string(owner) + "> has more than one goto/exit");
  }
  slot = std::move(value);
}

OptionDecl read_option(const Element& el) {
  OptionDecl opt;
  opt.line = el.line;
  std::string raw;
  for (const auto& c : el.children) {
    if (c.name == "#text") {
      raw += c.text;
    } else if (c.name == "goto" || c.name == "exit") {
      set_route(opt.route, read_route(c), c, "option");
    } else {
      unsupported(c, "option");
    }
  }
  opt.label = collapse_spaces(raw);
  if (opt.label.empty()) malformed(el.line, "<option> has no text");
  return opt;
}

FieldDecl read_field(const Element& el) {
  FieldDecl field;
  field.line = el.line;
  auto it = el.attrs.find("name");
  if (it == el.attrs.end() || it->second.empty()) malformed(el.line, "<field> needs a name");
  field.name = it->second;
  for (const auto& c : el.children) {
    if (c.name == "#text") {
      require_no_text(c, "field");
    } else if (c.name == "prompt") {
      const std::string text = text_of(c, "prompt");
      if (!text.empty()) field.prompt += (field.prompt.empty() ? "" : " ") + text;
    } else if (c.name == "option") {
      field.options.push_back(read_option(c));
    } else if (c.name == "goto" || c.name == "exit") {
      set_route(field.route, read_route(c), c, "field");
    } else if (c.name == "nomatch" || c.name == "noinput") {
      // Error-path handlers are outside the model.
    } else {
      unsupported(c, "field");
    }
  }
  return field;
}

FormDecl read_form(const Element& el, std::size_t ordinal) {
  FormDecl form;
  form.line = el.line;
  auto it = el.attrs.find("id");
  form.id = it != el.attrs.end() ? it->second : "form" + std::to_string(ordinal);
  if (form.id.empty()) malformed(el.line, "<form> has an empty id");
  for (const auto& c : el.children) {
    if (c.name == "#text") {
      require_no_text(c, "form");
    } else if (c.name == "field") {
      if (!std::holds_alternative<std::monostate>(form.route)) {
        malformed(c.line, "<field> after the form's goto/exit");
      }
      form.fields.push_back(read_field(c));
    } else if (c.name == "prompt") {
      const std::string text = text_of(c, "prompt");
      if (!text.empty()) form.prompt += (form.prompt.empty() ? "" : " ") + text;
    } else if (c.name == "goto" || c.name == "exit") {
      set_route(form.route, read_route(c), c, "form");
    } else {
      unsupported(c, "form");
    }
  }
  return form;
}

}  // namespace

DialogAutomaton parse_vxml(std::string_view document) {
  const Element root = Reader(document).read_document();
  if (root.name != "vxml") throw Error(ErrorCode::UnsupportedElement, "<" + root.name + "> as root", root.line);

  std::vector<FormDecl> forms;
  std::map<std::string, std::size_t> form_index;
  for (const auto& c : root.children) {
    if (c.name == "#text") {
      require_no_text(c, "vxml");
      continue;
    }
    if (c.name != "form") unsupported(c, "vxml");
    FormDecl form = read_form(c, forms.size() + 1);
    if (!form_index.emplace(form.id, forms.size()).second) {
      malformed(c.line, "duplicate form id '" + form.id + "'");
    }
    forms.push_back(std::move(form));
  }

  std::vector<std::string> states;
  std::map<std::string, std::string> prompts;
  for (const auto& form : forms) {
    std::set<std::string> names;
    for (std::size_t i = 0; i < form.fields.size(); ++i) {
      const FieldDecl& f = form.fields[i];
      if (!names.insert(f.name).second) {
        malformed(f.line, "duplicate field '" + f.name + "' in form '" + form.id + "'");
      }
      const std::string id = form.id + "." + f.name;
      states.push_back(id);
      std::string prompt = f.prompt;
      if (i == 0 && !form.prompt.empty()) {
        prompt = prompt.empty() ? form.prompt : form.prompt + " " + prompt;
      }
      if (!prompt.empty()) prompts.emplace(id, std::move(prompt));
    }
  }

  // Entry state of a form: its first field, or wherever its own route leads
  // when it has none.
  auto entry_of = [&](const std::string& form_id, std::size_t line) {
    std::set<std::string> seen;
    std::string current = form_id;
    for (;;) {
      auto it = form_index.find(current);
      if (it == form_index.end()) throw Error(ErrorCode::DanglingGoto, "#" + current, line);
      const FormDecl& f = forms[it->second];
      if (!f.fields.empty()) return f.id + "." + f.fields.front().name;
      if (!seen.insert(current).second) malformed(f.line, "goto cycle through forms without fields");
      if (const auto* to = std::get_if<ToForm>(&f.route)) {
        current = to->form;
        line = f.line;
      } else {
        return std::string(DialogAutomaton::kEnd);
      }
    }
  };
  auto resolve = [&](const Route& r, std::size_t line) -> std::optional<std::string> {
    if (std::holds_alternative<ToEnd>(r)) return std::string(DialogAutomaton::kEnd);
    if (const auto* to = std::get_if<ToForm>(&r)) return entry_of(to->form, line);
    return std::nullopt;
  };

  // Every goto is checked even when no option uses it.
  for (const auto& form : forms) {
    resolve(form.route, form.line);
    for (const auto& f : form.fields) {
      resolve(f.route, f.line);
      for (const auto& o : f.options) resolve(o.route, o.line);
    }
  }

  std::vector<Transition> transitions;
  for (const auto& form : forms) {
    for (std::size_t i = 0; i < form.fields.size(); ++i) {
      const FieldDecl& f = form.fields[i];
      const std::string from = form.id + "." + f.name;
      std::set<std::string> labels;
      for (const auto& o : f.options) {
        if (!labels.insert(o.label).second) {
          throw Error(ErrorCode::NondeterministicField, from + ": option '" + o.label + "'", o.line);
        }
        std::optional<std::string> to = resolve(o.route, o.line);
        if (!to) to = resolve(f.route, f.line);
        if (!to && i + 1 < form.fields.size()) to = form.id + "." + form.fields[i + 1].name;
        if (!to) to = resolve(form.route, form.line);
        if (!to) to = std::string(DialogAutomaton::kEnd);
        transitions.push_back(Transition{from, o.label, *to});
      }
    }
  }

  std::string initial = std::string(DialogAutomaton::kEnd);
  if (!forms.empty()) initial = entry_of(forms.front().id, forms.front().line);
  return DialogAutomaton(std::move(states), std::move(initial), std::move(transitions),
                         std::move(prompts));
}

// ---------------------------------------------------------------------------
// Generation

namespace {

struct Graph {
  std::vector<std::string> names;
  std::map<std::string, std::size_t, std::less<>> index;
  // Outgoing edges per state, sorted by label; values index into `edges`.
  std::vector<std::vector<std::size_t>> out;
  std::vector<const Transition*> edges;
  std::vector<std::size_t> edge_to;
  std::size_t end = 0;

  explicit Graph(const DialogAutomaton& a) {
    for (const auto& s : a.states()) {
      index.emplace(s, names.size());
      names.push_back(s);
    }
    end = index.at(std::string(DialogAutomaton::kEnd));
    out.resize(names.size());
    for (const auto& t : a.transitions()) {
      out[index.at(t.from)].push_back(edges.size());
      edges.push_back(&t);
      edge_to.push_back(index.at(t.to));
    }
  }

  bool terminal(std::size_t s) const { return s == end || out[s].empty(); }
};

// Shortest path (in edges) from `start` to any state satisfying `goal`,
// preferring lexicographically smaller labels; only edges accepted by
// `usable` are followed.
template <class Goal, class Usable>
std::optional<std::vector<std::size_t>> shortest(const Graph& g, std::size_t start, Goal goal,
                                                 Usable usable) {
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> via(g.names.size(), kNone);
  std::vector<bool> seen(g.names.size(), false);
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    if (goal(s)) {
      std::vector<std::size_t> path;
      for (std::size_t cur = s; cur != start;) {
        path.push_back(via[cur]);
        cur = g.index.find(g.edges[path.back()]->from)->second;
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (std::size_t e : g.out[s]) {
      const std::size_t t = g.edge_to[e];
      if (seen[t] || !usable(e)) continue;
      seen[t] = true;
      via[t] = e;
      queue.push_back(t);
    }
  }
  return std::nullopt;
}

}  // namespace

GenerationResult generate_sequences(const DialogAutomaton& automaton, std::size_t loop_bound) {
  const Graph g(automaton);
  const std::size_t cap = loop_bound + 1;
  const std::size_t start = g.index.at(automaton.initial());
  GenerationResult result;

  // Discovery order of states from the initial one fixes the order in which
  // transitions get targeted.
  std::vector<std::size_t> order;
  std::vector<bool> reached(g.names.size(), false);
  {
    std::deque<std::size_t> queue{start};
    reached[start] = true;
    while (!queue.empty()) {
      const std::size_t s = queue.front();
      queue.pop_front();
      order.push_back(s);
      for (std::size_t e : g.out[s]) {
        if (!reached[g.edge_to[e]]) {
          reached[g.edge_to[e]] = true;
          queue.push_back(g.edge_to[e]);
        }
      }
    }
  }
  for (std::size_t s = 0; s < g.names.size(); ++s) {
    if (!reached[s]) result.unreachable_states.push_back(g.names[s]);
  }
  result.initial_dead_end = g.out[start].empty() && g.names.size() > 1;

  std::vector<bool> covered(g.edges.size(), false);
  for (std::size_t s : order) {
    for (std::size_t target : g.out[s]) {
      if (covered[target]) continue;
      std::vector<std::size_t> count(g.edges.size(), 0);
      std::vector<std::size_t> path =
          *shortest(g, start, [&](std::size_t x) { return x == s; }, [](std::size_t) { return true; });
      path.push_back(target);
      for (std::size_t e : path) ++count[e];
      if (std::any_of(path.begin(), path.end(), [&](std::size_t e) { return count[e] > cap; })) {
        result.uncovered.push_back(*g.edges[target]);
        continue;
      }
      const std::size_t after = g.edge_to[target];
      if (auto suffix = shortest(
              g, after, [&](std::size_t x) { return g.terminal(x); },
              [&](std::size_t e) { return count[e] < cap; })) {
        for (std::size_t e : *suffix) {
          ++count[e];
          path.push_back(e);
        }
      }
      InputSequence seq;
      for (std::size_t e : path) {
        covered[e] = true;
        seq.labels.push_back(g.edges[e]->label);
      }
      seq.terminal = g.names[g.edge_to[path.back()]];
      result.sequences.push_back(std::move(seq));
    }
  }
  return result;
}

std::optional<std::string> replay(const DialogAutomaton& automaton,
                                  const std::vector<std::string>& labels) {
  std::string state = automaton.initial();
  for (const auto& label : labels) {
    auto next = automaton.next(state, label);
    if (!next) return std::nullopt;
    state = std::move(*next);
  }
  return state;
}

std::string emit_suite(const std::vector<InputSequence>& sequences,
                       const DialogAutomaton& automaton) {
  std::ostringstream out;
  out << "# generated from a VoiceXML dialog: " << sequences.size() << " path(s)\n";
  std::size_t n = 0;
  for (const auto& seq : sequences) {
    out << "\ncase path-" << ++n << '\n';
    std::string state = automaton.initial();
    for (const auto& label : seq.labels) {
      out << "  say: " << label << '\n';
      if (const std::string* prompt = automaton.prompt(state)) {
        out << "  expect_equivalent: " << *prompt << '\n';
      }
      auto next = automaton.next(state, label);
      if (!next) throw std::invalid_argument("sequence leaves the automaton at '" + label + "'");
      state = std::move(*next);
    }
  }
  return out.str();
}

}  // namespace dialogtest
