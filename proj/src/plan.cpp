#include "roleplan/plan.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace roleplan {

namespace {

struct PhysicalLine {
    int number = 0;
    std::string text;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<PhysicalLine> split_lines(std::string_view raw) {
    std::vector<PhysicalLine> out;
    int number = 1;
    std::size_t start = 0;
    while (start <= raw.size()) {
        auto end = raw.find('\n', start);
        if (end == std::string_view::npos) end = raw.size();
        std::string_view line = raw.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back({number++, std::string(line)});
        if (end == raw.size()) break;
        start = end + 1;
    }
    if (raw.empty()) out.clear();
    return out;
}

// Lines of the last fenced block, or every line when the text has no fence.
std::vector<PhysicalLine> code_region_lines(std::string_view raw) {
    auto lines = split_lines(raw);
    std::vector<std::size_t> fences;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim_view(lines[i].text).starts_with("```")) fences.push_back(i);
    }
    if (fences.empty()) return lines;

    std::size_t open = 0;
    std::size_t close = lines.size();
    if (fences.size() % 2 == 0) {
        open = fences[fences.size() - 2];
        close = fences.back();
    } else {
        // An unterminated fence runs to the end of the text.
        open = fences.back();
    }
    return {lines.begin() + static_cast<std::ptrdiff_t>(open) + 1, lines.begin() + static_cast<std::ptrdiff_t>(close)};
}

// Skips a string literal starting at s[i] (a quote). Returns the index one past its end,
// or s.size() when unterminated.
std::size_t skip_string(std::string_view s, std::size_t i) {
    const char q = s[i];
    const bool triple = i + 2 < s.size() && s[i + 1] == q && s[i + 2] == q;
    if (triple) {
        const std::string closing(3, q);
        auto end = s.find(closing, i + 3);
        return end == std::string_view::npos ? s.size() : end + 3;
    }
    for (std::size_t j = i + 1; j < s.size(); ++j) {
        if (s[j] == '\\') {
            ++j;
        } else if (s[j] == q) {
            return j + 1;
        } else if (s[j] == '\n') {
            return j;
        }
    }
    return s.size();
}

// Index of the bracket closing the one at s[open], or npos.
std::size_t matching_close(std::string_view s, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '"' || c == '\'') {
            i = skip_string(s, i) - 1;
            continue;
        }
        if (c == '(' || c == '[' || c == '{') ++depth;
        if (c == ')' || c == ']' || c == '}') {
            if (--depth == 0) return i;
        }
    }
    return std::string_view::npos;
}

// Splits on commas at nesting depth zero.
std::vector<std::string_view> split_top_level(std::string_view s) {
    std::vector<std::string_view> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '"' || c == '\'') {
            i = skip_string(s, i) - 1;
            continue;
        }
        if (c == '(' || c == '[' || c == '{') ++depth;
        else if (c == ')' || c == ']' || c == '}') --depth;
        else if (c == ',' && depth == 0) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.push_back(s.substr(start));
    // f(a,) and f() carry no argument in the last slot.
    if (!parts.empty() && trim_view(parts.back()).empty()) parts.pop_back();
    return parts;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim_view(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

constexpr std::array kColorWords = {"red",    "green", "blue",   "yellow", "orange", "purple", "white", "black",
                                    "pink",   "cyan",  "magenta", "amber", "violet", "gray",   "grey",  "brown"};

constexpr std::array kKeywords = {"if",    "elif",  "while", "for",   "return", "and",   "or",     "not",
                                  "in",    "is",    "lambda", "yield", "assert", "with",  "except", "def",
                                  "class", "await", "async", "del", "raise", "import", "from"};

// Python builtins commonly sprinkled through generated plans; they are not robot actions.
constexpr std::array kIgnoredBuiltins = {"print", "range", "len",   "str",    "int",   "float", "bool",
                                         "list",  "dict",  "tuple", "set",    "enumerate", "zip", "isinstance",
                                         "type",  "min",   "max",   "abs",    "round", "sorted", "super"};

template <std::size_t N>
bool contains(const std::array<const char*, N>& words, std::string_view w) {
    return std::any_of(words.begin(), words.end(), [&](const char* k) { return w == k; });
}

std::string unquote(std::string_view s) {
    // Accept r"...", f'...', b"..." prefixes.
    while (!s.empty() && std::isalpha(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    std::size_t q = 1;
    if (s.size() >= 6 && (s.starts_with("\"\"\"") || s.starts_with("'''"))) q = 3;
    std::string_view inner = s.substr(q, s.size() - 2 * q);
    std::string out;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        if (inner[i] == '\\' && i + 1 < inner.size()) {
            const char n = inner[++i];
            out.push_back(n == 'n' ? '\n' : n == 't' ? '\t' : n);
        } else {
            out.push_back(inner[i]);
        }
    }
    return out;
}

bool is_single_string_literal(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && i < 2 && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size() || (s[i] != '"' && s[i] != '\'')) return false;
    return skip_string(s, i) == s.size() && s.size() - i >= 2;
}

bool is_dotted_identifier(std::string_view s) {
    if (s.empty() || !ident_start(s.front())) return false;
    bool after_dot = false;
    for (char c : s) {
        if (c == '.') {
            if (after_dot) return false;
            after_dot = true;
        } else if (!ident_char(c)) {
            return false;
        } else {
            after_dot = false;
        }
    }
    return !after_dot;
}

bool contains_call(std::string_view s) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i] == '"' || s[i] == '\'') {
            i = skip_string(s, i) - 1;
            continue;
        }
        if (ident_char(s[i]) && s[i + 1] == '(') return true;
    }
    return false;
}

Argument make_argument(std::string_view raw) {
    Argument arg;
    raw = trim_view(raw);
    arg.raw_text = std::string(raw);

    std::string_view value = raw;
    // keyword=value (but not ==)
    std::size_t k = 0;
    while (k < raw.size() && ident_char(raw[k])) ++k;
    if (k > 0 && ident_start(raw[0])) {
        std::size_t eq = k;
        while (eq < raw.size() && raw[eq] == ' ') ++eq;
        if (eq < raw.size() && raw[eq] == '=' && (eq + 1 >= raw.size() || raw[eq + 1] != '=')) {
            arg.keyword = std::string(raw.substr(0, k));
            value = trim_view(raw.substr(eq + 1));
        }
    }

    if (value.empty()) {
        arg.inferred_type = ParamType::none;
        return arg;
    }

    if (is_single_string_literal(value)) {
        arg.quoted = true;
        arg.value = unquote(value);
        std::string lower;
        for (char c : trim_view(arg.value)) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        const auto words = std::count(lower.begin(), lower.end(), ' ') + 1;
        if (is_color_word(lower)) arg.inferred_type = ParamType::color;
        else if (words > 4 || (!lower.empty() && (lower.back() == '.' || lower.back() == '!' || lower.back() == '?')))
            arg.inferred_type = ParamType::text;
        else arg.inferred_type = ParamType::object_ref;
        return arg;
    }

    arg.value = std::string(value);
    if (auto n = parse_number(value)) {
        arg.numbers = {*n};
        arg.inferred_type = ParamType::number;
        return arg;
    }

    if ((value.front() == '(' && value.back() == ')') || (value.front() == '[' && value.back() == ']')) {
        if (matching_close(value, 0) == value.size() - 1) {
            std::vector<double> numbers;
            bool all_numeric = true;
            for (auto part : split_top_level(value.substr(1, value.size() - 2))) {
                if (auto n = parse_number(part)) numbers.push_back(*n);
                else all_numeric = false;
            }
            if (all_numeric && numbers.size() >= 2) {
                arg.numbers = std::move(numbers);
                arg.inferred_type = ParamType::position;
                return arg;
            }
        }
    }

    if (is_dotted_identifier(value)) {
        arg.inferred_type = (value == "None" || value == "True" || value == "False") ? ParamType::none : ParamType::object_ref;
        return arg;
    }

    arg.is_call = contains_call(value);
    arg.inferred_type = ParamType::none;
    return arg;
}

struct FoundCall {
    std::string function;
    std::vector<Argument> args;
};

// Post-order: calls nested in arguments precede the call that consumes them.
void extract_calls(std::string_view code, std::vector<FoundCall>& out) {
    std::size_t i = 0;
    while (i < code.size()) {
        const char c = code[i];
        if (c == '"' || c == '\'') {
            i = skip_string(code, i);
            continue;
        }
        if (!ident_start(c) || (i > 0 && (ident_char(code[i - 1]) || code[i - 1] == '.'))) {
            ++i;
            continue;
        }
        // Dotted name.
        std::size_t j = i;
        std::size_t last_segment = i;
        while (j < code.size()) {
            while (j < code.size() && ident_char(code[j])) ++j;
            if (j + 1 < code.size() && code[j] == '.' && ident_start(code[j + 1])) {
                last_segment = ++j;
                continue;
            }
            break;
        }
        const std::string name(code.substr(last_segment, j - last_segment));
        if (j >= code.size() || code[j] != '(' || contains(kKeywords, name)) {
            i = j;
            continue;
        }
        const std::size_t close = matching_close(code, j);
        if (close == std::string_view::npos) {
            i = j + 1;
            continue;
        }

        FoundCall call;
        call.function = name;
        for (auto part : split_top_level(code.substr(j + 1, close - j - 1))) {
            extract_calls(part, out);
            call.args.push_back(make_argument(part));
        }
        if (!contains(kIgnoredBuiltins, name)) out.push_back(std::move(call));
        i = close + 1;
    }
}

// Code with '#' comments removed (strings respected).
std::string strip_comments(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '"' || c == '\'') {
            const auto end = skip_string(s, i);
            out.append(s.substr(i, end - i));
            i = end - 1;
            continue;
        }
        if (c == '#') {
            const auto nl = s.find('\n', i);
            if (nl == std::string_view::npos) break;
            i = nl - 1;
            continue;
        }
        out.push_back(c);
    }
    return out;
}

// Open bracket depth and whether a triple-quoted string is still open at the end of s.
std::pair<int, bool> open_state(std::string_view s) {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '"' || c == '\'') {
            const bool triple = i + 2 < s.size() && s[i + 1] == c && s[i + 2] == c;
            if (triple) {
                const auto end = s.find(std::string(3, c), i + 3);
                if (end == std::string_view::npos) return {depth, true};
                i = end + 2;
                continue;
            }
            i = skip_string(s, i) - 1;
            continue;
        }
        if (c == '#') {
            const auto nl = s.find('\n', i);
            if (nl == std::string_view::npos) break;
            i = nl;
            continue;
        }
        if (c == '(' || c == '[' || c == '{') ++depth;
        if (c == ')' || c == ']' || c == '}') depth = std::max(0, depth - 1);
    }
    return {depth, false};
}

int indentation(std::string_view line) {
    int width = 0;
    for (char c : line) {
        if (c == ' ') width += 1;
        else if (c == '\t') width += 4;
        else break;
    }
    return width;
}

struct LogicalLine {
    int first_line = 0;
    int indent = 0;
    std::string source_text; // trimmed physical lines joined by '\n'
    std::string code;        // raw joined text
};

std::vector<LogicalLine> logical_lines(const std::vector<PhysicalLine>& lines) {
    constexpr std::size_t kMaxJoin = 60;
    std::vector<LogicalLine> out;
    std::size_t i = 0;
    while (i < lines.size()) {
        if (trim_view(lines[i].text).empty()) {
            ++i;
            continue;
        }
        LogicalLine ll;
        ll.first_line = lines[i].number;
        ll.indent = indentation(lines[i].text);
        std::string joined = lines[i].text;
        std::vector<std::string_view> parts{trim_view(lines[i].text)};
        std::size_t j = i + 1;
        auto [depth, in_triple] = open_state(joined);
        while ((depth > 0 || in_triple) && j < lines.size() && j - i < kMaxJoin) {
            joined += "\n" + lines[j].text;
            if (!trim_view(lines[j].text).empty()) parts.push_back(trim_view(lines[j].text));
            ++j;
            std::tie(depth, in_triple) = open_state(joined);
        }
        if ((depth > 0 || in_triple) && (j == lines.size() || j - i >= kMaxJoin)) {
            // Never closed: fall back to the single physical line.
            j = i + 1;
            joined = lines[i].text;
            parts.resize(1);
        }
        for (std::size_t p = 0; p < parts.size(); ++p) {
            if (p) ll.source_text += '\n';
            ll.source_text += parts[p];
        }
        ll.code = std::move(joined);
        out.push_back(std::move(ll));
        i = j;
    }
    return out;
}

// "def name(...) [-> T]: body" -> (name, body). nullopt when not a def header.
std::optional<std::pair<std::string, std::string>> parse_def_header(std::string_view code) {
    code = trim_view(code);
    if (code.starts_with("async ")) code = trim_view(code.substr(6));
    if (!code.starts_with("def ")) return std::nullopt;
    std::size_t i = 4;
    while (i < code.size() && code[i] == ' ') ++i;
    const std::size_t name_start = i;
    while (i < code.size() && ident_char(code[i])) ++i;
    if (i == name_start || i >= code.size()) return std::nullopt;
    std::string name(code.substr(name_start, i - name_start));
    while (i < code.size() && code[i] == ' ') ++i;
    if (i >= code.size() || code[i] != '(') return std::nullopt;
    const auto close = matching_close(code, i);
    if (close == std::string_view::npos) return std::nullopt;
    const auto colon = code.find(':', close);
    if (colon == std::string_view::npos) return std::nullopt;
    return std::make_pair(std::move(name), std::string(code.substr(colon + 1)));
}

void mark_execution(Plan& plan) {
    std::set<std::string> invoked;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& step : plan.steps) {
            step.executed = !step.enclosing_definition || invoked.contains(*step.enclosing_definition);
        }
        for (const auto& step : plan.steps) {
            if (!step.executed || !plan.defines(step.function)) continue;
            if (step.enclosing_definition == step.function) continue; // recursion does not count
            if (invoked.insert(step.function).second) changed = true;
        }
    }
    for (auto& def : plan.definitions) def.invoked = invoked.contains(def.name);
}

} // namespace

bool is_color_word(std::string_view word) {
    return contains(kColorWords, word);
}

bool Plan::defines(std::string_view name) const {
    return std::any_of(definitions.begin(), definitions.end(), [&](const auto& d) { return d.name == name; });
}

Plan parse_plan(std::string_view raw) {
    Plan plan;
    std::vector<std::pair<std::string, int>> def_stack; // name, indent

    for (const auto& ll : logical_lines(code_region_lines(raw))) {
        while (!def_stack.empty() && def_stack.back().second >= ll.indent) def_stack.pop_back();
        std::optional<std::string> enclosing;
        if (!def_stack.empty()) enclosing = def_stack.back().first;

        const std::string code = strip_comments(ll.code);
        std::vector<FoundCall> calls;
        std::optional<std::string> call_scope = enclosing;

        if (auto header = parse_def_header(code)) {
            plan.definitions.push_back({header->first, ll.first_line, false});
            def_stack.emplace_back(header->first, ll.indent);
            call_scope = header->first;
            extract_calls(header->second, calls);
        } else {
            extract_calls(code, calls);
        }

        if (calls.empty()) {
            plan.residue.push_back({ll.first_line, ll.source_text});
            continue;
        }
        for (auto& call : calls) {
            ActionStep step;
            step.function = std::move(call.function);
            step.args = std::move(call.args);
            step.source_line = ll.first_line;
            step.source_text = ll.source_text;
            step.enclosing_definition = call_scope;
            plan.steps.push_back(std::move(step));
        }
    }
    mark_execution(plan);
    return plan;
}

std::string code_region(std::string_view raw) {
    std::string out;
    for (const auto& line : code_region_lines(raw)) {
        const auto t = trim_view(line.text);
        if (t.empty()) continue;
        if (!out.empty()) out += '\n';
        out += t;
    }
    return out;
}

std::string serialize_plan(const Plan& plan) {
    std::map<int, std::string> by_line;
    for (const auto& r : plan.residue) by_line.emplace(r.source_line, r.text);
    for (const auto& s : plan.steps) by_line.emplace(s.source_line, s.source_text);
    std::string out;
    for (const auto& [line, text] : by_line) {
        if (!out.empty()) out += '\n';
        out += text;
    }
    return out;
}

} // namespace roleplan
