#include "foamforge/dict/dict.hpp"

#include <sstream>

#include "foamforge/core/error.hpp"

namespace foamforge::dict {

Item Item::make_token(std::string t) {
    Item i;
    i.kind = Kind::token;
    i.token = std::move(t);
    return i;
}

Item Item::make_list(std::vector<Item> children) {
    Item i;
    i.kind = Kind::list;
    i.items = std::move(children);
    return i;
}

Item Item::make_dims(std::vector<std::string> components) {
    Item i;
    i.kind = Kind::dims;
    i.dims = std::move(components);
    return i;
}

Item Item::make_dict(std::vector<Entry> entries) {
    Item i;
    i.kind = Kind::dict;
    i.entries = std::move(entries);
    return i;
}

bool Item::operator==(const Item& o) const {
    return kind == o.kind && token == o.token && items == o.items && dims == o.dims &&
           entries == o.entries;
}

bool Entry::operator==(const Entry& o) const {
    return kind == o.kind && keyword == o.keyword && value == o.value;
}

const Entry* find_entry(const std::vector<Entry>& entries, const std::string& keyword) {
    for (const auto& e : entries) {
        if (e.keyword == keyword) return &e;
    }
    return nullptr;
}

const Entry* DictionaryTree::find(const std::string& keyword) const {
    return find_entry(entries, keyword);
}

const std::vector<Entry>* DictionaryTree::find_block(const std::vector<std::string>& path) const {
    const std::vector<Entry>* cur = &entries;
    for (const auto& key : path) {
        const Entry* e = find_entry(*cur, key);
        if (!e) return nullptr;
        if (e->kind == Entry::Kind::block) {
            cur = &e->value.front().entries;
        } else if (e->kind == Entry::Kind::value && e->value.size() == 1 &&
                   e->value.front().kind == Item::Kind::dict) {
            cur = &e->value.front().entries;
        } else {
            return nullptr;
        }
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind { word, string, lbrace, rbrace, lparen, rparen, lbracket, rbracket, semi };
    Kind kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : src_(text) { advance_line_tracking(); }

    std::vector<Token> run() {
        std::vector<Token> out;
        while (skip_trivia()) {
            char c = src_[pos_];
            int line = line_, col = col_;
            switch (c) {
                case '{': out.push_back({Token::Kind::lbrace, "{", line, col}); bump(); break;
                case '}': out.push_back({Token::Kind::rbrace, "}", line, col}); bump(); break;
                case '(': out.push_back({Token::Kind::lparen, "(", line, col}); bump(); break;
                case ')': out.push_back({Token::Kind::rparen, ")", line, col}); bump(); break;
                case '[': out.push_back({Token::Kind::lbracket, "[", line, col}); bump(); break;
                case ']': out.push_back({Token::Kind::rbracket, "]", line, col}); bump(); break;
                case ';': out.push_back({Token::Kind::semi, ";", line, col}); bump(); break;
                case '"': out.push_back(lex_string()); break;
                default: out.push_back(lex_word()); break;
            }
        }
        return out;
    }

private:
    void advance_line_tracking() {}

    bool at_end() const { return pos_ >= src_.size(); }

    void bump() {
        if (at_end()) return;
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    // Skips whitespace and comments. Returns false at end of input.
    bool skip_trivia() {
        while (!at_end()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                bump();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (!at_end() && src_[pos_] != '\n') bump();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                int line = line_, col = col_;
                bump();
                bump();
                while (!at_end() && !(src_[pos_] == '*' && pos_ + 1 < src_.size() &&
                                      src_[pos_ + 1] == '/')) {
                    bump();
                }
                if (at_end()) throw ParseError(line, col, "closing */ for block comment");
                bump();
                bump();
            } else {
                return true;
            }
        }
        return false;
    }

    Token lex_string() {
        int line = line_, col = col_;
        std::string text = "\"";
        bump();  // opening quote
        while (!at_end() && src_[pos_] != '"') {
            if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
                text += src_[pos_];
                bump();
            }
            text += src_[pos_];
            bump();
        }
        if (at_end()) throw ParseError(line, col, "closing '\"'");
        text += '"';
        bump();
        return {Token::Kind::string, text, line, col};
    }

    static bool is_word_char(char c) {
        switch (c) {
            case ' ':
            case '\t':
            case '\r':
            case '\n':
            case '{':
            case '}':
            case '(':
            case ')':
            case '[':
            case ']':
            case ';':
            case '"':
                return false;
            default:
                return true;
        }
    }

    Token lex_word() {
        int line = line_, col = col_;
        std::string text;
        while (!at_end() && is_word_char(src_[pos_])) {
            // A // or /* inside a word terminates it (comment follows).
            if (src_[pos_] == '/' && pos_ + 1 < src_.size() &&
                (src_[pos_ + 1] == '/' || src_[pos_ + 1] == '*')) {
                break;
            }
            text += src_[pos_];
            bump();
        }
        return {Token::Kind::word, text, line, col};
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    std::vector<Entry> parse_body(bool top_level) {
        std::vector<Entry> entries;
        while (!at_end() && peek().kind != Token::Kind::rbrace) {
            entries.push_back(parse_entry());
        }
        if (!top_level) {
            expect(Token::Kind::rbrace, "'}'");
        }
        return entries;
    }

private:
    bool at_end() const { return pos_ >= tokens_.size(); }

    const Token& peek() const { return tokens_[pos_]; }

    Token take() { return tokens_[pos_++]; }

    [[noreturn]] void fail(const std::string& expected) const {
        if (at_end()) {
            int line = tokens_.empty() ? 1 : tokens_.back().line;
            int col = tokens_.empty() ? 1 : tokens_.back().column;
            throw ParseError(line, col, expected + " (unexpected end of input)");
        }
        throw ParseError(peek().line, peek().column, expected);
    }

    Token expect(Token::Kind kind, const std::string& what) {
        if (at_end() || peek().kind != kind) fail(what);
        return take();
    }

    Entry parse_entry() {
        if (peek().kind != Token::Kind::word && peek().kind != Token::Kind::string) {
            fail("keyword");
        }
        Token key = take();

        if (!key.text.empty() && key.text[0] == '#') {
            // Directive, opaque: consume the rest of its source line.
            Entry e;
            e.kind = Entry::Kind::directive;
            e.keyword = key.text;
            while (!at_end() && peek().line == key.line &&
                   peek().kind != Token::Kind::semi &&
                   peek().kind != Token::Kind::rbrace) {
                e.value.push_back(parse_item());
            }
            if (!at_end() && peek().kind == Token::Kind::semi && peek().line == key.line) take();
            return e;
        }

        if (at_end()) fail("';' or '{' after keyword");

        if (peek().kind == Token::Kind::lbrace) {
            take();
            Entry e;
            e.kind = Entry::Kind::block;
            e.keyword = key.text;
            e.value.push_back(Item::make_dict(parse_body(false)));
            return e;
        }

        Entry e;
        e.kind = Entry::Kind::value;
        e.keyword = key.text;
        while (!at_end() && peek().kind != Token::Kind::semi) {
            if (peek().kind == Token::Kind::rbrace) fail("';' terminating entry");
            e.value.push_back(parse_item());
        }
        expect(Token::Kind::semi, "';'");
        return e;
    }

    Item parse_item() {
        switch (peek().kind) {
            case Token::Kind::word:
            case Token::Kind::string:
                return Item::make_token(take().text);
            case Token::Kind::lparen: {
                take();
                std::vector<Item> children;
                while (!at_end() && peek().kind != Token::Kind::rparen) {
                    // Anonymous dicts appear inside lists (blockMeshDict
                    // boundary entries).
                    if (peek().kind == Token::Kind::lbrace) {
                        take();
                        children.push_back(Item::make_dict(parse_body(false)));
                    } else {
                        children.push_back(parse_item());
                    }
                }
                expect(Token::Kind::rparen, "')'");
                return Item::make_list(std::move(children));
            }
            case Token::Kind::lbracket: {
                take();
                std::vector<std::string> comps;
                while (!at_end() && peek().kind != Token::Kind::rbracket) {
                    if (peek().kind != Token::Kind::word) fail("dimension component");
                    comps.push_back(take().text);
                }
                expect(Token::Kind::rbracket, "']'");
                return Item::make_dims(std::move(comps));
            }
            case Token::Kind::lbrace: {
                take();
                return Item::make_dict(parse_body(false));
            }
            default:
                fail("value item");
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

Header extract_header(std::vector<Entry>& entries, const std::optional<std::string>& expected) {
    Header h;
    for (auto it = entries.begin(); it != entries.end(); ++it) {
        if (it->keyword != "FoamFile" || it->kind != Entry::Kind::block) continue;
        for (const auto& e : it->value.front().entries) {
            if (e.kind != Entry::Kind::value || e.value.size() != 1 ||
                e.value.front().kind != Item::Kind::token) {
                continue;
            }
            const std::string& v = e.value.front().token;
            if (e.keyword == "version") h.version = v;
            else if (e.keyword == "format") h.format = v;
            else if (e.keyword == "class") h.cls = v;
            else if (e.keyword == "location") h.location = v;
            else if (e.keyword == "object") h.object = v;
        }
        entries.erase(it);
        break;
    }
    if (expected) h.object = *expected;
    return h;
}

std::string pad_keyword(const std::string& key) {
    if (key.size() >= 15) return key + " ";
    return key + std::string(16 - key.size(), ' ');
}

bool inline_list(const std::vector<Item>& items) {
    std::size_t total = 0;
    for (const auto& i : items) {
        if (i.kind == Item::Kind::dict) return false;
        if (i.kind == Item::Kind::list && !inline_list(i.items)) return false;
        total += i.token.size() + 3;
        if (total > 60) return false;
    }
    return true;
}

void write_item(std::ostringstream& out, const Item& item, int depth);
void write_entries(std::ostringstream& out, const std::vector<Entry>& entries, int depth);

void write_list(std::ostringstream& out, const Item& list, int depth) {
    std::string indent(static_cast<std::size_t>(depth) * 4, ' ');
    if (inline_list(list.items)) {
        out << "(";
        for (const auto& child : list.items) {
            out << " ";
            write_item(out, child, depth);
        }
        out << " )";
        return;
    }
    out << "(\n";
    for (const auto& child : list.items) {
        if (child.kind == Item::Kind::dict) {
            out << indent << "    {\n";
            write_entries(out, child.entries, depth + 2);
            out << indent << "    }\n";
        } else {
            out << indent << "    ";
            write_item(out, child, depth + 1);
            out << "\n";
        }
    }
    out << indent << ")";
}

void write_item(std::ostringstream& out, const Item& item, int depth) {
    switch (item.kind) {
        case Item::Kind::token:
            out << item.token;
            break;
        case Item::Kind::dims: {
            out << "[";
            for (std::size_t i = 0; i < item.dims.size(); ++i) {
                if (i) out << " ";
                out << item.dims[i];
            }
            out << "]";
            break;
        }
        case Item::Kind::list:
            write_list(out, item, depth);
            break;
        case Item::Kind::dict: {
            std::string indent(static_cast<std::size_t>(depth) * 4, ' ');
            out << "{\n";
            write_entries(out, item.entries, depth + 1);
            out << indent << "}";
            break;
        }
    }
}

void write_entries(std::ostringstream& out, const std::vector<Entry>& entries, int depth) {
    std::string indent(static_cast<std::size_t>(depth) * 4, ' ');
    for (const auto& e : entries) {
        switch (e.kind) {
            case Entry::Kind::block: {
                out << indent << e.keyword << "\n" << indent << "{\n";
                write_entries(out, e.value.front().entries, depth + 1);
                out << indent << "}\n";
                break;
            }
            case Entry::Kind::directive: {
                out << indent << e.keyword;
                for (const auto& item : e.value) {
                    out << " ";
                    write_item(out, item, depth);
                }
                out << "\n";
                break;
            }
            case Entry::Kind::value: {
                out << indent << pad_keyword(e.keyword);
                for (std::size_t i = 0; i < e.value.size(); ++i) {
                    if (i) out << " ";
                    write_item(out, e.value[i], depth);
                }
                out << ";\n";
                break;
            }
        }
    }
}

}  // namespace

DictionaryTree parse(const std::string& text, const std::optional<std::string>& expected_name) {
    Lexer lexer(text);
    Parser parser(lexer.run());
    DictionaryTree tree;
    tree.entries = parser.parse_body(true);
    tree.header = extract_header(tree.entries, expected_name);
    return tree;
}

std::string serialize(const DictionaryTree& tree) {
    std::ostringstream out;
    out << "FoamFile\n{\n";
    out << "    " << pad_keyword("version") << tree.header.version << ";\n";
    out << "    " << pad_keyword("format") << tree.header.format << ";\n";
    out << "    " << pad_keyword("class") << tree.header.cls << ";\n";
    if (tree.header.location) {
        out << "    " << pad_keyword("location") << *tree.header.location << ";\n";
    }
    out << "    " << pad_keyword("object") << tree.header.object << ";\n";
    out << "}\n\n";
    write_entries(out, tree.entries, 0);
    return out.str();
}

}  // namespace foamforge::dict
