#pragma once

#include <optional>
#include <string>
#include <vector>

namespace foamforge::dict {

struct Entry;

/// One element of an entry value. Entry values are token sequences, so
/// "uniform (1 0 0)" is a word item followed by a list item, and a
/// dimensioned scalar "nu [0 2 -1 0 0 0 0] 1e-05" is a dimension-set item
/// followed by a scalar token.
struct Item {
    enum class Kind { token, list, dims, dict };

    Kind kind = Kind::token;
    std::string token;                    // Kind::token (raw, quotes preserved)
    std::vector<Item> items;              // Kind::list
    std::vector<std::string> dims;        // Kind::dims (raw components of [ ... ])
    std::vector<Entry> entries;           // Kind::dict

    static Item make_token(std::string t);
    static Item make_list(std::vector<Item> children);
    static Item make_dims(std::vector<std::string> components);
    static Item make_dict(std::vector<Entry> entries);

    bool operator==(const Item&) const;
};

struct Entry {
    enum class Kind {
        value,      // keyword tokens... ;
        block,      // keyword { ... }
        directive,  // #include "..." and friends, kept opaque
    };

    Kind kind = Kind::value;
    std::string keyword;
    std::vector<Item> value;

    bool operator==(const Entry&) const;
};

struct Header {
    std::string version = "2.0";
    std::string format = "ascii";
    std::string cls = "dictionary";
    std::optional<std::string> location;
    std::string object;

    bool operator==(const Header&) const = default;
};

/// A parsed OpenFOAM dictionary file: the FoamFile header plus the ordered
/// entries of the body. Comments are discarded on parse.
struct DictionaryTree {
    Header header;
    std::vector<Entry> entries;

    bool operator==(const DictionaryTree&) const = default;

    /// First body entry with the given keyword, or nullptr.
    const Entry* find(const std::string& keyword) const;

    /// Follows a path of block keywords, e.g. find_block({"boundaryField"}).
    const std::vector<Entry>* find_block(const std::vector<std::string>& path) const;
};

const Entry* find_entry(const std::vector<Entry>& entries, const std::string& keyword);

/// Parses OpenFOAM ASCII dictionary source. When expected_name is given it
/// becomes header.object, keeping the header consistent with the file name
/// the content is stored under. Throws ParseError.
DictionaryTree parse(const std::string& text,
                     const std::optional<std::string>& expected_name = std::nullopt);

/// Renders a tree back to dictionary source. parse(serialize(t)) is
/// structurally equal to t.
std::string serialize(const DictionaryTree& tree);

}  // namespace foamforge::dict
