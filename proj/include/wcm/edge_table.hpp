#pragma once

// Stub-level count tables n(w,d): the number of edge endpoints with weight w sitting on
// degree-d vertices. Each d-vertex contributes exactly d records, so sum_w n(w,d) = d n(d).

#include "wcm/error.hpp"
#include "wcm/graph.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <utility>

namespace wcm {

class EdgeWeightTable {
public:
    using Key = std::pair<int, int>; ///< (w, d)

    /// Adds `count` records to cell (w, d). Zero counts leave the table unchanged.
    void add(int w, int d, long long count) {
        if (count < 0)
            throw ingest_error(ingest_error::kind::negative_count, 0, "negative count");
        if (d < 1 || w < 0)
            throw ingest_error(ingest_error::kind::malformed_row, 0, "degree must be >= 1 and weight >= 0");
        if (count > 0)
            counts_[{w, d}] += count;
    }

    const std::map<Key, long long>& counts() const noexcept { return counts_; }
    bool empty() const noexcept { return counts_.empty(); }

    long long count(int w, int d) const {
        const auto it = counts_.find({w, d});
        return it == counts_.end() ? 0 : it->second;
    }

    /// sum_w n(w,d) per degree.
    std::map<int, long long> stubs_by_degree() const {
        std::map<int, long long> out;
        for (const auto& [key, c] : counts_)
            out[key.second] += c;
        return out;
    }

    /// n(d) = sum_w n(w,d) / d. Throws ingest_error when a degree's stubs are not a multiple of d.
    std::map<int, long long> vertices_by_degree() const {
        std::map<int, long long> out;
        for (const auto& [d, stubs] : stubs_by_degree()) {
            if (stubs % d != 0)
                throw ingest_error(ingest_error::kind::divisibility, 0,
                                   "degree " + std::to_string(d) + " has " + std::to_string(stubs) +
                                       " stub records, not a multiple of " + std::to_string(d));
            out[d] = stubs / d;
        }
        return out;
    }

    long long vertex_count() const {
        long long n = 0;
        for (const auto& [d, c] : vertices_by_degree())
            n += c;
        return n;
    }

    long long stub_count() const {
        long long s = 0;
        for (const auto& [key, c] : counts_)
            s += c;
        return s;
    }

    /// Checks the divisibility invariant and non-emptiness.
    void validate() const {
        if (counts_.empty())
            throw ingest_error(ingest_error::kind::no_records, 0, "no records");
        (void)vertices_by_degree();
    }

    friend bool operator==(const EdgeWeightTable&, const EdgeWeightTable&) = default;

private:
    std::map<Key, long long> counts_;
};

/// Tabulates a realized graph: every edge (u, v, w) adds one record to n(w, deg u) and one
/// to n(w, deg v), using realized degrees so the divisibility invariant always holds.
inline EdgeWeightTable empirical_table(const WeightedGraph& g) {
    const auto deg = g.realized_degrees();
    EdgeWeightTable t;
    for (const auto& e : g.edges) {
        t.add(e.w, deg[e.u], 1);
        t.add(e.w, deg[e.v], 1);
    }
    return t;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline bool parse_ll(std::string_view s, long long& out) {
    s = trim(s);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty();
}

} // namespace detail

/// Reads "w,d,count" CSV (header required). Blank lines and '#' comments are skipped.
inline EdgeWeightTable read_table_csv(std::istream& is) {
    EdgeWeightTable t;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::map<int, std::size_t> last_row;
    while (std::getline(is, line)) {
        ++lineno;
        const auto s = detail::trim(line);
        if (s.empty() || s.front() == '#')
            continue;
        if (!header) {
            std::string h;
            for (char c : s)
                if (c != ' ' && c != '\t')
                    h += c;
            if (h != "w,d,count")
                throw ingest_error(ingest_error::kind::malformed_row, lineno, "expected header 'w,d,count'");
            header = true;
            continue;
        }
        const auto c1 = s.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : s.find(',', c1 + 1);
        long long w, d, count;
        if (c2 == std::string_view::npos || s.find(',', c2 + 1) != std::string_view::npos ||
            !detail::parse_ll(s.substr(0, c1), w) || !detail::parse_ll(s.substr(c1 + 1, c2 - c1 - 1), d) ||
            !detail::parse_ll(s.substr(c2 + 1), count))
            throw ingest_error(ingest_error::kind::malformed_row, lineno, "expected 'w,d,count', got '" + line + "'");
        if (count < 0)
            throw ingest_error(ingest_error::kind::negative_count, lineno, "negative count");
        if (w < 0 || d < 1 || w > std::numeric_limits<int>::max() || d > std::numeric_limits<int>::max())
            throw ingest_error(ingest_error::kind::malformed_row, lineno, "weight must be >= 0 and degree >= 1");
        t.add(static_cast<int>(w), static_cast<int>(d), count);
        last_row[static_cast<int>(d)] = lineno;
    }
    if (t.empty())
        throw ingest_error(ingest_error::kind::no_records, lineno, "no records");
    // report a divisibility violation at the last row of the offending degree
    for (const auto& [d, stubs] : t.stubs_by_degree())
        if (stubs % d != 0)
            throw ingest_error(ingest_error::kind::divisibility, last_row.at(d),
                               "degree " + std::to_string(d) + " has " + std::to_string(stubs) +
                                   " stub records, not a multiple of " + std::to_string(d));
    return t;
}

inline EdgeWeightTable read_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ingest_error(ingest_error::kind::io, 0, "cannot open " + path);
    return read_table_csv(in);
}

inline void write_table_csv(std::ostream& os, const EdgeWeightTable& t) {
    os << "w,d,count\n";
    for (const auto& [key, c] : t.counts())
        os << key.first << ',' << key.second << ',' << c << '\n';
}

/// Reads an edge list ("u v w" lines) and tabulates it; degrees are implied by incidence.
inline EdgeWeightTable read_edge_list_table(std::istream& is) {
    auto t = empirical_table(read_edge_list(is).graph);
    t.validate();
    return t;
}

} // namespace wcm
