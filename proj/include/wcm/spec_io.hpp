#pragma once

// Text format for ModelSpec.
//
//   # comment
//   [degree]
//   family = poisson          # table | constant | poisson
//   mean = 4
//   min = 1
//   max = 200
//
//   [weights]
//   family = table            # table | constant | poisson | two-point
//   * = 1:0.5 2:0.5           # row shared by all degrees without their own row
//   3 = 2:0.25 3:rest         # "rest" is 1 minus the other entries of the row
//
//   [transmission]
//   family = per-contact      # constant (p) | per-contact (s) | shifted-per-contact (s) | table
//   s = 0.1
//
//   [sweep]                   # optional; read by parse_sweep, ignored by parse_spec
//   parameter = alpha
//   grid = 0.1:3:0.1
//   default = 0.5
//
// Every occurrence of "{x}" in the text is replaced by the sweep value before parsing.
// format_spec writes explicit tables with shortest round-trip decimals, so
// parse_spec(format_spec(s)) == s.

#include "wcm/model_spec.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wcm {

namespace detail {

struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct Section {
    std::string name;
    std::size_t line = 0;
    std::vector<Entry> entries;

    const Entry* find(std::string_view key) const {
        for (const auto& e : entries)
            if (e.key == key)
                return &e;
        return nullptr;
    }
};

inline std::string_view strip(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::string at_line(std::size_t line, const std::string& msg) {
    return "line " + std::to_string(line) + ": " + msg;
}

inline std::vector<Section> split_sections(std::string_view text) {
    std::vector<Section> out;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = strip(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw spec_error(at_line(lineno, "unterminated section header"));
            Section s{std::string(strip(line.substr(1, line.size() - 2))), lineno, {}};
            for (const auto& prev : out)
                if (prev.name == s.name)
                    throw spec_error(at_line(lineno, "duplicate section [" + s.name + "]"));
            out.push_back(std::move(s));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw spec_error(at_line(lineno, "expected 'key = value'"));
        if (out.empty())
            throw spec_error(at_line(lineno, "entry outside of a section"));
        Entry e{std::string(strip(line.substr(0, eq))), std::string(strip(line.substr(eq + 1))), lineno};
        if (e.key.empty())
            throw spec_error(at_line(lineno, "empty key"));
        if (out.back().find(e.key))
            throw spec_error(at_line(lineno, "duplicate key '" + e.key + "'"));
        out.back().entries.push_back(std::move(e));
    }
    return out;
}

inline double to_double(std::string_view s, std::size_t line) {
    s = strip(s);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw spec_error(at_line(line, "expected a number, got '" + std::string(s) + "'"));
    return v;
}

inline int to_int(std::string_view s, std::size_t line) {
    s = strip(s);
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw spec_error(at_line(line, "expected an integer, got '" + std::string(s) + "'"));
    return v;
}

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

inline bool is_integer_key(std::string_view k) {
    return !k.empty() && k.find_first_not_of("0123456789") == std::string_view::npos;
}

/// Reads the family and the named parameters of a section; integer keys (and "*") are table
/// rows and are returned separately. Unknown named keys are rejected.
struct FamilyBlock {
    std::string family;
    std::vector<const Entry*> rows;
    const Section* section = nullptr;

    const Entry& require(std::string_view key) const {
        if (const auto* e = section->find(key))
            return *e;
        throw spec_error(at_line(section->line, "[" + section->name + "] family " + family + " needs '" +
                                                    std::string(key) + "'"));
    }
    const Entry* optional(std::string_view key) const { return section->find(key); }
};

inline FamilyBlock family_block(const Section& s, std::initializer_list<std::string_view> allowed_keys) {
    FamilyBlock b;
    b.section = &s;
    const auto* f = s.find("family");
    b.family = f ? f->value : "table";
    for (const auto& e : s.entries) {
        if (e.key == "family")
            continue;
        if (is_integer_key(e.key) || e.key == "*") {
            b.rows.push_back(&e);
            continue;
        }
        if (std::find(allowed_keys.begin(), allowed_keys.end(), e.key) == allowed_keys.end())
            throw spec_error(at_line(e.line, "unknown key '" + e.key + "' in [" + s.name + "]"));
    }
    if (b.family != "table" && !b.rows.empty())
        throw spec_error(at_line(b.rows.front()->line, "table rows are only allowed with family = table"));
    return b;
}

inline DegreeDistribution parse_degree(const Section& s) {
    const auto b = family_block(s, {"degree", "mean", "min", "max"});
    if (b.family == "table") {
        std::vector<std::pair<int, double>> pmf;
        for (const auto* e : b.rows) {
            if (e->key == "*")
                throw spec_error(at_line(e->line, "'*' is not a degree"));
            pmf.emplace_back(to_int(e->key, e->line), to_double(e->value, e->line));
        }
        return DegreeDistribution(std::move(pmf));
    }
    if (b.family == "constant") {
        const auto& e = b.require("degree");
        return DegreeDistribution::constant(to_int(e.value, e.line));
    }
    if (b.family == "poisson") {
        const auto& mean = b.require("mean");
        const auto& max = b.require("max");
        const auto* min = b.optional("min");
        return DegreeDistribution::poisson(to_double(mean.value, mean.line), min ? to_int(min->value, min->line) : 1,
                                           to_int(max.value, max.line));
    }
    throw spec_error(at_line(s.line, "unknown degree family '" + b.family + "'"));
}

inline WeightKernel::Row parse_kernel_row(const Entry& e) {
    WeightKernel::Row row;
    std::optional<int> rest;
    double total = 0.0;
    std::istringstream in(e.value);
    std::string tok;
    while (in >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos)
            throw spec_error(at_line(e.line, "expected 'weight:probability', got '" + tok + "'"));
        const int w = to_int(std::string_view(tok).substr(0, colon), e.line);
        const auto p = std::string_view(tok).substr(colon + 1);
        if (p == "rest") {
            if (rest)
                throw spec_error(at_line(e.line, "only one 'rest' entry per row"));
            rest = w;
            continue;
        }
        const double q = to_double(p, e.line);
        total += q;
        row.emplace_back(w, q);
    }
    if (rest)
        row.emplace_back(*rest, std::max(0.0, 1.0 - total));
    if (row.empty())
        throw spec_error(at_line(e.line, "empty kernel row"));
    return row;
}

inline WeightKernel parse_weights(const Section& s, const DegreeDistribution& degree) {
    const auto b = family_block(s, {"weight", "gamma", "max", "scale", "low", "high", "alpha", "direction"});
    const auto support = degree.support();
    if (b.family == "table") {
        std::optional<WeightKernel::Row> shared;
        std::map<int, WeightKernel::Row> rows;
        for (const auto* e : b.rows) {
            if (e->key == "*")
                shared = parse_kernel_row(*e);
            else
                rows[to_int(e->key, e->line)] = parse_kernel_row(*e);
        }
        if (shared)
            for (int d : support)
                rows.try_emplace(d, *shared);
        return WeightKernel(rows);
    }
    if (b.family == "constant") {
        const auto& e = b.require("weight");
        return WeightKernel::constant(to_int(e.value, e.line), support);
    }
    if (b.family == "poisson") {
        const auto& g = b.require("gamma");
        const auto& m = b.require("max");
        const double gamma = to_double(g.value, g.line);
        const auto* scale = b.optional("scale");
        const std::string mode = scale ? scale->value : "degree";
        if (mode == "degree")
            return WeightKernel::poisson(support, [gamma](int d) { return gamma / d; }, to_int(m.value, m.line));
        if (mode == "mean") {
            const double mu = degree.mean();
            return WeightKernel::poisson(support, [gamma, mu](int) { return gamma / mu; }, to_int(m.value, m.line));
        }
        throw spec_error(at_line(scale->line, "scale must be 'degree' or 'mean'"));
    }
    if (b.family == "two-point") {
        const auto& lo = b.require("low");
        const auto& hi = b.require("high");
        const auto& al = b.require("alpha");
        const double alpha = to_double(al.value, al.line);
        const auto* dir = b.optional("direction");
        const std::string mode = dir ? dir->value : "decreasing";
        if (mode != "decreasing" && mode != "increasing")
            throw spec_error(at_line(dir->line, "direction must be 'decreasing' or 'increasing'"));
        const bool decreasing = mode == "decreasing";
        return WeightKernel::two_point(support, to_int(lo.value, lo.line), to_int(hi.value, hi.line),
                                       [alpha, decreasing](int d) {
                                           const double decay = std::pow(static_cast<double>(d), -alpha);
                                           return decreasing ? decay : 1.0 - decay;
                                       });
    }
    throw spec_error(at_line(s.line, "unknown weights family '" + b.family + "'"));
}

inline TransmissionFunction parse_transmission(const Section& s) {
    const auto b = family_block(s, {"p", "s"});
    if (b.family == "table") {
        std::map<int, double> values;
        for (const auto* e : b.rows) {
            if (e->key == "*")
                throw spec_error(at_line(e->line, "'*' is not a weight"));
            values[to_int(e->key, e->line)] = to_double(e->value, e->line);
        }
        return TransmissionFunction::table(std::move(values));
    }
    if (b.family == "constant") {
        const auto& e = b.require("p");
        return TransmissionFunction::constant(to_double(e.value, e.line));
    }
    if (b.family == "per-contact" || b.family == "shifted-per-contact") {
        const auto& e = b.require("s");
        const double v = to_double(e.value, e.line);
        return b.family == "per-contact" ? TransmissionFunction::per_contact(v)
                                         : TransmissionFunction::shifted_per_contact(v);
    }
    throw spec_error(at_line(s.line, "unknown transmission family '" + b.family + "'"));
}

inline const Section& require_section(const std::vector<Section>& sections, std::string_view name) {
    for (const auto& s : sections)
        if (s.name == name)
            return s;
    throw spec_error("missing section [" + std::string(name) + "]");
}

} // namespace detail

/// Values start, start+step, ... up to stop (inclusive, within rounding).
inline std::vector<double> make_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(start <= stop) || !std::isfinite(start) || !std::isfinite(stop))
        throw spec_error("grid needs start <= stop and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    return out;
}

/// Parses "start:stop:step".
inline std::vector<double> parse_grid(std::string_view text) {
    const auto a = text.find(':');
    const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
    if (b == std::string_view::npos)
        throw spec_error("grid must be 'start:stop:step', got '" + std::string(text) + "'");
    return make_grid(detail::to_double(text.substr(0, a), 0), detail::to_double(text.substr(a + 1, b - a - 1), 0),
                     detail::to_double(text.substr(b + 1), 0));
}

struct SweepDeclaration {
    std::string parameter;
    std::optional<std::string> grid;
    std::optional<double> default_value;
};

inline std::optional<SweepDeclaration> parse_sweep(std::string_view text) {
    for (const auto& s : detail::split_sections(text)) {
        if (s.name != "sweep")
            continue;
        SweepDeclaration d;
        for (const auto& e : s.entries) {
            if (e.key == "parameter")
                d.parameter = e.value;
            else if (e.key == "grid")
                d.grid = e.value;
            else if (e.key == "default")
                d.default_value = detail::to_double(e.value, e.line);
            else
                throw spec_error(detail::at_line(e.line, "unknown key '" + e.key + "' in [sweep]"));
        }
        return d;
    }
    return std::nullopt;
}

inline bool has_placeholder(std::string_view text) { return text.find("{x}") != std::string_view::npos; }

/// Replaces every "{x}" by x.
inline std::string substitute(std::string_view text, double x) {
    std::string out(text);
    const auto value = detail::format_double(x);
    for (auto pos = out.find("{x}"); pos != std::string::npos; pos = out.find("{x}", pos + value.size()))
        out.replace(pos, 3, value);
    return out;
}

/// Parses a spec document. A "{x}" placeholder takes `x`, or the [sweep] default when x is empty.
inline ModelSpec parse_spec(std::string_view text, std::optional<double> x = std::nullopt) {
    std::string resolved(text);
    if (has_placeholder(text)) {
        if (!x) {
            const auto sweep = parse_sweep(text);
            if (!sweep || !sweep->default_value)
                throw spec_error("spec contains '{x}' but no value was given and [sweep] has no default");
            x = sweep->default_value;
        }
        resolved = substitute(text, *x);
    }
    const auto sections = detail::split_sections(resolved);
    for (const auto& s : sections)
        if (s.name != "degree" && s.name != "weights" && s.name != "transmission" && s.name != "sweep")
            throw spec_error(detail::at_line(s.line, "unknown section [" + s.name + "]"));
    auto degree = detail::parse_degree(detail::require_section(sections, "degree"));
    auto weights = detail::parse_weights(detail::require_section(sections, "weights"), degree);
    auto transmission = detail::parse_transmission(detail::require_section(sections, "transmission"));
    return {std::move(degree), std::move(weights), std::move(transmission)};
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw spec_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ModelSpec load_spec(const std::string& path, std::optional<double> x = std::nullopt) {
    return parse_spec(read_text_file(path), x);
}

/// Explicit-table form of a spec.
inline void write_spec(std::ostream& os, const ModelSpec& spec) {
    using detail::format_double;
    const auto& deg = spec.degree();
    os << "[degree]\nfamily = table\n";
    for (std::size_t i = 0; i < deg.size(); ++i)
        os << deg.support()[i] << " = " << format_double(deg.probabilities()[i]) << '\n';

    os << "\n[weights]\nfamily = table\n";
    const auto& k = spec.weights();
    for (std::size_t i = 0; i < k.degrees().size(); ++i) {
        os << k.degrees()[i] << " =";
        const auto row = k.row(i);
        for (std::size_t w = 0; w < row.size(); ++w)
            if (row[w] > 0.0)
                os << ' ' << k.weights()[w] << ':' << format_double(row[w]);
        os << '\n';
    }

    os << "\n[transmission]\n";
    const auto& t = spec.transmission();
    switch (t.family()) {
    case TransmissionFunction::Family::constant:
        os << "family = constant\np = " << format_double(t.parameter()) << '\n';
        break;
    case TransmissionFunction::Family::per_contact:
        os << "family = per-contact\ns = " << format_double(t.parameter()) << '\n';
        break;
    case TransmissionFunction::Family::shifted_per_contact:
        os << "family = shifted-per-contact\ns = " << format_double(t.parameter()) << '\n';
        break;
    case TransmissionFunction::Family::table:
        os << "family = table\n";
        for (const auto& [w, p] : t.table_values())
            os << w << " = " << format_double(p) << '\n';
        break;
    }
}

inline std::string format_spec(const ModelSpec& spec) {
    std::ostringstream os;
    write_spec(os, spec);
    return os.str();
}

} // namespace wcm
