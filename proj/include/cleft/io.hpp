#pragma once

#include "cleft/construction.hpp"
#include "cleft/version.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cleft::specio {

// A small structured text format: documents are key/value items where a
// value is a bare token, a flat number array in brackets, or a nested
// block in braces. '#' starts a comment. The writer is canonical, so
// export -> parse -> export round-trips byte-identically.

struct Value;
using Item = std::pair<std::string, Value>;

struct Value {
    enum class Kind { Scalar, Numbers, Block };
    Kind kind = Kind::Scalar;
    std::string scalar;
    std::vector<double> numbers;
    std::vector<Item> items;
    int line = 0;
};

namespace detail {

struct Lexer {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    explicit Lexer(const std::string& t) : text(t) {}

    void skip()
    {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '\n') {
                ++line;
                ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++pos;
            } else if (c == '#') {
                while (pos < text.size() && text[pos] != '\n')
                    ++pos;
            } else {
                break;
            }
        }
    }

    bool eof()
    {
        skip();
        return pos >= text.size();
    }

    char peek()
    {
        skip();
        return text[pos];
    }

    char take() { return text[pos++]; }

    std::string word()
    {
        skip();
        std::size_t start = pos;
        while (pos < text.size()) {
            char c = text[pos];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '{' || c == '}' || c == '[' ||
                c == ']' || c == '#')
                break;
            ++pos;
        }
        if (pos == start)
            throw spec_error("syntax error at line " + std::to_string(line) + ": expected a token");
        return text.substr(start, pos - start);
    }
};

inline double parse_number(const std::string& w, int line)
{
    double v = 0.0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size())
        throw spec_error("syntax error at line " + std::to_string(line) + ": '" + w + "' is not a number");
    return v;
}

inline Value parse_value(Lexer& lex);

inline std::vector<Item> parse_items(Lexer& lex, bool top_level)
{
    std::vector<Item> items;
    while (true) {
        if (lex.eof()) {
            if (top_level)
                return items;
            throw spec_error("syntax error: unexpected end of input inside a block");
        }
        if (lex.peek() == '}') {
            if (top_level)
                throw spec_error("syntax error at line " + std::to_string(lex.line) + ": unmatched '}'");
            return items;
        }
        int line = lex.line;
        std::string key = lex.word();
        Value v = parse_value(lex);
        v.line = line;
        items.emplace_back(std::move(key), std::move(v));
    }
}

inline Value parse_value(Lexer& lex)
{
    if (lex.eof())
        throw spec_error("syntax error: unexpected end of input, expected a value");
    Value v;
    v.line = lex.line;
    char c = lex.peek();
    if (c == '{') {
        lex.take();
        v.kind = Value::Kind::Block;
        v.items = parse_items(lex, false);
        lex.skip();
        if (lex.eof() || lex.peek() != '}')
            throw spec_error("syntax error at line " + std::to_string(lex.line) + ": expected '}'");
        lex.take();
        return v;
    }
    if (c == '[') {
        lex.take();
        v.kind = Value::Kind::Numbers;
        while (true) {
            if (lex.eof())
                throw spec_error("syntax error: unexpected end of input inside an array");
            if (lex.peek() == ']') {
                lex.take();
                return v;
            }
            int line = lex.line;
            v.numbers.push_back(parse_number(lex.word(), line));
        }
    }
    if (c == '}' || c == ']')
        throw spec_error("syntax error at line " + std::to_string(lex.line) + ": expected a value");
    v.kind = Value::Kind::Scalar;
    v.scalar = lex.word();
    return v;
}

inline std::string format_number(double x)
{
    if (x == 0.0)
        x = 0.0; // normalize -0
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, p);
}

inline void write_value(std::string& out, const Value& v, int indent);

inline void write_items(std::string& out, const std::vector<Item>& items, int indent)
{
    for (const Item& it : items) {
        out.append(indent, ' ');
        out += it.first;
        out += ' ';
        write_value(out, it.second, indent);
        out += '\n';
    }
}

inline void write_value(std::string& out, const Value& v, int indent)
{
    switch (v.kind) {
    case Value::Kind::Scalar:
        out += v.scalar;
        return;
    case Value::Kind::Numbers: {
        out += '[';
        for (std::size_t i = 0; i < v.numbers.size(); ++i) {
            if (i % 8 == 0) {
                out += '\n';
                out.append(indent + 2, ' ');
            } else {
                out += ' ';
            }
            out += format_number(v.numbers[i]);
        }
        if (!v.numbers.empty()) {
            out += '\n';
            out.append(indent, ' ');
        }
        out += ']';
        return;
    }
    case Value::Kind::Block:
        out += "{\n";
        write_items(out, v.items, indent + 2);
        out.append(indent, ' ');
        out += '}';
        return;
    }
}

} // namespace detail

inline std::vector<Item> parse_document(const std::string& text)
{
    detail::Lexer lex(text);
    return detail::parse_items(lex, true);
}

inline std::string write_document(const std::vector<Item>& items)
{
    std::string out;
    detail::write_items(out, items, 0);
    return out;
}

// --- typed access helpers -------------------------------------------------

inline const Value* find(const std::vector<Item>& items, const std::string& key)
{
    for (const Item& it : items)
        if (it.first == key)
            return &it.second;
    return nullptr;
}

inline const Value& need(const std::vector<Item>& items, const std::string& key, const std::string& where)
{
    const Value* v = find(items, key);
    if (!v)
        throw spec_error(where + ": missing required field '" + key + "'");
    return *v;
}

inline const std::vector<Item>& need_block(const std::vector<Item>& items, const std::string& key,
                                           const std::string& where)
{
    const Value& v = need(items, key, where);
    if (v.kind != Value::Kind::Block)
        throw spec_error(where + "." + key + " (line " + std::to_string(v.line) + "): expected a block");
    return v.items;
}

inline const std::string& need_scalar(const std::vector<Item>& items, const std::string& key,
                                      const std::string& where)
{
    const Value& v = need(items, key, where);
    if (v.kind != Value::Kind::Scalar)
        throw spec_error(where + "." + key + " (line " + std::to_string(v.line) + "): expected a scalar");
    return v.scalar;
}

inline const std::vector<double>& need_numbers(const std::vector<Item>& items, const std::string& key,
                                               const std::string& where)
{
    const Value& v = need(items, key, where);
    if (v.kind != Value::Kind::Numbers)
        throw spec_error(where + "." + key + " (line " + std::to_string(v.line) + "): expected an array");
    return v.numbers;
}

inline int need_int(const std::vector<Item>& items, const std::string& key, const std::string& where)
{
    const std::string& s = need_scalar(items, key, where);
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw spec_error(where + "." + key + ": '" + s + "' is not an integer");
    return v;
}

inline double need_double(const std::vector<Item>& items, const std::string& key, const std::string& where)
{
    const std::string& s = need_scalar(items, key, where);
    return detail::parse_number(s, need(items, key, where).line);
}

// --- system spec ------------------------------------------------------------

/// Parsed spec file: the validated (group, algebra, factor system) triple
/// plus optional tolerance overrides.
struct SystemSpecFile {
    FactorSystem system;
    std::optional<Tolerances> tolerance;

    Tolerances effective_tolerance() const { return tolerance.value_or(Tolerances{}); }
};

namespace detail {

inline std::vector<double> complex_array(const std::vector<cmat>& mats)
{
    std::vector<double> out;
    for (const cmat& m : mats)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                out.push_back(m(r, c).real());
                out.push_back(m(r, c).imag());
            }
    return out;
}

inline std::vector<cmat> matrices_from_array(const std::vector<double>& data, int count, int rows, int cols,
                                             const std::string& where)
{
    if (static_cast<std::size_t>(count) * rows * cols * 2 != data.size())
        throw spec_error(where + ": expected " + std::to_string(2 * count * rows * cols) + " numbers, got " +
                         std::to_string(data.size()));
    std::vector<cmat> out;
    std::size_t k = 0;
    for (int i = 0; i < count; ++i) {
        cmat m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                m(r, c) = complexd(data[k], data[k + 1]);
                k += 2;
            }
        out.push_back(std::move(m));
    }
    return out;
}

inline std::vector<Item> group_to_items(const GroupData& gd)
{
    std::vector<Item> out;
    if (gd.group.name != "custom") {
        Value v;
        v.kind = Value::Kind::Scalar;
        v.scalar = gd.group.name;
        out.emplace_back("catalog", std::move(v));
        return out;
    }
    Value order;
    order.kind = Value::Kind::Scalar;
    order.scalar = std::to_string(gd.group.order);
    out.emplace_back("order", std::move(order));
    Value cay;
    cay.kind = Value::Kind::Numbers;
    for (int g = 0; g < gd.group.order; ++g)
        for (int h = 0; h < gd.group.order; ++h)
            cay.numbers.push_back(gd.group.cayley[g][h]);
    out.emplace_back("cayley", std::move(cay));
    for (const Irrep& r : gd.irreps) {
        Value blk;
        blk.kind = Value::Kind::Block;
        Value label;
        label.kind = Value::Kind::Scalar;
        label.scalar = r.label;
        blk.items.emplace_back("label", std::move(label));
        Value dim;
        dim.kind = Value::Kind::Scalar;
        dim.scalar = std::to_string(r.dim);
        blk.items.emplace_back("dim", std::move(dim));
        Value mats;
        mats.kind = Value::Kind::Numbers;
        mats.numbers = complex_array(r.matrices);
        blk.items.emplace_back("matrices", std::move(mats));
        out.emplace_back("irrep", std::move(blk));
    }
    return out;
}

inline GroupData group_from_items(const std::vector<Item>& items)
{
    if (const Value* cat = find(items, "catalog")) {
        if (cat->kind != Value::Kind::Scalar)
            throw spec_error("group.catalog (line " + std::to_string(cat->line) + "): expected a name");
        return build_group(cat->scalar);
    }
    const int order = need_int(items, "order", "group");
    const std::vector<double>& cay = need_numbers(items, "cayley", "group");
    if (static_cast<int>(cay.size()) != order * order)
        throw spec_error("group.cayley: expected " + std::to_string(order * order) + " entries, got " +
                         std::to_string(cay.size()));
    std::vector<std::vector<int>> table(order, std::vector<int>(order));
    for (int g = 0; g < order; ++g)
        for (int h = 0; h < order; ++h) {
            double v = cay[g * order + h];
            int iv = static_cast<int>(std::lround(v));
            if (std::abs(v - iv) > 1e-12)
                throw spec_error("group.cayley: entry (" + std::to_string(g) + "," + std::to_string(h) +
                                 ") is not an integer");
            table[g][h] = iv;
        }
    std::vector<Irrep> irreps;
    for (const Item& it : items) {
        if (it.first != "irrep")
            continue;
        if (it.second.kind != Value::Kind::Block)
            throw spec_error("group.irrep (line " + std::to_string(it.second.line) + "): expected a block");
        Irrep r;
        r.label = need_scalar(it.second.items, "label", "group.irrep");
        r.dim = need_int(it.second.items, "dim", "group.irrep");
        if (r.dim < 1)
            throw spec_error("group.irrep '" + r.label + "': dimension must be positive");
        r.matrices = matrices_from_array(need_numbers(it.second.items, "matrices", "group.irrep"), order,
                                         r.dim, r.dim, "group.irrep '" + r.label + "' matrices");
        irreps.push_back(std::move(r));
    }
    if (irreps.empty())
        throw spec_error("group: a custom group needs its complete irrep list");
    return make_group_data(validate_group_table(std::move(table)), std::move(irreps));
}

} // namespace detail

/// Canonical serialization of a factor system (plus optional tolerance
/// override). Deterministic: fixed key order, catalog-ordered gammas,
/// lexicographic omegas, shortest round-trip number formatting.
inline std::string write_system_spec(const FactorSystem& fs,
                                     const std::optional<Tolerances>& tol = std::nullopt)
{
    std::vector<Item> root;
    Value top;
    top.kind = Value::Kind::Block;

    Value fmt;
    fmt.kind = Value::Kind::Scalar;
    fmt.scalar = std::to_string(kSpecFormatVersion);
    top.items.emplace_back("format_version", std::move(fmt));

    Value grp;
    grp.kind = Value::Kind::Block;
    grp.items = detail::group_to_items(fs.group);
    top.items.emplace_back("group", std::move(grp));

    Value alg;
    alg.kind = Value::Kind::Block;
    Value blocks;
    blocks.kind = Value::Kind::Numbers;
    for (int n : fs.algebra.blocks)
        blocks.numbers.push_back(n);
    alg.items.emplace_back("blocks", std::move(blocks));
    top.items.emplace_back("algebra", std::move(alg));

    Value fsys;
    fsys.kind = Value::Kind::Block;
    for (int p = 0; p < fs.irrep_count(); ++p) {
        Value g;
        g.kind = Value::Kind::Block;
        Value label;
        label.kind = Value::Kind::Scalar;
        label.scalar = fs.group.irreps[p].label;
        g.items.emplace_back("irrep", std::move(label));
        Value mat;
        mat.kind = Value::Kind::Numbers;
        mat.numbers = detail::complex_array({fs.gamma[p].mat});
        g.items.emplace_back("matrix", std::move(mat));
        fsys.items.emplace_back("gamma", std::move(g));
    }
    for (int p = 0; p < fs.irrep_count(); ++p)
        for (int r = 0; r < fs.irrep_count(); ++r) {
            Value w;
            w.kind = Value::Kind::Block;
            Value l;
            l.kind = Value::Kind::Scalar;
            l.scalar = fs.group.irreps[p].label;
            w.items.emplace_back("left", std::move(l));
            Value rr;
            rr.kind = Value::Kind::Scalar;
            rr.scalar = fs.group.irreps[r].label;
            w.items.emplace_back("right", std::move(rr));
            Value elt;
            elt.kind = Value::Kind::Block;
            for (const cmat& b : fs.omega_at(p, r).blocks) {
                Value bv;
                bv.kind = Value::Kind::Numbers;
                bv.numbers = detail::complex_array({b});
                elt.items.emplace_back("block", std::move(bv));
            }
            w.items.emplace_back("element", std::move(elt));
            fsys.items.emplace_back("omega", std::move(w));
        }
    top.items.emplace_back("factor_system", std::move(fsys));

    if (tol) {
        Value t;
        t.kind = Value::Kind::Block;
        Value a;
        a.kind = Value::Kind::Scalar;
        a.scalar = detail::format_number(tol->algebraic);
        t.items.emplace_back("algebraic", std::move(a));
        Value c;
        c.kind = Value::Kind::Scalar;
        c.scalar = detail::format_number(tol->character);
        t.items.emplace_back("character", std::move(c));
        top.items.emplace_back("tolerance", std::move(t));
    }

    root.emplace_back("cleft_system", std::move(top));
    return write_document(root);
}

/// Parses and structurally validates a system spec: the group is checked
/// as a group with a complete irrep catalog, gammas must be unital
/// *-homomorphisms, omegas isometries with omega(1,1) = 1. Axioms beyond
/// these (coaction/cocycle) are the verify command's job.
inline SystemSpecFile parse_system_spec(const std::string& text)
{
    std::vector<Item> root = parse_document(text);
    const std::vector<Item>& top = need_block(root, "cleft_system", "document");
    int fmt = need_int(top, "format_version", "cleft_system");
    if (fmt != kSpecFormatVersion)
        throw spec_error("cleft_system: unsupported format_version " + std::to_string(fmt));

    SystemSpecFile out;
    if (const Value* t = find(top, "tolerance")) {
        if (t->kind != Value::Kind::Block)
            throw spec_error("cleft_system.tolerance: expected a block");
        Tolerances tol;
        tol.algebraic = need_double(t->items, "algebraic", "tolerance");
        tol.character = need_double(t->items, "character", "tolerance");
        if (tol.algebraic <= 0 || tol.character <= 0)
            throw spec_error("cleft_system.tolerance: thresholds must be positive");
        out.tolerance = tol;
    }
    const Tolerances tol = out.effective_tolerance();

    FactorSystem fs;
    fs.group = detail::group_from_items(need_block(top, "group", "cleft_system"));

    {
        const std::vector<Item>& alg = need_block(top, "algebra", "cleft_system");
        const std::vector<double>& blocks = need_numbers(alg, "blocks", "algebra");
        if (blocks.empty())
            throw spec_error("algebra.blocks: at least one block is required");
        for (double b : blocks) {
            int ib = static_cast<int>(std::lround(b));
            if (std::abs(b - ib) > 1e-12 || ib < 1)
                throw spec_error("algebra.blocks: block dimensions must be positive integers");
            fs.algebra.blocks.push_back(ib);
        }
    }

    const int k = fs.irrep_count();
    const std::vector<Item>& fsys = need_block(top, "factor_system", "cleft_system");
    fs.gamma.assign(k, BLinearMap{});
    std::vector<bool> seen_gamma(k, false);
    fs.omega.assign(static_cast<std::size_t>(k) * k, TensorElement{});
    std::vector<bool> seen_omega(static_cast<std::size_t>(k) * k, false);

    for (const Item& it : fsys) {
        if (it.first == "gamma") {
            const std::vector<Item>& g = it.second.items;
            if (it.second.kind != Value::Kind::Block)
                throw spec_error("factor_system.gamma (line " + std::to_string(it.second.line) +
                                 "): expected a block");
            const std::string& label = need_scalar(g, "irrep", "factor_system.gamma");
            int p = fs.group.index_of(label);
            if (seen_gamma[p])
                throw spec_error("factor_system: duplicate gamma for irrep '" + label + "'");
            seen_gamma[p] = true;
            const int d = fs.group.irreps[p].dim;
            const int rows = te_vec_dim(fs.algebra, {d});
            const int cols = fs.algebra.vec_dim();
            std::vector<cmat> m = detail::matrices_from_array(
                need_numbers(g, "matrix", "factor_system.gamma"), 1, rows, cols,
                "factor_system.gamma '" + label + "' matrix");
            BLinearMap map;
            map.domain = fs.algebra;
            map.codomain_algebra = fs.algebra;
            map.codomain_legs = {d};
            map.mat = std::move(m.front());
            fs.gamma[p] = std::move(map);
        } else if (it.first == "omega") {
            if (it.second.kind != Value::Kind::Block)
                throw spec_error("factor_system.omega (line " + std::to_string(it.second.line) +
                                 "): expected a block");
            const std::vector<Item>& w = it.second.items;
            int p = fs.group.index_of(need_scalar(w, "left", "factor_system.omega"));
            int r = fs.group.index_of(need_scalar(w, "right", "factor_system.omega"));
            if (seen_omega[p * k + r])
                throw spec_error("factor_system: duplicate omega for pair (" + fs.group.irreps[p].label +
                                 "," + fs.group.irreps[r].label + ")");
            seen_omega[p * k + r] = true;
            const std::vector<Item>& elt = need_block(w, "element", "factor_system.omega");
            TensorElement te = TensorElement::zero(fs.algebra, {fs.group.irreps[p].dim, fs.group.irreps[r].dim});
            std::size_t bi = 0;
            const int d = te.leg_dim();
            for (const Item& bit : elt) {
                if (bit.first != "block")
                    throw spec_error("factor_system.omega.element: unexpected field '" + bit.first + "'");
                if (bi >= te.blocks.size())
                    throw spec_error("factor_system.omega (" + fs.group.irreps[p].label + "," +
                                     fs.group.irreps[r].label + "): too many blocks");
                const int n = fs.algebra.blocks[bi] * d;
                if (bit.second.kind != Value::Kind::Numbers)
                    throw spec_error("factor_system.omega.element.block: expected an array");
                te.blocks[bi] = detail::matrices_from_array(bit.second.numbers, 1, n, n,
                                                            "factor_system.omega block")
                                    .front();
                ++bi;
            }
            if (bi != te.blocks.size())
                throw spec_error("factor_system.omega (" + fs.group.irreps[p].label + "," +
                                 fs.group.irreps[r].label + "): expected " + std::to_string(te.blocks.size()) +
                                 " blocks, got " + std::to_string(bi));
            fs.omega[p * k + r] = std::move(te);
        } else {
            throw spec_error("factor_system: unexpected field '" + it.first + "' (line " +
                             std::to_string(it.second.line) + ")");
        }
    }
    for (int p = 0; p < k; ++p)
        if (!seen_gamma[p])
            throw spec_error("factor_system: missing gamma for irrep '" + fs.group.irreps[p].label + "'");
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r)
            if (!seen_omega[p * k + r])
                throw spec_error("factor_system: missing omega for pair (" + fs.group.irreps[p].label + "," +
                                 fs.group.irreps[r].label + ")");

    // structural invariants of the factor-system type
    fs.require_well_formed();
    for (int p = 0; p < k; ++p) {
        StarHomReport hom = verify_unital_star_hom(fs.gamma[p], tol);
        if (!hom.pass) {
            std::ostringstream os;
            os << "factor_system.gamma '" << fs.group.irreps[p].label << "' is not a unital *-homomorphism";
            if (hom.mult_residual >= tol.algebraic)
                os << " (multiplicativity fails on basis pair (" << hom.failing_i << "," << hom.failing_j
                   << ") with residual " << hom.mult_residual << ")";
            throw spec_error(os.str());
        }
    }
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r) {
            const TensorElement& w = fs.omega_at(p, r);
            if (distance(w.adjoint() * w, TensorElement::identity(fs.algebra, w.legs)) >= tol.algebraic)
                throw spec_error("factor_system.omega (" + fs.group.irreps[p].label + "," +
                                 fs.group.irreps[r].label + ") is not an isometry");
        }
    {
        const int one = fs.group.trivial_index;
        const TensorElement& w = fs.omega_at(one, one);
        if (distance(w, TensorElement::identity(fs.algebra, w.legs)) >= tol.algebraic)
            throw spec_error("factor_system violates the normalization omega(1,1) = 1");
    }
    out.system = std::move(fs);
    return out;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw spec_error("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw spec_error("cannot write file '" + path + "'");
    out << bytes;
}

// --- structure constant dump -------------------------------------------

/// Canonical dump of the structure constants of a constructed system,
/// with the basis enumeration declared per component.
inline std::string write_constants(const ConstructedSystem& sys)
{
    std::vector<Item> root;
    Value top;
    top.kind = Value::Kind::Block;

    Value fmt;
    fmt.kind = Value::Kind::Scalar;
    fmt.scalar = std::to_string(kSpecFormatVersion);
    top.items.emplace_back("format_version", std::move(fmt));

    Value basis;
    basis.kind = Value::Kind::Scalar;
    basis.scalar = "matrix-units-block-major-row-major";
    top.items.emplace_back("basis", std::move(basis));

    Value grp;
    grp.kind = Value::Kind::Block;
    grp.items = detail::group_to_items(sys.fs.group);
    top.items.emplace_back("group", std::move(grp));

    Value alg;
    alg.kind = Value::Kind::Block;
    Value blocks;
    blocks.kind = Value::Kind::Numbers;
    for (int n : sys.fs.algebra.blocks)
        blocks.numbers.push_back(n);
    alg.items.emplace_back("blocks", std::move(blocks));
    top.items.emplace_back("algebra", std::move(alg));

    const int k = sys.irrep_count();
    for (int p = 0; p < k; ++p) {
        Value comp;
        comp.kind = Value::Kind::Block;
        Value label;
        label.kind = Value::Kind::Scalar;
        label.scalar = sys.fs.group.irreps[p].label;
        comp.items.emplace_back("irrep", std::move(label));
        Value dim;
        dim.kind = Value::Kind::Scalar;
        dim.scalar = std::to_string(sys.fs.group.irreps[p].dim);
        comp.items.emplace_back("dim", std::move(dim));
        Value vdim;
        vdim.kind = Value::Kind::Scalar;
        vdim.scalar = std::to_string(sys.comp_vec_dim[p]);
        comp.items.emplace_back("basis_dim", std::move(vdim));
        top.items.emplace_back("component", std::move(comp));
    }

    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r)
            for (int s = 0; s < k; ++s) {
                const cmat& m = sys.constants[(p * k + r) * k + s];
                if (m.size() == 0)
                    continue;
                Value t;
                t.kind = Value::Kind::Block;
                auto scalar = [](const std::string& s2) {
                    Value v;
                    v.kind = Value::Kind::Scalar;
                    v.scalar = s2;
                    return v;
                };
                t.items.emplace_back("pi", scalar(sys.fs.group.irreps[p].label));
                t.items.emplace_back("rho", scalar(sys.fs.group.irreps[r].label));
                t.items.emplace_back("sigma", scalar(sys.fs.group.irreps[s].label));
                Value data;
                data.kind = Value::Kind::Numbers;
                data.numbers = detail::complex_array({m});
                t.items.emplace_back("data", std::move(data));
                top.items.emplace_back("tensor", std::move(t));
            }

    root.emplace_back("cleft_constants", std::move(top));
    return write_document(root);
}

/// Parsed form of a constants dump (used for round-trip checks and
/// downstream consumption).
struct ConstantsDump {
    GroupData group;
    BAlgebra algebra;
    std::vector<std::string> component_labels;
    std::vector<int> component_dims;
    std::vector<int> component_basis_dims;
    struct Tensor {
        std::string pi, rho, sigma;
        cmat data;
    };
    std::vector<Tensor> tensors;
};

inline ConstantsDump parse_constants(const std::string& text)
{
    std::vector<Item> root = parse_document(text);
    const std::vector<Item>& top = need_block(root, "cleft_constants", "document");
    int fmt = need_int(top, "format_version", "cleft_constants");
    if (fmt != kSpecFormatVersion)
        throw spec_error("cleft_constants: unsupported format_version " + std::to_string(fmt));
    if (need_scalar(top, "basis", "cleft_constants") != "matrix-units-block-major-row-major")
        throw spec_error("cleft_constants: unknown basis enumeration");

    ConstantsDump out;
    out.group = detail::group_from_items(need_block(top, "group", "cleft_constants"));
    for (double b : need_numbers(need_block(top, "algebra", "cleft_constants"), "blocks", "algebra"))
        out.algebra.blocks.push_back(static_cast<int>(std::lround(b)));

    for (const Item& it : top) {
        if (it.first == "component") {
            out.component_labels.push_back(need_scalar(it.second.items, "irrep", "component"));
            out.component_dims.push_back(need_int(it.second.items, "dim", "component"));
            out.component_basis_dims.push_back(need_int(it.second.items, "basis_dim", "component"));
        } else if (it.first == "tensor") {
            ConstantsDump::Tensor t;
            t.pi = need_scalar(it.second.items, "pi", "tensor");
            t.rho = need_scalar(it.second.items, "rho", "tensor");
            t.sigma = need_scalar(it.second.items, "sigma", "tensor");
            int ps = out.group.index_of(t.sigma);
            int pp = out.group.index_of(t.pi);
            int pr = out.group.index_of(t.rho);
            int rows = te_vec_dim(out.algebra, {out.group.irreps[ps].dim});
            int cols = te_vec_dim(out.algebra, {out.group.irreps[pp].dim}) *
                       te_vec_dim(out.algebra, {out.group.irreps[pr].dim});
            t.data = detail::matrices_from_array(need_numbers(it.second.items, "data", "tensor"), 1, rows,
                                                 cols, "tensor data")
                         .front();
            out.tensors.push_back(std::move(t));
        }
    }
    return out;
}

} // namespace cleft::specio
