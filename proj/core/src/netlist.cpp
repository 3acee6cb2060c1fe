#include "secov/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace secov {

namespace {

struct KindInfo {
    CellKind kind;
    const char* name;
    int arity;
};

constexpr KindInfo kKinds[] = {
    {CellKind::AND, "and", 2},     {CellKind::OR, "or", 2},
    {CellKind::NAND, "nand", 2},   {CellKind::NOR, "nor", 2},
    {CellKind::XOR, "xor", 2},     {CellKind::XNOR, "xnor", 2},
    {CellKind::NOT, "not", 1},     {CellKind::BUF, "buf", 1},
    {CellKind::MUX2, "mux2", 3},   {CellKind::CONST0, "const0", 0},
    {CellKind::CONST1, "const1", 0}, {CellKind::DFF, "dff", 2},
};

const KindInfo& kind_info(CellKind k) {
    for (const auto& ki : kKinds)
        if (ki.kind == k) return ki;
    throw Error("unknown cell kind");
}

} // namespace

const char* cell_kind_name(CellKind k) { return kind_info(k).name; }

std::optional<CellKind> cell_kind_from_name(std::string_view name) {
    for (const auto& ki : kKinds)
        if (name == ki.name) return ki.kind;
    return std::nullopt;
}

int cell_arity(CellKind k) { return kind_info(k).arity; }

// --- Netlist queries ----------------------------------------------------

std::optional<NetId> Netlist::find_net(std::string_view name) const {
    for (const auto& n : nets_)
        if (n.name == name) return n.id;
    return std::nullopt;
}

const Bus* Netlist::find_bus(std::string_view base) const {
    for (const auto& b : buses_)
        if (b.base == base) return &b;
    return nullptr;
}

std::optional<CellId> Netlist::driver(NetId id) const {
    std::int64_t d = driver_.at(id);
    if (d < 0) return std::nullopt;
    return static_cast<CellId>(d);
}

bool Netlist::is_primary_input(NetId id) const {
    return std::find(primary_inputs_.begin(), primary_inputs_.end(), id) !=
           primary_inputs_.end();
}

std::vector<NetId> list_nodes(const Netlist& n) { return n.nodes(); }

// --- NetlistBuilder -----------------------------------------------------

NetId NetlistBuilder::add_net(std::string name, NetOrigin origin) {
    if (name.empty()) throw Error("net name must be nonempty");
    if (by_name_.count(name))
        throw Error("duplicate net name '" + name + "'");
    NetId id = static_cast<NetId>(nets_.size());
    by_name_.emplace(name, id);
    nets_.push_back(Net{id, std::move(name), origin});
    return id;
}

std::vector<NetId> NetlistBuilder::add_bus(const std::string& base, int msb, int lsb,
                                           NetOrigin origin) {
    if (msb < lsb) throw Error("bus range must be [msb:lsb] with msb >= lsb");
    Bus bus{base, msb, lsb, {}};
    for (int i = msb; i >= lsb; --i)
        bus.bits.push_back(add_net(base + "[" + std::to_string(i) + "]", origin));
    buses_.push_back(bus);
    return buses_.back().bits;
}

void NetlistBuilder::register_bus(const std::string& base, int msb, int lsb,
                                  std::vector<NetId> bits) {
    for (NetId id : bits)
        if (id >= nets_.size()) throw Error("register_bus references unknown net");
    buses_.push_back(Bus{base, msb, lsb, std::move(bits)});
}

CellId NetlistBuilder::add_cell(CellKind kind, std::string name,
                                std::vector<NetId> inputs, NetId output,
                                bool reset_value) {
    if (kind == CellKind::DFF) {
        if (inputs.size() != 2 && inputs.size() != 3)
            throw Error("dff takes (q, d, clk[, rstn[, rv]])");
    } else if (static_cast<int>(inputs.size()) != cell_arity(kind)) {
        throw Error(std::string(cell_kind_name(kind)) + " expects " +
                    std::to_string(cell_arity(kind)) + " inputs");
    }
    for (NetId in : inputs)
        if (in >= nets_.size()) throw Error("cell input references unknown net");
    if (output >= nets_.size()) throw Error("cell output references unknown net");
    CellId id = static_cast<CellId>(cells_.size());
    if (name.empty()) name = "u" + std::to_string(id);
    cells_.push_back(Cell{kind, std::move(name), std::move(inputs), output, reset_value});
    return id;
}

void NetlistBuilder::mark_input(NetId id) {
    if (std::find(inputs_.begin(), inputs_.end(), id) == inputs_.end())
        inputs_.push_back(id);
}

void NetlistBuilder::mark_output(NetId id) {
    if (std::find(outputs_.begin(), outputs_.end(), id) == outputs_.end())
        outputs_.push_back(id);
}

std::optional<NetId> NetlistBuilder::find_net(std::string_view name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

bool NetlistBuilder::has_cell_name(std::string_view name) const {
    for (const auto& c : cells_)
        if (c.name == name) return true;
    return false;
}

Netlist NetlistBuilder::build() {
    Netlist n;
    n.cells_ = std::move(cells_);
    n.nets_ = std::move(nets_);
    n.primary_inputs_ = std::move(inputs_);
    n.primary_outputs_ = std::move(outputs_);
    n.buses_ = std::move(buses_);
    *this = NetlistBuilder();

    std::unordered_set<std::string> cell_names;
    for (const auto& c : n.cells_)
        if (!cell_names.insert(c.name).second)
            throw Error("duplicate cell name '" + c.name + "'");

    for (NetId in : n.primary_inputs_)
        for (NetId out : n.primary_outputs_)
            if (in == out)
                throw Error("net '" + n.net_name(in) +
                            "' cannot be both primary input and output");

    // Single driver: primary inputs count as drivers.
    n.driver_.assign(n.nets_.size(), -1);
    std::vector<bool> is_pi(n.nets_.size(), false);
    for (NetId id : n.primary_inputs_) is_pi[id] = true;
    for (CellId ci = 0; ci < n.cells_.size(); ++ci) {
        NetId out = n.cells_[ci].output;
        if (is_pi[out])
            throw Error("multiple drivers on net '" + n.net_name(out) +
                        "' (primary input also driven by cell '" + n.cells_[ci].name + "')");
        if (n.driver_[out] >= 0)
            throw Error("multiple drivers on net '" + n.net_name(out) + "'");
        n.driver_[out] = ci;
    }
    for (const auto& net : n.nets_)
        if (n.driver_[net.id] < 0 && !is_pi[net.id])
            throw Error("undriven net '" + net.name + "'");

    n.readers_.assign(n.nets_.size(), {});
    for (CellId ci = 0; ci < n.cells_.size(); ++ci)
        for (NetId in : n.cells_[ci].inputs) n.readers_[in].push_back(ci);

    // Global clock / reset: collected from DFF pins, must be primary inputs.
    for (CellId ci = 0; ci < n.cells_.size(); ++ci) {
        const Cell& c = n.cells_[ci];
        if (c.kind != CellKind::DFF) continue;
        n.dff_cells_.push_back(ci);
        NetId clk = c.inputs[1];
        if (n.clock_ && *n.clock_ != clk)
            throw Error("multiple clocks: '" + n.net_name(*n.clock_) + "' and '" +
                        n.net_name(clk) + "'");
        n.clock_ = clk;
        if (c.inputs.size() == 3) {
            NetId rst = c.inputs[2];
            if (n.reset_ && *n.reset_ != rst)
                throw Error("multiple resets: '" + n.net_name(*n.reset_) + "' and '" +
                            n.net_name(rst) + "'");
            n.reset_ = rst;
        }
    }
    if (n.clock_ && !is_pi[*n.clock_])
        throw Error("clock net '" + n.net_name(*n.clock_) + "' must be a primary input");
    if (n.reset_ && !is_pi[*n.reset_])
        throw Error("reset net '" + n.net_name(*n.reset_) + "' must be a primary input");
    if (n.clock_) {
        for (CellId ci : n.readers_[*n.clock_]) {
            const Cell& c = n.cells_[ci];
            for (std::size_t pin = 0; pin < c.inputs.size(); ++pin) {
                if (c.inputs[pin] != *n.clock_) continue;
                if (!(c.kind == CellKind::DFF && pin == 1))
                    throw Error("clock net '" + n.net_name(*n.clock_) +
                                "' used as data input of cell '" + c.name + "'");
            }
        }
    }

    // Kahn over the combinational subgraph, DFF outputs treated as sources.
    // Ready cells drain smallest-name-first for a deterministic order.
    std::vector<int> pending(n.cells_.size(), 0);
    auto comb_source = [&](NetId id) {
        auto d = n.driver_[id];
        return d < 0 || n.cells_[d].kind == CellKind::DFF;
    };
    for (CellId ci = 0; ci < n.cells_.size(); ++ci) {
        const Cell& c = n.cells_[ci];
        if (c.kind == CellKind::DFF) continue;
        for (NetId in : c.inputs)
            if (!comb_source(in)) ++pending[ci];
    }
    auto name_gt = [&](CellId a, CellId b) { return n.cells_[a].name > n.cells_[b].name; };
    std::priority_queue<CellId, std::vector<CellId>, decltype(name_gt)> ready(name_gt);
    for (CellId ci = 0; ci < n.cells_.size(); ++ci)
        if (n.cells_[ci].kind != CellKind::DFF && pending[ci] == 0) ready.push(ci);
    while (!ready.empty()) {
        CellId ci = ready.top();
        ready.pop();
        n.topo_.push_back(ci);
        for (CellId reader : n.readers_[n.cells_[ci].output]) {
            if (n.cells_[reader].kind == CellKind::DFF) continue;
            if (--pending[reader] == 0) ready.push(reader);
        }
    }
    std::size_t comb_total = 0;
    for (const auto& c : n.cells_)
        if (c.kind != CellKind::DFF) ++comb_total;
    if (n.topo_.size() != comb_total) {
        // Extract one cycle for the diagnostic: walk unsatisfied inputs until
        // a cell repeats.
        std::vector<bool> done(n.cells_.size(), false);
        for (CellId ci : n.topo_) done[ci] = true;
        CellId start = 0;
        for (CellId ci = 0; ci < n.cells_.size(); ++ci)
            if (n.cells_[ci].kind != CellKind::DFF && !done[ci]) { start = ci; break; }
        std::vector<NetId> path;
        std::unordered_set<CellId> seen;
        CellId cur = start;
        while (seen.insert(cur).second) {
            const Cell& c = n.cells_[cur];
            for (NetId in : c.inputs) {
                auto d = n.driver_[in];
                if (d >= 0 && n.cells_[d].kind != CellKind::DFF && !done[d]) {
                    path.push_back(in);
                    cur = static_cast<CellId>(d);
                    break;
                }
            }
        }
        std::string msg = "combinational loop through nets:";
        std::set<std::string> names;
        for (NetId id : path) names.insert(n.net_name(id));
        names.insert(n.net_name(n.cells_[cur].output));
        for (const auto& name : names) msg += " " + name;
        throw Error(msg);
    }

    // Coverage-denominator nodes: design-origin nets minus clock and reset.
    for (const auto& net : n.nets_) {
        if (net.origin != NetOrigin::Design) continue;
        if (n.clock_ && *n.clock_ == net.id) continue;
        if (n.reset_ && *n.reset_ == net.id) continue;
        n.nodes_.push_back(net.id);
    }
    std::sort(n.nodes_.begin(), n.nodes_.end(),
              [&](NetId a, NetId b) { return n.net_name(a) < n.net_name(b); });
    return n;
}

// --- parser -------------------------------------------------------------

namespace {

struct Token {
    enum Kind { Ident, Number, Punct, End } kind = End;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        skip_space();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_.kind = Token::End;
            tok_.text.clear();
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '\\') {
            std::string s;
            while (pos_ < src_.size()) {
                char d = src_[pos_];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '$' ||
                    d == '.' || d == '\\') {
                    s += d;
                    bump();
                } else {
                    break;
                }
            }
            tok_.kind = Token::Ident;
            tok_.text = std::move(s);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string s;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                s += src_[pos_];
                bump();
            }
            tok_.kind = Token::Number;
            tok_.text = std::move(s);
        } else {
            tok_.kind = Token::Punct;
            tok_.text = std::string(1, c);
            bump();
        }
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

enum class DeclKind { Input, Output, Wire };

// One net reference in a pin position: either a scalar name or bus[index].
struct PinRef {
    std::string name;
    std::optional<int> index;
    std::optional<int> literal; // dff reset-value position only
    int line = 1, col = 1;
};

class NetlistParser {
  public:
    explicit NetlistParser(std::string_view text) : lex_(text) {}

    Netlist parse() {
        if (lex_.peek().kind == Token::Ident && lex_.peek().text == "module") {
            strict_ = true;
            parse_module_header();
        }
        while (lex_.peek().kind != Token::End) {
            const Token& t = lex_.peek();
            if (t.kind != Token::Ident)
                fail("expected declaration or instantiation", t);
            if (t.text == "endmodule") {
                if (!strict_) fail("endmodule without module header", t);
                lex_.take();
                break;
            }
            if (t.text == "input") parse_decl(DeclKind::Input);
            else if (t.text == "output") parse_decl(DeclKind::Output);
            else if (t.text == "wire") parse_decl(DeclKind::Wire);
            else parse_instance();
        }
        if (lex_.peek().kind != Token::End)
            fail("unexpected text after endmodule", lex_.peek());
        return finish();
    }

  private:
    struct DeclMeta {
        DeclKind kind;
        std::optional<std::pair<int, int>> range; // msb, lsb
    };

    [[noreturn]] void fail(const std::string& msg, const Token& t) {
        throw ParseError(msg + (t.kind == Token::End ? "" : " near '" + t.text + "'"),
                         t.line, t.col);
    }

    Token expect_ident() {
        Token t = lex_.take();
        if (t.kind != Token::Ident) fail("expected identifier", t);
        return t;
    }

    void expect_punct(char c) {
        Token t = lex_.take();
        if (t.kind != Token::Punct || t.text[0] != c)
            fail(std::string("expected '") + c + "'", t);
    }

    bool accept_punct(char c) {
        if (lex_.peek().kind == Token::Punct && lex_.peek().text[0] == c) {
            lex_.take();
            return true;
        }
        return false;
    }

    int expect_number() {
        Token t = lex_.take();
        if (t.kind != Token::Number) fail("expected number", t);
        return std::stoi(t.text);
    }

    void parse_module_header() {
        lex_.take(); // module
        expect_ident();
        if (accept_punct('(')) {
            if (!accept_punct(')')) {
                do {
                    expect_ident(); // port order is informational
                } while (accept_punct(','));
                expect_punct(')');
            }
        }
        expect_punct(';');
    }

    void parse_decl(DeclKind kind) {
        lex_.take(); // keyword
        std::optional<std::pair<int, int>> range;
        if (accept_punct('[')) {
            int msb = expect_number();
            expect_punct(':');
            int lsb = expect_number();
            expect_punct(']');
            range = {msb, lsb};
        }
        do {
            Token name = expect_ident();
            if (decls_.count(name.text))
                fail("duplicate declaration of '" + name.text + "'", name);
            decls_.emplace(name.text, DeclMeta{kind, range});
        } while (accept_punct(','));
        expect_punct(';');
    }

    // Nets materialize on first reference; unused wire declarations are
    // dropped. Port declarations always materialize (see finish()).
    NetId materialize_scalar(const std::string& name, const DeclMeta& meta) {
        NetId id = builder_.add_net(name);
        if (meta.kind == DeclKind::Input) builder_.mark_input(id);
        if (meta.kind == DeclKind::Output) builder_.mark_output(id);
        return id;
    }

    void materialize_bus(const std::string& name, const DeclMeta& meta) {
        auto bits = builder_.add_bus(name, meta.range->first, meta.range->second);
        if (meta.kind == DeclKind::Input)
            for (NetId b : bits) builder_.mark_input(b);
        if (meta.kind == DeclKind::Output)
            for (NetId b : bits) builder_.mark_output(b);
    }

    PinRef parse_pin() {
        PinRef ref;
        const Token& t = lex_.peek();
        ref.line = t.line;
        ref.col = t.col;
        if (t.kind == Token::Number) {
            Token lit = lex_.take();
            int v = std::stoi(lit.text);
            if (v != 0 && v != 1) fail("literal pin must be 0 or 1", lit);
            ref.literal = v;
            return ref;
        }
        Token name = expect_ident();
        ref.name = name.text;
        if (accept_punct('[')) {
            ref.index = expect_number();
            expect_punct(']');
        }
        return ref;
    }

    void parse_instance() {
        Token kindTok = expect_ident();
        auto kind = cell_kind_from_name(kindTok.text);
        if (!kind) fail("unknown primitive '" + kindTok.text + "'", kindTok);
        std::string inst_name;
        if (lex_.peek().kind == Token::Ident) inst_name = lex_.take().text;
        expect_punct('(');
        std::vector<PinRef> pins;
        if (!accept_punct(')')) {
            do {
                pins.push_back(parse_pin());
            } while (accept_punct(','));
            expect_punct(')');
        }
        expect_punct(';');
        instances_.push_back(Instance{*kind, std::move(inst_name), std::move(pins),
                                      kindTok.line, kindTok.col});
    }

    struct Instance {
        CellKind kind;
        std::string name;
        std::vector<PinRef> pins;
        int line, col;
    };

    NetId resolve(const PinRef& ref, bool driven) {
        if (ref.literal)
            throw ParseError("literal pin only allowed as dff reset value", ref.line, ref.col);
        auto decl = decls_.find(ref.name);
        if (ref.index) {
            if (decl == decls_.end() || !decl->second.range)
                throw ParseError("indexed reference to undeclared bus '" + ref.name + "'",
                                 ref.line, ref.col);
            if (!builder_.find_net(ref.name + "[" + std::to_string(decl->second.range->first) +
                                   "]"))
                materialize_bus(ref.name, decl->second);
            auto id = builder_.find_net(ref.name + "[" + std::to_string(*ref.index) + "]");
            if (!id)
                throw ParseError("bit index out of range: " + ref.name + "[" +
                                     std::to_string(*ref.index) + "]",
                                 ref.line, ref.col);
            note_use(*id, driven);
            return *id;
        }
        if (decl != decls_.end() && decl->second.range)
            throw ParseError("bus '" + ref.name + "' used as a scalar pin", ref.line, ref.col);
        auto known = builder_.find_net(ref.name);
        if (!known) {
            if (decl != decls_.end()) {
              known = materialize_scalar(ref.name, decl->second);
            } else if (strict_) {
                throw ParseError("undeclared net '" + ref.name + "'", ref.line, ref.col);
            } else {
                known = builder_.add_net(ref.name);
                inferred_.push_back(*known);
            }
        }
        note_use(*known, driven);
        return *known;
    }

    void note_use(NetId id, bool driven) {
        if (driven) driven_.insert(id);
        else read_.insert(id);
    }

    void elaborate_instance(const Instance& inst) {
        auto bad_count = [&]() -> ParseError {
            return ParseError(std::string(cell_kind_name(inst.kind)) + " '" +
                                  (inst.name.empty() ? "<anon>" : inst.name) +
                                  "' has wrong pin count",
                              inst.line, inst.col);
        };
        if (inst.kind == CellKind::DFF) {
            // dff (q, d, clk [, rstn][, rv]) — a literal in position 4 is rv.
            if (inst.pins.size() < 3 || inst.pins.size() > 5) throw bad_count();
            NetId q = resolve(inst.pins[0], true);
            NetId d = resolve(inst.pins[1], false);
            NetId clk = resolve(inst.pins[2], false);
            std::optional<NetId> rstn;
            bool rv = false;
            if (inst.pins.size() == 4) {
                if (inst.pins[3].literal) rv = *inst.pins[3].literal != 0;
                else rstn = resolve(inst.pins[3], false);
            } else if (inst.pins.size() == 5) {
                rstn = resolve(inst.pins[3], false);
                if (!inst.pins[4].literal)
                    throw ParseError("dff reset value must be a 0/1 literal",
                                     inst.pins[4].line, inst.pins[4].col);
                rv = *inst.pins[4].literal != 0;
            }
            std::vector<NetId> ins{d, clk};
            if (rstn) ins.push_back(*rstn);
            builder_.add_cell(CellKind::DFF, inst.name, std::move(ins), q, rv);
            return;
        }
        int arity = cell_arity(inst.kind);
        if (static_cast<int>(inst.pins.size()) != arity + 1) throw bad_count();
        NetId out = resolve(inst.pins[0], true);
        std::vector<NetId> ins;
        for (int i = 0; i < arity; ++i) ins.push_back(resolve(inst.pins[i + 1], false));
        builder_.add_cell(inst.kind, inst.name, std::move(ins), out);
    }

    Netlist finish() {
        for (const auto& inst : instances_) elaborate_instance(inst);
        // Ports are part of the interface even when unreferenced.
        for (const auto& [name, meta] : decls_) {
            if (meta.kind == DeclKind::Wire) continue;
            if (meta.range) {
                if (!builder_.find_net(name + "[" + std::to_string(meta.range->first) + "]"))
                    materialize_bus(name, meta);
            } else if (!builder_.find_net(name)) {
                materialize_scalar(name, meta);
            }
        }
        // Inference (headerless sources only): undriven nets become primary
        // inputs, driven-but-unread nets become primary outputs.
        for (NetId id : inferred_) {
            if (!driven_.count(id)) builder_.mark_input(id);
            else if (!read_.count(id)) builder_.mark_output(id);
        }
        return builder_.build();
    }

    Lexer lex_;
    NetlistBuilder builder_;
    bool strict_ = false;
    std::map<std::string, DeclMeta> decls_;
    std::vector<Instance> instances_;
    std::vector<NetId> inferred_;
    std::set<NetId> driven_, read_;
};

} // namespace

Netlist parse_netlist(std::string_view text) { return NetlistParser(text).parse(); }

// --- printer ------------------------------------------------------------

namespace {

// Pin syntax for a net: bus bits print as base[i], scalars as-is.
std::string pin_text(const Netlist& n, NetId id) { return n.net_name(id); }

bool in_any_bus(const Netlist& n, NetId id) {
    for (const auto& b : n.buses())
        for (NetId bit : b.bits)
            if (bit == id) return true;
    return false;
}

} // namespace

std::string print_netlist(const Netlist& n, const std::string& module_name) {
    std::ostringstream os;
    os << "module " << module_name << " (";
    bool first = true;
    auto emit_port = [&](const std::string& name) {
        if (!first) os << ", ";
        os << name;
        first = false;
    };
    std::set<std::string> port_buses;
    for (NetId id : n.primary_inputs()) {
        if (!in_any_bus(n, id)) emit_port(n.net_name(id));
    }
    for (const auto& b : n.buses())
        if (n.is_primary_input(b.bits.front()) && port_buses.insert(b.base).second)
            emit_port(b.base);
    for (NetId id : n.primary_outputs()) {
        if (!in_any_bus(n, id)) emit_port(n.net_name(id));
    }
    for (const auto& b : n.buses()) {
        bool is_out = false;
        for (NetId o : n.primary_outputs())
            if (o == b.bits.front()) is_out = true;
        if (is_out && port_buses.insert(b.base).second) emit_port(b.base);
    }
    os << ");\n";

    auto decl_kind = [&](NetId id) -> const char* {
        if (n.is_primary_input(id)) return "input";
        for (NetId o : n.primary_outputs())
            if (o == id) return "output";
        return "wire";
    };
    for (const auto& b : n.buses())
        os << "  " << decl_kind(b.bits.front()) << " [" << b.msb << ":" << b.lsb << "] "
           << b.base << ";\n";
    for (const auto& net : n.nets()) {
        if (in_any_bus(n, net.id)) continue;
        os << "  " << decl_kind(net.id) << " " << net.name << ";\n";
    }
    for (const auto& c : n.cells()) {
        os << "  " << cell_kind_name(c.kind) << " " << c.name << " (" << pin_text(n, c.output);
        for (std::size_t i = 0; i < c.inputs.size(); ++i)
            os << ", " << pin_text(n, c.inputs[i]);
        if (c.kind == CellKind::DFF) os << ", " << (c.reset_value ? 1 : 0);
        os << ");\n";
    }
    os << "endmodule\n";
    return os.str();
}

std::string netlist_to_json(const Netlist& n) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["nets"] = nlohmann::ordered_json::array();
    for (const auto& net : n.nets()) {
        nlohmann::ordered_json e;
        e["id"] = net.id;
        e["name"] = net.name;
        e["origin"] = net.origin == NetOrigin::Design ? "design" : "monitor";
        j["nets"].push_back(e);
    }
    j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : n.cells()) {
        nlohmann::ordered_json e;
        e["kind"] = cell_kind_name(c.kind);
        e["name"] = c.name;
        e["output"] = n.net_name(c.output);
        auto ins = nlohmann::ordered_json::array();
        for (NetId in : c.inputs) ins.push_back(n.net_name(in));
        e["inputs"] = ins;
        if (c.kind == CellKind::DFF) e["reset_value"] = c.reset_value ? 1 : 0;
        j["cells"].push_back(e);
    }
    auto names = [&](const std::vector<NetId>& ids) {
        auto a = nlohmann::ordered_json::array();
        for (NetId id : ids) a.push_back(n.net_name(id));
        return a;
    };
    j["primary_inputs"] = names(n.primary_inputs());
    j["primary_outputs"] = names(n.primary_outputs());
    j["clock"] = n.clock() ? nlohmann::ordered_json(n.net_name(*n.clock()))
                           : nlohmann::ordered_json(nullptr);
    j["reset"] = n.reset() ? nlohmann::ordered_json(n.net_name(*n.reset()))
                           : nlohmann::ordered_json(nullptr);
    j["buses"] = nlohmann::ordered_json::array();
    for (const auto& b : n.buses()) {
        nlohmann::ordered_json e;
        e["base"] = b.base;
        e["msb"] = b.msb;
        e["lsb"] = b.lsb;
        j["buses"].push_back(e);
    }
    j["node_count"] = n.nodes().size();
    return j.dump(2) + "\n";
}

bool structurally_equal(const Netlist& a, const Netlist& b) {
    auto sorted_names = [](const Netlist& n, const std::vector<NetId>& ids) {
        std::vector<std::string> v;
        for (NetId id : ids) v.push_back(n.net_name(id));
        std::sort(v.begin(), v.end());
        return v;
    };
    if (sorted_names(a, a.primary_inputs()) != sorted_names(b, b.primary_inputs())) return false;
    if (sorted_names(a, a.primary_outputs()) != sorted_names(b, b.primary_outputs())) return false;

    std::vector<std::pair<std::string, NetOrigin>> an, bn;
    for (const auto& net : a.nets()) an.emplace_back(net.name, net.origin);
    for (const auto& net : b.nets()) bn.emplace_back(net.name, net.origin);
    std::sort(an.begin(), an.end());
    std::sort(bn.begin(), bn.end());
    if (an != bn) return false;

    using CellSig = std::tuple<std::string, std::string, std::vector<std::string>, bool>;
    auto cell_sigs = [](const Netlist& n) {
        std::vector<CellSig> v;
        for (const auto& c : n.cells()) {
            std::vector<std::string> ins;
            for (NetId in : c.inputs) ins.push_back(n.net_name(in));
            v.emplace_back(cell_kind_name(c.kind), n.net_name(c.output), ins,
                           c.kind == CellKind::DFF ? c.reset_value : false);
        }
        std::sort(v.begin(), v.end());
        return v;
    };
    return cell_sigs(a) == cell_sigs(b);
}

// --- simulation ---------------------------------------------------------

Stimulus Stimulus::from_cycles(const std::vector<std::map<std::string, bool>>& cycles) {
    Stimulus s;
    if (cycles.empty()) return s;
    for (const auto& [name, _] : cycles.front()) s.signals.push_back(name);
    for (const auto& cyc : cycles) {
        std::vector<std::uint8_t> row;
        for (const auto& name : s.signals) {
            auto it = cyc.find(name);
            if (it == cyc.end()) throw Error("missing input assignment for '" + name + "'");
            row.push_back(it->second ? 1 : 0);
        }
        s.values.push_back(std::move(row));
    }
    return s;
}

Trace simulate(const Netlist& n, const Stimulus& stimulus, std::optional<Flip> flip) {
    if (stimulus.values.empty()) throw Error("stimulus must cover at least one cycle");

    // Resolve stimulus columns against the primary inputs (clock excluded).
    std::vector<std::pair<NetId, std::size_t>> pi_cols;
    std::unordered_map<std::string, std::size_t> col_of;
    for (std::size_t i = 0; i < stimulus.signals.size(); ++i)
        col_of[stimulus.signals[i]] = i;
    for (NetId pi : n.primary_inputs()) {
        if (n.clock() && *n.clock() == pi) continue;
        auto it = col_of.find(n.net_name(pi));
        if (it == col_of.end())
            throw Error("missing input assignment for '" + n.net_name(pi) + "'");
        pi_cols.emplace_back(pi, it->second);
    }
    for (const auto& [name, _] : col_of) {
        auto id = n.find_net(name);
        if (!id || !n.is_primary_input(*id))
            throw Error("stimulus signal '" + name + "' is not a primary input");
        if (n.clock() && *n.clock() == *id)
            throw Error("the clock is implicit; do not drive '" + name + "'");
    }

    const auto& dffs = n.dff_cells();
    std::vector<std::uint8_t> state(dffs.size());
    for (std::size_t i = 0; i < dffs.size(); ++i)
        state[i] = n.cell(dffs[i]).reset_value ? 1 : 0;

    Trace trace;
    trace.values.reserve(stimulus.values.size());
    std::vector<std::uint8_t> vals(n.nets().size(), 0);
    for (std::size_t t = 0; t < stimulus.values.size(); ++t) {
        const auto& row = stimulus.values[t];
        for (auto [pi, col] : pi_cols) {
            if (col >= row.size()) throw Error("stimulus row too short");
            vals[pi] = row[col];
        }
        bool flip_now = flip && flip->cycle == static_cast<int>(t);
        if (flip_now && n.is_primary_input(flip->net)) vals[flip->net] ^= 1;

        // DFF outputs: reset value while reset is active, stored state else.
        for (std::size_t i = 0; i < dffs.size(); ++i) {
            const Cell& c = n.cell(dffs[i]);
            bool in_reset = c.inputs.size() == 3 && vals[c.inputs[2]] == 0;
            vals[c.output] = in_reset ? (c.reset_value ? 1 : 0) : state[i];
            if (flip_now && flip->net == c.output) vals[c.output] ^= 1;
        }
        for (CellId ci : n.topo_order()) {
            const Cell& c = n.cell(ci);
            const auto& in = c.inputs;
            std::uint8_t v = 0;
            switch (c.kind) {
                case CellKind::AND: v = vals[in[0]] & vals[in[1]]; break;
                case CellKind::OR: v = vals[in[0]] | vals[in[1]]; break;
                case CellKind::NAND: v = 1 ^ (vals[in[0]] & vals[in[1]]); break;
                case CellKind::NOR: v = 1 ^ (vals[in[0]] | vals[in[1]]); break;
                case CellKind::XOR: v = vals[in[0]] ^ vals[in[1]]; break;
                case CellKind::XNOR: v = 1 ^ (vals[in[0]] ^ vals[in[1]]); break;
                case CellKind::NOT: v = 1 ^ vals[in[0]]; break;
                case CellKind::BUF: v = vals[in[0]]; break;
                case CellKind::MUX2: v = vals[in[0]] ? vals[in[2]] : vals[in[1]]; break;
                case CellKind::CONST0: v = 0; break;
                case CellKind::CONST1: v = 1; break;
                case CellKind::DFF: break; // not in topo order
            }
            vals[c.output] = v;
            if (flip_now && flip->net == c.output) vals[c.output] ^= 1;
        }
        // State update from the post-flip net values of this cycle.
        for (std::size_t i = 0; i < dffs.size(); ++i) {
            const Cell& c = n.cell(dffs[i]);
            bool in_reset = c.inputs.size() == 3 && vals[c.inputs[2]] == 0;
            state[i] = in_reset ? (c.reset_value ? 1 : 0) : vals[c.inputs[0]];
        }
        trace.values.push_back(vals);
    }
    return trace;
}

} // namespace secov
