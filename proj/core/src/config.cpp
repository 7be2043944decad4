#include "hibarrier/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace hibarrier::config {

using nlohmann::json;

ConfigError::ConfigError(std::string message, std::string origin, std::string pointer, int line, int column)
    : std::runtime_error(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                         (pointer.empty() ? std::string() : pointer + ": ") + message),
      message_(std::move(message)),
      origin_(std::move(origin)),
      pointer_(std::move(pointer)),
      line_(line),
      column_(column) {}

namespace {

// Byte offset of every value in a well-formed JSON text, keyed by JSON pointer.
class SourceMap {
public:
    explicit SourceMap(std::string_view text) : text_(text) {
        skip_ws();
        value("");
    }

    std::optional<std::size_t> find(const std::string& pointer) const {
        auto it = offsets_.find(pointer);
        if (it == offsets_.end()) return std::nullopt;
        return it->second;
    }

    std::pair<int, int> line_column(std::size_t offset) const {
        int line = 1;
        int column = 1;
        for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        return {line, column};
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::string_view(" \t\r\n").find(text_[pos_]) != std::string_view::npos) ++pos_;
    }

    std::string string_token() {
        std::string out;
        ++pos_;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\') out += text_[pos_++];
            out += text_[pos_++];
        }
        ++pos_;
        return out;
    }

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out += c;
        }
        return out;
    }

    void value(const std::string& pointer) {
        skip_ws();
        if (pos_ >= text_.size()) return;
        offsets_[pointer] = pos_;
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            skip_ws();
            while (pos_ < text_.size() && text_[pos_] != '}') {
                const std::string key = string_token();
                skip_ws();
                ++pos_;  // ':'
                value(pointer + "/" + escape(key));
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
                skip_ws();
            }
            ++pos_;
        } else if (c == '[') {
            ++pos_;
            skip_ws();
            for (int i = 0; pos_ < text_.size() && text_[pos_] != ']'; ++i) {
                value(pointer + "/" + std::to_string(i));
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
                skip_ws();
            }
            ++pos_;
        } else if (c == '"') {
            string_token();
        } else {
            while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(text_[pos_]) == std::string_view::npos) ++pos_;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::map<std::string, std::size_t> offsets_;
};

class Reader {
public:
    Reader(std::string origin, std::string_view text) : origin_(std::move(origin)) {
        if (!text.empty()) map_.emplace(text);
    }

    [[noreturn]] void fail(const std::string& pointer, const std::string& message, std::size_t extra = 0) const {
        int line = 0;
        int column = 0;
        if (map_) {
            if (auto at = map_->find(pointer)) std::tie(line, column) = map_->line_column(*at + extra);
        }
        throw ConfigError(message, origin_, pointer, line, column);
    }

    const json& field(const json& obj, const std::string& pointer, const char* key) const {
        if (!obj.contains(key)) fail(pointer, std::string("missing field '") + key + "'");
        return obj.at(key);
    }

    std::string text(const json& v, const std::string& pointer) const {
        if (!v.is_string()) fail(pointer, "expected a string");
        return v.get<std::string>();
    }

    double number(const json& v, const std::string& pointer) const {
        if (!v.is_number()) fail(pointer, "expected a number");
        return v.get<double>();
    }

    int integer(const json& v, const std::string& pointer) const {
        if (!v.is_number_integer()) fail(pointer, "expected an integer");
        return v.get<int>();
    }

    const json& array(const json& v, const std::string& pointer) const {
        if (!v.is_array()) fail(pointer, "expected an array");
        return v;
    }

    expr::Ast expression(const json& v, const std::string& pointer, int n, int k, const expr::Constants& constants) const {
        const std::string src = text(v, pointer);
        auto parsed = expr::parse(src, n, k, constants);
        if (auto* d = std::get_if<expr::Diagnostic>(&parsed)) {
            std::string msg = d->message;
            if (!d->expected.empty()) {
                msg += " (expected";
                for (const auto& e : d->expected) msg += " " + e;
                msg += ")";
            }
            fail(pointer, "in expression \"" + src + "\": " + msg, d->offset + 1);
        }
        return std::get<expr::Ast>(parsed);
    }

private:
    std::string origin_;
    std::optional<SourceMap> map_;
};

void read_set_tree(const Reader& r, const json& v, const std::string& pointer) {
    if (v.is_string()) return;
    if (!v.is_object()) r.fail(pointer, "a set is a leaf string or an object with 'leaf', 'all' or 'any'");
    const int kinds = static_cast<int>(v.contains("leaf")) + static_cast<int>(v.contains("all")) + static_cast<int>(v.contains("any"));
    if (kinds != 1) r.fail(pointer, "a set object needs exactly one of 'leaf', 'all', 'any'");
    if (v.contains("leaf")) {
        r.text(v.at("leaf"), pointer + "/leaf");
        if (v.contains("strict") && !v.at("strict").is_boolean()) r.fail(pointer + "/strict", "expected true or false");
        return;
    }
    const char* key = v.contains("all") ? "all" : "any";
    const json& children = r.array(v.at(key), pointer + "/" + key);
    for (std::size_t i = 0; i < children.size(); ++i) read_set_tree(r, children[i], pointer + "/" + key + "/" + std::to_string(i));
}

SetDescription build_set(const Reader& r, const json& v, const std::string& pointer, int n, const expr::Constants& c) {
    if (v.is_string()) return SetDescription::leaf(ScalarField::from_expr(r.expression(v, pointer, n, 0, c), n));
    if (v.contains("leaf")) {
        const bool strict = v.value("strict", false);
        return SetDescription::leaf(ScalarField::from_expr(r.expression(v.at("leaf"), pointer + "/leaf", n, 0, c), n), strict);
    }
    const bool all = v.contains("all");
    const std::string key = all ? "all" : "any";
    const json& children = v.at(key);
    if (children.empty()) return all ? SetDescription::whole(n) : SetDescription::empty(n);
    std::vector<SetDescription> parts;
    for (std::size_t i = 0; i < children.size(); ++i) parts.push_back(build_set(r, children[i], pointer + "/" + key + "/" + std::to_string(i), n, c));
    if (parts.size() == 1) return parts.front();
    return all ? SetDescription::intersection(std::move(parts)) : SetDescription::unite(std::move(parts));
}

std::vector<std::string> read_components(const Reader& r, const json& doc, const char* key, int n) {
    const std::string pointer = std::string("/") + key;
    const json& arr = r.array(r.field(doc, "", key), pointer);
    if (static_cast<int>(arr.size()) != n) {
        r.fail(pointer, std::string(key) + " has " + std::to_string(arr.size()) + " components, expected " + std::to_string(n));
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(r.text(arr[i], pointer + "/" + std::to_string(i)));
    return out;
}

Smoothness read_smoothness(const Reader& r, const json& v, const std::string& pointer) {
    const std::string s = r.text(v, pointer);
    if (s == "c1") return Smoothness::C1;
    if (s == "lipschitz") return Smoothness::LocallyLipschitz;
    r.fail(pointer, "smoothness must be \"c1\" or \"lipschitz\"");
}

Expected read_expected(const Reader& r, const json& v) {
    if (!v.is_object()) r.fail("/expected", "expected an object");
    Expected e;
    static const std::vector<std::string> statuses{"NoViolationFound", "Violated", "Inconclusive"};
    if (v.contains("checks")) {
        const json& arr = r.array(v.at("checks"), "/expected/checks");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = "/expected/checks/" + std::to_string(i);
            ExpectedCheck c;
            c.theorem = r.text(r.field(arr[i], p, "theorem"), p + "/theorem");
            c.status = r.text(r.field(arr[i], p, "status"), p + "/status");
            if (std::find(statuses.begin(), statuses.end(), c.status) == statuses.end()) r.fail(p + "/status", "unknown status");
            if (arr[i].contains("option")) c.option = r.text(arr[i].at("option"), p + "/option");
            if (arr[i].contains("rho")) c.rho = r.text(arr[i].at("rho"), p + "/rho");
            e.checks.push_back(std::move(c));
        }
    }
    if (v.contains("falsify")) {
        const json& arr = r.array(v.at("falsify"), "/expected/falsify");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = "/expected/falsify/" + std::to_string(i);
            const json& f = arr[i];
            ExpectedFalsify x;
            x.mode = r.text(r.field(f, p, "mode"), p + "/mode");
            if (x.mode != "invariance" && x.mode != "contractivity") r.fail(p + "/mode", "mode must be invariance or contractivity");
            const std::string result = r.text(r.field(f, p, "result"), p + "/result");
            if (result != "counterexample" && result != "none") r.fail(p + "/result", "result must be counterexample or none");
            x.counterexample = result == "counterexample";
            if (f.contains("budget")) x.budget = r.integer(f.at("budget"), p + "/budget");
            if (f.contains("T")) x.T = r.number(f.at("T"), p + "/T");
            if (f.contains("J")) x.J = r.integer(f.at("J"), p + "/J");
            if (f.contains("step")) x.step = r.number(f.at("step"), p + "/step");
            e.falsify.push_back(x);
        }
    }
    if (v.contains("settings")) {
        if (!v.at("settings").is_object()) r.fail("/expected/settings", "expected an object");
        e.settings = v.at("settings");
    }
    if (v.contains("notes")) {
        const json& arr = r.array(v.at("notes"), "/expected/notes");
        for (std::size_t i = 0; i < arr.size(); ++i) e.notes.push_back(r.text(arr[i], "/expected/notes/" + std::to_string(i)));
    }
    return e;
}

}  // namespace

SystemConfig parse_config(std::string_view text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 1;
        int column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string what = e.what();
        if (auto at = what.find("syntax error"); at != std::string::npos) what = what.substr(at);
        throw ConfigError(what, origin, "", line, column);
    }

    const Reader r(origin, text);
    if (!doc.is_object()) r.fail("", "the system file must be a JSON object");

    SystemConfig cfg;
    cfg.source = doc;
    cfg.origin = origin;
    cfg.source_text = std::string(text);
    cfg.name = doc.contains("name") ? r.text(doc.at("name"), "/name") : origin;
    cfg.dim = r.integer(r.field(doc, "", "dim"), "/dim");
    if (cfg.dim < 1) r.fail("/dim", "dim must be positive");
    if (doc.contains("params")) {
        cfg.params = r.integer(doc.at("params"), "/params");
        if (cfg.params < 0) r.fail("/params", "params must be non-negative");
    }
    if (doc.contains("constants")) {
        const json& c = doc.at("constants");
        if (!c.is_object()) r.fail("/constants", "expected an object of name: number");
        for (const auto& [name, value] : c.items()) cfg.constants[name] = r.number(value, "/constants/" + name);
    }
    read_set_tree(r, r.field(doc, "", "C"), "/C");
    read_set_tree(r, r.field(doc, "", "D"), "/D");
    cfg.C = doc.at("C");
    cfg.D = doc.at("D");
    cfg.F = read_components(r, doc, "F", cfg.dim);
    cfg.G = read_components(r, doc, "G", cfg.dim);

    const json& barrier = r.array(r.field(doc, "", "barrier"), "/barrier");
    if (barrier.empty()) r.fail("/barrier", "the barrier needs at least one component");
    for (std::size_t i = 0; i < barrier.size(); ++i) {
        const std::string p = "/barrier/" + std::to_string(i);
        const json& b = barrier[i];
        if (b.is_string()) {
            cfg.barrier.push_back({b.get<std::string>(), std::nullopt});
        } else if (b.is_object()) {
            BarrierSpec spec;
            spec.expr = r.text(r.field(b, p, "expr"), p + "/expr");
            if (b.contains("smoothness")) spec.smoothness = read_smoothness(r, b.at("smoothness"), p + "/smoothness");
            cfg.barrier.push_back(spec);
        } else {
            r.fail(p, "a barrier component is a string or {\"expr\", \"smoothness\"}");
        }
    }

    const json& box = r.field(doc, "", "box");
    if (!box.is_object()) r.fail("/box", "expected {\"lo\": [...], \"hi\": [...]}");
    cfg.box.lo = Vec(cfg.dim);
    cfg.box.hi = Vec(cfg.dim);
    for (const char* key : {"lo", "hi"}) {
        const std::string p = std::string("/box/") + key;
        const json& arr = r.array(r.field(box, "/box", key), p);
        if (static_cast<int>(arr.size()) != cfg.dim) r.fail(p, "box bounds need " + std::to_string(cfg.dim) + " entries");
        Vec& dst = std::string(key) == "lo" ? cfg.box.lo : cfg.box.hi;
        for (int i = 0; i < cfg.dim; ++i) dst[i] = r.number(arr[static_cast<std::size_t>(i)], p + "/" + std::to_string(i));
    }
    if (!(cfg.box.lo.array() < cfg.box.hi.array()).all()) r.fail("/box", "box needs lo < hi in every coordinate");

    if (doc.contains("expected")) cfg.expected = read_expected(r, doc.at("expected"));

    build_model(cfg);  // reports expression errors at their positions
    return cfg;
}

SystemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file", path.string(), "", 0, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

Model build_model(const SystemConfig& cfg) {
    const Reader r(cfg.origin, cfg.source_text);
    const int n = cfg.dim;
    const auto& c = cfg.constants;

    auto map = [&](const std::vector<std::string>& comps, const char* key) {
        std::vector<expr::Ast> asts;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            asts.push_back(r.expression(json(comps[i]), std::string("/") + key + "/" + std::to_string(i), n, cfg.params, c));
        }
        return SetValuedMap::from_exprs(asts, n, cfg.params);
    };
    Model m{HybridSystem{cfg.name, n, build_set(r, cfg.C, "/C", n, c), map(cfg.F, "F"), build_set(r, cfg.D, "/D", n, c),
                        map(cfg.G, "G"), c},
            BarrierCandidate{}, cfg.box};
    for (std::size_t i = 0; i < cfg.barrier.size(); ++i) {
        const auto& spec = cfg.barrier[i];
        const std::string p = "/barrier/" + std::to_string(i);
        const bool object = cfg.source.is_object() && cfg.source.contains("barrier") && cfg.source["barrier"].size() > i &&
                            cfg.source["barrier"][i].is_object();
        const auto ast = r.expression(json(spec.expr), object ? p + "/expr" : p, n, 0, c);
        m.barrier.components.push_back(ScalarField::from_expr(ast, n, spec.smoothness));
    }
    m.system.validate();
    return m;
}

std::string dump(const SystemConfig& cfg) { return cfg.source.dump(2) + "\n"; }

}  // namespace hibarrier::config
