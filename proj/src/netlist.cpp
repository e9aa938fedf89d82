#include "mivkit/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mivkit/model_io.hpp"
#include "mivkit/text_util.hpp"

namespace mivkit {

double VSource::value(double t) const {
    if (pwl.empty()) return 0.0;
    if (pwl.size() == 1 || t <= pwl.front().first) return pwl.front().second;
    if (t >= pwl.back().first) return pwl.back().second;
    for (size_t i = 1; i < pwl.size(); ++i) {
        if (t <= pwl[i].first) {
            const auto& [t0, v0] = pwl[i - 1];
            const auto& [t1, v1] = pwl[i];
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        }
    }
    return pwl.back().second;
}

int Netlist::add_node(const std::string& name) {
    for (size_t i = 0; i < node_names.size(); ++i)
        if (node_names[i] == name) return static_cast<int>(i);
    node_names.push_back(name);
    return static_cast<int>(node_names.size()) - 1;
}

int Netlist::node(const std::string& name) const {
    for (size_t i = 0; i < node_names.size(); ++i)
        if (node_names[i] == name) return static_cast<int>(i);
    return -1;
}

Resistor& Netlist::add_resistor(const std::string& name, int n1, int n2, double ohms) {
    resistors.push_back({name, n1, n2, ohms});
    return resistors.back();
}

Capacitor& Netlist::add_capacitor(const std::string& name, int n1, int n2, double farads) {
    capacitors.push_back({name, n1, n2, farads});
    return capacitors.back();
}

TransistorInst& Netlist::add_transistor(const std::string& name, int d, int g, int s,
                                        const ModelParams& params, const ModelConstants& consts) {
    transistors.push_back({name, d, g, s, params, consts});
    return transistors.back();
}

VSource& Netlist::add_dc_source(const std::string& name, int np, int nn, double volts) {
    sources.push_back({name, np, nn, {{0.0, volts}}});
    return sources.back();
}

VSource& Netlist::add_pwl_source(const std::string& name, int np, int nn,
                                 std::vector<std::pair<double, double>> pwl) {
    sources.push_back({name, np, nn, std::move(pwl)});
    return sources.back();
}

void Netlist::validate() const {
    if (sources.empty()) throw std::runtime_error("netlist needs at least one voltage source");
    std::set<std::string> names;
    auto check_name = [&](const std::string& n) {
        if (!names.insert(n).second) throw std::runtime_error("duplicate element name '" + n + "'");
    };
    auto check_node = [&](int n, const std::string& el) {
        if (n < 0 || n >= node_count())
            throw std::runtime_error("element '" + el + "' references an unknown node");
    };

    std::vector<std::vector<int>> adjacency(node_count());
    auto connect = [&](int a, int b) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    };
    for (const auto& r : resistors) {
        check_name(r.name);
        check_node(r.n1, r.name);
        check_node(r.n2, r.name);
        if (!(r.ohms > 0.0)) throw std::runtime_error("resistor '" + r.name + "' must be > 0");
        connect(r.n1, r.n2);
    }
    for (const auto& c : capacitors) {
        check_name(c.name);
        check_node(c.n1, c.name);
        check_node(c.n2, c.name);
        if (!(c.farads > 0.0)) throw std::runtime_error("capacitor '" + c.name + "' must be > 0");
        connect(c.n1, c.n2);
    }
    for (const auto& m : transistors) {
        check_name(m.name);
        check_node(m.drain, m.name);
        check_node(m.gate, m.name);
        check_node(m.source, m.name);
        mivkit::validate(m.params);
        mivkit::validate(m.consts);
        connect(m.drain, m.source);
        connect(m.gate, m.source);
    }
    for (const auto& v : sources) {
        check_name(v.name);
        check_node(v.np, v.name);
        check_node(v.nn, v.name);
        if (v.pwl.empty()) throw std::runtime_error("source '" + v.name + "' has no value");
        connect(v.np, v.nn);
    }

    // reachability from ground
    std::vector<char> seen(node_count(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        for (int m : adjacency[n])
            if (!seen[m]) {
                seen[m] = 1;
                stack.push_back(m);
            }
    }
    for (int n = 0; n < node_count(); ++n)
        if (!seen[n])
            throw std::runtime_error("node '" + node_names[n] + "' is not reachable from ground");
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

}  // namespace

Netlist parse_netlist_text(const std::string& text, const std::string& diag_name,
                           const std::string& model_dir) {
    Netlist nl;
    std::map<std::string, ModelCard> card_cache;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(diag_name + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string body = trim(line);
        if (body.empty() || body[0] == '*') continue;

        if (body[0] == '.') {
            auto toks = tokenize(body);
            std::string card = toks[0];
            std::transform(card.begin(), card.end(), card.begin(), ::tolower);
            if (card == ".tran") {
                if (toks.size() != 3) fail(".tran needs dt and tstop");
                nl.tran_dt = parse_number(toks[1], fail);
                nl.tran_stop = parse_number(toks[2], fail);
                if (!(nl.tran_dt > 0.0) || !(nl.tran_stop > nl.tran_dt)) fail("bad .tran times");
            } else if (card == ".end") {
                break;
            } else {
                fail("unknown card '" + toks[0] + "'");
            }
            continue;
        }

        auto toks = tokenize(body);
        const char kind = static_cast<char>(std::toupper(static_cast<unsigned char>(body[0])));
        switch (kind) {
            case 'R': {
                if (toks.size() != 4) fail("resistor: expected 'Rname n1 n2 value'");
                nl.add_resistor(toks[0], nl.add_node(toks[1]), nl.add_node(toks[2]),
                                parse_number(toks[3], fail));
                break;
            }
            case 'C': {
                if (toks.size() != 4) fail("capacitor: expected 'Cname n1 n2 value'");
                nl.add_capacitor(toks[0], nl.add_node(toks[1]), nl.add_node(toks[2]),
                                 parse_number(toks[3], fail));
                break;
            }
            case 'M': {
                if (toks.size() != 6) fail("transistor: expected 'Mname d g s model=<file> polarity=<n|p>'");
                std::string model_file, polarity;
                for (size_t i = 4; i < 6; ++i) {
                    if (toks[i].rfind("model=", 0) == 0) model_file = toks[i].substr(6);
                    else if (toks[i].rfind("polarity=", 0) == 0) polarity = toks[i].substr(9);
                    else fail("unknown transistor attribute '" + toks[i] + "'");
                }
                if (model_file.empty() || polarity.empty()) fail("transistor needs model= and polarity=");
                std::string path = model_file;
                if (!model_dir.empty() && path.front() != '/') path = model_dir + "/" + path;
                auto it = card_cache.find(path);
                if (it == card_cache.end()) it = card_cache.emplace(path, read_model_card(path)).first;
                ModelCard card = it->second;
                const Polarity pol = polarity_from_string(polarity);
                card.params.polarity = pol;
                nl.add_transistor(toks[0], nl.add_node(toks[1]), nl.add_node(toks[2]),
                                  nl.add_node(toks[3]), card.params, card.consts);
                break;
            }
            case 'V': {
                if (toks.size() < 4) fail("source: expected 'Vname n+ n- DC v' or PWL(...)");
                const int np = nl.add_node(toks[1]);
                const int nn = nl.add_node(toks[2]);
                std::string rest;
                for (size_t i = 3; i < toks.size(); ++i) {
                    if (i > 3) rest += " ";
                    rest += toks[i];
                }
                std::string upper_rest = rest;
                std::transform(upper_rest.begin(), upper_rest.end(), upper_rest.begin(), ::toupper);
                if (upper_rest.rfind("DC", 0) == 0) {
                    auto vt = tokenize(rest.substr(2));
                    if (vt.size() != 1) fail("DC source needs exactly one value");
                    nl.add_dc_source(toks[0], np, nn, parse_number(vt[0], fail));
                } else if (upper_rest.rfind("PWL(", 0) == 0) {
                    if (rest.back() != ')') fail("PWL: missing ')'");
                    std::string inner = rest.substr(4, rest.size() - 5);
                    for (auto& ch : inner)
                        if (ch == ',') ch = ' ';
                    auto nums = tokenize(inner);
                    if (nums.size() < 2 || nums.size() % 2 != 0) fail("PWL needs t/v pairs");
                    std::vector<std::pair<double, double>> pwl;
                    for (size_t i = 0; i < nums.size(); i += 2) {
                        const double t = parse_number(nums[i], fail);
                        const double v = parse_number(nums[i + 1], fail);
                        if (!pwl.empty() && t <= pwl.back().first) fail("PWL times must increase");
                        pwl.emplace_back(t, v);
                    }
                    nl.add_pwl_source(toks[0], np, nn, std::move(pwl));
                } else {
                    fail("source must be DC or PWL");
                }
                break;
            }
            default:
                fail(std::string("unknown element kind '") + body[0] + "'");
        }
    }
    nl.validate();
    return nl;
}

Netlist parse_netlist(const std::string& path) {
    std::string dir;
    const size_t slash = path.find_last_of('/');
    if (slash != std::string::npos) dir = path.substr(0, slash);
    return parse_netlist_text(read_file(path), path, dir);
}

}  // namespace mivkit
