#include "mivkit/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mivkit/text_util.hpp"

namespace mivkit {

const std::vector<std::pair<std::string, double ModelParams::*>>& param_fields() {
    static const std::vector<std::pair<std::string, double ModelParams::*>> table = {
        {"VTH0", &ModelParams::vth0},   {"DELVT", &ModelParams::delvt},
        {"U0", &ModelParams::u0},       {"UA", &ModelParams::ua},
        {"UB", &ModelParams::ub},       {"UD", &ModelParams::ud},
        {"UCS", &ModelParams::ucs},     {"CDSC", &ModelParams::cdsc},
        {"CDSCD", &ModelParams::cdscd}, {"DVT0", &ModelParams::dvt0},
        {"DVT1", &ModelParams::dvt1},   {"ETAB", &ModelParams::etab},
        {"VSAT", &ModelParams::vsat},   {"PVAG", &ModelParams::pvag},
        {"CKAPPA", &ModelParams::ckappa}, {"CF", &ModelParams::cf},
        {"CGSO", &ModelParams::cgso},   {"CGDO", &ModelParams::cgdo},
        {"CGSL", &ModelParams::cgsl},   {"CGDL", &ModelParams::cgdl},
        {"MOIN", &ModelParams::moin},
    };
    return table;
}

double ModelParams::* param_field(const std::string& upper_name) {
    for (const auto& [name, field] : param_fields())
        if (name == upper_name) return field;
    throw std::invalid_argument("unknown model parameter '" + upper_name + "'");
}

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

}  // namespace

ModelCard parse_model_card_text(const std::string& text, const std::string& diag_name) {
    ModelCard card;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(diag_name + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        std::istringstream ls(body);
        std::string key, value, extra;
        ls >> key >> value;
        if (value.empty()) fail("expected 'NAME value'");
        if (ls >> extra) fail("trailing token '" + extra + "'");
        key = upper(key);

        if (key == "POLARITY") {
            card.params.polarity = polarity_from_string(value);
            continue;
        }
        // integer flags / constants from the card
        auto& c = card.consts;
        if (key == "LEVEL") { c.level = static_cast<int>(parse_number(value, fail)); continue; }
        if (key == "MOBMOD") { c.mobmod = static_cast<int>(parse_number(value, fail)); continue; }
        if (key == "CAPMOD") { c.capmod = static_cast<int>(parse_number(value, fail)); continue; }
        if (key == "IGCMOD") { c.igcmod = static_cast<int>(parse_number(value, fail)); continue; }
        if (key == "SOIMOD") { c.soimod = static_cast<int>(parse_number(value, fail)); continue; }
        if (key == "TSI") { c.tsi = parse_number(value, fail); continue; }
        if (key == "TOX") { c.tox = parse_number(value, fail); continue; }
        if (key == "TBOX") { c.tbox = parse_number(value, fail); continue; }
        if (key == "L") { c.l = parse_number(value, fail); continue; }
        if (key == "W") { c.w = parse_number(value, fail); continue; }
        if (key == "TNOM") { c.tnom = parse_number(value, fail); continue; }

        bool matched = false;
        for (const auto& [name, field] : param_fields()) {
            if (name == key) {
                card.params.*field = parse_number(value, fail);
                matched = true;
                break;
            }
        }
        if (!matched) fail("unknown key '" + key + "'");
    }
    validate(card.consts);
    validate(card.params);
    return card;
}

ModelCard read_model_card(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model card '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_card_text(ss.str(), path);
}

std::string model_card_text(const ModelCard& card) {
    std::ostringstream out;
    const auto& c = card.consts;
    out << "LEVEL " << c.level << "\n";
    out << "MOBMOD " << c.mobmod << "\n";
    out << "CAPMOD " << c.capmod << "\n";
    out << "IGCMOD " << c.igcmod << "\n";
    out << "SOIMOD " << c.soimod << "\n";
    out << "TSI " << format_double(c.tsi) << "\n";
    out << "TOX " << format_double(c.tox) << "\n";
    out << "TBOX " << format_double(c.tbox) << "\n";
    out << "L " << format_double(c.l) << "\n";
    out << "W " << format_double(c.w) << "\n";
    out << "TNOM " << format_double(c.tnom) << "\n";
    for (const auto& [name, field] : param_fields())
        out << name << " " << format_double(card.params.*field) << "\n";
    out << "POLARITY " << to_string(card.params.polarity) << "\n";
    return out.str();
}

void write_model_card(const ModelCard& card, const std::string& path) {
    write_file_atomic(path, model_card_text(card));
}

}  // namespace mivkit
