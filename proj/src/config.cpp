#include "pmqkd/config.hpp"

#include <cctype>
#include <sstream>
#include <string>

namespace pmqkd {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_real(const std::string& value, int line_no) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw ParseError(line_no, "trailing characters in value '" + value + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(line_no, "not a number: '" + value + "'");
    }
}

int parse_int(const std::string& value, int line_no) {
    try {
        size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size())
            throw ParseError(line_no, "trailing characters in value '" + value + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(line_no, "not an integer: '" + value + "'");
    }
}

}  // namespace

ProtocolParams parse_config(const std::string& text) {
    ProtocolParams p;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");

        if (key == "n") p.n = parse_int(value, line_no);
        else if (key == "M") p.M = parse_int(value, line_no);
        else if (key == "mu") p.mu_a = p.mu_b = parse_real(value, line_no);
        else if (key == "mu_a") p.mu_a = parse_real(value, line_no);
        else if (key == "mu_b") p.mu_b = parse_real(value, line_no);
        else if (key == "p_d") p.p_d = parse_real(value, line_no);
        else if (key == "eta_d") p.eta_d = parse_real(value, line_no);
        else if (key == "f") p.f = parse_real(value, line_no);
        else if (key == "e_d") p.e_d = parse_real(value, line_no);
        else if (key == "alpha") p.alpha = parse_real(value, line_no);
        else if (key == "L") p.L = parse_real(value, line_no);
        else throw ParseError(line_no, "unknown key '" + key + "'");
    }
    p.validate();
    return p;
}

}  // namespace pmqkd
