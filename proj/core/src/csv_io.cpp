#include "spillover/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

#include "spillover/errors.hpp"

namespace spillover {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad(std::size_t line, const std::string& msg) {
    throw SpilloverError(ErrorCode::MalformedData, "line " + std::to_string(line) + ": " + msg);
}

double parse_real(std::string_view s, std::size_t line, const char* col) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) bad(line, std::string("bad number in ") + col);
    return v;
}

int parse_int(std::string_view s, std::size_t line, const char* col) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) bad(line, std::string("bad integer in ") + col);
    return v;
}

Binary parse_bin(std::string_view s, std::size_t line, const char* col) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    bad(line, std::string(col) + " must be 0 or 1");
}

}  // namespace

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.emplace_back(trim(cur));
    return out;
}

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

NetworkDataset read_network_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SpilloverError(ErrorCode::MalformedData, "missing header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_csv_row(line);

    std::map<std::string, std::size_t> col;
    for (std::size_t c = 0; c < header.size(); ++c) col[header[c]] = c;
    for (const char* req : {"id", "y", "d", "d1", "r", "n_i"})
        if (!col.count(req)) bad(1, std::string("missing required column ") + req);

    int k_d = 0, k_a = 0;
    while (col.count("d_peer_" + std::to_string(k_d + 1))) ++k_d;
    while (col.count("a_peer_" + std::to_string(k_a + 1))) ++k_a;
    const bool has_a1 = col.count("a1") > 0;

    NetworkDataset ds;
    if (has_a1) ds.a1.emplace();
    if (k_d > 0) ds.d_peers.emplace();
    if (k_a > 0) ds.a_peers.emplace();

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = split_csv_row(line);
        if (f.size() != header.size()) bad(lineno, "expected " + std::to_string(header.size()) + " fields");
        auto at = [&](const std::string& name) -> std::string_view { return f[col.at(name)]; };

        ds.id.emplace_back(at("id"));
        ds.y.push_back(parse_real(at("y"), lineno, "y"));
        ds.d.push_back(parse_bin(at("d"), lineno, "d"));
        ds.d1.push_back(parse_bin(at("d1"), lineno, "d1"));
        ds.r.push_back(parse_int(at("r"), lineno, "r"));
        const int n_i = parse_int(at("n_i"), lineno, "n_i");
        if (n_i < 1) bad(lineno, "n_i must be positive");
        ds.n_peers.push_back(n_i);
        if (has_a1) ds.a1->push_back(parse_bin(at("a1"), lineno, "a1"));

        auto read_peers = [&](const char* prefix, int k, std::vector<std::vector<Binary>>& dst) {
            if (n_i > k) bad(lineno, std::string("n_i exceeds the number of ") + prefix + " columns");
            std::vector<Binary> v;
            for (int j = 1; j <= k; ++j) {
                const auto cell = at(prefix + std::to_string(j));
                if (j <= n_i) {
                    v.push_back(parse_bin(cell, lineno, prefix));
                } else if (!cell.empty()) {
                    bad(lineno, std::string(prefix) + std::to_string(j) + " must be blank beyond n_i");
                }
            }
            dst.push_back(std::move(v));
        };
        if (k_d > 0) read_peers("d_peer_", k_d, *ds.d_peers);
        if (k_a > 0) read_peers("a_peer_", k_a, *ds.a_peers);
    }
    ds.validate();
    return ds;
}

NetworkDataset read_network_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpilloverError(ErrorCode::MalformedData, "cannot open " + path);
    return read_network_csv(in);
}

void write_network_csv(std::ostream& out, const NetworkDataset& ds) {
    int k = 0;
    for (int n_i : ds.n_peers) k = std::max(k, n_i);
    out << "id,y,d,d1,r,n_i";
    if (ds.a1) out << ",a1";
    if (ds.d_peers)
        for (int j = 1; j <= k; ++j) out << ",d_peer_" << j;
    if (ds.a_peers)
        for (int j = 1; j <= k; ++j) out << ",a_peer_" << j;
    out << '\n';
    for (std::size_t i = 0; i < ds.n(); ++i) {
        out << (ds.id.empty() ? std::to_string(i + 1) : ds.id[i]) << ',' << format_double(ds.y[i]) << ','
            << int(ds.d[i]) << ',' << int(ds.d1[i]) << ',' << ds.r[i] << ',' << ds.n_peers[i];
        if (ds.a1) out << ',' << int((*ds.a1)[i]);
        auto peers = [&](const std::vector<Binary>& v) {
            for (int j = 0; j < k; ++j) {
                out << ',';
                if (j < static_cast<int>(v.size())) out << int(v[j]);
            }
        };
        if (ds.d_peers) peers((*ds.d_peers)[i]);
        if (ds.a_peers) peers((*ds.a_peers)[i]);
        out << '\n';
    }
}

void write_network_csv_file(const std::string& path, const NetworkDataset& ds) {
    std::ofstream out(path);
    if (!out) throw SpilloverError(ErrorCode::InvalidConfig, "cannot write " + path);
    write_network_csv(out, ds);
}

}  // namespace spillover
