#include "stratmilp/mps.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace stratmilp {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void fail(int line_no, const std::string& msg) {
    throw std::runtime_error("MPS parse error at line " + std::to_string(line_no) +
                             ": " + msg);
}

double parse_num(const std::string& s, int line_no) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) fail(line_no, "malformed number '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(line_no, "malformed number '" + s + "'");
    } catch (const std::out_of_range&) {
        fail(line_no, "number out of range '" + s + "'");
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct RowInfo {
    char type;  // 'L', 'G', 'E'
    int index;  // position in declaration order (constraints only)
};

}  // namespace

MILPInstance parse_mps(const std::string& text) {
    enum class Section { NONE, OBJSENSE, ROWS, COLUMNS, RHS, RANGES, BOUNDS, DONE };
    Section section = Section::NONE;

    std::string obj_row;
    bool maximize = false;
    std::map<std::string, RowInfo> rows;          // constraint rows
    std::vector<std::string> row_order;
    std::map<std::string, int> cols;
    std::vector<std::string> col_order;
    std::vector<bool> col_integer;
    // Sparse staging: per column, (row index, value) plus objective value.
    std::vector<std::vector<std::pair<int, double>>> col_entries;
    std::vector<double> col_obj;
    std::map<int, double> rhs;          // by constraint index
    std::map<int, double> ranges;
    struct Bound {
        double lo = 0.0, hi = kInf;
        bool lo_set = false, hi_set = false;
    };
    std::map<int, Bound> bounds;

    std::string name = "mps";
    bool in_integer = false;
    bool saw_endata = false;
    int line_no = 0;

    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '*') continue;  // comment

        if (!std::isspace(static_cast<unsigned char>(line[0]))) {
            auto toks = split_ws(line);
            const std::string& head = toks[0];
            if (head == "NAME") {
                if (toks.size() > 1) name = toks[1];
                continue;
            }
            if (head == "OBJSENSE") { section = Section::OBJSENSE; continue; }
            if (head == "ROWS") { section = Section::ROWS; continue; }
            if (head == "COLUMNS") { section = Section::COLUMNS; continue; }
            if (head == "RHS") { section = Section::RHS; continue; }
            if (head == "RANGES") { section = Section::RANGES; continue; }
            if (head == "BOUNDS") { section = Section::BOUNDS; continue; }
            if (head == "ENDATA") { saw_endata = true; section = Section::DONE; break; }
            if (head == "MAXIMIZE" || head == "MAX") { maximize = true; continue; }
            if (head == "MINIMIZE" || head == "MIN") { continue; }
            fail(line_no, "unsupported section '" + head + "'");
        }

        auto toks = split_ws(line);
        if (toks.empty()) continue;
        switch (section) {
            case Section::OBJSENSE: {
                if (toks[0] == "MAX" || toks[0] == "MAXIMIZE") maximize = true;
                else if (toks[0] != "MIN" && toks[0] != "MINIMIZE")
                    fail(line_no, "unknown objective sense '" + toks[0] + "'");
                break;
            }
            case Section::ROWS: {
                if (toks.size() != 2) fail(line_no, "ROWS line needs 'type name'");
                char t = std::toupper(static_cast<unsigned char>(toks[0][0]));
                if (toks[0].size() != 1 || (t != 'N' && t != 'L' && t != 'G' && t != 'E'))
                    fail(line_no, "unknown row type '" + toks[0] + "'");
                if (t == 'N') {
                    if (obj_row.empty()) obj_row = toks[1];
                    // extra free rows ignored
                } else {
                    if (rows.count(toks[1])) fail(line_no, "duplicate row '" + toks[1] + "'");
                    rows[toks[1]] = {t, static_cast<int>(row_order.size())};
                    row_order.push_back(toks[1]);
                }
                break;
            }
            case Section::COLUMNS: {
                if (toks.size() >= 3 && toks[1] == "'MARKER'") {
                    if (toks[2] == "'INTORG'") in_integer = true;
                    else if (toks[2] == "'INTEND'") in_integer = false;
                    else fail(line_no, "unknown marker '" + toks[2] + "'");
                    break;
                }
                if (toks.size() < 3 || toks.size() % 2 == 0)
                    fail(line_no, "COLUMNS line needs 'col row val [row val]'");
                auto it = cols.find(toks[0]);
                int j;
                if (it == cols.end()) {
                    j = static_cast<int>(col_order.size());
                    cols[toks[0]] = j;
                    col_order.push_back(toks[0]);
                    col_integer.push_back(in_integer);
                    col_entries.emplace_back();
                    col_obj.push_back(0.0);
                } else {
                    j = it->second;
                }
                for (size_t k = 1; k + 1 < toks.size(); k += 2) {
                    double v = parse_num(toks[k + 1], line_no);
                    if (toks[k] == obj_row) {
                        col_obj[j] += v;
                    } else {
                        auto rit = rows.find(toks[k]);
                        if (rit == rows.end())
                            fail(line_no, "unknown row '" + toks[k] + "'");
                        col_entries[j].emplace_back(rit->second.index, v);
                    }
                }
                break;
            }
            case Section::RHS: {
                if (toks.size() < 3 || toks.size() % 2 == 0)
                    fail(line_no, "RHS line needs 'set row val [row val]'");
                for (size_t k = 1; k + 1 < toks.size(); k += 2) {
                    if (toks[k] == obj_row) continue;  // objective constant ignored
                    auto rit = rows.find(toks[k]);
                    if (rit == rows.end()) fail(line_no, "unknown row '" + toks[k] + "'");
                    rhs[rit->second.index] = parse_num(toks[k + 1], line_no);
                }
                break;
            }
            case Section::RANGES: {
                if (toks.size() < 3 || toks.size() % 2 == 0)
                    fail(line_no, "RANGES line needs 'set row val [row val]'");
                for (size_t k = 1; k + 1 < toks.size(); k += 2) {
                    auto rit = rows.find(toks[k]);
                    if (rit == rows.end()) fail(line_no, "unknown row '" + toks[k] + "'");
                    ranges[rit->second.index] = parse_num(toks[k + 1], line_no);
                }
                break;
            }
            case Section::BOUNDS: {
                if (toks.size() < 3) fail(line_no, "BOUNDS line needs 'type set col [val]'");
                const std::string& bt = toks[0];
                auto cit = cols.find(toks[2]);
                if (cit == cols.end()) fail(line_no, "unknown column '" + toks[2] + "'");
                Bound& bd = bounds[cit->second];
                auto need_val = [&]() {
                    if (toks.size() < 4) fail(line_no, "bound type " + bt + " needs a value");
                    return parse_num(toks[3], line_no);
                };
                if (bt == "UP") { bd.hi = need_val(); bd.hi_set = true; }
                else if (bt == "LO") { bd.lo = need_val(); bd.lo_set = true; }
                else if (bt == "FX") { bd.lo = bd.hi = need_val(); bd.lo_set = bd.hi_set = true; }
                else if (bt == "FR") { bd.lo = -kInf; bd.hi = kInf; bd.lo_set = bd.hi_set = true; }
                else if (bt == "MI") { bd.lo = -kInf; bd.lo_set = true; }
                else if (bt == "PL") { bd.hi = kInf; bd.hi_set = true; }
                else if (bt == "BV") {
                    bd.lo = 0.0; bd.hi = 1.0; bd.lo_set = bd.hi_set = true;
                    col_integer[cit->second] = true;
                } else if (bt == "UI") {
                    bd.hi = need_val(); bd.hi_set = true;
                    col_integer[cit->second] = true;
                } else if (bt == "LI") {
                    bd.lo = need_val(); bd.lo_set = true;
                    col_integer[cit->second] = true;
                } else {
                    fail(line_no, "unsupported bound type '" + bt + "'");
                }
                break;
            }
            case Section::NONE:
                fail(line_no, "data before any section header");
            case Section::DONE:
                break;
        }
    }
    if (!saw_endata && section == Section::NONE)
        fail(line_no, "no MPS sections found");

    const int n = static_cast<int>(col_order.size());
    const int m_decl = static_cast<int>(row_order.size());

    MILPInstance inst;
    inst.name = name;
    inst.n = n;
    inst.c.assign(n, 0.0);
    inst.lo.assign(n, 0.0);
    inst.hi.assign(n, kInf);
    for (int j = 0; j < n; ++j) {
        inst.c[j] = maximize ? -col_obj[j] : col_obj[j];
        if (col_integer[j]) inst.integer_index_set.push_back(j);
        auto bit = bounds.find(j);
        if (bit != bounds.end()) {
            inst.lo[j] = bit->second.lo;
            inst.hi[j] = bit->second.hi;
        }
    }

    // Dense staging row-major over declared rows, then emit LE/EQ rows
    // (G negated) plus range side-rows in declaration order.
    std::vector<double> dense(static_cast<size_t>(m_decl) * n, 0.0);
    for (int j = 0; j < n; ++j)
        for (auto [ri, v] : col_entries[j])
            dense[static_cast<size_t>(ri) * n + j] += v;

    auto emit = [&](int ri, double sign, RowSense sense, double b) {
        for (int j = 0; j < n; ++j)
            inst.A.push_back(sign * dense[static_cast<size_t>(ri) * n + j]);
        inst.b.push_back(b);
        inst.row_sense.push_back(sense);
        ++inst.m;
    };
    for (int r = 0; r < m_decl; ++r) {
        char t = rows[row_order[r]].type;
        double b = rhs.count(r) ? rhs[r] : 0.0;
        auto rg = ranges.find(r);
        if (t == 'L') {
            emit(r, 1.0, RowSense::LE, b);
            if (rg != ranges.end()) emit(r, -1.0, RowSense::LE, -(b - std::abs(rg->second)));
        } else if (t == 'G') {
            emit(r, -1.0, RowSense::LE, -b);
            if (rg != ranges.end()) emit(r, 1.0, RowSense::LE, b + std::abs(rg->second));
        } else {  // E
            if (rg == ranges.end()) {
                emit(r, 1.0, RowSense::EQ, b);
            } else if (rg->second >= 0.0) {
                emit(r, 1.0, RowSense::LE, b + rg->second);
                emit(r, -1.0, RowSense::LE, -b);
            } else {
                emit(r, 1.0, RowSense::LE, b);
                emit(r, -1.0, RowSense::LE, -(b + rg->second));
            }
        }
    }
    return inst;
}

std::string serialize_mps(const MILPInstance& inst) {
    std::ostringstream os;
    os << "NAME " << (inst.name.empty() ? "mps" : inst.name) << "\n";
    os << "ROWS\n N  OBJ\n";
    for (int i = 0; i < inst.m; ++i)
        os << (inst.row_sense[i] == RowSense::EQ ? " E  R" : " L  R") << i << "\n";

    std::vector<bool> is_int(inst.n, false);
    for (int j : inst.integer_index_set) is_int[j] = true;

    os << "COLUMNS\n";
    bool marker_open = false;
    int marker_id = 0;
    for (int j = 0; j < inst.n; ++j) {
        if (is_int[j] != marker_open) {
            os << "    MARK" << marker_id++ << "  'MARKER'  "
               << (is_int[j] ? "'INTORG'" : "'INTEND'") << "\n";
            marker_open = is_int[j];
        }
        bool any = false;
        if (inst.c[j] != 0.0) {
            os << "    C" << j << "  OBJ  " << fmt(inst.c[j]) << "\n";
            any = true;
        }
        for (int i = 0; i < inst.m; ++i) {
            double v = inst.a(i, j);
            if (v != 0.0) {
                os << "    C" << j << "  R" << i << "  " << fmt(v) << "\n";
                any = true;
            }
        }
        if (!any)  // keep empty columns alive so the variable count survives
            os << "    C" << j << "  OBJ  0\n";
    }
    if (marker_open) os << "    MARK" << marker_id++ << "  'MARKER'  'INTEND'\n";

    os << "RHS\n";
    for (int i = 0; i < inst.m; ++i)
        if (inst.b[i] != 0.0)
            os << "    RHS  R" << i << "  " << fmt(inst.b[i]) << "\n";

    os << "BOUNDS\n";
    for (int j = 0; j < inst.n; ++j) {
        double lo = inst.lo[j], hi = inst.hi[j];
        if (lo == 0.0 && hi == kInf) continue;
        if (lo == hi) {
            os << " FX BND  C" << j << "  " << fmt(lo) << "\n";
            continue;
        }
        if (lo == -kInf && hi == kInf) {
            os << " FR BND  C" << j << "\n";
            continue;
        }
        if (lo == -kInf) os << " MI BND  C" << j << "\n";
        else if (lo != 0.0) os << " LO BND  C" << j << "  " << fmt(lo) << "\n";
        if (hi != kInf) os << " UP BND  C" << j << "  " << fmt(hi) << "\n";
    }
    os << "ENDATA\n";
    return os.str();
}

}  // namespace stratmilp
