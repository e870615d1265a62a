#include "secd/mps.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include <fmt/core.h>

#include "csv.hpp"

namespace secd {

namespace {

std::string column_name(std::size_t j) { return fmt::format("C{:07d}", j); }
std::string row_name(std::size_t i) { return fmt::format("R{:07d}", i); }

std::string trim_right(std::string line) {
    while (!line.empty() && line.back() == ' ') line.pop_back();
    return line;
}

std::string data_line(const std::string& f1, const std::string& f2, const std::string& f3, const std::string& f4,
                      const std::string& f5 = {}, const std::string& f6 = {}) {
    return trim_right(fmt::format(" {:<2} {:<8}  {:<8}  {:<12}   {:<8}  {:<12}", f1, f2, f3, f4, f5, f6)) + "\n";
}

const char* sense_code(Sense s) {
    switch (s) {
        case Sense::LessEqual: return "L";
        case Sense::GreaterEqual: return "G";
        case Sense::Equal: return "E";
    }
    return "E";
}

}  // namespace

std::string to_mps(const MilpProblem& problem, const std::string& name) {
    problem.validate();
    const auto& vars = problem.variables();
    const auto& rows = problem.constraints();
    std::string out = fmt::format("NAME          {}\n", name);
    for (std::size_t j = 0; j < vars.size(); ++j) out += fmt::format("* NAMEMAP {} {}\n", column_name(j), vars[j].name);
    for (std::size_t i = 0; i < rows.size(); ++i) out += fmt::format("* NAMEMAP {} {}\n", row_name(i), rows[i].name);

    out += "ROWS\n";
    out += " N  OBJ\n";
    for (std::size_t i = 0; i < rows.size(); ++i) out += fmt::format(" {}  {}\n", sense_code(rows[i].sense), row_name(i));

    // Column-major coefficient lists.
    std::vector<std::vector<std::pair<std::string, double>>> cols(vars.size());
    for (const Term& t : problem.objective().terms) cols[t.var.index].push_back({"OBJ", t.coef});
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const Term& t : rows[i].expr.terms) cols[t.var.index].push_back({row_name(i), t.coef});

    out += "COLUMNS\n";
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const auto& entries = cols[j];
        if (entries.empty()) {
            out += data_line("", column_name(j), "OBJ", "0");
            continue;
        }
        for (std::size_t k = 0; k < entries.size(); k += 2) {
            if (k + 1 < entries.size())
                out += data_line("", column_name(j), entries[k].first, format_double(entries[k].second),
                                 entries[k + 1].first, format_double(entries[k + 1].second));
            else
                out += data_line("", column_name(j), entries[k].first, format_double(entries[k].second));
        }
    }

    out += "RHS\n";
    std::vector<std::pair<std::string, double>> rhs;
    if (problem.objective().constant != 0.0) rhs.push_back({"OBJ", -problem.objective().constant});
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].rhs != 0.0) rhs.push_back({row_name(i), rows[i].rhs});
    for (std::size_t k = 0; k < rhs.size(); k += 2) {
        if (k + 1 < rhs.size())
            out += data_line("", "RHS", rhs[k].first, format_double(rhs[k].second), rhs[k + 1].first,
                             format_double(rhs[k + 1].second));
        else
            out += data_line("", "RHS", rhs[k].first, format_double(rhs[k].second));
    }

    out += "BOUNDS\n";
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const Variable& v = vars[j];
        const std::string c = column_name(j);
        if (v.kind == VarKind::Binary) {
            out += data_line("BV", "BND", c, "");
            if (v.lower != 0.0) out += data_line("LO", "BND", c, format_double(v.lower));
            if (v.upper != 1.0) out += data_line("UP", "BND", c, format_double(v.upper));
            continue;
        }
        if (v.lower == v.upper) {
            out += data_line("FX", "BND", c, format_double(v.lower));
            continue;
        }
        if (v.lower == -kInf && v.upper == kInf) {
            out += data_line("FR", "BND", c, "");
            continue;
        }
        if (v.lower == -kInf)
            out += data_line("MI", "BND", c, "");
        else if (v.lower != 0.0 || v.upper < 0.0)
            out += data_line("LO", "BND", c, format_double(v.lower));
        if (v.upper != kInf) out += data_line("UP", "BND", c, format_double(v.upper));
    }
    out += "ENDATA\n";
    return out;
}

void export_mps(const MilpProblem& problem, const std::filesystem::path& path, const std::string& name) {
    write_text_file(path, to_mps(problem, name));
}

MilpProblem parse_mps(const std::string& text) {
    enum class Section { None, Rows, Columns, Rhs, Bounds, End };
    struct RowInfo {
        std::string name;
        Sense sense = Sense::Equal;
        LinearExpr expr;
        double rhs = 0.0;
    };
    struct ColInfo {
        std::string name;
        VarKind kind = VarKind::Continuous;
        double lower = 0.0;
        double upper = kInf;
    };

    std::unordered_map<std::string, std::string> names;
    std::string objective_row;
    std::vector<RowInfo> rows;
    std::unordered_map<std::string, std::size_t> row_index;
    std::vector<ColInfo> cols;
    std::unordered_map<std::string, std::size_t> col_index;
    LinearExpr objective;
    bool integer_block = false;

    auto fail = [](std::size_t line_no, const std::string& what) {
        return ParseError(fmt::format("mps line {}: {}", line_no, what));
    };
    auto number = [&](std::size_t line_no, const std::string& s) {
        try {
            return parse_double(s);
        } catch (const Error&) {
            throw fail(line_no, "bad number '" + s + "'");
        }
    };

    Section section = Section::None;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (line[0] == '*') {
            if (tok.size() >= 4 && tok[1] == "NAMEMAP") {
                std::string original = line.substr(line.find(tok[2], line.find("NAMEMAP") + 7) + tok[2].size() + 1);
                names[tok[2]] = original;
            }
            continue;
        }
        if (line[0] != ' ' && line[0] != '\t') {
            const std::string& head = tok[0];
            if (head == "NAME") section = Section::None;
            else if (head == "ROWS") section = Section::Rows;
            else if (head == "COLUMNS") section = Section::Columns;
            else if (head == "RHS") section = Section::Rhs;
            else if (head == "BOUNDS") section = Section::Bounds;
            else if (head == "ENDATA") { section = Section::End; break; }
            else throw fail(line_no, "unsupported section '" + head + "'");
            continue;
        }
        switch (section) {
            case Section::Rows: {
                if (tok.size() != 2) throw fail(line_no, "ROWS entry needs a type and a name");
                if (tok[0] == "N") {
                    if (!objective_row.empty()) throw fail(line_no, "more than one objective row");
                    objective_row = tok[1];
                    continue;
                }
                Sense s;
                if (tok[0] == "L") s = Sense::LessEqual;
                else if (tok[0] == "G") s = Sense::GreaterEqual;
                else if (tok[0] == "E") s = Sense::Equal;
                else throw fail(line_no, "unknown row type '" + tok[0] + "'");
                if (!row_index.emplace(tok[1], rows.size()).second) throw fail(line_no, "duplicate row " + tok[1]);
                rows.push_back({tok[1], s, {}, 0.0});
                break;
            }
            case Section::Columns: {
                if (tok.size() >= 3 && tok[1] == "'MARKER'") {
                    if (tok[2] == "'INTORG'") integer_block = true;
                    else if (tok[2] == "'INTEND'") integer_block = false;
                    else throw fail(line_no, "unknown marker");
                    continue;
                }
                if (tok.size() != 3 && tok.size() != 5) throw fail(line_no, "COLUMNS entry needs 3 or 5 fields");
                auto [it, added] = col_index.emplace(tok[0], cols.size());
                if (added) {
                    ColInfo c{tok[0], VarKind::Continuous, 0.0, kInf};
                    if (integer_block) {
                        c.kind = VarKind::Binary;
                        c.upper = 1.0;
                    }
                    cols.push_back(c);
                }
                const VarId v{it->second};
                for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                    const double coef = number(line_no, tok[k + 1]);
                    if (tok[k] == objective_row) {
                        objective.add(v, coef);
                    } else {
                        auto r = row_index.find(tok[k]);
                        if (r == row_index.end()) throw fail(line_no, "unknown row " + tok[k]);
                        rows[r->second].expr.add(v, coef);
                    }
                }
                break;
            }
            case Section::Rhs: {
                if (tok.size() != 3 && tok.size() != 5) throw fail(line_no, "RHS entry needs 3 or 5 fields");
                for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                    const double value = number(line_no, tok[k + 1]);
                    if (tok[k] == objective_row) {
                        objective.constant = -value;
                    } else {
                        auto r = row_index.find(tok[k]);
                        if (r == row_index.end()) throw fail(line_no, "unknown row " + tok[k]);
                        rows[r->second].rhs = value;
                    }
                }
                break;
            }
            case Section::Bounds: {
                if (tok.size() < 3) throw fail(line_no, "BOUNDS entry too short");
                auto c = col_index.find(tok[2]);
                if (c == col_index.end()) throw fail(line_no, "unknown column " + tok[2]);
                ColInfo& col = cols[c->second];
                const std::string& type = tok[0];
                auto value = [&] {
                    if (tok.size() < 4) throw fail(line_no, type + " bound needs a value");
                    return number(line_no, tok[3]);
                };
                if (type == "BV") {
                    col.kind = VarKind::Binary;
                    col.lower = 0.0;
                    col.upper = 1.0;
                } else if (type == "LO") col.lower = value();
                else if (type == "UP") col.upper = value();
                else if (type == "FX") col.lower = col.upper = value();
                else if (type == "FR") { col.lower = -kInf; col.upper = kInf; }
                else if (type == "MI") col.lower = -kInf;
                else if (type == "PL") col.upper = kInf;
                else throw fail(line_no, "unsupported bound type '" + type + "'");
                break;
            }
            case Section::None:
            case Section::End:
                throw fail(line_no, "data outside a section");
        }
    }
    if (section != Section::End) throw ParseError("mps: missing ENDATA");
    if (objective_row.empty()) throw ParseError("mps: no objective row");

    auto original = [&](const std::string& short_name) {
        auto it = names.find(short_name);
        return it == names.end() ? short_name : it->second;
    };
    MilpProblem problem;
    try {
        for (const ColInfo& c : cols) problem.add_variable(original(c.name), c.kind, c.lower, c.upper);
        for (RowInfo& r : rows) problem.add_constraint(original(r.name), std::move(r.expr), r.sense, r.rhs);
        problem.set_objective(std::move(objective));
    } catch (const MilpError& e) {
        throw ParseError(std::string("mps: ") + e.what());
    }
    return problem;
}

MilpProblem import_mps(const std::filesystem::path& path) { return parse_mps(read_text_file(path)); }

}  // namespace secd
