/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <ngb/errors.hpp>
#include <ngb/mps.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace ngb {

namespace {

enum class section_t { none, name, rows, columns, rhs, bounds, done };

struct pending_row_t {
  std::string name;
  char type;  // 'G', 'L', 'E'
  std::vector<std::pair<int, double>> coefs;
  double rhs = 0.0;
};

std::vector<std::string> split(std::string_view line)
{
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) { out.push_back(tok); }
  return out;
}

double number(const std::string& tok, int line)
{
  try {
    size_t used = 0;
    double v    = std::stod(tok, &used);
    if (used != tok.size()) { throw std::invalid_argument(tok); }
    return v;
  } catch (const std::exception&) {
    throw parse_error(line, "bad number '" + tok + "'");
  }
}

std::string format_double(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

mip_problem_t parse_mps(std::string_view text)
{
  mip_problem_t p;
  std::string obj_name;
  std::vector<pending_row_t> rows;
  std::unordered_map<std::string, int> row_index;  // -1 for the objective
  std::unordered_map<std::string, int> col_index;
  std::vector<double> cost;
  std::vector<char> integer;
  std::vector<double> lo;
  std::vector<double> hi;
  double offset  = 0.0;
  bool in_marker = false;
  section_t sec  = section_t::none;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') { raw.pop_back(); }
    if (raw.empty() || raw[0] == '*') { continue; }
    auto tok = split(raw);
    if (tok.empty()) { continue; }

    if (raw[0] != ' ' && raw[0] != '\t') {
      const std::string& head = tok[0];
      if (head == "NAME") {
        sec    = section_t::name;
        p.name = tok.size() > 1 ? tok[1] : "";
      } else if (head == "ROWS") {
        sec = section_t::rows;
      } else if (head == "COLUMNS") {
        sec = section_t::columns;
      } else if (head == "RHS") {
        sec = section_t::rhs;
      } else if (head == "BOUNDS") {
        sec = section_t::bounds;
      } else if (head == "ENDATA") {
        sec = section_t::done;
        break;
      } else {
        throw parse_error(line, "unknown section '" + head + "'");
      }
      continue;
    }

    switch (sec) {
      case section_t::rows: {
        if (tok.size() != 2) { throw parse_error(line, "ROWS entry needs a type and a name"); }
        const std::string& type = tok[0];
        const std::string& name = tok[1];
        if (row_index.count(name)) { throw parse_error(line, "duplicate row '" + name + "'"); }
        if (type == "N") {
          if (obj_name.empty()) {
            obj_name        = name;
            row_index[name] = -1;
          } else {
            row_index[name] = -2;  // extra free rows are ignored
          }
        } else if (type == "G" || type == "L" || type == "E") {
          row_index[name] = static_cast<int>(rows.size());
          rows.push_back({name, type[0], {}, 0.0});
        } else {
          throw parse_error(line, "unknown row type '" + type + "'");
        }
        break;
      }
      case section_t::columns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") {
            in_marker = true;
          } else if (tok[2] == "'INTEND'") {
            in_marker = false;
          } else {
            throw parse_error(line, "unknown marker " + tok[2]);
          }
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) { throw parse_error(line, "malformed COLUMNS entry"); }
        const std::string& col = tok[0];
        auto it = col_index.find(col);
        int c;
        if (it == col_index.end()) {
          c              = static_cast<int>(cost.size());
          col_index[col] = c;
          p.col_names.push_back(col);
          cost.push_back(0.0);
          integer.push_back(in_marker ? 1 : 0);
          lo.push_back(0.0);
          hi.push_back(inf);
        } else {
          c = it->second;
        }
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          auto r = row_index.find(tok[k]);
          if (r == row_index.end()) { throw parse_error(line, "undeclared row '" + tok[k] + "'"); }
          double v = number(tok[k + 1], line);
          if (r->second == -1) {
            cost[c] += v;
          } else if (r->second >= 0) {
            rows[r->second].coefs.emplace_back(c, v);
          }
        }
        break;
      }
      case section_t::rhs: {
        size_t start = tok.size() % 2 == 1 ? 1 : 0;
        if (tok.size() < 2 || tok.size() > 5) { throw parse_error(line, "malformed RHS entry"); }
        for (size_t k = start; k + 1 < tok.size(); k += 2) {
          auto r = row_index.find(tok[k]);
          if (r == row_index.end()) { throw parse_error(line, "undeclared row '" + tok[k] + "'"); }
          double v = number(tok[k + 1], line);
          if (r->second == -1) {
            offset = -v;
          } else if (r->second >= 0) {
            rows[r->second].rhs = v;
          }
        }
        break;
      }
      case section_t::bounds: {
        if (tok.size() < 3) { throw parse_error(line, "malformed BOUNDS entry"); }
        const std::string& type = tok[0];
        bool valueless = type == "FR" || type == "MI" || type == "PL" || type == "BV";
        std::string col;
        std::string val;
        if (valueless) {
          col = tok.back();
          if (tok.size() == 4 && type == "BV") {
            col = tok[2];
            val = tok[3];
          }
        } else {
          if (tok.size() == 4) {
            col = tok[2];
            val = tok[3];
          } else if (tok.size() == 3) {
            col = tok[1];
            val = tok[2];
          } else {
            throw parse_error(line, "malformed BOUNDS entry");
          }
        }
        auto it = col_index.find(col);
        if (it == col_index.end()) { throw parse_error(line, "bound on undeclared column '" + col + "'"); }
        int c = it->second;
        if (type == "UP") {
          hi[c] = number(val, line);
        } else if (type == "LO") {
          lo[c] = number(val, line);
        } else if (type == "FX") {
          lo[c] = hi[c] = number(val, line);
        } else if (type == "FR") {
          lo[c] = -inf;
          hi[c] = inf;
        } else if (type == "MI") {
          lo[c] = -inf;
        } else if (type == "PL") {
          hi[c] = inf;
        } else if (type == "BV") {
          lo[c]      = 0.0;
          hi[c]      = 1.0;
          integer[c] = 1;
        } else if (type == "LI") {
          lo[c]      = number(val, line);
          integer[c] = 1;
        } else if (type == "UI") {
          hi[c]      = number(val, line);
          integer[c] = 1;
        } else {
          throw parse_error(line, "unknown bound type '" + type + "'");
        }
        break;
      }
      case section_t::name:
      case section_t::none:
      case section_t::done: throw parse_error(line, "data outside of a section");
    }
  }
  if (sec != section_t::done) { throw parse_error(line, "missing ENDATA"); }
  if (obj_name.empty()) { throw parse_error(line, "no objective row"); }

  p.objective_name = obj_name;
  p.is_integer     = integer;
  p.lp             = lp_model_t::with_columns(cost, lo, hi);
  p.lp.objective_offset = offset;
  const int n = static_cast<int>(cost.size());
  auto dense = [n](const pending_row_t& r, double sign) {
    std::vector<double> v(n, 0.0);
    for (auto [c, a] : r.coefs) { v[c] += sign * a; }
    return v;
  };
  for (const auto& r : rows) {
    if (r.type == 'G') {
      p.lp.add_row(dense(r, 1.0), r.rhs);
      p.row_names.push_back(r.name);
    } else if (r.type == 'L') {
      p.lp.add_row(dense(r, -1.0), -r.rhs);
      p.row_names.push_back(r.name);
    } else {
      p.lp.add_row(dense(r, 1.0), r.rhs);
      p.row_names.push_back(r.name);
      p.lp.add_row(dense(r, -1.0), -r.rhs);
      p.row_names.push_back(r.name + ".ub");
    }
  }
  p.tighten_integer_bounds();
  p.validate();
  return p;
}

mip_problem_t read_mps(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) { throw std::runtime_error("cannot open " + path.string()); }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_mps(buf.str());
}

std::string write_mps(const mip_problem_t& p)
{
  std::ostringstream out;
  const auto& lp = p.lp;
  out << "NAME " << p.name << "\n";
  out << "ROWS\n";
  out << " N " << p.objective_name << "\n";
  for (const auto& r : p.row_names) { out << " G " << r << "\n"; }
  out << "COLUMNS\n";
  bool marker = false;
  int markers = 0;
  for (int j = 0; j < lp.num_cols; ++j) {
    if (static_cast<bool>(p.is_integer[j]) != marker) {
      marker = !marker;
      out << "    M" << markers++ << " 'MARKER' " << (marker ? "'INTORG'" : "'INTEND'") << "\n";
    }
    const auto& name = p.col_names[j];
    out << "    " << name << " " << p.objective_name << " " << format_double(lp.objective[j]) << "\n";
    for (int r = 0; r < lp.num_rows; ++r) {
      double a = lp.coef(r, j);
      if (a != 0.0) { out << "    " << name << " " << p.row_names[r] << " " << format_double(a) << "\n"; }
    }
  }
  if (marker) { out << "    M" << markers << " 'MARKER' 'INTEND'\n"; }
  out << "RHS\n";
  if (lp.objective_offset != 0.0) {
    out << "    RHS " << p.objective_name << " " << format_double(-lp.objective_offset) << "\n";
  }
  for (int r = 0; r < lp.num_rows; ++r) {
    if (lp.rhs[r] != 0.0) { out << "    RHS " << p.row_names[r] << " " << format_double(lp.rhs[r]) << "\n"; }
  }
  out << "BOUNDS\n";
  for (int j = 0; j < lp.num_cols; ++j) {
    const auto& name = p.col_names[j];
    double l = lp.lower[j];
    double u = lp.upper[j];
    if (l == u) {
      out << " FX BND " << name << " " << format_double(l) << "\n";
      continue;
    }
    if (l == -inf && u == inf) {
      out << " FR BND " << name << "\n";
      continue;
    }
    if (l == -inf) {
      out << " MI BND " << name << "\n";
    } else if (l != 0.0) {
      out << " LO BND " << name << " " << format_double(l) << "\n";
    }
    if (u != inf) { out << " UP BND " << name << " " << format_double(u) << "\n"; }
  }
  out << "ENDATA\n";
  return out.str();
}

}  // namespace ngb
