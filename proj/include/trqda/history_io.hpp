#ifndef TRQDA_HISTORY_IO_HPP
#define TRQDA_HISTORY_IO_HPP

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "trqda/driver.hpp"

namespace trqda {

/// Column order of the iteration CSV. Vectors are ';'-separated within a field.
inline const std::vector<std::string>& history_columns() {
  static const std::vector<std::string> cols = {
      "k",           "Delta",       "delta",         "j",           "rho",
      "successful",  "dT_s",        "f_bar_old",     "f_bar_new",   "f_acc",
      "f_acc_old",   "i_zeta",      "f_evals",       "deriv_evals", "deriv_rounds",
      "step1_skipped", "step2_tightenings", "step_fallback", "x",     "s"};
  return cols;
}

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += fmt17(v(i));
  }
  return out;
}

inline Vector parse_vector(const std::string& s) {
  std::vector<double> vals;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ';'))
    if (!tok.empty()) vals.push_back(std::stod(tok));
  Vector v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

}  // namespace detail

inline void write_history_csv(std::ostream& os, const std::vector<IterationRecord>& h) {
  const auto& cols = history_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  using detail::fmt17;
  for (const auto& r : h) {
    os << r.k << ',' << fmt17(r.Delta) << ',' << fmt17(r.delta) << ',' << r.j << ','
       << fmt17(r.rho) << ',' << (r.successful ? 1 : 0) << ',' << fmt17(r.dT_s) << ','
       << fmt17(r.f_bar_old) << ',' << fmt17(r.f_bar_new) << ',' << fmt17(r.f_acc) << ','
       << fmt17(r.f_acc_old) << ',' << r.i_zeta << ',' << r.f_evals << ',' << r.deriv_evals << ','
       << r.deriv_rounds << ',' << (r.step1_skipped ? 1 : 0) << ',' << r.step2_tightenings << ','
       << (r.step_fallback ? 1 : 0) << ',' << detail::fmt_vector(r.x) << ','
       << detail::fmt_vector(r.s) << '\n';
  }
}

inline std::vector<IterationRecord> read_history_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("history csv: missing header");
  {
    std::ostringstream expect;
    const auto& cols = history_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) expect << (i ? "," : "") << cols[i];
    if (line != expect.str()) throw std::runtime_error("history csv: unexpected header");
  }
  std::vector<IterationRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != history_columns().size()) {
      throw std::runtime_error("history csv: line " + std::to_string(lineno) + " has " +
                               std::to_string(f.size()) + " fields");
    }
    IterationRecord r;
    try {
      r.k = std::stol(f[0]);
      r.Delta = std::stod(f[1]);
      r.delta = std::stod(f[2]);
      r.j = std::stoi(f[3]);
      r.rho = std::stod(f[4]);
      r.successful = f[5] == "1";
      r.dT_s = std::stod(f[6]);
      r.f_bar_old = std::stod(f[7]);
      r.f_bar_new = std::stod(f[8]);
      r.f_acc = std::stod(f[9]);
      r.f_acc_old = std::stod(f[10]);
      r.i_zeta = std::stoi(f[11]);
      r.f_evals = std::stol(f[12]);
      r.deriv_evals = std::stol(f[13]);
      r.deriv_rounds = std::stol(f[14]);
      r.step1_skipped = f[15] == "1";
      r.step2_tightenings = std::stoi(f[16]);
      r.step_fallback = f[17] == "1";
      r.x = detail::parse_vector(f[18]);
      r.s = detail::parse_vector(f[19]);
    } catch (const std::logic_error&) {
      throw std::runtime_error("history csv: bad value on line " + std::to_string(lineno));
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline bool operator==(const IterationRecord& a, const IterationRecord& b) {
  return a.k == b.k && a.Delta == b.Delta && a.delta == b.delta && a.j == b.j && a.rho == b.rho &&
         a.successful == b.successful && a.dT_s == b.dT_s && a.f_bar_old == b.f_bar_old &&
         a.f_bar_new == b.f_bar_new && a.f_acc == b.f_acc && a.f_acc_old == b.f_acc_old &&
         a.i_zeta == b.i_zeta && a.f_evals == b.f_evals && a.deriv_evals == b.deriv_evals &&
         a.deriv_rounds == b.deriv_rounds && a.step1_skipped == b.step1_skipped &&
         a.step2_tightenings == b.step2_tightenings && a.step_fallback == b.step_fallback &&
         a.x.size() == b.x.size() && a.x == b.x && a.s.size() == b.s.size() && a.s == b.s;
}

}  // namespace trqda

#endif  // TRQDA_HISTORY_IO_HPP
