#include "renorm/wick.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace renorm::wick {
namespace {

using nlohmann::json;

void mono_set(Monomial& m, int point, int exp) {
  if (exp != 0) m[point] = exp;
}

// All componentwise splits s of a monomial with 0 <= s_i <= a_i, together
// with the product of binomials C(a_i, s_i). Visits the splits in a fixed
// order so every caller is deterministic.
template <class F>
void for_each_split(const Monomial& m, F&& visit) {
  std::vector<std::pair<int, int>> entries(m.begin(), m.end());
  std::vector<int> pick(entries.size(), 0);
  for (;;) {
    Monomial left, right;
    Rational coef = 1;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      auto [pt, a] = entries[i];
      int s = pick[i];
      mono_set(left, pt, s);
      mono_set(right, pt, a - s);
      coef *= Rational(binomial(a, s));
    }
    visit(left, right, coef);
    std::size_t i = 0;
    for (; i < entries.size(); ++i) {
      if (pick[i] < entries[i].second) {
        ++pick[i];
        break;
      }
      pick[i] = 0;
    }
    if (i == entries.size()) break;
  }
}

// Nonnegative matrices with prescribed row and column sums, visited in
// lexicographic row-major order. Used both for the contraction pairing of
// two monomials and (with symmetry) for the vacuum graph expansion.
void visit_matrices(std::vector<std::vector<int>>& m, std::size_t r, std::size_t c,
                    std::vector<int>& row_left, std::vector<int>& col_left,
                    const std::function<void(const std::vector<std::vector<int>>&)>& visit) {
  std::size_t rows = row_left.size(), cols = col_left.size();
  if (r == rows) {
    for (int v : col_left)
      if (v != 0) return;
    visit(m);
    return;
  }
  if (c == cols) {
    if (row_left[r] != 0) return;
    visit_matrices(m, r + 1, 0, row_left, col_left, visit);
    return;
  }
  int hi = std::min(row_left[r], col_left[c]);
  for (int v = 0; v <= hi; ++v) {
    m[r][c] = v;
    row_left[r] -= v;
    col_left[c] -= v;
    visit_matrices(m, r, c + 1, row_left, col_left, visit);
    row_left[r] += v;
    col_left[c] += v;
  }
  m[r][c] = 0;
}

}  // namespace

int mono_degree(const Monomial& m) {
  int d = 0;
  for (auto& [pt, e] : m) d += e;
  return d;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  for (auto& [pt, e] : b) r[pt] += e;
  return r;
}

bool points_disjoint(const Monomial& a, const Monomial& b) {
  for (auto& [pt, e] : a)
    if (b.count(pt)) return false;
  return true;
}

void amp_accumulate(Amplitude& into, const Amplitude& add, const Rational& scale) {
  if (scale == 0) return;
  for (auto& [props, coef] : add) {
    Rational& slot = into[props];
    slot += coef * scale;
    if (slot == 0) into.erase(props);
  }
}

Amplitude amp_mul(const Amplitude& a, const Amplitude& b) {
  Amplitude out;
  for (auto& [pa, ca] : a) {
    for (auto& [pb, cb] : b) {
      PropProduct p = pa;
      for (auto& [pair, pow] : pb) p[pair] += pow;
      Rational& slot = out[p];
      slot += ca * cb;
      if (slot == 0) out.erase(p);
    }
  }
  return out;
}

PropProduct props_canon_symmetric(const PropProduct& p) {
  PropProduct out;
  for (auto& [pair, pow] : p) {
    auto key = pair.first <= pair.second ? pair : std::make_pair(pair.second, pair.first);
    out[key] += pow;
  }
  return out;
}

Amplitude amp_canon_symmetric(const Amplitude& a) {
  Amplitude out;
  for (auto& [props, coef] : a) {
    Rational& slot = out[props_canon_symmetric(props)];
    slot += coef;
    if (slot == 0) out.erase(props_canon_symmetric(props));
  }
  return out;
}

bool amp_equal_symmetric(const Amplitude& a, const Amplitude& b) {
  return amp_canon_symmetric(a) == amp_canon_symmetric(b);
}

TensorSum coproduct(const Monomial& m) {
  TensorSum out;
  for_each_split(m, [&](const Monomial& l, const Monomial& r, const Rational& c) {
    out.push_back({l, r, c});
  });
  return out;
}

Rational counit(const Monomial& m) { return m.empty() ? 1 : 0; }

Amplitude counit(const FieldPoly& p) {
  auto it = p.find(Monomial{});
  return it == p.end() ? Amplitude{} : it->second;
}

Amplitude laplace(const Monomial& a, const Monomial& b) {
  if (!points_disjoint(a, b))
    throw std::invalid_argument("laplace: point sets overlap");
  Amplitude out;
  if (mono_degree(a) != mono_degree(b)) return out;  // no complete contraction
  if (a.empty()) {
    out[PropProduct{}] = 1;  // (1|1) = 1
    return out;
  }
  std::vector<int> apts, arow, bpts, bcol;
  for (auto& [pt, e] : a) apts.push_back(pt), arow.push_back(e);
  for (auto& [pt, e] : b) bpts.push_back(pt), bcol.push_back(e);

  // (A|B) = sum over matrices m_ij with row sums a_i, column sums b_j of
  //   prod a_i! prod b_j! / prod m_ij!  *  prod D(x_i, y_j)^{m_ij}.
  // This is the closed form of the recursion (AB|C) = (A|C(1))(B|C(2)):
  // m_ij counts contractions between point x_i and point y_j, a_i! b_j!
  // counts orderings and 1/m_ij! removes the double counting within a pair
  // block. It reduces to (phi^k|phi^l) = delta_{kl} k! D^k for one point on
  // each side.
  Rational base = 1;
  for (int e : arow) base *= Rational(factorial(e));
  for (int e : bcol) base *= Rational(factorial(e));

  std::vector<std::vector<int>> m(apts.size(), std::vector<int>(bpts.size(), 0));
  visit_matrices(m, 0, 0, arow, bcol, [&](const std::vector<std::vector<int>>& mm) {
    PropProduct props;
    Rational coef = base;
    for (std::size_t i = 0; i < apts.size(); ++i) {
      for (std::size_t j = 0; j < bpts.size(); ++j) {
        int k = mm[i][j];
        if (k == 0) continue;
        props[{apts[i], bpts[j]}] += k;
        coef /= Rational(factorial(k));
      }
    }
    Rational& slot = out[props];
    slot += coef;
    if (slot == 0) out.erase(props);
  });
  return out;
}

Amplitude laplace(const FieldPoly& a, const FieldPoly& b) {
  Amplitude out;
  for (auto& [ma, ca] : a)
    for (auto& [mb, cb] : b)
      amp_accumulate(out, amp_mul(amp_mul(ca, cb), laplace(ma, mb)));
  return out;
}

FieldPoly star(const FieldPoly& a, const FieldPoly& b) {
  FieldPoly out;
  for (auto& [ma, ca] : a) {
    for (auto& [mb, cb] : b) {
      if (!points_disjoint(ma, mb))
        throw std::invalid_argument("star: factors share a point");
      Amplitude cc = amp_mul(ca, cb);
      for_each_split(ma, [&](const Monomial& sa, const Monomial& ra, const Rational& wa) {
        for_each_split(mb, [&](const Monomial& sb, const Monomial& rb, const Rational& wb) {
          Amplitude coupled = laplace(sa, sb);
          if (coupled.empty()) return;
          Amplitude term = amp_mul(cc, coupled);
          Monomial rest = mono_mul(ra, rb);
          amp_accumulate(out[rest], term, wa * wb);
          if (out[rest].empty()) out.erase(rest);
        });
      });
    }
  }
  return out;
}

FieldPoly poly_one() {
  FieldPoly p;
  p[Monomial{}][PropProduct{}] = 1;
  return p;
}

FieldPoly poly_power(int point, int power) {
  FieldPoly p;
  Monomial m;
  mono_set(m, point, power);
  p[m][PropProduct{}] = 1;
  return p;
}

FieldPoly star_chain(const std::vector<int>& powers) {
  FieldPoly acc = poly_one();
  for (std::size_t i = 0; i < powers.size(); ++i)
    acc = star(acc, poly_power(static_cast<int>(i) + 1, powers[i]));
  return acc;
}

Amplitude vev_star(const std::vector<int>& powers) {
  return amp_canon_symmetric(counit(star_chain(powers)));
}

std::vector<GraphMatrix> enumerate_graphs(const std::vector<int>& powers) {
  int n = static_cast<int>(powers.size());
  std::vector<GraphMatrix> out;
  GraphMatrix g;
  g.n = n;
  g.m.assign(n, std::vector<int>(n, 0));
  std::vector<int> left = powers;

  // Fill the upper triangle row by row; entry (i,j) also commits (j,i).
  std::function<void(int, int)> rec = [&](int i, int j) {
    if (i == n) {
      out.push_back(g);
      return;
    }
    if (j == n) {
      if (left[i] != 0) return;
      rec(i + 1, i + 2);
      return;
    }
    int hi = std::min(left[i], left[j]);
    for (int v = 0; v <= hi; ++v) {
      g.m[i][j] = g.m[j][i] = v;
      left[i] -= v;
      left[j] -= v;
      rec(i, j + 1);
      left[i] += v;
      left[j] += v;
    }
    g.m[i][j] = g.m[j][i] = 0;
  };
  if (n == 0) return out;
  rec(0, 1);
  return out;
}

Amplitude vev_graphs(const std::vector<int>& powers) {
  Amplitude out;
  Rational base = 1;
  for (int p : powers) base *= Rational(factorial(p));
  for (const auto& g : enumerate_graphs(powers)) {
    PropProduct props;
    Rational coef = base;
    for (int i = 0; i < g.n; ++i) {
      for (int j = i + 1; j < g.n; ++j) {
        int k = g.m[i][j];
        if (k == 0) continue;
        props[{i + 1, j + 1}] = k;
        coef /= Rational(factorial(k));
      }
    }
    Rational& slot = out[props];
    slot += coef;
    if (slot == 0) out.erase(props);
  }
  return out;
}

Amplitude vev_pairings(const std::vector<int>& powers) {
  // Literal Wick enumeration: list every field slot, then every perfect
  // matching that never pairs two slots at the same point, one D(i,j) per
  // matched pair. Exponential, but it is the ground truth the two clever
  // routes are checked against.
  std::vector<int> slot_point;
  for (std::size_t i = 0; i < powers.size(); ++i)
    for (int k = 0; k < powers[i]; ++k) slot_point.push_back(static_cast<int>(i) + 1);

  Amplitude out;
  std::size_t total = slot_point.size();
  if (total % 2 != 0) return out;
  std::vector<bool> used(total, false);
  PropProduct props;

  std::function<void(std::size_t)> rec = [&](std::size_t done) {
    if (done == total) {
      Rational& slot = out[props];
      slot += 1;
      return;
    }
    std::size_t first = 0;
    while (used[first]) ++first;
    used[first] = true;
    for (std::size_t j = first + 1; j < total; ++j) {
      if (used[j] || slot_point[j] == slot_point[first]) continue;
      used[j] = true;
      auto key = std::make_pair(slot_point[first], slot_point[j]);
      ++props[key];
      rec(done + 2);
      if (--props[key] == 0) props.erase(key);
      used[j] = false;
    }
    used[first] = false;
  };
  rec(0);
  return out;
}

double eval_amplitude(
    const Amplitude& amp, const std::vector<std::vector<double>>& points,
    const std::function<double(const std::vector<double>&, const std::vector<double>&)>& prop) {
  double total = 0;
  for (auto& [props, coef] : amp) {
    double term = static_cast<double>(coef);
    for (auto& [pair, pow] : props) {
      auto [i, j] = pair;
      if (i < 1 || j < 1 || static_cast<std::size_t>(i) > points.size() ||
          static_cast<std::size_t>(j) > points.size())
        throw std::invalid_argument("eval_amplitude: point label out of range");
      if (points[i - 1] == points[j - 1])
        throw std::domain_error("eval_amplitude: contracted points coincide");
      double v = prop(points[i - 1], points[j - 1]);
      for (int k = 0; k < pow; ++k) term *= v;
    }
    total += term;
  }
  return total;
}

std::string amp_to_string(const Amplitude& amp) {
  if (amp.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto& [props, coef] : amp) {
    if (!first) out += " + ";
    first = false;
    out += rational_to_string(coef);
    for (auto& [pair, pow] : props) {
      out += "*D(" + std::to_string(pair.first) + "," + std::to_string(pair.second) + ")";
      if (pow > 1) out += "^" + std::to_string(pow);
    }
  }
  return out;
}

std::string poly_to_json(const FieldPoly& p) {
  json terms = json::array();
  for (auto& [mono, amp] : p) {
    json jm = json::object();
    for (auto& [pt, e] : mono) jm[std::to_string(pt)] = e;
    json jamp = json::array();
    for (auto& [props, coef] : amp) {
      json jprops = json::array();
      for (auto& [pair, pow] : props)
        for (int k = 0; k < pow; ++k) jprops.push_back({pair.first, pair.second});
      jamp.push_back({{"props", jprops}, {"coef", rational_to_string(coef)}});
    }
    terms.push_back({{"monomial", jm}, {"amp", jamp}});
  }
  return json{{"terms", terms}}.dump();
}

FieldPoly poly_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    FieldPoly out;
    for (auto& t : j.at("terms")) {
      Monomial mono;
      for (auto& [k, v] : t.at("monomial").items())
        mono_set(mono, std::stoi(k), v.get<int>());
      Amplitude amp;
      for (auto& a : t.at("amp")) {
        PropProduct props;
        for (auto& pr : a.at("props"))
          ++props[{pr.at(0).get<int>(), pr.at(1).get<int>()}];
        Rational& slot = amp[props];
        slot += rational_from_string(a.at("coef").get<std::string>());
        if (slot == 0) amp.erase(props);
      }
      out[mono] = std::move(amp);
    }
    return out;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad polynomial JSON: ") + e.what());
  }
}

}  // namespace renorm::wick
