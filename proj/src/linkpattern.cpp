/**
 * @file linkpattern.cpp
 * @brief Enumeration, validation, and the serialization grammar for link patterns.
 */
#include "radsle/linkpattern.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace radsle {

namespace {

/// All noncrossing partial matchings of 1..n with exactly m links.
void enumerate_matchings(int n, int m, std::vector<std::vector<std::pair<int, int>>>& out) {
  std::vector<std::pair<int, int>> cur;
  std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
  // Recursive scan: either leave the first free point as a ray, or match it to a
  // later free point j such that the stretch (first, j) can be handled
  // independently (noncrossing condition).
  struct Rec {
    int n, m;
    std::vector<std::pair<int, int>>& cur;
    std::vector<char>& used;
    std::vector<std::vector<std::pair<int, int>>>& out;
    void go(int next) {
      if (static_cast<int>(cur.size()) == m) {
        // remaining points all become rays
        out.push_back(cur);
        return;
      }
      if (next > n) return;
      int remaining = 0;
      for (int k = next; k <= n; ++k)
        if (!used[static_cast<std::size_t>(k)]) ++remaining;
      if (remaining < 2 * (m - static_cast<int>(cur.size()))) return;
      // find first free point
      int i = next;
      while (i <= n && used[static_cast<std::size_t>(i)]) ++i;
      if (i > n) return;
      // option 1: i is a ray
      used[static_cast<std::size_t>(i)] = 1;
      go(i + 1);
      used[static_cast<std::size_t>(i)] = 0;
      // option 2: link (i, j); every link added earlier has its first endpoint
      // below i, so the only possible crossing is an earlier link (a, b) with
      // a < i < b < j.  Capping j below the tightest such b keeps the matching
      // noncrossing, and by induction the whole set stays pairwise compatible.
      int j_max = n;
      for (const auto& [a, b] : cur)
        if (a < i && i < b && b - 1 < j_max) j_max = b - 1;
      for (int j = i + 1; j <= j_max; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = 1;
        cur.emplace_back(i, j);
        go(i + 1);
        cur.pop_back();
        used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = 0;
      }
    }
  } rec{n, m, cur, used, out};
  rec.go(1);
}

std::vector<int> rays_of(int n, const std::vector<std::pair<int, int>>& links) {
  std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [i, j] : links) used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = 1;
  std::vector<int> rays;
  for (int k = 1; k <= n; ++k)
    if (!used[static_cast<std::size_t>(k)]) rays.push_back(k);
  return rays;
}

} // namespace

void LinkPattern::validate() const {
  if (n < 1) throw std::domain_error("link pattern: n must be >= 1");
  const int m = num_links();
  if (2 * m > n) throw std::domain_error("link pattern: 2m > n (too many links)");
  std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [i, j] : links) {
    if (i < 1 || j > n || i >= j)
      throw std::domain_error("link pattern: link endpoints must satisfy 1 <= i < j <= n");
    if (used[static_cast<std::size_t>(i)] || used[static_cast<std::size_t>(j)])
      throw std::domain_error("link pattern: repeated endpoint");
    used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = 1;
  }
  for (std::size_t p = 0; p < links.size(); ++p)
    for (std::size_t q = p + 1; q < links.size(); ++q) {
      const auto [a, b] = links[p];
      const auto [c, d] = links[q];
      const bool crossing = (a < c && c < b && b < d) || (c < a && a < d && d < b);
      if (crossing) throw std::domain_error("link pattern: crossing links");
    }
  std::vector<int> expect = rays_of(n, links);
  if (rays != expect) throw std::domain_error("link pattern: rays must list exactly the unmatched points ascending");
  if (face_link < -1 || face_link >= m) throw std::domain_error("link pattern: face_link out of range");
  if (kind == PatternKind::Chordal && face_link != -1)
    throw std::domain_error("link pattern: chordal patterns have no puncture face");
  for (int k : rays) {
    const int enc = enclosing_link(k);
    if (kind == PatternKind::Chordal) {
      if (enc != -1) throw std::domain_error("link pattern: chordal ray enclosed by a link");
    } else if (enc != face_link) {
      throw std::domain_error("link pattern: ray cannot reach the puncture face");
    }
  }
  // links sorted by first endpoint (canonical form)
  for (std::size_t p = 1; p < links.size(); ++p)
    if (links[p - 1].first > links[p].first)
      throw std::domain_error("link pattern: links must be sorted by first endpoint");
}

int LinkPattern::enclosing_link(int point) const {
  int best = -1;
  int best_width = 0;
  for (std::size_t idx = 0; idx < links.size(); ++idx) {
    const auto [i, j] = links[idx];
    if (i < point && point < j) {
      const int w = j - i;
      if (best == -1 || w < best_width) {
        best = static_cast<int>(idx);
        best_width = w;
      }
    }
  }
  return best;
}

bool LinkPattern::link_wraps(int link_index) const {
  if (face_link == -1) return false;
  const auto [fi, fj] = links[static_cast<std::size_t>(face_link)];
  const auto [i, j] = links[static_cast<std::size_t>(link_index)];
  return i <= fi && fj <= j;
}

std::string LinkPattern::to_string() const {
  std::ostringstream os;
  for (const auto& [i, j] : links) os << '(' << i << ' ' << j << ')';
  os << "|rays:";
  if (rays.empty()) {
    os << "∅";
  } else {
    for (std::size_t k = 0; k < rays.size(); ++k) {
      if (k) os << ',';
      os << rays[k];
    }
  }
  os << "|winding:";
  if (face_link == -1) {
    os << '+';
  } else {
    const auto [i, j] = links[static_cast<std::size_t>(face_link)];
    os << '(' << i << ' ' << j << ')';
  }
  return os.str();
}

LinkPattern LinkPattern::parse(PatternKind kind, int n, const std::string& text) {
  LinkPattern p;
  p.kind = kind;
  p.n = n;
  const auto bar1 = text.find('|');
  const auto bar2 = text.find('|', bar1 == std::string::npos ? 0 : bar1 + 1);
  if (bar1 == std::string::npos || bar2 == std::string::npos)
    throw std::domain_error("link pattern parse: expected two '|' separators");
  const std::string links_part = text.substr(0, bar1);
  const std::string rays_part = text.substr(bar1 + 1, bar2 - bar1 - 1);
  const std::string wind_part = text.substr(bar2 + 1);

  auto parse_pair = [](const std::string& s, std::size_t& pos) {
    if (s[pos] != '(') throw std::domain_error("link pattern parse: expected '('");
    const auto close = s.find(')', pos);
    if (close == std::string::npos) throw std::domain_error("link pattern parse: unbalanced '('");
    std::istringstream is(s.substr(pos + 1, close - pos - 1));
    int i = 0, j = 0;
    if (!(is >> i >> j)) throw std::domain_error("link pattern parse: bad link pair");
    pos = close + 1;
    return std::make_pair(i, j);
  };

  std::size_t pos = 0;
  while (pos < links_part.size()) p.links.push_back(parse_pair(links_part, pos));

  if (rays_part.rfind("rays:", 0) != 0) throw std::domain_error("link pattern parse: expected 'rays:'");
  const std::string rl = rays_part.substr(5);
  if (rl != "∅" && !rl.empty()) {
    std::istringstream is(rl);
    std::string tok;
    while (std::getline(is, tok, ',')) p.rays.push_back(std::stoi(tok));
  }

  if (wind_part.rfind("winding:", 0) != 0) throw std::domain_error("link pattern parse: expected 'winding:'");
  const std::string w = wind_part.substr(8);
  if (w == "+") {
    p.face_link = -1;
  } else {
    std::size_t wp = 0;
    const auto pr = parse_pair(w, wp);
    p.face_link = -1;
    for (std::size_t idx = 0; idx < p.links.size(); ++idx)
      if (p.links[idx] == pr) p.face_link = static_cast<int>(idx);
    if (p.face_link == -1) throw std::domain_error("link pattern parse: winding link not among links");
  }
  p.validate();
  return p;
}

std::vector<LinkPattern> enumerate_radial(int n, int m) {
  if (n < 1) throw std::domain_error("enumerate_radial: n must be >= 1");
  if (m < 0 || 2 * m > n) throw std::domain_error("enumerate_radial: need 0 <= 2m <= n");
  std::vector<std::vector<std::pair<int, int>>> matchings;
  enumerate_matchings(n, m, matchings);
  std::vector<LinkPattern> out;
  for (auto& lk : matchings) {
    std::sort(lk.begin(), lk.end());
    LinkPattern base;
    base.kind = PatternKind::Radial;
    base.n = n;
    base.links = lk;
    base.rays = rays_of(n, lk);
    if (base.rays.empty()) {
      // perfect matching: puncture may sit in the outer face or inside any link
      base.face_link = -1;
      out.push_back(base);
      for (int f = 0; f < m; ++f) {
        base.face_link = f;
        out.push_back(base);
      }
    } else {
      // all rays must share one enclosing link; otherwise no valid face exists
      int enc = base.enclosing_link(base.rays[0]);
      bool ok = true;
      for (int k : base.rays)
        if (base.enclosing_link(k) != enc) {
          ok = false;
          break;
        }
      if (ok) {
        base.face_link = enc;
        out.push_back(base);
      }
    }
  }
  for (const auto& p : out) p.validate();
  return out;
}

std::vector<LinkPattern> enumerate_chordal(int n, int m) {
  if (n < 1) throw std::domain_error("enumerate_chordal: n must be >= 1");
  if (m < 0 || 2 * m > n) throw std::domain_error("enumerate_chordal: need 0 <= 2m <= n");
  std::vector<std::vector<std::pair<int, int>>> matchings;
  enumerate_matchings(n, m, matchings);
  std::vector<LinkPattern> out;
  for (auto& lk : matchings) {
    std::sort(lk.begin(), lk.end());
    LinkPattern p;
    p.kind = PatternKind::Chordal;
    p.n = n;
    p.links = lk;
    p.rays = rays_of(n, lk);
    p.face_link = -1;
    bool ok = true;
    for (int k : p.rays)
      if (p.enclosing_link(k) != -1) {
        ok = false;
        break;
      }
    if (ok) out.push_back(p);
  }
  for (const auto& p : out) p.validate();
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    // multiply first, then divide: r * num is always divisible by i here
    if (r > UINT64_MAX / num) throw std::overflow_error("binomial: 64-bit overflow");
    r = r * num / static_cast<std::uint64_t>(i);
  }
  return r;
}

} // namespace radsle
