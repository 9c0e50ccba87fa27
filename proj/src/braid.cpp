#include "braidmin/braid.hpp"

#include <algorithm>
#include <sstream>

#include "braidmin/track.hpp"

namespace braidmin {

namespace {

std::vector<int> reduce(const std::vector<int>& w) {
  std::vector<int> out;
  for (int x : w) {
    if (!out.empty() && out.back() == -x) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

std::vector<int> cyclic_reduce(std::vector<int> w) {
  w = reduce(w);
  std::size_t lo = 0;
  std::size_t hi = w.size();
  while (hi - lo >= 2 && w[lo] == -w[hi - 1]) {
    ++lo;
    --hi;
  }
  return {w.begin() + lo, w.begin() + hi};
}

}  // namespace

BraidWord::BraidWord(int strands, std::vector<int> letters) : strands_(strands) {
  if (strands < 1) throw DomainError("braid needs at least one strand");
  for (int x : letters)
    if (x == 0 || std::abs(x) >= strands)
      throw DomainError("generator " + std::to_string(x) + " out of range for " + std::to_string(strands) +
                        " strands");
  letters_ = reduce(letters);
}

BraidWord BraidWord::parse(int strands, const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  std::vector<int> letters;
  while (is >> tok) {
    std::string t = tok;
    int sign = 1;
    if (!t.empty() && (t[0] == 's' || t[0] == 'S')) {
      if (t[0] == 'S') sign = -1;
      t = t.substr(1);
      const auto caret = t.find('^');
      if (caret != std::string::npos) {
        const std::string e = t.substr(caret + 1);
        if (e == "-1") {
          sign = -sign;
        } else if (e != "1") {
          throw DomainError("bad braid letter '" + tok + "'");
        }
        t = t.substr(0, caret);
      }
    }
    try {
      std::size_t used = 0;
      const int v = std::stoi(t, &used);
      if (used != t.size()) throw DomainError("bad braid letter '" + tok + "'");
      letters.push_back(sign * v);
    } catch (const std::logic_error&) {
      throw DomainError("bad braid letter '" + tok + "'");
    }
  }
  return BraidWord(strands, std::move(letters));
}

std::string BraidWord::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) os << ' ';
    os << 's' << std::abs(letters_[i]);
    if (letters_[i] < 0) os << "^-1";
  }
  return os.str();
}

BraidWord BraidWord::inverse() const {
  std::vector<int> w(letters_.rbegin(), letters_.rend());
  for (auto& x : w) x = -x;
  return BraidWord(strands_, std::move(w));
}

BraidWord BraidWord::operator*(const BraidWord& rhs) const {
  if (strands_ != rhs.strands_ && !empty() && !rhs.empty()) throw DomainError("braid strand counts differ");
  std::vector<int> w = letters_;
  w.insert(w.end(), rhs.letters_.begin(), rhs.letters_.end());
  return BraidWord(std::max(strands_, rhs.strands_), std::move(w));
}

bool cyclically_equal(const BraidWord& a, const BraidWord& b) {
  const auto x = cyclic_reduce(a.letters());
  const auto y = cyclic_reduce(b.letters());
  if (x.size() != y.size()) return false;
  if (x.empty()) return true;
  std::vector<int> doubled = x;
  doubled.insert(doubled.end(), x.begin(), x.end());
  return std::search(doubled.begin(), doubled.end(), y.begin(), y.end()) != doubled.end();
}

}  // namespace braidmin
