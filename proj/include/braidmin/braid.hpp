#pragma once

#include <string>
#include <vector>

namespace braidmin {

/// Word in the Artin generators of B_n. Letter +i is sigma_i, -i its inverse.
/// Always freely reduced.
class BraidWord {
 public:
  BraidWord() = default;
  BraidWord(int strands, std::vector<int> letters);

  /// Accepts "s1 s2 s3^-1" or "1 2 -3"; the empty string is the trivial word.
  static BraidWord parse(int strands, const std::string& text);

  int strands() const { return strands_; }
  const std::vector<int>& letters() const { return letters_; }
  bool empty() const { return letters_.empty(); }
  std::string to_string() const;

  BraidWord inverse() const;
  BraidWord operator*(const BraidWord& rhs) const;

  friend bool operator==(const BraidWord&, const BraidWord&) = default;

 private:
  int strands_ = 0;
  std::vector<int> letters_;
};

/// Equality up to cyclic rotation after cyclic free reduction.
bool cyclically_equal(const BraidWord& a, const BraidWord& b);

}  // namespace braidmin
