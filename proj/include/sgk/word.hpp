#pragma once

#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgk {

/// Finite address over the alphabet {0, ..., d-1}. Names both the cell
/// F_w K = F_{w_1} o ... o F_{w_m} (K) and the symbolic cylinder [w].
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> syms) : syms_(syms.begin(), syms.end()) {}
  explicit Word(std::vector<int> syms) : syms_(std::move(syms)) {}

  static Word constant(int symbol, int length) {
    return Word(std::vector<int>(static_cast<std::size_t>(length), symbol));
  }

  /// Parses "012" for alphabets with d <= 10, "0,1,11" otherwise.
  static Word parse(const std::string& text, int d) {
    std::vector<int> syms;
    if (d <= 10) {
      for (char c : text) {
        if (c < '0' || c > '9')
          throw std::invalid_argument("Word: bad digit '" + std::string(1, c) + "'");
        syms.push_back(c - '0');
      }
    } else if (!text.empty()) {
      std::stringstream ss(text);
      std::string tok;
      while (std::getline(ss, tok, ',')) syms.push_back(std::stoi(tok));
    }
    Word w(std::move(syms));
    w.validate(d);
    return w;
  }

  void validate(int d) const {
    for (int s : syms_)
      if (s < 0 || s >= d)
        throw std::domain_error("Word: symbol " + std::to_string(s) +
                                " out of range for d=" + std::to_string(d));
  }

  int size() const { return static_cast<int>(syms_.size()); }
  bool empty() const { return syms_.empty(); }
  int operator[](int i) const { return syms_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& symbols() const { return syms_; }

  Word prefix(int n) const {
    if (n < 0 || n > size()) throw std::out_of_range("Word::prefix: bad length");
    return Word(std::vector<int>(syms_.begin(), syms_.begin() + n));
  }

  bool is_constant() const {
    for (int s : syms_)
      if (s != syms_.front()) return false;
    return true;
  }

  /// Concatenation: (a * b) names the cell F_a o F_b (K); a acts first.
  friend Word operator*(const Word& a, const Word& b) {
    std::vector<int> syms = a.syms_;
    syms.insert(syms.end(), b.syms_.begin(), b.syms_.end());
    return Word(std::move(syms));
  }

  Word& append(int symbol) { syms_.push_back(symbol); return *this; }

  friend Word prepend(int symbol, const Word& w) {
    std::vector<int> syms;
    syms.reserve(w.syms_.size() + 1);
    syms.push_back(symbol);
    syms.insert(syms.end(), w.syms_.begin(), w.syms_.end());
    return Word(std::move(syms));
  }

  friend bool operator==(const Word& a, const Word& b) { return a.syms_ == b.syms_; }
  friend bool operator!=(const Word& a, const Word& b) { return !(a == b); }

  std::string str() const {
    std::string out;
    bool wide = false;
    for (int s : syms_) wide = wide || s > 9;
    for (std::size_t i = 0; i < syms_.size(); ++i) {
      if (wide && i) out += ',';
      out += std::to_string(syms_[i]);
    }
    return out;
  }

  /// Lexicographic cell index among all words of the same length.
  std::size_t lex_index(int d) const {
    std::size_t idx = 0;
    for (int s : syms_) idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(s);
    return idx;
  }

 private:
  std::vector<int> syms_;
};

}  // namespace sgk
