#include <cctype>

#include "selfnorm/cli.hpp"
#include "selfnorm/errors.hpp"

namespace selfnorm {

namespace {

class ElementParser {
 public:
  ElementParser(std::string_view text, const GroupContext& ctx) : text_(text), ctx_(ctx) {}

  AlgebraElement run() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty element", pos_);
    std::vector<Term> terms;
    bool first = true;
    while (true) {
      skip_ws();
      int sign = 1;
      bool had_operator = false;
      while (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        if (text_[pos_] == '-') sign = -sign;
        had_operator = true;
        ++pos_;
        skip_ws();
      }
      if (!first && !had_operator) throw ParseError("expected '+' or '-' between terms", pos_);
      if (pos_ == text_.size()) throw ParseError("expected term", pos_);
      terms.push_back(term(sign));
      first = false;
      skip_ws();
      if (pos_ == text_.size()) break;
    }
    return AlgebraElement::from_terms(ctx_, std::move(terms));
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_digit() const { return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])); }

  std::string digits() {
    const std::size_t start = pos_;
    while (at_digit()) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Term term(int sign) {
    Rational coefficient = sign;
    if (at_digit()) {
      std::string num = digits();
      std::string den = "1";
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        if (!at_digit()) throw ParseError("expected denominator", pos_);
        const std::size_t at = pos_;
        den = digits();
        if (den.find_first_not_of('0') == std::string::npos) throw ParseError("zero denominator", at);
      }
      Rational value{mpz_class(num), mpz_class(den)};
      value.canonicalize();
      coefficient *= value;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '*') {
        ++pos_;
        skip_ws();
      } else {
        return {ctx_.identity(), coefficient};
      }
    }
    return {word(), coefficient};
  }

  // A word runs up to whitespace, '+', or a '-' that is not an exponent sign.
  Word word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '+') break;
      if (c == '-' && (pos_ == start || text_[pos_ - 1] != '^')) break;
      ++pos_;
    }
    if (pos_ == start) throw ParseError("expected word", pos_);
    try {
      return ctx_.parse_word(text_.substr(start, pos_ - start));
    } catch (const ParseError& e) {
      throw ParseError(e.message(), start + e.position());
    }
  }

  std::string_view text_;
  const GroupContext& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

AlgebraElement parse_element(std::string_view text, const GroupContext& ctx) {
  std::size_t lead = 0;
  while (lead < text.size() && std::isspace(static_cast<unsigned char>(text[lead]))) ++lead;
  std::size_t tail = text.size();
  while (tail > lead && std::isspace(static_cast<unsigned char>(text[tail - 1]))) --tail;
  if (text.substr(lead, tail - lead) == "0") return AlgebraElement(ctx);
  return ElementParser(text, ctx).run();
}

}  // namespace selfnorm
