#ifndef ASEP_EXPRESSION_HPP
#define ASEP_EXPRESSION_HPP

#include <memory>
#include <span>
#include <string>

namespace asep {

// Closed expression set for initial and boundary profiles, so runs are fully
// described by their config text. Grammar:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := NUMBER | '-' factor | '(' expr ')'
//           | u(i) | cos(k,i) | sin(k,i) | sinp(k,i)
//
// with u(i) the i-th macroscopic coordinate (1-based), cos(k,i) standing for
// cos(k*pi*u_i), sin(k,i) for sin(k*pi*u_i) and sinp(k,i) for
// sin(k*pi*(u_i+1)), which vanishes on both axis-1 faces for integer k.
class Expression {
 public:
  Expression() = default;

  // Throws std::invalid_argument with position information on parse errors
  // or axis references beyond dim.
  static Expression parse(const std::string& text, int dim);

  double eval(std::span<const double> u) const;
  const std::string& source() const { return source_; }
  bool empty() const { return !root_; }

 private:
  struct Node;
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace asep

#endif
