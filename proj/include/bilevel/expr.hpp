// Copyright 2026 The Bilevel Reformulation Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Polynomial expressions over named variable blocks.
//
// An Expr is an immutable DAG of constant, variable, sum, product, integer
// power and negation nodes. Variables are addressed by (block name, index)
// and resolved against a VarSpace at evaluation time, so the same expression
// can be evaluated in any space that contains the blocks it references.
// Derivatives are obtained by symbolic rewriting; CompiledExpr flattens an
// expression into a postfix program for hot evaluation loops.

#ifndef BILEVEL_EXPR_HPP_
#define BILEVEL_EXPR_HPP_

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bilevel {

class VarSpace {
 public:
  struct Block {
    std::string name;
    int dim = 0;
    int offset = 0;
  };

  VarSpace() = default;
  // Blocks must have unique names and positive dimensions.
  explicit VarSpace(const std::vector<std::pair<std::string, int>>& blocks);

  // Same as the constructor but silently drops blocks of dimension zero.
  static VarSpace from_nonempty(
      const std::vector<std::pair<std::string, int>>& blocks);

  int total_dim() const;
  const std::vector<Block>& blocks() const;
  bool has(std::string_view name) const;
  // Throws InputError for unknown blocks.
  const Block& block(std::string_view name) const;
  int offset(std::string_view name) const { return block(name).offset; }
  int dim(std::string_view name) const { return block(name).dim; }
  // Flat index of (name, index); throws InputError when out of range.
  int flat_index(std::string_view name, int index) const;
  std::string describe() const;

  bool operator==(const VarSpace& other) const;
  bool operator!=(const VarSpace& other) const { return !(*this == other); }

 private:
  std::shared_ptr<const std::vector<Block>> blocks_;
};

struct Point {
  VarSpace space;
  Eigen::VectorXd values;

  Point() = default;
  Point(VarSpace s, Eigen::VectorXd v);
  static Point zeros(const VarSpace& s);

  Eigen::VectorXd block(std::string_view name) const;
  void set_block(std::string_view name, const Eigen::VectorXd& v);
  double& at(std::string_view name, int index);
  double at(std::string_view name, int index) const;
};

class Expr {
 public:
  enum class Kind { kConstant, kVar, kAdd, kMul, kPow, kNeg };

  Expr();  // constant zero

  static Expr constant(double value);
  static Expr var(std::string block, int index);
  // Folding builders: merge constants, flatten nested sums/products, drop
  // neutral elements.
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(Expr base, int exponent);
  static Expr negate(Expr child);
  // Non-folding builders, used by the parser to keep the input structure.
  static Expr raw(Kind kind, std::vector<Expr> children, int exponent = 0);

  Kind kind() const;
  double value() const;               // kConstant
  const std::string& block() const;   // kVar
  int index() const;                  // kVar
  int exponent() const;               // kPow
  const std::vector<Expr>& children() const;

  bool is_constant() const { return kind() == Kind::kConstant; }
  bool is_constant(double v) const {
    return is_constant() && value() == v;
  }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr operator+(const Expr& a, double b);
  friend Expr operator-(const Expr& a, double b);
  friend Expr operator*(double a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& base, int exponent);

// Sum_i coeffs[i] * terms[i], folded.
Expr dot(const std::vector<Expr>& coeffs, const std::vector<Expr>& terms);

// Variables of a block as expressions: [var(block,0), ..., var(block,dim-1)].
std::vector<Expr> block_vars(std::string_view block, int dim);

double eval(const Expr& e, const Point& pt);

// Symbolic partial derivative with respect to var(block, index).
Expr diff(const Expr& e, std::string_view block, int index);
std::vector<Expr> grad_exprs(const Expr& e, std::string_view block, int dim);

// d e / d(block) at pt. Throws InputError for unknown blocks.
Eigen::VectorXd grad(const Expr& e, std::string_view block, const Point& pt);
// Matrix of d^2 e / d(blockA)_i d(blockB)_j at pt.
Eigen::MatrixXd hessian(const Expr& e, std::string_view block_a,
                        std::string_view block_b, const Point& pt);

// Replaces var(block, i) by replacement[i].
Expr substitute(const Expr& e, std::string_view block,
                const std::vector<Expr>& replacement);
// Replaces var(block, i) by the constant values[i].
Expr bind(const Expr& e, std::string_view block, const Eigen::VectorXd& values);
Expr rename_block(const Expr& e, std::string_view from, std::string to);
// Re-applies the folding rules to a raw tree.
Expr simplify(const Expr& e);

// Upper bound on the polynomial degree of e in the variables of block.
int degree(const Expr& e, std::string_view block);
bool depends_on(const Expr& e, std::string_view block);
std::set<std::string> blocks_used(const Expr& e);

// Canonical prefix s-expression.
std::string print(const Expr& e);
// Parses the s-expression grammar
//   (const c) | (var name i) | (+ e...) | (* e...) | (neg e) | (pow e k)
// validating every var reference against space.
Expr parse(std::string_view text, const VarSpace& space);

// Postfix program with block references resolved to flat indices.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const VarSpace& space);

  double operator()(std::span<const double> x) const;
  double operator()(const Eigen::VectorXd& x) const {
    return (*this)(std::span<const double>(x.data(), x.size()));
  }
  // Largest flat index referenced, -1 for constant programs.
  int max_index() const { return max_index_; }
  std::vector<int> indices() const;

 private:
  enum class Op : unsigned char { kConst, kVar, kAdd, kMul, kPow, kNeg };
  struct Instr {
    Op op;
    int arg;       // flat index, child count or exponent
    double value;  // kConst
  };
  std::vector<Instr> program_;
  int max_depth_ = 0;
  int max_index_ = -1;
};

}  // namespace bilevel

#endif  // BILEVEL_EXPR_HPP_
