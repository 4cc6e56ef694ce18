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

#include "bilevel/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "bilevel/errors.hpp"

namespace bilevel {

// ---------------------------------------------------------------------------
// VarSpace / Point

VarSpace::VarSpace(const std::vector<std::pair<std::string, int>>& blocks) {
  auto list = std::make_shared<std::vector<Block>>();
  int offset = 0;
  for (const auto& [name, dim] : blocks) {
    if (dim <= 0) {
      throw InputError("block '" + name + "' must have positive dimension");
    }
    if (name.empty()) throw InputError("block names must be non-empty");
    for (const Block& b : *list) {
      if (b.name == name) throw InputError("duplicate block '" + name + "'");
    }
    list->push_back(Block{name, dim, offset});
    offset += dim;
  }
  blocks_ = std::move(list);
}

VarSpace VarSpace::from_nonempty(
    const std::vector<std::pair<std::string, int>>& blocks) {
  std::vector<std::pair<std::string, int>> kept;
  for (const auto& b : blocks) {
    if (b.second > 0) kept.push_back(b);
  }
  return VarSpace(kept);
}

int VarSpace::total_dim() const {
  if (!blocks_ || blocks_->empty()) return 0;
  return blocks_->back().offset + blocks_->back().dim;
}

const std::vector<VarSpace::Block>& VarSpace::blocks() const {
  static const std::vector<Block> kEmpty;
  return blocks_ ? *blocks_ : kEmpty;
}

bool VarSpace::has(std::string_view name) const {
  for (const Block& b : blocks()) {
    if (b.name == name) return true;
  }
  return false;
}

const VarSpace::Block& VarSpace::block(std::string_view name) const {
  for (const Block& b : blocks()) {
    if (b.name == name) return b;
  }
  throw InputError("unknown block '" + std::string(name) + "' in space " +
                   describe());
}

int VarSpace::flat_index(std::string_view name, int index) const {
  const Block& b = block(name);
  if (index < 0 || index >= b.dim) {
    throw InputError("index " + std::to_string(index) + " out of range for block '" +
                     b.name + "' of dimension " + std::to_string(b.dim));
  }
  return b.offset + index;
}

std::string VarSpace::describe() const {
  std::string out = "(";
  bool first = true;
  for (const Block& b : blocks()) {
    if (!first) out += ", ";
    first = false;
    out += b.name + ":" + std::to_string(b.dim);
  }
  return out + ")";
}

bool VarSpace::operator==(const VarSpace& other) const {
  const auto& a = blocks();
  const auto& b = other.blocks();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].dim != b[i].dim) return false;
  }
  return true;
}

Point::Point(VarSpace s, Eigen::VectorXd v)
    : space(std::move(s)), values(std::move(v)) {
  if (values.size() != space.total_dim()) {
    throw InputError("point has " + std::to_string(values.size()) +
                     " values but space " + space.describe() + " needs " +
                     std::to_string(space.total_dim()));
  }
}

Point Point::zeros(const VarSpace& s) {
  return Point(s, Eigen::VectorXd::Zero(s.total_dim()));
}

Eigen::VectorXd Point::block(std::string_view name) const {
  const auto& b = space.block(name);
  return values.segment(b.offset, b.dim);
}

void Point::set_block(std::string_view name, const Eigen::VectorXd& v) {
  const auto& b = space.block(name);
  if (v.size() != b.dim) {
    throw InputError("block '" + b.name + "' expects " +
                     std::to_string(b.dim) + " values");
  }
  values.segment(b.offset, b.dim) = v;
}

double& Point::at(std::string_view name, int index) {
  return values[space.flat_index(name, index)];
}

double Point::at(std::string_view name, int index) const {
  return values[space.flat_index(name, index)];
}

// ---------------------------------------------------------------------------
// Expr nodes

struct Expr::Node {
  Kind kind = Kind::kConstant;
  double value = 0.0;
  std::string block;
  int index = 0;
  int exponent = 0;
  std::vector<Expr> children;
};

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kConstant;
  n->value = value == 0.0 ? 0.0 : value;  // normalizes -0
  return Expr(std::move(n));
}

Expr Expr::var(std::string block, int index) {
  if (index < 0) throw InputError("negative variable index");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kVar;
  n->block = std::move(block);
  n->index = index;
  return Expr(std::move(n));
}

Expr Expr::raw(Kind kind, std::vector<Expr> children, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->children = std::move(children);
  n->exponent = exponent;
  if (kind == Kind::kPow && (exponent < 0 || n->children.size() != 1)) {
    throw InputError("pow needs one child and a nonnegative exponent");
  }
  if (kind == Kind::kNeg && n->children.size() != 1) {
    throw InputError("neg needs exactly one child");
  }
  return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  double c = 0.0;
  for (Expr& t : terms) {
    if (t.kind() == Kind::kConstant) {
      c += t.value();
    } else if (t.kind() == Kind::kAdd) {
      for (const Expr& s : t.children()) {
        if (s.is_constant()) {
          c += s.value();
        } else {
          flat.push_back(s);
        }
      }
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (c != 0.0) flat.push_back(constant(c));
  if (flat.empty()) return constant(0.0);
  if (flat.size() == 1) return flat.front();
  return raw(Kind::kAdd, std::move(flat));
}

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  double c = 1.0;
  for (Expr& f : factors) {
    if (f.kind() == Kind::kConstant) {
      c *= f.value();
    } else if (f.kind() == Kind::kMul) {
      for (const Expr& s : f.children()) {
        if (s.is_constant()) {
          c *= s.value();
        } else {
          flat.push_back(s);
        }
      }
    } else if (f.kind() == Kind::kNeg) {
      c = -c;
      flat.push_back(f.children().front());
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (c == 0.0) return constant(0.0);
  if (flat.empty()) return constant(c);
  if (c == -1.0) {
    return negate(flat.size() == 1 ? flat.front() : raw(Kind::kMul, flat));
  }
  if (c != 1.0) flat.insert(flat.begin(), constant(c));
  if (flat.size() == 1) return flat.front();
  return raw(Kind::kMul, std::move(flat));
}

Expr Expr::power(Expr base, int exponent) {
  if (exponent < 0) throw InputError("negative exponent");
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant()) return constant(std::pow(base.value(), exponent));
  if (base.kind() == Kind::kPow) {
    return raw(Kind::kPow, {base.children().front()},
               base.exponent() * exponent);
  }
  return raw(Kind::kPow, {std::move(base)}, exponent);
}

Expr Expr::negate(Expr child) {
  if (child.is_constant()) return constant(-child.value());
  if (child.kind() == Kind::kNeg) return child.children().front();
  return raw(Kind::kNeg, {std::move(child)});
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::block() const { return node_->block; }
int Expr::index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }
const std::vector<Expr>& Expr::children() const { return node_->children; }

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) {
  return Expr::sum({a, Expr::negate(b)});
}
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator-(const Expr& a) { return Expr::negate(a); }
Expr operator+(const Expr& a, double b) {
  return Expr::sum({a, Expr::constant(b)});
}
Expr operator-(const Expr& a, double b) { return a + (-b); }
Expr operator*(double a, const Expr& b) {
  return Expr::product({Expr::constant(a), b});
}

Expr pow(const Expr& base, int exponent) { return Expr::power(base, exponent); }

Expr dot(const std::vector<Expr>& coeffs, const std::vector<Expr>& terms) {
  if (coeffs.size() != terms.size()) {
    throw InputError("dot: length mismatch");
  }
  std::vector<Expr> parts;
  parts.reserve(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    parts.push_back(coeffs[i] * terms[i]);
  }
  return Expr::sum(std::move(parts));
}

std::vector<Expr> block_vars(std::string_view block, int dim) {
  std::vector<Expr> out;
  out.reserve(dim);
  for (int i = 0; i < dim; ++i) out.push_back(Expr::var(std::string(block), i));
  return out;
}

// ---------------------------------------------------------------------------
// Rewriting

namespace {

Expr rebuild(const Expr& e, const std::function<Expr(const Expr&)>& leaf) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
    case Expr::Kind::kVar:
      return leaf(e);
    case Expr::Kind::kAdd: {
      std::vector<Expr> c;
      for (const Expr& ch : e.children()) c.push_back(rebuild(ch, leaf));
      return Expr::sum(std::move(c));
    }
    case Expr::Kind::kMul: {
      std::vector<Expr> c;
      for (const Expr& ch : e.children()) c.push_back(rebuild(ch, leaf));
      return Expr::product(std::move(c));
    }
    case Expr::Kind::kPow:
      return Expr::power(rebuild(e.children().front(), leaf), e.exponent());
    case Expr::Kind::kNeg:
      return Expr::negate(rebuild(e.children().front(), leaf));
  }
  return e;
}

}  // namespace

Expr simplify(const Expr& e) {
  return rebuild(e, [](const Expr& l) { return l; });
}

Expr substitute(const Expr& e, std::string_view block,
                const std::vector<Expr>& replacement) {
  return rebuild(e, [&](const Expr& l) {
    if (l.kind() == Expr::Kind::kVar && l.block() == block) {
      if (l.index() >= static_cast<int>(replacement.size())) {
        throw InputError("substitute: index out of range for block '" +
                         std::string(block) + "'");
      }
      return replacement[l.index()];
    }
    return l;
  });
}

Expr bind(const Expr& e, std::string_view block, const Eigen::VectorXd& values) {
  std::vector<Expr> repl;
  repl.reserve(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    repl.push_back(Expr::constant(values[i]));
  }
  return substitute(e, block, repl);
}

Expr rename_block(const Expr& e, std::string_view from, std::string to) {
  return rebuild(e, [&](const Expr& l) {
    if (l.kind() == Expr::Kind::kVar && l.block() == from) {
      return Expr::var(to, l.index());
    }
    return l;
  });
}

Expr diff(const Expr& e, std::string_view block, int index) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      return Expr::constant(0.0);
    case Expr::Kind::kVar:
      return Expr::constant(e.block() == block && e.index() == index ? 1.0
                                                                     : 0.0);
    case Expr::Kind::kAdd: {
      std::vector<Expr> terms;
      for (const Expr& c : e.children()) terms.push_back(diff(c, block, index));
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::kMul: {
      const auto& ch = e.children();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        Expr d = diff(ch[i], block, index);
        if (d.is_constant(0.0)) continue;
        std::vector<Expr> factors;
        for (std::size_t j = 0; j < ch.size(); ++j) {
          factors.push_back(j == i ? d : ch[j]);
        }
        terms.push_back(Expr::product(std::move(factors)));
      }
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::kPow: {
      const Expr& base = e.children().front();
      Expr d = diff(base, block, index);
      if (d.is_constant(0.0)) return Expr::constant(0.0);
      return Expr::product({Expr::constant(e.exponent()),
                            Expr::power(base, e.exponent() - 1), d});
    }
    case Expr::Kind::kNeg:
      return Expr::negate(diff(e.children().front(), block, index));
  }
  return Expr::constant(0.0);
}

std::vector<Expr> grad_exprs(const Expr& e, std::string_view block, int dim) {
  std::vector<Expr> out;
  out.reserve(dim);
  for (int i = 0; i < dim; ++i) out.push_back(diff(e, block, i));
  return out;
}

Eigen::VectorXd grad(const Expr& e, std::string_view block, const Point& pt) {
  const int dim = pt.space.dim(block);
  Eigen::VectorXd g(dim);
  for (int i = 0; i < dim; ++i) g[i] = eval(diff(e, block, i), pt);
  return g;
}

Eigen::MatrixXd hessian(const Expr& e, std::string_view block_a,
                        std::string_view block_b, const Point& pt) {
  const int da = pt.space.dim(block_a);
  const int db = pt.space.dim(block_b);
  Eigen::MatrixXd h(da, db);
  for (int i = 0; i < da; ++i) {
    Expr di = diff(e, block_a, i);
    for (int j = 0; j < db; ++j) h(i, j) = eval(diff(di, block_b, j), pt);
  }
  return h;
}

int degree(const Expr& e, std::string_view block) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      return 0;
    case Expr::Kind::kVar:
      return e.block() == block ? 1 : 0;
    case Expr::Kind::kAdd: {
      int d = 0;
      for (const Expr& c : e.children()) d = std::max(d, degree(c, block));
      return d;
    }
    case Expr::Kind::kMul: {
      int d = 0;
      for (const Expr& c : e.children()) d += degree(c, block);
      return d;
    }
    case Expr::Kind::kPow:
      return e.exponent() * degree(e.children().front(), block);
    case Expr::Kind::kNeg:
      return degree(e.children().front(), block);
  }
  return 0;
}

bool depends_on(const Expr& e, std::string_view block) {
  if (e.kind() == Expr::Kind::kVar) return e.block() == block;
  for (const Expr& c : e.children()) {
    if (depends_on(c, block)) return true;
  }
  return false;
}

std::set<std::string> blocks_used(const Expr& e) {
  std::set<std::string> out;
  std::function<void(const Expr&)> walk = [&](const Expr& n) {
    if (n.kind() == Expr::Kind::kVar) out.insert(n.block());
    for (const Expr& c : n.children()) walk(c);
  };
  walk(e);
  return out;
}

// ---------------------------------------------------------------------------
// Printing / parsing

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_to(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      out += "(const " + format_number(e.value()) + ")";
      return;
    case Expr::Kind::kVar:
      out += "(var " + e.block() + " " + std::to_string(e.index()) + ")";
      return;
    case Expr::Kind::kAdd:
    case Expr::Kind::kMul:
      out += e.kind() == Expr::Kind::kAdd ? "(+" : "(*";
      for (const Expr& c : e.children()) {
        out += ' ';
        print_to(c, out);
      }
      out += ')';
      return;
    case Expr::Kind::kPow:
      out += "(pow ";
      print_to(e.children().front(), out);
      out += " " + std::to_string(e.exponent()) + ")";
      return;
    case Expr::Kind::kNeg:
      out += "(neg ";
      print_to(e.children().front(), out);
      out += ')';
      return;
  }
}

class Parser {
 public:
  Parser(std::string_view text, const VarSpace& space)
      : text_(text), space_(space) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size()) {
      throw ParseError(std::string("expected '") + c + "' but reached end of input",
                       pos_);
    }
    if (text_[pos_] != c) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  std::string token() {
    skip_ws();
    if (pos_ >= text_.size()) {
      throw ParseError("unexpected end of input", pos_);
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) throw ParseError("expected a symbol", pos_);
    return std::string(text_.substr(start, pos_ - start));
  }

  long parse_int(const std::string& tok, std::size_t at) {
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') {
      throw ParseError("expected an integer, got '" + tok + "'", at);
    }
    return v;
  }

  bool at_close() {
    skip_ws();
    if (pos_ >= text_.size()) {
      throw ParseError("unbalanced parentheses: unexpected end of input", pos_);
    }
    return text_[pos_] == ')';
  }

  Expr parse_expr() {
    expect('(');
    const std::size_t op_pos = pos_;
    const std::string op = token();
    if (op == "const") {
      skip_ws();
      const std::size_t at = pos_;
      const std::string tok = token();
      char* end = nullptr;
      double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        throw ParseError("expected a number, got '" + tok + "'", at);
      }
      expect(')');
      return Expr::constant(v);
    }
    if (op == "var") {
      skip_ws();
      const std::size_t at = pos_;
      const std::string name = token();
      if (!space_.has(name)) {
        throw ParseError("unknown symbol '" + name + "'", at);
      }
      skip_ws();
      const std::size_t iat = pos_;
      const long idx = parse_int(token(), iat);
      if (idx < 0 || idx >= space_.dim(name)) {
        throw ParseError("index out of range for block '" + name + "'", iat);
      }
      expect(')');
      return Expr::var(name, static_cast<int>(idx));
    }
    if (op == "+" || op == "*") {
      std::vector<Expr> children;
      while (!at_close()) children.push_back(parse_expr());
      expect(')');
      if (children.empty()) return Expr::constant(op == "+" ? 0.0 : 1.0);
      if (children.size() == 1) return children.front();
      return Expr::raw(op == "+" ? Expr::Kind::kAdd : Expr::Kind::kMul,
                       std::move(children));
    }
    if (op == "neg") {
      Expr c = parse_expr();
      expect(')');
      return Expr::raw(Expr::Kind::kNeg, {c});
    }
    if (op == "pow") {
      Expr base = parse_expr();
      skip_ws();
      const std::size_t at = pos_;
      const long k = parse_int(token(), at);
      if (k < 0) throw ParseError("negative exponent", at);
      expect(')');
      return Expr::raw(Expr::Kind::kPow, {base}, static_cast<int>(k));
    }
    throw ParseError("unknown symbol '" + op + "'", op_pos);
  }

  std::string_view text_;
  const VarSpace& space_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string print(const Expr& e) {
  std::string out;
  print_to(e, out);
  return out;
}

Expr parse(std::string_view text, const VarSpace& space) {
  return Parser(text, space).parse_all();
}

// ---------------------------------------------------------------------------
// Evaluation

CompiledExpr::CompiledExpr(const Expr& e, const VarSpace& space) {
  int depth = 0;
  std::function<void(const Expr&)> emit = [&](const Expr& n) {
    switch (n.kind()) {
      case Expr::Kind::kConstant:
        program_.push_back({Op::kConst, 0, n.value()});
        ++depth;
        break;
      case Expr::Kind::kVar: {
        const int idx = space.flat_index(n.block(), n.index());
        max_index_ = std::max(max_index_, idx);
        program_.push_back({Op::kVar, idx, 0.0});
        ++depth;
        break;
      }
      case Expr::Kind::kAdd:
      case Expr::Kind::kMul: {
        for (const Expr& c : n.children()) emit(c);
        const int count = static_cast<int>(n.children().size());
        program_.push_back(
            {n.kind() == Expr::Kind::kAdd ? Op::kAdd : Op::kMul, count, 0.0});
        depth -= count - 1;
        break;
      }
      case Expr::Kind::kPow:
        emit(n.children().front());
        program_.push_back({Op::kPow, n.exponent(), 0.0});
        break;
      case Expr::Kind::kNeg:
        emit(n.children().front());
        program_.push_back({Op::kNeg, 0, 0.0});
        break;
    }
    max_depth_ = std::max(max_depth_, depth);
  };
  emit(e);
}

namespace {

inline double ipow(double b, int k) {
  double r = 1.0;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

}  // namespace

double CompiledExpr::operator()(std::span<const double> x) const {
  if (program_.empty()) return 0.0;
  std::array<double, 64> small;
  std::vector<double> big;
  double* stack = small.data();
  if (max_depth_ > static_cast<int>(small.size())) {
    big.resize(max_depth_);
    stack = big.data();
  }
  int top = 0;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::kConst:
        stack[top++] = in.value;
        break;
      case Op::kVar:
        stack[top++] = x[in.arg];
        break;
      case Op::kAdd: {
        double s = 0.0;
        for (int i = top - in.arg; i < top; ++i) s += stack[i];
        top -= in.arg;
        stack[top++] = s;
        break;
      }
      case Op::kMul: {
        double p = 1.0;
        for (int i = top - in.arg; i < top; ++i) p *= stack[i];
        top -= in.arg;
        stack[top++] = p;
        break;
      }
      case Op::kPow:
        stack[top - 1] = ipow(stack[top - 1], in.arg);
        break;
      case Op::kNeg:
        stack[top - 1] = -stack[top - 1];
        break;
    }
  }
  return stack[0];
}

std::vector<int> CompiledExpr::indices() const {
  std::vector<int> out;
  for (const Instr& in : program_) {
    if (in.op == Op::kVar) out.push_back(in.arg);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double eval(const Expr& e, const Point& pt) {
  CompiledExpr c(e, pt.space);
  return c(pt.values);
}

}  // namespace bilevel
