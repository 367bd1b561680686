#include "abstain/point.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace abstain {

Point Point::scalar(double x) { return vector({x}); }

Point Point::vector(std::vector<double> coords) {
  if (coords.empty()) throw std::invalid_argument("Point: empty coordinate vector");
  for (double c : coords) {
    if (!std::isfinite(c)) throw std::invalid_argument("Point: coordinates must be finite");
  }
  return Point(Value(std::move(coords)));
}

Point Point::node(NodeId id) { return Point(Value(id)); }

NodeId Point::node_id() const {
  if (const auto* id = std::get_if<NodeId>(&value_)) return *id;
  throw std::invalid_argument("Point: not a node point");
}

std::span<const double> Point::coords() const {
  if (const auto* v = std::get_if<std::vector<double>>(&value_)) return *v;
  throw std::invalid_argument("Point: node point has no coordinates");
}

double Point::x() const {
  auto c = coords();
  if (c.size() != 1) throw std::invalid_argument("Point: expected a scalar point");
  return c[0];
}

std::size_t Point::dimension() const { return is_node() ? 0 : coords().size(); }

bool operator<(const Point& a, const Point& b) {
  if (a.is_node() != b.is_node()) return a.is_node();
  if (a.is_node()) return a.node_id() < b.node_id();
  auto ca = a.coords();
  auto cb = b.coords();
  return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::string to_string(const Point& p) {
  if (p.is_node()) return std::to_string(p.node_id());
  std::string out;
  for (double c : p.coords()) {
    if (!out.empty()) out += ';';
    out += format_double(c);
  }
  return out;
}

Point parse_point(std::string_view text, PointKind kind) {
  if (kind == PointKind::Node) {
    NodeId id = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw std::invalid_argument("not a node id: '" + std::string(text) + "'");
    }
    return Point::node(id);
  }
  std::vector<double> coords;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(';', start);
    coords.push_back(parse_double(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return Point::vector(std::move(coords));
}

}  // namespace abstain
