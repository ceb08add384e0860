#include "fairmdp/instance_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "fairmdp/errors.hpp"

namespace fairmdp {

namespace {

using nlohmann::json;

// Maps JSON paths such as "P[2][1]" to the line where that value starts.
class LineIndex {
 public:
  explicit LineIndex(std::string_view text) {
    struct Frame {
      bool array;
      int index = 0;
      bool expect_key = true;
      std::string key;
      std::string path;
    };
    std::vector<Frame> stack;
    int line = 1;
    auto value_path = [&]() -> std::string {
      if (stack.empty()) return "";
      const auto& top = stack.back();
      if (top.array) return top.path + "[" + std::to_string(top.index) + "]";
      return top.path.empty() ? top.key : top.path + "." + top.key;
    };
    auto record = [&](const std::string& path) { lines_.emplace(path, line); };
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char c = text[i];
      if (c == '\n') {
        ++line;
      } else if (c == '"') {
        std::string s;
        for (++i; i < text.size() && text[i] != '"'; ++i) {
          if (text[i] == '\\' && i + 1 < text.size()) ++i;
          s += text[i];
        }
        if (!stack.empty() && !stack.back().array && stack.back().expect_key) {
          stack.back().key = std::move(s);
          stack.back().expect_key = false;
        } else {
          record(value_path());
        }
      } else if (c == ',') {
        if (!stack.empty()) {
          if (stack.back().array)
            ++stack.back().index;
          else
            stack.back().expect_key = true;
        }
      } else if (c == '[' || c == '{') {
        const auto path = value_path();
        record(path);
        stack.push_back({c == '[', 0, true, "", path});
      } else if (c == ']' || c == '}') {
        if (!stack.empty()) stack.pop_back();
      } else if (c == ':' || c == ' ' || c == '\t' || c == '\r') {
      } else {
        record(value_path());
        while (i + 1 < text.size() && std::string_view(",]}\n \t\r").find(text[i + 1]) == std::string_view::npos) ++i;
      }
    }
  }

  int line(std::string path) const {
    while (true) {
      if (auto it = lines_.find(path); it != lines_.end()) return it->second;
      const auto cut = path.find_last_of("[.");
      if (cut == std::string::npos) return path.empty() ? 1 : line("");
      path.resize(cut);
    }
  }

 private:
  std::map<std::string, int> lines_;
};

class Validator {
 public:
  Validator(const json& doc, std::string_view text) : doc_(doc), index_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    throw InvalidInput("line " + std::to_string(index_.line(path)) + ": " +
                       (path.empty() ? "" : path + ": ") + message);
  }

  const json& field(const std::string& key) const {
    if (!doc_.contains(key)) fail("", "missing field '" + key + "'");
    return doc_.at(key);
  }

  int positive_int(const std::string& key) const {
    const auto& v = field(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0)
      fail(key, "must be a positive integer");
    if (v.get<long long>() > 1'000'000) fail(key, "too large");
    return static_cast<int>(v.get<long long>());
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "not finite");
    return x;
  }

  const json& array(const json& v, const std::string& path, std::size_t size) const {
    if (!v.is_array()) fail(path, "expected an array");
    if (v.size() != size)
      fail(path, "has " + std::to_string(v.size()) + " entries, expected " + std::to_string(size));
    return v;
  }

  void distribution(std::span<const double> p, const std::string& path) const {
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] < 0.0) fail(path + "[" + std::to_string(k) + "]", "negative probability");
      total += p[k];
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "probabilities sum to " << total << ", expected 1";
      fail(path, os.str());
    }
  }

 private:
  const json& doc_;
  LineIndex index_;
};

int line_of_offset(std::string_view text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

void append_row(std::string& out, std::span<const double> row) {
  out += '[';
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) out += ", ";
    out += format_double(row[k]);
  }
  out += ']';
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Instance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InvalidInput("line " + std::to_string(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0)) +
                       ": malformed JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw InvalidInput("line 1: instance must be a JSON object");
  const Validator v(doc, text);
  const int S = v.positive_int("S"), A = v.positive_int("A"), H = v.positive_int("H");
  const int n = v.positive_int("n");
  double bound = 1.0;
  if (doc.contains("reward_upper_bound")) {
    bound = v.number(doc.at("reward_upper_bound"), "reward_upper_bound");
    if (!(bound > 0.0)) v.fail("reward_upper_bound", "must be positive");
  }

  std::vector<double> rho;
  const auto& jr = v.array(v.field("rho"), "rho", static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s)
    rho.push_back(v.number(jr[static_cast<std::size_t>(s)], "rho[" + std::to_string(s) + "]"));
  v.distribution(rho, "rho");

  std::vector<double> P;
  const auto& jp = v.array(v.field("P"), "P", static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    const std::string ps = "P[" + std::to_string(s) + "]";
    const auto& js = v.array(jp[static_cast<std::size_t>(s)], ps, static_cast<std::size_t>(A));
    for (int a = 0; a < A; ++a) {
      const std::string pa = ps + "[" + std::to_string(a) + "]";
      const auto& row = v.array(js[static_cast<std::size_t>(a)], pa, static_cast<std::size_t>(S));
      const std::size_t start = P.size();
      for (int t = 0; t < S; ++t)
        P.push_back(v.number(row[static_cast<std::size_t>(t)], pa + "[" + std::to_string(t) + "]"));
      v.distribution(std::span<const double>(P).subspan(start), pa);
    }
  }

  std::vector<double> r;
  const auto& jw = v.array(v.field("rewards"), "rewards", static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::string pi = "rewards[" + std::to_string(i) + "]";
    const auto& ji = v.array(jw[static_cast<std::size_t>(i)], pi, static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s) {
      const std::string ps = pi + "[" + std::to_string(s) + "]";
      const auto& row = v.array(ji[static_cast<std::size_t>(s)], ps, static_cast<std::size_t>(A));
      for (int a = 0; a < A; ++a) {
        const std::string pa = ps + "[" + std::to_string(a) + "]";
        const double x = v.number(row[static_cast<std::size_t>(a)], pa);
        if (x < 0.0 || x > bound)
          v.fail(pa, "reward " + format_double(x) + " outside [0, " + format_double(bound) + "]");
        r.push_back(x);
      }
    }
  }
  return {TabularMDP(S, A, H, std::move(rho), std::move(P)),
          RewardSet(n, S, A, std::move(r), bound)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw InvalidInput("write to '" + path + "' failed");
}

Instance load_instance(const std::string& path) {
  try {
    return parse_instance(read_file(path));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

std::string serialize_instance(const Instance& instance) {
  const auto& m = instance.mdp;
  const auto& r = instance.rewards;
  const int S = m.num_states(), A = m.num_actions();
  std::string out = "{\n";
  out += "  \"S\": " + std::to_string(S) + ",\n";
  out += "  \"A\": " + std::to_string(A) + ",\n";
  out += "  \"H\": " + std::to_string(m.horizon()) + ",\n";
  out += "  \"n\": " + std::to_string(r.num_agents()) + ",\n";
  if (r.upper_bound() != 1.0)
    out += "  \"reward_upper_bound\": " + format_double(r.upper_bound()) + ",\n";
  out += "  \"rho\": ";
  append_row(out, m.initial());
  out += ",\n  \"P\": [\n";
  for (int s = 0; s < S; ++s) {
    out += "    [\n";
    for (int a = 0; a < A; ++a) {
      out += "      ";
      append_row(out, m.transition(s, a));
      out += a + 1 < A ? ",\n" : "\n";
    }
    out += s + 1 < S ? "    ],\n" : "    ]\n";
  }
  out += "  ],\n  \"rewards\": [\n";
  for (int i = 0; i < r.num_agents(); ++i) {
    out += "    [\n";
    const auto table = r.agent(i);
    for (int s = 0; s < S; ++s) {
      out += "      ";
      append_row(out, table.subspan(static_cast<std::size_t>(s) * A, static_cast<std::size_t>(A)));
      out += s + 1 < S ? ",\n" : "\n";
    }
    out += i + 1 < r.num_agents() ? "    ],\n" : "    ]\n";
  }
  out += "  ]\n}\n";
  return out;
}

void save_instance(const std::string& path, const Instance& instance) {
  write_file(path, serialize_instance(instance));
}

std::string serialize_occupancy(const OccupancyMeasure& q) {
  const int S = q.num_states(), A = q.num_actions(), H = q.horizon();
  std::string out = "{\n";
  out += "  \"S\": " + std::to_string(S) + ",\n";
  out += "  \"A\": " + std::to_string(A) + ",\n";
  out += "  \"H\": " + std::to_string(H) + ",\n";
  out += "  \"q\": [\n";
  for (int h = 0; h < H; ++h) {
    out += "    [";
    const auto layer = q.layer(h);
    for (int s = 0; s < S; ++s) {
      if (s) out += ", ";
      append_row(out, layer.subspan(static_cast<std::size_t>(s) * A, static_cast<std::size_t>(A)));
    }
    out += h + 1 < H ? "],\n" : "]\n";
  }
  out += "  ]\n}\n";
  return out;
}

}  // namespace fairmdp
