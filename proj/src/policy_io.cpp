#include "vscsim/policy_io.hpp"

#include <cmath>
#include <sstream>

#include "vscsim/errors.hpp"
#include "vscsim/text_io.hpp"

namespace vscsim {

namespace {

void write_values(std::ostringstream& out, const QValues& q) {
  out << "rows " << q.rows() << '\n';
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    out << format_double(q(r, 0)) << ' ' << format_double(q(r, 1)) << ' '
        << format_double(q(r, 2)) << '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::vector<std::string_view> next() {
    while (pos_ <= text_.size()) {
      const auto end = std::min(text_.find('\n', pos_), text_.size());
      const auto line = trim(text_.substr(pos_, end - pos_));
      pos_ = end + 1;
      ++line_no_;
      if (line.empty()) continue;
      std::vector<std::string_view> fields;
      for (auto f : split(line, ' ')) {
        if (!f.empty()) fields.push_back(f);
      }
      return fields;
    }
    fail("unexpected end of policy file");
  }

  std::vector<std::string_view> expect(std::string_view key, std::size_t n_values) {
    auto f = next();
    if (f.empty() || f[0] != key || f.size() != n_values + 1) {
      fail("expected '" + std::string(key) + "' with " + std::to_string(n_values) + " value(s)");
    }
    return f;
  }

  double number(std::string_view field) {
    double v = 0;
    if (!parse_double(field, v)) fail("non-numeric field '" + std::string(field) + "'");
    return v;
  }

  long long integer(std::string_view field) {
    long long v = 0;
    if (!parse_int(field, v)) fail("non-integer field '" + std::string(field) + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("policy line " + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

QValues read_values(LineReader& in, int expected_rows) {
  const auto rows = in.integer(in.expect("rows", 1)[1]);
  if (rows != expected_rows) {
    in.fail("row count " + std::to_string(rows) + " does not match " +
            std::to_string(expected_rows));
  }
  QValues q(rows, kModeCount);
  for (long long r = 0; r < rows; ++r) {
    auto f = in.next();
    if (f.size() != kModeCount) in.fail("expected 3 q-values");
    for (int a = 0; a < kModeCount; ++a) {
      q(r, a) = in.number(f[static_cast<std::size_t>(a)]);
      if (!std::isfinite(q(r, a))) in.fail("q-value is not finite");
    }
  }
  return q;
}

}  // namespace

std::string policy_to_text(const PolicyTable& table) {
  std::ostringstream out;
  out << "vscsim-policy " << kPolicyFormatVersion << '\n';
  if (const auto* ql = std::get_if<QTable>(&table)) {
    out << "kind QL\ncoordinated " << int(ql->coordinated) << '\n'
        << "alpha " << format_double(ql->alpha) << '\n'
        << "gamma " << format_double(ql->gamma) << '\n';
    write_values(out, ql->q);
    return out.str();
  }
  const auto& rb = std::get<FuzzyRuleBase>(table);
  out << "kind FQL\ncoordinated " << int(rb.coordinated) << '\n'
      << "variant " << variant_name(rb.variant) << '\n'
      << "alpha " << format_double(rb.alpha) << '\n'
      << "gamma " << format_double(rb.gamma) << '\n'
      << "inputs " << rb.spec.n_inputs() << '\n';
  for (const auto& dim : rb.spec.dims) {
    for (const auto& mf : dim) {
      out << "mf "
          << (mf.shape == MembershipFunction::Shape::Interval ? "interval" : "trapezoid");
      for (double v : {mf.a, mf.b, mf.c, mf.d}) out << ' ' << format_double(v);
      out << '\n';
    }
  }
  write_values(out, rb.q);
  return out.str();
}

PolicyTable policy_from_text(std::string_view text) {
  LineReader in(text);
  auto header = in.expect("vscsim-policy", 1);
  if (in.integer(header[1]) != kPolicyFormatVersion) {
    in.fail("unsupported policy format version " + std::string(header[1]));
  }
  const auto kind = in.expect("kind", 1)[1];
  if (kind != "QL" && kind != "FQL") in.fail("unknown policy kind '" + std::string(kind) + "'");
  const auto coord = in.integer(in.expect("coordinated", 1)[1]);
  if (coord != 0 && coord != 1) in.fail("coordinated must be 0 or 1");

  if (kind == "QL") {
    QTable t;
    t.coordinated = coord == 1;
    t.alpha = in.number(in.expect("alpha", 1)[1]);
    t.gamma = in.number(in.expect("gamma", 1)[1]);
    t.q = read_values(in, state_count(t.coordinated));
    return t;
  }

  FuzzyRuleBase rb;
  rb.coordinated = coord == 1;
  try {
    rb.variant = variant_from_name(in.expect("variant", 1)[1]);
  } catch (const InvalidArgument& e) {
    in.fail(e.what());
  }
  rb.alpha = in.number(in.expect("alpha", 1)[1]);
  rb.gamma = in.number(in.expect("gamma", 1)[1]);
  const auto inputs = in.integer(in.expect("inputs", 1)[1]);
  if (inputs != (rb.coordinated ? 4 : 3)) in.fail("input count does not match coordination flag");
  rb.spec.dims.resize(static_cast<std::size_t>(inputs));
  for (auto& dim : rb.spec.dims) {
    for (auto& mf : dim) {
      auto f = in.expect("mf", 5);
      if (f[1] == "interval") {
        mf.shape = MembershipFunction::Shape::Interval;
      } else if (f[1] == "trapezoid") {
        mf.shape = MembershipFunction::Shape::Trapezoid;
      } else {
        in.fail("unknown membership shape '" + std::string(f[1]) + "'");
      }
      mf.a = in.number(f[2]);
      mf.b = in.number(f[3]);
      mf.c = in.number(f[4]);
      mf.d = in.number(f[5]);
    }
  }
  rb.q = read_values(in, rb.spec.n_rules());
  return rb;
}

void save_policy(const std::filesystem::path& path, const PolicyTable& table) {
  write_text_file_atomic(path, policy_to_text(table));
}

PolicyTable load_policy(const std::filesystem::path& path) {
  return policy_from_text(read_text_file(path));
}

PolicyTable policy_of(const Agent& agent) {
  if (const auto* ql = dynamic_cast<const QLearningAgent*>(&agent)) return ql->table();
  if (const auto* fql = dynamic_cast<const FuzzyQLearningAgent*>(&agent)) {
    FuzzyRuleBase rb = fql->rules();
    rb.pending.reset();
    return rb;
  }
  throw CapabilityError(std::string(algorithm_name(agent.algorithm())) +
                        " has no learnable state to save");
}

Algorithm policy_algorithm(const PolicyTable& table) {
  if (const auto* ql = std::get_if<QTable>(&table)) {
    return ql->coordinated ? Algorithm::QL : Algorithm::UQL;
  }
  return std::get<FuzzyRuleBase>(table).coordinated ? Algorithm::FQL : Algorithm::UFQL;
}

std::unique_ptr<Agent> agent_from_policy(PolicyTable table, std::uint64_t seed, double eps) {
  if (auto* ql = std::get_if<QTable>(&table)) {
    return std::make_unique<QLearningAgent>(std::move(*ql), seed, eps);
  }
  return std::make_unique<FuzzyQLearningAgent>(std::get<FuzzyRuleBase>(std::move(table)), seed,
                                               eps);
}

}  // namespace vscsim
