#include "cflab/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "cflab/ergodic.hpp"
#include "cflab/exponent.hpp"

namespace cflab::cli {

namespace {

using Json = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("not a nonnegative integer: '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw std::invalid_argument("integer out of range: '" + s + "'");
  }
}

std::vector<BigInt> to_bigints(const std::string& s) {
  std::vector<BigInt> out;
  for (const auto& part : split(s, ',')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("not a positive integer list: '" + s + "'");
    }
    out.emplace_back(part);
  }
  return out;
}

std::vector<std::string> fields(const std::string& text, std::size_t count, const char* grammar) {
  auto parts = split(text, ':');
  if (parts.size() != count) throw std::invalid_argument("expected " + std::string(grammar) + ", got '" + text + "'");
  return parts;
}

// Malformed command-line text is a usage error, not a contract violation.
Rational rational_arg(const std::string& s) {
  try {
    return parse_rational(s);
  } catch (const DomainError& e) {
    throw std::invalid_argument(e.what());
  }
}

Extended extended_arg(const std::string& s) {
  try {
    return Extended::parse(s);
  } catch (const DomainError& e) {
    throw std::invalid_argument(e.what());
  }
}

std::string head_of(const std::string& text) { return text.substr(0, text.find(':')); }
std::string rest_of(const std::string& text) {
  const auto pos = text.find(':');
  return pos == std::string::npos ? std::string() : text.substr(pos + 1);
}

// ---------------------------------------------------------------------------
// Output

struct Result {
  Json json = Json::object();
  std::vector<std::string> exact;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string cell(double v) { return fmt::format("{}", v); }
std::string cell(std::uint64_t v) { return fmt::format("{}", v); }
std::string cell(bool v) { return v ? "true" : "false"; }

Json ext_json(const Extended& a) { return a.is_infinite() ? Json("inf") : Json(a.value()); }

Json ints(const std::vector<BigInt>& v, const std::string& field, Result& r) {
  const bool fits = std::all_of(v.begin(), v.end(), [](const BigInt& z) { return mpz_fits_ulong_p(z.get_mpz_t()); });
  Json a = Json::array();
  for (const auto& z : v) a.push_back(fits ? Json(mpz_get_ui(z.get_mpz_t())) : Json(to_string(z)));
  if (!fits) r.exact.push_back(field);
  return a;
}

std::string join(const std::vector<BigInt>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + to_string(v[i]);
  return out;
}

Json tail_json(const TailEstimate& t) {
  Json j;
  j["estimate"] = num(t.estimate);
  j["tail_sup"] = num(t.tail_sup);
  j["tail_inf"] = num(t.tail_inf);
  j["final_value"] = num(t.final_value());
  j["log_slope"] = num(t.log_slope);
  j["window"] = t.window;
  j["diverged"] = t.diverged;
  j["terminated"] = t.terminated;
  return j;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(const Result& r, std::ostream& out) {
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_escape(cells[i]);
    out << "\r\n";
  };
  line(r.header);
  for (const auto& row : r.rows) line(row);
}

void write_json(Result r, std::ostream& out) {
  if (!r.exact.empty()) r.json["exact_fields"] = r.exact;
  out << r.json.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Options

struct Common {
  std::string format = "json";
  std::string output;
  unsigned threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--output", c.output, std::string("Output file (relative paths resolve under $") + kOutputDirEnv + ")");
  sub->add_option("--threads", c.threads, "Worker threads (default: available parallelism)")
      ->check(CLI::PositiveNumber);
}

unsigned thread_count(const Common& c) {
  return c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::uint64_t> decade_checkpoints(std::uint64_t N) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t c = 10; c < N; c *= 10) out.push_back(c);
  out.push_back(N);
  return out;
}

LogSequence log_minus_one(const PQSeq& s) {
  return {[s](std::uint64_t n) {
            const double ls = s.log_a(n);
            return ls + std::log1p(-std::exp(-ls));
          },
          s.describe() + " - 1"};
}

}  // namespace

// ---------------------------------------------------------------------------
// Spec strings

PQSeq parse_seq(const std::string& text) {
  const std::string head = head_of(text);
  if (text == "exp_floor") return PQSeq::exp_floor();
  if (head == "power") return PQSeq::power_floor(to_double(fields(text, 2, "power:alpha")[1]));
  if (head == "scaled_power") {
    const auto f = fields(text, 3, "scaled_power:M:e");
    return PQSeq::scaled_power_floor(to_u64(f[1]), to_double(f[2]));
  }
  if (head == "const") return PQSeq::constant(to_u64(fields(text, 2, "const:c")[1]));
  if (head == "list") return PQSeq::from_terms(to_bigints(rest_of(text)));
  if (head == "rational") return expand(rational_arg(rest_of(text)));
  if (head == "tau") return construct_tau(extended_arg(rest_of(text)));
  throw std::invalid_argument("unknown sequence '" + text +
                              "'; expected exp_floor, power:a, scaled_power:M:e, const:c, list:..., rational:p/q, tau:a");
}

PhiSpec parse_phi(const std::string& text) {
  const std::string head = head_of(text);
  const auto f = fields(text, 3, "kind:x:y");
  const double x = to_double(f[1]), y = to_double(f[2]);
  if (head == "power") return PhiSpec::power(x, y);
  if (head == "exp") return PhiSpec::exponential(x, y);
  if (head == "dexp") return PhiSpec::double_exponential(x, y);
  if (head == "epl") return PhiSpec::exp_poly_log(x, y);
  throw std::invalid_argument("unknown phi '" + text + "'; expected power:c:g, exp:c:b, dexp:a:b, epl:p:q");
}

ConstraintFamily parse_family(const std::string& text) {
  const std::string head = head_of(text);
  if (head == "D") {
    const auto f = fields(text, 3, "D:M:e");
    return ConstraintFamily::d_family(PQSeq::scaled_power_floor(to_u64(f[1]), to_double(f[2])));
  }
  if (head == "C" || head == "Ctilde") {
    const auto f = fields(text, 3, "C:alpha:eps");
    const double a = to_double(f[1]), e = to_double(f[2]);
    return head == "C" ? ConstraintFamily::c_family(a, e) : ConstraintFamily::c_tilde_family(a, e);
  }
  if (head == "box") {
    const auto f = fields(text, 3, "box:lo:hi");
    return ConstraintFamily::box(to_u64(f[1]), to_u64(f[2]));
  }
  if (head == "monotone") return ConstraintFamily::monotone_bounded(to_u64(fields(text, 2, "monotone:L")[1]));
  if (head == "single") {
    std::vector<std::uint64_t> prefix;
    for (const auto& p : split(rest_of(text), ',')) prefix.push_back(to_u64(p));
    return ConstraintFamily::single(std::move(prefix));
  }
  throw std::invalid_argument("unknown family '" + text +
                              "'; expected D:M:e, C:a:e, Ctilde:a:e, box:lo:hi, monotone:L, single:...");
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continued-fraction convergence exponent laboratory", "cflab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cflab 0.1.0");

  Common common;
  std::function<Result()> handler;
  auto command = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, common);
    return sub;
  };

  // expand
  std::string x_text;
  std::uint64_t max_terms = UINT64_MAX;
  {
    auto* sub = command("expand", "Partial quotients of a rational p/q in [0,1)");
    sub->add_option("--x", x_text, "Rational p/q")->required();
    sub->add_option("--max-terms", max_terms, "Fail when the expansion is longer")->check(CLI::PositiveNumber);
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        const Rational x = rational_arg(x_text);
        const auto q = expansion_terms(x, max_terms);
        r.json["x"] = to_string(x);
        r.json["quotients"] = ints(q, "quotients", r);
        r.exact.insert(r.exact.begin(), "x");
        r.header = {"index", "quotient"};
        for (std::size_t i = 0; i < q.size(); ++i) r.rows.push_back({cell(std::uint64_t{i + 1}), to_string(q[i])});
        return r;
      };
    });
  }

  // convergents
  std::string seq_text;
  std::uint64_t depth = 0;
  {
    auto* sub = command("convergents", "Convergents p_n/q_n of a rational or a sequence");
    auto* xo = sub->add_option("--x", x_text, "Rational p/q");
    auto* so = sub->add_option("--seq", seq_text, "Sequence spec");
    xo->excludes(so);
    sub->add_option("--n", depth, "Depth (required with --seq)")->check(CLI::PositiveNumber);
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        std::vector<Convergent> cs;
        if (!x_text.empty()) {
          const auto q = expansion_terms(rational_arg(x_text), depth ? depth : UINT64_MAX);
          cs = convergents(q);
          r.json["x"] = x_text;
        } else {
          if (seq_text.empty() || depth == 0) throw std::invalid_argument("convergents needs --x, or --seq with --n");
          const PQSeq s = parse_seq(seq_text);
          cs = convergents(s, depth);
          r.json["seq"] = s.describe();
        }
        Json list = Json::array();
        r.header = {"n", "p", "q"};
        for (const auto& c : cs) {
          list.push_back({{"n", c.n}, {"p", to_string(c.p)}, {"q", to_string(c.q)}});
          r.rows.push_back({cell(c.n), to_string(c.p), to_string(c.q)});
        }
        r.json["convergents"] = list;
        r.exact = {"convergents[].p", "convergents[].q"};
        return r;
      };
    });
  }

  // cylinder
  std::string prefix_text;
  {
    auto* sub = command("cylinder", "Endpoints and length of the cylinder I(a_1...a_n)");
    sub->add_option("--prefix", prefix_text, "Comma-separated partial quotients")->required();
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        const CylinderInterval c = cylinder(std::span<const BigInt>(to_bigints(prefix_text)));
        r.json["prefix"] = ints(c.prefix, "prefix", r);
        r.json["lo"] = to_string(c.lo);
        r.json["hi"] = to_string(c.hi);
        r.json["length"] = to_string(c.length);
        r.json["length_approx"] = num(c.length.get_d());
        r.exact.insert(r.exact.end(), {"lo", "hi", "length"});
        r.header = {"prefix", "lo", "hi", "length"};
        r.rows.push_back({join(c.prefix, " "), to_string(c.lo), to_string(c.hi), to_string(c.length)});
        return r;
      };
    });
  }

  // tau
  std::uint64_t N = 0;
  std::vector<double> s_values;
  std::uint64_t window = 0, burn_in = 0;
  bool rearrange = false;
  {
    auto* sub = command("tau", "Series, monotone and liminf estimators of the convergence exponent");
    sub->add_option("--seq", seq_text, "Sequence spec")->required();
    sub->add_option("--N", N, "Depth")->default_val(10000)->check(CLI::Range(std::uint64_t{2}, UINT64_MAX));
    sub->add_option("--s", s_values, "Series exponents")->default_val(std::vector<double>{0.5, 1.0, 2.0})
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--window", window, "Tail window (0: last half)");
    sub->add_option("--burn-in", burn_in, "Leading indices skipped by the monotone estimator");
    sub->add_flag("--rearrange", rearrange, "Sort the first N terms before the monotone estimator");
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        const PQSeq s = parse_seq(seq_text);
        r.json["seq"] = s.describe();
        r.json["N"] = N;
        r.header = {"estimator", "s", "n", "value"};
        const auto checkpoints = decade_checkpoints(N);
        Json series = Json::array();
        for (double sv : s_values) {
          const auto sums = tau_series_sums(s, sv, checkpoints);
          Json cps = Json::array();
          for (std::size_t i = 0; i < sums.size(); ++i) {
            cps.push_back({{"n", checkpoints[i]}, {"log_sum", num(sums[i])}});
            r.rows.push_back({"series", cell(sv), cell(checkpoints[i]), cell(sums[i])});
          }
          series.push_back({{"s", sv}, {"checkpoints", cps}});
        }
        r.json["series"] = series;
        const TailEstimate mono = tau_monotone_estimate(s, N, {window, burn_in, rearrange});
        r.json["monotone"] = tail_json(mono);
        r.rows.push_back({"monotone", "", cell(N), cell(mono.estimate)});
        const TailEstimate inf = liminf_ratio_estimate(s, N, window);
        r.json["liminf"] = tail_json(inf);
        r.rows.push_back({"liminf", "", cell(N), cell(inf.estimate)});
        return r;
      };
    });
  }

  // construct
  std::string alpha_text, perturb_text = "none";
  std::uint64_t terms = 20;
  {
    auto* sub = command("construct", "Sequence realizing a prescribed convergence exponent");
    sub->add_option("--alpha", alpha_text, "Exponent in [0, inf]")->required();
    sub->add_option("--terms", terms, "Terms to print")->default_val(20)->check(CLI::PositiveNumber);
    sub->add_option("--perturb", perturb_text, "Add a 0/1 pattern")
        ->check(CLI::IsMember({"none", "alternating", "ones"}));
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        const Extended alpha = extended_arg(alpha_text);
        PQSeq s = construct_tau(alpha);
        if (perturb_text == "alternating") s = perturb(s, BitPattern::alternating());
        if (perturb_text == "ones") s = perturb(s, BitPattern::constant(1));
        r.json["alpha"] = ext_json(alpha);
        r.json["sequence"] = s.describe();
        const auto t = s.terms(terms);
        r.json["terms"] = ints(t, "terms", r);
        r.header = {"n", "a_n"};
        for (std::size_t i = 0; i < t.size(); ++i) r.rows.push_back({cell(std::uint64_t{i + 1}), to_string(t[i])});
        return r;
      };
    });
  }

  // splice
  std::string tail_text;
  std::uint64_t cut = 0;
  {
    auto* sub = command("splice", "First --cut terms of one sequence followed by another");
    sub->add_option("--prefix-seq", seq_text, "Sequence spec for the prefix")->required();
    sub->add_option("--cut", cut, "Prefix length")->required();
    sub->add_option("--tail-seq", tail_text, "Sequence spec for the tail")->required();
    sub->add_option("--terms", terms, "Terms to print")->default_val(20)->check(CLI::PositiveNumber);
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        const PQSeq s = splice(parse_seq(seq_text), cut, parse_seq(tail_text));
        r.json["sequence"] = s.describe();
        const auto t = s.terms(terms);
        r.json["terms"] = ints(t, "terms", r);
        const auto d = first_descent(s, terms);
        r.json["first_descent"] = d ? Json(*d) : Json(nullptr);
        r.header = {"n", "a_n"};
        for (std::size_t i = 0; i < t.size(); ++i) r.rows.push_back({cell(std::uint64_t{i + 1}), to_string(t[i])});
        return r;
      };
    });
  }

  // spectrum
  std::string set_text = "all";
  {
    auto* sub = command("spectrum", "Closed-form dimension spectra");
    sub->add_option("--set", set_text, "Which spectrum")
        ->check(CLI::IsMember({"full", "lambda", "E", "F", "trichotomy", "all"}));
    sub->add_option("--alpha", alpha_text, "Exponent in [0, inf]")->required();
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        const Extended alpha = extended_arg(alpha_text);
        r.header = {"set", "alpha", "dim", "regime"};
        const std::string a = alpha.to_string();
        const std::pair<const char*, SpectrumPoint (*)(const Extended&)> sets[] = {
            {"full", dim_level_full}, {"lambda", dim_level_lambda}, {"E", dim_E}, {"F", dim_F}};
        auto point_json = [](const SpectrumPoint& p) {
          Json j;
          j["dim"] = p.dim;
          j["regime"] = p.regime;
          return j;
        };
        auto tri_json = [&](const Trichotomy& t) {
          Json j;
          j["label"] = std::string(1, t.label);
          j["dim_E"] = t.dim_E;
          j["sum_rule"] = t.sum_rule;
          j["min_rule"] = t.min_rule;
          return j;
        };
        if (set_text == "all") {
          r.json["alpha"] = ext_json(alpha);
          for (const auto& [name, fn] : sets) {
            const SpectrumPoint p = fn(alpha);
            r.json[name] = point_json(p);
            r.rows.push_back({name, a, cell(p.dim), p.regime});
          }
          if (alpha.is_infinite()) {
            r.json["trichotomy"] = nullptr;
          } else {
            const Trichotomy t = intersection_trichotomy(alpha);
            r.json["trichotomy"] = tri_json(t);
            r.rows.push_back({"trichotomy", a, cell(t.dim_E), std::string(1, t.label)});
          }
        } else if (set_text == "trichotomy") {
          const Trichotomy t = intersection_trichotomy(alpha);
          r.json["alpha"] = ext_json(alpha);
          r.json.update(tri_json(t));
          r.json["set"] = set_text;
          r.rows.push_back({"trichotomy", a, cell(t.dim_E), std::string(1, t.label)});
        } else {
          for (const auto& [name, fn] : sets) {
            if (set_text != name) continue;
            const SpectrumPoint p = fn(alpha);
            r.json["alpha"] = ext_json(alpha);
            r.json["dim"] = p.dim;
            r.json["set"] = set_text;
            r.json["regime"] = p.regime;
            r.rows.push_back({name, a, cell(p.dim), p.regime});
          }
        }
        return r;
      };
    });
  }

  // xi
  double exp_rate = 0.0;
  {
    auto* sub = command("xi", "The xi limit and the implied dimension 1/(2+xi)");
    auto* so = sub->add_option("--seq", seq_text, "Sequence spec for s_n");
    auto* eo = sub->add_option("--exp-rate", exp_rate, "Use s_n = e^(rate n)")->check(CLI::PositiveNumber);
    so->excludes(eo);
    sub->add_option("--N", N, "Depth")->default_val(10000)->check(CLI::Range(std::uint64_t{2}, UINT64_MAX));
    sub->add_option("--window", window, "Tail window (0: last half)");
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        if (seq_text.empty() && exp_rate == 0.0) throw std::invalid_argument("xi needs --seq or --exp-rate");
        const LogSequence s = seq_text.empty() ? LogSequence::exponential(exp_rate) : LogSequence::of(parse_seq(seq_text));
        const XiEstimate e = xi_limit(s, N, window);
        r.json["seq"] = s.label;
        r.json["N"] = N;
        r.json["xi"] = num(e.xi);
        r.json["dim"] = num(e.dim);
        r.json["extrapolated_xi"] = num(e.extrapolated_xi);
        r.json["tail"] = tail_json(e.tail);
        r.header = {"seq", "N", "xi", "dim", "extrapolated_xi", "diverged"};
        r.rows.push_back({s.label, cell(N), cell(e.xi), cell(e.dim), cell(e.extrapolated_xi), cell(e.tail.diverged)});
        return r;
      };
    });
  }

  // bgrowth / bhirst
  std::string phi_text;
  std::uint64_t first_index = 1;
  auto b_result = [&](const PhiSpec& phi, const BEstimate& b) {
    Result r;
    r.json["phi"] = phi.label();
    r.json["N"] = N;
    r.json["log_B"] = num(b.log_B);
    r.json["B"] = num(b.B);
    r.json["dim"] = num(b.dim);
    r.json["out_of_hypothesis"] = b.out_of_hypothesis;
    r.json["tail"] = tail_json(b.tail);
    r.header = {"phi", "N", "log_B", "B", "dim", "diverged", "out_of_hypothesis"};
    r.rows.push_back({phi.label(), cell(N), cell(b.log_B), cell(b.B), cell(b.dim), cell(b.tail.diverged),
                      cell(b.out_of_hypothesis)});
    return r;
  };
  {
    auto* sub = command("bgrowth", "B from lim sup log phi(n)/n and dimension 1/(B+1)");
    sub->add_option("--phi", phi_text, "phi spec")->required();
    sub->add_option("--N", N, "Depth")->default_val(1000)->check(CLI::PositiveNumber);
    sub->add_option("--window", window, "Tail window (0: last half)");
    sub->final_callback([&] {
      handler = [&] {
        const PhiSpec phi = parse_phi(phi_text);
        return b_result(phi, B_growth(phi, N, window));
      };
    });
  }
  {
    auto* sub = command("bhirst", "B from lim sup log log phi(n)/n and dimension 1/(B+1)");
    sub->add_option("--phi", phi_text, "phi spec")->required();
    sub->add_option("--N", N, "Depth")->default_val(1000)->check(CLI::PositiveNumber);
    sub->add_option("--first-index", first_index, "First n used (phi(n) > 1 from here on)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--window", window, "Tail window (0: last half)");
    sub->final_callback([&] {
      handler = [&] {
        const PhiSpec phi = parse_phi(phi_text);
        return b_result(phi, B_hirst(phi, N, first_index, window));
      };
    });
  }

  // tseq
  double eps = kDefaultTEps;
  {
    auto* sub = command("tseq", "The sequence T_j built from phi");
    sub->add_option("--phi", phi_text, "phi spec")->required();
    sub->add_option("--eps", eps, "Slack above B")->default_val(kDefaultTEps)->check(CLI::PositiveNumber);
    sub->add_option("--N", N, "Number of entries")->default_val(1000)->check(CLI::PositiveNumber);
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        const PhiSpec phi = parse_phi(phi_text);
        const TSeq t = t_sequence(phi, eps, N);
        r.json["phi"] = phi.label();
        r.json["eps"] = t.eps;
        r.json["B"] = num(t.B);
        r.json["out_of_hypothesis"] = t.out_of_hypothesis;
        r.json["certified_from"] = t.certified_from;
        r.json["scan_end"] = t.scan_end;
        r.json["horizon"] = t.horizon;
        const auto v = first_tseq_violation(t);
        r.json["first_violation"] = v ? Json(*v) : Json(nullptr);
        r.json["liminf_ratio"] = tail_json(t.liminf_ratio);
        Json entries = Json::array();
        r.header = {"j", "log_log_T", "log_T", "argmax"};
        for (const auto& e : t.entries) {
          entries.push_back({{"j", e.j}, {"log_log_T", num(e.log_log_T)}, {"log_T", num(e.log_T)}, {"argmax", e.argmax}});
          r.rows.push_back({cell(e.j), cell(e.log_log_T), cell(e.log_T), cell(e.argmax)});
        }
        r.json["entries"] = entries;
        return r;
      };
    });
  }

  // count
  std::uint64_t n_gen = 0, L = 0;
  std::string family_text;
  {
    auto* sub = command("count", "N_n(L), nondecreasing n-tuples over [1, L], or the size of a family");
    sub->add_option("--n", n_gen, "Tuple length")->required()->check(CLI::PositiveNumber);
    auto* lo = sub->add_option("--L", L, "Largest value")->check(CLI::PositiveNumber);
    auto* fo = sub->add_option("--family", family_text, "Family spec");
    lo->excludes(fo);
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        r.json["n"] = n_gen;
        BigInt c;
        if (!family_text.empty()) {
          const ConstraintFamily f = parse_family(family_text);
          c = count_family(f, n_gen);
          r.json["family"] = f.name();
          r.header = {"n", "family", "count"};
          r.rows.push_back({cell(n_gen), f.name(), to_string(c)});
        } else {
          if (L == 0) throw std::invalid_argument("count needs --L or --family");
          c = count_monotone(n_gen, L);
          r.json["L"] = L;
          r.header = {"n", "L", "count"};
          r.rows.push_back({cell(n_gen), cell(L), to_string(c)});
        }
        r.json["count"] = to_string(c);
        r.exact.push_back("count");
        return r;
      };
    });
  }

  // enumerate
  std::uint64_t cap = 1'000'000;
  {
    auto* sub = command("enumerate", "List the tuples of a family in lexicographic order");
    sub->add_option("--family", family_text, "Family spec")->required();
    sub->add_option("--n", n_gen, "Generation")->required()->check(CLI::PositiveNumber);
    sub->add_option("--cap", cap, "Refuse families larger than this")->default_val(1'000'000)
        ->check(CLI::PositiveNumber);
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        const ConstraintFamily f = parse_family(family_text);
        TupleStream stream = enumerate_family(f, n_gen, cap);
        Json tuples = Json::array();
        r.header = {"index"};
        for (std::uint64_t k = 1; k <= n_gen; ++k) r.header.push_back(fmt::format("sigma_{}", k));
        std::uint64_t index = 0;
        while (stream.next()) {
          const auto t = stream.tuple();
          tuples.push_back(std::vector<std::uint64_t>(t.begin(), t.end()));
          std::vector<std::string> row{cell(++index)};
          for (auto v : t) row.push_back(cell(v));
          r.rows.push_back(std::move(row));
        }
        r.json["family"] = f.name();
        r.json["n"] = n_gen;
        r.json["count"] = index;
        r.json["tuples"] = tuples;
        return r;
      };
    });
  }

  // falconer
  {
    auto* sub = command("falconer", "Falconer lower bound with m_n = s_n - 1 against 1/(2 + xi)");
    sub->add_option("--seq", seq_text, "Sequence spec for s_n")->required();
    sub->add_option("--N", N, "Depth")->default_val(1000)->check(CLI::Range(std::uint64_t{2}, UINT64_MAX));
    sub->add_option("--window", window, "Tail window (0: last half)");
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        const PQSeq seq = parse_seq(seq_text);
        const LogSequence s = LogSequence::of(seq);
        const TailEstimate fb =
            falconer_lower_bound(log_minus_one(seq), [&s](std::uint64_t n) { return gap_epsilon(s, n); }, N, window);
        const XiEstimate xi = xi_limit(s, N, window);
        const TailEstimate fan = fan_dimension_estimate(s, N, window);
        r.json["seq"] = seq.describe();
        r.json["N"] = N;
        r.json["falconer"] = tail_json(fb);
        r.json["xi_dim"] = num(xi.dim);
        r.json["fan"] = tail_json(fan);
        r.json["difference"] = num(fb.estimate - xi.dim);
        r.header = {"seq", "N", "falconer", "xi_dim", "fan"};
        r.rows.push_back({seq.describe(), cell(N), cell(fb.estimate), cell(xi.dim), cell(fan.estimate)});
        return r;
      };
    });
  }

  // critical
  std::uint64_t n_max = 0, n_min = 1;
  double tolerance = kBisectionTolerance;
  bool analytic = false;
  {
    auto* sub = command("critical", "Critical exponent s* of sum |I|^s over a family's covers");
    sub->add_option("--family", family_text, "Family spec")->required();
    sub->add_option("--n-max", n_max, "Last generation")->required()->check(CLI::PositiveNumber);
    sub->add_option("--n-min", n_min, "First generation")->default_val(1)->check(CLI::PositiveNumber);
    sub->add_option("--cap", cap, "Enumerate exactly below this many tuples")->default_val(1'000'000)
        ->check(CLI::PositiveNumber);
    sub->add_option("--tolerance", tolerance, "Bisection tolerance")->default_val(kBisectionTolerance)
        ->check(CLI::PositiveNumber);
    sub->add_flag("--analytic", analytic, "Use analytic length bounds only");
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        const ConstraintFamily f = parse_family(family_text);
        CriticalOptions opts;
        opts.enumerate = !analytic;
        opts.cap = cap;
        opts.n_min = n_min;
        opts.tolerance = tolerance;
        opts.threads = thread_count(common);
        const CriticalExponent c = critical_exponent(f, n_max, opts);
        r.json["family"] = f.name();
        r.json["s_star"] = c.s_star;
        r.json["s_lo"] = c.s_lo;
        r.json["s_hi"] = c.s_hi;
        r.json["truncation_index"] = c.truncation_index;
        Json levels = Json::array();
        r.header = {"generation", "s_star", "s_lo", "s_hi", "exact"};
        for (const auto& l : c.levels) {
          levels.push_back({{"generation", l.generation},
                            {"s_star", l.s_star},
                            {"s_lo", l.s_lo},
                            {"s_hi", l.s_hi},
                            {"exact", l.exact}});
          r.rows.push_back({cell(l.generation), cell(l.s_star), cell(l.s_lo), cell(l.s_hi), cell(l.exact)});
        }
        r.json["levels"] = levels;
        return r;
      };
    });
  }

  // ergodic
  std::uint64_t seed = 1, samples = 1000, orbit = 1000, series_terms = kDefaultSeriesTerms;
  std::vector<double> ts;
  {
    auto* sub = command("ergodic", "Birkhoff averages of a_k^-t over Gauss samples against the P(t) bounds");
    sub->add_option("--seed", seed, "PRNG seed")->default_val(1);
    sub->add_option("--samples", samples, "Number of samples")->default_val(1000)->check(CLI::PositiveNumber);
    sub->add_option("--orbit", orbit, "Orbit length")->default_val(1000)->check(CLI::PositiveNumber);
    sub->add_option("--t", ts, "Exponents t > 0")->default_val(std::vector<double>{1.0})->check(CLI::PositiveNumber);
    sub->add_option("--K", series_terms, "Series truncation for the bounds")->default_val(kDefaultSeriesTerms)
        ->check(CLI::PositiveNumber);
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        const auto runs = ergodic_runs(seed, samples, orbit, ts, {thread_count(common), series_terms});
        Json list = Json::array();
        r.header = {"t", "seed", "sample_count", "orbit_length", "p_lower", "p_upper", "mean", "std_error",
                    "precision_retries", "generator"};
        for (const auto& run : runs) {
          Json j;
          j["seed"] = run.seed;
          j["sample_count"] = run.sample_count;
          j["orbit_length"] = run.orbit_length;
          j["t"] = run.t;
          j["p_lower"] = run.p_lower;
          j["p_upper"] = run.p_upper;
          j["mean"] = run.mean;
          j["std_error"] = run.std_error;
          j["generator"] = run.generator;
          j["precision_retries"] = run.precision_retries;
          j["averages"] = run.averages;
          list.push_back(std::move(j));
          r.rows.push_back({cell(run.t), cell(run.seed), cell(run.sample_count), cell(run.orbit_length),
                            cell(run.p_lower), cell(run.p_upper), cell(run.mean), cell(run.std_error),
                            cell(run.precision_retries), run.generator});
        }
        r.json["runs"] = list;
        return r;
      };
    });
  }

  // ephi-table
  {
    auto* sub = command("ephi-table", "B and dim E_phi for the standard phi family");
    sub->add_option("--N", N, "Depth")->default_val(1000)->check(CLI::PositiveNumber);
    sub->final_callback([&] {
      handler = [&] {
        Result r;
        Json rows = Json::array();
        r.header = {"label", "log_B", "B", "dim", "diverged", "hypothesis_ok"};
        for (const auto& row : ephi_figure_table(default_phi_family(), N)) {
          rows.push_back({{"label", row.label},
                          {"log_B", num(row.log_B)},
                          {"B", num(row.B)},
                          {"dim", num(row.dim)},
                          {"diverged", row.diverged},
                          {"hypothesis_ok", row.hypothesis_ok}});
          r.rows.push_back({row.label, cell(row.log_B), cell(row.B), cell(row.dim), cell(row.diverged),
                            cell(row.hypothesis_ok)});
        }
        r.json["N"] = N;
        r.json["rows"] = rows;
        return r;
      };
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Result result;
  try {
    result = handler();
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitViolation;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!common.output.empty()) {
    std::filesystem::path path(common.output);
    if (path.is_relative()) {
      if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) path = std::filesystem::path(dir) / path;
    }
    file.open(path, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << path.string() << " for writing\n";
      return kExitViolation;
    }
    sink = &file;
  }
  if (common.format == "csv") {
    write_csv(result, *sink);
  } else {
    write_json(std::move(result), *sink);
  }
  return kExitOk;
}

}  // namespace cflab::cli
