#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

#include "cflab/cli.hpp"
#include "cflab/covers.hpp"
#include "cflab/ergodic.hpp"
#include "cflab/exponent.hpp"
#include "cflab/spectra.hpp"

namespace py = pybind11;
using namespace cflab;

namespace {

py::int_ to_py(const BigInt& z) { return py::int_(py::str(z.get_str())); }

py::list to_py(const std::vector<BigInt>& v) {
  py::list out;
  for (const auto& z : v) out.append(to_py(z));
  return out;
}

// Fractions come back as (numerator, denominator).
py::tuple to_py(const Rational& q) { return py::make_tuple(to_py(q.get_num()), to_py(q.get_den())); }

Rational rational_of(const py::object& x) {
  if (py::isinstance<py::str>(x)) return parse_rational(x.cast<std::string>());
  if (py::isinstance<py::int_>(x)) return Rational(BigInt(py::str(x).cast<std::string>()));
  if (py::hasattr(x, "numerator") && py::hasattr(x, "denominator")) {
    Rational q(BigInt(py::str(x.attr("numerator")).cast<std::string>()),
               BigInt(py::str(x.attr("denominator")).cast<std::string>()));
    q.canonicalize();
    return q;
  }
  throw DomainError("expected a 'p/q' string, an int or a fractions.Fraction");
}

Extended alpha_of(const py::object& a) {
  if (py::isinstance<py::str>(a)) return Extended::parse(a.cast<std::string>());
  const double v = a.cast<double>();
  return std::isinf(v) && v > 0 ? Extended::infinity() : Extended::finite(v);
}

py::dict tail_dict(const TailEstimate& t) {
  py::dict d;
  d["estimate"] = t.estimate;
  d["tail_sup"] = t.tail_sup;
  d["tail_inf"] = t.tail_inf;
  d["final_value"] = t.final_value();
  d["window"] = t.window;
  d["diverged"] = t.diverged;
  d["terminated"] = t.terminated;
  return d;
}

py::dict spectrum_dict(const SpectrumPoint& p) {
  py::dict d;
  d["alpha"] = p.alpha.is_infinite() ? INFINITY : p.alpha.value();
  d["dim"] = p.dim;
  d["regime"] = p.regime;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cflab, m) {
  m.doc() = "Continued-fraction convergence exponent laboratory";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<EnumerationTooLarge>(m, "EnumerationTooLarge", PyExc_RuntimeError);
  py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);
  py::register_exception<UnsupportedRegime>(m, "UnsupportedRegime", PyExc_RuntimeError);
  py::register_exception<NonBracketing>(m, "NonBracketing", PyExc_RuntimeError);
  py::register_exception<BitCapExceeded>(m, "BitCapExceeded", PyExc_RuntimeError);

  // cf-core
  m.def("expand", [](const py::object& x, std::uint64_t max_terms) { return to_py(expansion_terms(rational_of(x), max_terms)); },
        py::arg("x"), py::arg("max_terms") = UINT64_MAX, "Partial quotients of a rational in [0,1)");
  m.def("evaluate", [](const std::vector<std::uint64_t>& q) {
    std::vector<BigInt> big(q.begin(), q.end());
    return to_py(evaluate(big));
  });
  m.def("convergents", [](const std::vector<std::uint64_t>& q) {
    std::vector<BigInt> big(q.begin(), q.end());
    py::list out;
    for (const auto& c : convergents(big)) out.append(py::make_tuple(c.n, to_py(c.p), to_py(c.q)));
    return out;
  });
  m.def("cylinder", [](const std::vector<std::uint64_t>& prefix) {
    const auto c = cylinder(prefix);
    py::dict d;
    d["lo"] = to_py(c.lo);
    d["hi"] = to_py(c.hi);
    d["length"] = to_py(c.length);
    return d;
  });
  m.def("gauss_map", [](const py::object& x) { return to_py(gauss_map(rational_of(x))); });
  m.def("sequence_terms", [](const std::string& spec, std::uint64_t n) { return to_py(cli::parse_seq(spec).terms(n)); },
        py::arg("spec"), py::arg("n"), "First n terms of a sequence spec such as 'power:2' or 'exp_floor'");

  // exponent
  m.def("tau_series_sum", [](const std::string& spec, double s, std::uint64_t N) {
    return tau_series_sum(cli::parse_seq(spec), s, N);
  });
  m.def("tau_estimate", [](const std::string& spec, std::uint64_t N, bool rearrange) {
    return tail_dict(tau_monotone_estimate(cli::parse_seq(spec), N, {0, 0, rearrange}));
  }, py::arg("spec"), py::arg("N"), py::arg("rearrange") = false);
  m.def("liminf_ratio", [](const std::string& spec, std::uint64_t N) {
    return tail_dict(liminf_ratio_estimate(cli::parse_seq(spec), N));
  });
  m.def("construct_tau", [](const py::object& alpha, std::uint64_t n) {
    return to_py(construct_tau(alpha_of(alpha)).terms(n));
  }, py::arg("alpha"), py::arg("n") = 20);

  // spectra
  m.def("dim_level_full", [](const py::object& a) { return spectrum_dict(dim_level_full(alpha_of(a))); });
  m.def("dim_level_lambda", [](const py::object& a) { return spectrum_dict(dim_level_lambda(alpha_of(a))); });
  m.def("dim_E", [](const py::object& a) { return spectrum_dict(dim_E(alpha_of(a))); });
  m.def("dim_F", [](const py::object& a) { return spectrum_dict(dim_F(alpha_of(a))); });
  m.def("trichotomy", [](const py::object& a) { return std::string(1, intersection_trichotomy(alpha_of(a)).label); });
  m.def("xi_limit", [](const std::string& spec, std::uint64_t N) {
    const XiEstimate e = xi_limit(LogSequence::of(cli::parse_seq(spec)), N);
    py::dict d = tail_dict(e.tail);
    d["xi"] = e.xi;
    d["dim"] = e.dim;
    d["extrapolated_xi"] = e.extrapolated_xi;
    return d;
  });
  m.def("B_growth", [](const std::string& phi, std::uint64_t N) {
    const BEstimate b = B_growth(cli::parse_phi(phi), N);
    return py::dict(py::arg("B") = b.B, py::arg("log_B") = b.log_B, py::arg("dim") = b.dim,
                    py::arg("diverged") = b.tail.diverged);
  });
  m.def("B_hirst", [](const std::string& phi, std::uint64_t N, std::uint64_t first_index) {
    const BEstimate b = B_hirst(cli::parse_phi(phi), N, first_index);
    return py::dict(py::arg("B") = b.B, py::arg("log_B") = b.log_B, py::arg("dim") = b.dim,
                    py::arg("diverged") = b.tail.diverged);
  }, py::arg("phi"), py::arg("N"), py::arg("first_index") = 1);
  m.def("ephi_table", [](std::uint64_t N) {
    py::list out;
    for (const auto& r : ephi_figure_table(default_phi_family(), N)) {
      out.append(py::dict(py::arg("label") = r.label, py::arg("B") = r.B, py::arg("dim") = r.dim,
                          py::arg("diverged") = r.diverged));
    }
    return out;
  }, py::arg("N") = 1000);

  // covers
  m.def("count_monotone", [](std::uint64_t n, std::uint64_t L) { return to_py(count_monotone(n, L)); });
  m.def("count_family", [](const std::string& family, std::uint64_t n) {
    return to_py(count_family(cli::parse_family(family), n));
  });
  m.def("enumerate_family", [](const std::string& family, std::uint64_t n, std::uint64_t cap) {
    TupleStream s = enumerate_family(cli::parse_family(family), n, cap);
    py::list out;
    while (s.next()) {
      const auto t = s.tuple();
      out.append(py::tuple(py::cast(std::vector<std::uint64_t>(t.begin(), t.end()))));
    }
    return out;
  }, py::arg("family"), py::arg("n"), py::arg("cap") = 1'000'000);
  m.def("critical_exponent", [](const std::string& family, std::uint64_t n_max, bool analytic) {
    CriticalOptions opts;
    opts.enumerate = !analytic;
    const CriticalExponent c = critical_exponent(cli::parse_family(family), n_max, opts);
    return py::dict(py::arg("s_star") = c.s_star, py::arg("s_lo") = c.s_lo, py::arg("s_hi") = c.s_hi);
  }, py::arg("family"), py::arg("n_max"), py::arg("analytic") = false);

  // mc-ergodic
  m.attr("GENERATOR_ID") = kGeneratorId;
  m.def("sample_gauss", &sample_gauss, py::arg("count"), py::arg("seed"));
  m.def("p_bounds", [](double t, std::uint64_t K) {
    const PBounds b = p_bounds(t, K);
    return py::make_tuple(b.p_lower, b.p_upper);
  }, py::arg("t"), py::arg("K") = kDefaultSeriesTerms);
  m.def("ergodic_run", [](std::uint64_t seed, std::uint64_t samples, std::uint64_t orbit, double t, unsigned threads) {
    ErgodicRun r;
    {
      py::gil_scoped_release release;
      r = ergodic_run(seed, samples, orbit, t, {threads, kDefaultSeriesTerms});
    }
    return py::dict(py::arg("mean") = r.mean, py::arg("std_error") = r.std_error, py::arg("p_lower") = r.p_lower,
                    py::arg("p_upper") = r.p_upper, py::arg("averages") = r.averages,
                    py::arg("generator") = r.generator);
  }, py::arg("seed"), py::arg("samples"), py::arg("orbit"), py::arg("t"), py::arg("threads") = 0);

  // cli
  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, "Run one cflab command in-process; returns (exit_code, stdout, stderr)");
}
