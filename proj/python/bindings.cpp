#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "selfnorm/cli.hpp"
#include "selfnorm/errors.hpp"

namespace py = pybind11;
using namespace selfnorm;

namespace {

std::string run_json(const std::string& command, const std::string& action, const Arguments& args,
                     const std::string& group, std::uint64_t budget, unsigned m_max, unsigned precision,
                     unsigned threads, const std::string& cache_dir) {
  RunConfig config;
  config.group = group;
  config.budget = budget;
  config.m_max = m_max;
  config.precision_bits = precision;
  config.threads = threads;
  config.cache_dir = cache_dir;
  Report report;
  {
    py::gil_scoped_release release;
    report = run_command(command, action, args, config);
  }
  return report.to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact group-algebra norms, retraction checks and tree geometry";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<HypothesisViolation>(m, "HypothesisViolation", base.ptr());
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<GroupContext>(m, "Group")
      .def(py::init([](const std::string& spec) { return GroupContext::parse(spec); }), py::arg("spec"))
      .def_property_readonly("spec", &GroupContext::spec)
      .def_property_readonly("rank", &GroupContext::rank)
      .def_property_readonly("alphabet", &GroupContext::alphabet)
      .def("normalize_word", [](const GroupContext& g, const std::string& w) { return g.format(g.parse_word(w)); })
      .def("multiply",
           [](const GroupContext& g, const std::string& a, const std::string& b) {
             return g.format(multiply(g.parse_word(a), g.parse_word(b)));
           })
      .def("word_length", [](const GroupContext& g, const std::string& w) { return g.parse_word(w).length(); })
      .def("translation_length",
           [](const GroupContext& g, const std::string& w) { return translation_length(g.parse_word(w)); })
      .def("normalize_element",
           [](const GroupContext& g, const std::string& x) { return serialize(parse_element(x, g)); })
      .def("convolve",
           [](const GroupContext& g, const std::string& x, const std::string& y) {
             return serialize(convolve(parse_element(x, g), parse_element(y, g)));
           })
      .def("ball", [](const GroupContext& g, unsigned r) {
        std::vector<std::string> out;
        for (const auto& w : enumerate_ball(g, r)) out.push_back(g.format(w));
        return out;
      });

  m.def("ball_size", &ball_size, py::arg("rank"), py::arg("radius"));
  m.def("run_json", &run_json, py::arg("command"), py::arg("action") = "", py::arg("args") = Arguments{},
        py::arg("group") = "", py::arg("budget") = 20'000'000, py::arg("m_max") = 4, py::arg("precision") = 64,
        py::arg("threads") = 1, py::arg("cache_dir") = "");
}
