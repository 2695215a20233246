#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "hrl/config.hpp"
#include "hrl/error.hpp"
#include "hrl/gridnav.hpp"
#include "hrl/harness.hpp"
#include "hrl/minibuild.hpp"
#include "hrl/oracle.hpp"
#include "hrl/subtasks.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Structured values cross the boundary as JSON text; the Python side
// wraps them in dicts.

std::string train_json(const std::string& config_text, const std::string& out_dir) {
  const hrl::ExperimentConfig cfg = hrl::parse_config(config_text);
  hrl::TrainResult result;
  {
    py::gil_scoped_release release;
    result = hrl::train(cfg);
  }
  if (!out_dir.empty()) hrl::write_run(cfg, result, out_dir);
  return json{{"report", hrl::to_json(result.report)}, {"checkpoint", result.checkpoint}}.dump();
}

std::string evaluate_json(const std::string& checkpoint_text, int episodes, std::uint64_t seed) {
  hrl::Rng rng(seed);
  return hrl::to_json(hrl::evaluate_checkpoint(json::parse(checkpoint_text), episodes, rng)).dump();
}

std::string default_config_json(const std::string& task, const std::string& mode,
                                std::uint64_t seed) {
  return hrl::to_json(hrl::default_config(hrl::task_from_string(task),
                                          hrl::run_mode_from_string(mode), seed))
      .dump();
}

std::string validate_config_json(const std::string& text) {
  return hrl::to_json(hrl::parse_config(text)).dump();
}

std::string compare_json(const std::vector<std::string>& curriculum,
                         const std::vector<std::string>& flat, int grid) {
  std::vector<hrl::CurriculumReport> c, f;
  for (const auto& r : curriculum) c.push_back(hrl::report_from_json(json::parse(r)));
  for (const auto& r : flat) f.push_back(hrl::report_from_json(json::parse(r)));
  return hrl::to_json(hrl::compare_runs(c, f, grid)).dump();
}

// Q* of an N x N corner-to-corner grid: (states, q, v).
py::tuple gridnav_qstar(int size, double gamma) {
  hrl::GridNavConfig cfg;
  cfg.width = cfg.height = size;
  cfg.goal = {size - 1, size - 1};
  cfg.max_steps = 4 * size * size;
  const hrl::TabularMdp mdp = hrl::enumerate_mdp(hrl::GridNavModel(cfg, gamma));
  const hrl::ValueIterationResult vi = hrl::value_iterate(mdp);
  return py::make_tuple(mdp.states, vi.q, vi.v);
}

class PyMiniBuild {
 public:
  PyMiniBuild(const std::string& reward_mode, int horizon, std::uint64_t seed) : rng_(seed) {
    cfg_.reward_mode = hrl::reward_mode_from_string(reward_mode);
    cfg_.horizon = horizon;
    cfg_.validate();
    env_ = std::make_unique<hrl::MiniBuildEnv>(cfg_);
  }
  hrl::StateVec reset() { return env_->reset(rng_); }
  py::tuple step(int action) {
    const hrl::StepResult r = env_->step(action);
    return py::make_tuple(r.next_state, r.reward, r.terminal, r.truncated);
  }
  int action_count() const { return hrl::kMiniBuildActionCount; }
  void check_invariants() const { hrl::validate_state(env_->state(), cfg_); }

 private:
  hrl::MiniBuildConfig cfg_;
  hrl::Rng rng_;
  std::unique_ptr<hrl::MiniBuildEnv> env_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Curriculum hierarchical RL core";

  py::register_exception<hrl::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<hrl::ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<hrl::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<hrl::NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("train_json", &train_json, py::arg("config"), py::arg("out_dir") = "");
  m.def("evaluate_json", &evaluate_json, py::arg("checkpoint"), py::arg("episodes") = 30,
        py::arg("seed") = 0);
  m.def("default_config_json", &default_config_json, py::arg("task"), py::arg("mode"),
        py::arg("seed"));
  m.def("validate_config_json", &validate_config_json, py::arg("config"));
  m.def("compare_json", &compare_json, py::arg("curriculum"), py::arg("flat"),
        py::arg("grid") = 20);
  m.def("gridnav_qstar", &gridnav_qstar, py::arg("size"), py::arg("gamma") = 0.99);

  py::class_<PyMiniBuild>(m, "MiniBuild")
      .def(py::init<const std::string&, int, std::uint64_t>(), py::arg("reward_mode") = "CollectAll",
           py::arg("horizon") = 120, py::arg("seed") = 0)
      .def("reset", &PyMiniBuild::reset)
      .def("step", &PyMiniBuild::step, py::arg("action"))
      .def("check_invariants", &PyMiniBuild::check_invariants)
      .def_property_readonly("action_count", &PyMiniBuild::action_count);
}
