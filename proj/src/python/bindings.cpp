#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tbt/channel.hpp"
#include "tbt/equalizer.hpp"
#include "tbt/harness.hpp"
#include "tbt/tree.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Turning-boundaries-tree adaptive piecewise-linear channel equalizer";

    // tree combinatorics
    m.def("alpha", &tbt::alpha, py::arg("d"));
    m.def("theta", &tbt::theta, py::arg("d"), py::arg("node_depth"));
    m.def("nearest_common_ancestor", &tbt::nearest_common_ancestor, py::arg("j"), py::arg("k"));
    m.def("rho", &tbt::rho, py::arg("j"), py::arg("k"), py::arg("d"));
    m.def("rho_oracle", &tbt::rho_oracle, py::arg("j"), py::arg("k"), py::arg("d"));
    m.def(
        "enumerate_models",
        [](int d) {
            std::vector<std::vector<int>> out;
            for (auto& model : tbt::enumerate_models(d)) out.push_back(model.leaf_set);
            return out;
        },
        py::arg("d"));

    // channel
    py::class_<tbt::ChannelConfig>(m, "ChannelConfig")
        .def(py::init<>())
        .def_readwrite("causal_taps", &tbt::ChannelConfig::causal_taps)
        .def_readwrite("anticausal_taps", &tbt::ChannelConfig::anticausal_taps)
        .def_readwrite("base_taps", &tbt::ChannelConfig::base_taps)
        .def_readwrite("sin_amplitude", &tbt::ChannelConfig::sin_amplitude)
        .def_readwrite("snr_db", &tbt::ChannelConfig::snr_db)
        .def_readwrite("noiseless", &tbt::ChannelConfig::noiseless)
        .def_readwrite("seed", &tbt::ChannelConfig::seed);
    m.def("noise_variance_from_snr", &tbt::noise_variance_from_snr);
    m.def("propagate", &tbt::propagate, py::arg("config"), py::arg("bits"));
    m.def("training_sequence", &tbt::training_sequence, py::arg("length"), py::arg("seed"));

    // equalizer
    py::enum_<tbt::EqualizerKind>(m, "EqualizerKind")
        .value("TBT", tbt::EqualizerKind::kTbt)
        .value("FBT", tbt::EqualizerKind::kFbt)
        .value("FT", tbt::EqualizerKind::kFt)
        .value("FF", tbt::EqualizerKind::kFf)
        .value("LINEAR", tbt::EqualizerKind::kLinear);

    py::class_<tbt::StepOutput>(m, "StepOutput")
        .def_readonly("soft_estimate", &tbt::StepOutput::soft_estimate)
        .def_readonly("decision", &tbt::StepOutput::decision)
        .def_readonly("soft_error", &tbt::StepOutput::soft_error)
        .def_readonly("node_estimates", &tbt::StepOutput::node_estimates)
        .def_readonly("indicators", &tbt::StepOutput::indicators)
        .def_readonly("betas", &tbt::StepOutput::betas);

    py::class_<tbt::TbtState>(m, "TbtState")
        .def_property_readonly("node_weights",
                               [](const tbt::TbtState& s) { return s.node_weights; })
        .def_property_readonly("depth", [](const tbt::TbtState& s) { return s.topology.depth; });

    m.def(
        "init_state",
        [](int depth, int h, int h_f, double mu, double eta, double zeta, std::uint64_t seed,
           tbt::EqualizerKind kind) {
            tbt::TbtOptions options;
            options.depth = depth;
            options.h = h;
            options.h_f = h_f;
            options.filter_step = mu;
            options.weight_step = eta;
            options.boundary_step = zeta;
            options.seed = seed;
            options.kind = kind;
            return tbt::init_state(options);
        },
        py::arg("depth"), py::arg("h"), py::arg("h_f") = 0, py::arg("mu") = 0.01,
        py::arg("eta") = 0.01, py::arg("zeta") = 0.01, py::arg("seed") = 1,
        py::arg("kind") = tbt::EqualizerKind::kTbt);
    m.def(
        "step",
        [](tbt::TbtState& state, const std::vector<double>& r, py::object true_bit) {
            std::optional<int> bit;
            if (!true_bit.is_none()) bit = true_bit.cast<int>();
            state.mode = bit ? tbt::EqualizerMode::kTrain : tbt::EqualizerMode::kDecisionDirected;
            return tbt::tbt_step(state, r, bit);
        },
        py::arg("state"), py::arg("regressor"), py::arg("true_bit") = py::none());
    m.def("soft_separator", &tbt::soft_separator, py::arg("r"), py::arg("n"),
          py::arg("floor") = 1e-12);
    m.def("dfe_extend", &tbt::dfe_extend, py::arg("window"), py::arg("decisions"));

    // harness
    m.def(
        "run_trial",
        [](const std::string& config_text, std::uint64_t seed) {
            const tbt::ExperimentConfig config = tbt::parse_config_text(config_text);
            const tbt::ExperimentRecord record = tbt::run_trial(config, seed);
            py::dict out;
            out["ber"] = tbt::ber(record, config.train_length);
            out["final_nmse"] = tbt::nmse_curve(record).back();
            out["soft_errors"] = record.soft_errors;
            out["decisions"] = record.decisions;
            return out;
        },
        py::arg("config_text"), py::arg("seed"));
}
