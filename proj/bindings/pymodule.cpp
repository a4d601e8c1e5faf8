// Python bindings: sparse-state operations, the leasing schemes, and the
// game runner, mirroring the CLI surface.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skl/runner.hpp"

namespace py = pybind11;
using namespace skl;

namespace {

struct PyRng {
    RngStream rng;
    explicit PyRng(uint64_t seed) : rng(seed) {}
};

struct PyState {
    qreg::SparseState st;
};

qreg::RegisterLayout layout_from(const std::vector<std::pair<std::string, uint32_t>>& segs) {
    qreg::RegisterLayout layout;
    for (const auto& [name, width] : segs) layout.append(name, width);
    return layout;
}

runner::RunConfig config_from(const std::string& scheme, const std::string& game, uint32_t lambda,
                              uint32_t n, uint32_t hadamard, uint32_t keys, uint32_t slots,
                              uint32_t trials, uint64_t seed, uint32_t threads) {
    runner::RunConfig cfg;
    cfg.scheme = scheme;
    cfg.game = game;
    cfg.lambda = lambda;
    cfg.n = n;
    cfg.hadamard = hadamard;
    cfg.keys = keys;
    cfg.slots = slots;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.threads = threads;
    return cfg;
}

struct PySkeKey {
    skecrskl::Dk dk;
    skecrskl::Vk vk;
    skecrskl::Tk tk;
    bool spent = false;
};

// one scheme instance: setup at construction, keys and ciphertexts as values
class PySkeCrSkl {
public:
    PySkeCrSkl(uint32_t lambda, uint32_t n, uint32_t h, uint64_t seed)
        : rng_(seed), params_{lambda, n, h, 0, 0}, msk_(skecrskl::setup(params_, rng_)) {}

    PySkeKey kg() {
        auto t = skecrskl::kg(msk_, rng_);
        return PySkeKey{std::move(t.dk), std::move(t.vk), std::move(t.tk), false};
    }

    std::string enc(const std::string& m) {
        cts_.push_back(skecrskl::enc(msk_, Bits::from_string(m)));
        return std::to_string(cts_.size() - 1);
    }

    std::string dec(PySkeKey& key, const std::string& ct_handle) {
        if (key.spent) throw std::invalid_argument("key was consumed by verification");
        auto [m, post] = skecrskl::dec(std::move(key.dk), cts_.at(std::stoul(ct_handle)));
        key.dk = std::move(post);
        return m.to_string();
    }

    bool vrfy(PySkeKey& key) {
        if (key.spent) throw std::invalid_argument("key was consumed by verification");
        key.spent = true;
        return skecrskl::vrfy(key.vk, std::move(key.dk), params_.lambda, rng_);
    }

    bool keytest(const PySkeKey& key, const std::string& dk_bits) {
        return skecrskl::keytest(key.tk, Bits::from_string(dk_bits), params_);
    }

    uint32_t msg_bits() const { return params_.effective_msg_bits(); }

private:
    RngStream rng_;
    skecrskl::Params params_;
    skecrskl::Msk msk_;
    std::vector<skecrskl::Ct> cts_;
};

}  // namespace

PYBIND11_MODULE(sklsim, m) {
    m.doc() = "sparse-statevector simulator and protocol library for encryption "
              "with collusion-resistant secure key leasing";

    py::class_<PyRng>(m, "Rng").def(py::init<uint64_t>(), py::arg("seed"));

    py::class_<PyState>(m, "State")
        .def_property_readonly("term_count", [](const PyState& s) { return s.st.term_count(); })
        .def_property_readonly("total_bits", [](const PyState& s) { return s.st.layout.total_bits(); })
        .def("layout",
             [](const PyState& s) {
                 std::vector<std::pair<std::string, uint32_t>> out;
                 for (size_t i = 0; i < s.st.layout.segment_count(); i++) {
                     const auto& seg = s.st.layout.segment(i);
                     out.emplace_back(seg.name, seg.width);
                 }
                 return out;
             })
        .def("terms",
             [](const PyState& s) {
                 std::vector<std::tuple<std::string, double, double>> out;
                 for (const auto& [k, a] : s.st.terms) {
                     out.emplace_back(k.to_string(), a.real(), a.imag());
                 }
                 return out;
             })
        .def("dump_json", [](const PyState& s) { return qreg::dump_state(s.st).dump(); });

    m.def(
        "basis_state",
        [](const std::vector<std::pair<std::string, uint32_t>>& segs, const std::string& bits) {
            return PyState{qreg::basis_state(layout_from(segs), Bits::from_string(bits))};
        },
        py::arg("layout"), py::arg("bits"));

    m.def(
        "prepare_bb84",
        [](const std::string& x, const std::string& theta) {
            return PyState{qreg::prepare_bb84(Bits::from_string(x), Bits::from_string(theta))};
        },
        py::arg("x"), py::arg("theta"));

    m.def(
        "append_segment",
        [](PyState& state, const std::string& name, uint32_t width) {
            qreg::append_segment(state.st, name, width);
        },
        py::arg("state"), py::arg("name"), py::arg("width"));

    m.def(
        "apply_xor_oracle",
        [](PyState& state, const std::vector<std::string>& src, const std::string& dst,
           const std::function<std::string(std::string)>& g) {
            qreg::apply_xor_oracle(state.st, src, dst, [&g](const Bits& u) {
                return Bits::from_string(g(u.to_string()));
            });
        },
        py::arg("state"), py::arg("src"), py::arg("dst"), py::arg("g"));

    m.def(
        "measure_computational",
        [](PyState& state, const std::string& seg, PyRng& rng) {
            return qreg::measure_computational(state.st, seg, rng.rng).bits.to_string();
        },
        py::arg("state"), py::arg("segment"), py::arg("rng"));

    m.def(
        "measure_hadamard",
        [](PyState& state, const std::string& seg, PyRng& rng) {
            return qreg::measure_hadamard(state.st, seg, rng.rng).bits.to_string();
        },
        py::arg("state"), py::arg("segment"), py::arg("rng"));

    m.def(
        "trace_out",
        [](PyState& state, const std::string& seg, PyRng& rng) {
            qreg::trace_out(state.st, seg, rng.rng);
        },
        py::arg("state"), py::arg("segment"), py::arg("rng"));

    m.def(
        "dense_oracle",
        [](const PyState& state) {
            std::vector<std::complex<double>> v = qreg::dense_oracle(state.st);
            return v;
        },
        py::arg("state"));

    m.def(
        "states_equal",
        [](const PyState& a, const PyState& b, double tol) {
            return qreg::states_equal(a.st, b.st, tol);
        },
        py::arg("a"), py::arg("b"), py::arg("tol") = 1e-9);

    py::class_<PySkeKey>(m, "LeasedKey")
        .def_property_readonly("state", [](const PySkeKey& k) { return PyState{k.dk.state}; })
        .def_property_readonly("spent", [](const PySkeKey& k) { return k.spent; });

    py::class_<PySkeCrSkl>(m, "SkeCrSkl")
        .def(py::init<uint32_t, uint32_t, uint32_t, uint64_t>(), py::arg("lam") = 32,
             py::arg("n") = 16, py::arg("h") = 8, py::arg("seed") = 1)
        .def("kg", &PySkeCrSkl::kg)
        .def("enc", &PySkeCrSkl::enc, py::arg("m"))
        .def("dec", &PySkeCrSkl::dec, py::arg("key"), py::arg("ct"))
        .def("vrfy", &PySkeCrSkl::vrfy, py::arg("key"))
        .def("keytest", &PySkeCrSkl::keytest, py::arg("key"), py::arg("dk_bits"))
        .def_property_readonly("msg_bits", &PySkeCrSkl::msg_bits);

    m.def(
        "run",
        [](const std::string& scheme, const std::string& game, uint32_t lambda, uint32_t n,
           uint32_t hadamard, uint32_t keys, uint32_t slots, uint32_t trials, uint64_t seed,
           uint32_t threads) {
            auto res = runner::run(config_from(scheme, game, lambda, n, hadamard, keys, slots, trials,
                                               seed, threads));
            return py::make_tuple(res.transcript.to_json().dump(2), res.thresholds_ok, res.summary);
        },
        py::arg("scheme"), py::arg("game") = "roundtrip", py::arg("lam") = 32, py::arg("n") = 16,
        py::arg("hadamard") = 8, py::arg("keys") = 2, py::arg("slots") = 24, py::arg("trials") = 100,
        py::arg("seed") = 1, py::arg("threads") = 1,
        "run a correctness demo or security game; returns (transcript_json, thresholds_ok, summary)");

    m.def(
        "dump_key",
        [](const std::string& scheme, uint32_t lambda, uint32_t n, uint32_t hadamard, uint32_t slots,
           uint64_t seed) {
            runner::RunConfig cfg =
                config_from(scheme, "roundtrip", lambda, n, hadamard, 2, slots, 1, seed, 1);
            return runner::dump_key(cfg).dump(2);
        },
        py::arg("scheme"), py::arg("lam") = 32, py::arg("n") = 16, py::arg("hadamard") = 8,
        py::arg("slots") = 24, py::arg("seed") = 1);
}
