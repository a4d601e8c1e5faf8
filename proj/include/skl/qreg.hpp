#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "skl/bits.hpp"

namespace skl::qreg {

using cplx = std::complex<double>;

struct Limits {
    size_t term_cap = size_t(1) << 20;
    uint32_t hadamard_rank_max = 20;
    uint32_t dense_max_bits = 24;
};

Limits& limits();  // process-wide knobs

struct Segment {
    std::string name;
    uint32_t width = 0;
    uint32_t offset = 0;
};

class RegisterLayout {
public:
    RegisterLayout() = default;
    RegisterLayout(std::initializer_list<std::pair<std::string, uint32_t>> segs);

    void append(std::string name, uint32_t width);
    int find(std::string_view name) const;  // -1 if missing
    const Segment& segment(std::string_view name) const;
    const Segment& segment(size_t idx) const { return segs_[idx]; }
    size_t segment_count() const { return segs_.size(); }
    uint32_t total_bits() const { return total_; }
    RegisterLayout without(std::string_view name) const;
    std::vector<std::string> names() const;

    bool operator==(const RegisterLayout& o) const;

private:
    std::vector<Segment> segs_;
    uint32_t total_ = 0;
};

enum class Basis { computational, hadamard };

struct MeasurementOutcome {
    Bits bits;
    Basis basis = Basis::computational;
};

// Normalized superposition over fixed-width basis strings. Terms are kept
// in lexicographic order; amplitudes below the prune threshold are dropped.
struct SparseState {
    static constexpr double kPruneThreshold = 1e-12;
    static constexpr double kNormTolerance = 1e-9;

    RegisterLayout layout;
    std::map<Bits, cplx> terms;

    double norm2() const;
    // prunes tiny amplitudes, rescales to unit norm, enforces the term cap
    void normalize();
    size_t term_count() const { return terms.size(); }
};

SparseState basis_state(const RegisterLayout& layout, const Bits& bits);

// BB84 product state over 1-qubit segments prefix1..prefixN:
// qubit i is |x[i]> when theta[i]=0 and (|0> + (-1)^{x[i]}|1>)/sqrt(2)
// when theta[i]=1.
SparseState prepare_bb84(const Bits& x, const Bits& theta, const std::string& prefix = "Q");

void append_segment(SparseState& st, const std::string& name, uint32_t width);

// Per term, dst <- dst XOR g(src bits, concatenated in the listed order).
// Basis permutation: amplitudes and term count are unchanged.
void apply_xor_oracle(SparseState& st, const std::vector<std::string>& src, const std::string& dst,
                      const std::function<Bits(const Bits&)>& g);

MeasurementOutcome measure_computational(SparseState& st, std::string_view seg, RngStream& rng);

// Hadamard-basis measurement of one segment. The measured segment is
// removed from the post-state; remaining registers pick up the signs
// (-1)^{d . z} per term and are renormalized.
MeasurementOutcome measure_hadamard(SparseState& st, std::string_view seg, RngStream& rng);

// Hadamard measurement of every qubit at once (destructive). Equivalent to
// measuring each segment in sequence; returns the full-width outcome.
Bits measure_hadamard_all(SparseState st, RngStream& rng);

// Unrecorded computational measurement of the segment, then drop it.
void trace_out(SparseState& st, std::string_view seg, RngStream& rng);

std::vector<cplx> dense_oracle(const SparseState& st);

// true iff |<a|b>| >= 1 - tol (global phase ignored)
bool states_equal(const SparseState& a, const SparseState& b, double tol);

nlohmann::json dump_state(const SparseState& st);
SparseState load_state(const nlohmann::json& j);

// Repeated outcome draws without building post-states.
class ComputationalSampler {
public:
    ComputationalSampler(const SparseState& st, std::string_view seg);
    Bits sample(RngStream& rng) const;

private:
    std::vector<std::pair<Bits, double>> cumulative_;
};

class HadamardSampler {
public:
    HadamardSampler(const SparseState& st, std::string_view seg);
    Bits sample(RngStream& rng) const;

private:
    Gf2Basis basis_;
    Bits z_ref_;
    std::vector<double> class_cumulative_;  // 2^rank entries
};

}  // namespace skl::qreg
