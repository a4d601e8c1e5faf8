#include "skl/qreg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace skl::qreg {

Limits& limits() {
    static Limits l;
    return l;
}

RegisterLayout::RegisterLayout(std::initializer_list<std::pair<std::string, uint32_t>> segs) {
    for (const auto& [name, width] : segs) append(name, width);
}

void RegisterLayout::append(std::string name, uint32_t width) {
    if (width == 0) throw std::invalid_argument("RegisterLayout: zero-width segment " + name);
    if (find(name) >= 0) throw std::invalid_argument("RegisterLayout: duplicate segment " + name);
    segs_.push_back({std::move(name), width, total_});
    total_ += width;
}

int RegisterLayout::find(std::string_view name) const {
    for (size_t i = 0; i < segs_.size(); i++) {
        if (segs_[i].name == name) return int(i);
    }
    return -1;
}

const Segment& RegisterLayout::segment(std::string_view name) const {
    int i = find(name);
    if (i < 0) throw std::invalid_argument("RegisterLayout: no segment named " + std::string(name));
    return segs_[size_t(i)];
}

RegisterLayout RegisterLayout::without(std::string_view name) const {
    segment(name);  // existence check
    RegisterLayout out;
    for (const auto& s : segs_) {
        if (s.name != name) out.append(s.name, s.width);
    }
    return out;
}

std::vector<std::string> RegisterLayout::names() const {
    std::vector<std::string> out;
    out.reserve(segs_.size());
    for (const auto& s : segs_) out.push_back(s.name);
    return out;
}

bool RegisterLayout::operator==(const RegisterLayout& o) const {
    if (segs_.size() != o.segs_.size()) return false;
    for (size_t i = 0; i < segs_.size(); i++) {
        if (segs_[i].name != o.segs_[i].name || segs_[i].width != o.segs_[i].width) return false;
    }
    return true;
}

double SparseState::norm2() const {
    double n = 0;
    for (const auto& [k, a] : terms) n += std::norm(a);
    return n;
}

void SparseState::normalize() {
    for (auto it = terms.begin(); it != terms.end();) {
        if (std::abs(it->second) < kPruneThreshold) {
            it = terms.erase(it);
        } else {
            ++it;
        }
    }
    double n = std::sqrt(norm2());
    if (n == 0) throw std::runtime_error("SparseState: zero norm");
    if (std::abs(n - 1.0) > 1e-15) {
        for (auto& [k, a] : terms) a /= n;
    }
    if (terms.size() > limits().term_cap) {
        throw std::runtime_error("SparseState: term cap exceeded (" + std::to_string(terms.size()) + ")");
    }
}

SparseState basis_state(const RegisterLayout& layout, const Bits& bits) {
    if (bits.size() != layout.total_bits()) {
        throw std::invalid_argument("basis_state: bit string length does not match layout");
    }
    SparseState st;
    st.layout = layout;
    st.terms.emplace(bits, cplx(1.0, 0.0));
    return st;
}

SparseState prepare_bb84(const Bits& x, const Bits& theta, const std::string& prefix) {
    if (x.size() != theta.size()) throw std::invalid_argument("prepare_bb84: |x| != |theta|");
    uint32_t n = x.size();
    uint32_t wt = theta.popcount();
    if (wt >= 63 || (size_t(1) << wt) > limits().term_cap) {
        throw std::runtime_error("prepare_bb84: Hadamard weight exceeds term cap");
    }
    RegisterLayout layout;
    for (uint32_t i = 0; i < n; i++) layout.append(prefix + std::to_string(i + 1), 1);

    std::vector<std::pair<Bits, cplx>> acc{{Bits(0), cplx(1.0, 0.0)}};
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (uint32_t i = 0; i < n; i++) {
        std::vector<std::pair<Bits, cplx>> next;
        next.reserve(acc.size() * (theta.get(i) ? 2 : 1));
        for (auto& [b, a] : acc) {
            if (!theta.get(i)) {
                next.emplace_back(b.concat(Bits::from_u64(x.get(i), 1)), a);
            } else {
                next.emplace_back(b.concat(Bits::from_u64(0, 1)), a * inv_sqrt2);
                next.emplace_back(b.concat(Bits::from_u64(1, 1)), (x.get(i) ? -a : a) * inv_sqrt2);
            }
        }
        acc = std::move(next);
    }
    SparseState st;
    st.layout = layout;
    for (auto& [b, a] : acc) st.terms.emplace(std::move(b), a);
    st.normalize();
    return st;
}

void append_segment(SparseState& st, const std::string& name, uint32_t width) {
    st.layout.append(name, width);
    std::map<Bits, cplx> out;
    Bits z(width);
    for (const auto& [k, a] : st.terms) out.emplace(k.concat(z), a);
    st.terms = std::move(out);
}

void apply_xor_oracle(SparseState& st, const std::vector<std::string>& src, const std::string& dst,
                      const std::function<Bits(const Bits&)>& g) {
    const Segment& d = st.layout.segment(dst);
    std::vector<Segment> srcs;
    srcs.reserve(src.size());
    for (const auto& name : src) {
        if (name == dst) throw std::invalid_argument("apply_xor_oracle: src and dst overlap");
        srcs.push_back(st.layout.segment(name));
    }
    std::map<Bits, cplx> out;
    for (const auto& [k, a] : st.terms) {
        Bits in(0);
        for (const auto& s : srcs) in = in.concat(k.slice(s.offset, s.width));
        Bits y = g(in);
        if (y.size() != d.width) throw std::invalid_argument("apply_xor_oracle: g output width mismatch");
        Bits nk = k;
        nk.splice(d.offset, k.slice(d.offset, d.width) ^ y);
        out.emplace(std::move(nk), a);
    }
    if (out.size() != st.terms.size()) throw std::logic_error("apply_xor_oracle: not a permutation");
    st.terms = std::move(out);
}

MeasurementOutcome measure_computational(SparseState& st, std::string_view seg, RngStream& rng) {
    const Segment& s = st.layout.segment(seg);
    std::map<Bits, double> marginal;
    for (const auto& [k, a] : st.terms) marginal[k.slice(s.offset, s.width)] += std::norm(a);

    double u = rng.next_double();
    double acc = 0;
    Bits outcome;
    for (const auto& [v, p] : marginal) {
        acc += p;
        outcome = v;
        if (u < acc) break;
    }
    for (auto it = st.terms.begin(); it != st.terms.end();) {
        if (it->first.slice(s.offset, s.width) != outcome) {
            it = st.terms.erase(it);
        } else {
            ++it;
        }
    }
    st.normalize();
    return {outcome, Basis::computational};
}

namespace {

// Shared coset-sampled Hadamard measurement over the bit range
// [offset, offset+width). Returns the outcome d and replaces terms/keys with
// the post-measurement residue over the remaining bits.
Bits hadamard_span_measure(SparseState& st, uint32_t offset, uint32_t width, RngStream& rng) {
    struct Group {
        std::vector<std::pair<Bits, cplx>> entries;  // (segment bits, amplitude)
    };
    std::map<Bits, Group> groups;  // rest string -> entries
    Bits z_ref;
    bool first = true;
    Gf2Basis basis(width);
    for (const auto& [k, a] : st.terms) {
        Bits z = k.slice(offset, width);
        if (first) {
            z_ref = z;
            first = false;
        } else {
            basis.add(z ^ z_ref);
        }
        groups[k.erase(offset, width)].entries.emplace_back(std::move(z), a);
    }
    uint32_t r = basis.rank();
    if (r > limits().hadamard_rank_max) {
        throw std::runtime_error("measure_hadamard: difference-space rank exceeds limit");
    }

    // p(eps) = 2^{-r} * sum_rest |sum_j alpha_j (-1)^{c_j . eps}|^2, where c_j
    // are coordinates of z_j ^ z_ref in the basis. Walsh-Hadamard per group.
    std::vector<double> weight(size_t(1) << r, 0.0);
    std::vector<cplx> buf(size_t(1) << r);
    for (const auto& [rest, grp] : groups) {
        std::fill(buf.begin(), buf.end(), cplx(0, 0));
        for (const auto& [z, a] : grp.entries) {
            Bits c = *basis.coordinates(z ^ z_ref);
            size_t idx = 0;
            for (uint32_t i = 0; i < r; i++) idx |= size_t(c.get(i)) << i;
            buf[idx] += a;
        }
        for (uint32_t stage = 0; stage < r; stage++) {
            size_t half = size_t(1) << stage;
            for (size_t b = 0; b < buf.size(); b += half * 2) {
                for (size_t i = 0; i < half; i++) {
                    cplx u = buf[b + i], v = buf[b + i + half];
                    buf[b + i] = u + v;
                    buf[b + i + half] = u - v;
                }
            }
        }
        for (size_t e = 0; e < buf.size(); e++) weight[e] += std::norm(buf[e]);
    }

    double total = 0;
    for (double w : weight) total += w;
    double u = rng.next_double() * total;
    size_t eps_idx = 0;
    double acc = 0;
    for (size_t e = 0; e < weight.size(); e++) {
        acc += weight[e];
        eps_idx = e;
        if (u < acc) break;
    }
    Bits eps(r);
    for (uint32_t i = 0; i < r; i++) eps.set(i, (eps_idx >> i) & 1);
    Bits d = basis.sample_solution(eps, rng);

    std::map<Bits, cplx> post;
    for (auto& [rest, grp] : groups) {
        cplx amp(0, 0);
        for (const auto& [z, a] : grp.entries) amp += d.dot(z) ? -a : a;
        if (std::abs(amp) >= SparseState::kPruneThreshold) post.emplace(rest, amp);
    }
    st.terms = std::move(post);
    return d;
}

}  // namespace

MeasurementOutcome measure_hadamard(SparseState& st, std::string_view seg, RngStream& rng) {
    const Segment s = st.layout.segment(seg);
    Bits d = hadamard_span_measure(st, s.offset, s.width, rng);
    st.layout = st.layout.without(s.name);
    st.normalize();
    return {d, Basis::hadamard};
}

Bits measure_hadamard_all(SparseState st, RngStream& rng) {
    return hadamard_span_measure(st, 0, st.layout.total_bits(), rng);
}

void trace_out(SparseState& st, std::string_view seg, RngStream& rng) {
    measure_computational(st, seg, rng);
    const Segment s = st.layout.segment(seg);
    std::map<Bits, cplx> out;
    for (const auto& [k, a] : st.terms) out.emplace(k.erase(s.offset, s.width), a);
    st.terms = std::move(out);
    st.layout = st.layout.without(s.name);
}

std::vector<cplx> dense_oracle(const SparseState& st) {
    uint32_t n = st.layout.total_bits();
    if (n > limits().dense_max_bits) throw std::runtime_error("dense_oracle: layout too wide");
    std::vector<cplx> v(size_t(1) << n, cplx(0, 0));
    for (const auto& [k, a] : st.terms) v[k.to_u64()] = a;
    return v;
}

bool states_equal(const SparseState& a, const SparseState& b, double tol) {
    if (!(a.layout == b.layout)) throw std::invalid_argument("states_equal: layout mismatch");
    cplx inner(0, 0);
    auto ia = a.terms.begin();
    auto ib = b.terms.begin();
    while (ia != a.terms.end() && ib != b.terms.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            inner += std::conj(ia->second) * ib->second;
            ++ia;
            ++ib;
        }
    }
    return std::abs(inner) >= 1.0 - tol;
}

nlohmann::json dump_state(const SparseState& st) {
    nlohmann::json layout = nlohmann::json::array();
    for (size_t i = 0; i < st.layout.segment_count(); i++) {
        const Segment& s = st.layout.segment(i);
        layout.push_back({{"name", s.name}, {"width", s.width}});
    }
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [k, a] : st.terms) {  // map order = lexicographic by bits
        terms.push_back({{"bits", k.to_string()}, {"re", a.real()}, {"im", a.imag()}});
    }
    return {{"layout", layout}, {"terms", terms}};
}

SparseState load_state(const nlohmann::json& j) {
    SparseState st;
    for (const auto& s : j.at("layout")) {
        st.layout.append(s.at("name").get<std::string>(), s.at("width").get<uint32_t>());
    }
    for (const auto& t : j.at("terms")) {
        st.terms.emplace(Bits::from_string(t.at("bits").get<std::string>()),
                         cplx(t.at("re").get<double>(), t.at("im").get<double>()));
    }
    st.normalize();
    return st;
}

ComputationalSampler::ComputationalSampler(const SparseState& st, std::string_view seg) {
    const Segment& s = st.layout.segment(seg);
    std::map<Bits, double> marginal;
    for (const auto& [k, a] : st.terms) marginal[k.slice(s.offset, s.width)] += std::norm(a);
    double acc = 0;
    for (const auto& [v, p] : marginal) {
        acc += p;
        cumulative_.emplace_back(v, acc);
    }
}

Bits ComputationalSampler::sample(RngStream& rng) const {
    double u = rng.next_double() * cumulative_.back().second;
    for (const auto& [v, c] : cumulative_) {
        if (u < c) return v;
    }
    return cumulative_.back().first;
}

HadamardSampler::HadamardSampler(const SparseState& st, std::string_view seg)
    : basis_(st.layout.segment(seg).width) {
    const Segment& s = st.layout.segment(seg);
    std::map<Bits, std::vector<std::pair<Bits, cplx>>> groups;
    bool first = true;
    for (const auto& [k, a] : st.terms) {
        Bits z = k.slice(s.offset, s.width);
        if (first) {
            z_ref_ = z;
            first = false;
        } else {
            basis_.add(z ^ z_ref_);
        }
        groups[k.erase(s.offset, s.width)].emplace_back(std::move(z), a);
    }
    uint32_t r = basis_.rank();
    if (r > limits().hadamard_rank_max) {
        throw std::runtime_error("HadamardSampler: difference-space rank exceeds limit");
    }
    std::vector<double> weight(size_t(1) << r, 0.0);
    std::vector<cplx> buf(size_t(1) << r);
    for (const auto& [rest, entries] : groups) {
        std::fill(buf.begin(), buf.end(), cplx(0, 0));
        for (const auto& [z, a] : entries) {
            Bits c = *basis_.coordinates(z ^ z_ref_);
            size_t idx = 0;
            for (uint32_t i = 0; i < r; i++) idx |= size_t(c.get(i)) << i;
            buf[idx] += a;
        }
        for (uint32_t stage = 0; stage < r; stage++) {
            size_t half = size_t(1) << stage;
            for (size_t b = 0; b < buf.size(); b += half * 2) {
                for (size_t i = 0; i < half; i++) {
                    cplx u = buf[b + i], v = buf[b + i + half];
                    buf[b + i] = u + v;
                    buf[b + i + half] = u - v;
                }
            }
        }
        for (size_t e = 0; e < buf.size(); e++) weight[e] += std::norm(buf[e]);
    }
    double acc = 0;
    class_cumulative_.resize(weight.size());
    for (size_t e = 0; e < weight.size(); e++) {
        acc += weight[e];
        class_cumulative_[e] = acc;
    }
}

Bits HadamardSampler::sample(RngStream& rng) const {
    double u = rng.next_double() * class_cumulative_.back();
    size_t eps_idx = size_t(std::lower_bound(class_cumulative_.begin(), class_cumulative_.end(), u) -
                            class_cumulative_.begin());
    if (eps_idx >= class_cumulative_.size()) eps_idx = class_cumulative_.size() - 1;
    Bits eps(basis_.rank());
    for (uint32_t i = 0; i < basis_.rank(); i++) eps.set(i, (eps_idx >> i) & 1);
    return basis_.sample_solution(eps, rng);
}

}  // namespace skl::qreg
