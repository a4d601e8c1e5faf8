#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "skl/cr2.hpp"
#include "skl/feskl.hpp"
#include "skl/pkecrskl.hpp"
#include "skl/skecrskl.hpp"

namespace skl::games {

// ---- transcripts -----------------------------------------------------------

struct Event {
    std::string actor;
    std::string action;
    std::string digest;
};

enum class Verdict { win, lose, abort_loss };

struct TrialRecord {
    std::vector<Event> events;
    std::vector<bool> v_flags;
    Verdict verdict = Verdict::lose;
    bool all_passed = false;
    bool guessed_right = false;
};

// Seeded, replayable record of a security experiment run. to_json() emits
// {game, scheme, params, seed, trials, wins, pass_rates, ci95}; the events
// digest folds every trial's event list for replayability checks.
struct Transcript {
    std::string game;
    std::string scheme;
    nlohmann::json params;
    uint64_t seed = 0;
    uint32_t trials = 0;
    uint32_t wins = 0;
    std::map<std::string, double> pass_rates;
    std::array<double, 2> ci95{0.0, 0.0};
    std::string events_digest;

    nlohmann::json to_json() const;
};

std::array<double, 2> wilson95(uint32_t wins, uint32_t trials);
uint64_t trial_seed(uint64_t master_seed, uint32_t trial_index);
std::string digest_hex(const std::string& payload);

struct GameParams {
    uint32_t q = 2;
    uint32_t trials = 1000;
    uint64_t seed = 1;
    uint32_t threads = 1;
};

// ---- leasing-game machinery ------------------------------------------------

// Challenger-side view of one scheme instance inside a trial.
class LeaseEnv {
public:
    virtual ~LeaseEnv() = default;
    virtual uint32_t msg_bits() const = 0;
    virtual bool public_encryption() const { return false; }
    virtual qreg::SparseState issue_key(RngStream& rng) = 0;
    virtual bool verify_return(uint32_t i, qreg::SparseState dk, RngStream& rng) = 0;
    // challenge encryption; the returned bits are the adversary's view
    virtual Bits encrypt(const Bits& m, RngStream& rng) = 0;
    // classical decryption with a measured key string
    virtual std::optional<Bits> classical_decrypt(const Bits& key_bits, const Bits& ct) const = 0;
    // testing key handed to the adversary alongside dk_i, when the scheme has one
    virtual const bb84sig::Tk* testing_key(uint32_t i) const {
        (void)i;
        return nullptr;
    }
};

using EnvFactory = std::function<std::unique_ptr<LeaseEnv>(RngStream&)>;

class VerifyOracle {
public:
    VerifyOracle(LeaseEnv& env, uint32_t q, RngStream& rng, TrialRecord& rec)
        : env_(env), rng_(rng), rec_(rec) {
        rec_.v_flags.assign(q, false);
    }
    bool submit(uint32_t i, qreg::SparseState dk);
    bool all_passed() const;

private:
    LeaseEnv& env_;
    RngStream& rng_;
    TrialRecord& rec_;
};

class KlaAdversary {
public:
    virtual ~KlaAdversary() = default;
    virtual void deletion_phase(std::vector<qreg::SparseState> keys, VerifyOracle& oracle, LeaseEnv& env,
                                RngStream& rng) = 0;
    virtual std::pair<Bits, Bits> choose_challenge(uint32_t msg_bits, RngStream& rng) = 0;
    virtual int guess(const Bits& ct, LeaseEnv& env, RngStream& rng) = 0;
};

using AdversaryFactory = std::function<std::unique_ptr<KlaAdversary>()>;

// environments
EnvFactory skecrskl_env(const skecrskl::Params& params);
EnvFactory pkecrskl_env(const pkecrskl::Params& params);
EnvFactory strawman_env(uint32_t lambda);

// built-in adversaries
AdversaryFactory honest_adversary();
// measures all keys but the last (decryption ability), submits value-clones
// of the spare key for every index; at q=1 it measures the only key
AdversaryFactory measure_copy_colluder();
// measures every key and re-prepares the collapsed basis states
AdversaryFactory measure_reprep_colluder();

Transcript run_kla_game(const std::string& game, const std::string& scheme, nlohmann::json extra_params,
                        const EnvFactory& make_env, const AdversaryFactory& make_adv,
                        const GameParams& gp);

Transcript run_ot_ind_kla(const skecrskl::Params& params, const AdversaryFactory& adv, const GameParams& gp);
Transcript run_ind_kla(const pkecrskl::Params& params, const AdversaryFactory& adv, const GameParams& gp);

// the §-style separation pair: the same colluder against the strawman scheme
// (pass rate ~1) and against a collusion-resistant scheme (pass rate ~2^-hq)
Transcript run_strawman_collusion_demo(uint32_t lambda, const GameParams& gp);

// ---- key-testability experiment ---------------------------------------------

struct Forgery {
    uint32_t k = 0;
    Bits dk_bits;
    Bits m;
};

struct KeyTestKeys {
    std::vector<qreg::SparseState> dks;
    std::vector<bb84sig::Tk> tks;
    std::vector<bb84sig::Vk> vks;
    uint32_t msg_bits = 0;
};

using ForgerFn = std::function<Forgery(const KeyTestKeys& keys, RngStream& rng)>;

ForgerFn honest_measurer_forger();
ForgerFn bit_flip_forger();
ForgerFn random_string_forger();

Transcript run_key_test_skecrskl(const skecrskl::Params& params, const ForgerFn& forger,
                                 const GameParams& gp);
Transcript run_key_test_skfecrskl(const feskl::SkfeSklParams& params, const ForgerFn& forger,
                                  const GameParams& gp);

// ---- IND-CVA-CD experiment ---------------------------------------------------

class CvaVerifyOracle {
public:
    CvaVerifyOracle(const skecd::VerificationKey& vk, const Bits& sk_bits, TrialRecord& rec)
        : vk_(vk), sk_bits_(sk_bits), rec_(rec) {}
    // returns the secret key bits when the certificate verifies
    std::optional<Bits> submit(const skecd::DeletionCertificate& cert);
    bool passed() const { return passed_; }

private:
    const skecd::VerificationKey& vk_;
    const Bits& sk_bits_;
    TrialRecord& rec_;
    bool passed_ = false;
};

class CvaAdversary {
public:
    virtual ~CvaAdversary() = default;
    virtual std::pair<Bits, Bits> choose_challenge(uint32_t msg_bits, RngStream& rng) = 0;
    virtual void challenge_phase(skecd::Ciphertext ct, CvaVerifyOracle& oracle,
                                 const skecd::Params& params, RngStream& rng) = 0;
    virtual int guess(RngStream& rng) = 0;
};

using CvaFactory = std::function<std::unique_ptr<CvaAdversary>()>;

CvaFactory honest_deleter();
CvaFactory no_delete_adversary();
// measures the ciphertext computationally, keeps the string, guesses the
// certificate bits
CvaFactory keep_copy_attacker();

Transcript run_ind_cva_cd(const skecd::Params& params, const CvaFactory& adv, const GameParams& gp);

// ---- selective IND-KLA for the attribute schemes ------------------------------

// KG/Vrfy-list bookkeeping of the attribute-based experiments: one key per
// attribute, the challenge gated on every decryptable issued attribute being
// verifiably returned, and post-challenge KG queries for decryptable
// attributes refused.
class AbeKgGate {
public:
    AbeKgGate(Bits challenge_x, prims::RelationFn relation)
        : x_star_(std::move(challenge_x)), relation_(std::move(relation)) {}

    // oracle-side admission of a KG query
    bool allow_kg(const Bits& y) const;
    void record_kg(const Bits& y);
    void record_vrfy(const Bits& y, bool d);
    // true when every issued y with R(x*, y) = 0 has a passed verification
    bool challenge_ready() const;
    void mark_challenged() { challenged_ = true; }

private:
    Bits x_star_;
    prims::RelationFn relation_;
    std::map<Bits, bool> issued_;  // attribute -> V flag
    bool challenged_ = false;
};

// Honest-adversary null-result runs with per-attribute KG/Vrfy bookkeeping.
Transcript run_sel_ind_kla_abeskl(const feskl::AbeSklParams& params, const GameParams& gp);
Transcript run_sel_ind_kla_cr2(const cr2::Params& params, const GameParams& gp);

// ---- hybrid demo ---------------------------------------------------------------

// Replaces the simulated policy with a real compute-and-compare obfuscation
// of the proof circuit D (classical decryption of a fresh inner ciphertext
// under a random lock) and checks honest decryption still goes through.
Transcript run_pke_hybrid_demo(const pkecrskl::Params& params, const GameParams& gp);

// measure every segment of a state computationally, returning the collapsed string
Bits measure_full_computational(qreg::SparseState& st, RngStream& rng);

}  // namespace skl::games
