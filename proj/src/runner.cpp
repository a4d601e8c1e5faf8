#include "skl/runner.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace skl::runner {

namespace {

const std::set<std::string> kSchemes = {"skecd",    "skecrskl",  "pkecrskl", "skfecrskl",
                                        "abecrskl", "abecr2skl", "strawman"};
const std::set<std::string> kGames = {"roundtrip", "ot-ind-kla", "ind-kla",
                                      "key-test",  "ind-cva-cd", "collusion-demo"};

bool combo_supported(const std::string& scheme, const std::string& game) {
    if (game == "roundtrip") return scheme != "strawman";
    if (game == "ot-ind-kla") return scheme == "skecrskl" || scheme == "strawman";
    if (game == "ind-kla") return scheme == "pkecrskl" || scheme == "abecrskl" || scheme == "abecr2skl";
    if (game == "key-test") return scheme == "skecrskl" || scheme == "skfecrskl";
    if (game == "ind-cva-cd") return scheme == "skecd";
    if (game == "collusion-demo")
        return scheme == "strawman" || scheme == "skecrskl" || scheme == "pkecrskl";
    return false;
}

prims::RelationFn threshold_relation() {
    // decryptable iff the key attribute does not exceed the ciphertext attribute
    return [](const Bits& x, const Bits& y) { return y.to_u64() <= x.to_u64() ? 0 : 1; };
}

}  // namespace

void RunConfig::validate() const {
    if (!kSchemes.count(scheme)) throw std::invalid_argument("unknown scheme: " + scheme);
    if (!kGames.count(game)) throw std::invalid_argument("unknown game: " + game);
    if (!combo_supported(scheme, game)) {
        throw std::invalid_argument("game " + game + " is not defined for scheme " + scheme);
    }
    if (lambda < 8 || lambda > 1024) throw std::invalid_argument("lambda must be in [8, 1024]");
    if (n == 0 || n > 64) throw std::invalid_argument("n must be in [1, 64]");
    if (hadamard > n) throw std::invalid_argument("hadamard weight exceeds quantum positions (h > n)");
    if (hadamard > qreg::limits().hadamard_rank_max) {
        throw std::invalid_argument("hadamard weight exceeds the sampling rank limit");
    }
    if (keys == 0 || trials == 0) throw std::invalid_argument("keys and trials must be positive");
    double cap = double(qreg::limits().term_cap);
    if (std::ldexp(double(keys), int(hadamard)) > cap) {
        throw std::invalid_argument("2^hadamard x keys exceeds the sparse term cap");
    }
    if (scheme == "abecr2skl" && slots < 2 * hadamard + 4) {
        throw std::invalid_argument("slots must be at least 2*hadamard + 4");
    }
}

skecrskl::Params RunConfig::skecrskl_params() const {
    skecrskl::Params p;
    p.lambda = lambda;
    p.n = n;
    p.h = hadamard;
    return p;
}

pkecrskl::Params RunConfig::pkecrskl_params() const { return pkecrskl::Params{skecrskl_params()}; }

skecd::Params RunConfig::skecd_params() const { return skecd::Params{lambda, n, hadamard, lambda}; }

feskl::SkfeSklParams RunConfig::skfe_params() const {
    feskl::SkfeSklParams p;
    p.lambda = lambda;
    p.n = n;
    p.h = hadamard;
    p.x_bits = 8;
    p.y_bits = 8;
    return p;
}

feskl::AbeSklParams RunConfig::abeskl_params() const {
    return feskl::make_abe_skl_params(lambda, n, hadamard, 8, 8, lambda, threshold_relation());
}

cr2::Params RunConfig::cr2_params() const {
    cr2::Params p;
    p.lambda = lambda;
    p.y_bits = 8;
    p.msg_bits = lambda;
    uint32_t m = (slots - 2 * hadamard) % 2 == 0 ? 2 : 3;
    p.inner = skecd::Params{(slots - 2 * hadamard - m) / 2, hadamard, hadamard, m};
    return p;
}

namespace {

struct Counts {
    uint32_t decrypt = 0;
    uint32_t verify = 0;
    uint32_t keytest = 0;
    bool has_keytest = false;
};

games::Transcript roundtrip_transcript(const RunConfig& cfg, nlohmann::json params,
                                       const std::function<Counts(uint32_t, RngStream)>& trial) {
    Counts total;
    std::string digest = "skl.rt";
    for (uint32_t t = 0; t < cfg.trials; t++) {
        uint64_t s = games::trial_seed(cfg.seed, t);
        Counts c = trial(t, RngStream(s, s ^ 0x243f6a8885a308d3ULL));
        total.decrypt += c.decrypt;
        total.verify += c.verify;
        total.keytest += c.keytest;
        total.has_keytest = total.has_keytest || c.has_keytest;
        digest = games::digest_hex(digest + std::to_string(c.decrypt + 2 * c.verify + 4 * c.keytest));
    }
    games::Transcript tr;
    tr.game = "roundtrip";
    tr.scheme = cfg.scheme;
    tr.params = std::move(params);
    tr.seed = cfg.seed;
    tr.trials = cfg.trials;
    tr.wins = std::min({total.decrypt, total.verify, total.has_keytest ? total.keytest : total.decrypt});
    tr.pass_rates["decrypt"] = double(total.decrypt) / cfg.trials;
    tr.pass_rates["verify"] = double(total.verify) / cfg.trials;
    if (total.has_keytest) tr.pass_rates["keytest"] = double(total.keytest) / cfg.trials;
    tr.ci95 = games::wilson95(tr.wins, tr.trials);
    tr.events_digest = digest;
    return tr;
}

games::Transcript run_roundtrip(const RunConfig& cfg) {
    nlohmann::json pj{{"lambda", cfg.lambda}, {"n", cfg.n}, {"h", cfg.hadamard}};
    if (cfg.scheme == "skecd") {
        auto params = cfg.skecd_params();
        return roundtrip_transcript(cfg, pj, [&](uint32_t, RngStream rng) {
            Counts c;
            auto sk = skecd::kg(params, rng);
            Bits m = rng.bits(params.msg_bits);
            auto [ct, vk] = skecd::enc(sk, m, rng);
            if (skecd::dec(sk, ct) == m) c.decrypt++;
            if (skecd::vrfy(vk, skecd::del(std::move(ct), rng))) c.verify++;
            return c;
        });
    }
    if (cfg.scheme == "skecrskl") {
        auto params = cfg.skecrskl_params();
        return roundtrip_transcript(cfg, pj, [&](uint32_t, RngStream rng) {
            Counts c;
            c.has_keytest = true;
            auto msk = skecrskl::setup(params, rng);
            auto triple = skecrskl::kg(msk, rng);
            Bits m = rng.bits(params.effective_msg_bits());
            auto ct = skecrskl::enc(msk, m);
            auto [got, post] = skecrskl::dec(std::move(triple.dk), ct);
            if (got == m) c.decrypt++;
            auto [kt, post2] = skecrskl::keytest_coherent(triple.tk, std::move(post), params, rng);
            if (kt) c.keytest++;
            if (skecrskl::vrfy(triple.vk, std::move(post2), params.lambda, rng)) c.verify++;
            return c;
        });
    }
    if (cfg.scheme == "pkecrskl") {
        auto params = cfg.pkecrskl_params();
        return roundtrip_transcript(cfg, pj, [&](uint32_t, RngStream rng) {
            Counts c;
            prims::Registry reg;
            auto [ek, msk] = pkecrskl::setup(reg, params, rng);
            auto [dk, vk] = pkecrskl::kg(reg, msk, rng);
            Bits m = rng.bits(params.msg_bits());
            auto ct = pkecrskl::enc(reg, ek, m, rng);
            auto [got, post] = pkecrskl::dec(reg, params, std::move(dk), ct);
            if (got && *got == m) c.decrypt++;
            if (pkecrskl::vrfy(reg, params, vk, std::move(post), rng)) c.verify++;
            return c;
        });
    }
    if (cfg.scheme == "skfecrskl") {
        auto params = cfg.skfe_params();
        return roundtrip_transcript(cfg, pj, [&](uint32_t, RngStream rng) {
            Counts c;
            c.has_keytest = true;
            prims::Registry reg;
            uint32_t z_bits = params.effective_z_bits();
            prims::FunctionalityFn F = [z_bits](const Bits& x, const Bits& y) -> std::optional<Bits> {
                return prims::hash_bits("skl.demo.F", {x, y}, z_bits);
            };
            auto msk = feskl::skfe_skl_setup(reg, params, F, rng);
            Bits y = rng.bits(params.y_bits);
            auto triple = feskl::skfe_skl_kg(reg, msk, y, rng);
            Bits x = rng.bits(params.x_bits);
            auto ct = feskl::skfe_skl_enc(reg, msk, x, rng);
            auto [got, post] = feskl::skfe_skl_dec(reg, params, std::move(triple.key), ct);
            if (got && *got == *F(x, y)) c.decrypt++;
            auto [kt, post2] = feskl::skfe_skl_keytest_coherent(params, triple.tk, std::move(post), rng);
            if (kt) c.keytest++;
            if (feskl::skfe_skl_vrfy(params, triple.vk, std::move(post2), rng)) c.verify++;
            return c;
        });
    }
    if (cfg.scheme == "abecrskl") {
        auto params = cfg.abeskl_params();
        return roundtrip_transcript(cfg, pj, [&](uint32_t, RngStream rng) {
            Counts c;
            prims::Registry reg;
            auto [pk, msk] = feskl::abe_skl_setup(reg, params, rng);
            Bits y = Bits::from_u64(3, params.y_bits());
            auto [key, vk] = feskl::abe_skl_kg(reg, msk, y, rng);
            Bits x = Bits::from_u64(200, params.x_bits());  // y <= x: decryptable
            Bits m = rng.bits(params.msg_bits);
            auto ct = feskl::abe_skl_enc(reg, pk, x, m, rng);
            auto [got, post] = feskl::abe_skl_dec(reg, params, std::move(key), ct);
            if (got && *got == m) c.decrypt++;
            if (feskl::abe_skl_vrfy(reg, params, vk, std::move(post), rng)) c.verify++;
            return c;
        });
    }
    // abecr2skl
    auto params = cfg.cr2_params();
    nlohmann::json pj2{{"lambda", cfg.lambda}, {"k", params.slots()}, {"h", cfg.hadamard}};
    return roundtrip_transcript(cfg, pj2, [&](uint32_t, RngStream rng) {
        Counts c;
        prims::Registry reg;
        auto [ek, msk] = cr2::setup(reg, params, rng);
        Bits y = rng.bits(params.y_bits);
        auto [key, vk] = cr2::kg(reg, msk, y, rng);
        Bits policy(params.policy_bits());  // all-zero: every attribute decrypts
        Bits m = rng.bits(params.msg_bits);
        auto ct = cr2::enc(reg, ek, policy, m, rng);
        auto [got, post] = cr2::dec(reg, params, std::move(key), ct);
        if (got && *got == m) c.decrypt++;
        if (cr2::vrfy(vk, cr2::del(std::move(post), rng))) c.verify++;
        return c;
    });
}

games::Transcript run_game(const RunConfig& cfg) {
    games::GameParams gp{cfg.keys, cfg.trials, cfg.seed, cfg.threads};
    if (cfg.game == "ot-ind-kla") {
        if (cfg.scheme == "strawman") {
            nlohmann::json pj{{"lambda", cfg.lambda}};
            return games::run_kla_game("ot-ind-kla", "strawman", pj, games::strawman_env(cfg.lambda),
                                       games::honest_adversary(), gp);
        }
        return games::run_ot_ind_kla(cfg.skecrskl_params(), games::honest_adversary(), gp);
    }
    if (cfg.game == "ind-kla") {
        if (cfg.scheme == "pkecrskl") {
            return games::run_ind_kla(cfg.pkecrskl_params(), games::honest_adversary(), gp);
        }
        if (cfg.scheme == "abecrskl") return games::run_sel_ind_kla_abeskl(cfg.abeskl_params(), gp);
        return games::run_sel_ind_kla_cr2(cfg.cr2_params(), gp);
    }
    if (cfg.game == "key-test") {
        games::Transcript a, b;
        if (cfg.scheme == "skecrskl") {
            a = games::run_key_test_skecrskl(cfg.skecrskl_params(), games::bit_flip_forger(), gp);
            b = games::run_key_test_skecrskl(cfg.skecrskl_params(), games::random_string_forger(), gp);
        } else {
            a = games::run_key_test_skfecrskl(cfg.skfe_params(), games::bit_flip_forger(), gp);
            b = games::run_key_test_skfecrskl(cfg.skfe_params(), games::random_string_forger(), gp);
        }
        games::Transcript tr = a;
        tr.trials = a.trials + b.trials;
        tr.wins = a.wins + b.wins;
        tr.pass_rates.clear();
        tr.pass_rates["forgery_bitflip"] = a.pass_rates.at("forgery");
        tr.pass_rates["forgery_random"] = b.pass_rates.at("forgery");
        tr.ci95 = games::wilson95(tr.wins, tr.trials);
        tr.events_digest = games::digest_hex(a.events_digest + b.events_digest);
        return tr;
    }
    if (cfg.game == "ind-cva-cd") {
        return games::run_ind_cva_cd(cfg.skecd_params(), games::honest_deleter(), gp);
    }
    // collusion-demo
    if (cfg.scheme == "strawman") return games::run_strawman_collusion_demo(cfg.lambda, gp);
    if (cfg.scheme == "skecrskl") {
        nlohmann::json pj{{"lambda", cfg.lambda}, {"n", cfg.n}, {"h", cfg.hadamard}};
        return games::run_kla_game("collusion-demo", "skecrskl", pj,
                                   games::skecrskl_env(cfg.skecrskl_params()),
                                   games::measure_copy_colluder(), gp);
    }
    nlohmann::json pj{{"lambda", cfg.lambda}, {"n", cfg.n}, {"h", cfg.hadamard}};
    return games::run_kla_game("collusion-demo", "pkecrskl", pj,
                               games::pkecrskl_env(cfg.pkecrskl_params()),
                               games::measure_copy_colluder(), gp);
}

std::pair<bool, std::string> check_thresholds(const RunConfig& cfg, const games::Transcript& tr) {
    std::ostringstream out;
    bool ok = true;
    auto line = [&](const std::string& name, bool pass, double value) {
        out << (pass ? "PASS " : "FAIL ") << name << " = " << value << "\n";
        ok = ok && pass;
    };
    if (cfg.game == "roundtrip") {
        for (const auto& [name, rate] : tr.pass_rates) line(name, rate == 1.0, rate);
        return {ok, out.str()};
    }
    if (cfg.game == "key-test") {
        for (const auto& [name, rate] : tr.pass_rates) line(name, rate == 0.0, rate);
        return {ok, out.str()};
    }
    if (cfg.game == "collusion-demo") {
        double pass = tr.pass_rates.at("verification_all");
        double win = tr.pass_rates.at("ind_win");
        if (cfg.scheme == "strawman") {
            line("verification_all >= 0.99", pass >= 0.99, pass);
            line("ind_win >= 0.98", win >= 0.98, win);
        } else {
            line("verification_all <= 0.01", pass <= 0.01, pass);
            line("ind_win <= 0.01", win <= 0.01, win);
        }
        return {ok, out.str()};
    }
    // honest-adversary null results
    double win = tr.pass_rates.count("ind_win") ? tr.pass_rates.at("ind_win") : 0.0;
    line("ind_win in [0.45, 0.55]", win >= 0.45 && win <= 0.55, win);
    return {ok, out.str()};
}

}  // namespace

RunResult run(const RunConfig& cfg) {
    cfg.validate();
    RunResult res;
    res.transcript = cfg.game == "roundtrip" ? run_roundtrip(cfg) : run_game(cfg);
    auto [ok, summary] = check_thresholds(cfg, res.transcript);
    res.thresholds_ok = ok;
    res.summary = summary;
    return res;
}

nlohmann::json dump_key(const RunConfig& cfg) {
    cfg.validate();
    uint64_t s = games::trial_seed(cfg.seed, 0);
    RngStream rng(s, s ^ 0x452821e638d01377ULL);
    if (cfg.scheme == "skecd") {
        auto sk = skecd::kg(cfg.skecd_params(), rng);
        auto [ct, vk] = skecd::enc(sk, rng.bits(cfg.lambda), rng);
        return qreg::dump_state(ct.quantum);
    }
    if (cfg.scheme == "skecrskl") {
        auto msk = skecrskl::setup(cfg.skecrskl_params(), rng);
        return qreg::dump_state(skecrskl::kg(msk, rng).dk.state);
    }
    if (cfg.scheme == "pkecrskl") {
        prims::Registry reg;
        auto [ek, msk] = pkecrskl::setup(reg, cfg.pkecrskl_params(), rng);
        return qreg::dump_state(pkecrskl::kg(reg, msk, rng).first.state);
    }
    if (cfg.scheme == "skfecrskl") {
        prims::Registry reg;
        auto params = cfg.skfe_params();
        prims::FunctionalityFn F = [&params](const Bits& x, const Bits& y) -> std::optional<Bits> {
            return prims::hash_bits("skl.demo.F", {x, y}, params.effective_z_bits());
        };
        auto msk = feskl::skfe_skl_setup(reg, params, F, rng);
        return qreg::dump_state(feskl::skfe_skl_kg(reg, msk, rng.bits(params.y_bits), rng).key.state);
    }
    if (cfg.scheme == "abecrskl") {
        prims::Registry reg;
        auto params = cfg.abeskl_params();
        auto [pk, msk] = feskl::abe_skl_setup(reg, params, rng);
        return qreg::dump_state(
            feskl::abe_skl_kg(reg, msk, Bits::from_u64(1, params.y_bits()), rng).first.state);
    }
    if (cfg.scheme == "abecr2skl") {
        prims::Registry reg;
        auto params = cfg.cr2_params();
        auto [ek, msk] = cr2::setup(reg, params, rng);
        return qreg::dump_state(cr2::kg(reg, msk, rng.bits(params.y_bits), rng).first.state);
    }
    // strawman
    auto env = games::strawman_env(cfg.lambda)(rng);
    return qreg::dump_state(env->issue_key(rng));
}

}  // namespace skl::runner
