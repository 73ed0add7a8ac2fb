import numpy as np
import pytest

from sdsc import (
    ChannelObservation,
    ChannelSpec,
    ConfigError,
    DecoderConfig,
    construct,
    genie_segment_rates,
    make_code,
    ml_decode,
    sc_bit_decode,
    sc_symbol_decode,
)
from sdsc.channels import frame_rng, transmit_array
from sdsc.core import encode_array
from sdsc.decoders import BitDecoder, SymbolDecoder, ml_decode_batch, ml_score

from reference import (
    ProbDomainSC,
    brute_decision_llr,
    brute_symbol_argmax,
    ml_argmax_set,
)


def _random_frames(code, spec, frames, seed):
    u = np.zeros((frames, code.N), dtype=np.uint8)
    llr = np.empty((frames, code.N))
    for t in range(frames):
        rng = frame_rng(seed, t)
        u[t, code.info_indices] = rng.integers(0, 2, code.K, dtype=np.uint8)
        llr[t] = transmit_array(spec, encode_array(code, u[t]), rng)
    return u, llr


# ---------------------------------------------------------------------------
# bit-decision SC
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2, 8, 32])
def test_noiseless_decoding_recovers_data(m):
    code = construct(5, 16, "bec", 0.5)
    rng = np.random.default_rng(0)
    u = np.zeros(32, dtype=np.uint8)
    u[code.info_indices] = rng.integers(0, 2, 16)
    obs = ChannelObservation(transmit_array(ChannelSpec("bec", 0.0), encode_array(code, u),
                                            np.random.default_rng(1)))
    if m == 1:
        res = sc_bit_decode(code, obs)
    else:
        res = sc_symbol_decode(code, obs, DecoderConfig(symbol_size=m))
    assert np.array_equal(res.u_hat.bits, u)
    assert not res.tied


def test_two_bit_code_erased_tie():
    # both positions erased: the u_2 decision LLR is 0, resolved to 0, flagged
    code = make_code(2, (2,))
    res = sc_bit_decode(code, ChannelObservation([0.0, 0.0]))
    assert np.array_equal(res.u_hat.bits, [0, 0])
    assert res.tie_flags[1] is True or res.tie_flags[1] == True  # noqa: E712


def test_two_bit_code_certain_first_position_pins_u2():
    # llr = (+inf, 0): x1 = u1 xor u2 is certainly 0 and u1 is frozen to 0,
    # so u2 is certainly 0 (decision LLR +inf, no tie); the brute Eq.-2 sum
    # agrees
    code = make_code(2, (2,))
    llr = np.array([np.inf, 0.0])
    assert brute_decision_llr(llr, [0]) == np.inf
    res = sc_bit_decode(code, ChannelObservation(llr))
    assert np.array_equal(res.u_hat.bits, [0, 0])
    assert not res.tied
    assert res.per_symbol_metrics[1].runner_up_gap == np.inf


def test_decision_llrs_match_eq2_brute_force_awgn():
    code = construct(3, 4, "bec", 0.5)
    spec = ChannelSpec("awgn", 1.0, rate=0.5)
    dec = BitDecoder(code, batch=1)
    for seed in range(25):
        u, llr = _random_frames(code, spec, 1, 100 + seed)
        u_hat, lam, _ = dec.decode_batch(llr)
        prefix = []
        for j in range(8):
            want = brute_decision_llr(llr[0], prefix)
            got = lam[0, j]
            assert got == pytest.approx(want, rel=1e-9, abs=1e-12)
            prefix.append(int(u_hat[0, j]))


def test_decision_llrs_match_eq2_brute_force_bec():
    # compare LLR classes {+inf, -inf, 0}; NaN from the brute sum marks an
    # impossible prefix where Eq. 2 is undefined and any value is acceptable
    code = construct(3, 4, "bec", 0.5)
    rng = np.random.default_rng(11)
    dec = BitDecoder(code, batch=1)
    checked = 0
    for _ in range(120):
        llr = rng.choice([0.0, np.inf, -np.inf], size=8, p=[0.4, 0.3, 0.3])
        u_hat, lam, _ = dec.decode_batch(llr[None, :])
        prefix = []
        for j in range(8):
            want = brute_decision_llr(llr, prefix)
            if not np.isnan(want):
                assert lam[0, j] == want
                checked += 1
            prefix.append(int(u_hat[0, j]))
    assert checked > 300


def test_engine_matches_probability_domain_reference_on_bec():
    code = construct(5, 16, "bec", 0.5)
    spec = ChannelSpec("bec", 0.4)
    frames = 1500
    u, llr = _random_frames(code, spec, frames, 77)
    u_eng, _, ties = BitDecoder(code, batch=frames).decode_batch(llr)
    ref = ProbDomainSC(code)
    for t in range(frames):
        u_ref, ties_ref = ref.decode(llr[t])
        assert np.array_equal(u_eng[t], u_ref), f"frame {t}"
        assert np.array_equal(ties[t][code.info_mask], ties_ref[code.info_mask]), f"frame {t}"


def test_dead_prefix_is_total_and_deterministic():
    # frozen {1, 3, 4}: an erased tie mis-commits u2, then the frozen u3 is
    # forced against a certainty and the remaining decisions hit opposing
    # infinities; the decoder must stay finite and deterministic
    code = make_code(4, (2,))
    llr = np.array([0.0, np.inf, -np.inf, 0.0])
    res1 = sc_bit_decode(code, ChannelObservation(llr))
    res2 = sc_bit_decode(code, ChannelObservation(llr))
    assert np.array_equal(res1.u_hat.bits, res2.u_hat.bits)
    assert np.all(np.isfinite([m.log_likelihood for m in res1.per_symbol_metrics[:2]]) |
                  np.isinf([m.log_likelihood for m in res1.per_symbol_metrics[:2]]))


def test_minsum_rule_decodes_noiseless_and_differs_somewhere():
    code = construct(4, 8, "bec", 0.5)
    spec = ChannelSpec("awgn", 1.0, rate=0.5)
    u, llr = _random_frames(code, spec, 200, 5)
    exact = BitDecoder(code, DecoderConfig(1, "exact"), batch=200).decode_batch(llr)
    minsum = BitDecoder(code, DecoderConfig(1, "minsum"), batch=200).decode_batch(llr)
    assert not np.array_equal(exact[1], minsum[1])  # llrs differ
    # noiseless: both perfect
    u0, llr0 = _random_frames(code, ChannelSpec("bec", 0.0), 20, 6)
    for rule in ("exact", "minsum"):
        got, _, _ = BitDecoder(code, DecoderConfig(1, rule), batch=20).decode_batch(llr0)
        assert np.array_equal(got, u0)


# ---------------------------------------------------------------------------
# symbol-decision SC
# ---------------------------------------------------------------------------

def test_symbol_m1_equals_bit_decode():
    code = construct(5, 16, "bec", 0.5)
    for spec, seed in ((ChannelSpec("bec", 0.4), 21), (ChannelSpec("awgn", 2.0, rate=0.5), 22)):
        u, llr = _random_frames(code, spec, 800, seed)
        u_bit, _, ties_bit = BitDecoder(code, batch=800).decode_batch(llr)
        u_sym, _, _, ties_sym = SymbolDecoder(code, DecoderConfig(symbol_size=1), batch=800).decode_batch(llr)
        assert np.array_equal(u_bit, u_sym)
        assert np.array_equal(ties_bit.any(axis=1), ties_sym.any(axis=1))


def _walk_symbols_against_eq3(code, llr, M):
    """Assert the decoder's trajectory against the Eq.-3 brute argmax sets.

    Strict comparison runs until the committed prefix becomes impossible
    (all candidate probabilities zero); past that point the rule is
    undefined and only determinism is required.
    """
    res = sc_symbol_decode(code, ChannelObservation(llr), DecoderConfig(symbol_size=M))
    got = res.u_hat.bits
    prefix: list[int] = []
    for j in range(code.N // M):
        arg, best = brute_symbol_argmax(code, llr, prefix, M)
        if best == 0.0:
            return  # dead from here on
        seg = tuple(int(b) for b in got[j * M:(j + 1) * M])
        assert seg == min(arg), (j, seg, arg)
        assert bool(res.tie_flags[j]) == (len(arg) > 1), (j, arg, res.tie_flags[j])
        prefix.extend(seg)


@pytest.mark.parametrize("M", [1, 2, 4, 8])
def test_symbol_decode_matches_eq3_brute_force(M):
    code = construct(3, 4, "bec", 0.5)
    rng = np.random.default_rng(40 + M)
    for trial in range(50):
        if trial % 2 == 0:
            llr = rng.choice([0.0, np.inf, -np.inf], size=8, p=[0.45, 0.275, 0.275])
        else:
            llr = rng.normal(0.0, 2.0, 8)
        _walk_symbols_against_eq3(code, llr, M)


@pytest.mark.parametrize("M", [2, 4])
def test_symbol_decode_matches_eq3_on_low_rate_code(M):
    # different frozen layout exercises frozen bits inside symbols
    code = construct(3, 2, "bec", 0.5)
    rng = np.random.default_rng(55)
    for trial in range(30):
        llr = rng.choice([0.0, np.inf, -np.inf], size=8, p=[0.5, 0.25, 0.25])
        _walk_symbols_against_eq3(code, llr, M)


def test_symbol_size_must_divide_n():
    code = construct(3, 4, "bec", 0.5)
    with pytest.raises(ConfigError):
        sc_symbol_decode(code, ChannelObservation(np.zeros(8)), DecoderConfig(symbol_size=3))
    with pytest.raises(ConfigError):
        DecoderConfig(symbol_size=0)


def test_all_frozen_symbol_has_single_candidate():
    code = construct(5, 16, "bec", 0.5)  # first 8 positions all frozen
    u, llr = _random_frames(code, ChannelSpec("bec", 0.4), 1, 3)
    res = sc_symbol_decode(code, ChannelObservation(llr[0]), DecoderConfig(symbol_size=8))
    assert res.per_symbol_metrics[0].runner_up_gap == np.inf
    assert not res.tie_flags[0]


# ---------------------------------------------------------------------------
# exhaustive ML
# ---------------------------------------------------------------------------

def test_ml_noiseless_and_hand_example():
    # (4,2) code, one erasure that leaves the codeword unambiguous
    code = construct(2, 2, "bec", 0.5)
    assert code.info_set == (3, 4)
    u = np.zeros(4, dtype=np.uint8)
    u[code.info_indices] = (1, 0)
    x = encode_array(code, u)
    llr = np.where(x == 0, np.inf, -np.inf).astype(float)
    llr[0] = 0.0  # erase one position
    arg, _ = ml_argmax_set(code, llr)
    assert len(arg) == 1 and np.array_equal(arg[0], u)
    res = ml_decode(code, ChannelObservation(llr))
    assert np.array_equal(res.u_hat.bits, u)
    assert not res.tied


def test_ml_matches_brute_argmax_set():
    code = construct(3, 4, "bec", 0.5)
    rng = np.random.default_rng(60)
    for trial in range(60):
        if trial % 2 == 0:
            llr = rng.choice([0.0, np.inf, -np.inf], size=8, p=[0.5, 0.25, 0.25])
        else:
            llr = rng.normal(0.0, 1.5, 8)
        arg, best = ml_argmax_set(code, llr)
        res = ml_decode(code, ChannelObservation(llr))
        if best == 0.0:
            continue  # all-zero likelihoods: only determinism is required
        assert tuple(int(b) for b in res.u_hat.bits) == min(arg)
        assert bool(res.tie_flags[0]) == (len(arg) > 1)


def test_ml_guard():
    code = construct(5, 25, "bec", 0.5)
    with pytest.raises(ConfigError):
        ml_decode(code, ChannelObservation(np.zeros(32)))


def test_symbol_m_equals_n_matches_ml_exhaustively():
    # (8,4): every data word against a set of erasure patterns; where tie
    # flags fire, both outputs must be members of the ML argmax set
    code = construct(3, 4, "bec", 0.5)
    rng = np.random.default_rng(61)
    patterns = [rng.random(8) < p for p in (0.1, 0.3, 0.5, 0.7) for _ in range(8)]
    sdec = SymbolDecoder(code, DecoderConfig(symbol_size=8), batch=1)
    hard = 0
    for mask in patterns:
        for word in range(16):
            u = np.zeros(8, dtype=np.uint8)
            u[code.info_indices] = [(word >> k) & 1 for k in (3, 2, 1, 0)]
            x = encode_array(code, u)
            llr = np.where(x == 0, np.inf, -np.inf).astype(float)
            llr[mask] = 0.0
            u_sym, _, _, tie_sym = sdec.decode_batch(llr[None, :])
            res_ml = ml_decode(code, ChannelObservation(llr))
            if np.array_equal(u_sym[0], res_ml.u_hat.bits):
                continue
            hard += 1
            assert tie_sym.any() and res_ml.tied
            s1 = ml_score(code, llr, u_sym[0])
            s2 = ml_score(code, llr, res_ml.u_hat.bits)
            assert s1 == s2, "tied outputs must score identically"
    # disagreements may only ever be tie-set members; a few are expected
    assert hard < len(patterns) * 16


def test_ml_batch_matches_single():
    code = construct(4, 8, "bec", 0.5)
    u, llr = _random_frames(code, ChannelSpec("bec", 0.4), 64, 62)
    ub, tie = ml_decode_batch(code, llr)
    for t in range(0, 64, 7):
        res = ml_decode(code, ChannelObservation(llr[t]))
        assert np.array_equal(ub[t], res.u_hat.bits)
        assert bool(tie[t]) == res.tied


# ---------------------------------------------------------------------------
# genie-aided segment rates
# ---------------------------------------------------------------------------

def test_genie_zero_frames():
    code = construct(3, 4, "bec", 0.5)
    sc, ml = genie_segment_rates(code, ChannelSpec("bec", 0.4), DecoderConfig(symbol_size=4), 0, 1)
    assert np.all(sc.trials == 0) and np.all(ml.trials == 0)
    assert np.all(sc.errors == 0) and np.all(ml.errors == 0)


def test_genie_all_frozen_segment_never_errs():
    code = construct(5, 16, "bec", 0.5)  # symbol 0 is all-frozen at M=8
    sc, ml = genie_segment_rates(code, ChannelSpec("bec", 0.5), DecoderConfig(symbol_size=8), 400, 7)
    assert sc.errors[0] == 0 and ml.errors[0] == 0
    assert sc.trials[0] == 400 and ml.trials[0] == 400
    # trials shrink along the chain: only frames with a still-correct prefix count
    assert np.all(np.diff(sc.trials) <= 0) and np.all(np.diff(ml.trials) <= 0)


def test_genie_ml_never_worse_per_segment():
    code = construct(5, 16, "bec", 0.5)
    sc, ml = genie_segment_rates(code, ChannelSpec("bec", 0.4), DecoderConfig(symbol_size=8), 4000, 11)
    p, q = sc.rates, ml.rates
    sig = np.sqrt(p * (1 - p) / np.maximum(sc.trials, 1) + q * (1 - q) / np.maximum(ml.trials, 1))
    assert np.all(p >= q - 4 * sig)


def test_genie_product_formula_reproduces_fer():
    # 1 - prod(1 - p_hat_i) must match the end-to-end FER of the matching
    # decoder within Monte Carlo tolerance (identical frames: exact pairing)
    code = construct(5, 16, "bec", 0.5)
    spec = ChannelSpec("bec", 0.4)
    frames, seed, M = 6000, 29, 8
    sc, ml = genie_segment_rates(code, spec, DecoderConfig(symbol_size=M), frames, seed)
    u = np.zeros((frames, code.N), dtype=np.uint8)
    llr = np.empty((frames, code.N))
    for t in range(frames):
        rng = frame_rng(seed, t)
        u[t, code.info_indices] = rng.integers(0, 2, code.K, dtype=np.uint8)
        llr[t] = transmit_array(spec, encode_array(code, u[t]), rng)
    u_bit, _, _ = BitDecoder(code, batch=frames).decode_batch(llr)
    u_sym, _, _, _ = SymbolDecoder(code, DecoderConfig(symbol_size=M), batch=frames).decode_batch(llr)
    for stats, u_hat in ((sc, u_bit), (ml, u_sym)):
        fer = np.any(u_hat != u, axis=1).mean()
        prod = 1.0 - np.prod(1.0 - stats.rates)
        # identical frames underlie both sides, so the product decomposition
        # is the same empirical quantity up to per-segment binomial noise
        sigma = np.sqrt(np.sum(stats.rates * (1 - stats.rates) / np.maximum(stats.trials, 1)))
        assert abs(fer - prod) <= max(4 * sigma, 1e-12), (fer, prod, sigma)


def test_genie_matches_per_frame_replay():
    # cross-check the batched genie (with its state undo/redo) against a
    # per-frame replay over the brute Eq.-2 / Eq.-3 oracles; AWGN keeps every
    # decision quantity finite and well-defined
    code = construct(4, 8, "bec", 0.5)
    spec = ChannelSpec("awgn", 1.0, rate=0.5)
    M, S, frames, seed = 4, 4, 200, 23
    sc, ml = genie_segment_rates(code, spec, DecoderConfig(symbol_size=M), frames, seed)
    err_sc = np.zeros(S, dtype=int)
    err_ml = np.zeros(S, dtype=int)
    trials_sc = np.zeros(S, dtype=int)
    trials_ml = np.zeros(S, dtype=int)
    for f in range(frames):
        rng = frame_rng(seed, f)
        u = np.zeros(code.N, dtype=np.uint8)
        u[code.info_indices] = rng.integers(0, 2, code.K, dtype=np.uint8)
        llr = transmit_array(spec, encode_array(code, u), rng)
        ok_sc = ok_ml = True
        for j in range(S):
            arg, _ = brute_symbol_argmax(code, llr, list(u[:j * M]), M)
            ml_wrong = min(arg) != tuple(u[j * M:(j + 1) * M])
            # bit-decision within the segment, true prefix outside
            prefix = list(u[:j * M])
            sc_wrong = False
            for t in range(M):
                i = j * M + t
                if not code.info_mask[i]:
                    b = 0
                else:
                    lam = brute_decision_llr(llr, prefix)
                    b = int(lam < 0)
                sc_wrong |= b != u[i]
                prefix.append(b)
            trials_sc[j] += ok_sc
            trials_ml[j] += ok_ml
            err_sc[j] += sc_wrong and ok_sc
            err_ml[j] += ml_wrong and ok_ml
            ok_sc = ok_sc and not sc_wrong
            ok_ml = ok_ml and not ml_wrong
    assert np.array_equal(ml.errors, err_ml)
    assert np.array_equal(sc.errors, err_sc)
    assert np.array_equal(ml.trials, trials_ml)
    assert np.array_equal(sc.trials, trials_sc)
