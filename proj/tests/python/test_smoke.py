import math

import pytest

import tbt

CONFIG = """
channel.n1 = 1
channel.base_taps = 1.0, 0.4
channel.snr_db = 25
equalizer.kind = TBT
equalizer.depth = 1
equalizer.h = 4
run.train_length = 200
run.total_symbols = 1000
run.seed = 5
"""


def test_combinatorics():
    assert [tbt.alpha(d) for d in range(5)] == [1, 2, 5, 26, 677]
    assert len(tbt.enumerate_models(2)) == 5
    assert tbt.nearest_common_ancestor(4, 5) == (2, 1)
    for j in range(1, 8):
        for k in range(1, 8):
            assert tbt.rho(j, k, 2) == tbt.rho_oracle(j, k, 2)


def test_soft_separator():
    assert tbt.soft_separator([1.0, 1.0], [0.0, 0.0]) == pytest.approx(0.5)
    assert tbt.soft_separator([0.0, 1.0], [0.0, math.log(3.0)]) == pytest.approx(0.25)


def test_channel_propagate():
    cfg = tbt.ChannelConfig()
    cfg.causal_taps = 1
    cfg.anticausal_taps = 0
    cfg.base_taps = [1.0, 0.5]
    cfg.noiseless = True
    bits = [1, -1, 1, 1]
    received = tbt.propagate(cfg, bits)
    assert len(received) == len(bits)
    assert received[1] == pytest.approx(-1.0 + 0.5)


def test_step_learns_and_is_deterministic():
    bits = tbt.training_sequence(400, 7)
    outs = []
    for _ in range(2):
        state = tbt.init_state(depth=2, h=1, mu=0.1, eta=0.1, zeta=0.05, seed=3)
        errors = []
        for b in bits:
            out = tbt.step(state, [float(b), 1.0], b)
            errors.append(out.soft_error)
        outs.append(errors)
    assert outs[0] == outs[1]
    head = sum(e * e for e in outs[0][:50])
    tail = sum(e * e for e in outs[0][-50:])
    assert tail < head
    assert len(state.node_weights) == 7


def test_dfe_extend():
    assert tbt.dfe_extend([0.5, -0.2], [1, -1]) == [0.5, -0.2, 1.0, -1.0, 1.0]
    with pytest.raises(Exception):
        tbt.dfe_extend([0.5], [2])


def test_run_trial():
    result = tbt.run_trial(CONFIG, seed=5)
    assert 0.0 <= result["ber"] <= 1.0
    assert result["final_nmse"] < 1.0
    assert len(result["soft_errors"]) == 1000
    assert set(result["decisions"]) <= {-1, 1}
    again = tbt.run_trial(CONFIG, seed=5)
    assert result["soft_errors"] == again["soft_errors"]
