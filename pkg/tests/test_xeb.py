import math

import numpy as np
import pytest

import rcsbench as rb
from rcsbench.sampleset import SampleSet
from rcsbench.xeb import DegenerateSamplesError, QubitOrderError

from conftest import first_fsim_pair


def make_circuit(rows, cols, cycles, seed=0, sequence=None):
    kw = {} if sequence is None else {"sequence": sequence}
    qubits, sched = rb.grid_pattern_schedule(rows, cols, **kw)
    return rb.generate_rcs(qubits, sched, cycles, seed=seed)


def self_xeb(circ):
    p, _ = rb.ideal_probabilities(circ)
    return p.size * float(p @ p) - 1.0


def test_estimator_matches_hand_arithmetic():
    circ = make_circuit(1, 3, 4, seed=6)
    p, order = rb.ideal_probabilities(circ)
    data = [0, 5, 5, 2, 7, 1, 0, 0, 3, 6]
    ss = SampleSet(order, data)
    est = rb.linear_xeb(ss, circ)
    # plain-python recomputation of the estimator and its stderr
    vals = [float(p[i]) for i in data]
    n = len(vals)
    mean = sum(vals) / n
    var = sum((v - mean) ** 2 for v in vals) / (n - 1)
    assert abs(est.f_xeb - (8 * mean - 1)) < 1e-15
    assert abs(est.stderr - 8 * math.sqrt(var / n)) < 1e-15
    assert est.n_samples == n
    assert est.n_qubits == 3


def test_estimator_reorder_invariance():
    circ = make_circuit(2, 2, 4, seed=1)
    ss = rb.sample(circ, 500, seed=2)
    shuffled = SampleSet(ss.qubit_order, np.random.default_rng(0).permutation(ss.data))
    a = rb.linear_xeb(ss, circ)
    b = rb.linear_xeb(shuffled, circ)
    # summation order inside the variance may differ by an ulp
    assert abs(a.f_xeb - b.f_xeb) < 1e-14
    assert abs(a.stderr - b.stderr) < 1e-14


def test_estimator_rejects_wrong_order():
    circ = make_circuit(1, 3, 2)
    ss = rb.sample(circ, 50, seed=0)
    bad = SampleSet(tuple(reversed(ss.qubit_order)), ss.data)
    with pytest.raises(QubitOrderError):
        rb.linear_xeb(bad, circ)


def test_stderr_fallback_for_degenerate_samples():
    circ = make_circuit(1, 2, 2, seed=0)
    _, order = rb.ideal_probabilities(circ)
    one = rb.linear_xeb(SampleSet(order, [1]), circ)
    assert one.stderr == 1.0
    same = rb.linear_xeb(SampleSet(order, [2, 2, 2, 2]), circ)
    assert same.stderr == 0.5  # zero variance -> 1/sqrt(4)


def test_stderr_scales_with_sqrt_n():
    circ = make_circuit(3, 4, 8, seed=3)
    small = rb.linear_xeb(rb.sample_white_noise(circ, 0.5, 4000, seed=11), circ)
    big = rb.linear_xeb(rb.sample_white_noise(circ, 0.5, 8000, seed=12), circ)
    ratio = small.stderr / big.stderr
    assert abs(ratio - math.sqrt(2)) < 0.1 * math.sqrt(2)


def test_estimator_unbiased_on_white_noise():
    # 30 independent fixtures at F = 0.5.  Per instance the estimator's
    # expectation is F times that instance's self-overlap D*sum(p^2)-1,
    # so pool against the exact conditional target rather than F alone.
    fs, ses, targets = [], [], []
    for k in range(30):
        circ = make_circuit(3, 4, 8, seed=100 + k)
        ss = rb.sample_white_noise(circ, 0.5, 2000, seed=1000 + k)
        est = rb.linear_xeb(ss, circ)
        fs.append(est.f_xeb)
        ses.append(est.stderr)
        targets.append(0.5 * self_xeb(circ))
    mean = sum(fs) / len(fs)
    target = sum(targets) / len(targets)
    pooled = math.sqrt(sum(se**2 for se in ses)) / len(ses)
    assert abs(mean - target) < 3 * pooled
    # the ensemble target itself is close to F once depth has scrambled
    assert abs(target - 0.5) < 0.05


def test_curve_single_point_equals_linear_xeb():
    circ = make_circuit(2, 2, 3, seed=4)
    ss = rb.sample(circ, 300, seed=5)
    [pt] = rb.xeb_curve({3: [(circ, ss)]})
    direct = rb.linear_xeb(ss, circ)
    assert pt.cycles == 3
    assert pt.f_xeb == direct.f_xeb
    assert pt.stderr == direct.stderr
    assert pt.estimates == (direct,)


def test_curve_pooling_arithmetic():
    pairs = []
    for k in range(3):
        circ = make_circuit(2, 2, 4, seed=20 + k)
        pairs.append((circ, rb.sample(circ, 400, seed=30 + k)))
    [pt] = rb.xeb_curve({4: pairs})
    ests = [rb.linear_xeb(s, c) for c, s in pairs]
    assert abs(pt.f_xeb - sum(e.f_xeb for e in ests) / 3) < 1e-15
    assert abs(pt.stderr - math.sqrt(sum(e.stderr**2 for e in ests)) / 3) < 1e-15
    assert [p.cycles for p in rb.xeb_curve({8: pairs, 4: pairs})] == [4, 8]
    with pytest.raises(ValueError):
        rb.xeb_curve({4: []})


def test_decay_rate_recovered_from_synthetic_truth():
    # F(m) = 0.9^m white-noise fixtures; slope of ln f over m ~ ln 0.9
    depths = (12, 16, 20, 24)
    instances = {}
    for m in depths:
        rows = []
        for k in range(3):
            circ = make_circuit(3, 4, m, seed=500 + 10 * m + k)
            ss = rb.sample_white_noise(circ, 0.9**m, 6000, seed=700 + 10 * m + k)
            rows.append((circ, ss))
        instances[m] = rows
    curve = rb.xeb_curve(instances)
    assert all(pt.f_xeb > 0 for pt in curve)
    slope = np.polyfit([pt.cycles for pt in curve], [math.log(pt.f_xeb) for pt in curve], 1)[0]
    assert abs(slope - math.log(0.9)) < 0.1 * abs(math.log(0.9))


def test_forecast_overlay_decreases():
    from conftest import grid_model

    model = grid_model(3, 4)
    for m1, m2 in ((4, 8), (8, 16)):
        f1 = rb.forecast_fidelity(make_circuit(3, 4, m1), model).f_est
        f2 = rb.forecast_fidelity(make_circuit(3, 4, m2), model).f_est
        assert f2 < f1


# ---- fit_fsim ----


def small_fit_fixture():
    circ = make_circuit(1, 2, 6, seed=40, sequence=("C",))
    pair = first_fsim_pair(circ)
    ss = rb.sample(circ, 2000, seed=41)
    return circ, pair, ss


def test_fit_validates_input():
    circ, pair, ss = small_fit_fixture()
    with pytest.raises(ValueError):
        rb.fit_fsim(ss, circ, (5, 6), (1.0, 0.0))
    with pytest.raises(DegenerateSamplesError):
        rb.fit_fsim(SampleSet(ss.qubit_order, ss.data[:99]), circ, pair, (1.0, 0.0))
    with pytest.raises(ValueError):
        rb.fit_fsim(ss, circ, pair, (1.0, 0.0), budget=2)
    with pytest.raises(ValueError):
        rb.fit_fsim(ss, circ, pair, (1.0, 0.0), step=0.0)
    with pytest.raises(QubitOrderError):
        bad = SampleSet(tuple(reversed(ss.qubit_order)), ss.data)
        rb.fit_fsim(bad, circ, pair, (1.0, 0.0))


def test_fit_never_worse_than_init_and_traces_everything():
    circ, pair, ss = small_fit_fixture()
    init = (1.2, -0.7)
    res = rb.fit_fsim(ss, circ, pair, init, budget=120)
    assert res.trace[0][:2] == init
    obj_at_init = res.trace[0][2]
    assert res.objective >= obj_at_init
    assert res.objective == max(t[2] for t in res.trace)
    assert len(res.trace) <= 120
    assert 0.0 <= res.theta <= math.pi
    assert -math.pi <= res.phi <= math.pi
    # returned objective is reproducible from the returned parameters
    re_sim = rb.replace_fsim_params(circ, pair, res.theta, res.phi)
    again = rb.linear_xeb(ss, re_sim)
    assert abs(again.f_xeb - res.objective) < 1e-12


def test_fit_clips_init_into_domain():
    circ, pair, ss = small_fit_fixture()
    res = rb.fit_fsim(ss, circ, pair, (4.0, -7.0), budget=60)
    assert res.trace[0][0] == math.pi
    assert res.trace[0][1] == -math.pi
    assert 0.0 <= res.theta <= math.pi


def test_fit_is_deterministic():
    circ, pair, ss = small_fit_fixture()
    a = rb.fit_fsim(ss, circ, pair, (1.0, 0.5), budget=80)
    b = rb.fit_fsim(ss, circ, pair, (1.0, 0.5), budget=80)
    assert a == b


def test_fit_recovers_planted_params_from_nominal_init():
    # plant (1.3, 0.4) on one pair, start the fit at the design point (pi/2, 0)
    qubits, sched = rb.grid_pattern_schedule(3, 5)
    base = rb.generate_rcs(qubits, sched, 12, seed=321)
    pair = first_fsim_pair(base)
    planted = rb.replace_fsim_params(base, pair, 1.3, 0.4)
    ss = rb.sample(planted, 100_000, seed=77)
    res = rb.fit_fsim(ss, base, pair, (math.pi / 2, 0.0), budget=300)
    assert abs(res.theta - 1.3) < 0.02
    assert abs(res.phi - 0.4) < 0.02


def test_fit_from_planted_truth_stays_put():
    # init at the generating parameters: nothing to gain beyond noise level
    qubits, sched = rb.grid_pattern_schedule(3, 5)
    base = rb.generate_rcs(qubits, sched, 12, seed=321)
    pair = first_fsim_pair(base)
    th, ph = math.pi / 2, math.pi / 6
    planted = rb.replace_fsim_params(base, pair, th, ph)
    ss = rb.sample(planted, 100_000, seed=78)
    baseline = rb.linear_xeb(ss, planted)
    res = rb.fit_fsim(ss, base, pair, (th, ph), budget=200)
    assert res.objective >= baseline.f_xeb  # trace includes init itself
    assert res.objective - baseline.f_xeb < baseline.stderr
    assert abs(res.theta - th) < 0.05 and abs(res.phi - ph) < 0.05
