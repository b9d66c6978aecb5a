import pytest

from starfield import verify
from starfield.serialize import dumps
from starfield.verify import REGISTRY, SUITES, RunConfig, checks, run_custom, run_report, run_suite


@pytest.mark.parametrize("kw", [{"order": 1}, {"window": 0}, {"samples": 0}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        RunConfig(**kw)


def test_config_record_drops_runtime_fields():
    rec = RunConfig(seed=3, threads=4, timing=True).as_record()
    assert rec == {"seed": 3, "order": 6, "window": 2, "samples": None}


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("STARFIELD_THREADS", "3")
    assert RunConfig().workers() == 3
    assert RunConfig(threads=2).workers() == 2
    monkeypatch.setenv("STARFIELD_THREADS", "many")
    assert RunConfig().workers() == 1


def test_every_suite_has_checks():
    assert {c.suite for c in REGISTRY.values()} == set(SUITES)
    assert checks() == sorted(REGISTRY)
    for s in SUITES:
        assert checks(s)
    assert checks(prefix="rieffel.") == checks("rieffel")


def test_conventions_are_known():
    for c in REGISTRY.values():
        assert set(c.conventions) <= set(verify.CONVENTIONS)


def test_suite_is_deterministic():
    cfg = RunConfig(seed=5, samples=10)
    a = dumps(run_suite("crossed-dirac", cfg))
    b = dumps(run_suite("crossed-dirac", cfg))
    assert a == b
    assert '"status": "pass"' in a


def test_seed_changes_samples():
    r1 = verify.seeded_stream(RunConfig(seed=1), "x").random()
    r2 = verify.seeded_stream(RunConfig(seed=2), "x").random()
    assert r1 != r2


def test_threads_match_serial():
    serial = run_report(RunConfig(seed=2, samples=5, threads=1), ["groupoid", "rieffel"])
    pooled = run_report(RunConfig(seed=2, samples=5, threads=2), ["groupoid", "rieffel"])
    assert dumps(serial) == dumps(pooled)


def test_timing_is_opt_in():
    rep = run_suite("crossed-dirac", RunConfig(samples=2))
    assert "timing" not in rep and all("seconds" not in r for r in rep["checks"])
    rep = run_suite("crossed-dirac", RunConfig(samples=2, timing=True))
    assert "timing" in rep and all("seconds" in r for r in rep["checks"])


def test_failing_check_carries_witness():
    def bad():
        verify._require(False, "identity failed", {"f": "e_(1,0)"})

    def crash():
        raise ZeroDivisionError("boom")

    rep = run_custom("demo", [("demo.bad", bad), ("demo.crash", crash), ("demo.ok", lambda: {"n": 1})],
                     RunConfig())
    assert rep["status"] == "fail"
    by = {r["name"]: r for r in rep["checks"]}
    assert by["demo.bad"]["witness"] == {"f": "e_(1,0)"}
    assert by["demo.bad"]["details"]["reason"] == "identity failed"
    assert "ZeroDivisionError" in by["demo.crash"]["details"]["reason"]
    assert by["demo.ok"]["status"] == "pass" and "witness" not in by["demo.ok"]


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_poisson_check_any_constant_tensor_on_trivial_group():
    from starfield import fixtures
    from starfield.poisson import PoissonTensor

    m = fixtures.get("trivial-T2")
    P = PoissonTensor([[0, 1], [-1, 0]], m)
    cfg = RunConfig(window=1, samples=3)
    rep = run_custom("poisson", [("p", lambda: verify.poisson_check(m, P, cfg, verify.seeded_stream(cfg, "p")))], cfg)
    assert rep["status"] == "pass"
