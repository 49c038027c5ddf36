from ivo import interval as iv
from ivo import laws
from ivo.interval import Interval
from ivo.rng import stream


def test_suite_on_small_sample():
    reps = {r.name: r for r in laws.law_suite(stream(3, "laws"), n=2000)}
    failing = {k for k, r in reps.items() if r.failed}
    # the cancellation law in its equality form does not hold in general
    assert failing == {"metric_gh_cancel"}
    assert reps["metric_gh_cancel"].witnesses[0]["residual"] > 1e-3


def test_faulty_gh_diff_is_caught(monkeypatch):
    monkeypatch.setattr(iv, "gh_diff", lambda a, b: Interval(a.lo - b.lo, a.lo - b.lo + abs(a.hi - b.hi)))
    rep = laws.law_check("order_preceq_gh", stream(1, "x"), n=2000)
    assert rep.failed
    assert rep.anchor.startswith("Lemma 2.1")


def test_replay_reproduces_witness():
    rep = laws.law_check("metric_gh_cancel", stream(5, "x"), n=500)
    w = rep.witnesses[0]
    again = laws.replay_law({k: (v.to_list() if isinstance(v, Interval) else v) for k, v in w["replay"].items()})
    assert again.failed
    assert again.witnesses[0]["residual"] == w["residual"]
