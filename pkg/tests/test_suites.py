import json

import pytest

from shearwitt.suites import (
    SUITES,
    SuiteConfig,
    SuiteError,
    canonical_json,
    corpus_hash,
    invariants_of,
    run_suite,
    strip_timing,
)


@pytest.mark.parametrize("kw", [dict(precision=1), dict(precision=5, bound=4), dict(support=1), dict(samples=0),
                                dict(p=5), dict(n=(4,)), dict(n=()), dict(scale=3), dict(budget=2**30)])
def test_config_validation(kw):
    with pytest.raises(SuiteError):
        SuiteConfig(**kw).validate()


def test_doubled_scales_bounds_only():
    cfg = SuiteConfig(seed=3, bound=10, support=5)
    d = cfg.doubled()
    assert (d.scale, d.eff_bound, d.eff_support) == (2, 20, 10)
    assert d.seed == 3 and d.samples == cfg.samples


def test_unknown_suite():
    with pytest.raises(SuiteError, match="unknown suite"):
        run_suite("nope")


def test_corpus_hash_is_stable():
    assert corpus_hash() == corpus_hash() and len(corpus_hash()) == 16


def test_constants_report_shape():
    rep = run_suite("constants", SuiteConfig(samples=20))
    assert rep["ok"] and rep["failures"] == 0
    assert set(rep) >= {"suite", "config", "corpus_hash", "cells", "invariants", "wall_time"}
    json.dumps(rep)
    assert set(invariants_of(rep)) == {"constants"}


def test_strip_timing_and_canonical_json():
    a = {"x": 1, "wall_time": 2.0, "cells": [{"elapsed": 1, "k": 2}]}
    b = {"cells": [{"k": 2, "elapsed": 9}], "x": 1, "wall_time": 7.5}
    assert canonical_json(strip_timing(a)) == canonical_json(strip_timing(b))


def test_reruns_are_identical():
    cfg = SuiteConfig(samples=15)
    a = run_suite("witt-laws", cfg)
    b = run_suite("witt-laws", cfg)
    assert canonical_json(strip_timing(a)) == canonical_json(strip_timing(b))


def test_registry_names():
    assert set(SUITES) == {"witt-laws", "constants", "divided-powers", "sheared-exactness", "frame-axioms",
                           "duality", "deformation", "points-corpus"}


def test_scale_free_keys():
    from shearwitt.suites import scale_free

    assert scale_free("sW(F2[t]/(t^2);N=8)/t") == scale_free("sW(F2[t]/(t^2);N=4)/t") == "sW(F2[t]/(t^2))/t"
    assert scale_free("W_6(F3[t]/(t^2))/t") == "W(F3[t]/(t^2))/t"
