import dataclasses

import numpy as np
import pytest

import pdm2d.identities as ids
from pdm2d.model import ModelParams, psi_state
from pdm2d.operators import build_operator
from pdm2d.suites import smooth_probe


@pytest.mark.parametrize("k", [0.7, 2.5])
@pytest.mark.parametrize("identity", ids.IDENTITIES)
def test_identity_passes_on_non_eigen_probe(identity, k):
    p = ModelParams(1.4, k, 0.3)
    rep = ids.verify_identity(identity, p, smooth_probe(p))
    assert rep.passed, rep.to_dict()
    assert rep.mode == "analytic" and rep.threshold == ids.ANALYTIC_THRESHOLD


def test_superalgebra_pair_probe_and_note():
    p = ModelParams()
    rep = ids.verify_identity("superalgebra", p, (psi_state(p, 0, 1), smooth_probe(p)))
    d = rep.to_dict()
    assert d["pass"] and "diag(R, R1)" in d["note"]
    assert {"identity", "probe", "residual_L2", "residual_sup", "pass"} <= set(d)


def test_grid_probe_passes():
    p = ModelParams()
    g = ids.cutoff_probe(ids.probe_grid(p, n=320), seed=4)
    rep = ids.verify_identity("R_definition", p, g)
    assert rep.mode == "grid" and rep.passed


@pytest.mark.parametrize("identity", ["intertwine_2d", "commute_HR", "shape_invariance_H"])
def test_perturbed_partner_is_detected(identity, monkeypatch):
    """Negative control: a slightly wrong H1 must fail the checks that use it."""
    real = ids.build_operator

    def tampered(kind, p, l=None):
        op = real(kind, p) if l is None else real(kind, p, l)
        if kind == "H1":
            c0 = op.c_0
            op = dataclasses.replace(op, c_0=lambda x, y: c0(x, y) + 1e-4 * np.cos(x))
        return op

    monkeypatch.setattr(ids, "build_operator", tampered)
    p = ModelParams()
    rep = ids.verify_identity(identity, p, smooth_probe(p))
    assert not rep.passed
    assert max(rep.residual_L2, rep.residual_sup) > 1e-6


def test_unknown_identity_and_bad_probe():
    p = ModelParams()
    with pytest.raises(ValueError):
        ids.verify_identity("no_such", p, smooth_probe(p))
    with pytest.raises(TypeError):
        ids.verify_identity("commute_HR", p, 3.0)


def test_cutoff_probe_vanishes_near_edges():
    p = ModelParams()
    g = ids.probe_grid(p, n=64)
    f = ids.cutoff_probe(g, seed=1)
    assert np.all(f.values[:3] == 0) and np.all(f.values[:, -3:] == 0)
    assert build_operator("H", p).order == 2
