import numpy as np
import pytest

from emlab.grid import GridSpec
from emlab.identities import (IDENTITY_IDS, AnalyticScalarField,
                              AnalyticVectorField, TrigPoly, TrigTerm,
                              check_identity, check_identity_discrete,
                              estimate_order, identity_refinement_table,
                              identity_report_csv, random_scalar_field,
                              random_vector_field, run_identity_report)

SEED = 1234


def fields(seed=SEED, degree=3):
    rng = np.random.default_rng(seed)
    return (random_vector_field(rng, degree=degree),
            random_vector_field(rng, degree=degree),
            random_scalar_field(rng, degree=degree))


def test_trig_poly_derivative_closed_form():
    poly = TrigPoly([TrigTerm(2.0, (1, 0, 2), (0.3, 0.1, -0.2))])
    dpoly = poly.derivative(0)
    x = np.array([0.7])
    y = np.array([0.0])
    z = np.array([1.1])
    expected = -2.0 * np.sin(x + 0.3) * np.cos(0.1) * np.cos(2 * z - 0.2)
    np.testing.assert_allclose(dpoly.evaluate(x, y, z), expected, rtol=1e-14)
    # constant along an axis means the derivative term drops out
    assert poly.derivative(1).terms == []


def test_self_check_rejects_inconsistent_derivatives():
    class LyingPoly(TrigPoly):
        def derivative(self, axis):
            # wrong by a factor of two
            base = super().derivative(axis)
            return TrigPoly([TrigTerm(2.0 * t.amplitude, t.wavenumbers, t.phases)
                             for t in base.terms])

    poly = LyingPoly([TrigTerm(1.0, (1, 1, 0), (0.0, 0.0, 0.0))])
    with pytest.raises(ValueError):
        AnalyticScalarField(poly)


def test_constant_fields_all_identities_zero():
    const_vec = AnalyticVectorField(
        [TrigPoly([TrigTerm(c, (0, 0, 0), (0.0, 0.0, 0.0))]) for c in (1.0, -2.0, 0.5)],
        self_check=False)
    const_scalar = AnalyticScalarField(
        TrigPoly([TrigTerm(3.0, (0, 0, 0), (0.0, 0.0, 0.0))]), self_check=False)
    grid = GridSpec.cube(8)
    for identity in IDENTITY_IDS:
        assert check_identity(identity, const_vec, const_vec, const_scalar,
                              grid) == 0.0


def test_triple_product_on_random_constant_vectors():
    rng = np.random.default_rng(7)
    grid = GridSpec.cube(4)
    for _ in range(20):
        vecs = []
        for _ in range(3):
            comps = [TrigPoly([TrigTerm(float(c), (0, 0, 0), (0.0, 0.0, 0.0))])
                     for c in rng.normal(size=3)]
            vecs.append(AnalyticVectorField(comps, self_check=False))
        a, b, c = vecs
        dev = check_identity("bac_cab", a, b, None, grid, c=c)
        assert dev <= 1e-14


def test_analytic_identities_below_tolerance():
    a, b, f = fields()
    grid = GridSpec.cube(32)
    for identity in IDENTITY_IDS:
        assert check_identity(identity, a, b, f, grid) < 1e-10


def test_unknown_identity_rejected():
    a, b, f = fields()
    with pytest.raises(ValueError):
        check_identity("grad_of_curl", a, b, f, GridSpec.cube(8))
    g = GridSpec.cube(8)
    with pytest.raises(ValueError):
        check_identity_discrete("nope", a.sample(g), b.sample(g), f.sample(g))


def test_discrete_identities_second_order():
    a, b, f = fields()
    for identity in IDENTITY_IDS:
        table = identity_refinement_table(identity, a, b, f, ns=(16, 32, 64))
        devs = [d for _, d in table]
        if max(devs) < 1e-12:
            continue  # pure pointwise algebra sits at round-off
        finest_order = np.log2(devs[-2] / devs[-1])
        assert 1.7 <= finest_order <= 2.3, (identity, devs)


def test_discrete_bac_cab_at_round_off():
    a, b, f = fields()
    g = GridSpec.cube(16)
    assert check_identity_discrete("bac_cab", a.sample(g), b.sample(g),
                                   f.sample(g)) <= 1e-12


def test_estimate_order_recovers_slope():
    hs = [0.4, 0.2, 0.1]
    devs = [16.0 * h**2 for h in hs]
    assert estimate_order(hs, devs) == pytest.approx(2.0, abs=1e-12)
    assert np.isnan(estimate_order(hs, [0.0, 0.0, 0.0]))


def test_report_reproducible_and_csv_stable():
    rows1 = run_identity_report(seed=SEED, ns=(16, 32), degree=2,
                                analytic_grid_n=16)
    rows2 = run_identity_report(seed=SEED, ns=(16, 32), degree=2,
                                analytic_grid_n=16)
    assert identity_report_csv(rows1) == identity_report_csv(rows2)
    csv = identity_report_csv(rows1)
    assert csv.splitlines()[0] == "identity,kind,h,deviation,order_estimate"
    assert all(r["seed"] == SEED for r in rows1)
