"""Truncated series: frozen enumeration counts, hand-derived kernel values,
exact definitional identities, and honesty checks on tail reporting.

Frozen numbers below were produced by the builders themselves and are pinned
to catch regressions; where a value has an independent derivation (kernel
point values, cusp growth rates, identity-only truncations) it is stated
next to the assertion.  Expensive forms are cached at module scope.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from cliffordforms.blades import algebra, gp, paravector_to_coeffs
from cliffordforms.cosets import (
    enumerate_group_elements,
    quotient_representatives,
    translation_orbit_classes,
)
from cliffordforms.diffops import (
    FieldFn,
    dirac,
    hypermonogenic_defect,
    kernel_membership,
    lb_defect,
)
from cliffordforms.series import (
    SeriesSpec,
    cusp_test,
    eisenstein,
    eisenstein_hecke,
    eisenstein_positive,
    kernel_field,
    kernel_gk,
    maass_lift,
    poincare,
    poincare_positive,
    poincare_slash,
    scale_map,
    slash_transform,
)
from cliffordforms.vahlen import mobius_apply

N3 = 3
EN = (0.0, 0.0, 0.0, 1.0)

_cache = {}


def _form(key, builder):
    if key not in _cache:
        _cache[key] = builder()
    return _cache[key]


def _pts(seed, count, h_lo=0.8, h_hi=2.5, n=3):
    rng = np.random.default_rng(seed)
    return np.column_stack(
        [rng.uniform(-0.5, 0.5, (count, n)), rng.uniform(h_lo, h_hi, count)]
    )


def _en_coeffs(n=3):
    probe = np.zeros(n + 1)
    probe[-1] = 1.0
    return paravector_to_coeffs(probe, algebra(n))


def _first_inverting_element(n=3):
    """Smallest enumerated group element with c != 0 (c = -3 e_0, d = e_0)."""
    els = enumerate_group_elements(2, N3, 4.0, 1.0)
    for el in els:
        if np.any(el.matrix[2] != 0):
            return el.to_vahlen(n)
    raise AssertionError("enumeration lost its inverting elements")


def _eis(k, radius, p=2):
    return _form(
        ("eis", k, radius, p),
        lambda: eisenstein(SeriesSpec(n=3, k=k, p=p, N=N3, radius=radius)),
    )


# ----------------------------------------------------------------------
# spec validation


def test_spec_validation_rejects_bad_parameters():
    good = dict(n=3, k=-2, p=2, N=3, radius=5.0)
    with pytest.raises(ValueError):
        SeriesSpec(**{**good, "kind": "mystery"})
    with pytest.raises(ValueError):
        SeriesSpec(**{**good, "k": 1})  # odd weight
    with pytest.raises(ValueError):
        SeriesSpec(**{**good, "N": 2})  # below the admissible level
    with pytest.raises(ValueError):
        SeriesSpec(**{**good, "p": 3})  # p must stay below n
    with pytest.raises(ValueError):
        SeriesSpec(**{**good, "radius": 0.0})
    with pytest.raises(ValueError):
        SeriesSpec(**{**good, "k": 2})  # eisenstein needs k < n - p - 1
    with pytest.raises(ValueError):
        SeriesSpec(**{**good, "w": EN})  # base point only for poincare kinds
    with pytest.raises(ValueError):
        SeriesSpec(n=3, k=0, p=2, N=3, radius=5.0, kind="poincare", w=EN)  # k < -1
    with pytest.raises(ValueError):
        SeriesSpec(n=3, k=-2, p=2, N=3, radius=5.0, kind="poincare")  # missing w
    with pytest.raises(ValueError):
        SeriesSpec(
            n=3, k=-2, p=2, N=3, radius=5.0, kind="poincare", w=(0.0, 0.0, 0.0, -1.0)
        )  # base point below the half-space
    with pytest.raises(ValueError):
        SeriesSpec(n=3, k=-2, p=2, N=3, radius=5.0, kind="poincare-slash", w=EN)
    with pytest.raises(ValueError):
        SeriesSpec(n=3, k=0, p=2, N=3, radius=5.0, kind="eisenstein-hecke", hecke_s=0.7)
    with pytest.raises(ValueError):
        SeriesSpec(n=3, k=0, p=1, N=3, radius=5.0, kind="eisenstein-hecke", hecke_s=0.25)
    with pytest.raises(ValueError):
        SeriesSpec(n=3, k=-2, p=2, N=3, radius=5.0, kind="eisenstein-positive")


def test_spec_normalizes_base_point():
    spec = SeriesSpec(
        n=3, k=-2, p=2, N=3, radius=4.0, kind="poincare", w=np.array([0.1, 0.2, 0.3, 1.5])
    )
    assert spec.w == (0.1, 0.2, 0.3, 1.5)
    assert spec.w_components.shape == (4,)
    assert spec.shift_bound == 4.0
    spec2 = SeriesSpec(
        n=3, k=-2, p=2, N=3, radius=4.0, kind="poincare", w=EN, shift_radius=1.0
    )
    assert spec2.shift_bound == 1.0


def test_majorant_convergence_flags():
    # rows fill shells like r^{2p+1} dr against a term decay r^{-(exponent-1)}
    flags = {
        ("eisenstein", -2, 2): False,
        ("eisenstein", -4, 2): True,
        ("eisenstein", -2, 0): True,
        ("poincare", -2, 2): False,
        ("poincare", -4, 2): True,
    }
    for (kind, k, p), expected in flags.items():
        w = EN if kind == "poincare" else None
        spec = SeriesSpec(n=3, k=k, p=p, N=3, radius=5.0, kind=kind, w=w)
        assert spec.absolutely_convergent is expected, (kind, k, p)
    slash = SeriesSpec(n=3, k=2, p=2, N=3, radius=5.0, kind="poincare-slash", w=EN)
    assert slash.absolutely_convergent is False


# ----------------------------------------------------------------------
# kernel point values


def test_kernel_point_values_match_hand_computation():
    n = 3
    en = np.zeros(n + 1)
    en[-1] = 1.0
    # |e_n| = 1 so every weight gives conj(e_n) = -e_n
    for k in (-4, -2, 0, 2):
        out = kernel_gk(en, k, n=n)
        assert_allclose(out.coeffs, -_en_coeffs(n), atol=1e-15)
    # scalar argument x = 2: conj(2)/2^{n+1} = 2/16
    out = kernel_gk(np.array([2.0, 0.0, 0.0, 0.0]), 0, n=n)
    expected = np.zeros(8)
    expected[0] = 0.125
    assert_allclose(out.coeffs, expected, atol=1e-15)
    # k = n + 1 kills the denominator power, leaving plain conjugation
    rng = np.random.default_rng(3)
    x = rng.normal(size=4)
    out = kernel_gk(x, n + 1, n=n)
    conj = x.copy()
    conj[1:] *= -1.0
    assert_allclose(out.coeffs, paravector_to_coeffs(conj, algebra(n)), atol=1e-14)
    with pytest.raises(ZeroDivisionError):
        kernel_gk(np.zeros(4), -2, n=n)


def test_kernel_field_matches_pointwise_kernel():
    n = 3
    pts = _pts(5, 6)
    field = kernel_field(n, -2)
    vals = field(pts)
    for i, x in enumerate(pts):
        assert_allclose(vals[i], kernel_gk(x, -2, n=n).coeffs, atol=1e-15)
    shift = np.array([0.5, 0.0, -0.3, 0.2])
    shifted = kernel_field(n, -2, shift=shift)
    for i, x in enumerate(pts):
        assert_allclose(shifted(pts)[i], kernel_gk(x - shift, -2, n=n).coeffs, atol=1e-15)


# ----------------------------------------------------------------------
# enumeration counts and axis values


def test_series_counts_frozen():
    assert _eis(-2, 6.0).count == 197
    assert _eis(-2, 10.0).count == 3085
    assert _eis(-2, 10.0, p=0).count == 25
    assert _form(
        ("khp", -2, 5.0),
        lambda: poincare(
            SeriesSpec(n=3, k=-2, p=2, N=3, radius=5.0, kind="poincare", w=EN)
        ),
    ).count == 1501
    assert _form(
        ("slash", 2, 4.0),
        lambda: poincare_slash(
            SeriesSpec(n=3, k=2, p=2, N=3, radius=4.0, kind="poincare-slash", w=EN)
        ),
    ).count == 91


def test_axis_values_approach_one():
    # far up the axis only the identity coset contributes; deviations frozen
    form = _eis(-2, 10.0)
    heights = np.zeros((3, 4))
    heights[:, -1] = (2.0, 4.0, 8.0)
    one = np.zeros(8)
    one[0] = 1.0
    dev = np.linalg.norm(form(heights) - one, axis=1)
    assert dev[0] < 5e-6 and dev[1] < 1e-5 and dev[2] < 1e-6


def test_eisenstein_keeps_height_split():
    # summands share one height-weighted split, so the defect is roundoff
    form = _eis(-2, 10.0)
    for x in _pts(7, 3):
        assert hypermonogenic_defect(form.field, x, -2) < 1e-8


def test_quasi_invariance_magnitude():
    # truncation breaks exact invariance; R = 10 leaves a small residue
    form = _eis(-2, 10.0)
    M = _first_inverting_element()
    pts = _pts(7, 3)
    dev = np.max(np.linalg.norm(slash_transform(form, M, -2)(pts) - form(pts), axis=1))
    assert 1e-5 < dev < 1e-3


# ----------------------------------------------------------------------
# tail reporting


def test_tail_bounds_are_honest():
    pts = _pts(7, 5)
    e12 = _eis(-4, 12.0)
    e14 = _eis(-4, 14.0)
    diff = np.linalg.norm(e12(pts) - e14(pts), axis=1)
    tails = e12.tail_at(pts)
    finite = np.isfinite(tails)
    assert finite.any()  # the outer shells decay by R = 12 at low points
    assert np.all(diff[finite] <= tails[finite])


def test_tail_reports_inf_outside_majorant_regime():
    pts = _pts(7, 2)
    assert np.all(np.isinf(_eis(-2, 10.0).tail_at(pts)))


# ----------------------------------------------------------------------
# scale map


def test_scale_map_roundtrip_and_zero_weight():
    n = 3
    pts = _pts(11, 5)
    base = kernel_field(n, -2)
    round_trip = scale_map(scale_map(base, -2, n=n), 2, n=n)
    assert_allclose(round_trip(pts), base(pts), rtol=1e-15)
    same = scale_map(base, 0, n=n)
    assert np.array_equal(same(pts), base(pts))


def test_scale_map_lands_in_kernel_for_nonpositive_weight():
    n = 3
    pts = _pts(13, 4, h_lo=1.0, h_hi=2.0)
    scaled = scale_map(kernel_field(n, -2), -2, n=n)
    report = kernel_membership(scaled, 4, pts, tol_floor=1e-5)
    assert report["passed"] and report["max_defect"] < 1e-5
    assert report["order"] > 3.5


def test_scale_map_does_not_commute_with_height_shifts():
    # translating along e_n before scaling leaves every computable kernel:
    # the defect is step-independent (a true residual field, not stencil error)
    n = 3
    pts = _pts(13, 4, h_lo=1.0, h_hi=2.0)
    tangential = scale_map(
        kernel_field(n, -2, shift=np.array([0.7, -0.3, 0.4, 0.0])), -2, n=n
    )
    assert kernel_membership(tangential, 4, pts, tol_floor=1e-5)["passed"]
    lifted = scale_map(
        kernel_field(n, -2, shift=np.array([0.0, 0.0, 0.0, -1.0])), -2, n=n
    )
    report = kernel_membership(lifted, 4, pts, tol_floor=1e-5)
    assert not report["passed"]
    assert report["max_defect"] > 1e-2
    assert abs(report["order"]) < 1.0


def test_positive_weight_scaling_leaves_kernel():
    # dividing the weight-2 kernel by x_n^2 does not produce a monogenic field
    n = 3
    pts = _pts(13, 4, h_lo=1.0, h_hi=2.0)
    g = scale_map(kernel_field(n, 2), 2, n=n)
    report = kernel_membership(g, 0, pts, tol_floor=1e-5)
    assert not report["passed"]
    assert report["max_defect"] > 1e-2


# ----------------------------------------------------------------------
# slash action


def test_slash_composes_as_right_action():
    n = 3
    rng = np.random.default_rng(17)
    pts = _pts(17, 4)
    f = kernel_field(n, 2)
    M = _first_inverting_element()
    T = _form(
        ("translation",),
        lambda: enumerate_group_elements(2, N3, 1.5, 4.0)[1].to_vahlen(n),
    )
    A, B = M, T
    lhs = slash_transform(slash_transform(f, A, 2), B, 2)(pts)
    rhs = slash_transform(f, A @ B, 2)(pts)
    assert_allclose(lhs, rhs, atol=1e-12)
    # the pair does not commute, so the swapped product is a different form
    swapped = slash_transform(f, B @ A, 2)(pts)
    assert np.max(np.abs(lhs - swapped)) > 1e-3


def test_slash_preserves_kernel_membership():
    n = 3
    pts = _pts(19, 3, h_lo=2.2, h_hi=3.0)
    M = _first_inverting_element()
    plain = slash_transform(kernel_field(n, 2), M, 2)
    assert kernel_membership(plain, 4, pts, tol_floor=1e-5)["passed"]
    # translates along e_n stay inside: the operator has constant coefficients
    shifted = slash_transform(
        kernel_field(n, 2, shift=np.array([0.0, 0.0, 0.0, -1.0])), M, 2
    )
    report = kernel_membership(shifted, 4, pts, tol_floor=1e-5)
    assert report["passed"] and report["max_defect"] < 1e-6


# ----------------------------------------------------------------------
# definitional identities between the positive and negative families


def test_eisenstein_positive_matches_scaled_negative_series():
    pts = _pts(23, 4)
    neg = _eis(-2, 6.0)
    pos = eisenstein_positive(
        SeriesSpec(n=3, k=2, p=2, N=3, radius=6.0, kind="eisenstein-positive")
    )
    en = np.broadcast_to(_en_coeffs(), (4, 8)).copy()
    rhs = gp(scale_map(neg, -2, n=3)(pts), en, algebra(3))
    assert_allclose(pos(pts), rhs, rtol=0, atol=0)


def test_positive_poincare_matches_scaled_negative_series():
    pts = _pts(23, 4)
    neg = poincare(
        SeriesSpec(n=3, k=-2, p=2, N=3, radius=4.0, kind="poincare", w=EN)
    )
    pos = poincare_positive(
        SeriesSpec(n=3, k=2, p=2, N=3, radius=4.0, kind="poincare-positive", w=EN)
    )
    assert_allclose(pos(pts), scale_map(neg, -2, n=3)(pts), rtol=0, atol=0)


# ----------------------------------------------------------------------
# regularized critical-line series


def test_hecke_ladder_and_extrapolation():
    form = _form(
        ("hecke", 8.0),
        lambda: eisenstein_hecke(
            SeriesSpec(
                n=3, k=0, p=2, N=3, radius=8.0, kind="eisenstein-hecke", hecke_s=0.25
            )
        ),
    )
    x0 = np.array([0.1, -0.3, 0.2, 1.5])
    ladder = form.hecke_ladder(x0[None])
    assert sorted(ladder.keys()) == [0.0625, 0.125, 0.25]
    vals = {s: ladder[s][0, 0] for s in ladder}
    assert_allclose(vals[0.25], 1.1082171035, rtol=1e-8)
    assert_allclose(vals[0.125], 1.0551333545, rtol=1e-8)
    assert_allclose(vals[0.0625], 1.0301042838, rtol=1e-8)
    rich = (8.0 * vals[0.0625] - 6.0 * vals[0.125] + vals[0.25]) / 3.0
    assert_allclose(form(x0)[0], rich, rtol=1e-13)
    assert vals[0.25] > vals[0.125] > vals[0.0625] > form(x0)[0]
    # extrapolated series is near-monogenic at interior points
    assert np.linalg.norm(dirac(form.field, x0).coeffs) < 1e-3


# ----------------------------------------------------------------------
# poincare family


def test_poincare_single_element_truncation_is_shifted_kernel():
    w = (0.2, -0.1, 0.3, 1.0)
    spec = SeriesSpec(
        n=3, k=-2, p=2, N=3, radius=1.2, kind="poincare", w=w, shift_radius=0.1
    )
    form = poincare(spec)
    assert form.count == 1  # only the identity fits below the radius
    pts = _pts(29, 5)
    shifted = kernel_field(3, -2, shift=-np.asarray(w))
    assert np.max(np.abs(form(pts) - shifted(pts))) < 1e-15


def test_poincare_concentrates_near_base_point_mirror():
    # one group image lands close to -w, so its term dominates the sum
    x0 = np.array([0.3, 0.1, -0.2, 1.4])
    M0 = _first_inverting_element()
    img = mobius_apply(M0, x0)
    comps = np.asarray(img.components, dtype=float)
    w_near = tuple(np.r_[-comps[:3], 0.05])
    build = lambda w: poincare(
        SeriesSpec(n=3, k=-2, p=2, N=3, radius=5.0, kind="poincare", w=w)
    )
    near = np.linalg.norm(build(w_near)(x0))
    far = np.linalg.norm(build((0.0, 0.0, 0.0, 2.0))(x0))
    assert near > 10.0 and far < 0.1
    assert near / far > 1e3


def test_poincare_base_shift_breaks_height_split():
    form = _form(
        ("khp", -2, 5.0),
        lambda: poincare(
            SeriesSpec(n=3, k=-2, p=2, N=3, radius=5.0, kind="poincare", w=EN)
        ),
    )
    defect = max(hypermonogenic_defect(form.field, x, -2) for x in _pts(7, 3))
    assert defect > 1e-3


def test_poincare_pole_guard():
    w = (0.2, -0.1, 0.3, 1.0)
    spec = SeriesSpec(
        n=3, k=-2, p=2, N=3, radius=1.2, kind="poincare", w=w, shift_radius=0.1
    )
    form = poincare(spec)
    with pytest.raises(ZeroDivisionError):
        form(-np.asarray(w))  # identity term hits w + x = 0


def test_slash_orbit_truncation_certifies_kernel_membership():
    # every summand is a weight-2 slash of a shifted kernel, so the finite
    # sum sits in the parameter-4 kernel while the height split stays broken
    form = _form(
        ("slash", 2, 4.0),
        lambda: poincare_slash(
            SeriesSpec(n=3, k=2, p=2, N=3, radius=4.0, kind="poincare-slash", w=EN)
        ),
    )
    pts = _pts(23, 2, h_lo=1.2, h_hi=2.0)
    report = kernel_membership(form.field, 4, pts, tol_floor=1e-5)
    assert report["passed"] and report["max_defect"] < 1e-5
    assert report["order"] > 3.5
    hyp = max(hypermonogenic_defect(form.field, x, 2) for x in pts)
    assert hyp > 1e-2
    assert np.all(np.isinf(form.tail_at(pts)))


# ----------------------------------------------------------------------
# cusp vanishing


def test_cusp_vanishing_discriminates_series():
    classes = _form(
        ("classes", 0, 3),
        lambda: translation_orbit_classes(0, 3, quotient_representatives(0, 3)),
    )
    assert len(classes) == 8
    eis0 = _eis(-2, 10.0, p=0)
    rep = cusp_test(eis0, -2, classes, 0, 3, 3)
    assert not rep["passed"]
    # the identity-type classes grow like x_n^{-k} = x_n^2 times the limit 1
    grown = [
        i
        for i in rep["failing"]
        if np.allclose(rep["per_rep"][i]["values"], [16.0, 64.0, 256.0], rtol=1e-3)
    ]
    assert len(grown) == 2
    pform = poincare(
        SeriesSpec(n=3, k=-2, p=0, N=3, radius=6.0, kind="poincare", w=EN)
    )
    assert cusp_test(pform, -2, classes, 0, 3, 3)["passed"]
    zero = FieldFn(lambda q: np.zeros(np.asarray(q).shape[:-1] + (8,)), 3)
    assert cusp_test(zero, -2, classes, 0, 3, 3)["passed"]


# ----------------------------------------------------------------------
# hyperbolic lift


def test_maass_lift_eigenfunction():
    n = 3
    lift = maass_lift(
        kernel_field(n, 0, shift=np.array([0.3, -0.2, 0.1, -0.4])), 0, n=n
    )
    # (n^2 - (k+1)^2)/4 = 2 for n = 3, k = 0
    for x in _pts(31, 3, h_lo=1.0, h_hi=2.0):
        assert lb_defect(lift, x, 2.0) < 1e-6


def test_maass_lift_weight_n_minus_one_is_identity():
    n = 3
    pts = _pts(31, 4)
    base = kernel_field(n, 2)
    assert np.array_equal(maass_lift(base, n - 1, n=n)(pts), base(pts))


# ----------------------------------------------------------------------
# evaluation mechanics


def test_forms_evaluate_batch_shapes():
    form = _eis(-2, 6.0)
    single = form(np.array([0.1, 0.2, -0.3, 1.5]))
    assert single.shape == (8,)
    pts = _pts(37, 6)
    flat = form(pts)
    assert flat.shape == (6, 8)
    nested = form(pts.reshape(2, 3, 4))
    assert nested.shape == (2, 3, 8)
    assert_allclose(nested.reshape(6, 8), flat, rtol=0, atol=0)


def test_rebuilds_are_deterministic():
    pts = _pts(41, 5)
    spec = SeriesSpec(n=3, k=-2, p=2, N=3, radius=6.0)
    a = eisenstein(spec)(pts)
    b = eisenstein(spec)(pts)
    assert np.array_equal(a, b)
    singles = np.stack([eisenstein(spec)(x) for x in pts])
    assert np.array_equal(singles, a)
