import math

import numpy as np
import pytest

from cpwl import analysis, approx, funcs, partition
from cpwl.funcs import FunctionSpec

SQRT120 = math.sqrt(120)


def test_measure_square_interpolant(square):
    v = approx.interpolant(square, partition.uniform(0.0, 1.0, 10))
    r = analysis.measure(square, v)
    assert r.measured_l2 == pytest.approx(1.8257e-3, abs=1e-7)
    assert r.measured_l2 == pytest.approx(2 / (SQRT120 * 100), rel=1e-9)
    assert math.sqrt(np.sum(r.per_interval ** 2)) == pytest.approx(r.measured_l2, rel=1e-9)


def test_measure_square_projection(square):
    v = approx.project(square, partition.uniform(0.0, 1.0, 1))
    assert analysis.measure(square, v).measured_l2 == pytest.approx(0.0745356, abs=1e-7)


def test_measure_linear_is_zero(affine):
    v = approx.interpolant(affine, partition.uniform(-1.0, 3.0, 7))
    assert analysis.measure(affine, v).measured_l2 == pytest.approx(0.0, abs=1e-10)


def test_interval_bound_examples(square, affine):
    assert analysis.bound_interpolant_interval(square, 0.0, 1.0) == pytest.approx(2 / SQRT120, rel=1e-12)
    assert analysis.bound_interpolant_interval(affine, 0.0, 1.0) == 0.0
    g = funcs.builtin("gaussian")
    # |f''| peaks at x = 0, so the bound is f''(0) / sqrt(120) = 0.0364183.
    assert analysis.bound_interpolant_interval(g, 0.0, 1.0) == pytest.approx(
        1 / math.sqrt(2 * math.pi) / SQRT120, rel=1e-12)


def test_optimized_bound_examples(square, affine, golden):
    for n in (1, 7, 64):
        assert analysis.bound_interpolant_optimized(square, 0, 1, n) == pytest.approx(
            2 / (n * n * SQRT120), rel=1e-9)
        assert analysis.estimate_projection_optimized(square, 0, 1, n) == pytest.approx(
            2 / (n * n * SQRT120 * math.sqrt(6)), rel=1e-9)
    assert analysis.bound_interpolant_optimized(affine, 0, 1, 8) == 0.0
    g = funcs.builtin("gaussian")
    value = analysis.bound_interpolant_optimized(g, 0, 8, 256)
    assert value == pytest.approx(golden["gaussian_bound_interpolant_optimized_n256"], rel=1e-9)
    assert analysis.estimate_projection_optimized(g, 0, 8, 256) == pytest.approx(
        value / math.sqrt(6), rel=1e-12)


def test_uniform_bound_examples(square, affine, golden):
    assert analysis.bound_interpolant_uniform(square, 0, 1, 5) == pytest.approx(2 / (25 * SQRT120), rel=1e-9)
    assert analysis.bound_interpolant_uniform(affine, 0, 1, 5) == 0.0
    g = funcs.builtin("gaussian")
    assert analysis.bound_interpolant_uniform(g, 0, 8, 128) == pytest.approx(
        golden["gaussian_bound_interpolant_uniform_n128"], rel=1e-9)


def test_density_integral_known_values():
    # |f''| = 2 on [0, 1]: integral of 2^(2/5).
    sq = FunctionSpec("sq", lambda x: x * x, lambda x: 2.0 + 0.0 * np.asarray(x))
    assert analysis.density_integral(sq, 0.0, 1.0) == pytest.approx(2 ** 0.4, rel=1e-12)
    # Sign change of f'' at x = 1/3: integral of |x - 1/3|^(2/5) on [0, 1].
    cusp = FunctionSpec("cusp", lambda x: x, lambda x: np.asarray(x, float) - 1 / 3)
    exact = ((1 / 3) ** 1.4 + (2 / 3) ** 1.4) / 1.4
    assert analysis.density_integral(cusp, 0.0, 1.0) == pytest.approx(exact, rel=1e-9)


def test_fpp_zeros():
    g = funcs.builtin("gaussian")
    assert analysis.fpp_zeros(g, 0.0, 8.0) == pytest.approx([1.0], abs=1e-12)
    q = funcs.builtin("quintic")
    assert len(analysis.fpp_zeros(q, -4.0, 3.0)) == 3


def test_optimization_gain(square, golden):
    assert analysis.optimization_gain(square, 0.0, 1.0) == pytest.approx(1.0, rel=1e-9)
    g = analysis.optimization_gain(funcs.builtin("gaussian"), 0.0, 8.0)
    lor = analysis.optimization_gain(funcs.builtin("lorentzian"), 0.0, 6.0)
    assert 0 < g < 1 and 0 < lor < 1
    assert g == pytest.approx(golden["gaussian_gain"], rel=1e-9)
    assert lor == pytest.approx(golden["lorentzian_0_1_gain_on_0_6"], rel=1e-9)


@pytest.mark.parametrize("name, a, b", [("gaussian", 0.0, 8.0), ("lorentzian", 0.0, 6.0)])
def test_gain_matches_measured_ratio(name, a, b):
    fs = funcs.builtin(name)
    rows = {r.variant: r.measured for r in
            analysis.convergence_sweep(fs, a, b, [512], ["uniform/interp", "optimized/interp"])}
    measured = rows["optimized/interp"] / rows["uniform/interp"]
    assert analysis.optimization_gain(fs, a, b) == pytest.approx(measured, rel=0.2)


def test_sweep_square_closed_form(square):
    rows = analysis.convergence_sweep(square, 0.0, 1.0, [1, 2, 4, 8, 16])
    for r in rows:
        if r.variant == "uniform/interp":
            assert r.measured == pytest.approx(2 / (SQRT120 * r.n ** 2), rel=1e-6)


def test_sweep_order_and_validation(square):
    rows = analysis.convergence_sweep(square, 0.0, 1.0, [4, 2, 4])
    assert [(r.n, r.variant) for r in rows] == [(n, v) for n in (2, 4) for v in analysis.VARIANTS]
    with pytest.raises(ValueError):
        analysis.convergence_sweep(square, 0.0, 1.0, [2], ["uniform/spline"])
    assert analysis.convergence_sweep(square, 0.0, 1.0, []) == []


def test_projection_never_worse():
    for name in ("gaussian", "lorentzian", "quintic"):
        fs = funcs.builtin(name)
        a, b = fs.default_domain
        for kind in analysis.KINDS:
            p = analysis.make_partition(fs, a, b, 64, kind)
            e_proj = analysis.measure(fs, approx.project(fs, p)).measured_l2
            e_int = analysis.measure(fs, approx.interpolant(fs, p)).measured_l2
            assert e_proj <= e_int + 1e-10


def test_bessel_agreement_from_64():
    j = funcs.builtin("bessel_j0")
    for r in analysis.convergence_sweep(j, 0.0, 20.0, [64, 128, 256], ["optimized/interp"]):
        assert r.measured / r.predicted == pytest.approx(1.0, abs=0.10)


def test_report_fields():
    g = funcs.builtin("gaussian")
    r = analysis.report(g, 0.0, 8.0, 32, "optimized", "proj")
    assert r.function_id == "gaussian" and r.partition_kind == "optimized" and r.method == "proj"
    assert r.n_segments == 32 and r.per_interval.size == 32
    assert r.measured_l2 > 0 and r.predicted > 0 and r.equalization_constant > 0
    with pytest.raises(ValueError):
        analysis.report(g, 0.0, 8.0, 32, "random", "proj")
    with pytest.raises(ValueError):
        analysis.report(g, 0.0, 8.0, 32, "uniform", "spline")


def test_loglog_slope():
    ns = [2, 4, 8, 16]
    assert analysis.loglog_slope(ns, [3.0 / n ** 2 for n in ns]) == pytest.approx(-2.0, abs=1e-12)


@pytest.mark.parametrize("src, name, a, b", [
    ("exp(-x^2/2)/2.5066282746310002", "gaussian", 0.0, 8.0),
    ("1/(3.141592653589793*(1+x^2))", "lorentzian", 0.0, 6.0),
])
def test_numeric_fpp_predictions_match_analytic(src, name, a, b):
    from cpwl.expr import parse_expression
    numeric, exact = parse_expression(src), funcs.builtin(name)
    for fn in (analysis.density_integral, analysis.fpp_norm):
        assert fn(numeric, a, b) == pytest.approx(fn(exact, a, b), rel=1e-7)
