import numpy as np
import pytest

from agechemo.errors import DependentBasis, PositivityViolation
from agechemo.galerkin import (
    GalerkinBasis,
    assemble,
    build_basis,
    characteristic_roots,
    residual,
    simulate,
)
from agechemo.grid import GridFunction
from agechemo.model import ModelParams
from agechemo.trajectories import make_constant
from oracles import char_residual_highres

KNOWN_PAIRS = (-2.02 + 4.41j, -2.50 + 7.62j)


def test_trivial_root_present(trial_roots):
    assert any(abs(r) < 1e-9 for r in trial_roots)


def test_roots_match_known_pairs(trial_roots):
    nontrivial = sorted((r for r in trial_roots if r.imag > 0), key=lambda z: -z.real)
    for got, want in zip(nontrivial, KNOWN_PAIRS):
        assert abs(got.real - want.real) <= 0.02
        assert abs(got.imag - want.imag) <= 0.02


def test_roots_conjugate_closure(trial_roots):
    ups = {r for r in trial_roots if r.imag > 0}
    downs = {r for r in trial_roots if r.imag < 0}
    assert {r.conjugate() for r in ups} == downs


def test_roots_verified_by_independent_quadrature(trial, trial_roots):
    d_star = trial["eq"].d_star
    for r in trial_roots:
        assert abs(char_residual_highres(r, d_star)) < 1e-8


def test_root_count_ten(trial):
    roots = characteristic_roots(trial["eq"], trial["params"], 10)
    assert len(roots) == 9
    assert sum(1 for r in roots if r.imag > 0) == 4


def test_basis_second_trial_is_equilibrium(trial, trial_basis):
    assert np.array_equal(trial_basis.trial_matrix[1], trial["eq"].x_star.values)


def test_basis_gram_positive_definite(trial, trial_basis):
    w = trial["params"].weights
    gram = (trial_basis.trial_matrix * w) @ trial_basis.trial_matrix.T
    np.linalg.cholesky(gram)


def test_basis_rejects_duplicate_equilibrium(trial, trial_roots):
    with pytest.raises(DependentBasis):
        build_basis(trial["eq"].x_star, trial["eq"], trial_roots, 6, trial["params"])


def test_basis_boundary_compatibility(trial, trial_basis):
    # equilibrium and mode trials satisfy the non-local boundary condition
    # up to quadrature error; the repaired x0 satisfies it by construction
    params = trial["params"]
    w = params.weights
    for row in trial_basis.trial_matrix:
        defect = abs(row[0] - float(w @ (params.k.values * row)))
        assert defect < 1e-6 * float(np.max(np.abs(row)))


def test_basis_warns_on_incompatible_profile(trial, trial_roots):
    params = trial["params"]
    a = params.nodes
    skewed = GridFunction(np.exp(-0.5 * a) + 0.2, params.a_max)
    with pytest.warns(UserWarning, match="boundary condition"):
        build_basis(skewed, trial["eq"], trial_roots, 6, params)


def test_assemble_single_constant_trial():
    n = 101
    mk = lambda v: GridFunction(np.full(n, float(v)), 1.0)
    params = ModelParams(mu=mk(0.0), k=mk(1.0), p=mk(1.0), a_max=1.0, d_min=0.1, d_max=2.0)
    basis = GalerkinBasis(
        trials=[mk(1.0)],
        trial_matrix=np.ones((1, n)),
        derivative_matrix=np.zeros((1, n)),
        roots=[],
        n_modes=2,
    )
    system = assemble(basis, params)
    assert system.m_matrix == pytest.approx(np.array([[1.0]]), abs=1e-12)
    assert system.n_matrix == pytest.approx(np.array([[0.0]]), abs=1e-12)


def test_assemble_mass_matrix_symmetric(trial, trial_basis):
    system = assemble(trial_basis, trial["params"])
    assert np.max(np.abs(system.m_matrix - system.m_matrix.T)) < 1e-12


def test_equilibrium_column_identity(trial, trial_basis):
    # the steady state sits in the span: N e2 = d* M e2 exactly on the grid
    system = assemble(trial_basis, trial["params"])
    e2 = np.zeros(6)
    e2[1] = 1.0
    gap = system.n_matrix @ e2 - trial["eq"].d_star * (system.m_matrix @ e2)
    assert np.max(np.abs(gap)) < 1e-12


def test_assembly_against_refined_grid(trial, trial_roots):
    # rebuilding everything at double resolution moves the matrices by the
    # quadrature error only
    from agechemo.config import build_model, build_x0
    import dataclasses

    cfg = dataclasses.replace(trial["cfg"], age_nodes=801)
    params2 = build_model(cfg)
    from agechemo.model import solve_equilibrium

    eq2 = solve_equilibrium(params2)
    x02 = build_x0(cfg, params2, eq2)
    basis2 = build_basis(x02, eq2, trial_roots, 6, params2)
    system2 = assemble(basis2, params2)
    basis1 = build_basis(trial["x0"], trial["eq"], trial_roots, 6, trial["params"])
    system1 = assemble(basis1, trial["params"])
    rel = np.abs(system1.m_matrix - system2.m_matrix) / (1.0 + np.abs(system2.m_matrix))
    assert np.max(rel) < 1e-6


def test_steady_state_exact(trial, trial_basis):
    eq, params, gains = trial["eq"], trial["params"], trial["gains"]
    system = assemble(trial_basis, params)
    system.lam = np.zeros(6)
    system.lam[1] = 1.0
    trace = simulate(
        system,
        trial_basis,
        make_constant(1.0),
        gains,
        params,
        2.0,
        params.h,
        d_override=lambda t: eq.d_star,
    )
    e2 = np.zeros(6)
    e2[1] = 1.0
    assert np.max(np.abs(trace.lam - e2)) < 1e-10


def test_constant_input_scalar_mode(trial, trial_basis):
    eq, params, gains = trial["eq"], trial["params"], trial["gains"]
    system = assemble(trial_basis, params)
    system.lam = np.zeros(6)
    system.lam[1] = 2.0
    trace = simulate(
        system,
        trial_basis,
        make_constant(1.0),
        gains,
        params,
        2.0,
        params.h,
        d_override=lambda t: 0.7,
    )
    expected = trace.y_sim[0] * np.exp((eq.d_star - 0.7) * trace.t)
    assert np.max(np.abs(trace.y_sim / expected - 1.0)) < 1e-8


def test_residual_zero_at_steady_state(trial, trial_basis):
    eq, params = trial["eq"], trial["params"]
    system = assemble(trial_basis, params)
    lam = np.zeros(6)
    lam[1] = 3.0
    r, profile = residual(system, trial_basis, params, eq.d_star, lam=lam)
    assert r < 1e-10
    assert np.max(np.abs(profile.values)) < 1e-10


def test_residual_input_independent(trial, trial_basis):
    params = trial["params"]
    system = assemble(trial_basis, params)
    lam = np.array([0.5, 1.0, 0.1, -0.2, 0.05, 0.02])
    r1, _ = residual(system, trial_basis, params, 0.6, lam=lam)
    r2, _ = residual(system, trial_basis, params, 1.4, lam=lam)
    assert r1 == pytest.approx(r2, rel=1e-12)


def test_galerkin_orthogonality_along_run(trial, trial_basis, fig2a_runs):
    # <phi_i, R[t]> = 0 is the defining property of the projection
    params = trial["params"]
    system = assemble(trial_basis, params)
    trace = fig2a_runs["galerkin"]
    w = params.weights
    for i in (0, 400, 1200, 2400):
        lam = trace.lam[i]
        _, prof = residual(system, trial_basis, params, trace.d[i], lam=lam)
        proj = (trial_basis.trial_matrix * w) @ prof.values
        assert np.max(np.abs(proj)) < 1e-9


def test_transition_run_reaches_setpoint(fig2a_runs):
    trace = fig2a_runs["galerkin"]
    i = int(round(10.0 / (trace.t[1] - trace.t[0])))
    assert trace.y_sim[i] == pytest.approx(3.0, rel=0.02)
    assert np.all((trace.d >= 0.5 - 1e-12) & (trace.d <= 1.5 + 1e-12))
    assert np.all(trace.min_profile >= 0)


def test_instability_raised_on_overflow(trial, trial_basis):
    from agechemo.errors import Instability

    params, gains = trial["params"], trial["gains"]
    system = assemble(trial_basis, params)
    system.lam = np.zeros(6)
    system.lam[1] = 1.0
    with pytest.raises(Instability):
        simulate(
            system,
            trial_basis,
            make_constant(1.0),
            gains,
            params,
            1.0,
            params.h,
            d_override=lambda t: -60.0,
        )


def test_positivity_violation_raised(trial, trial_basis):
    params, gains = trial["params"], trial["gains"]
    system = assemble(trial_basis, params)
    system.lam = np.zeros(6)
    system.lam[2] = 1.0  # a pure oscillatory mode shape changes sign
    with pytest.raises(PositivityViolation):
        simulate(
            system,
            trial_basis,
            make_constant(1.0),
            gains,
            params,
            0.1,
            params.h,
            d_override=lambda t: 1.0,
        )
