"""End-to-end acceptance gate.

Each test covers one release criterion and prints a single PASS/FAIL line so
the suite output doubles as a checklist.  Instances are fixed seeds chosen so
every check is deterministic.
"""

import inspect
import time

import numpy as np
import scipy.linalg as spla

from quadisrk import (
    ReducedModel,
    ReductionConfig,
    ShiftSet,
    StateSpaceModel,
    approx_gramian_Q,
    assemble_rom,
    build_data_block,
    caching_oracle,
    default_initial_shifts,
    eval_transfer,
    generate_model,
    intrusive_data_block,
    irka,
    is_asymptotically_stable,
    isrk,
    load_samples,
    poles,
    quad_isrk,
    rational_krylov_basis,
    real_basis_transform,
    relative_errors,
    replay_oracle,
    run_sweep,
    save_samples,
    solve_lyapunov_Q,
    state_space_oracle,
    sweep_to_csv,
    trapezoid_rule,
)
from quadisrk.interpolation import as_real

from quadisrk import BenchmarkSpec


def _report(tag, ok, detail=""):
    line = f"[acceptance] {tag}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def _scalar_model():
    return StateSpaceModel(E=[[1.0]], A=[[-1.0]], B=[1.0], C=[1.0])


def _equivalence_instances():
    """20 seeded random stable models with rules and shift sets."""
    for seed in range(20):
        n = 4 + seed % 9
        half = 3 + seed % 8
        r = 2 if seed % 2 == 0 else 4
        model = generate_model("random-stable", n, seed)
        rule = trapezoid_rule(1e-2, 1e2, half)
        shifts = default_initial_shifts(r)
        yield model, rule, shifts


def test_criterion_01_sampled_data_block_matches_intrusive():
    worst = 0.0
    for model, rule, shifts in _equivalence_instances():
        sampled = build_data_block(state_space_oracle(model), rule, shifts)
        exact = intrusive_data_block(model, rule, shifts)
        for name in ("L", "M", "V", "W"):
            a, b = getattr(sampled, name), getattr(exact, name)
            worst = max(worst, np.abs(a - b).max() / max(np.abs(b).max(), 1.0))
    _report(
        "criterion 1: sample-built data block equals intrusive build",
        worst <= 1e-10,
        f"max rel err {worst:.2e} over 20 instances",
    )


def test_criterion_02_assembled_rom_matches_petrov_galerkin():
    worst = 0.0
    for model, rule, shifts in _equivalence_instances():
        rom = assemble_rom(build_data_block(state_space_oracle(model), rule, shifts))
        K = rational_krylov_basis(model, shifts)
        Wt = approx_gramian_Q(model, rule) @ model.E @ K
        T = real_basis_transform(shifts.shifts)
        Th = T.conj().T
        twin = {
            "E": as_real(Th @ (Wt.conj().T @ model.E @ K) @ T),
            "A": as_real(Th @ (Wt.conj().T @ model.A @ K) @ T),
            "B": as_real(Th @ (Wt.conj().T @ model.B)),
            "C": as_real((model.C @ K) @ T),
        }
        for name, want in twin.items():
            got = getattr(rom, name)
            worst = max(worst, np.abs(got - want).max() / max(np.abs(want).max(), 1.0))
    _report(
        "criterion 2: assembled ROM equals projection ROM with W = Qtilde E V",
        worst <= 1e-10,
        f"max rel err {worst:.2e} over 20 instances",
    )


def test_criterion_03_resolvent_difference_identities():
    worst = 0.0
    for trial in range(100):
        rng = np.random.default_rng(1000 + trial)
        E = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        A = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        x, y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        Rx = np.linalg.inv(x * E - A)
        Ry = np.linalg.inv(y * E - A)
        for lhs, rhs in (
            (Rx @ E @ Ry, -(Rx - Ry) / (x - y)),
            (Rx @ A @ Ry, -(x * Rx - y * Ry) / (x - y)),
        ):
            worst = max(worst, np.abs(lhs - rhs).max() / np.abs(rhs).max())
    _report(
        "criterion 3: both resolvent difference identities",
        worst <= 1e-12,
        f"max rel err {worst:.2e} over 100 trials",
    )


def test_criterion_04_scalar_fixed_point_all_methods():
    model = _scalar_model()
    points = 1j * np.logspace(-2, 2, 20)
    cfg = ReductionConfig(r=1, tau=1e-4, max_iter=10)
    runs = [
        ("isrk", 1e-12) + isrk(model, cfg),
        ("irka", 1e-12) + irka(model, cfg),
        (
            "quad-isrk",
            1e-6,
        )
        + quad_isrk(
            caching_oracle(state_space_oracle(model)),
            trapezoid_rule(1e-4, 1e4, 2000),
            cfg,
        ),
    ]
    ok = True
    details = []
    for name, tol, rom, trace in runs:
        shift_err = abs(trace.final_shifts[0] - 1.0)
        h_err = max(
            abs(eval_transfer(rom, s) - eval_transfer(model, s))
            / abs(eval_transfer(model, s))
            for s in points
        )
        ok = ok and trace.converged and trace.iterations <= 3
        ok = ok and shift_err <= tol and h_err <= tol
        details.append(f"{name}: it={trace.iterations} dshift={shift_err:.1e} dH={h_err:.1e}")
    _report("criterion 4: scalar fixed point for all three methods", ok, "; ".join(details))


def _lightly_damped_5(seed):
    """Order-5 modal-style model: two second-order sections plus one real mode."""
    rng = np.random.default_rng(seed)
    omega = np.logspace(-1, 2, 2)
    zeta = 10 ** rng.uniform(-3, -1, 2)
    blocks = [
        np.array([[0.0, 1.0], [-w * w, -2.0 * z * w]]) for w, z in zip(omega, zeta)
    ]
    blocks.append(np.array([[-np.sqrt(omega[0] * omega[-1])]]))
    return StateSpaceModel(
        E=np.eye(5),
        A=spla.block_diag(*blocks),
        B=rng.standard_normal((5, 1)),
        C=rng.standard_normal((1, 5)),
    )


def test_criterion_05_full_order_recovery():
    ok = True
    details = []
    for seed in (9, 35):
        model = _lightly_damped_5(seed)
        mirror = ShiftSet(shifts=np.sort_complex(-np.conj(poles(model))))
        cfg = ReductionConfig(
            r=5, tau=1e-4, max_iter=30, initial_shifts=mirror, orthonormalize=True
        )
        rels = {
            "isrk": relative_errors(model, isrk(model, cfg)[0])["h2_rel"],
            "irka": relative_errors(model, irka(model, cfg)[0])["h2_rel"],
            "quad-isrk": relative_errors(
                model,
                quad_isrk(
                    caching_oracle(state_space_oracle(model)),
                    trapezoid_rule(1e-3, 1e3, 300),
                    ReductionConfig(r=5, tau=1e-4, max_iter=30, initial_shifts=mirror),
                )[0],
            )["h2_rel"],
        }
        ok = ok and all(v <= 1e-8 for v in rels.values())
        details.append(
            f"seed {seed}: " + ", ".join(f"{k} {v:.1e}" for k, v in rels.items())
        )
    _report("criterion 5: full-order runs recover the model", ok, "; ".join(details))


def test_criterion_06_isrk_cells_stable_and_interpolatory():
    model = generate_model("modal-beam-like", 20, 0)
    converged = 0
    stable = True
    worst = 0.0
    for r in (2, 4, 6, 8, 10):
        rom, trace = isrk(model, ReductionConfig(r=r, tau=1e-4, max_iter=100))
        if not trace.converged:
            continue
        converged += 1
        stable = stable and is_asymptotically_stable(rom)
        for eta in trace.final_shifts:
            h = eval_transfer(model, eta)
            worst = max(worst, abs(eval_transfer(rom, eta) - h) / abs(h))
    ok = converged > 0 and stable and worst <= 1e-8
    _report(
        "criterion 6: converged ISRK cells stable and interpolatory",
        ok,
        f"{converged}/5 converged, stable={stable}, max interp err {worst:.2e}",
    )


def test_criterion_07_quad_isrk_tracks_isrk_accuracy():
    model = generate_model("modal-beam-like", 20, 0)
    rule = trapezoid_rule(1e-2, 1e2, 200)
    t0 = time.perf_counter()
    compared = 0
    worst = 0.0
    for r in (2, 4, 6, 8, 10):
        cfg = ReductionConfig(r=r, tau=1e-4, max_iter=100)
        rom_i, tr_i = isrk(model, cfg)
        rom_q, tr_q = quad_isrk(caching_oracle(state_space_oracle(model)), rule, cfg)
        if not (tr_i.converged and tr_q.converged):
            continue
        compared += 1
        h2_i = relative_errors(model, rom_i)["h2_rel"]
        h2_q = relative_errors(model, rom_q)["h2_rel"]
        worst = max(worst, abs(np.log10(h2_q) - np.log10(h2_i)))
    elapsed = time.perf_counter() - t0
    ok = compared > 0 and worst <= 0.3 and elapsed < 60.0
    _report(
        "criterion 7: sampled reduction tracks intrusive accuracy",
        ok,
        f"{compared}/5 compared, max |log10 ratio| {worst:.3f}, {elapsed:.1f}s",
    )


def test_criterion_08_quadrature_convergence():
    ok = True
    details = []
    for label, model in (
        ("scalar", _scalar_model()),
        ("modal n=6", generate_model("modal-beam-like", 6, 249)),
    ):
        Q = solve_lyapunov_Q(model).M
        errs = [
            np.linalg.norm(approx_gramian_Q(model, trapezoid_rule(1e-4, 1e4, hc)) - Q)
            for hc in (50, 100, 200, 400)
        ]
        ok = ok and all(b <= a for a, b in zip(errs, errs[1:]))
        details.append(f"{label}: " + " > ".join(f"{e:.1e}" for e in errs))
    rich = abs(
        approx_gramian_Q(_scalar_model(), trapezoid_rule(1e-4, 1e4, 2000))[0, 0] - 0.5
    )
    ok = ok and rich <= 1e-3
    details.append(f"scalar rich err {rich:.1e}")
    _report("criterion 8: quadrature Gramian converges", ok, "; ".join(details))


def test_criterion_09_rational_krylov_sylvester_residual():
    worst = 0.0
    for model, _, shifts in _equivalence_instances():
        K = rational_krylov_basis(model, shifts)
        R = np.ones((1, shifts.r))
        X = np.diag(shifts.shifts)
        rhs = model.E @ K @ X
        resid = model.A @ K + model.B @ R - rhs
        worst = max(worst, np.linalg.norm(resid) / np.linalg.norm(rhs))
    _report(
        "criterion 9: rational Krylov basis solves its Sylvester equation",
        worst <= 1e-10,
        f"max rel residual {worst:.2e} over 20 instances",
    )


def test_criterion_10_oracle_query_budget_and_isolation(tmp_path):
    sig_ok = list(inspect.signature(quad_isrk).parameters) == ["oracle", "rule", "config"]

    budgets_ok = True
    details = []
    scalar = _scalar_model()
    rich = trapezoid_rule(1e-4, 1e4, 2000)
    oracle = caching_oracle(state_space_oracle(scalar))
    rom, trace = quad_isrk(oracle, rich, ReductionConfig(r=1, tau=1e-4, max_iter=10))
    expected = rich.Nq + 1 * trace.iterations
    budgets_ok = budgets_ok and oracle.backend_queries == expected
    details.append(f"scalar: {oracle.backend_queries} == {expected}")

    model = generate_model("random-stable", 8, 4)
    rule = trapezoid_rule(1e-2, 1e2, 40)
    oracle2 = caching_oracle(state_space_oracle(model))
    rom2, trace2 = quad_isrk(oracle2, rule, ReductionConfig(r=2, tau=1e-4, max_iter=100))
    expected2 = rule.Nq + 2 * trace2.iterations
    budgets_ok = budgets_ok and oracle2.backend_queries == expected2
    details.append(f"n=8: {oracle2.backend_queries} == {expected2}")

    # Model-free rerun: replaying recorded samples must reproduce the ROM
    # without any state-space matrices in reach of quad_isrk.
    path = tmp_path / "samples.csv"
    pairs = [(rec.s, rec.value) for rec in oracle2.log.records if rec.source != "cache"]
    save_samples(pairs, path)
    replay = caching_oracle(replay_oracle(load_samples(path)))
    rom3, _ = quad_isrk(replay, rule, ReductionConfig(r=2, tau=1e-4, max_iter=100))
    replay_ok = all(
        np.array_equal(getattr(rom2, name), getattr(rom3, name))
        for name in ("E", "A", "B", "C")
    )
    details.append(f"signature={sig_ok}, replay identical={replay_ok}")
    _report(
        "criterion 10: backend query budget Nq + r*iterations, sample-only API",
        sig_ok and budgets_ok and replay_ok,
        "; ".join(details),
    )


def test_criterion_11_sweep_determinism(tmp_path):
    spec = BenchmarkSpec(
        kind="modal-beam-like",
        n=12,
        seed=3,
        r_list=(2, 4),
        half_count=100,
        tau=1e-4,
        max_iter=60,
    )
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        sweep_to_csv(run_sweep(spec), path)

    def strip_wall_time(path):
        lines = path.read_text().strip().splitlines()
        header = lines[0].split(",")
        drop = header.index("wall_time_s")
        return [
            ",".join(v for i, v in enumerate(line.split(",")) if i != drop)
            for line in lines
        ]

    a, b = strip_wall_time(paths[0]), strip_wall_time(paths[1])
    _report(
        "criterion 11: repeated sweep runs are bitwise identical",
        a == b,
        f"{len(a) - 1} rows compared without wall_time_s",
    )
