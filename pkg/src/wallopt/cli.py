"""Command-line front end: experiment presets 1-9, ad-hoc runs, reports.

Exit codes: 0 success, 2 config/precondition error, 3 I/O error, 4 failed
acceptance check in --check mode.
"""

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .avoidance import (
    FinitePoints,
    avoidance_set_from_dict,
    penalty_h1,
    penalty_h2,
    pole_wall,
)
from .basins import basin_stats, rasterize, write_label_csv, write_ppm
from .config import RunSpec, build_grid, build_objective, build_wall
from .drivers import avoid_iterate, escape_component, gamma_update_loop, write_jsonl
from .optimizers import (
    OptimizerConfig,
    Termination,
    armijo_with_constraints,
    backtracking_gd,
    bnqn,
    gradient_descent,
    projected_gd,
)
from .regions import region_from_spec

OK, RUN_FAILED, CONFIG_ERROR, IO_ERROR, CHECK_FAILED = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    pass


def _load_preset(n: int) -> dict:
    ref = resources.files("wallopt.presets").joinpath(f"example{n}.json")
    return json.loads(ref.read_text())


def _parse_floats(text, n=None):
    vals = [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    if n is not None and len(vals) != n:
        raise ConfigError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _parse_points(text):
    return [_parse_floats(p, 2) for p in text.split(";") if p.strip()]


def _outdir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise IOError(f"cannot write to {out}: {exc}") from exc
    return out


def _write_stats_csv(stats: dict, path):
    with open(path, "w") as fh:
        fh.write("label,cells,fraction\n")
        for label, row in stats.items():
            fh.write(f"{label},{row['cells']},{row['fraction']!r}\n")


def _summary(tag, trace):
    end = ",".join(f"{c:.10g}" for c in trace.end_point)
    print(
        f"{tag}: end=({end}) value={trace.end_value:.10g} "
        f"grad_norm={trace.grad_norms[-1]:.3g} "
        f"termination={trace.termination.value} iterates={len(trace)}"
    )


def _run_record(start, trace):
    class _Rec:
        def __init__(self):
            self.start = [float(c) for c in np.atleast_1d(np.asarray(start, float))]
            self.trace = trace

        def to_dict(self):
            return {
                "start": self.start,
                "end": [float(c) for c in trace.end_point],
                "value": float(trace.end_value),
                "termination": trace.termination.value,
                "iterates": len(trace),
            }

    return _Rec()


# ---------------------------------------------------------------------------
# experiment presets


def _grid_with_overrides(preset_grid, args):
    spec = dict(preset_grid)
    if args.grid:
        vals = _parse_floats(args.grid, 4)
        spec = {**spec, "center": vals[:2], "half_width": vals[2], "resolution": int(vals[3])}
    if args.resolution:
        spec = {**spec, "resolution": int(args.resolution)}
    return build_grid(spec)


def _example1(preset, args, out):
    f = build_objective(preset["objective"])
    line = avoidance_set_from_dict(preset["line"])
    gamma0 = preset["gamma0"]
    grid = _grid_with_overrides(preset["grid"], args)
    runs = preset["runs"]
    if args.method:
        runs = [r for r in runs if r["method"] == args.method]
    if args.wall:
        runs = [r for r in runs if r["wall"] == args.wall]
    if not runs:
        raise ConfigError("no preset run matches the requested method/wall")
    check_stats = None
    for run in runs:
        wall, method = run["wall"], run["method"]
        if wall == "pole":
            obj = pole_wall(f, line, 1, gamma0)
            tag = f"pole_{method}"
        else:
            eps = run["epsilon"]
            fn = penalty_h1 if wall == "h1" else penalty_h2
            obj = fn(f, line, eps, gamma0)
            tag = f"{wall}_eps{eps:g}_{method}"
        cfg = OptimizerConfig(
            method=method, learning_rate=run.get("learning_rate", 0.1), seed=args.seed
        )
        g = grid
        if "classify_tol" in run:
            g = _grid_with_overrides(
                {**preset["grid"], "classify_tol": run["classify_tol"]}, args
            )
        field = rasterize(obj, cfg, g, workers=args.workers)
        stats = basin_stats(field)
        write_ppm(field, grid, out / f"example1_{tag}.ppm")
        _write_stats_csv(stats, out / f"example1_{tag}_stats.csv")
        write_label_csv(field, out / f"example1_{tag}_labels.csv")
        frac = {k: round(v["fraction"], 4) for k, v in stats.items()}
        print(f"example1 {tag}: fractions {frac}")
        chk = preset["check"]["run"]
        if wall == chk["wall"] and method == chk["method"]:
            check_stats = stats
    if args.check:
        target = preset["check"]["min_fraction_p2_p3"]
        if check_stats is None:
            raise ConfigError("--check needs the pole/bnqn grid in the run set")
        got = check_stats["p2"]["fraction"] + check_stats["p3"]["fraction"]
        print(f"check: p2+p3 fraction {got:.4f} (need >= {target})")
        if got < target:
            return CHECK_FAILED
    return OK


def _example2(preset, args, out):
    f = build_objective(preset["objective"])
    grid = _grid_with_overrides(preset["grid"], args)
    roots = [np.asarray(r, float) for r in preset["roots"]]
    cfg = OptimizerConfig(seed=args.seed)
    all_stats = {}
    field = rasterize(f, cfg, grid, workers=args.workers)
    stats = basin_stats(field)
    all_stats["raw"] = stats
    write_ppm(field, grid, out / "example2_raw.ppm")
    _write_stats_csv(stats, out / "example2_raw_stats.csv")
    print("example2 raw:", {k: v["cells"] for k, v in stats.items()})
    for name, idxs in preset["walls"].items():
        avoid = FinitePoints([roots[i] for i in idxs])
        wall = pole_wall(f, avoid, preset["exponent"], 0.0)
        field = rasterize(wall, cfg, grid, workers=args.workers)
        stats = basin_stats(field)
        all_stats[name] = stats
        write_ppm(field, grid, out / f"example2_{name}.ppm")
        _write_stats_csv(stats, out / f"example2_{name}_stats.csv")
        print(f"example2 {name}:", {k: v["cells"] for k, v in stats.items()})
    if args.check:
        chk = preset["check"]
        missing = [
            f"p{i+1}" for i in range(5) if all_stats["raw"][f"p{i+1}"]["cells"] == 0
        ]
        leaked = [
            f"p{i+1}" for i in chk["g1_excludes"] if all_stats["G1"][f"p{i+1}"]["cells"] > 0
        ]
        print(f"check: raw missing {missing or 'none'}; G1 leaked {leaked or 'none'}")
        if missing or leaked:
            return CHECK_FAILED
    return OK


def _example3_classifier():
    xs = np.linspace(-4.0, 4.0, 8001)
    c1 = np.column_stack([xs, xs**2 + 2.0])
    c2 = np.column_stack([xs, -(xs**4) - 2.0])
    pts = {"C3": np.array([0.0, 1.0]), "C4": np.array([1.0, -1.0]), "C5": np.array([-1.0, 4.0])}

    def classify(p):
        p = np.asarray(p, float)
        best = ("C1", float(np.min(np.hypot(*(c1 - p).T))))
        d2 = float(np.min(np.hypot(*(c2 - p).T)))
        if d2 < best[1]:
            best = ("C2", d2)
        for label, q in pts.items():
            d = float(np.hypot(*(p - q)))
            if d < best[1]:
                best = (label, d)
        return best[0]

    return classify


def _example3(preset, args, out):
    f = build_objective(preset["objective"])
    start = _parse_floats(args.start, 2) if args.start else preset["start"]
    cfg = OptimizerConfig.from_dict(
        {**OptimizerConfig().to_dict(), **preset["optimizer"], "seed": args.seed}
    )
    classify = _example3_classifier()
    logs = {}
    for kind in ("pole", "product_pole"):
        log = avoid_iterate(
            f,
            preset["exponent"],
            preset["rounds"],
            start,
            cfg,
            wall_kind=kind,
            classifier=classify,
            accept_tol=preset["accept_tol"],
        )
        logs[kind] = log
        write_jsonl(log.rounds, out / f"example3_{kind}_rounds.jsonl")
        for r in log.rounds:
            print(
                f"example3 {kind} round {r.round_index}: end "
                f"({r.endpoint[0]:.6f},{r.endpoint[1]:.6f}) f={r.base_value:.2e} "
                f"{r.termination} label={r.label}"
            )
    if args.check:
        chk = preset["check"]
        margin = chk["region_margin"]

        def below(e):
            return e[1] < e[0] ** 2 + 2.0 - margin

        pole_ok = any(
            below(r.endpoint) and r.base_value <= chk["pole_escape_value"]
            for r in logs["pole"].rounds
        )
        tgt = np.asarray(chk["product_target"])
        prod_hit = any(
            np.hypot(*(np.asarray(r.endpoint) - tgt)) <= chk["product_target_tol"]
            for r in logs["product_pole"].rounds
        )
        prod_stays = not any(below(r.endpoint) for r in logs["product_pole"].rounds)
        print(f"check: pole escape {pole_ok}; product hit {prod_hit}; product stays {prod_stays}")
        if not (pole_ok and prod_hit and prod_stays):
            return CHECK_FAILED
    return OK


def _example4(preset, args, out):
    f = build_objective(preset["objective"])
    seed_start = _parse_floats(args.start, 2) if args.start else preset["seed_start"]
    seed_trace = bnqn(f, seed_start, OptimizerConfig(seed=args.seed))
    seed_trace.to_csv(out / "example4_seed_trace.csv")
    _summary("example4 seed", seed_trace)
    esc = preset["escape"]
    cfg = OptimizerConfig.from_dict(
        {**OptimizerConfig().to_dict(), **esc.get("optimizer", {}), "seed": args.seed}
    )
    logs = {}
    for name, exponent in (("escape", esc["exponent"]), ("control", preset["control"]["exponent"])):
        log = escape_component(
            f,
            exponent,
            seed_trace.end_point,
            cfg,
            offset_scale=esc["offset_scale"],
            rounds=esc["rounds"],
        )
        logs[name] = log
        write_jsonl(log.rounds, out / f"example4_{name}_rounds.jsonl")
        for r in log.rounds:
            print(
                f"example4 {name} (N={exponent}) round {r.round_index}: end "
                f"({r.endpoint[0]:.6f},{r.endpoint[1]:.6f}) f={r.base_value:.2e} {r.termination}"
            )
    if args.check:
        chk = preset["check"]

        def resid(e):
            return abs(e[1] ** 2 - e[0] ** 3 + e[0])

        escaped = any(
            r.endpoint[0] >= chk["x_min"] and resid(r.endpoint) <= chk["curve_tol"]
            for r in logs["escape"].rounds
        )
        xs = np.linspace(-1.0, 0.0, 4001)
        ys = np.sqrt(np.maximum(xs**3 - xs, 0.0))

        def c1_dist(e):
            return min(
                float(np.min(np.hypot(xs - e[0], ys - e[1]))),
                float(np.min(np.hypot(xs - e[0], -ys - e[1]))),
            )

        control_stays = all(c1_dist(r.endpoint) <= chk["control_band"] for r in logs["control"].rounds)
        print(f"check: escape {escaped}; control stays {control_stays}")
        if not (escaped and control_stays):
            return CHECK_FAILED
    return OK


def _example5(preset, args, out):
    f = build_objective(preset["objective"])
    avoid = avoidance_set_from_dict(preset["avoid"])
    seed = args.seed

    def sampler(rng):
        x0 = rng.uniform(-1.0, 1.0)
        err = rng.uniform(0.0, 1.0)
        return np.array([x0, -x0 - err])

    state = gamma_update_loop(
        f,
        avoid,
        preset["exponent"],
        preset["runs"],
        sampler,
        OptimizerConfig(seed=seed),
        restrict_component=lambda x: x[0] + x[1] < 0.0,
        gamma0=preset["gamma0"],
    )
    write_jsonl(state.history, out / "example5_gamma.jsonl")
    for rec in state.history:
        print(
            f"example5 run {rec.run_index}: gamma={rec.gamma:.10f} "
            f"best=({rec.best_point[0]:.8f},{rec.best_point[1]:.8f})"
        )
    if args.check:
        chk = preset["check"]
        gammas = [rec.gamma for rec in state.history]
        monotone = all(b <= a for a, b in zip(gammas, gammas[1:]))
        g_ok = abs(state.gamma - chk["gamma_target"]) <= chk["gamma_tol"]
        p_ok = (
            float(np.hypot(*(state.best_point - np.asarray(chk["best_point"]))))
            <= chk["best_tol"]
        )
        print(f"check: monotone {monotone}; gamma {g_ok}; best point {p_ok}")
        if not (monotone and g_ok and p_ok):
            return CHECK_FAILED
    return OK


def _constant_wall_runs(preset, args, out, name):
    f = build_objective(preset["objective"])
    wall = build_wall(preset["wall"], f)
    region = region_from_spec(preset["wall"]["region"])
    cfg = OptimizerConfig.from_dict(
        {**OptimizerConfig().to_dict(), **preset.get("optimizer", {}), "seed": args.seed}
    )
    starts = [_parse_floats(args.start, 2)] if args.start else preset["starts"]
    traces = []
    records = []
    for i, s in enumerate(starts):
        tr = bnqn(wall, s, cfg)
        traces.append(tr)
        records.append(_run_record(s, tr))
        tr.to_csv(out / f"{name}_run{i}_trace.csv")
        _summary(f"{name} from ({s[0]:g},{s[1]:g})", tr)
        inside = all(region(x) for x in tr.iterates)
        below = max(tr.values) < preset["wall"]["big_value"]
        if not (inside and below):
            print(f"warning: {name} run {i} left the allowed region")
    write_jsonl(records, out / f"{name}_runs.jsonl")
    return wall, traces


def _example6(preset, args, out):
    _, traces = _constant_wall_runs(preset, args, out, "example6")
    if any(t.termination == Termination.NON_FINITE for t in traces):
        return RUN_FAILED
    best = min(t.end_value for t in traces)
    print(f"example6 best final value: {best:.10g}")
    if args.check:
        ok = best <= preset["check"]["best_value"]
        print(f"check: best {best:.4f} <= {preset['check']['best_value']}: {ok}")
        if not ok:
            return CHECK_FAILED
    return OK


def _example7(preset, args, out):
    _, traces = _constant_wall_runs(preset, args, out, "example7")
    if any(t.termination == Termination.NON_FINITE for t in traces):
        return RUN_FAILED
    if args.check:
        chk = preset["check"]
        tgt = np.asarray(chk["target"])
        ok = all(
            float(np.hypot(*(t.end_point - tgt))) <= chk["point_tol"]
            and abs(t.end_value - chk["value"]) <= chk["value_tol"]
            for t in traces
        )
        print(f"check: all endpoints near ({tgt[0]:g},{tgt[1]:g}): {ok}")
        if not ok:
            return CHECK_FAILED
    return OK


def _example8(preset, args, out):
    wall, traces = _constant_wall_runs(preset, args, out, "example8")
    roots = [np.asarray(r, float) for r in preset["roots"]]
    rng = np.random.default_rng(args.seed)
    cfg = OptimizerConfig.from_dict(
        {**OptimizerConfig().to_dict(), **preset.get("optimizer", {})}
    )
    records = []
    bad_box = bad_root = 0
    for _ in range(preset["random_starts"]):
        x0 = rng.uniform(-5.0, 5.0, size=2)
        tr = bnqn(wall, x0, cfg)
        records.append(_run_record(x0, tr))
        e = tr.end_point
        if np.any(np.abs(e) > 5.0):
            bad_box += 1
        if tr.termination == Termination.GRAD_TOL and not any(
            float(np.hypot(*(e - r))) <= preset["check"]["root_tol"] for r in roots
        ):
            bad_root += 1
    write_jsonl(records, out / "example8_random_runs.jsonl")
    print(
        f"example8 random: {preset['random_starts']} starts, "
        f"{bad_box} escaped the box, {bad_root} converged off-root"
    )
    if args.check:
        tol = preset["check"]["root_tol"]
        fixed_ok = all(
            any(float(np.hypot(*(t.end_point - r))) <= tol for r in roots) for t in traces
        )
        print(f"check: fixed starts at roots {fixed_ok}; box {bad_box == 0}; roots {bad_root == 0}")
        if not (fixed_ok and bad_box == 0 and bad_root == 0):
            return CHECK_FAILED
    return OK


def _example9(preset, args, out):
    f = build_objective(preset["objective"])
    wall = build_wall(preset["wall"], f)
    start = _parse_floats(args.start, 2) if args.start else preset["start"]
    cfg = OptimizerConfig.from_dict(
        {**OptimizerConfig().to_dict(), **preset.get("optimizer", {}), "seed": args.seed}
    )
    tr_wall = bnqn(wall, start, cfg)
    tr_wall.to_csv(out / "example9_constant_wall_trace.csv")
    _summary("example9 constant wall", tr_wall)
    tr_con = armijo_with_constraints(
        f, start, lambda x: x[0] + x[1] <= 0.0, cfg
    )
    tr_con.to_csv(out / "example9_constrained_trace.csv")
    _summary("example9 armijo constrained", tr_con)
    write_jsonl([_run_record(start, tr_wall), _run_record(start, tr_con)],
                out / "example9_runs.jsonl")
    if args.check:
        chk = preset["check"]
        wall_ok = (
            float(np.hypot(*(tr_wall.end_point - np.asarray(chk["wall_target"]))))
            <= chk["wall_tol"]
        )
        e = tr_con.end_point
        con_ok = abs(e[0] + e[1]) <= chk["boundary_tol"] and (
            abs(tr_con.end_value - chk["boundary_value"]) <= chk["boundary_value_tol"]
        )
        print(f"check: constant wall reaches interior minimum {wall_ok}; constrained pins boundary {con_ok}")
        if not (wall_ok and con_ok):
            return CHECK_FAILED
    return OK


_EXAMPLES = {
    1: _example1,
    2: _example2,
    3: _example3,
    4: _example4,
    5: _example5,
    6: _example6,
    7: _example7,
    8: _example8,
    9: _example9,
}


def cmd_example(args) -> int:
    if args.n not in _EXAMPLES:
        raise ConfigError(f"unknown example {args.n}; choose 1-9")
    preset = _load_preset(args.n)
    if args.seed is None:
        args.seed = preset.get("seed", 0)
    out = _outdir(args)
    return _EXAMPLES[args.n](preset, args, out)


# ---------------------------------------------------------------------------
# ad-hoc runs


def _spec_from_args(args) -> RunSpec:
    if args.spec:
        try:
            return RunSpec.load(args.spec)
        except OSError as exc:
            raise IOError(str(exc)) from exc
    if args.objective:
        objective = args.objective
    elif args.poly:
        objective = {"poly": _parse_points(args.poly)}
    else:
        raise ConfigError("need --objective, --poly, or --spec")
    wall = None
    if args.wall and args.wall != "none":
        if args.wall in ("pole", "h1", "h2"):
            if args.avoid:
                aset = {"kind": "points", "points": _parse_points(args.avoid)}
            elif args.halfplane:
                a1, a2, b = _parse_floats(args.halfplane, 3)
                aset = {"kind": "hyperplane", "normal": [a1, a2], "offset": b, "scale": None}
            else:
                raise ConfigError(f"--wall {args.wall} needs --avoid or --halfplane")
            wall = {"kind": args.wall, "set": aset}
            if args.wall == "pole":
                wall["exponent"] = args.N
                wall["gamma"] = args.gamma
            else:
                wall["epsilon"] = args.epsilon
                wall["gamma0"] = args.gamma
        elif args.wall == "product":
            if not args.avoid:
                raise ConfigError("--wall product needs --avoid")
            wall = {"kind": "product", "points": _parse_points(args.avoid), "exponent": args.N}
        elif args.wall == "constant":
            if args.box:
                lx, ly, hx, hy = _parse_floats(args.box, 4)
                region = {"kind": "box", "lower": [lx, ly], "upper": [hx, hy]}
            elif args.halfplane:
                a1, a2, b = _parse_floats(args.halfplane, 3)
                region = {
                    "kind": "polytope",
                    "constraints": [{"normal": [a1, a2], "offset": b}],
                }
            else:
                raise ConfigError("--wall constant needs --box or --halfplane")
            wall = {"kind": "constant", "region": region, "big_value": args.R}
        else:
            raise ConfigError(f"unknown wall {args.wall!r}")
    optimizer = {"method": args.method}
    if args.no_step_cap:
        optimizer["step_cap"] = None
    start = _parse_floats(args.start, None) if args.start else None
    return RunSpec(
        objective=objective,
        wall=wall,
        optimizer=optimizer,
        start=start,
        seed=args.seed or 0,
    )


def cmd_minimize(args) -> int:
    spec = _spec_from_args(args)
    out = _outdir(args)
    obj = spec.make_objective()
    cfg = spec.make_config()
    x0 = spec.make_start()
    method = cfg.method
    if method == "gd":
        trace = gradient_descent(obj, x0, cfg)
    elif method == "bgd":
        trace = backtracking_gd(obj, x0, cfg)
    elif method == "bnqn":
        trace = bnqn(obj, x0, cfg)
    elif method == "pgd":
        if not args.halfplane:
            raise ConfigError("--method pgd needs --halfplane a1,a2,b")
        a1, a2, b = _parse_floats(args.halfplane, 3)
        normal = np.array([a1, a2])
        nn = float(normal @ normal)

        def project(x):
            excess = float(normal @ x) - b
            return x - (max(0.0, excess) / nn) * normal

        trace = projected_gd(obj, x0, project, cfg)
    elif method == "armijo-constrained":
        if not args.halfplane:
            raise ConfigError("--method armijo-constrained needs --halfplane a1,a2,b")
        a1, a2, b = _parse_floats(args.halfplane, 3)

        def constraint(x):
            return a1 * x[0] + a2 * x[1] <= b

        try:
            trace = armijo_with_constraints(obj, x0, constraint, cfg)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        raise ConfigError(f"unknown method {args.method!r}")
    spec.save(out / "run_spec.json")
    trace.to_csv(out / "trace.csv")
    _summary("minimize", trace)
    if trace.termination == Termination.WALL_START:
        return CONFIG_ERROR
    return OK


def cmd_basin(args) -> int:
    spec = _spec_from_args(args)
    out = _outdir(args)
    obj = spec.make_objective()
    cfg = spec.make_config()
    if cfg.method not in ("gd", "bgd", "bnqn"):
        raise ConfigError("basin rasterizer supports methods gd, bgd, bnqn")
    if not args.grid:
        raise ConfigError("basin needs --grid cx,cy,half_width,resolution")
    vals = _parse_floats(args.grid, 4)
    attractors = []
    for i, a in enumerate(args.attractor or []):
        pt_label = a.split(":")
        pt = _parse_floats(pt_label[0], 2)
        label = pt_label[1] if len(pt_label) > 1 else f"a{i}"
        palette = [(0, 255, 255), (255, 255, 0), (0, 255, 0), (255, 0, 0), (0, 0, 255)]
        attractors.append(
            {"point": pt, "label": label, "color": list(palette[i % len(palette)])}
        )
    grid = build_grid(
        {
            "center": vals[:2],
            "half_width": vals[2],
            "resolution": int(vals[3]),
            "attractors": attractors,
        }
    )
    field = rasterize(obj, cfg, grid, workers=args.workers)
    stats = basin_stats(field)
    write_ppm(field, grid, out / "basin.ppm")
    write_label_csv(field, out / "basin_labels.csv")
    _write_stats_csv(stats, out / "basin_stats.csv")
    spec.save(out / "run_spec.json")
    print("basin:", {k: v["cells"] for k, v in stats.items()})
    return OK


def cmd_report(args) -> int:
    paths = [Path(p) for p in args.logs]
    paths = [p for p in paths if p.exists()]
    if not paths:
        print("no log files to report", file=sys.stderr)
        return CONFIG_ERROR
    for path in paths:
        print(f"== {path}")
        try:
            records = [json.loads(line) for line in path.read_text().splitlines() if line]
        except (OSError, json.JSONDecodeError) as exc:
            print(f"  unreadable: {exc}", file=sys.stderr)
            return IO_ERROR
        if not records:
            print("  (empty)")
            continue
        if "gamma" in records[0]:
            gammas = [r["gamma"] for r in records]
            monotone = all(b <= a for a, b in zip(gammas, gammas[1:]))
            for r in records:
                print(
                    f"  run {r['run']}: gamma={r['gamma']:.10f} "
                    f"best=({r['best_point'][0]:.8f},{r['best_point'][1]:.8f}) "
                    f"value={r['best_value']:.10f}"
                )
            print(f"  gamma non-increasing: {monotone}")
        elif "round" in records[0]:
            for r in records:
                lab = f" label={r['label']}" if r.get("label") else ""
                print(
                    f"  round {r['round']}: end=({r['endpoint'][0]:.6f},"
                    f"{r['endpoint'][1]:.6f}) f={r['base_value']:.3e} "
                    f"{r['termination']} accepted={r['accepted']}{lab}"
                )
        else:
            for i, r in enumerate(records):
                print(
                    f"  run {i}: start={r.get('start')} end={r.get('end')} "
                    f"value={r.get('value')} {r.get('termination')}"
                )
    return OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="wallopt",
        description="Set-avoiding optimization: wall transforms, descent methods, basin maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("example", help="run a bundled experiment preset (1-9)")
    ex.add_argument("n", type=int)
    ex.add_argument("--out", default="wallopt_out")
    ex.add_argument("--workers", type=int, default=1)
    ex.add_argument("--check", action="store_true")
    ex.add_argument("--seed", type=int, default=None)
    ex.add_argument("--method", choices=["gd", "bgd", "bnqn"], default=None)
    ex.add_argument("--wall", choices=["pole", "h1", "h2"], default=None)
    ex.add_argument("--start", default=None, help="x,y override for fixed-start presets")
    ex.add_argument("--grid", default=None, help="cx,cy,half_width,resolution")
    ex.add_argument("--resolution", type=int, default=None)
    ex.set_defaults(fn=cmd_example)

    def add_run_flags(p):
        p.add_argument("--spec", default=None, help="RunSpec JSON file")
        p.add_argument("--objective", default=None)
        p.add_argument("--poly", default=None, help="re,im;re,im;... leading coefficient first")
        p.add_argument(
            "--wall",
            choices=["pole", "product", "constant", "h1", "h2", "none"],
            default="none",
        )
        p.add_argument("--avoid", default=None, help="x,y;x,y;... points to avoid")
        p.add_argument("--halfplane", default=None, help="a1,a2,b meaning a.x <= b")
        p.add_argument("--box", default=None, help="lx,ly,hx,hy allowed box")
        p.add_argument("--N", type=int, default=2, help="pole exponent")
        p.add_argument("--R", type=float, default=1000.0, help="constant wall value")
        p.add_argument("--gamma", type=float, default=0.0)
        p.add_argument("--epsilon", type=float, default=0.001)
        p.add_argument("--start", default=None, help="x,y")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--no-step-cap", action="store_true")
        p.add_argument("--out", default="wallopt_out")

    mn = sub.add_parser("minimize", help="single optimizer run")
    add_run_flags(mn)
    mn.add_argument(
        "--method",
        choices=["gd", "bgd", "bnqn", "pgd", "armijo-constrained"],
        default="bnqn",
    )
    mn.set_defaults(fn=cmd_minimize)

    bs = sub.add_parser("basin", help="rasterize basins of attraction")
    add_run_flags(bs)
    bs.add_argument("--method", choices=["gd", "bgd", "bnqn"], default="bnqn")
    bs.add_argument("--grid", default=None, help="cx,cy,half_width,resolution")
    bs.add_argument("--attractor", action="append", default=None, help="x,y:label")
    bs.add_argument("--workers", type=int, default=1)
    bs.set_defaults(fn=cmd_basin)

    rp = sub.add_parser("report", help="summarize run/round logs")
    rp.add_argument("logs", nargs="*")
    rp.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except IOError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
