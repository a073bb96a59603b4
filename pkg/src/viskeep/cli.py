"""Command-line front end.

Subcommands:

* ``check``     -- closed-form solvability test of a scenario file
* ``synth``     -- build the gain polytope, pick the minimum-norm gain,
                   verify the admissibility and invariance certificates
* ``simulate``  -- integrate the nonlinear closed loop and monitor bounds
* ``chain``     -- chain feasibility, schedule generation, length bound
* ``fme``       -- project an inequality-system file and report feasibility
* ``demo``      -- regenerate all bundled benchmark runs

Exit codes: 0 success/feasible, 1 analytic infeasibility or violated run,
2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import demos
from .chains import (
    ChainSpec,
    ParameterMaps,
    ScheduleInfeasibleError,
    chain_to_json_dict,
    closed_chain_check,
    feasible_chain,
    generate_schedule,
    load_chain,
    max_chain_length,
)
from .inequalities import LinearInequalitySystem
from .scenarios import (
    BasicScenario,
    CircleScenario,
    UbbScenario,
    build_basic_system,
    build_circle_system,
    build_ubb_system,
    exact_basic,
    exact_circle,
    derive_conditions_fme,
    feasible_basic,
    feasible_circle,
    feasible_ubb,
    gain_polytope,
    gain_polytope_circle,
    gain_polytope_ubb,
    load_scenario,
    rationalization_record,
    save_scenario,
    scenario_to_json_dict,
)
from .simulate import (
    LeaderProfile,
    monitor,
    profile_from_json_dict,
    simulate_basic,
    simulate_chain,
    simulate_circle,
    simulate_ubb,
    uniform_noise,
)
from .synthesis import InfeasiblePolytopeError, min_norm_gain
from .systems import (
    GainMatrix,
    check_admissible,
    check_D_invariant_cone,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2


def _write_json(path, payload) -> None:
    if path is None:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _dispatch(sc):
    if isinstance(sc, UbbScenario):
        return feasible_ubb, gain_polytope_ubb, build_ubb_system
    if isinstance(sc, BasicScenario):
        return feasible_basic, gain_polytope, build_basic_system
    if isinstance(sc, CircleScenario):
        return feasible_circle, gain_polytope_circle, build_circle_system
    raise ValueError(f"unsupported scenario {sc!r}")


def cmd_check(args) -> int:
    sc = load_scenario(args.scenario)
    feas, _, _ = _dispatch(sc)
    report = feas(sc)
    payload = {"scenario": scenario_to_json_dict(sc)}
    payload.update(report.to_json_dict())
    if isinstance(sc, BasicScenario) and not isinstance(sc, UbbScenario):
        payload["projection_agrees"] = derive_conditions_fme(sc) == report.feasible
    _write_json(args.out, payload)
    if not report.feasible:
        print(f"infeasible: {report.worst().condition}", file=sys.stderr)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_synth(args) -> int:
    sc = load_scenario(args.scenario)
    feas, poly_fn, build_fn = _dispatch(sc)
    poly = poly_fn(sc).reduce()
    try:
        result = min_norm_gain(poly)
    except InfeasiblePolytopeError:
        print("gain polytope is empty", file=sys.stderr)
        return EXIT_INFEASIBLE
    K = GainMatrix(*result.exact_gain)
    sysd = build_fn(sc)
    adm = check_admissible(K, sysd.S, sysd.U)
    inv = check_D_invariant_cone(sysd, K, args.tau)
    consts = (exact_circle(sc) if isinstance(sc, CircleScenario)
              else exact_basic(sc))
    payload = {
        "scenario": scenario_to_json_dict(sc),
        "feasible_conditions": feas(sc).to_json_dict(),
        "polytope_rows": len(poly.rows),
        "rationalization": rationalization_record(consts),
        "certificates": {
            "admissible": adm.holds,
            "invariant": inv.holds,
            "tau": args.tau,
        },
    }
    payload.update(result.to_json_dict())
    _write_json(args.out, payload)
    if args.dump_polytope:
        Path(args.dump_polytope).write_text(poly.to_text())
    ok = adm.holds and inv.holds
    if not ok:
        print("certificate verification failed", file=sys.stderr)
    return EXIT_OK if ok else EXIT_INFEASIBLE


def _load_gain(path) -> GainMatrix:
    with open(path) as fh:
        data = json.load(fh)
    g = data.get("gain", data)
    return GainMatrix(float(g["k11"]), float(g["k22"]), float(g["k23"]))


def _load_profile(path) -> LeaderProfile:
    with open(path) as fh:
        return profile_from_json_dict(json.load(fh))


def _parse_s0(text: str):
    return tuple(float(tok) for tok in text.split(","))


def cmd_simulate(args) -> int:
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.chain_spec:
        spec = load_chain(args.chain_spec)
        if not args.gains:
            raise ValueError("chain simulation needs --gains")
        with open(args.gains) as fh:
            gain_list = json.load(fh)
        gains = [GainMatrix(g["k11"], g["k22"], g["k23"]) for g in gain_list]
        profile = (_load_profile(args.profile) if args.profile
                   else LeaderProfile(lambda t: 0.0, lambda t: 0.0))
        s0 = ([_parse_s0(tok) for tok in args.s0.split(";")] if args.s0
              else [(0.0, 0.0, 0.0)] * (spec.n - 1))
        traces = simulate_chain(spec, gains, profile, s0, args.horizon, args.dt)
        clean = True
        reports = []
        for k, trace in enumerate(traces, start=1):
            g = spec.links[k - 1]
            from .boxes import Box
            S = Box.symmetric((g.a, g.a, g.b))
            U = Box.symmetric((spec.robots[k].V, spec.robots[k].Omega))
            rep = monitor(trace, S, U, tol=args.tol)
            trace.to_csv(out_dir / f"trace_link{k}.csv")
            reports.append(rep.to_json_dict())
            clean = clean and rep.clean and trace.clamp_events == 0
        _write_json(out_dir / "violations.json", {"links": reports})
        return EXIT_OK if clean else EXIT_INFEASIBLE

    sc = load_scenario(args.scenario)
    if args.gain:
        K = _load_gain(args.gain)
    else:
        _, poly_fn, _ = _dispatch(sc)
        K = GainMatrix(*min_norm_gain(poly_fn(sc).reduce()).exact_gain).as_floats()
    profile = (_load_profile(args.profile) if args.profile
               else LeaderProfile(lambda t: 0.0, lambda t: 0.0))
    s0 = _parse_s0(args.s0) if args.s0 else (0.0, 0.0, 0.0)
    if isinstance(sc, UbbScenario):
        sampler = None
        if args.noise_amplitude is not None:
            sampler = uniform_noise(args.noise_amplitude, args.noise_amplitude,
                                    args.seed)
        trace = simulate_ubb(sc, K, profile, sampler, s0, args.horizon,
                             args.dt, seed=args.seed)
        sysd = build_ubb_system(sc)
    elif isinstance(sc, BasicScenario):
        trace = simulate_basic(sc, K, profile, s0, args.horizon, args.dt)
        sysd = build_basic_system(sc)
    else:
        trace = simulate_circle(sc, K, profile, s0, args.horizon, args.dt)
        sysd = build_circle_system(sc)
    rep = monitor(trace, sysd.S, sysd.U, tol=args.tol)
    trace.to_csv(out_dir / "trace.csv")
    payload = rep.to_json_dict()
    payload["clamp_events"] = trace.clamp_events
    _write_json(out_dir / "violations.json", payload)
    return EXIT_OK if rep.clean and trace.clamp_events == 0 else EXIT_INFEASIBLE


def _parse_maps(text: str) -> ParameterMaps:
    vals = {}
    for tok in text.split(","):
        key, _, val = tok.partition("=")
        vals[key.strip()] = float(val)
    try:
        return ParameterMaps.constant(vals["a"], vals["b"], vals["d"])
    except KeyError as exc:
        raise ValueError("maps need a=..,b=..,d=..") from exc


def cmd_chain(args) -> int:
    payload = {}
    feasible = True
    if args.generate:
        vals = {}
        for tok in args.generate.split(","):
            key, _, val = tok.partition("=")
            vals[key.strip()] = float(val)
        try:
            spec = generate_schedule(
                a=vals["a"], d=vals["d"], n=int(vals["n"]), V_1=vals["V1"],
                safety=vals.get("safety", 0.1),
            )
        except ScheduleInfeasibleError as exc:
            print(exc, file=sys.stderr)
            return EXIT_INFEASIBLE
        payload["generated"] = chain_to_json_dict(
            spec, provenance={"generator": vals}
        )
    elif args.spec:
        spec = load_chain(args.spec)
    else:
        spec = None
    if spec is not None:
        report = feasible_chain(spec)
        payload["feasible"] = report.to_json_dict()
        feasible = report.feasible
        if args.closed:
            payload["closed"] = closed_chain_check(spec).to_json_dict()
    if args.maps:
        maps = _parse_maps(args.maps)
        res = max_chain_length(maps, args.max_n)
        payload["max_chain_length"] = {
            "max_robots": res.max_robots, "capped": res.capped,
        }
    if not payload:
        raise ValueError("nothing to do: pass --spec, --generate or --maps")
    _write_json(args.out, payload)
    return EXIT_OK if feasible else EXIT_INFEASIBLE


def cmd_fme(args) -> int:
    text = Path(args.input).read_text()
    system = LinearInequalitySystem.from_text(text)
    if args.eliminate:
        drop = sorted({int(tok) for tok in args.eliminate.split(",")})
        keep = [i for i in range(system.num_vars) if i not in drop]
    elif args.keep is not None:
        keep = sorted({int(tok) for tok in args.keep.split(",")} if args.keep else set())
    else:
        keep = []
    projected = system.project(keep)
    feasible = all(row.rhs >= 0 for row in projected.project(()).rows)
    out = projected.to_text()
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    print(f"feasible: {feasible}", file=sys.stderr)
    return EXIT_OK if feasible else EXIT_INFEASIBLE


def cmd_demo(args) -> int:
    out_root = Path(args.out)
    horizon = args.horizon
    overall = EXIT_OK
    summary = {}
    for b in demos.BUNDLES:
        out_dir = out_root / b.name
        out_dir.mkdir(parents=True, exist_ok=True)
        if b.name == "chain":
            from .chains import save_chain

            save_chain(b.scenario, out_dir / "scenario.json")
            rep = feasible_chain(b.scenario)
            _write_json(out_dir / "check.json", rep.to_json_dict())
            gains = []
            for k in range(1, b.scenario.n):
                link_sc = b.scenario.link_scenario(k)
                res = min_norm_gain(gain_polytope(link_sc).reduce())
                gains.append(res)
            _write_json(out_dir / "gains.json",
                        [r.to_json_dict() for r in gains])
            traces = simulate_chain(
                b.scenario, [r.gain for r in gains], b.profile, b.s0,
                horizon, args.dt,
            )
            clean = rep.feasible
            from .boxes import Box

            for k, trace in enumerate(traces, start=1):
                g = b.scenario.links[k - 1]
                S = Box.symmetric((g.a, g.a, g.b))
                U = Box.symmetric(
                    (b.scenario.robots[k].V, b.scenario.robots[k].Omega)
                )
                mon = monitor(trace, S, U)
                trace.to_csv(out_dir / f"trace_link{k}.csv")
                clean = clean and mon.clean and trace.clamp_events == 0
            summary[b.name] = "ok" if clean else "VIOLATIONS"
            if not clean:
                overall = EXIT_INFEASIBLE
            continue

        save_scenario(b.scenario, out_dir / "scenario.json")
        _write_json(out_dir / "profile.json", demos.PROFILE_JSON[b.name])
        feas, poly_fn, build_fn = _dispatch(b.scenario)
        rep = feas(b.scenario)
        _write_json(out_dir / "check.json", rep.to_json_dict())
        res = min_norm_gain(poly_fn(b.scenario).reduce())
        _write_json(out_dir / "gain.json", res.to_json_dict())
        if b.name == "basic":
            trace = simulate_basic(b.scenario, res.gain, b.profile, b.s0,
                                   horizon, args.dt)
        elif b.name == "ubb":
            sampler = uniform_noise(b.noise_amplitude, b.noise_amplitude,
                                    args.seed)
            trace = simulate_ubb(b.scenario, res.gain, b.profile, sampler,
                                 b.s0, horizon, args.dt)
        else:
            trace = simulate_circle(b.scenario, res.gain, b.profile, b.s0,
                                    horizon, args.dt)
        sysd = build_fn(b.scenario)
        mon = monitor(trace, sysd.S, sysd.U)
        trace.to_csv(out_dir / "trace.csv")
        _write_json(out_dir / "violations.json", mon.to_json_dict())
        clean = rep.feasible and mon.clean and trace.clamp_events == 0
        summary[b.name] = "ok" if clean else "VIOLATIONS"
        if not clean:
            overall = EXIT_INFEASIBLE
    _write_json(out_root / "summary.json", summary)
    for name, status in summary.items():
        print(f"{name}: {status}")
    return overall


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viskeep",
        description="visibility-keeping gain synthesis and validation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="closed-form solvability test")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synth", help="minimum-norm certified gain")
    p.add_argument("--scenario", required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--out")
    p.add_argument("--dump-polytope")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="nonlinear closed-loop run")
    p.add_argument("--scenario")
    p.add_argument("--chain-spec")
    p.add_argument("--gain")
    p.add_argument("--gains")
    p.add_argument("--profile")
    p.add_argument("--s0")
    p.add_argument("--horizon", type=float, default=60.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--noise-amplitude", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("chain", help="chain feasibility and bounds")
    p.add_argument("--spec")
    p.add_argument("--generate", help="a=..,d=..,n=..,V1=..[,safety=..]")
    p.add_argument("--maps", help="a=..,b=..,d=.. constant geometry maps")
    p.add_argument("--max-n", type=int, default=100)
    p.add_argument("--closed", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("fme", help="project an inequality-system file")
    p.add_argument("--input", required=True)
    p.add_argument("--eliminate", help="comma-separated variable indices")
    p.add_argument("--keep", help="comma-separated variable indices")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fme)

    p = sub.add_parser("demo", help="regenerate all benchmark bundles")
    p.add_argument("--out", default="demo_out")
    p.add_argument("--horizon", type=float, default=demos.DEFAULT_HORIZON)
    p.add_argument("--dt", type=float, default=demos.DEFAULT_DT)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
