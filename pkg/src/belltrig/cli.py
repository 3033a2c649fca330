"""Command-line front end.

Results go to stdout (or ``--out``), diagnostics to stderr.  Exit status is
0 on success, 1 on a domain error (bad vector, infeasible request, unwritable
file) and 2 on a usage error.  Every number is printed with 17 significant
digits so output round-trips and repeats byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import atlas, geometry, hvsim, inequalities, optrig, parsing
from .config import TOLERANCE_NAMES, DomainError, override_tolerances

ENV_SEED = "BELLTRIG_SEED"


# -- formatting -------------------------------------------------------------


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _scalar_json(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _num(v) if math.isfinite(v) else "null"
    import json

    return json.dumps(str(v))


def to_json(obj: Any, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{_scalar_json(str(k))}: {to_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_scalar_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + to_json(v, indent + 1) for v in obj) + "\n" + pad + "]"
    return _scalar_json(obj)


def _flatten(obj: dict, prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _text_value(v: Any) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(_text_value(x) for x in v)
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _num(v)
    return str(v)


def render(result: dict, fmt: str) -> str:
    if fmt == "json":
        return to_json(result) + "\n"
    flat = _flatten(result)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(flat.keys())
        w.writerow(_text_value(v) for v in flat.values())
        return buf.getvalue()
    return "".join(f"{k}: {_text_value(v)}\n" for k, v in flat.items())


# -- argument types ---------------------------------------------------------


def _tolerance(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    if name not in TOLERANCE_NAMES:
        raise argparse.ArgumentTypeError(f"unknown tolerance {name!r}; known: {', '.join(TOLERANCE_NAMES)}")
    try:
        v = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name} needs a number, got {value!r}") from None
    if not v >= 0.0:
        raise argparse.ArgumentTypeError(f"tolerance {name} must be nonnegative")
    return name, v


def _seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None


class _Args:
    """Typed access to parsed options, resolving angles and vectors lazily.

    Conversion happens inside the command so that malformed values surface
    as domain errors naming the offending option.
    """

    def __init__(self, ns: argparse.Namespace):
        self.ns = ns

    def __getattr__(self, name: str) -> Any:
        return getattr(self.ns, name)

    def angle(self, option: str) -> float:
        raw = getattr(self.ns, option)
        try:
            return parsing.parse_angle(raw, degrees=self.ns.degrees)
        except DomainError as exc:
            raise DomainError(f"--{option.replace('_', '-')}: {exc}") from None

    def vector(self, option: str) -> geometry.StateVector:
        raw = getattr(self.ns, option)
        try:
            v = parsing.parse_vector(raw)
            return geometry.normalize(v) if getattr(self.ns, "normalize", False) else v
        except DomainError as exc:
            raise DomainError(f"--{option.replace('_', '-')}: {exc}") from None


# -- commands ---------------------------------------------------------------


def cmd_angle(a: _Args) -> dict:
    x, y = a.vector("x"), a.vector("y")
    if a.z is None:
        return {"phi_xy": geometry.angle_between(x, y), "inner_product": _complex(geometry.inner_product(x, y))}
    z = a.vector("z")
    r = geometry.triangle_check(x, y, z)
    return {"phi_xy": r.phi_xy, "phi_yz": r.phi_yz, "phi_xz": r.phi_xz, "slack": r.slack, "satisfied": r.satisfied}


def _complex(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def cmd_gram(a: _Args) -> dict:
    if (a.cos is None) == (not a.vectors):
        raise DomainError("give exactly one of --cos or --vectors")
    if a.cos is not None:
        try:
            vals = parsing.parse_reals(a.cos)
        except DomainError as exc:
            raise DomainError(f"--cos: {exc}") from None
        if len(vals) != 3:
            raise DomainError(f"--cos: expected three cosines, got {len(vals)}")
        r = geometry.gram_feasibility(vals)
        return {
            "a1": vals[0], "a2": vals[1], "a3": vals[2],
            "determinant": r.determinant, "feasible": r.feasible, "coplanar": r.coplanar,
            "slack": r.slack, "forms_agree": r.forms_agree,
            "wigner_identity_gap": inequalities.wigner_identity_gap(vals),
        }
    vecs = []
    for i, text in enumerate(a.vectors):
        try:
            vecs.append(parsing.parse_vector(text))
        except DomainError as exc:
            raise DomainError(f"--vectors[{i}]: {exc}") from None
    g = geometry.gram_matrix(vecs)
    return {
        "n": len(vecs),
        "matrix_re": [list(row) for row in g.real],
        "matrix_im": [list(row) for row in g.imag],
        "determinant": float(np.linalg.det(g).real),
        "min_eigenvalue": geometry.min_eigenvalue(g),
    }


def _matrix(text: str, option: str) -> optrig.SpdOperator:
    try:
        return optrig.SpdOperator(parsing.parse_matrix(text))
    except DomainError as exc:
        raise DomainError(f"--{option}: {exc}") from None


def cmd_optrig(a: _Args) -> dict:
    A = _matrix(a.matrix, "matrix")
    mm = optrig.minmax_check(A)
    out: dict[str, Any] = {
        "cos_phi": mm.cos_phi, "sin_phi": mm.sin_phi,
        "sum_of_squares": mm.sum_of_squares, "minmax_holds": mm.holds,
    }
    if a.numeric:
        out["cos_phi_numeric"] = optrig.cos_phi_numeric(A, seed=a.seed)
        out["sin_phi_numeric"] = optrig.sin_phi_numeric(A)
    if a.matrix_b is not None:
        B = _matrix(a.matrix_b, "matrix-b")
        r = optrig.accretivity_condition(A, B)
        out["accretivity"] = {
            "sin_phi_b": r.sin_phi_b, "cos_phi_a": r.cos_phi_a, "condition_holds": r.condition_holds,
            "re_ba_min_eig": r.re_ba_min_eig, "accretive": r.accretive,
        }
    return out


def _convention(a: _Args) -> inequalities.Convention:
    if a.convention is None:
        raise _UsageError("--convention {spin,photon} is required")
    return inequalities.Convention.parse(a.convention)


def cmd_wigner(a: _Args) -> dict:
    if a.config is not None:
        obj = parsing.load_json(a.config)
        if a.convention is not None:
            obj = {**obj, "convention": a.convention}
        if "convention" not in obj:
            raise _UsageError("the config has no convention; pass --convention {spin,photon}")
        cfg = parsing.wigner_config_from_json(obj)
    else:
        if None in (a.theta12, a.theta23, a.theta13):
            raise _UsageError("give --theta12, --theta23 and --theta13, or --config")
        cfg = inequalities.WignerConfig(a.angle("theta12"), a.angle("theta23"), a.angle("theta13"), _convention(a))
    r = inequalities.wigner_inequality(cfg)
    left, right = inequalities.wigner_equality_sides(cfg)
    return {
        "convention": cfg.convention.value,
        "lhs": r.lhs, "rhs": r.rhs, "slack": r.slack, "satisfied": r.satisfied,
        "equality_left": left, "equality_right": right,
        "identity_gap": inequalities.wigner_identity_gap(cfg.cosines()),
    }


def cmd_chsh(a: _Args) -> dict:
    if a.family or a.bound:
        if a.phi is None:
            raise _UsageError("--phi is required with --family or --bound")
        phi = a.angle("phi")
        if not 0.0 <= phi <= math.pi:
            raise DomainError(f"--phi: {phi!r} is outside [0, pi]")
        if a.bound:
            return {"phi": phi, "bound": inequalities.chsh_bound_curve(phi)}
        value = inequalities.chsh_one_parameter_family(phi)
        return {"phi": phi, "value": value, "region": inequalities.classify_chsh(value).value}
    if a.config is not None:
        cfg = parsing.chsh_config_from_json(parsing.load_json(a.config))
    else:
        if None in (a.a, a.b, a.c, a.d):
            raise _UsageError("give --a, --b, --c and --d, or --config, or --family/--bound")
        vecs = [a.vector(k) for k in "abcd"]
        cfg = inequalities.ChshConfig(*(v.components for v in vecs))
    return inequalities.chsh_quantum(cfg).to_dict()


def _assignment(text: str, i: int) -> hvsim.ChshAssignment:
    t = text.strip()
    if len(t) != 4 or set(t) - {"+", "-"}:
        raise DomainError(f"--assignments[{i}]: expected four signs like '+-+-', got {text!r}")
    return hvsim.ChshAssignment(*(1 if ch == "+" else -1 for ch in t))


def cmd_lhv(a: _Args) -> dict:
    if a.enumerate:
        return {"domains": [str(d) for d in hvsim.enumerate_domains(anticorrelated=a.anticorrelated)]}
    if a.distribution is not None:
        r = hvsim.lhv_wigner_check(parsing.distribution_from_json(parsing.load_json(a.distribution)))
        return {"lhs": r.lhs, "rhs": r.rhs, "slack": r.slack, "satisfied": r.satisfied}
    if a.assignments:
        r = hvsim.lhv_correlation([_assignment(t, i) for i, t in enumerate(a.assignments)])
        return {"e_ab": r.e_ab, "e_ac": r.e_ac, "e_db": r.e_db, "e_dc": r.e_dc, "chsh_value": r.chsh_value}
    if a.check_vertices:
        doms = hvsim.enumerate_domains()
        ok = [hvsim.lhv_wigner_check(hvsim.DomainDistribution.point_mass(d)).satisfied for d in doms]
        anti = [d for d in doms if d.anticorrelated]
        ok_anti = sum(hvsim.lhv_wigner_check(hvsim.DomainDistribution.point_mass(d)).satisfied for d in anti)
        terms = [hvsim.chsh_term(s) for s in hvsim.enumerate_assignments()]
        n_two = sum(t == 2 for t in terms)
        summary = (
            f"{sum(ok)}/{len(doms)} Wigner vertices satisfy P12 + P23 >= P13; "
            f"{n_two}/{len(terms)} CHSH terms equal 2"
        )
        return {
            "summary": summary,
            "wigner_vertices_satisfied": int(sum(ok)),
            "wigner_vertices_total": len(doms),
            "wigner_violating_vertices": [str(d) for d, good in zip(doms, ok) if not good],
            "anticorrelated_vertices_satisfied": int(ok_anti),
            "anticorrelated_vertices_total": len(anti),
            "chsh_terms_equal_2": n_two,
            "chsh_terms_total": len(terms),
        }
    raise _UsageError("choose one of --check-vertices, --enumerate, --distribution, --assignments")


def cmd_sample(a: _Args) -> dict:
    theta = a.angle("theta")
    if a.n < 2:
        raise DomainError(f"--n: need at least 2 draws, got {a.n}")
    batch = hvsim.sample_singlet(theta, a.n, seed=a.seed, workers=a.workers)
    d = batch.to_dict()
    d["expected"] = -math.cos(theta)
    return d


def _range(a: _Args, text: str, i: int) -> atlas.ParamRange:
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"--range[{i}]: expected LO:HI:STEP, got {text!r}")
    try:
        lo, hi, step = (parsing.parse_angle(p, degrees=a.degrees) for p in parts)
    except DomainError as exc:
        raise DomainError(f"--range[{i}]: {exc}") from None
    return atlas.ParamRange(lo, hi, step)


_DEFAULT_RANGES = {
    atlas.Family.WIGNER_COPLANAR: [(0.0, math.pi, math.pi / 180.0)] * 2,
    atlas.Family.CHSH_PLANAR_FAMILY: [(0.0, math.pi, math.pi / 360.0)],
}


def cmd_sweep(a: _Args) -> dict | None:
    family = atlas.Family(a.family)
    if a.range:
        ranges = [_range(a, t, i) for i, t in enumerate(a.range)]
    elif family in _DEFAULT_RANGES:
        ranges = [atlas.ParamRange(*r) for r in _DEFAULT_RANGES[family]]
    else:
        raise _UsageError("chsh_planar_grid needs four --range LO:HI:STEP options")
    conv = None
    if family is atlas.Family.WIGNER_COPLANAR:
        conv = _convention(a)
    spec = atlas.SweepSpec(family, tuple(ranges), conv)
    records = atlas.sweep_wigner(spec) if family is atlas.Family.WIGNER_COPLANAR else atlas.sweep_chsh(spec)
    if a.out is not None:
        fmt = a.format if a.format in ("csv", "json") else None
        atlas.export_atlas(records, a.out, fmt=fmt, param_names=spec.param_names)
        n_violation = sum(r.region is inequalities.Region.QUANTUM_VIOLATION for r in records)
        print(f"wrote {len(records)} records ({n_violation} in violation) to {a.out}", file=sys.stderr)
        return None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*spec.param_names, "value", "slack", "region"])
    for r in records:
        w.writerow([*map(_num, r.params), _num(r.value), _num(r.slack), r.region.value])
    sys.stdout.write(buf.getvalue())
    return None


def cmd_maximize(a: _Args) -> dict:
    r = atlas.maximize_chsh(a.dim, seed=a.seed, starts=a.starts)
    return {
        "dim": a.dim, "seed": a.seed,
        "best_value": r.best_value, "gap_to_2sqrt2": inequalities.TSIRELSON - r.best_value,
        "theta_bc_at_max": r.theta_bc_at_max, "cos_u1_u2": r.cos_u1_u2,
        "iterations": r.iterations, "start_index": r.start_index,
        "a": list(r.best_params[0]), "b": list(r.best_params[1]),
        "c": list(r.best_params[2]), "d": list(r.best_params[3]),
    }


def cmd_boundary(a: _Args) -> dict:
    roots = atlas.trace_boundary()
    return {"crossings": roots, "values": [inequalities.chsh_one_parameter_family(r) for r in roots]}


# -- parser -----------------------------------------------------------------


class _UsageError(Exception):
    pass


def _common(top: bool) -> argparse.ArgumentParser:
    # Options may appear before or after the subcommand.  Subparsers leave
    # unset options alone so they do not clobber values given up front.
    def dflt(value: Any) -> Any:
        return value if top else argparse.SUPPRESS

    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=_seed, default=dflt(None), help=f"random seed (default: ${ENV_SEED} or 0)")
    g.add_argument("--format", choices=("text", "json", "csv"), default=dflt(None), help="output format (default text)")
    g.add_argument("--out", default=dflt(None), help="write results to this file instead of stdout")
    g.add_argument("--tol", action="append", type=_tolerance, default=dflt([]), metavar="NAME=VALUE",
                   help=f"override a tolerance; names: {', '.join(TOLERANCE_NAMES)}")
    g.add_argument("--degrees", action="store_true", default=dflt(False),
                   help="read angle arguments in degrees (output stays radians)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common(top=False)
    parser = argparse.ArgumentParser(
        prog="belltrig",
        description="Vector-trigonometric tools for Bell-type inequalities.",
        parents=[_common(top=True)],
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, func: Callable, help: str, description: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help, description=description,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
        return p

    p = add("angle", cmd_angle, "angles and the triangle inequality",
            "Angles from cos(phi_xy) = Re<x,y>; with --z checks phi_xz <= phi_xy + phi_yz.\n"
            "Vectors are comma-separated, complex entries as re+imi (e.g. 0.5-0.5i).")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--z")
    p.add_argument("--normalize", action="store_true", help="normalize inputs instead of rejecting non-unit vectors")

    p = add("gram", cmd_gram, "Gram determinant feasibility",
            "With --cos a1,a2,a3: 1 + 2 a1 a2 a3 - (a1^2 + a2^2 + a3^2) >= 0 decides whether three\n"
            "cosines come from unit vectors.  With --vectors: the matrix G_ij = <v_i, v_j>.\n"
            "Use --cos=-0.5,0.1,0.2 when the first value is negative.")
    p.add_argument("--cos")
    p.add_argument("--vectors", nargs="+")

    p = add("optrig", cmd_optrig, "operator angles of SPD matrices",
            "cos phi(A) = inf <Ax,x>/(|Ax||x|), sin phi(B) = inf_eps |eps B - I|, and\n"
            "sin^2 + cos^2 = 1.  With --matrix-b: sin phi(B) <= cos phi(A) vs accretivity of BA.\n"
            "Matrices as '2,0;0,3' or JSON '[[2,0],[0,3]]'.")
    p.add_argument("--matrix", required=True)
    p.add_argument("--matrix-b")
    p.add_argument("--numeric", action="store_true", help="also run the direct minimization checks")

    p = add("wigner", cmd_wigner, "Wigner inequality and its equality form",
            "1/2 sin^2(t12/2) + 1/2 sin^2(t23/2) >= 1/2 sin^2(t13/2) (spin; photon uses full angles),\n"
            "and sin^2 t12 + sin^2 t23 - sin^2 t13 = 2 cos t13 (cos t13 - cos t12 cos t23).")
    p.add_argument("--theta12")
    p.add_argument("--theta23")
    p.add_argument("--theta13")
    p.add_argument("--config", help="JSON file with theta_12, theta_23, theta_13 (radians), convention")
    p.add_argument("--convention", choices=("spin", "photon"))

    p = add("chsh", cmd_chsh, "CHSH value and inequality-equality",
            "|a.b + a.c + d.b - d.c| = 2|cos(t/2) cos(a,b+c) + sin(t/2) cos(d,b-c)|, t = angle(b,c).\n"
            "--family: |3 cos phi - cos 3 phi|.  --bound: sqrt(2+2cos phi) + sqrt(2-2cos phi).")
    for k in "abcd":
        p.add_argument(f"--{k}")
    p.add_argument("--config", help="JSON file with keys a, b, c, d")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--family", action="store_true")
    p.add_argument("--bound", action="store_true")
    p.add_argument("--phi")

    p = add("lhv", cmd_lhv, "local hidden-variable models",
            "Wigner domains: P12 + P23 >= P13 on preset outcomes.\n"
            "CHSH assignments: |v_a (w_b + w_c) + v_d (w_b - w_c)| = 2 and E(x,y) = (1/N) sum v(x) w(y).")
    p.add_argument("--check-vertices", action="store_true")
    p.add_argument("--enumerate", action="store_true")
    p.add_argument("--anticorrelated", action="store_true", help="restrict --enumerate to particle2 = -particle1")
    p.add_argument("--distribution", help="JSON array of 64 domain weights")
    p.add_argument("--assignments", nargs="+", metavar="SIGNS", help="sign strings v_a v_d w_b w_c, e.g. ++-+")

    p = add("sample", cmd_sample, "singlet Monte Carlo sampler",
            "P(++) = P(--) = 1/2 sin^2(theta/2), P(+-) = P(-+) = 1/2 cos^2(theta/2);\n"
            "estimates E = -cos(theta).")
    p.add_argument("--theta", required=True)
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--workers", type=int, default=1)

    p = add("sweep", cmd_sweep, "violation-region sweeps",
            "Grids over Wigner coplanar angles or planar CHSH directions, classified as\n"
            "classical (<= 2), quantum_violation (2, 2 sqrt 2] or impossible.  Writes CSV/JSON.")
    p.add_argument("--family", required=True, choices=[f.value for f in atlas.Family])
    p.add_argument("--range", action="append", metavar="LO:HI:STEP")
    p.add_argument("--convention", choices=("spin", "photon"))

    p = add("maximize", cmd_maximize, "maximize the CHSH value",
            "Multi-start Nelder-Mead over four unit vectors; the maximum is 2 sqrt 2 with angle(b,c) = pi/2.")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--starts", type=int, default=24)

    add("boundary", cmd_boundary, "trace the planar family boundary",
        "Angles phi in [0, pi] where |3 cos phi - cos 3 phi| = 2.")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if ns.seed is None:
        env = os.environ.get(ENV_SEED)
        try:
            ns.seed = int(env, 0) if env else 0
        except ValueError:
            print(f"belltrig: error: ${ENV_SEED}={env!r} is not an integer", file=sys.stderr)
            return 2
    fmt = ns.format or "text"
    try:
        with override_tolerances(**dict(ns.tol)):
            result = ns.func(_Args(ns))
            if result is None:
                return 0
            text = render(result, fmt)
            if ns.out is not None:
                Path(ns.out).write_text(text, encoding="utf-8")
            else:
                sys.stdout.write(text)
    except _UsageError as exc:
        print(f"belltrig {ns.command}: error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError, OSError) as exc:
        print(f"belltrig {ns.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
