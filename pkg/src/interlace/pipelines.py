"""Command pipelines: pure functions from a RunConfig to a report payload.

The CLI and the registry suite both run through these, so a registry entry
and the equivalent command line produce identical artifacts.  No payload
field depends on wall-clock or environment; the only per-run value is the
``generated_at`` stamp added at write time.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from . import dichotomy as _dichotomy
from . import report as _report
from . import sat as _sat
from . import series as _series
from .config import RunConfig
from .curve import iterated_tangents, parse_curve
from .expr import Num, Pow, Var, BinOp, Neg, parse_expr, to_text
from .field import ReducedSystem, VectorField3, invariance_check
from .integrate import IVP, solve, solve_pair
from .registry import ENTRIES, RegistryEntry, get as get_entry
from .series import EXACT, Poly, float_mode, q_short_check


def resolve(config: RunConfig, explicit=None) -> tuple[RunConfig, RegistryEntry | None]:
    """Overlay user settings on the referenced example, if any.

    ``explicit`` is the set of key/value pairs the user actually supplied
    (flags plus config file); when omitted, any value differing from the
    dataclass default is treated as explicit.
    """
    if config.example is None:
        return config, None
    entry = get_entry(config.example)
    if explicit is None:
        explicit = {
            k: v
            for k, v in vars(config).items()
            if v is not None and v != getattr(RunConfig(), k)
        }
    merged = entry.config.merged(
        **{k: v for k, v in explicit.items() if k not in ("example", "command")}
    )
    return merged, entry


def _coefficient_mode(config):
    return EXACT if config.mode == "exact" else float_mode(config.precision)


def _build_curve(config, entry, order):
    mode = _coefficient_mode(config)
    if config.curve is not None:
        branch = +1 if config.branch != "-" else -1
        return parse_curve(config.curve, order, mode, branch)
    if entry is not None and entry.curve_builder is not None:
        if config.mode != "float":
            raise ValueError(
                f"the {entry.name!r} curve has irrational coefficients and "
                "exists only in float mode"
            )
        return entry.curve_builder(order, config.precision)
    raise ValueError("no curve given: pass --curve or pick an example that has one")


def _log_flag(config):
    return {"auto": None, "on": True, "off": False}[config.log_substitution]


# -- invariance ----------------------------------------------------------


def run_invariance(config, entry=None):
    if config.field_components is None:
        raise ValueError("no field given: pass --field fx fy fz or --example")
    v = VectorField3.from_text(
        config.example or "inline", *config.field_components
    )
    order = config.order if config.order is not None else 30
    curve = _build_curve(config, entry, order + 1)
    rep = invariance_check(v, curve, order)
    payload = {
        "command": "invariance",
        "example": config.example,
        "field": list(v.component_texts()),
        "order": order,
        "mode": config.mode,
        "invariant": rep.invariant,
        "checked_order": rep.checked_order,
        "pivot_index": rep.pivot_index,
        "multiplier": None if rep.multiplier is None else rep.multiplier.to_json_dict(),
        "residual_max": rep.max_residual,
        "residual_scale": rep.scale,
        "residual_valuation": (
            None if rep.residual_val() == _series.INF else rep.residual_val()
        ),
    }
    if config.mode == "float":
        payload["precision"] = config.precision
        payload["tolerance"] = rep.tolerance
    return payload, (0 if rep.invariant else 1)


# -- pair classification ---------------------------------------------------


def _pair_system(config):
    if config.f1 is None or config.f2 is None:
        raise ValueError("pair runs need f1 and f2 (inline or from an example)")
    return ReducedSystem.from_text(config.f1, config.f2,
                                   provenance=config.example or "direct")


def run_pair(config, entry=None, outdir=None):
    system = _pair_system(config)
    if config.x_start is None or config.x_end is None or config.y0 is None:
        raise ValueError("pair runs need x_start, x_end and y0")
    eps0 = config.eps0 if config.eps0 is not None else (0.0, 0.0)
    ivp = IVP(
        system,
        config.x_start,
        config.x_end,
        tuple(config.y0),
        rtol=config.rtol,
        atol=config.atol,
        max_steps=config.max_steps,
        log_substitution=_log_flag(config),
    )
    gamma, eps = solve_pair(ivp, tuple(eps0))
    probes = config.probes or (config.x_start / 2, config.x_end * 2, config.x_end)
    census_exprs = config.census or ("z1", "z2")
    thresholds = _dichotomy.Thresholds(
        turn_threshold=config.turn_threshold,
        hardy_turn_bound=config.hardy_turn_bound,
        flat_bound=config.flat_bound,
        final_decade=config.final_decade,
    )
    pair_report = _dichotomy.build_pair_report(
        gamma, eps, probes, census_exprs, thresholds
    )
    payload = {
        "command": "classify-pair",
        "example": config.example,
        "system": {"f1": to_text(system.f1), "f2": to_text(system.f2)},
        "x_start": config.x_start,
        "x_end": config.x_end,
        "y0": list(config.y0),
        "eps0": list(eps0),
        "integrator": {
            "rtol": config.rtol,
            "atol": config.atol,
            "n_steps": gamma.meta.get("n_steps"),
            "log_substitution": gamma.meta.get("log_substitution"),
        },
        "report": pair_report.to_json_dict(),
    }
    artifacts = {}
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "trajectory.csv", "w") as fh:
            _write_pair_csv(fh, gamma, eps)
        artifacts["trajectory_csv"] = "trajectory.csv"
        if pair_report.winding is not None:
            _report.theta_plot(pair_report.winding, outdir / "theta.svg")
            artifacts["theta_svg"] = "theta.svg"
        _report.contact_plot(eps, pair_report.contact, outdir / "contact.svg")
        artifacts["contact_svg"] = "contact.svg"
    payload["artifacts"] = artifacts
    return payload, 0


def _write_pair_csv(fh, gamma, eps):
    fh.write("x,y1,y2,z1,z2\n")
    for i in range(len(gamma.xs)):
        row = [gamma.xs[i], *gamma.ys[i], *eps.ys[i]]
        fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


# -- plain integration ------------------------------------------------------


def run_integrate(config, entry=None, outdir=None):
    system = _pair_system(config)
    if config.x_start is None or config.x_end is None or config.y0 is None:
        raise ValueError("integrate runs need x_start, x_end and y0")
    ivp = IVP(
        system,
        config.x_start,
        config.x_end,
        tuple(config.y0),
        rtol=config.rtol,
        atol=config.atol,
        max_steps=config.max_steps,
        log_substitution=_log_flag(config),
    )
    traj = solve(ivp)
    payload = {
        "command": "integrate",
        "example": config.example,
        "system": {"f1": to_text(system.f1), "f2": to_text(system.f2)},
        "x_start": config.x_start,
        "x_end": config.x_end,
        "y0": list(config.y0),
        "final": {"x": float(traj.xs[-1]), "y": [float(v) for v in traj.ys[-1]]},
        "integrator": {
            "rtol": config.rtol,
            "atol": config.atol,
            "n_steps": traj.meta.get("n_steps"),
            "log_substitution": traj.meta.get("log_substitution"),
        },
    }
    artifacts = {}
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "trajectory.csv", "w") as fh:
            traj.write_csv(fh)
        artifacts["trajectory_csv"] = "trajectory.csv"
    payload["artifacts"] = artifacts
    return payload, 0


# -- tangents ----------------------------------------------------------------


def run_tangents(config, entry=None):
    steps = config.steps if config.steps is not None else 3
    order = config.order if config.order is not None else steps + 2
    curve = _build_curve(config, entry, order)
    trail = iterated_tangents(curve, steps)
    payload = {
        "command": "tangents",
        "example": config.example,
        "steps": steps,
        "order": order,
        "branch": config.branch,
        "directions": [
            [_frac_str(a) for a in step.direction] for step in trail
        ],
        "unit_directions": [list(step.unit_direction()) for step in trail],
        "chart_indices": [step.chart_index for step in trail],
    }
    return payload, 0


def _frac_str(a):
    if isinstance(a, Fraction):
        return f"{a.numerator}/{a.denominator}"
    return repr(float(a))


# -- q-short ------------------------------------------------------------------


def expr_to_poly(text, var=None) -> Poly:
    """Interpret an expression as a univariate rational polynomial."""
    tree = parse_expr(text, ("x", "t"))
    names = sorted({n for n in _vars_of(tree)})
    if len(names) > 1:
        raise ValueError(f"polynomial must use one variable, found {names}")
    name = var or (names[0] if names else "x")
    coeffs = _poly_coeffs(tree)
    return Poly.from_coeffs(coeffs, name)


def _vars_of(tree):
    from .expr import variables_of

    return variables_of(tree)


def _poly_coeffs(tree):
    if isinstance(tree, Num):
        return [tree.value]
    if isinstance(tree, Var):
        return [Fraction(0), Fraction(1)]
    if isinstance(tree, Neg):
        return [-c for c in _poly_coeffs(tree.arg)]
    if isinstance(tree, BinOp):
        a, b = _poly_coeffs(tree.lhs), _poly_coeffs(tree.rhs)
        if tree.op == "+":
            return _poly_add(a, b)
        if tree.op == "-":
            return _poly_add(a, [-c for c in b])
        if tree.op == "*":
            return _poly_mul(a, b)
        if len(b) == 1 and b[0] != 0:
            return [c / b[0] for c in a]
        raise ValueError("polynomial division is only allowed by constants")
    if isinstance(tree, Pow):
        if tree.exponent < 0:
            raise ValueError("negative powers are not polynomial")
        out = [Fraction(1)]
        base = _poly_coeffs(tree.base)
        for _ in range(tree.exponent):
            out = _poly_mul(out, base)
        return out
    raise ValueError(f"not polynomial material: {to_text(tree)!r}")


def _poly_add(a, b):
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return [x + y for x, y in zip(a, b)]


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def run_qshort(config, entry=None):
    if not config.poly:
        raise ValueError("qshort needs --poly")
    results = []
    all_good = True
    for text in (p.strip() for p in config.poly.split(";") if p.strip()):
        p = expr_to_poly(text)
        rep = q_short_check(p, config.q)
        results.append(
            {
                "poly": text,
                "q": rep.q,
                "is_short": rep.is_short,
                "is_positive": rep.is_positive,
                "val": rep.val,
                "deg": rep.deg,
            }
        )
        all_good = all_good and rep.is_short and rep.is_positive
    payload = {"command": "qshort", "example": config.example, "results": results}
    return payload, (0 if all_good else 1)


# -- relation search -----------------------------------------------------------


def run_relations(config, entry=None):
    if config.degree is None:
        raise ValueError("relations needs --deg")
    if config.curve is None and (entry is None or entry.curve_builder is None):
        raise ValueError("relations needs --curve")
    if config.mode != "exact":
        raise ValueError("relation search runs in exact mode only")
    n_components = len(_components_of_curve_text(config.curve)) if config.curve else 3
    monomials = _sat.monomial_exponents(n_components, config.degree)
    jet = config.jet if config.jet is not None else 2 * len(monomials)
    order = config.order if config.order is not None else jet
    curve = _build_curve(config, entry, max(order, jet))
    basis = _sat.relation_search(curve, config.degree, jet)
    names = ["x"] + [f"z{i}" for i in range(1, len(curve.components))]
    payload = {
        "command": "relations",
        "example": config.example,
        "curve": config.curve,
        **basis.to_json_dict(names),
    }
    return payload, (0 if basis.is_trivial else 1)


def _components_of_curve_text(text):
    from .curve import _split_components

    return _split_components(text)


# -- registry suite --------------------------------------------------------------


def run_entry(entry: RegistryEntry, outdir=None):
    """Run one registry entry and verify its expected facts."""
    config = entry.config
    entry_dir = None if outdir is None else Path(outdir) / entry.name
    if entry.kind == "invariance":
        payload, _ = run_invariance(config, entry)
    elif entry.kind == "pair":
        payload, _ = run_pair(config, entry, outdir=entry_dir)
    elif entry.kind == "integrate":
        payload, _ = run_integrate(config, entry, outdir=entry_dir)
    elif entry.kind == "qshort":
        payload, _ = run_qshort(config, entry)
    elif entry.kind == "relations":
        payload, _ = run_relations(config, entry)
    elif entry.kind == "tangents":
        payload, _ = run_tangents(config, entry)
    else:
        raise ValueError(f"unknown entry kind {entry.kind!r}")

    checks = [_check_fact(entry, fact, payload) for fact in entry.expected]
    payload["description"] = entry.description
    payload["facts"] = checks
    payload["facts_ok"] = all(c["ok"] for c in checks)
    if entry_dir is not None:
        _report.write_json(Path(entry_dir) / "report.json", payload)
    return payload


def run_suite(outdir):
    """Run every registry entry into its own subdirectory; returns the summary."""
    outdir = Path(outdir)
    results = []
    for name in sorted(ENTRIES):
        payload = run_entry(ENTRIES[name], outdir)
        results.append(
            {
                "name": name,
                "kind": ENTRIES[name].kind,
                "facts_ok": payload["facts_ok"],
                "n_facts": len(ENTRIES[name].expected),
            }
        )
    summary = {
        "command": "suite",
        "entries": results,
        "all_ok": all(r["facts_ok"] for r in results),
    }
    _report.write_json(outdir / "summary.json", summary)
    return summary


def _close(actual, expected, rel_tol):
    if rel_tol is None:
        return actual == expected
    if expected == 0:
        return abs(actual) <= rel_tol
    return abs(actual - expected) <= rel_tol * abs(expected)


def _check_fact(entry, fact, payload):
    actual = _extract_fact(entry, fact, payload)
    if isinstance(fact.value, dict) and fact.key == "multiplier":
        ok = _multiplier_matches(fact, payload)
        actual = payload.get("multiplier")
    elif isinstance(fact.value, float):
        ok = actual is not None and _close(float(actual), fact.value, fact.rel_tol)
    else:
        ok = actual == fact.value
    return {
        "key": fact.key,
        "expected": fact.value,
        "actual": actual,
        "provenance": fact.provenance,
        "ok": bool(ok),
    }


def _extract_fact(entry, fact, payload):
    key = fact.key
    if entry.kind == "invariance":
        if key == "invariant":
            return payload["invariant"]
        if key == "multiplier":
            return payload.get("multiplier")
    if entry.kind == "pair":
        rep = payload["report"]
        if key == "verdict":
            return rep["verdict"]
        if key in ("total_angle", "total_turns"):
            w = rep.get("winding")
            return None if w is None else w[key]
        if key.startswith("eps_norm@") or key.startswith("k_hat@"):
            want_x = float(key.split("@", 1)[1])
            for probe in rep["contact"]["probes"]:
                if abs(probe["x"] - want_x) <= 1e-12:
                    return probe["norm"] if key.startswith("eps_norm") else probe["k_hat"]
            return None
        if key.endswith("_sign_changes"):
            expr_name = key[: -len("_sign_changes")]
            for c in rep["census"]:
                if c["expr"] == expr_name:
                    return c["sign_changes"]
            return None
    if entry.kind == "integrate":
        if key == "y1_end":
            return payload["final"]["y"][0]
        if key == "y2_end":
            return payload["final"]["y"][1]
    if entry.kind == "qshort":
        for r in payload["results"]:
            if r["poly"].replace(" ", "") == key.replace(" ", ""):
                return {"is_short": r["is_short"], "is_positive": r["is_positive"]}
        return None
    if entry.kind == "relations":
        if key == "contains_second_component_minus_square":
            return _has_parabola_relation(payload)
        return payload.get(key)
    if entry.kind == "tangents":
        if key == "directions":
            return [
                [_fraction_from_str(a) for a in d] for d in payload["directions"]
            ]
        return payload.get(key)
    return payload.get(key)


def _fraction_from_str(text):
    f = Fraction(text)
    return int(f) if f.denominator == 1 else f


def _has_parabola_relation(payload):
    for rel in payload.get("relations_raw", []):
        terms = {tuple(t["exponents"]): Fraction(t["coeff"]) for t in rel["terms"]}
        if set(terms) == {(0, 1), (2, 0)} and terms[(0, 1)] == -terms[(2, 0)]:
            return True
    return False


def _multiplier_matches(fact, payload):
    mult = payload.get("multiplier")
    if mult is None:
        return False
    mode_exact = mult["mode"] == "rational"
    expected = {int(k): Fraction(v) for k, v in fact.value.items()}
    for i, text in enumerate(mult["coeffs"]):
        want = expected.get(i, Fraction(0))
        if mode_exact:
            if Fraction(text) != want:
                return False
        else:
            tol = fact.rel_tol if fact.rel_tol is not None else 1e-25
            if abs(float(mpf_from_str(text)) - float(want)) > tol * max(
                1.0, abs(float(want))
            ):
                return False
    return True


def mpf_from_str(text):
    import mpmath

    return mpmath.mpf(text)
