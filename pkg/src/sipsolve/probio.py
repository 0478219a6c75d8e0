"""Problem-file parsing, rendering, random instance generation, reports.

The problem file is a human-writable sectioned text format.  A SIPP file
has ``[problem]``, ``[X]``, ``[U]`` and optional ``[options]`` sections; a
matrix-inequality file replaces ``[problem]``/``[U]`` with ``[pmi]``.
Polynomials are written in the same grammar the parser accepts, e.g.
``1/3 x1^2 + 1/2 x1 + x2^2 - x2``.  Constraint lines may repeat
(``ineq = ...`` / ``eq = ...``); unknown keys are rejected with the
offending line number.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from .exchange import ExchangeOptions, ExchangeReport, SippProblem, exchange_loop
from .homogenize import homogenize_problem
from .moment import SolveOptions
from .pmi import PolynomialMatrix, pmi_to_sipp
from .poly import (Polynomial, PolynomialError, SemialgebraicSet,
                   VariableSpace, monomial_exponents, parse_polynomial,
                   poly_to_string)

REPORT_SCHEMA = "sipsolve-report-v1"

EXIT_CERTIFIED = 0
EXIT_INFEASIBLE = 1
EXIT_ITERATION_CAP = 2
EXIT_STAGNATION = 3
EXIT_NUMERICAL = 4

_EXIT_CODES = {
    "certified": EXIT_CERTIFIED,
    "master_infeasible": EXIT_INFEASIBLE,
    "iteration_cap": EXIT_ITERATION_CAP,
    "inner_unattained_suspected": EXIT_STAGNATION,
}


class ProblemFileError(ValueError):
    """Raised on malformed problem files, with a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def _split_sections(text):
    """Return {section: [(lineno, key, value), ...]} preserving order."""
    sections: dict[str, list[tuple[int, str, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current in sections:
                raise ProblemFileError(f"duplicate section [{current}]", lineno)
            sections[current] = []
            continue
        if current is None:
            raise ProblemFileError("content before any [section] header", lineno)
        if "=" not in line:
            raise ProblemFileError(f"expected 'key = value', got {line!r}", lineno)
        key, _, value = line.partition("=")
        sections[current].append((lineno, key.strip().lower(), value.strip()))
    return sections


def _scalar_items(entries, section, repeatable=()):
    """Collapse entries to a dict; only keys in `repeatable` may recur."""
    out: dict[str, object] = {}
    for lineno, key, value in entries:
        if key in repeatable:
            out.setdefault(key, []).append((lineno, value))
        elif key in out:
            raise ProblemFileError(f"duplicate key {key!r} in [{section}]", lineno)
        else:
            out[key] = (lineno, value)
    return out


def _parse_space(value, lineno):
    parts = value.split()
    if len(parts) not in (2, 3):
        raise ProblemFileError(
            "variable space must be '<name> <dimension> [<first index>]', "
            f"got {value!r}", lineno)
    name = parts[0]
    try:
        dim = int(parts[1])
        first = int(parts[2]) if len(parts) == 3 else 1
    except ValueError:
        raise ProblemFileError(f"bad space declaration {value!r}",
                               lineno) from None
    if dim < 1:
        raise ProblemFileError("dimension must be positive", lineno)
    return VariableSpace(name, dim, first_index=first)


def _parse_poly(value, spaces, lineno):
    try:
        return parse_polynomial(value, spaces)
    except PolynomialError as exc:
        raise ProblemFileError(str(exc), lineno) from None


def _parse_set(entries, space, section):
    items = _scalar_items(entries, section, repeatable=("eq", "ineq"))
    for key in items:
        if key not in ("eq", "ineq"):
            lineno = items[key][0] if isinstance(items[key], tuple) else None
            raise ProblemFileError(f"unknown key {key!r} in [{section}]", lineno)
    eqs = [_parse_poly(v, [space], ln) for ln, v in items.get("eq", [])]
    ineqs = [_parse_poly(v, [space], ln) for ln, v in items.get("ineq", [])]
    return SemialgebraicSet(space, equalities=eqs, inequalities=ineqs)


_BOOL = {"true": True, "false": False, "yes": True, "no": False,
         "1": True, "0": False}

_OPTION_PARSERS = {
    "eps": float,
    "k_max": int,
    "master_order_cap": int,
    "inner_order_cap": int,
    "seed": int,
    "sample_box": float,
    "phi_cap": int,
}


def _parse_options(entries):
    opts = ExchangeOptions()
    flags = {}
    items = _scalar_items(entries, "options")
    for key, (lineno, value) in items.items():
        if key in _OPTION_PARSERS:
            try:
                setattr(opts, key, _OPTION_PARSERS[key](value))
            except ValueError:
                raise ProblemFileError(
                    f"bad value {value!r} for option {key!r}", lineno) from None
        elif key == "u0":
            try:
                opts.u0 = np.array([float(t) for t in value.split()])
            except ValueError:
                raise ProblemFileError(f"bad u0 {value!r}", lineno) from None
        elif key in ("u_compact", "closed_at_infinity", "homogenize",
                     "homogenized"):
            if value.lower() not in _BOOL:
                raise ProblemFileError(
                    f"bad boolean {value!r} for {key!r}", lineno)
            flags[key] = _BOOL[value.lower()]
        else:
            raise ProblemFileError(f"unknown option {key!r}", lineno)
    return opts, flags


def parse_problem(text):
    """Parse a SIPP problem file.

    Returns
    -------
    (problem, options, homogenize_flag)
    """
    sections = _split_sections(text)
    if "pmi" in sections:
        return _parse_pmi_sections(sections)
    for sec in sections:
        if sec not in ("problem", "x", "u", "options"):
            raise ProblemFileError(f"unknown section [{sec}]")
    if "problem" not in sections:
        raise ProblemFileError("missing [problem] section")
    items = _scalar_items(sections["problem"], "problem")
    for key in items:
        if key not in ("name", "x", "u", "f", "g"):
            raise ProblemFileError(f"unknown key {key!r} in [problem]",
                                   items[key][0])
    for key in ("x", "u", "f", "g"):
        if key not in items:
            raise ProblemFileError(f"missing key {key!r} in [problem]")
    x_space = _parse_space(*reversed(items["x"]))
    u_space = _parse_space(*reversed(items["u"]))
    if x_space.name == u_space.name:
        raise ProblemFileError("decision and index spaces share a name")
    f = _parse_poly(items["f"][1], [x_space], items["f"][0])
    g = _parse_poly(items["g"][1], [x_space, u_space], items["g"][0])
    name = items["name"][1] if "name" in items else ""
    X = _parse_set(sections.get("x", []), x_space, "X")
    U = _parse_set(sections.get("u", []), u_space, "U")
    opts, flags = _parse_options(sections.get("options", []))
    problem = SippProblem(
        name=name, f=f, g=g, x_space=x_space, X=X, u_space=u_space, U=U,
        u_compact=flags.get("u_compact", True),
        closed_at_infinity=flags.get("closed_at_infinity", True),
        homogenized=flags.get("homogenized", False))
    return problem, opts, flags.get("homogenize", False)


def parse_pmi(text):
    """Parse a matrix-inequality file.

    Returns
    -------
    (f, G, X, options, homogenize_flag)
    """
    sections = _split_sections(text)
    if "pmi" not in sections:
        raise ProblemFileError("missing [pmi] section")
    f, G, X, opts, flags, _ = _parse_pmi_parts(sections)
    return f, G, X, opts, flags.get("homogenize", False)


def _parse_pmi_sections(sections):
    f, G, X, opts, flags, name = _parse_pmi_parts(sections)
    problem = pmi_to_sipp(f, G, X, name=name)
    return problem, opts, flags.get("homogenize", False)


def _parse_pmi_parts(sections):
    for sec in sections:
        if sec not in ("pmi", "x", "options"):
            raise ProblemFileError(f"unknown section [{sec}] in a matrix-"
                                   "inequality file")
    entries = sections["pmi"]
    items = _scalar_items(entries, "pmi",
                          repeatable=tuple(k for _, k, _ in entries
                                           if k.startswith("g(")))
    scalar = {k: v for k, v in items.items() if not k.startswith("g(")}
    for key in scalar:
        if key not in ("name", "x", "f", "size"):
            raise ProblemFileError(f"unknown key {key!r} in [pmi]",
                                   scalar[key][0])
    for key in ("x", "f", "size"):
        if key not in scalar:
            raise ProblemFileError(f"missing key {key!r} in [pmi]")
    x_space = _parse_space(*reversed(scalar["x"]))
    f = _parse_poly(scalar["f"][1], [x_space], scalar["f"][0])
    try:
        size = int(scalar["size"][1])
    except ValueError:
        raise ProblemFileError(f"bad size {scalar['size'][1]!r}",
                               scalar["size"][0]) from None
    mat_entries = {}
    for key, vals in items.items():
        if not key.startswith("g("):
            continue
        for lineno, value in vals:
            inner = key[2:].rstrip(")")
            parts = inner.split(",")
            try:
                i, j = int(parts[0]), int(parts[1])
            except (ValueError, IndexError):
                raise ProblemFileError(f"bad matrix index {key!r}",
                                       lineno) from None
            if not (1 <= i <= size and 1 <= j <= size):
                raise ProblemFileError(
                    f"matrix index {key!r} outside 1..{size}", lineno)
            if (i - 1, j - 1) in mat_entries:
                raise ProblemFileError(f"duplicate entry {key!r}", lineno)
            mat_entries[(i - 1, j - 1)] = _parse_poly(value, [x_space], lineno)
    G = PolynomialMatrix(size, mat_entries)
    X = _parse_set(sections.get("x", []), x_space, "X")
    opts, flags = _parse_options(sections.get("options", []))
    name = scalar["name"][1] if "name" in scalar else ""
    return f, G, X, opts, flags, name


def render_problem(problem, options=None):
    """Render a SIPP problem (and options) back to file text.

    ``parse_problem(render_problem(p, o))`` reproduces the problem
    coefficient-exactly.
    """
    lines = ["[problem]"]
    if problem.name:
        lines.append(f"name = {problem.name}")
    for key, space in (("x", problem.x_space), ("u", problem.u_space)):
        decl = f"{key} = {space.name} {space.dim}"
        if space.first_index != 1:
            decl += f" {space.first_index}"
        lines.append(decl)
    lines.append(f"f = {poly_to_string(problem.f)}")
    lines.append(f"g = {poly_to_string(problem.g)}")
    for header, S in (("X", problem.X), ("U", problem.U)):
        lines.append(f"[{header}]")
        for h in S.equalities:
            lines.append(f"eq = {poly_to_string(h)}")
        for q in S.inequalities:
            lines.append(f"ineq = {poly_to_string(q)}")
    lines.append("[options]")
    opts = options or ExchangeOptions()
    defaults = ExchangeOptions()
    for key in _OPTION_PARSERS:
        val = getattr(opts, key)
        if val != getattr(defaults, key):
            lines.append(f"{key} = {val!r}")
    if opts.u0 is not None:
        lines.append("u0 = " + " ".join(repr(float(v)) for v in opts.u0))
    if not problem.u_compact:
        lines.append("u_compact = false")
    if not problem.closed_at_infinity:
        lines.append("closed_at_infinity = false")
    if problem.homogenized:
        lines.append("homogenized = true")
    return "\n".join(lines) + "\n"


@dataclass
class RandomInstanceSpec:
    """Shape of a random coupled instance: decision dim, index dim, degrees."""

    n: int
    p: int
    d1: int
    d2: int
    uset: str = "ball"  # ball | box | simplex
    seed: int = 0

    def __post_init__(self):
        if self.uset not in ("ball", "box", "simplex"):
            raise ValueError(f"uset must be ball, box or simplex, "
                             f"got {self.uset!r}")


def _monomial_vector(space, exps, spaces):
    out = []
    for e in exps:
        full = {space.name: e}
        term = {}
        key = []
        for s in spaces:
            key.extend(full.get(s.name, (0,) * s.dim))
        term[tuple(key)] = 1.0
        out.append(Polynomial(spaces, term))
    return out


def _coupling_poly(tau, M, z, spaces):
    g = Polynomial.constant(tau, spaces)
    for i in range(len(z)):
        for j in range(len(z)):
            if M[i, j] != 0.0:
                g = g - z[i] * (M[i, j] * z[j])
    return g


def generate_random_instance(spec, return_parts=False):
    """Draw a random SIPP instance with a concave coupling constraint.

    The objective is a Gaussian combination of all decision monomials up to
    degree ``2 d1``.  The coupling constraint is ``tau - z^T M z`` with
    ``z`` the stacked decision/index monomials up to degree ``d2``,
    ``M = A^T A / dim(z)`` positive semidefinite and ``tau`` uniform in
    [1, 10], redrawn until the origin is strictly feasible (checked at the
    origin and at sampled index points).  The decision set is the unit
    ball; the index set is a ball, box or simplex.
    """
    rng = np.random.default_rng(spec.seed)
    x = VariableSpace("x", spec.n)
    u = VariableSpace("u", spec.p)
    spaces = (x, u)
    f_exps = monomial_exponents(spec.n, 2 * spec.d1)
    eta = rng.standard_normal(len(f_exps))
    f = Polynomial((x,), {e: c for e, c in zip(f_exps, eta) if c != 0.0})
    zx = _monomial_vector(x, monomial_exponents(spec.n, spec.d2), spaces)
    zu = _monomial_vector(u, [e for e in monomial_exponents(spec.p, spec.d2)
                              if sum(e) > 0], spaces)
    z = zx + zu  # zx[0] is the constant monomial; keep it once
    # sampled index points used to reject instances whose semi-infinite
    # constraint already fails at the origin (an unscaled Wishart M has
    # spectral norm ~4*len(z), which would leave almost every draw with an
    # empty feasible set)
    u_check = rng.uniform(-1.0, 1.0, size=(200, spec.p))
    if spec.uset == "ball":
        u_check /= np.maximum(1.0, np.linalg.norm(u_check, axis=1))[:, None]
    elif spec.uset == "simplex":
        u_check = np.abs(u_check)
        u_check /= np.maximum(1.0, u_check.sum(axis=1))[:, None]
    while True:
        A = rng.standard_normal((len(z), len(z)))
        M = (A.T @ A) / len(z)
        tau = rng.uniform(1.0, 10.0)
        if tau - M[0, 0] <= 0:
            continue
        g0 = _coupling_poly(tau, M, z, spaces)
        if all(g0({"x": np.zeros(spec.n), "u": uc}) > 0 for uc in u_check):
            break
    g = g0
    ball = lambda space: (Polynomial.constant(1.0, (space,))
                          - sum((Polynomial.variable(space, i, (space,)) ** 2
                                 for i in range(space.dim)),
                                Polynomial.zero((space,))))
    X = SemialgebraicSet(x, inequalities=[ball(x)])
    if spec.uset == "ball":
        U = SemialgebraicSet(u, inequalities=[ball(u)])
    elif spec.uset == "box":
        U = SemialgebraicSet(u, inequalities=[
            Polynomial.constant(1.0, (u,))
            - Polynomial.variable(u, i, (u,)) ** 2 for i in range(spec.p)])
    else:
        vars_u = [Polynomial.variable(u, i, (u,)) for i in range(spec.p)]
        U = SemialgebraicSet(u, inequalities=vars_u + [
            Polynomial.constant(1.0, (u,))
            - sum(vars_u, Polynomial.zero((u,)))])
    name = (f"rand-n{spec.n}-p{spec.p}-d{spec.d1}{spec.d2}-"
            f"{spec.uset}-s{spec.seed}")
    problem = SippProblem(name=name, f=f, g=g, x_space=x, X=X, u_space=u, U=U)
    if return_parts:
        return problem, tau, M, z
    return problem


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [float(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def report_to_dict(report):
    """Serialize an exchange report to the versioned JSON schema."""
    trace = []
    for rec in report.trace:
        d = dataclasses.asdict(rec)
        trace.append(_jsonable(d))
    return {
        "schema": REPORT_SCHEMA,
        "problem": report.problem.name,
        "status": report.status,
        "exit_code": _EXIT_CODES.get(report.status, EXIT_NUMERICAL),
        "f_star": _jsonable(report.f_star),
        "minimizers": _jsonable(report.minimizers),
        "obj2": _jsonable(report.obj2),
        "iterations": report.iterations,
        "index_points": _jsonable(report.index_points),
        "wall_time": report.wall_time,
        "detail": report.detail,
        "trace": trace,
    }


def format_report(report):
    """Human-readable one-problem result table."""
    lines = [f"problem      : {report.problem.name or '(unnamed)'}",
             f"status       : {report.status}"]
    if report.f_star is not None:
        lines.append(f"f*           : {report.f_star:.6f}")
    for m in report.minimizers:
        lines.append("minimizer    : (" + ", ".join(f"{v:.4f}" for v in m) + ")")
    if report.obj2 is not None:
        lines.append(f"Obj_2        : {report.obj2:.4e}")
    lines.append(f"iterations   : {report.iterations}")
    lines.append(f"index points : {len(report.index_points)}")
    lines.append(f"wall time    : {report.wall_time:.1f}s")
    if report.detail:
        lines.append(f"detail       : {report.detail}")
    return "\n".join(lines)


def run_pipeline(problem, options=None, homogenize=False, report_path=None,
                 sdpa_dir=None, backend=None):
    """Solve a problem end to end and optionally persist artifacts.

    Returns
    -------
    (report, exit_code)
    """
    opts = options or ExchangeOptions()
    if homogenize and not problem.homogenized:
        name = problem.name
        problem = homogenize_problem(problem)
        problem.name = name
    try:
        report = exchange_loop(problem, opts, backend=backend)
        code = _EXIT_CODES.get(report.status, EXIT_NUMERICAL)
    except Exception as exc:  # numerical failure inside a solve
        report = ExchangeReport(status="numerical_error", problem=problem,
                                detail=str(exc))
        code = EXIT_NUMERICAL
    if sdpa_dir is not None:
        _export_master_sdpa(problem, report, sdpa_dir)
    if report_path is not None:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report_to_dict(report), fh, indent=2)
            fh.write("\n")
    return report, code


def _export_master_sdpa(problem, report, sdpa_dir):
    """Write the final master relaxation of a run in SDPA sparse format."""
    import os

    from .moment import RelaxationProblem, build_moment_sdp
    from .sdpa import export_sdpa

    os.makedirs(sdpa_dir, exist_ok=True)
    cons = SemialgebraicSet(
        problem.x_space,
        equalities=list(problem.X.equalities),
        inequalities=list(problem.X.inequalities)
        + [problem.coupling_at(np.asarray(q)) for q in report.index_points])
    k = max(1, problem.f.half_degree(),
            *[p.half_degree() for p in cons.members()] or [1])
    prog = build_moment_sdp(RelaxationProblem(problem.f, cons, k))
    path = os.path.join(sdpa_dir, f"{problem.name or 'problem'}-master.dat-s")
    export_sdpa(prog, path, comment=f"final master relaxation, order {k}")
    return path
