"""Command-line front end."""
from __future__ import annotations

import json
import sys

import click

from .config import SUITES, ConfigError, NumericTolerances, SuiteConfig


class UnknownId(click.ClickException):
    pass


def _ints(text: str) -> list[int]:
    text = text.strip()
    return [int(t) for t in text.replace(",", " ").split()] if text else []


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def _emit(payload: dict, fmt: str, text_lines: list[str] | None = None):
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo("\n".join(text_lines if text_lines is not None else _to_text(payload)))


def _to_text(payload, indent: int = 0) -> list[str]:
    pad = " " * indent
    out = []
    if isinstance(payload, dict):
        for key in sorted(payload):
            v = payload[key]
            if isinstance(v, (dict, list)) and v and not _is_flat_row(v):
                out.append(f"{pad}{key}:")
                out.extend(_to_text(v, indent + 2))
            else:
                out.append(f"{pad}{key}: {_flat(v)}")
    elif isinstance(payload, list):
        for v in payload:
            if isinstance(v, (dict, list)) and not _is_flat_row(v):
                out.append(f"{pad}-")
                out.extend(_to_text(v, indent + 2))
            else:
                out.append(f"{pad}{_flat(v)}")
    else:
        out.append(f"{pad}{payload}")
    return out


def _is_flat_row(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _flat(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(map(str, v)) + "]"
    return str(v)


def _matrix_payload(M, basis=None) -> dict:
    d = {"size": M.size, "entries": M.text_rows()}
    if basis is not None:
        d["basis"] = [str(I) for I in basis]
    return d


def _matrix_lines(M, basis=None) -> list[str]:
    rows = M.text_rows()
    lines = []
    if basis is not None:
        lines.append("basis: " + " ".join(str(I) for I in basis))
    lines.extend("[ " + " | ".join(r) + " ]" for r in rows)
    return lines


def _finish(ok: bool):
    sys.exit(0 if ok else 1)


fmt_option = click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text", show_default=True)


class _Group(click.Group):
    """Report domain errors (bad ranges, shapes, algebra failures) as clean CLI errors."""

    def invoke(self, ctx):
        from .algebra import AlgebraError

        try:
            return super().invoke(ctx)
        except (ValueError, ArithmeticError, AlgebraError) as exc:
            raise click.ClickException(f"{type(exc).__name__}: {exc}") from exc


@click.group(cls=_Group)
def main():
    """qKZ, quantum cohomology and K-theory toolkit for Grassmannians."""


# -- weight-space operators -----------------------------------------------------------


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--a", type=int, required=True, help="which qKZ operator K_a")
@fmt_option
def qkz(n, k, a, fmt):
    """Matrix of the qKZ operator K_a on the weight subspace."""
    from .weight_ops import qkz_operator

    op = qkz_operator(n, k, a)
    _emit(_matrix_payload(op.matrix, op.basis), fmt, _matrix_lines(op.matrix, op.basis))


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--i", "i", type=int, required=True, help="1 or 2")
@fmt_option
def dyn(n, k, i, fmt):
    """Matrix of the dynamical operator X_i."""
    from .weight_ops import dynamical_operator

    op = dynamical_operator(n, k, i)
    _emit(_matrix_payload(op.matrix, op.basis), fmt, _matrix_lines(op.matrix, op.basis))


def _identity_report(rep, fmt):
    d = rep.to_json()
    lines = [f"{rep.title}: {'PASS' if rep.passed else 'FAIL'}"]
    lines += [f"  {c['status'].upper():4}  {c['id']}  ({c['anchor']})" for c in d["checks"]]
    _emit(d, fmt, lines)
    _finish(rep.passed)


@main.command("verify-compat")
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--pair", "pairs", multiple=True, help="index pair a,b (repeatable); default all pairs")
@fmt_option
def verify_compat(n, k, pairs, fmt):
    """Flatness and compatibility of the qKZ/dynamical system as exact identities."""
    from .weight_ops import verify_compatibility

    prs = [tuple(_ints(p)) for p in pairs] or None
    _identity_report(verify_compatibility(n, k, prs), fmt)


@main.command("satake-check")
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@fmt_option
def satake_check(n, k, fmt):
    """Exterior powers of P^{n-1} operators against G(k,n) operators."""
    from .weight_ops import verify_satake_gauge

    _identity_report(verify_satake_gauge(n, k), fmt)


# -- cohomology ------------------------------------------------------------------------


@main.command()
@click.option("--k", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--lam", default="", help="partition, e.g. '2,1'")
@click.option("--method", type=click.Choice(["factorial-schur", "kempf-laksov"]), default="factorial-schur")
@click.option("--flag", type=click.Choice(["standard", "opposite"]), default="standard")
@fmt_option
def schubert(k, n, lam, method, flag, fmt):
    """Localizations of an equivariant Schubert class."""
    from .cohomology import kempf_laksov_class, schubert_class
    from .combinatorics import enumerate_index_sets

    parts = _ints(lam)
    fn = schubert_class if method == "factorial-schur" else kempf_laksov_class
    c = fn(parts, k, n, flag)
    locs = {str(I): v.text() for I, v in zip(enumerate_index_sets(k, n), c.locs)}
    _emit({"k": k, "n": n, "lambda": parts, "method": method, "localizations": locs}, fmt,
          [f"{I}: {v}" for I, v in locs.items()])


@main.command("quantum-matrix")
@click.option("--k", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--i", "i", type=int, default=1, show_default=True)
@click.option("--basis", type=click.Choice(["stab", "schubert"]), default="schubert", show_default=True)
@fmt_option
def quantum_matrix(k, n, i, basis, fmt):
    """Matrix of quantum multiplication by c_1(E_i)."""
    from .cohomology import quantum_c1_matrix

    M = quantum_c1_matrix(k, n, i, basis)
    _emit(_matrix_payload(M), fmt, _matrix_lines(M))


@main.command("pairing-table")
@click.option("--k", type=int, required=True)
@click.option("--n", type=int, required=True)
@fmt_option
def pairing_table(k, n, fmt):
    """Poincare pairing between Stab_I and Stab^op_J."""
    from .cohomology import poincare_pairing, stable_envelope_basis

    s, o = stable_envelope_basis(k, n)
    rows = [[poincare_pairing(a, b).text() for b in o] for a in s]
    _emit({"k": k, "n": n, "entries": rows}, fmt, ["[ " + " | ".join(r) + " ]" for r in rows])


# -- K-theory ---------------------------------------------------------------------------


BASES = ["kapranov", "kapranov-untwisted", "beilinson", "prime", "doubleprime", "stokes-prime", "stokes-doubleprime"]


def _basis(kind: str, k: int, n: int, ell: int):
    from .ktheory import beilinson_basis, generate_Q_basis, kapranov_basis, stokes_basis

    if kind == "kapranov":
        return kapranov_basis(k, n)
    if kind == "kapranov-untwisted":
        return kapranov_basis(k, n, twisted=False)
    if kind == "beilinson":
        return beilinson_basis(n)
    if kind in ("prime", "doubleprime"):
        return generate_Q_basis(n, ell, kind)
    return stokes_basis(k, n, ell, kind.split("-", 1)[1])


basis_options = [
    click.option("--basis", "kind", type=click.Choice(BASES), default="kapranov", show_default=True),
    click.option("--k", type=int, default=1, show_default=True),
    click.option("--n", type=int, required=True),
    click.option("--ell", type=int, default=0, show_default=True),
]


def _with_basis_options(f):
    for opt in reversed(basis_options):
        f = opt(f)
    return f


@main.command()
@_with_basis_options
@fmt_option
def gram(kind, k, n, ell, fmt):
    """Gram matrix chi(e_i, e_j) of a basis."""
    b = _basis(kind, k, n, ell)
    G = b.gram
    payload = _matrix_payload(G)
    payload["exceptional"] = G.is_upper_unitriangular()
    _emit(payload, fmt, _matrix_lines(G) + [f"exceptional: {payload['exceptional']}"])


@main.command()
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--n", type=int, required=True)
@click.option("--ell", type=int, default=0, show_default=True)
@click.option("--kind", type=click.Choice(["prime", "doubleprime"]), default="prime", show_default=True)
@fmt_option
def stokes(k, n, ell, kind, fmt):
    """Stokes matrices S1, S2 from the rule-based exceptional basis."""
    from .ktheory import stokes_matrices

    sd = stokes_matrices(k, n, ell, kind)
    payload = {"S1": sd.S1.text_rows(), "S2": sd.S2.text_rows()}
    _emit(payload, fmt, ["S1:"] + _matrix_lines(sd.S1) + ["S2:"] + _matrix_lines(sd.S2))


@main.command()
@_with_basis_options
@click.option("--braid", required=True, help="word such as 't1 t2^-1'")
@fmt_option
def mutate(kind, k, n, ell, braid, fmt):
    """Act on a basis by a braid word (rightmost letter first) and print the new Gram matrix."""
    from .ktheory import act_braid

    b = act_braid(_basis(kind, k, n, ell), braid)
    G = b.gram
    payload = {"elements": [e.to_json()["localizations"] for e in b.elements], "gram": G.text_rows(),
               "exceptional": G.is_upper_unitriangular()}
    _emit(payload, fmt, _matrix_lines(G) + [f"exceptional: {payload['exceptional']}"])
    _finish(payload["exceptional"])


@main.command("canonical-check")
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--n", type=int, required=True)
@click.option("--kind", type=click.Choice(["prime", "doubleprime"]), default="prime", show_default=True)
@fmt_option
def canonical_check(k, n, kind, fmt):
    """Characteristic polynomial, Serre pairing and trace constraints of the canonical operator."""
    from .ktheory import canonical_checks, stokes_matrices

    sd = stokes_matrices(k, n, 0, kind)
    rep = canonical_checks(k, n, sd.basis, (sd.S1, sd.S2))
    _emit(rep.to_json(), fmt)
    _finish(rep.passed)


# -- numerics -------------------------------------------------------------------------------


def _sample(n, z, q, kappa, branch, seed):
    from .numeric import SamplePoint, seeded_sample

    if z:
        vals = _floats(z)
        if len(vals) != n:
            raise click.BadParameter(f"expected {n} values for --z")
        return SamplePoint.from_q(vals, q, kappa, branch)
    return seeded_sample(n, q, seed, kappa, branch)


numeric_options = [
    click.option("--n", type=int, required=True),
    click.option("--k", type=int, required=True),
    click.option("--z", default="", help="comma separated z values; default seeded random"),
    click.option("--q", type=float, default=0.05, show_default=True),
    click.option("--kappa", type=float, default=-1.0, show_default=True),
    click.option("--branch", type=int, default=0, show_default=True, help="arg(-1) = (2 branch + 1) pi"),
    click.option("--seed", type=int, default=0, show_default=True),
]


def _with_numeric_options(f):
    for opt in reversed(numeric_options):
        f = opt(f)
    return f


def _numeric_out(rep, sp, fmt):
    d = rep.to_json()
    d["sample"] = sp.to_json()
    lines = [f"{rep.identity}: {'PASS' if rep.passed else 'FAIL'}  max_rel_err={rep.max_rel_err:.3e}  tol={rep.tol:.1e}",
             "z = " + ", ".join(f"{v.real:g}" for v in sp.z)]
    _emit(d, fmt, lines)
    _finish(rep.passed)


@main.command()
@_with_numeric_options
@click.option("--trunc", type=int, default=40, show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True)
@fmt_option
def detprop(n, k, z, q, kappa, branch, seed, trunc, tol, fmt):
    """Determinantal identity between G(k,n) and P^{n-1} Jackson solutions."""
    from .numeric import verify_detprop

    sp = _sample(n, z, q, kappa, branch, seed)
    _numeric_out(verify_detprop(k, n, sp, trunc, tol), sp, fmt)


@main.command()
@_with_numeric_options
@click.option("--tol", type=float, default=1e-10, show_default=True)
@fmt_option
def bcheck(n, k, z, q, kappa, branch, seed, tol, fmt):
    """Leading Jackson term of each Kapranov class against its B-class restriction."""
    from .ktheory import kapranov_basis
    from .numeric import NumericReport, leading_term_check

    sp = _sample(n, z, q, kappa, branch, seed)
    lhs, rhs = [], []
    for P in kapranov_basis(k, n).elements:
        r = leading_term_check(P, sp, tol)
        lhs += r.lhs
        rhs += r.rhs
    _numeric_out(NumericReport(f"leading term = B-class ({k},{n})", lhs, rhs, tol), sp, fmt)


@main.command()
@_with_numeric_options
@click.option("--tol", type=float, default=1e-9, show_default=True)
@fmt_option
def hrr(n, k, z, q, kappa, branch, seed, tol, fmt):
    """kappa-deformed Riemann-Roch on O and the Kapranov classes."""
    from .numeric import hrr_check

    sp = _sample(n, z, q, kappa, branch, seed)
    _numeric_out(hrr_check(k, n, sp, tol), sp, fmt)


# -- suite and export ------------------------------------------------------------------------


@main.command()
@click.option("--max-n", type=int, default=4, show_default=True)
@click.option("--only", "only", multiple=True, type=click.Choice(SUITES), help="restrict to these suites")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="write the JSON report here")
@click.option("--timing/--no-timing", default=False, help="include elapsed time in JSON")
@fmt_option
def suite(max_n, only, seed, output, timing, fmt):
    """Run the orchestrated verification suite. Worker count comes from GRASSQKZ_WORKERS."""
    from .suite import run_suite

    try:
        cfg = SuiteConfig(max_n=max_n, which=frozenset(only) if only else frozenset(SUITES),
                          tolerances=NumericTolerances(), output=output, seed=seed)
        rep = run_suite(cfg)
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc
    if output:
        with open(output, "w") as fh:
            fh.write(rep.dumps(timing) + "\n")
    if fmt == "json":
        click.echo(rep.dumps(timing))
    else:
        click.echo(rep.text())
    _finish(rep.passed)


def export_object(obj_id: str):
    """Resolve 'kind:args' to a JSON-ready payload.

    Ids: qkz:n,k,a  dyn:n,k,i  gram:BASIS:k,n[,ell]  stokes:k,n[,ell]  quantum:k,n[,i]
    """
    kind, _, rest = obj_id.partition(":")
    try:
        if kind == "qkz":
            from .weight_ops import qkz_operator

            n, k, a = _ints(rest)
            return {"id": obj_id, **qkz_operator(n, k, a).to_json()}
        if kind == "dyn":
            from .weight_ops import dynamical_operator

            n, k, i = _ints(rest)
            return {"id": obj_id, **dynamical_operator(n, k, i).to_json()}
        if kind == "gram":
            basis, _, nums = rest.partition(":")
            vals = _ints(nums)
            k, n = vals[:2]
            ell = vals[2] if len(vals) > 2 else 0
            G = _basis(basis, k, n, ell).gram
            return {"id": obj_id, **_matrix_payload(G), "exceptional": G.is_upper_unitriangular()}
        if kind == "stokes":
            from .ktheory import markov_entries, markov_holds, stokes_matrices

            vals = _ints(rest)
            k, n = vals[:2]
            ell = vals[2] if len(vals) > 2 else 0
            sd = stokes_matrices(k, n, ell)
            d = {"id": obj_id, "S1": sd.S1.text_rows(), "S2": sd.S2.text_rows()}
            if n == 3 and k in (1, 2) and ell == 0:
                d["markov"] = markov_holds(*markov_entries(sd.S1), k)
            return d
        if kind == "quantum":
            from .cohomology import quantum_c1_matrix

            vals = _ints(rest)
            k, n = vals[:2]
            i = vals[2] if len(vals) > 2 else 1
            return {"id": obj_id, **_matrix_payload(quantum_c1_matrix(k, n, i, "schubert"))}
    except (ValueError, TypeError) as exc:
        raise UnknownId(f"cannot resolve {obj_id!r}: {exc}") from exc
    raise UnknownId(f"unknown object id {obj_id!r}")


@main.command()
@click.argument("obj_id")
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@fmt_option
def export(obj_id, output, fmt):
    """Byte-stable export of an object, e.g. 'qkz:3,2,1' or 'gram:kapranov:2,3'."""
    payload = export_object(obj_id)
    text = json.dumps(payload, indent=2, sort_keys=True) if fmt == "json" else "\n".join(_to_text(payload))
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


if __name__ == "__main__":
    main()
