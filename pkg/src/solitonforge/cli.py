"""Command-line surface.

Exit codes: 0 success / verification passed, 1 mathematical failure
(invalid algebra, rejected certificate, failed verification), 2 input or
usage error (schema violations, bad flags).  Indices are 1-based on the
command line, matching the file format.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass

import click
import numpy as np

from . import __version__, io
from .algebra import InvalidAlgebraError, Subspace, validate
from .catalog import catalog
from .extension import (
    ExtensionResult,
    MODE_WPE,
    NonNormalDerivationError,
    NotADerivationError,
    einstein_ambient_pipeline,
    einstein_extension,
    wpe_extension,
)
from .curvature import ricci
from .soliton import find_algebraic_soliton, find_semi_algebraic_soliton
from .verify import (
    SolvDecomposition,
    einstein_residual,
    mu_value,
    solvmanifold_conditions,
    structure_recovery,
    wpe_residual,
)

TOLERANCE_ENV = "SOLITONFORGE_TOLERANCE"

EXIT_OK = 0
EXIT_MATH = 1
EXIT_USAGE = 2


@dataclass
class Tolerances:
    fit: float
    verify: float
    rank: float

    def as_dict(self) -> dict:
        return {"tol_fit": self.fit, "tol_verify": self.verify, "tol_rank": self.rank}


def _resolve_tolerances(tol_fit, tol_verify, tol_rank) -> Tolerances:
    env = os.environ.get(TOLERANCE_ENV)
    base = None
    if env is not None:
        try:
            base = float(env)
        except ValueError:
            raise click.UsageError(f"{TOLERANCE_ENV} must be a number, got {env!r}")
    return Tolerances(
        fit=tol_fit if tol_fit is not None else (base if base is not None else 1e-8),
        verify=tol_verify if tol_verify is not None else (base if base is not None else 1e-8),
        rank=tol_rank if tol_rank is not None else (base if base is not None else 1e-9),
    )


def _load(path):
    try:
        return io.load(path)
    except io.SchemaError as exc:
        click.echo(f"schema error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except io.AlgebraValidationError as exc:
        click.echo(f"validation failure: {exc.report.summary()}", err=True)
        sys.exit(EXIT_MATH)


def _matrix_str(mat) -> str:
    mat = np.asarray(mat)
    return "\n".join("  [" + ", ".join(f"{v: .12g}" for v in row) + "]" for row in mat)


def _parse_indices(text: str, dim: int, what: str) -> list[int]:
    try:
        idx = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise click.UsageError(f"--{what} must be a comma-separated list of integers, got {text!r}")
    if not idx:
        raise click.UsageError(f"--{what} must not be empty")
    for i in idx:
        if not (1 <= i <= dim):
            raise click.UsageError(f"--{what}: index {i} out of range 1..{dim}")
    return [i - 1 for i in idx]


@click.group()
@click.version_option(version=__version__, prog_name="solitonforge")
@click.option("--tol-fit", type=float, default=None, help="Acceptance tolerance for soliton fits (default 1e-8).")
@click.option("--tol-verify", type=float, default=None, help="Tolerance for verification residuals (default 1e-8).")
@click.option("--tol-rank", type=float, default=None, help="Relative rank tolerance (default 1e-9).")
@click.pass_context
def cli(ctx, tol_fit, tol_verify, tol_rank):
    """Metric Lie algebras: curvature, soliton certificates, Einstein extensions."""
    ctx.obj = _resolve_tolerances(tol_fit, tol_verify, tol_rank)


@cli.command("validate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
def validate_cmd(file):
    """Check the metric Lie algebra axioms of FILE."""
    try:
        alg = io.load(file)
    except io.SchemaError as exc:
        click.echo(f"schema error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except io.AlgebraValidationError as exc:
        click.echo(exc.report.summary(), err=True)
        sys.exit(EXIT_MATH)
    click.echo(validate(alg).summary())
    sys.exit(EXIT_OK)


@cli.command("curvature")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--riemann", "with_riemann", is_flag=True, help="Include the full curvature tensor in the JSON report.")
@click.option("--json", "json_out", type=click.Path(dir_okay=False), default=None, help="Write a JSON report.")
@click.pass_obj
def curvature_cmd(tols: Tolerances, file, with_riemann, json_out):
    """Print Ricci data of FILE: tensor, operator eigenvalues, scalar curvature."""
    alg = _load(file)
    rep = ricci(alg, include_riemann=with_riemann)
    eigs = np.sort(np.linalg.eigvals(rep.ricci_operator.matrix).real)
    click.echo(f"algebra: {alg.name} (dim {alg.dim})")
    click.echo("ricci tensor:")
    click.echo(_matrix_str(rep.ricci_tensor))
    click.echo("ricci operator eigenvalues: " + ", ".join(f"{v:.12g}" for v in eigs))
    click.echo(f"scalar curvature: {rep.scal:.12g}")
    if json_out:
        payload = {
            "ricci_tensor": rep.ricci_tensor,
            "ricci_operator_eigenvalues": eigs,
            "scal": rep.scal,
        }
        if with_riemann and rep.riemann is not None:
            payload["riemann"] = rep.riemann
        io.write_json_report(json_out, payload, input_path=file, tolerances=tols.as_dict())
    sys.exit(EXIT_OK)


@cli.command("soliton")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--semi-algebraic", "semi", is_flag=True, help="Fit only the symmetric part of the derivation.")
@click.option("--tol", type=float, default=None, help="Override the fit tolerance.")
@click.option("--json", "json_out", type=click.Path(dir_okay=False), default=None, help="Write a JSON report.")
@click.pass_obj
def soliton_cmd(tols: Tolerances, file, semi, tol, json_out):
    """Certify Ricci soliton structure of FILE; exit 0 iff a certificate is accepted."""
    alg = _load(file)
    tol_fit = tol if tol is not None else tols.fit
    finder = find_semi_algebraic_soliton if semi else find_algebraic_soliton
    cert = finder(alg, tol_fit=tol_fit)
    if cert is None:
        click.echo(f"no {'semi-algebraic' if semi else 'algebraic'} soliton certificate at tolerance {tol_fit:g}")
        if json_out:
            io.write_json_report(json_out, {"accepted": False}, input_path=file, tolerances=tols.as_dict())
        sys.exit(EXIT_MATH)
    click.echo(f"algebra: {alg.name} (dim {alg.dim})")
    click.echo(f"kind: {cert.kind}")
    click.echo(f"lambda = {cert.lam:.12g}")
    click.echo(f"residual = {cert.residual:.3e}, normal defect = {cert.normal_defect:.3e}")
    click.echo("D:")
    click.echo(_matrix_str(cert.D.matrix))
    click.echo("S:")
    click.echo(_matrix_str(cert.S.matrix))
    click.echo("A:")
    click.echo(_matrix_str(cert.A.matrix))
    if json_out:
        payload = {"accepted": True, **io.certificate_to_dict(cert)}
        io.write_json_report(json_out, payload, input_path=file, tolerances=tols.as_dict())
    sys.exit(EXIT_OK)


def _load_derivation(path, dim):
    import json as _json

    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = _json.load(fh)
    except (OSError, _json.JSONDecodeError) as exc:
        raise click.UsageError(f"--derivation: cannot read matrix from {path}: {exc}")
    if isinstance(doc, dict) and "matrix" in doc:
        doc = doc["matrix"]
    mat = np.asarray(doc, dtype=float)
    if mat.shape != (dim, dim):
        raise click.UsageError(f"--derivation: expected a {dim}x{dim} matrix, got shape {mat.shape}")
    return mat


@cli.command("extend")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["einstein", "wpe", "ambient"]), required=True)
@click.option("--m", "m_par", type=float, default=None, help="Fiber dimension parameter (wpe/ambient).")
@click.option("--lambda", "lam", type=float, default=None, help="Override constant for flat inputs.")
@click.option("--derivation", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON matrix file with the override derivation for flat inputs.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="Write the extended algebra.")
@click.option("--json", "json_out", type=click.Path(dir_okay=False), default=None, help="Write a JSON report.")
@click.pass_obj
def extend_cmd(tols: Tolerances, file, mode, m_par, lam, derivation, out_path, json_out):
    """Build an extension of FILE and immediately verify it; exit 0 iff verification passes."""
    alg = _load(file)
    der = _load_derivation(derivation, alg.dim) if derivation is not None else None
    if (lam is None) != (der is None):
        raise click.UsageError("--lambda and --derivation must be supplied together")
    if mode in ("wpe", "ambient") and m_par is None:
        raise click.UsageError(f"--mode {mode} requires --m")
    if mode == "ambient" and m_par is not None and abs(m_par - round(m_par)) > 1e-9:
        raise click.UsageError("--mode ambient requires an integer --m")
    try:
        cert = find_algebraic_soliton(alg, tol_fit=tols.fit)
        if cert is None:
            click.echo("no algebraic soliton certificate at tolerance; cannot extend", err=True)
            sys.exit(EXIT_MATH)
        if mode == "einstein":
            result = einstein_extension(alg, cert, lam=lam, derivation=der)
            report = einstein_residual(result.ext, result.lam, tol_verify=tols.verify)
        elif mode == "wpe":
            result = wpe_extension(alg, cert, m_par, lam=lam, derivation=der)
            report = wpe_residual(result, tol_verify=tols.verify)
        else:
            result = einstein_ambient_pipeline(alg, int(round(m_par)), cert=cert, lam=lam, derivation=der)
            report = einstein_residual(result.ext, result.lam, tol_verify=tols.verify)
    except (NotADerivationError, NonNormalDerivationError, InvalidAlgebraError, ValueError, RuntimeError) as exc:
        click.echo(f"extension rejected: {exc}", err=True)
        sys.exit(EXIT_MATH)
    click.echo(f"built {result.mode} extension of {result.source}: dim {result.ext.dim}, "
               f"alpha = {result.alpha:.12g}, L = {result.L:.12g}, lambda = {result.lam:.12g}")
    click.echo(report.summary())
    if out_path:
        io.save(result.ext, out_path)
        click.echo(f"wrote algebra to {out_path}")
    if json_out:
        payload = {"extension": io.extension_to_dict(result), "verification": io.report_to_dict(report)}
        io.write_json_report(json_out, payload, input_path=file, tolerances=tols.as_dict())
    sys.exit(EXIT_OK if report.verdict else EXIT_MATH)


@cli.command("verify")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--einstein", "einstein_lam", type=float, default=None, help="Check Ric = lambda g.")
@click.option("--wpe", "wpe_mode", is_flag=True, help="Check the warped-product equation at the basepoint.")
@click.option("--recover", "recover_mode", is_flag=True, help="Recover extension data and check it.")
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--m", "m_par", type=float, default=None)
@click.option("--L", "l_par", type=float, default=None)
@click.option("--xi", "xi_index", type=int, default=None, help="1-based index of the distinguished unit vector.")
@click.option("--json", "json_out", type=click.Path(dir_okay=False), default=None, help="Write a JSON report.")
@click.pass_obj
def verify_cmd(tols: Tolerances, file, einstein_lam, wpe_mode, recover_mode, lam, m_par, l_par, xi_index, json_out):
    """Verify an identity of the algebra in FILE; exit 0 iff all checks pass."""
    selected = sum([einstein_lam is not None, wpe_mode, recover_mode])
    if selected != 1:
        raise click.UsageError("choose exactly one of --einstein, --wpe, --recover")
    alg = _load(file)
    try:
        if einstein_lam is not None:
            report = einstein_residual(alg, einstein_lam, tol_verify=tols.verify)
        elif wpe_mode:
            if None in (lam, m_par, l_par, xi_index):
                raise click.UsageError("--wpe requires --lambda, --m, --L and --xi")
            if lam == 0:
                raise click.UsageError("--lambda must be nonzero in --wpe mode")
            if not (1 <= xi_index <= alg.dim):
                raise click.UsageError(f"--xi out of range 1..{alg.dim}")
            result = ExtensionResult(
                ext=alg, xi_index=xi_index - 1, alpha=l_par / lam, L=l_par,
                m=m_par, lam=lam, mode=MODE_WPE, source=alg.name,
            )
            report = wpe_residual(result, tol_verify=tols.verify)
            click.echo(f"mu value at basepoint: {mu_value(result):.6e}")
        else:
            if None in (lam, m_par, xi_index):
                raise click.UsageError("--recover requires --lambda, --m and --xi")
            if not (1 <= xi_index <= alg.dim):
                raise click.UsageError(f"--xi out of range 1..{alg.dim}")
            report = structure_recovery(alg, xi_index - 1, lam, m_par, tol_verify=tols.verify)
    except click.UsageError:
        raise
    except (InvalidAlgebraError, ValueError) as exc:
        click.echo(f"verification error: {exc}", err=True)
        sys.exit(EXIT_MATH)
    click.echo(report.summary())
    if json_out:
        io.write_json_report(json_out, io.report_to_dict(report), input_path=file, tolerances=tols.as_dict())
    sys.exit(EXIT_OK if report.verdict else EXIT_MATH)


@cli.command("check-solv")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--a", "a_indices", required=True, help="Comma-separated 1-based indices spanning the complement.")
@click.option("--n", "n_indices", required=True, help="Comma-separated 1-based indices spanning the nilradical.")
@click.option("--xi", "xi_index", type=int, required=True, help="1-based index of the distinguished unit vector.")
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--m", "m_par", type=float, required=True)
@click.option("--L", "l_par", type=float, required=True)
@click.option("--json", "json_out", type=click.Path(dir_okay=False), default=None, help="Write a JSON report.")
@click.pass_obj
def check_solv_cmd(tols: Tolerances, file, a_indices, n_indices, xi_index, lam, m_par, l_par, json_out):
    """Check the solvable warped-Einstein trace conditions for FILE."""
    alg = _load(file)
    a_idx = _parse_indices(a_indices, alg.dim, "a")
    n_idx = _parse_indices(n_indices, alg.dim, "n")
    if not (1 <= xi_index <= alg.dim):
        raise click.UsageError(f"--xi out of range 1..{alg.dim}")
    eye = np.eye(alg.dim)
    dec = SolvDecomposition(
        a_basis=Subspace(eye[:, a_idx]),
        n_basis=Subspace(eye[:, n_idx]),
        xi=eye[:, xi_index - 1],
    )
    try:
        report = solvmanifold_conditions(alg, dec, lam, m_par, l_par, tol_verify=tols.verify)
    except (InvalidAlgebraError, ValueError) as exc:
        click.echo(f"decomposition error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    click.echo(report.summary())
    if json_out:
        io.write_json_report(json_out, io.report_to_dict(report), input_path=file, tolerances=tols.as_dict())
    sys.exit(EXIT_OK if report.verdict else EXIT_MATH)


@cli.command("catalog")
@click.option("--emit", "emit_dir", type=click.Path(file_okay=False), default=None,
              help="Write every catalog algebra as a JSON file into this directory.")
def catalog_cmd(emit_dir):
    """List the built-in algebras, or write them all as files."""
    algebras = catalog()
    for alg in algebras:
        click.echo(f"{alg.name}  (dim {alg.dim})")
    if emit_dir:
        os.makedirs(emit_dir, exist_ok=True)
        for alg in algebras:
            io.save(alg, os.path.join(emit_dir, f"{alg.name}.json"))
        click.echo(f"wrote {len(algebras)} files to {emit_dir}")
    sys.exit(EXIT_OK)


def main():
    cli(prog_name="solitonforge")


if __name__ == "__main__":
    main()
