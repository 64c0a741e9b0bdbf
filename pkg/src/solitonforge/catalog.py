"""Built-in example algebras and fixtures generated by the package's own pipeline."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .algebra import MetricLieAlgebra, from_brackets
from .extension import (
    ExtensionResult,
    abelian_flat_extension,
    einstein_extension,
    wpe_extension,
)
from .soliton import find_algebraic_soliton


def abelian(n: int) -> MetricLieAlgebra:
    return from_brackets(f"abelian_{n}", n, {})


def heisenberg3() -> MetricLieAlgebra:
    return from_brackets("heisenberg3", 3, {(1, 2): {3: 1.0}})


def heisenberg5() -> MetricLieAlgebra:
    return from_brackets("heisenberg5", 5, {(1, 2): {5: 1.0}, (3, 4): {5: 1.0}})


def solv2() -> MetricLieAlgebra:
    return from_brackets("solv2", 2, {(1, 2): {2: 1.0}})


def einstein_ext_heis3() -> ExtensionResult:
    alg = heisenberg3()
    cert = find_algebraic_soliton(alg)
    assert cert is not None
    return einstein_extension(alg, cert)


def wpe_ext_heis3(m: float) -> ExtensionResult:
    alg = heisenberg3()
    cert = find_algebraic_soliton(alg)
    assert cert is not None
    return wpe_extension(alg, cert, m)


def ambient_heis3(m: int) -> ExtensionResult:
    return abelian_flat_extension(wpe_ext_heis3(float(m)), m)


def hyperbolic(n: int) -> ExtensionResult:
    """Constant-curvature space of dimension n, built as the flat override extension.

    The abelian base with derivation I and constant -1 yields sectional
    curvature -1/(n-1) everywhere and Ricci tensor -g.
    """
    if n < 2:
        raise ValueError("hyperbolic presentation needs dimension >= 2")
    base = abelian(n - 1)
    cert = find_algebraic_soliton(base)
    assert cert is not None and cert.kind == "degenerate_flat"
    return einstein_extension(base, cert, lam=-1.0, derivation=np.eye(n - 1))


def _named(result: ExtensionResult, name: str) -> MetricLieAlgebra:
    return replace(result.ext, name=name)


def catalog() -> list[MetricLieAlgebra]:
    """All built-in algebras, base examples first, generated fixtures after."""
    algebras = [abelian(n) for n in range(1, 5)]
    algebras += [heisenberg3(), heisenberg5(), solv2()]
    algebras += [
        _named(einstein_ext_heis3(), "einstein_ext_heis3"),
        _named(wpe_ext_heis3(1.0), "wpe_ext_heis3_m1"),
        _named(wpe_ext_heis3(2.0), "wpe_ext_heis3_m2"),
        _named(ambient_heis3(2), "ambient_heis3_m2"),
    ]
    algebras += [_named(hyperbolic(n), f"hyperbolic_{n}") for n in range(2, 5)]
    return algebras


def catalog_names() -> list[str]:
    return [alg.name for alg in catalog()]


def catalog_algebra(name: str) -> MetricLieAlgebra:
    for alg in catalog():
        if alg.name == name:
            return alg
    raise KeyError(f"no catalog algebra named '{name}'")
