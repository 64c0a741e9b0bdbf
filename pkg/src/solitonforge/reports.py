"""Machine-readable verification reports shared across modules."""

from __future__ import annotations

from dataclasses import dataclass

_SCALE_FLOOR = 1e-12


@dataclass(frozen=True)
class Check:
    """One named residual together with its pass/fail verdict.

    ``raw`` is the unnormalised residual; ``residual`` is ``raw`` divided by
    the natural scale of the terms entering the identity, and is what the
    tolerance is applied to.
    """

    name: str
    residual: float
    raw: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        out = f"{status}  {self.name}: residual {self.residual:.3e} (raw {self.raw:.3e}, tol {self.tolerance:.1e})"
        if self.detail:
            out += f"  [{self.detail}]"
        return out


def make_check(name: str, raw: float, scale: float, tolerance: float, detail: str = "") -> Check:
    raw = float(abs(raw))
    normalized = raw / max(float(scale), _SCALE_FLOOR)
    return Check(
        name=name,
        residual=normalized,
        raw=raw,
        tolerance=float(tolerance),
        passed=bool(normalized <= tolerance),
        detail=detail,
    )


@dataclass(frozen=True)
class VerificationReport:
    """A list of named checks; the verdict is their conjunction."""

    checks: tuple[Check, ...]

    def __post_init__(self):
        object.__setattr__(self, "checks", tuple(self.checks))

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(f"no check named '{name}'")

    def summary(self) -> str:
        head = "PASS" if self.verdict else "FAIL"
        lines = [f"verdict: {head}"]
        lines.extend("  " + c.line() for c in self.checks)
        return "\n".join(lines)
