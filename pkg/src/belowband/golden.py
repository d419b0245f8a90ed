"""Golden constants: recorded band-edge integrals and critical couplings.

Two JSON files ship with the package: ``green.json`` with the finite
threshold integrals (a(0), b(0) for n >= 3, the limit of c - d for n >= 2,
s(0) for every n) and ``critical.json`` with lambda_c and lambda_s.  Every
record carries the method it was computed with and the tolerance at which
an independent method agreed before the value was written.

The directory is overridable through the LS_GOLDEN_DIR environment
variable.  Records are regenerated with :func:`regenerate`, which refuses
to write any value whose cross-check disagrees.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

from .green import closed_form_a3, green_threshold
from .quadrature import trapezoid_threshold

__all__ = [
    "GoldenRecord",
    "golden_dir",
    "load_records",
    "lookup",
    "regenerate",
]

ENV_VAR = "LS_GOLDEN_DIR"
GREEN_FILE = "green.json"
CRITICAL_FILE = "critical.json"
SCHEMA_VERSION = "1"

# dimensions covered by the shipped tables
GREEN_DIMENSIONS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class GoldenRecord:
    n: int
    quantity: str
    value: float
    method: str
    tolerance: float


def golden_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    return Path(resources.files("belowband") / "golden")


def load_records(filename: str) -> list[GoldenRecord]:
    path = golden_dir() / filename
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return [GoldenRecord(**rec) for rec in doc["records"]]


def lookup(records: list[GoldenRecord], n: int, quantity: str) -> GoldenRecord:
    for rec in records:
        if rec.n == n and rec.quantity == quantity:
            return rec
    raise KeyError(f"no golden record for n={n}, quantity={quantity!r}")


def _cross_checked(n: int, quantity: str, primary: float, secondary: float,
                   tolerance: float, method: str) -> GoldenRecord:
    rel = abs(primary - secondary) / max(abs(primary), abs(secondary))
    if rel > tolerance:
        raise RuntimeError(
            f"golden cross-check failed for n={n} {quantity}: "
            f"{primary!r} vs {secondary!r} (rel {rel:.3e} > {tolerance:.1e})")
    return GoldenRecord(n=n, quantity=quantity, value=primary,
                        method=method, tolerance=tolerance)


def compute_green_records(dimensions=GREEN_DIMENSIONS) -> list[GoldenRecord]:
    """Threshold integrals with an independent check behind each value.

    s(0) and lim(c-d) are cross-checked against the subtracted-integrand
    grid quadrature for n <= 3 and against the identity
    s(0) = 1 - (n-1)(a(0) - d(0)) for n >= 3; a(0) for n = 3 is checked
    against the elliptic-integral reduction of the Watson integral, and
    a(0), b(0) for every n >= 3 against the identity a - b = 1/n.
    """
    from .quadrature import laplace_integrals

    records: list[GoldenRecord] = []
    for n in dimensions:
        g = green_threshold(n)
        raw = laplace_integrals(n, 0.0)
        if n <= 3:
            grid = trapezoid_threshold(n)
            records.append(_cross_checked(
                n, "s0", g.s0, grid["s"], 1e-8, "laplace-bessel"))
            if n >= 2:
                records.append(_cross_checked(
                    n, "alpha0", g.alpha0, grid["cd"], 1e-8, "laplace-bessel"))
        else:
            ident = 1.0 - (n - 1) * raw["ad"]
            records.append(_cross_checked(
                n, "s0", g.s0, ident, 1e-10, "laplace-bessel"))
            records.append(_cross_checked(
                n, "alpha0", g.alpha0, raw["c"] - raw["d"], 1e-9,
                "laplace-bessel"))
        if n >= 3:
            second = closed_form_a3(0.0) if n == 3 else g.b + 1.0 / n
            tol = 1e-6 if n == 3 else 1e-9
            records.append(_cross_checked(n, "a0", g.a, second, tol,
                                          "laplace-bessel"))
            records.append(_cross_checked(n, "b0", g.b, g.a - 1.0 / n, 1e-9,
                                          "laplace-bessel"))
    return records


def compute_critical_records(dimensions=GREEN_DIMENSIONS) -> list[GoldenRecord]:
    """lambda_s = 1/s(0) for every n and lambda_c = 1/lim(c-d) for n >= 2."""
    records = []
    for n in dimensions:
        g = green_threshold(n)
        if n <= 3:
            grid = trapezoid_threshold(n)
            records.append(_cross_checked(
                n, "lambda_s", 1.0 / g.s0, 1.0 / grid["s"], 1e-8,
                "laplace-bessel"))
            if n >= 2:
                records.append(_cross_checked(
                    n, "lambda_c", 1.0 / g.alpha0, 1.0 / grid["cd"], 1e-8,
                    "laplace-bessel"))
        else:
            records.append(GoldenRecord(n, "lambda_s", 1.0 / g.s0,
                                        "laplace-bessel", 1e-9))
            records.append(GoldenRecord(n, "lambda_c", 1.0 / g.alpha0,
                                        "laplace-bessel", 1e-9))
    return records


def _write(path: Path, records: list[GoldenRecord]) -> None:
    doc = {"schema_version": SCHEMA_VERSION,
           "records": [asdict(r) for r in records]}
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def regenerate(directory: Path | None = None,
               dimensions=GREEN_DIMENSIONS) -> None:
    """Recompute and rewrite both golden files (cross-checks enforced)."""
    directory = Path(directory) if directory else golden_dir()
    directory.mkdir(parents=True, exist_ok=True)
    _write(directory / GREEN_FILE, compute_green_records(dimensions))
    _write(directory / CRITICAL_FILE, compute_critical_records(dimensions))


def main() -> None:
    regenerate()
    print(f"golden files rewritten in {golden_dir()}")


if __name__ == "__main__":
    main()
