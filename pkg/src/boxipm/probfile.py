"""Problem file format: line-oriented ``key: value`` text.

Scalars are bare tokens; arrays are bracketed, whitespace-separated,
row-major, and may span lines::

    format_version: 1
    kind: box
    n: 2
    m: 1
    Q: [
      2.0 0.0
      0.0 2.0
    ]
    c: [ -3.0 0.0 ]
    A: [ 1.0 1.0 ]
    b: [ 1.0 ]
    tol: 1e-3

``kind: standard`` files carry the standard-form data in the same keys and
may add ``pi:`` (the solution-norm bound).  Blank lines and ``#`` comments
are allowed; unknown keys, duplicate keys and non-finite numbers are not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParseError
from .problem import BoxQP, StandardQP

FORMAT_VERSION = 1

_SCALAR_KEYS = {"format_version", "kind", "n", "m", "tol", "pi"}
_ARRAY_KEYS = {"Q", "c", "A", "b"}
_ALL_KEYS = _SCALAR_KEYS | _ARRAY_KEYS
_REQUIRED = _ALL_KEYS - {"pi"}


@dataclass(frozen=True)
class ProblemFile:
    """Parsed problem file; arrays are row-major float lists."""

    format_version: int
    kind: str
    n: int
    m: int
    Q: np.ndarray
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    tol: float
    pi: float | None = None

    def to_boxqp(self) -> BoxQP:
        if self.kind != "box":
            raise ParseError("problem kind is not 'box'")
        return BoxQP(Q=self.Q, c=self.c, A=self.A, b=self.b, tol=self.tol)

    def to_standardqp(self) -> StandardQP:
        if self.kind != "standard":
            raise ParseError("problem kind is not 'standard'")
        return StandardQP(Qt=self.Q, ct=self.c, At=self.A, bt=self.b)


def _parse_number(token: str, line: int, col: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", line, col) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite number: {token!r}", line, col)
    return value


def _parse_int(token: str, line: int, col: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"not an integer: {token!r}", line, col) from None


def parse_problem(text: str) -> ProblemFile:
    """Strict parse of the documented format; raises ParseError / DimensionError."""
    raw: dict[str, object] = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line_no = i + 1
        line = lines[i].split("#", 1)[0]
        i += 1
        if not line.strip():
            continue
        if ":" not in line:
            raise ParseError("expected 'key: value'", line_no, 1)
        key, _, rest = line.partition(":")
        col = len(key) + 2
        key = key.strip()
        if key not in _ALL_KEYS:
            raise ParseError(f"unknown key {key!r}", line_no, 1)
        if key in raw:
            raise ParseError(f"duplicate key {key!r}", line_no, 1)
        rest = rest.strip()
        if key in _ARRAY_KEYS:
            if not rest.startswith("["):
                raise ParseError(f"array value for {key!r} must start with '['", line_no, col)
            body = rest[1:]
            tokens: list[float] = []
            closed = False
            while True:
                if "]" in body:
                    body, _, tail = body.partition("]")
                    if tail.strip():
                        raise ParseError("unexpected text after ']'", line_no, 1)
                    closed = True
                for tok in body.split():
                    tokens.append(_parse_number(tok, line_no, col))
                if closed:
                    break
                if i >= len(lines):
                    raise ParseError(f"unterminated array for {key!r}", line_no, col)
                line_no = i + 1
                body = lines[i].split("#", 1)[0]
                i += 1
            raw[key] = np.array(tokens, dtype=np.float64)
        else:
            if not rest:
                raise ParseError(f"missing value for {key!r}", line_no, col)
            if key == "kind":
                if rest not in ("box", "standard"):
                    raise ParseError(f"kind must be 'box' or 'standard', got {rest!r}", line_no, col)
                raw[key] = rest
            elif key in ("format_version", "n", "m"):
                raw[key] = _parse_int(rest, line_no, col)
            else:
                raw[key] = _parse_number(rest, line_no, col)

    missing = sorted(_REQUIRED - raw.keys())
    if missing:
        raise ParseError("missing keys: " + ", ".join(missing))
    if raw["format_version"] != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {raw['format_version']!r}")
    n, m = raw["n"], raw["m"]
    if n < 1 or m < 0:
        raise ParseError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
    if raw["tol"] <= 0.0:
        raise ParseError(f"tol must be > 0, got {raw['tol']!r}")
    if "pi" in raw:
        if raw["kind"] != "standard":
            raise ParseError("'pi' is only valid for kind: standard")
        if raw["pi"] <= 0.0:
            raise ParseError(f"pi must be > 0, got {raw['pi']!r}")

    shapes = {"Q": n * n, "c": n, "A": m * n, "b": m}
    for key, want in shapes.items():
        got = raw[key].size
        if got != want:
            raise DimensionError(f"{key} must have {want} entries for n={n}, m={m}, got {got}")

    return ProblemFile(
        format_version=FORMAT_VERSION,
        kind=raw["kind"],
        n=n,
        m=m,
        Q=raw["Q"].reshape(n, n),
        c=raw["c"],
        A=raw["A"].reshape(m, n),
        b=raw["b"],
        tol=float(raw["tol"]),
        pi=float(raw["pi"]) if "pi" in raw else None,
    )


def _format_array(key: str, a: np.ndarray) -> str:
    a = np.atleast_2d(a)
    if a.shape[0] <= 1:
        return f"{key}: [ " + " ".join(repr(float(v)) for v in a.ravel()) + " ]"
    rows = "\n".join("  " + " ".join(repr(float(v)) for v in row) for row in a)
    return f"{key}: [\n{rows}\n]"


def serialize_problem(pf: ProblemFile) -> str:
    """Canonical text form; floats use shortest round-trip repr, so
    parse(serialize(pf)) reproduces pf bit for bit."""
    parts = [
        f"format_version: {pf.format_version}",
        f"kind: {pf.kind}",
        f"n: {pf.n}",
        f"m: {pf.m}",
        _format_array("Q", pf.Q.reshape(pf.n, pf.n)),
        _format_array("c", pf.c),
        _format_array("A", pf.A.reshape(pf.m, pf.n)),
        _format_array("b", pf.b),
        f"tol: {pf.tol!r}",
    ]
    if pf.pi is not None:
        parts.append(f"pi: {pf.pi!r}")
    return "\n".join(parts) + "\n"
