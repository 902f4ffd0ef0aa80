"""Bounded integer linear programs and their LP-format text form."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

SENSES = ("=", "<=", ">=")


@dataclass
class Constraint:
    coeffs: dict[int, float]
    sense: str
    rhs: float
    name: str = ""

    def __post_init__(self) -> None:
        if self.sense not in SENSES:
            raise ValueError(f"unknown constraint sense {self.sense!r}")


@dataclass
class IlpModel:
    """``minimize c @ x`` over integer ``x`` with ``lower <= x <= upper``.

    Every variable is integral and bounded on both sides.
    """

    name: str = "model"
    names: list[str] = field(default_factory=list)
    lower: list[float] = field(default_factory=list)
    upper: list[float] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return len(self.names)

    def add_var(self, name: str, lower: float = 0, upper: float = 1, cost: float = 0) -> int:
        if not (math.isfinite(lower) and math.isfinite(upper)):
            raise ValueError(f"variable {name} must have finite bounds")
        if lower > upper:
            raise ValueError(f"variable {name} has empty domain [{lower}, {upper}]")
        self.names.append(name)
        self.lower.append(lower)
        self.upper.append(upper)
        self.objective.append(cost)
        return len(self.names) - 1

    def add_constraint(self, coeffs: dict[int, float], sense: str, rhs: float, name: str = "") -> int:
        for j in coeffs:
            if not 0 <= j < self.num_vars:
                raise ValueError(f"constraint {name!r} references undeclared variable {j}")
        self.constraints.append(Constraint(dict(coeffs), sense, rhs, name or f"c{len(self.constraints)}"))
        return len(self.constraints) - 1

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.lower, dtype=float), np.asarray(self.upper, dtype=float)

    def cost_vector(self) -> np.ndarray:
        return np.asarray(self.objective, dtype=float)

    def matrices(self) -> tuple[sp.csr_matrix, np.ndarray, sp.csr_matrix, np.ndarray]:
        """``(A_eq, b_eq, A_ub, b_ub)`` with ``>=`` rows negated into ``<=``."""
        eq_rows: list[tuple[dict[int, float], float]] = []
        ub_rows: list[tuple[dict[int, float], float]] = []
        for con in self.constraints:
            if con.sense == "=":
                eq_rows.append((con.coeffs, con.rhs))
            elif con.sense == "<=":
                ub_rows.append((con.coeffs, con.rhs))
            else:
                ub_rows.append(({j: -c for j, c in con.coeffs.items()}, -con.rhs))
        return (*_to_csr(eq_rows, self.num_vars), *_to_csr(ub_rows, self.num_vars))

    def objective_value(self, x: np.ndarray) -> float:
        return float(np.dot(self.cost_vector(), x))

    def violation(self, x: np.ndarray) -> float:
        """Largest bound or constraint violation of ``x`` (0 when feasible)."""
        x = np.asarray(x, dtype=float)
        lo, hi = self.bounds()
        worst = max(0.0, float(np.max(lo - x, initial=0.0)), float(np.max(x - hi, initial=0.0)))
        for con in self.constraints:
            lhs = sum(c * x[j] for j, c in con.coeffs.items())
            if con.sense == "=":
                worst = max(worst, abs(lhs - con.rhs))
            elif con.sense == "<=":
                worst = max(worst, lhs - con.rhs)
            else:
                worst = max(worst, con.rhs - lhs)
        return worst

    def is_feasible(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(np.abs(x - np.round(x)) <= tol)) and self.violation(x) <= tol

    def objective_step(self) -> Fraction | None:
        """Spacing of attainable objective values, if the costs are rational.

        With integer variables the objective moves in multiples of
        ``1 / lcm(denominators)``; ``None`` when some cost is not a small
        rational.
        """
        denom = 1
        for c in self.objective:
            frac = Fraction(c).limit_denominator(10**6)
            if abs(float(frac) - c) > 1e-12:
                return None
            denom = math.lcm(denom, frac.denominator)
        return Fraction(1, denom)


def _to_csr(rows: list[tuple[dict[int, float], float]], n: int) -> tuple[sp.csr_matrix, np.ndarray]:
    data, indices, indptr = [], [], [0]
    rhs = np.empty(len(rows))
    for i, (coeffs, b) in enumerate(rows):
        for j in sorted(coeffs):
            if coeffs[j] != 0:
                indices.append(j)
                data.append(float(coeffs[j]))
        indptr.append(len(indices))
        rhs[i] = b
    mat = sp.csr_matrix((np.asarray(data, dtype=float), np.asarray(indices, dtype=np.int64), indptr), shape=(len(rows), n))
    return mat, rhs


# --------------------------------------------------------------------------
# LP text format (the CPLEX-style subset used for cross-checking)

def _fmt(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _linear(coeffs: list[tuple[int, float]], names: list[str], keep_zeros: bool = False) -> str:
    parts: list[str] = []
    for j, c in coeffs:
        if c == 0 and not keep_zeros:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = names[j] if mag == 1 else f"{_fmt(mag)} {names[j]}"
        if not parts:
            parts.append(term if sign == "+" else f"- {term}")
        else:
            parts.append(f"{sign} {term}")
    return " ".join(parts) if parts else "0"


def to_lp_format(model: IlpModel) -> str:
    names = model.names
    lines = [f"\\ {model.name}", "Minimize"]
    # zero terms included so that a reader declares variables in index order
    lines.append(f" obj: {_linear(list(enumerate(model.objective)), names, keep_zeros=True)}")
    lines.append("Subject To")
    for con in model.constraints:
        body = _linear(sorted(con.coeffs.items()), names)
        lines.append(f" {con.name}: {body} {con.sense} {_fmt(con.rhs)}")
    lines.append("Bounds")
    binaries, generals = [], []
    for j, name in enumerate(names):
        lo, hi = model.lower[j], model.upper[j]
        if lo == 0 and hi == 1:
            binaries.append(name)
            continue
        generals.append(name)
        if lo == hi:
            lines.append(f" {name} = {_fmt(lo)}")
        else:
            lines.append(f" {_fmt(lo)} <= {name} <= {_fmt(hi)}")
    if binaries:
        lines.append("Binaries")
        lines.extend(" " + name for name in binaries)
    if generals:
        lines.append("Generals")
        lines.extend(" " + name for name in generals)
    lines.append("End")
    return "\n".join(lines) + "\n"


_TERM_RE = re.compile(r"([+-])?\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.]*)")


def _parse_linear(text: str, index: dict[str, int], model: IlpModel) -> dict[int, float]:
    coeffs: dict[int, float] = {}
    text = text.strip()
    if text == "0":
        return coeffs
    pos = 0
    while pos < len(text):
        match = _TERM_RE.match(text, pos)
        if match is None:
            raise ValueError(f"cannot parse linear expression near {text[pos:]!r}")
        sign, number, name = match.groups()
        value = float(number) if number else 1.0
        if sign == "-":
            value = -value
        if name not in index:
            index[name] = model.add_var(name, 0, 1)
        j = index[name]
        coeffs[j] = coeffs.get(j, 0.0) + value
        pos = match.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return coeffs


def from_lp_format(text: str) -> IlpModel:
    """Parse the subset written by :func:`to_lp_format`.

    Variables default to binary; ``Bounds`` entries override that.
    """
    model = IlpModel()
    index: dict[str, int] = {}
    section = None
    objective: dict[int, float] = {}
    pending: list[tuple[str, str, str, float]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            model.name = line[1:].strip() or model.name
            continue
        key = line.lower()
        if key in ("minimize", "subject to", "bounds", "binaries", "generals", "end"):
            section = key
            continue
        if section == "minimize":
            _, _, expr = line.partition(":")
            objective = _parse_linear(expr, index, model)
        elif section == "subject to":
            name, _, body = line.partition(":")
            match = re.match(r"(.*?)(<=|>=|=)\s*(\S+)$", body)
            if match is None:
                raise ValueError(f"cannot parse constraint {line!r}")
            pending.append((name.strip(), match.group(1), match.group(2), float(match.group(3))))
        elif section == "bounds":
            parts = line.split()
            if len(parts) == 3 and parts[1] == "=":
                name, lo, hi = parts[0], float(parts[2]), float(parts[2])
            elif len(parts) == 5 and parts[1] == "<=" and parts[3] == "<=":
                name, lo, hi = parts[2], float(parts[0]), float(parts[4])
            else:
                raise ValueError(f"cannot parse bound {line!r}")
            if name not in index:
                index[name] = model.add_var(name, 0, 1)
            j = index[name]
            model.lower[j], model.upper[j] = lo, hi
        elif section in ("binaries", "generals"):
            for name in line.split():
                if name not in index:
                    index[name] = model.add_var(name, 0, 1)
    for name, body, sense, rhs in pending:
        model.add_constraint(_parse_linear(body, index, model), sense, rhs, name)
    model.objective = [objective.get(j, 0.0) for j in range(model.num_vars)]
    return model
