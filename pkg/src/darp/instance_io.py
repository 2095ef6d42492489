"""Reading and writing benchmark instance files, plus the best-known-solution registry.

File layout (the standard DARP benchmark distribution)::

    m n T Q L
    id x y d q e l      # one line per vertex, depot first

A trailing copy of the depot with id ``2n+1`` is tolerated and ignored.
"""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

from .model import Instance, Vertex


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class HeaderError(ParseError):
    pass


class VertexCountError(ParseError):
    pass


class FieldError(ParseError):
    pass


class DuplicateVertexError(ParseError):
    pass


def _number(token: str, lineno: int, integral: bool = False):
    try:
        value = float(token)
    except ValueError:
        raise FieldError(f"non-numeric field {token!r}", lineno) from None
    if integral:
        if value != int(value):
            raise FieldError(f"expected an integer, got {token!r}", lineno)
        return int(value)
    return value


def parse_instance(text: str, name: str = "") -> Instance:
    lines = [(no, line.split()) for no, line in enumerate(text.splitlines(), start=1)]
    lines = [(no, toks) for no, toks in lines if toks]
    if not lines:
        raise HeaderError("empty instance file", 1)

    head_no, head = lines[0]
    if len(head) != 5:
        raise HeaderError(f"header needs 5 fields 'm n T Q L', got {len(head)}", head_no)
    m = _number(head[0], head_no, integral=True)
    n = _number(head[1], head_no, integral=True)
    max_duration = _number(head[2], head_no)
    capacity = _number(head[3], head_no)
    max_ride = _number(head[4], head_no)
    if m < 1 or n < 0:
        raise HeaderError(f"bad fleet size {m} or request count {n}", head_no)
    if capacity == int(capacity):
        capacity = int(capacity)

    vertices: Dict[int, Vertex] = {}
    for lineno, toks in lines[1:]:
        if len(toks) < 7:
            raise FieldError(f"vertex line needs 7 fields 'id x y d q e l', got {len(toks)}", lineno)
        vid = _number(toks[0], lineno, integral=True)
        x, y, d = (_number(t, lineno) for t in toks[1:4])
        q = _number(toks[4], lineno, integral=True)
        e, l = _number(toks[5], lineno), _number(toks[6], lineno)
        if vid == 2 * n + 1 and lineno == lines[-1][0]:
            continue  # trailing duplicate depot
        if vid in vertices:
            raise DuplicateVertexError(f"duplicate vertex id {vid}", lineno)
        if not 0 <= vid <= 2 * n:
            raise VertexCountError(f"vertex id {vid} outside 0..{2 * n} for {n} requests", lineno)
        vertices[vid] = Vertex(vid, x, y, d, q, e, l)

    if len(vertices) != 2 * n + 1:
        raise VertexCountError(
            f"header declares {n} requests ({2 * n + 1} vertices), file has {len(vertices)}",
            lines[-1][0],
        )
    ordered = [vertices[i] for i in range(2 * n + 1)]
    try:
        return Instance(
            n_requests=n,
            n_vehicles=m,
            vehicle_capacity=capacity,
            max_route_duration=max_duration,
            max_ride_time=max_ride,
            vertices=ordered,
            name=name,
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def read_instance(path: Union[str, Path]) -> Instance:
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not ASCII text") from exc
    return parse_instance(text, name=path.stem)


def _num(value) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def format_instance(instance: Instance) -> str:
    out = [
        " ".join(
            _num(v)
            for v in (
                instance.n_vehicles,
                instance.n_requests,
                instance.max_route_duration,
                instance.vehicle_capacity,
                instance.max_ride_time,
            )
        )
    ]
    for v in instance.vertices:
        out.append(
            " ".join(
                [
                    str(v.id),
                    _num(v.x),
                    _num(v.y),
                    _num(v.service_duration),
                    str(v.load_change),
                    _num(v.window_earliest),
                    _num(v.window_latest),
                ]
            )
        )
    return "\n".join(out) + "\n"


def write_instance(instance: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(format_instance(instance), encoding="ascii")


def gap_percent(cost: float, bks: float) -> float:
    if bks <= 0:
        raise ValueError(f"best known cost must be positive, got {bks}")
    return (cost - bks) / bks * 100.0


DEFAULT_BKS = {
    "R1a": 190.02, "R2a": 301.34, "R3a": 532.00, "R4a": 570.25, "R5a": 626.93,
    "R6a": 785.26, "R7a": 291.71, "R8a": 487.84, "R9a": 658.31, "R10a": 851.82,
    "R1b": 164.46, "R2b": 295.66, "R3b": 484.83, "R4b": 529.33, "R5b": 577.29,
    "R6b": 730.69, "R7b": 248.21, "R8b": 458.73, "R9b": 593.49, "R10b": 785.68,
}  # fmt: skip

BKS_ENV_VAR = "DARP_BKS_FILE"

_PR_NAME = re.compile(r"^pr(\d\d)$", re.IGNORECASE)
_R_NAME = re.compile(r"^r(\d+)([ab])$", re.IGNORECASE)


def canonical_name(name: str) -> str:
    """Map file stems to registry keys: ``pr01``..``pr10`` are R1a..R10a, ``pr11``..``pr20`` R1b..R10b."""
    stem = Path(name).stem
    m = _PR_NAME.match(stem)
    if m:
        k = int(m.group(1))
        if 1 <= k <= 10:
            return f"R{k}a"
        if 11 <= k <= 20:
            return f"R{k - 10}b"
    m = _R_NAME.match(stem)
    if m:
        return f"R{int(m.group(1))}{m.group(2).lower()}"
    return stem


class BksRegistry:
    def __init__(self, costs: Optional[Dict[str, float]] = None):
        self._costs: Dict[str, float] = {}
        for name, cost in (costs or {}).items():
            self.add(name, cost)

    def add(self, name: str, cost: float) -> None:
        if cost <= 0:
            raise ValueError(f"{name}: best known cost must be positive")
        self._costs[canonical_name(name)] = float(cost)

    def get(self, name: str) -> Optional[float]:
        return self._costs.get(canonical_name(name))

    def __contains__(self, name: str) -> bool:
        return canonical_name(name) in self._costs

    def __len__(self):
        return len(self._costs)

    def items(self) -> Iterable:
        return self._costs.items()

    @classmethod
    def default(cls) -> "BksRegistry":
        return cls(DEFAULT_BKS)

    @classmethod
    def parse(cls, text: str, base: Optional["BksRegistry"] = None) -> "BksRegistry":
        reg = cls(dict(base.items()) if base is not None else None)
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("registry lines are 'name cost'", lineno)
            reg.add(parts[0], _number(parts[1], lineno))
        return reg

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None) -> "BksRegistry":
        """Defaults, overridden by ``path`` or the file named in ``$DARP_BKS_FILE``."""
        path = path or os.environ.get(BKS_ENV_VAR)
        base = cls.default()
        if not path:
            return base
        return cls.parse(Path(path).read_text(), base=base)
