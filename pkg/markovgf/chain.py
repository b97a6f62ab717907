#!/usr/bin/env python3
"""
Chain Ingestion

Parses finite transition matrices from:
- JSON documents: {"states": [...], "matrix": [[<rational-string>, ...], ...]}
- CSV grids: square numeric grid, states auto-named s0..s{d-1}

Rows are proven stochastic by exact summation and the positive-entry
digraph must be strongly connected.
"""

import csv
import io
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union
import logging

import numpy as np

from .errors import (
    ChainParseError,
    DimensionMismatch,
    DuplicateStateLabel,
    NegativeEntry,
    NotIrreducible,
    NotStochastic,
    UnknownState,
)
from .exactalg import Matrix, format_rational, parse_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Chain:
    """Row-stochastic matrix over Q with ordered state labels.

    Construction checks shape, labels, signs and row sums; irreducibility
    is checked by check_irreducible (make_chain/parse_chain call it).
    """
    states: tuple[str, ...]
    matrix: Matrix

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        matrix = tuple(tuple(Fraction(c) for c in row) for row in self.matrix)
        object.__setattr__(self, 'states', states)
        object.__setattr__(self, 'matrix', matrix)

        d = len(states)
        if d < 2:
            raise DimensionMismatch(f"need at least 2 states, got {d}", field="states")
        if len(matrix) != d:
            raise DimensionMismatch(
                f"{len(matrix)} rows for {d} states", field="matrix"
            )
        for i, row in enumerate(matrix):
            if len(row) != d:
                raise DimensionMismatch(
                    f"row has {len(row)} entries, expected {d}", field=f"matrix[{i}]"
                )
        seen = set()
        for s in states:
            if s in seen:
                raise DuplicateStateLabel(s)
            seen.add(s)
        for i, row in enumerate(matrix):
            for j, value in enumerate(row):
                if value < 0:
                    raise NegativeEntry(i, j, value)
            total = sum(row, Fraction(0))
            if total != 1:
                raise NotStochastic(i, total)

    @property
    def d(self) -> int:
        return len(self.states)

    def index(self, state) -> int:
        try:
            return self.states.index(str(state))
        except ValueError:
            raise UnknownState(state) from None

    def label(self, i: int) -> str:
        return self.states[i]

    def entry(self, u, v) -> Fraction:
        return self.matrix[self.index(u)][self.index(v)]


@dataclass(frozen=True)
class SubmatrixView:
    """M^(v) (state deleted) or M^{*v} (column zeroed) of a base chain."""
    base: Chain
    state: str
    kind: str  # 'deleted' or 'zeroed'

    def __post_init__(self):
        if self.kind not in ('deleted', 'zeroed'):
            raise ValueError(f"kind must be 'deleted' or 'zeroed', got {self.kind!r}")
        object.__setattr__(self, 'state', self.base.label(self.base.index(self.state)))

    @property
    def matrix(self) -> Matrix:
        if self.kind == 'deleted':
            return delete_state(self.base, self.state)
        return zero_column(self.base, self.state)


def strongly_connected_components(matrix: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Tarjan's algorithm on the digraph {(a, b) : M[a][b] > 0}.

    Components come out in reverse topological order; members are sorted.
    """
    n = len(matrix)

    def neighbours(a):
        return [b for b in range(n) if matrix[a][b] > 0]

    def strongconnect(v) -> Iterator[set[int]]:
        index[v] = lowlink[v] = next(indices)
        stack.append(v)
        on_stack.add(v)

        for w in neighbours(v):
            if w not in index:
                yield from strongconnect(w)
                lowlink[v] = min(lowlink[v], lowlink[w])
            elif w in on_stack:
                lowlink[v] = min(lowlink[v], index[w])

        if lowlink[v] == index[v]:
            scc = set()
            while True:
                w = stack.pop()
                on_stack.discard(w)
                scc.add(w)
                if w == v:
                    break
            yield scc

    indices = itertools.count()
    stack: list[int] = []
    on_stack: set[int] = set()
    index: dict[int, int] = {}
    lowlink: dict[int, int] = {}
    components = []
    for v in range(n):
        if v not in index:
            components.extend(sorted(scc) for scc in strongconnect(v))
    return components


def check_irreducible(c: Chain) -> bool:
    """Succeeds iff one strongly connected component covers every state."""
    components = strongly_connected_components(c.matrix)
    if len(components) != 1:
        labelled = sorted(
            ([c.states[i] for i in comp] for comp in components),
            key=lambda comp: c.states.index(comp[0]),
        )
        logger.debug(f"Reducible chain, components: {labelled}")
        raise NotIrreducible(labelled)
    return True


def make_chain(states: Sequence, matrix: Sequence[Sequence]) -> Chain:
    """Build and fully validate a Chain (stochastic and irreducible)."""
    chain = Chain(tuple(states), tuple(tuple(row) for row in matrix))
    check_irreducible(chain)
    return chain


def delete_state(c: Chain, v) -> Matrix:
    """M^(v): row and column of v removed, remaining order preserved."""
    k = c.index(v)
    return tuple(
        tuple(x for j, x in enumerate(row) if j != k)
        for i, row in enumerate(c.matrix) if i != k
    )


def zero_column(c: Chain, v) -> Matrix:
    """M^{*v}: copy of M with column v set to zero."""
    k = c.index(v)
    return tuple(
        tuple(Fraction(0) if j == k else x for j, x in enumerate(row))
        for row in c.matrix
    )


# documents

def _parse_entry(value, field: str) -> Fraction:
    if isinstance(value, float):
        # JSON floats are read through their shortest decimal literal
        value = repr(value)
    try:
        return parse_rational(value)
    except (ValueError, TypeError):
        raise ChainParseError(f"not a rational number: {value!r}", field=field) from None


def _parse_json(document: str) -> tuple[list[str], list[list[Fraction]]]:
    try:
        data = json.loads(document)
    except json.JSONDecodeError as e:
        raise ChainParseError(
            f"invalid JSON: {e.msg}", field=f"line {e.lineno}, column {e.colno}"
        ) from None
    if not isinstance(data, dict) or 'matrix' not in data:
        raise ChainParseError("expected an object with a 'matrix' field")
    raw = data['matrix']
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise ChainParseError("matrix must be a list of rows", field="matrix")
    matrix = [
        [_parse_entry(x, f"matrix[{i}][{j}]") for j, x in enumerate(row)]
        for i, row in enumerate(raw)
    ]
    states = data.get('states')
    if states is None:
        states = [f"s{i}" for i in range(len(matrix))]
    if not isinstance(states, list):
        raise ChainParseError("states must be a list of labels", field="states")
    if len(states) != len(matrix):
        raise DimensionMismatch(
            f"{len(states)} state labels for {len(matrix)} rows", field="states"
        )
    return [str(s) for s in states], matrix


def _parse_csv(document: str) -> tuple[list[str], list[list[Fraction]]]:
    matrix = []
    reader = csv.reader(io.StringIO(document))
    for line_num, row in enumerate(reader, 1):
        cells = [cell.strip() for cell in row]
        if not cells or all(cell == "" for cell in cells):
            continue
        matrix.append([
            _parse_entry(cell, f"line {line_num}, column {j + 1}")
            for j, cell in enumerate(cells)
        ])
    return [f"s{i}" for i in range(len(matrix))], matrix


def parse_chain(document: str, fmt: str = "json") -> Chain:
    """Parse and validate a chain document."""
    if fmt == "json":
        states, matrix = _parse_json(document)
    elif fmt == "csv":
        states, matrix = _parse_csv(document)
    else:
        raise ChainParseError(f"unknown chain format {fmt!r}")
    chain = make_chain(states, matrix)
    logger.debug(f"Parsed chain with d={chain.d}")
    return chain


def load_chain(path: Union[str, Path], fmt: Optional[str] = None) -> Chain:
    """Read a chain file; the format defaults to the file suffix."""
    path = Path(path).expanduser()
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "json"
    logger.info(f"Loading chain from: {path}")
    try:
        document = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ChainParseError(f"cannot read {path}: {e.strerror}") from None
    return parse_chain(document, fmt)


def chain_to_dict(c: Chain) -> dict:
    return {
        "states": list(c.states),
        "matrix": [[format_rational(x) for x in row] for row in c.matrix],
    }


def serialize_chain(c: Chain, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(chain_to_dict(c), indent=2) + "\n"
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        for row in c.matrix:
            writer.writerow(format_rational(x) for x in row)
        return out.getvalue()
    raise ValueError(f"unknown chain format {fmt!r}")


def random_chain(d: int, seed: int, max_weight: int = 3) -> Chain:
    """Seeded irreducible chain with small rational entries.

    Each row gets integer weights in [0, max_weight] plus one unit on the
    cycle edge i -> i+1, which makes the digraph strongly connected.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(d):
        weights = [int(w) for w in rng.integers(0, max_weight + 1, size=d)]
        weights[(i + 1) % d] += 1
        total = sum(weights)
        rows.append([Fraction(w, total) for w in weights])
    return make_chain([str(i + 1) for i in range(d)], rows)
