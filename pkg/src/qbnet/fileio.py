"""Text formats: net files, TSV matrices, POM files and ensemble files.

Net file::

    # comment
    [node f]
    states = 2x2
    parents = a, x
    matrix =
    0.7071 0 0 0.7071
    ...

Each matrix row is one node state; columns run over joint parent states,
first parent slowest.  Complex literals look like ``1``, ``-0.5``,
``0.5+0.25i`` or ``1e-3-2i``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DimensionMismatch, FileFormatError, NetStructureError
from .infotheory import Ensemble
from .measure import Pom
from .netcore import NodeSpec, QbNet

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^([+-]?{_NUM})(?:([+-]{_NUM})i)?$")
_NAME = r"[A-Za-z_][A-Za-z0-9_']*"
_HEADER = re.compile(rf"^\[\s*node\s+({_NAME})\s*\]$")
_KEY = re.compile(r"^(states|parents|matrix)\s*=\s*(.*)$")
_DIM_HEADER = re.compile(r"^dim\s+(\d+)\s*,\s*(outcomes|signals)\s+(\d+)$")


def parse_complex(token: str, line: int | None = None, column: int | None = None) -> complex:
    m = _COMPLEX.match(token)
    if not m:
        raise FileFormatError(f"malformed complex literal {token!r}", line, column)
    re_part = float(m.group(1))
    im_part = float(m.group(2)) if m.group(2) else 0.0
    return complex(re_part, im_part)


def format_complex(z: complex) -> str:
    """Shortest round-tripping literal."""
    z = complex(z)
    re_s = repr(float(z.real))
    if z.imag == 0:
        return re_s
    im_s = repr(float(z.imag))
    return f"{re_s}{'' if im_s.startswith('-') else '+'}{im_s}i"


def _tokens(text: str) -> list[tuple[str, int]]:
    """Whitespace-separated tokens with their 1-based columns."""
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", text)]


@dataclass
class _Block:
    name: str
    line: int
    states: tuple[int, ...] | None = None
    parents: tuple[str, ...] | None = None
    rows: list | None = None
    row_lines: list | None = None


def parse_net(text: str) -> QbNet:
    blocks: list[_Block] = []
    cur: _Block | None = None
    in_matrix = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        col0 = len(line) - len(line.lstrip()) + 1
        if stripped.startswith("["):
            m = _HEADER.match(stripped)
            if not m:
                raise FileFormatError(f"bad node header {stripped!r}", ln, col0)
            cur = _Block(m.group(1), ln)
            blocks.append(cur)
            in_matrix = False
            continue
        if cur is None:
            raise FileFormatError("content before the first [node ...] header", ln, col0)
        m = _KEY.match(stripped)
        if m:
            key, value = m.group(1), m.group(2).strip()
            vcol = col0 + stripped.index(value) if value else col0 + len(stripped)
            if key == "states":
                cur.states = _parse_states(value, ln, vcol)
                in_matrix = False
            elif key == "parents":
                cur.parents = tuple(p.strip() for p in value.split(",") if p.strip())
                for p in cur.parents:
                    if not re.fullmatch(_NAME, p):
                        raise FileFormatError(f"bad parent name {p!r}", ln, vcol)
                in_matrix = False
            else:
                cur.rows, cur.row_lines = [], []
                in_matrix = True
                if value:
                    _add_row(cur, value, ln, vcol)
            continue
        if in_matrix:
            _add_row(cur, stripped, ln, col0)
            continue
        raise FileFormatError(f"unexpected line {stripped!r}", ln, col0)
    if not blocks:
        raise FileFormatError("no [node ...] blocks found", 1, 1)
    specs, mats = [], {}
    for b in blocks:
        if b.states is None:
            raise FileFormatError(f"node {b.name!r} has no 'states' line", b.line, 1)
        if b.rows is None or not b.rows:
            raise FileFormatError(f"node {b.name!r} has no matrix", b.line, 1)
        widths = {len(r) for r in b.rows}
        if len(widths) != 1:
            raise FileFormatError(f"node {b.name!r}: matrix rows have different lengths", b.row_lines[-1], 1)
        try:
            specs.append(NodeSpec(b.name, b.states, b.parents or ()))
        except NetStructureError as exc:
            raise FileFormatError(str(exc), b.line, 1) from exc
        mats[b.name] = np.array(b.rows, dtype=complex)
    try:
        return QbNet(specs, mats)
    except (NetStructureError, DimensionMismatch) as exc:
        raise FileFormatError(str(exc), 1, 1) from exc


def _parse_states(value: str, line: int, col: int) -> tuple[int, ...]:
    parts = [p.strip() for p in re.split(r"[xX]", value)]
    if not parts or any(not p.isdigit() or int(p) < 1 for p in parts):
        raise FileFormatError(f"bad state dimensions {value!r}", line, col)
    return tuple(int(p) for p in parts)


def _add_row(block: _Block, text: str, line: int, col: int) -> None:
    row = [parse_complex(tok, line, col + c - 1) for tok, c in _tokens(text)]
    block.rows.append(row)
    block.row_lines.append(line)


def format_net(net: QbNet) -> str:
    out = []
    for spec in net.dag.nodes:
        out.append(f"[node {spec.name}]")
        out.append("states = " + "x".join(str(d) for d in spec.state_shape))
        out.append(("parents = " + ", ".join(spec.parents)).rstrip())
        out.append("matrix =")
        for row in net.matrices[spec.name]:
            out.append(" ".join(format_complex(z) for z in row))
        out.append("")
    return "\n".join(out)


def read_net(path) -> QbNet:
    return parse_net(Path(path).read_text(encoding="utf-8"))


def write_net(net: QbNet, path) -> None:
    Path(path).write_text(format_net(net), encoding="utf-8", newline="\n")


# TSV matrices ------------------------------------------------------------


def format_matrix_tsv(m) -> str:
    """Full-precision ``row col re im`` lines; :func:`density.matrix_dump` is the 9-decimal display form."""
    m = np.asarray(m, dtype=complex)
    return "".join(f"{i}\t{j}\t{float(z.real)!r}\t{float(z.imag)!r}\n" for (i, j), z in np.ndenumerate(m))


def _parse_tsv_entries(lines: Iterable[tuple[int, str]], d: int) -> np.ndarray:
    m = np.full((d, d), np.nan, dtype=complex)
    for ln, text in lines:
        parts = text.split()
        if len(parts) != 4:
            raise FileFormatError("matrix line needs 'row col re im'", ln, 1)
        try:
            i, j = int(parts[0]), int(parts[1])
            z = complex(float(parts[2]), float(parts[3]))
        except ValueError as exc:
            raise FileFormatError(f"bad matrix entry {text.strip()!r}", ln, 1) from exc
        if not (0 <= i < d and 0 <= j < d):
            raise FileFormatError(f"index ({i}, {j}) outside a {d}x{d} matrix", ln, 1)
        m[i, j] = z
    if np.isnan(m.real).any():
        raise FileFormatError(f"matrix is missing entries (expected {d * d})")
    return m


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if s:
            out.append((ln, s))
    return out


def parse_matrix_tsv(text: str) -> np.ndarray:
    lines = _content_lines(text)
    n = len(lines)
    d = int(round(n**0.5))
    if d * d != n or n == 0:
        raise FileFormatError(f"{n} entries do not form a square matrix", lines[-1][0] if lines else 1, 1)
    return _parse_tsv_entries(lines, d)


def _header(lines, kind: str) -> tuple[int, int]:
    if not lines:
        raise FileFormatError("empty file", 1, 1)
    ln, text = lines[0]
    m = _DIM_HEADER.match(text)
    if not m or m.group(2) != kind:
        raise FileFormatError(f"expected header 'dim d, {kind} n'", ln, 1)
    return int(m.group(1)), int(m.group(3))


def _matrices(lines, d: int, n: int) -> list[np.ndarray]:
    if len(lines) != n * d * d:
        last = lines[-1][0] if lines else 0
        raise FileFormatError(f"expected {n * d * d} matrix lines, found {len(lines)}", last, 1)
    return [_parse_tsv_entries(lines[k * d * d : (k + 1) * d * d], d) for k in range(n)]


def parse_pom(text: str) -> Pom:
    lines = _content_lines(text)
    d, m = _header(lines, "outcomes")
    return Pom(d, tuple(_matrices(lines[1:], d, m)))


def format_pom(p: Pom) -> str:
    return f"dim {p.dim}, outcomes {p.outcomes}\n" + "\n".join(format_matrix_tsv(f) for f in p.elements)


def parse_ensemble(text: str) -> Ensemble:
    lines = _content_lines(text)
    d, n = _header(lines, "signals")
    if len(lines) < 2:
        raise FileFormatError("missing weight line", lines[0][0], 1)
    ln, wline = lines[1]
    try:
        weights = [float(w) for w in wline.replace(",", " ").split()]
    except ValueError as exc:
        raise FileFormatError(f"bad weight line {wline!r}", ln, 1) from exc
    if len(weights) != n:
        raise FileFormatError(f"expected {n} weights, found {len(weights)}", ln, 1)
    return Ensemble(np.array(weights), tuple(_matrices(lines[2:], d, n)))


def format_ensemble(e: Ensemble) -> str:
    head = f"dim {e.dim}, signals {e.size}\n" + " ".join(repr(float(w)) for w in e.weights) + "\n"
    return head + "\n".join(format_matrix_tsv(s) for s in e.signals)
