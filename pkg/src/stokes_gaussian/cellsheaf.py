"""Cellular sheaves on small regular cell complexes, with exact cohomology.

A cell carries a chart (one of the four quarter-turn trivializations) and a
membership set of exponent indices; its stalk is the corresponding sub-sum of
G-blocks in that chart's coordinates.  Generization maps are chart conversions
restricted to the membership blocks; the cochain complex
C0(vertices) -> C1(edges) -> C2(faces) computes sheaf cohomology.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .linalg import (
    Matrix,
    Subspace,
    sparse_from_blocks,
    sparse_kernel_basis,
    sparse_rank,
)
from .scalars import ONE, ZERO
from .stokes_data import StokesMatrices


class GluingViolation(AssertionError):
    """A transition mapped a present summand onto an absent one."""


class TransitionSystem:
    """Chart conversions built from the full gluing matrices of a dataset.

    conv(a, b) converts chart-a coordinates to chart-b coordinates by the
    forward (counterclockwise) product of S-matrices; multi-step conversions
    are only used where purity makes them path independent.
    """

    def __init__(self, data: StokesMatrices):
        self.layout = data.layout
        self.ranks = data.layout.ranks
        self.slices = data.layout.block_slices()
        self._step = [data.full_s(mu) for mu in range(4)]  # chart mu-1 -> chart mu
        self._cache: dict[tuple[int, int], Optional[Matrix]] = {}

    def conv(self, a: int, b: int) -> Optional[Matrix]:
        a %= 4
        b %= 4
        if a == b:
            return None
        key = (a, b)
        if key not in self._cache:
            M = None
            c = a
            while c != b:
                c = (c + 1) % 4
                M = self._step[c] if M is None else self._step[c] * M
            self._cache[key] = M
        return self._cache[key]


@dataclass
class Cell:
    dim: int
    chart: int
    members: tuple[int, ...]  # sorted exponent indices present at this cell
    label: str = ""


@dataclass
class CellComplex:
    """Cells plus incidence data; edge i runs tail -> head, faces list signed edges."""

    cells: list[Cell]
    edge_ends: dict[int, tuple[int, int]]          # edge cell -> (tail vertex, head vertex)
    face_boundary: dict[int, list[tuple[int, int]]]  # face cell -> [(edge cell, sign)]

    def vertices(self) -> list[int]:
        return [i for i, c in enumerate(self.cells) if c.dim == 0]

    def edges(self) -> list[int]:
        return [i for i, c in enumerate(self.cells) if c.dim == 1]

    def faces(self) -> list[int]:
        return [i for i, c in enumerate(self.cells) if c.dim == 2]

    def euler_characteristic(self) -> int:
        return len(self.vertices()) - len(self.edges()) + len(self.faces())


@dataclass
class CohomologyResult:
    h0: int
    h1: int
    h2: Optional[int] = None
    h0_basis: Optional[list[list]] = None

    @property
    def chi(self) -> int:
        return self.h0 - self.h1 + (self.h2 or 0)


class CellSheaf:
    """A constructible sheaf presented on a CellComplex."""

    def __init__(self, complex: CellComplex, transitions: TransitionSystem,
                 strict_gluing: bool = True):
        self.complex = complex
        self.transitions = transitions
        self.strict_gluing = strict_gluing
        ranks = transitions.ranks
        self.stalk_dims = [sum(ranks[i] for i in c.members) for c in complex.cells]
        self._offsets: dict[str, dict[int, int]] = {}
        self._gen_cache: dict[tuple[int, int], Matrix] = {}

    # -- offsets of each cell inside C^dim ------------------------------------
    def offsets(self, dim: int) -> dict[int, int]:
        key = str(dim)
        if key not in self._offsets:
            off, table = 0, {}
            for i, c in enumerate(self.complex.cells):
                if c.dim == dim:
                    table[i] = off
                    off += self.stalk_dims[i]
            self._offsets[key] = table
        return self._offsets[key]

    def cochain_dim(self, dim: int) -> int:
        return sum(self.stalk_dims[i] for i, c in enumerate(self.complex.cells) if c.dim == dim)

    # -- generization ----------------------------------------------------------
    def gen(self, a: int, b: int) -> Matrix:
        """Generization stalk(a) -> stalk(b) for a in the closure of b."""
        key = (a, b)
        got = self._gen_cache.get(key)
        if got is not None:
            return got
        ca, cb = self.complex.cells[a], self.complex.cells[b]
        tr = self.transitions
        conv = tr.conv(ca.chart, cb.chart)
        cols: list[int] = []
        for i in ca.members:
            cols.extend(range(tr.slices[i].start, tr.slices[i].stop))
        rows: list[int] = []
        memb = set(cb.members)
        for i in cb.members:
            rows.extend(range(tr.slices[i].start, tr.slices[i].stop))
        if conv is None:
            # inclusion of sub-sums
            colpos = {c: j for j, c in enumerate(cols)}
            out = Matrix([[ONE if colpos.get(rr) == j else ZERO
                           for j in range(len(cols))] for rr in rows], ncols=len(cols))
            if self.strict_gluing and not set(ca.members) <= memb:
                raise GluingViolation("membership not monotone under generization "
                                      "(%s -> %s)" % (ca.label, cb.label))
        else:
            if self.strict_gluing:
                for i in range(len(tr.ranks)):
                    if i in memb:
                        continue
                    sl = tr.slices[i]
                    for rr in range(sl.start, sl.stop):
                        for cc in cols:
                            if conv.rows[rr][cc]:
                                raise GluingViolation(
                                    "transition leaks block %d (%s -> %s)" % (i, ca.label, cb.label))
            out = conv.submatrix(rows, cols)
        self._gen_cache[key] = out
        return out

    # -- cochain differentials ---------------------------------------------------
    def d0_sparse(self):
        voff = self.offsets(0)
        eoff = self.offsets(1)
        blocks = []
        for e, (t, h) in self.complex.edge_ends.items():
            if self.stalk_dims[e] == 0:
                continue
            if self.stalk_dims[h]:
                blocks.append((eoff[e], voff[h], self.gen(h, e)))
            if self.stalk_dims[t]:
                blocks.append((eoff[e], voff[t], self.gen(t, e).scale(-ONE)))
        return sparse_from_blocks(blocks, self.cochain_dim(1), self.cochain_dim(0))

    def d1_sparse(self):
        eoff = self.offsets(1)
        foff = self.offsets(2)
        blocks = []
        for f, bdry in self.complex.face_boundary.items():
            if self.stalk_dims[f] == 0:
                continue
            for e, sgn in bdry:
                if self.stalk_dims[e] == 0:
                    continue
                g = self.gen(e, f)
                blocks.append((foff[f], eoff[e], g if sgn > 0 else g.scale(-ONE)))
        return sparse_from_blocks(blocks, self.cochain_dim(2), self.cochain_dim(1))

    def check_d1_d0_zero(self) -> bool:
        d0 = self.d0_sparse()
        d1 = self.d1_sparse()
        # sparse product d1 . d0 must vanish
        for row in d1:
            acc: dict[int, object] = {}
            for e, v in row.items():
                for c, w in d0[e].items():
                    s = acc.get(c, ZERO) + v * w
                    if s:
                        acc[c] = s
                    elif c in acc:
                        del acc[c]
            if acc:
                return False
        return True

    # -- cohomology ----------------------------------------------------------------
    def cohomology(self, with_sections: bool = False) -> CohomologyResult:
        d0 = self.d0_sparse()
        n0 = self.cochain_dim(0)
        n1 = self.cochain_dim(1)
        r0 = sparse_rank(d0)
        if self.complex.face_boundary:
            d1 = self.d1_sparse()
            n2 = self.cochain_dim(2)
            r1 = sparse_rank(d1)
            h0 = n0 - r0
            h1 = (n1 - r1) - r0
            h2 = n2 - r1
        else:
            h0 = n0 - r0
            h1 = n1 - r0
            h2 = None
        basis = None
        if with_sections:
            basis = sparse_kernel_basis(d0, n0)
        return CohomologyResult(h0=h0, h1=h1, h2=h2, h0_basis=basis)

    def sections(self) -> list[list]:
        """Basis of H^0 as vectors in C^0 coordinates."""
        return sparse_kernel_basis(self.d0_sparse(), self.cochain_dim(0))

    # -- subcomplex restriction ------------------------------------------------------
    def restrict(self, keep: Sequence[int]) -> "CellSheaf":
        """Restriction to a closed subcomplex given by a cell subset."""
        keepset = set(keep)
        index = {old: new for new, old in enumerate(sorted(keepset))}
        cells = [self.complex.cells[old] for old in sorted(keepset)]
        edge_ends = {}
        for e, (t, h) in self.complex.edge_ends.items():
            if e in keepset:
                if t not in keepset or h not in keepset:
                    raise ValueError("subset is not a closed subcomplex")
                edge_ends[index[e]] = (index[t], index[h])
        face_boundary = {}
        for f, bdry in self.complex.face_boundary.items():
            if f in keepset:
                if any(e not in keepset for e, _ in bdry):
                    raise ValueError("subset is not a closed subcomplex")
                face_boundary[index[f]] = [(index[e], s) for e, s in bdry]
        sub = CellComplex(cells=cells, edge_ends=edge_ends, face_boundary=face_boundary)
        out = CellSheaf(sub, self.transitions, strict_gluing=self.strict_gluing)
        return out

    def section_value_at(self, section: list, cell: int) -> list:
        """Value of an H^0 section (C^0 coordinates) at any cell."""
        c = self.complex.cells[cell]
        if c.dim == 0:
            off = self.offsets(0)[cell]
            return section[off: off + self.stalk_dims[cell]]
        if c.dim == 1:
            tail, _ = self.complex.edge_ends[cell]
            off = self.offsets(0)[tail]
            v = section[off: off + self.stalk_dims[tail]]
            return self.gen(tail, cell).apply(v)
        raise ValueError("evaluate sections on vertices or edges")


def quotient_sheaf(big: CellSheaf, small: CellSheaf) -> CellSheaf:
    """Quotient big/small for memberwise-included sheaves on one complex."""
    if big.complex is not small.complex and len(big.complex.cells) != len(small.complex.cells):
        raise ValueError("quotient needs sheaves on the same complex")
    cells = []
    for cb, cs in zip(big.complex.cells, small.complex.cells):
        if not set(cs.members) <= set(cb.members):
            raise ValueError("not a subsheaf memberwise")
        members = tuple(i for i in cb.members if i not in set(cs.members))
        cells.append(Cell(dim=cb.dim, chart=cb.chart, members=members, label=cb.label + "/q"))
    quot = CellComplex(cells=cells, edge_ends=dict(big.complex.edge_ends),
                       face_boundary={f: list(b) for f, b in big.complex.face_boundary.items()})
    # quotient generizations drop the sub-blocks: no strict leak check
    return CellSheaf(quot, big.transitions, strict_gluing=False)


def inclusion_chain_map(small: CellSheaf, big: CellSheaf, dim: int):
    """Sparse matrix C^dim(small) -> C^dim(big) for memberwise inclusion."""
    soff = small.offsets(dim)
    boff = big.offsets(dim)
    tr = big.transitions
    blocks = []
    for cell, so in soff.items():
        cs = small.complex.cells[cell]
        cb = big.complex.cells[cell]
        if cs.chart != cb.chart:
            raise ValueError("inclusion must preserve charts")
        if small.stalk_dims[cell] == 0:
            continue
        brows = []
        for i in cb.members:
            brows.extend(range(tr.slices[i].start, tr.slices[i].stop))
        scols = []
        for i in cs.members:
            scols.extend(range(tr.slices[i].start, tr.slices[i].stop))
        M = Matrix([[ONE if sc == br else ZERO for sc in scols] for br in brows],
                   ncols=len(scols))
        blocks.append((boff[cell], so, M))
    return sparse_from_blocks(blocks, big.cochain_dim(dim), small.cochain_dim(dim))
