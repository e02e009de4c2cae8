"""Finite-dimensional algebras: path algebras with relations and
structure-constant algebras.

Every algebra carries a complete set of orthogonal idempotents (the
"vertices") and a basis in which each element lives in one block
``e_tgt A e_src``.  Modules are graded by the vertices and a basis element of
block (src, tgt) acts as a linear map from the src-space to the tgt-space.

Multiplication follows the left-module convention ``rho(x*y) = rho(x) rho(y)``.
Paths are written left to right (``a b`` traverses a first, then b), so in a
path algebra the product ``x*y`` is the path "y then x".
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..exactlin import Coordinatizer, Field, Mat, QQ, Subspace, kernel_vectors


class NonAdmissible(ValueError):
    pass


class AlgebraMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Quiver:
    vertices: tuple
    arrows: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(Arrow(*a) if not isinstance(a, Arrow) else a for a in self.arrows))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertex names must be unique")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise ValueError("arrow names must be unique")
        if set(names) & set(self.vertices):
            raise ValueError("arrow and vertex names must differ")
        for a in self.arrows:
            if a.source not in self.vertices or a.target not in self.vertices:
                raise ValueError(f"arrow {a.name} has an undeclared endpoint")

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise KeyError(name)

    def opposite(self) -> "Quiver":
        return Quiver(self.vertices, tuple(Arrow(a.name, a.target, a.source) for a in self.arrows))

    def is_acyclic(self) -> bool:
        return self.longest_path() is not None

    def longest_path(self) -> Optional[int]:
        """Length of the longest path, or None if the quiver has an oriented cycle."""
        index = {v: i for i, v in enumerate(self.vertices)}
        out = {v: [] for v in self.vertices}
        indeg = {v: 0 for v in self.vertices}
        for a in self.arrows:
            out[a.source].append(a.target)
            indeg[a.target] += 1
        order = []
        stack = sorted((v for v in self.vertices if indeg[v] == 0), key=index.get)
        while stack:
            v = stack.pop()
            order.append(v)
            for w in out[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    stack.append(w)
        if len(order) != len(self.vertices):
            return None
        depth = {v: 0 for v in self.vertices}
        for v in order:
            for w in out[v]:
                depth[w] = max(depth[w], depth[v] + 1)
        return max(depth.values(), default=0)


@dataclass(frozen=True)
class Relation:
    """A linear combination of parallel paths; each path is a tuple of arrow names."""

    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((c, tuple(p)) for c, p in self.terms))


@dataclass(frozen=True)
class BasisElement:
    name: str
    src: int
    tgt: int
    path: Optional[tuple] = None  # arrow indices for path algebras (empty for idempotents)


class FDAlgebra:
    """A finite-dimensional algebra with block-adapted basis and structure constants."""

    def __init__(self, field: Field, vertex_names, basis, table, idempotents,
                 generators=None, kind="structure", name="", quiver=None, relations=(),
                 radical=None, check=True):
        self.field = field
        self.vertex_names = tuple(vertex_names)
        self.basis = tuple(basis)
        self.table = dict(table)  # (i, j) -> tuple of (k, coef), only nonzero products
        self.idempotents = tuple(idempotents)
        self.kind = kind
        self.name = name
        self.quiver = quiver
        self.relations = tuple(relations)
        idem = set(self.idempotents)
        if generators is None:
            generators = [k for k in range(len(self.basis)) if k not in idem]
        self.generators = tuple(generators)
        self._opposite = None
        self._op_gen_map = None
        self._radical = radical
        self._blocks = {}
        for k, b in enumerate(self.basis):
            self._blocks.setdefault((b.src, b.tgt), []).append(k)
        if check:
            self._check()

    # -- basic data ---------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def num_vertices(self) -> int:
        return len(self.vertex_names)

    def __repr__(self):
        return f"FDAlgebra({self.name or self.kind}, dim={self.dim}, vertices={self.num_vertices})"

    def vertex_index(self, name) -> int:
        if isinstance(name, int):
            return name
        return self.vertex_names.index(str(name))

    def block(self, src: int, tgt: int) -> list:
        """Basis indices of the block e_tgt A e_src."""
        return self._blocks.get((src, tgt), [])

    def basis_index(self, name: str) -> int:
        for k, b in enumerate(self.basis):
            if b.name == name:
                return k
        raise KeyError(name)

    def mul_basis(self, i: int, j: int):
        return self.table.get((i, j), ())

    def mul(self, x: Sequence, y: Sequence) -> list:
        """Product of two elements given as coefficient vectors."""
        f = self.field
        out = [f.zero] * self.dim
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                for k, c in self.table.get((i, j), ()):
                    out[k] += a * b * c
        if f.p:
            out = [v % f.p for v in out]
        return out

    def unit(self) -> list:
        f = self.field
        v = [f.zero] * self.dim
        for e in self.idempotents:
            v[e] = f.one
        return v

    def _check(self):
        f = self.field
        n = self.dim
        for v, e in enumerate(self.idempotents):
            b = self.basis[e]
            if (b.src, b.tgt) != (v, v):
                raise ValueError("idempotent is not in its diagonal block")
        one = self.unit()
        for i in range(n):
            ei = [f.zero] * n
            ei[i] = f.one
            if self.mul(one, ei) != ei or self.mul(ei, one) != ei:
                raise ValueError(f"unit does not act as identity on {self.basis[i].name}")
        for (i, j), prod in self.table.items():
            if self.basis[i].src != self.basis[j].tgt:
                raise ValueError("nonzero product of non-composable basis elements")
            for k, _ in prod:
                if (self.basis[k].src, self.basis[k].tgt) != (self.basis[j].src, self.basis[i].tgt):
                    raise ValueError("product leaves its block")
        for i in range(n):
            for j in range(n):
                if self.basis[i].src != self.basis[j].tgt:
                    continue
                ij = self.table.get((i, j), ())
                for k in range(n):
                    if self.basis[j].src != self.basis[k].tgt:
                        continue
                    left = _sparse_mul_right(self, ij, k)
                    right = _sparse_mul_left(self, i, self.table.get((j, k), ()))
                    if left != right:
                        raise ValueError("multiplication is not associative")

    # -- radical ------------------------------------------------------
    def radical_basis(self) -> list:
        """Basis of the Jacobson radical as (src, tgt, coefficient vector), block by block."""
        if self._radical is None:
            if self.kind == "path":
                rad = []
                for k, b in enumerate(self.basis):
                    if b.path:
                        v = [self.field.zero] * self.dim
                        v[k] = self.field.one
                        rad.append((b.src, b.tgt, v))
                self._radical = rad
            else:
                self._radical = _radical_by_trace_form(self)
        return self._radical

    # -- opposite -----------------------------------------------------
    def opposite(self) -> "FDAlgebra":
        if self._opposite is None:
            if self.kind == "path":
                op = build_path_algebra(
                    self.quiver.opposite(),
                    [Relation(tuple((c, tuple(reversed(p))) for c, p in r.terms)) for r in self.relations],
                    self.field,
                    name=(self.name + "^op") if self.name else "",
                )
                gmap = {}
                for k in self.generators:
                    gmap[k] = op.basis_index(self.basis[k].name)
            else:
                basis = [BasisElement(b.name, b.tgt, b.src) for b in self.basis]
                table = {(j, i): prod for (i, j), prod in self.table.items()}
                rad = None
                if self._radical is not None:
                    rad = [(t, s, v) for s, t, v in self._radical]
                op = FDAlgebra(self.field, self.vertex_names, basis, table, self.idempotents,
                               generators=self.generators, kind="structure",
                               name=(self.name + "^op") if self.name else "", radical=rad,
                               check=False)
                gmap = {k: k for k in self.generators}
            op._opposite = self
            op._op_gen_map = {v: k for k, v in gmap.items()}
            self._opposite = op
            self._op_gen_map = gmap
        return self._opposite

    def opposite_generator(self, k: int) -> int:
        self.opposite()
        return self._op_gen_map[k]


def _sparse_mul_right(alg, vec, k):
    out = {}
    for i, a in vec:
        for m, c in alg.table.get((i, k), ()):
            out[m] = out.get(m, 0) + a * c
    return _clean(alg.field, out)


def _sparse_mul_left(alg, i, vec):
    out = {}
    for j, a in vec:
        for m, c in alg.table.get((i, j), ()):
            out[m] = out.get(m, 0) + a * c
    return _clean(alg.field, out)


def _clean(field, d):
    p = field.p
    res = {}
    for k, v in d.items():
        if p:
            v %= p
        if v:
            res[k] = v
    return res


def _radical_by_trace_form(alg: FDAlgebra) -> list:
    """Radical via the trace form of the regular representation.

    x lies in the radical iff Tr(L_{xy}) = 0 for all y; valid in characteristic
    zero and in characteristic p > dim A (Newton identities).
    """
    f = alg.field
    if f.p and f.p <= alg.dim:
        raise NotImplementedError(
            f"radical via trace form needs characteristic 0 or p > {alg.dim}"
        )
    n = alg.dim
    # trace of left multiplication by basis element k
    tr = [f.zero] * n
    for i in range(n):
        for j in range(n):
            for k, c in alg.table.get((i, j), ()):
                if k == j:
                    tr[i] += c
    rad = []
    for (s, t), ks in sorted(alg._blocks.items()):
        partners = alg.block(t, s)
        rows = []
        for k in ks:
            row = []
            for l in partners:
                acc = f.zero
                for m, c in alg.table.get((k, l), ()):
                    acc += c * tr[m]
                row.append(acc % f.p if f.p else acc)
            rows.append(row)
        # x = sum a_k b_k is radical iff sum_k a_k G[k][l] = 0 for every partner l
        g = Mat(f, len(ks), len(partners), rows) if partners else Mat.zeros(f, len(ks), 0)
        for vec in kernel_vectors(g.T):
            full = [f.zero] * n
            for k, a in zip(ks, vec):
                full[k] = a
            rad.append((s, t, full))
    return rad


# ---------------------------------------------------------------------------
# Path algebras
# ---------------------------------------------------------------------------

def _paths_up_to(quiver: Quiver, max_len: int):
    """All paths of length <= max_len as (src, tgt, arrow-index tuple), by length."""
    vidx = {v: i for i, v in enumerate(quiver.vertices)}
    arrows = [(vidx[a.source], vidx[a.target]) for a in quiver.arrows]
    paths = [(i, i, ()) for i in range(len(quiver.vertices))]
    layer = [(s, t, (k,)) for k, (s, t) in enumerate(arrows)]
    length = 1
    while layer and length <= max_len:
        paths.extend(layer)
        nxt = []
        for s, t, p in layer:
            for k, (a, b) in enumerate(arrows):
                if a == t:
                    nxt.append((s, b, p + (k,)))
        layer = nxt
        length += 1
    return paths


def _path_name(quiver, path):
    s, t, arrows = path
    if not arrows:
        return "e_" + quiver.vertices[s]
    return "*".join(quiver.arrows[k].name for k in arrows)


def build_path_algebra(quiver: Quiver, relations: Sequence[Relation], field: Field = QQ,
                       name: str = "", max_length: int = 16) -> FDAlgebra:
    """The algebra kQ/I for an admissible ideal I generated by ``relations``."""
    vidx = {v: i for i, v in enumerate(quiver.vertices)}
    aidx = {a.name: k for k, a in enumerate(quiver.arrows)}
    rels = []
    for r in relations:
        terms = []
        ends = set()
        for c, p in r.terms:
            if len(p) < 2:
                raise NonAdmissible(f"relation term {p} has length < 2")
            try:
                idx = tuple(aidx[a] for a in p)
            except KeyError as exc:
                raise ValueError(f"unknown arrow {exc.args[0]} in relation") from None
            for x, y in zip(idx, idx[1:]):
                if quiver.arrows[x].target != quiver.arrows[y].source:
                    raise ValueError(f"path {p} in relation is not composable")
            s = vidx[quiver.arrows[idx[0]].source]
            t = vidx[quiver.arrows[idx[-1]].target]
            ends.add((s, t))
            terms.append((field(c), idx))
        if len(ends) > 1:
            raise ValueError("relation mixes paths with different endpoints")
        if terms:
            rels.append((next(iter(ends)), terms))

    longest = quiver.longest_path()
    candidates = [longest + 1] if longest is not None else range(2, max_length + 1)
    for L in candidates:
        paths = _paths_up_to(quiver, L)
        # columns ordered longest first so leading terms of relations are long paths
        order = sorted(range(len(paths)), key=lambda i: (-len(paths[i][2]), i))
        col = {paths[i][2] if paths[i][2] else ("v", paths[i][0]): c for c, i in enumerate(order)}
        ncols = len(paths)
        vecs = []
        for (s, t), terms in rels:
            for u in paths:  # u before the relation
                if u[1] != s:
                    continue
                for w in paths:  # w after
                    if w[0] != t:
                        continue
                    v = [field.zero] * ncols
                    hit = False
                    for c, idx in terms:
                        full = u[2] + idx + w[2]
                        if len(full) <= L:
                            v[col[full]] += c
                            hit = True
                    if hit:
                        vecs.append(v)
        ideal = Subspace.span(field, ncols, vecs)
        top = [col[p[2]] for p in paths if len(p[2]) == L]
        z, o = field.zero, field.one
        if all(ideal.contains_vector([o if j == c else z for j in range(ncols)]) for c in top):
            break
    else:
        raise NonAdmissible(f"path classes do not terminate up to length {max_length}")

    pivots = set(ideal.pivots)
    basis_cols = [c for c in range(ncols) if c not in pivots]
    by_col = {c: paths[i] for c, i in enumerate(order)}
    basis_paths = [by_col[c] for c in basis_cols]
    # idempotents first, then by length, keeping declaration order
    perm = sorted(range(len(basis_paths)), key=lambda i: (len(basis_paths[i][2]), order[basis_cols[i]]))
    basis_paths = [basis_paths[i] for i in perm]
    basis_cols = [basis_cols[i] for i in perm]
    pos = {c: k for k, c in enumerate(basis_cols)}

    def normal_form(path_idx):
        if len(path_idx) > L:
            return ()
        v = [field.zero] * ncols
        key = path_idx
        v[col[key]] = field.one
        r = ideal.reduce(v)
        return tuple((pos[c], r[c]) for c in basis_cols if r[c])

    basis = [BasisElement(_path_name(quiver, p), p[0], p[1], p[2]) for p in basis_paths]
    table = {}
    for i, x in enumerate(basis_paths):
        for j, y in enumerate(basis_paths):
            if y[1] != x[0]:
                continue
            if not x[2] and not y[2]:
                prod = ((i, field.one),)
            elif not x[2]:
                prod = ((j, field.one),)
            elif not y[2]:
                prod = ((i, field.one),)
            else:
                prod = normal_form(y[2] + x[2])
            if prod:
                table[(i, j)] = prod
    idempotents = []
    for v in range(len(quiver.vertices)):
        idempotents.append(next(k for k, p in enumerate(basis_paths) if not p[2] and p[0] == v))
    generators = [k for k, p in enumerate(basis_paths) if len(p[2]) == 1]
    if len(generators) != len(quiver.arrows):
        raise NonAdmissible("an arrow lies in the relation ideal")
    generators.sort(key=lambda k: basis_paths[k][2][0])
    alg = FDAlgebra(field, quiver.vertices, basis, table, idempotents, generators=generators,
                    kind="path", name=name, quiver=quiver, relations=relations)
    alg._normal_form = normal_form
    return alg


def arrow_basis_index(alg: FDAlgebra, arrow_name: str) -> int:
    return alg.basis_index(arrow_name)


def from_structure_constants(field: Field, names: Sequence[str], products, unit: Sequence,
                             name: str = "") -> FDAlgebra:
    """A one-vertex algebra from a multiplication table.

    ``products[i][j]`` is the coefficient vector of ``b_i * b_j``; ``unit`` is the
    coefficient vector of 1.  The basis is changed so that the unit comes first.
    """
    n = len(names)
    unit = [field(x) for x in unit]
    prods = [[[field(x) for x in products[i][j]] for j in range(n)] for i in range(n)]
    # new basis: unit, then the old basis vectors not in the span so far
    vecs = [unit]
    labels = ["1"]
    for i in range(n):
        e = [field.one if j == i else field.zero for j in range(n)]
        if not Subspace.span(field, n, vecs).contains_vector(e):
            vecs.append(e)
            labels.append(names[i])
    if len(vecs) != n:
        raise ValueError("unit vector is zero")
    coord = Coordinatizer(field, vecs, n)

    def old_mul(x, y):
        out = [field.zero] * n
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        for k, c in enumerate(prods[i][j]):
                            if c:
                                out[k] += a * b * c
        return [v % field.p for v in out] if field.p else out

    table = {}
    for i, x in enumerate(vecs):
        for j, y in enumerate(vecs):
            c = coord.coords(old_mul(x, y))
            prod = tuple((k, v) for k, v in enumerate(c) if v)
            if prod:
                table[(i, j)] = prod
    basis = [BasisElement(lbl, 0, 0) for lbl in labels]
    return FDAlgebra(field, ("*",), basis, table, [0], kind="structure", name=name)
