import random

import pytest
from hypothesis import given, strategies as st

from tiltfilt.homcomplex import (
    ChainMap, Complex, ProjectiveReplacement, cone, homology, homology_dims, induced_on_homology,
    injective_resolution, lift_chain_map, projective_dimension, projective_resolution, shift, single,
    truncate_good,
)
from tiltfilt.quivalg import (
    ModuleMap, ValidationError, dual_regular, projective_module, random_map, random_module,
    simple_module,
)

seeds = st.integers(0, 10 ** 6)


def res_dims(r):
    return [r.complex.module(n).dims for n in range(r.length + 1)]


def test_minimal_resolutions_frozen(ex1, ex2):
    A1, A2 = ex1[1].A, ex2[1].A
    r = projective_resolution(simple_module(A1, 0))
    assert r.terminated and r.length == 2
    assert res_dims(r) == [(1, 2, 0), (0, 2, 2), (0, 0, 2)]          # P1 <- P2^2 <- P3^2
    r = projective_resolution(dual_regular(A1)[1])
    assert res_dims(r) == [(2, 4, 0), (0, 3, 3), (0, 0, 3)]          # P1^2 <- P2^3 <- P3^3
    r = projective_resolution(simple_module(A2, 2))
    assert r.length == 1 and res_dims(r) == [(0, 0, 1, 1), (0, 0, 0, 1)]
    assert projective_dimension(projective_module(A2, 0)) == 0


def test_injective_resolution_of_s4(ex2):
    A = ex2[1].A
    c, aug = injective_resolution(simple_module(A, 3))
    inj = [m.dims for m in dual_regular(A)]
    assert [c.module(-j).dims for j in range(3)] == [inj[3], inj[2], inj[1]]
    z = (0, 0, 0, 0)
    assert homology_dims(c, range(-3, 2)) == {-3: z, -2: z, -1: z, 0: (0, 0, 0, 1), 1: z}
    assert aug.is_injective()


@given(seeds)
def test_projective_resolution_is_acyclic(seed):
    from tiltfilt.acceptance import load
    A = load("ex2")[1].A
    x = random_module(A, random.Random(seed))
    r = projective_resolution(x)
    c = r.complex
    c.validate()
    assert all(homology(c, n).dim == 0 for n in range(1, r.length + 2))
    h0 = homology(c, 0)
    assert h0.dim == x.dim
    assert r.augmentation.is_surjective()


@given(seeds)
def test_replacement_is_quasi_isomorphism(seed):
    from tiltfilt.acceptance import load
    A = load("ex1")[1].A
    rng = random.Random(seed)
    x = random_module(A, rng)
    c, _ = injective_resolution(x)
    rep = ProjectiveReplacement(c).extend_to(2)
    q = rep.chain_map
    q.validate()
    for n in range(c.lo, 2):
        h = induced_on_homology(q, n)
        assert h.is_iso()


def test_shift_and_cone(ex1):
    A = ex1[1].A
    s1 = simple_module(A, 0)
    r = projective_resolution(s1)
    c = r.complex
    sh = shift(c, 1)
    sh.validate()
    assert [homology(sh, n).dim for n in range(0, 5)] == [0, 1, 0, 0, 0]
    # cone of the augmentation P -> S1 is acyclic
    aug = ChainMap(c, single(s1), {0: r.augmentation})
    aug.validate()
    k = cone(aug)
    k.validate()
    assert all(homology(k, n).dim == 0 for n in range(-1, 5))


def test_good_truncation_keeps_window_homology(ex1):
    A = ex1[1].A
    c, _ = injective_resolution(dual_regular(A)[0])
    c2 = Complex(A, {n: c.module(n) for n in c.degrees}, {n: c.d(n) for n in c.degrees if n - 1 in c.degrees})
    t = truncate_good(c2, lo=-1, hi=0)
    for n in (-1, 0):
        assert homology(t.complex, n).dim == homology(c2, n).dim
    assert t.complex.lo >= -1


def test_complex_rejects_nonzero_square(ex1):
    A = ex1[1].A
    p1 = projective_module(A, 0)
    ident = ModuleMap.identity(p1)
    with pytest.raises(ValidationError):
        Complex(A, {0: p1, 1: p1, 2: p1}, {1: ident, 2: ident})


@given(seeds)
def test_lift_of_random_map_commutes_up_to_homology(seed):
    from tiltfilt.acceptance import load
    A = load("ex2")[1].A
    rng = random.Random(seed)
    x, y = random_module(A, rng), random_module(A, rng)
    f = random_map(x, y, rng)
    u = ChainMap(single(x), single(y), {0: f})
    sx = ProjectiveReplacement(single(x)).extend_to(2)
    sy = ProjectiveReplacement(single(y)).extend_to(2)
    lifted = lift_chain_map(u, sx, sy, 1)
    # q_y o lift = f o q_x in degree 0
    assert (sy.q(0) @ lifted.component(0)) == (f @ sx.q(0))


@given(seeds)
def test_induced_map_independent_of_section(seed):
    from tiltfilt.acceptance import load
    from tiltfilt.exactlin import Mat
    A = load("ex1")[1].A
    rng = random.Random(seed)
    x = random_module(A, rng)
    r = projective_resolution(x)
    aug = ChainMap(r.complex, single(x), {0: r.augmentation})
    hs, ht = homology(r.complex, 0), homology(single(x), 0)
    first = induced_on_homology(aug, 0, hs, ht)
    f = A.field
    for v in range(A.num_vertices):
        sec = hs.section[v]
        bnd = hs.boundaries.spaces[v].basis.rows
        if not bnd or not sec.ncols:
            continue
        noise = Mat(f, len(bnd), sec.ncols, [[f.random_element(rng) for _ in range(sec.ncols)] for _ in bnd])
        second = sec + Mat.from_rows(f, bnd, sec.nrows).T @ noise
        other = ht.project_matrix(v, aug.component(0).blocks[v] @ second)
        assert other == first.blocks[v]
