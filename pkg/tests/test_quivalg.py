import random

import pytest
from hypothesis import given, strategies as st

from conftest import one_dim_module
from tiltfilt.exactlin import QQ, Mat
from tiltfilt.quivalg import (
    Module, ModuleMap, NonAdmissible, Quiver, Relation, Subobject, ValidationError, build_path_algebra,
    cokernel, direct_sum, dual, dual_regular, find_isomorphism, from_structure_constants, hom_basis,
    hom_dimension, image_subobject, injective_module, kernel_subobject, projective_cover, projective_module,
    quotient, radical, random_map, random_module, regular_module, simple_module, socle, top, trace_of,
)

seeds = st.integers(0, 10 ** 6)


def test_example_algebra_dimensions(ex1, ex2):
    A1, A2 = ex1[1].A, ex2[1].A
    assert A1.dim == 6 and A2.dim == 8
    assert [projective_module(A1, v).dims for v in range(3)] == [(1, 2, 0), (0, 1, 1), (0, 0, 1)]
    assert [m.dims for m in dual_regular(A1)] == [(1, 0, 0), (2, 1, 0), (0, 1, 1)]
    assert dual_regular(A2)[3].dims == (0, 0, 1, 1)
    assert regular_module(A1).dim == 6


def test_relation_violation_names_the_relation(ex2):
    A = ex2[1].A
    with pytest.raises(ValidationError, match="relation 0"):
        one_dim_module(A, (0, 1, 1, 1), ["be", "ga"])


def test_non_admissible_inputs_rejected():
    q = Quiver(("1", "2"), [("a", "1", "2")])
    with pytest.raises(NonAdmissible):
        build_path_algebra(q, [Relation([(1, ("a",))])])
    loop = Quiver(("1",), [("x", "1", "1")])
    with pytest.raises(NonAdmissible):
        build_path_algebra(loop, [], max_length=6)
    with pytest.raises(ValueError):
        Quiver(("1", "1"), [])


def test_cyclic_quiver_with_nilpotent_relations():
    loop = Quiver(("1",), [("x", "1", "1")])
    A = build_path_algebra(loop, [Relation([(1, ("x", "x", "x"))])])
    assert A.dim == 3
    assert projective_module(A, 0).dims == (3,)


def test_hom_trace_socle_radical_top(ex1):
    ctx = ex1[1]
    A = ctx.A
    M = ex1[0].module("M")
    i1, i2, i3 = dual_regular(A)
    assert hom_dimension(i3, M) == 1
    assert trace_of(ctx.summands, M).dims == (0, 1, 0)
    assert socle(i2).dims == (0, 1, 0)
    assert radical(M).dims == (0, 1, 0)
    tm, _ = top(M)
    assert tm.dims == (1, 0, 0)
    assert find_isomorphism(dual(dual(M)), M) is not None


def test_structure_constant_algebra_dual_numbers():
    A = from_structure_constants(QQ, ["1", "x"], [[[1, 0], [0, 1]], [[0, 1], [0, 0]]], [1, 0])
    assert A.kind == "structure" and A.dim == 2
    assert len(A.radical_basis()) == 1
    assert regular_module(A).dims == (2,)
    x = A.generators[0]
    with pytest.raises(ValidationError):
        Module(A, (1,), {x: Mat.from_rows(QQ, [[1]])})
    s = Module(A, (1,), {})
    assert hom_dimension(regular_module(A), s) == 1


@given(seeds)
def test_yoneda_dimensions_on_random_modules(seed):
    # Hom(P_v, X) = e_v X and Hom(X, I_v) = D(e_v X)
    from tiltfilt.acceptance import load
    A = load("ex1")[1].A
    rng = random.Random(seed)
    x = random_module(A, rng)
    for v in range(A.num_vertices):
        assert hom_dimension(projective_module(A, v), x) == x.dims[v]
        assert hom_dimension(x, injective_module(A, v)) == x.dims[v]


@given(seeds)
def test_random_maps_are_module_maps_and_split_into_image_kernel(seed):
    from tiltfilt.acceptance import load
    A = load("ex2")[1].A
    rng = random.Random(seed)
    m, n = random_module(A, rng), random_module(A, rng)
    f = random_map(m, n, rng)
    f.validate()
    im, ker = image_subobject(f), kernel_subobject(f)
    assert im.dim + ker.dim == m.dim
    im.check_stable()
    ker.check_stable()
    c, p = cokernel(f)
    assert c.dim == n.dim - im.dim and p.is_surjective()


@given(seeds)
def test_duality_is_involutive(seed):
    from tiltfilt.acceptance import load
    A = load("ex2")[1].A
    x = random_module(A, random.Random(seed))
    assert find_isomorphism(dual(dual(x)), x) is not None


@given(seeds)
def test_projective_cover_is_surjective_with_matching_top(seed):
    from tiltfilt.acceptance import load
    A = load("ex1")[1].A
    x = random_module(A, random.Random(seed))
    cov = projective_cover(x)
    p, g = cov[0], cov[1]
    assert g.is_surjective()
    assert top(p)[0].dims == top(x)[0].dims


def test_direct_sum_injections_and_projections(ex1):
    A = ex1[1].A
    mods = dual_regular(A)
    s, inj, prj = direct_sum(mods)
    assert s.dims == (3, 2, 1)
    for i, (a, b) in enumerate(zip(inj, prj)):
        assert (b @ a) == ModuleMap.identity(mods[i])


def test_subobject_lattice(ex1):
    A = ex1[1].A
    p1 = projective_module(A, 0)
    r = radical(p1)
    assert Subobject.zero(p1).dim == 0 and Subobject.full(p1).is_full()
    assert (r + Subobject.zero(p1)) == r
    assert (r & Subobject.full(p1)) == r
    q, proj = quotient(p1, r)
    assert q.dims == (1, 0, 0) and proj.is_surjective()
    assert hom_basis(simple_module(A, 0), q)
