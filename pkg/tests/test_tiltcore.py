import random

import pytest
from hypothesis import given, strategies as st

from conftest import one_dim_module
from tiltfilt.acceptance import load
from tiltfilt.homcomplex import homology
from tiltfilt.quivalg import (
    Quiver, Relation, build_path_algebra, direct_sum, image_subobject, kernel_subobject, random_module,
    simple_module, trace_of,
)
from tiltfilt.tiltcore import (
    GImage, NotSelfOrthogonal, ProjDimExceeded, b_action_check, build_context, counit_chain_map,
    counit_identification, decomposition_audit, ext_dims, ext_dims_oracle, ext_module, f_model,
    fundamental_sequence, in_add_T, j_table, j_table_violations, k0_witness_audit, k2_witness_audit, phi,
    phi_direct, psi, tor_dims_oracle, tor_module,
)

seeds = st.integers(0, 10 ** 6)
names = st.sampled_from(["ex1", "ex2"])


def test_context_summaries(ex1, ex2, a2):
    for (_, ctx), dim_b in ((ex1, 6), (ex2, 8)):
        assert ctx.pd_T == 2 and ctx.B.dim == dim_b
        assert ctx.generation_status == "verified"
        assert b_action_check(ctx)
    assert a2[1].pd_T == 1


def test_tilting_with_projectives_is_trivial(ex2):
    A = ex2[1].A
    ctx = build_context(A, "A")
    assert ctx.pd_T == 0
    x = random_module(A, random.Random(3))
    assert ext_dims(ctx, x) == (x.dim, 0, 0)


def test_precondition_errors():
    q = Quiver(("1", "2"), [("a", "1", "2")])
    A = build_path_algebra(q, [])
    with pytest.raises(NotSelfOrthogonal):
        build_context(A, [simple_module(A, 0), simple_module(A, 1)])
    q4 = Quiver(("1", "2", "3", "4"), [("a", "1", "2"), ("b", "2", "3"), ("c", "3", "4")])
    B = build_path_algebra(q4, [Relation([(1, ("a", "b"))]), Relation([(1, ("b", "c"))])])
    with pytest.raises(ProjDimExceeded):
        build_context(B, [simple_module(B, 0)])


def test_example_values(ex1, ex2):
    af, ctx = ex2
    s3, s4, i4 = af.module("S3"), af.module("S4"), af.module("I4")
    assert ext_dims(ctx, s4) == (0, 0, 1)
    assert ext_dims(ctx, s3) == (1, 1, 0)
    assert ext_dims(ctx, i4) == (1, 0, 0)
    assert psi(ctx, s4).is_injective()
    ph = phi(ctx, s3)
    assert ph.source.dims == (0, 0, 1, 1)
    assert kernel_subobject(ph).dims == (0, 0, 0, 1)
    af1, ctx1 = ex1
    m = af1.module("M")
    assert ext_dims(ctx1, m) == (1, 2, 0)
    fs = fundamental_sequence(ctx1, m)
    assert fs.middle.dims == (1, 0, 0)
    assert fs.im_phi.dims == (0, 1, 0)


@given(names, seeds)
def test_ext_agrees_with_independent_oracle(name, seed):
    ctx = load(name)[1]
    x = random_module(ctx.A, random.Random(seed))
    assert list(ext_dims(ctx, x)) == ext_dims_oracle(ctx, x)[:3]
    assert ext_dims_oracle(ctx, x)[3] == 0


@given(names, seeds)
def test_tor_agrees_with_independent_oracle(name, seed):
    ctx = load(name)[1]
    m = random_module(ctx.B, random.Random(seed))
    assert [tor_module(ctx, m, j).dim for j in range(5)] == tor_dims_oracle(ctx, m)


@given(names, seeds)
def test_counit_is_quasi_isomorphism(name, seed):
    ctx = load(name)[1]
    x = random_module(ctx.A, random.Random(seed))
    g = GImage(ctx, f_model(ctx, x).replacement).complex(4)
    assert [homology(g, n).dim for n in range(-2, 5)] == [0, 0, x.dim, 0, 0, 0, 0]
    counit_chain_map(ctx, x).validate()
    assert counit_identification(ctx, x).iso.is_iso()


@given(names, seeds)
def test_phi_two_routes_and_trace(name, seed):
    ctx = load(name)[1]
    x = random_module(ctx.A, random.Random(seed))
    ph = phi(ctx, x)
    assert phi_direct(ctx, x).blocks == ph.blocks
    assert image_subobject(ph) == trace_of(ctx.summands, x)
    assert (psi(ctx, x) @ ph).is_zero()


@given(names, seeds)
def test_fundamental_sequence_and_j_table(name, seed):
    ctx = load(name)[1]
    x = random_module(ctx.A, random.Random(seed))
    fs = fundamental_sequence(ctx, x)
    assert all(fs.exact.values())
    assert fs.middle_dim == tor_module(ctx, ext_module(ctx, x, 1), 1).dim
    assert not j_table_violations(j_table(ctx, x))
    assert decomposition_audit(ctx, x) in (None, True)


@given(names, seeds)
def test_witness_audits(name, seed):
    ctx = load(name)[1]
    x = random_module(ctx.A, random.Random(seed))
    for audit in (k0_witness_audit(ctx, x), k2_witness_audit(ctx, x)):
        assert audit is None or audit.ok, audit


def test_add_T_membership(ex1):
    ctx = ex1[1]
    t2, _, _ = direct_sum([ctx.summands[0], ctx.summands[2]])
    assert in_add_T(ctx, t2)
    assert not in_add_T(ctx, simple_module(ctx.A, 1))


def test_cache_can_be_disabled(ex2):
    af, ctx = ex2
    x = af.module("S3")
    before = ext_dims(ctx, x)
    ctx.caching = False
    try:
        assert ext_dims(ctx, x) == before
    finally:
        ctx.caching = True


def test_m_is_not_in_fac_t(ex1):
    ctx = ex1[1]
    m = one_dim_module(ctx.A, (1, 1, 0), ["a", "b"])
    assert not phi(ctx, m).is_surjective()
