import random

from hypothesis import given, strategies as st

from conftest import one_dim_module
from tiltfilt.acceptance import load
from tiltfilt.filtrate import (
    ClassFlags, FLAG_NAMES, canonical_filtration, classify, closure_spot_checks, ext_closure_witness,
    extension_module, extension_space, flag_consistency, functoriality_check, hom_vanishing_audit,
    in_fac_T, iterated_j11, maximal_injective_audit, random_submodule, refined_filtration, trace_chain,
    trace_crosscheck, window_identity_check,
)
from tiltfilt.homcomplex import projective_resolution
from tiltfilt.quivalg import (
    ModuleMap, direct_sum, find_isomorphism, hom_dimension, kernel_subobject, quotient, random_map,
    random_module, simple_module,
)

seeds = st.integers(0, 10 ** 6)
names = st.sampled_from(["ex1", "ex2"])


def test_classify_examples(ex1, ex2):
    af, ctx = ex2
    s4 = classify(ctx, af.module("S4"))
    assert s4.F2 and s4.K2 and s4.E2
    assert not any(getattr(s4, f"{c}{i}") for c in "FKE" for i in (0, 1))
    s3 = classify(ctx, af.module("S3"))
    assert s3.K0 and not s3.F0
    assert classify(ctx, af.module("I4")).F0
    m = classify(ex1[1], ex1[0].module("M"))
    assert m.E0 and not m.K0
    assert m.witness["trace_chain"] == [(0, 1, 0), (1, 1, 0)]


def test_zero_module_is_in_every_class(ex1):
    ctx = ex1[1]
    z = quotient(ctx.summands[0], kernel_subobject(ModuleMap.zero(ctx.summands[0], ctx.summands[0])))[0]
    assert z.dim == 0
    assert all(classify(ctx, z).as_dict().values())


def test_refined_filtration_examples(ex1, ex2):
    af, ctx = ex1
    rep = refined_filtration(ctx, af.module("M"))
    assert rep.n == 2
    assert [z.dims for z in rep.Z] == [(0, 0, 0), (0, 1, 0), (1, 1, 0)]
    assert all(y.is_full() for y in rep.Y)
    assert rep.d_trace == [2, 0, 0]
    af2, ctx2 = ex2
    rep = refined_filtration(ctx2, af2.module("S3"))
    assert rep.n == 1 and rep.Z[1].is_full() and rep.Y[1].is_full()
    for t in ctx2.summands:
        rep = refined_filtration(ctx2, t)
        assert rep.n == 1 and rep.Z[1].is_full()


def test_canonical_filtration_examples(ex1, ex2):
    af, ctx = ex1
    rep = canonical_filtration(ctx, af.module("M"))
    assert rep.X1.is_full() and rep.X2.is_full()
    af2, ctx2 = ex2
    rep = canonical_filtration(ctx2, af2.module("S4"))
    assert rep.X1.dim == 0 and rep.X2.dim == 0
    assert rep.canonical_certificates["X/X2_E2"]


def test_trace_chain_examples(ex1, ex2):
    af, ctx = ex1
    assert [u.dims for u in trace_chain(ctx, af.module("M"))] == [(0, 1, 0), (1, 1, 0)]
    assert trace_chain(ex2[1], ex2[0].module("S4")) == []
    t = ctx.summands[1]
    assert [u.dims for u in trace_chain(ctx, t)] == [t.dims]


def test_hereditary_degenerates(a2):
    af, ctx = a2
    for x in af.all_modules():
        rep = canonical_filtration(ctx, x)
        assert rep.X2.is_full()
        assert "E2_factor_zero" in rep.canonical_certificates


def test_functoriality_examples(ex2):
    af, ctx = ex2
    p = af.morphism("p")
    assert functoriality_check(ctx, p) == (True, None)
    i4 = af.module("I4")
    assert functoriality_check(ctx, ModuleMap.identity(i4))[0]
    assert functoriality_check(ctx, ModuleMap.zero(i4, af.module("S4")))[0]
    assert canonical_filtration(ctx, i4).X1.is_full()
    assert canonical_filtration(ctx, af.module("S3")).X1.is_full()


def test_hom_vanishing_examples(ex2):
    af, ctx = ex2
    s3, s4 = af.module("S3"), af.module("S4")
    t, _, _ = direct_sum(ctx.summands)
    assert hom_dimension(t, s4) == 0 and hom_dimension(s3, s4) == 0
    r = hom_vanishing_audit(ctx, [t, s3, s4])
    assert r.ok and r.pairs_checked == 2


def test_maximal_injective_audits(ex1, nak3, semisimple):
    a = maximal_injective_audit(ex1[1].A)
    assert a.verdict == "not extension-closed" and a.witness == ["2"]
    i2 = a.entries[1]
    assert i2["maximal"] and i2["pd"] == 2
    assert maximal_injective_audit(nak3[1].A).closed
    s = maximal_injective_audit(semisimple[1].A)
    assert s.closed and all(e["pd"] == 0 for e in s.entries)


def test_extension_witnesses(ex1, nak3, semisimple):
    w = ext_closure_witness(ex1[1])
    assert w.module.dims == (1, 1, 0)
    assert w.sub.dims == (0, 1, 0) and w.quotient.dims == (1, 0, 0)
    m = ex1[0].module("M")
    assert find_isomorphism(w.module, m) is not None
    assert ext_closure_witness(nak3[1]) is None
    assert ext_closure_witness(semisimple[1]) is None


def _ext1_oracle(v, u):
    r = projective_resolution(v, depth=2)
    p0 = r.complex.module(0)
    omega = kernel_subobject(r.augmentation).module
    return hom_dimension(omega, u) - hom_dimension(p0, u) + hom_dimension(v, u)


@given(names, seeds)
def test_extension_space_dimension_matches_resolution(name, seed):
    ctx = load(name)[1]
    rng = random.Random(seed)
    u, v = random_module(ctx.A, rng, max_top=2), random_module(ctx.A, rng, max_top=2)
    reps = extension_space(u, v)
    assert len(reps) == _ext1_oracle(v, u)
    for z in reps:
        e = extension_module(u, v, z)
        assert e.dims == tuple(a + b for a, b in zip(u.dims, v.dims))


def test_ext1_between_simples(ex1):
    A = ex1[1].A
    assert len(extension_space(simple_module(A, 1), simple_module(A, 0))) == 2
    assert len(extension_space(simple_module(A, 0), simple_module(A, 1))) == 0


@given(names, seeds)
def test_flags_are_consistent(name, seed):
    ctx = load(name)[1]
    x = random_module(ctx.A, random.Random(seed))
    fl = classify(ctx, x)
    assert flag_consistency(fl) == []
    assert fl.K0 == in_fac_T(ctx, x)
    assert set(fl.as_dict()) == set(FLAG_NAMES)


@given(names, seeds)
def test_filtration_properties(name, seed):
    ctx = load(name)[1]
    x = random_module(ctx.A, random.Random(seed))
    rep = canonical_filtration(ctx, x)
    assert rep.n <= max(x.dim, 1)
    assert rep.X1 == rep.Z[rep.n] and rep.X2 == rep.Y[rep.n]
    assert all(rep.d_trace[i + 1] <= rep.d_trace[i] for i in range(rep.n))
    assert trace_crosscheck(ctx, x, rep, strict=True)
    assert window_identity_check(ctx, rep)
    its = iterated_j11(ctx, x, rep.n)
    assert [w.dims for w in rep.windows] == [j.dims for j in its]


@given(names, seeds)
def test_functoriality_on_random_maps(name, seed):
    ctx = load(name)[1]
    rng = random.Random(seed)
    u, v = random_module(ctx.A, rng), random_module(ctx.A, rng)
    assert functoriality_check(ctx, random_map(u, v, rng))[0]


@given(names, seeds)
def test_closure_properties(name, seed):
    ctx = load(name)[1]
    rng = random.Random(seed)
    mods = [random_module(ctx.A, rng) for _ in range(6)]
    r = closure_spot_checks(ctx, mods, rng, per_kind=2)
    assert r.ok, r.violations


@given(seeds)
def test_random_submodule_is_stable(seed):
    ctx = load("ex2")[1]
    rng = random.Random(seed)
    x = random_module(ctx.A, rng)
    s = random_submodule(x, rng)
    s.check_stable()


def test_classflags_e_class():
    fl = ClassFlags(*([False] * 12), ext_dims=(0, 0, 1))
    fl.E2 = True
    assert fl.e_class() == 2 and fl.true_flags() == ["E2"]


def test_e_classes_of_ex1_m_components(ex1):
    ctx = ex1[1]
    m = one_dim_module(ctx.A, (1, 1, 0), ["a", "b"])
    assert classify(ctx, m).e_class() == 0
