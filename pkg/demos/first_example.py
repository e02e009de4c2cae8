"""Walk through the algebra 1 => 2 -> 3 modulo the square of the radical, with T = DA.

Run:  python3 demos/first_example.py
"""
from tiltfilt.acceptance import load
from tiltfilt.filtrate import (
    canonical_filtration, classify, ext_closure_witness, maximal_injective_audit, refined_filtration,
)
from tiltfilt.tiltcore import ext_dims, fundamental_sequence

af, ctx = load("ex1")
print(ctx)
for name, t in zip(ctx.names, ctx.summands):
    print(f"  {name} {t.dims}  Ext dims {ext_dims(ctx, t)}")

m = af.module("M")
print("\nM: both arrows act by 1, dims", m.dims)
fl = classify(ctx, m)
print("  classes:", ", ".join(fl.true_flags()))
print("  Ext^i(T, M) dims:", fl.ext_dims)
fs = fundamental_sequence(ctx, m)
print("  image of phi:", fs.im_phi.dims, " middle homology:", fs.middle.dims)

rep = refined_filtration(ctx, m)
print(f"\nrefined filtration, n = {rep.n}")
for lab, d in zip([f"Z_{i}" for i in range(rep.n + 1)] + [f"Y_{i}" for i in range(rep.n, -1, -1)], rep.chain_dims()):
    print(f"  {lab} {d}")
print("  d along windows:", rep.d_trace)
rep = canonical_filtration(ctx, m, rep)
print("canonical: X_1", rep.X1.dims, " X_2", rep.X2.dims, rep.canonical_certificates)

w = ext_closure_witness(ctx)
print(f"\nextension of {w.quotient.dims} by {w.sub.dims} outside FacT: {w.module.dims}, trace {w.trace_dims}")
audit = maximal_injective_audit(ctx.A)
for e in audit.entries:
    print(f"  I_{e['vertex']} {e['dims']} maximal={e['maximal']} pd={e['pd']}")
print("verdict:", audit.verdict)
