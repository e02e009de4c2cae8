"""The linear quiver 1 -> 2 -> 3 -> 4 with the composite 2 -> 4 zero, and T = DA.

Run:  python3 demos/second_example.py
"""
from tiltfilt.acceptance import load
from tiltfilt.filtrate import canonical_filtration, classify, functoriality_check
from tiltfilt.quivalg import kernel_subobject
from tiltfilt.tiltcore import j_table, phi, psi

af, ctx = load("ex2")
print(ctx)
for name in af.modules:
    x = af.module(name)
    fl = classify(ctx, x)
    rep = canonical_filtration(ctx, x)
    print(f"{name} {x.dims}: Ext dims {fl.ext_dims}, classes {fl.true_flags()}")
    print(f"   X_1 {rep.X1.dims}  X_2 {rep.X2.dims}")

s3 = af.module("S3")
ph = phi(ctx, s3)
print("\nphi(S3):", ph.source.dims, "->", s3.dims, " kernel", kernel_subobject(ph).dims)
print("psi(S4) injective:", psi(ctx, af.module("S4")).is_injective())

print("\nnonzero J^i_j S3 = Tor_j(T, Ext^i(T, S3)):")
for (i, j), m in sorted(j_table(ctx, s3).items()):
    if m.dim:
        print(f"  J^{i}_{j}: {m.dims}")

print("\nfunctoriality of I4 -> S3:", functoriality_check(ctx, af.morphism("p")))
