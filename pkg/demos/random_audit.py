"""Classify and filter a batch of random modules, then print a summary table.

Run:  python3 demos/random_audit.py [corpus] [count] [seed]
"""
import random
import sys
from collections import Counter

from tiltfilt.acceptance import load
from tiltfilt.filtrate import canonical_filtration, classify, trace_crosscheck
from tiltfilt.quivalg import random_module

name = sys.argv[1] if len(sys.argv) > 1 else "ex2"
count = int(sys.argv[2]) if len(sys.argv) > 2 else 30
rng = random.Random(int(sys.argv[3]) if len(sys.argv) > 3 else 0)

_, ctx = load(name)
classes, lengths, agree = Counter(), Counter(), 0
for _ in range(count):
    x = random_module(ctx.A, rng)
    if not x.dim:
        continue
    fl = classify(ctx, x)
    classes[fl.e_class()] += 1
    rep = canonical_filtration(ctx, x)
    lengths[rep.n] += 1
    agree += trace_crosscheck(ctx, x, rep)
print(ctx)
print("single E-class counts (None = mixed):", dict(classes))
print("refined filtration lengths:", dict(sorted(lengths.items())))
print(f"trace cross-check agreement: {agree}/{sum(lengths.values())}")
