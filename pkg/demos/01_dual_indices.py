"""Indices, their run-length form, and duality.

An index (k_1, ..., k_r) with k_r >= 2 splits uniquely into runs: a block
of ones followed by one larger part.  Writing each run as a pair (a, b)
and reading the pairs backwards with a and b swapped gives the dual index.
"""
from ohnozeta import admissible_indices, depth, dual, format_index, to_runs, weight

print("index        runs              dual")
for k in [(2,), (1, 2), (1, 1, 3), (2, 3), (3, 1, 2)]:
    print(f"{format_index(k):12} {str(to_runs(k)):17} {format_index(dual(k))}")

# Duality keeps the weight and swaps depth for weight minus depth.
print("\nweight  indices  self-dual")
for w in range(2, 11):
    ks = list(admissible_indices(w))
    assert all(dual(dual(k)) == k and depth(k) + depth(dual(k)) == w for k in ks)
    fixed = sum(dual(k) == k for k in ks)
    print(f"{w:6}  {len(ks):7}  {fixed:9}")
