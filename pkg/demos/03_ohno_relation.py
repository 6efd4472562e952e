"""Ohno sums of an index and its dual agree for every m.

Distributing m extra units over the parts of k in every possible way and
adding up the zeta values gives the same total for k and for its dual.
"""
from ohnozeta import check_ohno_integer, dual, format_index, ohno_sum
from ohnozeta.index import compositions, shifted

k = (1, 1, 3)
print(f"k = ({format_index(k)}), dual = ({format_index(dual(k))})")
print("compositions of m=2 over k:", [shifted(k, e) for e in compositions(len(k), 2)])

for m in range(4):
    rep = check_ohno_integer(k, m)
    print(f"m={m}  sum={float(rep.lhs.value.real):.15f}  dual sum={float(rep.rhs.value.real):.15f}"
          f"  |diff|={float(rep.residual):.1e}  tol={float(rep.tolerance):.1e}  {rep.verdict}")

print("\nfor m = 0 this reduces to zeta(1,1,3) = zeta(1,4):", float(ohno_sum(k, 0).value.real))
