"""The interpolated Ohno function I_k(s) at complex s.

I_k(m) recovers the Ohno sum for integers m >= 0, and I_k(s) = I_dual(s)
continues to hold for every complex s with Re(s) > -1.  Each pivot
contributes a partial sum of alternating sign, so the cancellation ratio
is reported alongside the value.
"""
from ohnozeta import PrecisionContext, check_lemma22_exact, dual, interp_eval, ohno_sum

k = (2, 3)
kd = dual(k)
ctx = PrecisionContext(eps=1e-10)

print(f"k = {k}, dual = {kd}")
print("  integer points reproduce Ohno sums:")
for m in range(3):
    a, b = interp_eval(k, m, PrecisionContext(eps=1e-13)), ohno_sum(k, m)
    print(f"    m={m}  I_k(m)={a.value.real:.18f}  Ohno sum={b.value.real:.18f}")

# At finite N the integer case is an exact identity between rationals.
rep = check_lemma22_exact(k, 2, 100)
print(f"  truncated at N=100, m=2: residual {float(rep.residual):.1e} (rounding budget {float(rep.tolerance):.1e})")

print("\n  along Re(s) = -0.5:")
print("      s            I_k(s)                              |I_k - I_dual|   cancellation")
for im in (0, 1, 2, 4):
    s = f"-0.5,{im}"
    a, b = interp_eval(k, s, ctx), interp_eval(kd, s, ctx)
    z = a.value
    print(f"    -0.5{im:+}i   {float(z.real):+.12f} {float(z.imag):+.12f}i   "
          f"{float(abs(a.value - b.value)):.1e}          {float(a.cancellation_ratio):.2f}")

try:
    interp_eval(k, "-1.2", ctx)
except ValueError as exc:
    print(f"\n  below the convergence line: {exc}")
