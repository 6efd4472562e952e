"""Multiple zeta values from truncated nested sums.

Raw truncation converges like 1/N, which is far too slow for 30 digits.
The library fits the tail shape of the partial sums and reports a
heuristic error estimate next to every value.
"""
import mpmath

from ohnozeta import PrecisionContext, harmonic_residual, zeta, zeta_truncated

mpmath.mp.dps = 40

print("truncated zeta(1,2) against its limit zeta(3)")
for N in (10, 100, 1000):
    print(f"  N={N:5}  {zeta_truncated((1, 2), N).real}")
print(f"  mpmath   {mpmath.zeta(3)}")

ev = zeta((1, 2), PrecisionContext(eps=1e-25))
print(f"\nextrapolated from N={ev.terms_used}: {ev.value.real}")
print(f"error estimate {float(ev.error_estimate):.1e}, true error "
      f"{float(abs(mpmath.mpf(str(ev.value.real)) - mpmath.zeta(3))):.1e}")

# Depth-two values at complex arguments obey the same harmonic product rule
# as at integers.
h = harmonic_residual("1.5,2", "2.5,-1")
print(f"\nzeta(a)zeta(b) - zeta(a,b) - zeta(b,a) - zeta(a+b) at a=1.5+2i, b=2.5-i:")
print(f"  residual {float(h.residual):.1e}  (estimate {float(h.error_estimate):.1e}, N={h.terms_used})")
