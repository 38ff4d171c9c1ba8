"""A tour of the scalar resolvents and the phi weights built from them.

Run from the repository root:  python3 demos/resolvent_tour.py
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from memerk import KernelSpec, MlfParams, ModeResolvent, mlf, phi_quadrature, phi_scalar, scalar_resolvent

# Each sine mode k of u' + int b(t-s) A u(s) ds = 0 evolves on its own,
# u_k(t) = s_k(t) u_k(0), where s_k solves the scalar problem with lam = (k pi)^2.
lam = math.pi**2
t = np.linspace(0.0, 2.0, 9)

riesz = KernelSpec.riesz(1.75)
expo = KernelSpec.exponential(2.0)
print("t      riesz 1.75     exponential a=2")
for ti, a, b in zip(t, scalar_resolvent(ModeResolvent(riesz, lam), t), scalar_resolvent(ModeResolvent(expo, lam), t)):
    print(f"{ti:4.2f}  {a: .10f}  {b: .10f}")

# Both decay and oscillate. The Riesz resolvent is E_rho(-lam t^rho), a
# Mittag-Leffler function; smaller rho damps harder and oscillates less.
for rho in (1.25, 1.5, 1.75):
    y = -lam * t[1:] ** rho
    print(f"rho={rho}: s(t) at t=0.25..2 ->", np.array2string(mlf(MlfParams(rho, 1.0), y), precision=4))

# No semigroup property: s(t + r) != s(t) s(r). This is why every step
# carries the whole history.
mr = ModeResolvent(riesz, lam)
print("s(0.5 + 0.5) =", scalar_resolvent(mr, 1.0), " s(0.5)^2 =", scalar_resolvent(mr, 0.5) ** 2)

# phi_{k,h}(t) averages s over one step against sigma^(k-1)/(k-1)!.
# Closed forms against adaptive quadrature of the definition:
h = 0.1
for k in (1, 2, 3):
    for tl in (h, 3 * h, 1.0):
        a = phi_scalar(mr, k, h, tl)
        b = phi_quadrature(mr, k, h, tl)
        print(f"k={k} t={tl:.1f}: closed form {a: .15f}  quadrature {b: .15f}")

# The integral of one step of s over [t_j, t_j+1], seen from t_m. The exact
# value needs the time factors t E_{rho,2}(-lam t^rho); dropping them
# (a plain difference of E_{rho,2} values) is wrong by a visible amount.
tm, lo, hi = 0.6, 0.2, 0.3
exact = integrate.quad(lambda s: scalar_resolvent(mr, tm - s), lo, hi, epsabs=1e-14)[0]
e2 = lambda z: float(mlf(MlfParams(1.75, 2.0), -lam * z**1.75))
with_factors = (tm - lo) * e2(tm - lo) - (tm - hi) * e2(tm - hi)
without = e2(tm - lo) - e2(tm - hi)
print(f"step integral {exact:.12f}, with time factors {with_factors:.12f}, without {without:.12f}")
