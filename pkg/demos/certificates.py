"""Non-vanishing certificates for the kernel series, and the m0 scan over a rectangle.

Run: python3 demos/certificates.py
"""

from halfpoincare.certificates import RectangleSpec, certify_reflected, certify_strip, find_m0_rectangle, region_integrals

# level 4 has h N = 4; the strip inequality fails there but holds at level 20 (h N = 20)
for level, s in ((4, 3.0), (20, 2.0)):
    rep = certify_strip("13/2", 1.0, float(level), s)
    print(f"level {level}, s = {s}: {rep.verdict}")
    for c in rep.checks:
        print(f"   {c.name}: {c.lhs:.6g} vs {c.rhs:.6g} -> {'pass' if c.passed else 'fail'}")

r = region_integrals("13/2", 1.0, 20.0, 2.0)
print(f"I_S = {r.I_S:.6g} > I_Sc = {r.I_Sc:.6g} (upper bound {r.upper_strip:.6g})")

rep = certify_reflected("13/2", 1.0, 20.0, 3.5)
print(f"reflected certificate at s = 3.5, level 20: {rep.verdict}, "
      f"binding branch {rep.intermediates['binding_branch']}")

for eta in (0.5, 1.0, 2.0):
    res = find_m0_rectangle(RectangleSpec(1.0, 2.0, eta))
    print(f"eps = 1, nu = 2, eta = {eta}: m0 = {res.m0}")
