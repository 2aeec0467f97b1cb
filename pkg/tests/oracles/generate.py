"""Independent high-precision reference values frozen into the tests.

Run with ``python tests/oracles/generate.py`` (needs mpmath).  Nothing here
imports the package: closed forms and bisection only, at 30 digits.
"""
from mpmath import mp, mpf, quad, log, atan, sqrt, pi, tan, sin, cos, exp, inf
mp.dps = 30

def bisect(fn, lo, hi, n=200):
    flo = fn(lo)
    for _ in range(n):
        mid = (lo + hi) / 2
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2

# cutoff resonance b=10, vt=4
h = lambda k: 1 + (mpf(4)/k)*log((10-k)/(10+k))
print("cutoff res", bisect(h, mpf(6), mpf(8)))
print("root fn ln((10-x)/(10+x))+x/4", bisect(lambda x: log((10-x)/(10+x)) + x/4, mpf(6), mpf(8)))
# cutoff weak coupling vt=1/pi
h2 = lambda k: 1 + (1/(pi*k))*log((10-k)/(10+k))
r = bisect(h2, mpf(9), mpf(10)-mpf('1e-25'))
print("cutoff vt=1/pi gap", 10 - r)
# kempf res
print("kempf res", sqrt(pi-1))
# kempf energy beta=0.01
for beta in [mpf(1), mpf('0.1'), mpf('0.01'), mpf('1e-4'), mpf('1e-6')]:
    s = pi*(1/pi)*sqrt(beta)
    E = -(1+2*s-sqrt(1+4*s))/(4*beta)
    ser = -mpf(1)/2 + sqrt(beta) - mpf(5)/2*beta
    print("beta", beta, "E", E, "series defect", ser - E)
# cutoff bound b=10 vt=1/pi: (2 vt/q) atan(b/q)=1
q = bisect(lambda q: (2/(pi*q))*atan(10/q) - 1, mpf('0.1'), mpf(10))
print("cutoff bound q", q, "E", -q**2/2)
print("G cutoff b=10,k=1", log(mpf(9)/11))
print("tilde_delta b=10 x=0.1", sin(1)/(mpf('0.1')*pi))
# Kempf b=1 and b=10 bound q (V0=1, hbar=m=1, vt=1/pi)
for b in [1, 10]:
    sb = pi/(2*b)
    q = (-1 + sqrt(1 + 4*sb))/(2*sb)
    I2 = quad(lambda p: 1/(tan(sb*p)**2/sb**2 + q**2)**2, [-b, 0, b])
    N = 1/sqrt(2*pi*I2)
    Nclosed = (1+sb*q)*q**mpf(1.5)/(pi*sqrt(1+2*sb*q))
    psi0 = N*pi   # psi(0) = N * int h = N / vt
    print("kempf b", b, "q", q, "N", N, "Nclosed", Nclosed, "psi0", psi0)
