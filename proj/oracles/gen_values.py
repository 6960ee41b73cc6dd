#!/usr/bin/env python3
"""Generate frozen reference values for the C++ test suite.

Every number printed here is computed independently of the C++ code
(mpmath/scipy/sympy or brute-force Monte Carlo) and pasted into the
tests as a constant. Rerun to reproduce.
"""
import numpy as np
import mpmath as mp
from scipy.special import airy as sp_airy

mp.mp.dps = 30

def section(name):
    print("\n### " + name)

# ---------------------------------------------------------------- airy
section("airy values Ai(x), Ai'(x)")
for x in [-3.5, -1.0, 0.0, 0.7, 2.0, 6.0]:
    print(f"x={x:+.1f}  Ai={mp.nstr(mp.airyai(x), 17)}  Aip={mp.nstr(mp.airyai(x, 1), 17)}")

section("airy zeros (first 6)")
for k in range(1, 7):
    print(f"a_{k} = {mp.nstr(mp.airyaizero(k), 17)}")

# ------------------------------------------------- parabolic cylinder D
section("parabolic cylinder D_nu(x) [value; and (sign, log|D|)]")
cases = [(-0.7, -6.0), (-0.7, 0.0), (-0.7, 2.0), (0.5, -1.5), (0.5, 3.0),
         (1.0, -2.0), (3.0, -6.0), (3.0, 1.5), (6.2, -4.0), (6.2, 10.0),
         (0.37, -2.0), (2.6, 0.3), (1.0, -30.0), (5.0, -30.0), (0.74, -12.0)]
for nu, x in cases:
    v = mp.pcfd(nu, x)
    s = int(mp.sign(v))
    print(f"nu={nu:+.2f} x={x:+.1f}  D={mp.nstr(v, 17)}  sign={s}  log|D|={mp.nstr(mp.log(abs(v)), 17)}")

# --------------------------------------------------- boundary levels
section("roots eps of D_{2 eps}(-W) = 0")
def levels(W, n, eps_start=0.0, step=0.01, eps_max=40.0):
    f = lambda e: mp.pcfd(2 * e, -W)
    out = []
    e = eps_start + 1e-9
    fe = f(e)
    while len(out) < n and e < eps_max:
        e2 = e + step
        fe2 = f(e2)
        if mp.sign(fe) * mp.sign(fe2) < 0:
            lo, hi, flo = mp.mpf(e), mp.mpf(e2), fe
            while hi - lo > mp.mpf(10)**-22:
                mid = (lo + hi) / 2
                fm = f(mid)
                if mp.sign(fm) == mp.sign(flo):
                    lo, flo = mid, fm
                else:
                    hi = mid
            out.append((lo + hi) / 2)
        e, fe = e2, fe2
    return out

for W, n, start in [(30.0, 4, 0.0), (6.0, 7, 0.0), (1.0, 4, 0.0),
                    (0.0, 4, 0.0), (-2.0, 4, 0.0), (-5.0, 3, 2.0)]:
    ls = levels(W, n, eps_start=start)
    print(f"W={W:+.1f}: " + ", ".join(mp.nstr(r, 17) for r in ls))

# ----------------------------------------------- small-W perturbation
section("small-W expansion coefficients")
import math
def dE1(k):
    return -math.factorial(2 * k + 1) / (math.sqrt(2 * math.pi) * 4**k * math.factorial(k)**2)
def dE2(k, kmax=4000):
    tot = 0.0
    fk = math.factorial(2 * k + 1) / (math.pi * 2**(2 * k + 1) * math.factorial(k)**2)
    for kp in range(0, kmax + 1):
        if kp == k:
            continue
        term = (1.0 / (k - kp)) * (math.factorial(2 * kp + 1) / (4**kp * math.factorial(kp)**2)) \
               / (4.0 * (k - kp)**2 - 1.0)**2
        tot += term
    return fk * tot
for k in range(4):
    print(f"k={k}: dE1={dE1(k):.17g}  dE2={dE2(k):.17g}")
for N in [1, 2, 3]:
    c0 = N * N / 2.0
    c1 = -math.sqrt(2.0) / (3.0 * math.sqrt(math.pi)) * N * math.factorial(2 * N + 1) \
         / (4**N * math.factorial(N)**2)
    c2 = sum(dE2(k) for k in range(N)) + N / 8.0
    print(f"N={N}: c0={c0:.17g} c1={c1:.17g} c2={c2:.17g}")
    # cross-check against the level solver by finite differences
    d = mp.mpf('0.003')
    b = lambda w: sum(levels(float(w), N, eps_start=0.0))
    bp, b0, bm = b(d), b(0), b(-d)
    print(f"   fd: c1~{mp.nstr((bp-bm)/(2*d),10)} c2~{mp.nstr((bp-2*b0+bm)/d**2/2,10)}")
print(f"N=1 closed: c1={-1/math.sqrt(2*math.pi):.17g} c2={(1-math.log(2))/math.pi:.17g}")

# -------------------------------------------------- semiclassical b(y)
section("semiclassical scaling function b(y)")
def bfun(y):
    if y >= 1:
        return mp.mpf(1)
    g = lambda u: 1 / (2 * u**2) + mp.sqrt(1 - u**2) / (mp.pi * u) + mp.asin(u) / (mp.pi * u**2) - 1 / mp.mpf(y)**2
    s = 1 if y > 0 else -1
    lo, hi = s * mp.mpf(10)**-12, s * (1 - mp.mpf(10)**-15)
    if s < 0:
        lo, hi = hi, lo
    flo = g(lo)
    while hi - lo > mp.mpf(10)**-24:
        mid = (lo + hi) / 2
        fm = g(mid)
        if mp.sign(fm) == mp.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    u = (lo + hi) / 2
    return y**2 * (1 / u**2 - (2 / (3 * mp.pi)) * mp.mpf(y)**2 * (1 - u**2)**mp.mpf('1.5') / u**3)
for y in [-3.0, -1.0, -0.3, 0.3, 0.7, 0.95, 0.999, 2.0]:
    print(f"b({y:+.3f}) = {mp.nstr(bfun(mp.mpf(y)), 17)}")

# ------------------------------------- moments from (free) cumulants
section("moments from cumulants, free (non-crossing) and classical")
def partitions_of(s):
    s = list(s)
    if not s:
        yield []
        return
    first, rest = s[0], s[1:]
    for p in partitions_of(rest):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]
        yield [[first]] + p

def is_noncrossing(p):
    for a in p:
        for b in p:
            if a is b:
                continue
            for i in a:
                for j in a:
                    if i < j:
                        c = sum(1 for k in b if i < k < j)
                        if c != 0 and c != len(b):
                            return False
    return True

kap = [0.3, 1.2, -0.5, 0.7, 0.2, -0.1]   # kappa_1..kappa_6
for label, keep in [("free", True), ("classical", False)]:
    ms = []
    for n in range(1, 7):
        tot = 0.0
        for p in partitions_of(range(n)):
            if keep and not is_noncrossing(p):
                continue
            v = 1.0
            for blk in p:
                v *= kap[len(blk) - 1]
            tot += v
        ms.append(tot)
    print(label, " ".join(f"m{n}={m:.17g}" for n, m in enumerate(ms, 1)))
from math import comb
print("catalan:", [comb(2*n, n)//(n+1) for n in range(1, 9)])

# -------------------------------------- Stieltjes transforms by quadrature
section("Stieltjes transforms (quadrature of the density) at complex z")
def stj(rho, lo, hi, z):
    re = mp.quad(lambda x: rho(x) * ((z - x).real) / abs(z - x)**2, [lo, hi])
    im = mp.quad(lambda x: rho(x) * (-(z - x).imag) / abs(z - x)**2, [lo, hi])
    return mp.mpc(re, im)

sc = lambda s: (lambda x: mp.sqrt(4 * s**2 - x**2) / (2 * mp.pi * s**2))
z = mp.mpc('0.3', '1.1'); print("SC(sigma=1.3) g(0.3+1.1i) =", mp.nstr(stj(sc(mp.mpf('1.3')), -2.6, 2.6, z), 15))
z = mp.mpc(3, 0); print("SC(sigma=1) g(3) =", mp.nstr(stj(sc(mp.mpf(1)), -2, 2, z), 15))

def mp_density(q, s):
    mum = s**2 * (1 - mp.sqrt(q))**2
    mup = s**2 * (1 + mp.sqrt(q))**2
    return (lambda x: mp.sqrt((mup - x) * (x - mum)) / (2 * q * mp.pi * s**2 * x)), mum, mup
rho, lo, hi = mp_density(mp.mpf('0.5'), mp.mpf(1))
z = mp.mpc('2.5', '0.7'); print("MP(q=0.5,sigma=1) g(2.5+0.7i) =", mp.nstr(stj(rho, lo, hi, z), 15))

def imp_density(q, s):
    kk = (1 - q) / (2 * q)
    mum = (kk + 1 - mp.sqrt(2 * kk + 1)) / (kk * s**2)
    mup = (kk + 1 + mp.sqrt(2 * kk + 1)) / (kk * s**2)
    return (lambda x: kk * mp.sqrt((mup - x) * (x - mum)) / (mp.pi * s**2 * x**2)), mum, mup
rho, lo, hi = imp_density(mp.mpf('0.25'), mp.mpf(1))
print("IMP(q=0.25,sigma=1) support:", mp.nstr(lo, 15), mp.nstr(hi, 15))
print("IMP(q=0.25,sigma=1) integral:", mp.nstr(mp.quad(rho, [lo, hi]), 15))
z = mp.mpc(3, '0.5'); print("IMP(q=0.25,sigma=1) g(3+0.5i) =", mp.nstr(stj(rho, lo, hi, z), 15))

# ----------------------------------------------- Fredholm determinants
section("Fredholm dets: sine-kernel gap on [0,s]; F2(x) = det(1-K_Ai on [x,inf))")
def gauss_leg(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w

def fred_det(kfun, a, b, n):
    x, w = gauss_leg(n, a, b)
    X, Y = np.meshgrid(x, x, indexing='ij')
    K = kfun(X, Y)
    sw = np.sqrt(w)
    M = np.eye(n) - sw[:, None] * K * sw[None, :]
    return np.linalg.det(M)

def ksine(X, Y):
    D = np.pi * (X - Y)
    out = np.where(np.abs(D) < 1e-12, 1.0, np.sin(np.where(np.abs(D) < 1e-12, 1.0, D)) / np.where(np.abs(D) < 1e-12, 1.0, D))
    return out
for s in [0.5, 1.0, 2.0]:
    v80, v160 = fred_det(ksine, 0, s, 80), fred_det(ksine, 0, s, 160)
    print(f"E_sine(0,[0,{s}]) = {v160:.15g}   (delta {abs(v80-v160):.2e})")

def kairy(X, Y):
    aX, apX, _, _ = sp_airy(X)
    aY, apY, _, _ = sp_airy(Y)
    D = X - Y
    small = np.abs(D) < 1e-10
    Ds = np.where(small, 1.0, D)
    out = (aX * apY - apX * aY) / Ds
    diag = apX**2 - X * aX**2
    return np.where(small, diag, out)
for x0 in [-2.0, 0.0, 1.0]:
    v = fred_det(kairy, x0, x0 + 40.0, 160)
    v2 = fred_det(kairy, x0, x0 + 40.0, 200)
    print(f"F2({x0}) = {v2:.15g}   (delta {abs(v-v2):.2e})")

# ------------------------------------------------------ HCIZ Haar MC
section("HCIZ Haar-unitary MC, I_N(A,B) = E exp Tr(A U B U^dag)")
rng = np.random.default_rng(12345)
def haar(n, m):
    g = rng.normal(size=(m, n, n)) + 1j * rng.normal(size=(m, n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]
for a, b, m in [([0.0, 1.0], [0.0, 2.0], 400000), ([0.0, 0.5, 1.0], [0.0, 1.0, 2.0], 400000)]:
    n = len(a)
    U = haar(n, m)
    A = np.diag(a); B = np.diag(b)
    T = np.einsum('ij,mjk,kl,mil->m', A, U, B, np.conj(U)).real
    v = np.exp(T)
    print(f"N={n}: mean={v.mean():.15g} stderr={v.std(ddof=1)/np.sqrt(m):.6g}")

# ---------------------------------------------- Ferrari-Spohn density
section("Ferrari-Spohn P_FS(x), W=6, T=1")
a1 = mp.airyaizero(1)
ap1 = mp.airyai(a1, 1)
W = mp.mpf(6); T = mp.mpf(1)
pref = (4 * W)**(mp.mpf(1) / 3) / (mp.sqrt(T) * ap1**2)
PFS = lambda x: pref * mp.airyai(a1 + (4 * W)**(mp.mpf(1) / 3) * x / mp.sqrt(T))**2
print("normalization:", mp.nstr(mp.quad(PFS, [0, 4]), 15))
for x in ['0.1', '0.3', '0.6', '1.0']:
    print(f"P_FS({x}) = {mp.nstr(PFS(mp.mpf(x)), 15)}")
# mode
xs = [mp.mpf(i) / 1000 for i in range(1, 2000)]
vals = [PFS(x) for x in xs]
im = max(range(len(vals)), key=lambda i: vals[i])
print("mode x* =", mp.nstr(xs[im], 6))

section("generalized FS normalization, N=2, W=4, T=1")
a2 = mp.airyaizero(2)
ap2 = mp.airyai(a2, 1)
W = mp.mpf(4)
CN = (4 * W)**(mp.mpf(2) / 3) / (2 * 1 * ap1**2 * ap2**2)
f = (4 * W)**(mp.mpf(1) / 3)
def R2(x1, x2):
    d = mp.airyai(a1 + f * x1) * mp.airyai(a2 + f * x2) - mp.airyai(a1 + f * x2) * mp.airyai(a2 + f * x1)
    return CN * d**2
val = mp.quad(lambda x1: mp.quad(lambda x2: R2(x1, x2), [0, 5]), [0, 5])
print("int R2 =", mp.nstr(val, 12))
print("R2(0.3,0.9) =", mp.nstr(R2(mp.mpf('0.3'), mp.mpf('0.9')), 15))

# --------------------------------------------------- Morse kernel K_M
section("Morse beta=2 kernel diagonal, N=3, m=-1, sigma=1")
def morse_KM(x, y, N, m, sig):
    g = N - m / sig**2
    tot = mp.mpf(0)
    for k in range(N):
        Nk2 = mp.factorial(k) * (2 * g - 2 * k - 1) / mp.gamma(2 * g - k)
        e = g - k - mp.mpf(1) / 2
        lk = lambda t: mp.laguerre(k, 2 * g - 2 * k - 1, t)
        tot += (mp.mpf(2) / sig**2)**(2 * e) * Nk2 * mp.e**(-(x + y) * e) \
               * mp.e**(-(mp.e**(-x) + mp.e**(-y)) / sig**2) \
               * lk(2 * mp.e**(-x) / sig**2) * lk(2 * mp.e**(-y) / sig**2)
    return tot
N, m_, sig = 3, mp.mpf(-1), mp.mpf(1)
nrm = mp.quad(lambda x: morse_KM(x, x, N, m_, sig), [-5, 30])
print("trace =", mp.nstr(nrm, 15))
for x in ['-0.5', '0.5', '1.5', '3.0']:
    print(f"K_M({x},{x})/N = {mp.nstr(morse_KM(mp.mpf(x), mp.mpf(x), N, m_, sig) / N, 15)}")
E0 = -N * (2 * m_ - sig**2)**2 / (4 * sig**4) + (N * (N - 1) / mp.mpf(4)) * (4 * m_ / sig**2 - 2 * 4 / mp.mpf(2)) \
     - N * (N - 1) * (N - 2) * 4 / mp.mpf(12)
print("E0(beta=2 formula) =", mp.nstr(E0, 15))
print("sum eps_k =", mp.nstr(sum(-(N - m_ / sig**2 - k - mp.mpf(1) / 2)**2 for k in range(N)), 15))

# ----------------------------------------- biorthogonal Laguerre density
section("biorthogonal Laguerre (theta=1/2) density, N=5")
def biorth_rho(z, N):
    tot = mp.mpf(0)
    for k in range(N):
        for i in range(N):
            pref = mp.gamma(N + 2 * (i + 1)) / (mp.gamma(mp.mpf(k) / 2 + 1) * mp.gamma(2 * (i + 1)))
            s2 = mp.mpf(0)
            for r in range(i, N):
                s2 += mp.power(z, r) / (mp.factorial(r - i))
            term = pref * (-1)**(i + k) / (mp.factorial(k) * mp.factorial(N - k - 1) * mp.factorial(i)) \
                   * mp.power(z, mp.mpf(k) / 2) * s2 / (mp.mpf(k) / 2 + i + 1)
            tot += term
    return tot * mp.e**(-z) / 2 / N   # K(z,z) has e^{-(z+z')/2}
print("int rho_z =", mp.nstr(mp.quad(lambda z: biorth_rho(z, 5), [0, 60]), 12))
for z in ['0.5', '2.0', '5.0']:
    print(f"rho_z({z}) = {mp.nstr(biorth_rho(mp.mpf(z), 5), 15)}")
