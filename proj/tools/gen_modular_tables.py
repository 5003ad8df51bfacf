#!/usr/bin/env python3
"""Generate exact integer coefficient tables for the classical modular
polynomials Phi_N, N = 1..5, and emit them as C++ source.

Method (Kronecker): for each N, form

    Phi_N(X, j(tau)) = prod_{(a,b,d)} (X - j((a tau + b)/d))

over the psi(N) triples a*d = N, 0 <= b < d, gcd(a,b,d) = 1.  Each factor is
expanded as a Laurent series in t = q^(1/N) with complex coefficients
(roots of unity zeta_d^b), the product is taken with truncation, and the
X^k coefficients -- power series in q with a pole -- are reduced against the
integer q-expansion of j itself.  The reduction coefficients are the integer
entries of Phi_N.

Safety checks:
  * all non-multiple-of-N exponents in t cancel below 1e-40 of scale,
  * reduction remainders vanish below 1e-30 of scale,
  * every coefficient rounds to an integer within 1e-25 relative,
  * the table is symmetric in X, Y for N >= 2,
  * Phi_2 matches its textbook coefficients exactly,
  * Phi_N(j(tau), j(N tau)) ~ 0 at random tau via mpmath.kleinj.

Output: core/src/modular_poly_tables.cpp (decimal strings + doubles).
Run from the repository root:  python3 tools/gen_modular_tables.py
"""

import math
from fractions import Fraction

import mpmath as mp

mp.mp.dps = 260

N_MAX = 5
JCOEFF_COUNT = 52  # c_{-1} .. c_50


def j_integer_coeffs(count):
    """q-expansion of j: c_{-1}=1, c_0=744, ... via E4^3 / Delta, exact."""
    n = count + 2
    # E4 = 1 + 240 sum sigma_3(k) q^k
    e4 = [0] * n
    e4[0] = 1
    for k in range(1, n):
        s3 = sum(d ** 3 for d in range(1, k + 1) if k % d == 0)
        e4[k] = 240 * s3

    def mul(a, b):
        out = [0] * n
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for k in range(n - i):
                bk = b[k]
                if bk:
                    out[i + k] += ai * bk
        return out

    e4_3 = mul(mul(e4, e4), e4)

    # eta^3 = sum (-1)^k (2k+1) q^(k(k+1)/2)  (Jacobi), Delta = q * (eta^3)^8
    eta3 = [0] * n
    k = 0
    while k * (k + 1) // 2 < n:
        eta3[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    p2 = mul(eta3, eta3)
    p4 = mul(p2, p2)
    p8 = mul(p4, p4)  # Delta / q, unit series starting with 1

    # j*q = E4^3 / p8: divide power series by a unit.
    quot = [0] * n
    for k in range(n):
        acc = e4_3[k]
        for i in range(1, k + 1):
            acc -= p8[i] * quot[k - i]
        assert acc % p8[0] == 0
        quot[k] = acc // p8[0]
    # quot[k] is coefficient of q^(k-1) in j.
    assert quot[0] == 1 and quot[1] == 744 and quot[2] == 196884
    assert quot[3] == 21493760
    return quot  # index k <-> exponent k-1


class TSeries:
    """Laurent series in t with mpc coefficients, dict exponent -> coeff."""

    def __init__(self, data=None):
        self.c = dict(data or {})

    def __mul__(self, other):
        out = {}
        for e1, c1 in self.c.items():
            for e2, c2 in other.c.items():
                e = e1 + e2
                out[e] = out.get(e, mp.mpc(0)) + c1 * c2
        return TSeries(out)

    def truncate(self, emax):
        return TSeries({e: c for e, c in self.c.items() if e <= emax})


def poly_mul_trunc(p, q, emax):
    """Multiply polynomials in X whose coefficients are TSeries."""
    out = [TSeries() for _ in range(len(p) + len(q) - 1)]
    for i, pi in enumerate(p):
        for k, qk in enumerate(q):
            for e1, c1 in pi.c.items():
                for e2, c2 in qk.c.items():
                    e = e1 + e2
                    if e <= emax:
                        tgt = out[i + k].c
                        tgt[e] = tgt.get(e, mp.mpc(0)) + c1 * c2
    return out


def build_phi(N, jq):
    reps = []
    for a in range(1, N + 1):
        if N % a:
            continue
        d = N // a
        for b in range(d):
            if math.gcd(math.gcd(a, b), d) == 1:
                reps.append((a, b, d))
    psi = len(reps)

    kpos = 2 * N                      # keep t-exponents up to q^2
    total_min = -sum(a * a for a, _, _ in reps)

    # Product of (X - f_{a,b,d}) as polynomial in X over TSeries in t.
    # Intermediate truncation keeps room for the poles of unprocessed factors.
    prod = [TSeries({0: mp.mpc(1)})]
    remaining_min = total_min
    for a, b, d in reps:
        cap = kpos - total_min + (-a * a)
        ser = {}
        nmax = cap // (a * a)
        for n in range(-1, nmax + 1):
            cn = mp.mpf(jq[n + 1])
            if cn == 0:
                continue
            zeta = mp.e ** (2j * mp.pi * ((b * n) % d) / d) if d > 1 else mp.mpc(1)
            e = a * a * n
            ser[e] = ser.get(e, mp.mpc(0)) + cn * zeta
        # (X - f): constant term -f, X term 1
        factor = [TSeries({e: -c for e, c in ser.items()}), TSeries({0: mp.mpc(1)})]
        remaining_min -= -a * a
        prod = poly_mul_trunc(prod, factor, kpos - remaining_min)

    assert len(prod) == psi + 1

    # Collapse t-exponents to q-exponents; assert fractional parts vanish.
    scale = max(
        (abs(c) for ts in prod for c in ts.c.values()), default=mp.mpf(1)
    )
    qser = []
    for ts in prod:
        col = {}
        for e, c in ts.c.items():
            if e % N:
                assert abs(c) < scale * mp.mpf("1e-40"), (N, e, abs(c) / scale)
            else:
                col[e // N] = col.get(e // N, mp.mpc(0)) + c
        qser.append(col)

    # Reduce each X^k coefficient against powers of j.  j^m must be accurate
    # on (-m, 2], which needs j itself far past exponent 2; window shrinks as
    # the power grows so each recursive product stays exact on its window.
    max_pole = -total_min // N
    jfull = {n - 1: mp.mpc(jq[n]) for n in range(len(jq))}
    jpow = {0: {0: mp.mpc(1)}, 1: dict(jfull)}

    def get_jpow(m):
        if m not in jpow:
            lower = get_jpow(m - 1)
            window = 2 + (max_pole - m)
            out = {}
            for e1, c1 in lower.items():
                for e2, c2 in jfull.items():
                    e = e1 + e2
                    if e <= window:
                        out[e] = out.get(e, mp.mpc(0)) + c1 * c2
            jpow[m] = out
        return jpow[m]

    # True reduction coefficients are integers, so anything below 1/2 in
    # absolute value is cancellation noise (the working precision keeps the
    # noise floor far below that even at the 1e47 coefficient scale).
    table = {}  # (k, m) -> mpf coefficient
    for k, col in enumerate(qser):
        cur = dict(col)
        while cur:
            emin = min(cur)
            lead = cur[emin]
            if abs(lead) < mp.mpf("0.5"):
                del cur[emin]
                continue
            assert emin <= 0, (N, k, emin, abs(lead) / scale)
            m = -emin
            jp = get_jpow(m)
            for e, c in jp.items():
                if e <= 2:
                    cur[e] = cur.get(e, mp.mpc(0)) - lead * c
            assert abs(cur[emin]) < mp.mpf("0.5")
            del cur[emin]
            table[(k, m)] = table.get((k, m), mp.mpc(0)) + lead

    # Round to integers with margin checks.
    itab = {}
    for (k, m), c in table.items():
        assert abs(mp.im(c)) < scale * mp.mpf("1e-30")
        r = mp.re(c)
        ri = int(mp.nint(r))
        assert abs(r - ri) < mp.mpf("1e-25") * max(1, abs(r)), (N, k, m, r)
        if ri:
            itab[(k, m)] = ri

    # Symmetry (N >= 2) and degree sanity.
    if N >= 2:
        for (k, m), v in itab.items():
            assert itab.get((m, k)) == v, (N, k, m)
    assert itab[(psi, 0)] == 1
    return psi, itab


def check_phi2(itab):
    known = {
        (3, 0): 1, (0, 3): 1, (2, 2): -1,
        (2, 1): 1488, (1, 2): 1488,
        (2, 0): -162000, (0, 2): -162000,
        (1, 1): 40773375,
        (1, 0): 8748000000, (0, 1): 8748000000,
        (0, 0): -157464000000000,
    }
    assert itab == known, itab


def check_roots(N, itab):
    for tau in (mp.mpc(0.11, 1.3), mp.mpc(-0.37, 0.9)):
        x = mp.kleinj(tau) * 1728
        y = mp.kleinj(N * tau) * 1728
        val = mp.mpc(0)
        scale = mp.mpf(0)
        for (k, m), c in itab.items():
            term = mp.mpf(c) * x ** k * y ** m
            val += term
            scale = max(scale, abs(term))
        assert abs(val) < scale * mp.mpf("1e-60"), (N, abs(val) / scale)


def emit(tables, path):
    lines = []
    lines.append("// Classical modular polynomial coefficient tables, levels 1..5.")
    lines.append("// Generated by tools/gen_modular_tables.py (Kronecker product of")
    lines.append("// (X - j((a*tau+b)/d)) over a*d = N, reduced against the integer")
    lines.append("// q-expansion of j).  Do not edit by hand; rerun the script.")
    lines.append("")
    lines.append('#include "modular_poly_tables.hpp"')
    lines.append("")
    lines.append("namespace ecw::detail {")
    lines.append("")
    for N, (psi, itab) in tables.items():
        rows = sorted(itab.items(), key=lambda kv: (-kv[0][0], -kv[0][1]))
        lines.append(f"const ModularPolyEntry kPhi{N}[] = {{")
        for (k, m), v in rows:
            lines.append(f'    {{{k}, {m}, {float(v)!r}, "{v}"}},')
        lines.append("};")
        lines.append(f"const std::size_t kPhi{N}Count = {len(rows)};")
        lines.append(f"const int kPhi{N}Degree = {psi};")
        lines.append("")
    lines.append("} // namespace ecw::detail")
    lines.append("")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
    print(f"wrote {path}")


def main():
    jq = j_integer_coeffs(JCOEFF_COUNT)
    tables = {}
    for N in range(1, N_MAX + 1):
        psi, itab = build_phi(N, jq)
        if N == 2:
            check_phi2(itab)
        check_roots(N, itab)
        tables[N] = (psi, itab)
        print(f"Phi_{N}: degree {psi}, {len(itab)} nonzero coefficients")
    emit(tables, "core/src/modular_poly_tables.cpp")


if __name__ == "__main__":
    main()
