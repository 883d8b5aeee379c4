#!/usr/bin/env python3
"""Generate the synthetic proton grid at data/synthetic-proton.dat.

Analytic, scale-independent parton densities with conventional shapes:

    x u_v = A_u x^0.8 (1-x)^3        (2 valence up quarks)
    x d_v = A_d x^0.8 (1-x)^4        (1 valence down quark)
    x g   = A_g x^-dg (1-x)^5
    x S   = A_s x^-ds (1-x)^7        (light sea, per flavor)

    u = u_v + S, d = d_v + S, ubar = dbar = S,
    s = sbar = 0.5 S, c = cbar = 0.2 S, b = bbar = 0.1 S

Valence normalizations fix the counting sum rules, the gluon
normalization closes the momentum sum, and (dg, A_s) are solved so the
threshold gg/qqbar luminosity ratio at m = 346 GeV crosses

    64/21          at sqrt(s) =  5 TeV   (equal channel yields)
    (1+sqrt(2)) * 64/21  at 10 TeV       (gg weight 1/sqrt(2))

which places the channel-weight crossings of a pp machine at those
energies. The script prints a verification table; the repository's
acceptance tests re-check everything through the Rust implementation.
"""

import argparse

import numpy as np
from scipy.optimize import brentq, fsolve
from scipy.special import beta as B

M_TOP = 173.0
M_THRESHOLD = 2.0 * M_TOP
A_RATIO = 21.0 / 64.0  # angle-averaged gg/qqbar weight at threshold

# fixed shape exponents; the valence fall-off steers where the high-mass
# CHSH average of a 2 TeV ppbar machine crosses 2 (see chsh_crossing_beta)
A_VAL = 0.8
B_UV, B_DV = 3.22, 4.22
B_G, B_S = 5.0, 7.0
DS = 0.16
R_S, R_C, R_B = 0.5, 0.2, 0.1


def valence_norms():
    a_u = 2.0 / B(A_VAL, B_UV + 1.0)
    a_d = 1.0 / B(A_VAL, B_DV + 1.0)
    return a_u, a_d


def gluon_norm(dg, a_s):
    """Close the momentum sum rule."""
    a_u, a_d = valence_norms()
    m_val = a_u * B(A_VAL + 1.0, B_UV + 1.0) + a_d * B(A_VAL + 1.0, B_DV + 1.0)
    sea_mult = 4.0 + 2.0 * (R_S + R_C + R_B)
    m_sea = sea_mult * a_s * B(1.0 - DS, B_S + 1.0)
    m_g = 1.0 - m_val - m_sea
    if m_g <= 0.0:
        raise ValueError(f"sea too large for the momentum sum: {m_sea:.3f}")
    return m_g / B(1.0 - dg, B_G + 1.0)


def make_pdfs(dg, a_s):
    a_g = gluon_norm(dg, a_s)
    a_u, a_d = valence_norms()

    def xuv(x):
        return a_u * x**A_VAL * (1.0 - x) ** B_UV

    def xdv(x):
        return a_d * x**A_VAL * (1.0 - x) ** B_DV

    def xsea(x):
        return a_s * x**-DS * (1.0 - x) ** B_S

    def xg(x):
        return a_g * x**-dg * (1.0 - x) ** B_G

    table = {
        1: lambda x: xdv(x) + xsea(x),
        2: lambda x: xuv(x) + xsea(x),
        3: lambda x: R_S * xsea(x),
        4: lambda x: R_C * xsea(x),
        5: lambda x: R_B * xsea(x),
        -1: xsea,
        -2: xsea,
        -3: lambda x: R_S * xsea(x),
        -4: lambda x: R_C * xsea(x),
        -5: lambda x: R_B * xsea(x),
        21: xg,
    }
    return table, a_g


def luminosity(table, pairs, m, sqrt_s, n=2001):
    """(2x/sqrt_s) * integral over s of sum_f N1(x e^s) N2(x e^-s)."""
    x = m / sqrt_s
    s = np.linspace(np.log(x), -np.log(x), n)
    u1 = np.clip(x * np.exp(s), 1e-300, 1.0)
    u2 = np.clip(x * np.exp(-s), 1e-300, 1.0)
    total = np.zeros_like(s)
    for f1, f2 in pairs:
        total += table[f1](u1) / u1 * table[f2](u2) / u2
    return 2.0 * x / sqrt_s * np.trapezoid(total, s)


def channel_lumis(table, m, sqrt_s, ppbar=False):
    flip = -1 if ppbar else 1
    qq_pairs = []
    for f in (1, 2, 3, 4, 5):
        qq_pairs.append((f, flip * -f))
        qq_pairs.append((-f, flip * f))
    l_qq = luminosity(table, qq_pairs, m, sqrt_s)
    l_gg = luminosity(table, [(21, 21)], m, sqrt_s)
    return l_qq, l_gg


def threshold_ratio(dg, a_s, sqrt_s):
    table, _ = make_pdfs(dg, a_s)
    l_qq, l_gg = channel_lumis(table, M_THRESHOLD, sqrt_s)
    return l_gg / l_qq


def solve_parameters():
    t5 = 1.0 / A_RATIO                    # w_gg = 1/2 at 5 TeV
    t10 = (1.0 + np.sqrt(2.0)) / A_RATIO  # w_gg = 1/sqrt(2) at 10 TeV

    def residuals(p):
        dg, a_s = p
        return [
            threshold_ratio(dg, a_s, 5_000.0) - t5,
            threshold_ratio(dg, a_s, 10_000.0) - t10,
        ]

    sol, info, ok, msg = fsolve(residuals, [0.30, 0.10], full_output=True)
    if ok != 1:
        raise RuntimeError(f"calibration failed: {msg}")
    return float(sol[0]), float(sol[1])


# --- verification helpers -------------------------------------------------


def a_mean_qq(beta):
    return (1.0 - beta**2 / 3.0) / 9.0


def a_mean_gg(beta, nodes=400):
    c, w = np.polynomial.legendre.leggauss(nodes)
    s2 = 1.0 - beta**2 * c**2
    f = (7.0 + 9.0 * beta**2 * c**2) / (192.0 * s2**2)
    s_th2 = 1.0 - c**2
    integrand = f * (1.0 + 2.0 * beta**2 * s_th2 - beta**4 * (1.0 + s_th2**2))
    return 0.5 * np.sum(w * integrand)


def w_gg_threshold(table, sqrt_s, ppbar=False):
    l_qq, l_gg = channel_lumis(table, M_THRESHOLD, sqrt_s, ppbar)
    r_gg = l_gg * A_RATIO
    return r_gg / (r_gg + l_qq)


def gluon_fraction(table, sqrt_s, ppbar=False, nm=400):
    masses = np.linspace(M_THRESHOLD + 1e-3, sqrt_s * 0.999, nm)
    betas = np.sqrt(1.0 - (M_THRESHOLD / masses) ** 2)
    y_qq, y_gg = np.zeros(nm), np.zeros(nm)
    for i, (m, b) in enumerate(zip(masses, betas)):
        l_qq, l_gg = channel_lumis(table, m, sqrt_s, ppbar)
        y_qq[i] = b / m**2 * l_qq * a_mean_qq(b)
        y_gg[i] = b / m**2 * l_gg * a_mean_gg(b)
    n_qq = np.trapezoid(y_qq, masses)
    n_gg = np.trapezoid(y_gg, masses)
    return n_gg / (n_gg + n_qq)


def r_coeffs_np(beta, c):
    """Unnormalized helicity-basis coefficients (order k, r, n) for both
    channels on an array of cos(Theta) values."""
    b2, s2 = beta**2, 1.0 - c**2
    sin2t = 2.0 * c * np.sqrt(s2)  # sin(2 Theta) with sin(Theta) >= 0
    fq = 1.0 / 18.0
    q_a = fq * (2.0 - b2 * s2)
    q_rr = fq * (2.0 - b2) * s2
    q_nn = -fq * b2 * s2
    q_kk = fq * (2.0 - (2.0 - b2) * s2)
    q_rk = fq * np.sqrt(1.0 - b2) * sin2t
    den = 1.0 - b2 * c**2
    fg = (7.0 + 9.0 * b2 * c**2) / (192.0 * den**2)
    quart = 1.0 + s2**2
    g_a = fg * (1.0 + 2.0 * b2 * s2 - beta**4 * quart)
    g_rr = -fg * (1.0 - b2 * (2.0 - b2) * quart)
    g_nn = -fg * (1.0 - 2.0 * b2 + beta**4 * quart)
    g_kk = -fg * (1.0 - b2 * sin2t**2 / 2.0 - beta**4 * quart)
    g_rk = fg * np.sqrt(1.0 - b2) * b2 * sin2t * s2
    return (q_a, q_kk, q_rr, q_nn, q_rk), (g_a, g_kk, g_rr, g_nn, g_rk)


def chsh_of_mix(beta, l_qq, l_gg, nodes=200):
    """Rate-weighted angular means (numerator, denominator) of the
    pointwise CHSH value of the luminosity-mixed state."""
    c, w = np.polynomial.legendre.leggauss(nodes)
    (q_a, q_kk, q_rr, q_nn, q_rk), (g_a, g_kk, g_rr, g_nn, g_rk) = r_coeffs_np(beta, c)
    rate = l_qq * q_a + l_gg * g_a
    kk = (l_qq * q_kk + l_gg * g_kk) / rate
    rr = (l_qq * q_rr + l_gg * g_rr) / rate
    nn = (l_qq * q_nn + l_gg * g_nn) / rate
    rk = (l_qq * q_rk + l_gg * g_rk) / rate
    # top two squared singular values of [[kk, rk, 0], [rk, rr, 0], [0, 0, nn]]
    avg = 0.5 * (kk + rr)
    dis = np.sqrt(0.25 * (kk - rr) ** 2 + rk**2)
    lam1, lam2 = (avg + dis) ** 2, (avg - dis) ** 2
    lam3 = nn**2
    mu = lam1 + lam2 + lam3 - np.minimum(lam1, np.minimum(lam2, lam3))
    chsh = 2.0 * np.sqrt(mu)
    return 0.5 * np.sum(w * rate * chsh), 0.5 * np.sum(w * rate)


def chsh_high_pt(table, m_cut, sqrt_s, ppbar=True, nm=240):
    """Spectrum-weighted CHSH of high-mass windows [m_cut, sqrt_s]."""
    masses = np.linspace(m_cut, sqrt_s * 0.999, nm)
    betas = np.sqrt(np.clip(1.0 - (M_THRESHOLD / masses) ** 2, 0.0, 1.0))
    num = np.zeros(nm)
    den = np.zeros(nm)
    for i, (m, b) in enumerate(zip(masses, betas)):
        l_qq, l_gg = channel_lumis(table, m, sqrt_s, ppbar)
        n, d = chsh_of_mix(b, l_qq, l_gg)
        num[i] = b / m**2 * n
        den[i] = b / m**2 * d
    return np.trapezoid(num, masses) / np.trapezoid(den, masses)


def chsh_crossing_beta(table, sqrt_s=2_000.0, ppbar=True):
    """Velocity at the window edge where the high-mass CHSH crosses 2."""
    f = lambda m: chsh_high_pt(table, m, sqrt_s, ppbar) - 2.0
    m_star = brentq(f, 360.0, 700.0, xtol=0.05)
    return np.sqrt(1.0 - (M_THRESHOLD / m_star) ** 2), m_star


# --- grid writer ----------------------------------------------------------

FLAVORS = [-5, -4, -3, -2, -1, 1, 2, 3, 4, 5, 21]


def write_grid(path, table, dg, a_s, a_g):
    x_small = np.geomspace(1e-7, 0.1, 181)
    x_large = np.linspace(0.1, 1.0, 91)[1:]
    xs = np.concatenate([x_small, x_large])
    assert np.all(np.diff(xs) > 0)
    qs = np.array([1.0, 2.0e5])

    lines = [
        "PdfType: central",
        "Format: lhagrid1",
        "SetDesc: synthetic proton, analytic shapes, scale independent",
        f"Parameters: dg={dg:.9f} as={a_s:.9f} ag={a_g:.9f}",
        "---",
    ]
    lines.append(" ".join(f"{x:.8e}" for x in xs))
    lines.append(" ".join(f"{q:.8e}" for q in qs))
    lines.append(" ".join(str(f) for f in FLAVORS))
    for x in xs:
        row = " ".join(f"{max(table[f](x), 0.0):.8e}" for f in FLAVORS)
        for _ in qs:
            lines.append(row)
    lines.append("---")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return len(xs), len(qs)


def main():
    global B_UV, B_DV, B_G
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--buv", type=float, default=B_UV)
    parser.add_argument("--bdv", type=float, default=B_DV)
    parser.add_argument("--bg", type=float, default=B_G)
    parser.add_argument("--skip-grid", action="store_true")
    args = parser.parse_args()
    B_UV, B_DV, B_G = args.buv, args.bdv, args.bg

    dg, a_s = solve_parameters()
    table, a_g = make_pdfs(dg, a_s)
    print(f"shapes: buv={B_UV} bdv={B_DV} bg={B_G}")
    print(f"solved: dg = {dg:.9f}, A_s = {a_s:.9f}, A_g = {a_g:.9f}")

    beta_star, m_star = chsh_crossing_beta(table)
    print(f"ppbar 2 TeV CHSH crossing: m_cut = {m_star:.1f} GeV, beta = {beta_star:.4f} (target 0.652 +- 0.01)")

    # crossing energies of the two channel-weight marks
    e_half = brentq(
        lambda e: w_gg_threshold(table, e) - 0.5, 2_000.0, 20_000.0, xtol=1.0
    )
    e_root2 = brentq(
        lambda e: w_gg_threshold(table, e) - 1.0 / np.sqrt(2.0),
        2_000.0,
        40_000.0,
        xtol=1.0,
    )
    print(f"w_gg = 1/2      at sqrt_s = {e_half:9.1f} GeV (target 5000 +- 1000)")
    print(f"w_gg = 1/sqrt2  at sqrt_s = {e_root2:9.1f} GeV (target 10000 +- 1500)")

    energies = [2e3, 5e3, 1e4, 2e4, 5e4, 1e5]
    w_curve = [w_gg_threshold(table, e) for e in energies]
    print("w_gg(pp):", " ".join(f"{w:.4f}" for w in w_curve))
    assert all(b > a for a, b in zip(w_curve, w_curve[1:])), "w_gg not monotone"

    f13 = gluon_fraction(table, 13_000.0)
    print(f"f_gg(pp, 13 TeV)   = {f13:.4f} (target 0.85..0.95)")
    w196 = w_gg_threshold(table, 1_960.0, ppbar=True)
    print(f"w_gg(ppbar, 1.96)  = {w196:.4f} (target < 0.5)")
    f100p = gluon_fraction(table, 100_000.0)
    f100b = gluon_fraction(table, 100_000.0, ppbar=True)
    print(f"f_gg at 100 TeV: pp {f100p:.5f}, ppbar {f100b:.5f}, diff {abs(f100p-f100b):.5f} (target < 0.02)")

    momentum = sum(
        np.trapezoid(table[f](xg := np.geomspace(1e-8, 1.0, 4001)), xg)
        for f in FLAVORS
    )
    print(f"momentum sum       = {momentum:.5f}")

    if not args.skip_grid:
        nx, nq = write_grid("data/synthetic-proton.dat", table, dg, a_s, a_g)
        print(f"wrote data/synthetic-proton.dat ({nx} x-knots, {nq} q-knots)")


if __name__ == "__main__":
    main()
