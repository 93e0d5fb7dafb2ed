"""Arbitrary-precision reference implementations used as test oracles.

Written directly from the defining formulas with mpmath at 40 digits;
nothing here imports the package under test.
"""

import mpmath as mp

mp.mp.dps = 40

HALF = mp.mpf(1) / 2
SQRT2 = mp.sqrt(2)


def log2(x):
    return mp.log(x, 2)


def h(p):
    p = mp.mpf(p)
    if p in (0, 1):
        return mp.mpf(0)
    return -p * log2(p) - (1 - p) * log2(1 - p)


def vn_bound(beta):
    beta = mp.mpf(beta)
    if beta <= 2:
        return mp.mpf(0)
    return 1 - h(HALF + mp.sqrt(min((beta / 2) ** 2 - 1, 1)) / 2)


def hmin_bound(beta):
    beta = mp.mpf(beta)
    if beta <= 2:
        return mp.mpf(0)
    return -log2(HALF + mp.sqrt(max(2 - beta**2 / 4, 0)) / 2)


def test_prob(gamma):
    gamma = mp.mpf(gamma)
    # a double near 1/k stands for 1/k: snap within 1e-9 relative before the ceiling
    s_max = mp.ceil(1 / gamma * (1 - mp.mpf("1e-9")))
    return 1 - (1 - gamma) ** s_max, int(s_max)


def s_bar(gamma):
    norm, _ = test_prob(gamma)
    return norm / mp.mpf(gamma)


def g_tradeoff(ratio, gamma):
    r = mp.mpf(ratio)
    return s_bar(gamma) * (1 - h(HALF + mp.sqrt(16 * r * (r - 1) + 3) / 2))


def f_min_tangent(p1_ratio, pt_ratio, gamma):
    """Tangent of g at pt, differentiated numerically in the unnormalized p(1)."""
    norm, _ = test_prob(gamma)
    g = lambda p1: g_tradeoff(p1 / norm, gamma)  # noqa: E731
    pt = mp.mpf(pt_ratio) * norm
    p1 = mp.mpf(p1_ratio) * norm
    slope = mp.diff(g, pt)
    return slope * p1 + g(pt) - slope * pt


def ec_leakage_collective(n, gamma, q, omega, eps_ecp, eps_ec):
    n, gamma, eps_ecp, eps_ec = (mp.mpf(v) for v in (n, gamma, eps_ecp, eps_ec))
    lead = n * ((1 - gamma) * h(q) + gamma * h(omega))
    root = mp.sqrt(n) * 4 * log2(2 * SQRT2 + 1) * mp.sqrt(log2(8 / eps_ecp**2))
    return lead + root + log2(8 / eps_ecp**2 + 2 / (2 - eps_ecp)) + log2(1 / eps_ec)


def ec_leakage_coherent(n, gamma, q, omega, eps_ecp, eps_ec, eps_t):
    n, gamma, eps_ecp, eps_ec, eps_t = (mp.mpf(v) for v in (n, gamma, eps_ecp, eps_ec, eps_t))
    m = n / s_bar(gamma)
    t = mp.sqrt(m * (1 - gamma) ** 2 * mp.log(1 / eps_t) / (2 * gamma**2))
    nu_ec = 4 * log2(2 * SQRT2 + 1) * mp.sqrt(2 * log2(8 / (eps_ecp - 2 * mp.sqrt(eps_t)) ** 2))
    lead = (n + t) * ((1 - gamma) * h(q) + gamma * h(omega))
    return lead + mp.sqrt(n + t) * nu_ec + log2(8 / eps_ecp**2 + 2 / (2 - eps_ecp)) + log2(1 / eps_ec)


def nu_one(omega_exp, delta_est, gamma, eps_s):
    w = mp.mpf(omega_exp) + mp.mpf(delta_est)
    norm, _ = test_prob(gamma)
    grad = mp.ceil(abs(log2((1 - w) / w)) / norm)
    return 2 * (log2(7) + grad) * mp.sqrt(1 - 2 * log2(mp.mpf(eps_s)))


def omega_of_beta(beta):
    return (4 + mp.mpf(beta)) / 8


def depolarizing_threshold(bound):
    f = lambda q: bound(2 * SQRT2 * (1 - 2 * q)) - h(q)  # noqa: E731
    return mp.findroot(f, (mp.mpf("0.03"), mp.mpf("0.09")), solver="bisect")


def vn_of_omega(w):
    return vn_bound(8 * mp.mpf(w) - 4)


def collective_total(kind, n, gamma, omega_exp, q, delta_est, delta_con, eps_s, eps_ec, eps_ecp, eps_pa, eps_con):
    n = mp.mpf(n)
    w = mp.mpf(omega_exp) - mp.mpf(delta_est) - mp.mpf(delta_con)
    pref = 4 * log2(2 * SQRT2 + 1)
    leak = n * ((1 - mp.mpf(gamma)) * h(q) + mp.mpf(gamma) * h(omega_exp))
    ec_root = mp.sqrt(log2(8 / mp.mpf(eps_ecp) ** 2))
    const = log2(8 / mp.mpf(eps_ecp) ** 2 + 2 / (2 - mp.mpf(eps_ecp))) + log2(1 / mp.mpf(eps_ec))
    const += 2 * log2(1 / (2 * mp.mpf(eps_pa)))
    if kind == "collective-aep":
        entropy = n * vn_of_omega(w)
        roots = mp.sqrt(n) * pref * (mp.sqrt(log2(2 / mp.mpf(eps_s) ** 2)) + ec_root)
    else:
        entropy = n * hmin_bound(8 * w - 4)
        roots = mp.sqrt(n) * pref * ec_root
        const += 2 * log2(1 / (mp.mpf(eps_con) + mp.mpf(eps_ec)))
    return entropy - leak - roots - const


def coherent_total(n, gamma, omega_exp, q, delta_est, eps_s, eps_ec, eps_ecp, eps_pa, eps_ea, eps_t, pt_ratio):
    """Coherent key length at a fixed tangent point, every term from its definition."""
    n, gamma, eps_s = mp.mpf(n), mp.mpf(gamma), mp.mpf(eps_s)
    norm, s_max = test_prob(gamma)
    sb = norm / gamma
    m = n / sb
    w_obs = mp.mpf(omega_exp) - mp.mpf(delta_est)
    g = lambda p1: g_tradeoff(p1 / norm, gamma)  # noqa: E731
    slope = mp.diff(g, mp.mpf(pt_ratio) * norm)
    f_min = f_min_tangent(w_obs, pt_ratio, gamma)
    factor = mp.sqrt(1 - 2 * log2(eps_s))
    nu_trade = 2 * (log2(1 + 6 * mp.mpf(2) ** s_max) + mp.ceil(slope)) * factor
    eta = f_min - nu_trade / mp.sqrt(m)
    nu1 = nu_one(omega_exp, delta_est, gamma, eps_s)
    leak = ec_leakage_coherent(n, gamma, q, omega_exp, eps_ecp, eps_ec, eps_t)
    x = eps_s / (4 * (mp.mpf(eps_ea) + mp.mpf(eps_ec)))
    chain = 3 * log2(1 - mp.sqrt(1 - x**2))
    return m * eta - m * h(w_obs) - mp.sqrt(m) * nu1 - leak + chain - 2 * log2(1 / (2 * mp.mpf(eps_pa)))
