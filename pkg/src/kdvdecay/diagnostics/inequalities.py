"""Functional inequalities evaluated with discrete norms."""

import numpy as np

from ..core.operators import node_derivative, quadrature

SLACK = 1.05
EPSILONS = (0.5, 1.0)


def young_constant(eps):
    """Smallest c with sqrt(2) a^(1/2) b^(5/2) <= eps a^2 + c b^(10/3) for all a, b >= 0."""
    return 0.75 * np.sqrt(2.0) * (np.sqrt(2.0) / (4.0 * eps)) ** (1.0 / 3.0)


def _entry(lhs, rhs, slack):
    lhs, rhs = float(lhs), float(rhs)
    return {"lhs": lhs, "rhs": rhs, "margin": rhs - lhs,
            "ratio": (lhs / rhs) if rhs > 0 else (0.0 if lhs == 0 else np.inf),
            "pass": bool(lhs <= slack * rhs)}


def check_inequalities(u, grid, b=0.25, eps=EPSILONS, slack=SLACK):
    """Both sides of the sup-norm, weighted interpolation, weighted Poincare and cubic bounds."""
    u = np.asarray(getattr(u, "u", u), dtype=float)
    x = grid.nodes
    ux = node_derivative(u, grid.dx)
    n_u = np.sqrt(quadrature(grid, u * u))
    n_ux = np.sqrt(quadrature(grid, ux * ux))
    e = np.exp(2.0 * b * x)
    n_ub = np.sqrt(quadrature(grid, e * u * u))
    n_uxb = np.sqrt(quadrature(grid, e * ux * ux))
    n_xu = np.sqrt(quadrature(grid, (x + 1.0) ** 2 * u * u))
    cube = quadrature(grid, np.abs(u) ** 3)
    out = {
        "moser": _entry(np.max(np.abs(u)), np.sqrt(2.0 * n_ux * n_u), slack),
        "weighted_interpolation": _entry(np.max(u * u * e), (2.0 + 2.0 * b) * n_ub * np.sqrt(n_ub**2 + n_uxb**2),
                                         slack),
        "weighted_poincare": _entry(n_ub**2, n_uxb**2 / b**2, slack),
        "weighted_cubic": _entry(2.0 / 3.0 * quadrature(grid, (x + 1.0) * np.abs(u) ** 3),
                                 2.0 * np.sqrt(2.0) / 3.0 * np.sqrt(n_ux) * n_u**1.5 * n_xu, slack),
    }
    for ep in eps:
        out[f"cubic_eps_{ep:g}"] = _entry(cube, ep * n_ux**2 + young_constant(ep) * n_u ** (10.0 / 3.0), slack)
    out["all_pass"] = all(v["pass"] for k, v in out.items())
    out["b"] = b
    return out


def empirical_cubic_constant(states, grid, eps):
    """Smallest c with int |u|^3 <= eps |u_x|^2 + c |u|^(10/3) over the given states."""
    best = 0.0
    for u in states:
        u = np.asarray(u, dtype=float)
        ux = node_derivative(u, grid.dx)
        n_u2 = quadrature(grid, u * u)
        if n_u2 == 0:
            continue
        need = quadrature(grid, np.abs(u) ** 3) - eps * quadrature(grid, ux * ux)
        best = max(best, need / n_u2 ** (5.0 / 3.0))
    return best


def random_smooth_states(grid, count, seed=0, decay=(0.4, 1.2)):
    """Smooth states vanishing at x = 0 and decaying fast enough for every weight used here.

    u(x) = A x exp(-x/s) sum_k c_k cos(w_k x + p_k) with random A, s, c, w, p.
    """
    rng = np.random.default_rng(seed)
    x = grid.nodes
    out = np.empty((count, grid.N))
    for i in range(count):
        s = rng.uniform(*decay)
        c = rng.normal(size=4)
        w = rng.uniform(0.0, 3.0, size=4)
        p = rng.uniform(0.0, 2 * np.pi, size=4)
        amp = rng.uniform(0.1, 5.0)
        u = amp * x * np.exp(-x / s) * (c[:, None] * np.cos(w[:, None] * x + p[:, None])).sum(0)
        u[0] = u[-1] = 0.0
        out[i] = u
    return out


def corpus_report(states, grid, bs=(0.1, 0.25, 0.5), slack=SLACK):
    """Worst ratios LHS/RHS over a set of states and weight rates."""
    worst, failures = {}, 0
    for u in states:
        for b in bs:
            rep = check_inequalities(u, grid, b=b, slack=slack)
            for k, v in rep.items():
                if isinstance(v, dict):
                    worst[k] = max(worst.get(k, 0.0), v["ratio"])
                    failures += not v["pass"]
    c_emp = {f"{ep:g}": empirical_cubic_constant(states, grid, ep) for ep in EPSILONS}
    return {"count": len(states), "b_values": list(bs), "worst_ratio": worst, "failures": failures,
            "slack": slack, "all_pass": failures == 0, "empirical_cubic_constants": c_emp,
            "young_cubic_constants": {f"{ep:g}": young_constant(ep) for ep in EPSILONS}}
