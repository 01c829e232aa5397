"""Independent reference implementations used only to cross-check the library.

Everything here is written from the closed forms with plain scalar Python
(math module, explicit loops) and deliberately shares no code with the
package: a double-loop lattice assembly, a Gauss-Seidel relaxation solver,
and small quadrature/analytic helpers.
"""

from __future__ import annotations

import math


def spring_constant(alpha: float, i: int, j: int, n: int, dx: float, ea: float) -> float:
    """Scalar re-derivation of the pairwise spring stiffness closed forms."""
    if i > j:
        i, j = j, i
    g = math.gamma(1.0 - alpha)
    length = n * dx
    if i == 0 and j == n:
        return (ea / (2.0 * g)) * (
            length**-alpha
            + alpha * dx * length ** -(1.0 + alpha)
            + alpha * (1.0 + alpha) * dx * dx * length ** -(2.0 + alpha)
        )
    if (i == 0 and j == 1) or (i == n - 1 and j == n):
        return (ea / g) * (alpha / (1.0 - alpha)) * dx**-alpha
    front = ea * dx / (2.0 * g)
    if j == i + 1:
        return front * (alpha * (1.0 + alpha) / (1.0 - alpha)) * dx ** -(1.0 + alpha)
    r = (j - i) * dx
    base = front * alpha * (1.0 + alpha) * r ** -(2.0 + alpha) * dx
    if i == 0 or j == n:
        base += front * alpha * r ** -(1.0 + alpha)
    return base


def brute_force_total_stiffness(
    alphas: list[float],
    weights: list[float],
    kappa_vals: list[float],
    d_alpha: float,
    n: int,
    dx: float,
    ea: float,
) -> list[list[float]]:
    """Order-quadrature double loop over (order node, node pair)."""
    K = [[0.0] * (n + 1) for _ in range(n + 1)]
    for a, w, kap in zip(alphas, weights, kappa_vals):
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                if a <= 0.0:
                    k = 0.0  # every coefficient carries a factor alpha
                elif a >= 1.0:
                    # only the local chain survives the Gamma(1-a) pole
                    k = ea / dx if j - i == 1 else 0.0
                else:
                    k = spring_constant(a, i, j, n, dx, ea)
                k *= w * kap * d_alpha
                K[i][j] += k
                K[j][i] += k
    return K


def gauss_seidel_relaxation(
    K: list[list[float]],
    forces: list[float],
    fixed: dict[int, float],
    sweeps: int = 200_000,
    tol: float = 1e-14,
) -> list[float]:
    """Relax node displacements until every free node is in equilibrium.

    Update rule: u_i <- (sum_j k_ij u_j + F_i) / sum_j k_ij, i.e. place each
    node where its spring forces and external force balance.
    """
    n = len(forces) - 1
    u = [fixed.get(i, 0.0) for i in range(n + 1)]
    free = [i for i in range(n + 1) if i not in fixed]
    for _ in range(sweeps):
        worst = 0.0
        for i in free:
            ksum = 0.0
            acc = forces[i]
            for j in range(n + 1):
                if j == i:
                    continue
                ksum += K[i][j]
                acc += K[i][j] * u[j]
            new = acc / ksum
            worst = max(worst, abs(new - u[i]))
            u[i] = new
        if worst < tol:
            break
    return u


def lumped_body_forces(f_const: float, n: int, dx: float) -> list[float]:
    out = [f_const * dx] * (n + 1)
    out[0] *= 0.5
    out[n] *= 0.5
    return out


def caputo_of_power(alpha: float, p: float, x: float) -> float:
    """Left Caputo derivative of x**p from zero, closed form."""
    return math.gamma(p + 1.0) / math.gamma(p + 1.0 - alpha) * x ** (p - alpha)


def trapezoid_strength_integral(kappa, n_alpha: int, f) -> float:
    """Plain trapezoid of kappa(a) * f(a) over [0, 1]."""
    h = 1.0 / n_alpha
    total = 0.0
    for r in range(n_alpha + 1):
        a = r * h
        w = 0.5 if r in (0, n_alpha) else 1.0
        total += w * kappa(a) * f(a) * h
    return total
