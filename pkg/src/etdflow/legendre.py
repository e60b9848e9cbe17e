"""Legendre-Galerkin space with built-in homogeneous Neumann conditions.

The one-dimensional basis on the reference interval combines Legendre
polynomials so every member has vanishing endpoint derivatives:

.. math::

    h_k(\\xi) = L_k(\\xi) - \\frac{k(k+1)}{(k+2)(k+3)} L_{k+2}(\\xi),
    \\qquad k = 0, \\dots, N-2.

With this combination the stiffness matrix ``S = (h_j', h_k')`` is
exactly diagonal (with ``S[0,0] = 0`` for the constant mode) and the mass
matrix ``M = (h_j, h_k)`` is banded with bandwidth two.  Solving the
symmetric generalized problem ``S p = lambda M p`` with M-orthonormal
eigenvectors ``P`` turns the Laplacian into the diagonal multipliers
``lambda_k + lambda_l`` on tensor coefficients ``PT Psi-hat P``, and
gives the identities ``(M P)^-1 = PT`` used by the nonlinear projection.

Inner products are realized by the ``(N+1)``-point Gauss-Lobatto rule.
The rule is exact only through degree ``2N - 1``, so the single mass
entry containing ``(L_N, L_N)`` uses the discrete norm ``2/N`` instead
of the analytic ``2/(2N+1)``; assembled this way, M equals the quadrature
Gram matrix to machine precision and nodal/coefficient round trips are
exact rather than accurate to a few digits.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigh

__all__ = ["NeumannBasis"]


def _legendre_tables(xi, kmax):
    """Values and derivatives of ``L_0 .. L_kmax`` at points ``xi``.

    Uses the three-term recurrence for values and the derivative
    recurrence ``L'_{k+1} = L'_{k-1} + (2k+1) L_k``, both stable on
    ``[-1, 1]`` for the degrees used here.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    val = np.empty((xi.size, kmax + 1))
    der = np.empty_like(val)
    val[:, 0] = 1.0
    der[:, 0] = 0.0
    if kmax >= 1:
        val[:, 1] = xi
        der[:, 1] = 1.0
    for k in range(1, kmax):
        val[:, k + 1] = ((2 * k + 1) * xi * val[:, k] - k * val[:, k - 1]) / (k + 1)
        der[:, k + 1] = der[:, k - 1] + (2 * k + 1) * val[:, k]
    return val, der


def _gauss_lobatto(n):
    """Nodes and weights of the ``(n+1)``-point Gauss-Lobatto rule on [-1, 1].

    Interior nodes are the roots of ``L_n'``, found by Newton iteration
    from Chebyshev-Lobatto initial guesses to an increment below 1e-14.
    """
    if n < 2:
        raise ValueError("Gauss-Lobatto rule needs polynomial degree >= 2")
    xi = -np.cos(np.pi * np.arange(1, n) / n)
    for _ in range(100):
        val, der = _legendre_tables(xi, n)
        ln, dln = val[:, n], der[:, n]
        # L_n'' from the Legendre differential equation.
        d2 = (2.0 * xi * dln - n * (n + 1) * ln) / (1.0 - xi * xi)
        delta = dln / d2
        xi -= delta
        if np.max(np.abs(delta)) < 1e-14:
            break
    nodes = np.concatenate(([-1.0], xi, [1.0]))
    nodes = 0.5 * (nodes - nodes[::-1])  # enforce exact symmetry
    ln = _legendre_tables(nodes, n)[0][:, n]
    weights = 2.0 / (n * (n + 1) * ln * ln)
    return nodes, weights


class NeumannBasis:
    """Tensor-product Neumann basis on a square ``[a, b]^2`` domain.

    Parameters
    ----------
    n_poly : int
        Highest polynomial degree N per axis (at least 4); the basis has
        ``N - 1`` members per axis.
    interval : pair of float
        Physical interval ``[a, b]`` used for both axes.

    Attributes
    ----------
    mass : ndarray
        Banded symmetric positive definite matrix ``(h_j, h_k)``.
    stiff : ndarray
        Diagonal matrix ``(h_j', h_k')`` with ``stiff[0, 0] = 0``.
    eigvals : ndarray
        Ascending generalized eigenvalues; ``eigvals[0]`` is exactly 0.
    eigvecs : ndarray
        M-orthonormal eigenvector matrix P (``PT M P = I``).
    lam_sum : ndarray
        Two-dimensional Laplacian multipliers ``lambda_k + lambda_l``.
    quad_nodes, quad_weights : ndarray
        ``(N+1)``-point Gauss-Lobatto rule mapped to ``[a, b]``.
    h_at_nodes, g_at_nodes : ndarray
        Evaluation tables, node index first, of ``h_k`` and of the
        eigenbasis ``g_k = sum_i P[i, k] h_i``.
    """

    def __init__(self, n_poly, interval):
        n = int(n_poly)
        a, b = (float(interval[0]), float(interval[1]))
        if n < 4:
            raise ValueError(f"polynomial degree must be at least 4, got {n_poly}")
        if not b > a:
            raise ValueError(f"interval must satisfy b > a, got [{a}, {b}]")
        self.n_poly = n
        self.interval = (a, b)
        self.n_modes = n - 1
        scale = 0.5 * (b - a)

        k = np.arange(n - 1, dtype=float)
        ck = k * (k + 1.0) / ((k + 2.0) * (k + 3.0))
        self._ck = ck

        # Discrete Legendre norms under the (N+1)-point Gauss-Lobatto rule.
        gamma = 2.0 / (2.0 * np.arange(n + 1, dtype=float) + 1.0)
        gamma[n] = 2.0 / n

        mass = np.zeros((n - 1, n - 1))
        idx = np.arange(n - 1)
        mass[idx, idx] = gamma[: n - 1] + ck**2 * gamma[2 : n + 1]
        off = -ck[: n - 3] * gamma[2 : n - 1]
        mass[idx[: n - 3], idx[: n - 3] + 2] = off
        mass[idx[: n - 3] + 2, idx[: n - 3]] = off
        self.mass = mass * scale

        diag = k * (k + 1.0) * (1.0 - 2.0 * ck) + ck**2 * (k + 2.0) * (k + 3.0)
        self.stiff = np.diag(diag / scale)

        try:
            eigvals, eigvecs = eigh(self.stiff, self.mass)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
            raise ValueError(f"Neumann basis eigendecomposition failed: {exc}") from exc
        if abs(eigvals[0]) > 1e-8 * max(1.0, abs(eigvals[-1])):
            raise ValueError("constant mode eigenvalue not resolved near zero")
        eigvals[0] = 0.0
        # Deterministic sign convention: largest-magnitude entry positive.
        for j in range(eigvals.size):
            lead = np.argmax(np.abs(eigvecs[:, j]))
            if eigvecs[lead, j] < 0.0:
                eigvecs[:, j] = -eigvecs[:, j]
        self.eigvals = eigvals
        self.eigvecs = eigvecs
        self.lam_sum = eigvals[:, None] + eigvals[None, :]

        ref_nodes, ref_weights = _gauss_lobatto(n)
        self.quad_nodes = a + scale * (ref_nodes + 1.0)
        self.quad_weights = ref_weights * scale

        val, der = _legendre_tables(ref_nodes, n)
        self.h_at_nodes = val[:, : n - 1] - ck[None, :] * val[:, 2 : n + 1]
        self._dh_at_nodes = (der[:, : n - 1] - ck[None, :] * der[:, 2 : n + 1]) / scale
        self.g_at_nodes = self.h_at_nodes @ eigvecs
        # Quadrature analysis operator: project = _analysis.T @ f @ _analysis.
        self._analysis = (self.quad_weights[:, None] * self.h_at_nodes) @ eigvecs

    # ------------------------------------------------------------ evaluation

    def _to_reference(self, x):
        a, b = self.interval
        return (2.0 * np.asarray(x, dtype=float) - (a + b)) / (b - a)

    def h_values(self, x):
        """Table ``h_k(x)`` for arbitrary points, point index first."""
        val, _ = _legendre_tables(self._to_reference(x), self.n_poly)
        return val[:, : self.n_modes] - self._ck[None, :] * val[:, 2 : self.n_poly + 1]

    def dh_values(self, x):
        """Table ``h_k'(x)`` for arbitrary points, point index first."""
        _, der = _legendre_tables(self._to_reference(x), self.n_poly)
        scale = 0.5 * (self.interval[1] - self.interval[0])
        return (der[:, : self.n_modes] - self._ck[None, :] * der[:, 2 : self.n_poly + 1]) / scale

    # ------------------------------------------------------------ transforms

    def eigen_to_nodal(self, coeffs):
        """Evaluate an eigen-coefficient matrix on the Gauss-Lobatto grid."""
        return self.g_at_nodes @ coeffs @ self.g_at_nodes.T

    def project_nonlinear(self, nodal):
        """Eigen-coefficient Galerkin projection of grid values.

        Quadrature of the nodal interpolant against the ``h_j h_k`` tensor
        basis followed by the change to the eigenbasis; inverse of
        :meth:`eigen_to_nodal` for fields in the span.
        """
        return self._analysis.T @ nodal @ self._analysis

    # ----------------------------------------------------------- functionals

    def integrate(self, nodal):
        """Tensor Gauss-Lobatto quadrature over the square domain."""
        return float(self.quad_weights @ nodal @ self.quad_weights)

    def grad_norm_sq(self, mu_bar):
        """``sum (lambda_k + lambda_l) mu_bar^2``, the H1 seminorm squared."""
        return float(np.sum(self.lam_sum * mu_bar * mu_bar))
