"""Small dense Hermitian linear algebra: a cyclic Jacobi eigensolver and the
entropic quantities built on it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import ValidationError

ZERO_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Spectrum:
    values: np.ndarray  # descending
    vectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def is_hermitian(A: np.ndarray, tol: float = ZERO_TOL) -> bool:
    A = np.asarray(A)
    return A.ndim == 2 and A.shape[0] == A.shape[1] and np.allclose(A, A.conj().T, atol=tol, rtol=0)


def hermitian_eig(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops below ``tol`` times
    the Frobenius norm of A.
    """
    A = np.array(A, dtype=complex)
    if not np.all(np.isfinite(A)):
        raise ValidationError("matrix has non-finite entries")
    if not is_hermitian(A, tol=1e-9 * max(1.0, np.abs(A).max())):
        raise ValidationError("matrix is not Hermitian")
    A = (A + A.conj().T) / 2
    d = A.shape[0]
    V = np.eye(d, dtype=complex)
    scale = np.linalg.norm(A)
    if scale == 0:
        return Spectrum(np.zeros(d), V)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (A[q, q].real - A[p, p].real) / (2 * mag)
                # for huge theta the rotation angle is ~1/(2 theta); avoid squaring it
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + (np.sqrt(theta * theta + 1) if abs(theta) < 1e150 else abs(theta)))
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                # rotation acting on columns p, q: diag(1, conj(phase)) @ [[c, s], [-s, c]]
                R = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                cols = [p, q]
                A[:, cols] = A[:, cols] @ R
                A[cols, :] = R.conj().T @ A[cols, :]
                A[p, q] = A[q, p] = 0
                V[:, cols] = V[:, cols] @ R
    vals = np.diag(A).real
    order = np.argsort(-vals, kind="stable")
    return Spectrum(vals[order], V[:, order])


def check_density(rho: np.ndarray, tol: float = ZERO_TOL, name: str = "state") -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"{name} must be a square matrix")
    if not np.all(np.isfinite(rho)):
        raise ValidationError(f"{name} has non-finite entries")
    if not is_hermitian(rho, tol):
        raise ValidationError(f"{name} is not Hermitian")
    if abs(np.trace(rho).real - 1) > tol:
        raise ValidationError(f"{name} has trace {np.trace(rho).real}, expected 1")
    if hermitian_eig(rho).values[-1] < -tol:
        raise ValidationError(f"{name} is not positive semidefinite")
    return rho


def _entropy_of(values: np.ndarray) -> float:
    lam = values[values > ZERO_TOL]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in bits."""
    return max(_entropy_of(hermitian_eig(rho).values), 0.0)


def positive_part(A: np.ndarray, tol: float = ZERO_TOL) -> tuple[np.ndarray, np.ndarray, float]:
    """Projector onto eigenvalues above ``tol``, a basis of the near-kernel, and tr[P A]."""
    spec = hermitian_eig(A)
    pos = spec.values > tol
    near = np.abs(spec.values) <= tol
    U = spec.vectors[:, pos]
    return U @ U.conj().T, spec.vectors[:, near], float(spec.values[pos].sum())


def support_projector(A: np.ndarray, tol: float = ZERO_TOL) -> np.ndarray:
    spec = hermitian_eig(A)
    U = spec.vectors[:, spec.values > tol]
    return U @ U.conj().T


def matrix_function(A: np.ndarray, f, tol: float = ZERO_TOL) -> np.ndarray:
    """f applied to the eigenvalues above ``tol``; the rest of the space maps to 0."""
    spec = hermitian_eig(A)
    keep = spec.values > tol
    U = spec.vectors[:, keep]
    return (U * f(spec.values[keep])) @ U.conj().T


def pinv_sqrt(A: np.ndarray, tol: float = ZERO_TOL) -> np.ndarray:
    """A^{-1/2} on the support of a positive semidefinite A."""
    return matrix_function(A, lambda v: 1 / np.sqrt(v), tol)


def quantum_relative_entropy(rho: np.ndarray, sigma: np.ndarray) -> float:
    """D(rho||sigma) in bits; ``inf`` when supp(rho) is not inside supp(sigma)."""
    P_sigma = support_projector(sigma)
    leak = np.trace(rho - P_sigma @ rho @ P_sigma).real
    if leak > ZERO_TOL:
        return float("inf")
    log_rho = matrix_function(rho, np.log2)
    log_sigma = matrix_function(sigma, np.log2)
    return max(float(np.trace(rho @ (log_rho - log_sigma)).real), 0.0)


def kron(*mats: np.ndarray) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def block_diag(blocks) -> np.ndarray:
    blocks = [np.atleast_2d(b) for b in blocks]
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i : i + k, i : i + k] = b
        i += k
    return out


def density_from_json(obj, name: str = "state") -> np.ndarray:
    try:
        d = int(obj["dim"])
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros((d, d))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: density matrix JSON needs dim, re, im ({exc})") from exc
    if re.shape != (d, d) or im.shape != (d, d):
        raise ValidationError(f"{name}: re/im must be {d}x{d}")
    bad = np.argwhere(~np.isfinite(re + 1j * im))
    if len(bad):
        i, j = bad[0]
        raise ValidationError(f"{name}.re/im[{i}][{j}] is not finite")
    return check_density(re + 1j * im, name=name)


def density_to_json(rho: np.ndarray) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {"dim": rho.shape[0], "re": rho.real.tolist(), "im": rho.imag.tolist()}
