"""Dense complex operator algebra on small Hilbert spaces.

Operators, state vectors and density matrices are plain complex numpy
arrays; the array shape carries the dimension (operators are square 2-d
arrays, kets are 1-d).  Everything here targets dimensions 2-4 per
subsystem with composites up to 16, so dense storage throughout.

Basis conventions, fixed once so matrix values are comparable everywhere:

* two-level system: (|e>, |g>) at indices (0, 1),
* three-level Lambda system: (|e>, |g1>, |g2>) at indices (0, 1, 2),
* composites: system 1 is always the left Kronecker factor.

All returned arrays are freshly allocated; callers may mutate them freely
without aliasing surprises.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "identity",
    "basis",
    "two_level_ket",
    "composite_ket",
    "ladder_two_level",
    "lambda_system_ops",
    "kron",
    "dagger",
    "commutator",
    "anticommutator",
    "expectation",
    "projector",
    "density_from_ket",
    "validate_state_vector",
    "validate_density_matrix",
]


def identity(dim: int) -> np.ndarray:
    """dim x dim complex identity."""
    return np.eye(dim, dtype=complex)


def basis(dim: int, index: int) -> np.ndarray:
    """Computational basis ket |index> on a dim-dimensional space."""
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dim {dim}")
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def two_level_ket(label: str) -> np.ndarray:
    """|e> or |g> in the (|e>, |g>) ordering."""
    try:
        return basis(2, {"e": 0, "g": 1}[label])
    except KeyError:
        raise ValueError(f"two-level label must be 'e' or 'g', got {label!r}") from None


def composite_ket(labels: str) -> np.ndarray:
    """Product ket for a string of two-level labels, e.g. 'eg' -> |e>|g>."""
    if not labels:
        raise ValueError("need at least one subsystem label")
    ket = two_level_ket(labels[0])
    for ch in labels[1:]:
        ket = np.kron(ket, two_level_ket(ch))
    return ket


def ladder_two_level() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (sigma_minus, sigma_plus, sigma_z) for one two-level system.

    sigma_minus |e> = |g>, sigma_plus = dagger(sigma_minus) and
    sigma_z = diag(+1, -1) on (|e>, |g>).  The Pauli relations
    [s+, s-] = sz and [sz, s+-] = +-2 s+- hold exactly (integer entries).
    """
    sm = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
    sp = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    sz = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    return sm, sp, sz


def lambda_system_ops() -> dict[str, np.ndarray]:
    """Transition operators of a three-level Lambda system.

    Basis (|e>, |g1>, |g2>).  Keys: 'lower1' = |g1><e|, 'lower2' = |g2><e|,
    'raise1', 'raise2' are their daggers.  Each lowering operator is
    nilpotent (A @ A = 0).
    """
    lower1 = np.zeros((3, 3), dtype=complex)
    lower1[1, 0] = 1.0
    lower2 = np.zeros((3, 3), dtype=complex)
    lower2[2, 0] = 1.0
    return {
        "lower1": lower1,
        "lower2": lower2,
        "raise1": dagger(lower1),
        "raise2": dagger(lower2),
    }


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with system 1 as the left factor."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a, dtype=complex).conj().T.copy()


def _check_same_square(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what}: first operand is not a square matrix, shape {a.shape}")
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError(f"{what}: second operand is not a square matrix, shape {b.shape}")
    if a.shape != b.shape:
        raise ValueError(f"{what}: dimension mismatch {a.shape} vs {b.shape}")


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a @ b - b @ a; raises ValueError on dimension mismatch."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_same_square(a, b, "commutator")
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a @ b + b @ a; raises ValueError on dimension mismatch."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_same_square(a, b, "anticommutator")
    return a @ b + b @ a


def expectation(state: np.ndarray, a: np.ndarray) -> complex:
    """<psi|A|psi> for a ket, or Tr(rho A) for a density matrix."""
    state = np.asarray(state, dtype=complex)
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expectation: operator is not square, shape {a.shape}")
    if state.ndim == 1:
        if state.shape[0] != a.shape[0]:
            raise ValueError(
                f"expectation: ket dim {state.shape[0]} != operator dim {a.shape[0]}"
            )
        return complex(state.conj() @ (a @ state))
    if state.ndim == 2:
        if state.shape != a.shape:
            raise ValueError(
                f"expectation: density matrix {state.shape} != operator {a.shape}"
            )
        return complex(np.trace(state @ a))
    raise ValueError(f"expectation: state must be 1-d or 2-d, got ndim {state.ndim}")


def projector(psi: np.ndarray) -> np.ndarray:
    """|psi><psi| (not normalized)."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def density_from_ket(psi: np.ndarray) -> np.ndarray:
    """Normalized density matrix |psi><psi| / <psi|psi>."""
    psi = np.asarray(psi, dtype=complex)
    norm2 = float(np.real(psi.conj() @ psi))
    if norm2 <= 0.0:
        raise ValueError("cannot form a density matrix from the zero vector")
    return np.outer(psi, psi.conj()) / norm2


def validate_state_vector(psi: np.ndarray, norm_tol: float = 1e-9) -> None:
    """Raise ValueError unless psi is a normalized ket."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError(f"state vector must be 1-d, got shape {psi.shape}")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > norm_tol:
        raise ValueError(f"state vector norm {norm} deviates from 1 by more than {norm_tol}")


def validate_density_matrix(
    rho: np.ndarray,
    herm_tol: float = 1e-12,
    trace_tol: float = 1e-9,
    eig_floor: float = -1e-9,
) -> None:
    """Raise ValueError unless rho is Hermitian, unit-trace and positive.

    Tolerances: elementwise Hermiticity herm_tol, |Tr rho - 1| < trace_tol,
    smallest eigenvalue >= eig_floor (slightly negative values are allowed
    for integrator round-off).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm_dev = float(np.max(np.abs(rho - rho.conj().T)))
    if herm_dev > herm_tol:
        raise ValueError(f"density matrix Hermiticity deviation {herm_dev} > {herm_tol}")
    trace_dev = abs(complex(np.trace(rho)) - 1.0)
    if trace_dev > trace_tol:
        raise ValueError(f"density matrix trace deviation {trace_dev} > {trace_tol}")
    min_eig = float(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)))
    if min_eig < eig_floor:
        raise ValueError(f"density matrix eigenvalue {min_eig} below floor {eig_floor}")
