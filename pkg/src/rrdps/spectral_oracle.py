"""Brute-force checks of the eigenvalue derivation behind ``Omega``.

Two levels of verification live here:

* the reduced L x L (or |a| x |a|) ``Lambda`` blocks, built from the
  all-ones matrix ``M1`` and the partial identity ``M2``, whose largest
  eigenvalues must equal ``omega_minus`` / ``omega_plus``;
* the full joint space of Alice's L qubits and Bob's single-photon
  position space (dimension ``2**L * L``), where the operators are built
  from their POVM definitions and diagonalized directly.

Everything is real: states carry only +/-1 phases in the computational
basis, so the oracle never needs complex arithmetic.  Joint-space index
layout is ``index = a_bits * L + k`` with qubit 1 as the most significant
bit of ``a_bits`` and ``k`` the 0-based photon position.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from rrdps import security_bounds
from rrdps.errors import NumericError, ResourceLimitError

DET_MAX_DIM = 12
EIG_MAX_DIM = 128
JOINT_MAX_L = 5


@dataclass(frozen=True)
class SymMatrix:
    """Dense real symmetric matrix; symmetry is checked exactly on creation."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a nonempty square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not exactly symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _sym(a: np.ndarray) -> SymMatrix:
    # symmetrize away roundoff from products like P A P
    return SymMatrix(0.5 * (a + a.T))


def build_m1(d: int) -> SymMatrix:
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return SymMatrix(np.ones((d, d)))


def build_m2(d: int, m: int) -> SymMatrix:
    if d < 1 or not 0 <= m <= d:
        raise ValueError(f"need d >= 1 and 0 <= m <= d, got d={d}, m={m}")
    diag = np.zeros(d)
    diag[:m] = 1.0
    return SymMatrix(np.diag(diag))


def combination(alpha: float, beta: float, gamma: float, d: int, m: int) -> SymMatrix:
    """``alpha*M1 + beta*M2 + gamma*1`` of size d."""
    a = (
        alpha * build_m1(d).entries
        + beta * build_m2(d, m).entries
        + gamma * np.eye(d)
    )
    return SymMatrix(a)


def det_closed_form(alpha: float, beta: float, gamma: float, d: int, m: int) -> float:
    """Closed-form determinant of ``alpha*M1 + beta*M2 + gamma*1``.

    For ``m == 0`` or ``m == d`` one of the exponents is -1 and cancels
    against a factor of the quadratic, so those cases use the reduced product.
    Python's ``0.0 ** 0 == 1.0`` covers the remaining zero-base edges.
    """
    if d < 1 or not 0 <= m <= d:
        raise ValueError(f"need d >= 1 and 0 <= m <= d, got d={d}, m={m}")
    quad = gamma * gamma + (beta + d * alpha) * gamma + (d - m) * alpha * beta
    if m == 0:
        # gamma^(d-1) (gamma+beta)^(-1) (gamma+beta)(gamma + d alpha)
        return gamma ** (d - 1) * (gamma + d * alpha)
    if m == d:
        # gamma^(-1) (gamma+beta)^(d-1) gamma (gamma + beta + d alpha)
        return (gamma + beta) ** (d - 1) * (gamma + beta + d * alpha)
    return gamma ** (d - m - 1) * (gamma + beta) ** (m - 1) * quad


def det_bruteforce(a: SymMatrix) -> float:
    """Determinant by Gaussian elimination with partial pivoting."""
    n = a.dim
    if n > DET_MAX_DIM:
        raise ResourceLimitError(f"det_bruteforce supports dim <= {DET_MAX_DIM}, got {n}")
    u = a.entries.copy()
    det = 1.0
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(u[col:, col])))
        if u[pivot, col] == 0.0:
            return 0.0
        if pivot != col:
            u[[col, pivot]] = u[[pivot, col]]
            det = -det
        det *= u[col, col]
        factors = u[col + 1 :, col] / u[col, col]
        u[col + 1 :, col:] -= np.outer(factors, u[col, col:])
    return float(det)


def jacobi_eigenvalues(
    a: SymMatrix, tol: float = 1e-12, max_sweeps: int = 100
) -> np.ndarray:
    """All eigenvalues (ascending) by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm is at most ``tol`` times
    ``max(1, ||A||_F)``.
    """
    n = a.dim
    if n > EIG_MAX_DIM:
        raise ResourceLimitError(f"jacobi_eigenvalues supports dim <= {EIG_MAX_DIM}, got {n}")
    m = a.entries.copy()
    scale = max(1.0, float(np.linalg.norm(m)))
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(m - np.diag(np.diag(m))))
        if off <= tol * scale:
            return np.sort(np.diag(m))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if apq == 0.0:
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                row_p = m[p, :].copy()
                row_q = m[q, :].copy()
                m[p, :] = c * row_p - s * row_q
                m[q, :] = s * row_p + c * row_q
                col_p = m[:, p].copy()
                col_q = m[:, q].copy()
                m[:, p] = c * col_p - s * col_q
                m[:, q] = s * col_p + c * col_q
    raise NumericError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def max_eigenvalue(a: SymMatrix, method: str = "jacobi") -> float:
    """Largest eigenvalue.  ``method`` is ``"jacobi"`` or ``"lapack"``."""
    if method == "jacobi":
        return float(jacobi_eigenvalues(a)[-1])
    if method == "lapack":
        return float(np.linalg.eigvalsh(a.entries)[-1])
    raise ValueError(f"unknown eigensolver {method!r}")


def build_lambda_minus(L: int, a_weight: int, lam: float) -> SymMatrix:
    """Nonzero block of the transformed operator for X-weight ``a_weight <= nu - 1``."""
    if L < 1 or not 0 <= a_weight <= L:
        raise ValueError(f"need 0 <= a_weight <= L, got L={L}, a_weight={a_weight}")
    m = (
        lam / (2.0 * (L - 1)) * build_m1(L).entries
        - 1.0 / (L - 1) * build_m2(L, a_weight).entries
        + (2.0 * a_weight - L * lam) / (2.0 * (L - 1)) * np.eye(L)
    )
    return SymMatrix(m)


def build_lambda_plus(L: int, a_weight: int, lam: float) -> SymMatrix:
    """Nonzero block for X-weight ``nu + 1`` (size ``a_weight``)."""
    if L < 1 or not 1 <= a_weight <= L:
        raise ValueError(f"need 1 <= a_weight <= L, got L={L}, a_weight={a_weight}")
    m = lam / (2.0 * (L - 1)) * build_m1(a_weight).entries + (
        2.0 * (a_weight - 1) - lam * L
    ) / (2.0 * (L - 1)) * np.eye(a_weight)
    return SymMatrix(m)


# ---------------------------------------------------------------------------
# Bob's single-photon POVM elements (system B alone, L-dimensional)


def _proj(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v)


def _basis(L: int, k: int) -> np.ndarray:
    v = np.zeros(L)
    v[k] = 1.0
    return v


def unordered_pairs(L: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(L), 2))


def povm_actual(L: int, k: int, l: int, s_b: int) -> np.ndarray:
    """``P'_{{k,l},s_B}``: actual detection element, including the 1/2 step-(ii) loss."""
    v = (_basis(L, k) + (-1) ** s_b * _basis(L, l)) / math.sqrt(2.0)
    return _proj(v) / (2.0 * (L - 1))


def povm_pair(L: int, k: int, l: int, s_b: int) -> np.ndarray:
    """``P_{{k,l},s_B} = 2 P'``: step-(iii) element once detection is assured."""
    return 2.0 * povm_actual(L, k, l, s_b)


def povm_ordered(L: int, k: int, l: int) -> np.ndarray:
    """``P_(k,l)``: virtual ordered-pair element, photon found at k, l random."""
    return _proj(_basis(L, k)) / (L - 1)


def povm_identity_deviations(L: int) -> dict[str, float]:
    """Max entrywise deviations of the two POVM identities on system B."""
    detect = sum(
        povm_actual(L, k, l, s) for k, l in unordered_pairs(L) for s in (0, 1)
    )
    target = 0.5 * np.eye(L)
    ordered = 0.0
    for k, l in unordered_pairs(L):
        lhs = povm_ordered(L, k, l) + povm_ordered(L, l, k)
        rhs = povm_pair(L, k, l, 0) + povm_pair(L, k, l, 1)
        ordered = max(ordered, float(np.max(np.abs(lhs - rhs))))
    return {
        "povm_detection_sum": float(np.max(np.abs(detect - target))),
        "povm_ordered_equivalence": ordered,
    }


# ---------------------------------------------------------------------------
# Joint space: L qubits (A) x L photon positions (B)


def _hadamard_all(L: int) -> np.ndarray:
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    out = np.array([[1.0]])
    for _ in range(L):
        out = np.kron(out, h)
    return out


def _qubit_op(L: int, k: int, op: np.ndarray) -> np.ndarray:
    """``op`` acting on qubit k (0-based, most significant first) of L qubits."""
    return np.kron(np.kron(np.eye(2**k), op), np.eye(2 ** (L - k - 1)))


def _weights(L: int) -> np.ndarray:
    return np.array([bin(a).count("1") for a in range(2**L)])


def _bit(a: int, k: int, L: int) -> int:
    return (a >> (L - 1 - k)) & 1


def nu_weights(nu: int) -> list[int]:
    """X-weights compatible with total photon number nu: nu, nu-2, ..., >= 0."""
    return list(range(nu, -1, -2))


@dataclass
class JointOperatorSet:
    L: int
    e_bit: SymMatrix
    e_ph: SymMatrix
    p_nu: dict[int, SymMatrix]
    u: np.ndarray
    x_states: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 2**self.L * self.L


def _x_weight_projector(L: int, weights: list[int], x_states: np.ndarray) -> np.ndarray:
    w = _weights(L)
    cols = x_states[:, np.isin(w, weights)]
    return cols @ cols.T


def build_joint_operators(L: int) -> JointOperatorSet:
    """Build e, e_ph, P^(nu) and U on the ``2**L * L`` joint space."""
    if not 3 <= L <= JOINT_MAX_L:
        raise ResourceLimitError(f"joint-space construction supports 3 <= L <= {JOINT_MAX_L}, got {L}")
    n_a = 2**L
    eye_b = np.eye(L)
    # columns of H^{(x)L} are the X-basis states H|a>, in Z-basis coordinates
    x_states = _hadamard_all(L)

    z_proj = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    minus_proj = np.array([[0.5, -0.5], [-0.5, 0.5]])

    e_bit = np.zeros((n_a * L, n_a * L))
    for k, l in unordered_pairs(L):
        for s_b in (0, 1):
            bob = povm_pair(L, k, l, s_b)
            for s in (0, 1):
                alice = _qubit_op(L, k, z_proj[s]) @ _qubit_op(
                    L, l, z_proj[s ^ s_b ^ 1]
                )
                e_bit += np.kron(alice, bob)

    e_ph = np.zeros_like(e_bit)
    for k in range(L):
        for l in range(L):
            if k == l:
                continue
            e_ph += np.kron(_qubit_op(L, l, minus_proj), povm_ordered(L, k, l))

    p_nu = {
        nu: _sym(np.kron(_x_weight_projector(L, nu_weights(nu), x_states), eye_b))
        for nu in range(L + 1)
    }

    # U flips a_k in the X basis when the photon sits at k, i.e. applies Z_k
    z = np.diag([1.0, -1.0])
    u = sum(np.kron(_qubit_op(L, k, z), _proj(_basis(L, k))) for k in range(L))

    return JointOperatorSet(
        L=L,
        e_bit=_sym(e_bit),
        e_ph=_sym(e_ph),
        p_nu=p_nu,
        u=u,
        x_states=x_states,
    )


def _expected_conjugated(ops: JointOperatorSet, nu: int) -> dict[str, np.ndarray]:
    """Right-hand sides of the U-conjugation identities, built independently."""
    L = ops.L
    x = ops.x_states
    w = _weights(L)
    eye_b = np.eye(L)

    lower = [wt for wt in range(nu - 1, -1, -2)]
    p_conj = np.kron(_x_weight_projector(L, lower, x), eye_b)
    for a in np.flatnonzero(w == nu + 1):
        pa = _proj(x[:, a])
        for k in range(L):
            if _bit(a, k, L):
                p_conj += np.kron(pa, _proj(_basis(L, k)))

    e_conj_b = sum(
        _proj((_basis(L, k) - _basis(L, l)) / math.sqrt(2.0)) / (L - 1)
        for k, l in unordered_pairs(L)
    )
    e_conj = np.kron(np.eye(2**L), e_conj_b)

    eph_expected = np.zeros((2**L * L, 2**L * L))
    for a in range(2**L):
        pa = _proj(x[:, a])
        diag_b = np.array(
            [(w[a] - 1) if _bit(a, k, L) else w[a] for k in range(L)], dtype=float
        )
        eph_expected += np.kron(pa, np.diag(diag_b)) / (L - 1)

    return {"P_nu": p_conj, "e_bit": e_conj, "e_ph": eph_expected}


def restricted_max_eigenvalue(op: np.ndarray, projector: np.ndarray) -> float:
    """Largest eigenvalue of ``op`` restricted to the range of ``projector``."""
    vals, vecs = np.linalg.eigh(projector)
    basis = vecs[:, vals > 0.5]
    return float(np.linalg.eigvalsh(basis.T @ op @ basis)[-1])


@dataclass
class CheckResult:
    check_name: str
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_deviation) and self.max_deviation <= self.tolerance)

    def as_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "max_deviation": float(self.max_deviation),
            "pass": self.passed,
        }


@dataclass
class DecompositionReport:
    L: int
    nu: int
    eigenvalues: list[tuple[float, float, float]]
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def joint_structure_deviations(ops: JointOperatorSet) -> dict[str, float]:
    """Projector, orthogonality and partition properties of the joint operators."""
    L = ops.L
    eye = np.eye(ops.dim)
    idem = max(
        float(np.max(np.abs(p.entries @ p.entries - p.entries))) for p in ops.p_nu.values()
    )
    orth = float(np.max(np.abs(ops.u.T @ ops.u - eye)))
    invol = float(np.max(np.abs(ops.u @ ops.u - eye)))
    # P^(nu) covers weights of one parity up to nu, so the top two complete it
    complete = float(np.max(np.abs(ops.p_nu[L].entries + ops.p_nu[L - 1].entries - eye)))
    return {
        "p_nu_idempotent": idem,
        "u_orthogonal": orth,
        "u_involution": invol,
        "p_nu_parity_completeness": complete,
    }


def verify_sector_decomposition(
    L: int,
    nu: int,
    lambda_grid,
    ops: JointOperatorSet | None = None,
    eig_tol: float = 1e-9,
    identity_tol: float = 1e-12,
) -> DecompositionReport:
    """Diagonalize ``P(e_ph - lam e)P`` on the joint space and compare with Omega.

    Deviations above tolerance are reported, not raised.
    """
    if not 3 <= L <= JOINT_MAX_L:
        raise ResourceLimitError(f"joint-space verification supports 3 <= L <= {JOINT_MAX_L}, got {L}")
    if not 1 <= nu <= L - 2:
        raise ValueError(f"nu must satisfy 1 <= nu <= L-2, got {nu}")
    if ops is None:
        ops = build_joint_operators(L)

    p = ops.p_nu[nu].entries
    u = ops.u
    eigen_rows = []
    eig_dev = 0.0
    for lam in lambda_grid:
        op = p @ (ops.e_ph.entries - lam * ops.e_bit.entries) @ p
        got = restricted_max_eigenvalue(0.5 * (op + op.T), p)
        want = security_bounds.omega(L, nu, lam)
        eig_dev = max(eig_dev, abs(got - want))
        eigen_rows.append((float(lam), got, float(want)))

    expected = _expected_conjugated(ops, nu)
    actual = {
        "P_nu": u.T @ p @ u,
        "e_bit": u.T @ ops.e_bit.entries @ u,
        "e_ph": u.T @ ops.e_ph.entries @ u,
    }
    checks = [CheckResult(f"joint_max_eigenvalue[L={L},nu={nu}]", eig_dev, eig_tol)]
    for name in ("P_nu", "e_bit", "e_ph"):
        dev = float(np.max(np.abs(actual[name] - expected[name])))
        checks.append(CheckResult(f"conjugated_{name}[L={L},nu={nu}]", dev, identity_tol))
    # e_ph is itself U-invariant
    dev = float(np.max(np.abs(actual["e_ph"] - ops.e_ph.entries)))
    checks.append(CheckResult(f"e_ph_u_invariant[L={L},nu={nu}]", dev, identity_tol))
    return DecompositionReport(L, nu, eigen_rows, checks)


def permuted_sector_spread(L: int, nu: int, lam: float, n_perms: int = 5, seed: int = 0) -> float:
    """Spread of the largest eigenvalue of the weight-(nu-1) Lambda block over
    random placements of the ones in ``a``.

    Only permutation symmetry is probed here; the dependence on ``|a|`` alone
    is checked numerically, not proved.
    """
    rng = np.random.default_rng(seed)
    w = nu - 1
    vals = []
    for _ in range(n_perms):
        ones = rng.permutation(L)[:w]
        diag = np.zeros(L)
        diag[ones] = 1.0
        m = (
            lam / (2.0 * (L - 1)) * np.ones((L, L))
            - np.diag(diag) / (L - 1)
            + (2.0 * w - L * lam) / (2.0 * (L - 1)) * np.eye(L)
        )
        vals.append(float(np.linalg.eigvalsh(m)[-1]))
    return max(vals) - min(vals)


# name kept for callers of the original interface
verify_appendix_decomposition = verify_sector_decomposition
