"""Pointwise algebra of symmetric traceless 3x3 tensors.

All operations accept plain numpy arrays of shape (3, 3) or (3, 3, ...)
with trailing sample axes, so the same code serves single tensors and
whole fields.  Results are new arrays; nothing is mutated in place.

Conventions: (A.B)_ij = A_ik B_kj, A:B = A_ij B_ij, [A,B] = A.B - B.A.
"""

import numpy as np

from .errors import NonUnitDirector
from .tolerances import DEFAULT

IDENTITY = np.eye(3)


def _eye_like(a):
    """Identity broadcast over the trailing axes of ``a``."""
    if a.ndim == 2:
        return IDENTITY
    return IDENTITY.reshape((3, 3) + (1,) * (a.ndim - 2))


def mat_mul(a, b):
    return np.einsum('ij...,jk...->ik...', a, b)


def transpose(a):
    return np.swapaxes(a, 0, 1)


def frobenius(q1, q2):
    """Full contraction Q1:Q2 = Q1_ij Q2_ij."""
    return np.einsum('ij...,ij...->...', q1, q2)


def trace(a):
    return np.einsum('ii...->...', a)


def outer(u, v):
    """Tensor product of two 3-vectors (or vector fields), (uv)_ij = u_i v_j."""
    return np.einsum('i...,j...->ij...', u, v)


def matvec(a, v):
    return np.einsum('ij...,j...->i...', a, v)


def sym_traceless(m):
    """Project a 3x3 matrix onto the symmetric traceless subspace.

    Returns (m + m^T)/2 - (tr m / 3) Id.  Idempotent on values already in
    the subspace.
    """
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + transpose(m)) - (trace(m) / 3.0) * _eye_like(m)


def uniaxial(n, s, tol=DEFAULT.construct):
    """Uniaxial tensor s(nn - Id/3) for a unit director n.

    Eigenvalues are {2s/3, -s/3, -s/3} with the first eigenvector n.
    """
    n = np.asarray(n, dtype=float)
    nrm2 = np.einsum('i...,i...->...', n, n)
    if np.any(np.abs(nrm2 - 1.0) > 2.0 * tol):
        raise NonUnitDirector(
            f"director norm deviates from 1 by up to {np.max(np.abs(np.sqrt(nrm2) - 1.0)):.3e}")
    nn = outer(n, n)
    return s * (nn - _eye_like(nn) / 3.0)


def bform(q1, q2):
    """Symmetric bilinear form Q1.Q2 + (Q1.Q2)^T - (2/3)(Q1:Q2) Id."""
    p = mat_mul(q1, q2)
    return p + transpose(p) - (2.0 / 3.0) * frobenius(q1, q2) * _eye_like(p)


def cform(q1, q2, q3):
    """Symmetric trilinear form Q1(Q2:Q3) + Q2(Q1:Q3) + Q3(Q1:Q2)."""
    return (q1 * frobenius(q2, q3) + q2 * frobenius(q1, q3)
            + q3 * frobenius(q1, q2))


def commutator(a, b):
    return mat_mul(a, b) - mat_mul(b, a)


def anticommutator(a, b):
    return mat_mul(a, b) + mat_mul(b, a)


def biaxiality(q):
    """Biaxiality measure 1 - 6 (tr Q^3)^2 / |Q|^6, zero at Q=0 by convention.

    Vanishes exactly on uniaxial tensors and reaches 1 on maximally biaxial
    ones.
    """
    q = np.asarray(q, dtype=float)
    norm2 = frobenius(q, q)
    tr3 = trace(mat_mul(mat_mul(q, q), q))
    norm6 = norm2 ** 3
    with np.errstate(divide='ignore', invalid='ignore'):
        beta = 1.0 - 6.0 * tr3 ** 2 / norm6
    beta = np.where(norm6 > 0.0, beta, 0.0)
    # clip roundoff excursions outside [0, 1]
    beta = np.clip(beta, 0.0, 1.0)
    if beta.ndim == 0:
        return float(beta)
    return beta


def symmetry_defect(q):
    """Max-norm deviation of q from its symmetric traceless projection."""
    return float(np.max(np.abs(q - sym_traceless(q))))


def is_sym_traceless(q, tol=DEFAULT.construct):
    return symmetry_defect(np.asarray(q, dtype=float)) <= tol


def random_sym_traceless(rng, shape=()):
    """Random S^3_0 samples with entries of order one (testing aid)."""
    m = rng.uniform(-1.0, 1.0, size=(3, 3) + tuple(shape))
    return sym_traceless(m)


def random_director(rng, shape=()):
    """Uniformly distributed unit 3-vectors (testing aid)."""
    v = rng.normal(size=(3,) + tuple(shape))
    return v / np.sqrt(np.einsum('i...,i...->...', v, v))
