"""End(E)-valued differential forms at a point, stored as jets of coefficient arrays.

A k-form is ``alpha = (1/k!) alpha_{mu_1..mu_k} dx^{mu_1} ^ ... ^ dx^{mu_k}`` with a
fully antisymmetric coefficient array of shape ``(n,)*k + (N, N)``.  E-valued
forms use the same layout with trailing ``(N, m)`` blocks (m probe columns).
An :class:`EndForm` may be inhomogeneous: it maps degrees to coefficient jets.

Products follow the graded tensor product convention
``(dx^I (x) a)(dx^J (x) b) = dx^I ^ dx^J (x) (a_+ + (-1)^{|J|} a_-) b``,
where ``a_+`` / ``a_-`` are the even and odd parts of ``a`` for the grading of E.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import factorial

import numpy as np

from .bundle import ModuleJet
from .clifford import DimensionError
from .jets import Jet, bilinear, einsum

__all__ = [
    "FormError",
    "EndForm",
    "perm_sign",
    "antisymmetrize",
    "wedge",
    "contract",
    "quantize_form",
    "beta",
    "ev_g",
    "dot",
    "c2_tensor",
    "d_nabla",
    "covariant_one_form",
    "curvature",
    "split_total_parity",
    "supercommutator_forms",
]

_LETTERS = "abcdefgh"


class FormError(ValueError):
    """Bad degree or shape for a form operation."""


def perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def antisymmetrize(arr: np.ndarray, k: int, lead: int = 0) -> np.ndarray:
    """Project axes ``lead .. lead+k-1`` onto their antisymmetric part."""
    if k < 2:
        return arr
    out = np.zeros_like(arr)
    rest = list(range(lead + k, arr.ndim))
    head = list(range(lead))
    for p in permutations(range(k)):
        axes = head + [lead + q for q in p] + rest
        out = out + perm_sign(p) * np.transpose(arr, axes)
    return out / factorial(k)


def _shuffle_sum(t: np.ndarray, k: int, l: int, lead: int) -> np.ndarray:
    """sum over (k, l)-shuffles s of sgn(s) t o s, on axes after ``lead``."""
    if k == 0 or l == 0:
        return t
    out = np.zeros_like(t)
    head = list(range(lead))
    tail = list(range(lead + k + l, t.ndim))
    for first in combinations(range(k + l), k):
        second = [i for i in range(k + l) if i not in first]
        slots = list(first) + second
        order = np.argsort(slots)
        axes = head + [lead + int(q) for q in order] + tail
        out = out + perm_sign(slots) * np.transpose(t, axes)
    return out


@dataclass(frozen=True, eq=False)
class EndForm:
    """Possibly inhomogeneous form; ``parts[k]`` is the degree-k coefficient jet."""

    n: int
    parts: dict[int, Jet] = field(default_factory=dict)

    def __post_init__(self):
        for k, jet in self.parts.items():
            if not 0 <= k <= self.n:
                raise FormError(f"degree {k} outside 0..{self.n}")
            if jet.val.shape[:k] != (self.n,) * k or jet.val.ndim != k + 2:
                raise FormError(f"degree-{k} coefficients of shape {jet.val.shape}")

    @classmethod
    def homogeneous(cls, k: int, coeffs: Jet) -> EndForm:
        n = coeffs.val.shape[0] if k else coeffs.d1.shape[0]
        return cls(n, {k: coeffs})

    @classmethod
    def scalar(cls, value: Jet) -> EndForm:
        """Degree-0 form from an (N, N) jet."""
        return cls(value.d1.shape[0], {0: value})

    @property
    def degrees(self) -> list[int]:
        return sorted(self.parts)

    @property
    def degree(self) -> int:
        if len(self.parts) != 1:
            raise FormError(f"form has degrees {self.degrees}, not a single degree")
        return next(iter(self.parts))

    @property
    def order(self) -> int:
        return min((j.order for j in self.parts.values()), default=2)

    def part(self, k: int) -> EndForm:
        return EndForm(self.n, {k: self.parts[k]} if k in self.parts else {})

    def coeffs(self, k: int) -> Jet:
        return self.parts[k]

    def without(self, k: int) -> EndForm:
        return EndForm(self.n, {d: j for d, j in self.parts.items() if d != k})

    def truncate(self, order: int) -> EndForm:
        return EndForm(self.n, {k: j.truncate(order) for k, j in self.parts.items()})

    def map(self, f) -> EndForm:
        return EndForm(self.n, {k: j.map(f) for k, j in self.parts.items()})

    def value(self, k: int) -> np.ndarray:
        return self.parts[k].val

    def __add__(self, other: EndForm) -> EndForm:
        if self.n != other.n:
            raise DimensionError(f"forms on charts of dimension {self.n} and {other.n}")
        out = dict(self.parts)
        for k, j in other.parts.items():
            out[k] = out[k] + j if k in out else j
        return EndForm(self.n, out)

    def __neg__(self) -> EndForm:
        return self.map(np.negative)

    def __sub__(self, other: EndForm) -> EndForm:
        return self + (-other)

    def __mul__(self, scalar) -> EndForm:
        return self.map(lambda a: a * scalar)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(j.val), initial=0.0)) for j in self.parts.values()),
                   default=0.0)


def _regrade(jet: Jet, l: int, grading: np.ndarray) -> Jet:
    """a_+ + (-1)^l a_-."""
    if l % 2 == 0:
        return jet
    return jet.map(lambda a: grading @ a @ grading)


def wedge(a: EndForm, b: EndForm, grading: np.ndarray) -> EndForm:
    """Graded product of forms; ``b`` may be End(E)- or E-valued."""
    if a.n != b.n:
        raise DimensionError(f"forms on charts of dimension {a.n} and {b.n}")
    n = a.n
    out: dict[int, Jet] = {}
    for k, ja in a.parts.items():
        for l, jb in b.parts.items():
            if k + l > n:
                continue
            if ja.val.shape[-1] != jb.val.shape[-2]:
                raise DimensionError(f"fiber mismatch {ja.val.shape} x {jb.val.shape}")
            def f(x, y, k=k, l=l):
                lx, ly = x.shape[:x.ndim - k - 2], y.shape[:y.ndim - l - 2]
                xs = x.reshape(lx + (n ** k, 1) + x.shape[-2:])
                ys = y.reshape(ly + (1, n ** l) + y.shape[-2:])
                t = np.matmul(xs, ys)
                t = t.reshape(t.shape[:-4] + (n,) * (k + l) + t.shape[-2:])
                return _shuffle_sum(t, k, l, t.ndim - k - l - 2)

            term = bilinear(f, _regrade(ja, l, grading), jb)
            out[k + l] = out[k + l] + term if k + l in out else term
    return EndForm(n, out)


def contract(vector, alpha: EndForm) -> EndForm:
    """Interior product i_X with a constant coordinate vector X."""
    x = np.asarray(vector)
    if alpha.parts and max(alpha.parts) == 0:
        raise FormError("interior product of a function")
    out = {}
    for k, j in alpha.parts.items():
        if k:
            out[k - 1] = j.map(lambda a, k=k: np.tensordot(a, x, axes=([a.ndim - k - 2], [0])))
    return EndForm(alpha.n, out)


def _contract_blocks(u: np.ndarray, v: np.ndarray, k: int, keep: int = 0) -> np.ndarray:
    """sum_I u_I @ v_{J I} over k form axes; ``v`` keeps ``keep`` leading form axes J.

    ``u`` has shape lead + (n,)*k + (N, N), ``v`` lead' + (n,)*(keep+k) + (N, M).
    """
    dim = u.shape[-2]
    lu = u.shape[:u.ndim - k - 2]
    lv = v.shape[:v.ndim - k - keep - 2]
    kept = v.shape[len(lv):len(lv) + keep]
    m = int(np.prod(u.shape[len(lu):len(lu) + k], dtype=int))
    # u -> (lead, N, m*N): row block p, columns (I, q)
    uu = np.moveaxis(u.reshape(lu + (m, dim, u.shape[-1])), -2, -3)
    uu = uu.reshape(lu + (dim, m * u.shape[-1]))
    vv = v.reshape(lv + kept + (m * v.shape[-2], v.shape[-1]))
    uu = uu.reshape(lu + (1,) * keep + uu.shape[-2:])
    return np.matmul(uu, vv)


def quantize_form(alpha: EndForm, mj: ModuleJet) -> Jet:
    """c(alpha) = sum_k (1/k!) alpha_I c^{mu_1} ... c^{mu_k} (Clifford factors on the left)."""
    total = None
    for k, j in alpha.parts.items():
        if k == 0:
            term = j
        else:
            term = bilinear(lambda u, v, k=k: _contract_blocks(u, v, k),
                            mj.clifford_products(k), j) / factorial(k)
        total = term if total is None else total + term
    if total is None:
        return Jet.constant(np.zeros((mj.dim, mj.dim), complex), mj.n, 1)
    return total


def beta(alpha: EndForm, mj: ModuleJet) -> Jet:
    """beta(alpha)_m = c(i(d_m) alpha), a one-form returned as a jet of shape (n, N, N)."""
    total = None
    for k, j in alpha.parts.items():
        if k == 0:
            continue
        if k == 1:
            term = j
        else:
            term = bilinear(lambda u, v, k=k: _contract_blocks(u, v, k - 1, keep=1),
                            mj.clifford_products(k - 1), j) / factorial(k - 1)
        total = term if total is None else total + term
    if total is None:
        return Jet.constant(np.zeros((mj.n, mj.dim, mj.dim), complex), mj.n, 1)
    return total


def ev_g(t: Jet, mj: ModuleJet) -> Jet:
    """g^{mu nu} t_{mu nu}."""
    if t.val.shape[:2] != (mj.n, mj.n):
        raise FormError(f"expected a 2-tensor, got shape {t.val.shape}")
    return einsum("mn,mnpq->pq", mj.geometry.inverse, t)


def dot(a: Jet, b: Jet) -> Jet:
    """(a . b)_{mu nu} = a_mu b_nu for one-forms given as (n, N, N) jets."""
    if a.val.ndim != 3 or b.val.ndim != 3:
        raise FormError("dot expects two one-forms")
    return einsum("mpq,nqr->mnpr", a, b)


def c2_tensor(t: Jet, mj: ModuleJet) -> Jet:
    """c^2(t) = c(dx^mu) c(dx^nu) t_{mu nu}; the first slot is quantised first."""
    return einsum("mnpq,mnqr->pr", mj.clifford_products(2), t)


def d_nabla(alpha: EndForm, connection: Jet, section: bool = False) -> EndForm:
    """Exterior covariant derivative for the connection d + Omega.

    For End-valued forms the connection acts by commutator, for E-valued
    forms (``section=True``) by left multiplication.
    """
    n = alpha.n
    out = {}
    for k, j in alpha.parts.items():
        if k >= n:
            continue
        ii = _LETTERS[:k]
        t = j.derivative() + einsum(f"mpq,{ii}qr->m{ii}pr", connection, j)
        if not section:
            t = t - einsum(f"{ii}pq,mqr->m{ii}pr", j, connection)
        out[k + 1] = t.map(lambda a, k=k: _shuffle_sum(a, 1, k, a.ndim - k - 3))
    return EndForm(n, out)


def covariant_one_form(alpha: Jet, connection: Jet, mj: ModuleJet) -> Jet:
    """(nabla_mu alpha)_nu = d_mu alpha_nu - Gamma^l_{mu nu} alpha_l + [Omega_mu, alpha_nu]."""
    gamma = mj.geometry.christoffel
    out = alpha.derivative() - einsum("lmn,lpq->mnpq", gamma, alpha.truncate(1))
    out = out + einsum("mpq,nqr->mnpr", connection, alpha) - einsum("npq,mqr->mnpr", alpha,
                                                                    connection)
    return out


def curvature(connection: Jet) -> EndForm:
    """R_{mu nu} = d_mu Omega_nu - d_nu Omega_mu + [Omega_mu, Omega_nu] as a 2-form."""
    d = connection.derivative()  # [mu, nu]
    t = d + einsum("mpq,nqr->mnpr", connection.truncate(d.order), connection.truncate(d.order))
    return EndForm.homogeneous(2, t.map(lambda a: a - np.swapaxes(a, -3, -4)))


def split_total_parity(alpha: EndForm, grading: np.ndarray) -> tuple[EndForm, EndForm]:
    """Even and odd parts for the total grading (form degree + endomorphism parity)."""
    even, odd = {}, {}
    for k, j in alpha.parts.items():
        plus = j.map(lambda a: 0.5 * (a + grading @ a @ grading))
        minus = j - plus
        (even if k % 2 == 0 else odd)[k] = plus
        (odd if k % 2 == 0 else even)[k] = minus
    return EndForm(alpha.n, even), EndForm(alpha.n, odd)


def supercommutator_forms(a: EndForm, b: EndForm, grading: np.ndarray) -> EndForm:
    """[a, b] = ab - (-1)^{|a||b|} ba, split into homogeneous pieces."""
    out = EndForm(a.n)
    for pa, ah in enumerate(split_total_parity(a, grading)):
        for pb, bh in enumerate(split_total_parity(b, grading)):
            if not ah.parts or not bh.parts:
                continue
            sign = -1.0 if pa * pb else 1.0
            out = out + wedge(ah, bh, grading) - sign * wedge(bh, ah, grading)
    return out
