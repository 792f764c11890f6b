"""The bilinear boundary operator S^i[V, W; F].

For a tuple F of differential functions, S satisfies the divergence identity

    W_sigma (L_F V)^sigma - V^rho (L*_F W)_rho = D_i S^i[V, W; F]

with L_F the linearization of F and L*_F its formal adjoint.  Swapping roles
(W = R, F = Lambda) gives the companion operator used by the second homotopy
formula.
"""
from __future__ import annotations

from typing import Mapping, Sequence

from ..calculus import jet_atoms, partial, substitute, total_derivative_multi
from ..expr import DiffExpr, MultiIndex, as_expr, expr_sum


def _counts(idx: Sequence[int], n: int) -> MultiIndex:
    c = [0] * n
    for i in idx:
        c[i] += 1
    return MultiIndex(c)


def bilinear_S(V: Sequence[DiffExpr], W: Sequence[DiffExpr], F: Sequence[DiffExpr],
               i: int, at: Mapping[int, DiffExpr] | None = None) -> DiffExpr:
    """S^i[V, W; F].

    For each jet U^rho_K of F^sigma with K_i >= 1, the sorted index expansion
    of K is split at every position holding i into a prefix J and a suffix P,
    contributing (-1)^|J| D_P(V^rho) D_J(W_sigma dF^sigma/dU^rho_K).  When
    ``at`` is given, the partial derivatives are evaluated at that
    substitution of the dependent variables before the total derivatives act.
    """
    terms = []
    for sigma, Fs in enumerate(F):
        Ws = as_expr(W[sigma])
        if not Ws or not Fs:
            continue
        for a in jet_atoms(Fs):
            K = a.multi
            if K[i] == 0 or not V[a.dep]:
                continue
            n = len(K)
            pf = partial(Fs, a)
            if at:
                pf = substitute(pf, at)
            inner = Ws * pf
            if not inner:
                continue
            idx = K.indices()
            for pos, v in enumerate(idx):
                if v != i:
                    continue
                J = _counts(idx[:pos], n)
                Pm = _counts(idx[pos + 1:], n)
                t = total_derivative_multi(as_expr(V[a.dep]), Pm) * total_derivative_multi(inner, J)
                terms.append(-t if J.order % 2 else t)
    return expr_sum(terms)
