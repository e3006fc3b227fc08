"""Additive implicit-explicit Runge-Kutta tableaux and the coupled stage loop.

A scheme is a pair of Butcher tableaux with shared abscissae: a strictly
lower-triangular explicit table applied to the non-stiff operator N and a
diagonally implicit table applied to the stiff linear operator G.  Stage
zero is the step's initial state (first rows are zero), the convention of
the Ascher-Ruuth-Spiteri family shipped here.

The stepper is generic over a "split operator pair": any object with

    explicit_tendency(q, t)      -> N(q, t)
    implicit_solve(shift, r)     -> q solving  q - shift * G(q) = r
    apply_implicit(q)            -> G(q)   (optional; only consulted for
                                   stages that are never solved implicitly)

States only need +, -, and scalar multiplication, so plain numbers, numpy
arrays, and StateField all work.  After an implicit stage the stiff
tendency is recovered algebraically as (Q - r) / shift instead of
reapplying the operator, which keeps it exactly consistent with the
solver's view of the operator.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, SolverFailureError, UnknownSchemeError

_TOL = 1e-14


@dataclass(frozen=True)
class ImexTableau:
    name: str
    A_ex: np.ndarray
    b_ex: np.ndarray
    c_ex: np.ndarray
    A_im: np.ndarray
    b_im: np.ndarray
    c_im: np.ndarray
    order: int
    stiffly_accurate: bool

    @property
    def stages(self):
        return self.b_ex.size

    def validate(self):
        """Check the structural invariants; raise InvalidArgumentError on failure."""
        s = self.stages
        for label, A, b, c in (
            ("explicit", self.A_ex, self.b_ex, self.c_ex),
            ("implicit", self.A_im, self.b_im, self.c_im),
        ):
            if A.shape != (s, s) or b.shape != (s,) or c.shape != (s,):
                raise InvalidArgumentError(f"{self.name}: inconsistent {label} tableau shapes")
            if abs(np.sum(b) - 1.0) > _TOL:
                raise InvalidArgumentError(f"{self.name}: {label} weights do not sum to 1")
            if np.max(np.abs(np.sum(A, axis=1) - c)) > _TOL:
                raise InvalidArgumentError(f"{self.name}: {label} abscissae are not row sums")
        if np.any(np.triu(self.A_ex) != 0.0):
            raise InvalidArgumentError(f"{self.name}: explicit table must be strictly lower triangular")
        if np.any(np.triu(self.A_im, 1) != 0.0):
            raise InvalidArgumentError(f"{self.name}: implicit table must be lower triangular")
        if self.stiffly_accurate:
            if np.max(np.abs(self.A_ex[-1] - self.b_ex)) > _TOL or np.max(
                np.abs(self.A_im[-1] - self.b_im)
            ) > _TOL:
                raise InvalidArgumentError(f"{self.name}: stiff-accuracy flag contradicts the tables")
        return self


def _make(name, A_ex, b_ex, A_im, b_im, order, stiffly_accurate):
    A_ex = np.asarray(A_ex, dtype=float)
    A_im = np.asarray(A_im, dtype=float)
    b_ex = np.asarray(b_ex, dtype=float)
    b_im = np.asarray(b_im, dtype=float)
    return ImexTableau(
        name=name,
        A_ex=A_ex,
        b_ex=b_ex,
        c_ex=A_ex.sum(axis=1),
        A_im=A_im,
        b_im=b_im,
        c_im=A_im.sum(axis=1),
        order=order,
        stiffly_accurate=stiffly_accurate,
    ).validate()


def _ars111():
    return _make(
        "ars111",
        A_ex=[[0.0, 0.0], [1.0, 0.0]],
        b_ex=[1.0, 0.0],
        A_im=[[0.0, 0.0], [0.0, 1.0]],
        b_im=[0.0, 1.0],
        order=1,
        stiffly_accurate=True,
    )


def _ars222():
    g = 1.0 - np.sqrt(2.0) / 2.0
    d = 1.0 - 1.0 / (2.0 * g)
    return _make(
        "ars222",
        A_ex=[[0.0, 0.0, 0.0], [g, 0.0, 0.0], [d, 1.0 - d, 0.0]],
        b_ex=[d, 1.0 - d, 0.0],
        A_im=[[0.0, 0.0, 0.0], [0.0, g, 0.0], [0.0, 1.0 - g, g]],
        b_im=[0.0, 1.0 - g, g],
        order=2,
        stiffly_accurate=True,
    )


def _ars233():
    g = (3.0 + np.sqrt(3.0)) / 6.0
    return _make(
        "ars233",
        A_ex=[[0.0, 0.0, 0.0], [g, 0.0, 0.0], [g - 1.0, 2.0 * (1.0 - g), 0.0]],
        b_ex=[0.0, 0.5, 0.5],
        A_im=[[0.0, 0.0, 0.0], [0.0, g, 0.0], [0.0, 1.0 - 2.0 * g, g]],
        b_im=[0.0, 0.5, 0.5],
        order=3,
        stiffly_accurate=False,
    )


_SCHEMES = {"ars111": _ars111, "ars222": _ars222, "ars233": _ars233}


def scheme_names():
    return sorted(_SCHEMES)


def tableau(name):
    """Look up a shipped scheme by name."""
    try:
        maker = _SCHEMES[name]
    except KeyError:
        raise UnknownSchemeError(
            f"unknown scheme {name!r}; available: {', '.join(scheme_names())}"
        ) from None
    return maker()


@dataclass(frozen=True)
class ConditionCheck:
    label: str
    order: int
    residual: float

    @property
    def ok(self):
        return self.residual <= 1e-13


def check_order_conditions(tab, up_to_order):
    """Evaluate the additive order conditions through the requested order.

    Order 1 checks the weight sums; order 2 all four b.c pairings across
    the two tableaux; order 3 every mixed b.(c*c) = 1/3 and b.(A c) = 1/6
    combination.  Returns one ConditionCheck per condition.
    """
    if up_to_order > 3:
        raise InvalidArgumentError("order conditions implemented up to order 3")
    b = {"ex": tab.b_ex, "im": tab.b_im}
    c = {"ex": tab.c_ex, "im": tab.c_im}
    A = {"ex": tab.A_ex, "im": tab.A_im}
    checks = []
    for k in ("ex", "im"):
        checks.append(ConditionCheck(f"sum(b_{k}) = 1", 1, abs(np.sum(b[k]) - 1.0)))
    if up_to_order >= 2:
        for bk in ("ex", "im"):
            for ck in ("ex", "im"):
                checks.append(
                    ConditionCheck(
                        f"b_{bk}.c_{ck} = 1/2", 2, abs(np.dot(b[bk], c[ck]) - 0.5)
                    )
                )
    if up_to_order >= 3:
        for bk in ("ex", "im"):
            for c1, c2 in (("ex", "ex"), ("ex", "im"), ("im", "im")):
                checks.append(
                    ConditionCheck(
                        f"b_{bk}.(c_{c1}*c_{c2}) = 1/3",
                        3,
                        abs(np.dot(b[bk], c[c1] * c[c2]) - 1.0 / 3.0),
                    )
                )
            for ak in ("ex", "im"):
                for ck in ("ex", "im"):
                    checks.append(
                        ConditionCheck(
                            f"b_{bk}.(A_{ak} c_{ck}) = 1/6",
                            3,
                            abs(np.dot(b[bk], A[ak] @ c[ck]) - 1.0 / 6.0),
                        )
                    )
    return checks


def step(pair, q, t, dt, tab):
    """Advance one IMEX step of size dt from state q at time t."""
    s = tab.stages
    A_ex, A_im = tab.A_ex, tab.A_im
    stage_q = [None] * s
    stage_n = [None] * s
    stage_g = [None] * s

    def explicit(j):
        if stage_n[j] is None:
            stage_n[j] = pair.explicit_tendency(stage_q[j], t + tab.c_ex[j] * dt)
        return stage_n[j]

    def implicit(j):
        if stage_g[j] is None:
            apply = getattr(pair, "apply_implicit", None)
            if apply is None:
                raise InvalidArgumentError(
                    f"{tab.name} references the stiff tendency of explicit stage {j}, "
                    "but the operator pair cannot apply it directly"
                )
            stage_g[j] = apply(stage_q[j])
        return stage_g[j]

    for i in range(s):
        r = q
        for j in range(i):
            if A_ex[i, j] != 0.0:
                r = r + (dt * A_ex[i, j]) * explicit(j)
            if A_im[i, j] != 0.0:
                r = r + (dt * A_im[i, j]) * implicit(j)
        shift = A_im[i, i]
        if shift != 0.0:
            try:
                stage_q[i] = pair.implicit_solve(shift * dt, r)
            except SolverFailureError as exc:
                raise SolverFailureError(
                    f"stage {i} of {tab.name}: {exc}",
                    residual=exc.residual,
                    iterations=exc.iterations,
                ) from exc
            stage_g[i] = (stage_q[i] - r) * (1.0 / (shift * dt))
        else:
            stage_q[i] = r

    if tab.stiffly_accurate:
        return stage_q[s - 1]
    out = q
    for j in range(s):
        if tab.b_ex[j] != 0.0:
            out = out + (dt * tab.b_ex[j]) * explicit(j)
        if tab.b_im[j] != 0.0:
            out = out + (dt * tab.b_im[j]) * implicit(j)
    return out
