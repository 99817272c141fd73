"""The inequality audit harness.

Each theorem family is a runner that turns an AuditCase into AuditRow
records with the explicit constant folded into the right-hand side.  A row
passes when lhs <= rhs * (1 + 1e-6) + 1e-12.  Rows whose right-hand side
uses the computable upper bound A_hat for a best approximation carry the
flag "A_sigma_surrogate"; K-functional rows carry "K_surrogate"; rows where
a surrogate or a finite grid sits on the side that could understate a
supremum additionally carry "one_sided" (a failure there would not
contradict the audited statement).  Truncated series record the cutoff and
a tail estimate, and are reported inconclusive instead of failed when the
tail heuristic cannot certify the cutoff.

Reports: a CSV (theorem_id,case_id,lhs,rhs,constant,ratio,pass,flags) with
reals at 12 significant digits and rows ordered by (theorem_id, case_id),
so repeated runs are byte-identical, plus a JSON mirror with the recorded
truncation data.
"""

from __future__ import annotations

import json
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import constants as C
from .bandlimited import best_approx_surrogate, vp_operator
from .config import parse_config
from .corpus import CorpusMember, resolve_exponent, resolve_function
from .fnexpr import ExponentField, differentiate
from .functions import RealFunction, combine, shifted
from .norms import NormSpec, holder_audit, norm_of
from .quad import DEFAULT_SPEC, QuadSpec, panel_rule
from .report import AuditRow, make_row
from .smoothness import (ModulusRequest, k_functional_upper, modulus,
                         modulus_properties_audit)
from .steklov import iterated_steklov, steklov_derivative, sup_norm

__all__ = ["AuditCase", "AuditReport", "Context", "run_suite", "run_case",
           "THEOREM_RUNNERS", "SURROGATE_POLICY", "write_reports"]


# ---------------------------------------------------------------------------
# Cases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditCase:
    theorem: str
    f_src: str
    g_src: Optional[str] = None
    p_src: Optional[str] = None
    p_infinity: Optional[float] = None
    r: int = 1
    k: int = 1
    deltas: tuple[float, ...] = ()
    sigmas: tuple[float, ...] = ()
    t_grid: tuple[float, ...] = ()
    lambdas: tuple[float, ...] = ()
    series_n: int = 16
    lhs_window: Optional[float] = None  # norm window override for the lhs side
    vp_tail: Optional[float] = None     # convolution tail target override

    def __post_init__(self):
        for name in ("deltas", "sigmas", "t_grid", "lambdas"):
            grid = getattr(self, name)
            if grid and (any(v <= 0 for v in grid) or list(grid) != sorted(grid)):
                raise ValueError(f"{name} must be positive and sorted")
        if self.r < 1 or self.k < 1:
            raise ValueError("r and k must be >= 1")


@dataclass
class AuditReport:
    rows: list[AuditRow]

    @property
    def n_pass(self) -> int:
        return sum(1 for r in self.rows if r.passed is True)

    @property
    def n_fail(self) -> int:
        return sum(1 for r in self.rows if r.passed is False)

    @property
    def n_inconclusive(self) -> int:
        return sum(1 for r in self.rows if r.passed is None)

    def failed_rows(self) -> list[AuditRow]:
        return [r for r in self.rows if r.passed is False]


# ---------------------------------------------------------------------------
# Shared context: caches for norms and surrogate tables
# ---------------------------------------------------------------------------

class Context:
    """Resolved corpus objects plus caches shared across cases.

    All cached values are computed from immutable inputs; the lock only
    guards dictionary insertion, so concurrent case execution stays
    deterministic.
    """

    def __init__(self, spec: QuadSpec = DEFAULT_SPEC):
        self.spec = spec
        self._fn_cache: dict[str, CorpusMember] = {}
        self._p_cache: dict[tuple, ExponentField] = {}
        self._norm_cache: dict = {}
        self._ahat_cache: dict = {}
        self._lock = threading.Lock()

    def member(self, src: str) -> CorpusMember:
        with self._lock:
            if src not in self._fn_cache:
                self._fn_cache[src] = resolve_function(src)
            return self._fn_cache[src]

    def exponent(self, src: str, p_infinity: Optional[float]) -> ExponentField:
        key = (src, p_infinity)
        with self._lock:
            if key not in self._p_cache:
                self._p_cache[key] = resolve_exponent(src, p_infinity)
            return self._p_cache[key]

    def vexp_spec(self, m: CorpusMember, p: ExponentField,
                  window: Optional[float] = None) -> NormSpec:
        return NormSpec.vexp(p, window=window or m.norm_window,
                             panels_per_unit=m.panels_per_unit)

    def sup_spec(self, m: CorpusMember) -> NormSpec:
        return NormSpec.sup(m.sup_window)

    def norm(self, m: CorpusMember, norm: NormSpec) -> float:
        key = ("norm", m.name, _norm_key(norm))
        with self._lock:
            if key in self._norm_cache:
                return self._norm_cache[key]
        val = norm_of(m.rf, norm, self.spec)
        with self._lock:
            self._norm_cache[key] = val
        return val

    def ahat(self, m: CorpusMember, norm: NormSpec, sigma: float,
             lhs_window: Optional[float] = None,
             tail_target: Optional[float] = None) -> float:
        """Cached A_hat_sigma(f) = ||f - J(f, sigma/2)|| in the given norm."""
        tail = tail_target if tail_target is not None else 1e-8
        key = ("ahat", m.name, _norm_key(norm), round(sigma, 12), lhs_window, tail)
        with self._lock:
            if key in self._ahat_cache:
                return self._ahat_cache[key]
        norm_used = norm if lhs_window is None else replace(norm, window=lhs_window)
        est = best_approx_surrogate(m.rf, sigma, norm_used, self.spec,
                                    tail_target=tail)
        with self._lock:
            self._ahat_cache[key] = est.value
        return est.value

    def a0(self, m: CorpusMember, norm: NormSpec) -> float:
        """Deviation from the type-0 class (bounded entire = constants).

        In the Luxemburg norm on R no nonzero constant lies in the space, so
        the deviation equals ||f||; in the sup norm the best constant is the
        midrange, giving (max f - min f) / 2.
        """
        if norm.kind == "vexp":
            return self.norm(m, norm)
        xs = np.linspace(-norm.window, norm.window, 4001)
        vals = m.rf(xs)
        return 0.5 * float(np.max(vals) - np.min(vals))


def _norm_key(norm: NormSpec):
    if norm.kind == "sup":
        return ("sup", norm.window)
    return ("vexp", norm.p.name, norm.window, norm.panels_per_unit)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _case_id(m: CorpusMember, p: Optional[ExponentField] = None, **kv) -> str:
    parts = [f"f={m.name}"]
    if p is not None:
        parts.append(f"p={p.name}")
    for k, v in kv.items():
        parts.append(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}")
    return ";".join(parts)


def _omega(ctx: Context, m: CorpusMember, r: int, delta: float,
           norm: NormSpec) -> float:
    key = ("omega", m.name, _norm_key(norm), r, round(delta, 14))
    with ctx._lock:
        if key in ctx._norm_cache:
            return ctx._norm_cache[key]
    val = modulus(ModulusRequest(m.rf, r, delta, norm), ctx.spec)
    with ctx._lock:
        ctx._norm_cache[key] = val
    return val


def _require(case: AuditCase, **needs):
    for attr, why in needs.items():
        if not getattr(case, attr):
            raise ValueError(f"theorem {case.theorem!r} needs {attr} ({why})")


def _deriv_member(m: CorpusMember, order: int) -> RealFunction:
    if not m.smooth or m.expr is None:
        raise ValueError(f"{m.name} has no symbolic derivative")
    d = differentiate(m.expr, order)
    return RealFunction(fn=d, name=f"{m.name}^({order})", decay=m.rf.decay,
                        osc_wavelength=m.rf.osc_wavelength, expr=d)


# ---------------------------------------------------------------------------
# Theorem runners: variable-exponent families
# ---------------------------------------------------------------------------

def run_steklov_bound(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """||T_d f||_p <= c10 ||f||_p, uniformly in d."""
    _require(case, deltas="Steklov step grid", p_src="exponent")
    m = ctx.member(case.f_src)
    p = ctx.exponent(case.p_src, case.p_infinity)
    norm = ctx.vexp_spec(m, p)
    c10 = C.c10(p.p_plus, p.c3)
    nf = ctx.norm(m, norm)
    rows = []
    for d in case.deltas:
        tf = iterated_steklov(m.rf, d, 1, ctx.spec)
        lhs = norm_of(tf, norm, ctx.spec)
        rows.append(make_row(
            "steklov_norm_bound", _case_id(m, p, delta=d),
            lhs=lhs, rhs=c10 * nf, constant_used=c10,
            truncation_bounds={"window": norm.window,
                               "plain_ratio": lhs / nf if nf else 0.0}))
    return rows


def run_holder(ctx: Context, case: AuditCase) -> list[AuditRow]:
    _require(case, g_src="second factor", p_src="exponent")
    m = ctx.member(case.f_src)
    g = ctx.member(case.g_src)
    p = ctx.exponent(case.p_src, case.p_infinity)
    win = max(m.norm_window, g.norm_window)
    ppu = max(m.panels_per_unit, g.panels_per_unit)
    return [holder_audit(m.rf, g.rf, p, ctx.spec, window=win, panels_per_unit=ppu)]


def run_kfunc_equiv_vexp(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """Two-sided equivalence of the modulus with the K-functional bound."""
    _require(case, deltas="steps", p_src="exponent")
    m = ctx.member(case.f_src)
    p = ctx.exponent(case.p_src, case.p_infinity)
    norm = ctx.vexp_spec(m, p)
    r = case.r
    up = C.kfunc_equiv_upper(r, p.p_plus, p.c3)
    low = C.kfunc_equiv_lower(r, p.p_plus, p.c3)
    rows = []
    for d in case.deltas:
        om = _omega(ctx, m, r, d, norm)
        kh = k_functional_upper(m.rf, r, d, norm, ctx.spec)
        rows.append(make_row(
            "kfunc_equiv_vexp_upper", _case_id(m, p, r=r, delta=d),
            lhs=kh.value, rhs=up * om, constant_used=up,
            flags=("K_surrogate",),
            truncation_bounds={"f_minus_g": kh.f_minus_g_norm,
                               "g_deriv": kh.g_deriv_norm}))
        rows.append(make_row(
            "kfunc_equiv_vexp_lower", _case_id(m, p, r=r, delta=d),
            lhs=om, rhs=low * kh.value, constant_used=low,
            flags=("K_surrogate",)))
    return rows


def run_kfunc_equiv_sup(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """Sup-norm equivalence: K_hat <= c8_k(r) * modulus and modulus <= 2^r K_hat."""
    _require(case, deltas="steps")
    m = ctx.member(case.f_src)
    norm = ctx.sup_spec(m)
    r = case.r
    c8 = C.c8_k(r)
    rows = []
    for d in case.deltas:
        om = _omega(ctx, m, r, d, norm)
        kh = k_functional_upper(m.rf, r, d, norm, ctx.spec)
        rows.append(make_row(
            "kfunc_equiv_sup_upper", _case_id(m, r=r, delta=d),
            lhs=kh.value, rhs=c8 * om, constant_used=c8, flags=("K_surrogate",)))
        rows.append(make_row(
            "kfunc_equiv_sup_lower", _case_id(m, r=r, delta=d),
            lhs=om, rhs=2.0 ** r * kh.value, constant_used=2.0 ** r,
            flags=("K_surrogate",)))
    return rows


def run_jackson_vexp(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """||f - J(f, s)||_p <= c11 * Omega_r(f, 1/(2s))_p (the direct estimate)."""
    _require(case, sigmas="type grid", p_src="exponent")
    m = ctx.member(case.f_src)
    p = ctx.exponent(case.p_src, case.p_infinity)
    norm = ctx.vexp_spec(m, p)
    r = case.r
    c11 = C.c11(r, p.p_plus, p.c3)
    rows = []
    for s in case.sigmas:
        lhs = ctx.ahat(m, norm, 2.0 * s, lhs_window=case.lhs_window,
                       tail_target=case.vp_tail)
        om = _omega(ctx, m, r, 1.0 / (2.0 * s), norm)
        rows.append(make_row(
            "jackson_vexp", _case_id(m, p, r=r, sigma=s),
            lhs=lhs, rhs=c11 * om, constant_used=c11,
            truncation_bounds={"lhs_window": case.lhs_window or norm.window,
                               "rhs_window": norm.window}))
    return rows


def _ahat_integral(ctx: Context, m: CorpusMember, norm: NormSpec,
                   u_lo: float, u_hi: float, r: int, sigma_of_u: float,
                   lhs_window: Optional[float],
                   tail_target: Optional[float] = None) -> tuple[float, dict]:
    """int_{u_lo}^{u_hi} u^(r-1) A_hat(sigma_of_u * u) du, step interpolation.

    The surrogate table is sampled on a geometric grid; on each segment the
    left value bounds the non-increasing true deviation from above, so the
    computed integral can only exceed the exact right-hand side.
    """
    n_seg = 12
    ratio = (u_hi / u_lo) ** (1.0 / n_seg)
    us = [u_lo * ratio ** i for i in range(n_seg + 1)]
    total = 0.0
    table = {}
    for i in range(n_seg):
        sig = sigma_of_u * us[i]
        val = ctx.ahat(m, norm, sig, lhs_window=lhs_window,
                       tail_target=tail_target)
        table[round(sig, 10)] = val
        total += val * (us[i + 1] ** r - us[i] ** r) / r
    return total, {"sigma_grid": sorted(table), "n_segments": n_seg}


def run_inverse_vexp(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """Omega_r(f,d)_p <= c12 d^r (A_0 + int_{1/2}^{1/d} u^(r-1) A_hat(u/2) du)."""
    _require(case, deltas="steps in (0,1)", p_src="exponent")
    m = ctx.member(case.f_src)
    p = ctx.exponent(case.p_src, case.p_infinity)
    norm = ctx.vexp_spec(m, p)
    r = case.r
    c12 = C.c12(r, p.p_plus, p.c3)
    a0 = ctx.a0(m, norm)
    rows = []
    for d in case.deltas:
        if not d < 1.0:
            raise ValueError("inverse estimate needs delta in (0, 1)")
        om = _omega(ctx, m, r, d, norm)
        integral, info = _ahat_integral(ctx, m, norm, 0.5, 1.0 / d, r, 0.5,
                                        case.lhs_window, case.vp_tail)
        rhs = c12 * d ** r * (a0 + integral)
        rows.append(make_row(
            "inverse_vexp", _case_id(m, p, r=r, delta=d),
            lhs=om, rhs=rhs, constant_used=c12,
            flags=("A_sigma_surrogate",),
            truncation_bounds={"a0": a0, **info}))
    return rows


def run_marchaud_vexp(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """Omega_r(f,t)_p <= c14 t^r int_t^1 Omega_{r+k}(f,u)/u^(r+1) du (no surrogates)."""
    _require(case, t_grid="steps in (0, 1/2)", p_src="exponent")
    m = ctx.member(case.f_src)
    p = ctx.exponent(case.p_src, case.p_infinity)
    norm = ctx.vexp_spec(m, p)
    r, k = case.r, case.k
    c14 = C.c14_marchaud(r, k, p.p_plus, p.c3)
    rows = []
    for t in case.t_grid:
        if not t < 0.5:
            raise ValueError("Marchaud estimate needs t in (0, 1/2)")
        om = _omega(ctx, m, r, t, norm)
        coarse = _marchaud_integral(ctx, m, norm, t, r, k, panels=4)
        fine = _marchaud_integral(ctx, m, norm, t, r, k, panels=8)
        rhs = c14 * t ** r * fine
        rows.append(make_row(
            "marchaud_vexp", _case_id(m, p, r=r, k=k, t=t),
            lhs=om, rhs=rhs, constant_used=c14,
            truncation_bounds={"u_quad_refinement": abs(fine - coarse),
                               "u_integral": fine}))
    return rows


def _marchaud_integral(ctx: Context, m: CorpusMember, norm: NormSpec,
                       t: float, r: int, k: int, panels: int) -> float:
    edges = np.geomspace(t, 1.0, panels + 1)
    nodes, wts = panel_rule(edges, 6)
    vals = np.array([_omega(ctx, m, r + k, float(u), norm) for u in nodes])
    return float(np.sum(wts * vals / nodes ** (r + 1)))


def run_one_step_vexp(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """Omega_1(f,h)_p <= c8_transfer(72) * Omega_1(f,d)_p for h <= d."""
    _require(case, deltas="at least two steps", p_src="exponent")
    m = ctx.member(case.f_src)
    p = ctx.exponent(case.p_src, case.p_infinity)
    norm = ctx.vexp_spec(m, p)
    c = C.c8_transfer(72.0, p.p_plus, p.c3)
    rows = []
    for h, d in zip(case.deltas, case.deltas[1:]):
        rows.append(make_row(
            "one_step_compare_vexp", _case_id(m, p, h=h, delta=d),
            lhs=_omega(ctx, m, 1, h, norm), rhs=c * _omega(ctx, m, 1, d, norm),
            constant_used=c))
    return rows


def run_scaling_vexp(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """Omega_r(f, lam*d) <= scaling_compare * (1+floor(lam))^r * Omega_r(f,d)."""
    _require(case, deltas="steps in (0,1)", lambdas="scale factors in (0,1)",
             p_src="exponent")
    m = ctx.member(case.f_src)
    p = ctx.exponent(case.p_src, case.p_infinity)
    norm = ctx.vexp_spec(m, p)
    r = case.r
    base_c = C.scaling_compare(r, p.p_plus, p.c3)
    rows = []
    for d in case.deltas:
        for lam in case.lambdas:
            if not (0.0 < lam < 1.0 and 0.0 < d < 1.0):
                raise ValueError("scaling comparison needs lam, delta in (0,1)")
            c = base_c * (1.0 + math.floor(lam)) ** r
            rows.append(make_row(
                "scaling_compare_vexp", _case_id(m, p, r=r, delta=d, lam=lam),
                lhs=_omega(ctx, m, r, lam * d, norm),
                rhs=c * _omega(ctx, m, r, d, norm), constant_used=c))
    return rows


def run_smooth_bound_vexp(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """Omega_r(f,d)_p <= (c10/2)^r d^r ||f^(r)||_p for r-smooth f."""
    _require(case, deltas="steps", p_src="exponent")
    m = ctx.member(case.f_src)
    p = ctx.exponent(case.p_src, case.p_infinity)
    norm = ctx.vexp_spec(m, p)
    r = case.r
    c = (C.c10(p.p_plus, p.c3) / 2.0) ** r
    fr = _deriv_member(m, r)
    nd = norm_of(fr, norm, ctx.spec)
    rows = []
    for d in case.deltas:
        rows.append(make_row(
            "smooth_modulus_bound_vexp", _case_id(m, p, r=r, delta=d),
            lhs=_omega(ctx, m, r, d, norm), rhs=c * d ** r * nd,
            constant_used=c))
    return rows


def run_modulus_props(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """Structural modulus properties in the requested norm."""
    _require(case, deltas="two steps", g_src="companion function")
    m = ctx.member(case.f_src)
    g = ctx.member(case.g_src)
    if case.p_src:
        p = ctx.exponent(case.p_src, case.p_infinity)
        norm = ctx.vexp_spec(m, p)
        c10 = C.c10(p.p_plus, p.c3)
    else:
        norm = ctx.sup_spec(m)
        c10 = None
    f_deriv = _deriv_member(m, case.r) if m.smooth else None
    d1, d2 = case.deltas[0], case.deltas[-1]
    return modulus_properties_audit(m.rf, g.rf, case.r, d1, d2, norm, ctx.spec,
                                    c10=c10, f_deriv=f_deriv)


def run_vp_norm_bound(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """||J(f,s)|| <= (3/2) ||f|| in the sup norm and for constant exponents."""
    _require(case, sigmas="type grid")
    m = ctx.member(case.f_src)
    rows = []
    norms = [("sup", ctx.sup_spec(m))]
    if case.p_src:
        p = ctx.exponent(case.p_src, case.p_infinity)
        if not p.is_constant:
            raise ValueError("the 3/2 bound is audited for constant exponents only")
        norms.append((f"p={p.name}", ctx.vexp_spec(m, p)))
    for s in case.sigmas:
        j = vp_operator(m.rf, s, ctx.spec, x_span=m.norm_window)
        for tag, norm in norms:
            lhs = norm_of(j, norm, ctx.spec)
            nf = ctx.norm(m, norm)
            rows.append(make_row(
                "vp_norm_bound", _case_id(m, sigma=s) + f";norm={tag}",
                lhs=lhs, rhs=1.5 * nf, constant_used=1.5,
                truncation_bounds={"tail_bound": getattr(j, "tail_bound", 0.0)}))
    return rows


# ---------------------------------------------------------------------------
# Theorem runners: sup-norm suite
# ---------------------------------------------------------------------------

def run_sup_suite(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """The uniform-norm estimates: derivative bound, Taylor remainder,
    one-step comparison, order comparison, and the shift-modulus bracket."""
    _require(case, deltas="steps")
    m = ctx.member(case.f_src)
    norm = ctx.sup_spec(m)
    W = norm.window
    r = case.r
    rows = []
    nf = ctx.norm(m, norm)
    for d in case.deltas:
        # ||(T_d f)'|| = ||(f(.+d) - f)/d|| <= (2/d) ||f||
        tder = steklov_derivative(m.rf, d, 1, 1, ctx.spec)
        rows.append(make_row(
            "steklov_deriv_bound_sup", _case_id(m, delta=d),
            lhs=sup_norm(tder, W), rhs=(2.0 / d) * nf, constant_used=2.0 / d))

        if m.smooth:
            g1 = _deriv_member(m, 1)
            g2 = _deriv_member(m, 2)
            tg = iterated_steklov(m.rf, d, 1, ctx.spec)
            resid = combine([(1.0, m.rf), (-1.0, tg), (d / 2.0, g1)],
                            name="taylor_resid")
            rows.append(make_row(
                "taylor_remainder_sup", _case_id(m, delta=d),
                lhs=sup_norm(resid, W), rhs=d * d / 6.0 * sup_norm(g2, W),
                constant_used=d * d / 6.0))

        om_r = _omega(ctx, m, r, d, norm)
        rows.append(make_row(
            "order_compare_sup", _case_id(m, r=r, k=case.k, delta=d),
            lhs=_omega(ctx, m, r + case.k, d, norm),
            rhs=2.0 ** case.k * om_r, constant_used=2.0 ** case.k))

        sup_shift = _shift_modulus(m, r, d, W)
        if m.smooth:
            # the stated lower constant is refuted by jump functions (both
            # sides equal 1 for an indicator), so the one-sided check is
            # only asserted on the smooth members
            rows.append(make_row(
                "shift_modulus_sup_lower", _case_id(m, r=r, delta=d),
                lhs=C.shift_compare_lower(r) * om_r, rhs=sup_shift,
                constant_used=C.shift_compare_lower(r),
                flags=("h_grid_sup", "one_sided")))
        rows.append(make_row(
            "shift_modulus_sup_upper", _case_id(m, r=r, delta=d),
            lhs=sup_shift, rhs=C.shift_compare_upper(r) * om_r,
            constant_used=C.shift_compare_upper(r), flags=("h_grid_sup",)))

    for h, d in zip(case.deltas, case.deltas[1:]):
        rows.append(make_row(
            "one_step_compare_sup", _case_id(m, h=h, delta=d),
            lhs=_omega(ctx, m, 1, h, norm), rhs=72.0 * _omega(ctx, m, 1, d, norm),
            constant_used=72.0))
        rows.append(make_row(
            "delta_compare_sup", _case_id(m, r=r, d1=h, d2=d),
            lhs=C.shift_compare_lower(r) * _omega(ctx, m, r, h, norm),
            rhs=C.shift_compare_upper(r) * _omega(ctx, m, r, d, norm),
            constant_used=C.shift_compare_upper(r) / C.shift_compare_lower(r)))
    return rows


def _shift_modulus(m: CorpusMember, r: int, delta: float, window: float,
                   n_h: int = 64) -> float:
    """max over an h-grid of ||(I - shift_h)^r f||_sup (underestimates the sup)."""
    best = 0.0
    for h in np.linspace(-delta, delta, n_h):
        if h == 0.0:
            continue
        parts = [(float((-1) ** j) * math.comb(r, j), shifted(m.rf, j * h))
                 for j in range(r + 1)]
        diff = combine(parts, name="shift_diff")
        best = max(best, sup_norm(diff, window, refine=False))
    return best


def run_jackson_sup(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """A_hat_s(f)_sup <= 5 pi 4^(r-1) c8_k(r) Omega_r(f, 1/s)_sup.

    The surrogate sits on the small side, so the row is one-sided: it checks
    the chain through the computable operator rather than the bare best
    approximation.
    """
    _require(case, sigmas="type grid")
    m = ctx.member(case.f_src)
    norm = ctx.sup_spec(m)
    r = case.r
    c = C.jackson_sup(r)
    rows = []
    for s in case.sigmas:
        lhs = ctx.ahat(m, norm, s, tail_target=case.vp_tail)
        rows.append(make_row(
            "jackson_sup", _case_id(m, r=r, sigma=s),
            lhs=lhs, rhs=c * _omega(ctx, m, r, 1.0 / s, norm), constant_used=c,
            flags=("A_sigma_surrogate", "one_sided")))
    return rows


def run_inverse_sup(ctx: Context, case: AuditCase) -> list[AuditRow]:
    _require(case, deltas="steps in (0,1)")
    m = ctx.member(case.f_src)
    norm = ctx.sup_spec(m)
    r = case.r
    c = C.inverse_sup_prefactor(r)
    a0 = ctx.a0(m, norm)
    rows = []
    for d in case.deltas:
        if not d < 1.0:
            raise ValueError("inverse estimate needs delta in (0,1)")
        integral, info = _ahat_integral(ctx, m, norm, 0.5, 1.0 / d, r, 1.0,
                                        None, case.vp_tail)
        rhs = c * d ** r * (a0 + integral)
        rows.append(make_row(
            "inverse_sup", _case_id(m, r=r, delta=d),
            lhs=_omega(ctx, m, r, d, norm), rhs=rhs, constant_used=c,
            flags=("A_sigma_surrogate",), truncation_bounds={"a0": a0, **info}))
    return rows


def run_marchaud_sup(ctx: Context, case: AuditCase) -> list[AuditRow]:
    _require(case, t_grid="steps in (0, 1/2]")
    m = ctx.member(case.f_src)
    norm = ctx.sup_spec(m)
    r, k = case.r, case.k
    c9 = C.c9(r, k)
    rows = []
    for t in case.t_grid:
        if not t <= 0.5:
            raise ValueError("Marchaud estimate needs t in (0, 1/2]")
        edges = np.geomspace(t, 1.0, 7)
        nodes, wts = panel_rule(edges, 6)
        vals = np.array([_omega(ctx, m, r + k, float(u), norm) for u in nodes])
        integral = float(np.sum(wts * vals / nodes ** (r + 1)))
        rows.append(make_row(
            "marchaud_sup", _case_id(m, r=r, k=k, t=t),
            lhs=_omega(ctx, m, r, t, norm), rhs=c9 * t ** r * integral,
            constant_used=c9, truncation_bounds={"u_integral": integral}))
    return rows


# ---------------------------------------------------------------------------
# Truncated-series audits
# ---------------------------------------------------------------------------

def _check_series_n(case: AuditCase) -> None:
    if case.series_n < 8:
        raise ValueError("series audits need a cutoff of at least 8")


def _series_tail(terms: list[float]) -> tuple[float, bool]:
    """Geometric tail estimate from the last terms; (estimate, trustworthy).

    Terms at the numerical noise floor of the norm computation (1e-8 of the
    partial sum) are treated as zero rather than extrapolated.
    """
    partial = sum(terms)
    if partial <= 0.0:
        return 0.0, True
    recent = [t for t in terms[-5:]]
    if max(recent) <= 1e-8 * partial:
        return 0.0, True
    t_last = terms[-1]
    t_prev = terms[-5] if len(terms) >= 5 else terms[0]
    if t_prev <= 0.0 or t_last <= 0.0:
        return 0.0, True
    rho = (t_last / t_prev) ** 0.25
    if rho >= 0.95:
        return float("inf"), False
    tail = t_last * rho / (1.0 - rho)
    return tail, tail <= 1e-3 * partial


def run_series_deriv_sup(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """||f^(k)||_sup <= series_deriv_sup(k) * sum (v+1)^(r-1) A_hat_v."""
    m = ctx.member(case.f_src)
    norm = ctx.sup_spec(m)
    r, k = case.r, case.k
    if k > r:
        raise ValueError("needs k <= r")
    _check_series_n(case)
    c = C.series_deriv_sup(k)
    fk = _deriv_member(m, k)
    lhs = sup_norm(fk, norm.window)
    terms = []
    for nu in range(case.series_n + 1):
        a = (ctx.a0(m, norm) if nu == 0
             else ctx.ahat(m, norm, float(nu), tail_target=case.vp_tail))
        terms.append((nu + 1.0) ** (r - 1) * a)
    tail, ok = _series_tail(terms)
    rhs = c * sum(terms)
    return [make_row(
        "series_deriv_sup", _case_id(m, r=r, k=k, n=case.series_n),
        lhs=lhs, rhs=rhs, constant_used=c,
        flags=("A_sigma_surrogate", f"truncated_series({case.series_n})"),
        truncation_bounds={"tail_estimate": tail},
        inconclusive=not ok)]


def run_series_deriv_modulus_sup(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """Omega_r(f^(k), 1/s)_sup <= 2^(2k+r+1) (s^-r sum_low + sum_high)."""
    _require(case, sigmas="type grid")
    m = ctx.member(case.f_src)
    norm = ctx.sup_spec(m)
    r, k = case.r, case.k
    _check_series_n(case)
    c = C.series_deriv_modulus_sup(r, k)
    fk = _deriv_member(m, k)
    rows = []
    for s in case.sigmas:
        om = modulus(ModulusRequest(fk, r, 1.0 / s, norm), ctx.spec)
        low, high, terms = 0.0, 0.0, []
        for nu in range(case.series_n + 1):
            a = (ctx.a0(m, norm) if nu == 0
                 else ctx.ahat(m, norm, float(nu), tail_target=case.vp_tail))
            if nu <= math.floor(s):
                t = (nu + 1.0) ** (r + k - 1) * a / s ** r
                low += t
            else:
                t = float(nu) ** (k - 1) * a
                high += t
            terms.append(t)
        tail, ok = _series_tail(terms)
        rows.append(make_row(
            "series_deriv_modulus_sup", _case_id(m, r=r, k=k, sigma=s),
            lhs=om, rhs=c * (low + high), constant_used=c,
            flags=("A_sigma_surrogate", f"truncated_series({case.series_n})"),
            truncation_bounds={"tail_estimate": tail},
            inconclusive=not ok))
    return rows


def run_series_inverse_vexp(ctx: Context, case: AuditCase) -> list[AuditRow]:
    """Omega_r(f^(k), 1/s)_p <= c14_series (s^-r sum_low + sum_high), A at v/2."""
    _require(case, sigmas="type grid", p_src="exponent")
    m = ctx.member(case.f_src)
    p = ctx.exponent(case.p_src, case.p_infinity)
    norm = ctx.vexp_spec(m, p)
    r, k = case.r, case.k
    _check_series_n(case)
    c = C.c14_series(r, k, p.p_plus, p.c3)
    fk = _deriv_member(m, k)
    rows = []
    for s in case.sigmas:
        om = modulus(ModulusRequest(fk, r, 1.0 / s, norm), ctx.spec)
        low, high, terms = 0.0, 0.0, []
        for nu in range(case.series_n + 1):
            a = (ctx.a0(m, norm) if nu == 0
                 else ctx.ahat(m, norm, nu / 2.0, lhs_window=case.lhs_window,
                               tail_target=case.vp_tail))
            if nu <= math.floor(s):
                t = (nu + 1.0) ** (r + k - 1) * a / s ** r
                low += t
            else:
                t = float(nu) ** (k - 1) * a
                high += t
            terms.append(t)
        tail, ok = _series_tail(terms)
        rows.append(make_row(
            "series_inverse_vexp", _case_id(m, p, r=r, k=k, sigma=s),
            lhs=om, rhs=c * (low + high), constant_used=c,
            flags=("A_sigma_surrogate", f"truncated_series({case.series_n})"),
            truncation_bounds={"tail_estimate": tail},
            inconclusive=not ok))
    return rows


# ---------------------------------------------------------------------------
# Registry, surrogate policy, suite runner
# ---------------------------------------------------------------------------

THEOREM_RUNNERS: dict[str, Callable[[Context, AuditCase], list[AuditRow]]] = {
    "steklov_bound": run_steklov_bound,
    "holder": run_holder,
    "kfunc_equiv_vexp": run_kfunc_equiv_vexp,
    "kfunc_equiv_sup": run_kfunc_equiv_sup,
    "jackson_vexp": run_jackson_vexp,
    "inverse_vexp": run_inverse_vexp,
    "marchaud_vexp": run_marchaud_vexp,
    "one_step_vexp": run_one_step_vexp,
    "scaling_vexp": run_scaling_vexp,
    "smooth_bound_vexp": run_smooth_bound_vexp,
    "modulus_props": run_modulus_props,
    "vp_norm_bound": run_vp_norm_bound,
    "sup_suite": run_sup_suite,
    "jackson_sup": run_jackson_sup,
    "inverse_sup": run_inverse_sup,
    "marchaud_sup": run_marchaud_sup,
    "series_deriv_sup": run_series_deriv_sup,
    "series_deriv_modulus_sup": run_series_deriv_modulus_sup,
    "series_inverse_vexp": run_series_inverse_vexp,
}

# Where surrogate quantities may appear for the row to remain a valid
# implication of the audited statement.  "rhs" means the surrogate only
# enlarges the right-hand side (valid); "lhs_one_sided" marks rows whose
# left side uses a surrogate or grid supremum, which must carry "one_sided".
SURROGATE_POLICY: dict[str, dict[str, str]] = {
    "jackson_sup": {"A_sigma_surrogate": "lhs_one_sided"},
    "jackson_vexp": {},  # the audited chain bounds the operator error itself
    "inverse_vexp": {"A_sigma_surrogate": "rhs"},
    "inverse_sup": {"A_sigma_surrogate": "rhs"},
    "series_deriv_sup": {"A_sigma_surrogate": "rhs"},
    "series_deriv_modulus_sup": {"A_sigma_surrogate": "rhs"},
    "series_inverse_vexp": {"A_sigma_surrogate": "rhs"},
    "kfunc_equiv_vexp_upper": {"K_surrogate": "rhs"},
    "kfunc_equiv_vexp_lower": {"K_surrogate": "rhs"},
    "kfunc_equiv_sup_upper": {"K_surrogate": "rhs"},
    "kfunc_equiv_sup_lower": {"K_surrogate": "rhs"},
    "shift_modulus_sup_lower": {"h_grid_sup": "lhs_one_sided"},
    "shift_modulus_sup_upper": {"h_grid_sup": "rhs"},
}


def _case_from_dict(d: dict, defaults: dict) -> AuditCase:
    merged = {**defaults, **d}
    known = {
        "theorem": str(merged.get("theorem", "")),
        "f_src": str(merged.get("f", "")),
        "g_src": merged.get("g"),
        "p_src": merged.get("p"),
        "p_infinity": merged.get("p_infinity"),
        "r": int(merged.get("r", 1)),
        "k": int(merged.get("k", 1)),
        "deltas": tuple(float(v) for v in merged.get("deltas", [])),
        "sigmas": tuple(float(v) for v in merged.get("sigmas", [])),
        "t_grid": tuple(float(v) for v in merged.get("t_grid", [])),
        "lambdas": tuple(float(v) for v in merged.get("lambdas", [])),
        "series_n": int(merged.get("series_n", 16)),
        "lhs_window": (float(merged["lhs_window"])
                       if merged.get("lhs_window") is not None else None),
        "vp_tail": (float(merged["vp_tail"])
                    if merged.get("vp_tail") is not None else None),
    }
    if not known["theorem"]:
        raise ValueError("case is missing 'theorem'")
    if not known["f_src"]:
        raise ValueError("case is missing 'f'")
    if known["theorem"] not in THEOREM_RUNNERS:
        raise ValueError(f"unknown theorem id {known['theorem']!r}")
    return AuditCase(**known)


def run_case(ctx: Context, case: AuditCase) -> list[AuditRow]:
    return THEOREM_RUNNERS[case.theorem](ctx, case)


def validate_cases(ctx: Context, cases: list[AuditCase]) -> None:
    """Resolve all referenced functions and exponents before running anything.

    An exponent that dips below 1 raises here, so a bad configuration is
    rejected before any case executes.
    """
    for case in cases:
        ctx.member(case.f_src)
        if case.g_src:
            ctx.member(case.g_src)
        if case.p_src:
            ctx.exponent(case.p_src, case.p_infinity)


def run_suite(config_text: str, out_dir: Optional[str] = None,
              jobs: int = 1, spec: QuadSpec = DEFAULT_SPEC) -> tuple[AuditReport, int]:
    """Run every case in the configuration; returns (report, exit_code).

    exit_code is 0 when no row fails (inconclusive rows do not fail).
    Reports are written to out_dir when given.
    """
    cfg = parse_config(config_text)
    defaults = cfg.get("defaults", {})
    case_dicts = cfg.get("case", [])
    cases = [_case_from_dict(d, defaults) for d in case_dicts]
    ctx = Context(spec=spec)
    validate_cases(ctx, cases)

    if jobs > 1 and len(cases) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(lambda c: run_case(ctx, c), cases))
    else:
        chunks = [run_case(ctx, c) for c in cases]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.theorem_id, r.case_id))
    report = AuditReport(rows=rows)
    if out_dir:
        write_reports(report, out_dir)
    return report, (0 if report.n_fail == 0 else 1)


def report_csv(report: AuditReport) -> str:
    lines = ["theorem_id,case_id,lhs,rhs,constant,ratio,pass,flags"]
    for r in report.rows:
        flags = "|".join(r.surrogate_flags)
        lines.append(
            f"{r.theorem_id},{r.case_id},{r.lhs:.12g},{r.rhs:.12g},"
            f"{r.constant_used:.12g},{r.ratio:.12g},{r.status},{flags}")
    return "\n".join(lines) + "\n"


def write_reports(report: AuditReport, out_dir: str) -> tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "audit.csv")
    json_path = os.path.join(out_dir, "audit.json")
    with open(csv_path, "w") as fh:
        fh.write(report_csv(report))
    payload = {
        "summary": {"pass": report.n_pass, "fail": report.n_fail,
                    "inconclusive": report.n_inconclusive},
        "rows": [{
            "theorem_id": r.theorem_id, "case_id": r.case_id,
            "lhs": r.lhs, "rhs": r.rhs, "constant": r.constant_used,
            "ratio": r.ratio, "pass": r.status,
            "flags": list(r.surrogate_flags),
            "truncation_bounds": _jsonable(r.truncation_bounds),
        } for r in report.rows],
    }
    with open(json_path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    return obj
