"""Parameter search over (K1, K2, p), original-method costs and asymptotic ratios."""

import logging
import math

import numpy as np
from scipy import optimize

from rts_lab.config import SearchConfig, search_config
from rts_lab.schemas.bccks import LN2, ErrorMode, SegmentPlan
from rts_lab.schemas.mixing import P_MAX, check_k_pair
from rts_lab.schemas.optimizer import (
    AsymptoticPoint,
    CurveRow,
    GridRow,
    SearchResult,
    TableRow,
    TotalMode,
)
from rts_lab.schemas.series import TailMode
from rts_lab.services.bccks import (
    V2_SELECT_WEIGHT,
    bccks_bounds,
    oaa_probability_cap,
    original_cost_point,
    rts_cost_point,
)
from rts_lab.services.series_kernel import taylor_tail

logger = logging.getLogger(__name__)

ORIGINAL_K_LIMIT = 500


class OptimizerError(ValueError):
    """Raised for invalid search requests."""


class InfeasibleBudgetError(OptimizerError):
    """No (K1, K2) pair admits a valid p for the budget."""


class UnreachableTargetError(OptimizerError):
    """No configuration within the search range reaches the error target."""


def delta_table(k_max: int) -> np.ndarray:
    """δ(K) = 2 (ln 2)^{K+1} / (K+1)! for K = 0..k_max."""
    return np.array([taylor_tail(LN2, k, TailMode.CLOSED_BOUND) for k in range(k_max + 1)])


def total_error(
    delta1: float | np.ndarray,
    delta_m: float | np.ndarray,
    p: float | np.ndarray,
    r: int,
    error_mode: ErrorMode = ErrorMode.SUM_FORM,
    total_mode: TotalMode = TotalMode.TIMES_R,
) -> float | np.ndarray:
    """
    Searched error for given δ1, δm and p.

    Args:
        delta1: K1 tail bound(s)
        delta_m: K2 tail bound(s)
        p: Mixing probability(ies)
        r: Number of segments
        error_mode: Max or sum packaging
        total_mode: Per segment, or multiplied by r

    Returns:
        The error, vectorized over array inputs
    """
    quadratic = np.asarray(delta1) ** 2 / (1.0 - np.asarray(p))
    if error_mode == ErrorMode.MAX_FORM:
        segment = np.maximum(40.0 * quadratic, 8.0 * np.asarray(delta_m))
    else:
        segment = 20.0 * quadratic + 4.0 * np.asarray(delta_m)
    multiplier = r if total_mode == TotalMode.TIMES_R else 1
    result = multiplier * segment
    return float(result) if np.ndim(result) == 0 else result


def p_from_budget(
    k1: int,
    k2: int,
    g: float,
    p_cap: float = P_MAX,
    v2_weight: float = V2_SELECT_WEIGHT,
) -> float | None:
    """
    Probability that spends exactly the budget: p K1 + (1-p)(4/3) K2 = G.

    Args:
        k1: Truncation order of V1
        k2: Truncation order of V2, k2 > k1
        g: Cost budget G
        p_cap: Largest admissible p
        v2_weight: Relative select cost of a V2 order

    Returns:
        p in [0, p_cap], or None when the budget cannot be spent exactly

    Examples:
        >>> round(p_from_budget(7, 10, 9.12), 4)
        0.6653
    """
    check_k_pair(k1, k2)
    denominator = v2_weight * k2 - k1
    if denominator <= 0.0:
        return None
    p = (v2_weight * k2 - g) / denominator
    if 0.0 <= p <= p_cap:
        return p
    return None


def _pairs(cfg: SearchConfig) -> tuple[np.ndarray, np.ndarray]:
    k1s, k2s = np.triu_indices(cfg.k_max + 1, 1)
    keep = k1s >= cfg.k_min
    return k1s[keep], k2s[keep]


def best_candidate_index(
    errors: np.ndarray, k1s: np.ndarray, k2s: np.ndarray, ps: np.ndarray
) -> int:
    """Index of the smallest error, ties broken by smaller k2, then k1, then p."""
    return int(np.lexsort((ps, k1s, k2s, errors))[0])


def _result(
    k1: int, k2: int, p: float, plan: SegmentPlan, cfg: SearchConfig, objective: float, count: int
) -> SearchResult:
    return SearchResult(
        cost=rts_cost_point(k1, k2, p, plan.n_terms, plan.r),
        bounds=bccks_bounds(k1, k2, p, plan.r, cfg.error_mode),
        objective=objective,
        candidates=count,
    )


def min_error_for_budget(
    g: float,
    plan: SegmentPlan,
    cfg: SearchConfig | None = None,
    v2_weight: float = V2_SELECT_WEIGHT,
) -> SearchResult:
    """
    Exhaustive search for the smallest error at cost budget G.

    Each pair spends the whole budget through p_from_budget; a budget at or
    above the all-V2 cost (4/3) K2 runs the pair at p = 0.

    Args:
        g: Cost budget G > 0
        plan: Segment plan supplying r and L
        cfg: Search ranges and error packaging
        v2_weight: Relative select cost of a V2 order

    Returns:
        SearchResult of the optimal configuration

    Raises:
        InfeasibleBudgetError: If no pair admits a valid p
    """
    cfg = cfg or search_config
    if not g > 0.0:
        raise OptimizerError(f"budget must be positive, got {g}")
    k1s, k2s = _pairs(cfg)
    deltas = delta_table(cfg.k_max)
    weighted = v2_weight * k2s
    denominator = weighted - k1s
    with np.errstate(divide="ignore", invalid="ignore"):
        ps = np.where(g >= weighted, 0.0, (weighted - g) / denominator)
    caps = np.minimum(cfg.p_cap, 1.0 / (1.0 + 2.0 * deltas[k1s]))
    feasible = (denominator > 0.0) & (ps >= 0.0) & (ps <= caps)
    if not np.any(feasible):
        raise InfeasibleBudgetError(f"no (K1, K2, p) spends the budget G = {g}")
    k1s, k2s, ps = k1s[feasible], k2s[feasible], ps[feasible]
    errors = total_error(deltas[k1s], deltas[k2s], ps, plan.r, cfg.error_mode, cfg.total_mode)
    best = best_candidate_index(errors, k1s, k2s, ps)
    logger.debug("budget %.4f: %d feasible candidates", g, k1s.size)
    return _result(
        int(k1s[best]), int(k2s[best]), float(ps[best]), plan, cfg, float(errors[best]), k1s.size
    )


def min_cost_for_error(
    eps_target: float, plan: SegmentPlan, cfg: SearchConfig | None = None
) -> SearchResult:
    """
    Cheapest configuration reaching an error target.

    The error grows and the cost falls with p, so every pair runs at the
    largest feasible p, located by bisection.

    Args:
        eps_target: Error target > 0
        plan: Segment plan supplying r and L
        cfg: Search ranges and error packaging

    Returns:
        SearchResult of the cheapest configuration (ties by k2, k1, p)

    Raises:
        UnreachableTargetError: If no pair reaches the target within k_max
    """
    cfg = cfg or search_config
    if not eps_target > 0.0:
        raise OptimizerError(f"error target must be positive, got {eps_target}")
    deltas = delta_table(cfg.k_max)
    best_key: tuple[float, int, int, float] | None = None
    best_error = math.nan
    count = 0
    for k1, k2 in zip(*_pairs(cfg), strict=True):
        k1, k2 = int(k1), int(k2)
        delta1, delta_m = float(deltas[k1]), float(deltas[k2])

        def error_at(p: float, delta1: float = delta1, delta_m: float = delta_m) -> float:
            return total_error(delta1, delta_m, p, plan.r, cfg.error_mode, cfg.total_mode)

        if error_at(0.0) > eps_target:
            continue
        p_max = min(cfg.p_cap, oaa_probability_cap(delta1))
        if error_at(p_max) <= eps_target:
            p = p_max
        else:
            p = optimize.brentq(
                lambda q, f=error_at: f(q) - eps_target, 0.0, p_max, xtol=cfg.bisection_tol
            )
            while p > 0.0 and error_at(p) > eps_target:
                p = max(p - cfg.bisection_tol, 0.0)
        count += 1
        cost = p * k1 + (1.0 - p) * V2_SELECT_WEIGHT * k2
        key = (cost, k2, k1, p)
        if best_key is None or key < best_key:
            best_key, best_error = key, error_at(p)
    if best_key is None:
        raise UnreachableTargetError(
            f"error target {eps_target} is unreachable with k_max = {cfg.k_max}"
        )
    _, k2, k1, p = best_key
    return _result(k1, k2, p, plan, cfg, best_error, count)


def original_cost_for_error(
    eps_target: float, plan: SegmentPlan, total_mode: TotalMode = TotalMode.TIMES_R
) -> int:
    """
    Smallest K with r δ(K) <= eps_target for the unrandomized method.

    Examples:
        >>> from rts_lab.services.bccks import plan_for_alpha_sum
        >>> original_cost_for_error(1e-8, plan_for_alpha_sum(200.0, 100.0, 200))
        13
    """
    if not eps_target > 0.0:
        raise OptimizerError(f"error target must be positive, got {eps_target}")
    multiplier = plan.r if total_mode == TotalMode.TIMES_R else 1
    for k in range(ORIGINAL_K_LIMIT + 1):
        if multiplier * taylor_tail(LN2, k, TailMode.CLOSED_BOUND) <= eps_target:
            return k
    raise UnreachableTargetError(f"no K <= {ORIGINAL_K_LIMIT} reaches {eps_target}")


def asymptotic_point(a_const: float, l_var: float) -> AsymptoticPoint:
    """
    Leading-order orders K = (A+L)/log(A+L) and K_mix = (A+L/2)/log(A+L/2).

    Args:
        a_const: A = log τ
        l_var: L = log(1/ε)

    Returns:
        AsymptoticPoint with ratio = K_mix / K

    Raises:
        OptimizerError: Unless A + L > e and A + L/2 > 1
    """
    full = a_const + l_var
    half = a_const + l_var / 2.0
    if not full > math.e or not half > 1.0:
        raise OptimizerError(f"asymptotic formula needs A + L > e and A + L/2 > 1, got A={a_const}, L={l_var}")
    k_orig = full / math.log(full)
    k_mix = half / math.log(half)
    return AsymptoticPoint(
        a_const=a_const, l_var=l_var, k_orig=k_orig, k_mix=k_mix, ratio=k_mix / k_orig
    )


def asymptotic_ratio(tau: float, eps: float) -> AsymptoticPoint:
    """Asymptotic cost ratio for evolution time τ > 1 and accuracy ε in (0, 1)."""
    if not tau > 1.0:
        raise OptimizerError(f"tau must exceed 1, got {tau}")
    if not 0.0 < eps < 1.0:
        raise OptimizerError(f"eps must lie in (0, 1), got {eps}")
    return asymptotic_point(math.log(tau), math.log(1.0 / eps))


def build_table(
    errors: list[float], plan: SegmentPlan, cfg: SearchConfig | None = None
) -> list[TableRow]:
    """Framework cost, original cost and percentage saving per error threshold."""
    cfg = cfg or search_config
    rows = []
    for error in errors:
        result = min_cost_for_error(error, plan, cfg)
        original = original_cost_for_error(error, plan, cfg.total_mode)
        original_point = original_cost_point(original, plan.n_terms, plan.r)
        framework = result.cost.g_indicator
        rows.append(
            TableRow(
                error=error,
                framework_cost=framework,
                original_cost=original,
                saving_pct=100.0 * (1.0 - framework / original_point.g_indicator),
                framework_cnot=result.cost.g_cnot,
                original_cnot=original_point.g_cnot,
                k1=result.cost.k1,
                k2=result.cost.k2,
                p=result.cost.p,
            )
        )
    return rows


def emit_curve(
    g_grid: list[float], plan: SegmentPlan, cfg: SearchConfig | None = None
) -> list[CurveRow]:
    """
    Error-versus-cost curve: best framework error per budget beside the original method.

    The original method at budget G runs at K = floor(G).

    Raises:
        OptimizerError: If the grid is not strictly increasing
    """
    cfg = cfg or search_config
    if any(b <= a for a, b in zip(g_grid, g_grid[1:], strict=False)):
        raise OptimizerError("g grid must be strictly increasing")
    multiplier = plan.r if cfg.total_mode == TotalMode.TIMES_R else 1
    rows = []
    for g in g_grid:
        original_k = math.floor(g) if g >= 1.0 else None
        original_epsilon = (
            multiplier * taylor_tail(LN2, original_k, TailMode.CLOSED_BOUND)
            if original_k is not None
            else math.inf
        )
        try:
            result = min_error_for_budget(g, plan, cfg)
        except InfeasibleBudgetError:
            logger.info("budget %.4f is infeasible", g)
            rows.append(
                CurveRow(
                    g=g,
                    best_k1=None,
                    best_k2=None,
                    best_p=None,
                    epsilon_total=math.inf,
                    original_k=original_k,
                    original_epsilon=original_epsilon,
                )
            )
            continue
        rows.append(
            CurveRow(
                g=g,
                best_k1=result.cost.k1,
                best_k2=result.cost.k2,
                best_p=result.cost.p,
                epsilon_total=result.objective,
                original_k=original_k,
                original_epsilon=original_epsilon,
            )
        )
    return rows


def epsilon_grid(
    k1s: list[int], k2s: list[int], p: float, plan: SegmentPlan, cfg: SearchConfig | None = None
) -> list[GridRow]:
    """
    Error at fixed p over (K1, K2) pairs with K2 > K1.

    Cells where p exceeds the amplification cap report an infinite error.
    """
    cfg = cfg or search_config
    rows = []
    for k1 in k1s:
        delta1 = taylor_tail(LN2, k1, TailMode.CLOSED_BOUND)
        feasible = p <= min(cfg.p_cap, oaa_probability_cap(delta1))
        for k2 in k2s:
            if k2 <= k1:
                continue
            epsilon = math.inf
            if feasible:
                delta_m = taylor_tail(LN2, k2, TailMode.CLOSED_BOUND)
                epsilon = total_error(delta1, delta_m, p, plan.r, cfg.error_mode, cfg.total_mode)
            rows.append(GridRow(k1=k1, k2=k2, p=p, epsilon_total=epsilon))
    return rows
