"""
边值问题定理条件的数值检查

逐点条件（g(x,0) = 0 与边界相容性）在采样网格上取最大偏差，与 COMPAT_TOL 比较；
可积性条件（g_t ∈ L₁[0,T]、g_x ∈ L₂[0,1]）只报告采样范数，范数有限即通过。
"""

from dataclasses import asdict, dataclass
import logging
import math

import numpy as np
from scipy.integrate import simpson

from bvp_solver.problems import ProblemKind
from core.conf import get_option
from forcing_dsl.exceptions import DSLError

logger = logging.getLogger(__name__)

POINTWISE = 'pointwise'
INTEGRABILITY = 'integrability'


@dataclass(frozen=True)
class HypothesisRow:
    name: str
    required_by: str
    measured: float
    passed: bool
    kind: str = POINTWISE


@dataclass(frozen=True)
class HypothesisReport:
    problem: str
    rows: tuple

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    def failures(self):
        return [row for row in self.rows if not row.passed]

    def to_dict(self):
        return {
            'problem': str(self.problem),
            'passed': self.passed,
            'rows': [_row_dict(row) for row in self.rows],
        }


def _row_dict(row):
    # JSON 不接受 inf，采样失败的行输出 null
    data = asdict(row)
    if not math.isfinite(data['measured']):
        data['measured'] = None
    return data


def _measure(rule):
    try:
        with np.errstate(all='ignore'):
            value = float(rule())
    except (DSLError, FloatingPointError, ValueError) as e:
        logger.debug(f"定理条件采样失败: {e}")
        return math.inf
    return value if math.isfinite(value) else math.inf


def check_hypotheses(p, compat_tol=None, n_grid=None):
    """
    在 n_grid × n_grid 的网格上检查问题 p 的定理条件

    参数:
        p: BVProblem
        compat_tol: 逐点条件容差，None 时读取 COMPAT_TOL
        n_grid: 每个方向的采样点数，None 时读取 HYPOTHESIS_GRID

    返回:
        HypothesisReport
    """
    tol = get_option('COMPAT_TOL', compat_tol)
    n = int(get_option('HYPOTHESIS_GRID', n_grid))
    g = p.g
    x = np.linspace(0.0, 1.0, n)
    t = np.linspace(0.0, p.horizon, n)
    required_by = p.problem.value

    def field():
        return np.broadcast_to(np.asarray(g(x[None, :], t[:, None]), dtype=float), (n, n))

    def pointwise(name, rule):
        measured = _measure(rule)
        return HypothesisRow(name, required_by, measured, measured <= tol)

    def integrability(name, rule):
        measured = _measure(rule)
        return HypothesisRow(name, required_by, measured, math.isfinite(measured), INTEGRABILITY)

    def time_slope():
        if getattr(g, 'has_derivative', False):
            return np.broadcast_to(np.asarray(g.derivative_t(x[None, :], t[:, None]), dtype=float), (n, n))
        return np.gradient(field(), t, axis=0, edge_order=2)

    rows = [pointwise("g(x,0)=0", lambda: np.max(np.abs(g(x, np.zeros_like(x)))))]
    if p.problem == ProblemKind.P1_DIRICHLET:
        rows.append(pointwise(
            "g(0,t)=g(1,t)=0",
            lambda: max(np.max(np.abs(g(np.zeros_like(t), t))), np.max(np.abs(g(np.ones_like(t), t)))),
        ))
    elif p.problem in (ProblemKind.P3_PERIODIC, ProblemKind.P4_NONLOCAL):
        rows.append(pointwise(
            "g(0,t)=g(1,t)",
            lambda: np.max(np.abs(g(np.zeros_like(t), t) - g(np.ones_like(t), t))),
        ))
    rows.append(integrability(
        "g_t∈L1[0,T]",
        lambda: np.max(simpson(np.abs(time_slope()), x=t, axis=0)),
    ))
    rows.append(integrability(
        "g_x∈L2[0,1]",
        lambda: np.max(np.sqrt(simpson(np.gradient(field(), x, axis=1, edge_order=2) ** 2, x=x, axis=1))),
    ))

    report = HypothesisReport(p.problem, tuple(rows))
    for row in report.failures():
        logger.warning(f"定理条件不满足: {row.name}, 实测 {row.measured:.3e}, 问题 {row.required_by}")
    return report
