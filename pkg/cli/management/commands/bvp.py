import logging

import numpy as np

from bvp_solver.solver import evaluate_grid, solve_bvp
from cli.base import SolverCommand, add_bvp_arguments
from cli.output import csv_text, emit, json_text
from cli.serializers import FORMATS, BvpConfigSerializer, build_bvp_problem, echo_bvp_config
from core.exceptions import HypothesisViolation
from verification.hypotheses import check_hypotheses
from verification.residuals import pde_residual

logger = logging.getLogger(__name__)


class Command(SolverCommand):
    help = '求解热方程边值问题 CF D u − u_xx = g，输出 x,t,u 网格（t 在外层，x 在内层）'
    serializer_class = BvpConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        add_bvp_arguments(parser)
        parser.add_argument('--format', choices=FORMATS, help='输出格式，默认 csv')
        parser.add_argument('--check-hypotheses', action='store_true', default=None,
                            help='求解前检查定理条件，不满足时以退出码 2 结束')
        parser.add_argument('--residual', action='store_true', default=None, help='在输出网格上附带 PDE 残差报告')

    def run(self, cfg):
        p = build_bvp_problem(cfg)
        report = None
        if cfg['check_hypotheses']:
            report = check_hypotheses(p)
            if not report.passed:
                raise HypothesisViolation(report)

        s = solve_bvp(p, check_hypotheses=False)
        x = np.linspace(0.0, 1.0, cfg['x_steps'] + 1)
        t = np.linspace(0.0, p.horizon, cfg['t_steps'] + 1)
        u = evaluate_grid(s, x, t)
        residual = pde_residual(s, p.g, (x.size, t.size, p.horizon)) if cfg['residual'] else None

        if cfg['format'] == 'json':
            document = {'config': echo_bvp_config(cfg)}
            if report is not None:
                document['hypothesis_report'] = report.to_dict()
            if residual is not None:
                document['residual_report'] = residual.to_dict()
            document['grid'] = {'x': x.tolist(), 't': t.tolist(), 'u': u.tolist()}
            text = json_text(document)
        else:
            text = csv_text(['x', 't', 'u'], ((xi, tj, u[j, i]) for j, tj in enumerate(t) for i, xi in enumerate(x)))
            if residual is not None:
                self.stderr.write(f"residual max_abs={residual.max_abs!r} l2={residual.l2!r}")

        emit(self, text, cfg.get('out'))
        logger.info(f"边值问题输出完成: 问题 {cfg['problem']}, 网格 {x.size}×{t.size}")
