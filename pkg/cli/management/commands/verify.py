import logging

import numpy as np

from bvp_solver.solver import solve_bvp
from cli.base import SolverCommand, add_bvp_arguments
from cli.output import emit, json_text, load_json
from cli.serializers import BvpConfigSerializer, build_bvp_problem, echo_bvp_config, validate_config, VerifyConfigSerializer
from core.exceptions import ParameterError
from verification.hypotheses import check_hypotheses
from verification.residuals import pde_residual, verify_grid

logger = logging.getLogger(__name__)

PROBLEM_KEYS = ('problem', 'alpha', 'g', 't_max', 'modes', 'x_steps', 't_steps')


def read_solution_file(path):
    """读取 bvp 命令写出的 JSON 文件，返回 (问题配置, x, t, u)"""
    document = load_json(path)
    try:
        config = document['config']
        grid = document['grid']
        x = np.asarray(grid['x'], dtype=float)
        t = np.asarray(grid['t'], dtype=float)
        u = np.asarray(grid['u'], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise ParameterError(f"{path} 不是 bvp 命令输出的 JSON 网格文件: {e}")
    if not isinstance(config, dict):
        raise ParameterError(f"{path} 中的 config 必须是对象")
    cfg = validate_config(BvpConfigSerializer, {key: config[key] for key in PROBLEM_KEYS if key in config})
    return cfg, x, t, u


class Command(SolverCommand):
    """
    residual_report 总是在重新求解的级数解上计算，只反映求解本身的精度；
    --input 文件中被改动的网格值（例如整体加 0.01）只体现在 data_defect 中，passed 同时考虑两者。
    """

    help = '校验级数解：定理条件、PDE 残差，以及（给出 --input 时）存储网格与级数解的偏差'
    serializer_class = VerifyConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        add_bvp_arguments(parser)
        parser.add_argument('--input', help='bvp 命令以 JSON 格式写出的网格文件；存储值与级数解的偏差见报告中的 data_defect')
        parser.add_argument('--tol', type=float, help='残差与偏差的通过阈值，默认 1e-4')

    def run(self, cfg):
        stored = None
        if cfg.get('input'):
            problem_cfg, x, t, u = read_solution_file(cfg['input'])
            stored = (x, t, u)
        else:
            problem_cfg = cfg

        p = build_bvp_problem(problem_cfg)
        s = solve_bvp(p, check_hypotheses=False)
        hypotheses = check_hypotheses(p)
        residual = pde_residual(s, p.g, (problem_cfg['x_steps'] + 1, problem_cfg['t_steps'] + 1, p.horizon))
        defect = verify_grid(s, *stored) if stored is not None else None

        tol = cfg['tol']
        passed = hypotheses.passed and residual.max_abs < tol and (defect is None or defect.max_abs < tol)
        document = {
            'config': echo_bvp_config(problem_cfg),
            'passed': passed,
            'hypothesis_report': hypotheses.to_dict(),
            'residual_report': residual.to_dict(),
        }
        if defect is not None:
            document['data_defect'] = defect.to_dict()
        emit(self, json_text(document), cfg.get('out'))

        summary = f"残差 {residual.max_abs:.3e}" + (f", 网格偏差 {defect.max_abs:.3e}" if defect is not None else "")
        if passed:
            logger.info(f"校验通过: {summary}")
        else:
            logger.warning(f"校验未通过: {summary}")
