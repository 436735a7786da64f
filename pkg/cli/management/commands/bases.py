import logging

import numpy as np

from cli.base import SolverCommand
from cli.output import csv_text, emit, format_float, json_text
from cli.serializers import BASES_TABLES, FORMATS, BasesConfigSerializer
from spectral_bases.bases import (
    BasisFamily, biorthogonality_matrix, eigenvalue, eval_basis, expansion_matrix, family_modes,
)

logger = logging.getLogger(__name__)


class Command(SolverCommand):
    help = '输出函数系的展开矩阵（根函数系为双正交矩阵）及其与单位阵的最大偏差，或基函数取值表'
    serializer_class = BasesConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--family', help='函数系：dirichlet, neumann, periodic, rootsystem, adjointsystem')
        parser.add_argument('--k-max', type=int, help='截断波数，默认 4')
        parser.add_argument('--table', choices=BASES_TABLES,
                            help='matrix（默认）输出展开矩阵；basis 输出各模态在 [0, 1] 均匀网格上的取值')
        parser.add_argument('--x-steps', type=int, help='basis 表的空间区间数，默认 32')
        parser.add_argument('--format', choices=FORMATS, help='输出格式，默认 json；csv 的表头为模态标签')

    def run(self, cfg):
        family, k_max = cfg['family'], cfg['k_max']
        modes = family_modes(family, k_max)
        labels = [m.label for m in modes]
        if cfg['table'] == 'basis':
            text = self.basis_table(cfg, modes, labels)
        else:
            text = self.expansion_table(cfg, labels)
        emit(self, text, cfg.get('out'))

    def basis_table(self, cfg, modes, labels):
        """表头 x,<模态标签>；每行是一个网格点上全部基函数的取值"""
        x = np.linspace(0.0, 1.0, cfg['x_steps'] + 1)
        values = np.column_stack([eval_basis(m, x) for m in modes])
        eigenvalues = [eigenvalue(m) for m in modes]
        logger.info(f"函数系 {cfg['family'].value} 取值表: {len(modes)} 个模态, {x.size} 个网格点")
        if cfg['format'] == 'csv':
            self.stderr.write('eigenvalues=' + ','.join(format_float(mu) for mu in eigenvalues))
            return csv_text(['x'] + labels, np.column_stack([x, values]))
        return json_text({
            'family': cfg['family'].value,
            'k_max': cfg['k_max'],
            'modes': labels,
            'eigenvalues': eigenvalues,
            'x': x.tolist(),
            'values': values.tolist(),
        })

    def expansion_table(self, cfg, labels):
        family, k_max = cfg['family'], cfg['k_max']
        if family == BasisFamily.ROOT_SYSTEM_X:
            matrix = biorthogonality_matrix(k_max)
        else:
            matrix = expansion_matrix(family, k_max)
        deviation = float(np.max(np.abs(matrix - np.eye(len(matrix)))))
        logger.info(f"函数系 {family.value} 展开矩阵 k_max={k_max}, 偏离单位阵 {deviation:.3e}")

        if cfg['format'] == 'csv':
            self.stderr.write(f"max_off_identity={deviation!r}")
            return csv_text(labels, matrix)
        return json_text({
            'family': family.value,
            'k_max': k_max,
            'modes': labels,
            'matrix': matrix.tolist(),
            'max_off_identity': deviation,
        })
