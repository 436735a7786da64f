"""
管理命令的公共部分：合并 --config 与命令行参数、校验、异常到退出码的映射

退出码:
    0  成功
    2  相容条件或定理条件不满足（CompatibilityError / HypothesisViolation）
    1  表达式、参数、配置或文件读写错误
"""

import logging

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import CompatibilityError, FracHeatError, HypothesisViolation, ParameterError
from .output import load_json
from .serializers import validate_config

logger = logging.getLogger(__name__)

# 配置文件中与命令行 dest 不同名的键
CONFIG_KEY_ALIASES = {'lambda': 'lam'}


def normalize_config(raw):
    if not isinstance(raw, dict):
        raise ParameterError("配置文件必须是 JSON 对象")
    config = {}
    for key, value in raw.items():
        name = str(key).replace('-', '_')
        config[CONFIG_KEY_ALIASES.get(name, name)] = value
    return config


def add_bvp_arguments(parser):
    """bvp 与 verify 共用的问题参数"""
    parser.add_argument('--problem', type=int, choices=[1, 2, 3, 4],
                        help='问题编号：1 Dirichlet，2 Neumann，3 周期，4 非局部')
    parser.add_argument('--alpha', type=float, help='分数阶 alpha，取值 (0, 1)')
    parser.add_argument('--g', help='强迫项 g(x, t) 的表达式，或 catalog:<名称>')
    parser.add_argument('--t-max', type=float, help='时间区间右端 T，默认 1')
    parser.add_argument('--modes', type=int, help='截断波数，默认读取 DEFAULT_MODES')
    parser.add_argument('--x-steps', type=int, help='输出网格的空间区间数，默认 32')
    parser.add_argument('--t-steps', type=int, help='输出网格的时间区间数，默认 32')


class SolverCommand(BaseCommand):
    """
    求解类管理命令的基类

    子类声明 serializer_class 并实现 run(cfg)；cfg 是校验后的配置字典。
    """

    serializer_class = None

    def add_arguments(self, parser):
        parser.add_argument('--config', help='JSON 配置文件，键与参数同名（- 或 _ 均可），命令行参数优先')
        parser.add_argument('--out', help='输出文件路径，缺省写到标准输出')

    def load_config(self, options):
        config = normalize_config(load_json(options['config'])) if options.get('config') else {}
        fields = self.serializer_class().fields
        unknown = sorted(set(config) - set(fields))
        if unknown:
            raise ParameterError(f"未知的配置项: {', '.join(unknown)}")
        data = {}
        for name in fields:
            value = options.get(name)
            if value is None:
                value = config.get(name)
            if value is not None:
                data[name] = value
        return validate_config(self.serializer_class, data)

    def run(self, cfg):
        raise NotImplementedError

    def handle(self, *args, **options):
        command = self.__module__.rsplit('.', 1)[-1]
        try:
            self.run(self.load_config(options))
        except (CompatibilityError, HypothesisViolation) as e:
            logger.error(f"{command} 命令失败: {e}")
            raise CommandError(str(e), returncode=2)
        except (FracHeatError, OSError, ValueError) as e:
            logger.error(f"{command} 命令失败: {e}")
            raise CommandError(str(e), returncode=1)
