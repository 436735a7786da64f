"""
命令行运行配置的校验

命令行参数与 --config 文件合并后交给这里的序列化器，所有字段错误汇总成一条消息。
"""

import math
import re

from rest_framework import serializers

from bvp_solver.problems import PROBLEM_NUMBERS, BVProblem
from core.conf import get_option
from core.exceptions import ParameterError
from forcing_dsl.exceptions import DSLError
from forcing_dsl.forcing import FieldForcing, TimeForcing
from spectral_bases.bases import BasisFamily

FORMATS = ('csv', 'json')

# bases 命令可输出的表：展开矩阵，或基函数在均匀网格上的取值
BASES_TABLES = ('matrix', 'basis')

FAMILY_ALIASES = {
    'dirichlet': BasisFamily.DIRICHLET_SINE,
    'dirichletsine': BasisFamily.DIRICHLET_SINE,
    'neumann': BasisFamily.NEUMANN_COSINE,
    'neumanncosine': BasisFamily.NEUMANN_COSINE,
    'periodic': BasisFamily.PERIODIC_FOURIER,
    'periodicfourier': BasisFamily.PERIODIC_FOURIER,
    'rootsystem': BasisFamily.ROOT_SYSTEM_X,
    'rootsystemx': BasisFamily.ROOT_SYSTEM_X,
    'adjointsystem': BasisFamily.ADJOINT_SYSTEM_Y,
    'adjointsystemy': BasisFamily.ADJOINT_SYSTEM_Y,
}


def _finite(value, name):
    if not math.isfinite(value):
        raise serializers.ValidationError(f"{name} 必须为有限数")
    return value


def _positive(value, name):
    if not _finite(value, name) > 0:
        raise serializers.ValidationError(f"{name} 必须为正数")
    return value


class IvpConfigSerializer(serializers.Serializer):
    """ivp 子命令"""

    alpha = serializers.FloatField()
    lam = serializers.FloatField()
    f = serializers.CharField()
    u0 = serializers.FloatField(default=0.0)
    t_max = serializers.FloatField(default=1.0)
    t_steps = serializers.IntegerField(default=100, min_value=1)
    out = serializers.CharField(required=False)
    format = serializers.ChoiceField(choices=FORMATS, default='csv')
    oracle = serializers.BooleanField(default=False)
    oracle_steps = serializers.IntegerField(default=2048, min_value=1)

    def validate_alpha(self, value):
        if not 0.0 < _finite(value, 'alpha') <= 1.0:
            raise serializers.ValidationError("alpha 必须在 (0, 1] 内")
        return value

    def validate_lam(self, value):
        return _finite(value, 'lambda')

    def validate_u0(self, value):
        return _finite(value, 'u0')

    def validate_t_max(self, value):
        return _positive(value, 't_max')

    def validate_f(self, value):
        try:
            return TimeForcing.from_expression(value)
        except DSLError as e:
            raise serializers.ValidationError(str(e))

    def validate(self, data):
        if data.get('oracle') and data.get('u0', 0.0) != 0.0:
            raise serializers.ValidationError("--oracle 只支持 u0 = 0")
        return data


class BvpConfigSerializer(serializers.Serializer):
    """bvp 子命令"""

    problem = serializers.IntegerField(min_value=1, max_value=4)
    alpha = serializers.FloatField()
    g = serializers.CharField()
    t_max = serializers.FloatField(default=1.0)
    modes = serializers.IntegerField(default=lambda: get_option('DEFAULT_MODES'), min_value=1)
    x_steps = serializers.IntegerField(default=32, min_value=2)
    t_steps = serializers.IntegerField(default=32, min_value=1)
    out = serializers.CharField(required=False)
    format = serializers.ChoiceField(choices=FORMATS, default='csv')
    check_hypotheses = serializers.BooleanField(default=False)
    residual = serializers.BooleanField(default=False)

    def validate_alpha(self, value):
        if not 0.0 < _finite(value, 'alpha') < 1.0:
            raise serializers.ValidationError("边值问题要求 alpha 在 (0, 1) 内")
        return value

    def validate_t_max(self, value):
        return _positive(value, 't_max')

    def validate_g(self, value):
        try:
            return FieldForcing.from_expression(value)
        except DSLError as e:
            raise serializers.ValidationError(str(e))


class VerifyConfigSerializer(BvpConfigSerializer):
    """
    verify 子命令

    给出 --input 时从文件读取问题与网格，否则按与 bvp 相同的参数重新求解。
    """

    problem = serializers.IntegerField(min_value=1, max_value=4, required=False)
    alpha = serializers.FloatField(required=False)
    g = serializers.CharField(required=False)
    input = serializers.CharField(required=False)
    tol = serializers.FloatField(default=1e-4)
    format = serializers.ChoiceField(choices=('json',), default='json')
    check_hypotheses = None
    residual = None

    def validate_tol(self, value):
        return _positive(value, 'tol')

    def validate(self, data):
        if 'input' not in data:
            missing = [name for name in ('problem', 'alpha', 'g') if name not in data]
            if missing:
                raise serializers.ValidationError(f"未给出 --input 时必须提供: {', '.join(missing)}")
        return data


class BasesConfigSerializer(serializers.Serializer):
    """bases 子命令"""

    family = serializers.CharField()
    k_max = serializers.IntegerField(default=4, min_value=1)
    table = serializers.ChoiceField(choices=BASES_TABLES, default='matrix')
    x_steps = serializers.IntegerField(default=32, min_value=1)
    out = serializers.CharField(required=False)
    format = serializers.ChoiceField(choices=FORMATS, default='json')

    def validate_family(self, value):
        key = re.sub(r'[^a-z]', '', value.lower())
        if key in FAMILY_ALIASES:
            return FAMILY_ALIASES[key]
        try:
            return BasisFamily(value)
        except ValueError:
            raise serializers.ValidationError(f"未知的函数系: {value}")


def _flatten(errors):
    if isinstance(errors, dict):
        return [message for value in errors.values() for message in _flatten(value)]
    if isinstance(errors, (list, tuple)):
        return [message for value in errors for message in _flatten(value)]
    return [str(errors)]


def aggregate_errors(errors):
    """把 DRF 的嵌套错误字典合并为一行：field: 消息; field: 消息"""
    parts = []
    for field, messages in errors.items():
        text = ' '.join(_flatten(messages))
        parts.append(text if field == 'non_field_errors' else f"{field}: {text}")
    return '; '.join(parts)


def validate_config(serializer_class, data):
    """校验失败时抛 ParameterError，消息包含全部字段错误"""
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        raise ParameterError(f"配置无效: {aggregate_errors(serializer.errors)}")
    return dict(serializer.validated_data)


def build_bvp_problem(cfg):
    return BVProblem(PROBLEM_NUMBERS[cfg['problem']], cfg['alpha'], cfg['g'], cfg['t_max'], cfg['modes'])


def echo_bvp_config(cfg):
    """输出文件中记录的问题配置，verify 据此重新求解"""
    return {
        'problem': cfg['problem'],
        'problem_kind': PROBLEM_NUMBERS[cfg['problem']].value,
        'alpha': cfg['alpha'],
        'g': cfg['g'].label,
        't_max': cfg['t_max'],
        'modes': cfg['modes'],
        'x_steps': cfg['x_steps'],
        't_steps': cfg['t_steps'],
    }
