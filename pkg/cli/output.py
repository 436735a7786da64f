"""
输出文件的格式化

CSV 与 JSON 的数值一律用 17 位有效数字（'.17g'），小数点固定为 '.'；JSON 经由 DRF 的
JSONRenderer 渲染（NaN/Inf 直接报错），顶层带 "schema" 版本号。同样的输入产生逐字节相同的输出。
"""

import csv
import io
import json
from json import encoder as json_encoder
import logging
import math
from pathlib import Path

from rest_framework.renderers import JSONRenderer
from rest_framework.utils.encoders import JSONEncoder

from core.exceptions import ParameterError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def format_float(value):
    return format(float(value), '.17g')


class FixedPrecisionEncoder(JSONEncoder):
    """浮点数按 format_float 输出，与 CSV 逐字一致"""

    def iterencode(self, o, _one_shot=False):
        def floatstr(value):
            if not math.isfinite(value):
                if not self.allow_nan:
                    raise ValueError(f"JSON 不接受非有限数值: {value!r}")
                return repr(value).replace('inf', 'Infinity').replace('nan', 'NaN')
            return format_float(value)

        if self.ensure_ascii:
            encode_string = json_encoder.encode_basestring_ascii
        else:
            encode_string = json_encoder.encode_basestring
        iterencode = json_encoder._make_iterencode(
            {} if self.check_circular else None, self.default, encode_string, self.indent, floatstr,
            self.key_separator, self.item_separator, self.sort_keys, self.skipkeys, _one_shot,
        )
        return iterencode(o, 0)


class SolverJSONRenderer(JSONRenderer):
    encoder_class = FixedPrecisionEncoder


def csv_text(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(value) for value in row])
    return buffer.getvalue()


def json_text(document):
    payload = {'schema': SCHEMA_VERSION}
    payload.update(document)
    rendered = SolverJSONRenderer().render(payload, renderer_context={'indent': 2})
    return rendered.decode('utf-8') + '\n'


def emit(command, text, out=None):
    """写入 out 指定的文件，未指定时写到命令的标准输出"""
    if out:
        path = Path(out)
        path.write_text(text, encoding='utf-8', newline='\n')
        logger.info(f"已写出 {path}（{len(text)} 字符）")
    else:
        command.stdout.write(text, ending='')


def load_json(path):
    """读取 JSON 文件；文件不存在抛 OSError，内容不合法抛 ParameterError"""
    text = Path(path).read_text(encoding='utf-8')
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParameterError(f"{path} 不是合法的 JSON: 第 {e.lineno} 行第 {e.colno} 列 {e.msg}")
