"""
Django settings for FracHeat project.

FracHeat 是 Caputo-Fabrizio 分数阶热方程的求解与校验工具，
以 Django 管理命令的形式提供命令行入口，没有 Web 界面。

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# 读取项目根目录下可选的 .env 文件
load_dotenv(BASE_DIR / '.env')

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'django-insecure-fracheat-local-only')

DEBUG = os.environ.get('FRACHEAT_DEBUG', 'false').lower() == 'true'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    # 第三方应用
    'rest_framework',

    # 自定义应用
    'core',
    'forcing_dsl',
    'cf_operators',
    'ivp_solver',
    'spectral_bases',
    'bvp_solver',
    'verification',
    'cli',
]


# Database
# 求解器本身不落库，保留默认的 SQLite 配置以便 manage.py 正常工作

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# 求解器数值配置
# 所有模块通过 core.conf.get_option() 读取，缺省值见 core/conf.py
CF_SOLVER_CONFIG = {
    'N_QUAD': 512,                 # 时间方向 Simpson 面板数（每单位时间）
    'H_FD_SCALE': 1e-6,            # 中心差分步长 h = H_FD_SCALE * max(1, T)
    'ALPHA_SINGULAR_TOL': 1e-12,   # |1 - alpha| 小于该值时拒绝除以 (1 - alpha)
    'RESONANCE_TOL': 1e-9,         # 共振判定带宽（相对）
    'COMPAT_TOL': 1e-9,            # f(0)=0, f'(0)=0 等相容条件的容差
    'PICARD_TOL': 1e-12,           # Picard 迭代收敛阈值
    'PICARD_MAX_ITER': 200,        # Picard 迭代上限
    'N_QUAD_X': 1024,              # 空间方向系数积分的 Simpson 区间数
    'N_T_CACHE': 513,              # 模态强迫项缓存的时间网格点数
    'DEFAULT_MODES': 32,           # 默认截断波数
    'HYPOTHESIS_GRID': 65,         # 定理条件检查的采样网格
    'DSL_STRICT_DOMAIN': True,     # 表达式求值出现 NaN/Inf 时直接报错
    'MODAL_WORKERS': 4,            # 模态求解线程数
}

# 日志配置
LOG_DIR = Path(os.environ.get('FRACHEAT_LOG_DIR', BASE_DIR / 'logs'))
LOG_DIR.mkdir(parents=True, exist_ok=True)

CONSOLE_LOG_LEVEL = os.environ.get('FRACHEAT_CONSOLE_LOG_LEVEL', 'WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'debug': {
            'format': '{levelname} {asctime} {module} {pathname} {lineno} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'INFO',
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': os.path.join(LOG_DIR, 'fracheat.log'),
            'formatter': 'verbose',
            'encoding': 'utf-8',
            'maxBytes': 10 * 1024 * 1024,  # 10 MB
            'backupCount': 5,
        },
        'debug_file': {
            'level': 'DEBUG',
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': os.path.join(LOG_DIR, 'debug.log'),
            'formatter': 'debug',
            'encoding': 'utf-8',
            'maxBytes': 10 * 1024 * 1024,  # 10 MB
            'backupCount': 5,
        },
        'console': {
            'level': CONSOLE_LOG_LEVEL,
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': True,
        },
        'forcing_dsl': {  # 表达式解析相关日志
            'handlers': ['file', 'debug_file'],
            'level': 'DEBUG',
            'propagate': True,
        },
        'cf_operators': {  # 分数阶算子数值计算日志
            'handlers': ['file', 'debug_file'],
            'level': 'DEBUG',
            'propagate': True,
        },
        'ivp_solver': {  # 初值问题求解日志
            'handlers': ['file', 'debug_file'],
            'level': 'DEBUG',
            'propagate': True,
        },
        'spectral_bases': {
            'handlers': ['file', 'debug_file'],
            'level': 'DEBUG',
            'propagate': True,
        },
        'bvp_solver': {  # 边值问题级数解日志
            'handlers': ['file', 'debug_file'],
            'level': 'DEBUG',
            'propagate': True,
        },
        'verification': {  # 残差与定理条件校验日志
            'handlers': ['file', 'debug_file'],
            'level': 'DEBUG',
            'propagate': True,
        },
        'cli': {  # 命令行运行日志
            'handlers': ['file', 'console', 'debug_file'],
            'level': 'DEBUG',
            'propagate': False,
        },
    },
}
