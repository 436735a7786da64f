from django.apps import AppConfig


class IvpSolverConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'ivp_solver'
    verbose_name = '分数阶初值问题'
