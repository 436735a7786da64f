from django.apps import AppConfig


class BvpSolverConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'bvp_solver'
    verbose_name = '热方程边值问题'
