from django.apps import AppConfig


class CfOperatorsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cf_operators'
    verbose_name = 'Caputo-Fabrizio 算子'
