from django.apps import AppConfig


class ForcingDslConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'forcing_dsl'
    verbose_name = '强迫项表达式'
