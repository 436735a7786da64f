from django.apps import AppConfig


class SpectralBasesConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'spectral_bases'
    verbose_name = '特征函数系'
