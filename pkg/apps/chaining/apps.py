from django.apps import AppConfig


class ChainingConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.chaining"
