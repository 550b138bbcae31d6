from apps.geometry.serializers import BallSerializer
from apps.geometry.utils import (
    beta_ratio,
    is_convex,
    min_enclosing_ball,
    volume_det,
    volume_projected,
    volume_ratio_poly,
)
from apps.harness.management.base import RecordCommand


class Command(RecordCommand):
    help = "Volume de um poliedro pelas duas fórmulas, com R, beta e a bola mínima envolvente."

    def add_arguments(self, parser):
        self.add_body_argument(parser)

    def compute(self, body, **options):
        poly = self.body(body)
        by_det = volume_det(poly.boundary)
        return {
            "volume": by_det,
            "volume_det": by_det,
            "volume_projected": volume_projected(poly.boundary),
            "R": volume_ratio_poly(poly),
            "beta": beta_ratio(poly),
            "convex": is_convex(poly),
            "enclosing_ball": BallSerializer(min_enclosing_ball(poly.cloud)).data,
        }
