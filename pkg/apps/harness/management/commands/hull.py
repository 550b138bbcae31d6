from apps.geometry.serializers import dump_polytope
from apps.geometry.utils import polytope_volume, quickhull
from apps.harness.management.base import RecordCommand


class Command(RecordCommand):
    help = "Fecho convexo (Quickhull) de um poliedro ou de uma nuvem."

    def add_arguments(self, parser):
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument("--body")
        group.add_argument("--cloud")

    def compute(self, body=None, cloud=None, **options):
        points = self.body(body).cloud if body else self.cloud(cloud)
        hull = quickhull(points)
        document = dump_polytope(hull)
        document.update(vertex_count=len(hull.vertices), volume=polytope_volume(hull))
        return document
