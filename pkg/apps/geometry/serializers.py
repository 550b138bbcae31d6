from rest_framework import serializers

from shared.exceptions import HullmetryError

from .types import PointCloud
from .utils import make_polytope


class CoordinateListField(serializers.ListField):
    child = serializers.ListField(child=serializers.FloatField(), allow_empty=False)


class PolytopeSerializer(serializers.Serializer):
    """
    Documento {"dim": n, "vertices": [[...]], "facets": [[idx, ...], ...]}.
    Em R^2 as facetas são arestas; em R^3, polígonos orientados.
    """

    dim = serializers.IntegerField(min_value=2, max_value=8)
    vertices = CoordinateListField(allow_empty=False)
    facets = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0)),
        allow_empty=False,
    )

    def validate(self, attrs):
        dim = attrs["dim"]
        if any(len(vertex) != dim for vertex in attrs["vertices"]):
            raise serializers.ValidationError(
                {"vertices": [f"Todos os vértices devem ter {dim} coordenadas."]}
            )
        try:
            attrs["polytope"] = make_polytope(attrs["vertices"], attrs["facets"])
        except HullmetryError as exc:
            raise serializers.ValidationError({"facets": [str(exc)]})
        return attrs


class PointCloudSerializer(serializers.Serializer):
    dim = serializers.IntegerField(min_value=1)
    points = CoordinateListField(allow_empty=False)
    metric = serializers.CharField(required=False, default="euclidean")

    def validate(self, attrs):
        dim = attrs["dim"]
        if any(len(point) != dim for point in attrs["points"]):
            raise serializers.ValidationError(
                {"points": [f"Todos os pontos devem ter {dim} coordenadas."]}
            )
        attrs["cloud"] = PointCloud(attrs["points"], metric=attrs["metric"])
        return attrs


def load_polytope(document: dict):
    serializer = PolytopeSerializer(data=document)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data["polytope"]


def load_cloud(document: dict) -> PointCloud:
    serializer = PointCloudSerializer(data=document)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data["cloud"]


def dump_polytope(poly) -> dict:
    return {
        "dim": poly.dim,
        "vertices": poly.vertices.tolist(),
        "facets": [list(facet) for facet in poly.facets],
    }


class BallSerializer(serializers.Serializer):
    center = serializers.ListField(child=serializers.FloatField())
    radius = serializers.FloatField()

    def to_representation(self, instance):
        return {
            "center": [float(x) for x in instance.center],
            "radius": float(instance.radius),
        }
