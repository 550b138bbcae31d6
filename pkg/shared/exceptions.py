class HullmetryError(Exception):
    """Erro base de todas as operações do laboratório."""


class DegenerateInput(HullmetryError):
    """Pontos afimmente dependentes ou corpo de volume nulo."""


class NonOrientable(HullmetryError):
    """Não foi possível orientar a fronteira de forma consistente."""


class DimensionMismatch(HullmetryError):
    pass


class NonpositiveScale(HullmetryError):
    pass


class ParamOutOfRange(HullmetryError):
    pass


class PreconditionFailed(HullmetryError):
    pass


class TooLarge(HullmetryError):
    """Entrada grande demais para os oráculos exaustivos."""


class Unsupported(HullmetryError):
    """Regime ou combinação de parâmetros não coberto."""
